//! Exact integer/rational linear algebra and a small real quadratic ring.
//!
//! Everything in here is deterministic and allocation-heavy rather than
//! clever: the matrices coming out of cylinder filtrations are sparse
//! incidence-like matrices with tiny entries, and the point of this module
//! is that ranks, kernels and elementary divisors are *exact*, not fast.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;

pub type Int = BigInt;
pub type Rat = BigRational;

/// Sparse integer matrix stored row-wise; each row is sorted by column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    pub nrows: usize,
    pub ncols: usize,
    rows: Vec<Vec<(usize, Int)>>,
}

impl SparseIntMatrix {
    pub fn zero(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            rows: vec![Vec::new(); nrows],
        }
    }

    pub fn from_dense(dense: &[Vec<Int>]) -> Self {
        let nrows = dense.len();
        let ncols = dense.first().map_or(0, |r| r.len());
        let rows = dense
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, v)| !v.is_zero())
                    .map(|(c, v)| (c, v.clone()))
                    .collect()
            })
            .collect();
        Self { nrows, ncols, rows }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: i64) {
        debug_assert!(r < self.nrows && c < self.ncols);
        let row = &mut self.rows[r];
        match row.binary_search_by_key(&c, |e| e.0) {
            Ok(i) => {
                row[i].1 += v;
                if row[i].1.is_zero() {
                    row.remove(i);
                }
            }
            Err(i) => row.insert(i, (c, Int::from(v))),
        }
    }

    pub fn row(&self, r: usize) -> &[(usize, Int)] {
        &self.rows[r]
    }

    pub fn nnz(&self) -> usize {
        self.rows.iter().map(|r| r.len()).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<Int>> {
        let mut out = vec![vec![Int::zero(); self.ncols]; self.nrows];
        for (r, row) in self.rows.iter().enumerate() {
            for (c, v) in row {
                out[r][*c] = v.clone();
            }
        }
        out
    }

    /// Stack `other` below `self` (column counts must agree).
    pub fn vstack(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.ncols, other.ncols);
        let mut rows = self.rows.clone();
        rows.extend(other.rows.iter().cloned());
        SparseIntMatrix {
            nrows: self.nrows + other.nrows,
            ncols: self.ncols,
            rows,
        }
    }

    /// Concatenate columns of `other` to the right of `self`.
    pub fn hstack(&self, other: &SparseIntMatrix) -> SparseIntMatrix {
        assert_eq!(self.nrows, other.nrows);
        let off = self.ncols;
        let mut rows = self.rows.clone();
        for (r, row) in other.rows.iter().enumerate() {
            for (c, v) in row {
                rows[r].push((c + off, v.clone()));
            }
        }
        SparseIntMatrix {
            nrows: self.nrows,
            ncols: self.ncols + other.ncols,
            rows,
        }
    }

    pub fn apply_to_int_vec(&self, v: &[Int]) -> Vec<Int> {
        assert_eq!(v.len(), self.ncols);
        self.rows
            .iter()
            .map(|row| {
                let mut acc = Int::zero();
                for (c, a) in row {
                    acc += a * &v[*c];
                }
                acc
            })
            .collect()
    }

    /// Exact rank over the rationals by sparse fraction-free elimination.
    ///
    /// Pivots are taken from the shortest available rows, breaking ties
    /// toward sparser columns and unit entries; rows are kept integral and
    /// divided by their content after every update, which keeps entries
    /// small on the incidence-type matrices this crate produces.
    pub fn rank(&self) -> usize {
        let ncols = self.ncols;
        let mut rows: Vec<Vec<(usize, Int)>> = self
            .rows
            .iter()
            .filter(|r| !r.is_empty())
            .cloned()
            .collect();
        let nrows = rows.len();
        let mut col_count = vec![0usize; ncols];
        let mut col_rows: Vec<Vec<usize>> = vec![Vec::new(); ncols];
        for (i, row) in rows.iter().enumerate() {
            for (c, _) in row {
                col_count[*c] += 1;
                col_rows[*c].push(i);
            }
        }
        // min-heap of (row length, row index), revalidated lazily
        let mut heap: std::collections::BinaryHeap<std::cmp::Reverse<(usize, usize)>> = rows
            .iter()
            .enumerate()
            .map(|(i, r)| std::cmp::Reverse((r.len(), i)))
            .collect();
        let mut retired = vec![false; nrows];
        let mut rank = 0usize;
        while let Some(std::cmp::Reverse((len, pi))) = heap.pop() {
            if retired[pi] || rows[pi].len() != len {
                continue; // stale entry
            }
            if rows[pi].is_empty() {
                retired[pi] = true;
                continue;
            }
            // choose the pivot column: sparsest column of this row,
            // preferring unit entries
            let (pc, pivot_val) = rows[pi]
                .iter()
                .min_by_key(|(c, v)| (usize::from(!v.abs().is_one()), col_count[*c]))
                .map(|(c, v)| (*c, v.clone()))
                .unwrap();
            let pivot_row = std::mem::take(&mut rows[pi]);
            for (c, _) in &pivot_row {
                col_count[*c] -= 1;
            }
            retired[pi] = true;
            rank += 1;
            let victims = std::mem::take(&mut col_rows[pc]);
            for i in victims {
                if retired[i] {
                    continue;
                }
                let coeff = match rows[i].binary_search_by_key(&pc, |e| e.0) {
                    Ok(k) => rows[i][k].1.clone(),
                    Err(_) => continue, // stale occupancy entry
                };
                for (c, _) in &rows[i] {
                    col_count[*c] -= 1;
                }
                // row <- pivot_val * row - coeff * pivot_row, reduce content
                let merged = merge_rows(&rows[i], &pivot_val, &pivot_row, &coeff);
                rows[i] = reduce_content(merged);
                for (c, _) in &rows[i] {
                    col_count[*c] += 1;
                    col_rows[*c].push(i);
                }
                if rows[i].is_empty() {
                    retired[i] = true;
                } else {
                    heap.push(std::cmp::Reverse((rows[i].len(), i)));
                }
            }
        }
        rank
    }
}

fn merge_rows(
    row: &[(usize, Int)],
    pv: &Int,
    prow: &[(usize, Int)],
    coeff: &Int,
) -> Vec<(usize, Int)> {
    let mut out = Vec::with_capacity(row.len() + prow.len());
    let (mut i, mut j) = (0usize, 0usize);
    while i < row.len() || j < prow.len() {
        let take_row = j >= prow.len() || (i < row.len() && row[i].0 < prow[j].0);
        let take_both = i < row.len() && j < prow.len() && row[i].0 == prow[j].0;
        if take_both {
            let v = pv * &row[i].1 - coeff * &prow[j].1;
            if !v.is_zero() {
                out.push((row[i].0, v));
            }
            i += 1;
            j += 1;
        } else if take_row {
            out.push((row[i].0, pv * &row[i].1));
            i += 1;
        } else {
            let v = -(coeff * &prow[j].1);
            out.push((prow[j].0, v));
            j += 1;
        }
    }
    out
}

fn reduce_content(mut row: Vec<(usize, Int)>) -> Vec<(usize, Int)> {
    let mut g = Int::zero();
    for (_, v) in &row {
        g = g.gcd(v);
        if g.is_one() {
            return row;
        }
    }
    if g > Int::one() {
        for (_, v) in &mut row {
            *v /= &g;
        }
    }
    row
}

/// Smith normal form of a dense integer matrix. Returns the diagonal
/// (elementary divisors, nonnegative, divisibility-ordered, zeros dropped).
#[allow(clippy::ptr_arg, clippy::needless_range_loop)]
pub fn smith_normal_form(dense: &mut Vec<Vec<Int>>) -> Vec<Int> {
    let nrows = dense.len();
    let ncols = if nrows == 0 { 0 } else { dense[0].len() };
    let mut divisors = Vec::new();
    let mut k = 0usize;
    while k < nrows.min(ncols) {
        // find a nonzero entry of minimal absolute value in the trailing block
        let mut pivot: Option<(usize, usize)> = None;
        for i in k..nrows {
            for j in k..ncols {
                if !dense[i][j].is_zero()
                    && pivot.is_none_or(|(pi, pj)| dense[i][j].abs() < dense[pi][pj].abs())
                {
                    pivot = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = pivot else { break };
        dense.swap(k, pi);
        for row in dense.iter_mut() {
            row.swap(k, pj);
        }
        loop {
            let mut clean = true;
            for i in (k + 1)..nrows {
                if dense[i][k].is_zero() {
                    continue;
                }
                let q = div_round(&dense[i][k], &dense[k][k]);
                for j in k..ncols {
                    let s = &q * &dense[k][j];
                    dense[i][j] -= s;
                }
                if !dense[i][k].is_zero() {
                    dense.swap(k, i);
                    clean = false;
                }
            }
            for j in (k + 1)..ncols {
                if dense[k][j].is_zero() {
                    continue;
                }
                let q = div_round(&dense[k][j], &dense[k][k]);
                for row in dense.iter_mut().take(nrows).skip(k) {
                    let s = &q * &row[k];
                    row[j] -= s;
                }
                if !dense[k][j].is_zero() {
                    for row in dense.iter_mut() {
                        row.swap(k, j);
                    }
                    clean = false;
                }
            }
            if clean {
                break;
            }
        }
        // enforce divisibility of the remaining block by the pivot
        let piv = dense[k][k].clone();
        let mut fixed = true;
        'scan: for i in (k + 1)..nrows {
            for j in (k + 1)..ncols {
                if !(&dense[i][j] % &piv).is_zero() {
                    // add row i to row k and restart this pivot
                    for j2 in k..ncols {
                        let v = dense[i][j2].clone();
                        dense[k][j2] += v;
                    }
                    fixed = false;
                    break 'scan;
                }
            }
        }
        if !fixed {
            continue;
        }
        divisors.push(dense[k][k].abs());
        k += 1;
    }
    divisors
}

fn div_round(a: &Int, b: &Int) -> Int {
    // truncated quotient; leaves |remainder| < |b|, which is all the
    // elimination loop needs to make progress
    a / b
}

/// An element of the ring generated over the rationals by square roots of
/// squarefree positive integers, stored as a finite sum `Σ c_d · √d`.
///
/// Closed under addition and multiplication, with exact equality; division
/// is only needed by rational scalars, which keeps arithmetic simple.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct QSqrt {
    terms: BTreeMap<u64, Rat>,
}

impl QSqrt {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::from_rat(Rat::one())
    }

    pub fn from_rat(r: Rat) -> Self {
        let mut t = BTreeMap::new();
        if !r.is_zero() {
            t.insert(1, r);
        }
        QSqrt { terms: t }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rat(Rat::from_integer(Int::from(n)))
    }

    /// √n for a positive integer n, reduced to `a·√d` with d squarefree.
    pub fn sqrt_int(n: u64) -> Self {
        assert!(n > 0, "sqrt of nonpositive integer");
        let (sq, free) = split_square(n);
        let mut t = BTreeMap::new();
        t.insert(free, Rat::from_integer(Int::from(sq)));
        QSqrt { terms: t }
    }

    /// √(p/q) = √(pq)/q for positive rationals.
    pub fn sqrt_rat(r: &Rat) -> Self {
        assert!(r.is_positive(), "sqrt of nonpositive rational");
        let p = r.numer().clone();
        let q = r.denom().clone();
        let pq = (&p * &q)
            .to_string()
            .parse::<u64>()
            .expect("sqrt operand too large");
        let mut v = Self::sqrt_int(pq);
        let scale = Rat::new(Int::one(), q);
        v.scale(&scale);
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&mut self, r: &Rat) {
        if r.is_zero() {
            self.terms.clear();
            return;
        }
        for v in self.terms.values_mut() {
            *v *= r;
        }
    }

    pub fn add_assign(&mut self, other: &QSqrt) {
        for (d, c) in &other.terms {
            let e = self.terms.entry(*d).or_insert_with(Rat::zero);
            *e += c;
            if e.is_zero() {
                self.terms.remove(d);
            }
        }
    }

    pub fn sub(&self, other: &QSqrt) -> QSqrt {
        let mut out = self.clone();
        for (d, c) in &other.terms {
            let e = out.terms.entry(*d).or_insert_with(Rat::zero);
            *e -= c;
            if e.is_zero() {
                out.terms.remove(d);
            }
        }
        out
    }

    pub fn mul(&self, other: &QSqrt) -> QSqrt {
        let mut out = QSqrt::zero();
        for (d1, c1) in &self.terms {
            for (d2, c2) in &other.terms {
                let g = gcd_u64(*d1, *d2);
                let d = (d1 / g) * (d2 / g);
                let coeff = c1 * c2 * Rat::from_integer(Int::from(g));
                let e = out.terms.entry(d).or_insert_with(Rat::zero);
                *e += coeff;
                if e.is_zero() {
                    out.terms.remove(&d);
                }
            }
        }
        out
    }

    pub fn to_f64(&self) -> f64 {
        self.terms
            .iter()
            .map(|(d, c)| rat_to_f64(c) * (*d as f64).sqrt())
            .sum()
    }

    /// Rational part if the element lies in ℚ.
    pub fn as_rat(&self) -> Option<Rat> {
        match self.terms.len() {
            0 => Some(Rat::zero()),
            1 => self.terms.get(&1).cloned(),
            _ => None,
        }
    }
}

pub fn rat_to_f64(r: &Rat) -> f64 {
    let nf: f64 = r.numer().to_string().parse().unwrap_or(f64::NAN);
    let df: f64 = r.denom().to_string().parse().unwrap_or(f64::NAN);
    nf / df
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd_u64(b, a % b)
    }
}

/// n = sq² · free with free squarefree.
fn split_square(n: u64) -> (u64, u64) {
    let mut sq = 1u64;
    let mut free = 1u64;
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        let mut e = 0;
        while m.is_multiple_of(p) {
            m /= p;
            e += 1;
        }
        sq *= p.pow(e / 2);
        if e % 2 == 1 {
            free *= p;
        }
        p += 1;
    }
    free *= m;
    (sq, free)
}

/// Möbius function for small arguments.
pub fn moebius(n: u64) -> i64 {
    assert!(n >= 1);
    let mut m = n;
    let mut k = 0u32;
    let mut p = 2u64;
    while p * p <= m {
        if m.is_multiple_of(p) {
            m /= p;
            if m.is_multiple_of(p) {
                return 0;
            }
            k += 1;
        }
        p += 1;
    }
    if m > 1 {
        k += 1;
    }
    if k.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            if d != n / d {
                out.push(n / d);
            }
        }
        d += 1;
    }
    out.sort_unstable();
    out
}
