//! Finite-level Hilbert-space structure over a subshift: boundary measures
//! on cylinders, the Cuntz-Krieger family compressed to a filtration level,
//! grading (Dirac) spectral models, and a numerical probe of commutator
//! norms.
//!
//! Operator coefficients live in the exact ring ℚ[√m], where m is the
//! branching number of the measure, so the algebra relations are checked as
//! identities rather than to a tolerance. Only the norm probe uses floating
//! point.

use crate::cohomology::CohomologyError;
use crate::exact::{rat_to_f64, Int, QSqrt, Rat};
use crate::graph::{DirectedGraph, GraphError, TreeBall};
use crate::symbolic::{SubshiftSpec, SymbolicError};
use nalgebra::DMatrix;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum SpectralError {
    #[error("measure with branching {branching} is incompatible: {reason}")]
    IncompatibleMeasure { branching: usize, reason: String },
    #[error("level must be at least 1")]
    BadLevel,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
}

/// A finitely additive measure on cylinder sets of the one-sided shift,
/// determined by uniform splitting with a fixed branching number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CylinderMeasure {
    /// Boundary measure of a (q+1)-regular tree: a cylinder of length L has
    /// measure q^(-L-1), matching the shadow of a vertex at distance L.
    Tree { q: usize },
    /// Uniform boundary measure of the rank-g free-group shift: total mass
    /// one, split evenly among the 2g-1 admissible extensions.
    Bernoulli { g: usize },
}

impl CylinderMeasure {
    /// Number of admissible one-letter extensions the measure assumes.
    pub fn branching(&self) -> usize {
        match self {
            CylinderMeasure::Tree { q } => *q,
            CylinderMeasure::Bernoulli { g } => 2 * g - 1,
        }
    }

    /// Additivity requires every letter to have exactly `branching`
    /// continuations; the Bernoulli measure additionally assumes the
    /// 2g-letter alphabet.
    pub fn check_compatible(&self, spec: &SubshiftSpec) -> Result<(), SpectralError> {
        let m = self.branching();
        let err = |reason: String| SpectralError::IncompatibleMeasure {
            branching: m,
            reason,
        };
        match spec.constant_out_degree() {
            Some(d) if d == m => {}
            Some(d) => {
                return Err(err(format!(
                    "alphabet has constant out-degree {d}, measure splits into {m}"
                )))
            }
            None => return Err(err("alphabet out-degree is not constant".into())),
        }
        if let CylinderMeasure::Bernoulli { g } = self {
            if spec.size() != 2 * g {
                return Err(err(format!(
                    "Bernoulli measure wants {} letters, alphabet has {}",
                    2 * g,
                    spec.size()
                )));
            }
        }
        Ok(())
    }

    /// Measure of any cylinder of the given word length (length ≥ 1).
    pub fn cylinder_weight(&self, len: usize) -> Rat {
        let m = Int::from(self.branching());
        let base = match self {
            CylinderMeasure::Tree { q } => Rat::new(Int::one(), Int::from(q * q)),
            CylinderMeasure::Bernoulli { g } => Rat::new(Int::one(), Int::from(2 * g)),
        };
        let mut w = base;
        for _ in 1..len {
            w /= Rat::from_integer(m.clone());
        }
        w
    }
}

/// μ(V(v)) = q^(-d(v)-1): the measure of the shadow of a ball vertex.
pub fn tree_measure(ball: &TreeBall, v: usize) -> Result<Rat, GraphError> {
    let d = ball.distance(v)?;
    let mut denom = Int::one();
    for _ in 0..=d {
        denom *= Int::from(ball.q());
    }
    Ok(Rat::new(Int::one(), denom))
}

/// A sparse linear operator on the level-n cylinder space, stored by
/// columns: `cols[j]` is the image of basis vector j.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub dim: usize,
    cols: Vec<Vec<(usize, QSqrt)>>,
}

impl Operator {
    fn zero(dim: usize) -> Self {
        Operator {
            dim,
            cols: vec![Vec::new(); dim],
        }
    }

    fn identity(dim: usize) -> Self {
        Operator {
            dim,
            cols: (0..dim).map(|j| vec![(j, QSqrt::one())]).collect(),
        }
    }

    fn set(&mut self, row: usize, col: usize, v: QSqrt) {
        if !v.is_zero() {
            self.cols[col].push((row, v));
            self.cols[col].sort_by_key(|e| e.0);
        }
    }

    pub fn apply(&self, v: &[(usize, QSqrt)]) -> Vec<(usize, QSqrt)> {
        let mut acc: BTreeMap<usize, QSqrt> = BTreeMap::new();
        for (j, c) in v {
            for (i, a) in &self.cols[*j] {
                let term = a.mul(c);
                let e = acc.entry(*i).or_insert_with(QSqrt::zero);
                e.add_assign(&term);
            }
        }
        acc.into_iter().filter(|(_, c)| !c.is_zero()).collect()
    }

    /// Composition self ∘ other.
    pub fn compose(&self, other: &Operator) -> Operator {
        let cols = other.cols.iter().map(|col| self.apply(col)).collect();
        Operator {
            dim: self.dim,
            cols,
        }
    }

    pub fn add(&self, other: &Operator) -> Operator {
        let mut cols = Vec::with_capacity(self.dim);
        for j in 0..self.dim {
            let mut acc: BTreeMap<usize, QSqrt> = BTreeMap::new();
            for (i, c) in self.cols[j].iter().chain(other.cols[j].iter()) {
                let e = acc.entry(*i).or_insert_with(QSqrt::zero);
                e.add_assign(c);
            }
            cols.push(acc.into_iter().filter(|(_, c)| !c.is_zero()).collect());
        }
        Operator {
            dim: self.dim,
            cols,
        }
    }

    pub fn sub(&self, other: &Operator) -> Operator {
        let mut neg = other.clone();
        for col in &mut neg.cols {
            for (_, c) in col.iter_mut() {
                *c = QSqrt::zero().sub(c);
            }
        }
        self.add(&neg)
    }

    pub fn is_zero(&self) -> bool {
        self.cols.iter().all(|c| c.iter().all(|(_, v)| v.is_zero()))
    }

    /// Adjoint with respect to the diagonal inner product with weights μ:
    /// (A*)_{ij} = A_{ji} μ_j / μ_i.
    pub fn adjoint(&self, weights: &[Rat]) -> Operator {
        let mut out = Operator::zero(self.dim);
        for (j, col) in self.cols.iter().enumerate() {
            for (i, a) in col {
                let mut v = a.clone();
                v.scale(&(&weights[j] / &weights[*i]));
                out.cols[*i].push((j, v));
            }
        }
        for col in &mut out.cols {
            col.sort_by_key(|e| e.0);
        }
        out
    }

    pub fn to_dense_f64(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (j, col) in self.cols.iter().enumerate() {
            for (i, v) in col {
                m[(*i, j)] = v.to_f64();
            }
        }
        m
    }
}

/// The Cuntz-Krieger family compressed to the level-n cylinder space: one
/// partial isometry per letter (prepend, weighted by the square-rooted
/// measure ratio), its adjoint in the exact inner product, and the diagonal
/// cylinder weights.
#[derive(Debug, Clone)]
pub struct CKFamily {
    pub level: usize,
    pub basis: Vec<Vec<usize>>,
    pub measure: CylinderMeasure,
    isometries: Vec<Operator>,
    adjoints: Vec<Operator>,
    weights: Vec<Rat>,
    spec: SubshiftSpec,
}

/// Build the family at level n ≥ 1 from a spec and a compatible measure.
pub fn ck_family(
    spec: &SubshiftSpec,
    measure: CylinderMeasure,
    level: usize,
    budget: u64,
) -> Result<CKFamily, SpectralError> {
    if level < 1 {
        return Err(SpectralError::BadLevel);
    }
    measure.check_compatible(spec)?;
    let basis = crate::cohomology::cylinder_basis(spec, level, budget)?;
    let index: BTreeMap<&[usize], usize> = basis
        .iter()
        .enumerate()
        .map(|(i, w)| (w.as_slice(), i))
        .collect();
    let m = measure.branching();
    let dim = basis.len();
    let weights = vec![measure.cylinder_weight(level + 1); dim];
    // prepending letter i multiplies by the isometric weight
    // √(μ(w)/μ(iw)) = √m; compressing the lengthened cylinder back to this
    // level contributes the nesting ratio 1/m, so the matrix entry is 1/√m
    let mut compressed = QSqrt::sqrt_int(m as u64);
    compressed.scale(&Rat::new(Int::one(), Int::from(m)));
    let mut isometries = Vec::with_capacity(spec.size());
    for letter in 0..spec.size() {
        let mut op = Operator::zero(dim);
        for (col, w) in basis.iter().enumerate() {
            if !spec.admissible(letter, w[0]) {
                continue;
            }
            let mut target = Vec::with_capacity(w.len());
            target.push(letter);
            target.extend_from_slice(&w[..w.len() - 1]);
            let row = index[target.as_slice()];
            op.set(row, col, compressed.clone());
        }
        isometries.push(op);
    }
    let adjoints = isometries.iter().map(|s| s.adjoint(&weights)).collect();
    Ok(CKFamily {
        level,
        basis,
        measure,
        isometries,
        adjoints,
        weights,
        spec: spec.clone(),
    })
}

impl CKFamily {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn isometry(&self, letter: usize) -> &Operator {
        &self.isometries[letter]
    }

    pub fn adjoint_isometry(&self, letter: usize) -> &Operator {
        &self.adjoints[letter]
    }

    pub fn weights(&self) -> &[Rat] {
        &self.weights
    }

    pub fn spec(&self) -> &SubshiftSpec {
        &self.spec
    }

    /// Range projection S_i S_i*.
    pub fn range_projection(&self, letter: usize) -> Operator {
        self.isometries[letter].compose(&self.adjoints[letter])
    }

    /// The indicator of a shorter cylinder expanded into the level basis.
    pub fn expand_cylinder(&self, word: &[usize]) -> Vec<(usize, QSqrt)> {
        self.basis
            .iter()
            .enumerate()
            .filter(|(_, w)| w.len() >= word.len() && &w[..word.len()] == word)
            .map(|(i, _)| (i, QSqrt::one()))
            .collect()
    }

    /// Vertex projection of a graph family: the sum of range projections of
    /// the oriented edges with the given source.
    pub fn vertex_projection(&self, graph: &DirectedGraph, v: usize) -> Operator {
        let mut p = Operator::zero(self.dim());
        for w in 0..graph.oriented_count() {
            if graph.source(w) == v {
                p = p.add(&self.range_projection(w));
            }
        }
        p
    }

    /// Check the defining relations with exact arithmetic.
    ///
    /// The completeness relation `Σ_j S_j S_j* = 1` and the partial-isometry
    /// identity `S_i S_i* S_i = S_i` hold on the whole level space; the
    /// transition relation `S_i* S_i = Σ_j A_ij S_j S_j*` holds on the
    /// represented interior, i.e. on every cylinder short enough that its
    /// extensions stay at this level.
    pub fn check_relations(&self) -> CkReport {
        let dim = self.dim();
        let id = Operator::identity(dim);
        let mut sum = Operator::zero(dim);
        for letter in 0..self.spec.size() {
            sum = sum.add(&self.range_projection(letter));
        }
        let ck1_exact = sum.sub(&id).is_zero();
        let partial_isometry_exact = (0..self.spec.size()).all(|i| {
            let s = &self.isometries[i];
            s.compose(&self.adjoints[i]).compose(s).sub(s).is_zero()
        });
        // interior cylinders: all words of length ≤ level
        let range_projections: Vec<Operator> = (0..self.spec.size())
            .map(|j| self.range_projection(j))
            .collect();
        let mut ck2_exact = true;
        let mut interior_checked = 0usize;
        for len in 1..=self.level {
            let shorter = self
                .spec
                .enumerate_words(len, false, u64::MAX)
                .expect("interior enumeration stays below the level count");
            for u in shorter {
                let vec = self.expand_cylinder(u.letters());
                for i in 0..self.spec.size() {
                    let lhs = self.adjoints[i].apply(&self.isometries[i].apply(&vec));
                    let mut rhs: BTreeMap<usize, QSqrt> = BTreeMap::new();
                    for (j, proj) in range_projections.iter().enumerate() {
                        if !self.spec.admissible(i, j) {
                            continue;
                        }
                        for (k, c) in proj.apply(&vec) {
                            let e = rhs.entry(k).or_insert_with(QSqrt::zero);
                            e.add_assign(&c);
                        }
                    }
                    let rhs: Vec<(usize, QSqrt)> =
                        rhs.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                    if lhs != rhs {
                        ck2_exact = false;
                    }
                    interior_checked += 1;
                }
            }
        }
        CkReport {
            level: self.level,
            dim,
            ck1_exact,
            ck2_exact,
            partial_isometry_exact,
            interior_checked,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CkReport {
    pub level: usize,
    pub dim: usize,
    pub ck1_exact: bool,
    pub ck2_exact: bool,
    pub partial_isometry_exact: bool,
    pub interior_checked: usize,
}

impl CkReport {
    pub fn all_exact(&self) -> bool {
        self.ck1_exact && self.ck2_exact && self.partial_isometry_exact
    }
}

/// The transcendental unit of a spectral scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleUnit {
    One,
    TwoPiOverLogQ { q: usize },
}

/// Scale constant `num/den · unit`; eigenvalues are integer multiples.
/// Serializes as `{num, den, transcendental: "1"|"2pi_over_log_q", q?}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Scale {
    pub num: i64,
    pub den: i64,
    pub transcendental: ScaleUnit,
}

impl Serialize for Scale {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let has_q = matches!(self.transcendental, ScaleUnit::TwoPiOverLogQ { .. });
        let mut st = ser.serialize_struct("Scale", if has_q { 4 } else { 3 })?;
        st.serialize_field("num", &self.num)?;
        st.serialize_field("den", &self.den)?;
        match self.transcendental {
            ScaleUnit::One => st.serialize_field("transcendental", "1")?,
            ScaleUnit::TwoPiOverLogQ { q } => {
                st.serialize_field("transcendental", "2pi_over_log_q")?;
                st.serialize_field("q", &q)?;
            }
        }
        st.end()
    }
}

impl Scale {
    pub fn one() -> Self {
        Scale {
            num: 1,
            den: 1,
            transcendental: ScaleUnit::One,
        }
    }

    /// 2π/(R log q).
    pub fn nonarch(q: usize, r: i64) -> Self {
        Scale {
            num: 1,
            den: r,
            transcendental: ScaleUnit::TwoPiOverLogQ { q },
        }
    }

    pub fn value(&self) -> f64 {
        let rational = self.num as f64 / self.den as f64;
        match self.transcendental {
            ScaleUnit::One => rational,
            ScaleUnit::TwoPiOverLogQ { q } => rational * std::f64::consts::TAU / (q as f64).ln(),
        }
    }
}

/// One half-line of a spectrum: eigenvalues `sign · scale · (n + offset)`
/// for n ≥ 0, with a multiplicity per n.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralSide {
    pub sign: i8,
    pub offset: u8,
    pub mults: MultSeq,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MultSeq {
    Constant(u64),
    PerLevel(Vec<u64>),
}

impl MultSeq {
    pub fn get(&self, n: usize) -> Option<u64> {
        match self {
            MultSeq::Constant(m) => Some(*m),
            MultSeq::PerLevel(v) => v.get(n).copied(),
        }
    }
}

/// A spectral model: a scale constant and one or two half-lines of
/// eigenvalues with multiplicities.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralModel {
    pub name: String,
    pub scale: Scale,
    pub sides: Vec<SpectralSide>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralLineWire {
    pub n: usize,
    pub lambda_int: i64,
    pub mult: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectralModelWire {
    pub name: String,
    pub scale: Scale,
    pub lines: Vec<SpectralLineWire>,
}

impl SpectralModel {
    /// λ for index n on a side, as a float.
    pub fn lambda(&self, side: &SpectralSide, n: usize) -> f64 {
        f64::from(side.sign) * self.scale.value() * (n as f64 + f64::from(side.offset))
    }

    /// Explicit truncated line listing for serialization.
    pub fn to_wire(&self, depth: usize) -> SpectralModelWire {
        let mut lines = Vec::new();
        for side in &self.sides {
            for n in 0..=depth {
                let Some(mult) = side.mults.get(n) else {
                    break;
                };
                lines.push(SpectralLineWire {
                    n,
                    lambda_int: i64::from(side.sign) * (n as i64 + i64::from(side.offset)),
                    mult,
                });
            }
        }
        SpectralModelWire {
            name: self.name.clone(),
            scale: self.scale,
            lines,
        }
    }
}

/// Dimensions of the graded pieces of the cylinder filtration:
/// `dim P_n - dim P_{n-1}` with `dim P_0` first.
pub fn filtration_multiplicities(spec: &SubshiftSpec, max_n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(max_n + 1);
    let mut prev = Int::zero();
    for n in 0..=max_n {
        let dim = spec.count_words(n + 1, false);
        let diff = &dim - &prev;
        out.push(diff.to_string().parse().unwrap_or(u64::MAX));
        prev = dim;
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiracKind {
    /// Grading operator on one copy of the cochain space: λ(n) = n.
    ArchL,
    /// Two-sided operator with the duality shift: λ = n+1 and λ = -n.
    ArchH,
    /// Two-sided operator scaled by 2π/(R log q): λ = -(n+1)c and λ = +nc.
    NonarchH,
}

/// Spectral model of the grading operator with multiplicities taken from
/// the cylinder filtration of the spec, truncated at `max_level`.
pub fn dirac_model(
    kind: DiracKind,
    spec: &SubshiftSpec,
    q: usize,
    r: i64,
    max_level: usize,
) -> SpectralModel {
    let mults = MultSeq::PerLevel(filtration_multiplicities(spec, max_level));
    match kind {
        DiracKind::ArchL => SpectralModel {
            name: "arch_L".into(),
            scale: Scale::one(),
            sides: vec![SpectralSide {
                sign: 1,
                offset: 0,
                mults,
            }],
        },
        DiracKind::ArchH => SpectralModel {
            name: "arch_H".into(),
            scale: Scale::one(),
            sides: vec![
                SpectralSide {
                    sign: 1,
                    offset: 1,
                    mults: mults.clone(),
                },
                SpectralSide {
                    sign: -1,
                    offset: 0,
                    mults,
                },
            ],
        },
        DiracKind::NonarchH => SpectralModel {
            name: "nonarch_H".into(),
            scale: Scale::nonarch(q, r),
            sides: vec![
                SpectralSide {
                    sign: -1,
                    offset: 1,
                    mults: mults.clone(),
                },
                SpectralSide {
                    sign: 1,
                    offset: 0,
                    mults,
                },
            ],
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VModelKind {
    /// The distinguished graded subspace of the cohomology: multiplicity 2g
    /// on the nonpositive spectrum.
    ArchV,
    /// Its fixed part under the orientation-reversing involution, which
    /// pairs each generator with its inverse: multiplicity g.
    ArchVFinf,
    /// The dual-graph cohomology embedded per spectral line: multiplicity
    /// g = b₁ on both half-lines of the nonarchimedean spectrum.
    NonarchV,
}

/// Multiplicity model of the projection onto the distinguished subspace.
pub fn v_multiplicity_model(kind: VModelKind, g: usize, q: usize, r: i64) -> SpectralModel {
    match kind {
        VModelKind::ArchV => SpectralModel {
            name: "arch_V".into(),
            scale: Scale::one(),
            sides: vec![SpectralSide {
                sign: -1,
                offset: 0,
                mults: MultSeq::Constant(2 * g as u64),
            }],
        },
        VModelKind::ArchVFinf => SpectralModel {
            name: "arch_V_Finf".into(),
            scale: Scale::one(),
            sides: vec![SpectralSide {
                sign: -1,
                offset: 0,
                mults: MultSeq::Constant(g as u64),
            }],
        },
        VModelKind::NonarchV => SpectralModel {
            name: "nonarch_V".into(),
            scale: Scale::nonarch(q, r),
            sides: vec![
                SpectralSide {
                    sign: -1,
                    offset: 1,
                    mults: MultSeq::Constant(g as u64),
                },
                SpectralSide {
                    sign: 1,
                    offset: 0,
                    mults: MultSeq::Constant(g as u64),
                },
            ],
        },
    }
}

/// One row of the commutator-norm table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeRow {
    pub level: usize,
    pub norm: f64,
    /// ratio to the previous level's norm, when both are nonzero
    pub ratio: Option<f64>,
}

/// Numerically estimate `‖[D, S_i]‖` per level, where D is assembled from
/// the model's eigenvalues on the filtration projections of the level
/// space and the S_i are the compressed isometries. For two-sided models
/// the worse of the two sides is reported (the family acts diagonally).
pub fn commutator_probe(
    spec: &SubshiftSpec,
    measure: CylinderMeasure,
    model: &SpectralModel,
    levels: std::ops::RangeInclusive<usize>,
    budget: u64,
) -> Result<Vec<ProbeRow>, SpectralError> {
    let mut rows = Vec::new();
    let mut prev: Option<f64> = None;
    for level in levels {
        let family = ck_family(spec, measure, level, budget)?;
        let mut worst: f64 = 0.0;
        for side in &model.sides {
            let d = grading_matrix(&family, |k| model.lambda(side, k));
            for letter in 0..spec.size() {
                let s = family.isometry(letter).to_dense_f64();
                let comm = &d * &s - &s * &d;
                let norm = comm.svd(false, false).singular_values.max();
                worst = worst.max(norm);
            }
        }
        let ratio = prev.and_then(|p| (p != 0.0).then_some(worst / p));
        rows.push(ProbeRow {
            level,
            norm: worst,
            ratio,
        });
        prev = Some(worst);
    }
    Ok(rows)
}

/// D = Σ_k λ(k) (Π_k - Π_{k-1}) on the level space, in the orthonormalized
/// cylinder basis. Π_k averages over the blocks of equal (k+1)-prefix.
fn grading_matrix(family: &CKFamily, lambda: impl Fn(usize) -> f64) -> DMatrix<f64> {
    let dim = family.dim();
    let n = family.level;
    let mut d = DMatrix::zeros(dim, dim);
    let mut prev_proj = DMatrix::zeros(dim, dim);
    for k in 0..=n {
        let proj = if k == n {
            DMatrix::identity(dim, dim)
        } else {
            prefix_projection(family, k)
        };
        let hat = &proj - &prev_proj;
        d += hat * lambda(k);
        prev_proj = proj;
    }
    d
}

fn prefix_projection(family: &CKFamily, k: usize) -> DMatrix<f64> {
    let dim = family.dim();
    let mut groups: BTreeMap<&[usize], Vec<usize>> = BTreeMap::new();
    for (i, w) in family.basis.iter().enumerate() {
        groups.entry(&w[..k + 1]).or_default().push(i);
    }
    let mut p = DMatrix::zeros(dim, dim);
    for members in groups.values() {
        // cylinders at one level share their weight, so the block is the
        // uniform averaging projection
        let v = 1.0 / members.len() as f64;
        for &i in members {
            for &j in members {
                p[(i, j)] = v;
            }
        }
    }
    p
}

/// The swap involution on two copies of a graded space, against the
/// block-equal magnitude it is dual to: F² = 1 and [F, |D|] = 0, checked
/// exactly over the rationals on the integer eigenvalue grid.
pub fn sign_swap_commutes(mults: &[u64], lambda_int: &[i64]) -> (bool, bool) {
    assert_eq!(mults.len(), lambda_int.len());
    let mut squares_to_identity = true;
    let mut commutes = true;
    for (m, l) in mults.iter().zip(lambda_int) {
        if *m == 0 {
            continue;
        }
        let f = [[Rat::zero(), Rat::one()], [Rat::one(), Rat::zero()]];
        let dmag = {
            let a = Rat::from_integer(Int::from(l.abs()));
            [[a.clone(), Rat::zero()], [Rat::zero(), a]]
        };
        let f2 = mat2_mul(&f, &f);
        if f2 != [[Rat::one(), Rat::zero()], [Rat::zero(), Rat::one()]] {
            squares_to_identity = false;
        }
        if mat2_mul(&f, &dmag) != mat2_mul(&dmag, &f) {
            commutes = false;
        }
    }
    (squares_to_identity, commutes)
}

fn mat2_mul(a: &[[Rat; 2]; 2], b: &[[Rat; 2]; 2]) -> [[Rat; 2]; 2] {
    let mut out = [[Rat::zero(), Rat::zero()], [Rat::zero(), Rat::zero()]];
    for i in 0..2 {
        for j in 0..2 {
            for (k, bk) in b.iter().enumerate() {
                out[i][j] += &a[i][k] * &bk[j];
            }
        }
    }
    out
}

/// Completeness of the level projection: the graded multiplicities up to N
/// sum to the dimension of the level-N space.
pub fn projection_completeness(spec: &SubshiftSpec, max_n: usize) -> bool {
    let mults = filtration_multiplicities(spec, max_n);
    let total: u64 = mults.iter().sum();
    Int::from(total) == spec.count_words(max_n + 1, false)
}

pub fn rat_display(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn rat_abs_f64(r: &Rat) -> f64 {
    rat_to_f64(&r.abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{tree_ball, DirectedGraph, EdgeRec};

    const B: u64 = 10_000_000;

    fn edge_tree() -> DirectedGraph {
        DirectedGraph::new(
            vec!["u".into(), "v".into()],
            vec![EdgeRec {
                id: "e".into(),
                src: 0,
                dst: 1,
            }],
        )
        .unwrap()
    }

    #[test]
    fn tree_measure_values() {
        let b3 = tree_ball(&edge_tree(), 3, 2).unwrap();
        assert_eq!(
            tree_measure(&b3, 0).unwrap(),
            Rat::new(Int::one(), Int::from(3))
        );
        let b2 = tree_ball(&edge_tree(), 2, 2).unwrap();
        let depth2 = (0..b2.graph().vertex_count())
            .find(|&v| b2.distance(v).unwrap() == 2)
            .unwrap();
        assert_eq!(
            tree_measure(&b2, depth2).unwrap(),
            Rat::new(Int::one(), Int::from(8))
        );
    }

    #[test]
    fn tree_measure_child_additivity() {
        for q in [2usize, 3, 5] {
            let ball = tree_ball(&edge_tree(), q, 4).unwrap();
            for v in 0..ball.graph().vertex_count() {
                let children = ball.children(v);
                if ball.distance(v).unwrap() == 0 || children.is_empty() {
                    continue;
                }
                let sum: Rat = children
                    .iter()
                    .map(|&c| tree_measure(&ball, c).unwrap())
                    .sum();
                assert_eq!(sum, tree_measure(&ball, v).unwrap(), "q={q} v={v}");
            }
        }
    }

    #[test]
    fn level_zero_rejected() {
        let spec = SubshiftSpec::free_group(2).unwrap();
        assert!(matches!(
            ck_family(&spec, CylinderMeasure::Bernoulli { g: 2 }, 0, B),
            Err(SpectralError::BadLevel)
        ));
    }

    #[test]
    fn measure_compatibility() {
        let free = SubshiftSpec::free_group(2).unwrap();
        assert!(CylinderMeasure::Bernoulli { g: 2 }
            .check_compatible(&free)
            .is_ok());
        assert!(CylinderMeasure::Tree { q: 3 }
            .check_compatible(&free)
            .is_ok());
        assert!(CylinderMeasure::Tree { q: 2 }
            .check_compatible(&free)
            .is_err());
        let theta = DirectedGraph::mumford_genus2_preset(2)
            .unwrap()
            .directed_edge_matrix(true)
            .unwrap();
        assert!(CylinderMeasure::Tree { q: 2 }
            .check_compatible(&theta)
            .is_ok());
        assert!(CylinderMeasure::Bernoulli { g: 2 }
            .check_compatible(&theta)
            .is_err());
    }

    #[test]
    fn ck_relations_exact_free_group() {
        let spec = SubshiftSpec::free_group(2).unwrap();
        for level in 1..=3 {
            let fam = ck_family(&spec, CylinderMeasure::Bernoulli { g: 2 }, level, B).unwrap();
            let rep = fam.check_relations();
            assert!(rep.all_exact(), "level {level}: {rep:?}");
        }
    }

    #[test]
    fn ck_relations_exact_presets() {
        for (case, q) in [(1usize, 3usize), (2, 2), (3, 2)] {
            let spec = DirectedGraph::mumford_genus2_preset(case)
                .unwrap()
                .directed_edge_matrix(true)
                .unwrap();
            for level in 1..=4 {
                let fam = ck_family(&spec, CylinderMeasure::Tree { q }, level, B).unwrap();
                let rep = fam.check_relations();
                assert!(rep.all_exact(), "case {case} level {level}: {rep:?}");
            }
        }
    }

    #[test]
    fn single_loop_family_degenerates_to_projections() {
        // one loop: two oriented letters, each following only itself; the
        // compressed isometries are the cylinder projections themselves and
        // S*S = SS* holds as an identity
        let g = DirectedGraph::new(
            vec!["v".into()],
            vec![EdgeRec {
                id: "e".into(),
                src: 0,
                dst: 0,
            }],
        )
        .unwrap();
        let spec = g.directed_edge_matrix(true).unwrap();
        let fam = ck_family(&spec, CylinderMeasure::Tree { q: 1 }, 2, B).unwrap();
        for letter in 0..2 {
            let s = fam.isometry(letter);
            let sstar = fam.adjoint_isometry(letter);
            assert_eq!(s.compose(sstar), sstar.compose(s));
            assert!(s.compose(sstar).compose(s).sub(s).is_zero());
        }
        assert!(fam.check_relations().all_exact());
    }

    #[test]
    fn graph_vertex_projection_relation() {
        // S_w* S_w + S_w̄ S_w̄* = P_{r(w)} on the represented interior of
        // the oriented-edge family
        let g = DirectedGraph::mumford_genus2_preset(2).unwrap();
        let spec = g.directed_edge_matrix(true).unwrap();
        let fam = ck_family(&spec, CylinderMeasure::Tree { q: 2 }, 3, B).unwrap();
        for w in 0..g.oriented_count() {
            let s = fam.isometry(w).clone();
            let sstar = fam.adjoint_isometry(w).clone();
            let pr = fam.vertex_projection(&g, g.range(w));
            let correction = fam.range_projection(g.involution(w));
            for len in 1..=2usize {
                for u in spec.enumerate_words(len, false, B).unwrap() {
                    let vec = fam.expand_cylinder(u.letters());
                    let lhs = sstar.apply(&s.apply(&vec));
                    let rhs = pr.sub(&correction).apply(&vec);
                    assert_eq!(lhs, rhs, "edge {w} len {len}");
                }
            }
        }
    }

    #[test]
    fn dirac_multiplicities() {
        let spec = SubshiftSpec::free_group(2).unwrap();
        let m = dirac_model(DiracKind::ArchL, &spec, 2, 1, 4);
        let wire = m.to_wire(4);
        assert_eq!(wire.lines[0].mult, 4);
        assert_eq!(wire.lines[1].mult, 8);
        assert!(projection_completeness(&spec, 5));
    }

    #[test]
    fn nonarch_spectrum_is_the_full_integer_lattice() {
        let spec = SubshiftSpec::free_group(2).unwrap();
        let m = dirac_model(DiracKind::NonarchH, &spec, 3, 1, 6);
        let wire = m.to_wire(6);
        let mut ints: Vec<i64> = wire.lines.iter().map(|l| l.lambda_int).collect();
        ints.sort_unstable();
        assert_eq!(ints, (-7..=6).collect::<Vec<i64>>());
    }

    #[test]
    fn v_model_multiplicities() {
        let v = v_multiplicity_model(VModelKind::ArchV, 2, 2, 1);
        assert_eq!(v.sides[0].mults.get(7), Some(4));
        let vf = v_multiplicity_model(VModelKind::ArchVFinf, 2, 2, 1);
        assert_eq!(vf.sides[0].mults.get(0), Some(2));
        let theta = DirectedGraph::mumford_genus2_preset(2).unwrap();
        assert_eq!(theta.first_betti(), 2);
        let nv = v_multiplicity_model(VModelKind::NonarchV, theta.first_betti(), 3, 1);
        assert!(nv.sides.iter().all(|s| s.mults.get(3) == Some(2)));
    }

    #[test]
    fn probe_zero_model_gives_zero_norms() {
        let spec = SubshiftSpec::free_group(2).unwrap();
        let zero = SpectralModel {
            name: "zero".into(),
            scale: Scale {
                num: 0,
                den: 1,
                transcendental: ScaleUnit::One,
            },
            sides: vec![SpectralSide {
                sign: 1,
                offset: 0,
                mults: MultSeq::Constant(1),
            }],
        };
        let rows =
            commutator_probe(&spec, CylinderMeasure::Bernoulli { g: 2 }, &zero, 1..=3, B).unwrap();
        for r in rows {
            assert!(r.norm < 1e-12, "{r:?}");
        }
    }

    #[test]
    fn probe_unit_spacing_is_level_independent() {
        let spec = SubshiftSpec::free_group(2).unwrap();
        let model = dirac_model(DiracKind::ArchL, &spec, 2, 1, 8);
        let rows =
            commutator_probe(&spec, CylinderMeasure::Bernoulli { g: 2 }, &model, 1..=4, B).unwrap();
        // the isometries shift the grading by one step, so the commutator
        // norm is the unit spacing up to the bottom block, at every level
        for r in &rows {
            assert!(r.norm <= 1.0 + 1e-9, "{r:?}");
            assert!(r.norm > 0.5, "{r:?}");
        }
        for w in rows.windows(2) {
            assert!((w[1].norm - w[0].norm).abs() < 0.2, "{w:?}");
        }
    }

    #[test]
    fn sign_swap_identity_and_commutation() {
        let mults = [4u64, 8, 24, 72];
        let lambda: Vec<i64> = (0..4).collect();
        let (sq, comm) = sign_swap_commutes(&mults, &lambda);
        assert!(sq);
        assert!(comm);
    }
}
