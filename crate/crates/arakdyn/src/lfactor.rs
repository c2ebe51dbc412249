//! Gamma factors, Hodge-data archimedean L-factors, a complex Hurwitz zeta
//! with z-derivative at zero, and the zeta-regularized determinant engine.
//!
//! The determinant of a half-line spectrum `{s + C·(n+δ)}` is evaluated
//! through the Hurwitz zeta as `exp(-d/dz [C^{-z} ζ(z, s/C+δ)])` at z = 0,
//! with the finitely many terms of nonpositive real part factored out as
//! literal multiplicands. Two-sided spectra multiply the two half-line
//! determinants. The Hurwitz engine is an Euler-Maclaurin evaluation and is
//! independent of the gamma implementation, so the classical ζ'(0,a) =
//! log Γ(a) - ½ log 2π identity serves as a cross-check between the two.

use crate::spectral::{MultSeq, SpectralModel};
use num_complex::Complex64;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum LFactorError {
    #[error("gamma pole at {0}")]
    GammaPole(Complex64),
    #[error("Hurwitz zeta requires Re a > 0, got a = {0}")]
    Domain(Complex64),
    #[error("zeta argument z = 1 is the pole of the continuation")]
    ZetaPole,
    #[error("s = {0} collides with the spectrum")]
    PoleCollision(Complex64),
    #[error("Hodge numbers must satisfy p + q = m; offending entry ({p},{q})")]
    BadHodge { p: u32, q: u32 },
    #[error("eigenspace dimensions h^+ + h^- = {got} must equal h^(m/2,m/2) = {want}")]
    BadEigensplit { got: u64, want: u64 },
    #[error("determinant jobs need a constant multiplicity per spectral line")]
    NonConstantMultiplicity,
    #[error("empty fit grid")]
    EmptyGrid,
}

const TWO_PI: f64 = std::f64::consts::TAU;

// ---------------------------------------------------------------------------
// gamma

/// Lanczos coefficients (g = 7, n = 9).
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(z: Complex64) -> bool {
    z.im.abs() < 1e-12 && z.re <= 0.5 && (z.re - z.re.round()).abs() < 1e-12
}

/// Principal log Γ(z); reflection is used for Re z < 0.5.
pub fn ln_gamma(z: Complex64) -> Result<Complex64, LFactorError> {
    if is_nonpositive_integer(z) {
        return Err(LFactorError::GammaPole(z));
    }
    if z.re < 0.5 {
        // log Γ(z) = log π - log sin(πz) - log Γ(1-z)
        let pi = Complex64::new(std::f64::consts::PI, 0.0);
        let s = (pi * z).sin();
        return Ok(pi.ln() - s.ln() - ln_gamma(Complex64::new(1.0, 0.0) - z)?);
    }
    let zm = z - 1.0;
    let mut acc = Complex64::new(LANCZOS[0], 0.0);
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (zm + i as f64);
    }
    let t = zm + LANCZOS_G + 0.5;
    Ok((TWO_PI).sqrt().ln() + (zm + 0.5) * t.ln() - t + acc.ln())
}

pub fn gamma(z: Complex64) -> Result<Complex64, LFactorError> {
    Ok(ln_gamma(z)?.exp())
}

/// Γ_C(s) = (2π)^(-s) Γ(s).
pub fn gamma_c(s: Complex64) -> Result<Complex64, LFactorError> {
    Ok((Complex64::new(TWO_PI, 0.0).ln() * (-s)).exp() * gamma(s)?)
}

/// Γ_R(s) = 2^(-1/2) π^(-s/2) Γ(s/2).
pub fn gamma_r(s: Complex64) -> Result<Complex64, LFactorError> {
    let half = s / 2.0;
    let pi = Complex64::new(std::f64::consts::PI, 0.0);
    Ok((pi.ln() * (-half)).exp() * gamma(half)? / 2f64.sqrt())
}

// ---------------------------------------------------------------------------
// Hodge data and the archimedean factor

/// Hodge numbers of one cohomological degree, with the eigenspace split on
/// the middle (p, p) piece when the degree is even.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HodgeData {
    pub degree: u32,
    entries: Vec<((u32, u32), u64)>,
    pub h_plus: u64,
    pub h_minus: u64,
}

impl HodgeData {
    pub fn new(
        degree: u32,
        entries: Vec<((u32, u32), u64)>,
        h_plus: u64,
        h_minus: u64,
    ) -> Result<Self, LFactorError> {
        for ((p, q), _) in &entries {
            if p + q != degree {
                return Err(LFactorError::BadHodge { p: *p, q: *q });
            }
        }
        if degree.is_multiple_of(2) {
            let middle = degree / 2;
            let want = entries
                .iter()
                .find(|((p, q), _)| *p == middle && *q == middle)
                .map(|(_, h)| *h)
                .unwrap_or(0);
            if h_plus + h_minus != want {
                return Err(LFactorError::BadEigensplit {
                    got: h_plus + h_minus,
                    want,
                });
            }
        }
        Ok(Self {
            degree,
            entries,
            h_plus,
            h_minus,
        })
    }

    /// Degree-one Hodge structure of a genus-g curve.
    pub fn curve(g: u64) -> Self {
        Self {
            degree: 1,
            entries: vec![((1, 0), g), ((0, 1), g)],
            h_plus: 0,
            h_minus: 0,
        }
    }

    pub fn entries(&self) -> &[((u32, u32), u64)] {
        &self.entries
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Kappa {
    C,
    R,
}

/// The archimedean factor: a product of Γ_C and Γ_R powers determined by
/// the Hodge numbers.
pub fn arch_l_factor(h: &HodgeData, kappa: Kappa, s: Complex64) -> Result<Complex64, LFactorError> {
    let mut out = Complex64::new(1.0, 0.0);
    match kappa {
        Kappa::C => {
            for ((p, q), hpq) in &h.entries {
                if *hpq == 0 {
                    continue;
                }
                let base = gamma_c(s - f64::from((*p).min(*q)))?;
                out *= base.powu(*hpq as u32);
            }
        }
        Kappa::R => {
            for ((p, q), hpq) in &h.entries {
                if *hpq == 0 || p >= q {
                    continue;
                }
                let base = gamma_c(s - f64::from(*p))?;
                out *= base.powu(*hpq as u32);
            }
            if h.degree.is_multiple_of(2) {
                let p = f64::from(h.degree / 2);
                if h.h_plus > 0 {
                    out *= gamma_r(s - p)?.powu(h.h_plus as u32);
                }
                if h.h_minus > 0 {
                    out *= gamma_r(s - p + 1.0)?.powu(h.h_minus as u32);
                }
            }
        }
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Hurwitz zeta (Euler-Maclaurin)

/// B_{2j} for j = 1..=12.
const BERNOULLI_EVEN: [f64; 12] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
    854513.0 / 138.0,
    -236364091.0 / 2730.0,
];

fn em_cutoff(a: Complex64, extra: usize) -> usize {
    let need = 30.0 - a.re;
    (need.max(0.0).ceil() as usize).max(8) + extra
}

/// Hurwitz zeta ζ(z, a) = Σ_{k≥0} (a+k)^(-z) for Re a > 0, analytically
/// continued in z by Euler-Maclaurin; `extra` widens the truncation for
/// self-checks.
pub fn hurwitz_zeta_with(
    z: Complex64,
    a: Complex64,
    extra: usize,
) -> Result<Complex64, LFactorError> {
    if a.re <= 0.0 {
        return Err(LFactorError::Domain(a));
    }
    if (z - Complex64::new(1.0, 0.0)).norm() < 1e-10 {
        return Err(LFactorError::ZetaPole);
    }
    let m = em_cutoff(a, extra);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..m {
        let base = a + k as f64;
        sum += (-z * base.ln()).exp();
    }
    let am = a + m as f64;
    let lam = am.ln();
    // tail integral and boundary term
    sum += ((Complex64::new(1.0, 0.0) - z) * lam).exp() / (z - 1.0);
    sum += 0.5 * (-z * lam).exp();
    // Bernoulli corrections: B_2j/(2j)! · z(z+1)…(z+2j-2) · (a+M)^(-z-2j+1)
    let mut rising = z;
    let mut fact = 1.0f64;
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let two_j = 2 * (j + 1);
        fact *= (two_j - 1) as f64 * two_j as f64;
        if j > 0 {
            rising *= z + (two_j - 3) as f64;
            rising *= z + (two_j - 2) as f64;
        }
        let power = ((-z - (two_j - 1) as f64) * lam).exp();
        sum += (b / fact) * rising * power;
    }
    Ok(sum)
}

pub fn hurwitz_zeta(z: Complex64, a: Complex64) -> Result<Complex64, LFactorError> {
    hurwitz_zeta_with(z, a, 0)
}

/// d/dz ζ(z, a) at z = 0, by differentiating the Euler-Maclaurin form term
/// by term (the classical Stirling-series rearrangement); this path never
/// consults the gamma implementation.
pub fn hurwitz_zeta_dz0(a: Complex64) -> Result<Complex64, LFactorError> {
    if a.re <= 0.0 {
        return Err(LFactorError::Domain(a));
    }
    let m = em_cutoff(a, 0);
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..m {
        sum -= (a + k as f64).ln();
    }
    let am = a + m as f64;
    let lam = am.ln();
    sum += am * (lam - 1.0);
    sum -= 0.5 * lam;
    // only the leading factor z of each Bernoulli term survives at z = 0:
    // d/dz [B_2j/(2j)! z(z+1)…(z+2j-2) (a+M)^(1-2j-z)] = B_2j/((2j)(2j-1)) (a+M)^(1-2j)
    for (j, b) in BERNOULLI_EVEN.iter().enumerate() {
        let two_j = (2 * (j + 1)) as f64;
        let power = ((1.0 - two_j) * lam).exp();
        sum += b / (two_j * (two_j - 1.0)) * power;
    }
    Ok(sum)
}

// ---------------------------------------------------------------------------
// regularized determinants

/// Which half of a two-sided spectrum to include.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Branch {
    Plus,
    Minus,
    Both,
}

/// A determinant job: a spectral model (optionally with multiplicities
/// overridden by a projection model), the evaluation point, the branch
/// selection, and the normalization conventions.
#[derive(Debug, Clone)]
pub struct ZetaJob {
    pub model: SpectralModel,
    pub s: Complex64,
    pub branch: Branch,
    /// multiply the spectrum by the imaginary unit (the rotation used at
    /// the nonarchimedean places), pairing s with +λ rather than -λ
    pub rotate_imaginary: bool,
    /// divide both s and the spectrum by this factor (e.g. 2π)
    pub rescale: f64,
}

impl ZetaJob {
    pub fn new(model: SpectralModel, s: Complex64) -> Self {
        ZetaJob {
            model,
            s,
            branch: Branch::Both,
            rotate_imaginary: false,
            rescale: 1.0,
        }
    }

    /// Override the side multiplicities with the constant ones of a
    /// projection model (matched by side order).
    pub fn with_weights(mut self, weights: &SpectralModel) -> Self {
        for (side, wside) in self.model.sides.iter_mut().zip(&weights.sides) {
            side.mults = wside.mults.clone();
        }
        self
    }

    pub fn rotated(mut self) -> Self {
        self.rotate_imaginary = true;
        self
    }

    pub fn rescaled(mut self, r: f64) -> Self {
        self.rescale = r;
        self
    }

    pub fn branch(mut self, b: Branch) -> Self {
        self.branch = b;
        self
    }
}

/// Regularized `∏_n (s + C(n+δ))^m`: Hurwitz continuation of the half-line
/// with the nonpositive-real-part head factored out literally.
fn det_half_line(
    s: Complex64,
    c: Complex64,
    delta: f64,
    mult: u64,
) -> Result<Complex64, LFactorError> {
    let mut a = s / c + delta;
    let mut literal_log = Complex64::new(0.0, 0.0);
    let mut guard = 0;
    while a.re < 0.5 {
        let factor = c * a;
        if factor.norm() < 1e-13 {
            return Err(LFactorError::PoleCollision(s));
        }
        literal_log += factor.ln();
        a += 1.0;
        guard += 1;
        if guard > 100_000 {
            return Err(LFactorError::PoleCollision(s));
        }
    }
    let zeta0 = Complex64::new(0.5, 0.0) - a;
    let zeta_prime = hurwitz_zeta_dz0(a)?;
    // -d/dz [C^{-z} ζ(z,a)] at 0 = log C · ζ(0,a) - ζ'(0,a)
    let log_det_line = c.ln() * zeta0 - zeta_prime;
    let m = mult as f64;
    Ok(((literal_log + log_det_line) * m).exp())
}

/// The regularized determinant of a job; finite explicit spectra multiply
/// out literally through [`finite_determinant`] instead.
pub fn regularized_det(job: &ZetaJob) -> Result<Complex64, LFactorError> {
    let s_eff = job.s / job.rescale;
    let mut det = Complex64::new(1.0, 0.0);
    for side in &job.model.sides {
        let selected = match job.branch {
            Branch::Both => true,
            Branch::Plus => side.sign > 0,
            Branch::Minus => side.sign < 0,
        };
        if !selected {
            continue;
        }
        let MultSeq::Constant(mult) = side.mults else {
            return Err(LFactorError::NonConstantMultiplicity);
        };
        if mult == 0 {
            continue;
        }
        let scale = job.model.scale.value() / job.rescale;
        let c = if job.rotate_imaginary {
            // spectrum iλ paired as (s + iλ): C = i·sign·scale
            Complex64::new(0.0, f64::from(side.sign) * scale)
        } else {
            // pairing (s - λ): C = -sign·scale
            Complex64::new(-f64::from(side.sign) * scale, 0.0)
        };
        det *= det_half_line(s_eff, c, f64::from(side.offset), mult)?;
    }
    Ok(det)
}

/// Literal product `∏ (s - λ)^m` over an explicit finite spectrum.
pub fn finite_determinant(
    spectrum: &[(Complex64, u64)],
    s: Complex64,
) -> Result<Complex64, LFactorError> {
    let mut det = Complex64::new(1.0, 0.0);
    for (lambda, mult) in spectrum {
        let factor = s - lambda;
        if factor.norm() < 1e-13 {
            return Err(LFactorError::PoleCollision(s));
        }
        det *= factor.powu(*mult as u32);
    }
    Ok(det)
}

/// `(1 - q^{-s})^{-g}`: the local factor at a split-degenerate place.
pub fn nonarch_l_factor(g: u64, q: u64, s: Complex64) -> Result<Complex64, LFactorError> {
    let qs = (-s * (q as f64).ln()).exp();
    let base = Complex64::new(1.0, 0.0) - qs;
    if base.norm() < 1e-13 {
        return Err(LFactorError::PoleCollision(s));
    }
    Ok(base.powi(-(g as i32)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FitReport {
    /// fitted slope of log[det(s)·L(s)] over the grid
    pub a: f64,
    /// fitted intercept
    pub b: f64,
    pub max_residual: f64,
    pub max_imag: f64,
    pub points: usize,
}

impl FitReport {
    /// The exact identity predicts slope and intercept zero.
    pub fn is_exact_normalization(&self, tol: f64) -> bool {
        self.a.abs() < tol && self.b.abs() < tol
    }
}

/// Evaluate the determinant of the rotated two-sided spectrum against the
/// closed-form local factor on a grid of real s, and fit the residual
/// exponent log[det(s)·L(s)] to an affine function a·s + b.
pub fn nonarch_det_check(g: u64, q: u64, r: i64, grid: &[f64]) -> Result<FitReport, LFactorError> {
    if grid.is_empty() {
        return Err(LFactorError::EmptyGrid);
    }
    let v_model = crate::spectral::v_multiplicity_model(
        crate::spectral::VModelKind::NonarchV,
        g as usize,
        q as usize,
        r,
    );
    let mut xs = Vec::with_capacity(grid.len());
    let mut ys = Vec::with_capacity(grid.len());
    let mut max_imag: f64 = 0.0;
    for &sv in grid {
        let s = Complex64::new(sv, 0.0);
        let det = regularized_det(&ZetaJob::new(v_model.clone(), s).rotated())?;
        let l = nonarch_l_factor(g, q, s)?;
        let excess = (det * l).ln();
        xs.push(sv);
        ys.push(excess.re);
        max_imag = max_imag.max(excess.im.abs());
    }
    let (a, b) = affine_fit(&xs, &ys);
    let max_residual = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - (a * x + b)).abs())
        .fold(0.0f64, f64::max)
        .max(max_imag);
    Ok(FitReport {
        a,
        b,
        max_residual,
        max_imag,
        points: xs.len(),
    })
}

/// Least-squares affine fit y ≈ a·x + b.
pub fn affine_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let sx: f64 = xs.iter().sum();
    let sy: f64 = ys.iter().sum();
    let sxx: f64 = xs.iter().map(|x| x * x).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return (0.0, sy / n);
    }
    let a = (n * sxy - sx * sy) / denom;
    let b = (sy - a * sx) / n;
    (a, b)
}
