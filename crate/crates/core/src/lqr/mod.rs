//! Dense small-matrix control numerics.
//!
//! Everything here works on `nalgebra::DMatrix<f64>` and is sized for the
//! handful-of-states plants this crate targets (n up to roughly 20). The
//! Lyapunov solver forms the n²×n² Kronecker system explicitly, so larger
//! problems should use a Schur-based solver instead.

mod care;
mod cost;
mod lyapunov;
mod oracle;

use std::cmp::Ordering;
use std::fmt;

use nalgebra::{DMatrix, Schur};

use crate::error::{Error, Result};

pub use care::{care_residual, solve_care, CareSolution};
pub use cost::{cost, cost_and_gradient, cost_gradient, CostEval};
pub use lyapunov::{lyapunov_residual, solve_lyapunov, solve_lyapunov_adjoint};
pub use oracle::simulate_cost_oracle;

/// Margin used for every strict inequality: Hurwitz means a spectral abscissa
/// below `-EPS_STAB`, positive definite means a minimum eigenvalue above it.
pub const EPS_STAB: f64 = 1e-9;

/// Tolerance for accepting a nominally symmetric weight matrix.
const SYMMETRY_TOL: f64 = 1e-12;

/// One candidate plant `ż = A z + B u`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemMode {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
}

impl SystemMode {
    pub fn new(a: DMatrix<f64>, b: DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::dims(
                "SystemMode::A",
                "non-empty square matrix",
                format!("{}x{}", a.nrows(), a.ncols()),
            ));
        }
        if b.nrows() != n || b.ncols() == 0 {
            return Err(Error::dims(
                "SystemMode::B",
                format!("{n}xm with m >= 1"),
                format!("{}x{}", b.nrows(), b.ncols()),
            ));
        }
        if !all_finite(&a) || !all_finite(&b) {
            return Err(Error::Precondition(
                "SystemMode entries must be finite".into(),
            ));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &DMatrix<f64> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn state_dim(&self) -> usize {
        self.a.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.b.ncols()
    }
}

/// Quadratic state and input weights `Q ≻ 0`, `R ≻ 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CostWeights {
    q: DMatrix<f64>,
    r: DMatrix<f64>,
}

impl CostWeights {
    /// Validates symmetry (to 1e-12) and positive definiteness, then
    /// symmetrizes both matrices exactly.
    pub fn new(q: DMatrix<f64>, r: DMatrix<f64>) -> Result<Self> {
        let q = checked_spd("Q", q)?;
        let r = checked_spd("R", r)?;
        Ok(Self { q, r })
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn r(&self) -> &DMatrix<f64> {
        &self.r
    }

    pub fn state_dim(&self) -> usize {
        self.q.nrows()
    }

    pub fn input_dim(&self) -> usize {
        self.r.nrows()
    }

    /// Weights multiplied by a positive scalar.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(&self.q * c, &self.r * c)
    }

    fn check_against(&self, mode: &SystemMode) -> Result<()> {
        if self.state_dim() != mode.state_dim() || self.input_dim() != mode.input_dim() {
            return Err(Error::dims(
                "CostWeights",
                format!("Q {0}x{0}, R {1}x{1}", mode.state_dim(), mode.input_dim()),
                format!("Q {0}x{0}, R {1}x{1}", self.state_dim(), self.input_dim()),
            ));
        }
        Ok(())
    }
}

fn checked_spd(name: &'static str, m: DMatrix<f64>) -> Result<DMatrix<f64>> {
    if m.nrows() == 0 || m.nrows() != m.ncols() {
        return Err(Error::dims(
            name,
            "non-empty square matrix",
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    if !all_finite(&m) {
        return Err(Error::Precondition(format!(
            "{name} entries must be finite"
        )));
    }
    let asym = (&m - m.transpose()).amax();
    if asym > SYMMETRY_TOL * (1.0 + m.amax()) {
        return Err(Error::Precondition(format!(
            "{name} is not symmetric (max asymmetry {asym:e})"
        )));
    }
    let m = symmetrize(&m);
    let min_eig = m.symmetric_eigenvalues().min();
    if min_eig <= EPS_STAB {
        return Err(Error::Infeasible(format!(
            "{name} is not positive definite (min eigenvalue {min_eig:e})"
        )));
    }
    Ok(m)
}

/// Linear state-feedback gain: `u = K z`, K is m×n.
#[derive(Debug, Clone, PartialEq)]
pub struct Controller {
    k: DMatrix<f64>,
}

impl Controller {
    pub fn new(k: DMatrix<f64>) -> Result<Self> {
        if k.nrows() == 0 || k.ncols() == 0 {
            return Err(Error::dims("Controller", "non-empty m x n", "empty"));
        }
        if !all_finite(&k) {
            return Err(Error::Precondition(
                "Controller entries must be finite".into(),
            ));
        }
        Ok(Self { k })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        Self {
            k: DMatrix::zeros(m, n),
        }
    }

    /// Row-major convenience constructor.
    pub fn from_row_slice(m: usize, n: usize, data: &[f64]) -> Result<Self> {
        if data.len() != m * n {
            return Err(Error::dims("Controller", m * n, data.len()));
        }
        Self::new(DMatrix::from_row_slice(m, n, data))
    }

    pub fn gain(&self) -> &DMatrix<f64> {
        &self.k
    }

    pub fn into_gain(self) -> DMatrix<f64> {
        self.k
    }

    /// Gain entries in row-major order.
    pub fn to_row_major(&self) -> Vec<f64> {
        self.k.transpose().iter().copied().collect()
    }
}

impl fmt::Display for Controller {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.k.row_iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            for (j, v) in row.iter().enumerate() {
                if j > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{v}")?;
            }
        }
        write!(f, "]")
    }
}

/// A round cost, or the distinguished value for a destabilized closed loop.
///
/// `Infeasible` orders above every finite value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CostValue {
    Finite(f64),
    Infeasible,
}

impl CostValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, CostValue::Finite(_))
    }

    pub fn value(&self) -> Option<f64> {
        match *self {
            CostValue::Finite(v) => Some(v),
            CostValue::Infeasible => None,
        }
    }

    /// Finite value, or `+∞` for `Infeasible`.
    pub fn as_f64(&self) -> f64 {
        self.value().unwrap_or(f64::INFINITY)
    }
}

impl PartialOrd for CostValue {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (CostValue::Finite(a), CostValue::Finite(b)) => a.partial_cmp(b),
            (CostValue::Finite(_), CostValue::Infeasible) => Some(Ordering::Less),
            (CostValue::Infeasible, CostValue::Finite(_)) => Some(Ordering::Greater),
            (CostValue::Infeasible, CostValue::Infeasible) => Some(Ordering::Equal),
        }
    }
}

impl fmt::Display for CostValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CostValue::Finite(v) => write!(f, "{v}"),
            CostValue::Infeasible => write!(f, "INFEASIBLE"),
        }
    }
}

/// `A + B K`.
pub fn closed_loop(mode: &SystemMode, k: &Controller) -> Result<DMatrix<f64>> {
    let (n, m) = (mode.state_dim(), mode.input_dim());
    if k.gain().shape() != (m, n) {
        return Err(Error::dims(
            "closed_loop",
            format!("K {m}x{n}"),
            format!("K {}x{}", k.gain().nrows(), k.gain().ncols()),
        ));
    }
    Ok(mode.a() + mode.b() * k.gain())
}

/// Largest real part over the eigenvalues of a square matrix.
pub fn spectral_abscissa(m: &DMatrix<f64>) -> Result<f64> {
    if m.nrows() != m.ncols() {
        return Err(Error::dims(
            "spectral_abscissa",
            "square matrix",
            format!("{}x{}", m.nrows(), m.ncols()),
        ));
    }
    let schur = Schur::try_new(m.clone(), f64::EPSILON, 10_000).ok_or_else(|| {
        Error::Numerical(format!("eigenvalue iteration did not converge for {m}"))
    })?;
    Ok(schur
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

pub fn is_hurwitz(m: &DMatrix<f64>) -> Result<bool> {
    Ok(spectral_abscissa(m)? < -EPS_STAB)
}

/// Whether `A + B K` is Hurwitz, i.e. `K` belongs to the stabilizing set for this mode.
pub fn is_stabilizing(mode: &SystemMode, k: &Controller) -> Result<bool> {
    is_hurwitz(&closed_loop(mode, k)?)
}

pub(crate) fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

fn all_finite(m: &DMatrix<f64>) -> bool {
    m.iter().all(|v| v.is_finite())
}
