//! The homogeneous polynomial reformulation for `C = -I`:
//!
//! ```text
//! max  varphi0(u, v) = m (m-1)^{1/m-1} vᵀu^[m-1] − B u^m
//! s.t. A u^m + vᵀv^[m-1] = 1,  u, v ≥ 0
//! ```
//!
//! A stationary point with `u ≠ 0` yields the eigenpair
//! `(varphi0^{1/(m-1)}, u)`, and conversely every eigenpair with `λ > 0`
//! maps to a stationary point.

use crate::error::{Error, Result};
use crate::model::{verify_eigenpair, Eigenpair, ProblemTriple};
use crate::tensor::{dot, pow_vec};

/// `ϑ = −m (m−1)^{1/m−1}`, the coupling constant of the minimization form.
pub fn theta(m: usize) -> f64 {
    let mf = m as f64;
    -mf * (mf - 1.0).powf(1.0 / mf - 1.0)
}

/// A point `(u, v)` of the reformulation; both parts are nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct ReformulationPoint {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
}

impl ReformulationPoint {
    pub fn new(u: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if u.len() != v.len() {
            return Err(Error::DimensionMismatch {
                expected: u.len(),
                found: v.len(),
            });
        }
        if u.iter().chain(&v).any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("reformulation point".into()));
        }
        if u.iter().chain(&v).any(|&x| x < 0.0) {
            return Err(Error::InvalidStart("u and v must be nonnegative".into()));
        }
        Ok(Self { u, v })
    }
}

fn check_len(problem: &ProblemTriple, p: &ReformulationPoint) -> Result<()> {
    if p.u.len() != problem.dim() {
        return Err(Error::DimensionMismatch {
            expected: problem.dim(),
            found: p.u.len(),
        });
    }
    Ok(())
}

/// Objective `m (m−1)^{1/m−1} vᵀu^[m−1] − B u^m`.
pub fn varphi0(problem: &ProblemTriple, p: &ReformulationPoint) -> Result<f64> {
    problem.require_reformulation()?;
    check_len(problem, p)?;
    let m = problem.order();
    Ok(-theta(m) * dot(&p.v, &pow_vec(&p.u, m - 1)) - problem.b().apply_full(&p.u))
}

/// Constraint function `A u^m + vᵀv^[m−1]`.
pub fn phi0(problem: &ProblemTriple, p: &ReformulationPoint) -> Result<f64> {
    check_len(problem, p)?;
    let m = problem.order();
    Ok(problem.a().apply_full(&p.u) + dot(&p.v, &pow_vec(&p.v, m - 1)))
}

/// Gradients of the objective and of the constraint.
#[derive(Clone, Debug, PartialEq)]
pub struct Gradients {
    /// `m (m−1)^{1/m} diag(v) u^[m−2] − m B u^{m−1}`
    pub objective_u: Vec<f64>,
    /// `m (m−1)^{1/m−1} u^[m−1]`
    pub objective_v: Vec<f64>,
    /// `m A u^{m−1}`
    pub constraint_u: Vec<f64>,
    /// `m v^[m−1]`
    pub constraint_v: Vec<f64>,
}

/// The four gradient vectors. They are the true gradients when `A` and `B`
/// are symmetric.
pub fn gradients(problem: &ProblemTriple, p: &ReformulationPoint) -> Result<Gradients> {
    check_len(problem, p)?;
    let m = problem.order();
    let mf = m as f64;
    let coupling = mf * (mf - 1.0).powf(1.0 / mf);
    let um2 = pow_vec(&p.u, m - 2);
    let bu = problem.b().apply_m1(&p.u);
    let au = problem.a().apply_m1(&p.u);
    Ok(Gradients {
        objective_u: (0..p.u.len())
            .map(|i| coupling * p.v[i] * um2[i] - mf * bu[i])
            .collect(),
        objective_v: pow_vec(&p.u, m - 1).into_iter().map(|x| -theta(m) * x).collect(),
        constraint_u: au.into_iter().map(|x| mf * x).collect(),
        constraint_v: pow_vec(&p.v, m - 1).into_iter().map(|x| mf * x).collect(),
    })
}

/// Real `k`-th root: sign-preserving for odd `k`, positive radicand required
/// for even `k`.
pub fn real_root(value: f64, k: usize) -> Result<f64> {
    if k == 1 {
        return Ok(value);
    }
    if k % 2 == 1 {
        Ok(value.signum() * value.abs().powf(1.0 / k as f64))
    } else if value > 0.0 {
        Ok(value.powf(1.0 / k as f64))
    } else {
        Err(Error::NegativePower { value })
    }
}

/// Recovers `(λ, x) = (varphi0^{1/(m−1)}, u)` and verifies it at `tol`. The
/// returned pair carries its residuals whether or not it passes.
pub fn stationary_to_eigenpair(problem: &ProblemTriple, p: &ReformulationPoint, tol: f64) -> Result<Eigenpair> {
    let value = varphi0(problem, p)?;
    if p.u.iter().all(|&x| x == 0.0) {
        return Err(Error::ZeroU);
    }
    let lambda = real_root(value, problem.order() - 1)?;
    verify_eigenpair(problem, lambda, &p.u, tol)
}

/// Maps an eigenpair with `λ > 0` to the stationary point
/// `(x, y) / (A x^m + yᵀy^[m−1])^{1/m}` with `y = (m−1)^{−1/m} λ^{−1} x`.
pub fn eigenpair_to_stationary(problem: &ProblemTriple, pair: &Eigenpair) -> Result<ReformulationPoint> {
    problem.require_reformulation()?;
    if pair.lambda.is_nan() || pair.lambda <= 0.0 {
        return Err(Error::NonpositiveLambda(pair.lambda));
    }
    if !pair.passed {
        return Err(Error::UnverifiedPair);
    }
    let m = problem.order();
    let mf = m as f64;
    let scale_y = (mf - 1.0).powf(-1.0 / mf) / pair.lambda;
    let y: Vec<f64> = pair.x.iter().map(|v| v * scale_y).collect();
    let denom = problem.a().contract_full(&pair.x)? + dot(&y, &pow_vec(&y, m - 1));
    if denom.is_nan() || denom <= 0.0 {
        return Err(Error::NotCopositiveAlongPair(denom));
    }
    let s = denom.powf(-1.0 / mf);
    ReformulationPoint::new(
        pair.x.iter().map(|v| v * s).collect(),
        y.iter().map(|v| v * s).collect(),
    )
}
