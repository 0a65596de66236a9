use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Cone, ProblemTriple};
use crate::tensor::dot;

/// Violations of the complementarity system for a candidate pair.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    /// `‖min(x, 0)‖∞` (orthant) or the cone-membership violation of `x`.
    pub primal_neg: f64,
    /// `‖min(ϱ, 0)‖∞` (orthant) or `‖min(Hϱ, 0)‖∞`.
    pub dual_neg: f64,
    /// `|xᵀϱ| / max(1, ‖x‖‖ϱ‖)`.
    pub compl: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal_neg.max(self.dual_neg).max(self.compl)
    }
}

/// A candidate eigenpair with its dual vector `ϱ = (λ^m A + λ B + C) x^{m-1}`.
///
/// The verdict compares `residuals` (measured on `x` as given) with `tol`.
/// `normalized` holds the same residuals for `x / ‖x‖∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct Eigenpair {
    pub lambda: f64,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub residuals: Residuals,
    pub normalized: Residuals,
    pub tol: f64,
    pub passed: bool,
    order: usize,
}

impl Eigenpair {
    pub fn order(&self) -> usize {
        self.order
    }

    /// `x` rescaled to `eᵀx = 1`.
    pub fn simplex_normalized_x(&self) -> Vec<f64> {
        let s: f64 = self.x.iter().sum();
        self.x.iter().map(|v| v / s).collect()
    }

    /// Indices with `x_i > threshold · ‖x‖∞`.
    pub fn support(&self, threshold: f64) -> Vec<usize> {
        let top = inf_norm(&self.x);
        (0..self.x.len())
            .filter(|&i| self.x[i] > threshold * top)
            .collect()
    }

    /// The pair `(λ, t·x)`; `ϱ` scales by `t^{m-1}` and the verdict is kept.
    pub fn scaled(&self, t: f64) -> Result<Eigenpair> {
        if t.is_nan() || t <= 0.0 {
            return Err(Error::NonpositiveScale(t));
        }
        let tm1 = t.powi(self.order as i32 - 1);
        let x: Vec<f64> = self.x.iter().map(|v| v * t).collect();
        let rho: Vec<f64> = self.rho.iter().map(|v| v * tm1).collect();
        let residuals = Residuals {
            primal_neg: self.residuals.primal_neg * t,
            dual_neg: self.residuals.dual_neg * tm1,
            compl: compl_residual(&x, &rho),
        };
        Ok(Eigenpair {
            lambda: self.lambda,
            x,
            rho,
            residuals,
            normalized: self.normalized,
            tol: self.tol,
            passed: self.passed,
            order: self.order,
        })
    }
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |a, x| a.max(x.abs()))
}

fn neg_part(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |a, &x| a.max(0.0 - x))
}

fn compl_residual(x: &[f64], rho: &[f64]) -> f64 {
    let nx = dot(x, x).sqrt();
    let nr = dot(rho, rho).sqrt();
    dot(x, rho).abs() / (nx * nr).max(1.0)
}

fn residuals_for(problem: &ProblemTriple, x: &[f64], rho: &[f64]) -> Result<Residuals> {
    match problem.cone() {
        Cone::NonnegativeOrthant => Ok(Residuals {
            primal_neg: neg_part(x),
            dual_neg: neg_part(rho),
            compl: compl_residual(x, rho),
        }),
        Cone::Polyhedral(h) => {
            let (alpha, membership) = cone_coordinates(h, x)?;
            let h_rho = h * DVector::from_column_slice(rho);
            Ok(Residuals {
                primal_neg: neg_part(alpha.as_slice()).max(membership),
                dual_neg: neg_part(h_rho.as_slice()),
                compl: compl_residual(x, rho),
            })
        }
    }
}

/// Least-squares `α` with `Hᵀα ≈ x` and the residual `‖Hᵀα − x‖∞`.
fn cone_coordinates(h: &DMatrix<f64>, x: &[f64]) -> Result<(DVector<f64>, f64)> {
    let xv = DVector::from_column_slice(x);
    let gram = h * h.transpose();
    let alpha = gram
        .lu()
        .solve(&(h * &xv))
        .ok_or(Error::RankDeficient { smallest: 0.0 })?;
    let back = h.transpose() * &alpha;
    let membership = (back - xv).amax();
    Ok((alpha, membership))
}

/// Evaluates `ϱ` and the complementarity residuals of `(λ, x)`; the pair
/// passes when every residual is at most `tol`.
pub fn verify_eigenpair(problem: &ProblemTriple, lambda: f64, x: &[f64], tol: f64) -> Result<Eigenpair> {
    if !lambda.is_finite() {
        return Err(Error::NonFinite("lambda".into()));
    }
    let rho = problem.dual_vector(lambda, x)?;
    let top = inf_norm(x);
    if top == 0.0 {
        return Err(Error::ZeroVector);
    }
    let residuals = residuals_for(problem, x, &rho)?;
    let m = problem.order() as i32;
    let xs: Vec<f64> = x.iter().map(|v| v / top).collect();
    let rs: Vec<f64> = rho.iter().map(|v| v / top.powi(m - 1)).collect();
    let normalized = residuals_for(problem, &xs, &rs)?;
    Ok(Eigenpair {
        lambda,
        x: x.to_vec(),
        rho,
        residuals,
        normalized,
        tol,
        passed: residuals.max() <= tol,
        order: problem.order(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{example1, trivial};

    #[test]
    fn trivial_instance_is_exact() {
        for (m, n) in [(2, 3), (3, 3), (4, 2)] {
            let q = trivial(m, n);
            let mut x = vec![0.0; n];
            x[0] = 1.0;
            let p = verify_eigenpair(&q, 1.0, &x, 1e-12).unwrap();
            assert!(p.rho.iter().all(|&r| r == 0.0));
            assert_eq!(p.residuals, Residuals::default());
            assert!(p.passed);
        }
    }

    #[test]
    fn table1_row1_passes() {
        let q = example1();
        let p = verify_eigenpair(&q, 0.6830, &[0.0, 0.0, 0.5701, 0.0], 5e-4).unwrap();
        let expect = [0.5042, 0.2393, 0.0, 0.4162];
        for (r, e) in p.rho.iter().zip(expect) {
            assert!((r - e).abs() < 1e-3, "{r} vs {e}");
        }
        assert!(p.passed);
    }

    #[test]
    fn wrong_vector_fails() {
        let q = example1();
        let p = verify_eigenpair(&q, 0.6830, &[1.0, 0.0, 0.0, 0.0], 5e-4).unwrap();
        // ϱ_1 = λ² a11 + λ b11 − 1 is far from zero, so xᵀϱ ≠ 0.
        let direct = 0.6830f64.powi(2) * 0.2296 + 0.6830 * 0.2235 - 1.0;
        assert!((p.rho[0] - direct).abs() < 1e-14);
        assert!(p.residuals.compl > 5e-4);
        assert!(!p.passed);
    }

    #[test]
    fn zero_vector_rejected() {
        assert!(matches!(
            verify_eigenpair(&example1(), 1.0, &[0.0; 4], 1e-6),
            Err(Error::ZeroVector)
        ));
    }

    #[test]
    fn scaling_keeps_verdict() {
        let q = example1();
        let p = verify_eigenpair(&q, 0.6830, &[0.0, 0.0, 0.5701, 0.0], 5e-4).unwrap();
        assert_eq!(p.scaled(1.0).unwrap(), p);
        for t in [0.1, 2.0, 10.0] {
            let s = p.scaled(t).unwrap();
            let fresh = verify_eigenpair(&q, p.lambda, &s.x, 5e-4).unwrap();
            assert_eq!(fresh.passed, p.passed);
            for (a, b) in s.rho.iter().zip(&fresh.rho) {
                assert!((a - b).abs() <= 1e-12 * (1.0 + b.abs()));
            }
        }
        let unit = p.scaled(1.0 / p.x.iter().sum::<f64>()).unwrap();
        assert!((unit.x.iter().sum::<f64>() - 1.0).abs() < 1e-15);
        assert!(matches!(p.scaled(0.0), Err(Error::NonpositiveScale(_))));
    }
}
