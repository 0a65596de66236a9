//! Problem data for the higher-degree eigenvalue complementarity problem
//!
//! ```text
//! K ∋ x ⊥ (λ^m A + λ B + C) x^{m-1} ∈ K*
//! ```
//!
//! together with the eigenpair verifier, the homogeneous polynomial
//! reformulation used by the solver (C = -I only), the sufficient existence
//! conditions, and the reduction of a finitely generated cone to the
//! nonnegative orthant.

mod existence;
mod polyhedral;
mod reformulation;
mod verify;

pub use existence::{existence_condition, ExistenceReport, ExistenceVariant};
pub use polyhedral::{count_bound, polyhedral_reduce};
pub use reformulation::{
    eigenpair_to_stationary, gradients, phi0, real_root, stationary_to_eigenpair, theta, varphi0,
    Gradients, ReformulationPoint,
};
pub use verify::{verify_eigenpair, Eigenpair, Residuals};

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Smallest singular value accepted for a generator matrix.
pub const RANK_TOL: f64 = 1e-8;

/// Tolerance for recognising `C = ±I`.
pub const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub enum Cone {
    NonnegativeOrthant,
    /// `K = { H^T α : α ≥ 0 }` for a `p x n` matrix `H` of full row rank.
    Polyhedral(DMatrix<f64>),
}

/// How `C` relates to the unit tensor.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnitKind {
    NegIdentity,
    Identity,
    Other,
}

/// The triple `Q = (A, B, C)` over a cone.
#[derive(Clone, Debug, PartialEq)]
pub struct ProblemTriple {
    a: Tensor,
    b: Tensor,
    c: Tensor,
    cone: Cone,
}

impl ProblemTriple {
    /// A problem over the nonnegative orthant.
    pub fn new(a: Tensor, b: Tensor, c: Tensor) -> Result<Self> {
        for (name, t) in [("B", &b), ("C", &c)] {
            if t.order() != a.order() || t.dim() != a.dim() {
                return Err(Error::ShapeMismatch(format!(
                    "A is (m={}, n={}) but {name} is (m={}, n={})",
                    a.order(),
                    a.dim(),
                    t.order(),
                    t.dim()
                )));
            }
        }
        Ok(Self {
            a,
            b,
            c,
            cone: Cone::NonnegativeOrthant,
        })
    }

    /// `(A, B, -I)`, the case covered by the reformulation.
    pub fn with_neg_identity(a: Tensor, b: Tensor) -> Result<Self> {
        let c = Tensor::identity(a.order(), a.dim())?.scaled(-1.0);
        Self::new(a, b, c)
    }

    /// Replaces the cone by the one generated by the rows of `h`.
    pub fn with_polyhedral_cone(mut self, h: DMatrix<f64>) -> Result<Self> {
        if h.ncols() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                found: h.ncols(),
            });
        }
        if h.nrows() == 0 || h.nrows() > h.ncols() {
            return Err(Error::RankDeficient { smallest: 0.0 });
        }
        if h.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("generator matrix".into()));
        }
        let smallest = h
            .singular_values()
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        if smallest <= RANK_TOL {
            return Err(Error::RankDeficient { smallest });
        }
        self.cone = Cone::Polyhedral(h);
        Ok(self)
    }

    pub fn a(&self) -> &Tensor {
        &self.a
    }

    pub fn b(&self) -> &Tensor {
        &self.b
    }

    pub fn c(&self) -> &Tensor {
        &self.c
    }

    pub fn cone(&self) -> &Cone {
        &self.cone
    }

    pub fn order(&self) -> usize {
        self.a.order()
    }

    pub fn dim(&self) -> usize {
        self.a.dim()
    }

    pub fn is_orthant(&self) -> bool {
        matches!(self.cone, Cone::NonnegativeOrthant)
    }

    pub fn c_kind(&self) -> UnitKind {
        let (m, n) = (self.order(), self.dim());
        let mut neg = true;
        let mut pos = true;
        let mut idx = vec![0usize; m];
        for (off, &v) in self.c.data().iter().enumerate() {
            let mut rem = off;
            for slot in idx.iter_mut().rev() {
                *slot = rem % n;
                rem /= n;
            }
            let unit = if idx.iter().all(|&i| i == idx[0]) { 1.0 } else { 0.0 };
            neg &= (v + unit).abs() <= UNIT_TOL;
            pos &= (v - unit).abs() <= UNIT_TOL;
            if !neg && !pos {
                return UnitKind::Other;
            }
        }
        if neg {
            UnitKind::NegIdentity
        } else {
            UnitKind::Identity
        }
    }

    /// Errors unless `C = -I` over the orthant.
    pub fn require_reformulation(&self) -> Result<()> {
        if !self.is_orthant() {
            return Err(Error::ConeUnsupported);
        }
        if self.c_kind() != UnitKind::NegIdentity {
            return Err(Error::ReformulationUnsupported);
        }
        Ok(())
    }

    /// `(λ^m A + λ B + C) x^{m-1}`.
    pub fn dual_vector(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        let ax = self.a.contract_m1(x)?;
        let bx = self.b.apply_m1(x);
        let cx = self.c.apply_m1(x);
        let lm = lambda.powi(self.order() as i32);
        Ok(ax
            .iter()
            .zip(&bx)
            .zip(&cx)
            .map(|((a, b), c)| lm * a + lambda * b + c)
            .collect())
    }

    /// Applies the same permutation to the indices of every tensor (and to
    /// the columns of `H`).
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        let n = self.dim();
        let mut seen = vec![false; n];
        if perm.len() != n || perm.iter().any(|&p| p >= n || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidParameter("not a permutation".into()));
        }
        let permute = |t: &Tensor| -> Result<Tensor> {
            let m = t.order();
            let mut data = vec![0.0; t.data().len()];
            let mut idx = vec![0usize; m];
            let mut src = vec![0usize; m];
            for slot in data.iter_mut() {
                for (s, &i) in src.iter_mut().zip(&idx) {
                    *s = perm[i];
                }
                *slot = t.get(&src);
                for k in (0..m).rev() {
                    idx[k] += 1;
                    if idx[k] < n {
                        break;
                    }
                    idx[k] = 0;
                }
            }
            Tensor::general(m, n, data)
        };
        let cone = match &self.cone {
            Cone::NonnegativeOrthant => Cone::NonnegativeOrthant,
            Cone::Polyhedral(h) => Cone::Polyhedral(DMatrix::from_fn(h.nrows(), n, |r, c| h[(r, perm[c])])),
        };
        Ok(Self {
            a: permute(&self.a)?,
            b: permute(&self.b)?,
            c: permute(&self.c)?,
            cone,
        })
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    pub const EXAMPLE1_A: [f64; 16] = [
        0.2296, 0.6870, 0.7421, 0.8943, //
        0.6870, 0.9403, 0.1194, 0.5919, //
        0.7421, 0.1194, 0.9325, 0.7779, //
        0.8943, 0.5919, 0.7779, 0.3290,
    ];
    pub const EXAMPLE1_B: [f64; 16] = [
        0.2235, 0.3014, 0.7879, 0.5394, //
        0.3014, 0.4026, 0.5329, 0.5453, //
        0.7879, 0.5329, 0.8272, 0.5375, //
        0.5394, 0.5453, 0.5375, 0.5994,
    ];

    pub fn example1() -> ProblemTriple {
        ProblemTriple::with_neg_identity(
            Tensor::symmetric(2, 4, EXAMPLE1_A.to_vec()).unwrap(),
            Tensor::symmetric(2, 4, EXAMPLE1_B.to_vec()).unwrap(),
        )
        .unwrap()
    }

    pub fn trivial(m: usize, n: usize) -> ProblemTriple {
        ProblemTriple::with_neg_identity(Tensor::identity(m, n).unwrap(), Tensor::zeros(m, n).unwrap())
            .unwrap()
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn unit_kinds() {
        assert_eq!(example1().c_kind(), UnitKind::NegIdentity);
        let id = Tensor::identity(3, 2).unwrap();
        let q = ProblemTriple::new(id.clone(), id.clone(), id.clone()).unwrap();
        assert_eq!(q.c_kind(), UnitKind::Identity);
        let q = ProblemTriple::new(id.clone(), id.clone(), id.scaled(2.0)).unwrap();
        assert_eq!(q.c_kind(), UnitKind::Other);
        assert!(matches!(q.require_reformulation(), Err(Error::ReformulationUnsupported)));
    }

    #[test]
    fn shape_checks() {
        let a = Tensor::identity(2, 3).unwrap();
        let b = Tensor::identity(3, 3).unwrap();
        assert!(matches!(
            ProblemTriple::new(a.clone(), b, a.clone()),
            Err(Error::ShapeMismatch(_))
        ));
        let q = trivial(2, 3);
        let bad = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 2.0, 0.0, 0.0]);
        assert!(matches!(
            q.clone().with_polyhedral_cone(bad),
            Err(Error::RankDeficient { .. })
        ));
        let good = DMatrix::from_row_slice(2, 3, &[1.0, 0.0, 0.0, 0.0, 1.0, 1.0]);
        assert!(q.with_polyhedral_cone(good).is_ok());
    }
}
