use crate::error::{Error, Result};
use crate::model::{ProblemTriple, UnitKind};

/// Which sign of `C = ±I` the sufficient condition is stated for.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExistenceVariant {
    CMinusI,
    CPlusI,
}

/// Per-index margins of the sufficient existence condition. The condition
/// holds when every margin is strictly positive; failing it says nothing
/// about existence.
#[derive(Clone, Debug, PartialEq)]
pub struct ExistenceReport {
    pub holds: bool,
    pub margins: Vec<f64>,
}

/// `C = −I`: `(a_{i..i} + 1 − m)(m−1)^{1/m−1} − b_{i..i}`;
/// `C = +I`: `(m + a_{i..i} − 1)(m−1)^{1/m−1} + b_{i..i}`.
pub fn existence_condition(problem: &ProblemTriple, variant: ExistenceVariant) -> Result<ExistenceReport> {
    let (expected, name) = match variant {
        ExistenceVariant::CMinusI => (UnitKind::NegIdentity, "C = -I"),
        ExistenceVariant::CPlusI => (UnitKind::Identity, "C = +I"),
    };
    if problem.c_kind() != expected {
        return Err(Error::VariantMismatch { expected: name });
    }
    let m = problem.order() as f64;
    let factor = (m - 1.0).powf(1.0 / m - 1.0);
    let margins: Vec<f64> = (0..problem.dim())
        .map(|i| {
            let a = problem.a().diagonal(i);
            let b = problem.b().diagonal(i);
            match variant {
                ExistenceVariant::CMinusI => (a + 1.0 - m) * factor - b,
                ExistenceVariant::CPlusI => (m + a - 1.0) * factor + b,
            }
        })
        .collect();
    Ok(ExistenceReport {
        holds: margins.iter().all(|&g| g > 0.0),
        margins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{example1, trivial};
    use crate::tensor::Tensor;

    #[test]
    fn boundary_case_fails() {
        let r = existence_condition(&trivial(2, 3), ExistenceVariant::CMinusI).unwrap();
        assert_eq!(r.margins, vec![0.0; 3]);
        assert!(!r.holds);
    }

    #[test]
    fn example1_is_not_covered() {
        let r = existence_condition(&example1(), ExistenceVariant::CMinusI).unwrap();
        assert!((r.margins[0] - (-0.9939)).abs() < 1e-12);
        assert!(!r.holds);
    }

    #[test]
    fn large_diagonal_holds() {
        for m in [2usize, 3, 4] {
            let a = Tensor::identity(m, 2).unwrap().scaled(m as f64);
            let q = ProblemTriple::with_neg_identity(a, Tensor::zeros(m, 2).unwrap()).unwrap();
            let r = existence_condition(&q, ExistenceVariant::CMinusI).unwrap();
            let expect = ((m - 1) as f64).powf(1.0 / m as f64 - 1.0);
            assert!(r.margins.iter().all(|g| (g - expect).abs() < 1e-14));
            assert!(r.holds);
        }
    }

    #[test]
    fn variant_must_match_c() {
        assert!(matches!(
            existence_condition(&example1(), ExistenceVariant::CPlusI),
            Err(Error::VariantMismatch { .. })
        ));
        let id = Tensor::identity(2, 2).unwrap();
        let q = ProblemTriple::new(id.clone(), Tensor::zeros(2, 2).unwrap(), id).unwrap();
        let r = existence_condition(&q, ExistenceVariant::CPlusI).unwrap();
        assert_eq!(r.margins, vec![2.0, 2.0]);
        assert!(r.holds);
    }
}
