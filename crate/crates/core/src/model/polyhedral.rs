use crate::error::{Error, Result};
use crate::model::{Cone, ProblemTriple};

/// Rewrites a problem over `K = {Hᵀα : α ≥ 0}` as a Pareto problem in `α`
/// with tensors `D, G, S` of dimension `p`, where
/// `d[i1..im] = Σ a[j1..jm] h[i1,j1] ⋯ h[im,jm]` (same for `G`, `S`).
/// A reduced solution `(λ, α)` maps back through `x = Hᵀα`.
pub fn polyhedral_reduce(problem: &ProblemTriple) -> Result<ProblemTriple> {
    let h = match problem.cone() {
        Cone::Polyhedral(h) => h,
        Cone::NonnegativeOrthant => return Err(Error::InvalidParameter("problem cone is already the orthant".into())),
    };
    let p = h.nrows();
    let rows: Vec<f64> = (0..p).flat_map(|r| h.row(r).iter().copied().collect::<Vec<_>>()).collect();
    ProblemTriple::new(
        problem.a().multilinear_transform(&rows, p)?,
        problem.b().multilinear_transform(&rows, p)?,
        problem.c().multilinear_transform(&rows, p)?,
    )
}

/// Upper bound `n·m^n` on the number of Pareto eigenvalues.
pub fn count_bound(m: usize, n: usize) -> Result<u128> {
    if m < 2 {
        return Err(Error::InvalidOrder(m));
    }
    if n < 1 {
        return Err(Error::InvalidDimension(n));
    }
    let exp = u32::try_from(n).map_err(|_| Error::CountOverflow { m, n })?;
    (m as u128)
        .checked_pow(exp)
        .and_then(|p| p.checked_mul(n as u128))
        .ok_or(Error::CountOverflow { m, n })
}
