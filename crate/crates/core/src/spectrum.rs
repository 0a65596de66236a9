//! Pareto spectrum by support enumeration.
//!
//! `λ` is a Pareto eigenvalue iff for some nonempty `J` there is `w > 0` with
//! `(λ^m A_J + λ B_J + C_J) w^{m-1} = 0` and, for every `i ∉ J`,
//! `Σ (λ^m a + λ b + c)_{i j2..jm} w_{j2}⋯w_{jm} ≥ 0`. Singleton supports
//! reduce to the trinomial `λ^m a_{i..i} + λ b_{i..i} + c_{i..i}`, solved
//! exactly; larger supports use seeded damped Newton and are heuristic.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{count_bound, verify_eigenpair, ProblemTriple};
use crate::tensor::Tensor;

pub const SYS_TOL: f64 = 1e-10;
pub const POS_TOL: f64 = 1e-8;
pub const DEDUP_TOL: f64 = 1e-6;
/// Off-support margins down to `-MARGIN_TOL` count as nonnegative.
pub const MARGIN_TOL: f64 = 1e-9;
pub const CLOSED_FORM_VERIFY_TOL: f64 = 1e-8;
pub const NEWTON_VERIFY_TOL: f64 = 1e-6;
const NEWTON_ITERS: usize = 50;
const RESTART_ROUNDS: u32 = 3;

/// Real roots of `a λ^m + b λ + c`, ascending, multiple roots reported once.
///
/// `p' = m a λ^{m-1} + b` vanishes at most twice, so the real line splits
/// into at most three monotone pieces; each sign change is bisected to
/// machine precision.
pub fn trinomial_roots(a: f64, b: f64, c: f64, m: usize) -> Result<Vec<f64>> {
    if !(a.is_finite() && b.is_finite() && c.is_finite()) {
        return Err(Error::NonFinite("polynomial coefficients".into()));
    }
    if m < 2 {
        return Err(Error::InvalidOrder(m));
    }
    if a == 0.0 {
        return Ok(match (b == 0.0, c == 0.0) {
            (true, true) => return Err(Error::DegeneratePolynomial),
            (true, false) => Vec::new(),
            (false, _) => vec![-c / b],
        });
    }
    let p = |x: f64| a * x.powi(m as i32) + b * x + c;
    let bound = 2.0 + b.abs().max(c.abs()) / a.abs();
    let r = -b / (m as f64 * a);
    let k = m - 1;
    let mut crit: Vec<f64> = if k % 2 == 1 {
        vec![r.signum() * r.abs().powf(1.0 / k as f64)]
    } else if r > 0.0 {
        let s = r.powf(1.0 / k as f64);
        vec![-s, s]
    } else if r == 0.0 {
        vec![0.0]
    } else {
        Vec::new()
    };
    crit.retain(|x| x.abs() < bound);

    let mut points = vec![-bound];
    points.extend(&crit);
    points.push(bound);
    let mut roots = Vec::new();
    for win in points.windows(2) {
        let (lo, hi) = (win[0], win[1]);
        let (flo, fhi) = (p(lo), p(hi));
        if flo == 0.0 && lo != -bound {
            roots.push(lo);
        }
        if flo * fhi < 0.0 {
            roots.push(bisect(&p, lo, hi, flo));
        }
    }
    roots.sort_by(f64::total_cmp);
    roots.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (1.0 + y.abs()));
    Ok(roots)
}

fn bisect(p: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, flo: f64) -> f64 {
    let neg_low = flo < 0.0;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            return mid;
        }
        let fm = p(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == neg_low {
            lo = mid;
        } else {
            hi = mid;
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    ClosedFormUnivariate,
    NewtonMultistart,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Completeness {
    ExactForSingletons,
    Heuristic,
}

/// A root `(λ, w)` of the in-support system for `J`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupportSystem {
    /// Sorted 0-based support.
    pub support: Vec<usize>,
    pub lambda: f64,
    /// Support weights with `eᵀw = 1`.
    pub w: Vec<f64>,
    /// `(i, ϱ_i)` for every `i ∉ J`.
    pub margins: Vec<(usize, f64)>,
    pub residual: f64,
    pub method: Method,
    /// Some `w_i` lies in `(-POS_TOL, POS_TOL]`.
    pub boundary_ambiguous: bool,
    pub admissible: bool,
}

impl SupportSystem {
    /// `w` embedded in `ℝⁿ` with zeros off the support.
    pub fn embedded(&self, n: usize) -> Vec<f64> {
        let mut x = vec![0.0; n];
        for (&i, &wi) in self.support.iter().zip(&self.w) {
            x[i] = wi;
        }
        x
    }
}

fn off_support_margins(problem: &ProblemTriple, support: &[usize], lambda: f64, w: &[f64]) -> Result<Vec<(usize, f64)>> {
    let n = problem.dim();
    let mut x = vec![0.0; n];
    for (&i, &wi) in support.iter().zip(w) {
        x[i] = wi;
    }
    let rho = problem.dual_vector(lambda, &x)?;
    Ok((0..n)
        .filter(|i| support.binary_search(i).is_err())
        .map(|i| (i, rho[i]))
        .collect())
}

fn require_orthant(problem: &ProblemTriple) -> Result<()> {
    if problem.is_orthant() {
        Ok(())
    } else {
        Err(Error::ConeUnsupported)
    }
}

/// Every real root of `λ^m a_{i..i} + λ b_{i..i} + c_{i..i}` with `w = (1)`.
pub fn single_support_eigenvalues(problem: &ProblemTriple, i: usize) -> Result<Vec<SupportSystem>> {
    require_orthant(problem)?;
    let n = problem.dim();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, dim: n });
    }
    let m = problem.order();
    let (a, b, c) = (problem.a().diagonal(i), problem.b().diagonal(i), problem.c().diagonal(i));
    trinomial_roots(a, b, c, m)?
        .into_iter()
        .map(|lambda| {
            let margins = off_support_margins(problem, &[i], lambda, &[1.0])?;
            let residual = (a * lambda.powi(m as i32) + b * lambda + c).abs();
            Ok(SupportSystem {
                support: vec![i],
                lambda,
                w: vec![1.0],
                admissible: margins.iter().all(|&(_, g)| g >= -MARGIN_TOL),
                margins,
                residual,
                method: Method::ClosedFormUnivariate,
                boundary_ambiguous: false,
            })
        })
        .collect()
}

/// `1 + max |λ|` over all singleton roots.
pub fn lambda_box(problem: &ProblemTriple) -> Result<f64> {
    require_orthant(problem)?;
    let m = problem.order();
    let mut top = 0.0_f64;
    for i in 0..problem.dim() {
        let (a, b, c) = (problem.a().diagonal(i), problem.b().diagonal(i), problem.c().diagonal(i));
        if let Ok(roots) = trinomial_roots(a, b, c, m) {
            top = roots.iter().fold(top, |t, r| t.max(r.abs()));
        }
    }
    Ok(1.0 + top)
}

struct SubProblem {
    m: usize,
    a: Tensor,
    b: Tensor,
    c: Tensor,
}

impl SubProblem {
    fn new(problem: &ProblemTriple, support: &[usize]) -> Result<Self> {
        Ok(Self {
            m: problem.order(),
            a: problem.a().principal_subtensor(support)?,
            b: problem.b().principal_subtensor(support)?,
            c: problem.c().principal_subtensor(support)?,
        })
    }

    fn residual(&self, w: &[f64], lambda: f64) -> Vec<f64> {
        let lm = lambda.powi(self.m as i32);
        let (aw, bw, cw) = (self.a.apply_m1(w), self.b.apply_m1(w), self.c.apply_m1(w));
        let mut f: Vec<f64> = (0..w.len()).map(|i| lm * aw[i] + lambda * bw[i] + cw[i]).collect();
        f.push(w.iter().sum::<f64>() - 1.0);
        f
    }

    fn jacobian(&self, w: &[f64], lambda: f64) -> DMatrix<f64> {
        let k = w.len();
        let m = self.m as i32;
        let lm = lambda.powi(m);
        let dlm = m as f64 * lambda.powi(m - 1);
        let ja = self.a.jacobian_m1(w).unwrap_or_default();
        let jb = self.b.jacobian_m1(w).unwrap_or_default();
        let jc = self.c.jacobian_m1(w).unwrap_or_default();
        let (aw, bw) = (self.a.apply_m1(w), self.b.apply_m1(w));
        let mut jac = DMatrix::zeros(k + 1, k + 1);
        for r in 0..k {
            for s in 0..k {
                jac[(r, s)] = lm * ja[r * k + s] + lambda * jb[r * k + s] + jc[r * k + s];
            }
            jac[(r, k)] = dlm * aw[r] + bw[r];
        }
        for s in 0..k {
            jac[(k, s)] = 1.0;
        }
        jac
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Newton with Armijo backtracking on `‖F‖₂`.
fn newton(sub: &SubProblem, mut w: Vec<f64>, mut lambda: f64) -> Option<(Vec<f64>, f64, f64)> {
    let k = w.len();
    let mut f = sub.residual(&w, lambda);
    let mut fnorm = norm(&f);
    for _ in 0..NEWTON_ITERS {
        if f.iter().all(|x| x.abs() <= SYS_TOL) {
            return Some((w, lambda, f.iter().fold(0.0_f64, |a, x| a.max(x.abs()))));
        }
        let jac = sub.jacobian(&w, lambda);
        let step = jac.lu().solve(&-DVector::from_vec(f.clone()))?;
        let mut t = 1.0;
        loop {
            let wt: Vec<f64> = (0..k).map(|i| w[i] + t * step[i]).collect();
            let lt = lambda + t * step[k];
            let ft = sub.residual(&wt, lt);
            let nt = norm(&ft);
            if nt.is_finite() && nt <= (1.0 - 1e-4 * t) * fnorm {
                w = wt;
                lambda = lt;
                f = ft;
                fnorm = nt;
                break;
            }
            t *= 0.5;
            if t < 1e-10 {
                return None;
            }
        }
    }
    f.iter()
        .all(|x| x.abs() <= SYS_TOL)
        .then(|| (w, lambda, f.iter().fold(0.0_f64, |a, x| a.max(x.abs()))))
}

fn support_seed(seed: u64, support: &[usize]) -> u64 {
    support.iter().fold(seed ^ 0x9e37_79b9_7f4a_7c15, |h, &i| {
        (h ^ (i as u64 + 1)).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn is_duplicate(found: &[SupportSystem], lambda: f64, w: &[f64]) -> bool {
    found.iter().any(|s| {
        (s.lambda - lambda).abs() <= DEDUP_TOL
            && s.w.iter().zip(w).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() <= DEDUP_TOL
    })
}

fn support_solve_with_box(
    problem: &ProblemTriple,
    support: &[usize],
    attempts: usize,
    seed: u64,
    base_box: f64,
) -> Result<Vec<SupportSystem>> {
    let sub = SubProblem::new(problem, support)?;
    let k = support.len();
    let mut rng = ChaCha8Rng::seed_from_u64(support_seed(seed, support));
    let mut found: Vec<SupportSystem> = Vec::new();
    for round in 0..RESTART_ROUNDS {
        let bx = base_box * 2f64.powi(round as i32);
        let before = found.len();
        for _ in 0..attempts {
            let raw: Vec<f64> = (0..k).map(|_| rng.gen_range(0.05..1.0)).collect();
            let s: f64 = raw.iter().sum();
            let w0: Vec<f64> = raw.iter().map(|x| x / s).collect();
            let l0 = rng.gen_range(-bx..=bx);
            let Some((w, lambda, residual)) = newton(&sub, w0, l0) else {
                continue;
            };
            let wmin = w.iter().copied().fold(f64::INFINITY, f64::min);
            if wmin <= -POS_TOL || is_duplicate(&found, lambda, &w) {
                continue;
            }
            let boundary_ambiguous = wmin <= POS_TOL;
            let margins = off_support_margins(problem, support, lambda, &w)?;
            let admissible = !boundary_ambiguous && margins.iter().all(|&(_, g)| g >= -MARGIN_TOL);
            found.push(SupportSystem {
                support: support.to_vec(),
                lambda,
                w,
                margins,
                residual,
                method: Method::NewtonMultistart,
                boundary_ambiguous,
                admissible,
            });
        }
        if round > 0 && found.len() == before {
            break;
        }
    }
    found.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    Ok(found)
}

/// Newton roots of the in-support system for `|J| ≥ 2`, with positive (or
/// boundary-ambiguous) `w`. An empty result does not prove absence.
pub fn support_system_solve(problem: &ProblemTriple, support: &[usize], attempts: usize, seed: u64) -> Result<Vec<SupportSystem>> {
    require_orthant(problem)?;
    let mut j = support.to_vec();
    j.sort_unstable();
    j.dedup();
    if j.len() < 2 {
        return Err(Error::InvalidParameter("support_system_solve needs |J| >= 2".into()));
    }
    if let Some(&bad) = j.iter().find(|&&i| i >= problem.dim()) {
        return Err(Error::IndexOutOfRange {
            index: bad,
            dim: problem.dim(),
        });
    }
    support_solve_with_box(problem, &j, attempts, seed, lambda_box(problem)?)
}

/// A verified Pareto eigenpair with `eᵀx = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumEntry {
    pub lambda: f64,
    pub x: Vec<f64>,
    pub support: Vec<usize>,
    pub margins: Vec<(usize, f64)>,
    pub method: Method,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Admissible, verified pairs sorted by `λ`, then support.
    pub entries: Vec<SpectrumEntry>,
    /// Distinct eigenvalues (merged within `DEDUP_TOL`).
    pub eigenvalues: Vec<f64>,
    pub supports_explored: usize,
    pub completeness: Completeness,
    pub boundary_ambiguous: Vec<SupportSystem>,
    /// Admissible by the support test but rejected by the verifier.
    pub rejected: Vec<SupportSystem>,
    /// Singletons whose trinomial vanishes identically.
    pub degenerate: Vec<usize>,
    /// `n·m^n`, when it fits in 128 bits.
    pub bound: Option<u128>,
}

/// Index subsets of `0..n` with `1 ≤ |J| ≤ max_size`, by size then
/// lexicographically.
pub fn supports_up_to(n: usize, max_size: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    for size in 1..=max_size.min(n) {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            out.push(idx.clone());
            let Some(pos) = (0..size).rev().find(|&p| idx[p] < n - size + p) else {
                break;
            };
            idx[pos] += 1;
            for q in pos + 1..size {
                idx[q] = idx[q - 1] + 1;
            }
        }
    }
    out
}

enum SupportOutcome {
    Systems(Vec<SupportSystem>),
    Degenerate(usize),
}

pub fn enumerate_pareto_spectrum(problem: &ProblemTriple, max_support: usize, attempts: usize, seed: u64) -> Result<SpectrumResult> {
    require_orthant(problem)?;
    let n = problem.dim();
    if max_support == 0 || max_support > n {
        return Err(Error::InvalidParameter(format!("max_support must lie in 1..={n}")));
    }
    let base_box = lambda_box(problem)?;
    let supports = supports_up_to(n, max_support);
    let outcomes: Vec<Result<SupportOutcome>> = supports
        .par_iter()
        .map(|j| {
            if j.len() == 1 {
                match single_support_eigenvalues(problem, j[0]) {
                    Ok(s) => Ok(SupportOutcome::Systems(s)),
                    Err(Error::DegeneratePolynomial) => Ok(SupportOutcome::Degenerate(j[0])),
                    Err(e) => Err(e),
                }
            } else {
                support_solve_with_box(problem, j, attempts, seed, base_box).map(SupportOutcome::Systems)
            }
        })
        .collect();

    let mut entries = Vec::new();
    let mut boundary_ambiguous = Vec::new();
    let mut rejected = Vec::new();
    let mut degenerate = Vec::new();
    for outcome in outcomes {
        match outcome? {
            SupportOutcome::Degenerate(i) => degenerate.push(i),
            SupportOutcome::Systems(systems) => {
                for s in systems {
                    if s.boundary_ambiguous {
                        boundary_ambiguous.push(s);
                        continue;
                    }
                    if !s.admissible {
                        continue;
                    }
                    let tol = match s.method {
                        Method::ClosedFormUnivariate => CLOSED_FORM_VERIFY_TOL,
                        Method::NewtonMultistart => NEWTON_VERIFY_TOL,
                    };
                    let x = s.embedded(n);
                    let pair = verify_eigenpair(problem, s.lambda, &x, tol)?;
                    if pair.passed {
                        entries.push(SpectrumEntry {
                            lambda: s.lambda,
                            x,
                            support: s.support.clone(),
                            margins: s.margins.clone(),
                            method: s.method,
                            residual: pair.residuals.max(),
                        });
                    } else {
                        rejected.push(s);
                    }
                }
            }
        }
    }
    entries.sort_by(|a, b| a.lambda.total_cmp(&b.lambda).then_with(|| a.support.cmp(&b.support)));
    let mut eigenvalues: Vec<f64> = Vec::new();
    for e in &entries {
        if eigenvalues.last().is_none_or(|&l| (e.lambda - l).abs() > DEDUP_TOL) {
            eigenvalues.push(e.lambda);
        }
    }
    Ok(SpectrumResult {
        entries,
        eigenvalues,
        supports_explored: supports.len(),
        completeness: if max_support == 1 {
            Completeness::ExactForSingletons
        } else {
            Completeness::Heuristic
        },
        boundary_ambiguous,
        rejected,
        degenerate,
        bound: count_bound(problem.order(), n).ok(),
    })
}

pub fn lambda_max(result: &SpectrumResult) -> Result<f64> {
    result
        .eigenvalues
        .iter()
        .copied()
        .reduce(f64::max)
        .ok_or(Error::EmptySpectrum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{example1, trivial, EXAMPLE1_A, EXAMPLE1_B};
    use nalgebra::Matrix2;

    /// Real eigenvalues of the companion matrix of `λ^m + (b/a) λ + c/a`.
    fn companion_roots(a: f64, b: f64, c: f64, m: usize) -> Vec<f64> {
        let mut comp = DMatrix::zeros(m, m);
        for i in 1..m {
            comp[(i, i - 1)] = 1.0;
        }
        comp[(0, m - 1)] = -c / a;
        comp[(1, m - 1)] = -b / a;
        let mut r: Vec<f64> = comp
            .complex_eigenvalues()
            .iter()
            .filter(|z| z.im.abs() < 1e-9)
            .map(|z| z.re)
            .collect();
        r.sort_by(f64::total_cmp);
        r
    }

    #[test]
    fn trinomial_matches_companion() {
        let cases = [
            (0.9325, 0.8272, -1.0, 2),
            (0.3492, 0.1266, -1.0, 4),
            (1.0, 0.0, -1.0, 3),
            (1.0, 0.0, -1.0, 4),
            (-2.0, 3.0, 0.5, 5),
            (0.7, -2.5, 0.4, 3),
            (1.0, -3.0, 1.0, 4),
        ];
        for (a, b, c, m) in cases {
            let ours = trinomial_roots(a, b, c, m).unwrap();
            let oracle = companion_roots(a, b, c, m);
            assert_eq!(ours.len(), oracle.len(), "{a} {b} {c} {m}: {ours:?} vs {oracle:?}");
            for (x, y) in ours.iter().zip(&oracle) {
                assert!((x - y).abs() < 1e-9, "{x} vs {y}");
            }
        }
    }

    #[test]
    fn trinomial_quadratic_formula() {
        let (a, b, c): (f64, f64, f64) = (0.2296, 0.2235, -1.0);
        let d = (b * b - 4.0 * a * c).sqrt();
        let r = trinomial_roots(a, b, c, 2).unwrap();
        assert!((r[0] - (-b - d) / (2.0 * a)).abs() < 1e-13);
        assert!((r[1] - (-b + d) / (2.0 * a)).abs() < 1e-13);
    }

    #[test]
    fn trinomial_edge_cases() {
        assert!(matches!(trinomial_roots(0.0, 0.0, 0.0, 3), Err(Error::DegeneratePolynomial)));
        assert!(trinomial_roots(0.0, 0.0, 1.0, 3).unwrap().is_empty());
        assert_eq!(trinomial_roots(0.0, 2.0, -1.0, 3).unwrap(), vec![0.5]);
        assert_eq!(trinomial_roots(1.0, 0.0, 0.0, 2).unwrap(), vec![0.0]);
        assert!(trinomial_roots(1.0, 0.0, 1.0, 2).unwrap().is_empty());
    }

    #[test]
    fn identity_singletons() {
        for m in [2usize, 3, 4] {
            let q = trivial(m, 3);
            let s = single_support_eigenvalues(&q, 1).unwrap();
            let lams: Vec<f64> = s.iter().map(|x| x.lambda).collect();
            if m % 2 == 0 {
                assert_eq!(lams, vec![-1.0, 1.0]);
            } else {
                assert_eq!(lams, vec![1.0]);
            }
            assert!(s.iter().all(|x| x.admissible && x.margins.iter().all(|&(_, g)| g == 0.0)));
        }
    }

    #[test]
    fn example1_singletons() {
        let q = example1();
        let s = single_support_eigenvalues(&q, 2).unwrap();
        let pos = s.iter().find(|x| x.lambda > 0.0).unwrap();
        assert!((pos.lambda - 0.6830).abs() < 1e-4);
        assert!(pos.admissible);
        let expect = [(0, 0.5042), (1, 0.2393), (3, 0.4162)];
        for ((i, g), (j, e)) in pos.margins.iter().zip(expect) {
            assert_eq!(*i, j);
            // The reference table lists ϱ for x_3 = 0.5701, i.e. margins scaled by 0.5701.
            assert!((g * 0.5701 - e).abs() < 1e-3);
        }
        let neg = s.iter().find(|x| x.lambda < 0.0).unwrap();
        assert!(!neg.admissible);
    }

    #[test]
    fn decoupled_full_support_has_no_positive_root() {
        let mut a = vec![0.0; 9];
        a[0] = 1.0;
        a[4] = 2.0;
        a[8] = 3.0;
        let q = ProblemTriple::with_neg_identity(
            Tensor::symmetric(2, 3, a).unwrap(),
            Tensor::zeros(2, 3).unwrap(),
        )
        .unwrap();
        let roots = support_system_solve(&q, &[0, 1, 2], 30, 5).unwrap();
        assert!(roots.iter().all(|r| !r.admissible));
        assert!(roots.iter().all(|r| r.w.iter().any(|&x| x <= POS_TOL)));
    }

    #[test]
    fn dedup_collapses_repeated_starts() {
        let q = trivial(2, 2);
        let roots = support_system_solve(&q, &[0, 1], 40, 1).unwrap();
        // λ² = 1 on the full support: λ = ±1 with any w > 0. Newton from
        // random starts lands on many w; identical ones must be merged.
        for (i, a) in roots.iter().enumerate() {
            for b in &roots[i + 1..] {
                assert!(!((a.lambda - b.lambda).abs() <= DEDUP_TOL
                    && (a.w[0] - b.w[0]).abs() <= DEDUP_TOL));
            }
        }
        assert!(roots.iter().all(|r| (r.lambda.abs() - 1.0).abs() < 1e-9));
    }

    /// Sign-change scan of `det(λ²A_J + λB_J − I)` with a positive null vector.
    fn determinant_scan(j: [usize; 2]) -> Vec<(f64, [f64; 2])> {
        let a = |r: usize, c: usize| EXAMPLE1_A[j[r] * 4 + j[c]];
        let b = |r: usize, c: usize| EXAMPLE1_B[j[r] * 4 + j[c]];
        let mat = |l: f64| {
            Matrix2::from_fn(|r, c| l * l * a(r, c) + l * b(r, c) - if r == c { 1.0 } else { 0.0 })
        };
        let det = |l: f64| mat(l).determinant();
        let mut out = Vec::new();
        let (lo, hi, steps) = (-20.0, 20.0, 400_000);
        let h = (hi - lo) / steps as f64;
        for s in 0..steps {
            let (mut l0, mut l1) = (lo + s as f64 * h, lo + (s + 1) as f64 * h);
            if det(l0) * det(l1) >= 0.0 {
                continue;
            }
            for _ in 0..100 {
                let mid = 0.5 * (l0 + l1);
                if det(l0) * det(mid) <= 0.0 {
                    l1 = mid;
                } else {
                    l0 = mid;
                }
            }
            let l = 0.5 * (l0 + l1);
            let mm = mat(l);
            let w = [-mm[(0, 1)], mm[(0, 0)]];
            let s = w[0] + w[1];
            let w = [w[0] / s, w[1] / s];
            if w[0] > 0.0 && w[1] > 0.0 {
                out.push((l, w));
            }
        }
        out
    }

    #[test]
    fn example1_pairs_match_determinant_scan() {
        let q = example1();
        for j in supports_up_to(4, 2).into_iter().filter(|j| j.len() == 2) {
            let oracle = determinant_scan([j[0], j[1]]);
            let ours = support_system_solve(&q, &j, 40, 3).unwrap();
            let ours: Vec<&SupportSystem> = ours.iter().filter(|s| !s.boundary_ambiguous).collect();
            assert_eq!(ours.len(), oracle.len(), "J = {j:?}: {ours:?} vs {oracle:?}");
            for (s, (l, w)) in ours.iter().zip(&oracle) {
                assert!((s.lambda - l).abs() < 1e-8);
                assert!((s.w[0] - w[0]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn example1_singleton_spectrum() {
        let r = enumerate_pareto_spectrum(&example1(), 1, 10, 0).unwrap();
        assert_eq!(r.completeness, Completeness::ExactForSingletons);
        assert_eq!(r.supports_explored, 4);
        let expect = [0.6830, 0.8392, 1.0561, 1.6563];
        // Two negative roots are admissible as well: λ² A dominates the margins.
        let positive: Vec<f64> = r.eigenvalues.iter().copied().filter(|&l| l > 0.0).collect();
        assert_eq!(positive.len(), 4);
        assert_eq!(r.eigenvalues.len(), 6);
        for (l, e) in positive.iter().zip(expect) {
            assert!((l - e).abs() < 1e-4, "{l} vs {e}");
        }
        assert!((lambda_max(&r).unwrap() - 1.6563).abs() < 1e-4);
    }

    #[test]
    fn identity_full_enumeration() {
        let q = trivial(3, 3);
        let r = enumerate_pareto_spectrum(&q, 3, 20, 9).unwrap();
        assert_eq!(r.completeness, Completeness::Heuristic);
        assert_eq!(r.supports_explored, 7);
        assert_eq!(r.eigenvalues, vec![1.0]);
        let supports: std::collections::BTreeSet<Vec<usize>> = r.entries.iter().map(|e| e.support.clone()).collect();
        assert_eq!(supports.len(), 7);
        assert!(r.eigenvalues.len() as u128 <= r.bound.unwrap());
        let again = enumerate_pareto_spectrum(&q, 3, 20, 9).unwrap();
        assert_eq!(again, r);
    }

    #[test]
    fn spectrum_errors() {
        let empty = SpectrumResult {
            entries: vec![],
            eigenvalues: vec![],
            supports_explored: 0,
            completeness: Completeness::Heuristic,
            boundary_ambiguous: vec![],
            rejected: vec![],
            degenerate: vec![],
            bound: None,
        };
        assert!(matches!(lambda_max(&empty), Err(Error::EmptySpectrum)));
        let q = example1();
        assert!(enumerate_pareto_spectrum(&q, 5, 1, 0).is_err());
        assert!(support_system_solve(&q, &[1], 1, 0).is_err());
        let degenerate = ProblemTriple::new(
            Tensor::zeros(2, 2).unwrap(),
            Tensor::zeros(2, 2).unwrap(),
            Tensor::zeros(2, 2).unwrap(),
        )
        .unwrap();
        let r = enumerate_pareto_spectrum(&degenerate, 1, 1, 0).unwrap();
        assert_eq!(r.degenerate, vec![0, 1]);
        assert!(r.entries.is_empty());
    }

    #[test]
    fn subset_enumeration() {
        assert_eq!(supports_up_to(3, 3).len(), 7);
        assert_eq!(supports_up_to(4, 2).len(), 10);
        assert_eq!(supports_up_to(4, 1), vec![vec![0], vec![1], vec![2], vec![3]]);
    }
}
