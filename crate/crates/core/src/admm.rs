//! Linearized ADMM for the minimization form
//!
//! ```text
//! min  B u^m + ϑ vᵀu^[m-1]   s.t.  A u^m + vᵀv^[m-1] = 1,  u, v ≥ 0
//! ```
//!
//! with augmented Lagrangian
//! `L = B u^m + ϑ vᵀu^[m-1] − ζ g + (β/2) g²`, `g = A u^m + vᵀv^[m-1] − 1`.
//!
//! Each sweep takes one projected gradient step in `u`, then one in `v` at
//! the new `u`, then updates `ζ`. The exact ADMM subproblems (and plain
//! augmented Lagrangian steps) have no closed form and are not provided.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{stationary_to_eigenpair, theta, Eigenpair, ProblemTriple, ReformulationPoint};
use crate::tensor::{dot, pow_vec};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub tol: f64,
    pub max_iter: usize,
    /// `‖u‖∞` at or below this marks a converged run as a zero solution.
    pub zero_tol: f64,
    pub seed: u64,
    pub trace: bool,
}

impl SolverConfig {
    /// `β = 1`, `Tol = 1e-6`, 20000 iterations; `γ₁/γ₂ = 200/10` for
    /// `(m, n) = (2, 4)` and `1000/50` otherwise.
    pub fn defaults_for(m: usize, n: usize) -> Self {
        let (gamma1, gamma2) = if (m, n) == (2, 4) { (200.0, 10.0) } else { (1000.0, 50.0) };
        Self {
            beta: 1.0,
            gamma1,
            gamma2,
            tol: 1e-6,
            max_iter: 20_000,
            zero_tol: 1e-4,
            seed: 0,
            trace: false,
        }
    }

    pub fn for_problem(problem: &ProblemTriple) -> Self {
        Self::defaults_for(problem.order(), problem.dim())
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("beta", self.beta),
            ("gamma1", self.gamma1),
            ("gamma2", self.gamma2),
            ("tol", self.tol),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidParameter(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be at least 1".into()));
        }
        if self.zero_tol.is_nan() || self.zero_tol < 0.0 {
            return Err(Error::InvalidParameter("zero_tol must be nonnegative".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iter: usize,
    pub relerr: f64,
    /// Value of the minimization objective, `−varphi0`.
    pub objective: f64,
    pub violation: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub zeta: f64,
    pub k: usize,
    pub last_relerr: f64,
    /// `A u^m + vᵀv^[m-1] − 1` at the current iterate.
    pub violation: f64,
    pub trace: Vec<TraceRow>,
}

impl SolverState {
    /// Starting state with `ζ = 0`.
    pub fn new(problem: &ProblemTriple, u0: Vec<f64>, v0: Vec<f64>) -> Result<Self> {
        let n = problem.dim();
        for (name, x) in [("u0", &u0), ("v0", &v0)] {
            if x.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: x.len(),
                });
            }
            if x.iter().any(|&t| !t.is_finite() || t < 0.0) {
                return Err(Error::InvalidStart(format!("{name} must be finite and nonnegative")));
            }
        }
        let violation = constraint(problem, &u0, &v0) - 1.0;
        Ok(Self {
            u: u0,
            v: v0,
            zeta: 0.0,
            k: 0,
            last_relerr: f64::INFINITY,
            violation,
            trace: Vec::new(),
        })
    }
}

fn constraint(problem: &ProblemTriple, u: &[f64], v: &[f64]) -> f64 {
    let m = problem.order();
    problem.a().apply_full(u) + dot(v, &pow_vec(v, m - 1))
}

fn objective(problem: &ProblemTriple, th: f64, u: &[f64], v: &[f64]) -> f64 {
    let m = problem.order();
    problem.b().apply_full(u) + th * dot(v, &pow_vec(u, m - 1))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

pub fn augmented_lagrangian(problem: &ProblemTriple, u: &[f64], v: &[f64], zeta: f64, beta: f64) -> Result<f64> {
    problem.require_reformulation()?;
    let n = problem.dim();
    if u.len() != n || v.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: if u.len() != n { u.len() } else { v.len() },
        });
    }
    let g = constraint(problem, u, v) - 1.0;
    Ok(objective(problem, theta(problem.order()), u, v) - zeta * g + 0.5 * beta * g * g)
}

/// One sweep, updating `state` in place. Fails on a non-finite iterate.
fn step_in_place(problem: &ProblemTriple, th: f64, state: &mut SolverState, config: &SolverConfig) -> Result<()> {
    let m = problem.order();
    let mf = m as f64;
    let beta = config.beta;
    let SolverState { u, v, zeta, .. } = state;

    let vm = dot(v, &pow_vec(v, m - 1));
    let au = problem.a().apply_m1(u);
    let q = dot(&au, u) + vm - 1.0 - *zeta / beta;
    let bu = problem.b().apply_m1(u);
    let um2 = pow_vec(u, m - 2);
    let u_next: Vec<f64> = (0..u.len())
        .map(|i| {
            let phi = mf * bu[i] + th * (mf - 1.0) * v[i] * um2[i] + beta * mf * q * au[i];
            (u[i] - phi / config.gamma1).max(0.0)
        })
        .collect();

    let au_next = problem.a().apply_full(&u_next);
    let scale = beta * mf * (au_next + vm - 1.0 - *zeta / beta);
    let un_m1 = pow_vec(&u_next, m - 1);
    let v_m1 = pow_vec(v, m - 1);
    let v_next: Vec<f64> = (0..v.len())
        .map(|i| (v[i] - (th * un_m1[i] + scale * v_m1[i]) / config.gamma2).max(0.0))
        .collect();

    let violation = au_next + dot(&v_next, &pow_vec(&v_next, m - 1)) - 1.0;
    let zeta_next = *zeta - beta * violation;
    let relerr = dist(&u_next, u).max(dist(&v_next, v)).max(violation.abs());

    if !(relerr.is_finite() && zeta_next.is_finite()) || u_next.iter().chain(&v_next).any(|x| !x.is_finite()) {
        return Err(Error::NonFinite(format!("iterate {}", state.k + 1)));
    }
    *u = u_next;
    *v = v_next;
    *zeta = zeta_next;
    state.k += 1;
    state.last_relerr = relerr;
    state.violation = violation;
    if config.trace {
        let obj = objective(problem, th, &state.u, &state.v);
        state.trace.push(TraceRow {
            iter: state.k,
            relerr,
            objective: obj,
            violation,
        });
    }
    Ok(())
}

/// One full sweep from `state`.
pub fn admm_step(problem: &ProblemTriple, state: &SolverState, config: &SolverConfig) -> Result<SolverState> {
    problem.require_reformulation()?;
    let mut next = state.clone();
    step_in_place(problem, theta(problem.order()), &mut next, config)?;
    Ok(next)
}

/// `max{‖u⁺−u‖₂, ‖v⁺−v‖₂, |V|}` with `V` the constraint violation at `next`.
pub fn rel_err(prev: &SolverState, next: &SolverState) -> f64 {
    dist(&next.u, &prev.u)
        .max(dist(&next.v, &prev.v))
        .max(next.violation.abs())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DivergenceKind {
    MaxIter,
    NonFinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    ConvergedNonzero,
    ConvergedZero,
    /// Met the stopping rule with `u ≠ 0`, but no verified eigenpair could
    /// be recovered.
    ConvergedUnverified,
    Diverged(DivergenceKind),
}

/// The three groups used for multistart rates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OutcomeClass {
    Diverged,
    Zero,
    Nonzero,
}

impl SolveStatus {
    pub fn is_converged(self) -> bool {
        !matches!(self, SolveStatus::Diverged(_))
    }

    pub fn class(self) -> OutcomeClass {
        match self {
            SolveStatus::ConvergedNonzero => OutcomeClass::Nonzero,
            SolveStatus::ConvergedZero | SolveStatus::ConvergedUnverified => OutcomeClass::Zero,
            SolveStatus::Diverged(_) => OutcomeClass::Diverged,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SolveStatus::ConvergedNonzero => "converged_nonzero",
            SolveStatus::ConvergedZero => "converged_zero",
            SolveStatus::ConvergedUnverified => "converged_unverified",
            SolveStatus::Diverged(DivergenceKind::MaxIter) => "diverged",
            SolveStatus::Diverged(DivergenceKind::NonFinite) => "diverged_nonfinite",
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolveOutcome {
    pub status: SolveStatus,
    pub iterations: usize,
    pub elapsed_secs: f64,
    pub state: SolverState,
    pub eigenpair: Option<Eigenpair>,
    /// Why recovery failed for `ConvergedUnverified`.
    pub note: Option<String>,
}

impl SolveOutcome {
    /// `varphi0` at the final iterate, i.e. `λ^{m-1}` at a nonzero limit.
    pub fn varphi0(&self, problem: &ProblemTriple) -> f64 {
        -objective(problem, theta(problem.order()), &self.state.u, &self.state.v)
    }
}

/// Iterates from `(u0, v0)` with `ζ₀ = 0` until RelErr ≤ Tol, the iteration
/// cap, or a non-finite iterate. Nonzero limits are verified at `10·Tol`.
pub fn solve(problem: &ProblemTriple, u0: &[f64], v0: &[f64], config: &SolverConfig) -> Result<SolveOutcome> {
    problem.require_reformulation()?;
    config.validate()?;
    let mut state = SolverState::new(problem, u0.to_vec(), v0.to_vec())?;
    if config.trace {
        state.trace.reserve(config.max_iter.min(1 << 16));
    }
    let th = theta(problem.order());
    let start = Instant::now();
    let mut status = None;
    while state.k < config.max_iter {
        if step_in_place(problem, th, &mut state, config).is_err() {
            status = Some(SolveStatus::Diverged(DivergenceKind::NonFinite));
            break;
        }
        if state.last_relerr <= config.tol {
            break;
        }
    }
    let elapsed_secs = start.elapsed().as_secs_f64();

    let mut eigenpair = None;
    let mut note = None;
    let status = status.unwrap_or_else(|| {
        if state.last_relerr > config.tol {
            return SolveStatus::Diverged(DivergenceKind::MaxIter);
        }
        let top = state.u.iter().fold(0.0_f64, |a, &x| a.max(x));
        if top <= config.zero_tol {
            return SolveStatus::ConvergedZero;
        }
        let point = ReformulationPoint {
            u: state.u.clone(),
            v: state.v.clone(),
        };
        match stationary_to_eigenpair(problem, &point, 10.0 * config.tol) {
            Ok(pair) if pair.passed => {
                eigenpair = Some(pair);
                SolveStatus::ConvergedNonzero
            }
            Ok(pair) => {
                note = Some(format!("recovered pair fails verification (residual {:.3e})", pair.residuals.max()));
                eigenpair = Some(pair);
                SolveStatus::ConvergedUnverified
            }
            Err(e) => {
                note = Some(e.to_string());
                SolveStatus::ConvergedUnverified
            }
        }
    });
    Ok(SolveOutcome {
        status,
        iterations: state.k,
        elapsed_secs,
        state,
        eigenpair,
        note,
    })
}

/// Draws `u0` from `U(0,1)^n`.
pub fn uniform_sampler(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen::<f64>()).collect()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Rates {
    pub diverged: f64,
    pub zero: f64,
    pub nonzero: f64,
}

#[derive(Clone, Debug)]
pub struct MultistartRun {
    pub index: usize,
    pub seed: u64,
    pub start: Vec<f64>,
    pub outcome: SolveOutcome,
}

#[derive(Clone, Debug)]
pub struct MultistartReport {
    pub runs: Vec<MultistartRun>,
    pub rates: Rates,
}

/// Runs `runs` independent solves from `u0 = v0 = sampler(rng)`, where run
/// `i` seeds its generator with `config.seed + i`. Results are in run order
/// regardless of scheduling.
pub fn multistart<S>(problem: &ProblemTriple, runs: usize, config: &SolverConfig, sampler: S) -> Result<MultistartReport>
where
    S: Fn(&mut ChaCha8Rng, usize) -> Vec<f64> + Sync,
{
    if runs == 0 {
        return Err(Error::InvalidParameter("runs must be at least 1".into()));
    }
    problem.require_reformulation()?;
    config.validate()?;
    let n = problem.dim();
    let results: Vec<Result<MultistartRun>> = (0..runs)
        .into_par_iter()
        .map(|index| {
            let seed = config.seed.wrapping_add(index as u64);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let start = sampler(&mut rng, n);
            let outcome = solve(problem, &start, &start, config)?;
            Ok(MultistartRun {
                index,
                seed,
                start,
                outcome,
            })
        })
        .collect();
    let runs_out = results.into_iter().collect::<Result<Vec<_>>>()?;
    let mut rates = Rates::default();
    let share = 1.0 / runs as f64;
    for r in &runs_out {
        match r.outcome.status.class() {
            OutcomeClass::Diverged => rates.diverged += share,
            OutcomeClass::Zero => rates.zero += share,
            OutcomeClass::Nonzero => rates.nonzero += share,
        }
    }
    Ok(MultistartReport { runs: runs_out, rates })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::fixtures::{example1, trivial, EXAMPLE1_A, EXAMPLE1_B};
    use crate::model::{eigenpair_to_stationary, varphi0, verify_eigenpair};
    use nalgebra::{DMatrix, DVector};

    const ROW1: [f64; 4] = [0.3829, 0.0846, 0.7339, 0.3320];

    fn row1_lambda() -> f64 {
        (-0.8272 + (0.8272f64.powi(2) + 4.0 * 0.9325).sqrt()) / (2.0 * 0.9325)
    }

    fn row1_stationary() -> ReformulationPoint {
        let q = example1();
        let pair = verify_eigenpair(&q, row1_lambda(), &[0.0, 0.0, 1.0, 0.0], 1e-12).unwrap();
        eigenpair_to_stationary(&q, &pair).unwrap()
    }

    #[test]
    fn lagrangian_values() {
        let q = example1();
        let zero = [0.0; 4];
        assert_eq!(augmented_lagrangian(&q, &zero, &zero, 0.0, 1.0).unwrap(), 0.5);
        let p = row1_stationary();
        let a = augmented_lagrangian(&q, &p.u, &p.v, 0.3, 1.0).unwrap();
        let b = augmented_lagrangian(&q, &p.u, &p.v, -7.0, 5.0).unwrap();
        assert!((a - b).abs() < 1e-14);
        assert!((a + row1_lambda()).abs() < 1e-12);
        assert!((a + 0.6830).abs() < 1e-4);
        assert!((a + varphi0(&q, &p).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn exact_stationary_point_is_fixed() {
        let q = example1();
        let p = row1_stationary();
        let mut state = SolverState::new(&q, p.u.clone(), p.v.clone()).unwrap();
        state.zeta = -row1_lambda();
        let next = admm_step(&q, &state, &SolverConfig::defaults_for(2, 4)).unwrap();
        for (a, b) in next.u.iter().zip(&p.u).chain(next.v.iter().zip(&p.v)) {
            assert!((a - b).abs() < 1e-13);
        }
        assert!((next.zeta - state.zeta).abs() < 1e-13);
        assert!(rel_err(&state, &next) < 1e-13);
    }

    #[test]
    fn matrix_step_agrees_for_m2() {
        // Hand-coded quadratic case: Φ = 2Bu − 2v + 2βqAu, Υ = 2β q' v.
        let q = example1();
        let a = DMatrix::from_row_slice(4, 4, &EXAMPLE1_A);
        let b = DMatrix::from_row_slice(4, 4, &EXAMPLE1_B);
        let u = DVector::from_column_slice(&ROW1);
        let v = DVector::from_column_slice(&[0.5, 0.1, 0.2, 0.9]);
        let (beta, g1, g2, zeta) = (1.0, 200.0, 10.0, 0.25);
        let qv = u.dot(&(&a * &u)) + v.dot(&v) - 1.0 - zeta / beta;
        let phi = 2.0 * (&b * &u) - 2.0 * &v + 2.0 * beta * qv * (&a * &u);
        let un = (&u - phi / g1).map(|x| x.max(0.0));
        let qn = un.dot(&(&a * &un)) + v.dot(&v) - 1.0 - zeta / beta;
        let ups = 2.0 * beta * qn * &v;
        let vn = (&v - (-2.0 * &un + ups) / g2).map(|x| x.max(0.0));
        let zn = zeta - beta * (un.dot(&(&a * &un)) + vn.dot(&vn) - 1.0);

        let mut state = SolverState::new(&q, ROW1.to_vec(), v.as_slice().to_vec()).unwrap();
        state.zeta = zeta;
        let cfg = SolverConfig {
            beta,
            gamma1: g1,
            gamma2: g2,
            ..SolverConfig::defaults_for(2, 4)
        };
        let next = admm_step(&q, &state, &cfg).unwrap();
        for i in 0..4 {
            assert!((next.u[i] - un[i]).abs() < 1e-14);
            assert!((next.v[i] - vn[i]).abs() < 1e-14);
        }
        assert!((next.zeta - zn).abs() < 1e-14);
    }

    #[test]
    fn projection_clips_to_zero() {
        let q = trivial(3, 3);
        let state = SolverState::new(&q, vec![5.0, 0.0, 2.0], vec![3.0, 0.0, 4.0]).unwrap();
        let cfg = SolverConfig {
            gamma1: 1.0,
            gamma2: 1.0,
            ..SolverConfig::defaults_for(3, 3)
        };
        let next = admm_step(&q, &state, &cfg).unwrap();
        assert!(next.u.iter().chain(&next.v).all(|&x| x >= 0.0));
        assert!(next.u.iter().chain(&next.v).any(|&x| x == 0.0));
    }

    #[test]
    fn rel_err_cases() {
        let q = example1();
        let p = row1_stationary();
        let s = SolverState::new(&q, p.u.clone(), p.v.clone()).unwrap();
        assert!(rel_err(&s, &s).abs() < 1e-15);
        let mut t = s.clone();
        t.violation = 0.1;
        assert_eq!(rel_err(&s, &t), 0.1);
    }

    #[test]
    fn bad_inputs() {
        let q = example1();
        let cfg = SolverConfig::defaults_for(2, 4);
        assert!(matches!(
            solve(&q, &[-0.1, 0.0, 0.0, 0.0], &[0.1; 4], &cfg),
            Err(Error::InvalidStart(_))
        ));
        let bad = SolverConfig { beta: 0.0, ..cfg.clone() };
        assert!(matches!(solve(&q, &ROW1, &ROW1, &bad), Err(Error::InvalidParameter(_))));
        let c_plus = ProblemTriple::new(q.a().clone(), q.b().clone(), q.c().scaled(-1.0)).unwrap();
        assert!(matches!(solve(&c_plus, &ROW1, &ROW1, &cfg), Err(Error::ReformulationUnsupported)));
    }

    #[test]
    fn example1_row1() {
        let q = example1();
        let cfg = SolverConfig {
            trace: true,
            ..SolverConfig::defaults_for(2, 4)
        };
        let out = solve(&q, &ROW1, &ROW1, &cfg).unwrap();
        assert_eq!(out.status, SolveStatus::ConvergedNonzero);
        let pair = out.eigenpair.as_ref().unwrap();
        assert!((pair.lambda - 0.6830).abs() < 5e-4);
        assert_eq!(pair.support(1e-3), vec![2]);
        assert!((pair.x[2] - 0.5701).abs() < 1e-3);
        assert!((out.state.zeta + pair.lambda).abs() < 1e-3);
        assert_eq!(out.state.trace.len(), out.iterations);
        assert!(out.state.trace.last().unwrap().relerr <= cfg.tol);
        assert!(out.iterations <= 5000);
    }

    #[test]
    fn iteration_cap_diverges() {
        let q = example1();
        let cfg = SolverConfig {
            max_iter: 1,
            ..SolverConfig::defaults_for(2, 4)
        };
        let out = solve(&q, &ROW1, &ROW1, &cfg).unwrap();
        assert_eq!(out.status, SolveStatus::Diverged(DivergenceKind::MaxIter));
        assert_eq!(out.iterations, 1);
    }

    #[test]
    fn nonfinite_is_reported() {
        let q = example1();
        let cfg = SolverConfig {
            gamma1: 1e-300,
            ..SolverConfig::defaults_for(2, 4)
        };
        let out = solve(&q, &ROW1, &ROW1, &cfg).unwrap();
        assert_eq!(out.status, SolveStatus::Diverged(DivergenceKind::NonFinite));
        assert_eq!(out.status.class(), OutcomeClass::Diverged);
    }

    #[test]
    fn multistart_is_reproducible() {
        let q = example1();
        let cfg = SolverConfig {
            seed: 11,
            ..SolverConfig::defaults_for(2, 4)
        };
        let a = multistart(&q, 6, &cfg, uniform_sampler).unwrap();
        let b = multistart(&q, 6, &cfg, uniform_sampler).unwrap();
        assert_eq!(a.rates, b.rates);
        for (x, y) in a.runs.iter().zip(&b.runs) {
            assert_eq!(x.start, y.start);
            assert_eq!(x.outcome.state.u, y.outcome.state.u);
            assert_eq!(x.outcome.status, y.outcome.status);
        }
        let single = multistart(&q, 1, &cfg, uniform_sampler).unwrap();
        let direct = solve(&q, &single.runs[0].start, &single.runs[0].start, &cfg).unwrap();
        assert_eq!(direct.state.u, single.runs[0].outcome.state.u);
        assert!((a.rates.diverged + a.rates.zero + a.rates.nonzero - 1.0).abs() < 1e-12);
    }
}
