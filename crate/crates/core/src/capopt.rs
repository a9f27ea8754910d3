//! Cap configurations: maximize `sum_j g(e_1 . y_j)` over `m` unit vectors
//! in the cap `e_1 . y <= t_0` with pairwise inner products at most `1/2`,
//! and the kissing-number comparison built on it.
//!
//! The maximum is found by multistart projected gradient ascent. Pairwise
//! constraints enter through a quadratic penalty whose weight is ramped up,
//! followed by a polish that pushes violating pairs apart. The result is a
//! lower estimate of the true maximum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::bounds::distribution_bound;
use crate::error::{Error, Result};
use crate::gegenbauer::GegenbauerExpansion;
use crate::verify::{check_sign, CheckMode, DomainSpec, Interval, ViolationReport};

/// Constraint tolerance for returned configurations.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// Default number of multistarts.
pub const DEFAULT_STARTS: usize = 200;

/// `U` must fall this far below `B(N)` for a contradiction.
pub const DEFAULT_MARGIN: f64 = 1e-3;

const PENALTY_RAMP: [f64; 4] = [1e1, 1e2, 1e3, 1e4];
const ITERATIONS_PER_STAGE: usize = 300;
const STAGE_GAIN_TOL: f64 = 1e-14;
const POLISH_ROUNDS: usize = 50;
const POLISH_TARGET: f64 = 0.5 - 1e-12;

#[derive(Debug, Clone)]
pub struct CapProblem {
    g: GegenbauerExpansion,
    t0: f64,
    m: usize,
    mu: usize,
}

impl CapProblem {
    /// The dimension is taken from `g`.
    pub fn new(g: GegenbauerExpansion, t0: f64, m: usize, mu: usize) -> Result<Self> {
        if !(t0 > -1.0 && t0 < -0.5) {
            return Err(Error::Parameter(format!(
                "t0 must lie in (-1, -1/2), got {t0}"
            )));
        }
        if m > mu {
            return Err(Error::Precondition(format!(
                "m = {m} exceeds the cap capacity mu = {mu}"
            )));
        }
        Ok(Self { g, t0, m, mu })
    }

    pub fn dimension(&self) -> usize {
        self.g.dimension()
    }

    pub fn g(&self) -> &GegenbauerExpansion {
        &self.g
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn mu(&self) -> usize {
        self.mu
    }

    /// `sum_j g(e_1 . y_j)`.
    pub fn objective(&self, ys: &[Vec<f64>]) -> f64 {
        ys.iter().map(|y| self.g.eval_unchecked(y[0])).sum()
    }

    /// Largest constraint violation of a configuration: norm defect, cap
    /// excess and pairwise excess over `1/2`.
    pub fn violation(&self, ys: &[Vec<f64>]) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, y) in ys.iter().enumerate() {
            worst = worst.max((dot(y, y).sqrt() - 1.0).abs());
            worst = worst.max(y[0] - self.t0);
            for z in &ys[i + 1..] {
                worst = worst.max(dot(y, z) - 0.5);
            }
        }
        worst
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapResult {
    pub m: usize,
    pub value: f64,
    pub configuration: Vec<Vec<f64>>,
    /// Index of the start that produced `configuration`.
    pub best_start: Option<usize>,
    pub starts: usize,
    /// Starts whose final configuration met every constraint.
    pub feasible_starts: usize,
    pub max_violation: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn normalize(y: &mut [f64]) {
    let r = dot(y, y).sqrt();
    if r > 0.0 {
        y.iter_mut().for_each(|x| *x /= r);
    } else {
        y.iter_mut().for_each(|x| *x = 0.0);
        y[0] = -1.0;
    }
}

/// Nearest point of the cap `e_1 . y <= t0` on the sphere.
fn project(y: &mut [f64], t0: f64) {
    normalize(y);
    if y[0] <= t0 {
        return;
    }
    let r = y[1..].iter().map(|x| x * x).sum::<f64>().sqrt();
    let s = (1.0 - t0 * t0).sqrt();
    if r > 0.0 {
        for x in &mut y[1..] {
            *x *= s / r;
        }
    } else {
        y[1..].iter_mut().for_each(|x| *x = 0.0);
        y[1] = s;
    }
    y[0] = t0;
}

struct Penalized<'a> {
    p: &'a CapProblem,
    dg: GegenbauerExpansion,
    rho: f64,
}

impl Penalized<'_> {
    fn value(&self, ys: &[Vec<f64>]) -> f64 {
        let mut pen = 0.0;
        for i in 0..ys.len() {
            for j in i + 1..ys.len() {
                let e = (dot(&ys[i], &ys[j]) - 0.5).max(0.0);
                pen += e * e;
            }
        }
        self.p.objective(ys) - self.rho * pen
    }

    fn gradient(&self, ys: &[Vec<f64>]) -> Vec<Vec<f64>> {
        let mut grad: Vec<Vec<f64>> = ys.iter().map(|y| vec![0.0; y.len()]).collect();
        for (j, y) in ys.iter().enumerate() {
            grad[j][0] += self.dg.eval_unchecked(y[0].clamp(-1.0, 1.0));
        }
        for i in 0..ys.len() {
            for j in i + 1..ys.len() {
                let e = (dot(&ys[i], &ys[j]) - 0.5).max(0.0);
                if e > 0.0 {
                    let w = 2.0 * self.rho * e;
                    for a in 0..ys[i].len() {
                        grad[i][a] -= w * ys[j][a];
                        grad[j][a] -= w * ys[i][a];
                    }
                }
            }
        }
        grad
    }
}

/// Projected gradient ascent with Armijo backtracking; returns when the
/// accepted step barely moves or improves the configuration. With
/// `feasible`, trial points are also polished and must satisfy every
/// constraint.
fn ascend(obj: &Penalized<'_>, ys: &mut Vec<Vec<f64>>, feasible: bool) {
    let t0 = obj.p.t0;
    let mut step = 1.0;
    let mut fx = obj.value(ys);
    for _ in 0..ITERATIONS_PER_STAGE {
        let grad = obj.gradient(ys);
        let mut accepted = false;
        let mut tries = 0;
        while tries < 60 {
            let mut trial = ys.clone();
            for (y, g) in trial.iter_mut().zip(&grad) {
                for (x, d) in y.iter_mut().zip(g) {
                    *x += step * d;
                }
                project(y, t0);
            }
            if feasible {
                polish(&mut trial, t0);
            }
            let gain: f64 = trial
                .iter()
                .zip(ys.iter())
                .zip(&grad)
                .map(|((a, b), g)| a.iter().zip(b).zip(g).map(|((x, y), d)| (x - y) * d).sum::<f64>())
                .sum();
            let ft = obj.value(&trial);
            let admissible = !feasible || obj.p.violation(&trial) <= FEASIBILITY_TOL;
            if admissible && ft >= fx + 1e-4 * gain && ft >= fx {
                let moved = trial
                    .iter()
                    .zip(ys.iter())
                    .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
                    .fold(0.0, f64::max);
                let gained = ft - fx;
                *ys = trial;
                fx = ft;
                accepted = true;
                step *= 2.0;
                if moved < 1e-12 || gained < STAGE_GAIN_TOL {
                    return;
                }
                break;
            }
            step *= 0.5;
            tries += 1;
        }
        if !accepted {
            return;
        }
    }
}

/// Rotates each pair with `y_i . y_j > 1/2` apart within its span until the
/// product is just below `1/2`, then returns the pair to the cap.
fn polish(ys: &mut [Vec<f64>], t0: f64) {
    for _ in 0..POLISH_ROUNDS {
        let mut changed = false;
        for i in 0..ys.len() {
            for j in i + 1..ys.len() {
                let c = dot(&ys[i], &ys[j]);
                if c <= POLISH_TARGET {
                    continue;
                }
                changed = true;
                let mid: Vec<f64> = ys[i].iter().zip(&ys[j]).map(|(a, b)| a + b).collect();
                let diff: Vec<f64> = ys[i].iter().zip(&ys[j]).map(|(a, b)| a - b).collect();
                let (mut m, mut d) = (mid, diff);
                normalize(&mut m);
                if dot(&d, &d) == 0.0 {
                    d = vec![0.0; m.len()];
                    d[m.len() - 1] = 1.0;
                    let k = dot(&d, &m);
                    d.iter_mut().zip(&m).for_each(|(x, y)| *x -= k * y);
                }
                normalize(&mut d);
                // Half-angle of a pair with product POLISH_TARGET.
                let half = POLISH_TARGET.acos() / 2.0 + 1e-12;
                let (ch, sh) = (half.cos(), half.sin());
                for a in 0..m.len() {
                    ys[i][a] = ch * m[a] + sh * d[a];
                    ys[j][a] = ch * m[a] - sh * d[a];
                }
                project(&mut ys[i], t0);
                project(&mut ys[j], t0);
            }
        }
        if !changed {
            break;
        }
    }
}

/// A uniform point of the cap, by rejection from the sphere.
fn sample_cap(rng: &mut ChaCha8Rng, n: usize, t0: f64) -> Vec<f64> {
    loop {
        let mut y: Vec<f64> = (0..n).map(|_| StandardNormal.sample(rng)).collect();
        normalize(&mut y);
        if y[0] <= t0 {
            return y;
        }
    }
}

fn start_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn run_start(p: &CapProblem, dg: &GegenbauerExpansion, seed: u64, index: usize) -> Vec<Vec<f64>> {
    let mut rng = start_rng(seed, index);
    let mut ys: Vec<Vec<f64>> = (0..p.m)
        .map(|_| sample_cap(&mut rng, p.dimension(), p.t0))
        .collect();
    for rho in PENALTY_RAMP {
        let obj = Penalized {
            p,
            dg: dg.clone(),
            rho,
        };
        ascend(&obj, &mut ys, false);
    }
    polish(&mut ys, p.t0);
    let obj = Penalized {
        p,
        dg: dg.clone(),
        rho: 0.0,
    };
    ascend(&obj, &mut ys, true);
    ys
}

/// Best configuration found over `starts` seeded multistarts. Deterministic
/// for fixed `(p, starts, seed)`; ties go to the lowest start index.
pub fn cap_max(p: &CapProblem, starts: usize, seed: u64) -> Result<CapResult> {
    if p.m == 0 {
        return Ok(CapResult {
            m: 0,
            value: 0.0,
            configuration: Vec::new(),
            best_start: None,
            starts,
            feasible_starts: starts,
            max_violation: 0.0,
        });
    }
    if starts == 0 {
        return Err(Error::Parameter("need at least one start".into()));
    }
    let dg = p.g.derivative();
    let runs: Vec<(f64, f64, Vec<Vec<f64>>)> = (0..starts)
        .into_par_iter()
        .map(|i| {
            let ys = run_start(p, &dg, seed, i);
            (p.objective(&ys), p.violation(&ys), ys)
        })
        .collect();
    let feasible_starts = runs.iter().filter(|r| r.1 <= FEASIBILITY_TOL).count();
    let mut best: Option<usize> = None;
    for (i, r) in runs.iter().enumerate() {
        if r.1 > FEASIBILITY_TOL {
            continue;
        }
        if best.is_none_or(|b| r.0 > runs[b].0) {
            best = Some(i);
        }
    }
    let Some(b) = best else {
        return Err(Error::Precondition(format!(
            "no start produced a feasible {}-point configuration",
            p.m
        )));
    };
    let (value, violation, configuration) = runs[b].clone();
    Ok(CapResult {
        m: p.m,
        value,
        configuration,
        best_start: Some(b),
        starts,
        feasible_starts,
        max_violation: violation.max(0.0),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Contradiction,
    Inconclusive,
}

/// Settings of [`kissing_check_with`] beyond the problem data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KissingOptions {
    pub starts: usize,
    pub seed: u64,
    pub margin: f64,
    /// Allowed value of `max g` on `[t0, 1/2]`.
    pub sign_tol: f64,
    pub sign_grid_step: f64,
}

impl Default for KissingOptions {
    fn default() -> Self {
        Self {
            starts: DEFAULT_STARTS,
            seed: 0,
            margin: DEFAULT_MARGIN,
            sign_tol: crate::verify::ROUNDED_CERTIFICATE_TOL,
            sign_grid_step: crate::verify::DEFAULT_STEP_1D,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KissingReport {
    pub verdict: Verdict,
    pub dimension: usize,
    pub n_points: usize,
    pub t0: f64,
    pub mu: usize,
    pub m_constant: f64,
    /// `B(N) = (N - M) / (3N)`.
    pub bound: f64,
    /// `U`, the largest cap maximum found.
    pub upper_estimate: f64,
    pub argmax_m: usize,
    pub margin: f64,
    pub cap_maxima: Vec<CapResult>,
    pub sign_check: ViolationReport,
    pub objective: String,
    pub caveat: String,
}

/// [`kissing_check_with`] with default margin and sign tolerance.
pub fn kissing_check(
    g: &GegenbauerExpansion,
    m_constant: f64,
    t0: f64,
    mu: usize,
    n_points: usize,
    starts: usize,
    seed: u64,
) -> Result<KissingReport> {
    let opts = KissingOptions {
        starts,
        seed,
        ..KissingOptions::default()
    };
    kissing_check_with(g, m_constant, t0, mu, n_points, &opts)
}

/// Compares `U = max_{m <= mu} cap_max(m)` with `B(N)`. Refuses to run unless
/// `g <= sign_tol` on `[t0, 1/2]` in certified mode.
pub fn kissing_check_with(
    g: &GegenbauerExpansion,
    m_constant: f64,
    t0: f64,
    mu: usize,
    n_points: usize,
    opts: &KissingOptions,
) -> Result<KissingReport> {
    CapProblem::new(g.clone(), t0, 0, mu)?;
    let spec = DomainSpec::new(t0, 0.5)?
        .with_grid_step(opts.sign_grid_step)?
        .with_mode(CheckMode::Certified);
    let sign = check_sign(g, Interval::new(t0, 0.5)?, &spec);
    if !sign.passes(opts.sign_tol) {
        return Err(Error::Precondition(format!(
            "g is not <= {} on [{t0}, 0.5]: certified maximum {} at t = {}",
            opts.sign_tol, sign.worst_violation, sign.location[0]
        )));
    }
    let bound = distribution_bound(m_constant, n_points)?;
    let cap_maxima = (0..=mu)
        .map(|m| cap_max(&CapProblem::new(g.clone(), t0, m, mu)?, opts.starts, opts.seed))
        .collect::<Result<Vec<_>>>()?;
    let (argmax_m, upper) = cap_maxima
        .iter()
        .map(|r| (r.m, r.value))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let verdict = if upper < bound - opts.margin {
        Verdict::Contradiction
    } else {
        Verdict::Inconclusive
    };
    Ok(KissingReport {
        verdict,
        dimension: g.dimension(),
        n_points,
        t0,
        mu,
        m_constant,
        bound,
        upper_estimate: upper,
        argmax_m,
        margin: opts.margin,
        cap_maxima,
        sign_check: sign,
        objective: format!(
            "max of sum_j g(e1 . y_j) over m <= {mu} unit vectors with e1 . y_j <= {t0} \
             and y_i . y_j <= 1/2; points outside the cap contribute g <= 0"
        ),
        caveat: format!(
            "cap maxima come from {} seeded multistarts (seed {}) and are heuristic; \
             CONTRADICTION requires U < B(N) - {} and is as rigorous as the claim that \
             the multistart maximum is the true maximum",
            opts.starts, opts.seed, opts.margin
        ),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g1() -> GegenbauerExpansion {
        GegenbauerExpansion::new(
            4,
            vec![
                -0.5438, -2.0024, -3.8887, -5.6414, -6.7025, -6.8508, -6.0698, -4.6566, -3.0047,
                -1.4686, -0.3226, 0.3704, 0.6521, 0.6486, 0.5104, 0.3361, 0.1911, 0.0963, 0.0411,
                0.0157, 0.0056, 0.001, 0.0004,
            ],
        )
        .unwrap()
    }

    fn t0() -> f64 {
        -std::f64::consts::FRAC_1_SQRT_2
    }

    #[test]
    fn rejects_bad_problems() {
        assert!(matches!(
            CapProblem::new(g1(), t0(), 5, 4),
            Err(Error::Precondition(_))
        ));
        assert!(CapProblem::new(g1(), -0.4, 1, 4).is_err());
        assert!(CapProblem::new(g1(), -0.6058, 6, 6).is_ok());
    }

    #[test]
    fn empty_configuration_is_zero() {
        let r = cap_max(&CapProblem::new(g1(), t0(), 0, 4).unwrap(), 10, 1).unwrap();
        assert_eq!(r.value, 0.0);
        assert!(r.configuration.is_empty());
    }

    #[test]
    fn single_point_matches_grid_oracle() {
        let g = g1();
        let steps = 200_000;
        let oracle = (0..=steps)
            .map(|i| g.eval_unchecked(-1.0 + (t0() + 1.0) * i as f64 / steps as f64))
            .fold(f64::NEG_INFINITY, f64::max);
        let r = cap_max(&CapProblem::new(g, t0(), 1, 4).unwrap(), DEFAULT_STARTS, 7).unwrap();
        assert!((r.value - oracle).abs() < 1e-6, "{} vs {oracle}", r.value);
    }

    #[test]
    fn configurations_are_feasible_and_deterministic() {
        for m in 2..=4 {
            let p = CapProblem::new(g1(), t0(), m, 4).unwrap();
            let a = cap_max(&p, 16, 11).unwrap();
            let b = cap_max(&p, 16, 11).unwrap();
            assert_eq!(a.value.to_bits(), b.value.to_bits());
            assert_eq!(a.configuration, b.configuration);
            assert!(p.violation(&a.configuration) <= FEASIBILITY_TOL);
        }
    }

    #[test]
    fn projection_lands_on_the_cap_boundary() {
        let mut y = vec![0.3, 0.4, 0.0, 0.0];
        project(&mut y, -0.8);
        assert!((y[0] + 0.8).abs() < 1e-15);
        assert!((dot(&y, &y) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn large_m_constant_is_inconclusive() {
        let r = kissing_check(&g1(), 30.0, t0(), 1, 25, 4, 0).unwrap();
        assert!(r.bound <= 0.0);
        assert_eq!(r.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn sign_failure_refuses_to_run() {
        let g = GegenbauerExpansion::constant(4, 1.0).unwrap();
        assert!(matches!(
            kissing_check(&g, 22.0, t0(), 4, 25, 4, 0),
            Err(Error::Precondition(_))
        ));
    }
}
