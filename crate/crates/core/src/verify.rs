//! Side conditions of the certificates: sign conditions on intervals, the
//! one-variable conditions along `F(1, t, t)`, and the three-variable
//! condition on `D_3(T)`.
//!
//! Every check is a maximization of a violation function over a grid followed
//! by a local golden-section refinement around the best grid point. In
//! certified mode the grid maximum is padded by a derivative bound so the
//! reported value is an upper bound for the true maximum (up to floating
//! point rounding in the evaluations themselves).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gegenbauer::GegenbauerExpansion;
use crate::poly::{horner, monomial_derivative_bounds};
use crate::threepoint::TripleCertificate;

/// Triples with `det >= -D3_TOL` count as members of `D_3(T)`.
pub const D3_TOL: f64 = 1e-12;

/// Default 1-D grid step.
pub const DEFAULT_STEP_1D: f64 = 1e-5;

/// Default grid step for `D_3(T)` sweeps.
pub const DEFAULT_STEP_3D: f64 = 1e-3;

/// Golden-section iterations per refinement.
pub const DEFAULT_REFINEMENT_DEPTH: usize = 40;

/// Violation allowance for certificates published with rounded coefficients.
pub const ROUNDED_CERTIFICATE_TOL: f64 = 5e-3;

/// A closed interval `[lo, hi]` inside `[-1, 1]`; serialized as `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 2]", into = "[f64; 2]")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

impl TryFrom<[f64; 2]> for Interval {
    type Error = Error;

    fn try_from(v: [f64; 2]) -> Result<Self> {
        Interval::new(v[0], v[1])
    }
}

impl From<Interval> for [f64; 2] {
    fn from(i: Interval) -> Self {
        [i.lo, i.hi]
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite()) || lo > hi || lo < -1.0 || hi > 1.0 {
            return Err(Error::Parameter(format!(
                "[{lo}, {hi}] is not a nonempty interval inside [-1, 1]"
            )));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn contains(&self, t: f64) -> bool {
        t >= self.lo && t <= self.hi
    }

    /// Grid nodes from `lo` to `hi` inclusive with spacing at most `step`.
    /// Returns the nodes and the actual spacing.
    pub fn grid(&self, step: f64) -> (Vec<f64>, f64) {
        let width = self.hi - self.lo;
        if width == 0.0 {
            return (vec![self.lo], 0.0);
        }
        let cells = (width / step).ceil().max(1.0) as usize;
        let h = width / cells as f64;
        let nodes = (0..=cells)
            .map(|i| if i == cells { self.hi } else { self.lo + i as f64 * h })
            .collect();
        (nodes, h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckMode {
    /// Grid plus refinement; not rigorous.
    Sampled,
    /// Grid maximum padded by a derivative bound.
    Certified,
}

impl std::str::FromStr for CheckMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sampled" => Ok(CheckMode::Sampled),
            "certified" | "lipschitz-certified" => Ok(CheckMode::Certified),
            other => Err(Error::Parameter(format!(
                "unknown check mode {other:?}; expected sampled or certified"
            ))),
        }
    }
}

impl CheckMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            CheckMode::Sampled => "sampled",
            CheckMode::Certified => "certified",
        }
    }
}

/// Domain `T` together with grid resolution and mode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub domain: Interval,
    pub grid_step: f64,
    pub refinement_depth: usize,
    pub mode: CheckMode,
}

impl DomainSpec {
    /// `T = [lo, hi]` with `hi < 1`; 1-D defaults.
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        let domain = Interval::new(lo, hi)?;
        if hi >= 1.0 {
            return Err(Error::Parameter(format!(
                "T must lie in [-1, 1), got upper end {hi}"
            )));
        }
        Ok(Self {
            domain,
            grid_step: DEFAULT_STEP_1D,
            refinement_depth: DEFAULT_REFINEMENT_DEPTH,
            mode: CheckMode::Sampled,
        })
    }

    pub fn with_grid_step(mut self, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::Parameter(format!("grid step must be positive, got {step}")));
        }
        self.grid_step = step;
        Ok(self)
    }

    pub fn with_mode(mut self, mode: CheckMode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_refinement_depth(mut self, depth: usize) -> Self {
        self.refinement_depth = depth;
        self
    }
}

/// Outcome of one condition check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViolationReport {
    pub condition: String,
    pub mode: String,
    /// Sampled mode: the best value found. Certified mode: an upper bound on
    /// the maximum of the violation function.
    pub worst_violation: f64,
    /// Location of the best sampled value.
    pub location: Vec<f64>,
    pub grid_step: f64,
    pub certified: bool,
    /// Best value actually evaluated (grid plus refinement).
    pub sampled_max: f64,
    /// Padding added in certified mode.
    pub lipschitz_pad: f64,
}

impl ViolationReport {
    pub fn passes(&self, tol: f64) -> bool {
        self.worst_violation <= tol
    }
}

/// `1 + 2tuv - t^2 - u^2 - v^2`, the determinant of the Gram matrix of three
/// unit vectors with pairwise products `t, u, v`.
pub fn gram_det(t: f64, u: f64, v: f64) -> f64 {
    1.0 + 2.0 * t * u * v - t * t - u * u - v * v
}

/// Membership in `D_3(T)`, with boundary slack [`D3_TOL`] on the determinant.
pub fn in_d3(t: f64, u: f64, v: f64, domain: Interval) -> bool {
    domain.contains(t) && domain.contains(u) && domain.contains(v) && gram_det(t, u, v) >= -D3_TOL
}

/// Larger value wins; ties go to the lexicographically smaller location.
fn better(a: (f64, Vec<f64>), b: (f64, Vec<f64>)) -> (f64, Vec<f64>) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            let ord = a
                .1
                .iter()
                .zip(&b.1)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal);
            if ord.is_le() {
                a
            } else {
                b
            }
        }
    }
}

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Golden-section maximization of `f` on `[lo, hi]`; returns the best point
/// evaluated (infeasible points evaluate to `-inf`).
fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, depth: usize) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    let mut best = (f64::NEG_INFINITY, lo);
    let consider = |x: f64, fx: f64, best: &mut (f64, f64)| {
        if fx > best.0 {
            *best = (fx, x);
        }
    };
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    consider(c, fc, &mut best);
    consider(d, fd, &mut best);
    for _ in 0..depth {
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
            consider(c, fc, &mut best);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
            consider(d, fd, &mut best);
        }
    }
    best
}

/// Maximizes `phi` over `[lo, hi]`. `bounds = (sup |phi'|, sup |phi''|)`.
fn maximize_1d<F>(
    condition: &str,
    phi: F,
    interval: Interval,
    spec: &DomainSpec,
    bounds: (f64, f64),
) -> ViolationReport
where
    F: Fn(f64) -> f64 + Sync,
{
    let (nodes, h) = interval.grid(spec.grid_step);
    let (grid_max, t_star) = nodes
        .par_iter()
        .map(|&t| (phi(t), vec![t]))
        .reduce(|| (f64::NEG_INFINITY, vec![f64::INFINITY]), better);
    let t_star = t_star[0];
    let (lo, hi) = (
        (t_star - h).max(interval.lo()),
        (t_star + h).min(interval.hi()),
    );
    let (mut best, mut at) = (grid_max, t_star);
    if hi > lo {
        let (v, x) = golden_max(&phi, lo, hi, spec.refinement_depth);
        if v > best {
            best = v;
            at = x;
        }
    }
    let pad = match spec.mode {
        CheckMode::Sampled => 0.0,
        CheckMode::Certified => (bounds.0 * h / 2.0).min(bounds.1 * h * h / 8.0),
    };
    let worst = match spec.mode {
        CheckMode::Sampled => best,
        CheckMode::Certified => (grid_max + pad).max(best),
    };
    ViolationReport {
        condition: condition.to_string(),
        mode: spec.mode.as_str().to_string(),
        worst_violation: worst,
        location: vec![at],
        grid_step: h,
        certified: spec.mode == CheckMode::Certified,
        sampled_max: best,
        lipschitz_pad: pad,
    }
}

/// Maximum of `g` over `s`.
pub fn check_sign(g: &GegenbauerExpansion, s: Interval, spec: &DomainSpec) -> ViolationReport {
    maximize_1d(
        &format!("sign: g <= 0 on [{}, {}]", s.lo(), s.hi()),
        |t| g.eval_unchecked(t),
        s,
        spec,
        (g.derivative_bound(), g.second_derivative_bound()),
    )
}

/// Maximum over `t` in `T` of `F(1, t, t) - f(t)`.
pub fn check_thm22_cond1(
    f_triple: &TripleCertificate,
    f: &GegenbauerExpansion,
    spec: &DomainSpec,
) -> ViolationReport {
    let diag = f_triple.poly().restrict_one_t_t();
    let (l1, l2) = monomial_derivative_bounds(&diag);
    maximize_1d(
        "F(1,t,t) <= f(t) on T",
        |t| horner(&diag, t) - f.eval_unchecked(t),
        spec.domain,
        spec,
        (l1 + f.derivative_bound(), l2 + f.second_derivative_bound()),
    )
}

/// Maximum over `t` in `T` of `h(t) + h0 + F(1, t, t) - 2 g(t)`.
pub fn check_thm31_cond1(
    h: &GegenbauerExpansion,
    h0: f64,
    f_triple: &TripleCertificate,
    g: &GegenbauerExpansion,
    spec: &DomainSpec,
) -> ViolationReport {
    let diag = f_triple.poly().restrict_one_t_t();
    let (l1, l2) = monomial_derivative_bounds(&diag);
    maximize_1d(
        "h(t) + h0 + F(1,t,t) <= 2 g(t) on T",
        |t| h.eval_unchecked(t) + h0 + horner(&diag, t) - 2.0 * g.eval_unchecked(t),
        spec.domain,
        spec,
        (
            l1 + h.derivative_bound() + 2.0 * g.derivative_bound(),
            l2 + h.second_derivative_bound() + 2.0 * g.second_derivative_bound(),
        ),
    )
}

/// Maximum over `D_3(T)` of `F(t, u, v) - g(t) - g(u) - g(v)`.
pub fn check_cond2(
    f_triple: &TripleCertificate,
    g: &GegenbauerExpansion,
    spec: &DomainSpec,
) -> ViolationReport {
    cond2_sweep(f_triple, g, spec, true)
}

/// Flattened monomial table for fast grid evaluation.
struct Compiled {
    terms: Vec<([usize; 3], f64)>,
    powers: Vec<Vec<f64>>,
    g_at: Vec<f64>,
}

impl Compiled {
    #[inline]
    fn phi(&self, i: usize, j: usize, l: usize) -> f64 {
        let (pi, pj, pl) = (&self.powers[i], &self.powers[j], &self.powers[l]);
        let mut f = 0.0;
        for (e, c) in &self.terms {
            f += c * pi[e[0]] * pj[e[1]] * pl[e[2]];
        }
        f - self.g_at[i] - self.g_at[j] - self.g_at[l]
    }
}

pub(crate) fn cond2_sweep(
    f_triple: &TripleCertificate,
    g: &GegenbauerExpansion,
    spec: &DomainSpec,
    wedge: bool,
) -> ViolationReport {
    let poly = f_triple.poly();
    let degree = poly.degree() as usize;
    let (nodes, h) = spec.domain.grid(spec.grid_step);
    let compiled = Compiled {
        terms: poly
            .terms()
            .map(|(e, c)| ([e[0] as usize, e[1] as usize, e[2] as usize], *c))
            .collect(),
        powers: nodes
            .iter()
            .map(|&x| {
                std::iter::successors(Some(1.0), |p| Some(p * x))
                    .take(degree + 1)
                    .collect()
            })
            .collect(),
        g_at: nodes.iter().map(|&x| g.eval_unchecked(x)).collect(),
    };
    let certified = spec.mode == CheckMode::Certified;
    // grid points within half a cell of D_3 may lie outside it by up to 6h
    let loose_tol = if certified { 6.0 * h + D3_TOL } else { D3_TOL };
    let m = nodes.len();
    let empty = || {
        (
            (f64::NEG_INFINITY, vec![f64::INFINITY; 3]),
            (f64::NEG_INFINITY, vec![f64::INFINITY; 3]),
        )
    };
    let (strict, loose) = (0..m)
        .into_par_iter()
        .map(|i| {
            let mut strict = (f64::NEG_INFINITY, vec![f64::INFINITY; 3]);
            let mut loose = strict.clone();
            let j0 = if wedge { i } else { 0 };
            for j in j0..m {
                let l0 = if wedge { j } else { 0 };
                for l in l0..m {
                    let det = gram_det(nodes[i], nodes[j], nodes[l]);
                    if det < -loose_tol {
                        continue;
                    }
                    let value = compiled.phi(i, j, l);
                    if value >= loose.0 {
                        loose = better(loose, (value, vec![nodes[i], nodes[j], nodes[l]]));
                    }
                    if det >= -D3_TOL && value >= strict.0 {
                        strict = better(strict, (value, vec![nodes[i], nodes[j], nodes[l]]));
                    }
                }
            }
            (strict, loose)
        })
        .reduce(empty, |a, b| (better(a.0, b.0), better(a.1, b.1)));

    let phi = |x: [f64; 3]| -> f64 {
        if !in_d3(x[0], x[1], x[2], spec.domain) {
            return f64::NEG_INFINITY;
        }
        f_triple.eval_expanded(x[0], x[1], x[2])
            - g.eval_unchecked(x[0])
            - g.eval_unchecked(x[1])
            - g.eval_unchecked(x[2])
    };
    let (mut best, mut at) = (strict.0, strict.1.clone());
    if best.is_finite() && h > 0.0 {
        let mut x = [at[0], at[1], at[2]];
        let centre = x;
        for _ in 0..3 {
            for axis in 0..3 {
                let lo = (centre[axis] - h).max(spec.domain.lo());
                let hi = (centre[axis] + h).min(spec.domain.hi());
                let (v, xa) = golden_max(
                    |s| {
                        let mut y = x;
                        y[axis] = s;
                        phi(y)
                    },
                    lo,
                    hi,
                    spec.refinement_depth,
                );
                if v > best {
                    best = v;
                    x[axis] = xa;
                    at = x.to_vec();
                }
            }
        }
    }
    let pad = if certified {
        let partial = poly.partial_bounds();
        let lg = g.derivative_bound();
        partial.iter().map(|p| p + lg).sum::<f64>() * h / 2.0
    } else {
        0.0
    };
    let worst = if certified {
        (loose.0 + pad).max(best)
    } else {
        best
    };
    ViolationReport {
        condition: "F(t,u,v) <= g(t) + g(u) + g(v) on D3(T)".to_string(),
        mode: spec.mode.as_str().to_string(),
        worst_violation: worst,
        location: at,
        grid_step: h,
        certified,
        sampled_max: best,
        lipschitz_pad: pad,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::TriPoly;
    use crate::threepoint::Term;
    use proptest::prelude::*;

    fn lin() -> TripleCertificate {
        TripleCertificate::explicit(
            &[
                Term { i: 1, j: 0, k: 0, a: 1.0 },
                Term { i: 0, j: 1, k: 0, a: 1.0 },
                Term { i: 0, j: 0, k: 1, a: 1.0 },
            ],
            0.0,
        )
    }

    fn kissing_t() -> DomainSpec {
        DomainSpec::new(-1.0, 0.5).unwrap()
    }

    #[test]
    fn d3_membership_examples() {
        let t = Interval::new(-1.0, 0.5).unwrap();
        assert!(in_d3(0.0, 0.0, 0.0, t));
        assert_eq!(gram_det(0.0, 0.0, 0.0), 1.0);
        assert!(in_d3(-0.5, -0.5, -0.5, t));
        assert!(gram_det(-0.5, -0.5, -0.5).abs() < 1e-15);
        assert!(!in_d3(-1.0, -1.0, -0.5, t));
        // 1 + 2(-1)(-1)(-1/2) - 1 - 1 - 1/4
        assert!((gram_det(-1.0, -1.0, -0.5) + 2.25).abs() < 1e-15);
        assert!(!in_d3(0.6, 0.0, 0.0, t));
    }

    #[test]
    fn domain_spec_validation() {
        assert!(DomainSpec::new(-1.0, 1.0).is_err());
        assert!(DomainSpec::new(0.2, 0.1).is_err());
        assert!(kissing_t().with_grid_step(0.0).is_err());
        assert!(Interval::new(-1.5, 0.0).is_err());
        assert_eq!("certified".parse::<CheckMode>().unwrap(), CheckMode::Certified);
        assert!("exact".parse::<CheckMode>().is_err());
        let (nodes, h) = Interval::new(-1.0, 0.5).unwrap().grid(0.4);
        assert_eq!(nodes.len(), 5);
        assert_eq!(*nodes.last().unwrap(), 0.5);
        assert!((h - 0.375).abs() < 1e-15);
    }

    #[test]
    fn sign_check_examples() {
        let g1 = GegenbauerExpansion::basis(4, 1).unwrap();
        let r = check_sign(&g1, Interval::new(0.0, 0.5).unwrap(), &kissing_t());
        assert_eq!(r.worst_violation, 0.5);
        assert_eq!(r.location, vec![0.5]);
        assert!(!r.certified);
        let spec = kissing_t().with_mode(CheckMode::Certified);
        let r = check_sign(&g1, Interval::new(0.0, 0.5).unwrap(), &spec);
        assert!(r.certified);
        // linear: second-order pad vanishes
        assert_eq!(r.worst_violation, 0.5);
    }

    #[test]
    fn certified_bound_dominates_true_maximum() {
        // max of G_6 on [-0.9, 0.9] located between coarse grid nodes
        let g = GegenbauerExpansion::basis(4, 6).unwrap();
        let s = Interval::new(-0.9, 0.9).unwrap();
        let fine = check_sign(&g, s, &kissing_t().with_grid_step(1e-6).unwrap());
        for step in [0.05, 0.02, 0.01] {
            let spec = kissing_t().with_grid_step(step).unwrap().with_mode(CheckMode::Certified);
            let r = check_sign(&g, s, &spec);
            assert!(r.worst_violation >= fine.sampled_max - 1e-12);
            // refinement recovers the maximum even on a coarse grid
            let sampled = check_sign(&g, s, &spec.with_mode(CheckMode::Sampled));
            assert!((sampled.sampled_max - fine.sampled_max).abs() < 1e-9);
        }
    }

    #[test]
    fn cond1_examples() {
        let zero_f = TripleCertificate::from_poly(&TriPoly::zero(), 0.0);
        let zero = GegenbauerExpansion::zero(4).unwrap();
        let spec = kissing_t().with_grid_step(1e-3).unwrap();
        assert_eq!(check_thm22_cond1(&zero_f, &zero, &spec).worst_violation, 0.0);

        // F(1, t, t) = 1 + 2t = f(t)
        let f = GegenbauerExpansion::new(4, vec![1.0, 2.0]).unwrap();
        assert!(check_thm22_cond1(&lin(), &f, &spec).worst_violation.abs() < 1e-14);

        // F = tuv: F(1, t, t) - 1 = t^2 - 1, largest at t = -1
        let tuv = TripleCertificate::from_poly(&TriPoly::monomial([1, 1, 1], 1.0), 0.0);
        let one = GegenbauerExpansion::constant(4, 1.0).unwrap();
        let r = check_thm22_cond1(&tuv, &one, &spec);
        let oracle = (0..=1500)
            .map(|i| -1.0 + i as f64 * 1e-3)
            .map(|t: f64| t * t - 1.0)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(oracle, 0.0);
        assert!((r.worst_violation - oracle).abs() < 1e-12);
        assert_eq!(r.location, vec![-1.0]);

        assert_eq!(check_thm31_cond1(&zero, 0.0, &zero_f, &zero, &spec).worst_violation, 0.0);
        let r = check_thm31_cond1(&zero, 0.0, &zero_f, &one, &spec);
        assert_eq!(r.worst_violation, -2.0);
    }

    #[test]
    fn thm31_cond1_on_constructed_certificate() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let spec = kissing_t().with_grid_step(1e-4).unwrap();
        for _ in 0..5 {
            let h = GegenbauerExpansion::new(4, (0..5).map(|_| rng.random_range(-1.0..1.0)).collect()).unwrap();
            let h0 = rng.random_range(-1.0..1.0);
            let f = TripleCertificate::from_poly(
                &(&TriPoly::monomial([1, 1, 0], rng.random_range(-1.0..1.0))
                    + &TriPoly::constant(rng.random_range(-1.0..1.0))),
                0.0,
            );
            // g chosen so that 2g - h - h0 - F(1,t,t) = 1 + t^2 > 0 ... expressed in the G basis
            let diag = f.poly().restrict_one_t_t();
            // monomials of degree <= 2 in the dimension 4 basis: t = G1, t^2 = (3 G2 + 1) / 4
            let mut mono = [0.0; 3];
            for (p, c) in diag.iter().enumerate() {
                mono[p] += c;
            }
            mono[0] += h0 + 1.0;
            mono[2] += 1.0;
            let as_g = GegenbauerExpansion::new(
                4,
                vec![mono[0] + mono[2] / 4.0, mono[1], 3.0 * mono[2] / 4.0],
            )
            .unwrap();
            let g = h.add(&as_g).unwrap().scaled(0.5);
            let r = check_thm31_cond1(&h, h0, &f, &g, &spec);
            assert!(r.worst_violation <= 1e-9, "{}", r.worst_violation);
            assert!((r.worst_violation + 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cond2_examples() {
        let spec = kissing_t().with_grid_step(0.05).unwrap();
        let zero_f = TripleCertificate::from_poly(&TriPoly::zero(), 0.0);
        let zero = GegenbauerExpansion::zero(4).unwrap();
        assert_eq!(check_cond2(&zero_f, &zero, &spec).worst_violation, 0.0);
        let c = 0.7;
        let three_c = TripleCertificate::from_poly(&TriPoly::constant(3.0 * c), 0.0);
        let gc = GegenbauerExpansion::constant(4, c).unwrap();
        assert!(check_cond2(&three_c, &gc, &spec).worst_violation.abs() < 1e-14);
        let g1 = GegenbauerExpansion::basis(4, 1).unwrap();
        let r = check_cond2(&lin(), &g1, &spec);
        assert!(r.worst_violation.abs() < 1e-14);
        let r = check_cond2(&lin(), &g1, &spec.with_mode(CheckMode::Certified));
        assert!(r.worst_violation >= 0.0 && r.lipschitz_pad > 0.0);
    }

    #[test]
    fn wedge_reduction_matches_full_grid() {
        let f = TripleCertificate::from_poly(
            &(&TriPoly::monomial([2, 1, 0], 1.3) + &TriPoly::monomial([1, 1, 1], -0.4)),
            0.0,
        );
        let g = GegenbauerExpansion::new(4, vec![0.1, -0.3, 0.2]).unwrap();
        for mode in [CheckMode::Sampled, CheckMode::Certified] {
            let spec = kissing_t().with_grid_step(0.04).unwrap().with_mode(mode);
            let a = cond2_sweep(&f, &g, &spec, true);
            let b = cond2_sweep(&f, &g, &spec, false);
            assert!((a.worst_violation - b.worst_violation).abs() < 1e-12);
        }
    }

    #[test]
    fn halving_the_grid_is_consistent_with_the_pad() {
        let f = TripleCertificate::from_poly(
            &(&TriPoly::monomial([2, 0, 0], 0.8) + &TriPoly::monomial([1, 1, 0], -0.5)),
            0.0,
        );
        let g = GegenbauerExpansion::new(4, vec![0.0, 0.2, 0.4]).unwrap();
        let mut step = 0.1;
        let mut prev = check_cond2(&f, &g, &kissing_t().with_grid_step(step).unwrap().with_mode(CheckMode::Certified));
        for _ in 0..3 {
            step /= 2.0;
            let next = check_cond2(&f, &g, &kissing_t().with_grid_step(step).unwrap().with_mode(CheckMode::Certified));
            assert!(next.sampled_max >= prev.sampled_max - prev.lipschitz_pad);
            assert!(prev.worst_violation >= next.sampled_max - 1e-12);
            prev = next;
        }
    }

    proptest! {
        #[test]
        fn d3_is_permutation_invariant(t in -1.0f64..=1.0, u in -1.0f64..=1.0, v in -1.0f64..=1.0) {
            let dom = Interval::new(-1.0, 0.5).unwrap();
            let base = in_d3(t, u, v, dom);
            let x = [t, u, v];
            for p in crate::poly::PERMUTATIONS {
                prop_assert_eq!(in_d3(x[p[0]], x[p[1]], x[p[2]], dom), base);
            }
        }

        #[test]
        fn coplanar_triples_sit_on_the_boundary(a in 0.0f64..6.3, b in 0.0f64..6.3, c in 0.0f64..6.3,
                                                tilt in -1.5f64..1.5, spin in 0.0f64..6.3) {
            // three points on a great circle of S^2 (rotated) have a singular Gram matrix
            let on_circle = |angle: f64| {
                let p = [angle.cos(), angle.sin(), 0.0];
                let (ct, st) = (tilt.cos(), tilt.sin());
                let q = [p[0], p[1] * ct - p[2] * st, p[1] * st + p[2] * ct];
                let (cs, ss) = (spin.cos(), spin.sin());
                [q[0] * cs - q[2] * ss, q[1], q[0] * ss + q[2] * cs]
            };
            let (x, y, z) = (on_circle(a), on_circle(b), on_circle(c));
            let dot = |p: [f64; 3], q: [f64; 3]| (p[0] * q[0] + p[1] * q[1] + p[2] * q[2]).clamp(-1.0, 1.0);
            let (t, u, v) = (dot(x, y), dot(x, z), dot(y, z));
            prop_assert!(gram_det(t, u, v).abs() < 1e-12);
            prop_assert!(in_d3(t, u, v, Interval::new(-1.0, 1.0).unwrap()));
        }
    }
}
