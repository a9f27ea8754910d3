use std::path::Path;

use clap::Args;
use serde_json::{json, Value};

use spherebound::bounds::{compare_bounds, DdBody, DdCertificate, Stronger};
use spherebound::capopt::{kissing_check_with, KissingOptions, Verdict, DEFAULT_MARGIN, DEFAULT_STARTS};
use spherebound::codes::{distance_distribution, DEFAULT_CLUSTER_TOL};
use spherebound::threepoint::{certificate_valid, TripleCertificate, PSD_TOL};
use spherebound::verify::{
    check_cond2, check_sign, check_thm31_cond1, CheckMode, DomainSpec, ViolationReport,
    DEFAULT_STEP_1D, DEFAULT_STEP_3D, ROUNDED_CERTIFICATE_TOL,
};
use spherebound::{Error, GegenbauerExpansion, SphericalCode};

use crate::manifest::RunManifest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("{context}: {source}")]
    Core { context: String, source: Error },
    #[error("certificate rejected: {0}")]
    Certificate(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Certificate(_) => 3,
            _ => 2,
        }
    }
}

fn core(context: &str) -> impl FnOnce(Error) -> CliError + '_ {
    move |source| CliError::Core {
        context: context.to_string(),
        source,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    Contradiction,
    Inconclusive,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Contradiction => "contradiction",
            Status::Inconclusive => "inconclusive",
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            Status::Pass | Status::Inconclusive => 0,
            Status::Fail => 3,
            Status::Contradiction => 4,
        }
    }
}

pub struct Outcome {
    pub manifest: RunManifest,
    pub status: Status,
    pub report: Value,
    pub summary: Vec<String>,
}

fn read(path: &str) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_string(),
        source: e,
    })
}

fn parse_pair(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected a,b but got {s:?}"))?;
    let parse = |x: &str| {
        x.trim()
            .parse::<f64>()
            .map_err(|e| format!("{x:?} is not a number: {e}"))
    };
    let (a, b) = (parse(a)?, parse(b)?);
    if a > b {
        return Err(format!("interval [{a}, {b}] is empty"));
    }
    Ok((a, b))
}

fn parse_mode(s: &str) -> Result<CheckMode, String> {
    s.parse::<CheckMode>().map_err(|e| e.to_string())
}

#[derive(Args, Debug)]
pub struct EvalArgs {
    /// Expansion JSON: {"n": ..., "coeffs": [...]}.
    pub expansion: String,
    /// Points in [-1, 1].
    pub t: Vec<f64>,
    /// Also write a dense sampling of [-1, 1] as CSV.
    #[arg(long)]
    pub csv: Option<String>,
    /// Number of CSV sample points.
    #[arg(long, default_value_t = 2001)]
    pub samples: usize,
}

pub fn eval(a: &EvalArgs) -> Result<Outcome, CliError> {
    let g = GegenbauerExpansion::from_json(&read(&a.expansion)?).map_err(core(&a.expansion))?;
    let mut values = Vec::with_capacity(a.t.len());
    let mut summary = Vec::new();
    for &t in &a.t {
        let v = g.eval(t).map_err(core("evaluation point"))?;
        summary.push(format!("g({t}) = {v}"));
        values.push(json!({"t": t, "value": v}));
    }
    if let Some(path) = &a.csv {
        if a.samples < 2 {
            return Err(CliError::Core {
                context: "--samples".into(),
                source: Error::Parameter("need at least 2 samples".into()),
            });
        }
        let mut out = String::from("t,value\n");
        for i in 0..a.samples {
            let t = -1.0 + 2.0 * i as f64 / (a.samples - 1) as f64;
            out.push_str(&format!("{t},{}\n", g.eval_unchecked(t)));
        }
        std::fs::write(path, out).map_err(|e| CliError::Io {
            path: path.clone(),
            source: e,
        })?;
        summary.push(format!("wrote {} samples to {path}", a.samples));
    }
    let mut manifest = RunManifest::new("eval")
        .input(&a.expansion)
        .param("t", &a.t);
    if let Some(path) = &a.csv {
        manifest = manifest.param("csv", path).param("samples", a.samples);
    }
    Ok(Outcome {
        manifest,
        status: Status::Pass,
        report: json!({
            "dimension": g.dimension(),
            "degree": g.degree(),
            "values": values,
            "value_at_one": g.value_at_one(),
        }),
        summary,
    })
}

#[derive(Args, Debug)]
pub struct CodeStatsArgs {
    /// Code JSON file, or a built-in name: 24cell, simplex<n>, cross<n>.
    pub code: String,
    /// Report moments M_0..M_degree.
    #[arg(long, default_value_t = 6)]
    pub degree: usize,
    /// Interval a,b for an interval mass A([a, b]); repeatable.
    #[arg(long = "interval", value_parser = parse_pair, allow_hyphen_values = true)]
    pub intervals: Vec<(f64, f64)>,
    /// Clustering tolerance for inner products.
    #[arg(long, default_value_t = DEFAULT_CLUSTER_TOL)]
    pub tol: f64,
}

fn load_code(spec: &str) -> Result<SphericalCode, CliError> {
    if Path::new(spec).exists() {
        SphericalCode::from_json(&read(spec)?).map_err(core(spec))
    } else {
        SphericalCode::builtin(spec).map_err(core(spec))
    }
}

pub fn code_stats(a: &CodeStatsArgs) -> Result<Outcome, CliError> {
    let c = load_code(&a.code)?;
    let dd = distance_distribution(&c, a.tol).map_err(core("distance distribution"))?;
    let distribution: Vec<Value> = match dd.exact() {
        Some(exact) => exact
            .iter()
            .zip(dd.entries())
            .map(|((t, m), e)| json!({"t": e.t, "mass": e.mass, "t_exact": t.to_string(), "mass_exact": m.to_string()}))
            .collect(),
        None => dd
            .entries()
            .iter()
            .map(|e| json!({"t": e.t, "mass": e.mass}))
            .collect(),
    };
    let moments: Vec<f64> = (0..=a.degree).map(|k| c.moment(k)).collect();
    let masses: Vec<Value> = a
        .intervals
        .iter()
        .map(|&(lo, hi)| json!({"interval": [lo, hi], "mass": dd.interval_mass(lo, hi)}))
        .collect();
    let mut summary = vec![
        format!("N = {}, n = {}", c.len(), c.dimension()),
        format!("I(C) = {:?}", dd.inner_products()),
    ];
    for e in dd.entries() {
        summary.push(format!("A_{} = {}", e.t, e.mass));
    }
    for &(lo, hi) in &a.intervals {
        summary.push(format!("A([{lo}, {hi}]) = {}", dd.interval_mass(lo, hi)));
    }
    Ok(Outcome {
        manifest: RunManifest::new("code-stats")
            .input(&a.code)
            .param("degree", a.degree)
            .param("intervals", &a.intervals)
            .param("tol", a.tol),
        status: Status::Pass,
        report: json!({
            "N": c.len(),
            "n": c.dimension(),
            "inner_products": dd.inner_products(),
            "distribution": distribution,
            "moments": moments,
            "interval_masses": masses,
        }),
        summary,
    })
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Certificate JSON: a distance-distribution certificate or a triple certificate.
    pub cert: String,
    /// Grid step for one-variable checks.
    #[arg(long, default_value_t = DEFAULT_STEP_1D)]
    pub grid_step: f64,
    /// Grid step for the check over D_3(T).
    #[arg(long, default_value_t = DEFAULT_STEP_3D)]
    pub grid_step_3d: f64,
    /// Largest accepted violation.
    #[arg(long, default_value_t = ROUNDED_CERTIFICATE_TOL)]
    pub tol: f64,
    /// sampled, certified (lipschitz-certified).
    #[arg(long, value_parser = parse_mode, default_value = "certified")]
    pub mode: CheckMode,
}

fn condition_json(r: &ViolationReport, tol: f64) -> Value {
    json!({"kind": "condition", "passes": r.passes(tol), "result": r})
}

type Checks = Vec<(String, Value, bool)>;

fn psd_checks(f: &TripleCertificate, checks: &mut Checks, notes: &mut Vec<String>) -> Result<(), CliError> {
    match certificate_valid(f, PSD_TOL) {
        Ok(report) => {
            for (label, r) in report.checks {
                let ok = r.psd;
                checks.push((format!("psd {label}"), json!({"kind": "psd", "passes": ok, "result": r}), ok));
            }
            Ok(())
        }
        Err(Error::Capability(msg)) => {
            notes.push(msg);
            Ok(())
        }
        Err(e) => Err(core("PSD check")(e)),
    }
}

pub fn verify_cert(a: &VerifyArgs) -> Result<Outcome, CliError> {
    let text = read(&a.cert)?;
    let value: Value = serde_json::from_str(&text).map_err(|e| core(&a.cert)(e.into()))?;
    let obj = value.as_object().filter(|o| !o.is_empty()).ok_or_else(|| {
        core(&a.cert)(Error::Schema("certificate must be a non-empty JSON object".into()))
    })?;
    let spec_1d = |lo: f64, hi: f64| -> Result<DomainSpec, CliError> {
        Ok(DomainSpec::new(lo, hi)
            .and_then(|s| s.with_grid_step(a.grid_step))
            .map_err(core("--grid-step"))?
            .with_mode(a.mode))
    };
    let mut checks: Checks = Vec::new();
    let mut notes: Vec<String> = Vec::new();
    let kind;
    if obj.contains_key("g") {
        kind = "distance-distribution";
        let cert = DdCertificate::from_value(value.clone()).map_err(core(&a.cert))?;
        if let Some(s) = cert.nonpositive_on {
            let r = check_sign(&cert.g, s, &spec_1d(s.lo(), s.hi().min(1.0 - f64::EPSILON))?);
            let ok = r.passes(a.tol);
            checks.push((r.condition.clone(), condition_json(&r, a.tol), ok));
        }
        match &cert.body {
            DdBody::ScalarM { m } => notes.push(format!(
                "M = {m} is taken as given; the conditions producing it are not in the file"
            )),
            DdBody::Full { h, h0, f, .. } => {
                let t = cert.domain;
                let r = check_thm31_cond1(h, *h0, f, &cert.g, &spec_1d(t.lo(), t.hi())?);
                let ok = r.passes(a.tol);
                checks.push((r.condition.clone(), condition_json(&r, a.tol), ok));
                let spec_3d = spec_1d(t.lo(), t.hi())?
                    .with_grid_step(a.grid_step_3d)
                    .map_err(core("--grid-step-3d"))?;
                let r = check_cond2(f, &cert.g, &spec_3d);
                let ok = r.passes(a.tol);
                checks.push((r.condition.clone(), condition_json(&r, a.tol), ok));
                psd_checks(f, &mut checks, &mut notes)?;
            }
        }
    } else if obj.contains_key("H") || obj.contains_key("terms") {
        kind = "triple";
        let f = TripleCertificate::from_value(value.clone()).map_err(core(&a.cert))?;
        psd_checks(&f, &mut checks, &mut notes)?;
    } else {
        return Err(core(&a.cert)(Error::Schema(
            "unknown certificate shape: expected \"g\" (distance-distribution) or \"H\"/\"terms\" (triple)".into(),
        )));
    }
    let all_pass = checks.iter().all(|c| c.2);
    let summary = checks
        .iter()
        .map(|(name, _, ok)| format!("{}: {name}", if *ok { "PASS" } else { "FAIL" }))
        .chain(notes.iter().map(|n| format!("note: {n}")))
        .collect();
    Ok(Outcome {
        manifest: RunManifest::new("verify-cert")
            .input(&a.cert)
            .param("grid_step", a.grid_step)
            .param("grid_step_3d", a.grid_step_3d)
            .param("tol", a.tol)
            .param("mode", a.mode.as_str()),
        status: if all_pass { Status::Pass } else { Status::Fail },
        report: json!({
            "certificate": kind,
            "checks": checks.iter().map(|(name, v, _)| {
                let mut v = v.clone();
                v["name"] = Value::from(name.clone());
                v
            }).collect::<Vec<_>>(),
            "notes": notes,
        }),
        summary,
    })
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// Distance-distribution certificate JSON.
    pub cert: String,
    /// Code size N.
    #[arg(long = "N")]
    pub n_points: usize,
}

pub fn bound(a: &BoundArgs) -> Result<Outcome, CliError> {
    let cert = DdCertificate::from_json(&read(&a.cert)?).map_err(core(&a.cert))?;
    let c = compare_bounds(&cert, a.n_points).map_err(core("bound"))?;
    let mut summary = vec![format!("B({}) = {:.6} (M = {})", c.n, c.sdp_bound, c.m)];
    match (c.lp_bound, &c.lp_note) {
        (Some(lp), _) => summary.push(format!("LP({}) = c_0 N - g(1) = {lp:.4}", c.n)),
        (None, Some(note)) => summary.push(note.clone()),
        (None, None) => {}
    }
    summary.push(format!(
        "stronger: {}",
        match c.stronger {
            Stronger::Sdp => "SDP",
            Stronger::Lp => "LP",
            Stronger::Equal => "equal",
        }
    ));
    Ok(Outcome {
        manifest: RunManifest::new("bound")
            .input(&a.cert)
            .param("N", a.n_points),
        status: Status::Pass,
        report: serde_json::to_value(&c).expect("serializable"),
        summary,
    })
}

#[derive(Args, Debug)]
pub struct KissingArgs {
    /// Distance-distribution certificate JSON providing g and M.
    pub cert: String,
    /// Cap boundary: the cap is e_1 . y <= t0.
    #[arg(long, default_value_t = -std::f64::consts::FRAC_1_SQRT_2)]
    pub t0: f64,
    /// Cap capacity: most points with pairwise products <= 1/2 inside the cap.
    #[arg(long, default_value_t = 4)]
    pub mu: usize,
    /// Code size N to test.
    #[arg(long = "N", default_value_t = 25)]
    pub n_points: usize,
    #[arg(long, default_value_t = DEFAULT_STARTS)]
    pub starts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Required gap between B(N) and the cap maximum.
    #[arg(long, default_value_t = DEFAULT_MARGIN)]
    pub margin: f64,
    /// Largest accepted value of g on [t0, 1/2].
    #[arg(long, default_value_t = ROUNDED_CERTIFICATE_TOL)]
    pub tol: f64,
    /// Grid step of the sign check.
    #[arg(long, default_value_t = DEFAULT_STEP_1D)]
    pub grid_step: f64,
}

pub fn kissing_check(a: &KissingArgs) -> Result<Outcome, CliError> {
    let cert = DdCertificate::from_json(&read(&a.cert)?).map_err(core(&a.cert))?;
    let opts = KissingOptions {
        starts: a.starts,
        seed: a.seed,
        margin: a.margin,
        sign_tol: a.tol,
        sign_grid_step: a.grid_step,
    };
    let r = match kissing_check_with(&cert.g, cert.m(), a.t0, a.mu, a.n_points, &opts) {
        Ok(r) => r,
        Err(Error::Precondition(msg)) if msg.starts_with("g is not") => {
            return Err(CliError::Certificate(msg))
        }
        Err(e) => return Err(core("kissing-check")(e)),
    };
    let summary = vec![
        format!(
            "cap maxima: {}",
            r.cap_maxima
                .iter()
                .map(|c| format!("m={}: {:.6}", c.m, c.value))
                .collect::<Vec<_>>()
                .join(", ")
        ),
        format!("U = {:.6} at m = {}", r.upper_estimate, r.argmax_m),
        format!("B({}) = {:.6}, margin {}", r.n_points, r.bound, r.margin),
        format!("verdict: {:?}", r.verdict).to_uppercase(),
    ];
    let mut manifest = RunManifest::new("kissing-check")
        .input(&a.cert)
        .param("t0", a.t0)
        .param("mu", a.mu)
        .param("N", a.n_points)
        .param("starts", a.starts)
        .param("margin", a.margin)
        .param("tol", a.tol)
        .param("grid_step", a.grid_step);
    manifest.seed = Some(a.seed);
    Ok(Outcome {
        manifest,
        status: match r.verdict {
            Verdict::Contradiction => Status::Contradiction,
            Verdict::Inconclusive => Status::Inconclusive,
        },
        report: serde_json::to_value(&r).expect("serializable"),
        summary,
    })
}
