//! Two- and three-point bounds and the distance-distribution bound
//! `B(N) = (N - M) / (3N)`.
//!
//! Functions here only do the arithmetic of each bound. Side conditions on
//! `T` and `D_3(T)` are established with [`crate::verify`]; each function
//! documents which ones it assumes.

use serde::Serialize;
use serde_json::Value;

use crate::codes::SphericalCode;
use crate::error::{Error, Result};
use crate::gegenbauer::GegenbauerExpansion;
use crate::threepoint::{triple_sum, TripleCertificate};
use crate::verify::Interval;

/// Tolerance below which a negative slack on a valid certificate is reported
/// as an implementation fault rather than rounding.
pub const SLACK_TOL: f64 = 1e-9;

/// `f(1) / c_0`, the Delsarte bound on `N` when `f <= 0` on `T`.
pub fn delsarte_bound(f: &GegenbauerExpansion) -> Result<f64> {
    let c0 = f.constant_term();
    if c0 <= 0.0 {
        return Err(Error::Precondition(format!(
            "Delsarte bound needs c_0 > 0, got {c0}"
        )));
    }
    Ok(f.value_at_one() / c0)
}

fn require_positive_tail(f: &GegenbauerExpansion) -> Result<()> {
    if let Some(k) = f.coeffs()[1..].iter().position(|&c| c < 0.0) {
        return Err(Error::Precondition(format!(
            "coefficient c_{} = {} is negative; the bound needs c_k >= 0 for k >= 1",
            k + 1,
            f.coeffs()[k + 1]
        )));
    }
    Ok(())
}

/// `c_0 N^2 - N f(1)`, a lower bound on `E_g` whenever `g >= f` on `T`.
pub fn yudin_energy_lower(f: &GegenbauerExpansion, n_points: usize) -> Result<f64> {
    require_positive_tail(f)?;
    let n = n_points as f64;
    Ok(f.constant_term() * n * n - n * f.value_at_one())
}

/// `c_0 N - f(1)`, a lower bound on `R_f`.
pub fn lp_rg_lower(f: &GegenbauerExpansion, n_points: usize) -> Result<f64> {
    require_positive_tail(f)?;
    Ok(f.constant_term() * n_points as f64 - f.value_at_one())
}

/// Both sides of an inequality `lhs >= rhs`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InequalityReport {
    pub lhs: f64,
    pub rhs: f64,
    pub slack: f64,
    /// Set when `slack < -SLACK_TOL * scale`.
    pub violated: bool,
}

impl InequalityReport {
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let slack = lhs - rhs;
        let scale = 1.0 + lhs.abs().max(rhs.abs());
        Self {
            lhs,
            rhs,
            slack,
            violated: slack < -SLACK_TOL * scale,
        }
    }
}

/// `N f(1) + E_g(C) >= f_0 N^2`, assuming `f <= g` on `T` and
/// `S_f(C) >= f_0 N^2`.
pub fn two_point_check(
    c: &SphericalCode,
    f: &GegenbauerExpansion,
    g: &GegenbauerExpansion,
    f0: f64,
) -> Result<InequalityReport> {
    let n = c.len() as f64;
    Ok(InequalityReport::new(
        n * f.value_at_one() + c.energy(g)?,
        f0 * n * n,
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThreePointReport {
    /// `N F(1,1,1) + 3 E_f(C) + (3N - 6) E_g(C) >= F_0 N^3`.
    pub main: InequalityReport,
    /// `F(1,1,1) + 3 q(1) + 3 (N - 1) B + 3 E_g(C) >= F_0 N^2`, when `(q, B)` is given.
    pub with_q: Option<InequalityReport>,
    /// `S_F(C)` for reference.
    pub triple_sum: f64,
}

/// Evaluates the three-point inequality on a concrete code, assuming
/// `F(1, t, t) <= f(t)` on `T` and `F <= g + g + g` on `D_3(T)`. With
/// `q_b = Some((q, B))` it also evaluates the form obtained from
/// `f = B + 2g - q` with `S_q(C) >= 0`.
pub fn three_point_check(
    c: &SphericalCode,
    f_triple: &TripleCertificate,
    f: &GegenbauerExpansion,
    g: &GegenbauerExpansion,
    q_b: Option<(&GegenbauerExpansion, f64)>,
) -> Result<ThreePointReport> {
    let n = c.len() as f64;
    let f111 = f_triple.eval(1.0, 1.0, 1.0);
    let e_g = c.energy(g)?;
    let f0 = f_triple.f0();
    let main = InequalityReport::new(
        n * f111 + 3.0 * c.energy(f)? + (3.0 * n - 6.0) * e_g,
        f0 * n * n * n,
    );
    let with_q = q_b.map(|(q, b)| {
        InequalityReport::new(
            f111 + 3.0 * q.value_at_one() + 3.0 * (n - 1.0) * b + 3.0 * e_g,
            f0 * n * n,
        )
    });
    Ok(ThreePointReport {
        main,
        with_q,
        triple_sum: triple_sum(c, f_triple)?.total,
    })
}

/// `(N - M) / (3N)`.
pub fn distribution_bound(m: f64, n_points: usize) -> Result<f64> {
    if n_points == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    let n = n_points as f64;
    Ok((n - m) / (3.0 * n))
}

/// `F_0 N / 3 + h_0 / 3 - F(1,1,1) / (3N) + E_h / N^2`.
pub fn distribution_bound_full(f0: f64, h0: f64, f111: f64, n_points: usize, e_h: f64) -> f64 {
    let n = n_points as f64;
    f0 * n / 3.0 + h0 / 3.0 - f111 / (3.0 * n) + e_h / (n * n)
}

/// What backs a distance-distribution certificate.
#[derive(Debug, Clone)]
pub enum DdBody {
    /// Only the scalar `M = F(1,1,1) + 3 h(1)` is known.
    ScalarM { m: f64 },
    Full {
        h: GegenbauerExpansion,
        h0: f64,
        f: TripleCertificate,
        f0: f64,
    },
}

/// `g` on `T` with either a published `M` or the full `(h, h_0, F, F_0)`.
#[derive(Debug, Clone)]
pub struct DdCertificate {
    pub g: GegenbauerExpansion,
    pub domain: Interval,
    pub body: DdBody,
    /// Where `g` is claimed to be nonpositive, when the file says so.
    pub nonpositive_on: Option<Interval>,
}

impl DdCertificate {
    pub fn scalar(g: GegenbauerExpansion, domain: Interval, m: f64) -> Result<Self> {
        check_domain(domain)?;
        Ok(Self {
            g,
            domain,
            body: DdBody::ScalarM { m },
            nonpositive_on: None,
        })
    }

    pub fn full(
        g: GegenbauerExpansion,
        domain: Interval,
        h: GegenbauerExpansion,
        h0: f64,
        f: TripleCertificate,
        f0: f64,
    ) -> Result<Self> {
        check_domain(domain)?;
        if h.dimension() != g.dimension() {
            return Err(Error::Parameter("g and h must share a dimension".into()));
        }
        Ok(Self {
            g,
            domain,
            body: DdBody::Full { h, h0, f, f0 },
            nonpositive_on: None,
        })
    }

    pub fn with_nonpositive_on(mut self, s: Interval) -> Self {
        self.nonpositive_on = Some(s);
        self
    }

    /// `M`: stored for scalar certificates, `F(1,1,1) + 3 h(1)` otherwise.
    pub fn m(&self) -> f64 {
        match &self.body {
            DdBody::ScalarM { m } => *m,
            DdBody::Full { h, f, .. } => f.eval(1.0, 1.0, 1.0) + 3.0 * h.value_at_one(),
        }
    }

    pub fn is_full(&self) -> bool {
        matches!(self.body, DdBody::Full { .. })
    }

    /// Reads `{"g", "T", "M"}` or `{"g", "T", "h", "h0", "F", "F0"}`; an
    /// optional `"nonpositive_on": [a, b]` is kept for the sign check.
    pub fn from_json(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s)?;
        Self::from_value(v)
    }

    pub fn from_value(v: Value) -> Result<Self> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::Schema("certificate must be a JSON object".into()))?;
        let field = |name: &str| {
            obj.get(name)
                .cloned()
                .ok_or_else(|| Error::Schema(format!("certificate is missing \"{name}\"")))
        };
        let g: GegenbauerExpansion = serde_json::from_value(field("g")?)?;
        let domain: Interval = serde_json::from_value(field("T")?)?;
        let cert = if let Some(m) = obj.get("M") {
            let m = m
                .as_f64()
                .ok_or_else(|| Error::Schema("\"M\" must be a number".into()))?;
            Self::scalar(g, domain, m)?
        } else {
            let h: GegenbauerExpansion = serde_json::from_value(field("h")?)?;
            let number = |name: &str| -> Result<f64> {
                field(name)?
                    .as_f64()
                    .ok_or_else(|| Error::Schema(format!("\"{name}\" must be a number")))
            };
            let f = TripleCertificate::from_value(field("F")?)?;
            Self::full(g, domain, h, number("h0")?, f, number("F0")?)?
        };
        Ok(match obj.get("nonpositive_on") {
            Some(s) => cert.with_nonpositive_on(serde_json::from_value(s.clone())?),
            None => cert,
        })
    }

    pub fn to_json(&self) -> Value {
        let mut obj = serde_json::Map::new();
        obj.insert("g".into(), serde_json::to_value(&self.g).expect("serializable"));
        obj.insert("T".into(), serde_json::to_value(self.domain).expect("serializable"));
        match &self.body {
            DdBody::ScalarM { m } => {
                obj.insert("M".into(), Value::from(*m));
            }
            DdBody::Full { h, h0, f, f0 } => {
                obj.insert("h".into(), serde_json::to_value(h).expect("serializable"));
                obj.insert("h0".into(), Value::from(*h0));
                obj.insert("F".into(), f.to_json());
                obj.insert("F0".into(), Value::from(*f0));
            }
        }
        if let Some(s) = self.nonpositive_on {
            obj.insert("nonpositive_on".into(), serde_json::to_value(s).expect("serializable"));
        }
        Value::Object(obj)
    }
}

fn check_domain(domain: Interval) -> Result<()> {
    if domain.hi() >= 1.0 {
        return Err(Error::Parameter(format!(
            "T must lie in [-1, 1), got upper end {}",
            domain.hi()
        )));
    }
    Ok(())
}

/// `B(N) = (N - M) / (3N)`, a lower bound on `R_g(C)` for every `(N, n, T)`
/// code once the certificate's conditions hold and `S_h(C) >= 0`.
pub fn cor31_bound(cert: &DdCertificate, n_points: usize) -> Result<f64> {
    distribution_bound(cert.m(), n_points)
}

/// The full lower bound on `R_g(C)` for a code with `E_h(C) = e_h`.
pub fn thm31_bound(cert: &DdCertificate, n_points: usize, e_h: f64) -> Result<f64> {
    let DdBody::Full { h0, f, f0, .. } = &cert.body else {
        return Err(Error::Precondition(
            "the full bound needs (h, h0, F, F0); this certificate only carries M".into(),
        ));
    };
    if n_points == 0 {
        return Err(Error::Precondition("N must be at least 1".into()));
    }
    Ok(distribution_bound_full(
        *f0,
        *h0,
        f.eval(1.0, 1.0, 1.0),
        n_points,
        e_h,
    ))
}

/// Which lower bound on `R_g` is larger.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stronger {
    Sdp,
    Lp,
    Equal,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundComparison {
    pub n: usize,
    pub m: f64,
    /// `B(N)`.
    pub sdp_bound: f64,
    /// `c_0 N - g(1)` when every `c_k`, `k >= 1`, is nonnegative.
    pub lp_bound: Option<f64>,
    pub lp_note: Option<String>,
    pub stronger: Stronger,
}

/// `B(N)` next to the linear-programming bound for `R_g`.
pub fn compare_bounds(cert: &DdCertificate, n_points: usize) -> Result<BoundComparison> {
    let sdp = cor31_bound(cert, n_points)?;
    let (lp, note) = match lp_rg_lower(&cert.g, n_points) {
        Ok(v) => (Some(v), None),
        Err(Error::Precondition(msg)) => (None, Some(format!("LP bound not applicable: {msg}"))),
        Err(e) => return Err(e),
    };
    let stronger = match lp {
        Some(lp) if lp > sdp => Stronger::Lp,
        Some(lp) if lp == sdp => Stronger::Equal,
        _ => Stronger::Sdp,
    };
    Ok(BoundComparison {
        n: n_points,
        m: cert.m(),
        sdp_bound: sdp,
        lp_bound: lp,
        lp_note: note,
        stronger,
    })
}
