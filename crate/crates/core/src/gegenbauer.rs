//! Normalized Gegenbauer polynomials `G_k^{(n)}` and expansions in that basis.
//!
//! `G_k^{(n)}` is orthogonal on `[-1, 1]` with weight `(1 - t^2)^{(n-3)/2}` and
//! normalized by `G_k^{(n)}(1) = 1`. With `lambda = (n - 2) / 2` the normalized
//! three-term recurrence is
//!
//! ```text
//! G_0 = 1,  G_1 = t,
//! G_{k+1}(t) = 2(k + lambda)/(k + 2 lambda) * t * G_k(t) - k/(k + 2 lambda) * G_{k-1}(t)
//! ```
//!
//! which stays well defined for `lambda = 0` (`n = 2`, Chebyshev `T_k`). The
//! public constructors require `n >= 3`; `n = 2` is only reached internally
//! when the three-point kernels ask for `G_k^{(n-1)}` with `n = 3`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Slack allowed on `|t| <= 1` before an argument is rejected; inner products
/// of unit vectors computed in floating point can overshoot by a few ulps.
pub const DOMAIN_SLACK: f64 = 1e-12;

/// Coefficients `(a_k, b_k)` of `G_{k+1} = a_k t G_k - b_k G_{k-1}` in dimension `n`.
#[inline]
pub(crate) fn recurrence(n: usize, k: usize) -> (f64, f64) {
    if k == 0 {
        return (1.0, 0.0);
    }
    let lambda = (n as f64 - 2.0) / 2.0;
    let k = k as f64;
    let denom = k + 2.0 * lambda;
    (2.0 * (k + lambda) / denom, k / denom)
}

/// Evaluates `G_k^{(n)}(t)` for any `n >= 2` without argument checks.
pub(crate) fn eval_basis(n: usize, k: usize, t: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = t;
    for j in 1..k {
        let (a, b) = recurrence(n, j);
        let next = a * t * cur - b * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn check_dimension(n: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Parameter(format!(
            "Gegenbauer dimension must be at least 3, got {n}"
        )));
    }
    Ok(())
}

fn check_argument(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::Domain {
            value: t,
            lo: -1.0,
            hi: 1.0,
        });
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// `G_k^{(n)}(t)`, normalized so that the value at `t = 1` is one.
pub fn gegenbauer(n: usize, k: usize, t: f64) -> Result<f64> {
    check_dimension(n)?;
    let t = check_argument(t)?;
    Ok(eval_basis(n, k, t))
}

/// `G_k^{(n)}'(1) = k (k + n - 2) / (n - 1)`; the maximum of `|G_k'|` on `[-1, 1]`.
pub fn derivative_at_one(n: usize, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    k * (k + n - 2.0) / (n - 1.0)
}

/// `G_k^{(n)}''(1)`; the maximum of `|G_k''|` on `[-1, 1]`.
pub fn second_derivative_at_one(n: usize, k: usize) -> f64 {
    if k < 2 {
        return 0.0;
    }
    derivative_at_one(n, k) * derivative_at_one(n + 2, k - 1)
}

/// A polynomial `sum_k c_k G_k^{(n)}(t)`; coefficients in ascending degree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawExpansion", into = "RawExpansion")]
pub struct GegenbauerExpansion {
    n: usize,
    coeffs: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawExpansion {
    n: usize,
    coeffs: Vec<f64>,
}

impl TryFrom<RawExpansion> for GegenbauerExpansion {
    type Error = Error;

    fn try_from(raw: RawExpansion) -> Result<Self> {
        GegenbauerExpansion::new(raw.n, raw.coeffs)
    }
}

impl From<GegenbauerExpansion> for RawExpansion {
    fn from(e: GegenbauerExpansion) -> Self {
        RawExpansion {
            n: e.n,
            coeffs: e.coeffs,
        }
    }
}

impl GegenbauerExpansion {
    pub fn new(n: usize, coeffs: Vec<f64>) -> Result<Self> {
        check_dimension(n)?;
        if coeffs.is_empty() {
            return Err(Error::Parameter(
                "an expansion needs at least the degree-0 coefficient".into(),
            ));
        }
        if let Some(k) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::Parameter(format!("coefficient c_{k} is not finite")));
        }
        Ok(Self { n, coeffs })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::new(n, vec![0.0])
    }

    pub fn constant(n: usize, c: f64) -> Result<Self> {
        Self::new(n, vec![c])
    }

    /// The single basis polynomial `G_k^{(n)}`.
    pub fn basis(n: usize, k: usize) -> Result<Self> {
        let mut coeffs = vec![0.0; k + 1];
        coeffs[k] = 1.0;
        Self::new(n, coeffs)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// The degree-0 coefficient `c_0`.
    pub fn constant_term(&self) -> f64 {
        self.coeffs[0]
    }

    /// True when every coefficient above degree 0 is nonnegative.
    pub fn is_positive_definite_tail(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c >= 0.0)
    }

    /// `f(1) = sum_k c_k`.
    pub fn value_at_one(&self) -> f64 {
        self.coeffs.iter().sum()
    }

    pub fn eval(&self, t: f64) -> Result<f64> {
        let t = check_argument(t)?;
        Ok(self.eval_unchecked(t))
    }

    /// Clenshaw backward recurrence; callers guarantee `t` in `[-1, 1]`.
    pub fn eval_unchecked(&self, t: f64) -> f64 {
        let d = self.degree();
        let mut b1 = 0.0; // b_{k+1}
        let mut b2 = 0.0; // b_{k+2}
        for k in (0..=d).rev() {
            let (a, _) = recurrence(self.n, k);
            let (_, beta_next) = recurrence(self.n, k + 1);
            let b = self.coeffs[k] + a * t * b1 - beta_next * b2;
            b2 = b1;
            b1 = b;
        }
        b1
    }

    /// The derivative, expressed in the dimension `n + 2` basis via
    /// `G_k^{(n)}' = G_k^{(n)}'(1) * G_{k-1}^{(n+2)}`.
    pub fn derivative(&self) -> GegenbauerExpansion {
        let coeffs = if self.degree() == 0 {
            vec![0.0]
        } else {
            (1..=self.degree())
                .map(|k| self.coeffs[k] * derivative_at_one(self.n, k))
                .collect()
        };
        GegenbauerExpansion {
            n: self.n + 2,
            coeffs,
        }
    }

    /// Upper bound on `sup |f'|` over `[-1, 1]`.
    pub fn derivative_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * derivative_at_one(self.n, k))
            .sum()
    }

    /// Upper bound on `sup |f''|` over `[-1, 1]`.
    pub fn second_derivative_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| c.abs() * second_derivative_at_one(self.n, k))
            .sum()
    }

    pub fn scaled(&self, s: f64) -> GegenbauerExpansion {
        GegenbauerExpansion {
            n: self.n,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    /// Coefficient-wise sum; both expansions must share a dimension.
    pub fn add(&self, other: &GegenbauerExpansion) -> Result<GegenbauerExpansion> {
        if self.n != other.n {
            return Err(Error::Parameter(format!(
                "dimension mismatch: {} vs {}",
                self.n, other.n
            )));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|k| self.coeffs.get(k).unwrap_or(&0.0) + other.coeffs.get(k).unwrap_or(&0.0))
            .collect();
        Ok(GegenbauerExpansion { n: self.n, coeffs })
    }
}

/// Independent test oracles: exact Gram-Schmidt on monomials and Gauss
/// quadrature for the Gegenbauer weight.
pub mod oracle {
    use nalgebra::{DMatrix, SymmetricEigen};
    use num_bigint::BigInt;
    use num_rational::BigRational;
    use num_traits::{ToPrimitive, Zero};

    use super::{check_dimension, eval_basis};
    use crate::error::{Error, Result};

    /// Largest degree the monomial oracle accepts.
    pub const MONOMIAL_ORACLE_MAX_DEGREE: usize = 12;

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    /// Normalized moments `int t^j w / int w` for `w = (1-t^2)^{(n-3)/2}`.
    /// These are rational for every integer `n`.
    fn moments(n: usize, max: usize) -> Vec<BigRational> {
        let mut out = Vec::with_capacity(max + 1);
        let mut even = ratio(1, 1);
        for j in 0..=max {
            if j % 2 == 1 {
                out.push(BigRational::zero());
            } else {
                if j > 0 {
                    let i = (j / 2) as i64;
                    even *= ratio(2 * i - 1, 2 * i + n as i64 - 2);
                }
                out.push(even.clone());
            }
        }
        out
    }

    fn inner(p: &[BigRational], q: &[BigRational], mom: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (a, pa) in p.iter().enumerate() {
            if pa.is_zero() {
                continue;
            }
            for (b, qb) in q.iter().enumerate() {
                acc += pa * qb * &mom[a + b];
            }
        }
        acc
    }

    /// Monomial coefficients `a_0..a_k` of `G_k^{(n)}`, from exact rational
    /// Gram-Schmidt on `{1, t, ..., t^k}` followed by normalization at `t = 1`.
    pub fn monomial_oracle(n: usize, k: usize) -> Result<Vec<f64>> {
        check_dimension(n)?;
        if k > MONOMIAL_ORACLE_MAX_DEGREE {
            return Err(Error::Capability(format!(
                "monomial oracle is limited to degree {MONOMIAL_ORACLE_MAX_DEGREE}, got {k}"
            )));
        }
        let mom = moments(n, 2 * k);
        let mut basis: Vec<Vec<BigRational>> = Vec::with_capacity(k + 1);
        for deg in 0..=k {
            let mut p = vec![BigRational::zero(); k + 1];
            p[deg] = ratio(1, 1);
            for q in &basis {
                let proj = inner(&p, q, &mom) / inner(q, q, &mom);
                for (pi, qi) in p.iter_mut().zip(q) {
                    *pi -= &proj * qi;
                }
            }
            basis.push(p);
        }
        let top = basis.pop().expect("k + 1 >= 1 polynomials");
        let at_one: BigRational = top.iter().cloned().sum();
        Ok(top
            .into_iter()
            .take(k + 1)
            .map(|c| (c / &at_one).to_f64().expect("finite rational"))
            .collect())
    }

    /// `Gamma(m / 2)` for a positive integer `m`.
    fn gamma_half(m: usize) -> f64 {
        let mut x = m as f64 / 2.0;
        let mut acc = 1.0;
        while x > 1.0 {
            x -= 1.0;
            acc *= x;
        }
        if (x - 0.5).abs() < 1e-12 {
            acc * std::f64::consts::PI.sqrt()
        } else {
            acc
        }
    }

    /// Golub-Welsch nodes and weights for `(1-t^2)^{(n-3)/2}` on `[-1, 1]`.
    pub fn gauss_rule(n: usize, points: usize) -> Result<(Vec<f64>, Vec<f64>)> {
        check_dimension(n)?;
        if points == 0 {
            return Err(Error::Parameter("quadrature needs at least one node".into()));
        }
        let lambda = (n as f64 - 2.0) / 2.0;
        let mut jacobi = DMatrix::<f64>::zeros(points, points);
        for k in 1..points {
            let kf = k as f64;
            let beta =
                kf * (kf + 2.0 * lambda - 1.0) / (4.0 * (kf + lambda) * (kf + lambda - 1.0));
            jacobi[(k, k - 1)] = beta.sqrt();
            jacobi[(k - 1, k)] = beta.sqrt();
        }
        // total mass of the weight: sqrt(pi) Gamma((n-1)/2) / Gamma(n/2)
        let mass = std::f64::consts::PI.sqrt() * gamma_half(n - 1) / gamma_half(n);
        let eig = SymmetricEigen::new(jacobi);
        let mut pairs: Vec<(f64, f64)> = (0..points)
            .map(|i| {
                let v0 = eig.eigenvectors[(0, i)];
                (eig.eigenvalues[i], mass * v0 * v0)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(pairs.into_iter().unzip())
    }

    /// `int_{-1}^{1} G_j G_k (1-t^2)^{(n-3)/2} dt` by a Gauss rule exact for
    /// degree `j + k`.
    pub fn orthogonality_oracle(n: usize, j: usize, k: usize) -> Result<f64> {
        let points = (j + k).div_ceil(2) + 2;
        let (nodes, weights) = gauss_rule(n, points)?;
        Ok(nodes
            .iter()
            .zip(&weights)
            .map(|(&t, &w)| w * eval_basis(n, j, t) * eval_basis(n, k, t))
            .sum())
    }
}
