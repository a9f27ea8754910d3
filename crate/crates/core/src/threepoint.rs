//! Symmetric triple functions `F(t, u, v)`, the triple sum `S_F(C)`, and
//! positive-semidefinite certificates built on the Bachoc-Vallentin kernels.
//!
//! The kernel `S_k^n(t, u, v)` is the average over the six permutations of
//! `(t, u, v)` of the `(d + 1 - k)`-square matrix
//!
//! ```text
//! Y_k^n(t, u, v)[i][j] = u^i v^j P_k(t, u, v),
//! P_k = ((1 - u^2)(1 - v^2))^{k/2} G_k^{(n-1)}((t - u v) / sqrt((1 - u^2)(1 - v^2))).
//! ```
//!
//! `P_k` is a polynomial: with `w = t - u v` and `s2 = (1 - u^2)(1 - v^2)`,
//! the Gegenbauer recurrence becomes `P_{k+1} = a_k w P_k - b_k s2 P_{k-1}`,
//! so neither evaluation path takes a square root and `|u| = 1` or `|v| = 1`
//! need no special casing.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::codes::SphericalCode;
use crate::error::{Error, Result};
use crate::gegenbauer::recurrence;
use crate::poly::{TriPoly, PERMUTATIONS};
use crate::sum::CompensatedSum;

/// Default PSD tolerance for certificate matrices.
pub const PSD_TOL: f64 = 1e-9;

fn kernel_poly_numeric(n: usize, k: usize, t: f64, u: f64, v: f64) -> f64 {
    let w = t - u * v;
    let s2 = (1.0 - u * u) * (1.0 - v * v);
    let mut prev = 1.0;
    if k == 0 {
        return prev;
    }
    let mut cur = w;
    for j in 1..k {
        let (a, b) = recurrence(n - 1, j);
        let next = a * w * cur - b * s2 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn kernel_poly_symbolic(n: usize, k: usize) -> TriPoly {
    let t = TriPoly::var(0);
    let u = TriPoly::var(1);
    let v = TriPoly::var(2);
    let w = &t + &(&u * &v).scaled(-1.0);
    let one = TriPoly::constant(1.0);
    let s2 = &(&one + &u.pow(2).scaled(-1.0)) * &(&one + &v.pow(2).scaled(-1.0));
    let mut prev = one;
    if k == 0 {
        return prev;
    }
    let mut cur = w.clone();
    for j in 1..k {
        let (a, b) = recurrence(n - 1, j);
        let next = &(&w * &cur).scaled(a) + &(&s2 * &prev).scaled(-b);
        prev = cur;
        cur = next;
    }
    cur
}

fn check_kernel_args(n: usize, k: usize, d: usize) -> Result<()> {
    if n < 3 {
        return Err(Error::Parameter(format!(
            "three-point kernels need n >= 3, got {n}"
        )));
    }
    if k > d {
        return Err(Error::Parameter(format!("kernel index k = {k} exceeds d = {d}")));
    }
    Ok(())
}

/// `S_k^n(t, u, v)`, a symmetric `(d + 1 - k)`-square matrix.
pub fn bv_matrix(n: usize, k: usize, d: usize, t: f64, u: f64, v: f64) -> Result<DMatrix<f64>> {
    check_kernel_args(n, k, d)?;
    for x in [t, u, v] {
        if !(-1.0..=1.0).contains(&x) {
            return Err(Error::Domain {
                value: x,
                lo: -1.0,
                hi: 1.0,
            });
        }
    }
    Ok(bv_matrix_unchecked(n, k, d, [t, u, v]))
}

fn bv_matrix_unchecked(n: usize, k: usize, d: usize, x: [f64; 3]) -> DMatrix<f64> {
    let size = d + 1 - k;
    let mut out = DMatrix::<f64>::zeros(size, size);
    for perm in PERMUTATIONS {
        let (t, u, v) = (x[perm[0]], x[perm[1]], x[perm[2]]);
        let p = kernel_poly_numeric(n, k, t, u, v) / 6.0;
        let mut ui = 1.0;
        for i in 0..size {
            let mut vj = 1.0;
            for j in 0..size {
                out[(i, j)] += ui * vj * p;
                vj *= v;
            }
            ui *= u;
        }
    }
    out
}

/// Entries of `S_k^n` as polynomials in `(t, u, v)`.
pub fn bv_matrix_poly(n: usize, k: usize, d: usize) -> Result<Vec<Vec<TriPoly>>> {
    check_kernel_args(n, k, d)?;
    let size = d + 1 - k;
    let p = kernel_poly_symbolic(n, k);
    Ok((0..size)
        .map(|i| {
            (0..size)
                .map(|j| (&TriPoly::monomial([0, i as u32, j as u32], 1.0) * &p).symmetrized())
                .collect()
        })
        .collect())
}

/// A symmetric triple function together with its threshold `F_0`.
#[derive(Debug, Clone)]
pub enum TripleCertificate {
    /// Hand-built symmetric polynomial.
    Explicit { poly: TriPoly, f0: f64 },
    /// `F = sum_k <H_k, S_k^n>`; `poly` caches the expanded form.
    Matrix {
        n: usize,
        d: usize,
        f0: f64,
        h: Vec<DMatrix<f64>>,
        poly: TriPoly,
    },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Term {
    pub i: u32,
    pub j: u32,
    pub k: u32,
    pub a: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RawTriple {
    Matrix {
        n: usize,
        d: usize,
        #[serde(rename = "F0")]
        f0: f64,
        #[serde(rename = "H")]
        h: Vec<Vec<Vec<f64>>>,
    },
    Explicit {
        terms: Vec<Term>,
        #[serde(rename = "F0", default)]
        f0: f64,
    },
}

impl TripleCertificate {
    /// Symmetrizes the given terms over the six index permutations.
    pub fn explicit(terms: &[Term], f0: f64) -> Self {
        let mut poly = TriPoly::zero();
        for term in terms {
            poly.add_term([term.i, term.j, term.k], term.a);
        }
        TripleCertificate::Explicit {
            poly: poly.symmetrized(),
            f0,
        }
    }

    pub fn from_poly(poly: &TriPoly, f0: f64) -> Self {
        TripleCertificate::Explicit {
            poly: poly.symmetrized(),
            f0,
        }
    }

    /// `H[k]` must be a symmetric `(d + 1 - k)`-square matrix for `k = 0..=d`.
    pub fn matrix(n: usize, d: usize, f0: f64, h: Vec<DMatrix<f64>>) -> Result<Self> {
        if n < 3 {
            return Err(Error::Parameter(format!(
                "three-point kernels need n >= 3, got {n}"
            )));
        }
        if h.len() != d + 1 {
            return Err(Error::Parameter(format!(
                "expected {} matrices H_0..H_{d}, got {}",
                d + 1,
                h.len()
            )));
        }
        let mut poly = TriPoly::zero();
        for (k, hk) in h.iter().enumerate() {
            let size = d + 1 - k;
            if hk.nrows() != size || hk.ncols() != size {
                return Err(Error::Parameter(format!(
                    "H_{k} must be {size}x{size}, got {}x{}",
                    hk.nrows(),
                    hk.ncols()
                )));
            }
            let asym = (hk - hk.transpose()).amax();
            if asym > PSD_TOL * (1.0 + hk.amax()) {
                return Err(Error::Parameter(format!(
                    "H_{k} is not symmetric (max deviation {asym:e})"
                )));
            }
            let entries = bv_matrix_poly(n, k, d)?;
            for (i, row) in entries.iter().enumerate() {
                for (j, p) in row.iter().enumerate() {
                    poly = &poly + &p.scaled(hk[(i, j)]);
                }
            }
        }
        Ok(TripleCertificate::Matrix { n, d, f0, h, poly })
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawTriple = serde_json::from_str(s)
            .map_err(|e| Error::Schema(format!("not a triple certificate: {e}")))?;
        Self::from_raw(raw)
    }

    pub fn from_value(v: serde_json::Value) -> Result<Self> {
        let raw: RawTriple = serde_json::from_value(v)
            .map_err(|e| Error::Schema(format!("not a triple certificate: {e}")))?;
        Self::from_raw(raw)
    }

    fn from_raw(raw: RawTriple) -> Result<Self> {
        match raw {
            RawTriple::Explicit { terms, f0 } => Ok(Self::explicit(&terms, f0)),
            RawTriple::Matrix { n, d, f0, h } => {
                let mats = h
                    .into_iter()
                    .enumerate()
                    .map(|(k, rows)| {
                        let size = rows.len();
                        if rows.iter().any(|r| r.len() != size) {
                            return Err(Error::Parameter(format!("H_{k} is not square")));
                        }
                        Ok(DMatrix::from_fn(size, size, |i, j| rows[i][j]))
                    })
                    .collect::<Result<Vec<_>>>()?;
                Self::matrix(n, d, f0, mats)
            }
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let raw = match self {
            TripleCertificate::Explicit { poly, f0 } => RawTriple::Explicit {
                terms: poly
                    .terms()
                    .map(|(e, a)| Term {
                        i: e[0],
                        j: e[1],
                        k: e[2],
                        a: *a,
                    })
                    .collect(),
                f0: *f0,
            },
            TripleCertificate::Matrix { n, d, f0, h, .. } => RawTriple::Matrix {
                n: *n,
                d: *d,
                f0: *f0,
                h: h.iter()
                    .map(|m| {
                        (0..m.nrows())
                            .map(|i| (0..m.ncols()).map(|j| m[(i, j)]).collect())
                            .collect()
                    })
                    .collect(),
            },
        };
        serde_json::to_value(raw).expect("plain numbers serialize")
    }

    pub fn f0(&self) -> f64 {
        match self {
            TripleCertificate::Explicit { f0, .. } | TripleCertificate::Matrix { f0, .. } => *f0,
        }
    }

    /// The dimension the certificate was built for, if any.
    pub fn dimension(&self) -> Option<usize> {
        match self {
            TripleCertificate::Explicit { .. } => None,
            TripleCertificate::Matrix { n, .. } => Some(*n),
        }
    }

    /// Expanded monomial form of `F`.
    pub fn poly(&self) -> &TriPoly {
        match self {
            TripleCertificate::Explicit { poly, .. } | TripleCertificate::Matrix { poly, .. } => {
                poly
            }
        }
    }

    /// `F(t, u, v)`. Matrix certificates are evaluated through the kernels
    /// `<H_k, S_k^n(t, u, v)>`; explicit ones through their polynomial.
    pub fn eval(&self, t: f64, u: f64, v: f64) -> f64 {
        match self {
            TripleCertificate::Explicit { poly, .. } => poly.eval([t, u, v]),
            TripleCertificate::Matrix { n, d, h, .. } => h
                .iter()
                .enumerate()
                .map(|(k, hk)| hk.dot(&bv_matrix_unchecked(*n, k, *d, [t, u, v])))
                .sum(),
        }
    }

    /// `F(t, u, v)` through the pre-expanded polynomial.
    pub fn eval_expanded(&self, t: f64, u: f64, v: f64) -> f64 {
        self.poly().eval([t, u, v])
    }
}

/// `S_F(C)` and its split by the number of distinct points in a triple.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleSum {
    pub total: f64,
    /// `x = y = z`: equals `N F(1, 1, 1)`.
    pub s1: f64,
    /// Exactly two of the three points coincide.
    pub s2: f64,
    /// Three distinct points.
    pub s3: f64,
}

/// `S_F(C)` over all `N^3` ordered triples, repeated points included.
/// Parallel over the outer index; partial sums are combined in index order.
pub fn triple_sum(c: &SphericalCode, f: &TripleCertificate) -> Result<TripleSum> {
    if let Some(n) = f.dimension() {
        if n != c.dimension() {
            return Err(Error::Parameter(format!(
                "certificate dimension {n} does not match code dimension {}",
                c.dimension()
            )));
        }
    }
    let count = c.len();
    let partials: Vec<[CompensatedSum; 3]> = (0..count)
        .into_par_iter()
        .map(|x| {
            let mut acc = [CompensatedSum::new(); 3];
            for y in 0..count {
                for z in 0..count {
                    let value = f.eval(c.inner(x, y), c.inner(x, z), c.inner(y, z));
                    let class = match (x == y, x == z, y == z) {
                        (true, true, _) => 0,
                        (false, false, false) => 2,
                        _ => 1,
                    };
                    acc[class].add(value);
                }
            }
            acc
        })
        .collect();
    let mut parts = [CompensatedSum::new(); 3];
    for p in &partials {
        for (a, b) in parts.iter_mut().zip(p) {
            a.add(b.value());
        }
    }
    let [s1, s2, s3] = parts.map(|p| p.value());
    Ok(TripleSum {
        total: s1 + s2 + s3,
        s1,
        s2,
        s3,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsdReport {
    pub psd: bool,
    pub min_eigenvalue: f64,
    /// Unit vector `w` with `w^T M w < -tol` when the check fails.
    pub witness: Option<Vec<f64>>,
}

/// Smallest-eigenvalue test; the witness is the corresponding eigenvector.
pub fn psd_check(m: &DMatrix<f64>, tol: f64) -> Result<PsdReport> {
    if m.nrows() != m.ncols() {
        return Err(Error::Parameter(format!(
            "matrix is {}x{}, not square",
            m.nrows(),
            m.ncols()
        )));
    }
    if m.nrows() == 0 {
        return Ok(PsdReport {
            psd: true,
            min_eigenvalue: 0.0,
            witness: None,
        });
    }
    let asym = (m - m.transpose()).amax();
    if asym > tol {
        return Err(Error::Parameter(format!(
            "matrix is not symmetric (max deviation {asym:e})"
        )));
    }
    let sym = (m + m.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym.clone());
    let (idx, &min) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("non-empty");
    if min >= -tol {
        return Ok(PsdReport {
            psd: true,
            min_eigenvalue: min,
            witness: None,
        });
    }
    let w: DVector<f64> = eig.eigenvectors.column(idx).into_owned();
    debug_assert!((w.transpose() * &sym * &w)[(0, 0)] < -tol);
    Ok(PsdReport {
        psd: false,
        min_eigenvalue: min,
        witness: Some(w.iter().copied().collect()),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CertificateReport {
    pub valid: bool,
    /// `(label, result)` for `H_0 - F_0 E_0` and each `H_k`, `k > 0`.
    pub checks: Vec<(String, PsdReport)>,
}

/// Checks `H_k` PSD for `k > 0` and `H_0 - F_0 E_0` PSD.
pub fn certificate_valid(f: &TripleCertificate, tol: f64) -> Result<CertificateReport> {
    let TripleCertificate::Matrix { f0, h, .. } = f else {
        return Err(Error::Capability(
            "explicit certificates carry no PSD structure; validate them through triple sums".into(),
        ));
    };
    let mut checks = Vec::with_capacity(h.len());
    for (k, hk) in h.iter().enumerate() {
        if k == 0 {
            let mut shifted = hk.clone();
            shifted[(0, 0)] -= f0;
            checks.push(("H0 - F0*E0".to_string(), psd_check(&shifted, tol)?));
        } else {
            checks.push((format!("H{k}"), psd_check(hk, tol)?));
        }
    }
    Ok(CertificateReport {
        valid: checks.iter().all(|(_, r)| r.psd),
        checks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{make_24cell, make_cross_polytope, make_simplex};
    use proptest::prelude::*;

    fn term(i: u32, j: u32, k: u32, a: f64) -> Term {
        Term { i, j, k, a }
    }

    #[test]
    fn kernel_base_case_and_symmetry() {
        let m = bv_matrix(4, 0, 0, 0.1, -0.3, 0.7).unwrap();
        assert_eq!(m.shape(), (1, 1));
        assert!((m[(0, 0)] - 1.0).abs() < 1e-15);
        for t in [-0.9, -0.2, 0.4, 1.0] {
            let s = bv_matrix(5, 1, 3, t, t, t).unwrap();
            assert!((&s - s.transpose()).amax() < 1e-15);
        }
        let s = bv_matrix(4, 2, 4, 0.3, -0.5, 0.8).unwrap();
        assert!((&s - s.transpose()).amax() < 1e-15);
        assert!(bv_matrix(4, 3, 2, 0.0, 0.0, 0.0).is_err());
        assert!(bv_matrix(4, 0, 2, 1.5, 0.0, 0.0).is_err());
    }

    #[test]
    fn kernel_matches_square_root_form_away_from_poles() {
        // direct formula with the square root, valid for |u|, |v| < 1
        let (n, t, u, v) = (5usize, 0.2, -0.4, 0.6);
        let s: f64 = (1.0 - u * u) * (1.0 - v * v);
        let arg = (t - u * v) / s.sqrt();
        for k in 0..6 {
            let direct = s.powf(k as f64 / 2.0) * crate::gegenbauer::eval_basis(n - 1, k, arg);
            assert!((kernel_poly_numeric(n, k, t, u, v) - direct).abs() < 1e-13);
        }
    }

    #[test]
    fn two_evaluation_routes_agree() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for n in [3usize, 4, 6] {
            let d = 3;
            let h: Vec<DMatrix<f64>> = (0..=d)
                .map(|k| {
                    let size = d + 1 - k;
                    let a = DMatrix::from_fn(size, size, |_, _| rng.random_range(-1.0..1.0));
                    &a * a.transpose()
                })
                .collect();
            let f = TripleCertificate::matrix(n, d, 0.0, h).unwrap();
            for _ in 0..100 {
                let x: [f64; 3] = std::array::from_fn(|_| rng.random_range(-1.0..=1.0));
                let a = f.eval(x[0], x[1], x[2]);
                let b = f.eval_expanded(x[0], x[1], x[2]);
                assert!((a - b).abs() < 1e-9 * (1.0 + a.abs()), "{a} vs {b}");
            }
            // both routes handle the poles |u| = 1 without special cases
            let a = f.eval(0.3, 1.0, -1.0);
            assert!((a - f.eval_expanded(0.3, 1.0, -1.0)).abs() < 1e-9 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn kernel_sums_over_codes_are_psd() {
        let codes = [make_24cell(), make_simplex(4).unwrap(), make_cross_polytope(4).unwrap()];
        let d = 4;
        for c in &codes {
            for k in 0..=d {
                let size = d + 1 - k;
                let mut acc = DMatrix::<f64>::zeros(size, size);
                for x in 0..c.len() {
                    for y in 0..c.len() {
                        for z in 0..c.len() {
                            acc += bv_matrix(4, k, d, c.inner(x, y), c.inner(x, z), c.inner(y, z))
                                .unwrap();
                        }
                    }
                }
                let r = psd_check(&acc, 1e-8 * (1.0 + acc.amax())).unwrap();
                assert!(r.psd, "k = {k}: min eigenvalue {}", r.min_eigenvalue);
            }
        }
    }

    #[test]
    fn explicit_evaluation() {
        let one = TripleCertificate::explicit(&[term(0, 0, 0, 1.0)], 0.0);
        assert_eq!(one.eval(0.3, -0.2, 0.9), 1.0);
        let lin = TripleCertificate::explicit(
            &[term(1, 0, 0, 1.0), term(0, 1, 0, 1.0), term(0, 0, 1, 1.0)],
            0.0,
        );
        assert!((lin.eval(0.1, 0.2, 0.3) - 0.6).abs() < 1e-14);
        // a lone t term is symmetrized into (t + u + v) / 3
        let t_only = TripleCertificate::explicit(&[term(1, 0, 0, 3.0)], 0.0);
        assert!((t_only.eval(0.1, 0.2, 0.3) - 0.6).abs() < 1e-14);
    }

    #[test]
    fn triple_sum_examples() {
        let one = TripleCertificate::explicit(&[term(0, 0, 0, 1.0)], 0.0);
        let c = make_24cell();
        let s = triple_sum(&c, &one).unwrap();
        assert!((s.total - 24f64.powi(3)).abs() < 1e-9);
        let single = crate::codes::SphericalCode::from_points(3, vec![vec![1.0, 0.0, 0.0]]).unwrap();
        let f = TripleCertificate::explicit(&[term(1, 1, 1, 2.0), term(0, 0, 0, 0.5)], 0.0);
        let s = triple_sum(&single, &f).unwrap();
        assert!((s.total - f.eval(1.0, 1.0, 1.0)).abs() < 1e-15);
        assert_eq!(s.s2, 0.0);
        assert_eq!(s.s3, 0.0);
    }

    #[test]
    fn psd_examples() {
        let r = psd_check(&DMatrix::identity(3, 3), PSD_TOL).unwrap();
        assert!(r.psd);
        let m = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]);
        let r = psd_check(&m, PSD_TOL).unwrap();
        assert!(!r.psd);
        assert!((r.min_eigenvalue + 1.0).abs() < 1e-12);
        let w = DVector::from_vec(r.witness.unwrap());
        assert!((w.transpose() * &m * &w)[(0, 0)] < -PSD_TOL);
        let r = psd_check(&DMatrix::from_element(2, 2, 1.0), PSD_TOL).unwrap();
        assert!(r.psd);
        let bad = DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 0.0, 1.0]);
        assert!(matches!(psd_check(&bad, PSD_TOL), Err(Error::Parameter(_))));
    }

    #[test]
    fn certificate_validity_examples() {
        let ids = |d: usize| (0..=d).map(|k| DMatrix::identity(d + 1 - k, d + 1 - k)).collect::<Vec<_>>();
        let f = TripleCertificate::matrix(4, 2, 0.0, ids(2)).unwrap();
        assert!(certificate_valid(&f, PSD_TOL).unwrap().valid);
        let f = TripleCertificate::matrix(4, 2, 2.0, ids(2)).unwrap();
        let r = certificate_valid(&f, PSD_TOL).unwrap();
        assert!(!r.valid);
        assert!((r.checks[0].1.min_eigenvalue + 1.0).abs() < 1e-12);
        let mut e0 = DMatrix::zeros(1, 1);
        e0[(0, 0)] = 1.0;
        let f = TripleCertificate::matrix(4, 0, 1.0, vec![e0]).unwrap();
        assert!(certificate_valid(&f, PSD_TOL).unwrap().valid);
        let explicit = TripleCertificate::explicit(&[term(0, 0, 0, 1.0)], 0.0);
        assert!(matches!(certificate_valid(&explicit, PSD_TOL), Err(Error::Capability(_))));
    }

    #[test]
    fn json_shapes() {
        let f = TripleCertificate::from_json(r#"{"n": 4, "d": 1, "F0": 0.5, "H": [[[1, 0], [0, 1]], [[2]]]}"#).unwrap();
        assert_eq!(f.f0(), 0.5);
        assert_eq!(f.dimension(), Some(4));
        let back = TripleCertificate::from_value(f.to_json()).unwrap();
        assert!((back.eval(0.1, 0.2, 0.3) - f.eval(0.1, 0.2, 0.3)).abs() < 1e-15);
        let e = TripleCertificate::from_json(r#"{"terms": [{"i": 1, "j": 1, "k": 1, "a": 1.0}]}"#).unwrap();
        assert!((e.eval(0.5, 0.5, 0.5) - 0.125).abs() < 1e-15);
        assert!(matches!(TripleCertificate::from_json("{}"), Err(Error::Schema(_))));
        assert!(TripleCertificate::from_json(r#"{"n": 4, "d": 1, "F0": 0, "H": [[[1]]]}"#).is_err());
    }

    proptest! {
        #[test]
        fn permutation_symmetry(t in -1.0f64..=1.0, u in -1.0f64..=1.0, v in -1.0f64..=1.0, seed in any::<u64>()) {
            use rand::{Rng, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let d = 3;
            let h: Vec<DMatrix<f64>> = (0..=d).map(|k| {
                let size = d + 1 - k;
                let a = DMatrix::from_fn(size, size, |_, _| rng.random_range(-1.0..1.0));
                &a + a.transpose()
            }).collect();
            let f = TripleCertificate::matrix(4, d, 0.0, h).unwrap();
            let x = [t, u, v];
            let base = f.eval(t, u, v);
            for p in PERMUTATIONS {
                prop_assert!((f.eval(x[p[0]], x[p[1]], x[p[2]]) - base).abs() < 1e-10);
            }
        }
    }
}
