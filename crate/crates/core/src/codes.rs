//! Spherical codes, their distance distributions, moments and energies.
//!
//! Sums run over ordered pairs: `A_t` is the number of ordered pairs `(u, v)`
//! with `u . v = t`, divided by `N`. The diagonal `t = 1` is excluded from
//! every [`DistanceDistribution`], so `sum_t A_t = N - 1`.

use std::collections::BTreeMap;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gegenbauer::{eval_basis, GegenbauerExpansion};
use crate::sum::{compensated_sum, CompensatedSum};

/// Unit-norm tolerance applied to user supplied points.
pub const LOAD_NORM_TOL: f64 = 1e-9;

/// Default clustering tolerance for codes without exact products.
pub const DEFAULT_CLUSTER_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct SphericalCode {
    n: usize,
    points: Vec<Vec<f64>>,
    /// Row-major `N x N`; diagonal fixed to 1.
    gram: Vec<f64>,
    exact: Option<Vec<Rational64>>,
}

#[derive(Serialize, Deserialize)]
struct RawCode {
    n: usize,
    points: Vec<Vec<f64>>,
}

impl SphericalCode {
    /// Validates dimensions and unit norms (within [`LOAD_NORM_TOL`]).
    pub fn from_points(n: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if n < 2 {
            return Err(Error::Parameter(format!(
                "code dimension must be at least 2, got {n}"
            )));
        }
        if points.is_empty() {
            return Err(Error::Parameter("a code needs at least one point".into()));
        }
        for (index, p) in points.iter().enumerate() {
            if p.len() != n {
                return Err(Error::InvalidPoint {
                    index,
                    reason: format!("expected {n} coordinates, found {}", p.len()),
                });
            }
            let norm2: f64 = p.iter().map(|x| x * x).sum();
            if !norm2.is_finite() || (norm2.sqrt() - 1.0).abs() > LOAD_NORM_TOL {
                return Err(Error::InvalidPoint {
                    index,
                    reason: format!("norm {} is not 1", norm2.sqrt()),
                });
            }
        }
        let count = points.len();
        let mut gram = vec![0.0; count * count];
        for i in 0..count {
            gram[i * count + i] = 1.0;
            for j in (i + 1)..count {
                let d = compensated_sum(points[i].iter().zip(&points[j]).map(|(a, b)| a * b))
                    .clamp(-1.0, 1.0);
                gram[i * count + j] = d;
                gram[j * count + i] = d;
            }
        }
        Ok(Self {
            n,
            points,
            gram,
            exact: None,
        })
    }

    fn with_exact(mut self, exact: Vec<Rational64>) -> Self {
        self.gram = exact
            .iter()
            .map(|r| r.to_f64().expect("small rational"))
            .collect();
        self.exact = Some(exact);
        self
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let raw: RawCode = serde_json::from_str(s)?;
        Self::from_points(raw.n, raw.points)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&RawCode {
            n: self.n,
            points: self.points.clone(),
        })
        .expect("plain numbers serialize")
    }

    /// Built-in codes by name: `24cell`, `simplex<n>`, `cross<n>`.
    pub fn builtin(name: &str) -> Result<Self> {
        let dim = |prefix: &str| -> Option<usize> { name.strip_prefix(prefix)?.parse().ok() };
        if name == "24cell" || name == "24-cell" {
            Ok(make_24cell())
        } else if let Some(n) = dim("simplex") {
            make_simplex(n)
        } else if let Some(n) = dim("cross") {
            make_cross_polytope(n)
        } else {
            Err(Error::Parameter(format!(
                "unknown built-in code {name:?}; expected 24cell, simplex<n> or cross<n>"
            )))
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    #[inline]
    pub fn inner(&self, i: usize, j: usize) -> f64 {
        self.gram[i * self.len() + j]
    }

    pub fn exact_inner(&self, i: usize, j: usize) -> Option<Rational64> {
        self.exact.as_ref().map(|e| e[i * self.len() + j])
    }

    pub fn has_exact_products(&self) -> bool {
        self.exact.is_some()
    }

    fn off_diagonal(&self) -> impl Iterator<Item = f64> + '_ {
        let count = self.len();
        (0..count).flat_map(move |i| {
            (0..count)
                .filter(move |&j| j != i)
                .map(move |j| self.inner(i, j))
        })
    }

    /// `M_k(C)`: sum of `G_k^{(n)}` over all ordered pairs, diagonal included.
    pub fn moment(&self, k: usize) -> f64 {
        let count = self.len();
        compensated_sum(
            (0..count).flat_map(|i| (0..count).map(move |j| eval_basis(self.n, k, self.inner(i, j)))),
        )
    }

    fn check_expansion(&self, g: &GegenbauerExpansion) -> Result<()> {
        if g.dimension() != self.n {
            return Err(Error::Parameter(format!(
                "expansion dimension {} does not match code dimension {}",
                g.dimension(),
                self.n
            )));
        }
        Ok(())
    }

    /// `E_g(C)`: sum of `g` over distinct ordered pairs.
    pub fn energy(&self, g: &GegenbauerExpansion) -> Result<f64> {
        self.check_expansion(g)?;
        Ok(compensated_sum(self.off_diagonal().map(|t| g.eval_unchecked(t))))
    }

    /// `E_g(C)` for an arbitrary function of the inner product.
    pub fn energy_with<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        compensated_sum(self.off_diagonal().map(g))
    }

    /// `S_f(C) = N f(1) + E_f(C)`.
    pub fn pair_sum(&self, f: &GegenbauerExpansion) -> Result<f64> {
        Ok(self.len() as f64 * f.value_at_one() + self.energy(f)?)
    }

    /// `R_g(C) = E_g(C) / N`.
    pub fn average_energy(&self, g: &GegenbauerExpansion) -> Result<f64> {
        Ok(self.energy(g)? / self.len() as f64)
    }
}

/// Regular simplex: `n + 1` points with pairwise inner products `-1/n`.
pub fn make_simplex(n: usize) -> Result<SphericalCode> {
    if n < 2 {
        return Err(Error::Parameter(format!("simplex needs n >= 2, got {n}")));
    }
    let count = n + 1;
    let scale = (count as f64 / n as f64).sqrt();
    // Helmert basis of the hyperplane sum(x) = 0 in R^{n+1}.
    let helmert: Vec<Vec<f64>> = (1..=n)
        .map(|j| {
            let norm = ((j * (j + 1)) as f64).sqrt();
            (0..count)
                .map(|i| match i.cmp(&j) {
                    std::cmp::Ordering::Less => 1.0 / norm,
                    std::cmp::Ordering::Equal => -(j as f64) / norm,
                    std::cmp::Ordering::Greater => 0.0,
                })
                .collect()
        })
        .collect();
    let points = (0..count)
        .map(|i| {
            // e_i - centroid, rescaled to unit length, in Helmert coordinates
            helmert.iter().map(|h| h[i] * scale).collect()
        })
        .collect();
    let off = Rational64::new(-1, n as i64);
    let exact = (0..count * count)
        .map(|ij| {
            if ij / count == ij % count {
                Rational64::from_integer(1)
            } else {
                off
            }
        })
        .collect();
    Ok(SphericalCode::from_points(n, points)?.with_exact(exact))
}

/// Cross polytope `{+-e_i}`.
pub fn make_cross_polytope(n: usize) -> Result<SphericalCode> {
    if n < 2 {
        return Err(Error::Parameter(format!("cross polytope needs n >= 2, got {n}")));
    }
    let mut int_points = Vec::with_capacity(2 * n);
    for i in 0..n {
        for s in [1i64, -1] {
            let mut p = vec![0i64; n];
            p[i] = s;
            int_points.push(p);
        }
    }
    Ok(from_integer_points(n, &int_points, 1))
}

/// The 24-cell: all permutations of `(+-1, +-1, 0, 0) / sqrt(2)`.
pub fn make_24cell() -> SphericalCode {
    let mut int_points = Vec::with_capacity(24);
    for i in 0..4 {
        for j in (i + 1)..4 {
            for si in [1i64, -1] {
                for sj in [1i64, -1] {
                    let mut p = vec![0i64; 4];
                    p[i] = si;
                    p[j] = sj;
                    int_points.push(p);
                }
            }
        }
    }
    from_integer_points(4, &int_points, 2)
}

/// Points given as integer vectors of common squared norm `norm2`.
fn from_integer_points(n: usize, int_points: &[Vec<i64>], norm2: i64) -> SphericalCode {
    let scale = (norm2 as f64).sqrt();
    let points = int_points
        .iter()
        .map(|p| p.iter().map(|&x| x as f64 / scale).collect())
        .collect();
    let exact = int_points
        .iter()
        .flat_map(|a| {
            int_points.iter().map(move |b| {
                let dot: i64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
                Rational64::new(dot, norm2)
            })
        })
        .collect();
    SphericalCode::from_points(n, points)
        .expect("built-in points are unit vectors")
        .with_exact(exact)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistanceEntry {
    /// Cluster representative (centroid of member inner products).
    pub t: f64,
    /// `A_t`.
    pub mass: f64,
}

#[derive(Debug, Clone)]
pub struct DistanceDistribution {
    n_points: usize,
    entries: Vec<DistanceEntry>,
    /// `per_point[u][c]` is `A_t(u)` for cluster `c`.
    per_point: Vec<Vec<usize>>,
    exact: Option<Vec<(Rational64, Rational64)>>,
}

impl DistanceDistribution {
    pub fn entries(&self) -> &[DistanceEntry] {
        &self.entries
    }

    pub fn n_points(&self) -> usize {
        self.n_points
    }

    /// `A_t(u)` counts per cluster, aligned with [`Self::entries`].
    pub fn per_point(&self, u: usize) -> &[usize] {
        &self.per_point[u]
    }

    /// Exact `(t, A_t)` pairs when the code carried exact inner products.
    pub fn exact(&self) -> Option<&[(Rational64, Rational64)]> {
        self.exact.as_deref()
    }

    pub fn total_mass(&self) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.mass))
    }

    /// The inner-product set `I(C)`, one representative per cluster.
    pub fn inner_products(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.t).collect()
    }

    /// `A(S)`: the mass of clusters whose representative lies in `[a, b]`.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        compensated_sum(
            self.entries
                .iter()
                .filter(|e| e.t >= a && e.t <= b)
                .map(|e| e.mass),
        )
    }

    /// `R_g(C) = sum_t A_t g(t)`.
    pub fn weighted_sum<F: Fn(f64) -> f64>(&self, g: F) -> f64 {
        compensated_sum(self.entries.iter().map(|e| e.mass * g(e.t)))
    }
}

/// Clusters the off-diagonal inner products. Codes with exact products ignore
/// `tol` and group by exact value.
pub fn distance_distribution(c: &SphericalCode, tol: f64) -> Result<DistanceDistribution> {
    let count = c.len();
    if let Some(exact) = &c.exact {
        let mut index: BTreeMap<Rational64, usize> = BTreeMap::new();
        for i in 0..count {
            for j in 0..count {
                if i != j {
                    let len = index.len();
                    index.entry(exact[i * count + j]).or_insert(len);
                }
            }
        }
        // re-number clusters in ascending order of t
        let order: Vec<Rational64> = index.keys().copied().collect();
        let slot: BTreeMap<Rational64, usize> =
            order.iter().enumerate().map(|(s, &t)| (t, s)).collect();
        let mut per_point = vec![vec![0usize; order.len()]; count];
        for (i, row) in per_point.iter_mut().enumerate() {
            for j in 0..count {
                if i != j {
                    row[slot[&exact[i * count + j]]] += 1;
                }
            }
        }
        let totals: Vec<usize> = (0..order.len())
            .map(|s| per_point.iter().map(|r| r[s]).sum())
            .collect();
        let exact_entries: Vec<(Rational64, Rational64)> = order
            .iter()
            .zip(&totals)
            .map(|(&t, &tot)| (t, Rational64::new(tot as i64, count as i64)))
            .collect();
        let entries = exact_entries
            .iter()
            .map(|(t, m)| DistanceEntry {
                t: t.to_f64().expect("small rational"),
                mass: m.to_f64().expect("small rational"),
            })
            .collect();
        return Ok(DistanceDistribution {
            n_points: count,
            entries,
            per_point,
            exact: Some(exact_entries),
        });
    }

    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::Parameter(format!(
            "clustering tolerance must be positive, got {tol}"
        )));
    }
    let mut values: Vec<(f64, usize)> = (0..count)
        .flat_map(|i| (0..count).filter(move |&j| j != i).map(move |j| (i, j)))
        .map(|(i, j)| (c.inner(i, j), i))
        .collect();
    values.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut clusters: Vec<(CompensatedSum, usize)> = Vec::new();
    let mut members: Vec<usize> = Vec::with_capacity(values.len());
    let mut last = f64::NEG_INFINITY;
    for &(t, _) in &values {
        if clusters.is_empty() || t - last > tol {
            clusters.push((CompensatedSum::new(), 0));
        }
        let cl = clusters.last_mut().expect("pushed above");
        cl.0.add(t);
        cl.1 += 1;
        members.push(clusters.len() - 1);
        last = t;
    }
    let centroids: Vec<f64> = clusters
        .iter()
        .map(|(s, k)| s.value() / *k as f64)
        .collect();
    for w in centroids.windows(2) {
        if w[1] - w[0] <= 2.0 * tol {
            return Err(Error::Ambiguous {
                a: w[0],
                b: w[1],
                gap: 2.0 * tol,
            });
        }
    }
    let mut per_point = vec![vec![0usize; clusters.len()]; count];
    for (&(_, i), &cl) in values.iter().zip(&members) {
        per_point[i][cl] += 1;
    }
    let entries = centroids
        .iter()
        .zip(&clusters)
        .map(|(&t, (_, k))| DistanceEntry {
            t,
            mass: *k as f64 / count as f64,
        })
        .collect();
    Ok(DistanceDistribution {
        n_points: count,
        entries,
        per_point,
        exact: None,
    })
}

/// Distribution of a code, using exact products when present and
/// [`DEFAULT_CLUSTER_TOL`] otherwise.
pub fn default_distribution(c: &SphericalCode) -> Result<DistanceDistribution> {
    distance_distribution(c, DEFAULT_CLUSTER_TOL)
}

impl DistanceDistribution {
    /// True when `A_t` is zero for every `t` outside `[a, b]`.
    pub fn supported_in(&self, a: f64, b: f64) -> bool {
        self.entries
            .iter()
            .all(|e| e.mass.is_zero() || (e.t >= a && e.t <= b))
    }
}
