//! Sparse polynomials in three variables `(t, u, v)`.

use std::collections::BTreeMap;
use std::ops::{Add, Mul};

pub type Exponent = [u32; 3];

/// The six permutations of three slots.
pub const PERMUTATIONS: [[usize; 3]; 6] = [
    [0, 1, 2],
    [0, 2, 1],
    [1, 0, 2],
    [1, 2, 0],
    [2, 0, 1],
    [2, 1, 0],
];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TriPoly {
    terms: BTreeMap<Exponent, f64>,
}

impl TriPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: f64) -> Self {
        Self::monomial([0, 0, 0], c)
    }

    pub fn monomial(e: Exponent, c: f64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c);
        p
    }

    /// The coordinate polynomial for slot `axis`.
    pub fn var(axis: usize) -> Self {
        let mut e = [0; 3];
        e[axis] = 1;
        Self::monomial(e, 1.0)
    }

    pub fn add_term(&mut self, e: Exponent, c: f64) {
        if c == 0.0 {
            return;
        }
        let slot = self.terms.entry(e).or_insert(0.0);
        *slot += c;
        if *slot == 0.0 {
            self.terms.remove(&e);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponent, &f64)> {
        self.terms.iter()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|e| e.iter().sum()).max().unwrap_or(0)
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            out.add_term(*e, c * s);
        }
        out
    }

    pub fn pow(&self, k: u32) -> Self {
        (0..k).fold(Self::constant(1.0), |acc, _| &acc * self)
    }

    /// `p(x[perm[0]], x[perm[1]], x[perm[2]])`.
    pub fn permuted(&self, perm: [usize; 3]) -> Self {
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut pe = [0; 3];
            for (slot, &src) in perm.iter().enumerate() {
                pe[src] += e[slot];
            }
            out.add_term(pe, *c);
        }
        out
    }

    /// Average over the six permutations of the variables.
    pub fn symmetrized(&self) -> Self {
        let mut out = Self::zero();
        for perm in PERMUTATIONS {
            for (e, c) in &self.permuted(perm).terms {
                out.add_term(*e, *c);
            }
        }
        for c in out.terms.values_mut() {
            *c /= 6.0;
        }
        out
    }

    pub fn eval(&self, x: [f64; 3]) -> f64 {
        let d = self.degree() as usize;
        let mut powers = vec![[1.0; 3]; d + 1];
        for k in 1..=d {
            for a in 0..3 {
                powers[k][a] = powers[k - 1][a] * x[a];
            }
        }
        self.terms
            .iter()
            .map(|(e, c)| {
                c * powers[e[0] as usize][0] * powers[e[1] as usize][1] * powers[e[2] as usize][2]
            })
            .sum()
    }

    /// Monomial coefficients of `t -> p(1, t, t)`.
    pub fn restrict_one_t_t(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.degree() as usize + 1];
        for (e, c) in &self.terms {
            out[(e[1] + e[2]) as usize] += c;
        }
        out
    }

    /// Per-variable bound on `|dp/dx_a|` over `[-1, 1]^3`.
    pub fn partial_bounds(&self) -> [f64; 3] {
        let mut out = [0.0; 3];
        for (e, c) in &self.terms {
            for a in 0..3 {
                out[a] += c.abs() * e[a] as f64;
            }
        }
        out
    }

    /// Largest deviation from symmetry, measured coefficient-wise.
    pub fn asymmetry(&self) -> f64 {
        let sym = self.symmetrized();
        let mut keys: Vec<Exponent> = self.terms.keys().copied().collect();
        keys.extend(sym.terms.keys().copied());
        keys.iter()
            .map(|e| {
                (self.terms.get(e).copied().unwrap_or(0.0) - sym.terms.get(e).copied().unwrap_or(0.0))
                    .abs()
            })
            .fold(0.0, f64::max)
    }
}

impl Add for &TriPoly {
    type Output = TriPoly;

    fn add(self, rhs: &TriPoly) -> TriPoly {
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(*e, *c);
        }
        out
    }
}

impl Mul for &TriPoly {
    type Output = TriPoly;

    fn mul(self, rhs: &TriPoly) -> TriPoly {
        let mut out = TriPoly::zero();
        for (a, ca) in &self.terms {
            for (b, cb) in &rhs.terms {
                out.add_term([a[0] + b[0], a[1] + b[1], a[2] + b[2]], ca * cb);
            }
        }
        out
    }
}

/// Univariate monomial polynomial helpers.
pub(crate) fn horner(coeffs: &[f64], t: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * t + c)
}

/// `(sup |p'|, sup |p''|)` bounds over `[-1, 1]` for monomial coefficients.
pub(crate) fn monomial_derivative_bounds(coeffs: &[f64]) -> (f64, f64) {
    coeffs.iter().enumerate().fold((0.0, 0.0), |(l1, l2), (m, c)| {
        let m = m as f64;
        (l1 + c.abs() * m, l2 + c.abs() * m * (m - 1.0).max(0.0))
    })
}
