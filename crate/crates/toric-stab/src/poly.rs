//! Univariate polynomials with rational coefficients, used to put lattice
//! counts and sums into closed form via interpolation through exact
//! samples.

use num_traits::Zero;

use crate::rational::{format_rat, Rat};

/// Coefficients in ascending order; trailing zeros are trimmed so the
/// degree is well defined. The zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Poly {
    pub coeffs: Vec<Rat>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rat>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn eval(&self, x: &Rat) -> Rat {
        let mut acc = Rat::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_u64(&self, x: u64) -> Rat {
        self.eval(&Rat::from_integer(x.into()))
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.coeffs.len().max(other.coeffs.len());
        let mut out = vec![Rat::zero(); len];
        for (k, c) in self.coeffs.iter().enumerate() {
            out[k] += c;
        }
        for (k, c) in other.coeffs.iter().enumerate() {
            out[k] += c;
        }
        Poly::new(out)
    }

    pub fn scale(&self, c: &Rat) -> Poly {
        Poly::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    /// Multiplication by `x` (degree shift).
    pub fn shift_up(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rat::zero()];
        out.extend(self.coeffs.iter().cloned());
        Poly::new(out)
    }

    /// Division by `x`; requires a zero constant term.
    pub fn shift_down(&self) -> Option<Poly> {
        if self.is_zero() {
            return Some(Poly::zero());
        }
        if !self.coeffs[0].is_zero() {
            return None;
        }
        Some(Poly::new(self.coeffs[1..].to_vec()))
    }

    /// The unique polynomial of degree < nodes.len() through the samples.
    pub fn interpolate(nodes: &[(Rat, Rat)]) -> Poly {
        let mut acc = Poly::zero();
        for (k, (xk, yk)) in nodes.iter().enumerate() {
            // Lagrange basis polynomial for node k.
            let mut basis = Poly::new(vec![yk.clone()]);
            for (j, (xj, _)) in nodes.iter().enumerate() {
                if j == k {
                    continue;
                }
                let denom = xk - xj;
                // multiply by (x - xj) / (xk - xj)
                let shifted = basis.shift_up();
                let constant = basis.scale(&(-xj.clone()));
                basis = shifted.add(&constant).scale(&denom.recip());
            }
            acc = acc.add(&basis);
        }
        acc
    }

    /// Human-readable rendering in the variable `var`, highest power
    /// first, e.g. `(1/2)*i^2 + 1`.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let mut parts = Vec::new();
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let coeff = format_rat(c);
            let term = match k {
                0 => coeff,
                1 => format!("({coeff})*{var}"),
                _ => format!("({coeff})*{var}^{k}"),
            };
            parts.push(term);
        }
        parts.join(" + ")
    }
}

/// A vector-valued polynomial, one scalar polynomial per component.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VecPoly {
    pub components: Vec<Poly>,
}

impl VecPoly {
    pub fn eval_u64(&self, x: u64) -> Vec<Rat> {
        self.components.iter().map(|p| p.eval_u64(x)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    pub fn degree(&self) -> Option<usize> {
        self.components.iter().filter_map(Poly::degree).max()
    }

    /// Interpolates each component through shared nodes.
    pub fn interpolate(nodes: &[(Rat, Vec<Rat>)]) -> VecPoly {
        let dim = nodes.first().map_or(0, |(_, v)| v.len());
        let components = (0..dim)
            .map(|c| {
                let scalar_nodes: Vec<(Rat, Rat)> = nodes
                    .iter()
                    .map(|(x, v)| (x.clone(), v[c].clone()))
                    .collect();
                Poly::interpolate(&scalar_nodes)
            })
            .collect();
        VecPoly { components }
    }

    /// Coefficient vectors for powers `0..=deg` (zero-padded).
    pub fn coefficient_vectors(&self) -> Vec<Vec<Rat>> {
        let deg = self.degree().map_or(0, |d| d + 1);
        (0..deg)
            .map(|k| {
                self.components
                    .iter()
                    .map(|p| p.coeffs.get(k).cloned().unwrap_or_else(Rat::zero))
                    .collect()
            })
            .collect()
    }
}
