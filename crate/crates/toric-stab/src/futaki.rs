//! Log Futaki invariants of toric test configurations.
//!
//! Every rational convex piecewise-linear function on the polytope induces
//! a test configuration; its log Futaki invariant is an explicit rational
//! combination of interior and boundary integrals. The consistency check
//! ties the invariant to the fixed-dilation margins: the margin of
//! `g = -h` grows like (dilation)^n times the volume times the negated
//! Futaki expression, so semistability at all large dilations forces the
//! expression to be nonpositive.

use num_traits::{One, Zero};

use crate::envelope::{concave_envelope, LatticeFunction, PLFunction};
use crate::error::{Error, Result};
use crate::geometry::LatticePolytope;
use crate::measures;
use crate::obstruction::{validate_divisors, DivisorSpec};
use crate::poly::Poly;
use crate::rational::{ceil_rat, format_point, Int, Rat};
use crate::stability::MarginFunctional;

/// A rational convex piecewise-linear function, held as the concave
/// envelope of its negative, together with an integer upper bound.
#[derive(Debug, Clone)]
pub struct ConvexPLFunction {
    negated: PLFunction,
    /// An integer `R` with `h <= R` on the polytope.
    pub bound: Int,
}

impl ConvexPLFunction {
    /// Accepts values of `h` on the scale-`k` lattice; fails with
    /// `NotConvex` unless `-h` equals its own concave envelope there.
    pub fn new(polytope: &LatticePolytope, data: LatticeFunction) -> Result<Self> {
        let negated_data = LatticeFunction::new(
            polytope,
            data.scale,
            data.values.iter().map(|v| -v.clone()).collect(),
        )?;
        let envelope = concave_envelope(&negated_data);
        if let Some(k) = (0..negated_data.len())
            .find(|&k| envelope.values.values[k] != negated_data.values[k])
        {
            return Err(Error::NotConvex(format_point(&negated_data.points[k])));
        }
        // A convex function attains its maximum at a vertex, and vertices
        // are lattice points at every scale.
        let max = data
            .values
            .iter()
            .max()
            .cloned()
            .unwrap_or_else(Rat::zero);
        Ok(Self {
            negated: envelope,
            bound: ceil_rat(&max),
        })
    }

    pub fn scale(&self) -> u64 {
        self.negated.scale()
    }

    pub fn eval(&self, x: &[Rat]) -> Rat {
        -self.negated.eval(x)
    }

    /// The concave function `-h` with its cell complex.
    pub fn negated(&self) -> &PLFunction {
        &self.negated
    }

    /// `-h` as lattice data at a refined scale (any multiple of the
    /// crease scale), still equal to its own envelope.
    pub fn negated_at_scale(
        &self,
        polytope: &LatticePolytope,
        scale: u64,
    ) -> Result<PLFunction> {
        if !scale.is_multiple_of(self.scale()) {
            return Err(Error::CreaseMismatch {
                function_scale: self.scale(),
                requested: scale,
            });
        }
        let data = LatticeFunction::from_fn(polytope, scale, |x| self.negated.eval(x));
        let envelope = concave_envelope(&data);
        if envelope.values.values != data.values {
            return Err(Error::VerificationFailed(
                "refined concave data changed under the envelope".into(),
            ));
        }
        Ok(envelope)
    }

    pub fn integral(&self, polytope: &LatticePolytope) -> Result<Rat> {
        Ok(-measures::integrate_pl(polytope, &self.negated)?)
    }

    pub fn boundary_integral(&self, polytope: &LatticePolytope) -> Result<Rat> {
        Ok(-measures::integrate_pl_boundary(polytope, &self.negated)?)
    }

    pub fn facet_integral(&self, polytope: &LatticePolytope, facet_index: usize) -> Result<Rat> {
        let facet = polytope.facet(facet_index)?;
        Ok(-measures::integrate_pl_facet(polytope, &facet, &self.negated)?)
    }
}

/// The toric log Futaki expression
/// `(Vol(∂P)/Vol(P)) ∫_P h dν - ∫_{∂P} h dσ
///  + Σ_t (1-β_t) (∫_{F_t} h dσ - (Vol(F_t)/Vol(P)) ∫_P h dν)`.
/// The pair is log K-semistable for toric degenerations iff this is <= 0
/// for every rational convex piecewise-linear `h`.
pub fn log_futaki_toric(
    polytope: &LatticePolytope,
    divisors: &[DivisorSpec],
    h: &ConvexPLFunction,
) -> Result<Rat> {
    validate_divisors(polytope, divisors)?;
    let volume = measures::volume(polytope);
    let interior = h.integral(polytope)?;
    let mut value = measures::boundary_volume(polytope) / &volume * &interior
        - h.boundary_integral(polytope)?;
    for d in divisors {
        let facet = polytope.facet(d.facet_index)?;
        let weight = Rat::one() - &d.beta;
        value += weight
            * (h.facet_integral(polytope, d.facet_index)?
                - measures::facet_volume(&facet) / &volume * &interior);
    }
    Ok(value)
}

/// Leading terms of the dimension and weight expansions of the test
/// configuration induced by `h`, evaluated exactly at one dilation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionTerms {
    pub d_k: Rat,
    pub w_k: Rat,
    pub d_tilde_k: Rat,
    pub w_tilde_k: Rat,
}

fn power(base: u64, exp: usize) -> Rat {
    let mut p = Rat::one();
    for _ in 0..exp {
        p *= Rat::from_integer(Int::from(base));
    }
    p
}

pub fn expansions(
    polytope: &LatticePolytope,
    facet_index: usize,
    h: &ConvexPLFunction,
    k: u64,
) -> Result<ExpansionTerms> {
    let c = expansion_coefficients(polytope, facet_index, h)?;
    let n = polytope.dim();
    Ok(ExpansionTerms {
        d_k: &c.a0 * power(k, n) + &c.a1 * power(k, n - 1),
        w_k: &c.b0 * power(k, n + 1) + &c.b1 * power(k, n),
        d_tilde_k: &c.a0_tilde * power(k, n - 1),
        w_tilde_k: &c.b0_tilde * power(k, n),
    })
}

/// Expansion coefficients of the induced test configuration: `a0, a1`
/// from the dimension count, `b0, b1` from the total weight, tilde values
/// from the divisor, and the integer shift `R`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionCoefficients {
    pub a0: Rat,
    pub a1: Rat,
    pub b0: Rat,
    pub b1: Rat,
    pub a0_tilde: Rat,
    pub b0_tilde: Rat,
    pub shift: Int,
}

pub fn expansion_coefficients(
    polytope: &LatticePolytope,
    facet_index: usize,
    h: &ConvexPLFunction,
) -> Result<ExpansionCoefficients> {
    let facet = polytope.facet(facet_index)?;
    let r = Rat::from_integer(h.bound.clone());
    let volume = measures::volume(polytope);
    let boundary = measures::boundary_volume(polytope);
    let half = Rat::new(Int::one(), Int::from(2));
    let b0 = &r * &volume - h.integral(polytope)?;
    let b1 = &half * (&r * &boundary - h.boundary_integral(polytope)?);
    let facet_vol = measures::facet_volume(&facet);
    let b0_tilde = &r * &facet_vol - h.facet_integral(polytope, facet_index)?;
    Ok(ExpansionCoefficients {
        a0: volume,
        a1: half * boundary,
        b0,
        b1,
        a0_tilde: facet_vol,
        b0_tilde,
        shift: h.bound.clone(),
    })
}

/// `2 (a1/a0 * b0 - b1) + (1 - β)(b̃0 - ã0/a0 * b0)`. Against the toric
/// expansion data this equals the negative of `log_futaki_toric`; the
/// shift `R` cancels exactly.
pub fn futaki_from_expansions(c: &ExpansionCoefficients, beta: &Rat) -> Rat {
    let two = Rat::from_integer(Int::from(2));
    two * (&c.a1 / &c.a0 * &c.b0 - &c.b1)
        + (Rat::one() - beta) * (&c.b0_tilde - &c.a0_tilde / &c.a0 * &c.b0)
}

/// Exact margins of `g = -h` along a dilation ladder, their polynomial
/// fit, and the comparison of the extracted leading coefficient with the
/// Futaki expression.
#[derive(Debug, Clone)]
pub struct ConsistencyReport {
    /// `(j, margin at dilation j * base_scale)` samples.
    pub margins: Vec<(u64, Rat)>,
    /// The margin as a polynomial in `j`; exact through all samples.
    pub fitted: Poly,
    /// Coefficient of `j^n` in the fit.
    pub leading: Rat,
    /// `leading / (base_scale^n * Vol(P))`.
    pub leading_normalized: Rat,
    /// The same coefficient under the half-volume normalization, for
    /// reference alongside the printed expansion convention.
    pub leading_over_half_volume: Rat,
    pub futaki_value: Rat,
    /// True iff `leading_normalized == -futaki_value`.
    pub pass: bool,
}

/// Computes margins of `g = -h` at dilations `j * base_scale` for each
/// `j` in `j_list`, fits the exact polynomial, and compares its leading
/// coefficient against the Futaki expression. `base_scale` must be a
/// multiple of the crease scale of `h`; `j_list` must contain at least
/// `n + 2` values so the degree-≤-n fit is overdetermined.
pub fn asymptotic_consistency_check(
    polytope: &LatticePolytope,
    divisors: &[DivisorSpec],
    h: &ConvexPLFunction,
    base_scale: u64,
    j_list: &[u64],
) -> Result<ConsistencyReport> {
    let n = polytope.dim();
    if !base_scale.is_multiple_of(h.scale()) {
        return Err(Error::CreaseMismatch {
            function_scale: h.scale(),
            requested: base_scale,
        });
    }
    if j_list.len() < n + 2 {
        return Err(Error::InvalidInput(format!(
            "need at least {} dilation samples, got {}",
            n + 2,
            j_list.len()
        )));
    }
    let mut margins = Vec::new();
    for &j in j_list {
        if j == 0 {
            return Err(Error::InvalidInput("dilation samples must be positive".into()));
        }
        let scale = j * base_scale;
        let g = h.negated_at_scale(polytope, scale)?;
        let functional = MarginFunctional::new(polytope, divisors, scale)?;
        margins.push((j, functional.margin(polytope, &g)?));
    }
    let nodes: Vec<(Rat, Rat)> = margins
        .iter()
        .map(|(j, m)| (Rat::from_integer(Int::from(*j)), m.clone()))
        .collect();
    let fitted = Poly::interpolate(&nodes);
    if fitted.degree().is_some_and(|d| d > n) {
        return Err(Error::VerificationFailed(format!(
            "margin samples fit degree {:?}, expected at most {}",
            fitted.degree(),
            n
        )));
    }
    let leading = fitted.coeffs.get(n).cloned().unwrap_or_else(Rat::zero);
    let volume = measures::volume(polytope);
    let norm = power(base_scale, n) * &volume;
    let leading_normalized = &leading / &norm;
    let leading_over_half_volume = &leading / (&norm / Rat::from_integer(Int::from(2)));
    let futaki_value = log_futaki_toric(polytope, divisors, h)?;
    let pass = leading_normalized == -futaki_value.clone();
    Ok(ConsistencyReport {
        margins,
        fitted,
        leading,
        leading_normalized,
        leading_over_half_volume,
        futaki_value,
        pass,
    })
}
