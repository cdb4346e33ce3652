//! The obstruction vector and its closed polynomial form.
//!
//! For a pair of a polytope and a weighted list of facet divisors, the
//! vector
//!
//! ```text
//! Q_i = E(i) * (2i * ∫_P x dν + Σ_t (1 - β_t) ∫_{F_t} x dσ)
//!     - (2i * Vol(P) + Σ_t (1 - β_t) Vol(F_t)) * Σ_{a ∈ P ∩ (Z/i)^n} a
//! ```
//!
//! must vanish for every positive dilation `i` if the pair is
//! asymptotically log Chow semistable. Both the count `E(i)` and the
//! lattice sum are polynomials in `i`, so `Q` itself is assembled as a
//! vector polynomial and checked against directly computed samples.

use num_traits::{One, Zero};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::LatticePolytope;
use crate::measures;
use crate::poly::{Poly, VecPoly};
use crate::rational::{add_points, rat_int, scale_point, zero_point, Rat, RatPoint};

/// A toric divisor: a facet index with a cone angle `β ∈ (0, 1]`. The
/// divisor enters all formulas with weight `1 - β`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DivisorSpec {
    pub facet_index: usize,
    pub beta: Rat,
}

pub fn validate_divisors(polytope: &LatticePolytope, divisors: &[DivisorSpec]) -> Result<()> {
    let count = polytope.facet_count();
    let mut seen = BTreeSet::new();
    for d in divisors {
        if d.facet_index >= count {
            return Err(Error::BadFacetIndex {
                index: d.facet_index,
                count,
            });
        }
        if !seen.insert(d.facet_index) {
            return Err(Error::InvalidInput(format!(
                "facet index {} appears twice in the divisor list",
                d.facet_index
            )));
        }
        if d.beta <= Rat::zero() || d.beta > Rat::one() {
            return Err(Error::InvalidInput(format!(
                "cone angle {} is outside (0, 1]",
                crate::rational::format_rat(&d.beta)
            )));
        }
    }
    Ok(())
}

/// Aggregated divisor data: `Σ (1-β_t) Vol(F_t)` and `Σ (1-β_t) ∫_{F_t} x dσ`.
pub(crate) struct DivisorMeasures {
    pub weighted_volume: Rat,
    pub weighted_moment: RatPoint,
}

pub(crate) fn divisor_measures(
    polytope: &LatticePolytope,
    divisors: &[DivisorSpec],
) -> Result<DivisorMeasures> {
    validate_divisors(polytope, divisors)?;
    let n = polytope.dim();
    let mut weighted_volume = Rat::zero();
    let mut weighted_moment = zero_point(n);
    for d in divisors {
        let facet = polytope.facet(d.facet_index)?;
        let w = Rat::one() - &d.beta;
        weighted_volume += &w * measures::facet_volume(&facet);
        weighted_moment = add_points(&weighted_moment, &scale_point(&w, &measures::facet_moment(&facet)));
    }
    Ok(DivisorMeasures {
        weighted_volume,
        weighted_moment,
    })
}

/// `Σ_{a ∈ P ∩ (Z/i)^n} a`, exactly.
pub fn lattice_sum(polytope: &LatticePolytope, i: u64) -> RatPoint {
    let mut total = zero_point(polytope.dim());
    for a in polytope.lattice_points(i) {
        total = add_points(&total, &a);
    }
    total
}

/// The obstruction vector at a fixed dilation `i`.
pub fn q_vector(
    polytope: &LatticePolytope,
    divisors: &[DivisorSpec],
    i: u64,
) -> Result<RatPoint> {
    assert!(i >= 1);
    let div = divisor_measures(polytope, divisors)?;
    let e = Rat::from_integer(polytope.ehrhart_count(i).into());
    let two_i = rat_int(2 * i as i64);
    let moment_part = add_points(
        &scale_point(&two_i, &measures::moment(polytope)),
        &div.weighted_moment,
    );
    let volume_part = &two_i * measures::volume(polytope) + &div.weighted_volume;
    let sum = lattice_sum(polytope, i);
    Ok(add_points(
        &scale_point(&e, &moment_part),
        &scale_point(&(-volume_part), &sum),
    ))
}

/// The count `i -> #(P ∩ (Z/i)^n)` in closed form: a degree-n polynomial
/// interpolated through `E(0) = 1` and `i = 1..=n+1`, then verified
/// against one extra enumerated sample.
pub fn ehrhart_polynomial(polytope: &LatticePolytope) -> Result<Poly> {
    let n = polytope.dim();
    let mut nodes = vec![(Rat::zero(), Rat::one())];
    for i in 1..=(n as u64 + 1) {
        nodes.push((
            Rat::from_integer(i.into()),
            Rat::from_integer(polytope.ehrhart_count(i).into()),
        ));
    }
    let poly = Poly::interpolate(&nodes);
    if poly.degree() != Some(n) {
        return Err(Error::VerificationFailed(format!(
            "count polynomial has degree {:?}, expected {}",
            poly.degree(),
            n
        )));
    }
    let check = n as u64 + 2;
    if poly.eval_u64(check) != Rat::from_integer(polytope.ehrhart_count(check).into()) {
        return Err(Error::VerificationFailed(
            "count polynomial fails at the verification sample".into(),
        ));
    }
    Ok(poly)
}

/// The lattice sum `i -> Σ_{a ∈ P ∩ (Z/i)^n} a` in closed form, degree at
/// most n+1, interpolated through `i = 1..=n+3` and verified at `n+4`.
pub fn lattice_sum_polynomial(polytope: &LatticePolytope) -> Result<VecPoly> {
    let n = polytope.dim();
    let nodes: Vec<(Rat, RatPoint)> = (1..=(n as u64 + 3))
        .map(|i| (Rat::from_integer(i.into()), lattice_sum(polytope, i)))
        .collect();
    let poly = VecPoly::interpolate(&nodes);
    if poly.degree().is_some_and(|d| d > n + 1) {
        return Err(Error::VerificationFailed(format!(
            "lattice sum polynomial has degree {:?}, expected at most {}",
            poly.degree(),
            n + 1
        )));
    }
    let check = n as u64 + 4;
    if poly.eval_u64(check) != lattice_sum(polytope, check) {
        return Err(Error::VerificationFailed(
            "lattice sum polynomial fails at the verification sample".into(),
        ));
    }
    Ok(poly)
}

/// The obstruction vector as a polynomial in the dilation parameter.
#[derive(Debug, Clone)]
pub struct QPolynomial {
    pub components: VecPoly,
}

impl QPolynomial {
    pub fn degree(&self) -> Option<usize> {
        self.components.degree()
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_zero()
    }

    pub fn eval_u64(&self, i: u64) -> RatPoint {
        self.components.eval_u64(i)
    }

    /// Coefficient vectors for powers `i^0..`, zero-padded.
    pub fn coefficient_vectors(&self) -> Vec<RatPoint> {
        self.components.coefficient_vectors()
    }
}

/// Assembles `Q` in closed form from the count and lattice-sum
/// polynomials, verified against direct evaluation at `i = 1..=n+3`.
pub fn q_polynomial(
    polytope: &LatticePolytope,
    divisors: &[DivisorSpec],
) -> Result<QPolynomial> {
    let n = polytope.dim();
    let div = divisor_measures(polytope, divisors)?;
    let e_poly = ehrhart_polynomial(polytope)?;
    let s_poly = lattice_sum_polynomial(polytope)?;
    let moment = measures::moment(polytope);
    let vol = measures::volume(polytope);
    let two = rat_int(2);

    let components = (0..n)
        .map(|c| {
            // E(i) * (2 M_c i + D_c)  -  (2 V i + DV) * S_c(i)
            let lhs = e_poly
                .shift_up()
                .scale(&(&two * &moment[c]))
                .add(&e_poly.scale(&div.weighted_moment[c]));
            let s_c = &s_poly.components[c];
            let rhs = s_c
                .shift_up()
                .scale(&(&two * &vol))
                .add(&s_c.scale(&div.weighted_volume));
            lhs.add(&rhs.scale(&rat_int(-1)))
        })
        .collect();
    let q = QPolynomial {
        components: VecPoly { components },
    };
    if q.degree().is_some_and(|d| d > n + 1) {
        return Err(Error::VerificationFailed(format!(
            "obstruction polynomial has degree {:?}, expected at most {}",
            q.degree(),
            n + 1
        )));
    }
    for i in 1..=(n as u64 + 3) {
        if q.eval_u64(i) != q_vector(polytope, divisors, i)? {
            return Err(Error::VerificationFailed(format!(
                "obstruction polynomial disagrees with direct evaluation at i = {i}"
            )));
        }
    }
    Ok(q)
}

/// Outcome of the all-dilations obstruction test.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AsymptoticVerdict {
    /// `Q` is identically zero: the necessary condition holds.
    ObstructionVanishes,
    /// `Q` is nonzero at the given dilation: the pair is asymptotically
    /// log Chow unstable.
    ObstructedAt(u64),
}

pub fn asymptotic_verdict(
    polytope: &LatticePolytope,
    divisors: &[DivisorSpec],
) -> Result<AsymptoticVerdict> {
    let q = q_polynomial(polytope, divisors)?;
    if q.is_zero() {
        return Ok(AsymptoticVerdict::ObstructionVanishes);
    }
    let degree = q.degree().unwrap_or(0) as u64;
    for i in 1..=(degree + 2) {
        if q.eval_u64(i).iter().any(|c| !c.is_zero()) {
            return Ok(AsymptoticVerdict::ObstructedAt(i));
        }
    }
    Err(Error::VerificationFailed(
        "nonzero obstruction polynomial with no nonzero small sample".into(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HalfSpace;
    use crate::rational::{rat, Int};

    fn interval(lo: i64, hi: i64) -> LatticePolytope {
        LatticePolytope::from_halfspaces(vec![
            HalfSpace::new(vec![Int::from(1)], Int::from(-lo)).unwrap(),
            HalfSpace::new(vec![Int::from(-1)], Int::from(hi)).unwrap(),
        ])
        .unwrap()
    }

    fn hirzebruch() -> LatticePolytope {
        LatticePolytope::from_halfspaces(vec![
            HalfSpace::new(vec![Int::from(-1), Int::from(-1)], Int::from(1)).unwrap(),
            HalfSpace::new(vec![Int::from(1), Int::from(0)], Int::from(1)).unwrap(),
            HalfSpace::new(vec![Int::from(1), Int::from(1)], Int::from(1)).unwrap(),
            HalfSpace::new(vec![Int::from(0), Int::from(1)], Int::from(1)).unwrap(),
        ])
        .unwrap()
    }

    fn endpoint_divisors(beta0: Rat, beta1: Rat) -> Vec<DivisorSpec> {
        vec![
            DivisorSpec {
                facet_index: 0,
                beta: beta0,
            },
            DivisorSpec {
                facet_index: 1,
                beta: beta1,
            },
        ]
    }

    fn hirzebruch_divisors() -> Vec<DivisorSpec> {
        // D_1 = {x = -1} is facet 1, D_2 = {y = -1} is facet 3,
        // D_inf = {x + y = 1} is facet 0 in the input facet order.
        vec![
            DivisorSpec {
                facet_index: 1,
                beta: rat(13, 14),
            },
            DivisorSpec {
                facet_index: 3,
                beta: rat(13, 14),
            },
            DivisorSpec {
                facet_index: 0,
                beta: rat(5, 7),
            },
        ]
    }

    #[test]
    fn unit_interval_matches_closed_form() {
        let p = interval(0, 1);
        for (b0, b1) in [(rat(1, 2), rat(1, 3)), (rat(13, 14), rat(5, 7)), (rat(1, 1), rat(1, 2))] {
            for i in 1..=6u64 {
                let q = q_vector(&p, &endpoint_divisors(b0.clone(), b1.clone()), i).unwrap();
                let expected = rat(1, 2)
                    * Rat::from_integer((i + 1).into())
                    * (&b0 - &b1);
                assert_eq!(q, vec![expected], "i = {i}");
            }
        }
    }

    #[test]
    fn symmetric_interval_variant() {
        let p = interval(-1, 1);
        for i in 1..=4u64 {
            let q = q_vector(&p, &endpoint_divisors(rat(1, 2), rat(1, 3)), i).unwrap();
            let expected = Rat::from_integer((2 * i + 1).into()) * (rat(1, 2) - rat(1, 3));
            assert_eq!(q, vec![expected]);
        }
    }

    #[test]
    fn centrally_symmetric_square_vanishes() {
        let p = LatticePolytope::from_vertices(vec![
            vec![Int::from(-1), Int::from(-1)],
            vec![Int::from(1), Int::from(-1)],
            vec![Int::from(-1), Int::from(1)],
            vec![Int::from(1), Int::from(1)],
        ])
        .unwrap();
        for i in 1..=4 {
            let q = q_vector(&p, &[], i).unwrap();
            assert!(q.iter().all(|c| c.is_zero()));
        }
        assert_eq!(
            asymptotic_verdict(&p, &[]).unwrap(),
            AsymptoticVerdict::ObstructionVanishes
        );
    }

    #[test]
    fn ehrhart_polynomials() {
        let square = LatticePolytope::from_vertices(vec![
            vec![Int::from(0), Int::from(0)],
            vec![Int::from(1), Int::from(0)],
            vec![Int::from(0), Int::from(1)],
            vec![Int::from(1), Int::from(1)],
        ])
        .unwrap();
        assert_eq!(
            ehrhart_polynomial(&square).unwrap().coeffs,
            vec![rat(1, 1), rat(2, 1), rat(1, 1)]
        );
        let h = ehrhart_polynomial(&hirzebruch()).unwrap();
        assert_eq!(h.coeffs, vec![rat(1, 1), rat(4, 1), rat(4, 1)]);
    }

    #[test]
    fn hirzebruch_lattice_sum_closed_form() {
        let p = hirzebruch();
        assert_eq!(lattice_sum(&p, 1), vec![rat(1, 1), rat(1, 1)]);
        let s = lattice_sum_polynomial(&p).unwrap();
        // each component is (2i+1)(i+1)/6 = (2i^2 + 3i + 1)/6
        for c in &s.components {
            assert_eq!(c.coeffs, vec![rat(1, 6), rat(1, 2), rat(1, 3)]);
        }
    }

    #[test]
    fn hirzebruch_obstruction_values() {
        let p = hirzebruch();
        let divisors = hirzebruch_divisors();
        // hand-checked from the exact facet measures: both components are
        // (10 i + 5) / 21
        for i in 1..=5u64 {
            let q = q_vector(&p, &divisors, i).unwrap();
            let expected = rat(10 * i as i64 + 5, 21);
            assert_eq!(q, vec![expected.clone(), expected], "i = {i}");
        }
        let poly = q_polynomial(&p, &divisors).unwrap();
        assert!(poly.degree() <= Some(1));
        assert_eq!(
            asymptotic_verdict(&p, &divisors).unwrap(),
            AsymptoticVerdict::ObstructedAt(1)
        );
    }

    #[test]
    fn q_polynomial_matches_direct_values_everywhere() {
        let p = interval(0, 1);
        let divisors = endpoint_divisors(rat(1, 1), rat(1, 2));
        let poly = q_polynomial(&p, &divisors).unwrap();
        assert_eq!(
            poly.coefficient_vectors(),
            vec![vec![rat(1, 4)], vec![rat(1, 4)]]
        );
        for i in 1..=10 {
            assert_eq!(poly.eval_u64(i), q_vector(&p, &divisors, i).unwrap());
        }
    }

    #[test]
    fn beta_one_reduces_to_divisor_free() {
        let p = hirzebruch();
        let all_one = vec![
            DivisorSpec {
                facet_index: 0,
                beta: rat(1, 1),
            },
            DivisorSpec {
                facet_index: 2,
                beta: rat(1, 1),
            },
        ];
        for i in 1..=4 {
            assert_eq!(
                q_vector(&p, &all_one, i).unwrap(),
                q_vector(&p, &[], i).unwrap()
            );
        }
    }

    #[test]
    fn affine_in_each_weight() {
        // Q_i at (β) interpolates linearly between β = 1 and any β.
        let p = interval(0, 1);
        let i = 3;
        let q_at = |b0: Rat| {
            q_vector(&p, &endpoint_divisors(b0, rat(1, 2)), i).unwrap()[0].clone()
        };
        let q1 = q_at(rat(1, 1));
        let q_half = q_at(rat(1, 2));
        // midpoint in (1 - β) space: β = 3/4
        let q_mid = q_at(rat(3, 4));
        assert_eq!(&q_mid * rat(2, 1), q1 + q_half);
    }

    #[test]
    fn divisor_validation_errors() {
        let p = interval(0, 1);
        let bad_index = vec![DivisorSpec {
            facet_index: 7,
            beta: rat(1, 2),
        }];
        assert!(matches!(
            q_vector(&p, &bad_index, 1),
            Err(Error::BadFacetIndex { index: 7, count: 2 })
        ));
        let bad_beta = vec![DivisorSpec {
            facet_index: 0,
            beta: rat(3, 2),
        }];
        assert!(matches!(q_vector(&p, &bad_beta, 1), Err(Error::InvalidInput(_))));
        let dup = vec![
            DivisorSpec {
                facet_index: 0,
                beta: rat(1, 2),
            },
            DivisorSpec {
                facet_index: 0,
                beta: rat(1, 3),
            },
        ];
        assert!(matches!(q_vector(&p, &dup, 1), Err(Error::InvalidInput(_))));
    }
}
