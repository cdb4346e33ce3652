//! Exact torus-semistability decision at a fixed dilation.
//!
//! The pair is semistable at dilation `i` iff the margin
//!
//! ```text
//! margin(g) = E(i) (2i ∫_P g dν + Σ_t (1-β_t) ∫_{F_t} g dσ)
//!           - (2i Vol(P) + Σ_t (1-β_t) Vol(F_t)) Σ_a g(a)
//! ```
//!
//! is nonnegative for every concave piecewise-linear `g` induced by values
//! on the scale-`i` lattice. Quantification reduces to the concavity cone
//! of value vectors; adding affine functions shifts the margin by
//! `<u, Q_i>`, so once the obstruction vector vanishes the search lives in
//! the compact section {cone, Σv = 0, Σ v·a = 0, |v| <= 1}.
//!
//! On the cone the envelope integral is the maximum of the fixed-complex
//! interpolation integrals, one linear functional per triangulation, so
//! the margin is a *convex* piecewise-linear function of the values. In
//! dimension one the envelope of concave data interpolates every node, a
//! single linear functional, and the minimum over the section is attained
//! at a section vertex: double-description enumeration decides exactly.
//! In dimension two vertex evaluation still refutes (any negative margin
//! is a witness) but cannot certify a minimum of a convex function, so a
//! semistable conclusion is certified by a support-function membership
//! loop: the margin is the support function of a Minkowski combination of
//! secondary polytopes, the envelope complex at a probe direction yields
//! the maximizing linear functional as an explicit point, and exact
//! phase-one simplex either expresses the origin as a convex combination
//! of collected points (semistable) or separates it, producing the next
//! probe. Both outcomes terminate with an exact certificate.

use num_traits::{One, Signed, Zero};

use rand::Rng;
use rand::SeedableRng;

use crate::envelope::{concave_envelope, concavity_cone, LatticeFunction, PLFunction};
use crate::error::{Error, Result};
use crate::geometry::{Facet, LatticePolytope};
use crate::lp::{origin_in_convex_hull, ConvexHullMembership};
use crate::measures;
use crate::obstruction::{self, DivisorSpec};
use crate::rational::{dot, norm_sq, rat_int, Int, Rat, RatPoint};

/// Cached measure data entering the margin at a fixed dilation.
#[derive(Debug, Clone)]
pub struct MarginFunctional {
    pub scale: u64,
    pub ehrhart: Rat,
    pub volume: Rat,
    pub weighted_facet_volume: Rat,
    divisor_facets: Vec<(Facet, Rat)>,
    lattice: Vec<RatPoint>,
}

impl MarginFunctional {
    pub fn new(
        polytope: &LatticePolytope,
        divisors: &[DivisorSpec],
        scale: u64,
    ) -> Result<Self> {
        assert!(scale >= 1);
        obstruction::validate_divisors(polytope, divisors)?;
        let mut divisor_facets = Vec::new();
        let mut weighted_facet_volume = Rat::zero();
        for d in divisors {
            let facet = polytope.facet(d.facet_index)?;
            let weight = Rat::one() - &d.beta;
            weighted_facet_volume += &weight * measures::facet_volume(&facet);
            divisor_facets.push((facet, weight));
        }
        Ok(Self {
            scale,
            ehrhart: Rat::from_integer(polytope.ehrhart_count(scale).into()),
            volume: measures::volume(polytope),
            weighted_facet_volume,
            divisor_facets,
            lattice: polytope.lattice_points(scale),
        })
    }

    /// Recomputes every cached quantity from scratch and compares.
    pub fn verify_cache(
        &self,
        polytope: &LatticePolytope,
        divisors: &[DivisorSpec],
    ) -> Result<()> {
        let fresh = Self::new(polytope, divisors, self.scale)?;
        if fresh.ehrhart != self.ehrhart
            || fresh.volume != self.volume
            || fresh.weighted_facet_volume != self.weighted_facet_volume
            || fresh.lattice != self.lattice
        {
            return Err(Error::VerificationFailed(
                "cached margin data does not match recomputation".into(),
            ));
        }
        Ok(())
    }

    /// The multiplier of `Σ g(a)`: `2i Vol(P) + Σ (1-β_t) Vol(F_t)`.
    pub fn sum_coefficient(&self) -> Rat {
        rat_int(2 * self.scale as i64) * &self.volume + &self.weighted_facet_volume
    }

    /// Exact margin of a concave piecewise-linear function at this scale.
    pub fn margin(&self, polytope: &LatticePolytope, g: &PLFunction) -> Result<Rat> {
        if g.scale() != self.scale {
            return Err(Error::ScaleMismatch {
                expected: self.scale,
                got: g.scale(),
            });
        }
        let mut weighted = rat_int(2 * self.scale as i64) * measures::integrate_pl(polytope, g)?;
        for (facet, weight) in &self.divisor_facets {
            weighted += weight * measures::integrate_pl_facet(polytope, facet, g)?;
        }
        let lattice_sum: Rat = g.values.values.iter().sum();
        Ok(&self.ehrhart * weighted - self.sum_coefficient() * lattice_sum)
    }

    /// The linear functional the margin takes on the envelope complex of
    /// `data`, presented as a vector over the lattice points, with the
    /// trailing sum read off the raw data. Its pairing with any value
    /// vector bounds the margin of that vector's envelope from below, and
    /// pairing with `data` itself recovers the raw-sum margin exactly.
    fn support_point(
        &self,
        polytope: &LatticePolytope,
        data: &LatticeFunction,
    ) -> Result<(RatPoint, Rat)> {
        let n = polytope.dim();
        let g = concave_envelope(data);
        let e = self.lattice.len();
        let index_of = |p: &RatPoint| -> usize {
            self.lattice.binary_search(p).expect("cell vertex is a lattice point")
        };

        let two_i = rat_int(2 * self.scale as i64);
        let mut w = vec![Rat::zero(); e];
        // interior part: d I_T / d v(a) = Σ_{cells at a} vol / (n+1)
        let per_vertex = Rat::new(Int::one(), Int::from(n as i64 + 1));
        for cell in &g.cells {
            let idx: Vec<usize> = (0..cell.vertices.len()).collect();
            let vol = crate::hull::simplex_volume(&cell.vertices, &idx, n);
            let share = &vol * &per_vertex * &two_i * &self.ehrhart;
            for v in &cell.vertices {
                w[index_of(v)] += &share;
            }
        }
        // facet parts
        for (facet, weight) in &self.divisor_facets {
            if facet.chart.facet_dim() == 0 {
                let p = crate::rational::int_to_rat_point(&facet.vertices[0]);
                w[index_of(&p)] += weight * &self.ehrhart;
                continue;
            }
            let mut seen = std::collections::BTreeSet::new();
            let per_face_vertex = Rat::new(Int::one(), Int::from(n as i64));
            for cell in &g.cells {
                let on_facet: Vec<RatPoint> = cell
                    .vertices
                    .iter()
                    .filter(|v| facet.halfspace.eval_rat(v).is_zero())
                    .cloned()
                    .collect();
                if on_facet.len() != n {
                    continue;
                }
                let mut key = on_facet.clone();
                key.sort();
                if !seen.insert(key) {
                    continue;
                }
                let chart: Vec<RatPoint> =
                    on_facet.iter().map(|v| facet.chart.to_chart(v)).collect();
                let idx: Vec<usize> = (0..chart.len()).collect();
                let vol = crate::hull::simplex_volume(&chart, &idx, n - 1);
                let share = &vol * &per_face_vertex * weight * &self.ehrhart;
                for v in &on_facet {
                    w[index_of(v)] += &share;
                }
            }
        }
        let c = self.sum_coefficient();
        for entry in w.iter_mut() {
            *entry -= &c;
        }
        // Raw-sum margin: envelope integrals against the raw value sum.
        let mut weighted = &two_i * measures::integrate_pl(polytope, &g)?;
        for (facet, weight) in &self.divisor_facets {
            weighted += weight * measures::integrate_pl_facet(polytope, facet, &g)?;
        }
        let raw_sum: Rat = data.values.iter().sum();
        let raw_margin = &self.ehrhart * weighted - &c * raw_sum;
        let paired = dot(&w, &data.values);
        if paired != raw_margin {
            return Err(Error::VerificationFailed(
                "support point does not reproduce the margin".into(),
            ));
        }
        Ok((w, raw_margin))
    }
}

/// Convenience wrapper building the functional and evaluating one margin.
pub fn margin(
    polytope: &LatticePolytope,
    divisors: &[DivisorSpec],
    scale: u64,
    g: &PLFunction,
) -> Result<Rat> {
    MarginFunctional::new(polytope, divisors, scale)?.margin(polytope, g)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecisionMode {
    Exact,
    LinearOnly,
    Sampled,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Decision {
    Semistable,
    Unstable,
    /// The mode could not certify either way (linear test passed, or
    /// sampling found no violation).
    Inconclusive,
}

/// Outcome of a semistability decision.
#[derive(Debug, Clone)]
pub struct StabilityVerdict {
    pub decision: Decision,
    pub mode: DecisionMode,
    /// True when the decision is backed by an exact certificate: a
    /// verified negative-margin witness, or an exhaustive minimum /
    /// membership certificate.
    pub certified: bool,
    /// The smallest margin among all evaluated candidates.
    pub margin_minimum: Option<Rat>,
    /// Value vector attaining the minimum, in lattice-point order.
    pub minimizer: Option<RatPoint>,
    /// Present iff `decision == Unstable`: a function with margin < 0.
    pub witness: Option<PLFunction>,
    pub note: Option<String>,
}

#[derive(Debug, Clone)]
pub struct DecideOptions {
    pub mode: DecisionMode,
    pub max_constraints: usize,
    pub seed: u64,
    pub samples: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        Self {
            mode: DecisionMode::LinearOnly,
            max_constraints: 1_000_000,
            seed: 0,
            samples: 500,
        }
    }
}

/// Decides semistability of the pair at dilation `i`.
pub fn decide_semistable(
    polytope: &LatticePolytope,
    divisors: &[DivisorSpec],
    scale: u64,
    options: &DecideOptions,
) -> Result<StabilityVerdict> {
    let functional = MarginFunctional::new(polytope, divisors, scale)?;
    match options.mode {
        DecisionMode::LinearOnly => {
            if let Some(verdict) =
                linear_refutation(polytope, divisors, &functional, DecisionMode::LinearOnly)?
            {
                return Ok(verdict);
            }
            Ok(StabilityVerdict {
                decision: Decision::Inconclusive,
                mode: DecisionMode::LinearOnly,
                certified: false,
                margin_minimum: None,
                minimizer: None,
                witness: None,
                note: Some(
                    "obstruction vector vanishes; escalate to exact or sampled mode".into(),
                ),
            })
        }
        DecisionMode::Sampled => sampled_search(polytope, &functional, options),
        DecisionMode::Exact => {
            if polytope.dim() > 2 {
                return Err(Error::TooLarge(
                    "exact mode is limited to dimensions 1 and 2; use linear or sampled".into(),
                ));
            }
            if let Some(verdict) =
                linear_refutation(polytope, divisors, &functional, DecisionMode::Exact)?
            {
                return Ok(verdict);
            }
            exact_decision(polytope, &functional, options)
        }
    }
}

/// When the obstruction vector is nonzero, `g(x) = <-Q_i, x>` destabilizes
/// with margin exactly `-|Q_i|^2`.
fn linear_refutation(
    polytope: &LatticePolytope,
    divisors: &[DivisorSpec],
    functional: &MarginFunctional,
    mode: DecisionMode,
) -> Result<Option<StabilityVerdict>> {
    let q = obstruction::q_vector(polytope, divisors, functional.scale)?;
    if q.iter().all(|c| c.is_zero()) {
        return Ok(None);
    }
    let data = LatticeFunction::from_fn(polytope, functional.scale, |x| {
        -q.iter().zip(x).map(|(qc, xc)| qc * xc).sum::<Rat>()
    });
    let witness = concave_envelope(&data);
    let value = functional.margin(polytope, &witness)?;
    if value != -norm_sq(&q) {
        return Err(Error::VerificationFailed(
            "linear witness margin is not -|Q|^2".into(),
        ));
    }
    Ok(Some(StabilityVerdict {
        decision: Decision::Unstable,
        mode,
        certified: true,
        margin_minimum: Some(value),
        minimizer: Some(data.values.clone()),
        witness: Some(witness),
        note: Some("nonzero obstruction vector; linear witness".into()),
    }))
}

/// Exact decision once the obstruction vector vanishes: enumerate the
/// vertices of the normalized cone section and evaluate the margin at
/// each. In dimension one this is exhaustive; in dimension two a
/// nonnegative vertex minimum is certified by the membership loop.
fn exact_decision(
    polytope: &LatticePolytope,
    functional: &MarginFunctional,
    options: &DecideOptions,
) -> Result<StabilityVerdict> {
    let n = polytope.dim();
    let scale = functional.scale;
    let cone = concavity_cone(polytope, scale, options.max_constraints)?;
    let points = &functional.lattice;
    let e = points.len();

    let mut inequalities: Vec<(RatPoint, Rat)> = Vec::new();
    for row in &cone.constraints {
        inequalities.push((
            row.iter().map(|c| Rat::from_integer(c.clone())).collect(),
            Rat::zero(),
        ));
    }
    for k in 0..e {
        let mut lo = vec![Rat::zero(); e];
        lo[k] = Rat::one();
        inequalities.push((lo, Rat::one())); // v_k >= -1
        let mut hi = vec![Rat::zero(); e];
        hi[k] = -Rat::one();
        inequalities.push((hi, Rat::one())); // v_k <= 1
    }
    let mut equalities: Vec<(RatPoint, Rat)> = Vec::new();
    equalities.push((vec![Rat::one(); e], Rat::zero())); // Σ v = 0
    for c in 0..n {
        let row: RatPoint = points.iter().map(|p| p[c].clone()).collect();
        equalities.push((row, Rat::zero())); // Σ v(a) a_c = 0
    }
    let section = crate::dd::LinearSystem {
        dim: e,
        inequalities,
        equalities,
    };
    let vertices = crate::dd::enumerate_vertices(&section, options.max_constraints)?;

    let mut best: Option<(Rat, RatPoint, PLFunction)> = None;
    for v in &vertices {
        let data = LatticeFunction::new(polytope, scale, v.clone())?;
        let g = concave_envelope(&data);
        if g.values.values != data.values {
            return Err(Error::VerificationFailed(
                "cone section vertex is not concave-feasible".into(),
            ));
        }
        let m = functional.margin(polytope, &g)?;
        if best.as_ref().is_none_or(|(b, _, _)| &m < b) {
            best = Some((m, v.clone(), g));
        }
    }
    // The zero vector is always feasible with margin zero.
    let (min_margin, minimizer, witness) = match best {
        Some(b) => b,
        None => {
            let data = LatticeFunction::new(polytope, scale, vec![Rat::zero(); e])?;
            let g = concave_envelope(&data);
            (Rat::zero(), vec![Rat::zero(); e], g)
        }
    };

    if min_margin.is_negative() {
        return Ok(StabilityVerdict {
            decision: Decision::Unstable,
            mode: DecisionMode::Exact,
            certified: true,
            margin_minimum: Some(min_margin),
            minimizer: Some(minimizer),
            witness: Some(witness),
            note: Some("negative margin at a cone-section vertex".into()),
        });
    }

    if n == 1 {
        // One-dimensional envelopes of concave data interpolate every
        // node, so the margin is linear on the section and the vertex
        // minimum is the global minimum.
        return Ok(StabilityVerdict {
            decision: Decision::Semistable,
            mode: DecisionMode::Exact,
            certified: true,
            margin_minimum: Some(min_margin),
            minimizer: Some(minimizer),
            witness: None,
            note: None,
        });
    }

    membership_certification(polytope, functional, options, min_margin, minimizer)
}

/// Support-function membership: semistable iff the origin lies in the
/// convex hull of the per-complex margin functionals.
fn membership_certification(
    polytope: &LatticePolytope,
    functional: &MarginFunctional,
    options: &DecideOptions,
    vertex_min: Rat,
    vertex_argmin: RatPoint,
) -> Result<StabilityVerdict> {
    let scale = functional.scale;
    let e = functional.lattice.len();
    let zero_data = LatticeFunction::new(polytope, scale, vec![Rat::zero(); e])?;
    let (w0, _) = functional.support_point(polytope, &zero_data)?;
    let mut pool: Vec<RatPoint> = vec![w0];
    let max_iterations = options.max_constraints.clamp(16, 4096);

    for _ in 0..max_iterations {
        match origin_in_convex_hull(&pool) {
            ConvexHullMembership::Inside(_) => {
                return Ok(StabilityVerdict {
                    decision: Decision::Semistable,
                    mode: DecisionMode::Exact,
                    certified: true,
                    margin_minimum: Some(vertex_min.clone()),
                    minimizer: Some(vertex_argmin),
                    witness: None,
                    note: Some(format!(
                        "membership certificate over {} support points",
                        pool.len()
                    )),
                });
            }
            ConvexHullMembership::Separated(v) => {
                let probe: RatPoint = v.iter().map(|x| -x.clone()).collect();
                let data = LatticeFunction::new(polytope, scale, probe)?;
                let (w, raw_margin) = functional.support_point(polytope, &data)?;
                if raw_margin.is_negative() {
                    // The envelope of the probe has an even smaller true
                    // margin: a verified witness.
                    let g = concave_envelope(&data);
                    let true_margin = functional.margin(polytope, &g)?;
                    if !true_margin.is_negative() {
                        return Err(Error::VerificationFailed(
                            "probe refutation did not survive re-evaluation".into(),
                        ));
                    }
                    return Ok(StabilityVerdict {
                        decision: Decision::Unstable,
                        mode: DecisionMode::Exact,
                        certified: true,
                        margin_minimum: Some(true_margin),
                        minimizer: Some(g.values.values.clone()),
                        witness: Some(g),
                        note: Some("destabilizing direction found by separation".into()),
                    });
                }
                if pool.contains(&w) {
                    return Err(Error::VerificationFailed(
                        "separation produced a repeated support point".into(),
                    ));
                }
                pool.push(w);
            }
        }
    }
    Err(Error::TooLarge(format!(
        "membership loop did not converge within {max_iterations} iterations"
    )))
}

/// Seeded random refutation search; never certifies semistability.
fn sampled_search(
    polytope: &LatticePolytope,
    functional: &MarginFunctional,
    options: &DecideOptions,
) -> Result<StabilityVerdict> {
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(options.seed);
    let scale = functional.scale;
    let e = functional.lattice.len();
    let mut best: Option<(Rat, RatPoint, PLFunction)> = None;
    for _ in 0..options.samples {
        let values: RatPoint = (0..e)
            .map(|_| {
                let numer: i64 = rng.random_range(-12..=12);
                let denom: i64 = rng.random_range(1..=4);
                Rat::new(Int::from(numer), Int::from(denom))
            })
            .collect();
        let data = LatticeFunction::new(polytope, scale, values)?;
        let g = concave_envelope(&data);
        let m = functional.margin(polytope, &g)?;
        if best.as_ref().is_none_or(|(b, _, _)| &m < b) {
            best = Some((m, g.values.values.clone(), g));
        }
    }
    let (min_margin, minimizer, witness) = best.expect("at least one sample");
    if min_margin.is_negative() {
        Ok(StabilityVerdict {
            decision: Decision::Unstable,
            mode: DecisionMode::Sampled,
            certified: true,
            margin_minimum: Some(min_margin),
            minimizer: Some(minimizer),
            witness: Some(witness),
            note: Some("random search found a verified negative margin".into()),
        })
    } else {
        Ok(StabilityVerdict {
            decision: Decision::Inconclusive,
            mode: DecisionMode::Sampled,
            certified: false,
            margin_minimum: Some(min_margin),
            minimizer: Some(minimizer),
            witness: None,
            note: Some(format!(
                "no violation among {} samples; not a certificate",
                options.samples
            )),
        })
    }
}

/// The affine hull of the weight polytope of the dilation-`i` embedding:
/// total mass `(n+1)! Vol(iP)` and first moment `(n+1)! ∫_{iP} x dν` over
/// the integer points of `iP`.
#[derive(Debug, Clone)]
pub struct AffineHullConstraints {
    pub scale: u64,
    /// Integer lattice points of `iP`, in lexicographic order.
    pub points: Vec<crate::rational::IntPoint>,
    /// Indices forced to zero (off-facet points of the facet variant).
    pub zero_indices: Vec<usize>,
    pub mass: Rat,
    pub moment: RatPoint,
}

fn factorial(k: usize) -> Rat {
    let mut f = Int::one();
    for j in 2..=k {
        f *= Int::from(j as i64);
    }
    Rat::from_integer(f)
}

fn power(base: u64, exp: usize) -> Rat {
    let mut p = Rat::one();
    for _ in 0..exp {
        p *= Rat::from_integer(Int::from(base));
    }
    p
}

pub fn affine_hull_constraints(polytope: &LatticePolytope, scale: u64) -> AffineHullConstraints {
    let n = polytope.dim();
    let points = polytope.lattice_points_scaled(scale);
    let fac = factorial(n + 1);
    // Vol(iP) = i^n Vol(P); ∫_{iP} x dν = i^{n+1} ∫_P x dν.
    let mass = &fac * power(scale, n) * measures::volume(polytope);
    let moment = crate::rational::scale_point(
        &(&fac * power(scale, n + 1)),
        &measures::moment(polytope),
    );
    AffineHullConstraints {
        scale,
        points,
        zero_indices: Vec::new(),
        mass,
        moment,
    }
}

pub fn affine_hull_constraints_facet(
    polytope: &LatticePolytope,
    facet_index: usize,
    scale: u64,
) -> Result<AffineHullConstraints> {
    let n = polytope.dim();
    let facet = polytope.facet(facet_index)?;
    let points = polytope.lattice_points_scaled(scale);
    let zero_indices: Vec<usize> = points
        .iter()
        .enumerate()
        .filter(|(_, b)| !facet.halfspace.eval_dilated(b, scale).is_zero())
        .map(|(k, _)| k)
        .collect();
    let fac = factorial(n);
    // Vol_σ(iF) = i^{n-1} Vol_σ(F); ∫_{iF} x dσ = i^n ∫_F x dσ.
    let mass = &fac * power(scale, n - 1) * measures::facet_volume(&facet);
    let moment = crate::rational::scale_point(
        &(&fac * power(scale, n)),
        &measures::facet_moment(&facet),
    );
    Ok(AffineHullConstraints {
        scale,
        points,
        zero_indices,
        mass,
        moment,
    })
}

/// The normalization constant of the weight-polytope membership test: the
/// scalar multiplying the all-ones vector.
#[derive(Debug, Clone)]
pub struct MembershipTarget {
    pub scalar: Rat,
    pub npoints: usize,
}

impl MembershipTarget {
    pub fn target_vector(&self) -> RatPoint {
        vec![self.scalar.clone(); self.npoints]
    }
}

pub fn membership_target(
    polytope: &LatticePolytope,
    divisors: &[DivisorSpec],
    scale: u64,
) -> Result<MembershipTarget> {
    obstruction::validate_divisors(polytope, divisors)?;
    let n = polytope.dim();
    let e = polytope.ehrhart_count(scale);
    let mut bracket = rat_int(2) * power(scale, n) * measures::volume(polytope);
    for d in divisors {
        let facet = polytope.facet(d.facet_index)?;
        bracket += (Rat::one() - &d.beta)
            * power(scale, n - 1)
            * measures::facet_volume(&facet);
    }
    let scalar = factorial(n) * factorial(n + 1) / Rat::from_integer(Int::from(e)) * bracket;
    Ok(MembershipTarget {
        scalar,
        npoints: e as usize,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::HalfSpace;
    use crate::rational::rat;

    fn interval() -> LatticePolytope {
        LatticePolytope::from_halfspaces(vec![
            HalfSpace::new(vec![Int::from(1)], Int::from(0)).unwrap(),
            HalfSpace::new(vec![Int::from(-1)], Int::from(1)).unwrap(),
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

    fn square_sym() -> LatticePolytope {
        LatticePolytope::from_vertices(vec![
            vec![Int::from(-1), Int::from(-1)],
            vec![Int::from(1), Int::from(-1)],
            vec![Int::from(-1), Int::from(1)],
            vec![Int::from(1), Int::from(1)],
        ])
        .unwrap()
    }

    #[test]
    fn constant_margin_vanishes() {
        let p = interval();
        let divisors = endpoint_divisors(rat(1, 2), rat(1, 3));
        for i in 1..=3 {
            let data = LatticeFunction::from_fn(&p, i, |_| rat(7, 5));
            let g = concave_envelope(&data);
            assert_eq!(margin(&p, &divisors, i, &g).unwrap(), rat(0, 1));
        }
    }

    #[test]
    fn linear_margin_is_q_pairing() {
        let p = interval();
        let divisors = endpoint_divisors(rat(1, 1), rat(1, 2));
        for i in 1..=4u64 {
            let u = rat(3, 2);
            let data = LatticeFunction::from_fn(&p, i, |x| &u * &x[0]);
            let g = concave_envelope(&data);
            let q = obstruction::q_vector(&p, &divisors, i).unwrap();
            assert_eq!(
                margin(&p, &divisors, i, &g).unwrap(),
                &u * &q[0],
                "i = {i}"
            );
        }
    }

    #[test]
    fn tent_margin_matches_hand_value() {
        let p = interval();
        let divisors = endpoint_divisors(rat(1, 2), rat(1, 2));
        let data = LatticeFunction::new(
            &p,
            2,
            vec![rat(0, 1), rat(1, 1), rat(0, 1)],
        )
        .unwrap();
        let g = concave_envelope(&data);
        assert_eq!(margin(&p, &divisors, 2, &g).unwrap(), rat(1, 1));
    }

    #[test]
    fn scale_mismatch_detected() {
        let p = interval();
        let data = LatticeFunction::from_fn(&p, 2, |_| rat(1, 1));
        let g = concave_envelope(&data);
        assert!(matches!(
            margin(&p, &[], 3, &g),
            Err(Error::ScaleMismatch { expected: 3, got: 2 })
        ));
    }

    #[test]
    fn balanced_interval_is_semistable_exactly() {
        let p = interval();
        let divisors = endpoint_divisors(rat(13, 14), rat(13, 14));
        let options = DecideOptions {
            mode: DecisionMode::Exact,
            ..Default::default()
        };
        for i in [1u64, 2, 3, 4] {
            let verdict = decide_semistable(&p, &divisors, i, &options).unwrap();
            assert_eq!(verdict.decision, Decision::Semistable, "i = {i}");
            assert!(verdict.certified);
            assert!(!verdict.margin_minimum.unwrap().is_negative());
        }
    }

    #[test]
    fn two_point_lattice_margin_is_identically_zero() {
        let p = interval();
        let divisors = endpoint_divisors(rat(1, 1), rat(1, 1));
        let options = DecideOptions {
            mode: DecisionMode::Exact,
            ..Default::default()
        };
        let verdict = decide_semistable(&p, &divisors, 1, &options).unwrap();
        assert_eq!(verdict.decision, Decision::Semistable);
        assert_eq!(verdict.margin_minimum.unwrap(), rat(0, 1));
    }

    #[test]
    fn unbalanced_interval_unstable_with_linear_witness() {
        let p = interval();
        let divisors = endpoint_divisors(rat(1, 1), rat(1, 2));
        for mode in [DecisionMode::Exact, DecisionMode::LinearOnly] {
            let options = DecideOptions {
                mode,
                ..Default::default()
            };
            for i in 1..=3u64 {
                let verdict = decide_semistable(&p, &divisors, i, &options).unwrap();
                assert_eq!(verdict.decision, Decision::Unstable);
                assert!(verdict.certified);
                let q = obstruction::q_vector(&p, &divisors, i).unwrap();
                assert_eq!(verdict.margin_minimum.unwrap(), -norm_sq(&q));
                let witness = verdict.witness.unwrap();
                assert!(margin(&p, &divisors, i, &witness).unwrap().is_negative());
            }
        }
    }

    #[test]
    fn linear_mode_inconclusive_when_obstruction_vanishes() {
        let p = interval();
        let divisors = endpoint_divisors(rat(1, 2), rat(1, 2));
        let verdict = decide_semistable(&p, &divisors, 2, &DecideOptions::default()).unwrap();
        assert_eq!(verdict.decision, Decision::Inconclusive);
        assert!(!verdict.certified);
    }

    #[test]
    fn sampled_mode_refutes_unbalanced_angles() {
        let p = interval();
        let divisors = endpoint_divisors(rat(1, 1), rat(1, 2));
        let options = DecideOptions {
            mode: DecisionMode::Sampled,
            samples: 200,
            ..Default::default()
        };
        let verdict = decide_semistable(&p, &divisors, 2, &options).unwrap();
        assert_eq!(verdict.decision, Decision::Unstable);
        let witness = verdict.witness.unwrap();
        assert!(margin(&p, &divisors, 2, &witness).unwrap().is_negative());
    }

    #[test]
    fn sampled_mode_is_deterministic() {
        let p = interval();
        let divisors = endpoint_divisors(rat(1, 2), rat(1, 2));
        let options = DecideOptions {
            mode: DecisionMode::Sampled,
            samples: 50,
            seed: 7,
            ..Default::default()
        };
        let a = decide_semistable(&p, &divisors, 2, &options).unwrap();
        let b = decide_semistable(&p, &divisors, 2, &options).unwrap();
        assert_eq!(a.margin_minimum, b.margin_minimum);
        assert_eq!(a.minimizer, b.minimizer);
    }

    #[test]
    fn symmetric_square_semistable_in_exact_mode() {
        let p = square_sym();
        let options = DecideOptions {
            mode: DecisionMode::Exact,
            ..Default::default()
        };
        let verdict = decide_semistable(&p, &[], 1, &options).unwrap();
        assert_eq!(verdict.decision, Decision::Semistable);
        assert!(verdict.certified);
    }

    #[test]
    fn unit_square_margin_is_convex_on_the_section() {
        // Four corner values (t, -t, -t, t) span the normalized section of
        // the unit square at dilation 1. The envelope picks whichever
        // diagonal split is larger, so the margin is 8|t|/3: genuinely
        // convex piecewise-linear in the values, with its minimum at the
        // section's interior point t = 0, not at the vertices t = ±1. The
        // membership loop must still certify semistability.
        let p = LatticePolytope::from_vertices(vec![
            vec![Int::from(0), Int::from(0)],
            vec![Int::from(1), Int::from(0)],
            vec![Int::from(0), Int::from(1)],
            vec![Int::from(1), Int::from(1)],
        ])
        .unwrap();
        let margin_at = |t: Rat| {
            let data = LatticeFunction::from_fn(&p, 1, |x| {
                // values t, -t, -t, t at (0,0), (0,1), (1,0), (1,1)
                let corner = (&x[0] + &x[1]).is_integer();
                if corner {
                    if (&x[0] + &x[1]).is_zero() || &x[0] + &x[1] == rat(2, 1) {
                        t.clone()
                    } else {
                        -t.clone()
                    }
                } else {
                    unreachable!("dilation-1 lattice of the unit square is its corners")
                }
            });
            let g = concave_envelope(&data);
            margin(&p, &[], 1, &g).unwrap()
        };
        for t in [rat(1, 1), rat(-1, 1), rat(1, 2), rat(-3, 4)] {
            let expected = rat(8, 3) * t.abs();
            assert_eq!(margin_at(t), expected);
        }
        let options = DecideOptions {
            mode: DecisionMode::Exact,
            ..Default::default()
        };
        let verdict = decide_semistable(&p, &[], 1, &options).unwrap();
        assert_eq!(verdict.decision, Decision::Semistable);
        assert!(verdict.certified);
        // the certificate field is the minimum over section vertices,
        // strictly above the interior minimum 0
        assert_eq!(verdict.margin_minimum.unwrap(), rat(8, 3));
    }

    #[test]
    fn triangle_is_semistable_at_dilation_two() {
        // Obstruction vanishes on the standard triangle; the membership
        // loop certifies the semistable verdict over the 6-point lattice.
        let p = LatticePolytope::from_vertices(vec![
            vec![Int::from(0), Int::from(0)],
            vec![Int::from(1), Int::from(0)],
            vec![Int::from(0), Int::from(1)],
        ])
        .unwrap();
        let q = crate::obstruction::q_vector(&p, &[], 2).unwrap();
        assert!(q.iter().all(num_traits::Zero::is_zero));
        let options = DecideOptions {
            mode: DecisionMode::Exact,
            ..Default::default()
        };
        let verdict = decide_semistable(&p, &[], 2, &options).unwrap();
        assert_eq!(verdict.decision, Decision::Semistable);
        assert!(verdict.certified);
    }

    #[test]
    fn exact_mode_rejects_high_dimensions() {
        let p = LatticePolytope::from_vertices(vec![
            vec![Int::from(0), Int::from(0), Int::from(0)],
            vec![Int::from(1), Int::from(0), Int::from(0)],
            vec![Int::from(0), Int::from(1), Int::from(0)],
            vec![Int::from(0), Int::from(0), Int::from(1)],
        ])
        .unwrap();
        let options = DecideOptions {
            mode: DecisionMode::Exact,
            ..Default::default()
        };
        assert!(matches!(
            decide_semistable(&p, &[], 1, &options),
            Err(Error::TooLarge(_))
        ));
    }

    #[test]
    fn margin_cache_verifies() {
        let p = interval();
        let divisors = endpoint_divisors(rat(1, 2), rat(2, 3));
        let f = MarginFunctional::new(&p, &divisors, 3).unwrap();
        f.verify_cache(&p, &divisors).unwrap();
    }

    #[test]
    fn affine_hull_values_on_interval() {
        let p = interval();
        let c = affine_hull_constraints(&p, 1);
        assert_eq!(c.mass, rat(2, 1));
        assert_eq!(c.moment, vec![rat(1, 1)]);
        let cf = affine_hull_constraints_facet(&p, 1, 1).unwrap();
        assert_eq!(cf.zero_indices, vec![0]);
        assert_eq!(cf.mass, rat(1, 1));
        assert_eq!(cf.moment, vec![rat(1, 1)]);
        let doubled = affine_hull_constraints(&p, 2);
        assert_eq!(doubled.mass, rat(4, 1));
    }

    #[test]
    fn membership_target_values() {
        let p = interval();
        let t = membership_target(&p, &endpoint_divisors(rat(1, 1), rat(1, 1)), 1).unwrap();
        assert_eq!(t.scalar, rat(2, 1));
        let t = membership_target(&p, &endpoint_divisors(rat(1, 2), rat(1, 2)), 1).unwrap();
        assert_eq!(t.scalar, rat(3, 1));
        assert_eq!(t.target_vector(), vec![rat(3, 1), rat(3, 1)]);
    }

    #[test]
    fn homogeneity_of_margin() {
        let p = interval();
        let divisors = endpoint_divisors(rat(1, 2), rat(1, 3));
        let data = LatticeFunction::new(
            &p,
            2,
            vec![rat(1, 2), rat(1, 1), rat(-1, 3)],
        )
        .unwrap();
        let scaled = LatticeFunction::new(
            &p,
            2,
            data.values.iter().map(|v| v * rat(5, 2)).collect(),
        )
        .unwrap();
        let m1 = margin(&p, &divisors, 2, &concave_envelope(&data)).unwrap();
        let m2 = margin(&p, &divisors, 2, &concave_envelope(&scaled)).unwrap();
        assert_eq!(m2, m1 * rat(5, 2));
    }
}
