//! Exact volumes, moments and integrals under the normalized measures.
//!
//! The interior measure is Lebesgue measure normalized so the standard
//! simplex has volume 1/n!. The boundary measure on a facet is Lebesgue
//! measure in a unimodular chart of the facet lattice, which is the same
//! as requiring (primitive supporting form) ∧ (facet measure) to recover
//! the interior measure; staying in chart coordinates keeps every integral
//! rational. Zero-dimensional facets of an interval carry unit point mass.
//!
//! Integration is triangulation plus the centroid rule, exact for the
//! affine integrands that occur here.

use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

use crate::envelope::PLFunction;
use crate::error::{Error, Result};
use crate::geometry::{Facet, LatticePolytope};
use crate::hull::{fan_triangulation, placing_triangulation, simplex_volume};
use crate::rational::{add_points, int_to_rat_point, scale_point, zero_point, Rat, RatPoint};

/// Which triangulation backs an integral. Results are identical; the
/// second route exists to cross-check the first.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TriangulationRoute {
    Fan,
    Placing,
}

/// Simplices (as vertex tuples) tiling the polytope.
pub fn decompose(polytope: &LatticePolytope, route: TriangulationRoute) -> Vec<Vec<RatPoint>> {
    let points = polytope.vertices_rat();
    let n = polytope.dim();
    let tuples = match route {
        TriangulationRoute::Fan => fan_triangulation(&points, n),
        TriangulationRoute::Placing => placing_triangulation(&points, n),
    };
    tuples
        .into_iter()
        .map(|s| s.iter().map(|&k| points[k].clone()).collect())
        .collect()
}

fn centroid(simplex: &[RatPoint]) -> RatPoint {
    let n = simplex[0].len();
    let mut c = zero_point(n);
    for v in simplex {
        c = add_points(&c, v);
    }
    let k = Rat::new(1.into(), (simplex.len() as i64).into());
    scale_point(&k, &c)
}

fn volume_of(simplices: &[Vec<RatPoint>], dim: usize) -> Rat {
    let mut total = Rat::zero();
    for s in simplices {
        let idx: Vec<usize> = (0..s.len()).collect();
        total += simplex_volume(s, &idx, dim);
    }
    total
}

/// Exact Lebesgue volume of the polytope.
pub fn volume(polytope: &LatticePolytope) -> Rat {
    volume_via(polytope, TriangulationRoute::Fan)
}

pub fn volume_via(polytope: &LatticePolytope, route: TriangulationRoute) -> Rat {
    volume_of(&decompose(polytope, route), polytope.dim())
}

/// Componentwise `∫_P x dν`.
pub fn moment(polytope: &LatticePolytope) -> RatPoint {
    moment_via(polytope, TriangulationRoute::Fan)
}

pub fn moment_via(polytope: &LatticePolytope, route: TriangulationRoute) -> RatPoint {
    let n = polytope.dim();
    let mut total = zero_point(n);
    for s in decompose(polytope, route) {
        let idx: Vec<usize> = (0..s.len()).collect();
        let vol = simplex_volume(&s, &idx, n);
        total = add_points(&total, &scale_point(&vol, &centroid(&s)));
    }
    total
}

/// Facet simplices in chart coordinates, paired with ambient vertex
/// tuples. A zero-dimensional facet yields a single empty simplex.
fn facet_decomposition(facet: &Facet) -> Vec<(Vec<RatPoint>, Vec<RatPoint>)> {
    let d = facet.chart.facet_dim();
    if d == 0 {
        let ambient = vec![int_to_rat_point(&facet.vertices[0])];
        return vec![(Vec::new(), ambient)];
    }
    let chart_vertices: Vec<RatPoint> = facet
        .vertices
        .iter()
        .map(|v| facet.chart.to_chart(&int_to_rat_point(v)))
        .collect();
    fan_triangulation(&chart_vertices, d)
        .into_iter()
        .map(|s| {
            let chart: Vec<RatPoint> = s.iter().map(|&k| chart_vertices[k].clone()).collect();
            let ambient: Vec<RatPoint> = s
                .iter()
                .map(|&k| int_to_rat_point(&facet.vertices[k]))
                .collect();
            (chart, ambient)
        })
        .collect()
}

/// Lattice-normalized facet volume; a point facet has unit mass.
pub fn facet_volume(facet: &Facet) -> Rat {
    let d = facet.chart.facet_dim();
    if d == 0 {
        return Rat::from_integer(1.into());
    }
    facet_decomposition(facet)
        .iter()
        .map(|(chart, _)| {
            let idx: Vec<usize> = (0..chart.len()).collect();
            simplex_volume(chart, &idx, d)
        })
        .sum()
}

/// `∫_F x dσ` in ambient coordinates; a point facet contributes the point.
pub fn facet_moment(facet: &Facet) -> RatPoint {
    let d = facet.chart.facet_dim();
    if d == 0 {
        return int_to_rat_point(&facet.vertices[0]);
    }
    let n = facet.halfspace.normal.len();
    let mut total = zero_point(n);
    for (chart, ambient) in facet_decomposition(facet) {
        let idx: Vec<usize> = (0..chart.len()).collect();
        let vol = simplex_volume(&chart, &idx, d);
        total = add_points(&total, &scale_point(&vol, &centroid(&ambient)));
    }
    total
}

/// Sum of the facet volumes.
pub fn boundary_volume(polytope: &LatticePolytope) -> Rat {
    (0..polytope.facet_count())
        .map(|k| facet_volume(&polytope.facet(k).expect("index in range")))
        .sum()
}

fn check_domain(polytope: &LatticePolytope, g: &PLFunction) -> Result<()> {
    let expected = polytope.lattice_points(g.scale());
    if g.values.points != expected {
        return Err(Error::DomainMismatch(
            "function domain does not match the polytope's lattice".into(),
        ));
    }
    Ok(())
}

/// `∫_P g dν` for a piecewise-linear `g` with cells covering `P`.
pub fn integrate_pl(polytope: &LatticePolytope, g: &PLFunction) -> Result<Rat> {
    check_domain(polytope, g)?;
    let n = polytope.dim();
    let mut total = Rat::zero();
    let mut covered = Rat::zero();
    for cell in &g.cells {
        let idx: Vec<usize> = (0..cell.vertices.len()).collect();
        let vol = simplex_volume(&cell.vertices, &idx, n);
        total += &vol * cell.form.eval(&centroid(&cell.vertices));
        covered += vol;
    }
    if covered != volume(polytope) {
        return Err(Error::DomainMismatch(
            "cell decomposition does not cover the polytope".into(),
        ));
    }
    Ok(total)
}

/// `∫_F g dσ`: the restriction of a cell complex to a facet is again a
/// complex (each cell meets the facet hyperplane in a face), so the
/// integral is a chart-coordinate centroid sum over deduplicated faces.
pub fn integrate_pl_facet(
    polytope: &LatticePolytope,
    facet: &Facet,
    g: &PLFunction,
) -> Result<Rat> {
    check_domain(polytope, g)?;
    let n = polytope.dim();
    if facet.chart.facet_dim() == 0 {
        let p = int_to_rat_point(&facet.vertices[0]);
        return Ok(g.eval(&p));
    }
    let mut seen: BTreeSet<Vec<RatPoint>> = BTreeSet::new();
    let mut total = Rat::zero();
    let mut covered = Rat::zero();
    for cell in &g.cells {
        let on_facet: Vec<RatPoint> = cell
            .vertices
            .iter()
            .filter(|v| facet.halfspace.eval_rat(v).is_zero())
            .cloned()
            .collect();
        if on_facet.len() != n {
            continue; // not a full-dimensional face of the facet
        }
        let mut key = on_facet.clone();
        key.sort();
        if !seen.insert(key) {
            continue;
        }
        let chart: Vec<RatPoint> = on_facet
            .iter()
            .map(|v| facet.chart.to_chart(v))
            .collect();
        let idx: Vec<usize> = (0..chart.len()).collect();
        let vol = simplex_volume(&chart, &idx, n - 1);
        if vol.is_zero() {
            continue;
        }
        total += &vol * cell.form.eval(&centroid(&on_facet));
        covered += vol;
    }
    if covered != facet_volume(facet) {
        return Err(Error::VerificationFailed(
            "restricted cells do not cover the facet".into(),
        ));
    }
    Ok(total)
}

/// `∫_{∂P} g dσ` as the sum over all facets.
pub fn integrate_pl_boundary(polytope: &LatticePolytope, g: &PLFunction) -> Result<Rat> {
    let mut total = Rat::zero();
    for k in 0..polytope.facet_count() {
        let facet = polytope.facet(k)?;
        total += integrate_pl_facet(polytope, &facet, g)?;
    }
    Ok(total)
}

/// All measures of a polytope in one report.
#[derive(Debug, Clone)]
pub struct MeasureReport {
    pub volume: Rat,
    pub moment: RatPoint,
    pub facet_volumes: Vec<Rat>,
    pub facet_moments: Vec<RatPoint>,
    pub boundary_volume: Rat,
}

pub fn measure_report(polytope: &LatticePolytope) -> MeasureReport {
    let mut facet_volumes = Vec::new();
    let mut facet_moments = Vec::new();
    for k in 0..polytope.facet_count() {
        let facet = polytope.facet(k).expect("index in range");
        facet_volumes.push(facet_volume(&facet));
        facet_moments.push(facet_moment(&facet));
    }
    let boundary_volume: Rat = facet_volumes.iter().sum();
    MeasureReport {
        volume: volume(polytope),
        moment: moment(polytope),
        facet_volumes,
        facet_moments,
        boundary_volume,
    }
}

impl MeasureReport {
    /// The centroid lies strictly inside the polytope.
    pub fn centroid_is_interior(&self, polytope: &LatticePolytope) -> bool {
        let c = scale_point(&self.volume.recip(), &self.moment);
        polytope
            .halfspaces()
            .iter()
            .all(|h| h.eval_rat(&c).is_positive())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envelope::{concave_envelope, LatticeFunction};
    use crate::geometry::HalfSpace;
    use crate::rational::{rat, rat_int, Int};

    fn interval() -> LatticePolytope {
        LatticePolytope::from_halfspaces(vec![
            HalfSpace::new(vec![Int::from(1)], Int::from(0)).unwrap(),
            HalfSpace::new(vec![Int::from(-1)], Int::from(1)).unwrap(),
        ])
        .unwrap()
    }

    fn simplex(n: usize) -> LatticePolytope {
        let mut vertices = vec![vec![Int::from(0); n]];
        for k in 0..n {
            let mut v = vec![Int::from(0); n];
            v[k] = Int::from(1);
            vertices.push(v);
        }
        LatticePolytope::from_vertices(vertices).unwrap()
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

    fn hirzebruch() -> LatticePolytope {
        LatticePolytope::from_halfspaces(vec![
            HalfSpace::new(vec![Int::from(-1), Int::from(-1)], Int::from(1)).unwrap(),
            HalfSpace::new(vec![Int::from(1), Int::from(0)], Int::from(1)).unwrap(),
            HalfSpace::new(vec![Int::from(1), Int::from(1)], Int::from(1)).unwrap(),
            HalfSpace::new(vec![Int::from(0), Int::from(1)], Int::from(1)).unwrap(),
        ])
        .unwrap()
    }

    #[test]
    fn simplex_volume_is_inverse_factorial() {
        assert_eq!(volume(&simplex(1)), rat_int(1));
        assert_eq!(volume(&simplex(2)), rat(1, 2));
        assert_eq!(volume(&simplex(3)), rat(1, 6));
    }

    #[test]
    fn square_and_hirzebruch_volumes() {
        assert_eq!(volume(&square_sym()), rat_int(4));
        assert_eq!(volume(&hirzebruch()), rat_int(4));
    }

    #[test]
    fn moments() {
        assert_eq!(moment(&square_sym()), vec![rat_int(0), rat_int(0)]);
        assert_eq!(moment(&simplex(2)), vec![rat(1, 6), rat(1, 6)]);
        assert_eq!(moment(&hirzebruch()), vec![rat(1, 3), rat(1, 3)]);
    }

    #[test]
    fn triangulation_independence() {
        for p in [simplex(2), square_sym(), hirzebruch(), simplex(3)] {
            assert_eq!(
                volume_via(&p, TriangulationRoute::Fan),
                volume_via(&p, TriangulationRoute::Placing)
            );
            assert_eq!(
                moment_via(&p, TriangulationRoute::Fan),
                moment_via(&p, TriangulationRoute::Placing)
            );
        }
    }

    #[test]
    fn facet_measures_of_square() {
        let p = LatticePolytope::from_vertices(vec![
            vec![Int::from(0), Int::from(0)],
            vec![Int::from(1), Int::from(0)],
            vec![Int::from(0), Int::from(1)],
            vec![Int::from(1), Int::from(1)],
        ])
        .unwrap();
        let idx = p
            .halfspaces()
            .iter()
            .position(|h| h.normal == vec![Int::from(1), Int::from(0)] && h.offset.is_zero())
            .unwrap();
        let f = p.facet(idx).unwrap();
        assert_eq!(facet_volume(&f), rat_int(1));
        assert_eq!(facet_moment(&f), vec![rat_int(0), rat(1, 2)]);
    }

    #[test]
    fn hirzebruch_facet_measures_and_boundary() {
        let p = hirzebruch();
        let report = measure_report(&p);
        // facet order follows the input system: slant, x=-1, short slant, y=-1
        assert_eq!(
            report.facet_volumes,
            vec![rat_int(3), rat_int(2), rat_int(1), rat_int(2)]
        );
        assert_eq!(report.facet_moments[0], vec![rat(3, 2), rat(3, 2)]);
        assert_eq!(report.facet_moments[1], vec![rat_int(-2), rat_int(2)]);
        assert_eq!(report.facet_moments[3], vec![rat_int(2), rat_int(-2)]);
        assert_eq!(report.boundary_volume, rat_int(8));
        assert!(report.centroid_is_interior(&p));
    }

    #[test]
    fn interval_boundary_is_two_points() {
        let p = interval();
        assert_eq!(boundary_volume(&p), rat_int(2));
        let f = p.facet(1).unwrap();
        assert_eq!(facet_volume(&f), rat_int(1));
        assert_eq!(facet_moment(&f), vec![rat_int(1)]);
    }

    #[test]
    fn integrate_constant_and_linear() {
        let p = interval();
        let c = LatticeFunction::from_fn(&p, 2, |_| rat(7, 3));
        let g = concave_envelope(&c);
        assert_eq!(integrate_pl(&p, &g).unwrap(), rat(7, 3));

        let linear = LatticeFunction::from_fn(&p, 2, |x| x[0].clone());
        let g = concave_envelope(&linear);
        assert_eq!(integrate_pl(&p, &g).unwrap(), rat(1, 2));
    }

    #[test]
    fn integrate_tent() {
        let p = interval();
        let data =
            LatticeFunction::new(&p, 2, vec![rat_int(0), rat_int(1), rat_int(0)]).unwrap();
        let g = concave_envelope(&data);
        assert_eq!(integrate_pl(&p, &g).unwrap(), rat(1, 2));
    }

    #[test]
    fn facet_and_boundary_integrals() {
        let p = interval();
        let data =
            LatticeFunction::new(&p, 2, vec![rat_int(0), rat_int(1), rat(1, 3)]).unwrap();
        let g = concave_envelope(&data);
        let f0 = p.facet(0).unwrap();
        let f1 = p.facet(1).unwrap();
        assert_eq!(integrate_pl_facet(&p, &f0, &g).unwrap(), rat_int(0));
        assert_eq!(integrate_pl_facet(&p, &f1, &g).unwrap(), rat(1, 3));
        assert_eq!(integrate_pl_boundary(&p, &g).unwrap(), rat(1, 3));
    }

    #[test]
    fn facet_integral_in_two_dims() {
        // g = x + y on the hirzebruch slant facet {x + y = 1}: the
        // restriction is constant 1 on a facet of sigma-length 3.
        let p = hirzebruch();
        let data = LatticeFunction::from_fn(&p, 1, |x| x[0].clone() + &x[1]);
        let g = concave_envelope(&data);
        let f = p.facet(0).unwrap();
        assert_eq!(integrate_pl_facet(&p, &f, &g).unwrap(), rat_int(3));
        // and the interior integral matches linearity of the integrand
        assert_eq!(
            integrate_pl(&p, &g).unwrap(),
            moment(&p).iter().sum::<Rat>()
        );
    }

    #[test]
    fn additivity_in_g() {
        let p = hirzebruch();
        let a = LatticeFunction::from_fn(&p, 1, |x| x[0].clone());
        let b = LatticeFunction::from_fn(&p, 1, |x| x[1].clone() - rat(1, 2));
        let sum = LatticeFunction::from_fn(&p, 1, |x| x[0].clone() + &x[1] - rat(1, 2));
        let (ga, gb, gs) = (
            concave_envelope(&a),
            concave_envelope(&b),
            concave_envelope(&sum),
        );
        assert_eq!(
            integrate_pl(&p, &gs).unwrap(),
            integrate_pl(&p, &ga).unwrap() + integrate_pl(&p, &gb).unwrap()
        );
        assert_eq!(
            integrate_pl_boundary(&p, &gs).unwrap(),
            integrate_pl_boundary(&p, &ga).unwrap()
                + integrate_pl_boundary(&p, &gb).unwrap()
        );
    }

    #[test]
    fn scale_mismatch_is_rejected() {
        let p = interval();
        let q = simplex(2);
        let data = LatticeFunction::from_fn(&q, 1, |_| rat_int(1));
        let g = concave_envelope(&data);
        assert!(matches!(
            integrate_pl(&p, &g),
            Err(Error::DomainMismatch(_))
        ));
    }
}
