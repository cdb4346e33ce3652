//! Concave piecewise-linear envelopes of lattice data.
//!
//! A function on the scale-`i` lattice points of a polytope induces the
//! least concave function dominating its graph: lift each lattice point by
//! its value, take the upper hull of the lifted set in one extra
//! dimension, and read the envelope off the upper facets. The class of
//! functions arising this way is exactly what the semistability margin is
//! quantified over, so the whole decision problem reduces to the finite
//! cone of lattice data that equal their own envelope.

use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::geometry::LatticePolytope;
use crate::hull::{hull_facets, placing_triangulation};
use crate::linalg::{affine_rank, solve};
use crate::rational::{dot, primitive_direction, IntPoint, Rat, RatPoint};

/// Rational values on `P ∩ (Z/i)^n`, stored in the deterministic
/// lexicographic lattice-point order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticeFunction {
    pub scale: u64,
    pub points: Vec<RatPoint>,
    pub values: Vec<Rat>,
}

impl LatticeFunction {
    /// Pairs the polytope's scale-`i` lattice points with `values`, which
    /// must be listed in the lexicographic point order.
    pub fn new(polytope: &LatticePolytope, scale: u64, values: Vec<Rat>) -> Result<Self> {
        let points = polytope.lattice_points(scale);
        if points.len() != values.len() {
            return Err(Error::DomainMismatch(format!(
                "expected {} values on the scale-{} lattice, got {}",
                points.len(),
                scale,
                values.len()
            )));
        }
        Ok(Self {
            scale,
            points,
            values,
        })
    }

    pub fn from_fn(
        polytope: &LatticePolytope,
        scale: u64,
        f: impl Fn(&RatPoint) -> Rat,
    ) -> Self {
        let points = polytope.lattice_points(scale);
        let values = points.iter().map(&f).collect();
        Self {
            scale,
            points,
            values,
        }
    }

    pub fn index_of(&self, p: &RatPoint) -> Option<usize> {
        self.points.binary_search(p).ok()
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.points.first().map_or(0, |p| p.len())
    }
}

/// `x -> <gradient, x> + constant`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AffineForm {
    pub gradient: RatPoint,
    pub constant: Rat,
}

impl AffineForm {
    pub fn eval(&self, x: &[Rat]) -> Rat {
        dot(&self.gradient, x) + &self.constant
    }
}

/// One linearity cell of a piecewise-linear function: a simplex with
/// lattice vertices and the affine form the function takes on it.
#[derive(Debug, Clone)]
pub struct Cell {
    pub vertices: Vec<RatPoint>,
    pub form: AffineForm,
}

/// A concave piecewise-linear function presented by its values on the
/// lattice and a simplicial cell decomposition covering the polytope.
#[derive(Debug, Clone)]
pub struct PLFunction {
    pub values: LatticeFunction,
    pub cells: Vec<Cell>,
}

impl PLFunction {
    pub fn scale(&self) -> u64 {
        self.values.scale
    }

    /// Evaluates inside the polytope: the envelope is the pointwise
    /// minimum of its upper-facet forms there.
    pub fn eval(&self, x: &[Rat]) -> Rat {
        self.cells
            .iter()
            .map(|c| c.form.eval(x))
            .min()
            .expect("piecewise-linear function has at least one cell")
    }

    /// The stored value at a lattice point.
    pub fn value_at(&self, p: &RatPoint) -> Option<&Rat> {
        self.values.index_of(p).map(|i| &self.values.values[i])
    }
}

/// The least concave majorant of the lattice data, with its cell complex.
///
/// Degenerate flat upper hulls (data affine, or flat upper facets) are
/// triangulated by lexicographic placing, so the complex is deterministic.
pub fn concave_envelope(data: &LatticeFunction) -> PLFunction {
    let n = data.dim();
    assert!(n >= 1, "lattice data must live in positive dimension");
    let lifted: Vec<RatPoint> = data
        .points
        .iter()
        .zip(&data.values)
        .map(|(p, v)| {
            let mut q = p.clone();
            q.push(v.clone());
            q
        })
        .collect();

    if affine_rank(&lifted) == n {
        // Data is the restriction of a single affine function.
        let form = interpolating_form(&data.points, &data.values, n);
        let cells = placing_triangulation(&data.points, n)
            .into_iter()
            .map(|s| Cell {
                vertices: s.iter().map(|&k| data.points[k].clone()).collect(),
                form: form.clone(),
            })
            .collect();
        return PLFunction {
            values: data.clone(),
            cells,
        };
    }

    let facets = hull_facets(&lifted, n + 1);
    let mut cells = Vec::new();
    let mut upper_forms: Vec<AffineForm> = Vec::new();
    for facet in &facets {
        let w_t = &facet.normal[n];
        if !w_t.is_negative() {
            continue; // vertical or lower facet
        }
        let minus_wt = Rat::from_integer(-w_t.clone());
        let gradient: RatPoint = facet.normal[..n]
            .iter()
            .map(|c| Rat::from_integer(c.clone()) / &minus_wt)
            .collect();
        let constant = &facet.offset / &minus_wt;
        let form = AffineForm { gradient, constant };
        let projected: Vec<RatPoint> = facet
            .on
            .iter()
            .map(|&k| data.points[k].clone())
            .collect();
        for simplex in placing_triangulation(&projected, n) {
            cells.push(Cell {
                vertices: simplex.iter().map(|&k| projected[k].clone()).collect(),
                form: form.clone(),
            });
        }
        upper_forms.push(form);
    }
    let values: Vec<Rat> = data
        .points
        .iter()
        .map(|p| {
            upper_forms
                .iter()
                .map(|f| f.eval(p))
                .min()
                .expect("non-flat hull has at least one upper facet")
        })
        .collect();
    PLFunction {
        values: LatticeFunction {
            scale: data.scale,
            points: data.points.clone(),
            values,
        },
        cells,
    }
}

/// True iff the data equals its own concave envelope on the lattice.
pub fn is_concave(data: &LatticeFunction) -> bool {
    concave_envelope(data).values.values == data.values
}

fn interpolating_form(points: &[RatPoint], values: &[Rat], n: usize) -> AffineForm {
    // Greedy affinely independent subset of n+1 points, then solve
    // <g, p> + c = v for (g, c).
    let mut chosen: Vec<usize> = Vec::new();
    for k in 0..points.len() {
        if chosen.len() == n + 1 {
            break;
        }
        let mut trial: Vec<RatPoint> = chosen.iter().map(|&j| points[j].clone()).collect();
        trial.push(points[k].clone());
        if affine_rank(&trial) == trial.len() - 1 {
            chosen.push(k);
        }
    }
    assert_eq!(chosen.len(), n + 1, "lattice points must span the space");
    let rows: Vec<RatPoint> = chosen
        .iter()
        .map(|&k| {
            let mut r = points[k].clone();
            r.push(Rat::from_integer(1.into()));
            r
        })
        .collect();
    let rhs: Vec<Rat> = chosen.iter().map(|&k| values[k].clone()).collect();
    let sol = solve(&rows, &rhs).expect("independent interpolation system");
    AffineForm {
        gradient: sol[..n].to_vec(),
        constant: sol[n].clone(),
    }
}

/// Finite inequality description of `{ v : v equals its concave envelope
/// on the lattice }`: one constraint `<c, v> >= 0` per primitive row.
#[derive(Debug, Clone)]
pub struct ConcavityCone {
    pub scale: u64,
    pub npoints: usize,
    pub constraints: Vec<IntPoint>,
}

impl ConcavityCone {
    pub fn satisfied_by(&self, values: &[Rat]) -> bool {
        assert_eq!(values.len(), self.npoints);
        self.constraints.iter().all(|c| {
            let s: Rat = c
                .iter()
                .zip(values)
                .map(|(ci, vi)| Rat::from_integer(ci.clone()) * vi)
                .sum();
            !s.is_negative()
        })
    }
}

/// Emits the concavity constraints for the scale-`i` lattice of `P`.
///
/// In dimension one, concavity of data on equally spaced nodes is exactly
/// nonpositivity of consecutive second differences, so only those rows are
/// emitted. In higher dimension one row is emitted for every affinely
/// independent subset of 2..=n+1 lattice points whose relative interior
/// contains another lattice point (larger support sets are redundant by
/// Caratheodory; duplicates are pruned).
pub fn concavity_cone(
    polytope: &LatticePolytope,
    scale: u64,
    max_constraints: usize,
) -> Result<ConcavityCone> {
    let points = polytope.lattice_points(scale);
    let n = polytope.dim();
    let e = points.len();
    let mut rows: BTreeSet<IntPoint> = BTreeSet::new();

    if n == 1 {
        for k in 1..e.saturating_sub(1) {
            let mut row = vec![0i64; e];
            row[k - 1] = -1;
            row[k] = 2;
            row[k + 1] = -1;
            rows.insert(row.into_iter().map(Into::into).collect());
        }
    } else {
        for size in 2..=n + 1 {
            for_each_subset(e, size, |subset| {
                let sub_points: Vec<RatPoint> =
                    subset.iter().map(|&k| points[k].clone()).collect();
                if affine_rank(&sub_points) != size - 1 {
                    return;
                }
                for (a_idx, a) in points.iter().enumerate() {
                    if subset.contains(&a_idx) {
                        continue;
                    }
                    let Some(lambda) = barycentric(&sub_points, a) else {
                        continue;
                    };
                    if !lambda.iter().all(|l| l.is_positive()) {
                        continue;
                    }
                    // v(a) - sum lambda_j v(a_j) >= 0, cleared to integers.
                    let mut coeffs = vec![Rat::zero(); e];
                    coeffs[a_idx] = Rat::from_integer(1.into());
                    for (&j, l) in subset.iter().zip(&lambda) {
                        coeffs[j] = -l.clone();
                    }
                    rows.insert(primitive_direction(&coeffs));
                }
            });
            if rows.len() > max_constraints {
                break;
            }
        }
    }
    if rows.len() > max_constraints {
        return Err(Error::TooLarge(format!(
            "concavity cone needs {} constraints, cap is {}",
            rows.len(),
            max_constraints
        )));
    }
    Ok(ConcavityCone {
        scale,
        npoints: e,
        constraints: rows.into_iter().collect(),
    })
}

/// Barycentric coordinates of `a` with respect to an affinely independent
/// point set, or `None` when `a` is outside their affine hull.
fn barycentric(points: &[RatPoint], a: &RatPoint) -> Option<Vec<Rat>> {
    let s = points.len();
    let n = a.len();
    // Solve sum l_j p_j = a, sum l_j = 1 by Gaussian elimination on the
    // (n+1) x s system; consistent + full column rank => unique solution.
    let mut m: Vec<RatPoint> = (0..n)
        .map(|c| {
            let mut row: RatPoint = points.iter().map(|p| p[c].clone()).collect();
            row.push(a[c].clone());
            row
        })
        .collect();
    let mut ones: RatPoint = vec![Rat::from_integer(1.into()); s];
    ones.push(Rat::from_integer(1.into()));
    m.push(ones);

    let rows = m.len();
    let mut pivot_row = 0usize;
    let mut pivots: Vec<(usize, usize)> = Vec::new();
    for col in 0..s {
        let Some(r) = (pivot_row..rows).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, r);
        let p = m[pivot_row][col].clone();
        for c in col..=s {
            m[pivot_row][c] = &m[pivot_row][c] / &p;
        }
        for r2 in 0..rows {
            if r2 == pivot_row || m[r2][col].is_zero() {
                continue;
            }
            let f = m[r2][col].clone();
            for c in col..=s {
                let sub = &f * &m[pivot_row][c];
                m[r2][c] -= sub;
            }
        }
        pivots.push((pivot_row, col));
        pivot_row += 1;
        if pivot_row == rows {
            break;
        }
    }
    if pivots.len() < s {
        return None; // underdetermined; caller requires independence
    }
    // Inconsistent rows mean a is outside the affine hull.
    for r in pivot_row..rows {
        if !m[r][s].is_zero() {
            return None;
        }
    }
    let mut lambda = vec![Rat::zero(); s];
    for &(r, c) in &pivots {
        lambda[c] = m[r][s].clone();
    }
    Some(lambda)
}

fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > m || k == 0 {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let mut i = k - 1;
        while idx[i] == i + m - k {
            if i == 0 {
                return;
            }
            i -= 1;
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{HalfSpace, LatticePolytope};
    use crate::rational::{rat, rat_int, Int};

    fn interval() -> LatticePolytope {
        LatticePolytope::from_halfspaces(vec![
            HalfSpace::new(vec![Int::from(1)], Int::from(0)).unwrap(),
            HalfSpace::new(vec![Int::from(-1)], Int::from(1)).unwrap(),
        ])
        .unwrap()
    }

    fn simplex2() -> LatticePolytope {
        LatticePolytope::from_vertices(vec![
            vec![Int::from(0), Int::from(0)],
            vec![Int::from(1), Int::from(0)],
            vec![Int::from(0), Int::from(1)],
        ])
        .unwrap()
    }

    #[test]
    fn affine_data_stays_affine() {
        let p = simplex2();
        let data = LatticeFunction::from_fn(&p, 2, |x| &x[0] * rat_int(3) - &x[1] + rat(1, 2));
        let g = concave_envelope(&data);
        assert_eq!(g.values.values, data.values);
        for cell in &g.cells {
            assert_eq!(cell.form.gradient, vec![rat_int(3), rat_int(-1)]);
            assert_eq!(cell.form.constant, rat(1, 2));
        }
        assert!(is_concave(&data));
    }

    #[test]
    fn tent_is_concave_with_kink() {
        let p = interval();
        let data = LatticeFunction::new(&p, 2, vec![rat_int(0), rat_int(1), rat_int(0)]).unwrap();
        let g = concave_envelope(&data);
        assert_eq!(g.values.values, data.values);
        assert!(is_concave(&data));
        assert_eq!(g.eval(&[rat(1, 4)]), rat(1, 2));
        assert_eq!(g.eval(&[rat(1, 2)]), rat_int(1));
        assert_eq!(g.cells.len(), 2);
    }

    #[test]
    fn valley_envelope_is_flat() {
        let p = interval();
        let data =
            LatticeFunction::new(&p, 2, vec![rat_int(0), rat_int(-1), rat_int(0)]).unwrap();
        let g = concave_envelope(&data);
        assert_eq!(
            g.values.values,
            vec![rat_int(0), rat_int(0), rat_int(0)]
        );
        assert!(!is_concave(&data));
        assert_eq!(g.eval(&[rat(1, 2)]), rat_int(0));
    }

    #[test]
    fn envelope_dominates_data() {
        let p = simplex2();
        let data = LatticeFunction::new(
            &p,
            2,
            vec![
                rat_int(0),
                rat_int(2),
                rat_int(-1),
                rat_int(1),
                rat(1, 2),
                rat_int(0),
            ],
        )
        .unwrap();
        let g = concave_envelope(&data);
        for (v, w) in data.values.iter().zip(&g.values.values) {
            assert!(w >= v);
        }
    }

    #[test]
    fn idempotent_on_envelope_values() {
        let p = simplex2();
        let data = LatticeFunction::new(
            &p,
            2,
            vec![
                rat_int(0),
                rat_int(2),
                rat_int(-1),
                rat_int(1),
                rat(1, 2),
                rat_int(0),
            ],
        )
        .unwrap();
        let g = concave_envelope(&data);
        let g2 = concave_envelope(&g.values);
        assert_eq!(g2.values.values, g.values.values);
        // pointwise agreement on a probe grid
        for p in g.values.points.iter() {
            assert_eq!(g.eval(p), g2.eval(p));
        }
    }

    #[test]
    fn cells_interpolate_stored_values() {
        let p = simplex2();
        let data = LatticeFunction::new(
            &p,
            2,
            vec![
                rat_int(0),
                rat_int(2),
                rat_int(-1),
                rat_int(1),
                rat(1, 2),
                rat_int(0),
            ],
        )
        .unwrap();
        let g = concave_envelope(&data);
        for cell in &g.cells {
            for v in &cell.vertices {
                let stored = g.value_at(v).unwrap();
                assert_eq!(&cell.form.eval(v), stored);
            }
        }
    }

    #[test]
    fn one_dim_cone_is_second_differences() {
        let p = interval();
        let cone = concavity_cone(&p, 2, 1000).unwrap();
        assert_eq!(cone.constraints.len(), 1);
        assert_eq!(
            cone.constraints[0],
            vec![Int::from(-1), Int::from(2), Int::from(-1)]
        );
        let cone3 = concavity_cone(&p, 3, 1000).unwrap();
        assert_eq!(cone3.constraints.len(), 2);
    }

    #[test]
    fn cone_matches_is_concave_on_simplex() {
        let p = simplex2();
        let cone = concavity_cone(&p, 2, 100_000).unwrap();
        // midpoint rows are present
        let pts = p.lattice_points(2);
        let a = pts
            .iter()
            .position(|q| q == &vec![rat(1, 2), rat_int(0)])
            .unwrap();
        let b = pts.iter().position(|q| q == &vec![rat_int(0), rat_int(0)]).unwrap();
        let c = pts.iter().position(|q| q == &vec![rat_int(1), rat_int(0)]).unwrap();
        let mut expected = vec![Int::from(0); pts.len()];
        expected[a] = Int::from(2);
        expected[b] = Int::from(-1);
        expected[c] = Int::from(-1);
        assert!(cone.constraints.contains(&expected));

        // concave data satisfies the cone, non-concave data violates it
        let concave = LatticeFunction::from_fn(&p, 2, |x| -(&x[0] * &x[0]) - &x[1] * &x[1]);
        // quadratic values interpolated at lattice points need not be
        // concave as lattice data, so check against is_concave instead.
        assert_eq!(
            cone.satisfied_by(&concave.values),
            is_concave(&concave)
        );
        let affine = LatticeFunction::from_fn(&p, 2, |x| x[0].clone() + &x[1]);
        assert!(cone.satisfied_by(&affine.values));
        assert!(is_concave(&affine));
    }

    #[test]
    fn cap_is_enforced() {
        let p = simplex2();
        let err = concavity_cone(&p, 2, 2).unwrap_err();
        assert!(matches!(err, Error::TooLarge(_)));
    }
}
