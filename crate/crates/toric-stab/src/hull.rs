//! Exact convex-hull machinery on small rational point sets.
//!
//! Facet enumeration is brute force over point subsets: every facet
//! hyperplane of a full-dimensional hull is spanned by `dim` affinely
//! independent input points, so all supporting hyperplanes are found by
//! scanning subsets. Quadratic-and-worse in the point count, exact and
//! auditable, which is what this crate wants at desk scale.
//!
//! Two triangulation routes are provided; integration results must not
//! depend on which one is used.

use num_traits::{Signed, Zero};
use std::collections::{BTreeMap, BTreeSet};

use crate::linalg::{affine_rank, cross_product, det};
use crate::rational::{dot, primitive_direction, IntPoint, Rat, RatPoint};

/// A supporting hyperplane of a point set: `<normal, x> + offset >= 0`
/// holds for every point, with equality exactly on the indices in `on`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportingHyperplane {
    pub normal: IntPoint,
    pub offset: Rat,
    pub on: Vec<usize>,
}

fn eval(normal: &IntPoint, offset: &Rat, p: &[Rat]) -> Rat {
    let n: RatPoint = normal
        .iter()
        .map(|c| Rat::from_integer(c.clone()))
        .collect();
    dot(&n, p) + offset
}

/// Iterates over all `k`-subsets of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        // advance
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if idx[i] != i + n - k {
                break;
            }
            if i == 0 {
                return;
            }
        }
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// All facet hyperplanes of `conv(points)` for a full-dimensional point set
/// in R^dim, each oriented so the hull lies on the nonnegative side.
/// Results are sorted by (normal, offset) and carry the full incidence set.
pub fn hull_facets(points: &[RatPoint], dim: usize) -> Vec<SupportingHyperplane> {
    assert!(dim >= 1);
    debug_assert_eq!(affine_rank(points), dim, "hull_facets needs a full-dim set");
    let mut seen: BTreeSet<(IntPoint, Rat)> = BTreeSet::new();
    let mut out = Vec::new();
    for_each_subset(points.len(), dim, |subset| {
        let base = &points[subset[0]];
        let diffs: Vec<RatPoint> = subset[1..]
            .iter()
            .map(|&i| {
                points[i]
                    .iter()
                    .zip(base)
                    .map(|(a, b)| a - b)
                    .collect()
            })
            .collect();
        if crate::linalg::rank(&diffs) + 1 != dim {
            return;
        }
        let normal_rat = cross_product(&diffs, dim);
        if normal_rat.iter().all(|x| x.is_zero()) {
            return;
        }
        let mut normal = primitive_direction(&normal_rat);
        let mut offset = -eval(&normal, &Rat::zero(), base);
        // Orient: all points on the nonnegative side, else flip, else reject.
        let mut has_pos = false;
        let mut has_neg = false;
        for p in points {
            let v = eval(&normal, &offset, p);
            if v.is_positive() {
                has_pos = true;
            } else if v.is_negative() {
                has_neg = true;
            }
            if has_pos && has_neg {
                return;
            }
        }
        if has_neg {
            for c in normal.iter_mut() {
                *c = -c.clone();
            }
            offset = -offset;
        }
        if !seen.insert((normal.clone(), offset.clone())) {
            return;
        }
        let on: Vec<usize> = (0..points.len())
            .filter(|&i| eval(&normal, &offset, &points[i]).is_zero())
            .collect();
        out.push(SupportingHyperplane { normal, offset, on });
    });
    out.sort_by(|a, b| (&a.normal, &a.offset).cmp(&(&b.normal, &b.offset)));
    out
}

fn lex_min_index(points: &[RatPoint], candidates: &[usize]) -> usize {
    *candidates
        .iter()
        .min_by(|&&a, &&b| points[a].cmp(&points[b]))
        .expect("nonempty candidate set")
}

/// Fan triangulation: cone from the lexicographically smallest vertex over
/// recursively triangulated facets not containing it. Returns index tuples
/// of size `dim + 1` whose simplices tile `conv(points)`.
pub fn fan_triangulation(points: &[RatPoint], dim: usize) -> Vec<Vec<usize>> {
    assert!(dim >= 1);
    if dim == 1 {
        let all: Vec<usize> = (0..points.len()).collect();
        let lo = lex_min_index(points, &all);
        let hi = *all
            .iter()
            .max_by(|&&a, &&b| points[a].cmp(&points[b]))
            .unwrap();
        if points[lo] == points[hi] {
            return Vec::new();
        }
        return vec![vec![lo, hi]];
    }
    let facets = hull_facets(points, dim);
    let all: Vec<usize> = (0..points.len()).collect();
    let apex = lex_min_index(points, &all);
    let mut simplices = Vec::new();
    for facet in &facets {
        if eval(&facet.normal, &facet.offset, &points[apex]).is_zero() {
            continue;
        }
        // Project facet points into R^{dim-1} by dropping a coordinate the
        // normal is nonzero on; a linear bijection on the facet hyperplane.
        let drop = facet
            .normal
            .iter()
            .position(|c| !c.is_zero())
            .expect("nonzero normal");
        let projected: Vec<RatPoint> = facet
            .on
            .iter()
            .map(|&i| {
                points[i]
                    .iter()
                    .enumerate()
                    .filter(|(j, _)| *j != drop)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        for sub in fan_triangulation(&projected, dim - 1) {
            let mut simplex: Vec<usize> = sub.iter().map(|&k| facet.on[k]).collect();
            simplex.push(apex);
            simplex.sort_unstable();
            simplices.push(simplex);
        }
    }
    simplices.sort();
    simplices
}

fn orientation(points: &[RatPoint], face: &[usize], x: usize) -> Rat {
    let base = &points[face[0]];
    let mut rows: Vec<RatPoint> = face[1..]
        .iter()
        .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rows.push(points[x].iter().zip(base).map(|(a, b)| a - b).collect());
    det(&rows)
}

/// Placing triangulation: points are inserted in lexicographic order and
/// each new point is coned over the boundary faces it strictly sees.
/// Points inside the running hull (or on a face hyperplane) add nothing,
/// so the result may skip non-extreme points. Deterministic.
pub fn placing_triangulation(points: &[RatPoint], dim: usize) -> Vec<Vec<usize>> {
    assert!(dim >= 1);
    debug_assert_eq!(affine_rank(points), dim);
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].cmp(&points[b]).then(a.cmp(&b)));

    // Greedy lexicographic seed: the first affinely independent dim+1 points.
    let mut seed: Vec<usize> = Vec::new();
    let mut rest: Vec<usize> = Vec::new();
    for &i in &order {
        if seed.len() <= dim {
            let mut trial: Vec<RatPoint> =
                seed.iter().map(|&j| points[j].clone()).collect();
            trial.push(points[i].clone());
            if affine_rank(&trial) == trial.len() - 1 {
                seed.push(i);
                continue;
            }
        }
        rest.push(i);
    }
    assert_eq!(seed.len(), dim + 1, "point set is not full-dimensional");
    let mut first = seed.clone();
    first.sort_unstable();
    let mut simplices: Vec<Vec<usize>> = vec![first];

    for &p in &rest {
        // Face -> (owner count, opposite vertex of one owner).
        let mut faces: BTreeMap<Vec<usize>, (usize, usize)> = BTreeMap::new();
        for simplex in &simplices {
            for skip in 0..simplex.len() {
                let face: Vec<usize> = simplex
                    .iter()
                    .enumerate()
                    .filter(|(k, _)| *k != skip)
                    .map(|(_, &v)| v)
                    .collect();
                let entry = faces.entry(face).or_insert((0, simplex[skip]));
                entry.0 += 1;
            }
        }
        let mut new_simplices = Vec::new();
        for (face, (count, opposite)) in &faces {
            if *count != 1 {
                continue;
            }
            let side_p = orientation(points, face, p);
            if side_p.is_zero() {
                continue;
            }
            let side_q = orientation(points, face, *opposite);
            debug_assert!(!side_q.is_zero());
            if side_p.is_positive() != side_q.is_positive() {
                let mut s = face.clone();
                s.push(p);
                s.sort_unstable();
                new_simplices.push(s);
            }
        }
        simplices.extend(new_simplices);
    }
    simplices.sort();
    simplices
}

/// Volume of the simplex spanned by `dim + 1` points in R^dim.
pub fn simplex_volume(points: &[RatPoint], simplex: &[usize], dim: usize) -> Rat {
    let base = &points[simplex[0]];
    let rows: Vec<RatPoint> = simplex[1..]
        .iter()
        .map(|&i| points[i].iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    let mut d = det(&rows);
    if d.is_negative() {
        d = -d;
    }
    let mut factorial = Rat::from_integer(1.into());
    for k in 2..=dim {
        factorial *= Rat::from_integer(crate::rational::Int::from(k));
    }
    d / factorial
}
