//! Integral Delzant polytopes: validation, representation conversion and
//! lattice-point enumeration.
//!
//! Halfspaces follow the convention `<normal, x> + offset >= 0` on the
//! interior, matching the sign of printed inequality systems like
//! `-x - y + 1 >= 0`. Vertex and lattice-point orders are lexicographic
//! everywhere so reports are byte-stable.

use num_traits::{One, Signed, Zero};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::hull::hull_facets;
use crate::linalg::{affine_rank, invert, rank, solve, unimodular_kernel_basis};
use crate::rational::{
    dot_int, int_to_rat_point, primitive_part, Int, IntPoint, Rat, RatPoint,
};

/// A closed halfspace `<normal, x> + offset >= 0` with primitive integer
/// normal.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct HalfSpace {
    pub normal: IntPoint,
    pub offset: Int,
}

impl HalfSpace {
    /// Builds a halfspace, dividing out the content of the normal when it
    /// also divides the offset (the set is unchanged). A normal whose
    /// content does not divide the offset is kept as given; it can never
    /// support a facet of an integral polytope and will either be dropped
    /// as redundant or lead to a `NonIntegralVertex` error downstream.
    pub fn new(mut normal: IntPoint, mut offset: Int) -> Result<Self> {
        if normal.iter().all(|c| c.is_zero()) {
            return Err(Error::InvalidInput("halfspace normal is zero".into()));
        }
        let mut probe = normal.clone();
        let g = primitive_part(&mut probe);
        if !g.is_one() && (&offset % &g).is_zero() {
            normal = probe;
            offset /= &g;
        }
        Ok(Self { normal, offset })
    }

    pub fn eval_rat(&self, x: &[Rat]) -> Rat {
        let mut acc = Rat::from_integer(self.offset.clone());
        for (a, xi) in self.normal.iter().zip(x) {
            acc += Rat::from_integer(a.clone()) * xi;
        }
        acc
    }

    pub fn eval_int(&self, x: &[Int]) -> Int {
        dot_int(&self.normal, x) + &self.offset
    }

    /// Value of the dilated constraint `<normal, x> + i * offset` at an
    /// integer point, i.e. the constraint of `iP` at `x`.
    pub fn eval_dilated(&self, x: &[Int], i: u64) -> Int {
        dot_int(&self.normal, x) + &self.offset * Int::from(i)
    }

    pub fn is_primitive(&self) -> bool {
        let mut probe = self.normal.clone();
        primitive_part(&mut probe).is_one()
    }
}

/// A full-dimensional integral polytope with consistent H- and V-
/// representations. Facet indices refer to `halfspaces` order, which is
/// preserved from the input system (redundant rows dropped).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePolytope {
    dim: usize,
    halfspaces: Vec<HalfSpace>,
    vertices: Vec<IntPoint>,
}

#[derive(Debug, Clone)]
pub struct DelzantFailure {
    pub vertex: IntPoint,
    pub edge_directions: Vec<IntPoint>,
    pub determinant: Int,
}

#[derive(Debug, Clone)]
pub struct DelzantReport {
    pub is_delzant: bool,
    pub failures: Vec<DelzantFailure>,
}

/// A facet together with a unimodular chart of its affine lattice.
#[derive(Debug, Clone)]
pub struct Facet {
    pub index: usize,
    pub halfspace: HalfSpace,
    pub vertices: Vec<IntPoint>,
    pub chart: FacetChart,
}

/// Affine unimodular parameterization `t -> base + directions * t` of the
/// facet's affine lattice by Z^{n-1}. Empty `directions` for the
/// zero-dimensional facets of an interval.
#[derive(Debug, Clone)]
pub struct FacetChart {
    pub base: IntPoint,
    pub directions: Vec<IntPoint>,
    inverse_rows: Vec<RatPoint>,
}

impl FacetChart {
    pub fn facet_dim(&self) -> usize {
        self.directions.len()
    }

    /// Maps chart coordinates to ambient coordinates.
    pub fn to_ambient(&self, t: &[Rat]) -> RatPoint {
        assert_eq!(t.len(), self.directions.len());
        let mut x = int_to_rat_point(&self.base);
        for (dir, ti) in self.directions.iter().zip(t) {
            for (xc, dc) in x.iter_mut().zip(dir) {
                *xc += Rat::from_integer(dc.clone()) * ti;
            }
        }
        x
    }

    /// Maps an ambient point on the facet's affine hull to chart
    /// coordinates.
    pub fn to_chart(&self, x: &[Rat]) -> RatPoint {
        let shifted: RatPoint = x
            .iter()
            .zip(&self.base)
            .map(|(a, b)| a - Rat::from_integer(b.clone()))
            .collect();
        self.inverse_rows
            .iter()
            .map(|row| crate::rational::dot(row, &shifted))
            .collect()
    }
}

impl LatticePolytope {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn halfspaces(&self) -> &[HalfSpace] {
        &self.halfspaces
    }

    pub fn vertices(&self) -> &[IntPoint] {
        &self.vertices
    }

    pub fn vertices_rat(&self) -> Vec<RatPoint> {
        self.vertices.iter().map(|v| int_to_rat_point(v)).collect()
    }

    pub fn facet_count(&self) -> usize {
        self.halfspaces.len()
    }

    pub fn contains(&self, x: &[Rat]) -> bool {
        self.halfspaces
            .iter()
            .all(|h| !h.eval_rat(x).is_negative())
    }

    /// Builds the polytope bounded by `halfspaces`: computes the exact
    /// vertex set, rejects unbounded/empty/low-dimensional systems and
    /// non-integral vertices, and drops redundant rows. Facet order
    /// follows the input system.
    pub fn from_halfspaces(halfspaces: Vec<HalfSpace>) -> Result<Self> {
        if halfspaces.is_empty() {
            return Err(Error::InvalidInput("no halfspaces given".into()));
        }
        let n = halfspaces[0].normal.len();
        if n == 0 {
            return Err(Error::InvalidInput("dimension zero".into()));
        }
        if halfspaces.iter().any(|h| h.normal.len() != n) {
            return Err(Error::InvalidInput(
                "halfspace dimensions are inconsistent".into(),
            ));
        }

        let normals_rat: Vec<RatPoint> = halfspaces
            .iter()
            .map(|h| int_to_rat_point(&h.normal))
            .collect();
        check_bounded(&halfspaces, &normals_rat, n)?;

        // Candidate vertices: feasible intersections of n constraints.
        let mut candidates: BTreeSet<RatPoint> = BTreeSet::new();
        let m = halfspaces.len();
        for_each_subset(m, n, |subset| {
            let a: Vec<RatPoint> = subset.iter().map(|&k| normals_rat[k].clone()).collect();
            let b: Vec<Rat> = subset
                .iter()
                .map(|&k| -Rat::from_integer(halfspaces[k].offset.clone()))
                .collect();
            if let Some(x) = solve(&a, &b) {
                if halfspaces.iter().all(|h| !h.eval_rat(&x).is_negative()) {
                    candidates.insert(x);
                }
            }
        });
        if candidates.is_empty() {
            return Err(Error::Empty);
        }
        let candidates: Vec<RatPoint> = candidates.into_iter().collect();
        let arank = affine_rank(&candidates);
        if arank < n {
            return Err(Error::LowDimensional {
                expected: n,
                actual: arank,
            });
        }
        for v in &candidates {
            if v.iter().any(|c| !c.is_integer()) {
                return Err(Error::NonIntegralVertex(crate::rational::format_point(v)));
            }
        }
        let vertices: Vec<IntPoint> = candidates
            .iter()
            .map(|v| v.iter().map(|c| c.to_integer()).collect())
            .collect();

        // Keep a halfspace iff it supports a facet; drop duplicates.
        let mut seen: BTreeSet<(IntPoint, Int)> = BTreeSet::new();
        let mut kept = Vec::new();
        for h in &halfspaces {
            let h = HalfSpace::new(h.normal.clone(), h.offset.clone())?;
            if !seen.insert((h.normal.clone(), h.offset.clone())) {
                continue;
            }
            let tight: Vec<RatPoint> = vertices
                .iter()
                .filter(|v| h.eval_int(v).is_zero())
                .map(|v| int_to_rat_point(v))
                .collect();
            if !tight.is_empty() && affine_rank(&tight) == n - 1 {
                kept.push(h);
            }
        }
        let poly = Self {
            dim: n,
            halfspaces: kept,
            vertices,
        };
        poly.validate()?;
        Ok(poly)
    }

    /// Builds the polytope as the convex hull of integer points. Points
    /// that are not extreme are discarded; the H-representation is
    /// computed exactly and sorted canonically.
    pub fn from_vertices(points: Vec<IntPoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidInput("no vertices given".into()));
        }
        let n = points[0].len();
        if n == 0 {
            return Err(Error::InvalidInput("dimension zero".into()));
        }
        if points.iter().any(|p| p.len() != n) {
            return Err(Error::InvalidInput(
                "vertex dimensions are inconsistent".into(),
            ));
        }
        let rat_points: Vec<RatPoint> = points.iter().map(|p| int_to_rat_point(p)).collect();
        let arank = affine_rank(&rat_points);
        if arank < n {
            return Err(Error::LowDimensional {
                expected: n,
                actual: arank,
            });
        }
        let facets = hull_facets(&rat_points, n);
        let mut halfspaces = Vec::with_capacity(facets.len());
        for f in &facets {
            if !f.offset.is_integer() {
                return Err(Error::InvalidInput(
                    "hull facet has non-integral offset".into(),
                ));
            }
            halfspaces.push(HalfSpace::new(f.normal.clone(), f.offset.to_integer())?);
        }
        // A point is a vertex iff its active facet normals span R^n.
        let mut vertices: BTreeSet<IntPoint> = BTreeSet::new();
        for (p, pr) in points.iter().zip(&rat_points) {
            let active: Vec<RatPoint> = halfspaces
                .iter()
                .filter(|h| h.eval_rat(pr).is_zero())
                .map(|h| int_to_rat_point(&h.normal))
                .collect();
            if rank(&active) == n {
                vertices.insert(p.clone());
            }
        }
        let poly = Self {
            dim: n,
            halfspaces,
            vertices: vertices.into_iter().collect(),
        };
        poly.validate()?;
        Ok(poly)
    }

    /// Internal consistency: every vertex feasible, every halfspace a
    /// facet, both representations describing the same set.
    fn validate(&self) -> Result<()> {
        let n = self.dim;
        for v in &self.vertices {
            for h in &self.halfspaces {
                if h.eval_int(v).is_negative() {
                    return Err(Error::VerificationFailed(format!(
                        "vertex {v:?} violates a stored halfspace"
                    )));
                }
            }
        }
        for (k, h) in self.halfspaces.iter().enumerate() {
            if !h.is_primitive() {
                return Err(Error::VerificationFailed(format!(
                    "halfspace {k} is not primitive"
                )));
            }
            let tight: Vec<RatPoint> = self
                .vertices
                .iter()
                .filter(|v| h.eval_int(v).is_zero())
                .map(|v| int_to_rat_point(v))
                .collect();
            if tight.is_empty() || affine_rank(&tight) != n - 1 {
                return Err(Error::VerificationFailed(format!(
                    "halfspace {k} does not support a facet"
                )));
            }
        }
        Ok(())
    }

    /// Smoothness test: at every vertex the primitive edge directions must
    /// form a basis of the lattice. All failing vertices are reported.
    pub fn is_delzant(&self) -> DelzantReport {
        let n = self.dim;
        let mut failures = Vec::new();
        for v in &self.vertices {
            let active_v: Vec<usize> = (0..self.halfspaces.len())
                .filter(|&k| self.halfspaces[k].eval_int(v).is_zero())
                .collect();
            let mut dirs: Vec<IntPoint> = Vec::new();
            for w in &self.vertices {
                if w == v {
                    continue;
                }
                let shared: Vec<RatPoint> = active_v
                    .iter()
                    .filter(|&&k| self.halfspaces[k].eval_int(w).is_zero())
                    .map(|&k| int_to_rat_point(&self.halfspaces[k].normal))
                    .collect();
                if n >= 1 && rank(&shared) == n - 1 {
                    let mut d: IntPoint = w.iter().zip(v).map(|(a, b)| a - b).collect();
                    primitive_part(&mut d);
                    dirs.push(d);
                }
            }
            dirs.sort();
            dirs.dedup();
            let determinant = if dirs.len() == n {
                let rows: Vec<RatPoint> = dirs.iter().map(|d| int_to_rat_point(d)).collect();
                let d = crate::linalg::det(&rows);
                debug_assert!(d.is_integer());
                d.to_integer().abs()
            } else {
                Int::zero()
            };
            if !determinant.is_one() {
                failures.push(DelzantFailure {
                    vertex: v.clone(),
                    edge_directions: dirs,
                    determinant,
                });
            }
        }
        DelzantReport {
            is_delzant: failures.is_empty(),
            failures,
        }
    }

    /// `iP ∩ Z^n` by bounding-box scan, in lexicographic order.
    pub fn lattice_points_scaled(&self, i: u64) -> Vec<IntPoint> {
        assert!(i >= 1, "scale must be positive");
        let n = self.dim;
        let scale = Int::from(i);
        let mut lo = vec![Int::zero(); n];
        let mut hi = vec![Int::zero(); n];
        for c in 0..n {
            lo[c] = self.vertices.iter().map(|v| &v[c] * &scale).min().unwrap();
            hi[c] = self.vertices.iter().map(|v| &v[c] * &scale).max().unwrap();
        }
        let mut out = Vec::new();
        let mut cursor = lo.clone();
        'scan: loop {
            if self
                .halfspaces
                .iter()
                .all(|h| !h.eval_dilated(&cursor, i).is_negative())
            {
                out.push(cursor.clone());
            }
            // lexicographic increment from the last coordinate
            let mut c = n;
            loop {
                if c == 0 {
                    break 'scan;
                }
                c -= 1;
                if cursor[c] < hi[c] {
                    cursor[c] += 1;
                    for (r, l) in cursor.iter_mut().zip(lo.iter()).skip(c + 1) {
                        *r = l.clone();
                    }
                    continue 'scan;
                }
            }
        }
        out
    }

    /// `P ∩ (Z/i)^n` as rational points, sorted lexicographically. The
    /// count is the Ehrhart value `E_P(i)`.
    pub fn lattice_points(&self, i: u64) -> Vec<RatPoint> {
        let inv = Rat::new(Int::one(), Int::from(i));
        self.lattice_points_scaled(i)
            .into_iter()
            .map(|b| b.iter().map(|c| Rat::from_integer(c.clone()) * &inv).collect())
            .collect()
    }

    pub fn ehrhart_count(&self, i: u64) -> u64 {
        self.lattice_points_scaled(i).len() as u64
    }

    /// The facet supported by `halfspaces()[index]`, with a unimodular
    /// chart of its affine lattice computed by integer column reduction.
    pub fn facet(&self, index: usize) -> Result<Facet> {
        let count = self.halfspaces.len();
        let Some(halfspace) = self.halfspaces.get(index).cloned() else {
            return Err(Error::BadIndex { index, count });
        };
        let n = self.dim;
        let vertices: Vec<IntPoint> = self
            .vertices
            .iter()
            .filter(|v| halfspace.eval_int(v).is_zero())
            .cloned()
            .collect();
        let base = vertices[0].clone();
        let (_, directions) = unimodular_kernel_basis(&halfspace.normal);
        // Rows of the inverse of [w | directions] past the first give chart
        // coordinates; entries are integers since the matrix is unimodular.
        let inverse_rows = if n == 1 {
            Vec::new()
        } else {
            let (w, _) = unimodular_kernel_basis(&halfspace.normal);
            let mut cols: Vec<IntPoint> = vec![w];
            cols.extend(directions.iter().cloned());
            let rows: Vec<RatPoint> = (0..n)
                .map(|r| (0..n).map(|c| Rat::from_integer(cols[c][r].clone())).collect())
                .collect();
            let inv = invert(&rows).expect("unimodular matrix is invertible");
            inv[1..].to_vec()
        };
        Ok(Facet {
            index,
            halfspace,
            vertices,
            chart: FacetChart {
                base,
                directions,
                inverse_rows,
            },
        })
    }

    /// Dilation `k * P` as a polytope (vertices and offsets scale).
    pub fn dilate(&self, k: u64) -> Self {
        let k = Int::from(k);
        Self {
            dim: self.dim,
            halfspaces: self
                .halfspaces
                .iter()
                .map(|h| HalfSpace {
                    normal: h.normal.clone(),
                    offset: &h.offset * &k,
                })
                .collect(),
            vertices: self
                .vertices
                .iter()
                .map(|v| v.iter().map(|c| c * &k).collect())
                .collect(),
        }
    }

    /// Lattice points of `P ∩ (Z/i)^n` lying on the given facet.
    pub fn facet_lattice_points(&self, facet: &Facet, i: u64) -> Vec<RatPoint> {
        self.lattice_points(i)
            .into_iter()
            .filter(|p| facet.halfspace.eval_rat(p).is_zero())
            .collect()
    }
}

fn check_bounded(halfspaces: &[HalfSpace], normals_rat: &[RatPoint], n: usize) -> Result<()> {
    // The feasible region is unbounded iff the recession cone
    // { d : <a_k, d> >= 0 for all k } contains a nonzero direction.
    if rank(normals_rat) < n {
        return Err(Error::Unbounded);
    }
    // Pointed cone: any extreme ray lies on n-1 independent active
    // constraints; scan those kernels.
    let mut found_unbounded = false;
    for_each_subset(halfspaces.len(), n - 1, |subset| {
        if found_unbounded {
            return;
        }
        let rows: Vec<RatPoint> = subset.iter().map(|&k| normals_rat[k].clone()).collect();
        if rank(&rows) != n - 1 {
            return;
        }
        let d = crate::linalg::cross_product(&rows, n);
        if d.iter().all(|x| x.is_zero()) {
            return;
        }
        for dir in [d.clone(), d.iter().map(|x| -x).collect::<RatPoint>()] {
            if normals_rat
                .iter()
                .all(|a| !crate::rational::dot(a, &dir).is_negative())
            {
                found_unbounded = true;
                return;
            }
        }
    });
    if found_unbounded {
        return Err(Error::Unbounded);
    }
    Ok(())
}

/// Iterates over all `k`-subsets of `0..m` in lexicographic order.
fn for_each_subset(m: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k == 0 {
        f(&[]);
        return;
    }
    if k > m {
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
