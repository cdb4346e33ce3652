//! Exact vertex enumeration by the double description method.
//!
//! A bounded system `{x : A x + b >= 0, C x + d = 0}` is homogenized to a
//! cone in one extra dimension and the extreme rays are built up one
//! constraint at a time. Constraint insertion order is fixed by sorting
//! the homogenized rows lexicographically, and rays are kept as primitive
//! integer vectors, so the output is deterministic. The lineality space is
//! carried explicitly until constraints shrink it away.

use num_traits::{Signed, Zero};
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::rational::{int_to_rat_point, primitive_direction, Int, IntPoint, Rat, RatPoint};

/// `<row, x> + constant >= 0` (or `= 0` in `equalities`).
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub dim: usize,
    pub inequalities: Vec<(RatPoint, Rat)>,
    pub equalities: Vec<(RatPoint, Rat)>,
}

#[derive(Debug, Clone)]
struct Ray {
    vector: IntPoint,
    zero_set: Vec<u64>,
}

fn bitset_with(words: usize) -> Vec<u64> {
    vec![0u64; words]
}

fn bit_insert(set: &mut [u64], k: usize) {
    set[k / 64] |= 1 << (k % 64);
}

fn bit_and(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).map(|(x, y)| x & y).collect()
}

fn bit_subset(a: &[u64], b: &[u64]) -> bool {
    a.iter().zip(b).all(|(x, y)| x & !y == 0)
}

fn eval_row(row: &[Rat], ray: &IntPoint) -> Rat {
    row.iter()
        .zip(ray)
        .map(|(r, c)| r * Rat::from_integer(c.clone()))
        .sum()
}

/// All vertices of the bounded solution set, sorted lexicographically.
/// Errors with `TooLarge` when the intermediate ray count exceeds the cap
/// and with `VerificationFailed` if the system turns out unbounded.
pub fn enumerate_vertices(system: &LinearSystem, max_rays: usize) -> Result<Vec<RatPoint>> {
    let hdim = system.dim + 1;
    // Homogenized rows <(a, b), (x, t)> >= 0, equalities as opposite pairs,
    // plus t >= 0. Sorted and deduplicated for reproducibility.
    let mut rows: BTreeSet<RatPoint> = BTreeSet::new();
    let push = |normal: &RatPoint, constant: &Rat, rows: &mut BTreeSet<RatPoint>| {
        let mut h = normal.clone();
        h.push(constant.clone());
        rows.insert(int_to_rat_point(&primitive_direction(&h)));
    };
    for (a, b) in &system.inequalities {
        push(a, b, &mut rows);
    }
    for (c, d) in &system.equalities {
        push(c, d, &mut rows);
        let neg: RatPoint = c.iter().map(|x| -x.clone()).collect();
        push(&neg, &(-d.clone()), &mut rows);
    }
    let mut t_row = vec![Rat::zero(); hdim];
    t_row[hdim - 1] = Rat::from_integer(1.into());
    rows.insert(t_row);
    let rows: Vec<RatPoint> = rows.into_iter().collect();
    let words = rows.len().div_ceil(64);

    // Start from the full space as lineality, no rays.
    let mut lineality: Vec<IntPoint> = (0..hdim)
        .map(|i| {
            (0..hdim)
                .map(|j| if i == j { Int::from(1) } else { Int::from(0) })
                .collect()
        })
        .collect();
    let mut rays: Vec<Ray> = Vec::new();

    for (row_idx, row) in rows.iter().enumerate() {
        let pivot = lineality
            .iter()
            .position(|l| !eval_row(row, l).is_zero());
        if let Some(pivot) = pivot {
            let mut l0 = lineality.remove(pivot);
            let mut v0 = eval_row(row, &l0);
            if v0.is_negative() {
                for c in l0.iter_mut() {
                    *c = -c.clone();
                }
                v0 = -v0;
            }
            for l in lineality.iter_mut() {
                let vl = eval_row(row, l);
                if vl.is_zero() {
                    continue;
                }
                let adjusted: RatPoint = l
                    .iter()
                    .zip(&l0)
                    .map(|(lc, l0c)| {
                        Rat::from_integer(lc.clone())
                            - &vl / &v0 * Rat::from_integer(l0c.clone())
                    })
                    .collect();
                *l = primitive_direction(&adjusted);
            }
            for ray in rays.iter_mut() {
                let vr = eval_row(row, &ray.vector);
                if !vr.is_zero() {
                    let adjusted: RatPoint = ray
                        .vector
                        .iter()
                        .zip(&l0)
                        .map(|(rc, l0c)| {
                            Rat::from_integer(rc.clone())
                                - &vr / &v0 * Rat::from_integer(l0c.clone())
                        })
                        .collect();
                    ray.vector = primitive_direction(&adjusted);
                }
                bit_insert(&mut ray.zero_set, row_idx);
            }
            let mut zero_set = bitset_with(words);
            for prev in 0..row_idx {
                bit_insert(&mut zero_set, prev);
            }
            rays.push(Ray {
                vector: l0,
                zero_set,
            });
            continue;
        }

        // Lineality is orthogonal to the row: classic double description.
        let values: Vec<Rat> = rays.iter().map(|r| eval_row(row, &r.vector)).collect();
        let mut new_rays: Vec<Ray> = Vec::new();
        for (ip, vp) in values.iter().enumerate() {
            if !vp.is_positive() {
                continue;
            }
            for (in_, vn) in values.iter().enumerate() {
                if !vn.is_negative() {
                    continue;
                }
                // Combinatorial adjacency: no third ray's zero set contains
                // the intersection.
                let common = bit_and(&rays[ip].zero_set, &rays[in_].zero_set);
                let adjacent = rays.iter().enumerate().all(|(k, r)| {
                    k == ip || k == in_ || !bit_subset(&common, &r.zero_set)
                });
                if !adjacent {
                    continue;
                }
                let combo: RatPoint = rays[ip]
                    .vector
                    .iter()
                    .zip(&rays[in_].vector)
                    .map(|(pc, nc)| {
                        vp * Rat::from_integer(nc.clone())
                            - vn * Rat::from_integer(pc.clone())
                    })
                    .collect();
                let vector = primitive_direction(&combo);
                // Exact zero set against every processed row: inherited
                // intersections can miss accidental tightness, and the
                // adjacency test needs honest incidence data.
                let mut zero_set = bitset_with(words);
                for (prev, prev_row) in rows.iter().enumerate().take(row_idx + 1) {
                    if eval_row(prev_row, &vector).is_zero() {
                        bit_insert(&mut zero_set, prev);
                    }
                }
                new_rays.push(Ray { vector, zero_set });
            }
        }
        let mut kept: Vec<Ray> = Vec::new();
        for (k, mut ray) in rays.drain(..).enumerate() {
            if values[k].is_negative() {
                continue;
            }
            if values[k].is_zero() {
                bit_insert(&mut ray.zero_set, row_idx);
            }
            kept.push(ray);
        }
        kept.extend(new_rays);
        rays = kept;
        if rays.len() > max_rays {
            return Err(Error::TooLarge(format!(
                "vertex enumeration exceeded {max_rays} intermediate rays"
            )));
        }
    }

    if !lineality.is_empty() {
        return Err(Error::VerificationFailed(
            "system contains a line; expected a bounded polytope".into(),
        ));
    }
    let mut vertices: BTreeSet<RatPoint> = BTreeSet::new();
    for ray in &rays {
        let t = &ray.vector[hdim - 1];
        if t.is_zero() {
            return Err(Error::VerificationFailed(
                "system has a recession direction; expected a bounded polytope".into(),
            ));
        }
        if t.is_negative() {
            // t >= 0 is one of the rows, so this cannot survive.
            return Err(Error::VerificationFailed(
                "homogenization produced a negative-scale ray".into(),
            ));
        }
        let t_rat = Rat::from_integer(t.clone());
        vertices.insert(
            ray.vector[..hdim - 1]
                .iter()
                .map(|c| Rat::from_integer(c.clone()) / &t_rat)
                .collect(),
        );
    }
    Ok(vertices.into_iter().collect())
}

/// Convenience wrapper: vertices of `{x : A x + b >= 0}`.
pub fn vertices_of_inequalities(
    dim: usize,
    inequalities: Vec<(RatPoint, Rat)>,
    max_rays: usize,
) -> Result<Vec<RatPoint>> {
    enumerate_vertices(
        &LinearSystem {
            dim,
            inequalities,
            equalities: Vec::new(),
        },
        max_rays,
    )
}
