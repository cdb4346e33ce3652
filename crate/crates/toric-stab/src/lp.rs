//! Exact rational linear feasibility via phase-one simplex.
//!
//! Solves `A λ = b, λ >= 0` with Bland's rule (no cycling) over exact
//! rationals. On infeasibility it returns a Farkas certificate `y` with
//! `yᵀA <= 0` componentwise and `yᵀb > 0`. Problem sizes here are tiny
//! (tens of rows and columns), so a dense tableau is the right tool.

use num_traits::{Signed, Zero};

use crate::rational::{Rat, RatPoint};

#[derive(Debug, Clone)]
pub enum Feasibility {
    /// A solution `λ >= 0` with `A λ = b`.
    Feasible(RatPoint),
    /// `y` with `yᵀ A_j <= 0` for every column and `yᵀ b > 0`.
    Infeasible { certificate: RatPoint },
}

/// Decides `∃ λ >= 0 : A λ = b` for `A` given by columns.
pub fn solve_eq_nonneg(columns: &[RatPoint], b: &[Rat]) -> Feasibility {
    let m = b.len();
    let k = columns.len();
    debug_assert!(columns.iter().all(|c| c.len() == m));

    // Orient rows so the right-hand side is nonnegative; remember flips to
    // unflip the certificate later.
    let mut flip = vec![false; m];
    let mut rhs: RatPoint = b.to_vec();
    for (i, v) in rhs.iter_mut().enumerate() {
        if v.is_negative() {
            *v = -v.clone();
            flip[i] = true;
        }
    }
    let sign = |i: usize, x: &Rat| if flip[i] { -x.clone() } else { x.clone() };

    // Tableau over k original + m artificial columns, basis = artificials.
    let mut t: Vec<RatPoint> = (0..m)
        .map(|i| {
            let mut row: RatPoint = (0..k).map(|j| sign(i, &columns[j][i])).collect();
            row.extend((0..m).map(|a| {
                if a == i {
                    Rat::from_integer(1.into())
                } else {
                    Rat::zero()
                }
            }));
            row
        })
        .collect();
    let mut basis: Vec<usize> = (k..k + m).collect();

    loop {
        // y = c_B B^{-1}: sum of B^{-1} rows whose basic variable is
        // artificial; B^{-1} sits in the artificial block of the tableau.
        let mut y: RatPoint = vec![Rat::zero(); m];
        for (r, &bi) in basis.iter().enumerate() {
            if bi >= k {
                for i in 0..m {
                    y[i] += &t[r][k + i];
                }
            }
        }
        // Bland: first column with negative reduced cost. With the tableau
        // in B^{-1}A form, the reduced cost of column j is
        // c_j - sum over basic-artificial rows of t[r][j].
        let mut entering = None;
        for j in 0..k + m {
            let cost = if j >= k { Rat::from_integer(1.into()) } else { Rat::zero() };
            let mut zj = Rat::zero();
            for (r, &bi) in basis.iter().enumerate() {
                if bi >= k {
                    zj += &t[r][j];
                }
            }
            if cost - zj < Rat::zero() {
                entering = Some(j);
                break;
            }
        }
        let Some(entering) = entering else {
            // Optimal. Objective = sum of rhs over basic-artificial rows.
            let mut objective = Rat::zero();
            for (r, &bi) in basis.iter().enumerate() {
                if bi >= k {
                    objective += &rhs[r];
                }
            }
            if objective.is_zero() {
                let mut lambda = vec![Rat::zero(); k];
                for (r, &bi) in basis.iter().enumerate() {
                    if bi < k {
                        lambda[bi] = rhs[r].clone();
                    }
                }
                return Feasibility::Feasible(lambda);
            }
            let certificate: RatPoint = (0..m)
                .map(|i| if flip[i] { -y[i].clone() } else { y[i].clone() })
                .collect();
            return Feasibility::Infeasible { certificate };
        };
        // Ratio test, Bland tie-break by lowest basis index.
        let mut leaving: Option<(usize, Rat)> = None;
        for r in 0..m {
            if !t[r][entering].is_positive() {
                continue;
            }
            let ratio = &rhs[r] / &t[r][entering];
            let better = match &leaving {
                None => true,
                Some((lr, lratio)) => {
                    ratio < *lratio || (ratio == *lratio && basis[r] < basis[*lr])
                }
            };
            if better {
                leaving = Some((r, ratio));
            }
        }
        let Some((lr, _)) = leaving else {
            // Unbounded phase-one objective cannot happen (bounded below
            // by zero); an all-nonpositive column means the entering
            // variable can grow without bound, which for a feasibility
            // tableau is impossible.
            unreachable!("phase-one simplex column with no pivot");
        };
        // Pivot.
        let p = t[lr][entering].clone();
        for c in 0..k + m {
            t[lr][c] = &t[lr][c] / &p;
        }
        rhs[lr] = &rhs[lr] / &p;
        for r in 0..m {
            if r == lr || t[r][entering].is_zero() {
                continue;
            }
            let f = t[r][entering].clone();
            for c in 0..k + m {
                let sub = &f * &t[lr][c];
                t[r][c] -= sub;
            }
            let sub = &f * &rhs[lr];
            rhs[r] -= sub;
        }
        basis[lr] = entering;
    }
}

/// Is the origin a convex combination of the given points? On success the
/// convex weights are returned; on failure a strictly separating linear
/// functional `v` with `<v, p> > 0` for every point `p`.
pub enum ConvexHullMembership {
    Inside(RatPoint),
    Separated(RatPoint),
}

pub fn origin_in_convex_hull(points: &[RatPoint]) -> ConvexHullMembership {
    assert!(!points.is_empty());
    let dim = points[0].len();
    // Columns (p_j; 1), rhs (0; 1).
    let columns: Vec<RatPoint> = points
        .iter()
        .map(|p| {
            let mut c = p.clone();
            c.push(Rat::from_integer(1.into()));
            c
        })
        .collect();
    let mut b = vec![Rat::zero(); dim];
    b.push(Rat::from_integer(1.into()));
    match solve_eq_nonneg(&columns, &b) {
        Feasibility::Feasible(lambda) => ConvexHullMembership::Inside(lambda),
        Feasibility::Infeasible { certificate } => {
            // y^T (p_j; 1) <= 0 and y_last > 0, so v = -y_{0..dim} has
            // <v, p_j> >= y_last > 0.
            let v: RatPoint = certificate[..dim].iter().map(|x| -x.clone()).collect();
            ConvexHullMembership::Separated(v)
        }
    }
}
