//! Exact linear algebra over the rationals and the integer lattice.
//!
//! Everything here is dense and small: the geometry in this crate lives in
//! at most a handful of dimensions, so fraction-free tricks are not worth
//! their complexity. Plain rational Gaussian elimination is exact.

use num_integer::Integer as _;
use num_traits::{One, Signed, Zero};

use crate::rational::{Int, IntPoint, Rat, RatPoint};

/// Determinant of a square rational matrix (rows).
pub fn det(matrix: &[RatPoint]) -> Rat {
    let n = matrix.len();
    debug_assert!(matrix.iter().all(|r| r.len() == n));
    let mut m: Vec<RatPoint> = matrix.to_vec();
    let mut result = Rat::one();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero());
        let Some(pivot) = pivot else {
            return Rat::zero();
        };
        if pivot != col {
            m.swap(pivot, col);
            result = -result;
        }
        let p = m[col][col].clone();
        result *= &p;
        for r in col + 1..n {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &p;
            for c in col..n {
                let sub = &f * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    result
}

/// Solves `A x = b` for square rational `A`. Returns `None` when singular.
pub fn solve(a: &[RatPoint], b: &[Rat]) -> Option<RatPoint> {
    let n = a.len();
    debug_assert_eq!(b.len(), n);
    let mut m: Vec<RatPoint> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !m[r][col].is_zero())?;
        m.swap(pivot, col);
        let p = m[col][col].clone();
        for c in col..=n {
            m[col][c] = &m[col][c] / &p;
        }
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let f = m[r][col].clone();
            for c in col..=n {
                let sub = &f * &m[col][c];
                m[r][c] -= sub;
            }
        }
    }
    Some(m.into_iter().map(|row| row[n].clone()).collect())
}

/// Row rank of a rational matrix.
pub fn rank(matrix: &[RatPoint]) -> usize {
    if matrix.is_empty() {
        return 0;
    }
    let cols = matrix[0].len();
    let mut m: Vec<RatPoint> = matrix.to_vec();
    let mut r = 0;
    for col in 0..cols {
        let Some(pivot) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(pivot, r);
        let p = m[r][col].clone();
        for i in r + 1..m.len() {
            if m[i][col].is_zero() {
                continue;
            }
            let f = &m[i][col] / &p;
            for c in col..cols {
                let sub = &f * &m[r][c];
                m[i][c] -= sub;
            }
        }
        r += 1;
        if r == m.len() {
            break;
        }
    }
    r
}

/// Dimension of the affine hull of a point set.
pub fn affine_rank(points: &[RatPoint]) -> usize {
    if points.len() <= 1 {
        return 0;
    }
    let base = &points[0];
    let diffs: Vec<RatPoint> = points[1..]
        .iter()
        .map(|p| p.iter().zip(base).map(|(a, b)| a - b).collect())
        .collect();
    rank(&diffs)
}

/// A nonzero kernel vector of an (n-1) x n rational matrix of full row
/// rank: the vector of signed maximal minors (generalized cross product).
pub fn cross_product(rows: &[RatPoint], n: usize) -> RatPoint {
    debug_assert_eq!(rows.len() + 1, n);
    let mut out = Vec::with_capacity(n);
    for skip in 0..n {
        let minor: Vec<RatPoint> = rows
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(j, _)| *j != skip)
                    .map(|(_, x)| x.clone())
                    .collect()
            })
            .collect();
        let mut d = det(&minor);
        if skip % 2 == 1 {
            d = -d;
        }
        out.push(d);
    }
    out
}

/// Extended gcd over a vector: returns `(g, u)` with `<u, v> = g = gcd(v)`.
fn vector_gcd_witness(v: &[Int]) -> (Int, IntPoint) {
    let n = v.len();
    let mut g = Int::zero();
    let mut u = vec![Int::zero(); n];
    for (i, x) in v.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        if g.is_zero() {
            g = x.abs();
            u[i] = if x.is_negative() { -Int::one() } else { Int::one() };
            continue;
        }
        let e = g.extended_gcd(x);
        // e.gcd = e.x * g + e.y * x
        for c in u.iter_mut() {
            *c *= &e.x;
        }
        u[i] = e.y.clone();
        g = e.gcd;
    }
    (g, u)
}

/// For a primitive integer vector `a`, returns `(w, basis)` where
/// `<a, w> = 1` and `basis` is a Z-basis of the rank n-1 lattice
/// `{ d in Z^n : <a, d> = 0 }`, forming a direct summand of Z^n.
///
/// Together `[w | basis]` is a unimodular matrix, so the map
/// `t -> w*c + basis*t` parameterizes the affine lattice `{<a,x> = c}`.
pub fn unimodular_kernel_basis(a: &[Int]) -> (IntPoint, Vec<IntPoint>) {
    let n = a.len();
    let (g, w) = vector_gcd_witness(a);
    assert!(g.is_one(), "normal vector must be primitive");
    // Kernel basis: e_i - a_i * w spans the kernel but is not independent;
    // instead run column reduction of `a` tracking the transformation.
    // V starts as identity; columns are combined until a*V = (1, 0, .., 0).
    let mut v: Vec<IntPoint> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Int::one() } else { Int::zero() })
                .collect()
        })
        .collect(); // v[i] is the i-th column
    let mut av: Vec<Int> = a.to_vec();
    // Reduce pairs until a single nonzero entry of value ±1 remains.
    loop {
        let nz: Vec<usize> = (0..n).filter(|&i| !av[i].is_zero()).collect();
        if nz.len() == 1 {
            let k = nz[0];
            if av[k].is_negative() {
                for x in v[k].iter_mut() {
                    *x = -x.clone();
                }
                av[k] = -av[k].clone();
            }
            assert!(av[k].is_one(), "normal vector must be primitive");
            if k != 0 {
                v.swap(0, k);
                av.swap(0, k);
            }
            break;
        }
        let i = nz[0];
        let j = nz[1];
        // Unimodular 2x2 transform sending (av[i], av[j]) to (g, 0).
        let e = av[i].extended_gcd(&av[j]);
        let (p, q) = (e.x, e.y);
        let (ai, aj) = (av[i].clone(), av[j].clone());
        let (r, s) = (-(&aj / &e.gcd), ai.clone() / &e.gcd);
        let col_i: IntPoint = (0..n)
            .map(|t| &v[i][t] * &p + &v[j][t] * &q)
            .collect();
        let col_j: IntPoint = (0..n)
            .map(|t| &v[i][t] * &r + &v[j][t] * &s)
            .collect();
        v[i] = col_i;
        v[j] = col_j;
        av[i] = e.gcd;
        av[j] = Int::zero();
    }
    let w_col = v[0].clone();
    let kernel: Vec<IntPoint> = v[1..].to_vec();
    debug_assert_eq!(crate::rational::dot_int(a, &w_col), Int::one());
    debug_assert!(kernel
        .iter()
        .all(|d| crate::rational::dot_int(a, d).is_zero()));
    let _ = w;
    (w_col, kernel)
}

/// Inverts a square rational matrix. `None` when singular.
pub fn invert(matrix: &[RatPoint]) -> Option<Vec<RatPoint>> {
    let n = matrix.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let mut e = vec![Rat::zero(); n];
        e[j] = Rat::one();
        cols.push(solve(matrix, &e)?);
    }
    // cols[j] is the j-th column of the inverse; transpose to rows.
    Some((0..n)
        .map(|i| (0..n).map(|j| cols[j][i].clone()).collect())
        .collect())
}
