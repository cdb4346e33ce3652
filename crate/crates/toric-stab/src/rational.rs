//! Exact rational scalars and points.
//!
//! Every quantity in this crate is an arbitrary-precision rational; nothing
//! is ever rounded. Values cross the I/O boundary as strings `"p/q"` in
//! lowest terms (`"-p/q"` for negatives, `"p"` for integers).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::Error;

/// Exact rational scalar. The denominator is always positive and the
/// fraction is reduced after every construction.
pub type Rat = BigRational;

/// Arbitrary-precision integer.
pub type Int = BigInt;

/// A point with rational coordinates.
pub type RatPoint = Vec<Rat>;

/// An integer lattice point.
pub type IntPoint = Vec<Int>;

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(Int::from(n), Int::from(d))
}

pub fn rat_int(n: i64) -> Rat {
    Rat::from_integer(Int::from(n))
}

/// Canonical `"p/q"` rendering in lowest terms.
pub fn format_rat(x: &Rat) -> String {
    if x.denom().is_one() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parses `"p"` or `"p/q"`. Rejects empty parts, zero denominators and any
/// character outside an optional leading sign and decimal digits.
pub fn parse_rat(s: &str) -> Result<Rat, Error> {
    let bad = || Error::InvalidRational(s.to_string());
    let (num_str, den_str) = match s.split_once('/') {
        Some((n, d)) => (n, Some(d)),
        None => (s, None),
    };
    let numer: Int = num_str.trim().parse().map_err(|_| bad())?;
    let denom: Int = match den_str {
        Some(d) => d.trim().parse().map_err(|_| bad())?,
        None => Int::one(),
    };
    if denom.is_zero() {
        return Err(bad());
    }
    Ok(Rat::new(numer, denom))
}

pub fn format_point(p: &[Rat]) -> String {
    let coords: Vec<String> = p.iter().map(format_rat).collect();
    format!("({})", coords.join(", "))
}

pub fn int_to_rat_point(p: &[Int]) -> RatPoint {
    p.iter().map(|c| Rat::from_integer(c.clone())).collect()
}

pub fn zero_point(dim: usize) -> RatPoint {
    vec![Rat::zero(); dim]
}

pub fn dot(a: &[Rat], b: &[Rat]) -> Rat {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn dot_int(a: &[Int], b: &[Int]) -> Int {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn add_points(a: &[Rat], b: &[Rat]) -> RatPoint {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn sub_points(a: &[Rat], b: &[Rat]) -> RatPoint {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn scale_point(c: &Rat, p: &[Rat]) -> RatPoint {
    p.iter().map(|x| c * x).collect()
}

/// Smallest integer `>= x`.
pub fn ceil_rat(x: &Rat) -> Int {
    x.ceil().to_integer()
}

/// Divides out the gcd of the entries, leaving the zero vector untouched.
/// Returns the content that was divided out.
pub fn primitive_part(v: &mut [Int]) -> Int {
    use num_integer::Integer as _;
    let mut g = Int::zero();
    for x in v.iter() {
        g = g.gcd(x);
    }
    if g.is_zero() || g.is_one() {
        return Int::one().max(g);
    }
    for x in v.iter_mut() {
        *x /= &g;
    }
    g
}

/// Clears denominators and divides by the content: the unique primitive
/// integer vector that is a positive multiple of `v`.
pub fn primitive_direction(v: &[Rat]) -> IntPoint {
    use num_integer::Integer as _;
    let mut lcm = Int::one();
    for x in v {
        lcm = lcm.lcm(x.denom());
    }
    let mut out: IntPoint = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    primitive_part(&mut out);
    out
}

/// |v|^2 as a rational.
pub fn norm_sq(v: &[Rat]) -> Rat {
    v.iter().map(|x| x * x).sum()
}

pub fn is_zero_point(v: &[Rat]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn abs_rat(x: &Rat) -> Rat {
    x.abs()
}
