//! Built-in example pairs.

use crate::error::{Error, Result};
use crate::geometry::{HalfSpace, LatticePolytope};
use crate::obstruction::DivisorSpec;
use crate::rational::{rat, Int};

pub const FIXTURE_NAMES: [&str; 5] = [
    "cp1-unit",
    "cp1-sym",
    "square-sym",
    "simplex2",
    "hirzebruch1",
];

fn halfspace(normal: &[i64], offset: i64) -> HalfSpace {
    HalfSpace::new(
        normal.iter().map(|&c| Int::from(c)).collect(),
        Int::from(offset),
    )
    .expect("fixture halfspace")
}

/// Loads a named fixture with its default divisors.
///
/// * `cp1-unit` — the unit interval [0, 1] with both endpoint divisors at
///   cone angle 13/14.
/// * `cp1-sym` — the symmetric interval [-1, 1], same endpoint divisors.
/// * `square-sym` — the square [-1, 1]^2, no divisors.
/// * `simplex2` — the standard triangle, no divisors.
/// * `hirzebruch1` — the first Hirzebruch surface polygon
///   {-x-y+1 >= 0, x+1 >= 0, x+y+1 >= 0, y+1 >= 0} with cone angles
///   13/14, 13/14 and 5/7 on the two fibers and the infinity section.
pub fn load_fixture(name: &str) -> Result<(LatticePolytope, Vec<DivisorSpec>)> {
    match name {
        "cp1-unit" => {
            let p = LatticePolytope::from_halfspaces(vec![
                halfspace(&[1], 0),
                halfspace(&[-1], 1),
            ])?;
            let divisors = vec![
                DivisorSpec {
                    facet_index: 0,
                    beta: rat(13, 14),
                },
                DivisorSpec {
                    facet_index: 1,
                    beta: rat(13, 14),
                },
            ];
            Ok((p, divisors))
        }
        "cp1-sym" => {
            let p = LatticePolytope::from_halfspaces(vec![
                halfspace(&[1], 1),
                halfspace(&[-1], 1),
            ])?;
            let divisors = vec![
                DivisorSpec {
                    facet_index: 0,
                    beta: rat(13, 14),
                },
                DivisorSpec {
                    facet_index: 1,
                    beta: rat(13, 14),
                },
            ];
            Ok((p, divisors))
        }
        "square-sym" => {
            let p = LatticePolytope::from_halfspaces(vec![
                halfspace(&[1, 0], 1),
                halfspace(&[-1, 0], 1),
                halfspace(&[0, 1], 1),
                halfspace(&[0, -1], 1),
            ])?;
            Ok((p, Vec::new()))
        }
        "simplex2" => {
            let p = LatticePolytope::from_halfspaces(vec![
                halfspace(&[1, 0], 0),
                halfspace(&[0, 1], 0),
                halfspace(&[-1, -1], 1),
            ])?;
            Ok((p, Vec::new()))
        }
        "hirzebruch1" => {
            let p = LatticePolytope::from_halfspaces(vec![
                halfspace(&[-1, -1], 1),
                halfspace(&[1, 0], 1),
                halfspace(&[1, 1], 1),
                halfspace(&[0, 1], 1),
            ])?;
            // facet 1 and facet 3 are the fiber divisors, facet 0 the
            // infinity section.
            let divisors = vec![
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
            ];
            Ok((p, divisors))
        }
        other => Err(Error::UnknownFixture(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn all_fixtures_load_and_are_delzant() {
        for name in FIXTURE_NAMES {
            let (p, divisors) = load_fixture(name).unwrap();
            assert!(p.is_delzant().is_delzant, "{name}");
            crate::obstruction::validate_divisors(&p, &divisors).unwrap();
        }
    }

    #[test]
    fn unknown_fixture() {
        assert!(matches!(
            load_fixture("cp2"),
            Err(Error::UnknownFixture(_))
        ));
    }

    #[test]
    fn hirzebruch_divisor_facets_are_the_named_ones() {
        let (p, divisors) = load_fixture("hirzebruch1").unwrap();
        let f1 = p.facet(divisors[0].facet_index).unwrap();
        assert_eq!(f1.halfspace.normal, vec![Int::from(1), Int::from(0)]);
        let f2 = p.facet(divisors[1].facet_index).unwrap();
        assert_eq!(f2.halfspace.normal, vec![Int::from(0), Int::from(1)]);
        let finf = p.facet(divisors[2].facet_index).unwrap();
        assert_eq!(finf.halfspace.normal, vec![Int::from(-1), Int::from(-1)]);
    }
}
