//! Shrinkable randomized checks of the exact layer's algebraic laws.

use std::collections::BTreeSet;

use approx::assert_abs_diff_eq;
use proptest::prelude::*;

use lamina::charclass::partitions;
use lamina::cobordism::{
    cobordant0, orientation_inverse, pair_of_pants, phi0, split_compact_leaves, verify_witness,
    RandomOneManifold, RandomZeroManifold, Sign, Status,
};
use lamina::measure::{Angle, Atom, Automorphism, AutomorphismData, MeasureSpace, Segment,
    SegmentArrow};
use lamina::prism::{stokes_check, PrismBase, PrismForm};
use lamina::scalar::Scalar;

fn rational() -> impl Strategy<Value = Scalar> {
    (1i64..=60, 1i64..=12).prop_map(|(n, d)| Scalar::new(n, d).unwrap())
}

fn point_family(prefix: &'static str) -> impl Strategy<Value = MeasureSpace> {
    prop::collection::vec(rational(), 0..6).prop_map(move |masses| {
        let atoms = masses
            .into_iter()
            .enumerate()
            .map(|(i, mass)| Atom {
                id: format!("{prefix}{i}"),
                mass,
            })
            .collect();
        MeasureSpace::new(atoms, Vec::new()).unwrap()
    })
}

fn zero_manifold(
    plus_prefix: &'static str,
    minus_prefix: &'static str,
) -> impl Strategy<Value = RandomZeroManifold> {
    (point_family(plus_prefix), point_family(minus_prefix))
        .prop_map(|(plus, minus)| RandomZeroManifold { plus, minus })
}

fn permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

/// Cycles of a permutation given as an image vector.
fn cycles(targets: &[usize]) -> Vec<Vec<usize>> {
    let mut seen = vec![false; targets.len()];
    let mut out = Vec::new();
    for start in 0..targets.len() {
        if seen[start] {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut at = targets[start];
        while at != start {
            seen[at] = true;
            cycle.push(at);
            at = targets[at];
        }
        out.push(cycle);
    }
    out
}

proptest! {
    #[test]
    fn scalar_text_round_trips(numer in -10_000i64..=10_000, denom in 1i64..=9_999) {
        let value = Scalar::new(numer, denom).unwrap();
        prop_assert_eq!(value.display().parse::<Scalar>().unwrap(), value.clone());
        prop_assert_eq!(
            value.to_fraction_string().parse::<Scalar>().unwrap(),
            value.clone()
        );
        let json = serde_json::to_string(&value).unwrap();
        prop_assert_eq!(serde_json::from_str::<Scalar>(&json).unwrap(), value);
    }

    #[test]
    fn signed_mass_is_additive_and_antisymmetric(
        x in zero_manifold("a", "b"),
        y in zero_manifold("c", "d"),
    ) {
        let sum = x.disjoint_union(&y);
        prop_assert_eq!(phi0(&sum), phi0(&x) + phi0(&y));
        prop_assert_eq!(phi0(&x.reverse()), -phi0(&x));
        prop_assert_eq!(phi0(&x.disjoint_union(&x.reverse())), Scalar::zero());
        prop_assert!(cobordant0(&x, &x));
        prop_assert!(cobordant0(&sum, &y.disjoint_union(&x)));
    }

    #[test]
    fn partition_enumeration_invariants(n in 0u32..=14) {
        let list = partitions(n);
        prop_assert!(!list.is_empty());
        let mut seen = BTreeSet::new();
        for alpha in &list {
            prop_assert_eq!(alpha.weight(), n);
            prop_assert!(alpha.parts().windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(seen.insert(alpha.to_string()));
        }
        if n >= 1 {
            prop_assert_eq!(list[0].parts(), &[n][..]);
            let ones = vec![1u32; n as usize];
            prop_assert_eq!(list[list.len() - 1].parts(), ones.as_slice());
        }
    }

    #[test]
    fn leaf_splitting_conserves_transverse_mass(
        (targets, pool) in (2usize..=8).prop_flat_map(|n| {
            (permutation(n), prop::collection::vec(rational(), n))
        }),
        length in rational(),
        (p, q) in (0i64..=30, 1i64..=30),
    ) {
        // Constant mass along each cycle keeps the permutation
        // measure-preserving; the segment carries a rational rotation.
        let orbit_list = cycles(&targets);
        let mut masses = vec![Scalar::zero(); targets.len()];
        for (which, orbit) in orbit_list.iter().enumerate() {
            for &i in orbit {
                masses[i] = pool[which].clone();
            }
        }
        let atoms: Vec<Atom> = masses
            .iter()
            .enumerate()
            .map(|(i, mass)| Atom {
                id: format!("a{i}"),
                mass: mass.clone(),
            })
            .collect();
        let segments = vec![Segment {
            id: "s".to_owned(),
            length: length.clone(),
        }];
        let base = MeasureSpace::new(atoms, segments).unwrap();
        let data = AutomorphismData {
            atom_map: targets
                .iter()
                .enumerate()
                .map(|(i, &j)| (format!("a{i}"), format!("a{j}")))
                .collect(),
            segment_map: vec![SegmentArrow {
                from: "s".to_owned(),
                to: "s".to_owned(),
                angle: Angle::rational(p, q),
            }],
        };
        let gamma = Automorphism::bind(base, data).unwrap();
        let manifold = RandomOneManifold::suspension(gamma, Sign::Plus);
        let outcome = split_compact_leaves(&manifold).unwrap();

        prop_assert!(outcome.aperiodic.is_empty());
        prop_assert_eq!(outcome.periods.len(), orbit_list.len() + 1);

        // Each orbit is keyed by its lexicographically least id and crossed
        // `period` times, so domain mass times period recovers the orbit.
        for orbit in &orbit_list {
            let rep = orbit.iter().map(|i| format!("a{i}")).min().unwrap();
            let period = &outcome.periods[&rep];
            prop_assert_eq!(period, &num_bigint::BigInt::from(orbit.len()));
        }
        let mut recovered = Scalar::zero();
        for term in outcome.compact.terms() {
            for atom in term.base().atoms() {
                let period = outcome.periods[&atom.id].clone();
                recovered += atom.mass.clone() * Scalar::from_bigint(period);
            }
            for segment in term.base().segments() {
                let period = outcome.periods[&segment.id].clone();
                recovered += segment.length.clone() * Scalar::from_bigint(period);
            }
        }
        prop_assert_eq!(recovered, manifold.total_transverse_mass());
    }

    #[test]
    fn pants_and_inverse_witnesses_always_verify(
        (n, sigma, tau) in (2usize..=6).prop_flat_map(|n| {
            (Just(n), permutation(n), permutation(n))
        }),
        mass in rational(),
        length in rational(),
        (p1, q1) in (0i64..=12, 1i64..=12),
        (p2, q2) in (0i64..=12, 1i64..=12),
    ) {
        let atoms: Vec<Atom> = (0..n)
            .map(|i| Atom {
                id: format!("a{i}"),
                mass: mass.clone(),
            })
            .collect();
        let segments = vec![Segment {
            id: "s".to_owned(),
            length,
        }];
        let base = MeasureSpace::new(atoms, segments).unwrap();
        let bind = |targets: &[usize], p: i64, q: i64| {
            Automorphism::bind(
                base.clone(),
                AutomorphismData {
                    atom_map: targets
                        .iter()
                        .enumerate()
                        .map(|(i, &j)| (format!("a{i}"), format!("a{j}")))
                        .collect(),
                    segment_map: vec![SegmentArrow {
                        from: "s".to_owned(),
                        to: "s".to_owned(),
                        angle: Angle::rational(p, q),
                    }],
                },
            )
            .unwrap()
        };
        let phi = bind(&sigma, p1, q1);
        let psi = bind(&tau, p2, q2);

        let pants = pair_of_pants(&phi, &psi).unwrap();
        let report = verify_witness(&pants);
        prop_assert_eq!(report.status, Status::Ok);

        let inverse = orientation_inverse(&RandomOneManifold::suspension(phi, Sign::Plus));
        let report = verify_witness(&inverse);
        prop_assert_eq!(report.status, Status::Ok);
    }

    #[test]
    fn boundary_pairing_is_exact_on_quadratics(
        a in -3.0f64..3.0,
        b in -3.0f64..3.0,
        c in -3.0f64..3.0,
        half in 2usize..=50,
    ) {
        // Centered interior stencils, the one-sided endpoint stencils, and
        // the trapezoid weights all reproduce quadratics exactly, so the
        // residual is pure rounding noise.
        let n = 2 * half + 1;
        let base = PrismBase {
            dim: 1,
            extent: vec![0.0, 1.0],
            n,
            orientation: Sign::Plus,
        };
        let vertical = MeasureSpace::single_atom("k", Scalar::one());
        let f = move |x: f64, _: f64| a + b * x + c * x * x;
        let form = PrismForm::sample(base, vertical, 0, &[&f]).unwrap();
        let report = stokes_check(&form, 1e-9).unwrap();

        prop_assert!(report.pass, "residual {}", report.residual);
        assert_abs_diff_eq!(report.lhs, report.rhs, epsilon = 1e-9);
        assert_abs_diff_eq!(report.rhs, b + c, epsilon = 1e-9);
    }
}
