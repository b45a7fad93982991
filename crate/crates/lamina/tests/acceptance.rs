//! Acceptance gate: one test per advertised guarantee. Each prints a single
//! PASS or FAIL line with the measured runtime against its budget; run with
//! `cargo test --test acceptance -- --nocapture` to see all lines.

use std::collections::BTreeMap;
use std::panic::AssertUnwindSafe;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use lamina::charclass::{
    expected_pontryagin, partitions, pontryagin_matrix, pontryagin_number, solve_target,
    Partition, ProjectiveProduct,
};
use lamina::chernweil::{
    connection_independence_check, integrate_invariant, named_geometry, whitney_sum_check,
    CurvatureOptions, InvariantPolynomial,
};
use lamina::cobordism::{
    boundary_of_prism, cobordant0, disk_filling, pair_of_pants, phi0, split_compact_leaves,
    verify_witness, CobordismWitness, RandomOneManifold, RandomZeroManifold, Sign, Status,
};
use lamina::measure::{Angle, Atom, Automorphism, AutomorphismData, MeasureSpace, SegmentArrow};
use lamina::prism::{stokes_check, PrismBase, PrismForm};
use lamina::scalar::Scalar;

fn criterion<F>(name: &str, budget: Duration, body: F)
where
    F: FnOnce() -> String,
{
    let start = Instant::now();
    match std::panic::catch_unwind(AssertUnwindSafe(body)) {
        Ok(detail) => {
            let elapsed = start.elapsed();
            if elapsed > budget {
                println!("FAIL {name}: over budget ({elapsed:.2?} > {budget:.2?})");
                panic!("{name} exceeded its runtime budget: {elapsed:.2?} > {budget:.2?}");
            }
            println!("PASS {name}: {detail} [{elapsed:.2?} of {budget:.2?}]");
        }
        Err(cause) => {
            println!("FAIL {name}");
            std::panic::resume_unwind(cause);
        }
    }
}

fn scalar(text: &str) -> Scalar {
    text.parse().expect("literal scalar")
}

fn random_mass(rng: &mut ChaCha8Rng) -> Scalar {
    Scalar::new(rng.gen_range(1..=40), rng.gen_range(1..=12)).unwrap()
}

fn random_space(rng: &mut ChaCha8Rng, prefix: &str) -> MeasureSpace {
    let atoms = (0..rng.gen_range(0..4))
        .map(|i| Atom {
            id: format!("{prefix}a{i}"),
            mass: random_mass(rng),
        })
        .collect();
    let segments = (0..rng.gen_range(0..3))
        .map(|i| lamina::measure::Segment {
            id: format!("{prefix}s{i}"),
            length: random_mass(rng),
        })
        .collect();
    MeasureSpace::new(atoms, segments).unwrap()
}

fn random_zero_manifold(rng: &mut ChaCha8Rng) -> RandomZeroManifold {
    RandomZeroManifold::new(random_space(rng, "p"), random_space(rng, "m")).unwrap()
}

#[test]
fn signed_mass_invariant_on_randomized_cases() {
    criterion("signed-mass invariant suite", Duration::from_secs(1), || {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let cases = 1000;
        for _ in 0..cases {
            let x = random_zero_manifold(&mut rng);
            let y = random_zero_manifold(&mut rng);

            // Disjoint union adds invariants.
            let union = x.disjoint_union(&y);
            assert_eq!(phi0(&union), phi0(&x) + phi0(&y));

            // Reversal negates them.
            assert_eq!(phi0(&x.reverse()), -phi0(&x));
            assert_eq!(phi0(&x.reverse().reverse()), phi0(&x));

            // Prism boundaries carry none.
            let k = random_space(&mut rng, "k");
            assert!(phi0(&boundary_of_prism(&k)).is_zero());

            // Equality of the invariant is exactly the cobordance relation,
            // and gluing a null boundary changes nothing.
            assert_eq!(cobordant0(&x, &y), phi0(&x) == phi0(&y));
            let padded = x.disjoint_union(&boundary_of_prism(&k));
            assert!(cobordant0(&padded, &x));
        }
        format!("{cases} randomized exact cases, zero tolerance")
    });
}

/// Brute-force orbit data for a permutation given as `index -> index`.
struct Orbit {
    representative: usize,
    length: usize,
}

fn enumerate_orbits(map: &[usize]) -> Vec<Orbit> {
    let mut seen = vec![false; map.len()];
    let mut orbits = Vec::new();
    for start in 0..map.len() {
        if seen[start] {
            continue;
        }
        let mut length = 0;
        let mut current = start;
        loop {
            seen[current] = true;
            length += 1;
            current = map[current];
            if current == start {
                break;
            }
        }
        orbits.push(Orbit {
            representative: start,
            length,
        });
    }
    orbits
}

fn atom_id(i: usize) -> String {
    format!("a{i:02}")
}

/// A random measure-preserving atom permutation: masses constant per cycle.
fn random_permutation(
    rng: &mut ChaCha8Rng,
    size: usize,
) -> (Automorphism, Vec<usize>, Vec<Scalar>) {
    let mut targets: Vec<usize> = (0..size).collect();
    targets.shuffle(rng);
    let orbits = enumerate_orbits(&targets);
    let mut masses = vec![Scalar::zero(); size];
    for orbit in &orbits {
        let mass = random_mass(rng);
        let mut current = orbit.representative;
        loop {
            masses[current] = mass.clone();
            current = targets[current];
            if current == orbit.representative {
                break;
            }
        }
    }
    let atoms = (0..size)
        .map(|i| Atom {
            id: atom_id(i),
            mass: masses[i].clone(),
        })
        .collect();
    let base = MeasureSpace::new(atoms, vec![]).unwrap();
    let data = AutomorphismData {
        atom_map: (0..size).map(|i| (atom_id(i), atom_id(targets[i]))).collect(),
        segment_map: vec![],
    };
    (
        Automorphism::bind(base, data).unwrap(),
        targets,
        masses,
    )
}

fn rotation(length: Scalar, angle: Angle) -> Automorphism {
    Automorphism::bind(
        MeasureSpace::single_segment("s", length),
        AutomorphismData {
            atom_map: vec![],
            segment_map: vec![SegmentArrow {
                from: "s".to_owned(),
                to: "s".to_owned(),
                angle,
            }],
        },
    )
    .unwrap()
}

#[test]
fn leaf_splitting_matches_brute_force_and_witnesses_verify() {
    criterion("compact-leaf machinery", Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(23);

        // Random atom permutations against independent orbit enumeration.
        let permutation_cases = 500;
        for _ in 0..permutation_cases {
            let size = rng.gen_range(1..=12);
            let (gamma, targets, masses) = random_permutation(&mut rng, size);
            let manifold = RandomOneManifold::suspension(gamma, Sign::Plus);
            let outcome = split_compact_leaves(&manifold).unwrap();

            assert!(outcome.aperiodic.is_empty());
            let orbits = enumerate_orbits(&targets);

            let expected_periods: BTreeMap<String, BigInt> = orbits
                .iter()
                .map(|o| (atom_id(o.representative), BigInt::from(o.length)))
                .collect();
            assert_eq!(outcome.periods, expected_periods);

            let mut expected_atoms: Vec<(String, Scalar)> = orbits
                .iter()
                .map(|o| (atom_id(o.representative), masses[o.representative].clone()))
                .collect();
            expected_atoms.sort();
            let actual_atoms: Vec<(String, Scalar)> = outcome
                .compact
                .terms()
                .iter()
                .flat_map(|t| t.base().atoms().iter())
                .map(|a| (a.id.clone(), a.mass.clone()))
                .collect();
            assert_eq!(actual_atoms, expected_atoms);

            // Transverse mass is conserved: domain mass times period.
            let recovered: Scalar = orbits
                .iter()
                .map(|o| {
                    masses[o.representative].clone()
                        * Scalar::from_integer(o.length as i64)
                })
                .sum();
            assert_eq!(recovered, manifold.total_transverse_mass());
        }

        // Random rational rotations against reduced-denominator arithmetic.
        let rotation_cases = 100;
        for _ in 0..rotation_cases {
            let p: i64 = rng.gen_range(0..60);
            let q: i64 = rng.gen_range(1..=60);
            let length = random_mass(&mut rng);
            let gamma = rotation(length.clone(), Angle::rational(p, q));
            let outcome =
                split_compact_leaves(&RandomOneManifold::suspension(gamma, Sign::Plus)).unwrap();

            let reduced = Scalar::new(p, q).unwrap();
            let period = reduced.fract_mod_one().denom().clone();
            assert!(outcome.aperiodic.is_empty());
            assert_eq!(outcome.periods.len(), 1);
            assert_eq!(outcome.periods["s"], period);
            let domain = outcome.compact.terms()[0].base().total_mass();
            assert_eq!(domain, length / Scalar::from_bigint(period));
        }

        // Irrational rotations keep every leaf aperiodic.
        for k in 1..=10 {
            let gamma = rotation(scalar("1"), Angle::tau(k, 1));
            let outcome =
                split_compact_leaves(&RandomOneManifold::suspension(gamma, Sign::Plus)).unwrap();
            assert!(outcome.compact.is_empty());
            assert_eq!(outcome.aperiodic.total_transverse_mass(), scalar("1"));
        }

        // Generated witnesses all verify.
        let witness_cases = 50;
        for case in 0..witness_cases {
            let size = rng.gen_range(1..=6);
            let mass = random_mass(&mut rng);
            let atoms: Vec<Atom> = (0..size)
                .map(|i| Atom {
                    id: atom_id(i),
                    mass: mass.clone(),
                })
                .collect();
            let base = MeasureSpace::new(atoms, vec![]).unwrap();
            let perm = |rng: &mut ChaCha8Rng| {
                let mut targets: Vec<usize> = (0..size).collect();
                targets.shuffle(rng);
                let data = AutomorphismData {
                    atom_map: (0..size)
                        .map(|i| (atom_id(i), atom_id(targets[i])))
                        .collect(),
                    segment_map: vec![],
                };
                Automorphism::bind(base.clone(), data).unwrap()
            };
            let phi = perm(&mut rng);
            let psi = perm(&mut rng);
            let witness = pair_of_pants(&phi, &psi).unwrap();
            let report = verify_witness(&witness);
            assert_eq!(report.status, Status::Ok, "pants case {case}: {report:?}");

            let filled = disk_filling(&RandomOneManifold::suspension(phi, Sign::Plus)).unwrap();
            let report = verify_witness(&filled);
            assert_eq!(report.status, Status::Ok, "disk case {case}: {report:?}");
        }

        // The forged fixture set is rejected wholesale.
        let dir = std::path::PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/forged");
        let mut rejected = 0;
        let mut entries: Vec<_> = std::fs::read_dir(&dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for path in &entries {
            let text = std::fs::read_to_string(path).unwrap();
            let witness: CobordismWitness = serde_json::from_str(&text).unwrap();
            let report = verify_witness(&witness);
            assert_ne!(
                report.status,
                Status::Ok,
                "forged fixture accepted: {}",
                path.display()
            );
            rejected += 1;
        }
        assert!(rejected >= 10, "need at least 10 forged fixtures, found {rejected}");

        format!(
            "{permutation_cases} permutations and {rotation_cases} rotations match brute force; \
             {witness_cases} witness pairs accepted; {rejected} forgeries rejected"
        )
    });
}

#[test]
fn characteristic_number_tables_are_exact() {
    criterion("characteristic-number tables", Duration::from_secs(30), || {
        let t1 = pontryagin_matrix(1);
        assert_eq!(t1.matrix, vec![vec![scalar("3")]]);
        assert_eq!(t1.det, scalar("3"));

        let t2 = pontryagin_matrix(2);
        assert_eq!(
            t2.matrix,
            vec![
                vec![scalar("10"), scalar("25")],
                vec![scalar("9"), scalar("18")],
            ]
        );
        assert_eq!(t2.det, scalar("-45"));

        let cp2_cubed = ProjectiveProduct::new(vec![2, 2, 2]).unwrap();
        let beta = Partition::new(vec![1, 1, 1]).unwrap();
        assert_eq!(pontryagin_number(&cp2_cubed, &beta).unwrap(), scalar("162"));

        let mut dets = Vec::new();
        for n in 1..=5 {
            let table = pontryagin_matrix(n);
            assert!(!table.det.is_zero(), "determinant vanished at n = {n}");
            dets.push(table.det.display());
        }
        format!("matrices exact, dets {} all nonzero", dets.join(", "))
    });
}

#[test]
fn random_targets_round_trip_exactly() {
    criterion("surjectivity round-trip", Duration::from_secs(10), || {
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let cases = 100;
        for case in 0..cases {
            let n = if case % 2 == 0 { 2 } else { 3 };
            let order = partitions(n);
            let target: Vec<Scalar> = order
                .iter()
                .map(|_| Scalar::new(rng.gen_range(-60..=60), rng.gen_range(1..=12)).unwrap())
                .collect();
            let ensemble = solve_target(n, &target).unwrap();
            for (beta, want) in order.iter().zip(&target) {
                assert_eq!(&expected_pontryagin(&ensemble, beta).unwrap(), want);
            }
        }
        format!("{cases} random rational targets at n = 2, 3, exact")
    });
}

#[test]
fn curvature_integrals_hit_their_marks() {
    criterion("curvature integrals", Duration::from_secs(120), || {
        let line = named_geometry("cp1-tautological").unwrap();
        let options = CurvatureOptions::at_resolution(200);

        let charge = integrate_invariant(
            line.as_ref(),
            &InvariantPolynomial::ChernCharacter(1),
            &options,
            1e-3,
        )
        .unwrap();
        assert_eq!(charge.nearest_integer, -1);
        assert!(charge.pass, "charge residual {}", charge.residual);

        let independence = connection_independence_check(
            line.as_ref(),
            &InvariantPolynomial::ChernCharacter(1),
            &options,
            0,
            1e-2,
        )
        .unwrap();
        assert!(independence.pass, "difference {}", independence.difference);
        assert!(independence.max_pointwise_shift > 1e-4);

        let whitney = whitney_sum_check(&options, 2e-3).unwrap();
        assert!(
            whitney.pass,
            "additivity {} stability {}",
            whitney.additivity_residual, whitney.stability_residual
        );

        let surface = named_geometry("cp2-tangent").unwrap();
        let p1 = integrate_invariant(
            surface.as_ref(),
            &InvariantPolynomial::TotalPontryagin,
            &CurvatureOptions::at_resolution(64),
            0.15,
        )
        .unwrap();
        assert_eq!(p1.nearest_integer, 3);
        assert!(
            p1.residual <= 0.15,
            "p1 residual {} exceeds 5% of 3",
            p1.residual
        );

        format!(
            "charge {:.6} (res {:.1e}), deformation diff {:.1e}, whitney {:.1e}, p1 {:.4}",
            charge.integral,
            charge.residual,
            independence.difference,
            whitney.additivity_residual,
            p1.integral
        )
    });
}

#[test]
fn boundary_identity_converges_at_second_order() {
    criterion("boundary identity", Duration::from_secs(5), || {
        let vertical = MeasureSpace::new(
            vec![
                Atom {
                    id: "heavy".to_owned(),
                    mass: scalar("2/3"),
                },
                Atom {
                    id: "light".to_owned(),
                    mass: scalar("1/3"),
                },
            ],
            vec![],
        )
        .unwrap();
        let base = |n: usize| PrismBase {
            dim: 1,
            extent: vec![0.0, 1.0],
            n,
            orientation: Sign::Plus,
        };
        let f = |x: f64, _: f64| x.sin();

        let mut residuals = Vec::new();
        for n in [251usize, 501, 1001] {
            let form = PrismForm::sample(base(n), vertical.clone(), 0, &[&f]).unwrap();
            let report = stokes_check(&form, 1e-4).unwrap();
            assert!(report.pass);
            if let Some(order) = report.order_estimate {
                assert!(order >= 2.0 - 0.2, "order {order} below second");
            }
            residuals.push(report.residual);
        }
        for pair in residuals.windows(2) {
            assert!(
                pair[0] / pair[1] >= 3.5,
                "doubling gained only {:.2}x",
                pair[0] / pair[1]
            );
        }

        let form = PrismForm::sample(base(1001), vertical, 0, &[&f]).unwrap();
        let strict = stokes_check(&form, 1e-6).unwrap();
        assert!(strict.pass, "residual {} at 1000 cells", strict.residual);
        assert!(strict.order_estimate.unwrap_or(0.0) >= 2.0 - 0.2);

        format!(
            "residual {:.2e} at 1000 cells, order {:.2}, doubling ratios {:.2} / {:.2}",
            strict.residual,
            strict.order_estimate.unwrap_or(f64::NAN),
            residuals[0] / residuals[1],
            residuals[1] / residuals[2]
        )
    });
}

#[test]
fn partition_counts_satisfy_pentagonal_recurrence() {
    criterion("partition counts", Duration::from_secs(1), || {
        // Euler: p(n) = sum_k (-1)^(k+1) [p(n - k(3k-1)/2) + p(n - k(3k+1)/2)].
        let top = 50usize;
        let mut counts = vec![0i64; top + 1];
        counts[0] = 1;
        for n in 1..=top {
            let mut total = 0i64;
            let mut k = 1i64;
            loop {
                let g1 = (k * (3 * k - 1) / 2) as usize;
                let g2 = (k * (3 * k + 1) / 2) as usize;
                if g1 > n {
                    break;
                }
                let sign = if k % 2 == 1 { 1 } else { -1 };
                total += sign * counts[n - g1];
                if g2 <= n {
                    total += sign * counts[n - g2];
                }
                k += 1;
            }
            counts[n] = total;
        }
        assert_eq!(counts[6], 11);
        assert_eq!(counts[50], 204226);

        for n in 0..=top {
            let generated = partitions(n as u32);
            assert_eq!(
                generated.len() as i64,
                counts[n],
                "partition count mismatch at n = {n}"
            );
            // Spot-check canonical form: descending parts, correct weight.
            if let Some(first) = generated.first() {
                assert_eq!(first.weight(), n as u32);
            }
        }
        format!("counts match the pentagonal recurrence for n <= {top} (p(50) = {})", counts[50])
    });
}
