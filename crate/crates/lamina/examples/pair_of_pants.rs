//! Builds cobordism witnesses and runs them through the verifier.
//!
//! The pair-of-pants certificate says that for two automorphisms `phi`,
//! `psi` of the same base, the suspensions satisfy
//! `S(phi) + S(psi) - S(phi . psi) = 0` in the one-dimensional group.
//! Verification never trusts the declared boundary: it recomputes it from
//! the payload and compares. A tampered witness is rejected with a report
//! naming the failing component.

use lamina::cobordism::{pair_of_pants, verify_witness, Sign, Status};
use lamina::measure::{Automorphism, AutomorphismData, MeasureSpace, SegmentArrow};
use lamina::measure::{Angle, Atom, Segment};
use lamina::scalar::Scalar;

fn scalar(text: &str) -> Scalar {
    text.parse().expect("literal scalar")
}

fn base_space() -> MeasureSpace {
    MeasureSpace::new(
        vec![
            Atom {
                id: "a".to_owned(),
                mass: scalar("1/4"),
            },
            Atom {
                id: "b".to_owned(),
                mass: scalar("1/4"),
            },
            Atom {
                id: "c".to_owned(),
                mass: scalar("1/4"),
            },
        ],
        vec![Segment {
            id: "s".to_owned(),
            length: scalar("1"),
        }],
    )
    .expect("valid base")
}

fn automorphism(base: &MeasureSpace, atoms: &[(&str, &str)], angle: Angle) -> Automorphism {
    let data = AutomorphismData {
        atom_map: atoms
            .iter()
            .map(|(f, t)| ((*f).to_owned(), (*t).to_owned()))
            .collect(),
        segment_map: vec![SegmentArrow {
            from: "s".to_owned(),
            to: "s".to_owned(),
            angle,
        }],
    };
    Automorphism::bind(base.clone(), data).expect("valid automorphism")
}

fn main() {
    let base = base_space();

    // phi: 3-cycle on the atoms, rotation by 1/3 on the segment.
    // psi: a transposition, rotation by 1/2.
    let phi = automorphism(
        &base,
        &[("a", "b"), ("b", "c"), ("c", "a")],
        Angle::rational(1, 3),
    );
    let psi = automorphism(
        &base,
        &[("a", "b"), ("b", "a"), ("c", "c")],
        Angle::rational(1, 2),
    );

    let witness = pair_of_pants(&phi, &psi).expect("witness construction");
    println!("witness kind: {}", witness.kind);
    println!("boundary terms: {}", witness.boundary.len());

    let report = verify_witness(&witness);
    println!("\nverifier on the honest witness:");
    for check in &report.components {
        println!("  {}: {} ({})", check.name, check.verdict, check.detail);
    }
    assert_eq!(report.status, Status::Ok);

    // The composite boundary term really is S(phi . psi): its holonomy
    // rotates by 1/3 + 1/2 = 5/6.
    let composite = phi.compose(&psi).expect("same base");
    let rotation = composite.data().segment_map[0].angle.clone();
    println!("\ncomposite segment rotation: {:?}", rotation);
    assert_eq!(rotation, Angle::rational(5, 6));

    // Flipping the sign of the composite term is NOT a forgery: the
    // comparison runs up to isomorphism, a reversed suspension folds to the
    // inverse holonomy, and inverse holonomies have the same orbit
    // structure. The verifier accepts the variant.
    let mut variant = witness.clone();
    variant.boundary[2].sign = Sign::Plus;
    let report = verify_witness(&variant);
    println!("\nverifier on a sign-flipped composite (isomorphic, so accepted):");
    for check in &report.components {
        println!("  {}: {} ({})", check.name, check.verdict, check.detail);
    }
    assert_eq!(report.status, Status::Ok);

    // A genuine forgery: swap one declared boundary term for a suspension
    // over a lighter base. The leaf-mass multiset changes.
    let light = MeasureSpace::single_atom("x", scalar("1/3"));
    let mut forged = witness.clone();
    forged.boundary[0].manifold =
        lamina::cobordism::RandomOneManifold::suspension(Automorphism::identity(light), Sign::Plus);
    let report = verify_witness(&forged);
    println!("\nverifier on a swapped boundary term:");
    for check in &report.components {
        println!("  {}: {} ({})", check.name, check.verdict, check.detail);
    }
    assert_eq!(report.status, Status::Fail);

    // Tamper with the payload instead: swap psi's transposition for the
    // identity. The recomputed boundary keeps the same atom leaves but its
    // diffuse transverse mass changes, and the equation fails.
    let identity = Automorphism::identity(base.clone());
    let mut forged = witness.clone();
    forged.payload.as_mut().expect("payload").psi = identity.data();
    let report = verify_witness(&forged);
    println!("\nverifier on a swapped payload:");
    for check in &report.components {
        println!("  {}: {} ({})", check.name, check.verdict, check.detail);
    }
    assert_eq!(report.status, Status::Fail);

    println!("\nforgeries rejected, honest witness and isomorphic variant accepted");
}
