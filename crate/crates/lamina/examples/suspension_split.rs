//! Suspensions of measure automorphisms and their compact-leaf reduction.
//!
//! A suspension glues `[0,1] x K` by `(1, t) ~ (0, gamma(t))`. Finite
//! orbits close up into circle families; orbits with irrational net
//! rotation stay as lines and survive the split untouched.

use lamina::cobordism::{
    atlas_cost, split_compact_leaves, suspension_atlas, suspension_normal_form, RandomOneManifold,
    Sign,
};
use lamina::measure::{Angle, Automorphism, AutomorphismData, MeasureSpace, SegmentArrow};
use lamina::scalar::Scalar;

fn scalar(text: &str) -> Scalar {
    text.parse().expect("exact rational literal")
}

fn main() {
    // Three atoms cycled a -> b -> c -> a: one circle of three crossings.
    let atoms = MeasureSpace::new(
        ["a", "b", "c"]
            .iter()
            .map(|id| lamina::measure::Atom {
                id: (*id).to_owned(),
                mass: scalar("1/3"),
            })
            .collect(),
        vec![],
    )
    .unwrap();
    let cycle = Automorphism::bind(
        atoms,
        AutomorphismData {
            atom_map: vec![
                ("a".to_owned(), "b".to_owned()),
                ("b".to_owned(), "c".to_owned()),
                ("c".to_owned(), "a".to_owned()),
            ],
            segment_map: vec![],
        },
    )
    .unwrap();
    let circles = RandomOneManifold::suspension(cycle, Sign::Plus);
    let outcome = split_compact_leaves(&circles).unwrap();
    println!(
        "3-cycle: compact mass {}, aperiodic mass {}",
        outcome.compact.total_transverse_mass().display(),
        outcome.aperiodic.total_transverse_mass().display()
    );
    for (domain, period) in &outcome.periods {
        println!("  domain {domain}: period {period}");
    }
    assert!(outcome.aperiodic.is_empty());
    assert_eq!(outcome.periods.values().next().unwrap().to_string(), "3");

    // A rational rotation of the unit circle: every orbit closes after q
    // steps, and the fundamental domain shrinks to length 1/q.
    let rotation = |angle: Angle| {
        Automorphism::bind(
            MeasureSpace::single_segment("s", scalar("1")),
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
    };
    let rational = RandomOneManifold::suspension(rotation(Angle::rational(2, 5)), Sign::Plus);
    let outcome = split_compact_leaves(&rational).unwrap();
    let domain = &outcome.compact.terms()[0];
    println!(
        "rotation by 2/5: fundamental domain length {}, period {}",
        domain.gamma.base().total_mass().display(),
        outcome.periods.values().next().unwrap()
    );
    assert_eq!(domain.gamma.base().total_mass(), scalar("1/5"));

    // The golden rotation never closes: nothing compact to extract.
    let golden = RandomOneManifold::suspension(rotation(Angle::tau(1, 1)), Sign::Plus);
    let outcome = split_compact_leaves(&golden).unwrap();
    println!(
        "golden rotation: compact part empty = {}",
        outcome.compact.is_empty()
    );
    assert!(outcome.compact.is_empty());
    assert_eq!(
        outcome.aperiodic.total_transverse_mass(),
        scalar("1")
    );

    // Normal form folds a reversed suspension into a forward one over the
    // inverse holonomy; mixing terms is fine.
    let mixed = rational.neg().add(&golden);
    let presentation = suspension_normal_form(&mixed);
    println!(
        "normal form of a mixed sum: one presentation over mass {}",
        presentation.gamma.base().total_mass().display()
    );
    assert_eq!(presentation.orientation, Sign::Plus);

    // Covering the glued circle direction takes two overlapping interval
    // charts, so the atlas costs twice the transverse mass of the base.
    let atlas = suspension_atlas(&presentation);
    println!(
        "atlas: {} charts, cost {}",
        atlas.charts.len(),
        atlas_cost(&atlas).display()
    );
    let two = scalar("2");
    assert_eq!(atlas_cost(&atlas), two * mixed.total_transverse_mass());
}
