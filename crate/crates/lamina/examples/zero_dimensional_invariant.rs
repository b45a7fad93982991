//! The signed transverse mass classifies 0-dimensional measured ensembles
//! up to bounding: two ensembles bound a common 1-dimensional family
//! exactly when their invariants agree.

use lamina::cobordism::{boundary_of_prism, cobordant0, phi0, RandomZeroManifold};
use lamina::measure::{Atom, MeasureSpace, Segment};
use lamina::scalar::Scalar;

fn scalar(text: &str) -> Scalar {
    text.parse().expect("exact rational literal")
}

fn main() {
    // A family of positively-oriented points of mass 2 against a family
    // of mass 1/2.
    let plus = MeasureSpace::single_atom("up", scalar("2"));
    let minus = MeasureSpace::single_atom("down", scalar("1/2"));
    let x = RandomZeroManifold::new(plus, minus).unwrap();
    println!("phi0(x) = {}", phi0(&x).display());
    assert_eq!(phi0(&x), scalar("3/2"));

    // Reversing orientation negates the invariant.
    let reversed = x.reverse();
    assert_eq!(phi0(&reversed), -phi0(&x));

    // The boundary of a prism [0,1] x K carries K with both orientations,
    // so it is always invisible to the invariant.
    let vertical = MeasureSpace::new(
        vec![
            Atom {
                id: "a".to_owned(),
                mass: scalar("1/3"),
            },
            Atom {
                id: "b".to_owned(),
                mass: scalar("4"),
            },
        ],
        vec![Segment {
            id: "s".to_owned(),
            length: scalar("5/7"),
        }],
    )
    .unwrap();
    let boundary = boundary_of_prism(&vertical);
    println!("phi0(boundary of prism) = {}", phi0(&boundary).display());
    assert!(phi0(&boundary).is_zero());

    // Cobordance is decided by the invariant alone: these two look very
    // different pointwise but carry the same signed mass.
    let y = RandomZeroManifold::new(
        MeasureSpace::new(
            vec![
                Atom {
                    id: "p".to_owned(),
                    mass: scalar("1"),
                },
                Atom {
                    id: "q".to_owned(),
                    mass: scalar("1"),
                },
            ],
            vec![],
        )
        .unwrap(),
        MeasureSpace::single_atom("r", scalar("1/2")),
    )
    .unwrap();
    assert_eq!(phi0(&y), scalar("3/2"));
    assert!(cobordant0(&x, &y));
    println!("x and y are cobordant: both have invariant 3/2");
}
