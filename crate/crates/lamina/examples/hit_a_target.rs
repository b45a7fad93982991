//! Surjectivity in action: prescribe Pontryagin numbers, solve for an
//! ensemble of weighted projective products realizing them exactly, then
//! recompute the expectation two independent ways.

use std::collections::BTreeMap;

use lamina::charclass::{
    expected_pontryagin, partitions, pontryagin_number, solve_target, target_from_map, Partition,
    ProjectiveProduct,
};
use lamina::cobordism::Sign;
use lamina::prism::{ensemble_components, expected_value, ObservableTable};
use lamina::scalar::Scalar;

fn scalar(text: &str) -> Scalar {
    text.parse().expect("literal scalar")
}

fn main() {
    // Target in dimension 8 (n = 2): E[p_2] = 1, E[p_1^2] = 0. The
    // partition order is reverse-lexicographic: [2, 1+1].
    let n = 2;
    let target = vec![scalar("1"), scalar("0")];
    let ensemble = solve_target(n, &target).expect("matrix is nonsingular");

    println!("target: E[p_2] = 1, E[p_1^2] = 0");
    for entry in &ensemble.entries {
        let sign = match entry.orientation {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        println!(
            "  {}{} with weight {}",
            sign,
            entry.manifold,
            entry.weight.display()
        );
    }

    // The known closed form: -(2/5) CP4 + (5/9) CP2xCP2.
    assert_eq!(ensemble.entries.len(), 2);
    assert_eq!(ensemble.entries[0].manifold, ProjectiveProduct::new(vec![4]).unwrap());
    assert_eq!(ensemble.entries[0].weight, scalar("2/5"));
    assert_eq!(ensemble.entries[0].orientation, Sign::Minus);
    assert_eq!(ensemble.entries[1].weight, scalar("5/9"));

    // Round trip through the exact evaluator.
    for (beta, want) in partitions(n).iter().zip(&target) {
        let got = expected_pontryagin(&ensemble, beta).unwrap();
        println!("  E[p_{beta}] = {}", got.display());
        assert_eq!(&got, want);
    }

    // Cross-check through the generic observable pipeline: tabulate
    // p_2 per component by name, then take the weighted signed sum.
    let beta = Partition::new(vec![2]).unwrap();
    let mut table = BTreeMap::new();
    for entry in &ensemble.entries {
        table.insert(
            entry.manifold.to_string(),
            pontryagin_number(&entry.manifold, &beta).unwrap(),
        );
    }
    let observables = ObservableTable::new(table);
    let components = ensemble_components(&ensemble);
    let via_observables = expected_value(&components, &observables).unwrap();
    println!("  E[p_2] via observable table = {}", via_observables.display());
    assert_eq!(via_observables, scalar("1"));

    // Targets can also be supplied sparsely, keyed by partition string.
    let mut sparse = BTreeMap::new();
    sparse.insert("1+1".to_owned(), scalar("7/3"));
    let vector = target_from_map(n, &sparse).unwrap();
    assert_eq!(vector, vec![scalar("0"), scalar("7/3")]);
    let ensemble = solve_target(n, &vector).unwrap();
    let got = expected_pontryagin(&ensemble, &Partition::new(vec![1, 1]).unwrap()).unwrap();
    println!("\nsparse target 1+1 -> 7/3 realized: E[p_1^2] = {}", got.display());
    assert_eq!(got, scalar("7/3"));

    // Every rational vector is reachable; exercise a denser n = 3 case.
    let n = 3;
    let target = vec![scalar("-1/2"), scalar("22/7"), scalar("0")];
    let ensemble = solve_target(n, &target).expect("n = 3 matrix is nonsingular");
    println!("\nn = 3 target (-1/2, 22/7, 0) realized by {} components:", ensemble.entries.len());
    for entry in &ensemble.entries {
        let sign = match entry.orientation {
            Sign::Plus => '+',
            Sign::Minus => '-',
        };
        println!("  {}{} with weight {}", sign, entry.manifold, entry.weight.display());
    }
    for (beta, want) in partitions(n).iter().zip(&target) {
        assert_eq!(&expected_pontryagin(&ensemble, beta).unwrap(), want);
    }
    println!("round trip exact");
}
