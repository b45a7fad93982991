//! Exact Pontryagin numbers of products of even complex projective spaces.
//!
//! For each partition `alpha` of `n` the model manifold is the product
//! `M_alpha = prod CP^{2k}` over the parts `k`. Evaluating every monomial
//! `p_beta` on every `M_alpha` gives a square matrix over the rationals;
//! its determinant is nonzero, so the models are linearly independent and
//! every rational target vector is reachable.

use lamina::charclass::{
    partitions, pontryagin_matrix, pontryagin_number, Partition, ProjectiveProduct,
};
use lamina::scalar::Scalar;

fn scalar(text: &str) -> Scalar {
    text.parse().expect("literal scalar")
}

fn print_table(n: u32) {
    let table = pontryagin_matrix(n);
    let labels: Vec<String> = table.order.iter().map(|p| p.to_string()).collect();
    println!("n = {n}, partitions in reverse-lexicographic order: {labels:?}");
    for (alpha, row) in table.order.iter().zip(&table.matrix) {
        let cells: Vec<String> = row.iter().map(|s| s.display()).collect();
        let m = ProjectiveProduct::from_partition(alpha);
        println!("  {m}: {}", cells.join("  "));
    }
    println!("  det = {}", table.det.display());
}

fn main() {
    // Partitions themselves: generated in reverse-lexicographic order.
    let parts = partitions(4);
    let rendered: Vec<String> = parts.iter().map(|p| p.to_string()).collect();
    println!("partitions of 4: {}", rendered.join(", "));
    assert_eq!(rendered, ["4", "3+1", "2+2", "2+1+1", "1+1+1+1"]);

    // Hand-checkable anchor values.
    let cp2 = ProjectiveProduct::new(vec![2]).unwrap();
    let p1 = pontryagin_number(&cp2, &Partition::new(vec![1]).unwrap()).unwrap();
    println!("\np_1[CP2] = {}", p1.display());
    assert_eq!(p1, scalar("3"));

    let cp2_cubed = ProjectiveProduct::new(vec![2, 2, 2]).unwrap();
    let p111 = pontryagin_number(&cp2_cubed, &Partition::new(vec![1, 1, 1]).unwrap()).unwrap();
    println!("p_1^3[CP2 x CP2 x CP2] = {}", p111.display());
    assert_eq!(p111, scalar("162"));

    println!();
    for n in 1..=3 {
        print_table(n);
        println!();
    }

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

    let t3 = pontryagin_matrix(3);
    assert_eq!(t3.det, scalar("-2835"));

    // Nonsingularity persists as far as the acceptance budget cares to look.
    for n in 1..=5 {
        let table = pontryagin_matrix(n);
        assert!(!table.det.is_zero(), "det vanished at n = {n}");
        println!(
            "n = {n}: {} x {} matrix, det = {}",
            table.order.len(),
            table.order.len(),
            table.det.display()
        );
    }
}
