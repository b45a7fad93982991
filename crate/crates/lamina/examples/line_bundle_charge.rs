//! Curvature integrals from projector-valued chart data.
//!
//! The connection is the projected flat one: curvature comes from finite
//! differences of the projector family alone, so the integral can be run
//! without ever writing down connection coefficients. Three checks:
//!
//!   1. the tautological line family over the sphere has total first
//!      Chern charge -1;
//!   2. adding a compactly supported deformation to the connection moves
//!      the integrand pointwise but not the integral;
//!   3. the charge of a direct sum is the sum of the charges.

use lamina::chernweil::{
    connection_independence_check, integrate_invariant, named_geometry, whitney_sum_check,
    CurvatureOptions, InvariantPolynomial,
};

fn main() {
    let geometry = named_geometry("cp1-tautological").expect("registered geometry");
    let options = CurvatureOptions::at_resolution(120);

    let report = integrate_invariant(
        geometry.as_ref(),
        &InvariantPolynomial::ChernCharacter(1),
        &options,
        1e-3,
    )
    .expect("charts satisfy the projector axioms");
    println!(
        "{} of {}: integral = {:.9}, nearest integer = {}, residual = {:.2e}",
        report.invariant, report.geometry, report.integral, report.nearest_integer, report.residual
    );
    println!(
        "  worst projector defect = {:.2e}, worst skew defect = {:.2e}",
        report.max_projector_defect, report.max_skew_defect
    );
    assert_eq!(report.nearest_integer, -1);
    assert!(report.pass, "charge must land within 1e-3 of -1");

    // Deform the connection by a random compactly supported one-form and
    // integrate again. The pointwise densities move; the total does not.
    let independence = connection_independence_check(
        geometry.as_ref(),
        &InvariantPolynomial::ChernCharacter(1),
        &options,
        7,
        1e-2,
    )
    .expect("deformation check runs on the same charts");
    println!(
        "\ndeformed connection: base = {:.9}, perturbed = {:.9}",
        independence.base_integral, independence.perturbed_integral
    );
    println!(
        "  integral difference = {:.2e}, max pointwise density shift = {:.3}",
        independence.difference, independence.max_pointwise_shift
    );
    assert!(independence.pass);
    assert!(
        independence.max_pointwise_shift > 1e-4,
        "the deformation should visibly move the integrand"
    );

    // Whitney additivity: charge(taut + taut) = -2, charge(taut + trivial) = -1.
    let whitney = whitney_sum_check(&options, 2e-3).expect("sum geometries are registered");
    println!(
        "\nwhitney sums: single = {:.9}, doubled = {:.9}, padded = {:.9}",
        whitney.line, whitney.doubled, whitney.padded
    );
    println!(
        "  additivity residual = {:.2e}, stability residual = {:.2e}",
        whitney.additivity_residual, whitney.stability_residual
    );
    assert!(whitney.pass);

    println!("\nall three charge checks passed");
}
