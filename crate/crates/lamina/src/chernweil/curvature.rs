//! Curvature of the projection connection and numerical integration of
//! invariant polynomials over charted geometries.
//!
//! The connection on a subbundle `im P` of a trivial bundle is `P d`; its
//! curvature has components `R_ab = P (dP_a dP_b - dP_b dP_a) P`. All
//! derivatives here are centered differences of the analytic projection
//! field, and forms are normalized by `i / 2 pi` so that integrals of the
//! invariant densities land on integers for the built-in geometries.
//!
//! Integration is a midpoint rule over each chart's coordinate cube,
//! weighted by the partition of unity, with compensated summation in a
//! fixed chart-major, row-major order (bit-stable across runs).

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use super::forms::{coordinate_pairs, scalar_wedge_top, InvariantPolynomial, MatrixTwoForm};
use super::geometry::{bump, named_geometry, Geometry};
use super::matrix::CMatrix;

pub const DEFAULT_STEP: f64 = 1e-4;
pub const PROJECTOR_TOLERANCE: f64 = 1e-10;
pub const SKEW_TOLERANCE: f64 = 1e-8;

#[derive(Clone, Copy, Debug)]
pub struct CurvatureOptions {
    /// Grid cells per coordinate axis.
    pub resolution: usize,
    /// Finite-difference step for the analytic fields.
    pub step: f64,
    pub projector_tolerance: f64,
    pub skew_tolerance: f64,
}

impl CurvatureOptions {
    pub fn at_resolution(resolution: usize) -> CurvatureOptions {
        CurvatureOptions {
            resolution,
            ..CurvatureOptions::default()
        }
    }
}

impl Default for CurvatureOptions {
    fn default() -> Self {
        CurvatureOptions {
            resolution: 100,
            step: DEFAULT_STEP,
            projector_tolerance: PROJECTOR_TOLERANCE,
            skew_tolerance: SKEW_TOLERANCE,
        }
    }
}

#[derive(Debug, Error)]
pub enum ChernWeilError {
    #[error("resolution must be at least 2")]
    Resolution,
    #[error(
        "projection defect {value:.3e} exceeds {limit:.3e}; the chart fields must be pointwise hermitian projections"
    )]
    ProjectionDefect { value: f64, limit: f64 },
    #[error("curvature skew-hermitian defect {value:.3e} exceeds {limit:.3e}")]
    SkewDefect { value: f64, limit: f64 },
}

/// Worst pointwise consistency defects seen during a sampling pass.
#[derive(Clone, Copy, Debug, Default, Serialize)]
pub struct Defects {
    pub projector: f64,
    pub skew: f64,
}

impl Defects {
    fn check(&self, options: &CurvatureOptions) -> Result<(), ChernWeilError> {
        if self.projector > options.projector_tolerance {
            return Err(ChernWeilError::ProjectionDefect {
                value: self.projector,
                limit: options.projector_tolerance,
            });
        }
        if self.skew > options.skew_tolerance {
            return Err(ChernWeilError::SkewDefect {
                value: self.skew,
                limit: options.skew_tolerance,
            });
        }
        Ok(())
    }
}

struct Kahan {
    sum: f64,
    compensation: f64,
}

impl Kahan {
    fn new() -> Kahan {
        Kahan {
            sum: 0.0,
            compensation: 0.0,
        }
    }

    fn add(&mut self, value: f64) {
        let y = value - self.compensation;
        let t = self.sum + y;
        self.compensation = (t - self.sum) - y;
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum
    }
}

/// Normalized curvature `(i / 2 pi) P (dP ^ dP) P` at a chart point.
pub fn curvature_form(
    geometry: &dyn Geometry,
    chart: usize,
    x: &[f64],
    step: f64,
    defects: &mut Defects,
) -> MatrixTwoForm {
    let dim = geometry.dim();
    let p = geometry.projection(chart, x);
    defects.projector = defects
        .projector
        .max(p.projector_defect())
        .max(p.hermitian_defect());

    let mut point = x.to_vec();
    let mut dp = Vec::with_capacity(dim);
    for axis in 0..dim {
        point[axis] = x[axis] + step;
        let plus = geometry.projection(chart, &point);
        point[axis] = x[axis] - step;
        let minus = geometry.projection(chart, &point);
        point[axis] = x[axis];
        dp.push(plus.sub(&minus).scale(Complex64::new(0.5 / step, 0.0)));
    }

    let normalize = Complex64::new(0.0, 0.5 / PI);
    let mut form = MatrixTwoForm::zeros(dim, geometry.matrix_size());
    for (pair, &(a, b)) in coordinate_pairs(dim).iter().enumerate() {
        let commutator = dp[a].mul(&dp[b]).sub(&dp[b].mul(&dp[a]));
        let r = p.mul(&commutator).mul(&p);
        defects.skew = defects.skew.max(r.add(&r.adjoint()).frobenius_norm());
        *form.component_mut(pair) = r.scale(normalize);
    }
    form
}

/// Scratch buffers for the block-scalar path, sized once per run.
struct RankOneScratch {
    point: Vec<f64>,
    center: Vec<Complex64>,
    plus: Vec<Complex64>,
    minus: Vec<Complex64>,
    derivatives: Vec<Vec<Complex64>>,
    phis: Vec<f64>,
}

impl RankOneScratch {
    fn new(dim: usize, block_size: usize) -> RankOneScratch {
        RankOneScratch {
            point: vec![0.0; dim],
            center: vec![Complex64::ZERO; block_size],
            plus: vec![Complex64::ZERO; block_size],
            minus: vec![Complex64::ZERO; block_size],
            derivatives: vec![vec![Complex64::ZERO; block_size]; dim],
            phis: vec![0.0; coordinate_pairs(dim).len()],
        }
    }
}

/// On a block of rank one spanned by a unit section `w`, the normalized
/// curvature is the real scalar `phi_ab = -Im<w_a, w_b> / pi` times the
/// block projection; the section's phase drops out of `phi`.
fn rank_one_phis(
    geometry: &dyn Geometry,
    chart: usize,
    x: &[f64],
    step: f64,
    scratch: &mut RankOneScratch,
    defects: &mut Defects,
) {
    let dim = geometry.dim();
    scratch.point.copy_from_slice(x);
    geometry.unit_section(chart, x, &mut scratch.center);
    let norm: f64 = scratch.center.iter().map(|c| c.norm_sqr()).sum();
    defects.projector = defects.projector.max((norm - 1.0).abs());

    for axis in 0..dim {
        scratch.point[axis] = x[axis] + step;
        geometry.unit_section(chart, &scratch.point, &mut scratch.plus);
        scratch.point[axis] = x[axis] - step;
        geometry.unit_section(chart, &scratch.point, &mut scratch.minus);
        scratch.point[axis] = x[axis];
        let scale = 0.5 / step;
        for ((d, p), m) in scratch.derivatives[axis]
            .iter_mut()
            .zip(&scratch.plus)
            .zip(&scratch.minus)
        {
            *d = (p - m) * scale;
        }
    }

    for (pair, &(a, b)) in coordinate_pairs(dim).iter().enumerate() {
        let inner: f64 = scratch.derivatives[a]
            .iter()
            .zip(&scratch.derivatives[b])
            .map(|(u, v)| (u.conj() * v).im)
            .sum();
        scratch.phis[pair] = -inner / PI;
    }
}

fn rank_one_top(
    invariant: &InvariantPolynomial,
    phis: &[f64],
    multiplicity: f64,
    dim: usize,
) -> f64 {
    match invariant {
        InvariantPolynomial::ChernCharacter(1) if dim == 2 => multiplicity * phis[0],
        InvariantPolynomial::ChernCharacter(2) if dim == 4 => {
            multiplicity * scalar_wedge_top(phis, phis) * 0.5
        }
        InvariantPolynomial::TotalPontryagin if dim == 4 => {
            multiplicity * scalar_wedge_top(phis, phis)
        }
        _ => 0.0,
    }
}

/// Visits the midpoints of an `n^dim` grid on `[-extent, extent]^dim`,
/// last axis fastest.
fn for_each_midpoint(dim: usize, extent: f64, n: usize, mut body: impl FnMut(&[f64])) {
    let h = 2.0 * extent / n as f64;
    let mut index = vec![0usize; dim];
    let mut x = vec![0.0f64; dim];
    loop {
        for k in 0..dim {
            x[k] = -extent + (index[k] as f64 + 0.5) * h;
        }
        body(&x);
        let mut k = dim;
        loop {
            if k == 0 {
                return;
            }
            k -= 1;
            index[k] += 1;
            if index[k] < n {
                break;
            }
            index[k] = 0;
        }
    }
}

/// Weighted midpoint-rule integral of a per-chart density.
fn integrate_density(
    geometry: &dyn Geometry,
    resolution: usize,
    mut density: impl FnMut(usize, &[f64]) -> f64,
) -> f64 {
    let dim = geometry.dim();
    let extent = geometry.extent();
    let h = 2.0 * extent / resolution as f64;
    let volume = h.powi(dim as i32);
    let mut total = Kahan::new();
    for chart in 0..geometry.chart_count() {
        for_each_midpoint(dim, extent, resolution, |x| {
            let weight = geometry.weight(chart, x);
            if weight != 0.0 {
                total.add(weight * density(chart, x) * volume);
            }
        });
    }
    total.value()
}

#[derive(Clone, Debug, Serialize)]
pub struct IntegralReport {
    pub geometry: String,
    pub invariant: String,
    pub resolution: usize,
    pub integral: f64,
    pub nearest_integer: i64,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub max_projector_defect: f64,
    pub max_skew_defect: f64,
}

/// Integrates the invariant's top-degree density over the whole geometry.
pub fn integrate_invariant(
    geometry: &dyn Geometry,
    invariant: &InvariantPolynomial,
    options: &CurvatureOptions,
    tolerance: f64,
) -> Result<IntegralReport, ChernWeilError> {
    if options.resolution < 2 {
        return Err(ChernWeilError::Resolution);
    }
    let dim = geometry.dim();
    let rank = geometry.rank();
    let mut defects = Defects::default();

    let fast = match (geometry.rank_one(), invariant) {
        (
            Some(blocks),
            InvariantPolynomial::ChernCharacter(_) | InvariantPolynomial::TotalPontryagin,
        ) => Some(blocks),
        _ => None,
    };

    let integral = match fast {
        Some(blocks) => {
            let mut scratch = RankOneScratch::new(dim, blocks.block_size);
            let multiplicity = blocks.multiplicity as f64;
            integrate_density(geometry, options.resolution, |chart, x| {
                rank_one_phis(geometry, chart, x, options.step, &mut scratch, &mut defects);
                rank_one_top(invariant, &scratch.phis, multiplicity, dim)
            })
        }
        None => integrate_density(geometry, options.resolution, |chart, x| {
            let f = curvature_form(geometry, chart, x, options.step, &mut defects);
            invariant.evaluate_curvature(&f, rank).top(dim)
        }),
    };
    defects.check(options)?;

    let nearest_integer = integral.round() as i64;
    let residual = (integral - nearest_integer as f64).abs();
    Ok(IntegralReport {
        geometry: geometry.name(),
        invariant: invariant.to_string(),
        resolution: options.resolution,
        integral,
        nearest_integer,
        residual,
        tolerance,
        pass: residual <= tolerance,
        max_projector_defect: defects.projector,
        max_skew_defect: defects.skew,
    })
}

/// Compactly supported deformation of the connection: `A_a = sigma P M_a P`
/// with constant random skew-hermitian `M_a` and a radial profile `sigma`
/// vanishing before the chart's weight drops below 1, so the other charts
/// never see it.
pub struct Perturbation {
    chart: usize,
    matrices: Vec<CMatrix>,
    plateau: f64,
    support: f64,
}

impl Perturbation {
    pub fn random(seed: u64, geometry: &dyn Geometry) -> Perturbation {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let size = geometry.matrix_size();
        let matrices = (0..geometry.dim())
            .map(|_| {
                let mut raw = CMatrix::zeros(size);
                for i in 0..size {
                    for j in 0..size {
                        raw.set(
                            i,
                            j,
                            Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)),
                        );
                    }
                }
                raw.sub(&raw.adjoint()).scale(Complex64::new(0.5, 0.0))
            })
            .collect();
        Perturbation {
            chart: 0,
            matrices,
            plateau: 0.2,
            support: 0.45,
        }
    }

    fn profile(&self, x: &[f64]) -> f64 {
        let radius = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        bump(radius, self.plateau, self.support)
    }

    fn reaches(&self, chart: usize, x: &[f64], step: f64) -> bool {
        if chart != self.chart {
            return false;
        }
        let radius_sqr: f64 = x.iter().map(|v| v * v).sum();
        radius_sqr.sqrt() <= self.support + 4.0 * step
    }

    fn one_form(&self, geometry: &dyn Geometry, x: &[f64], axis: usize) -> CMatrix {
        let sigma = self.profile(x);
        if sigma == 0.0 {
            return CMatrix::zeros(geometry.matrix_size());
        }
        let p = geometry.projection(self.chart, x);
        p.mul(&self.matrices[axis])
            .mul(&p)
            .scale(Complex64::new(sigma, 0.0))
    }
}

/// Curvature of the deformed connection: `F' = F + P dA P + A ^ A`.
fn perturbed_curvature(
    geometry: &dyn Geometry,
    chart: usize,
    x: &[f64],
    options: &CurvatureOptions,
    perturbation: &Perturbation,
    defects: &mut Defects,
) -> MatrixTwoForm {
    let mut form = curvature_form(geometry, chart, x, options.step, defects);
    if !perturbation.reaches(chart, x, options.step) {
        return form;
    }
    let dim = geometry.dim();
    let step = options.step;
    let p = geometry.projection(chart, x);
    let a: Vec<CMatrix> = (0..dim)
        .map(|axis| perturbation.one_form(geometry, x, axis))
        .collect();

    let mut point = x.to_vec();
    let derivative = |of_axis: usize, along_axis: usize, point: &mut Vec<f64>| {
        point[along_axis] = x[along_axis] + step;
        let plus = perturbation.one_form(geometry, point, of_axis);
        point[along_axis] = x[along_axis] - step;
        let minus = perturbation.one_form(geometry, point, of_axis);
        point[along_axis] = x[along_axis];
        plus.sub(&minus).scale(Complex64::new(0.5 / step, 0.0))
    };

    let normalize = Complex64::new(0.0, 0.5 / PI);
    for (pair, &(u, v)) in coordinate_pairs(dim).iter().enumerate() {
        let exterior = derivative(v, u, &mut point).sub(&derivative(u, v, &mut point));
        let correction = p
            .mul(&exterior)
            .mul(&p)
            .add(&a[u].mul(&a[v]).sub(&a[v].mul(&a[u])));
        let updated = form.component(pair).add(&correction.scale(normalize));
        *form.component_mut(pair) = updated;
    }
    form
}

#[derive(Clone, Debug, Serialize)]
pub struct IndependenceReport {
    pub geometry: String,
    pub invariant: String,
    pub resolution: usize,
    pub seed: u64,
    pub base_integral: f64,
    pub perturbed_integral: f64,
    pub difference: f64,
    /// Largest pointwise density change, witnessing that the deformation
    /// actually touched the integrand.
    pub max_pointwise_shift: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Integrates the invariant under the projection connection and under a
/// random compactly supported deformation of it; the two must agree.
pub fn connection_independence_check(
    geometry: &dyn Geometry,
    invariant: &InvariantPolynomial,
    options: &CurvatureOptions,
    seed: u64,
    tolerance: f64,
) -> Result<IndependenceReport, ChernWeilError> {
    if options.resolution < 2 {
        return Err(ChernWeilError::Resolution);
    }
    let dim = geometry.dim();
    let rank = geometry.rank();
    let perturbation = Perturbation::random(seed, geometry);

    let mut base_defects = Defects::default();
    let base_integral = integrate_density(geometry, options.resolution, |chart, x| {
        let f = curvature_form(geometry, chart, x, options.step, &mut base_defects);
        invariant.evaluate_curvature(&f, rank).top(dim)
    });
    base_defects.check(options)?;

    let mut defects = Defects::default();
    let mut max_shift = 0.0f64;
    let perturbed_integral = integrate_density(geometry, options.resolution, |chart, x| {
        let f = perturbed_curvature(geometry, chart, x, options, &perturbation, &mut defects);
        let value = invariant.evaluate_curvature(&f, rank).top(dim);
        if perturbation.reaches(chart, x, options.step) {
            let plain = curvature_form(geometry, chart, x, options.step, &mut defects);
            let reference = invariant.evaluate_curvature(&plain, rank).top(dim);
            max_shift = max_shift.max((value - reference).abs());
        }
        value
    });
    defects.check(options)?;

    let difference = (perturbed_integral - base_integral).abs();
    Ok(IndependenceReport {
        geometry: geometry.name(),
        invariant: invariant.to_string(),
        resolution: options.resolution,
        seed,
        base_integral,
        perturbed_integral,
        difference,
        max_pointwise_shift: max_shift,
        tolerance,
        pass: difference <= tolerance,
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct WhitneyReport {
    pub resolution: usize,
    /// `int ch_1` of the tautological line.
    pub line: f64,
    /// `int ch_1` of the line summed with itself.
    pub doubled: f64,
    /// `int ch_1` of the line summed with a trivial line.
    pub padded: f64,
    pub additivity_residual: f64,
    pub stability_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// First Chern integrals across direct sums: doubling doubles the charge,
/// a trivial summand leaves it alone.
pub fn whitney_sum_check(
    options: &CurvatureOptions,
    tolerance: f64,
) -> Result<WhitneyReport, ChernWeilError> {
    let ch1 = InvariantPolynomial::ChernCharacter(1);
    let line_geometry = named_geometry("cp1-tautological").expect("built-in");
    let doubled_geometry = named_geometry("cp1-tautological+tautological").expect("built-in");
    let padded_geometry = named_geometry("cp1-tautological+trivial").expect("built-in");

    let line = integrate_invariant(line_geometry.as_ref(), &ch1, options, tolerance)?.integral;
    let doubled =
        integrate_invariant(doubled_geometry.as_ref(), &ch1, options, tolerance)?.integral;
    let padded = integrate_invariant(padded_geometry.as_ref(), &ch1, options, tolerance)?.integral;

    let additivity_residual = (doubled - 2.0 * line).abs();
    let stability_residual = (padded - line).abs();
    Ok(WhitneyReport {
        resolution: options.resolution,
        line,
        doubled,
        padded,
        additivity_residual,
        stability_residual,
        tolerance,
        pass: additivity_residual <= tolerance && stability_residual <= tolerance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chernweil::geometry::{Cp1Tautological, Cp2StableTangent, ExprGeometry, FlatRank};

    #[test]
    fn flat_geometry_has_zero_charge() {
        let report = integrate_invariant(
            &FlatRank { rank: 3 },
            &InvariantPolynomial::ChernCharacter(1),
            &CurvatureOptions::at_resolution(10),
            1e-12,
        )
        .unwrap();
        assert!(report.pass, "integral {}", report.integral);
        assert_eq!(report.nearest_integer, 0);
    }

    #[test]
    fn tautological_curvature_density_at_origin() {
        // At z = 0 the section (1, z)/sqrt(1+|z|^2) has derivatives (0,1)
        // and (0,i); the normalized trace density is -1/pi exactly.
        let mut defects = Defects::default();
        let f = curvature_form(&Cp1Tautological, 0, &[0.0, 0.0], DEFAULT_STEP, &mut defects);
        let density = f.component(0).trace().re;
        assert!(
            (density + 1.0 / PI).abs() < 1e-7,
            "density {density} vs {}",
            -1.0 / PI
        );
        assert!(defects.projector < 1e-12);
        assert!(defects.skew < 1e-12);
    }

    #[test]
    fn tautological_line_has_charge_minus_one() {
        let report = integrate_invariant(
            &Cp1Tautological,
            &InvariantPolynomial::ChernCharacter(1),
            &CurvatureOptions::at_resolution(80),
            1e-2,
        )
        .unwrap();
        assert_eq!(report.nearest_integer, -1);
        assert!(report.pass, "residual {}", report.residual);
        assert!(report.residual < 8e-3, "residual {}", report.residual);
    }

    /// Same field as the stable tangent geometry but with the block
    /// structure hidden, forcing the dense path.
    struct DenseTangent;

    impl Geometry for DenseTangent {
        fn name(&self) -> String {
            "cp2-tangent-dense".to_owned()
        }
        fn dim(&self) -> usize {
            Cp2StableTangent.dim()
        }
        fn chart_count(&self) -> usize {
            Cp2StableTangent.chart_count()
        }
        fn matrix_size(&self) -> usize {
            Cp2StableTangent.matrix_size()
        }
        fn rank(&self) -> usize {
            Cp2StableTangent.rank()
        }
        fn projection(&self, chart: usize, x: &[f64]) -> CMatrix {
            Cp2StableTangent.projection(chart, x)
        }
        fn weight(&self, chart: usize, x: &[f64]) -> f64 {
            Cp2StableTangent.weight(chart, x)
        }
    }

    #[test]
    fn rank_one_path_matches_dense_pointwise() {
        let geometry = Cp2StableTangent;
        let invariant = InvariantPolynomial::TotalPontryagin;
        let mut scratch = RankOneScratch::new(4, 3);
        for x in [
            [0.3, -0.2, 0.5, 0.1],
            [0.9, 0.4, -0.7, 0.2],
            [-1.1, 0.0, 0.3, -0.6],
        ] {
            let mut defects = Defects::default();
            let f = curvature_form(&geometry, 0, &x, DEFAULT_STEP, &mut defects);
            let dense = invariant.evaluate_curvature(&f, 3).top(4);
            rank_one_phis(&geometry, 0, &x, DEFAULT_STEP, &mut scratch, &mut defects);
            let fast = rank_one_top(&invariant, &scratch.phis, 3.0, 4);
            assert!(
                (dense - fast).abs() < 1e-8,
                "dense {dense} vs fast {fast} at {x:?}"
            );
            // Component traces agree too: tr F_ab = 3 phi_ab.
            for (pair, &phi) in scratch.phis.iter().enumerate() {
                let trace = f.component(pair).trace();
                assert!((trace.re - 3.0 * phi).abs() < 1e-8);
                assert!(trace.im.abs() < 1e-8);
            }
        }
    }

    #[test]
    fn rank_one_integral_matches_dense_at_low_resolution() {
        let options = CurvatureOptions::at_resolution(6);
        let invariant = InvariantPolynomial::TotalPontryagin;
        let fast = integrate_invariant(&Cp2StableTangent, &invariant, &options, 10.0).unwrap();
        let dense = integrate_invariant(&DenseTangent, &invariant, &options, 10.0).unwrap();
        // The paths differentiate different analytic quantities (projector
        // vs section), so their truncation errors differ at order step^2.
        assert!(
            (fast.integral - dense.integral).abs() < 1e-6,
            "fast {} vs dense {}",
            fast.integral,
            dense.integral
        );
    }

    #[test]
    fn stable_tangent_first_pontryagin_is_near_three() {
        let report = integrate_invariant(
            &Cp2StableTangent,
            &InvariantPolynomial::TotalPontryagin,
            &CurvatureOptions::at_resolution(20),
            0.5,
        )
        .unwrap();
        assert_eq!(report.nearest_integer, 3, "integral {}", report.integral);
        assert!(report.pass, "residual {}", report.residual);
    }

    #[test]
    fn deformed_connection_changes_density_not_integral() {
        let report = connection_independence_check(
            &Cp1Tautological,
            &InvariantPolynomial::ChernCharacter(1),
            &CurvatureOptions::at_resolution(60),
            3,
            1e-2,
        )
        .unwrap();
        assert!(report.pass, "difference {}", report.difference);
        assert!(
            report.max_pointwise_shift > 1e-4,
            "deformation never reached the integrand: {}",
            report.max_pointwise_shift
        );
        assert!((report.base_integral + 1.0).abs() < 2e-2);
    }

    #[test]
    fn whitney_sums_behave() {
        let report = whitney_sum_check(&CurvatureOptions::at_resolution(60), 1.5e-2).unwrap();
        assert!(report.pass, "{report:?}");
        assert!((report.line + 1.0).abs() < 1e-2);
        assert!((report.doubled + 2.0).abs() < 2e-2);
        assert!((report.padded + 1.0).abs() < 1e-2);
    }

    #[test]
    fn non_projection_field_is_rejected() {
        let text = r#"{
            "dim": 2,
            "resolution": 4,
            "charts": [{"projection": [[{"op": "coord", "axis": 0}]]}]
        }"#;
        let geometry = ExprGeometry::from_json(text).unwrap();
        let err = integrate_invariant(
            &geometry,
            &InvariantPolynomial::ChernCharacter(1),
            &CurvatureOptions::at_resolution(4),
            1e-2,
        )
        .unwrap_err();
        assert!(matches!(err, ChernWeilError::ProjectionDefect { .. }));
    }

    #[test]
    fn reports_serialize() {
        let report = integrate_invariant(
            &FlatRank { rank: 1 },
            &InvariantPolynomial::ChernCharacter(1),
            &CurvatureOptions::at_resolution(4),
            1e-6,
        )
        .unwrap();
        let json = serde_json::to_string(&report).unwrap();
        assert!(json.contains("\"integral\""));
        assert!(json.contains("\"nearest_integer\""));
    }
}
