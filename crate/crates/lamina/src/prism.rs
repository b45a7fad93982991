//! Integration over trivial families: prisms `V x K` with an interval or
//! rectangle base `V` and an atomic vertical measure `K`.
//!
//! Differential forms are nodal-sampled per atom on a uniform grid
//! (endpoints included). The fundamental cycle pairs the top-degree
//! component with the product of Lebesgue measure on `V` and the vertical
//! measure; the Stokes check computes `int d(omega)` by finite differences
//! and compares it with the boundary integral under the outward-normal-first
//! orientation convention. Expected values of per-component observables are
//! exact rational sums and agree with the symbolic Pontryagin expectations.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::charclass::EnsembleDescription;
use crate::cobordism::Sign;
use crate::measure::{freshen, Atom, MeasureSpace};
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum PrismError {
    #[error("base dimension must be 1 or 2, got {0}")]
    UnsupportedDim(u32),
    #[error("extent must list {expected} endpoints (lo,hi per axis) with lo < hi, got {found:?}")]
    BadExtent { expected: usize, found: Vec<f64> },
    #[error("grids need at least 3 nodes per axis, got {0}")]
    TooFewNodes(usize),
    #[error("prism verticals are atomic; segment {0:?} must be refined into atoms first")]
    DiffuseVertical(String),
    #[error("atom {0:?} has no sampled form")]
    MissingForm(String),
    #[error("form entry {0:?} does not name a vertical atom")]
    UnknownFormId(String),
    #[error("all per-atom forms must share one degree; {id:?} has {found}, expected {expected}")]
    MixedDegrees { id: String, found: u32, expected: u32 },
    #[error("degree {degree} forms on a dim-{dim} base have {expected} components, {id:?} has {found}")]
    ComponentCount {
        id: String,
        dim: u32,
        degree: u32,
        expected: usize,
        found: usize,
    },
    #[error("component {component} of {id:?} is sampled on the wrong shape")]
    ShapeMismatch { id: String, component: usize },
    #[error("degree {degree} exceeds the base dimension {dim}")]
    DegreeOverflow { degree: u32, dim: u32 },
    #[error("operation needs a degree-{expected} form, this prism holds degree {found}")]
    WrongDegree { expected: u32, found: u32 },
    #[error("no observable value for component {0:?}")]
    MissingObservable(String),
}

/// Uniform nodal grid over an interval or an axis-aligned rectangle.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrismBase {
    pub dim: u32,
    /// `[lo, hi]` per axis, flattened.
    pub extent: Vec<f64>,
    /// Nodes per axis, endpoints included.
    pub n: usize,
    #[serde(default = "default_orientation")]
    pub orientation: Sign,
}

fn default_orientation() -> Sign {
    Sign::Plus
}

impl PrismBase {
    fn validate(&self) -> Result<(), PrismError> {
        if !(self.dim == 1 || self.dim == 2) {
            return Err(PrismError::UnsupportedDim(self.dim));
        }
        let expected = 2 * self.dim as usize;
        let ordered = self
            .extent
            .chunks(2)
            .all(|pair| pair.len() == 2 && pair[0] < pair[1] && pair[0].is_finite() && pair[1].is_finite());
        if self.extent.len() != expected || !ordered {
            return Err(PrismError::BadExtent {
                expected,
                found: self.extent.clone(),
            });
        }
        if self.n < 3 {
            return Err(PrismError::TooFewNodes(self.n));
        }
        Ok(())
    }

    fn step(&self, axis: usize) -> f64 {
        (self.extent[2 * axis + 1] - self.extent[2 * axis]) / (self.n - 1) as f64
    }
}

/// Nodal samples of one form component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSamples {
    Line(Vec<f64>),
    Rect(Vec<Vec<f64>>),
}

impl GridSamples {
    fn matches(&self, base: &PrismBase) -> bool {
        match (self, base.dim) {
            (GridSamples::Line(v), 1) => v.len() == base.n,
            (GridSamples::Rect(rows), 2) => {
                rows.len() == base.n && rows.iter().all(|r| r.len() == base.n)
            }
            _ => false,
        }
    }
}

/// One atom's sampled differential form: `components` are coefficients on
/// the coordinate coframe in fixed order (`dx`, `dy`; `dx^dy` for the top
/// degree on rectangles).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DifferentialForm {
    pub degree: u32,
    pub components: Vec<GridSamples>,
}

fn component_count(dim: u32, degree: u32) -> Option<usize> {
    match (dim, degree) {
        (1, 0) | (1, 1) | (2, 0) | (2, 2) => Some(1),
        (2, 1) => Some(2),
        _ => None,
    }
}

/// A sampled form on a prism `V x K`: one form per vertical atom.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PrismForm {
    base: PrismBase,
    vertical: MeasureSpace,
    forms: BTreeMap<String, DifferentialForm>,
}

impl PrismForm {
    pub fn new(
        base: PrismBase,
        vertical: MeasureSpace,
        forms: BTreeMap<String, DifferentialForm>,
    ) -> Result<Self, PrismError> {
        base.validate()?;
        if let Some(segment) = vertical.segments().first() {
            return Err(PrismError::DiffuseVertical(segment.id.clone()));
        }
        let degree = forms.values().next().map(|f| f.degree).unwrap_or(0);
        for atom in vertical.atoms() {
            if !forms.contains_key(&atom.id) {
                return Err(PrismError::MissingForm(atom.id.clone()));
            }
        }
        for (id, form) in &forms {
            if vertical.atom_mass(id).is_none() {
                return Err(PrismError::UnknownFormId(id.clone()));
            }
            if form.degree != degree {
                return Err(PrismError::MixedDegrees {
                    id: id.clone(),
                    found: form.degree,
                    expected: degree,
                });
            }
            let expected =
                component_count(base.dim, form.degree).ok_or(PrismError::DegreeOverflow {
                    degree: form.degree,
                    dim: base.dim,
                })?;
            if form.components.len() != expected {
                return Err(PrismError::ComponentCount {
                    id: id.clone(),
                    dim: base.dim,
                    degree: form.degree,
                    expected,
                    found: form.components.len(),
                });
            }
            for (index, component) in form.components.iter().enumerate() {
                if !component.matches(&base) {
                    return Err(PrismError::ShapeMismatch {
                        id: id.clone(),
                        component: index,
                    });
                }
            }
        }
        Ok(PrismForm {
            base,
            vertical,
            forms,
        })
    }

    /// Samples `f(x)` (dim 1) or `f(x, y)` (dim 2) into each component of a
    /// degree-`degree` form, one closure per component, same form under
    /// every atom of `vertical`.
    pub fn sample(
        base: PrismBase,
        vertical: MeasureSpace,
        degree: u32,
        components: &[&dyn Fn(f64, f64) -> f64],
    ) -> Result<Self, PrismError> {
        base.validate()?;
        let sampled: Vec<GridSamples> = components
            .iter()
            .map(|f| sample_component(&base, f))
            .collect();
        let form = DifferentialForm {
            degree,
            components: sampled,
        };
        let forms = vertical
            .atoms()
            .iter()
            .map(|a| (a.id.clone(), form.clone()))
            .collect();
        PrismForm::new(base, vertical, forms)
    }

    pub fn base(&self) -> &PrismBase {
        &self.base
    }

    pub fn vertical(&self) -> &MeasureSpace {
        &self.vertical
    }

    pub fn forms(&self) -> &BTreeMap<String, DifferentialForm> {
        &self.forms
    }

    pub fn degree(&self) -> u32 {
        self.forms.values().next().map(|f| f.degree).unwrap_or(0)
    }

    pub fn with_orientation(&self, orientation: Sign) -> PrismForm {
        let mut out = self.clone();
        out.base.orientation = orientation;
        out
    }
}

impl<'de> Deserialize<'de> for PrismForm {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            base: PrismBase,
            vertical: MeasureSpace,
            forms: BTreeMap<String, DifferentialForm>,
        }
        let raw = Raw::deserialize(deserializer)?;
        PrismForm::new(raw.base, raw.vertical, raw.forms).map_err(serde::de::Error::custom)
    }
}

fn sample_component(base: &PrismBase, f: &dyn Fn(f64, f64) -> f64) -> GridSamples {
    let n = base.n;
    match base.dim {
        1 => {
            let h = base.step(0);
            GridSamples::Line(
                (0..n)
                    .map(|i| f(base.extent[0] + i as f64 * h, 0.0))
                    .collect(),
            )
        }
        _ => {
            let hx = base.step(0);
            let hy = base.step(1);
            GridSamples::Rect(
                (0..n)
                    .map(|i| {
                        let x = base.extent[0] + i as f64 * hx;
                        (0..n)
                            .map(|j| f(x, base.extent[2] + j as f64 * hy))
                            .collect()
                    })
                    .collect(),
            )
        }
    }
}

fn trapezoid_line(values: &[f64], h: f64) -> f64 {
    let n = values.len();
    let mut sum = 0.5 * (values[0] + values[n - 1]);
    for v in &values[1..n - 1] {
        sum += v;
    }
    sum * h
}

fn trapezoid_rect(rows: &[Vec<f64>], hx: f64, hy: f64) -> f64 {
    let n = rows.len();
    let mut column: Vec<f64> = Vec::with_capacity(n);
    for row in rows {
        column.push(trapezoid_line(row, hy));
    }
    let mut sum = 0.5 * (column[0] + column[n - 1]);
    for v in &column[1..n - 1] {
        sum += v;
    }
    sum * hx
}

/// Second-order finite differences on nodal samples: centered in the
/// interior, one-sided three-point at the ends.
fn differentiate_line(values: &[f64], h: f64) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * h);
    for i in 1..n - 1 {
        out[i] = (values[i + 1] - values[i - 1]) / (2.0 * h);
    }
    out[n - 1] = (3.0 * values[n - 1] - 4.0 * values[n - 2] + values[n - 3]) / (2.0 * h);
    out
}

fn differentiate_rect(rows: &[Vec<f64>], axis: usize, h: f64) -> Vec<Vec<f64>> {
    let n = rows.len();
    if axis == 1 {
        return rows.iter().map(|row| differentiate_line(row, h)).collect();
    }
    let mut out = vec![vec![0.0; n]; n];
    for j in 0..n {
        let column: Vec<f64> = rows.iter().map(|row| row[j]).collect();
        let d = differentiate_line(&column, h);
        for i in 0..n {
            out[i][j] = d[i];
        }
    }
    out
}

fn stride_line(values: &[f64], stride: usize) -> Vec<f64> {
    values.iter().step_by(stride).copied().collect()
}

fn stride_rect(rows: &[Vec<f64>], stride: usize) -> Vec<Vec<f64>> {
    rows.iter()
        .step_by(stride)
        .map(|row| stride_line(row, stride))
        .collect()
}

/// Pairs the top-degree component with the prism's product measure:
/// `sum_atoms mass * int_V (top component)`.
pub fn fundamental_cycle(form: &PrismForm) -> Result<f64, PrismError> {
    let dim = form.base.dim;
    if form.degree() != dim {
        return Err(PrismError::WrongDegree {
            expected: dim,
            found: form.degree(),
        });
    }
    let mut total = 0.0;
    for atom in form.vertical.atoms() {
        let sampled = &form.forms[&atom.id];
        let integral = match (&sampled.components[0], dim) {
            (GridSamples::Line(values), 1) => trapezoid_line(values, form.base.step(0)),
            (GridSamples::Rect(rows), 2) => {
                trapezoid_rect(rows, form.base.step(0), form.base.step(1))
            }
            _ => unreachable!("shape checked at construction"),
        };
        total += atom.mass.to_f64() * integral;
    }
    Ok(total * f64::from(form.base.orientation.as_i8()))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StokesReport {
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    /// Empirical convergence order from one coarsening step; absent when the
    /// grid cannot be halved or the residual is at round-off.
    pub order_estimate: Option<f64>,
    pub pass: bool,
}

/// Both sides of the boundary identity at the given node stride.
fn stokes_sides(form: &PrismForm, stride: usize) -> (f64, f64) {
    let sign = f64::from(form.base.orientation.as_i8());
    let n = (form.base.n - 1) / stride + 1;
    let mut lhs = 0.0;
    let mut rhs = 0.0;
    match form.base.dim {
        1 => {
            let h = form.base.step(0) * stride as f64;
            for atom in form.vertical.atoms() {
                let GridSamples::Line(values) = &form.forms[&atom.id].components[0] else {
                    unreachable!("shape checked at construction")
                };
                let values = stride_line(values, stride);
                debug_assert_eq!(values.len(), n);
                let mass = atom.mass.to_f64();
                lhs += mass * trapezoid_line(&differentiate_line(&values, h), h);
                rhs += mass * (values[n - 1] - values[0]);
            }
        }
        _ => {
            let hx = form.base.step(0) * stride as f64;
            let hy = form.base.step(1) * stride as f64;
            for atom in form.vertical.atoms() {
                let components = &form.forms[&atom.id].components;
                let (GridSamples::Rect(f_dx), GridSamples::Rect(g_dy)) =
                    (&components[0], &components[1])
                else {
                    unreachable!("shape checked at construction")
                };
                let f_dx = stride_rect(f_dx, stride);
                let g_dy = stride_rect(g_dy, stride);
                let mass = atom.mass.to_f64();

                // d(f dx + g dy) = (dg/dx - df/dy) dx^dy
                let dg_dx = differentiate_rect(&g_dy, 0, hx);
                let df_dy = differentiate_rect(&f_dx, 1, hy);
                let curl: Vec<Vec<f64>> = dg_dx
                    .iter()
                    .zip(&df_dy)
                    .map(|(gr, fr)| gr.iter().zip(fr).map(|(g, f)| g - f).collect())
                    .collect();
                lhs += mass * trapezoid_rect(&curl, hx, hy);

                // Counterclockwise boundary: the induced orientation with
                // the outward normal listed first.
                let bottom: Vec<f64> = (0..n).map(|i| f_dx[i][0]).collect();
                let top: Vec<f64> = (0..n).map(|i| f_dx[i][n - 1]).collect();
                let left = &g_dy[0];
                let right = &g_dy[n - 1];
                rhs += mass
                    * (trapezoid_line(&bottom, hx) + trapezoid_line(right, hy)
                        - trapezoid_line(&top, hx)
                        - trapezoid_line(left, hy));
            }
        }
    }
    (sign * lhs, sign * rhs)
}

/// Compares `int_V d(omega)` (finite-difference derivative, trapezoid
/// quadrature) against the induced-orientation boundary integral.
pub fn stokes_check(form: &PrismForm, tolerance: f64) -> Result<StokesReport, PrismError> {
    let dim = form.base.dim;
    if form.degree() + 1 != dim {
        return Err(PrismError::WrongDegree {
            expected: dim - 1,
            found: form.degree(),
        });
    }
    let (lhs, rhs) = stokes_sides(form, 1);
    let residual = (lhs - rhs).abs();

    let order_estimate = if (form.base.n - 1) % 2 == 0 && form.base.n >= 5 {
        let (cl, cr) = stokes_sides(form, 2);
        let coarse = (cl - cr).abs();
        if residual > 1e-13 && coarse > 1e-13 {
            Some((coarse / residual).log2())
        } else {
            None
        }
    } else {
        None
    };

    Ok(StokesReport {
        lhs,
        rhs,
        residual,
        order_estimate,
        pass: residual <= tolerance,
    })
}

/// Replaces each diffuse segment by `pieces` equal atoms; total mass is
/// conserved exactly. The refinement parameter trades accuracy of any
/// segment-supported observable for atom count.
pub fn refine_diffuse(space: &MeasureSpace, pieces: u32) -> MeasureSpace {
    assert!(pieces > 0, "refinement needs at least one piece");
    let mut taken: std::collections::BTreeSet<String> =
        space.ids().map(str::to_owned).collect();
    let mut atoms: Vec<Atom> = space.atoms().to_vec();
    for segment in space.segments() {
        let piece_mass = segment.length.clone() / Scalar::from_integer(i64::from(pieces));
        for k in 0..pieces {
            let id = freshen(&mut taken, &format!("{}.{k}", segment.id));
            atoms.push(Atom {
                id,
                mass: piece_mass.clone(),
            });
        }
    }
    MeasureSpace::new(atoms, Vec::new()).expect("freshened ids are unique")
}

/// Map from component id to an exact observable value.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ObservableTable {
    values: BTreeMap<String, Scalar>,
}

impl ObservableTable {
    pub fn new(values: BTreeMap<String, Scalar>) -> Self {
        ObservableTable { values }
    }

    pub fn insert(&mut self, id: impl Into<String>, value: Scalar) {
        self.values.insert(id.into(), value);
    }

    pub fn get(&self, id: &str) -> Option<&Scalar> {
        self.values.get(id)
    }
}

/// A signed, weighted component of an ensemble, identified by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedComponent {
    pub id: String,
    pub weight: Scalar,
    pub orientation: Sign,
}

/// Components of a projective-product ensemble, keyed by manifold name.
pub fn ensemble_components(ensemble: &EnsembleDescription) -> Vec<WeightedComponent> {
    ensemble
        .entries
        .iter()
        .map(|entry| WeightedComponent {
            id: entry.manifold.to_string(),
            weight: entry.weight.clone(),
            orientation: entry.orientation,
        })
        .collect()
}

/// `E[b] = sum orientation * weight * b(component)`, exact.
pub fn expected_value(
    components: &[WeightedComponent],
    observables: &ObservableTable,
) -> Result<Scalar, PrismError> {
    let mut total = Scalar::zero();
    for component in components {
        let value = observables
            .get(&component.id)
            .ok_or_else(|| PrismError::MissingObservable(component.id.clone()))?;
        let signed = match component.orientation {
            Sign::Plus => value.clone(),
            Sign::Minus => -value.clone(),
        };
        total = total + component.weight.clone() * signed;
    }
    Ok(total)
}
