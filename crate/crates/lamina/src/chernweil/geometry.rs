//! Charted base manifolds carrying projection-valued fields.
//!
//! A geometry exposes, per chart, an analytic projection field `P(x)` into a
//! fixed ambient `C^r` together with a smooth partition-of-unity weight.
//! Charts are cubes `[-extent, extent]^dim` in real coordinates (complex
//! coordinates split into real and imaginary parts, in that order). The
//! projection fields of the projective examples present global subbundles
//! of a trivial bundle, so the matrices agree literally on chart overlaps;
//! only the coordinates change.

use num_complex::Complex64;
use serde::Deserialize;

use super::matrix::CMatrix;

pub const DEFAULT_EXTENT: f64 = 2.0;
pub const PLATEAU_RADIUS: f64 = 1.2;
pub const SUPPORT_RADIUS: f64 = 2.0;

/// `exp(-1/x)`-based smooth step: 0 for `x <= 0`, 1 for `x >= 1`.
fn smooth_step(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else if x >= 1.0 {
        1.0
    } else {
        let rising = (-1.0 / x).exp();
        let falling = (-1.0 / (1.0 - x)).exp();
        rising / (rising + falling)
    }
}

/// Smooth plateau profile in `|t|`: identically 1 up to the plateau radius,
/// identically 0 from the support radius on.
pub fn bump(t: f64, plateau: f64, support: f64) -> f64 {
    smooth_step((support - t.abs()) / (support - plateau))
}

fn standard_bump(t: f64) -> f64 {
    bump(t, PLATEAU_RADIUS, SUPPORT_RADIUS)
}

#[derive(Clone, Copy, Debug)]
pub struct RankOneBlocks {
    pub block_size: usize,
    pub multiplicity: usize,
}

pub trait Geometry {
    fn name(&self) -> String;
    /// Real dimension of the base: 2 or 4.
    fn dim(&self) -> usize;
    fn chart_count(&self) -> usize;
    fn extent(&self) -> f64 {
        DEFAULT_EXTENT
    }
    /// Ambient matrix size of the projection field.
    fn matrix_size(&self) -> usize;
    /// Rank of the projections (constant across the manifold).
    fn rank(&self) -> usize;
    fn projection(&self, chart: usize, x: &[f64]) -> CMatrix;
    /// Partition-of-unity weight of `chart` at its point `x`.
    fn weight(&self, chart: usize, x: &[f64]) -> f64;
    /// When the field is block-diagonal with identical rank-one blocks,
    /// sampling can run on the unit section alone.
    fn rank_one(&self) -> Option<RankOneBlocks> {
        None
    }
    /// Writes the unit vector spanning the block's image at `x`.
    fn unit_section(&self, _chart: usize, _x: &[f64], _out: &mut [Complex64]) {
        unimplemented!("geometry has no rank-one structure")
    }
}

fn complex(x: &[f64], k: usize) -> Complex64 {
    Complex64::new(x[2 * k], x[2 * k + 1])
}

/// Tautological line bundle over the projective line, two affine charts.
pub struct Cp1Tautological;

impl Cp1Tautological {
    /// Unit vector spanning the fiber; chart 0 at `z` is the line through
    /// `(1, z)`, chart 1 at `w` the line through `(w, 1)` (same point when
    /// `w = 1/z`).
    fn section(chart: usize, x: &[f64]) -> [Complex64; 2] {
        let t = complex(x, 0);
        let scale = 1.0 / (1.0 + t.norm_sqr()).sqrt();
        match chart {
            0 => [Complex64::new(scale, 0.0), t * scale],
            _ => [t * scale, Complex64::new(scale, 0.0)],
        }
    }
}

/// Weight for two charts glued by coordinate inversion: the bump in the own
/// coordinate against the bump in the other chart's coordinate `1/t`.
fn inversion_weight(t: Complex64) -> f64 {
    let own = standard_bump(t.norm());
    let modulus = t.norm();
    let other = if modulus * SUPPORT_RADIUS <= 1.0 {
        0.0
    } else {
        standard_bump(1.0 / modulus)
    };
    let total = own + other;
    if total == 0.0 {
        0.0
    } else {
        own / total
    }
}

impl Geometry for Cp1Tautological {
    fn name(&self) -> String {
        "cp1-tautological".to_owned()
    }
    fn dim(&self) -> usize {
        2
    }
    fn chart_count(&self) -> usize {
        2
    }
    fn matrix_size(&self) -> usize {
        2
    }
    fn rank(&self) -> usize {
        1
    }
    fn projection(&self, chart: usize, x: &[f64]) -> CMatrix {
        CMatrix::outer(&Self::section(chart, x))
    }
    fn weight(&self, _chart: usize, x: &[f64]) -> f64 {
        inversion_weight(complex(x, 0))
    }
}

/// Stable tangent bundle of the projective plane: three copies of the
/// conjugate tautological line (the Euler presentation of `T + C`), three
/// affine charts.
pub struct Cp2StableTangent;

impl Cp2StableTangent {
    fn homogeneous(chart: usize, x: &[f64]) -> [Complex64; 3] {
        let u = complex(x, 0);
        let v = complex(x, 1);
        match chart {
            0 => [Complex64::ONE, u, v],
            1 => [u, Complex64::ONE, v],
            _ => [u, v, Complex64::ONE],
        }
    }

    fn block_section(chart: usize, x: &[f64]) -> [Complex64; 3] {
        let h = Self::homogeneous(chart, x);
        let norm = (h[0].norm_sqr() + h[1].norm_sqr() + h[2].norm_sqr()).sqrt();
        [
            h[0].conj() / norm,
            h[1].conj() / norm,
            h[2].conj() / norm,
        ]
    }
}

impl Geometry for Cp2StableTangent {
    fn name(&self) -> String {
        "cp2-tangent".to_owned()
    }
    fn dim(&self) -> usize {
        4
    }
    fn chart_count(&self) -> usize {
        3
    }
    fn matrix_size(&self) -> usize {
        9
    }
    fn rank(&self) -> usize {
        3
    }
    fn projection(&self, chart: usize, x: &[f64]) -> CMatrix {
        let w = Self::block_section(chart, x);
        let block = CMatrix::outer(&w);
        CMatrix::block_diag(&[&block, &block, &block])
    }
    fn weight(&self, chart: usize, x: &[f64]) -> f64 {
        let h = Self::homogeneous(chart, x);
        let mut rho = [0.0f64; 3];
        for k in 0..3 {
            let denom = h[k].norm();
            if denom == 0.0 {
                continue;
            }
            let mut value = 1.0;
            for (j, hj) in h.iter().enumerate() {
                if j != k {
                    value *= standard_bump(hj.norm() / denom);
                }
            }
            rho[k] = value;
        }
        let total: f64 = rho.iter().sum();
        if total == 0.0 {
            0.0
        } else {
            rho[chart] / total
        }
    }
    fn rank_one(&self) -> Option<RankOneBlocks> {
        Some(RankOneBlocks {
            block_size: 3,
            multiplicity: 3,
        })
    }
    fn unit_section(&self, chart: usize, x: &[f64], out: &mut [Complex64]) {
        out.copy_from_slice(&Self::block_section(chart, x));
    }
}

/// Constant full projection on a single chart; everything flat.
pub struct FlatRank {
    pub rank: usize,
}

impl Geometry for FlatRank {
    fn name(&self) -> String {
        format!("flat-rank-{}", self.rank)
    }
    fn dim(&self) -> usize {
        2
    }
    fn chart_count(&self) -> usize {
        1
    }
    fn matrix_size(&self) -> usize {
        self.rank
    }
    fn rank(&self) -> usize {
        self.rank
    }
    fn projection(&self, _chart: usize, _x: &[f64]) -> CMatrix {
        CMatrix::identity(self.rank)
    }
    fn weight(&self, _chart: usize, _x: &[f64]) -> f64 {
        1.0
    }
}

/// Trivial summand living over another geometry's charts and weights.
pub struct TrivialSummand {
    pub host: Box<dyn Geometry>,
    pub rank: usize,
}

impl Geometry for TrivialSummand {
    fn name(&self) -> String {
        "trivial".to_owned()
    }
    fn dim(&self) -> usize {
        self.host.dim()
    }
    fn chart_count(&self) -> usize {
        self.host.chart_count()
    }
    fn extent(&self) -> f64 {
        self.host.extent()
    }
    fn matrix_size(&self) -> usize {
        self.rank
    }
    fn rank(&self) -> usize {
        self.rank
    }
    fn projection(&self, _chart: usize, _x: &[f64]) -> CMatrix {
        CMatrix::identity(self.rank)
    }
    fn weight(&self, chart: usize, x: &[f64]) -> f64 {
        self.host.weight(chart, x)
    }
}

/// Block-diagonal direct sum of two fields over the same charted base.
pub struct DirectSum {
    left: Box<dyn Geometry>,
    right: Box<dyn Geometry>,
}

impl DirectSum {
    pub fn new(left: Box<dyn Geometry>, right: Box<dyn Geometry>) -> DirectSum {
        assert_eq!(left.dim(), right.dim(), "summands over different bases");
        assert_eq!(left.chart_count(), right.chart_count());
        assert_eq!(left.extent(), right.extent());
        DirectSum { left, right }
    }
}

impl Geometry for DirectSum {
    fn name(&self) -> String {
        format!("{}+{}", self.left.name(), self.right.name())
    }
    fn dim(&self) -> usize {
        self.left.dim()
    }
    fn chart_count(&self) -> usize {
        self.left.chart_count()
    }
    fn extent(&self) -> f64 {
        self.left.extent()
    }
    fn matrix_size(&self) -> usize {
        self.left.matrix_size() + self.right.matrix_size()
    }
    fn rank(&self) -> usize {
        self.left.rank() + self.right.rank()
    }
    fn projection(&self, chart: usize, x: &[f64]) -> CMatrix {
        CMatrix::block_diag(&[&self.left.projection(chart, x), &self.right.projection(chart, x)])
    }
    fn weight(&self, chart: usize, x: &[f64]) -> f64 {
        self.left.weight(chart, x)
    }
}

/// Built-in geometries by name.
pub fn named_geometry(name: &str) -> Option<Box<dyn Geometry>> {
    match name {
        "cp1-tautological" => Some(Box::new(Cp1Tautological)),
        "cp2-tangent" => Some(Box::new(Cp2StableTangent)),
        "cp1-tautological+tautological" => Some(Box::new(DirectSum::new(
            Box::new(Cp1Tautological),
            Box::new(Cp1Tautological),
        ))),
        "cp1-tautological+trivial" => Some(Box::new(DirectSum::new(
            Box::new(Cp1Tautological),
            Box::new(TrivialSummand {
                host: Box::new(Cp1Tautological),
                rank: 1,
            }),
        ))),
        other => {
            let rank: usize = other.strip_prefix("flat-rank-")?.parse().ok()?;
            if rank == 0 || rank > 8 {
                return None;
            }
            Some(Box::new(FlatRank { rank }))
        }
    }
}

/// Complex-arithmetic expression over the real chart coordinates.
#[derive(Clone, Debug, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Expr {
    Const {
        re: f64,
        #[serde(default)]
        im: f64,
    },
    /// Real coordinate `x_axis` of the chart.
    Coord { axis: usize },
    Add { args: Vec<Expr> },
    Mul { args: Vec<Expr> },
    Sub { a: Box<Expr>, b: Box<Expr> },
    Div { a: Box<Expr>, b: Box<Expr> },
    Neg { a: Box<Expr> },
    Conj { a: Box<Expr> },
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> Complex64 {
        match self {
            Expr::Const { re, im } => Complex64::new(*re, *im),
            Expr::Coord { axis } => Complex64::new(x[*axis], 0.0),
            Expr::Add { args } => args.iter().map(|a| a.eval(x)).sum(),
            Expr::Mul { args } => args.iter().map(|a| a.eval(x)).product(),
            Expr::Sub { a, b } => a.eval(x) - b.eval(x),
            Expr::Div { a, b } => a.eval(x) / b.eval(x),
            Expr::Neg { a } => -a.eval(x),
            Expr::Conj { a } => a.eval(x).conj(),
        }
    }

    fn max_axis(&self) -> usize {
        match self {
            Expr::Const { .. } => 0,
            Expr::Coord { axis } => *axis + 1,
            Expr::Add { args } | Expr::Mul { args } => {
                args.iter().map(Expr::max_axis).max().unwrap_or(0)
            }
            Expr::Sub { a, b } | Expr::Div { a, b } => a.max_axis().max(b.max_axis()),
            Expr::Neg { a } | Expr::Conj { a } => a.max_axis(),
        }
    }
}

#[derive(Deserialize)]
pub struct ChartSpec {
    /// Square matrix of entry expressions.
    pub projection: Vec<Vec<Expr>>,
    /// Partition-of-unity weight (real part used); defaults to 1.
    #[serde(default)]
    pub weight: Option<Expr>,
}

/// JSON-defined geometry: explicit charts with expression-valued projection
/// entries. Overlap consistency is the author's responsibility; the defect
/// checks still validate each sample.
#[derive(Deserialize)]
pub struct GeometrySpec {
    pub dim: usize,
    #[serde(default = "default_extent")]
    pub extent: f64,
    /// Suggested grid resolution per axis.
    pub resolution: usize,
    pub charts: Vec<ChartSpec>,
}

fn default_extent() -> f64 {
    DEFAULT_EXTENT
}

pub struct ExprGeometry {
    spec: GeometrySpec,
    size: usize,
    rank: usize,
}

impl ExprGeometry {
    pub fn new(spec: GeometrySpec) -> Result<Self, String> {
        if !(spec.dim == 2 || spec.dim == 4) {
            return Err(format!("dim must be 2 or 4, got {}", spec.dim));
        }
        if spec.charts.is_empty() {
            return Err("at least one chart required".to_owned());
        }
        if !(spec.extent.is_finite() && spec.extent > 0.0) {
            return Err(format!("extent must be positive, got {}", spec.extent));
        }
        if spec.resolution < 2 {
            return Err("resolution must be at least 2".to_owned());
        }
        let size = spec.charts[0].projection.len();
        for (index, chart) in spec.charts.iter().enumerate() {
            if chart.projection.len() != size
                || chart.projection.iter().any(|row| row.len() != size)
            {
                return Err(format!("chart {index}: projection must be {size}x{size}"));
            }
            let axes = chart
                .projection
                .iter()
                .flatten()
                .map(Expr::max_axis)
                .chain(chart.weight.iter().map(Expr::max_axis))
                .max()
                .unwrap_or(0);
            if axes > spec.dim {
                return Err(format!(
                    "chart {index}: coordinate axis {} out of range for dim {}",
                    axes - 1,
                    spec.dim
                ));
            }
        }
        let center = vec![0.0; spec.dim];
        let trace: f64 = (0..size)
            .map(|i| spec.charts[0].projection[i][i].eval(&center).re)
            .sum();
        let rank = trace.round() as usize;
        Ok(ExprGeometry { spec, size, rank })
    }

    pub fn from_json(text: &str) -> Result<Self, String> {
        let spec: GeometrySpec = serde_json::from_str(text).map_err(|e| e.to_string())?;
        ExprGeometry::new(spec)
    }

    pub fn default_resolution(&self) -> usize {
        self.spec.resolution
    }
}

impl Geometry for ExprGeometry {
    fn name(&self) -> String {
        "custom".to_owned()
    }
    fn dim(&self) -> usize {
        self.spec.dim
    }
    fn chart_count(&self) -> usize {
        self.spec.charts.len()
    }
    fn extent(&self) -> f64 {
        self.spec.extent
    }
    fn matrix_size(&self) -> usize {
        self.size
    }
    fn rank(&self) -> usize {
        self.rank
    }
    fn projection(&self, chart: usize, x: &[f64]) -> CMatrix {
        let entries = &self.spec.charts[chart].projection;
        let mut m = CMatrix::zeros(self.size);
        for i in 0..self.size {
            for j in 0..self.size {
                m.set(i, j, entries[i][j].eval(x));
            }
        }
        m
    }
    fn weight(&self, chart: usize, x: &[f64]) -> f64 {
        match &self.spec.charts[chart].weight {
            None => 1.0,
            Some(expr) => expr.eval(x).re,
        }
    }
}
