//! Batch command-line surface: every capability behind one thin binary,
//! with deterministic JSON, CSV and table output.
//!
//! Identical invocations produce byte-identical JSON (payloads are
//! serialized through a sorted-key value tree). Exit codes: 0 when the
//! command's status is ok, 2 for validation problems (bad arguments or
//! files), 3 when a verification or tolerance check fails.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use crate::charclass::{
    expected_pontryagin, partitions, pontryagin_matrix, solve_target, target_from_map,
    EnsembleDescription, Partition,
};
use crate::chernweil::{
    connection_independence_check, integrate_invariant, named_geometry, whitney_sum_check,
    CurvatureOptions, ExprGeometry, Geometry, InvariantPolynomial,
};
use crate::cobordism::{
    pair_of_pants, phi0, split_compact_leaves, suspension_normal_form, verify_witness,
    CobordismWitness, PairOfPantsPayload, RandomOneManifold, RandomZeroManifold, Status,
};
use crate::measure::Automorphism;
use crate::prism::{ensemble_components, expected_value, stokes_check, ObservableTable, PrismForm};
use crate::scalar::Scalar;

/// Largest table index served without an override; every matrix up to here
/// is exercised by the test suite.
pub const MAX_TABLE_SIZE: u32 = 5;

const DEFAULT_STOKES_TOLERANCE: f64 = 1e-6;
const DEFAULT_INDEPENDENCE_TOLERANCE: f64 = 1e-2;
const DEFAULT_WHITNEY_TOLERANCE: f64 = 2e-3;

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Json,
    Csv,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Check {
    /// Integrate one invariant and compare with the nearest integer.
    Charge,
    /// Integrate twice, under a random deformation of the connection.
    Independence,
    /// First Chern integrals across direct sums of the line geometries.
    Whitney,
}

#[derive(Parser)]
#[command(
    name = "lamina",
    version,
    about = "Cobordism calculus for measured families of manifolds"
)]
pub struct Cli {
    /// Output rendering.
    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,
    /// Seed for the randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Overrides the command's numeric tolerance.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Signed transverse mass of a 0-dimensional ensemble.
    Phi0 {
        /// Manifold JSON: {"plus": MeasureSpace, "minus": MeasureSpace}.
        manifold: PathBuf,
    },
    /// Matrix of Pontryagin numbers of the projective products, with its
    /// exact determinant.
    PontryaginTable {
        /// Partition weight; rows and columns are the partitions of n.
        #[arg(long)]
        n: u32,
    },
    /// Signed weighted ensemble hitting a prescribed Pontryagin vector.
    SolveTarget {
        #[arg(long)]
        n: u32,
        /// JSON map from partition strings to exact values, e.g.
        /// {"2": "1", "1+1": "0"}; missing keys are zero.
        target: PathBuf,
    },
    /// Suspension toolkit for 1-dimensional ensembles.
    #[command(subcommand)]
    Suspension(SuspensionCommand),
    /// Numeric characteristic integrals on charted geometries.
    ChernWeil {
        /// Built-in geometry name (cp1-tautological, cp2-tangent,
        /// flat-rank-R, cp1-tautological+tautological, ...).
        #[arg(long, conflicts_with = "spec")]
        geometry: Option<String>,
        /// JSON chart description with expression-valued projections.
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Grid cells per axis.
        #[arg(long)]
        resolution: Option<usize>,
        /// chN or pontryagin; defaults to ch1 (2d) / pontryagin (4d).
        #[arg(long)]
        invariant: Option<String>,
        #[arg(long, value_enum, default_value_t = Check::Charge)]
        check: Check,
    },
    /// Both sides of the boundary identity on a prism.
    Stokes {
        /// PrismForm JSON: base grid, vertical measure, per-atom forms.
        prism: PathBuf,
    },
    /// Exact weighted mean of an observable over an ensemble.
    ExpectedValue {
        /// EnsembleDescription JSON.
        ensemble: PathBuf,
        /// JSON map from component id to exact value.
        observable: PathBuf,
    },
}

#[derive(Subcommand)]
pub enum SuspensionCommand {
    /// Single positively-oriented presentation over the merged base.
    NormalForm { manifold: PathBuf },
    /// Fundamental domains of the compact leaves plus the aperiodic rest.
    Split { manifold: PathBuf },
    /// Bounding witness for a composition: S(phi) + S(psi) - S(phi.psi).
    PairOfPants {
        /// JSON: {"base": MeasureSpace, "phi": map, "psi": map}.
        payload: PathBuf,
    },
    /// Re-derive and check a witness's boundary equation.
    Verify { witness: PathBuf },
}

/// One command's result in every rendering; the same numbers everywhere.
#[derive(Debug)]
pub struct Rendered {
    pub status: Status,
    pub payload: Value,
    pub table: String,
    pub csv: Vec<Vec<String>>,
}

#[derive(Debug)]
pub struct ValidationError(String);

impl std::fmt::Display for ValidationError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

fn invalid(message: impl std::fmt::Display) -> ValidationError {
    ValidationError(message.to_string())
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ValidationError> {
    let text = fs::read_to_string(path)
        .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let mut deserializer = serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(&mut deserializer).map_err(|e| {
        let path_in_doc = e.path().to_string();
        let location = if path_in_doc == "." {
            String::new()
        } else {
            format!(" (field {path_in_doc})")
        };
        invalid(format!("{}{location}: {}", path.display(), e.inner()))
    })
}

fn to_value<T: Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("command payloads are serializable")
}

/// Machine-identical float text in tables and CSV: the JSON rendering.
fn float_text(x: f64) -> String {
    serde_json::to_string(&x).expect("finite float")
}

fn kv_lines(rows: &[(&str, String)]) -> String {
    rows.iter()
        .map(|(key, value)| format!("{key} = {value}"))
        .collect::<Vec<_>>()
        .join("\n")
}

fn kv_csv(rows: &[(&str, String)]) -> Vec<Vec<String>> {
    let mut out = vec![vec!["field".to_owned(), "value".to_owned()]];
    for (key, value) in rows {
        out.push(vec![(*key).to_owned(), value.clone()]);
    }
    out
}

fn kv_rendered(status: Status, payload: Value, rows: &[(&str, String)]) -> Rendered {
    Rendered {
        status,
        payload,
        table: kv_lines(rows),
        csv: kv_csv(rows),
    }
}

pub fn main_entry() -> ExitCode {
    run(Cli::parse())
}

pub fn run(cli: Cli) -> ExitCode {
    match execute(&cli) {
        Ok(rendered) => {
            print!("{}", render(cli.format, &rendered));
            match rendered.status {
                Status::Ok => ExitCode::SUCCESS,
                Status::Fail | Status::Unknown => ExitCode::from(3),
            }
        }
        Err(error) => {
            eprintln!("error: {error}");
            ExitCode::from(2)
        }
    }
}

pub fn render(format: Format, rendered: &Rendered) -> String {
    match format {
        Format::Json => {
            let document = json!({
                "status": rendered.status,
                "payload": rendered.payload,
            });
            let mut text =
                serde_json::to_string_pretty(&document).expect("JSON document");
            text.push('\n');
            text
        }
        Format::Table => {
            let mut text = rendered.table.clone();
            text.push('\n');
            text
        }
        Format::Csv => {
            let mut writer = csv::WriterBuilder::new().from_writer(Vec::new());
            for row in &rendered.csv {
                writer.write_record(row).expect("CSV row");
            }
            String::from_utf8(writer.into_inner().expect("CSV buffer"))
                .expect("CSV is UTF-8")
        }
    }
}

pub fn execute(cli: &Cli) -> Result<Rendered, ValidationError> {
    match &cli.command {
        Command::Phi0 { manifold } => cmd_phi0(manifold),
        Command::PontryaginTable { n } => cmd_pontryagin_table(*n),
        Command::SolveTarget { n, target } => cmd_solve_target(*n, target),
        Command::Suspension(sub) => match sub {
            SuspensionCommand::NormalForm { manifold } => cmd_normal_form(manifold),
            SuspensionCommand::Split { manifold } => cmd_split(manifold),
            SuspensionCommand::PairOfPants { payload } => cmd_pair_of_pants(payload),
            SuspensionCommand::Verify { witness } => cmd_verify(witness),
        },
        Command::ChernWeil {
            geometry,
            spec,
            resolution,
            invariant,
            check,
        } => cmd_chern_weil(cli, geometry, spec, *resolution, invariant, *check),
        Command::Stokes { prism } => cmd_stokes(cli, prism),
        Command::ExpectedValue {
            ensemble,
            observable,
        } => cmd_expected_value(ensemble, observable),
    }
}

fn cmd_phi0(path: &Path) -> Result<Rendered, ValidationError> {
    let manifold: RandomZeroManifold = read_json(path)?;
    let value = phi0(&manifold);
    let null_cobordant = value.is_zero();

    #[derive(Serialize)]
    struct Payload {
        phi0: Scalar,
        null_cobordant: bool,
    }
    let payload = to_value(&Payload {
        phi0: value.clone(),
        null_cobordant,
    });
    Ok(Rendered {
        status: Status::Ok,
        payload,
        table: format!(
            "phi0 = {}, null_cobordant = {null_cobordant}",
            value.display()
        ),
        csv: vec![
            vec!["phi0".to_owned(), "null_cobordant".to_owned()],
            vec![value.display(), null_cobordant.to_string()],
        ],
    })
}

fn cmd_pontryagin_table(n: u32) -> Result<Rendered, ValidationError> {
    if n > MAX_TABLE_SIZE {
        return Err(invalid(format!(
            "n = {n} out of range; supported range is 0..={MAX_TABLE_SIZE}"
        )));
    }
    let table = pontryagin_matrix(n);
    let payload = to_value(&table);

    let order_line = table
        .order
        .iter()
        .map(Partition::to_string)
        .collect::<Vec<_>>()
        .join(", ");
    let cells: Vec<Vec<String>> = table
        .matrix
        .iter()
        .map(|row| row.iter().map(Scalar::display).collect())
        .collect();
    let widths: Vec<usize> = (0..table.order.len())
        .map(|col| cells.iter().map(|row| row[col].len()).max().unwrap_or(0))
        .collect();
    let mut lines = vec![format!("order: {order_line}")];
    for row in &cells {
        let padded: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(cell, width)| format!("{cell:>width$}"))
            .collect();
        lines.push(padded.join("  "));
    }
    lines.push(format!("det = {}", table.det.display()));

    let mut csv = cells;
    csv.push(vec!["det".to_owned(), table.det.to_fraction_string()]);
    Ok(Rendered {
        status: Status::Ok,
        payload,
        table: lines.join("\n"),
        csv,
    })
}

fn cmd_solve_target(n: u32, path: &Path) -> Result<Rendered, ValidationError> {
    if n == 0 || n > MAX_TABLE_SIZE {
        return Err(invalid(format!(
            "n = {n} out of range; supported range is 1..={MAX_TABLE_SIZE}"
        )));
    }
    let map: BTreeMap<String, Scalar> = read_json(path)?;
    let target = target_from_map(n, &map).map_err(invalid)?;
    let ensemble = solve_target(n, &target).map_err(invalid)?;

    let order = partitions(n);
    let verified = order.iter().zip(&target).all(|(beta, expected)| {
        expected_pontryagin(&ensemble, beta)
            .map(|achieved| achieved == *expected)
            .unwrap_or(false)
    });

    #[derive(Serialize)]
    struct Payload {
        n: u32,
        order: Vec<Partition>,
        target: Vec<Scalar>,
        ensemble: EnsembleDescription,
        verified: bool,
    }
    let payload = to_value(&Payload {
        n,
        order,
        target,
        ensemble: ensemble.clone(),
        verified,
    });

    let mut lines = Vec::new();
    let mut csv = vec![vec![
        "manifold".to_owned(),
        "orientation".to_owned(),
        "weight".to_owned(),
    ]];
    if ensemble.entries.is_empty() {
        lines.push("empty ensemble".to_owned());
    }
    for entry in &ensemble.entries {
        let sign = match entry.orientation {
            crate::cobordism::Sign::Plus => "+",
            crate::cobordism::Sign::Minus => "-",
        };
        lines.push(format!(
            "{sign}{} weight {}",
            entry.manifold,
            entry.weight.display()
        ));
        csv.push(vec![
            entry.manifold.to_string(),
            format!("{sign}1"),
            entry.weight.display(),
        ]);
    }
    lines.push(if verified {
        "round-trip verified".to_owned()
    } else {
        "round-trip FAILED".to_owned()
    });

    Ok(Rendered {
        status: if verified { Status::Ok } else { Status::Fail },
        payload,
        table: lines.join("\n"),
        csv,
    })
}

fn cmd_normal_form(path: &Path) -> Result<Rendered, ValidationError> {
    let manifold: RandomOneManifold = read_json(path)?;
    let presentation = suspension_normal_form(&manifold);
    let payload = to_value(&presentation);
    let base = presentation.gamma.base();
    let rows = [
        ("atoms", base.atoms().len().to_string()),
        ("segments", base.segments().len().to_string()),
        ("transverse_mass", base.total_mass().display()),
        ("orientation", "+1".to_owned()),
    ];
    Ok(kv_rendered(Status::Ok, payload, &rows))
}

fn cmd_split(path: &Path) -> Result<Rendered, ValidationError> {
    let manifold: RandomOneManifold = read_json(path)?;
    let outcome = split_compact_leaves(&manifold).map_err(invalid)?;
    let payload = to_value(&outcome);

    let mut rows = vec![
        (
            "compact_mass",
            outcome.compact.total_transverse_mass().display(),
        ),
        (
            "aperiodic_mass",
            outcome.aperiodic.total_transverse_mass().display(),
        ),
        ("domains", outcome.periods.len().to_string()),
    ];
    let period_lines: Vec<(String, String)> = outcome
        .periods
        .iter()
        .map(|(id, period)| (format!("period[{id}]"), period.to_string()))
        .collect();
    let mut all_rows: Vec<(&str, String)> = rows.drain(..).collect();
    for (key, value) in &period_lines {
        all_rows.push((key.as_str(), value.clone()));
    }
    Ok(kv_rendered(Status::Ok, payload, &all_rows))
}

fn cmd_pair_of_pants(path: &Path) -> Result<Rendered, ValidationError> {
    let payload_data: PairOfPantsPayload = read_json(path)?;
    let phi = Automorphism::bind(payload_data.base.clone(), payload_data.phi.clone())
        .map_err(|e| invalid(format!("phi: {e}")))?;
    let psi = Automorphism::bind(payload_data.base.clone(), payload_data.psi.clone())
        .map_err(|e| invalid(format!("psi: {e}")))?;
    let witness = pair_of_pants(&phi, &psi).map_err(invalid)?;
    let payload = to_value(&witness);
    let rows = [
        ("kind", witness.kind.to_string()),
        ("boundary_terms", witness.boundary.len().to_string()),
        (
            "base_mass",
            payload_data.base.total_mass().display(),
        ),
    ];
    Ok(kv_rendered(Status::Ok, payload, &rows))
}

fn cmd_verify(path: &Path) -> Result<Rendered, ValidationError> {
    let witness: CobordismWitness = read_json(path)?;
    let report = verify_witness(&witness);
    let payload = to_value(&report);

    let mut lines = vec![format!("status = {}", report.status)];
    let mut csv = vec![vec![
        "component".to_owned(),
        "verdict".to_owned(),
        "detail".to_owned(),
    ]];
    for component in &report.components {
        let verdict = component.verdict.to_string();
        if component.detail.is_empty() {
            lines.push(format!("{}: {verdict}", component.name));
        } else {
            lines.push(format!(
                "{}: {verdict} ({})",
                component.name, component.detail
            ));
        }
        csv.push(vec![
            component.name.clone(),
            verdict,
            component.detail.clone(),
        ]);
    }
    Ok(Rendered {
        status: report.status,
        payload,
        table: lines.join("\n"),
        csv,
    })
}

fn cmd_chern_weil(
    cli: &Cli,
    geometry_name: &Option<String>,
    spec: &Option<PathBuf>,
    resolution: Option<usize>,
    invariant_name: &Option<String>,
    check: Check,
) -> Result<Rendered, ValidationError> {
    if check == Check::Whitney {
        if geometry_name.is_some() || spec.is_some() {
            return Err(invalid(
                "the whitney check runs on the built-in line sums; omit --geometry/--spec",
            ));
        }
        let options = CurvatureOptions::at_resolution(resolution.unwrap_or(100));
        let tolerance = cli.tolerance.unwrap_or(DEFAULT_WHITNEY_TOLERANCE);
        let report = whitney_sum_check(&options, tolerance).map_err(invalid)?;
        let status = if report.pass { Status::Ok } else { Status::Fail };
        let rows = [
            ("resolution", report.resolution.to_string()),
            ("line", float_text(report.line)),
            ("doubled", float_text(report.doubled)),
            ("padded", float_text(report.padded)),
            (
                "additivity_residual",
                float_text(report.additivity_residual),
            ),
            ("stability_residual", float_text(report.stability_residual)),
            ("tolerance", float_text(report.tolerance)),
            ("pass", report.pass.to_string()),
        ];
        return Ok(kv_rendered(status, to_value(&report), &rows));
    }

    let (geometry, spec_resolution): (Box<dyn Geometry>, Option<usize>) =
        match (geometry_name, spec) {
            (Some(name), None) => {
                let g = named_geometry(name)
                    .ok_or_else(|| invalid(format!("unknown geometry {name:?}")))?;
                (g, None)
            }
            (None, Some(path)) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                let g = ExprGeometry::from_json(&text)
                    .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                let n = g.default_resolution();
                (Box::new(g), Some(n))
            }
            _ => return Err(invalid("provide exactly one of --geometry or --spec")),
        };

    let dim = geometry.dim();
    let resolution = resolution
        .or(spec_resolution)
        .unwrap_or(if dim == 4 { 24 } else { 100 });
    let options = CurvatureOptions::at_resolution(resolution);

    let invariant: InvariantPolynomial = match invariant_name {
        Some(name) => name.parse().map_err(invalid)?,
        None if dim == 4 => InvariantPolynomial::TotalPontryagin,
        None => InvariantPolynomial::ChernCharacter(1),
    };

    match check {
        Check::Charge => {
            let tolerance = cli
                .tolerance
                .unwrap_or(if dim == 4 { 0.15 } else { 1e-3 });
            let report = integrate_invariant(geometry.as_ref(), &invariant, &options, tolerance)
                .map_err(invalid)?;
            let status = if report.pass { Status::Ok } else { Status::Fail };
            let rows = [
                ("geometry", report.geometry.clone()),
                ("invariant", report.invariant.clone()),
                ("resolution", report.resolution.to_string()),
                ("integral", float_text(report.integral)),
                ("nearest_integer", report.nearest_integer.to_string()),
                ("residual", float_text(report.residual)),
                ("tolerance", float_text(report.tolerance)),
                ("pass", report.pass.to_string()),
            ];
            Ok(kv_rendered(status, to_value(&report), &rows))
        }
        Check::Independence => {
            let tolerance = cli.tolerance.unwrap_or(DEFAULT_INDEPENDENCE_TOLERANCE);
            let report = connection_independence_check(
                geometry.as_ref(),
                &invariant,
                &options,
                cli.seed,
                tolerance,
            )
            .map_err(invalid)?;
            let status = if report.pass { Status::Ok } else { Status::Fail };
            let rows = [
                ("geometry", report.geometry.clone()),
                ("invariant", report.invariant.clone()),
                ("resolution", report.resolution.to_string()),
                ("seed", report.seed.to_string()),
                ("base_integral", float_text(report.base_integral)),
                ("perturbed_integral", float_text(report.perturbed_integral)),
                ("difference", float_text(report.difference)),
                (
                    "max_pointwise_shift",
                    float_text(report.max_pointwise_shift),
                ),
                ("tolerance", float_text(report.tolerance)),
                ("pass", report.pass.to_string()),
            ];
            Ok(kv_rendered(status, to_value(&report), &rows))
        }
        Check::Whitney => unreachable!("handled above"),
    }
}

fn cmd_stokes(cli: &Cli, path: &Path) -> Result<Rendered, ValidationError> {
    let form: PrismForm = read_json(path)?;
    let tolerance = cli.tolerance.unwrap_or(DEFAULT_STOKES_TOLERANCE);
    let report = stokes_check(&form, tolerance).map_err(invalid)?;
    let status = if report.pass { Status::Ok } else { Status::Fail };
    let order_text = match report.order_estimate {
        Some(order) => float_text(order),
        None => "null".to_owned(),
    };
    let rows = [
        ("lhs", float_text(report.lhs)),
        ("rhs", float_text(report.rhs)),
        ("residual", float_text(report.residual)),
        ("order_estimate", order_text),
        ("pass", report.pass.to_string()),
    ];
    Ok(kv_rendered(status, to_value(&report), &rows))
}

fn cmd_expected_value(
    ensemble_path: &Path,
    observable_path: &Path,
) -> Result<Rendered, ValidationError> {
    let ensemble: EnsembleDescription = read_json(ensemble_path)?;
    let observable: ObservableTable = read_json(observable_path)?;
    let components = ensemble_components(&ensemble);
    let value = expected_value(&components, &observable).map_err(invalid)?;

    #[derive(Serialize)]
    struct Payload {
        components: usize,
        value: Scalar,
    }
    let payload = to_value(&Payload {
        components: components.len(),
        value: value.clone(),
    });
    let rows = [
        ("components", components.len().to_string()),
        ("expected_value", value.display()),
    ];
    Ok(kv_rendered(Status::Ok, payload, &rows))
}
