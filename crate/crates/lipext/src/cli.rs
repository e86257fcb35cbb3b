//! Command-line front end: file formats, subcommand dispatch, and report
//! rows.
//!
//! Conventions: JSON in UTF-8 with a stable field order, CSV with `.` as the
//! decimal separator and 12 significant digits, and every sampled mode takes
//! an explicit seed. Outputs are byte-identical across runs for identical
//! inputs, seeds, and versions. Exit codes: 0 on success, 1 when a certified
//! property fails (the message names the property and a witness), 2 on input
//! errors (the message names the file and field).
//!
//! `LIPEXT_THREADS` caps the worker-thread pool used for certificate pair
//! scans.

use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::covering::{
    colored_cover, grid_cover, iterative_ball_partition, padded_ratio_check,
    verify_nagata_with_budget, Covering, PaddedReport, PartitionMode, DEFAULT_BLOCK_BUDGET,
};
use crate::extend::{
    lee_naor_extend, mcshane_extend, nerve_extend, whitney_extend, AnchorReport, ExtensionResult,
    ExtensorKind, LeeNaorDiagnostics, Method,
};
use crate::metric::{
    certify_values, FiniteMetricSpace, LipschitzCertificate, Norm, NormedSpace,
    PartialLipschitzMap, PointCloud, Subset,
};
use crate::selftest;
use crate::simplicial::sphere_constant;
use crate::whitney::{
    build_refined_whitney_cover, build_whitney_cover, default_basic_r, default_refined_r,
    GridOracle, NagataOracle, SingletonOracle, WhitneyCovering,
};

/// Exit code for property/assertion failures.
pub const EXIT_PROPERTY: i32 = 1;
/// Exit code for input errors.
pub const EXIT_INPUT: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "lipext",
    version,
    about = "Lipschitz extensions on finite metric spaces, with machine-checked certificates"
)]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Validate a metric space file against the metric axioms.
    Validate {
        #[arg(long)]
        input: PathBuf,
    },
    /// Build and verify a covering.
    Cover {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: CoverMethod,
        /// Scale s (grid, colored) or ball radius D (padded).
        #[arg(long)]
        scale: Option<f64>,
        /// Annulus ratio r for the Whitney constructions.
        #[arg(long)]
        r: Option<f64>,
        /// enumerate | sample:COUNT:SEED (padded covers).
        #[arg(long)]
        mode: Option<String>,
        /// Domain subset file (Whitney constructions).
        #[arg(long)]
        domain: Option<PathBuf>,
        /// Block budget for exact multiplicity searches.
        #[arg(long)]
        budget: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extend a partial Lipschitz map and certify the result.
    Extend {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, value_enum)]
        method: ExtendMethod,
        /// Partial map file: {"domain": [...], "values": [[...]]}.
        #[arg(long)]
        map: PathBuf,
        /// Optional domain file; must agree with the map's domain.
        #[arg(long)]
        domain: Option<PathBuf>,
        #[arg(long)]
        r: Option<f64>,
        /// Seed for sampled modes (required by leenaor).
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, value_enum, default_value_t = ExtensorArg::Barycentric)]
        extensor: ExtensorArg,
        #[arg(long)]
        out: Option<PathBuf>,
        /// CSV of the extension's values.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Sparse CSV (point,block,weight) of the partition of unity, for
        /// the cover-based methods.
        #[arg(long)]
        weights_csv: Option<PathBuf>,
    },
    /// Recompute the certificate of a stored extension result.
    Certify {
        #[arg(long)]
        input: PathBuf,
        #[arg(long)]
        result: PathBuf,
    },
    /// Print a mean-chordal-distance sphere constant.
    Constants {
        #[arg(long)]
        cn: usize,
    },
    /// Run the acceptance suite.
    Selftest {
        #[arg(long)]
        seed: u64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum CoverMethod {
    Grid,
    Colored,
    Padded,
    Whitney,
    #[value(name = "whitney-refined")]
    WhitneyRefined,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExtendMethod {
    Mcshane,
    Whitney,
    Leenaor,
    Nerve,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum ExtensorArg {
    Barycentric,
    Skeletal,
}

/// A space file: either a labelled distance matrix or a point cloud.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SpaceFile {
    Matrix {
        #[serde(default)]
        points: Option<Vec<String>>,
        dist: Vec<Vec<f64>>,
    },
    Cloud {
        coords: Vec<Vec<f64>>,
        norm: Norm,
    },
}

#[derive(Debug, Deserialize)]
struct MapFile {
    domain: Vec<usize>,
    values: Vec<Vec<f64>>,
    #[serde(default)]
    norm: Option<Norm>,
}

#[derive(Debug, Deserialize)]
struct DomainFile {
    domain: Vec<usize>,
}

/// Per-run report row.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub instance: String,
    pub method: Method,
    pub nagata_n: Option<usize>,
    pub nagata_c: Option<f64>,
    pub lip_f: f64,
    pub lip_ff: f64,
    pub paper_bound: f64,
    pub margin: f64,
    /// Printed with the summary line but not persisted: written documents
    /// stay byte-identical across runs.
    #[serde(skip_serializing, default)]
    pub runtime_ms: u128,
}

/// The JSON document written by `lipext extend` and read back by `certify`.
#[derive(Debug, Serialize, Deserialize)]
pub struct ExtendOutput {
    pub target: NormedSpace,
    pub result: ExtensionResult,
    pub report: ReportRow,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub anchors: Option<AnchorReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lee_naor: Option<LeeNaorDiagnostics>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub nerve_dimension: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub extensor_constant: Option<f64>,
}

#[derive(Debug, Serialize)]
struct CoverOutput<'a> {
    method: &'a str,
    covering: &'a Covering,
    #[serde(skip_serializing_if = "Option::is_none")]
    nagata_n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    nagata_c: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    whitney: Option<WhitneyParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    padded: Option<&'a PaddedReport>,
}

/// The `(n, α, δ, γ)` block Whitney covers carry for downstream `extend`.
#[derive(Debug, Serialize, Deserialize)]
pub struct WhitneyParams {
    pub n: usize,
    pub alpha: f64,
    pub delta: f64,
    pub gamma: f64,
    pub r: f64,
}

#[derive(Debug)]
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn input(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: msg.into(),
        }
    }

    fn property(msg: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PROPERTY,
            message: msg.into(),
        }
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I>(args: I) -> i32
where
    I: IntoIterator<Item = String>,
{
    configure_threads();
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            // clap prints help/version through the error display.
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { 0 };
        }
    };
    match dispatch(cli) {
        Ok(()) => 0,
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

fn configure_threads() {
    if let Ok(v) = std::env::var("LIPEXT_THREADS") {
        if let Ok(k) = v.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build_global();
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Validate { input } => cmd_validate(&input),
        Command::Cover {
            input,
            method,
            scale,
            r,
            mode,
            domain,
            budget,
            out,
        } => cmd_cover(
            &input,
            method,
            scale,
            r,
            mode.as_deref(),
            domain.as_deref(),
            budget,
            out.as_deref(),
        ),
        Command::Extend {
            input,
            method,
            map,
            domain,
            r,
            seed,
            extensor,
            out,
            csv,
            weights_csv,
        } => cmd_extend(
            &input,
            method,
            &map,
            domain.as_deref(),
            r,
            seed,
            extensor,
            out.as_deref(),
            csv.as_deref(),
            weights_csv.as_deref(),
        ),
        Command::Certify { input, result } => cmd_certify(&input, &result),
        Command::Constants { cn } => cmd_constants(cn),
        Command::Selftest { seed } => cmd_selftest(seed),
    }
}

fn read_json<T: for<'de> Deserialize<'de>>(path: &Path, what: &str) -> Result<T, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::input(format!("{}: cannot read {what}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Failure::input(format!("{}: invalid {what}: {e}", path.display())))
}

/// Loads a space file; returns the cloud too when coordinates were given.
fn load_space(path: &Path) -> Result<(FiniteMetricSpace, Option<PointCloud>), Failure> {
    let file: SpaceFile = read_json(path, "space file")?;
    match file {
        SpaceFile::Matrix { points, dist } => {
            let space = match points {
                Some(ids) => FiniteMetricSpace::validate_labelled(ids, dist),
                None => FiniteMetricSpace::validate(dist),
            }
            .map_err(|e| Failure::input(format!("{}: field 'dist': {e}", path.display())))?;
            Ok((space, None))
        }
        SpaceFile::Cloud { coords, norm } => {
            let cloud = PointCloud::new(coords, norm)
                .map_err(|e| Failure::input(format!("{}: field 'coords': {e}", path.display())))?;
            let space = cloud
                .to_space()
                .map_err(|e| Failure::input(format!("{}: field 'coords': {e}", path.display())))?;
            Ok((space, Some(cloud)))
        }
    }
}

fn load_domain(path: &Path, space: &FiniteMetricSpace) -> Result<Subset, Failure> {
    let file: DomainFile = read_json(path, "domain file")?;
    Subset::from_unsorted(space.len(), file.domain)
        .map_err(|e| Failure::input(format!("{}: field 'domain': {e}", path.display())))
}

fn load_map(path: &Path, space: &FiniteMetricSpace) -> Result<PartialLipschitzMap, Failure> {
    let file: MapFile = read_json(path, "map file")?;
    let domain = Subset::from_unsorted(space.len(), file.domain)
        .map_err(|e| Failure::input(format!("{}: field 'domain': {e}", path.display())))?;
    let dim = file.values.first().map(|v| v.len()).unwrap_or(1);
    let norm = file.norm.unwrap_or(Norm::L2);
    PartialLipschitzMap::from_vectors(space, domain, file.values, NormedSpace::new(dim, norm))
        .map_err(|e| Failure::input(format!("{}: field 'values': {e}", path.display())))
}

fn write_text(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::input(format!("{}: cannot write: {e}", path.display())))
}

fn json_pretty<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable output");
    s.push('\n');
    s
}

/// `x` with 12 significant digits, `.` as the decimal separator.
pub fn fmt_sig(x: f64) -> String {
    format!("{x:.11e}")
}

fn cmd_validate(input: &Path) -> Result<(), Failure> {
    let (space, cloud) = load_space(input)?;
    let kind = if cloud.is_some() {
        "point cloud"
    } else {
        "distance matrix"
    };
    println!(
        "valid {kind}: {} points, diameter {}",
        space.len(),
        fmt_sig(space.diameter())
    );
    Ok(())
}

fn parse_mode(mode: Option<&str>) -> Result<PartitionMode, Failure> {
    match mode {
        None | Some("enumerate") => Ok(PartitionMode::Enumerate),
        Some(s) => {
            let parts: Vec<&str> = s.split(':').collect();
            if parts.len() == 3 && parts[0] == "sample" {
                let count = parts[1]
                    .parse()
                    .map_err(|_| Failure::input(format!("flag --mode: bad count in '{s}'")))?;
                let seed = parts[2]
                    .parse()
                    .map_err(|_| Failure::input(format!("flag --mode: bad seed in '{s}'")))?;
                Ok(PartitionMode::Sample { count, seed })
            } else {
                Err(Failure::input(format!(
                    "flag --mode: expected 'enumerate' or 'sample:COUNT:SEED', got '{s}'"
                )))
            }
        }
    }
}

fn whitney_params(cover: &WhitneyCovering, r: f64) -> WhitneyParams {
    WhitneyParams {
        n: cover.multiplicity_param,
        alpha: cover.alpha,
        delta: cover.delta,
        gamma: cover.gamma,
        r,
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_cover(
    input: &Path,
    method: CoverMethod,
    scale: Option<f64>,
    r: Option<f64>,
    mode: Option<&str>,
    domain: Option<&Path>,
    budget: Option<usize>,
    out: Option<&Path>,
) -> Result<(), Failure> {
    let (space, cloud) = load_space(input)?;
    let need_scale =
        || scale.ok_or_else(|| Failure::input("flag --scale is required for this method"));
    let need_cloud = |c: &Option<PointCloud>| {
        c.clone().ok_or_else(|| {
            Failure::input(format!(
                "{}: this method needs a point-cloud space (field 'coords')",
                input.display()
            ))
        })
    };
    let (text, summary) = match method {
        CoverMethod::Grid => {
            let s = need_scale()?;
            let cloud = need_cloud(&cloud)?;
            let g = grid_cover(&cloud, s).map_err(|e| Failure::property(e.to_string()))?;
            let report = verify_nagata_with_budget(
                &space,
                &g.covering,
                s,
                g.nagata_n,
                g.nagata_c,
                budget.unwrap_or(DEFAULT_BLOCK_BUDGET),
            )
            .map_err(|e| match e {
                crate::covering::CoveringError::SearchBudgetExceeded { .. } => {
                    Failure::input(format!("{e}; raise --budget for larger instances"))
                }
                other => Failure::property(other.to_string()),
            })?;
            if !report.holds {
                return Err(Failure::property(format!(
                    "grid cover failed its own Nagata certificate: multiplicity {} (bound {})",
                    report.multiplicity.multiplicity, report.multiplicity_bound
                )));
            }
            let outdoc = CoverOutput {
                method: "grid",
                covering: &g.covering,
                nagata_n: Some(g.nagata_n),
                nagata_c: Some(g.nagata_c),
                whitney: None,
                padded: None,
            };
            (
                json_pretty(&outdoc),
                format!(
                    "grid cover: {} blocks, certifies Nagata({}, {})",
                    g.covering.blocks.len(),
                    g.nagata_n,
                    g.nagata_c
                ),
            )
        }
        CoverMethod::Colored => {
            let s = need_scale()?;
            let cloud = need_cloud(&cloud)?;
            let base_cover = grid_cover(&cloud, s).map_err(|e| Failure::property(e.to_string()))?;
            let (n, c) = (base_cover.nagata_n, base_cover.nagata_c);
            let sigma2 = 2.0 * (n as f64 + 2.0) * s;
            let base = grid_cover(&cloud, sigma2).map_err(|e| Failure::property(e.to_string()))?;
            let colored = colored_cover(&space, s, n, c, &base.covering)
                .map_err(|e| Failure::property(e.to_string()))?;
            let outdoc = CoverOutput {
                method: "colored",
                covering: &colored,
                nagata_n: Some(n),
                nagata_c: Some(c),
                whitney: None,
                padded: None,
            };
            (
                json_pretty(&outdoc),
                format!(
                    "colored cover: {} blocks in {} colors, separation > {}",
                    colored.blocks.len(),
                    n + 1,
                    fmt_sig(s)
                ),
            )
        }
        CoverMethod::Padded => {
            let d = need_scale()?;
            let mode = parse_mode(mode)?;
            let partition = iterative_ball_partition(&space, d, mode)
                .map_err(|e| Failure::property(e.to_string()))?;
            let report = if partition.is_enumerated() {
                let rep = padded_ratio_check(&space, &partition)
                    .map_err(|e| Failure::property(e.to_string()))?;
                if !rep.holds {
                    let bad = rep.points.iter().find(|p| !p.holds).expect("failing point");
                    return Err(Failure::property(format!(
                        "padded ratio inequality failed at point {}: deep {}/{} < balls {}/{}",
                        bad.point,
                        bad.deep_count,
                        bad.containing_count,
                        bad.ball_pad,
                        bad.ball_outer
                    )));
                }
                Some(rep)
            } else {
                None
            };
            let outdoc = CoverOutput {
                method: "padded",
                covering: &partition.covering,
                nagata_n: None,
                nagata_c: None,
                whitney: None,
                padded: report.as_ref(),
            };
            (
                json_pretty(&outdoc),
                format!(
                    "padded partition: {} distinct blocks over {} permutations{}",
                    partition.covering.blocks.len(),
                    partition.permutations,
                    if report.is_some() {
                        ", ratio inequality verified"
                    } else {
                        ""
                    }
                ),
            )
        }
        CoverMethod::Whitney | CoverMethod::WhitneyRefined => {
            let domain_path = domain
                .ok_or_else(|| Failure::input("flag --domain is required for Whitney covers"))?;
            let a = load_domain(domain_path, &space)?;
            let grid_oracle = cloud.as_ref().map(|c| GridOracle::new(c, a.clone()));
            let singleton = SingletonOracle::new(&space, a.clone());
            let oracle: &dyn NagataOracle = match &grid_oracle {
                Some(g) => g,
                None => &singleton,
            };
            let (cover, r_used, name) = match method {
                CoverMethod::Whitney => {
                    let r_used = r.unwrap_or_else(default_basic_r);
                    let cover = build_whitney_cover(&space, &a, r_used, oracle)
                        .map_err(|e| Failure::property(e.to_string()))?;
                    (cover, r_used, "whitney")
                }
                _ => {
                    let r_used = r.unwrap_or_else(|| {
                        default_refined_r(oracle.nagata_n() + 1, oracle.nagata_c())
                    });
                    let cover = build_refined_whitney_cover(&space, &a, r_used, oracle)
                        .map_err(|e| Failure::property(e.to_string()))?;
                    (cover, r_used, "whitney-refined")
                }
            };
            let outdoc = CoverOutput {
                method: name,
                covering: &cover.covering,
                nagata_n: Some(oracle.nagata_n()),
                nagata_c: Some(oracle.nagata_c()),
                whitney: Some(whitney_params(&cover, r_used)),
                padded: None,
            };
            (
                json_pretty(&outdoc),
                format!(
                    "{name} cover: {} blocks, Whitney({}, {}, {}, {})",
                    cover.covering.blocks.len(),
                    cover.multiplicity_param,
                    fmt_sig(cover.alpha),
                    fmt_sig(cover.delta),
                    fmt_sig(cover.gamma)
                ),
            )
        }
    };
    match out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    println!("{summary}");
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn cmd_extend(
    input: &Path,
    method: ExtendMethod,
    map: &Path,
    domain: Option<&Path>,
    r: Option<f64>,
    seed: Option<u64>,
    extensor: ExtensorArg,
    out: Option<&Path>,
    csv: Option<&Path>,
    weights_csv: Option<&Path>,
) -> Result<(), Failure> {
    let started = std::time::Instant::now();
    let (space, cloud) = load_space(input)?;
    let f = load_map(map, &space)?;
    if let Some(domain_path) = domain {
        let a = load_domain(domain_path, &space)?;
        if a != f.domain {
            return Err(Failure::input(format!(
                "{}: field 'domain' disagrees with the map's domain",
                domain_path.display()
            )));
        }
    }
    let grid_oracle = cloud.as_ref().map(|c| GridOracle::new(c, f.domain.clone()));
    let singleton = SingletonOracle::new(&space, f.domain.clone());
    let oracle: &dyn NagataOracle = match &grid_oracle {
        Some(g) => g,
        None => &singleton,
    };
    let mut anchors = None;
    let mut lee_naor = None;
    let mut nerve_dimension = None;
    let mut extensor_constant = None;
    let mut nagata = None;
    let mut weights_export: Option<String> = None;
    let result = match method {
        ExtendMethod::Mcshane => {
            mcshane_extend(&space, &f).map_err(|e| Failure::property(e.to_string()))?
        }
        ExtendMethod::Whitney => {
            let ext = whitney_extend(&space, &f, r.unwrap_or_else(default_basic_r), oracle)
                .map_err(|e| Failure::property(e.to_string()))?;
            anchors = Some(ext.anchors);
            nagata = Some((oracle.nagata_n(), oracle.nagata_c()));
            weights_export = ext.pou.as_ref().map(|p| p.weights_csv());
            ext.result
        }
        ExtendMethod::Leenaor => {
            let seed = seed.ok_or_else(|| {
                Failure::input("flag --seed is mandatory for the sampled multiscale method")
            })?;
            let ext =
                lee_naor_extend(&space, &f, seed).map_err(|e| Failure::property(e.to_string()))?;
            lee_naor = Some(ext.diagnostics);
            ext.result
        }
        ExtendMethod::Nerve => {
            let cover =
                build_whitney_cover(&space, &f.domain, r.unwrap_or_else(default_basic_r), oracle)
                    .map_err(|e| Failure::property(e.to_string()))?;
            let kind = match extensor {
                ExtensorArg::Barycentric => ExtensorKind::Barycentric,
                ExtensorArg::Skeletal => ExtensorKind::Skeletal,
            };
            let ext = nerve_extend(&space, &f, &cover, kind)
                .map_err(|e| Failure::property(e.to_string()))?;
            weights_export = crate::partition::build_partition(&space, &cover)
                .ok()
                .map(|p| p.weights_csv());
            anchors = Some(ext.anchors);
            nerve_dimension = Some(ext.nerve_dimension);
            extensor_constant = Some(ext.extensor_constant);
            nagata = Some((oracle.nagata_n(), oracle.nagata_c()));
            ext.result
        }
    };
    if !result.within_bound {
        return Err(Failure::property(format!(
            "certified constant {} exceeds the construction bound {} (witness pair {:?})",
            result.certificate.constant, result.bound_effective, result.certificate.witness
        )));
    }
    let target = f
        .target
        .as_normed()
        .expect("extensions are into normed targets")
        .clone();
    let report = ReportRow {
        instance: input.display().to_string(),
        method: result.method,
        nagata_n: nagata.map(|(n, _)| n),
        nagata_c: nagata.map(|(_, c)| c),
        lip_f: result.lip_f,
        lip_ff: result.certificate.constant,
        paper_bound: result.bound_effective,
        margin: result.bound_effective - result.certificate.constant,
        runtime_ms: started.elapsed().as_millis(),
    };
    println!(
        "{} | LipF={} | Lipf={} | bound={} | margin={}",
        match result.method {
            Method::McShane => "mcshane",
            Method::Whitney => "whitney",
            Method::LeeNaor => "leenaor",
            Method::Nerve => "nerve",
        },
        fmt_sig(report.lip_ff),
        fmt_sig(report.lip_f),
        fmt_sig(report.paper_bound),
        fmt_sig(report.margin),
    );
    if let Some(weights_path) = weights_csv {
        match &weights_export {
            Some(text) => write_text(weights_path, text)?,
            None => {
                return Err(Failure::input(
                    "flag --weights-csv: this method has no partition of unity",
                ))
            }
        }
    }
    if let Some(csv_path) = csv {
        let mut text = String::from("point,id");
        for d in 0..target.dim {
            text.push_str(&format!(",v{d}"));
        }
        text.push('\n');
        for (i, v) in result.values.iter().enumerate() {
            text.push_str(&format!("{i},{}", space.point_ids()[i]));
            for x in v {
                text.push(',');
                text.push_str(&fmt_sig(*x));
            }
            text.push('\n');
        }
        write_text(csv_path, &text)?;
    }
    let outdoc = ExtendOutput {
        target,
        result,
        report,
        anchors,
        lee_naor,
        nerve_dimension,
        extensor_constant,
    };
    let text = json_pretty(&outdoc);
    match out {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_certify(input: &Path, result_path: &Path) -> Result<(), Failure> {
    let (space, _) = load_space(input)?;
    let doc: ExtendOutput = read_json(result_path, "result file")?;
    let recomputed: LipschitzCertificate = certify_values(&space, &doc.target, &doc.result.values)
        .map_err(|e| Failure::input(format!("{}: field 'values': {e}", result_path.display())))?;
    println!(
        "recomputed constant {} with witness ({}, {}) over {} pairs",
        fmt_sig(recomputed.constant),
        recomputed.witness.0,
        recomputed.witness.1,
        recomputed.pair_count
    );
    let stored = &doc.result.certificate;
    if (recomputed.constant - stored.constant).abs() > 1e-12 * recomputed.constant.abs().max(1.0) {
        return Err(Failure::property(format!(
            "stored certificate {} disagrees with recomputation {}",
            stored.constant, recomputed.constant
        )));
    }
    if recomputed.constant > doc.result.bound_effective + crate::tol::CERT_SLACK {
        return Err(Failure::property(format!(
            "recomputed constant {} exceeds the stored bound {}",
            recomputed.constant, doc.result.bound_effective
        )));
    }
    println!(
        "certificate confirmed; bound margin {}",
        fmt_sig(doc.result.bound_effective - recomputed.constant)
    );
    Ok(())
}

fn cmd_constants(cn: usize) -> Result<(), Failure> {
    let c = sphere_constant(cn).map_err(|e| Failure::input(e.to_string()))?;
    println!("c_{cn} = {c:.6}");
    Ok(())
}

fn cmd_selftest(seed: u64) -> Result<(), Failure> {
    let results = selftest::run_all(seed);
    for r in &results {
        println!("{}", r.line());
    }
    if selftest::all_passed(&results) {
        println!(
            "selftest: all {} criteria passed (seed {seed})",
            results.len()
        );
        Ok(())
    } else {
        let failed = results.iter().filter(|r| !r.passed).count();
        Err(Failure::property(format!(
            "{failed} acceptance criterion(s) failed"
        )))
    }
}
