//! `mframes`: reproducible experiment runner.
//!
//! Subcommands: `bounds`, `partition`, `frame`, `besov`, `reconstruct`.
//! Every run reads a single JSON config, writes CSV + JSON reports into the
//! output directory, and embeds the SHA-256 of the config bytes (plus the
//! seed) in every file, so outputs are bit-stable for identical inputs.
//!
//! Exit codes: 0 success, 2 constraint or admissibility failure,
//! 3 non-convergence, 1 anything else.

mod config;

use clap::{Parser, Subcommand};
use config::ExperimentConfig;
use manifold_frames::besov::{
    equivalence_experiment, lp_norm, min_l, seq_norm, standard_suite, synthesis_experiment,
    BesovError, BesovParams, Exponent,
};
use manifold_frames::filters::{build_lp_window, calderon_constant, daubechies_bounds, TERM_TOL};
use manifold_frames::frames::{build_frame, FrameError, FrameSystem};
use manifold_frames::partition::{build_multiscale, validate, PartitionError};
use manifold_frames::spectral::{SpectralFunction, SpectralModel};
use serde::Serialize;
use sha2::{Digest, Sha256};
use std::path::{Path, PathBuf};
use std::sync::Arc;

#[derive(Parser)]
#[command(name = "mframes", about = "Spectral frames on compact manifolds: experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `out_dir` from the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed override for the deterministic test-function suite.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Calderón constant and Daubechies bounds for each configured dilation.
    Bounds,
    /// Build and validate the multiscale partition; export it as JSON.
    Partition,
    /// Empirical frame bounds and Q-S distance for each configured b.
    Frame,
    /// Norm-equivalence experiments over the standard suite.
    Besov,
    /// Frame-expansion reconstruction experiments.
    Reconstruct,
}

enum CliError {
    Other(String),
    Constraint(String),
    NonConvergence(String),
}

impl CliError {
    fn exit_code(&self) -> i32 {
        match self {
            CliError::Other(_) => 1,
            CliError::Constraint(_) => 2,
            CliError::NonConvergence(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Other(m) | CliError::Constraint(m) | CliError::NonConvergence(m) => m,
        }
    }
}

impl From<PartitionError> for CliError {
    fn from(e: PartitionError) -> Self {
        match &e {
            PartitionError::ConstraintViolation { .. } | PartitionError::ScaleUnresolved { .. } => {
                CliError::Constraint(e.to_string())
            }
            PartitionError::BadParams(_) => CliError::Other(e.to_string()),
        }
    }
}

impl From<FrameError> for CliError {
    fn from(e: FrameError) -> Self {
        match &e {
            FrameError::NotConverged { .. } => CliError::NonConvergence(e.to_string()),
            _ => CliError::Other(e.to_string()),
        }
    }
}

impl From<BesovError> for CliError {
    fn from(e: BesovError) -> Self {
        match e {
            BesovError::AdmissibilityViolation { .. } => CliError::Constraint(e.to_string()),
            BesovError::Frame(inner) => inner.into(),
            other => CliError::Other(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Other(format!("io error: {e}"))
    }
}

/// Everything a command needs: config, model, provenance stamp, output dir.
struct Session {
    config: ExperimentConfig,
    model: Arc<SpectralModel>,
    out_dir: PathBuf,
    config_sha256: String,
    seed: u64,
}

impl Session {
    fn open(cli: &Cli) -> Result<Self, CliError> {
        let config_path = cli
            .config
            .as_ref()
            .ok_or_else(|| CliError::Other("--config <path> is required".into()))?;
        let bytes = std::fs::read(config_path)
            .map_err(|e| CliError::Other(format!("cannot read {}: {e}", config_path.display())))?;
        let config_sha256 = hex::encode(Sha256::digest(&bytes));
        let config: ExperimentConfig = serde_json::from_slice(&bytes)
            .map_err(|e| CliError::Other(format!("bad config: {e}")))?;
        let config_dir = config_path.parent().unwrap_or(Path::new(".")).to_path_buf();
        let model = Arc::new(config.build_model(&config_dir).map_err(CliError::Other)?);
        let seed = cli.seed.unwrap_or(config.seed);
        let out_dir = cli
            .out
            .clone()
            .or_else(|| config.out_dir.clone())
            .unwrap_or_else(|| PathBuf::from("out"));
        std::fs::create_dir_all(&out_dir)?;
        Ok(Session { config, model, out_dir, config_sha256, seed })
    }

    fn frame_for(&self, b: f64, params_override: Option<(i32, i32)>) -> Result<FrameSystem, CliError> {
        let spec = self.config.filter_spec().map_err(CliError::Other)?;
        let mut params = self.config.partition_params(&self.model, &spec, b)?;
        if let Some((lo, hi)) = params_override {
            params.j_min = lo;
            params.j_max = hi;
        }
        let partition = build_multiscale(&self.model, &params)?;
        Ok(build_frame(&self.model, spec, partition)?)
    }

    fn write_json<T: Serialize>(&self, name: &str, payload: &T) -> Result<(), CliError> {
        let doc = Stamped {
            config_sha256: &self.config_sha256,
            seed: self.seed,
            payload,
        };
        let text = serde_json::to_string_pretty(&doc)
            .map_err(|e| CliError::Other(format!("serialization: {e}")))?;
        std::fs::write(self.out_dir.join(name), text + "\n")?;
        println!("wrote {}", self.out_dir.join(name).display());
        Ok(())
    }

    fn write_csv(&self, name: &str, header: &str, rows: &[String]) -> Result<(), CliError> {
        let mut text = format!(
            "# config_sha256={} seed={}\n{header}\n",
            self.config_sha256, self.seed
        );
        for row in rows {
            text.push_str(row);
            text.push('\n');
        }
        std::fs::write(self.out_dir.join(name), text)?;
        println!("wrote {}", self.out_dir.join(name).display());
        Ok(())
    }
}

#[derive(Serialize)]
struct Stamped<'a, T: Serialize> {
    config_sha256: &'a str,
    seed: u64,
    #[serde(flatten)]
    payload: &'a T,
}

#[derive(Serialize)]
struct BoundsRow {
    a: f64,
    l: u32,
    c: f64,
    #[serde(rename = "A")]
    lower: f64,
    #[serde(rename = "B")]
    upper: f64,
    ratio: f64,
}

fn cmd_bounds(session: &Session) -> Result<(), CliError> {
    let mut rows = Vec::new();
    let mut csv = Vec::new();
    for a in session.config.a_sweep() {
        let spec = manifold_frames::filters::FilterSpec::new(
            session.config.filter.family,
            session.config.filter.l,
            a,
        )
        .map_err(|e| CliError::Other(e.to_string()))?;
        let c = calderon_constant(&spec).map_err(|e| CliError::Other(e.to_string()))?;
        let b = daubechies_bounds(&spec, TERM_TOL).map_err(|e| CliError::Other(e.to_string()))?;
        csv.push(format!("{a},{},{c},{},{},{}", spec.l(), b.lower, b.upper, b.ratio()));
        rows.push(BoundsRow { a, l: spec.l(), c, lower: b.lower, upper: b.upper, ratio: b.ratio() });
    }
    session.write_csv("bounds.csv", "a,l,c,A,B,ratio", &csv)?;
    session.write_json("bounds.json", &Rows { rows })
}

#[derive(Serialize)]
struct Rows<T: Serialize> {
    rows: Vec<T>,
}

fn cmd_partition(session: &Session) -> Result<(), CliError> {
    let spec = session.config.filter_spec().map_err(CliError::Other)?;
    let params =
        session.config.partition_params(&session.model, &spec, session.config.partition.b)?;
    let partition = build_multiscale(&session.model, &params)?;
    let report = validate(&session.model, &partition);
    session.write_json("partition.json", &partition.export())?;
    session.write_json("partition_validation.json", &report)?;
    let csv: Vec<String> = report
        .levels
        .iter()
        .map(|l| {
            format!(
                "{},{},{},{},{},{}",
                l.j, l.scale, l.cell_count, l.worst_diameter_ratio, l.worst_measure_ratio,
                l.measure_branch
            )
        })
        .collect();
    session.write_csv(
        "partition_levels.csv",
        "j,scale,cell_count,worst_diameter_ratio,worst_measure_ratio,measure_branch",
        &csv,
    )
}

#[derive(Serialize)]
struct FrameRow {
    #[serde(flatten)]
    report: manifold_frames::frames::FrameBoundsReport,
    ratio: f64,
    qs_distance: f64,
    /// `||S(1)||`; exactly zero for zero-mean atoms.
    s_const_residual: f64,
}

fn cmd_frame(session: &Session) -> Result<(), CliError> {
    let spec = session.config.filter_spec().map_err(CliError::Other)?;
    let daub = daubechies_bounds(&spec, TERM_TOL).map_err(|e| CliError::Other(e.to_string()))?;
    let sweep = session.config.b_sweep();
    // A shared level range keeps rows comparable; the tightest (smallest) b
    // constrains the resolvable bottom.
    let b_bind = sweep.iter().cloned().fold(f64::INFINITY, f64::min);
    let shared = session.config.partition_params(&session.model, &spec, b_bind)?;
    let mut rows = Vec::new();
    let mut csv = Vec::new();
    for &b in &sweep {
        let frame = session.frame_for(b, Some((shared.j_min, shared.j_max)))?;
        let bounds = frame.empirical_frame_bounds()?;
        let qs = frame.q_s_distance()?;
        let n = session.model.n_eig();
        let mut constant = SpectralFunction::zeros(n);
        constant.coeffs_mut()[0] = 1.0;
        let s_const = frame.apply_s(&constant)?.norm();
        let report = manifold_frames::frames::FrameBoundsReport {
            a_emp: bounds.lower,
            b_emp: bounds.upper,
            a_daub: daub.lower,
            b_daub: daub.upper,
            b,
            a: spec.a(),
            j_range: frame.j_range(),
        };
        csv.push(format!(
            "{b},{},{},{},{},{},{},{},{},{},{s_const}",
            spec.a(),
            shared.j_min,
            shared.j_max,
            bounds.lower,
            bounds.upper,
            bounds.ratio(),
            daub.lower,
            daub.upper,
            qs
        ));
        rows.push(FrameRow { report, ratio: bounds.ratio(), qs_distance: qs, s_const_residual: s_const });
    }
    session.write_csv(
        "frame.csv",
        "b,a,j_min,j_max,A_emp,B_emp,ratio,A_daub,B_daub,qs_distance,s_const_residual",
        &csv,
    )?;
    session.write_json("frame.json", &Rows { rows })
}

fn precheck_admissibility(session: &Session) -> Result<(), CliError> {
    let l = session.config.filter.l;
    for params in &session.config.besov {
        let required = min_l(params, session.model.dim());
        if l < required {
            return Err(BesovError::AdmissibilityViolation { required_l: required, actual_l: l }
                .into());
        }
    }
    Ok(())
}

fn cmd_besov(session: &Session) -> Result<(), CliError> {
    precheck_admissibility(session)?;
    let frame = session.frame_for(session.config.partition.b, None)?;
    let window = build_lp_window(session.model.lambda_max());
    let suite = standard_suite(&session.model, frame.spec(), session.seed);
    let mut reports = Vec::new();
    let mut csv = Vec::new();
    for params in &session.config.besov {
        let rep = equivalence_experiment(&session.model, &frame, &window, params, &suite)?;
        for f in &rep.per_function {
            csv.push(format!(
                "{},{},{},{},{},{},{},{},{}",
                params.alpha, params.p, params.q, rep.l, rep.b, f.name, f.seq_norm, f.lp_norm,
                f.ratio
            ));
        }
        reports.push(rep);
    }
    session.write_csv(
        "besov.csv",
        "alpha,p,q,l,b,function,seq_norm,lp_norm,ratio",
        &csv,
    )?;
    session.write_json("besov.json", &Rows { rows: reports })?;
    harmonic_sweep(session, &frame, &window)
}

#[derive(Serialize)]
struct SweepRow {
    degree: usize,
    lambda: f64,
    lp_norm: f64,
    seq_norm: f64,
    ratio: f64,
}

/// Zonal-harmonic degree sweep (sphere backend only): `lp_norm` against the
/// eigenvalue on a log-log axis has slope `alpha/2` for `p = q = 2`.
fn harmonic_sweep(
    session: &Session,
    frame: &FrameSystem,
    window: &manifold_frames::filters::LpWindow,
) -> Result<(), CliError> {
    let l_max = match session.config.backend {
        config::BackendConfig::Sphere { l_max, .. } => l_max,
        _ => return Ok(()),
    };
    if l_max < 6 {
        return Ok(());
    }
    let params = BesovParams { alpha: 1.0, p: Exponent::Finite(2.0), q: Exponent::Finite(2.0) };
    let mut rows = Vec::new();
    let mut csv = Vec::new();
    for degree in 4..=l_max {
        let idx = degree * degree;
        let lambda = session.model.eigenvalue(idx);
        let f = SpectralFunction::basis(session.model.n_eig(), idx);
        let ln = lp_norm(&session.model, window, &f, &params)?;
        let sn = seq_norm(&frame.analyze(&f)?, &params, frame.spec().a());
        csv.push(format!("{degree},{lambda},{ln},{sn},{}", sn / ln));
        rows.push(SweepRow { degree, lambda, lp_norm: ln, seq_norm: sn, ratio: sn / ln });
    }
    let slope = {
        let pts: Vec<(f64, f64)> =
            rows.iter().map(|r| (r.lambda.ln(), r.lp_norm.ln())).collect();
        let n = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
        let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
        cov / var
    };
    session.write_csv("harmonic_sweep.csv", "degree,lambda,lp_norm,seq_norm,ratio", &csv)?;
    session.write_json("harmonic_sweep.json", &SweepDoc { slope, alpha: params.alpha, rows })
}

#[derive(Serialize)]
struct SweepDoc {
    slope: f64,
    alpha: f64,
    rows: Vec<SweepRow>,
}

#[derive(Serialize)]
struct ReconstructRow {
    alpha: f64,
    p: Exponent,
    q: Exponent,
    function: String,
    residual_rel: f64,
    seq_norm: f64,
    iterations: usize,
}

fn cmd_reconstruct(session: &Session) -> Result<(), CliError> {
    precheck_admissibility(session)?;
    let frame = session.frame_for(session.config.partition.b, None)?;
    let suite = standard_suite(&session.model, frame.spec(), session.seed);
    let mut rows = Vec::new();
    let mut csv = Vec::new();
    for params in &session.config.besov {
        for (name, f) in &suite {
            let rep = synthesis_experiment(&frame, params, f, 1e-7, 200)?;
            csv.push(format!(
                "{},{},{},{name},{},{},{}",
                params.alpha, params.p, params.q, rep.residual_rel, rep.seq_norm, rep.iterations
            ));
            rows.push(ReconstructRow {
                alpha: params.alpha,
                p: params.p,
                q: params.q,
                function: name.clone(),
                residual_rel: rep.residual_rel,
                seq_norm: rep.seq_norm,
                iterations: rep.iterations,
            });
        }
    }
    session.write_csv(
        "reconstruct.csv",
        "alpha,p,q,function,residual_rel,seq_norm,iterations",
        &csv,
    )?;
    session.write_json("reconstruct.json", &Rows { rows })
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let session = Session::open(cli)?;
    match cli.command {
        Command::Bounds => cmd_bounds(&session),
        Command::Partition => cmd_partition(&session),
        Command::Frame => cmd_frame(&session),
        Command::Besov => cmd_besov(&session),
        Command::Reconstruct => cmd_reconstruct(&session),
    }
}

fn main() {
    let cli = Cli::parse();
    if let Err(err) = run(&cli) {
        eprintln!("error: {}", err.message());
        std::process::exit(err.exit_code());
    }
}
