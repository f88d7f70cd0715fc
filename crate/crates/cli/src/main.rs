use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Parser};
use sgmres::io::experiment::{
    exit_code, parse_method, run_experiment, ExperimentSpec, ProblemSpec, RhsSpec,
};
use sgmres::{PreconditionerKind, SketchKind, SolveConfig, UNIT_ROUNDOFF};

/// Runs sketched GMRES experiments and writes per-iteration CSV traces.
#[derive(Parser, Debug)]
#[command(name = "sgmres", version)]
#[command(group(ArgGroup::new("problem").required(true).args(["matrix", "randsvd", "diag", "sprand"])))]
struct Cli {
    /// Matrix Market coordinate file.
    #[arg(long, value_name = "PATH")]
    matrix: Option<PathBuf>,
    /// Dense matrix with geometric singular values.
    #[arg(long, value_name = "N,KAPPA,SEED")]
    randsvd: Option<String>,
    /// Diagonal matrix with linearly spaced entries.
    #[arg(long, value_name = "N,LO,HI")]
    diag: Option<String>,
    /// Sparse diagonally dominant random matrix.
    #[arg(long, value_name = "N,DENSITY,SEED")]
    sprand: Option<String>,
    /// random:<seed>, file:<path> or sv:<k>.
    #[arg(long, default_value = "random:0")]
    rhs: String,
    /// Comma-separated list of mgs, strunc, sssa.
    #[arg(long, default_value = "strunc", value_delimiter = ',')]
    method: Vec<String>,
    #[arg(long, default_value_t = 50)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    t: usize,
    /// Sketch dimension; default 2(m+1).
    #[arg(long)]
    s: Option<usize>,
    #[arg(long, default_value_t = 1)]
    nrestarts: usize,
    /// identity, gaussian or srht.
    #[arg(long, default_value = "srht")]
    sketch: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    adaptive: bool,
    /// Adaptive trigger tolerance; default 2^-53.
    #[arg(long)]
    tol_tau: Option<f64>,
    #[arg(long, default_value_t = 1e-10)]
    tol_stop: f64,
    /// Epsilon used for the bound proxies in the summary.
    #[arg(long, default_value_t = 0.5)]
    eps_display: f64,
    /// none, jacobi or ilu0 (left preconditioner).
    #[arg(long, default_value = "none")]
    precond: String,
    #[arg(long, default_value = "trace.csv")]
    out: PathBuf,
}

fn spec_from(cli: Cli) -> sgmres::Result<ExperimentSpec> {
    let problem = if let Some(path) = cli.matrix {
        ProblemSpec::MmFile(path)
    } else if let Some(s) = &cli.randsvd {
        ProblemSpec::parse_randsvd(s)?
    } else if let Some(s) = &cli.diag {
        ProblemSpec::parse_diag(s)?
    } else {
        ProblemSpec::parse_sprand(cli.sprand.as_deref().expect("clap enforces one problem"))?
    };
    let rhs: RhsSpec = cli.rhs.parse()?;
    let sketch_kind: SketchKind = cli.sketch.parse()?;
    let preconditioner: PreconditionerKind = cli.precond.parse()?;
    let methods = cli
        .method
        .iter()
        .map(|name| {
            Ok(SolveConfig {
                m: cli.m,
                t: cli.t,
                nrestarts: cli.nrestarts,
                sketch_kind,
                s: cli.s,
                seed: cli.seed,
                basis: parse_method(name.trim())?,
                tol_stop: cli.tol_stop,
                tol_tau: cli.tol_tau.unwrap_or(UNIT_ROUNDOFF),
                adaptive: cli.adaptive,
                x0: None,
            })
        })
        .collect::<sgmres::Result<Vec<_>>>()?;
    let mut spec = ExperimentSpec::new(problem, rhs, methods, cli.out);
    spec.preconditioner = preconditioner;
    spec.eps_display = cli.eps_display;
    Ok(spec)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result =
        spec_from(cli).and_then(|spec| run_experiment(&spec, &mut std::io::stdout().lock()));
    match result {
        Ok(_) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
