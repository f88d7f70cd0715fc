//! Experiment specifications and the runner behind the command-line tool.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use crate::basis::BasisKind;
use crate::diagnostics::bound_tracker;
use crate::error::{Error, Result};
use crate::io::csv::{write_error_trace, write_trace};
use crate::io::gen::{gen_diag_range, gen_randsvd, gen_sprand_dd, RandSvd};
use crate::io::mm::read_matrix_market;
use crate::linalg::{vector, SparseMatrixCsr};
use crate::precond::{Preconditioner, PreconditionerKind};
use crate::rng::normal_vector;
use crate::sketch::SketchKind;
use crate::solver::{restarted_gmres, restarted_sgmres, CycleResult, SolveConfig};

#[derive(Clone, Debug, PartialEq)]
pub enum ProblemSpec {
    MmFile(PathBuf),
    RandSvd { n: usize, kappa: f64, seed: u64 },
    DiagRange { n: usize, lo: f64, hi: f64 },
    SprandDd { n: usize, density: f64, seed: u64 },
}

#[derive(Clone, Debug, PartialEq)]
pub enum RhsSpec {
    RandomNormal(u64),
    /// Whitespace-separated values; lines starting with `%` or `#` are skipped.
    File(PathBuf),
    /// Right singular vector `k` (from 1) of a randsvd problem.
    SingularVector(usize),
}

fn split_args<const N: usize>(s: &str, what: &str) -> Result<[String; N]> {
    let parts: Vec<String> = s.split(',').map(|p| p.trim().to_string()).collect();
    parts.try_into().map_err(|_| {
        Error::InvalidConfig(format!(
            "{what} expects {N} comma-separated values, got {s:?}"
        ))
    })
}

fn parse_num<T: FromStr>(s: &str, what: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    s.parse()
        .map_err(|e| Error::InvalidConfig(format!("{what}: bad value {s:?}: {e}")))
}

impl ProblemSpec {
    /// Parses the `n,kappa,seed` argument of `--randsvd`.
    pub fn parse_randsvd(s: &str) -> Result<Self> {
        let [n, kappa, seed] = split_args(s, "randsvd")?;
        Ok(Self::RandSvd {
            n: parse_num(&n, "randsvd n")?,
            kappa: parse_num(&kappa, "randsvd kappa")?,
            seed: parse_num(&seed, "randsvd seed")?,
        })
    }

    /// Parses the `n,lo,hi` argument of `--diag`.
    pub fn parse_diag(s: &str) -> Result<Self> {
        let [n, lo, hi] = split_args(s, "diag")?;
        Ok(Self::DiagRange {
            n: parse_num(&n, "diag n")?,
            lo: parse_num(&lo, "diag lo")?,
            hi: parse_num(&hi, "diag hi")?,
        })
    }

    /// Parses the `n,density,seed` argument of `--sprand`.
    pub fn parse_sprand(s: &str) -> Result<Self> {
        let [n, density, seed] = split_args(s, "sprand")?;
        Ok(Self::SprandDd {
            n: parse_num(&n, "sprand n")?,
            density: parse_num(&density, "sprand density")?,
            seed: parse_num(&seed, "sprand seed")?,
        })
    }
}

impl FromStr for RhsSpec {
    type Err = Error;

    /// `random:<seed>`, `file:<path>` or `sv:<k>`.
    fn from_str(s: &str) -> Result<Self> {
        let (kind, arg) = s.split_once(':').ok_or_else(|| {
            Error::InvalidConfig(format!(
                "rhs {s:?}: expected random:<seed>, file:<path> or sv:<k>"
            ))
        })?;
        match kind {
            "random" => Ok(Self::RandomNormal(parse_num(arg, "rhs seed")?)),
            "file" => Ok(Self::File(PathBuf::from(arg))),
            "sv" => Ok(Self::SingularVector(parse_num(
                arg,
                "rhs singular vector index",
            )?)),
            _ => Err(Error::InvalidConfig(format!("unknown rhs kind {kind:?}"))),
        }
    }
}

/// Short name used in summaries and file names: `mgs`, `strunc` or `sssa`.
pub fn method_label(config: &SolveConfig) -> &'static str {
    match config.basis {
        BasisKind::Mgs => "mgs",
        BasisKind::Truncated => "strunc",
        BasisKind::SketchSelect => "sssa",
    }
}

/// Inverse of [`method_label`].
pub fn parse_method(s: &str) -> Result<BasisKind> {
    match s {
        "mgs" => Ok(BasisKind::Mgs),
        "strunc" => Ok(BasisKind::Truncated),
        "sssa" => Ok(BasisKind::SketchSelect),
        _ => Err(Error::InvalidConfig(format!(
            "unknown method {s:?} (expected mgs, strunc or sssa)"
        ))),
    }
}

#[derive(Clone, Debug)]
pub struct ExperimentSpec {
    pub problem: ProblemSpec,
    pub rhs: RhsSpec,
    /// `BasisKind::Mgs` runs MGS-GMRES; the other kinds run sketched GMRES.
    pub methods: Vec<SolveConfig>,
    /// Trace path. With several methods, method `k` writes `<stem>_<k>_<label>.<ext>`.
    pub output: PathBuf,
    pub preconditioner: PreconditionerKind,
    /// `ε` used for the bound proxies in the summary line.
    pub eps_display: f64,
}

impl ExperimentSpec {
    pub fn new(
        problem: ProblemSpec,
        rhs: RhsSpec,
        methods: Vec<SolveConfig>,
        output: impl Into<PathBuf>,
    ) -> Self {
        Self {
            problem,
            rhs,
            methods,
            output: output.into(),
            preconditioner: PreconditionerKind::Identity,
            eps_display: 0.5,
        }
    }

    pub fn output_path(&self, k: usize) -> PathBuf {
        if self.methods.len() == 1 {
            return self.output.clone();
        }
        let stem = self
            .output
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        let mut name = format!("{stem}_{}_{}", k + 1, method_label(&self.methods[k]));
        if let Some(ext) = self.output.extension() {
            name.push('.');
            name.push_str(&ext.to_string_lossy());
        }
        self.output.with_file_name(name)
    }
}

#[derive(Clone, Debug)]
pub struct MethodOutcome {
    pub label: &'static str,
    pub csv_path: PathBuf,
    /// `Err` holds the message of a solver failure; it is also written to the trace.
    pub result: std::result::Result<CycleResult, String>,
    pub wall_time: Duration,
    pub summary: String,
}

/// Process exit code for an error surfaced by [`run_experiment`]: 1 for I/O, 2 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Io(_) => 1,
        _ => 2,
    }
}

pub struct Problem {
    pub a: SparseMatrixCsr,
    pub randsvd: Option<RandSvd>,
}

pub fn build_problem(spec: &ProblemSpec) -> Result<Problem> {
    Ok(match spec {
        ProblemSpec::MmFile(path) => Problem {
            a: read_matrix_market(path)?,
            randsvd: None,
        },
        ProblemSpec::RandSvd { n, kappa, seed } => {
            let g = gen_randsvd(*n, *kappa, *seed)?;
            Problem {
                a: g.matrix.clone(),
                randsvd: Some(g),
            }
        }
        ProblemSpec::DiagRange { n, lo, hi } => Problem {
            a: gen_diag_range(*n, *lo, *hi)?,
            randsvd: None,
        },
        ProblemSpec::SprandDd { n, density, seed } => Problem {
            a: gen_sprand_dd(*n, *density, *seed)?,
            randsvd: None,
        },
    })
}

pub fn build_rhs(spec: &RhsSpec, problem: &Problem) -> Result<Vec<f64>> {
    let n = problem.a.nrows();
    let b = match spec {
        RhsSpec::RandomNormal(seed) => normal_vector(*seed, n),
        RhsSpec::File(path) => read_vector(path)?,
        RhsSpec::SingularVector(k) => {
            let g = problem.randsvd.as_ref().ok_or_else(|| {
                Error::InvalidConfig("singular-vector rhs needs a randsvd problem".into())
            })?;
            g.right_singular_vector(*k)
                .ok_or_else(|| {
                    Error::InvalidConfig(format!("singular vector index {k} out of range 1..={n}"))
                })?
                .to_vec()
        }
    };
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    Ok(b)
}

fn read_vector(path: &Path) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    let mut v = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.starts_with('%') || line.starts_with('#') {
            continue;
        }
        for tok in line.split_whitespace() {
            v.push(tok.parse().map_err(|e| Error::Parse {
                path: path.to_path_buf(),
                line: k + 1,
                message: format!("bad value {tok:?}: {e}"),
            })?);
        }
    }
    Ok(v)
}

fn validate(spec: &ExperimentSpec, n: usize) -> Result<()> {
    if spec.methods.is_empty() {
        return Err(Error::InvalidConfig("experiment has no methods".into()));
    }
    if !(0.0..1.0).contains(&spec.eps_display) {
        return Err(Error::InvalidConfig(format!(
            "eps_display must lie in [0, 1), got {}",
            spec.eps_display
        )));
    }
    for config in &spec.methods {
        config.validate(n)?;
        if config.basis != BasisKind::Mgs {
            let s = config.sketch_dim(n);
            if s > n || (config.sketch_kind != SketchKind::Identity && s <= config.m) {
                return Err(Error::InvalidConfig(format!(
                    "sketch dimension s = {s} must satisfy m < s ≤ n (m = {}, n = {n})",
                    config.m
                )));
            }
        }
    }
    Ok(())
}

fn solve(
    a: &SparseMatrixCsr,
    b: &[f64],
    config: &SolveConfig,
    left: &Preconditioner,
) -> Result<CycleResult> {
    let n = a.nrows();
    let right = Preconditioner::identity(n);
    if config.basis == BasisKind::Mgs {
        restarted_gmres(a, b, config, left, &right)
    } else {
        let sketch = config.build_sketch(n)?;
        restarted_sgmres(a, b, config, left, &right, &sketch)
    }
}

fn summary_line(
    label: &str,
    result: &std::result::Result<CycleResult, String>,
    wall: Duration,
    eps: f64,
) -> String {
    match result {
        Ok(res) => {
            let be = res.final_backward_error().unwrap_or(f64::NAN);
            let mut line = format!(
                "{label}: final_backward_error={be:.3e} iterations={} cycles={} termination={} wall_time={:.3}s",
                res.iterations_used,
                res.cycle_terminations.len(),
                res.termination,
                wall.as_secs_f64()
            );
            let x_norm = vector::norm2(&res.x);
            if let Some(last) = res.records.iter().rev().find(|r| r.y_norm.is_finite()) {
                if x_norm > 0.0 {
                    let row =
                        bound_tracker(last.basis_norm, last.kappa_sb, last.y_norm, x_norm, eps);
                    line.push_str(&format!(
                        " lemma_proxy={:.3e} theorem_proxy={:.3e}",
                        row.lemma_bound_proxy, row.theorem_bound_proxy
                    ));
                }
            }
            line
        }
        Err(msg) => format!("{label}: error: {msg} wall_time={:.3}s", wall.as_secs_f64()),
    }
}

/// Runs every method of `spec`, writes one trace per method and prints one summary
/// line per method to `out`. Solver failures are recorded in the traces; only spec
/// and I/O problems return `Err`.
pub fn run_experiment(spec: &ExperimentSpec, out: &mut impl Write) -> Result<Vec<MethodOutcome>> {
    if spec.methods.is_empty() {
        return Err(Error::InvalidConfig("experiment has no methods".into()));
    }
    let problem = build_problem(&spec.problem)?;
    let a = &problem.a;
    if a.nrows() != a.ncols() {
        return Err(Error::InvalidMatrix(format!(
            "matrix is {}×{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    let b = build_rhs(&spec.rhs, &problem)?;
    validate(spec, a.nrows())?;
    let left = Preconditioner::build(spec.preconditioner, a).map_err(|e| e.to_string());

    let mut outcomes = Vec::with_capacity(spec.methods.len());
    for (k, config) in spec.methods.iter().enumerate() {
        let label = method_label(config);
        let csv_path = spec.output_path(k);
        let start = Instant::now();
        let result = match &left {
            Ok(left) => solve(a, &b, config, left).map_err(|e| e.to_string()),
            Err(msg) => Err(msg.clone()),
        };
        let wall_time = start.elapsed();
        match &result {
            Ok(res) => write_trace(&csv_path, res)?,
            Err(msg) => write_error_trace(&csv_path, msg)?,
        }
        let summary = summary_line(label, &result, wall_time, spec.eps_display);
        writeln!(out, "{summary}")?;
        outcomes.push(MethodOutcome {
            label,
            csv_path,
            result,
            wall_time,
            summary,
        });
    }
    Ok(outcomes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_arguments() {
        assert_eq!(
            ProblemSpec::parse_randsvd("400,10,7").unwrap(),
            ProblemSpec::RandSvd {
                n: 400,
                kappa: 10.0,
                seed: 7
            }
        );
        assert!(ProblemSpec::parse_diag("1,2").is_err());
        assert!(ProblemSpec::parse_sprand("10,x,1").is_err());
        assert_eq!(
            "sv:3".parse::<RhsSpec>().unwrap(),
            RhsSpec::SingularVector(3)
        );
        assert_eq!(
            "random:5".parse::<RhsSpec>().unwrap(),
            RhsSpec::RandomNormal(5)
        );
        assert!("gauss:5".parse::<RhsSpec>().is_err());
        assert_eq!(parse_method("sssa").unwrap(), BasisKind::SketchSelect);
        assert!(parse_method("gmres").is_err());
    }

    #[test]
    fn empty_methods_is_spec_error() {
        let spec = ExperimentSpec::new(
            ProblemSpec::DiagRange {
                n: 4,
                lo: 1.0,
                hi: 2.0,
            },
            RhsSpec::RandomNormal(0),
            vec![],
            "unused.csv",
        );
        let err = run_experiment(&spec, &mut Vec::new()).unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn output_paths() {
        let mut spec = ExperimentSpec::new(
            ProblemSpec::DiagRange {
                n: 4,
                lo: 1.0,
                hi: 2.0,
            },
            RhsSpec::RandomNormal(0),
            vec![SolveConfig::default()],
            "dir/run.csv",
        );
        assert_eq!(spec.output_path(0), PathBuf::from("dir/run.csv"));
        spec.methods.push(SolveConfig {
            basis: BasisKind::Mgs,
            ..SolveConfig::default()
        });
        assert_eq!(spec.output_path(0), PathBuf::from("dir/run_1_strunc.csv"));
        assert_eq!(spec.output_path(1), PathBuf::from("dir/run_2_mgs.csv"));
    }

    #[test]
    fn singular_vector_needs_randsvd() {
        let p = build_problem(&ProblemSpec::DiagRange {
            n: 4,
            lo: 1.0,
            hi: 2.0,
        })
        .unwrap();
        assert!(build_rhs(&RhsSpec::SingularVector(1), &p).is_err());
        let p = build_problem(&ProblemSpec::RandSvd {
            n: 4,
            kappa: 2.0,
            seed: 0,
        })
        .unwrap();
        assert!(build_rhs(&RhsSpec::SingularVector(5), &p).is_err());
        assert_eq!(build_rhs(&RhsSpec::SingularVector(4), &p).unwrap().len(), 4);
    }
}
