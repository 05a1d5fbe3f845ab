//! `matrange` command-line interface.
//!
//! Exit codes: 0 success, 2 parse/IO/usage errors, 3 dimension or
//! structural errors, 4 solver rejection, 5 verification threshold missed.

mod config;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use matrange::constructions::{
    essential_estimate, star_center_matrix, star_center_scalar, star_segment, tverberg_lift, EssentialOptions,
};
use matrange::feasibility::{sample_range, solve_free, Rejection};
use matrange::io::{
    load_tuple, read_text, to_canonical_json, write_text, BoundaryFile, CertificateDoc, CloudFile, EssentialFile,
    LoadedTuple, TupleFile, TverbergFile,
};
use matrange::linalg::random::{derive_seed, ginibre, gue_tuple};
use matrange::ranges::{joint_numrange_sample, numrange_boundary, ComplexTuple};
use matrange::verify::{
    check_convexity, check_corner_inclusions, check_corner_interlacing, check_nonempty_bounds,
    check_numrange_convexity, check_pauli_nonconvexity, check_perturbation_equivalence, check_star_shaped,
    check_star_shaped_planted, Expectation, PerturbationMode, SuiteConfig, SuiteReport,
};
use matrange::{ComplexMatrix, Error, HermitianTuple, Outcome, SolverOptions, C64};

use config::FileConfig;

#[derive(Parser, Debug)]
#[command(name = "matrange", version, about = "Joint and matricial numerical ranges of Hermitian tuples")]
struct Cli {
    /// Base seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Residual at which a witness is accepted.
    #[arg(long, global = true)]
    accept_tol: Option<f64>,
    /// Restart budget per solve.
    #[arg(long, global = true)]
    restarts: Option<usize>,
    /// Worker threads (results do not depend on this).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// toml file with seed, accept_tol, restarts, threads, max_iters, threshold.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output file (stdout when absent).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Record wall time in verification reports.
    #[arg(long, global = true)]
    timing: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Numerical range boundary of one complex matrix.
    Compute {
        #[command(subcommand)]
        what: ComputeCmd,
    },
    /// Certified samples of a matricial range.
    Sample {
        #[command(subcommand)]
        what: SampleCmd,
    },
    /// Constructive certificates.
    Construct {
        #[command(subcommand)]
        what: ConstructCmd,
    },
    /// Randomized verification suites.
    Verify {
        #[command(subcommand)]
        what: VerifyCmd,
    },
    /// Write a tuple file.
    Generate(GenerateArgs),
}

#[derive(Subcommand, Debug)]
enum ComputeCmd {
    Numrange {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 256)]
        angles: usize,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum SampleCmd {
    Pq {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 20)]
        count: usize,
        /// Scatter plot, for two real coordinates only.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
enum ConstructCmd {
    /// Scalar star-center (or, with --matrix, a matrix one).
    StarCenter {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long)]
        matrix: bool,
    },
    /// Certificate for a point on the segment from a point to a star-center.
    Segment {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        /// Certificate file for the far endpoint (solved when absent).
        #[arg(long)]
        from: Option<PathBuf>,
    },
    /// Level-p certificate from a Tverberg partition of deflated blocks.
    Tverberg {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 2)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
    },
    /// Support-function estimate of the essential range.
    Essential {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 4)]
        r_max: usize,
        #[arg(long, default_value_t = 40)]
        points: usize,
        #[arg(long, default_value_t = 64)]
        directions: usize,
        /// Skip the hyperplane bisection.
        #[arg(long)]
        no_seek: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Ensemble {
    Complex,
    Pauli,
    Scalar,
}

#[derive(Subcommand, Debug)]
enum VerifyCmd {
    Star {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 63)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        /// Number of sampled points.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75")]
        t_grid: Vec<f64>,
        /// Exact block-diagonal instance.
        #[arg(long)]
        planted: bool,
    },
    Bounds {
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long, default_value_t = 50)]
        trials: usize,
        /// Use (m+1)k − m (m <= 2).
        #[arg(long)]
        refined: bool,
    },
    Inclusions {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 1)]
        r: usize,
        #[arg(long, default_value_t = 5)]
        corners: usize,
        /// Number of sampled points (interlacing: number of matrices).
        #[arg(long, default_value_t = 10)]
        trials: usize,
        /// Single-matrix interval check with principal submatrices.
        #[arg(long)]
        interlacing: bool,
    },
    Convexity {
        #[arg(long, value_enum, default_value_t = Ensemble::Complex)]
        ensemble: Ensemble,
        /// Tuple to sample midpoints from (overrides the ensemble).
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 6)]
        n: usize,
        /// Matrices (complex), antipodal pairs (pauli) or midpoints.
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Midpoints per matrix for the complex ensemble.
        #[arg(long, default_value_t = 100)]
        pairs: usize,
        #[arg(long, default_value_t = 10000)]
        samples: usize,
        /// Restart budget for each rejected midpoint (pauli).
        #[arg(long, default_value_t = 200)]
        probe_restarts: usize,
    },
    Perturbation {
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 2)]
        m: usize,
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[arg(long, default_value_t = 1)]
        p: usize,
        #[arg(long, default_value_t = 1)]
        q: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Diagonal tuple with F on the first coordinate.
        #[arg(long)]
        planted: bool,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Kind {
    Gue,
    Ginibre,
    Diag,
    Scalar,
    Pauli,
    Spiked,
    Jordan,
}

#[derive(Args, Debug)]
struct GenerateArgs {
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long, default_value_t = 1)]
    m: usize,
    #[arg(long, default_value_t = 4)]
    n: usize,
    /// Diagonal entries (diag) or scalars (scalar).
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    values: Vec<f64>,
}

/// Failure with its exit code.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::Parse { .. }
            | Error::Schema(_)
            | Error::Io(_)
            | Error::NotHermitian { .. }
            | Error::NonFinite(_)
            | Error::InvalidCertificate(_)
            | Error::InvalidArgument(_) => 2,
            Error::Dimension(_)
            | Error::Structural { .. }
            | Error::Singular { .. }
            | Error::CrossOrthogonality { .. }
            | Error::RankDeficient { .. }
            | Error::NotIsometry { .. } => 3,
            Error::StageFailed { .. } | Error::NoPartition { .. } | Error::NoConvergence { .. } | Error::IterationCap(_) => 4,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: 2,
        message: message.into(),
    }
}

/// Settings after merging the config file under the flags.
struct Settings {
    seed: u64,
    solver: SolverOptions,
    threshold: f64,
    out: Option<PathBuf>,
    timing: bool,
}

impl Settings {
    fn suite(&self) -> SuiteConfig {
        SuiteConfig {
            seed: self.seed,
            threshold: self.threshold,
            solver: self.solver.clone(),
        }
    }

    fn emit(&self, text: &str) -> Result<(), Failure> {
        match &self.out {
            Some(p) => write_text(p, text).map_err(Failure::from),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }

    fn emit_json<T: Serialize>(&self, value: &T) -> Result<(), Failure> {
        self.emit(&to_canonical_json(value)?)
    }
}

#[derive(Serialize)]
struct RejectionDoc<'a> {
    schema_version: &'a str,
    kind: &'a str,
    rejected: bool,
    best_residual: f64,
    restarts: usize,
}

fn rejected(s: &Settings, kind: &str, r: &Rejection) -> Result<u8, Failure> {
    s.emit_json(&RejectionDoc {
        schema_version: matrange::io::SCHEMA_VERSION,
        kind,
        rejected: true,
        best_residual: r.best_residual,
        restarts: r.restarts,
    })?;
    Ok(4)
}

fn hermitian(path: &Path) -> Result<HermitianTuple, Failure> {
    match load_tuple(path, true)? {
        LoadedTuple::Hermitian(a) => Ok(a),
        LoadedTuple::Complex(_) => unreachable!("embedding was requested"),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let file = match &cli.config {
        Some(p) => FileConfig::load(p).map_err(usage)?,
        None => FileConfig::default(),
    };
    let seed = cli.seed.or(file.seed).unwrap_or(0);
    let mut solver = SolverOptions::default().with_seed(seed);
    if let Some(t) = cli.accept_tol.or(file.accept_tol) {
        solver.accept_tol = t;
    }
    if let Some(r) = cli.restarts.or(file.restarts) {
        solver.max_restarts = r;
    }
    if let Some(i) = file.max_iters {
        solver.max_iters = i;
    }
    solver.validate()?;
    let settings = Settings {
        seed,
        solver,
        threshold: file.threshold.unwrap_or(matrange::verify::DEFAULT_THRESHOLD),
        out: cli.out.clone(),
        timing: cli.timing,
    };
    let threads = cli.threads.or(file.threads);
    with_threads(threads, || dispatch(&cli.command, &settings))
}

#[cfg(feature = "parallel")]
fn with_threads<T: Send>(threads: Option<usize>, f: impl FnOnce() -> Result<T, Failure> + Send) -> Result<T, Failure> {
    match threads {
        Some(k) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k.max(1))
                .build()
                .map_err(|e| usage(e.to_string()))?;
            pool.install(f)
        }
        None => f(),
    }
}

#[cfg(not(feature = "parallel"))]
fn with_threads<T>(_threads: Option<usize>, f: impl FnOnce() -> Result<T, Failure>) -> Result<T, Failure> {
    f()
}

fn dispatch(cmd: &Command, s: &Settings) -> Result<u8, Failure> {
    match cmd {
        Command::Compute { what } => compute(what, s),
        Command::Sample { what } => sample(what, s),
        Command::Construct { what } => construct(what, s),
        Command::Verify { what } => verify(what, s),
        Command::Generate(args) => generate(args, s),
    }
}

fn compute(cmd: &ComputeCmd, s: &Settings) -> Result<u8, Failure> {
    let ComputeCmd::Numrange { input, angles, svg } = cmd;
    let t: ComplexMatrix = match load_tuple(input, false)? {
        LoadedTuple::Complex(t) if t.m() == 1 => t.members()[0].clone(),
        LoadedTuple::Hermitian(a) if a.m() == 1 => a.member(0).as_matrix().clone(),
        LoadedTuple::Hermitian(a) if a.m() == 2 => {
            let (h, g) = (a.member(0).as_matrix(), a.member(1).as_matrix());
            h.add(&g.scale(C64::new(0.0, 1.0)))
        }
        _ => {
            return Err(Error::Dimension("compute numrange needs a single complex matrix".into()).into());
        }
    };
    let b = numrange_boundary(&t, *angles)?;
    let file = BoundaryFile::from_boundary(&b);
    if let Some(path) = svg {
        let pair = |e: &[f64; 2]| (e[0], e[1]);
        let text = svg::boundary(
            &file.vertices.iter().map(pair).collect::<Vec<_>>(),
            &file.outer_vertices.iter().map(pair).collect::<Vec<_>>(),
        );
        write_text(path, &text)?;
    }
    s.emit_json(&file)?;
    Ok(0)
}

fn sample(cmd: &SampleCmd, s: &Settings) -> Result<u8, Failure> {
    let SampleCmd::Pq { input, p, q, count, svg } = cmd;
    let a = hermitian(input)?;
    let cloud = sample_range(&a, *p, *q, *count, &s.solver)?;
    if let Some(path) = svg {
        if a.m() * q * q != 2 {
            return Err(usage("scatter plots need exactly two real coordinates"));
        }
        let pts: Vec<(f64, f64)> = cloud.flattened().iter().map(|v| (v[0], v[1])).collect();
        write_text(path, &svg::scatter(&pts))?;
    }
    s.emit_json(&CloudFile::from_cloud(&cloud, Some(&a)))?;
    Ok(0)
}

fn construct(cmd: &ConstructCmd, s: &Settings) -> Result<u8, Failure> {
    match cmd {
        ConstructCmd::StarCenter { input, p, q, matrix } => {
            let a = hermitian(input)?;
            let (kind, out) = if *matrix {
                ("star-center-matrix", star_center_matrix(&a, *p, *q, &s.solver)?)
            } else {
                ("star-center-scalar", star_center_scalar(&a, *p, *q, &s.solver)?)
            };
            match out {
                Outcome::Accepted(c) => {
                    s.emit_json(&CertificateDoc::new(kind, &c.certificate, s.solver.accept_tol, Some(&a)))?;
                    Ok(0)
                }
                Outcome::Rejected(r) => rejected(s, kind, &r),
            }
        }
        ConstructCmd::Segment { input, p, q, t, from } => {
            let a = hermitian(input)?;
            let center = match star_center_scalar(&a, *p, *q, &s.solver)? {
                Outcome::Accepted(c) => c,
                Outcome::Rejected(r) => return rejected(s, "segment", &r),
            };
            let b = match from {
                Some(path) => {
                    let doc: CertificateDoc = matrange::io::from_json(&read_text(path)?)?;
                    let c = doc.load()?;
                    c.revalidate(&a, s.solver.accept_tol)?;
                    c
                }
                None => {
                    let opts = s.solver.clone().with_seed(derive_seed(s.seed, 0x5e6, 0));
                    match solve_free(&a, *p, *q, &opts)? {
                        Outcome::Accepted(c) => c,
                        Outcome::Rejected(r) => return rejected(s, "segment", &r),
                    }
                }
            };
            let c = star_segment(&a, &b, &center, *t)?;
            s.emit_json(&CertificateDoc::new("segment", &c, s.solver.accept_tol, Some(&a)))?;
            Ok(0)
        }
        ConstructCmd::Tverberg { input, p, q } => {
            let a = hermitian(input)?;
            let lift = tverberg_lift(&a, *q, *p, &s.solver)?;
            s.emit_json(&TverbergFile::new(&lift, s.solver.accept_tol, &a))?;
            Ok(0)
        }
        ConstructCmd::Essential {
            input,
            q,
            r_max,
            points,
            directions,
            no_seek,
        } => {
            let a = hermitian(input)?;
            let eopts = EssentialOptions {
                n_points: *points,
                n_directions: *directions,
                seek_support: !no_seek,
                ..EssentialOptions::default()
            };
            let est = essential_estimate(&a, *q, *r_max, &s.solver, &eopts)?;
            s.emit_json(&EssentialFile::new(&est))?;
            Ok(0)
        }
    }
}

fn finish(mut report: SuiteReport, started: Instant, s: &Settings) -> Result<u8, Failure> {
    if s.timing {
        report.wall_time = Some(started.elapsed().as_secs_f64());
    }
    s.emit_json(&report)?;
    Ok(if report.meets_threshold() { 0 } else { 5 })
}

fn tuple_or_gue(input: &Option<PathBuf>, m: usize, n: usize, seed: u64) -> Result<HermitianTuple, Failure> {
    match input {
        Some(p) => hermitian(p),
        None => Ok(gue_tuple(m, n, seed)),
    }
}

fn verify(cmd: &VerifyCmd, s: &Settings) -> Result<u8, Failure> {
    let started = Instant::now();
    let cfg = s.suite();
    let tuple_seed = derive_seed(s.seed, 0x7091e, 0);
    let report = match cmd {
        VerifyCmd::Star {
            input,
            m,
            n,
            p,
            q,
            trials,
            t_grid,
            planted,
        } => {
            if *planted {
                check_star_shaped_planted(*m, *p, *q, *trials, t_grid, &cfg)?
            } else {
                let a = tuple_or_gue(input, *m, *n, tuple_seed)?;
                match check_star_shaped(&a, *p, *q, *trials, t_grid, &cfg) {
                    Err(Error::StageFailed { best_residual, .. }) => {
                        let r = Rejection {
                            best_residual,
                            restarts: cfg.solver.max_restarts,
                            best: None,
                        };
                        return rejected(s, "star-center", &r);
                    }
                    other => other?,
                }
            }
        }
        VerifyCmd::Bounds { m, k, trials, refined } => check_nonempty_bounds(*m, *k, *trials, *refined, &cfg)?,
        VerifyCmd::Inclusions {
            input,
            m,
            n,
            p,
            q,
            r,
            corners,
            trials,
            interlacing,
        } => {
            if *interlacing {
                check_corner_interlacing(*n, *p, *r, *trials, &cfg)?
            } else {
                let a = tuple_or_gue(input, *m, *n, tuple_seed)?;
                check_corner_inclusions(&a, *p, *q, *r, *trials, *corners, &cfg)?
            }
        }
        VerifyCmd::Convexity {
            ensemble,
            input,
            p,
            q,
            n,
            trials,
            pairs,
            samples,
            probe_restarts,
        } => match (input, ensemble) {
            (Some(path), _) => {
                let a = hermitian(path)?;
                let cloud = sample_range(&a, *p, *q, (*trials).max(2), &cfg.solver)?;
                check_convexity(&cloud, &a, *p, *trials, Expectation::Member, &cfg)?
            }
            (None, Ensemble::Complex) => check_numrange_convexity(*trials, *n, *pairs, 256, 1e-6, &cfg)?,
            (None, Ensemble::Pauli) => check_pauli_nonconvexity(*samples, *trials, *probe_restarts, &cfg)?.report,
            (None, Ensemble::Scalar) => {
                let a = HermitianTuple::scalar(&[1.0, -0.5], *n)?;
                let cloud = joint_numrange_sample(&a, (*trials).max(2), s.seed)?;
                check_convexity(&cloud, &a, 1, *trials, Expectation::Member, &cfg)?
            }
        },
        VerifyCmd::Perturbation {
            input,
            m,
            n,
            p,
            q,
            rank,
            trials,
            planted,
        } => {
            if *planted {
                let a = HermitianTuple::diagonal(&vec![(0..*n).map(|i| i as f64).collect(); *m])?;
                check_perturbation_equivalence(&a, *p, *q, *trials, PerturbationMode::PlantedDiagonal, &cfg)?
            } else {
                let a = tuple_or_gue(input, *m, *n, tuple_seed)?;
                check_perturbation_equivalence(&a, *p, *q, *trials, PerturbationMode::Random { rank: *rank }, &cfg)?
            }
        }
    };
    finish(report, started, s)
}

fn generate(args: &GenerateArgs, s: &Settings) -> Result<u8, Failure> {
    let (m, n) = (args.m, args.n);
    let file = match args.kind {
        Kind::Gue => TupleFile::from_hermitian(&gue_tuple(m, n, s.seed)),
        Kind::Ginibre => {
            let mats = (0..m).map(|j| ginibre(n, derive_seed(s.seed, 0x61, j as u64))).collect();
            TupleFile::from_complex(&ComplexTuple::new(mats)?)
        }
        Kind::Diag => {
            if args.values.is_empty() {
                return Err(usage("--values is required for diag"));
            }
            TupleFile::from_hermitian(&HermitianTuple::diagonal(&vec![args.values.clone(); m])?)
        }
        Kind::Scalar => {
            if args.values.is_empty() {
                return Err(usage("--values is required for scalar"));
            }
            TupleFile::from_hermitian(&HermitianTuple::scalar(&args.values, n)?)
        }
        Kind::Pauli => TupleFile::from_hermitian(&HermitianTuple::pauli()),
        Kind::Spiked => {
            let mut d = vec![5.0];
            d.extend([1.0; 5]);
            d.extend([0.0; 6]);
            TupleFile::from_hermitian(&HermitianTuple::diagonal(&[d])?)
        }
        Kind::Jordan => {
            let mut j = ComplexMatrix::zeros(2, 2);
            j[(0, 1)] = C64::new(2.0, 0.0);
            TupleFile::from_complex(&ComplexTuple::new(vec![j])?)
        }
    };
    s.emit_json(&file)?;
    Ok(0)
}
