//! Experiment runner behind the `continual-dp` binary.
//!
//! Every subcommand is deterministic given its flags and `--seed`. CSV
//! outputs start with a `# schema:` comment line naming the format version.

use std::fs::{File, OpenOptions};
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::counting::{
    calibrated_bound_with, BoundRequest, HistogramMechanism, TreeCounter, CALIBRATION_PATHS, CALIBRATION_SEED,
};
use crate::error::{input, param, state, Error, Result};
use crate::graph_mech::{DegreeHistogramMechanism, LadderMechanism, LadderTarget};
use crate::harness::{
    build_deghist_gadget, build_kcore_gadget, build_matching_gadget, build_msf_stream, build_topk_reduction,
    run_inc_reduction, write_timetable, ExactOracle, GadgetInstance, GadgetProblem, InnerProductInstance,
    MarginalsInstance, Mechanism, MsfProblem, ReductionReport, ZeroBasedGadget,
};
use crate::privacy::{NoiseMode, PrivacyBudget, RandomSource};
use crate::sne::{eval_norm, BoostedSne, NormSpec, SneMechanism};
use crate::stream::{StreamKind, Update, UpdateStream};

#[derive(Debug, Parser)]
#[command(name = "continual-dp", version, about = "Continual-release DP mechanisms and lower-bound reductions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run one mechanism over a stream and write a per-step error trace.
    RunMechanism(RunMechanismArgs),
    /// Drive a mechanism through an inner-product gadget and decode every query.
    RunReduction(RunReductionArgs),
    /// Write a gadget stream and its read timetable.
    GenGadget(GenGadgetArgs),
    /// Monte Carlo calibration of the histogram error bound.
    Calibrate(CalibrateArgs),
    /// Track a norm of the frequency vector with the SNE mechanism.
    SneQuery(SneQueryArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum NoiseArg {
    Standard,
    Off,
}

/// Privacy, randomness and noise flags shared by the mechanism subcommands.
#[derive(Debug, Clone, Args)]
pub struct PrivacyArgs {
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.0)]
    pub delta: f64,
    #[arg(long, default_value_t = 0.1)]
    pub beta: f64,
    #[arg(long, value_enum, default_value_t = NoiseArg::Standard)]
    pub noise: NoiseArg,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

impl PrivacyArgs {
    pub fn budget(&self) -> Result<PrivacyBudget> {
        let mode = match self.noise {
            NoiseArg::Standard => NoiseMode::Standard,
            NoiseArg::Off => NoiseMode::Off,
        };
        PrivacyBudget::new(self.eps, self.delta, self.beta, mode)
    }
}

/// A stream file, or the size of a synthetic insertion stream.
#[derive(Debug, Clone, Args)]
pub struct StreamArgs {
    /// Stream file in the `T= h= kind=` format.
    #[arg(long)]
    pub stream: Option<PathBuf>,
    /// Universe size (elements or vertices) of a synthetic stream.
    #[arg(long)]
    pub n: Option<usize>,
    /// Length of a synthetic stream.
    #[arg(long = "horizon", short = 'T')]
    pub horizon: Option<usize>,
}

impl StreamArgs {
    pub fn resolve(&self, kind: StreamKind, seed: u64) -> Result<UpdateStream> {
        let stream = match &self.stream {
            Some(path) => read_stream(path)?,
            None => {
                let (Some(n), Some(t)) = (self.n, self.horizon) else {
                    return Err(param("give --stream, or both --n and --horizon for a synthetic stream"));
                };
                synthetic_stream(kind, n, t, seed)?
            }
        };
        if stream.kind() != kind {
            return Err(input(format!("mechanism expects a {kind:?} stream, got {:?}", stream.kind())));
        }
        Ok(stream)
    }
}

pub fn read_stream(path: &Path) -> Result<UpdateStream> {
    let file = File::open(path)
        .map_err(|e| Error::Io(io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
    UpdateStream::parse(BufReader::new(file))
}

/// Uniformly random insertions: elements of `0..n`, or edges between
/// distinct vertices of `0..n`.
pub fn synthetic_stream(kind: StreamKind, n: usize, horizon: usize, seed: u64) -> Result<UpdateStream> {
    let mut rng = RandomSource::new(seed ^ 0x5EED_57AE);
    match kind {
        StreamKind::Elements => {
            if n == 0 {
                return Err(param("synthetic element stream needs n >= 1"));
            }
            UpdateStream::elements(n, (0..horizon).map(|_| Update::InsertElement(rng.below(n))).collect())
        }
        StreamKind::Graph => {
            if n < 2 {
                return Err(param("synthetic graph stream needs n >= 2"));
            }
            let updates = (0..horizon)
                .map(|_| {
                    let u = rng.below(n);
                    let v = (u + 1 + rng.below(n - 1)) % n;
                    Update::insert_edge(u, v)
                })
                .collect();
            UpdateStream::graph(n, updates)
        }
    }
}

/// Parses `l1`, `l2`, `linf`, `lp:P` or `topk:K`.
pub fn parse_norm(text: &str) -> std::result::Result<NormSpec, String> {
    let bad = || format!("unknown norm '{text}' (expected l1, l2, linf, lp:P or topk:K)");
    match text {
        "l1" => Ok(NormSpec::Lp(1.0)),
        "l2" => Ok(NormSpec::Lp(2.0)),
        "linf" => Ok(NormSpec::Lp(f64::INFINITY)),
        _ => {
            let (kind, value) = text.split_once(':').ok_or_else(bad)?;
            match kind {
                "lp" => value.parse().map(NormSpec::Lp).map_err(|_| bad()),
                "topk" => value.parse().map(NormSpec::TopK).map_err(|_| bad()),
                _ => Err(bad()),
            }
        }
    }
}

fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn write_csv<T: Serialize>(mut out: Box<dyn Write>, schema: &str, rows: &[T]) -> Result<()> {
    writeln!(out, "# schema: {schema}")?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- run-mechanism

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MechanismName {
    Counter,
    Histogram,
    LadderMatching,
    LadderKcore,
    LadderComponents,
    Deghist,
    Sne,
}

#[derive(Debug, Clone, Args)]
pub struct RunMechanismArgs {
    #[arg(long, value_enum)]
    pub mechanism: MechanismName,
    #[command(flatten)]
    pub source: StreamArgs,
    #[command(flatten)]
    pub privacy: PrivacyArgs,
    /// Ladder rung spacing (default from the statistic's range).
    #[arg(long)]
    pub k: Option<i64>,
    /// Target vertex of the k-core ladder.
    #[arg(long, default_value_t = 0)]
    pub vertex: usize,
    /// Traced coordinate for histogram-valued mechanisms (a degree for deghist).
    #[arg(long, default_value_t = 0)]
    pub column: usize,
    #[arg(long, default_value_t = 0.5)]
    pub zeta: f64,
    #[arg(long, value_parser = parse_norm, default_value = "l1")]
    pub norm: NormSpec,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub t: usize,
    #[serde(rename = "true")]
    pub truth: f64,
    pub released: f64,
    pub abs_error: f64,
}

impl TraceRow {
    fn new(t: usize, truth: f64, released: f64) -> Self {
        Self { t, truth, released, abs_error: (truth - released).abs() }
    }
}

pub const TRACE_SCHEMA: &str = "continual-dp/trace v1";

/// Per-step `(t, true, released, abs_error)` rows for one mechanism run.
pub fn mechanism_trace(args: &RunMechanismArgs) -> Result<Vec<TraceRow>> {
    let budget = args.privacy.budget()?;
    let rng = RandomSource::new(args.privacy.seed);
    let graph_kind = !matches!(args.mechanism, MechanismName::Counter | MechanismName::Histogram | MechanismName::Sne);
    let kind = if graph_kind { StreamKind::Graph } else { StreamKind::Elements };
    let stream = args.source.resolve(kind, args.privacy.seed)?;
    let (n, horizon) = (stream.universe(), stream.horizon());
    let mut rows = Vec::with_capacity(horizon);
    match args.mechanism {
        MechanismName::Counter => {
            let mut c = TreeCounter::new(horizon, &budget, rng)?;
            let mut truth = 0i64;
            for (t, u) in stream.updates().iter().enumerate() {
                truth += u.sign();
                rows.push(TraceRow::new(t + 1, truth as f64, c.step(u.sign())?));
            }
        }
        MechanismName::Histogram => {
            if args.column >= n {
                return Err(param(format!("column {} outside 0..{n}", args.column)));
            }
            let mut h = HistogramMechanism::new(n, horizon, &budget, false, rng)?;
            let mut freq = vec![0i64; n];
            for (t, u) in stream.updates().iter().enumerate() {
                let out = match u.element() {
                    Some(i) => {
                        freq[i] += u.sign();
                        h.step(i, u.sign())?
                    }
                    None => h.step_idle()?,
                };
                rows.push(TraceRow::new(t + 1, freq[args.column] as f64, out[args.column]));
            }
        }
        MechanismName::LadderMatching | MechanismName::LadderKcore | MechanismName::LadderComponents => {
            let target = match args.mechanism {
                MechanismName::LadderMatching => LadderTarget::Matching,
                MechanismName::LadderKcore => LadderTarget::CoreNumber(args.vertex),
                _ => LadderTarget::ConnectedComponents,
            };
            let mut m = match args.k {
                Some(k) => LadderMechanism::with_step(target, n, horizon, &budget, k, rng)?,
                None => LadderMechanism::new(target, n, horizon, &budget, rng)?,
            };
            for (t, u) in stream.updates().iter().enumerate() {
                let released = m.step(u)?;
                rows.push(TraceRow::new(t + 1, m.true_value() as f64, released));
            }
        }
        MechanismName::Deghist => {
            if args.column >= n {
                return Err(param(format!("degree {} outside 0..{n}", args.column)));
            }
            let mut m = DegreeHistogramMechanism::new(n, horizon, &budget, rng)?;
            for (t, u) in stream.updates().iter().enumerate() {
                let out = m.step(u)?;
                let g = m.graph();
                let truth = (0..n).filter(|&v| g.degree(v) == args.column).count();
                rows.push(TraceRow::new(t + 1, truth as f64, out[args.column]));
            }
        }
        MechanismName::Sne => {
            args.norm.validate(n)?;
            let mut m = SneMechanism::new(n, horizon, args.zeta, &budget, rng)?;
            for (t, u) in stream.updates().iter().enumerate() {
                m.step(u)?;
                let f: Vec<f64> = m.frequencies().iter().map(|&x| x as f64).collect();
                rows.push(TraceRow::new(t + 1, eval_norm(&args.norm, &f)?, eval_norm(&args.norm, m.estimate())?));
            }
        }
    }
    Ok(rows)
}

fn cmd_run_mechanism(args: &RunMechanismArgs) -> Result<()> {
    let rows = mechanism_trace(args)?;
    write_csv(open_output(args.out.as_deref())?, TRACE_SCHEMA, &rows)
}

// ---------------------------------------------------------------- run-reduction

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GadgetName {
    Matching,
    Kcore,
    Deghist,
    Topk,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReductionMechanism {
    /// Ladder for matching and k-core, degree histogram for deghist, SNE for TopK.
    Auto,
    Exact,
    Ladder,
    Deghist,
    Sne,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OracleName {
    Exact,
}

#[derive(Debug, Clone, Args)]
pub struct RunReductionArgs {
    #[arg(long, value_enum)]
    pub gadget: GadgetName,
    #[arg(long)]
    pub d: usize,
    /// Queries per dimension, `m = round(psi * d)`.
    #[arg(long, default_value_t = 1.0)]
    pub psi: f64,
    #[arg(long, value_enum, default_value_t = ReductionMechanism::Auto)]
    pub mechanism: ReductionMechanism,
    /// Use the exact oracle and fail on any round-trip violation.
    #[arg(long, value_enum)]
    pub oracle: Option<OracleName>,
    #[command(flatten)]
    pub privacy: PrivacyArgs,
    #[arg(long, default_value_t = 0.5)]
    pub zeta: f64,
    /// Slack of the TopK decoder.
    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1)]
    pub trials: usize,
    /// Per-query CSV (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Summary CSV to append one row per trial to (stderr table if absent).
    #[arg(long)]
    pub summary: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QueryRow {
    pub trial: usize,
    pub j: usize,
    pub true_inprod: usize,
    pub decoded: f64,
    pub error: f64,
    pub flagged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub trial: usize,
    pub seed: u64,
    pub gadget: String,
    pub mechanism: String,
    pub d: usize,
    pub m: usize,
    pub eps: f64,
    pub delta: f64,
    pub max_error: f64,
    pub mean_error: f64,
}

pub const QUERY_SCHEMA: &str = "continual-dp/reduction-queries v1";
pub const SUMMARY_SCHEMA: &str = "continual-dp/reduction-summary v1";

pub fn build_gadget(gadget: GadgetName, inst: &InnerProductInstance) -> Result<GadgetInstance> {
    match gadget {
        GadgetName::Matching => build_matching_gadget(inst),
        GadgetName::Kcore => build_kcore_gadget(inst),
        GadgetName::Deghist => build_deghist_gadget(inst),
        GadgetName::Topk => build_topk_reduction(inst),
    }
}

fn resolve_mechanism(args: &RunReductionArgs) -> ReductionMechanism {
    if args.oracle.is_some() {
        return ReductionMechanism::Exact;
    }
    match (args.mechanism, args.gadget) {
        (ReductionMechanism::Auto, GadgetName::Matching | GadgetName::Kcore) => ReductionMechanism::Ladder,
        (ReductionMechanism::Auto, GadgetName::Deghist) => ReductionMechanism::Deghist,
        (ReductionMechanism::Auto, GadgetName::Topk) => ReductionMechanism::Sne,
        (m, _) => m,
    }
}

/// Builds the mechanism for a gadget; `None` when they are incompatible.
pub fn reduction_mechanism(
    choice: ReductionMechanism,
    g: &GadgetInstance,
    budget: &PrivacyBudget,
    zeta: f64,
    rng: RandomSource,
) -> Result<Box<dyn Mechanism>> {
    let (n, horizon) = (g.stream.universe(), g.stream.horizon());
    let mech: Box<dyn Mechanism> = match (choice, g.problem) {
        (ReductionMechanism::Exact, _) => Box::new(ExactOracle::for_instance(g)?),
        (ReductionMechanism::Ladder, GadgetProblem::Matching) => {
            Box::new(LadderMechanism::new(LadderTarget::Matching, n, horizon, budget, rng)?)
        }
        (ReductionMechanism::Ladder, GadgetProblem::KCore) => {
            Box::new(LadderMechanism::new(LadderTarget::CoreNumber(0), n, horizon, budget, rng)?)
        }
        (ReductionMechanism::Deghist, GadgetProblem::DegHist) => {
            Box::new(DegreeHistogramMechanism::new(n, horizon, budget, rng)?)
        }
        (ReductionMechanism::Sne, GadgetProblem::TopK) => Box::new(SneMechanism::new(n, horizon, zeta, budget, rng)?),
        (c, p) => return Err(param(format!("mechanism {c:?} cannot run the {} gadget", p.name()))),
    };
    Ok(mech)
}

/// One reduction trial with instance and mechanism seeded from `seed`.
pub fn reduction_trial(args: &RunReductionArgs, seed: u64) -> Result<(GadgetInstance, ReductionReport)> {
    let budget = args.privacy.budget()?;
    let mut rng = RandomSource::new(seed);
    let inst = InnerProductInstance::random(args.d, args.psi, &mut rng)?;
    let g = build_gadget(args.gadget, &inst)?;
    let mut mech = reduction_mechanism(resolve_mechanism(args), &g, &budget, args.zeta, rng.fork())?;
    let report = run_inc_reduction(&g, mech.as_mut(), args.alpha)?;
    Ok((g, report))
}

/// Runs every trial (seed `seed + trial`) on its own thread and returns
/// results in trial order.
pub fn run_trials(args: &RunReductionArgs) -> Result<Vec<(GadgetInstance, ReductionReport)>> {
    if args.trials == 0 {
        return Err(param("--trials must be at least 1"));
    }
    args.privacy.budget()?;
    std::thread::scope(|s| {
        let handles: Vec<_> = (0..args.trials)
            .map(|i| s.spawn(move || reduction_trial(args, args.privacy.seed.wrapping_add(i as u64))))
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial thread panicked")).collect()
    })
}

fn cmd_run_reduction(args: &RunReductionArgs) -> Result<()> {
    let choice = resolve_mechanism(args);
    let results = run_trials(args)?;
    let mut queries = Vec::new();
    let mut summary = Vec::new();
    for (trial, (g, report)) in results.iter().enumerate() {
        if choice == ReductionMechanism::Exact {
            let offset = g.exact_offset();
            if let Some(o) = report.outcomes.iter().find(|o| o.decoded != (o.truth + offset) as f64) {
                return Err(state(format!(
                    "exact round trip violated at trial {trial}, query {}: decoded {} for inner product {}",
                    o.query, o.decoded, o.truth
                )));
            }
        }
        queries.extend(report.outcomes.iter().map(|o| QueryRow {
            trial,
            j: o.query,
            true_inprod: o.truth,
            decoded: o.decoded,
            error: o.error,
            flagged: o.flagged,
        }));
        summary.push(SummaryRow {
            trial,
            seed: args.privacy.seed.wrapping_add(trial as u64),
            gadget: g.problem.name(),
            mechanism: format!("{choice:?}").to_lowercase(),
            d: args.d,
            m: g.timetable.len(),
            eps: args.privacy.eps,
            delta: args.privacy.delta,
            max_error: report.max_error,
            mean_error: report.mean_error,
        });
    }
    write_csv(open_output(args.out.as_deref())?, QUERY_SCHEMA, &queries)?;
    match &args.summary {
        Some(path) => append_csv(path, SUMMARY_SCHEMA, &summary),
        None => {
            let mut err = io::stderr().lock();
            for r in &summary {
                writeln!(
                    err,
                    "trial {:>3}  {} / {}  d={} m={}  max_error={} mean_error={:.4}",
                    r.trial, r.gadget, r.mechanism, r.d, r.m, r.max_error, r.mean_error
                )?;
            }
            Ok(())
        }
    }
}

/// Appends rows, writing the schema line and header only to a new or empty file.
pub fn append_csv<T: Serialize>(path: &Path, schema: &str, rows: &[T]) -> Result<()> {
    let fresh = std::fs::metadata(path).map(|m| m.len() == 0).unwrap_or(true);
    let mut file = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(file, "# schema: {schema}")?;
    }
    let mut w = csv::WriterBuilder::new().has_headers(fresh).from_writer(file);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

// ---------------------------------------------------------------- gen-gadget

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GenGadgetName {
    Matching,
    Kcore,
    Deghist,
    Topk,
    Msf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FamilyName {
    StMincut,
    Mincut,
    DegAtLeast,
    Kcore,
    EdgeCount,
    MatchingPair,
    Triangle,
}

#[derive(Debug, Clone, Args)]
pub struct GenGadgetArgs {
    #[arg(long, value_enum)]
    pub gadget: GenGadgetName,
    /// Dimension `d` (columns of `Y` for marginals families).
    #[arg(long)]
    pub d: usize,
    /// Rows of `Y` for marginals families.
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    #[arg(long, value_enum, default_value_t = FamilyName::StMincut)]
    pub family: FamilyName,
    /// Degree threshold for `--family deg-at-least`.
    #[arg(long, default_value_t = 2)]
    pub tau: usize,
    #[arg(long, default_value_t = 1.0)]
    pub psi: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Stream file (stdout if absent).
    #[arg(long)]
    pub out_stream: Option<PathBuf>,
    /// JSON-lines timetable file.
    #[arg(long)]
    pub out_timetable: Option<PathBuf>,
}

pub fn family_problem(f: FamilyName, tau: usize) -> MsfProblem {
    match f {
        FamilyName::StMincut => MsfProblem::StMincut,
        FamilyName::Mincut => MsfProblem::Mincut,
        FamilyName::DegAtLeast => MsfProblem::DegAtLeast(tau),
        FamilyName::Kcore => MsfProblem::KCore,
        FamilyName::EdgeCount => MsfProblem::EdgeCount,
        FamilyName::MatchingPair => MsfProblem::ZeroBased(ZeroBasedGadget::MatchingPair),
        FamilyName::Triangle => MsfProblem::ZeroBased(ZeroBasedGadget::Triangle),
    }
}

pub fn generate_gadget(args: &GenGadgetArgs) -> Result<GadgetInstance> {
    let mut rng = RandomSource::new(args.seed);
    let by_dimension = |g: GadgetName, rng: &mut RandomSource| -> Result<GadgetInstance> {
        build_gadget(g, &InnerProductInstance::random(args.d, args.psi, rng)?)
    };
    match args.gadget {
        GenGadgetName::Matching => by_dimension(GadgetName::Matching, &mut rng),
        GenGadgetName::Kcore => by_dimension(GadgetName::Kcore, &mut rng),
        GenGadgetName::Deghist => by_dimension(GadgetName::Deghist, &mut rng),
        GenGadgetName::Topk => by_dimension(GadgetName::Topk, &mut rng),
        GenGadgetName::Msf => {
            let y = MarginalsInstance::random(args.n, args.d, &mut rng)?;
            build_msf_stream(family_problem(args.family, args.tau), &y)
        }
    }
}

fn cmd_gen_gadget(args: &GenGadgetArgs) -> Result<()> {
    let g = generate_gadget(args)?;
    let mut out = open_output(args.out_stream.as_deref())?;
    g.stream.write_to(&mut out)?;
    out.flush()?;
    if let Some(p) = &args.out_timetable {
        let mut w = BufWriter::new(File::create(p)?);
        write_timetable(&g, &mut w)?;
        w.flush()?;
    }
    Ok(())
}

// ---------------------------------------------------------------- calibrate

#[derive(Debug, Clone, Args)]
pub struct CalibrateArgs {
    #[arg(long, default_value_t = 1)]
    pub columns: usize,
    #[arg(long = "horizon", short = 'T')]
    pub horizon: usize,
    #[arg(long, default_value_t = 1.0)]
    pub eps: f64,
    #[arg(long, default_value_t = 0.01)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sensitivity: f64,
    #[arg(long, default_value_t = CALIBRATION_PATHS)]
    pub paths: usize,
    #[arg(long, default_value_t = CALIBRATION_SEED)]
    pub seed: u64,
    /// CSV file to append the row to (stdout if absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// One row of `error_bounds.csv`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, serde::Deserialize)]
pub struct BoundRow {
    pub columns: usize,
    pub horizon: usize,
    pub epsilon: f64,
    pub beta: f64,
    pub sensitivity: f64,
    pub paths: usize,
    pub seed: u64,
    pub bound: f64,
}

pub const BOUND_SCHEMA: &str = "continual-dp/error-bounds v1";

pub fn calibration_row(args: &CalibrateArgs) -> Result<BoundRow> {
    let req = BoundRequest {
        columns: args.columns,
        horizon: args.horizon,
        epsilon: args.eps,
        beta: args.beta,
        sensitivity: args.sensitivity,
    };
    let bound = calibrated_bound_with(&req, args.paths, args.seed)?;
    Ok(BoundRow {
        columns: args.columns,
        horizon: args.horizon,
        epsilon: args.eps,
        beta: args.beta,
        sensitivity: args.sensitivity,
        paths: args.paths,
        seed: args.seed,
        bound,
    })
}

fn cmd_calibrate(args: &CalibrateArgs) -> Result<()> {
    let row = calibration_row(args)?;
    match &args.out {
        Some(p) => append_csv(p, BOUND_SCHEMA, &[row]),
        None => write_csv(open_output(None)?, BOUND_SCHEMA, &[row]),
    }
}

// ---------------------------------------------------------------- sne-query

#[derive(Debug, Clone, Args)]
pub struct SneQueryArgs {
    #[command(flatten)]
    pub source: StreamArgs,
    #[command(flatten)]
    pub privacy: PrivacyArgs,
    #[arg(long, default_value_t = 0.5)]
    pub zeta: f64,
    #[arg(long, value_parser = parse_norm, default_value = "l1")]
    pub norm: NormSpec,
    /// Median over `ceil(ln(T / beta))` independent copies.
    #[arg(long)]
    pub boosted: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SneRow {
    pub t: usize,
    pub norm: String,
    #[serde(rename = "true")]
    pub truth: f64,
    pub estimate: f64,
    pub lower: f64,
    pub upper: f64,
    pub within: bool,
}

pub const SNE_SCHEMA: &str = "continual-dp/sne-query v1";

pub fn sne_trace(args: &SneQueryArgs) -> Result<Vec<SneRow>> {
    let budget = args.privacy.budget()?;
    let stream = args.source.resolve(StreamKind::Elements, args.privacy.seed)?;
    let (n, horizon) = (stream.universe(), stream.horizon());
    args.norm.validate(n)?;
    let rng = RandomSource::new(args.privacy.seed);
    let unit = args.norm.unit_value();
    let label = args.norm.label();
    let mut freq = vec![0.0; n];
    let mut rows = Vec::with_capacity(horizon);
    let mut push = |t: usize, truth: f64, estimate: f64, slack: f64| {
        let z = args.zeta;
        let lower = (1.0 - 3.0 * z) / (1.0 + z) * truth - slack * unit;
        let upper = (1.0 + z) * truth;
        let within = lower <= estimate && estimate <= upper;
        rows.push(SneRow { t, norm: label.clone(), truth, estimate, lower, upper, within });
    };
    if args.boosted {
        let mut m = BoostedSne::new(n, horizon, args.zeta, &budget, rng)?;
        // The widest slack among the copies.
        let slack = m.copies().iter().map(|c| c.parameters().additive_slack()).fold(0.0, f64::max);
        for (t, u) in stream.updates().iter().enumerate() {
            m.step(u)?;
            if let Some(i) = u.element() {
                freq[i] += 1.0;
            }
            push(t + 1, eval_norm(&args.norm, &freq)?, m.query(&args.norm)?, slack);
        }
    } else {
        let mut m = SneMechanism::new(n, horizon, args.zeta, &budget, rng)?;
        let slack = m.parameters().additive_slack();
        for (t, u) in stream.updates().iter().enumerate() {
            m.step(u)?;
            if let Some(i) = u.element() {
                freq[i] += 1.0;
            }
            push(t + 1, eval_norm(&args.norm, &freq)?, eval_norm(&args.norm, m.estimate())?, slack);
        }
    }
    Ok(rows)
}

fn cmd_sne_query(args: &SneQueryArgs) -> Result<()> {
    let rows = sne_trace(args)?;
    write_csv(open_output(args.out.as_deref())?, SNE_SCHEMA, &rows)
}

// ---------------------------------------------------------------- entry points

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        Command::RunMechanism(a) => cmd_run_mechanism(a),
        Command::RunReduction(a) => cmd_run_reduction(a),
        Command::GenGadget(a) => cmd_gen_gadget(a),
        Command::Calibrate(a) => cmd_calibrate(a),
        Command::SneQuery(a) => cmd_sne_query(a),
    }
}

/// Exit status for a failed run: 1 for a violated run-time invariant, 2 for
/// bad configuration, input or I/O.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::State(_) => 1,
        _ => 2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norms_parse() {
        assert!(matches!(parse_norm("l1"), Ok(NormSpec::Lp(p)) if p == 1.0));
        assert!(matches!(parse_norm("topk:10"), Ok(NormSpec::TopK(10))));
        assert!(matches!(parse_norm("lp:3"), Ok(NormSpec::Lp(p)) if p == 3.0));
        assert!(parse_norm("l7").is_err());
        assert!(parse_norm("topk:x").is_err());
    }

    #[test]
    fn synthetic_graph_has_no_loops() {
        let s = synthetic_stream(StreamKind::Graph, 5, 200, 3).unwrap();
        assert!(s.updates().iter().all(|u| matches!(u, Update::InsertEdge(a, b) if a < b)));
    }

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
