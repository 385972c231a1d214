//! Batch front end for the capacity-region library: ingest channel-spec
//! documents, run traces and verifications, emit CSV and SVG artifacts.
//!
//! Exit codes: 0 success, 2 parse error (arguments or spec document),
//! 3 infeasible or numerically invalid spec, 4 solver made no progress,
//! 5 a verification residual exceeded the threshold. Batch sweeps keep
//! going past per-point failures and report the most severe outcome.

mod output;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sdpc::channel::{
    align, leakage_gap, parse_document, perturb, square_up, AlignedChannelSpec, ChannelSpec,
    ParsedChannel,
};
use sdpc::enhance::construct_enhanced;
use sdpc::kkt::fit_certificate;
use sdpc::oracle::{scalar_boundary, scalar_general_boundary, weighted_max, GridSpec, OraclePoint};
use sdpc::rates::Order;
use sdpc::solver::{maximize_weighted, simplex_weights, solve_general, BoundaryPoint, Weights};
use sdpc::Error;

use output::{emit, num, rate, weight, Csv, Units};

/// Gain perturbation used when reducing a general spec to the aligned class.
const REDUCTION_ALPHA: f64 = 1e-6;

/// Grid resolution of the scalar brute-force oracle.
const ORACLE_RESOLUTION: usize = 1024;

/// Perturbation sweep for `leakage-sweep`, largest to smallest.
const ALPHA_GRID: [f64; 6] = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6];

const EXIT_PARSE: u8 = 2;
const EXIT_INFEASIBLE: u8 = 3;
const EXIT_NO_PROGRESS: u8 = 4;
const EXIT_RESIDUAL: u8 = 5;

const TRACE_HEADER: &str = "mu0,mu1,mu2,order,R0,R1,R2,objective,kkt_residual,restarts_used";
const KKT_HEADER: &str =
    "mu0,mu1,mu2,order,lambda,residual_stationarity,residual_slackness,slackness_scale,status";
const ENHANCE_HEADER: &str = "mu0,mu1,mu2,order,lambda,dominance,stationarity,clean_invariance,\
                              interference_invariance,converse_value,objective,converse_gap,status";
const GAP_HEADER: &str = "mu0,mu1,mu2,gap,objective12,objective21";
const ORACLE_HEADER: &str = "mu0,mu1,mu2,order,solver,oracle,delta";
const LEAKAGE_HEADER: &str = "alpha,leakage_gap";

#[derive(Copy, Clone, ValueEnum)]
enum UnitsArg {
    Nats,
    Bits,
}

impl From<UnitsArg> for Units {
    fn from(u: UnitsArg) -> Units {
        match u {
            UnitsArg::Nats => Units::Nats,
            UnitsArg::Bits => Units::Bits,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "sdpc",
    version,
    about = "Capacity-region computations for the two-user Gaussian broadcast \
             channel with a common message and two confidential messages"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// RNG seed for solver restart draws.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Solver restarts per weight.
    #[arg(long, global = true, default_value_t = 16)]
    restarts: usize,

    /// Simplex weight-grid step, in (0, 1].
    #[arg(long, global = true, default_value_t = 0.1)]
    step: f64,

    /// Units for rate-valued output columns (internal math is always nats).
    #[arg(long, global = true, value_enum, default_value = "nats")]
    units: UnitsArg,

    /// Residual threshold for verification commands; exit 5 above it.
    #[arg(long, global = true, default_value_t = 1e-4)]
    threshold: f64,
}

#[derive(Subcommand)]
enum Command {
    /// Trace the weighted boundary over the simplex weight grid, both
    /// encoding orders, and emit the boundary CSV.
    Trace {
        /// Channel-spec document.
        input: PathBuf,
        /// CSV destination (stdout when omitted).
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Also render an SVG of (R1, R2) slices at fixed R0 levels.
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Fit a KKT certificate at every traced boundary point and report the
    /// stationarity and complementary-slackness residuals.
    VerifyKkt {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Construct the enhanced channel at every boundary point and report
    /// the four identity residuals plus the converse gap.
    EnhanceCheck {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Solve both encoding orders per weight and report the relative
    /// objective gap (the region itself is order-invariant).
    OrderGap {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare solver objectives against the scalar brute-force grid
    /// oracle (requires a scalar spec).
    OracleCheck {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evaluate the alignment leakage bound over the alpha grid.
    LeakageSweep {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

/// Terminal failure: message for stderr plus a process exit code.
struct Failure {
    code: u8,
    msg: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Failure {
        let code = match &e {
            Error::Parse(_) => EXIT_PARSE,
            Error::NoProgress => EXIT_NO_PROGRESS,
            _ => EXIT_INFEASIBLE,
        };
        Failure {
            code,
            msg: e.to_string(),
        }
    }
}

/// Outcome accumulator for a weight sweep: per-point failures downgrade the
/// exit code without aborting the sweep; severity is no-progress, then
/// infeasibility, then residual breaches.
#[derive(Default)]
struct Sweep {
    no_progress: bool,
    infeasible: bool,
    residual: bool,
}

impl Sweep {
    fn note(&mut self, w: &Weights, order: Order, e: &Error) {
        eprintln!(
            "warning: weight ({}, {}, {}) order {}: {e}",
            w.mu0,
            w.mu1,
            w.mu2,
            order.label()
        );
        match e {
            Error::NoProgress => self.no_progress = true,
            _ => self.infeasible = true,
        }
    }

    fn flag_residual(&mut self) {
        self.residual = true;
    }

    fn exit(&self) -> ExitCode {
        if self.no_progress {
            ExitCode::from(EXIT_NO_PROGRESS)
        } else if self.infeasible {
            ExitCode::from(EXIT_INFEASIBLE)
        } else if self.residual {
            ExitCode::from(EXIT_RESIDUAL)
        } else {
            ExitCode::SUCCESS
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Failure> {
    if !(cli.threshold > 0.0 && cli.threshold.is_finite()) {
        return Err(Failure {
            code: EXIT_PARSE,
            msg: format!("threshold must be positive, got {}", cli.threshold),
        });
    }
    match &cli.command {
        Command::Trace { input, output, svg } => {
            cmd_trace(cli, input, output.as_deref(), svg.as_deref())
        }
        Command::VerifyKkt { input, output } => cmd_verify_kkt(cli, input, output.as_deref()),
        Command::EnhanceCheck { input, output } => cmd_enhance_check(cli, input, output.as_deref()),
        Command::OrderGap { input, output } => cmd_order_gap(cli, input, output.as_deref()),
        Command::OracleCheck { input, output } => cmd_oracle_check(cli, input, output.as_deref()),
        Command::LeakageSweep { input, output } => cmd_leakage_sweep(cli, input, output.as_deref()),
    }
}

fn load(path: &Path) -> Result<ParsedChannel, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        code: EXIT_PARSE,
        msg: format!("cannot read {}: {e}", path.display()),
    })?;
    Ok(parse_document(&text)?)
}

fn write_artifact(path: Option<&Path>, content: &str) -> Result<(), Failure> {
    emit(path, content).map_err(|e| Failure {
        code: 1,
        msg: format!("cannot write output: {e}"),
    })
}

/// An aligned problem ready for the solver, with the leakage bound of the
/// reduction when the input was a general spec.
struct Problem {
    aligned: AlignedChannelSpec,
    leakage: Option<f64>,
}

fn reduce(parsed: &ParsedChannel) -> Result<Problem, Failure> {
    match parsed {
        ParsedChannel::Aligned(c) => Ok(Problem {
            aligned: c.clone(),
            leakage: None,
        }),
        ParsedChannel::General(ch) => {
            let squared = square_up(ch);
            let aligned = align(&perturb(&squared, REDUCTION_ALPHA)?)?;
            let leakage = leakage_gap(&squared, REDUCTION_ALPHA)?;
            Ok(Problem {
                aligned,
                leakage: Some(leakage),
            })
        }
    }
}

fn announce_reduction(problem: &Problem) {
    if let Some(leak) = problem.leakage {
        eprintln!(
            "note: general spec reduced to aligned form at alpha = {REDUCTION_ALPHA:e}; \
             residual leakage bound {leak:.3e} nats"
        );
    }
}

fn weight_cells(w: &Weights) -> [String; 3] {
    [weight(w.mu0), weight(w.mu1), weight(w.mu2)]
}

fn cmd_trace(
    cli: &Cli,
    input: &Path,
    out: Option<&Path>,
    svg_path: Option<&Path>,
) -> Result<ExitCode, Failure> {
    let problem = reduce(&load(input)?)?;
    announce_reduction(&problem);
    let units: Units = cli.units.into();
    let weights = simplex_weights(cli.step)?;
    let mut csv = Csv::new(TRACE_HEADER);
    let mut sweep = Sweep::default();
    let mut triples = Vec::new();
    for order in [Order::Order12, Order::Order21] {
        for w in &weights {
            match maximize_weighted(w, &problem.aligned, order, cli.restarts, cli.seed) {
                Ok(p) => {
                    csv.row(&trace_cells(&p, order, units));
                    triples.push((
                        p.triple.r0 * units.scale(),
                        p.triple.r1 * units.scale(),
                        p.triple.r2 * units.scale(),
                    ));
                }
                Err(e) => sweep.note(w, order, &e),
            }
        }
    }
    write_artifact(out, &csv.render())?;
    if let Some(sp) = svg_path {
        write_artifact(Some(sp), &svg::slice_plot(&triples, units.label()))?;
    }
    Ok(sweep.exit())
}

fn trace_cells(p: &BoundaryPoint, order: Order, units: Units) -> Vec<String> {
    let [m0, m1, m2] = weight_cells(&p.weights);
    vec![
        m0,
        m1,
        m2,
        order.label().to_string(),
        rate(p.triple.r0, units),
        rate(p.triple.r1, units),
        rate(p.triple.r2, units),
        rate(p.objective, units),
        num(p.kkt_residual),
        p.restarts_used.to_string(),
    ]
}

fn cmd_verify_kkt(cli: &Cli, input: &Path, out: Option<&Path>) -> Result<ExitCode, Failure> {
    let problem = reduce(&load(input)?)?;
    announce_reduction(&problem);
    let weights = simplex_weights(cli.step)?;
    let mut csv = Csv::new(KKT_HEADER);
    let mut sweep = Sweep::default();
    for order in [Order::Order12, Order::Order21] {
        for w in &weights {
            let fitted = maximize_weighted(w, &problem.aligned, order, cli.restarts, cli.seed)
                .and_then(|p| fit_certificate(&p.pair, w, &problem.aligned, order));
            match fitted {
                Ok(cert) => {
                    for warning in &cert.warnings {
                        eprintln!(
                            "warning: weight ({}, {}, {}) order {}: {warning}",
                            w.mu0,
                            w.mu1,
                            w.mu2,
                            order.label()
                        );
                    }
                    let pass = cert.passes(cli.threshold, cli.threshold);
                    if !pass {
                        sweep.flag_residual();
                    }
                    let [m0, m1, m2] = weight_cells(w);
                    csv.row(&[
                        m0,
                        m1,
                        m2,
                        order.label().to_string(),
                        num(cert.lambda),
                        num(cert.residual_stationarity),
                        num(cert.residual_slackness),
                        num(cert.slackness_scale),
                        (if pass { "ok" } else { "fail" }).to_string(),
                    ]);
                }
                Err(e) => sweep.note(w, order, &e),
            }
        }
    }
    write_artifact(out, &csv.render())?;
    Ok(sweep.exit())
}

fn cmd_enhance_check(cli: &Cli, input: &Path, out: Option<&Path>) -> Result<ExitCode, Failure> {
    let problem = reduce(&load(input)?)?;
    announce_reduction(&problem);
    let units: Units = cli.units.into();
    let weights = simplex_weights(cli.step)?;
    let mut csv = Csv::new(ENHANCE_HEADER);
    let mut sweep = Sweep::default();
    for order in [Order::Order12, Order::Order21] {
        for w in &weights {
            let solved = maximize_weighted(w, &problem.aligned, order, cli.restarts, cli.seed)
                .and_then(|p| {
                    fit_certificate(&p.pair, w, &problem.aligned, order).map(|c| (p, c))
                });
            let (point, cert) = match solved {
                Ok(pc) => pc,
                Err(e) => {
                    sweep.note(w, order, &e);
                    continue;
                }
            };
            let [m0, m1, m2] = weight_cells(w);
            let head = [m0, m1, m2, order.label().to_string(), num(cert.lambda)];
            match construct_enhanced(&point.pair, &cert, w, &problem.aligned) {
                Err(Error::DegenerateWeights { .. }) => {
                    // no confidential weight: enhancement is undefined, the
                    // boundary point itself is still valid
                    let mut cells = head.to_vec();
                    cells.extend(["", "", "", "", ""].map(String::from));
                    cells.push(rate(point.objective, units));
                    cells.push(String::new());
                    cells.push("degenerate".to_string());
                    csv.row(&cells);
                }
                Err(e) => sweep.note(w, order, &e),
                Ok(enh) => {
                    let checked = enh
                        .verify()
                        .and_then(|res| enh.converse_value().map(|cv| (res, cv)));
                    match checked {
                        Ok((res, converse)) => {
                            let gap = (converse - point.objective).abs();
                            let tol = cli.threshold.max(10.0 * point.kkt_residual);
                            let pass = res.max() <= tol && gap <= tol;
                            if !pass {
                                sweep.flag_residual();
                            }
                            let mut cells = head.to_vec();
                            cells.extend([
                                num(res.dominance),
                                num(res.stationarity),
                                num(res.clean_invariance),
                                num(res.interference_invariance),
                                rate(converse, units),
                                rate(point.objective, units),
                                num(gap),
                                (if pass { "ok" } else { "fail" }).to_string(),
                            ]);
                            csv.row(&cells);
                        }
                        Err(e) => sweep.note(w, order, &e),
                    }
                }
            }
        }
    }
    write_artifact(out, &csv.render())?;
    Ok(sweep.exit())
}

fn cmd_order_gap(cli: &Cli, input: &Path, out: Option<&Path>) -> Result<ExitCode, Failure> {
    let problem = reduce(&load(input)?)?;
    announce_reduction(&problem);
    let units: Units = cli.units.into();
    let weights = simplex_weights(cli.step)?;
    let mut csv = Csv::new(GAP_HEADER);
    let mut sweep = Sweep::default();
    for w in &weights {
        let solved = maximize_weighted(w, &problem.aligned, Order::Order12, cli.restarts, cli.seed)
            .and_then(|a| {
                maximize_weighted(w, &problem.aligned, Order::Order21, cli.restarts, cli.seed)
                    .map(|b| (a, b))
            });
        match solved {
            Ok((a, b)) => {
                let gap = (a.objective - b.objective).abs() / a.objective.abs().max(1.0);
                if gap > cli.threshold {
                    sweep.flag_residual();
                }
                let [m0, m1, m2] = weight_cells(w);
                csv.row(&[
                    m0,
                    m1,
                    m2,
                    num(gap),
                    rate(a.objective, units),
                    rate(b.objective, units),
                ]);
            }
            Err(e) => sweep.note(w, Order::Order12, &e),
        }
    }
    write_artifact(out, &csv.render())?;
    Ok(sweep.exit())
}

fn cmd_oracle_check(cli: &Cli, input: &Path, out: Option<&Path>) -> Result<ExitCode, Failure> {
    let parsed = load(input)?;
    let units: Units = cli.units.into();
    let weights = simplex_weights(cli.step)?;
    let grid = GridSpec::new(ORACLE_RESOLUTION)?;
    let mut csv = Csv::new(ORACLE_HEADER);
    let mut sweep = Sweep::default();
    for order in [Order::Order12, Order::Order21] {
        // oracle boundary and per-weight solver objective for this order
        let solve: Box<dyn Fn(&Weights) -> sdpc::Result<f64>>;
        let boundary: Vec<OraclePoint>;
        match &parsed {
            ParsedChannel::Aligned(c) => {
                boundary = scalar_boundary(c, &grid, order)?;
                let c = c.clone();
                solve = Box::new(move |w| {
                    maximize_weighted(w, &c, order, cli.restarts, cli.seed).map(|p| p.objective)
                });
            }
            ParsedChannel::General(ch) => {
                boundary = scalar_general_boundary(ch, &grid, order)?;
                let ch = ch.clone();
                solve = Box::new(move |w| {
                    solve_general(&ch, w, order, cli.restarts, cli.seed, REDUCTION_ALPHA)
                        .map(|g| g.point.objective)
                });
            }
        }
        for w in &weights {
            match solve(w) {
                Ok(solver_obj) => {
                    let oracle_obj = weighted_max(&boundary, w.mu0, w.mu1, w.mu2)
                        .map(|pt| pt.rates.weighted(w.mu0, w.mu1, w.mu2))
                        .unwrap_or(0.0);
                    let delta = solver_obj - oracle_obj;
                    if delta.abs() > cli.threshold {
                        sweep.flag_residual();
                    }
                    let [m0, m1, m2] = weight_cells(w);
                    csv.row(&[
                        m0,
                        m1,
                        m2,
                        order.label().to_string(),
                        rate(solver_obj, units),
                        rate(oracle_obj, units),
                        rate(delta, units),
                    ]);
                }
                Err(e) => sweep.note(w, order, &e),
            }
        }
    }
    write_artifact(out, &csv.render())?;
    Ok(sweep.exit())
}

fn cmd_leakage_sweep(cli: &Cli, input: &Path, out: Option<&Path>) -> Result<ExitCode, Failure> {
    let parsed = load(input)?;
    let units: Units = cli.units.into();
    let ch: ChannelSpec = match &parsed {
        ParsedChannel::General(c) => square_up(c),
        ParsedChannel::Aligned(c) => c.to_channel(),
    };
    let mut csv = Csv::new(LEAKAGE_HEADER);
    let mut sweep = Sweep::default();
    let mut prev = f64::INFINITY;
    let mut last = 0.0;
    for alpha in ALPHA_GRID {
        let gap = leakage_gap(&ch, alpha)?;
        if gap > prev + 1e-12 {
            eprintln!("warning: leakage bound increased as alpha shrank to {alpha:e}");
            sweep.flag_residual();
        }
        prev = gap;
        last = gap;
        csv.row(&[format!("{alpha:e}"), rate(gap, units)]);
    }
    if last > cli.threshold {
        eprintln!(
            "warning: leakage bound {last:.3e} nats at alpha = {:e} exceeds threshold",
            ALPHA_GRID[ALPHA_GRID.len() - 1]
        );
        sweep.flag_residual();
    }
    write_artifact(out, &csv.render())?;
    Ok(sweep.exit())
}
