//! Command-line toolkit for p-adic Henon dynamics: region classification,
//! orbit and escape analysis, fixed points and 2-cycles, finite ball-dynamics
//! reports (cycle-length tables, Julia membership, equidistribution), and the
//! region-III symbolic coding.
//!
//! Output is a deterministic JSON report (identical configs give
//! byte-identical payloads up to the `meta.duration_ms` field); table-shaped
//! commands can emit CSV instead.  Every library error maps to a stable kind
//! string and a distinct nonzero exit code.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use henon_padic::ball_dynamics::{
    attractor_profile, cycle_structure, empirical_measure, good_reduction_check, is_julia_member,
    periodic_ball_tree, DynamicsBudget, CSV_HEADER,
};
use henon_padic::horseshoe::{
    code_point, make_context, omega_periodic, omega_window, periodic_points, verify_conjugacy,
    HorseshoeContext, SymbolWindow,
};
use henon_padic::localfield::parse_literal;
use henon_padic::periodic::{existence_report, fixed_points, two_cycle};
use henon_padic::{
    Error, HalfLogNorm, HenonParams, OrbitFate, PadicNumber, PlanePoint, RegionTag,
};

#[derive(Parser)]
#[command(
    name = "henon-padic",
    version,
    about = "p-adic Henon map dynamics: exact arithmetic, attractors, horseshoe coding"
)]
struct Cli {
    /// Odd prime of the ground field Q_p
    #[arg(long = "p", global = true, default_value_t = 3)]
    p: u64,

    /// Coefficient a: rational "n/d" or digit literal "d0+d1*p+..."
    #[arg(long = "a", global = true, allow_hyphen_values = true)]
    a: Option<String>,

    /// Coefficient b (nonzero)
    #[arg(long = "b", global = true, allow_hyphen_values = true)]
    b: Option<String>,

    /// Working relative precision (digits)
    #[arg(long, global = true, default_value_t = 24)]
    precision: u32,

    /// Ball level (radius p^-k)
    #[arg(long, global = true)]
    k: Option<u32>,

    /// Maximum ball level
    #[arg(long, global = true)]
    kmax: Option<u32>,

    /// Orbit length / number of steps
    #[arg(long, global = true)]
    n: Option<u64>,

    /// Iteration cap for fate analysis
    #[arg(long = "max-iter", global = true, default_value_t = 200)]
    max_iter: u32,

    /// Thread cap for parallel enumeration
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Output format
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Output path (stdout when absent)
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// State budget for finite-dynamics enumeration
    #[arg(long, global = true, default_value_t = 1u128 << 34)]
    budget: u128,

    /// RNG seed for sampling commands
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Region of (a, b), escape radius, and the involution's region
    Classify,
    /// Cycle-length table rows (CSV mirrors the published table layout)
    Table {
        /// Row spec "p,a,b,kmax"; repeatable
        #[arg(long = "row")]
        rows: Vec<String>,
    },
    /// Iterate the map from a start point, recording norms
    Orbit {
        /// Start point "x,y" (each coordinate a literal)
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        /// Iterate the inverse map instead
        #[arg(long)]
        reverse: bool,
    },
    /// Certified fate of an orbit (escape / bounded / undetermined)
    Fate {
        #[arg(long, allow_hyphen_values = true)]
        start: String,
    },
    /// Fixed points, the 2-cycle, and the existence-criteria report
    Fixed,
    /// Cycle census of the reduced map at level k (or 1..=kmax with the
    /// attractor profile and periodic-ball tree)
    Cycles,
    /// Filled-Julia membership by ball periodicity
    Julia {
        #[arg(long, allow_hyphen_values = true)]
        start: String,
    },
    /// Orbit-frequency measure over periodic balls and TV to uniform
    Measure {
        #[arg(long, allow_hyphen_values = true)]
        start: String,
    },
    /// Region-III symbolic coding
    Horseshoe {
        #[command(subcommand)]
        sub: HorseshoeCmd,
    },
}

#[derive(Subcommand)]
enum HorseshoeCmd {
    /// Coded point of a cyclic word or finite window
    Point {
        /// Cyclic word "+-" or window "-+.++" (dot before index 0)
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
    /// Recover the coding window of a point
    Code {
        #[arg(long, allow_hyphen_values = true)]
        start: String,
        /// Backward symbols to recover
        #[arg(long, default_value_t = 4)]
        backward: u32,
        /// Forward symbols to recover (inclusive of s_0)
        #[arg(long, default_value_t = 8)]
        forward: u32,
    },
    /// All 2^l points of period dividing l, with their words
    Periodic {
        #[arg(long = "l")]
        len: u32,
    },
    /// Verify the shift-conjugacy residual on a word or window
    Verify {
        #[arg(long, allow_hyphen_values = true)]
        word: String,
    },
}

struct CommandOutput {
    payload: Value,
    csv: Option<String>,
    text: String,
}

fn main() {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(t)
            .build_global()
            .ok();
    }
    let started = Instant::now();
    match run(&cli) {
        Ok(output) => {
            let rendered = match cli.format {
                Format::Json => render_report(&cli, output.payload, started),
                Format::Csv => match output.csv {
                    Some(csv) => csv,
                    None => fail(
                        &cli,
                        &Error::Parse("this command has no CSV shape; use --format json".into()),
                    ),
                },
                Format::Text => output.text,
            };
            if let Err(e) = write_out(&cli.out, &rendered) {
                eprintln!("error: {e}");
                std::process::exit(1);
            }
        }
        Err(e) => fail(&cli, &e),
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse(_) => 2,
        Error::WrongRegion { .. } => 3,
        Error::NotSquare(_) => 4,
        Error::PrecisionExhausted(_) => 5,
        Error::BudgetExceeded { .. } => 6,
        Error::NonConvergence { .. } => 7,
        Error::DivisionByZero => 8,
        Error::NotIntegral { .. } => 9,
        Error::NotInJulia { .. } => 10,
        Error::AmbiguousSector { .. } => 11,
        Error::BranchUnavailable(_) => 12,
        Error::NoTwoCycle => 13,
        Error::ValuationOverflow => 14,
    }
}

fn fail(cli: &Cli, e: &Error) -> ! {
    eprintln!("error[{}]: {e}", e.kind());
    if cli.format == Format::Json {
        let payload = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
        println!("{}", serde_json::to_string_pretty(&payload).unwrap());
    }
    std::process::exit(exit_code(e));
}

fn write_out(path: &Option<PathBuf>, content: &str) -> std::io::Result<()> {
    match path {
        Some(p) => {
            let mut f = std::fs::File::create(p)?;
            writeln!(f, "{content}")
        }
        None => {
            println!("{content}");
            Ok(())
        }
    }
}

fn render_report(cli: &Cli, result: Value, started: Instant) -> String {
    let report = json!({
        "command": command_name(&cli.command),
        "config": config_echo(cli),
        "result": result,
        "meta": {
            "version": env!("CARGO_PKG_VERSION"),
            "duration_ms": started.elapsed().as_millis() as u64,
        },
    });
    serde_json::to_string_pretty(&report).unwrap()
}

fn command_name(cmd: &Command) -> &'static str {
    match cmd {
        Command::Classify => "classify",
        Command::Table { .. } => "table",
        Command::Orbit { .. } => "orbit",
        Command::Fate { .. } => "fate",
        Command::Fixed => "fixed",
        Command::Cycles => "cycles",
        Command::Julia { .. } => "julia",
        Command::Measure { .. } => "measure",
        Command::Horseshoe { sub } => match sub {
            HorseshoeCmd::Point { .. } => "horseshoe point",
            HorseshoeCmd::Code { .. } => "horseshoe code",
            HorseshoeCmd::Periodic { .. } => "horseshoe periodic",
            HorseshoeCmd::Verify { .. } => "horseshoe verify",
        },
    }
}

fn config_echo(cli: &Cli) -> Value {
    json!({
        "p": cli.p,
        "a": cli.a,
        "b": cli.b,
        "precision": cli.precision,
        "k": cli.k,
        "kmax": cli.kmax,
        "n": cli.n,
        "max_iter": cli.max_iter,
        "budget": cli.budget.to_string(),
        "seed": cli.seed,
    })
}

// ---------------------------------------------------------------------------
// value rendering
// ---------------------------------------------------------------------------

fn norm_json(n: HalfLogNorm, p: u64) -> Value {
    Value::String(n.display_with(p))
}

fn padic_json(x: &PadicNumber) -> Value {
    json!({ "value": x.to_string(), "digits": x.digit_expansion() })
}

fn point_json(pt: &PlanePoint) -> Value {
    json!({ "x": padic_json(&pt.x), "y": padic_json(&pt.y) })
}

fn region_str(r: RegionTag) -> String {
    r.to_string()
}

// ---------------------------------------------------------------------------
// command implementations
// ---------------------------------------------------------------------------

fn run(cli: &Cli) -> Result<CommandOutput, Error> {
    match &cli.command {
        Command::Classify => cmd_classify(cli),
        Command::Table { rows } => cmd_table(cli, rows),
        Command::Orbit { start, reverse } => cmd_orbit(cli, start, *reverse),
        Command::Fate { start } => cmd_fate(cli, start),
        Command::Fixed => cmd_fixed(cli),
        Command::Cycles => cmd_cycles(cli),
        Command::Julia { start } => cmd_julia(cli, start),
        Command::Measure { start } => cmd_measure(cli, start),
        Command::Horseshoe { sub } => match sub {
            HorseshoeCmd::Point { word } => cmd_horseshoe_point(cli, word),
            HorseshoeCmd::Code { start, backward, forward } => {
                cmd_horseshoe_code(cli, start, *backward, *forward)
            }
            HorseshoeCmd::Periodic { len } => cmd_horseshoe_periodic(cli, *len),
            HorseshoeCmd::Verify { word } => cmd_horseshoe_verify(cli, word),
        },
    }
}

fn parse_params(cli: &Cli) -> Result<HenonParams, Error> {
    let a = cli
        .a
        .as_deref()
        .ok_or_else(|| Error::Parse("--a is required for this command".into()))?;
    let b = cli
        .b
        .as_deref()
        .ok_or_else(|| Error::Parse("--b is required for this command".into()))?;
    let a_rat = parse_literal(a, cli.p)?;
    let b_rat = parse_literal(b, cli.p)?;
    HenonParams::from_rationals(cli.p, a_rat, b_rat, cli.precision)
}

fn parse_start(cli: &Cli, start: &str) -> Result<PlanePoint, Error> {
    let (xs, ys) = start
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("start point {start:?} must be \"x,y\"")))?;
    let x = parse_literal(xs, cli.p)?;
    let y = parse_literal(ys, cli.p)?;
    PlanePoint::from_rationals(&x, &y, cli.p, cli.precision)
}

fn dyn_budget(cli: &Cli) -> DynamicsBudget {
    DynamicsBudget::with_max_states(cli.budget)
}

fn cmd_classify(cli: &Cli) -> Result<CommandOutput, Error> {
    let params = parse_params(cli)?;
    let region = params.classify_region();
    let involution = params.involution();
    let a_square = if params.a().is_zero() {
        Value::Null
    } else {
        Value::Bool(params.a().is_square()?)
    };
    // for integral coefficients, whether the residue-field reduction is a
    // bijection (true exactly in region I)
    let good_reduction = if matches!(region, RegionTag::I | RegionTag::IIplus) {
        Value::Bool(good_reduction_check(&params, 1, &dyn_budget(cli))?)
    } else {
        Value::Null
    };
    let payload = json!({
        "region": region_str(region),
        "coefficient_norm": norm_json(params.coefficient_norm(), cli.p),
        "filtration_radius": norm_json(params.filtration_radius(), cli.p),
        "a_is_square": a_square,
        "good_reduction_mod_p": good_reduction,
        "involution": {
            "a": involution.a_rational().to_string(),
            "b": involution.b_rational().to_string(),
            "region": region_str(involution.classify_region()),
            "filtration_radius": norm_json(involution.filtration_radius(), cli.p),
        },
    });
    let text = format!(
        "region {} | R = {} | involution (a, b) = ({}, {}) in region {}",
        region,
        params.filtration_radius().display_with(cli.p),
        involution.a_rational(),
        involution.b_rational(),
        involution.classify_region()
    );
    Ok(CommandOutput { payload, csv: None, text })
}

fn cmd_table(cli: &Cli, rows: &[String]) -> Result<CommandOutput, Error> {
    use rayon::prelude::*;
    struct RowSpec {
        p: u64,
        a: String,
        b: String,
        k: u32,
    }
    let mut specs = Vec::new();
    for row in rows {
        let parts: Vec<&str> = row.split(',').collect();
        if parts.len() != 4 {
            return Err(Error::Parse(format!(
                "row {row:?} must be \"p,a,b,kmax\""
            )));
        }
        let p: u64 = parts[0]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad prime in row {row:?}")))?;
        let kmax: u32 = parts[3]
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad kmax in row {row:?}")))?;
        if kmax < 1 {
            return Err(Error::Parse(format!("kmax must be >= 1 in row {row:?}")));
        }
        // validate the literals up front so parse errors exit before work starts
        parse_literal(parts[1].trim(), p)?;
        parse_literal(parts[2].trim(), p)?;
        for k in 1..=kmax {
            specs.push(RowSpec {
                p,
                a: parts[1].trim().to_string(),
                b: parts[2].trim().to_string(),
                k,
            });
        }
    }
    let budget = dyn_budget(cli);
    let precision = cli.precision;
    let computed: Vec<Result<Value, Error>> = specs
        .par_iter()
        .map(|spec| {
            let a = parse_literal(&spec.a, spec.p)?;
            let b = parse_literal(&spec.b, spec.p)?;
            let params = HenonParams::from_rationals(spec.p, a, b, precision)?;
            match cycle_structure(&params, spec.k, &budget) {
                Ok(report) => {
                    let (pk, cycles) = report.csv_cells();
                    Ok(json!({
                        "p": spec.p,
                        "a": spec.a,
                        "b": spec.b,
                        "k": spec.k,
                        "max_period": report.max_period,
                        "histogram": report.histogram,
                        "periodic_balls": report.periodic_balls,
                        "csv": format!("{},{},{},{},{},{}", spec.p, spec.a, spec.b, spec.k, pk, cycles),
                    }))
                }
                // over-budget rows are marked, not fatal
                Err(Error::BudgetExceeded { .. }) => Ok(json!({
                    "p": spec.p,
                    "a": spec.a,
                    "b": spec.b,
                    "k": spec.k,
                    "budget_exceeded": true,
                    "csv": format!("{},{},{},{},budget,budget", spec.p, spec.a, spec.b, spec.k),
                })),
                Err(e) => Err(e),
            }
        })
        .collect();
    let mut json_rows = Vec::new();
    let mut csv_lines = vec![CSV_HEADER.to_string()];
    for item in computed {
        let mut v = item?;
        let line = v
            .as_object_mut()
            .unwrap()
            .remove("csv")
            .unwrap()
            .as_str()
            .unwrap()
            .to_string();
        csv_lines.push(line);
        json_rows.push(v);
    }
    let csv = csv_lines.join("\n");
    let payload = json!({ "rows": json_rows });
    Ok(CommandOutput { payload, csv: Some(csv.clone()), text: csv })
}

fn cmd_orbit(cli: &Cli, start: &str, reverse: bool) -> Result<CommandOutput, Error> {
    let params = parse_params(cli)?;
    let pt = parse_start(cli, start)?;
    let mut steps = cli.n.unwrap_or(10) as i64;
    if reverse {
        steps = -steps;
    }
    let trace = params.iterate(&pt, steps, None)?;
    let points: Vec<Value> = trace
        .points
        .iter()
        .zip(trace.norms.iter())
        .enumerate()
        .map(|(i, (q, norm))| {
            json!({
                "step": i,
                "point": point_json(q),
                "norm": norm_json(*norm, cli.p),
            })
        })
        .collect();
    let text = trace
        .norms
        .iter()
        .enumerate()
        .map(|(i, n)| format!("step {i}: norm {}", n.display_with(cli.p)))
        .collect::<Vec<_>>()
        .join("\n");
    let payload = json!({
        "points": points,
        "certificate": serde_json::to_value(trace.certificate).unwrap(),
    });
    Ok(CommandOutput { payload, csv: None, text })
}

fn cmd_fate(cli: &Cli, start: &str) -> Result<CommandOutput, Error> {
    let params = parse_params(cli)?;
    let pt = parse_start(cli, start)?;
    let fate = params.orbit_fate(&pt, cli.max_iter)?;
    let text = match fate {
        OrbitFate::EscapesForward { step } => format!("escapes forward (certified at step {step})"),
        OrbitFate::EscapesBackward { step } => {
            format!("escapes backward (certified at step {step})")
        }
        OrbitFate::BoundedForward { step } => {
            format!("bounded forward orbit (certified at step {step})")
        }
        OrbitFate::UndeterminedAfter { max_iter } => {
            format!("undetermined after {max_iter} iterations")
        }
    };
    let payload = json!({
        "fate": serde_json::to_value(fate).unwrap(),
        "region": region_str(params.classify_region()),
        "sector": serde_json::to_value(params.sector_of(&pt)).unwrap(),
    });
    Ok(CommandOutput { payload, csv: None, text })
}

fn cmd_fixed(cli: &Cli) -> Result<CommandOutput, Error> {
    let params = parse_params(cli)?;
    let fps = fixed_points(&params)?;
    let cycle = two_cycle(&params)?;
    let report = existence_report(&params)?;
    let payload = json!({
        "fixed_points": fps.iter().map(point_json).collect::<Vec<_>>(),
        "two_cycle": cycle
            .as_ref()
            .map(|(c, d)| json!([point_json(c), point_json(d)])),
        "existence": serde_json::to_value(&report).unwrap(),
    });
    let text = format!(
        "{} fixed point(s); 2-cycle: {}",
        fps.len(),
        if cycle.is_some() { "yes" } else { "no" }
    );
    Ok(CommandOutput { payload, csv: None, text })
}

fn cmd_cycles(cli: &Cli) -> Result<CommandOutput, Error> {
    let params = parse_params(cli)?;
    let budget = dyn_budget(cli);
    if let Some(kmax) = cli.kmax {
        let mut reports = Vec::new();
        for k in 1..=kmax {
            reports.push(serde_json::to_value(cycle_structure(&params, k, &budget)?).unwrap());
        }
        let profile = if params.classify_region() == RegionTag::IIplus {
            serde_json::to_value(attractor_profile(&params, kmax, &budget)?).unwrap()
        } else {
            Value::Null
        };
        let tree = periodic_ball_tree(&params, kmax, &budget)?;
        let tree_summary: Vec<Value> = tree
            .levels
            .iter()
            .enumerate()
            .map(|(i, level)| {
                json!({
                    "k": i + 1,
                    "periodic_balls": level.len(),
                    "children_counts": level.iter().map(|n| n.periodic_children).collect::<Vec<_>>(),
                })
            })
            .collect();
        let text = reports
            .iter()
            .map(|r| {
                format!(
                    "k = {}: P_k = {}",
                    r["level"], r["max_period"]
                )
            })
            .collect::<Vec<_>>()
            .join("\n");
        let payload = json!({
            "reports": reports,
            "attractor_profile": profile,
            "tree": tree_summary,
        });
        Ok(CommandOutput { payload, csv: None, text })
    } else {
        let k = cli
            .k
            .ok_or_else(|| Error::Parse("cycles requires --k or --kmax".into()))?;
        let report = cycle_structure(&params, k, &budget)?;
        let text = format!("k = {}: P_k = {}", report.level, report.max_period);
        let payload = serde_json::to_value(&report).unwrap();
        Ok(CommandOutput { payload, csv: None, text })
    }
}

fn cmd_julia(cli: &Cli, start: &str) -> Result<CommandOutput, Error> {
    let params = parse_params(cli)?;
    let pt = parse_start(cli, start)?;
    let kmax = cli.kmax.unwrap_or(6);
    let membership = is_julia_member(&params, &pt, kmax, &dyn_budget(cli))?;
    let text = match membership {
        henon_padic::ball_dynamics::JuliaMembership::MemberUpTo(k) => {
            format!("member of every tested level up to {k} (semi-decision)")
        }
        henon_padic::ball_dynamics::JuliaMembership::NonMemberWitness(k) => {
            format!("not a member: the level-{k} ball is strictly preperiodic")
        }
    };
    let payload = json!({ "membership": serde_json::to_value(membership).unwrap() });
    Ok(CommandOutput { payload, csv: None, text })
}

fn cmd_measure(cli: &Cli, start: &str) -> Result<CommandOutput, Error> {
    let params = parse_params(cli)?;
    let pt = parse_start(cli, start)?;
    let k = cli.k.ok_or_else(|| Error::Parse("measure requires --k".into()))?;
    let n = cli.n.ok_or_else(|| Error::Parse("measure requires --n".into()))?;
    let measure = empirical_measure(&params, &pt, n, k, &dyn_budget(cli))?;
    let mut csv_lines = vec!["level,cx,cy,count,weight".to_string()];
    for (ball, count, weight) in &measure.weights {
        csv_lines.push(format!("{},{},{},{},{}", ball.level, ball.cx, ball.cy, count, weight));
    }
    let text = format!(
        "{} periodic balls at level {}; TV to uniform = {:.6}; transient mass {:.6}",
        measure.periodic_ball_count, measure.level, measure.tv_to_uniform, measure.transient_mass
    );
    let payload = serde_json::to_value(&measure).unwrap();
    Ok(CommandOutput { payload, csv: Some(csv_lines.join("\n")), text })
}

fn horseshoe_context(cli: &Cli) -> Result<(HenonParams, HorseshoeContext), Error> {
    let params = parse_params(cli)?;
    let ctx = make_context(&params, cli.precision)?;
    Ok((params, ctx))
}

fn coded_point_json(cli: &Cli, cp: &henon_padic::horseshoe::CodedPoint) -> Value {
    json!({
        "word": cp.window.to_string(),
        "point": point_json(&cp.point),
        "accuracy": norm_json(cp.accuracy, cli.p),
    })
}

fn cmd_horseshoe_point(cli: &Cli, word: &str) -> Result<CommandOutput, Error> {
    let (_params, ctx) = horseshoe_context(cli)?;
    let window = SymbolWindow::parse(word)?;
    let coded = match &window {
        SymbolWindow::Cyclic(w) => omega_periodic(&ctx, w, ctx.default_target_accuracy())?,
        SymbolWindow::Window { .. } => omega_window(&ctx, &window)?,
    };
    let text = format!(
        "omega({window}) = ({}, {}) to accuracy {}",
        coded.point.x,
        coded.point.y,
        coded.accuracy.display_with(cli.p)
    );
    Ok(CommandOutput { payload: coded_point_json(cli, &coded), csv: None, text })
}

fn cmd_horseshoe_code(
    cli: &Cli,
    start: &str,
    backward: u32,
    forward: u32,
) -> Result<CommandOutput, Error> {
    let (_params, ctx) = horseshoe_context(cli)?;
    let pt = parse_start(cli, start)?;
    let window = code_point(&ctx, &pt, backward, forward, cli.precision)?;
    let text = format!("coding window: {window}");
    let payload = json!({ "window": window.to_string() });
    Ok(CommandOutput { payload, csv: None, text })
}

fn cmd_horseshoe_periodic(cli: &Cli, len: u32) -> Result<CommandOutput, Error> {
    let (_params, ctx) = horseshoe_context(cli)?;
    let pts = periodic_points(&ctx, len, ctx.default_target_accuracy())?;
    let payload = json!({
        "count": pts.len(),
        "points": pts.iter().map(|cp| coded_point_json(cli, cp)).collect::<Vec<_>>(),
    });
    let text = pts
        .iter()
        .map(|cp| format!("{}: ({}, {})", cp.window, cp.point.x, cp.point.y))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(CommandOutput { payload, csv: None, text })
}

fn cmd_horseshoe_verify(cli: &Cli, word: &str) -> Result<CommandOutput, Error> {
    let (_params, ctx) = horseshoe_context(cli)?;
    let window = SymbolWindow::parse(word)?;
    let check = verify_conjugacy(&ctx, &window)?;
    let text = format!(
        "residual {} (bound {}): {}",
        check.residual_upper.display_with(cli.p),
        check.bound.display_with(cli.p),
        if check.within_bound { "within bound" } else { "EXCEEDS BOUND" }
    );
    let payload = json!({
        "residual_upper": norm_json(check.residual_upper, cli.p),
        "residual_resolved": check.residual_resolved,
        "bound": norm_json(check.bound, cli.p),
        "within_bound": check.within_bound,
    });
    Ok(CommandOutput { payload, csv: None, text })
}
