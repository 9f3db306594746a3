//! Command-line front end: system info, single CHSH computations, sweeps,
//! adaptive-game analyses, and the full verification suite.

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polygpt::chsh::{ChshOptions, SweepRow};
use polygpt::game::{classical_max, wiring_max, NoSignalingBox};
use polygpt::geometry::{build_polygon_system, Family, PolygonSystem, Scheme};
use polygpt::quantum::{quantum_game_strategy, StrategyAngles};
use polygpt::quantum_value;
use polygpt::tensor::TensorKind;

/// Environment variable overriding the rayon worker-thread count.
const THREADS_ENV: &str = "POLYGPT_THREADS";

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_COMPUTE: u8 = 3;

#[derive(Parser)]
#[command(
    name = "polygpt",
    about = "Polygon GPT models: CHSH bounds, the adaptive game, and its quantum baseline",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Unrestricted,
    Selfdual,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Family {
        match f {
            FamilyArg::Unrestricted => Family::Unrestricted,
            FamilyArg::Selfdual => Family::SelfDual,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    Intersection,
    RotatedPairing,
    UnitRadius,
}

impl From<SchemeArg> for Scheme {
    fn from(s: SchemeArg) -> Scheme {
        match s {
            SchemeArg::Intersection => Scheme::Intersection,
            SchemeArg::RotatedPairing => Scheme::RotatedPairing,
            SchemeArg::UnitRadius => Scheme::UnitRadius,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TensorArg {
    Minimal,
    Maximal,
}

impl From<TensorArg> for TensorKind {
    fn from(t: TensorArg) -> TensorKind {
        match t {
            TensorArg::Minimal => TensorKind::Minimal,
            TensorArg::Maximal => TensorKind::Maximal,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum TheoryArg {
    Classical,
    Quantum,
    Boxworld,
    Gpt,
}

#[derive(Args, Clone)]
struct SystemArgs {
    /// Family of the polygon model.
    #[arg(long, value_enum, default_value = "selfdual")]
    family: FamilyArg,
    /// Even-n self-dualization scheme.
    #[arg(long, value_enum, default_value = "unit-radius")]
    scheme: SchemeArg,
    /// Tensor product used for the bipartite state space.
    #[arg(long, value_enum, default_value = "maximal")]
    tensor: TensorArg,
    /// Drop the marginal-cone constraints from the maximal tensor product.
    #[arg(long)]
    no_marginals: bool,
}

#[derive(Args, Clone)]
struct OutputArgs {
    /// Output format.
    #[arg(long, value_enum, default_value = "csv")]
    format: FormatArg,
    /// Write to this file instead of stdout.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Describe a polygon system: states, effects, radius, self-duality.
    Info {
        /// Number of extremal states.
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Maximum CHSH winning probability for one pair of polygon systems.
    ChshMax {
        /// Number of extremal states (both parties).
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// CHSH maxima for a range of n, one row per system size.
    Sweep {
        /// Smallest n (inclusive).
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        /// Largest n (inclusive).
        #[arg(long, default_value_t = 30)]
        n_max: usize,
        #[command(flatten)]
        system: SystemArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Adaptive-game values for one theory.
    Adaptive {
        /// Theory whose maximum is computed.
        #[arg(long, value_enum)]
        theory: TheoryArg,
        /// Polygon size for the GPT upper bound (theory = gpt).
        #[arg(long, default_value_t = 8)]
        n: usize,
        #[command(flatten)]
        system: SystemArgs,
    },
    /// Run the full acceptance suite; nonzero exit on any failure.
    Verify,
}

fn main() -> ExitCode {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        match value.parse::<usize>() {
            Ok(threads) if threads > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(threads)
                    .build_global();
            }
            _ => {
                eprintln!("usage error: {THREADS_ENV} must be a positive integer, got {value:?}");
                return ExitCode::from(EXIT_USAGE);
            }
        }
    }
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("computation error: {e}");
            ExitCode::from(EXIT_COMPUTE)
        }
    }
}

fn run(command: Command) -> anyhow::Result<ExitCode> {
    match command {
        Command::Info { n, system } => {
            let sys = build_polygon_system(n, system.family.into(), system.scheme.into())?;
            print_info(&sys)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::ChshMax { n, system, out } => {
            let rows = run_sweep(n, n, &system)?;
            emit(&rows, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Sweep {
            n_min,
            n_max,
            system,
            out,
        } => {
            if n_min < 3 || n_min > n_max {
                eprintln!("usage error: need 3 <= n-min <= n-max, got {n_min}..={n_max}");
                return Ok(ExitCode::from(EXIT_USAGE));
            }
            let rows = run_sweep(n_min, n_max, &system)?;
            emit(&rows, &out)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Adaptive { theory, n, system } => {
            run_adaptive(theory, n, &system)?;
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            let reports = polygpt::acceptance::run_all();
            for report in &reports {
                println!("{}", report.line());
            }
            if polygpt::acceptance::all_passed(&reports) {
                println!("verification passed: 9/9 criteria");
                Ok(ExitCode::SUCCESS)
            } else {
                let failed = reports.iter().filter(|r| !r.passed).count();
                println!("verification FAILED: {failed}/9 criteria failed");
                Ok(ExitCode::from(EXIT_VERIFY_FAILED))
            }
        }
    }
}

fn run_sweep(n_min: usize, n_max: usize, system: &SystemArgs) -> anyhow::Result<Vec<SweepRow>> {
    let options = ChshOptions {
        marginal_constraints: !system.no_marginals,
        symmetry_reduction: true,
    };
    Ok(polygpt::chsh::sweep(
        system.family.into(),
        system.scheme.into(),
        n_min,
        n_max,
        system.tensor.into(),
        options,
    )?)
}

fn print_info(sys: &PolygonSystem) -> anyhow::Result<()> {
    println!("family:        {}", sys.family.as_str());
    println!("scheme:        {}", sys.scheme.as_str());
    println!("n:             {}", sys.n);
    println!("n mod 8:       {}", sys.n % 8);
    println!("state radius:  {}", sig12(sys.radius));
    println!(
        "self-dual cone: {}",
        sys.state_cone().is_self_dual()?
    );
    println!("states ({}):", sys.state_vertices.len());
    for (i, v) in sys.state_vertices.iter().enumerate() {
        let [x, y, z] = v.to_array();
        println!("  ω[{i}] = ({}, {}, {})", sig12(x), sig12(y), sig12(z));
    }
    println!("extremal effects ({}):", sys.effect_vertices.len());
    for (i, v) in sys.effect_vertices.iter().enumerate() {
        let [x, y, z] = v.to_array();
        println!("  e[{i}] = ({}, {}, {})", sig12(x), sig12(y), sig12(z));
    }
    println!(
        "quantum CHSH value reference: {}",
        sig12(quantum_value())
    );
    Ok(())
}

fn run_adaptive(theory: TheoryArg, n: usize, system: &SystemArgs) -> anyhow::Result<()> {
    match theory {
        TheoryArg::Classical => {
            let r = classical_max();
            println!("theory:  classical");
            println!("value:   {}", sig12(r.value));
            println!(
                "optimal strategy (1 of {}): a(r_A)=({}, {}), c(r_C)=({}, {}), b=({}, {})",
                r.optimal_count,
                r.argmax.a[0],
                r.argmax.a[1],
                r.argmax.c[0],
                r.argmax.c[1],
                r.argmax.b.0,
                r.argmax.b.1
            );
        }
        TheoryArg::Quantum => {
            let r = quantum_game_strategy(StrategyAngles::optimal())?;
            println!("theory:  quantum (two singlets + Bell measurement)");
            println!("value:   {}", sig12(r.value));
            println!("target:  {}", sig12(quantum_value()));
            for (p, b, p_win) in &r.per_outcome {
                println!(
                    "  Bell outcome p={} -> variant ({}, {}), conditional win {}",
                    sig12(*p),
                    b.0,
                    b.1,
                    sig12(*p_win)
                );
            }
        }
        TheoryArg::Boxworld => {
            let pr = NoSignalingBox::pr();
            let r = wiring_max(&pr, &pr)?;
            println!("theory:  box-world wirings of PR ⊗ PR");
            println!("value:   {}", sig12(r.value));
            println!(
                "optimal wiring: order={}, x1={}, input_rule=({}, {})",
                r.argmax_wiring.order,
                r.argmax_wiring.x1,
                r.argmax_wiring.input_rule[0],
                r.argmax_wiring.input_rule[1]
            );
        }
        TheoryArg::Gpt => {
            let sys = build_polygon_system(n, system.family.into(), system.scheme.into())?;
            let options = ChshOptions {
                marginal_constraints: !system.no_marginals,
                symmetry_reduction: true,
            };
            let bound = polygpt::game::adaptive_upper_bound(
                &sys,
                &sys,
                system.tensor.into(),
                options,
            )?;
            println!(
                "theory:  GPT upper bound ({}, {}, n={n}, {} tensor)",
                sys.family.as_str(),
                sys.scheme.as_str(),
                TensorKind::from(system.tensor).as_str()
            );
            println!("value:   {}", sig12(bound));
            println!("gap to quantum: {}", sig12(quantum_value() - bound));
        }
    }
    Ok(())
}

/// Format a float with 12 significant digits in plain decimal notation.
fn sig12(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (11 - magnitude).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // Trim trailing zeros but keep at least one digit after the point.
    if s.contains('.') {
        let t = s.trim_end_matches('0');
        let t = t.strip_suffix('.').unwrap_or(t);
        t.to_string()
    } else {
        s
    }
}

const CSV_HEADER: &str = "family,scheme,n,n_mod_8,tensor,marginal_constraints,p_win,\
                          gap_to_quantum,certificate_gap,argmax_effect_indices,wall_time_ms";

fn csv_row(row: &SweepRow) -> String {
    let [a0, a1, c0, c1] = row.argmax_measurements;
    format!(
        "{},{},{},{},{},{},{},{},{},{a0};{a1};{c0};{c1},{}",
        row.settings.family.as_str(),
        row.settings.scheme.as_str(),
        row.n,
        row.n_mod_8,
        row.settings.tensor.as_str(),
        row.settings.marginal_constraints,
        sig12(row.p_win),
        sig12(row.gap_to_quantum),
        sig12(row.certificate_gap),
        row.wall_time_ms
    )
}

fn json_rows(rows: &[SweepRow]) -> serde_json::Value {
    let out: Vec<serde_json::Value> = rows
        .iter()
        .map(|row| {
            let [a0, a1, c0, c1] = row.argmax_measurements;
            let w = row.result.argmax_state.w;
            serde_json::json!({
                "family": row.settings.family.as_str(),
                "scheme": row.settings.scheme.as_str(),
                "n": row.n,
                "n_mod_8": row.n_mod_8,
                "tensor": row.settings.tensor.as_str(),
                "marginal_constraints": row.settings.marginal_constraints,
                "p_win": row.p_win,
                "gap_to_quantum": row.gap_to_quantum,
                "certificate_gap": row.certificate_gap,
                "argmax_effect_indices": [a0, a1, c0, c1],
                "wall_time_ms": row.wall_time_ms,
                "argmax_state_w": w,
            })
        })
        .collect();
    serde_json::Value::Array(out)
}

fn emit(rows: &[SweepRow], out: &OutputArgs) -> anyhow::Result<()> {
    let body = match out.format {
        FormatArg::Csv => {
            let mut s = String::from(CSV_HEADER);
            s.push('\n');
            for row in rows {
                s.push_str(&csv_row(row));
                s.push('\n');
            }
            s
        }
        FormatArg::Json => {
            let mut s = serde_json::to_string_pretty(&json_rows(rows))?;
            s.push('\n');
            s
        }
    };
    match &out.output {
        Some(path) => {
            let mut f = std::fs::File::create(path)?;
            f.write_all(body.as_bytes())?;
        }
        None => print!("{body}"),
    }
    Ok(())
}
