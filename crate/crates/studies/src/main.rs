use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use equil_core::poisson::solve;
use equil_core::rigidity::{critical_layer, energy_identity_stats, euler_frame, LayerRegime};
use equil_studies::battery;
use equil_studies::fieldio::read_field;
use equil_studies::manifest::{GridParams, Mode, RunManifest, DEFAULT_Q};
use equil_studies::{run_sweep, Result, StudiesError};

#[derive(Parser)]
#[command(name = "equil", version, about = "Steady states and traveling waves near Couette flow in a channel")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Maximize over an eps-sweep and write results, fits, fields and plots.
    Run(RunArgs),
    /// Evaluate norm requests (CSV rows kind,s,p,k) on a field file.
    Norms {
        #[arg(long)]
        field: PathBuf,
        #[arg(long)]
        spec: PathBuf,
    },
    /// Critical layer and energy identity of a field file.
    Rigidity {
        #[arg(long)]
        field: PathBuf,
        #[arg(short = 'c', long = "speed", default_value_t = 0.0, allow_hyphen_values = true)]
        c: f64,
        /// The field is a maximizer centred at `c`; use its Euler pair.
        #[arg(long)]
        maximizer: bool,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Rerun a manifest.json; the other run options are then ignored.
    #[arg(long)]
    manifest: Option<PathBuf>,
    #[arg(long, default_value = "steady")]
    mode: String,
    #[arg(short = 'c', long = "speed", default_value_t = 0.0, allow_hyphen_values = true)]
    c: f64,
    #[arg(long, value_delimiter = ',', default_values_t = vec![0.1, 0.05, 0.025])]
    eps: Vec<f64>,
    #[arg(long)]
    q: Option<f64>,
    /// Sets q = delta/4.
    #[arg(long, conflicts_with = "q")]
    delta: Option<f64>,
    /// NXxNY; chosen per eps when omitted.
    #[arg(long)]
    grid: Option<String>,
    #[arg(long = "Lx", default_value_t = 8.0)]
    lx: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.3)]
    theta: f64,
    #[arg(long, default_value_t = 5000)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    #[arg(long, default_value_t = 10)]
    steiner_every: usize,
    #[arg(long, default_value_t = 200)]
    phase1_steps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_grid(s: &str, lx: f64) -> Result<GridParams> {
    let (a, b) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| StudiesError::Manifest(format!("grid {s:?} is not NXxNY")))?;
    let n = |t: &str| t.trim().parse::<usize>().map_err(|_| StudiesError::Manifest(format!("grid {s:?} is not NXxNY")));
    Ok(GridParams { nx: n(a)?, ny: n(b)?, lx })
}

fn manifest_from(a: &RunArgs) -> Result<RunManifest> {
    if let Some(p) = &a.manifest {
        let text = std::fs::read_to_string(p).map_err(|source| StudiesError::Io { path: p.clone(), source })?;
        return RunManifest::from_json(&text);
    }
    let q = a.q.or(a.delta.map(|d| d / 4.0)).unwrap_or(DEFAULT_Q);
    let mode: Mode = a.mode.parse()?;
    let mut m = RunManifest::new(mode, a.c, a.eps.clone(), q);
    m.grid = a.grid.as_deref().map(|g| parse_grid(g, a.lx)).transpose()?;
    m.solver.theta = a.theta;
    m.solver.max_iters = a.max_iters;
    m.solver.tol = a.tol;
    m.solver.steiner_every = a.steiner_every;
    m.solver.phase1_steps = a.phase1_steps;
    m.seed = a.seed;
    m.validate()?;
    Ok(m)
}

fn run(a: &RunArgs) -> Result<ExitCode> {
    let m = manifest_from(a)?;
    let o = run_sweep(&m, &a.out)?;
    for r in &o.runs {
        match &r.status {
            equil_studies::RunStatus::Failed(msg) => eprintln!("eps {}: failed: {msg}", r.eps),
            s => eprintln!("eps {}: {}", r.eps, s.label()),
        }
    }
    eprintln!("wrote {}", a.out.display());
    Ok(if o.partial { ExitCode::from(2) } else { ExitCode::SUCCESS })
}

fn norms(field: &PathBuf, spec: &PathBuf) -> Result<ExitCode> {
    let f = read_field(field)?;
    let text = std::fs::read_to_string(spec).map_err(|source| StudiesError::Io { path: spec.clone(), source })?;
    let specs = battery::parse_requests(&text)?;
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(["label", "value", "notes"])?;
    for v in battery::evaluate(&f, &specs)? {
        w.write_record([v.spec.label(), v.value.to_string(), v.notes])?;
    }
    w.flush().map_err(|source| StudiesError::Io { path: "stdout".into(), source })?;
    Ok(ExitCode::SUCCESS)
}

fn rigidity(field: &PathBuf, c: f64, maximizer: bool) -> Result<ExitCode> {
    let f = read_field(field)?;
    let (w, c) = if maximizer { euler_frame(&f, c) } else { (f, c) };
    let sol = solve(&w)?;
    let layer = critical_layer(&sol.ux, c);
    let st = energy_identity_stats(&w, &sol, c)?;
    let count = |r: LayerRegime| layer.regime.iter().filter(|&&x| x == r).count();
    println!("monotone_ok,{}", layer.monotone_ok);
    println!("max_dy_ux,{}", layer.max_dy_ux);
    println!("interior_root_columns,{}", count(LayerRegime::InteriorRoot));
    println!("clamped_low_columns,{}", count(LayerRegime::ClampedLow));
    println!("clamped_high_columns,{}", count(LayerRegime::ClampedHigh));
    println!(
        "max_root_residual,{}",
        layer.root_residuals(&sol.ux).iter().fold(0.0f64, |a, r| a.max(r.abs()))
    );
    println!("lower_bound_margin,{}", layer.lower_bound_margin(&sol.ux));
    println!("lhs,{}", st.lhs);
    println!("rhs_direct,{}", st.rhs_direct);
    println!("rhs_weighted,{}", st.rhs_weighted);
    println!("rhs_weighted_half_floor,{}", st.rhs_weighted_half_floor);
    match st.ratio {
        Some(r) => println!("ratio,{r}"),
        None => println!("ratio,undefined"),
    }
    for msg in &sol.warnings {
        eprintln!("warning: {msg}");
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = match &cli.command {
        Command::Run(a) => run(a),
        Command::Norms { field, spec } => norms(field, spec),
        Command::Rigidity { field, c, maximizer } => rigidity(field, *c, *maximizer),
    };
    r.unwrap_or_else(|e| {
        eprintln!("error: {e}");
        ExitCode::FAILURE
    })
}
