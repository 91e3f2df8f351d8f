use std::f64::consts::TAU;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qrelax::basis::{basis_len, random_state, AngularState, PolarPoint};
use qrelax::drift::{
    classify, compute_drift_field, radial_drift_experiment, ClassifyOptions, GridSpec, RadialInit,
};
use qrelax::dynamics::{Flow, IntegratorConfig};
use qrelax::experiments::{
    exit_code, run_conjecture_campaign, run_survey, AnalysisConfig, CampaignConfig, SurveyConfig,
};
use qrelax::io as files;
use qrelax::nodes::{find_nodes, track_nodes, NodeSearch, TrackOptions};
use qrelax::vorticity::{
    generate_state_with_vorticity, node_free_radius, sample_vorticity_distribution,
    total_vorticity_bruteforce, total_vorticity_laurent, total_vorticity_theorem,
};

#[derive(Parser)]
#[command(name = "qrelax", version, about = "Trajectories, nodes, vorticity and drift fields of the 2-D isotropic oscillator")]
struct Cli {
    /// Log progress (repeat for more detail).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create or inspect state files.
    #[command(subcommand)]
    State(StateCommand),
    /// Total vorticity of a state.
    Vorticity {
        state: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Theorem)]
        method: Method,
        #[arg(long)]
        renormalize: bool,
    },
    /// Monte Carlo abundance of each total vorticity among random states.
    Abundance {
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// One-period drift field on a polar grid (CSV).
    Drift {
        state: PathBuf,
        /// Square grid size; overrides --n-eta/--n-phi.
        #[arg(long)]
        grid: Option<usize>,
        #[arg(long, default_value_t = 64)]
        n_eta: usize,
        #[arg(long, default_value_t = 64)]
        n_phi: usize,
        #[arg(long, default_value_t = 5.0)]
        eta_min: f64,
        #[arg(long, default_value_t = 20.0)]
        eta_max: f64,
        /// 100 x 100 grid.
        #[arg(long)]
        paper_scale: bool,
        #[command(flatten)]
        integrator: IntegratorArgs,
        #[arg(long)]
        renormalize: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Classify a drift-field CSV as type 0, 1 or 2 (JSON report).
    Classify {
        field: PathBuf,
        #[arg(long, value_delimiter = ',', default_value = "8,10,12")]
        probe: Vec<f64>,
        #[arg(long, default_value_t = 1e-3)]
        dead_zone: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Nodes at one time (JSON), or node tracks over an interval (CSV).
    Nodes {
        state: PathBuf,
        #[arg(long = "time", short = 't', default_value_t = 0.0)]
        time: f64,
        #[arg(long)]
        track: bool,
        #[arg(long, default_value_t = 0.0)]
        t0: f64,
        #[arg(long, default_value_t = TAU)]
        t1: f64,
        #[arg(long)]
        dt: Option<f64>,
        /// Where to write birth/death events (JSON) when tracking.
        #[arg(long)]
        events: Option<PathBuf>,
        #[arg(long)]
        renormalize: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// A single trajectory (CSV with columns T, eta, phi, Qx, Qy).
    Trajectory {
        state: PathBuf,
        #[arg(long)]
        eta: f64,
        #[arg(long, default_value_t = 0.0)]
        phi: f64,
        #[arg(long, default_value_t = 1)]
        periods: usize,
        #[command(flatten)]
        integrator: IntegratorArgs,
        #[arg(long)]
        renormalize: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Long-run radial displacement of an ensemble started far out.
    RadialDrift {
        state: PathBuf,
        #[arg(long, default_value_t = 100)]
        trajectories: usize,
        #[arg(long, default_value_t = 100)]
        periods: usize,
        /// Annulus `lo:hi` for the initial radii.
        #[arg(long, default_value = "10:20", value_parser = parse_range)]
        eta: (f64, f64),
        #[arg(long)]
        seed: u64,
        /// Uniform in radius instead of uniform in area.
        #[arg(long)]
        radius_uniform: bool,
        /// 1000 trajectories over 1000 periods.
        #[arg(long)]
        paper_scale: bool,
        #[command(flatten)]
        integrator: IntegratorArgs,
        #[arg(long)]
        renormalize: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Drift-field classification of random states for several basis sizes.
    Survey {
        /// Basis sizes M = (m+1)(m+2)/2.
        #[arg(long = "basis-sizes", value_delimiter = ',', default_value = "3,6,10,15")]
        basis_sizes: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// 100 states per size on a 100 x 100 grid.
        #[arg(long)]
        paper_scale: bool,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
    /// Check the zero-vorticity and maximal-vorticity conjectures.
    Conjectures {
        #[arg(long = "m", value_delimiter = ',', default_value = "1,2,3,4")]
        m_list: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        states: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// 1000 states per class on a 100 x 100 grid.
        #[arg(long)]
        paper_scale: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Subcommand)]
enum StateCommand {
    /// Random state over every basis function up to shell m.
    Random {
        #[arg(long)]
        m: usize,
        #[arg(long)]
        seed: u64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Random state with a prescribed total vorticity.
    WithVorticity {
        #[arg(long)]
        m: usize,
        #[arg(long, allow_hyphen_values = true)]
        n: i32,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 100_000)]
        max_attempts: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Summary of a state file.
    Info {
        state: PathBuf,
        #[arg(long)]
        renormalize: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Theorem,
    Laurent,
    Bruteforce,
}

#[derive(Args, Clone, Copy)]
struct IntegratorArgs {
    #[arg(long, default_value_t = 1e-10)]
    rel_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    abs_tol: f64,
    #[arg(long, default_value_t = 0.01 * TAU)]
    max_step: f64,
}

impl IntegratorArgs {
    fn config(self) -> IntegratorConfig<f64> {
        IntegratorConfig {
            rel_tol: self.rel_tol,
            abs_tol: self.abs_tol,
            max_step: self.max_step,
            ..IntegratorConfig::default()
        }
    }
}

fn parse_range(s: &str) -> Result<(f64, f64), String> {
    let (a, b) = s.split_once(':').ok_or("expected lo:hi")?;
    let lo: f64 = a.trim().parse().map_err(|e| format!("{e}"))?;
    let hi: f64 = b.trim().parse().map_err(|e| format!("{e}"))?;
    Ok((lo, hi))
}

enum Failure {
    Usage(String),
    Core(qrelax::Error),
    Counterexample,
}

impl From<qrelax::Error> for Failure {
    fn from(e: qrelax::Error) -> Self {
        Failure::Core(e)
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Core(e.into())
    }
}

fn exit_status(e: &qrelax::Error) -> i32 {
    use qrelax::Error::*;
    match e {
        InvalidInput(_) | Normalization { .. } | Schema(_) | Io(_) | Json(_) | Csv(_) => {
            exit_code::USAGE
        }
        _ => exit_code::NUMERICAL,
    }
}

fn sink(path: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn write_text(path: &Option<PathBuf>, text: &str) -> io::Result<()> {
    let mut w = sink(path)?;
    writeln!(w, "{text}")?;
    w.flush()
}

fn load(path: &Path, renormalize: bool) -> Result<AngularState<f64>, Failure> {
    Ok(files::load_state(path, renormalize)?)
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("report serializes")
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut stdout = io::stdout().lock();
    match cli.command {
        Command::State(cmd) => match cmd {
            StateCommand::Random { m, seed, output } => {
                write_text(&output, &files::state_to_json(&random_state(m, seed)))?;
            }
            StateCommand::WithVorticity { m, n, seed, max_attempts, output } => {
                let s = generate_state_with_vorticity(m, n, seed, max_attempts)?;
                write_text(&output, &files::state_to_json(&s))?;
            }
            StateCommand::Info { state, renormalize } => {
                let s = load(&state, renormalize)?;
                writeln!(stdout, "m = {} (M = {} basis states)", s.m(), basis_len(s.m()))?;
                writeln!(stdout, "norm^2 = {:.15}", s.norm_sqr())?;
                match total_vorticity_theorem(&s) {
                    Ok(r) => writeln!(stdout, "total vorticity n = {}", r.n)?,
                    Err(e) => writeln!(stdout, "total vorticity: {e}")?,
                }
                match node_free_radius(&s) {
                    Some(r) => writeln!(stdout, "node-free beyond eta = {r:.6}")?,
                    None => writeln!(stdout, "node-free radius: not certified")?,
                }
                writeln!(stdout, "{:>3} {:>3} {:>12} {:>12}", "nd", "ng", "|C|", "arg C")?;
                for (a, b, c) in s.terms() {
                    writeln!(stdout, "{a:>3} {b:>3} {:>12.9} {:>12.9}", c.norm(), c.arg())?;
                }
            }
        },
        Command::Vorticity { state, method, renormalize } => {
            let s = load(&state, renormalize)?;
            let report = match method {
                Method::Theorem => total_vorticity_theorem(&s)?,
                Method::Laurent => total_vorticity_laurent(&s)?,
                Method::Bruteforce => {
                    let r = node_free_radius(&s).ok_or_else(|| {
                        qrelax::Error::Degenerate("no certified node-free radius".into())
                    })?;
                    total_vorticity_bruteforce(&s, 1.5 * r + 1.0, 0.0, 64 * (s.m() + 1))?
                }
            };
            writeln!(stdout, "{}", json(&report))?;
        }
        Command::Abundance { m, samples, seed, output } => {
            let hist = sample_vorticity_distribution(m, samples, seed)?;
            write_text(&output, &json(&hist))?;
        }
        Command::Drift {
            state,
            grid,
            n_eta,
            n_phi,
            eta_min,
            eta_max,
            paper_scale,
            integrator,
            renormalize,
            output,
        } => {
            let s = load(&state, renormalize)?;
            let (n_eta, n_phi) = match (paper_scale, grid) {
                (true, _) => (100, 100),
                (false, Some(n)) => (n, n),
                (false, None) => (n_eta, n_phi),
            };
            let spec = GridSpec { eta_min, eta_max, n_eta, n_phi };
            let field = compute_drift_field(&s, &spec, &integrator.config())?;
            if field.aborted() > 0 {
                eprintln!("{} cell(s) aborted near a node", field.aborted());
            }
            let mut w = sink(&output)?;
            files::write_field_csv(&mut w, &field)?;
            w.flush()?;
        }
        Command::Classify { field, probe, dead_zone, output } => {
            let f = files::read_field_csv(File::open(&field)?)?;
            let opts = ClassifyOptions { dead_zone, ..ClassifyOptions::default() };
            let class = classify(&f, &probe, &opts)?;
            for d in &class.diagnostics {
                eprintln!("{d}");
            }
            write_text(&output, &json(&class))?;
        }
        Command::Nodes { state, time, track, t0, t1, dt, events, renormalize, output } => {
            let s = load(&state, renormalize)?;
            if track {
                let mut opts = TrackOptions::for_state(&s);
                if let Some(dt) = dt {
                    opts.dt = dt;
                }
                let tracking = track_nodes(&s, t0, t1, &opts)?;
                let mut w = sink(&output)?;
                files::write_tracks_csv(&mut w, &tracking)?;
                w.flush()?;
                if let Some(p) = events {
                    std::fs::write(p, files::events_to_json(&tracking) + "\n")?;
                }
                eprintln!(
                    "{} track(s), {} event(s), total winding {}",
                    tracking.tracks.len(),
                    tracking.events.len(),
                    tracking.total_winding
                );
            } else {
                let nodes = find_nodes(&s, time, &NodeSearch::for_state(&s))?;
                write_text(&output, &json(&nodes))?;
            }
        }
        Command::Trajectory { state, eta, phi, periods, integrator, renormalize, output } => {
            let s = load(&state, renormalize)?;
            let flow = Flow::new(&s, integrator.config());
            let traj = flow.evolve(PolarPoint::new(eta, phi), 0.0, TAU * periods as f64);
            let mut w = sink(&output)?;
            files::write_trajectory_csv(&mut w, &traj)?;
            w.flush()?;
            eprintln!("status: {:?}", traj.status);
        }
        Command::RadialDrift {
            state,
            trajectories,
            periods,
            eta,
            seed,
            radius_uniform,
            paper_scale,
            integrator,
            renormalize,
            output,
        } => {
            let s = load(&state, renormalize)?;
            let (n, p) = if paper_scale { (1000, 1000) } else { (trajectories, periods) };
            let init = if radius_uniform { RadialInit::RadiusUniform } else { RadialInit::AreaUniform };
            let report = radial_drift_experiment(&s, n, eta, p, seed, &integrator.config(), init)?;
            eprintln!(
                "median d_eta = {:.6e}, quartiles [{:.6e}, {:.6e}], aborted {}",
                report.median, report.lower_quartile, report.upper_quartile, report.aborted
            );
            let mut w = sink(&output)?;
            files::write_radial_csv(&mut w, &report)?;
            w.flush()?;
        }
        Command::Survey { basis_sizes, states, seed, grid, paper_scale, output_dir } => {
            let (states, grid) = if paper_scale { (100, 100) } else { (states, grid) };
            let cfg = SurveyConfig {
                m_list: basis_sizes,
                states_per_m: states,
                seed,
                analysis: AnalysisConfig { grid: GridSpec::square(grid), ..AnalysisConfig::default() },
            };
            let report = run_survey(&cfg)?;
            writeln!(stdout, "{:>4} {:>4} {:>6} {:>6} {:>6} {:>6}", "M", "n", "type0", "type1", "type2", "other")?;
            for e in &report.crosstab {
                writeln!(stdout, 
                    "{:>4} {:>4} {:>6} {:>6} {:>6} {:>6}",
                    e.big_m, e.n, e.type0, e.type1, e.type2, e.unclassified
                )?;
            }
            if report.failed > 0 {
                writeln!(stdout, "{} state(s) failed", report.failed)?;
            }
            if let Some(dir) = output_dir {
                std::fs::create_dir_all(&dir)?;
                report.write_csv(File::create(dir.join("survey.csv"))?)?;
                std::fs::write(dir.join("survey.json"), json(&report) + "\n")?;
            }
        }
        Command::Conjectures { m_list, states, seed, grid, paper_scale, output } => {
            let (states, grid) = if paper_scale { (1000, 100) } else { (states, grid) };
            let cfg = CampaignConfig {
                m_list,
                states_per_class: states,
                seed,
                max_attempts: 1_000_000,
                analysis: AnalysisConfig { grid: GridSpec::square(grid), ..AnalysisConfig::default() },
            };
            let report = run_conjecture_campaign(&cfg)?;
            writeln!(stdout, 
                "{:>3} {:>8} {:>7} {:>8} {:>12} {:>7} {:>10}",
                "m", "class", "tested", "counter", "inconclusive", "failed", "misaligned"
            )?;
            for s in &report.summary {
                writeln!(stdout, 
                    "{:>3} {:>8} {:>7} {:>8} {:>12} {:>7} {:>10}",
                    s.m,
                    format!("{:?}", s.conjecture).to_lowercase(),
                    s.tested,
                    s.counterexamples,
                    s.inconclusive,
                    s.failed,
                    s.misaligned
                )?;
            }
            if let Some(p) = output {
                std::fs::write(p, json(&report) + "\n")?;
            }
            if report.found_counterexample() {
                for c in &report.counterexamples {
                    eprintln!("counterexample: {}", serde_json::to_string(c).expect("serializes"));
                }
                return Err(Failure::Counterexample);
            }
        }
    }
    Ok(())
}

fn init_threads() -> Result<(), Failure> {
    if let Ok(v) = std::env::var("QRELAX_THREADS") {
        let n: usize = v
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Usage(format!("QRELAX_THREADS must be a positive integer, got {v:?}")))?;
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Usage(e.to_string()))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { exit_code::USAGE } else { exit_code::SUCCESS };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = init_threads().and_then(|_| run(cli));
    let code = match result {
        Ok(()) => exit_code::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            exit_code::USAGE
        }
        Err(Failure::Core(qrelax::Error::Io(e))) if e.kind() == io::ErrorKind::BrokenPipe => {
            exit_code::SUCCESS
        }
        Err(Failure::Core(e)) => {
            eprintln!("error: {e}");
            exit_status(&e)
        }
        Err(Failure::Counterexample) => exit_code::COUNTEREXAMPLE,
    };
    ExitCode::from(code as u8)
}
