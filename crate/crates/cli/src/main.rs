//! `gchirp`: Gaussian chirplet decomposition from the command line.
//!
//! Exit codes: 0 success (including partially converged fits, which carry a
//! warning in the report), 1 output or other I/O failure, 2 invalid or
//! degenerate input, 3 numerical failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "gchirp", version, about = "Gaussian chirplet decomposition of real band-limited signals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic test signal as CSV `t,f`.
    ///
    /// academic: amplitude (4-ω²)²(1/2+ω²) on [-2,2], zero phase,
    /// t = -256 + 0.25n for n = 0..2048.
    /// lolo-cubic / lolo-sin: amplitude (e^{-0.8|ω|³} - e^{-1.3|ω|³})/0.5 with phase
    /// ω³/50 or π(1-e^{-ω²})sin 2ω, 512 samples t = -5.12 + 0.02n (n = 0..511).
    Generate(GenerateArgs),
    /// Write the sampled spectrum of a signal as CSV `omega,h_even,h_odd,amplitude,phase`.
    Analyze(AnalyzeArgs),
    /// Write the amplitude extrema of a signal as CSV `location,value,second_deriv,kind`.
    Extrema(ExtremaArgs),
    /// Fit the amplitude hierarchically and write chirplet models, ledger and report.
    Decompose(DecomposeArgs),
    /// Synthesize the chirp sum of one or more models.
    Synthesize(SynthesizeArgs),
    /// Compare a model's synthesis with a signal in time and frequency.
    Roundtrip(RoundtripArgs),
    /// Remove a global least-squares polynomial trend from a `t,price` series.
    Detrend(DetrendArgs),
}

#[derive(Args)]
struct GenerateArgs {
    /// One of: academic, lolo-cubic, lolo-sin.
    #[arg(long)]
    generator: String,
    /// White-noise standard deviation relative to the signal RMS.
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Random seed; required when --noise-sigma is positive.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args, Clone, Copy)]
struct BandArgs {
    /// Half-width Ω of the analysis band (rad/s).
    #[arg(long, default_value_t = 4.0)]
    omega_max: f64,
    /// Number N of grid steps on [0, Ω]; the grid has 2N+1 points.
    #[arg(long, default_value_t = 1024)]
    n_freq: usize,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[command(flatten)]
    band: BandArgs,
    /// Amplitude, relative to its maximum, below which the phase is undefined.
    #[arg(long, default_value_t = 1e-6)]
    phase_floor: f64,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct ExtremaArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[command(flatten)]
    band: BandArgs,
    /// Minimum prominence relative to the amplitude maximum.
    #[arg(long, default_value_t = 1e-3)]
    prominence: f64,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Pointwise,
    L2,
}

#[derive(Args)]
struct DecomposeArgs {
    #[arg(long, short)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "l2")]
    method: MethodArg,
    /// Stop threshold: ‖A_n‖² for l2, max|A_n| for pointwise. Defaults to
    /// 1e-4‖A₀‖² (l2) or 1e-3 max A₀ (pointwise).
    #[arg(long)]
    eps_stop: Option<f64>,
    #[arg(long, alias = "levels", default_value_t = 8)]
    max_levels: usize,
    #[command(flatten)]
    band: BandArgs,
    /// Minimum extremum prominence relative to max|A_n| at each level. Signals
    /// truncated in time show spectral ripple; 0.15 keeps only the main bumps
    /// of the 512-sample lolo signals.
    #[arg(long, default_value_t = 1e-3)]
    prominence: f64,
    #[arg(long, default_value_t = 1e-6)]
    phase_floor: f64,
    /// Directory for model.json, model_level_<n>.json, ledger.json, report.csv,
    /// amplitude.csv, signal.csv and history_level_<n>.csv.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct TimeArgs {
    /// Take the time grid from an existing signal CSV.
    #[arg(long, conflicts_with_all = ["t_start", "dt", "len"])]
    like: Option<PathBuf>,
    #[arg(long, requires_all = ["dt", "len"], allow_hyphen_values = true)]
    t_start: Option<f64>,
    #[arg(long)]
    dt: Option<f64>,
    #[arg(long)]
    len: Option<usize>,
}

#[derive(Args)]
struct SynthesizeArgs {
    /// Chirplet model JSON; repeat to sum several levels.
    #[arg(long = "model", required = true)]
    models: Vec<PathBuf>,
    #[command(flatten)]
    time: TimeArgs,
    #[arg(long, short)]
    output: PathBuf,
}

#[derive(Args)]
struct RoundtripArgs {
    #[arg(long = "model", required = true)]
    models: Vec<PathBuf>,
    /// Original signal CSV.
    #[arg(long, short)]
    input: PathBuf,
    #[command(flatten)]
    band: BandArgs,
    /// Report CSV `metric,value`.
    #[arg(long, short)]
    output: PathBuf,
    /// Optional error series CSV `t,f,model,abs_error,log10_abs_error`.
    #[arg(long)]
    series: Option<PathBuf>,
}

#[derive(Args)]
struct DetrendArgs {
    /// CSV with columns `t,price`.
    #[arg(long, short)]
    input: PathBuf,
    /// Polynomial degree, 1 to 10.
    #[arg(long, default_value_t = 5)]
    degree: usize,
    /// CSV `t,price,trend,detrended`.
    #[arg(long, short)]
    output: PathBuf,
    /// Polynomial coefficients JSON; defaults to the output path with a .json extension.
    #[arg(long)]
    coefficients: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => commands::generate(a),
        Command::Analyze(a) => commands::analyze(a),
        Command::Extrema(a) => commands::extrema(a),
        Command::Decompose(a) => commands::decompose(a),
        Command::Synthesize(a) => commands::synthesize(a),
        Command::Roundtrip(a) => commands::roundtrip(a),
        Command::Detrend(a) => commands::detrend(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {:#}", e.source);
            ExitCode::from(e.code)
        }
    }
}
