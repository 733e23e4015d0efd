use std::fmt::Display;
use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};

use anyhow::anyhow;
use gchirp::experiments::Generator;
use gchirp::io::{self, LedgerJson, ModelJson};
use gchirp::pipeline::{self, DecomposeConfig};
use gchirp::{find_extrema, Error, Method, Model, Signal, TimeGrid};

use crate::{
    AnalyzeArgs, BandArgs, DecomposeArgs, DetrendArgs, ExtremaArgs, GenerateArgs, MethodArg, RoundtripArgs,
    SynthesizeArgs, TimeArgs,
};

pub const EXIT_IO: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERIC: u8 = 3;

pub struct Failure {
    pub code: u8,
    pub source: anyhow::Error,
}

type CmdResult<T = ()> = Result<T, Failure>;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidInput(_)
        | Error::Domain(_)
        | Error::Degenerate(_)
        | Error::RejectedTarget { .. }
        | Error::Csv(_)
        | Error::Json(_) => EXIT_INPUT,
        Error::IllConditioned { .. } | Error::PhaseInvalid { .. } => EXIT_NUMERIC,
        Error::Io(_) => EXIT_IO,
    }
}

trait Classify<T> {
    /// Failure while reading user input: always the input exit code.
    fn reading(self, what: impl Display) -> CmdResult<T>;
    /// Failure while writing results.
    fn writing(self, path: &Path) -> CmdResult<T>;
    /// Library failure classified by its kind.
    fn lib(self) -> CmdResult<T>;
}

impl<T> Classify<T> for gchirp::Result<T> {
    fn reading(self, what: impl Display) -> CmdResult<T> {
        self.map_err(|e| Failure { code: EXIT_INPUT, source: anyhow!(e).context(format!("reading {what}")) })
    }

    fn writing(self, path: &Path) -> CmdResult<T> {
        self.map_err(|e| Failure { code: EXIT_IO, source: anyhow!(e).context(format!("writing {}", path.display())) })
    }

    fn lib(self) -> CmdResult<T> {
        self.map_err(|e| Failure { code: exit_code(&e), source: anyhow!(e) })
    }
}

fn input_error(msg: impl Display) -> Failure {
    Failure { code: EXIT_INPUT, source: anyhow!("{msg}") }
}

fn create(path: &Path) -> CmdResult<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| Failure { code: EXIT_IO, source: anyhow!(e).context(format!("creating {}", path.display())) })
}

fn load_signal(path: &Path) -> CmdResult<Signal> {
    io::load_signal(path).reading(path.display())
}

fn load_model(path: &Path) -> CmdResult<Model> {
    let json: ModelJson = io::load_json(path).reading(path.display())?;
    Model::try_from(&json).reading(path.display())
}

fn check_band(band: &BandArgs) -> CmdResult {
    if !(band.omega_max > 0.0 && band.omega_max.is_finite()) || band.n_freq < 2 {
        return Err(input_error("--omega-max must be positive and --n-freq at least 2"));
    }
    Ok(())
}

pub fn generate(a: GenerateArgs) -> CmdResult {
    let generator: Generator = a.generator.parse().lib()?;
    let signal = generator.signal::<f64>(a.noise_sigma, a.seed).lib()?;
    io::save_signal(&a.output, &signal).writing(&a.output)
}

pub fn analyze(a: AnalyzeArgs) -> CmdResult {
    check_band(&a.band)?;
    let signal = load_signal(&a.input)?;
    let spec = pipeline::spectrum_of(&signal, a.band.omega_max, a.band.n_freq, a.phase_floor).lib()?;
    if spec.boundary_warning() {
        eprintln!("warning: amplitude is not negligible at ±Ω = {}", a.band.omega_max);
    }
    io::write_spectrum(create(&a.output)?, &spec).writing(&a.output)
}

pub fn extrema(a: ExtremaArgs) -> CmdResult {
    check_band(&a.band)?;
    let signal = load_signal(&a.input)?;
    let spec = gchirp::compute_spectrum(&signal, a.band.omega_max, a.band.n_freq).lib()?;
    let amp = spec.amplitude_fn();
    let report = find_extrema(amp.half(), spec.grid().step(), a.prominence * amp.max_abs()).lib()?;
    if !report.rejected.is_empty() {
        eprintln!("warning: {} degenerate extrema rejected", report.rejected.len());
    }
    io::write_extrema(create(&a.output)?, &report).writing(&a.output)
}

fn level_model_path(dir: &Path, level: usize) -> PathBuf {
    if level == 0 {
        dir.join("model.json")
    } else {
        dir.join(format!("model_level_{level}.json"))
    }
}

pub fn decompose(a: DecomposeArgs) -> CmdResult {
    check_band(&a.band)?;
    if a.eps_stop.is_some_and(|e| e.is_nan() || e <= 0.0) {
        return Err(input_error("--eps-stop must be positive"));
    }
    let signal = load_signal(&a.input)?;
    let config = DecomposeConfig {
        omega_max: a.band.omega_max,
        n_freq: a.band.n_freq,
        method: match a.method {
            MethodArg::Pointwise => Method::Pointwise,
            MethodArg::L2 => Method::L2,
        },
        eps_stop: a.eps_stop,
        max_levels: a.max_levels,
        prominence: a.prominence,
        phase_floor: a.phase_floor,
    };
    let d = pipeline::decompose(&signal, &config).lib()?;
    let dir = &a.out_dir;
    std::fs::create_dir_all(dir)
        .map_err(|e| Failure { code: EXIT_IO, source: anyhow!(e).context(format!("creating {}", dir.display())) })?;

    let empty = Model::default();
    let level0 = d.models.first().unwrap_or(&empty);
    let path = level_model_path(dir, 0);
    io::save_json(&path, &ModelJson::from(level0)).writing(&path)?;
    for (n, m) in d.models.iter().enumerate().skip(1) {
        let path = level_model_path(dir, n);
        io::save_json(&path, &ModelJson::from(m)).writing(&path)?;
    }
    let path = dir.join("ledger.json");
    io::save_json(&path, &LedgerJson::from(&d.ledger)).writing(&path)?;
    for (n, level) in d.ledger.levels.iter().enumerate() {
        if !level.history.is_empty() {
            let path = dir.join(format!("history_level_{n}.csv"));
            io::write_history(create(&path)?, &level.history).writing(&path)?;
        }
    }
    let path = dir.join("amplitude.csv");
    let grid = d.spectrum.grid();
    let rows = (0..grid.len()).map(|i| {
        vec![
            grid.omega(i),
            d.spectrum.amplitude()[i],
            d.amplitude_model[i],
            d.spectrum.phase()[i],
            f64::from(u8::from(d.spectrum.phase_valid()[i])),
        ]
    });
    io::write_table(create(&path)?, &["omega", "amplitude", "model", "phase", "phase_valid"], rows).writing(&path)?;
    let path = dir.join("signal.csv");
    io::write_table(
        create(&path)?,
        &["t", "f", "model", "abs_error", "log10_abs_error"],
        error_rows(&signal, &d.reconstruction),
    )
    .writing(&path)?;
    let rows = pipeline::report_rows(&d);
    if let Some((_, w)) = rows.iter().find(|(k, w)| k == "warning" && !w.is_empty()) {
        eprintln!("warning: {w}");
    }
    let path = dir.join("report.csv");
    io::write_report(create(&path)?, &rows).writing(&path)
}

fn error_rows<'a>(signal: &'a Signal, model: &'a Signal) -> impl Iterator<Item = Vec<f64>> + 'a {
    signal.times().into_iter().zip(signal.samples()).zip(model.samples()).map(|((t, &f), &m)| {
        let e = (f - m).abs();
        vec![t, f, m, e, e.log10()]
    })
}

fn time_grid(t: &TimeArgs) -> CmdResult<TimeGrid<f64>> {
    if let Some(path) = &t.like {
        return Ok(load_signal(path)?.time_grid());
    }
    match (t.t_start, t.dt, t.len) {
        (Some(t0), Some(dt), Some(len)) => TimeGrid::new(t0, dt, len).lib(),
        _ => Err(input_error("give either --like or all of --t-start, --dt and --len")),
    }
}

pub fn synthesize(a: SynthesizeArgs) -> CmdResult {
    let models = a.models.iter().map(|p| load_model(p)).collect::<CmdResult<Vec<_>>>()?;
    let grid = time_grid(&a.time)?;
    let signal = gchirp::chirplet::synthesize_levels(&models, &grid).lib()?;
    io::save_signal(&a.output, &signal).writing(&a.output)
}

pub fn roundtrip(a: RoundtripArgs) -> CmdResult {
    check_band(&a.band)?;
    let models = a.models.iter().map(|p| load_model(p)).collect::<CmdResult<Vec<_>>>()?;
    let signal = load_signal(&a.input)?;
    let r = pipeline::roundtrip(&signal, &models, a.band.omega_max, a.band.n_freq).lib()?;
    let rows = vec![
        ("time_rel_error".to_string(), r.time_error.to_string()),
        ("freq_rel_error".to_string(), r.freq_error.to_string()),
        ("model_freq_rel_error".to_string(), r.model_freq_error.to_string()),
    ];
    io::write_report(create(&a.output)?, &rows).writing(&a.output)?;
    if let Some(path) = &a.series {
        io::write_table(
            create(path)?,
            &["t", "f", "model", "abs_error", "log10_abs_error"],
            error_rows(&signal, &r.reconstruction),
        )
        .writing(path)?;
    }
    Ok(())
}

pub fn detrend(a: DetrendArgs) -> CmdResult {
    let file = File::open(&a.input).map_err(|e| Failure {
        code: EXIT_INPUT,
        source: anyhow!(e).context(format!("reading {}", a.input.display())),
    })?;
    let (t, price) = io::read_columns(file, "t", "price").reading(a.input.display())?;
    let (residual, poly) = gchirp::detrend::detrend(&t, &price, a.degree).lib()?;
    let rows = t.iter().zip(&price).zip(&residual).map(|((&t, &p), &r)| vec![t, p, p - r, r]);
    io::write_table(create(&a.output)?, &["t", "price", "trend", "detrended"], rows).writing(&a.output)?;
    let sidecar = a.coefficients.clone().unwrap_or_else(|| a.output.with_extension("json"));
    io::save_json(&sidecar, &poly).writing(&sidecar)
}
