//! CSV and JSON interchange for signals, spectra, mixtures, chirplet models
//! and refinement ledgers. Values are written with shortest round-trip
//! formatting so repeated runs produce identical bytes.

use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::chirplet::{CenterChirp, ChirpAtom, ChirpletModel};
use crate::error::{Error, Result};
use crate::extrema::ExtremaReport;
use crate::gaussian::{GaussianAtom, SignedMixture};
use crate::hierarchy::{Method, RefinementLedger, StopReason};
use crate::l2::AscentRecord;
use crate::spectrum::{RealSignal, SampledSpectrum};

/// Relative tolerance on the sample spacing of an input signal.
pub const SPACING_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterJson {
    pub alpha: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomJson {
    pub alpha: f64,
    pub omega: f64,
    pub sigma: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixtureJson {
    pub center: Option<CenterJson>,
    pub positive: Vec<AtomJson>,
    pub negative: Vec<AtomJson>,
}

impl From<&SignedMixture<f64>> for MixtureJson {
    fn from(m: &SignedMixture<f64>) -> Self {
        let atom = |a: &GaussianAtom<f64>| AtomJson { alpha: a.alpha, omega: a.omega_c, sigma: a.sigma };
        Self {
            center: m.center.map(|c| CenterJson { alpha: c.alpha, sigma: c.sigma }),
            positive: m.positive.iter().map(atom).collect(),
            negative: m.negative.iter().map(atom).collect(),
        }
    }
}

impl TryFrom<&MixtureJson> for SignedMixture<f64> {
    type Error = Error;

    fn try_from(m: &MixtureJson) -> Result<Self> {
        let mix = SignedMixture {
            center: m.center.map(|c| GaussianAtom::center(c.alpha, c.sigma)),
            positive: m.positive.iter().map(|a| GaussianAtom::pair(a.alpha, a.omega, a.sigma)).collect(),
            negative: m.negative.iter().map(|a| GaussianAtom::pair(a.alpha, a.omega, a.sigma)).collect(),
        };
        mix.validate()?;
        Ok(mix)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CenterChirpJson {
    pub alpha0: f64,
    pub sigma0: f64,
    pub t0: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChirpAtomJson {
    pub alpha: f64,
    pub omega: f64,
    pub sigma: f64,
    pub gamma: f64,
    pub t: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelJson {
    pub center: Option<CenterChirpJson>,
    pub atoms: Vec<ChirpAtomJson>,
}

impl From<&ChirpletModel<f64>> for ModelJson {
    fn from(m: &ChirpletModel<f64>) -> Self {
        Self {
            center: m.center.map(|c| CenterChirpJson { alpha0: c.alpha0, sigma0: c.sigma0, t0: c.t0 }),
            atoms: m
                .atoms
                .iter()
                .map(|a| ChirpAtomJson {
                    alpha: a.alpha,
                    omega: a.omega,
                    sigma: a.sigma,
                    gamma: a.gamma,
                    t: a.t,
                    kappa: a.kappa,
                })
                .collect(),
        }
    }
}

impl TryFrom<&ModelJson> for ChirpletModel<f64> {
    type Error = Error;

    fn try_from(m: &ModelJson) -> Result<Self> {
        let model = ChirpletModel {
            center: m.center.map(|c| CenterChirp { alpha0: c.alpha0, sigma0: c.sigma0, t0: c.t0 }),
            atoms: m
                .atoms
                .iter()
                .map(|a| ChirpAtom {
                    alpha: a.alpha,
                    omega: a.omega,
                    sigma: a.sigma,
                    gamma: a.gamma,
                    t: a.t,
                    kappa: a.kappa,
                })
                .collect(),
        };
        model.validate()?;
        Ok(model)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelJson {
    pub level: usize,
    pub mixture: MixtureJson,
    pub q_max: Option<f64>,
    pub input_sq_norm: f64,
    pub residual_sq_norm: f64,
    pub residual_max: f64,
    pub residual_min: f64,
    pub p_n: usize,
    pub q_n: usize,
    pub has_center: bool,
    pub converged: bool,
    pub atom_count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LedgerJson {
    pub method: Method,
    pub eps_stop: f64,
    pub original_sq_norm: f64,
    pub stop_reason: StopReason,
    pub failure: Option<String>,
    pub levels: Vec<LevelJson>,
}

impl From<&RefinementLedger<f64>> for LedgerJson {
    fn from(l: &RefinementLedger<f64>) -> Self {
        Self {
            method: l.method,
            eps_stop: l.eps_stop,
            original_sq_norm: l.original_sq_norm,
            stop_reason: l.stop_reason,
            failure: l.failure.clone(),
            levels: l
                .levels
                .iter()
                .enumerate()
                .map(|(level, r)| LevelJson {
                    level,
                    mixture: (&r.mixture).into(),
                    q_max: r.q_max,
                    input_sq_norm: r.input_sq_norm,
                    residual_sq_norm: r.residual_sq_norm,
                    residual_max: r.residual_max,
                    residual_min: r.residual_min,
                    p_n: r.p_n,
                    q_n: r.q_n,
                    has_center: r.has_center,
                    converged: r.converged,
                    atom_count: r.atom_count,
                })
                .collect(),
        }
    }
}

pub fn write_json<W: Write, S: Serialize>(writer: W, value: &S) -> Result<()> {
    let mut w = writer;
    serde_json::to_writer_pretty(&mut w, value)?;
    w.write_all(b"\n")?;
    Ok(())
}

pub fn read_json<R: Read, D: for<'de> Deserialize<'de>>(reader: R) -> Result<D> {
    Ok(serde_json::from_reader(reader)?)
}

pub fn save_json<S: Serialize>(path: &Path, value: &S) -> Result<()> {
    write_json(std::io::BufWriter::new(std::fs::File::create(path)?), value)
}

pub fn load_json<D: for<'de> Deserialize<'de>>(path: &Path) -> Result<D> {
    read_json(std::io::BufReader::new(std::fs::File::open(path)?))
}

fn column(headers: &csv::StringRecord, name: &str) -> Result<usize> {
    headers.iter().position(|h| h.trim() == name).ok_or_else(|| Error::input(format!("missing CSV column {name:?}")))
}

/// `t,<value>` pairs from a CSV with a header row.
pub fn read_columns<R: Read>(reader: R, t_name: &str, v_name: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let (it, iv) = (column(&headers, t_name)?, column(&headers, v_name)?);
    let (mut t, mut v) = (Vec::new(), Vec::new());
    for (row, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let parse = |i: usize| -> Result<f64> {
            let field = rec.get(i).unwrap_or("");
            field
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::input(format!("row {}: invalid number {field:?}", row + 1)))
        };
        t.push(parse(it)?);
        v.push(parse(iv)?);
    }
    Ok((t, v))
}

/// Signal CSV `t,f` with uniformly spaced, increasing times.
pub fn read_signal<R: Read>(reader: R) -> Result<RealSignal<f64>> {
    let (t, f) = read_columns(reader, "t", "f")?;
    if t.len() < 2 {
        return Err(Error::input("a signal needs at least two samples"));
    }
    let dt = (t[t.len() - 1] - t[0]) / (t.len() - 1) as f64;
    if !(dt > 0.0) {
        return Err(Error::input("sample times must increase"));
    }
    for (n, &tn) in t.iter().enumerate() {
        if ((tn - (t[0] + n as f64 * dt)) / dt).abs() > SPACING_TOLERANCE * t.len() as f64 {
            return Err(Error::input(format!("sample times are not uniformly spaced (row {})", n + 1)));
        }
    }
    RealSignal::new(f, t[0], dt)
}

pub fn write_signal<W: Write>(writer: W, signal: &RealSignal<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["t", "f"])?;
    for (t, f) in signal.times().iter().zip(signal.samples()) {
        w.write_record([t.to_string(), f.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn load_signal(path: &Path) -> Result<RealSignal<f64>> {
    read_signal(std::fs::File::open(path)?)
}

pub fn save_signal(path: &Path, signal: &RealSignal<f64>) -> Result<()> {
    write_signal(std::fs::File::create(path)?, signal)
}

/// Spectrum CSV `omega,h_even,h_odd,amplitude,phase`.
pub fn write_spectrum<W: Write>(writer: W, spec: &SampledSpectrum<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["omega", "h_even", "h_odd", "amplitude", "phase"])?;
    for i in 0..spec.n_freq() {
        w.write_record([
            spec.grid().omega(i).to_string(),
            spec.h_even()[i].to_string(),
            spec.h_odd()[i].to_string(),
            spec.amplitude()[i].to_string(),
            spec.phase()[i].to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Extrema CSV `location,value,second_deriv,kind`, origin first.
pub fn write_extrema<W: Write>(writer: W, report: &ExtremaReport<f64>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["location", "value", "second_deriv", "kind"])?;
    for p in report.origin_point().iter().chain(&report.points) {
        w.write_record([
            p.location.to_string(),
            p.value.to_string(),
            p.second_deriv.to_string(),
            p.kind.as_str().into(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Ascent history CSV `iter,q,step,grad_norm`.
pub fn write_history<W: Write>(writer: W, history: &[AscentRecord<f64>]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["iter", "q", "step", "grad_norm"])?;
    for r in history {
        w.write_record([r.iter.to_string(), r.q.to_string(), r.step.to_string(), r.grad_norm.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Two-column `metric,value` report.
pub fn write_report<W: Write>(writer: W, rows: &[(String, String)]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["metric", "value"])?;
    for (k, v) in rows {
        w.write_record([k, v])?;
    }
    w.flush()?;
    Ok(())
}

/// Generic table with a header row.
pub fn write_table<W: Write>(writer: W, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(header)?;
    for row in rows {
        w.write_record(row.iter().map(|v| v.to_string()))?;
    }
    w.flush()?;
    Ok(())
}
