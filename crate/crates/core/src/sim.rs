//! AWGN/BPSK Monte Carlo sweeps.
//!
//! Frame `t` of a sweep point draws its payload and noise from a ChaCha8
//! stream selected by `t`, keyed by the sweep seed and the Eb/N0 value.
//! Frames are simulated in fixed-size chunks and the stop rule is applied
//! in frame order, so results do not depend on the number of workers.

use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::code::{channel_llr, ebno_to_sigma, CodeSpec};
use crate::error::{Error, Result};
use crate::gaussian::{build_ta_config, min_c, GaussianTable, TaConfig};
use crate::sc::ArithMode;
use crate::srfsc::{Decoder, Workspace};
use crate::ta::{decode_multistage_with, decode_ta_with};
use crate::tree::LatencyModel;
use crate::Bit;

/// Frames simulated between stop-rule checks.
const CHUNK: u64 = 256;

/// BPSK (`0 -> +1`, `1 -> -1`) over AWGN, returned as channel LLRs.
pub fn awgn_channel<R: Rng + ?Sized>(x: &[Bit], sigma: f64, rng: &mut R) -> Result<Vec<f64>> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::domain("sigma", sigma, "> 0"));
    }
    let y: Vec<f64> = x
        .iter()
        .map(|&b| {
            let s = if b == 0 { 1.0 } else { -1.0 };
            let noise: f64 = rng.sample(StandardNormal);
            s + sigma * noise
        })
        .collect();
    channel_llr(&y, sigma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum DecoderChoice {
    Sc,
    Srfsc,
    /// TA-SRFSC; `c` defaults to [`min_c`].
    Ta {
        epsilon: f64,
        c: Option<f64>,
    },
    /// TA-SRFSC followed by SRFSC on CRC failure.
    Multistage {
        epsilon: f64,
        c: Option<f64>,
    },
}

impl DecoderChoice {
    fn ta_params(&self) -> Option<(f64, Option<f64>)> {
        match *self {
            DecoderChoice::Ta { epsilon, c } | DecoderChoice::Multistage { epsilon, c } => {
                Some((epsilon, c))
            }
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct StopRule {
    pub max_errors: u64,
    pub max_frames: u64,
}

impl Default for StopRule {
    fn default() -> Self {
        Self {
            max_errors: 100,
            max_frames: 1_000_000,
        }
    }
}

impl StopRule {
    pub fn validate(&self) -> Result<()> {
        if self.max_errors == 0 || self.max_frames == 0 {
            return Err(Error::InvalidStopRule(format!(
                "max_errors = {} and max_frames = {} must both be positive",
                self.max_errors, self.max_frames
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SweepOptions {
    /// Worker threads; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    pub mode: ArithMode,
    pub model: LatencyModel,
}

/// One row of a sweep report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub ebno_db: f64,
    pub sigma: f64,
    pub frames: u64,
    pub frame_errors: u64,
    pub bler: f64,
    pub avg_steps: f64,
    pub avg_cycles: f64,
    pub p_redecode: f64,
    pub avg_comparisons: f64,
    pub seed: u64,
}

/// Per-frame result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct FrameOutcome {
    pub error: bool,
    pub steps: u64,
    pub cycles: u64,
    pub comparisons: u64,
    pub hard_decided: u64,
    pub redecoded: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
struct Totals {
    frames: u64,
    errors: u64,
    steps: u64,
    cycles: u64,
    comparisons: u64,
    redecodes: u64,
}

impl Totals {
    fn add(&mut self, o: &FrameOutcome) {
        self.frames += 1;
        self.errors += u64::from(o.error);
        self.steps += o.steps;
        self.cycles += o.cycles;
        self.comparisons += o.comparisons;
        self.redecodes += u64::from(o.redecoded);
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Everything needed to simulate frames at one Eb/N0.
#[derive(Debug, Clone)]
pub struct PointContext<'a> {
    decoder: &'a Decoder,
    choice: DecoderChoice,
    ta: Option<TaConfig>,
    pub ebno_db: f64,
    pub sigma: f64,
    stream_key: u64,
}

impl<'a> PointContext<'a> {
    /// The threshold table, when needed, is built for this point's noise
    /// level.
    pub fn new(
        decoder: &'a Decoder,
        choice: DecoderChoice,
        ebno_db: f64,
        seed: u64,
    ) -> Result<Self> {
        let spec = decoder.spec();
        if !ebno_db.is_finite() {
            return Err(Error::domain("Eb/N0", ebno_db, "finite"));
        }
        if matches!(choice, DecoderChoice::Multistage { .. }) && spec.crc().is_none() {
            return Err(Error::CrcRequired);
        }
        let sigma = ebno_to_sigma(ebno_db, spec.rate());
        let ta = match choice.ta_params() {
            Some((epsilon, c)) => {
                let c = match c {
                    Some(c) => c,
                    None => min_c(epsilon, spec.n())?,
                };
                let table = GaussianTable::compute(spec.n(), sigma)?;
                Some(build_ta_config(&table, epsilon, c)?)
            }
            None => None,
        };
        Ok(Self {
            decoder,
            choice,
            ta,
            ebno_db,
            sigma,
            stream_key: splitmix64(seed ^ splitmix64(ebno_db.to_bits())),
        })
    }

    pub fn decoder(&self) -> &'a Decoder {
        self.decoder
    }

    pub fn ta(&self) -> Option<&TaConfig> {
        self.ta.as_ref()
    }

    /// Payload and channel LLRs of frame `index`.
    pub fn frame(&self, index: u64) -> Result<(Vec<Bit>, Vec<f64>)> {
        let spec = self.decoder.spec();
        let mut rng = ChaCha8Rng::seed_from_u64(self.stream_key);
        rng.set_stream(index);
        let payload: Vec<Bit> = (0..spec.payload_len())
            .map(|_| Bit::from(rng.gen::<bool>()))
            .collect();
        let frame = crate::code::encode(spec, &payload)?;
        let llr = awgn_channel(&frame.x, self.sigma, &mut rng)?;
        Ok((payload, llr))
    }

    pub fn simulate(&self, index: u64, ws: &mut Workspace) -> Result<FrameOutcome> {
        let (payload, llr) = self.frame(index)?;
        let spec = self.decoder.spec();
        let mut out = FrameOutcome::default();
        let u_hat: Vec<Bit> = match (self.choice, &self.ta) {
            (DecoderChoice::Ta { .. }, Some(ta)) => {
                let o = decode_ta_with(self.decoder, ta, &llr, ws)?;
                out.steps = o.steps;
                out.cycles = o.cycles;
                out.comparisons = o.comparisons;
                out.hard_decided = o.hard_decided.len() as u64;
                o.u_hat
            }
            (DecoderChoice::Multistage { .. }, Some(ta)) => {
                let o = decode_multistage_with(self.decoder, ta, &llr, ws)?;
                out.steps = o.steps_total;
                out.cycles = o.cycles_total;
                out.comparisons = o.first.comparisons;
                out.hard_decided = o.first.hard_decided.len() as u64;
                out.redecoded = o.attempts == 2;
                o.u_hat
            }
            _ => {
                let stats = self.decoder.decode_with(&llr, None, ws)?;
                out.steps = stats.steps;
                out.cycles = stats.cycles;
                ws.u_hat().to_vec()
            }
        };
        let info = spec.extract_info(&u_hat);
        out.error = info[..payload.len()] != payload[..];
        Ok(out)
    }
}

/// Builds the decoder a choice runs on.
pub fn decoder_for(spec: &CodeSpec, choice: DecoderChoice, opts: &SweepOptions) -> Decoder {
    let base = match choice {
        DecoderChoice::Sc => Decoder::sc(spec),
        _ => Decoder::srfsc(spec),
    };
    base.with_mode(opts.mode).with_model(opts.model)
}

/// Simulates every Eb/N0 point until the stop rule fires.
pub fn run_sweep(
    spec: &CodeSpec,
    choice: DecoderChoice,
    ebno_list: &[f64],
    stop: StopRule,
    seed: u64,
    opts: &SweepOptions,
) -> Result<Vec<SweepPoint>> {
    if ebno_list.is_empty() {
        return Err(Error::Empty("Eb/N0 list"));
    }
    stop.validate()?;
    let decoder = decoder_for(spec, choice, opts);
    let pool = match opts.workers {
        Some(w) => Some(
            rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Io(std::io::Error::other(e)))?,
        ),
        None => None,
    };
    let mut points = Vec::with_capacity(ebno_list.len());
    for &ebno in ebno_list {
        let ctx = PointContext::new(&decoder, choice, ebno, seed)?;
        let totals = match &pool {
            Some(p) => p.install(|| run_point(&ctx, stop)),
            None => run_point(&ctx, stop),
        }?;
        let f = totals.frames as f64;
        points.push(SweepPoint {
            ebno_db: ebno,
            sigma: ctx.sigma,
            frames: totals.frames,
            frame_errors: totals.errors,
            bler: totals.errors as f64 / f,
            avg_steps: totals.steps as f64 / f,
            avg_cycles: totals.cycles as f64 / f,
            p_redecode: totals.redecodes as f64 / f,
            avg_comparisons: totals.comparisons as f64 / f,
            seed,
        });
    }
    Ok(points)
}

fn run_point(ctx: &PointContext<'_>, stop: StopRule) -> Result<Totals> {
    let mut totals = Totals::default();
    let mut next = 0u64;
    while next < stop.max_frames {
        let end = (next + CHUNK).min(stop.max_frames);
        let outcomes: Vec<Result<FrameOutcome>> = (next..end)
            .into_par_iter()
            .map_init(|| ctx.decoder.workspace(), |ws, t| ctx.simulate(t, ws))
            .collect();
        for o in outcomes {
            totals.add(&o?);
            if totals.errors >= stop.max_errors {
                return Ok(totals);
            }
        }
        next = end;
    }
    Ok(totals)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl ReportFormat {
    /// `.json` selects JSON, anything else CSV.
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("json") => ReportFormat::Json,
            _ => ReportFormat::Csv,
        }
    }
}

pub const CSV_HEADER: [&str; 9] = [
    "ebno_db",
    "frames",
    "frame_errors",
    "bler",
    "avg_steps",
    "avg_cycles",
    "p_redecode",
    "avg_comparisons",
    "seed",
];

/// Rounds to six significant digits.
pub fn sig6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

fn rounded(p: &SweepPoint) -> SweepPoint {
    SweepPoint {
        ebno_db: sig6(p.ebno_db),
        sigma: sig6(p.sigma),
        bler: sig6(p.bler),
        avg_steps: sig6(p.avg_steps),
        avg_cycles: sig6(p.avg_cycles),
        p_redecode: sig6(p.p_redecode),
        avg_comparisons: sig6(p.avg_comparisons),
        ..p.clone()
    }
}

/// Serialises a report to bytes.
pub fn render_report(points: &[SweepPoint], format: ReportFormat) -> Result<Vec<u8>> {
    if points.is_empty() {
        return Err(Error::Empty("report"));
    }
    let rows: Vec<SweepPoint> = points.iter().map(rounded).collect();
    match format {
        ReportFormat::Json => {
            let mut out = serde_json::to_vec_pretty(&rows)?;
            out.push(b'\n');
            Ok(out)
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            for p in &rows {
                w.write_record([
                    p.ebno_db.to_string(),
                    p.frames.to_string(),
                    p.frame_errors.to_string(),
                    p.bler.to_string(),
                    p.avg_steps.to_string(),
                    p.avg_cycles.to_string(),
                    p.p_redecode.to_string(),
                    p.avg_comparisons.to_string(),
                    p.seed.to_string(),
                ])?;
            }
            w.into_inner()
                .map_err(|e| Error::Io(std::io::Error::other(e.to_string())))
        }
    }
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.flush()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

pub fn emit_report(points: &[SweepPoint], format: ReportFormat, path: &Path) -> Result<()> {
    let bytes = render_report(points, format)?;
    write_atomic(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::construct_frozen_set;

    #[test]
    fn awgn_near_noiseless() {
        let x = [0, 1, 1, 0, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let llr = awgn_channel(&x, 1e-3, &mut rng).unwrap();
        for (&b, &l) in x.iter().zip(&llr) {
            assert_eq!(b == 1, l < 0.0);
        }
        assert!(awgn_channel(&x, 0.0, &mut rng).is_err());
    }

    #[test]
    fn awgn_is_deterministic() {
        let x = vec![0; 64];
        let a = awgn_channel(&x, 0.8, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        let b = awgn_channel(&x, 0.8, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn awgn_llr_mean() {
        let sigma: f64 = 0.9;
        let draws = 100_000;
        let llr = awgn_channel(&vec![0; draws], sigma, &mut ChaCha8Rng::seed_from_u64(11)).unwrap();
        let mean = llr.iter().sum::<f64>() / draws as f64;
        let want = 2.0 / (sigma * sigma);
        // LLR variance is 2 * mean.
        let se = (2.0 * want / draws as f64).sqrt();
        assert!((mean - want).abs() < 3.0 * se, "{mean} vs {want}");
    }

    #[test]
    fn report_formats() {
        let p = SweepPoint {
            ebno_db: 2.5,
            sigma: 0.7498942093324559,
            frames: 1234,
            frame_errors: 100,
            bler: 100.0 / 1234.0,
            avg_steps: 123.456789,
            avg_cycles: 1000.0,
            p_redecode: 0.0,
            avg_comparisons: 1.0 / 3.0,
            seed: 42,
        };
        let csv =
            String::from_utf8(render_report(std::slice::from_ref(&p), ReportFormat::Csv).unwrap())
                .unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], CSV_HEADER.join(","));
        assert_eq!(lines.len(), 2);
        assert_eq!(
            lines[1],
            "2.5,1234,100,0.0810373,123.457,1000,0,0.333333,42"
        );
        let json = render_report(std::slice::from_ref(&p), ReportFormat::Json).unwrap();
        let back: Vec<SweepPoint> = serde_json::from_slice(&json).unwrap();
        assert_eq!(back[0], rounded(&p));
        assert!(render_report(&[], ReportFormat::Csv).is_err());
    }

    #[test]
    fn sweep_is_worker_independent() {
        let spec = construct_frozen_set(6, 32, 0.8, None).unwrap();
        let stop = StopRule {
            max_errors: 20,
            max_frames: 3000,
        };
        let run = |w| {
            let opts = SweepOptions {
                workers: Some(w),
                ..Default::default()
            };
            run_sweep(&spec, DecoderChoice::Srfsc, &[1.0, 2.0], stop, 9, &opts).unwrap()
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn invalid_inputs() {
        let spec = construct_frozen_set(4, 8, 0.8, None).unwrap();
        let opts = SweepOptions::default();
        let stop = StopRule::default();
        assert!(run_sweep(&spec, DecoderChoice::Sc, &[], stop, 1, &opts).is_err());
        let bad = StopRule {
            max_errors: 0,
            max_frames: 10,
        };
        assert!(run_sweep(&spec, DecoderChoice::Sc, &[1.0], bad, 1, &opts).is_err());
        let ms = DecoderChoice::Multistage {
            epsilon: 0.9,
            c: None,
        };
        assert!(matches!(
            run_sweep(&spec, ms, &[1.0], stop, 1, &opts),
            Err(Error::CrcRequired)
        ));
    }
}
