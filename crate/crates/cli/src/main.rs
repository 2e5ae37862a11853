use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;
use srpolar_core::code::{construct_frozen_set, ebno_to_sigma};
use srpolar_core::gaussian::{build_ta_config, eligibility_bound, min_c, GaussianTable};
use srpolar_core::sim::{
    emit_report, render_report, run_sweep, write_atomic, DecoderChoice, ReportFormat, StopRule,
    SweepOptions,
};
use srpolar_core::ta::{decode_multistage, decode_ta_srfsc};
use srpolar_core::tree::{census_of, schedule_time_steps, ScheduleMode};
use srpolar_core::{ArithMode, Bit, CodeSpec, CrcSpec, Decoder, FrozenSetFile, LatencyModel};

mod hex;

/// Sequence-repetition fast SC decoding of polar codes.
#[derive(Parser)]
#[command(name = "srpolar", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build a frozen set and write it as JSON.
    Construct {
        #[command(flatten)]
        code: CodeArgs,
        /// Output file; standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Report the SR-node census and latency of a code.
    Analyze {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        latency: LatencyArgs,
        /// Also write the per-node SRFSC breakdown as CSV.
        #[arg(long)]
        breakdown: Option<PathBuf>,
    },
    /// Print the threshold parameters and eligible nodes per level.
    Thresholds {
        #[arg(long)]
        epsilon: f64,
        /// Defaults to the smallest feasible c.
        #[arg(long)]
        c: Option<f64>,
        #[arg(long)]
        n: usize,
        /// Channel noise standard deviation.
        #[arg(long)]
        sigma: f64,
    },
    /// Decode one frame of LLRs.
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        decoder: DecoderArgs,
        #[command(flatten)]
        latency: LatencyArgs,
        /// Whitespace or comma separated LLRs, decimal or 0x-prefixed f64 bit patterns.
        #[arg(long)]
        llr: PathBuf,
        /// Channel Eb/N0 in dB, used for the thresholds of ta and multistage.
        #[arg(long)]
        ebno: Option<f64>,
    },
    /// Monte Carlo sweep over Eb/N0.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        decoder: DecoderArgs,
        #[command(flatten)]
        latency: LatencyArgs,
        /// `start:step:stop` in dB, or a single value.
        #[arg(long)]
        ebno: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        max_errors: u64,
        #[arg(long, default_value_t = 1_000_000)]
        max_frames: u64,
        /// Report file; `.json` selects JSON, anything else CSV. CSV on standard output if omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CodeArgs {
    /// `builtin` for Gaussian-approximation construction, or a frozen-set JSON file.
    #[arg(long, default_value = "builtin")]
    code: String,
    /// log2 of the code length.
    #[arg(long)]
    n: Option<usize>,
    /// Information bits, CRC included.
    #[arg(long)]
    k: Option<usize>,
    /// Design noise standard deviation; defaults to Eb/N0 = 2 dB at rate K/N.
    #[arg(long)]
    sigma: Option<f64>,
    /// CRC length: 6, 11 or 16.
    #[arg(long)]
    crc: Option<usize>,
}

#[derive(Args)]
struct DecoderArgs {
    #[arg(long, value_enum, default_value = "srfsc")]
    decoder: DecoderKind,
    /// Required for ta and multistage.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long, default_value = "minsum")]
    mode: ArithMode,
}

#[derive(Args)]
struct LatencyArgs {
    /// Processing elements of the semi-parallel model.
    #[arg(long, default_value_t = 64)]
    p: u64,
    /// Extra cycles per SR node.
    #[arg(long, default_value_t = 0)]
    pipeline: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DecoderKind {
    Sc,
    Srfsc,
    Ta,
    Multistage,
}

/// Bad arguments or unreadable input; exits with status 2.
#[derive(Debug)]
struct Usage(String);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Usage(msg.into()).into())
}

impl CodeArgs {
    fn spec(&self) -> Result<CodeSpec> {
        let crc = match self.crc {
            None => None,
            Some(len) => match CrcSpec::by_length(len) {
                Some(c) => Some(c),
                None => return usage(format!("unsupported CRC length {len}; use 6, 11 or 16")),
            },
        };
        if self.code == "builtin" {
            let (Some(n), Some(k)) = (self.n, self.k) else {
                return usage("--n and --k are required with --code builtin");
            };
            if n == 0 || n > 20 {
                return usage(format!("--n {n} is out of range"));
            }
            let sigma = self
                .sigma
                .unwrap_or_else(|| ebno_to_sigma(2.0, k as f64 / (1u64 << n) as f64));
            Ok(construct_frozen_set(n, k, sigma, None)?.with_crc(crc)?)
        } else {
            if self.n.is_some() || self.k.is_some() || self.sigma.is_some() {
                return usage("--n, --k and --sigma cannot be combined with a frozen-set file");
            }
            let file = match FrozenSetFile::read(&self.code) {
                Ok(f) => f,
                Err(e) => return usage(format!("cannot read frozen set `{}`: {e}", self.code)),
            };
            let flags = file.flags()?;
            Ok(CodeSpec::from_flags(flags, crc)?)
        }
    }
}

impl DecoderArgs {
    fn choice(&self) -> Result<DecoderChoice> {
        let needs_epsilon = matches!(self.decoder, DecoderKind::Ta | DecoderKind::Multistage);
        match (needs_epsilon, self.epsilon) {
            (true, None) => {
                return usage("--epsilon is required for the ta and multistage decoders")
            }
            (false, Some(_)) => {
                return usage("--epsilon only applies to the ta and multistage decoders")
            }
            _ => {}
        }
        if !needs_epsilon && self.c.is_some() {
            return usage("--c only applies to the ta and multistage decoders");
        }
        Ok(match self.decoder {
            DecoderKind::Sc => DecoderChoice::Sc,
            DecoderKind::Srfsc => DecoderChoice::Srfsc,
            DecoderKind::Ta => DecoderChoice::Ta {
                epsilon: self.epsilon.unwrap_or_default(),
                c: self.c,
            },
            DecoderKind::Multistage => DecoderChoice::Multistage {
                epsilon: self.epsilon.unwrap_or_default(),
                c: self.c,
            },
        })
    }
}

impl LatencyArgs {
    fn model(&self) -> Result<LatencyModel> {
        match LatencyModel::new(self.p) {
            Ok(m) => Ok(LatencyModel {
                pipeline_per_sr: self.pipeline,
                ..m
            }),
            Err(e) => usage(format!("--p: {e}")),
        }
    }
}

fn parse_grid(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    let nums: Vec<f64> = match parts
        .iter()
        .map(|p| p.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
    {
        Ok(v) => v,
        Err(_) => return usage(format!("bad Eb/N0 grid `{s}`")),
    };
    if nums.iter().any(|x| !x.is_finite()) {
        return usage(format!("bad Eb/N0 grid `{s}`"));
    }
    match nums[..] {
        [x] => Ok(vec![x]),
        [start, step, stop] => {
            if step <= 0.0 || stop < start {
                return usage(format!("Eb/N0 grid `{s}` needs step > 0 and stop >= start"));
            }
            let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
            // Round to kill the drift of repeated addition.
            Ok((0..count)
                .map(|t| ((start + t as f64 * step) * 1e9).round() / 1e9)
                .collect())
        }
        _ => usage(format!(
            "Eb/N0 grid `{s}` must be `start:step:stop` or one value"
        )),
    }
}

fn workers() -> Result<Option<usize>> {
    match std::env::var("SRPOLAR_WORKERS") {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(0) | Err(_) => usage(format!(
                "SRPOLAR_WORKERS must be a positive integer, got `{v}`"
            )),
            Ok(w) => Ok(Some(w)),
        },
    }
}

fn write_or_print(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => write_atomic(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(bytes).and_then(|()| stdout.flush()) {
                // A closed pipe (say, into `head`) is not a failure.
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                other => Ok(other?),
            }
        }
    }
}

fn print_json(value: &serde_json::Value) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_or_print(None, text.as_bytes())
}

fn read_llrs(path: &Path) -> Result<Vec<f64>> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => return usage(format!("cannot read `{}`: {e}", path.display())),
    };
    hex::parse_llrs(&text).map_err(|e| Usage(format!("{}: {e}", path.display())).into())
}

fn construct(code: &CodeArgs, out: Option<&Path>) -> Result<()> {
    let spec = code.spec()?;
    let mut text = serde_json::to_string_pretty(&spec.to_file())?;
    text.push('\n');
    write_or_print(out, text.as_bytes())
}

fn analyze(code: &CodeArgs, latency: &LatencyArgs, breakdown: Option<&Path>) -> Result<()> {
    let spec = code.spec()?;
    let model = latency.model()?;
    let decoder = Decoder::srfsc(&spec).with_model(model);
    let cover = decoder.cover();
    let srfsc = decoder.latency();
    let sc = schedule_time_steps(&spec, &[], ScheduleMode::Sc, &model);
    let report = json!({
        "N": spec.len(),
        "K": spec.k(),
        "crc": spec.crc_len(),
        "census": census_of(cover),
        "sr_nodes": cover.iter().map(|d| json!({
            "node": d.owner.to_string(),
            "label": d.label(),
            "steps": srpolar_core::tree::sr_time_steps(d),
        })).collect::<Vec<_>>(),
        "latency": {
            "p": model.p,
            "pipeline_per_sr": model.pipeline_per_sr,
            "sc": { "time_steps": sc.time_steps, "cycles": sc.cycles },
            "srfsc": { "time_steps": srfsc.time_steps, "cycles": srfsc.cycles },
        },
    });
    print_json(&report)?;
    if let Some(path) = breakdown {
        let mut csv = String::from("level,index,kind,steps,cycles\n");
        for e in &srfsc.breakdown {
            let kind = match e.kind {
                srpolar_core::tree::StepKind::General => "general",
                srpolar_core::tree::StepKind::Sr => "sr",
            };
            csv.push_str(&format!(
                "{},{},{kind},{},{}\n",
                e.node.j, e.node.i, e.steps, e.cycles
            ));
        }
        write_atomic(path, csv.as_bytes())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn thresholds(epsilon: f64, c: Option<f64>, n: usize, sigma: f64) -> Result<()> {
    if n == 0 || n > 20 {
        return usage(format!("--n {n} is out of range"));
    }
    let c = match c {
        Some(c) => c,
        None => min_c(epsilon, n)?,
    };
    let table = GaussianTable::compute(n, sigma)?;
    let ta = build_ta_config(&table, epsilon, c)?;
    let report = json!({
        "epsilon": epsilon,
        "c": c,
        "m_bound": eligibility_bound(epsilon, c, n)?,
        "eligible_per_level": ta.eligible_per_level(),
        "eligible_total": ta.eligible_count(),
    });
    print_json(&report)?;
    Ok(())
}

fn decode(
    code: &CodeArgs,
    dec: &DecoderArgs,
    latency: &LatencyArgs,
    llr_path: &Path,
    ebno: Option<f64>,
) -> Result<()> {
    let spec = code.spec()?;
    let choice = dec.choice()?;
    let model = latency.model()?;
    let llr = read_llrs(llr_path)?;
    if llr.len() != spec.len() {
        return usage(format!(
            "{} LLRs given for a code of length {}",
            llr.len(),
            spec.len()
        ));
    }
    let base = match choice {
        DecoderChoice::Sc => Decoder::sc(&spec),
        _ => Decoder::srfsc(&spec),
    };
    let decoder = base.with_mode(dec.mode).with_model(model);
    let ta = match choice {
        DecoderChoice::Ta { epsilon, c } | DecoderChoice::Multistage { epsilon, c } => {
            let Some(ebno) = ebno else {
                return usage("--ebno is required to set the thresholds of ta and multistage");
            };
            let c = match c {
                Some(c) => c,
                None => min_c(epsilon, spec.n())?,
            };
            let table = GaussianTable::compute(spec.n(), ebno_to_sigma(ebno, spec.rate()))?;
            Some(build_ta_config(&table, epsilon, c)?)
        }
        _ => None,
    };
    let (u_hat, steps, cycles, hard, attempts): (Vec<Bit>, u64, u64, Vec<String>, u8) =
        match (choice, &ta) {
            (DecoderChoice::Ta { .. }, Some(ta)) => {
                let o = decode_ta_srfsc(&decoder, ta, &llr)?;
                let hard = o.hard_decided.iter().map(|n| n.to_string()).collect();
                (o.u_hat, o.steps, o.cycles, hard, 1)
            }
            (DecoderChoice::Multistage { .. }, Some(ta)) => {
                let o = decode_multistage(&decoder, ta, &llr)?;
                let hard = o.first.hard_decided.iter().map(|n| n.to_string()).collect();
                (o.u_hat, o.steps_total, o.cycles_total, hard, o.attempts)
            }
            _ => {
                let o = decoder.decode(&llr)?;
                (o.u_hat, o.stats.steps, o.stats.cycles, Vec::new(), 1)
            }
        };
    let info = spec.extract_info(&u_hat);
    let crc_pass = spec.crc().map(|c| srpolar_core::code::crc_check(&info, c));
    let report = json!({
        "u_hat": hex::encode_bits(&u_hat),
        "info": hex::encode_bits(&info),
        "payload": hex::encode_bits(&info[..spec.payload_len()]),
        "crc_pass": crc_pass,
        "time_steps": steps,
        "cycles": cycles,
        "hard_decided": hard,
        "attempts": attempts,
    });
    print_json(&report)?;
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn simulate(
    code: &CodeArgs,
    dec: &DecoderArgs,
    latency: &LatencyArgs,
    ebno: &str,
    seed: u64,
    stop: StopRule,
    out: Option<&Path>,
) -> Result<()> {
    let grid = parse_grid(ebno)?;
    let choice = dec.choice()?;
    if stop.validate().is_err() {
        return usage("--max-errors and --max-frames must be positive");
    }
    let spec = code.spec()?;
    if matches!(choice, DecoderChoice::Multistage { .. }) && spec.crc().is_none() {
        return usage("the multistage decoder needs --crc");
    }
    let opts = SweepOptions {
        workers: workers()?,
        mode: dec.mode,
        model: latency.model()?,
    };
    let points = run_sweep(&spec, choice, &grid, stop, seed, &opts)?;
    match out {
        Some(path) => emit_report(&points, ReportFormat::from_path(path), path)
            .with_context(|| format!("writing {}", path.display())),
        None => write_or_print(None, &render_report(&points, ReportFormat::Csv)?),
    }
}

fn run(cli: Cli) -> Result<()> {
    match &cli.command {
        Command::Construct { code, out } => construct(code, out.as_deref()),
        Command::Analyze {
            code,
            latency,
            breakdown,
        } => analyze(code, latency, breakdown.as_deref()),
        Command::Thresholds {
            epsilon,
            c,
            n,
            sigma,
        } => thresholds(*epsilon, *c, *n, *sigma),
        Command::Decode {
            code,
            decoder,
            latency,
            llr,
            ebno,
        } => decode(code, decoder, latency, llr, *ebno),
        Command::Simulate {
            code,
            decoder,
            latency,
            ebno,
            seed,
            max_errors,
            max_frames,
            out,
        } => simulate(
            code,
            decoder,
            latency,
            ebno,
            *seed,
            StopRule {
                max_errors: *max_errors,
                max_frames: *max_frames,
            },
            out.as_deref(),
        ),
    }
}

fn main() -> ExitCode {
    // clap prints its own diagnostics and exits 2 on usage errors.
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
