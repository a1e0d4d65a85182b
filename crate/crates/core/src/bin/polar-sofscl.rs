//! Command-line front end: code construction, single-block encode/decode,
//! Monte Carlo simulation, calibration, latency and operation counts.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng;

use polar_sofscl::analysis::{latency_constrained, latency_unlimited, op_count_run, DecoderKind, OpCountReport, OpCounts};
use polar_sofscl::channel::{channel_llr, transmit, trial_rng, ChannelCfg, ChannelKind};
use polar_sofscl::code_model::{build_code, node_composition, nr5g_order, read_reliability, DynFrozenCfg, PolarCodeSpec};
use polar_sofscl::harness::{
    calibration_run, product_trials, read_llr_file, read_spec_file, run_trials, write_csv, write_spec_file, BlockDecoder,
    ProductCodeCfg, SimConfig, StopRule, CSV_HEADER, DEFAULT_BIN_EXPONENTS,
};
use polar_sofscl::soft_output::{ArithMode, XiVariant};

#[derive(Parser)]
#[command(name = "polar-sofscl", version, about = "Soft-output fast SCL decoding of polar codes")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build a code and write its spec file.
    Construct {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Encode information bits (one 0/1 per line) or a random word.
    Encode {
        #[command(flatten)]
        code: CodeArgs,
        /// Information bits file; random bits from --seed when absent.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Also write channel LLRs at this Eb/N0 (dB).
        #[arg(long)]
        ebn0: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decode one block from an LLR file.
    Decode {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        dec: DecArgs,
        /// LLR file, one value per line.
        llr_file: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Monte Carlo BER/BLER over an Eb/N0 grid.
    Simulate {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        dec: DecArgs,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long, value_enum, default_value_t = Channel::Awgn)]
        channel: Channel,
        /// Score the soft output without the unanimous-bit modification.
        #[arg(long)]
        unmodified_xi: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Empirical BLER against 1 − Γ*, binned.
    Calibrate {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        dec: DecArgs,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decoding latency in clock cycles.
    Latency {
        #[command(flatten)]
        code: CodeArgs,
        #[arg(long, default_value_t = 4)]
        list_size: usize,
        #[arg(long, default_value = "so_fscl")]
        decoder: DecoderKind,
        /// Processing elements per cycle; unlimited when absent.
        #[arg(long)]
        npar: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Average operation counts per decoded block.
    Opcount {
        #[command(flatten)]
        code: CodeArgs,
        #[command(flatten)]
        dec: DecArgs,
        #[arg(long, default_value_t = 3.0)]
        ebn0: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        blocks: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Iterative decoding of a product code with polar components.
    ProductSim {
        /// Component length.
        #[arg(long, default_value_t = 16)]
        n: usize,
        /// Component dimension.
        #[arg(long, default_value_t = 11)]
        k: usize,
        #[arg(long, default_value = "3")]
        fd: FdArg,
        #[arg(long, default_value_t = 4)]
        list_size: usize,
        #[arg(long, value_enum, default_value_t = Mode::Exact)]
        mode: Mode,
        /// Maximum iterations.
        #[arg(long, default_value_t = 20)]
        iters: usize,
        /// Extrinsic scaling factor w.
        #[arg(long, default_value_t = 0.4)]
        scale: f64,
        #[command(flatten)]
        mc: McArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CodeArgs {
    /// Code spec file (overrides the construction flags).
    #[arg(long)]
    code_file: Option<PathBuf>,
    /// Reliability sequence file (1-based, least to most reliable); the
    /// built-in 5G sequence when absent.
    #[arg(long)]
    rel_seq: Option<PathBuf>,
    #[arg(long, default_value_t = 512)]
    n: usize,
    #[arg(long, default_value_t = 256)]
    k: usize,
    /// Dynamic frozen bits per node: an integer, `inf`, or `static` for
    /// all-zero frozen bits.
    #[arg(long, default_value = "3")]
    fd: FdArg,
}

#[derive(Args)]
struct DecArgs {
    #[arg(long, default_value_t = 4)]
    list_size: usize,
    #[arg(long, value_enum, default_value_t = Mode::Exact)]
    mode: Mode,
    #[arg(long, default_value = "so_fscl")]
    decoder: DecoderKind,
}

#[derive(Args)]
struct McArgs {
    /// Eb/N0 points in dB (comma-separated or repeated).
    #[arg(long, value_delimiter = ',', default_value = "2.0")]
    ebn0: Vec<f64>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long, default_value_t = 500)]
    min_block_errors: u64,
    #[arg(long, default_value_t = 10_000_000)]
    max_blocks: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exact,
    Hwf,
}

impl From<Mode> for ArithMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exact => ArithMode::Exact,
            Mode::Hwf => ArithMode::Hwf,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Channel {
    Awgn,
    Rayleigh,
}

#[derive(Clone, Debug)]
struct FdArg(DynFrozenCfg);

impl std::str::FromStr for FdArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "static" => Ok(FdArg(DynFrozenCfg::static_zero())),
            "inf" => Ok(FdArg(DynFrozenCfg::convolutional(None))),
            n => n
                .parse::<usize>()
                .map(|v| FdArg(DynFrozenCfg::convolutional(Some(v))))
                .map_err(|_| format!("expected an integer, `inf` or `static`, got `{n}`")),
        }
    }
}

type Res<T> = Result<T, Box<dyn std::error::Error>>;

fn load_code(a: &CodeArgs) -> Res<PolarCodeSpec> {
    if let Some(p) = &a.code_file {
        return Ok(read_spec_file(p)?);
    }
    let order = match &a.rel_seq {
        Some(p) => {
            let seq = read_reliability(p)?;
            seq.into_iter().filter(|&i| i < a.n).collect()
        }
        None => nr5g_order(a.n)?,
    };
    Ok(build_code(a.n, a.k, &order, a.fd.0.clone())?)
}

fn emit(out: &Option<PathBuf>, text: &str) -> Res<()> {
    match out {
        Some(p) => fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn bits_text(bits: &[u8]) -> String {
    bits.iter().map(|b| char::from(b'0' + b)).collect()
}

fn read_bits(path: &Path) -> Res<Vec<u8>> {
    let mut out = Vec::new();
    for (i, line) in fs::read_to_string(path)?.lines().enumerate() {
        match line.trim() {
            "" => {}
            "0" => out.push(0),
            "1" => out.push(1),
            other => return Err(format!("{}:{}: expected 0 or 1, got `{other}`", path.display(), i + 1).into()),
        }
    }
    Ok(out)
}

fn run(cli: Cli) -> Res<()> {
    match cli.cmd {
        Cmd::Construct { code, out } => {
            let spec = load_code(&code)?;
            match &out {
                Some(p) => write_spec_file(p, &spec)?,
                None => print!("{}", spec.to_text()),
            }
            eprintln!("{} FIC nodes", spec.fic_nodes().len());
            for ((ns, ks), count) in node_composition(spec.fic_nodes()) {
                eprintln!("  N_s={ns:<4} K_s={ks:<4} x{count}");
            }
        }
        Cmd::Encode { code, input, seed, ebn0, out } => {
            let spec = load_code(&code)?;
            let info = match &input {
                Some(p) => read_bits(p)?,
                None => {
                    let mut rng = trial_rng(seed, 0);
                    (0..spec.k()).map(|_| rng.random::<bool>() as u8).collect()
                }
            };
            let c = spec.encode_info(&info)?;
            let mut text = format!("info = {}\ncodeword = {}\n", bits_text(&info), bits_text(&c));
            if let Some(e) = ebn0 {
                let ch = ChannelCfg::awgn(e, spec.rate());
                let obs = transmit(&c, &ch, &mut trial_rng(seed, 1))?;
                let llrs = channel_llr(&obs, &ch);
                text.push_str("llrs =\n");
                for v in llrs {
                    text.push_str(&format!("{v}\n"));
                }
            }
            emit(&out, &text)?;
        }
        Cmd::Decode { code, dec, llr_file, out } => {
            let spec = load_code(&code)?;
            let llrs = read_llr_file(&llr_file)?;
            let bd = BlockDecoder::new(&spec, dec.decoder, dec.mode.into(), dec.list_size, XiVariant::Modified)?;
            let d = bd.decode(&llrs)?;
            let mut u = d.codeword.clone();
            polar_sofscl::code_model::encode_in_place(&mut u);
            let mut text = format!(
                "decoder = {}\ninfo = {}\ncodeword = {}\n",
                dec.decoder.name(),
                bits_text(&spec.extract_info(&u)),
                bits_text(&d.codeword)
            );
            if let Some(p) = d.approx_bler {
                text.push_str(&format!("approx_bler = {p:.6e}\n"));
            }
            if let Some(app) = &d.app {
                text.push_str("app_llrs =\n");
                for v in app {
                    text.push_str(&format!("{v}\n"));
                }
            }
            emit(&out, &text)?;
        }
        Cmd::Simulate { code, dec, mc, channel, unmodified_xi, out } => {
            let spec = load_code(&code)?;
            let mut cfg = SimConfig::new(dec.decoder, dec.mode.into(), dec.list_size, mc.ebn0);
            cfg.stop = StopRule { min_block_errors: mc.min_block_errors, max_blocks: mc.max_blocks };
            cfg.seed = mc.seed;
            cfg.channel = match channel {
                Channel::Awgn => ChannelKind::Awgn,
                Channel::Rayleigh => ChannelKind::Rayleigh,
            };
            if unmodified_xi {
                cfg.xi = XiVariant::Unmodified;
            }
            let rows = run_trials(&spec, &cfg)?;
            match &out {
                Some(p) => write_csv(p, &rows)?,
                None => {
                    println!("{CSV_HEADER}");
                    for r in &rows {
                        println!("{}", r.csv_row());
                    }
                }
            }
        }
        Cmd::Calibrate { code, dec, mc, out } => {
            let spec = load_code(&code)?;
            let mut text = String::new();
            for &e in &mc.ebn0 {
                let mut cfg = SimConfig::new(dec.decoder, dec.mode.into(), dec.list_size, vec![e]);
                cfg.stop = StopRule { min_block_errors: u64::MAX, max_blocks: mc.max_blocks };
                cfg.seed = mc.seed;
                let rep = calibration_run(&spec, &cfg, e, &DEFAULT_BIN_EXPONENTS)?;
                text.push_str(&rep.to_text());
            }
            emit(&out, &text)?;
        }
        Cmd::Latency { code, list_size, decoder, npar, out } => {
            let spec = load_code(&code)?;
            let rep = match npar {
                Some(p) => latency_constrained(&spec, list_size, decoder, p)?,
                None => latency_unlimited(&spec, list_size, decoder)?,
            };
            emit(&out, &rep.to_text())?;
        }
        Cmd::Opcount { code, dec, ebn0, seed, blocks, out } => {
            let spec = load_code(&code)?;
            let ch = ChannelCfg::awgn(ebn0, spec.rate());
            let mut total = OpCounts::default();
            for t in 0..blocks {
                let mut rng = trial_rng(seed, t);
                let info: Vec<u8> = (0..spec.k()).map(|_| rng.random::<bool>() as u8).collect();
                let c = spec.encode_info(&info)?;
                let llrs = channel_llr(&transmit(&c, &ch, &mut rng)?, &ch);
                total.merge(&op_count_run(&llrs, &spec, dec.list_size, dec.decoder, dec.mode.into())?.counts);
            }
            let rep = OpCountReport { decoder: dec.decoder, mode: dec.mode.into(), blocks, counts: total };
            emit(&out, &rep.to_text())?;
        }
        Cmd::ProductSim { n, k, fd, list_size, mode, iters, scale, mc, out } => {
            let component = build_code(n, k, &nr5g_order(n)?, fd.0)?;
            let cfg = ProductCodeCfg { component, max_iters: iters, scale, mode: mode.into(), list_size };
            let mut rows = Vec::new();
            for &e in &mc.ebn0 {
                let st = product_trials(&cfg, &[iters], e, mc.seed, mc.min_block_errors, mc.max_blocks)?;
                eprintln!("{e} dB: mean iterations {:.2}", st.mean_iterations);
                rows.extend(st.stats);
            }
            match &out {
                Some(p) => write_csv(p, &rows)?,
                None => {
                    println!("{CSV_HEADER}");
                    for r in &rows {
                        println!("{}", r.csv_row());
                    }
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
