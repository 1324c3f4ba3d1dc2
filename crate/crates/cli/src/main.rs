//! `blocksync` command-line tool.
//!
//! Exit codes: 0 success, 2 usage or parameter error, 3 recovery or
//! decoding failure, 4 I/O or malformed input file.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use blocksync::container::{
    read_bit_file, sketch_variant, write_bit_file, BITS_MAGIC, CODEWORD_MAGIC,
};
use blocksync::ecc::{self, Codeword};
use blocksync::edit::{sample_trace, BlockEditTrace};
use blocksync::{bdistinct, bits, levels, Error, Variant};
use clap::{Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(name = "blocksync", version, about = "Sketches and codes for block edit errors")]
struct Cli {
    /// Print per-stage details to stderr.
    #[arg(short, long, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the sketch of a file.
    Sketch {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value = "levels")]
        variant: Variant,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild the sketched file from a corrupted copy (raw bytes or BSB1).
    Recover {
        sketch: PathBuf,
        corrupted: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Encode a file into a BSC1 codeword.
    Encode {
        input: PathBuf,
        #[arg(long)]
        k: usize,
        #[arg(long)]
        t: usize,
        #[arg(long, default_value = "levels")]
        variant: Variant,
        #[arg(long)]
        out: PathBuf,
    },
    /// Decode a (possibly corrupted) BSC1 codeword.
    Decode {
        codeword: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Apply a random or replayed block edit trace.
    ///
    /// Raw input is written as BSB1; a BSC1 codeword stays BSC1. The trace
    /// goes to `<out>.trace` unless `--trace-out` is given.
    Corrupt {
        input: PathBuf,
        #[arg(long, default_value_t = 1)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        t: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        trace_out: Option<PathBuf>,
        /// Apply this trace instead of sampling one.
        #[arg(long, conflicts_with = "seed")]
        replay: Option<PathBuf>,
    },
    /// Run a sweep on random inputs and print CSV.
    Stats {
        /// Comma-separated message lengths in bits.
        #[arg(long, value_delimiter = ',', default_value = "4096")]
        n: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "1")]
        k: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "0")]
        t: Vec<usize>,
        #[arg(long, value_delimiter = ',', default_value = "levels")]
        variant: Vec<Variant>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    msg: String,
}

fn usage(stage: &str, e: impl std::fmt::Display) -> Failure {
    Failure { code: 2, msg: format!("{stage}: {e}") }
}

fn recovery(stage: &str, e: impl std::fmt::Display) -> Failure {
    Failure { code: 3, msg: format!("{stage}: {e}") }
}

fn io(stage: &str, e: impl std::fmt::Display) -> Failure {
    Failure { code: 4, msg: format!("{stage}: {e}") }
}

/// Parameter problems are usage errors; anything else from the library
/// while building is reported as a failure of that stage.
fn build_error(stage: &str, e: Error) -> Failure {
    match e {
        Error::Precondition(_) | Error::TooLarge(_) | Error::OutOfRange(_) => usage(stage, e),
        _ => recovery(stage, e),
    }
}

fn read(path: &Path) -> Result<Vec<u8>, Failure> {
    fs::read(path).map_err(|e| io("read", format!("{}: {e}", path.display())))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), Failure> {
    fs::write(path, bytes).map_err(|e| io("write", format!("{}: {e}", path.display())))
}

/// Bits of a raw file, or of a BSB1 container.
fn read_bits(path: &Path) -> Result<Vec<u8>, Failure> {
    let bytes = read(path)?;
    if bytes.starts_with(BITS_MAGIC) {
        read_bit_file(&bytes).map_err(|e| io("read", format!("{}: {e}", path.display())))
    } else {
        Ok(bits::from_bytes(&bytes))
    }
}

/// Whole bytes when possible, otherwise BSB1.
fn bits_to_file(b: &[u8]) -> Vec<u8> {
    if b.len() % 8 == 0 {
        bits::pack(b)
    } else {
        write_bit_file(b)
    }
}

fn sketch_bytes(x: &[u8], k: usize, t: usize, variant: Variant) -> blocksync::Result<Vec<u8>> {
    Ok(match variant {
        Variant::Levels => levels::alice_sketch(x, k, t)?.to_bytes(),
        Variant::BDistinct => bdistinct::sketch_rand(x, k, t)?.to_bytes(),
    })
}

fn sections(bytes: &[u8]) -> blocksync::Result<Vec<(String, usize)>> {
    Ok(match sketch_variant(bytes)? {
        Variant::Levels => levels::Sketch::from_bytes(bytes)?.section_bits(),
        Variant::BDistinct => bdistinct::BdSketch::from_bytes(bytes)?.section_bits(),
    })
}

fn recover_bytes(sketch: &[u8], y: &[u8]) -> Result<Vec<u8>, Failure> {
    let parse = |e| io("sketch", e);
    match sketch_variant(sketch).map_err(parse)? {
        Variant::Levels => {
            let s = levels::Sketch::from_bytes(sketch).map_err(parse)?;
            levels::bob_recover(y, &s).map_err(|e| recovery("recover", e))
        }
        Variant::BDistinct => {
            let s = bdistinct::BdSketch::from_bytes(sketch).map_err(parse)?;
            bdistinct::recover_rand(y, &s).map_err(|e| recovery("recover", e))
        }
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let verbose = cli.verbose;
    match cli.command {
        Command::Sketch { input, k, t, variant, out } => {
            let x = read_bits(&input)?;
            if x.is_empty() {
                return Err(usage("sketch", "input file is empty"));
            }
            let sk = sketch_bytes(&x, k, t, variant).map_err(|e| build_error("sketch", e))?;
            write(&out, &sk)?;
            println!("sketch_bits {}", 8 * sk.len());
            for (name, b) in sections(&sk).map_err(|e| io("sketch", e))? {
                println!("  {name} {b}");
            }
        }
        Command::Recover { sketch, corrupted, out } => {
            let sk = read(&sketch)?;
            let y = read_bits(&corrupted)?;
            let x = recover_bytes(&sk, &y)?;
            write(&out, &bits_to_file(&x))?;
            if verbose {
                eprintln!("recovered {} bits", x.len());
            }
        }
        Command::Encode { input, k, t, variant, out } => {
            let x = read_bits(&input)?;
            if x.is_empty() {
                return Err(usage("encode", "input file is empty"));
            }
            let c = ecc::encode(&x, k, t, variant).map_err(|e| build_error("encode", e))?;
            write(&out, &c.to_bytes())?;
            println!("n {} codeword_bits {} redundancy_bits {}", x.len(), c.bits.len(), c.redundancy());
        }
        Command::Decode { codeword, out } => {
            let bytes = read(&codeword)?;
            let c = Codeword::from_bytes(&bytes).map_err(|e| io("codeword", e))?;
            let (x, report) =
                ecc::decode_report(&c.bits, &c.params).map_err(|e| recovery("decode", e))?;
            write(&out, &bits_to_file(&x))?;
            println!(
                "n {} received_bits {} redundancy_bits {}",
                x.len(),
                c.bits.len(),
                c.bits.len() as i64 - x.len() as i64
            );
            if verbose {
                eprintln!(
                    "buffers {} armor errors {} erasures {} message part {} bits",
                    report.buffers_found,
                    report.armor.errors,
                    report.armor.erasures,
                    report.message_part_len
                );
            }
        }
        Command::Corrupt { input, k, t, seed, out, trace_out, replay } => {
            let bytes = read(&input)?;
            let codeword = bytes.starts_with(CODEWORD_MAGIC);
            let (params, x) = if codeword {
                let c = Codeword::from_bytes(&bytes).map_err(|e| io("codeword", e))?;
                (Some(c.params), c.bits)
            } else {
                (None, read_bits(&input)?)
            };
            let trace = match replay {
                Some(p) => {
                    let text = fs::read_to_string(&p)
                        .map_err(|e| io("read", format!("{}: {e}", p.display())))?;
                    BlockEditTrace::from_text(&text).map_err(|e| io("trace", e))?
                }
                None => sample_trace(seed, x.len(), k, t),
            };
            let y = trace.apply(&x).map_err(|e| usage("corrupt", e))?;
            let payload = match params {
                Some(p) => ecc::write_codeword(&p, &y),
                None => write_bit_file(&y),
            };
            write(&out, &payload)?;
            let trace_path = trace_out.unwrap_or_else(|| {
                let mut p = out.clone().into_os_string();
                p.push(".trace");
                p.into()
            });
            write(&trace_path, trace.to_text().as_bytes())?;
            if verbose {
                eprintln!("{} ops, {} bits inserted or deleted", trace.ops.len(), trace.bit_cost());
            }
        }
        Command::Stats { n, k, t, variant, seed, out } => {
            let mut csv = String::from("n,k,t,variant,sketch_bits,redundancy_bits,recover_ok,wall_ms\n");
            for &n in &n {
                for &k in &k {
                    for &t in &t {
                        for &v in &variant {
                            csv.push_str(&stats_row(n, k, t, v, seed)?);
                        }
                    }
                }
            }
            match out {
                Some(p) => write(&p, csv.as_bytes())?,
                None => std::io::stdout()
                    .write_all(csv.as_bytes())
                    .map_err(|e| io("write", e))?,
            }
        }
    }
    Ok(())
}

/// One sweep point: a random message, a sampled trace, document exchange
/// and ECC round trips.
fn stats_row(n: usize, k: usize, t: usize, v: Variant, seed: u64) -> Result<String, Failure> {
    let start = Instant::now();
    let point = seed ^ ((n as u64) << 32) ^ ((k as u64) << 16) ^ t as u64;
    let mut rng = ChaCha8Rng::seed_from_u64(point);
    let x: Vec<u8> = (0..n).map(|_| rng.random_range(0..2u8)).collect();
    let stage = format!("stats n={n} k={k} t={t} {}", v.name());
    let c = ecc::encode(&x, k, t, v).map_err(|e| build_error(&stage, e))?;
    let msg_p = &c.bits[..n];
    let sk = sketch_bytes(msg_p, k, t, v).map_err(|e| build_error(&stage, e))?;
    let y = sample_trace(point, n, k, t).apply(msg_p).map_err(|e| usage(&stage, e))?;
    let doc_ok = recover_bytes(&sk, &y).is_ok_and(|got| got == msg_p);
    let cw = sample_trace(point + 1, c.bits.len(), k, t)
        .apply(&c.bits)
        .map_err(|e| usage(&stage, e))?;
    let ecc_ok = ecc::decode(&cw, &c.params).is_ok_and(|got| got == x);
    Ok(format!(
        "{n},{k},{t},{},{},{},{},{}\n",
        v.name(),
        8 * sk.len(),
        c.redundancy(),
        doc_ok && ecc_ok,
        start.elapsed().as_millis()
    ))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("blocksync: {}", f.msg);
            ExitCode::from(f.code)
        }
    }
}
