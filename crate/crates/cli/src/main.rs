use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use seqclosure::config::{ExperimentConfig, OutputFormat, DEFAULT_SEED};
use seqclosure::hierarchy::{build_level, converge_check, level_stream};
use seqclosure::measure::Measure;
use seqclosure::natset::{cesaro_density, exact_density, DensityKind, SetTerm};
use seqclosure::separators::{verify, Certificate, Registry, SeparationInput};
use seqclosure::{selftest, Error, Q};

const EXIT_FAILURE: u8 = 1;
const EXIT_PARSE: u8 = 2;
const EXIT_RESOURCE: u8 = 3;
const EXIT_LEVEL: u8 = 4;
const EXIT_VERIFY: u8 = 5;

/// Exact densities, the measure tower, witness streams and separation certificates.
#[derive(Parser)]
#[command(name = "seqclosure", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Exact density of a term, or a prefix estimate when no exact value is available.
    Density {
        #[arg(long)]
        term: PathBuf,
        /// Prefix length for the estimate.
        #[arg(long, default_value_t = 1 << 16)]
        prefix: u64,
        #[arg(long, default_value_t = ExperimentConfig::default().max_prefix)]
        max_prefix: u64,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Level values on the generator preset.
    Build {
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = ExperimentConfig::default().max_level)]
        max_level: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generator distances of the level witness stream with a verdict.
    Converge {
        #[arg(long)]
        level: u32,
        #[arg(long, default_value_t = ExperimentConfig::default().horizon)]
        horizon: u64,
        #[arg(long, value_parser = parse_q, default_value = "1/50")]
        tol: Q,
        #[arg(long, default_value_t = ExperimentConfig::default().max_level)]
        max_level: u32,
        #[arg(long, value_enum, default_value = "csv")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs a separator and writes its certificate.
    Separate {
        #[arg(long)]
        mode: String,
        /// Separation input JSON.
        #[arg(long)]
        input: PathBuf,
        /// Overrides the delta given in the input.
        #[arg(long, value_parser = parse_q)]
        delta: Option<Q>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-checks a certificate file.
    Verify {
        #[arg(long)]
        input: PathBuf,
    },
    /// Seeded invariant suites.
    Selftest {
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
}

fn parse_q(s: &str) -> Result<Q, String> {
    s.parse::<Q>().map_err(|e| e.to_string())
}

struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => EXIT_PARSE,
            Error::ResourceLimit { .. } => EXIT_RESOURCE,
            Error::LevelOutOfRange { .. } => EXIT_LEVEL,
            Error::CertificateInvalid(_) => EXIT_VERIFY,
            _ => EXIT_FAILURE,
        };
        Failure { code, message: e.to_string() }
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure { code: EXIT_PARSE, message: format!("{}: {e}", path.display()) })?;
    serde_json::from_str(&text)
        .map_err(|e| Failure { code: EXIT_PARSE, message: format!("{}: {e}", path.display()) })
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    let io = |e: std::io::Error| Failure { code: EXIT_FAILURE, message: e.to_string() };
    match out {
        Some(p) => fs::write(p, text).map_err(io),
        None => std::io::stdout().write_all(text.as_bytes()).map_err(io),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn run(cli: Cli) -> Result<(), Failure> {
    match cli.command {
        Command::Density { term, prefix, max_prefix, format, out } => {
            let t: SetTerm = read_json(&term)?;
            t.validate().map_err(|e| Failure::from(Error::Parse(e)))?;
            let mut report = exact_density(&t);
            if report.kind != DensityKind::Exact {
                report = cesaro_density(&t, prefix, max_prefix)?;
            }
            match format {
                Format::Csv => emit(&out, &format!("{report}\n")),
                Format::Json => emit(&out, &json(&report)),
            }
        }
        Command::Build { level, max_level, format, out } => {
            let cfg = ExperimentConfig { max_level, ..ExperimentConfig::default() };
            cfg.validate()?;
            let b = build_level(level, cfg.max_level, cfg.generator_level)?;
            let rows = b.generator_table()?;
            let descriptor = serde_json::json!({ "level": level, "preset": "uniform" });
            match format {
                Format::Json => {
                    emit(&out, &json(&serde_json::json!({ "build": descriptor, "generators": rows })))
                }
                Format::Csv => {
                    let mut s = format!("# build {descriptor}\nid,term,value_num,value_den,lebesgue_num,lebesgue_den\n");
                    for r in rows {
                        let (ln, ld) = match &r.lebesgue {
                            Some(q) => (q.numer().to_string(), q.denom().to_string()),
                            None => (String::new(), String::new()),
                        };
                        let term = serde_json::to_string(&r.term).expect("serializable").replace('"', "\"\"");
                        s.push_str(&format!(
                            "{},\"{term}\",{},{},{ln},{ld}\n",
                            r.id,
                            r.value.numer(),
                            r.value.denom()
                        ));
                    }
                    emit(&out, &s)
                }
            }
        }
        Command::Converge { level, horizon, tol, max_level, format, out } => {
            let cfg = ExperimentConfig { horizon, tol: tol.clone(), max_level, ..ExperimentConfig::default() };
            cfg.validate()?;
            let b = build_level(level, cfg.max_level, cfg.generator_level)?;
            let target = Measure::Level(*b.measure());
            let report = converge_check(&*level_stream(level), &target, b.generators(), &tol, horizon)?;
            match format {
                Format::Csv => emit(&out, &report.to_csv()),
                Format::Json => emit(&out, &json(&report)),
            }?;
            eprintln!("{}", report.verdict_line());
            Ok(())
        }
        Command::Separate { mode, input, delta, out } => {
            let mut inp: SeparationInput = read_json(&input)?;
            if delta.is_some() {
                inp.delta = delta;
            }
            let cert = Registry::standard().run(&mode, &inp)?;
            let text = json(&cert);
            let reread: Certificate = serde_json::from_str(&text).expect("certificate round-trips");
            let v = verify(&reread);
            emit(&out, &text)?;
            match v.diagnostic {
                None => Ok(()),
                Some(msg) => Err(Failure { code: EXIT_VERIFY, message: msg }),
            }
        }
        Command::Verify { input } => {
            let cert: Certificate = read_json(&input)?;
            let v = verify(&cert);
            match v.diagnostic {
                None => emit(&None, "verify pass\n"),
                Some(msg) => Err(Failure { code: EXIT_VERIFY, message: format!("verify fail: {msg}") }),
            }
        }
        Command::Selftest { seed, inject_fault } => {
            let report = selftest::run(seed, inject_fault);
            emit(&None, &report.render())?;
            if report.passed() {
                Ok(())
            } else {
                let failed: Vec<&str> =
                    report.checks.iter().filter(|c| c.failure.is_some()).map(|c| c.name).collect();
                Err(Failure { code: EXIT_FAILURE, message: format!("failing invariants: {}", failed.join(", ")) })
            }
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
