//! Subcommand definitions and dispatch.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use workbench_core::families::{
    generate_qn_pcr_refutation, generate_qn_sos_refutation, knapsack_system, qn_system,
    system_to_text,
};
use workbench_core::monomial::multilinear_monomials;
use workbench_core::{pcr, pseudo, sos, text, Rat, Scalar, VariableSpace};

use crate::{enforce_bit_cap, experiment, io, BitCapExceeded};

const EXIT_OK: i32 = 0;
const EXIT_VERIFY_FAILED: i32 = 1;
const EXIT_USAGE: i32 = 2;

#[derive(Parser)]
#[command(
    name = "workbench",
    version,
    about = "Exact-arithmetic generation, verification and measurement of algebraic refutations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate constraint systems and refutations
    Gen {
        #[command(subcommand)]
        what: GenCmd,
    },
    /// Verify a proof or certificate file
    Verify {
        #[command(subcommand)]
        what: ProofKindArgs,
    },
    /// Measure a verified proof or certificate
    Metrics {
        #[command(subcommand)]
        what: MetricsCmd,
    },
    /// Check that all coefficients and scalars stay within a bound
    Bounded {
        #[command(subcommand)]
        what: BoundedCmd,
    },
    /// Pseudoexpectation checks
    Pe {
        #[command(subcommand)]
        what: PeCmd,
    },
    /// Produce an upper-bound certificate for a polynomial over a monomial set
    BoundCert(BoundCertArgs),
    /// Generate, verify and measure refutations across a range of sizes
    Experiment(ExperimentArgs),
}

#[derive(Subcommand)]
enum GenCmd {
    /// Write a constraint-system file
    System {
        /// Family name (`qn`)
        #[arg(long)]
        family: String,
        /// Family size
        #[arg(long)]
        n: u32,
        /// Output path
        #[arg(short, long)]
        out: PathBuf,
    },
    /// Write a refutation together with its constraint-system file
    Proof {
        /// System family (`qn`)
        #[arg(long)]
        system: String,
        /// Family size
        #[arg(long)]
        n: u32,
        /// Proof system
        #[arg(long, value_enum)]
        kind: ProofKind,
        /// Output path; the system file is written next to it
        #[arg(short, long)]
        out: PathBuf,
    },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ProofKind {
    Pcr,
    Sos,
}

#[derive(Subcommand)]
enum ProofKindArgs {
    /// A line proof file
    Pcr { file: PathBuf },
    /// A certificate file
    Sos { file: PathBuf },
}

#[derive(Subcommand)]
enum MetricsCmd {
    /// Measure a line proof
    Pcr {
        file: PathBuf,
        /// Emit a CSV header and row instead of the readable listing
        #[arg(long)]
        csv: bool,
    },
    /// Measure a certificate
    Sos {
        file: PathBuf,
        #[arg(long)]
        csv: bool,
    },
}

#[derive(Subcommand)]
enum BoundedCmd {
    /// Check a line proof against a coefficient bound
    Pcr {
        file: PathBuf,
        /// The bound, as a rational such as `65536` or `1/2`
        #[arg(long = "R")]
        r: String,
    },
}

#[derive(Subcommand)]
enum PeCmd {
    /// Check the sufficient conditions for a family functional
    Check {
        /// Functional family (`knapsack`)
        #[arg(long)]
        family: String,
        /// Number of variables
        #[arg(long)]
        vars: u32,
        /// Right-hand side, as a rational
        #[arg(long)]
        k: String,
        /// Monomial set: all multilinear monomials up to this degree
        #[arg(long)]
        degree: u32,
    },
    /// Check the product functional's properties over a grid family
    Product {
        /// Number of grid rows
        #[arg(long)]
        n: u32,
        /// Monomial list file
        #[arg(long)]
        monomials: PathBuf,
        /// Seed for the sampled sign combinations
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Decide positive semidefiniteness of a rational matrix
    Psd {
        /// Matrix file: dimension line, then row-major entries
        #[arg(long)]
        matrix: PathBuf,
    },
}

#[derive(Args)]
struct BoundCertArgs {
    /// The polynomial to bound
    #[arg(long, allow_hyphen_values = true)]
    poly: String,
    /// Monomial list file (needs a `pairs:` or `grid:` header)
    #[arg(long)]
    monomials: PathBuf,
    /// Write the certificate here instead of stdout
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Largest family size to measure
    #[arg(long = "n-max")]
    n_max: u32,
    /// CSV output path
    #[arg(short, long)]
    out: PathBuf,
    /// Permit sizes above the desk-scale default of 4
    #[arg(long)]
    allow_large: bool,
}

/// Parses and runs a full argument vector (including the program name) and
/// returns the process exit code: 0 on success, 1 on verification failure,
/// 2 on usage errors.
pub fn dispatch<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            if err.is::<BitCapExceeded>() {
                eprintln!("aborted: {err}");
                EXIT_VERIFY_FAILED
            } else {
                eprintln!("error: {err:#}");
                EXIT_USAGE
            }
        }
    }
}

fn run(command: Command) -> Result<i32> {
    match command {
        Command::Gen { what } => run_gen(what),
        Command::Verify { what } => run_verify(what),
        Command::Metrics { what } => run_metrics(what),
        Command::Bounded { what } => run_bounded(what),
        Command::Pe { what } => run_pe(what),
        Command::BoundCert(args) => run_bound_cert(args),
        Command::Experiment(args) => run_experiment(args),
    }
}

fn require_qn(family: &str, n: u32) -> Result<()> {
    if family != "qn" {
        bail!("unknown family `{family}` (available: qn)");
    }
    if n < 1 {
        bail!("family size must be at least 1");
    }
    if n > 4 {
        // 2^(2^5) already has half a gigabyte of binary digits.
        enforce_bit_cap((1u64 << n) + 1)?;
    }
    Ok(())
}

fn run_gen(cmd: GenCmd) -> Result<i32> {
    match cmd {
        GenCmd::System { family, n, out } => {
            require_qn(&family, n)?;
            io::write(&out, &system_to_text(&qn_system::<Rat>(n)))?;
            println!("wrote {}", out.display());
            Ok(EXIT_OK)
        }
        GenCmd::Proof { system, n, kind, out } => {
            require_qn(&system, n)?;
            let sys_path = sibling_system_path(&out);
            let sys_name = sys_path
                .file_name()
                .map(|s| s.to_string_lossy().into_owned())
                .context("output path has no file name")?;
            match kind {
                ProofKind::Pcr => {
                    let proof = generate_qn_pcr_refutation::<Rat>(n);
                    enforce_bit_cap(pcr::max_component_bits(&proof))?;
                    io::write(&sys_path, &system_to_text(&proof.system))?;
                    io::write(&out, &pcr::proof_to_text(&proof, &sys_name))?;
                }
                ProofKind::Sos => {
                    let cert = generate_qn_sos_refutation::<Rat>(n);
                    enforce_bit_cap(sos::max_component_bits(&cert))?;
                    io::write(&sys_path, &system_to_text(&cert.system))?;
                    io::write(&out, &sos::certificate_to_text(&cert, Some(&sys_name)))?;
                }
            }
            println!("wrote {} and {}", out.display(), sys_path.display());
            Ok(EXIT_OK)
        }
    }
}

fn sibling_system_path(out: &Path) -> PathBuf {
    let mut name = out.file_name().map(|s| s.to_os_string()).unwrap_or_default();
    name.push(".sys");
    out.with_file_name(name)
}

fn run_verify(cmd: ProofKindArgs) -> Result<i32> {
    match cmd {
        ProofKindArgs::Pcr { file } => {
            let proof = io::load_pcr(&file)?;
            enforce_bit_cap(pcr::max_component_bits(&proof))?;
            match pcr::verify_pcr(&proof) {
                Ok(()) => {
                    println!("ok: {} lines verified", proof.lines.len());
                    Ok(EXIT_OK)
                }
                Err(failure) => {
                    println!("verification failed: {failure}");
                    Ok(EXIT_VERIFY_FAILED)
                }
            }
        }
        ProofKindArgs::Sos { file } => {
            let cert = io::load_sos(&file)?;
            enforce_bit_cap(sos::max_component_bits(&cert))?;
            match sos::verify_sos(&cert) {
                Ok(()) => {
                    println!("ok: identity closes exactly");
                    Ok(EXIT_OK)
                }
                Err(failure) => {
                    println!("verification failed: {failure}");
                    Ok(EXIT_VERIFY_FAILED)
                }
            }
        }
    }
}

fn run_metrics(cmd: MetricsCmd) -> Result<i32> {
    match cmd {
        MetricsCmd::Pcr { file, csv } => {
            let proof = io::load_pcr(&file)?;
            enforce_bit_cap(pcr::max_component_bits(&proof))?;
            let m = match pcr::pcr_metrics(&proof) {
                Ok(m) => m,
                Err(failure) => {
                    println!("verification failed: {failure}");
                    return Ok(EXIT_VERIFY_FAILED);
                }
            };
            if csv {
                println!("degree,monomial_size,height,bit_complexity,max_abs_coefficient,max_abs_scalar");
                println!(
                    "{},{},{},{},{},{}",
                    m.degree,
                    m.monomial_size,
                    m.height,
                    m.bit_complexity,
                    m.max_abs_coefficient,
                    m.max_abs_scalar
                );
            } else {
                println!("degree: {}", m.degree);
                println!("monomial_size: {}", m.monomial_size);
                println!("height: {}", m.height);
                println!("bit_complexity: {}", m.bit_complexity);
                println!("max_abs_coefficient: {}", m.max_abs_coefficient);
                println!("max_abs_scalar: {}", m.max_abs_scalar);
            }
            Ok(EXIT_OK)
        }
        MetricsCmd::Sos { file, csv } => {
            let cert = io::load_sos(&file)?;
            enforce_bit_cap(sos::max_component_bits(&cert))?;
            let m = match sos::sos_metrics(&cert) {
                Ok(m) => m,
                Err(failure) => {
                    println!("verification failed: {failure}");
                    return Ok(EXIT_VERIFY_FAILED);
                }
            };
            if csv {
                println!(
                    "degree,monomial_size,distinct_explicit_monomials,distinct_significant_monomials,bit_complexity"
                );
                println!(
                    "{},{},{},{},{}",
                    m.degree,
                    m.monomial_size,
                    m.distinct_explicit_monomials,
                    m.distinct_significant_monomials,
                    m.bit_complexity
                );
            } else {
                println!("degree: {}", m.degree);
                println!("monomial_size: {}", m.monomial_size);
                println!("distinct_explicit_monomials: {}", m.distinct_explicit_monomials);
                println!("distinct_significant_monomials: {}", m.distinct_significant_monomials);
                println!("bit_complexity: {}", m.bit_complexity);
                for (name, norm) in &m.lift_norms {
                    println!("lift_norm[{name}]: {norm}");
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn run_bounded(cmd: BoundedCmd) -> Result<i32> {
    match cmd {
        BoundedCmd::Pcr { file, r } => {
            let bound = text::parse_scalar::<Rat>(&r)?;
            if bound <= Rat::from_int(0) {
                bail!("the bound must be positive");
            }
            let proof = io::load_pcr(&file)?;
            if let Err(failure) = pcr::verify_pcr(&proof) {
                println!("verification failed: {failure}");
                return Ok(EXIT_VERIFY_FAILED);
            }
            println!("{}", pcr::is_r_bounded(&proof, &bound));
            Ok(EXIT_OK)
        }
    }
}

fn run_pe(cmd: PeCmd) -> Result<i32> {
    match cmd {
        PeCmd::Check { family, vars, k, degree } => {
            if family != "knapsack" {
                bail!("unknown functional family `{family}` (available: knapsack)");
            }
            let k = text::parse_scalar::<Rat>(&k)?;
            let pe = pseudo::knapsack_pe::<Rat>(vars, k.clone())?;
            let system = knapsack_system::<Rat>(vars, k);
            let s = multilinear_monomials(vars, degree);
            let report = pseudo::check_s_pe_axioms(&pe, &system, &s);
            println!("{report}");
            Ok(if report.ok() { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        PeCmd::Product { n, monomials, seed } => {
            if n < 1 {
                bail!("grid needs at least one row");
            }
            let space = VariableSpace::grid(n, 2 * n);
            let text = io::read(&monomials)?;
            let (_, s) = io::parse_monomials(&text, Some(space))?;
            let report = pseudo::check_product_properties::<Rat>(n, &s, seed)?;
            print!("{report}");
            Ok(if report.ok() { EXIT_OK } else { EXIT_VERIFY_FAILED })
        }
        PeCmd::Psd { matrix } => {
            let rows = io::parse_matrix(&io::read(&matrix)?)?;
            match pseudo::is_psd_matrix(&rows) {
                Ok(answer) => {
                    println!("{answer}");
                    Ok(EXIT_OK)
                }
                Err(err) => bail!("{err}"),
            }
        }
    }
}

fn run_bound_cert(args: BoundCertArgs) -> Result<i32> {
    let file = io::read(&args.monomials)?;
    let (space, monomials) = io::parse_monomials(&file, None)?;
    let poly = text::parse_poly::<Rat>(&args.poly, &space)?;
    let (bound, cert) = sos::bound_certificate(&poly, &monomials, &space)?;
    sos::verify_sos(&cert).expect("constructed certificates verify");
    println!("bound: {bound}");
    let rendered = sos::certificate_to_text(&cert, None);
    match &args.out {
        Some(path) => {
            io::write(path, &rendered)?;
            println!("wrote {}", path.display());
        }
        None => print!("{rendered}"),
    }
    Ok(EXIT_OK)
}

fn run_experiment(args: ExperimentArgs) -> Result<i32> {
    let rows = experiment::run_growth_experiment(args.n_max, &args.out, args.allow_large)?;
    println!("{}", experiment::CSV_HEADER);
    for row in &rows {
        println!("{}", row.to_csv());
    }
    println!("wrote {}", args.out.display());
    Ok(EXIT_OK)
}
