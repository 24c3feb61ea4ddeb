//! Command-line interface for exact twisted K-theory coefficient
//! computations: twisted K-groups of presented modules, integrality and
//! decomposition in the bivariate cooperation algebra, formal-group-law
//! series checks, truncated β-ring products, derived-functor reports, and
//! the built-in self-test.
//!
//! Exit codes: 0 success, 1 mathematical negative (e.g. a non-member),
//! 2 parse or validation error, 3 internal consistency violation.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use tk_core::beta::{n_series, BetaPoly, TruncRing};
use tk_core::kk::{KKElement, Membership};
use tk_core::presentation::Presentation;
use tk_core::selftest::{self, Depth};
use tk_core::tor::{self, Mode};
use tk_core::twist;

#[derive(Parser)]
#[command(
    name = "tk",
    version,
    about = "Exact computations for twisted K-theory coefficient modules",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Twisted K-groups of a presented module (JSON presentation file).
    Twist {
        /// Path to the presentation document.
        file: PathBuf,
        /// Emit the graded group as deterministic compact JSON.
        #[arg(long)]
        json: bool,
    },
    /// Bivariate cooperation elements: membership, decomposition, counit,
    /// conjugation.
    #[command(subcommand)]
    Kk(KkCmd),
    /// Formal-group-law series utilities.
    #[command(subcommand)]
    Fgl(FglCmd),
    /// Truncated β-basis ring arithmetic.
    #[command(subcommand)]
    Cp(CpCmd),
    /// Derived functors of the base change, per homological degree.
    Tor {
        /// Path to the presentation document.
        file: PathBuf,
        /// Highest homological degree to report.
        #[arg(long = "max-s")]
        max_s: usize,
        /// Resolution strategy.
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Re-truncate the presentation before computing.
        #[arg(long)]
        trunc: Option<u32>,
    },
    /// Run the built-in verification suites.
    Selftest {
        #[arg(long, value_enum, default_value_t = DepthArg::Normal)]
        depth: DepthArg,
    },
}

#[derive(Subcommand)]
enum KkCmd {
    /// Decide membership in the integral cooperation algebra.
    Member { expr: String },
    /// Express a member in the integral basis p_0, p_1, ….
    Decompose { expr: String },
    /// Apply the counit (u, v ↦ t).
    Eps { expr: String },
    /// Apply the conjugation (u ↔ v).
    Conj { expr: String },
}

#[derive(Subcommand)]
enum FglCmd {
    /// The multiplication-by-n series [n](s) through the given order.
    Nseries {
        #[arg(allow_negative_numbers = true)]
        n: i64,
        #[arg(long)]
        order: u32,
    },
    /// Verify the product and power laws of the multiplicative formal
    /// group law on the β-series through the given order.
    Identity {
        #[arg(long)]
        m: u32,
        #[arg(long)]
        order: u32,
    },
}

#[derive(Subcommand)]
enum CpCmd {
    /// Product β_i · β_j in the truncated ring.
    Mult {
        i: u32,
        j: u32,
        /// Truncation index D of the ring.
        #[arg(long, default_value_t = 8)]
        trunc: u32,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Free,
    Relative,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Free => Mode::Free,
            ModeArg::Relative => Mode::Relative,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DepthArg {
    Normal,
    Deep,
}

impl From<DepthArg> for Depth {
    fn from(d: DepthArg) -> Depth {
        match d {
            DepthArg::Normal => Depth::Normal,
            DepthArg::Deep => Depth::Deep,
        }
    }
}

const EXIT_OK: i32 = 0;
const EXIT_NEGATIVE: i32 = 1;
const EXIT_INVALID: i32 = 2;
const EXIT_INCONSISTENT: i32 = 3;

fn main() {
    let cli = Cli::parse();
    std::process::exit(run(cli));
}

fn load_presentation(path: &Path, trunc: Option<u32>) -> Result<Presentation, String> {
    let src = fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let p = Presentation::from_json_str(&src).map_err(|e| e.to_string())?;
    match trunc {
        Some(d) => p.with_truncation(d).map_err(|e| e.to_string()),
        None => Ok(p),
    }
}

fn parse_kk(expr: &str) -> Result<KKElement, String> {
    KKElement::parse(expr).map_err(|e| e.to_string())
}

fn run(cli: Cli) -> i32 {
    match cli.cmd {
        Cmd::Twist { file, json } => cmd_twist(&file, json),
        Cmd::Kk(kk) => cmd_kk(kk),
        Cmd::Fgl(fgl) => cmd_fgl(fgl),
        Cmd::Cp(cp) => cmd_cp(cp),
        Cmd::Tor { file, max_s, mode, trunc } => cmd_tor(&file, max_s, mode.into(), trunc),
        Cmd::Selftest { depth } => cmd_selftest(depth.into()),
    }
}

fn cmd_twist(file: &Path, json: bool) -> i32 {
    let p = match load_presentation(file, None) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    match twist::twisted_k_checked(&p) {
        Ok(group) => {
            if json {
                println!("{}", group.to_json_string());
            } else {
                println!("{group}");
            }
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INCONSISTENT
        }
    }
}

fn cmd_kk(kk: KkCmd) -> i32 {
    match kk {
        KkCmd::Member { expr } => {
            let x = match parse_kk(&expr) {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INVALID;
                }
            };
            match x.membership() {
                Membership::Integral => {
                    println!("yes");
                    EXIT_OK
                }
                Membership::NotIntegral { witness } => {
                    println!("no");
                    match witness {
                        Some(w) => println!(
                            "witness: k = {}, t-exponent {}, coefficient {}",
                            w.k, w.t_exp, w.value
                        ),
                        None => println!("witness: none found within the scan range"),
                    }
                    EXIT_NEGATIVE
                }
            }
        }
        KkCmd::Decompose { expr } => {
            let x = match parse_kk(&expr) {
                Ok(x) => x,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_INVALID;
                }
            };
            match x.decompose() {
                Ok(parts) => {
                    if parts.is_empty() {
                        println!("0");
                    } else {
                        let rendered: Vec<String> =
                            parts.iter().map(|(i, c)| format!("({c}) * p_{i}")).collect();
                        println!("{}", rendered.join(" + "));
                    }
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    if let Membership::NotIntegral { witness: Some(w) } = x.membership() {
                        eprintln!(
                            "witness: k = {}, t-exponent {}, coefficient {}",
                            w.k, w.t_exp, w.value
                        );
                    }
                    EXIT_NEGATIVE
                }
            }
        }
        KkCmd::Eps { expr } => match parse_kk(&expr) {
            Ok(x) => {
                println!("{}", x.eps());
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        },
        KkCmd::Conj { expr } => match parse_kk(&expr) {
            Ok(x) => {
                println!("{}", x.conj());
                EXIT_OK
            }
            Err(e) => {
                eprintln!("error: {e}");
                EXIT_INVALID
            }
        },
    }
}

fn cmd_fgl(fgl: FglCmd) -> i32 {
    match fgl {
        FglCmd::Nseries { n, order } => {
            if order == 0 {
                eprintln!("error: order must be at least 1");
                return EXIT_INVALID;
            }
            println!("{}", n_series(n, order));
            EXIT_OK
        }
        FglCmd::Identity { m, order } => {
            if order == 0 {
                eprintln!("error: order must be at least 1");
                return EXIT_INVALID;
            }
            let report = tk_core::beta::fgl_identity_check(m, order);
            if report.passed() {
                println!("pass");
                EXIT_OK
            } else {
                eprintln!("error: formal group law identity failed: {report:?}");
                EXIT_INCONSISTENT
            }
        }
    }
}

fn cmd_cp(cp: CpCmd) -> i32 {
    match cp {
        CpCmd::Mult { i, j, trunc } => {
            if trunc == 0 {
                eprintln!("error: truncation must be at least 1");
                return EXIT_INVALID;
            }
            let ring = TruncRing::new(trunc);
            match ring.multiply(&BetaPoly::beta(i), &BetaPoly::beta(j)) {
                Ok(product) => {
                    println!("{product}");
                    EXIT_OK
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    EXIT_INVALID
                }
            }
        }
    }
}

fn cmd_tor(file: &Path, max_s: usize, mode: Mode, trunc: Option<u32>) -> i32 {
    let p = match load_presentation(file, trunc) {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_INVALID;
        }
    };
    match tor::tor(&p, max_s, mode) {
        Ok(report) => {
            println!("{}", tor::report_json_string(&report));
            EXIT_OK
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_INCONSISTENT
        }
    }
}

fn cmd_selftest(depth: Depth) -> i32 {
    let report = selftest::run(depth);
    for check in &report.checks {
        if check.pass {
            println!("ok   {}", check.name);
        } else {
            println!("FAIL {}: {}", check.name, check.detail);
        }
    }
    let total = report.checks.len();
    if report.passed() {
        println!("self-test passed ({total} checks)");
        EXIT_OK
    } else {
        let failed = report.checks.iter().filter(|c| !c.pass).count();
        println!("self-test FAILED ({failed} of {total} checks)");
        EXIT_INCONSISTENT
    }
}
