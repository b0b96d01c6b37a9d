//! `mheis`: command-line access to the m-adic Heisenberg toolkit.
//!
//! Every command prints one JSON document (or a CSV table) on stdout.
//! Exit status: 0 on success, 1 on domain errors, 2 on usage errors.

mod input;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use mheis::fractions::{BaseRing, FractionRing, MultSet};
use mheis::haar::{self, CylinderDoc, CylinderFunction};
use mheis::ratio::{decimal_approx, format_rational, parse_rational};
use mheis::{selftest, tower, BigInt, BilinearForm, ChainFamily, ChainSpec, Exec, HeisenbergContext, RadiusProfile};
use num_rational::BigRational;
use serde_json::{json, Value};

use input::{int_arg, int_json, point_arg, shorten_points, RunConfig};

#[derive(Debug)]
pub enum CliError {
    Usage { flag: String, message: String },
    Domain { name: String, message: String },
}

impl CliError {
    pub fn usage(flag: &str, message: impl Into<String>) -> Self {
        CliError::Usage { flag: flag.to_string(), message: message.into() }
    }

    /// `name` is the error type; the variant is read off its debug form.
    pub fn domain<E: fmt::Debug + fmt::Display>(name: &str, e: &E) -> Self {
        // wrapped errors debug-print as `Outer(Inner { .. })`
        let dbg = format!("{e:?}");
        let mut path = vec![name.to_string()];
        let mut rest = dbg.as_str();
        loop {
            let ident: String = rest.chars().take_while(|c| c.is_alphanumeric() || *c == '_').collect();
            if ident.is_empty() {
                break;
            }
            rest = &rest[ident.len()..];
            path.push(ident);
            match rest.strip_prefix('(') {
                Some(inner) if inner.starts_with(|c: char| c.is_ascii_uppercase()) => rest = inner,
                _ => break,
            }
        }
        CliError::Domain { name: path.join("::"), message: e.to_string() }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => 2,
            CliError::Domain { .. } => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage { flag, message } => write!(f, "error: invalid value for {flag}: {message}"),
            CliError::Domain { name, message } => write!(f, "error[{name}]: {message}"),
        }
    }
}

#[derive(Parser)]
#[command(name = "mheis", version, about = "Exact arithmetic on m-adic Heisenberg groups")]
struct Cli {
    #[command(flatten)]
    globals: Globals,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Globals {
    /// Modulus m >= 2 [default: 2]
    #[arg(long, global = true)]
    m: Option<String>,
    /// Rank N of the module [default: from --b, else 1]
    #[arg(long = "N", global = true)]
    rank: Option<usize>,
    /// Bilinear form: an integer matrix in JSON, or @file [default: [[1]]]
    #[arg(long, global = true)]
    b: Option<String>,
    /// Absolute precision n [default: 6]
    #[arg(long, global = true)]
    n: Option<u32>,
    /// Radius profile: JSON document or a geometric ratio such as 1/2
    #[arg(long, global = true)]
    profile: Option<String>,
    /// Seed for randomized suites [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Worker threads for exhaustive enumerations (1 = sequential)
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// JSON file with defaults for the flags above
    #[arg(long, global = true, env = "MHEIS_CONFIG")]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum FracOp {
    Member,
    Equal,
    Add,
    Mul,
    Kernel,
}

#[derive(Subcommand)]
enum Command {
    /// Ultrametric distance of two integers along a chain
    Dist {
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Chain document; defaults to the powers of m
        #[arg(long)]
        chain: Option<String>,
    },
    /// Group product g ◇ h
    Mul {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Group inverse
    Inv {
        #[arg(long)]
        g: String,
    },
    /// Conjugate g ◇ h ◇ g⁻¹
    Conj {
        #[arg(long)]
        g: String,
        #[arg(long)]
        h: String,
    },
    /// Dilation (x, s) ↦ (r x, r² s)
    Dilate {
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        #[arg(long)]
        g: String,
    },
    /// Membership of g in the j-th subgroup of a chain family
    Member {
        #[arg(long)]
        g: String,
        #[arg(long, default_value = "H")]
        family: ChainFamily,
        #[arg(long)]
        j: u32,
    },
    /// Canonical left coset representatives of G / family_level
    Cosets {
        #[arg(long, default_value = "G")]
        family: ChainFamily,
        #[arg(long)]
        level: u32,
    },
    /// Haar integral of a cylinder function
    Haar {
        #[arg(long, default_value = "G")]
        family: ChainFamily,
        #[arg(long)]
        level: Option<u32>,
        /// const1, const:p/q or indicator:<point JSON>
        #[arg(long)]
        function: Option<String>,
        /// Cylinder function document
        #[arg(long)]
        file: Option<PathBuf>,
        /// Also print a decimal approximation with this many digits
        #[arg(long)]
        decimal: Option<u32>,
    },
    /// Normality (or, with --a, weak normality) in a finite quotient
    CheckNormal {
        #[arg(long, default_value = "G")]
        family: ChainFamily,
        #[arg(long)]
        j: u32,
        /// Quotient level L [default: n]
        #[arg(long)]
        level: Option<u32>,
        /// Conjugating element for the weak normality search
        #[arg(long)]
        a: Option<String>,
        /// Largest l tried by the weak search [default: 2j]
        #[arg(long)]
        depth: Option<u32>,
    },
    /// Topological equivalence of two chains up to a depth
    CheckEquiv {
        #[arg(long)]
        first: String,
        #[arg(long)]
        second: String,
        #[arg(long)]
        depth: u32,
        /// Witness search bound [default: depth]
        #[arg(long)]
        search: Option<u32>,
    },
    /// Arithmetic in a ring of fractions
    Frac {
        /// Z or Z/k
        #[arg(long, default_value = "Z")]
        ring: String,
        /// Multiplicative set document, e.g. {"kind":"generated","gens":[2]}
        #[arg(long = "set")]
        set: String,
        #[arg(long, value_enum)]
        op: FracOp,
        /// First fraction a/s
        #[arg(long, allow_hyphen_values = true)]
        a: Option<String>,
        /// Second fraction b/t
        #[arg(long = "c", allow_hyphen_values = true)]
        c: Option<String>,
        /// Ring element for member and kernel
        #[arg(long, allow_hyphen_values = true)]
        v: Option<String>,
    },
    /// Seeded run of the property suite; nonzero exit on any failure
    Selftest,
}

/// Flags merged over the config file.
struct Settings {
    m: BigInt,
    form: BilinearForm,
    n: u32,
    profile: RadiusProfile,
    seed: u64,
    format: Format,
    exec: Exec,
}

impl Settings {
    fn resolve(g: &Globals) -> Result<Self, CliError> {
        let cfg = match &g.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        let m = match (&g.m, &cfg.m) {
            (Some(t), _) => int_arg("--m", t)?,
            (None, Some(v)) => input::int_value("m", v)?,
            (None, None) => BigInt::from(2),
        };
        if m < BigInt::from(2) {
            return Err(CliError::usage("--m", format!("modulus must be at least 2, got {m}")));
        }
        let rank = g.rank.or(cfg.rank);
        let form = match (&g.b, cfg.b) {
            (Some(t), _) => Some(input::form_value("--b", input::json_arg("--b", t)?)?),
            (None, Some(v)) => Some(input::form_value("b", v)?),
            (None, None) => None,
        };
        let form = match (form, rank) {
            (Some(f), Some(r)) if f.rank() != r => {
                return Err(CliError::usage("--N", format!("N = {r} but the form has rank {}", f.rank())));
            }
            (Some(f), _) => f,
            (None, Some(0)) => return Err(CliError::usage("--N", "rank must be positive")),
            (None, Some(r)) => BilinearForm::new(vec![vec![0; r]; r]).expect("square"),
            (None, None) => BilinearForm::new(vec![vec![1]]).expect("square"),
        };
        let n = g.n.or(cfg.n).unwrap_or(6);
        if n == 0 {
            return Err(CliError::usage("--n", "precision must be positive"));
        }
        let profile = match (&g.profile, cfg.profile) {
            (Some(t), _) => input::profile_arg("--profile", t)?,
            (None, Some(v)) => input::profile_value("profile", v)?,
            (None, None) => RadiusProfile::default(),
        };
        let format = match (g.format, cfg.format.as_deref()) {
            (Some(f), _) => f,
            (None, Some(s)) => Format::from_str(s, true).map_err(|e| CliError::usage("format", e))?,
            (None, None) => Format::Json,
        };
        let exec = match g.jobs.or(cfg.jobs) {
            Some(0) => return Err(CliError::usage("--jobs", "need at least one worker")),
            Some(j) => Exec::with_jobs(j),
            None => Exec::default(),
        };
        Ok(Settings { m, form, n, profile, seed: g.seed.or(cfg.seed).unwrap_or(0), format, exec })
    }

    fn context(&self) -> Result<HeisenbergContext, CliError> {
        Ok(HeisenbergContext::new(self.m.clone(), self.form.clone(), self.n)
            .map_err(|e| CliError::domain("HeisenbergError", &e))?
            .with_profile(self.profile.clone())
            .with_exec(self.exec))
    }

    fn json_only(&self) -> Result<(), CliError> {
        if self.format == Format::Csv {
            return Err(CliError::usage("--format", "csv output is only available for cosets and selftest"));
        }
        Ok(())
    }
}

fn heis<T>(r: Result<T, mheis::heisenberg::HeisenbergError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::domain("HeisenbergError", &e))
}

fn haar_err<T>(r: Result<T, haar::HaarError>) -> Result<T, CliError> {
    r.map_err(|e| CliError::domain("HaarError", &e))
}

fn doc<T: serde::Serialize>(v: &T) -> String {
    output::to_json(&shorten_points(serde_json::to_value(v).expect("serializable")))
}

fn run(cli: Cli) -> Result<(String, bool), CliError> {
    let st = Settings::resolve(&cli.globals)?;
    let ok = |s: String| Ok((s, true));
    match cli.command {
        Command::Dist { x, y, chain } => {
            st.json_only()?;
            let chain = match chain {
                Some(t) => input::chain_arg("--chain", &t)?,
                None => ChainSpec::IdealPower { m: st.m.clone() },
            };
            let d = tower::distance(&int_arg("--x", &x)?, &int_arg("--y", &y)?, &chain, &st.profile);
            ok(output::to_json(&d))
        }
        Command::Mul { g, h } => {
            st.json_only()?;
            let ctx = st.context()?;
            let (g, h) = (point_arg(&ctx, "--g", &g)?, point_arg(&ctx, "--h", &h)?);
            ok(doc(&heis(ctx.mul(&g, &h))?))
        }
        Command::Inv { g } => {
            st.json_only()?;
            let ctx = st.context()?;
            ok(doc(&heis(ctx.inv(&point_arg(&ctx, "--g", &g)?))?))
        }
        Command::Conj { g, h } => {
            st.json_only()?;
            let ctx = st.context()?;
            let (g, h) = (point_arg(&ctx, "--g", &g)?, point_arg(&ctx, "--h", &h)?);
            ok(doc(&heis(ctx.conjugate(&g, &h))?))
        }
        Command::Dilate { r, g } => {
            st.json_only()?;
            let ctx = st.context()?;
            let g = point_arg(&ctx, "--g", &g)?;
            ok(doc(&heis(ctx.dilate(&int_arg("--r", &r)?, &g))?))
        }
        Command::Member { g, family, j } => {
            st.json_only()?;
            let ctx = st.context()?;
            let g = point_arg(&ctx, "--g", &g)?;
            let membership = heis(ctx.chain_member(&g, family, j))?;
            let valuation = ctx.group_valuation(&g, family);
            ok(output::to_json(&json!({"membership": membership, "valuation": valuation})))
        }
        Command::Cosets { family, level } => {
            let ctx = st.context()?;
            let reps = haar_err(haar::enumerate_cosets(&ctx, family, level))?;
            if st.format == Format::Csv {
                let mut header: Vec<String> = (1..=ctx.rank()).map(|i| format!("x{i}")).collect();
                header.push("s".into());
                let rows: Vec<Vec<String>> = reps
                    .reps
                    .iter()
                    .map(|p| p.residues().map(|r| r.to_string()).collect())
                    .collect();
                return ok(output::to_csv(&header, &rows));
            }
            ok(doc(&json!({"family": family, "level": level, "count": reps.len(), "reps": reps.reps})))
        }
        Command::Haar { family, level, function, file, decimal } => {
            st.json_only()?;
            let ctx = st.context()?;
            let f = match (function, file) {
                (Some(_), Some(_)) => return Err(CliError::usage("--file", "give either --function or --file")),
                (None, None) => return Err(CliError::usage("--function", "a function or --file is required")),
                (None, Some(path)) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| CliError::usage("--file", format!("cannot read {}: {e}", path.display())))?;
                    let d: CylinderDoc = serde_json::from_str(&text).map_err(|e| CliError::usage("--file", e.to_string()))?;
                    haar_err(CylinderFunction::from_doc(&ctx, &d))?
                }
                (Some(name), None) => {
                    let level = level.ok_or_else(|| CliError::usage("--level", "required with --function"))?;
                    if name == "const1" {
                        haar_err(CylinderFunction::constant(&ctx, family, level, BigRational::from_integer(1.into())))?
                    } else if let Some(c) = name.strip_prefix("const:") {
                        let c = parse_rational(c).map_err(|e| CliError::usage("--function", e.to_string()))?;
                        haar_err(CylinderFunction::constant(&ctx, family, level, c))?
                    } else if let Some(p) = name.strip_prefix("indicator:") {
                        let g = point_arg(&ctx, "--function", p)?;
                        haar_err(CylinderFunction::indicator(&ctx, family, level, &g))?
                    } else {
                        return Err(CliError::usage("--function", format!("unknown function {name:?}")));
                    }
                }
            };
            let value = haar_err(haar::integral(&ctx, &f))?;
            let mut out = serde_json::Map::new();
            out.insert("integral".into(), Value::String(format_rational(&value)));
            if let Some(d) = decimal {
                out.insert("decimal".into(), Value::String(decimal_approx(&value, d)));
            }
            ok(output::to_json(&out))
        }
        Command::CheckNormal { family, j, level, a, depth } => {
            st.json_only()?;
            let ctx = st.context()?;
            let level = level.unwrap_or(st.n);
            match a {
                None => ok(doc(&heis(ctx.check_normality(family, j, level))?)),
                Some(a) => {
                    let a = point_arg(&ctx, "--a", &a)?;
                    let depth = depth.unwrap_or(2 * j);
                    ok(doc(&heis(ctx.check_weak_normality(family, &a, j, depth, level))?))
                }
            }
        }
        Command::CheckEquiv { first, second, depth, search } => {
            st.json_only()?;
            let a = input::chain_arg("--first", &first)?;
            let b = input::chain_arg("--second", &second)?;
            let report = tower::check_chain_equivalence_bounded(&a, &b, depth, search.unwrap_or(depth));
            ok(output::to_json(&report))
        }
        Command::Frac { ring, set, op, a, c, v } => {
            st.json_only()?;
            let ring: BaseRing = ring.parse().map_err(|e: mheis::fractions::FracError| CliError::usage("--ring", e.to_string()))?;
            let set: MultSet = serde_json::from_value(input::json_arg("--set", &set)?)
                .map_err(|e| CliError::usage("--set", e.to_string()))?;
            let fr = FractionRing::new(ring, set).map_err(|e| CliError::domain("FracError", &e))?;
            let frac = |flag: &str, t: Option<String>| -> Result<mheis::Fraction, CliError> {
                let t = t.ok_or_else(|| CliError::usage(flag, "required for this operation"))?;
                let f = input::fraction_arg(flag, &t)?;
                fr.frac(f.num, f.den).map_err(|e| CliError::domain("FracError", &e))
            };
            let elem = |t: Option<String>| -> Result<BigInt, CliError> {
                int_arg("--v", &t.ok_or_else(|| CliError::usage("--v", "required for this operation"))?)
            };
            let frac_json = |f: &mheis::Fraction| json!({"num": f.num.to_string(), "den": f.den.to_string()});
            let out = match op {
                FracOp::Member => json!({"member": fr.contains(&elem(v)?)}),
                FracOp::Kernel => json!({"witness": fr.kernel_witness(elem(v)?).map(|w| int_json(&w))}),
                FracOp::Equal => json!({"equal": fr.equal(&frac("--a", a)?, &frac("--c", c)?)}),
                FracOp::Add => frac_json(&fr.add(&frac("--a", a)?, &frac("--c", c)?)),
                FracOp::Mul => frac_json(&fr.mul(&frac("--a", a)?, &frac("--c", c)?)),
            };
            ok(output::to_json(&out))
        }
        Command::Selftest => {
            let report = selftest::run(st.seed, st.exec);
            let text = if st.format == Format::Csv {
                let rows: Vec<Vec<String>> = report
                    .checks
                    .iter()
                    .map(|c| vec![c.name.to_string(), c.cases.to_string(), c.passed.to_string()])
                    .collect();
                output::to_csv(&["check".into(), "cases".into(), "passed".into()], &rows)
            } else {
                output::to_json(&report)
            };
            Ok((text, report.passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok((text, passed)) => {
            println!("{text}");
            if passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: selftest failed");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
