//! Command-line front end. [`run`] is the whole program minus process
//! plumbing, so it can be driven from tests.

use std::cmp::Ordering;
use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::filters::{farkas_certify, filter_member, mindim_witness, FarkasOutcome, MINDIM_BOX_HALF_WIDTH};
use crate::io::{
    certificate_json, counterexample_json, flag_json, matrix_json, membership_json, parse_matrix,
    parse_polyset, plot_scalar, polyhedron_json,
};
use crate::polyhedra::{flag_from_matrix, FlagKind};
use crate::prime::{canonicalize, classify, compare, decide_equal, height, is_order, min_filter_dim, Classification, EqualityVerdict, Prime};
use crate::tropical::{Term, TropPolynomial};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_DOMAIN: i32 = 3;

/// Environment variable overriding the radical cap.
pub const RADICAL_CAP_ENV: &str = "VALFLAG_RADICAL_CAP";

#[derive(Debug, Parser)]
#[command(name = "valflag", version, about = "Exact classification of valuated term preorders")]
struct Cli {
    /// Write the result to this file instead of stdout.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the canonical form of a defining matrix.
    Canon { matrix: PathBuf },
    /// Decide whether two matrices define the same prime.
    Eq { a: PathBuf, b: PathBuf },
    /// Classify a prime and report order/height/minimum filter dimension.
    Classify { matrix: PathBuf },
    /// Print the flag of polyhedra (or cones) of a prime.
    Flag {
        matrix: PathBuf,
        /// Flag of cones instead of polyhedra.
        #[arg(long)]
        cones: bool,
    },
    /// Test whether a polyhedral set lies in the prime's filter.
    Member { matrix: PathBuf, set: PathBuf },
    /// Certify that the hypotheses' half-spaces imply the target's.
    Cert {
        /// Comma-separated variable names.
        #[arg(long, default_value = "x,y")]
        vars: String,
        /// Ask for the cone variant (not supported).
        #[arg(long)]
        homogeneous: bool,
        target: String,
        #[arg(required = true)]
        hypotheses: Vec<String>,
    },
    /// Compare two polynomials under a prime.
    Cmp { matrix: PathBuf, f: String, g: String },
    /// Produce a filter member of minimum dimension.
    Mindim { matrix: PathBuf },
    /// Emit 2-D plot data for a prime's flag.
    Plot { matrix: PathBuf },
}

/// Exit code and captured output of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Self {
            code,
            stdout,
            stderr: String::new(),
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Parse { .. } | Error::Io(_) | Error::InvalidMatrix(_) | Error::Dimension { .. } => EXIT_USAGE,
        _ => EXIT_DOMAIN,
    }
}

pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                Outcome {
                    code: EXIT_USAGE,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(EXIT_OK, text)
            };
        }
    };
    let result = dispatch(&cli.command);
    let mut out = match result {
        Ok((code, text)) => Outcome::ok(code, text),
        Err(e) => Outcome {
            code: exit_code(&e),
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
        },
    };
    if let Some(path) = &cli.output {
        if let Err(e) = fs::write(path, &out.stdout) {
            return Outcome {
                code: EXIT_USAGE,
                stdout: String::new(),
                stderr: format!("error: cannot write {}: {e}\n", path.display()),
            };
        }
        out.stdout.clear();
    }
    out
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::Io(format!("cannot read {}: {e}", path.display())))
}

fn load_prime(path: &Path) -> Result<(Prime, Vec<String>)> {
    let (m, vars) = parse_matrix(&read(path)?)?;
    Ok((canonicalize(&m)?, vars))
}

fn pretty(v: &Value) -> String {
    format!("{}\n", serde_json::to_string_pretty(v).expect("values serialize"))
}

fn dispatch(cmd: &Command) -> Result<(i32, String)> {
    match cmd {
        Command::Canon { matrix } => {
            let (p, vars) = load_prime(matrix)?;
            Ok((EXIT_OK, pretty(&matrix_json(p.matrix(), &vars))))
        }
        Command::Eq { a, b } => {
            let (pa, vars) = load_prime(a)?;
            let (pb, _) = load_prime(b)?;
            match decide_equal(&pa, &pb)? {
                EqualityVerdict::Equal => Ok((EXIT_OK, "Equal\n".into())),
                EqualityVerdict::Distinguished(w) => Ok((
                    EXIT_NEGATIVE,
                    format!("Distinguished {}\n", w.to_term().display_with(&vars)),
                )),
            }
        }
        Command::Classify { matrix } => {
            let (p, _) = load_prime(matrix)?;
            let class = classify(&p);
            let mut text = format!("{class}\nis_order: {}\n", is_order(&p)?);
            if class == Classification::Cont {
                text += &format!("height: {}\nmin_filter_dim: {}\n", height(&p)?, min_filter_dim(&p)?);
            }
            Ok((EXIT_OK, text))
        }
        Command::Flag { matrix, cones } => {
            let (p, _) = load_prime(matrix)?;
            let kind = if *cones { FlagKind::Cones } else { FlagKind::Polyhedra };
            Ok((EXIT_OK, pretty(&flag_json(&flag_from_matrix(&p, kind)?))))
        }
        Command::Member { matrix, set } => {
            let (p, _) = load_prime(matrix)?;
            let u = parse_polyset(&read(set)?, p.n())?;
            let ans = filter_member(&p, &u)?;
            let code = if ans.member { EXIT_OK } else { EXIT_NEGATIVE };
            Ok((code, pretty(&membership_json(&ans))))
        }
        Command::Cert {
            vars,
            homogeneous,
            target,
            hypotheses,
        } => {
            if *homogeneous {
                // Containment of homogenized half-spaces is not characterized by
                // such products, so there is nothing sound to return.
                return Err(Error::Domain(
                    "homogeneous certificates are not offered: the certificate criterion \
                     is false for the cone sets"
                        .into(),
                ));
            }
            let vars: Vec<String> = vars.split(',').map(|s| s.trim().to_string()).collect();
            let a = Term::parse(target, &vars)?;
            let a_l = hypotheses
                .iter()
                .map(|h| Term::parse(h, &vars))
                .collect::<Result<Vec<_>>>()?;
            match farkas_certify(&a_l, &a)? {
                FarkasOutcome::Certificate(c) => Ok((EXIT_OK, pretty(&certificate_json(&c)))),
                FarkasOutcome::Counterexample(x) => Ok((EXIT_NEGATIVE, pretty(&counterexample_json(&x)))),
            }
        }
        Command::Cmp { matrix, f, g } => {
            let (p, vars) = load_prime(matrix)?;
            let f = TropPolynomial::parse(f, &vars)?;
            let g = TropPolynomial::parse(g, &vars)?;
            let word = match compare(&p, &f, &g)? {
                Ordering::Less => "less",
                Ordering::Equal => "equal",
                Ordering::Greater => "greater",
            };
            Ok((EXIT_OK, format!("{word}\n")))
        }
        Command::Mindim { matrix } => {
            let (p, _) = load_prime(matrix)?;
            let w = mindim_witness(&p)?;
            let mut v = polyhedron_json(&w);
            v["dimension"] = json!(w.dimension()?);
            Ok((EXIT_OK, pretty(&v)))
        }
        Command::Plot { matrix } => {
            let (p, _) = load_prime(matrix)?;
            if p.n() != 2 {
                return Err(Error::Domain(format!("plot needs n = 2 (got {})", p.n())));
            }
            let flag = flag_from_matrix(&p, FlagKind::Polyhedra)?;
            let w = mindim_witness(&p)?;
            let vertex: Vec<Value> = flag.base().iter().map(plot_scalar).collect();
            let dirs: Vec<Value> = flag
                .dirs()
                .iter()
                .map(|d| json!(d.iter().map(plot_scalar).collect::<Vec<_>>()))
                .collect();
            let half = MINDIM_BOX_HALF_WIDTH;
            let bounds: Vec<Value> = flag
                .base()
                .iter()
                .flat_map(|c| {
                    let r = c.round();
                    [(&r - half).to_string(), (&r + half).to_string()]
                })
                .map(|s| json!(s))
                .collect();
            let v = json!({
                "vertex": vertex,
                "dirs": dirs,
                "box": bounds,
                "mindim": polyhedron_json(&w),
            });
            Ok((EXIT_OK, pretty(&v)))
        }
    }
}
