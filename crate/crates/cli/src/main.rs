use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_complex::Complex64 as C64;
use serde::Serialize;

use vekua::bergman::{DiskQuadrature, KernelTruncation, QuadField};
use vekua::formal_powers::{FormalPolynomial, Unit};
use vekua::io::{self, RunConfig, SCHEMA};
use vekua::verify::{self, Suite};
use vekua::{Bicomplex, Error};

const EXIT_VERIFY_FAILED: u8 = 1;
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "vekua", version, about = "Radial formal powers, transmutation checks and Bergman kernels")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the profiles and write them, with a manifest, to `output_dir`.
    Basis {
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Run verification suites and write a JSON report.
    Verify {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Report path; defaults to `<output_dir>/verify_<suite>.json`.
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Evaluate a formal power, the kernel or a projection and print JSON.
    Eval {
        #[arg(short, long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        what: What,
        #[arg(long)]
        n: Option<usize>,
        /// `one` or `j`.
        #[arg(long)]
        unit: Option<String>,
        /// Bicomplex coefficient: `a`, `a,b` or `a,b,c,d` for (a+bi) + 𝐣(c+di), or `j`.
        #[arg(long = "A", allow_hyphen_values = true)]
        a: Option<String>,
        /// Complex point `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        z: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        zeta: Option<String>,
        /// Field CSV `r,theta,sc_re,sc_im,vec_re,vec_im` at the quadrature nodes.
        #[arg(long)]
        field: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SuiteArg {
    Algebra,
    Ode,
    Transmutation,
    Vekua,
    Bergman,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Suite {
        match s {
            SuiteArg::Algebra => Suite::Algebra,
            SuiteArg::Ode => Suite::Ode,
            SuiteArg::Transmutation => Suite::Transmutation,
            SuiteArg::Vekua => Suite::Vekua,
            SuiteArg::Bergman => Suite::Bergman,
            SuiteArg::All => Suite::All,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum What {
    #[value(name = "formal_power")]
    FormalPower,
    Kernel,
    Projection,
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

fn parse_numbers(s: &str) -> Result<Vec<f64>, Failure> {
    s.split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| Failure::Usage(format!("not a number: {t:?} in {s:?}"))))
        .collect()
}

fn parse_complex(s: &str) -> Result<C64, Failure> {
    match parse_numbers(s)?[..] {
        [re] => Ok(C64::new(re, 0.0)),
        [re, im] => Ok(C64::new(re, im)),
        _ => Err(Failure::Usage(format!("expected re or re,im, got {s:?}"))),
    }
}

fn parse_bicomplex(s: &str) -> Result<Bicomplex, Failure> {
    if s.trim() == "j" {
        return Ok(Bicomplex::J);
    }
    match parse_numbers(s)?[..] {
        [a] => Ok(Bicomplex::from_real(a)),
        [a, b] => Ok(Bicomplex::new(C64::new(a, b), C64::new(0.0, 0.0))),
        [a, b, c, d] => Ok(Bicomplex::new(C64::new(a, b), C64::new(c, d))),
        _ => Err(Failure::Usage(format!("expected 1, 2 or 4 numbers for a bicomplex value, got {s:?}"))),
    }
}

fn required<T>(value: Option<T>, flag: &str) -> Result<T, Failure> {
    value.ok_or_else(|| Failure::Usage(format!("--{flag} is required here")))
}

fn print_line(text: &str) {
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    print_line(&io::to_json(value)?);
    Ok(())
}

#[derive(Serialize)]
struct ComplexOut([f64; 2]);

impl From<C64> for ComplexOut {
    fn from(z: C64) -> Self {
        ComplexOut([z.re, z.im])
    }
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Basis { config } => {
            let cfg = RunConfig::load(&config)?;
            let basis = cfg.build_basis()?;
            let manifest = io::write_basis(&cfg, &basis)?;
            print_json(&manifest)?;
            Ok(0)
        }
        Command::Verify { config, suite, report } => {
            let cfg = RunConfig::load(&config)?;
            let suite = Suite::from(suite);
            let basis = io::load_or_build(&cfg)?;
            let rep = verify::run(suite, &cfg, &basis)?;
            let path = report.unwrap_or_else(|| cfg.output_dir.join(format!("verify_{}.json", suite.name())));
            if let Some(dir) = path.parent() {
                fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
            }
            let text = io::to_json(&rep)?;
            fs::write(&path, format!("{text}\n")).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
            print_line(&text);
            for c in rep.results.iter().filter(|c| !c.pass) {
                eprintln!("FAIL {}/{}: measured {:e}, threshold {:e}", c.suite, c.name, c.measured, c.threshold);
            }
            Ok(if rep.pass { 0 } else { EXIT_VERIFY_FAILED })
        }
        Command::Eval { config, what, n, unit, a, z, zeta, field } => {
            let cfg = RunConfig::load(&config)?;
            match what {
                What::FormalPower => {
                    let n = required(n, "n")?;
                    let z = parse_complex(&required(z, "z")?)?;
                    let coeff = match (a, unit) {
                        (Some(_), Some(_)) => return Err(Failure::Usage("give either --A or --unit, not both".into())),
                        (Some(a), None) => parse_bicomplex(&a)?,
                        (None, unit) => unit
                            .as_deref()
                            .unwrap_or("one")
                            .parse::<Unit>()
                            .map_err(|e| Failure::Usage(e.to_string()))?
                            .as_bicomplex(),
                    };
                    let basis = io::load_or_build(&cfg)?;
                    let value = basis.eval_power(n, coeff, z)?;
                    #[derive(Serialize)]
                    struct Out {
                        schema: u32,
                        n: usize,
                        #[serde(rename = "A")]
                        a: Bicomplex,
                        z: ComplexOut,
                        value: Bicomplex,
                    }
                    print_json(&Out { schema: SCHEMA, n, a: coeff, z: z.into(), value })?;
                }
                What::Kernel => {
                    let coeff = parse_bicomplex(&required(a, "A")?)?;
                    let z = parse_complex(&required(z, "z")?)?;
                    let zeta = parse_complex(&required(zeta, "zeta")?)?;
                    let basis = io::load_or_build(&cfg)?;
                    let kernel = KernelTruncation::new(&basis, basis.n_max())?;
                    let value = kernel.eval(coeff, z, zeta)?;
                    #[derive(Serialize)]
                    struct Out {
                        schema: u32,
                        z: ComplexOut,
                        zeta: ComplexOut,
                        #[serde(rename = "A")]
                        a: Bicomplex,
                        value: Bicomplex,
                    }
                    print_json(&Out { schema: SCHEMA, z: z.into(), zeta: zeta.into(), a: coeff, value })?;
                }
                What::Projection => {
                    let path = required(field, "field")?;
                    let basis = io::load_or_build(&cfg)?;
                    let quad: DiskQuadrature = cfg.disk_quadrature()?;
                    let handle = fs::File::open(&path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                    let psi = QuadField::read_csv(&quad, handle)?;
                    let kernel = KernelTruncation::new(&basis, basis.n_max())?;
                    let coefficients: FormalPolynomial = kernel.project(&psi, &quad)?;
                    #[derive(Serialize)]
                    struct Out {
                        schema: u32,
                        coefficients: FormalPolynomial,
                    }
                    print_json(&Out { schema: SCHEMA, coefficients })?;
                }
            }
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Run(err)) => {
            #[derive(Serialize)]
            struct Body<'a> {
                kind: &'a str,
                message: String,
            }
            #[derive(Serialize)]
            struct Out<'a> {
                schema: u32,
                error: Body<'a>,
            }
            let out = Out { schema: SCHEMA, error: Body { kind: err.kind(), message: err.to_string() } };
            eprintln!("{}", serde_json::to_string(&out).unwrap_or_else(|_| err.to_string()));
            ExitCode::from(EXIT_ERROR)
        }
    }
}
