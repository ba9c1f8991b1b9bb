//! `trapgen`: generalize a satisfying assignment of a linear-constraint
//! formula into a trapezoidal region, restrict it for backtrack-free
//! sampling, and emit satisfying vectors — to stdout, to a fuzz target's
//! stdin, or as heat-map CSV.
//!
//! Exit codes: 0 ok, 1 usage/parse error, 2 unsatisfiable, 3 invariant
//! violation.

mod fuzz;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};

use trapgen::generalizer::generalize;
use trapgen::oracle::{check_invariants, naive_solve, GridSpec, DEFAULT_VIOLATION_CAP};
use trapgen::parser::{parse_problem, render_region, render_vector, Problem};
use trapgen::restrictor::restrict;
use trapgen::sampler::{Sampler, SamplerConfig};
use trapgen::{Region, Sign, VarTable, Vector};

const EXIT_USAGE: u8 = 1;
const EXIT_UNSAT: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(
    name = "trapgen",
    about = "Trapezoidal generalization and sampling of linear-constraint solution sets"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Generalize the problem's formula at its reference vector and print
    /// the region.
    Generalize {
        file: PathBuf,
        #[command(flatten)]
        solve: SolveOpts,
    },
    /// Print satisfying vectors, one per line.
    Sample {
        file: PathBuf,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solve: SolveOpts,
    },
    /// Pipe satisfying vectors into a target process and report throughput
    /// and crashes.
    Fuzz {
        file: PathBuf,
        /// Target command line, split on whitespace (no shell quoting).
        #[arg(long)]
        cmd: String,
        #[arg(long, conflicts_with = "seconds")]
        count: Option<u64>,
        #[arg(long)]
        seconds: Option<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solve: SolveOpts,
    },
    /// Check the generalization invariants by exhaustive grid enumeration.
    Check {
        file: PathBuf,
        /// Grid box; also used by --solve when the file has no reference.
        #[arg(long = "box", num_args = 2, value_names = ["LO", "HI"],
              default_values_t = [-8i64, 8], allow_negative_numbers = true)]
        grid_box: Vec<i64>,
        #[arg(long, default_value_t = 2)]
        denom: u64,
        /// Search the grid for a reference vector when the file has none.
        #[arg(long)]
        solve: bool,
        /// Negative-control hook: corrupt the region before checking.
        #[arg(long, hide = true)]
        inject_bad_region: bool,
    },
    /// Emit `x,y` CSV rows projecting samples onto two variables.
    Heatmap {
        file: PathBuf,
        #[arg(long = "vars", num_args = 2, value_names = ["X", "Y"])]
        var_names: Vec<String>,
        #[arg(long)]
        count: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        solve: SolveOpts,
    },
}

#[derive(Args)]
struct SolveOpts {
    /// Search the grid for a reference vector when the file has none.
    #[arg(long)]
    solve: bool,
    #[arg(long = "box", num_args = 2, value_names = ["LO", "HI"],
          default_values_t = [-10i64, 10], allow_negative_numbers = true,
          id = "solve_box")]
    grid_box: Vec<i64>,
    #[arg(long, default_value_t = 2, id = "solve_denom")]
    denom: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests are not usage errors.
            if err.use_stderr() {
                eprintln!("{err}");
                return ExitCode::from(EXIT_USAGE);
            }
            print!("{err}");
            return ExitCode::SUCCESS;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(EXIT_USAGE)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.cmd {
        Cmd::Generalize { file, solve } => {
            let problem = load(&file)?;
            let Some(v) = reference(&problem, &solve, 0)? else {
                return Ok(ExitCode::from(EXIT_UNSAT));
            };
            let region = generalize(&problem.formula, &v);
            println!("{}", render_region(&region, &problem.vars));
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Sample {
            file,
            count,
            seed,
            solve,
        } => {
            let problem = load(&file)?;
            let Some(v) = reference(&problem, &solve, seed)? else {
                return Ok(ExitCode::from(EXIT_UNSAT));
            };
            let mut pipeline = match SamplePipeline::new(&problem, &v, seed)? {
                Some(p) => p,
                None => return Ok(ExitCode::from(EXIT_UNSAT)),
            };
            let stdout = std::io::stdout();
            let mut out = std::io::BufWriter::new(stdout.lock());
            for _ in 0..count {
                let w = pipeline.next()?;
                writeln!(out, "{}", render_vector(&w, &problem.vars))?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Fuzz {
            file,
            cmd,
            count,
            seconds,
            seed,
            solve,
        } => {
            let problem = load(&file)?;
            let Some(v) = reference(&problem, &solve, seed)? else {
                return Ok(ExitCode::from(EXIT_UNSAT));
            };
            let pipeline = match SamplePipeline::new(&problem, &v, seed)? {
                Some(p) => p,
                None => return Ok(ExitCode::from(EXIT_UNSAT)),
            };
            let budget = match (count, seconds) {
                (Some(n), _) => fuzz::Budget::Count(n),
                (None, Some(t)) => fuzz::Budget::Seconds(t),
                (None, None) => return Err(anyhow!("pass --count N or --seconds T")),
            };
            let report = fuzz::run(pipeline, &problem.vars, &cmd, budget)?;
            print!("{report}");
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Check {
            file,
            grid_box,
            denom,
            solve,
            inject_bad_region,
        } => {
            let problem = load(&file)?;
            let solve = SolveOpts {
                solve,
                grid_box: grid_box.clone(),
                denom,
            };
            let Some(v) = reference(&problem, &solve, 0)? else {
                return Ok(ExitCode::from(EXIT_UNSAT));
            };
            let mut region = generalize(&problem.formula, &v);
            if inject_bad_region {
                region = region.complement();
            }
            let spec = GridSpec::new(grid_box[0], grid_box[1], denom);
            let report = check_invariants(
                &problem.formula,
                &v,
                &region,
                &spec,
                &problem.vars,
                DEFAULT_VIOLATION_CAP,
            );
            println!(
                "inv1 {}",
                if report.inv1_ok { "ok" } else { "violated" }
            );
            println!(
                "inv2 direction {}",
                if report.truth_at_reference { "2.a" } else { "2.b" }
            );
            println!("points {}", report.points_checked);
            println!("violations {}", report.inv2_violations.len());
            for w in &report.inv2_violations {
                println!("counterexample {}", render_vector(w, &problem.vars));
            }
            if report.passed() {
                println!("PASS");
                Ok(ExitCode::SUCCESS)
            } else {
                println!("FAIL");
                Ok(ExitCode::from(EXIT_VIOLATION))
            }
        }
        Cmd::Heatmap {
            file,
            var_names,
            count,
            seed,
            solve,
        } => {
            let problem = load(&file)?;
            let dims = var_names
                .iter()
                .map(|name| {
                    problem
                        .vars
                        .dim_of(name)
                        .ok_or_else(|| anyhow!("variable `{name}` is not declared"))
                })
                .collect::<Result<Vec<_>>>()?;
            let Some(v) = reference(&problem, &solve, seed)? else {
                return Ok(ExitCode::from(EXIT_UNSAT));
            };
            let mut pipeline = match SamplePipeline::new(&problem, &v, seed)? {
                Some(p) => p,
                None => return Ok(ExitCode::from(EXIT_UNSAT)),
            };
            let stdout = std::io::stdout();
            let mut out = std::io::BufWriter::new(stdout.lock());
            for _ in 0..count {
                let w = pipeline.next()?;
                writeln!(
                    out,
                    "{},{}",
                    render_rational_plain(w.value(dims[0])),
                    render_rational_plain(w.value(dims[1]))
                )?;
            }
            out.flush()?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn render_rational_plain(r: &trapgen::Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

fn load(file: &PathBuf) -> Result<Problem> {
    let text = std::fs::read_to_string(file)
        .with_context(|| format!("cannot read {}", file.display()))?;
    let problem = parse_problem(&text).map_err(|err| anyhow!("{}: {err}", file.display()))?;
    Ok(problem)
}

/// The reference vector: from the file if present, otherwise from the naive
/// solver when `--solve` was passed. `Ok(None)` means provably no grid point
/// satisfies the formula (exit 2); a missing reference without `--solve` is
/// a usage error.
fn reference(problem: &Problem, solve: &SolveOpts, seed: u64) -> Result<Option<Vector>> {
    if let Some(v) = &problem.reference {
        return Ok(Some(v.clone()));
    }
    if !solve.solve {
        return Err(anyhow!(
            "the problem has no reference vector; pass --solve to search for one"
        ));
    }
    let spec = GridSpec::new(solve.grid_box[0], solve.grid_box[1], solve.denom);
    Ok(naive_solve(&problem.formula, &problem.vars, &spec, 20_000, seed))
}

/// Shared generalize → restrict → sample pipeline. Positive regions sample
/// the restricted trapezoid and map back; negative regions sample the
/// complement directly.
pub(crate) struct SamplePipeline {
    vars: VarTable,
    mode: Mode,
    sampler: Sampler,
}

enum Mode {
    Positive(trapgen::restrictor::RestrictionResult),
    Negative(trapgen::Trapezoid),
}

impl SamplePipeline {
    /// `Ok(None)` when the region is an unsatisfiable complement of the
    /// empty trapezoid.
    fn new(problem: &Problem, v: &Vector, seed: u64) -> Result<Option<Self>> {
        let region: Region = generalize(&problem.formula, v);
        let mode = match region.sign() {
            Sign::Positive => Mode::Positive(
                restrict(region.body(), v, &problem.vars)
                    .map_err(|err| anyhow!("restriction failed: {err}"))?,
            ),
            Sign::Negative => {
                if region.body().is_empty() {
                    return Ok(None);
                }
                Mode::Negative(region.into_body())
            }
        };
        Ok(Some(SamplePipeline {
            vars: problem.vars.clone(),
            mode,
            sampler: Sampler::new(SamplerConfig::with_seed(seed)),
        }))
    }

    pub(crate) fn next(&mut self) -> Result<Vector> {
        let w = match &self.mode {
            Mode::Positive(res) => self.sampler.sample_original(res, &self.vars),
            Mode::Negative(t) => self.sampler.sample_complement(t, &self.vars),
        }?;
        Ok(w)
    }
}
