//! Fuzz-target supervision: streams rendered vectors into a child process's
//! stdin, detects target deaths, respawns, and reports throughput.
//!
//! Writes go straight to the target's stdin pipe, whose finite kernel buffer
//! is the bounded queue: a slow target blocks the writer instead of growing
//! memory, and delivery stays ordered and lossless. A vector whose write
//! fails is retried against the respawned target, so nothing is dropped or
//! duplicated.

use std::fmt;
use std::io::Write;
use std::process::{Child, Command, ExitStatus, Stdio};
use std::time::Instant;

use anyhow::{bail, Context, Result};

use trapgen::parser::render_vector;
use trapgen::VarTable;

use crate::SamplePipeline;

pub enum Budget {
    Count(u64),
    Seconds(f64),
}

impl Budget {
    fn exhausted(&self, delivered: u64, start: Instant) -> bool {
        match self {
            Budget::Count(n) => delivered >= *n,
            Budget::Seconds(t) => start.elapsed().as_secs_f64() >= *t,
        }
    }
}

pub struct Report {
    pub delivered: u64,
    pub crashes: u64,
    pub seconds: f64,
    pub first_crash_vector: Option<String>,
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "vectors {}", self.delivered)?;
        writeln!(f, "crashes {}", self.crashes)?;
        writeln!(f, "seconds {:.3}", self.seconds)?;
        let rate = if self.seconds > 0.0 {
            self.delivered as f64 / self.seconds
        } else {
            0.0
        };
        writeln!(f, "rate {rate:.0}")?;
        if let Some(v) = &self.first_crash_vector {
            writeln!(f, "first_crash_vector {v}")?;
        }
        Ok(())
    }
}

struct Target {
    child: Child,
    /// The last vector successfully written to this child; a detected death
    /// is attributed to it.
    last_line: Option<String>,
}

impl Target {
    fn spawn(argv: &[&str]) -> Result<Target> {
        let child = Command::new(argv[0])
            .args(&argv[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::null())
            .stderr(Stdio::null())
            .spawn()
            .with_context(|| format!("cannot spawn target `{}`", argv[0]))?;
        Ok(Target {
            child,
            last_line: None,
        })
    }

    fn write_line(&mut self, line: &str) -> std::io::Result<()> {
        let stdin = self.child.stdin.as_mut().expect("stdin is piped");
        stdin.write_all(line.as_bytes())?;
        stdin.write_all(b"\n")
    }

    /// Closes stdin and reaps the child.
    fn finish(mut self) -> Result<ExitStatus> {
        drop(self.child.stdin.take());
        self.child.wait().context("waiting for target")
    }
}

pub fn run(
    mut pipeline: SamplePipeline,
    vars: &VarTable,
    cmd: &str,
    budget: Budget,
) -> Result<Report> {
    let argv: Vec<&str> = cmd.split_whitespace().collect();
    if argv.is_empty() {
        bail!("empty target command");
    }

    let mut target = Target::spawn(&argv)?;
    let mut delivered = 0u64;
    let mut crashes = 0u64;
    let mut first_crash_vector: Option<String> = None;
    let start = Instant::now();

    let record_death = |status: ExitStatus,
                            last: Option<String>,
                            crashes: &mut u64,
                            first: &mut Option<String>| {
        if !status.success() {
            *crashes += 1;
            if first.is_none() {
                *first = last;
            }
        }
    };

    while !budget.exhausted(delivered, start) {
        let w = pipeline.next()?;
        let line = render_vector(&w, vars);
        let mut respawns = 0;
        loop {
            match target.write_line(&line) {
                Ok(()) => break,
                Err(_) => {
                    let last = target.last_line.take();
                    let status = target.finish()?;
                    record_death(status, last, &mut crashes, &mut first_crash_vector);
                    respawns += 1;
                    if respawns > 10 {
                        bail!("target keeps dying before accepting any input");
                    }
                    target = Target::spawn(&argv)?;
                }
            }
        }
        target.last_line = Some(line);
        delivered += 1;
    }

    let last = target.last_line.take();
    let status = target.finish()?;
    record_death(status, last, &mut crashes, &mut first_crash_vector);

    Ok(Report {
        delivered,
        crashes,
        seconds: start.elapsed().as_secs_f64(),
        first_crash_vector,
    })
}
