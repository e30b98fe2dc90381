use std::fs::File;
use std::io::{BufWriter, Read};
use std::process::{Command, Stdio};
use std::time::{Duration, Instant};

use log::{debug, warn};

use super::SolveError;
use crate::cnf::QbfProblem;
use crate::qdimacs::{parse_solver_output, write_qdimacs, Certificate, ParseError, SolverAnswer};

pub const EXIT_SAT: i32 = 10;
pub const EXIT_UNSAT: i32 = 20;

/// Runs `<command> <file.qdimacs>` on a temporary copy of `problem`.
///
/// Exit codes 10 and 20 decide the answer when present; otherwise the `s`
/// result line does. Timeouts and unparsable output give `Unknown`.
pub fn solve_external(problem: &QbfProblem, command: &str, timeout: Duration) -> Result<SolverAnswer, SolveError> {
    let mut words = command.split_whitespace();
    let program = words.next().ok_or(SolveError::EmptyCommand)?;
    let file = tempfile::Builder::new().prefix("lutmap-").suffix(".qdimacs").tempfile()?;
    write_qdimacs(problem, BufWriter::new(File::create(file.path())?))?;

    let mut child = Command::new(program)
        .args(words)
        .arg(file.path())
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::null())
        .spawn()
        .map_err(|source| SolveError::Spawn { command: command.to_string(), source })?;
    let mut stdout = child.stdout.take().expect("stdout is piped");
    let reader = std::thread::spawn(move || {
        let mut buf = Vec::new();
        stdout.read_to_end(&mut buf).map(|_| buf)
    });

    let start = Instant::now();
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if start.elapsed() >= timeout {
            warn!("solver `{command}` timed out after {timeout:?}");
            let _ = child.kill();
            let _ = child.wait();
            break None;
        }
        std::thread::sleep(Duration::from_millis(10));
    };
    let output = reader.join().expect("reader thread panicked")?;
    let Some(status) = status else {
        return Ok(SolverAnswer::Unknown);
    };
    debug!("solver exited with {status}");

    let parsed = match parse_solver_output(output.as_slice(), problem) {
        Ok(answer) => answer,
        Err(e @ (ParseError::NonOuterLiteral(_) | ParseError::Contradiction(_))) => return Err(e.into()),
        Err(e) if matches!(status.code(), Some(EXIT_SAT) | Some(EXIT_UNSAT)) => {
            warn!("ignoring unparsable solver output: {e}");
            SolverAnswer::Unknown
        }
        Err(e) => {
            warn!("unparsable solver output: {e}");
            return Ok(SolverAnswer::Unknown);
        }
    };
    Ok(match (status.code(), parsed) {
        (Some(EXIT_UNSAT), _) => SolverAnswer::Unsat,
        (Some(EXIT_SAT), SolverAnswer::Sat(cert)) => SolverAnswer::Sat(cert),
        (Some(EXIT_SAT), _) => SolverAnswer::Sat(Certificate::from_fn(problem, |_| None)),
        (_, answer) => answer,
    })
}
