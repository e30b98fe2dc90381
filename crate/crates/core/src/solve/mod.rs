//! Desk-scale QBF solving by universal expansion into SAT, and a bridge to
//! external QDIMACS solvers.

mod expand;
mod external;
pub mod sat;

use std::io;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::mpsc;
use std::time::Duration;

use thiserror::Error;

pub use expand::{expand_to_sat, ExpansionBudget, Expansion};
pub use external::{solve_external, EXIT_SAT, EXIT_UNSAT};
pub use sat::{sat_solve, Branching, SatResult, SatSolver, SatStats};

use crate::cnf::{CnfError, QbfProblem};
use crate::qdimacs::{Certificate, ParseError, SolverAnswer};

#[derive(Debug, Error)]
pub enum SolveError {
    #[error("expansion needs {copies} copies of the inner block ({literals} literals), over the budget of {max_copies} copies / {max_literals} literals")]
    Budget { copies: u128, literals: u128, max_copies: u64, max_literals: u64 },
    #[error("cannot start solver `{command}`: {source}")]
    Spawn { command: String, source: io::Error },
    #[error("empty solver command")]
    EmptyCommand,
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Cnf(#[from] CnfError),
}

#[derive(Debug, Clone, Default)]
pub struct SolveOptions {
    pub budget: ExpansionBudget,
    pub branching: Branching,
    /// Wall-clock limit; the answer is `Unknown` when it expires.
    pub timeout: Option<Duration>,
}

/// Outcome of [`solve_embedded_with`], with search statistics.
#[derive(Debug, Clone)]
pub struct EmbeddedRun {
    pub answer: SolverAnswer,
    pub copies: u64,
    pub sat_vars: u32,
    pub sat_clauses: usize,
    pub stats: SatStats,
}

/// Decides `∃c ∀x ∃n. F` by expansion and CDCL. On SAT the certificate
/// holds the value of every outer variable.
pub fn solve_embedded(problem: &QbfProblem) -> Result<SolverAnswer, SolveError> {
    Ok(solve_embedded_with(problem, &SolveOptions::default())?.answer)
}

pub fn solve_embedded_with(problem: &QbfProblem, options: &SolveOptions) -> Result<EmbeddedRun, SolveError> {
    problem.validate()?;
    let stop = AtomicBool::new(false);
    let (done_tx, done_rx) = mpsc::channel::<()>();
    std::thread::scope(|scope| {
        if let Some(limit) = options.timeout {
            let stop = &stop;
            scope.spawn(move || {
                if let Err(mpsc::RecvTimeoutError::Timeout) = done_rx.recv_timeout(limit) {
                    stop.store(true, Ordering::Relaxed);
                }
            });
        }
        let run = run_embedded(problem, options, &stop);
        drop(done_tx);
        run
    })
}

fn run_embedded(problem: &QbfProblem, options: &SolveOptions, stop: &AtomicBool) -> Result<EmbeddedRun, SolveError> {
    let Some(expansion) = expand::expand_interruptible(problem, &options.budget, Some(stop))? else {
        return Ok(EmbeddedRun {
            answer: SolverAnswer::Unknown,
            copies: 1 << problem.prefix.inputs.len(),
            sat_vars: 0,
            sat_clauses: 0,
            stats: SatStats::default(),
        });
    };
    let mut solver = SatSolver::with_branching(&expansion.clauses, options.branching);
    let result = solver.solve_interruptible(Some(stop));
    let answer = match result {
        Err(sat::Interrupted) => SolverAnswer::Unknown,
        Ok(SatResult::Unsat) => SolverAnswer::Unsat,
        Ok(SatResult::Sat(model)) => {
            SolverAnswer::Sat(Certificate::from_fn(problem, |v| expansion.outer_var(v).map(|s| model[s.index()])))
        }
    };
    Ok(EmbeddedRun {
        answer,
        copies: expansion.copies,
        sat_vars: expansion.clauses.var_count(),
        sat_clauses: expansion.clauses.len(),
        stats: solver.stats,
    })
}
