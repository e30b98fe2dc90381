//! Technology mapping as quantified boolean satisfiability.
//!
//! A configurable circuit (LUTs, input selectors, carry-chain cells) and a
//! target function are compiled into `∃c ∀x ∃n. F(c, x, n)`: some
//! configuration `c` exists such that for every input word `x` the internal
//! signals `n` can be consistent with both the circuit and the target. A
//! model of the outer block is an implementing configuration.
//!
//! The pipeline is [`model`] → [`cnf::assemble`] → [`qdimacs`] →
//! [`solve`] → [`verify`].

pub mod cnf;
pub mod combinatorics;
pub mod model;
pub mod qdimacs;
pub mod select;
pub mod solve;
pub mod testset;
pub mod verify;

pub use cnf::{assemble, ClauseSet, Lit, QbfProblem, Role, Var};
pub use model::{
    build_carry_chain_adder_model, config_bit_count, CarryChainAdder, CircuitModel, Configuration, Encoding,
    ModelBuilder, ModelFile, SignalId, TargetFunction,
};
pub use qdimacs::{parse_qdimacs, parse_solver_output, write_qdimacs, Certificate, SolverAnswer};
pub use solve::{expand_to_sat, sat_solve, solve_embedded, solve_external};
pub use verify::{simulate, verify_implements, Verdict};
