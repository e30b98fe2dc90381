use std::sync::atomic::{AtomicBool, Ordering};

use crate::cnf::{ClauseSet, Lit, QbfProblem, Role, Var};

use super::SolveError;

/// Upper bounds on the size of an expansion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ExpansionBudget {
    pub max_copies: u64,
    /// Bound on `copies × matrix literals`, an over-estimate of the
    /// expanded size.
    pub max_literals: u64,
}

impl Default for ExpansionBudget {
    fn default() -> Self {
        ExpansionBudget { max_copies: 1 << 16, max_literals: 800_000_000 }
    }
}

/// Propositional instance obtained by instantiating every input word.
///
/// SAT variable layout: `1..=|c|` are the outer variables in block order,
/// then one block of `|n|` variables per input word `X` (in binary counting
/// order over the universal block, first variable least significant). A
/// final extra variable exists only when some clause became empty.
#[derive(Debug, Clone)]
pub struct Expansion {
    pub clauses: ClauseSet,
    pub copies: u64,
    outer_pos: Vec<Option<u32>>,
    node_pos: Vec<Option<u32>>,
    outer_len: u32,
    node_len: u32,
}

impl Expansion {
    /// SAT variable standing for an outer (config) variable.
    pub fn outer_var(&self, v: Var) -> Option<Var> {
        self.outer_pos.get(v.index()).copied().flatten().map(|p| Var(p + 1))
    }

    /// SAT variable standing for inner variable `v` under input word `x`.
    pub fn node_copy(&self, x: u64, v: Var) -> Option<Var> {
        if x >= self.copies {
            return None;
        }
        let p = self.node_pos.get(v.index()).copied().flatten()?;
        Some(Var(1 + self.outer_len + (x as u32) * self.node_len + p))
    }

    /// Number of `(input word, inner variable)` pairs with a copy.
    pub fn copy_map_len(&self) -> u64 {
        self.copies * u64::from(self.node_len)
    }
}

/// Expands `∃c ∀x ∃n. F` into `∃c ∃n₀ … ∃n_{2^|x|−1}. ∧_X F[x := X, n := n_X]`.
/// Clauses satisfied by `X` are dropped and false input literals removed
/// while copying.
pub fn expand_to_sat(problem: &QbfProblem, budget: &ExpansionBudget) -> Result<Expansion, SolveError> {
    Ok(expand_interruptible(problem, budget, None)?.expect("no interrupt flag given"))
}

/// As [`expand_to_sat`]; gives `None` once `stop` is raised.
pub(super) fn expand_interruptible(
    problem: &QbfProblem,
    budget: &ExpansionBudget,
    stop: Option<&AtomicBool>,
) -> Result<Option<Expansion>, SolveError> {
    let prefix = &problem.prefix;
    let x_len = prefix.inputs.len();
    let copies: u128 = 1u128 << x_len.min(127);
    let literals = copies * problem.matrix.literal_count() as u128;
    let sat_vars = prefix.config.len() as u128 + copies * prefix.nodes.len() as u128 + 1;
    if x_len >= 64
        || copies > u128::from(budget.max_copies)
        || literals > u128::from(budget.max_literals)
        || sat_vars > i32::MAX as u128
    {
        return Err(SolveError::Budget {
            copies,
            literals,
            max_copies: budget.max_copies,
            max_literals: budget.max_literals,
        });
    }
    let copies = copies as u64;

    let size = problem.var_count() as usize + 1;
    let mut outer_pos = vec![None; size];
    let mut node_pos = vec![None; size];
    let mut input_pos = vec![None; size];
    for (i, v) in prefix.config.iter().enumerate() {
        outer_pos[v.index()] = Some(i as u32);
    }
    for (i, v) in prefix.nodes.iter().enumerate() {
        node_pos[v.index()] = Some(i as u32);
    }
    for (i, v) in prefix.inputs.iter().enumerate() {
        input_pos[v.index()] = Some(i as u32);
    }
    let roles = prefix.roles(problem.var_count());
    let outer_len = prefix.config.len() as u32;
    let node_len = prefix.nodes.len() as u32;

    let mut clauses = ClauseSet::with_vars(outer_len + copies as u32 * node_len);
    let mut contradiction = false;
    let mut buf: Vec<Lit> = Vec::new();
    for x in 0..copies {
        if stop.is_some_and(|f| f.load(Ordering::Relaxed)) {
            return Ok(None);
        }
        let base = 1 + outer_len + x as u32 * node_len;
        'clause: for clause in problem.matrix.iter() {
            buf.clear();
            for &lit in clause {
                let v = lit.var().index();
                match roles[v] {
                    Some(Role::Input) => {
                        let value = (x >> input_pos[v].unwrap()) & 1 == 1;
                        if lit.eval(value) {
                            continue 'clause;
                        }
                    }
                    Some(Role::Config) => buf.push(Lit::new(Var(outer_pos[v].unwrap() + 1), lit.is_negated())),
                    Some(Role::Node) => buf.push(Lit::new(Var(base + node_pos[v].unwrap()), lit.is_negated())),
                    None => unreachable!("validated problems quantify every matrix variable"),
                }
            }
            if buf.is_empty() {
                contradiction = true;
                continue;
            }
            clauses.add_clause(buf.iter().copied())?;
        }
    }
    if contradiction {
        let falsum = clauses.new_var();
        clauses.add_clause([falsum.pos()])?;
        clauses.add_clause([falsum.neg()])?;
    }
    Ok(Some(Expansion { clauses, copies, outer_pos, node_pos, outer_len, node_len }))
}
