//! QDIMACS reading and writing, and parsing of QBF solver output.
//!
//! Files written here look like
//!
//! ```text
//! c var 1 c bit0.lut.t0 12
//! c var 9 n ref.c1
//! p cnf 9 4
//! e 1 2 0
//! a 3 4 0
//! e 5 6 7 8 9 0
//! 1 -5 0
//! ```
//!
//! The `c var <var> <role> <name> [<signal>]` comments carry the symbol
//! table; any QDIMACS reader ignores them. Empty quantifier blocks are not
//! written.

use std::collections::BTreeMap;
use std::io::{self, BufRead, Write};

use log::warn;
use thiserror::Error;

use crate::cnf::{ClauseSet, CnfError, Lit, Prefix, QbfProblem, Quantifier, Role, Symbol, Var};
use crate::model::{Configuration, SignalId};

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing `p cnf` header")]
    MissingHeader,
    #[error("header announces {expected} clauses, found {found}")]
    ClauseCount { expected: usize, found: usize },
    #[error("line {line}: literal {literal} out of range (header declares {var_count} variables)")]
    LiteralRange { line: usize, literal: i64, var_count: u32 },
    #[error("prefix is not of the form exists-forall-exists: {0}")]
    NotEae(String),
    #[error("certificate literal {0} is not an outermost existential variable")]
    NonOuterLiteral(i32),
    #[error("certificate assigns variable {0} both ways")]
    Contradiction(u32),
    #[error("variable {0} has no signal in the symbol table")]
    NoSignal(u32),
    #[error(transparent)]
    Cnf(#[from] CnfError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

fn write_uint(buf: &mut Vec<u8>, mut v: u32) {
    let mut tmp = [0u8; 10];
    let mut i = tmp.len();
    loop {
        i -= 1;
        tmp[i] = b'0' + (v % 10) as u8;
        v /= 10;
        if v == 0 {
            break;
        }
    }
    buf.extend_from_slice(&tmp[i..]);
}

fn write_lit(buf: &mut Vec<u8>, lit: Lit) {
    if lit.is_negated() {
        buf.push(b'-');
    }
    write_uint(buf, lit.var().0);
}

/// Writes `problem` in QDIMACS. The output depends only on the problem, so
/// equal problems produce identical bytes.
pub fn write_qdimacs<W: Write>(problem: &QbfProblem, sink: W) -> io::Result<()> {
    let mut sink = io::BufWriter::with_capacity(1 << 16, sink);
    for (var, sym) in &problem.symbols {
        write!(sink, "c var {} {} {}", var, sym.role, sym.name)?;
        if let Some(s) = sym.signal {
            write!(sink, " {s}")?;
        }
        sink.write_all(b"\n")?;
    }
    writeln!(sink, "p cnf {} {}", problem.var_count(), problem.matrix.len())?;
    let mut buf = Vec::with_capacity(1 << 12);
    for (q, _, vars) in problem.prefix.blocks() {
        if vars.is_empty() {
            continue;
        }
        buf.clear();
        buf.push(if q == Quantifier::Exists { b'e' } else { b'a' });
        for v in vars {
            buf.push(b' ');
            write_uint(&mut buf, v.0);
        }
        buf.extend_from_slice(b" 0\n");
        sink.write_all(&buf)?;
    }
    buf.clear();
    for clause in problem.matrix.iter() {
        for &lit in clause {
            write_lit(&mut buf, lit);
            buf.push(b' ');
        }
        buf.extend_from_slice(b"0\n");
        if buf.len() > 1 << 15 {
            sink.write_all(&buf)?;
            buf.clear();
        }
    }
    sink.write_all(&buf)?;
    sink.flush()
}

pub fn to_qdimacs_string(problem: &QbfProblem) -> String {
    let mut out = Vec::new();
    write_qdimacs(problem, &mut out).expect("writing to memory cannot fail");
    String::from_utf8(out).expect("QDIMACS output is ASCII")
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax { line, message: message.into() }
}

fn parse_symbol(line_no: usize, rest: &str) -> Result<(Var, Symbol), ParseError> {
    let fields: Vec<&str> = rest.split_whitespace().collect();
    if fields.len() != 3 && fields.len() != 4 {
        return Err(syntax(line_no, "symbol comment needs `c var <var> <role> <name> [<signal>]`"));
    }
    let var: u32 = fields[0].parse().map_err(|_| syntax(line_no, "bad symbol variable"))?;
    let role = Role::from_tag(fields[1]).ok_or_else(|| syntax(line_no, "bad symbol role"))?;
    let signal = match fields.get(3) {
        Some(s) => Some(SignalId(s.parse().map_err(|_| syntax(line_no, "bad symbol signal"))?)),
        None => None,
    };
    if var == 0 {
        return Err(syntax(line_no, "symbol variable 0"));
    }
    Ok((Var(var), Symbol { role, name: fields[2].to_string(), signal }))
}

/// Maps the declared blocks onto ∃c ∀x ∃n. With a symbol table the roles
/// come from the symbols; otherwise they follow from block positions.
fn assign_roles(blocks: Vec<(Quantifier, Vec<Var>)>, symbols: &BTreeMap<Var, Symbol>) -> Result<Prefix, ParseError> {
    let mut prefix = Prefix::default();
    let pattern: String = blocks.iter().map(|(q, _)| if *q == Quantifier::Exists { 'e' } else { 'a' }).collect();
    let fully_named = !symbols.is_empty() && blocks.iter().all(|(_, vs)| vs.iter().all(|v| symbols.contains_key(v)));
    if fully_named {
        let mut last = Role::Config;
        for (q, vars) in blocks {
            let role = symbols[&vars[0]].role;
            if vars.iter().any(|v| symbols[v].role != role) {
                return Err(ParseError::NotEae(format!("block mixes roles ({pattern})")));
            }
            let wanted = if role == Role::Input { Quantifier::Forall } else { Quantifier::Exists };
            if q != wanted || role < last {
                return Err(ParseError::NotEae(format!("{role}-block in the wrong place ({pattern})")));
            }
            last = role;
            let block = match role {
                Role::Config => &mut prefix.config,
                Role::Input => &mut prefix.inputs,
                Role::Node => &mut prefix.nodes,
            };
            if !block.is_empty() {
                return Err(ParseError::NotEae(format!("repeated {role}-block ({pattern})")));
            }
            *block = vars;
        }
        return Ok(prefix);
    }
    let roles: &[Role] = match pattern.as_str() {
        "" => &[],
        "e" => &[Role::Config],
        "a" => &[Role::Input],
        "ea" => &[Role::Config, Role::Input],
        "ae" => &[Role::Input, Role::Node],
        "ee" => &[Role::Config, Role::Node],
        "eae" => &[Role::Config, Role::Input, Role::Node],
        other => return Err(ParseError::NotEae(other.to_string())),
    };
    for ((_, vars), role) in blocks.into_iter().zip(roles) {
        match role {
            Role::Config => prefix.config = vars,
            Role::Input => prefix.inputs = vars,
            Role::Node => prefix.nodes = vars,
        }
    }
    Ok(prefix)
}

/// Reads a QDIMACS problem. Free variables are treated as outermost
/// existentials, as QDIMACS prescribes.
pub fn parse_qdimacs<R: BufRead>(source: R) -> Result<QbfProblem, ParseError> {
    let mut symbols = BTreeMap::new();
    let mut header: Option<(u32, usize)> = None;
    let mut blocks: Vec<(Quantifier, Vec<Var>)> = Vec::new();
    let mut matrix = ClauseSet::new();
    let mut pending: Vec<Lit> = Vec::new();
    let mut clauses_seen = 0usize;

    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('c') {
            if header.is_none() {
                if let Some(sym) = rest.trim_start().strip_prefix("var ") {
                    let (v, s) = parse_symbol(line_no, sym)?;
                    symbols.insert(v, s);
                }
            }
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('p') {
            if header.is_some() {
                return Err(syntax(line_no, "duplicate header"));
            }
            let f: Vec<&str> = rest.split_whitespace().collect();
            if f.len() != 3 || f[0] != "cnf" {
                return Err(syntax(line_no, "header must be `p cnf <vars> <clauses>`"));
            }
            let vars = f[1].parse().map_err(|_| syntax(line_no, "bad variable count"))?;
            let clauses = f[2].parse().map_err(|_| syntax(line_no, "bad clause count"))?;
            if vars > i32::MAX as u32 {
                return Err(syntax(line_no, "variable count too large"));
            }
            header = Some((vars, clauses));
            matrix.reserve_vars(vars);
            continue;
        }
        let (var_count, _) = header.ok_or(ParseError::MissingHeader)?;
        let mut tokens = trimmed.split_whitespace().peekable();
        let quant = match tokens.peek() {
            Some(&"e") => Some(Quantifier::Exists),
            Some(&"a") => Some(Quantifier::Forall),
            _ => None,
        };
        let parse_int = |t: &str| -> Result<i64, ParseError> {
            t.parse::<i64>().map_err(|_| syntax(line_no, format!("unexpected token `{t}`")))
        };
        let check = |v: i64| -> Result<(), ParseError> {
            if v.unsigned_abs() > u64::from(var_count) {
                Err(ParseError::LiteralRange { line: line_no, literal: v, var_count })
            } else {
                Ok(())
            }
        };
        if let Some(q) = quant {
            tokens.next();
            if clauses_seen > 0 || !pending.is_empty() {
                return Err(syntax(line_no, "quantifier line after clauses"));
            }
            let mut vars = Vec::new();
            let mut terminated = false;
            for t in tokens {
                if terminated {
                    return Err(syntax(line_no, "tokens after terminating 0"));
                }
                let v = parse_int(t)?;
                if v == 0 {
                    terminated = true;
                    continue;
                }
                if v < 0 {
                    return Err(syntax(line_no, "negative variable in quantifier line"));
                }
                check(v)?;
                vars.push(Var(v as u32));
            }
            if !terminated {
                return Err(syntax(line_no, "quantifier line not terminated by 0"));
            }
            if vars.is_empty() {
                return Err(syntax(line_no, "empty quantifier block"));
            }
            blocks.push((q, vars));
            continue;
        }
        for t in tokens {
            let v = parse_int(t)?;
            if v == 0 {
                if pending.is_empty() {
                    return Err(syntax(line_no, "empty clause"));
                }
                matrix.add_clause(pending.drain(..))?;
                clauses_seen += 1;
            } else {
                check(v)?;
                pending.push(Lit::from_dimacs(v as i32).expect("non-zero, in range"));
            }
        }
    }
    let (_, expected) = header.ok_or(ParseError::MissingHeader)?;
    if !pending.is_empty() {
        return Err(syntax(0, "last clause not terminated by 0"));
    }
    if clauses_seen != expected {
        return Err(ParseError::ClauseCount { expected, found: clauses_seen });
    }

    let mut prefix = assign_roles(blocks, &symbols)?;
    let roles = prefix.roles(matrix.var_count());
    let mut free: Vec<Var> = Vec::new();
    for clause in matrix.iter() {
        for lit in clause {
            if roles[lit.var().index()].is_none() && !free.contains(&lit.var()) {
                free.push(lit.var());
            }
        }
    }
    if !free.is_empty() {
        free.sort();
        free.extend(prefix.config);
        prefix.config = free;
    }
    let problem = QbfProblem { prefix, matrix, symbols };
    problem.validate()?;
    Ok(problem)
}

pub fn parse_qdimacs_str(text: &str) -> Result<QbfProblem, ParseError> {
    parse_qdimacs(text.as_bytes())
}

/// Outer-block values reported by a solver.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Certificate {
    pub values: BTreeMap<Var, bool>,
    /// Outer variables the solver did not mention.
    pub unassigned: Vec<Var>,
}

impl Certificate {
    /// Builds a certificate from a total assignment lookup over the outer block.
    pub fn from_fn(problem: &QbfProblem, value: impl Fn(Var) -> Option<bool>) -> Certificate {
        let mut cert = Certificate::default();
        for &v in &problem.prefix.config {
            match value(v) {
                Some(b) => {
                    cert.values.insert(v, b);
                }
                None => cert.unassigned.push(v),
            }
        }
        cert
    }

    /// Maps the outer variables to their CONFIG signals. Unassigned variables
    /// default to `false`.
    pub fn to_configuration(&self, problem: &QbfProblem) -> Result<Configuration, ParseError> {
        if !self.unassigned.is_empty() {
            warn!("{} configuration variables unassigned by the solver; defaulting to 0", self.unassigned.len());
        }
        let mut config = Configuration::new();
        for &v in &problem.prefix.config {
            let signal = problem.symbols.get(&v).and_then(|s| s.signal).ok_or(ParseError::NoSignal(v.0))?;
            config.set(signal, self.values.get(&v).copied().unwrap_or(false));
        }
        Ok(config)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SolverAnswer {
    Sat(Certificate),
    Unsat,
    Unknown,
}

/// Parses solver stdout: a result line (`s cnf 1|0|-1` or
/// `s SATISFIABLE|UNSATISFIABLE|UNKNOWN`) and certificate lines in either
/// the `V <lit> 0` or the `v <lit>... 0` form.
pub fn parse_solver_output<R: BufRead>(source: R, problem: &QbfProblem) -> Result<SolverAnswer, ParseError> {
    let roles = problem.prefix.roles(problem.var_count());
    let mut status: Option<Option<bool>> = None;
    let mut values: BTreeMap<Var, bool> = BTreeMap::new();
    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let line_no = idx + 1;
        let mut tokens = line.split_whitespace();
        match tokens.next() {
            Some("s") => {
                let rest: Vec<&str> = tokens.collect();
                let verdict = match rest.as_slice() {
                    ["cnf", "1", ..] | ["SATISFIABLE"] => Some(true),
                    ["cnf", "0", ..] | ["UNSATISFIABLE"] => Some(false),
                    ["cnf", "-1", ..] | ["UNKNOWN"] => None,
                    _ => return Err(syntax(line_no, format!("unrecognized result line `{line}`"))),
                };
                status = Some(verdict);
            }
            Some("V") | Some("v") => {
                for t in tokens {
                    let v: i32 = t.parse().map_err(|_| syntax(line_no, format!("bad certificate token `{t}`")))?;
                    if v == 0 {
                        continue;
                    }
                    let lit = Lit::from_dimacs(v).ok_or_else(|| syntax(line_no, "bad literal"))?;
                    if roles.get(lit.var().index()).copied().flatten() != Some(Role::Config) {
                        return Err(ParseError::NonOuterLiteral(v));
                    }
                    let value = !lit.is_negated();
                    if values.insert(lit.var(), value) == Some(!value) {
                        return Err(ParseError::Contradiction(lit.var().0));
                    }
                }
            }
            _ => {}
        }
    }
    Ok(match status {
        Some(Some(true)) => SolverAnswer::Sat(Certificate::from_fn(problem, |v| values.get(&v).copied())),
        Some(Some(false)) => SolverAnswer::Unsat,
        _ => SolverAnswer::Unknown,
    })
}
