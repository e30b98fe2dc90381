//! Variables, clauses and the EAE problem container, plus the Tseitin-style
//! encoders that turn a [`CircuitModel`] and a [`TargetFunction`] into the
//! clause matrix.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::Not;

use thiserror::Error;

use crate::model::{CircuitModel, ModelError, Primitive, PrimitiveKind, SignalId, SignalKind, TargetFunction};
use crate::select;

/// Propositional variable, numbered from 1 as in QDIMACS.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(pub u32);

impl Var {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn pos(self) -> Lit {
        Lit::new(self, false)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(self) -> Lit {
        Lit::new(self, true)
    }

    /// Literal that is true when this variable has value `value`.
    pub fn lit(self, value: bool) -> Lit {
        Lit::new(self, !value)
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Signed DIMACS literal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn new(var: Var, negated: bool) -> Lit {
        assert!(var.0 >= 1 && var.0 <= i32::MAX as u32, "variable {} out of range", var.0);
        let v = var.0 as i32;
        Lit(if negated { -v } else { v })
    }

    pub fn from_dimacs(value: i32) -> Option<Lit> {
        if value == 0 || value == i32::MIN {
            None
        } else {
            Some(Lit(value))
        }
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> Var {
        Var(self.0.unsigned_abs())
    }

    pub fn is_negated(self) -> bool {
        self.0 < 0
    }

    /// Truth value of the literal under an assignment to its variable.
    pub fn eval(self, value: bool) -> bool {
        value != self.is_negated()
    }
}

impl Not for Lit {
    type Output = Lit;

    fn not(self) -> Lit {
        Lit(-self.0)
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CnfError {
    #[error("empty clause")]
    EmptyClause,
    #[error("literal on variable {var} exceeds the allocated {var_count} variables")]
    UnknownVariable { var: u32, var_count: u32 },
    #[error("signal {0} has no variable")]
    Unmapped(SignalId),
    #[error("primitive `{name}` is a {kind}, not a {expected}")]
    WrongPrimitive { name: String, kind: PrimitiveKind, expected: &'static str },
    #[error("arity mismatch: {0}")]
    Arity(String),
    #[error("invalid prefix: {0}")]
    Prefix(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A conjunction of clauses. Literals are stored flat; clause `i` spans
/// `lits[starts[i]..starts[i + 1]]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClauseSet {
    lits: Vec<Lit>,
    starts: Vec<usize>,
    var_count: u32,
}

impl Default for ClauseSet {
    fn default() -> Self {
        ClauseSet { lits: Vec::new(), starts: vec![0], var_count: 0 }
    }
}

impl ClauseSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_vars(var_count: u32) -> Self {
        ClauseSet { var_count, ..Self::default() }
    }

    pub fn new_var(&mut self) -> Var {
        self.var_count += 1;
        Var(self.var_count)
    }

    pub fn var_count(&self) -> u32 {
        self.var_count
    }

    /// Raises the variable count; never lowers it.
    pub fn reserve_vars(&mut self, var_count: u32) {
        self.var_count = self.var_count.max(var_count);
    }

    pub fn len(&self) -> usize {
        self.starts.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn literal_count(&self) -> usize {
        self.lits.len()
    }

    pub fn clause(&self, i: usize) -> &[Lit] {
        &self.lits[self.starts[i]..self.starts[i + 1]]
    }

    pub fn iter(&self) -> impl ExactSizeIterator<Item = &[Lit]> + '_ {
        self.starts.windows(2).map(move |w| &self.lits[w[0]..w[1]])
    }

    pub fn max_clause_len(&self) -> usize {
        self.starts.windows(2).map(|w| w[1] - w[0]).max().unwrap_or(0)
    }

    /// Appends a clause after merging duplicate literals. Returns `Ok(false)`
    /// and stores nothing when the clause is a tautology.
    pub fn add_clause<I: IntoIterator<Item = Lit>>(&mut self, lits: I) -> Result<bool, CnfError> {
        let start = self.lits.len();
        for lit in lits {
            if lit.var().0 > self.var_count {
                self.lits.truncate(start);
                return Err(CnfError::UnknownVariable { var: lit.var().0, var_count: self.var_count });
            }
            let existing = &self.lits[start..];
            if existing.contains(&!lit) {
                self.lits.truncate(start);
                return Ok(false);
            }
            if !existing.contains(&lit) {
                self.lits.push(lit);
            }
        }
        if self.lits.len() == start {
            return Err(CnfError::EmptyClause);
        }
        self.starts.push(self.lits.len());
        Ok(true)
    }

    /// Is every clause satisfied by `assignment` (indexed by variable)?
    pub fn is_satisfied_by(&self, assignment: &[bool]) -> bool {
        self.iter().all(|c| c.iter().any(|l| l.eval(assignment[l.var().index()])))
    }
}

/// Literals that are all false exactly when `vars` spell the little-endian
/// value `value`. A clause `mismatch(vars, v) ∨ rest` reads
/// "(vars = v) → rest".
pub fn mismatch(vars: &[Var], value: u64) -> impl Iterator<Item = Lit> + '_ {
    vars.iter().enumerate().map(move |(i, &v)| v.lit((value >> i) & 1 == 0))
}

/// Tseitin encoding of `out = table(inputs)`, one clause per input minterm.
/// `table(m)` is the output for the little-endian input word `m`.
pub fn encode_function(out: &mut ClauseSet, output: Var, inputs: &[Var], table: impl Fn(u64) -> bool) -> Result<(), CnfError> {
    for m in 0..1u64 << inputs.len() {
        out.add_clause(mismatch(inputs, m).chain([output.lit(table(m))]))?;
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

/// Role of a variable in the ∃c ∀x ∃n prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Role {
    Config,
    Input,
    Node,
}

impl Role {
    pub fn tag(self) -> &'static str {
        match self {
            Role::Config => "c",
            Role::Input => "x",
            Role::Node => "n",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Role> {
        match tag {
            "c" => Some(Role::Config),
            "x" => Some(Role::Input),
            "n" => Some(Role::Node),
            _ => None,
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

/// What a variable stands for. Tseitin auxiliaries have no signal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Symbol {
    pub role: Role,
    pub name: String,
    pub signal: Option<SignalId>,
}

/// The three quantifier blocks ∃c ∀x ∃n.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Prefix {
    pub config: Vec<Var>,
    pub inputs: Vec<Var>,
    pub nodes: Vec<Var>,
}

impl Prefix {
    pub fn blocks(&self) -> [(Quantifier, Role, &[Var]); 3] {
        [
            (Quantifier::Exists, Role::Config, &self.config),
            (Quantifier::Forall, Role::Input, &self.inputs),
            (Quantifier::Exists, Role::Node, &self.nodes),
        ]
    }

    pub fn block(&self, role: Role) -> &[Var] {
        match role {
            Role::Config => &self.config,
            Role::Input => &self.inputs,
            Role::Node => &self.nodes,
        }
    }

    /// Role lookup table indexed by variable; `None` for unquantified.
    pub fn roles(&self, var_count: u32) -> Vec<Option<Role>> {
        let mut roles = vec![None; var_count as usize + 1];
        for (_, role, vars) in self.blocks() {
            for v in vars {
                if let Some(slot) = roles.get_mut(v.index()) {
                    *slot = Some(role);
                }
            }
        }
        roles
    }
}

/// A prenex-CNF QBF with the ∃c ∀x ∃n prefix and its symbol table.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QbfProblem {
    pub prefix: Prefix,
    pub matrix: ClauseSet,
    pub symbols: BTreeMap<Var, Symbol>,
}

impl QbfProblem {
    pub fn var_count(&self) -> u32 {
        self.matrix.var_count()
    }

    /// Checks block disjointness, coverage of the matrix and symbol roles.
    pub fn validate(&self) -> Result<(), CnfError> {
        let var_count = self.var_count();
        let mut seen = vec![false; var_count as usize + 1];
        for (_, role, vars) in self.prefix.blocks() {
            for &v in vars {
                if v.0 == 0 || v.0 > var_count {
                    return Err(CnfError::Prefix(format!("{role}-block variable {v} out of range")));
                }
                if std::mem::replace(&mut seen[v.index()], true) {
                    return Err(CnfError::Prefix(format!("variable {v} quantified twice")));
                }
            }
        }
        for clause in self.matrix.iter() {
            for lit in clause {
                if !seen[lit.var().index()] {
                    return Err(CnfError::Prefix(format!("variable {} is not quantified", lit.var())));
                }
            }
        }
        let roles = self.prefix.roles(var_count);
        for (v, sym) in &self.symbols {
            if roles.get(v.index()).copied().flatten() != Some(sym.role) {
                return Err(CnfError::Prefix(format!("symbol `{}` disagrees with the prefix", sym.name)));
            }
        }
        Ok(())
    }

    /// Variable assigned to `signal`, if any.
    pub fn var_of(&self, signal: SignalId) -> Option<Var> {
        self.symbols.iter().find(|(_, s)| s.signal == Some(signal)).map(|(&v, _)| v)
    }
}

/// Signal → variable map produced by [`assemble`].
#[derive(Debug, Clone, Default)]
pub struct VarMap(Vec<Option<Var>>);

impl VarMap {
    pub fn new(signal_count: usize) -> Self {
        VarMap(vec![None; signal_count])
    }

    pub fn insert(&mut self, signal: SignalId, var: Var) {
        if self.0.len() <= signal.0 {
            self.0.resize(signal.0 + 1, None);
        }
        self.0[signal.0] = Some(var);
    }

    pub fn get(&self, signal: SignalId) -> Result<Var, CnfError> {
        self.0.get(signal.0).copied().flatten().ok_or(CnfError::Unmapped(signal))
    }

    pub fn all(&self, signals: &[SignalId]) -> Result<Vec<Var>, CnfError> {
        signals.iter().map(|&s| self.get(s)).collect()
    }
}

/// LUT read: for each minterm m, `(inputs = m) → (out ↔ t_m)`.
pub fn encode_lut(lut: &Primitive, vars: &VarMap, out: &mut ClauseSet) -> Result<(), CnfError> {
    if !matches!(lut.kind, PrimitiveKind::Lut { .. }) {
        return Err(CnfError::WrongPrimitive { name: lut.name.clone(), kind: lut.kind, expected: "LUT" });
    }
    let inputs = vars.all(&lut.inputs)?;
    let table = vars.all(&lut.config_slots)?;
    let y = vars.get(lut.outputs[0])?;
    if table.len() != 1 << inputs.len() {
        return Err(CnfError::Arity(format!("LUT `{}` has {} table bits", lut.name, table.len())));
    }
    for (m, &t) in table.iter().enumerate() {
        out.add_clause(mismatch(&inputs, m as u64).chain([t.neg(), y.pos()]))?;
        out.add_clause(mismatch(&inputs, m as u64).chain([t.pos(), y.neg()]))?;
    }
    Ok(())
}

/// MUXCY (`out = sel ? ci : di`) and XORCY (`out = a ^ b`) cells.
pub fn encode_carry_cell(prim: &Primitive, vars: &VarMap, out: &mut ClauseSet) -> Result<(), CnfError> {
    let ins = vars.all(&prim.inputs)?;
    let y = vars.get(prim.outputs[0])?;
    match prim.kind {
        PrimitiveKind::Muxcy => {
            let (s, ci, di) = (ins[0], ins[1], ins[2]);
            out.add_clause([s.neg(), ci.neg(), y.pos()])?;
            out.add_clause([s.neg(), ci.pos(), y.neg()])?;
            out.add_clause([s.pos(), di.neg(), y.pos()])?;
            out.add_clause([s.pos(), di.pos(), y.neg()])?;
            out.add_clause([ci.neg(), di.neg(), y.pos()])?;
            out.add_clause([ci.pos(), di.pos(), y.neg()])?;
        }
        PrimitiveKind::Xorcy => {
            encode_function(out, y, &ins, |m| m.count_ones() % 2 == 1)?;
        }
        kind => {
            return Err(CnfError::WrongPrimitive { name: prim.name.clone(), kind, expected: "carry cell" });
        }
    }
    Ok(())
}

/// Encodes any primitive of a model.
pub fn encode_primitive(prim: &Primitive, vars: &VarMap, out: &mut ClauseSet) -> Result<(), CnfError> {
    match prim.kind {
        PrimitiveKind::Lut { .. } => encode_lut(prim, vars, out),
        PrimitiveKind::Muxcy | PrimitiveKind::Xorcy => encode_carry_cell(prim, vars, out),
        PrimitiveKind::Cmux => select::encode_cmux(
            &vars.all(&prim.inputs)?,
            vars.get(prim.outputs[0])?,
            &vars.all(&prim.config_slots)?,
            out,
        ),
        PrimitiveKind::Choose { .. } => select::encode_choose(
            &vars.all(&prim.inputs)?,
            &vars.all(&prim.outputs)?,
            &vars.all(&prim.config_slots)?,
            out,
        ),
    }
}

/// Constrains `outputs` to equal `f(inputs)`. Fresh variables are allocated
/// from `out`; they are returned with a descriptive name so the caller can
/// quantify them.
pub fn encode_target_function(
    f: &TargetFunction,
    inputs: &[Var],
    outputs: &[Var],
    out: &mut ClauseSet,
) -> Result<Vec<(Var, String)>, CnfError> {
    f.validate()?;
    if inputs.len() != f.input_count() || outputs.len() != f.output_count() {
        return Err(CnfError::Arity(format!(
            "target takes {} inputs and {} outputs, got {} and {}",
            f.input_count(),
            f.output_count(),
            inputs.len(),
            outputs.len()
        )));
    }
    let mut aux = Vec::new();
    match *f {
        TargetFunction::Adder { width, carry_out } => {
            let (a, b) = inputs.split_at(width);
            let mut carry: Option<Var> = None;
            for i in 0..width {
                let sum = outputs[i];
                let needs_carry = i + 1 < width || carry_out;
                let next = if !needs_carry {
                    None
                } else if i + 1 == width {
                    Some(outputs[width])
                } else {
                    let v = out.new_var();
                    aux.push((v, format!("ref.c{}", i + 1)));
                    Some(v)
                };
                match carry {
                    None => {
                        encode_function(out, sum, &[a[i], b[i]], |m| m.count_ones() % 2 == 1)?;
                        if let Some(c) = next {
                            encode_function(out, c, &[a[i], b[i]], |m| m == 0b11)?;
                        }
                    }
                    Some(cin) => {
                        let ins = [a[i], b[i], cin];
                        encode_function(out, sum, &ins, |m| m.count_ones() % 2 == 1)?;
                        if let Some(c) = next {
                            encode_function(out, c, &ins, |m| m.count_ones() >= 2)?;
                        }
                    }
                }
                carry = next;
            }
        }
        TargetFunction::TruthTable { ref rows, .. } => {
            for (m, &row) in rows.iter().enumerate() {
                for (j, &y) in outputs.iter().enumerate() {
                    out.add_clause(mismatch(inputs, m as u64).chain([y.lit((row >> j) & 1 == 1)]))?;
                }
            }
        }
    }
    Ok(aux)
}

/// Builds the QBF `∃c ∀x ∃n. F` asking for a configuration of `model` that
/// implements `f`. Variables are numbered CONFIG first, then INPUT, then
/// constants and nodes, then Tseitin auxiliaries, each in signal order.
pub fn assemble(model: &CircuitModel, f: &TargetFunction) -> Result<QbfProblem, CnfError> {
    model.validate()?;
    f.validate()?;
    if model.input_count() != f.input_count() || model.output_count() != f.output_count() {
        return Err(CnfError::Arity(format!(
            "model has {} inputs and {} outputs, target has {} and {}",
            model.input_count(),
            model.output_count(),
            f.input_count(),
            f.output_count()
        )));
    }

    let mut matrix = ClauseSet::new();
    let mut vars = VarMap::new(model.signals.len());
    let mut prefix = Prefix::default();
    let mut symbols = BTreeMap::new();
    let mut bind = |matrix: &mut ClauseSet, vars: &mut VarMap, sig: &crate::model::Signal, role: Role| {
        let v = matrix.new_var();
        vars.insert(sig.id, v);
        symbols.insert(v, Symbol { role, name: sig.name.clone(), signal: Some(sig.id) });
        v
    };

    for s in model.signals_of_kind(SignalKind::Config) {
        prefix.config.push(bind(&mut matrix, &mut vars, s, Role::Config));
    }
    for &x in &model.input_word {
        prefix.inputs.push(bind(&mut matrix, &mut vars, model.signal(x), Role::Input));
    }
    for s in &model.signals {
        if matches!(s.kind, SignalKind::Node | SignalKind::Const0 | SignalKind::Const1) {
            prefix.nodes.push(bind(&mut matrix, &mut vars, s, Role::Node));
        }
    }

    for s in &model.signals {
        match s.kind {
            SignalKind::Const0 => {
                matrix.add_clause([vars.get(s.id)?.neg()])?;
            }
            SignalKind::Const1 => {
                matrix.add_clause([vars.get(s.id)?.pos()])?;
            }
            _ => {}
        }
    }
    for p in &model.primitives {
        encode_primitive(p, &vars, &mut matrix)?;
    }

    let inputs = vars.all(&model.input_word)?;
    let outputs = vars.all(&model.outputs)?;
    for (v, name) in encode_target_function(f, &inputs, &outputs, &mut matrix)? {
        prefix.nodes.push(v);
        symbols.insert(v, Symbol { role: Role::Node, name, signal: None });
    }

    let problem = QbfProblem { prefix, matrix, symbols };
    problem.validate()?;
    Ok(problem)
}
