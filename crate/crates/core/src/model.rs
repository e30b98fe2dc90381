//! Domain types for configurable circuits: signals, primitives, the circuit
//! model itself, target functions and configurations.
//!
//! A [`CircuitModel`] is the characteristic function of a reconfigurable
//! circuit: its CONFIG signals are the configuration word, its INPUT signals
//! the functional inputs, and its output list the observed result bits.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::combinatorics::{binomial, ceil_log2};

/// Dense index of a signal inside a [`CircuitModel`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignalId(pub usize);

impl SignalId {
    pub fn index(self) -> usize {
        self.0
    }
}

impl fmt::Display for SignalId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignalKind {
    Config,
    Input,
    Node,
    Const0,
    Const1,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signal {
    pub id: SignalId,
    pub name: String,
    pub kind: SignalKind,
}

/// Kinds of configurable primitive. For the selectors the pool is the
/// primitive's input list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "type")]
pub enum PrimitiveKind {
    Lut { arity: usize },
    Cmux,
    Choose { k: usize },
    /// Carry mux: inputs are (select, carry-in, data-in).
    Muxcy,
    /// Sum xor: inputs are (propagate, carry-in).
    Xorcy,
}

impl fmt::Display for PrimitiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PrimitiveKind::Lut { arity } => write!(f, "LUT{arity}"),
            PrimitiveKind::Cmux => f.write_str("CMUX"),
            PrimitiveKind::Choose { k } => write!(f, "CHOOSE{k}"),
            PrimitiveKind::Muxcy => f.write_str("MUXCY"),
            PrimitiveKind::Xorcy => f.write_str("XORCY"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Primitive {
    pub name: String,
    pub kind: PrimitiveKind,
    pub inputs: Vec<SignalId>,
    pub config_slots: Vec<SignalId>,
    pub outputs: Vec<SignalId>,
}

impl Primitive {
    /// Number of config slots a primitive of this kind and input count needs.
    pub fn expected_config_slots(kind: PrimitiveKind, inputs: usize) -> Option<usize> {
        match kind {
            PrimitiveKind::Lut { arity } => 1usize.checked_shl(arity as u32),
            PrimitiveKind::Cmux => Some(ceil_log2(inputs as u64) as usize),
            PrimitiveKind::Choose { k } => {
                Some(ceil_log2(binomial(inputs as u64, k as u64)) as usize)
            }
            PrimitiveKind::Muxcy | PrimitiveKind::Xorcy => Some(0),
        }
    }

    fn check_arity(&self) -> Result<(), ModelError> {
        let (want_inputs, want_outputs) = match self.kind {
            PrimitiveKind::Lut { arity } => (Some(arity), 1),
            PrimitiveKind::Cmux => (None, 1),
            PrimitiveKind::Choose { k } => (None, k),
            PrimitiveKind::Muxcy => (Some(3), 1),
            PrimitiveKind::Xorcy => (Some(2), 1),
        };
        let bad = |what: &str| ModelError::Arity {
            primitive: self.name.clone(),
            detail: what.to_string(),
        };
        if let Some(n) = want_inputs {
            if self.inputs.len() != n {
                return Err(bad(&format!("expected {n} inputs, found {}", self.inputs.len())));
            }
        }
        if self.inputs.is_empty() {
            return Err(bad("selector pool is empty"));
        }
        if let PrimitiveKind::Choose { k } = self.kind {
            if k == 0 || k > self.inputs.len() {
                return Err(bad(&format!("cannot choose {k} of {}", self.inputs.len())));
            }
        }
        if self.outputs.len() != want_outputs {
            return Err(bad(&format!(
                "expected {want_outputs} outputs, found {}",
                self.outputs.len()
            )));
        }
        let slots = Primitive::expected_config_slots(self.kind, self.inputs.len())
            .ok_or_else(|| bad("LUT arity too large"))?;
        if self.config_slots.len() != slots {
            return Err(bad(&format!(
                "expected {slots} config slots, found {}",
                self.config_slots.len()
            )));
        }
        Ok(())
    }
}

/// Strategy for feeding the k inputs of a LUT from a pool of n signals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    /// k independent n:1 configurable muxes.
    #[serde(rename = "naive")]
    NaiveCmux,
    /// Mux j chooses among the first n−j pool signals.
    #[serde(rename = "shrinking")]
    ShrinkingCmux,
    /// One selector that forwards a k-subset in ascending order.
    Choose,
}

impl Encoding {
    pub const ALL: [Encoding; 3] = [Encoding::NaiveCmux, Encoding::ShrinkingCmux, Encoding::Choose];

    pub fn as_str(self) -> &'static str {
        match self {
            Encoding::NaiveCmux => "naive",
            Encoding::ShrinkingCmux => "shrinking",
            Encoding::Choose => "choose",
        }
    }
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Encoding {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "naive" => Ok(Encoding::NaiveCmux),
            "shrinking" => Ok(Encoding::ShrinkingCmux),
            "choose" => Ok(Encoding::Choose),
            other => Err(ModelError::UnknownEncoding(other.to_string())),
        }
    }
}

/// Number of configuration bits needed to select `k` of `n` pool signals.
pub fn config_bit_count(encoding: Encoding, n: usize, k: usize) -> Result<u32, ModelError> {
    if k == 0 || n == 0 || k > n {
        return Err(ModelError::SelectionSize { n, k });
    }
    let bits = match encoding {
        Encoding::NaiveCmux => k as u32 * ceil_log2(n as u64),
        Encoding::ShrinkingCmux => (0..k).map(|j| ceil_log2((n - j) as u64)).sum(),
        Encoding::Choose => ceil_log2(binomial(n as u64, k as u64)),
    };
    Ok(bits)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("adder width must be at least 1")]
    Width,
    #[error("LUT arity {arity} out of range (need 2 <= arity <= {max})")]
    LutArity { arity: usize, max: usize },
    #[error("cannot select {k} of {n} signals")]
    SelectionSize { n: usize, k: usize },
    #[error("unknown encoding `{0}` (expected naive, shrinking or choose)")]
    UnknownEncoding(String),
    #[error("signal ids are not dense: position {position} holds id {id}")]
    SparseIds { position: usize, id: SignalId },
    #[error("signal {0} is referenced but does not exist")]
    DanglingSignal(SignalId),
    #[error("primitive `{primitive}`: {detail}")]
    Arity { primitive: String, detail: String },
    #[error("signal `{name}` has kind {kind:?} where {expected} was required")]
    SignalKind { name: String, kind: SignalKind, expected: &'static str },
    #[error("node `{0}` has no driver")]
    Undriven(String),
    #[error("node `{0}` has more than one driver")]
    MultipleDrivers(String),
    #[error("config signal `{0}` is used by more than one slot")]
    SharedConfig(String),
    #[error("combinational cycle through `{0}`")]
    Cycle(String),
    #[error("target function: {0}")]
    Target(String),
}

/// A combinational network of configurable primitives.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CircuitModel {
    pub signals: Vec<Signal>,
    pub primitives: Vec<Primitive>,
    /// Observed outputs y⃗, in order.
    pub outputs: Vec<SignalId>,
    /// Functional inputs x⃗, in order.
    pub input_word: Vec<SignalId>,
}

impl CircuitModel {
    pub fn signal(&self, id: SignalId) -> &Signal {
        &self.signals[id.0]
    }

    pub fn signals_of_kind(&self, kind: SignalKind) -> impl Iterator<Item = &Signal> + '_ {
        self.signals.iter().filter(move |s| s.kind == kind)
    }

    pub fn config_count(&self) -> usize {
        self.signals_of_kind(SignalKind::Config).count()
    }

    pub fn input_count(&self) -> usize {
        self.input_word.len()
    }

    pub fn output_count(&self) -> usize {
        self.outputs.len()
    }

    /// Checks every structural invariant and returns the primitives in an
    /// order where each is preceded by the drivers of its inputs.
    pub fn validate(&self) -> Result<Vec<usize>, ModelError> {
        for (position, s) in self.signals.iter().enumerate() {
            if s.id.0 != position {
                return Err(ModelError::SparseIds { position, id: s.id });
            }
        }
        let exists = |id: SignalId| {
            if id.0 < self.signals.len() {
                Ok(())
            } else {
                Err(ModelError::DanglingSignal(id))
            }
        };
        let require = |id: SignalId, ok: &[SignalKind], expected: &'static str| {
            exists(id)?;
            let s = self.signal(id);
            if ok.contains(&s.kind) {
                Ok(())
            } else {
                Err(ModelError::SignalKind { name: s.name.clone(), kind: s.kind, expected })
            }
        };

        let mut driver: Vec<Option<usize>> = vec![None; self.signals.len()];
        let mut config_used = vec![false; self.signals.len()];
        for (p_idx, p) in self.primitives.iter().enumerate() {
            p.check_arity()?;
            for &i in &p.inputs {
                require(
                    i,
                    &[SignalKind::Input, SignalKind::Node, SignalKind::Const0, SignalKind::Const1],
                    "a data signal",
                )?;
            }
            for &c in &p.config_slots {
                require(c, &[SignalKind::Config], "a config signal")?;
                if std::mem::replace(&mut config_used[c.0], true) {
                    return Err(ModelError::SharedConfig(self.signal(c).name.clone()));
                }
            }
            for &o in &p.outputs {
                require(o, &[SignalKind::Node], "a node")?;
                if driver[o.0].replace(p_idx).is_some() {
                    return Err(ModelError::MultipleDrivers(self.signal(o).name.clone()));
                }
            }
        }
        for s in &self.signals {
            if s.kind == SignalKind::Node && driver[s.id.0].is_none() {
                return Err(ModelError::Undriven(s.name.clone()));
            }
        }
        for &x in &self.input_word {
            require(x, &[SignalKind::Input], "an input")?;
        }
        if self.input_word.len() != self.signals_of_kind(SignalKind::Input).count() {
            return Err(ModelError::Arity {
                primitive: "<model>".into(),
                detail: "input word does not list every input exactly once".into(),
            });
        }
        for &y in &self.outputs {
            require(y, &[SignalKind::Node], "a node")?;
        }

        // Kahn's algorithm over primitives.
        let mut readers: Vec<Vec<usize>> = vec![Vec::new(); self.signals.len()];
        let mut pending = vec![0usize; self.primitives.len()];
        for (p_idx, p) in self.primitives.iter().enumerate() {
            for &i in &p.inputs {
                if driver[i.0].is_some() {
                    readers[i.0].push(p_idx);
                    pending[p_idx] += 1;
                }
            }
        }
        let mut order = Vec::with_capacity(self.primitives.len());
        let mut ready: Vec<usize> = (0..self.primitives.len()).filter(|&p| pending[p] == 0).collect();
        ready.reverse();
        while let Some(p_idx) = ready.pop() {
            order.push(p_idx);
            for &o in &self.primitives[p_idx].outputs {
                for &r in &readers[o.0] {
                    pending[r] -= 1;
                    if pending[r] == 0 {
                        ready.push(r);
                    }
                }
            }
        }
        if order.len() != self.primitives.len() {
            let stuck = (0..self.primitives.len()).find(|&p| pending[p] > 0).unwrap();
            return Err(ModelError::Cycle(self.primitives[stuck].name.clone()));
        }
        Ok(order)
    }
}

/// Incremental constructor for [`CircuitModel`]s. Signal ids are handed out
/// in creation order, which also fixes the variable numbering of the
/// generated formula.
#[derive(Debug, Default)]
pub struct ModelBuilder {
    signals: Vec<Signal>,
    primitives: Vec<Primitive>,
    outputs: Vec<SignalId>,
    input_word: Vec<SignalId>,
    const0: Option<SignalId>,
    const1: Option<SignalId>,
}

impl ModelBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn signal(&mut self, name: String, kind: SignalKind) -> SignalId {
        let id = SignalId(self.signals.len());
        self.signals.push(Signal { id, name, kind });
        id
    }

    pub fn constant(&mut self, value: bool) -> SignalId {
        let slot = if value { self.const1 } else { self.const0 };
        if let Some(id) = slot {
            return id;
        }
        let id = if value {
            self.signal("const1".into(), SignalKind::Const1)
        } else {
            self.signal("const0".into(), SignalKind::Const0)
        };
        if value {
            self.const1 = Some(id);
        } else {
            self.const0 = Some(id);
        }
        id
    }

    pub fn input(&mut self, name: impl Into<String>) -> SignalId {
        let id = self.signal(name.into(), SignalKind::Input);
        self.input_word.push(id);
        id
    }

    fn configs(&mut self, prefix: &str, tag: char, count: usize) -> Vec<SignalId> {
        (0..count)
            .map(|i| self.signal(format!("{prefix}.{tag}{i}"), SignalKind::Config))
            .collect()
    }

    fn push(&mut self, name: &str, kind: PrimitiveKind, inputs: Vec<SignalId>, config_slots: Vec<SignalId>, outputs: Vec<SignalId>) {
        self.primitives.push(Primitive { name: name.to_string(), kind, inputs, config_slots, outputs });
    }

    /// LUT whose truth-table slots are named `<name>.t<m>`; the output is
    /// named `<name>`.
    pub fn lut(&mut self, name: &str, inputs: &[SignalId]) -> SignalId {
        let slots = self.configs(name, 't', 1usize << inputs.len());
        let out = self.signal(name.to_string(), SignalKind::Node);
        self.push(name, PrimitiveKind::Lut { arity: inputs.len() }, inputs.to_vec(), slots, vec![out]);
        out
    }

    pub fn cmux(&mut self, name: &str, pool: &[SignalId]) -> SignalId {
        let slots = self.configs(name, 's', ceil_log2(pool.len() as u64) as usize);
        let out = self.signal(name.to_string(), SignalKind::Node);
        self.push(name, PrimitiveKind::Cmux, pool.to_vec(), slots, vec![out]);
        out
    }

    pub fn choose(&mut self, name: &str, pool: &[SignalId], k: usize) -> Vec<SignalId> {
        let bits = ceil_log2(binomial(pool.len() as u64, k as u64)) as usize;
        let slots = self.configs(name, 's', bits);
        let outs: Vec<_> = (0..k).map(|j| self.signal(format!("{name}.o{j}"), SignalKind::Node)).collect();
        self.push(name, PrimitiveKind::Choose { k }, pool.to_vec(), slots, outs.clone());
        outs
    }

    /// Builds `k` LUT-input signals fed from `pool` with the given encoding.
    pub fn selection(&mut self, name: &str, encoding: Encoding, pool: &[SignalId], k: usize) -> Result<Vec<SignalId>, ModelError> {
        if pool.is_empty() || k == 0 || (encoding != Encoding::NaiveCmux && k > pool.len()) {
            return Err(ModelError::SelectionSize { n: pool.len(), k });
        }
        Ok(match encoding {
            Encoding::NaiveCmux => (0..k).map(|j| self.cmux(&format!("{name}.m{j}"), pool)).collect(),
            Encoding::ShrinkingCmux => (0..k)
                .map(|j| self.cmux(&format!("{name}.m{j}"), &pool[..pool.len() - j]))
                .collect(),
            Encoding::Choose => self.choose(name, pool, k),
        })
    }

    pub fn muxcy(&mut self, name: &str, select: SignalId, carry_in: SignalId, data_in: SignalId) -> SignalId {
        let out = self.signal(name.to_string(), SignalKind::Node);
        self.push(name, PrimitiveKind::Muxcy, vec![select, carry_in, data_in], vec![], vec![out]);
        out
    }

    pub fn xorcy(&mut self, name: &str, propagate: SignalId, carry_in: SignalId) -> SignalId {
        let out = self.signal(name.to_string(), SignalKind::Node);
        self.push(name, PrimitiveKind::Xorcy, vec![propagate, carry_in], vec![], vec![out]);
        out
    }

    pub fn output(&mut self, signal: SignalId) {
        self.outputs.push(signal);
    }

    pub fn finish(self) -> Result<CircuitModel, ModelError> {
        let model = CircuitModel {
            signals: self.signals,
            primitives: self.primitives,
            outputs: self.outputs,
            input_word: self.input_word,
        };
        model.validate()?;
        Ok(model)
    }
}

/// Parameters of the carry-chain adder family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CarryChainAdder {
    pub width: usize,
    pub encoding: Encoding,
    pub lut_arity: usize,
    pub carry_out: bool,
}

impl CarryChainAdder {
    pub const DEFAULT_LUT_ARITY: usize = 6;

    pub fn new(width: usize, encoding: Encoding) -> Self {
        CarryChainAdder { width, encoding, lut_arity: Self::DEFAULT_LUT_ARITY, carry_out: true }
    }

    pub fn pool_size(&self) -> usize {
        2 * self.width + 2
    }

    pub fn target(&self) -> TargetFunction {
        TargetFunction::Adder { width: self.width, carry_out: self.carry_out }
    }

    /// Builds the model: per bit one LUT fed through the selection encoding
    /// from the pool `[const0, const1, a.., b..]`, one MUXCY
    /// `c[i+1] = lut ? c[i] : di` with `di` from a 1-of-n CMUX, and one
    /// XORCY `y[i] = lut ^ c[i]`. The initial carry comes from a CMUX over
    /// the two constants.
    pub fn build(&self) -> Result<CircuitModel, ModelError> {
        if self.width == 0 {
            return Err(ModelError::Width);
        }
        let n = self.pool_size();
        let max = if self.encoding == Encoding::NaiveCmux { 16 } else { n.min(16) };
        if self.lut_arity < 2 || self.lut_arity > max {
            return Err(ModelError::LutArity { arity: self.lut_arity, max });
        }

        let mut b = ModelBuilder::new();
        let zero = b.constant(false);
        let one = b.constant(true);
        let a: Vec<_> = (0..self.width).map(|i| b.input(format!("a{i}"))).collect();
        let bw: Vec<_> = (0..self.width).map(|i| b.input(format!("b{i}"))).collect();
        let mut pool = vec![zero, one];
        pool.extend(&a);
        pool.extend(&bw);

        let mut carry = b.cmux("cin", &[zero, one]);
        let mut sums = Vec::with_capacity(self.width);
        for i in 0..self.width {
            let lut_inputs = b.selection(&format!("bit{i}.sel"), self.encoding, &pool, self.lut_arity)?;
            let lut = b.lut(&format!("bit{i}.lut"), &lut_inputs);
            let di = b.cmux(&format!("bit{i}.di"), &pool);
            let sum = b.xorcy(&format!("y{i}"), lut, carry);
            carry = b.muxcy(&format!("c{}", i + 1), lut, carry, di);
            sums.push(sum);
        }
        for s in sums {
            b.output(s);
        }
        if self.carry_out {
            b.output(carry);
        }
        b.finish()
    }
}

/// Convenience wrapper over [`CarryChainAdder`] with carry-out enabled.
pub fn build_carry_chain_adder_model(width: usize, encoding: Encoding, lut_arity: usize) -> Result<CircuitModel, ModelError> {
    CarryChainAdder { width, encoding, lut_arity, carry_out: true }.build()
}

/// The function the circuit is asked to implement. Input and output words
/// are little-endian: input index `Σ x[i]·2^i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "type")]
pub enum TargetFunction {
    /// Inputs `a[0..w], b[0..w]`; outputs `s[0..w]` and optionally the carry.
    Adder { width: usize, carry_out: bool },
    /// `rows[i]` holds the m output bits for input index `i`, bit j = y[j].
    TruthTable { inputs: usize, outputs: usize, rows: Vec<u64> },
}

impl TargetFunction {
    pub fn input_count(&self) -> usize {
        match *self {
            TargetFunction::Adder { width, .. } => 2 * width,
            TargetFunction::TruthTable { inputs, .. } => inputs,
        }
    }

    pub fn output_count(&self) -> usize {
        match *self {
            TargetFunction::Adder { width, carry_out } => width + usize::from(carry_out),
            TargetFunction::TruthTable { outputs, .. } => outputs,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        match self {
            TargetFunction::Adder { width, .. } => {
                if *width == 0 || *width > 31 {
                    return Err(ModelError::Target(format!("adder width {width} out of range")));
                }
            }
            TargetFunction::TruthTable { inputs, outputs, rows } => {
                if *inputs > 24 || *outputs == 0 || *outputs > 64 {
                    return Err(ModelError::Target(format!("unsupported table shape {inputs}x{outputs}")));
                }
                if rows.len() != 1usize << inputs {
                    return Err(ModelError::Target(format!(
                        "table has {} rows, expected {}",
                        rows.len(),
                        1usize << inputs
                    )));
                }
                let mask = if *outputs == 64 { u64::MAX } else { (1u64 << outputs) - 1 };
                if rows.iter().any(|r| r & !mask != 0) {
                    return Err(ModelError::Target("row value wider than the output word".into()));
                }
            }
        }
        Ok(())
    }

    /// Output word for the packed input word `x`.
    pub fn eval_word(&self, x: u64) -> u64 {
        match *self {
            TargetFunction::Adder { width, carry_out } => {
                let mask = (1u64 << width) - 1;
                let sum = (x & mask) + ((x >> width) & mask);
                if carry_out {
                    sum
                } else {
                    sum & mask
                }
            }
            TargetFunction::TruthTable { ref rows, .. } => rows[x as usize],
        }
    }

    pub fn eval(&self, inputs: &[bool]) -> Vec<bool> {
        let word = pack_bits(inputs);
        unpack_bits(self.eval_word(word), self.output_count())
    }
}

pub fn pack_bits(bits: &[bool]) -> u64 {
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
}

pub fn unpack_bits(word: u64, len: usize) -> Vec<bool> {
    (0..len).map(|i| (word >> i) & 1 == 1).collect()
}

/// A model together with the function it should implement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelFile {
    pub model: CircuitModel,
    pub target: TargetFunction,
}

impl ModelFile {
    /// Checks the model invariants and that the target fits the model's
    /// input and output words.
    pub fn validate(&self) -> Result<(), ModelError> {
        self.model.validate()?;
        self.target.validate()?;
        if self.target.input_count() != self.model.input_count() || self.target.output_count() != self.model.output_count() {
            return Err(ModelError::Target(format!(
                "target has {} inputs / {} outputs, model has {} / {}",
                self.target.input_count(),
                self.target.output_count(),
                self.model.input_count(),
                self.model.output_count()
            )));
        }
        Ok(())
    }
}

/// Assignment of the CONFIG signals of a model.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Configuration {
    pub bits: BTreeMap<SignalId, bool>,
}

impl Configuration {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn set(&mut self, id: SignalId, value: bool) {
        self.bits.insert(id, value);
    }

    pub fn get(&self, id: SignalId) -> Option<bool> {
        self.bits.get(&id).copied()
    }

    /// Reads the little-endian selector code stored in `slots`.
    pub fn code(&self, slots: &[SignalId]) -> Option<u64> {
        slots.iter().enumerate().try_fold(0u64, |acc, (i, &s)| Some(acc | (u64::from(self.get(s)?) << i)))
    }

    /// Config signals of `model` this configuration leaves unassigned.
    pub fn missing<'m>(&self, model: &'m CircuitModel) -> Vec<&'m Signal> {
        model.signals_of_kind(SignalKind::Config).filter(|s| !self.bits.contains_key(&s.id)).collect()
    }

    pub fn is_total_for(&self, model: &CircuitModel) -> bool {
        self.missing(model).is_empty()
    }
}
