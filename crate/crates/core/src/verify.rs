//! Direct evaluation of a configured circuit, independent of the CNF path,
//! and exhaustive comparison against a target function.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::combinatorics::unrank_combination;
use crate::model::{pack_bits, unpack_bits, CircuitModel, Configuration, ModelError, PrimitiveKind, SignalId, SignalKind, TargetFunction};

/// Input counts up to this bound are verified exhaustively.
pub const EXHAUSTIVE_LIMIT: usize = 16;
/// Random samples drawn above [`EXHAUSTIVE_LIMIT`].
pub const SAMPLE_COUNT: u64 = 1 << 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("config signal `{0}` is unassigned")]
    Unassigned(String),
    #[error("selector `{primitive}` holds code {code}, but only {limit} codes are valid")]
    CodeOutOfRange { primitive: String, code: u64, limit: u64 },
    #[error("expected {expected} input bits, got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("model and target disagree on arity: {0}")]
    TargetArity(String),
}

/// Decoded setting of one configurable primitive.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Setting {
    Lut { truth_table: u64 },
    /// Selector code and the pool positions it forwards, per output.
    Select { code: u64, sources: Vec<usize> },
    Fixed,
}

enum Step {
    Lut { inputs: Vec<usize>, table: Vec<bool>, out: usize },
    Route { from: Vec<usize>, to: Vec<usize> },
    Muxcy { sel: usize, ci: usize, di: usize, out: usize },
    Xorcy { a: usize, b: usize, out: usize },
}

/// A model with a fixed configuration, ready to be evaluated repeatedly.
pub struct Simulator<'m> {
    model: &'m CircuitModel,
    steps: Vec<Step>,
    settings: Vec<(String, Setting)>,
}

impl<'m> Simulator<'m> {
    pub fn new(model: &'m CircuitModel, config: &Configuration) -> Result<Self, SimError> {
        let order = model.validate()?;
        let idx = |s: &[SignalId]| s.iter().map(|x| x.0).collect::<Vec<_>>();
        let read = |s: SignalId| {
            config.get(s).ok_or_else(|| SimError::Unassigned(model.signal(s).name.clone()))
        };
        let mut steps = Vec::with_capacity(order.len());
        let mut settings = Vec::new();
        for p_idx in order {
            let p = &model.primitives[p_idx];
            let code = || -> Result<u64, SimError> {
                p.config_slots.iter().enumerate().try_fold(0u64, |acc, (i, &s)| Ok(acc | (u64::from(read(s)?) << i)))
            };
            match p.kind {
                PrimitiveKind::Lut { .. } => {
                    let table = p.config_slots.iter().map(|&s| read(s)).collect::<Result<Vec<_>, _>>()?;
                    let word = if table.len() <= 64 { pack_bits(&table) } else { 0 };
                    settings.push((p.name.clone(), Setting::Lut { truth_table: word }));
                    steps.push(Step::Lut { inputs: idx(&p.inputs), table, out: p.outputs[0].0 });
                }
                PrimitiveKind::Cmux => {
                    let code = code()?;
                    let limit = p.inputs.len() as u64;
                    if code >= limit {
                        return Err(SimError::CodeOutOfRange { primitive: p.name.clone(), code, limit });
                    }
                    settings.push((p.name.clone(), Setting::Select { code, sources: vec![code as usize] }));
                    steps.push(Step::Route { from: vec![p.inputs[code as usize].0], to: vec![p.outputs[0].0] });
                }
                PrimitiveKind::Choose { k } => {
                    let code = code()?;
                    let n = p.inputs.len();
                    let combo = unrank_combination(n, k, code).ok_or_else(|| SimError::CodeOutOfRange {
                        primitive: p.name.clone(),
                        code,
                        limit: crate::combinatorics::binomial(n as u64, k as u64),
                    })?;
                    steps.push(Step::Route {
                        from: combo.iter().map(|&i| p.inputs[i].0).collect(),
                        to: idx(&p.outputs),
                    });
                    settings.push((p.name.clone(), Setting::Select { code, sources: combo }));
                }
                PrimitiveKind::Muxcy => {
                    settings.push((p.name.clone(), Setting::Fixed));
                    steps.push(Step::Muxcy { sel: p.inputs[0].0, ci: p.inputs[1].0, di: p.inputs[2].0, out: p.outputs[0].0 });
                }
                PrimitiveKind::Xorcy => {
                    settings.push((p.name.clone(), Setting::Fixed));
                    steps.push(Step::Xorcy { a: p.inputs[0].0, b: p.inputs[1].0, out: p.outputs[0].0 });
                }
            }
        }
        Ok(Simulator { model, steps, settings })
    }

    /// Per-primitive settings in evaluation order.
    pub fn settings(&self) -> &[(String, Setting)] {
        &self.settings
    }

    /// Values of every signal for the given input word.
    pub fn signal_values(&self, inputs: &[bool]) -> Result<Vec<bool>, SimError> {
        let model = self.model;
        if inputs.len() != model.input_count() {
            return Err(SimError::InputArity { expected: model.input_count(), got: inputs.len() });
        }
        let mut values = vec![false; model.signals.len()];
        for s in &model.signals {
            if s.kind == SignalKind::Const1 {
                values[s.id.0] = true;
            }
        }
        for (&x, &v) in model.input_word.iter().zip(inputs) {
            values[x.0] = v;
        }
        for step in &self.steps {
            match step {
                Step::Lut { inputs, table, out } => {
                    let m = inputs.iter().enumerate().fold(0usize, |acc, (i, &s)| acc | (usize::from(values[s]) << i));
                    values[*out] = table[m];
                }
                Step::Route { from, to } => {
                    for (&f, &t) in from.iter().zip(to) {
                        values[t] = values[f];
                    }
                }
                Step::Muxcy { sel, ci, di, out } => {
                    values[*out] = if values[*sel] { values[*ci] } else { values[*di] };
                }
                Step::Xorcy { a, b, out } => values[*out] = values[*a] ^ values[*b],
            }
        }
        Ok(values)
    }

    pub fn eval(&self, inputs: &[bool]) -> Result<Vec<bool>, SimError> {
        let values = self.signal_values(inputs)?;
        Ok(self.model.outputs.iter().map(|y| values[y.0]).collect())
    }
}

/// Evaluates the configured circuit on one input word.
pub fn simulate(model: &CircuitModel, config: &Configuration, inputs: &[bool]) -> Result<Vec<bool>, SimError> {
    Simulator::new(model, config)?.eval(inputs)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub inputs: Vec<bool>,
    pub got: Vec<bool>,
    pub want: Vec<bool>,
}

fn word_string(bits: &[bool]) -> String {
    // most significant bit first
    bits.iter().rev().map(|&b| if b { '1' } else { '0' }).collect()
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "inputs {} (msb first): circuit gives {}, target wants {}",
            word_string(&self.inputs),
            word_string(&self.got),
            word_string(&self.want)
        )
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    /// `exhaustive` is false when only a random sample was checked.
    Ok { checked: u64, exhaustive: bool },
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_ok(&self) -> bool {
        matches!(self, Verdict::Ok { .. })
    }
}

/// Compares the configured circuit against `f` on every input word (or on a
/// fixed-seed random sample above [`EXHAUSTIVE_LIMIT`] inputs).
pub fn verify_implements(model: &CircuitModel, config: &Configuration, f: &TargetFunction) -> Result<Verdict, SimError> {
    f.validate()?;
    let l = model.input_count();
    if l != f.input_count() || model.output_count() != f.output_count() {
        return Err(SimError::TargetArity(format!(
            "model {}->{}, target {}->{}",
            l,
            model.output_count(),
            f.input_count(),
            f.output_count()
        )));
    }
    let sim = Simulator::new(model, config)?;
    let check = |word: u64| -> Result<Option<Counterexample>, SimError> {
        let inputs = unpack_bits(word, l);
        let got = sim.eval(&inputs)?;
        let want = unpack_bits(f.eval_word(word), f.output_count());
        Ok((got != want).then_some(Counterexample { inputs, got, want }))
    };
    if l <= EXHAUSTIVE_LIMIT {
        for word in 0..1u64 << l {
            if let Some(cx) = check(word)? {
                return Ok(Verdict::Counterexample(cx));
            }
        }
        return Ok(Verdict::Ok { checked: 1 << l, exhaustive: true });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mask = if l >= 64 { u64::MAX } else { (1u64 << l) - 1 };
    for _ in 0..SAMPLE_COUNT {
        if let Some(cx) = check(rng.gen::<u64>() & mask)? {
            return Ok(Verdict::Counterexample(cx));
        }
    }
    Ok(Verdict::Ok { checked: SAMPLE_COUNT, exhaustive: false })
}

/// A configuration that makes the carry-chain adder model add: every LUT
/// computes `a[i] ^ b[i]`, every DI mux forwards `a[i]`, the initial carry
/// is 0. Only meaningful for models built by
/// [`CarryChainAdder::build`](crate::model::CarryChainAdder::build).
pub fn reference_adder_configuration(model: &CircuitModel) -> Option<Configuration> {
    let width = model.input_count() / 2;
    let pool_pos = |name: &str| model.input_word.iter().position(|&s| model.signal(s).name == name).map(|p| p + 2);
    let mut config = Configuration::new();
    for s in model.signals_of_kind(SignalKind::Config) {
        config.set(s.id, false);
    }
    let set_code = |config: &mut Configuration, slots: &[SignalId], code: u64| {
        for (i, &s) in slots.iter().enumerate() {
            config.set(s, (code >> i) & 1 == 1);
        }
    };
    for i in 0..width {
        let (a, b) = (pool_pos(&format!("a{i}"))?, pool_pos(&format!("b{i}"))?);
        let prefix = format!("bit{i}.");
        let lut = model.primitives.iter().find(|p| p.name == format!("bit{i}.lut"))?;
        let selectors: Vec<_> = model.primitives.iter().filter(|p| p.name.starts_with(&format!("{prefix}sel"))).collect();
        // LUT input positions that carry a and b
        let (lut_a, lut_b) = match selectors.as_slice() {
            [single] if matches!(single.kind, PrimitiveKind::Choose { .. }) => {
                let k = single.outputs.len();
                let n = single.inputs.len();
                let mut combo: Vec<usize> = vec![a, b];
                for extra in 0..n {
                    if combo.len() == k {
                        break;
                    }
                    if !combo.contains(&extra) {
                        combo.push(extra);
                    }
                }
                combo.sort_unstable();
                let code = crate::combinatorics::rank_combination(n, &combo);
                set_code(&mut config, &single.config_slots, code);
                (combo.iter().position(|&x| x == a), combo.iter().position(|&x| x == b))
            }
            muxes => {
                // mux 0 sees the full pool, mux 1 at least all but the last entry
                let (first, second) = (muxes.first()?, muxes.get(1)?);
                let (hi, lo) = if b > a { (b, a) } else { (a, b) };
                set_code(&mut config, &first.config_slots, hi as u64);
                set_code(&mut config, &second.config_slots, lo as u64);
                if hi == a {
                    (Some(0), Some(1))
                } else {
                    (Some(1), Some(0))
                }
            }
        };
        let (pa, pb) = (lut_a?, lut_b?);
        for (m, &t) in lut.config_slots.iter().enumerate() {
            config.set(t, ((m >> pa) & 1) ^ ((m >> pb) & 1) == 1);
        }
        let di = model.primitives.iter().find(|p| p.name == format!("bit{i}.di"))?;
        set_code(&mut config, &di.config_slots, a as u64);
    }
    Some(config)
}
