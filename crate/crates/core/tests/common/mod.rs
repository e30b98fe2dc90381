//! Reference procedures shared by the integration tests: a brute-force QBF
//! decision procedure, direct gate semantics, and random problem builders.
//! Nothing here calls the solver or simulator under test.

#![allow(dead_code)]

use std::collections::BTreeMap;

use lutmap_core::cnf::{Prefix, Symbol};
use lutmap_core::model::SignalKind;
use lutmap_core::{assemble, ClauseSet, Encoding, Lit, ModelBuilder, QbfProblem, TargetFunction, Var};
use rand::Rng;

const UNSET: u8 = 2;

fn lit_value(assign: &[u8], l: Lit) -> u8 {
    match assign[l.var().index()] {
        UNSET => UNSET,
        v => v ^ u8::from(l.is_negated()),
    }
}

/// Plain backtracking over `free`; prunes as soon as a clause is falsified.
fn backtrack(clauses: &[Vec<Lit>], assign: &mut [u8], free: &[Var]) -> bool {
    for c in clauses {
        if c.iter().all(|&l| lit_value(assign, l) == 0) {
            return false;
        }
    }
    let Some((&v, rest)) = free.split_first() else {
        return true;
    };
    for value in [0u8, 1] {
        assign[v.index()] = value;
        if backtrack(clauses, assign, rest) {
            assign[v.index()] = UNSET;
            return true;
        }
    }
    assign[v.index()] = UNSET;
    false
}

/// `∃n. F` with the config block fixed to `config[i]` for `prefix.config[i]`
/// and the input block to the little-endian word `x`.
pub fn inner_satisfiable(p: &QbfProblem, config: &[bool], x: u64) -> bool {
    let mut assign = vec![UNSET; p.var_count() as usize + 1];
    for (v, &b) in p.prefix.config.iter().zip(config) {
        assign[v.index()] = u8::from(b);
    }
    for (i, v) in p.prefix.inputs.iter().enumerate() {
        assign[v.index()] = ((x >> i) & 1) as u8;
    }
    let mut reduced: Vec<Vec<Lit>> = Vec::with_capacity(p.matrix.len());
    for clause in p.matrix.iter() {
        if clause.iter().any(|&l| lit_value(&assign, l) == 1) {
            continue;
        }
        let open: Vec<Lit> = clause.iter().copied().filter(|&l| lit_value(&assign, l) == UNSET).collect();
        if open.is_empty() {
            return false;
        }
        reduced.push(open);
    }
    backtrack(&reduced, &mut assign, &p.prefix.nodes)
}

/// `∀x ∃n. F` with the config block fixed to `config[i]` for `prefix.config[i]`.
pub fn holds_for_all_inputs(p: &QbfProblem, config: &[bool]) -> bool {
    (0..1u64 << p.prefix.inputs.len()).all(|x| inner_satisfiable(p, config, x))
}

/// Decides `∃c ∀x ∃n. F` by enumerating c and x and searching n. Returns the
/// first witness in counting order over the config block.
pub fn brute_force_witness(p: &QbfProblem) -> Option<Vec<bool>> {
    let c_len = p.prefix.config.len();
    assert!(c_len <= 20 && p.prefix.inputs.len() <= 12, "too large for brute force");
    (0..1u64 << c_len)
        .map(|c| (0..c_len).map(|i| (c >> i) & 1 == 1).collect::<Vec<_>>())
        .find(|config| holds_for_all_inputs(p, config))
}

pub fn brute_force_qbf(p: &QbfProblem) -> bool {
    brute_force_witness(p).is_some()
}

/// All k-subsets of `0..n` in lexicographic order.
pub fn lex_combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    fn go(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            go(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(0, n, k, &mut Vec::new(), &mut out);
    out
}

pub fn little_endian(bits: &[bool]) -> u64 {
    bits.iter().enumerate().fold(0, |acc, (i, &b)| acc | (u64::from(b) << i))
}

/// Checks that `cnf` over exactly `ins ∪ outs` is satisfied by an assignment
/// iff `semantics(ins)` is `Some(outs)`. `None` means the input assignment
/// (e.g. an unused selector code) must admit no output at all.
pub fn check_encoding(
    cnf: &ClauseSet,
    ins: &[Var],
    outs: &[Var],
    semantics: impl Fn(&[bool]) -> Option<Vec<bool>>,
) -> Result<(), String> {
    let total = ins.len() + outs.len();
    if cnf.var_count() as usize != total {
        return Err(format!("encoding uses {} variables, expected {total}", cnf.var_count()));
    }
    let mut assignment = vec![false; total + 1];
    for i in 0..1u64 << ins.len() {
        let in_bits: Vec<bool> = (0..ins.len()).map(|b| (i >> b) & 1 == 1).collect();
        for (v, &b) in ins.iter().zip(&in_bits) {
            assignment[v.index()] = b;
        }
        let want = semantics(&in_bits);
        for o in 0..1u64 << outs.len() {
            let out_bits: Vec<bool> = (0..outs.len()).map(|b| (o >> b) & 1 == 1).collect();
            for (v, &b) in outs.iter().zip(&out_bits) {
                assignment[v.index()] = b;
            }
            let sat = cnf.is_satisfied_by(&assignment);
            let expected = want.as_deref() == Some(out_bits.as_slice());
            if sat != expected {
                return Err(format!("inputs {in_bits:?} outputs {out_bits:?}: cnf says {sat}, semantics say {expected}"));
            }
        }
    }
    Ok(())
}

/// Random raw EAE problem over `c + x + n` variables numbered in block order.
pub fn random_raw_problem(rng: &mut impl Rng, c: usize, x: usize, n: usize, clauses: usize) -> QbfProblem {
    let total = (c + x + n) as u32;
    let mut matrix = ClauseSet::with_vars(total);
    while matrix.len() < clauses {
        let width = rng.gen_range(1..=4usize.min(total as usize));
        let lits: Vec<Lit> = (0..width).map(|_| Var(rng.gen_range(1..=total)).lit(rng.gen())).collect();
        let _ = matrix.add_clause(lits);
    }
    let vars = |from: usize, len: usize| (from..from + len).map(|i| Var(i as u32 + 1)).collect::<Vec<_>>();
    QbfProblem {
        prefix: Prefix { config: vars(0, c), inputs: vars(c, x), nodes: vars(c + x, n) },
        matrix,
        symbols: BTreeMap::<Var, Symbol>::new(),
    }
}

/// One LUT of `arity` inputs fed from `inputs` circuit inputs through a
/// selection encoding, asked to implement `target`.
pub fn lut_problem(inputs: usize, arity: usize, encoding: Encoding, target: TargetFunction) -> QbfProblem {
    let mut b = ModelBuilder::new();
    let pool: Vec<_> = (0..inputs).map(|i| b.input(format!("x{i}"))).collect();
    let sel = b.selection("sel", encoding, &pool, arity).expect("valid selection");
    let y = b.lut("lut", &sel);
    b.output(y);
    let model = b.finish().expect("valid model");
    assert_eq!(model.signals_of_kind(SignalKind::Config).count(), model.config_count());
    assemble(&model, &target).expect("assembles")
}

pub fn majority3() -> TargetFunction {
    let rows = (0..8u64).map(|x| u64::from(x.count_ones() >= 2)).collect();
    TargetFunction::TruthTable { inputs: 3, outputs: 1, rows }
}

/// Truth table of a fixed LUT reading inputs `picks` of an `inputs`-wide word.
pub fn lut_target(inputs: usize, picks: &[usize], table: u64) -> TargetFunction {
    let rows = (0..1u64 << inputs)
        .map(|x| {
            let idx = picks.iter().enumerate().fold(0, |acc, (j, &p)| acc | (((x >> p) & 1) << j));
            (table >> idx) & 1
        })
        .collect();
    TargetFunction::TruthTable { inputs, outputs: 1, rows }
}

pub fn random_truth_table(rng: &mut impl Rng, inputs: usize) -> TargetFunction {
    let rows = (0..1u64 << inputs).map(|_| u64::from(rng.gen::<bool>())).collect();
    TargetFunction::TruthTable { inputs, outputs: 1, rows }
}

/// Fifty small problems with known structure: forced-UNSAT majority cases,
/// forced-SAT fixed-LUT cases, random LUT mapping problems and random raw
/// formulas. Deterministic in `seed`.
pub fn oracle_suite(seed: u64) -> Vec<(String, QbfProblem)> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for e in Encoding::ALL {
        out.push((format!("lut2-vs-majority3/{e}"), lut_problem(3, 2, e, majority3())));
        let table = rng.gen_range(0..16u64);
        out.push((format!("fixed-lut2-{table}/{e}"), lut_problem(3, 2, e, lut_target(3, &[0, 2], table))));
    }
    for i in 0..14 {
        let e = Encoding::ALL[i % 3];
        let inputs = rng.gen_range(2..=3);
        out.push((format!("random-lut/{i}/{e}"), lut_problem(inputs, 2, e, random_truth_table(&mut rng, inputs))));
    }
    for i in 0..30 {
        let (c, x, n) = (rng.gen_range(0..=12), rng.gen_range(0..=4), rng.gen_range(0..=12));
        let n = if c + x == 0 { n.max(1) } else { n };
        let clauses = rng.gen_range(1..=3 * (c + x + n).max(1));
        out.push((format!("raw/{i}/c{c}x{x}n{n}"), random_raw_problem(&mut rng, c, x, n, clauses)));
    }
    out
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - (n.max(1) - 1).leading_zeros()) as usize
}

/// `len` consecutive variables starting at `first`.
pub fn var_range(first: u32, len: usize) -> Vec<Var> {
    (0..len as u32).map(|i| Var(first + i)).collect()
}

/// LUT of arity k: inputs, then the 2^k table bits, then the output.
pub fn check_lut(k: usize) -> Result<(), String> {
    use lutmap_core::cnf::{encode_primitive, VarMap};
    use lutmap_core::model::{Primitive, PrimitiveKind};
    use lutmap_core::SignalId;
    let t = 1usize << k;
    let prim = Primitive {
        name: "lut".into(),
        kind: PrimitiveKind::Lut { arity: k },
        inputs: (0..k).map(SignalId).collect(),
        config_slots: (k..k + t).map(SignalId).collect(),
        outputs: vec![SignalId(k + t)],
    };
    let mut vars = VarMap::new(k + t + 1);
    for i in 0..=k + t {
        vars.insert(SignalId(i), Var(i as u32 + 1));
    }
    let mut cnf = ClauseSet::with_vars((k + t + 1) as u32);
    encode_primitive(&prim, &vars, &mut cnf).map_err(|e| e.to_string())?;
    let ins = var_range(1, k + t);
    check_encoding(&cnf, &ins, &[Var((k + t + 1) as u32)], |b| {
        let idx = little_endian(&b[..k]) as usize;
        Some(vec![b[k + idx]])
    })
}

/// Muxes `j = 0..k` over `pool[..sizes[j]]` with codes back to back.
fn mux_semantics(n: usize, sizes: &[usize], b: &[bool]) -> Option<Vec<bool>> {
    let (pool, mut bits) = b.split_at(n);
    let mut out = Vec::new();
    for &m in sizes {
        let (code, rest) = bits.split_at(ceil_log2(m));
        bits = rest;
        let code = little_endian(code) as usize;
        if code >= m {
            return None;
        }
        out.push(pool[code]);
    }
    Some(out)
}

/// One selector over a pool of `n`: `shape` is `cmux`, `naive`,
/// `shrinking` or `choose`, producing `k` outputs (1 for `cmux`).
pub fn check_selector(shape: &str, n: usize, k: usize) -> Result<(), String> {
    use lutmap_core::select::{encode_choose, encode_cmux, encode_naive_cmux, encode_shrinking_cmux};
    let sizes: Vec<usize> = match shape {
        "cmux" => vec![n],
        "naive" => vec![n; k],
        "shrinking" => (0..k).map(|j| n - j).collect(),
        "choose" => vec![],
        _ => return Err(format!("unknown selector shape {shape}")),
    };
    let combos = lex_combinations(n, k);
    let width = if shape == "choose" { ceil_log2(combos.len()) } else { sizes.iter().map(|&m| ceil_log2(m)).sum() };
    let outputs = if shape == "cmux" { 1 } else { k };
    let pool = var_range(1, n);
    let bits = var_range(n as u32 + 1, width);
    let outs = var_range((n + width) as u32 + 1, outputs);
    let mut cnf = ClauseSet::with_vars((n + width + outputs) as u32);
    let r = match shape {
        "cmux" => encode_cmux(&pool, outs[0], &bits, &mut cnf),
        "naive" => encode_naive_cmux(&pool, &outs, &bits, &mut cnf),
        "shrinking" => encode_shrinking_cmux(&pool, &outs, &bits, &mut cnf),
        _ => encode_choose(&pool, &outs, &bits, &mut cnf),
    };
    r.map_err(|e| e.to_string())?;
    let ins: Vec<Var> = pool.iter().chain(&bits).copied().collect();
    check_encoding(&cnf, &ins, &outs, |b| {
        if shape == "choose" {
            let combo = combos.get(little_endian(&b[n..]) as usize)?;
            Some(combo.iter().map(|&i| b[i]).collect())
        } else {
            mux_semantics(n, &sizes, b)
        }
    })
    .map_err(|e| format!("{shape} n={n} k={k}: {e}"))
}

/// MUXCY `(s, ci, di) → s ? ci : di` and XORCY `(a, b) → a ^ b`.
pub fn check_carry_cells() -> Result<(), String> {
    use lutmap_core::cnf::{encode_primitive, VarMap};
    use lutmap_core::model::{Primitive, PrimitiveKind};
    use lutmap_core::SignalId;
    for (kind, arity) in [(PrimitiveKind::Muxcy, 3), (PrimitiveKind::Xorcy, 2)] {
        let prim = Primitive {
            name: "cell".into(),
            kind,
            inputs: (0..arity).map(SignalId).collect(),
            config_slots: vec![],
            outputs: vec![SignalId(arity)],
        };
        let mut vars = VarMap::new(arity + 1);
        for i in 0..=arity {
            vars.insert(SignalId(i), Var(i as u32 + 1));
        }
        let mut cnf = ClauseSet::with_vars(arity as u32 + 1);
        encode_primitive(&prim, &vars, &mut cnf).map_err(|e| e.to_string())?;
        check_encoding(&cnf, &var_range(1, arity), &[Var(arity as u32 + 1)], |b| {
            Some(vec![if arity == 3 { if b[0] { b[1] } else { b[2] } } else { b[0] ^ b[1] }])
        })
        .map_err(|e| format!("{kind}: {e}"))?;
    }
    Ok(())
}

/// Every primitive and selection encoding against its truth table: LUTs up
/// to 4 inputs, selectors over pools up to 6 choosing up to 4. Returns the
/// number of encodings checked.
pub fn check_all_gate_encodings() -> Result<usize, String> {
    let mut checked = 0;
    for k in 0..=4 {
        check_lut(k).map_err(|e| format!("LUT{k}: {e}"))?;
        checked += 1;
    }
    check_carry_cells()?;
    checked += 2;
    for n in 1..=6 {
        check_selector("cmux", n, 1)?;
        checked += 1;
        for k in 1..=4 {
            check_selector("naive", n, k)?;
            checked += 1;
            if k <= n {
                for shape in ["shrinking", "choose"] {
                    check_selector(shape, n, k)?;
                    checked += 1;
                }
            }
        }
    }
    Ok(checked)
}

/// `parse(write(p)) == p` and `write(parse(write(p))) == write(p)`.
pub fn check_roundtrip(p: &QbfProblem) -> Result<(), String> {
    use lutmap_core::qdimacs::{parse_qdimacs_str, to_qdimacs_string};
    let text = to_qdimacs_string(p);
    let back = parse_qdimacs_str(&text).map_err(|e| e.to_string())?;
    if &back != p {
        return Err("parsed problem differs from the original".into());
    }
    if to_qdimacs_string(&back) != text {
        return Err("rewritten text differs".into());
    }
    Ok(())
}

/// Twenty random problems: ten raw (no symbol table) and ten from circuits.
pub fn roundtrip_suite(seed: u64) -> Vec<QbfProblem> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for _ in 0..10 {
        let (c, x, n) = (rng.gen_range(1..=30), rng.gen_range(0..=8), rng.gen_range(0..=30));
        let clauses = rng.gen_range(0..=100);
        out.push(random_raw_problem(&mut rng, c, x, n, clauses));
    }
    for i in 0..10 {
        let inputs = rng.gen_range(2..=4);
        let target = random_truth_table(&mut rng, inputs);
        out.push(lut_problem(inputs, 2, Encoding::ALL[i % 3], target));
    }
    out
}
