//! Clause encodings that tie selector configuration bits to the pool signal
//! each selector output forwards.
//!
//! Selector codes are little-endian over the config bits. Codes that select
//! nothing are forbidden by a blocking clause, so every model of the formula
//! decodes to exactly one selection.

use crate::cnf::{mismatch, ClauseSet, CnfError, Var};
use crate::combinatorics::{binomial, ceil_log2, Combinations};

fn check_bits(what: &str, got: usize, want: u32) -> Result<(), CnfError> {
    if got != want as usize {
        return Err(CnfError::Arity(format!("{what} needs {want} config bits, got {got}")));
    }
    Ok(())
}

fn block_codes(bits: &[Var], from: u64, out: &mut ClauseSet) -> Result<(), CnfError> {
    for code in from..1u64 << bits.len() {
        out.add_clause(mismatch(bits, code))?;
    }
    Ok(())
}

/// One n:1 configurable mux: `(bits = v) → (output ↔ pool[v])`.
pub fn encode_cmux(pool: &[Var], output: Var, bits: &[Var], out: &mut ClauseSet) -> Result<(), CnfError> {
    if pool.is_empty() {
        return Err(CnfError::Arity("CMUX over an empty pool".into()));
    }
    check_bits("CMUX", bits.len(), ceil_log2(pool.len() as u64))?;
    for (v, &src) in pool.iter().enumerate() {
        out.add_clause(mismatch(bits, v as u64).chain([output.neg(), src.pos()]))?;
        out.add_clause(mismatch(bits, v as u64).chain([output.pos(), src.neg()]))?;
    }
    block_codes(bits, pool.len() as u64, out)
}

/// k independent muxes over the whole pool; `bits` holds the k codes back to
/// back, each `⌈log₂ n⌉` wide.
pub fn encode_naive_cmux(pool: &[Var], outputs: &[Var], bits: &[Var], out: &mut ClauseSet) -> Result<(), CnfError> {
    let width = ceil_log2(pool.len() as u64) as usize;
    check_bits("naive CMUX selection", bits.len(), (width * outputs.len()) as u32)?;
    for (j, &y) in outputs.iter().enumerate() {
        encode_cmux(pool, y, &bits[j * width..(j + 1) * width], out)?;
    }
    Ok(())
}

/// Mux j chooses among `pool[..n - j]`, so each successor sees one signal
/// fewer than its predecessor.
pub fn encode_shrinking_cmux(pool: &[Var], outputs: &[Var], bits: &[Var], out: &mut ClauseSet) -> Result<(), CnfError> {
    let n = pool.len();
    if outputs.len() > n {
        return Err(CnfError::Arity(format!("cannot select {} of {n} signals", outputs.len())));
    }
    let widths: Vec<usize> = (0..outputs.len()).map(|j| ceil_log2((n - j) as u64) as usize).collect();
    check_bits("shrinking CMUX selection", bits.len(), widths.iter().sum::<usize>() as u32)?;
    let mut offset = 0;
    for (j, (&y, &w)) in outputs.iter().zip(&widths).enumerate() {
        encode_cmux(&pool[..n - j], y, &bits[offset..offset + w], out)?;
        offset += w;
    }
    Ok(())
}

/// Forward one k-subset of the pool in ascending order. Combination number
/// v (lexicographic over ascending index tuples) routes
/// `outputs[j] ↔ pool[i_j]`.
pub fn encode_choose(pool: &[Var], outputs: &[Var], bits: &[Var], out: &mut ClauseSet) -> Result<(), CnfError> {
    let (n, k) = (pool.len(), outputs.len());
    if k == 0 || k > n {
        return Err(CnfError::Arity(format!("cannot choose {k} of {n} signals")));
    }
    let combos = binomial(n as u64, k as u64);
    check_bits("CHOOSE", bits.len(), ceil_log2(combos))?;
    for (code, combo) in Combinations::new(n, k).enumerate() {
        for (&y, &i) in outputs.iter().zip(&combo) {
            out.add_clause(mismatch(bits, code as u64).chain([y.neg(), pool[i].pos()]))?;
            out.add_clause(mismatch(bits, code as u64).chain([y.pos(), pool[i].neg()]))?;
        }
    }
    block_codes(bits, combos, out)
}
