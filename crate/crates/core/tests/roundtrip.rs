//! QDIMACS writing and parsing.

mod common;

use common::{check_roundtrip, random_raw_problem, roundtrip_suite};
use lutmap_core::qdimacs::{parse_qdimacs_str, to_qdimacs_string};
use lutmap_core::testset::{adder_problem, DEFAULT_WIDTHS};
use lutmap_core::{CarryChainAdder, Encoding};
use proptest::prelude::*;
use rand::SeedableRng;

#[test]
fn test_set_problems_round_trip() {
    for width in DEFAULT_WIDTHS {
        for e in Encoding::ALL {
            let p = adder_problem(width, e, CarryChainAdder::DEFAULT_LUT_ARITY).unwrap();
            check_roundtrip(&p).unwrap_or_else(|err| panic!("adder{width}_{e}: {err}"));
        }
    }
}

#[test]
fn random_problems_round_trip() {
    let suite = roundtrip_suite(3);
    assert_eq!(suite.len(), 20);
    for (i, p) in suite.iter().enumerate() {
        check_roundtrip(p).unwrap_or_else(|err| panic!("problem {i}: {err}"));
    }
}

#[test]
fn symbols_survive() {
    let p = adder_problem(1, Encoding::Choose, 2).unwrap();
    let back = parse_qdimacs_str(&to_qdimacs_string(&p)).unwrap();
    assert_eq!(back.symbols, p.symbols);
    assert!(back.symbols.values().any(|s| s.name == "bit0.lut.t3"));
}

/// Without universals and configuration, the lone existential block is
/// read back as the configuration block; the QBF is the same.
#[test]
fn lone_existential_block_reads_as_configuration() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
    let p = random_raw_problem(&mut rng, 0, 0, 3, 4);
    let back = parse_qdimacs_str(&to_qdimacs_string(&p)).unwrap();
    assert_eq!(back.prefix.config, p.prefix.nodes);
    assert!(back.prefix.inputs.is_empty() && back.prefix.nodes.is_empty());
    assert_eq!(back.matrix, p.matrix);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn raw_problems_round_trip(seed in any::<u64>(), c in 0usize..=8, x in 0usize..=8, n in 0usize..=8, k in 0usize..=40) {
        prop_assume!(c + x > 0);
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let p = random_raw_problem(&mut rng, c, x, n, k);
        prop_assert_eq!(check_roundtrip(&p), Ok(()));
    }

    /// Damaged files are rejected or parsed, never a panic.
    #[test]
    fn damaged_files_do_not_panic(cut in 0usize..2000, byte in any::<u8>(), pos in 0usize..2000) {
        let text = to_qdimacs_string(&adder_problem(1, Encoding::ShrinkingCmux, 2).unwrap());
        let mut bytes = text.into_bytes();
        let pos = pos % bytes.len();
        bytes[pos] = byte;
        bytes.truncate(cut.max(pos + 1).min(bytes.len()));
        let damaged = String::from_utf8_lossy(&bytes);
        if let Ok(p) = parse_qdimacs_str(&damaged) {
            prop_assert!(p.validate().is_ok());
        }
    }

    #[test]
    fn arbitrary_text_does_not_panic(text in "(c|p cnf|e|a|[-0-9 ]{0,12}|\n){0,40}") {
        let _ = parse_qdimacs_str(&text);
    }
}
