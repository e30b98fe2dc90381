//! Acceptance criteria 1 to 7, one PASS/FAIL line each. Set
//! `LUTMAP_ACCEPT_WIDTH5=1` to also attempt width 5 (one-hour budget).

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use lutmap_core::solve::{solve_embedded_with, SolveOptions};
use lutmap_core::testset::{adder_problem, DEFAULT_WIDTHS, MANIFEST_NAME};
use lutmap_core::verify::verify_implements;
use lutmap_core::{config_bit_count, solve_embedded, CarryChainAdder, Encoding, SolverAnswer, Verdict};
use sha2::{Digest, Sha256};

type Outcome = Result<String, String>;
type Check = (&'static str, fn() -> Outcome);

const BIN: &str = env!("CARGO_BIN_EXE_lutmap");
const GOLDEN: &str = include_str!("fixtures/testset.sha256");

fn lutmap(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(BIN).args(args).output().map_err(|e| format!("cannot run lutmap: {e}"))?;
    let code = out.status.code().ok_or("lutmap killed by a signal")?;
    Ok((code, String::from_utf8_lossy(&out.stdout).into_owned() + &String::from_utf8_lossy(&out.stderr)))
}

fn expect_exit(args: &[&str], want: i32) -> Result<String, String> {
    let (code, output) = lutmap(args)?;
    if code != want {
        return Err(format!("`lutmap {}` exited {code}, expected {want}: {}", args.join(" "), output.trim()));
    }
    Ok(output)
}

fn within(start: Instant, limit: Duration, what: &str) -> Result<(), String> {
    let took = start.elapsed();
    if took > limit {
        return Err(format!("{what} took {took:.2?}, limit {limit:?}"));
    }
    Ok(())
}

fn sha256_hex(path: &Path) -> Result<String, String> {
    let bytes = std::fs::read(path).map_err(|e| format!("{}: {e}", path.display()))?;
    Ok(Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect())
}

/// Quantifier lines of a QDIMACS text, as `e`/`a` letters.
fn prefix_pattern(text: &str) -> String {
    text.lines()
        .skip_while(|l| !l.starts_with("p "))
        .skip(1)
        .take_while(|l| l.starts_with("e ") || l.starts_with("a "))
        .map(|l| &l[..1])
        .collect()
}

fn criterion1() -> Outcome {
    let runs = [tempfile::tempdir().map_err(|e| e.to_string())?, tempfile::tempdir().map_err(|e| e.to_string())?];
    let mut took = Vec::new();
    for dir in &runs {
        let start = Instant::now();
        expect_exit(&["generate", "--testset", "-o", dir.path().to_str().unwrap()], 0)?;
        within(start, Duration::from_secs(5), "test-set generation")?;
        took.push(format!("{:.2?}", start.elapsed()));
    }
    let files: Vec<_> = std::fs::read_dir(runs[0].path())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok())
        .map(|e| e.file_name().to_string_lossy().into_owned())
        .filter(|n| n.ends_with(".qdimacs"))
        .collect();
    if files.len() != 12 {
        return Err(format!("{} QDIMACS files, expected 12", files.len()));
    }
    let mut golden = 0;
    for line in GOLDEN.lines() {
        let (hash, name) = line.split_once("  ").ok_or("malformed golden line")?;
        for dir in &runs {
            let got = sha256_hex(&dir.path().join(name))?;
            if got != hash {
                return Err(format!("{name} differs from the golden fixture"));
            }
        }
        if name.ends_with(".qdimacs") {
            let text = std::fs::read_to_string(runs[0].path().join(name)).map_err(|e| e.to_string())?;
            if prefix_pattern(&text) != "eae" {
                return Err(format!("{name} prefix is `{}`, expected `eae`", prefix_pattern(&text)));
            }
        }
        golden += 1;
    }
    let manifest = std::fs::read_to_string(runs[0].path().join(MANIFEST_NAME)).map_err(|e| e.to_string())?;
    if manifest != include_str!("fixtures/manifest.tsv") {
        return Err("manifest differs from the fixture".into());
    }
    Ok(format!("12 files + manifest match {golden} golden hashes on two runs ({}), EAE prefixes", took.join(", ")))
}

fn criterion2() -> Outcome {
    let mut report = Vec::new();
    for e in Encoding::ALL {
        let adder = CarryChainAdder::new(4, e);
        let model = adder.build().map_err(|e| e.to_string())?;
        let problem = adder_problem(4, e, adder.lut_arity).map_err(|e| e.to_string())?;
        let start = Instant::now();
        let options = SolveOptions { timeout: Some(Duration::from_secs(600)), ..SolveOptions::default() };
        let run = solve_embedded_with(&problem, &options).map_err(|e| e.to_string())?;
        let SolverAnswer::Sat(cert) = run.answer else {
            return Err(format!("width 4 {e}: {:?}", run.answer));
        };
        let took = start.elapsed();
        let config = cert.to_configuration(&problem).map_err(|e| e.to_string())?;
        match verify_implements(&model, &config, &adder.target()).map_err(|e| e.to_string())? {
            Verdict::Ok { checked: 256, exhaustive: true } => {}
            other => return Err(format!("width 4 {e}: {other:?}")),
        }
        report.push(format!("{e} {took:.1?}"));
    }
    if std::env::var_os("LUTMAP_ACCEPT_WIDTH5").is_some() {
        for e in Encoding::ALL {
            let adder = CarryChainAdder::new(5, e);
            let model = adder.build().map_err(|e| e.to_string())?;
            let problem = adder_problem(5, e, adder.lut_arity).map_err(|e| e.to_string())?;
            let start = Instant::now();
            let options = SolveOptions { timeout: Some(Duration::from_secs(3600)), ..SolveOptions::default() };
            let result = match solve_embedded_with(&problem, &options) {
                Ok(run) => match run.answer {
                    SolverAnswer::Sat(cert) => {
                        let config = cert.to_configuration(&problem).map_err(|e| e.to_string())?;
                        let verdict = verify_implements(&model, &config, &adder.target()).map_err(|e| e.to_string())?;
                        if !verdict.is_ok() {
                            return Err(format!("width 5 {e}: {verdict:?}"));
                        }
                        "SAT, verified"
                    }
                    SolverAnswer::Unsat => return Err(format!("width 5 {e}: UNSAT")),
                    SolverAnswer::Unknown => "timed out",
                },
                Err(_) => "over the expansion budget",
            };
            report.push(format!("width 5 {e} {result} in {:.1?}", start.elapsed()));
        }
    }
    Ok(format!("width 4 SAT and verified on all 256 inputs: {}", report.join(", ")))
}

fn criterion3() -> Outcome {
    let start = Instant::now();
    let mut pairs = 0;
    for n in 1..=16 {
        for k in 1..=n {
            let count = |e| config_bit_count(e, n, k).map_err(|err| err.to_string());
            let (naive, shrinking, choose) =
                (count(Encoding::NaiveCmux)?, count(Encoding::ShrinkingCmux)?, count(Encoding::Choose)?);
            if !(naive >= shrinking && shrinking >= choose) || (k >= 2 && n > k && naive <= choose) {
                return Err(format!("n={n} k={k}: naive {naive}, shrinking {shrinking}, choose {choose}"));
            }
            pairs += 1;
        }
    }
    within(start, Duration::from_secs(1), "chain check")?;
    Ok(format!("{pairs} (n, k) pairs"))
}

fn criterion4() -> Outcome {
    let start = Instant::now();
    let checked = common::check_all_gate_encodings()?;
    within(start, Duration::from_secs(30), "gate oracle")?;
    Ok(format!("{checked} encodings exhaustively in {:.1?}", start.elapsed()))
}

fn criterion5() -> Outcome {
    let start = Instant::now();
    let suite = common::oracle_suite(2024);
    let (mut sat, mut unsat) = (0, 0);
    for (name, p) in &suite {
        let want = common::brute_force_qbf(p);
        let got = match solve_embedded(p).map_err(|e| format!("{name}: {e}"))? {
            SolverAnswer::Sat(cert) => {
                let c: Vec<bool> = p.prefix.config.iter().map(|v| cert.values.get(v).copied().unwrap_or(false)).collect();
                if !common::holds_for_all_inputs(p, &c) {
                    return Err(format!("{name}: certificate is not a witness"));
                }
                true
            }
            SolverAnswer::Unsat => false,
            SolverAnswer::Unknown => return Err(format!("{name}: UNKNOWN")),
        };
        if got != want {
            return Err(format!("{name}: embedded {got}, brute force {want}"));
        }
        if want {
            sat += 1;
        } else {
            unsat += 1;
        }
    }
    within(start, Duration::from_secs(120), "oracle comparison")?;
    Ok(format!("{} problems agree ({sat} SAT, {unsat} UNSAT) in {:.1?}", suite.len(), start.elapsed()))
}

fn criterion6() -> Outcome {
    let mut count = 0;
    for width in DEFAULT_WIDTHS {
        for e in Encoding::ALL {
            let p = adder_problem(width, e, CarryChainAdder::DEFAULT_LUT_ARITY).map_err(|e| e.to_string())?;
            common::check_roundtrip(&p).map_err(|err| format!("adder{width}_{e}: {err}"))?;
            count += 1;
        }
    }
    for (i, p) in common::roundtrip_suite(99).iter().enumerate() {
        common::check_roundtrip(p).map_err(|err| format!("random problem {i}: {err}"))?;
        count += 1;
    }
    Ok(format!("{count} problems: parse(write(P)) = P and byte-stable rewrite"))
}

fn criterion7() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    for e in ["naive", "shrinking", "choose"] {
        let path = |name: &str| dir.path().join(format!("{e}.{name}")).to_string_lossy().into_owned();
        let (q, m, c) = (path("qdimacs"), path("model.json"), path("config.json"));
        expect_exit(&["generate", "--width", "4", "--encoding", e, "--carry-out", "-o", &q, "--model", &m], 0)?;
        let stats = expect_exit(&["stats", &q], 0)?;
        if !stats.contains("selector_bits") {
            return Err(format!("{e}: stats printed no selector totals"));
        }
        expect_exit(&["solve", &q, "--embedded", "--decode", &m, "-o", &c], 0)?;
        expect_exit(&["verify", "--model", &m, "--config", &c], 0)?;
    }
    Ok("generate, stats, solve --decode, verify exit 0 for all encodings".into())
}

fn main() {
    let criteria: [Check; 7] = [
        ("test-set regeneration", criterion1),
        ("width-4 satisfiability", criterion2),
        ("encoding-size chain", criterion3),
        ("gate-encoding oracle", criterion4),
        ("QBF decision oracle", criterion5),
        ("format round-trip", criterion6),
        ("CLI pipeline", criterion7),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let took = start.elapsed();
        match outcome {
            Ok(detail) => println!("criterion {}: PASS {name} ({took:.2?}): {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {}: FAIL {name} ({took:.2?}): {detail}", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
