use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};

use lutmap_core::qdimacs::{parse_qdimacs_str, to_qdimacs_string};
use lutmap_core::solve::{expand_to_sat, sat_solve, ExpansionBudget};
use lutmap_core::testset::adder_problem;
use lutmap_core::{assemble, solve_embedded, CarryChainAdder, Encoding};

fn encode(c: &mut Criterion) {
    let mut group = c.benchmark_group("assemble");
    for width in [4, 7] {
        for e in Encoding::ALL {
            let adder = CarryChainAdder::new(width, e);
            let model = adder.build().unwrap();
            let target = adder.target();
            group.bench_with_input(BenchmarkId::new(e.as_str(), width), &width, |b, _| {
                b.iter(|| assemble(black_box(&model), &target).unwrap())
            });
        }
    }
    group.finish();
}

fn qdimacs(c: &mut Criterion) {
    let mut group = c.benchmark_group("qdimacs");
    for e in Encoding::ALL {
        let problem = adder_problem(5, e, CarryChainAdder::DEFAULT_LUT_ARITY).unwrap();
        let text = to_qdimacs_string(&problem);
        group.throughput(Throughput::Bytes(text.len() as u64));
        group.bench_function(BenchmarkId::new("write", e.as_str()), |b| b.iter(|| to_qdimacs_string(black_box(&problem))));
        group.bench_function(BenchmarkId::new("parse", e.as_str()), |b| {
            b.iter(|| parse_qdimacs_str(black_box(&text)).unwrap())
        });
    }
    group.finish();
}

fn solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve");
    group.sample_size(10);
    for e in Encoding::ALL {
        let problem = adder_problem(3, e, 3).unwrap();
        group.bench_function(BenchmarkId::new("expand", e.as_str()), |b| {
            b.iter(|| expand_to_sat(black_box(&problem), &ExpansionBudget::default()).unwrap())
        });
        let expansion = expand_to_sat(&problem, &ExpansionBudget::default()).unwrap();
        group.bench_function(BenchmarkId::new("cdcl", e.as_str()), |b| b.iter(|| sat_solve(black_box(&expansion.clauses))));
        group.bench_function(BenchmarkId::new("embedded", e.as_str()), |b| {
            b.iter(|| solve_embedded(black_box(&problem)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, encode, qdimacs, solve);
criterion_main!(benches);
