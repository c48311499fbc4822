use std::fs;
use std::hint::black_box;
use std::path::PathBuf;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use perdt_ud::stats::CorpusStats;
use perdt_ud::{parse_perdt, Execution, Pipeline, Treebank};

/// The rule-table fixtures repeated `copies` times.
fn corpus(copies: usize) -> Treebank {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/rules");
    let mut text = String::new();
    let mut paths: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .flatten()
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "perdt"))
        .collect();
    paths.sort();
    for p in &paths {
        text.push_str(&fs::read_to_string(p).unwrap());
    }
    let (tb, _) = parse_perdt(&text.repeat(copies), "bench");
    tb
}

fn convert(c: &mut Criterion) {
    let mut group = c.benchmark_group("convert");
    for copies in [10, 100] {
        let tb = corpus(copies);
        group.throughput(Throughput::Elements(tb.sentences.len() as u64));
        for exec in [Execution::Sequential, Execution::Parallel] {
            let mut p = Pipeline::default();
            p.options.execution = exec;
            group.bench_with_input(BenchmarkId::new(format!("{:?}", exec), tb.sentences.len()), &tb, |b, tb| {
                b.iter(|| black_box(p.convert_treebank(tb, &[])))
            });
        }
    }
    group.finish();
}

fn stats(c: &mut Criterion) {
    let tb = Pipeline::default().convert_treebank(&corpus(100), &[]).treebank;
    let mut group = c.benchmark_group("stats");
    group.throughput(Throughput::Elements(tb.sentences.len() as u64));
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_function(format!("{:?}", exec), |b| b.iter(|| black_box(CorpusStats::compute(&tb, exec))));
    }
    group.finish();
}

criterion_group!(benches, convert, stats);
criterion_main!(benches);
