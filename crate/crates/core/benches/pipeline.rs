//! Compares sequential and data-parallel experiment execution on the
//! scripted mock with simulated provider work per call.
//!
//! Run with `cargo bench -p stepback`. Building with
//! `--no-default-features` leaves only the sequential arm.

use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use stepback::backend::{BackendRegistry, MockBackend, RetryPolicy};
use stepback::dataset::{Difficulty, QuestionRecord, Split, Task};
use stepback::pipeline::{run_experiment, ExecMode, PipelineDeps, StrategyName, StrategySpec};
use stepback::prompt::{ExemplarBank, TemplateRegistry};
use stepback::retrieval::{build_index, Passage, RetrievalIndex};

const N_RECORDS: usize = 12;
const RUNS: u32 = 2;
const WORK_FACTOR: u32 = 300;

fn records() -> Vec<QuestionRecord> {
    (1..=N_RECORDS)
        .map(|i| QuestionRecord {
            id: format!("q{i}"),
            task: Task::Timeqa,
            question: format!("Which team did Player{i} play for from 2001 to 2002?"),
            choices: None,
            gold: vec![format!("Team{i}")],
            split: Split::Test,
            difficulty: Some(Difficulty::Easy),
        })
        .collect()
}

fn corpus() -> Vec<Passage> {
    (1..=N_RECORDS)
        .map(|i| Passage {
            id: format!("bio{i}"),
            title: format!("Player{i}"),
            body: format!("Player{i} played for Team{i} between 2001 and 2002 before retiring."),
            source: "bench".into(),
        })
        .collect()
}

fn scripted_mock() -> MockBackend {
    let mock = MockBackend::new("gen");
    for i in 1..=N_RECORDS {
        let q = format!("Which team did Player{i} play for from 2001 to 2002?");
        let sbq = format!("Which teams did Player{i} play for in his career?");
        mock.script_substring(&format!("Original Question: {q}\nAnswer:"), &format!("Team{i}"));
        mock.script_substring(
            &format!("Original Question: {q}\nStepback Question:"),
            &format!("Stepback Question: {sbq}"),
        );
        mock.script_substring(&format!("Question: {sbq}\nAnswer:"), "career summary");
        mock.script_substring(&format!("{q}\nLet's think step by step."), "cot");
        mock.script_substring(&format!("step-by-step.\n{q}"), "tdb");
        mock.script_substring(&format!("Question: {q}\nAnswer:"), &format!("Team{i}"));
    }
    mock.set_work_factor(WORK_FACTOR);
    mock
}

struct Fixture {
    templates: TemplateRegistry,
    bank: ExemplarBank,
    backends: BackendRegistry,
    index: RetrievalIndex,
    specs: Vec<StrategySpec>,
    records: Vec<QuestionRecord>,
}

fn fixture() -> Fixture {
    let mut backends = BackendRegistry::new().with_retry(RetryPolicy::immediate(3));
    backends.register(Arc::new(scripted_mock()));
    Fixture {
        templates: TemplateRegistry::builtin(),
        bank: ExemplarBank::builtin(),
        backends,
        index: build_index(corpus()).unwrap(),
        specs: StrategyName::ALL
            .iter()
            .map(|n| StrategySpec::with_defaults(*n, "gen"))
            .collect(),
        records: records(),
    }
}

fn run(fixture: &Fixture, mode: ExecMode) -> usize {
    let deps = PipelineDeps {
        templates: &fixture.templates,
        bank: &fixture.bank,
        backends: &fixture.backends,
        index: Some(&fixture.index),
        cache: None,
    };
    run_experiment(&fixture.specs, &fixture.records, RUNS, &deps, mode)
        .unwrap()
        .predictions
        .len()
}

fn bench_execution_modes(c: &mut Criterion) {
    let fx = fixture();
    let mut group = c.benchmark_group("run_experiment");
    group.sample_size(10);

    group.bench_function("sequential", |b| {
        b.iter(|| black_box(run(&fx, ExecMode::Sequential)))
    });

    #[cfg(feature = "parallel")]
    {
        group.bench_function("parallel_default_pool", |b| {
            b.iter(|| black_box(run(&fx, ExecMode::Parallel { threads: 0 })))
        });
        for threads in [2usize, 4] {
            group.bench_function(format!("parallel_{threads}_threads"), |b| {
                b.iter(|| black_box(run(&fx, ExecMode::Parallel { threads })))
            });
        }
    }
    group.finish();
}

criterion_group!(benches, bench_execution_modes);
criterion_main!(benches);
