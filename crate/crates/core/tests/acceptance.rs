//! Acceptance suite: one test per criterion, each printing a PASS line
//! with its runtime. Run with `cargo test --test acceptance -- --nocapture`
//! to see the lines.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use stepback::analysis::win_loss;
use stepback::backend::{BackendRegistry, DecodeParams, MockBackend, RetryPolicy};
use stepback::dataset::{
    convert, filter_records, load_dataset, Difficulty, FieldPredicate, QuestionRecord, Split,
    Task, PUBLISHED_EVAL_COUNTS,
};
use stepback::judge::{
    aggregate, format_accuracy, judge_decode_params, parse_judge_verdict, score_run,
    JudgedPrediction, JudgeFlags, Verdict,
};
use stepback::pipeline::{
    run_experiment, ExecMode, PipelineDeps, Prediction, StrategyName, StrategySpec, Trace,
};
use stepback::prompt::{ExemplarBank, ExemplarRole, TemplateRegistry};
use stepback::retrieval::{build_index, retrieve, Passage, BM25_B, BM25_K1};

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

fn fixture_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/upstream")
}

/// Golden files store prompt bytes plus a single trailing LF.
fn assert_matches_golden(name: &str, rendered: &str) {
    let path = golden_dir().join(name);
    let file = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    let expected = format!("{rendered}\n");
    assert_eq!(
        file.as_bytes(),
        expected.as_bytes(),
        "golden mismatch for {name}"
    );
}

fn pass(criterion: u32, what: &str, started: Instant, budget: Duration) {
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "criterion {criterion} exceeded its runtime budget: {elapsed:?} >= {budget:?}"
    );
    println!("PASS criterion {criterion}: {what} ({elapsed:?})");
}

#[test]
fn acceptance_1_golden_prompt_suite() {
    let started = Instant::now();
    let templates = TemplateRegistry::builtin();
    let bank = ExemplarBank::builtin();
    let estella = "Estella Leopold went to which school between Aug 1954 and Nov 1954?";

    // standard prompt, one-shot
    let qa = bank.get(Task::Timeqa, ExemplarRole::Qa);
    let baseline = templates
        .render_baseline(
            "Which position did Knox Cunningham hold from May 1955 to Apr 1956?",
            &qa,
        )
        .unwrap();
    assert_matches_golden("table13_baseline.txt", &baseline.text);

    // step-back question prompt with all five pairs
    let pairs = bank.get(Task::Timeqa, ExemplarRole::StepbackPair);
    let stepback = templates
        .render_stepback_question_prompt(estella, &pairs)
        .unwrap();
    assert_matches_golden("table8_stepback.txt", &stepback.text);

    // principle + final prompts for the STEM flow
    let ideal_gas = "What happens to the pressure, P, of an ideal gas if the temperature is increased by a factor of 2 and the volume is increased by a factor of 8 ?\n0) P decreases by a factor of 16.\n1) P decreases by a factor of 4.\n2) P decreases by a factor of 2.\n3) P increases by a factor of 4.";
    let triplets = bank.get(Task::MmluPhysics, ExemplarRole::PrincipleTriplet);
    let principle = templates
        .render_principle_prompt(ideal_gas, stepback::prompt::StemSubject::Physics, &triplets)
        .unwrap();
    assert_matches_golden("table5_principle.txt", &principle.text);
    let stem_final = templates
        .render_stem_final_prompt(
            ideal_gas,
            "Ideal gas law: PV = nRT, where P is the pressure, V is the volume, n is the number of moles, R is the gas constant, and T is the temperature.",
            stepback::prompt::StemSubject::Physics,
            &triplets,
        )
        .unwrap();
    assert_matches_golden("table6_stem_final.txt", &stem_final.text);

    // knowledge final prompt with one passage per retrieval block
    let original = [stepback::prompt::ContextBlock {
        id: "estella_article".into(),
        text: "Estella Leopold\nEstella Bergere Leopold was an American paleobotanist and conservationist who studied at the University of Wisconsin, the University of California, Berkeley, and Yale University.".into(),
    }];
    let sb = [stepback::prompt::ContextBlock {
        id: "education_history".into(),
        text: "Education history of Estella Leopold\nEstella Leopold enrolled at Yale University in 1948 and completed her PhD in botany in 1955.".into(),
    }];
    let knowledge = templates
        .render_knowledge_final_prompt(estella, &original, &sb)
        .unwrap();
    assert_matches_golden("table10_knowledge_final.txt", &knowledge.text);

    // judge prompt with the two built-in pairs
    let judge = templates
        .render_judge_prompt(
            "Which team did Thierry Audel play for from 2007 to 2008?",
            "Thierry Audel played for Lincoln City from 2007 to 2008.",
            "Lincoln City",
            &bank.judge_pairs(),
        )
        .unwrap();
    assert_matches_golden("table4_judge.txt", &judge.text);

    // zero-shot suffix/prefix prompts, verbatim strings included
    let cot = templates.render_cot_zero_shot(estella).unwrap();
    assert_matches_golden("cot_zero_shot.txt", &cot.text);
    assert!(cot.text.ends_with("Let's think step by step."));
    let tdb = templates.render_tdb(estella).unwrap();
    assert_matches_golden("tdb.txt", &tdb.text);
    assert!(tdb
        .text
        .starts_with("Take a deep breath and work on this problem step-by-step."));
    assert_eq!(
        judge.text.matches("Are the two answers equivalent?").count(),
        2
    );

    pass(1, "golden prompt suite byte-exact", started, Duration::from_secs(1));
}

// ---------------------------------------------------------------------------
// criterion 2: end-to-end mock run
// ---------------------------------------------------------------------------

fn synthetic_question(i: usize) -> String {
    format!("Which team did Player{i} play for from 2001 to 2002?")
}

fn synthetic_stepback(i: usize) -> String {
    format!("Which teams did Player{i} play for in his career?")
}

fn synthetic_records() -> Vec<QuestionRecord> {
    (1..=5)
        .map(|i| QuestionRecord {
            id: format!("q{i}"),
            task: Task::Timeqa,
            question: synthetic_question(i),
            choices: None,
            gold: vec![format!("Team{i}")],
            split: Split::Test,
            difficulty: Some(if i % 2 == 0 { Difficulty::Hard } else { Difficulty::Easy }),
        })
        .collect()
}

fn synthetic_corpus() -> Vec<Passage> {
    let mut corpus: Vec<Passage> = (1..=5)
        .map(|i| Passage {
            id: format!("bio{i}"),
            title: format!("Player{i}"),
            body: format!("Player{i} played for Team{i} between 2001 and 2002 before retiring."),
            source: "fixture".into(),
        })
        .collect();
    corpus.push(Passage {
        id: "distractor".into(),
        title: "Unrelated".into(),
        body: "An unrelated passage about railway operators and countries.".into(),
        source: "fixture".into(),
    });
    corpus
}

fn scripted_mock() -> MockBackend {
    let mock = MockBackend::new("gen");
    for i in 1..=5 {
        let q = synthetic_question(i);
        let sbq = synthetic_stepback(i);
        // knowledge-final rule must precede the bare question/answer tail
        // rule: the former's needle contains the latter
        mock.script_substring(
            &format!("Original Question: {q}\nAnswer:"),
            &format!("The answer is Team{i}."),
        );
        mock.script_substring(
            &format!("Original Question: {q}\nStepback Question:"),
            &format!("Stepback Question: {sbq}"),
        );
        mock.script_substring(
            &format!("Question: {sbq}\nAnswer:"),
            &format!("Player{i} has played for Team{i} throughout his career."),
        );
        mock.script_substring(
            &format!("{q}\nLet's think step by step."),
            &format!("Step by step, Team{i}."),
        );
        mock.script_substring(&format!("step-by-step.\n{q}"), &format!("Deep breath: Team{i}."));
        mock.script_substring(&format!("Question: {q}\nAnswer:"), &format!("Team{i}"));
    }
    mock
}

fn all_specs() -> Vec<StrategySpec> {
    StrategyName::ALL
        .iter()
        .map(|name| StrategySpec::with_defaults(*name, "gen"))
        .collect()
}

struct E2eRun {
    predictions: Vec<Prediction>,
    total_calls: usize,
}

fn run_e2e() -> E2eRun {
    let mock = scripted_mock();
    let counter = mock.call_counter();
    let mut backends = BackendRegistry::new().with_retry(RetryPolicy::immediate(3));
    backends.register(Arc::new(mock));
    let templates = TemplateRegistry::builtin();
    let bank = ExemplarBank::builtin();
    let index = build_index(synthetic_corpus()).unwrap();
    let deps = PipelineDeps {
        templates: &templates,
        bank: &bank,
        backends: &backends,
        index: Some(&index),
        cache: None,
    };
    let result = run_experiment(&all_specs(), &synthetic_records(), 5, &deps, ExecMode::auto(0))
        .expect("experiment runs");
    assert_eq!(result.failed(), 0, "failures: {:?}", result.failure_counts);
    E2eRun {
        predictions: result.predictions,
        total_calls: counter.count(),
    }
}

#[test]
fn acceptance_2_end_to_end_mock_run() {
    let started = Instant::now();
    let first = run_e2e();
    assert_eq!(first.predictions.len(), 8 * 5 * 5);

    // deterministic at the prediction layer: a fresh identical run yields
    // byte-identical serialized predictions
    let second = run_e2e();
    let ser = |predictions: &[Prediction]| serde_json::to_string(predictions).unwrap();
    assert_eq!(ser(&first.predictions), ser(&second.predictions));

    // stage-count contract per strategy, from the traces
    for prediction in &first.predictions {
        let (expected_generation, expected_grounding) =
            prediction.strategy.call_profile(Task::Timeqa);
        assert_eq!(
            prediction.trace.generation_calls(),
            expected_generation,
            "{} generation calls",
            prediction.strategy
        );
        assert_eq!(
            prediction.trace.grounding_calls(),
            expected_grounding,
            "{} grounding calls",
            prediction.strategy
        );
        // the answer is the final-stage completion
        assert_eq!(
            prediction.answer,
            prediction.trace.stages.last().unwrap().completion
        );
    }

    // transcript total: 5 records x 5 runs x (6 one-call strategies + 3
    // provider calls for stepback + 2 for stepback_rag)
    let per_record_run: usize = StrategyName::ALL
        .iter()
        .map(|s| {
            let (generation, grounding) = s.call_profile(Task::Timeqa);
            generation + grounding
        })
        .sum();
    assert_eq!(per_record_run, 11);
    assert_eq!(first.total_calls, 5 * 5 * per_record_run);

    // replay every traced prompt through a fresh identically-scripted mock
    let replay = scripted_mock();
    for prediction in first.predictions.iter().filter(|p| p.run_index == 0) {
        for stage in &prediction.trace.stages {
            let completion = stepback::backend::Backend::complete(
                &replay,
                &stage.prompt,
                &DecodeParams::greedy(),
            )
            .unwrap_or_else(|_| panic!("unscripted replay prompt in {}", prediction.strategy));
            assert_eq!(completion, stage.completion, "replay mismatch");
        }
    }

    // spot-check trace payloads and output ordering
    let stepback_first = first
        .predictions
        .iter()
        .find(|p| p.strategy == StrategyName::Stepback && p.record_id == "q3")
        .unwrap();
    assert_eq!(
        stepback_first.trace.stepback_question.as_deref(),
        Some(synthetic_stepback(3).as_str())
    );
    assert!(stepback_first.trace.stepback_answer.is_some());
    let sbr = first
        .predictions
        .iter()
        .find(|p| p.strategy == StrategyName::StepbackRag && p.record_id == "q2")
        .unwrap();
    let sb_passages = sbr.trace.stepback_passages.as_ref().unwrap();
    assert!(sb_passages.iter().any(|p| p.id == "bio2"));
    let keys: Vec<(StrategyName, &str, u32)> = first
        .predictions
        .iter()
        .take(6)
        .map(|p| (p.strategy, p.record_id.as_str(), p.run_index))
        .collect();
    assert_eq!(keys[0], (StrategyName::Baseline, "q1", 0));
    assert_eq!(keys[4], (StrategyName::Baseline, "q1", 4));
    assert_eq!(keys[5], (StrategyName::Baseline, "q2", 0));

    pass(
        2,
        "end-to-end mock run deterministic, stage counts verified by transcript",
        started,
        Duration::from_secs(10),
    );
}

// ---------------------------------------------------------------------------
// criterion 3: aggregation oracle
// ---------------------------------------------------------------------------

fn judged_item(strategy: StrategyName, record: usize, run: u32, correct: bool) -> JudgedPrediction {
    JudgedPrediction {
        record_id: format!("r{record}"),
        strategy,
        run_index: run,
        verdict: if correct { Verdict::Equivalent } else { Verdict::NotEquivalent },
        judge_raw: String::new(),
        judge_calls: 1,
        flags: JudgeFlags::default(),
    }
}

#[test]
fn acceptance_3_aggregation_oracle() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0x5eed);
    let runs = 5u32;
    for _ in 0..1000 {
        let n_records = rng.random_range(3..=25usize);
        let matrix: Vec<Vec<bool>> = (0..runs)
            .map(|_| (0..n_records).map(|_| rng.random_bool(0.5)).collect())
            .collect();
        let judged: Vec<JudgedPrediction> = matrix
            .iter()
            .enumerate()
            .flat_map(|(run, row)| {
                row.iter().enumerate().map(move |(record, &correct)| {
                    judged_item(StrategyName::Stepback, record, run as u32, correct)
                })
            })
            .collect();
        let score = aggregate(&judged, runs).unwrap().remove(0);

        // independent streaming oracle over the per-run accuracies
        let mut count = 0u32;
        let mut mean = 0.0f64;
        let mut m2 = 0.0f64;
        for row in &matrix {
            let accuracy = row.iter().filter(|&&b| b).count() as f64 / n_records as f64;
            count += 1;
            let delta = accuracy - mean;
            mean += delta / count as f64;
            m2 += delta * (accuracy - mean);
        }
        let oracle_std = (m2 / count as f64).sqrt();
        assert!((score.mean_accuracy - mean).abs() < 1e-12);
        assert!((score.std_dev - oracle_std).abs() < 1e-12);
        assert_eq!(score.n_records, n_records);
    }

    // display convention on published (mean, std) pairs read as inputs
    let display_pairs = [
        (0.732, 0.019, "73.2% (1.9%)"),
        (0.664, 0.008, "66.4% (0.8%)"),
        (0.709, 0.009, "70.9% (0.9%)"),
        (0.818, 0.014, "81.8% (1.4%)"),
        (0.640, 0.016, "64.0% (1.6%)"),
        (0.575, 0.003, "57.5% (0.3%)"),
        (0.610, 0.004, "61.0% (0.4%)"),
        (0.845, 0.012, "84.5% (1.2%)"),
        (0.355, 0.030, "35.5% (3.0%)"),
        (0.864, 0.010, "86.4% (1.0%)"),
    ];
    for (mean, std, expected) in display_pairs {
        assert_eq!(format_accuracy(mean, std), expected);
    }

    pass(
        3,
        "aggregation matches streaming oracle to 1e-12; display convention exact",
        started,
        Duration::from_secs(1),
    );
}

// ---------------------------------------------------------------------------
// criterion 4: judge parsing
// ---------------------------------------------------------------------------

#[test]
fn acceptance_4_judge_parsing() {
    let started = Instant::now();
    let bank = ExemplarBank::builtin();
    // the two built-in demonstration pairs parse to their published verdicts
    let pairs = bank.judge_pairs();
    assert_eq!(parse_judge_verdict(pairs[0].slots["verdict"].as_str()), Verdict::Equivalent);
    assert_eq!(parse_judge_verdict(pairs[1].slots["verdict"].as_str()), Verdict::NotEquivalent);

    use Verdict::*;
    let variants: [(&str, Verdict); 50] = [
        ("Yes", Equivalent),
        ("yes", Equivalent),
        ("YES", Equivalent),
        ("yEs", Equivalent),
        ("Yes.", Equivalent),
        ("yes!", Equivalent),
        ("Yes, they are equivalent.", Equivalent),
        ("  Yes", Equivalent),
        ("\nYes\n", Equivalent),
        ("\"Yes\"", Equivalent),
        ("(yes)", Equivalent),
        ("Yes; both name the same title.", Equivalent),
        ("YES!!!", Equivalent),
        ("The answer is yes", Equivalent),
        ("I would say yes.", Equivalent),
        ("Sure - yes, equivalent.", Equivalent),
        ("yes/no", Equivalent),
        ("Yes\nNo", Equivalent),
        ("equivalent? Yes", Equivalent),
        ("Absolutely, yes.", Equivalent),
        ("No", NotEquivalent),
        ("no", NotEquivalent),
        ("NO", NotEquivalent),
        ("nO", NotEquivalent),
        ("No.", NotEquivalent),
        ("no!", NotEquivalent),
        ("No, they differ.", NotEquivalent),
        ("  No", NotEquivalent),
        ("\nNo\n", NotEquivalent),
        ("\"No\"", NotEquivalent),
        ("(no)", NotEquivalent),
        ("No; different titles.", NotEquivalent),
        ("NO!!!", NotEquivalent),
        ("The answer is no", NotEquivalent),
        ("I would say no.", NotEquivalent),
        ("Hmm, no, not equivalent.", NotEquivalent),
        ("no/yes", NotEquivalent),
        ("No\nYes", NotEquivalent),
        ("equivalent? No", NotEquivalent),
        ("Definitely no.", NotEquivalent),
        ("", Unparseable),
        ("   ", Unparseable),
        ("Possibly.", Unparseable),
        ("Maybe", Unparseable),
        ("They are similar.", Unparseable),
        ("Notably unclear", Unparseable),
        ("yesterday", Unparseable),
        ("nope", Unparseable),
        ("The two answers are equivalent.", Unparseable),
        ("I cannot tell", Unparseable),
    ];
    for (text, expected) in variants {
        assert_eq!(parse_judge_verdict(text), expected, "variant {text:?}");
    }

    // unparseable judge output never crashes scoring
    let templates = TemplateRegistry::builtin();
    let judge_mock = MockBackend::new("judge");
    judge_mock.script_substring("", "Possibly.");
    let mut backends = BackendRegistry::new().with_retry(RetryPolicy::immediate(2));
    backends.register(Arc::new(judge_mock));
    let records = synthetic_records();
    let predictions: Vec<Prediction> = records
        .iter()
        .map(|r| Prediction {
            record_id: r.id.clone(),
            strategy: StrategyName::Baseline,
            run_index: 0,
            answer: "some answer".into(),
            trace: Trace::default(),
            error: None,
        })
        .collect();
    let judged = score_run(
        &predictions,
        &records,
        &templates,
        &bank.judge_pairs(),
        &backends,
        "judge",
        &judge_decode_params(),
        0,
    )
    .unwrap();
    assert!(judged.iter().all(|j| j.verdict == Verdict::Unparseable));
    let scores = aggregate(&judged, 1).unwrap();
    assert_eq!(scores[0].mean_accuracy, 0.0);

    pass(4, "judge verdict parsing follows the standalone-token rule", started, Duration::from_secs(1));
}

// ---------------------------------------------------------------------------
// criterion 5: retrieval determinism and oracle
// ---------------------------------------------------------------------------

fn oracle_bm25(corpus: &[Passage], query: &str, k: usize) -> Vec<(String, f64)> {
    // independent scorer: recomputes every statistic from the raw corpus
    let token_docs: Vec<Vec<String>> = corpus
        .iter()
        .map(|p| stepback::retrieval::tokenize(&format!("{} {}", p.title, p.body)))
        .collect();
    let n = corpus.len() as f64;
    let avg = token_docs.iter().map(|d| d.len() as f64).sum::<f64>() / n;
    let mut scores = vec![0.0f64; corpus.len()];
    let mut matched = vec![false; corpus.len()];
    for term in stepback::retrieval::tokenize(query) {
        let df = token_docs
            .iter()
            .filter(|doc| doc.contains(&term))
            .count() as f64;
        if df == 0.0 {
            continue;
        }
        let idf = ((n - df + 0.5) / (df + 0.5) + 1.0).ln();
        for (i, doc) in token_docs.iter().enumerate() {
            let tf = doc.iter().filter(|t| **t == term).count() as f64;
            if tf == 0.0 {
                continue;
            }
            let dl = doc.len() as f64;
            let norm =
                tf * (BM25_K1 + 1.0) / (tf + BM25_K1 * (1.0 - BM25_B + BM25_B * dl / avg));
            scores[i] += idf * norm;
            matched[i] = true;
        }
    }
    let mut hits: Vec<(String, f64)> = corpus
        .iter()
        .enumerate()
        .filter(|(i, _)| matched[*i])
        .map(|(i, p)| (p.id.clone(), scores[i]))
        .collect();
    hits.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    hits.truncate(k);
    hits
}

fn retrieval_fixture() -> Vec<Passage> {
    let bodies = [
        ("a01", "education history of Estella Leopold at Yale"),
        ("a02", "career history of a football player"),
        ("a03", "the education system in general terms"),
        ("a04", "history of the railway operators"),
        ("a05", "education education education repeated"),
        // identical statistics to force the id tie-break
        ("tie_b", "momentum energy physics"),
        ("tie_a", "momentum energy physics"),
        ("a08", "a passage about chemistry principles and moles"),
        ("a09", "football career of Thierry Audel"),
        ("a10", "completely unrelated text about stamps"),
    ];
    bodies
        .iter()
        .map(|(id, body)| Passage {
            id: id.to_string(),
            title: String::new(),
            body: body.to_string(),
            source: "fixture".into(),
        })
        .collect()
}

#[test]
fn acceptance_5_retrieval_determinism_and_oracle() {
    let started = Instant::now();
    let corpus = retrieval_fixture();
    assert!(corpus.len() <= 10);
    let index = build_index(corpus.clone()).unwrap();

    let queries = [
        "education history",
        "career",
        "momentum energy",
        "physics momentum energy principles",
        "the",
        "zzz unknown terms",
        "education",
    ];
    for query in queries {
        for k in 0..=5usize {
            let got: Vec<(String, f64)> = retrieve(&index, query, k)
                .iter()
                .map(|(p, s)| (p.id.clone(), *s))
                .collect();
            let expected = oracle_bm25(&corpus, query, k);
            let got_ids: Vec<&str> = got.iter().map(|(id, _)| id.as_str()).collect();
            let expected_ids: Vec<&str> = expected.iter().map(|(id, _)| id.as_str()).collect();
            assert_eq!(got_ids, expected_ids, "ranking for {query:?} k={k}");
            for ((_, a), (_, b)) in got.iter().zip(&expected) {
                assert!((a - b).abs() <= 1e-12, "score drift for {query:?}");
            }
            // prefix property
            let bigger: Vec<String> = retrieve(&index, query, k + 1)
                .iter()
                .map(|(p, _)| p.id.clone())
                .collect();
            assert_eq!(
                got_ids,
                bigger[..got_ids.len()]
                    .iter()
                    .map(String::as_str)
                    .collect::<Vec<_>>()
            );
        }
    }

    // id tie-break surfaces on the duplicate-statistics pair
    let hits = retrieve(&index, "momentum energy", 2);
    assert_eq!(hits[0].0.id, "tie_a");
    assert_eq!(hits[1].0.id, "tie_b");
    assert_eq!(hits[0].1.to_bits(), hits[1].1.to_bits());

    // bit-for-bit determinism across a rebuild
    let rebuilt = build_index(corpus).unwrap();
    for query in queries {
        let a: Vec<(String, u64)> = retrieve(&index, query, 10)
            .iter()
            .map(|(p, s)| (p.id.clone(), s.to_bits()))
            .collect();
        let b: Vec<(String, u64)> = retrieve(&rebuilt, query, 10)
            .iter()
            .map(|(p, s)| (p.id.clone(), s.to_bits()))
            .collect();
        assert_eq!(a, b);
    }

    pass(5, "retrieval matches brute-force oracle with id tie-break", started, Duration::from_secs(1));
}

// ---------------------------------------------------------------------------
// criterion 6: win/loss algebra
// ---------------------------------------------------------------------------

#[test]
fn acceptance_6_win_loss_algebra() {
    let started = Instant::now();
    let mut rng = StdRng::seed_from_u64(0xa11e);
    for case in 0..100 {
        let n = rng.random_range(1..=200usize);
        let mut a = BTreeMap::new();
        let mut b = BTreeMap::new();
        let skew_a = rng.random_range(0.1..0.9);
        let skew_b = rng.random_range(0.1..0.9);
        for i in 0..n {
            a.insert(format!("r{i:04}"), rng.random_bool(skew_a));
            b.insert(format!("r{i:04}"), rng.random_bool(skew_b));
        }
        let ab = win_loss("a", &a, "b", &b).unwrap();
        let ba = win_loss("b", &b, "a", &a).unwrap();
        // antisymmetry
        assert_eq!(ab.a_only, ba.b_only, "case {case}");
        assert_eq!(ab.b_only, ba.a_only);
        assert_eq!(ab.both_correct, ba.both_correct);
        assert_eq!(ab.both_wrong, ba.both_wrong);
        assert_eq!(ab.n_records(), n);
        // accuracy identity, exact over the common denominator n:
        // acc_a - acc_b = (a_only - b_only)/n  <=>
        // correct_a - correct_b = a_only - b_only
        let correct_a = a.values().filter(|&&v| v).count() as i64;
        let correct_b = b.values().filter(|&&v| v).count() as i64;
        assert_eq!(correct_a - correct_b, ab.a_only as i64 - ab.b_only as i64);
        // and the f64 evaluations agree to rounding noise
        let lhs = ab.accuracy_a() - ab.accuracy_b();
        let rhs = (ab.a_only as f64 - ab.b_only as f64) / n as f64;
        assert!((lhs - rhs).abs() < 1e-12);
    }

    // the shaped fixture: 200 records, 41 fixed, 24 broken -> 20.5% / 12.0%
    let mut a = BTreeMap::new();
    let mut b = BTreeMap::new();
    let mut idx = 0usize;
    let push = |a: &mut BTreeMap<String, bool>,
                    b: &mut BTreeMap<String, bool>,
                    idx: &mut usize,
                    count: usize,
                    va: bool,
                    vb: bool| {
        for _ in 0..count {
            a.insert(format!("r{:03}", idx), va);
            b.insert(format!("r{:03}", idx), vb);
            *idx += 1;
        }
    };
    push(&mut a, &mut b, &mut idx, 100, true, true);
    push(&mut a, &mut b, &mut idx, 41, true, false);
    push(&mut a, &mut b, &mut idx, 24, false, true);
    push(&mut a, &mut b, &mut idx, 35, false, false);
    assert_eq!(idx, 200);
    let m = win_loss("stepback", &a, "baseline", &b).unwrap();
    assert_eq!(m.a_only, 41);
    assert_eq!(m.b_only, 24);
    assert!((m.fixed_pct - 20.5).abs() < 1e-12);
    assert!((m.broken_pct - 12.0).abs() < 1e-12);

    pass(6, "win/loss antisymmetry and accuracy identity exact", started, Duration::from_secs(1));
}

// ---------------------------------------------------------------------------
// criterion 7: dataset counts
// ---------------------------------------------------------------------------

struct CountCase {
    task: Task,
    split: Split,
    file: &'static str,
    fixture_count: usize,
    published_count: usize,
}

const COUNT_CASES: [CountCase; 7] = [
    CountCase { task: Task::MmluPhysics, split: Split::Test, file: "mmlu_physics_test.csv", fixture_count: 3, published_count: 151 },
    CountCase { task: Task::MmluChemistry, split: Split::Test, file: "mmlu_chemistry_test.csv", fixture_count: 2, published_count: 203 },
    CountCase { task: Task::Gsm8k, split: Split::Test, file: "gsm8k_test.jsonl", fixture_count: 4, published_count: 1319 },
    CountCase { task: Task::Timeqa, split: Split::Test, file: "timeqa_test.jsonl", fixture_count: 6, published_count: 5226 },
    CountCase { task: Task::Situatedqa, split: Split::Test, file: "situatedqa_test.jsonl", fixture_count: 3, published_count: 2901 },
    CountCase { task: Task::Musique, split: Split::Dev, file: "musique_dev.jsonl", fixture_count: 2, published_count: 2417 },
    CountCase { task: Task::Strategyqa, split: Split::Dev, file: "strategyqa_dev.json", fixture_count: 2, published_count: 229 },
];

fn convert_one(case: &CountCase, dir: &Path) -> Vec<QuestionRecord> {
    let path = dir.join(case.file);
    let file = std::fs::File::open(&path).unwrap_or_else(|e| panic!("{path:?}: {e}"));
    match case.task {
        Task::MmluPhysics | Task::MmluChemistry => {
            convert::convert_mmlu_csv(file, case.task, case.split).unwrap()
        }
        Task::Gsm8k => convert::convert_gsm8k_jsonl(file, case.split).unwrap(),
        Task::Timeqa => convert::convert_timeqa_jsonl(file, case.split).unwrap(),
        Task::Situatedqa => convert::convert_situatedqa_jsonl(file, case.split).unwrap(),
        Task::Musique => convert::convert_musique_jsonl(file, case.split).unwrap(),
        Task::Strategyqa => convert::convert_strategyqa_json(file, case.split).unwrap(),
    }
}

#[test]
fn acceptance_7_dataset_counts() {
    let started = Instant::now();

    // the published table itself, pinned
    let pinned: Vec<usize> = PUBLISHED_EVAL_COUNTS.iter().map(|(_, _, _, n)| *n).collect();
    assert_eq!(pinned, vec![151, 203, 1319, 5226, 2613, 2613, 2901, 2417, 229]);

    // CI path: truncated fixtures with adjusted expected counts through the
    // full converter -> writer -> loader -> filter chain
    let out = tempfile::tempdir().unwrap();
    for case in &COUNT_CASES {
        let records = convert_one(case, &fixture_dir());
        assert_eq!(records.len(), case.fixture_count, "{} fixture", case.task);
        let manifest = convert::write_converted(
            out.path(),
            case.task,
            case.split,
            &records,
            "ci-fixture-truncated",
        )
        .unwrap();
        assert_eq!(manifest.expected_count, Some(case.fixture_count));
        let loaded = load_dataset(&manifest).unwrap();
        assert_eq!(loaded.len(), case.fixture_count);

        if case.task == Task::Timeqa {
            let easy =
                filter_records(&loaded, &FieldPredicate::new("difficulty", "easy")).unwrap();
            let hard =
                filter_records(&loaded, &FieldPredicate::new("difficulty", "hard")).unwrap();
            assert_eq!(easy.len(), 3);
            assert_eq!(hard.len(), 3);
            assert_eq!(easy.len() + hard.len(), loaded.len());
        }
    }

    // full-data path when the public distributions are present
    match std::env::var("STEPBACK_DATA_DIR") {
        Ok(dir) => {
            let dir = PathBuf::from(dir);
            for case in &COUNT_CASES {
                let records = convert_one(case, &dir);
                assert_eq!(
                    records.len(),
                    case.published_count,
                    "{} full distribution",
                    case.task
                );
                if case.task == Task::Timeqa {
                    let easy =
                        filter_records(&records, &FieldPredicate::new("difficulty", "easy"))
                            .unwrap();
                    let hard =
                        filter_records(&records, &FieldPredicate::new("difficulty", "hard"))
                            .unwrap();
                    assert_eq!(easy.len(), 2613);
                    assert_eq!(hard.len(), 2613);
                }
            }
            println!("criterion 7 ran against the full distributions in STEPBACK_DATA_DIR");
        }
        Err(_) => {
            println!(
                "criterion 7: STEPBACK_DATA_DIR unset; full-distribution counts checked on truncated fixtures"
            );
        }
    }

    pass(7, "dataset counts exact on fixtures (full data when provided)", started, Duration::from_secs(5));
}

// ---------------------------------------------------------------------------
// criterion 8: optional live smoke test
// ---------------------------------------------------------------------------

/// Directional smoke test against a live provider. Opt-in: set
/// STEPBACK_LIVE_ENDPOINT (and optionally STEPBACK_LIVE_CREDENTIAL_ENV,
/// STEPBACK_LIVE_MODEL), STEPBACK_LIVE_TIMEQA (canonical records), and
/// STEPBACK_LIVE_CORPUS (canonical passages), then run
/// `cargo test --test acceptance -- --ignored live_smoke --nocapture`.
#[test]
#[ignore = "requires a live backend; see doc comment"]
fn acceptance_8_live_smoke() {
    let endpoint = match std::env::var("STEPBACK_LIVE_ENDPOINT") {
        Ok(v) => v,
        Err(_) => {
            println!("criterion 8 skipped: STEPBACK_LIVE_ENDPOINT unset");
            return;
        }
    };
    let records_path = std::env::var("STEPBACK_LIVE_TIMEQA").expect("STEPBACK_LIVE_TIMEQA");
    let corpus_path = std::env::var("STEPBACK_LIVE_CORPUS").expect("STEPBACK_LIVE_CORPUS");
    let credential_env = std::env::var("STEPBACK_LIVE_CREDENTIAL_ENV").ok();
    let model = std::env::var("STEPBACK_LIVE_MODEL").ok();

    let manifest = stepback::dataset::DatasetManifest {
        task: Task::Timeqa,
        split: Split::Test,
        path: PathBuf::from(records_path),
        expected_count: None,
        source_version: None,
    };
    let all_records = load_dataset(&manifest).unwrap();
    let records: Vec<QuestionRecord> = all_records.into_iter().take(20).collect();
    assert!(!records.is_empty(), "live smoke needs at least one record");

    let corpus = stepback::retrieval::load_corpus(Path::new(&corpus_path)).unwrap();
    let index = build_index(corpus).unwrap();

    let live = stepback::backend::HttpBackend::new(
        "live",
        endpoint,
        credential_env,
        model,
        None,
        Duration::from_secs(120),
    );
    let mut backends = BackendRegistry::new();
    backends.register(Arc::new(live));
    let templates = TemplateRegistry::builtin();
    let bank = ExemplarBank::builtin();
    let deps = PipelineDeps {
        templates: &templates,
        bank: &bank,
        backends: &backends,
        index: Some(&index),
        cache: None,
    };
    let specs = vec![
        StrategySpec::with_defaults(StrategyName::Rag, "live"),
        StrategySpec::with_defaults(StrategyName::StepbackRag, "live"),
    ];
    let result = run_experiment(&specs, &records, 1, &deps, ExecMode::auto(0)).unwrap();
    assert_eq!(result.failed(), 0, "live pipeline had failures: {:?}", result.failure_counts);

    let judged = score_run(
        &result.predictions,
        &records,
        &templates,
        &bank.judge_pairs(),
        &backends,
        "live",
        &judge_decode_params(),
        0,
    )
    .unwrap();
    let scores = aggregate(&judged, 1).unwrap();
    let rows: Vec<(Task, stepback::judge::AggregateScore)> =
        scores.into_iter().map(|s| (Task::Timeqa, s)).collect();
    println!("{}", stepback::report::aggregate_table(&rows));
    println!("PASS criterion 8: live smoke ran end-to-end (no accuracy asserted)");
}
