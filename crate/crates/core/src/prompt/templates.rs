//! Built-in template texts.
//!
//! Slot markers use `{{name}}`. Rendering is single-pass substitution, so a
//! value containing `{{...}}` is inserted verbatim and never re-expanded.
//! Composite prompts are assembled from these pieces joined by one blank
//! line per block boundary, LF only.

pub(crate) const BUILTIN: &[(&str, &str)] = &[
    (
        "baseline.instruction.zero_shot",
        "You are an expert of world knowledge and physics. Your task is to solve the following question.",
    ),
    (
        "baseline.instruction.few_shot",
        "You are an expert of world knowledge and physics. Your task is to solve the following question. Here are a few examples:",
    ),
    ("baseline.exemplar", "Question: {{question}}\nAnswer: {{answer}}"),
    ("baseline.target", "Question: {{question}}\nAnswer:"),
    ("cot.zero_shot", "{{question}}\nLet's think step by step."),
    (
        "tdb",
        "Take a deep breath and work on this problem step-by-step.\n{{question}}",
    ),
    (
        "stepback.instruction",
        "You are an expert at world knowledge. Your task is to step back and paraphrase a question to a more generic step-back question, which is easier to answer. Here are a few examples:",
    ),
    (
        "stepback.exemplar",
        "Original Question: {{original_question}}\nStepback Question: {{stepback_question}}",
    ),
    (
        "stepback.target",
        "Original Question: {{question}}\nStepback Question:",
    ),
    (
        "principle.instruction",
        "You are an expert at {{subject}}. You are given a {{subject}} problem. Your task is to extract the {{subject}} concepts and principles involved in solving the problem. Here are a few examples:",
    ),
    (
        "principle.exemplar",
        "Question: {{question}}\nPrinciples Involved: {{principles}}",
    ),
    ("principle.target", "Question: {{question}}\nPrinciples Involved:"),
    (
        "stem_final.instruction",
        "You are an expert at {{subject}}. You are given a {{subject}} problem and a set of principles involved in solving the problem. Solve the problem step by step by following the principles. Here are a few examples:",
    ),
    (
        "stem_final.exemplar",
        "Question: {{question}}\nPrinciples: {{principles}}\nAnswer: {{answer}}",
    ),
    (
        "stem_final.target",
        "Question: {{question}}\nPrinciples: {{principles}}\nAnswer:",
    ),
    (
        "knowledge_final.instruction",
        "You are an expert of world knowledge. I am going to ask you a question. Your response should be comprehensive and not contradicted with the following context if they are relevant. Otherwise, ignore them if they are not relevant.",
    ),
    ("knowledge_final.target", "Original Question: {{question}}\nAnswer:"),
    (
        "judge.instruction",
        "Are the following two answers to the given question equivalent? Do not consider whether the answers are right or wrong, but only whether they are equivalent. Directly state \"Yes\" or \"No\".",
    ),
    (
        "judge.exemplar",
        "Question: {{question}}\nAnswer 1: {{answer_1}}\nAnswer 2: {{answer_2}}\nAnswer 1 (short): {{answer_1_short}}\nAnswer 2 (short): {{answer_2_short}}\nAre the two answers equivalent? {{verdict}}",
    ),
    (
        "judge.target",
        "Question: {{question}}\nAnswer 1: {{answer_1}}\nAnswer 2: {{answer_2}}",
    ),
];
