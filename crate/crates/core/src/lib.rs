//! Evaluation harness for abstraction-first prompting.
//!
//! The crate wires together seven subsystems:
//!
//! * [`dataset`]: canonical benchmark records and loaders.
//! * [`prompt`]: template registry, exemplar banks, deterministic rendering.
//! * [`backend`]: pluggable text-completion providers, scripted mock, completion cache.
//! * [`retrieval`]: local BM25 passage index for retrieval-augmented strategies.
//! * [`pipeline`]: strategy execution over datasets with per-stage traces.
//! * [`judge`]: LLM-as-judge equivalence scoring and multi-run aggregation.
//! * [`analysis`]: win/loss matrices, error bookkeeping, shot ablations.
//!
//! Everything is runnable fully offline against the scripted mock backend;
//! live providers plug in behind the same [`backend::Backend`] trait.

pub mod analysis;
pub mod backend;
pub mod dataset;
pub mod judge;
pub mod pipeline;
pub mod prompt;
pub mod report;
pub mod retrieval;
