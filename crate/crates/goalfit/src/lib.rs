//! IO, CLI plumbing, and run orchestration around the inference core:
//! CSV ingestion, synthetic-league generation, multi-threaded chain
//! execution, and on-disk run artifacts.

pub mod data;
pub mod run;
pub mod simulate;
