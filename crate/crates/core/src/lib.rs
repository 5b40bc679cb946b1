//! Exhaustive exploration of small one-sided Turing machine spaces.

pub mod rulecodec;
pub mod simulator;
pub mod cleanser;
pub mod harness;
pub mod pipeline;
pub mod analyzer;
pub mod calibration;
pub mod compare;
pub mod export;

pub use analyzer::{AlgorithmProfile, Catalog, Classification, ComplexityClass, DefinableSet, FunctionProfile, Sequence};
pub use cleanser::{FitModel, SequenceKind, SequenceProfile, Verdict};
pub use harness::{BatchSpec, MachineRuns, MachineSet, RunStore, StoreMeta};
pub use pipeline::{CleansedMachine, SpaceAnalysis, VerifyPolicy};
pub use rulecodec::{DigitLayout, MachineDescriptor, Move, SpaceParams, Transition};
pub use simulator::{Halt, Program, RunRecord, Tape};
