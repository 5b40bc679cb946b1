//! Layout calibration: which digit layouts reproduce the published anchors.
//!
//! Every layout of [`DigitLayout::all`] is scored against four anchors: a
//! transition-table entry of Rule 2506, the runtimes of Rule 2240 and Rule
//! 2205, and the deep runtime of Rules 378 and 1351 on input 20. The deep
//! anchor is only checked for layouts that pass the cheap runtime anchors.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::rulecodec::{decode_with, DigitLayout, Move, SpaceParams, Transition};
use crate::simulator::{run, run_accelerated, Program};

const TABLE_RULE: u64 = 2506;
/// Entry quoted for state 2 reading white.
const TABLE_ENTRY: (u32, u8, Transition) = (
    2,
    0,
    Transition {
        write: 1,
        movement: Move::Right,
        next_state: 2,
    },
);
const PERIODIC_RULE: u64 = 2240;
const PERIODIC_RUNTIMES: [u64; 10] = [5, 5, 9, 9, 13, 13, 17, 17, 21, 21];
const STEPPED_RULE: u64 = 2205;
const STEPPED_RUNTIMES: [u64; 6] = [3, 7, 17, 27, 37, 47];
const DEEP_RULES: [u64; 2] = [378, 1351];
const DEEP_INPUT: u32 = 20;
const DEEP_RUNTIME: u64 = 8_388_605;
const DEEP_BOUND: u64 = 10_000_000;
const SHALLOW_BOUND: u64 = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnchorResults {
    pub table_entry: bool,
    pub periodic_runtimes: bool,
    pub stepped_runtimes: bool,
    /// `None` when the cheap anchors already failed.
    pub deep_runtime: Option<bool>,
}

impl AnchorResults {
    /// Passes every runtime anchor.
    pub fn runtime_consistent(&self) -> bool {
        self.periodic_runtimes && self.stepped_runtimes && self.deep_runtime == Some(true)
    }

    pub fn all(&self) -> bool {
        self.table_entry && self.runtime_consistent()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutScore {
    pub layout: DigitLayout,
    pub anchors: AnchorResults,
}

fn program(rule: u64, layout: &DigitLayout) -> Program {
    let m = decode_with(&BigUint::from(rule), SpaceParams::binary(2), layout).expect("rule inside (2,2)");
    Program::new(&m)
}

fn runtimes_match(rule: u64, layout: &DigitLayout, expected: &[u64]) -> bool {
    let p = program(rule, layout);
    expected
        .iter()
        .enumerate()
        .all(|(i, &t)| run(&p, i as u32, SHALLOW_BOUND).outcome.map(|h| h.runtime) == Some(t))
}

pub fn score_layout(layout: &DigitLayout) -> AnchorResults {
    let (state, color, entry) = TABLE_ENTRY;
    let m = decode_with(&BigUint::from(TABLE_RULE), SpaceParams::binary(2), layout).expect("rule inside (2,2)");
    let table_entry = *m.entry(state, color) == entry;
    let periodic_runtimes = runtimes_match(PERIODIC_RULE, layout, &PERIODIC_RUNTIMES);
    let stepped_runtimes = runtimes_match(STEPPED_RULE, layout, &STEPPED_RUNTIMES);
    let deep_runtime = (periodic_runtimes && stepped_runtimes).then(|| {
        DEEP_RULES.iter().all(|&r| {
            run_accelerated(&program(r, layout), DEEP_INPUT, DEEP_BOUND)
                .outcome
                .is_some_and(|h| h.runtime == DEEP_RUNTIME)
        })
    });
    AnchorResults {
        table_entry,
        periodic_runtimes,
        stepped_runtimes,
        deep_runtime,
    }
}

/// Scores for all 96 layouts, in [`DigitLayout::all`] order.
pub fn calibrate() -> Vec<LayoutScore> {
    DigitLayout::all()
        .into_iter()
        .map(|layout| LayoutScore {
            anchors: score_layout(&layout),
            layout,
        })
        .collect()
}
