//! One-sided tape semantics.
//!
//! The tape is unbounded to the left and bounded on the right. Input `n` is
//! written as `n + 1` black cells flush against the right edge, the head
//! starts on the rightmost cell in state 1, and the machine halts when it is
//! told to move Right while standing on the rightmost cell. That final move
//! counts as a step.
//!
//! Space usage is the head's leftward reach: how many cells to the left of
//! the starting cell it ever visited. A machine that drops off immediately
//! uses space 0; one that sweeps a 21-cell input block uses 20, or 21 if it
//! also peeks at the blank cell just past the input.

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::rulecodec::{MachineDescriptor, Move};

/// Tape contents. `cells[0]` is the rightmost cell; higher indices lie
/// further left. Cells beyond the stored range are blank (0).
#[derive(Debug, Clone, Default, Eq, Serialize, Deserialize)]
pub struct Tape {
    cells: Vec<u8>,
}

impl Tape {
    pub fn blank() -> Self {
        Self::default()
    }

    /// Builds a tape from cells listed right edge first.
    pub fn from_cells(cells: Vec<u8>) -> Self {
        Self { cells }
    }

    /// Parses a left-to-right string of color digits, e.g. `"00101"`.
    pub fn from_bits(bits: &str) -> Option<Self> {
        let mut cells = Vec::with_capacity(bits.len());
        for ch in bits.chars().rev() {
            cells.push(ch.to_digit(10)? as u8);
        }
        Some(Self { cells })
    }

    /// Cells right edge first, including any stored leading blanks.
    pub fn cells(&self) -> &[u8] {
        &self.cells
    }

    pub fn get(&self, from_right: usize) -> u8 {
        self.cells.get(from_right).copied().unwrap_or(0)
    }

    /// Cells up to and including the leftmost non-blank one.
    pub fn significant(&self) -> &[u8] {
        let end = self.cells.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
        &self.cells[..end]
    }

    /// Left-to-right digit string with leading blanks stripped; `"0"` for
    /// an all-blank tape.
    pub fn to_bits(&self) -> String {
        let sig = self.significant();
        if sig.is_empty() {
            return "0".to_string();
        }
        sig.iter().rev().map(|&c| char::from(b'0' + c)).collect()
    }

    /// Binary value, rightmost cell least significant.
    pub fn value(&self) -> BigUint {
        decode_output(self)
    }

    /// Fixed-width left-to-right rendering over `width` cells.
    pub fn render(&self, width: usize) -> String {
        (0..width).rev().map(|i| char::from(b'0' + self.get(i))).collect()
    }
}

impl PartialEq for Tape {
    fn eq(&self, other: &Self) -> bool {
        self.significant() == other.significant()
    }
}

impl std::hash::Hash for Tape {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.significant().hash(state);
    }
}

pub fn encode_input(n: u32) -> Tape {
    Tape {
        cells: vec![1; n as usize + 1],
    }
}

pub fn decode_output(tape: &Tape) -> BigUint {
    let sig = tape.significant();
    if sig.is_empty() {
        return BigUint::zero();
    }
    // Pack into little-endian bytes: cell i is bit i.
    let mut bytes = vec![0u8; sig.len().div_ceil(8)];
    for (i, &c) in sig.iter().enumerate() {
        if c != 0 {
            bytes[i / 8] |= 1 << (i % 8);
        }
    }
    BigUint::from_bytes_le(&bytes)
}

/// Result of running one machine on one input.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunRecord {
    pub rule_number: u64,
    pub input: u32,
    pub step_bound: u64,
    /// `(runtime, space, output)` when the machine halted within the bound.
    pub outcome: Option<Halt>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Halt {
    pub runtime: u64,
    pub space: u64,
    pub output: Tape,
}

impl RunRecord {
    pub fn halted(&self) -> bool {
        self.outcome.is_some()
    }

    /// Runtime, or −1 when the run did not halt.
    pub fn runtime_or_sentinel(&self) -> i64 {
        self.outcome.as_ref().map_or(-1, |h| h.runtime as i64)
    }

    pub fn space_or_sentinel(&self) -> i64 {
        self.outcome.as_ref().map_or(-1, |h| h.space as i64)
    }

    pub fn output_value(&self) -> Option<BigUint> {
        self.outcome.as_ref().map(|h| h.output.value())
    }
}

/// Compiled transition table for the inner loop.
#[derive(Debug, Clone)]
pub struct Program {
    rule_number: u64,
    colors: usize,
    /// Indexed by `state * colors + color`, states from 0.
    entries: Vec<Entry>,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    write: u8,
    right: bool,
    next: u8,
}

impl Program {
    pub fn new(machine: &MachineDescriptor) -> Self {
        let params = machine.params();
        assert!(params.states() <= 256, "state index must fit a byte");
        let entries = machine
            .table()
            .iter()
            .map(|t| Entry {
                write: t.write,
                right: t.movement == Move::Right,
                next: (t.next_state - 1) as u8,
            })
            .collect();
        let rule_number = u64::try_from(machine.rule_number()).unwrap_or(u64::MAX);
        Self {
            rule_number,
            colors: params.colors() as usize,
            entries,
        }
    }

    pub fn rule_number(&self) -> u64 {
        self.rule_number
    }

    #[inline(always)]
    fn entry(&self, state: u8, color: u8) -> Entry {
        self.entries[state as usize * self.colors + color as usize]
    }
}

impl From<&MachineDescriptor> for Program {
    fn from(m: &MachineDescriptor) -> Self {
        Self::new(m)
    }
}

/// Mutable machine configuration.
struct Machine<'a> {
    program: &'a Program,
    cells: Vec<u8>,
    pos: usize,
    state: u8,
    steps: u64,
    max_pos: usize,
}

enum Step {
    Continue,
    Halted,
}

impl<'a> Machine<'a> {
    fn new(program: &'a Program, input: u32) -> Self {
        let mut cells = Vec::with_capacity(input as usize + 64);
        cells.resize(input as usize + 1, 1);
        Self {
            program,
            cells,
            pos: 0,
            state: 0,
            steps: 0,
            max_pos: 0,
        }
    }

    #[inline(always)]
    fn step(&mut self) -> Step {
        let e = self.program.entry(self.state, self.cells[self.pos]);
        self.cells[self.pos] = e.write;
        self.state = e.next;
        self.steps += 1;
        if e.right {
            if self.pos == 0 {
                return Step::Halted;
            }
            self.pos -= 1;
        } else {
            self.pos += 1;
            if self.pos == self.cells.len() {
                self.cells.push(0);
            }
            if self.pos > self.max_pos {
                self.max_pos = self.pos;
            }
        }
        Step::Continue
    }

    fn halt(self) -> Halt {
        Halt {
            runtime: self.steps,
            space: self.max_pos as u64,
            output: Tape { cells: self.cells },
        }
    }

    fn tape(&self) -> Tape {
        Tape {
            cells: self.cells.clone(),
        }
    }
}

/// Plain step-by-step simulation.
pub fn run(program: &Program, input: u32, step_bound: u64) -> RunRecord {
    let mut m = Machine::new(program, input);
    let mut outcome = None;
    while m.steps < step_bound {
        if let Step::Halted = m.step() {
            outcome = Some(m.halt());
            break;
        }
    }
    RunRecord {
        rule_number: program.rule_number,
        input,
        step_bound,
        outcome,
    }
}

/// Tape configurations, one per step, starting with the input tape.
pub fn trace(program: &Program, input: u32, step_bound: u64) -> Vec<Tape> {
    let mut m = Machine::new(program, input);
    let mut out = vec![m.tape()];
    while m.steps < step_bound {
        let done = matches!(m.step(), Step::Halted);
        out.push(m.tape());
        if done {
            break;
        }
    }
    out
}

/// Width of the tape window kept for translated-cycle detection.
const SHIFT_WINDOW: usize = 64;

/// Snapshot taken when the head first reaches a new leftmost cell.
struct Frontier {
    pos: usize,
    /// Cells `pos - i` for `i` in `0..window.len()`, i.e. the frontier cell
    /// and those to its right.
    window: Vec<u8>,
    /// Smallest head position seen since the snapshot.
    min_pos: usize,
}

/// Same observable result as [`run`], but reports divergence as soon as it
/// is proven by an exact configuration repeat or by a configuration that
/// repeats translated leftwards over blank tape.
pub fn run_accelerated(program: &Program, input: u32, step_bound: u64) -> RunRecord {
    let record = |outcome| RunRecord {
        rule_number: program.rule_number,
        input,
        step_bound,
        outcome,
    };
    let states = program.entries.len() / program.colors;
    let mut m = Machine::new(program, input);

    // Brent-style saved configuration for exact repeats.
    let mut saved_at = 0u64;
    let mut saved_state = m.state;
    let mut saved_pos = m.pos;
    let mut saved_cells = m.cells.clone();
    let mut next_save = 1u64;

    let mut frontier: Vec<Option<Frontier>> = (0..states).map(|_| None).collect();
    let mut min_since_record = m.pos;

    while m.steps < step_bound {
        let before_max = m.max_pos;
        if let Step::Halted = m.step() {
            return record(Some(m.halt()));
        }
        min_since_record = min_since_record.min(m.pos);

        if m.pos > before_max && m.pos > input as usize {
            // New leftmost cell past the input: everything further left is blank.
            for f in frontier.iter_mut().flatten() {
                f.min_pos = f.min_pos.min(min_since_record);
            }
            min_since_record = m.pos;
            let slot = m.state as usize;
            if let Some(f) = &frontier[slot] {
                let reach = f.pos - f.min_pos;
                if reach < f.window.len() && m.pos > f.pos {
                    let same = (0..=reach).all(|i| m.cells[m.pos - i] == f.window[i]);
                    if same {
                        return record(None);
                    }
                }
            }
            let take = SHIFT_WINDOW.min(m.pos + 1);
            let window = (0..take).map(|i| m.cells[m.pos - i]).collect();
            frontier[slot] = Some(Frontier {
                pos: m.pos,
                window,
                min_pos: m.pos,
            });
        }

        if m.state == saved_state && m.pos == saved_pos && m.steps != saved_at {
            let a = trim_blank(&m.cells);
            let b = trim_blank(&saved_cells);
            if a == b {
                return record(None);
            }
        }
        if m.steps == next_save {
            saved_at = m.steps;
            saved_state = m.state;
            saved_pos = m.pos;
            saved_cells.clear();
            saved_cells.extend_from_slice(&m.cells);
            next_save = next_save.saturating_mul(2);
        }
    }
    record(None)
}

fn trim_blank(cells: &[u8]) -> &[u8] {
    let end = cells.iter().rposition(|&c| c != 0).map_or(0, |i| i + 1);
    &cells[..end]
}

/// Alias with the accelerator's contract spelled out: identical records to
/// [`run`] for every machine, input and bound.
pub fn detect_divergence_fast(program: &Program, input: u32, step_bound: u64) -> RunRecord {
    run_accelerated(program, input, step_bound)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rulecodec::{decode_u64, SpaceParams, Transition};

    fn program(rule: u64, states: u32) -> Program {
        Program::new(&decode_u64(rule, SpaceParams::binary(states)).unwrap())
    }

    fn runtimes(rule: u64, states: u32, inputs: std::ops::Range<u32>, bound: u64) -> Vec<i64> {
        let p = program(rule, states);
        inputs.map(|n| run(&p, n, bound).runtime_or_sentinel()).collect()
    }

    #[test]
    fn input_encoding() {
        assert_eq!(encode_input(0).to_bits(), "1");
        assert_eq!(encode_input(3).to_bits(), "1111");
        assert_eq!(encode_input(20).cells().len(), 21);
    }

    #[test]
    fn output_decoding() {
        assert_eq!(decode_output(&Tape::from_bits("00101").unwrap()), BigUint::from(5u32));
        assert_eq!(decode_output(&Tape::blank()), BigUint::zero());
        assert_eq!(decode_output(&Tape::from_bits("000").unwrap()), BigUint::zero());
        assert_eq!(decode_output(&encode_input(20)), BigUint::from(2_097_151u32));
    }

    #[test]
    fn tape_equality_ignores_leading_blanks() {
        assert_eq!(Tape::from_bits("0011").unwrap(), Tape::from_bits("11").unwrap());
        assert_ne!(Tape::from_bits("110").unwrap(), Tape::from_bits("11").unwrap());
        assert_eq!(Tape::from_bits("0").unwrap().to_bits(), "0");
    }

    #[test]
    fn rule_2240_back_and_forth() {
        assert_eq!(runtimes(2240, 2, 0..10, 1000), vec![5, 5, 9, 9, 13, 13, 17, 17, 21, 21]);
    }

    #[test]
    fn rule_2205_localized() {
        assert_eq!(runtimes(2205, 2, 0..9, 1000), vec![3, 7, 17, 27, 37, 47, 57, 67, 77]);
    }

    #[test]
    fn rule_378_deep() {
        let r = run(&program(378, 2), 20, 10_000_000);
        let h = r.outcome.clone().expect("halts");
        assert_eq!(h.runtime, 8_388_605);
        assert_eq!(h.space, 21);
        assert_eq!(r.output_value().unwrap(), BigUint::from(2_097_151u32));
        let acc = run_accelerated(&program(378, 2), 20, 10_000_000);
        assert_eq!(acc, r);
    }

    #[test]
    fn right_move_from_start_halts_in_one_step() {
        for rule in 0..4096u64 {
            let m = decode_u64(rule, SpaceParams::binary(2)).unwrap();
            if m.entry(1, 1).movement == Move::Right {
                let p = Program::new(&m);
                for n in [0, 5, 20] {
                    assert_eq!(run(&p, n, 10).runtime_or_sentinel(), 1);
                }
            }
        }
    }

    #[test]
    fn divergent_record_uses_sentinels() {
        // State 1 always moves left: walks into blank territory forever.
        let m = MachineDescriptor::from_table(
            SpaceParams::binary(2),
            vec![
                Transition {
                    write: 0,
                    movement: Move::Left,
                    next_state: 1
                };
                4
            ],
        )
        .unwrap();
        let p = Program::new(&m);
        let r = run(&p, 3, 100);
        assert!(!r.halted());
        assert_eq!(r.runtime_or_sentinel(), -1);
        assert_eq!(r.space_or_sentinel(), -1);
        assert_eq!(run_accelerated(&p, 3, 100), r);
    }

    #[test]
    fn trace_lengths() {
        let t = trace(&program(2240, 2), 0, 1000);
        assert_eq!(t.len(), 6);
        assert_eq!(t[0], encode_input(0));
        let final_tape = run(&program(2240, 2), 0, 1000).outcome.unwrap().output;
        assert_eq!(t.last().unwrap(), &final_tape);

        let identity = trace(&program(1351, 2), 0, 1000);
        assert_eq!(identity.last().unwrap(), &encode_input(0));

        let cut = trace(&program(378, 2), 20, 50);
        assert_eq!(cut.len(), 51);
    }

    #[test]
    fn runtime_one_trace_keeps_tape_when_writing_read_color() {
        // (1, black) -> write black, Right.
        let m = (0..4096u64)
            .map(|r| decode_u64(r, SpaceParams::binary(2)).unwrap())
            .find(|m| {
                let t = m.entry(1, 1);
                t.movement == Move::Right && t.write == 1
            })
            .unwrap();
        let t = trace(&Program::new(&m), 4, 100);
        assert_eq!(t.len(), 2);
        assert_eq!(t[1], t[0]);
    }

    #[test]
    fn accelerator_agrees_on_whole_22_space() {
        let params = SpaceParams::binary(2);
        for rule in 0..4096u64 {
            let p = Program::new(&decode_u64(rule, params).unwrap());
            for n in 0..=20 {
                assert_eq!(run_accelerated(&p, n, 1000), run(&p, n, 1000), "rule {rule} input {n}");
            }
        }
    }
}
