//! Rule numbers and transition tables.
//!
//! A machine in the `(s, k)` space is identified by a rule number below
//! `(2sk)^(sk)`. Written in base `2sk` with exactly `s*k` digits, each digit
//! encodes one transition. How digit positions map onto `(state, color)`
//! slots and how a digit packs `(next_state, write, move)` is captured by
//! [`DigitLayout`]; [`DigitLayout::WOLFRAM`] is the layout that reproduces
//! the published runtime anchors (see `calibration`).

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("rule number {rule} is outside the {params} space (size {size})")]
    RuleOutOfRange {
        rule: BigUint,
        params: SpaceParams,
        size: BigUint,
    },
    #[error("invalid space parameters: {0}")]
    InvalidParams(String),
    #[error("invalid state permutation: {0}")]
    InvalidPermutation(String),
    #[error("transition table is not total over {0}")]
    IncompleteTable(SpaceParams),
}

/// Number of states and colors of a machine space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpaceParams {
    states: u32,
    colors: u32,
}

impl SpaceParams {
    pub fn new(states: u32, colors: u32) -> Result<Self, CodecError> {
        if states == 0 {
            return Err(CodecError::InvalidParams("at least one state is required".into()));
        }
        if colors < 2 {
            return Err(CodecError::InvalidParams("at least two colors are required".into()));
        }
        if colors > u8::MAX as u32 + 1 {
            return Err(CodecError::InvalidParams(format!("{colors} colors do not fit a tape cell")));
        }
        Ok(Self { states, colors })
    }

    /// Two-color space with `states` states.
    pub fn binary(states: u32) -> Self {
        Self::new(states, 2).expect("two colors with a positive state count is always valid")
    }

    pub fn states(&self) -> u32 {
        self.states
    }

    pub fn colors(&self) -> u32 {
        self.colors
    }

    /// Number of table entries, `s * k`.
    pub fn slots(&self) -> usize {
        (self.states * self.colors) as usize
    }

    /// Digit radix of a rule number, `2 * s * k`.
    pub fn radix(&self) -> u64 {
        2 * u64::from(self.states) * u64::from(self.colors)
    }

    /// `(2sk)^(sk)`, exactly.
    pub fn space_size(&self) -> BigUint {
        num_traits::pow(BigUint::from(self.radix()), self.slots())
    }

    /// The space size when it fits in a `u64`.
    pub fn space_size_u64(&self) -> Option<u64> {
        self.space_size().to_u64()
    }
}

impl fmt::Display for SpaceParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.states, self.colors)
    }
}

impl FromStr for SpaceParams {
    type Err = CodecError;

    /// Parses `"s,k"`, optionally parenthesised.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim().trim_start_matches('(').trim_end_matches(')');
        let (a, b) = trimmed
            .split_once(',')
            .ok_or_else(|| CodecError::InvalidParams(format!("expected `states,colors`, got `{s}`")))?;
        let parse = |t: &str| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| CodecError::InvalidParams(format!("`{t}`: {e}")))
        };
        Self::new(parse(a)?, parse(b)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Move {
    Left,
    Right,
}

/// One row of a transition table. States are numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transition {
    pub write: u8,
    pub movement: Move,
    pub next_state: u32,
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = match self.movement {
            Move::Left => 'L',
            Move::Right => 'R',
        };
        write!(f, "{}{}{}", self.write, m, self.next_state)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Order {
    Ascending,
    Descending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Major {
    /// Consecutive digits walk the colors of one state.
    State,
    /// Consecutive digits walk the states for one color.
    Color,
}

/// A sub-digit of a packed transition digit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Field {
    NextState,
    Write,
    Move,
}

/// The digit convention of a rule-number codec.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DigitLayout {
    pub state_order: Order,
    pub color_order: Order,
    pub major: Major,
    /// Sub-digit order inside one digit, most significant first.
    pub packing: [Field; 3],
    /// Value of the move sub-digit that means [`Move::Right`].
    pub right_bit: u8,
}

impl DigitLayout {
    /// States ascending, colors descending, state-major; each digit is
    /// `(next_state - 1) * 2k + write * 2 + move` with `move = 1` for Right.
    pub const WOLFRAM: DigitLayout = DigitLayout {
        state_order: Order::Ascending,
        color_order: Order::Descending,
        major: Major::State,
        packing: [Field::NextState, Field::Write, Field::Move],
        right_bit: 1,
    };

    /// Every layout in the parameter family (96 of them).
    pub fn all() -> Vec<DigitLayout> {
        const PACKINGS: [[Field; 3]; 6] = [
            [Field::NextState, Field::Write, Field::Move],
            [Field::NextState, Field::Move, Field::Write],
            [Field::Write, Field::NextState, Field::Move],
            [Field::Write, Field::Move, Field::NextState],
            [Field::Move, Field::NextState, Field::Write],
            [Field::Move, Field::Write, Field::NextState],
        ];
        let orders = [Order::Ascending, Order::Descending];
        let mut out = Vec::with_capacity(96);
        for state_order in orders {
            for color_order in orders {
                for major in [Major::State, Major::Color] {
                    for packing in PACKINGS {
                        for right_bit in [0, 1] {
                            out.push(DigitLayout {
                                state_order,
                                color_order,
                                major,
                                packing,
                                right_bit,
                            });
                        }
                    }
                }
            }
        }
        out
    }

    /// `(state, color)` slot for each digit, most significant digit first.
    pub fn slot_order(&self, params: SpaceParams) -> Vec<(u32, u32)> {
        let ordered = |n: u32, order: Order, base: u32| -> Vec<u32> {
            let mut v: Vec<u32> = (base..base + n).collect();
            if order == Order::Descending {
                v.reverse();
            }
            v
        };
        let states = ordered(params.states, self.state_order, 1);
        let colors = ordered(params.colors, self.color_order, 0);
        let mut slots = Vec::with_capacity(params.slots());
        match self.major {
            Major::State => {
                for &s in &states {
                    for &c in &colors {
                        slots.push((s, c));
                    }
                }
            }
            Major::Color => {
                for &c in &colors {
                    for &s in &states {
                        slots.push((s, c));
                    }
                }
            }
        }
        slots
    }

    fn field_radix(field: Field, params: SpaceParams) -> u64 {
        match field {
            Field::NextState => u64::from(params.states),
            Field::Write => u64::from(params.colors),
            Field::Move => 2,
        }
    }

    pub fn unpack(&self, mut digit: u64, params: SpaceParams) -> Transition {
        let mut next_state = 0;
        let mut write = 0;
        let mut mv = 0;
        for &field in self.packing.iter().rev() {
            let radix = Self::field_radix(field, params);
            let value = digit % radix;
            digit /= radix;
            match field {
                Field::NextState => next_state = value as u32 + 1,
                Field::Write => write = value as u8,
                Field::Move => mv = value as u8,
            }
        }
        Transition {
            write,
            movement: if mv == self.right_bit { Move::Right } else { Move::Left },
            next_state,
        }
    }

    pub fn pack(&self, t: &Transition, params: SpaceParams) -> u64 {
        let mut digit = 0;
        for &field in &self.packing {
            let radix = Self::field_radix(field, params);
            let value = match field {
                Field::NextState => u64::from(t.next_state - 1),
                Field::Write => u64::from(t.write),
                Field::Move => {
                    let is_right = t.movement == Move::Right;
                    u64::from(if is_right { self.right_bit } else { 1 - self.right_bit })
                }
            };
            digit = digit * radix + value;
        }
        digit
    }
}

impl fmt::Display for DigitLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let packing: Vec<&str> = self
            .packing
            .iter()
            .map(|p| match p {
                Field::NextState => "next_state",
                Field::Write => "write",
                Field::Move => "move",
            })
            .collect();
        write!(
            f,
            "states {:?}, colors {:?}, {:?}-major, digit = [{}], move digit {} = Right",
            self.state_order,
            self.color_order,
            self.major,
            packing.join(", "),
            self.right_bit
        )
    }
}

/// A decoded machine: rule number plus its full transition table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct MachineDescriptor {
    params: SpaceParams,
    rule_number: BigUint,
    /// Indexed by `(state - 1) * k + color`.
    table: Vec<Transition>,
}

impl MachineDescriptor {
    /// Builds a descriptor from an explicit table, computing its rule number
    /// under the standard layout.
    pub fn from_table(params: SpaceParams, table: Vec<Transition>) -> Result<Self, CodecError> {
        Self::from_table_with(params, table, &DigitLayout::WOLFRAM)
    }

    pub fn from_table_with(
        params: SpaceParams,
        table: Vec<Transition>,
        layout: &DigitLayout,
    ) -> Result<Self, CodecError> {
        let valid = table.len() == params.slots()
            && table
                .iter()
                .all(|t| u32::from(t.write) < params.colors && (1..=params.states).contains(&t.next_state));
        if !valid {
            return Err(CodecError::IncompleteTable(params));
        }
        let mut m = Self {
            params,
            rule_number: BigUint::zero(),
            table,
        };
        m.rule_number = encode_with(&m, layout);
        Ok(m)
    }

    pub fn params(&self) -> SpaceParams {
        self.params
    }

    pub fn rule_number(&self) -> &BigUint {
        &self.rule_number
    }

    pub fn entry(&self, state: u32, color: u8) -> &Transition {
        &self.table[((state - 1) * self.params.colors + u32::from(color)) as usize]
    }

    pub fn table(&self) -> &[Transition] {
        &self.table
    }
}

impl fmt::Display for MachineDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "rule {} {}:", self.rule_number, self.params)?;
        for s in 1..=self.params.states {
            for c in 0..self.params.colors {
                write!(f, " {s}/{c}->{}", self.entry(s, c as u8))?;
            }
        }
        Ok(())
    }
}

pub fn decode(rule_number: &BigUint, params: SpaceParams) -> Result<MachineDescriptor, CodecError> {
    decode_with(rule_number, params, &DigitLayout::WOLFRAM)
}

pub fn decode_u64(rule_number: u64, params: SpaceParams) -> Result<MachineDescriptor, CodecError> {
    decode(&BigUint::from(rule_number), params)
}

pub fn decode_with(
    rule_number: &BigUint,
    params: SpaceParams,
    layout: &DigitLayout,
) -> Result<MachineDescriptor, CodecError> {
    let size = params.space_size();
    if rule_number >= &size {
        return Err(CodecError::RuleOutOfRange {
            rule: rule_number.clone(),
            params,
            size,
        });
    }
    let radix = BigUint::from(params.radix());
    let slots = layout.slot_order(params);
    let mut table = vec![
        Transition {
            write: 0,
            movement: Move::Left,
            next_state: 1,
        };
        params.slots()
    ];
    let mut rest = rule_number.clone();
    // Least significant digit belongs to the last slot.
    for &(state, color) in slots.iter().rev() {
        let (q, r) = rest.div_rem(&radix);
        let digit = r.to_u64().expect("digit below radix");
        table[((state - 1) * params.colors + color) as usize] = layout.unpack(digit, params);
        rest = q;
    }
    Ok(MachineDescriptor {
        params,
        rule_number: rule_number.clone(),
        table,
    })
}

pub fn encode(machine: &MachineDescriptor) -> BigUint {
    encode_with(machine, &DigitLayout::WOLFRAM)
}

pub fn encode_with(machine: &MachineDescriptor, layout: &DigitLayout) -> BigUint {
    let params = machine.params;
    let radix = BigUint::from(params.radix());
    layout
        .slot_order(params)
        .into_iter()
        .fold(BigUint::zero(), |acc, (state, color)| {
            let t = machine.entry(state, color as u8);
            acc * &radix + BigUint::from(layout.pack(t, params))
        })
}

/// Rule number of the machine obtained by relabeling states through
/// `permutation`, where `permutation[i]` is the new label of state `i + 1`.
/// State 1 must be fixed since it is the start state.
pub fn twin(rule_number: &BigUint, params: SpaceParams, permutation: &[u32]) -> Result<BigUint, CodecError> {
    let s = params.states;
    if permutation.len() != s as usize {
        return Err(CodecError::InvalidPermutation(format!(
            "expected {s} images, got {}",
            permutation.len()
        )));
    }
    let mut seen = vec![false; s as usize];
    for &p in permutation {
        if !(1..=s).contains(&p) || std::mem::replace(&mut seen[(p - 1) as usize], true) {
            return Err(CodecError::InvalidPermutation(format!("{permutation:?} is not a bijection on 1..={s}")));
        }
    }
    if permutation[0] != 1 {
        return Err(CodecError::InvalidPermutation("state 1 must be fixed".into()));
    }
    let machine = decode(rule_number, params)?;
    let relabel = |q: u32| permutation[(q - 1) as usize];
    let mut table = machine.table.clone();
    for state in 1..=s {
        for color in 0..params.colors {
            let t = machine.entry(state, color as u8);
            table[((relabel(state) - 1) * params.colors + color) as usize] = Transition {
                next_state: relabel(t.next_state),
                ..*t
            };
        }
    }
    Ok(MachineDescriptor::from_table(params, table)?.rule_number)
}

/// Permutation swapping states `a` and `b`.
pub fn swap_states(params: SpaceParams, a: u32, b: u32) -> Vec<u32> {
    (1..=params.states)
        .map(|q| if q == a { b } else if q == b { a } else { q })
        .collect()
}

/// All rule numbers of the space, ascending.
pub fn enumerate(params: SpaceParams) -> impl Iterator<Item = BigUint> {
    let size = params.space_size();
    let mut next = BigUint::zero();
    std::iter::from_fn(move || {
        if next >= size {
            return None;
        }
        let out = next.clone();
        next += BigUint::one();
        Some(out)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(n: u64) -> BigUint {
        BigUint::from(n)
    }

    #[test]
    fn space_sizes() {
        assert_eq!(SpaceParams::binary(2).space_size(), b(4096));
        assert_eq!(SpaceParams::binary(3).space_size(), b(2_985_984));
        assert_eq!(SpaceParams::binary(4).space_size(), b(16u64.pow(8)));
        assert_eq!(SpaceParams::binary(4).space_size_u64(), Some(4_294_967_296));
    }

    #[test]
    fn params_parse() {
        assert_eq!("2,2".parse::<SpaceParams>().unwrap(), SpaceParams::binary(2));
        assert_eq!("(3, 2)".parse::<SpaceParams>().unwrap(), SpaceParams::binary(3));
        assert!("0,2".parse::<SpaceParams>().is_err());
        assert!("2,1".parse::<SpaceParams>().is_err());
        assert!("22".parse::<SpaceParams>().is_err());
    }

    #[test]
    fn rule_2506_state_one_blank_entry() {
        let m = decode(&b(2506), SpaceParams::binary(2)).unwrap();
        assert_eq!(
            *m.entry(1, 0),
            Transition {
                write: 1,
                movement: Move::Right,
                next_state: 2
            }
        );
    }

    #[test]
    fn zero_decodes_to_all_zero_digits() {
        let m = decode(&b(0), SpaceParams::binary(2)).unwrap();
        for t in m.table() {
            assert_eq!(
                *t,
                Transition {
                    write: 0,
                    movement: Move::Left,
                    next_state: 1
                }
            );
        }
    }

    #[test]
    fn out_of_range_names_space_size() {
        let err = decode(&b(4096), SpaceParams::binary(2)).unwrap_err();
        assert!(err.to_string().contains("4096"), "{err}");
    }

    #[test]
    fn round_trip_whole_22_space_every_layout() {
        let params = SpaceParams::binary(2);
        for layout in DigitLayout::all() {
            for n in 0..4096u64 {
                let m = decode_with(&b(n), params, &layout).unwrap();
                assert_eq!(encode_with(&m, &layout), b(n));
            }
        }
    }

    #[test]
    fn mutated_entry_changes_rule() {
        let m = decode(&b(378), SpaceParams::binary(2)).unwrap();
        let mut table = m.table().to_vec();
        table[0].write ^= 1;
        let other = MachineDescriptor::from_table(m.params(), table).unwrap();
        assert_ne!(other.rule_number(), m.rule_number());
    }

    #[test]
    fn incomplete_table_rejected() {
        let m = decode(&b(378), SpaceParams::binary(2)).unwrap();
        let mut table = m.table().to_vec();
        table.pop();
        assert!(MachineDescriptor::from_table(m.params(), table).is_err());
    }

    #[test]
    fn twin_pair_from_three_state_space() {
        let p = SpaceParams::binary(3);
        let swap = swap_states(p, 2, 3);
        assert_eq!(twin(&b(599_063), p, &swap).unwrap(), b(666_364));
        assert_eq!(twin(&b(666_364), p, &swap).unwrap(), b(599_063));
        assert_eq!(twin(&b(599_063), p, &[1, 2, 3]).unwrap(), b(599_063));
    }

    #[test]
    fn twin_rejects_bad_permutations() {
        let p = SpaceParams::binary(3);
        assert!(twin(&b(5), p, &[2, 1, 3]).is_err());
        assert!(twin(&b(5), p, &[1, 2, 2]).is_err());
        assert!(twin(&b(5), p, &[1, 2]).is_err());
        assert!(twin(&b(5), p, &[1, 2, 4]).is_err());
    }

    #[test]
    fn enumerate_22() {
        let all: Vec<BigUint> = enumerate(SpaceParams::binary(2)).collect();
        assert_eq!(all.len(), 4096);
        assert_eq!(all[0], b(0));
        assert_eq!(all[4095], b(4095));
    }

    #[test]
    fn layout_family_has_96_distinct_members() {
        let all = DigitLayout::all();
        assert_eq!(all.len(), 96);
        let set: std::collections::HashSet<_> = all.iter().collect();
        assert_eq!(set.len(), 96);
        assert!(all.contains(&DigitLayout::WOLFRAM));
    }
}
