//! Permutations and the step semantics of the three shuffle kinds.
//!
//! A [`Permutation`] is a deck in one-line notation: `slots[p]` is the number
//! of the card in position `p`. Both positions and card numbers are 1-based
//! in every public method.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three shuffles, each made of exactly `n` steps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShuffleKind {
    /// Step `j` swaps card number `j` with a uniformly chosen card.
    CardCyclicTransposition,
    /// Step `j` swaps the contents of position `j` with a uniformly chosen position.
    PositionCyclicTransposition,
    /// Step `j` removes card number `j` and reinserts it at a uniformly chosen position.
    CardCyclicInsertion,
}

impl ShuffleKind {
    pub const ALL: [ShuffleKind; 3] = [
        ShuffleKind::CardCyclicTransposition,
        ShuffleKind::PositionCyclicTransposition,
        ShuffleKind::CardCyclicInsertion,
    ];

    /// Short name used by the CLI and in report provenance.
    pub fn as_str(self) -> &'static str {
        match self {
            ShuffleKind::CardCyclicTransposition => "card",
            ShuffleKind::PositionCyclicTransposition => "pos",
            ShuffleKind::CardCyclicInsertion => "insertion",
        }
    }

    pub fn is_transposition(self) -> bool {
        !matches!(self, ShuffleKind::CardCyclicInsertion)
    }
}

impl fmt::Display for ShuffleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShuffleKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "card" => Ok(ShuffleKind::CardCyclicTransposition),
            "pos" | "position" => Ok(ShuffleKind::PositionCyclicTransposition),
            "insertion" => Ok(ShuffleKind::CardCyclicInsertion),
            other => Err(Error::Parse(format!("unknown shuffle kind {other:?}"))),
        }
    }
}

/// A deck of `n` cards in one-line notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    slots: Vec<u32>,
}

impl Permutation {
    /// Builds a permutation from one-line notation, checking it is a bijection on `1..=n`.
    pub fn new(slots: Vec<u32>) -> Result<Self> {
        let n = slots.len();
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        let mut seen = vec![false; n];
        for &c in &slots {
            let idx = (c as usize).wrapping_sub(1);
            if idx >= n || seen[idx] {
                return Err(Error::InvalidPermutation(format!(
                    "{} is not a bijection on 1..={n}",
                    join(&slots)
                )));
            }
            seen[idx] = true;
        }
        Ok(Permutation { slots })
    }

    pub(crate) fn from_slots_unchecked(slots: Vec<u32>) -> Self {
        debug_assert!(Permutation::new(slots.clone()).is_ok());
        Permutation { slots }
    }

    pub fn identity(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        Ok(Permutation {
            slots: (1..=n as u32).collect(),
        })
    }

    /// The permutation that moves every card one position to the right and
    /// the last card to the front: `(n, 1, 2, ..., n-1)`.
    pub fn right_cycle(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        let n = n as u32;
        Ok(Permutation {
            slots: std::iter::once(n).chain(1..n).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.slots.len()
    }

    pub fn slots(&self) -> &[u32] {
        &self.slots
    }

    /// Card number in 1-based position `p`.
    pub fn card_at(&self, p: usize) -> u32 {
        self.slots[p - 1]
    }

    /// 1-based position occupied by `card`.
    pub fn position_of(&self, card: u32) -> usize {
        self.slots.iter().position(|&c| c == card).expect("card in deck") + 1
    }

    /// `result[c]` is the position of card `c`.
    pub fn invert(&self) -> Permutation {
        let mut inv = vec![0u32; self.n()];
        for (p, &c) in self.slots.iter().enumerate() {
            inv[c as usize - 1] = p as u32 + 1;
        }
        Permutation { slots: inv }
    }

    pub fn fixed_points(&self) -> usize {
        self.slots
            .iter()
            .enumerate()
            .filter(|&(p, &c)| c as usize == p + 1)
            .count()
    }

    pub fn is_derangement(&self) -> bool {
        self.fixed_points() == 0
    }

    pub fn is_identity(&self) -> bool {
        self.fixed_points() == self.n()
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.slots))
    }
}

impl FromStr for Permutation {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Permutation::new(parse_list(s)?)
    }
}

/// The `n` uniform picks that drive one pass of a shuffle; `choices[j-1]`
/// is consumed on step `j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ChoiceSequence {
    choices: Vec<u32>,
}

impl ChoiceSequence {
    pub fn new(choices: Vec<u32>) -> Result<Self> {
        let n = choices.len();
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        for &k in &choices {
            if k == 0 || k as usize > n {
                return Err(Error::IndexOutOfRange {
                    what: "choice",
                    value: k as usize,
                    n,
                });
            }
        }
        Ok(ChoiceSequence { choices })
    }

    /// The choices drawn from stream `stream` of the generator keyed by `seed`.
    pub fn from_stream(n: usize, seed: u64, stream: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        let mut rng = stream_rng(seed, stream);
        let choices = (0..n).map(|_| rng.random_range(1..=n as u32)).collect();
        Ok(ChoiceSequence { choices })
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    pub fn choices(&self) -> &[u32] {
        &self.choices
    }
}

impl fmt::Display for ChoiceSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&join(&self.choices))
    }
}

impl FromStr for ChoiceSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChoiceSequence::new(parse_list(s)?)
    }
}

/// Counter-based generator: every `(seed, stream)` pair addresses an
/// independent ChaCha8 stream, so sample `i` never depends on how many
/// samples were drawn before it or on which worker draws it.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Applies step `j` of `kind` with choice `k` to `state`.
pub fn apply_step(kind: ShuffleKind, state: &Permutation, j: usize, k: usize) -> Result<Permutation> {
    let n = state.n();
    check_index("j", j, n)?;
    check_index("k", k, n)?;
    let mut deck = Deck::from_permutation(state);
    deck.step(kind, j - 1, k - 1);
    Ok(deck.into_permutation())
}

/// Runs a full pass of `kind` on the identity deck of size `n`.
pub fn run_shuffle(kind: ShuffleKind, n: usize, choices: &ChoiceSequence) -> Result<Permutation> {
    run_shuffle_from(kind, &Permutation::identity(n)?, choices)
}

/// Runs a full pass of `kind` starting from an arbitrary deck.
pub fn run_shuffle_from(kind: ShuffleKind, start: &Permutation, choices: &ChoiceSequence) -> Result<Permutation> {
    let n = start.n();
    if choices.len() != n {
        return Err(Error::LengthMismatch { len: choices.len(), n });
    }
    let mut deck = Deck::from_permutation(start);
    for (j, &k) in choices.choices().iter().enumerate() {
        deck.step(kind, j, k as usize - 1);
    }
    Ok(deck.into_permutation())
}

/// One seeded shuffle; identical `(kind, n, seed)` always gives the same deck.
pub fn sample(kind: ShuffleKind, n: usize, seed: u64) -> Result<Permutation> {
    sample_stream(kind, n, seed, 0)
}

/// The shuffle driven by stream `stream` of the generator keyed by `seed`.
pub fn sample_stream(kind: ShuffleKind, n: usize, seed: u64, stream: u64) -> Result<Permutation> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    let mut deck = Deck::identity(n);
    deck.shuffle_from_stream(kind, seed, stream);
    Ok(deck.into_permutation())
}

fn check_index(what: &'static str, value: usize, n: usize) -> Result<()> {
    if value == 0 || value > n {
        return Err(Error::IndexOutOfRange { what, value, n });
    }
    Ok(())
}

/// Mutable working deck with 0-based cards and positions, keeping the
/// inverse in sync so every transposition step is O(1).
#[derive(Debug, Clone)]
pub(crate) struct Deck {
    slots: Vec<u32>,
    pos: Vec<u32>,
}

impl Deck {
    pub(crate) fn identity(n: usize) -> Self {
        let slots: Vec<u32> = (0..n as u32).collect();
        Deck { pos: slots.clone(), slots }
    }

    pub(crate) fn from_permutation(p: &Permutation) -> Self {
        let slots: Vec<u32> = p.slots.iter().map(|&c| c - 1).collect();
        let mut pos = vec![0u32; slots.len()];
        for (i, &c) in slots.iter().enumerate() {
            pos[c as usize] = i as u32;
        }
        Deck { slots, pos }
    }

    pub(crate) fn reset(&mut self) {
        for (i, (s, p)) in self.slots.iter_mut().zip(self.pos.iter_mut()).enumerate() {
            *s = i as u32;
            *p = i as u32;
        }
    }

    pub(crate) fn n(&self) -> usize {
        self.slots.len()
    }

    /// 0-based card in 0-based position.
    pub(crate) fn slots(&self) -> &[u32] {
        &self.slots
    }

    /// 0-based position of 0-based card.
    pub(crate) fn position(&self, card: usize) -> usize {
        self.pos[card] as usize
    }

    pub(crate) fn fixed_points(&self) -> usize {
        self.slots.iter().enumerate().filter(|&(i, &c)| c as usize == i).count()
    }

    fn swap_positions(&mut self, p: usize, q: usize) {
        self.slots.swap(p, q);
        self.pos[self.slots[p] as usize] = p as u32;
        self.pos[self.slots[q] as usize] = q as u32;
    }

    /// Step `j` (0-based) with choice `k` (0-based).
    pub(crate) fn step(&mut self, kind: ShuffleKind, j: usize, k: usize) {
        match kind {
            ShuffleKind::CardCyclicTransposition => {
                let (p, q) = (self.pos[j] as usize, self.pos[k] as usize);
                self.swap_positions(p, q);
            }
            ShuffleKind::PositionCyclicTransposition => self.swap_positions(j, k),
            ShuffleKind::CardCyclicInsertion => {
                let from = self.pos[j] as usize;
                if from < k {
                    self.slots.copy_within(from + 1..=k, from);
                } else if from > k {
                    self.slots.copy_within(k..from, k + 1);
                }
                self.slots[k] = j as u32;
                let (lo, hi) = (from.min(k), from.max(k));
                for p in lo..=hi {
                    self.pos[self.slots[p] as usize] = p as u32;
                }
            }
        }
    }

    pub(crate) fn shuffle_from_stream(&mut self, kind: ShuffleKind, seed: u64, stream: u64) {
        let n = self.n();
        let mut rng = stream_rng(seed, stream);
        for j in 0..n {
            let k = rng.random_range(1..=n as u32) as usize - 1;
            self.step(kind, j, k);
        }
    }

    /// Replaces the deck by a uniform permutation (Fisher-Yates).
    pub(crate) fn shuffle_uniform(&mut self, seed: u64, stream: u64) {
        let mut rng = stream_rng(seed, stream);
        self.slots.shuffle(&mut rng);
        for (i, &c) in self.slots.iter().enumerate() {
            self.pos[c as usize] = i as u32;
        }
    }

    pub(crate) fn into_permutation(self) -> Permutation {
        Permutation {
            slots: self.slots.into_iter().map(|c| c + 1).collect(),
        }
    }
}

fn join(values: &[u32]) -> String {
    let mut s = String::with_capacity(values.len() * 3);
    for (i, v) in values.iter().enumerate() {
        if i > 0 {
            s.push(',');
        }
        s.push_str(&v.to_string());
    }
    s
}

fn parse_list(s: &str) -> Result<Vec<u32>> {
    s.trim()
        .split(',')
        .map(|t| {
            t.trim()
                .parse::<u32>()
                .map_err(|e| Error::Parse(format!("{t:?} in {s:?}: {e}")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    use ShuffleKind::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    fn c(s: &str) -> ChoiceSequence {
        s.parse().unwrap()
    }

    #[test]
    fn identity_examples() {
        assert_eq!(Permutation::identity(3).unwrap(), p("1,2,3"));
        assert_eq!(Permutation::identity(1).unwrap(), p("1"));
        let id5 = Permutation::identity(5).unwrap();
        assert_eq!(id5.invert(), id5);
        assert_eq!(Permutation::identity(0), Err(Error::InvalidSize(0)));
    }

    #[test]
    fn apply_step_examples() {
        assert_eq!(apply_step(CardCyclicTransposition, &p("1,2"), 1, 2).unwrap(), p("2,1"));
        assert_eq!(apply_step(PositionCyclicTransposition, &p("2,1,3"), 1, 3).unwrap(), p("3,1,2"));
        assert_eq!(apply_step(CardCyclicTransposition, &p("2,1,3"), 2, 3).unwrap(), p("3,1,2"));
    }

    #[test]
    fn apply_step_no_op_choices() {
        let s = p("3,1,2");
        assert_eq!(apply_step(CardCyclicTransposition, &s, 2, 2).unwrap(), s);
        assert_eq!(apply_step(PositionCyclicTransposition, &s, 3, 3).unwrap(), s);
        // card 1 sits in position 2 already
        assert_eq!(apply_step(CardCyclicInsertion, &s, 1, 2).unwrap(), s);
    }

    #[test]
    fn insertion_step_places_card_at_k() {
        let s = p("1,2,3,4");
        assert_eq!(apply_step(CardCyclicInsertion, &s, 1, 3).unwrap(), p("2,3,1,4"));
        assert_eq!(apply_step(CardCyclicInsertion, &s, 4, 1).unwrap(), p("4,1,2,3"));
        assert_eq!(apply_step(CardCyclicInsertion, &p("2,3,1,4"), 3, 4).unwrap(), p("2,1,4,3"));
    }

    #[test]
    fn apply_step_rejects_out_of_range() {
        let s = p("1,2,3");
        assert!(matches!(
            apply_step(CardCyclicTransposition, &s, 0, 1),
            Err(Error::IndexOutOfRange { what: "j", .. })
        ));
        assert!(matches!(
            apply_step(PositionCyclicTransposition, &s, 1, 4),
            Err(Error::IndexOutOfRange { what: "k", .. })
        ));
    }

    #[test]
    fn run_shuffle_examples() {
        assert_eq!(run_shuffle(CardCyclicTransposition, 2, &c("1,2")).unwrap(), p("1,2"));
        assert_eq!(run_shuffle(CardCyclicTransposition, 2, &c("1,1")).unwrap(), p("2,1"));
        for kind in ShuffleKind::ALL {
            assert_eq!(run_shuffle(kind, 1, &c("1")).unwrap(), p("1"));
        }
        assert_eq!(
            run_shuffle(CardCyclicTransposition, 3, &c("1,2")),
            Err(Error::LengthMismatch { len: 2, n: 3 })
        );
    }

    #[test]
    fn n2_hand_trace() {
        // all four choice sequences at n = 2
        let expect = [("1,1", "2,1"), ("1,2", "1,2"), ("2,1", "1,2"), ("2,2", "2,1")];
        for (cs, out) in expect {
            assert_eq!(run_shuffle(CardCyclicTransposition, 2, &c(cs)).unwrap(), p(out), "{cs}");
        }
        let expect_pos = [("1,1", "2,1"), ("1,2", "1,2"), ("2,1", "1,2"), ("2,2", "2,1")];
        for (cs, out) in expect_pos {
            assert_eq!(run_shuffle(PositionCyclicTransposition, 2, &c(cs)).unwrap(), p(out), "{cs}");
        }
    }

    #[test]
    fn invert_examples() {
        assert_eq!(p("2,3,1").invert(), p("3,1,2"));
        assert_eq!(p("2,1,3").invert(), p("2,1,3"));
    }

    #[test]
    fn fixed_point_examples() {
        assert_eq!(Permutation::identity(3).unwrap().fixed_points(), 3);
        assert_eq!(p("2,1,3").fixed_points(), 1);
        assert_eq!(p("2,3,1").fixed_points(), 0);
        assert!(p("2,3,1").is_derangement());
    }

    #[test]
    fn right_cycle_shape() {
        assert_eq!(Permutation::right_cycle(3).unwrap(), p("3,1,2"));
        assert_eq!(Permutation::right_cycle(1).unwrap(), p("1"));
    }

    #[test]
    fn parse_rejects_non_bijection() {
        assert!("1,1,2".parse::<Permutation>().is_err());
        assert!("0,1".parse::<Permutation>().is_err());
        assert!("1,x".parse::<Permutation>().is_err());
        assert!("1,3".parse::<ChoiceSequence>().is_err());
        assert_eq!("2, 3,1".parse::<Permutation>().unwrap().to_string(), "2,3,1");
    }

    #[test]
    fn sample_is_deterministic() {
        for kind in ShuffleKind::ALL {
            let a = sample(kind, 17, 42).unwrap();
            let b = sample(kind, 17, 42).unwrap();
            assert_eq!(a, b);
            assert_eq!(sample(kind, 1, 99).unwrap(), p("1"));
        }
    }

    #[test]
    fn sample_equals_run_shuffle_of_stream_choices() {
        for kind in ShuffleKind::ALL {
            for stream in 0..20 {
                let cs = ChoiceSequence::from_stream(9, 7, stream).unwrap();
                assert_eq!(
                    sample_stream(kind, 9, 7, stream).unwrap(),
                    run_shuffle(kind, 9, &cs).unwrap()
                );
            }
        }
    }

    #[test]
    fn sample_n2_frequency() {
        // the law at n = 2 is exactly 1/2 on each deck
        let trials = 1_000_000u64;
        let swapped = (0..trials)
            .filter(|&seed| sample(CardCyclicTransposition, 2, seed).unwrap().slots()[0] == 2)
            .count() as f64;
        let phat = swapped / trials as f64;
        let sigma = (0.25 / trials as f64).sqrt();
        assert!((phat - 0.5).abs() <= 3.0 * sigma, "phat = {phat}");
    }

    fn kind_strategy() -> impl Strategy<Value = ShuffleKind> {
        prop_oneof![
            Just(CardCyclicTransposition),
            Just(PositionCyclicTransposition),
            Just(CardCyclicInsertion)
        ]
    }

    fn choices_strategy() -> impl Strategy<Value = Vec<u32>> {
        (1usize..40).prop_flat_map(|n| proptest::collection::vec(1..=n as u32, n))
    }

    proptest! {
        #[test]
        fn run_shuffle_is_bijection(kind in kind_strategy(), cs in choices_strategy()) {
            let n = cs.len();
            let out = run_shuffle(kind, n, &ChoiceSequence::new(cs).unwrap()).unwrap();
            prop_assert!(Permutation::new(out.slots().to_vec()).is_ok());
            prop_assert_eq!(out.invert().invert(), out);
        }

        #[test]
        fn transposition_step_is_involution(cs in choices_strategy(), j in 1usize..40, k in 1usize..40) {
            let n = cs.len();
            let (j, k) = ((j - 1) % n + 1, (k - 1) % n + 1);
            let start = run_shuffle(PositionCyclicTransposition, n, &ChoiceSequence::new(cs).unwrap()).unwrap();
            for kind in [CardCyclicTransposition, PositionCyclicTransposition] {
                let once = apply_step(kind, &start, j, k).unwrap();
                prop_assert_eq!(apply_step(kind, &once, j, k).unwrap(), start.clone());
            }
        }

        #[test]
        fn no_op_choices_give_identity(n in 1usize..60) {
            let cs = ChoiceSequence::new((1..=n as u32).collect()).unwrap();
            let id = Permutation::identity(n).unwrap();
            prop_assert_eq!(run_shuffle(CardCyclicTransposition, n, &cs).unwrap(), id.clone());
            prop_assert_eq!(run_shuffle(PositionCyclicTransposition, n, &cs).unwrap(), id);
        }

        #[test]
        fn display_parse_round_trip(kind in kind_strategy(), cs in choices_strategy()) {
            let n = cs.len();
            let c = ChoiceSequence::new(cs).unwrap();
            prop_assert_eq!(c.to_string().parse::<ChoiceSequence>().unwrap(), c.clone());
            let out = run_shuffle(kind, n, &c).unwrap();
            prop_assert_eq!(out.to_string().parse::<Permutation>().unwrap(), out);
        }
    }
}
