//! Exact laws on `S_n`: enumeration of every choice sequence, and
//! step-by-step evolution of the distribution.

use crate::error::{Error, Result};
use crate::exact::rank;
use crate::exact::table::DistributionTable;
use crate::par;
use crate::perm::{Deck, ShuffleKind};

pub const BRUTE_FORCE_MAX_N: usize = 8;
pub const EVOLVE_MAX_N: usize = 11;

/// Runs the shuffle on all `n^n` equally likely choice sequences and counts
/// the outcomes. Sequences are visited in odometer order (last choice
/// fastest) in contiguous blocks that are merged by integer addition.
pub fn brute_force_distribution(kind: ShuffleKind, n: usize) -> Result<DistributionTable> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::ResourceLimit {
            engine: "brute_force_distribution",
            max: BRUTE_FORCE_MAX_N,
            n,
        });
    }
    let nf = rank::factorials(n)[n] as usize;
    let total = (n as u64).pow(n as u32);
    let block = (n as u64).pow(n.saturating_sub(2) as u32);
    let weights = rank::rank_weights(n);
    let counts = par::map_reduce_blocks(
        0..total,
        block,
        Vec::new(),
        |range| {
            let mut counts = vec![0u64; nf];
            let mut digits = odometer_digits(n, range.start);
            let mut deck = Deck::identity(n);
            for _ in range {
                deck.reset();
                for (j, &k) in digits.iter().enumerate() {
                    deck.step(kind, j, k as usize);
                }
                counts[rank::rank_with(deck.slots(), &weights) as usize] += 1;
                odometer_advance(&mut digits, n as u32);
            }
            counts
        },
        merge_counts,
    );
    DistributionTable::from_rank_counts(n, counts, total)
}

fn merge_counts(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    if a.is_empty() {
        return b;
    }
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// 0-based choices of sequence number `index`, most significant first.
fn odometer_digits(n: usize, mut index: u64) -> Vec<u32> {
    let mut digits = vec![0u32; n];
    for d in digits.iter_mut().rev() {
        *d = (index % n as u64) as u32;
        index /= n as u64;
    }
    digits
}

fn odometer_advance(digits: &mut [u32], base: u32) {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < base {
            return;
        }
        *d = 0;
    }
}

/// Pushes the exact law through steps `1..=n`. Each step is computed in
/// pull form: `next[pi] = sum over the n preimages of pi under that step`,
/// so targets are independent and can be filled in parallel.
pub fn evolve_distribution(kind: ShuffleKind, n: usize) -> Result<DistributionTable> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    if n > EVOLVE_MAX_N {
        return Err(Error::ResourceLimit {
            engine: "evolve_distribution",
            max: EVOLVE_MAX_N,
            n,
        });
    }
    let nf = rank::factorials(n)[n] as usize;
    let weights = rank::rank_weights(n);
    let mut cur = vec![0u64; nf];
    cur[0] = 1;
    let mut next = vec![0u64; nf];
    let chunk = (nf / 256).max(64);
    for step in 0..n {
        let src = &cur;
        par::fill_indexed(&mut next, chunk, |base, out| {
            pull_chunk(kind, n, step, &weights, src, base, out);
        });
        std::mem::swap(&mut cur, &mut next);
    }
    DistributionTable::from_rank_counts(n, cur, (n as u64).pow(n as u32))
}

fn pull_chunk(kind: ShuffleKind, n: usize, step: usize, weights: &[u64], src: &[u64], base: usize, out: &mut [u64]) {
    let mut s = rank::unrank(n, base as u64);
    let mut code = vec![0u32; n];
    let mut moved = vec![0u32; n];
    for (offset, slot) in out.iter_mut().enumerate() {
        if offset > 0 {
            rank::next_permutation(&mut s);
        }
        let r = (base + offset) as i64;
        let mut acc = 0u64;
        match kind {
            ShuffleKind::PositionCyclicTransposition => {
                rank::lehmer(&s, &mut code);
                for k in 0..n {
                    acc += src[(r + rank::swap_rank_delta(&s, &code, weights, step, k)) as usize];
                }
            }
            ShuffleKind::CardCyclicTransposition => {
                rank::lehmer(&s, &mut code);
                let p = s.iter().position(|&c| c as usize == step).unwrap();
                for q in 0..n {
                    acc += src[(r + rank::swap_rank_delta(&s, &code, weights, p, q)) as usize];
                }
            }
            ShuffleKind::CardCyclicInsertion => {
                // preimages: card `step` moved from its current slot to any slot m
                let p = s.iter().position(|&c| c as usize == step).unwrap();
                for m in 0..n {
                    moved.copy_from_slice(&s);
                    if p < m {
                        moved.copy_within(p + 1..=m, p);
                    } else if p > m {
                        moved.copy_within(m..p, m + 1);
                    }
                    moved[m] = step as u32;
                    acc += src[rank::rank_with(&moved, weights) as usize];
                }
            }
        }
        *slot = acc;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::Permutation;
    use ShuffleKind::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn odometer_order() {
        assert_eq!(odometer_digits(3, 0), vec![0, 0, 0]);
        assert_eq!(odometer_digits(3, 5), vec![0, 1, 2]);
        let mut d = vec![0, 2, 2];
        odometer_advance(&mut d, 3);
        assert_eq!(d, vec![1, 0, 0]);
    }

    #[test]
    fn n2_tables() {
        for kind in [CardCyclicTransposition, PositionCyclicTransposition] {
            let d = brute_force_distribution(kind, 2).unwrap();
            assert_eq!(d.denominator(), 4);
            assert_eq!(d.count(&p("1,2")), 2);
            assert_eq!(d.count(&p("2,1")), 2);
            assert_eq!(evolve_distribution(kind, 2).unwrap(), d);
        }
    }

    #[test]
    fn n1_point_mass() {
        for kind in ShuffleKind::ALL {
            for d in [brute_force_distribution(kind, 1).unwrap(), evolve_distribution(kind, 1).unwrap()] {
                assert_eq!(d.denominator(), 1);
                assert_eq!(d.count(&p("1")), 1);
            }
        }
    }

    #[test]
    fn guards() {
        assert!(brute_force_distribution(CardCyclicTransposition, 9).unwrap_err().is_resource_limit());
        assert!(evolve_distribution(PositionCyclicTransposition, 12).unwrap_err().is_resource_limit());
        assert_eq!(brute_force_distribution(CardCyclicTransposition, 0), Err(Error::InvalidSize(0)));
    }

    #[test]
    fn engines_agree_small() {
        for kind in ShuffleKind::ALL {
            for n in 2..=5 {
                assert_eq!(
                    evolve_distribution(kind, n).unwrap(),
                    brute_force_distribution(kind, n).unwrap(),
                    "{kind} n={n}"
                );
            }
        }
    }

    #[test]
    fn block_partition_does_not_change_result() {
        let a = brute_force_distribution(PositionCyclicTransposition, 5).unwrap();
        let b = par::sequential(|| brute_force_distribution(PositionCyclicTransposition, 5).unwrap());
        let c = par::with_threads(Some(3), || brute_force_distribution(PositionCyclicTransposition, 5).unwrap());
        assert_eq!(a, b);
        assert_eq!(a, c);
    }
}
