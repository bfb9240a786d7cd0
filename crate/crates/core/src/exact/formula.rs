//! Closed-form single-card marginals of the two transposition shuffles.
//!
//! For the card cyclic shuffle started at the identity and `j != a`, the
//! probability that card `j` finishes in position `a` is
//!
//! ```text
//! (1/n)(1-1/n)^(n-j) + (1/n)(1-1/n)^(n-1) [j < a]
//!   + sum_{m=(j-a)^+ + 1}^{n-a} (1-1/n)^(n-m-1) (1/n)^(m+1) C(n-a, m)
//!   + sum_{m=1}^{(j-a)^+}       (1-1/n)^(n-m-1) (1/n)^(m+1) sum_{r=j+1}^{n} C(r-1-a, m-1)
//! ```
//!
//! with empty sums vanishing. The position cyclic shuffle has the same
//! expression with `j` and `a` exchanged. The inner sum over `r` collapses by
//! the hockey-stick identity to `C(n-a, m) - C(j-a, m)`.

use crate::error::{Error, Result};
use crate::exact::table::MarginalMatrix;
use crate::par;
use crate::perm::ShuffleKind;

/// Which tail of a binomial law.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tail {
    /// `P(X >= k)`
    Upper,
    /// `P(X <= k)`
    Lower,
}

/// `P(X >= k)` or `P(X <= k)` for `X ~ Bin(trials, q)`.
///
/// The tail that does not contain the mean is summed directly, smallest
/// terms first; the other one is taken as its complement.
pub fn binomial_tail(trials: u64, q: f64, k: i64, side: Tail) -> Result<f64> {
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("binomial probability {q} outside [0, 1]")));
    }
    let nt = trials as i64;
    // reduce everything to an upper tail P(X >= k)
    let (k, complement) = match side {
        Tail::Upper => (k, false),
        Tail::Lower => (k + 1, true),
    };
    let upper = if k <= 0 {
        1.0
    } else if k > nt || q == 0.0 {
        0.0
    } else if q == 1.0 {
        1.0
    } else if (k as f64) > trials as f64 * q {
        upper_tail_direct(trials, q, k as u64)
    } else {
        1.0 - lower_tail_direct(trials, q, k as u64 - 1)
    };
    Ok(if complement { 1.0 - upper } else { upper })
}

fn ln_pmf_table(trials: u64, q: f64) -> impl Iterator<Item = f64> {
    let (lq, lp) = (q.ln(), (-q).ln_1p());
    let mut ln_choose = 0.0f64;
    (0..=trials).map(move |m| {
        if m > 0 {
            ln_choose += ((trials - m + 1) as f64 / m as f64).ln();
        }
        ln_choose + m as f64 * lq + (trials - m) as f64 * lp
    })
}

fn upper_tail_direct(trials: u64, q: f64, k: u64) -> f64 {
    let terms: Vec<f64> = ln_pmf_table(trials, q).skip(k as usize).map(f64::exp).collect();
    terms.iter().rev().sum()
}

fn lower_tail_direct(trials: u64, q: f64, k: u64) -> f64 {
    ln_pmf_table(trials, q).take(k as usize + 1).map(f64::exp).sum()
}

fn check_kind(kind: ShuffleKind) -> Result<()> {
    if kind.is_transposition() {
        Ok(())
    } else {
        Err(Error::UnsupportedKind("the insertion shuffle"))
    }
}

fn check_offdiag(n: usize, j: usize, a: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    for (what, v) in [("j", j), ("a", a)] {
        if v == 0 || v > n {
            return Err(Error::IndexOutOfRange { what, value: v, n });
        }
    }
    if j == a {
        return Err(Error::DiagonalEntry(j));
    }
    Ok(())
}

/// Orients `(j, a)` so that the card cyclic formula applies.
fn card_frame(kind: ShuffleKind, j: usize, a: usize) -> (usize, usize) {
    match kind {
        ShuffleKind::PositionCyclicTransposition => (a, j),
        _ => (j, a),
    }
}

/// Probability that card `j` ends in position `a` (`j != a`) after one pass
/// of `kind` from the identity.
pub fn exact_offdiag_marginal(kind: ShuffleKind, n: usize, j: usize, a: usize) -> Result<f64> {
    check_kind(kind)?;
    check_offdiag(n, j, a)?;
    let (j, a) = card_frame(kind, j, a);
    Ok(card_offdiag(n, j, a))
}

/// The card cyclic formula with the hockey-stick collapse. Every term is a
/// joint factor `(1-1/n)^(n-m-1) (1/n)^(m+1) C(N, m)` built by incremental
/// multiplication, so no binomial coefficient is ever materialised.
fn card_offdiag(n: usize, j: usize, a: usize) -> f64 {
    let t = 1.0 / n as f64;
    let q = 1.0 - t;
    let ratio = t / q;
    let mut terms = Vec::with_capacity(n + 2);
    terms.push(t * q.powi((n - j) as i32));
    if j < a {
        terms.push(t * q.powi(n as i32 - 1));
    }
    let d = j.saturating_sub(a);
    let wide = n - a;
    let narrow = d;
    let base = t * q.powi(n as i32 - 1);
    let (mut w_wide, mut w_narrow) = (base, base);
    for m in 1..=wide {
        let mf = m as f64;
        w_wide *= (wide - m + 1) as f64 / mf * ratio;
        if m <= d {
            w_narrow *= (narrow - m + 1) as f64 / mf * ratio;
            terms.push(w_wide - w_narrow);
        } else {
            if w_wide == 0.0 {
                break;
            }
            terms.push(w_wide);
        }
    }
    sum_smallest_first(terms)
}

fn sum_smallest_first(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|x, y| x.abs().total_cmp(&y.abs()));
    terms.into_iter().sum()
}

/// Second algebraic route: the same marginal written through binomial tails,
/// `(1-1/n)^(a-1) (1/n) P(Bin(n-a, 1/n) >= (j-a)^+ + 1)` for the first sum and
/// `sum_r (1/n^2) (1-1/n)^(n-r+a-1) P(Bin(r-1-a, 1/n) <= (j-a)^+ - 1)` for the second.
/// O(n^2); used to cross-check [`exact_offdiag_marginal`].
pub fn offdiag_marginal_via_tails(kind: ShuffleKind, n: usize, j: usize, a: usize) -> Result<f64> {
    check_kind(kind)?;
    check_offdiag(n, j, a)?;
    let (j, a) = card_frame(kind, j, a);
    let t = 1.0 / n as f64;
    let q = 1.0 - t;
    let d = j.saturating_sub(a) as i64;
    let mut terms = vec![t * q.powi((n - j) as i32)];
    if j < a {
        terms.push(t * q.powi(n as i32 - 1));
    }
    terms.push(q.powi(a as i32 - 1) * t * binomial_tail((n - a) as u64, t, d + 1, Tail::Upper)?);
    if d >= 1 {
        for r in j + 1..=n {
            let tail = binomial_tail((r - 1 - a) as u64, t, d - 1, Tail::Lower)?;
            terms.push(t * t * q.powi((n - r + a - 1) as i32) * tail);
        }
    }
    Ok(sum_smallest_first(terms))
}

/// The full `n x n` marginal matrix; diagonal entries complete each row to 1.
pub fn exact_marginal_matrix(kind: ShuffleKind, n: usize) -> Result<MarginalMatrix> {
    check_kind(kind)?;
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    let rows: Vec<usize> = (1..=n).collect();
    let rows = par::map_collect(&rows, |&j| {
        let mut row: Vec<f64> = (1..=n)
            .map(|a| if a == j { 0.0 } else { exact_offdiag_marginal(kind, n, j, a).expect("validated") })
            .collect();
        let off: f64 = sum_smallest_first(row.clone());
        row[j - 1] = 1.0 - off;
        row
    });
    Ok(MarginalMatrix::from_rows(n, rows.into_iter().flatten().collect()))
}

/// The `n`-th Catalan number `C(2n, n) / (n + 1)`.
pub fn catalan(n: u32) -> Result<u64> {
    if n == 0 {
        return Err(Error::InvalidSize(0));
    }
    // C_k = C_{k-1} * 2(2k - 1) / (k + 1), exact at every step
    let mut c: u128 = 1;
    for k in 1..=n as u128 {
        c = c * 2 * (2 * k - 1) / (k + 1);
        if c > u64::MAX as u128 {
            return Err(Error::InvalidArgument(format!("Catalan number C_{n} overflows 64 bits")));
        }
    }
    Ok(c as u64)
}
