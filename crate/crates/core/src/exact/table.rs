use std::cmp::Ordering;
use std::fmt::{self, Write as _};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::rank;
use crate::perm::Permutation;

/// `entries[j][a]` = P(card `j` ends in position `a`); stored row-major, 1-based accessors.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalMatrix {
    n: usize,
    entries: Vec<f64>,
}

impl MarginalMatrix {
    pub(crate) fn from_rows(n: usize, entries: Vec<f64>) -> Self {
        assert_eq!(entries.len(), n * n);
        MarginalMatrix { n, entries }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, j: usize, a: usize) -> f64 {
        self.entries[(j - 1) * self.n + (a - 1)]
    }

    pub fn row(&self, j: usize) -> &[f64] {
        &self.entries[(j - 1) * self.n..j * self.n]
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    pub fn transpose(&self) -> MarginalMatrix {
        let n = self.n;
        let mut t = vec![0.0; n * n];
        for j in 0..n {
            for a in 0..n {
                t[a * n + j] = self.entries[j * n + a];
            }
        }
        MarginalMatrix { n, entries: t }
    }

    /// Largest deviation of any row or column sum from 1.
    pub fn max_stochastic_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0f64;
        for i in 0..n {
            let row: f64 = (0..n).map(|a| self.entries[i * n + a]).sum();
            let col: f64 = (0..n).map(|j| self.entries[j * n + i]).sum();
            worst = worst.max((row - 1.0).abs()).max((col - 1.0).abs());
        }
        worst
    }

    /// Entrywise sup-distance; `None` when the sizes differ.
    pub fn max_abs_diff(&self, other: &MarginalMatrix) -> Option<f64> {
        (self.n == other.n).then(|| {
            self.entries
                .iter()
                .zip(&other.entries)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max)
        })
    }

    /// CSV with header `j\a,1,2,...,n`, one row per card.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("j\\a");
        for a in 1..=self.n {
            write!(s, ",{a}").unwrap();
        }
        s.push('\n');
        for j in 1..=self.n {
            write!(s, "{j}").unwrap();
            for &v in self.row(j) {
                write!(s, ",{}", crate::cli::fmt_real(v)).unwrap();
            }
            s.push('\n');
        }
        s
    }
}

/// An exact probability `count / denominator`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ExactProb {
    pub count: u64,
    pub denominator: u64,
}

impl ExactProb {
    pub fn new(count: u64, denominator: u64) -> Self {
        ExactProb { count, denominator }
    }

    pub fn to_f64(self) -> f64 {
        self.count as f64 / self.denominator as f64
    }
}

impl PartialEq for ExactProb {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for ExactProb {}

impl PartialOrd for ExactProb {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactProb {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.count as u128 * other.denominator as u128).cmp(&(other.count as u128 * self.denominator as u128))
    }
}

impl fmt::Display for ExactProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.count, self.denominator)
    }
}

/// An exact law on `S_n`: integer counts indexed by lexicographic rank over
/// a common denominator (`n^n` for the shuffle engines).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistributionTable {
    n: usize,
    counts: Vec<u64>,
    denominator: u64,
}

impl DistributionTable {
    /// Builds a table from rank-indexed counts; they must sum to `denominator`.
    pub fn from_rank_counts(n: usize, counts: Vec<u64>, denominator: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        let nf = rank::factorials(n)[n];
        if counts.len() as u64 != nf {
            return Err(Error::InvalidArgument(format!(
                "table over S_{n} needs {nf} counts, got {}",
                counts.len()
            )));
        }
        let total: u128 = counts.iter().map(|&c| c as u128).sum();
        if total != denominator as u128 {
            return Err(Error::InvalidArgument(format!(
                "counts sum to {total}, expected denominator {denominator}"
            )));
        }
        Ok(DistributionTable { n, counts, denominator })
    }

    pub fn point_mass(p: &Permutation) -> Self {
        let n = p.n();
        let mut counts = vec![0u64; rank::factorials(n)[n] as usize];
        counts[rank_of(p) as usize] = 1;
        DistributionTable { n, counts, denominator: 1 }
    }

    /// The uniform law on `S_n`, over denominator `n!`.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidSize(0));
        }
        let nf = rank::factorials(n)[n];
        Ok(DistributionTable {
            n,
            counts: vec![1; nf as usize],
            denominator: nf,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn denominator(&self) -> u64 {
        self.denominator
    }

    pub fn count(&self, p: &Permutation) -> u64 {
        if p.n() != self.n {
            return 0;
        }
        self.counts[rank_of(p) as usize]
    }

    pub fn probability(&self, p: &Permutation) -> ExactProb {
        ExactProb::new(self.count(p), self.denominator)
    }

    /// Counts in lexicographic rank order, including zeros.
    pub fn rank_counts(&self) -> &[u64] {
        &self.counts
    }

    /// Number of permutations with positive probability.
    pub fn support_size(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Permutations with positive count, in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Permutation, u64)> + '_ {
        let n = self.n;
        let mut current: Vec<u32> = (0..n as u32).collect();
        let mut first = true;
        self.counts.iter().filter_map(move |&c| {
            if !first {
                rank::next_permutation(&mut current);
            }
            first = false;
            (c > 0).then(|| (to_permutation(&current), c))
        })
    }

    /// One line per supported permutation, `one-line<TAB>count<TAB>denominator`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (p, c) in self.iter() {
            writeln!(s, "{p}\t{c}\t{}", self.denominator).unwrap();
        }
        s
    }

    /// Parses the output of [`DistributionTable::to_text`].
    pub fn from_text(text: &str) -> Result<Self> {
        let mut rows = Vec::new();
        let mut denominator = None;
        for (lineno, line) in text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()) {
            let fields: Vec<&str> = line.split('\t').collect();
            let [perm, count, den] = fields[..] else {
                return Err(Error::Parse(format!("line {}: expected 3 tab-separated fields", lineno + 1)));
            };
            let perm: Permutation = perm.parse()?;
            let count: u64 = count.parse().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            let den: u64 = den.parse().map_err(|e| Error::Parse(format!("line {}: {e}", lineno + 1)))?;
            if *denominator.get_or_insert(den) != den {
                return Err(Error::Parse(format!("line {}: inconsistent denominator", lineno + 1)));
            }
            rows.push((perm, count));
        }
        let Some(denominator) = denominator else {
            return Err(Error::Parse("empty table".into()));
        };
        let n = rows[0].0.n();
        let mut counts = vec![0u64; rank::factorials(n)[n] as usize];
        for (p, c) in rows {
            if p.n() != n {
                return Err(Error::Parse("mixed deck sizes".into()));
            }
            counts[rank_of(&p) as usize] += c;
        }
        DistributionTable::from_rank_counts(n, counts, denominator)
    }
}

pub(crate) fn rank_of(p: &Permutation) -> u64 {
    let zero: Vec<u32> = p.slots().iter().map(|&c| c - 1).collect();
    rank::rank(&zero)
}

pub(crate) fn to_permutation(zero_based: &[u32]) -> Permutation {
    Permutation::from_slots_unchecked(zero_based.iter().map(|&c| c + 1).collect())
}

/// Projects a law on `S_n` to its marginal matrix `P(card j in position a)`.
pub fn marginal_of(d: &DistributionTable) -> MarginalMatrix {
    let n = d.n;
    let mut acc = vec![0u64; n * n];
    for (p, c) in d.iter() {
        for (pos, &card) in p.slots().iter().enumerate() {
            acc[(card as usize - 1) * n + pos] += c;
        }
    }
    let den = d.denominator as f64;
    MarginalMatrix::from_rows(n, acc.into_iter().map(|c| c as f64 / den).collect())
}

/// `P(sigma_a = j)` laid out as `[a][j]`, i.e. card number by position.
pub fn card_in_position_of(d: &DistributionTable) -> MarginalMatrix {
    let n = d.n;
    let mut acc = vec![0u64; n * n];
    for (p, c) in d.iter() {
        for (pos, &card) in p.slots().iter().enumerate() {
            acc[pos * n + (card as usize - 1)] += c;
        }
    }
    let den = d.denominator as f64;
    MarginalMatrix::from_rows(n, acc.into_iter().map(|c| c as f64 / den).collect())
}

/// Half the L1 distance to the uniform law, summed over all of `S_n`.
pub fn tv_to_uniform(d: &DistributionTable) -> f64 {
    let nf = rank::factorials(d.n)[d.n] as u128;
    let den = d.denominator as u128;
    // |c/den - 1/n!| = |c n! - den| / (den n!)
    let num: u128 = d
        .counts
        .iter()
        .map(|&c| (c as u128 * nf).abs_diff(den))
        .sum();
    num as f64 / (2.0 * den as f64 * nf as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsSummary {
    pub n: usize,
    pub prob_identity: ExactProb,
    pub min_prob: ExactProb,
    #[serde(serialize_with = "serialize_display")]
    pub argmin: Permutation,
    pub max_prob: ExactProb,
    #[serde(serialize_with = "serialize_display")]
    pub argmax: Permutation,
    pub derangement_prob: ExactProb,
    pub tv_to_uniform: f64,
}

fn serialize_display<S: serde::Serializer>(p: &Permutation, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(p)
}

/// Exact summary statistics; ties for argmin/argmax go to the
/// lexicographically first permutation.
pub fn distribution_stats(d: &DistributionTable) -> StatsSummary {
    let n = d.n;
    let mut current: Vec<u32> = (0..n as u32).collect();
    let (mut min_r, mut max_r) = (0usize, 0usize);
    let mut derange = 0u64;
    for (r, &c) in d.counts.iter().enumerate() {
        if r > 0 {
            rank::next_permutation(&mut current);
        }
        if c < d.counts[min_r] {
            min_r = r;
        }
        if c > d.counts[max_r] {
            max_r = r;
        }
        if current.iter().enumerate().all(|(i, &x)| x as usize != i) {
            derange += c;
        }
    }
    let prob = |c| ExactProb::new(c, d.denominator);
    StatsSummary {
        n,
        prob_identity: prob(d.counts[0]),
        min_prob: prob(d.counts[min_r]),
        argmin: to_permutation(&rank::unrank(n, min_r as u64)),
        max_prob: prob(d.counts[max_r]),
        argmax: to_permutation(&rank::unrank(n, max_r as u64)),
        derangement_prob: prob(derange),
        tv_to_uniform: tv_to_uniform(d),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Permutation {
        s.parse().unwrap()
    }

    #[test]
    fn point_mass_identity_marginal() {
        let d = DistributionTable::point_mass(&Permutation::identity(4).unwrap());
        let m = marginal_of(&d);
        for j in 1..=4 {
            for a in 1..=4 {
                assert_eq!(m.get(j, a), if j == a { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn uniform_s3_marginal() {
        let m = marginal_of(&DistributionTable::uniform(3).unwrap());
        assert!(m.entries().iter().all(|&x| (x - 1.0 / 3.0).abs() < 1e-15));
        assert_eq!(tv_to_uniform(&DistributionTable::uniform(3).unwrap()), 0.0);
    }

    #[test]
    fn tv_examples() {
        let one = DistributionTable::point_mass(&p("1"));
        assert_eq!(tv_to_uniform(&one), 0.0);
        let d = DistributionTable::point_mass(&p("2,3,1"));
        assert!((tv_to_uniform(&d) - 5.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn from_rank_counts_checks_total() {
        assert!(DistributionTable::from_rank_counts(2, vec![2, 2], 4).is_ok());
        assert!(DistributionTable::from_rank_counts(2, vec![2, 1], 4).is_err());
        assert!(DistributionTable::from_rank_counts(2, vec![4], 4).is_err());
    }

    #[test]
    fn text_round_trip() {
        let d = DistributionTable::from_rank_counts(3, vec![4, 0, 5, 6, 7, 5], 27).unwrap();
        let text = d.to_text();
        assert_eq!(text.lines().next().unwrap(), "1,2,3\t4\t27");
        assert_eq!(text.lines().count(), 5);
        assert_eq!(DistributionTable::from_text(&text).unwrap(), d);
        assert!(DistributionTable::from_text("1,2\t1\n").is_err());
        assert!(DistributionTable::from_text("").is_err());
    }

    #[test]
    fn exact_prob_ordering() {
        assert_eq!(ExactProb::new(1, 2), ExactProb::new(2, 4));
        assert!(ExactProb::new(4, 27) < ExactProb::new(1, 6));
        assert_eq!(ExactProb::new(3, 8).to_string(), "3/8");
    }

    #[test]
    fn stats_tie_break_is_lexicographic() {
        let d = DistributionTable::from_rank_counts(3, vec![1, 1, 1, 1, 1, 1], 6).unwrap();
        let s = distribution_stats(&d);
        assert_eq!(s.argmin, p("1,2,3"));
        assert_eq!(s.argmax, p("1,2,3"));
        assert_eq!(s.derangement_prob, ExactProb::new(2, 6));
    }

    #[test]
    fn csv_header() {
        let m = marginal_of(&DistributionTable::point_mass(&p("2,1")));
        let csv = m.to_csv();
        assert!(csv.starts_with("j\\a,1,2\n1,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
