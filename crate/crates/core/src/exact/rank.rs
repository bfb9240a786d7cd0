//! Lexicographic ranking of permutations of `0..n`.

/// `f[i] = i!` for `i <= n`.
pub(crate) fn factorials(n: usize) -> Vec<u64> {
    let mut f = vec![1u64; n + 1];
    for i in 1..=n {
        f[i] = f[i - 1] * i as u64;
    }
    f
}

/// Lehmer code: `code[i] = #{k > i : s[k] < s[i]}`.
pub(crate) fn lehmer(s: &[u32], code: &mut [u32]) {
    for i in 0..s.len() {
        code[i] = s[i + 1..].iter().filter(|&&x| x < s[i]).count() as u32;
    }
}

/// Rank of `s` among permutations of `0..n` in lexicographic order
/// (identity is 0). `weights[i] = (n-1-i)!`.
pub(crate) fn rank_with(s: &[u32], weights: &[u64]) -> u64 {
    let mut r = 0u64;
    for i in 0..s.len() {
        let smaller = s[i + 1..].iter().filter(|&&x| x < s[i]).count() as u64;
        r += smaller * weights[i];
    }
    r
}

pub(crate) fn rank_weights(n: usize) -> Vec<u64> {
    let f = factorials(n);
    (0..n).map(|i| f[n - 1 - i]).collect()
}

pub(crate) fn rank(s: &[u32]) -> u64 {
    rank_with(s, &rank_weights(s.len()))
}

/// Inverse of [`rank`].
pub(crate) fn unrank(n: usize, mut r: u64) -> Vec<u32> {
    let weights = rank_weights(n);
    let mut pool: Vec<u32> = (0..n as u32).collect();
    let mut out = Vec::with_capacity(n);
    for w in weights {
        let d = (r / w) as usize;
        r %= w;
        out.push(pool.remove(d));
    }
    out
}

/// Advances `s` to its lexicographic successor; false when `s` was last.
pub(crate) fn next_permutation(s: &mut [u32]) -> bool {
    let n = s.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && s[i - 1] >= s[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut k = n - 1;
    while s[k] <= s[i - 1] {
        k -= 1;
    }
    s.swap(i - 1, k);
    s[i..].reverse();
    true
}

/// Change in rank when positions `p` and `q` of `s` are swapped, given the
/// Lehmer code of `s`. Only the digits in `p..=q` move, so this is O(q - p).
pub(crate) fn swap_rank_delta(s: &[u32], code: &[u32], weights: &[u64], p: usize, q: usize) -> i64 {
    if p == q {
        return 0;
    }
    let (p, q) = if p < q { (p, q) } else { (q, p) };
    let (u, v) = (s[p], s[q]);
    let mut below_u = 0i64;
    let mut below_v = 0i64;
    let mut delta = 0i64;
    for i in p + 1..q {
        let w = s[i];
        below_u += (w < u) as i64;
        below_v += (w < v) as i64;
        let d = (u < w) as i64 - (v < w) as i64;
        delta += d * weights[i] as i64;
    }
    let new_p = below_v + code[q] as i64 + (u < v) as i64;
    let new_q = code[p] as i64 - below_u - (v < u) as i64;
    delta += (new_p - code[p] as i64) * weights[p] as i64;
    delta += (new_q - code[q] as i64) * weights[q] as i64;
    delta
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rank_unrank_round_trip() {
        for n in 1..=6 {
            let f = factorials(n)[n];
            let mut s: Vec<u32> = (0..n as u32).collect();
            for r in 0..f {
                assert_eq!(rank(&s), r);
                assert_eq!(unrank(n, r), s);
                let more = next_permutation(&mut s);
                assert_eq!(more, r + 1 < f);
            }
        }
    }

    #[test]
    fn swap_delta_matches_full_rank() {
        for n in 1..=6 {
            let weights = rank_weights(n);
            let mut s: Vec<u32> = (0..n as u32).collect();
            let mut code = vec![0u32; n];
            loop {
                lehmer(&s, &mut code);
                let r = rank(&s) as i64;
                for p in 0..n {
                    for q in 0..n {
                        let mut t = s.clone();
                        t.swap(p, q);
                        assert_eq!(r + swap_rank_delta(&s, &code, &weights, p, q), rank(&t) as i64);
                    }
                }
                if !next_permutation(&mut s) {
                    break;
                }
            }
        }
    }
}
