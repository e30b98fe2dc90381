//! Small integer helpers: ceiling logarithms, binomial coefficients and
//! lexicographic ranking of k-combinations.

/// `⌈log₂ n⌉` for `n ≥ 1`; `0` for `n ≤ 1`.
pub fn ceil_log2(n: u64) -> u32 {
    if n <= 1 {
        0
    } else {
        64 - (n - 1).leading_zeros()
    }
}

/// Binomial coefficient `C(n, k)`, `0` when `k > n`.
///
/// Computed with the multiplicative formula; exact for every value that fits
/// in a `u64` at the sizes used here (pools of at most a few dozen signals).
pub fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc * u128::from(n - i) / u128::from(i + 1);
    }
    u64::try_from(acc).expect("binomial coefficient overflows u64")
}

/// Iterator over all k-subsets of `0..n` as ascending index vectors, in
/// lexicographic order.
#[derive(Debug, Clone)]
pub struct Combinations {
    n: usize,
    current: Option<Vec<usize>>,
}

impl Combinations {
    pub fn new(n: usize, k: usize) -> Self {
        let current = if k <= n { Some((0..k).collect()) } else { None };
        Combinations { n, current }
    }
}

impl Iterator for Combinations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let k = out.len();
        let mut next = out.clone();
        // rightmost position that can still be incremented
        let pivot = (0..k).rev().find(|&i| next[i] < self.n - k + i);
        match pivot {
            Some(i) => {
                next[i] += 1;
                for j in i + 1..k {
                    next[j] = next[j - 1] + 1;
                }
                self.current = Some(next);
            }
            None => self.current = None,
        }
        Some(out)
    }
}

/// Lexicographic rank of an ascending combination drawn from `0..n`.
pub fn rank_combination(n: usize, combination: &[usize]) -> u64 {
    let k = combination.len();
    let mut rank = 0u64;
    let mut lo = 0usize;
    for (pos, &idx) in combination.iter().enumerate() {
        let remaining = (k - pos - 1) as u64;
        for skipped in lo..idx {
            rank += binomial((n - skipped - 1) as u64, remaining);
        }
        lo = idx + 1;
    }
    rank
}

/// Inverse of [`rank_combination`]. Returns `None` when `rank ≥ C(n, k)`.
pub fn unrank_combination(n: usize, k: usize, rank: u64) -> Option<Vec<usize>> {
    if rank >= binomial(n as u64, k as u64) {
        return None;
    }
    let mut rest = rank;
    let mut out = Vec::with_capacity(k);
    let mut candidate = 0usize;
    for pos in 0..k {
        let remaining = (k - pos - 1) as u64;
        loop {
            let block = binomial((n - candidate - 1) as u64, remaining);
            if rest < block {
                break;
            }
            rest -= block;
            candidate += 1;
        }
        out.push(candidate);
        candidate += 1;
    }
    Some(out)
}
