//! Counting and enumeration helpers for canonical hyperedges.

/// `C(n, k)` as `u128`, `None` on overflow.
pub fn binomial(n: u64, k: u64) -> Option<u128> {
    if k > n {
        return Some(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.checked_mul((n - i) as u128)? / (i as u128 + 1);
    }
    Some(acc)
}

pub fn factorial(k: usize) -> f64 {
    (1..=k).map(|i| i as f64).product()
}

/// `ln C(n, k)`.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    statrs::function::factorial::ln_binomial(n, k)
}

/// Advances `comb` (strictly increasing, values `< n`) to its lexicographic
/// successor. Returns `false` when `comb` was the last combination.
pub fn next_combination(comb: &mut [u32], n: u32) -> bool {
    let k = comb.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if comb[i] < n - (k - i) as u32 {
            comb[i] += 1;
            for j in i + 1..k {
                comb[j] = comb[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// The combination of lexicographic rank `rank` among `k`-subsets of `0..n`.
pub fn unrank_combination(mut rank: u128, n: u32, k: usize) -> Vec<u32> {
    let mut out = Vec::with_capacity(k);
    let mut next = 0u32;
    for slot in 0..k {
        let remaining = (k - slot - 1) as u64;
        let mut v = next;
        loop {
            let count = binomial((n - v - 1) as u64, remaining).expect("rank within range");
            if rank < count {
                break;
            }
            rank -= count;
            v += 1;
        }
        out.push(v);
        next = v + 1;
    }
    out
}

/// All set partitions of `0..p`, each given as a list of blocks.
pub fn set_partitions(p: usize) -> Vec<Vec<Vec<usize>>> {
    fn rec(i: usize, p: usize, cur: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if i == p {
            out.push(cur.clone());
            return;
        }
        for b in 0..cur.len() {
            cur[b].push(i);
            rec(i + 1, p, cur, out);
            cur[b].pop();
        }
        cur.push(vec![i]);
        rec(i + 1, p, cur, out);
        cur.pop();
    }
    let mut out = Vec::new();
    rec(0, p, &mut Vec::new(), &mut out);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(30, 3), Some(4060));
        assert_eq!(binomial(5, 7), Some(0));
        assert_eq!(binomial(100, 50).map(|b| b > 0), Some(true));
        assert!((ln_binomial(10, 3) - 120f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn lexicographic_walk_matches_unrank() {
        let (n, k) = (7u32, 3usize);
        let mut comb: Vec<u32> = (0..k as u32).collect();
        let mut rank = 0u128;
        loop {
            assert_eq!(unrank_combination(rank, n, k), comb);
            rank += 1;
            if !next_combination(&mut comb, n) {
                break;
            }
        }
        assert_eq!(rank, binomial(7, 3).unwrap());
    }

    #[test]
    fn bell_numbers() {
        let bell: Vec<usize> = (1..=5).map(|p| set_partitions(p).len()).collect();
        assert_eq!(bell, vec![1, 2, 5, 15, 52]);
    }
}
