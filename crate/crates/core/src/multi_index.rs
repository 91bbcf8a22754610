//! Strictly increasing multi-indices and the permutation signs that come
//! with them.

pub fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// All strictly increasing `p`-tuples drawn from `0..n`, in lexicographic order.
pub fn combinations(n: usize, p: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::with_capacity(binomial(n, p));
    if p > n {
        return out;
    }
    let mut idx: Vec<usize> = (0..p).collect();
    loop {
        out.push(idx.clone());
        let mut k = p;
        loop {
            if k == 0 {
                return out;
            }
            k -= 1;
            if idx[k] < n - p + k {
                idx[k] += 1;
                for m in k + 1..p {
                    idx[m] = idx[m - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Position of a strictly increasing multi-index in [`combinations`] order.
pub fn rank_of(n: usize, idx: &[usize]) -> usize {
    let p = idx.len();
    let mut rank = 0;
    let mut start = 0;
    for (k, &v) in idx.iter().enumerate() {
        for skipped in start..v {
            rank += binomial(n - 1 - skipped, p - 1 - k);
        }
        start = v + 1;
    }
    rank
}

/// Sorts in place and returns the sign of the sorting permutation, or `None`
/// if an index repeats.
pub fn sort_with_sign(idx: &mut [usize]) -> Option<f64> {
    let mut sign = 1.0;
    for i in 1..idx.len() {
        let mut j = i;
        while j > 0 && idx[j - 1] > idx[j] {
            idx.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if idx.windows(2).any(|w| w[0] == w[1]) {
        None
    } else {
        Some(sign)
    }
}

/// Increasing complement of `idx` in `0..n`.
pub fn complement(n: usize, idx: &[usize]) -> Vec<usize> {
    (0..n).filter(|i| !idx.contains(i)).collect()
}

/// Sign of the permutation that sorts the concatenation `a ++ b`
/// (0 if they overlap).
pub fn concat_sign(a: &[usize], b: &[usize]) -> f64 {
    let mut joined: Vec<usize> = a.iter().chain(b).copied().collect();
    sort_with_sign(&mut joined).unwrap_or(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn counts() {
        assert_eq!(combinations(5, 2).len(), 10);
        assert_eq!(combinations(5, 0), vec![Vec::<usize>::new()]);
        assert_eq!(combinations(5, 5), vec![vec![0, 1, 2, 3, 4]]);
        assert!(combinations(3, 4).is_empty());
    }

    #[test]
    fn signs() {
        assert_eq!(sort_with_sign(&mut [1, 0]), Some(-1.0));
        assert_eq!(sort_with_sign(&mut [2, 0, 1]), Some(1.0));
        assert_eq!(sort_with_sign(&mut [1, 1]), None);
        assert_eq!(concat_sign(&[0, 2], &[1, 3, 4]), -1.0);
    }

    proptest! {
        #[test]
        fn rank_inverts_enumeration(n in 1usize..9, p in 0usize..9) {
            let p = p.min(n);
            for (k, c) in combinations(n, p).iter().enumerate() {
                prop_assert_eq!(rank_of(n, c), k);
            }
        }
    }
}
