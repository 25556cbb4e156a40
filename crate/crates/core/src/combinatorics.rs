//! Index-tuple helpers shared by the multivector and n-Lie code.

use itertools::Itertools;

/// All strictly increasing `k`-tuples drawn from `0..m`, lexicographically.
pub fn increasing_tuples(m: usize, k: usize) -> Vec<Vec<usize>> {
    if k > m {
        return Vec::new();
    }
    (0..m).combinations(k).collect()
}

/// Elements of `universe` not in `sub`, in order.
pub fn complement(sub: &[usize], universe: &[usize]) -> Vec<usize> {
    universe.iter().copied().filter(|u| !sub.contains(u)).collect()
}

/// Sign of the permutation that sorts the concatenation `(I, J)` of two
/// increasing tuples, or `None` if they share an index.
pub fn merge_sign(i: &[usize], j: &[usize]) -> Option<i32> {
    let mut inversions = 0usize;
    for a in i {
        for b in j {
            if a == b {
                return None;
            }
            if a > b {
                inversions += 1;
            }
        }
    }
    Some(if inversions % 2 == 0 { 1 } else { -1 })
}

/// Sorts `indices` and returns the sign of the sorting permutation, or `None`
/// if an index repeats.
pub fn sort_with_sign(indices: &[usize]) -> Option<(Vec<usize>, i32)> {
    let mut v = indices.to_vec();
    let mut sign = 1;
    // insertion sort so the parity is counted directly
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] > v[j] {
            v.swap(j - 1, j);
            sign = -sign;
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((v, sign))
}

/// All permutations of `0..k`.
pub fn permutations(k: usize) -> Vec<Vec<usize>> {
    (0..k).permutations(k).collect()
}

pub fn perm_sign(perm: &[usize]) -> i32 {
    sort_with_sign(perm).map_or(0, |(_, s)| s)
}
