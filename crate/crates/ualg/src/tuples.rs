//! Iteration over k-tuples of indices `{0..n-1}^k` in lexicographic order.
//!
//! The flat index of a tuple `(a_1, .., a_k)` over a base `n` is
//! `Σ a_i · n^(k-i)`, i.e. the first component is most significant. All
//! table and product-carrier indexing in the crate follows this convention.

/// Calls `f` for every tuple in `{0..n-1}^k`, lexicographically. `k == 0`
/// yields exactly the empty tuple; `n == 0` with `k > 0` yields nothing.
pub(crate) fn for_each_tuple<E>(
    n: usize,
    k: usize,
    mut f: impl FnMut(&[usize]) -> Result<(), E>,
) -> Result<(), E> {
    let mut idx = vec![0usize; k];
    if k == 0 {
        return f(&idx);
    }
    if n == 0 {
        return Ok(());
    }
    loop {
        f(&idx)?;
        let mut pos = k;
        loop {
            if pos == 0 {
                return Ok(());
            }
            pos -= 1;
            idx[pos] += 1;
            if idx[pos] < n {
                break;
            }
            idx[pos] = 0;
        }
    }
}

/// Flat index of `tuple` over base `n`.
pub(crate) fn flat_index(tuple: &[usize], n: usize) -> usize {
    tuple.iter().fold(0, |acc, &a| acc * n + a)
}

/// Inverse of [`flat_index`], writing into `out` (length k).
pub(crate) fn unflatten(mut flat: usize, n: usize, out: &mut [usize]) {
    for slot in out.iter_mut().rev() {
        if n == 0 {
            *slot = 0;
        } else {
            *slot = flat % n;
            flat /= n;
        }
    }
}

/// `n^k` if it fits in `usize`.
pub(crate) fn checked_pow(n: usize, k: usize) -> Option<usize> {
    let mut acc: usize = 1;
    for _ in 0..k {
        acc = acc.checked_mul(n)?;
    }
    Some(acc)
}
