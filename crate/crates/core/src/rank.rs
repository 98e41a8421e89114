use std::cmp::Ordering;

/// Ranking order used everywhere a "best k" is taken: higher score first,
/// lower id first among equal scores. A strict total order on distinct ids.
#[inline]
pub(crate) fn by_rank(a: &(f64, usize), b: &(f64, usize)) -> Ordering {
    b.0.total_cmp(&a.0).then(a.1.cmp(&b.1))
}

/// The `k`-th best `(score, id)` pair (1-based `k`). Anything ranking at or
/// before it is among the best `k`. Reorders `scratch`.
pub(crate) fn kth_best(scratch: &mut [(f64, usize)], k: usize) -> (f64, usize) {
    debug_assert!(k >= 1 && k <= scratch.len());
    *scratch.select_nth_unstable_by(k - 1, by_rank).1
}
