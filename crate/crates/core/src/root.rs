/// Bisection for the left end of a half-line predicate on `[lo, hi]`.
///
/// `pred` must be false below some point and true above it. Assumes
/// `pred(hi)` is true; returns the smallest probed point where it held.
pub(crate) fn left_edge<F>(mut lo: f64, mut hi: f64, iterations: usize, mut pred: F) -> f64
where
    F: FnMut(f64) -> bool,
{
    if pred(lo) {
        return lo;
    }
    for _ in 0..iterations {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}
