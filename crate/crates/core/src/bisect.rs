//! Bracketing search for the boundary of a monotone predicate.

const MAX_ITERATIONS: usize = 200;

/// Narrows `[lo, hi]` around the point where `pred` changes value and
/// returns the midpoint of the final bracket.
///
/// Requires `pred(lo) != pred(hi)`; stops once `hi - lo <= tol`.
pub(crate) fn boundary<P>(mut lo: f64, mut hi: f64, tol: f64, pred: P) -> f64
where
    P: Fn(f64) -> bool,
{
    let at_lo = pred(lo);
    debug_assert_ne!(at_lo, pred(hi), "bracket does not straddle the boundary");
    for _ in 0..MAX_ITERATIONS {
        if hi - lo <= tol {
            break;
        }
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if pred(mid) == at_lo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo + 0.5 * (hi - lo)
}
