/// Relative tolerance for argmax ties.
pub(crate) const TIE_TOL: f64 = 1e-10;

/// Tolerance used when comparing translation-matrix entries.
pub(crate) const ENTRY_TOL: f64 = 1e-9;

/// Index of the first value within `TIE_TOL` of the maximum.
///
/// Returns `None` for an empty iterator.
pub(crate) fn first_argmax<I: IntoIterator<Item = f64>>(values: I) -> Option<usize>
where
    I::IntoIter: Clone,
{
    let iter = values.into_iter();
    let best = iter.clone().fold(f64::NEG_INFINITY, f64::max);
    if best == f64::NEG_INFINITY {
        return iter.clone().next().map(|_| 0);
    }
    let cutoff = best - TIE_TOL * best.abs().max(1.0);
    iter.enumerate().find(|(_, v)| *v >= cutoff).map(|(i, _)| i)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
