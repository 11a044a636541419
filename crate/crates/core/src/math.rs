//! `libm` shims so the numeric code reads like `std` float methods.

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn abs(x: f64) -> f64 {
    libm::fabs(x)
}

/// `count` points spaced geometrically on `[lo, hi]`, endpoints included.
pub(crate) fn geometric_grid(lo: f64, hi: f64, count: usize) -> impl Iterator<Item = f64> {
    let log_ratio = ln(hi / lo) / (count - 1) as f64;
    (0..count).map(move |k| {
        if k + 1 == count {
            hi
        } else {
            lo * exp(log_ratio * k as f64)
        }
    })
}

/// Whether `Σ terms > 0`, where each term is `(exact sign, computed value)`.
///
/// Sign-definite sums are decided from the signs alone, so a positive term
/// that under- or overflowed in `f64` still counts. Mixed signs fall back to
/// the computed sum.
pub(crate) fn positive_sum(terms: &[(i8, f64)]) -> bool {
    let any_neg = terms.iter().any(|t| t.0 < 0);
    let any_pos = terms.iter().any(|t| t.0 > 0);
    match (any_pos, any_neg) {
        (true, false) => true,
        (false, _) => false,
        (true, true) => terms.iter().map(|t| t.1).sum::<f64>() > 0.0,
    }
}
