/// Stopping rule for [`bisect`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bisection {
    pub width_tol: f64,
    pub value_tol: f64,
    pub max_iter: usize,
}

impl Default for Bisection {
    fn default() -> Self {
        Bisection {
            width_tol: 1e-12,
            value_tol: 1e-12,
            max_iter: 200,
        }
    }
}

/// Root of an increasing function on `[lo, hi]`.
///
/// Halves the bracket until it is narrower than `width_tol` or the midpoint
/// value is below `value_tol`; a narrow final bracket is resolved by linear
/// interpolation between its ends. Returns `None` when there is no sign
/// change over the bracket.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, rule: Bisection) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let mut f_hi = f(hi);
    if f_lo.abs() < rule.value_tol {
        return Some(lo);
    }
    if f_hi.abs() < rule.value_tol {
        return Some(hi);
    }
    if !(f_lo < 0.0 && f_hi > 0.0) {
        return None;
    }
    for _ in 0..rule.max_iter {
        if hi - lo < rule.width_tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let v = f(mid);
        if v.abs() < rule.value_tol {
            return Some(mid);
        }
        if v < 0.0 {
            lo = mid;
            f_lo = v;
        } else {
            hi = mid;
            f_hi = v;
        }
    }
    Some(lo - f_lo * (hi - lo) / (f_hi - f_lo))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, Bisection::default()).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn no_sign_change() {
        assert_eq!(bisect(|x| x + 1.0, 0.0, 1.0, Bisection::default()), None);
        assert_eq!(bisect(|x| x - 2.0, 0.0, 1.0, Bisection::default()), None);
    }

    #[test]
    fn steep_function_resolved_inside_final_bracket() {
        // slope 1e6: a 1e-12 bracket alone would leave |f| up to 5e-7
        let root = 0.123_456_789_012_345;
        let r = bisect(|x| 1e6 * (x - root), 0.0, 1.0, Bisection::default()).unwrap();
        assert!((1e6 * (r - root)).abs() < 1e-9);
    }

    #[test]
    fn root_at_endpoint() {
        assert_eq!(bisect(|x| x, 0.0, 1.0, Bisection::default()), Some(0.0));
    }
}
