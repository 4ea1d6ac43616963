use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extremum<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`,
/// stopping when the bracket is narrower than `x_tol`. The best point seen
/// (ends included) is returned.
pub fn golden_section_max<T: Real, F: FnMut(T) -> T>(mut f: F, lo: T, hi: T, x_tol: T) -> Extremum<T> {
    let inv_phi = T::c(0.618_033_988_749_894_8);
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut evaluations = 2;
    let mut x1 = b - inv_phi * (b - a);
    let mut x2 = a + inv_phi * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    evaluations += 2;
    while (b - a) > x_tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        }
        evaluations += 1;
        if evaluations > 10_000 {
            break;
        }
    }
    for (x, v) in [(x1, f1), (x2, f2)] {
        if v > best.1 {
            best = (x, v);
        }
    }
    Extremum {
        x: best.0,
        value: best.1,
        evaluations,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola() {
        let e = golden_section_max(|x: f64| -(x - 1.3).powi(2), -4.0, 9.0, 1e-9);
        assert!((e.x - 1.3).abs() < 1e-8);
    }

    #[test]
    fn maximum_at_boundary() {
        let e = golden_section_max(|x: f64| x, 0.0, 2.0, 1e-6);
        assert_eq!(e.x, 2.0);
    }
}
