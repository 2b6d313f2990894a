//! One-dimensional search primitives shared by the rate-function and
//! design code.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes a unimodal function on `[lo, hi]` by golden-section search.
///
/// Points where `f` is undefined should evaluate to `-inf`. Iteration stops
/// once the bracket is narrower than `x_tol`. Returns `(argmax, max)`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, x_tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..400 {
        if (b - a).abs() <= x_tol {
            break;
        }
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Bisection for a root of a continuous function with `f(lo) < 0 <= f(hi)`.
///
/// Runs until the bracket stops shrinking in floating point, so the result
/// is as tight as the arithmetic allows. Returns the upper end of the final
/// bracket (where `f >= 0`).
pub fn bisect_increasing<F>(mut f: F, mut lo: f64, mut hi: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    for _ in 0..2000 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Finds the first upward sign change of `f` to the right of `start`.
///
/// `f(start)` must be negative. The search steps outward with a step that
/// doubles each time, then bisects the first step where `f >= 0`. Returns
/// `None` if no crossing occurs before `cap`.
pub fn first_crossing<F>(mut f: F, start: f64, initial_step: f64, cap: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut lo = start;
    let mut step = initial_step.max(f64::MIN_POSITIVE);
    loop {
        let hi = (lo + step).min(cap);
        if f(hi) >= 0.0 {
            return Some(bisect_increasing(&mut f, lo, hi));
        }
        if hi >= cap {
            return None;
        }
        lo = hi;
        step *= 2.0;
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let n = order as f64;
    for i in 0..order.div_ceil(2) {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=order {
                let k = k as f64;
                let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if order == 1 {
                p0 = 1.0;
                p1 = x;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 1.3).powi(2) + 2.0, 0.0, 5.0, 1e-12);
        assert!((x - 1.3).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn golden_section_tolerates_infinite_edge() {
        let f = |x: f64| if x >= 1.0 { f64::NEG_INFINITY } else { x + (1.0 - x).ln() };
        let (x, fx) = golden_section_max(f, 0.0, 1.0, 1e-14);
        assert!(x.abs() < 1e-6, "x = {x}");
        assert!(fx.abs() < 1e-12);
    }

    #[test]
    fn bisection_converges_to_machine_precision() {
        let r = bisect_increasing(|x| x * x - 2.0, 0.0, 2.0);
        assert!((r - 2f64.sqrt()).abs() < 4e-16);
    }

    #[test]
    fn first_crossing_scans_outward() {
        let r = first_crossing(|x| x - 37.5, 0.0, 0.1, 1e6).unwrap();
        assert!((r - 37.5).abs() < 1e-12);
        assert!(first_crossing(|x| x - 37.5, 0.0, 0.1, 10.0).is_none());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        let (x, w) = gauss_legendre(64);
        let sum_w: f64 = w.iter().sum();
        assert!((sum_w - 2.0).abs() < 1e-13);
        // Degree 10 polynomial: integral of x^10 over [-1,1] is 2/11.
        let q: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(10)).sum();
        assert!((q - 2.0 / 11.0).abs() < 1e-14);
        let (x5, w5) = gauss_legendre(5);
        let q5: f64 = x5.iter().zip(&w5).map(|(x, w)| w * x.powi(8)).sum();
        assert!((q5 - 2.0 / 9.0).abs() < 1e-14);
    }
}
