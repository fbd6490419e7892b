//! One-dimensional quadrature on finite intervals.
//!
//! Every integrand in this crate is smooth on a compact frequency interval,
//! so composite Gauss–Legendre with panel doubling is the workhorse. The
//! trapezoid and Simpson rules are kept for the frequency-grid pipelines and
//! as cross-checks.

use std::sync::OnceLock;

const GL_ORDER: usize = 16;

/// Nodes and weights of the `order`-point Gauss–Legendre rule on `[-1, 1]`.
pub fn gauss_legendre(order: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(order >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; order];
    let mut weights = vec![0.0; order];
    let m = order.div_ceil(2);
    for i in 0..m {
        // Chebyshev guess, refined by Newton on P_order.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (order as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(order, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(order, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[order - 1 - i] = x;
        weights[i] = w;
        weights[order - 1 - i] = w;
    }
    (nodes, weights)
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

fn default_rule() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| gauss_legendre(GL_ORDER))
}

/// Composite 16-point Gauss–Legendre with a fixed number of equal panels.
pub fn gauss_legendre_panels<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let (nodes, weights) = default_rule();
    let panels = panels.max(1);
    let width = (b - a) / panels as f64;
    let half = 0.5 * width;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + (p as f64 + 0.5) * width;
        let mut s = 0.0;
        for (x, w) in nodes.iter().zip(weights) {
            s += w * f(mid + half * x);
        }
        total += s * half;
    }
    total
}

/// Composite Gauss–Legendre, doubling the panel count until two successive
/// estimates agree to `rel_tol` (relative to the larger magnitude, with an
/// absolute floor of `rel_tol * 1e-3`).
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let mut panels = 4;
    let mut prev = gauss_legendre_panels(&f, a, b, panels);
    while panels < (1 << 16) {
        panels *= 2;
        let next = gauss_legendre_panels(&f, a, b, panels);
        let scale = next.abs().max(prev.abs());
        if (next - prev).abs() <= rel_tol * scale || (next - prev).abs() <= rel_tol * 1e-3 {
            return next;
        }
        prev = next;
    }
    prev
}

/// [`integrate`] at the crate's default tolerance.
pub fn integrate_default<F: Fn(f64) -> f64>(f: F, a: f64, b: f64) -> f64 {
    integrate(f, a, b, 1e-13)
}

/// Composite trapezoid rule on `nodes` equally spaced points.
pub fn trapezoid<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, nodes: usize) -> f64 {
    assert!(nodes >= 2);
    let step = (b - a) / (nodes - 1) as f64;
    let mut s = 0.5 * (f(a) + f(b));
    for i in 1..nodes - 1 {
        s += f(a + i as f64 * step);
    }
    s * step
}

/// Trapezoid rule over already tabulated, equally spaced values.
pub fn trapezoid_values(values: &[f64], step: f64) -> f64 {
    match values.len() {
        0 | 1 => 0.0,
        n => {
            let inner: f64 = values[1..n - 1].iter().sum();
            (inner + 0.5 * (values[0] + values[n - 1])) * step
        }
    }
}

/// Composite Simpson rule; `intervals` is rounded up to an even number.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, intervals: usize) -> f64 {
    let m = (intervals.max(2) + 1) & !1;
    let step = (b - a) / m as f64;
    let mut s = f(a) + f(b);
    for i in 1..m {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + i as f64 * step);
    }
    s * step / 3.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_weights_sum_to_two() {
        for order in [1, 2, 5, 16, 20] {
            let (x, w) = gauss_legendre(order);
            assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-13);
            assert!(x.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn gauss_legendre_exact_for_polynomials() {
        // 16 points integrate degree 31 exactly.
        let v = gauss_legendre_panels(|x| x.powi(30), -1.0, 1.0, 1);
        assert!((v - 2.0 / 31.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_integrates_oscillatory() {
        let v = integrate(|x| (40.0 * x).cos(), 0.0, 1.0, 1e-13);
        assert!((v - 40f64.sin() / 40.0).abs() < 1e-14);
    }

    #[test]
    fn simpson_and_trapezoid_agree_on_smooth() {
        let exact = 1.0 - (-1.0f64).exp();
        let s = simpson(|x| (-x).exp(), 0.0, 1.0, 200);
        let t = trapezoid(|x| (-x).exp(), 0.0, 1.0, 2001);
        assert!((s - exact).abs() < 1e-10);
        assert!((t - exact).abs() < 1e-7);
    }
}
