//! Fixed-order Gauss-Legendre quadrature.
//!
//! Nodes and weights are generated by Newton iteration on the Legendre
//! polynomial and memoised per thread for the most recently used order, which
//! covers the common case of one solver configuration per run.

use std::cell::RefCell;

/// (node, weight) pairs on [-1, 1].
type Rule = Vec<(f64, f64)>;

thread_local! {
    static LAST_RULE: RefCell<Option<(usize, Rule)>> = const { RefCell::new(None) };
}

/// Evaluate `f` with the (node, weight) table of the `n`-point rule on [-1, 1].
pub(crate) fn with_rule<R>(n: usize, f: impl FnOnce(&[(f64, f64)]) -> R) -> R {
    LAST_RULE.with(|cell| {
        let mut memo = cell.borrow_mut();
        let stale = !matches!(&*memo, Some((k, _)) if *k == n);
        if stale {
            *memo = Some((n, gauss_legendre(n)));
        }
        f(&memo.as_ref().unwrap().1)
    })
}

/// Integrate `f` over [0, 1] with the `n`-point Gauss-Legendre rule.
#[cfg(test)]
fn integrate_unit<F: Fn(f64) -> f64>(n: usize, f: F) -> f64 {
    with_rule(n, |rule| {
        rule.iter()
            .map(|&(x, w)| 0.5 * w * f(0.5 * (x + 1.0)))
            .sum()
    })
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1].
pub(crate) fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 2, "rule order must be at least 2");
    let mut rule = Vec::with_capacity(n);
    for i in 1..=n {
        // Tricomi-style initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.push((x, w));
    }
    rule
}

/// P_n(x) and P_n'(x) via the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p_prev = 1.0;
    let mut p = x;
    for k in 2..=n {
        let kf = k as f64;
        let p_next = ((2.0 * kf - 1.0) * x * p - (kf - 1.0) * p_prev) / kf;
        p_prev = p;
        p = p_next;
    }
    let dp = n as f64 * (x * p - p_prev) / (x * x - 1.0);
    (p, dp)
}
