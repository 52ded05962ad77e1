//! Small quadrature and 1-D search helpers shared across modules.

use std::num::NonZeroUsize;

use gauss_quad::GaussLegendre;

/// Composite Gauss-Legendre nodes and weights on [a, b].
#[derive(Debug, Clone)]
pub struct CompositeRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl CompositeRule {
    pub fn new(a: f64, b: f64, panels: usize, order: usize) -> Self {
        let panels = panels.max(1);
        let rule = GaussLegendre::new(NonZeroUsize::new(order.max(2)).expect("order > 0"));
        let pairs = rule.as_node_weight_pairs();
        let width = (b - a) / panels as f64;
        let mut nodes = Vec::with_capacity(panels * pairs.len());
        let mut weights = Vec::with_capacity(panels * pairs.len());
        for p in 0..panels {
            let lo = a + p as f64 * width;
            let mid = lo + 0.5 * width;
            for &(x, w) in pairs {
                nodes.push(mid + 0.5 * width * x);
                weights.push(0.5 * width * w);
            }
        }
        CompositeRule { nodes, weights }
    }

    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// Simpson weights for `n` equally spaced samples with spacing `h`.
///
/// An even sample count closes the last interval with the trapezoid rule.
pub fn simpson_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![0.0; n];
    match n {
        0 => return w,
        1 => return w,
        2 => {
            w[0] = 0.5 * h;
            w[1] = 0.5 * h;
            return w;
        }
        _ => {}
    }
    // Even point counts close with a 3/8 panel on the last four points.
    let m = if n % 2 == 1 { n } else { n - 3 };
    if m >= 3 {
        for (i, wi) in w.iter_mut().enumerate().take(m) {
            *wi = if i == 0 || i == m - 1 {
                h / 3.0
            } else if i % 2 == 1 {
                4.0 * h / 3.0
            } else {
                2.0 * h / 3.0
            };
        }
    }
    if m < n {
        let k = n - 4;
        for (j, c) in [1.0, 3.0, 3.0, 1.0].into_iter().enumerate() {
            w[k + j] += 3.0 * h / 8.0 * c;
        }
    }
    w
}

/// Result of a bounded 1-D maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Maximum {
    pub x: f64,
    pub value: f64,
    /// The maximum sits at a bracket edge.
    pub on_boundary: bool,
}

/// Maximizes `f` over [lo, hi] on a log scale.
///
/// A uniform pre-scan in log x picks the best sample; golden-section search
/// then refines inside the neighbouring bracket until the bracket shrinks
/// below `rel_tol` in log space.
pub fn maximize_log(lo: f64, hi: f64, prescan: usize, rel_tol: f64, mut f: impl FnMut(f64) -> f64) -> Maximum {
    let (la, lb) = (lo.ln(), hi.ln());
    let n = prescan.max(3);
    let grid: Vec<f64> = (0..n).map(|i| la + (lb - la) * i as f64 / (n - 1) as f64).collect();
    let values: Vec<f64> = grid.iter().map(|&u| sanitize(f(u.exp()))).collect();
    let best = values
        .iter()
        .enumerate()
        .fold(0, |b, (i, &v)| if v > values[b] { i } else { b });

    let mut a = grid[best.saturating_sub(1)];
    let mut b = grid[(best + 1).min(n - 1)];
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let mut fc = sanitize(f(c.exp()));
    let mut fd = sanitize(f(d.exp()));
    let tol = rel_tol.max(1e-12);
    for _ in 0..200 {
        if (b - a).abs() < tol {
            break;
        }
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = sanitize(f(c.exp()));
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = sanitize(f(d.exp()));
        }
    }
    let (mut x, mut value) = if fc > fd { (c, fc) } else { (d, fd) };
    if values[best] > value {
        x = grid[best];
        value = values[best];
    }
    let on_boundary = (best == 0 || best == n - 1) && (x - grid[best]).abs() < 10.0 * tol + 1e-9;
    Maximum {
        x: x.exp(),
        value,
        on_boundary,
    }
}

/// Minimizes `f` over [lo, hi] on a log scale; see [`maximize_log`].
pub fn minimize_log(lo: f64, hi: f64, prescan: usize, rel_tol: f64, mut f: impl FnMut(f64) -> f64) -> Maximum {
    let m = maximize_log(lo, hi, prescan, rel_tol, |x| -f(x));
    Maximum { value: -m.value, ..m }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::NEG_INFINITY
    } else {
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_polynomial_exact() {
        let r = CompositeRule::new(0.0, 2.0, 3, 8);
        let v = r.integrate(|x| x.powi(7));
        assert!((v - 2f64.powi(8) / 8.0).abs() < 1e-11);
    }

    #[test]
    fn simpson_integrates_cubic() {
        for n in [4usize, 5, 6, 101, 102] {
            let h = 1.0 / (n - 1) as f64;
            let w = simpson_weights(n, h);
            let v: f64 = w.iter().enumerate().map(|(i, w)| w * (i as f64 * h).powi(3)).sum();
            assert!((v - 1.0 / 4.0).abs() < 1e-12, "n = {n}: {v}");
        }
    }

    #[test]
    fn log_search_finds_interior_peak() {
        let m = maximize_log(1e-6, 1.0, 32, 1e-8, |x| -(x.ln() - 1e-3f64.ln()).powi(2));
        assert!((m.x / 1e-3 - 1.0).abs() < 1e-6);
        assert!(!m.on_boundary);
    }

    #[test]
    fn log_search_flags_edge() {
        let m = maximize_log(1e-3, 1.0, 16, 1e-8, |x| x);
        assert!(m.on_boundary);
        assert!((m.x - 1.0).abs() < 1e-6);
    }
}
