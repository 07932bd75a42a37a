//! Gauss-Legendre panel quadrature.
//!
//! Panels may be graded geometrically toward known singular parameter values
//! (curves where the unit-sphere curvature of an lp-type norm vanishes map to
//! parameter lines on the built-in charts), restoring accuracy for integrable
//! singularities of the form |t - t0|^(-alpha), alpha < 1.

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess, then Newton on P_n.
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// One-dimensional panel decomposition of an interval.
#[derive(Debug, Clone)]
pub struct Panels1d {
    /// Sorted panel boundaries, first = lo, last = hi.
    pub edges: Vec<f64>,
}

impl Panels1d {
    /// Uniform panels plus hard breaks plus geometric grading toward the
    /// listed singular points. Breaks and singular points outside (lo, hi)
    /// are ignored.
    pub fn build(
        lo: f64,
        hi: f64,
        base: usize,
        breaks: &[f64],
        singular: &[f64],
        levels: usize,
        ratio: f64,
    ) -> Self {
        assert!(hi > lo && base >= 1);
        let span = hi - lo;
        let mut edges: Vec<f64> = (0..=base).map(|i| lo + span * i as f64 / base as f64).collect();
        let interior = |x: f64| x > lo && x < hi;
        for &b in breaks {
            if interior(b) {
                edges.push(b);
            }
        }
        for &s in singular {
            let reach = span / (2.0 * base as f64);
            for k in 0..=levels {
                let d = reach * ratio.powi(k as i32);
                for x in [s - d, s + d] {
                    if interior(x) {
                        edges.push(x);
                    }
                }
            }
            if interior(s) {
                edges.push(s);
            }
        }
        edges.sort_by(|a, b| a.partial_cmp(b).unwrap());
        // Collapse panels below floating-point resolution; near zero the
        // absolute scale is what matters, so grading toward an endpoint at 0
        // can go essentially arbitrarily deep.
        edges.dedup_by(|a, b| {
            (*a - *b).abs() <= 1e-18 * span + 4.0 * f64::EPSILON * a.abs().max(b.abs())
        });
        // Endpoints must survive dedup exactly.
        edges[0] = lo;
        let last = edges.len() - 1;
        edges[last] = hi;
        Self { edges }
    }

    pub fn uniform(lo: f64, hi: f64, n: usize) -> Self {
        Self::build(lo, hi, n, &[], &[], 0, 0.5)
    }

    pub fn panel_count(&self) -> usize {
        self.edges.len() - 1
    }

    /// Scaled nodes and weights over every panel, concatenated.
    pub fn nodes(&self, rule: &(Vec<f64>, Vec<f64>)) -> (Vec<f64>, Vec<f64>) {
        let (xs, ws) = rule;
        let mut nodes = Vec::with_capacity(self.panel_count() * xs.len());
        let mut weights = Vec::with_capacity(self.panel_count() * xs.len());
        for p in 0..self.panel_count() {
            let a = self.edges[p];
            let b = self.edges[p + 1];
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            for (x, w) in xs.iter().zip(ws.iter()) {
                nodes.push(mid + half * x);
                weights.push(half * w);
            }
        }
        (nodes, weights)
    }
}

/// Integrate a 1D function over graded panels.
pub fn integrate_1d<F: Fn(f64) -> f64>(panels: &Panels1d, order: usize, f: F) -> f64 {
    let rule = gauss_legendre(order);
    let (nodes, weights) = panels.nodes(&rule);
    let mut sum = 0.0;
    for (x, w) in nodes.iter().zip(weights.iter()) {
        sum += w * f(*x);
    }
    sum
}
