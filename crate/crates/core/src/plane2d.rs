//! The two-dimensional subtheory: plane norms, the anti-norm, circular
//! curvature, total circular curvature, and the area inequality
//! 2 lambda(D) <= int (1/k_c) ds_a.
//!
//! The circular curvature of a curve is the rate at which the unit circle's
//! arc length is swept by the Birkhoff normal per unit Minkowski arc length
//! of the curve; equivalently eta'(s) = k_c(s) gamma'(s). Its reciprocal is
//! the radius of the osculating Minkowski circle. The area form is the
//! standard determinant.

use crate::error::{GeoError, Result};
use crate::quad::{gauss_legendre, Panels1d};
use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::sync::Arc;

pub type V2 = nalgebra::Vector2<f64>;
pub type M2 = nalgebra::Matrix2<f64>;

#[derive(Debug, Clone, PartialEq)]
pub enum PlaneNormKind {
    Euclidean,
    Lp { p: f64 },
}

/// A smooth strictly convex norm on the plane with analytic derivatives.
#[derive(Debug, Clone)]
pub struct PlaneNorm {
    kind: PlaneNormKind,
    pub r_min: f64,
    pub r_max: f64,
}

fn rot90(x: &V2) -> V2 {
    V2::new(-x.y, x.x)
}

impl PlaneNorm {
    pub fn euclidean() -> Self {
        Self {
            kind: PlaneNormKind::Euclidean,
            r_min: 1.0,
            r_max: 1.0,
        }
    }

    pub fn lp(p: f64) -> Result<Self> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(GeoError::InvalidInput(format!(
                "lp exponent must lie in (1, inf), got {p}"
            )));
        }
        let diag = 2.0f64.powf(0.5 - 1.0 / p);
        Ok(Self {
            kind: PlaneNormKind::Lp { p },
            r_min: diag.min(1.0),
            r_max: diag.max(1.0),
        })
    }

    pub fn name(&self) -> String {
        match &self.kind {
            PlaneNormKind::Euclidean => "euclidean".into(),
            PlaneNormKind::Lp { p } => format!("lp(p={p})"),
        }
    }

    pub fn degenerate_on_axes(&self) -> bool {
        matches!(&self.kind, PlaneNormKind::Lp { p } if (*p - 2.0).abs() > 1e-12)
    }

    pub fn gauge(&self, x: &V2) -> f64 {
        match &self.kind {
            PlaneNormKind::Euclidean => x.norm(),
            PlaneNormKind::Lp { p } => {
                let m = x.x.abs().max(x.y.abs());
                if m == 0.0 {
                    return 0.0;
                }
                m * ((x.x.abs() / m).powf(*p) + (x.y.abs() / m).powf(*p)).powf(1.0 / p)
            }
        }
    }

    pub fn grad(&self, x: &V2) -> V2 {
        match &self.kind {
            PlaneNormKind::Euclidean => x / x.norm(),
            PlaneNormKind::Lp { p } => {
                let f = self.gauge(x);
                V2::new(
                    (x.x.abs() / f).powf(p - 1.0) * x.x.signum(),
                    (x.y.abs() / f).powf(p - 1.0) * x.y.signum(),
                )
            }
        }
    }

    pub fn hess(&self, x: &V2) -> M2 {
        match &self.kind {
            PlaneNormKind::Euclidean => {
                let r = x.norm();
                let xh = x / r;
                (M2::identity() - xh * xh.transpose()) / r
            }
            PlaneNormKind::Lp { p } => {
                let f = self.gauge(x);
                let g = self.grad(x);
                let mut h = -g * g.transpose();
                h[(0, 0)] += (x.x.abs() / f).powf(p - 2.0);
                h[(1, 1)] += (x.y.abs() / f).powf(p - 2.0);
                h * ((p - 1.0) / f)
            }
        }
    }

    /// Unit circle point in direction angle t, with derivatives in t.
    pub fn circle_jet(&self, t: f64) -> (V2, V2, V2) {
        let (s, c) = t.sin_cos();
        let d = V2::new(c, s);
        let d1 = V2::new(-s, c);
        let d2 = -d;
        let g = self.gauge(&d);
        let grad = self.grad(&d);
        let hess = self.hess(&d);
        let gt = grad.dot(&d1);
        let gtt = d1.dot(&(hess * d1)) + grad.dot(&d2);
        let m = d / g;
        let m1 = d1 / g - d * (gt / (g * g));
        let m2 = d2 / g - 2.0 * d1 * (gt / (g * g)) - d * (gtt / (g * g))
            + 2.0 * d * (gt * gt / (g * g * g));
        (m, m1, m2)
    }

    pub fn circle_point(&self, t: f64) -> V2 {
        let (s, c) = t.sin_cos();
        let d = V2::new(c, s);
        d / self.gauge(&d)
    }

    /// Support point in direction n (the inverse Gauss map of the circle).
    pub fn support_point(&self, n: &V2) -> V2 {
        match &self.kind {
            PlaneNormKind::Euclidean => n / n.norm(),
            PlaneNormKind::Lp { p } => {
                let e = 1.0 / (p - 1.0);
                let w = V2::new(
                    n.x.abs().powf(e) * n.x.signum(),
                    n.y.abs().powf(e) * n.y.signum(),
                );
                w / self.gauge(&w)
            }
        }
    }

    /// Support point by 1D Newton on the circle angle, started from the
    /// winner of a coarse multistart scan. Steps are clamped: the flat arcs
    /// of lp-type circles make undamped Newton jump basins.
    pub fn support_point_newton(&self, n: &V2) -> Result<V2> {
        let mut t = 0.0;
        let mut best = f64::NEG_INFINITY;
        for i in 0..64 {
            let cand = TAU * i as f64 / 64.0;
            let value = self.circle_point(cand).dot(n);
            if value > best {
                best = value;
                t = cand;
            }
        }
        for _ in 0..80 {
            let (_, m1, m2) = self.circle_jet(t);
            let h1 = m1.dot(n);
            let h2 = m2.dot(n);
            let step = if h2 < -1e-300 {
                (h1 / h2).clamp(-0.2, 0.2)
            } else {
                // Outside the concave basin: fall back to an ascent nudge.
                0.05f64.copysign(-h1) * -1.0
            };
            t -= step;
            if step.abs() < 1e-15 {
                return Ok(self.circle_point(t));
            }
        }
        let m = self.circle_point(t);
        let (_, m1, _) = self.circle_jet(t);
        if m1.dot(n).abs() < 1e-10 {
            return Ok(m);
        }
        Err(GeoError::NonConvergence {
            iterations: 80,
            residual: m1.dot(n).abs(),
        })
    }

    /// Euclidean curvature of the unit circle at a boundary point.
    pub fn circle_curvature(&self, x: &V2) -> f64 {
        let g = self.grad(x);
        let h = self.hess(x);
        (h[(1, 1)] * g.x * g.x - 2.0 * h[(0, 1)] * g.x * g.y + h[(0, 0)] * g.y * g.y)
            / g.norm().powi(3)
    }

    /// Minkowski length of the unit circle.
    pub fn circle_length(&self) -> f64 {
        self.integrate_circle(|_, m1| self.gauge(m1))
    }

    /// Anti-norm length of the unit circle.
    pub fn circle_length_anti(&self) -> f64 {
        self.integrate_circle(|_, m1| antinorm(self, m1))
    }

    fn integrate_circle<F: Fn(f64, &V2) -> f64>(&self, f: F) -> f64 {
        let quarters = [0.0, FRAC_PI_2, PI, 1.5 * PI, TAU];
        let levels = if self.degenerate_on_axes() { 30 } else { 0 };
        let panels = Panels1d::build(0.0, TAU, 16, &quarters, &quarters, levels, 0.25);
        let rule = gauss_legendre(8);
        let (nodes, weights) = panels.nodes(&rule);
        let mut total = 0.0;
        for (t, w) in nodes.iter().zip(weights.iter()) {
            let (_, m1, _) = self.circle_jet(*t);
            total += w * f(*t, &m1);
        }
        total
    }
}

/// Anti-norm: ||x||_a = sup { det(x, y) : y in S }, the support-style
/// maximization over the unit circle (1D Newton on the angle, multistart).
pub fn antinorm(norm: &PlaneNorm, x: &V2) -> f64 {
    if x.norm() == 0.0 {
        return 0.0;
    }
    // det(x, y) = <rot90(x), y>, so the maximizer is the support point of
    // the rotated direction.
    let dir = rot90(x);
    let n = dir / dir.norm();
    let m = norm
        .support_point_newton(&n)
        .unwrap_or_else(|_| norm.support_point(&n));
    dir.dot(&m)
}

/// Closed convex plane curves, parametrized counterclockwise on [0, 2 pi).
#[derive(Clone)]
pub enum PlaneCurve {
    Ellipse { a: f64, b: f64 },
    /// r * unit circle of a norm.
    NormCircle { r: f64, norm: Arc<PlaneNorm> },
}

impl PlaneCurve {
    pub fn ellipse(a: f64, b: f64) -> Self {
        Self::Ellipse { a, b }
    }

    pub fn norm_circle(r: f64, norm: &Arc<PlaneNorm>) -> Self {
        Self::NormCircle {
            r,
            norm: norm.clone(),
        }
    }

    pub fn name(&self) -> String {
        match self {
            Self::Ellipse { a, b } => format!("ellipse({a},{b})"),
            Self::NormCircle { r, norm } => format!("{r} * circle[{}]", norm.name()),
        }
    }

    /// Position and first two derivatives at parameter t.
    pub fn jet(&self, t: f64) -> (V2, V2, V2) {
        match self {
            Self::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                (
                    V2::new(a * c, b * s),
                    V2::new(-a * s, b * c),
                    V2::new(-a * c, -b * s),
                )
            }
            Self::NormCircle { r, norm } => {
                let (m, m1, m2) = norm.circle_jet(t);
                (*r * m, *r * m1, *r * m2)
            }
        }
    }

    /// Parameter values where the tangent is parallel to a coordinate axis
    /// (the integrand smoothness drops there under lp-type norms).
    pub fn axis_tangent_params(&self) -> Vec<f64> {
        vec![0.0, FRAC_PI_2, PI, 1.5 * PI, TAU]
    }

    /// Outward Euclidean normal direction (unnormalized), from the
    /// cancellation-free field of each variant.
    pub fn outward_normal(&self, t: f64) -> V2 {
        match self {
            Self::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                V2::new(c / a, s / b)
            }
            Self::NormCircle { norm, .. } => norm.grad(&norm.circle_point(t)),
        }
    }

    /// Signed Euclidean curvature (positive for counterclockwise convex).
    /// Closed forms per variant: the generic cross-product formula loses all
    /// relative accuracy where the curvature nearly vanishes.
    pub fn euclid_curvature(&self, t: f64) -> f64 {
        match self {
            Self::Ellipse { a, b } => {
                let (s, c) = t.sin_cos();
                a * b / (a * a * s * s + b * b * c * c).powf(1.5)
            }
            Self::NormCircle { r, norm } => {
                let m = norm.circle_point(t);
                norm.circle_curvature(&m) / r
            }
        }
    }

    /// Area enclosed, by the Green formula (norm-independent).
    pub fn enclosed_area(&self) -> f64 {
        let rule = gauss_legendre(8);
        let panels = Panels1d::uniform(0.0, TAU, 32);
        let (nodes, weights) = panels.nodes(&rule);
        let mut area = 0.0;
        for (t, w) in nodes.iter().zip(weights.iter()) {
            let (p, d1, _) = self.jet(*t);
            area += 0.5 * w * (p.x * d1.y - p.y * d1.x);
        }
        area
    }
}

/// Outward Birkhoff normal of the curve at parameter t: the unit-circle
/// point whose supporting line is parallel to the tangent, on the outward
/// side (det(eta, gamma') > 0 for counterclockwise curves).
pub fn birkhoff_normal_2d(curve: &PlaneCurve, norm: &PlaneNorm, t: f64) -> V2 {
    let raw = curve.outward_normal(t);
    norm.support_point(&(raw / raw.norm()))
}

/// Circular curvature by central differences of the Birkhoff normal. The
/// ratio <d eta/dt, gamma'> / |gamma'|^2 is parametrization-free and equals
/// k_c in Minkowski arc length.
pub fn circular_curvature(curve: &PlaneCurve, norm: &PlaneNorm, t: f64) -> Result<f64> {
    let h = 1e-6;
    let fd = |h: f64| -> f64 {
        let e_p = birkhoff_normal_2d(curve, norm, t + h);
        let e_m = birkhoff_normal_2d(curve, norm, t - h);
        let (_, d1, _) = curve.jet(t);
        ((e_p - e_m) / (2.0 * h)).dot(&d1) / d1.norm_squared()
    };
    // Richardson on the second-order central difference.
    let coarse = fd(h);
    let fine = fd(0.5 * h);
    Ok((4.0 * fine - coarse) / 3.0)
}

/// Circular curvature as the ratio of Euclidean curvatures of the curve and
/// of the unit circle at Birkhoff-corresponding points; the independent
/// oracle and the route used inside integrals.
pub fn circular_curvature_ratio(curve: &PlaneCurve, norm: &PlaneNorm, t: f64) -> f64 {
    let eta = birkhoff_normal_2d(curve, norm, t);
    curve.euclid_curvature(t) / norm.circle_curvature(&eta)
}

fn curve_panels(curve: &PlaneCurve, norm: &PlaneNorm, base: usize) -> Panels1d {
    let breaks = curve.axis_tangent_params();
    let levels = if norm.degenerate_on_axes() { 30 } else { 0 };
    Panels1d::build(0.0, TAU, base, &breaks, &breaks, levels, 0.25)
}

/// Total circular curvature int k_c ds over the closed curve, in Minkowski
/// arc length.
pub fn total_circular_curvature(curve: &PlaneCurve, norm: &PlaneNorm) -> Result<f64> {
    let rule = gauss_legendre(8);
    let panels = curve_panels(curve, norm, 16);
    let (nodes, weights) = panels.nodes(&rule);
    let mut total = 0.0;
    for (t, w) in nodes.iter().zip(weights.iter()) {
        let (_, d1, _) = curve.jet(*t);
        let kc = circular_curvature_ratio(curve, norm, *t);
        total += w * kc * norm.gauge(&d1);
    }
    Ok(total)
}

/// Both sides of the area inequality: (2 area(D), int (1/k_c) ds_a) with the
/// reciprocal curvature integrated in anti-norm arc length.
pub fn area_curvature_bound(curve: &PlaneCurve, norm: &PlaneNorm) -> Result<(f64, f64)> {
    let rule = gauss_legendre(8);
    let panels = curve_panels(curve, norm, 16);
    let (nodes, weights) = panels.nodes(&rule);
    let mut rhs = 0.0;
    let mut min_kc = f64::INFINITY;
    for (t, w) in nodes.iter().zip(weights.iter()) {
        let (_, d1, _) = curve.jet(*t);
        let kc = circular_curvature_ratio(curve, norm, *t);
        min_kc = min_kc.min(kc);
        rhs += w * antinorm(norm, &d1) / kc;
    }
    if min_kc <= 0.0 {
        return Err(GeoError::NonPositiveCurvature { min_kc });
    }
    Ok((2.0 * curve.enclosed_area(), rhs))
}

/// Minkowski and anti-norm arc length of the curve over [0, t], by
/// cumulative quadrature; inversion uses Newton with the analytic integrand
/// as derivative.
pub struct ArcLengthTable {
    /// Panel-end parameters, cumulative Minkowski length, cumulative
    /// anti-norm length.
    params: Vec<f64>,
    s: Vec<f64>,
    s_a: Vec<f64>,
}

impl ArcLengthTable {
    pub fn new(curve: &PlaneCurve, norm: &PlaneNorm, n_panels: usize) -> Self {
        let rule = gauss_legendre(8);
        let panels = Panels1d::uniform(0.0, TAU, n_panels);
        let mut params = vec![0.0];
        let mut s = vec![0.0];
        let mut s_a = vec![0.0];
        for p in 0..panels.panel_count() {
            let a = panels.edges[p];
            let b = panels.edges[p + 1];
            let mid = 0.5 * (a + b);
            let half = 0.5 * (b - a);
            let mut ds = 0.0;
            let mut ds_a = 0.0;
            for (x, w) in rule.0.iter().zip(rule.1.iter()) {
                let t = mid + half * x;
                let (_, d1, _) = curve.jet(t);
                ds += half * w * norm.gauge(&d1);
                ds_a += half * w * antinorm(norm, &d1);
            }
            params.push(b);
            s.push(s.last().unwrap() + ds);
            s_a.push(s_a.last().unwrap() + ds_a);
        }
        Self { params, s, s_a }
    }

    pub fn total_length(&self) -> f64 {
        *self.s.last().unwrap()
    }

    pub fn total_length_anti(&self) -> f64 {
        *self.s_a.last().unwrap()
    }

    pub fn s_of_t(&self, curve: &PlaneCurve, norm: &PlaneNorm, t: f64) -> f64 {
        self.lookup(t, &self.s, |t| {
            let (_, d1, _) = curve.jet(t);
            norm.gauge(&d1)
        })
    }

    pub fn s_a_of_t(&self, curve: &PlaneCurve, norm: &PlaneNorm, t: f64) -> f64 {
        self.lookup(t, &self.s_a, |t| {
            let (_, d1, _) = curve.jet(t);
            antinorm(norm, &d1)
        })
    }

    fn lookup<F: Fn(f64) -> f64>(&self, t: f64, table: &[f64], speed: F) -> f64 {
        let idx = self
            .params
            .partition_point(|&p| p <= t)
            .saturating_sub(1)
            .min(self.params.len() - 2);
        // One Gauss panel from the table entry to t.
        let a = self.params[idx];
        let rule = gauss_legendre(8);
        let mid = 0.5 * (a + t);
        let half = 0.5 * (t - a);
        let mut ds = 0.0;
        for (x, w) in rule.0.iter().zip(rule.1.iter()) {
            ds += half * w * speed(mid + half * x);
        }
        table[idx] + ds
    }

    /// Invert s(t) = target by bisection plus Newton with the analytic
    /// speed.
    pub fn t_of_s(&self, curve: &PlaneCurve, norm: &PlaneNorm, target: f64) -> f64 {
        let total = self.total_length();
        let target = target.rem_euclid(total);
        let mut lo = 0.0;
        let mut hi = TAU;
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if self.s_of_t(curve, norm, mid) < target {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        // Newton polish.
        let mut t = 0.5 * (lo + hi);
        for _ in 0..8 {
            let (_, d1, _) = curve.jet(t);
            let err = self.s_of_t(curve, norm, t) - target;
            t -= err / norm.gauge(&d1);
        }
        t
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn antinorm_of_euclidean_is_euclidean() {
        let norm = PlaneNorm::euclidean();
        assert_relative_eq!(antinorm(&norm, &V2::new(1.0, 0.0)), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            antinorm(&norm, &V2::new(3.0, -4.0)),
            5.0,
            max_relative = 1e-12
        );
        assert_eq!(antinorm(&norm, &V2::zeros()), 0.0);
    }

    #[test]
    fn antinorm_lp4_matches_brute_force() {
        let norm = PlaneNorm::lp(4.0).unwrap();
        let x = V2::new(1.0, 1.0);
        // Dense scan of det(x, y) over the unit circle.
        let mut best = f64::NEG_INFINITY;
        let n = 1_000_000;
        for i in 0..n {
            let t = TAU * i as f64 / n as f64;
            let y = norm.circle_point(t);
            best = best.max(x.x * y.y - x.y * y.x);
        }
        assert_relative_eq!(antinorm(&norm, &x), best, max_relative = 1e-9);
    }

    #[test]
    fn antinorm_is_a_norm() {
        let norm = PlaneNorm::lp(3.0).unwrap();
        let mut rng = crate::rng::SplitMix64::new(21);
        for _ in 0..200 {
            let x = V2::new(rng.next_range(-2.0, 2.0), rng.next_range(-2.0, 2.0));
            let y = V2::new(rng.next_range(-2.0, 2.0), rng.next_range(-2.0, 2.0));
            let t = rng.next_range(0.1, 3.0);
            if x.norm() < 1e-3 || y.norm() < 1e-3 {
                continue;
            }
            let ax = antinorm(&norm, &x);
            assert_relative_eq!(antinorm(&norm, &(t * x)), t * ax, max_relative = 1e-9);
            assert_relative_eq!(antinorm(&norm, &(-x)), ax, max_relative = 1e-9);
            assert!(antinorm(&norm, &(x + y)) <= ax + antinorm(&norm, &y) + 1e-9);
        }
    }

    #[test]
    fn newton_support_matches_closed_form() {
        let norm = PlaneNorm::lp(4.0).unwrap();
        let mut rng = crate::rng::SplitMix64::new(5);
        for _ in 0..50 {
            let a = rng.next_range(0.0, TAU);
            let n = V2::new(a.cos(), a.sin());
            let newton = norm.support_point_newton(&n).unwrap();
            let closed = norm.support_point(&n);
            assert!((newton - closed).norm() < 1e-8, "mismatch at angle {a}");
        }
    }

    #[test]
    fn euclid_circle_curvature_is_reciprocal_radius() {
        let norm = PlaneNorm::euclidean();
        let r = 1.7;
        let circle = PlaneCurve::ellipse(r, r);
        for t in [0.3, 1.2, 4.0] {
            assert_relative_eq!(
                circular_curvature(&circle, &norm, t).unwrap(),
                1.0 / r,
                max_relative = 1e-9
            );
            assert_relative_eq!(
                circular_curvature_ratio(&circle, &norm, t),
                1.0 / r,
                max_relative = 1e-12
            );
        }
    }

    #[test]
    fn unit_circle_in_own_norm_has_unit_curvature() {
        let norm = Arc::new(PlaneNorm::lp(4.0).unwrap());
        let circle = PlaneCurve::norm_circle(1.0, &norm);
        for t in [0.4, 1.0, 2.8, 5.5] {
            assert_relative_eq!(
                circular_curvature(&circle, &norm, t).unwrap(),
                1.0,
                max_relative = 1e-8
            );
            assert_relative_eq!(
                circular_curvature_ratio(&circle, &norm, t),
                1.0,
                max_relative = 1e-10
            );
        }
        // Scaled circle: k_c = 1/r.
        let r = 2.3;
        let scaled = PlaneCurve::norm_circle(r, &norm);
        assert_relative_eq!(
            circular_curvature_ratio(&scaled, &norm, 0.9),
            1.0 / r,
            max_relative = 1e-10
        );
    }

    #[test]
    fn fd_curvature_matches_ratio_oracle_on_ellipse() {
        let norm = PlaneNorm::lp(4.0).unwrap();
        let curve = PlaneCurve::ellipse(2.0, 1.0);
        for t in [0.35, 0.9, 1.8, 2.6, 4.1, 5.3] {
            let fd = circular_curvature(&curve, &norm, t).unwrap();
            let ratio = circular_curvature_ratio(&curve, &norm, t);
            assert_relative_eq!(fd, ratio, max_relative = 1e-5);
        }
    }

    #[test]
    fn normalization_det_eta_gamma_is_antinorm_speed() {
        let norm = PlaneNorm::lp(3.0).unwrap();
        let curve = PlaneCurve::ellipse(2.0, 1.0);
        for t in [0.3, 1.1, 2.0, 3.7, 5.9] {
            let (_, d1, _) = curve.jet(t);
            let eta = birkhoff_normal_2d(&curve, &norm, t);
            let det = eta.x * d1.y - eta.y * d1.x;
            assert!(det > 0.0, "Birkhoff normal must be outward");
            assert_relative_eq!(det, antinorm(&norm, &d1), max_relative = 1e-9);
        }
    }

    #[test]
    fn total_curvature_euclidean_is_2pi() {
        let norm = PlaneNorm::euclidean();
        for curve in [PlaneCurve::ellipse(2.0, 1.0), PlaneCurve::ellipse(1.3, 1.3)] {
            assert_relative_eq!(
                total_circular_curvature(&curve, &norm).unwrap(),
                TAU,
                max_relative = 1e-10
            );
        }
    }

    #[test]
    fn total_curvature_equals_circle_length() {
        let norm = Arc::new(PlaneNorm::lp(4.0).unwrap());
        let ellipse = PlaneCurve::ellipse(2.0, 1.0);
        let total = total_circular_curvature(&ellipse, &norm).unwrap();
        let circle_len = norm.circle_length();
        assert_relative_eq!(total, circle_len, max_relative = 1e-5);
        // The unit circle under its own norm: k_c = 1 along its own length.
        let circle = PlaneCurve::norm_circle(1.0, &norm);
        assert_relative_eq!(
            total_circular_curvature(&circle, &norm).unwrap(),
            circle_len,
            max_relative = 1e-9
        );
    }

    #[test]
    fn area_bound_equality_on_circles() {
        // Euclidean circle of radius r: both sides are 2 pi r^2.
        let norm = PlaneNorm::euclidean();
        let r = 1.4;
        let circle = PlaneCurve::ellipse(r, r);
        let (lhs, rhs) = area_curvature_bound(&circle, &norm).unwrap();
        assert_relative_eq!(lhs, TAU * r * r, max_relative = 1e-10);
        assert_relative_eq!(rhs, TAU * r * r, max_relative = 1e-10);
        // Minkowski circle in its own norm: equality.
        let lp = Arc::new(PlaneNorm::lp(4.0).unwrap());
        let mc = PlaneCurve::norm_circle(1.6, &lp);
        let (lhs, rhs) = area_curvature_bound(&mc, &lp).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-5);
    }

    #[test]
    fn area_bound_strict_on_ellipse() {
        let lp = PlaneNorm::lp(4.0).unwrap();
        let ellipse = PlaneCurve::ellipse(2.0, 1.0);
        let (lhs, rhs) = area_curvature_bound(&ellipse, &lp).unwrap();
        assert!(
            lhs < rhs - 1e-6,
            "expected strict inequality, got {lhs} vs {rhs}"
        );
        assert_relative_eq!(lhs, 2.0 * PI * 2.0, max_relative = 1e-10);
    }

    /// Fit a Minkowski circle through three nearby curve points by Newton on
    /// (center, radius).
    fn osculating_circle_radius(
        curve: &PlaneCurve,
        norm: &PlaneNorm,
        t: f64,
        spacing: f64,
    ) -> f64 {
        let pts = [
            curve.jet(t - spacing).0,
            curve.jet(t).0,
            curve.jet(t + spacing).0,
        ];
        // Start from the Euclidean circumcircle.
        let (p1, p2, p3) = (pts[0], pts[1], pts[2]);
        let d = 2.0 * (p1.x * (p2.y - p3.y) + p2.x * (p3.y - p1.y) + p3.x * (p1.y - p2.y));
        let u1 = p1.norm_squared();
        let u2 = p2.norm_squared();
        let u3 = p3.norm_squared();
        let mut center = V2::new(
            (u1 * (p2.y - p3.y) + u2 * (p3.y - p1.y) + u3 * (p1.y - p2.y)) / d,
            (u1 * (p3.x - p2.x) + u2 * (p1.x - p3.x) + u3 * (p2.x - p1.x)) / d,
        );
        let mut r = norm.gauge(&(p1 - center));
        // Newton on F(p_i - c) = r.
        for _ in 0..40 {
            let mut jac = nalgebra::Matrix3::<f64>::zeros();
            let mut res = nalgebra::Vector3::<f64>::zeros();
            for (i, p) in pts.iter().enumerate() {
                let w = p - center;
                let g = norm.grad(&w);
                jac[(i, 0)] = -g.x;
                jac[(i, 1)] = -g.y;
                jac[(i, 2)] = -1.0;
                res[i] = norm.gauge(&w) - r;
            }
            let Some(step) = jac.lu().solve(&(-res)) else {
                break;
            };
            center.x += step.x;
            center.y += step.y;
            r += step.z;
            if step.norm() < 1e-14 {
                break;
            }
        }
        r
    }

    #[test]
    fn reciprocal_curvature_is_osculating_radius() {
        let norm = PlaneNorm::lp(3.0).unwrap();
        let curve = PlaneCurve::ellipse(2.0, 1.0);
        for t in [0.4, 1.1, 2.3, 3.9] {
            let kc = circular_curvature_ratio(&curve, &norm, t);
            assert!(kc > 0.0);
            let r_fit = osculating_circle_radius(&curve, &norm, t, 1e-3);
            assert_relative_eq!(1.0 / kc, r_fit, max_relative = 1e-3);
        }
    }

    #[test]
    fn arclength_tables_invert() {
        let norm = PlaneNorm::lp(4.0).unwrap();
        let curve = PlaneCurve::ellipse(2.0, 1.0);
        let table = ArcLengthTable::new(&curve, &norm, 64);
        assert!(table.total_length() > 0.0);
        assert!(table.total_length_anti() > 0.0);
        for t in [0.7, 2.2, 4.9] {
            let s = table.s_of_t(&curve, &norm, t);
            let t_back = table.t_of_s(&curve, &norm, s);
            assert_relative_eq!(t_back, t, max_relative = 1e-9);
            assert!(table.s_a_of_t(&curve, &norm, t) > 0.0);
        }
    }
}
