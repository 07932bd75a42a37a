//! Smooth strictly convex norms on R^3 and the geometry of their unit spheres.
//!
//! A norm is represented by its gauge function `F` (positively homogeneous of
//! degree 1, `F(x) = ||x||`) together with analytic gradient and Hessian. The
//! unit sphere is the level set `F = 1`. The inverse Euclidean Gauss map `u`
//! sends a Euclidean-unit direction `n` to the unique boundary point whose
//! outward Euclidean normal is `n`; equivalently `u(n)` maximizes `<y, n>`
//! over the unit ball.

use crate::error::{GeoError, Result};
use crate::rng::SplitMix64;
use nalgebra::{Matrix3, Matrix4, Vector3, Vector4};
use std::sync::Arc;

pub type V3 = Vector3<f64>;
pub type M3 = Matrix3<f64>;

/// Built-in norm families plus user-supplied gauges.
#[derive(Clone)]
pub enum NormKind {
    Euclidean,
    Lp { p: f64 },
    Superellipsoid { a: f64, b: f64, c: f64, p: f64 },
    Custom { label: String, gauge: CustomGauge },
}

impl std::fmt::Debug for NormKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            NormKind::Euclidean => write!(f, "Euclidean"),
            NormKind::Lp { p } => write!(f, "Lp {{ p: {p} }}"),
            NormKind::Superellipsoid { a, b, c, p } => {
                write!(f, "Superellipsoid {{ a: {a}, b: {b}, c: {c}, p: {p} }}")
            }
            NormKind::Custom { label, .. } => write!(f, "Custom {{ label: {label:?} }}"),
        }
    }
}

/// Analytic callbacks for a custom gauge. Finite-difference fallbacks are not
/// provided: second derivatives of user callbacks are too noisy for the
/// curvature ratios downstream.
#[derive(Clone)]
pub struct CustomGauge {
    pub value: Arc<dyn Fn(&V3) -> f64 + Send + Sync>,
    pub grad: Arc<dyn Fn(&V3) -> V3 + Send + Sync>,
    pub hess: Arc<dyn Fn(&V3) -> M3 + Send + Sync>,
}

/// A smooth strictly convex norm with derivative access and unit-sphere
/// scale hints. Immutable after construction.
#[derive(Debug, Clone)]
pub struct NormGauge {
    kind: NormKind,
    /// Smallest Euclidean radius of a unit-sphere point.
    pub r_min: f64,
    /// Largest Euclidean radius of a unit-sphere point.
    pub r_max: f64,
    /// Non-fatal diagnostics from construction (e.g. large lp exponents).
    pub warnings: Vec<String>,
}

/// A point on the unit sphere together with its outward Euclidean normal.
#[derive(Debug, Clone, Copy)]
pub struct SpherePoint {
    pub x: V3,
    pub n: V3,
}

const NEWTON_MAX_ITERS: usize = 50;
/// Acceptance threshold on the residual norm.
const NEWTON_TOL: f64 = 1e-12;
/// Iteration target; damping stops naturally at the floating-point floor.
const NEWTON_TARGET: f64 = 1e-15;

impl NormGauge {
    pub fn new(kind: NormKind) -> Result<Self> {
        match &kind {
            NormKind::Euclidean => {}
            NormKind::Lp { p } => Self::check_exponent(*p)?,
            NormKind::Superellipsoid { a, b, c, p } => {
                Self::check_exponent(*p)?;
                for (name, v) in [("a", *a), ("b", *b), ("c", *c)] {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(GeoError::InvalidInput(format!(
                            "superellipsoid semi-axis {name} must be positive, got {v}"
                        )));
                    }
                }
            }
            NormKind::Custom { .. } => {}
        }
        let mut warnings = Vec::new();
        if let NormKind::Lp { p } | NormKind::Superellipsoid { p, .. } = &kind {
            if *p > 8.0 {
                warnings.push(format!(
                    "lp exponent p = {p} > 8: unit-sphere curvature nearly vanishes at the poles \
                     and Newton conditioning degrades"
                ));
            }
        }
        let mut norm = Self {
            kind,
            r_min: 0.0,
            r_max: 0.0,
            warnings,
        };
        let (r_min, r_max) = norm.bounding_radii();
        norm.r_min = r_min;
        norm.r_max = r_max;
        norm.validate()?;
        Ok(norm)
    }

    fn check_exponent(p: f64) -> Result<()> {
        if !(p > 1.0) || !p.is_finite() {
            return Err(GeoError::InvalidInput(format!(
                "lp exponent must lie in (1, inf), got {p}"
            )));
        }
        Ok(())
    }

    pub fn euclidean() -> Self {
        Self::new(NormKind::Euclidean).expect("euclidean norm is always valid")
    }

    pub fn lp(p: f64) -> Result<Self> {
        Self::new(NormKind::Lp { p })
    }

    pub fn superellipsoid(a: f64, b: f64, c: f64, p: f64) -> Result<Self> {
        Self::new(NormKind::Superellipsoid { a, b, c, p })
    }

    pub fn custom(label: impl Into<String>, gauge: CustomGauge) -> Result<Self> {
        Self::new(NormKind::Custom {
            label: label.into(),
            gauge,
        })
    }

    pub fn kind(&self) -> &NormKind {
        &self.kind
    }

    /// Short display name for reports.
    pub fn name(&self) -> String {
        match &self.kind {
            NormKind::Euclidean => "euclidean".into(),
            NormKind::Lp { p } => format!("lp(p={p})"),
            NormKind::Superellipsoid { a, b, c, p } => {
                format!("superellipsoid(a={a},b={b},c={c},p={p})")
            }
            NormKind::Custom { label, .. } => format!("custom({label})"),
        }
    }

    /// True when the unit-sphere curvature vanishes on the coordinate planes,
    /// which happens for every lp-type gauge with p != 2. Integrands built
    /// from curvature ratios then have integrable singularities along the
    /// preimages of those planes, and quadrature panels are graded toward
    /// them.
    pub fn degenerate_on_coordinate_planes(&self) -> bool {
        match &self.kind {
            NormKind::Euclidean => false,
            NormKind::Lp { p } | NormKind::Superellipsoid { p, .. } => (*p - 2.0).abs() > 1e-12,
            NormKind::Custom { .. } => false,
        }
    }

    /// Gauge value F(x).
    pub fn gauge(&self, x: &V3) -> f64 {
        match &self.kind {
            NormKind::Euclidean => x.norm(),
            NormKind::Lp { p } => lp_gauge(x, *p),
            NormKind::Superellipsoid { a, b, c, p } => {
                lp_gauge(&V3::new(x.x / a, x.y / b, x.z / c), *p)
            }
            NormKind::Custom { gauge, .. } => (gauge.value)(x),
        }
    }

    /// Gradient of the gauge; positively homogeneous of degree 0.
    pub fn grad(&self, x: &V3) -> V3 {
        match &self.kind {
            NormKind::Euclidean => x / x.norm(),
            NormKind::Lp { p } => lp_grad(x, *p),
            NormKind::Superellipsoid { a, b, c, p } => {
                let s = V3::new(x.x / a, x.y / b, x.z / c);
                let g = lp_grad(&s, *p);
                V3::new(g.x / a, g.y / b, g.z / c)
            }
            NormKind::Custom { gauge, .. } => (gauge.grad)(x),
        }
    }

    /// Hessian of the gauge; positively homogeneous of degree -1 with kernel
    /// spanned by x (Euler relation).
    pub fn hess(&self, x: &V3) -> M3 {
        match &self.kind {
            NormKind::Euclidean => {
                let r = x.norm();
                let xh = x / r;
                (M3::identity() - xh * xh.transpose()) / r
            }
            NormKind::Lp { p } => lp_hess(x, *p),
            NormKind::Superellipsoid { a, b, c, p } => {
                let d_inv = V3::new(1.0 / a, 1.0 / b, 1.0 / c);
                let s = V3::new(x.x * d_inv.x, x.y * d_inv.y, x.z * d_inv.z);
                let h = lp_hess(&s, *p);
                let mut out = M3::zeros();
                for i in 0..3 {
                    for j in 0..3 {
                        out[(i, j)] = h[(i, j)] * d_inv[i] * d_inv[j];
                    }
                }
                out
            }
            NormKind::Custom { gauge, .. } => (gauge.hess)(x),
        }
    }

    /// Radial projection of a nonzero vector onto the unit sphere.
    pub fn radial(&self, d: &V3) -> V3 {
        d / self.gauge(d)
    }

    /// Closed-form support point in direction n, when the family admits one.
    fn support_hint(&self, n: &V3) -> Option<V3> {
        match &self.kind {
            NormKind::Euclidean => Some(*n),
            NormKind::Lp { p } => Some(lp_support(n, *p)),
            NormKind::Superellipsoid { a, b, c, p } => {
                let m = V3::new(n.x * a, n.y * b, n.z * c);
                let z = lp_support(&m, *p);
                Some(V3::new(z.x * a, z.y * b, z.z * c))
            }
            NormKind::Custom { .. } => None,
        }
    }

    /// Inverse Euclidean Gauss map of the unit sphere: the point x with
    /// F(x) = 1 whose outward Euclidean normal is n. Solved as the
    /// stationarity system n = mu * grad F(x), F(x) = 1 by damped Newton;
    /// built-in families start from their closed-form support point.
    pub fn inverse_gauss_map(&self, n: &V3) -> Result<SpherePoint> {
        let len = n.norm();
        if (len - 1.0).abs() > 1e-8 {
            return Err(GeoError::InvalidInput(format!(
                "inverse_gauss_map requires a Euclidean-unit direction, |n| = {len}"
            )));
        }
        let x0 = match self.support_hint(n) {
            Some(x) => x,
            None => n / self.gauge(n),
        };
        let mu0 = 1.0 / self.grad(&x0).norm();
        let (x, _mu, residual, iters) = self.support_newton(n, x0, mu0)?;
        if residual > NEWTON_TOL {
            return Err(GeoError::NonConvergence {
                iterations: iters,
                residual,
            });
        }
        Ok(SpherePoint {
            x,
            n: self.grad(&x).normalize(),
        })
    }

    fn support_newton(&self, n: &V3, mut x: V3, mut mu: f64) -> Result<(V3, f64, f64, usize)> {
        let residual = |x: &V3, mu: f64| -> Vector4<f64> {
            let g = self.grad(x);
            Vector4::new(
                n.x - mu * g.x,
                n.y - mu * g.y,
                n.z - mu * g.z,
                self.gauge(x) - 1.0,
            )
        };
        let mut r = residual(&x, mu);
        let mut rn = r.norm();
        let mut iters = 0;
        while rn > NEWTON_TARGET && iters < NEWTON_MAX_ITERS {
            iters += 1;
            let h = self.hess(&x);
            let g = self.grad(&x);
            let mut jac = Matrix4::zeros();
            for i in 0..3 {
                for j in 0..3 {
                    jac[(i, j)] = -mu * h[(i, j)];
                }
                jac[(i, 3)] = -g[i];
                jac[(3, i)] = g[i];
            }
            let lu = jac.lu();
            let Some(step) = lu.solve(&(-r)) else {
                return Err(GeoError::NonConvergence {
                    iterations: iters,
                    residual: rn,
                });
            };
            // Damped step: halve until the residual decreases.
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let x_new = x + t * V3::new(step.x, step.y, step.z);
                let mu_new = mu + t * step.w;
                let r_new = residual(&x_new, mu_new);
                if r_new.norm() < rn {
                    x = x_new;
                    mu = mu_new;
                    r = r_new;
                    rn = r.norm();
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        Ok((x, mu, rn, iters))
    }

    /// Support function h_B(n) = max { <y, n> : F(y) <= 1 }.
    pub fn support_value(&self, n: &V3) -> Result<f64> {
        Ok(self.inverse_gauss_map(n)?.x.dot(n))
    }

    /// Euclidean Gaussian curvature of the unit sphere at a boundary point,
    /// from the level-set formula K = (gF^T adj(HF) gF) / |gF|^4.
    pub fn sphere_curvature(&self, s: &SpherePoint) -> Result<f64> {
        let g = self.grad(&s.x);
        let h = self.hess(&s.x);
        let k = (g.dot(&(adjugate(&h) * g))) / g.norm().powi(4);
        if k <= 0.0 {
            return Err(GeoError::DegenerateCurvature { value: k });
        }
        Ok(k)
    }

    /// Same formula without the positivity gate, for diagnostics and extrema
    /// scans.
    pub fn sphere_curvature_raw(&self, x: &V3) -> f64 {
        let g = self.grad(x);
        let h = self.hess(x);
        (g.dot(&(adjugate(&h) * g))) / g.norm().powi(4)
    }

    /// Area of the unit sphere in the induced area element, by quadrature
    /// over a two-chart atlas. See `measures::sphere_area` for grid control.
    pub fn sphere_area(self: &Arc<Self>) -> Result<f64> {
        crate::measures::sphere_area(self, &crate::measures::GridSpec::sphere_area())
    }

    fn bounding_radii(&self) -> (f64, f64) {
        match &self.kind {
            NormKind::Euclidean => (1.0, 1.0),
            NormKind::Lp { p } => {
                let diag = 3.0f64.powf(0.5 - 1.0 / p);
                (diag.min(1.0), diag.max(1.0))
            }
            _ => {
                // Dense directional scan; the radial map is exact, the scan
                // only brackets its range.
                let mut lo = f64::INFINITY;
                let mut hi: f64 = 0.0;
                let n_theta = 96;
                let n_phi = 192;
                for i in 0..=n_theta {
                    let theta = std::f64::consts::PI * i as f64 / n_theta as f64;
                    for j in 0..n_phi {
                        let phi = 2.0 * std::f64::consts::PI * j as f64 / n_phi as f64;
                        let d = V3::new(
                            theta.sin() * phi.cos(),
                            theta.sin() * phi.sin(),
                            theta.cos(),
                        );
                        let r = 1.0 / self.gauge(&d);
                        lo = lo.min(r);
                        hi = hi.max(r);
                    }
                }
                (lo * (1.0 - 1e-6), hi * (1.0 + 1e-6))
            }
        }
    }

    /// Construction-time sanity checks on random samples: homogeneity,
    /// symmetry, the Euler relation, strict convexity of F^2, and the radial
    /// bounds.
    fn validate(&self) -> Result<()> {
        let mut rng = SplitMix64::new(0x6e6f726d);
        for _ in 0..64 {
            let d = rng.next_unit_vector();
            let x = d * rng.next_range(0.25, 4.0);
            let f = self.gauge(&x);
            if !(f > 0.0) {
                return Err(GeoError::InvalidInput(format!(
                    "gauge must be positive away from the origin, F({x:?}) = {f}"
                )));
            }
            let t = rng.next_range(0.5, 2.0);
            let hom = (self.gauge(&(x * t)) - t * f).abs() / (t * f);
            if hom > 1e-10 {
                return Err(GeoError::InvalidInput(format!(
                    "gauge is not positively homogeneous: relative defect {hom:e}"
                )));
            }
            let sym = (self.gauge(&(-x)) - f).abs() / f;
            if sym > 1e-10 {
                return Err(GeoError::InvalidInput(format!(
                    "gauge is not symmetric: relative defect {sym:e}"
                )));
            }
            let g = self.grad(&x);
            let euler = (g.dot(&x) - f).abs() / f;
            if euler > 1e-8 {
                return Err(GeoError::InvalidInput(format!(
                    "gradient violates the Euler relation: relative defect {euler:e}"
                )));
            }
            // Strict convexity and smoothness: Hess(F^2) positive definite.
            let s = self.radial(&d);
            let gs = self.grad(&s);
            let hs = self.hess(&s);
            let hess_f2 = 2.0 * (gs * gs.transpose() + self.gauge(&s) * hs);
            let eig = hess_f2.symmetric_eigenvalues();
            let min_eig = eig.min();
            if !(min_eig > 0.0) {
                return Err(GeoError::InvalidInput(format!(
                    "Hessian of F^2 is not positive definite on the unit sphere (min eigenvalue {min_eig:e})"
                )));
            }
            let r = s.norm();
            if r < self.r_min * (1.0 - 1e-9) || r > self.r_max * (1.0 + 1e-9) {
                return Err(GeoError::InvalidInput(format!(
                    "sampled unit-sphere radius {r} outside [{}, {}]",
                    self.r_min, self.r_max
                )));
            }
        }
        Ok(())
    }
}

impl SpherePoint {
    /// Validate a candidate unit-sphere point: F(x) = 1 and the stored normal
    /// aligned with grad F(x).
    pub fn new(norm: &NormGauge, x: V3) -> Result<Self> {
        let f = norm.gauge(&x);
        if (f - 1.0).abs() > 1e-10 {
            return Err(GeoError::InvalidInput(format!(
                "point is not on the unit sphere: F(x) = {f}"
            )));
        }
        let n = norm.grad(&x).normalize();
        Ok(Self { x, n })
    }
}

fn lp_gauge(x: &V3, p: f64) -> f64 {
    let m = x.x.abs().max(x.y.abs()).max(x.z.abs());
    if m == 0.0 {
        return 0.0;
    }
    let s = (x.x.abs() / m).powf(p) + (x.y.abs() / m).powf(p) + (x.z.abs() / m).powf(p);
    m * s.powf(1.0 / p)
}

fn lp_grad(x: &V3, p: f64) -> V3 {
    let f = lp_gauge(x, p);
    V3::new(
        (x.x.abs() / f).powf(p - 1.0) * x.x.signum(),
        (x.y.abs() / f).powf(p - 1.0) * x.y.signum(),
        (x.z.abs() / f).powf(p - 1.0) * x.z.signum(),
    )
}

fn lp_hess(x: &V3, p: f64) -> M3 {
    let f = lp_gauge(x, p);
    let g = lp_grad(x, p);
    let mut h = -g * g.transpose();
    for i in 0..3 {
        h[(i, i)] += (x[i].abs() / f).powf(p - 2.0);
    }
    h * ((p - 1.0) / f)
}

/// Support point of the lp ball in direction n (any nonzero n): maximize
/// <y, n> subject to sum |y_i|^p = 1. Componentwise y_i ~ sign(n_i) |n_i|^(1/(p-1)).
fn lp_support(n: &V3, p: f64) -> V3 {
    let e = 1.0 / (p - 1.0);
    let w = V3::new(
        n.x.abs().powf(e) * n.x.signum(),
        n.y.abs().powf(e) * n.y.signum(),
        n.z.abs().powf(e) * n.z.signum(),
    );
    w / lp_gauge(&w, p)
}

/// Adjugate (transposed cofactor matrix) of a 3x3 matrix.
pub fn adjugate(m: &M3) -> M3 {
    let mut a = M3::zeros();
    for i in 0..3 {
        for j in 0..3 {
            let r = [(i + 1) % 3, (i + 2) % 3];
            let c = [(j + 1) % 3, (j + 2) % 3];
            // Cofactor of (j, i) for the transpose.
            a[(i, j)] = m[(c[0], r[0])] * m[(c[1], r[1])] - m[(c[0], r[1])] * m[(c[1], r[0])];
        }
    }
    a
}

/// A smooth strictly convex non-lp test norm: F(x) = (|x|^4 + alpha * sum x_i^4)^(1/4).
/// For small alpha this is a quartic perturbation of the Euclidean ball with
/// everywhere-positive boundary curvature.
pub fn quartic_blend(alpha: f64) -> Result<NormGauge> {
    let value = move |x: &V3| -> f64 {
        let q = x.norm_squared();
        (q * q + alpha * (x.x.powi(4) + x.y.powi(4) + x.z.powi(4))).powf(0.25)
    };
    let grad_g = move |x: &V3| -> V3 {
        let q = x.norm_squared();
        V3::new(
            4.0 * x.x * q + 4.0 * alpha * x.x.powi(3),
            4.0 * x.y * q + 4.0 * alpha * x.y.powi(3),
            4.0 * x.z * q + 4.0 * alpha * x.z.powi(3),
        )
    };
    let hess_g = move |x: &V3| -> M3 {
        let q = x.norm_squared();
        let mut h = 8.0 * x * x.transpose();
        for i in 0..3 {
            h[(i, i)] += 4.0 * q + 12.0 * alpha * x[i] * x[i];
        }
        h
    };
    let gauge = CustomGauge {
        value: Arc::new(value),
        grad: Arc::new(move |x| {
            let f = value(x);
            grad_g(x) / (4.0 * f.powi(3))
        }),
        hess: Arc::new(move |x| {
            let f = value(x);
            let g = grad_g(x);
            hess_g(x) / (4.0 * f.powi(3)) - (3.0 / (16.0 * f.powi(7))) * g * g.transpose()
        }),
    };
    NormGauge::custom(format!("quartic_blend(alpha={alpha})"), gauge)
}
