//! Parametrized immersed surfaces with derivative access.
//!
//! Closed sphere-like surfaces carry a two-chart atlas (polar charts around
//! the z and x axes) with a smooth partition of unity masking the pole caps;
//! the torus has a single doubly-periodic chart. Charts also record the
//! parameter lines where the Euclidean normal crosses coordinate planes:
//! under lp-type norms the curvature integrands lose smoothness exactly
//! there, and quadrature grids break or grade panels on those lines.

use crate::error::{GeoError, Result};
use crate::expr::Expr;
use crate::norm::{NormGauge, V3};
use nalgebra::Matrix2;
use std::sync::Arc;

const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;
const PI: f64 = std::f64::consts::PI;
const TAU: f64 = std::f64::consts::TAU;

/// Position and derivatives of a chart at one parameter point.
#[derive(Debug, Clone, Copy)]
pub struct ChartJet {
    pub p: V3,
    pub du: V3,
    pub dv: V3,
    pub duu: V3,
    pub duv: V3,
    pub dvv: V3,
}

/// Polar axis of a radial chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PolarAxis {
    Z,
    X,
}

/// Star-shaped profiles parametrized radially over directions.
#[derive(Clone)]
pub enum RadialShape {
    /// r * unit sphere of the norm.
    MinkowskiSphere { r: f64, norm: Arc<NormGauge> },
    Ellipsoid { a: f64, b: f64, c: f64 },
}

#[derive(Clone)]
pub enum ChartMap {
    Radial {
        axis: PolarAxis,
        shape: RadialShape,
    },
    Torus {
        big_r: f64,
        small_r: f64,
    },
    Graph {
        expr: Arc<Expr>,
        fd_step: f64,
    },
    Plane,
    /// Offset chart psi = phi + c * eta of a base chart; first derivatives
    /// are analytic through the differential of the Birkhoff normal, second
    /// derivatives by central differences of the first.
    Parallel {
        base: Arc<SurfaceChart>,
        norm: Arc<NormGauge>,
        c: f64,
    },
    /// Homothety c * base.
    Scaled {
        base: Arc<SurfaceChart>,
        c: f64,
    },
}

/// Partition-of-unity weight attached to a chart.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mask {
    Full,
    /// Two-chart radial blend; the variant names the chart's own axis.
    RadialBlend(PolarAxis),
}

// Transition band of the polar-cap bumps, in 1 - d_axis^2. HI <= 0.5 keeps
// the two charts' transition bands disjoint, so each chart's own transition
// is a function of its polar angle alone.
const BLEND_LO: f64 = 0.06;
const BLEND_HI: f64 = 0.50;

#[derive(Clone)]
pub struct SurfaceChart {
    pub map: ChartMap,
    /// [(u_lo, u_hi), (v_lo, v_hi)]
    pub domain: [(f64, f64); 2],
    pub periodic: (bool, bool),
    /// +1 if phi_u x phi_v is outward, -1 otherwise.
    pub orientation: f64,
    pub mask: Mask,
    /// Parameter lines where the integrand smoothness is reduced (mask
    /// transitions, curvature sign changes); always used as panel breaks.
    pub breaks_u: Vec<f64>,
    pub breaks_v: Vec<f64>,
    /// Parameter lines where the Euclidean normal crosses a coordinate
    /// plane; quadrature grades panels toward these under norms whose
    /// unit-sphere curvature vanishes there.
    pub singular_u: Vec<f64>,
    pub singular_v: Vec<f64>,
    /// Typical parameter scale for finite differences.
    pub fd_scale: f64,
    pub label: String,
}

impl SurfaceChart {
    pub fn jet(&self, u: f64, v: f64) -> ChartJet {
        match &self.map {
            ChartMap::Radial { axis, shape } => radial_jet(*axis, shape, u, v),
            ChartMap::Torus { big_r, small_r } => torus_jet(*big_r, *small_r, u, v),
            ChartMap::Graph { expr, fd_step } => graph_jet(expr, *fd_step, u, v),
            ChartMap::Plane => ChartJet {
                p: V3::new(u, v, 0.0),
                du: V3::new(1.0, 0.0, 0.0),
                dv: V3::new(0.0, 1.0, 0.0),
                duu: V3::zeros(),
                duv: V3::zeros(),
                dvv: V3::zeros(),
            },
            ChartMap::Parallel { base, norm, c } => parallel_jet(base, norm, *c, u, v),
            ChartMap::Scaled { base, c } => {
                let j = base.jet(u, v);
                ChartJet {
                    p: j.p * *c,
                    du: j.du * *c,
                    dv: j.dv * *c,
                    duu: j.duu * *c,
                    duv: j.duv * *c,
                    dvv: j.dvv * *c,
                }
            }
        }
    }

    pub fn point(&self, u: f64, v: f64) -> V3 {
        match &self.map {
            ChartMap::Radial { axis, shape } => {
                let d = dir_jet(*axis, u, v);
                radial_point(shape, &d.d)
            }
            ChartMap::Torus { big_r, small_r } => V3::new(
                (big_r + small_r * u.cos()) * v.cos(),
                (big_r + small_r * u.cos()) * v.sin(),
                small_r * u.sin(),
            ),
            ChartMap::Graph { expr, .. } => V3::new(u, v, expr.eval(u, v)),
            ChartMap::Plane => V3::new(u, v, 0.0),
            ChartMap::Parallel { base, norm, c } => {
                let f = frame(base, u, v).expect("regular base point");
                let eta = norm
                    .inverse_gauss_map(&f.xi)
                    .expect("Birkhoff normal at base point")
                    .x;
                f.jet.p + *c * eta
            }
            ChartMap::Scaled { base, c } => base.point(u, v) * *c,
        }
    }

    /// Outward (unnormalized) normal field with derivatives, where a
    /// cancellation-free formula exists. The cross product of the tangents
    /// loses all relative accuracy in components below machine epsilon,
    /// which matters because the inverse Gauss map of an lp-type norm
    /// amplifies normal components by a fractional power near the
    /// coordinate planes.
    pub fn analytic_normal(&self, u: f64, v: f64, jet: &ChartJet) -> Option<(V3, V3, V3)> {
        match &self.map {
            ChartMap::Radial { shape, .. } => match shape {
                // The gradient of the gauge is homogeneous of degree 0, so
                // it can be evaluated on the scaled point directly.
                RadialShape::MinkowskiSphere { norm, .. } => {
                    let n = norm.grad(&jet.p);
                    let h = norm.hess(&jet.p);
                    Some((n, h * jet.du, h * jet.dv))
                }
                RadialShape::Ellipsoid { a, b, c } => {
                    let scale = V3::new(1.0 / (a * a), 1.0 / (b * b), 1.0 / (c * c));
                    let f = |v: &V3| V3::new(v.x * scale.x, v.y * scale.y, v.z * scale.z);
                    Some((f(&jet.p), f(&jet.du), f(&jet.dv)))
                }
            },
            ChartMap::Torus { .. } => {
                let (su, cu) = u.sin_cos();
                let (sv, cv) = v.sin_cos();
                Some((
                    V3::new(cu * cv, cu * sv, su),
                    V3::new(-su * cv, -su * sv, cu),
                    V3::new(-cu * sv, cu * cv, 0.0),
                ))
            }
            // A homothety preserves normals, and the shape formulas above
            // are scale-covariant, so the scaled jet can be passed through.
            ChartMap::Scaled { base, .. } => base.analytic_normal(u, v, jet),
            // Offset surfaces share the tangent plane (and hence the
            // normal) with their base at the same parameters.
            ChartMap::Parallel { base, .. } => {
                let bjet = base.jet(u, v);
                base.analytic_normal(u, v, &bjet)
            }
            ChartMap::Graph { .. } | ChartMap::Plane => None,
        }
    }

    /// Partition-of-unity weight at (u, v). Weights over all charts of the
    /// surface sum to 1 at every shared surface point.
    pub fn weight(&self, u: f64, v: f64) -> f64 {
        match self.mask {
            Mask::Full => 1.0,
            Mask::RadialBlend(axis) => {
                let d = dir_jet(axis, u, v).d;
                let own = blend_bump(match axis {
                    PolarAxis::Z => 1.0 - d.z * d.z,
                    PolarAxis::X => 1.0 - d.x * d.x,
                });
                let other = blend_bump(match axis {
                    PolarAxis::Z => 1.0 - d.x * d.x,
                    PolarAxis::X => 1.0 - d.z * d.z,
                });
                own / (own + other)
            }
        }
    }

    pub fn span_u(&self) -> f64 {
        self.domain[0].1 - self.domain[0].0
    }

    pub fn span_v(&self) -> f64 {
        self.domain[1].1 - self.domain[1].0
    }
}

/// C-infinity ramp: 0 for t <= 0, 1 for t >= 1.
fn cinf_ramp(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / t).exp();
        let b = (-1.0 / (1.0 - t)).exp();
        a / (a + b)
    }
}

fn blend_bump(one_minus_axis_sq: f64) -> f64 {
    cinf_ramp((one_minus_axis_sq - BLEND_LO) / (BLEND_HI - BLEND_LO))
}

/// Jet of the unit direction map for a polar chart.
struct DirJet {
    d: V3,
    dt: V3,
    dp: V3,
    dtt: V3,
    dtp: V3,
    dpp: V3,
}

fn dir_jet(axis: PolarAxis, theta: f64, phi: f64) -> DirJet {
    let (st, ct) = theta.sin_cos();
    let (sp, cp) = phi.sin_cos();
    let raw = DirJet {
        d: V3::new(st * cp, st * sp, ct),
        dt: V3::new(ct * cp, ct * sp, -st),
        dp: V3::new(-st * sp, st * cp, 0.0),
        dtt: V3::new(-st * cp, -st * sp, -ct),
        dtp: V3::new(-ct * sp, ct * cp, 0.0),
        dpp: V3::new(-st * cp, -st * sp, 0.0),
    };
    match axis {
        PolarAxis::Z => raw,
        // Cyclic rotation (x, y, z) -> (z, x, y) puts the pole on the x axis
        // while preserving orientation.
        PolarAxis::X => {
            let cyc = |v: V3| V3::new(v.z, v.x, v.y);
            DirJet {
                d: cyc(raw.d),
                dt: cyc(raw.dt),
                dp: cyc(raw.dp),
                dtt: cyc(raw.dtt),
                dtp: cyc(raw.dtp),
                dpp: cyc(raw.dpp),
            }
        }
    }
}

fn radial_point(shape: &RadialShape, d: &V3) -> V3 {
    match shape {
        RadialShape::MinkowskiSphere { r, norm } => *r * d / norm.gauge(d),
        RadialShape::Ellipsoid { a, b, c } => V3::new(a * d.x, b * d.y, c * d.z),
    }
}

fn radial_jet(axis: PolarAxis, shape: &RadialShape, theta: f64, phi: f64) -> ChartJet {
    let dj = dir_jet(axis, theta, phi);
    match shape {
        RadialShape::Ellipsoid { a, b, c } => {
            let lin = |v: V3| V3::new(a * v.x, b * v.y, c * v.z);
            ChartJet {
                p: lin(dj.d),
                du: lin(dj.dt),
                dv: lin(dj.dp),
                duu: lin(dj.dtt),
                duv: lin(dj.dtp),
                dvv: lin(dj.dpp),
            }
        }
        RadialShape::MinkowskiSphere { r, norm } => {
            // p = r d / g with g = F(d).
            let g = norm.gauge(&dj.d);
            let grad = norm.grad(&dj.d);
            let hess = norm.hess(&dj.d);
            let gt = grad.dot(&dj.dt);
            let gp = grad.dot(&dj.dp);
            let gtt = dj.dt.dot(&(hess * dj.dt)) + grad.dot(&dj.dtt);
            let gtp = dj.dt.dot(&(hess * dj.dp)) + grad.dot(&dj.dtp);
            let gpp = dj.dp.dot(&(hess * dj.dp)) + grad.dot(&dj.dpp);
            let g2 = g * g;
            let g3 = g2 * g;
            let p = *r * dj.d / g;
            let du = *r * (dj.dt / g - dj.d * (gt / g2));
            let dv = *r * (dj.dp / g - dj.d * (gp / g2));
            let duu = *r
                * (dj.dtt / g - 2.0 * dj.dt * (gt / g2) - dj.d * (gtt / g2)
                    + 2.0 * dj.d * (gt * gt / g3));
            let duv = *r
                * (dj.dtp / g - dj.dt * (gp / g2) - dj.dp * (gt / g2) - dj.d * (gtp / g2)
                    + 2.0 * dj.d * (gt * gp / g3));
            let dvv = *r
                * (dj.dpp / g - 2.0 * dj.dp * (gp / g2) - dj.d * (gpp / g2)
                    + 2.0 * dj.d * (gp * gp / g3));
            ChartJet {
                p,
                du,
                dv,
                duu,
                duv,
                dvv,
            }
        }
    }
}

fn torus_jet(big_r: f64, small_r: f64, u: f64, v: f64) -> ChartJet {
    let (su, cu) = u.sin_cos();
    let (sv, cv) = v.sin_cos();
    let ring = big_r + small_r * cu;
    ChartJet {
        p: V3::new(ring * cv, ring * sv, small_r * su),
        du: V3::new(-small_r * su * cv, -small_r * su * sv, small_r * cu),
        dv: V3::new(-ring * sv, ring * cv, 0.0),
        duu: V3::new(-small_r * cu * cv, -small_r * cu * sv, -small_r * su),
        duv: V3::new(small_r * su * sv, -small_r * su * cv, 0.0),
        dvv: V3::new(-ring * cv, -ring * sv, 0.0),
    }
}

fn graph_jet(expr: &Expr, h: f64, u: f64, v: f64) -> ChartJet {
    let f = |u: f64, v: f64| expr.eval(u, v);
    let f00 = f(u, v);
    let fu = (f(u + h, v) - f(u - h, v)) / (2.0 * h);
    let fv = (f(u, v + h) - f(u, v - h)) / (2.0 * h);
    let fuu = (f(u + h, v) - 2.0 * f00 + f(u - h, v)) / (h * h);
    let fvv = (f(u, v + h) - 2.0 * f00 + f(u, v - h)) / (h * h);
    let fuv = (f(u + h, v + h) - f(u + h, v - h) - f(u - h, v + h) + f(u - h, v - h))
        / (4.0 * h * h);
    ChartJet {
        p: V3::new(u, v, f00),
        du: V3::new(1.0, 0.0, fu),
        dv: V3::new(0.0, 1.0, fv),
        duu: V3::new(0.0, 0.0, fuu),
        duv: V3::new(0.0, 0.0, fuv),
        dvv: V3::new(0.0, 0.0, fvv),
    }
}

fn parallel_first(base: &SurfaceChart, norm: &NormGauge, c: f64, u: f64, v: f64) -> (V3, V3, V3) {
    let f = frame(base, u, v).expect("regular base point for offset chart");
    let eta = norm
        .inverse_gauss_map(&f.xi)
        .expect("Birkhoff normal for offset chart")
        .x;
    let (eta_u, eta_v) = crate::birkhoff::birkhoff_differential(norm, &f, &eta);
    (f.jet.p + c * eta, f.jet.du + c * eta_u, f.jet.dv + c * eta_v)
}

fn parallel_jet(base: &SurfaceChart, norm: &NormGauge, c: f64, u: f64, v: f64) -> ChartJet {
    let (p, du, dv) = parallel_first(base, norm, c, u, v);
    let h = 1e-5 * base.fd_scale;
    let (_, du_p, dv_p) = parallel_first(base, norm, c, u + h, v);
    let (_, du_m, dv_m) = parallel_first(base, norm, c, u - h, v);
    let (_, _, dv_q) = parallel_first(base, norm, c, u, v + h);
    let (_, _, dv_r) = parallel_first(base, norm, c, u, v - h);
    let duu = (du_p - du_m) / (2.0 * h);
    let duv = (dv_p - dv_m) / (2.0 * h);
    let dvv = (dv_q - dv_r) / (2.0 * h);
    ChartJet {
        p,
        du,
        dv,
        duu,
        duv,
        dvv,
    }
}

/// First and second fundamental data at a regular chart point.
#[derive(Debug, Clone, Copy)]
pub struct Frame {
    pub jet: ChartJet,
    /// Outward Euclidean unit normal.
    pub xi: V3,
    pub xi_u: V3,
    pub xi_v: V3,
    /// First fundamental form coefficients.
    pub e: f64,
    pub f: f64,
    pub g: f64,
    /// d(xi) in the {phi_u, phi_v} basis; K_M = det, H_M = tr/2.
    pub weingarten: Matrix2<f64>,
    /// det(phi_u, phi_v, xi) = |phi_u x phi_v| for outward orientation.
    pub area_density_e: f64,
}

impl Frame {
    pub fn gaussian_curvature(&self) -> f64 {
        self.weingarten.determinant()
    }
}

pub fn frame(chart: &SurfaceChart, u: f64, v: f64) -> Result<Frame> {
    let jet = chart.jet(u, v);
    frame_with(chart, &jet, u, v)
}

/// Build a frame reusing an already-evaluated jet.
pub fn frame_with(chart: &SurfaceChart, jet: &ChartJet, u: f64, v: f64) -> Result<Frame> {
    match chart.analytic_normal(u, v, jet) {
        Some((n, n_u, n_v)) => frame_from_normal_field(jet, n, n_u, n_v, u, v),
        None => frame_from_jet(jet, chart.orientation, u, v),
    }
}

/// Frame from an explicit outward normal field.
fn frame_from_normal_field(
    jet: &ChartJet,
    n: V3,
    n_u: V3,
    n_v: V3,
    u: f64,
    v: f64,
) -> Result<Frame> {
    let cross_len = jet.du.cross(&jet.dv).norm();
    if cross_len < 1e-8 {
        return Err(GeoError::DegenerateChart {
            u,
            v,
            cross_norm: cross_len,
        });
    }
    let n_len = n.norm();
    let xi = n / n_len;
    let proj = |w: V3| w - xi * xi.dot(&w);
    let xi_u = proj(n_u) / n_len;
    let xi_v = proj(n_v) / n_len;
    finish_frame(jet, xi, xi_u, xi_v, cross_len)
}

pub fn frame_from_jet(jet: &ChartJet, orientation: f64, u: f64, v: f64) -> Result<Frame> {
    let n_raw = jet.du.cross(&jet.dv);
    let n_len = n_raw.norm();
    if n_len < 1e-8 {
        return Err(GeoError::DegenerateChart {
            u,
            v,
            cross_norm: n_len,
        });
    }
    let nh = n_raw / n_len;
    let xi = orientation * nh;
    let n_u = jet.duu.cross(&jet.dv) + jet.du.cross(&jet.duv);
    let n_v = jet.duv.cross(&jet.dv) + jet.du.cross(&jet.dvv);
    let proj = |w: V3| w - nh * nh.dot(&w);
    let xi_u = orientation * proj(n_u) / n_len;
    let xi_v = orientation * proj(n_v) / n_len;
    finish_frame(jet, xi, xi_u, xi_v, n_len)
}

fn finish_frame(jet: &ChartJet, xi: V3, xi_u: V3, xi_v: V3, density_e: f64) -> Result<Frame> {
    let e = jet.du.dot(&jet.du);
    let f = jet.du.dot(&jet.dv);
    let g = jet.dv.dot(&jet.dv);
    let det = e * g - f * f;
    // Tangent expansion through the Gram matrix; xi_u, xi_v are tangent
    // exactly, so this solve is exact.
    let solve = |w: &V3| -> (f64, f64) {
        let b1 = jet.du.dot(w);
        let b2 = jet.dv.dot(w);
        ((g * b1 - f * b2) / det, (e * b2 - f * b1) / det)
    };
    let (w11, w21) = solve(&xi_u);
    let (w12, w22) = solve(&xi_v);
    Ok(Frame {
        jet: *jet,
        xi,
        xi_u,
        xi_v,
        e,
        f,
        g,
        weingarten: Matrix2::new(w11, w12, w21, w22),
        area_density_e: density_e,
    })
}

/// Outward Euclidean unit normal at a regular chart point.
pub fn euclidean_normal(chart: &SurfaceChart, u: f64, v: f64) -> Result<V3> {
    Ok(frame(chart, u, v)?.xi)
}

/// Euclidean Gaussian curvature from the fundamental forms.
pub fn euclidean_gaussian_curvature(chart: &SurfaceChart, u: f64, v: f64) -> Result<f64> {
    Ok(frame(chart, u, v)?.gaussian_curvature())
}

/// A surface as an atlas of charts.
#[derive(Clone)]
pub struct Surface {
    pub name: String,
    pub charts: Vec<SurfaceChart>,
    pub closed: bool,
    solid: Solid,
}

/// Inside test for surfaces enclosing a convex region.
#[derive(Clone)]
enum Solid {
    None,
    Ellipsoid { a: f64, b: f64, c: f64 },
    NormBall { r: f64, norm: Arc<NormGauge> },
    TorusTube { big_r: f64, small_r: f64 },
}

impl Surface {
    pub fn minkowski_sphere(r: f64, norm: &Arc<NormGauge>) -> Self {
        let shape = RadialShape::MinkowskiSphere {
            r,
            norm: norm.clone(),
        };
        Self {
            name: format!("minkowski_sphere(r={r})"),
            charts: radial_atlas(shape),
            closed: true,
            solid: Solid::NormBall {
                r,
                norm: norm.clone(),
            },
        }
    }

    pub fn ellipsoid(a: f64, b: f64, c: f64) -> Self {
        let shape = RadialShape::Ellipsoid { a, b, c };
        Self {
            name: format!("ellipsoid({a},{b},{c})"),
            charts: radial_atlas(shape),
            closed: true,
            solid: Solid::Ellipsoid { a, b, c },
        }
    }

    pub fn sphere(r: f64) -> Self {
        let mut s = Self::ellipsoid(r, r, r);
        s.name = format!("sphere(r={r})");
        s
    }

    pub fn torus(big_r: f64, small_r: f64) -> Self {
        let quarters = vec![0.0, FRAC_PI_2, PI, 1.5 * PI, TAU];
        let chart = SurfaceChart {
            map: ChartMap::Torus { big_r, small_r },
            domain: [(0.0, TAU), (0.0, TAU)],
            periodic: (true, true),
            orientation: -1.0,
            mask: Mask::Full,
            breaks_u: quarters.clone(),
            breaks_v: quarters.clone(),
            singular_u: quarters.clone(),
            singular_v: quarters,
            fd_scale: 1.0,
            label: "torus".into(),
        };
        Self {
            name: format!("torus(R={big_r},r={small_r})"),
            charts: vec![chart],
            closed: true,
            solid: Solid::TorusTube { big_r, small_r },
        }
    }

    pub fn graph(expr: Expr, domain: [(f64, f64); 2]) -> Self {
        let span = (domain[0].1 - domain[0].0).max(domain[1].1 - domain[1].0);
        let chart = SurfaceChart {
            map: ChartMap::Graph {
                expr: Arc::new(expr),
                fd_step: f64::EPSILON.powf(1.0 / 3.0) * span.max(1e-3),
            },
            domain,
            periodic: (false, false),
            orientation: 1.0,
            mask: Mask::Full,
            breaks_u: vec![],
            breaks_v: vec![],
            singular_u: vec![],
            singular_v: vec![],
            fd_scale: (span / TAU).clamp(0.1, 10.0),
            label: "graph".into(),
        };
        Self {
            name: "graph".into(),
            charts: vec![chart],
            closed: false,
            solid: Solid::None,
        }
    }

    pub fn plane(domain: [(f64, f64); 2]) -> Self {
        let chart = SurfaceChart {
            map: ChartMap::Plane,
            domain,
            periodic: (false, false),
            orientation: 1.0,
            mask: Mask::Full,
            breaks_u: vec![],
            breaks_v: vec![],
            singular_u: vec![],
            singular_v: vec![],
            fd_scale: 1.0,
            label: "plane".into(),
        };
        Self {
            name: "plane".into(),
            charts: vec![chart],
            closed: false,
            solid: Solid::None,
        }
    }

    /// Homothety c * self.
    pub fn scaled(&self, c: f64) -> Self {
        let charts = self
            .charts
            .iter()
            .map(|ch| SurfaceChart {
                map: ChartMap::Scaled {
                    base: Arc::new(ch.clone()),
                    c,
                },
                domain: ch.domain,
                periodic: ch.periodic,
                orientation: ch.orientation,
                mask: ch.mask,
                breaks_u: ch.breaks_u.clone(),
                breaks_v: ch.breaks_v.clone(),
                singular_u: ch.singular_u.clone(),
                singular_v: ch.singular_v.clone(),
                fd_scale: ch.fd_scale,
                label: format!("scaled({})", ch.label),
            })
            .collect();
        let solid = match &self.solid {
            Solid::None => Solid::None,
            Solid::Ellipsoid { a, b, c: cc } => Solid::Ellipsoid {
                a: a * c,
                b: b * c,
                c: cc * c,
            },
            Solid::NormBall { r, norm } => Solid::NormBall {
                r: r * c,
                norm: norm.clone(),
            },
            Solid::TorusTube { big_r, small_r } => Solid::TorusTube {
                big_r: big_r * c,
                small_r: small_r * c,
            },
        };
        Self {
            name: format!("{} * {c}", self.name),
            charts,
            closed: self.closed,
            solid,
        }
    }

    /// Parallel surface p + c eta(p) under the given norm.
    pub fn parallel(&self, norm: &Arc<NormGauge>, c: f64) -> Self {
        let charts = self
            .charts
            .iter()
            .map(|ch| SurfaceChart {
                map: ChartMap::Parallel {
                    base: Arc::new(ch.clone()),
                    norm: norm.clone(),
                    c,
                },
                domain: ch.domain,
                periodic: ch.periodic,
                orientation: ch.orientation,
                mask: ch.mask,
                breaks_u: ch.breaks_u.clone(),
                breaks_v: ch.breaks_v.clone(),
                singular_u: ch.singular_u.clone(),
                singular_v: ch.singular_v.clone(),
                fd_scale: ch.fd_scale,
                label: format!("parallel({})", ch.label),
            })
            .collect();
        Self {
            name: format!("{} + {c} eta", self.name),
            charts,
            closed: self.closed,
            solid: Solid::None,
        }
    }

    /// Axis-aligned bounding box (min, max corners).
    pub fn aabb(&self) -> (V3, V3) {
        match &self.solid {
            Solid::Ellipsoid { a, b, c } => (V3::new(-a, -b, -c), V3::new(*a, *b, *c)),
            Solid::NormBall { r, norm } => {
                // Half-extent along axis i is r * h_B(e_i).
                let mut ext = V3::zeros();
                for i in 0..3 {
                    let mut e = V3::zeros();
                    e[i] = 1.0;
                    let h = norm
                        .inverse_gauss_map(&e)
                        .map(|s| s.x.dot(&e))
                        .unwrap_or(norm.r_max);
                    ext[i] = r * h;
                }
                (-ext, ext)
            }
            Solid::TorusTube { big_r, small_r } => {
                let out = big_r + small_r;
                (
                    V3::new(-out, -out, -small_r),
                    V3::new(out, out, *small_r),
                )
            }
            Solid::None => {
                // Parameter scan with a small safety margin.
                let mut lo = V3::from_element(f64::INFINITY);
                let mut hi = V3::from_element(f64::NEG_INFINITY);
                for chart in &self.charts {
                    let n = 80;
                    for i in 0..=n {
                        for j in 0..=n {
                            let u = chart.domain[0].0 + chart.span_u() * i as f64 / n as f64;
                            let v = chart.domain[1].0 + chart.span_v() * j as f64 / n as f64;
                            let p = chart.point(u, v);
                            lo = lo.inf(&p);
                            hi = hi.sup(&p);
                        }
                    }
                }
                let margin = 1e-3 * (hi - lo).norm();
                (lo - V3::from_element(margin), hi + V3::from_element(margin))
            }
        }
    }

    /// Exact norm distance to the surface, where a closed form exists.
    /// A Minkowski sphere under its own norm has dist(z) = |F(z) - r| by
    /// the triangle inequality (lower bound) and the radial move (upper).
    pub fn norm_distance_exact(&self, z: &V3, norm: &Arc<NormGauge>) -> Option<f64> {
        match &self.solid {
            Solid::NormBall { r, norm: own } if Arc::ptr_eq(own, norm) => {
                Some((norm.gauge(z) - r).abs())
            }
            Solid::TorusTube { big_r, small_r }
                if matches!(norm.kind(), crate::norm::NormKind::Euclidean) =>
            {
                let ring = (z.x * z.x + z.y * z.y).sqrt() - big_r;
                Some(((ring * ring + z.z * z.z).sqrt() - small_r).abs())
            }
            _ => None,
        }
    }

    /// Bounds (lower, upper) on the Euclidean distance to the surface, used
    /// to prune Monte Carlo samples before running the minimizer.
    pub fn euclid_distance_bounds(&self, z: &V3) -> Option<(f64, f64)> {
        match &self.solid {
            Solid::TorusTube { big_r, small_r } => {
                let ring = (z.x * z.x + z.y * z.y).sqrt() - big_r;
                let d = ((ring * ring + z.z * z.z).sqrt() - small_r).abs();
                Some((d, d))
            }
            Solid::Ellipsoid { a, b, c } => {
                let q = ((z.x / a).powi(2) + (z.y / b).powi(2) + (z.z / c).powi(2)).sqrt();
                let lo = a.min(*b).min(*c);
                let hi = a.max(*b).max(*c);
                Some(((q - 1.0).abs() * lo, (q - 1.0).abs() * hi))
            }
            Solid::NormBall { r, norm } => {
                let d = (norm.gauge(z) - r).abs();
                Some((d * norm.r_min, d * norm.r_max))
            }
            Solid::None => None,
        }
    }

    /// Whether z lies in the enclosed solid region, for surfaces that have
    /// one.
    pub fn inside(&self, z: &V3) -> Option<bool> {
        match &self.solid {
            Solid::None => None,
            Solid::Ellipsoid { a, b, c } => {
                let q = (z.x / a).powi(2) + (z.y / b).powi(2) + (z.z / c).powi(2);
                Some(q <= 1.0)
            }
            Solid::NormBall { r, norm } => Some(norm.gauge(z) <= *r),
            Solid::TorusTube { big_r, small_r } => {
                let ring = (z.x * z.x + z.y * z.y).sqrt() - big_r;
                Some(ring * ring + z.z * z.z <= small_r * small_r)
            }
        }
    }
}

fn radial_atlas(shape: RadialShape) -> Vec<SurfaceChart> {
    // Pole caps where the own-axis blend vanishes: sin^2(theta) <= BLEND_LO.
    let theta_cut = BLEND_LO.sqrt().asin();
    let theta_hi = BLEND_HI.sqrt().asin();
    let quarters_v = vec![0.0, FRAC_PI_2, PI, 1.5 * PI, TAU];
    // Panel breaks on the own-transition band edges and on the eighth lines,
    // where the other chart's cap annulus is tangent to coordinate lines.
    let eighths: Vec<f64> = (1..8).map(|k| k as f64 * FRAC_PI_2 / 2.0).collect();
    let mut breaks_u = vec![theta_hi, FRAC_PI_2, PI - theta_hi];
    breaks_u.extend_from_slice(&[FRAC_PI_2 - theta_hi / 2.0, FRAC_PI_2 + theta_hi / 2.0]);
    let make = |axis: PolarAxis| SurfaceChart {
        map: ChartMap::Radial {
            axis,
            shape: shape.clone(),
        },
        domain: [(theta_cut, PI - theta_cut), (0.0, TAU)],
        periodic: (false, true),
        orientation: 1.0,
        mask: Mask::RadialBlend(axis),
        breaks_u: breaks_u.clone(),
        breaks_v: eighths.clone(),
        singular_u: vec![FRAC_PI_2],
        singular_v: quarters_v.clone(),
        fd_scale: 1.0,
        label: format!("radial_{axis:?}"),
    };
    vec![make(PolarAxis::Z), make(PolarAxis::X)]
}

/// Chart-X parameters of the direction of a chart-Z point, for tests that
/// compare the two charts at a shared surface point.
pub fn z_point_in_x_chart(theta: f64, phi: f64) -> (f64, f64) {
    let d = dir_jet(PolarAxis::Z, theta, phi).d;
    let theta_x = d.x.clamp(-1.0, 1.0).acos();
    let mut phi_x = d.z.atan2(d.y);
    if phi_x < 0.0 {
        phi_x += TAU;
    }
    (theta_x, phi_x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn fd_jet(chart: &SurfaceChart, u: f64, v: f64, h: f64) -> ChartJet {
        let p = |u: f64, v: f64| chart.point(u, v);
        let p00 = p(u, v);
        ChartJet {
            p: p00,
            du: (p(u + h, v) - p(u - h, v)) / (2.0 * h),
            dv: (p(u, v + h) - p(u, v - h)) / (2.0 * h),
            duu: (p(u + h, v) - 2.0 * p00 + p(u - h, v)) / (h * h),
            duv: (p(u + h, v + h) - p(u + h, v - h) - p(u - h, v + h) + p(u - h, v - h))
                / (4.0 * h * h),
            dvv: (p(u, v + h) - 2.0 * p00 + p(u, v - h)) / (h * h),
        }
    }

    fn assert_jet_close(a: &ChartJet, b: &ChartJet, tol: f64) {
        assert!((a.du - b.du).norm() < tol, "du {:?} vs {:?}", a.du, b.du);
        assert!((a.dv - b.dv).norm() < tol, "dv");
        assert!((a.duu - b.duu).norm() < tol, "duu {:?} vs {:?}", a.duu, b.duu);
        assert!((a.duv - b.duv).norm() < tol, "duv");
        assert!((a.dvv - b.dvv).norm() < tol, "dvv");
    }

    #[test]
    fn analytic_jets_match_finite_differences() {
        let norm = Arc::new(NormGauge::lp(4.0).unwrap());
        let surfaces = [
            Surface::minkowski_sphere(1.5, &norm),
            Surface::ellipsoid(1.0, 1.5, 2.0),
            Surface::torus(2.0, 0.5),
        ];
        for s in &surfaces {
            for chart in &s.charts {
                for (u, v) in [(0.7, 1.1), (1.9, 4.0), (1.2, 2.6)] {
                    let a = chart.jet(u, v);
                    let b = fd_jet(chart, u, v, 1e-4);
                    assert_jet_close(&a, &b, 1e-6);
                }
            }
        }
    }

    #[test]
    fn sphere_normal_is_radial() {
        let s = Surface::sphere(1.0);
        let chart = &s.charts[0];
        let xi = euclidean_normal(chart, FRAC_PI_2, 0.0).unwrap();
        assert_relative_eq!(xi, V3::new(1.0, 0.0, 0.0), epsilon = 1e-12);
        // Generic point: normal parallel to position.
        let (u, v) = (1.1, 2.3);
        let xi = euclidean_normal(chart, u, v).unwrap();
        let p = chart.point(u, v);
        assert_relative_eq!(xi, p.normalize(), epsilon = 1e-12);
    }

    #[test]
    fn torus_outer_equator_normal() {
        let s = Surface::torus(2.0, 0.5);
        let xi = euclidean_normal(&s.charts[0], 0.0, 0.0).unwrap();
        assert_relative_eq!(xi, V3::new(1.0, 0.0, 0.0), epsilon = 1e-12);
        let p = s.charts[0].point(0.0, 0.0);
        assert_relative_eq!(p, V3::new(2.5, 0.0, 0.0), epsilon = 1e-12);
    }

    #[test]
    fn saddle_graph_normal_at_origin() {
        let s = Surface::graph(Expr::parse("x^2 - y^2").unwrap(), [(-1.0, 1.0), (-1.0, 1.0)]);
        let xi = euclidean_normal(&s.charts[0], 0.0, 0.0).unwrap();
        assert_relative_eq!(xi, V3::new(0.0, 0.0, 1.0), epsilon = 1e-8);
        let k = euclidean_gaussian_curvature(&s.charts[0], 0.0, 0.0).unwrap();
        assert_relative_eq!(k, -4.0, max_relative = 1e-4);
    }

    #[test]
    fn sphere_curvature_closed_form() {
        let s = Surface::sphere(2.0);
        let k = euclidean_gaussian_curvature(&s.charts[0], 1.0, 0.4).unwrap();
        assert_relative_eq!(k, 0.25, epsilon = 1e-12);
        // Weingarten eigenvalues are +1/r for the outward normal.
        let f = frame(&s.charts[0], 1.0, 0.4).unwrap();
        assert_relative_eq!(f.weingarten.trace() / 2.0, 0.5, epsilon = 1e-10);
    }

    #[test]
    fn torus_curvature_closed_form() {
        let (big_r, small_r) = (2.0, 0.5);
        let s = Surface::torus(big_r, small_r);
        for u in [0.0, 0.9, FRAC_PI_2 + 0.3, PI - 0.2, PI] {
            let k = euclidean_gaussian_curvature(&s.charts[0], u, 1.3).unwrap();
            let expected = u.cos() / (small_r * (big_r + small_r * u.cos()));
            assert_relative_eq!(k, expected, epsilon = 1e-10, max_relative = 1e-10);
        }
    }

    /// Osculating-paraboloid oracle: fit surface heights over the tangent
    /// plane in the normal direction; K = det of the quadratic form.
    fn paraboloid_fd_curvature(chart: &SurfaceChart, u: f64, v: f64) -> f64 {
        let f = frame(chart, u, v).unwrap();
        let p0 = f.jet.p;
        let t1 = f.jet.du.normalize();
        let t2 = (f.jet.dv - t1 * t1.dot(&f.jet.dv)).normalize();
        // Height function over the tangent plane by projecting nearby chart
        // points.
        let h = 1e-3;
        let height = |a: f64, b: f64| -> f64 {
            // Invert (u, v) -> tangent coordinates to first order.
            let m = Matrix2::new(
                t1.dot(&f.jet.du),
                t1.dot(&f.jet.dv),
                t2.dot(&f.jet.du),
                t2.dot(&f.jet.dv),
            );
            let rhs = nalgebra::Vector2::new(a, b);
            let duv = m.try_inverse().unwrap() * rhs;
            let p = chart.point(u + duv.x, v + duv.y);
            f.xi.dot(&(p - p0))
        };
        let f_pp = height(h, 0.0);
        let f_mm = height(-h, 0.0);
        let f_qq = height(0.0, h);
        let f_rr = height(0.0, -h);
        let f_c = height(0.0, 0.0);
        let hxx = (f_pp - 2.0 * f_c + f_mm) / (h * h);
        let hyy = (f_qq - 2.0 * f_c + f_rr) / (h * h);
        let hxy = (height(h, h) - height(h, -h) - height(-h, h) + height(-h, -h)) / (4.0 * h * h);
        hxx * hyy - hxy * hxy
    }

    #[test]
    fn ellipsoid_curvature_matches_paraboloid_oracle() {
        let s = Surface::ellipsoid(1.0, 1.5, 2.0);
        let chart = &s.charts[0];
        // theta = pi/2, phi = 0 is the point (1, 0, 0).
        let (u, v) = (FRAC_PI_2, 0.0);
        assert_relative_eq!(chart.point(u, v), V3::new(1.0, 0.0, 0.0), epsilon = 1e-12);
        let k = euclidean_gaussian_curvature(chart, u, v).unwrap();
        let oracle = paraboloid_fd_curvature(chart, u, v);
        assert_relative_eq!(k, oracle, max_relative = 1e-4);
        // Frozen closed-form value 1/(a b c)^2 / (x^2/a^4 + ...)^2 = 1/9.
        assert_relative_eq!(k, 1.0 / 9.0, epsilon = 1e-10);
    }

    #[test]
    fn reparametrization_invariance_between_charts() {
        let s = Surface::ellipsoid(1.0, 1.5, 2.0);
        for (theta, phi) in [(1.2, 0.7), (1.9, 2.4), (1.5, 4.2)] {
            let k_z = euclidean_gaussian_curvature(&s.charts[0], theta, phi).unwrap();
            let (tx, px) = z_point_in_x_chart(theta, phi);
            let k_x = euclidean_gaussian_curvature(&s.charts[1], tx, px).unwrap();
            assert_relative_eq!(k_z, k_x, max_relative = 1e-10);
            let p_z = s.charts[0].point(theta, phi);
            let p_x = s.charts[1].point(tx, px);
            assert!((p_z - p_x).norm() < 1e-12);
        }
    }

    #[test]
    fn partition_weights_sum_to_one() {
        let s = Surface::ellipsoid(1.0, 1.5, 2.0);
        for (theta, phi) in [(0.9, 0.3), (1.4, 1.0), (2.2, 5.1), (1.57, 2.0)] {
            let w_z = s.charts[0].weight(theta, phi);
            let (tx, px) = z_point_in_x_chart(theta, phi);
            let w_x = s.charts[1].weight(tx, px);
            assert!(
                (w_z + w_x - 1.0).abs() < 1e-12,
                "weights {w_z} + {w_x} != 1"
            );
        }
    }

    #[test]
    fn immersion_holds_inside_domains() {
        let norm = Arc::new(NormGauge::lp(3.0).unwrap());
        for s in [
            Surface::minkowski_sphere(1.0, &norm),
            Surface::ellipsoid(1.0, 1.5, 2.0),
            Surface::torus(2.0, 0.5),
        ] {
            for chart in &s.charts {
                for i in 0..12 {
                    for j in 0..12 {
                        let u = chart.domain[0].0
                            + chart.span_u() * (i as f64 + 0.5) / 12.0;
                        let v = chart.domain[1].0
                            + chart.span_v() * (j as f64 + 0.5) / 12.0;
                        let jet = chart.jet(u, v);
                        assert!(jet.du.cross(&jet.dv).norm() > 1e-8);
                    }
                }
            }
        }
    }

    #[test]
    fn minkowski_sphere_curvature_matches_scaled_boundary_curvature() {
        // euclidean_gaussian_curvature of r * unit sphere at r x equals the
        // unit-sphere curvature at x divided by r^2.
        let norm = Arc::new(NormGauge::lp(4.0).unwrap());
        let r = 1.7;
        let s = Surface::minkowski_sphere(r, &norm);
        for (u, v) in [(1.1, 0.8), (1.9, 2.7), (0.9, 5.0)] {
            let chart = &s.charts[0];
            let k_surface = euclidean_gaussian_curvature(chart, u, v).unwrap();
            let x = chart.point(u, v) / r;
            let sp = crate::norm::SpherePoint::new(&norm, x).unwrap();
            let k_boundary = norm.sphere_curvature(&sp).unwrap();
            assert_relative_eq!(k_surface, k_boundary / (r * r), max_relative = 1e-7);
        }
    }

    #[test]
    fn scaled_surface_scales_jets() {
        let s = Surface::ellipsoid(1.0, 1.5, 2.0);
        let s2 = s.scaled(3.0);
        let j = s.charts[0].jet(1.0, 2.0);
        let j2 = s2.charts[0].jet(1.0, 2.0);
        assert_relative_eq!(j2.p, j.p * 3.0, epsilon = 1e-14);
        assert_relative_eq!(j2.duv, j.duv * 3.0, epsilon = 1e-14);
    }

    #[test]
    fn aabb_contains_samples() {
        let norm = Arc::new(NormGauge::lp(4.0).unwrap());
        let s = Surface::minkowski_sphere(2.0, &norm);
        let (lo, hi) = s.aabb();
        for chart in &s.charts {
            for i in 0..20 {
                let u = chart.domain[0].0 + chart.span_u() * i as f64 / 19.0;
                for j in 0..20 {
                    let v = chart.domain[1].0 + chart.span_v() * j as f64 / 19.0;
                    let p = chart.point(u, v);
                    for k in 0..3 {
                        assert!(p[k] >= lo[k] - 1e-9 && p[k] <= hi[k] + 1e-9);
                    }
                }
            }
        }
    }
}
