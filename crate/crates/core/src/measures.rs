//! Quadrature of the induced area element and the integral functionals.
//!
//! One sweep over the quadrature nodes of a surface accumulates every
//! functional at once: area, total curvature, Willmore energy, the
//! reciprocal-mean-curvature integral, flux volume, the Alexandrov residual,
//! and the positive-curvature pieces of the Huber estimates. Panel sums are
//! computed in parallel and combined in panel order, so results are
//! bit-for-bit reproducible at any thread count.

use crate::birkhoff::{point_curvature, PointCurvature};
use crate::error::{GeoError, Result};
use crate::norm::{NormGauge, V3};
use crate::quad::{gauss_legendre, Panels1d};
use crate::surface::{frame, frame_with, Surface, SurfaceChart};
use rayon::prelude::*;
use std::sync::Arc;

/// Quadrature grid parameters.
#[derive(Debug, Clone)]
pub struct GridSpec {
    /// Base panels per axis per chart.
    pub base_panels: usize,
    /// Gauss-Legendre order per panel.
    pub order: usize,
    /// Geometric grading levels toward singular parameter lines (used only
    /// when the norm degenerates on coordinate planes).
    pub grade_levels: usize,
    /// Geometric grading ratio.
    pub grade_ratio: f64,
    /// Relative tolerance for the refinement check.
    pub tol: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self {
            base_panels: 16,
            order: 8,
            grade_levels: 30,
            grade_ratio: 0.25,
            tol: 1e-7,
        }
    }
}

impl GridSpec {
    pub fn with_base(mut self, base: usize) -> Self {
        self.base_panels = base;
        self
    }

    /// A cheaper grid for smooth integrands.
    pub fn coarse() -> Self {
        Self {
            base_panels: 10,
            grade_levels: 22,
            ..Self::default()
        }
    }

    /// Resolution tuned for unit-sphere areas at 1e-8 absolute.
    pub fn sphere_area() -> Self {
        Self {
            base_panels: 24,
            ..Self::default()
        }
    }

    /// High resolution for the tightest absolute tolerances.
    pub fn fine() -> Self {
        Self {
            base_panels: 32,
            ..Self::default()
        }
    }
}

/// Affine distance data at a surface point: rho = <p - o, xi> / <eta, xi>
/// with origin o = 0, and the support factor <eta, xi> relating the area
/// elements by omega = <eta, xi> omega_e.
#[derive(Debug, Clone, Copy)]
pub struct AffineDistanceSample {
    pub rho: f64,
    pub eta_dot_xi: f64,
}

impl AffineDistanceSample {
    pub fn from_point(pc: &PointCurvature) -> Result<Self> {
        if pc.eta_dot_xi <= 0.0 {
            return Err(GeoError::OrientationError {
                value: pc.eta_dot_xi,
            });
        }
        Ok(Self {
            rho: pc.p.dot(&pc.xi) / pc.eta_dot_xi,
            eta_dot_xi: pc.eta_dot_xi,
        })
    }
}

/// Every functional accumulated in one quadrature sweep.
#[derive(Debug, Clone, Default)]
pub struct IntegralBundle {
    /// Minkowski area: integral of omega.
    pub lambda_m: f64,
    /// Euclidean area: integral of omega_e.
    pub area_e: f64,
    /// integral K omega.
    pub int_k: f64,
    /// integral K+ omega (K+ = max(K, 0)).
    pub int_k_plus: f64,
    /// integral H omega.
    pub int_h: f64,
    /// integral H^2 omega.
    pub willmore: f64,
    /// integral (1/H) omega; meaningful only when min_h > 0.
    pub int_inv_h: f64,
    /// integral rho omega = 3 vol for closed embedded surfaces.
    pub int_rho: f64,
    /// integral rho H omega.
    pub int_rho_h: f64,
    /// integral K_M+ omega_e (Euclidean positive total curvature).
    pub int_km_plus_e: f64,
    pub min_h: f64,
    pub max_h: f64,
    /// Largest principal curvature over the nodes.
    pub max_lambda: f64,
    /// Largest relative defect of omega = <eta, xi> omega_e over the nodes,
    /// with omega recomputed directly as det(phi_u, phi_v, eta).
    pub omega_identity_defect: f64,
    pub node_count: usize,
}

impl IntegralBundle {
    /// Enclosed volume from the flux identity, (1/3) integral rho omega.
    pub fn flux_volume(&self) -> f64 {
        self.int_rho / 3.0
    }

    /// integral (1 - rho H) omega.
    pub fn alexandrov_residual(&self) -> f64 {
        self.lambda_m - self.int_rho_h
    }

    /// Area-weighted mean of H.
    pub fn mean_h(&self) -> f64 {
        self.int_h / self.lambda_m
    }

    /// Area-weighted standard deviation of H.
    pub fn stdev_h(&self) -> f64 {
        let mean = self.mean_h();
        (self.willmore / self.lambda_m - mean * mean).max(0.0).sqrt()
    }
}

#[derive(Clone, Default)]
struct PanelSum {
    bundle: IntegralBundle,
}

impl PanelSum {
    fn new() -> Self {
        let mut s = Self::default();
        s.bundle.min_h = f64::INFINITY;
        s.bundle.max_h = f64::NEG_INFINITY;
        s.bundle.max_lambda = f64::NEG_INFINITY;
        s
    }

    fn absorb(&mut self, other: &IntegralBundle) {
        let b = &mut self.bundle;
        b.lambda_m += other.lambda_m;
        b.area_e += other.area_e;
        b.int_k += other.int_k;
        b.int_k_plus += other.int_k_plus;
        b.int_h += other.int_h;
        b.willmore += other.willmore;
        b.int_inv_h += other.int_inv_h;
        b.int_rho += other.int_rho;
        b.int_rho_h += other.int_rho_h;
        b.int_km_plus_e += other.int_km_plus_e;
        b.min_h = b.min_h.min(other.min_h);
        b.max_h = b.max_h.max(other.max_h);
        b.max_lambda = b.max_lambda.max(other.max_lambda);
        b.omega_identity_defect = b.omega_identity_defect.max(other.omega_identity_defect);
        b.node_count += other.node_count;
    }
}

fn chart_panels(chart: &SurfaceChart, norm: &NormGauge, grid: &GridSpec) -> (Panels1d, Panels1d) {
    let degenerate = norm.degenerate_on_coordinate_planes();
    let levels = if degenerate { grid.grade_levels } else { 0 };
    let empty: Vec<f64> = vec![];
    let sing_u = if degenerate { &chart.singular_u } else { &empty };
    let sing_v = if degenerate { &chart.singular_v } else { &empty };
    let mut breaks_u = chart.breaks_u.clone();
    breaks_u.extend_from_slice(&chart.singular_u);
    let mut breaks_v = chart.breaks_v.clone();
    breaks_v.extend_from_slice(&chart.singular_v);
    let pu = Panels1d::build(
        chart.domain[0].0,
        chart.domain[0].1,
        grid.base_panels,
        &breaks_u,
        sing_u,
        levels,
        grid.grade_ratio,
    );
    let pv = Panels1d::build(
        chart.domain[1].0,
        chart.domain[1].1,
        grid.base_panels,
        &breaks_v,
        sing_v,
        levels,
        grid.grade_ratio,
    );
    (pu, pv)
}

/// Evaluate the functional bundle on a surface.
pub fn evaluate(surface: &Surface, norm: &Arc<NormGauge>, grid: &GridSpec) -> Result<IntegralBundle> {
    let rule = gauss_legendre(grid.order);
    let mut tasks = Vec::new();
    for (ci, chart) in surface.charts.iter().enumerate() {
        let (pu, pv) = chart_panels(chart, norm, grid);
        let (nu, wu) = pu.nodes(&rule);
        let (nv, wv) = pv.nodes(&rule);
        tasks.push((ci, nu, wu, nv, wv));
    }
    // One parallel job per u-panel row of each chart; results are folded in
    // construction order.
    let mut jobs = Vec::new();
    for (ci, nu, wu, nv, wv) in &tasks {
        let rows = nu.len() / grid.order;
        for row in 0..rows {
            jobs.push((*ci, row, nu, wu, nv, wv));
        }
    }
    let partials: Vec<Result<PanelSum>> = jobs
        .par_iter()
        .map(|(ci, row, nu, wu, nv, wv)| {
            let chart = &surface.charts[*ci];
            let mut sum = PanelSum::new();
            for i in (row * grid.order)..((row + 1) * grid.order) {
                for j in 0..nv.len() {
                    let w = wu[i] * wv[j];
                    let contrib = node_contribution(chart, norm, nu[i], nv[j], w)?;
                    sum.absorb(&contrib);
                }
            }
            Ok(sum)
        })
        .collect();
    let mut total = PanelSum::new();
    for p in partials {
        total.absorb(&p?.bundle);
    }
    Ok(total.bundle)
}

fn node_contribution(
    chart: &SurfaceChart,
    norm: &NormGauge,
    u: f64,
    v: f64,
    w: f64,
) -> Result<IntegralBundle> {
    let mask = chart.weight(u, v);
    if mask == 0.0 {
        return Ok(IntegralBundle {
            min_h: f64::INFINITY,
            max_h: f64::NEG_INFINITY,
            max_lambda: f64::NEG_INFINITY,
            ..Default::default()
        });
    }
    let jet = chart.jet(u, v);
    let f = frame_with(chart, &jet, u, v)?;
    let pc = point_curvature(norm, &f)?;
    let omega = pc.omega_density();
    let omega_e = pc.density_e;
    // Independent recomputation of omega as det(phi_u, phi_v, eta).
    let direct = chart.orientation * jet.du.cross(&jet.dv).dot(&pc.eta);
    let defect = (direct - omega).abs() / omega.abs().max(1e-300);
    let ws = w * mask;
    let rho = pc.p.dot(&pc.xi) / pc.eta_dot_xi;
    let h = pc.h;
    Ok(IntegralBundle {
        lambda_m: ws * omega,
        area_e: ws * omega_e,
        int_k: ws * pc.k * omega,
        int_k_plus: ws * pc.k.max(0.0) * omega,
        int_h: ws * h * omega,
        willmore: ws * h * h * omega,
        int_inv_h: if h != 0.0 { ws * omega / h } else { f64::INFINITY },
        int_rho: ws * rho * omega,
        int_rho_h: ws * rho * h * omega,
        int_km_plus_e: ws * pc.k_m.max(0.0) * omega_e,
        min_h: h,
        max_h: h,
        max_lambda: pc.lambda1.max(pc.lambda2),
        omega_identity_defect: defect,
        node_count: 1,
    })
}

/// Evaluate at the base resolution and at doubled panels; returns the fine
/// bundle and the relative change of the Minkowski area.
pub fn evaluate_refined(
    surface: &Surface,
    norm: &Arc<NormGauge>,
    grid: &GridSpec,
) -> Result<(IntegralBundle, f64)> {
    let coarse = evaluate(surface, norm, grid)?;
    let fine_grid = GridSpec {
        base_panels: grid.base_panels * 2,
        ..grid.clone()
    };
    let fine = evaluate(surface, norm, &fine_grid)?;
    let change = (fine.lambda_m - coarse.lambda_m).abs() / fine.lambda_m.abs().max(1e-300);
    Ok((fine, change))
}

/// Minkowski area with a refinement gate.
pub fn minkowski_area(surface: &Surface, norm: &Arc<NormGauge>, grid: &GridSpec) -> Result<f64> {
    let (bundle, change) = evaluate_refined(surface, norm, grid)?;
    if change > grid.tol {
        return Err(GeoError::QuadratureNotConverged {
            change,
            tol: grid.tol,
        });
    }
    Ok(bundle.lambda_m)
}

pub fn integral_k(surface: &Surface, norm: &Arc<NormGauge>, grid: &GridSpec) -> Result<f64> {
    Ok(evaluate(surface, norm, grid)?.int_k)
}

pub fn integral_h(surface: &Surface, norm: &Arc<NormGauge>, grid: &GridSpec) -> Result<f64> {
    Ok(evaluate(surface, norm, grid)?.int_h)
}

pub fn willmore_energy(surface: &Surface, norm: &Arc<NormGauge>, grid: &GridSpec) -> Result<f64> {
    Ok(evaluate(surface, norm, grid)?.willmore)
}

pub fn integral_inv_h(surface: &Surface, norm: &Arc<NormGauge>, grid: &GridSpec) -> Result<f64> {
    let bundle = evaluate(surface, norm, grid)?;
    if bundle.min_h <= 0.0 {
        return Err(GeoError::NonPositiveMeanCurvature {
            min_h: bundle.min_h,
        });
    }
    Ok(bundle.int_inv_h)
}

/// Enclosed volume from the flux identity (1/3) integral rho omega.
pub fn flux_volume(surface: &Surface, norm: &Arc<NormGauge>, grid: &GridSpec) -> Result<f64> {
    let v = evaluate(surface, norm, grid)?.flux_volume();
    if v < 0.0 {
        return Err(GeoError::OrientationError { value: v });
    }
    Ok(v)
}

/// integral (1 - rho H) omega; zero for every closed embedded surface.
pub fn alexandrov_residual(
    surface: &Surface,
    norm: &Arc<NormGauge>,
    grid: &GridSpec,
) -> Result<f64> {
    Ok(evaluate(surface, norm, grid)?.alexandrov_residual())
}

/// Extrema of the support factor <eta, xi> and the unit-sphere curvature
/// over a dense sampling of the unit sphere.
#[derive(Debug, Clone, Copy)]
pub struct SphereExtrema {
    pub min_support: f64,
    pub max_support: f64,
    pub min_curvature: f64,
    pub max_curvature: f64,
}

pub fn sphere_extrema(norm: &Arc<NormGauge>, samples_per_axis: usize) -> SphereExtrema {
    let sphere = Surface::minkowski_sphere(1.0, norm);
    let mut out = SphereExtrema {
        min_support: f64::INFINITY,
        max_support: f64::NEG_INFINITY,
        min_curvature: f64::INFINITY,
        max_curvature: f64::NEG_INFINITY,
    };
    for chart in &sphere.charts {
        for i in 0..samples_per_axis {
            let u = chart.domain[0].0 + chart.span_u() * (i as f64 + 0.5) / samples_per_axis as f64;
            for j in 0..(2 * samples_per_axis) {
                let v = chart.domain[1].0
                    + chart.span_v() * (j as f64 + 0.5) / (2 * samples_per_axis) as f64;
                let m = chart.point(u, v);
                // <m, n(m)> = 1 / |grad F(m)| by the Euler relation.
                let support = 1.0 / norm.grad(&m).norm();
                let k = norm.sphere_curvature_raw(&m);
                out.min_support = out.min_support.min(support);
                out.max_support = out.max_support.max(support);
                out.min_curvature = out.min_curvature.min(k);
                out.max_curvature = out.max_curvature.max(k);
            }
        }
    }
    out
}

/// The positive-total-curvature estimates: returns
/// (min<eta,xi>/max K_dB) integral K_M+ omega_e,
/// integral K+ omega,
/// (max<eta,xi>/min K_dB) integral K_M+ omega_e.
pub fn huber_bounds(
    surface: &Surface,
    norm: &Arc<NormGauge>,
    grid: &GridSpec,
) -> Result<(f64, f64, f64)> {
    let bundle = evaluate(surface, norm, grid)?;
    let ext = sphere_extrema(norm, 160);
    let lower = ext.min_support / ext.max_curvature * bundle.int_km_plus_e;
    let upper = ext.max_support / ext.min_curvature * bundle.int_km_plus_e;
    Ok((lower, bundle.int_k_plus, upper))
}

/// Area of the unit sphere of the norm in its own area element.
pub fn sphere_area(norm: &Arc<NormGauge>, grid: &GridSpec) -> Result<f64> {
    let sphere = Surface::minkowski_sphere(1.0, norm);
    let (bundle, change) = evaluate_refined(&sphere, norm, grid)?;
    if change > grid.tol {
        return Err(GeoError::QuadratureNotConverged {
            change,
            tol: grid.tol,
        });
    }
    Ok(bundle.lambda_m)
}

/// Signed area of the image of a parameter disk under the Birkhoff-Gauss
/// map, and the area of the disk itself: the ratio converges to K at the
/// center as the disk shrinks. Areas are integrated in geodesic polar
/// parameter coordinates around (u0, v0); the image form is the pullback of
/// omega under eta, evaluated by finite differences of the composed map.
pub fn area_ratio_over_disk(
    chart: &SurfaceChart,
    norm: &Arc<NormGauge>,
    u0: f64,
    v0: f64,
    radius: f64,
    n_r: usize,
    n_t: usize,
) -> Result<(f64, f64)> {
    let eta_at = |u: f64, v: f64| -> Result<V3> {
        let f = frame(chart, u, v)?;
        Ok(norm.inverse_gauss_map(&f.xi)?.x)
    };
    let rule = gauss_legendre(8);
    let pr = Panels1d::uniform(0.0, radius, n_r);
    let pt = Panels1d::uniform(0.0, std::f64::consts::TAU, n_t);
    let (nr, wr) = pr.nodes(&rule);
    let (nt, wt) = pt.nodes(&rule);
    let h = 1e-5 * chart.fd_scale;
    let mut disk_area = 0.0;
    let mut image_area = 0.0;
    for (r, wr) in nr.iter().zip(wr.iter()) {
        for (t, wt) in nt.iter().zip(wt.iter()) {
            let u = u0 + r * t.cos();
            let v = v0 + r * t.sin();
            let f = frame(chart, u, v)?;
            let eta = norm.inverse_gauss_map(&f.xi)?.x;
            // Jacobian factor r from polar parameter coordinates.
            let w = wr * wt * r;
            let omega = chart.orientation * f.jet.du.cross(&f.jet.dv).dot(&eta);
            disk_area += w * omega;
            // Image density: det(d(eta.phi)_u, d(eta.phi)_v, eta), by central
            // differences of the composed map.
            let gu = (eta_at(u + h, v)? - eta_at(u - h, v)?) / (2.0 * h);
            let gv = (eta_at(u, v + h)? - eta_at(u, v - h)?) / (2.0 * h);
            let pull = chart.orientation * gu.cross(&gv).dot(&eta);
            image_area += w * pull;
        }
    }
    Ok((image_area, disk_area))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SplitMix64;
    use approx::assert_relative_eq;

    const PI: f64 = std::f64::consts::PI;

    #[test]
    fn euclidean_sphere_area_is_4pi() {
        let norm = Arc::new(NormGauge::euclidean());
        let area = sphere_area(&norm, &GridSpec::sphere_area()).unwrap();
        assert_relative_eq!(area, 4.0 * PI, epsilon = 1e-8);
    }

    #[test]
    fn scaled_euclidean_sphere_area_is_cone_volume() {
        // F = |x| / r: lambda(dB) = 3 V3(B) = 4 pi r^3.
        let r = 1.7;
        let norm = Arc::new(NormGauge::superellipsoid(r, r, r, 2.0).unwrap());
        let area = sphere_area(&norm, &GridSpec::sphere_area()).unwrap();
        assert_relative_eq!(area, 4.0 * PI * r.powi(3), max_relative = 1e-8);
    }

    #[test]
    fn minkowski_area_scales_quadratically() {
        let norm = Arc::new(NormGauge::lp(4.0).unwrap());
        let grid = GridSpec::coarse();
        let unit = evaluate(&Surface::minkowski_sphere(1.0, &norm), &norm, &grid).unwrap();
        let scaled = evaluate(&Surface::minkowski_sphere(1.6, &norm), &norm, &grid).unwrap();
        assert_relative_eq!(scaled.lambda_m, 1.6 * 1.6 * unit.lambda_m, max_relative = 1e-12);
    }

    #[test]
    fn lp4_sphere_area_self_converges_and_matches_ball_volume() {
        let norm = Arc::new(NormGauge::lp(4.0).unwrap());
        let grid = GridSpec::default();
        let (bundle, change) = evaluate_refined(&Surface::minkowski_sphere(1.0, &norm), &norm, &grid).unwrap();
        assert!(change < 1e-6, "self-convergence failed: {change:e}");
        // Cone identity: lambda(dB) = 3 V3(B); Monte Carlo ball volume.
        let mut rng = SplitMix64::new(1234);
        let n = 400_000;
        let mut hits = 0u64;
        for _ in 0..n {
            let z = V3::new(
                rng.next_range(-1.0, 1.0),
                rng.next_range(-1.0, 1.0),
                rng.next_range(-1.0, 1.0),
            );
            if norm.gauge(&z) <= 1.0 {
                hits += 1;
            }
        }
        let frac = hits as f64 / n as f64;
        let vol = frac * 8.0;
        let sigma = 8.0 * (frac * (1.0 - frac) / n as f64).sqrt();
        assert!(
            (bundle.lambda_m - 3.0 * vol).abs() < 3.0 * 3.0 * sigma,
            "lambda = {}, 3 vol = {} +- {}",
            bundle.lambda_m,
            3.0 * vol,
            3.0 * sigma
        );
    }

    fn sphere_unit() -> Surface {
        Surface::sphere(1.0)
    }

    #[test]
    fn flux_volume_is_norm_independent() {
        let grid = GridSpec::coarse();
        let euclid = Arc::new(NormGauge::euclidean());
        let lp4 = Arc::new(NormGauge::lp(4.0).unwrap());
        // Unit round sphere: 4 pi / 3 under any norm. Accuracy is limited
        // by the polar blend bands at this resolution.
        let fine = GridSpec::sphere_area();
        assert_relative_eq!(
            flux_volume(&sphere_unit(), &euclid, &fine).unwrap(),
            4.0 * PI / 3.0,
            max_relative = 1e-7
        );
        assert_relative_eq!(
            flux_volume(&sphere_unit(), &lp4, &fine).unwrap(),
            4.0 * PI / 3.0,
            max_relative = 1e-7
        );
        // Ellipsoid: 4 pi a b c / 3.
        let ell = Surface::ellipsoid(1.0, 1.5, 2.0);
        assert_relative_eq!(
            flux_volume(&ell, &lp4, &fine).unwrap(),
            4.0 * PI * 3.0 / 3.0,
            max_relative = 1e-7
        );
        // Torus: 2 pi^2 R r^2; single unmasked chart, spectral accuracy.
        let torus = Surface::torus(2.0, 0.5);
        assert_relative_eq!(
            flux_volume(&torus, &lp4, &grid).unwrap(),
            2.0 * PI * PI * 2.0 * 0.25,
            max_relative = 1e-9
        );
    }

    #[test]
    fn alexandrov_residual_vanishes_on_smooth_cases() {
        let grid = GridSpec::default();
        let euclid = Arc::new(NormGauge::euclidean());
        let ell = Surface::ellipsoid(1.0, 1.5, 2.0);
        let bundle = evaluate(&ell, &euclid, &grid).unwrap();
        assert!(
            bundle.alexandrov_residual().abs() < 1e-6 * bundle.lambda_m,
            "residual {} vs area {}",
            bundle.alexandrov_residual(),
            bundle.lambda_m
        );
        // Minkowski sphere under its own norm: rho = r and H = 1/r pointwise.
        let lp3 = Arc::new(NormGauge::lp(3.0).unwrap());
        let ms = Surface::minkowski_sphere(1.3, &lp3);
        let bundle = evaluate(&ms, &lp3, &grid).unwrap();
        assert!(bundle.alexandrov_residual().abs() < 1e-9 * bundle.lambda_m);
        assert!(bundle.stdev_h() < 1e-6 * bundle.mean_h());
    }

    #[test]
    fn total_curvature_equals_sphere_area_euclidean() {
        let grid = GridSpec::default();
        let euclid = Arc::new(NormGauge::euclidean());
        let ell = Surface::ellipsoid(1.0, 1.5, 2.0);
        let bundle = evaluate(&ell, &euclid, &grid).unwrap();
        assert_relative_eq!(bundle.int_k, 4.0 * PI, max_relative = 1e-6);
        // Torus: signed total curvature zero, positive part 4 pi.
        let torus = Surface::torus(2.0, 0.5);
        let bundle = evaluate(&torus, &euclid, &grid).unwrap();
        assert!(bundle.int_k.abs() < 1e-9);
        assert_relative_eq!(bundle.int_k_plus, 4.0 * PI, max_relative = 1e-7);
        assert_relative_eq!(bundle.int_km_plus_e, 4.0 * PI, max_relative = 1e-7);
    }

    #[test]
    fn huber_chain_collapses_for_euclidean() {
        let grid = GridSpec::coarse();
        let euclid = Arc::new(NormGauge::euclidean());
        let torus = Surface::torus(2.0, 0.5);
        let (lo, val, hi) = huber_bounds(&torus, &euclid, &grid).unwrap();
        assert_relative_eq!(lo, val, max_relative = 1e-9);
        assert_relative_eq!(hi, val, max_relative = 1e-9);
    }

    #[test]
    fn huber_bounds_bracket_under_lp() {
        let grid = GridSpec::coarse();
        let lp4 = Arc::new(NormGauge::lp(4.0).unwrap());
        let torus = Surface::torus(2.0, 0.5);
        let (lo, val, hi) = huber_bounds(&torus, &lp4, &grid).unwrap();
        assert!(lo <= val && val <= hi, "bounds ({lo}, {val}, {hi})");
        assert!(lo > 0.0);
    }

    #[test]
    fn omega_identity_holds_pointwise() {
        let grid = GridSpec {
            base_panels: 4,
            grade_levels: 4,
            ..GridSpec::default()
        };
        let lp3 = Arc::new(NormGauge::lp(3.0).unwrap());
        let torus = Surface::torus(2.0, 0.5);
        let bundle = evaluate(&torus, &lp3, &grid).unwrap();
        assert!(bundle.omega_identity_defect < 1e-10);
    }

    #[test]
    fn willmore_equality_on_minkowski_spheres() {
        let grid = GridSpec::coarse();
        for norm in [
            Arc::new(NormGauge::euclidean()),
            Arc::new(NormGauge::lp(4.0).unwrap()),
        ] {
            // Same grid on both sides so the quadrature error cancels.
            let area = evaluate(&Surface::minkowski_sphere(1.0, &norm), &norm, &grid)
                .unwrap()
                .lambda_m;
            let s = Surface::minkowski_sphere(1.9, &norm);
            let bundle = evaluate(&s, &norm, &grid).unwrap();
            assert_relative_eq!(bundle.willmore, area, max_relative = 1e-10);
            // Volume bound equality: integral (1/H) omega = 3 vol.
            assert_relative_eq!(bundle.int_inv_h, bundle.int_rho, max_relative = 1e-8);
        }
    }

    #[test]
    fn non_sphere_has_nonconstant_h() {
        let grid = GridSpec::coarse();
        let euclid = Arc::new(NormGauge::euclidean());
        let ell = Surface::ellipsoid(1.0, 1.5, 2.0);
        let bundle = evaluate(&ell, &euclid, &grid).unwrap();
        assert!(bundle.stdev_h() > 1e-3 * bundle.mean_h());
    }

    #[test]
    fn area_refinement_gate_reports_convergence() {
        let norm = Arc::new(NormGauge::euclidean());
        let s = Surface::sphere(1.0);
        let area = minkowski_area(&s, &norm, &GridSpec::sphere_area()).unwrap();
        assert_relative_eq!(area, 4.0 * PI, epsilon = 1e-8);
        // An over-tight tolerance at coarse resolution reports
        // non-convergence instead of a wrong value.
        let tight = GridSpec {
            base_panels: 6,
            tol: 1e-9,
            ..GridSpec::default()
        };
        assert!(matches!(
            minkowski_area(&s, &norm, &tight),
            Err(GeoError::QuadratureNotConverged { .. })
        ));
    }
}
