//! The Birkhoff-Gauss map eta = u . xi and Minkowski curvatures.
//!
//! `K = det(d eta)` and `H = tr(d eta) / 2`; the eigenvalues of `d eta` are
//! the principal curvatures. Two independent routes are provided:
//!
//! - `shape_matrix` differentiates the Newton-solved map eta by central
//!   differences in parameter space and projects onto the chart basis
//!   (least squares, with the out-of-plane residual kept as a correctness
//!   monitor);
//! - `curvature_ratio` evaluates K_M / K_dB(eta), the curvature-ratio
//!   identity, from analytic fundamental forms on both surfaces.
//!
//! Integral evaluators use a third, fully analytic differential
//! (`birkhoff_differential`) obtained by inverting the unit-sphere shape
//! operator at the converged eta; unlike finite differences it stays
//! accurate arbitrarily close to the flat directions of lp-type norms.

use crate::error::{GeoError, Result};
use crate::norm::{NormGauge, V3};
use crate::surface::{frame, Frame, SurfaceChart};
use nalgebra::{Matrix2, Matrix3};

/// Per-point curvature bundle in the chart basis.
#[derive(Debug, Clone)]
pub struct CurvatureSample {
    pub p: V3,
    /// Euclidean outward unit normal.
    pub xi: V3,
    /// Birkhoff normal, F(eta) = 1.
    pub eta: V3,
    /// d(eta) in the {phi_u, phi_v} basis (finite-difference route).
    pub shape: Matrix2<f64>,
    /// Principal curvatures, lambda1 >= lambda2.
    pub lambda1: f64,
    pub lambda2: f64,
    pub k: f64,
    pub h: f64,
    /// det(phi_u, phi_v, eta) for the outward-oriented basis.
    pub omega_density: f64,
    /// Relative out-of-plane residual of the FD differential.
    pub residual: f64,
}

/// Birkhoff normal at a chart point: the unit-sphere point whose supporting
/// plane is parallel to the tangent plane, outward.
pub fn birkhoff_normal(chart: &SurfaceChart, norm: &NormGauge, u: f64, v: f64) -> Result<V3> {
    let f = frame(chart, u, v)?;
    Ok(norm.inverse_gauss_map(&f.xi)?.x)
}

/// Result of the finite-difference shape matrix.
#[derive(Debug, Clone, Copy)]
pub struct ShapeMatrixFd {
    pub a: Matrix2<f64>,
    /// Relative out-of-plane residual, max over the two columns.
    pub residual: f64,
    /// Step actually used after refinement.
    pub h_used: f64,
}

const TANGENCY_LIMIT: f64 = 1e-4;

/// d(eta) in the {phi_u, phi_v} basis by central differences of eta along
/// the chart parameters, with least-squares projection onto the tangent
/// plane. The step is halved (up to 8 times) while the out-of-plane
/// residual exceeds the tangency limit.
pub fn shape_matrix(
    chart: &SurfaceChart,
    norm: &NormGauge,
    u: f64,
    v: f64,
    h: f64,
) -> Result<ShapeMatrixFd> {
    let f = frame(chart, u, v)?;
    let mut step = h;
    let mut last_err = None;
    for _ in 0..8 {
        match shape_matrix_at_step(chart, norm, &f, u, v, step) {
            Ok(res) => {
                if res.residual <= TANGENCY_LIMIT {
                    return Ok(res);
                }
                last_err = Some(GeoError::TangencyViolation {
                    residual: res.residual,
                    limit: TANGENCY_LIMIT,
                });
            }
            Err(e) => last_err = Some(e),
        }
        step *= 0.5;
    }
    Err(last_err.unwrap_or(GeoError::TangencyViolation {
        residual: f64::NAN,
        limit: TANGENCY_LIMIT,
    }))
}

fn shape_matrix_at_step(
    chart: &SurfaceChart,
    norm: &NormGauge,
    f: &Frame,
    u: f64,
    v: f64,
    h: f64,
) -> Result<ShapeMatrixFd> {
    let eta_at = |u: f64, v: f64| -> Result<V3> {
        let fr = frame(chart, u, v)?;
        Ok(norm.inverse_gauss_map(&fr.xi)?.x)
    };
    let g_u = (eta_at(u + h, v)? - eta_at(u - h, v)?) / (2.0 * h);
    let g_v = (eta_at(u, v + h)? - eta_at(u, v - h)?) / (2.0 * h);
    let (a, residual) = project_columns(f, &g_u, &g_v);
    Ok(ShapeMatrixFd {
        a,
        residual,
        h_used: h,
    })
}

/// Express two ambient vectors in the {phi_u, phi_v} basis by the Gram
/// normal equations; returns the matrix and the relative out-of-plane
/// residual (max over columns).
fn project_columns(f: &Frame, g_u: &V3, g_v: &V3) -> (Matrix2<f64>, f64) {
    let det = f.e * f.g - f.f * f.f;
    let mut residual: f64 = 0.0;
    let mut solve = |w: &V3| -> (f64, f64) {
        let b1 = f.jet.du.dot(w);
        let b2 = f.jet.dv.dot(w);
        let a = (f.g * b1 - f.f * b2) / det;
        let b = (f.e * b2 - f.f * b1) / det;
        let recon = a * f.jet.du + b * f.jet.dv;
        let wn = w.norm();
        if wn > 0.0 {
            residual = residual.max((w - recon).norm() / wn);
        }
        (a, b)
    };
    let (a11, a21) = solve(g_u);
    let (a12, a22) = solve(g_v);
    (Matrix2::new(a11, a12, a21, a22), residual)
}

/// Analytic differential of eta at a frame: d(eta) = W_dB(eta)^(-1) . d(xi),
/// where W_dB is the shape operator of the unit sphere, inverted on the
/// common tangent plane through a bordered 3x3 system.
pub fn birkhoff_differential(norm: &NormGauge, f: &Frame, eta: &V3) -> (V3, V3) {
    let n = f.xi;
    let grad_len = norm.grad(eta).norm();
    let hess = norm.hess(eta);
    let p = Matrix3::identity() - n * n.transpose();
    let bordered = (p * hess * p) / grad_len + n * n.transpose();
    let inv = bordered
        .try_inverse()
        .expect("unit-sphere shape operator is invertible off the degenerate set");
    (inv * f.xi_u, inv * f.xi_v)
}

/// Fully analytic per-point curvature data, used by the integral evaluators.
#[derive(Debug, Clone, Copy)]
pub struct PointCurvature {
    pub p: V3,
    pub xi: V3,
    pub eta: V3,
    /// d(eta) in the chart basis, analytic route.
    pub a: Matrix2<f64>,
    pub k: f64,
    pub h: f64,
    pub lambda1: f64,
    pub lambda2: f64,
    /// Euclidean Gaussian curvature of the surface.
    pub k_m: f64,
    /// Euclidean Gaussian curvature of the unit sphere at eta.
    pub k_sphere: f64,
    /// <eta, xi>; relates the area elements by omega = <eta, xi> omega_e.
    pub eta_dot_xi: f64,
    /// Euclidean area density |phi_u x phi_v|.
    pub density_e: f64,
}

impl PointCurvature {
    /// det(phi_u, phi_v, eta) for the outward-oriented basis.
    pub fn omega_density(&self) -> f64 {
        self.density_e * self.eta_dot_xi
    }
}

pub fn point_curvature(norm: &NormGauge, f: &Frame) -> Result<PointCurvature> {
    let sp = norm.inverse_gauss_map(&f.xi)?;
    let eta = sp.x;
    // One gradient/Hessian evaluation at eta feeds both the shape operator
    // inversion and the unit-sphere curvature.
    let g_eta = norm.grad(&eta);
    let h_eta = norm.hess(&eta);
    let grad_len = g_eta.norm();
    let k_sphere = g_eta.dot(&(crate::norm::adjugate(&h_eta) * g_eta)) / grad_len.powi(4);
    if k_sphere <= 0.0 {
        return Err(GeoError::DegenerateCurvature { value: k_sphere });
    }
    let n = f.xi;
    let p = Matrix3::identity() - n * n.transpose();
    let bordered = (p * h_eta * p) / grad_len + n * n.transpose();
    let inv = bordered.try_inverse().ok_or(GeoError::DegenerateCurvature {
        value: k_sphere,
    })?;
    let (y_u, y_v) = (inv * f.xi_u, inv * f.xi_v);
    let (a, _residual) = project_columns(f, &y_u, &y_v);
    let k_m = f.gaussian_curvature();
    // The determinant of the analytic differential and the curvature ratio
    // agree algebraically; the ratio form keeps K exact where the shape
    // operator inversion is nearly singular.
    let k = k_m / k_sphere;
    let h = 0.5 * a.trace();
    let (lambda1, lambda2) = eigenvalues_2x2(&a);
    Ok(PointCurvature {
        p: f.jet.p,
        xi: f.xi,
        eta,
        a,
        k,
        h,
        lambda1,
        lambda2,
        k_m,
        k_sphere,
        eta_dot_xi: eta.dot(&f.xi),
        density_e: f.area_density_e,
    })
}

fn eigenvalues_2x2(a: &Matrix2<f64>) -> (f64, f64) {
    let h = 0.5 * a.trace();
    let det = a.determinant();
    let disc = h * h - det;
    // d(eta) is self-adjoint, so the eigenvalues are real; tiny negative
    // discriminants are FD noise at umbilics.
    let s = disc.max(0.0).sqrt();
    (h + s, h - s)
}

/// Assemble the full finite-difference curvature bundle at a chart point.
/// Uses steps h and h/2 with one Richardson extrapolation pass.
pub fn curvature_sample(
    chart: &SurfaceChart,
    norm: &NormGauge,
    u: f64,
    v: f64,
) -> Result<CurvatureSample> {
    let f = frame(chart, u, v)?;
    let h0 = 1e-4 * chart.fd_scale;
    let coarse = shape_matrix(chart, norm, u, v, h0)?;
    let fine = shape_matrix_at_step(chart, norm, &f, u, v, coarse.h_used * 0.5)?;
    // Second-order central differences: Richardson with ratio 4.
    let a = (4.0 * fine.a - coarse.a) / 3.0;
    let eta = norm.inverse_gauss_map(&f.xi)?.x;
    let k = a.determinant();
    let h = 0.5 * a.trace();
    let disc = h * h - k;
    if disc < -1e-10 * (1.0 + h * h) {
        return Err(GeoError::InvalidInput(format!(
            "complex principal curvatures: discriminant {disc:e}"
        )));
    }
    let (lambda1, lambda2) = eigenvalues_2x2(&a);
    Ok(CurvatureSample {
        p: f.jet.p,
        xi: f.xi,
        eta,
        shape: a,
        lambda1,
        lambda2,
        k,
        h,
        omega_density: f.area_density_e * eta.dot(&f.xi),
        residual: coarse.residual.max(fine.residual),
    })
}

/// K as the ratio of Euclidean Gaussian curvatures, K_M(p) / K_dB(eta(p)).
/// Serves as the independent oracle for det(d eta).
pub fn curvature_ratio(chart: &SurfaceChart, norm: &NormGauge, u: f64, v: f64) -> Result<f64> {
    let f = frame(chart, u, v)?;
    let sp = norm.inverse_gauss_map(&f.xi)?;
    let k_sphere = norm.sphere_curvature(&sp)?;
    Ok(f.gaussian_curvature() / k_sphere)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::norm::quartic_blend;
    use crate::surface::Surface;
    use approx::assert_relative_eq;
    use std::sync::Arc;

    const FRAC_PI_2: f64 = std::f64::consts::FRAC_PI_2;

    fn grid_points(chart: &SurfaceChart, n: usize) -> Vec<(f64, f64)> {
        let mut pts = Vec::new();
        for i in 0..n {
            for j in 0..n {
                let u = chart.domain[0].0 + chart.span_u() * (i as f64 + 0.5) / n as f64;
                let v = chart.domain[1].0 + chart.span_v() * (j as f64 + 0.5) / n as f64;
                pts.push((u, v));
            }
        }
        pts
    }

    #[test]
    fn unit_sphere_of_norm_is_fixed_point() {
        for norm in [
            Arc::new(NormGauge::euclidean()),
            Arc::new(NormGauge::lp(4.0).unwrap()),
            Arc::new(NormGauge::superellipsoid(1.0, 1.2, 0.8, 4.0).unwrap()),
        ] {
            let s = Surface::minkowski_sphere(1.0, &norm);
            let chart = &s.charts[0];
            for (u, v) in [(1.0, 0.7), (1.8, 3.9), (2.1, 2.6)] {
                let p = chart.point(u, v);
                let sample = curvature_sample(chart, &norm, u, v).unwrap();
                assert!((sample.eta - p).norm() < 1e-9, "eta = id on the unit sphere");
                assert_relative_eq!(sample.k, 1.0, epsilon = 1e-8);
                assert_relative_eq!(sample.h, 1.0, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn euclidean_norm_reduces_to_gauss_map() {
        let norm = NormGauge::euclidean();
        let s = Surface::sphere(2.0);
        let chart = &s.charts[0];
        let sample = curvature_sample(chart, &norm, 1.2, 0.8).unwrap();
        assert!((sample.eta - sample.xi).norm() < 1e-10);
        assert_relative_eq!(sample.shape[(0, 0)], 0.5, epsilon = 1e-8);
        assert_relative_eq!(sample.shape[(1, 1)], 0.5, epsilon = 1e-8);
        assert!(sample.shape[(0, 1)].abs() < 1e-8);
        assert_relative_eq!(sample.k, 0.25, epsilon = 1e-8);
        assert_relative_eq!(sample.h, 0.5, epsilon = 1e-8);
    }

    #[test]
    fn lp4_ellipsoid_axis_point_has_axis_normal() {
        let norm = NormGauge::lp(4.0).unwrap();
        let s = Surface::ellipsoid(1.0, 1.5, 2.0);
        let chart = &s.charts[0];
        let eta = birkhoff_normal(chart, &norm, FRAC_PI_2, 0.0).unwrap();
        // The chart normal carries O(eps) dirt and the inverse Gauss map of
        // the lp ball amplifies it by a cube root near the poles.
        assert!((eta - V3::new(1.0, 0.0, 0.0)).norm() < 1e-5);
        let exact = norm.inverse_gauss_map(&V3::new(1.0, 0.0, 0.0)).unwrap().x;
        assert!((exact - V3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn minkowski_sphere_shape_matrix_is_identity_over_r() {
        let norm = Arc::new(NormGauge::lp(3.0).unwrap());
        let r = 2.0;
        let s = Surface::minkowski_sphere(r, &norm);
        let chart = &s.charts[0];
        let res = shape_matrix(chart, &norm, 1.3, 0.9, 1e-4).unwrap();
        assert_relative_eq!(res.a[(0, 0)], 1.0 / r, epsilon = 1e-7);
        assert_relative_eq!(res.a[(1, 1)], 1.0 / r, epsilon = 1e-7);
        assert!(res.a[(0, 1)].abs() < 1e-7 && res.a[(1, 0)].abs() < 1e-7);
    }

    #[test]
    fn fd_and_analytic_differentials_agree() {
        let norm = NormGauge::lp(4.0).unwrap();
        let s = Surface::ellipsoid(1.0, 1.5, 2.0);
        let chart = &s.charts[0];
        for (u, v) in [(1.2, 0.7), (1.9, 2.3), (0.8, 4.1)] {
            let f = frame(chart, u, v).unwrap();
            let fd = curvature_sample(chart, &norm, u, v).unwrap();
            let an = point_curvature(&norm, &f).unwrap();
            assert_relative_eq!(fd.k, an.k, max_relative = 1e-6);
            assert_relative_eq!(fd.h, an.h, max_relative = 1e-6);
        }
    }

    #[test]
    fn determinant_matches_curvature_ratio_on_grids() {
        let norms = [
            Arc::new(NormGauge::lp(3.0).unwrap()),
            Arc::new(NormGauge::lp(4.0).unwrap()),
        ];
        let surfaces = [Surface::ellipsoid(1.0, 1.5, 2.0), Surface::torus(2.0, 0.5)];
        for norm in &norms {
            for s in &surfaces {
                let chart = &s.charts[0];
                for (u, v) in grid_points(chart, 8) {
                    let sample = curvature_sample(chart, norm, u, v).unwrap();
                    let ratio = curvature_ratio(chart, norm, u, v).unwrap();
                    assert_relative_eq!(sample.k, ratio, max_relative = 1e-5);
                    // Sign agreement with the Euclidean curvature.
                    let k_m = frame(chart, u, v).unwrap().gaussian_curvature();
                    if k_m.abs() > 1e-8 {
                        assert_eq!(sample.k.signum(), k_m.signum());
                    }
                }
            }
        }
    }

    #[test]
    fn torus_inner_equator_under_lp3_is_negative() {
        let norm = NormGauge::lp(3.0).unwrap();
        let s = Surface::torus(2.0, 0.5);
        let chart = &s.charts[0];
        let u = std::f64::consts::PI - 0.2;
        let ratio = curvature_ratio(chart, &norm, u, 1.1).unwrap();
        let k_m = frame(chart, u, 1.1).unwrap().gaussian_curvature();
        assert!(k_m < 0.0 && ratio < 0.0);
        let sample = curvature_sample(chart, &norm, u, 1.1).unwrap();
        assert_relative_eq!(sample.k, ratio, max_relative = 1e-5);
    }

    #[test]
    fn homothety_scales_curvatures() {
        let norm = NormGauge::lp(4.0).unwrap();
        let s = Surface::ellipsoid(1.0, 1.5, 2.0);
        let (u, v) = (1.1, 0.6);
        let base = curvature_sample(&s.charts[0], &norm, u, v).unwrap();
        for c in [0.5, 2.0, 3.0] {
            let scaled = s.scaled(c);
            let sc = curvature_sample(&scaled.charts[0], &norm, u, v).unwrap();
            assert_relative_eq!(sc.k * c * c, base.k, max_relative = 1e-7);
            assert_relative_eq!(sc.h * c, base.h, max_relative = 1e-7);
        }
    }

    #[test]
    fn eigenvalue_consistency_and_orthogonality() {
        let norm = quartic_blend(0.6).unwrap();
        let s = Surface::ellipsoid(1.0, 1.5, 2.0);
        let chart = &s.charts[0];
        for (u, v) in grid_points(chart, 5) {
            let sample = curvature_sample(chart, &norm, u, v).unwrap();
            assert!((norm.gauge(&sample.eta) - 1.0).abs() < 1e-9);
            assert!(
                (sample.lambda1 * sample.lambda2 - sample.k).abs()
                    < 1e-10 * (1.0 + sample.k.abs())
            );
            assert!(
                (sample.lambda1 + sample.lambda2 - 2.0 * sample.h).abs()
                    < 1e-10 * (1.0 + sample.h.abs())
            );
            assert!(sample.lambda1 >= sample.lambda2);
            // Supporting-plane condition: grad F(eta) orthogonal to the
            // tangent plane.
            let g = norm.grad(&sample.eta);
            let f = frame(chart, u, v).unwrap();
            let gn = g.norm();
            assert!(g.dot(&f.jet.du).abs() / (gn * f.jet.du.norm()) < 1e-8);
            assert!(g.dot(&f.jet.dv).abs() / (gn * f.jet.dv.norm()) < 1e-8);
        }
    }

    #[test]
    fn fd_richardson_ratio_is_second_order() {
        let norm = NormGauge::lp(4.0).unwrap();
        let s = Surface::ellipsoid(1.0, 1.5, 2.0);
        let chart = &s.charts[0];
        let (u, v) = (1.2, 0.7);
        let f = frame(chart, u, v).unwrap();
        let an = point_curvature(&norm, &f).unwrap();
        let exact = an.a;
        let at = |h: f64| shape_matrix(chart, &norm, u, v, h).unwrap().a;
        let e1 = (at(2e-3) - exact).norm();
        let e2 = (at(1e-3) - exact).norm();
        let ratio = e1 / e2;
        assert!(
            (2.5..6.0).contains(&ratio),
            "expected Richardson ratio near 4, got {ratio} (e1={e1:e}, e2={e2:e})"
        );
    }

    #[test]
    fn omega_density_equals_euclidean_density_times_support() {
        let norm = NormGauge::lp(3.0).unwrap();
        let s = Surface::torus(2.0, 0.5);
        let chart = &s.charts[0];
        let (u, v) = (0.9, 2.0);
        let sample = curvature_sample(chart, &norm, u, v).unwrap();
        let f = frame(chart, u, v).unwrap();
        // omega = <eta, xi> omega_e, and the density is positive outward.
        let direct = chart.orientation
            * f.jet.du.cross(&f.jet.dv).dot(&sample.eta);
        assert_relative_eq!(sample.omega_density, direct, epsilon = 1e-12);
        assert!(sample.omega_density > 0.0);
    }
}
