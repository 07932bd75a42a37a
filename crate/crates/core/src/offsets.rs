//! Parallel surfaces, tube volumes, and the Steiner polynomial.
//!
//! The two-term tube polynomial vol(M_eps) = 2 eps lambda_M + (2 eps^3 / 3)
//! int K omega (no quadratic term: the mean-curvature contribution cancels
//! between the two sides) is checked against a seeded Monte Carlo volume
//! oracle built on norm-distance minimization to the surface.

use crate::error::{GeoError, Result};
use crate::measures::{evaluate, GridSpec, IntegralBundle};
use crate::norm::{NormGauge, V3};
use crate::rng::draw_range;
use crate::surface::Surface;
use nalgebra::{Matrix2, Vector2};
use rayon::prelude::*;
use std::sync::Arc;

/// Minkowski Gaussian curvature of the offset surface p + c eta(p) from the
/// base curvatures: K / (c^2 K + 2 c H + 1).
pub fn parallel_curvature_predicted(k: f64, h: f64, c: f64) -> Result<f64> {
    let denom = c * c * k + 2.0 * c * h + 1.0;
    if denom.abs() < 1e-12 {
        return Err(GeoError::SingularOffset { c, denom });
    }
    Ok(k / denom)
}

/// Offset bound below which the tube parametrization stays injective:
/// 1 / max over the grid of max(lambda1, lambda2), or +inf when every
/// principal curvature is nonpositive. Sampled on an ungraded grid.
pub fn max_safe_offset(surface: &Surface, norm: &Arc<NormGauge>, grid: &GridSpec) -> Result<f64> {
    let plain = GridSpec {
        grade_levels: 0,
        ..grid.clone()
    };
    let bundle = evaluate(surface, norm, &plain)?;
    if bundle.max_lambda <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / bundle.max_lambda)
}

/// A tube instance with its safety classification.
#[derive(Debug, Clone, Copy)]
pub struct TubeSpec {
    pub eps: f64,
    pub max_safe: f64,
    pub safe: bool,
}

impl TubeSpec {
    pub fn new(surface: &Surface, norm: &Arc<NormGauge>, eps: f64, grid: &GridSpec) -> Result<Self> {
        if !(eps > 0.0) {
            return Err(GeoError::InvalidInput(format!(
                "tube radius must be positive, got {eps}"
            )));
        }
        let max_safe = max_safe_offset(surface, norm, grid)?;
        Ok(Self {
            eps,
            max_safe,
            safe: eps < max_safe,
        })
    }
}

/// Two-term tube volume polynomial 2 eps lambda_M + (2/3) eps^3 int K omega.
pub fn tube_volume_weyl(
    surface: &Surface,
    norm: &Arc<NormGauge>,
    eps: f64,
    grid: &GridSpec,
) -> Result<f64> {
    let tube = TubeSpec::new(surface, norm, eps, grid)?;
    if !tube.safe {
        return Err(GeoError::UnsafeOffset {
            eps,
            max_safe: tube.max_safe,
        });
    }
    let bundle = evaluate(surface, norm, grid)?;
    Ok(tube_volume_weyl_from(&bundle, eps))
}

/// The polynomial itself, for callers that already hold the functionals.
pub fn tube_volume_weyl_from(bundle: &IntegralBundle, eps: f64) -> f64 {
    2.0 * eps * bundle.lambda_m + (2.0 / 3.0) * eps.powi(3) * bundle.int_k
}

/// Steiner coefficients (c0, c1, c2, c3) of
/// V3(M + rho B) = c0 + c1 rho + c2 rho^2 + c3 rho^3:
/// (enclosed volume, Minkowski area, int H omega, int K omega / 3).
pub fn steiner_polynomial(
    surface: &Surface,
    norm: &Arc<NormGauge>,
    grid: &GridSpec,
) -> Result<[f64; 4]> {
    let bundle = evaluate(surface, norm, grid)?;
    // The outer-offset derivation needs a convex region.
    if bundle.int_k < 0.99 * bundle.int_k_plus {
        return Err(GeoError::InvalidInput(format!(
            "Steiner polynomial requires a convex surface (int K = {}, int K+ = {})",
            bundle.int_k, bundle.int_k_plus
        )));
    }
    Ok([
        bundle.flux_volume(),
        bundle.lambda_m,
        bundle.int_h,
        bundle.int_k / 3.0,
    ])
}

pub fn steiner_eval(c: &[f64; 4], rho: f64) -> f64 {
    c[0] + rho * (c[1] + rho * (c[2] + rho * c[3]))
}

// ---- Norm distance to a surface ------------------------------------------

/// Multistart minimizer of F(z - phi(u, v)) over the charts of a surface,
/// with precomputed seed grids and cheap pruning bounds.
pub struct DistanceField {
    surface: Surface,
    norm: Arc<NormGauge>,
    /// (chart index, u, v, point) seed grid.
    seeds: Vec<(usize, f64, f64, V3)>,
    /// Covering radius: every surface point is within this Euclidean
    /// distance of some seed.
    h_cover: f64,
}

const SEEDS_PER_AXIS: usize = 32;
const POLISH_STARTS: usize = 4;

impl DistanceField {
    pub fn new(surface: &Surface, norm: &Arc<NormGauge>) -> Self {
        let mut seeds = Vec::new();
        for (ci, chart) in surface.charts.iter().enumerate() {
            for i in 0..SEEDS_PER_AXIS {
                let u = chart.domain[0].0
                    + chart.span_u() * (i as f64 + 0.5) / SEEDS_PER_AXIS as f64;
                for j in 0..SEEDS_PER_AXIS {
                    let v = chart.domain[1].0
                        + chart.span_v() * (j as f64 + 0.5) / SEEDS_PER_AXIS as f64;
                    seeds.push((ci, u, v, chart.point(u, v)));
                }
            }
        }
        // Covering radius from a finer scan.
        let fine = 3 * SEEDS_PER_AXIS;
        let mut h_cover: f64 = 0.0;
        for chart in &surface.charts {
            for i in 0..fine {
                let u = chart.domain[0].0 + chart.span_u() * (i as f64 + 0.5) / fine as f64;
                for j in 0..fine {
                    let v = chart.domain[1].0 + chart.span_v() * (j as f64 + 0.5) / fine as f64;
                    let p = chart.point(u, v);
                    let nearest = seeds
                        .iter()
                        .map(|s| (s.3 - p).norm_squared())
                        .fold(f64::INFINITY, f64::min);
                    h_cover = h_cover.max(nearest.sqrt());
                }
            }
        }
        Self {
            surface: surface.clone(),
            norm: norm.clone(),
            seeds,
            h_cover,
        }
    }

    /// Norm distance dist(z, M) = min F(z - p) over the surface.
    pub fn distance(&self, z: &V3) -> f64 {
        if let Some(d) = self.surface.norm_distance_exact(z, &self.norm) {
            return d;
        }
        self.minimize(z)
    }

    /// Decide dist(z, M) <= eps, using bounds before the minimizer.
    pub fn within(&self, z: &V3, eps: f64) -> bool {
        if let Some(d) = self.surface.norm_distance_exact(z, &self.norm) {
            return d <= eps;
        }
        if let Some((lo_e, hi_e)) = self.surface.euclid_distance_bounds(z) {
            // F(w) >= |w| / r_max and F(w) <= |w| / r_min.
            if lo_e / self.norm.r_max > eps {
                return false;
            }
            if hi_e / self.norm.r_min <= eps {
                return true;
            }
        } else {
            // Seed-grid lower bound on the Euclidean distance.
            let best = self.best_seed_distances(z, 1)[0].1.sqrt();
            if (best - self.h_cover).max(0.0) / self.norm.r_max > eps {
                return false;
            }
        }
        self.minimize(z) <= eps
    }

    fn best_seed_distances(&self, z: &V3, k: usize) -> Vec<(usize, f64)> {
        let mut best: Vec<(usize, f64)> = Vec::with_capacity(k + 1);
        for (idx, s) in self.seeds.iter().enumerate() {
            let d2 = (s.3 - z).norm_squared();
            if best.len() < k || d2 < best.last().unwrap().1 {
                let pos = best.partition_point(|b| b.1 < d2);
                best.insert(pos, (idx, d2));
                if best.len() > k {
                    best.pop();
                }
            }
        }
        best
    }

    fn minimize(&self, z: &V3) -> f64 {
        let starts = self.best_seed_distances(z, POLISH_STARTS);
        let mut best = f64::INFINITY;
        for (idx, _) in starts {
            let (ci, u0, v0, _) = self.seeds[idx];
            let d = self.polish(z, ci, u0, v0);
            best = best.min(d);
        }
        best
    }

    /// Damped Newton on g(u, v) = F(z - phi(u, v)).
    fn polish(&self, z: &V3, chart_idx: usize, mut u: f64, mut v: f64) -> f64 {
        let chart = &self.surface.charts[chart_idx];
        let clamp = |u: f64, v: f64| -> (f64, f64) {
            let cu = if chart.periodic.0 {
                u
            } else {
                u.clamp(chart.domain[0].0, chart.domain[0].1)
            };
            let cv = if chart.periodic.1 {
                v
            } else {
                v.clamp(chart.domain[1].0, chart.domain[1].1)
            };
            (cu, cv)
        };
        let mut g = self.norm.gauge(&(z - chart.point(u, v)));
        let mut mu = 1e-8;
        for _ in 0..18 {
            let jet = chart.jet(u, v);
            let w = z - jet.p;
            if self.norm.gauge(&w) < 1e-14 {
                return 0.0;
            }
            let grad_f = self.norm.grad(&w);
            let hess_f = self.norm.hess(&w);
            let gu = -grad_f.dot(&jet.du);
            let gv = -grad_f.dot(&jet.dv);
            let grad_norm = (gu * gu + gv * gv).sqrt();
            if grad_norm < 1e-11 * (1.0 + g) {
                break;
            }
            let huu = jet.du.dot(&(hess_f * jet.du)) - grad_f.dot(&jet.duu);
            let huv = jet.du.dot(&(hess_f * jet.dv)) - grad_f.dot(&jet.duv);
            let hvv = jet.dv.dot(&(hess_f * jet.dv)) - grad_f.dot(&jet.dvv);
            let mut accepted = false;
            for _ in 0..14 {
                let h = Matrix2::new(huu + mu, huv, huv, hvv + mu);
                let Some(inv) = h.try_inverse() else {
                    mu = mu * 30.0 + 1e-6;
                    continue;
                };
                let step = inv * Vector2::new(-gu, -gv);
                let (nu, nv) = clamp(u + step.x, v + step.y);
                let g_new = self.norm.gauge(&(z - chart.point(nu, nv)));
                if g_new <= g - 1e-16 {
                    u = nu;
                    v = nv;
                    g = g_new;
                    mu = (mu * 0.25).max(1e-12);
                    accepted = true;
                    break;
                }
                mu = mu * 30.0 + 1e-9;
            }
            if !accepted {
                // Backtracking gradient fallback for indefinite regions.
                let scale = chart.fd_scale / grad_norm;
                let mut t = 0.5 * scale;
                for _ in 0..20 {
                    let (nu, nv) = clamp(u - t * gu, v - t * gv);
                    let g_new = self.norm.gauge(&(z - chart.point(nu, nv)));
                    if g_new < g {
                        u = nu;
                        v = nv;
                        g = g_new;
                        accepted = true;
                        break;
                    }
                    t *= 0.5;
                }
            }
            if !accepted {
                break;
            }
        }
        g
    }
}

/// Monte Carlo tube volume estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McVolume {
    pub estimate: f64,
    pub std_error: f64,
    pub samples: u64,
    pub hits: u64,
    /// Hits inside the enclosed region (when the surface has one).
    pub hits_inner: Option<u64>,
    /// Box volume, for converting counts back to volumes.
    pub box_volume: f64,
}

impl McVolume {
    fn from_counts(hits: u64, hits_inner: Option<u64>, samples: u64, box_volume: f64) -> Self {
        let frac = hits as f64 / samples as f64;
        Self {
            estimate: frac * box_volume,
            std_error: box_volume * (frac * (1.0 - frac) / samples as f64).sqrt(),
            samples,
            hits,
            hits_inner,
            box_volume,
        }
    }

    /// Volume of the inner-side hits alone.
    pub fn inner_estimate(&self) -> Option<f64> {
        self.hits_inner
            .map(|h| h as f64 / self.samples as f64 * self.box_volume)
    }
}

fn mc_box(surface: &Surface, margin: f64) -> (V3, V3, f64) {
    let (lo, hi) = surface.aabb();
    let lo = lo - V3::from_element(margin);
    let hi = hi + V3::from_element(margin);
    let vol = (hi - lo).iter().product::<f64>();
    (lo, hi, vol)
}

fn mc_count<F: Fn(&V3) -> (bool, bool) + Sync>(
    lo: V3,
    hi: V3,
    n_samples: u64,
    seed: u64,
    classify: F,
) -> (u64, u64) {
    const CHUNK: u64 = 1 << 16;
    let chunks: Vec<u64> = (0..n_samples.div_ceil(CHUNK)).collect();
    let (hits, inner) = chunks
        .par_iter()
        .map(|&ci| {
            let start = ci * CHUNK;
            let end = (start + CHUNK).min(n_samples);
            let mut hits = 0u64;
            let mut inner = 0u64;
            for i in start..end {
                let z = V3::new(
                    draw_range(seed, i, 0, lo.x, hi.x),
                    draw_range(seed, i, 1, lo.y, hi.y),
                    draw_range(seed, i, 2, lo.z, hi.z),
                );
                let (hit, is_inner) = classify(&z);
                hits += hit as u64;
                inner += (hit && is_inner) as u64;
            }
            (hits, inner)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    (hits, inner)
}

/// Seeded Monte Carlo estimate of vol{ z : dist(z, M) <= eps }. Counts are
/// integers accumulated per sample index, so the result is bit-identical for
/// a given seed regardless of the worker count.
pub fn tube_volume_monte_carlo(
    surface: &Surface,
    norm: &Arc<NormGauge>,
    eps: f64,
    n_samples: u64,
    seed: u64,
) -> McVolume {
    let field = DistanceField::new(surface, norm);
    let (lo, hi, box_vol) = mc_box(surface, eps * norm.r_max * 1.0001);
    let has_inside = surface.inside(&lo).is_some();
    let (hits, inner) = mc_count(lo, hi, n_samples, seed, |z| {
        let hit = field.within(z, eps);
        let is_inner = hit && has_inside && surface.inside(z) == Some(true);
        (hit, is_inner)
    });
    McVolume::from_counts(hits, has_inside.then_some(inner), n_samples, box_vol)
}

/// Seeded Monte Carlo estimate of vol(M + rho B) for a surface enclosing a
/// convex region.
pub fn outer_body_volume_monte_carlo(
    surface: &Surface,
    norm: &Arc<NormGauge>,
    rho: f64,
    n_samples: u64,
    seed: u64,
) -> Result<McVolume> {
    if surface.inside(&V3::zeros()).is_none() {
        return Err(GeoError::InvalidInput(
            "outer parallel body needs a surface with an enclosed region".into(),
        ));
    }
    let field = DistanceField::new(surface, norm);
    let (lo, hi, box_vol) = mc_box(surface, rho * norm.r_max * 1.0001);
    let (hits, inner) = mc_count(lo, hi, n_samples, seed, |z| {
        let is_inner = surface.inside(z) == Some(true);
        let hit = is_inner || field.within(z, rho);
        (hit, is_inner)
    });
    Ok(McVolume::from_counts(
        hits,
        Some(inner),
        n_samples,
        box_vol,
    ))
}

/// Recompute the Minkowski Gaussian curvature on the offset chart directly
/// (the verification side of the parallel-curvature formula).
pub fn parallel_curvature_recomputed(
    base: &Surface,
    norm: &Arc<NormGauge>,
    c: f64,
    chart_idx: usize,
    u: f64,
    v: f64,
) -> Result<f64> {
    let offset = base.parallel(norm, c);
    let sample = crate::birkhoff::curvature_sample(&offset.charts[chart_idx], norm, u, v)?;
    Ok(sample.k)
}
