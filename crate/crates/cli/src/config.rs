//! JSON run configuration. Unknown keys are rejected so that typos fail
//! loudly instead of silently running defaults.

use anyhow::{bail, Context};
use minkgeo::expr::Expr;
use minkgeo::norm::NormGauge;
use minkgeo::plane2d::{PlaneCurve, PlaneNorm};
use minkgeo::surface::Surface;
use serde::Deserialize;
use std::path::Path;
use std::sync::Arc;

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormConfig {
    Euclidean,
    Lp { p: f64 },
    Superellipsoid { a: f64, b: f64, c: f64, p: f64 },
}

impl NormConfig {
    pub fn build(&self) -> anyhow::Result<Arc<NormGauge>> {
        let norm = match self {
            NormConfig::Euclidean => NormGauge::euclidean(),
            NormConfig::Lp { p } => NormGauge::lp(*p).context("invalid lp norm")?,
            NormConfig::Superellipsoid { a, b, c, p } => {
                NormGauge::superellipsoid(*a, *b, *c, *p).context("invalid superellipsoid norm")?
            }
        };
        Ok(Arc::new(norm))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SurfaceConfig {
    MinkowskiSphere {
        r: f64,
    },
    Ellipsoid {
        a: f64,
        b: f64,
        c: f64,
    },
    Torus {
        #[serde(rename = "R")]
        big_r: f64,
        r: f64,
    },
    Graph {
        expr: String,
        #[serde(default = "default_graph_domain")]
        domain: [[f64; 2]; 2],
    },
}

fn default_graph_domain() -> [[f64; 2]; 2] {
    [[-1.0, 1.0], [-1.0, 1.0]]
}

impl SurfaceConfig {
    pub fn build(&self, norm: &Arc<NormGauge>) -> anyhow::Result<Surface> {
        Ok(match self {
            SurfaceConfig::MinkowskiSphere { r } => {
                if !(*r > 0.0) {
                    bail!("minkowski_sphere radius must be positive, got {r}");
                }
                Surface::minkowski_sphere(*r, norm)
            }
            SurfaceConfig::Ellipsoid { a, b, c } => {
                if !(*a > 0.0 && *b > 0.0 && *c > 0.0) {
                    bail!("ellipsoid semi-axes must be positive");
                }
                Surface::ellipsoid(*a, *b, *c)
            }
            SurfaceConfig::Torus { big_r, r } => {
                if !(*big_r > *r && *r > 0.0) {
                    bail!("torus needs R > r > 0, got R = {big_r}, r = {r}");
                }
                Surface::torus(*big_r, *r)
            }
            SurfaceConfig::Graph { expr, domain } => {
                let parsed = Expr::parse(expr)
                    .map_err(|e| anyhow::anyhow!("bad graph expression: {e}"))?;
                Surface::graph(
                    parsed,
                    [
                        (domain[0][0], domain[0][1]),
                        (domain[1][0], domain[1][1]),
                    ],
                )
            }
        })
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PlaneNormConfig {
    Euclidean,
    Lp { p: f64 },
}

impl PlaneNormConfig {
    pub fn build(&self) -> anyhow::Result<Arc<PlaneNorm>> {
        let norm = match self {
            PlaneNormConfig::Euclidean => PlaneNorm::euclidean(),
            PlaneNormConfig::Lp { p } => PlaneNorm::lp(*p).context("invalid plane lp norm")?,
        };
        Ok(Arc::new(norm))
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CurveConfig {
    Ellipse { a: f64, b: f64 },
    NormCircle { r: f64 },
}

impl CurveConfig {
    pub fn build(&self, norm: &Arc<PlaneNorm>) -> anyhow::Result<PlaneCurve> {
        Ok(match self {
            CurveConfig::Ellipse { a, b } => {
                if !(*a > 0.0 && *b > 0.0) {
                    bail!("ellipse semi-axes must be positive");
                }
                PlaneCurve::ellipse(*a, *b)
            }
            CurveConfig::NormCircle { r } => {
                if !(*r > 0.0) {
                    bail!("circle radius must be positive, got {r}");
                }
                PlaneCurve::norm_circle(*r, norm)
            }
        })
    }
}

/// Full run configuration; every block is optional with defaults.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub norm: Option<NormConfig>,
    pub surface: Option<SurfaceConfig>,
    pub plane_norm: Option<PlaneNormConfig>,
    pub curve: Option<CurveConfig>,
    /// Base quadrature panels per axis.
    pub grid: Option<usize>,
    /// Grading levels toward singular parameter lines.
    pub levels: Option<usize>,
    /// Tube or offset radius.
    pub eps: Option<f64>,
    /// Offset constants for the parallel-surface check.
    pub c: Option<Vec<f64>>,
    /// Steiner offsets.
    pub rho: Option<Vec<f64>>,
    /// Geodesic circle radii, decreasing.
    pub radii: Option<Vec<f64>>,
    /// Monte Carlo sample count.
    pub samples: Option<u64>,
    pub seed: Option<u64>,
    /// Chart point (u, v) for pointwise commands.
    pub point: Option<[f64; 2]>,
    /// Geodesic ray count.
    pub n_dirs: Option<usize>,
}

impl RunConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        let config: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("invalid config {}", path.display()))?;
        Ok(config)
    }

    pub fn norm(&self) -> anyhow::Result<Arc<NormGauge>> {
        self.norm
            .clone()
            .unwrap_or(NormConfig::Euclidean)
            .build()
    }

    pub fn surface(&self, norm: &Arc<NormGauge>) -> anyhow::Result<Surface> {
        self.surface
            .clone()
            .unwrap_or(SurfaceConfig::Ellipsoid {
                a: 1.0,
                b: 1.5,
                c: 2.0,
            })
            .build(norm)
    }

    pub fn plane_norm(&self) -> anyhow::Result<Arc<PlaneNorm>> {
        self.plane_norm
            .clone()
            .unwrap_or(PlaneNormConfig::Lp { p: 4.0 })
            .build()
    }

    pub fn curve(&self, norm: &Arc<PlaneNorm>) -> anyhow::Result<PlaneCurve> {
        self.curve
            .clone()
            .unwrap_or(CurveConfig::Ellipse { a: 2.0, b: 1.0 })
            .build(norm)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_norm_blocks() {
        let lp: NormConfig = serde_json::from_str(r#"{"kind":"lp","p":4.0}"#).unwrap();
        assert!(lp.build().is_ok());
        let eu: NormConfig = serde_json::from_str(r#"{"kind":"euclidean"}"#).unwrap();
        assert!(eu.build().is_ok());
        let se: NormConfig =
            serde_json::from_str(r#"{"kind":"superellipsoid","a":1.0,"b":1.2,"c":0.8,"p":4.0}"#)
                .unwrap();
        assert!(se.build().is_ok());
    }

    #[test]
    fn rejects_unknown_keys() {
        assert!(serde_json::from_str::<NormConfig>(r#"{"kind":"lp","p":4.0,"q":1}"#).is_err());
        assert!(serde_json::from_str::<RunConfig>(r#"{"grdi": 16}"#).is_err());
    }

    #[test]
    fn rejects_invalid_exponent() {
        let cfg: NormConfig = serde_json::from_str(r#"{"kind":"lp","p":-3.0}"#).unwrap();
        assert!(cfg.build().is_err());
    }

    #[test]
    fn parses_surface_blocks() {
        let norm = Arc::new(NormGauge::euclidean());
        for text in [
            r#"{"kind":"minkowski_sphere","r":2.0}"#,
            r#"{"kind":"ellipsoid","a":1.0,"b":1.5,"c":2.0}"#,
            r#"{"kind":"torus","R":2.0,"r":0.5}"#,
            r#"{"kind":"graph","expr":"x^2 - y^2"}"#,
        ] {
            let cfg: SurfaceConfig = serde_json::from_str(text).unwrap();
            assert!(cfg.build(&norm).is_ok(), "failed to build {text}");
        }
    }
}
