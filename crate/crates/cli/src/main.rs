//! Command-line interface: curvature dumps, integral functionals, tube and
//! Steiner volumes, offset-surface checks, geodesic-circle estimates, the 2D
//! suite, and the full theorem-verification run.
//!
//! Exit codes: 0 on success (and all checks passing for `verify`), 1 on a
//! failed verification or computation error, 2 on a configuration error.

mod config;

use anyhow::Context;
use clap::{Parser, Subcommand};
use config::RunConfig;
use minkgeo::birkhoff::{curvature_ratio, curvature_sample};
use minkgeo::geodesic::bdp_estimate;
use minkgeo::measures::{evaluate, huber_bounds, sphere_area, GridSpec};
use minkgeo::offsets::{
    max_safe_offset, outer_body_volume_monte_carlo, parallel_curvature_predicted,
    parallel_curvature_recomputed, steiner_eval, steiner_polynomial, tube_volume_monte_carlo,
    tube_volume_weyl_from,
};
use minkgeo::plane2d::{
    antinorm, area_curvature_bound, circular_curvature, circular_curvature_ratio,
    total_circular_curvature, ArcLengthTable,
};
use minkgeo::verify::{run_suite, VerifyConfig};
use serde_json::json;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "minkgeo",
    about = "Curvature of surfaces immersed in 3D normed spaces",
    version
)]
struct Cli {
    /// JSON configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; results also go to stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed override for Monte Carlo oracles.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads (defaults to the number of cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Base quadrature panels per axis.
    #[arg(long, global = true)]
    grid: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Norm summary: bounding radii, unit-sphere area, warnings.
    NormInfo,
    /// Per-point curvature CSV over a parameter grid.
    Curvature,
    /// Integral functionals of a surface under a norm.
    Integrate,
    /// Tube volume: two-term polynomial vs Monte Carlo.
    Tube,
    /// Steiner polynomial of a convex surface, with Monte Carlo checks.
    Steiner,
    /// Parallel-surface curvature: predicted vs recomputed.
    Parallel,
    /// Geodesic-circle deficit estimates of the curvature.
    Bdp,
    /// Two-dimensional suite: circular curvature and length/area checks.
    Plane2d,
    /// Run the full theorem-verification suite.
    Verify,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let config = match cli.config.as_deref().map(RunConfig::load).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("config error: {e:#}");
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("config error: cannot build thread pool: {e}");
            return ExitCode::from(2);
        }
    }
    match dispatch(&cli, &config) {
        Ok(all_pass) => {
            if all_pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            // Configuration problems surfaced during command setup.
            let msg = format!("{e:#}");
            if msg.contains("invalid") || msg.contains("must be") || msg.contains("config") {
                eprintln!("config error: {msg}");
                ExitCode::from(2)
            } else {
                eprintln!("error: {msg}");
                ExitCode::from(1)
            }
        }
    }
}

fn grid_spec(cli: &Cli, config: &RunConfig) -> GridSpec {
    let mut grid = GridSpec::default();
    if let Some(base) = cli.grid.or(config.grid) {
        grid.base_panels = base;
    }
    if let Some(levels) = config.levels {
        grid.grade_levels = levels;
    }
    grid
}

fn write_output(cli: &Cli, name: &str, content: &str) -> anyhow::Result<()> {
    if let Some(dir) = &cli.out {
        std::fs::create_dir_all(dir)
            .with_context(|| format!("cannot create output directory {}", dir.display()))?;
        let path = dir.join(name);
        std::fs::write(&path, content)
            .with_context(|| format!("cannot write {}", path.display()))?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

fn dispatch(cli: &Cli, config: &RunConfig) -> anyhow::Result<bool> {
    let seed = cli.seed.or(config.seed).unwrap_or(7);
    match cli.command {
        Command::NormInfo => {
            let norm = config.norm()?;
            let area = sphere_area(&norm, &GridSpec::sphere_area())?;
            let out = serde_json::to_string_pretty(&json!({
                "name": norm.name(),
                "r_min": norm.r_min,
                "r_max": norm.r_max,
                "lambda_dB": area,
                "degenerate_on_coordinate_planes": norm.degenerate_on_coordinate_planes(),
                "warnings": norm.warnings,
            }))?;
            println!("{out}");
            write_output(cli, "norm_info.json", &out)?;
            Ok(true)
        }
        Command::Curvature => {
            let norm = config.norm()?;
            let surface = config.surface(&norm)?;
            let n = cli.grid.or(config.grid).unwrap_or(20);
            let chart = &surface.charts[0];
            let mut csv = String::from("u,v,K,H,lambda1,lambda2,K_ratio,residual\n");
            for i in 0..n {
                for j in 0..n {
                    let u = chart.domain[0].0 + chart.span_u() * (i as f64 + 0.5) / n as f64;
                    let v = chart.domain[1].0 + chart.span_v() * (j as f64 + 0.5) / n as f64;
                    let s = curvature_sample(chart, &norm, u, v)?;
                    let ratio = curvature_ratio(chart, &norm, u, v)?;
                    csv.push_str(&format!(
                        "{u:.12},{v:.12},{:.12e},{:.12e},{:.12e},{:.12e},{:.12e},{:.3e}\n",
                        s.k, s.h, s.lambda1, s.lambda2, ratio, s.residual
                    ));
                }
            }
            print!("{csv}");
            write_output(cli, "curvature.csv", &csv)?;
            Ok(true)
        }
        Command::Integrate => {
            let norm = config.norm()?;
            let surface = config.surface(&norm)?;
            let grid = grid_spec(cli, config);
            let bundle = evaluate(&surface, &norm, &grid)?;
            let lambda_db = sphere_area(&norm, &GridSpec::sphere_area())?;
            let (lo, val, hi) = huber_bounds(&surface, &norm, &grid)?;
            let out = serde_json::to_string_pretty(&json!({
                "lambda_M": bundle.lambda_m,
                "int_K": bundle.int_k,
                "lambda_dB": lambda_db,
                "willmore": bundle.willmore,
                "flux_volume": bundle.flux_volume(),
                "alexandrov_residual": bundle.alexandrov_residual(),
                "huber": [lo, val, hi],
                "int_H": bundle.int_h,
                "int_inv_H": if bundle.min_h > 0.0 { Some(bundle.int_inv_h) } else { None },
                "min_H": bundle.min_h,
            }))?;
            println!("{out}");
            write_output(cli, "integrate.json", &out)?;
            Ok(true)
        }
        Command::Tube => {
            let norm = config.norm()?;
            let surface = config.surface(&norm)?;
            let grid = grid_spec(cli, config);
            let eps = config.eps.unwrap_or(0.2);
            let samples = config.samples.unwrap_or(10_000_000);
            let bundle = evaluate(&surface, &norm, &grid)?;
            let safe = max_safe_offset(&surface, &norm, &grid)?;
            let weyl = tube_volume_weyl_from(&bundle, eps);
            let mc = tube_volume_monte_carlo(&surface, &norm, eps, samples, seed);
            let out = serde_json::to_string_pretty(&json!({
                "eps": eps,
                "max_safe_offset": safe,
                "safe": eps < safe,
                "weyl": weyl,
                "mc": {
                    "estimate": mc.estimate,
                    "std_error": mc.std_error,
                    "samples": mc.samples,
                    "seed": seed,
                },
                "sigmas": (weyl - mc.estimate).abs() / mc.std_error,
            }))?;
            println!("{out}");
            write_output(cli, "tube.json", &out)?;
            Ok(true)
        }
        Command::Steiner => {
            let norm = config.norm()?;
            let surface = config.surface(&norm)?;
            let grid = grid_spec(cli, config);
            let rhos = config.rho.clone().unwrap_or(vec![0.05, 0.1, 0.2]);
            let samples = config.samples.unwrap_or(10_000_000);
            let coeffs = steiner_polynomial(&surface, &norm, &grid)?;
            let mut rows = Vec::new();
            for (i, rho) in rhos.iter().enumerate() {
                let mc =
                    outer_body_volume_monte_carlo(&surface, &norm, *rho, samples, seed + i as u64)?;
                rows.push(json!({
                    "rho": rho,
                    "polynomial": steiner_eval(&coeffs, *rho),
                    "mc_estimate": mc.estimate,
                    "mc_std_error": mc.std_error,
                }));
            }
            let out = serde_json::to_string_pretty(&json!({
                "coefficients": coeffs,
                "volumes": rows,
            }))?;
            println!("{out}");
            write_output(cli, "steiner.json", &out)?;
            Ok(true)
        }
        Command::Parallel => {
            let norm = config.norm()?;
            let surface = config.surface(&norm)?;
            let offsets = config.c.clone().unwrap_or(vec![-0.1, -0.05, 0.05, 0.1]);
            let [u, v] = config.point.unwrap_or([1.2, 0.7]);
            let sample = curvature_sample(&surface.charts[0], &norm, u, v)?;
            let mut rows = Vec::new();
            for c in offsets {
                let predicted = parallel_curvature_predicted(sample.k, sample.h, c)?;
                let recomputed = parallel_curvature_recomputed(&surface, &norm, c, 0, u, v)?;
                rows.push(json!({
                    "c": c,
                    "predicted": predicted,
                    "recomputed": recomputed,
                    "rel_diff": (predicted - recomputed).abs() / recomputed.abs().max(1e-300),
                }));
            }
            let out = serde_json::to_string_pretty(&json!({
                "point": [u, v],
                "K": sample.k,
                "H": sample.h,
                "offsets": rows,
            }))?;
            println!("{out}");
            write_output(cli, "parallel.json", &out)?;
            Ok(true)
        }
        Command::Bdp => {
            let norm = config.norm()?;
            let surface = config.surface(&norm)?;
            let [u, v] = config.point.unwrap_or([1.2, 0.7]);
            let radii = config.radii.clone().unwrap_or(vec![0.06, 0.03, 0.015]);
            let n_dirs = config.n_dirs.unwrap_or(128);
            let est = bdp_estimate(&surface.charts[0], &norm, u, v, &radii, n_dirs)?;
            let sample = curvature_sample(&surface.charts[0], &norm, u, v)?;
            let out = serde_json::to_string_pretty(&json!({
                "point": [u, v],
                "radii": est.radii,
                "ratios": est.ratios,
                "area_ratios": est.area_ratios,
                "extrapolated": est.extrapolated,
                "extrapolated_area": est.extrapolated_area,
                "deficit_slope": est.deficit_slope,
                "det_d_eta": sample.k,
            }))?;
            println!("{out}");
            write_output(cli, "bdp.json", &out)?;
            Ok(true)
        }
        Command::Plane2d => {
            let norm = config.plane_norm()?;
            let curve = config.curve(&norm)?;
            let n = cli.grid.or(config.grid).unwrap_or(64);
            let table = ArcLengthTable::new(&curve, &norm, 64);
            let mut csv = String::from("t,s,s_a,k_c\n");
            for i in 0..n {
                let t = std::f64::consts::TAU * (i as f64 + 0.5) / n as f64;
                let s = table.s_of_t(&curve, &norm, t);
                let s_a = table.s_a_of_t(&curve, &norm, t);
                let kc = circular_curvature(&curve, &norm, t)?;
                csv.push_str(&format!("{t:.12},{s:.12},{s_a:.12},{kc:.12e}\n"));
            }
            print!("{csv}");
            write_output(cli, "plane2d.csv", &csv)?;
            let total = total_circular_curvature(&curve, &norm)?;
            let circle_len = norm.circle_length();
            let (lhs, rhs) = area_curvature_bound(&curve, &norm)?;
            let mut max_rel: f64 = 0.0;
            for t in [0.35, 0.9, 1.8, 2.6, 4.1, 5.3] {
                let fd = circular_curvature(&curve, &norm, t)?;
                let ratio = circular_curvature_ratio(&curve, &norm, t);
                max_rel = max_rel.max((fd - ratio).abs() / ratio.abs().max(1e-300));
            }
            let summary = serde_json::to_string_pretty(&json!({
                "curve": curve.name(),
                "norm": norm.name(),
                "total_circular_curvature": total,
                "circle_length": circle_len,
                "circle_length_anti": norm.circle_length_anti(),
                "antinorm_unit_x": antinorm(&norm, &minkgeo::plane2d::V2::new(1.0, 0.0)),
                "area_bound": { "two_area": lhs, "int_reciprocal_kc_ds_a": rhs },
                "kc_fd_vs_ratio_max_rel": max_rel,
            }))?;
            println!("{summary}");
            write_output(cli, "plane2d.json", &summary)?;
            Ok(true)
        }
        Command::Verify => {
            let defaults = VerifyConfig::default();
            let vconfig = VerifyConfig {
                seed,
                mc_samples: config.samples.unwrap_or(defaults.mc_samples),
                grid_base: cli.grid.or(config.grid).unwrap_or(defaults.grid_base),
                grade_levels: config.levels.unwrap_or(defaults.grade_levels),
            };
            let report = run_suite(&vconfig)?;
            print!("{}", report.table());
            let passed = report.checks.iter().filter(|c| c.pass).count();
            println!("{passed}/{} checks passed", report.checks.len());
            write_output(cli, "report.json", &report.to_json())?;
            write_output(cli, "report_canonical.json", &report.canonical_json())?;
            Ok(report.all_pass())
        }
    }
}
