//! Plan execution: dispatches a [`RunPlan`] to the library and shapes the
//! result into JSON. All numeric work lives in the library; this module
//! only loads inputs, runs one entry point, and serializes the report.

use serde_json::{json, Value};

use curvkit::measures::{gen_four_corner_cantor, gen_lipschitz_graph, gen_segment};
use curvkit::multiscale::{beta_cube, build_lattice, classify_cubes, packing_ratio, BetaNorm};
use curvkit::operators::{mv_residual, norm_chain, t1_norm_sq};
use curvkit::permutations::{
    cauchy_permutation, endpoint_ts, omega_big_region, omega_region, permutation,
};
use curvkit::scan::{constrained_inf_search, ratio_sup_search, region_boundary_scan,
    sign_change_search};
use curvkit::{DiscreteMeasure, KernelSpec, Triple, Truncation};

use crate::error::CliError;
use crate::plan::{Command, GenSpec, MeasureSource, RunPlan};

/// What a successful run produces: a JSON report, or CSV rows plus a JSON
/// summary for measure generation.
pub enum Output {
    Report(Value),
    Measure { csv: String, summary: Value },
}

fn domain(e: impl std::fmt::Display) -> CliError {
    CliError::domain(e.to_string())
}

fn to_value<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize without fallible keys")
}

fn finite_or_null(v: f64) -> Value {
    if v.is_finite() {
        json!(v)
    } else {
        Value::Null
    }
}

fn generate(gen: &GenSpec) -> Result<DiscreteMeasure, CliError> {
    match *gen {
        GenSpec::Segment { count } => gen_segment(count),
        GenSpec::Cantor4 { level } => gen_four_corner_cantor(level),
        GenSpec::Lip { count, slope, seed } => gen_lipschitz_graph(count, slope, seed),
    }
    .map_err(domain)
}

fn load_measure(source: &MeasureSource) -> Result<DiscreteMeasure, CliError> {
    match source {
        MeasureSource::Generator(gen) => generate(gen),
        MeasureSource::File(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
                path: path.display().to_string(),
                message: e.to_string(),
            })?;
            DiscreteMeasure::from_csv_text(&text).map_err(domain)
        }
    }
}

fn eval_permutation(kernel: KernelSpec, triple: &Triple) -> Result<f64, CliError> {
    if kernel.is_real() {
        permutation(kernel, triple).map_err(domain)
    } else {
        Ok(cauchy_permutation(triple))
    }
}

fn measure_summary(source: &str, mu: &DiscreteMeasure) -> Value {
    json!({
        "source": source,
        "atoms": mu.len(),
        "total_mass": mu.total_mass(),
        "diameter": mu.diameter(),
        "min_gap": mu.min_gap(),
    })
}

/// Run the plan and shape its JSON output. Domain failures from the
/// library come back as [`CliError::Domain`], file problems as
/// [`CliError::Io`].
pub fn execute(plan: &RunPlan) -> Result<Output, CliError> {
    match plan.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(domain)?;
            pool.install(|| dispatch(plan))
        }
        None => dispatch(plan),
    }
}

fn dispatch(plan: &RunPlan) -> Result<Output, CliError> {
    let report = match &plan.command {
        Command::Perm { kernel, triple } => {
            let value = eval_permutation(*kernel, triple)?;
            let diam = triple.diameter();
            json!({
                "kernel": kernel.to_string(),
                "triple": to_value(triple),
                "value": value,
                "normalized_value": value * diam * diam,
                "diameter": diam,
            })
        }
        Command::Curvature { triple } => {
            let c = curvkit::geometry::menger_curvature(triple);
            let r = curvkit::geometry::circumradius(triple);
            json!({
                "triple": to_value(triple),
                "curvature": c,
                "circumradius": finite_or_null(r),
                "collinear": c == 0.0,
            })
        }
        Command::Region { lo, hi, grid, scan } => {
            let (small_lo, small_hi) = omega_region(*lo, *hi).map_err(domain)?;
            let region = omega_big_region(*lo, *hi).map_err(domain)?;
            let endpoints: Vec<Value> = endpoint_ts(*lo, *hi)
                .map_err(domain)?
                .into_iter()
                .map(|(edge, t)| json!({ "edge": edge, "t": t }))
                .collect();
            let mut report = json!({
                "orders": [lo, hi],
                "small_region": { "lower": small_lo, "upper": small_hi },
                "region": to_value(&region),
                "endpoints": endpoints,
            });
            if let Some(grid) = grid {
                let points = region_boundary_scan(*lo, *hi, &grid.points(), scan)
                    .map_err(domain)?;
                report["scan"] = json!({
                    "config": to_value(scan),
                    "points": to_value(&points),
                });
            }
            report
        }
        Command::Scan {
            kernel,
            scan,
            constrained,
        } => match constrained {
            Some((alpha0, tau)) => {
                let r = constrained_inf_search(*kernel, *alpha0, *tau, scan)
                    .map_err(domain)?;
                let mut v = to_value(&r);
                v["alpha0"] = json!(alpha0);
                v["tau"] = json!(tau);
                v
            }
            None => to_value(&sign_change_search(*kernel, scan).map_err(domain)?),
        },
        Command::MeasureGen { gen } => {
            let mu = generate(gen)?;
            return Ok(Output::Measure {
                csv: mu.to_csv_text(),
                summary: measure_summary(&gen.to_string(), &mu),
            });
        }
        Command::OpNorm { measure, eps, t } => {
            let mu = load_measure(measure)?;
            let trunc = Truncation::new(*eps).map_err(domain)?;
            let mut report = json!({
                "measure": measure_summary(&measure.to_string(), &mu),
                "epsilon": eps,
                "norm_k1": t1_norm_sq(KernelSpec::kappa(1).map_err(domain)?, &mu, trunc).sqrt(),
                "norm_k2": t1_norm_sq(KernelSpec::kappa(2).map_err(domain)?, &mu, trunc).sqrt(),
            });
            if let Some(t) = t {
                report["chain"] = to_value(&norm_chain(&mu, trunc, *t).map_err(domain)?);
            }
            report
        }
        Command::MvCheck {
            measure,
            kernel,
            eps,
        } => {
            let mu = load_measure(measure)?;
            let trunc = Truncation::new(*eps).map_err(domain)?;
            let r = mv_residual(*kernel, &mu, trunc).map_err(domain)?;
            json!({
                "measure": measure_summary(&measure.to_string(), &mu),
                "kernel": kernel.to_string(),
                "report": to_value(&r),
            })
        }
        Command::Beta {
            measure,
            eps,
            j_min,
            j_max,
            eta1,
            seed,
        } => {
            let mu = load_measure(measure)?;
            let lat = build_lattice(&mu, *j_min, *j_max, *seed).map_err(domain)?;
            let classified = classify_cubes(&lat, *eps, *eta1);
            let mut rows = Vec::with_capacity(classified.len());
            let mut bad_count = 0usize;
            for c in &classified {
                let cube = &lat.cubes()[c.index];
                let beta2 = beta_cube(&lat, cube, BetaNorm::Two, *eta1)
                    .map_err(domain)?
                    .value;
                if c.bad {
                    bad_count += 1;
                }
                rows.push(json!({
                    "j": cube.j,
                    "jx": cube.jx,
                    "jy": cube.jy,
                    "mass": cube.mass,
                    "beta1": c.beta1,
                    "beta2": beta2,
                    "bad": c.bad,
                }));
            }
            json!({
                "measure": measure_summary(&measure.to_string(), &mu),
                "lattice": lattice_meta(&lat),
                "eps": eps,
                "eta1": eta1,
                "bad_count": bad_count,
                "cubes": rows,
            })
        }
        Command::Packing {
            measure,
            eps,
            j_min,
            j_max,
            eta1,
            seed,
        } => {
            let mu = load_measure(measure)?;
            let lat = build_lattice(&mu, *j_min, *j_max, *seed).map_err(domain)?;
            let classified = classify_cubes(&lat, *eps, *eta1);
            let bad: Vec<_> = classified
                .iter()
                .filter(|c| c.bad)
                .map(|c| lat.cubes()[c.index].clone())
                .collect();
            let mut roots = Vec::new();
            for root in lat.generation(*j_min) {
                let ratio = packing_ratio(&bad, root).map_err(domain)?;
                roots.push(json!({
                    "j": root.j,
                    "jx": root.jx,
                    "jy": root.jy,
                    "mass": root.mass,
                    "ratio": ratio,
                }));
            }
            json!({
                "measure": measure_summary(&measure.to_string(), &mu),
                "lattice": lattice_meta(&lat),
                "eps": eps,
                "eta1": eta1,
                "bad_count": bad.len(),
                "roots": roots,
            })
        }
        Command::RatioSearch { lo, hi, scan } => {
            to_value(&ratio_sup_search(*lo, *hi, scan).map_err(domain)?)
        }
    };
    Ok(Output::Report(report))
}

fn lattice_meta(lat: &curvkit::DyadicLattice) -> Value {
    let (j_min, j_max) = lat.j_range();
    json!({
        "j_min": j_min,
        "j_max": j_max,
        "seed": lat.seed(),
        "offset": [lat.offset().re, lat.offset().im],
        "scale": lat.scale(),
        "cube_count": lat.cubes().len(),
    })
}
