//! Randomized searches over triangle space: extremal permutation values,
//! minimum scans along a grid of combination weights, ratio suprema, and
//! constrained infima over well-shaped triangles.
//!
//! Sampling is blocked and seeded so results are bitwise identical for a
//! given configuration regardless of the rayon thread count: each block of
//! triples is generated sequentially from its own stream, evaluated in
//! parallel in order, and folded sequentially with strict first-wins
//! comparisons.

use crate::geometry::Triple;
use crate::kernels::{KernelError, KernelSpec};
use crate::permutations::{
    cauchy_permutation, constrained_ratio, omega_big_region, permutation, ConstrainedOutcome,
    PermError,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("scan requested zero samples")]
    ZeroSamples,
    #[error("no admissible samples found under the requested filters")]
    NoAdmissibleSamples,
    #[error(transparent)]
    Perm(#[from] PermError),
}

impl From<KernelError> for ScanError {
    fn from(e: KernelError) -> ScanError {
        ScanError::Perm(PermError::Kernel(e))
    }
}

/// How triangle vertices are drawn. Every sampler pins the first vertex at
/// the origin (values of interest are translation invariant) and redraws
/// any triple whose smallest gap is below `1e-3` of its diameter, so
/// near-degenerate spikes cannot dominate a scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Sampler {
    /// Two free vertices uniform in `[-1, 1]^2`.
    UniformBox,
    /// Symmetric tent configurations `(0, -g + i, g + i)` with `g`
    /// log-uniform in `[0.1, 1000)`; walks the family along which ratio
    /// suprema and combined-kernel sign changes are attained.
    GammaFamily,
    /// Uniform box with both free vertices' heights compressed by a common
    /// factor `10^-u`, `u` uniform in `[0, 3)`; probes nearly flat shapes.
    Anisotropic,
}

impl std::fmt::Display for Sampler {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Sampler::UniformBox => "uniform",
            Sampler::GammaFamily => "gamma",
            Sampler::Anisotropic => "aniso",
        })
    }
}

impl FromStr for Sampler {
    type Err = String;

    fn from_str(s: &str) -> Result<Sampler, String> {
        match s {
            "uniform" => Ok(Sampler::UniformBox),
            "gamma" => Ok(Sampler::GammaFamily),
            "aniso" => Ok(Sampler::Anisotropic),
            other => Err(format!(
                "unknown sampler '{other}'; expected uniform, gamma, or aniso"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanConfig {
    pub sampler: Sampler,
    pub samples: u64,
    pub seed: u64,
    /// Maximum coordinate-descent rounds applied to each reported extremum.
    pub refine_steps: u32,
    /// Scale permutation values by `diam^2` so reports are dilation
    /// invariant. Ratio and constrained searches are already scale free
    /// and ignore this flag.
    pub normalize: bool,
}

/// Extremes of one scanned functional with the triangles attaining them.
#[derive(Debug, Clone, Serialize)]
pub struct ScanReport {
    pub kernel: String,
    pub config: ScanConfig,
    pub min_value: f64,
    pub argmin: Triple,
    pub max_value: f64,
    pub argmax: Triple,
    /// Number of admissible values that entered the extremum fold.
    pub evaluations: u64,
}

/// Minimum scan result at one combination weight.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RegionScanPoint {
    pub t: f64,
    pub min_value: f64,
    /// Whether this weight lies in the closed region where the permutation
    /// is pointwise nonnegative.
    pub member: bool,
}

const BLOCK: usize = 8192;
const MIN_GAP_FRACTION: f64 = 1e-3;
const RATIO_DENOMINATOR_FLOOR: f64 = 1e-14;
const RATIO_REFINE_FLOOR: f64 = 1e-6;
const REFINE_STEP_FLOOR: f64 = 1e-12;

fn block_rng(seed: u64, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(block.wrapping_add(1));
    rng
}

fn draw_triple(sampler: Sampler, rng: &mut ChaCha8Rng) -> Triple {
    for _ in 0..1_000_000 {
        let candidate = match sampler {
            Sampler::UniformBox => Triple::from_coords([
                0.0,
                0.0,
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
                rng.gen_range(-1.0..=1.0),
            ]),
            Sampler::GammaFamily => {
                let gamma = 10f64.powf(rng.gen_range(-1.0..3.0));
                Triple::from_coords([0.0, 0.0, -gamma, 1.0, gamma, 1.0])
            }
            Sampler::Anisotropic => {
                let squeeze = 10f64.powf(-rng.gen_range(0.0..3.0));
                Triple::from_coords([
                    0.0,
                    0.0,
                    rng.gen_range(-1.0..=1.0),
                    squeeze * rng.gen_range(-1.0..=1.0),
                    rng.gen_range(-1.0..=1.0),
                    squeeze * rng.gen_range(-1.0..=1.0),
                ])
            }
        };
        if let Ok(t) = candidate {
            if t.min_gap() >= MIN_GAP_FRACTION * t.diameter() {
                return t;
            }
        }
    }
    unreachable!("separated triples have overwhelming draw probability")
}

#[derive(Clone, Copy)]
struct Extremum {
    value: f64,
    arg: Triple,
}

/// Draws exactly `config.samples` triples; inadmissible evaluations
/// (`None`) are skipped.
fn scan_extrema<F>(config: &ScanConfig, eval: &F) -> Result<(Extremum, Extremum, u64), ScanError>
where
    F: Fn(&Triple) -> Option<f64> + Sync,
{
    scan_blocks(config, eval, config.samples, false)
}

/// Draws until `config.samples` admissible evaluations are collected, up
/// to a thousandfold draw budget.
fn scan_admissible<F>(config: &ScanConfig, eval: &F) -> Result<(Extremum, Extremum, u64), ScanError>
where
    F: Fn(&Triple) -> Option<f64> + Sync,
{
    scan_blocks(config, eval, config.samples.saturating_mul(1000), true)
}

fn scan_blocks<F>(
    config: &ScanConfig,
    eval: &F,
    draw_budget: u64,
    stop_at_admissible_target: bool,
) -> Result<(Extremum, Extremum, u64), ScanError>
where
    F: Fn(&Triple) -> Option<f64> + Sync,
{
    if config.samples == 0 {
        return Err(ScanError::ZeroSamples);
    }
    let mut min: Option<Extremum> = None;
    let mut max: Option<Extremum> = None;
    let mut admitted = 0u64;
    let mut drawn = 0u64;
    let mut block = 0u64;
    'outer: while drawn < draw_budget {
        let count = BLOCK.min((draw_budget - drawn) as usize);
        let mut rng = block_rng(config.seed, block);
        let triples: Vec<Triple> = (0..count)
            .map(|_| draw_triple(config.sampler, &mut rng))
            .collect();
        let values: Vec<Option<f64>> = triples.par_iter().map(eval).collect();
        for (t, v) in triples.iter().zip(values) {
            let Some(v) = v else { continue };
            admitted += 1;
            if min.as_ref().is_none_or(|m| v < m.value) {
                min = Some(Extremum { value: v, arg: *t });
            }
            if max.as_ref().is_none_or(|m| v > m.value) {
                max = Some(Extremum { value: v, arg: *t });
            }
            if stop_at_admissible_target && admitted == config.samples {
                break 'outer;
            }
        }
        drawn += count as u64;
        block += 1;
    }
    match (min, max) {
        (Some(lo), Some(hi)) => Ok((lo, hi, admitted)),
        _ => Err(ScanError::NoAdmissibleSamples),
    }
}

/// Monotone coordinate descent on the four free coordinates (the first
/// vertex stays pinned). Steps that leave the admissible set, that produce
/// an invalid triangle, or that fail the separation floor are rejected;
/// the step is halved after any round with no accepted move.
fn refine<F>(start: Extremum, steps: u32, minimize: bool, eval: &F) -> Extremum
where
    F: Fn(&Triple) -> Option<f64>,
{
    let mut best = start;
    let mut h = 0.05 * best.arg.diameter().max(1e-6);
    let mut rounds = 0;
    while rounds < steps && h > REFINE_STEP_FLOOR {
        rounds += 1;
        let mut improved = false;
        for k in 0..4 {
            for sign in [1.0f64, -1.0] {
                let [a, b, c] = best.arg.points();
                let mut cs = [b.re, b.im, c.re, c.im];
                cs[k] += sign * h;
                let Ok(t) = Triple::from_coords([a.re, a.im, cs[0], cs[1], cs[2], cs[3]]) else {
                    continue;
                };
                if t.min_gap() < MIN_GAP_FRACTION * t.diameter() {
                    continue;
                }
                let Some(v) = eval(&t) else { continue };
                if if minimize { v < best.value } else { v > best.value } {
                    best = Extremum { value: v, arg: t };
                    improved = true;
                }
            }
        }
        if !improved {
            h /= 2.0;
        }
    }
    best
}

fn raw_value(spec: KernelSpec, t: &Triple) -> f64 {
    if spec.is_real() {
        permutation(spec, t).expect("real kernels evaluate on every valid triple")
    } else {
        cauchy_permutation(t)
    }
}

fn report(
    kernel: String,
    config: &ScanConfig,
    min: Extremum,
    max: Extremum,
    evaluations: u64,
) -> ScanReport {
    ScanReport {
        kernel,
        config: *config,
        min_value: min.value,
        argmin: min.arg,
        max_value: max.value,
        argmax: max.arg,
        evaluations,
    }
}

/// Scans for the extremes of the permutation sum of `spec`; a report with
/// `min_value < 0 < max_value` certifies a sign change. Honors
/// `config.normalize`.
pub fn sign_change_search(spec: KernelSpec, config: &ScanConfig) -> Result<ScanReport, ScanError> {
    let eval = move |t: &Triple| {
        let v = raw_value(spec, t);
        Some(if config.normalize {
            v * t.diameter() * t.diameter()
        } else {
            v
        })
    };
    let (min, max, evaluations) = scan_extrema(config, &eval)?;
    let min = refine(min, config.refine_steps, true, &eval);
    let max = refine(max, config.refine_steps, false, &eval);
    Ok(report(spec.to_string(), config, min, max, evaluations))
}

/// Evenly spaced grid `start + k * step` covering `[start, end]`.
pub fn grid(start: f64, end: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0 && start.is_finite() && end.is_finite() && start <= end);
    let count = ((end - start) / step).round() as i64;
    (0..=count).map(|k| start + k as f64 * step).collect()
}

/// Runs a minimum scan of the combined kernel at every weight in `ts` and
/// tags each weight with membership in the nonnegativity region. The same
/// sample stream is reused for every weight.
pub fn region_boundary_scan(
    lo: u32,
    hi: u32,
    ts: &[f64],
    config: &ScanConfig,
) -> Result<Vec<RegionScanPoint>, ScanError> {
    let region = omega_big_region(lo, hi)?;
    let mut out = Vec::with_capacity(ts.len());
    for &t in ts {
        let spec = KernelSpec::combo(lo, hi, t)?;
        let scan = sign_change_search(spec, config)?;
        out.push(RegionScanPoint {
            t,
            min_value: scan.min_value,
            member: region.contains(t),
        });
    }
    Ok(out)
}

/// Searches for the extremes of the ratio of two power-kernel permutation
/// sums. Samples whose normalized denominator is below `1e-14` are
/// skipped; refinement steps require it to stay above `1e-6`, since both
/// sums vanish toward the supremum and an unguarded ascent would chase
/// cancellation noise past the true bound. The ratio is scale free, so
/// `config.normalize` is ignored.
pub fn ratio_sup_search(lo: u32, hi: u32, config: &ScanConfig) -> Result<ScanReport, ScanError> {
    if lo < 1 || lo > hi {
        return Err(PermError::BadPair { lo, hi }.into());
    }
    let num = KernelSpec::kappa(hi)?;
    let den = KernelSpec::kappa(lo)?;
    let eval_with_floor = move |t: &Triple, floor: f64| {
        let d2 = t.diameter() * t.diameter();
        let p_lo = raw_value(den, t);
        if (p_lo * d2).abs() < floor {
            return None;
        }
        Some(raw_value(num, t) / p_lo)
    };
    let sample_eval = move |t: &Triple| eval_with_floor(t, RATIO_DENOMINATOR_FLOOR);
    let refine_eval = move |t: &Triple| eval_with_floor(t, RATIO_REFINE_FLOOR);
    let (min, max, evaluations) = scan_extrema(config, &sample_eval)?;
    let min = refine(min, config.refine_steps, true, &refine_eval);
    let max = refine(max, config.refine_steps, false, &refine_eval);
    Ok(report(
        format!("ratio({num},{den})"),
        config,
        min,
        max,
        evaluations,
    ))
}

/// Searches for the infimum of `permutation / curvature^2` over triangles
/// passing the comparability and vertical-angle filters. Draws until
/// `config.samples` admissible triangles are found (or a thousandfold
/// budget runs out; finding none at all is an error). The ratio is scale
/// free, so `config.normalize` is ignored.
pub fn constrained_inf_search(
    spec: KernelSpec,
    alpha0: f64,
    tau: f64,
    config: &ScanConfig,
) -> Result<ScanReport, ScanError> {
    if !spec.is_real() {
        return Err(KernelError::WrongVariant.into());
    }
    let eval = move |t: &Triple| match constrained_ratio(spec, t, alpha0, tau) {
        Ok(ConstrainedOutcome::Value(v)) => Some(v),
        _ => None,
    };
    let (min, max, evaluations) = scan_admissible(config, &eval)?;
    let min = refine(min, config.refine_steps, true, &eval);
    let max = refine(max, config.refine_steps, false, &eval);
    Ok(report(spec.to_string(), config, min, max, evaluations))
}
