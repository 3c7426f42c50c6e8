//! Epsilon-truncated convolution operators on discrete measures, their
//! `L^2` norms, triple permutation sums, and the exact algebraic residual
//! identity connecting the two.
//!
//! All truncations are closed (`|z - zeta| >= epsilon` is kept), which
//! makes the discrete expansion of the squared norm an exact identity:
//! once `epsilon` is below the minimum atom gap, the residual equals the
//! pairwise diagonal sum with no analysis in between.

use crate::geometry::{PlanePoint, Triple};
use crate::kernels::KernelSpec;
use crate::measures::DiscreteMeasure;
use crate::parallel::{pairwise_sum, pairwise_sum_points};
use crate::permutations::{cauchy_permutation, permutation};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum OperatorError {
    #[error("truncation radius must be positive and finite")]
    BadEpsilon,
    #[error("triple sum over {count} atoms exceeds the cap of {cap}; use the forced variant")]
    TooManyAtoms { count: usize, cap: usize },
    #[error("norm chain needs |t| > sqrt(2), got t={t}")]
    BadT { t: f64 },
}

/// Cap on atom count for the cubic-cost triple sums; the forced variants
/// skip it.
pub const TRIPLE_SUM_CAP: usize = 2000;

/// A positive truncation radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Truncation {
    epsilon: f64,
}

impl Truncation {
    pub fn new(epsilon: f64) -> Result<Self, OperatorError> {
        // Negated so NaN is rejected along with nonpositive values.
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(OperatorError::BadEpsilon);
        }
        Ok(Truncation { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// The truncated transform at `z`: the sum of `K(z - zeta) w(zeta)` over
/// atoms with `|zeta - z| >= epsilon`.
///
/// Real kernels return a point with zero imaginary part; the complex
/// reciprocal kernel fills both components. When `z` is itself an atom it
/// is excluded automatically (distance `0 < epsilon`). An empty admissible
/// set sums to zero.
pub fn truncated_transform(
    spec: KernelSpec,
    mu: &DiscreteMeasure,
    z: PlanePoint,
    eps: Truncation,
) -> PlanePoint {
    let mut terms = Vec::with_capacity(mu.len());
    for (zeta, w) in mu.points().iter().zip(mu.weights()) {
        if z.dist(*zeta) < eps.epsilon() {
            continue;
        }
        let diff = z - *zeta;
        let term = if spec.is_real() {
            PlanePoint::new(spec.eval_real(diff).expect("separated atoms") * w, 0.0)
        } else {
            crate::kernels::eval_cauchy(diff).expect("separated atoms") * *w
        };
        terms.push(term);
    }
    pairwise_sum_points(&terms)
}

/// `sum_z w(z) |T(z)|^2` over the atoms of the measure: the squared
/// `L^2(mu)` norm of the truncated transform of the constant density 1.
pub fn t1_norm_sq(spec: KernelSpec, mu: &DiscreteMeasure, eps: Truncation) -> f64 {
    let contributions: Vec<f64> = (0..mu.len())
        .into_par_iter()
        .map(|i| {
            let value = truncated_transform(spec, mu, mu.point(i), eps);
            mu.weight(i) * value.norm_sq()
        })
        .collect();
    pairwise_sum(&contributions)
}

fn admissible(mu: &DiscreteMeasure, i: usize, j: usize, eps: f64) -> bool {
    mu.point(i).dist(mu.point(j)) >= eps
}

fn triple_sum_impl(
    spec: KernelSpec,
    mu: &DiscreteMeasure,
    eps: Truncation,
) -> f64 {
    let eps = eps.epsilon();
    // Outer parallel loop over the smallest index; each worker folds its
    // (j, k) pairs in a fixed order so the final tree reduction is
    // independent of the thread count.
    let partials: Vec<f64> = (0..mu.len())
        .into_par_iter()
        .map(|i| {
            let mut local = 0.0;
            for j in i + 1..mu.len() {
                if !admissible(mu, i, j, eps) {
                    continue;
                }
                for k in j + 1..mu.len() {
                    if !admissible(mu, i, k, eps) || !admissible(mu, j, k, eps) {
                        continue;
                    }
                    let t = Triple::new(mu.point(i), mu.point(j), mu.point(k))
                        .expect("distinct separated atoms");
                    let value = if spec.is_real() {
                        permutation(spec, &t).expect("real kernel")
                    } else {
                        cauchy_permutation(&t)
                    };
                    local += value * mu.weight(i) * mu.weight(j) * mu.weight(k);
                }
            }
            local
        })
        .collect();
    // One unordered triple stands for 6 ordered ones.
    6.0 * pairwise_sum(&partials)
}

/// The triple permutation functional of the measure: the sum over ordered
/// atom triples with pairwise distances `>= epsilon` of the kernel
/// permutation (squared curvature for the complex reciprocal kernel) times
/// the weight product. Capped at [`TRIPLE_SUM_CAP`] atoms.
pub fn truncated_permutation_sum(
    spec: KernelSpec,
    mu: &DiscreteMeasure,
    eps: Truncation,
) -> Result<f64, OperatorError> {
    if mu.len() > TRIPLE_SUM_CAP {
        return Err(OperatorError::TooManyAtoms {
            count: mu.len(),
            cap: TRIPLE_SUM_CAP,
        });
    }
    Ok(triple_sum_impl(spec, mu, eps))
}

/// [`truncated_permutation_sum`] without the atom-count guardrail.
pub fn truncated_permutation_sum_forced(
    spec: KernelSpec,
    mu: &DiscreteMeasure,
    eps: Truncation,
) -> f64 {
    triple_sum_impl(spec, mu, eps)
}

/// Decomposition of the squared transform norm into the triple term and
/// the residual, with the exact pairwise diagonal for comparison.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MvReport {
    /// `||T 1||^2` over the measure.
    pub lhs: f64,
    /// `(1/3)` of the permutation sum for real kernels, `(1/6)` of the
    /// curvature sum for the complex reciprocal kernel.
    pub triple_term: f64,
    /// `lhs - triple_term`, by definition.
    pub residual: f64,
    /// `sum over ordered pairs (x, y), |x-y| >= eps of K(x-y)^2 w(x) w(y)^2`
    /// (squared modulus for the complex kernel). Equals the residual
    /// exactly when every pair is admissible.
    pub diagonal_oracle: f64,
    /// `size^2 * max_x [w(x) * sum_y K(x-y)^2 w(y)]`. When every pair is
    /// admissible (so the residual is the diagonal) and the kernel's size
    /// constant is at least one (kappa, Cauchy), this dominates
    /// `|residual| / mass`; for clipped truncations or small-size
    /// combinations it is a diagnostic, not a certified bound.
    pub bound_constant: f64,
    pub mass: f64,
}

fn kernel_sq(spec: KernelSpec, diff: PlanePoint) -> f64 {
    if spec.is_real() {
        let v = spec.eval_real(diff).expect("separated atoms");
        v * v
    } else {
        crate::kernels::eval_cauchy(diff).expect("separated atoms").norm_sq()
    }
}

/// Assembles the norm/permutation decomposition for one kernel and
/// truncation. Respects the triple-sum cap.
pub fn mv_residual(
    spec: KernelSpec,
    mu: &DiscreteMeasure,
    eps: Truncation,
) -> Result<MvReport, OperatorError> {
    let lhs = t1_norm_sq(spec, mu, eps);
    let p_sum = truncated_permutation_sum(spec, mu, eps)?;
    let triple_term = if spec.is_real() { p_sum / 3.0 } else { p_sum / 6.0 };
    let residual = lhs - triple_term;

    let pair_rows: Vec<(f64, f64)> = (0..mu.len())
        .into_par_iter()
        .map(|x| {
            let mut diag_row = Vec::with_capacity(mu.len());
            let mut weighted_row = 0.0;
            for y in 0..mu.len() {
                if y == x || !admissible(mu, x, y, eps.epsilon()) {
                    continue;
                }
                let ksq = kernel_sq(spec, mu.point(x) - mu.point(y));
                diag_row.push(ksq * mu.weight(x) * mu.weight(y) * mu.weight(y));
                weighted_row += ksq * mu.weight(y);
            }
            (pairwise_sum(&diag_row), mu.weight(x) * weighted_row)
        })
        .collect();
    let diag_terms: Vec<f64> = pair_rows.iter().map(|r| r.0).collect();
    let diagonal_oracle = pairwise_sum(&diag_terms);
    let size = crate::kernels::size_constant(spec);
    let bound_constant = size
        * size
        * pair_rows
            .iter()
            .map(|r| r.1)
            .fold(0.0f64, f64::max);

    Ok(MvReport {
        lhs,
        triple_term,
        residual,
        diagonal_oracle,
        bound_constant,
        mass: mu.total_mass(),
    })
}

/// Both norm inequalities relating the first two kernel orders and their
/// combination, with the explicitly computed residual constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormChainReport {
    pub epsilon: f64,
    pub t: f64,
    pub norm_k1: f64,
    pub norm_k2: f64,
    pub norm_kt: f64,
    /// `sqrt(|residual(order 2)| + 2 |residual(order 1)|)`.
    pub constant: f64,
    /// `sqrt(2) norm_k1 + constant - norm_k2`; nonnegative when the
    /// order-comparison inequality holds.
    pub comparison_slack: f64,
    /// `(norm_kt + constant)/(|t| - sqrt(2)) - norm_k1`; nonnegative when
    /// the rearranged combination bound holds.
    pub chain_slack: f64,
}

/// Evaluates the norm comparison chain on one measure: the order-2 norm
/// against the order-1 norm, and the order-1 norm against the combined
/// kernel norm, both with the explicit residual-based constant. The second
/// bound only exists for `|t| > sqrt(2)`.
pub fn norm_chain(
    mu: &DiscreteMeasure,
    eps: Truncation,
    t: f64,
) -> Result<NormChainReport, OperatorError> {
    // Negated so NaN is rejected along with in-range weights.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(t.abs() > std::f64::consts::SQRT_2) {
        return Err(OperatorError::BadT { t });
    }
    let k1 = KernelSpec::kappa(1).expect("static order");
    let k2 = KernelSpec::kappa(2).expect("static order");
    let kt = KernelSpec::combo(1, 2, t).expect("validated t");
    let mv1 = mv_residual(k1, mu, eps)?;
    let mv2 = mv_residual(k2, mu, eps)?;
    let norm_k1 = mv1.lhs.sqrt();
    let norm_k2 = mv2.lhs.sqrt();
    let norm_kt = t1_norm_sq(kt, mu, eps).sqrt();
    let constant = (mv2.residual.abs() + 2.0 * mv1.residual.abs()).sqrt();
    let comparison_slack = std::f64::consts::SQRT_2 * norm_k1 + constant - norm_k2;
    let chain_slack = (norm_kt + constant) / (t.abs() - std::f64::consts::SQRT_2) - norm_k1;
    Ok(NormChainReport {
        epsilon: eps.epsilon(),
        t,
        norm_k1,
        norm_k2,
        norm_kt,
        constant,
        comparison_slack,
        chain_slack,
    })
}
