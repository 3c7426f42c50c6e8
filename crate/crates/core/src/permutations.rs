//! Permutation products of antisymmetric kernels over point triples, their
//! closed representation, the sharp two-sided comparisons between the first
//! two kernel orders, and the parameter regions where the combined kernel
//! keeps or loses a sign.
//!
//! Everything is evaluated on canonically ordered points (sorted by
//! coordinates), which makes the results exactly invariant under relabeling
//! of the triple. Gap quantities are computed through cancellation-free
//! algebraic routes certified by the exact-rational twins in [`crate::exact`].

use crate::geometry::{
    delta_conditions, in_comparable_class, menger_curvature, GeomError, PlanePoint, Triple,
};
use crate::kernels::{KernelError, KernelSpec};
use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum PermError {
    #[error(transparent)]
    Geometry(#[from] GeomError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("order pair lo={lo}, hi={hi} outside the admissible range")]
    BadPair { lo: u32, hi: u32 },
}

/// Result of a filtered permutation-to-curvature comparison: either the
/// ratio itself or the reason the configuration was screened out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum ConstrainedOutcome {
    Value(f64),
    Rejected(RejectReason),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum RejectReason {
    /// Side lengths not comparable within the requested factor.
    Comparability,
    /// Vertical-angle sum below the lower threshold.
    AngleSumLow,
    /// Vertical-angle sum above the upper threshold.
    AngleSumHigh,
    /// Collinear input slipped through the angle filters.
    DegenerateCurvature,
}

/// The permutation product of a real kernel over a triple:
///
/// ```text
/// p_K = K(z1-z2)K(z1-z3) + K(z2-z1)K(z2-z3) + K(z3-z1)K(z3-z2)
/// ```
///
/// Fully symmetric in the three points; evaluated on canonical point order
/// so relabelings give bitwise-identical results. Errors on the complex
/// reciprocal kernel, whose analog is [`cauchy_permutation`].
pub fn permutation(spec: KernelSpec, t: &Triple) -> Result<f64, PermError> {
    let [p0, p1, p2] = t.canonical_points();
    let u = p1 - p0;
    let v = p2 - p0;
    let ku = spec.eval_real(u)?;
    let kv = spec.eval_real(v)?;
    let kuv = spec.eval_real(u - v)?;
    // Apexes 0, u, v with the kernel's exact antisymmetry folded in:
    // K(-u)K(-v) + K(u)K(u-v) + K(v)K(v-u).
    Ok(ku * kv + ku * kuv - kv * kuv)
}

/// The six-term symmetric sum `sum 1/((z_b - z_a) conj(z_c - z_a))` over all
/// orderings `(a, b, c)` of the triple.
///
/// Equals the squared inverse circumradius of the three points. The sum is
/// accumulated in an order that pairs each permutation with its swap, whose
/// terms are bitwise complex conjugates, so the imaginary part cancels
/// exactly and only rounding-free real content remains.
pub fn cauchy_permutation(t: &Triple) -> f64 {
    let z = t.canonical_points();
    let mut acc = PlanePoint::ZERO;
    for a in 0..3 {
        let u = z[(a + 1) % 3] - z[a];
        let v = z[(a + 2) % 3] - z[a];
        let term = u.cmul(v.conj()).cinv();
        acc = acc + term;
        acc = acc + v.cmul(u.conj()).cinv();
        debug_assert_eq!(term.conj(), v.cmul(u.conj()).cinv());
    }
    let diam = t.diameter();
    debug_assert!(acc.im.abs() <= 1e-10 / (diam * diam));
    acc.re
}

fn binom_f64(n: u32, k: u32) -> f64 {
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// The k-th nonnegative building block of the closed representation, for
/// `u = (x, y)` and `v = (a, b)`:
///
/// ```text
/// h_k = (a x)^(2k-1) (y-b)^(2k) + (x(x-a))^(2k-1) b^(2k) + (a(a-x))^(2k-1) y^(2k)
/// ```
pub fn h_term(k: u32, u: PlanePoint, v: PlanePoint) -> f64 {
    assert!(k >= 1, "h_term requires k >= 1");
    let (x, y) = (u.re, u.im);
    let (a, b) = (v.re, v.im);
    let e = (2 * k - 1) as i32;
    let f = (2 * k) as i32;
    (a * x).powi(e) * (y - b).powi(f)
        + (x * (x - a)).powi(e) * b.powi(f)
        + (a * (a - x)).powi(e) * y.powi(f)
}

/// Closed representation of the odd-kernel permutation at `(0, u, v)`:
///
/// ```text
/// sum_{k=1..m} C(m,k) (a x (x-a))^(2(m-k)) h_k(u,v) / (|u|^2 |v|^2 |u-v|^2)^m
/// ```
pub fn representation_value(m: u32, u: PlanePoint, v: PlanePoint) -> Result<f64, PermError> {
    assert!(m >= 1, "representation_value requires m >= 1");
    let t = Triple::new(PlanePoint::ZERO, u, v)?;
    let _ = t;
    let (x, _y) = (u.re, u.im);
    let (a, _b) = (v.re, v.im);
    let w = u.norm_sq() * v.norm_sq() * (u - v).norm_sq();
    let p = a * x * (x - a);
    let mut acc = 0.0;
    for k in 1..=m {
        acc += binom_f64(m, k) * p.powi(2 * (m - k) as i32) * h_term(k, u, v);
    }
    Ok(acc / w.powi(m as i32))
}

fn origin_form(t: &Triple) -> (PlanePoint, PlanePoint) {
    let [p0, p1, p2] = t.canonical_points();
    (p1 - p0, p2 - p0)
}

/// `2 p_{order 1} - p_{order 2}`, evaluated through the identity
/// `(2 S h_1 - h_2) / W^2` with the cancellation-free
/// `S = x^2 a^2 (y-b)^2 + (x^2 b^2 + a^2 y^2 + b^2 y^2)(|u-v|^2)`.
///
/// The identity (certified exactly in the rational twin module) keeps the
/// intrinsic smallness of the gap explicit instead of forming it as a
/// difference of two much larger permutation values, so the nonnegativity
/// contract survives extreme aspect ratios.
pub fn sharp_upper_gap(t: &Triple) -> f64 {
    let (u, v) = origin_form(t);
    let (x, y) = (u.re, u.im);
    let (a, b) = (v.re, v.im);
    let w = u.norm_sq() * v.norm_sq() * (u - v).norm_sq();
    let s = x * x * a * a * (y - b) * (y - b)
        + (x * x * b * b + a * a * y * y + b * b * y * y) * (u - v).norm_sq();
    (2.0 * s * h_term(1, u, v) - h_term(2, u, v)) / (w * w)
}

/// `p_{order 2} - 2 M^2 p_{order 1}` where `M` is the product over the
/// sides of `Re(side)/|side|`; equals `h_2 / W^2` exactly, which is how it
/// is evaluated (the difference form would lose the sign to cancellation on
/// flat triples).
pub fn sharp_lower_gap(t: &Triple) -> f64 {
    let (u, v) = origin_form(t);
    let w = u.norm_sq() * v.norm_sq() * (u - v).norm_sq();
    h_term(2, u, v) / (w * w)
}

/// Permutation value of the odd kernel of order `m` on the one-parameter
/// family `(0, -gamma + i, gamma + i)`:
///
/// ```text
/// gamma^(2m-2) ((gamma^2+1)^m - gamma^(2m)) / (gamma^2+1)^(2m)
/// ```
///
/// computed in the stable form `gamma^-2 x^m (1 - x^m)` with
/// `x = gamma^2/(gamma^2+1)`.
pub fn gamma_family_value(m: u32, gamma: f64) -> f64 {
    assert!(m >= 1 && gamma > 0.0);
    let g2 = gamma * gamma;
    let x = g2 / (g2 + 1.0);
    let xm = x.powi(m as i32);
    xm * (1.0 - xm) / g2
}

/// Ratio `gamma_family_value(hi, gamma) / gamma_family_value(lo, gamma)`.
///
/// Tends to `hi/lo` as `gamma` grows; the sampled suprema of the order
/// ratio approach it through this family.
pub fn gamma_family_ratio(lo: u32, hi: u32, gamma: f64) -> f64 {
    assert!(lo >= 1 && lo <= hi && gamma > 0.0);
    gamma_family_value(hi, gamma) / gamma_family_value(lo, gamma)
}

/// The open interval of `t` where the combined kernel of orders `(lo, hi)`
/// provably changes sign: `(-hi/lo, 0)`.
pub fn omega_region(lo: u32, hi: u32) -> Result<(f64, f64), PermError> {
    if lo < 1 || lo > hi {
        return Err(PermError::BadPair { lo, hi });
    }
    Ok((-(hi as f64) / lo as f64, 0.0))
}

/// The `t`-set where the combined kernel of orders `(lo, hi)` keeps
/// nonnegative permutations: `{0}` together with the complement of an open
/// interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TRegion {
    pub lo_order: u32,
    pub hi_order: u32,
    /// Open excluded interval `(excluded_lo, excluded_hi)`.
    pub excluded_lo: f64,
    pub excluded_hi: f64,
    /// `t = 0` is always re-admitted, even inside the excluded interval.
    pub includes_zero: bool,
    /// The shape constant of the wide-ratio branch; present iff `hi >= 2 lo`.
    pub sigma: Option<f64>,
}

impl TRegion {
    pub fn contains(&self, t: f64) -> bool {
        (self.includes_zero && t == 0.0) || t <= self.excluded_lo || t >= self.excluded_hi
    }
}

/// Region of guaranteed nonnegativity for the order pair `(lo, hi)`.
///
/// Branches: for `lo < hi <= 2 lo` the excluded interval is
/// `(-(3 + sqrt(9 - 4 hi/lo))/2, 2 - hi/lo)`; for `hi >= 2 lo` it is
/// `(-(sigma + sqrt(sigma^2 - 4 hi/lo))/2, sigma - 3)` with
/// `sigma = 3 + (hi/lo - 2) sqrt(hi - 2 lo)`. At `hi = 2 lo` both branches
/// agree (`sigma = 3`, interval `(-2, 0)`). Equal orders have no branch and
/// are rejected.
pub fn omega_big_region(lo: u32, hi: u32) -> Result<TRegion, PermError> {
    if lo < 1 || lo >= hi {
        return Err(PermError::BadPair { lo, hi });
    }
    let ratio = hi as f64 / lo as f64;
    let (excluded_lo, excluded_hi, sigma) = if hi <= 2 * lo {
        let lo_end = -(3.0 + (9.0 - 4.0 * ratio).sqrt()) / 2.0;
        let sigma = (hi == 2 * lo).then_some(3.0);
        (lo_end, 2.0 - ratio, sigma)
    } else {
        let sigma = 3.0 + (ratio - 2.0) * ((hi - 2 * lo) as f64).sqrt();
        let lo_end = -(sigma + (sigma * sigma - 4.0 * ratio).sqrt()) / 2.0;
        (lo_end, sigma - 3.0, Some(sigma))
    };
    Ok(TRegion {
        lo_order: lo,
        hi_order: hi,
        excluded_lo,
        excluded_hi,
        includes_zero: true,
        sigma,
    })
}

/// The two boundary values of `t` that sit at the edges of the
/// nonnegativity region, labeled by which edge they close.
///
/// `upper-edge` is `2 - hi/lo` (narrow-ratio branch) or `sigma - 3`
/// (wide-ratio branch), always nonnegative; `lower-edge` is the matching
/// negative root. Returned as labeled values because the boundary cases are
/// analyzed separately from the open region.
pub fn endpoint_ts(lo: u32, hi: u32) -> Result<Vec<(&'static str, f64)>, PermError> {
    let region = omega_big_region(lo, hi)?;
    Ok(vec![
        ("upper-edge", region.excluded_hi),
        ("lower-edge", region.excluded_lo),
    ])
}

/// Ratio of the kernel permutation to the squared curvature on triples
/// passing the comparability and vertical-angle filters.
///
/// The angle filters depend on the sign of the combination weight `t`: for
/// `t < 0` both the lower and upper vertical-angle conditions are enforced,
/// otherwise only the lower one. Collinear triples that pass the filters
/// are reported as rejected rather than dividing by zero.
pub fn constrained_ratio(
    spec: KernelSpec,
    t: &Triple,
    alpha0: f64,
    tau: f64,
) -> Result<ConstrainedOutcome, PermError> {
    let combination_weight = match spec {
        KernelSpec::Combo { t, .. } => t,
        _ => 0.0,
    };
    if !in_comparable_class(t, tau) {
        return Ok(ConstrainedOutcome::Rejected(RejectReason::Comparability));
    }
    let (above_lower, below_upper) = delta_conditions(t, alpha0);
    if !above_lower {
        return Ok(ConstrainedOutcome::Rejected(RejectReason::AngleSumLow));
    }
    if combination_weight < 0.0 && !below_upper {
        return Ok(ConstrainedOutcome::Rejected(RejectReason::AngleSumHigh));
    }
    let c = menger_curvature(t);
    if c == 0.0 {
        return Ok(ConstrainedOutcome::Rejected(RejectReason::DegenerateCurvature));
    }
    let p = permutation(spec, t)?;
    Ok(ConstrainedOutcome::Value(p / (c * c)))
}
