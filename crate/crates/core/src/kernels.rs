//! The kernel family under study.
//!
//! For an integer `m >= 1`,
//!
//! ```text
//! kappa_m(z) = Re(z)^(2m-1) / |z|^(2m),
//! ```
//!
//! an odd, real-valued kernel homogeneous of degree `-1`. Two members are
//! combined as `K(z) = kappa_hi(z) + t * kappa_lo(z)` with `lo <= hi`; the
//! Cauchy kernel `1/z` is carried alongside as the complex reference case.
//!
//! Powers are evaluated by binary exponentiation on `Re(z)^2` and `|z|^2`,
//! which keeps orders up to `m = 32` stable and makes antisymmetry and
//! conjugation symmetry hold bit-for-bit.

use crate::geometry::PlanePoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Serialize, Serializer};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq, Clone)]
pub enum KernelError {
    /// Kernels are singular at the origin; evaluation there is a caller bug,
    /// not an infinity.
    #[error("kernel evaluated at z = 0")]
    ZeroArgument,
    /// A real-kernel operation received the Cauchy kernel or vice versa.
    #[error("operation does not apply to this kernel variant")]
    WrongVariant,
    /// Order parameters must satisfy `1 <= lo <= hi` (and `m >= 1`).
    #[error("invalid kernel orders: {0}")]
    BadOrders(String),
    /// Unparseable kernel text form.
    #[error("cannot parse kernel '{0}'; expected kappa:m, combo:n:N:t, or cauchy")]
    BadText(String),
}

/// Kernel selector.
///
/// * `Kappa { m }` is `kappa_m`.
/// * `Combo { lo, hi, t }` is `kappa_hi + t * kappa_lo` (`lo <= hi`).
/// * `Cauchy` is `1/z`.
///
/// Text form: `kappa:m`, `combo:lo:hi:t`, `cauchy`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    Kappa { m: u32 },
    Combo { lo: u32, hi: u32, t: f64 },
    Cauchy,
}

impl KernelSpec {
    pub fn kappa(m: u32) -> Result<KernelSpec, KernelError> {
        if m == 0 {
            return Err(KernelError::BadOrders("kappa order must be >= 1".into()));
        }
        Ok(KernelSpec::Kappa { m })
    }

    pub fn combo(lo: u32, hi: u32, t: f64) -> Result<KernelSpec, KernelError> {
        if lo == 0 || hi == 0 {
            return Err(KernelError::BadOrders("combo orders must be >= 1".into()));
        }
        if lo > hi {
            return Err(KernelError::BadOrders(format!(
                "combo orders must satisfy lo <= hi, got {lo} > {hi}"
            )));
        }
        if !t.is_finite() {
            return Err(KernelError::BadOrders("combo weight t must be finite".into()));
        }
        Ok(KernelSpec::Combo { lo, hi, t })
    }

    pub fn is_real(&self) -> bool {
        !matches!(self, KernelSpec::Cauchy)
    }

    /// Evaluates a real kernel at `z != 0`.
    pub fn eval_real(&self, z: PlanePoint) -> Result<f64, KernelError> {
        if z.re == 0.0 && z.im == 0.0 {
            return Err(KernelError::ZeroArgument);
        }
        match *self {
            KernelSpec::Kappa { m } => Ok(kappa_raw(m, z)),
            KernelSpec::Combo { lo, hi, t } => Ok(kappa_raw(hi, z) + t * kappa_raw(lo, z)),
            KernelSpec::Cauchy => Err(KernelError::WrongVariant),
        }
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Kappa { m } => write!(f, "kappa:{m}"),
            KernelSpec::Combo { lo, hi, t } => write!(f, "combo:{lo}:{hi}:{t}"),
            KernelSpec::Cauchy => write!(f, "cauchy"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = KernelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || KernelError::BadText(s.to_string());
        let mut parts = s.split(':');
        match parts.next() {
            Some("cauchy") => {
                if parts.next().is_some() {
                    return Err(bad());
                }
                Ok(KernelSpec::Cauchy)
            }
            Some("kappa") => {
                let m = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if parts.next().is_some() {
                    return Err(bad());
                }
                KernelSpec::kappa(m)
            }
            Some("combo") => {
                let lo = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let hi = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                let t = parts.next().ok_or_else(bad)?.parse().map_err(|_| bad())?;
                if parts.next().is_some() {
                    return Err(bad());
                }
                KernelSpec::combo(lo, hi, t)
            }
            _ => Err(bad()),
        }
    }
}

impl Serialize for KernelSpec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Nonnegative integer power by repeated squaring.
fn powi(base: f64, mut exp: u32) -> f64 {
    let mut acc = 1.0;
    let mut b = base;
    while exp > 0 {
        if exp & 1 == 1 {
            acc *= b;
        }
        b *= b;
        exp >>= 1;
    }
    acc
}

/// `kappa_m(z) = x^(2m-1) / (|z|^2)^m` without the zero check, factored as
/// `(x / |z|^2) * (x^2 / |z|^2)^(m-1)` so the bounded direction ratio is
/// powered instead of the raw coordinates (no overflow at high orders).
fn kappa_raw(m: u32, z: PlanePoint) -> f64 {
    let r2 = z.re * z.re + z.im * z.im;
    let ratio = z.re * z.re / r2;
    z.re / r2 * powi(ratio, m - 1)
}

/// The Cauchy kernel `1/z`.
pub fn eval_cauchy(z: PlanePoint) -> Result<PlanePoint, KernelError> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(KernelError::ZeroArgument);
    }
    Ok(z.cinv())
}

/// A seeded sampling request for empirical probes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SamplePlan {
    pub count: u64,
    pub seed: u64,
}

/// Deterministic size constant `sup_z |z| |K(z)|`.
///
/// The kernels are homogeneous of degree `-1`, so only the direction
/// matters: with `c = cos(angle)`, the profile is `|c|^(2m-1)` for a single
/// order (supremum exactly 1, like the complex reciprocal kernel) and
/// `|c^(2 hi - 1) + t c^(2 lo - 1)|` for a combination, maximized on a
/// dense grid over `c` in `[0, 1]`.
pub fn size_constant(spec: KernelSpec) -> f64 {
    match spec {
        KernelSpec::Kappa { .. } | KernelSpec::Cauchy => 1.0,
        KernelSpec::Combo { lo, hi, t } => {
            let (elo, ehi) = ((2 * lo - 1) as i32, (2 * hi - 1) as i32);
            let steps = 100_000;
            (0..=steps)
                .map(|k| {
                    let c = k as f64 / steps as f64;
                    (c.powi(ehi) + t * c.powi(elo)).abs()
                })
                .fold(0.0f64, f64::max)
        }
    }
}

/// Empirical Calderon-Zygmund size constant: the supremum of `|z| * |K(z)|`
/// over seeded samples of the unit box (the kernel is homogeneous of degree
/// `-1`, so direction is all that matters). For `kappa_m` the true supremum
/// is `1`, attained along the real axis.
pub fn cz_size_ratio(spec: &KernelSpec, plan: &SamplePlan) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(plan.seed);
    let mut sup: f64 = 0.0;
    let mut drawn = 0;
    while drawn < plan.count {
        let z = PlanePoint::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        if z.re == 0.0 && z.im == 0.0 {
            continue;
        }
        drawn += 1;
        let size = match spec {
            KernelSpec::Cauchy => 1.0,
            real => z.norm() * real.eval_real(z).expect("z != 0").abs(),
        };
        sup = sup.max(size);
    }
    sup
}
