//! Exact-rational twins of the polynomial identities behind the kernel
//! permutation bounds.
//!
//! Everything here works over arbitrary-precision rationals, with the same
//! formulas as the floating-point routes, so equalities can be certified
//! with zero tolerance: the closed representation of `p_kappa_m`, the
//! upper-gap polynomial `g_poly` with its factored form, and the lower-gap
//! identity whose whole content is `h_2 >= 0`.
//!
//! Points are pairs `(x, y)`; the three-point configurations are always
//! taken as `(0, u, v)`, which loses nothing because the permutation
//! product is translation invariant.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Zero};

pub type Rat = BigRational;

/// Rational from an integer pair; panics on zero denominator.
pub fn rat(num: i64, den: i64) -> Rat {
    Rat::new(BigInt::from(num), BigInt::from(den))
}

/// Exact conversion of a finite float.
pub fn rat_from_f64(x: f64) -> Option<Rat> {
    Rat::from_float(x)
}

fn rpow(base: &Rat, exp: u32) -> Rat {
    let mut acc = Rat::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            acc *= &b;
        }
        let sq = &b * &b;
        b = sq;
        e >>= 1;
    }
    acc
}

fn binom(n: u32, k: u32) -> Rat {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Rat::from_integer(acc)
}

/// The k-th building block of the closed representation:
///
/// ```text
/// h_k(u, v) = (a x)^(2k-1) (y - b)^(2k)
///           + (x (x - a))^(2k-1) b^(2k)
///           + (a (a - x))^(2k-1) y^(2k)
/// ```
///
/// with `u = (x, y)`, `v = (a, b)`. Nonnegative for every real input.
pub fn h_term(k: u32, u: &(Rat, Rat), v: &(Rat, Rat)) -> Rat {
    assert!(k >= 1, "h_term requires k >= 1");
    let (x, y) = u;
    let (a, b) = v;
    let ymb = y - b;
    let xma = x - a;
    rpow(&(a * x), 2 * k - 1) * rpow(&ymb, 2 * k)
        + rpow(&(x * &xma), 2 * k - 1) * rpow(b, 2 * k)
        + rpow(&(a * &(-&xma)), 2 * k - 1) * rpow(y, 2 * k)
}

/// `|u|^2 |v|^2 |u-v|^2` as a rational polynomial.
pub fn weight_poly(u: &(Rat, Rat), v: &(Rat, Rat)) -> Rat {
    let (x, y) = u;
    let (a, b) = v;
    let xma = x - a;
    let ymb = y - b;
    (x * x + y * y) * (a * a + b * b) * (&xma * &xma + &ymb * &ymb)
}

/// The gap polynomial of the sharp comparison `p_kappa_2 <= 2 p_kappa_1`:
///
/// ```text
/// g_poly = 2 (x^2 a^2 (y-b)^2 + (x^2 b^2 + a^2 y^2)(x-a)^2) h_1 - h_2.
/// ```
///
/// Nonnegative for every real input; see [`g_poly_factored`] for the
/// closed factorization that proves it.
pub fn g_poly(x: &Rat, y: &Rat, a: &Rat, b: &Rat) -> Rat {
    let u = (x.clone(), y.clone());
    let v = (a.clone(), b.clone());
    let h1 = h_term(1, &u, &v);
    let h2 = h_term(2, &u, &v);
    let xma = x - a;
    let ymb = y - b;
    let lead = x * x * a * a * &ymb * &ymb + (x * x * b * b + a * a * y * y) * &xma * &xma;
    rat(2, 1) * lead * h1 - h2
}

/// Closed factorization of [`g_poly`] for `a, b != 0`:
///
/// ```text
/// g_poly / (a^6 b^4) = ((x/a - 1/2)^2 + 3/4) * (x/a - y/b)^4.
/// ```
///
/// Returns `None` when `a` or `b` is zero (those cases collapse to the
/// monomials `x^6 b^4` and `a^4 y^4 ((x - a/2)^2 + 3 a^2 / 4)`).
pub fn g_poly_factored(x: &Rat, y: &Rat, a: &Rat, b: &Rat) -> Option<Rat> {
    if a.is_zero() || b.is_zero() {
        return None;
    }
    let alpha = x / a;
    let beta = y / b;
    let half = rat(1, 2);
    let shifted = &alpha - &half;
    let quart = &shifted * &shifted + rat(3, 4);
    let diff = &alpha - &beta;
    Some(rpow(a, 6) * rpow(b, 4) * quart * rpow(&diff, 4))
}

/// Rational `kappa_m(z) = x^(2m-1) / (x^2 + y^2)^m`; `None` at the origin.
pub fn kappa(m: u32, z: &(Rat, Rat)) -> Option<Rat> {
    let (x, y) = z;
    if x.is_zero() && y.is_zero() {
        return None;
    }
    Some(rpow(x, 2 * m - 1) / rpow(&(x * x + y * y), m))
}

fn sub(p: &(Rat, Rat), q: &(Rat, Rat)) -> (Rat, Rat) {
    (&p.0 - &q.0, &p.1 - &q.1)
}

/// Direct rational permutation product of `kappa_m` over three pairwise
/// distinct points.
pub fn permutation_kappa(m: u32, z1: &(Rat, Rat), z2: &(Rat, Rat), z3: &(Rat, Rat)) -> Rat {
    let k = |p: &(Rat, Rat), q: &(Rat, Rat)| kappa(m, &sub(p, q)).expect("distinct points");
    k(z1, z2) * k(z1, z3) + k(z2, z1) * k(z2, z3) + k(z3, z1) * k(z3, z2)
}

/// Closed representation of `p_kappa_m(0, u, v)`:
///
/// ```text
/// sum_{k=1..m} C(m,k) (a x (x-a))^(2(m-k)) h_k(u,v) / (|u|^2 |v|^2 |u-v|^2)^m
/// ```
pub fn representation(m: u32, u: &(Rat, Rat), v: &(Rat, Rat)) -> Rat {
    let (x, _) = u;
    let (a, _) = v;
    let p = a * x * &(x - a);
    let w = weight_poly(u, v);
    let mut acc = Rat::zero();
    for k in 1..=m {
        acc += binom(m, k) * rpow(&p, 2 * (m - k)) * h_term(k, u, v);
    }
    acc / rpow(&w, m)
}

/// Numerator of the upper gap on the weight-squared denominator:
/// `2 p_1 - p_2 = upper_gap_numerator / W^2` with `W = |u|^2 |v|^2 |u-v|^2`.
///
/// The numerator is `2 S h_1 - h_2` where `S = W - (a x (x-a))^2` expands
/// to the cancellation-free sum
/// `x^2 a^2 (y-b)^2 + (x^2 b^2 + a^2 y^2 + b^2 y^2)((x-a)^2 + (y-b)^2)`.
pub fn upper_gap_numerator(u: &(Rat, Rat), v: &(Rat, Rat)) -> Rat {
    let (x, y) = u;
    let (a, b) = v;
    let xma = x - a;
    let ymb = y - b;
    let s = x * x * a * a * &ymb * &ymb
        + (x * x * b * b + a * a * y * y + b * b * y * y) * (&xma * &xma + &ymb * &ymb);
    rat(2, 1) * s * h_term(1, u, v) - h_term(2, u, v)
}

/// Deterministic small-rational stream for certification tests.
pub struct RatStream {
    state: u64,
}

impl RatStream {
    pub fn new(seed: u64) -> Self {
        RatStream { state: seed | 1 }
    }

    fn next_u64(&mut self) -> u64 {
        self.state = self
            .state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        self.state
    }

    /// A rational with numerator in `[-limit, limit]` and denominator in
    /// `[1, 12]`.
    pub fn next(&mut self, limit: i64) -> Rat {
        let span = (2 * limit + 1) as u64;
        let num = (self.next_u64() >> 17) % span;
        let den = (self.next_u64() >> 17) % 12 + 1;
        rat(num as i64 - limit, den as i64)
    }

    /// A rational point avoiding the origin.
    pub fn next_point(&mut self, limit: i64) -> (Rat, Rat) {
        loop {
            let p = (self.next(limit), self.next(limit));
            if !(p.0.is_zero() && p.1.is_zero()) {
                return p;
            }
        }
    }
}

/// `true` when the three rational points are pairwise distinct.
pub fn pairwise_distinct(z1: &(Rat, Rat), z2: &(Rat, Rat), z3: &(Rat, Rat)) -> bool {
    let eq = |p: &(Rat, Rat), q: &(Rat, Rat)| p.0 == q.0 && p.1 == q.1;
    !(eq(z1, z2) || eq(z1, z3) || eq(z2, z3))
}
