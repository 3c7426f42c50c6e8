//! Numerical toolkit for Menger curvature and the permutations of odd
//! homogeneous convolution kernels acting on discrete measures in the plane.
//!
//! The library is organized around a small set of objects:
//!
//! * [`geometry`]: points, triples, lines, Menger curvature and the angle
//!   filters used to carve out well-shaped triangles.
//! * [`kernels`]: the kernel family `kappa_m(z) = Re(z)^(2m-1) / |z|^(2m)`,
//!   two-term combinations `kappa_hi + t * kappa_lo`, and the Cauchy kernel.
//! * [`permutations`]: the symmetrized three-point products `p_K`, their
//!   closed positive representation, sharp comparison gaps, and the regions
//!   of the combination weight `t` where positivity holds or fails.
//! * [`exact`]: the same polynomial identities over arbitrary-precision
//!   rationals, used to certify the floating-point routes.
//! * [`measures`]: finite atomic measures, generators for model supports
//!   (segments, Lipschitz graphs, the four-corner Cantor set), and growth
//!   probing.
//! * [`operators`]: epsilon-truncated convolution operators, their `L^2`
//!   norms on a measure, triple permutation sums, and the exact algebraic
//!   residual linking the two.
//! * [`multiscale`]: translated dyadic lattices over a measure, flatness
//!   (beta) numbers per cube or ball, and packing ratios of cube families.
//! * [`scan`]: seeded randomized searches for extrema, sign changes and
//!   constrained infima of the permutation functionals.
//!
//! Everything is deterministic given the seeds embedded in the inputs, and
//! the parallel reductions are arranged so results do not depend on the
//! number of worker threads.

pub mod exact;
pub mod geometry;
pub mod kernels;
pub mod measures;
pub mod multiscale;
pub mod operators;
mod parallel;
pub mod permutations;
pub mod scan;

pub use geometry::{GeomError, Line, PlanePoint, Triple};
pub use kernels::{KernelError, KernelSpec, SamplePlan};
pub use measures::{DiscreteMeasure, MeasureError, RegularityReport};
pub use multiscale::{
    BetaNorm, BetaReport, ClassifiedCube, DyadicCube, DyadicLattice, MultiscaleError,
};
pub use operators::{MvReport, NormChainReport, OperatorError, Truncation};
pub use permutations::{ConstrainedOutcome, PermError, RejectReason, TRegion};
pub use scan::{RegionScanPoint, Sampler, ScanConfig, ScanError, ScanReport};
