//! Order-stable reductions shared by the parallel evaluation paths.
//!
//! Rayon's indexed collect preserves element order, so summing the
//! collected partials with a fixed-shape tree makes every parallel result
//! bitwise independent of the number of worker threads.

use crate::geometry::PlanePoint;

const LEAF: usize = 8;

/// Sums a slice with a balanced pairwise tree whose shape depends only on
/// the slice length.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    match values.len() {
        0 => 0.0,
        n if n <= LEAF => values.iter().sum(),
        n => {
            let mid = n / 2;
            pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
        }
    }
}

/// Componentwise pairwise sum for plane points.
pub fn pairwise_sum_points(values: &[PlanePoint]) -> PlanePoint {
    match values.len() {
        0 => PlanePoint::ZERO,
        n if n <= LEAF => {
            let mut acc = PlanePoint::ZERO;
            for v in values {
                acc = acc + *v;
            }
            acc
        }
        n => {
            let mid = n / 2;
            pairwise_sum_points(&values[..mid]) + pairwise_sum_points(&values[mid..])
        }
    }
}
