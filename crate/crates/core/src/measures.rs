//! Finite atomic measures in the plane: validated construction, CSV atom
//! format, generators for model supports (segment, Lipschitz graph,
//! four-corner Cantor dust), disc restriction, and linear-growth probing.

use crate::geometry::PlanePoint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::collections::HashSet;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum MeasureError {
    #[error("atom {index} has nonpositive or non-finite weight")]
    NonpositiveWeight { index: usize },
    #[error("atom {index} has non-finite coordinates")]
    NonFinitePoint { index: usize },
    #[error("atom {index} duplicates an earlier point")]
    DuplicatePoint { index: usize },
    #[error("measure needs at least one atom")]
    EmptyInput,
    #[error("generator needs at least {min} atoms, got {count}")]
    BadCount { count: usize, min: usize },
    #[error("Cantor level {level} exceeds the cap of 10")]
    LevelTooLarge { level: u32 },
    #[error("regularity probing needs at least two distinct atoms")]
    DegenerateSupport,
    #[error("CSV line {line}: {message}")]
    BadRow { line: usize, message: String },
}

/// A finite positive measure given by distinct weighted atoms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    points: Vec<PlanePoint>,
    weights: Vec<f64>,
    total_mass: f64,
}

/// Key for exact duplicate detection; folds -0.0 onto +0.0 so the two
/// encodings of the same coordinate collide.
fn point_key(p: PlanePoint) -> (u64, u64) {
    let norm = |v: f64| if v == 0.0 { 0.0f64 } else { v }.to_bits();
    (norm(p.re), norm(p.im))
}

impl DiscreteMeasure {
    pub fn new(points: Vec<PlanePoint>, weights: Vec<f64>) -> Result<Self, MeasureError> {
        assert_eq!(points.len(), weights.len(), "points and weights must pair up");
        if points.is_empty() {
            return Err(MeasureError::EmptyInput);
        }
        let mut seen = HashSet::with_capacity(points.len());
        for (index, (p, w)) in points.iter().zip(&weights).enumerate() {
            if !p.is_finite() {
                return Err(MeasureError::NonFinitePoint { index });
            }
            if !w.is_finite() || *w <= 0.0 {
                return Err(MeasureError::NonpositiveWeight { index });
            }
            if !seen.insert(point_key(*p)) {
                return Err(MeasureError::DuplicatePoint { index });
            }
        }
        let total_mass = crate::parallel::pairwise_sum(&weights);
        Ok(DiscreteMeasure {
            points,
            weights,
            total_mass,
        })
    }

    /// Builds a measure from parsed `(re, im, weight)` rows.
    pub fn from_rows(rows: &[(f64, f64, f64)]) -> Result<Self, MeasureError> {
        let points = rows.iter().map(|r| PlanePoint::new(r.0, r.1)).collect();
        let weights = rows.iter().map(|r| r.2).collect();
        Self::new(points, weights)
    }

    /// Parses the CSV atom format: one `re,im,weight` triple per line,
    /// blank lines skipped, header/comment lines introduced by `#`.
    pub fn from_csv_text(text: &str) -> Result<Self, MeasureError> {
        let mut rows = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(MeasureError::BadRow {
                    line: lineno + 1,
                    message: format!("expected 3 comma-separated fields, got {}", fields.len()),
                });
            }
            let mut values = [0.0f64; 3];
            for (slot, field) in values.iter_mut().zip(&fields) {
                *slot = field.parse().map_err(|_| MeasureError::BadRow {
                    line: lineno + 1,
                    message: format!("cannot parse '{field}' as a number"),
                })?;
            }
            rows.push((values[0], values[1], values[2]));
        }
        Self::from_rows(&rows)
    }

    /// Serializes atoms back to the CSV format accepted by
    /// [`DiscreteMeasure::from_csv_text`].
    pub fn to_csv_text(&self) -> String {
        let mut out = String::from("# re,im,weight\n");
        for (p, w) in self.points.iter().zip(&self.weights) {
            out.push_str(&format!("{:?},{:?},{:?}\n", p.re, p.im, w));
        }
        out
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn points(&self) -> &[PlanePoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn point(&self, i: usize) -> PlanePoint {
        self.points[i]
    }

    pub fn weight(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                best = best.max(self.points[i].dist(self.points[j]));
            }
        }
        best
    }

    /// Smallest pairwise atom distance. Sweep over x-sorted points; the
    /// inner loop stops once the x-gap alone exceeds the current best, so
    /// spread-out supports finish in near-linear time.
    pub fn min_gap(&self) -> f64 {
        if self.points.len() < 2 {
            return 0.0;
        }
        let mut sorted = self.points.clone();
        sorted.sort_by(|p, q| p.re.total_cmp(&q.re).then(p.im.total_cmp(&q.im)));
        let mut best = f64::INFINITY;
        for i in 0..sorted.len() {
            for j in i + 1..sorted.len() {
                if sorted[j].re - sorted[i].re >= best {
                    break;
                }
                best = best.min(sorted[i].dist(sorted[j]));
            }
        }
        best
    }

    /// Mass of the closed ball of radius `r` about `center`.
    pub fn ball_mass(&self, center: PlanePoint, r: f64) -> f64 {
        let mut inside = Vec::new();
        for (p, w) in self.points.iter().zip(&self.weights) {
            if p.dist(center) <= r {
                inside.push(*w);
            }
        }
        crate::parallel::pairwise_sum(&inside)
    }

    /// Restriction to the closed disc `|z - center| <= r`; errors when no
    /// atom survives.
    pub fn restrict_to_disc(
        &self,
        center: PlanePoint,
        r: f64,
    ) -> Result<DiscreteMeasure, MeasureError> {
        let mut points = Vec::new();
        let mut weights = Vec::new();
        for (p, w) in self.points.iter().zip(&self.weights) {
            if p.dist(center) <= r {
                points.push(*p);
                weights.push(*w);
            }
        }
        DiscreteMeasure::new(points, weights)
    }
}

/// `count` equally spaced unit-interval atoms on the horizontal axis, each
/// carrying mass `1/count`.
pub fn gen_segment(count: usize) -> Result<DiscreteMeasure, MeasureError> {
    if count < 2 {
        return Err(MeasureError::BadCount { count, min: 2 });
    }
    let step = 1.0 / (count - 1) as f64;
    let points = (0..count)
        .map(|i| PlanePoint::new(i as f64 * step, 0.0))
        .collect();
    let weights = vec![1.0 / count as f64; count];
    DiscreteMeasure::new(points, weights)
}

/// Atoms on a seeded random piecewise-linear graph over `[0, 1]` whose
/// segment slopes are drawn uniformly from `[-slope, slope]`, with weights
/// equal to the length of each atom's share of the polyline (half of each
/// adjacent segment). Total mass is the polyline length.
pub fn gen_lipschitz_graph(
    count: usize,
    slope: f64,
    seed: u64,
) -> Result<DiscreteMeasure, MeasureError> {
    if count < 2 {
        return Err(MeasureError::BadCount { count, min: 2 });
    }
    assert!(slope >= 0.0 && slope.is_finite());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let step = 1.0 / (count - 1) as f64;
    let mut heights = vec![0.0f64; count];
    let mut seg_lengths = vec![0.0f64; count - 1];
    for i in 0..count - 1 {
        let s = if slope == 0.0 {
            0.0
        } else {
            rng.gen_range(-slope..=slope)
        };
        heights[i + 1] = heights[i] + s * step;
        seg_lengths[i] = step * (1.0 + s * s).sqrt();
    }
    let points = (0..count)
        .map(|i| PlanePoint::new(i as f64 * step, heights[i]))
        .collect();
    let weights = (0..count)
        .map(|i| {
            let left = if i > 0 { seg_lengths[i - 1] } else { 0.0 };
            let right = if i < count - 1 { seg_lengths[i] } else { 0.0 };
            (left + right) / 2.0
        })
        .collect();
    DiscreteMeasure::new(points, weights)
}

/// The level-`level` four-corner Cantor dust: `4^level` atoms at the
/// centers of the generation squares (side `4^-level`), each with mass
/// `4^-level`.
pub fn gen_four_corner_cantor(level: u32) -> Result<DiscreteMeasure, MeasureError> {
    if level > 10 {
        return Err(MeasureError::LevelTooLarge { level });
    }
    let mut corners = vec![(0.0f64, 0.0f64)];
    let mut side = 1.0f64;
    for _ in 0..level {
        let off = 0.75 * side;
        let mut next = Vec::with_capacity(corners.len() * 4);
        for &(x, y) in &corners {
            next.push((x, y));
            next.push((x + off, y));
            next.push((x, y + off));
            next.push((x + off, y + off));
        }
        corners = next;
        side /= 4.0;
    }
    let half = side / 2.0;
    let weight = 0.25f64.powi(level as i32);
    let points = corners
        .iter()
        .map(|&(x, y)| PlanePoint::new(x + half, y + half))
        .collect();
    let weights = vec![weight; corners.len()];
    DiscreteMeasure::new(points, weights)
}

/// Growth diagnostics from random ball probes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegularityReport {
    /// Largest probed `mass(ball)/radius` ratio (the linear-growth constant).
    pub growth_constant: f64,
    /// Smallest probed ratio; a lower density bound on the probed scales.
    pub ad_lower: f64,
    /// Equals `growth_constant`; kept as the named upper density bound.
    pub ad_upper: f64,
    pub probe_count: usize,
}

/// Probes `mass(B(z, r))/r` at random support atoms `z` and radii `r` drawn
/// from a geometric grid (ratio `2^(1/4)`) spanning `[2 * min_gap, diam]`.
/// Balls are closed and always contain the probed atom.
pub fn regularity(
    mu: &DiscreteMeasure,
    probes: usize,
    seed: u64,
) -> Result<RegularityReport, MeasureError> {
    assert!(probes >= 1);
    if mu.len() < 2 {
        return Err(MeasureError::DegenerateSupport);
    }
    let diam = mu.diameter();
    let lo = (2.0 * mu.min_gap()).min(diam);
    let ratio = 2.0f64.powf(0.25);
    let mut radii = Vec::new();
    let mut r = lo;
    while r < diam {
        radii.push(r);
        r *= ratio;
    }
    radii.push(diam);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ad_lower = f64::INFINITY;
    let mut ad_upper = 0.0f64;
    for _ in 0..probes {
        let z = mu.point(rng.gen_range(0..mu.len()));
        let r = radii[rng.gen_range(0..radii.len())];
        let ratio = mu.ball_mass(z, r) / r;
        ad_lower = ad_lower.min(ratio);
        ad_upper = ad_upper.max(ratio);
    }
    Ok(RegularityReport {
        growth_constant: ad_upper,
        ad_lower,
        ad_upper,
        probe_count: probes,
    })
}
