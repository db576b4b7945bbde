//! Triangle detection through the pointer model.
//!
//! `Z(0) = prod_v (3n + deg v)` is known in closed form, and `Z(inf)` falls
//! at least `1/(16 n^2)` below it exactly when the graph has a triangle, so
//! an estimate of `Z(inf)` to within `1/(32 n^2)` decides the question.

use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::Serialize;

use super::estimate::{estimate_partition, EstimateOptions};
use super::EstimateError;
use crate::graph::Graph;
use crate::model::{exact_partition, make_pointer_model, Temperature};

#[derive(Debug, Clone, PartialEq)]
pub enum TriangleMode {
    /// `Z(inf)` by enumeration, subject to the enumeration cap.
    Exact { cap: u64 },
    /// `Z(inf)` estimated to relative error `1/(32 n^2)`. Only feasible for
    /// a handful of vertices.
    Estimated(EstimateOptions),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TriangleReport {
    pub has_triangle: bool,
    pub z_zero: String,
    /// Exact `Z(inf)` or its estimate.
    pub z_inf: f64,
    /// `1 - Z(inf) / Z(0)`.
    pub gap: f64,
}

/// `1 / (32 n^2)`.
pub fn detection_epsilon(n: usize) -> f64 {
    1.0 / (32.0 * (n * n).max(1) as f64)
}

pub fn detect_triangle(g: &Graph, mode: &TriangleMode) -> Result<TriangleReport, EstimateError> {
    let n = g.n();
    let model = make_pointer_model(Arc::new(g.clone()), Temperature::Infinite)?;
    let z0: BigUint = model.anchor_partition();
    let z0r = BigRational::from(BigInt::from(z0.clone()));
    // threshold (1 - 1/(32 n^2)) Z(0)
    let nn = BigInt::from(32 * (n * n).max(1));
    let threshold = &z0r * (BigRational::one() - BigRational::new(BigInt::from(1), nn));
    let (has_triangle, z_inf, gap) = match mode {
        TriangleMode::Exact { cap } => {
            let z_inf = exact_partition(&model, *cap)?;
            let gap = (BigRational::one() - &z_inf / &z0r).to_f64().unwrap_or(f64::NAN);
            (z_inf < threshold, z_inf.to_f64().unwrap_or(f64::INFINITY), gap)
        }
        TriangleMode::Estimated(options) => {
            let r = estimate_partition(&model, detection_epsilon(n), options)?;
            let t = threshold.to_f64().unwrap_or(f64::INFINITY);
            let z0f = z0r.to_f64().unwrap_or(f64::INFINITY);
            (r.estimate < t, r.estimate, 1.0 - r.estimate / z0f)
        }
    };
    Ok(TriangleReport {
        has_triangle,
        z_zero: z0.to_string(),
        z_inf,
        gap,
    })
}
