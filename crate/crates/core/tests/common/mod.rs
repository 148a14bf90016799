//! Independent reference computations: plain `f64` orbits reduced mod 1 and
//! partitions rebuilt by sorting, sharing no code with the library.
#![allow(dead_code)]

use std::f64::consts::TAU;

use scl_core::map::{tune_parameter, CircleMap, Family};
use scl_core::RotationTarget;

pub const GOLDEN: f64 = 0.618_033_988_749_894_9;
pub const SILVER: f64 = 0.414_213_562_373_095_03;

pub fn golden_target() -> RotationTarget {
    RotationTarget::golden(30).unwrap()
}

/// The golden critical-sine map tuned six levels past the deepest level the
/// tests look at.
pub fn tuned_golden() -> (CircleMap, RotationTarget) {
    let t = golden_target();
    (tune_parameter(Family::CriticalSine, &t, 20, 1e-16).unwrap().map, t)
}

pub fn sine_orbit(omega: f64, len: usize) -> Vec<f64> {
    let mut x = 0.0f64;
    let mut out = Vec::with_capacity(len);
    for _ in 0..len {
        out.push(x);
        x = x + omega - (TAU * x).sin() / TAU;
        x -= x.floor();
    }
    out
}

pub fn rotation_orbit(rho: f64, len: usize) -> Vec<f64> {
    (0..len).map(|k| (k as f64 * rho).fract()).collect()
}

/// Atoms of the partition cut out by `points`, as `(orbit index, start,
/// length)` in circle order.
pub fn sorted_cells(points: &[f64]) -> Vec<(usize, f64, f64)> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&a, &b| points[a].total_cmp(&points[b]));
    (0..idx.len())
        .map(|i| {
            let s = points[idx[i]];
            let e = if i + 1 < idx.len() { points[idx[i + 1]] } else { 1.0 + points[idx[0]] };
            (idx[i], s, e - s)
        })
        .collect()
}

/// Closest returns of a circle orbit: times of new minima of the distance
/// to the start, counted either side.
pub fn closest_returns(orbit: &[f64]) -> Vec<usize> {
    let mut best = f64::INFINITY;
    let mut out = Vec::new();
    for (k, &x) in orbit.iter().enumerate().skip(1) {
        let d = x.min(1.0 - x);
        if d < best {
            best = d;
            out.push(k);
        }
    }
    out
}

/// `p/q` of the finite continued fraction `[0; a_1, ..., a_n]`, evaluated
/// from the tail.
pub fn finite_cf(a: &[u64]) -> (u128, u128) {
    let (mut num, mut den) = (0u128, 1u128);
    for &x in a.iter().rev() {
        (num, den) = (den, x as u128 * den + num);
    }
    (num, den)
}
