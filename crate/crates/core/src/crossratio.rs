//! Cross-ratios `Cr` and `Poin`, their distortion under iterates, the
//! integral formula for `-log Poin` and the expansion-lemma terms.
//!
//! Distances are lift differences inside one window `a < b < c < d`,
//! `d - a <= 1`.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::{map_indexed, stream_rng, Execution};
use crate::map::SmoothMap;
use crate::quad::integrate_2d;

/// Absolute target for [`poin_integral`].
pub const QUADRATURE_TOLERANCE: f64 = 1e-8;
/// Subdivision budget per quadrature level.
pub const QUADRATURE_BUDGET: usize = 4000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quadruple {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
}

impl Quadruple {
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        if !(a < b && b < c && c < d) {
            return Err(Error::InvalidQuadruple(format!("({a}, {b}, {c}, {d}) is not strictly increasing")));
        }
        if d - a > 1.0 {
            return Err(Error::InvalidQuadruple(format!("width {} exceeds one turn", d - a)));
        }
        Ok(Self { a, b, c, d })
    }

    /// `(b - a, c - b, d - c)`.
    pub fn gaps(&self) -> (f64, f64, f64) {
        (self.b - self.a, self.c - self.b, self.d - self.c)
    }
}

/// `Cr` from the consecutive gaps `u = b - a`, `v = c - b`, `w = d - c`.
pub fn cr_from_gaps(u: f64, v: f64, w: f64) -> f64 {
    (u * w) / ((u + v) * (v + w))
}

pub fn poin_from_gaps(u: f64, v: f64, w: f64) -> f64 {
    (v * (u + v + w)) / ((u + v) * (v + w))
}

/// `|b-a||d-c| / (|c-a||d-b|)`.
pub fn cr(q: &Quadruple) -> f64 {
    let (u, v, w) = q.gaps();
    cr_from_gaps(u, v, w)
}

/// `|b-c||d-a| / (|c-a||d-b|)`.
pub fn poin(q: &Quadruple) -> f64 {
    let (u, v, w) = q.gaps();
    poin_from_gaps(u, v, w)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StepFlags {
    pub inside_u: bool,
    pub meets_v: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionRecord {
    pub quadruple: Quadruple,
    pub m: usize,
    pub poin_before: f64,
    pub poin_after: f64,
    pub dpoin: f64,
    pub steps: Vec<StepFlags>,
    /// Sum of expansion-lemma terms over the steps inside `U`.
    pub expansion_sum: f64,
}

/// `Poin(f^m q) / Poin(q)` with per-step diagnostics.
///
/// The quadruple is carried as a base point and three gaps, each advanced
/// with the map's difference formula, so isometries preserve it exactly.
pub fn dpoin<M: SmoothMap + ?Sized>(q: &Quadruple, map: &M, m: usize) -> Result<DistortionRecord> {
    let (mut u, mut v, mut w) = q.gaps();
    let mut a = q.a;
    let poin_before = poin_from_gaps(u, v, w);
    let mut steps = Vec::with_capacity(m);
    let mut expansion_sum = 0.0;
    for i in 0..m {
        let d = a + u + v + w;
        if map.has_critical_inside(a, d) {
            return Err(Error::CriticalPoint(format!("image {i} of the quadruple contains a critical point")));
        }
        let inside_u = map.inside_u(a, d);
        if inside_u {
            let scale = map.critical_distance(a).max(map.critical_distance(d));
            expansion_sum += u * w / (scale * scale);
        }
        steps.push(StepFlags { inside_u, meets_v: !inside_u });
        let (b, c) = (a + u, a + u + v);
        let (nu, nv, nw) = (map.eval_diff(a, u), map.eval_diff(b, v), map.eval_diff(c, w));
        if !(nu > 0.0 && nv > 0.0 && nw > 0.0) {
            return Err(Error::InvalidQuadruple(format!("ordering collapsed at step {}", i + 1)));
        }
        a = map.eval(a);
        a -= a.floor();
        (u, v, w) = (nu, nv, nw);
    }
    let poin_after = poin_from_gaps(u, v, w);
    Ok(DistortionRecord {
        quadruple: *q,
        m,
        poin_before,
        poin_after,
        dpoin: poin_after / poin_before,
        steps,
        expansion_sum,
    })
}

/// `int int_S dx dy / (x - y)^2` over `S = [a, b] x [c, d]`, by adaptive
/// quadrature.
pub fn poin_integral(q: &Quadruple) -> Result<f64> {
    integrate_2d(
        |x, y| {
            let t = y - x;
            1.0 / (t * t)
        },
        (q.a, q.b),
        (q.c, q.d),
        QUADRATURE_TOLERANCE,
        QUADRATURE_BUDGET,
    )
}

/// The integrand of `log DPoin`:
/// `(1 - f'(x) f'(y) / ((f(x) - f(y)) / (x - y))^2) / (x - y)^2`.
pub fn distortion_integrand<M: SmoothMap + ?Sized>(map: &M, x: f64, y: f64) -> f64 {
    let h = y - x;
    let slope = map.eval_diff(x, h) / h;
    (1.0 - map.derivative(x) * map.derivative(y) / (slope * slope)) / (h * h)
}

/// The same integrand for `x^3`, reduced: `(x^2 + 4xy + y^2) / (x^2 + xy + y^2)^2`.
pub fn cubic_integrand(x: f64, y: f64) -> f64 {
    let s = x * x + x * y + y * y;
    (x * x + 4.0 * x * y + y * y) / (s * s)
}

/// `log DPoin(q; f)` as the integral of [`distortion_integrand`] over `S`.
pub fn log_dpoin_integral<M: SmoothMap + ?Sized>(map: &M, q: &Quadruple) -> Result<f64> {
    integrate_2d(
        |x, y| distortion_integrand(map, x, y),
        (q.a, q.b),
        (q.c, q.d),
        QUADRATURE_TOLERANCE,
        QUADRATURE_BUDGET,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpansionTerms {
    pub sum: f64,
    pub log_dpoin: f64,
    pub steps_inside_u: usize,
}

/// Expansion-lemma sum over steps `i < m` with `f^i(a, d)` inside `U`,
/// `|f^i a - f^i b| |f^i c - f^i d| / max(|f^i a|, |f^i d|)^2`, paired with
/// `log DPoin(q; f^m)`.
pub fn expansion_terms<M: SmoothMap + ?Sized>(q: &Quadruple, map: &M, m: usize) -> Result<ExpansionTerms> {
    let rec = dpoin(q, map, m)?;
    Ok(ExpansionTerms {
        sum: rec.expansion_sum,
        log_dpoin: rec.dpoin.ln(),
        steps_inside_u: rec.steps.iter().filter(|s| s.inside_u).count(),
    })
}

/// Four sorted points in `[lo, hi]` with `c - b >= min_inner_gap`.
pub fn random_quadruple<R: Rng>(rng: &mut R, lo: f64, hi: f64, min_inner_gap: f64) -> Quadruple {
    loop {
        let mut p: [f64; 4] = std::array::from_fn(|_| rng.random_range(lo..hi));
        p.sort_by(f64::total_cmp);
        if p[2] - p[1] >= min_inner_gap && p[1] > p[0] && p[3] > p[2] {
            if let Ok(q) = Quadruple::new(p[0], p[1], p[2], p[3]) {
                return q;
            }
        }
    }
}

/// Outcome of a residual sweep: the worst residual and the sample indices
/// that broke the threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub name: String,
    pub count: usize,
    pub threshold: f64,
    /// Largest residual (or, for lower-bound sweeps, smallest value).
    pub worst: f64,
    pub offenders: Vec<usize>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.offenders.is_empty()
    }

    fn from_residuals(name: &str, threshold: f64, residuals: Vec<Result<f64>>) -> Self {
        let count = residuals.len();
        let mut worst: f64 = 0.0;
        let mut offenders = Vec::new();
        for (i, r) in residuals.into_iter().enumerate() {
            match r {
                Ok(r) if r < threshold => worst = worst.max(r),
                Ok(r) => {
                    worst = worst.max(r);
                    offenders.push(i);
                }
                Err(_) => {
                    worst = f64::INFINITY;
                    offenders.push(i);
                }
            }
        }
        Self { name: name.into(), count, threshold, worst, offenders }
    }
}

/// `|cr + poin - 1|` over random quadruples in `[0, 1]`.
pub fn identity_sweep(count: usize, seed: u64, exec: Execution) -> SweepSummary {
    let res = map_indexed(exec, count, |i| {
        let q = random_quadruple(&mut stream_rng(seed, i as u64), 0.0, 1.0, 0.0);
        Ok((cr(&q) + poin(&q) - 1.0).abs())
    });
    SweepSummary::from_residuals("cr_plus_poin", 1e-12, res)
}

/// `|poin_integral + log poin|` over random quadruples in `[0, 1]` with
/// `c - b >= 1e-3`.
pub fn quadrature_sweep(count: usize, seed: u64, exec: Execution) -> SweepSummary {
    let res = map_indexed(exec, count, |i| {
        let q = random_quadruple(&mut stream_rng(seed, i as u64), 0.0, 1.0, 1e-3);
        poin_integral(&q).map(|v| (v + poin(&q).ln()).abs())
    });
    SweepSummary::from_residuals("poin_integral", 1e-6, res)
}

/// Single-step `DPoin` over random quadruples in `[lo, hi]`, where the map
/// has negative Schwarzian. The residual is `max(0, 1 - DPoin)`.
pub fn expansion_sweep<M: SmoothMap + ?Sized>(
    name: &str,
    map: &M,
    (lo, hi): (f64, f64),
    count: usize,
    seed: u64,
    exec: Execution,
) -> SweepSummary {
    let res = map_indexed(exec, count, |i| {
        let q = random_quadruple(&mut stream_rng(seed, i as u64), lo, hi, 0.0);
        dpoin(&q, map, 1).map(|r| (1.0 - r.dpoin).max(0.0))
    });
    SweepSummary::from_residuals(name, 1e-9, res)
}

/// Relative gap between [`distortion_integrand`] for `x^3` and the reduced
/// [`cubic_integrand`] at random points `0.05 <= x < 0.45`, `0.55 <= y < 1`.
pub fn cubic_integrand_sweep(count: usize, seed: u64, exec: Execution) -> SweepSummary {
    use crate::map::CubicProxy;
    let res = map_indexed(exec, count, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let x = rng.random_range(0.05..0.45);
        let y = rng.random_range(0.55..1.0);
        let exact = cubic_integrand(x, y);
        Ok(((distortion_integrand(&CubicProxy, x, y) - exact) / exact).abs())
    });
    SweepSummary::from_residuals("cubic_integrand", 1e-10, res)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::map::{CircleMap, CubicProxy};

    fn q(a: f64, b: f64, c: f64, d: f64) -> Quadruple {
        Quadruple::new(a, b, c, d).unwrap()
    }

    #[test]
    fn cross_ratio_values() {
        let thirds = q(0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0);
        assert!((cr(&thirds) - 0.25).abs() < 1e-15);
        assert!((poin(&thirds) - 0.75).abs() < 1e-15);
        let uneven = q(0.0, 0.25, 0.5, 1.0);
        assert!((cr(&uneven) - 1.0 / 3.0).abs() < 1e-15);
        assert!((poin(&uneven) - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn cr_vanishes_as_b_meets_a() {
        assert!(cr(&q(0.0, 1e-12, 0.5, 1.0)) < 1e-11);
        assert!(Quadruple::new(0.0, 0.0, 0.5, 1.0).is_err());
        assert!(Quadruple::new(0.0, 0.2, 0.5, 1.5).is_err());
    }

    #[test]
    fn dpoin_rotation_is_one() {
        let r = CircleMap::rigid_rotation(0.618_033_988_749_894_9);
        let rec = dpoin(&q(0.1, 0.2, 0.35, 0.6), &r, 57).unwrap();
        assert_eq!(rec.dpoin, 1.0);
        assert_eq!(rec.expansion_sum, 0.0);
    }

    #[test]
    fn dpoin_cubic_proxy() {
        let rec = dpoin(&q(0.1, 0.2, 0.3, 0.4), &CubicProxy, 1).unwrap();
        assert!((rec.poin_before - 0.75).abs() < 1e-15);
        let after = (0.019 * 0.063) / (0.026 * 0.056);
        assert!((rec.poin_after - after).abs() < 1e-12);
        assert!((rec.dpoin - after / 0.75).abs() < 1e-12);
        assert!(rec.dpoin > 1.0);
        assert!((rec.poin_after - 0.8221).abs() < 1e-4);
    }

    #[test]
    fn dpoin_rejects_critical_point() {
        assert!(dpoin(&q(-0.1, 0.0, 0.1, 0.2), &CubicProxy, 1).is_err());
    }

    #[test]
    fn poin_integral_closed_forms() {
        let v = poin_integral(&q(0.0, 0.25, 0.5, 1.0)).unwrap();
        assert!((v - 1.5f64.ln()).abs() < 1e-8);
        let v = poin_integral(&q(0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0)).unwrap();
        assert!((v + 0.75f64.ln()).abs() < 1e-8);
        let v = poin_integral(&q(0.0, 1e-9, 0.5, 1.0)).unwrap();
        assert!(v.abs() < 1e-8);
    }

    #[test]
    fn log_dpoin_matches_integral_formula() {
        let quad = q(0.1, 0.2, 0.3, 0.4);
        let direct = dpoin(&quad, &CubicProxy, 1).unwrap().dpoin.ln();
        let integral = log_dpoin_integral(&CubicProxy, &quad).unwrap();
        assert!((direct - integral).abs() < 1e-7);
        let sine = CircleMap::critical_sine(0.6066);
        let quad = q(0.2, 0.3, 0.45, 0.7);
        let direct = dpoin(&quad, &sine, 1).unwrap().dpoin.ln();
        let integral = log_dpoin_integral(&sine, &quad).unwrap();
        assert!((direct - integral).abs() < 1e-7);
    }

    #[test]
    fn expansion_terms_outside_u_vanish() {
        let sine = CircleMap::critical_sine(0.6066);
        let t = expansion_terms(&q(0.3, 0.35, 0.4, 0.45), &sine, 1).unwrap();
        assert_eq!(t.sum, 0.0);
        assert!(t.log_dpoin > 0.0);
        let r = CircleMap::rigid_rotation(0.4);
        let t = expansion_terms(&q(0.01, 0.02, 0.03, 0.04), &r, 5).unwrap();
        assert_eq!((t.sum, t.log_dpoin), (0.0, 0.0));
    }

    #[test]
    fn expansion_terms_inside_u() {
        let sine = CircleMap::critical_sine(0.6066);
        let t = expansion_terms(&q(0.01, 0.02, 0.03, 0.04), &sine, 1).unwrap();
        assert_eq!(t.steps_inside_u, 1);
        assert!((t.sum - 0.01 * 0.01 / (0.04 * 0.04)).abs() < 1e-12);
    }

    #[test]
    fn small_sweeps_pass() {
        assert!(identity_sweep(500, 1, Execution::Sequential).passed());
        assert!(quadrature_sweep(5, 1, Execution::Sequential).passed());
        assert!(expansion_sweep("cubic", &CubicProxy, (0.05, 1.0), 200, 3, Execution::Sequential).passed());
        assert!(cubic_integrand_sweep(200, 4, Execution::Sequential).passed());
    }
}
