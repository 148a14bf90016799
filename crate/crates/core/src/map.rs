//! The critical-sine circle-map family, its lift calculus, orbit caches,
//! rotation-number recovery from closest returns and parameter tuning.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::cf::{ContinuedFraction, RotationTarget};
use crate::error::{Error, Result};
use crate::precision::{circle_norm, CompensatedSum, Lift};

const TAU: f64 = 2.0 * PI;

/// Ties closer than this in closest-return detection mean a periodic orbit.
pub const RETURN_TIE_TOLERANCE: f64 = 1e-14;

/// Default radius of the symmetric neighborhood `U` of the critical point.
pub const DEFAULT_U_RADIUS: f64 = 0.1;

/// A smooth one-dimensional map with closed-form derivatives.
pub trait SmoothMap: Sync {
    fn eval(&self, x: f64) -> f64;

    /// `f(x + delta) - f(x)`, evaluated without cancellation where the family
    /// allows it.
    fn eval_diff(&self, x: f64, delta: f64) -> f64 {
        self.eval(x + delta) - self.eval(x)
    }

    fn derivative(&self, x: f64) -> f64;
    fn second_derivative(&self, x: f64) -> f64;
    fn third_derivative(&self, x: f64) -> f64;

    /// `log f'(x)`; `-inf` at a critical point.
    fn log_derivative(&self, x: f64) -> f64 {
        self.derivative(x).ln()
    }

    /// True if the open interval `(a, b)` contains a critical point.
    fn has_critical_inside(&self, a: f64, b: f64) -> bool;

    /// True if `[a, b]` lies in the symmetric neighborhood `U` of a critical
    /// point. Maps without a designated `U` return false.
    fn inside_u(&self, _a: f64, _b: f64) -> bool {
        false
    }

    /// Distance from `x` to the nearest critical point (infinite if none).
    fn critical_distance(&self, x: f64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    CriticalSine,
    RigidRotation,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "critical-sine" => Ok(Family::CriticalSine),
            "rigid-rotation" => Ok(Family::RigidRotation),
            other => Err(Error::InvalidArgument(format!("unknown family {other:?}"))),
        }
    }
}

/// Degree-one lift `x + omega - sin(2 pi x) / (2 pi)` (critical sine) or
/// `x + omega` (rigid rotation). The critical point of the sine family is 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircleMap {
    pub family: Family,
    pub omega: f64,
    /// Trailing part of `omega` (nonzero only for rotations by a
    /// double-double rotation number).
    #[serde(default)]
    pub omega_lo: f64,
    pub u_radius: f64,
}

impl CircleMap {
    pub fn critical_sine(omega: f64) -> Self {
        Self { family: Family::CriticalSine, omega, omega_lo: 0.0, u_radius: DEFAULT_U_RADIUS }
    }

    /// Rigid rotation; `U` is empty.
    pub fn rigid_rotation(omega: f64) -> Self {
        Self { family: Family::RigidRotation, omega, omega_lo: 0.0, u_radius: 0.0 }
    }

    pub fn rotation_by(target: &RotationTarget) -> Self {
        let v = target.rho().value();
        Self { omega_lo: v.lo, ..Self::rigid_rotation(v.hi) }
    }

    pub fn with_u_radius(mut self, r: f64) -> Self {
        self.u_radius = r;
        self
    }

    pub fn critical_point(&self) -> Option<f64> {
        match self.family {
            Family::CriticalSine => Some(0.0),
            Family::RigidRotation => None,
        }
    }

    /// Advances a lift by one step with compensated summation.
    pub fn step(&self, x: Lift) -> Lift {
        let u = x.frac;
        let mut acc = CompensatedSum::new();
        acc.add(u);
        acc.add(x.carry);
        acc.add(self.omega);
        acc.add(self.omega_lo);
        if self.family == Family::CriticalSine {
            acc.add(-(TAU * u).sin() / TAU);
        }
        let (hi, lo) = acc.parts();
        Lift::normalized(x.turns, hi, lo)
    }

    /// `F^n(x)` on the lift.
    pub fn iterate(&self, x: Lift, n: u64) -> Lift {
        (0..n).fold(x, |y, _| self.step(y))
    }
}

impl SmoothMap for CircleMap {
    fn eval(&self, x: f64) -> f64 {
        match self.family {
            Family::CriticalSine => x + self.omega - (TAU * x).sin() / TAU,
            Family::RigidRotation => x + self.omega,
        }
    }

    fn eval_diff(&self, x: f64, delta: f64) -> f64 {
        match self.family {
            // sin(A) - sin(B) = 2 cos((A+B)/2) sin((A-B)/2)
            Family::CriticalSine => delta - (TAU * x + PI * delta).cos() * (PI * delta).sin() / PI,
            Family::RigidRotation => delta,
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        match self.family {
            // 1 - cos(2 pi x) = 2 sin^2(pi x), no cancellation near 0
            Family::CriticalSine => {
                let s = (PI * x).sin();
                2.0 * s * s
            }
            Family::RigidRotation => 1.0,
        }
    }

    fn second_derivative(&self, x: f64) -> f64 {
        match self.family {
            Family::CriticalSine => TAU * (TAU * x).sin(),
            Family::RigidRotation => 0.0,
        }
    }

    fn third_derivative(&self, x: f64) -> f64 {
        match self.family {
            Family::CriticalSine => TAU * TAU * (TAU * x).cos(),
            Family::RigidRotation => 0.0,
        }
    }

    fn log_derivative(&self, x: f64) -> f64 {
        match self.family {
            Family::CriticalSine => 2.0_f64.ln() + 2.0 * (PI * x).sin().abs().ln(),
            Family::RigidRotation => 0.0,
        }
    }

    fn has_critical_inside(&self, a: f64, b: f64) -> bool {
        match self.family {
            Family::CriticalSine => a.floor() + 1.0 < b,
            Family::RigidRotation => false,
        }
    }

    fn inside_u(&self, a: f64, b: f64) -> bool {
        if self.u_radius <= 0.0 || self.critical_point().is_none() {
            return false;
        }
        let m = ((a + b) / 2.0).round();
        (a - m).abs() < self.u_radius && (b - m).abs() < self.u_radius
    }

    fn critical_distance(&self, x: f64) -> f64 {
        match self.family {
            Family::CriticalSine => circle_norm(x),
            Family::RigidRotation => f64::INFINITY,
        }
    }
}

/// The cubic `x -> x^3` on the real line, a local model of the critical
/// point. Not a circle map.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CubicProxy;

impl SmoothMap for CubicProxy {
    fn eval(&self, x: f64) -> f64 {
        x * x * x
    }

    fn eval_diff(&self, x: f64, delta: f64) -> f64 {
        delta * (3.0 * x * x + 3.0 * x * delta + delta * delta)
    }

    fn derivative(&self, x: f64) -> f64 {
        3.0 * x * x
    }

    fn second_derivative(&self, x: f64) -> f64 {
        6.0 * x
    }

    fn third_derivative(&self, _x: f64) -> f64 {
        6.0
    }

    fn log_derivative(&self, x: f64) -> f64 {
        3.0_f64.ln() + 2.0 * x.abs().ln()
    }

    fn has_critical_inside(&self, a: f64, b: f64) -> bool {
        a < 0.0 && 0.0 < b
    }

    fn critical_distance(&self, x: f64) -> f64 {
        x.abs()
    }
}

/// `Sf = f'''/f' - (3/2) (f''/f')^2`.
pub fn schwarzian<M: SmoothMap + ?Sized>(map: &M, x: f64) -> Result<f64> {
    let d1 = map.derivative(x);
    if d1 == 0.0 {
        return Err(Error::CriticalPoint(format!("Schwarzian undefined at x = {x}")));
    }
    let ratio = map.second_derivative(x) / d1;
    Ok(map.third_derivative(x) / d1 - 1.5 * ratio * ratio)
}

/// `int_a^b f''/f' dx = log f'(b) - log f'(a)`.
pub fn nonlinearity_integral<M: SmoothMap + ?Sized>(map: &M, a: f64, b: f64) -> Result<f64> {
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    if map.has_critical_inside(lo, hi) || map.derivative(lo) == 0.0 || map.derivative(hi) == 0.0 {
        return Err(Error::CriticalPoint(format!("interval ({a}, {b}) contains a critical point")));
    }
    Ok(map.log_derivative(b) - map.log_derivative(a))
}

/// Iterates of a base point, `f^k(base)` for `k = 0..=len`, stored as lifts.
#[derive(Debug, Clone)]
pub struct OrbitCache {
    base: Lift,
    points: Vec<Lift>,
    monotone: Vec<bool>,
}

impl OrbitCache {
    pub fn new(map: &CircleMap, base: f64, len: usize) -> Self {
        let base = Lift::from_f64(base);
        let mut points = Vec::with_capacity(len + 1);
        let mut monotone = Vec::with_capacity(len + 1);
        points.push(base);
        monotone.push(true);
        let mut x = base;
        for _ in 0..len {
            let y = map.step(x);
            monotone.push(y.offset_from(x, 0) >= 0.0);
            points.push(y);
            x = y;
        }
        Self { base, points, monotone }
    }

    pub fn base(&self) -> Lift {
        self.base
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, k: usize) -> Lift {
        self.points[k]
    }

    pub fn points(&self) -> &[Lift] {
        &self.points
    }

    /// True if every step advanced the lift (nondecreasing lift).
    pub fn all_monotone(&self) -> bool {
        self.monotone.iter().all(|&m| m)
    }
}

/// Initial interval and its forward images `(a_i, b_i) = f^i(a_0, b_0)`,
/// `i = 0..=m`, as lift values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChainDescriptor {
    pub intervals: Vec<(f64, f64)>,
    pub order_of_size: Option<usize>,
}

impl ChainDescriptor {
    /// Builds the chain and checks it: pairwise disjoint on the circle, no
    /// interval containing the critical point.
    pub fn build(map: &CircleMap, a0: f64, b0: f64, m: usize) -> Result<Self> {
        if !(b0 > a0) || b0 - a0 >= 1.0 {
            return Err(Error::InvalidArgument(format!("bad initial interval ({a0}, {b0})")));
        }
        let mut intervals = Vec::with_capacity(m + 1);
        let (mut a, mut len) = (a0, b0 - a0);
        for i in 0..=m {
            let shifted = a - a.floor();
            if map.has_critical_inside(shifted, shifted + len) {
                return Err(Error::CriticalPoint(format!("chain interval {i} contains the critical point")));
            }
            intervals.push((shifted, shifted + len));
            if i < m {
                len = map.eval_diff(a, len);
                a = map.eval(a);
            }
        }
        let chain = Self { intervals, order_of_size: None };
        chain.check_disjoint()?;
        Ok(chain)
    }

    pub fn with_order_of_size(mut self, j: usize) -> Self {
        self.order_of_size = Some(j);
        self
    }

    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    fn check_disjoint(&self) -> Result<()> {
        let mut iv = self.intervals.clone();
        iv.sort_by(|x, y| x.0.total_cmp(&y.0));
        let n = iv.len();
        for i in 0..n {
            let (_, end) = iv[i];
            let next_start = if i + 1 < n { iv[i + 1].0 } else { iv[0].0 + 1.0 };
            if n > 1 && end > next_start + 1e-12 {
                return Err(Error::Structure {
                    level: 0,
                    detail: format!("chain intervals overlap near {next_start}"),
                });
            }
        }
        Ok(())
    }
}

/// `|sum of nonlinearity integrals over chain intervals not contained in
/// U_j|`, where `U_j` is the symmetric neighborhood of the critical point of
/// radius `u_radius`.
pub fn pure_singularity_sum(map: &CircleMap, chain: &ChainDescriptor, u_radius: f64) -> Result<f64> {
    let mut acc = CompensatedSum::new();
    for &(a, b) in &chain.intervals {
        let m = ((a + b) / 2.0).round();
        let inside = (a - m).abs() < u_radius && (b - m).abs() < u_radius;
        if !inside {
            acc.add(nonlinearity_integral(map, a, b)?);
        }
    }
    Ok(acc.value().abs())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Side {
    Ccw,
    Cw,
}

/// Recovers `a_1..a_depth` from the closest returns of the critical orbit.
///
/// Closest returns are read off as one-sided records of the orbit of 0: a new
/// nearest point counter-clockwise (smallest position) or clockwise (largest
/// position). Records come in same-side runs; the last record of each run is a
/// closest return `q_n`. The first iterate opens the clockwise run and
/// `q_0 = 1`.
pub fn estimate_rotation_cf(map: &CircleMap, depth: usize, k_max: usize) -> Result<ContinuedFraction> {
    let base = map.critical_point().unwrap_or(0.0);
    let mut x = Lift::from_f64(base);
    let mut q: Vec<u64> = vec![1];
    let (mut ccw_best, mut cw_best) = (f64::INFINITY, f64::NEG_INFINITY);
    let mut run: Option<(Side, u64)> = None;
    let partial = |q: &[u64]| coefficients_from_returns(q);

    for k in 1..=k_max as u64 {
        x = map.step(x);
        let u = x.frac - base.rem_euclid(1.0);
        let u = u - u.floor();
        if !(RETURN_TIE_TOLERANCE..=1.0 - RETURN_TIE_TOLERANCE).contains(&u) {
            return Err(Error::RationalRotation { level: q.len() });
        }
        if (u - ccw_best).abs() < RETURN_TIE_TOLERANCE || (u - cw_best).abs() < RETURN_TIE_TOLERANCE {
            return Err(Error::RationalRotation { level: q.len() });
        }
        let side = if k == 1 {
            ccw_best = u;
            cw_best = u;
            Some(Side::Cw)
        } else if u < ccw_best {
            ccw_best = u;
            Some(Side::Ccw)
        } else if u > cw_best {
            cw_best = u;
            Some(Side::Cw)
        } else {
            None
        };
        let Some(side) = side else { continue };
        match run {
            Some((s, _)) if s == side => run = Some((side, k)),
            Some((_, last)) => {
                q.push(last);
                if q.len() > depth {
                    let a = coefficients_from_returns(&q)?;
                    return ContinuedFraction::from_coefficients(a[..depth].to_vec());
                }
                run = Some((side, k));
            }
            None => run = Some((side, k)),
        }
    }
    Err(Error::OrbitBudget { budget: k_max, partial: partial(&q).unwrap_or_default() })
}

/// `a_1 = q_1`, `a_{n+1} = (q_{n+1} - q_{n-1}) / q_n`, given `q_0, q_1, ...`.
fn coefficients_from_returns(q: &[u64]) -> Result<Vec<u64>> {
    let mut a = Vec::with_capacity(q.len());
    for n in 1..q.len() {
        let prev = if n >= 2 { q[n - 2] } else { 0 };
        let num = q[n].checked_sub(prev).filter(|v| v % q[n - 1] == 0);
        match num {
            Some(v) if v > 0 => a.push(v / q[n - 1]),
            _ => {
                return Err(Error::Structure {
                    level: n,
                    detail: format!("closest returns {q:?} violate the recurrence"),
                })
            }
        }
    }
    Ok(a)
}

/// Orbit length sufficient for [`estimate_rotation_cf`] to reach `depth`
/// levels of `target`.
pub fn orbit_length_for(target: &RotationTarget, depth: usize) -> usize {
    let d = (depth + 1).min(target.depth());
    (2 * target.q(d) + target.q(d - 1) + 16) as usize
}

/// Where the rotation number of a map sits relative to a target.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Placement {
    Below { matched: usize },
    Above { matched: usize },
    Matched,
}

/// Compares `rho(map)` with the target through the signs of
/// `F^{q_L}(0) - p_L`, `L = 1..=levels`.
fn place(map: &CircleMap, target: &RotationTarget, levels: usize) -> Placement {
    let start = Lift::from_f64(map.critical_point().unwrap_or(0.0));
    let mut x = start;
    let mut done = 0u64;
    for level in 1..=levels {
        let (p, q) = (target.p(level), target.q(level));
        x = map.iterate(x, q - done);
        done = q;
        let d = x.offset_from(start, p as i64);
        let even = level % 2 == 0;
        // even levels: p/q < rho_target; odd levels: p/q > rho_target
        if d.abs() < RETURN_TIE_TOLERANCE {
            return if even { Placement::Below { matched: level - 1 } } else { Placement::Above { matched: level - 1 } };
        }
        if even && d < 0.0 {
            return Placement::Below { matched: level - 1 };
        }
        if !even && d > 0.0 {
            return Placement::Above { matched: level - 1 };
        }
    }
    Placement::Matched
}

/// Result of [`tune_parameter`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TunedMap {
    pub map: CircleMap,
    pub omega_bracket: (f64, f64),
    pub matched_depth: usize,
    pub bisection_steps: usize,
}

/// Bisection on `omega` until the map's closest-return combinatorics agree
/// with `target` to `depth` levels. The rigid rotation is tuned exactly.
pub fn tune_parameter(
    family: Family,
    target: &RotationTarget,
    depth: usize,
    bracket_floor: f64,
) -> Result<TunedMap> {
    target.require(depth + 1)?;
    if family == Family::RigidRotation {
        let map = CircleMap::rotation_by(target);
        return Ok(TunedMap { map, omega_bracket: (map.omega, map.omega), matched_depth: depth, bisection_steps: 0 });
    }
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let mut deepest = 0;
    let mut steps = 0;
    while hi - lo > bracket_floor {
        let mid = 0.5 * (lo + hi);
        steps += 1;
        let map = CircleMap::critical_sine(mid);
        match place(&map, target, depth + 1) {
            Placement::Below { matched } => {
                deepest = deepest.max(matched);
                lo = mid;
            }
            Placement::Above { matched } => {
                deepest = deepest.max(matched);
                hi = mid;
            }
            Placement::Matched => {
                let cf = estimate_rotation_cf(&map, depth, orbit_length_for(target, depth))?;
                if cf.coefficients() != target.cf().prefix(depth) {
                    return Err(Error::Structure {
                        level: depth,
                        detail: format!("closest returns {:?} disagree with the bracket test", cf.coefficients()),
                    });
                }
                return Ok(TunedMap { map, omega_bracket: (lo, hi), matched_depth: depth, bisection_steps: steps });
            }
        }
    }
    Err(Error::TuningFailed { width: hi - lo, matched: deepest })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::RotationNumber;

    #[test]
    fn derivatives_at_special_points() {
        let f = CircleMap::critical_sine(0.3);
        assert_eq!(f.derivative(0.0), 0.0);
        assert_eq!(f.second_derivative(0.0), 0.0);
        assert!(f.third_derivative(0.0) != 0.0);
        assert!((f.derivative(0.5) - 2.0).abs() < 1e-15);
        let r = CircleMap::rigid_rotation(0.3);
        assert_eq!(r.derivative(0.123), 1.0);
    }

    #[test]
    fn schwarzian_values() {
        let r = CircleMap::rigid_rotation(0.3);
        assert_eq!(schwarzian(&r, 0.7).unwrap(), 0.0);
        let f = CircleMap::critical_sine(0.3);
        // closed form -2 pi^2 (3 + cos 2 pi x) / (1 - cos 2 pi x) at x = 1/2
        assert!((schwarzian(&f, 0.5).unwrap() + 2.0 * PI * PI).abs() < 1e-12);
        assert!((schwarzian(&CubicProxy, 0.1).unwrap() + 400.0).abs() < 1e-9);
        assert!(schwarzian(&f, 0.0).is_err());
        assert!(schwarzian(&CubicProxy, 0.0).is_err());
    }

    #[test]
    fn nonlinearity_closed_forms() {
        assert!((nonlinearity_integral(&CubicProxy, 0.1, 0.2).unwrap() - 4f64.ln()).abs() < 1e-12);
        let r = CircleMap::rigid_rotation(0.3);
        assert_eq!(nonlinearity_integral(&r, 0.2, 0.9).unwrap(), 0.0);
        let f = CircleMap::critical_sine(0.3);
        assert!((nonlinearity_integral(&f, 0.25, 0.5).unwrap() - 2f64.ln()).abs() < 1e-12);
        assert!(nonlinearity_integral(&f, -0.1, 0.1).is_err());
        assert!(nonlinearity_integral(&f, 0.9, 1.1).is_err());
    }

    #[test]
    fn eval_diff_matches_direct() {
        let f = CircleMap::critical_sine(0.606);
        for &(x, d) in &[(0.1, 0.2), (0.7, 1e-3), (-0.3, 0.05)] {
            let direct = f.eval(x + d) - f.eval(x);
            assert!((f.eval_diff(x, d) - direct).abs() < 1e-14);
        }
        assert!((CubicProxy.eval_diff(0.2, 0.1) - (0.027 - 0.008)).abs() < 1e-15);
    }

    #[test]
    fn step_matches_eval() {
        let f = CircleMap::critical_sine(0.606);
        let mut x = Lift::from_f64(0.0);
        let mut y = 0.0;
        for _ in 0..20 {
            x = f.step(x);
            y = f.eval(y);
            assert!((x.to_f64() - y).abs() < 1e-12);
        }
    }

    #[test]
    fn orbit_cache_reproduces_steps() {
        let f = CircleMap::critical_sine(0.606);
        let orbit = OrbitCache::new(&f, 0.0, 500);
        assert_eq!(orbit.len(), 501);
        assert!(orbit.all_monotone());
        for k in 1..orbit.len() {
            let prev = orbit.point(k - 1);
            let re = f.step(Lift { carry: 0.0, ..prev });
            let d = re.offset_from(orbit.point(k), 0).abs();
            assert!(d <= 2.0 * f64::EPSILON, "k = {k}, d = {d:e}");
        }
    }

    #[test]
    fn rotation_cf_for_rotations() {
        let g = RotationTarget::golden(30).unwrap();
        let cf = estimate_rotation_cf(&CircleMap::rotation_by(&g), 20, 100_000).unwrap();
        assert_eq!(cf.coefficients(), &[1; 20][..]);
        let s = RotationTarget::silver(20).unwrap();
        let cf = estimate_rotation_cf(&CircleMap::rotation_by(&s), 12, 100_000).unwrap();
        assert_eq!(cf.coefficients(), &[2; 12][..]);
    }

    #[test]
    fn rotation_cf_general_prefix() {
        let cf = ContinuedFraction::from_coefficients(vec![3, 1, 4, 1, 5, 2, 6, 1, 1, 2, 3, 1, 2, 2, 2, 1, 3]).unwrap();
        let rho = RotationNumber::from_cf(&cf).unwrap();
        let target = RotationTarget::new(cf.clone(), rho, 14).unwrap();
        let got = estimate_rotation_cf(&CircleMap::rotation_by(&target), 12, 1_000_000).unwrap();
        assert_eq!(got.coefficients(), cf.prefix(12));
    }

    #[test]
    fn rational_rotation_aborts() {
        let r = CircleMap::rigid_rotation(0.4);
        assert!(matches!(estimate_rotation_cf(&r, 5, 1000), Err(Error::RationalRotation { .. })));
        // critical sine locked at rotation 0 for small omega
        let f = CircleMap::critical_sine(0.01);
        assert!(matches!(estimate_rotation_cf(&f, 5, 10_000), Err(Error::RationalRotation { .. })));
    }

    #[test]
    fn budget_exhaustion_reports_partial() {
        let g = RotationTarget::golden(30).unwrap();
        match estimate_rotation_cf(&CircleMap::rotation_by(&g), 20, 50) {
            Err(Error::OrbitBudget { budget, partial }) => {
                assert_eq!(budget, 50);
                assert!(!partial.is_empty() && partial.iter().all(|&a| a == 1));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rigid_rotation_tunes_to_identity() {
        let g = RotationTarget::golden(30).unwrap();
        let t = tune_parameter(Family::RigidRotation, &g, 12, 1e-15).unwrap();
        assert_eq!(t.map.omega, g.rho().to_f64());
    }

    #[test]
    fn critical_sine_tunes_to_golden() {
        let g = RotationTarget::golden(30).unwrap();
        let t = tune_parameter(Family::CriticalSine, &g, 12, 1e-15).unwrap();
        assert!((t.map.omega - 0.6066).abs() < 1e-3, "omega = {}", t.map.omega);
        let cf = estimate_rotation_cf(&t.map, 12, orbit_length_for(&g, 12)).unwrap();
        assert_eq!(cf.coefficients(), &[1; 12][..]);
    }

    #[test]
    fn chain_checks() {
        let f = CircleMap::critical_sine(0.3);
        assert!(ChainDescriptor::build(&f, -0.1, 0.1, 0).is_err());
        let r = CircleMap::rigid_rotation(0.5);
        // rotation by 1/2 maps (0.1, 0.7) onto an overlapping arc
        assert!(ChainDescriptor::build(&r, 0.1, 0.7, 1).is_err());
        let c = ChainDescriptor::build(&r, 0.1, 0.3, 1).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(pure_singularity_sum(&r, &c, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn chain_inside_u_contributes_nothing() {
        let f = CircleMap::critical_sine(0.6066);
        let c = ChainDescriptor::build(&f, 0.01, 0.02, 0).unwrap();
        assert_eq!(pure_singularity_sum(&f, &c, 0.1).unwrap(), 0.0);
        assert!(pure_singularity_sum(&f, &c, 0.015).unwrap() > 0.0);
    }

    #[test]
    fn family_parsing() {
        assert_eq!("critical-sine".parse::<Family>().unwrap(), Family::CriticalSine);
        assert!("logistic".parse::<Family>().is_err());
    }
}
