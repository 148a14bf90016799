//! Dynamical partitions `B(n; f)` built from the orbit of the critical point,
//! their refinement structure, order of size and bounded-geometry
//! statistics.

use serde::{Deserialize, Serialize};

use crate::cf::RotationTarget;
use crate::error::{Error, Result};
use crate::map::{CircleMap, OrbitCache};
use crate::precision::{compensated_sum, Lift, PRECISION_CUTOFF};

/// Two distinct endpoints closer than this abort the construction.
pub const ENDPOINT_TOLERANCE: f64 = 1e-12;

/// Tolerance on the total length of a partition.
pub const TILING_TOLERANCE: f64 = 1e-10;

/// Longest critical orbit a partition may request.
pub const ORBIT_BUDGET: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AtomLabel {
    Short,
    Lengthy,
}

/// One atom `f^k(base)`, stored counter-clockwise from `start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub start: f64,
    /// `start + length`; equals 1 for the atom closing the circle.
    pub end: f64,
    pub length: f64,
    pub label: AtomLabel,
    pub k: usize,
    /// Orbit indices of the endpoints.
    #[serde(skip)]
    pub start_index: usize,
    #[serde(skip)]
    pub end_index: usize,
}

impl Atom {
    pub fn contains(&self, x: f64) -> bool {
        self.start <= x && x < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DynamicalPartition {
    pub level: usize,
    pub q_prev: u64,
    pub q: u64,
    /// Sorted by `start`; the first atom starts at the critical point.
    pub atoms: Vec<Atom>,
}

impl DynamicalPartition {
    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn count(&self, label: AtomLabel) -> usize {
        self.atoms.iter().filter(|a| a.label == label).count()
    }

    pub fn total_length(&self) -> f64 {
        compensated_sum(self.atoms.iter().map(|a| a.length))
    }

    pub fn min_length(&self) -> f64 {
        self.atoms.iter().map(|a| a.length).fold(f64::INFINITY, f64::min)
    }

    pub fn max_length(&self) -> f64 {
        self.atoms.iter().map(|a| a.length).fold(0.0, f64::max)
    }

    /// Index of the atom containing `x` (reduced mod 1), left-closed.
    pub fn locate(&self, x: f64) -> usize {
        let x = x - x.floor();
        let i = self.atoms.partition_point(|a| a.start <= x);
        i.saturating_sub(1)
    }

    /// Range of atoms of `self` (a finer partition) lying inside `atom`.
    pub fn children_of(&self, atom: &Atom) -> std::ops::Range<usize> {
        let tol = ENDPOINT_TOLERANCE;
        let lo = self.atoms.partition_point(|a| a.start < atom.start - tol);
        let hi = self.atoms.partition_point(|a| a.start < atom.end - tol);
        lo..hi
    }
}

/// Assembles `B(n)` from orbit positions and atom lengths.
///
/// Short atoms are `f^k(z, f^{q_n}(z))`, `k < q_{n-1}`, and lie on the side
/// `(-1)^n` of their first endpoint; lengthy atoms are `f^k(z, f^{q_{n-1}}(z))`,
/// `k < q_n`, on the side `(-1)^{n-1}`.
pub(crate) fn build_partition(
    level: usize,
    q_prev: u64,
    q: u64,
    positions: &[f64],
    length_of: impl Fn(AtomLabel, usize) -> f64,
) -> Result<DynamicalPartition> {
    let count = (q + q_prev) as usize;
    if positions.len() < count {
        return Err(Error::Structure { level, detail: format!("need {count} orbit points, have {}", positions.len()) });
    }
    let odd = level % 2 == 1;
    let mut atoms = Vec::with_capacity(count);
    let mut push = |label, k: usize, shift: u64, forward: bool| {
        let (s, e) = if forward { (k, k + shift as usize) } else { (k + shift as usize, k) };
        let length = length_of(label, k);
        let start = positions[s];
        atoms.push(Atom { start, end: start + length, length, label, k, start_index: s, end_index: e });
    };
    for k in 0..q_prev as usize {
        push(AtomLabel::Short, k, q, !odd);
    }
    for k in 0..q as usize {
        push(AtomLabel::Lengthy, k, q_prev, odd);
    }
    atoms.sort_by(|a, b| a.start.total_cmp(&b.start));

    for w in atoms.windows(2) {
        if w[1].start - w[0].start < ENDPOINT_TOLERANCE {
            return Err(Error::DepthExceedsPrecision { level, length: w[1].start - w[0].start });
        }
    }
    let min_len = atoms.iter().map(|a| a.length).fold(f64::INFINITY, f64::min);
    if !(min_len >= PRECISION_CUTOFF) {
        return Err(Error::DepthExceedsPrecision { level, length: min_len });
    }
    for i in 0..count {
        let next = &atoms[(i + 1) % count];
        let atom = &atoms[i];
        if atom.end_index != next.start_index {
            return Err(Error::Structure {
                level,
                detail: format!("atom {:?} k={} is not followed by its endpoint", atom.label, atom.k),
            });
        }
        let gap = next.start + if i + 1 == count { 1.0 } else { 0.0 } - atom.end;
        if gap.abs() > TILING_TOLERANCE {
            return Err(Error::Structure {
                level,
                detail: format!("atom {:?} k={} length disagrees with its endpoints by {gap:e}", atom.label, atom.k),
            });
        }
    }
    let partition = DynamicalPartition { level, q_prev, q, atoms };
    let total = partition.total_length();
    if (total - 1.0).abs() > TILING_TOLERANCE {
        return Err(Error::Structure { level, detail: format!("atoms cover length {total}") });
    }
    Ok(partition)
}

/// Critical orbit long enough for partitions up to `n_max`.
pub fn critical_orbit(map: &CircleMap, target: &RotationTarget, n_max: usize) -> Result<OrbitCache> {
    target.require(n_max)?;
    let count = (target.q(n_max) + target.q(n_max - 1)) as usize;
    if count > ORBIT_BUDGET {
        return Err(Error::OrbitBudget { budget: ORBIT_BUDGET, partial: target.cf().prefix(n_max).to_vec() });
    }
    Ok(OrbitCache::new(map, map.critical_point().unwrap_or(0.0), count - 1))
}

/// `B(n; f)` from the critical orbit of `map`, with the combinatorics of
/// `target`.
pub fn dynamical_partition(map: &CircleMap, target: &RotationTarget, n: usize) -> Result<DynamicalPartition> {
    let orbit = critical_orbit(map, target, n)?;
    dynamical_partition_from_orbit(&orbit, target, n)
}

pub fn dynamical_partition_from_orbit(
    orbit: &OrbitCache,
    target: &RotationTarget,
    n: usize,
) -> Result<DynamicalPartition> {
    target.require(n)?;
    let (q_prev, q) = (target.q(n - 1), target.q(n));
    let count = (q + q_prev) as usize;
    if count > orbit.len() {
        return Err(Error::OrbitBudget { budget: orbit.len(), partial: target.cf().prefix(n).to_vec() });
    }
    let pts = orbit.points();
    let positions: Vec<f64> = pts[..count].iter().map(|x| x.circle()).collect();
    let signed = |k: usize, shift: u64, p: u64| pts[k + shift as usize].offset_from(pts[k], p as i64);
    let short_sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    let mut short = Vec::with_capacity(q_prev as usize);
    for k in 0..q_prev as usize {
        short.push(signed(k, q, target.p(n)) * short_sign);
    }
    let mut lengthy = Vec::with_capacity(q as usize);
    for k in 0..q as usize {
        lengthy.push(-signed(k, q_prev, target.p(n - 1)) * short_sign);
    }
    if let Some(bad) = short.iter().chain(&lengthy).find(|&&l| !(l > 0.0)) {
        return Err(Error::Structure {
            level: n,
            detail: format!("closest return on the wrong side (signed length {bad:e}); map combinatorics differ from the target"),
        });
    }
    build_partition(n, q_prev, q, &positions, |label, k| match label {
        AtomLabel::Short => short[k],
        AtomLabel::Lengthy => lengthy[k],
    })
}

/// Partitions for levels `1..=n_max` from a single orbit.
pub fn partition_tower(map: &CircleMap, target: &RotationTarget, n_max: usize) -> Result<Vec<DynamicalPartition>> {
    let orbit = critical_orbit(map, target, n_max)?;
    (1..=n_max).map(|n| dynamical_partition_from_orbit(&orbit, target, n)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSplit {
    pub label: AtomLabel,
    pub k: usize,
    pub lengthy_children: usize,
    pub short_children: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementReport {
    pub level: usize,
    /// `a_{n+1}`, recovered from the atom counts.
    pub a_next: u64,
    pub splits: Vec<AtomSplit>,
    pub worst_endpoint_mismatch: f64,
}

/// Checks that `fine = B(n+1)` refines `coarse = B(n)`: short atoms are
/// promoted to lengthy ones and lengthy atoms split into `a_{n+1}` lengthy
/// atoms and one short atom.
pub fn refinement_report(coarse: &DynamicalPartition, fine: &DynamicalPartition) -> Result<RefinementReport> {
    let n = coarse.level;
    let bad = |detail: String| Err(Error::Structure { level: n, detail });
    if fine.level != n + 1 || fine.q_prev != coarse.q {
        return bad(format!("levels {} and {} are not consecutive", n, fine.level));
    }
    let diff = fine.q - coarse.q_prev;
    if !diff.is_multiple_of(coarse.q) {
        return bad("atom counts violate the recurrence".into());
    }
    let a_next = diff / coarse.q;
    let tol = TILING_TOLERANCE;
    let mut worst: f64 = 0.0;
    let mut splits = Vec::with_capacity(coarse.len());
    for atom in &coarse.atoms {
        let range = fine.children_of(atom);
        if range.is_empty() {
            return bad(format!("atom {:?} k={} has no children", atom.label, atom.k));
        }
        let children = &fine.atoms[range];
        let first = children.first().unwrap();
        let last = children.last().unwrap();
        let mismatch = (first.start - atom.start).abs().max((last.end - atom.end).abs());
        worst = worst.max(mismatch);
        if mismatch > tol {
            return bad(format!("atom {:?} k={} endpoints off by {mismatch:e}", atom.label, atom.k));
        }
        let lengthy = children.iter().filter(|c| c.label == AtomLabel::Lengthy).count();
        let short = children.len() - lengthy;
        let ok = match atom.label {
            AtomLabel::Short => lengthy == 1 && short == 0,
            AtomLabel::Lengthy => lengthy as u64 == a_next && short == 1,
        };
        if !ok {
            return bad(format!(
                "atom {:?} k={} split into {lengthy} lengthy + {short} short (a_next = {a_next})",
                atom.label, atom.k
            ));
        }
        splits.push(AtomSplit { label: atom.label, k: atom.k, lengthy_children: lengthy, short_children: short });
    }
    Ok(RefinementReport { level: n, a_next, splits, worst_endpoint_mismatch: worst })
}

/// Overlap below this counts as touching when testing returns to an arc.
pub const RETURN_OVERLAP_TOLERANCE: f64 = 1e-12;

/// Order of size of the arc `J = (a, b)` (lift coordinates, `0 < b - a < 1`):
/// `j = max{ i : f^{q_i}(J) and J are disjoint } + 1`.
///
/// Closest-return levels are tested in turn until two consecutive levels fail
/// after the last success; if the orbit budget or target depth runs out
/// first the maximum cannot be certified.
pub fn order_of_size(map: &CircleMap, target: &RotationTarget, a: f64, b: f64) -> Result<usize> {
    let len = b - a;
    if !(len > 0.0) || len >= 1.0 {
        return Err(Error::OrderOfSize(format!("degenerate arc ({a}, {b})")));
    }
    let (mut xa, mut xb) = (Lift::from_f64(a), Lift::from_f64(b));
    let base = Lift::from_f64(a);
    let mut done = 0u64;
    let mut last_pass: Option<usize> = None;
    let mut consecutive_fail = 0;
    for i in 0..=target.depth() {
        let q = target.q(i);
        if q as usize > ORBIT_BUDGET {
            break;
        }
        xa = map.iterate(xa, q - done);
        xb = map.iterate(xb, q - done);
        done = q;
        let img_len = xb.offset_from(xa, 0);
        let shift = xa.offset_from(base, 0).rem_euclid(1.0);
        let disjoint = shift >= len - RETURN_OVERLAP_TOLERANCE && shift + img_len <= 1.0 + RETURN_OVERLAP_TOLERANCE;
        if disjoint {
            last_pass = Some(i);
            consecutive_fail = 0;
        } else {
            consecutive_fail += 1;
        }
        if let (Some(pass), true) = (last_pass, consecutive_fail >= 2) {
            return Ok(pass + 1);
        }
        if last_pass.is_none() && target.theta(i) < len * 1e-3 {
            return Err(Error::OrderOfSize(format!("every closest return re-enters ({a}, {b})")));
        }
    }
    Err(Error::OrderOfSize(match last_pass {
        None => format!("no closest return leaves ({a}, {b})"),
        Some(i) => format!("guard band after level {i} not reached"),
    }))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryStats {
    pub level: usize,
    pub max_length: f64,
    pub min_length: f64,
    pub max_adjacent_ratio: f64,
    /// Atom length over its extreme children at the next level.
    pub min_extreme_child_ratio: Option<f64>,
    pub max_extreme_child_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeometryReport {
    pub levels: Vec<GeometryStats>,
    /// Least-squares slope of `log(max length)` against `n`.
    pub log_max_length_slope: f64,
}

fn level_stats(p: &DynamicalPartition, next: Option<&DynamicalPartition>) -> GeometryStats {
    let n = p.len();
    let max_adjacent_ratio = (0..n)
        .map(|i| {
            let (x, y) = (p.atoms[i].length, p.atoms[(i + 1) % n].length);
            x.max(y) / x.min(y)
        })
        .fold(1.0, f64::max);
    let (mut cmin, mut cmax) = (f64::INFINITY, 0.0_f64);
    if let Some(fine) = next {
        for atom in &p.atoms {
            let kids = &fine.atoms[fine.children_of(atom)];
            for child in [kids.first(), kids.last()].into_iter().flatten() {
                let r = atom.length / child.length;
                cmin = cmin.min(r);
                cmax = cmax.max(r);
            }
        }
    }
    GeometryStats {
        level: p.level,
        max_length: p.max_length(),
        min_length: p.min_length(),
        max_adjacent_ratio,
        min_extreme_child_ratio: next.map(|_| cmin),
        max_extreme_child_ratio: next.map(|_| cmax),
    }
}

/// Least-squares slope of `ys` against `xs`.
pub fn fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Bounded-geometry statistics for levels `1..=n_max`.
pub fn geometry_stats(map: &CircleMap, target: &RotationTarget, n_max: usize) -> Result<GeometryReport> {
    let tower = partition_tower(map, target, n_max)?;
    Ok(geometry_from_tower(&tower))
}

pub fn geometry_from_tower(tower: &[DynamicalPartition]) -> GeometryReport {
    let levels: Vec<GeometryStats> =
        tower.iter().enumerate().map(|(i, p)| level_stats(p, tower.get(i + 1))).collect();
    let xs: Vec<f64> = levels.iter().map(|s| s.level as f64).collect();
    let ys: Vec<f64> = levels.iter().map(|s| s.max_length.ln()).collect();
    let log_max_length_slope = if levels.len() >= 2 { fit_slope(&xs, &ys) } else { f64::NAN };
    GeometryReport { levels, log_max_length_slope }
}

/// Nonlinearity-integral chain of lengthy atoms `k = 1..q_n` of `B(n)`.
///
/// The base atom `k = 0` has the critical point as an endpoint and is left
/// out.
pub fn lengthy_chain(partition: &DynamicalPartition) -> Vec<(f64, f64)> {
    let mut atoms: Vec<&Atom> =
        partition.atoms.iter().filter(|a| a.label == AtomLabel::Lengthy && a.k >= 1).collect();
    atoms.sort_by_key(|a| a.k);
    atoms.iter().map(|a| (a.start, a.end)).collect()
}

/// Closest-return distance `|f^{q_j}(0)|`, the radius of the symmetric
/// neighborhood `U_j` of order `j`.
pub fn u_neighborhood_radius(map: &CircleMap, target: &RotationTarget, j: usize) -> Result<f64> {
    target.require(j.max(1))?;
    let start = Lift::from_f64(map.critical_point().unwrap_or(0.0));
    let x = map.iterate(start, target.q(j));
    Ok(x.offset_from(start, target.p(j) as i64).abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cf::rotation_partition;
    use crate::map::{tune_parameter, Family, SmoothMap};

    fn golden_sine() -> (CircleMap, RotationTarget) {
        let g = RotationTarget::golden(40).unwrap();
        let t = tune_parameter(Family::CriticalSine, &g, 18, 1e-15).unwrap();
        (t.map, g)
    }

    #[test]
    fn rigid_rotation_matches_rotation_partition() {
        for target in [RotationTarget::golden(30).unwrap(), RotationTarget::silver(20).unwrap()] {
            let map = CircleMap::rotation_by(&target);
            for n in 1..=10 {
                let a = dynamical_partition(&map, &target, n).unwrap();
                let b = rotation_partition(&target, n).unwrap();
                assert_eq!(a.len(), b.len());
                for (x, y) in a.atoms.iter().zip(&b.atoms) {
                    assert_eq!((x.label, x.k), (y.label, y.k));
                    assert!((x.start - y.start).abs() < 1e-12);
                    assert!((x.end - y.end).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn critical_sine_level_one() {
        let (map, g) = golden_sine();
        let p = dynamical_partition(&map, &g, 1).unwrap();
        assert_eq!(p.count(AtomLabel::Short), 1);
        assert_eq!(p.count(AtomLabel::Lengthy), 1);
        let f0 = map.eval(0.0);
        let f0 = f0 - f0.floor();
        let mut ends: Vec<f64> = p.atoms.iter().map(|a| a.start).collect();
        ends.sort_by(f64::total_cmp);
        assert_eq!(ends, vec![0.0, f0]);
        // f^2(0) closes the short atom at the next level
        let f2 = map.eval(map.eval(0.0));
        let p2 = dynamical_partition(&map, &g, 2).unwrap();
        assert!(p2.atoms.iter().any(|a| (a.start - (f2 - f2.floor())).abs() < 1e-15));
    }

    #[test]
    fn orbit_budget_enforced() {
        let g = RotationTarget::golden(40).unwrap();
        let map = CircleMap::rotation_by(&g);
        let short = OrbitCache::new(&map, 0.0, 10);
        assert!(matches!(dynamical_partition_from_orbit(&short, &g, 8), Err(Error::OrbitBudget { .. })));
        // q_40 + q_39 exceeds the budget
        assert!(matches!(dynamical_partition(&map, &g, 40), Err(Error::OrbitBudget { .. })));
    }

    #[test]
    fn wrong_combinatorics_rejected() {
        let g = RotationTarget::golden(20).unwrap();
        let map = CircleMap::rigid_rotation(0.61);
        assert!(dynamical_partition(&map, &g, 10).is_err());
    }

    #[test]
    fn golden_refinement_two_to_three() {
        let g = RotationTarget::golden(20).unwrap();
        let r = refinement_report(&rotation_partition(&g, 2).unwrap(), &rotation_partition(&g, 3).unwrap()).unwrap();
        assert_eq!(r.a_next, 1);
        for s in r.splits.iter().filter(|s| s.label == AtomLabel::Lengthy) {
            assert_eq!((s.lengthy_children, s.short_children), (1, 1));
        }
        assert_eq!(r.splits.iter().filter(|s| s.label == AtomLabel::Lengthy).count(), 2);
    }

    #[test]
    fn silver_refinement_one_to_two() {
        let s = RotationTarget::silver(20).unwrap();
        let r = refinement_report(&rotation_partition(&s, 1).unwrap(), &rotation_partition(&s, 2).unwrap()).unwrap();
        assert_eq!(r.a_next, 2);
        for sp in r.splits.iter().filter(|s| s.label == AtomLabel::Lengthy) {
            assert_eq!((sp.lengthy_children, sp.short_children), (2, 1));
        }
    }

    #[test]
    fn critical_sine_refinement_five_to_six() {
        let (map, g) = golden_sine();
        let r = refinement_report(
            &dynamical_partition(&map, &g, 5).unwrap(),
            &dynamical_partition(&map, &g, 6).unwrap(),
        )
        .unwrap();
        assert_eq!(r.a_next, 1);
        assert!(r.splits.iter().all(|s| match s.label {
            AtomLabel::Short => (s.lengthy_children, s.short_children) == (1, 0),
            AtomLabel::Lengthy => (s.lengthy_children, s.short_children) == (1, 1),
        }));
    }

    #[test]
    fn non_consecutive_levels_rejected() {
        let g = RotationTarget::golden(20).unwrap();
        let e = refinement_report(&rotation_partition(&g, 2).unwrap(), &rotation_partition(&g, 4).unwrap());
        assert!(e.is_err());
    }

    #[test]
    fn order_of_size_golden_rotation() {
        let g = RotationTarget::golden(40).unwrap();
        let map = CircleMap::rotation_by(&g);
        assert_eq!(order_of_size(&map, &g, 0.0, 0.1).unwrap(), 4);
        assert!(order_of_size(&map, &g, 0.0, 1.0 - 1e-9).is_err());
    }

    #[test]
    fn locate_is_left_closed() {
        let g = RotationTarget::golden(20).unwrap();
        let p = rotation_partition(&g, 4).unwrap();
        assert_eq!(p.locate(0.0), 0);
        let i = 3;
        assert_eq!(p.locate(p.atoms[i].start), i);
        assert_eq!(p.locate(p.atoms[i].start - 1e-9), i - 1);
        assert_eq!(p.locate(0.999_999_999), p.len() - 1);
    }

    #[test]
    fn rotation_geometry() {
        let g = RotationTarget::golden(30).unwrap();
        let map = CircleMap::rotation_by(&g);
        let rep = geometry_stats(&map, &g, 12).unwrap();
        let inv_rho = 1.0 / g.rho().to_f64();
        for s in &rep.levels {
            assert!(s.max_adjacent_ratio <= inv_rho + 1e-9);
            assert!(s.max_adjacent_ratio >= 1.0);
        }
        assert!((rep.log_max_length_slope - g.rho().to_f64().ln()).abs() < 1e-6);
    }

    #[test]
    fn fit_slope_exact_line() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        let ys = [1.0, 3.0, 5.0, 7.0];
        assert!((fit_slope(&xs, &ys) - 2.0).abs() < 1e-12);
    }
}
