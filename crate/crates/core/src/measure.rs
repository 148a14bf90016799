//! The invariant measure `mu` seen through the conjugacy to the rotation,
//! singularity exponents, the singularity profile and the Hausdorff
//! dimension proxy.
//!
//! The `mu`-mass of an atom of `B(n; f)` is the length of the rotation atom
//! with the same label and orbit index, so no integration of `mu` is ever
//! needed.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cf::{rotation_partition, RotationTarget};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, stream_rng, Execution};
use crate::map::CircleMap;
use crate::partition::{critical_orbit, dynamical_partition_from_orbit, AtomLabel, DynamicalPartition};
use crate::precision::compensated_sum;

/// Number of trailing levels used for the tail statistics.
pub const TAIL_LEVELS: usize = 3;

/// Fraction of `mu` covered by [`singularity_profile`].
pub const PROFILE_MASS: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub label: AtomLabel,
    pub k: usize,
    pub start: f64,
    pub lebesgue_length: f64,
    pub mu_mass: f64,
    /// Start of the paired rotation atom, `phi(start)`.
    pub rotation_start: f64,
}

/// Atoms of `B(n; f)` paired with the atoms of `B(n; rho)` of the same label
/// and index, in circle order from the critical point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConjugacyGrid {
    pub level: usize,
    pub cells: Vec<GridCell>,
    /// `mu_before[i]` is the `mu`-mass of cells `0..i`.
    #[serde(skip)]
    mu_before: Vec<f64>,
}

impl ConjugacyGrid {
    /// Pairs two partitions of the same level, checking that the orbit
    /// indices appear in the same circular order on both sides.
    pub fn pair(map_side: &DynamicalPartition, rotation_side: &DynamicalPartition) -> Result<Self> {
        let level = map_side.level;
        if map_side.len() != rotation_side.len() || rotation_side.level != level {
            return Err(Error::Structure { level, detail: "partitions of different shapes".into() });
        }
        let mut cells = Vec::with_capacity(map_side.len());
        for (f, r) in map_side.atoms.iter().zip(&rotation_side.atoms) {
            if (f.label, f.k) != (r.label, r.k) {
                return Err(Error::Structure {
                    level,
                    detail: format!("conjugacy breaks circular order at {:?} k={} vs {:?} k={}", f.label, f.k, r.label, r.k),
                });
            }
            cells.push(GridCell {
                label: f.label,
                k: f.k,
                start: f.start,
                lebesgue_length: f.length,
                mu_mass: r.length,
                rotation_start: r.start,
            });
        }
        let mut mu_before = Vec::with_capacity(cells.len() + 1);
        let mut acc = 0.0;
        for c in &cells {
            mu_before.push(acc);
            acc += c.mu_mass;
        }
        mu_before.push(acc);
        Ok(Self { level, cells, mu_before })
    }

    pub fn total_mu(&self) -> f64 {
        compensated_sum(self.cells.iter().map(|c| c.mu_mass))
    }

    pub fn total_length(&self) -> f64 {
        compensated_sum(self.cells.iter().map(|c| c.lebesgue_length))
    }

    /// Index of the cell containing `x` (reduced mod 1), left-closed.
    pub fn locate(&self, x: f64) -> usize {
        let x = x - x.floor();
        self.cells.partition_point(|c| c.start <= x).saturating_sub(1)
    }

    /// Lower-sum `M(x)`: the `mu`-mass of cells wholly left of `x`, measured
    /// counter-clockwise from the critical point.
    pub fn distribution(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        if x >= 1.0 {
            return 1.0;
        }
        self.mu_before[self.locate(x)]
    }

    /// Picks a cell with probability `mu_mass` from a uniform `u` in `[0, 1)`.
    fn cell_for_mass(&self, u: f64) -> usize {
        let total = self.mu_before[self.cells.len()];
        let target = u * total;
        self.mu_before[1..].partition_point(|&m| m <= target).min(self.cells.len() - 1)
    }

    pub fn max_mu(&self) -> f64 {
        self.cells.iter().map(|c| c.mu_mass).fold(0.0, f64::max)
    }
}

/// The grid of `map` at level `n`.
pub fn conjugacy_grid(map: &CircleMap, target: &RotationTarget, n: usize) -> Result<ConjugacyGrid> {
    let orbit = critical_orbit(map, target, n)?;
    ConjugacyGrid::pair(&dynamical_partition_from_orbit(&orbit, target, n)?, &rotation_partition(target, n)?)
}

/// Grids for levels `1..=n_max` from one critical orbit.
pub fn conjugacy_tower(map: &CircleMap, target: &RotationTarget, n_max: usize) -> Result<Vec<ConjugacyGrid>> {
    let orbit = critical_orbit(map, target, n_max)?;
    (1..=n_max)
        .map(|n| ConjugacyGrid::pair(&dynamical_partition_from_orbit(&orbit, target, n)?, &rotation_partition(target, n)?))
        .collect()
}

/// `M(x)` at level `n`; the error is at most the largest atom mass.
pub fn distribution(map: &CircleMap, target: &RotationTarget, x: f64, n: usize) -> Result<f64> {
    Ok(conjugacy_grid(map, target, n)?.distribution(x))
}

/// `r_n(x) = log mu(Box^n_x) / log |Box^n_x|` over the given grids.
pub fn exponent_sequence_in(grids: &[ConjugacyGrid], x: f64) -> Vec<f64> {
    grids
        .iter()
        .map(|g| {
            let c = &g.cells[g.locate(x)];
            c.mu_mass.ln() / c.lebesgue_length.ln()
        })
        .collect()
}

/// `r_n(x)` for `n = n_min..=n_max`. A point on an atom endpoint belongs
/// to the atom that starts there.
pub fn exponent_sequence(
    map: &CircleMap,
    target: &RotationTarget,
    x: f64,
    n_min: usize,
    n_max: usize,
) -> Result<Vec<f64>> {
    let n_min = n_min.max(1);
    let tower = conjugacy_tower(map, target, n_max)?;
    Ok(exponent_sequence_in(&tower[n_min - 1..], x))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMeasure {
    Lebesgue,
    Mu,
}

impl SamplingMeasure {
    pub fn name(self) -> &'static str {
        match self {
            SamplingMeasure::Lebesgue => "lebesgue",
            SamplingMeasure::Mu => "mu",
        }
    }
}

/// Cross-sample quantiles of `r_n` at one level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelQuantiles {
    pub level: usize,
    pub mean: f64,
    pub q05: f64,
    pub q25: f64,
    pub q50: f64,
    pub q75: f64,
    pub q95: f64,
}

impl LevelQuantiles {
    fn from_values(level: usize, mut v: Vec<f64>) -> Self {
        v.sort_by(f64::total_cmp);
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let q = |p: f64| {
            let pos = p * (v.len() - 1) as f64;
            let (lo, frac) = (pos.floor() as usize, pos.fract());
            if lo + 1 < v.len() { v[lo] * (1.0 - frac) + v[lo + 1] * frac } else { v[lo] }
        };
        Self { level, mean, q05: q(0.05), q25: q(0.25), q50: q(0.5), q75: q(0.75), q95: q(0.95) }
    }

    fn map(self, f: impl Fn(f64) -> f64) -> Self {
        // f is decreasing, so quantiles swap ends
        Self {
            level: self.level,
            mean: f(self.mean),
            q05: f(self.q95),
            q25: f(self.q75),
            q50: f(self.q50),
            q75: f(self.q25),
            q95: f(self.q05),
        }
    }
}

/// Finite-depth exponent statistics. `tail_max` and `tail_min` average the
/// per-sample max and min of `r_n` over the last [`TAIL_LEVELS`] levels; they
/// stand in for `limsup` and `liminf`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExponentEstimate {
    pub sampling_measure: SamplingMeasure,
    /// True for the reciprocal (`gamma`) exponents.
    pub reciprocal: bool,
    pub n_min: usize,
    pub n_max: usize,
    pub seed: u64,
    pub points: Vec<f64>,
    /// `sequences[i][n - n_min]` is `r_n` of sample `i`.
    pub sequences: Vec<Vec<f64>>,
    pub mean_final: f64,
    /// Mean of `r_n` over samples and the last [`TAIL_LEVELS`] levels.
    pub tail_mean: f64,
    pub tail_max: f64,
    pub tail_min: f64,
    pub quantiles: Vec<LevelQuantiles>,
}

impl ExponentEstimate {
    fn from_sequences(
        sampling_measure: SamplingMeasure,
        n_min: usize,
        n_max: usize,
        seed: u64,
        points: Vec<f64>,
        sequences: Vec<Vec<f64>>,
    ) -> Self {
        let count = sequences.len() as f64;
        let width = n_max + 1 - n_min;
        let tail = width.min(TAIL_LEVELS);
        let mean_final = sequences.iter().map(|s| s[width - 1]).sum::<f64>() / count;
        let tail_max = sequences.iter().map(|s| s[width - tail..].iter().copied().fold(f64::MIN, f64::max)).sum::<f64>() / count;
        let tail_min = sequences.iter().map(|s| s[width - tail..].iter().copied().fold(f64::MAX, f64::min)).sum::<f64>() / count;
        let tail_mean = sequences.iter().map(|s| s[width - tail..].iter().sum::<f64>()).sum::<f64>() / (count * tail as f64);
        let quantiles = (0..width)
            .map(|j| LevelQuantiles::from_values(n_min + j, sequences.iter().map(|s| s[j]).collect()))
            .collect();
        Self {
            sampling_measure,
            reciprocal: false,
            n_min,
            n_max,
            seed,
            points,
            sequences,
            mean_final,
            tail_mean,
            tail_max,
            tail_min,
            quantiles,
        }
    }

    /// Per-level cross-sample means.
    pub fn level_means(&self) -> Vec<f64> {
        self.quantiles.iter().map(|q| q.mean).collect()
    }

    /// Mean distance of the level means from 1 over the first and the last
    /// `k` levels; a trace drifting back toward 1 has `last < first`.
    pub fn edge_distances(&self, k: usize) -> (f64, f64) {
        let d: Vec<f64> = self.level_means().iter().map(|m| (m - 1.0).abs()).collect();
        let k = k.min(d.len()).max(1);
        let avg = |s: &[f64]| s.iter().sum::<f64>() / s.len() as f64;
        (avg(&d[..k]), avg(&d[d.len() - k..]))
    }
}

/// Samples `count` points by `measure` and records their exponent sequences
/// over `n_min..=n_max`. Sample `i` draws from its own seeded stream.
#[allow(clippy::too_many_arguments)]
pub fn estimate_exponents(
    map: &CircleMap,
    target: &RotationTarget,
    measure: SamplingMeasure,
    count: usize,
    n_min: usize,
    n_max: usize,
    seed: u64,
    exec: Execution,
) -> Result<ExponentEstimate> {
    let tower = conjugacy_tower(map, target, n_max)?;
    estimate_exponents_in(&tower, measure, count, n_min, seed, exec)
}

/// [`estimate_exponents`] over a prebuilt tower of levels `1..=tower.len()`.
pub fn estimate_exponents_in(
    tower: &[ConjugacyGrid],
    measure: SamplingMeasure,
    count: usize,
    n_min: usize,
    seed: u64,
    exec: Execution,
) -> Result<ExponentEstimate> {
    let n_max = tower.len();
    let n_min = n_min.max(1);
    if count == 0 || n_min > n_max {
        return Err(Error::InvalidArgument(format!("need samples >= 1 and 1 <= n_min <= n_max, got {count}, {n_min}..{n_max}")));
    }
    let finest = &tower[n_max - 1];
    let rows = map_indexed(exec, count, |i| {
        let mut rng = stream_rng(seed, i as u64);
        let x = match measure {
            SamplingMeasure::Lebesgue => rng.random::<f64>(),
            SamplingMeasure::Mu => {
                let c = &finest.cells[finest.cell_for_mass(rng.random::<f64>())];
                let x = c.start + rng.random::<f64>() * c.lebesgue_length;
                if x >= 1.0 { c.start } else { x }
            }
        };
        (x, exponent_sequence_in(&tower[n_min - 1..], x))
    });
    let (points, sequences): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    if let Some(bad) = sequences.iter().flatten().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(Error::Structure { level: n_max, detail: format!("non-positive exponent {bad}") });
    }
    Ok(ExponentEstimate::from_sequences(measure, n_min, n_max, seed, points, sequences))
}

/// The reciprocal exponents of the conjugacy: `r -> 1/r` sample-wise, with
/// upper and lower tails exchanged.
pub fn gamma_exponents(est: &ExponentEstimate) -> Result<ExponentEstimate> {
    if !(est.tail_min > 0.0 && est.tail_max > 0.0) || est.sequences.iter().flatten().any(|&r| r == 0.0) {
        return Err(Error::InvalidArgument("zero exponent has no reciprocal".into()));
    }
    Ok(ExponentEstimate {
        sampling_measure: est.sampling_measure,
        reciprocal: !est.reciprocal,
        n_min: est.n_min,
        n_max: est.n_max,
        seed: est.seed,
        points: est.points.clone(),
        sequences: est.sequences.iter().map(|s| s.iter().map(|r| 1.0 / r).collect()).collect(),
        mean_final: 1.0 / est.mean_final,
        tail_mean: 1.0 / est.tail_mean,
        tail_max: 1.0 / est.tail_min,
        tail_min: 1.0 / est.tail_max,
        quantiles: est.quantiles.iter().map(|q| q.map(|v| 1.0 / v)).collect(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileLevel {
    pub level: usize,
    /// Lebesgue length of the densest atoms carrying 99% of `mu`.
    pub cover_fraction: f64,
    pub atoms_used: usize,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SingularityProfile {
    pub levels: Vec<ProfileLevel>,
}

impl SingularityProfile {
    pub fn fractions(&self) -> Vec<f64> {
        self.levels.iter().map(|l| l.cover_fraction).collect()
    }

    pub fn strictly_decreasing(&self) -> bool {
        self.levels.windows(2).all(|w| w[1].cover_fraction < w[0].cover_fraction)
    }
}

/// Lebesgue length of the smallest union of atoms, densest first, that
/// carries [`PROFILE_MASS`] of `mu`. The last atom counts only for the part
/// of its mass that is needed.
pub fn cover_fraction(grid: &ConjugacyGrid) -> ProfileLevel {
    let mut order: Vec<&GridCell> = grid.cells.iter().collect();
    order.sort_by(|a, b| (b.mu_mass / b.lebesgue_length).total_cmp(&(a.mu_mass / a.lebesgue_length)));
    let (mut mass, mut length) = (0.0, 0.0);
    let mut used = 0;
    for c in order {
        used += 1;
        if mass + c.mu_mass >= PROFILE_MASS {
            length += c.lebesgue_length * (PROFILE_MASS - mass) / c.mu_mass;
            break;
        }
        mass += c.mu_mass;
        length += c.lebesgue_length;
    }
    ProfileLevel { level: grid.level, cover_fraction: length, atoms_used: used }
}

/// [`cover_fraction`] for every level in `n_min..=n_max`; empty when the
/// range is.
pub fn singularity_profile(
    map: &CircleMap,
    target: &RotationTarget,
    n_min: usize,
    n_max: usize,
) -> Result<SingularityProfile> {
    if n_min > n_max {
        return Ok(SingularityProfile::default());
    }
    let tower = conjugacy_tower(map, target, n_max)?;
    Ok(profile_from_tower(&tower, n_min))
}

pub fn profile_from_tower(tower: &[ConjugacyGrid], n_min: usize) -> SingularityProfile {
    SingularityProfile { levels: tower.iter().filter(|g| g.level >= n_min).map(cover_fraction).collect() }
}

/// Hausdorff-dimension proxy with its uncertainty band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HausdorffEstimate {
    pub value: f64,
    /// 5% and 95% cross-sample quantiles of `r_n` at the deepest level.
    pub band: (f64, f64),
}

/// By Frostman's lemma the dimension of `mu` is its a.e. lower exponent, so
/// the proxy is the `mu`-sampled tail minimum.
pub fn hausdorff_estimate(est: &ExponentEstimate) -> Result<HausdorffEstimate> {
    if est.sampling_measure != SamplingMeasure::Mu || est.reciprocal {
        return Err(Error::RequiresMuSampling);
    }
    let last = est.quantiles.last().expect("at least one level");
    Ok(HausdorffEstimate { value: est.tail_min, band: (last.q05, last.q95) })
}
