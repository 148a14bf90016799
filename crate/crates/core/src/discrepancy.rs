//! Partitions of an interval as probability spaces: entropy, the
//! discrepancy between isomorphic partitions and the quantities compared by
//! the partition lemma.

use serde::{Deserialize, Serialize};

use crate::cf::{rotation_partition, RotationTarget};
use crate::error::{Error, Result};
use crate::exec::{map_indexed, Execution};
use crate::map::CircleMap;
use crate::partition::{critical_orbit, dynamical_partition_from_orbit, Atom, AtomLabel, DynamicalPartition};
use crate::precision::compensated_sum;

/// Atoms of a finer partition inside a host interval `I`, with masses
/// `|w| / |I|`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RestrictedPartition {
    /// `(start, length)` of the host interval.
    pub host: (f64, f64),
    pub coarse_level: usize,
    pub fine_level: usize,
    /// `(label, k, length)` in circle order.
    pub atoms: Vec<(AtomLabel, usize, f64)>,
    pub masses: Vec<f64>,
}

impl RestrictedPartition {
    /// A partition given only by its masses, for synthetic tests.
    pub fn from_masses(masses: &[f64]) -> Result<Self> {
        if masses.is_empty() || masses.iter().any(|&m| !(m > 0.0)) {
            return Err(Error::InvalidArgument("masses must be positive".into()));
        }
        let total = compensated_sum(masses.iter().copied());
        if (total - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidArgument(format!("masses sum to {total}")));
        }
        Ok(Self {
            host: (0.0, 1.0),
            coarse_level: 0,
            fine_level: 0,
            atoms: masses.iter().enumerate().map(|(k, &m)| (AtomLabel::Lengthy, k, m)).collect(),
            masses: masses.to_vec(),
        })
    }

    pub fn len(&self) -> usize {
        self.masses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.masses.is_empty()
    }
}

/// Atoms of `fine` inside `host`, an atom of a partition `r` levels coarser.
pub fn restrict(fine: &DynamicalPartition, host: &Atom, coarse_level: usize) -> Result<RestrictedPartition> {
    let range = fine.children_of(host);
    if range.is_empty() {
        return Err(Error::Structure {
            level: fine.level,
            detail: format!("no atoms of level {} inside box {:?} k={}", fine.level, host.label, host.k),
        });
    }
    let atoms: Vec<_> = fine.atoms[range].iter().map(|a| (a.label, a.k, a.length)).collect();
    let total = compensated_sum(atoms.iter().map(|a| a.2));
    if (total - host.length).abs() > 1e-9 * host.length.max(1e-300) + 1e-12 {
        return Err(Error::Structure {
            level: fine.level,
            detail: format!("children of box k={} cover {total} of {}", host.k, host.length),
        });
    }
    let masses = atoms.iter().map(|a| a.2 / total).collect();
    Ok(RestrictedPartition {
        host: (host.start, host.length),
        coarse_level,
        fine_level: fine.level,
        atoms,
        masses,
    })
}

/// `H = -sum mu(w) log mu(w)`.
pub fn entropy(p: &RestrictedPartition) -> f64 {
    compensated_sum(p.masses.iter().map(|&m| -m * m.ln())).max(0.0)
}

/// An order-preserving bijection between the atoms of two partitions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartitionIsomorphism {
    pub source: RestrictedPartition,
    pub target: RestrictedPartition,
    /// `nu(h(w)) / mu(w)` per atom.
    pub jacobians: Vec<f64>,
}

impl PartitionIsomorphism {
    /// Pairs atoms in order; both sides must have the same count.
    pub fn new(source: RestrictedPartition, target: RestrictedPartition) -> Result<Self> {
        if source.len() != target.len() {
            return Err(Error::Structure {
                level: source.fine_level,
                detail: format!("{} source atoms against {} target atoms", source.len(), target.len()),
            });
        }
        let jacobians = source.masses.iter().zip(&target.masses).map(|(m, n)| n / m).collect();
        Ok(Self { source, target, jacobians })
    }

    pub fn from_masses(mu: &[f64], nu: &[f64]) -> Result<Self> {
        Self::new(RestrictedPartition::from_masses(mu)?, RestrictedPartition::from_masses(nu)?)
    }

    /// Pairs of `(mu(w), nu(h(w)))`.
    pub fn mass_pairs(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.source.masses.iter().copied().zip(self.target.masses.iter().copied())
    }
}

/// `delta = sum mu(w) log_+(nu(h(w)) / mu(w))`.
pub fn discrepancy(iso: &PartitionIsomorphism) -> f64 {
    compensated_sum(iso.mass_pairs().map(|(m, n)| m * (n / m).ln().max(0.0)))
}

/// The `f`-side partition `[B(L + r; f) : Box]` for the `box_index`-th atom
/// of `B(L; f)`, matched to its rotation image.
pub fn conjugate_isomorphism(
    map: &CircleMap,
    target: &RotationTarget,
    coarse_level: usize,
    box_index: usize,
    r: usize,
) -> Result<PartitionIsomorphism> {
    let levels = LevelPair::build(map, target, coarse_level, r)?;
    levels.isomorphism(box_index)
}

/// Coarse and fine partitions on both sides of the conjugacy.
#[derive(Debug, Clone)]
pub struct LevelPair {
    pub r: usize,
    pub map_coarse: DynamicalPartition,
    pub map_fine: DynamicalPartition,
    pub rot_coarse: DynamicalPartition,
    pub rot_fine: DynamicalPartition,
}

impl LevelPair {
    pub fn build(map: &CircleMap, target: &RotationTarget, coarse_level: usize, r: usize) -> Result<Self> {
        if r == 0 {
            return Err(Error::InvalidArgument("refinement step r must be at least 1".into()));
        }
        let orbit = critical_orbit(map, target, coarse_level + r)?;
        Ok(Self {
            r,
            map_coarse: dynamical_partition_from_orbit(&orbit, target, coarse_level)?,
            map_fine: dynamical_partition_from_orbit(&orbit, target, coarse_level + r)?,
            rot_coarse: rotation_partition(target, coarse_level)?,
            rot_fine: rotation_partition(target, coarse_level + r)?,
        })
    }

    pub fn boxes(&self) -> usize {
        self.map_coarse.len()
    }

    pub fn isomorphism(&self, box_index: usize) -> Result<PartitionIsomorphism> {
        let level = self.map_coarse.level;
        let (fbox, rbox) = match (self.map_coarse.atoms.get(box_index), self.rot_coarse.atoms.get(box_index)) {
            (Some(f), Some(r)) => (f, r),
            _ => return Err(Error::InvalidArgument(format!("box {box_index} out of range at level {level}"))),
        };
        if (fbox.label, fbox.k) != (rbox.label, rbox.k) {
            return Err(Error::Structure { level, detail: "boxes out of order across the conjugacy".into() });
        }
        let source = restrict(&self.map_fine, fbox, level)?;
        let image = restrict(&self.rot_fine, rbox, level)?;
        let same_order = source.atoms.len() == image.atoms.len()
            && source.atoms.iter().zip(&image.atoms).all(|(a, b)| (a.0, a.1) == (b.0, b.1));
        if !same_order {
            return Err(Error::Structure { level, detail: format!("children of box {box_index} do not correspond") });
        }
        PartitionIsomorphism::new(source, image)
    }
}

/// Everything the partition lemma compares, for one isomorphism between
/// partitions of `I` and `J`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionLemmaTerms {
    /// `sum (|log |h(w)|| / |log |w||) mu(w)`.
    pub lhs: f64,
    /// `|log |J|| / |log |I||`.
    pub ratio: f64,
    pub entropy: f64,
    pub delta_squared: f64,
    /// Cross-entropy minus entropy; nonnegative by Gibbs' inequality.
    pub gibbs_gap: f64,
    /// `sum mu(w) |log nu(h(w))| |log mu(w)| / |log |J||`, the lemma's
    /// hypothesis.
    pub hypothesis: f64,
}

pub fn partition_lemma_terms(iso: &PartitionIsomorphism, len_i: f64, len_j: f64) -> Result<PartitionLemmaTerms> {
    if !(len_i > 0.0 && len_i < 1.0 && len_j > 0.0 && len_j < 1.0) {
        return Err(Error::InvalidArgument(format!("|I| = {len_i}, |J| = {len_j} must lie in (0, 1)")));
    }
    let (log_i, log_j) = (len_i.ln().abs(), len_j.ln().abs());
    let lhs = compensated_sum(iso.mass_pairs().map(|(m, n)| (len_j * n).ln().abs() / (len_i * m).ln().abs() * m));
    let cross = compensated_sum(iso.mass_pairs().map(|(m, n)| m * n.ln().abs()));
    let ent = entropy(&iso.source);
    let delta = discrepancy(iso);
    let hypothesis = compensated_sum(iso.mass_pairs().map(|(m, n)| m * n.ln().abs() * m.ln().abs())) / log_j;
    Ok(PartitionLemmaTerms {
        lhs,
        ratio: log_j / log_i,
        entropy: ent,
        delta_squared: delta * delta,
        gibbs_gap: cross - ent,
        hypothesis,
    })
}

/// `(Jensen average, log bound)` over the expanding atoms `E`:
/// `(1/mu(E)) sum_E mu log(nu/mu)` and `log(nu(h(E)) / mu(E))`. `None` if no
/// atom expands.
pub fn jensen_terms(iso: &PartitionIsomorphism) -> Option<(f64, f64)> {
    let expanding: Vec<(f64, f64)> = iso.mass_pairs().filter(|(m, n)| n > m).collect();
    if expanding.is_empty() {
        return None;
    }
    let mu_e = compensated_sum(expanding.iter().map(|p| p.0));
    let nu_e = compensated_sum(expanding.iter().map(|p| p.1));
    let avg = compensated_sum(expanding.iter().map(|(m, n)| m * (n / m).ln())) / mu_e;
    Some((avg, (nu_e / mu_e).ln()))
}

/// One row of a discrepancy survey.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxRecord {
    pub level: usize,
    pub box_index: usize,
    pub r: usize,
    pub label: AtomLabel,
    pub k: usize,
    pub delta: f64,
    pub entropy: f64,
    pub gibbs_gap: f64,
    pub atoms: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelMinimum {
    pub level: usize,
    pub r: usize,
    pub min_delta: f64,
    pub min_gibbs_gap: f64,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct DiscrepancySurvey {
    pub boxes: Vec<BoxRecord>,
    pub minima: Vec<LevelMinimum>,
}

impl DiscrepancySurvey {
    /// Per-level minima of `delta` for refinement step `r`.
    pub fn min_deltas(&self, r: usize) -> Vec<f64> {
        self.minima.iter().filter(|m| m.r == r).map(|m| m.min_delta).collect()
    }
}

/// `delta`, entropy and Gibbs gap for every box of every coarse level in
/// `levels` and every step in `steps`; parallel over boxes.
pub fn discrepancy_survey(
    map: &CircleMap,
    target: &RotationTarget,
    levels: std::ops::RangeInclusive<usize>,
    steps: &[usize],
    exec: Execution,
) -> Result<DiscrepancySurvey> {
    let mut survey = DiscrepancySurvey::default();
    for &r in steps {
        for level in levels.clone() {
            let pair = LevelPair::build(map, target, level, r)?;
            let rows = map_indexed(exec, pair.boxes(), |i| -> Result<BoxRecord> {
                let iso = pair.isomorphism(i)?;
                let ent = entropy(&iso.source);
                let cross = compensated_sum(iso.mass_pairs().map(|(m, n)| m * n.ln().abs()));
                let b = &pair.map_coarse.atoms[i];
                Ok(BoxRecord {
                    level,
                    box_index: i,
                    r,
                    label: b.label,
                    k: b.k,
                    delta: discrepancy(&iso),
                    entropy: ent,
                    gibbs_gap: cross - ent,
                    atoms: iso.source.len(),
                })
            });
            let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
            survey.minima.push(LevelMinimum {
                level,
                r,
                min_delta: rows.iter().map(|b| b.delta).fold(f64::INFINITY, f64::min),
                min_gibbs_gap: rows.iter().map(|b| b.gibbs_gap).fold(f64::INFINITY, f64::min),
            });
            survey.boxes.extend(rows);
        }
    }
    Ok(survey)
}
