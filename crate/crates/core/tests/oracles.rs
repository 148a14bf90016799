mod common;

use common::*;
use scl_core::cf::{convergents, return_lengths, rotation_partition};
use scl_core::crossratio::{dpoin, Quadruple};
use scl_core::discrepancy::{conjugate_isomorphism, discrepancy, LevelPair};
use scl_core::map::{schwarzian, CircleMap, CubicProxy, SmoothMap};
use scl_core::measure::conjugacy_grid;
use scl_core::partition::{dynamical_partition, partition_tower, refinement_report};
use scl_core::{AtomLabel, ContinuedFraction, RotationNumber, RotationTarget};

#[test]
fn convergents_match_finite_fractions() {
    for cf in [ContinuedFraction::golden(40), ContinuedFraction::silver(30), ContinuedFraction::from_coefficients(vec![3, 1, 4, 1, 5, 9, 2, 6]).unwrap()] {
        let n = cf.len().min(25);
        for c in convergents(&cf, n).unwrap() {
            let (p, q) = finite_cf(cf.prefix(c.level));
            assert_eq!((c.p as u128, c.q as u128), (p, q), "level {}", c.level);
        }
    }
}

#[test]
fn return_lengths_are_powers() {
    // for [1,1,...] and [2,2,...] the closest returns are rho^(n+1)
    let golden = return_lengths(&ContinuedFraction::golden(48), &RotationNumber::golden(), 30).unwrap();
    let silver = return_lengths(&ContinuedFraction::silver(48), &RotationNumber::silver(), 20).unwrap();
    for n in 0..=30 {
        let want = GOLDEN.powi(n as i32 + 1);
        assert!((golden.theta(n) - want).abs() <= 1e-14 * want, "golden {n}");
    }
    for n in 0..=20 {
        let want = SILVER.powi(n as i32 + 1);
        assert!((silver.theta(n) - want).abs() <= 1e-14 * want, "silver {n}");
    }
    // frozen from the power oracle
    assert_eq!(golden.theta(2), 0.236_067_977_499_789_7);
    assert_eq!(golden.theta(1), 0.381_966_011_250_105_15);
    assert!((silver.theta(1) - 0.171_572_875_253_809_9).abs() < 1e-16);
}

#[test]
fn rotation_partitions_match_three_gap_sort() {
    for (t, rho) in [(RotationTarget::golden(20).unwrap(), GOLDEN), (RotationTarget::silver(14).unwrap(), SILVER)] {
        for n in 1..=12 {
            let count = (t.q(n) + t.q(n - 1)) as usize;
            let cells = sorted_cells(&rotation_orbit(rho, count));
            let p = rotation_partition(&t, n).unwrap();
            assert_eq!(p.len(), cells.len());
            // k * rho in plain f64 drifts by about k ulp(rho)
            let tol = 1e-14 + count as f64 * 1e-16;
            for (atom, &(k, start, len)) in p.atoms.iter().zip(&cells) {
                assert!((atom.start - start).abs() < tol, "n={n} k={k} {} vs {start}", atom.start);
                assert!((atom.length - len).abs() < 2.0 * tol);
                let want = if (len - t.theta(n)).abs() < 2.0 * tol { AtomLabel::Short } else { AtomLabel::Lengthy };
                assert_eq!(atom.label, want, "n={n} orbit index {k}");
            }
        }
    }
}

#[test]
fn tuned_orbit_matches_plain_iteration() {
    let (f, t) = tuned_golden();
    let q: Vec<u64> = (1..=14).map(|n| t.q(n)).collect();
    let orbit = sine_orbit(f.omega, 1000);
    let returns: Vec<u64> = closest_returns(&orbit).into_iter().map(|k| k as u64).collect();
    assert_eq!(&returns[..q.len() - 1], &q[..q.len() - 1]);
    for n in [2, 6, 10, 14] {
        let count = (t.q(n) + t.q(n - 1)) as usize;
        let cells = sorted_cells(&orbit[..count]);
        let p = dynamical_partition(&f, &t, n).unwrap();
        assert_eq!(p.len(), cells.len());
        for (atom, &(_, start, len)) in p.atoms.iter().zip(&cells) {
            assert!((atom.start - start).abs() < 1e-9, "n={n}");
            assert!((atom.length - len).abs() < 1e-9, "n={n}");
        }
    }
}

#[test]
fn tuned_rotation_number_by_averaging() {
    let (f, _) = tuned_golden();
    let n = 200_000;
    let mut x = 0.0f64;
    for _ in 0..n {
        x = f.eval(x);
    }
    assert!((x / n as f64 - GOLDEN).abs() < 1e-4);
}

#[test]
fn refinement_counts_match_point_counting() {
    // r = 2 refinement of a lengthy golden box holds 3 atoms, of a short one 2
    let t = RotationTarget::golden(20).unwrap();
    for level in 3..=8 {
        let fine = rotation_orbit(GOLDEN, (t.q(level + 2) + t.q(level + 1)) as usize);
        let coarse = rotation_partition(&t, level).unwrap();
        let pair = LevelPair::build(&CircleMap::rotation_by(&t), &t, level, 2).unwrap();
        for (i, b) in coarse.atoms.iter().enumerate() {
            let inside = fine.iter().filter(|&&x| x >= b.start - 1e-12 && x < b.end - 1e-12).count();
            assert_eq!(pair.isomorphism(i).unwrap().source.len(), inside);
            assert_eq!(inside, if b.label == AtomLabel::Lengthy { 3 } else { 2 });
        }
    }
}

#[test]
fn refinement_rule_on_tuned_map() {
    let (f, t) = tuned_golden();
    let tower = partition_tower(&f, &t, 14).unwrap();
    for w in tower.windows(2) {
        let report = refinement_report(&w[0], &w[1]).unwrap();
        for s in &report.splits {
            match s.label {
                AtomLabel::Lengthy => assert_eq!((s.lengthy_children, s.short_children), (1, 1)),
                AtomLabel::Short => assert_eq!((s.lengthy_children, s.short_children), (1, 0)),
            }
        }
    }
}

/// `delta` of the box over `[b0, b1)` from sorted plain orbits.
fn plain_delta(f_orbit: &[f64], r_orbit: &[f64], f_box: (f64, f64), r_box: (f64, f64)) -> f64 {
    let lengths = |cells: Vec<(usize, f64, f64)>, (lo, hi): (f64, f64)| -> Vec<f64> {
        let inside: Vec<f64> = cells.into_iter().filter(|c| c.1 >= lo - 1e-12 && c.1 < hi - 1e-12).map(|c| c.2).collect();
        let s: f64 = inside.iter().sum();
        inside.into_iter().map(|x| x / s).collect()
    };
    let mu = lengths(sorted_cells(f_orbit), f_box);
    let nu = lengths(sorted_cells(r_orbit), r_box);
    assert_eq!(mu.len(), nu.len());
    mu.iter().zip(&nu).map(|(m, n)| m * (n / m).ln().max(0.0)).sum()
}

#[test]
fn discrepancy_matches_plain_construction() {
    let (f, t) = tuned_golden();
    for level in 3..=7 {
        let fine = (t.q(level + 2) + t.q(level + 1)) as usize;
        let (fo, ro) = (sine_orbit(f.omega, fine), rotation_orbit(GOLDEN, fine));
        let pair = LevelPair::build(&f, &t, level, 2).unwrap();
        for i in 0..pair.boxes() {
            let (fb, rb) = (&pair.map_coarse.atoms[i], &pair.rot_coarse.atoms[i]);
            let want = plain_delta(&fo, &ro, (fb.start, fb.end), (rb.start, rb.end));
            let got = discrepancy(&conjugate_isomorphism(&f, &t, level, i, 2).unwrap());
            assert!((got - want).abs() < 1e-9, "level {level} box {i}: {got} vs {want}");
        }
    }
}

#[test]
fn grid_masses_at_level_two() {
    let (f, t) = tuned_golden();
    let g = conjugacy_grid(&f, &t, 2).unwrap();
    let mut mu: Vec<f64> = g.cells.iter().map(|c| c.mu_mass).collect();
    mu.sort_by(f64::total_cmp);
    let want = [GOLDEN.powi(3), GOLDEN.powi(2), GOLDEN.powi(2)];
    for (m, w) in mu.iter().zip(want) {
        assert!((m - w).abs() < 1e-15);
    }
    assert!((mu[0] - 0.236_068).abs() < 1e-6 && (mu[1] - 0.381_966).abs() < 1e-6);
}

#[test]
fn cubic_distortion_by_hand() {
    let q = Quadruple::new(0.1, 0.2, 0.3, 0.4).unwrap();
    let cube = |x: f64| x * x * x;
    let (a, b, c, d) = (cube(0.1), cube(0.2), cube(0.3), cube(0.4));
    let after = (c - b) * (d - a) / ((c - a) * (d - b));
    let rec = dpoin(&q, &CubicProxy, 1).unwrap();
    assert!((rec.poin_after - after).abs() < 1e-14);
    assert!((rec.poin_after - 0.822_115_384_615_384_6).abs() < 1e-14);
    assert!((rec.dpoin - 1.096_153_846_153_846_3).abs() < 1e-14);
}

#[test]
fn schwarzian_closed_forms() {
    // Sf = f'''/f' - 1.5 (f''/f')^2 with f' = 1 - cos 2 pi x
    let f = CircleMap::critical_sine(0.2);
    let tau = std::f64::consts::TAU;
    for x in [0.1, 0.25, 0.5, 0.8] {
        let (d1, d2, d3) = (1.0 - (tau * x).cos(), tau * (tau * x).sin(), tau * tau * (tau * x).cos());
        let want = d3 / d1 - 1.5 * (d2 / d1).powi(2);
        assert!((schwarzian(&f, x).unwrap() - want).abs() < 1e-9 * want.abs());
        assert!(f.derivative(x) > 0.0);
    }
    assert!((schwarzian(&f, 0.5).unwrap() + 19.739_208_802_178_716).abs() < 1e-12);
    assert!((schwarzian(&CubicProxy, 0.1).unwrap() + 400.0).abs() < 1e-9);
}
