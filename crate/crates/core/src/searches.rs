//! Finite searches: complete intersections of two quadrics with `reg = deg - 1`,
//! Cohen–Macaulay non-CI diagrams with `reg = deg - 1`, and sweeps comparing
//! the classifier with the Betti oracle.
//!
//! Candidates are evaluated in parallel and merged into maps keyed by
//! [`orbit_key`], so results do not depend on scheduling.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::classify::{ci_table, classify_maximal};
use crate::error::Result;
use crate::fiberhom::{self, BettiTable};
use crate::quadrangle::{is_cohen_macaulay, is_complete_intersection};
use crate::zlattice::{orbit_key, CanonicalKey, GaleDiagram, Lattice, Vec2};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Found {
    pub lattice: Lattice,
    pub key: CanonicalKey,
    pub saturated: bool,
    pub degree: i64,
    pub regularity: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    /// Sorted by `(n, key)`; keys are pairwise distinct.
    pub found: Vec<Found>,
    pub saturated_count: usize,
    pub total_count: usize,
    pub candidates: usize,
    pub elapsed_ms: u128,
}

impl SearchReport {
    fn new(mut found: Vec<Found>, candidates: usize, start: Instant) -> Self {
        found.sort_by(|a, b| (a.key.n, &a.key).cmp(&(b.key.n, &b.key)));
        let saturated_count = found.iter().filter(|f| f.saturated).count();
        SearchReport {
            total_count: found.len(),
            saturated_count,
            found,
            candidates,
            elapsed_ms: start.elapsed().as_millis(),
        }
    }

    pub fn count_by_n(&self, n: usize) -> (usize, usize) {
        let at: Vec<&Found> = self.found.iter().filter(|f| f.key.n == n).collect();
        (
            at.iter().filter(|f| f.saturated).count(),
            at.iter().filter(|f| !f.saturated).count(),
        )
    }
}

/// Homogeneous exponent vectors of quadric binomials in `Z^n` up to sign:
/// positive part `2e_i` or `e_i + e_j`, negative part likewise, disjoint supports.
pub fn quadric_vectors(n: usize) -> Vec<Vec<i64>> {
    let halves: Vec<Vec<usize>> = (0..n)
        .map(|i| vec![i, i])
        .chain((0..n).flat_map(|i| (i + 1..n).map(move |j| vec![i, j])))
        .collect();
    let mut out = Vec::new();
    for p in &halves {
        for m in &halves {
            if p.iter().any(|i| m.contains(i)) {
                continue;
            }
            let mut v = vec![0i64; n];
            p.iter().for_each(|&i| v[i] += 1);
            m.iter().for_each(|&i| v[i] -= 1);
            if v.iter().find(|&&x| x != 0).is_some_and(|&x| x > 0) {
                out.push(v);
            }
        }
    }
    out.sort();
    out
}

/// The four shapes of a quadric vector, placed on the leading coordinates.
fn leading_shapes(n: usize) -> Vec<Vec<i64>> {
    let shapes: [&[i64]; 4] = [&[2, -2], &[2, -1, -1], &[1, 1, -2], &[1, 1, -1, -1]];
    shapes
        .iter()
        .filter(|s| s.len() <= n)
        .map(|s| {
            s.iter()
                .copied()
                .chain(std::iter::repeat(0))
                .take(n)
                .collect()
        })
        .collect()
}

/// The two-quadric complete intersections with nonzero Gale vectors and
/// `reg = deg - 1`, for `3 ≤ n ≤ max_n`.
pub fn search_ci_table_up_to(max_n: usize) -> SearchReport {
    let start = Instant::now();
    let mut pairs: Vec<(Vec<i64>, Vec<i64>)> = Vec::new();
    for n in 3..=max_n {
        let all = quadric_vectors(n);
        for v1 in leading_shapes(n) {
            let used = v1.iter().filter(|&&x| x != 0).count();
            for v2 in &all {
                if v2[used..].iter().all(|&x| x != 0) {
                    pairs.push((v1.clone(), v2.clone()));
                }
            }
        }
    }
    let candidates = pairs.len();
    let hits: Vec<(Vec<Vec2>, Lattice, i64, i64)> = pairs
        .into_par_iter()
        .filter_map(|(v1, v2)| {
            let l = Lattice::from_basis(v1, v2).ok()?;
            if l.nonzero_count() != l.n() || !l.is_nondegenerate() || !is_complete_intersection(&l)
            {
                return None;
            }
            let (deg, reg, table) = fiberhom::degree_and_regularity(&l).ok()?;
            (generator_degrees(&table) == [2, 2] && reg == deg - 1)
                .then(|| (l.orbit_key(), l, deg, reg))
        })
        .collect();
    SearchReport::new(finish(hits), candidates, start)
}

pub fn search_ci_table() -> SearchReport {
    search_ci_table_up_to(8)
}

/// Total degrees of the minimal generators, with multiplicity.
fn generator_degrees(table: &BettiTable) -> Vec<i64> {
    table
        .at(1)
        .flat_map(|e| std::iter::repeat(e.total).take(e.rank))
        .collect()
}

fn finish(hits: Vec<(Vec<Vec2>, Lattice, i64, i64)>) -> Vec<Found> {
    let mut uniq: BTreeMap<Vec<Vec2>, (Lattice, i64, i64)> = BTreeMap::new();
    for (k, l, d, r) in hits {
        uniq.entry(k).or_insert((l, d, r));
    }
    uniq.into_values()
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(lattice, degree, regularity)| Found {
            key: lattice.permutation_key(),
            saturated: lattice.is_saturated(),
            lattice,
            degree,
            regularity,
        })
        .collect()
}

/// Zero-sum spanning multisets of nonzero vectors in `[-c, c]^2` of size
/// `min_n..=max_n`, one per `GL2(Z)`-and-reordering orbit.
pub fn diagram_orbits(max_coord: i64, min_n: usize, max_n: usize) -> Vec<GaleDiagram> {
    let mut box_vecs: Vec<Vec2> = Vec::new();
    for x in -max_coord..=max_coord {
        for y in -max_coord..=max_coord {
            if (x, y) != (0, 0) {
                box_vecs.push(Vec2::new(x, y));
            }
        }
    }
    let mut seen: BTreeMap<Vec<Vec2>, GaleDiagram> = BTreeMap::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(
        box_vecs: &[Vec2],
        cur: &mut Vec<usize>,
        sum: Vec2,
        min_n: usize,
        max_n: usize,
        seen: &mut BTreeMap<Vec<Vec2>, GaleDiagram>,
    ) {
        // Close the multiset with its negated sum when that keeps indices nondecreasing.
        if cur.len() + 1 >= min_n.max(3) && cur.len() < max_n {
            if let Some(k) = box_vecs.iter().position(|&v| v == -sum) {
                if cur.last().map_or(true, |&l| k >= l) {
                    let mut vs: Vec<Vec2> = cur.iter().map(|&i| box_vecs[i]).collect();
                    vs.push(box_vecs[k]);
                    if let Ok(g) = GaleDiagram::new(vs) {
                        seen.entry(orbit_key(g.vectors())).or_insert(g);
                    }
                }
            }
        }
        if cur.len() + 1 >= max_n {
            return;
        }
        let from = cur.last().copied().unwrap_or(0);
        for i in from..box_vecs.len() {
            cur.push(i);
            rec(box_vecs, cur, sum + box_vecs[i], min_n, max_n, seen);
            cur.pop();
        }
    }
    if max_n >= 3 && max_coord >= 1 {
        rec(&box_vecs, &mut cur, Vec2::ZERO, min_n, max_n, &mut seen);
    }
    seen.into_values().collect()
}

/// Cohen–Macaulay non-CI lattices with three quadric generators and
/// `reg = deg - 1`, among diagrams of `3..=max_n` nonzero vectors in `[-c, c]^2`.
pub fn search_cm_nonci_bounded(max_coord: i64, max_n: usize) -> SearchReport {
    let start = Instant::now();
    let orbits = diagram_orbits(max_coord, 3, max_n);
    let candidates = orbits.len();
    let hits = orbits
        .into_par_iter()
        .filter_map(|g| {
            let l = Lattice::from_gale(&g).ok()?;
            if !l.is_nondegenerate() || is_complete_intersection(&l) || !is_cohen_macaulay(&l) {
                return None;
            }
            let (deg, reg, table) = fiberhom::degree_and_regularity(&l).ok()?;
            (generator_degrees(&table) == [2, 2, 2] && reg == deg - 1)
                .then(|| (l.orbit_key(), l, deg, reg))
        })
        .collect();
    SearchReport::new(finish(hits), candidates, start)
}

pub fn search_cm_nonci() -> SearchReport {
    search_cm_nonci_bounded(2, 6)
}

pub const CM_NONCI_JSON: &str = include_str!("../golden/cm_nonci.json");

#[derive(Deserialize)]
struct GoldenDiagrams {
    diagrams: Vec<GoldenDiagram>,
}

#[derive(Deserialize)]
struct GoldenDiagram {
    gale: Vec<Vec2>,
    saturated: bool,
}

/// `(permutation key, saturated)` of every lattice in the committed CI table.
pub fn golden_ci_table() -> BTreeSet<(CanonicalKey, bool)> {
    let t = ci_table();
    let sat = t.saturated.iter().map(|l| (l.permutation_key(), true));
    sat.chain(t.non_saturated.iter().map(|l| (l.permutation_key(), false)))
        .collect()
}

/// `(permutation key, saturated)` of every diagram in the committed CM non-CI list.
pub fn golden_cm_nonci() -> BTreeSet<(CanonicalKey, bool)> {
    let raw: GoldenDiagrams = serde_json::from_str(CM_NONCI_JSON).expect("embedded list parses");
    raw.diagrams
        .into_iter()
        .map(|d| {
            let l = Lattice::from_rows(&d.gale).expect("embedded diagram is valid");
            assert_eq!(l.is_saturated(), d.saturated);
            (l.permutation_key(), d.saturated)
        })
        .collect()
}

/// Entries present on only one side of a search/golden comparison.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenDiff {
    pub missing: Vec<(CanonicalKey, bool)>,
    pub unexpected: Vec<(CanonicalKey, bool)>,
}

impl GoldenDiff {
    pub fn is_empty(&self) -> bool {
        self.missing.is_empty() && self.unexpected.is_empty()
    }
}

pub fn diff_against_golden(
    report: &SearchReport,
    golden: &BTreeSet<(CanonicalKey, bool)>,
) -> GoldenDiff {
    let found: BTreeSet<(CanonicalKey, bool)> = report
        .found
        .iter()
        .map(|f| (f.key.clone(), f.saturated))
        .collect();
    GoldenDiff {
        missing: golden.difference(&found).cloned().collect(),
        unexpected: found.difference(golden).cloned().collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepBounds {
    pub max_coord: i64,
    pub min_n: usize,
    pub max_n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepMismatch {
    pub gale: GaleDiagram,
    pub classified_maximal: bool,
    pub degree: i64,
    pub regularity: i64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    /// Saturated nondegenerate orbits compared.
    pub checked: usize,
    pub maximal: usize,
    /// `(n', checked, maximal)` per number of vectors.
    pub by_n: Vec<(usize, usize, usize)>,
    /// Largest `reg - deg` over non-maximal lattices.
    pub worst_gap_non_maximal: Option<i64>,
    pub mismatches: Vec<SweepMismatch>,
}

/// Classifier against the oracle on every saturated nondegenerate orbit in the box.
pub fn consistency_sweep(bounds: SweepBounds) -> Result<SweepReport> {
    let orbits = diagram_orbits(bounds.max_coord, bounds.min_n, bounds.max_n);
    let rows: Vec<Result<Option<(usize, bool, i64, i64, GaleDiagram)>>> = orbits
        .into_par_iter()
        .map(|g| {
            let l = Lattice::from_gale(&g)?;
            if !l.is_saturated() || !l.is_nondegenerate() {
                return Ok(None);
            }
            let verdict = classify_maximal(&l, false)?;
            let (deg, reg, _) = fiberhom::degree_and_regularity(&l)?;
            Ok(Some((g.len(), verdict.maximal, deg, reg, g)))
        })
        .collect();
    let mut report = SweepReport::default();
    let mut by_n: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for row in rows {
        let Some((n, maximal, deg, reg, g)) = row? else {
            continue;
        };
        report.checked += 1;
        let e = by_n.entry(n).or_default();
        e.0 += 1;
        if maximal {
            report.maximal += 1;
            e.1 += 1;
        } else {
            report.worst_gap_non_maximal = report.worst_gap_non_maximal.max(Some(reg - deg));
        }
        if maximal != (reg == deg - 1) {
            report.mismatches.push(SweepMismatch {
                gale: g,
                classified_maximal: maximal,
                degree: deg,
                regularity: reg,
            });
        }
    }
    report.by_n = by_n.into_iter().map(|(n, (c, m))| (n, c, m)).collect();
    Ok(report)
}
