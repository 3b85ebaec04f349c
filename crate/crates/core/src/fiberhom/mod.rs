//! Fibers, their polygons and simplicial complexes, and the Betti-number,
//! Hilbert-function, degree and regularity oracles built on them.
//!
//! For a class `C ∈ Z^n / L` with nonnegative representative `a`, the monomials
//! of the fiber are `a - B u` for the lattice points `u` of
//! `P_a = {u ∈ Z^2 : B u ≤ a}`, and `β_{i,C}(S/I_L) = dim H̃_{i-1}(Δ_C)` where
//! `Δ_C` is generated by the supports of those monomials.
//!
//! Two Betti oracles are provided. [`betti_table_exhaustive`] groups every
//! monomial up to the horizon into fibers. [`betti_table`] visits only classes
//! whose polygon is primitive (a segment, a unimodular triangle or a unimodular
//! parallelogram) with the tight representative `a_j = max_{u∈P} b_j·u`. For
//! saturated lattices every other complex is contractible; for non-saturated
//! ones [`degree_and_regularity`] uses the exhaustive oracle.

mod homology;

use std::collections::{BTreeMap, HashMap, HashSet};

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::zlattice::{Hnf, Lattice, Vec2};

pub use homology::{matrix_rank, reduced_homology_ranks, Field, SimplicialComplex};

/// Lattice points of `{u : B u ≤ a}` and the vertices of their convex hull.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polygon {
    pub points: Vec<Vec2>,
    pub vertices: Vec<Vec2>,
}

impl Polygon {
    pub fn is_primitive(&self) -> bool {
        self.points.len() == self.vertices.len()
    }

    /// Points translated so that the lexicographically smallest one is the origin.
    pub fn normalized_points(&self) -> Vec<Vec2> {
        let m = self.points[0];
        self.points.iter().map(|&p| p - m).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FiberClass {
    pub rep: Vec<i64>,
    pub total: i64,
}

impl FiberClass {
    pub fn new(rep: Vec<i64>) -> Self {
        let total = rep.iter().sum();
        FiberClass { rep, total }
    }

    /// Canonical key of the class modulo the lattice.
    pub fn key(&self, hnf: &Hnf) -> Vec<i64> {
        let mut k = self.rep.clone();
        hnf.reduce(&mut k);
        k
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Fiber {
    pub class: FiberClass,
    pub monomials: Vec<Vec<i64>>,
    pub polygon: Polygon,
}

impl Fiber {
    pub fn complex(&self) -> SimplicialComplex {
        SimplicialComplex::from_generators(self.monomials.iter().map(|m| support(m)))
    }
}

fn support(m: &[i64]) -> u64 {
    m.iter()
        .enumerate()
        .fold(0, |s, (j, &x)| if x > 0 { s | 1 << j } else { s })
}

pub fn polygon_of(l: &Lattice, a: &[i64]) -> Result<Polygon> {
    if a.len() != l.n() {
        return Err(Error::DimensionMismatch);
    }
    if a.iter().any(|&x| x < 0) {
        return Err(Error::NegativeDegree);
    }
    let points = lattice_points(&l.gale_vectors(), a)?;
    let vertices = hull_vertices(&points);
    Ok(Polygon { points, vertices })
}

/// Lattice points of `{u : b_j·u ≤ a_j}`, sorted. The feasible vertices of the
/// arrangement bound the search box.
pub(crate) fn lattice_points(g: &[Vec2], a: &[i64]) -> Result<Vec<Vec2>> {
    let n = g.len();
    let (mut lo, mut hi): (Option<i128>, Option<i128>) = (None, None);
    for i in 0..n {
        for j in i + 1..n {
            let den = g[i].det(g[j]) as i128;
            if den == 0 {
                continue;
            }
            // Cramer: b_i·p = a_i, b_j·p = a_j with p = (px, py) / den.
            let (ai, aj) = (a[i] as i128, a[j] as i128);
            let mut px = ai * g[j].y as i128 - aj * g[i].y as i128;
            let mut py = g[i].x as i128 * aj - g[j].x as i128 * ai;
            let mut den = den;
            if den < 0 {
                px = -px;
                py = -py;
                den = -den;
            }
            let feasible =
                (0..n).all(|k| g[k].x as i128 * px + g[k].y as i128 * py <= a[k] as i128 * den);
            if feasible {
                let fl = Integer::div_floor(&px, &den);
                let ce = -Integer::div_floor(&-px, &den);
                lo = Some(lo.map_or(ce, |v| v.min(ce)));
                hi = Some(hi.map_or(fl, |v| v.max(fl)));
            }
        }
    }
    let (Some(lo), Some(hi)) = (lo, hi) else {
        return Err(Error::Unbounded);
    };
    let mut pts = Vec::new();
    for x in lo..=hi {
        let (mut ylo, mut yhi) = (i128::MIN, i128::MAX);
        let mut empty = false;
        for k in 0..n {
            let rhs = a[k] as i128 - g[k].x as i128 * x;
            let by = g[k].y as i128;
            match by.signum() {
                1 => yhi = yhi.min(Integer::div_floor(&rhs, &by)),
                -1 => ylo = ylo.max(-Integer::div_floor(&rhs, &-by)),
                _ => {
                    if rhs < 0 {
                        empty = true;
                    }
                }
            }
        }
        if empty || ylo == i128::MIN || yhi == i128::MAX {
            if !empty {
                return Err(Error::Unbounded);
            }
            continue;
        }
        for y in ylo..=yhi {
            pts.push(Vec2::new(x as i64, y as i64));
        }
    }
    Ok(pts)
}

/// Strict convex-hull vertices of a sorted point set.
fn hull_vertices(pts: &[Vec2]) -> Vec<Vec2> {
    if pts.len() <= 2 {
        return pts.to_vec();
    }
    let cross = |o: Vec2, a: Vec2, b: Vec2| (a - o).det(b - o);
    let mut lower: Vec<Vec2> = Vec::new();
    for &p in pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<Vec2> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower.sort();
    lower
}

pub fn fiber_of(l: &Lattice, a: &[i64]) -> Result<Fiber> {
    let polygon = polygon_of(l, a)?;
    let monomials = polygon
        .points
        .iter()
        .map(|&u| a.iter().zip(l.apply(u)).map(|(x, y)| x - y).collect())
        .collect();
    Ok(Fiber {
        class: FiberClass::new(a.to_vec()),
        monomials,
        polygon,
    })
}

/// `a_j = max_{u ∈ pts} b_j·u`.
pub fn tight_representative(g: &[Vec2], pts: &[Vec2]) -> Vec<i64> {
    g.iter()
        .map(|b| pts.iter().map(|&u| b.dot(u)).max().unwrap_or(0))
        .collect()
}

/// One nonzero multigraded Betti number `β_{i,C}` of `S/I_L`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct BettiEntry {
    pub i: usize,
    pub rep: Vec<i64>,
    pub total: i64,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    pub entries: Vec<BettiEntry>,
    pub horizon: i64,
}

impl BettiTable {
    fn new(mut entries: Vec<BettiEntry>, horizon: i64) -> Self {
        entries.sort_by(|a, b| (a.i, a.total, &a.rep).cmp(&(b.i, b.total, &b.rep)));
        BettiTable { entries, horizon }
    }

    pub fn at(&self, i: usize) -> impl Iterator<Item = &BettiEntry> {
        self.entries.iter().filter(move |e| e.i == i)
    }

    /// Graded Betti numbers `β_{i,j}` (j = total degree), `i ≥ 1`.
    pub fn graded(&self) -> BTreeMap<(usize, i64), usize> {
        let mut m = BTreeMap::new();
        for e in &self.entries {
            *m.entry((e.i, e.total)).or_insert(0) += e.rank;
        }
        m
    }

    /// `max_i` with a nonzero entry.
    pub fn projective_dimension(&self) -> usize {
        self.entries.iter().map(|e| e.i).max().unwrap_or(0)
    }

    /// `reg I_L = max (|C| - i) + 1`.
    pub fn regularity(&self) -> i64 {
        self.entries
            .iter()
            .map(|e| e.total - e.i as i64)
            .max()
            .map_or(0, |m| m + 1)
    }

    /// Numerator `Σ (-1)^i β_{i,j} t^j` of the Hilbert series over `(1-t)^n`.
    pub fn k_polynomial(&self) -> Vec<i64> {
        let top = self.entries.iter().map(|e| e.total).max().unwrap_or(0) as usize;
        let mut k = vec![0i64; top + 1];
        k[0] = 1;
        for e in &self.entries {
            let s = if e.i % 2 == 0 { 1 } else { -1 };
            k[e.total as usize] += s * e.rank as i64;
        }
        k
    }

    /// Degree `h(1)` where `K(t) = (1-t)^codim h(t)`.
    pub fn degree_from_k_polynomial(&self, codim: usize) -> Result<i64> {
        let mut h = self.k_polynomial();
        for _ in 0..codim {
            if h.iter().sum::<i64>() != 0 {
                return Err(Error::InternalInconsistency(
                    "K-polynomial is not divisible by (1-t)^codim".into(),
                ));
            }
            let mut acc = 0;
            for x in h.iter_mut() {
                acc += *x;
                *x = acc;
            }
        }
        Ok(h.iter().sum())
    }

    /// Entries keyed by canonical class, for comparing tables built from
    /// different representatives.
    pub fn keyed(&self, hnf: &Hnf) -> Vec<(usize, Vec<i64>, i64, usize)> {
        let mut v: Vec<_> = self
            .entries
            .iter()
            .map(|e| {
                let mut k = e.rep.clone();
                hnf.reduce(&mut k);
                (e.i, k, e.total, e.rank)
            })
            .collect();
        v.sort();
        v
    }
}

/// `Σ_j |b_j·v|`, twice the total degree of the segment `[0, v]`.
pub(crate) fn gale_norm(g: &[Vec2], v: Vec2) -> i64 {
    g.iter().map(|b| b.dot(v).abs()).sum()
}

/// Lex-positive visible `v` with `Σ|b_j·v| ≤ bound`. The norm ball is a polygon
/// whose vertices lie on the directions `rot90(b_j)`.
pub(crate) fn short_directions(g: &[Vec2], bound: i64) -> Vec<Vec2> {
    let (mut xmax, mut ymax) = (0i64, 0i64);
    for b in g.iter().filter(|b| !b.is_zero()) {
        let d = b.rot90();
        let nd = gale_norm(g, d);
        xmax = xmax.max(bound * d.x.abs() / nd);
        ymax = ymax.max(bound * d.y.abs() / nd);
    }
    let mut out = Vec::new();
    for x in 0..=xmax {
        for y in -ymax..=ymax {
            let v = Vec2::new(x, y);
            if v.is_lex_positive() && v.is_visible() && gale_norm(g, v) <= bound {
                out.push(v);
            }
        }
    }
    out
}

/// Range of integers `k` with `|c + k s| ≤ bound`, for `s ≠ 0`.
fn k_range(c: i64, s: i64, bound: i64) -> (i64, i64) {
    if s < 0 {
        let (a, b) = k_range(c, -s, bound);
        return (-b, -a);
    }
    (
        -Integer::div_floor(&(bound + c), &s),
        Integer::div_floor(&(bound - c), &s),
    )
}

/// Pairs `(v, w)` of short directions with `v < w` and `|det(v, w)| = 1`.
pub(crate) fn unimodular_pairs(dirs: &[Vec2]) -> Vec<(Vec2, Vec2)> {
    let set: HashSet<Vec2> = dirs.iter().copied().collect();
    let xmax = dirs.iter().map(|v| v.x.abs()).max().unwrap_or(0);
    let ymax = dirs.iter().map(|v| v.y.abs()).max().unwrap_or(0);
    let mut out = Vec::new();
    for &v in dirs {
        let eg = v.x.extended_gcd(&v.y);
        // v.x s + v.y t = 1 gives det(v, (-t, s)) = 1.
        let w0 = Vec2::new(-eg.y, eg.x);
        for base in [w0, -w0] {
            let (mut klo, mut khi) = (i64::MIN, i64::MAX);
            if v.x != 0 {
                let (a, b) = k_range(base.x, v.x, xmax);
                klo = klo.max(a);
                khi = khi.min(b);
            }
            if v.y != 0 {
                let (a, b) = k_range(base.y, v.y, ymax);
                klo = klo.max(a);
                khi = khi.min(b);
            }
            if klo > khi {
                continue;
            }
            for k in klo..=khi {
                let w = base + k * v;
                if w > v && set.contains(&w) {
                    out.push((v, w));
                }
            }
        }
    }
    out.sort();
    out
}

/// Betti table over the rationals, restricted to classes of total degree `≤ horizon`.
pub fn betti_table(l: &Lattice, horizon: i64) -> Result<BettiTable> {
    betti_table_with(l, horizon, Field::Rational)
}

pub fn betti_table_with(l: &Lattice, horizon: i64, field: Field) -> Result<BettiTable> {
    let g = l.gale_vectors();
    let dirs = short_directions(&g, 2 * horizon);
    let mut candidates: Vec<Vec<Vec2>> = dirs.iter().map(|&v| vec![Vec2::ZERO, v]).collect();
    for (v, w) in unimodular_pairs(&dirs) {
        if gale_norm(&g, w - v) <= 2 * horizon {
            candidates.push(vec![Vec2::ZERO, v, w]);
        }
        candidates.push(vec![Vec2::ZERO, v, w, v + w]);
    }
    let mut entries = Vec::new();
    for shape in candidates {
        entries.extend(primitive_class_entries(&g, &shape, horizon, field)?);
    }
    Ok(BettiTable::new(entries, horizon))
}

/// Betti entries of the class whose polygon is exactly `shape`, if it is
/// realizable with total degree `≤ horizon`.
fn primitive_class_entries(
    g: &[Vec2],
    shape: &[Vec2],
    horizon: i64,
    field: Field,
) -> Result<Vec<BettiEntry>> {
    let a = tight_representative(g, shape);
    let total: i64 = a.iter().sum();
    if total > horizon {
        return Ok(Vec::new());
    }
    let mut want = shape.to_vec();
    want.sort();
    if lattice_points(g, &a)? != want {
        return Ok(Vec::new());
    }
    let supports = shape.iter().map(|&u| {
        g.iter().zip(&a).enumerate().fold(
            0u64,
            |s, (j, (b, &aj))| if aj > b.dot(u) { s | 1 << j } else { s },
        )
    });
    let h = SimplicialComplex::from_generators(supports).reduced_homology(2, field);
    Ok(h.iter()
        .enumerate()
        .filter(|(_, &r)| r > 0)
        .map(|(k, &r)| BettiEntry {
            i: k + 1,
            rep: a.clone(),
            total,
            rank: r,
        })
        .collect())
}

/// Calls `f` on every exponent vector of length `n` and total degree `d`.
pub fn for_each_monomial(n: usize, d: i64, mut f: impl FnMut(&[i64])) {
    fn rec(buf: &mut Vec<i64>, pos: usize, left: i64, f: &mut dyn FnMut(&[i64])) {
        if pos + 1 == buf.len() {
            buf[pos] = left;
            f(buf);
            return;
        }
        for x in (0..=left).rev() {
            buf[pos] = x;
            rec(buf, pos + 1, left - x, f);
        }
        buf[pos] = 0;
    }
    if n == 0 {
        return;
    }
    let mut buf = vec![0i64; n];
    rec(&mut buf, 0, d, &mut f);
}

/// Fibers of total degree `d`: canonical key, then the monomials in
/// lexicographically decreasing order.
fn fibers_of_degree(hnf: &Hnf, n: usize, d: i64) -> HashMap<Vec<i64>, Vec<Vec<i64>>> {
    let mut groups: HashMap<Vec<i64>, Vec<Vec<i64>>> = HashMap::new();
    for_each_monomial(n, d, |m| {
        let mut k = m.to_vec();
        hnf.reduce(&mut k);
        groups.entry(k).or_default().push(m.to_vec());
    });
    groups
}

/// Betti table of `S/I` for the lattice with Hermite form `hnf` (any rank), by
/// grouping every monomial of total degree `≤ horizon` into fibers.
pub fn exhaustive_betti(hnf: &Hnf, horizon: i64, max_i: usize, field: Field) -> BettiTable {
    let mut entries = Vec::new();
    for d in 1..=horizon {
        push_degree_entries(hnf, d, max_i, field, &mut entries);
    }
    BettiTable::new(entries, horizon)
}

fn push_degree_entries(
    hnf: &Hnf,
    d: i64,
    max_i: usize,
    field: Field,
    entries: &mut Vec<BettiEntry>,
) {
    for (_, mons) in fibers_of_degree(hnf, hnf.ambient(), d) {
        if mons.len() < 2 {
            continue;
        }
        let k = SimplicialComplex::from_generators(mons.iter().map(|m| support(m)));
        let h = k.reduced_homology(max_i - 1, field);
        let rep = mons.iter().min().unwrap().clone();
        for (idx, &r) in h.iter().enumerate() {
            if r > 0 {
                entries.push(BettiEntry {
                    i: idx + 1,
                    rep: rep.clone(),
                    total: d,
                    rank: r,
                });
            }
        }
    }
}

/// Exhaustive fibers of a complete intersection of codimension 2, stopped at
/// `d1 + d2` once two generators of degrees `d1 ≤ d2` have appeared (the
/// Koszul syzygy is then the last entry), or at `limit`.
pub(crate) fn ci_exhaustive_betti(hnf: &Hnf, limit: i64, field: Field) -> BettiTable {
    let mut entries = Vec::new();
    let mut d = 1;
    while d <= limit {
        push_degree_entries(hnf, d, 2, field, &mut entries);
        let gens: Vec<i64> = entries
            .iter()
            .filter(|e| e.i == 1)
            .flat_map(|e| std::iter::repeat(e.total).take(e.rank))
            .collect();
        if gens.len() >= 2 && d >= gens[0] + gens[1] {
            break;
        }
        d += 1;
    }
    BettiTable::new(entries, d.min(limit))
}

pub fn betti_table_exhaustive(l: &Lattice, horizon: i64) -> BettiTable {
    exhaustive_betti(&l.hnf(), horizon, 3, Field::Rational)
}

/// Number of fiber classes of total degree `d`.
pub fn hilbert_function(l: &Lattice, d: i64) -> u64 {
    hilbert_function_hnf(&l.hnf(), d)
}

pub fn hilbert_function_hnf(hnf: &Hnf, d: i64) -> u64 {
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    for_each_monomial(hnf.ambient(), d, |m| {
        let mut k = m.to_vec();
        hnf.reduce(&mut k);
        seen.insert(k);
    });
    seen.len() as u64
}

/// `Δ^k f` evaluated at the last index of `values`.
fn last_difference(values: &[i64], k: usize) -> Option<i64> {
    if values.len() <= k {
        return None;
    }
    let mut v = values[values.len() - 1 - k..].to_vec();
    for _ in 0..k {
        v = v.windows(2).map(|w| w[1] - w[0]).collect();
    }
    Some(v[0])
}

/// Degree from the Hilbert function of a lattice of projective dimension
/// `dim`: deepen until the `dim`-th difference is constant over `window`
/// consecutive degrees and the horizon exceeds the candidate by `margin`.
pub fn hilbert_degree_hnf(hnf: &Hnf, dim: usize, window: usize, margin: i64) -> i64 {
    let mut values: Vec<i64> = Vec::new();
    let mut d = 0i64;
    loop {
        values.push(hilbert_function_hnf(hnf, d) as i64);
        let len = values.len();
        if len > dim + window {
            let diffs: Vec<i64> = (0..window)
                .filter_map(|s| last_difference(&values[..len - s], dim))
                .collect();
            if diffs.len() == window
                && diffs.iter().all(|&x| x == diffs[0])
                && d >= diffs[0] + margin
            {
                return diffs[0];
            }
        }
        d += 1;
    }
}

/// Degree of `I_L` from its Hilbert function (independent of Betti numbers).
pub fn hilbert_degree(l: &Lattice) -> i64 {
    hilbert_degree_hnf(&l.hnf(), l.n() - 3, l.n(), 2)
}

/// Degree of `I_L` as `Σ |det(b_i, b_j)|` over pairs whose open cone contains a
/// fixed generic direction `c`, the normalized volume of the dual polytope.
pub fn degree_volume(l: &Lattice) -> i64 {
    let g = l.gale_vectors();
    let m = 1 + g.iter().map(|b| b.x.abs()).max().unwrap_or(0);
    // c lies on no ray through a nonzero b_j: that would force b_j.x ≥ m.
    let c = Vec2::new(m, 1);
    let mut deg = 0i64;
    for i in 0..g.len() {
        for j in i + 1..g.len() {
            let d = g[i].det(g[j]);
            if d == 0 {
                continue;
            }
            let s = d.signum();
            if g[i].det(c).signum() == s && c.det(g[j]).signum() == s {
                deg += d.abs();
            }
        }
    }
    deg
}

/// `(deg I_L, reg I_L, Betti table)` for a nondegenerate lattice.
///
/// The degree comes from [`degree_volume`] and is confirmed against the
/// K-polynomial of the table. Since `reg ≤ deg` for these ideals, every minimal
/// syzygy has total degree `≤ deg + 2`, so that horizon is complete.
pub fn degree_and_regularity(l: &Lattice) -> Result<(i64, i64, BettiTable)> {
    degree_and_regularity_with(l, Field::Rational)
}

pub fn degree_and_regularity_with(l: &Lattice, field: Field) -> Result<(i64, i64, BettiTable)> {
    if let Some((i, j)) = l.degeneracy_witness() {
        return Err(Error::Degenerate(i, j));
    }
    let deg = degree_volume(l);
    // Primitive polygons carry every syzygy only for saturated non-CI lattices.
    let table = if crate::quadrangle::is_complete_intersection(l) {
        ci_exhaustive_betti(&l.hnf(), deg + 2, field)
    } else if l.is_saturated() {
        betti_table_with(l, deg + 2, field)?
    } else {
        exhaustive_betti(&l.hnf(), deg + 2, 3, field)
    };
    let kdeg = table.degree_from_k_polynomial(2)?;
    if kdeg != deg {
        return Err(Error::InternalInconsistency(format!(
            "degree {deg} from the Gale diagram but {kdeg} from the Betti table"
        )));
    }
    let reg = table.regularity();
    if reg > deg {
        return Err(Error::InternalInconsistency(format!(
            "regularity {reg} exceeds degree {deg}"
        )));
    }
    Ok((deg, reg, table))
}

/// `(deg, reg, table)` for the lattice with Hermite form `hnf` of any rank `c`
/// (codimension `c`), from the Hilbert function and exhaustive fibers. Used for
/// monomial curves, where `reg ≤ deg` bounds the horizon by `deg + n`.
pub fn general_degree_and_regularity(hnf: &Hnf, field: Field) -> Result<(i64, i64, BettiTable)> {
    let n = hnf.ambient();
    let c = hnf.rank();
    let dim = n - c - 1;
    let deg = hilbert_degree_hnf(hnf, dim, n, n as i64);
    let table = exhaustive_betti(hnf, deg + n as i64, n, field);
    let kdeg = table.degree_from_k_polynomial(c)?;
    if kdeg != deg {
        return Err(Error::InternalInconsistency(format!(
            "degree {deg} from the Hilbert function but {kdeg} from the Betti table"
        )));
    }
    Ok((deg, table.regularity(), table))
}
