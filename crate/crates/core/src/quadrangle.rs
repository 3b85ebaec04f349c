//! Complete-intersection and Cohen–Macaulay tests, syzygy quadrangles, and
//! regularity without homology.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiberhom::{self, short_directions, tight_representative, unimodular_pairs};
use crate::zlattice::{GaleDiagram, Lattice, Mat2, Vec2};

/// A primitive parallelogram `[v, w] = conv{0, v, w, v+w}` with `|det(v, w)| = 1`
/// whose four vertices are each the unique maximizer of some `b·u`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SyzygyQuadrangle {
    pub v: Vec2,
    pub w: Vec2,
    pub rep: Vec<i64>,
    pub total: i64,
}

/// Whether each of the four open sectors cut out by `v` and `w` holds a Gale vector.
pub fn is_syzygy_quadrangle(g: &[Vec2], v: Vec2, w: Vec2) -> bool {
    if v.det(w).abs() != 1 {
        return false;
    }
    let mut seen = [false; 4];
    for b in g {
        let (s, t) = (b.dot(v).signum(), b.dot(w).signum());
        match (s, t) {
            (1, 1) => seen[0] = true,
            (-1, 1) => seen[1] = true,
            (-1, -1) => seen[2] = true,
            (1, -1) => seen[3] = true,
            _ => {}
        }
    }
    seen.iter().all(|&x| x)
}

/// `Σ_j max(0, b_j·v, b_j·w, b_j·(v+w))`.
pub fn quadrangle_total(g: &[Vec2], v: Vec2, w: Vec2) -> i64 {
    g.iter()
        .map(|b| 0.max(b.dot(v)).max(b.dot(w)).max(b.dot(v + w)))
        .sum()
}

fn make(g: &[Vec2], v: Vec2, w: Vec2) -> SyzygyQuadrangle {
    let rep = tight_representative(g, &[Vec2::ZERO, v, w, v + w]);
    let total = rep.iter().sum();
    SyzygyQuadrangle { v, w, rep, total }
}

/// Some `U ∈ GL2(Z)` making the diagram imbalanced: every transformed vector is
/// on the y-axis or has nonpositive y-coordinate.
///
/// The y-axis must be parallel to a Gale vector: otherwise every vector would
/// lie in an open half-plane plus the origin, impossible for a spanning
/// zero-sum set. For a primitive direction `v` the functionals taking the value
/// 1 on `v` are `u0 + kω` with `ω ⟂ v`; each remaining vector bounds `k` on one side.
pub fn imbalancing_transform(g: &[Vec2]) -> Option<Mat2> {
    let mut dirs: Vec<Vec2> = Vec::new();
    for b in g.iter().filter(|b| !b.is_zero()) {
        let gc = b.x.gcd(&b.y);
        let p = Vec2::new(b.x / gc, b.y / gc);
        for d in [p, -p] {
            if !dirs.contains(&d) {
                dirs.push(d);
            }
        }
    }
    for v in dirs {
        let eg = v.x.extended_gcd(&v.y);
        let u0 = Vec2::new(eg.x, eg.y);
        let omega = Vec2::new(-v.y, v.x);
        let (mut lo, mut hi) = (i64::MIN, i64::MAX);
        for b in g.iter().filter(|b| !b.parallel(v)) {
            // (u0 + kω)·b ≤ 0  ⟺  k (ω·b) ≤ -(u0·b), with ω·b ≠ 0.
            let (c, s) = (-u0.dot(*b), omega.dot(*b));
            if s > 0 {
                hi = hi.min(Integer::div_floor(&c, &s));
            } else {
                lo = lo.max(-Integer::div_floor(&c, &-s));
            }
        }
        if lo <= hi {
            let k = if lo == i64::MIN { hi.min(0) } else { lo };
            let u = u0 + k * omega;
            // det = v·u = 1; vectors parallel to v land on the y-axis.
            return Some(Mat2::from_columns(Vec2::new(v.y, -v.x), u));
        }
    }
    None
}

/// `I_L` is a complete intersection iff some Gale diagram of `L` is imbalanced.
pub fn is_complete_intersection(l: &Lattice) -> bool {
    imbalancing_transform(&l.gale_vectors()).is_some()
}

/// Every syzygy quadrangle of total degree `≤ bound`, canonically placed with
/// `0 < v < w` lexicographically. Each edge `e` satisfies
/// `Σ_j |b_j·e| = 2 · total([0, e]) ≤ 2 · total`, which bounds the search.
pub fn enumerate_syzygy_quadrangles(l: &Lattice, bound: i64) -> Result<Vec<SyzygyQuadrangle>> {
    if is_complete_intersection(l) {
        return Err(Error::PreconditionCI);
    }
    Ok(quadrangles_unchecked(&l.gale_vectors(), bound))
}

pub(crate) fn quadrangles_unchecked(g: &[Vec2], bound: i64) -> Vec<SyzygyQuadrangle> {
    let dirs = short_directions(g, 2 * bound);
    let mut out: Vec<SyzygyQuadrangle> = unimodular_pairs(&dirs)
        .into_iter()
        .filter(|&(v, w)| is_syzygy_quadrangle(g, v, w) && quadrangle_total(g, v, w) <= bound)
        .map(|(v, w)| make(g, v, w))
        .collect();
    out.sort_by(|a, b| (a.total, a.v, a.w).cmp(&(b.total, b.v, b.w)));
    out
}

/// CI, or no syzygy quadrangle up to the complete horizon `deg + 2`.
pub fn is_cohen_macaulay(l: &Lattice) -> bool {
    let g = l.gale_vectors();
    imbalancing_transform(&g).is_some()
        || quadrangles_unchecked(&g, fiberhom::degree_volume(l) + 2).is_empty()
}

/// Regularity of `I_L`: `max total − 2` over syzygy quadrangles when not
/// Cohen–Macaulay, the Koszul value for complete intersections, and the Betti
/// oracle otherwise.
pub fn regularity_fast(l: &Lattice) -> Result<i64> {
    let g = l.gale_vectors();
    let deg = fiberhom::degree_volume(l);
    if imbalancing_transform(&g).is_some() {
        let table = fiberhom::ci_exhaustive_betti(&l.hnf(), deg + 2, fiberhom::Field::Rational);
        let gens: Vec<i64> = table
            .at(1)
            .flat_map(|e| std::iter::repeat(e.total).take(e.rank))
            .collect();
        return Ok(gens.iter().sum::<i64>() - gens.len() as i64 + 1);
    }
    let quads = quadrangles_unchecked(&g, deg + 2);
    if let Some(top) = quads.iter().map(|q| q.total).max() {
        return Ok(top - 2);
    }
    Ok(fiberhom::degree_and_regularity(l)?.1)
}

/// Total degrees of minimal generators up to `bound`, with multiplicity, from
/// exhaustive fibers. Two generators can share a fiber when Gale vectors repeat.
pub fn generator_degrees(l: &Lattice, bound: i64) -> Vec<i64> {
    let table = fiberhom::exhaustive_betti(&l.hnf(), bound, 1, fiberhom::Field::Rational);
    let mut out: Vec<i64> = table
        .entries
        .iter()
        .filter(|e| e.i == 1)
        .flat_map(|e| std::iter::repeat(e.total).take(e.rank))
        .collect();
    out.sort();
    out
}

/// A Gale diagram of `L` in which the unit square is a syzygy quadrangle of
/// maximal total degree, with `U` mapping the input diagram to it.
pub fn normalize_unit_square(l: &Lattice) -> Result<(GaleDiagram, Mat2)> {
    let g = l.gale_vectors();
    if imbalancing_transform(&g).is_some() {
        return Err(Error::PreconditionCM);
    }
    let quads = quadrangles_unchecked(&g, fiberhom::degree_volume(l) + 2);
    let Some(top) = quads.iter().map(|q| q.total).max() else {
        return Err(Error::PreconditionCM);
    };
    let (e1, e2) = (Vec2::new(1, 0), Vec2::new(0, 1));
    if is_syzygy_quadrangle(&g, e1, e2) && quadrangle_total(&g, e1, e2) == top {
        return Ok((l.gale(), Mat2::IDENTITY));
    }
    let best = quads
        .iter()
        .filter(|q| q.total == top)
        .min_by_key(|q| (q.v, q.w))
        .unwrap();
    let u = Mat2::from_columns(best.v, best.w);
    Ok((l.gale().transform(&u), u))
}
