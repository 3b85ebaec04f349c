//! Reduction of a non-Cohen–Macaulay lattice to a lattice in `Z^4` by merging
//! the Gale vectors of each closed quadrant.
//!
//! A reduction datum is a Gale diagram meeting all four open quadrants (so the
//! unit square is a syzygy quadrangle) with a partition `Q1..Q4` of its indices
//! where `Q_i` lies in the `i`-th closed quadrant. The reduced diagram `G_Q`
//! has the four quadrant sums as rows. Indices are 0-based throughout.

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiberhom;
use crate::quadrangle::{is_syzygy_quadrangle, quadrangle_total, SyzygyQuadrangle};
use crate::zlattice::{GaleDiagram, Lattice, Vec2};

/// Index sets `Q1..Q4` (stored at positions `0..4`).
pub type Partition = [Vec<usize>; 4];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionDatum {
    pub lattice: Lattice,
    pub gale: GaleDiagram,
    pub partition: Partition,
}

impl ReductionDatum {
    pub fn new(gale: GaleDiagram, partition: Partition) -> Result<Self> {
        if !gale.meets_all_open_quadrants() {
            return Err(Error::NotAllQuadrants);
        }
        let n = gale.len();
        let mut seen = vec![false; n];
        for (q, part) in partition.iter().enumerate() {
            for &j in part {
                if j >= n {
                    return Err(Error::InvalidPartition(format!("index {j} out of range")));
                }
                if std::mem::replace(&mut seen[j], true) {
                    return Err(Error::InvalidPartition(format!("index {j} assigned twice")));
                }
                if !gale.vectors()[j].in_closed_quadrant(q + 1) {
                    return Err(Error::InvalidPartition(format!(
                        "vector {j} = {} is not in closed quadrant {}",
                        gale.vectors()[j],
                        q + 1
                    )));
                }
            }
        }
        if let Some(j) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!("index {j} not assigned")));
        }
        let lattice = Lattice::from_gale(&gale)?;
        Ok(ReductionDatum {
            lattice,
            gale,
            partition,
        })
    }

    /// Vectors of `Q_q`, `q ∈ 1..=4`.
    pub fn part(&self, q: usize) -> Vec<Vec2> {
        self.partition[q - 1]
            .iter()
            .map(|&j| self.gale.vectors()[j])
            .collect()
    }

    fn union(&self, i: usize, j: usize) -> Vec<Vec2> {
        let mut v = self.part(i);
        v.extend(self.part(j));
        v
    }

    fn pair_sum(&self, i: usize, j: usize) -> Vec2 {
        self.union(i, j).into_iter().fold(Vec2::ZERO, |s, b| s + b)
    }
}

/// All partitions in lexicographic order of branch choices: interior vectors
/// go to their quadrant, axis vectors to either adjacent one, zero vectors anywhere.
pub fn enumerate_partitions(g: &GaleDiagram) -> Result<Vec<Partition>> {
    if !g.meets_all_open_quadrants() {
        return Err(Error::NotAllQuadrants);
    }
    let choices: Vec<Vec<usize>> = g
        .vectors()
        .iter()
        .map(|&b| (1..=4).filter(|&q| b.in_closed_quadrant(q)).collect())
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; choices.len()];
    loop {
        let mut p: Partition = Default::default();
        for (j, &c) in pick.iter().enumerate() {
            p[choices[j][c] - 1].push(j);
        }
        out.push(p);
        // odometer, last index fastest
        let mut k = choices.len();
        loop {
            if k == 0 {
                return Ok(out);
            }
            k -= 1;
            pick[k] += 1;
            if pick[k] < choices[k].len() {
                break;
            }
            pick[k] = 0;
        }
    }
}

/// `G_Q` and the lattice `L_Q ⊆ Z^4` with those rows.
pub fn reduced_gale(d: &ReductionDatum) -> (GaleDiagram, Lattice) {
    let rows: Vec<Vec2> = (1..=4)
        .map(|q| d.part(q).into_iter().fold(Vec2::ZERO, |s, b| s + b))
        .collect();
    let lattice = Lattice::from_rows(&rows).expect("quadrant sums lie in distinct open quadrants");
    (lattice.gale(), lattice)
}

pub fn is_perfectly_balanced(d: &ReductionDatum) -> bool {
    d.pair_sum(1, 3).is_zero() && d.pair_sum(2, 4).is_zero()
}

/// Shape of the side opposite the two-vector side of a simple pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum SimpleShape {
    /// `{-v, -w}`
    Negatives,
    /// `{-v-w}`
    NegatedSum,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimpleWitness {
    /// Quadrant holding exactly the two nonzero vectors `v`, `w`.
    pub side: usize,
    pub v: Vec2,
    pub w: Vec2,
    pub shape: SimpleShape,
}

fn sorted_nonzero(vs: Vec<Vec2>) -> Vec<Vec2> {
    let mut v: Vec<Vec2> = vs.into_iter().filter(|b| !b.is_zero()).collect();
    v.sort();
    v
}

/// Whether the datum is `{i, j}`-simple, with a witness.
pub fn is_simple(d: &ReductionDatum, pair: (usize, usize)) -> Result<Option<SimpleWitness>> {
    let (i, j) = pair;
    if !d.pair_sum(i, j).is_zero() {
        return Err(Error::PreconditionUnbalancedPair);
    }
    for (s, t) in [(i, j), (j, i)] {
        let here: Vec<Vec2> = d.part(s).into_iter().filter(|b| !b.is_zero()).collect();
        if here.len() != 2 || here[0].det(here[1]).abs() != 1 {
            continue;
        }
        let (v, w) = (here[0], here[1]);
        let there = sorted_nonzero(d.part(t));
        let mut neg = vec![-v, -w];
        neg.sort();
        if there == neg {
            return Ok(Some(SimpleWitness {
                side: s,
                v,
                w,
                shape: SimpleShape::Negatives,
            }));
        }
        if there == vec![-v - w] {
            return Ok(Some(SimpleWitness {
                side: s,
                v,
                w,
                shape: SimpleShape::NegatedSum,
            }));
        }
    }
    Ok(None)
}

/// The sets `A_i`, `B_i`, `C_i = A_i ∪ B_i` for the opposite pair `{i, j}`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportSets {
    pub a: Vec<Vec2>,
    pub b: Vec<Vec2>,
    pub c: Vec<Vec2>,
    /// Some defining system had a whole line of solutions; only the two
    /// shortest were recorded.
    pub degenerate: bool,
}

/// `u` with `v1·u = 1`, `v_{-1}·u = -1` and `b·u = 0` for the rest of `Q_i ∪ Q_j`,
/// where `v1 ∈ Q_i` and `v_{-1} ∈ Q_i` (for `A_i`) or `Q_j` (for `B_i`).
pub fn support_sets(d: &ReductionDatum, i: usize) -> SupportSets {
    let j = (i + 1) % 4 + 1;
    let qi = &d.partition[i - 1];
    let qj = &d.partition[j - 1];
    let g = d.gale.vectors();
    let union: Vec<usize> = qi.iter().chain(qj).copied().collect();
    let mut out = SupportSets::default();
    for &p in qi {
        for (&q, into_b) in qi
            .iter()
            .map(|q| (q, false))
            .chain(qj.iter().map(|q| (q, true)))
        {
            if p == q {
                continue;
            }
            let mut eqs = vec![(g[p], 1i64), (g[q], -1i64)];
            eqs.extend(
                union
                    .iter()
                    .filter(|&&k| k != p && k != q)
                    .map(|&k| (g[k], 0)),
            );
            let (sols, degenerate) = solve_system(&eqs);
            out.degenerate |= degenerate;
            let target = if into_b { &mut out.b } else { &mut out.a };
            target.extend(sols);
        }
    }
    for s in [&mut out.a, &mut out.b] {
        s.sort();
        s.dedup();
    }
    out.c = out.a.iter().chain(&out.b).copied().collect();
    out.c.sort();
    out.c.dedup();
    out
}

/// Integer solutions of `b·u = r` for all `(b, r)`. A one-parameter family is
/// reported by its two shortest members and the degenerate flag.
fn solve_system(eqs: &[(Vec2, i64)]) -> (Vec<Vec2>, bool) {
    let holds = |u: Vec2| eqs.iter().all(|&(b, r)| b.dot(u) == r);
    if eqs.iter().any(|&(b, r)| b.is_zero() && r != 0) {
        return (vec![], false);
    }
    let normals: Vec<Vec2> = eqs.iter().map(|e| e.0).collect();
    if let Some((s, t)) = crate::zlattice::independent_pair(&normals) {
        let (b1, r1) = eqs[s];
        let (b2, r2) = eqs[t];
        let det = b1.det(b2);
        let nx = r1 * b2.y - r2 * b1.y;
        let ny = b1.x * r2 - b2.x * r1;
        if nx % det != 0 || ny % det != 0 {
            return (vec![], false);
        }
        let u = Vec2::new(nx / det, ny / det);
        return (if holds(u) { vec![u] } else { vec![] }, false);
    }
    // All normals on one line through a primitive direction.
    let Some(&(b0, r0)) = eqs.iter().find(|e| !e.0.is_zero()) else {
        return (vec![], true);
    };
    let gc = b0.x.gcd(&b0.y);
    if r0 % gc != 0 {
        return (vec![], false);
    }
    let dir = Vec2::new(b0.x / gc, b0.y / gc);
    let eg = dir.x.extended_gcd(&dir.y);
    let u0 = (r0 / gc) * Vec2::new(eg.x, eg.y);
    if !holds(u0) {
        return (vec![], false);
    }
    let omega = dir.rot90();
    let size = |u: Vec2| u.x.abs() + u.y.abs();
    let mut fam: Vec<Vec2> = (-(size(u0) + 2)..=(size(u0) + 2))
        .map(|k| u0 + k * omega)
        .collect();
    fam.sort_by_key(|&u| (size(u), u));
    fam.truncate(2);
    (fam, true)
}

/// A nonzero `u` with `v·u ≥ 0` for every input, if the inputs lie in a closed
/// half-plane. When one exists, one exists whose boundary contains an input.
pub fn halfspace_witness(vs: &[Vec2]) -> Option<Vec2> {
    let nz: Vec<Vec2> = vs.iter().copied().filter(|v| !v.is_zero()).collect();
    if nz.is_empty() {
        return Some(Vec2::new(1, 0));
    }
    for d in &nz {
        let gc = d.x.gcd(&d.y);
        for u in [
            Vec2::new(d.y / gc, -d.x / gc),
            Vec2::new(-d.y / gc, d.x / gc),
        ] {
            if nz.iter().all(|v| v.dot(u) >= 0) {
                return Some(u);
            }
        }
    }
    None
}

/// Whether `Q1 ∪ Q3` and `Q2 ∪ Q4` each lie in a closed half-plane.
pub fn degree_preserved(d: &ReductionDatum) -> bool {
    halfspace_witness(&d.union(1, 3)).is_some() && halfspace_witness(&d.union(2, 4)).is_some()
}

fn collinear(vs: &[Vec2]) -> bool {
    let nz: Vec<Vec2> = vs.iter().copied().filter(|v| !v.is_zero()).collect();
    nz.windows(2).all(|w| w[0].parallel(w[1]))
}

/// The opposite pair `{i, j}` whose complement is collinear and which is simple.
pub fn drop_one_pair(d: &ReductionDatum) -> Result<Option<((usize, usize), SimpleWitness)>> {
    if !is_perfectly_balanced(d) {
        return Err(Error::PreconditionNotBalanced);
    }
    for (pair, other) in [((1, 3), (2, 4)), ((2, 4), (1, 3))] {
        if collinear(&d.union(other.0, other.1)) {
            if let Some(w) = is_simple(d, pair)? {
                return Ok(Some((pair, w)));
            }
        }
    }
    Ok(None)
}

/// Criterion for `deg I_Q = deg I_L - 1` on a perfectly balanced datum.
pub fn degree_drop_one(d: &ReductionDatum) -> Result<bool> {
    Ok(drop_one_pair(d)?.is_some())
}

/// The syzygy quadrangle of `I_Q` that `I_L` lacks: the simple pair rotated by a
/// right angle, `(x, y) ↦ (-y, x)`. Its total is at least the unit square's.
pub fn new_quadrangle(d: &ReductionDatum) -> Result<SyzygyQuadrangle> {
    let Some((_, wit)) = drop_one_pair(d)? else {
        return Err(Error::PreconditionShape);
    };
    let (g4, _) = reduced_gale(d);
    let g4 = g4.vectors();
    let (v, w) = (wit.v.rot90(), wit.w.rot90());
    if !is_syzygy_quadrangle(g4, v, w) {
        return Err(Error::InternalInconsistency(
            "rotated simple pair is not a syzygy quadrangle".into(),
        ));
    }
    let total = quadrangle_total(g4, v, w);
    let unit = quadrangle_total(g4, Vec2::new(1, 0), Vec2::new(0, 1));
    if total < unit {
        return Err(Error::InternalInconsistency(format!(
            "new quadrangle total {total} below unit square total {unit}"
        )));
    }
    let rep = fiberhom::tight_representative(g4, &[Vec2::ZERO, v, w, v + w]);
    Ok(SyzygyQuadrangle { v, w, rep, total })
}

/// The eight transforms generated by swapping coordinates and flipping signs.
pub fn dihedral_images(vs: &[Vec2]) -> Vec<Vec<Vec2>> {
    let mut out = Vec::with_capacity(8);
    for swap in [false, true] {
        for sx in [1, -1] {
            for sy in [1, -1] {
                let mut img: Vec<Vec2> = vs
                    .iter()
                    .map(|b| {
                        let (x, y) = if swap { (b.y, b.x) } else { (b.x, b.y) };
                        Vec2::new(sx * x, sy * y)
                    })
                    .collect();
                img.sort();
                out.push(img);
            }
        }
    }
    out
}

/// `(a, b)` when a four-vector diagram is, up to dihedral symmetry,
/// `{(1,1),(a,-b),(-1,-1),(-a,b)}` or `{(1,a),(1,-b),(-1,-a),(-1,b)}` with `a, b ≥ 1`.
/// These are exactly the four-vector diagrams with `reg = deg = a + b` and the
/// unit square attaining the regularity.
pub fn match_reg_eq_deg_form(vs: &[Vec2]) -> Option<(i64, i64)> {
    if vs.len() != 4 {
        return None;
    }
    let forms = |a: i64, b: i64| {
        let mut f1 = vec![
            Vec2::new(1, 1),
            Vec2::new(a, -b),
            Vec2::new(-1, -1),
            Vec2::new(-a, b),
        ];
        let mut f2 = vec![
            Vec2::new(1, a),
            Vec2::new(1, -b),
            Vec2::new(-1, -a),
            Vec2::new(-1, b),
        ];
        f1.sort();
        f2.sort();
        [f1, f2]
    };
    let m = vs
        .iter()
        .map(|v| v.x.abs().max(v.y.abs()))
        .max()
        .unwrap_or(0);
    for img in dihedral_images(vs) {
        for a in 1..=m {
            for b in 1..=m {
                if forms(a, b).contains(&img) {
                    return Some((a, b));
                }
            }
        }
    }
    None
}

/// `(deg I_L, reg I_L, deg I_Q, reg I_Q)` from the oracles.
pub fn chain_values(d: &ReductionDatum) -> Result<(i64, i64, i64, i64)> {
    let (dl, rl, _) = fiberhom::degree_and_regularity(&d.lattice)?;
    let (_, lq) = reduced_gale(d);
    let (dq, rq, _) = fiberhom::degree_and_regularity(&lq)?;
    Ok((dl, rl, dq, rq))
}

/// First partition of `G` (in enumeration order) whose reduced lattice has
/// `reg = deg`.
pub fn find_reg_eq_deg_partition(g: &GaleDiagram) -> Result<Option<Partition>> {
    for p in enumerate_partitions(g)? {
        let d = ReductionDatum::new(g.clone(), p.clone())?;
        let (_, lq) = reduced_gale(&d);
        let (deg, reg, _) = fiberhom::degree_and_regularity(&lq)?;
        if reg == deg {
            return Ok(Some(p));
        }
    }
    Ok(None)
}
