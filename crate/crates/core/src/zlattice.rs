//! Exact integer-lattice core.
//!
//! A [`Lattice`] is a rank-2 sublattice of `Z^n` orthogonal to `(1,…,1)`, stored
//! through the basis the caller supplied. Its [`GaleDiagram`] is the list of rows
//! of that basis matrix. Lattice equality is decided through a Hermite
//! normal form ([`Hnf`]); equality up to coordinate permutation through
//! [`Lattice::permutation_key`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use itertools::Itertools;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest accepted magnitude of a basis entry. Keeps every dot product and
/// 2x2 minor inside `i64`, and polygon arithmetic inside `i128`.
pub const MAX_ENTRY: i64 = 1 << 20;
pub const MAX_AMBIENT: usize = 64;

/// A point of `Z^2`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(from = "[i64; 2]", into = "[i64; 2]")]
pub struct Vec2 {
    pub x: i64,
    pub y: i64,
}

impl From<[i64; 2]> for Vec2 {
    fn from(a: [i64; 2]) -> Self {
        Vec2 { x: a[0], y: a[1] }
    }
}

impl From<Vec2> for [i64; 2] {
    fn from(v: Vec2) -> Self {
        [v.x, v.y]
    }
}

impl From<(i64, i64)> for Vec2 {
    fn from(a: (i64, i64)) -> Self {
        Vec2 { x: a.0, y: a.1 }
    }
}

impl fmt::Debug for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl fmt::Display for Vec2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.x, self.y)
    }
}

impl Ord for Vec2 {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.x, self.y).cmp(&(other.x, other.y))
    }
}

impl PartialOrd for Vec2 {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

impl Mul<Vec2> for i64 {
    type Output = Vec2;
    fn mul(self, v: Vec2) -> Vec2 {
        Vec2::new(self * v.x, self * v.y)
    }
}

impl Vec2 {
    pub const ZERO: Vec2 = Vec2 { x: 0, y: 0 };

    pub const fn new(x: i64, y: i64) -> Self {
        Vec2 { x, y }
    }

    #[inline]
    pub fn dot(self, o: Vec2) -> i64 {
        self.x * o.x + self.y * o.y
    }

    /// `det(self, o)` with `self` and `o` as columns.
    #[inline]
    pub fn det(self, o: Vec2) -> i64 {
        self.x * o.y - self.y * o.x
    }

    pub fn is_zero(self) -> bool {
        self.x == 0 && self.y == 0
    }

    /// Nonzero with coprime coordinates.
    pub fn is_visible(self) -> bool {
        !self.is_zero() && self.x.gcd(&self.y) == 1
    }

    /// Counterclockwise rotation by a right angle.
    pub fn rot90(self) -> Vec2 {
        Vec2::new(-self.y, self.x)
    }

    /// Lexicographically greater than zero.
    pub fn is_lex_positive(self) -> bool {
        self.x > 0 || (self.x == 0 && self.y > 0)
    }

    pub fn parallel(self, o: Vec2) -> bool {
        self.det(o) == 0
    }

    /// Row vector times matrix.
    pub fn apply(self, u: &Mat2) -> Vec2 {
        Vec2::new(
            self.x * u.0[0][0] + self.y * u.0[1][0],
            self.x * u.0[0][1] + self.y * u.0[1][1],
        )
    }

    /// Open quadrant index 1..=4 (counterclockwise from the positive one), or
    /// `None` on an axis.
    pub fn open_quadrant(self) -> Option<usize> {
        match (self.x.signum(), self.y.signum()) {
            (1, 1) => Some(1),
            (-1, 1) => Some(2),
            (-1, -1) => Some(3),
            (1, -1) => Some(4),
            _ => None,
        }
    }

    /// Whether the vector lies in the closed quadrant `q` (1..=4).
    pub fn in_closed_quadrant(self, q: usize) -> bool {
        match q {
            1 => self.x >= 0 && self.y >= 0,
            2 => self.x <= 0 && self.y >= 0,
            3 => self.x <= 0 && self.y <= 0,
            4 => self.x >= 0 && self.y <= 0,
            _ => false,
        }
    }
}

/// A 2x2 integer matrix, row-major. Gale vectors transform as row vectors: `b ↦ b U`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Mat2(pub [[i64; 2]; 2]);

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2([[1, 0], [0, 1]]);

    /// Matrix with the given vectors as columns.
    pub fn from_columns(c1: Vec2, c2: Vec2) -> Mat2 {
        Mat2([[c1.x, c2.x], [c1.y, c2.y]])
    }

    pub fn det(&self) -> i64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn is_unimodular(&self) -> bool {
        self.det().abs() == 1
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &o.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    /// Inverse of a unimodular matrix.
    pub fn unimodular_inverse(&self) -> Option<Mat2> {
        let d = self.det();
        if d.abs() != 1 {
            return None;
        }
        let a = &self.0;
        Some(Mat2([
            [a[1][1] * d, -a[0][1] * d],
            [-a[1][0] * d, a[0][0] * d],
        ]))
    }
}

/// Ordered list of Gale vectors, the rows of a basis matrix.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GaleDiagram {
    vectors: Vec<Vec2>,
}

impl fmt::Debug for GaleDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.vectors.iter()).finish()
    }
}

impl GaleDiagram {
    /// Checks the zero-sum and spanning invariants.
    pub fn new(vectors: Vec<Vec2>) -> Result<Self> {
        let sum = vectors.iter().fold(Vec2::ZERO, |s, &v| s + v);
        if !sum.is_zero() {
            return Err(Error::GaleNotBalanced);
        }
        if !spans_plane(&vectors) {
            return Err(Error::RankDeficient);
        }
        Ok(GaleDiagram { vectors })
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&p| Vec2::from(p)).collect())
    }

    pub fn vectors(&self) -> &[Vec2] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn transform(&self, u: &Mat2) -> GaleDiagram {
        GaleDiagram {
            vectors: self.vectors.iter().map(|b| b.apply(u)).collect(),
        }
    }

    pub fn nonzero(&self) -> Vec<Vec2> {
        self.vectors
            .iter()
            .copied()
            .filter(|v| !v.is_zero())
            .collect()
    }

    /// Whether every open quadrant contains a vector.
    pub fn meets_all_open_quadrants(&self) -> bool {
        let mut seen = [false; 5];
        for v in &self.vectors {
            if let Some(q) = v.open_quadrant() {
                seen[q] = true;
            }
        }
        seen[1..].iter().all(|&s| s)
    }

    /// Whether the vectors lie on (at most) two lines through the origin.
    pub fn on_two_lines(&self) -> bool {
        let nz = self.nonzero();
        let mut dirs: Vec<Vec2> = Vec::new();
        for v in nz {
            if !dirs.iter().any(|d| d.parallel(v)) {
                dirs.push(v);
            }
        }
        dirs.len() <= 2
    }

    pub fn into_lattice(self) -> Result<Lattice> {
        Lattice::from_gale(&self)
    }
}

pub(crate) fn spans_plane(vs: &[Vec2]) -> bool {
    independent_pair(vs).is_some()
}

/// First pair of indices `(i, j)`, `i < j`, with `det(v_i, v_j) != 0`.
pub(crate) fn independent_pair(vs: &[Vec2]) -> Option<(usize, usize)> {
    let first = vs.iter().position(|v| !v.is_zero())?;
    (first + 1..vs.len())
        .find(|&j| vs[first].det(vs[j]) != 0)
        .map(|j| (first, j))
}

/// Row-style Hermite normal form of a lattice given by generating rows: rows
/// with strictly increasing pivot columns, positive pivots, zeros before each
/// pivot, and entries above a pivot reduced into `[0, pivot)`. Unique for the
/// lattice.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hnf {
    pub pivots: Vec<usize>,
    pub rows: Vec<Vec<i64>>,
}

impl Hnf {
    /// Hermite form of the rank-2 lattice spanned by two vectors.
    pub fn compute(c1: &[i64], c2: &[i64]) -> Result<Hnf> {
        let h = Hnf::from_rows(&[c1.to_vec(), c2.to_vec()])?;
        if h.rank() != 2 {
            return Err(Error::RankDeficient);
        }
        Ok(h)
    }

    /// Hermite form of the lattice generated by `rows` (any rank).
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Hnf> {
        let n = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch);
        }
        let mut m: Vec<Vec<i128>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| x as i128).collect())
            .collect();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for c in 0..n {
            if rank == m.len() {
                break;
            }
            // Euclid down column c until a single nonzero entry remains at `rank`.
            loop {
                let piv = (rank..m.len())
                    .filter(|&r| m[r][c] != 0)
                    .min_by_key(|&r| m[r][c].abs());
                let Some(p) = piv else { break };
                m.swap(rank, p);
                let mut clean = true;
                for r in rank + 1..m.len() {
                    if m[r][c] == 0 {
                        continue;
                    }
                    let q = Integer::div_floor(&m[r][c], &m[rank][c]);
                    sub_row(&mut m, r, rank, q)?;
                    if m[r][c] != 0 {
                        clean = false;
                    }
                }
                if clean {
                    break;
                }
            }
            if m.get(rank).map_or(true, |r| r[c] == 0) {
                continue;
            }
            if m[rank][c] < 0 {
                m[rank].iter_mut().for_each(|x| *x = -*x);
            }
            for r in 0..rank {
                let q = Integer::div_floor(&m[r][c], &m[rank][c]);
                if q != 0 {
                    sub_row(&mut m, r, rank, q)?;
                }
            }
            pivots.push(c);
            rank += 1;
        }
        m.truncate(rank);
        let rows = m
            .into_iter()
            .map(|r| {
                r.into_iter()
                    .map(|x| i64::try_from(x).map_err(|_| Error::Overflow))
                    .collect()
            })
            .collect::<Result<Vec<Vec<i64>>>>()?;
        Ok(Hnf { pivots, rows })
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ambient(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Canonical representative of `a + L`: each pivot coordinate lands in `[0, pivot)`.
    pub fn reduce(&self, a: &mut [i64]) {
        for (row, &p) in self.rows.iter().zip(&self.pivots) {
            let q = Integer::div_floor(&a[p], &row[p]);
            if q != 0 {
                for (x, h) in a.iter_mut().zip(row) {
                    *x -= q * h;
                }
            }
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        let mut w = v.to_vec();
        self.reduce(&mut w);
        w.iter().all(|&x| x == 0)
    }

    /// All rows concatenated, used as an ordering key.
    pub fn flat(&self) -> Vec<i64> {
        self.rows.concat()
    }
}

fn sub_row(m: &mut [Vec<i128>], target: usize, src: usize, q: i128) -> Result<()> {
    let (a, b) = if target < src {
        let (lo, hi) = m.split_at_mut(src);
        (&mut lo[target], &hi[0])
    } else {
        let (lo, hi) = m.split_at_mut(target);
        (&mut hi[0], &lo[src])
    };
    for (x, y) in a.iter_mut().zip(b.iter()) {
        *x = q
            .checked_mul(*y)
            .and_then(|t| x.checked_sub(t))
            .ok_or(Error::Overflow)?;
    }
    Ok(())
}

/// Permutation-canonical key of a lattice: the lexicographically smallest
/// flattened HNF over all coordinate permutations.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey {
    pub n: usize,
    pub hnf: Vec<i64>,
}

/// Rank-2 lattice `L ⊆ Z^n`, `L ⟂ (1,…,1)`, stored through a basis `B` (n×2).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    basis: [Vec<i64>; 2],
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice{:?}", self.gale())
    }
}

impl Lattice {
    /// Wraps the two columns verbatim after validating them.
    pub fn from_basis(c1: Vec<i64>, c2: Vec<i64>) -> Result<Lattice> {
        if c1.len() != c2.len() {
            return Err(Error::DimensionMismatch);
        }
        let n = c1.len();
        if n < 3 {
            return Err(Error::AmbientTooSmall(n));
        }
        if n > MAX_AMBIENT {
            return Err(Error::AmbientTooLarge(n));
        }
        if let Some(&x) = c1.iter().chain(c2.iter()).find(|x| x.abs() > MAX_ENTRY) {
            return Err(Error::EntryTooLarge(x as i128));
        }
        if c1.iter().sum::<i64>() != 0 || c2.iter().sum::<i64>() != 0 {
            return Err(Error::NotHomogeneous);
        }
        let rows: Vec<Vec2> = c1.iter().zip(&c2).map(|(&x, &y)| Vec2::new(x, y)).collect();
        if !spans_plane(&rows) {
            return Err(Error::RankDeficient);
        }
        Ok(Lattice { basis: [c1, c2] })
    }

    pub fn from_gale(g: &GaleDiagram) -> Result<Lattice> {
        Self::from_rows(g.vectors())
    }

    pub fn from_rows(rows: &[Vec2]) -> Result<Lattice> {
        Lattice::from_basis(
            rows.iter().map(|v| v.x).collect(),
            rows.iter().map(|v| v.y).collect(),
        )
    }

    pub fn from_pairs(pairs: &[(i64, i64)]) -> Result<Lattice> {
        Self::from_rows(&pairs.iter().map(|&p| Vec2::from(p)).collect::<Vec<_>>())
    }

    /// Saturated kernel `{v ∈ Z^n : A v = 0}` of an `(n-2)×n` matrix.
    pub fn from_kernel(a: &[Vec<i64>]) -> Result<Lattice> {
        let n = a.first().map(|r| r.len()).unwrap_or(0);
        if a.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch);
        }
        let ker = integer_kernel(a)?;
        if ker.len() != 2 {
            return Err(Error::WrongRank {
                expected: n.saturating_sub(2),
                found: n - ker.len(),
            });
        }
        if ker.iter().any(|k| k.iter().sum::<i64>() != 0) {
            return Err(Error::NotHomogeneous);
        }
        let (u, v) = gauss_reduce(ker[0].clone(), ker[1].clone());
        Lattice::from_basis(u, v)
    }

    pub fn n(&self) -> usize {
        self.basis[0].len()
    }

    pub fn basis(&self) -> &[Vec<i64>; 2] {
        &self.basis
    }

    pub fn gale_vector(&self, j: usize) -> Vec2 {
        Vec2::new(self.basis[0][j], self.basis[1][j])
    }

    pub fn gale_vectors(&self) -> Vec<Vec2> {
        (0..self.n()).map(|j| self.gale_vector(j)).collect()
    }

    pub fn gale(&self) -> GaleDiagram {
        GaleDiagram {
            vectors: self.gale_vectors(),
        }
    }

    /// `B u`.
    pub fn apply(&self, u: Vec2) -> Vec<i64> {
        (0..self.n()).map(|j| self.gale_vector(j).dot(u)).collect()
    }

    /// Gcd of all 2×2 minors of `B`, i.e. the index of `L` in its saturation.
    pub fn saturation_index(&self) -> i64 {
        let g = self.gale_vectors();
        let mut d = 0i64;
        for i in 0..g.len() {
            for j in i + 1..g.len() {
                d = d.gcd(&g[i].det(g[j]));
                if d == 1 {
                    return 1;
                }
            }
        }
        d
    }

    pub fn is_saturated(&self) -> bool {
        self.saturation_index() == 1
    }

    /// A prime dividing every 2×2 minor, when `L` is not saturated.
    pub fn non_saturation_prime(&self) -> Option<i64> {
        let d = self.saturation_index();
        if d == 1 {
            return None;
        }
        (2..=d).find(|p| d % p == 0)
    }

    /// Exact membership by solving `B x = v` over the rationals.
    pub fn contains(&self, v: &[i64]) -> bool {
        if v.len() != self.n() {
            return false;
        }
        let g = self.gale_vectors();
        let Some((i, j)) = independent_pair(&g) else {
            return false;
        };
        let det = g[i].det(g[j]) as i128;
        let (vi, vj) = (v[i] as i128, v[j] as i128);
        let nx = vi * g[j].y as i128 - vj * g[i].y as i128;
        let ny = g[i].x as i128 * vj - g[j].x as i128 * vi;
        if nx % det != 0 || ny % det != 0 {
            return false;
        }
        let (x, y) = (nx / det, ny / det);
        g.iter()
            .zip(v)
            .all(|(b, &t)| b.x as i128 * x + b.y as i128 * y == t as i128)
    }

    /// No `e_i - e_j` lies in `L`.
    pub fn is_nondegenerate(&self) -> bool {
        self.degeneracy_witness().is_none()
    }

    pub fn degeneracy_witness(&self) -> Option<(usize, usize)> {
        let n = self.n();
        for i in 0..n {
            for j in i + 1..n {
                let mut v = vec![0i64; n];
                v[i] = 1;
                v[j] = -1;
                if self.contains(&v) {
                    return Some((i, j));
                }
            }
        }
        None
    }

    /// Deletes every coordinate whose Gale vector is zero.
    pub fn strip_zero_coordinates(&self) -> Result<(Lattice, usize)> {
        let keep: Vec<usize> = (0..self.n())
            .filter(|&j| !self.gale_vector(j).is_zero())
            .collect();
        let removed = self.n() - keep.len();
        if keep.len() < 3 {
            return Err(Error::AmbientTooSmall(keep.len()));
        }
        if removed == 0 {
            return Ok((self.clone(), 0));
        }
        let c1 = keep.iter().map(|&j| self.basis[0][j]).collect();
        let c2 = keep.iter().map(|&j| self.basis[1][j]).collect();
        Ok((Lattice::from_basis(c1, c2)?, removed))
    }

    pub fn nonzero_count(&self) -> usize {
        (0..self.n())
            .filter(|&j| !self.gale_vector(j).is_zero())
            .count()
    }

    /// Basis `B U` (same lattice when `U` is unimodular).
    pub fn transform(&self, u: &Mat2) -> Lattice {
        let rows: Vec<Vec2> = self.gale_vectors().iter().map(|b| b.apply(u)).collect();
        Lattice {
            basis: [
                rows.iter().map(|v| v.x).collect(),
                rows.iter().map(|v| v.y).collect(),
            ],
        }
    }

    /// Coordinates reordered: new coordinate `k` is old coordinate `perm[k]`.
    pub fn permute(&self, perm: &[usize]) -> Lattice {
        Lattice {
            basis: [
                perm.iter().map(|&j| self.basis[0][j]).collect(),
                perm.iter().map(|&j| self.basis[1][j]).collect(),
            ],
        }
    }

    pub fn hnf(&self) -> Hnf {
        Hnf::compute(&self.basis[0], &self.basis[1]).expect("validated lattice has a Hermite form")
    }

    /// Same lattice (as a set), coordinates in place.
    pub fn same_lattice(&self, other: &Lattice) -> bool {
        self.n() == other.n() && self.hnf() == other.hnf()
    }

    /// Lexicographically minimal HNF over all coordinate permutations.
    pub fn permutation_key(&self) -> CanonicalKey {
        let n = self.n();
        let mut best: Option<Vec<i64>> = None;
        for perm in (0..n).permutations(n) {
            let c1: Vec<i64> = perm.iter().map(|&j| self.basis[0][j]).collect();
            let c2: Vec<i64> = perm.iter().map(|&j| self.basis[1][j]).collect();
            let flat = Hnf::compute(&c1, &c2)
                .expect("permuted basis keeps rank")
                .flat();
            if best.as_ref().map_or(true, |b| flat < *b) {
                best = Some(flat);
            }
        }
        CanonicalKey {
            n,
            hnf: best.unwrap_or_default(),
        }
    }

    /// Complete invariant of the Gale diagram under `GL2(Z)` and permutations,
    /// hence of the lattice up to coordinate permutation; see [`orbit_key`].
    pub fn orbit_key(&self) -> Vec<Vec2> {
        orbit_key(&self.gale_vectors())
    }

    /// Lattice built from a canonical key (basis = the two HNF rows).
    pub fn from_key(key: &CanonicalKey) -> Result<Lattice> {
        let n = key.n;
        Lattice::from_basis(key.hnf[..n].to_vec(), key.hnf[n..].to_vec())
    }
}

// Free-function forms of the constructors and predicates above.

pub fn lattice_from_basis(c1: Vec<i64>, c2: Vec<i64>) -> Result<Lattice> {
    Lattice::from_basis(c1, c2)
}

pub fn kernel_lattice(a: &[Vec<i64>]) -> Result<Lattice> {
    Lattice::from_kernel(a)
}

pub fn gale_diagram(l: &Lattice) -> GaleDiagram {
    l.gale()
}

pub fn is_saturated(l: &Lattice) -> bool {
    l.is_saturated()
}

pub fn is_nondegenerate(l: &Lattice) -> bool {
    l.is_nondegenerate()
}

pub fn strip_zero_coordinates(l: &Lattice) -> Result<(Lattice, usize)> {
    l.strip_zero_coordinates()
}

/// Whether some `U ∈ GL2(Z)` maps `g` onto `h`, as sequences or (with
/// `up_to_permutation`) as multisets.
pub fn gale_equivalent(g: &GaleDiagram, h: &GaleDiagram, up_to_permutation: bool) -> bool {
    gale_equivalence_witness(g.vectors(), h.vectors(), up_to_permutation).is_some()
}

/// The transformation found by [`gale_equivalent`], if any.
pub fn gale_equivalence_witness(g: &[Vec2], h: &[Vec2], up_to_permutation: bool) -> Option<Mat2> {
    if g.len() != h.len() {
        return None;
    }
    let (i, j) = independent_pair(g)?;
    let m = Mat2([[g[i].x, g[i].y], [g[j].x, g[j].y]]);
    let dm = m.det();
    let target_sorted = if up_to_permutation {
        let mut t = h.to_vec();
        t.sort();
        Some(t)
    } else {
        None
    };
    let pairs: Vec<(usize, usize)> = if up_to_permutation {
        (0..h.len())
            .flat_map(|k| (0..h.len()).filter(move |&l| l != k).map(move |l| (k, l)))
            .collect()
    } else {
        vec![(i, j)]
    };
    for (k, l) in pairs {
        if h[k].det(h[l]).abs() != dm.abs() {
            continue;
        }
        // Solve M U = [h_k; h_l]: U = adj(M) [h_k; h_l] / det M.
        let adj = [[m.0[1][1], -m.0[0][1]], [-m.0[1][0], m.0[0][0]]];
        let rhs = [[h[k].x, h[k].y], [h[l].x, h[l].y]];
        let mut u = [[0i64; 2]; 2];
        let mut integral = true;
        for r in 0..2 {
            for c in 0..2 {
                let num = adj[r][0] * rhs[0][c] + adj[r][1] * rhs[1][c];
                if num % dm != 0 {
                    integral = false;
                }
                u[r][c] = num / dm;
            }
        }
        let u = Mat2(u);
        if !integral || !u.is_unimodular() {
            continue;
        }
        let image: Vec<Vec2> = g.iter().map(|b| b.apply(&u)).collect();
        let ok = match &target_sorted {
            Some(t) => {
                let mut s = image;
                s.sort();
                s == *t
            }
            None => image == h,
        };
        if ok {
            return Some(u);
        }
    }
    None
}

/// `U ∈ GL2(Z)` with `[p; q] U = [[a, 0], [c, d]]`, `a, d > 0`, `0 ≤ c < d`.
/// Unique for independent `p`, `q`.
fn pair_hermite(p: Vec2, q: Vec2) -> Mat2 {
    let eg = p.x.extended_gcd(&p.y);
    let g = eg.gcd;
    let mut c1 = Vec2::new(eg.x, eg.y);
    let mut c2 = Vec2::new(-p.y / g, p.x / g);
    let d = q.dot(c2);
    if d < 0 {
        c2 = -c2;
    }
    let k = Integer::div_floor(&q.dot(c1), &d.abs());
    c1 = c1 - k * c2;
    Mat2::from_columns(c1, c2)
}

/// Lexicographically least sorted image of `g` over the transforms putting an
/// ordered independent pair of its vectors into Hermite form. Two multisets
/// get the same key iff they differ by `GL2(Z)` and reordering.
pub fn orbit_key(g: &[Vec2]) -> Vec<Vec2> {
    let mut best: Option<Vec<Vec2>> = None;
    for (i, &p) in g.iter().enumerate() {
        for (j, &q) in g.iter().enumerate() {
            if i == j || p.det(q) == 0 {
                continue;
            }
            let u = pair_hermite(p, q);
            let mut img: Vec<Vec2> = g.iter().map(|b| b.apply(&u)).collect();
            img.sort();
            if best.as_ref().map_or(true, |b| img < *b) {
                best = Some(img);
            }
        }
    }
    best.unwrap_or_else(|| {
        let mut v = g.to_vec();
        v.sort();
        v
    })
}

/// Basis of the saturated integer kernel of `a` (rows of length n), computed by
/// unimodular row reduction of `[Aᵀ | I]` in arbitrary precision.
pub fn integer_kernel(a: &[Vec<i64>]) -> Result<Vec<Vec<i64>>> {
    let n = a.first().map(|r| r.len()).unwrap_or(0);
    let m = a.len();
    let mut rows: Vec<(Vec<BigInt>, Vec<BigInt>)> = (0..n)
        .map(|j| {
            let left = (0..m).map(|i| BigInt::from(a[i][j])).collect();
            let right = (0..n).map(|k| BigInt::from((k == j) as i64)).collect();
            (left, right)
        })
        .collect();
    let mut rank = 0;
    for c in 0..m {
        loop {
            // Smallest nonzero entry in column c among rows >= rank.
            let piv = (rank..n)
                .filter(|&r| !rows[r].0[c].is_zero())
                .min_by(|&r, &s| rows[r].0[c].abs().cmp(&rows[s].0[c].abs()));
            let Some(p) = piv else { break };
            rows.swap(rank, p);
            let mut done = true;
            for r in rank + 1..n {
                if rows[r].0[c].is_zero() {
                    continue;
                }
                let q = rows[r].0[c].div_floor(&rows[rank].0[c]);
                let (head, tail) = rows.split_at_mut(r);
                let pr = &head[rank];
                let row = &mut tail[0];
                for (x, y) in row.0.iter_mut().zip(&pr.0) {
                    *x -= &q * y;
                }
                for (x, y) in row.1.iter_mut().zip(&pr.1) {
                    *x -= &q * y;
                }
                if !row.0[c].is_zero() {
                    done = false;
                }
            }
            if done {
                rank += 1;
                break;
            }
        }
    }
    rows[rank..]
        .iter()
        .map(|(_, right)| {
            right
                .iter()
                .map(|x| {
                    x.to_i64()
                        .filter(|v| v.abs() <= MAX_ENTRY)
                        .ok_or_else(|| Error::EntryTooLarge(0))
                })
                .collect()
        })
        .collect()
}

/// Lagrange–Gauss reduction of a pair of integer vectors (Euclidean norm).
fn gauss_reduce(mut u: Vec<i64>, mut v: Vec<i64>) -> (Vec<i64>, Vec<i64>) {
    let dot = |a: &[i64], b: &[i64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (*x as i128) * (*y as i128))
            .sum::<i128>()
    };
    loop {
        if dot(&u, &u) > dot(&v, &v) {
            std::mem::swap(&mut u, &mut v);
        }
        let uu = dot(&u, &u);
        let uv = dot(&u, &v);
        // nearest integer to uv/uu
        let q = Integer::div_floor(&(2 * uv + uu), &(2 * uu));
        if q == 0 {
            break;
        }
        for (x, y) in v.iter_mut().zip(&u) {
            *x -= (q as i64) * y;
        }
        if dot(&v, &v) >= uu {
            break;
        }
    }
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn twisted_cubic() -> Lattice {
        Lattice::from_basis(vec![1, -2, 1, 0], vec![0, 1, -2, 1]).unwrap()
    }

    #[test]
    fn basis_rows_become_gale_vectors() {
        let l = twisted_cubic();
        let g = l.gale();
        assert_eq!(
            g.vectors(),
            &[
                Vec2::new(1, 0),
                Vec2::new(-2, 1),
                Vec2::new(1, -2),
                Vec2::new(0, 1)
            ]
        );
        let sum = g.vectors().iter().fold(Vec2::ZERO, |s, &v| s + v);
        assert!(sum.is_zero());
    }

    #[test]
    fn construction_errors() {
        assert_eq!(
            Lattice::from_basis(vec![1, -1, 0], vec![1, -1, 0]),
            Err(Error::RankDeficient)
        );
        assert_eq!(
            Lattice::from_basis(vec![1, 0, 0], vec![0, 1, -1]),
            Err(Error::NotHomogeneous)
        );
        assert_eq!(
            Lattice::from_basis(vec![1, -1], vec![0, 0]),
            Err(Error::AmbientTooSmall(2))
        );
        let l = Lattice::from_basis(vec![0, 2, -2], vec![2, -1, -1]).unwrap();
        assert_eq!(l.n(), 3);
        assert_eq!(
            l.gale().vectors(),
            &[Vec2::new(0, 2), Vec2::new(2, -1), Vec2::new(-2, -1)]
        );
    }

    #[test]
    fn kernel_of_twisted_cubic_matrix() {
        let l = Lattice::from_kernel(&[vec![1, 1, 1, 1], vec![0, 1, 2, 3]]).unwrap();
        assert!(l.is_saturated());
        assert!(l.same_lattice(&twisted_cubic()));
        for c in l.basis() {
            assert_eq!(c[0] + c[1] + c[2] + c[3], 0);
            assert_eq!(c[1] + 2 * c[2] + 3 * c[3], 0);
        }
        assert!(matches!(
            Lattice::from_kernel(&[vec![1, 1], vec![1, 1]]),
            Err(Error::WrongRank { .. })
        ));
        // row (1,1,1,1) not in the row span
        assert_eq!(
            Lattice::from_kernel(&[vec![1, 0, 0, 0], vec![0, 1, 0, 0]]),
            Err(Error::NotHomogeneous)
        );
    }

    #[test]
    fn kernel_of_segre_section_matrix() {
        let a = vec![
            vec![1, 0, 0, 1, 0],
            vec![0, 1, 1, 0, 1],
            vec![1, 1, -1, 0, 0],
        ];
        let l = Lattice::from_kernel(&a).unwrap();
        assert_eq!(l.n(), 5);
        assert!(l.is_saturated());
    }

    #[test]
    fn saturation() {
        let l = Lattice::from_basis(vec![0, 2, -2], vec![2, -1, -1]).unwrap();
        assert_eq!(l.saturation_index(), 4);
        assert_eq!(l.non_saturation_prime(), Some(2));
        assert!(twisted_cubic().is_saturated());
        let doubled = Lattice::from_basis(vec![2, -4, 2, 0], vec![0, 2, -4, 2]).unwrap();
        assert!(!doubled.is_saturated());
    }

    #[test]
    fn nondegeneracy() {
        assert!(twisted_cubic().is_nondegenerate());
        let l = Lattice::from_basis(vec![1, -1, 0, 0], vec![0, 0, 1, -1]).unwrap();
        assert!(!l.is_nondegenerate());
        assert_eq!(l.degeneracy_witness(), Some((0, 1)));
    }

    #[test]
    fn strip_zero_rows() {
        let l = Lattice::from_pairs(&[(1, 1), (0, 0), (1, -2), (-2, 1)]).unwrap();
        let (s, removed) = l.strip_zero_coordinates().unwrap();
        assert_eq!(removed, 1);
        assert_eq!(
            s.gale_vectors(),
            vec![Vec2::new(1, 1), Vec2::new(1, -2), Vec2::new(-2, 1)]
        );
        let (same, r0) = twisted_cubic().strip_zero_coordinates().unwrap();
        assert_eq!(r0, 0);
        assert_eq!(same, twisted_cubic());
        let small = Lattice::from_pairs(&[(1, 0), (0, 0), (-1, 0)]);
        assert!(small.is_err());
        let three = Lattice::from_pairs(&[(1, 0), (0, 1), (-1, -1), (0, 0)]).unwrap();
        assert!(three.strip_zero_coordinates().is_ok());
        let l = Lattice::from_pairs(&[(1, 1), (-1, -1), (0, 0)]);
        assert!(l.is_err());
    }

    #[test]
    fn gale_equivalence_examples() {
        let g = GaleDiagram::from_pairs(&[(1, 0), (0, 1), (-1, -1)]).unwrap();
        let h = GaleDiagram::from_pairs(&[(0, 1), (1, 0), (-1, -1)]).unwrap();
        assert!(gale_equivalent(&g, &g, false));
        assert!(gale_equivalent(&g, &h, true));
        let fam = GaleDiagram::from_pairs(&[(1, 0), (-1, 1), (-1, -2), (1, 1)]).unwrap();
        let tc = Lattice::from_kernel(&[vec![1, 1, 1, 1], vec![0, 1, 2, 3]])
            .unwrap()
            .gale();
        let u = gale_equivalence_witness(fam.vectors(), tc.vectors(), true).unwrap();
        assert!(u.is_unimodular());
        let fam4 = GaleDiagram::from_pairs(&[(1, 0), (-1, 1), (-1, -3), (1, 2)]).unwrap();
        assert!(!gale_equivalent(&fam4, &tc, true));
    }

    #[test]
    fn hnf_reduction_is_canonical() {
        let l = twisted_cubic();
        let h = l.hnf();
        let mut a = vec![1, 0, 1, 0];
        let mut b = vec![0, 2, 0, 0];
        h.reduce(&mut a);
        h.reduce(&mut b);
        assert_eq!(a, b);
        assert!(h.contains(&[1, -2, 1, 0]));
        assert!(!h.contains(&[1, -1, 0, 0]));
    }

    #[test]
    fn orbit_key_is_complete_on_small_diagrams() {
        let a = Lattice::from_pairs(&[(1, 0), (-1, 1), (-1, -2), (1, 1)]).unwrap();
        let u = Mat2([[2, 1], [1, 1]]);
        let b = a.transform(&u).permute(&[2, 0, 3, 1]);
        assert_eq!(a.orbit_key(), b.orbit_key());
        let p = pair_hermite(Vec2::new(2, 3), Vec2::new(1, 5));
        assert!(p.is_unimodular());
        assert_eq!(Vec2::new(2, 3).apply(&p).y, 0);
        let c = Lattice::from_pairs(&[(1, 0), (-1, 1), (-1, -3), (1, 2)]).unwrap();
        assert_ne!(a.orbit_key(), c.orbit_key());
    }

    #[test]
    fn permutation_key_ignores_order() {
        let l = Lattice::from_pairs(&[(0, 2), (2, -1), (-1, 0), (-1, -1)]).unwrap();
        let p = l.permute(&[2, 0, 3, 1]);
        assert_eq!(l.permutation_key(), p.permutation_key());
        let back = Lattice::from_key(&l.permutation_key()).unwrap();
        assert_eq!(back.permutation_key(), l.permutation_key());
    }
}
