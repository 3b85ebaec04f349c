//! Verdicts on maximal regularity, `reg I = deg I - codim I + 1`: monomial
//! curves, complete intersections, Cohen–Macaulay ideals, and the full
//! classification of codimension-two toric ideals.

use std::sync::OnceLock;

use num_integer::{binomial, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fiberhom::{self, Field};
use crate::quadrangle::{is_cohen_macaulay, is_complete_intersection};
use crate::zlattice::{
    gale_equivalent, integer_kernel, CanonicalKey, GaleDiagram, Hnf, Lattice, Vec2,
};

/// Exponents `0 = a_1 < … < a_n = d` with `gcd(a_2, …, a_n) = 1` of the curve
/// `t ↦ (s^{d-a_i} t^{a_i})_i` in `P^{n-1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveSpec {
    exponents: Vec<i64>,
}

impl CurveSpec {
    pub fn new(exponents: Vec<i64>) -> Result<Self> {
        if exponents.len() < 3 {
            return Err(Error::AmbientTooSmall(exponents.len()));
        }
        if exponents.len() > crate::zlattice::MAX_AMBIENT {
            return Err(Error::AmbientTooLarge(exponents.len()));
        }
        if exponents[0] != 0 || exponents.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::NotIncreasing);
        }
        let g = exponents.iter().fold(0i64, |g, &a| g.gcd(&a));
        if g != 1 {
            return Err(Error::GcdNotOne(g));
        }
        Ok(CurveSpec { exponents })
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    pub fn n(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> i64 {
        *self.exponents.last().unwrap()
    }

    /// `[[1, …, 1], [a_1, …, a_n]]`.
    pub fn matrix(&self) -> Vec<Vec<i64>> {
        vec![vec![1; self.n()], self.exponents.clone()]
    }

    /// Hermite form of the rank `n - 2` lattice `ker A`.
    pub fn kernel_hnf(&self) -> Result<Hnf> {
        Hnf::from_rows(&integer_kernel(&self.matrix())?)
    }

    /// Largest gap `a_k - a_{k-1} - 1`.
    pub fn longest_gap(&self) -> i64 {
        self.exponents
            .windows(2)
            .map(|w| w[1] - w[0] - 1)
            .max()
            .unwrap()
    }

    /// Largest `i` with `[0, i]` and `[d - i, d]` both inside the exponent set.
    pub fn end_run(&self) -> i64 {
        let d = self.degree();
        let has = |x: i64| self.exponents.binary_search(&x).is_ok();
        (0..=d)
            .take_while(|&i| has(i) && has(d - i))
            .last()
            .unwrap_or(0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CurveCase {
    /// `n = 3`: a plane curve, so `reg = deg`.
    Hypersurface,
    /// `d ≤ n`.
    SmallDegree,
    /// `(0, 1, …, n-3, d-1, d)`.
    GapAtTop,
    /// `(0, 1, d-n+3, …, d)`.
    GapAtBottom,
    NotMaximal,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveVerdict {
    pub maximal: bool,
    pub case: CurveCase,
    pub longest_gap: i64,
    pub end_run: i64,
}

pub fn classify_monomial_curve(s: &CurveSpec) -> CurveVerdict {
    let (n, d) = (s.n() as i64, s.degree());
    let a = s.exponents();
    let case = if n == 3 {
        CurveCase::Hypersurface
    } else if d <= n {
        CurveCase::SmallDegree
    } else if a[..a.len() - 2].iter().zip(0..).all(|(&x, i)| x == i) && a[a.len() - 2] == d - 1 {
        CurveCase::GapAtTop
    } else if a[1] == 1 && a[2..].iter().zip(d - n + 3..).all(|(&x, i)| x == i) {
        CurveCase::GapAtBottom
    } else {
        CurveCase::NotMaximal
    };
    CurveVerdict {
        maximal: case != CurveCase::NotMaximal,
        case,
        longest_gap: s.longest_gap(),
        end_run: s.end_run(),
    }
}

/// `(deg, reg)` of the curve from the Hilbert function and fiber homology.
pub fn curve_degree_and_regularity(s: &CurveSpec, field: Field) -> Result<(i64, i64)> {
    let (deg, reg, _) = fiberhom::general_degree_and_regularity(&s.kernel_hnf()?, field)?;
    Ok((deg, reg))
}

/// `(reg, deg, maximal)` of a complete intersection with generator degrees `d_i`.
pub fn koszul_reg_deg(degrees: &[i64]) -> Result<(i64, i64, bool)> {
    if degrees.is_empty() {
        return Err(Error::NoGenerators);
    }
    if degrees.iter().any(|&d| d < 2) {
        return Err(Error::DegreeOne);
    }
    let m = degrees.len() as i64;
    let reg = degrees.iter().sum::<i64>() - m + 1;
    let deg = degrees
        .iter()
        .try_fold(1i64, |p, &d| p.checked_mul(d))
        .ok_or(Error::Overflow)?;
    Ok((reg, deg, reg == deg - m + 1))
}

/// For a Cohen–Macaulay non-CI lattice: maximal iff minimally generated by
/// three quadrics, in which case the resolution is `S(-3)^2 → S(-2)^3`.
pub fn classify_cm_nonci(l: &Lattice) -> Result<bool> {
    if is_complete_intersection(l) || !is_cohen_macaulay(l) {
        return Err(Error::PreconditionNotCMnonCI);
    }
    let (deg, reg, table) = fiberhom::degree_and_regularity(l)?;
    let gens: Vec<i64> = table
        .at(1)
        .flat_map(|e| std::iter::repeat(e.total).take(e.rank))
        .collect();
    let maximal = gens == [2, 2, 2];
    if maximal {
        let graded = table.graded();
        let expected = [((1, 2), 3), ((2, 3), 2)].into_iter().collect();
        if graded != expected || (reg, deg) != (2, 3) {
            return Err(Error::InternalInconsistency(format!(
                "three quadrics but table {graded:?} with (reg, deg) = ({reg}, {deg})"
            )));
        }
    } else if reg == deg - 1 {
        return Err(Error::InternalInconsistency(format!(
            "generators {gens:?} yet reg = deg - 1 = {reg}"
        )));
    }
    Ok(maximal)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Char0Verdict {
    pub maximal: bool,
    /// Number of fibers of total degree 2, i.e. `H(S/I_L, 2)`.
    pub quadric_fibers: u64,
    /// `binom(n+1, 2) - 3` and `binom(n+1, 2) - 2`.
    pub thresholds: (u64, u64),
    pub regularity: Option<i64>,
    /// Degrees at which the Hilbert function was checked against the series.
    pub series_checked_to: Option<i64>,
}

/// Characteristic-zero criterion for Cohen–Macaulay ideals of codimension 2:
/// maximal iff the degree-2 fiber count is `binom(n+1,2) - 3` (three quadrics,
/// `reg = 2`) or `binom(n+1,2) - 2` (two quadrics, `reg ≥ 3`). When maximal, the
/// Hilbert series numerator must be `1 + 2t + t^2 + … + t^{reg-1}`.
pub fn cm_char0_criterion(l: &Lattice) -> Result<Char0Verdict> {
    if !is_cohen_macaulay(l) {
        return Err(Error::PreconditionNotCM);
    }
    if let Some((i, j)) = l.degeneracy_witness() {
        return Err(Error::Degenerate(i, j));
    }
    let n = l.n() as u64;
    let top = binomial(n + 1, 2);
    let thresholds = (top - 3, top - 2);
    let quadric_fibers = fiberhom::hilbert_function(l, 2);
    let maximal = quadric_fibers == thresholds.0 || quadric_fibers == thresholds.1;
    let mut verdict = Char0Verdict {
        maximal,
        quadric_fibers,
        thresholds,
        regularity: None,
        series_checked_to: None,
    };
    if !maximal {
        return Ok(verdict);
    }
    let (deg, reg, _) = fiberhom::degree_and_regularity_with(l, Field::Rational)?;
    if reg != deg - 1 || (quadric_fibers == thresholds.0) != (reg == 2) {
        return Err(Error::InternalInconsistency(format!(
            "{quadric_fibers} quadric fibers with (reg, deg) = ({reg}, {deg})"
        )));
    }
    let h: Vec<i64> = (0..reg).map(|i| if i == 1 { 2 } else { 1 }).collect();
    let m = n as i64 - 3;
    let upto = (reg + 3).max(4);
    for d in 0..=upto {
        let expected: i64 = (0..=d.min(reg - 1))
            .map(|i| h[i as usize] * binomial(d - i + m, m))
            .sum();
        let actual = fiberhom::hilbert_function(l, d) as i64;
        if expected != actual {
            return Err(Error::InternalInconsistency(format!(
                "Hilbert function {actual} at degree {d}, series predicts {expected}"
            )));
        }
    }
    verdict.regularity = Some(reg);
    verdict.series_checked_to = Some(upto);
    Ok(verdict)
}

/// Visible, pairwise independent `u, v, w` with `|det(v, w)| = 1` and `u = b v + c w`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilyParams {
    pub u: Vec2,
    pub v: Vec2,
    pub w: Vec2,
    pub b: i64,
    pub c: i64,
}

/// Parametric families of non-CI diagrams with maximal regularity.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FamilyMatch {
    /// `{(1,0), (-1,1), (-1,1-d), (1,d-2)}`, `d ≥ 3`.
    N4 { d: i64 },
    /// `{u, v, w, -u, -v-w}`.
    N5(FamilyParams),
    /// `{±u, ±v, ±w}`.
    N6(FamilyParams),
}

impl FamilyMatch {
    /// `d`, `1 + max(|b|, |c|, |b-c|)` and `1 + |b| + |c|` respectively.
    pub fn degree(&self) -> i64 {
        match *self {
            FamilyMatch::N4 { d } => d,
            FamilyMatch::N5(FamilyParams { b, c, .. }) => {
                1 + b.abs().max(c.abs()).max((b - c).abs())
            }
            FamilyMatch::N6(FamilyParams { b, c, .. }) => 1 + b.abs() + c.abs(),
        }
    }
}

pub fn n4_family_gale(d: i64) -> Vec<Vec2> {
    vec![
        Vec2::new(1, 0),
        Vec2::new(-1, 1),
        Vec2::new(-1, 1 - d),
        Vec2::new(1, d - 2),
    ]
}

/// `(b, c)` with `u = b v + c w`, when `|det(v, w)| = 1`.
fn coordinates(u: Vec2, v: Vec2, w: Vec2) -> (i64, i64) {
    let det = v.det(w);
    (u.det(w) / det, v.det(u) / det)
}

fn pairwise_independent(vs: &[Vec2]) -> bool {
    vs.iter()
        .enumerate()
        .all(|(i, a)| vs[i + 1..].iter().all(|b| a.det(*b) != 0))
}

/// The family form matched by a list of nonzero Gale vectors, if any.
pub fn match_family_forms(vs: &[Vec2]) -> Option<FamilyMatch> {
    match vs.len() {
        4 => match_n4(vs),
        5 => match_n5(vs),
        6 => match_n6(vs),
        _ => None,
    }
}

fn match_n4(vs: &[Vec2]) -> Option<FamilyMatch> {
    let g = GaleDiagram::new(vs.to_vec()).ok()?;
    let d = fiberhom::degree_volume(&Lattice::from_gale(&g).ok()?);
    if d < 3 {
        return None;
    }
    let family = GaleDiagram::new(n4_family_gale(d)).ok()?;
    gale_equivalent(&g, &family, true).then_some(FamilyMatch::N4 { d })
}

fn match_n5(vs: &[Vec2]) -> Option<FamilyMatch> {
    for p in 0..5 {
        for q in p + 1..5 {
            if vs[p] != -vs[q] {
                continue;
            }
            let u = vs[p];
            let rest: Vec<Vec2> = (0..5)
                .filter(|&k| k != p && k != q)
                .map(|k| vs[k])
                .collect();
            for k in (0..3).rev() {
                let (v, w) = match k {
                    0 => (rest[1], rest[2]),
                    1 => (rest[0], rest[2]),
                    _ => (rest[0], rest[1]),
                };
                let ok = rest[k] == -v - w
                    && [u, v, w].iter().all(|x| x.is_visible())
                    && pairwise_independent(&[u, v, w])
                    && u != v + w
                    && u != -v - w
                    && v.det(w).abs() == 1;
                if ok {
                    let (b, c) = coordinates(u, v, w);
                    return Some(FamilyMatch::N5(FamilyParams { u, v, w, b, c }));
                }
            }
        }
    }
    None
}

fn match_n6(vs: &[Vec2]) -> Option<FamilyMatch> {
    let mut pos: Vec<Vec2> = vs.iter().copied().filter(|v| v.is_lex_positive()).collect();
    let mut neg: Vec<Vec2> = vs
        .iter()
        .copied()
        .filter(|v| !v.is_lex_positive())
        .map(|v| -v)
        .collect();
    pos.sort();
    neg.sort();
    if pos.len() != 3
        || pos != neg
        || !pos.iter().all(|x| x.is_visible())
        || !pairwise_independent(&pos)
    {
        return None;
    }
    let labelings = [(0, 1, 2), (0, 2, 1), (1, 2, 0)];
    labelings.iter().find_map(|&(i, j, k)| {
        let (v, w, u) = (pos[i], pos[j], pos[k]);
        (v.det(w).abs() == 1).then(|| {
            let (b, c) = coordinates(u, v, w);
            FamilyMatch::N6(FamilyParams { u, v, w, b, c })
        })
    })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GoldenEntry {
    n: usize,
    matrix: Vec<Vec2>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
struct GoldenTable {
    saturated: Vec<GoldenEntry>,
    non_saturated: Vec<GoldenEntry>,
}

/// The complete intersections with `reg = deg - 1` and nonzero Gale vectors,
/// up to coordinate permutation.
#[derive(Clone, Debug)]
pub struct CiTable {
    pub saturated: Vec<Lattice>,
    pub non_saturated: Vec<Lattice>,
    saturated_keys: Vec<CanonicalKey>,
}

impl CiTable {
    /// Row of the saturated list holding `l` up to coordinate permutation.
    pub fn saturated_row(&self, l: &Lattice) -> Option<usize> {
        let key = l.permutation_key();
        self.saturated_keys.iter().position(|k| *k == key)
    }
}

pub const TABLE1_JSON: &str = include_str!("../golden/table1.json");

pub fn ci_table() -> &'static CiTable {
    static TABLE: OnceLock<CiTable> = OnceLock::new();
    TABLE.get_or_init(|| {
        let raw: GoldenTable = serde_json::from_str(TABLE1_JSON).expect("embedded table parses");
        let build = |es: &[GoldenEntry]| -> Vec<Lattice> {
            es.iter()
                .map(|e| {
                    let l = Lattice::from_rows(&e.matrix).expect("embedded lattice is valid");
                    assert_eq!(l.n(), e.n);
                    l
                })
                .collect()
        };
        let saturated = build(&raw.saturated);
        let saturated_keys = saturated.iter().map(Lattice::permutation_key).collect();
        CiTable {
            saturated,
            non_saturated: build(&raw.non_saturated),
            saturated_keys,
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", content = "params", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum MaximalCase {
    CiTable { row: usize, n_prime: usize },
    N4Family { d: i64 },
    N5Family(FamilyParams),
    N6Family(FamilyParams),
    NotMaximal { n_prime: usize, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleValues {
    pub degree: i64,
    pub regularity: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaximalRegularityVerdict {
    pub maximal: bool,
    #[serde(flatten)]
    pub case: MaximalCase,
    pub certified: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub oracle: Option<OracleValues>,
}

/// Whether a saturated nondegenerate rank-2 lattice has maximal regularity,
/// with the matched case. With `certify`, the Betti oracle's `(deg, reg)` must
/// agree with the verdict.
pub fn classify_maximal(l: &Lattice, certify: bool) -> Result<MaximalRegularityVerdict> {
    if !l.is_saturated() {
        return Err(Error::NotSaturated(l.saturation_index()));
    }
    if let Some((i, j)) = l.degeneracy_witness() {
        return Err(Error::Degenerate(i, j));
    }
    let (core, _) = l.strip_zero_coordinates()?;
    let n_prime = core.n();
    let not = |reason: &str| MaximalCase::NotMaximal {
        n_prime,
        reason: reason.into(),
    };
    let case = if n_prime == 3 {
        not("three nonzero Gale vectors")
    } else if is_complete_intersection(&core) {
        match ci_table().saturated_row(&core) {
            Some(row) => MaximalCase::CiTable { row, n_prime },
            None => not("complete intersection outside the table"),
        }
    } else if n_prime > 6 {
        not("more than six nonzero Gale vectors and not a complete intersection")
    } else {
        match match_family_forms(&core.gale_vectors()) {
            Some(FamilyMatch::N4 { d }) => MaximalCase::N4Family { d },
            Some(FamilyMatch::N5(p)) => MaximalCase::N5Family(p),
            Some(FamilyMatch::N6(p)) => MaximalCase::N6Family(p),
            None => not("no family form matches"),
        }
    };
    let maximal = !matches!(case, MaximalCase::NotMaximal { .. });
    let oracle = if certify {
        let (degree, regularity, _) = fiberhom::degree_and_regularity(&core)?;
        if (regularity == degree - 1) != maximal {
            return Err(Error::InternalInconsistency(format!(
                "verdict {case:?} but oracle gives (deg, reg) = ({degree}, {regularity})"
            )));
        }
        Some(OracleValues { degree, regularity })
    } else {
        None
    };
    Ok(MaximalRegularityVerdict {
        maximal,
        case,
        certified: certify,
        oracle,
    })
}

/// `ker [[1,1,1,1],[0,1,d-1,d]]`.
pub fn n4_family_lattice(d: i64) -> Result<Lattice> {
    Lattice::from_kernel(&[vec![1, 1, 1, 1], vec![0, 1, d - 1, d]])
}

pub fn n5_family_lattice(b: i64, c: i64) -> Result<Lattice> {
    Lattice::from_kernel(&[
        vec![1, 0, 0, 1, 0],
        vec![0, 1, 1, 0, 1],
        vec![1, b, c, 0, 0],
    ])
}

pub fn n6_family_lattice(b: i64, c: i64) -> Result<Lattice> {
    Lattice::from_kernel(&[
        vec![1, 0, 0, 1, 0, 0],
        vec![0, 1, 0, 0, 1, 0],
        vec![0, 0, 1, 0, 0, 1],
        vec![1, b, c, 0, 0, 0],
    ])
}
