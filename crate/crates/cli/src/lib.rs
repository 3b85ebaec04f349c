//! Command implementations behind the `galereg` binary. Every command returns a
//! serializable report; `main` prints it as one JSON document or, with
//! `--pretty`, as text.

use std::fmt::Write as _;

use anyhow::{anyhow, bail, Context, Result};
use galereg::classify::{
    classify_maximal, classify_monomial_curve, curve_degree_and_regularity, CurveSpec,
    CurveVerdict, MaximalRegularityVerdict,
};
use galereg::fiberhom;
use galereg::quadrangle::{
    enumerate_syzygy_quadrangles, is_cohen_macaulay, is_complete_intersection,
    normalize_unit_square, regularity_fast, SyzygyQuadrangle,
};
use galereg::reduction::{
    chain_values, degree_drop_one, degree_preserved, enumerate_partitions, is_perfectly_balanced,
    is_simple, match_reg_eq_deg_form, new_quadrangle, reduced_gale, Partition, ReductionDatum,
    SimpleWitness,
};
use galereg::searches::{self, GoldenDiff, SearchReport, SweepBounds, SweepReport};
use galereg::{BettiTable, Field, GaleDiagram, Lattice, Mat2, Vec2};
use serde::{Deserialize, Serialize};
use serde_json::Value;

/// A golden-file comparison found differences.
#[derive(Debug)]
pub struct GoldenMismatch(pub String);

impl std::fmt::Display for GoldenMismatch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "golden-file mismatch: {}", self.0)
    }
}

impl std::error::Error for GoldenMismatch {}

/// 1 for internal inconsistencies, 3 for golden-file mismatches, 2 otherwise.
pub fn exit_code(e: &anyhow::Error) -> u8 {
    for cause in e.chain() {
        if cause.downcast_ref::<GoldenMismatch>().is_some() {
            return 3;
        }
        if let Some(err) = cause.downcast_ref::<galereg::Error>() {
            return match err {
                galereg::Error::InternalInconsistency(_) | galereg::Error::Overflow => 1,
                _ => 2,
            };
        }
    }
    2
}

/// The lattice in its Hermite basis, which is also the accepted input form
/// `{"n": .., "basis": [c1, c2]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeDoc {
    pub n: usize,
    pub basis: [Vec<i64>; 2],
}

impl LatticeDoc {
    pub fn of(l: &Lattice) -> LatticeDoc {
        let n = l.n();
        let h = l.hnf().flat();
        LatticeDoc {
            n,
            basis: [h[..n].to_vec(), h[n..].to_vec()],
        }
    }

    pub fn lattice(&self) -> Result<Lattice> {
        if self.basis[0].len() != self.n || self.basis[1].len() != self.n {
            return Err(galereg::Error::DimensionMismatch)
                .context(format!("basis columns must have length n = {}", self.n));
        }
        Ok(Lattice::from_basis(
            self.basis[0].clone(),
            self.basis[1].clone(),
        )?)
    }
}

fn parse_json(text: &str, what: &str) -> Result<Value> {
    serde_json::from_str(text).with_context(|| format!("malformed {what}"))
}

fn field_of<T: serde::de::DeserializeOwned>(v: &Value, key: &str) -> Result<T> {
    serde_json::from_value(v[key].clone())
        .with_context(|| format!("field \"{key}\" has the wrong shape"))
}

/// A lattice document: `{"n", "basis"}` (two columns), `{"A"}` (the lattice
/// is the kernel of `A`), or `{"gale"}` (rows of a basis matrix).
pub fn lattice_from_json(text: &str) -> Result<Lattice> {
    let v = parse_json(text, "lattice JSON")?;
    let obj = v
        .as_object()
        .ok_or_else(|| anyhow!("lattice JSON must be an object"))?;
    let l = if obj.contains_key("basis") {
        let basis: [Vec<i64>; 2] = field_of(&v, "basis")?;
        let n = match obj.get("n") {
            Some(_) => field_of(&v, "n")?,
            None => basis[0].len(),
        };
        LatticeDoc { n, basis }.lattice()?
    } else if obj.contains_key("A") {
        let a: Vec<Vec<i64>> = field_of(&v, "A")?;
        Lattice::from_kernel(&a)?
    } else if obj.contains_key("gale") {
        let g: Vec<Vec2> = field_of(&v, "gale")?;
        Lattice::from_rows(&g)?
    } else {
        bail!("lattice JSON needs one of the keys \"basis\", \"A\" or \"gale\"");
    };
    Ok(l)
}

/// Lattice sources accepted by every lattice command; exactly one must be set.
#[derive(Clone, Debug, Default)]
pub struct LatticeSource {
    pub inline: Option<String>,
    pub a: Option<String>,
    pub basis: Option<String>,
    pub gale: Option<String>,
    pub file: Option<std::path::PathBuf>,
}

impl LatticeSource {
    pub fn load(&self) -> Result<Lattice> {
        let given = [
            self.inline.is_some(),
            self.a.is_some(),
            self.basis.is_some(),
            self.gale.is_some(),
            self.file.is_some(),
        ];
        match given.iter().filter(|&&g| g).count() {
            0 => bail!(
                "no lattice given: use --A, --basis, --gale, --file or an inline JSON document"
            ),
            1 => {}
            _ => {
                bail!("give exactly one of --A, --basis, --gale, --file or an inline JSON document")
            }
        }
        if let Some(t) = &self.inline {
            return lattice_from_json(t);
        }
        if let Some(p) = &self.file {
            let t = std::fs::read_to_string(p)
                .with_context(|| format!("cannot read {}", p.display()))?;
            return lattice_from_json(&t);
        }
        if let Some(t) = &self.a {
            let a: Vec<Vec<i64>> = serde_json::from_value(parse_json(t, "--A matrix")?)
                .context("--A must be a list of integer rows")?;
            return Ok(Lattice::from_kernel(&a)?);
        }
        if let Some(t) = &self.basis {
            let b: Vec<Vec<i64>> = serde_json::from_value(parse_json(t, "--basis")?)
                .context("--basis must be a list of two integer columns")?;
            let [c1, c2]: [Vec<i64>; 2] = b
                .try_into()
                .map_err(|b: Vec<_>| anyhow!("--basis needs 2 columns, got {}", b.len()))?;
            return Ok(Lattice::from_basis(c1, c2)?);
        }
        let t = self.gale.as_ref().expect("one source is set");
        let g: Vec<Vec2> = serde_json::from_value(parse_json(t, "--gale")?)
            .context("--gale must be a list of [x, y] pairs")?;
        Ok(Lattice::from_rows(&g)?)
    }
}

/// `rational` or `prime:<p>`.
pub fn parse_field(s: &str) -> Result<Field> {
    if s == "rational" {
        return Ok(Field::Rational);
    }
    let p: u64 = s
        .strip_prefix("prime:")
        .and_then(|p| p.parse().ok())
        .ok_or_else(|| anyhow!("field must be \"rational\" or \"prime:<p>\", got {s:?}"))?;
    if p < 2 || p >= 1 << 31 || (2..).take_while(|q| q * q <= p).any(|q| p % q == 0) {
        bail!("{p} is not a prime below 2^31");
    }
    Ok(Field::Prime(p))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Fast,
    Full,
    Certify,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub input: LatticeDoc,
    pub gale: Vec<Vec2>,
    pub mode: Mode,
    pub saturated: bool,
    pub saturation_index: i64,
    pub nondegenerate: bool,
    pub ci: bool,
    pub cm: bool,
    pub degree: i64,
    pub regularity: i64,
    /// Absent in fast mode.
    pub betti: Option<BettiTable>,
    pub quadrangles: Vec<SyzygyQuadrangle>,
    /// Absent for non-saturated lattices.
    pub verdict: Option<MaximalRegularityVerdict>,
}

pub fn analyze(l: &Lattice, mode: Mode, field: Field) -> Result<AnalysisReport> {
    let input = LatticeDoc::of(l);
    let l = input.lattice()?;
    if let Some((i, j)) = l.degeneracy_witness() {
        return Err(galereg::Error::Degenerate(i, j).into());
    }
    let degree = fiberhom::degree_volume(&l);
    let ci = is_complete_intersection(&l);
    let cm = is_cohen_macaulay(&l);
    let quadrangles = if ci {
        Vec::new()
    } else {
        enumerate_syzygy_quadrangles(&l, degree + 2)?
    };
    let (regularity, betti) = match mode {
        Mode::Fast => (regularity_fast(&l)?, None),
        Mode::Full | Mode::Certify => {
            let (deg, reg, t) = fiberhom::degree_and_regularity_with(&l, field)?;
            if deg != degree {
                return Err(galereg::Error::InternalInconsistency(format!(
                    "degree {degree} vs oracle {deg}"
                ))
                .into());
            }
            if mode == Mode::Certify && regularity_fast(&l)? != reg {
                return Err(galereg::Error::InternalInconsistency(
                    "regularity_fast disagrees with the oracle".into(),
                )
                .into());
            }
            (reg, Some(t))
        }
    };
    let verdict = if l.is_saturated() {
        Some(classify_maximal(&l, mode == Mode::Certify)?)
    } else {
        None
    };
    if let Some(v) = &verdict {
        if v.maximal != (regularity == degree - 1) {
            return Err(galereg::Error::InternalInconsistency(format!(
                "verdict {} but (deg, reg) = ({degree}, {regularity})",
                v.maximal
            ))
            .into());
        }
    }
    Ok(AnalysisReport {
        gale: l.gale_vectors(),
        input,
        mode,
        saturated: l.is_saturated(),
        saturation_index: l.saturation_index(),
        nondegenerate: true,
        ci,
        cm,
        degree,
        regularity,
        betti,
        quadrangles,
        verdict,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyReport {
    pub input: LatticeDoc,
    pub verdict: MaximalRegularityVerdict,
}

pub fn classify(l: &Lattice, certify: bool) -> Result<ClassifyReport> {
    Ok(ClassifyReport {
        input: LatticeDoc::of(l),
        verdict: classify_maximal(l, certify)?,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveReport {
    pub exponents: Vec<i64>,
    pub n: usize,
    pub degree: i64,
    pub verdict: CurveVerdict,
    /// `(deg, reg)` from the oracle, with `--certify`.
    pub oracle: Option<(i64, i64)>,
}

pub fn parse_exponents(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<i64>()
                .with_context(|| format!("{t:?} is not an integer"))
        })
        .collect()
}

pub fn curve(exponents: Vec<i64>, certify: bool, field: Field) -> Result<CurveReport> {
    let spec = CurveSpec::new(exponents)?;
    let verdict = classify_monomial_curve(&spec);
    let oracle = if certify {
        let (deg, reg) = curve_degree_and_regularity(&spec, field)?;
        let codim = spec.n() as i64 - 2;
        if deg != spec.degree() || verdict.maximal != (reg == deg - codim + 1) {
            return Err(galereg::Error::InternalInconsistency(format!(
                "{:?} but oracle gives (deg, reg) = ({deg}, {reg})",
                verdict.case
            ))
            .into());
        }
        Some((deg, reg))
    } else {
        None
    };
    Ok(CurveReport {
        exponents: spec.exponents().to_vec(),
        n: spec.n(),
        degree: spec.degree(),
        verdict,
        oracle,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub reg_l: i64,
    pub reg_q: i64,
    pub deg_q: i64,
    pub deg_l: i64,
    /// `reg I_L ≤ reg I_Q ≤ deg I_Q ≤ deg I_L`.
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatumReport {
    pub partition: Partition,
    pub reduced_gale: Vec<Vec2>,
    pub perfectly_balanced: bool,
    pub simple_13: Option<SimpleWitness>,
    pub simple_24: Option<SimpleWitness>,
    pub degree_preserved: bool,
    /// Absent unless perfectly balanced.
    pub degree_drop_one: Option<bool>,
    pub new_quadrangle: Option<SyzygyQuadrangle>,
    pub reg_eq_deg_form: Option<(i64, i64)>,
    pub chain: Chain,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReduceReport {
    pub input: LatticeDoc,
    /// Diagram in which the unit square attains the regularity; partitions
    /// index its vectors.
    pub gale: Vec<Vec2>,
    pub transform: Mat2,
    pub data: Vec<DatumReport>,
}

pub fn parse_partition(s: &str) -> Result<Partition> {
    serde_json::from_value(parse_json(s, "--partition")?)
        .context("--partition must be four lists of indices")
}

fn datum_report(d: &ReductionDatum) -> Result<DatumReport> {
    let (gq, _) = reduced_gale(d);
    let (deg_l, reg_l, deg_q, reg_q) = chain_values(d)?;
    let balanced = is_perfectly_balanced(d);
    let drop = if balanced {
        Some(degree_drop_one(d)?)
    } else {
        None
    };
    Ok(DatumReport {
        partition: d.partition.clone(),
        reduced_gale: gq.vectors().to_vec(),
        perfectly_balanced: balanced,
        simple_13: is_simple(d, (1, 3)).ok().flatten(),
        simple_24: is_simple(d, (2, 4)).ok().flatten(),
        degree_preserved: degree_preserved(d),
        degree_drop_one: drop,
        new_quadrangle: if drop == Some(true) {
            Some(new_quadrangle(d)?)
        } else {
            None
        },
        reg_eq_deg_form: match_reg_eq_deg_form(gq.vectors()),
        chain: Chain {
            reg_l,
            reg_q,
            deg_q,
            deg_l,
            holds: reg_l <= reg_q && reg_q <= deg_q && deg_q <= deg_l,
        },
    })
}

pub fn reduce(l: &Lattice, partition: Option<Partition>) -> Result<ReduceReport> {
    let (g, u): (GaleDiagram, Mat2) = normalize_unit_square(l)?;
    let parts = match partition {
        Some(p) => vec![p],
        None => enumerate_partitions(&g)?,
    };
    let mut data = Vec::with_capacity(parts.len());
    for p in parts {
        let d = ReductionDatum::new(g.clone(), p)?;
        let r = datum_report(&d)?;
        if !r.chain.holds {
            return Err(galereg::Error::InternalInconsistency(format!(
                "reduction chain fails: {:?}",
                r.chain
            ))
            .into());
        }
        data.push(r);
    }
    Ok(ReduceReport {
        input: LatticeDoc::of(l),
        gale: g.vectors().to_vec(),
        transform: u,
        data,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchKind {
    Table1,
    CmNonci,
    Sweep,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "search", rename_all = "kebab-case")]
pub enum SearchOutput {
    Table1 {
        max_n: usize,
        report: SearchReport,
        golden: Option<GoldenDiff>,
    },
    CmNonci {
        max_coord: i64,
        max_n: usize,
        report: SearchReport,
        golden: Option<GoldenDiff>,
    },
    Sweep {
        bounds: SweepBounds,
        report: SweepReport,
    },
}

/// Runs a search. A golden difference (with `check`) or a sweep mismatch is
/// reported through the returned error, after the output is built.
pub fn search(
    kind: SearchKind,
    max_coord: Option<i64>,
    max_n: Option<usize>,
    check: bool,
) -> (SearchOutput, Option<anyhow::Error>) {
    match kind {
        SearchKind::Table1 => {
            let max_n = max_n.unwrap_or(8);
            let report = searches::search_ci_table_up_to(max_n);
            let golden =
                check.then(|| searches::diff_against_golden(&report, &searches::golden_ci_table()));
            let err = golden_error(&golden, "table1.json");
            (
                SearchOutput::Table1 {
                    max_n,
                    report,
                    golden,
                },
                err,
            )
        }
        SearchKind::CmNonci => {
            let (max_coord, max_n) = (max_coord.unwrap_or(2), max_n.unwrap_or(6));
            let report = searches::search_cm_nonci_bounded(max_coord, max_n);
            let golden =
                check.then(|| searches::diff_against_golden(&report, &searches::golden_cm_nonci()));
            let err = golden_error(&golden, "cm_nonci.json");
            (
                SearchOutput::CmNonci {
                    max_coord,
                    max_n,
                    report,
                    golden,
                },
                err,
            )
        }
        SearchKind::Sweep => {
            let bounds = SweepBounds {
                max_coord: max_coord.unwrap_or(2),
                min_n: 3,
                max_n: max_n.unwrap_or(6),
            };
            match searches::consistency_sweep(bounds) {
                Ok(report) => {
                    let err = (!report.mismatches.is_empty()).then(|| {
                        galereg::Error::InternalInconsistency(format!(
                            "{} sweep mismatches",
                            report.mismatches.len()
                        ))
                        .into()
                    });
                    (SearchOutput::Sweep { bounds, report }, err)
                }
                Err(e) => (
                    SearchOutput::Sweep {
                        bounds,
                        report: SweepReport::default(),
                    },
                    Some(e.into()),
                ),
            }
        }
    }
}

fn golden_error(diff: &Option<GoldenDiff>, file: &str) -> Option<anyhow::Error> {
    let d = diff.as_ref()?;
    (!d.is_empty()).then(|| {
        GoldenMismatch(format!(
            "{file}: {} missing, {} unexpected",
            d.missing.len(),
            d.unexpected.len()
        ))
        .into()
    })
}

/// Serializes with sorted keys.
pub fn to_json<T: Serialize>(v: &T) -> Result<String> {
    Ok(serde_json::to_string(&serde_json::to_value(v)?)?)
}

fn gale_text(g: &[Vec2]) -> String {
    g.iter()
        .map(|v| v.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

fn betti_text(t: &BettiTable, out: &mut String) {
    let graded = t.graded();
    let _ = writeln!(out, "betti (i, total degree: rank):");
    for ((i, d), r) in graded {
        let _ = writeln!(out, "  {i}  {d}: {r}");
    }
}

pub trait Pretty {
    fn pretty(&self) -> String;
}

impl Pretty for AnalysisReport {
    fn pretty(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "gale:        {}", gale_text(&self.gale));
        let _ = writeln!(
            s,
            "saturated:   {} (index {})",
            self.saturated, self.saturation_index
        );
        let _ = writeln!(s, "CI / CM:     {} / {}", self.ci, self.cm);
        let _ = writeln!(s, "degree:      {}", self.degree);
        let _ = writeln!(s, "regularity:  {}", self.regularity);
        if let Some(t) = &self.betti {
            betti_text(t, &mut s);
        }
        for q in &self.quadrangles {
            let _ = writeln!(s, "quadrangle:  [{}, {}] total {}", q.v, q.w, q.total);
        }
        if let Some(v) = &self.verdict {
            let _ = writeln!(
                s,
                "maximal:     {} ({})",
                v.maximal,
                to_json(&v.case).unwrap_or_default()
            );
        }
        s
    }
}

impl Pretty for ClassifyReport {
    fn pretty(&self) -> String {
        let v = &self.verdict;
        let mut s = format!(
            "maximal: {}\ncase:    {}\n",
            v.maximal,
            to_json(&v.case).unwrap_or_default()
        );
        if let Some(o) = v.oracle {
            let _ = writeln!(s, "oracle:  deg {} reg {}", o.degree, o.regularity);
        }
        s
    }
}

impl Pretty for CurveReport {
    fn pretty(&self) -> String {
        let v = &self.verdict;
        let mut s = format!(
            "exponents: {:?}\nmaximal:   {} ({:?})\nlongest gap: {}\nend run:   {}\n",
            self.exponents, v.maximal, v.case, v.longest_gap, v.end_run
        );
        if let Some((d, r)) = self.oracle {
            let _ = writeln!(s, "oracle:    deg {d} reg {r}");
        }
        s
    }
}

impl Pretty for ReduceReport {
    fn pretty(&self) -> String {
        let mut s = format!("gale: {}\n", gale_text(&self.gale));
        for d in &self.data {
            let c = &d.chain;
            let _ = writeln!(
                s,
                "{:?}  G_Q {}  balanced {}  drop-one {}  chain {} <= {} <= {} <= {}",
                d.partition,
                gale_text(&d.reduced_gale),
                d.perfectly_balanced,
                d.degree_drop_one.map_or("-".to_string(), |b| b.to_string()),
                c.reg_l,
                c.reg_q,
                c.deg_q,
                c.deg_l
            );
        }
        s
    }
}

impl Pretty for SearchOutput {
    fn pretty(&self) -> String {
        let (report, golden) = match self {
            SearchOutput::Table1 { report, golden, .. }
            | SearchOutput::CmNonci { report, golden, .. } => (report, golden),
            SearchOutput::Sweep { report, .. } => {
                let mut s = format!(
                    "{} lattices, {} maximal, {} mismatches\n",
                    report.checked,
                    report.maximal,
                    report.mismatches.len()
                );
                for (n, c, m) in &report.by_n {
                    let _ = writeln!(s, "  n' = {n}: {c} checked, {m} maximal");
                }
                return s;
            }
        };
        let mut s = format!(
            "{} lattices, {} saturated ({} candidates, {} ms)\n",
            report.total_count, report.saturated_count, report.candidates, report.elapsed_ms
        );
        for f in &report.found {
            let _ = writeln!(
                s,
                "  n = {}  saturated {:5}  gale {}",
                f.key.n,
                f.saturated,
                gale_text(&f.lattice.gale_vectors())
            );
        }
        if let Some(g) = golden {
            let _ = writeln!(
                s,
                "golden: {}",
                if g.is_empty() {
                    "match".to_string()
                } else {
                    format!(
                        "{} missing, {} unexpected",
                        g.missing.len(),
                        g.unexpected.len()
                    )
                }
            );
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fields() {
        assert_eq!(parse_field("rational").unwrap(), Field::Rational);
        assert_eq!(parse_field("prime:7").unwrap(), Field::Prime(7));
        assert!(parse_field("prime:9").is_err());
        assert!(parse_field("complex").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(
            exit_code(&galereg::Error::InternalInconsistency("x".into()).into()),
            1
        );
        assert_eq!(
            exit_code(&anyhow::Error::from(galereg::Error::RankDeficient).context("loading")),
            2
        );
        assert_eq!(exit_code(&GoldenMismatch("x".into()).into()), 3);
        assert_eq!(exit_code(&anyhow!("bad flag")), 2);
    }

    #[test]
    fn lattice_documents() {
        let a = lattice_from_json(r#"{"A": [[1,1,1,1],[0,1,2,3]]}"#).unwrap();
        let b = lattice_from_json(r#"{"n": 4, "basis": [[1,-2,1,0],[0,1,-2,1]]}"#).unwrap();
        assert!(a.same_lattice(&b));
        assert!(lattice_from_json(r#"{"n": 5, "basis": [[1,-2,1,0],[0,1,-2,1]]}"#).is_err());
        assert!(lattice_from_json(r#"{"rows": []}"#).is_err());
        assert_eq!(LatticeDoc::of(&a), LatticeDoc::of(&b));
    }
}
