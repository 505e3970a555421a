//! Decision pipeline for t-modules: validation, the abelian / t-finite verdict
//! from the Newton polygons of the diagonal form of `t·1 − D`, exact rank
//! certificates, and purity with weights.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::base_field::{FieldConfig, PerfectField, PerfectFieldElement as Fe};
use crate::error::{Error, Result};
use crate::matrix_normal_forms::{
    aggregated_edges, diagonalize_sigma_t, entry_polygons, rank_mod, Diagonalization, DiagonalizeOptions, SigmaMatrix,
    SigmaTMatrix,
};
use crate::newton::{format_slope, Edge, EdgeJson, Slope};
use crate::skew_tau::TauMatrix;

/// A t-module `E ≅ G_a^d` given by the matrix of `φ_t` and the value `ℓ(t)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TModule {
    phi_t: TauMatrix,
    ell: Fe,
}

impl TModule {
    /// Builds and validates a t-module; `ell` defaults to θ.
    pub fn new(phi_t: TauMatrix, ell: Option<Fe>) -> Result<Self> {
        let ell = match ell {
            Some(e) => e,
            None => phi_t.field().theta()?,
        };
        if ell.field() != phi_t.field() {
            return Err(Error::FieldMismatch("l(t) lies in a different field than phi_t".into()));
        }
        let m = TModule { phi_t, ell };
        m.validate()?;
        Ok(m)
    }

    pub fn field(&self) -> &PerfectField {
        self.phi_t.field()
    }

    pub fn config(&self) -> &FieldConfig {
        self.field().config()
    }

    pub fn dim(&self) -> usize {
        self.phi_t.dim()
    }

    pub fn phi_t(&self) -> &TauMatrix {
        &self.phi_t
    }

    pub fn ell(&self) -> &Fe {
        &self.ell
    }

    pub fn deg_tau(&self) -> usize {
        self.phi_t.deg_tau().unwrap_or(0)
    }

    /// Checks that `(D₀ − ℓ(t)·1)^d = 0`.
    pub fn validate(&self) -> Result<()> {
        let d = self.dim();
        let mut n = self.phi_t.coefficient_matrix(0);
        for i in 0..d {
            n[i * d + i] = n[i * d + i].sub_ref(&self.ell);
        }
        let mut power = n.clone();
        for _ in 1..d {
            power = scalar_mat_mul(&power, &n, d);
        }
        if power.iter().all(|x| x.is_zero()) {
            return Ok(());
        }
        let rows: Vec<String> = power
            .chunks(d)
            .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", ")))
            .collect();
        Err(Error::NotATModule { power: d, matrix: format!("[{}]", rows.join(", ")) })
    }
}

fn scalar_mat_mul(a: &[Fe], b: &[Fe], d: usize) -> Vec<Fe> {
    let mut out = Vec::with_capacity(d * d);
    for i in 0..d {
        for j in 0..d {
            let mut acc = a[0].field().zero();
            for k in 0..d {
                acc = acc.add_ref(&a[i * d + k].mul_ref(&b[k * d + j]));
            }
            out.push(acc);
        }
    }
    out
}

/// The exact rank condition that certified an abelian verdict.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// `σ^s·D^n` has full rank modulo `σ^s` for `s = deg_τ(D^n)`.
    Sufficient,
    /// `σ^{s_n}·D^n` has full rank modulo `σ^{s_n}`.
    PowerCondition,
    /// The column of blocks `σ^{s_n}·D^k`, `k = 1..n`, has rank `d` modulo `σ^{s_n}`.
    BlockVertical,
    /// The row of blocks `σ^{s_n}·D^k`, `k = 1..n`, has rank `d` modulo `σ^{s_n}`.
    BlockHorizontal,
}

impl CertificateKind {
    pub const ALL: [CertificateKind; 4] = [
        CertificateKind::PowerCondition,
        CertificateKind::Sufficient,
        CertificateKind::BlockVertical,
        CertificateKind::BlockHorizontal,
    ];

    pub fn label(self) -> &'static str {
        match self {
            CertificateKind::Sufficient => "sufficient",
            CertificateKind::PowerCondition => "power_condition",
            CertificateKind::BlockVertical => "block_vertical",
            CertificateKind::BlockHorizontal => "block_horizontal",
        }
    }
}

/// A reproducible rank computation: the matrix is determined by `(kind, n)`
/// and the modulus is `σ^{s_n}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankCertificate {
    pub kind: CertificateKind,
    pub n: usize,
    pub s_n: usize,
    pub rank: usize,
}

/// Powers `D, D², …` of the matrix of `φ_t`, computed on demand.
pub struct PowerCache<'a> {
    module: &'a TModule,
    powers: Vec<TauMatrix>,
}

impl<'a> PowerCache<'a> {
    pub fn new(module: &'a TModule) -> Self {
        PowerCache { module, powers: vec![module.phi_t.clone()] }
    }

    fn ensure(&mut self, n: usize) {
        while self.powers.len() < n {
            let next = self.powers.last().expect("nonempty").mat_mul(&self.module.phi_t).expect("square");
            self.powers.push(next);
        }
    }

    /// `D^n` for `n ≥ 1`.
    pub fn power(&mut self, n: usize) -> &TauMatrix {
        self.ensure(n);
        &self.powers[n - 1]
    }

    /// Largest τ-degree among `D, …, D^n`.
    pub fn s_n(&mut self, n: usize) -> usize {
        self.ensure(n);
        crate::skew_tau::s_n(&self.powers[..n])
    }

    /// Runs one rank condition at exponent `n`.
    pub fn check(&mut self, kind: CertificateKind, n: usize) -> Result<Option<RankCertificate>> {
        if n == 0 {
            return Err(Error::InvalidConfig("rank conditions need n >= 1".into()));
        }
        let d = self.module.dim();
        let s_n = self.s_n(n);
        let (matrix, s) = match kind {
            CertificateKind::PowerCondition => (SigmaMatrix::from_tau_matrix(self.power(n), s_n as i64), s_n),
            CertificateKind::Sufficient => {
                let s = self.power(n).deg_tau().unwrap_or(0);
                (SigmaMatrix::from_tau_matrix(self.power(n), s as i64), s)
            }
            CertificateKind::BlockVertical | CertificateKind::BlockHorizontal => {
                let blocks: Vec<SigmaMatrix> =
                    (1..=n).map(|k| SigmaMatrix::from_tau_matrix(self.power(k), s_n as i64)).collect();
                let m = if kind == CertificateKind::BlockVertical {
                    SigmaMatrix::vstack(&blocks)?
                } else {
                    SigmaMatrix::hstack(&blocks)?
                };
                (m, s_n)
            }
        };
        if s == 0 {
            // nothing has rank above zero modulo σ^0
            return Ok(None);
        }
        let rank = rank_mod(&matrix, s)?;
        Ok((rank == d).then_some(RankCertificate { kind, n, s_n: s, rank }))
    }
}

pub fn check_condition_1(m: &TModule, n: usize) -> Result<Option<RankCertificate>> {
    PowerCache::new(m).check(CertificateKind::PowerCondition, n)
}

pub fn check_condition_2(m: &TModule, n: usize) -> Result<Option<RankCertificate>> {
    PowerCache::new(m).check(CertificateKind::BlockVertical, n)
}

pub fn check_condition_2prime(m: &TModule, n: usize) -> Result<Option<RankCertificate>> {
    PowerCache::new(m).check(CertificateKind::BlockHorizontal, n)
}

/// Full rank of `σ^s·φ_t` modulo `σ^s` with `s = deg_τ(φ_t)`.
pub fn quick_check(m: &TModule) -> Result<Option<RankCertificate>> {
    PowerCache::new(m).check(CertificateKind::Sufficient, 1)
}

/// Purity of the motive; only meaningful for abelian modules.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Purity {
    Decided(bool),
    NotApplicable(NotApplicable),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NotApplicable {
    #[serde(rename = "not-applicable")]
    NotApplicable,
}

impl Purity {
    pub const NOT_APPLICABLE: Purity = Purity::NotApplicable(NotApplicable::NotApplicable);

    pub fn is_pure(self) -> bool {
        self == Purity::Decided(true)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "abelian")]
    Abelian,
    #[serde(rename = "abelian, uncertified")]
    AbelianUncertified,
    #[serde(rename = "not abelian")]
    NotAbelian,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Abelian => "abelian",
            Verdict::AbelianUncertified => "abelian, uncertified",
            Verdict::NotAbelian => "not abelian",
        })
    }
}

/// First certifying exponent of each rank condition, when requested.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSummary {
    pub n_max: usize,
    pub first_certified: Vec<CheckEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckEntry {
    pub kind: CertificateKind,
    pub n: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub dimension: usize,
    pub verdict: Verdict,
    pub abelian: bool,
    pub t_finite: bool,
    pub pure: Purity,
    pub weight: Option<String>,
    pub dual_weight: Option<String>,
    pub edge_multiset: Vec<EdgeJson>,
    pub np_vertices: Vec<Vec<[i64; 2]>>,
    pub certificate: Option<RankCertificate>,
    /// Set for non-abelian verdicts: the edges were reproduced at doubled precision.
    pub stable_under_doubling: Option<bool>,
    pub precision_assumed: bool,
    pub precision_used: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<CheckSummary>,
}

impl AnalysisReport {
    /// Human-readable rendering.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k:<26}{v}\n"));
        line("verdict:", self.verdict.to_string());
        line("abelian:", self.abelian.to_string());
        line("t-finite:", self.t_finite.to_string());
        line(
            "pure:",
            match self.pure {
                Purity::Decided(b) => b.to_string(),
                Purity::NotApplicable(_) => "not applicable".into(),
            },
        );
        line("weight:", self.weight.clone().unwrap_or_else(|| "-".into()));
        line("dual weight:", self.dual_weight.clone().unwrap_or_else(|| "-".into()));
        let edges: Vec<String> =
            self.edge_multiset.iter().map(|e| format!("(length {}, slope {})", e.length, e.slope)).collect();
        line("edges:", edges.join(", "));
        for (i, v) in self.np_vertices.iter().enumerate() {
            let pts: Vec<String> = v.iter().map(|[x, y]| format!("({x},{y})")).collect();
            line(&format!("polygon {}:", i + 1), pts.join(" "));
        }
        line(
            "certificate:",
            match &self.certificate {
                Some(c) => format!("{} at n = {}, modulus s^{}, rank {}", c.kind.label(), c.n, c.s_n, c.rank),
                None => "-".into(),
            },
        );
        if let Some(stable) = self.stable_under_doubling {
            line("stable at 2x:", stable.to_string());
        }
        line(
            "precision:",
            format!("{}{}", self.precision_used, if self.precision_assumed { " (zeros assumed)" } else { "" }),
        );
        if let Some(check) = &self.check {
            for e in &check.first_certified {
                line(
                    &format!("check {}:", e.kind.label()),
                    match e.n {
                        Some(n) => format!("n = {n}"),
                        None => format!("none for n <= {}", check.n_max),
                    },
                );
            }
        }
        out
    }
}

/// Settings for [`decide`]; unset fields take defaults derived from the module.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct AnalyzeOptions {
    pub precision: Option<i64>,
    pub precision_cap: Option<i64>,
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    /// Also evaluates every rank condition and fails on disagreement.
    pub check: bool,
}

impl AnalyzeOptions {
    pub fn default_n_max(m: &TModule) -> usize {
        2 * m.dim() * (m.deg_tau() + 1)
    }

    fn diagonalize_options(&self, m: &TModule) -> Result<DiagonalizeOptions> {
        let base = DiagonalizeOptions::for_module(m.field(), m.dim(), m.deg_tau());
        let limit = base.precision_cap;
        let precision = self.precision.unwrap_or(base.precision);
        let cap = self.precision_cap.unwrap_or(limit).max(precision);
        if precision < 1 || cap > limit {
            return Err(Error::InvalidConfig(format!(
                "precision must lie in 1..={limit} for q = {} with this dimension and tau-degree",
                m.config().q
            )));
        }
        Ok(DiagonalizeOptions { precision, precision_cap: cap, seed: self.seed })
    }
}

/// Everything the verdict is computed from.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub report: AnalysisReport,
    pub diagonalization: Diagonalization,
}

fn edge_multiset(diag: &Diagonalization) -> Result<Vec<Edge>> {
    aggregated_edges(&diag.entries)
}

/// Decides abelianness and purity.
pub fn decide(m: &TModule, opts: &AnalyzeOptions) -> Result<AnalysisReport> {
    Ok(analyze(m, opts)?.report)
}

/// [`decide`] that also returns the diagonal form.
pub fn analyze(m: &TModule, opts: &AnalyzeOptions) -> Result<Analysis> {
    m.validate()?;
    let c = SigmaTMatrix::characteristic(m.phi_t());
    let dopts = opts.diagonalize_options(m)?;
    let mut diag = diagonalize_sigma_t(&c, &dopts)?;
    let mut edges = edge_multiset(&diag)?;
    let mut abelian = edges.iter().all(|e| e.slope > Slope::from_integer(0));
    let mut stable = None;
    if !abelian {
        let mut confirmed = false;
        for _ in 0..3 {
            let doubled = (2 * diag.precision_used).min(dopts.precision_cap);
            if doubled <= diag.precision_used {
                break;
            }
            let again_opts = DiagonalizeOptions { precision: doubled, ..dopts };
            let again = diagonalize_sigma_t(&c, &again_opts)?;
            let again_edges = edge_multiset(&again)?;
            let same = again_edges == edges;
            diag = again;
            edges = again_edges;
            if same {
                confirmed = true;
                break;
            }
        }
        abelian = edges.iter().all(|e| e.slope > Slope::from_integer(0));
        if abelian {
            return Err(Error::PrecisionExhausted {
                reason: "the sign of the slopes changed when the precision was doubled".into(),
                suggested: 2 * diag.precision_used,
            });
        }
        stable = Some(confirmed);
    }

    let slopes: BTreeSet<Slope> = edges.iter().map(|e| e.slope).collect();
    let (pure, weight) = if !abelian {
        (Purity::NOT_APPLICABLE, None)
    } else if slopes.len() == 1 {
        let s = *slopes.iter().next().expect("singleton");
        (Purity::Decided(true), Some(s.recip()))
    } else {
        (Purity::Decided(false), None)
    };

    let n_max = opts.n_max.unwrap_or_else(|| AnalyzeOptions::default_n_max(m));
    let mut cache = PowerCache::new(m);
    let certificate = if abelian { search_certificate(&mut cache, n_max)? } else { None };
    let verdict = match (abelian, certificate.is_some()) {
        (false, _) => Verdict::NotAbelian,
        (true, true) => Verdict::Abelian,
        (true, false) => Verdict::AbelianUncertified,
    };

    let check = if opts.check { Some(run_check(&mut cache, n_max, abelian)?) } else { None };

    let np_vertices =
        entry_polygons(&diag.entries)?.iter().map(|p| p.vertices().iter().map(|&(x, y)| [x, y]).collect()).collect();
    let report = AnalysisReport {
        dimension: m.dim(),
        verdict,
        abelian,
        t_finite: abelian,
        pure,
        weight: weight.map(|w| format_slope(&w)),
        dual_weight: weight.map(|w| format_slope(&-w)),
        edge_multiset: edges.iter().map(Edge::to_json).collect(),
        np_vertices,
        certificate,
        stable_under_doubling: stable,
        precision_assumed: diag.precision_assumed,
        precision_used: diag.precision_used,
        check,
    };
    Ok(Analysis { report, diagonalization: diag })
}

fn search_certificate(cache: &mut PowerCache<'_>, n_max: usize) -> Result<Option<RankCertificate>> {
    for n in 1..=n_max {
        for kind in [CertificateKind::PowerCondition, CertificateKind::BlockVertical, CertificateKind::BlockHorizontal]
        {
            if let Some(c) = cache.check(kind, n)? {
                return Ok(Some(c));
            }
        }
    }
    Ok(None)
}

fn run_check(cache: &mut PowerCache<'_>, n_max: usize, abelian: bool) -> Result<CheckSummary> {
    let mut first_certified = Vec::new();
    for kind in CertificateKind::ALL {
        let mut found = None;
        for n in 1..=n_max {
            if let Some(c) = cache.check(kind, n)? {
                found = Some(c.n);
                break;
            }
        }
        first_certified.push(CheckEntry { kind, n: found });
    }
    let certified: Vec<&CheckEntry> = first_certified.iter().filter(|e| e.n.is_some()).collect();
    if !abelian && !certified.is_empty() {
        return Err(Error::CheckDisagreement(format!(
            "the polygon has a non-positive slope but {} certifies full rank at n = {}",
            certified[0].kind.label(),
            certified[0].n.expect("filtered")
        )));
    }
    if abelian {
        // the three conditions of the equivalence must all certify eventually
        for e in &first_certified {
            if e.kind != CertificateKind::Sufficient && e.n.is_none() {
                return Err(Error::CheckDisagreement(format!(
                    "all slopes are positive but {} finds no full rank for n <= {n_max}",
                    e.kind.label()
                )));
            }
        }
    }
    Ok(CheckSummary { n_max, first_certified })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_tau;

    fn module(q: u64, rows: &[&[&str]]) -> Result<TModule> {
        let f = PerfectField::rational(q).unwrap();
        let m =
            TauMatrix::from_rows(rows.iter().map(|r| r.iter().map(|e| parse_tau(&f, e).unwrap()).collect()).collect())
                .unwrap();
        TModule::new(m, None)
    }

    #[test]
    fn validation() {
        assert!(module(3, &[&["th + tau"]]).is_ok());
        assert!(module(3, &[&["th", "1", "0"], &["0", "th", "1"], &["tau", "0", "th"]]).is_ok());
        let err = module(3, &[&["th", "0"], &["0", "th + 1"]]).unwrap_err();
        assert!(matches!(err, Error::NotATModule { power: 2, .. }));
    }

    #[test]
    fn drinfeld_verdict() {
        let m = module(3, &[&["th + tau + tau^2"]]).unwrap();
        let r = decide(&m, &AnalyzeOptions::default()).unwrap();
        assert_eq!(r.verdict, Verdict::Abelian);
        assert!(r.pure.is_pure());
        assert_eq!(r.weight.as_deref(), Some("1/2"));
        assert_eq!(r.dual_weight.as_deref(), Some("-1/2"));
        assert_eq!(r.np_vertices, vec![vec![[0, -2], [1, 0]]]);
        assert!(r.certificate.unwrap().n <= 4);
    }

    #[test]
    fn example_matrix_conditions() {
        let m = module(3, &[&["th + tau^2", "tau^3"], &["1 + tau", "th + tau^2"]]).unwrap();
        assert!(check_condition_1(&m, 1).unwrap().is_none());
        let c = check_condition_1(&m, 2).unwrap().unwrap();
        assert_eq!((c.s_n, c.rank), (5, 2));
        assert!(check_condition_2(&m, 2).unwrap().is_some());
        assert!(check_condition_2prime(&m, 2).unwrap().is_some());
        assert!(quick_check(&m).unwrap().is_none());
    }

    #[test]
    fn extension_is_not_abelian() {
        let m = module(3, &[&["th + tau^2", "0"], &["tau", "th"]]).unwrap();
        let opts = AnalyzeOptions { n_max: Some(8), check: true, ..Default::default() };
        let r = decide(&m, &opts).unwrap();
        assert_eq!(r.verdict, Verdict::NotAbelian);
        assert_eq!(r.pure, Purity::NOT_APPLICABLE);
        assert_eq!(r.stable_under_doubling, Some(true));
        let slopes: Vec<&str> = r.edge_multiset.iter().map(|e| e.slope.as_str()).collect();
        assert!(slopes.contains(&"0") && slopes.contains(&"2"));
        assert!(r.check.unwrap().first_certified.iter().all(|e| e.n.is_none()));
    }

    #[test]
    fn report_json_shape() {
        let m = module(3, &[&["th", "1", "0"], &["0", "th", "1"], &["tau", "0", "th"]]).unwrap();
        let r = decide(&m, &AnalyzeOptions::default()).unwrap();
        let v = serde_json::to_value(&r).unwrap();
        assert_eq!(v["pure"], serde_json::json!(true));
        assert_eq!(v["weight"], serde_json::json!("3"));
        assert_eq!(v["dual_weight"], serde_json::json!("-3"));
        let back: AnalysisReport = serde_json::from_value(v).unwrap();
        assert_eq!(back, r);
        let m = module(3, &[&["th"]]).unwrap();
        let r = decide(&m, &AnalyzeOptions::default()).unwrap();
        assert_eq!(serde_json::to_value(r.pure).unwrap(), serde_json::json!("not-applicable"));
    }
}
