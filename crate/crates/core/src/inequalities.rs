//! Checks of the diameter, spectral gap and distortion inequalities, decay
//! fits across levels, and the family sweep that ties everything together.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::distortion::{
    bourgain_embedding, distortion_lower_bound, pascal_planar_embedding, realized_distortion,
    DistortionError, PASCAL_MAX_LEVEL,
};
use crate::families::{Family, FamilyError};
use crate::graph::Multigraph;
use crate::metric::{all_pairs_distances, diameter, DistanceMatrix};
use crate::scalar::Scalar;
use crate::spectral::{
    adjacency_alpha, lambda1_p2_exact, lambda1_variational, Convention, SpectralError,
    VariationalOptions,
};
use crate::volume::{rho_exact, rho_lower_ballcount, RhoResult, VolumeError, EXACT_LIMIT};

/// Absolute tolerance of every `lhs ≤ rhs` decision.
pub const TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum InequalityError {
    #[error("rho = 0 makes the constant infinite")]
    DegenerateRho,
    #[error("eps = {0} must lie in (0, 1)")]
    InvalidEps(f64),
    #[error("bipartite-degenerate: alpha = k = {0}, the adjacency diameter bound is undefined")]
    BipartiteDegenerate(u32),
    #[error("the adjacency diameter bound needs {0}")]
    NotApplicable(&'static str),
    #[error("decay fit needs at least 3 rows, got {0}")]
    TooFewRows(usize),
    #[error("decay fit needs positive values (row {0})")]
    NonPositive(usize),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Volume(#[from] VolumeError),
    #[error(transparent)]
    Distortion(#[from] DistortionError),
    #[error(transparent)]
    Family(#[from] FamilyError),
    #[error(transparent)]
    Graph(#[from] crate::graph::GraphError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Inequality {
    Thm3,
    Eq6,
    Eq8,
    Prop6,
}

impl Inequality {
    pub fn name(self) -> &'static str {
        match self {
            Inequality::Thm3 => "thm3",
            Inequality::Eq6 => "eq6",
            Inequality::Eq8 => "eq8",
            Inequality::Prop6 => "prop6",
        }
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Inequality {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [
            Inequality::Thm3,
            Inequality::Eq6,
            Inequality::Eq8,
            Inequality::Prop6,
        ]
        .into_iter()
        .find(|i| i.name() == s.to_ascii_lowercase())
        .ok_or_else(|| format!("unknown inequality `{s}` (thm3, eq6, eq8, prop6)"))
    }
}

/// One evaluated instance of `lhs ≤ rhs`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct InequalityReport<T> {
    pub inequality: Inequality,
    pub graph: String,
    pub params: Vec<(String, T)>,
    pub lhs: T,
    pub rhs: T,
    pub slack: T,
    pub pass: bool,
    /// False when an input is only an estimate of the wrong direction, in
    /// which case the outcome is informative but not a test of the claim.
    pub hard: bool,
    pub notes: Vec<String>,
}

impl<T: Scalar> InequalityReport<T> {
    pub fn new(inequality: Inequality, graph: &str, lhs: T, rhs: T) -> Self {
        Self {
            inequality,
            graph: graph.to_string(),
            params: Vec::new(),
            lhs,
            rhs,
            slack: rhs - lhs,
            pass: lhs <= rhs + T::lit(TOLERANCE),
            hard: true,
            notes: Vec::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: T) -> &mut Self {
        self.params.push((name.to_string(), value));
        self
    }

    pub fn note(&mut self, text: impl Into<String>) -> &mut Self {
        self.notes.push(text.into());
        self
    }

    /// Fails only if the check is hard and did not pass.
    pub fn failed(&self) -> bool {
        self.hard && !self.pass
    }
}

/// `C = k/(1-ε) · (2/ρ)^p`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct TheoremConstants<T> {
    pub k: u32,
    pub eps: T,
    pub rho: T,
    pub p: T,
}

impl<T: Scalar> TheoremConstants<T> {
    pub fn new(k: u32, eps: T, rho: T, p: T) -> Result<Self, InequalityError> {
        if !(eps > T::zero() && eps < T::one()) {
            return Err(InequalityError::InvalidEps(eps.as_f64()));
        }
        if !(rho > T::zero()) {
            return Err(InequalityError::DegenerateRho);
        }
        Ok(Self { k, eps, rho, p })
    }

    pub fn c(&self) -> T {
        T::from_count(self.k as usize) / (T::one() - self.eps)
            * (T::lit(2.0) / self.rho).powf(self.p)
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Theorem3Inputs<T> {
    pub p: T,
    pub eps: T,
    /// Ordered-pair convention.
    pub lambda_eq3: T,
    pub lambda_exact: bool,
    /// Exact value or a lower bound.
    pub rho: T,
    pub k: u32,
    pub delta: u32,
    /// Realized distortion of some embedding.
    pub distortion: T,
}

/// `λ ≤ C (L/δ)^p`. Hard only when `λ` is exact.
pub fn theorem3_check<T: Scalar>(
    graph: &str,
    inputs: Theorem3Inputs<T>,
) -> Result<InequalityReport<T>, InequalityError> {
    let consts = TheoremConstants::new(inputs.k, inputs.eps, inputs.rho, inputs.p)?;
    let c = consts.c();
    let delta = T::from_count(inputs.delta as usize);
    let rhs = c * (inputs.distortion / delta).powf(inputs.p);
    let mut r = InequalityReport::new(Inequality::Thm3, graph, inputs.lambda_eq3, rhs);
    r.param("p", inputs.p)
        .param("eps", inputs.eps)
        .param("rho", inputs.rho)
        .param("k", T::from_count(inputs.k as usize))
        .param("delta", delta)
        .param("distortion", inputs.distortion)
        .param("C", c);
    if !inputs.lambda_exact {
        r.hard = false;
        r.note("lambda estimate is upper-only");
    }
    Ok(r)
}

/// `δ ≤ 2 √(2k/λ) log₂|V|`, from diameter, degree bound, size and the
/// operator-convention gap. The ordered-pair variant is recorded as a
/// parameter.
pub fn eq6_from_values<T: Scalar>(
    graph: &str,
    delta: u32,
    k: u32,
    vertices: usize,
    lambda_op: T,
) -> InequalityReport<T> {
    let kf = T::from_count(k as usize);
    let two = T::lit(2.0);
    let log_v = T::from_count(vertices).log2();
    let rhs = two * (two * kf / lambda_op).sqrt() * log_v;
    let rhs_eq3 = two * (two * kf / (two * lambda_op)).sqrt() * log_v;
    let mut r = InequalityReport::new(Inequality::Eq6, graph, T::from_count(delta as usize), rhs);
    r.param("k", kf)
        .param("lambda_op", lambda_op)
        .param("rhs_eq3", rhs_eq3);
    if T::from_count(delta as usize) > rhs_eq3 + T::lit(TOLERANCE) {
        r.note("fails with the ordered-pair gap");
    }
    r
}

pub fn eq6_check<T: Scalar>(
    graph: &str,
    g: &Multigraph,
    d: &DistanceMatrix,
) -> Result<InequalityReport<T>, InequalityError> {
    let lambda = lambda1_p2_exact::<T>(g, Convention::Operator)?;
    Ok(eq6_from_values(
        graph,
        diameter(d),
        g.max_degree(),
        g.vertex_count(),
        lambda.lambda,
    ))
}

/// `δ ≤ ⌈ln(|V|-1) / ln(k/α)⌉`.
pub fn eq8_from_values<T: Scalar>(
    graph: &str,
    delta: u32,
    k: u32,
    vertices: usize,
    alpha: T,
) -> Result<InequalityReport<T>, InequalityError> {
    let kf = T::from_count(k as usize);
    if alpha >= kf {
        return Err(InequalityError::BipartiteDegenerate(k));
    }
    if vertices < 3 {
        return Err(InequalityError::NotApplicable("at least 3 vertices"));
    }
    if alpha <= T::zero() {
        return Err(InequalityError::NotApplicable("alpha > 0"));
    }
    let bound = (T::from_count(vertices - 1).ln() / (kf / alpha).ln()).ceil();
    let mut r = InequalityReport::new(Inequality::Eq8, graph, T::from_count(delta as usize), bound);
    r.param("k", kf).param("alpha", alpha);
    Ok(r)
}

pub fn eq8_check<T: Scalar>(
    graph: &str,
    g: &Multigraph,
    d: &DistanceMatrix,
) -> Result<InequalityReport<T>, InequalityError> {
    let a = adjacency_alpha::<T>(g)?;
    if a.bipartite_degenerate {
        return Err(InequalityError::BipartiteDegenerate(a.k));
    }
    eq8_from_values(graph, diameter(d), a.k, g.vertex_count(), a.alpha)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct LinearFit<T> {
    pub slope: T,
    pub intercept: T,
}

/// Ordinary least squares `y ≈ intercept + slope·x`.
pub fn linear_fit<T: Scalar>(points: &[(T, T)]) -> LinearFit<T> {
    let n = T::from_count(points.len());
    let mx = points.iter().map(|p| p.0).sum::<T>() / n;
    let my = points.iter().map(|p| p.1).sum::<T>() / n;
    let sxy: T = points.iter().map(|&(x, y)| (x - mx) * (y - my)).sum();
    let sxx: T = points.iter().map(|&(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    LinearFit {
        slope,
        intercept: my - slope * mx,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct DecayFit<T> {
    /// `λ_{n+1}/λ_n` for consecutive rows.
    pub ratios: Vec<T>,
    /// `exp` of the slope of `ln λ` against `n`.
    pub base: T,
    pub fit: LinearFit<T>,
}

pub fn decay_fit<T: Scalar>(rows: &[(usize, T)]) -> Result<DecayFit<T>, InequalityError> {
    if rows.len() < 3 {
        return Err(InequalityError::TooFewRows(rows.len()));
    }
    if let Some(i) = rows.iter().position(|r| !(r.1 > T::zero())) {
        return Err(InequalityError::NonPositive(i));
    }
    let ratios = rows.windows(2).map(|w| w[1].1 / w[0].1).collect();
    let points: Vec<(T, T)> = rows
        .iter()
        .map(|&(n, l)| (T::from_count(n), l.ln()))
        .collect();
    let fit = linear_fit(&points);
    Ok(DecayFit {
        ratios,
        base: fit.slope.exp(),
        fit,
    })
}

#[derive(Clone, Debug)]
pub struct SweepOptions {
    pub ps: Vec<f64>,
    pub epss: Vec<f64>,
    pub seed: u64,
    /// Largest graph that gets a Bourgain embedding.
    pub bourgain_limit: usize,
    pub variational: VariationalOptions,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self {
            ps: vec![2.0],
            epss: vec![0.5],
            seed: 0,
            bourgain_limit: 1024,
            variational: VariationalOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct RhoEntry<T> {
    pub eps: T,
    pub value: T,
    pub method: String,
    pub degenerate: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct FamilySweepRow<T> {
    pub family: String,
    pub n: usize,
    pub vertices: usize,
    pub delta: u32,
    pub k: u32,
    pub lambda_p2_op: T,
    pub lambda_p2_eq3: T,
    /// `(p, λ_eq3)` for each requested `p` other than 2.
    pub lambda_eq3: Vec<(T, T)>,
    pub rho: Vec<RhoEntry<T>>,
    pub dist_lb: Option<T>,
    pub dist_ub_lattice: Option<T>,
    pub dist_ub_bourgain: Option<T>,
    pub thm3_pass: Option<bool>,
    pub eq6_pass: bool,
    pub eq8_pass: Option<bool>,
    pub reports: Vec<InequalityReport<T>>,
}

/// ρ for the sweep: exact up to the search cap, the ball-count lower bound
/// above it.
pub fn sweep_rho(g: &Multigraph, d: &DistanceMatrix, eps: f64) -> Result<RhoResult, VolumeError> {
    if g.vertex_count() <= EXACT_LIMIT {
        rho_exact(g, d, eps)
    } else {
        rho_lower_ballcount(g, d, eps)
    }
}

/// One row: exact `p = 2` gap, variational gaps for the other exponents, ρ per
/// `ε`, distortion bounds, and the inequality checks.
pub fn sweep_row<T: Scalar>(
    family: Family,
    level: usize,
    opts: &SweepOptions,
) -> Result<FamilySweepRow<T>, InequalityError> {
    let g = family.build(level)?;
    let d = all_pairs_distances(&g)?;
    let id = format!("{family}({level})");
    let n = g.vertex_count();
    let delta = diameter(&d);
    let k = g.max_degree();
    let two = T::lit(2.0);

    let exact = lambda1_p2_exact::<T>(&g, Convention::Operator)?;
    let lambda_op = exact.lambda;
    let lambda_eq3 = exact.in_convention(Convention::Eq3);
    let mut lambdas = Vec::new();
    for &p in &opts.ps {
        if p != 2.0 {
            let r = lambda1_variational::<T>(&g, T::lit(p), Convention::Eq3, opts.variational)?;
            lambdas.push((T::lit(p), r.lambda));
        }
    }

    let mut rho = Vec::new();
    let mut rho_values = Vec::new();
    for &eps in &opts.epss {
        let r = sweep_rho(&g, &d, eps)?;
        rho.push(RhoEntry {
            eps: T::lit(eps),
            value: r.to_scalar(),
            method: r.method.tag().to_string(),
            degenerate: r.degenerate,
        });
        rho_values.push((T::lit(eps), r.to_scalar::<T>()));
    }

    let mut embeddings = Vec::new();
    let dist_ub_lattice = if family == Family::Hanoi && level <= PASCAL_MAX_LEVEL {
        let e = pascal_planar_embedding::<T>(level, two)?;
        let r = realized_distortion(&d, &e)?.realized;
        embeddings.push(("lattice", r));
        Some(r)
    } else {
        None
    };
    let dist_ub_bourgain = if n >= 2 && n <= opts.bourgain_limit {
        let e = bourgain_embedding::<T>(&g, &d, two, opts.seed);
        let r = realized_distortion(&d, &e)?.realized;
        embeddings.push(("bourgain", r));
        Some(r)
    } else {
        None
    };

    let mut reports = Vec::new();
    let mut dist_lb: Option<T> = None;
    let mut thm3_pass: Option<bool> = None;
    for &(eps, rho_v) in &rho_values {
        if !(rho_v > T::zero()) || !(eps < T::one()) {
            continue;
        }
        let lb = distortion_lower_bound(lambda_eq3, delta, rho_v, k, eps, two)?;
        dist_lb = Some(dist_lb.map_or(lb, |b: T| b.max(lb)));
        for &(name, dist) in &embeddings {
            let mut r = theorem3_check(
                &id,
                Theorem3Inputs {
                    p: two,
                    eps,
                    lambda_eq3,
                    lambda_exact: true,
                    rho: rho_v,
                    k,
                    delta,
                    distortion: dist,
                },
            )?;
            r.note(format!("embedding {name}"));
            thm3_pass = Some(thm3_pass.unwrap_or(true) && r.pass);
            reports.push(r);
        }
    }

    let eq6 = eq6_from_values(&id, delta, k, n, lambda_op);
    let eq6_pass = eq6.pass;
    reports.push(eq6);
    let eq8_pass = if g.regular_degree().is_some() && n <= crate::spectral::DENSE_LIMIT {
        let a = adjacency_alpha::<T>(&g)?;
        match eq8_from_values(&id, delta, a.k, n, a.alpha) {
            Ok(r) if !a.bipartite_degenerate => {
                let pass = r.pass;
                reports.push(r);
                Some(pass)
            }
            _ => None,
        }
    } else {
        None
    };

    Ok(FamilySweepRow {
        family: family.name().to_string(),
        n: level,
        vertices: n,
        delta,
        k,
        lambda_p2_op: lambda_op,
        lambda_p2_eq3: lambda_eq3,
        lambda_eq3: lambdas,
        rho,
        dist_lb,
        dist_ub_lattice,
        dist_ub_bourgain,
        thm3_pass,
        eq6_pass,
        eq8_pass,
        reports,
    })
}

/// Rows for every level, computed in parallel and returned in level order.
pub fn family_sweep<T: Scalar>(
    family: Family,
    levels: &[usize],
    opts: &SweepOptions,
) -> Result<Vec<FamilySweepRow<T>>, InequalityError> {
    levels
        .par_iter()
        .map(|&level| sweep_row(family, level, opts))
        .collect()
}

/// Slope of realized Bourgain distortion against `log₂|V|` over the rows that
/// have one. Reported only; the constant it estimates is unknown.
pub fn bourgain_log_slope<T: Scalar>(rows: &[FamilySweepRow<T>]) -> Option<T> {
    let points: Vec<(T, T)> = rows
        .iter()
        .filter_map(|r| {
            r.dist_ub_bourgain
                .map(|u| (T::from_count(r.vertices).log2(), u))
        })
        .collect();
    (points.len() >= 2).then(|| linear_fit(&points).slope)
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed,
/// exponent form outside `[1e-5, 1e12)`.
pub fn format_g(v: f64) -> String {
    if v == 0.0 {
        return "0".to_string();
    }
    if !v.is_finite() {
        return if v.is_nan() {
            "nan".into()
        } else if v > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        };
    }
    let sci = format!("{:.11e}", v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, v))
    } else {
        let m = trim_zeros(mantissa.to_string());
        format!("{m}e{}{:02}", if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn p_tag(p: f64) -> String {
    format_g(p)
}

/// Header for a set of rows; the exponent and `ε` columns come from the first
/// row.
pub fn csv_header<T: Scalar>(rows: &[FamilySweepRow<T>], opts: &SweepOptions) -> String {
    let mut cols: Vec<String> = [
        "family",
        "n",
        "V",
        "delta",
        "k",
        "lambda_p2_op",
        "lambda_p2_eq3",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    let _ = rows;
    for &p in opts.ps.iter().filter(|&&p| p != 2.0) {
        cols.push(format!("lambda_p{}_eq3", p_tag(p)));
    }
    for &eps in &opts.epss {
        cols.push(format!("rho_eps{}", format_g(eps)));
    }
    cols.extend(
        [
            "rho_method",
            "dist_lb",
            "dist_ub_lattice",
            "dist_ub_bourgain",
            "thm3_pass",
            "eq6_pass",
            "eq8_pass",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    cols.join(",")
}

fn opt_num<T: Scalar>(v: Option<T>) -> String {
    v.map_or_else(|| "NA".to_string(), |x| format_g(x.as_f64()))
}

fn opt_bool(v: Option<bool>) -> String {
    v.map_or_else(|| "NA".to_string(), |b| b.to_string())
}

pub fn csv_row<T: Scalar>(row: &FamilySweepRow<T>) -> String {
    let mut cells = vec![
        row.family.clone(),
        row.n.to_string(),
        row.vertices.to_string(),
        row.delta.to_string(),
        row.k.to_string(),
        format_g(row.lambda_p2_op.as_f64()),
        format_g(row.lambda_p2_eq3.as_f64()),
    ];
    cells.extend(row.lambda_eq3.iter().map(|(_, l)| format_g(l.as_f64())));
    cells.extend(row.rho.iter().map(|r| format_g(r.value.as_f64())));
    cells.push(
        row.rho
            .iter()
            .map(|r| r.method.as_str())
            .collect::<Vec<_>>()
            .join(";"),
    );
    cells.push(opt_num(row.dist_lb));
    cells.push(opt_num(row.dist_ub_lattice));
    cells.push(opt_num(row.dist_ub_bourgain));
    cells.push(opt_bool(row.thm3_pass));
    cells.push(row.eq6_pass.to_string());
    cells.push(opt_bool(row.eq8_pass));
    cells.join(",")
}

pub fn to_csv<T: Scalar>(rows: &[FamilySweepRow<T>], opts: &SweepOptions) -> String {
    let mut out = csv_header(rows, opts);
    out.push('\n');
    for r in rows {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}
