//! End-to-end variance experiments at desk-scale `K` and report emission.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::asymptotics::{variance_prediction, VariancePrediction};
use crate::hecke::{eigenforms, HeckeEigenform};
use crate::measure::{coefficients_needed, error_term_diagonal, expected_value, mu_f, shifted_sum_s, TestFunction};
use crate::numerics::KahanSum;
use crate::trace::{weights_for, KernelShape, WeightKernel};
use crate::{Error, Result};

/// Band for `empirical_M(2K) / empirical_M(K)` as powers of two.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub trend_band: (f64, f64),
    /// Bound on `lhs - M - cross - rest` relative to `max(|lhs|, 1)`.
    pub decomposition: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { trend_band: (1.0, 2.0), decomposition: 1e-9 }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct OutputPaths {
    pub csv: Option<PathBuf>,
    pub json: Option<PathBuf>,
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    #[serde(rename = "K_values")]
    pub k_values: Vec<f64>,
    pub psi1: TestFunction,
    pub psi2: TestFunction,
    pub kernel: KernelShape,
    pub tolerances: Tolerances,
    pub thread_count: usize,
    pub seed: u64,
    /// Coefficients `lambda_f(n)` computed per weight; `0` picks the minimum.
    pub truncation: usize,
    pub output: OutputPaths,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            k_values: vec![12.0, 24.0],
            psi1: TestFunction::default(),
            psi2: TestFunction::default(),
            kernel: KernelShape::default(),
            tolerances: Tolerances::default(),
            thread_count: 1,
            seed: 0,
            truncation: 0,
            output: OutputPaths::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_values.is_empty() {
            return Err(Error::Config("K_values is empty".into()));
        }
        if self.k_values.iter().any(|k| !(k.is_finite() && *k > 0.0)) {
            return Err(Error::Config("K_values must be positive".into()));
        }
        if self.k_values.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config("K_values must be strictly ascending".into()));
        }
        if self.thread_count == 0 {
            return Err(Error::Config("thread_count must be at least 1".into()));
        }
        Ok(())
    }

    fn weights(&self, kernel: &WeightKernel) -> Vec<(f64, Vec<(u32, f64)>)> {
        self.k_values
            .iter()
            .map(|&big_k| {
                let ws = weights_for(kernel, big_k).into_iter().map(|k| (k, kernel.h((k as f64 - 1.0) / big_k))).collect();
                (big_k, ws)
            })
            .collect()
    }

    /// Coefficients needed at weight `k` for both test functions.
    pub fn coefficients_needed(&self, k: u32) -> usize {
        coefficients_needed(k, &self.psi1).max(coefficients_needed(k, &self.psi2))
    }
}

/// Per-form ingredients, with `rest = mu - E(psi) - S_psi`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormRecord {
    pub k: u32,
    pub index: usize,
    pub sym2_l1: f64,
    pub mu: [f64; 2],
    pub s_term: [f64; 2],
    /// `E_psi` through the diagonal sum.
    pub e_term: [f64; 2],
    pub rest: [f64; 2],
}

/// One row of the experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarianceReport {
    #[serde(rename = "K")]
    pub big_k: f64,
    pub weights: Vec<u32>,
    pub forms: usize,
    /// `sum h L(1, sym^2 f) (mu - E)(psi1) (mu - E)(psi2)`.
    pub empirical_lhs: f64,
    /// `sum h L(1, sym^2 f) S_psi1 S_psi2`.
    #[serde(rename = "empirical_M")]
    pub empirical_m: f64,
    /// `sum h L (S_psi1 rest_2 + rest_1 S_psi2)`.
    pub cross_terms: f64,
    /// `sum h L rest_1 rest_2`.
    pub rest_terms: f64,
    /// `lhs - M - cross - rest`.
    pub decomposition_residual: f64,
    /// `sum h L E_psi1 E_psi2`.
    pub e_terms: f64,
    /// `sum h L S_psi_i^2`.
    pub s_square: [f64; 2],
    /// `sum h L E_psi_i^2`.
    pub e_square: [f64; 2],
    /// `sum h L (|S_1 E_2| + |E_1 S_2|)`.
    pub se_cross_abs: f64,
    /// Cauchy–Schwarz bound on `se_cross_abs`.
    pub se_cross_bound: f64,
    pub predicted: VariancePrediction,
    pub ratio_lhs_to_prediction: f64,
    #[serde(rename = "ratio_M_to_prediction")]
    pub ratio_m_to_prediction: f64,
    /// `empirical_M / empirical_M` at the previous `K`.
    pub trend_ratio: Option<f64>,
    pub trend_in_band: Option<bool>,
    pub records: Vec<FormRecord>,
}

fn form_record(k: u32, index: usize, f: &HeckeEigenform, psi: [&TestFunction; 2], expected: [f64; 2]) -> Result<FormRecord> {
    let mut mu = [0.0; 2];
    let mut s_term = [0.0; 2];
    let mut e_term = [0.0; 2];
    let mut rest = [0.0; 2];
    for i in 0..2 {
        mu[i] = mu_f(f, psi[i])?;
        s_term[i] = shifted_sum_s(f, psi[i])?;
        e_term[i] = error_term_diagonal(f, psi[i])?;
        rest[i] = mu[i] - expected[i] - s_term[i];
    }
    Ok(FormRecord { k, index, sym2_l1: f.sym2_l1(), mu, s_term, e_term, rest })
}

fn weight_records(k: u32, truncation: usize, psi: [&TestFunction; 2], expected: [f64; 2]) -> Result<Vec<FormRecord>> {
    eigenforms(k, truncation)?
        .iter()
        .enumerate()
        .map(|(i, f)| form_record(k, i, f, psi, expected))
        .collect()
}

fn check_finite(what: &str, x: f64) -> Result<f64> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(Error::Config(format!("{what} is not finite")))
    }
}

/// Run every `K` of the config. Coverage is checked for all weights first.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<VarianceReport>> {
    config.validate()?;
    let kernel = WeightKernel::new(config.kernel.clone());
    let plan = config.weights(&kernel);
    let mut all: Vec<u32> = plan.iter().flat_map(|(_, ws)| ws.iter().map(|w| w.0)).collect();
    all.sort_unstable();
    all.dedup();
    let need: Vec<usize> = all.iter().map(|&k| config.coefficients_needed(k)).collect();
    let max_need = need.iter().copied().max().unwrap_or(1);
    let truncation = if config.truncation == 0 { max_need.max(50) } else { config.truncation };
    let short: Vec<String> = all
        .iter()
        .zip(&need)
        .filter(|(_, &n)| n > truncation)
        .map(|(k, n)| format!("k = {k} needs {n}"))
        .collect();
    if !short.is_empty() {
        return Err(Error::Coverage { need: max_need as u64, have: truncation as u64 }).map_err(|e| {
            Error::Config(format!("{e}; {}", short.join(", ")))
        });
    }
    let psi = [&config.psi1, &config.psi2];
    let expected = [expected_value(psi[0])?, expected_value(psi[1])?];
    let records = compute_records(&all, truncation, psi, expected, config.thread_count)?;
    let prediction = variance_prediction(psi[0], psi[1], &kernel, 1.0)?;
    let mut reports: Vec<VarianceReport> = Vec::with_capacity(plan.len());
    for (big_k, ws) in plan {
        let mut sums = [KahanSum::new(), KahanSum::new(), KahanSum::new(), KahanSum::new(), KahanSum::new()];
        let mut sq = [KahanSum::new(), KahanSum::new(), KahanSum::new(), KahanSum::new()];
        let mut se_abs = KahanSum::new();
        let mut rows = Vec::new();
        for &(k, h) in &ws {
            for r in records.iter().filter(|r| r.k == k) {
                let w = h * r.sym2_l1;
                let x = [r.mu[0] - expected[0], r.mu[1] - expected[1]];
                sums[0].add(w * x[0] * x[1]);
                sums[1].add(w * r.s_term[0] * r.s_term[1]);
                sums[2].add(w * (r.s_term[0] * r.rest[1] + r.rest[0] * r.s_term[1]));
                sums[3].add(w * r.rest[0] * r.rest[1]);
                sums[4].add(w * r.e_term[0] * r.e_term[1]);
                sq[0].add(w * r.s_term[0] * r.s_term[0]);
                sq[1].add(w * r.s_term[1] * r.s_term[1]);
                sq[2].add(w * r.e_term[0] * r.e_term[0]);
                sq[3].add(w * r.e_term[1] * r.e_term[1]);
                se_abs.add(w * ((r.s_term[0] * r.e_term[1]).abs() + (r.e_term[0] * r.s_term[1]).abs()));
                rows.push(*r);
            }
        }
        let [lhs, m, cross, rest, e] = sums.map(|s| s.value());
        let [s1, s2, e1, e2] = sq.map(|s| s.value());
        for (name, v) in [("empirical_lhs", lhs), ("empirical_M", m), ("cross terms", cross), ("rest terms", rest)] {
            check_finite(name, v)?;
        }
        let predicted = prediction.at(big_k);
        let ratio = |x: f64| if predicted.total == 0.0 { 0.0 } else { x / predicted.total };
        let (trend_ratio, trend_in_band) = match reports.last() {
            Some(prev) if prev.empirical_m != 0.0 => {
                let r = m / prev.empirical_m;
                let scale = big_k / prev.big_k;
                let (lo, hi) = config.tolerances.trend_band;
                (Some(r), Some(r >= scale.powf(lo) && r <= scale.powf(hi)))
            }
            _ => (None, None),
        };
        reports.push(VarianceReport {
            big_k,
            weights: ws.iter().map(|w| w.0).collect(),
            forms: rows.len(),
            empirical_lhs: lhs,
            empirical_m: m,
            cross_terms: cross,
            rest_terms: rest,
            decomposition_residual: lhs - m - cross - rest,
            e_terms: e,
            s_square: [s1, s2],
            e_square: [e1, e2],
            se_cross_abs: se_abs.value(),
            se_cross_bound: (s1 * e2).sqrt() + (e1 * s2).sqrt(),
            predicted,
            ratio_lhs_to_prediction: ratio(lhs),
            ratio_m_to_prediction: ratio(m),
            trend_ratio,
            trend_in_band,
            records: rows,
        });
    }
    Ok(reports)
}

/// Per-weight records in ascending `k`, split over `threads` workers.
fn compute_records(weights: &[u32], truncation: usize, psi: [&TestFunction; 2], expected: [f64; 2], threads: usize) -> Result<Vec<FormRecord>> {
    if threads <= 1 || weights.len() <= 1 {
        let mut out = Vec::new();
        for &k in weights {
            out.extend(weight_records(k, truncation, psi, expected)?);
        }
        return Ok(out);
    }
    let chunks: Vec<Vec<u32>> = (0..threads).map(|t| weights.iter().copied().skip(t).step_by(threads).collect()).collect();
    let results: Vec<Result<Vec<Vec<FormRecord>>>> = std::thread::scope(|scope| {
        let handles: Vec<_> = chunks
            .iter()
            .map(|chunk| scope.spawn(move || chunk.iter().map(|&k| weight_records(k, truncation, psi, expected)).collect()))
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let mut by_weight = std::collections::BTreeMap::new();
    for (chunk, res) in chunks.iter().zip(results) {
        for (&k, recs) in chunk.iter().zip(res?) {
            by_weight.insert(k, recs);
        }
    }
    Ok(by_weight.into_values().flatten().collect())
}

/// Output formats written by [`emit_report`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Svg,
}

pub const CSV_HEADER: &str =
    "K,empirical_lhs,empirical_M,pred_logK_term,pred_logu_term,pred_const_term,pred_contour_term,pred_total_thm,pred_total_lemma";

pub fn to_csv(reports: &[VarianceReport]) -> String {
    let mut s = String::from(CSV_HEADER);
    s.push('\n');
    for r in reports {
        let p = &r.predicted;
        let _ = writeln!(
            s,
            "{},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e}",
            r.big_k, r.empirical_lhs, r.empirical_m, p.term_log_k, p.term_log_u, p.term_const, p.term_contour, p.total_theorem, p.total
        );
    }
    s
}

pub fn to_json(reports: &[VarianceReport]) -> Result<String> {
    serde_json::to_string_pretty(reports).map_err(|e| Error::Config(format!("JSON encoding failed: {e}")))
}

pub fn from_json(s: &str) -> Result<Vec<VarianceReport>> {
    serde_json::from_str(s).map_err(|e| Error::Config(format!("JSON decoding failed: {e}")))
}

/// Log-log plot of `|value|` against `K`, one polyline per series.
pub fn to_svg(reports: &[VarianceReport]) -> String {
    const W: f64 = 640.0;
    const H: f64 = 400.0;
    const PAD: f64 = 50.0;
    let series: [(&str, &str, fn(&VarianceReport) -> f64); 4] = [
        ("empirical_lhs", "#1f77b4", |r| r.empirical_lhs),
        ("empirical_M", "#d62728", |r| r.empirical_m),
        ("pred_total_lemma", "#2ca02c", |r| r.predicted.total),
        ("pred_total_thm", "#9467bd", |r| r.predicted.total_theorem),
    ];
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, _, f)| reports.iter().map(move |r| (r.big_k, f(r).abs())))
        .filter(|p| p.1 > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    let span = |v: &mut dyn Iterator<Item = f64>| {
        let (lo, hi) = v.fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
        if lo.is_finite() && hi > lo { (lo, hi) } else { (lo.min(0.0) - 1.0, hi.max(0.0) + 1.0) }
    };
    let (x0, x1) = span(&mut pts.iter().map(|p| p.0));
    let (y0, y1) = span(&mut pts.iter().map(|p| p.1));
    let px = |x: f64| PAD + (x - x0) / (x1 - x0) * (W - 2.0 * PAD);
    let py = |y: f64| H - PAD - (y - y0) / (y1 - y0) * (H - 2.0 * PAD);
    let mut s = format!("<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{W}\" height=\"{H}\">\n");
    let _ = writeln!(s, "<rect x=\"{PAD}\" y=\"{PAD}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"black\"/>", W - 2.0 * PAD, H - 2.0 * PAD);
    let _ = writeln!(s, "<text x=\"{}\" y=\"{}\">log K</text>", W / 2.0, H - 10.0);
    let _ = writeln!(s, "<text x=\"5\" y=\"{}\">log |value|</text>", PAD - 10.0);
    for (i, (name, colour, f)) in series.iter().enumerate() {
        let coords: Vec<String> = reports
            .iter()
            .map(|r| (r.big_k, f(r).abs()))
            .filter(|p| p.1 > 0.0)
            .map(|(x, y)| format!("{:.2},{:.2}", px(x.ln()), py(y.ln())))
            .collect();
        let _ = writeln!(s, "<polyline fill=\"none\" stroke=\"{colour}\" points=\"{}\"><title>{name}</title></polyline>", coords.join(" "));
        let _ = writeln!(s, "<text x=\"{}\" y=\"{}\" fill=\"{colour}\">{name}</text>", W - PAD - 140.0, PAD + 15.0 * (i as f64 + 1.0));
    }
    s.push_str("</svg>\n");
    s
}

fn write(path: &Path, body: &str) -> Result<PathBuf> {
    std::fs::write(path, body).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    Ok(path.to_path_buf())
}

/// Write each requested format to its path; returns the files written.
pub fn emit_report(reports: &[VarianceReport], paths: &OutputPaths) -> Result<Vec<PathBuf>> {
    if reports.is_empty() {
        return Err(Error::Config("no reports to emit".into()));
    }
    let mut out = Vec::new();
    if let Some(p) = &paths.csv {
        out.push(write(p, &to_csv(reports))?);
    }
    if let Some(p) = &paths.json {
        out.push(write(p, &to_json(reports)?)?);
    }
    if let Some(p) = &paths.svg {
        out.push(write(p, &to_svg(reports))?);
    }
    Ok(out)
}

/// Invariant checks that make a run fail: finite fields, exact decomposition.
pub fn check_reports(reports: &[VarianceReport], tol: &Tolerances) -> Result<()> {
    for r in reports {
        let scale = r.empirical_lhs.abs().max(1.0);
        if r.decomposition_residual.abs() > tol.decomposition * scale {
            return Err(Error::Config(format!(
                "K = {}: decomposition residual {:e} exceeds {:e}",
                r.big_k, r.decomposition_residual, tol.decomposition
            )));
        }
        for (name, v) in [
            ("empirical_lhs", r.empirical_lhs),
            ("empirical_M", r.empirical_m),
            ("predicted total", r.predicted.total),
            ("predicted theorem total", r.predicted.total_theorem),
        ] {
            check_finite(&format!("K = {}: {name}", r.big_k), v)?;
        }
    }
    Ok(())
}
