//! Structured verdicts shared by every numerical probe.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Process exit code used by the command line front end.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Pass => 0,
            Verdict::Fail => 1,
            Verdict::Inconclusive => 2,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

/// One statistic value at refinement step `n`; `scale` is the abscissa the
/// growth fit uses (resolution, radius or battery size).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub n: usize,
    pub scale: f64,
    pub value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GrowthModel {
    Constant,
    Log,
    Power,
}

/// Least-squares growth fit of a trace.
///
/// * `Constant`: `s = c`, `rate = 0`.
/// * `Log`: `s = c + a·ln x`, `rate = a`.
/// * `Power`: `ln s = ln c + b·ln x`, `rate = b`.
///
/// `significance` is `rate / stderr(rate)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthFit {
    pub model: GrowthModel,
    pub rate: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub significance: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeReport {
    pub probe: String,
    pub verdict: Verdict,
    pub trace: Vec<TracePoint>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fit: Option<GrowthFit>,
    #[serde(default)]
    pub witnesses: Vec<String>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub diagnostics: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    pub note: String,
}

impl ProbeReport {
    pub fn new(probe: &str, verdict: Verdict) -> Self {
        ProbeReport {
            probe: probe.to_string(),
            verdict,
            trace: vec![],
            fit: None,
            witnesses: vec![],
            tolerances: BTreeMap::new(),
            diagnostics: BTreeMap::new(),
            seed: None,
            note: String::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.verdict == Verdict::Pass
    }

    pub(crate) fn tolerance(mut self, key: &str, value: f64) -> Self {
        self.tolerances.insert(key.to_string(), value);
        self
    }

    pub(crate) fn diagnostic(mut self, key: &str, value: f64) -> Self {
        self.diagnostics.insert(key.to_string(), value);
        self
    }

    pub(crate) fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }
}

/// Ordinary least squares `y = c + a·x`; returns `(a, c, stderr(a), rss)`.
pub(crate) fn ols(x: &[f64], y: &[f64]) -> (f64, f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let rss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let dof = (x.len() as f64 - 2.0).max(1.0);
    let stderr = if sxx > 0.0 { (rss / dof / sxx).sqrt() } else { f64::INFINITY };
    (slope, intercept, stderr, rss)
}

fn significance(rate: f64, stderr: f64) -> f64 {
    if stderr > 0.0 {
        rate / stderr
    } else if rate > 0.0 {
        f64::INFINITY
    } else {
        0.0
    }
}

/// Fits the log and power models to a trace with positive scales.
/// Residuals of both are measured on the original `s` scale so they can be
/// compared.
pub fn fit_growth(trace: &[TracePoint]) -> Vec<GrowthFit> {
    let lx: Vec<f64> = trace.iter().map(|p| p.scale.ln()).collect();
    let s: Vec<f64> = trace.iter().map(|p| p.value).collect();
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    let const_rss: f64 = s.iter().map(|v| (v - mean).powi(2)).sum();
    let mut fits = vec![GrowthFit {
        model: GrowthModel::Constant,
        rate: 0.0,
        intercept: mean,
        stderr: 0.0,
        significance: 0.0,
        residual: const_rss,
    }];
    let (a, c, se, rss) = ols(&lx, &s);
    fits.push(GrowthFit {
        model: GrowthModel::Log,
        rate: a,
        intercept: c,
        stderr: se,
        significance: significance(a, se),
        residual: rss,
    });
    if s.iter().all(|v| *v > 0.0) {
        let ls: Vec<f64> = s.iter().map(|v| v.ln()).collect();
        let (b, lc, se, _) = ols(&lx, &ls);
        let rss: f64 = lx.iter().zip(&s).map(|(x, v)| (v - (lc + b * x).exp()).powi(2)).sum();
        fits.push(GrowthFit {
            model: GrowthModel::Power,
            rate: b,
            intercept: lc.exp(),
            stderr: se,
            significance: significance(b, se),
            residual: rss,
        });
    }
    fits
}

/// Decision rule for growth traces.
///
/// * fewer than four points: inconclusive;
/// * relative spread over the second half of the trace at most
///   `flat_tol`: pass with the constant model;
/// * otherwise the non-constant model with the smaller residual decides:
///   fail if its rate is positive with significance above `sigma`,
///   inconclusive otherwise.
pub fn growth_verdict(trace: &[TracePoint], flat_tol: f64, sigma: f64) -> (Verdict, Option<GrowthFit>) {
    if trace.len() < 4 || trace.iter().any(|p| !p.value.is_finite()) {
        let verdict = if trace.iter().any(|p| !p.value.is_finite()) { Verdict::Fail } else { Verdict::Inconclusive };
        return (verdict, None);
    }
    let fits = fit_growth(trace);
    let tail = &trace[trace.len() / 2..];
    let lo = tail.iter().map(|p| p.value).fold(f64::INFINITY, f64::min);
    let hi = tail.iter().map(|p| p.value).fold(f64::NEG_INFINITY, f64::max);
    let scale = tail.iter().map(|p| p.value.abs()).fold(0.0, f64::max).max(f64::MIN_POSITIVE);
    if (hi - lo) / scale <= flat_tol {
        return (Verdict::Pass, Some(fits[0]));
    }
    let best = fits[1..]
        .iter()
        .min_by(|a, b| a.residual.total_cmp(&b.residual))
        .copied()
        .expect("log fit always present");
    if best.rate > 0.0 && best.significance > sigma {
        (Verdict::Fail, Some(best))
    } else {
        (Verdict::Inconclusive, Some(best))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trace(f: impl Fn(f64) -> f64) -> Vec<TracePoint> {
        (1..=12)
            .map(|n| {
                let x = 2f64.powi(n as i32 - 1);
                TracePoint { n, scale: x, value: f(x) }
            })
            .collect()
    }

    #[test]
    fn constant_trace_passes() {
        let (v, fit) = growth_verdict(&trace(|_| 1.0), 0.05, 3.0);
        assert_eq!(v, Verdict::Pass);
        assert_eq!(fit.unwrap().model, GrowthModel::Constant);
    }

    #[test]
    fn log_trace_fails_with_log_model() {
        let (v, fit) = growth_verdict(&trace(|x| 0.5 + x.ln() / std::f64::consts::PI), 0.05, 3.0);
        assert_eq!(v, Verdict::Fail);
        let fit = fit.unwrap();
        assert_eq!(fit.model, GrowthModel::Log);
        assert!((fit.rate - 1.0 / std::f64::consts::PI).abs() < 1e-9);
    }

    #[test]
    fn linear_trace_fits_power_one() {
        let (v, fit) = growth_verdict(&trace(|x| 3.0 * x), 0.05, 3.0);
        assert_eq!(v, Verdict::Fail);
        let fit = fit.unwrap();
        assert_eq!(fit.model, GrowthModel::Power);
        assert!((fit.rate - 1.0).abs() < 1e-9);
    }

    #[test]
    fn short_trace_is_inconclusive() {
        let t = trace(|x| x)[..3].to_vec();
        assert_eq!(growth_verdict(&t, 0.05, 3.0).0, Verdict::Inconclusive);
    }

    #[test]
    fn ols_recovers_line() {
        let x = [0.0, 1.0, 2.0, 3.0];
        let y = [1.0, 3.0, 5.0, 7.0];
        let (a, c, se, rss) = ols(&x, &y);
        assert!((a - 2.0).abs() < 1e-12 && (c - 1.0).abs() < 1e-12);
        assert!(se < 1e-12 && rss < 1e-20);
    }
}
