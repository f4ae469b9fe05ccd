//! Means, Fourier–Bohr coefficients and Eberlein decompositions.
//!
//! Coefficients are read off the dual measure: `a_χ(ϑ) = ν({χ})`. Van Hove
//! averaging of `χ̄·(ϑ*f)` is a second, independent route kept for
//! verification; it converges like `1/r_n`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::{CompactFunction, K2Function};
use crate::group::{unit, GroupSpec, Point, VanHoveSequence};
use crate::measure::{pairing, ConcreteMeasure};
use crate::report::{ProbeReport, TracePoint, Verdict};
use crate::semimeasure::SemiMeasure;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Frequency tolerance for matching a character against dual atoms.
pub const FREQUENCY_MATCH_TOL: f64 = 1e-9;

/// Averages `m_n = (1/|A_n|) ∫_{A_n} f` for `n = 1, …, n_max`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanTrace {
    pub value: Complex64,
    pub trace: Vec<Complex64>,
    pub radii: Vec<f64>,
    /// False when the last increment `|m_n − m_{n−1}|` is larger than every
    /// earlier one.
    pub converged: bool,
}

pub fn van_hove_mean(f: &CompactFunction, seq: &VanHoveSequence, n_max: usize) -> Result<MeanTrace> {
    if n_max == 0 || n_max > seq.len() {
        return Err(Error::WindowTooSmall(format!(
            "mean requested up to A_{n_max} but the sequence has {} sets",
            seq.len()
        )));
    }
    let trace = (1..=n_max).map(|n| seq.average(f, n, 0)).collect::<Result<Vec<_>>>()?;
    let radii = (1..=n_max).map(|n| seq.radius(n).unwrap_or(0.0)).collect();
    let incs: Vec<f64> = trace.windows(2).map(|w| (w[1] - w[0]).norm()).collect();
    let converged = match incs.split_last() {
        None => true,
        Some((last, rest)) => *last <= 1e-12 || rest.is_empty() || rest.iter().any(|v| v >= last),
    };
    Ok(MeanTrace { value: *trace.last().unwrap(), trace, radii, converged })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FBEntry {
    pub chi: Point,
    pub coef: Complex64,
}

/// `Σ a_χ(ϑ) δ_χ` together with the mass of the continuous dual part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FBSeries {
    pub entries: Vec<FBEntry>,
    pub residual_bound: f64,
}

/// `a_χ(ϑ) = ϑ̂({χ})`: the pp weight of the dual measure at `χ`.
pub fn fb_coefficient(sm: &SemiMeasure, chi: &Point) -> Result<Complex64> {
    let nu = sm.dual_measure();
    let chi = nu.group().normalize_point(chi)?;
    if nu.group().is_finite() {
        return nu.finite_mass_at(&chi);
    }
    let pp = nu.lebesgue_parts().pp;
    Ok(pp
        .atoms()
        .iter()
        .filter(|a| a.point.close_to(&chi, FREQUENCY_MATCH_TOL))
        .map(|a| a.weight)
        .sum())
}

pub fn fb_series(sm: &SemiMeasure) -> FBSeries {
    let parts = sm.dual_measure().lebesgue_parts();
    FBSeries {
        entries: parts.pp.atoms().iter().map(|a| FBEntry { chi: a.point.clone(), coef: a.weight }).collect(),
        residual_bound: parts.ac.total_mass() + parts.sc.total_mass(),
    }
}

/// Both routes to `a_χ(ϑ*f)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FbAveraging {
    /// Van Hove average of `χ̄·(ϑ*f)` over the largest set.
    pub averaged: Complex64,
    /// `a_χ(ϑ)·f̂(χ)`.
    pub target: Complex64,
    pub gap: f64,
    /// `|average_n − target|` against the radius `r_n`.
    pub trace: Vec<TracePoint>,
    /// Largest deviation of the final average under three shifts of the
    /// averaging set.
    pub shift_spread: f64,
    pub converged: bool,
}

/// Averages `χ̄·F` for a sampled function `F` on the window and compares
/// with `target`.
pub fn averaged_coefficient(
    values: &CompactFunction,
    chi: &Point,
    target: Complex64,
    seq: &VanHoveSequence,
    n_max: usize,
) -> Result<FbAveraging> {
    let g = values.group().clone();
    seq.group().same_as(&g)?;
    let dual = g.dual();
    let chi = dual.normalize_point(chi)?;
    let modulated = match &g {
        GroupSpec::Finite { .. } => {
            let vals = values
                .values()
                .iter()
                .enumerate()
                .map(|(i, v)| v * pairing(&g, &chi, &g.point_at(i)).conj())
                .collect();
            CompactFunction::from_finite_values(&g, vals)?
        }
        GroupSpec::RealLine { step, .. } => {
            let xi = chi.real().unwrap();
            let vals = values.nodes().map(|(m, v)| v * unit(-xi * m as f64 * step)).collect();
            CompactFunction::from_samples(&g, values.start(), vals)?
        }
    };
    let mean = van_hove_mean(&modulated, seq, n_max)?;
    let trace = mean
        .trace
        .iter()
        .zip(&mean.radii)
        .enumerate()
        .map(|(i, (v, r))| TracePoint { n: i + 1, scale: *r, value: (v - target).norm() })
        .collect();
    let shift_spread = match &g {
        GroupSpec::Finite { .. } => 0.0,
        GroupSpec::RealLine { .. } => {
            let r = (mean.radii[n_max - 1] / g.step()).round() as i64;
            let room = g.max_node() - r;
            [room / 3, -room / 2, room]
                .iter()
                .filter(|s| **s != 0)
                .map(|&s| seq.average(&modulated, n_max, s).map(|v| (v - mean.value).norm()))
                .collect::<Result<Vec<f64>>>()?
                .into_iter()
                .fold(0.0, f64::max)
        }
    };
    Ok(FbAveraging {
        averaged: mean.value,
        target,
        gap: (mean.value - target).norm(),
        trace,
        shift_spread,
        converged: mean.converged,
    })
}

/// `a_χ(ϑ*f)` by van Hove averaging, checked against `a_χ(ϑ)·f̂(χ)`.
pub fn fb_via_averaging(
    sm: &SemiMeasure,
    f: &K2Function,
    chi: &Point,
    seq: &VanHoveSequence,
    n_max: usize,
) -> Result<FbAveraging> {
    let conv = sm.convolve(f)?;
    let target = fb_coefficient(sm, chi)? * f.fourier(chi)?;
    averaged_coefficient(&conv, chi, target, seq, n_max)
}

/// `ϑ = ϑ_s + ϑ_0` with `ϑ̂_s = (ϑ̂)_pp`.
#[derive(Clone, Debug, PartialEq)]
pub struct EberleinSplit {
    pub strong: SemiMeasure,
    pub null: SemiMeasure,
}

/// `ϑ = ϑ_s + ϑ_0a + ϑ_0s` with `ϑ̂_s = (ϑ̂)_pp`, `ϑ̂_0a = (ϑ̂)_ac`,
/// `ϑ̂_0s = (ϑ̂)_sc`, and `ϑ_0 = ϑ_0a + ϑ_0s`.
#[derive(Clone, Debug, PartialEq)]
pub struct EberleinParts {
    pub strong: SemiMeasure,
    pub null: SemiMeasure,
    pub null_ac: SemiMeasure,
    pub null_sc: SemiMeasure,
}

impl EberleinParts {
    /// Componentwise gap between `strong + null_ac + null_sc` and the input.
    pub fn reconstruction_gap(&self, sm: &SemiMeasure) -> Result<f64> {
        let sum = self
            .strong
            .dual_measure()
            .add(self.null_ac.dual_measure())?
            .add(self.null_sc.dual_measure())?;
        sum.component_gap(sm.dual_measure())
    }
}

pub fn eberlein(sm: &SemiMeasure) -> Result<EberleinSplit> {
    let parts = generalized_eberlein(sm)?;
    Ok(EberleinSplit { strong: parts.strong, null: parts.null })
}

pub fn generalized_eberlein(sm: &SemiMeasure) -> Result<EberleinParts> {
    let parts = sm.dual_measure().lebesgue_parts();
    let null = parts.ac.add(&parts.sc)?;
    Ok(EberleinParts {
        strong: SemiMeasure::from_dual(parts.pp)?,
        null: SemiMeasure::from_dual(null)?,
        null_ac: SemiMeasure::from_dual(parts.ac)?,
        null_sc: SemiMeasure::from_dual(parts.sc)?,
    })
}

/// Null weak almost periodicity: pass iff every Fourier–Bohr coefficient
/// vanishes, i.e. the dual measure has no pp part.
pub fn wap0_test(sm: &SemiMeasure) -> ProbeReport {
    let series = fb_series(sm);
    let mut report = ProbeReport::new(
        "wap0",
        if series.entries.is_empty() { Verdict::Pass } else { Verdict::Fail },
    )
    .tolerance("frequency_match", FREQUENCY_MATCH_TOL)
    .diagnostic("atoms", series.entries.len() as f64);
    report.witnesses = series.entries.iter().take(32).map(|e| format!("a_{} = {}", e.chi, e.coef)).collect();
    let note = if report.passed() {
        "no Fourier–Bohr coefficient is nonzero"
    } else {
        "nonzero Fourier–Bohr coefficients found"
    };
    report.with_note(note)
}

/// Bohr polynomial `Σ_χ a_χ(f)·χ(t)` on the window, with `a_χ(f)` the mean
/// of `χ̄·f` over the largest set of `seq`.
pub fn sap_projection(f: &CompactFunction, freqs: &[Point], seq: &VanHoveSequence) -> Result<CompactFunction> {
    let g = f.group().clone();
    let mut out = vec![ZERO; g.sample_count()];
    for chi in freqs {
        let a = averaged_coefficient(f, chi, ZERO, seq, seq.len())?.averaged;
        for (i, slot) in out.iter_mut().enumerate() {
            *slot += a * pairing(&g, chi, &g.point_at(i));
        }
    }
    CompactFunction::from_window(&g, out)
}

/// `ϑ̂` restricted to its atoms, as a measure: the strong part's dual.
pub fn strong_dual(sm: &SemiMeasure) -> ConcreteMeasure {
    sm.dual_measure().lebesgue_parts().pp
}
