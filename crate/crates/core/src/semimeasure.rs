//! Fourier transformable semi-measures, stored through their transform.
//!
//! A [`SemiMeasure`] on `G` is the functional `ϑ(f) = ∫ f̌ dν` for a weakly
//! admissible measure `ν` on `Ĝ`; `ν` is its Fourier transform and the map
//! `ν ↦ ϑ` is a bijection onto the Fourier transformable semi-measures.
//!
//! On the real line the primal window is sampled with step `h` and the dual
//! window `[-1/(2h), 1/(2h)]` is one full period of the sampled characters,
//! so every pairing below is a finite sum and exact for grid data.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dft::{self, Sign};
use crate::error::{Error, Result};
use crate::funcspace::{k2_from_pair, standard_battery, CompactFunction, K2Function};
use crate::group::{unit, GroupSpec, Point};
use crate::measure::{weak_admissibility_probe, ConcreteMeasure};
use crate::report::{ProbeReport, TracePoint, Verdict};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Default seed of every randomized battery.
pub const DEFAULT_SEED: u64 = 0x5eed_eb1e;

/// Number of random functions in the direct positive-definiteness battery.
pub const POSITIVITY_BATTERY: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    ConstructedFromDual,
    LiftedFromMeasure { original: ConcreteMeasure },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SemiMeasureJson", into = "SemiMeasureJson")]
pub struct SemiMeasure {
    group: GroupSpec,
    dual_measure: ConcreteMeasure,
    provenance: Provenance,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SemiMeasureJson {
    pub group: GroupSpec,
    pub dual_measure: ConcreteMeasure,
    #[serde(default = "constructed")]
    pub provenance: Provenance,
}

fn constructed() -> Provenance {
    Provenance::ConstructedFromDual
}

impl TryFrom<SemiMeasureJson> for SemiMeasure {
    type Error = Error;

    fn try_from(raw: SemiMeasureJson) -> Result<Self> {
        raw.group.dual().same_as(raw.dual_measure.group())?;
        let mut sm = SemiMeasure::from_dual(raw.dual_measure)?;
        sm.provenance = raw.provenance;
        Ok(sm)
    }
}

impl From<SemiMeasure> for SemiMeasureJson {
    fn from(sm: SemiMeasure) -> Self {
        SemiMeasureJson { group: sm.group, dual_measure: sm.dual_measure, provenance: sm.provenance }
    }
}

impl SemiMeasure {
    /// `ϑ = θ_ν`. On the real line `ν` must pass the weak admissibility
    /// probe on the standard battery.
    pub fn from_dual(nu: ConcreteMeasure) -> Result<Self> {
        let group = nu.group().dual();
        if !group.is_finite() {
            let report = weak_admissibility_probe(&nu, &standard_battery(&group)?)?;
            if report.verdict != Verdict::Pass {
                return Err(Error::NotWeaklyAdmissible { witness: report.witnesses.join("; ") });
            }
        }
        Ok(SemiMeasure { group, dual_measure: nu, provenance: Provenance::ConstructedFromDual })
    }

    /// Lifts a measure on a finite group through its exact transform.
    pub fn lift(mu: &ConcreteMeasure) -> Result<Self> {
        let nu = mu.fourier_transform()?;
        let mut sm = Self::from_dual(nu)?;
        sm.provenance = Provenance::LiftedFromMeasure { original: mu.clone() };
        Ok(sm)
    }

    /// Lifts a measure whose transform is known in closed form. The pair is
    /// checked on the standard battery: `μ(f)` and `∫ f̌ dν` must agree to
    /// `1e-6` relative.
    pub fn from_measure_with_dual(mu: &ConcreteMeasure, nu: ConcreteMeasure) -> Result<Self> {
        let mut sm = Self::from_dual(nu)?;
        sm.group.same_as(mu.group())?;
        for f in standard_battery(&sm.group)? {
            let a = mu.pair(f.realized())?;
            let b = sm.evaluate(&f)?;
            if (a - b).norm() > 1e-6 * (1.0 + a.norm()) {
                return Err(Error::InvalidArgument(format!(
                    "measure and dual disagree on the standard battery: {a} vs {b}"
                )));
            }
        }
        sm.provenance = Provenance::LiftedFromMeasure { original: mu.clone() };
        Ok(sm)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn dual_measure(&self) -> &ConcreteMeasure {
        &self.dual_measure
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// The measure this semi-measure was lifted from, if any.
    pub fn original(&self) -> Option<&ConcreteMeasure> {
        match &self.provenance {
            Provenance::LiftedFromMeasure { original } => Some(original),
            Provenance::ConstructedFromDual => None,
        }
    }

    fn rebuilt(&self, nu: ConcreteMeasure) -> SemiMeasure {
        SemiMeasure { group: self.group.clone(), dual_measure: nu, provenance: Provenance::ConstructedFromDual }
    }

    /// `ϑ(f) = ∫ f̌ dν`.
    pub fn evaluate(&self, f: &K2Function) -> Result<Complex64> {
        self.evaluate_function(f.realized())
    }

    /// `∫ f̌ dν` for any sampled function; `ϑ` only has meaning on `K₂`.
    pub fn evaluate_function(&self, f: &CompactFunction) -> Result<Complex64> {
        self.group.same_as(f.group())?;
        let grid = f.transform_on_dual_grid(true);
        Ok(self.dual_measure.integrate(&grid, |chi| f.fourier_inverse(chi).unwrap_or(ZERO)))
    }

    /// Share of `∫ |f̌| d|ν|` carried by the outer half of the dual window.
    pub fn tail_fraction(&self, f: &K2Function) -> Result<f64> {
        if self.group.is_finite() {
            return Ok(0.0);
        }
        let real = f.realized();
        let grid: Vec<Complex64> =
            real.transform_on_dual_grid(true).iter().map(|v| Complex64::new(v.norm(), 0.0)).collect();
        let tv = self.dual_measure.total_variation();
        let inner_r = 0.5 * tv.group().half_width();
        let total = tv.integrate(&grid, |chi| Complex64::new(real.fourier_inverse(chi).map_or(0.0, |v| v.norm()), 0.0)).re;
        let outer = tv
            .modulate(|p| if p.real().unwrap().abs() > inner_r { Complex64::new(1.0, 0.0) } else { ZERO })
            .integrate(&grid, |chi| Complex64::new(real.fourier_inverse(chi).map_or(0.0, |v| v.norm()), 0.0))
            .re;
        Ok(if total > 0.0 { outer / total } else { 0.0 })
    }

    /// [`SemiMeasure::evaluate`] that refuses results whose integrand still
    /// carries more than `tol` of its mass in the outer half of the dual
    /// window.
    pub fn evaluate_checked(&self, f: &K2Function, tol: f64) -> Result<Complex64> {
        let gap = self.tail_fraction(f)?;
        if gap > tol {
            return Err(Error::EvaluationDidNotConverge { gap });
        }
        self.evaluate(f)
    }

    /// `(ϑ * f)(t) = ∫ χ(t) f̂(χ) dν(χ)` on every grid point of the window.
    pub fn convolve(&self, f: &K2Function) -> Result<CompactFunction> {
        self.convolve_function(f.realized())
    }

    pub fn convolve_function(&self, f: &CompactFunction) -> Result<CompactFunction> {
        self.group.same_as(f.group())?;
        let dual = self.dual_measure.group();
        let fhat = f.transform_on_dual_grid(false);
        let mut v = vec![ZERO; dual.sample_count()];
        if let Some(d) = self.dual_measure.ac_density() {
            let off = if dual.is_finite() { 0 } else { dual.max_node() };
            for (m, w) in d.nodes() {
                let i = (m + off) as usize;
                v[i] = fhat[i] * w * dual.node_weight(m);
            }
        }
        let atoms: Vec<_> = self
            .dual_measure
            .atoms()
            .iter()
            .chain(self.dual_measure.sc_part().iter().flat_map(|s| s.atoms.iter()))
            .collect();
        let mut out = if self.group.is_finite() {
            for a in &atoms {
                v[dual.index_of(a.point.residues().unwrap())] += a.weight * f.fourier(&a.point)?;
            }
            return CompactFunction::from_window(&self.group, dft::to_dual(dual, &v, Sign::Plus));
        } else {
            dft::to_dual(dual, &v, Sign::Plus)
        };
        let n = self.group.max_node();
        let h = self.group.step();
        for a in atoms {
            let xi = a.point.real().unwrap();
            let c = a.weight * f.fourier(&a.point)?;
            if c == ZERO {
                continue;
            }
            // e^{2πiξmh} by recurrence, re-anchored every 1024 nodes
            let step = unit(xi * h);
            let mut phase = ZERO;
            for (i, slot) in out.iter_mut().enumerate() {
                if i % 1024 == 0 {
                    phase = c * unit(xi * (i as i64 - n) as f64 * h);
                }
                *slot += phase;
                phase *= step;
            }
        }
        CompactFunction::from_window(&self.group, out)
    }

    /// `(ϑ * f)(t)` at arbitrary points of the window.
    pub fn convolve_at(&self, f: &K2Function, ts: &[Point]) -> Result<Vec<Complex64>> {
        let real = f.realized();
        let dual = self.dual_measure.group();
        let fhat = real.transform_on_dual_grid(false);
        let mut out = Vec::with_capacity(ts.len());
        for t in ts {
            let t = self.group.normalize_point(t)?;
            let grid: Vec<Complex64> = (0..dual.sample_count())
                .map(|k| fhat[k] * crate::measure::pairing(dual, &dual.point_at(k), &t))
                .collect();
            out.push(self.dual_measure.integrate(&grid, |chi| {
                real.fourier(chi).unwrap_or(ZERO) * crate::measure::pairing(dual, chi, &t)
            }));
        }
        Ok(out)
    }

    /// The defining formula `(ϑ * f)(t) = ϑ(T_t f†)`.
    pub fn convolve_primal(&self, f: &K2Function, t: &Point) -> Result<Complex64> {
        self.evaluate(&f.dagger().translate(t)?)
    }

    /// `T_t ϑ`, i.e. `ν ↦ χ(t)‾·ν`.
    pub fn translate(&self, t: &Point) -> Result<SemiMeasure> {
        let t = self.group.normalize_point(t)?;
        let dual = self.dual_measure.group().clone();
        Ok(self.rebuilt(self.dual_measure.modulate(|chi| crate::measure::pairing(&dual, chi, &t).conj())))
    }

    /// `ϑ̃`, i.e. `ν ↦ ν̄`.
    pub fn tilde(&self) -> SemiMeasure {
        self.rebuilt(self.dual_measure.conj())
    }

    /// `ϑ†`, i.e. `ν ↦ ν†`.
    pub fn dagger(&self) -> SemiMeasure {
        self.rebuilt(self.dual_measure.reflect())
    }

    pub fn add(&self, other: &SemiMeasure) -> Result<SemiMeasure> {
        self.group.same_as(&other.group)?;
        Ok(self.rebuilt(self.dual_measure.add(&other.dual_measure)?))
    }

    pub fn sub(&self, other: &SemiMeasure) -> Result<SemiMeasure> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> SemiMeasure {
        self.rebuilt(self.dual_measure.scale(c))
    }

    /// Negative tolerance of the dual positivity test: `1e-12` on finite
    /// groups, `1e-6` times the largest weight or density value on the real
    /// line.
    pub fn positivity_tolerance(&self) -> f64 {
        if self.group.is_finite() {
            return 1e-12;
        }
        let nu = &self.dual_measure;
        let dens = nu.ac_density().map_or(0.0, |d| d.sup_norm());
        let atoms = nu
            .atoms()
            .iter()
            .chain(nu.sc_part().iter().flat_map(|s| s.atoms.iter()))
            .map(|a| a.weight.norm())
            .fold(0.0, f64::max);
        1e-6 * dens.max(atoms).max(f64::MIN_POSITIVE)
    }

    /// Dual-side violations of positivity, one description per offending
    /// atom or density sample (capped).
    fn dual_negativity(&self, tol: f64) -> Vec<String> {
        let nu = &self.dual_measure;
        let bad = |w: Complex64| w.re < -tol || w.im.abs() > tol;
        let mut out = vec![];
        for a in nu.atoms().iter().chain(nu.sc_part().iter().flat_map(|s| s.atoms.iter())) {
            if bad(a.weight) {
                out.push(format!("dual atom at {} has weight {}", a.point, a.weight));
            }
        }
        if let Some(d) = nu.ac_density() {
            let g = d.group();
            for (m, v) in d.nodes() {
                if bad(v) {
                    let p = if g.is_finite() { g.point_at(m as usize) } else { Point::Real(m as f64 * g.step()) };
                    out.push(format!("dual density at {p} is {v}"));
                }
            }
        }
        out
    }

    /// Bochner test: positive definite iff `ν ≥ 0`. A direct battery checks
    /// `ϑ(f*f̃) ≥ -tol` independently: random functions built from up to four
    /// atoms (finite groups) or modulated bumps (real line), plus every
    /// conjugate character on finite groups of order at most 1024.
    pub fn is_positive_definite(&self, seed: u64) -> Result<ProbeReport> {
        let tol = self.positivity_tolerance();
        let dual_witnesses = self.dual_negativity(tol);
        let mut report = ProbeReport::new(
            "positive_definite",
            if dual_witnesses.is_empty() { Verdict::Pass } else { Verdict::Fail },
        )
        .tolerance("dual_negativity", tol);
        report.seed = Some(seed);
        report.witnesses.extend(dual_witnesses.iter().take(16).cloned());
        let direct_rel = if self.group.is_finite() { 1e-12 } else { 1e-6 };
        report = report.tolerance("direct_relative", direct_rel);

        let battery = self.positivity_battery(seed)?;
        let tv = self.dual_measure.total_variation();
        let mut min_ratio = f64::INFINITY;
        let mut direct_witnesses = vec![];
        for (i, f) in battery.iter().enumerate() {
            let k = k2_from_pair(f, &f.tilde())?;
            let value = self.evaluate(&k)?;
            let grid: Vec<Complex64> =
                f.transform_on_dual_grid(true).iter().map(|v| Complex64::new(v.norm_sqr(), 0.0)).collect();
            let scale = tv.integrate(&grid, |chi| Complex64::new(f.fourier_inverse(chi).map_or(0.0, |v| v.norm_sqr()), 0.0)).re;
            let allowed = direct_rel * scale.max(f64::MIN_POSITIVE);
            if value.re < -allowed || value.im.abs() > allowed.max(1e-12 * scale) {
                direct_witnesses.push(format!("battery[{i}]: ϑ(f*f̃) = {value}"));
            }
            if scale > 0.0 {
                min_ratio = min_ratio.min(value.re / scale);
            }
            report.trace.push(TracePoint { n: i + 1, scale: (i + 1) as f64, value: value.re });
        }
        report = report
            .diagnostic("battery_size", battery.len() as f64)
            .diagnostic("direct_min_ratio", if min_ratio.is_finite() { min_ratio } else { 0.0 })
            .diagnostic("direct_witnesses", direct_witnesses.len() as f64);
        let agrees = direct_witnesses.is_empty() == dual_witnesses.is_empty();
        report.witnesses.extend(direct_witnesses.into_iter().take(16));
        let note = match (report.verdict, agrees) {
            (Verdict::Pass, _) => "dual measure is positive; direct battery found no negative value",
            (_, true) => "dual measure has negative or complex mass; the direct battery exhibits it",
            (_, false) => "dual measure has negative or complex mass; the finite direct battery did not reach it",
        };
        Ok(report.with_note(note))
    }

    fn positivity_battery(&self, seed: u64) -> Result<Vec<CompactFunction>> {
        let g = &self.group;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = vec![];
        match g {
            GroupSpec::Finite { .. } => {
                let size = g.sample_count();
                if size <= 1024 {
                    let dual = g.dual();
                    for k in 0..size {
                        let chi = dual.point_at(k);
                        out.push(CompactFunction::from_finite_fn(g, |x| {
                            crate::measure::pairing(g, &chi, &Point::Residues(x.to_vec())).conj()
                        })?);
                    }
                }
                for _ in 0..POSITIVITY_BATTERY {
                    let mut v = vec![ZERO; size];
                    for _ in 0..rng.gen_range(1..=4) {
                        v[rng.gen_range(0..size)] += Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                    }
                    out.push(CompactFunction::from_finite_values(g, v)?);
                }
            }
            GroupSpec::RealLine { step, .. } => {
                let l = g.half_width();
                let h = *step;
                let l_dual = g.dual().half_width();
                for _ in 0..POSITIVITY_BATTERY {
                    let mut f = CompactFunction::zero(g);
                    for _ in 0..rng.gen_range(1..=4) {
                        let width = rng.gen_range((4.0 * h).min(l / 8.0)..=(l / 8.0).max(4.0 * h));
                        let center = (rng.gen_range(-l / 4.0..=l / 4.0) / h).round() * h;
                        let freq = rng.gen_range(-l_dual..l_dual);
                        let coef = Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                        let b = CompactFunction::bump(g, center, width)?;
                        let nodes: Vec<(i64, Complex64)> = b.nodes().collect();
                        let vals = nodes.iter().map(|(m, v)| v * coef * unit(freq * *m as f64 * h)).collect();
                        let start = nodes.first().map_or(0, |p| p.0);
                        f = f.add(&CompactFunction::from_samples(g, start, vals)?)?;
                    }
                    out.push(f);
                }
            }
        }
        Ok(out)
    }

    /// `ϑ = ϑ₁ − ϑ₂ + i(ϑ₃ − ϑ₄)` with positive definite parts, from the
    /// Jordan decomposition of the real and imaginary parts of `ν`.
    pub fn split_positive_definite(&self) -> Result<[SemiMeasure; 4]> {
        let [a, b, c, d] = self.dual_measure.jordan_hahn();
        Ok([
            SemiMeasure::from_dual(a)?,
            SemiMeasure::from_dual(b)?,
            SemiMeasure::from_dual(c)?,
            SemiMeasure::from_dual(d)?,
        ])
    }
}

/// Recombines `ϑ₁ − ϑ₂ + i(ϑ₃ − ϑ₄)`.
pub fn recombine(parts: &[SemiMeasure; 4]) -> Result<SemiMeasure> {
    let re = parts[0].sub(&parts[1])?;
    let im = parts[2].sub(&parts[3])?;
    re.add(&im.scale(Complex64::new(0.0, 1.0)))
}
