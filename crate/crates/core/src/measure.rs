//! Radon measures with tagged spectral components.
//!
//! A [`ConcreteMeasure`] is a sum of three parts kept apart by construction:
//! point masses (pp), a density sampled on the grid against Haar measure
//! (ac), and an atomic approximant of a singular continuous measure tagged
//! with its refinement level (sc). On finite groups every measure is pure
//! point; a density there is a convenient way to write weights and counts as
//! pp in [`ConcreteMeasure::lebesgue_parts`].

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dft::{self, Sign};
use crate::error::{Error, Result};
use crate::funcspace::{CompactFunction, CompactFunctionJson, K2Function};
use crate::group::{character_eval, GroupSpec, Point};
use crate::report::{ProbeReport, TracePoint, Verdict};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Real atoms closer than this are merged.
pub const ATOM_MERGE_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub point: Point,
    pub weight: Complex64,
}

impl Atom {
    pub fn new(point: Point, weight: Complex64) -> Self {
        Atom { point, weight }
    }
}

/// Atomic approximant of a singular continuous component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScPart {
    pub atoms: Vec<Atom>,
    pub level: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ConcreteMeasureJson", into = "ConcreteMeasureJson")]
pub struct ConcreteMeasure {
    group: GroupSpec,
    atoms: Vec<Atom>,
    ac_density: Option<CompactFunction>,
    sc_part: Option<ScPart>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConcreteMeasureJson {
    pub group: GroupSpec,
    #[serde(default)]
    pub atoms: Vec<Atom>,
    #[serde(default)]
    pub ac_density: Option<CompactFunctionJson>,
    #[serde(default)]
    pub sc_part: Option<ScPart>,
}

impl TryFrom<ConcreteMeasureJson> for ConcreteMeasure {
    type Error = Error;

    fn try_from(raw: ConcreteMeasureJson) -> Result<Self> {
        let density = raw
            .ac_density
            .as_ref()
            .map(|d| CompactFunction::from_json(&raw.group, d))
            .transpose()?;
        ConcreteMeasure::new(&raw.group, raw.atoms, density, raw.sc_part)
    }
}

impl From<ConcreteMeasure> for ConcreteMeasureJson {
    fn from(m: ConcreteMeasure) -> Self {
        ConcreteMeasureJson {
            ac_density: m.ac_density.as_ref().map(|d| d.to_json()),
            group: m.group,
            atoms: m.atoms,
            sc_part: m.sc_part,
        }
    }
}

/// `pp + ac + sc`, each a measure carrying only its own component.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralParts {
    pub pp: ConcreteMeasure,
    pub ac: ConcreteMeasure,
    pub sc: ConcreteMeasure,
}

/// A compact set of the group: a closed interval on the real line, a finite
/// list of elements on a finite group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CompactSet {
    Interval([f64; 2]),
    Points(Vec<Vec<i64>>),
}

fn canonical_atoms(group: &GroupSpec, atoms: Vec<Atom>) -> Result<Vec<Atom>> {
    let mut atoms = atoms
        .into_iter()
        .map(|a| Ok(Atom { point: group.normalize_point(&a.point)?, weight: a.weight }))
        .collect::<Result<Vec<_>>>()?;
    atoms.sort_by(|a, b| a.point.cmp_lex(&b.point).then(a.weight.arg().total_cmp(&b.weight.arg())));
    let mut merged: Vec<Atom> = Vec::with_capacity(atoms.len());
    for a in atoms {
        match merged.last_mut() {
            Some(last) if last.point.close_to(&a.point, ATOM_MERGE_TOL) => last.weight += a.weight,
            _ => merged.push(a),
        }
    }
    merged.retain(|a| a.weight != ZERO);
    Ok(merged)
}

impl ConcreteMeasure {
    pub fn new(
        group: &GroupSpec,
        atoms: Vec<Atom>,
        ac_density: Option<CompactFunction>,
        sc_part: Option<ScPart>,
    ) -> Result<Self> {
        if let Some(d) = &ac_density {
            group.same_as(d.group())?;
        }
        let sc_part = match sc_part {
            Some(sc) => {
                if group.is_finite() {
                    return Err(Error::Unsupported("finite groups carry no singular continuous part".into()));
                }
                Some(ScPart { atoms: canonical_atoms(group, sc.atoms)?, level: sc.level })
            }
            None => None,
        };
        let ac_density = ac_density.filter(|d| !d.values().is_empty());
        Ok(ConcreteMeasure { group: group.clone(), atoms: canonical_atoms(group, atoms)?, ac_density, sc_part })
    }

    pub fn zero(group: &GroupSpec) -> Self {
        ConcreteMeasure { group: group.clone(), atoms: vec![], ac_density: None, sc_part: None }
    }

    pub fn from_atoms(group: &GroupSpec, atoms: Vec<(Point, Complex64)>) -> Result<Self> {
        Self::new(group, atoms.into_iter().map(|(p, w)| Atom::new(p, w)).collect(), None, None)
    }

    pub fn dirac(group: &GroupSpec, at: Point) -> Result<Self> {
        Self::from_atoms(group, vec![(at, Complex64::new(1.0, 0.0))])
    }

    pub fn from_density(density: CompactFunction) -> Result<Self> {
        let group = density.group().clone();
        Self::new(&group, vec![], Some(density), None)
    }

    /// Haar measure: counting measure on a finite group, Lebesgue measure
    /// on the real-line window.
    pub fn haar(group: &GroupSpec) -> Result<Self> {
        let ones = vec![Complex64::new(1.0, 0.0); group.sample_count()];
        Self::from_density(CompactFunction::from_window(group, ones)?)
    }

    /// Weights per element of a finite group (row-major).
    pub fn from_finite_weights(group: &GroupSpec, weights: &[Complex64]) -> Result<Self> {
        if !group.is_finite() || weights.len() != group.sample_count() {
            return Err(Error::InvalidArgument("one weight per element of a finite group expected".into()));
        }
        let atoms = weights
            .iter()
            .enumerate()
            .filter(|(_, w)| **w != ZERO)
            .map(|(i, w)| Atom::new(group.point_at(i), *w))
            .collect();
        Self::new(group, atoms, None, None)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn ac_density(&self) -> Option<&CompactFunction> {
        self.ac_density.as_ref()
    }

    pub fn sc_part(&self) -> Option<&ScPart> {
        self.sc_part.as_ref()
    }

    pub fn is_zero(&self) -> bool {
        self.atoms.is_empty()
            && self.ac_density.as_ref().is_none_or(|d| d.values().iter().all(|v| *v == ZERO))
            && self.sc_part.as_ref().is_none_or(|s| s.atoms.is_empty())
    }

    /// Total weight on every element of a finite group, all components
    /// combined.
    pub fn finite_weights(&self) -> Result<Vec<Complex64>> {
        if !self.group.is_finite() {
            return Err(Error::Unsupported("finite_weights needs a finite group".into()));
        }
        let mut w = match &self.ac_density {
            Some(d) => d.values().to_vec(),
            None => vec![ZERO; self.group.sample_count()],
        };
        for a in &self.atoms {
            w[self.group.index_of(a.point.residues().unwrap())] += a.weight;
        }
        Ok(w)
    }

    fn all_atoms(&self) -> impl Iterator<Item = &Atom> {
        self.atoms.iter().chain(self.sc_part.iter().flat_map(|s| s.atoms.iter()))
    }

    /// `∫ F dμ` where `grid` holds `F` at every sample index of the group
    /// and `at` evaluates `F` at atom positions.
    pub(crate) fn integrate(&self, grid: &[Complex64], at: impl Fn(&Point) -> Complex64) -> Complex64 {
        let mut acc = ZERO;
        if let Some(d) = &self.ac_density {
            let off = if self.group.is_finite() { 0 } else { self.group.max_node() };
            for (m, v) in d.nodes() {
                acc += v * grid[(m + off) as usize] * self.group.node_weight(m);
            }
        }
        for a in self.all_atoms() {
            acc += a.weight * at(&a.point);
        }
        acc
    }

    /// `μ(f) = Σ w·f(x) + ∫ density·f dθ_G`. Off-grid atoms see `f` through
    /// linear interpolation.
    pub fn pair(&self, f: &CompactFunction) -> Result<Complex64> {
        self.group.same_as(f.group())?;
        let grid = f.window_values();
        Ok(self.integrate(&grid, |p| f.value_at(p).unwrap_or(ZERO)))
    }

    pub fn pair_k2(&self, f: &K2Function) -> Result<Complex64> {
        self.pair(f.realized())
    }

    fn map_parts(
        &self,
        atom: impl Fn(&Atom) -> Atom,
        density: impl Fn(&CompactFunction) -> CompactFunction,
    ) -> ConcreteMeasure {
        let sc = self.sc_part.as_ref().map(|s| ScPart { atoms: s.atoms.iter().map(&atom).collect(), level: s.level });
        ConcreteMeasure::new(
            &self.group,
            self.atoms.iter().map(&atom).collect(),
            self.ac_density.as_ref().map(density),
            sc,
        )
        .expect("component maps keep atoms inside the group")
    }

    /// `|μ|`.
    pub fn total_variation(&self) -> ConcreteMeasure {
        self.map_parts(
            |a| Atom::new(a.point.clone(), Complex64::new(a.weight.norm(), 0.0)),
            |d| d.map(|v| Complex64::new(v.norm(), 0.0)),
        )
    }

    /// `|μ|(G)` inside the window.
    pub fn total_mass(&self) -> f64 {
        let dens: f64 = self
            .ac_density
            .as_ref()
            .map_or(0.0, |d| d.nodes().map(|(m, v)| v.norm() * self.group.node_weight(m)).sum());
        dens + self.all_atoms().map(|a| a.weight.norm()).sum::<f64>()
    }

    pub fn scale(&self, c: Complex64) -> ConcreteMeasure {
        self.map_parts(|a| Atom::new(a.point.clone(), a.weight * c), |d| d.scale(c))
    }

    /// `μ̄`.
    pub fn conj(&self) -> ConcreteMeasure {
        self.map_parts(|a| Atom::new(a.point.clone(), a.weight.conj()), |d| d.map(|v| v.conj()))
    }

    /// `μ†(E) = μ(-E)`.
    pub fn reflect(&self) -> ConcreteMeasure {
        self.map_parts(|a| Atom::new(a.point.negated(&self.group), a.weight), |d| d.dagger())
    }

    /// Multiplies every component pointwise by `φ(point)`.
    pub fn modulate(&self, phi: impl Fn(&Point) -> Complex64) -> ConcreteMeasure {
        self.map_parts(
            |a| Atom::new(a.point.clone(), a.weight * phi(&a.point)),
            |d| {
                let vals = d
                    .nodes()
                    .map(|(m, v)| {
                        let p = match self.group {
                            GroupSpec::Finite { .. } => self.group.point_at(m as usize),
                            GroupSpec::RealLine { step, .. } => Point::Real(m as f64 * step),
                        };
                        v * phi(&p)
                    })
                    .collect();
                CompactFunction::from_samples(d.group(), d.start(), vals).expect("same support")
            },
        )
    }

    /// `T_t μ`; on the real line atoms move freely but a density can only be
    /// shifted by grid multiples.
    pub fn translate(&self, t: &Point) -> Result<ConcreteMeasure> {
        let shift = |p: &Point| -> Result<Point> {
            match (p, t) {
                (Point::Residues(a), Point::Residues(b)) => {
                    self.group.normalize_point(&Point::Residues(a.iter().zip(b).map(|(x, y)| x + y).collect()))
                }
                (Point::Real(a), Point::Real(b)) => self.group.normalize_point(&Point::Real(a + b)),
                _ => Err(Error::GroupMismatch(format!("{t} is not a point of {}", self.group))),
            }
        };
        let move_atoms = |atoms: &[Atom]| -> Result<Vec<Atom>> {
            atoms.iter().map(|a| Ok(Atom::new(shift(&a.point)?, a.weight))).collect()
        };
        let density = self.ac_density.as_ref().map(|d| d.translate(t)).transpose()?;
        let sc = match &self.sc_part {
            Some(s) => Some(ScPart { atoms: move_atoms(&s.atoms)?, level: s.level }),
            None => None,
        };
        ConcreteMeasure::new(&self.group, move_atoms(&self.atoms)?, density, sc)
    }

    pub fn add(&self, other: &ConcreteMeasure) -> Result<ConcreteMeasure> {
        self.group.same_as(&other.group)?;
        let mut atoms = self.atoms.clone();
        atoms.extend(other.atoms.iter().cloned());
        let density = match (&self.ac_density, &other.ac_density) {
            (Some(a), Some(b)) => Some(a.add(b)?),
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        };
        let sc = match (&self.sc_part, &other.sc_part) {
            (Some(a), Some(b)) => {
                let mut atoms = a.atoms.clone();
                atoms.extend(b.atoms.iter().cloned());
                Some(ScPart { atoms, level: a.level.max(b.level) })
            }
            (Some(a), None) => Some(a.clone()),
            (None, Some(b)) => Some(b.clone()),
            (None, None) => None,
        };
        ConcreteMeasure::new(&self.group, atoms, density, sc)
    }

    pub fn sub(&self, other: &ConcreteMeasure) -> Result<ConcreteMeasure> {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    /// `μ = ρ₁ − ρ₂ + i(ρ₃ − ρ₄)` with `ρ₁, ρ₂` the positive and negative parts
    /// of `Re μ` and `ρ₃, ρ₄` those of `Im μ`.
    pub fn jordan_hahn(&self) -> [ConcreteMeasure; 4] {
        let part = |f: fn(Complex64) -> f64| {
            self.map_parts(|a| Atom::new(a.point.clone(), Complex64::new(f(a.weight), 0.0)), |d| {
                d.map(|v| Complex64::new(f(v), 0.0))
            })
        };
        [
            part(|w| w.re.max(0.0)),
            part(|w| (-w.re).max(0.0)),
            part(|w| w.im.max(0.0)),
            part(|w| (-w.im).max(0.0)),
        ]
    }

    /// Splits by tag. On finite groups the density is returned as atoms in
    /// the pp part.
    pub fn lebesgue_parts(&self) -> SpectralParts {
        let g = &self.group;
        if g.is_finite() {
            let pp = ConcreteMeasure::from_finite_weights(g, &self.finite_weights().expect("finite group"))
                .expect("finite weights");
            return SpectralParts { pp, ac: ConcreteMeasure::zero(g), sc: ConcreteMeasure::zero(g) };
        }
        SpectralParts {
            pp: ConcreteMeasure { group: g.clone(), atoms: self.atoms.clone(), ac_density: None, sc_part: None },
            ac: ConcreteMeasure { group: g.clone(), atoms: vec![], ac_density: self.ac_density.clone(), sc_part: None },
            sc: ConcreteMeasure { group: g.clone(), atoms: vec![], ac_density: None, sc_part: self.sc_part.clone() },
        }
    }

    /// `sup_t |μ|(t + K)` with `t` restricted to grid points (finite groups:
    /// all elements). A lower bound of the true supremum on the real line.
    pub fn norm_k(&self, k: &CompactSet) -> Result<f64> {
        let tv = self.total_variation();
        match (&self.group, k) {
            (GroupSpec::Finite { .. }, CompactSet::Points(pts)) => {
                let w = tv.finite_weights()?;
                let idx: Vec<usize> = pts.iter().map(|p| self.group.index_of(p)).collect();
                Ok((0..self.group.sample_count())
                    .map(|t| idx.iter().map(|&i| w[self.group.add_indices(i, t)].re).sum::<f64>())
                    .fold(0.0, f64::max))
            }
            (GroupSpec::RealLine { step, .. }, CompactSet::Interval([a, b])) => {
                if b < a || b - a > 2.0 * self.group.half_width() {
                    return Err(Error::InvalidArgument(format!("[{a}, {b}] is not a compact set inside the window")));
                }
                let n = self.group.max_node();
                let h = *step;
                // prefix sums of |density| with trapezoid weights between nodes
                let dens: Vec<f64> = match &tv.ac_density {
                    Some(d) => (-n..=n).map(|m| d.at_node(m).re).collect(),
                    None => vec![0.0; (2 * n + 1) as usize],
                };
                let mut prefix = vec![0.0; dens.len()];
                for i in 1..dens.len() {
                    prefix[i] = prefix[i - 1] + 0.5 * h * (dens[i - 1] + dens[i]);
                }
                let dens_mass = |lo: f64, hi: f64| -> f64 {
                    let lo_i = ((lo / h).ceil() as i64).max(-n);
                    let hi_i = ((hi / h).floor() as i64).min(n);
                    if hi_i <= lo_i {
                        return 0.0;
                    }
                    prefix[(hi_i + n) as usize] - prefix[(lo_i + n) as usize]
                };
                let mut pts: Vec<(f64, f64)> =
                    tv.all_atoms().map(|a| (a.point.real().unwrap(), a.weight.re)).collect();
                pts.sort_by(|x, y| x.0.total_cmp(&y.0));
                let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
                let mut cum = vec![0.0; pts.len() + 1];
                for (i, p) in pts.iter().enumerate() {
                    cum[i + 1] = cum[i] + p.1;
                }
                let tol = 1e-9 * h;
                let lo_t = ((-self.group.half_width() - a) / h).ceil() as i64;
                let hi_t = ((self.group.half_width() - b) / h).floor() as i64;
                let mut best = 0.0f64;
                for m in lo_t..=hi_t {
                    let t = m as f64 * h;
                    let (lo, hi) = (t + a, t + b);
                    let i0 = xs.partition_point(|x| *x < lo - tol);
                    let i1 = xs.partition_point(|x| *x <= hi + tol);
                    best = best.max(cum[i1] - cum[i0] + dens_mass(lo, hi));
                }
                Ok(best)
            }
            _ => Err(Error::GroupMismatch(format!("compact set does not match {}", self.group))),
        }
    }

    /// `(μ * f)(t) = ∫ f(t - x) dμ(x)` sampled on the whole window.
    pub fn convolve_function(&self, f: &CompactFunction) -> Result<CompactFunction> {
        self.group.same_as(f.group())?;
        let g = &self.group;
        match g {
            GroupSpec::Finite { .. } => {
                let w = self.finite_weights()?;
                let mu = CompactFunction::from_finite_values(g, w)?;
                mu.convolve(f)
            }
            GroupSpec::RealLine { step, .. } => {
                let n = g.max_node();
                let mut out = vec![ZERO; g.sample_count()];
                if let Some(d) = &self.ac_density {
                    let raw = dft::linear_convolve(d.values(), f.values());
                    let start = d.start() + f.start();
                    for (i, v) in raw.iter().enumerate() {
                        let m = start + i as i64;
                        if m.abs() <= n {
                            out[(m + n) as usize] += v * *step;
                        }
                    }
                }
                for a in self.all_atoms() {
                    let x = a.point.real().unwrap();
                    for m in -n..=n {
                        let v = f.interpolate(m as f64 * step - x);
                        if v != ZERO {
                            out[(m + n) as usize] += a.weight * v;
                        }
                    }
                }
                CompactFunction::from_window(g, out)
            }
        }
    }

    /// Fourier transform on a finite group: `μ̂(χ) = (1/|G|) Σ_x μ(x) χ(x)‾`,
    /// the unique measure on `Ĝ` (counting Haar) with
    /// `⟨μ, f*f̃⟩ = ⟨μ̂, |f̌|²⟩`.
    pub fn fourier_transform(&self) -> Result<ConcreteMeasure> {
        if !self.group.is_finite() {
            return Err(Error::Unsupported(
                "measure transforms on the real line: build the semi-measure from its dual or use a corpus closed form"
                    .into(),
            ));
        }
        let w = self.finite_weights()?;
        let size = w.len() as f64;
        let hat: Vec<Complex64> = dft::to_dual(&self.group, &w, Sign::Minus).into_iter().map(|v| v / size).collect();
        ConcreteMeasure::from_finite_weights(&self.group.dual(), &clean(&hat))
    }

    /// Inverse of [`ConcreteMeasure::fourier_transform`]:
    /// `μ(x) = Σ_χ ν(χ) χ(x)`.
    pub fn inverse_fourier_transform(&self) -> Result<ConcreteMeasure> {
        if !self.group.is_finite() {
            return Err(Error::Unsupported("inverse measure transform needs a finite group".into()));
        }
        let w = self.finite_weights()?;
        let back = dft::to_dual(&self.group, &w, Sign::Plus);
        ConcreteMeasure::from_finite_weights(&self.group.dual(), &clean(&back))
    }

    /// Largest distance between two measures on a finite group, weight by
    /// weight.
    pub fn max_weight_gap(&self, other: &ConcreteMeasure) -> Result<f64> {
        let a = self.finite_weights()?;
        let b = other.finite_weights()?;
        Ok(a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max))
    }

    /// Componentwise difference: atoms matched by position, densities
    /// sample by sample. Used to check exact reconstruction of tagged parts.
    pub fn component_gap(&self, other: &ConcreteMeasure) -> Result<f64> {
        let diff = self.sub(other)?;
        let atoms = diff.all_atoms().map(|a| a.weight.norm()).fold(0.0, f64::max);
        let dens = diff.ac_density.as_ref().map_or(0.0, |d| d.sup_norm());
        Ok(atoms.max(dens))
    }

    /// Value of the measure's density at a dual grid index plus every atom
    /// at `chi` (finite groups).
    pub(crate) fn finite_mass_at(&self, chi: &Point) -> Result<Complex64> {
        let w = self.finite_weights()?;
        let p = self.group.normalize_point(chi)?;
        Ok(w[self.group.index_of(p.residues().unwrap())])
    }
}

/// Rounds transform noise: entries below `1e-15·max` become exact zeros.
fn clean(v: &[Complex64]) -> Vec<Complex64> {
    let scale = v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    v.iter()
        .map(|x| if x.norm() <= 1e-15 * scale { ZERO } else { *x })
        .collect()
}

/// Relative change across the last radius doubling below which a
/// truncated integral counts as stabilized.
pub const STABILIZATION_TOL: f64 = 1e-6;

/// Truncation radii `L'·2^{-j}`, `j = 5, …, 0`, of the dual window.
pub(crate) fn truncation_radii(group: &GroupSpec) -> Vec<f64> {
    let l = group.half_width();
    (0..=5).rev().map(|j| l * 2f64.powi(-j)).collect()
}

/// `∫_{|ξ| ≤ R} |F| d|ν|` for each radius, `F` given on the dual grid and
/// at atoms.
fn truncated_masses(
    tv: &ConcreteMeasure,
    grid: &[f64],
    at: impl Fn(&Point) -> f64,
    radii: &[f64],
) -> Vec<f64> {
    let g = tv.group();
    let n = g.max_node();
    let h = g.step();
    let mut out = vec![0.0; radii.len()];
    if let Some(d) = tv.ac_density() {
        for (m, v) in d.nodes() {
            let x = (m as f64 * h).abs();
            let contrib = v.re * grid[(m + n) as usize] * g.node_weight(m);
            for (slot, r) in out.iter_mut().zip(radii) {
                if x <= r * (1.0 + 1e-12) {
                    *slot += contrib;
                }
            }
        }
    }
    for a in tv.all_atoms() {
        let x = a.point.real().unwrap().abs();
        let contrib = a.weight.re * at(&a.point);
        for (slot, r) in out.iter_mut().zip(radii) {
            if x <= r * (1.0 + 1e-12) {
                *slot += contrib;
            }
        }
    }
    out
}

/// Checks `f̌ ∈ L¹(|ν|)` for every battery function by watching
/// `∫_{|ξ|≤R} |f̌| d|ν|` over doubling radii `R` up to the dual window.
///
/// Pass when, for every `f`, the relative change across the last doubling
/// is below [`STABILIZATION_TOL`]; fail otherwise with the offending
/// functions as witnesses. Finite measures on finite groups pass outright.
pub fn weak_admissibility_probe(nu: &ConcreteMeasure, battery: &[K2Function]) -> Result<ProbeReport> {
    if battery.is_empty() {
        return Err(Error::InvalidArgument("weak admissibility needs a nonempty battery".into()));
    }
    let dual = nu.group();
    let primal = dual.dual();
    for f in battery {
        primal.same_as(f.group())?;
    }
    let tv = nu.total_variation();
    let mut report = ProbeReport::new("weak_admissibility", Verdict::Pass).tolerance("relative_change", STABILIZATION_TOL);
    if dual.is_finite() {
        let mut worst = 0.0f64;
        for f in battery {
            let fcheck = f.realized().transform_on_dual_grid(true);
            let val: f64 = tv.finite_weights()?.iter().zip(&fcheck).map(|(w, v)| w.re * v.norm()).sum();
            worst = worst.max(val);
        }
        report.trace.push(TracePoint { n: 1, scale: 1.0, value: worst });
        return Ok(report.with_note("finite group: every integral is a finite sum"));
    }
    let radii = truncation_radii(dual);
    let mut worst_trace: Option<Vec<f64>> = None;
    let mut worst_change = 0.0f64;
    for (i, f) in battery.iter().enumerate() {
        let real = f.realized();
        let grid: Vec<f64> = real.transform_on_dual_grid(true).iter().map(|v| v.norm()).collect();
        let masses = truncated_masses(&tv, &grid, |p| real.fourier_inverse(p).map(|v| v.norm()).unwrap_or(0.0), &radii);
        let last = masses[masses.len() - 1];
        let prev = masses[masses.len() - 2];
        let change = if last == 0.0 { 0.0 } else { (last - prev).abs() / last.abs() };
        if !last.is_finite() || change > STABILIZATION_TOL {
            report.verdict = Verdict::Fail;
            report.witnesses.push(format!(
                "battery[{i}] support [{:.4}, {:.4}]: relative change {change:.3e} across the last doubling",
                f.support().0,
                f.support().1
            ));
        }
        if worst_trace.is_none() || change > worst_change {
            worst_change = change;
            worst_trace = Some(masses);
        }
    }
    report.trace = worst_trace
        .unwrap()
        .into_iter()
        .enumerate()
        .map(|(j, v)| TracePoint { n: j + 1, scale: radii[j], value: v })
        .collect();
    report = report.diagnostic("worst_relative_change", worst_change);
    let note = if report.verdict == Verdict::Pass {
        "truncated integrals stabilized for the whole battery"
    } else {
        "truncated integrals still move at the window edge"
    };
    Ok(report.with_note(note))
}

/// `χ(t)` for a character of `group` at a point of `group`'s dual.
pub(crate) fn pairing(group: &GroupSpec, chi: &Point, t: &Point) -> Complex64 {
    character_eval(group, chi, t).unwrap_or(ZERO)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::{k2_from_pair, standard_battery};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_finite(g: &GroupSpec, rng: &mut ChaCha8Rng) -> ConcreteMeasure {
        let w: Vec<Complex64> =
            (0..g.sample_count()).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        ConcreteMeasure::from_finite_weights(g, &w).unwrap()
    }

    #[test]
    fn pair_examples() {
        let g = GroupSpec::real_line(4.0, 0.01).unwrap();
        let f = CompactFunction::from_fn(&g, -2.0, 2.0, |t| c(t, 0.0)).unwrap();
        let d0 = ConcreteMeasure::dirac(&g, Point::Real(0.0)).unwrap();
        let bump = CompactFunction::bump(&g, 0.0, 1.0).unwrap();
        assert_eq!(d0.pair(&bump).unwrap(), bump.at_node(0));
        let two = ConcreteMeasure::from_atoms(&g, vec![(Point::Real(0.0), c(1.0, 0.0)), (Point::Real(1.0), c(1.0, 0.0))])
            .unwrap();
        assert!((two.pair(&f).unwrap() - c(1.0, 0.0)).norm() < 1e-12);
        let b = CompactFunction::indicator(&g, -0.5, 0.49).unwrap();
        let hat = b.convolve(&b).unwrap();
        let leb = ConcreteMeasure::haar(&g).unwrap();
        assert!((leb.pair(&hat).unwrap() - c(1.0, 0.0)).norm() < 1e-9);
    }

    #[test]
    fn duplicates_merge_and_sort() {
        let g = GroupSpec::finite(vec![5]).unwrap();
        let m = ConcreteMeasure::from_atoms(
            &g,
            vec![(Point::Residues(vec![3]), c(1.0, 0.0)), (Point::Residues(vec![8]), c(2.0, 0.0)), (Point::Residues(vec![1]), c(1.0, 1.0))],
        )
        .unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atoms()[0].point, Point::Residues(vec![1]));
        assert_eq!(m.atoms()[1].weight, c(3.0, 0.0));
    }

    #[test]
    fn total_variation_examples() {
        let g = GroupSpec::real_line(2.0, 0.1).unwrap();
        let m = ConcreteMeasure::from_atoms(&g, vec![(Point::Real(0.3), c(3.0, -4.0))]).unwrap();
        assert_eq!(m.total_variation().atoms()[0].weight, c(5.0, 0.0));
        let d = CompactFunction::from_fn(&g, -1.0, 1.0, |t| c(t, 1.0)).unwrap();
        let tv = ConcreteMeasure::from_density(d.clone()).unwrap().total_variation();
        for (m, v) in tv.ac_density().unwrap().nodes() {
            assert!((v.re - d.at_node(m).norm()).abs() < 1e-15);
        }
        assert_eq!(tv.total_variation(), tv);
    }

    #[test]
    fn total_variation_is_subadditive_on_random_atoms() {
        let g = GroupSpec::real_line(4.0, 0.25).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let mut atoms = || {
                (0..5)
                    .map(|_| (Point::Real(rng.gen_range(-16..=16) as f64 * 0.25), c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))))
                    .collect::<Vec<_>>()
            };
            let a = ConcreteMeasure::from_atoms(&g, atoms()).unwrap();
            let b = ConcreteMeasure::from_atoms(&g, atoms()).unwrap();
            let sum = a.add(&b).unwrap();
            assert!(sum.total_mass() <= a.total_mass() + b.total_mass() + 1e-12);
        }
    }

    #[test]
    fn jordan_hahn_examples_and_reconstruction() {
        let g = GroupSpec::finite(vec![4]).unwrap();
        let m = ConcreteMeasure::from_atoms(&g, vec![(Point::Residues(vec![0]), c(1.0, 0.0)), (Point::Residues(vec![1]), c(-1.0, 0.0))])
            .unwrap();
        let [r1, r2, r3, r4] = m.jordan_hahn();
        assert_eq!(r1, ConcreteMeasure::dirac(&g, Point::Residues(vec![0])).unwrap());
        assert_eq!(r2, ConcreteMeasure::dirac(&g, Point::Residues(vec![1])).unwrap());
        assert!(r3.is_zero() && r4.is_zero());
        let i0 = ConcreteMeasure::from_atoms(&g, vec![(Point::Residues(vec![0]), c(0.0, 1.0))]).unwrap();
        let [a, b, cc, d] = i0.jordan_hahn();
        assert!(a.is_zero() && b.is_zero() && d.is_zero());
        assert_eq!(cc.atoms()[0].weight, c(1.0, 0.0));

        let g8 = GroupSpec::finite(vec![8]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = random_finite(&g8, &mut rng);
            let [a, b, cc, d] = m.jordan_hahn();
            let back = a.sub(&b).unwrap().add(&cc.sub(&d).unwrap().scale(c(0.0, 1.0))).unwrap();
            assert!(back.max_weight_gap(&m).unwrap() < 1e-12);
            let tv = m.total_variation().finite_weights().unwrap();
            for part in [&a, &b, &cc, &d] {
                for (w, t) in part.finite_weights().unwrap().iter().zip(&tv) {
                    assert!(w.re >= 0.0 && w.re <= t.re + 1e-15);
                }
            }
        }
    }

    #[test]
    fn lebesgue_parts_route_by_tag() {
        let g = GroupSpec::real_line(4.0, 0.5).unwrap();
        let m = ConcreteMeasure::dirac(&g, Point::Real(0.0)).unwrap().add(&ConcreteMeasure::haar(&g).unwrap()).unwrap();
        let parts = m.lebesgue_parts();
        assert_eq!(parts.pp, ConcreteMeasure::dirac(&g, Point::Real(0.0)).unwrap());
        assert_eq!(parts.ac, ConcreteMeasure::haar(&g).unwrap());
        assert!(parts.sc.is_zero());
        let again = parts.pp.lebesgue_parts();
        assert!(again.ac.is_zero() && again.sc.is_zero());
        let sum = parts.pp.add(&parts.ac).unwrap().add(&parts.sc).unwrap();
        assert_eq!(sum.component_gap(&m).unwrap(), 0.0);
    }

    #[test]
    fn norm_k_examples() {
        let g = GroupSpec::real_line(16.0, 0.125).unwrap();
        let comb = ConcreteMeasure::from_atoms(&g, (-16..=16).map(|k| (Point::Real(k as f64), c(1.0, 0.0))).collect()).unwrap();
        // oracle: count integers in [t, t+1] for every grid t
        let direct = (-128..=120)
            .map(|m| {
                let t = m as f64 * 0.125;
                (-16..=16).filter(|&k| (k as f64) >= t - 1e-12 && (k as f64) <= t + 1.0 + 1e-12).count()
            })
            .max()
            .unwrap();
        assert_eq!(comb.norm_k(&CompactSet::Interval([0.0, 1.0])).unwrap(), direct as f64);
        assert_eq!(direct, 2);
        let leb = ConcreteMeasure::haar(&g).unwrap();
        assert!((leb.norm_k(&CompactSet::Interval([0.0, 1.0])).unwrap() - 1.0).abs() < 1e-12);
        let scaled = comb.scale(c(0.0, -3.0));
        assert!((scaled.norm_k(&CompactSet::Interval([0.0, 1.0])).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn finite_transform_examples() {
        let n = 6;
        let g = GroupSpec::finite(vec![n]).unwrap();
        let d0 = ConcreteMeasure::dirac(&g, Point::Residues(vec![0])).unwrap();
        let hat = d0.fourier_transform().unwrap();
        for w in hat.finite_weights().unwrap() {
            assert!((w - c(1.0 / n as f64, 0.0)).norm() < 1e-15);
        }
        let uniform = ConcreteMeasure::from_finite_weights(&g, &vec![c(1.0 / n as f64, 0.0); n as usize]).unwrap();
        let hat = uniform.fourier_transform().unwrap();
        assert_eq!(hat.atoms().len(), 1);
        assert!((hat.atoms()[0].weight - c(1.0 / n as f64, 0.0)).norm() < 1e-15);
        assert!(hat.inverse_fourier_transform().unwrap().max_weight_gap(&uniform).unwrap() < 1e-15);
    }

    #[test]
    fn defining_identity_on_basis() {
        let g = GroupSpec::finite(vec![8]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mu = random_finite(&g, &mut rng);
        let hat = mu.fourier_transform().unwrap();
        for x in 0..8 {
            for y in 0..8 {
                let mut v = vec![c(0.0, 0.0); 8];
                v[x] += c(1.0, 0.0);
                v[y] += c(0.0, 1.0);
                let f = CompactFunction::from_finite_values(&g, v).unwrap();
                let lhs = mu.pair(k2_from_pair(&f, &f.tilde()).unwrap().realized()).unwrap();
                // |f̌|² by direct character sums
                let rhs: Complex64 = (0..8)
                    .map(|k| {
                        let chi = Point::Residues(vec![k]);
                        let fc: Complex64 = (0..8).map(|t| f.values()[t as usize] * pairing(&g, &chi, &Point::Residues(vec![t]))).sum();
                        hat.finite_mass_at(&chi).unwrap() * fc.norm_sqr()
                    })
                    .sum();
                assert!((lhs - rhs).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn closure_ops_commute_with_transform() {
        let g = GroupSpec::finite(vec![3, 4]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mu = random_finite(&g, &mut rng);
        let hat = mu.fourier_transform().unwrap();
        let t = Point::Residues(vec![2, 1]);
        let shifted = mu.translate(&t).unwrap().fourier_transform().unwrap();
        let expect = hat.modulate(|chi| pairing(&g, chi, &t).conj());
        assert!(shifted.max_weight_gap(&expect).unwrap() < 1e-9);
        // μ̃ = conj(μ†)
        let tilde = mu.reflect().conj();
        assert!(tilde.fourier_transform().unwrap().max_weight_gap(&hat.conj()).unwrap() < 1e-9);
    }

    #[test]
    fn weak_admissibility_examples() {
        let g = GroupSpec::real_line(8.0, 1.0 / 64.0).unwrap();
        let dual = g.dual();
        let battery = standard_battery(&g).unwrap();
        let half_line = CompactFunction::from_fn(&dual, 0.0, dual.half_width(), |_| c(1.0, 0.0)).unwrap();
        let nu = ConcreteMeasure::from_density(half_line).unwrap();
        assert_eq!(weak_admissibility_probe(&nu, &battery).unwrap().verdict, Verdict::Pass);
        let finite = ConcreteMeasure::dirac(&dual, Point::Real(0.0)).unwrap();
        assert_eq!(weak_admissibility_probe(&finite, &battery).unwrap().verdict, Verdict::Pass);
        // e^{|k|} at the integers of a wide dual window
        let wide = GroupSpec::real_line(4.0, 1.0 / 128.0).unwrap();
        let wd = wide.dual();
        let atoms = (-64..64).map(|k: i64| (Point::Real(k as f64), c((k.abs() as f64).exp(), 0.0))).collect();
        let growing = ConcreteMeasure::from_atoms(&wd, atoms).unwrap();
        let report = weak_admissibility_probe(&growing, &standard_battery(&wide).unwrap()).unwrap();
        assert_eq!(report.verdict, Verdict::Fail);
        assert!(!report.witnesses.is_empty());
    }

    #[test]
    fn weak_admissibility_closure() {
        let g = GroupSpec::real_line(8.0, 1.0 / 32.0).unwrap();
        let dual = g.dual();
        let battery = standard_battery(&g).unwrap();
        let dens = CompactFunction::from_fn(&dual, -dual.half_width(), dual.half_width(), |x| c(x.cos(), x.sin() * 0.5)).unwrap();
        let nu = ConcreteMeasure::new(
            &dual,
            vec![Atom::new(Point::Real(0.5), c(2.0, -1.0))],
            Some(dens),
            Some(ScPart { atoms: vec![Atom::new(Point::Real(0.25), c(0.3, 0.0))], level: 1 }),
        )
        .unwrap();
        let parts = nu.lebesgue_parts();
        let variants = [
            nu.clone(),
            nu.total_variation(),
            nu.conj(),
            nu.reflect(),
            nu.modulate(|p| pairing(&dual, p, &Point::Real(0.75)).conj()),
            parts.pp,
            parts.ac,
            parts.sc,
        ];
        for v in &variants {
            assert_eq!(weak_admissibility_probe(v, &battery).unwrap().verdict, Verdict::Pass);
        }
    }

    #[test]
    fn json_round_trip() {
        let g = GroupSpec::real_line(2.0, 0.5).unwrap();
        let m = ConcreteMeasure::new(
            &g,
            vec![Atom::new(Point::Real(0.3), c(1.0, 2.0))],
            Some(CompactFunction::indicator(&g, -1.0, 1.0).unwrap()),
            Some(ScPart { atoms: vec![Atom::new(Point::Real(0.1), c(0.5, 0.0))], level: 2 }),
        )
        .unwrap();
        let text = serde_json::to_string(&m).unwrap();
        let back: ConcreteMeasure = serde_json::from_str(&text).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn convolve_function_with_atoms() {
        let g = GroupSpec::real_line(4.0, 0.125).unwrap();
        let f = CompactFunction::bump(&g, 0.0, 0.5).unwrap();
        let m = ConcreteMeasure::from_atoms(&g, vec![(Point::Real(1.0), c(2.0, 0.0))]).unwrap();
        let conv = m.convolve_function(&f).unwrap();
        assert!((conv.at_node(8) - f.at_node(0) * 2.0).norm() < 1e-12);
        assert!((conv.at_node(9) - f.at_node(1) * 2.0).norm() < 1e-12);
    }
}
