//! Test functions: compactly supported samples, the convolution algebra
//! `K₂(G)` built from them, and the approximate identities `K_n = g_n * g̃_n`.
//!
//! Membership in `K₂(G)` is never tested; a [`K2Function`] is a finite sum
//! `Σ c_k (g_k * h_k)` and carries its term list.
//!
//! Transform normalization: `f̂(χ) = ∫ χ(t)‾ f(t) dθ_G(t)` with the group's Haar
//! weights (counting on finite groups), so on `Z_n` Parseval reads
//! `Σ_G |f|² = (1/|G|) Σ_Ĝ |f̂|²`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::dft::{self, Sign};
use crate::error::{Error, Result};
use crate::group::{character_eval, unit, DualPoint, GroupSpec, Point};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Samples of a function on the group grid, zero outside `[start, start+len)`.
/// On finite groups the samples always cover the whole group.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactFunction {
    group: GroupSpec,
    start: i64,
    values: Vec<Complex64>,
}

/// Wire format: `{"support":[a,b],"step":h,"values":[[re,im],...]}`. Finite
/// groups use row-major indices with `step = 1`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CompactFunctionJson {
    pub support: [f64; 2],
    pub step: f64,
    pub values: Vec<Complex64>,
}

impl CompactFunction {
    pub fn zero(group: &GroupSpec) -> Self {
        match group {
            GroupSpec::Finite { .. } => CompactFunction {
                group: group.clone(),
                start: 0,
                values: vec![ZERO; group.sample_count()],
            },
            GroupSpec::RealLine { .. } => CompactFunction { group: group.clone(), start: 0, values: vec![] },
        }
    }

    /// Samples starting at grid node `start` (finite groups: `start = 0` and
    /// one value per element).
    pub fn from_samples(group: &GroupSpec, start: i64, values: Vec<Complex64>) -> Result<Self> {
        match group {
            GroupSpec::Finite { .. } => {
                if start != 0 || values.len() != group.sample_count() {
                    return Err(Error::InvalidArgument(format!(
                        "finite-group samples need {} values starting at 0",
                        group.sample_count()
                    )));
                }
            }
            GroupSpec::RealLine { .. } => {
                let end = start + values.len() as i64 - 1;
                if !values.is_empty() && (start < -group.max_node() || end > group.max_node()) {
                    return Err(Error::WindowTooSmall(format!(
                        "samples on nodes {start}..={end} leave the window of {} nodes",
                        group.max_node()
                    )));
                }
            }
        }
        Ok(CompactFunction { group: group.clone(), start, values }.trimmed())
    }

    pub fn from_finite_values(group: &GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        Self::from_samples(group, 0, values)
    }

    /// Samples of `f` on the grid nodes inside `[a, b]` (real line).
    pub fn from_fn(group: &GroupSpec, a: f64, b: f64, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        if group.is_finite() {
            return Err(Error::Unsupported("from_fn needs the real-line backend".into()));
        }
        let h = group.step();
        let lo = (a / h - 1e-9).ceil() as i64;
        let hi = (b / h + 1e-9).floor() as i64;
        if hi < lo {
            return Ok(Self::zero(group));
        }
        let values = (lo..=hi).map(|m| f(m as f64 * h)).collect();
        Self::from_samples(group, lo, values)
    }

    /// Samples of `f` at every element of a finite group.
    pub fn from_finite_fn(group: &GroupSpec, f: impl Fn(&[i64]) -> Complex64) -> Result<Self> {
        if !group.is_finite() {
            return Err(Error::Unsupported("from_finite_fn needs a finite group".into()));
        }
        let values = (0..group.sample_count()).map(|i| f(&group.residues_of(i))).collect();
        Self::from_samples(group, 0, values)
    }

    /// Whole-window samples, one per sample index of the group.
    pub fn from_window(group: &GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        if values.len() != group.sample_count() {
            return Err(Error::InvalidArgument(format!(
                "expected {} window samples, got {}",
                group.sample_count(),
                values.len()
            )));
        }
        let start = if group.is_finite() { 0 } else { -group.max_node() };
        Self::from_samples(group, start, values)
    }

    /// Unit mass at a point: `δ_x` on finite groups, `1/h` at a grid node on
    /// the real line.
    pub fn delta(group: &GroupSpec, at: &Point) -> Result<Self> {
        match (group, at) {
            (GroupSpec::Finite { .. }, Point::Residues(r)) => {
                let mut values = vec![ZERO; group.sample_count()];
                values[group.index_of(r)] = Complex64::new(1.0, 0.0);
                Self::from_samples(group, 0, values)
            }
            (GroupSpec::RealLine { .. }, Point::Real(t)) => {
                let m = group.node_of(*t).ok_or(Error::OffGrid(*t))?;
                Self::from_samples(group, m, vec![Complex64::new(1.0 / group.step(), 0.0)])
            }
            _ => Err(Error::GroupMismatch(format!("{at} is not a point of {group}"))),
        }
    }

    /// Indicator of `[a, b]` (real line).
    pub fn indicator(group: &GroupSpec, a: f64, b: f64) -> Result<Self> {
        Self::from_fn(group, a, b, |_| Complex64::new(1.0, 0.0))
    }

    /// The C^∞ bump `exp(-1/(1-x²))` rescaled to `[center-half_width, center+half_width]`.
    pub fn bump(group: &GroupSpec, center: f64, half_width: f64) -> Result<Self> {
        Self::from_fn(group, center - half_width, center + half_width, |t| {
            let x = (t - center) / half_width;
            if x.abs() >= 1.0 {
                ZERO
            } else {
                Complex64::new((-1.0 / (1.0 - x * x)).exp() * std::f64::consts::E, 0.0)
            }
        })
    }

    /// `exp(-(t-c)²/(2σ²))` truncated at `cutoff·σ`.
    pub fn gaussian(group: &GroupSpec, center: f64, sigma: f64, cutoff: f64) -> Result<Self> {
        Self::from_fn(group, center - cutoff * sigma, center + cutoff * sigma, |t| {
            let x = (t - center) / sigma;
            Complex64::new((-0.5 * x * x).exp(), 0.0)
        })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn start(&self) -> i64 {
        self.start
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    /// `(node, value)` pairs; finite groups report the row-major index.
    pub fn nodes(&self) -> impl Iterator<Item = (i64, Complex64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.start + i as i64, *v))
    }

    pub fn at_node(&self, m: i64) -> Complex64 {
        let i = m - self.start;
        if i < 0 || i as usize >= self.values.len() {
            ZERO
        } else {
            self.values[i as usize]
        }
    }

    /// Support bound `[a, b]` in group coordinates (finite: index range).
    pub fn support(&self) -> (f64, f64) {
        if self.values.is_empty() {
            return (0.0, 0.0);
        }
        let h = self.group.step();
        (self.start as f64 * h, (self.start + self.values.len() as i64 - 1) as f64 * h)
    }

    /// Linear interpolation between grid nodes (real line); exact lookup on
    /// finite groups.
    pub fn value_at(&self, p: &Point) -> Result<Complex64> {
        match (&self.group, p) {
            (GroupSpec::Finite { .. }, Point::Residues(r)) => Ok(self.values[self.group.index_of(r)]),
            (GroupSpec::RealLine { .. }, Point::Real(t)) => Ok(self.interpolate(*t)),
            _ => Err(Error::GroupMismatch(format!("{p} is not a point of {}", self.group))),
        }
    }

    pub(crate) fn interpolate(&self, t: f64) -> Complex64 {
        let x = t / self.group.step();
        let m = x.floor();
        let frac = x - m;
        let m = m as i64;
        if frac <= 1e-9 {
            return self.at_node(m);
        }
        if frac >= 1.0 - 1e-9 {
            return self.at_node(m + 1);
        }
        self.at_node(m) * (1.0 - frac) + self.at_node(m + 1) * frac
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// `(∫ |f|^p dθ_G)^{1/p}`.
    pub fn lp_norm(&self, p: f64) -> f64 {
        let s: f64 = self.nodes().map(|(m, v)| v.norm().powf(p) * self.group.node_weight(m)).sum();
        s.powf(1.0 / p)
    }

    /// Samples over the whole window, indexed by group sample index.
    pub fn window_values(&self) -> Vec<Complex64> {
        match self.group {
            GroupSpec::Finite { .. } => self.values.clone(),
            GroupSpec::RealLine { .. } => {
                let n = self.group.max_node();
                (-n..=n).map(|m| self.at_node(m)).collect()
            }
        }
    }

    /// Haar-weighted whole-window samples.
    pub(crate) fn weighted_window(&self) -> Vec<Complex64> {
        let n = self.group.max_node();
        let off = if self.group.is_finite() { 0 } else { n };
        let mut out = vec![ZERO; self.group.sample_count()];
        for (m, v) in self.nodes() {
            out[(m + off) as usize] = v * self.group.node_weight(m);
        }
        out
    }

    fn trimmed(mut self) -> Self {
        if self.group.is_finite() {
            return self;
        }
        let first = self.values.iter().position(|v| *v != ZERO);
        match first {
            None => {
                self.values.clear();
                self.start = 0;
            }
            Some(i) => {
                let last = self.values.iter().rposition(|v| *v != ZERO).unwrap();
                self.values.truncate(last + 1);
                self.values.drain(..i);
                self.start += i as i64;
            }
        }
        self
    }

    pub fn scale(&self, c: Complex64) -> Self {
        CompactFunction {
            group: self.group.clone(),
            start: self.start,
            values: self.values.iter().map(|v| v * c).collect(),
        }
        .trimmed()
    }

    pub fn add(&self, other: &CompactFunction) -> Result<Self> {
        self.group.same_as(&other.group)?;
        if self.group.is_finite() {
            let values = self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect();
            return Self::from_samples(&self.group, 0, values);
        }
        if self.values.is_empty() {
            return Ok(other.clone());
        }
        if other.values.is_empty() {
            return Ok(self.clone());
        }
        let lo = self.start.min(other.start);
        let hi = (self.start + self.values.len() as i64).max(other.start + other.values.len() as i64);
        let values = (lo..hi).map(|m| self.at_node(m) + other.at_node(m)).collect();
        Self::from_samples(&self.group, lo, values)
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        CompactFunction {
            group: self.group.clone(),
            start: self.start,
            values: self.values.iter().map(|v| f(*v)).collect(),
        }
        .trimmed()
    }

    /// Pointwise product (same grid).
    pub fn mul(&self, other: &CompactFunction) -> Result<Self> {
        self.group.same_as(&other.group)?;
        if self.group.is_finite() {
            let values = self.values.iter().zip(&other.values).map(|(a, b)| a * b).collect();
            return Self::from_samples(&self.group, 0, values);
        }
        let lo = self.start.max(other.start);
        let hi = (self.start + self.values.len() as i64).min(other.start + other.values.len() as i64);
        if hi <= lo {
            return Ok(Self::zero(&self.group));
        }
        let values = (lo..hi).map(|m| self.at_node(m) * other.at_node(m)).collect();
        Self::from_samples(&self.group, lo, values)
    }

    /// `f̃(x) = f(-x)‾`.
    pub fn tilde(&self) -> Self {
        self.reflect_with(|v| v.conj())
    }

    /// `f†(x) = f(-x)`.
    pub fn dagger(&self) -> Self {
        self.reflect_with(|v| v)
    }

    fn reflect_with(&self, f: impl Fn(Complex64) -> Complex64) -> Self {
        match self.group {
            GroupSpec::Finite { .. } => {
                let mut values = vec![ZERO; self.values.len()];
                for (i, v) in self.values.iter().enumerate() {
                    values[self.group.neg_index(i)] = f(*v);
                }
                CompactFunction { group: self.group.clone(), start: 0, values }
            }
            GroupSpec::RealLine { .. } => {
                let len = self.values.len() as i64;
                let start = if len == 0 { 0 } else { -(self.start + len - 1) };
                CompactFunction {
                    group: self.group.clone(),
                    start,
                    values: self.values.iter().rev().map(|v| f(*v)).collect(),
                }
            }
        }
    }

    /// `T_t f(x) = f(x - t)`. On the real line `t` must be a grid point.
    pub fn translate(&self, t: &Point) -> Result<Self> {
        match (&self.group, t) {
            (GroupSpec::Finite { .. }, Point::Residues(r)) => {
                let shift = self.group.index_of(r);
                let mut values = vec![ZERO; self.values.len()];
                for (i, v) in self.values.iter().enumerate() {
                    values[self.group.add_indices(i, shift)] = *v;
                }
                Ok(CompactFunction { group: self.group.clone(), start: 0, values })
            }
            (GroupSpec::RealLine { .. }, Point::Real(x)) => {
                let h = self.group.step();
                let k = (x / h).round();
                if (x / h - k).abs() > 1e-9 {
                    return Err(Error::OffGrid(*x));
                }
                Self::from_samples(&self.group, self.start + k as i64, self.values.clone())
            }
            _ => Err(Error::GroupMismatch(format!("{t} is not a point of {}", self.group))),
        }
    }

    /// Haar-weighted convolution `(f*g)(x) = ∫ f(y) g(x-y) dθ_G(y)`.
    pub fn convolve(&self, other: &CompactFunction) -> Result<Self> {
        self.group.same_as(&other.group)?;
        match &self.group {
            GroupSpec::Finite { .. } => {
                let size = self.values.len();
                let values = if size <= 256 {
                    let mut out = vec![ZERO; size];
                    for (i, a) in self.values.iter().enumerate() {
                        if *a == ZERO {
                            continue;
                        }
                        for (j, b) in other.values.iter().enumerate() {
                            out[self.group.add_indices(i, j)] += a * b;
                        }
                    }
                    out
                } else {
                    let fa = dft::to_dual(&self.group, &self.values, Sign::Minus);
                    let fb = dft::to_dual(&self.group, &other.values, Sign::Minus);
                    let prod: Vec<Complex64> = fa.iter().zip(&fb).map(|(a, b)| a * b).collect();
                    let back = dft::to_dual(&self.group, &prod, Sign::Plus);
                    back.into_iter().map(|v| v / size as f64).collect()
                };
                Self::from_samples(&self.group, 0, values)
            }
            GroupSpec::RealLine { step, .. } => {
                if self.values.is_empty() || other.values.is_empty() {
                    return Ok(Self::zero(&self.group));
                }
                let start = self.start + other.start;
                let raw = dft::linear_convolve(&self.values, &other.values);
                let end = start + raw.len() as i64 - 1;
                if start < -self.group.max_node() || end > self.group.max_node() {
                    return Err(Error::WindowTooSmall(format!(
                        "convolution support [{}, {}] exceeds the window half-width {}",
                        start as f64 * step,
                        end as f64 * step,
                        self.group.half_width()
                    )));
                }
                Self::from_samples(&self.group, start, raw.into_iter().map(|v| v * *step).collect())
            }
        }
    }

    /// `f̂(χ) = ∫ χ(t)‾ f(t) dθ_G(t)`.
    pub fn fourier(&self, chi: &DualPoint) -> Result<Complex64> {
        self.transform_at(chi, -1.0)
    }

    /// `f̌(χ) = f̂(χ̄)`.
    pub fn fourier_inverse(&self, chi: &DualPoint) -> Result<Complex64> {
        self.transform_at(chi, 1.0)
    }

    fn transform_at(&self, chi: &DualPoint, sign: f64) -> Result<Complex64> {
        match (&self.group, chi) {
            (GroupSpec::Finite { .. }, Point::Residues(_)) => {
                let mut acc = ZERO;
                for (i, v) in self.values.iter().enumerate() {
                    let c = character_eval(&self.group, chi, &self.group.point_at(i))?;
                    acc += if sign < 0.0 { c.conj() } else { c } * v;
                }
                Ok(acc)
            }
            (GroupSpec::RealLine { .. }, Point::Real(xi)) => {
                let h = self.group.step();
                Ok(self
                    .nodes()
                    .map(|(m, v)| v * self.group.node_weight(m) * unit(sign * xi * m as f64 * h))
                    .sum())
            }
            _ => Err(Error::GroupMismatch(format!("{chi} is not a character of {}", self.group))),
        }
    }

    /// `f̂` (or `f̌` when `inverse`) at every sampled character of the dual.
    pub fn transform_on_dual_grid(&self, inverse: bool) -> Vec<Complex64> {
        let sign = if inverse { Sign::Plus } else { Sign::Minus };
        dft::to_dual(&self.group, &self.weighted_window(), sign)
    }

    pub fn to_json(&self) -> CompactFunctionJson {
        let (a, b) = match self.group {
            GroupSpec::Finite { .. } => (0.0, (self.values.len() - 1) as f64),
            GroupSpec::RealLine { .. } => self.support(),
        };
        CompactFunctionJson { support: [a, b], step: self.group.step(), values: self.values.clone() }
    }

    pub fn from_json(group: &GroupSpec, raw: &CompactFunctionJson) -> Result<Self> {
        let h = group.step();
        if (raw.step - h).abs() > 1e-12 * h {
            return Err(Error::InvalidArgument(format!("step {} does not match the group step {h}", raw.step)));
        }
        let start = raw.support[0] / h;
        if (start - start.round()).abs() > 1e-6 {
            return Err(Error::OffGrid(raw.support[0]));
        }
        let start = start.round() as i64;
        let expected_end = start + raw.values.len() as i64 - 1;
        if !raw.values.is_empty() && ((raw.support[1] / h).round() as i64) != expected_end {
            return Err(Error::InvalidArgument(format!(
                "support [{}, {}] does not match {} values",
                raw.support[0],
                raw.support[1],
                raw.values.len()
            )));
        }
        Self::from_samples(group, start, raw.values.clone())
    }
}

/// One term `coef · (left * right)` of a [`K2Function`].
#[derive(Clone, Debug, PartialEq)]
pub struct K2Term {
    pub coef: Complex64,
    pub left: CompactFunction,
    pub right: CompactFunction,
}

/// A member of `K₂(G) = span{g * h : g, h ∈ C_c(G)}` kept as its term list
/// together with the realized samples.
#[derive(Clone, Debug, PartialEq)]
pub struct K2Function {
    group: GroupSpec,
    terms: Vec<K2Term>,
    realized: CompactFunction,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct K2TermJson {
    pub coef: Complex64,
    pub left: CompactFunctionJson,
    pub right: CompactFunctionJson,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct K2FunctionJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupSpec>,
    pub terms: Vec<K2TermJson>,
}

impl K2Function {
    pub fn zero(group: &GroupSpec) -> Self {
        K2Function { group: group.clone(), terms: vec![], realized: CompactFunction::zero(group) }
    }

    pub fn from_terms(group: &GroupSpec, terms: Vec<K2Term>) -> Result<Self> {
        let mut realized = CompactFunction::zero(group);
        for t in &terms {
            group.same_as(t.left.group())?;
            group.same_as(t.right.group())?;
            realized = realized.add(&t.left.convolve(&t.right)?.scale(t.coef))?;
        }
        Ok(K2Function { group: group.clone(), terms, realized })
    }

    /// Every function on a finite group is `δ₀ * f`.
    pub fn from_finite_values(group: &GroupSpec, values: Vec<Complex64>) -> Result<Self> {
        let f = CompactFunction::from_finite_values(group, values)?;
        k2_from_pair(&CompactFunction::delta(group, &group.zero())?, &f)
    }

    /// `g * h` with `g, h` truncated Gaussians of width `σ/√2`, so the
    /// product is a Gaussian of width `σ` up to the `8σ/√2` truncation.
    pub fn gaussian(group: &GroupSpec, center: f64, sigma: f64) -> Result<Self> {
        let s = sigma / std::f64::consts::SQRT_2;
        let norm = 1.0 / (s * (2.0 * std::f64::consts::PI).sqrt());
        let g = CompactFunction::gaussian(group, center, s, 8.0)?;
        let h = CompactFunction::gaussian(group, 0.0, s, 8.0)?.scale(Complex64::new(norm, 0.0));
        k2_from_pair(&g, &h)
    }

    /// Convolution of two C^∞ bumps of half-width `half_width/2`, one centred
    /// at `center`; supported in `[center - half_width, center + half_width]`.
    pub fn bump_pair(group: &GroupSpec, center: f64, half_width: f64) -> Result<Self> {
        let g = CompactFunction::bump(group, center, half_width / 2.0)?;
        let h = CompactFunction::bump(group, 0.0, half_width / 2.0)?;
        k2_from_pair(&g, &h)
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn terms(&self) -> &[K2Term] {
        &self.terms
    }

    pub fn realized(&self) -> &CompactFunction {
        &self.realized
    }

    pub fn support(&self) -> (f64, f64) {
        self.realized.support()
    }

    /// `(Σ c_i g_i*h_i) * (Σ d_j u_j*v_j) = Σ c_i d_j (g_i*h_i*u_j) * v_j`.
    pub fn convolve(&self, other: &K2Function) -> Result<K2Function> {
        self.group.same_as(&other.group)?;
        let mut terms = Vec::with_capacity(self.terms.len() * other.terms.len());
        for a in &self.terms {
            let gh = a.left.convolve(&a.right)?;
            for b in &other.terms {
                terms.push(K2Term { coef: a.coef * b.coef, left: gh.convolve(&b.left)?, right: b.right.clone() });
            }
        }
        let realized = self.realized.convolve(&other.realized)?;
        Ok(K2Function { group: self.group.clone(), terms, realized })
    }

    pub fn tilde(&self) -> K2Function {
        self.map_terms(|t| K2Term { coef: t.coef.conj(), left: t.left.tilde(), right: t.right.tilde() }, |f| f.tilde())
    }

    pub fn dagger(&self) -> K2Function {
        self.map_terms(|t| K2Term { coef: t.coef, left: t.left.dagger(), right: t.right.dagger() }, |f| f.dagger())
    }

    pub fn translate(&self, t: &Point) -> Result<K2Function> {
        let mut terms = Vec::with_capacity(self.terms.len());
        for term in &self.terms {
            terms.push(K2Term { coef: term.coef, left: term.left.translate(t)?, right: term.right.clone() });
        }
        Ok(K2Function { group: self.group.clone(), terms, realized: self.realized.translate(t)? })
    }

    fn map_terms(&self, tf: impl Fn(&K2Term) -> K2Term, rf: impl Fn(&CompactFunction) -> CompactFunction) -> K2Function {
        K2Function {
            group: self.group.clone(),
            terms: self.terms.iter().map(tf).collect(),
            realized: rf(&self.realized),
        }
    }

    pub fn scale(&self, c: Complex64) -> K2Function {
        K2Function {
            group: self.group.clone(),
            terms: self.terms.iter().map(|t| K2Term { coef: t.coef * c, ..t.clone() }).collect(),
            realized: self.realized.scale(c),
        }
    }

    pub fn add(&self, other: &K2Function) -> Result<K2Function> {
        self.group.same_as(&other.group)?;
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        Ok(K2Function { group: self.group.clone(), terms, realized: self.realized.add(&other.realized)? })
    }

    pub fn fourier(&self, chi: &DualPoint) -> Result<Complex64> {
        self.realized.fourier(chi)
    }

    pub fn fourier_inverse(&self, chi: &DualPoint) -> Result<Complex64> {
        self.realized.fourier_inverse(chi)
    }

    /// Largest deviation between the cached samples and a fresh evaluation
    /// of the term list.
    pub fn realization_defect(&self) -> Result<f64> {
        let fresh = K2Function::from_terms(&self.group, self.terms.clone())?;
        let diff = fresh.realized.add(&self.realized.scale(Complex64::new(-1.0, 0.0)))?;
        Ok(diff.sup_norm())
    }

    pub fn to_json(&self) -> K2FunctionJson {
        K2FunctionJson {
            group: Some(self.group.clone()),
            terms: self
                .terms
                .iter()
                .map(|t| K2TermJson { coef: t.coef, left: t.left.to_json(), right: t.right.to_json() })
                .collect(),
        }
    }

    /// `group` is used when the JSON carries none.
    pub fn from_json(group: Option<&GroupSpec>, raw: &K2FunctionJson) -> Result<Self> {
        let group = raw
            .group
            .as_ref()
            .or(group)
            .ok_or_else(|| Error::InvalidArgument("K2 function JSON needs a group".into()))?;
        let terms = raw
            .terms
            .iter()
            .map(|t| {
                Ok(K2Term {
                    coef: t.coef,
                    left: CompactFunction::from_json(group, &t.left)?,
                    right: CompactFunction::from_json(group, &t.right)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        K2Function::from_terms(group, terms)
    }
}

/// Single-term `K₂` function realizing `g * h`.
pub fn k2_from_pair(g: &CompactFunction, h: &CompactFunction) -> Result<K2Function> {
    g.group().same_as(h.group())?;
    K2Function::from_terms(
        g.group(),
        vec![K2Term { coef: Complex64::new(1.0, 0.0), left: g.clone(), right: h.clone() }],
    )
}

/// Approximate identity `K_n = g_n * g̃_n` with `g_n` a normalized centred box
/// whose half-width halves at every step, all supported in `U = (-u, u)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ApproximateIdentity {
    group: GroupSpec,
    radius: f64,
    base_half_nodes: u64,
}

impl ApproximateIdentity {
    /// `radius` is the half-width `u` of `U`; on finite groups it is measured
    /// in residues along every coordinate.
    pub fn new(group: &GroupSpec, radius: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::InvalidArgument("neighbourhood radius must be positive".into()));
        }
        // supp K_n = supp g_n - supp g_n = [-2r h, 2r h] must sit inside U
        let limit = radius / (2.0 * group.step());
        let mut r = 0u64;
        if limit > 1.0 {
            r = 1;
            while ((2 * r) as f64) < limit {
                r *= 2;
            }
        }
        if !group.is_finite() {
            if 2.0 * group.step() * r as f64 >= radius.min(group.half_width()) || 2 * r > group.max_node() as u64 {
                return Err(Error::WindowTooSmall(format!(
                    "neighbourhood radius {radius} does not fit the window of {group}"
                )));
            }
            if r == 0 {
                return Err(Error::ResolutionExhausted { step: 1 });
            }
        }
        Ok(ApproximateIdentity { group: group.clone(), radius, base_half_nodes: r })
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    /// Half-width of `g_n` in grid nodes.
    pub fn half_nodes(&self, n: usize) -> Result<u64> {
        if n == 0 {
            return Err(Error::InvalidArgument("approximate identity index starts at 1".into()));
        }
        let r = self.base_half_nodes.checked_shr((n - 1) as u32).unwrap_or(0);
        if r == 0 && !self.group.is_finite() {
            return Err(Error::ResolutionExhausted { step: n });
        }
        Ok(r)
    }

    /// Resolution scale `r_1 / r_n = 2^{n-1}`.
    pub fn scale(&self, n: usize) -> f64 {
        2f64.powi(n as i32 - 1)
    }

    pub fn generator(&self, n: usize) -> Result<CompactFunction> {
        let r = self.half_nodes(n)?;
        match &self.group {
            GroupSpec::Finite { orders } => {
                let radii: Vec<i64> = orders.iter().map(|&o| (r as i64).min((o as i64 - 1) / 2)).collect();
                let count: i64 = radii.iter().map(|r| 2 * r + 1).product();
                let v = Complex64::new(1.0 / count as f64, 0.0);
                CompactFunction::from_finite_fn(&self.group, |x| {
                    let inside = x.iter().zip(orders).zip(&radii).all(|((&xi, &o), &ri)| {
                        let d = xi.min(o as i64 - xi);
                        d <= ri
                    });
                    if inside {
                        v
                    } else {
                        ZERO
                    }
                })
            }
            GroupSpec::RealLine { step, .. } => {
                let r = r as i64;
                let v = Complex64::new(1.0 / ((2 * r + 1) as f64 * step), 0.0);
                CompactFunction::from_samples(&self.group, -r, vec![v; (2 * r + 1) as usize])
            }
        }
    }

    pub fn kernel(&self, n: usize) -> Result<K2Function> {
        let g = self.generator(n)?;
        k2_from_pair(&g, &g.tilde())
    }
}

/// `K_n` for the neighbourhood `(-u, u)`.
pub fn approximate_identity(group: &GroupSpec, u: f64, n: usize) -> Result<K2Function> {
    ApproximateIdentity::new(group, u)?.kernel(n)
}

/// Deterministic battery of rapidly decaying `K₂` functions used to certify
/// weak admissibility and to probe evaluations.
pub fn standard_battery(group: &GroupSpec) -> Result<Vec<K2Function>> {
    match group {
        GroupSpec::Finite { .. } => {
            let size = group.sample_count();
            let delta = K2Function::from_finite_values(group, {
                let mut v = vec![ZERO; size];
                v[0] = Complex64::new(1.0, 0.0);
                v
            })?;
            let ramp = K2Function::from_finite_values(
                group,
                (0..size).map(|i| Complex64::new(1.0 + i as f64, -(i as f64) * 0.5)).collect(),
            )?;
            Ok(vec![delta, ramp])
        }
        GroupSpec::RealLine { step, .. } => {
            let l = group.half_width();
            // a K2 Gaussian of width σ reaches about 11.4σ
            let fit = l / 12.0;
            let small = (8.0 * step).min(fit);
            let large = (64.0 * step).min(l / 16.0).max(small).min(fit);
            let shift_small = ((l - 12.0 * small) / 2.0 / step).floor() * step;
            let shift_large = ((l - 12.0 * large) / 2.0 / step).floor() * step;
            Ok(vec![
                K2Function::gaussian(group, 0.0, small)?,
                K2Function::gaussian(group, shift_small.max(0.0), small)?,
                K2Function::gaussian(group, 0.0, large)?,
                K2Function::gaussian(group, -shift_large.max(0.0), large)?,
            ])
        }
    }
}
