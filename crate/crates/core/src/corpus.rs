//! Named instances with known structure.
//!
//! Each [`CorpusEntry`] records what should be true of its instance; the
//! test suite checks every recorded property against the live code.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::CompactFunction;
use crate::group::{unit, GroupSpec, Point};
use crate::measure::{Atom, ConcreteMeasure, ScPart};
use crate::semimeasure::SemiMeasure;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Fractional part of the golden ratio.
pub const GOLDEN_FRACTION: f64 = 0.618_033_988_749_894_9;

fn real_line_only(group: &GroupSpec, what: &str) -> Result<()> {
    if group.is_finite() {
        return Err(Error::Unsupported(format!("{what} lives on the real line")));
    }
    Ok(())
}

/// Dual density sampled on the dual window of `group`.
fn dual_density(group: &GroupSpec, f: impl Fn(i64, f64) -> Complex64) -> Result<ConcreteMeasure> {
    let dual = group.dual();
    let n = dual.max_node();
    let h = dual.step();
    ConcreteMeasure::from_density(CompactFunction::from_samples(
        &dual,
        -n,
        (-n..=n).map(|k| f(k, k as f64 * h)).collect(),
    )?)
}

/// `ϑ(f) = ∫_0^∞ f̌`: dual density `1` on `ξ > 0`, `½` at `ξ = 0`, `0` below.
/// The endpoint `+L'` carries the whole Nyquist character.
pub fn heaviside(group: &GroupSpec) -> Result<SemiMeasure> {
    real_line_only(group, "the Heaviside semi-measure")?;
    SemiMeasure::from_dual(dual_density(group, |k, _| match k.signum() {
        1 => ONE,
        0 => Complex64::new(0.5, 0.0),
        _ => ZERO,
    })?)
}

/// Symmetric-excision principal value `p.v. ∫ f(t)/t dt`.
///
/// With `I(δ) = ∫_δ^L (f(t) − f(−t))/t dt` by the trapezoid rule on grid
/// nodes, the excised piece is `aδ + bδ³ + O(δ⁵)`. Richardson extrapolation
/// over `δ ∈ {h, 2h, 4h}` removes both terms.
pub fn principal_value(f: &CompactFunction) -> Result<Complex64> {
    real_line_only(f.group(), "principal values")?;
    let g = f.group();
    let h = g.step();
    let n = g.max_node();
    if n < 16 {
        return Err(Error::WindowTooSmall("window too short for the excision radii".into()));
    }
    let odd = |m: i64| (f.at_node(m) - f.at_node(-m)) / (m as f64 * h);
    let excised = |m0: i64| -> Complex64 {
        let mut acc = 0.5 * (odd(m0) + odd(n));
        for m in m0 + 1..n {
            acc += odd(m);
        }
        acc * h
    };
    Ok((16.0 * excised(1) - 10.0 * excised(2) + excised(4)) / 7.0)
}

/// `½ f(0) + (i/2π) p.v. ∫ f(t)/t dt`, the value of the Heaviside
/// semi-measure on `f`.
pub fn heaviside_closed_form(f: &CompactFunction) -> Result<Complex64> {
    Ok(0.5 * f.at_node(0) + Complex64::new(0.0, 1.0 / (2.0 * PI)) * principal_value(f)?)
}

/// `δ_t` through its transform `e^{−2πitξ} λ` sampled on the dual window.
pub fn delta_t(group: &GroupSpec, t: f64) -> Result<SemiMeasure> {
    real_line_only(group, "delta_t")?;
    if !group.in_window(t) {
        return Err(Error::OutsideWindow(format!("{t} is outside {group}")));
    }
    SemiMeasure::from_dual(dual_density(group, |_, xi| unit(-t * xi))?)
}

/// `δ_{aℤ}` through its transform `(1/a) δ_{ℤ/a}`: dual atoms at `j/a`
/// inside `[−L', L')`. Exact on the sampled window when `a` is a multiple of
/// `h` and divides `2L`.
pub fn dirac_comb(group: &GroupSpec, a: f64) -> Result<SemiMeasure> {
    real_line_only(group, "dirac_comb")?;
    if !(a > 0.0) {
        return Err(Error::InvalidArgument("comb spacing must be positive".into()));
    }
    SemiMeasure::from_dual(comb_atoms(&group.dual(), 0.0, 1.0 / a, Complex64::new(1.0 / a, 0.0))?)
}

/// Atoms `w·δ_{offset + j·spacing}` over `[−L', L')` of `dual`.
fn comb_atoms(dual: &GroupSpec, offset: f64, spacing: f64, w: Complex64) -> Result<ConcreteMeasure> {
    let l = dual.half_width();
    let lo = ((-l - offset) / spacing).ceil() as i64;
    let hi = ((l - offset) / spacing).ceil() as i64;
    let atoms = (lo..hi)
        .map(|j| offset + j as f64 * spacing)
        .filter(|x| *x >= -l && *x < l)
        .map(|x| (Point::Real(x), w))
        .collect();
    ConcreteMeasure::from_atoms(dual, atoms)
}

/// Unit comb on the subgroup `mℤ_N` of `ℤ_N` (as a measure).
pub fn finite_comb(group: &GroupSpec, m: u64) -> Result<ConcreteMeasure> {
    let GroupSpec::Finite { orders } = group else {
        return Err(Error::Unsupported("finite_comb lives on a cyclic group".into()));
    };
    let [n] = orders.as_slice() else {
        return Err(Error::Unsupported("finite_comb lives on a cyclic group".into()));
    };
    if m == 0 || n % m != 0 {
        return Err(Error::InvalidArgument(format!("{m} does not divide {n}")));
    }
    let w: Vec<Complex64> = (0..*n).map(|i| if i % m == 0 { ONE } else { ZERO }).collect();
    ConcreteMeasure::from_finite_weights(group, &w)
}

/// `Σ_{|n|≤N} e^{2πiαn} δ_n` on the real line.
pub fn weighted_comb(group: &GroupSpec, alpha: f64, n_terms: i64) -> Result<ConcreteMeasure> {
    real_line_only(group, "weighted_comb")?;
    if n_terms as f64 > group.half_width() {
        return Err(Error::WindowTooSmall(format!("{n_terms} teeth do not fit {group}")));
    }
    ConcreteMeasure::from_atoms(group, (-n_terms..=n_terms).map(|n| (Point::Real(n as f64), unit(alpha * n as f64))).collect())
}

/// `e^{2πiα·} δ_ℤ` through its transform `δ_{α+ℤ}` over `[−L', L')`.
pub fn modulated_comb(group: &GroupSpec, alpha: f64) -> Result<SemiMeasure> {
    real_line_only(group, "modulated_comb")?;
    SemiMeasure::from_dual(comb_atoms(&group.dual(), alpha, 1.0, ONE)?)
}

/// Thue–Morse Riesz product `Π_{j<level} (1 − cos 2π2^jξ)` sampled at
/// `M = 2^{level+1}` points of `[0, 1)` with weights `p(i/M)/M`, tagged
/// singular continuous. The weights sum to one.
pub fn sc_approximant_thue_morse(group: &GroupSpec, level: u32) -> Result<ConcreteMeasure> {
    real_line_only(group, "the Thue–Morse approximant")?;
    if level == 0 || level > 20 {
        return Err(Error::InvalidArgument("level must lie in 1..=20".into()));
    }
    if group.half_width() < 1.0 {
        return Err(Error::WindowTooSmall("the approximant needs [0, 1) inside the window".into()));
    }
    let m = 1u64 << (level + 1);
    let atoms: Vec<Atom> = (0..m)
        .filter_map(|i| {
            let x = i as f64 / m as f64;
            let p: f64 = (0..level).map(|j| 1.0 - (2.0 * PI * (1u64 << j) as f64 * x).cos()).product();
            let w = p / m as f64;
            (w.abs() > 1e-15).then(|| Atom::new(Point::Real(x), Complex64::new(w, 0.0)))
        })
        .collect();
    ConcreteMeasure::new(group, vec![], None, Some(ScPart { atoms, level }))
}

/// Dual `δ_{ℤ/a}/a` plus a Gaussian density `w·e^{−πξ²/s²}`: a periodic comb
/// with an absolutely continuous perturbation.
pub fn comb_plus_noise(group: &GroupSpec, a: f64, w: f64, s: f64) -> Result<SemiMeasure> {
    let comb = dirac_comb(group, a)?;
    let noise = dual_density(group, |_, xi| Complex64::new(w * (-PI * xi * xi / (s * s)).exp(), 0.0))?;
    SemiMeasure::from_dual(comb.dual_measure().add(&noise)?)
}

/// Dual `δ₀ + λ`, i.e. `ϑ = 1 + δ₀`.
pub fn lebesgue_plus_atom(group: &GroupSpec) -> Result<SemiMeasure> {
    let dual = group.dual();
    SemiMeasure::from_dual(ConcreteMeasure::dirac(&dual, dual.zero())?.add(&ConcreteMeasure::haar(&dual)?)?)
}

/// Which Lebesgue components the dual measure carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartStructure {
    pub pp: bool,
    pub ac: bool,
    pub sc: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedAtom {
    pub chi: Point,
    pub coef: Complex64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExpectedProperties {
    pub positive_definite: bool,
    pub is_measure: bool,
    /// Every Fourier–Bohr coefficient, in canonical order.
    pub fb_atoms: Vec<ExpectedAtom>,
    pub parts: PartStructure,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub description: String,
    pub group: GroupSpec,
    pub params: serde_json::Value,
    /// `None` for entries that are plain measures rather than semi-measures.
    pub expected: Option<ExpectedProperties>,
}

/// A built corpus instance.
#[derive(Clone, Debug, PartialEq)]
pub enum CorpusObject {
    SemiMeasure(SemiMeasure),
    Measure(ConcreteMeasure),
}

pub fn fine_line() -> GroupSpec {
    GroupSpec::real_line(16.0, 1.0 / 64.0).expect("valid group")
}

pub fn coarse_line() -> GroupSpec {
    GroupSpec::real_line(16.0, 1.0 / 16.0).expect("valid group")
}

fn atoms_of(points: impl IntoIterator<Item = (f64, f64)>) -> Vec<ExpectedAtom> {
    points.into_iter().map(|(x, w)| ExpectedAtom { chi: Point::Real(x), coef: Complex64::new(w, 0.0) }).collect()
}

/// Every named instance with its default group and parameters.
pub fn list() -> Vec<CorpusEntry> {
    let ac = PartStructure { pp: false, ac: true, sc: false };
    let pp = PartStructure { pp: true, ac: false, sc: false };
    let pp_ac = PartStructure { pp: true, ac: true, sc: false };
    let integers = |l: i64| atoms_of((-l..l).map(|j| (j as f64, 1.0)));
    let alpha = GOLDEN_FRACTION;
    vec![
        CorpusEntry {
            name: "heaviside".into(),
            description: "f ↦ ∫_0^∞ f̌: positive definite, not a measure".into(),
            group: fine_line(),
            params: serde_json::json!({}),
            expected: Some(ExpectedProperties { positive_definite: true, is_measure: false, fb_atoms: vec![], parts: ac }),
        },
        CorpusEntry {
            name: "delta_0".into(),
            description: "δ_0 with transform λ".into(),
            group: fine_line(),
            params: serde_json::json!({"t": 0.0}),
            expected: Some(ExpectedProperties { positive_definite: true, is_measure: true, fb_atoms: vec![], parts: ac }),
        },
        CorpusEntry {
            name: "delta_quarter".into(),
            description: "δ_{1/4} with transform e^{−πiξ/2} λ".into(),
            group: fine_line(),
            params: serde_json::json!({"t": 0.25}),
            expected: Some(ExpectedProperties { positive_definite: false, is_measure: true, fb_atoms: vec![], parts: ac }),
        },
        CorpusEntry {
            name: "dirac_comb".into(),
            description: "δ_ℤ with transform δ_ℤ".into(),
            group: coarse_line(),
            params: serde_json::json!({"a": 1.0}),
            expected: Some(ExpectedProperties { positive_definite: true, is_measure: true, fb_atoms: integers(8), parts: pp }),
        },
        CorpusEntry {
            name: "finite_comb".into(),
            description: "unit comb on 3ℤ_12, transform 1/3 on the annihilator".into(),
            group: GroupSpec::finite(vec![12]).expect("valid group"),
            params: serde_json::json!({"m": 3}),
            expected: Some(ExpectedProperties {
                positive_definite: true,
                is_measure: true,
                fb_atoms: [0, 4, 8]
                    .iter()
                    .map(|&k| ExpectedAtom { chi: Point::Residues(vec![k]), coef: Complex64::new(1.0 / 3.0, 0.0) })
                    .collect(),
                parts: pp,
            }),
        },
        CorpusEntry {
            name: "modulated_comb".into(),
            description: "e^{2πiα·} δ_ℤ with α the golden fraction".into(),
            group: coarse_line(),
            params: serde_json::json!({"alpha": alpha}),
            expected: Some(ExpectedProperties {
                positive_definite: true,
                is_measure: true,
                fb_atoms: atoms_of((-9..8).map(|k| (alpha + k as f64, 1.0)).filter(|(x, _)| (-8.0..8.0).contains(x))),
                parts: pp,
            }),
        },
        CorpusEntry {
            name: "thue_morse".into(),
            description: "Thue–Morse Riesz-product approximant as a tagged singular continuous dual".into(),
            group: coarse_line(),
            params: serde_json::json!({"level": 4}),
            expected: Some(ExpectedProperties {
                positive_definite: true,
                is_measure: true,
                fb_atoms: vec![],
                parts: PartStructure { pp: false, ac: false, sc: true },
            }),
        },
        CorpusEntry {
            name: "comb_plus_noise".into(),
            description: "δ_ℤ plus a Gaussian absolutely continuous dual perturbation".into(),
            group: coarse_line(),
            params: serde_json::json!({"a": 1.0, "w": 0.5, "s": 1.0}),
            expected: Some(ExpectedProperties { positive_definite: true, is_measure: true, fb_atoms: integers(8), parts: pp_ac }),
        },
        CorpusEntry {
            name: "lebesgue_plus_atom".into(),
            description: "1 + δ_0, transform δ_0 + λ".into(),
            group: coarse_line(),
            params: serde_json::json!({}),
            expected: Some(ExpectedProperties {
                positive_definite: true,
                is_measure: true,
                fb_atoms: atoms_of([(0.0, 1.0)]),
                parts: pp_ac,
            }),
        },
        CorpusEntry {
            name: "weighted_comb".into(),
            description: "Σ_{|n|≤1000} e^{2πiαn} δ_n with α the golden fraction (a measure)".into(),
            group: GroupSpec::real_line(1024.0, 1.0 / 16.0).expect("valid group"),
            params: serde_json::json!({"alpha": alpha, "N": 1000}),
            expected: None,
        },
        CorpusEntry {
            name: "thue_morse_measure".into(),
            description: "Thue–Morse Riesz-product approximant at level 4 (a measure)".into(),
            group: coarse_line().dual(),
            params: serde_json::json!({"level": 4}),
            expected: None,
        },
    ]
}

pub fn entry(name: &str) -> Result<CorpusEntry> {
    list()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| Error::InvalidArgument(format!("no corpus entry named {name:?}")))
}

fn param(entry: &CorpusEntry, key: &str) -> Result<f64> {
    entry.params[key]
        .as_f64()
        .ok_or_else(|| Error::InvalidArgument(format!("corpus entry {} lacks numeric {key}", entry.name)))
}

/// Builds the entry `name` on its default group.
pub fn build(name: &str) -> Result<CorpusObject> {
    let e = entry(name)?;
    build_on(&e, &e.group)
}

/// Builds an entry on another group.
pub fn build_on(e: &CorpusEntry, group: &GroupSpec) -> Result<CorpusObject> {
    use CorpusObject::{Measure, SemiMeasure as Sm};
    Ok(match e.name.as_str() {
        "heaviside" => Sm(heaviside(group)?),
        "delta_0" | "delta_quarter" => Sm(delta_t(group, param(e, "t")?)?),
        "dirac_comb" => Sm(dirac_comb(group, param(e, "a")?)?),
        "finite_comb" => Sm(SemiMeasure::lift(&finite_comb(group, param(e, "m")? as u64)?)?),
        "modulated_comb" => Sm(modulated_comb(group, param(e, "alpha")?)?),
        "thue_morse" => {
            let nu = sc_approximant_thue_morse(&group.dual(), param(e, "level")? as u32)?;
            Sm(SemiMeasure::from_dual(nu)?)
        }
        "comb_plus_noise" => Sm(comb_plus_noise(group, param(e, "a")?, param(e, "w")?, param(e, "s")?)?),
        "lebesgue_plus_atom" => Sm(lebesgue_plus_atom(group)?),
        "weighted_comb" => Measure(weighted_comb(group, param(e, "alpha")?, param(e, "N")? as i64)?),
        "thue_morse_measure" => Measure(sc_approximant_thue_morse(group, param(e, "level")? as u32)?),
        other => return Err(Error::InvalidArgument(format!("no corpus entry named {other:?}"))),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::funcspace::K2Function;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn thue_morse_level_one() {
        let g = GroupSpec::real_line(2.0, 1.0 / 8.0).unwrap();
        let m = sc_approximant_thue_morse(&g, 1).unwrap();
        let sc = m.sc_part().unwrap();
        let w: Vec<f64> = sc.atoms.iter().map(|a| a.weight.re).collect();
        assert_eq!(w.len(), 3);
        for (a, b) in w.iter().zip([0.25, 0.5, 0.25]) {
            assert!((a - b).abs() < 1e-15);
        }
        for level in 1..8 {
            let m = sc_approximant_thue_morse(&g, level).unwrap();
            assert!((m.total_mass() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn principal_value_of_shifted_gaussian() {
        // p.v.∫ e^{−(t−c)²}/t dt = 2√π D(c), D the Dawson function; D(0.5) below
        let g = GroupSpec::real_line(16.0, 1.0 / 64.0).unwrap();
        let f = CompactFunction::gaussian(&g, 0.5, std::f64::consts::FRAC_1_SQRT_2, 12.0).unwrap();
        let pv = principal_value(&f).unwrap();
        let dawson_half = 0.424_436_383_502_022_6;
        assert!((pv.re - 2.0 * PI.sqrt() * dawson_half).abs() < 1e-6, "{pv}");
    }

    #[test]
    fn delta_t_evaluates_point() {
        let g = GroupSpec::real_line(8.0, 1.0 / 32.0).unwrap();
        let f = K2Function::bump_pair(&g, 0.1, 1.0).unwrap();
        for t in [0.0, 0.25, -1.5] {
            let sm = delta_t(&g, t).unwrap();
            let want = f.realized().value_at(&Point::Real(t)).unwrap();
            assert!((sm.evaluate(&f).unwrap() - want).norm() < 1e-9);
        }
    }

    #[test]
    fn finite_comb_has_annihilator_dual() {
        let g = GroupSpec::finite(vec![12]).unwrap();
        let mu = finite_comb(&g, 3).unwrap();
        let w = mu.fourier_transform().unwrap().finite_weights().unwrap();
        for (k, v) in w.iter().enumerate() {
            let want = if k % 4 == 0 { 1.0 / 3.0 } else { 0.0 };
            assert!((v - c(want, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn every_entry_builds() {
        for e in list() {
            let obj = build(&e.name).unwrap();
            match (&obj, &e.expected) {
                (CorpusObject::SemiMeasure(_), Some(_)) | (CorpusObject::Measure(_), None) => {}
                _ => panic!("{} builds the wrong kind", e.name),
            }
        }
        assert!(build("nope").is_err());
    }
}
