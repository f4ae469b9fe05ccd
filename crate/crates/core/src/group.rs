//! Concrete abelian groups: finite products of cyclic groups and a windowed,
//! uniformly sampled real line.
//!
//! A `RealLine` group is stored as a step `h` and a node count `n` with
//! window half-width `L = n·h`. Grid nodes are `m·h` for `|m| ≤ n`. Characters
//! are sampled on that grid, so the dual window `[-1/(2h), 1/(2h)]` is one full
//! period of frequency space and its two end points name the same character.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::funcspace::CompactFunction;

/// Tolerance used when snapping a real coordinate onto the grid, in units of
/// the step.
pub(crate) const GRID_SNAP: f64 = 1e-9;

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(try_from = "RawGroupSpec", into = "RawGroupSpec")]
pub enum GroupSpec {
    /// `Z_{n_1} × … × Z_{n_k}` with counting Haar measure.
    Finite { orders: Vec<u64> },
    /// `[-n·step, n·step]` sampled with the given step; Haar weight `step`
    /// per node (half weight at the two window ends).
    RealLine { nodes: u64, step: f64 },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum RawGroupSpec {
    Finite {
        orders: Vec<u64>,
    },
    RealLine {
        #[serde(rename = "L")]
        half_width: f64,
        #[serde(rename = "h")]
        step: f64,
    },
}

impl TryFrom<RawGroupSpec> for GroupSpec {
    type Error = Error;

    fn try_from(raw: RawGroupSpec) -> Result<Self> {
        match raw {
            RawGroupSpec::Finite { orders } => GroupSpec::finite(orders),
            RawGroupSpec::RealLine { half_width, step } => GroupSpec::real_line(half_width, step),
        }
    }
}

impl From<GroupSpec> for RawGroupSpec {
    fn from(g: GroupSpec) -> Self {
        match g {
            GroupSpec::Finite { orders } => RawGroupSpec::Finite { orders },
            GroupSpec::RealLine { nodes, step } => RawGroupSpec::RealLine {
                half_width: nodes as f64 * step,
                step,
            },
        }
    }
}

impl PartialEq for GroupSpec {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (GroupSpec::Finite { orders: a }, GroupSpec::Finite { orders: b }) => a == b,
            (GroupSpec::RealLine { nodes: n1, step: h1 }, GroupSpec::RealLine { nodes: n2, step: h2 }) => {
                n1 == n2 && (h1 - h2).abs() <= 1e-12 * h1.abs().max(h2.abs())
            }
            _ => false,
        }
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Finite { orders } => {
                let parts: Vec<String> = orders.iter().map(|n| format!("Z_{n}")).collect();
                write!(f, "{}", parts.join(" x "))
            }
            GroupSpec::RealLine { .. } => {
                write!(f, "R[L={}, h={}]", self.half_width(), self.step())
            }
        }
    }
}

impl GroupSpec {
    pub fn finite(orders: Vec<u64>) -> Result<Self> {
        if orders.is_empty() {
            return Err(Error::InvalidGroup("finite group needs at least one factor".into()));
        }
        if orders.contains(&0) {
            return Err(Error::InvalidGroup("cyclic orders must be >= 1".into()));
        }
        let size = orders
            .iter()
            .try_fold(1u64, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::InvalidGroup("group order overflows u64".into()))?;
        if size > (1 << 26) {
            return Err(Error::InvalidGroup(format!("group of order {size} is too large")));
        }
        Ok(GroupSpec::Finite { orders })
    }

    /// Window `[-half_width, half_width]` sampled with `step`. The ratio
    /// `half_width / step` must be an integer.
    pub fn real_line(half_width: f64, step: f64) -> Result<Self> {
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGroup(format!("window half-width must be positive, got {half_width}")));
        }
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidGroup(format!("step must be positive, got {step}")));
        }
        let ratio = half_width / step;
        let nodes = ratio.round();
        if nodes < 1.0 || (ratio - nodes).abs() > 1e-9 * nodes.max(1.0) {
            return Err(Error::InvalidGroup(format!(
                "L/h must be a positive integer, got {half_width}/{step} = {ratio}"
            )));
        }
        if nodes > (1u64 << 26) as f64 {
            return Err(Error::InvalidGroup(format!("{nodes} grid nodes is too many")));
        }
        Ok(GroupSpec::RealLine { nodes: nodes as u64, step })
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupSpec::Finite { .. })
    }

    /// Number of stored sample points: `|G|` for finite groups, `2n + 1`
    /// grid nodes for the real line.
    pub fn sample_count(&self) -> usize {
        match self {
            GroupSpec::Finite { orders } => orders.iter().product::<u64>() as usize,
            GroupSpec::RealLine { nodes, .. } => 2 * *nodes as usize + 1,
        }
    }

    /// `|G|` for finite groups.
    pub fn order(&self) -> Option<u64> {
        match self {
            GroupSpec::Finite { orders } => Some(orders.iter().product()),
            GroupSpec::RealLine { .. } => None,
        }
    }

    /// Grid step `h` (1 for finite groups).
    pub fn step(&self) -> f64 {
        match self {
            GroupSpec::Finite { .. } => 1.0,
            GroupSpec::RealLine { step, .. } => *step,
        }
    }

    /// Window half-width `L` (real line only; 0 for finite groups).
    pub fn half_width(&self) -> f64 {
        match self {
            GroupSpec::Finite { .. } => 0.0,
            GroupSpec::RealLine { nodes, step } => *nodes as f64 * step,
        }
    }

    /// Largest node index `n` of the real-line window.
    pub fn max_node(&self) -> i64 {
        match self {
            GroupSpec::Finite { .. } => 0,
            GroupSpec::RealLine { nodes, .. } => *nodes as i64,
        }
    }

    /// Period length in nodes of sampled characters (`2n`) on the real line.
    pub(crate) fn period_nodes(&self) -> usize {
        2 * self.max_node() as usize
    }

    /// Reciprocal grid: finite groups are self-dual under this encoding,
    /// `RealLine(L, h) ↦ RealLine(1/(2h), 1/(2L))`.
    pub fn dual(&self) -> GroupSpec {
        match self {
            GroupSpec::Finite { orders } => GroupSpec::Finite { orders: orders.clone() },
            GroupSpec::RealLine { nodes, step } => GroupSpec::RealLine {
                nodes: *nodes,
                step: 1.0 / (2.0 * *nodes as f64 * step),
            },
        }
    }

    pub fn same_as(&self, other: &GroupSpec) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch(format!("{self} vs {other}")))
        }
    }

    /// Haar weight of grid node `m` (real line) or of any element (finite).
    pub fn node_weight(&self, m: i64) -> f64 {
        match self {
            GroupSpec::Finite { .. } => 1.0,
            GroupSpec::RealLine { nodes, step } => {
                if m.unsigned_abs() == *nodes {
                    0.5 * step
                } else {
                    *step
                }
            }
        }
    }

    /// Nearest grid node of a real coordinate, if it lies on the grid.
    pub fn node_of(&self, t: f64) -> Option<i64> {
        let h = self.step();
        let m = (t / h).round();
        if (t / h - m).abs() <= GRID_SNAP && m.abs() <= self.max_node() as f64 {
            Some(m as i64)
        } else {
            None
        }
    }

    pub fn in_window(&self, t: f64) -> bool {
        t.abs() <= self.half_width() * (1.0 + 1e-12)
    }

    /// Row-major index of a residue tuple (finite groups).
    pub fn index_of(&self, residues: &[i64]) -> usize {
        let GroupSpec::Finite { orders } = self else {
            panic!("index_of on a real-line group");
        };
        let mut idx = 0usize;
        for (&r, &n) in residues.iter().zip(orders) {
            idx = idx * n as usize + r.rem_euclid(n as i64) as usize;
        }
        idx
    }

    pub fn residues_of(&self, mut idx: usize) -> Vec<i64> {
        let GroupSpec::Finite { orders } = self else {
            panic!("residues_of on a real-line group");
        };
        let mut out = vec![0i64; orders.len()];
        for (slot, &n) in out.iter_mut().zip(orders).rev() {
            *slot = (idx % n as usize) as i64;
            idx /= n as usize;
        }
        out
    }

    /// Index of `a + b` (finite groups, row-major indices).
    pub(crate) fn add_indices(&self, a: usize, b: usize) -> usize {
        let ra = self.residues_of(a);
        let rb = self.residues_of(b);
        let sum: Vec<i64> = ra.iter().zip(&rb).map(|(x, y)| x + y).collect();
        self.index_of(&sum)
    }

    /// Index of `-a` (finite groups).
    pub(crate) fn neg_index(&self, a: usize) -> usize {
        let ra: Vec<i64> = self.residues_of(a).into_iter().map(|x| -x).collect();
        self.index_of(&ra)
    }

    /// Canonical form of a point: residues reduced, real points checked
    /// against the window.
    pub fn normalize_point(&self, p: &Point) -> Result<Point> {
        match (self, p) {
            (GroupSpec::Finite { orders }, Point::Residues(r)) => {
                if r.len() != orders.len() {
                    return Err(Error::GroupMismatch(format!(
                        "point has {} coordinates, group {} has {}",
                        r.len(),
                        self,
                        orders.len()
                    )));
                }
                Ok(Point::Residues(
                    r.iter().zip(orders).map(|(&x, &n)| x.rem_euclid(n as i64)).collect(),
                ))
            }
            (GroupSpec::RealLine { .. }, Point::Real(t)) => {
                if !t.is_finite() || !self.in_window(*t) {
                    return Err(Error::OutsideWindow(format!("{t} not in {self}")));
                }
                Ok(Point::Real(*t))
            }
            _ => Err(Error::GroupMismatch(format!("point {p:?} does not belong to {self}"))),
        }
    }

    /// The point stored at sample index `i` (finite: row-major index;
    /// real line: node `i - n`).
    pub fn point_at(&self, i: usize) -> Point {
        match self {
            GroupSpec::Finite { .. } => Point::Residues(self.residues_of(i)),
            GroupSpec::RealLine { nodes, step } => Point::Real((i as i64 - *nodes as i64) as f64 * step),
        }
    }

    pub fn zero(&self) -> Point {
        match self {
            GroupSpec::Finite { orders } => Point::Residues(vec![0; orders.len()]),
            GroupSpec::RealLine { .. } => Point::Real(0.0),
        }
    }
}

/// A group element or a character. Finite groups use residue tuples, the
/// real line uses a coordinate (time or frequency).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Point {
    Residues(Vec<i64>),
    Real(f64),
}

/// Characters are indexed by the same encoding as group points.
pub type DualPoint = Point;

impl Point {
    pub fn real(&self) -> Option<f64> {
        match self {
            Point::Real(t) => Some(*t),
            Point::Residues(_) => None,
        }
    }

    pub fn residues(&self) -> Option<&[i64]> {
        match self {
            Point::Residues(r) => Some(r),
            Point::Real(_) => None,
        }
    }

    /// Lexicographic comparison used for canonical atom ordering.
    pub(crate) fn cmp_lex(&self, other: &Point) -> std::cmp::Ordering {
        match (self, other) {
            (Point::Residues(a), Point::Residues(b)) => a.cmp(b),
            (Point::Real(a), Point::Real(b)) => a.total_cmp(b),
            (Point::Residues(_), Point::Real(_)) => std::cmp::Ordering::Less,
            (Point::Real(_), Point::Residues(_)) => std::cmp::Ordering::Greater,
        }
    }

    pub(crate) fn close_to(&self, other: &Point, tol: f64) -> bool {
        match (self, other) {
            (Point::Residues(a), Point::Residues(b)) => a == b,
            (Point::Real(a), Point::Real(b)) => (a - b).abs() <= tol,
            _ => false,
        }
    }

    pub(crate) fn negated(&self, group: &GroupSpec) -> Point {
        match self {
            Point::Residues(r) => {
                let GroupSpec::Finite { orders } = group else { unreachable!() };
                Point::Residues(r.iter().zip(orders).map(|(&x, &n)| (-x).rem_euclid(n as i64)).collect())
            }
            Point::Real(t) => Point::Real(-t),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Residues(r) => write!(f, "{r:?}"),
            Point::Real(t) => write!(f, "{t}"),
        }
    }
}

#[inline]
pub(crate) fn unit(turns: f64) -> Complex64 {
    let phase = TAU * (turns - turns.round());
    Complex64::new(phase.cos(), phase.sin())
}

/// Phase in turns of the finite character `k` at `t` (both row-major
/// indices).
pub(crate) fn finite_turns(orders: &[u64], k: &[i64], t: &[i64]) -> f64 {
    let mut turns = 0.0;
    for ((&n, &a), &b) in orders.iter().zip(k).zip(t) {
        let n = n as i64;
        let prod = (a.rem_euclid(n) as i128 * b.rem_euclid(n) as i128).rem_euclid(n as i128);
        turns += prod as f64 / n as f64;
    }
    turns.fract()
}

/// `χ(t)`: `exp(2πi Σ k_j t_j / n_j)` on finite groups, `exp(2πi ξ t)` on
/// the real line. `group` is the group `t` lives in.
pub fn character_eval(group: &GroupSpec, chi: &DualPoint, t: &Point) -> Result<Complex64> {
    match (group, chi, t) {
        (GroupSpec::Finite { orders }, Point::Residues(k), Point::Residues(x)) => {
            if k.len() != orders.len() || x.len() != orders.len() {
                return Err(Error::GroupMismatch("coordinate count differs from group rank".into()));
            }
            Ok(unit(finite_turns(orders, k, x)))
        }
        (GroupSpec::RealLine { .. }, Point::Real(xi), Point::Real(x)) => Ok(unit(xi * x)),
        _ => Err(Error::GroupMismatch(format!("character {chi} / point {t} do not match {group}"))),
    }
}

/// `∫ f dθ_G`: counting sum on finite groups, `h·Σ f(m h)` on the real line
/// with half weights at the two window ends.
pub fn haar_integrate(f: &CompactFunction) -> Complex64 {
    let g = f.group();
    f.nodes().map(|(m, v)| v * g.node_weight(m)).sum()
}

/// Nested averaging sets `A_1 ⊆ A_2 ⊆ …`. On the real line these are the
/// intervals `[-r_n, r_n]`, on finite groups the whole group.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VanHoveSequence {
    group: GroupSpec,
    /// Node radii `m_n` with `r_n = m_n·h` (empty for finite groups).
    radii: Vec<i64>,
    steps: usize,
}

impl VanHoveSequence {
    /// `steps` dyadically growing intervals ending at the window:
    /// `r_k = L·2^{k-steps}` snapped to the grid.
    pub fn dyadic(group: &GroupSpec, steps: usize) -> Result<Self> {
        if steps == 0 {
            return Err(Error::InvalidArgument("van Hove sequence needs at least one set".into()));
        }
        match group {
            GroupSpec::Finite { .. } => Ok(VanHoveSequence { group: group.clone(), radii: vec![], steps }),
            GroupSpec::RealLine { nodes, .. } => {
                let n = *nodes as f64;
                let radii: Vec<i64> = (1..=steps)
                    .map(|k| (n * 2f64.powi(k as i32 - steps as i32)).round() as i64)
                    .collect();
                Self::from_node_radii(group, radii)
            }
        }
    }

    /// Intervals with the given node radii, which must increase strictly and
    /// stay inside the window.
    pub fn from_node_radii(group: &GroupSpec, radii: Vec<i64>) -> Result<Self> {
        if group.is_finite() {
            let steps = radii.len().max(1);
            return Ok(VanHoveSequence { group: group.clone(), radii: vec![], steps });
        }
        if radii.is_empty() || radii[0] < 1 {
            return Err(Error::InvalidArgument("van Hove radii must be at least one step".into()));
        }
        if radii.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidArgument("van Hove radii must increase strictly".into()));
        }
        if *radii.last().unwrap() > group.max_node() {
            return Err(Error::WindowTooSmall(format!(
                "averaging radius {} exceeds the window {}",
                *radii.last().unwrap() as f64 * group.step(),
                group.half_width()
            )));
        }
        let steps = radii.len();
        Ok(VanHoveSequence { group: group.clone(), radii, steps })
    }

    pub fn group(&self) -> &GroupSpec {
        &self.group
    }

    pub fn len(&self) -> usize {
        self.steps
    }

    pub fn is_empty(&self) -> bool {
        self.steps == 0
    }

    /// Radius `r_n` (1-based `n`); `None` on finite groups.
    pub fn radius(&self, n: usize) -> Option<f64> {
        self.radii.get(n.checked_sub(1)?).map(|&m| m as f64 * self.group.step())
    }

    /// `|A_n|`.
    pub fn measure(&self, n: usize) -> f64 {
        match &self.group {
            GroupSpec::Finite { .. } => self.group.sample_count() as f64,
            GroupSpec::RealLine { step, .. } => 2.0 * self.radii[n - 1] as f64 * step,
        }
    }

    /// `|∂^K A_n| / |A_n|` for a compact set of diameter `diam`.
    pub fn boundary_ratio(&self, n: usize, diam: f64) -> f64 {
        match &self.group {
            GroupSpec::Finite { .. } => 0.0,
            GroupSpec::RealLine { .. } => (2.0 * diam / self.measure(n)).min(1.0),
        }
    }

    /// `(1/|A_n|) ∫_{A_n + s} f` with `s` given in grid nodes (ignored on
    /// finite groups, where every shift of the whole group is the group).
    pub fn average(&self, f: &CompactFunction, n: usize, shift: i64) -> Result<Complex64> {
        self.group.same_as(f.group())?;
        if n == 0 || n > self.steps {
            return Err(Error::InvalidArgument(format!("averaging step {n} outside 1..={}", self.steps)));
        }
        match &self.group {
            GroupSpec::Finite { .. } => {
                let total: Complex64 = f.nodes().map(|(_, v)| v).sum();
                Ok(total / self.group.sample_count() as f64)
            }
            GroupSpec::RealLine { step, .. } => {
                let r = self.radii[n - 1];
                let (lo, hi) = (shift - r, shift + r);
                if lo < -self.group.max_node() || hi > self.group.max_node() {
                    return Err(Error::WindowTooSmall(format!(
                        "averaging set A_{n} + {} leaves the window",
                        shift as f64 * step
                    )));
                }
                let mut acc = Complex64::new(0.0, 0.0);
                for m in lo..=hi {
                    let w = if m == lo || m == hi { 0.5 } else { 1.0 };
                    acc += f.at_node(m) * w;
                }
                Ok(acc * *step / self.measure(n))
            }
        }
    }
}
