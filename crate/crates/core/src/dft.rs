//! Grid transforms shared by both backends.
//!
//! `to_dual(group, v, sign)` returns `Σ_x v_x · χ(x)^sign` for every sampled
//! character `χ` of `group`, with `v` given per sample index of `group` and
//! the output indexed per sample index of `dual(group)`. Haar weights are the
//! caller's business.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

use crate::group::GroupSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Sign {
    /// `χ(x)‾`, i.e. the forward transform.
    Minus,
    /// `χ(x)`.
    Plus,
}

impl Sign {
    fn direction(self) -> FftDirection {
        match self {
            Sign::Minus => FftDirection::Forward,
            Sign::Plus => FftDirection::Inverse,
        }
    }
}

pub(crate) fn to_dual(group: &GroupSpec, values: &[Complex64], sign: Sign) -> Vec<Complex64> {
    assert_eq!(values.len(), group.sample_count());
    match group {
        GroupSpec::Finite { orders } => {
            let mut buf = values.to_vec();
            finite_fft(orders, &mut buf, sign);
            buf
        }
        GroupSpec::RealLine { nodes, .. } => {
            let n = *nodes as i64;
            let period = group.period_nodes();
            let mut buf = vec![Complex64::new(0.0, 0.0); period];
            for (i, v) in values.iter().enumerate() {
                let m = i as i64 - n;
                buf[m.rem_euclid(period as i64) as usize] += v;
            }
            let fft = FftPlanner::new().plan_fft(period, sign.direction());
            fft.process(&mut buf);
            (-n..=n).map(|k| buf[k.rem_euclid(period as i64) as usize]).collect()
        }
    }
}

/// Unnormalized multi-dimensional DFT over `Z_{n_1} × … × Z_{n_k}` in
/// row-major layout.
fn finite_fft(orders: &[u64], buf: &mut [Complex64], sign: Sign) {
    let mut planner = FftPlanner::new();
    let total = buf.len();
    let mut stride = total;
    for &n in orders {
        let n = n as usize;
        stride /= n;
        if n == 1 {
            continue;
        }
        let fft = planner.plan_fft(n, sign.direction());
        let block = n * stride;
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for outer in (0..total).step_by(block) {
            for inner in 0..stride {
                for (j, slot) in line.iter_mut().enumerate() {
                    *slot = buf[outer + j * stride + inner];
                }
                fft.process(&mut line);
                for (j, v) in line.iter().enumerate() {
                    buf[outer + j * stride + inner] = *v;
                }
            }
        }
    }
}

/// Linear convolution of two sample sequences (no weights applied).
pub(crate) fn linear_convolve(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let len = a.len() + b.len() - 1;
    if a.len().min(b.len()) <= 32 || a.len() * b.len() <= 1 << 14 {
        let mut out = vec![Complex64::new(0.0, 0.0); len];
        for (i, x) in a.iter().enumerate() {
            if *x == Complex64::new(0.0, 0.0) {
                continue;
            }
            for (j, y) in b.iter().enumerate() {
                out[i + j] += x * y;
            }
        }
        return out;
    }
    let size = len.next_power_of_two();
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(size);
    let inv = planner.plan_fft_inverse(size);
    let mut fa = a.to_vec();
    fa.resize(size, Complex64::new(0.0, 0.0));
    let mut fb = b.to_vec();
    fb.resize(size, Complex64::new(0.0, 0.0));
    fwd.process(&mut fa);
    fwd.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inv.process(&mut fa);
    let scale = 1.0 / size as f64;
    fa.truncate(len);
    fa.iter_mut().for_each(|x| *x *= scale);
    fa
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{character_eval, GroupSpec};

    #[test]
    fn finite_transform_matches_direct_sum() {
        let g = GroupSpec::finite(vec![3, 4, 2]).unwrap();
        let vals: Vec<Complex64> = (0..g.sample_count())
            .map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos()))
            .collect();
        let fast = to_dual(&g, &vals, Sign::Plus);
        for k in 0..g.sample_count() {
            let chi = g.point_at(k);
            let direct: Complex64 = (0..g.sample_count())
                .map(|x| vals[x] * character_eval(&g, &chi, &g.point_at(x)).unwrap())
                .sum();
            assert!((direct - fast[k]).norm() < 1e-12);
        }
    }

    #[test]
    fn real_line_transform_matches_direct_sum() {
        let g = GroupSpec::real_line(2.0, 0.25).unwrap();
        let vals: Vec<Complex64> = (0..g.sample_count()).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let d = g.dual();
        let fast = to_dual(&g, &vals, Sign::Minus);
        for k in 0..d.sample_count() {
            let chi = d.point_at(k);
            let direct: Complex64 = (0..g.sample_count())
                .map(|x| vals[x] * character_eval(&g, &chi, &g.point_at(x)).unwrap().conj())
                .sum();
            assert!((direct - fast[k]).norm() < 1e-10, "k={k}");
        }
    }

    #[test]
    fn fft_convolution_matches_direct() {
        let a: Vec<Complex64> = (0..300).map(|i| Complex64::new((i as f64 * 0.1).sin(), 0.0)).collect();
        let b: Vec<Complex64> = (0..200).map(|i| Complex64::new(1.0, i as f64 * 0.01)).collect();
        let fast = linear_convolve(&a, &b);
        let mut slow = vec![Complex64::new(0.0, 0.0); 499];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                slow[i + j] += x * y;
            }
        }
        for (x, y) in fast.iter().zip(&slow) {
            assert!((x - y).norm() < 1e-9);
        }
    }
}
