// SPDX-License-Identifier: Apache-2.0

//! Globally adaptive Gauss–Kronrod (7/15) quadrature over a partition of
//! panels.
//!
//! Callers supply every point where the integrand has a kink or a change
//! of scale; the initial panels are never merged, only bisected, so
//! discontinuities at supplied knots do not cost refinement.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_evals: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-6,
            abs_tol: 0.0,
            max_evals: 2_000_000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Panel {
    pub lo: f64,
    pub hi: f64,
    pub value: f64,
    pub error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

#[derive(Debug, Clone)]
pub struct QuadResult {
    pub value: f64,
    pub abs_error: f64,
    pub evaluations: usize,
    pub converged: bool,
    /// Final panels in ascending order.
    pub panels: Vec<Panel>,
}

fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64) -> Panel {
    let center = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        lo,
        hi,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Integrates `f` over `[knots[0], knots[last]]`.
///
/// `knots` must be finite and strictly ascending with at least two entries.
pub fn integrate<F: Fn(f64) -> f64>(f: F, knots: &[f64], opts: QuadOptions) -> Result<QuadResult> {
    if knots.len() < 2 {
        return Err(Error::domain("quadrature needs at least two knots"));
    }
    if knots.windows(2).any(|w| !(w[1] > w[0])) || knots.iter().any(|k| !k.is_finite()) {
        return Err(Error::domain("quadrature knots must be finite and strictly ascending"));
    }

    let mut heap = BinaryHeap::with_capacity(knots.len() * 2);
    let mut value = 0.0;
    let mut error = 0.0;
    let mut evaluations = 0;
    for w in knots.windows(2) {
        let p = gauss_kronrod(&f, w[0], w[1]);
        evaluations += 15;
        value += p.value;
        error += p.error;
        heap.push(p);
    }
    if !value.is_finite() {
        return Err(Error::numerical("integral", "integrand is not finite on the interval"));
    }

    let mut converged = true;
    while error > opts.abs_tol.max(opts.rel_tol * value.abs()) {
        if evaluations >= opts.max_evals {
            converged = false;
            break;
        }
        let Some(worst) = heap.pop() else { break };
        let mid = 0.5 * (worst.lo + worst.hi);
        if !(mid > worst.lo && mid < worst.hi) {
            // panel too narrow to split further in f64
            heap.push(Panel { error: 0.0, ..worst });
            error -= worst.error;
            continue;
        }
        let left = gauss_kronrod(&f, worst.lo, mid);
        let right = gauss_kronrod(&f, mid, worst.hi);
        evaluations += 30;
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        if !value.is_finite() {
            return Err(Error::numerical("integral", "integrand is not finite on the interval"));
        }
    }

    let mut panels = heap.into_vec();
    panels.sort_by(|a, b| a.lo.total_cmp(&b.lo));
    // resum from panels to shed accumulated cancellation from the running updates
    let value = panels.iter().map(|p| p.value).sum();
    let abs_error = panels.iter().map(|p| p.error).sum();
    Ok(QuadResult {
        value,
        abs_error,
        evaluations,
        converged,
        panels,
    })
}

/// `per_decade` log-spaced points covering `[lo, hi]`, endpoints included.
pub fn log_grid(lo: f64, hi: f64, per_decade: usize) -> Vec<f64> {
    assert!(lo > 0.0 && hi > lo, "log_grid needs 0 < lo < hi");
    let decades = (hi / lo).log10();
    let n = ((decades * per_decade as f64).ceil() as usize).max(1);
    let step = decades / n as f64;
    (0..=n)
        .map(|i| {
            if i == n {
                hi
            } else {
                lo * 10f64.powf(step * i as f64)
            }
        })
        .collect()
}

/// Sorts, removes duplicates and clips `points` to `[lo, hi]`, always
/// including both ends.
pub fn merge_knots(points: impl IntoIterator<Item = f64>, lo: f64, hi: f64) -> Vec<f64> {
    let mut v: Vec<f64> = points
        .into_iter()
        .filter(|p| p.is_finite() && *p > lo && *p < hi)
        .collect();
    v.push(lo);
    v.push(hi);
    v.sort_by(f64::total_cmp);
    let scale = hi.abs().max(lo.abs()).max(f64::MIN_POSITIVE);
    v.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * scale.max(b.abs()));
    v
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| 3.0 * x * x, &[0.0, 2.0], QuadOptions::default()).unwrap();
        assert!((r.value - 8.0).abs() < 1e-13);
    }

    #[test]
    fn kink_at_knot_costs_nothing() {
        let r = integrate(|x: f64| x.abs(), &[-1.0, 0.0, 3.0], QuadOptions::default()).unwrap();
        assert!((r.value - 5.0).abs() < 1e-13);
        assert_eq!(r.evaluations, 30);
    }

    #[test]
    fn adaptive_refines_peaks() {
        let r = integrate(
            |x: f64| 1.0 / (1e-4 + x * x),
            &[-1.0, 1.0],
            QuadOptions {
                rel_tol: 1e-10,
                ..Default::default()
            },
        )
        .unwrap();
        let exact = 2.0 * (1.0f64 / 1e-2).atan() / 1e-2;
        assert!(((r.value - exact) / exact).abs() < 1e-9);
        assert!(r.converged);
    }

    #[test]
    fn rejects_bad_knots() {
        assert!(integrate(|x| x, &[1.0], QuadOptions::default()).is_err());
        assert!(integrate(|x| x, &[1.0, 0.5], QuadOptions::default()).is_err());
        assert!(integrate(|_| f64::NAN, &[0.0, 1.0], QuadOptions::default()).is_err());
    }

    #[test]
    fn log_grid_endpoints() {
        let g = log_grid(1.0, 1e3, 4);
        assert_eq!(g.len(), 13);
        assert_eq!(g[0], 1.0);
        assert_eq!(*g.last().unwrap(), 1e3);
    }

    #[test]
    fn merge_knots_clips_and_dedups() {
        let k = merge_knots([5.0, 0.5, 2.0, 2.0, 20.0], 1.0, 10.0);
        assert_eq!(k, vec![1.0, 2.0, 5.0, 10.0]);
    }
}
