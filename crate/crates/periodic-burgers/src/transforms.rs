//! Low-level transform kernels: FFTs along the periodic time direction and
//! table-driven sine/cosine transforms along the interval.
//!
//! All bases are orthonormal in `L^2`, so analysis is plain quadrature against
//! the basis and Parseval holds without extra weights. Planners and trig
//! tables are memoized per size.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::SpaceBasis;

const SQRT2: f64 = std::f64::consts::SQRT_2;

fn planner() -> &'static Mutex<FftPlanner<f64>> {
    static PLANNER: OnceLock<Mutex<FftPlanner<f64>>> = OnceLock::new();
    PLANNER.get_or_init(|| Mutex::new(FftPlanner::new()))
}

fn plan_forward(n: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft_forward(n)
}

fn plan_inverse(n: usize) -> Arc<dyn Fft<f64>> {
    planner().lock().unwrap().plan_fft_inverse(n)
}

/// sin/cos values on the half-period lattice `pi * q / n`, `q = 0..2n`.
struct TrigTable {
    n: usize,
    sin: Vec<f64>,
    cos: Vec<f64>,
}

impl TrigTable {
    fn new(n: usize) -> Self {
        let (sin, cos) = (0..2 * n)
            .map(|q| {
                let a = std::f64::consts::PI * q as f64 / n as f64;
                (a.sin(), a.cos())
            })
            .unzip();
        TrigTable { n, sin, cos }
    }

    #[inline]
    fn sin_mi(&self, m: usize, i: usize) -> f64 {
        self.sin[(m * i) % (2 * self.n)]
    }

    #[inline]
    fn cos_mi(&self, m: usize, i: usize) -> f64 {
        self.cos[(m * i) % (2 * self.n)]
    }
}

fn trig_table(n: usize) -> Arc<TrigTable> {
    static TABLES: OnceLock<Mutex<HashMap<usize, Arc<TrigTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = tables.lock().unwrap();
    guard
        .entry(n)
        .or_insert_with(|| Arc::new(TrigTable::new(n)))
        .clone()
}

/// Forward time transform: samples at `t_j = j / nt` to coefficients of
/// `exp(2 pi i k t)` for `|k| <= kmax`. Exact for band-limited input when
/// `nt >= 2 kmax + 1`; higher harmonics are truncated.
pub(crate) fn time_analyze(samples: &[f64], kmax: usize) -> Vec<Complex64> {
    let nt = samples.len();
    debug_assert!(nt >= 2 * kmax + 1);
    let mut buf: Vec<Complex64> = samples.iter().map(|&s| Complex64::new(s, 0.0)).collect();
    plan_forward(nt).process(&mut buf);
    let scale = 1.0 / nt as f64;
    (-(kmax as i64)..=kmax as i64)
        .map(|k| buf[k.rem_euclid(nt as i64) as usize] * scale)
        .collect()
}

/// Inverse of [`time_analyze`]: coefficients `|k| <= kmax` to `nt` samples.
pub(crate) fn time_synthesize(coeffs: &[Complex64], nt: usize) -> Vec<f64> {
    let kmax = (coeffs.len() - 1) / 2;
    debug_assert!(nt >= 2 * kmax + 1);
    let mut buf = vec![Complex64::new(0.0, 0.0); nt];
    for (idx, &c) in coeffs.iter().enumerate() {
        let k = idx as i64 - kmax as i64;
        buf[k.rem_euclid(nt as i64) as usize] = c;
    }
    plan_inverse(nt).process(&mut buf);
    debug_assert!(
        buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max) < 1e-12 * (1.0 + l2_of(&buf)),
        "non-real synthesis from supposedly Hermitian coefficients"
    );
    buf.into_iter().map(|z| z.re).collect()
}

fn l2_of(buf: &[Complex64]) -> f64 {
    buf.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Space analysis of `n + 1` samples at `x_i = i / n` onto the first modes of
/// the requested family. `mode_count` counts coefficient columns (`M` for
/// sine, `M + 1` for cosine).
pub(crate) fn space_analyze(
    values: &[f64],
    basis: SpaceBasis,
    mode_count: usize,
    out: &mut [f64],
) {
    let n = values.len() - 1;
    let tab = trig_table(n);
    let scale = 1.0 / n as f64;
    match basis {
        SpaceBasis::Sine => {
            for (col, slot) in out.iter_mut().enumerate().take(mode_count) {
                let m = col + 1;
                let mut acc = 0.0;
                for (i, &v) in values.iter().enumerate().take(n).skip(1) {
                    acc += v * tab.sin_mi(m, i);
                }
                *slot = SQRT2 * scale * acc;
            }
        }
        SpaceBasis::Cosine => {
            for (m, slot) in out.iter_mut().enumerate().take(mode_count) {
                let mut acc = 0.5 * (values[0] + values[n] * tab.cos_mi(m, n));
                for (i, &v) in values.iter().enumerate().take(n).skip(1) {
                    acc += v * tab.cos_mi(m, i);
                }
                let norm = if m == 0 { 1.0 } else { SQRT2 };
                *slot = norm * scale * acc;
            }
        }
    }
}

/// Space synthesis onto the closed grid of `n + 1` nodes.
pub(crate) fn space_synthesize(coeffs: &[f64], basis: SpaceBasis, n: usize, out: &mut [f64]) {
    let tab = trig_table(n);
    match basis {
        SpaceBasis::Sine => {
            out[0] = 0.0;
            out[n] = 0.0;
            for (i, slot) in out.iter_mut().enumerate().take(n).skip(1) {
                let mut acc = 0.0;
                for (col, &c) in coeffs.iter().enumerate() {
                    acc += c * tab.sin_mi(col + 1, i);
                }
                *slot = SQRT2 * acc;
            }
        }
        SpaceBasis::Cosine => {
            for (i, slot) in out.iter_mut().enumerate().take(n + 1) {
                let mut acc = coeffs[0];
                for (m, &c) in coeffs.iter().enumerate().skip(1) {
                    acc += SQRT2 * c * tab.cos_mi(m, i);
                }
                *slot = acc;
            }
        }
    }
}
