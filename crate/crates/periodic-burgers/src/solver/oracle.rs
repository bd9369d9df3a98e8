//! Independent time-stepping oracle: integrate the initial-value problem
//! `u_t = mu u_xx - u u_x + f(t, x)` over many periods until it settles on
//! the (unique) periodic attractor, then resample the last period as a
//! spectral field.
//!
//! Diffusion is integrated exactly through the diagonal exponential; the
//! dealiased convection term and the forcing are advanced with the
//! fourth-order exponential Runge-Kutta stages of [`crate::stepping`]. The
//! oracle never sees the Newton path: it shares only the spatial Galerkin
//! truncation, so agreement with the continuation endpoint is a genuine
//! cross-check of the periodic solve.

use ndarray::Array2;
use num_complex::Complex64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::{DualField, Field};
use crate::grid::{GridSpec, SpaceBasis};
use crate::stepping::DiagExpStepper;
use crate::transforms;

/// Period-to-period drift below which the orbit is declared periodic.
pub const DEFAULT_DRIFT_TOL: f64 = 1e-9;

/// Norm ceiling treated as blow-up.
const BLOWUP: f64 = 1e8;

#[derive(Debug, Clone)]
pub struct OracleRun {
    /// The settled periodic orbit, resampled onto the spectral grid.
    pub attractor: Field,
    /// Period-to-period `L^2` drift, one entry per completed period.
    pub drift: Vec<f64>,
    /// Periods integrated before the drift tolerance was met.
    pub periods: usize,
    /// Advective CFL-like number `dt * max|u| * pi * M` observed on the run.
    pub cfl_estimate: f64,
}

/// Precomputed forcing profiles `f_m(t)` at every half-step stage time.
struct StageForcing {
    /// `rows = 2 * steps + 1` stage times `j * h / 2`, columns = sine modes.
    values: Array2<f64>,
}

impl StageForcing {
    fn new(f: &DualField, steps: usize) -> Self {
        let grid = f.grid();
        let m_count = grid.space_modes;
        let kk = grid.time_modes as i64;
        let mut values = Array2::zeros((2 * steps + 1, m_count));
        for j in 0..=2 * steps {
            let t = j as f64 * 0.5 / steps as f64;
            for m in 1..=m_count {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in -kk..=kk {
                    let phase = Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 * t);
                    acc += f.coeff(k, m) * phase;
                }
                values[(j, m - 1)] = acc.re;
            }
        }
        StageForcing { values }
    }

    #[inline]
    fn row(&self, stage_index: usize) -> ndarray::ArrayView1<'_, f64> {
        self.values.row(stage_index)
    }
}

/// Convection evaluator with scratch buffers: maps sine coefficients of `u`
/// to the sine coefficients of `-u u_x = -1/2 (u^2)_x`, dealiased.
struct Convection {
    nxp: usize,
    vals: Vec<f64>,
    cos_coeffs: Vec<f64>,
}

impl Convection {
    fn new(grid: GridSpec) -> Self {
        let nxp = grid.padded_space_points();
        Convection {
            nxp,
            vals: vec![0.0; nxp + 1],
            cos_coeffs: vec![0.0; grid.space_modes + 1],
        }
    }

    /// Writes the convection coefficients into `out[m-1]`, and reports the
    /// max pointwise |u| for the CFL diagnostic.
    fn eval(&mut self, u_sine: &[f64], out: &mut [f64]) -> f64 {
        transforms::space_synthesize(u_sine, SpaceBasis::Sine, self.nxp, &mut self.vals);
        let mut amax = 0.0f64;
        for v in self.vals.iter_mut() {
            amax = amax.max(v.abs());
            *v *= *v;
        }
        transforms::space_analyze(
            &self.vals,
            SpaceBasis::Cosine,
            self.cos_coeffs.len(),
            &mut self.cos_coeffs,
        );
        for (i, o) in out.iter_mut().enumerate() {
            let m = (i + 1) as f64;
            // -1/2 d/dx of the cosine-expanded square
            *o = 0.5 * m * PI * self.cos_coeffs[i + 1];
        }
        amax
    }
}

/// Integrate towards the periodic attractor. Runs at most `max_periods`
/// periods of `steps_per_period` steps (rounded up to a multiple of the time
/// quadrature size so the final period can be resampled exactly), stopping
/// early once the period-to-period drift falls below `drift_tol`.
pub fn integrate_to_attractor(
    f: &DualField,
    mu: f64,
    u0: &Field,
    max_periods: usize,
    steps_per_period: usize,
    drift_tol: f64,
) -> Result<OracleRun> {
    if u0.basis() != SpaceBasis::Sine {
        return Err(Error::input("oracle initial state must be a sine field"));
    }
    if u0.grid() != f.grid() {
        return Err(Error::input("grid mismatch between forcing and state"));
    }
    let grid = u0.grid();
    let nt = grid.time_points;
    let steps = steps_per_period.div_ceil(nt) * nt;
    let h = 1.0 / steps as f64;
    let m_count = grid.space_modes;

    let symbols: Vec<f64> = (1..=m_count)
        .map(|m| -mu * (m as f64 * PI).powi(2))
        .collect();
    let stepper = DiagExpStepper::new(&symbols, h);
    let forcing = StageForcing::new(f, steps);
    let mut convection = Convection::new(grid);

    // Initial state: u0 evaluated at t = 0.
    let kk = grid.time_modes as i64;
    let mut state: Vec<f64> = (1..=m_count)
        .map(|m| (-kk..=kk).map(|k| u0.coeff(k, m)).sum::<Complex64>().re)
        .collect();
    let mut prev_period_end = state.clone();
    let mut drift_history = Vec::new();
    let mut cfl_max = 0.0f64;
    let mut settled = false;
    let mut periods_run = 0;

    for period in 0..max_periods {
        let mut amax_period = 0.0f64;
        for i in 0..steps {
            let t = i as f64 * h;
            let mut nl = |u: &[f64], tt: f64, out: &mut [f64]| {
                let amax = convection.eval(u, out);
                amax_period = amax_period.max(amax);
                // stage index: tt is a multiple of h/2 up to rounding
                let stage = (tt / (0.5 * h)).round() as usize;
                let frow = forcing.row(stage.min(2 * steps));
                for (o, fv) in out.iter_mut().zip(frow.iter()) {
                    *o += fv;
                }
            };
            stepper.step(&mut state, t, &mut nl);
        }
        periods_run = period + 1;
        let norm: f64 = state.iter().map(|v| v * v).sum::<f64>().sqrt();
        cfl_max = cfl_max.max(h * amax_period * PI * m_count as f64);
        if !norm.is_finite() || norm > BLOWUP {
            return Err(Error::OracleUnstable(format!(
                "norm {norm:e} after period {periods_run} with CFL estimate {cfl_max:.3}; \
                 increase steps_per_period"
            )));
        }
        let drift: f64 = state
            .iter()
            .zip(prev_period_end.iter())
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        drift_history.push(drift);
        prev_period_end = state.clone();
        if drift < drift_tol {
            settled = true;
            break;
        }
    }
    if !settled {
        return Err(Error::OracleUnstable(format!(
            "drift {:e} after {periods_run} periods has not reached {drift_tol:e}",
            drift_history.last().copied().unwrap_or(f64::NAN)
        )));
    }

    // One more period, sampling the state on the base time grid.
    let stride = steps / nt;
    let mut samples = Array2::zeros((nt, m_count));
    for i in 0..steps {
        if i % stride == 0 {
            let j = i / stride;
            for (m, &v) in state.iter().enumerate() {
                samples[(j, m)] = v;
            }
        }
        let t = i as f64 * h;
        let mut nl = |u: &[f64], tt: f64, out: &mut [f64]| {
            convection.eval(u, out);
            let stage = (tt / (0.5 * h)).round() as usize;
            let frow = forcing.row(stage.min(2 * steps));
            for (o, fv) in out.iter_mut().zip(frow.iter()) {
                *o += fv;
            }
        };
        stepper.step(&mut state, t, &mut nl);
    }

    // Time-analyze each mode's sampled series into spectral coefficients.
    let mut coeffs = Array2::zeros((grid.freq_count(), m_count));
    let mut series = vec![0.0; nt];
    for m in 0..m_count {
        for j in 0..nt {
            series[j] = samples[(j, m)];
        }
        for (row, c) in transforms::time_analyze(&series, grid.time_modes)
            .into_iter()
            .enumerate()
        {
            coeffs[(row, m)] = c;
        }
    }
    let attractor = Field::from_coeffs(grid, SpaceBasis::Sine, coeffs)?;

    Ok(OracleRun {
        attractor,
        drift: drift_history,
        periods: periods_run,
        cfl_estimate: cfl_max,
    })
}

/// Convenience wrapper with the default drift tolerance.
pub fn imex_oracle(
    f: &DualField,
    mu: f64,
    u0: &Field,
    n_periods: usize,
    steps_per_period: usize,
) -> Result<OracleRun> {
    integrate_to_attractor(f, mu, u0, n_periods, steps_per_period, DEFAULT_DRIFT_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::burgers::{solve_linear, OperatorParams};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn grid() -> GridSpec {
        GridSpec::new(8, 16)
    }

    #[test]
    fn zero_forcing_decays_to_zero() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u0 = Field::random(g, SpaceBasis::Sine, 2.0, &mut rng).scaled(0.05);
        let run = imex_oracle(&DualField::zero(g), 1.0, &u0, 50, 64).unwrap();
        assert!(run.attractor.l2_norm() < 1e-9);
        assert!(run.drift.last().unwrap() < &1e-9);
    }

    #[test]
    fn steady_forcing_yields_steady_attractor() {
        let g = grid();
        let mut f = DualField::zero(g);
        f.set_coeff(0, 1, Complex64::new(0.5, 0.0));
        let run = imex_oracle(&f, 1.0, &Field::zero(g, SpaceBasis::Sine), 80, 128).unwrap();
        // Time-Fourier content away from the mean must vanish.
        let mut nonsteady = 0.0f64;
        for k in 1..=g.time_modes as i64 {
            for m in 1..=g.space_modes {
                nonsteady = nonsteady.max(run.attractor.coeff(k, m).norm());
            }
        }
        assert!(nonsteady < 1e-8, "nonsteady content {nonsteady:e}");
    }

    #[test]
    fn small_amplitude_attractor_matches_linear_response() {
        // With f = a cos(2 pi t) e_1 and a small, the nonlinear correction is
        // O(a^2), so the attractor matches the linear solve to that order.
        let g = grid();
        let a = 1e-3;
        let mut f = DualField::zero(g);
        f.set_coeff(1, 1, Complex64::new(0.5 * a, 0.0));
        let run = imex_oracle(&f, 1.0, &Field::zero(g, SpaceBasis::Sine), 60, 128).unwrap();
        let p = OperatorParams::new(1.0, 0.0).unwrap();
        let linear = solve_linear(&f, &p);
        let diff = run.attractor.sub(&linear).unwrap().l2_norm();
        assert!(diff < 0.05 * a * a, "diff = {diff:e} vs a^2 = {:e}", a * a);
    }

    #[test]
    fn coarse_steps_trigger_the_instability_error() {
        let g = GridSpec::new(8, 32);
        let mut f = DualField::zero(g);
        f.set_coeff(0, 1, Complex64::new(40.0, 0.0));
        let out = imex_oracle(&f, 0.05, &Field::zero(g, SpaceBasis::Sine), 30, 8);
        match out {
            Err(Error::OracleUnstable(msg)) => {
                assert!(msg.contains("steps") || msg.contains("drift"));
            }
            Err(other) => panic!("unexpected error {other}"),
            Ok(run) => panic!(
                "expected instability, got attractor with norm {}",
                run.attractor.l2_norm()
            ),
        }
    }
}
