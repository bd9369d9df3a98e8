//! Declarative forcing terms, including the rough "derivative of an L^2
//! envelope" family with space regularity -1.
//!
//! A modal term contributes `a cos(2 pi k t + phase)` times the orthonormal
//! sine mode `m`. A rough term draws a random Neumann-family envelope `g`
//! with coefficients decaying like `(1 + k^2 + m^2)^{-p/2}` up to a fixed
//! mode cutoff and forces with `f = g_x`: for `p <= 1` the realized
//! functional is not square-integrable in the refinement limit but lies in
//! the gradient dual space on every finite grid.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::field::DualField;
use crate::grid::GridSpec;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ForcingTerm {
    /// `a cos(2 pi k t + phase) * e_m(x)` against the orthonormal sine basis.
    Modal {
        amplitude: f64,
        k: i64,
        m: usize,
        #[serde(default)]
        phase: f64,
    },
    /// `f = g_x` with `g` a random cosine-family envelope of power-law decay
    /// `p`; modes are populated for `|k| <= cutoff_k`, `m <= cutoff_m`.
    Rough {
        decay: f64,
        seed: u64,
        cutoff_k: usize,
        cutoff_m: usize,
        #[serde(default = "default_amplitude")]
        amplitude: f64,
    },
}

fn default_amplitude() -> f64 {
    1.0
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ForcingSpec {
    pub terms: Vec<ForcingTerm>,
}

/// Coefficient-sum diagnostics of a realized forcing: the (formal) `L^2` mass
/// and the gradient-dual mass, reported so rough cases can be seen to carry
/// bounded dual norm while their `L^2` norm grows with the grid.
#[derive(Debug, Clone, Copy)]
pub struct ForcingDiagnostics {
    pub l2_mass: f64,
    pub dual_mass: f64,
}

impl ForcingSpec {
    pub fn zero() -> Self {
        ForcingSpec { terms: Vec::new() }
    }

    /// Benchmark (a): steady forcing on the first sine mode.
    pub fn steady_sine(amplitude: f64) -> Self {
        ForcingSpec {
            terms: vec![ForcingTerm::Modal {
                amplitude,
                k: 0,
                m: 1,
                phase: 0.0,
            }],
        }
    }

    /// Benchmark (b): oscillatory forcing `a cos(2 pi t)` on the first mode.
    pub fn oscillatory(amplitude: f64) -> Self {
        ForcingSpec {
            terms: vec![ForcingTerm::Modal {
                amplitude,
                k: 1,
                m: 1,
                phase: 0.0,
            }],
        }
    }

    /// Benchmark (c): rough forcing with decay exponent 1/2 (space
    /// regularity -1), fixed cutoff so the functional is grid-independent.
    pub fn rough_benchmark(amplitude: f64, seed: u64) -> Self {
        ForcingSpec {
            terms: vec![ForcingTerm::Rough {
                decay: 0.5,
                seed,
                cutoff_k: 16,
                cutoff_m: 32,
                amplitude,
            }],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (i, term) in self.terms.iter().enumerate() {
            match term {
                ForcingTerm::Modal { m, k, .. } => {
                    if *m < 1 {
                        return Err(Error::config(
                            format!("forcing.terms[{i}].m"),
                            "sine mode index must be >= 1",
                        ));
                    }
                    if k.unsigned_abs() > 1_000_000 {
                        return Err(Error::config(
                            format!("forcing.terms[{i}].k"),
                            "unreasonable time frequency",
                        ));
                    }
                }
                ForcingTerm::Rough {
                    decay,
                    cutoff_k,
                    cutoff_m,
                    ..
                } => {
                    if !decay.is_finite() || *decay < 0.0 {
                        return Err(Error::config(
                            format!("forcing.terms[{i}].decay"),
                            "decay exponent must be finite and >= 0",
                        ));
                    }
                    if *cutoff_k == 0 || *cutoff_m == 0 {
                        return Err(Error::config(
                            format!("forcing.terms[{i}].cutoff"),
                            "cutoffs must be >= 1",
                        ));
                    }
                }
            }
        }
        Ok(())
    }

    /// Realize the forcing as a dual field on the given grid. Modal terms
    /// outside the retained band are rejected; rough terms populate modes up
    /// to `min(cutoff, grid band)` so a fixed cutoff gives the same
    /// functional on every refining grid.
    pub fn realize(&self, grid: GridSpec) -> Result<DualField> {
        let mut f = DualField::zero(grid);
        let mut accum = vec![
            vec![Complex64::new(0.0, 0.0); grid.space_modes + 1];
            2 * grid.time_modes + 1
        ];
        for (i, term) in self.terms.iter().enumerate() {
            match term {
                ForcingTerm::Modal {
                    amplitude,
                    k,
                    m,
                    phase,
                } => {
                    if k.unsigned_abs() as usize > grid.time_modes || *m > grid.space_modes {
                        return Err(Error::config(
                            format!("forcing.terms[{i}]"),
                            format!(
                                "mode (k={k}, m={m}) outside the grid band (K={}, M={})",
                                grid.time_modes, grid.space_modes
                            ),
                        ));
                    }
                    // a cos(2 pi k t + phase) splits into conjugate halves.
                    let half = 0.5 * amplitude;
                    let row = |kk: i64| (kk + grid.time_modes as i64) as usize;
                    accum[row(*k)][*m] += Complex64::from_polar(half, *phase);
                    accum[row(-k)][*m] += Complex64::from_polar(half, -*phase);
                }
                ForcingTerm::Rough {
                    decay,
                    seed,
                    cutoff_k,
                    cutoff_m,
                    amplitude,
                } => {
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(*seed);
                    let kc = (*cutoff_k).min(grid.time_modes);
                    let mc = (*cutoff_m).min(grid.space_modes);
                    // Draw in a fixed (k, m) order so a larger grid extends
                    // rather than reshuffles the realization.
                    for k in 0..=*cutoff_k as i64 {
                        for m in 1..=*cutoff_m {
                            let re: f64 = StandardNormal.sample(&mut rng);
                            let im: f64 = StandardNormal.sample(&mut rng);
                            if k as usize > kc || m > mc {
                                continue;
                            }
                            let env = amplitude
                                * (1.0 + (k * k) as f64 + (m * m) as f64).powf(-decay / 2.0);
                            // envelope coefficient of g, then f = g_x
                            let g = if k == 0 {
                                Complex64::new(re * env, 0.0)
                            } else {
                                Complex64::new(re * env, im * env) / 2.0f64.sqrt()
                            };
                            let fk = -(m as f64) * PI * g;
                            let row = |kk: i64| (kk + grid.time_modes as i64) as usize;
                            accum[row(k)][m] += fk;
                            if k > 0 {
                                accum[row(-k)][m] += fk.conj();
                            }
                        }
                    }
                }
            }
        }
        for k in -(grid.time_modes as i64)..=grid.time_modes as i64 {
            for m in 1..=grid.space_modes {
                let v = accum[(k + grid.time_modes as i64) as usize][m];
                if v.norm_sqr() != 0.0 && k >= 0 {
                    f.set_coeff(k, m, v);
                }
            }
        }
        Ok(f)
    }

    pub fn diagnostics(&self, grid: GridSpec) -> Result<ForcingDiagnostics> {
        let f = self.realize(grid)?;
        let l2_mass = f.coeffs().iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        let dual_mass = crate::sobolev::dual_forcing_norm(&f);
        Ok(ForcingDiagnostics { l2_mass, dual_mass })
    }
}
