//! Discretization parameters for fields on the time torus crossed with the
//! unit interval.
//!
//! Time is resolved by complex exponentials `exp(2*pi*i*k*t)` for
//! `|k| <= K`, space by an orthonormal sine (Dirichlet) or cosine (Neumann)
//! family on `(0, 1)`. Quadrature grids are uniform; the space grid carries
//! both endpoints, so `space_points = Nx` means `Nx + 1` nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which one-dimensional family spans the space direction of a field.
///
/// Derivatives and products toggle between the two: the derivative of a sine
/// series is a cosine series, the product of two same-family fields lands in
/// the cosine family, and a mixed product lands in the sine family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceBasis {
    /// `sqrt(2) sin(m pi x)`, `m = 1..=M`; vanishes at both endpoints.
    Sine,
    /// `1` and `sqrt(2) cos(m pi x)`, `m = 0..=M`; slope vanishes at endpoints.
    Cosine,
}

impl SpaceBasis {
    /// Number of coefficient columns a field on this basis carries.
    pub fn mode_count(self, space_modes: usize) -> usize {
        match self {
            SpaceBasis::Sine => space_modes,
            SpaceBasis::Cosine => space_modes + 1,
        }
    }

    /// Mode index `m` of coefficient column `col`.
    pub fn mode_of_col(self, col: usize) -> usize {
        match self {
            SpaceBasis::Sine => col + 1,
            SpaceBasis::Cosine => col,
        }
    }

    /// The family that holds pointwise products of `self` and `other`.
    pub fn product_basis(self, other: SpaceBasis) -> SpaceBasis {
        if self == other {
            SpaceBasis::Cosine
        } else {
            SpaceBasis::Sine
        }
    }
}

/// Spectral resolution and quadrature sizes for one discretization.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    /// Largest retained time frequency `K`.
    pub time_modes: usize,
    /// Number of space sine modes `M` (cosine fields carry `M + 1`).
    pub space_modes: usize,
    /// Time quadrature points, at least `2K + 1`.
    pub time_points: usize,
    /// Space quadrature intervals, at least `M + 1` (the grid has `Nx + 1` nodes).
    pub space_points: usize,
    /// Zero-padding factor for pointwise products, at least `3/2`.
    pub dealias: f64,
}

impl GridSpec {
    /// Grid with default quadrature sizes (`Nt = 2K + 1`, `Nx = M + 1`) and the
    /// standard `3/2` dealiasing rule.
    pub fn new(time_modes: usize, space_modes: usize) -> Self {
        GridSpec {
            time_modes,
            space_modes,
            time_points: 2 * time_modes + 1,
            space_points: space_modes + 1,
            dealias: 1.5,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.time_modes < 1 {
            return Err(Error::input("time_modes must be >= 1"));
        }
        if self.space_modes < 1 {
            return Err(Error::input("space_modes must be >= 1"));
        }
        if self.time_points < 2 * self.time_modes + 1 {
            return Err(Error::input(format!(
                "time_points = {} under-resolves K = {} (need >= 2K+1)",
                self.time_points, self.time_modes
            )));
        }
        if self.space_points < self.space_modes + 1 {
            return Err(Error::input(format!(
                "space_points = {} under-resolves M = {} (need >= M+1)",
                self.space_points, self.space_modes
            )));
        }
        if self.dealias < 1.5 {
            return Err(Error::input("dealias factor must be >= 3/2"));
        }
        Ok(())
    }

    /// Doubled grid with the same quadrature conventions, used in refinement
    /// studies.
    pub fn refined(&self) -> Self {
        GridSpec::new(2 * self.time_modes, 2 * self.space_modes)
    }

    /// Rows of a coefficient array: frequencies `-K..=K`.
    pub fn freq_count(&self) -> usize {
        2 * self.time_modes + 1
    }

    /// Signed frequency held in coefficient row `row`.
    pub fn freq_of_row(&self, row: usize) -> i64 {
        row as i64 - self.time_modes as i64
    }

    /// Time quadrature size for dealiased products; alias-free for quadratic
    /// nonlinearities and exact for the cubic pairings that appear in the
    /// energy identities.
    pub fn padded_time_points(&self) -> usize {
        let wanted = (self.dealias * (2.0 * self.time_modes as f64 + 1.0)).ceil() as usize;
        next_fast_size(wanted.max(self.time_points).max(3 * self.time_modes + 1))
    }

    /// Space quadrature intervals for dealiased products.
    pub fn padded_space_points(&self) -> usize {
        let wanted = (self.dealias * (self.space_modes as f64 + 1.0)).ceil() as usize;
        wanted
            .max(self.space_points)
            .max(3 * self.space_modes / 2 + 1)
    }

    /// The `Nt` sample times `j / Nt`.
    pub fn time_nodes(&self) -> Vec<f64> {
        uniform_nodes(self.time_points, false)
    }

    /// The `Nx + 1` sample points `i / Nx`, endpoints included.
    pub fn space_nodes(&self) -> Vec<f64> {
        uniform_nodes(self.space_points, true)
    }
}

fn uniform_nodes(n: usize, closed: bool) -> Vec<f64> {
    let count = if closed { n + 1 } else { n };
    (0..count).map(|i| i as f64 / n as f64).collect()
}

/// Round `n` up to the next 5-smooth integer so FFT sizes stay cheap.
pub(crate) fn next_fast_size(n: usize) -> usize {
    let mut n = n.max(1);
    loop {
        let mut m = n;
        for p in [2, 3, 5] {
            while m % p == 0 {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}
