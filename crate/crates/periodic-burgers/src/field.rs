//! Real-valued fields on the time torus crossed with the unit interval,
//! stored as time-Fourier by space-mode coefficient arrays.
//!
//! A [`Field`] holds coefficients `u_hat[k][m]` of the orthonormal basis
//! `exp(2 pi i k t) * e_m(x)` with `e_m` a sine or cosine family element.
//! Real fields are kept exactly Hermitian in `k`: `u_hat[-k][m]` is the
//! conjugate of `u_hat[k][m]`. Every operation returns a fresh value; fields
//! are immutable and safe to share across threads.

use ndarray::Array2;
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::grid::{GridSpec, SpaceBasis};
use crate::transforms;

#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: GridSpec,
    basis: SpaceBasis,
    coeffs: Array2<Complex64>,
}

/// A continuous functional on the Dirichlet space, represented by its values
/// against the orthonormal sine-by-exponential basis. The layout matches
/// [`Field`] on the sine basis, so the duality pairing is a plain coefficient
/// sum.
#[derive(Debug, Clone, PartialEq)]
pub struct DualField {
    grid: GridSpec,
    coeffs: Array2<Complex64>,
}

impl Field {
    pub fn zero(grid: GridSpec, basis: SpaceBasis) -> Self {
        let coeffs = Array2::zeros((grid.freq_count(), basis.mode_count(grid.space_modes)));
        Field {
            grid,
            basis,
            coeffs,
        }
    }

    /// Build a field from a raw coefficient array, enforcing the Hermitian
    /// symmetry that makes the synthesized field real-valued.
    pub fn from_coeffs(
        grid: GridSpec,
        basis: SpaceBasis,
        coeffs: Array2<Complex64>,
    ) -> Result<Self> {
        let expected = (grid.freq_count(), basis.mode_count(grid.space_modes));
        if coeffs.dim() != expected {
            return Err(Error::input(format!(
                "coefficient array is {:?}, grid expects {:?}",
                coeffs.dim(),
                expected
            )));
        }
        let mut field = Field {
            grid,
            basis,
            coeffs,
        };
        field.hermitianize();
        Ok(field)
    }

    /// Forward transform of samples on the quadrature grid (`Nt` rows of
    /// `Nx + 1` space nodes, endpoints included).
    pub fn analyze(samples: &Array2<f64>, grid: GridSpec, basis: SpaceBasis) -> Result<Self> {
        let (nt, nodes) = samples.dim();
        if nt != grid.time_points || nodes != grid.space_points + 1 {
            return Err(Error::input(format!(
                "sample array is {nt} x {nodes}, grid expects {} x {}",
                grid.time_points,
                grid.space_points + 1
            )));
        }
        Ok(Self::analyze_sized(samples, grid, basis))
    }

    /// Inverse transform onto the quadrature grid; exact inverse of
    /// [`Field::analyze`] on band-limited data.
    pub fn synthesize(&self) -> Array2<f64> {
        self.synthesize_sized(self.grid.time_points, self.grid.space_points)
    }

    /// Samples on the dealias-padded grid, used for pointwise products and
    /// quartic quadrature.
    pub fn synthesize_padded(&self) -> Array2<f64> {
        self.synthesize_sized(
            self.grid.padded_time_points(),
            self.grid.padded_space_points(),
        )
    }

    /// Analysis of samples on the dealias-padded grid, truncated to the
    /// grid's retained modes.
    pub(crate) fn analyze_padded(
        samples: &Array2<f64>,
        grid: GridSpec,
        basis: SpaceBasis,
    ) -> Self {
        debug_assert_eq!(
            samples.dim(),
            (grid.padded_time_points(), grid.padded_space_points() + 1)
        );
        Self::analyze_sized(samples, grid, basis)
    }

    fn analyze_sized(samples: &Array2<f64>, grid: GridSpec, basis: SpaceBasis) -> Self {
        let (nt, nodes) = samples.dim();
        let mc = basis.mode_count(grid.space_modes);
        // Space analysis row by row, then an FFT down each mode column.
        let mut space_coeffs = Array2::<f64>::zeros((nt, mc));
        let mut row_out = vec![0.0; mc];
        for (j, row) in samples.outer_iter().enumerate() {
            let row = row.as_slice().expect("contiguous sample row");
            transforms::space_analyze(row, basis, mc, &mut row_out);
            for (c, &v) in row_out.iter().enumerate() {
                space_coeffs[(j, c)] = v;
            }
        }
        let _ = nodes;
        let mut coeffs = Array2::zeros((grid.freq_count(), mc));
        let mut column = vec![0.0; nt];
        for c in 0..mc {
            for j in 0..nt {
                column[j] = space_coeffs[(j, c)];
            }
            for (row, v) in transforms::time_analyze(&column, grid.time_modes)
                .into_iter()
                .enumerate()
            {
                coeffs[(row, c)] = v;
            }
        }
        let mut field = Field {
            grid,
            basis,
            coeffs,
        };
        field.hermitianize();
        field
    }

    fn synthesize_sized(&self, nt: usize, nx: usize) -> Array2<f64> {
        let mc = self.coeffs.ncols();
        let mut time_vals = Array2::<f64>::zeros((nt, mc));
        let mut column = vec![Complex64::new(0.0, 0.0); self.grid.freq_count()];
        for c in 0..mc {
            for row in 0..self.grid.freq_count() {
                column[row] = self.coeffs[(row, c)];
            }
            for (j, v) in transforms::time_synthesize(&column, nt)
                .into_iter()
                .enumerate()
            {
                time_vals[(j, c)] = v;
            }
        }
        let mut out = Array2::<f64>::zeros((nt, nx + 1));
        let mut row_in = vec![0.0; mc];
        let mut row_out = vec![0.0; nx + 1];
        for j in 0..nt {
            for c in 0..mc {
                row_in[c] = time_vals[(j, c)];
            }
            transforms::space_synthesize(&row_in, self.basis, nx, &mut row_out);
            for (i, &v) in row_out.iter().enumerate() {
                out[(j, i)] = v;
            }
        }
        out
    }

    /// Random band-limited field with a power-law coefficient envelope
    /// `(1 + k^2 + m^2)^(-decay / 2)`.
    pub fn random<R: Rng>(grid: GridSpec, basis: SpaceBasis, decay: f64, rng: &mut R) -> Self {
        let mut field = Field::zero(grid, basis);
        let kk = grid.time_modes as i64;
        for k in 0..=kk {
            for col in 0..basis.mode_count(grid.space_modes) {
                let m = basis.mode_of_col(col);
                let env = (1.0 + (k * k) as f64 + (m * m) as f64).powf(-decay / 2.0);
                let re: f64 = rng.sample(StandardNormal);
                let z = if k == 0 {
                    Complex64::new(re * env, 0.0)
                } else {
                    let im: f64 = rng.sample(StandardNormal);
                    Complex64::new(re * env, im * env)
                };
                field.coeffs[((k + kk) as usize, col)] = z;
                if k > 0 {
                    field.coeffs[((kk - k) as usize, col)] = z.conj();
                }
            }
        }
        field
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn basis(&self) -> SpaceBasis {
        self.basis
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    /// Coefficient for time frequency `k` and space mode `m`.
    pub fn coeff(&self, k: i64, m: usize) -> Complex64 {
        let row = (k + self.grid.time_modes as i64) as usize;
        let col = match self.basis {
            SpaceBasis::Sine => m - 1,
            SpaceBasis::Cosine => m,
        };
        self.coeffs[(row, col)]
    }

    pub fn set_coeff(&mut self, k: i64, m: usize, value: Complex64) {
        let kk = self.grid.time_modes as i64;
        let col = match self.basis {
            SpaceBasis::Sine => m - 1,
            SpaceBasis::Cosine => m,
        };
        self.coeffs[((k + kk) as usize, col)] = value;
        self.coeffs[((kk - k) as usize, col)] = if k == 0 {
            Complex64::new(value.re, 0.0)
        } else {
            value.conj()
        };
    }

    /// Apply a frequency-dependent multiplier `g(k)`; the caller guarantees
    /// `g(-k) = conj(g(k))` so realness is preserved.
    pub(crate) fn scale_by_freq(&self, g: impl Fn(i64) -> Complex64) -> Field {
        let mut out = self.clone();
        for (row, mut line) in out.coeffs.outer_iter_mut().enumerate() {
            let factor = g(self.grid.freq_of_row(row));
            for v in line.iter_mut() {
                *v *= factor;
            }
        }
        out
    }

    pub(crate) fn map_coeffs(&self, f: impl Fn(i64, usize, Complex64) -> Complex64) -> Field {
        let mut out = self.clone();
        for ((row, col), v) in out.coeffs.indexed_iter_mut() {
            let k = self.grid.freq_of_row(row);
            let m = self.basis.mode_of_col(col);
            *v = f(k, m, *v);
        }
        out
    }

    fn hermitianize(&mut self) {
        let kk = self.grid.time_modes as i64;
        for col in 0..self.coeffs.ncols() {
            let mid = kk as usize;
            let c = self.coeffs[(mid, col)];
            self.coeffs[(mid, col)] = Complex64::new(c.re, 0.0);
            for k in 1..=kk {
                let hi = (kk + k) as usize;
                let lo = (kk - k) as usize;
                let avg = 0.5 * (self.coeffs[(hi, col)] + self.coeffs[(lo, col)].conj());
                self.coeffs[(hi, col)] = avg;
                self.coeffs[(lo, col)] = avg.conj();
            }
        }
    }

    /// Max deviation from Hermitian symmetry; zero for every well-formed field.
    pub fn hermitian_defect(&self) -> f64 {
        let kk = self.grid.time_modes as i64;
        let mut worst: f64 = 0.0;
        for col in 0..self.coeffs.ncols() {
            worst = worst.max(self.coeffs[(kk as usize, col)].im.abs());
            for k in 1..=kk {
                let d =
                    (self.coeffs[((kk + k) as usize, col)] - self.coeffs[((kk - k) as usize, col)].conj()).norm();
                worst = worst.max(d);
            }
        }
        worst
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| z.norm_sqr() == 0.0)
    }

    /// `L^2` norm over the space-time domain (Parseval).
    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scaled(&self, factor: f64) -> Field {
        let mut out = self.clone();
        out.coeffs.mapv_inplace(|z| z * factor);
        out
    }

    pub fn add(&self, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.coeffs += &other.coeffs;
        Ok(out)
    }

    pub fn sub(&self, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.coeffs -= &other.coeffs;
        Ok(out)
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &Field) -> Result<Field> {
        self.check_compatible(other)?;
        let mut out = self.clone();
        out.coeffs.zip_mut_with(&other.coeffs, |a, b| *a += factor * b);
        Ok(out)
    }

    pub(crate) fn check_compatible(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::input("grid mismatch between fields"));
        }
        if self.basis != other.basis {
            return Err(Error::input("space-basis mismatch between fields"));
        }
        Ok(())
    }
}

/// `L^2` scalar product of two fields on the same grid and basis; the
/// imaginary part vanishes for Hermitian coefficient arrays.
pub fn l2_inner(u: &Field, v: &Field) -> Result<f64> {
    u.check_compatible(v)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in u.coeffs.iter().zip(v.coeffs.iter()) {
        acc += a * b.conj();
    }
    debug_assert!(acc.im.abs() < 1e-12 * (1.0 + acc.re.abs()));
    Ok(acc.re)
}

impl DualField {
    pub fn zero(grid: GridSpec) -> Self {
        DualField {
            grid,
            coeffs: Array2::zeros((grid.freq_count(), grid.space_modes)),
        }
    }

    pub fn from_coeffs(grid: GridSpec, coeffs: Array2<Complex64>) -> Result<Self> {
        let field = Field::from_coeffs(grid, SpaceBasis::Sine, coeffs)?;
        Ok(DualField {
            grid,
            coeffs: field.coeffs,
        })
    }

    /// Reinterpret a sine-basis field as the functional it represents in `L^2`.
    pub fn from_riesz(field: &Field) -> Result<Self> {
        if field.basis() != SpaceBasis::Sine {
            return Err(Error::input("dual fields live over the sine basis"));
        }
        Ok(DualField {
            grid: field.grid,
            coeffs: field.coeffs.clone(),
        })
    }

    /// The field whose `L^2` pairing reproduces this functional.
    pub fn riesz_field(&self) -> Field {
        Field {
            grid: self.grid,
            basis: SpaceBasis::Sine,
            coeffs: self.coeffs.clone(),
        }
    }

    pub fn grid(&self) -> GridSpec {
        self.grid
    }

    pub fn coeffs(&self) -> &Array2<Complex64> {
        &self.coeffs
    }

    pub fn coeff(&self, k: i64, m: usize) -> Complex64 {
        self.coeffs[((k + self.grid.time_modes as i64) as usize, m - 1)]
    }

    pub fn set_coeff(&mut self, k: i64, m: usize, value: Complex64) {
        let kk = self.grid.time_modes as i64;
        self.coeffs[((k + kk) as usize, m - 1)] = value;
        self.coeffs[((kk - k) as usize, m - 1)] = if k == 0 {
            Complex64::new(value.re, 0.0)
        } else {
            value.conj()
        };
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|z| z.norm_sqr() == 0.0)
    }

    /// Apply the functional to a sine-basis field.
    pub fn pair(&self, v: &Field) -> Result<f64> {
        if v.basis() != SpaceBasis::Sine {
            return Err(Error::input("pairing requires a sine-basis field"));
        }
        if v.grid() != self.grid {
            return Err(Error::input("grid mismatch in duality pairing"));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for (f, u) in self.coeffs.iter().zip(v.coeffs().iter()) {
            acc += f * u.conj();
        }
        debug_assert!(acc.im.abs() < 1e-12 * (1.0 + acc.re.abs()));
        Ok(acc.re)
    }

    pub fn scaled(&self, factor: f64) -> DualField {
        let mut out = self.clone();
        out.coeffs.mapv_inplace(|z| z * factor);
        out
    }

    pub fn add(&self, other: &DualField) -> Result<DualField> {
        if self.grid != other.grid {
            return Err(Error::input("grid mismatch between dual fields"));
        }
        let mut out = self.clone();
        out.coeffs += &other.coeffs;
        Ok(out)
    }

    pub fn sub(&self, other: &DualField) -> Result<DualField> {
        if self.grid != other.grid {
            return Err(Error::input("grid mismatch between dual fields"));
        }
        let mut out = self.clone();
        out.coeffs -= &other.coeffs;
        Ok(out)
    }

    /// `self + factor * other`.
    pub fn axpy(&self, factor: f64, other: &DualField) -> Result<DualField> {
        if self.grid != other.grid {
            return Err(Error::input("grid mismatch between dual fields"));
        }
        let mut out = self.clone();
        out.coeffs.zip_mut_with(&other.coeffs, |a, b| *a += factor * b);
        Ok(out)
    }

    pub(crate) fn map_coeffs(&self, f: impl Fn(i64, usize, Complex64) -> Complex64) -> DualField {
        let mut out = self.clone();
        for ((row, col), v) in out.coeffs.indexed_iter_mut() {
            let k = self.grid.freq_of_row(row);
            *v = f(k, col + 1, *v);
        }
        out
    }
}
