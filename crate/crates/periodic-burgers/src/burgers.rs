//! Weak-form assembly of the Burgers operator `T = L + S` on the discrete
//! sine-by-exponential basis.
//!
//! `L` pairs the half-order time derivative against its adjoint and adds the
//! viscous gradient form; on the orthonormal basis this telescopes to the
//! diagonal action `(L u)_km = (2 pi i k + mu (m pi)^2) u_km`. The convection
//! form `<S(u), v> = -1/2 (u^2, v_x)` is evaluated matrix-free through the
//! dealiased square, giving `S(u)_km = -1/2 (m pi) (u^2)_km` on the cosine
//! coefficients of the square.

use num_complex::Complex64;
use std::f64::consts::{PI, TAU};

use crate::error::{Error, Result};
use crate::field::{DualField, Field};
use crate::grid::SpaceBasis;
use crate::ops;
use crate::sobolev::dual_forcing_norm;

/// Viscosity and homotopy parameter for the family `(L + lambda S) u = f`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct OperatorParams {
    pub mu: f64,
    pub lambda: f64,
}

impl OperatorParams {
    pub fn new(mu: f64, lambda: f64) -> Result<Self> {
        let p = OperatorParams { mu, lambda };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mu > 0.0) {
            return Err(Error::domain("viscosity mu must be > 0"));
        }
        if !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::domain("lambda must lie in [0, 1]"));
        }
        Ok(())
    }

    /// Diagonal symbol of `L` at time frequency `k` and sine mode `m`.
    pub fn l_symbol(&self, k: i64, m: usize) -> Complex64 {
        Complex64::new(self.mu * (m as f64 * PI).powi(2), TAU * k as f64)
    }
}

/// Linear part: diagonal action of the time derivative plus viscous term.
pub fn apply_l(u: &Field, p: &OperatorParams) -> Result<DualField> {
    if u.basis() != SpaceBasis::Sine {
        return Err(Error::input("L acts on Dirichlet (sine) fields"));
    }
    let f = DualField::from_riesz(u)?;
    Ok(f.map_coeffs(|k, m, z| z * p.l_symbol(k, m)))
}

/// Convection functional `<S(u), v> = -1/2 (u^2, v_x)`.
pub fn apply_s(u: &Field) -> Result<DualField> {
    if u.basis() != SpaceBasis::Sine {
        return Err(Error::input("S acts on Dirichlet (sine) fields"));
    }
    let square = ops::square_dealiased(u);
    let mut out = DualField::zero(u.grid());
    for k in -(u.grid().time_modes as i64)..=u.grid().time_modes as i64 {
        for m in 1..=u.grid().space_modes {
            out.set_coeff(k, m, -0.5 * (m as f64 * PI) * square.coeff(k, m));
        }
    }
    Ok(out)
}

/// Residual `L u + lambda S(u) - f` together with its dual forcing norm.
pub fn residual(u: &Field, f: &DualField, p: &OperatorParams) -> Result<(DualField, f64)> {
    if u.grid() != f.grid() {
        return Err(Error::input("grid mismatch between state and forcing"));
    }
    let r = apply_l(u, p)?
        .axpy(p.lambda, &apply_s(u)?)?
        .sub(f)?;
    let norm = dual_forcing_norm(&r);
    Ok((r, norm))
}

/// Directional derivative of `L + lambda S` at `u` applied to `w`:
/// `L w + lambda DS(u) w` with `<DS(u) w, v> = -(u w, v_x)`.
pub fn jacobian_apply(u: &Field, w: &Field, p: &OperatorParams) -> Result<DualField> {
    if u.grid() != w.grid() {
        return Err(Error::input("grid mismatch in jacobian application"));
    }
    let lw = apply_l(w, p)?;
    if p.lambda == 0.0 {
        return Ok(lw);
    }
    let uw = ops::product_dealiased(u, w)?;
    let mut convective = DualField::zero(u.grid());
    for k in -(u.grid().time_modes as i64)..=u.grid().time_modes as i64 {
        for m in 1..=u.grid().space_modes {
            convective.set_coeff(k, m, -(m as f64 * PI) * uw.coeff(k, m));
        }
    }
    lw.axpy(p.lambda, &convective)
}

/// Exact inverse of the linear part: `u_km = f_km / (2 pi i k + mu (m pi)^2)`.
/// The denominator never vanishes since every sine mode has `m >= 1`.
pub fn solve_linear(f: &DualField, p: &OperatorParams) -> Field {
    f.riesz_field()
        .map_coeffs(|k, m, z| z / p.l_symbol(k, m))
}
