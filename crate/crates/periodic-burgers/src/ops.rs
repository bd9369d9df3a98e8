//! Fourier-multiplier operators in time, space derivatives, and dealiased
//! pointwise products.
//!
//! The fractional derivative of order `s >= 0` acts diagonally with symbol
//! `|2 pi k|^s * exp(i sgn(k) s pi / 2)` (principal branch); its adjoint uses
//! the conjugate phase and the Hilbert transform multiplies by `-i sgn(k)`.
//! The mean (`k = 0`) maps to itself for `s = 0` and to zero for `s > 0`.

use num_complex::Complex64;
use std::f64::consts::{FRAC_PI_2, PI, TAU};

use crate::error::{Error, Result};
use crate::field::{DualField, Field};
use crate::grid::SpaceBasis;

fn sgn(k: i64) -> f64 {
    match k.cmp(&0) {
        std::cmp::Ordering::Greater => 1.0,
        std::cmp::Ordering::Less => -1.0,
        std::cmp::Ordering::Equal => 0.0,
    }
}

fn frac_multiplier(k: i64, s: f64, conjugate: bool) -> Complex64 {
    if k == 0 {
        // sgn(0) = 0 and |0|^s = 0 for s > 0; identity at s = 0.
        return if s == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        };
    }
    let magnitude = (TAU * k.unsigned_abs() as f64).powf(s);
    let mut angle = sgn(k) * s * FRAC_PI_2;
    if conjugate {
        angle = -angle;
    }
    Complex64::from_polar(magnitude, angle)
}

/// Fractional time derivative of order `s >= 0`.
pub fn fractional_derivative(u: &Field, s: f64) -> Result<Field> {
    if s < 0.0 || !s.is_finite() {
        return Err(Error::domain(format!(
            "fractional derivative order must be >= 0, got {s}"
        )));
    }
    Ok(u.scale_by_freq(|k| frac_multiplier(k, s, false)))
}

/// Adjoint fractional derivative (conjugated multiplier phase).
pub fn fractional_derivative_adjoint(u: &Field, s: f64) -> Result<Field> {
    if s < 0.0 || !s.is_finite() {
        return Err(Error::domain(format!(
            "fractional derivative order must be >= 0, got {s}"
        )));
    }
    Ok(u.scale_by_freq(|k| frac_multiplier(k, s, true)))
}

/// Hilbert transform in time: multiplier `-i sgn(k)`, annihilates the mean,
/// maps real fields to real fields.
pub fn hilbert_transform(u: &Field) -> Field {
    u.scale_by_freq(|k| Complex64::new(0.0, -sgn(k)))
}

/// Space derivative; sine fields land in the cosine family and vice versa
/// (with the sign from differentiating the cosine).
pub fn space_derivative(u: &Field) -> Field {
    let grid = u.grid();
    match u.basis() {
        SpaceBasis::Sine => {
            let mut out = Field::zero(grid, SpaceBasis::Cosine);
            for k in -(grid.time_modes as i64)..=grid.time_modes as i64 {
                for m in 1..=grid.space_modes {
                    out.set_coeff(k, m, u.coeff(k, m) * (m as f64 * PI));
                }
            }
            out
        }
        SpaceBasis::Cosine => {
            let mut out = Field::zero(grid, SpaceBasis::Sine);
            for k in -(grid.time_modes as i64)..=grid.time_modes as i64 {
                for m in 1..=grid.space_modes {
                    out.set_coeff(k, m, u.coeff(k, m) * (-(m as f64) * PI));
                }
            }
            out
        }
    }
}

/// Dealiased pointwise product. Same-family factors multiply into the cosine
/// (Neumann) family, mixed factors into the sine family; the 3/2-padded grid
/// keeps the retained modes alias-free for this quadratic operation.
pub fn product_dealiased(u: &Field, v: &Field) -> Result<Field> {
    if u.grid() != v.grid() {
        return Err(Error::input("grid mismatch in pointwise product"));
    }
    let out_basis = u.basis().product_basis(v.basis());
    let mut vals = u.synthesize_padded();
    let vv = v.synthesize_padded();
    vals.zip_mut_with(&vv, |a, b| *a *= *b);
    Ok(Field::analyze_padded(&vals, u.grid(), out_basis))
}

/// Dealiased square of a field; always lands in the cosine family.
pub fn square_dealiased(u: &Field) -> Field {
    let mut vals = u.synthesize_padded();
    vals.mapv_inplace(|a| a * a);
    Field::analyze_padded(&vals, u.grid(), SpaceBasis::Cosine)
}

/// Map a field pointwise on the padded grid and re-analyze onto the requested
/// family. The result is the band-limited projection of `f(u)`.
pub fn map_pointwise(u: &Field, out_basis: SpaceBasis, f: impl Fn(f64) -> f64) -> Field {
    let mut vals = u.synthesize_padded();
    vals.mapv_inplace(f);
    Field::analyze_padded(&vals, u.grid(), out_basis)
}

/// Quadrature of `integrand(t, x)` sampled on the padded grid: trapezoid in
/// space (exact for even-parity trigonometric integrands up to the cubic
/// range of the padding), uniform in time.
pub fn quadrature_integral(grid: crate::grid::GridSpec, values: &ndarray::Array2<f64>) -> f64 {
    let (nt, nodes) = values.dim();
    let nx = nodes - 1;
    let mut total = 0.0;
    for row in values.outer_iter() {
        let mut acc = 0.5 * (row[0] + row[nx]);
        for i in 1..nx {
            acc += row[i];
        }
        total += acc / nx as f64;
    }
    debug_assert_eq!(nt, values.nrows());
    let _ = grid;
    total / nt as f64
}

/// `L^2(T x I)` inner product by padded-grid quadrature; an independent route
/// to the Parseval coefficient sum for same-parity factors.
pub fn quadrature_inner(u: &Field, v: &Field) -> Result<f64> {
    if u.grid() != v.grid() {
        return Err(Error::input("grid mismatch in quadrature inner product"));
    }
    let mut vals = u.synthesize_padded();
    let vv = v.synthesize_padded();
    vals.zip_mut_with(&vv, |a, b| *a *= *b);
    Ok(quadrature_integral(u.grid(), &vals))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::l2_inner;
    use crate::grid::GridSpec;
    use ndarray::Array2;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::SQRT_2;

    fn grid() -> GridSpec {
        GridSpec::new(8, 8)
    }

    /// cos(2 pi t) sin(pi x) as a spectral field.
    fn cos_sin(g: GridSpec) -> Field {
        let mut f = Field::zero(g, SpaceBasis::Sine);
        // cos(2 pi t) = (e^{2 pi i t} + e^{-2 pi i t}) / 2, sin(pi x) = e_1 / sqrt(2)
        f.set_coeff(1, 1, Complex64::new(0.5 / SQRT_2, 0.0));
        f
    }

    fn assert_fields_close(a: &Field, b: &Field, tol: f64) {
        let diff = a.sub(b).unwrap().l2_norm();
        assert!(
            diff < tol * (1.0 + a.l2_norm().max(b.l2_norm())),
            "fields differ by {diff:e}"
        );
    }

    #[test]
    fn order_one_is_classical_time_derivative() {
        let g = grid();
        let u = cos_sin(g);
        let du = fractional_derivative(&u, 1.0).unwrap();
        // d/dt cos(2 pi t) sin(pi x) = -2 pi sin(2 pi t) sin(pi x)
        let mut expected = Field::zero(g, SpaceBasis::Sine);
        // -2 pi sin(2 pi t) = -2 pi (e^{i..} - e^{-i..}) / (2i) = pi i e^{i..} - pi i e^{-i..}
        expected.set_coeff(1, 1, Complex64::new(0.0, PI / SQRT_2));
        assert_fields_close(&du, &expected, 1e-13);
    }

    #[test]
    fn half_derivative_shifts_phase_by_quarter_turn() {
        let g = grid();
        let u = cos_sin(g);
        let du = fractional_derivative(&u, 0.5).unwrap();
        // sqrt(2 pi) cos(2 pi t + pi/4) sin(pi x)
        let amp = TAU.sqrt();
        let c = Complex64::from_polar(amp * 0.5 / SQRT_2, FRAC_PI_2 / 2.0);
        assert!((du.coeff(1, 1) - c).norm() < 1e-13);

        let dstar = fractional_derivative_adjoint(&u, 0.5).unwrap();
        let c = Complex64::from_polar(amp * 0.5 / SQRT_2, -FRAC_PI_2 / 2.0);
        assert!((dstar.coeff(1, 1) - c).norm() < 1e-13);
    }

    #[test]
    fn order_zero_is_identity_and_negative_orders_are_rejected() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let u = Field::random(g, SpaceBasis::Sine, 1.0, &mut rng);
        let same = fractional_derivative(&u, 0.0).unwrap();
        assert_eq!(u, same);
        assert!(fractional_derivative(&u, -0.25).is_err());
        assert!(fractional_derivative_adjoint(&u, -1.0).is_err());
    }

    #[test]
    fn positive_order_annihilates_the_time_mean() {
        let g = grid();
        let mut u = Field::zero(g, SpaceBasis::Sine);
        u.set_coeff(0, 2, Complex64::new(0.9, 0.0));
        let du = fractional_derivative(&u, 0.5).unwrap();
        assert!(du.is_zero());
        assert!(hilbert_transform(&u).is_zero());
    }

    #[test]
    fn hilbert_turns_cosine_into_sine() {
        let g = grid();
        let u = cos_sin(g);
        let hu = hilbert_transform(&u);
        // sin(2 pi t) sin(pi x): coefficient at k=1 is 1/(2i) / sqrt(2)
        let expected = Complex64::new(0.0, -0.5 / SQRT_2);
        assert!((hu.coeff(1, 1) - expected).norm() < 1e-15);
        assert_eq!(hu.hermitian_defect(), 0.0);
    }

    #[test]
    fn composition_of_fractional_orders() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let u = Field::random(g, SpaceBasis::Sine, 1.0, &mut rng);
        for s in [0.25, 0.5, 1.0] {
            for t in [0.25, 0.5, 1.0] {
                let two = fractional_derivative(&fractional_derivative(&u, s).unwrap(), t).unwrap();
                let one = fractional_derivative(&u, s + t).unwrap();
                assert_fields_close(&two, &one, 1e-12);
            }
        }
    }

    #[test]
    fn adjoint_half_derivative_factors_through_hilbert() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let u = Field::random(g, SpaceBasis::Sine, 1.0, &mut rng);
        let lhs = fractional_derivative_adjoint(&u, 0.5).unwrap();
        let via_h_outer = hilbert_transform(&fractional_derivative(&u, 0.5).unwrap());
        let via_h_inner = fractional_derivative(&hilbert_transform(&u), 0.5).unwrap();
        assert_fields_close(&lhs, &via_h_outer, 1e-13);
        assert_fields_close(&lhs, &via_h_inner, 1e-13);
    }

    #[test]
    fn adjointness_under_l2_pairing() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let u = Field::random(g, SpaceBasis::Sine, 1.0, &mut rng);
        let v = Field::random(g, SpaceBasis::Sine, 1.0, &mut rng);
        for s in [0.25, 0.5, 1.0] {
            let lhs = l2_inner(&fractional_derivative(&u, s).unwrap(), &v).unwrap();
            let rhs = l2_inner(&u, &fractional_derivative_adjoint(&v, s).unwrap()).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn space_derivative_of_sine_mode() {
        let g = grid();
        let mut u = Field::zero(g, SpaceBasis::Sine);
        // sin(pi x) = e_1 / sqrt(2)
        u.set_coeff(0, 1, Complex64::new(1.0 / SQRT_2, 0.0));
        let du = space_derivative(&u);
        assert_eq!(du.basis(), SpaceBasis::Cosine);
        // pi cos(pi x) = (pi / sqrt(2)) * sqrt(2) cos(pi x)
        assert!((du.coeff(0, 1).re - PI / SQRT_2).abs() < 1e-14);
        assert!(du.coeff(0, 0).norm() == 0.0);
        // Round trip through the cosine family flips the sign twice.
        let back = space_derivative(&du);
        let twice = u.scaled(-PI * PI);
        assert_fields_close(&back, &twice, 1e-13);
    }

    #[test]
    fn integration_by_parts_against_cosine_fields() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..5 {
            let u = Field::random(g, SpaceBasis::Sine, 1.0, &mut rng);
            let w = Field::random(g, SpaceBasis::Cosine, 1.0, &mut rng);
            let lhs = quadrature_inner(&space_derivative(&u), &w).unwrap();
            let rhs = -quadrature_inner(&u, &space_derivative(&w)).unwrap();
            assert!((lhs - rhs).abs() < 1e-12 * (1.0 + lhs.abs()));
        }
    }

    #[test]
    fn square_of_sine_is_half_minus_half_cos() {
        let g = grid();
        let mut u = Field::zero(g, SpaceBasis::Sine);
        u.set_coeff(0, 1, Complex64::new(1.0 / SQRT_2, 0.0));
        let sq = square_dealiased(&u);
        assert_eq!(sq.basis(), SpaceBasis::Cosine);
        // sin^2(pi x) = 1/2 - (1/2) cos(2 pi x)
        assert!((sq.coeff(0, 0).re - 0.5).abs() < 1e-13);
        assert!((sq.coeff(0, 2).re - (-0.5 / SQRT_2)).abs() < 1e-13);
        let mut others = 0.0f64;
        for m in [1usize, 3, 4, 5, 6, 7, 8] {
            others = others.max(sq.coeff(0, m).norm());
        }
        assert!(others < 1e-13);
    }

    #[test]
    fn squared_norm_of_separable_product() {
        // || u^2 ||_{L^2} = 3/8 for u = sin(pi x) cos(2 pi t)
        let g = grid();
        let u = cos_sin(g);
        let sq = square_dealiased(&u);
        assert!((sq.l2_norm() - 0.375).abs() < 1e-13);
    }

    #[test]
    fn quadrature_inner_matches_parseval() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..5 {
            let u = Field::random(g, SpaceBasis::Sine, 1.0, &mut rng);
            let v = Field::random(g, SpaceBasis::Sine, 1.0, &mut rng);
            let qi = quadrature_inner(&u, &v).unwrap();
            let pi_ = l2_inner(&u, &v).unwrap();
            assert!((qi - pi_).abs() < 1e-12 * (1.0 + pi_.abs()));
        }
    }

    #[test]
    fn hilbert_preserves_realness_on_samples() {
        let g = grid();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let u = Field::random(g, SpaceBasis::Sine, 1.0, &mut rng);
        let hu = hilbert_transform(&u);
        assert_eq!(hu.hermitian_defect(), 0.0);
        let vals: Array2<f64> = hu.synthesize();
        assert!(vals.iter().all(|v| v.is_finite()));
    }
}
