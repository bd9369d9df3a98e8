//! Seeded ensemble verification of the operator identities, the discrete
//! interpolation inequality, and the weak-form proof-step identities.
//!
//! Each invariant is evaluated on a deterministic ensemble of random fields;
//! residuals are affine-relative, `|a - b| / (1 + max(|a|, |b|))` for scalars
//! and `||A - B|| / (1 + max(||A||, ||B||))` for fields, so thresholds do not
//! depend on the ensemble's scale.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::burgers::{apply_l, apply_s, OperatorParams};
use crate::error::Result;
use crate::field::{l2_inner, Field};
use crate::grid::{GridSpec, SpaceBasis};
use crate::ops::{
    fractional_derivative, fractional_derivative_adjoint, hilbert_transform, quadrature_inner,
    space_derivative, square_dealiased,
};
use crate::sobolev::{
    dual_forcing_norm, dual_norm_supremizer, gradient_norm, h_norm, half_derivative_norm,
    interpolation_probe, refine_ratio, theta_interpolation,
};
use crate::util::derive_seed;

/// One verified invariant: max residual over the ensemble against its
/// tolerance.
#[derive(Debug, Clone)]
pub struct InvariantResult {
    pub name: String,
    pub samples: usize,
    pub max_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl InvariantResult {
    fn new(name: &str, samples: usize, max_residual: f64, tolerance: f64) -> Self {
        InvariantResult {
            name: name.to_string(),
            samples,
            max_residual,
            tolerance,
            pass: max_residual < tolerance,
        }
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / (1.0 + a.abs().max(b.abs()))
}

fn field_rel(a: &Field, b: &Field) -> f64 {
    let diff = a.sub(b).expect("ensemble fields share the grid").l2_norm();
    diff / (1.0 + a.l2_norm().max(b.l2_norm()))
}

/// Operator-identity suite over `samples` random fields: composition and
/// adjointness of the fractional derivatives, the Hilbert factorization of
/// the adjoint half derivative, the pairing identities, and preservation of
/// Hermitian symmetry.
pub fn identity_suite(grid: GridSpec, seed: u64, samples: usize) -> Vec<InvariantResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "identity-suite"));
    let orders = [0.25, 0.5, 1.0];
    let mut composition = 0.0f64;
    let mut adjointness = 0.0f64;
    let mut factorization = 0.0f64;
    let mut pairing_dtshilb = 0.0f64;
    let mut re_u_hu = 0.0f64;
    let mut dt_self_pairing = 0.0f64;
    let mut hermitian = 0.0f64;
    let mut parseval = 0.0f64;

    for _ in 0..samples {
        let u = Field::random(grid, SpaceBasis::Sine, 1.0, &mut rng);
        let v = Field::random(grid, SpaceBasis::Sine, 1.0, &mut rng);

        for &s in &orders {
            for &t in &orders {
                let two =
                    fractional_derivative(&fractional_derivative(&u, s).unwrap(), t).unwrap();
                let one = fractional_derivative(&u, s + t).unwrap();
                composition = composition.max(field_rel(&two, &one));
            }
            let lhs = l2_inner(&fractional_derivative(&u, s).unwrap(), &v).unwrap();
            let rhs = l2_inner(&u, &fractional_derivative_adjoint(&v, s).unwrap()).unwrap();
            adjointness = adjointness.max(rel(lhs, rhs));
        }

        let dstar = fractional_derivative_adjoint(&u, 0.5).unwrap();
        let h_outer = hilbert_transform(&fractional_derivative(&u, 0.5).unwrap());
        let h_inner = fractional_derivative(&hilbert_transform(&u), 0.5).unwrap();
        factorization = factorization
            .max(field_rel(&dstar, &h_outer))
            .max(field_rel(&dstar, &h_inner));

        let du = fractional_derivative(&u, 0.5).unwrap();
        let pairing = l2_inner(&du, &fractional_derivative_adjoint(&hilbert_transform(&u), 0.5).unwrap())
            .unwrap();
        let energy = l2_inner(&du, &du).unwrap();
        pairing_dtshilb = pairing_dtshilb.max(rel(pairing, -energy));

        re_u_hu = re_u_hu.max(rel(l2_inner(&u, &hilbert_transform(&u)).unwrap(), 0.0));
        dt_self_pairing = dt_self_pairing.max(rel(l2_inner(&du, &dstar).unwrap(), 0.0));

        for w in [
            fractional_derivative(&u, 0.5).unwrap(),
            hilbert_transform(&u),
            dstar.clone(),
        ] {
            hermitian = hermitian.max(w.hermitian_defect() / (1.0 + w.l2_norm()));
        }

        let qi = quadrature_inner(&u, &v).unwrap();
        parseval = parseval.max(rel(qi, l2_inner(&u, &v).unwrap()));
    }

    vec![
        InvariantResult::new("composition_ds_dt", samples, composition, 1e-12),
        InvariantResult::new("adjoint_pairing", samples, adjointness, 1e-12),
        InvariantResult::new("half_derivative_factorization", samples, factorization, 1e-12),
        InvariantResult::new("dtshilb_pairing", samples, pairing_dtshilb, 1e-12),
        InvariantResult::new("re_u_hu_zero", samples, re_u_hu, 1e-12),
        InvariantResult::new("dt_self_pairing_zero", samples, dt_self_pairing, 1e-12),
        InvariantResult::new("hermitian_preserved", samples, hermitian, 1e-13),
        InvariantResult::new("parseval_quadrature", samples, parseval, 1e-12),
    ]
}

/// Sobolev suite: per-sample discrete Hoelder interpolation, the dual-norm
/// supremizer, and the norm inequalities.
pub fn sobolev_suite(grid: GridSpec, seed: u64, samples: usize) -> Vec<InvariantResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "sobolev-suite"));
    let mut hoelder = 0.0f64;
    let mut supremizer = 0.0f64;
    let mut monotone = 0.0f64;
    for _ in 0..samples {
        let u = Field::random(grid, SpaceBasis::Sine, 0.9, &mut rng);
        let (lhs, rhs) = theta_interpolation(&u, 0.5, 1.0, 1.0 / 3.0);
        // violation residual: positive part of (lhs - rhs), relative
        hoelder = hoelder.max((lhs - rhs).max(0.0) / (1.0 + rhs));

        let f = crate::field::DualField::from_riesz(&u).unwrap();
        let norm = dual_forcing_norm(&f);
        let v = dual_norm_supremizer(&f);
        let attained = f.pair(&v).unwrap() / gradient_norm(&v);
        supremizer = supremizer.max(rel(attained, norm));

        monotone = monotone.max((u.l2_norm() - h_norm(&u)).max(0.0));
    }
    vec![
        InvariantResult::new("theta_interpolation_hoelder", samples, hoelder, 1e-10),
        InvariantResult::new("dual_norm_supremizer", samples, supremizer, 1e-10),
        InvariantResult::new("h_norm_dominates_l2", samples, monotone, 1e-15),
    ]
}

/// Weak-form suite: cubic annihilation, the viscous energy identity of the
/// skew part, the Hilbert pairing, and the convection bound.
pub fn burgers_suite(grid: GridSpec, seed: u64, samples: usize) -> Vec<InvariantResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, "burgers-suite"));
    let p = OperatorParams::new(0.7, 1.0).unwrap();
    let mut cubic = 0.0f64;
    let mut skew = 0.0f64;
    let mut hilbert_pairing = 0.0f64;
    let mut convection = 0.0f64;
    for _ in 0..samples {
        let u = Field::random(grid, SpaceBasis::Sine, 1.0, &mut rng);
        let su = apply_s(&u).unwrap().pair(&u).unwrap();
        cubic = cubic.max(su.abs() / (1.0 + u.l2_norm().powi(3)));

        let luu = apply_l(&u, &p).unwrap().pair(&u).unwrap();
        skew = skew.max(rel(luu, p.mu * gradient_norm(&u).powi(2)));

        let luhu = apply_l(&u, &p)
            .unwrap()
            .pair(&hilbert_transform(&u))
            .unwrap();
        hilbert_pairing = hilbert_pairing.max(rel(luhu, -half_derivative_norm(&u).powi(2)));

        let sq = square_dealiased(&u);
        let hux = hilbert_transform(&space_derivative(&u));
        let pairing = quadrature_inner(&sq, &hux).unwrap().abs();
        let bound = sq.l2_norm() * gradient_norm(&u);
        convection = convection.max((pairing - bound).max(0.0) / (1.0 + bound));
    }
    vec![
        InvariantResult::new("cubic_annihilation", samples, cubic, 1e-11),
        InvariantResult::new("viscous_energy_skew", samples, skew, 1e-12),
        InvariantResult::new("hilbert_pairing_l", samples, hilbert_pairing, 1e-12),
        InvariantResult::new("convection_cauchy_schwarz", samples, convection, 1e-12),
    ]
}

/// Interpolation-probe stability: the empirical constant re-evaluated on the
/// doubled grid moves by less than 5%.
pub fn probe_stability(grid: GridSpec, seed: u64, samples: usize) -> Result<Vec<InvariantResult>> {
    let probe = interpolation_probe(samples, grid, derive_seed(seed, "interpolation-probe"))?;
    let refined = refine_ratio(&probe.worst).unwrap_or(probe.c_emp);
    let drift = (refined - probe.c_emp).abs() / probe.c_emp;
    Ok(vec![
        InvariantResult::new("probe_c_emp_finite", samples, 1.0 / probe.c_emp, 1e6),
        InvariantResult::new("probe_refinement_stability", samples, drift, 0.05),
    ])
}

/// The full verification battery.
pub fn full_suite(grid: GridSpec, seed: u64, samples: usize) -> Result<Vec<InvariantResult>> {
    let mut out = identity_suite(grid, seed, samples);
    out.extend(sobolev_suite(grid, seed, samples));
    out.extend(burgers_suite(grid, seed, samples));
    out.extend(probe_stability(grid, seed, samples.max(64))?);
    Ok(out)
}
