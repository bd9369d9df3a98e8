//! Exponential time integrator for systems `u' = c u + N(u, t)` with a
//! diagonal stiff part, used by the periodic-attractor oracle and by the
//! period (monodromy) map.
//!
//! The diffusion symbol is integrated exactly through the exponential; the
//! remaining term is advanced with the four-stage exponential Runge-Kutta
//! scheme, so only the non-stiff part limits the step size.

/// phi_j(z) = (e^z - sum_{n<j} z^n / n!) / z^j for j = 1, 2, 3, evaluated
/// with a series switchover that avoids cancellation near z = 0.
fn phi123(z: f64) -> (f64, f64, f64) {
    if z.abs() < 0.5 {
        let mut phis = [0.0f64; 3];
        for (j, phi) in phis.iter_mut().enumerate() {
            // phi_{j+1}(z) = sum_{n >= 0} z^n / (n + j + 1)!
            let mut term = 1.0 / (1..=j + 1).product::<usize>() as f64;
            let mut acc = term;
            for n in 1..=18 {
                term *= z / (n + j + 1) as f64;
                acc += term;
            }
            *phi = acc;
        }
        (phis[0], phis[1], phis[2])
    } else {
        let e = z.exp();
        let phi1 = (e - 1.0) / z;
        let phi2 = (phi1 - 1.0) / z;
        let phi3 = (phi2 - 0.5) / z;
        (phi1, phi2, phi3)
    }
}

/// Precomputed per-mode step factors for one step size.
pub(crate) struct DiagExpStepper {
    pub h: f64,
    e_full: Vec<f64>,
    e_half: Vec<f64>,
    q_half: Vec<f64>,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f3: Vec<f64>,
}

impl DiagExpStepper {
    pub fn new(symbols: &[f64], h: f64) -> Self {
        let n = symbols.len();
        let mut s = DiagExpStepper {
            h,
            e_full: Vec::with_capacity(n),
            e_half: Vec::with_capacity(n),
            q_half: Vec::with_capacity(n),
            f1: Vec::with_capacity(n),
            f2: Vec::with_capacity(n),
            f3: Vec::with_capacity(n),
        };
        for &c in symbols {
            let z = c * h;
            s.e_full.push(z.exp());
            s.e_half.push((0.5 * z).exp());
            let (p1h, _, _) = phi123(0.5 * z);
            s.q_half.push(0.5 * h * p1h);
            let (p1, p2, p3) = phi123(z);
            s.f1.push(h * (p1 - 3.0 * p2 + 4.0 * p3));
            s.f2.push(h * (p2 - 2.0 * p3));
            s.f3.push(h * (4.0 * p3 - p2));
        }
        s
    }

    /// Advance `state` from time `t` by one step; `nonlin(u, t)` evaluates the
    /// non-stiff right-hand side into its output slice.
    pub fn step(
        &self,
        state: &mut [f64],
        t: f64,
        nonlin: &mut impl FnMut(&[f64], f64, &mut [f64]),
    ) {
        let n = state.len();
        let h = self.h;
        let mut k1 = vec![0.0; n];
        let mut k2 = vec![0.0; n];
        let mut k3 = vec![0.0; n];
        let mut k4 = vec![0.0; n];
        let mut a = vec![0.0; n];
        let mut b = vec![0.0; n];
        let mut c = vec![0.0; n];

        nonlin(state, t, &mut k1);
        for i in 0..n {
            a[i] = self.e_half[i] * state[i] + self.q_half[i] * k1[i];
        }
        nonlin(&a, t + 0.5 * h, &mut k2);
        for i in 0..n {
            b[i] = self.e_half[i] * state[i] + self.q_half[i] * k2[i];
        }
        nonlin(&b, t + 0.5 * h, &mut k3);
        for i in 0..n {
            c[i] = self.e_half[i] * a[i] + self.q_half[i] * (2.0 * k3[i] - k1[i]);
        }
        nonlin(&c, t + h, &mut k4);
        for i in 0..n {
            state[i] = self.e_full[i] * state[i]
                + self.f1[i] * k1[i]
                + 2.0 * self.f2[i] * (k2[i] + k3[i])
                + self.f3[i] * k4[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi_functions_match_direct_formulas_across_the_switchover() {
        for &z in &[-0.499, -0.501, 0.499, 0.501] {
            let (a1, a2, a3) = phi123(z);
            let e = z.exp();
            assert!((a1 - (e - 1.0) / z).abs() < 1e-14);
            assert!((a2 - (e - 1.0 - z) / (z * z)).abs() < 1e-12);
            assert!((a3 - (e - 1.0 - z - 0.5 * z * z) / (z * z * z)).abs() < 1e-11);
        }
        let (p1, p2, p3) = phi123(0.0);
        assert!((p1 - 1.0).abs() < 1e-15);
        assert!((p2 - 0.5).abs() < 1e-15);
        assert!((p3 - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn pure_diffusion_is_integrated_exactly() {
        let c = [-3.7, -120.0, 0.0];
        let stepper = DiagExpStepper::new(&c, 0.05);
        let mut u = vec![1.0, 1.0, 1.0];
        let mut zero = |_: &[f64], _: f64, out: &mut [f64]| out.fill(0.0);
        for _ in 0..20 {
            stepper.step(&mut u, 0.0, &mut zero);
        }
        for (i, &ci) in c.iter().enumerate() {
            assert!((u[i] - (ci * 1.0f64).exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn fourth_order_convergence_on_a_forced_scalar() {
        // u' = -u + cos(2 pi t), periodic-ready test with known solution
        // against a very fine reference.
        let rhs = |u: f64, t: f64| -u + (std::f64::consts::TAU * t).cos();
        let exact = {
            let mut u = 0.3f64;
            let h = 1e-6;
            let mut t = 0.0;
            for _ in 0..1_000_000 {
                // RK4 reference
                let k1 = rhs(u, t);
                let k2 = rhs(u + 0.5 * h * k1, t + 0.5 * h);
                let k3 = rhs(u + 0.5 * h * k2, t + 0.5 * h);
                let k4 = rhs(u + h * k3, t + h);
                u += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                t += h;
            }
            u
        };
        let mut errs = Vec::new();
        for steps in [32usize, 64] {
            let h = 1.0 / steps as f64;
            let stepper = DiagExpStepper::new(&[-1.0], h);
            let mut u = vec![0.3];
            let mut nl =
                |_: &[f64], t: f64, out: &mut [f64]| out[0] = (std::f64::consts::TAU * t).cos();
            for i in 0..steps {
                stepper.step(&mut u, i as f64 * h, &mut nl);
            }
            errs.push((u[0] - exact).abs());
        }
        let order = (errs[0] / errs[1]).log2();
        assert!(order > 3.7, "observed order {order}");
    }
}
