//! Matrix-free GMRES on spectral fields, used for the preconditioned Newton
//! correction. Full orthogonalization (no restart): the preconditioned
//! operator is a compact perturbation of the identity and converges in a few
//! dozen iterations at desk scale.

use crate::error::{Error, Result};
use crate::field::{l2_inner, Field};

pub(crate) struct GmresOutcome {
    pub solution: Field,
    pub iterations: usize,
    pub relative_residual: f64,
}

pub(crate) fn gmres(
    apply: impl Fn(&Field) -> Result<Field>,
    rhs: &Field,
    rel_tol: f64,
    max_iter: usize,
) -> Result<GmresOutcome> {
    let beta = rhs.l2_norm();
    if beta == 0.0 {
        return Ok(GmresOutcome {
            solution: rhs.scaled(0.0),
            iterations: 0,
            relative_residual: 0.0,
        });
    }

    let mut basis: Vec<Field> = vec![rhs.scaled(1.0 / beta)];
    let mut hess: Vec<Vec<f64>> = Vec::new(); // column j holds h[0..=j+1]
    let mut cs: Vec<f64> = Vec::new();
    let mut sn: Vec<f64> = Vec::new();
    let mut g = vec![beta];

    for j in 0..max_iter {
        let mut w = apply(&basis[j])?;
        let mut col = Vec::with_capacity(j + 2);
        for v in basis.iter() {
            let hij = l2_inner(&w, v)?;
            w = w.axpy(-hij, v)?;
            col.push(hij);
        }
        // One re-orthogonalization pass keeps the basis clean without
        // noticeably changing cost at these sizes.
        for (i, v) in basis.iter().enumerate() {
            let corr = l2_inner(&w, v)?;
            w = w.axpy(-corr, v)?;
            col[i] += corr;
        }
        let hlast = w.l2_norm();
        col.push(hlast);

        // Apply accumulated Givens rotations to the new column.
        for i in 0..j {
            let t = cs[i] * col[i] + sn[i] * col[i + 1];
            col[i + 1] = -sn[i] * col[i] + cs[i] * col[i + 1];
            col[i] = t;
        }
        let denom = (col[j] * col[j] + col[j + 1] * col[j + 1]).sqrt();
        if denom == 0.0 {
            return Err(Error::LinearSolve("gmres breakdown: zero column".into()));
        }
        cs.push(col[j] / denom);
        sn.push(col[j + 1] / denom);
        col[j] = denom;
        col[j + 1] = 0.0;
        g.push(-sn[j] * g[j]);
        g[j] *= cs[j];
        hess.push(col);

        let res = g[j + 1].abs() / beta;
        let happy = hlast < 1e-14 * beta;
        if res <= rel_tol || happy || j + 1 == max_iter {
            if res > rel_tol && !happy {
                return Err(Error::LinearSolve(format!(
                    "gmres stalled at relative residual {res:e} after {} iterations",
                    j + 1
                )));
            }
            // Back-substitute the triangular system and assemble the update.
            let dim = j + 1;
            let mut y = vec![0.0; dim];
            for i in (0..dim).rev() {
                let mut acc = g[i];
                for l in i + 1..dim {
                    acc -= hess[l][i] * y[l];
                }
                y[i] = acc / hess[i][i];
            }
            let mut x = rhs.scaled(0.0);
            for (yi, v) in y.iter().zip(basis.iter()) {
                x = x.axpy(*yi, v)?;
            }
            return Ok(GmresOutcome {
                solution: x,
                iterations: dim,
                relative_residual: res,
            });
        }
        basis.push(w.scaled(1.0 / hlast));
    }
    unreachable!("loop returns on the final iteration")
}
