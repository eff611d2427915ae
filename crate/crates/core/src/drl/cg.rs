use crate::nn::ParamVector;
use crate::Result;

/// Approximately solves `A x = b` for symmetric positive-definite `A`, given
/// only products `A v`. Starts from zero; stops after `iters` iterations or
/// once the squared residual norm drops below `tol`.
pub fn conjugate_gradient<F>(mut apply: F, b: &ParamVector, iters: usize, tol: f64) -> Result<ParamVector>
where
    F: FnMut(&ParamVector) -> Result<ParamVector>,
{
    let mut x = ParamVector::zeros(b.len());
    let mut r = b.clone();
    let mut p = b.clone();
    let mut rr = r.dot(&r);
    for _ in 0..iters {
        if rr < tol {
            break;
        }
        let ap = apply(&p)?;
        let alpha = rr / p.dot(&ap);
        x.axpy(alpha, &p);
        r.axpy(-alpha, &ap);
        let rr_next = r.dot(&r);
        let beta = rr_next / rr;
        for (pi, ri) in p.iter_mut().zip(r.iter()) {
            *pi = ri + beta * *pi;
        }
        rr = rr_next;
    }
    Ok(x)
}
