//! Seeded random unitaries and symmetric gates for the verification suite.

use ndarray::Array2;
use ndarray_linalg::QR;
use num_complex::Complex64 as C64;
use rand::Rng;

use crate::error::SptError;
use crate::linalg::{dagger, exp_i_hermitian, kron};
use crate::mps::OnSiteAction;

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn random_unitary(dim: usize, rng: &mut impl Rng) -> Result<Array2<C64>, SptError> {
    let mut g = Array2::<C64>::zeros((dim, dim));
    for v in g.iter_mut() {
        *v = C64::new(gaussian(rng), gaussian(rng));
    }
    let (q, r) = g.qr().map_err(|e| SptError::Invalid(format!("qr failed: {e}")))?;
    // fix the phase convention so the distribution is Haar
    let mut q = q;
    for j in 0..dim {
        let rjj = r[(j, j)];
        if rjj.norm() > 0.0 {
            let phase = rjj / rjj.norm();
            for i in 0..dim {
                q[(i, j)] *= phase;
            }
        }
    }
    Ok(q)
}

/// Random two-site unitary commuting with U(g) (x) U(g) for every g:
/// a random hermitian generator is averaged over the group action and
/// exponentiated.
pub fn random_symmetric_gate(act: &OnSiteAction, rng: &mut impl Rng) -> Result<Array2<C64>, SptError> {
    let d2 = act.dim() * act.dim();
    let mut h = Array2::<C64>::zeros((d2, d2));
    for v in h.iter_mut() {
        *v = C64::new(gaussian(rng), gaussian(rng));
    }
    let h = (&h + &dagger(&h)).mapv(|z| z * 0.5);
    let mut avg = Array2::<C64>::zeros((d2, d2));
    for u in act.matrices() {
        let uu = kron(u, u);
        avg = avg + uu.dot(&h).dot(&dagger(&uu));
    }
    avg.mapv_inplace(|z| z / act.group().order() as f64);
    let avg = (&avg + &dagger(&avg)).mapv(|z| z * 0.5);
    exp_i_hermitian(&avg, 1.0)
}

fn gaussian(rng: &mut impl Rng) -> f64 {
    // Box-Muller
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen_range(0.0..1.0);
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
