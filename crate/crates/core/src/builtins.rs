//! Named states and symmetry actions used by the CLI and the test suite.

use ndarray::{array, Array2};
use num_complex::Complex64 as C64;
use std::sync::Arc;

use crate::error::SptError;
use crate::group::FiniteGroup;
use crate::mps::{OnSiteAction, UniformMPS};

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// AKLT chain (d = 3, D = 2) in right-canonical form, with the Z2 x Z2
/// pi-rotation action. Physical basis order: (+1, 0, -1) of S^z.
pub fn aklt() -> Result<(UniformMPS, OnSiteAction), SptError> {
    let s = (2.0f64 / 3.0).sqrt();
    let t = (1.0f64 / 3.0).sqrt();
    // A^+ = sqrt(2/3) sigma^+, A^0 = -sqrt(1/3) sigma^z, A^- = -sqrt(2/3) sigma^-
    let a_plus = array![[c(0.0, 0.0), c(s, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
    let a_zero = array![[c(-t, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(t, 0.0)]];
    let a_minus = array![[c(0.0, 0.0), c(0.0, 0.0)], [c(-s, 0.0), c(0.0, 0.0)]];
    let state = UniformMPS::new(vec![a_plus, a_zero, a_minus], "aklt")?;
    let action = aklt_pi_rotations()?;
    Ok((state, action))
}

/// Z2 x Z2 acting on spin 1 by pi-rotations about z and x.
/// Element encoding: 0 = e, 1 = x-rotation, 2 = z-rotation, 3 = both.
pub fn aklt_pi_rotations() -> Result<OnSiteAction, SptError> {
    let z2 = FiniteGroup::cyclic(2)?;
    let group = FiniteGroup::direct_product(&z2, &z2)?;
    let e: Array2<C64> = Array2::eye(3);
    // exp(i pi S^x): |+> <-> |->, |0> -> -|0>
    let ux = array![
        [c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)],
        [c(0.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)],
        [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]
    ];
    // exp(i pi S^z) = diag(-1, 1, -1)
    let uz = array![
        [c(-1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        [c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]
    ];
    let uxz = ux.dot(&uz);
    OnSiteAction::new(group, vec![e, ux, uz, uxz])
}

/// Symmetric spin-1 product state |0> (the S^z = 0 level) under the same
/// pi-rotation action; its H^2 class is trivial.
pub fn product_spin1() -> Result<(UniformMPS, OnSiteAction), SptError> {
    let state = UniformMPS::product(&[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)], "product_spin1")?;
    Ok((state, aklt_pi_rotations()?))
}

/// Product state |k> of a d = n chain with the diagonal Z_n action
/// U(g) = diag(omega^{g j}); the translation index is the character k g / n.
pub fn charged_product(n: usize, charge: usize) -> Result<(UniformMPS, OnSiteAction), SptError> {
    if n == 0 || charge >= n {
        return Err(SptError::Invalid("charged_product needs 0 <= charge < n".into()));
    }
    let group = FiniteGroup::cyclic(n)?;
    let mut amps = vec![c(0.0, 0.0); n];
    amps[charge] = c(1.0, 0.0);
    let state = UniformMPS::product(&amps, format!("charged_product({n},{charge})"))?;
    let action = cyclic_diagonal_action(&group, &(0..n as i64).collect::<Vec<_>>())?;
    Ok((state, action))
}

/// Diagonal action of Z_n on a d-level site: U(g) = diag(omega^{g c_j}) for
/// the given per-level charges.
pub fn cyclic_diagonal_action(group: &Arc<FiniteGroup>, charges: &[i64]) -> Result<OnSiteAction, SptError> {
    let n = group.order();
    let d = charges.len();
    let matrices = (0..n)
        .map(|g| {
            let mut u = Array2::<C64>::zeros((d, d));
            for (j, &cj) in charges.iter().enumerate() {
                let angle = 2.0 * std::f64::consts::PI * (g as f64) * (cj as f64) / (n as f64);
                u[(j, j)] = C64::from_polar(1.0, angle);
            }
            u
        })
        .collect();
    OnSiteAction::new(group.clone(), matrices)
}

/// 1D cluster state on a 2-qubit unit cell (d = 4, D = 2), protected by the
/// Z2 x Z2 symmetry generated by X on the odd and even sublattices.
pub fn cluster_z2z2() -> Result<(UniformMPS, OnSiteAction), SptError> {
    let h = 1.0 / 2.0f64.sqrt();
    // single-site cluster tensors: virtual space carries the previous qubit,
    // the CZ sign lands on the next tensor
    let a0 = array![[c(h, 0.0), c(h, 0.0)], [c(0.0, 0.0), c(0.0, 0.0)]];
    let a1 = array![[c(0.0, 0.0), c(0.0, 0.0)], [c(h, 0.0), c(-h, 0.0)]];
    let site = [a0, a1];
    // block two sites: cell tensor B^(s1 s2) = A^(s1) A^(s2)
    let mut tensors = Vec::with_capacity(4);
    for s1 in 0..2 {
        for s2 in 0..2 {
            tensors.push(site[s1].dot(&site[s2]));
        }
    }
    let state = UniformMPS::new(tensors, "cluster_z2z2")?;

    let z2 = FiniteGroup::cyclic(2)?;
    let group = FiniteGroup::direct_product(&z2, &z2)?;
    let id: Array2<C64> = Array2::eye(2);
    let x = array![[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
    // element g = (g1, g2) acts by X^{g1} on the first qubit, X^{g2} on the second
    let matrices = vec![
        crate::linalg::kron(&id, &id),
        crate::linalg::kron(&id, &x),
        crate::linalg::kron(&x, &id),
        crate::linalg::kron(&x, &x),
    ];
    let action = OnSiteAction::new(group, matrices)?;
    Ok((state, action))
}

/// Names and shapes of everything constructible by name, for `list-builtins`.
pub fn catalog() -> Vec<(&'static str, &'static str, String)> {
    vec![
        ("group", "cyclic(n)", "Z_n, order n".into()),
        ("group", "product(a, b, ...)", "direct product, lexicographic encoding".into()),
        ("group", "table(rows)", "explicit multiplication table, order <= 64".into()),
        ("group", "symmetric(n)", "S_n for n <= 5".into()),
        ("state", "product(amplitudes)", "product state, d = len, D = 1".into()),
        ("state", "charged_product(n, k)", "|k> with the diagonal Z_n action, d = n".into()),
        ("state", "aklt", "AKLT chain, d = 3, D = 2, Z2 x Z2 pi-rotations".into()),
        ("state", "cluster_z2z2", "cluster state on a 2-qubit cell, d = 4, D = 2".into()),
        ("action", "cyclic_diag(charges)", "U(g) = diag(omega^{g c_j}) for Z_n".into()),
        ("action", "aklt_pi_rotations", "Z2 x Z2 pi-rotations on spin 1".into()),
        ("action", "trivial(d)", "identity action".into()),
        ("action", "explicit(matrices)", "one unitary per group element".into()),
    ]
}
