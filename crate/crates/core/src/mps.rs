//! Uniform matrix-product states with an on-site unitary symmetry action:
//! transfer operators, canonical form, twisted (mixed) transfer eigenpairs,
//! and the state constructions the index layer consumes (stacking, on-site
//! basis change, blocking, one brickwork layer of a symmetric gate).

use ndarray::Array2;
use ndarray_linalg::{Eig, EigVals, SVD};
use num_complex::Complex64 as C64;
use std::sync::Arc;

use crate::error::SptError;
use crate::group::FiniteGroup;
use crate::linalg::{
    commutator_norm, dagger, eigh, ensure_unitary, frobenius_norm, hermitize, identity, inner,
    polar_unitary, unitary_deviation,
};

pub const TOL_EIG: f64 = 1e-10;
pub const TOL_UNITARY: f64 = 1e-8;
pub const TOL_PROJ: f64 = 1e-6;
pub const TOL_REP: f64 = 1e-8;
pub const MAX_POWER_ITER: usize = 10_000;
/// Largest physical dimension `block` will produce.
pub const MAX_BLOCKED_DIM: usize = 4096;

#[derive(Debug, Clone)]
pub struct UniformMPS {
    physical_dim: usize,
    bond_dim: usize,
    tensors: Vec<Array2<C64>>,
    label: String,
}

/// The on-site symmetry: a true unitary linear representation of G.
#[derive(Debug, Clone)]
pub struct OnSiteAction {
    group: Arc<FiniteGroup>,
    matrices: Vec<Array2<C64>>,
}

/// Leading eigendata of the mixed transfer operator for one group element.
#[derive(Debug, Clone)]
pub struct MpsSymmetryData {
    /// Unit-modulus leading eigenvalue of the twisted transfer operator.
    pub eigenphase: C64,
    /// Gauge-fixed unitary acting on the virtual (bond) space.
    pub virtual_unitary: Array2<C64>,
    /// Max deviation of the symmetry identity from exactness.
    pub residual: f64,
}

impl UniformMPS {
    pub fn new(tensors: Vec<Array2<C64>>, label: impl Into<String>) -> Result<Self, SptError> {
        if tensors.is_empty() {
            return Err(SptError::Invalid("MPS needs at least one physical level".into()));
        }
        let bond = tensors[0].nrows();
        for t in &tensors {
            if t.nrows() != bond || t.ncols() != bond {
                return Err(SptError::Dimension("site matrices must be square and equal-sized".into()));
            }
        }
        Ok(UniformMPS { physical_dim: tensors.len(), bond_dim: bond, tensors, label: label.into() })
    }

    /// Product state with the given on-site amplitudes (D = 1), normalized.
    pub fn product(amplitudes: &[C64], label: impl Into<String>) -> Result<Self, SptError> {
        let norm: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(SptError::Invalid("zero product-state amplitudes".into()));
        }
        let tensors = amplitudes
            .iter()
            .map(|a| Array2::from_elem((1, 1), a / norm))
            .collect();
        Self::new(tensors, label)
    }

    pub fn physical_dim(&self) -> usize {
        self.physical_dim
    }

    pub fn bond_dim(&self) -> usize {
        self.bond_dim
    }

    pub fn tensors(&self) -> &[Array2<C64>] {
        &self.tensors
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Matrix of the transfer map X -> sum_i A^i X A^i{\dag} acting on
    /// vectorized D x D matrices (row-major).
    pub fn transfer_matrix(&self) -> Array2<C64> {
        mixed_transfer(&self.tensors, None)
    }

    /// ||sum_i A^i A^i{\dag} - I||, zero in the right-canonical gauge.
    pub fn right_canonical_deviation(&self) -> f64 {
        let d = self.bond_dim;
        let mut acc = Array2::<C64>::zeros((d, d));
        for a in &self.tensors {
            acc = acc + a.dot(&dagger(a));
        }
        frobenius_norm(&(acc - identity(d)))
    }

    /// Smallest blocking length at which the map from bond pairs to physical
    /// strings spans all D x D matrices, or None up to the tested cap.
    pub fn injectivity_length(&self) -> Option<usize> {
        let d2 = self.bond_dim * self.bond_dim;
        let mut strings: Vec<Array2<C64>> = vec![identity(self.bond_dim)];
        for len in 1..=12 {
            let mut next = Vec::with_capacity(strings.len() * self.physical_dim);
            for s in &strings {
                for a in &self.tensors {
                    next.push(s.dot(a));
                }
            }
            strings = next;
            if strings.len() > 8192 {
                return None;
            }
            // rank of the (d^len) x D^2 matrix of vectorized strings
            let mut m = Array2::<C64>::zeros((strings.len(), d2));
            for (r, s) in strings.iter().enumerate() {
                for (c, v) in s.iter().enumerate() {
                    m[(r, c)] = *v;
                }
            }
            if let Ok((_, sv, _)) = m.svd(false, false) {
                let smax = sv.iter().cloned().fold(0.0f64, f64::max);
                let rank = sv.iter().filter(|&&x| x > 1e-10 * smax.max(1.0)).count();
                if rank == d2 {
                    return Some(len);
                }
            }
        }
        None
    }

    /// Right-canonical form: spectral radius scaled to 1, right fixed point
    /// the identity. Non-minimal bond spaces are projected onto the fixed
    /// point support first; a genuinely degenerate transfer operator is
    /// rejected.
    pub fn canonicalize(&self) -> Result<UniformMPS, SptError> {
        let mut tensors = self.tensors.clone();
        for _round in 0..32 {
            let d = tensors[0].nrows();
            let t = mixed_transfer(&tensors, None);
            let vals = t
                .eigvals()
                .map_err(|e| SptError::Invalid(format!("transfer eig failed: {e}")))?;
            let radius = vals.iter().map(|v| v.norm()).fold(0.0f64, f64::max);
            if radius < 1e-300 {
                return Err(SptError::Invalid("zero transfer operator".into()));
            }
            let scale = radius.sqrt();
            for a in tensors.iter_mut() {
                a.mapv_inplace(|z| z / scale);
            }

            // PSD fixed points of the (now radius-1) CP map and its adjoint,
            // by damped iteration from the identity: the damping contracts
            // every direction except the genuine eigenvalue-1 fixed space,
            // so redundant bond directions introduced by circuit layers or
            // padding decay away and their support can be cut
            let right = damped_fixed_point(&tensors, false)?;
            let rp = support_projector(&right)?;
            if rp.ncols() < d {
                tensors = tensors.iter().map(|a| dagger(&rp).dot(a).dot(&rp)).collect();
                continue;
            }
            let left = damped_fixed_point(&tensors, true)?;
            let lp = support_projector(&left)?;
            if lp.ncols() < d {
                tensors = tensors.iter().map(|a| dagger(&lp).dot(a).dot(&lp)).collect();
                continue;
            }

            // minimal bond reached: a remaining degenerate leading modulus is
            // a genuinely non-injective (GHZ-like) state and is rejected
            let t = mixed_transfer(&tensors, None);
            let (vals, _) = t
                .eig()
                .map_err(|e| SptError::Invalid(format!("transfer eig failed: {e}")))?;
            let (_, lead) = vals
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.norm().total_cmp(&b.1.norm()))
                .expect("nonempty spectrum");
            let radius = lead.norm();
            let multiplicity = vals
                .iter()
                .filter(|v| v.norm() > radius * (1.0 - 1e-8))
                .count()
                .max(1);
            if multiplicity > 1 {
                return Err(SptError::DegenerateTransfer { multiplicity });
            }
            if (radius - 1.0).abs() > 1e-8 || lead.im.abs() > 1e-8 || lead.re < 0.0 {
                return Err(SptError::Invalid(format!(
                    "leading transfer eigenvalue {lead} is not positive real"
                )));
            }

            // gauge: X = r^{1/2}, A -> X^{-1} A X
            let (w, p) = eigh(&right)?;
            let wmax = w.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
            let mut x = Array2::<C64>::zeros((d, d));
            let mut x_inv = Array2::<C64>::zeros((d, d));
            for k in 0..d {
                let lam = w[k].max(0.0);
                if lam < 1e-14 * wmax {
                    return Err(SptError::Invalid("right fixed point nearly singular after reduction".into()));
                }
                let (s, si) = (lam.sqrt(), 1.0 / lam.sqrt());
                let col = p.column(k);
                for i in 0..d {
                    for j in 0..d {
                        let outer = col[i] * col[j].conj();
                        x[(i, j)] += outer * s;
                        x_inv[(i, j)] += outer * si;
                    }
                }
            }
            let gauged: Vec<Array2<C64>> = tensors.iter().map(|a| x_inv.dot(a).dot(&x)).collect();
            return UniformMPS::new(gauged, self.label.clone());
        }
        Err(SptError::Invalid("bond reduction did not stabilize".into()))
    }

    /// Site-wise tensor product of two states (and of their actions).
    pub fn stack(
        a: &UniformMPS,
        act_a: &OnSiteAction,
        b: &UniformMPS,
        act_b: &OnSiteAction,
    ) -> Result<(UniformMPS, OnSiteAction), SptError> {
        if act_a.group != act_b.group {
            return Err(SptError::Mismatch("stacking needs the same symmetry group".into()));
        }
        let mut tensors = Vec::with_capacity(a.physical_dim * b.physical_dim);
        for ta in &a.tensors {
            for tb in &b.tensors {
                tensors.push(crate::linalg::kron(ta, tb));
            }
        }
        let state = UniformMPS::new(tensors, format!("{} (x) {}", a.label, b.label))?;
        let matrices = act_a
            .matrices
            .iter()
            .zip(&act_b.matrices)
            .map(|(ua, ub)| crate::linalg::kron(ua, ub))
            .collect();
        let action = OnSiteAction::new(act_a.group.clone(), matrices)?;
        Ok((state, action))
    }

    /// On-site basis change by the unitary v: tensors pick up v on the
    /// physical index and the action is conjugated, U(g) -> v U(g) v^dag.
    pub fn basis_change(
        &self,
        act: &OnSiteAction,
        v: &Array2<C64>,
    ) -> Result<(UniformMPS, OnSiteAction), SptError> {
        if v.nrows() != self.physical_dim || v.ncols() != self.physical_dim {
            return Err(SptError::Dimension("basis change must act on the physical dimension".into()));
        }
        ensure_unitary(v, TOL_UNITARY)?;
        let d = self.physical_dim;
        let bond = self.bond_dim;
        let mut tensors = vec![Array2::<C64>::zeros((bond, bond)); d];
        for i in 0..d {
            for j in 0..d {
                let c = v[(i, j)];
                if c != C64::new(0.0, 0.0) {
                    tensors[i] = &tensors[i] + &self.tensors[j].mapv(|z| z * c);
                }
            }
        }
        let state = UniformMPS::new(tensors, self.label.clone())?;
        let vd = dagger(v);
        let matrices = act.matrices.iter().map(|u| v.dot(u).dot(&vd)).collect();
        let action = OnSiteAction::new(act.group.clone(), matrices)?;
        Ok((state, action))
    }

    /// Re-uniformize on a k-site unit cell: physical strings of length k,
    /// action the k-fold tensor power.
    pub fn block(&self, act: &OnSiteAction, k: usize) -> Result<(UniformMPS, OnSiteAction), SptError> {
        if k == 0 {
            return Err(SptError::Invalid("blocking length must be >= 1".into()));
        }
        let dk = self.physical_dim.checked_pow(k as u32).filter(|&x| x <= MAX_BLOCKED_DIM);
        let Some(dk) = dk else {
            return Err(SptError::Budget(format!("d^{k} exceeds {MAX_BLOCKED_DIM}")));
        };
        let mut tensors: Vec<Array2<C64>> = vec![identity(self.bond_dim)];
        for _ in 0..k {
            let mut next = Vec::with_capacity(tensors.len() * self.physical_dim);
            for t in &tensors {
                for a in &self.tensors {
                    next.push(t.dot(a));
                }
            }
            tensors = next;
        }
        debug_assert_eq!(tensors.len(), dk);
        let state = UniformMPS::new(tensors, format!("{} [blocked {k}]", self.label))?;
        let mut matrices = Vec::with_capacity(act.matrices.len());
        for u in &act.matrices {
            let mut acc = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
            for _ in 0..k {
                acc = crate::linalg::kron(&acc, u);
            }
            matrices.push(acc);
        }
        let action = OnSiteAction::new(act.group.clone(), matrices)?;
        Ok((state, action))
    }

    /// One brickwork layer of a two-site gate commuting with U(g) (x) U(g):
    /// the within-cell (even) gates are contracted directly, the straddling
    /// (odd) gates through the operator Schmidt decomposition. Output lives
    /// on the 2-site unit cell; the bond grows by the gate's Schmidt rank
    /// and is brought back to minimal size by `canonicalize`.
    pub fn apply_symmetric_circuit(
        &self,
        act: &OnSiteAction,
        gate: &Array2<C64>,
    ) -> Result<(UniformMPS, OnSiteAction), SptError> {
        let d = self.physical_dim;
        let d2 = d * d;
        if gate.nrows() != d2 || gate.ncols() != d2 {
            return Err(SptError::Dimension(format!("gate must be {d2} x {d2}")));
        }
        ensure_unitary(gate, TOL_UNITARY)?;
        for u in &act.matrices {
            let uu = crate::linalg::kron(u, u);
            let dev = commutator_norm(gate, &uu);
            if dev > TOL_REP * (d2 as f64) {
                return Err(SptError::NonSymmetricGate(dev));
            }
        }

        // even layer on the blocked 2-site cell
        let trivial = OnSiteAction::trivial(act.group.clone(), d);
        let (blocked, _) = self.block(&trivial, 2)?;
        let bond = blocked.bond_dim;
        let mut cell = vec![Array2::<C64>::zeros((bond, bond)); d2];
        for p in 0..d2 {
            for q in 0..d2 {
                let c = gate[(p, q)];
                if c != C64::new(0.0, 0.0) {
                    cell[p] = &cell[p] + &blocked.tensors[q].mapv(|z| z * c);
                }
            }
        }

        // odd layer: gate straddles neighboring cells; G = sum_a P_a (x) Q_a
        let (p_ops, q_ops) = operator_schmidt(gate, d)?;
        let chi = p_ops.len();
        let new_bond = chi * bond;
        let mut out = vec![Array2::<C64>::zeros((new_bond, new_bond)); d2];
        for (i, j) in (0..d).flat_map(|i| (0..d).map(move |j| (i, j))) {
            let phys = i * d + j;
            for (ip, jp) in (0..d).flat_map(|ip| (0..d).map(move |jp| (ip, jp))) {
                let src = ip * d + jp;
                for (alpha, q_op) in q_ops.iter().enumerate() {
                    let ca = q_op[(i, ip)];
                    if ca == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for (beta, p_op) in p_ops.iter().enumerate() {
                        let cb = p_op[(j, jp)];
                        let coeff = ca * cb;
                        if coeff == C64::new(0.0, 0.0) {
                            continue;
                        }
                        for a in 0..bond {
                            for b in 0..bond {
                                out[phys][(alpha * bond + a, beta * bond + b)] +=
                                    coeff * cell[src][(a, b)];
                            }
                        }
                    }
                }
            }
        }
        let state = UniformMPS::new(out, format!("{} [circuit]", self.label))?;
        let matrices = act
            .matrices
            .iter()
            .map(|u| crate::linalg::kron(u, u))
            .collect();
        let action = OnSiteAction::new(act.group.clone(), matrices)?;
        Ok((state, action))
    }
}

/// Operator Schmidt decomposition of a two-site gate: G = sum_a P_a (x) Q_a,
/// singular values split evenly, rank truncated at numerical zero.
fn operator_schmidt(gate: &Array2<C64>, d: usize) -> Result<(Vec<Array2<C64>>, Vec<Array2<C64>>), SptError> {
    let mut m = Array2::<C64>::zeros((d * d, d * d));
    for i in 0..d {
        for j in 0..d {
            for k in 0..d {
                for l in 0..d {
                    // row (i, k): first-site matrix element; col (j, l): second
                    m[(i * d + k, j * d + l)] = gate[(i * d + j, k * d + l)];
                }
            }
        }
    }
    let (u, s, vt) = m
        .svd(true, true)
        .map_err(|e| SptError::Invalid(format!("gate svd failed: {e}")))?;
    let (u, vt) = (u.unwrap(), vt.unwrap());
    let smax = s.iter().cloned().fold(0.0f64, f64::max);
    let mut p_ops = Vec::new();
    let mut q_ops = Vec::new();
    for (a, &sv) in s.iter().enumerate() {
        if sv <= 1e-12 * smax {
            continue;
        }
        let w = sv.sqrt();
        let mut p = Array2::<C64>::zeros((d, d));
        let mut q = Array2::<C64>::zeros((d, d));
        for i in 0..d {
            for k in 0..d {
                p[(i, k)] = u[(i * d + k, a)] * w;
                q[(i, k)] = vt[(a, i * d + k)] * w;
            }
        }
        p_ops.push(p);
        q_ops.push(q);
    }
    Ok((p_ops, q_ops))
}

impl OnSiteAction {
    /// Validates that the matrices form a unitary linear representation.
    pub fn new(group: Arc<FiniteGroup>, matrices: Vec<Array2<C64>>) -> Result<Self, SptError> {
        if matrices.len() != group.order() {
            return Err(SptError::Mismatch("one matrix per group element required".into()));
        }
        let d = matrices[0].nrows();
        for u in &matrices {
            if u.nrows() != d || u.ncols() != d {
                return Err(SptError::Dimension("action matrices must share one dimension".into()));
            }
            ensure_unitary(u, TOL_UNITARY)?;
        }
        let id_dev = frobenius_norm(&(&matrices[group.identity()] - &identity(d)));
        if id_dev > TOL_REP {
            return Err(SptError::Invalid(format!("U(e) differs from identity by {id_dev}")));
        }
        for g in group.elements() {
            for h in group.elements() {
                let gh = group.mul(g, h);
                let dev = frobenius_norm(&(matrices[g].dot(&matrices[h]) - &matrices[gh]));
                if dev > TOL_REP {
                    return Err(SptError::Invalid(format!(
                        "U({g})U({h}) != U({gh}) (deviation {dev}); the on-site action must be a linear representation"
                    )));
                }
            }
        }
        Ok(OnSiteAction { group, matrices })
    }

    pub fn trivial(group: Arc<FiniteGroup>, dim: usize) -> Self {
        let matrices = group.elements().map(|_| identity(dim)).collect();
        OnSiteAction { group, matrices }
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.matrices[0].nrows()
    }

    pub fn matrix(&self, g: usize) -> &Array2<C64> {
        &self.matrices[g]
    }

    pub fn matrices(&self) -> &[Array2<C64>] {
        &self.matrices
    }
}

fn reshape_vec(v: &ndarray::Array1<C64>, d: usize) -> Array2<C64> {
    let mut m = Array2::zeros((d, d));
    for i in 0..d {
        for j in 0..d {
            m[(i, j)] = v[i * d + j];
        }
    }
    m
}

/// Columns spanning the numerically nonzero eigenspaces of a hermitian PSD
/// candidate; drops the null space.
fn support_projector(h: &Array2<C64>) -> Result<Array2<C64>, SptError> {
    let (w, v) = eigh(h)?;
    let wmax = w.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    // genuine support weights of a bond-D fixed point are O(1/D); iteration
    // leftovers sit many orders below this cutoff
    let kept: Vec<usize> = (0..w.len()).filter(|&k| w[k] > 1e-8 * wmax.max(1e-300)).collect();
    let mut p = Array2::zeros((h.nrows(), kept.len()));
    for (c, &k) in kept.iter().enumerate() {
        for i in 0..h.nrows() {
            p[(i, c)] = v[(i, k)];
        }
    }
    Ok(p)
}

/// Matrix of X -> sum_{ij} U_{ij} A^j X A^i{\dag} on vectorized D x D
/// matrices (row-major); U = None is the plain transfer operator.
fn mixed_transfer(tensors: &[Array2<C64>], twist: Option<&Array2<C64>>) -> Array2<C64> {
    let d = tensors[0].nrows();
    let mut t = Array2::<C64>::zeros((d * d, d * d));
    let n = tensors.len();
    for i in 0..n {
        for j in 0..n {
            let u = match twist {
                Some(u) => u[(i, j)],
                None => {
                    if i == j {
                        C64::new(1.0, 0.0)
                    } else {
                        continue;
                    }
                }
            };
            if u == C64::new(0.0, 0.0) {
                continue;
            }
            let (aj, ai) = (&tensors[j], &tensors[i]);
            for a in 0..d {
                for b in 0..d {
                    let x = u * aj[(a, b)];
                    if x == C64::new(0.0, 0.0) {
                        continue;
                    }
                    for c in 0..d {
                        for e in 0..d {
                            t[(a * d + c, b * d + e)] += x * ai[(c, e)].conj();
                        }
                    }
                }
            }
        }
    }
    t
}

/// PSD fixed point of the radius-1 CP map X -> sum A^i X A^i{\dag} (or its
/// adjoint) by damped iteration X <- (X + M(X)) / 2 from the identity. The
/// damping maps every transfer eigenvalue z on the unit circle except z = 1
/// strictly inside it, so the limit is the projection of the identity onto
/// the honest fixed space — positive semidefinite by construction.
fn damped_fixed_point(tensors: &[Array2<C64>], adjoint: bool) -> Result<Array2<C64>, SptError> {
    let d = tensors[0].nrows();
    let mut x = Array2::<C64>::eye(d);
    for _ in 0..MAX_POWER_ITER {
        let mut mx = Array2::<C64>::zeros((d, d));
        for a in tensors {
            if adjoint {
                mx = mx + dagger(a).dot(&x).dot(a);
            } else {
                mx = mx + a.dot(&x).dot(&dagger(a));
            }
        }
        let next = (&mx + &x).mapv(|z| z * 0.5);
        let norm = frobenius_norm(&next).max(1e-300);
        let next = next.mapv(|z| z / norm);
        let delta = frobenius_norm(&(&next - &x));
        x = next;
        if delta < 1e-13 {
            return Ok(hermitize(&x));
        }
    }
    Err(SptError::NoConvergence(MAX_POWER_ITER))
}

/// Leading eigenpair of the twisted transfer operator by power iteration,
/// with deterministic restarts. The eigenvector, reshaped and projected to
/// the nearest unitary, is the virtual action V(g); the phase gauge makes
/// the largest entry of its first column real positive.
pub fn mixed_transfer_leading(
    state: &UniformMPS,
    act: &OnSiteAction,
    g: usize,
) -> Result<MpsSymmetryData, SptError> {
    if act.dim() != state.physical_dim {
        return Err(SptError::Dimension("action dimension differs from the physical dimension".into()));
    }
    let dev = state.right_canonical_deviation();
    if dev > 1e-6 {
        return Err(SptError::Invalid(format!(
            "state must be right-canonical before index extraction (deviation {dev}); call canonicalize"
        )));
    }
    let d = state.bond_dim;
    let t = mixed_transfer(&state.tensors, Some(act.matrix(g)));

    let mut lambda = C64::new(0.0, 0.0);
    let mut x = Array2::<C64>::zeros((d, d));
    let mut converged = false;
    'restart: for seed in 0..4u64 {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut v: Vec<C64> = (0..d * d)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        // bias towards the identity; for g = e this is already the answer
        for i in 0..d {
            v[i * d + i] += C64::new(3.0, 0.0);
        }
        let mut xv = reshape_vec(&ndarray::Array1::from(v), d);
        let norm = frobenius_norm(&xv);
        xv.mapv_inplace(|z| z / norm);
        for _ in 0..MAX_POWER_ITER {
            let y = apply_flat(&t, &xv);
            let lam = inner(&xv, &y);
            let resid = frobenius_norm(&(&y - &xv.mapv(|z| z * lam)));
            let ynorm = frobenius_norm(&y);
            if ynorm < 1e-300 {
                continue 'restart;
            }
            xv = y.mapv(|z| z / ynorm);
            if resid < 1e-12 {
                lambda = lam;
                x = xv.clone();
                converged = true;
                break 'restart;
            }
        }
    }
    if !converged {
        return Err(SptError::NoConvergence(MAX_POWER_ITER));
    }
    if lambda.norm() < 1.0 - TOL_EIG {
        return Err(SptError::NotSymmetric { element: g, modulus: lambda.norm() });
    }
    let eigenphase = lambda / lambda.norm();

    // polar-project to the nearest unitary, then fix the phase gauge
    let mut v_g = polar_unitary(&x.mapv(|z| z * (d as f64).sqrt()))?;
    let (mut best, mut best_mag) = (C64::new(1.0, 0.0), -1.0);
    for i in 0..d {
        let e = v_g[(i, 0)];
        if e.norm() > best_mag {
            best_mag = e.norm();
            best = e;
        }
    }
    let phase = best.conj() / best.norm();
    v_g.mapv_inplace(|z| z * phase);
    debug_assert!(unitary_deviation(&v_g) < TOL_UNITARY);

    // residual of sum_j U_{ij} A^j = lambda V A^i V^dag
    let vd = dagger(&v_g);
    let mut residual = 0.0f64;
    let u = act.matrix(g);
    for i in 0..state.physical_dim {
        let mut lhs = Array2::<C64>::zeros((d, d));
        for j in 0..state.physical_dim {
            let c = u[(i, j)];
            if c != C64::new(0.0, 0.0) {
                lhs = lhs + state.tensors[j].mapv(|z| z * c);
            }
        }
        let rhs = v_g.dot(&state.tensors[i]).dot(&vd).mapv(|z| z * eigenphase);
        residual = residual.max(frobenius_norm(&(lhs - rhs)));
    }
    Ok(MpsSymmetryData { eigenphase, virtual_unitary: v_g, residual })
}

fn apply_flat(t: &Array2<C64>, x: &Array2<C64>) -> Array2<C64> {
    let d = x.nrows();
    let flat: Vec<C64> = x.iter().cloned().collect();
    let mut out = vec![C64::new(0.0, 0.0); d * d];
    for (r, o) in out.iter_mut().enumerate() {
        let mut acc = C64::new(0.0, 0.0);
        for (c, &xv) in flat.iter().enumerate() {
            let tv = t[(r, c)];
            if tv != C64::new(0.0, 0.0) {
                acc += tv * xv;
            }
        }
        *o = acc;
    }
    reshape_vec(&ndarray::Array1::from(out), d)
}
