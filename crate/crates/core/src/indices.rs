//! The computable invariants: the H^2(G, T) index from the projective
//! virtual action of the symmetry, the H^1(G, T) translation index from the
//! per-cell symmetry charge, the 2D report built from a row state, and the
//! invariance verification harness.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use std::fmt::Write as _;
use std::sync::Arc;

use crate::cochain::{Cochain, NumericCochain};
use crate::cohomology::{CohomologyClass, CohomologyGroup};
use crate::error::SptError;
use crate::group::FiniteGroup;
use crate::linalg::{dagger, frobenius_norm, identity};
use crate::mps::{mixed_transfer_leading, OnSiteAction, UniformMPS, TOL_PROJ};

/// Matrices carrying a projective representation: V(g) V(h) is proportional
/// to V(gh), the proportionality phases forming a 2-cocycle.
#[derive(Debug, Clone)]
pub struct ProjectiveRep {
    group: Arc<FiniteGroup>,
    dim: usize,
    matrices: Vec<Array2<C64>>,
}

impl ProjectiveRep {
    pub fn new(group: Arc<FiniteGroup>, matrices: Vec<Array2<C64>>) -> Result<Self, SptError> {
        if matrices.len() != group.order() {
            return Err(SptError::Mismatch("one matrix per group element".into()));
        }
        let dim = matrices[0].nrows();
        if matrices.iter().any(|m| m.nrows() != dim || m.ncols() != dim) {
            return Err(SptError::Dimension("projective rep matrices must be square, same size".into()));
        }
        Ok(ProjectiveRep { group, dim, matrices })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix(&self, g: usize) -> &Array2<C64> {
        &self.matrices[g]
    }

    /// Rescale each matrix so its determinant is 1 (principal root). The
    /// cocycle phases then land on D-th roots of unity, which keeps the
    /// snap step independent of the eigensolver's phase gauge.
    pub fn determinant_normalized(&self) -> Result<ProjectiveRep, SptError> {
        let matrices = self
            .matrices
            .iter()
            .map(|m| {
                let det = det_complex(m);
                if det.norm() < 1e-12 {
                    return Err(SptError::NonUnitary(1.0));
                }
                let root = det.powf(1.0 / self.dim as f64);
                Ok(m.mapv(|z| z / root))
            })
            .collect::<Result<Vec<_>, _>>()?;
        ProjectiveRep::new(self.group.clone(), matrices)
    }

    /// The 2-cocycle C(g, h) with V(g) V(h) V(gh)^{-1} = C(g, h) * I, as a
    /// numeric cochain of phases, plus the worst proportionality residual.
    pub fn extract_cocycle(&self) -> Result<(NumericCochain, f64), SptError> {
        let n = self.group.order();
        let mut values = Vec::with_capacity(n * n);
        let mut residual = 0.0f64;
        for g in self.group.elements() {
            for h in self.group.elements() {
                let gh = self.group.mul(g, h);
                let prod = self.matrices[g].dot(&self.matrices[h]).dot(&dagger(&self.matrices[gh]));
                let c = prod.diag().sum() / C64::new(self.dim as f64, 0.0);
                let dev = frobenius_norm(&(&prod - &identity(self.dim).mapv(|z| z * c)));
                residual = residual.max(dev);
                if c.norm() < 0.5 {
                    return Err(SptError::NotProjective(dev.max(1.0)));
                }
                values.push((c.arg() / (2.0 * std::f64::consts::PI)).rem_euclid(1.0));
            }
        }
        if residual > TOL_PROJ {
            return Err(SptError::NotProjective(residual));
        }
        let cochain = NumericCochain::new(self.group.clone(), 2, values, residual.max(1e-15))?;
        Ok((cochain, residual))
    }
}

fn det_complex(m: &Array2<C64>) -> C64 {
    // LU with partial pivoting; matrices here are tiny
    let n = m.nrows();
    let mut a = m.clone();
    let mut det = C64::new(1.0, 0.0);
    for k in 0..n {
        let (p, _) = (k..n)
            .map(|i| (i, a[(i, k)].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if a[(p, k)].norm() == 0.0 {
            return C64::new(0.0, 0.0);
        }
        if p != k {
            for j in 0..n {
                let t = a[(k, j)];
                a[(k, j)] = a[(p, j)];
                a[(p, j)] = t;
            }
            det = -det;
        }
        det *= a[(k, k)];
        for i in (k + 1)..n {
            let f = a[(i, k)] / a[(k, k)];
            for j in k..n {
                let v = a[(k, j)];
                a[(i, j)] = a[(i, j)] - f * v;
            }
        }
    }
    det
}

/// Everything the index pipelines report about one state.
#[derive(Debug, Clone)]
pub struct IndexReport {
    pub group_label: String,
    /// Exact character G -> (1/m)Z/Z, the translation index.
    pub h1: Option<Cochain>,
    pub h2: Option<CohomologyClass>,
    /// Index of the 90-degree rotated 2D state; present only when a column
    /// state was supplied.
    pub h2_rotated: Option<CohomologyClass>,
    /// Per-stage numeric diagnostics, (stage, value).
    pub residuals: Vec<(String, f64)>,
    /// Which operations and tolerances produced each entry.
    pub provenance: Vec<String>,
}

/// Full eigendata pass: lambda_g and V(g) for every group element, on a
/// canonicalized copy of the state.
pub fn symmetry_eigendata(
    state: &UniformMPS,
    act: &OnSiteAction,
) -> Result<(UniformMPS, Vec<crate::mps::MpsSymmetryData>), SptError> {
    let canon = state.canonicalize()?;
    let data = act
        .group()
        .elements()
        .map(|g| mixed_transfer_leading(&canon, act, g))
        .collect::<Result<Vec<_>, _>>()?;
    Ok((canon, data))
}

/// The 1D H^2 index: virtual projective action -> cocycle -> snap at
/// m = |G| -> class in H^2(G, (1/|G|)Z/Z).
pub fn h2_index(state: &UniformMPS, act: &OnSiteAction) -> Result<CohomologyClass, SptError> {
    h2_index_with_report(state, act).map(|(c, _)| c)
}

pub fn h2_index_with_report(
    state: &UniformMPS,
    act: &OnSiteAction,
) -> Result<(CohomologyClass, Vec<(String, f64)>), SptError> {
    index_pair(state, act).map(|(h2, _, residuals)| (h2, residuals))
}

/// Both indices from a single eigendata pass: the canonicalization and the
/// per-element power iterations dominate, so computing h2 and h1 together
/// costs the same as either one alone.
pub fn index_pair(
    state: &UniformMPS,
    act: &OnSiteAction,
) -> Result<(CohomologyClass, Cochain, Vec<(String, f64)>), SptError> {
    let group = act.group().clone();
    let (_, data) = symmetry_eigendata(state, act)?;
    let mut residuals = Vec::new();
    for (g, d) in data.iter().enumerate() {
        residuals.push((format!("symmetry_identity[{g}]"), d.residual));
    }
    let m = group.order() as u64;
    let phases: Vec<f64> = data
        .iter()
        .map(|d| (d.eigenphase.arg() / (2.0 * std::f64::consts::PI)).rem_euclid(1.0))
        .collect();
    let h1 = NumericCochain::new(group.clone(), 1, phases, 1e-12)?.snap_to_roots(m)?;
    let mut matrices: Vec<Array2<C64>> = data.into_iter().map(|d| d.virtual_unitary).collect();
    // the identity element's virtual action is the identity exactly
    matrices[group.identity()] = identity(matrices[0].nrows());
    let rep = ProjectiveRep::new(group.clone(), matrices)?.determinant_normalized()?;
    let (numeric, proj_residual) = rep.extract_cocycle()?;
    residuals.push(("projective_proportionality".into(), proj_residual));
    let snapped = numeric.snap_to_roots(m)?;
    let decomposition = CohomologyGroup::compute(&group, 2, m)?;
    let class = decomposition.class_of(&snapped)?;
    Ok((class, h1, residuals))
}

/// The 1D H^1 translation index: the per-cell symmetry charge alpha(g),
/// snapped to exact |G|-th roots and re-verified as a homomorphism.
pub fn translation_index(state: &UniformMPS, act: &OnSiteAction) -> Result<Cochain, SptError> {
    translation_index_with_report(state, act).map(|(c, _)| c)
}

pub fn translation_index_with_report(
    state: &UniformMPS,
    act: &OnSiteAction,
) -> Result<(Cochain, Vec<(String, f64)>), SptError> {
    let group = act.group().clone();
    let (_, data) = symmetry_eigendata(state, act)?;
    let mut residuals = Vec::new();
    let phases: Vec<f64> = data
        .iter()
        .enumerate()
        .map(|(g, d)| {
            residuals.push((format!("symmetry_identity[{g}]"), d.residual));
            (d.eigenphase.arg() / (2.0 * std::f64::consts::PI)).rem_euclid(1.0)
        })
        .collect();
    let numeric = NumericCochain::new(group.clone(), 1, phases, 1e-12)?;
    let snapped = numeric.snap_to_roots(group.order() as u64)?;
    Ok((snapped, residuals))
}

/// Index report for a 2D state given as an infinite tensor product of rows.
/// The rotated H^2 entry needs an explicit column state; without one it is
/// reported absent rather than inferred.
pub fn two_d_index_report(
    row: &UniformMPS,
    act: &OnSiteAction,
    column: Option<(&UniformMPS, &OnSiteAction)>,
) -> Result<IndexReport, SptError> {
    let (h2, h1, mut residuals) = index_pair(row, act)?;
    let mut provenance = vec![
        format!("h2: mixed transfer eigendata -> projective cocycle -> snap(m={}) -> class_of", act.group().order()),
        format!("h1: eigenphases -> snap(m={}) -> homomorphism check", act.group().order()),
        "tolerances: tol_eig=1e-10, tol_unitary=1e-8, tol_proj=1e-6".into(),
    ];
    let h2_rotated = match column {
        Some((col_state, col_act)) => {
            if col_act.group() != act.group() {
                return Err(SptError::Mismatch("column state must carry the same symmetry group".into()));
            }
            let (c, rc) = h2_index_with_report(col_state, col_act)?;
            residuals.extend(rc.into_iter().map(|(k, v)| (format!("rotated:{k}"), v)));
            provenance.push("h2_rotated: column state pipeline, same tolerances".into());
            Some(c)
        }
        None => {
            provenance.push("h2_rotated: not computable (no column state supplied)".into());
            None
        }
    };
    Ok(IndexReport {
        group_label: act.group().label().to_string(),
        h1: Some(h1),
        h2: Some(h2),
        h2_rotated,
        residuals,
        provenance,
    })
}

/// A transform whose effect on the indices is predicted by the invariance
/// theorems, together with the expected relation.
pub enum Transform {
    /// Preserves h1 and h2 exactly (post-snap).
    BasisChange(Array2<C64>),
    /// One brickwork layer; preserves h2, squares the per-cell character.
    SymmetricCircuit(Array2<C64>),
    /// Preserves h2, raises the character to the k-th power.
    Block(usize),
    /// Adds indices: class_add on h2, pointwise character addition on h1.
    Stack(UniformMPS, OnSiteAction),
}

impl Transform {
    pub fn name(&self) -> String {
        match self {
            Transform::BasisChange(_) => "basis_change".into(),
            Transform::SymmetricCircuit(_) => "symmetric_circuit".into(),
            Transform::Block(k) => format!("block({k})"),
            Transform::Stack(s, _) => format!("stack({})", s.label()),
        }
    }
}

#[derive(Debug, Clone)]
pub struct VerifyRow {
    pub transform: String,
    pub relation: String,
    pub passed: bool,
    pub details: String,
}

/// Recompute the indices after each transform and compare against the
/// predicted relation. Failures are rows, not errors.
pub fn verify_invariance_suite(
    state: &UniformMPS,
    act: &OnSiteAction,
    transforms: Vec<Transform>,
) -> Result<Vec<VerifyRow>, SptError> {
    let (base_h2, base_h1, _) = index_pair(state, act)?;
    let mut rows = Vec::new();
    for t in transforms {
        let name = t.name();
        let row = match apply_and_compare(state, act, &base_h2, &base_h1, t) {
            Ok(row) => row,
            Err(e) => VerifyRow {
                transform: name,
                relation: "(pipeline)".into(),
                passed: false,
                details: format!("error: {e}"),
            },
        };
        rows.push(row);
    }
    Ok(rows)
}

fn apply_and_compare(
    state: &UniformMPS,
    act: &OnSiteAction,
    base_h2: &CohomologyClass,
    base_h1: &Cochain,
    t: Transform,
) -> Result<VerifyRow, SptError> {
    let name = t.name();
    match t {
        Transform::BasisChange(v) => {
            let (s2, a2) = state.basis_change(act, &v)?;
            let (h2, h1, _) = index_pair(&s2, &a2)?;
            let passed = h2.coordinates == base_h2.coordinates && h1 == *base_h1;
            Ok(VerifyRow {
                transform: name,
                relation: "h1, h2 preserved".into(),
                passed,
                details: format!("h2: {} vs {}", h2.describe_coordinates(), base_h2.describe_coordinates()),
            })
        }
        Transform::SymmetricCircuit(gate) => {
            let (s2, a2) = state.apply_symmetric_circuit(act, &gate)?;
            let (h2, h1, _) = index_pair(&s2, &a2)?;
            // the unit cell doubled: the expected character is 2 * alpha
            let expected_h1 = scale_character(base_h1, 2)?;
            let passed = h2.coordinates == base_h2.coordinates && h1 == expected_h1;
            Ok(VerifyRow {
                transform: name,
                relation: "h2 preserved; h1 doubled with the unit cell".into(),
                passed,
                details: format!("h2: {} vs {}", h2.describe_coordinates(), base_h2.describe_coordinates()),
            })
        }
        Transform::Block(k) => {
            let (s2, a2) = state.block(act, k)?;
            let (h2, h1, _) = index_pair(&s2, &a2)?;
            let expected_h1 = scale_character(base_h1, k as i64)?;
            let passed = h2.coordinates == base_h2.coordinates && h1 == expected_h1;
            Ok(VerifyRow {
                transform: name,
                relation: format!("h2 preserved; alpha -> {k} * alpha relative to the original lattice"),
                passed,
                details: format!("h2: {} vs {}", h2.describe_coordinates(), base_h2.describe_coordinates()),
            })
        }
        Transform::Stack(other, other_act) => {
            let (other_h2, other_h1, _) = index_pair(&other, &other_act)?;
            let (s2, a2) = UniformMPS::stack(state, act, &other, &other_act)?;
            let (h2, h1, _) = index_pair(&s2, &a2)?;
            let expected_h2 = base_h2.class_add(&other_h2)?;
            let expected_h1 = base_h1.add(&other_h1)?;
            let passed = h2.coordinates == expected_h2.coordinates && h1 == expected_h1;
            Ok(VerifyRow {
                transform: name,
                relation: "indices add under stacking".into(),
                passed,
                details: format!("h2: {} vs {}", h2.describe_coordinates(), expected_h2.describe_coordinates()),
            })
        }
    }
}

fn scale_character(c: &Cochain, k: i64) -> Result<Cochain, SptError> {
    let values = c.values().iter().map(|v| v.scale(k)).collect();
    Cochain::from_values(c.group().clone(), 1, values)
}

impl IndexReport {
    /// Human-readable block.
    pub fn render_text(&self) -> String {
        let mut s = String::new();
        writeln!(s, "group: {}", self.group_label).unwrap();
        match &self.h1 {
            Some(h1) => {
                let vals: Vec<String> = h1.values().iter().map(|v| v.to_string()).collect();
                writeln!(s, "h1 (translation index): [{}]", vals.join(", ")).unwrap();
            }
            None => writeln!(s, "h1: absent").unwrap(),
        }
        match &self.h2 {
            Some(h2) => writeln!(
                s,
                "h2 class: {} in {}",
                h2.describe_coordinates(),
                divisors_str(&h2.divisors)
            )
            .unwrap(),
            None => writeln!(s, "h2: absent").unwrap(),
        }
        match &self.h2_rotated {
            Some(h2) => writeln!(s, "h2 rotated: {}", h2.describe_coordinates()).unwrap(),
            None => writeln!(s, "h2 rotated: not computable (no column state)").unwrap(),
        }
        for (k, v) in &self.residuals {
            writeln!(s, "residual {k}: {v:.3e}").unwrap();
        }
        for p in &self.provenance {
            writeln!(s, "provenance: {p}").unwrap();
        }
        s
    }

    /// Flat key-value lines for machine consumption.
    pub fn render_kv(&self) -> String {
        let mut s = String::new();
        writeln!(s, "group={}", self.group_label).unwrap();
        if let Some(h1) = &self.h1 {
            let vals: Vec<String> = h1.values().iter().map(|v| v.to_string()).collect();
            writeln!(s, "h1={}", vals.join(",")).unwrap();
        }
        if let Some(h2) = &self.h2 {
            writeln!(s, "h2.divisors={}", divisors_str(&h2.divisors)).unwrap();
            let coords: Vec<String> = h2.coordinates.iter().map(|c| c.to_string()).collect();
            writeln!(s, "h2.coordinates={}", coords.join(",")).unwrap();
        }
        if let Some(h2) = &self.h2_rotated {
            let coords: Vec<String> = h2.coordinates.iter().map(|c| c.to_string()).collect();
            writeln!(s, "h2_rotated.coordinates={}", coords.join(",")).unwrap();
        } else {
            writeln!(s, "h2_rotated=absent").unwrap();
        }
        for (k, v) in &self.residuals {
            writeln!(s, "residual.{k}={v:.14e}").unwrap();
        }
        s
    }
}

fn divisors_str(divisors: &[u64]) -> String {
    if divisors.is_empty() {
        return "trivial".into();
    }
    divisors.iter().map(|d| format!("Z_{d}")).collect::<Vec<_>>().join(" x ")
}

/// The 1D translation index of a D = 1 state is the snapped on-site
/// expectation of U(g); kept as a separate entry point because it
/// instantiates the product-state formula directly.
pub fn product_state_character(state: &UniformMPS, act: &OnSiteAction) -> Result<Cochain, SptError> {
    if state.bond_dim() != 1 {
        return Err(SptError::Invalid("product_state_character needs bond dimension 1".into()));
    }
    let group = act.group().clone();
    let amps: Vec<C64> = state.tensors().iter().map(|t| t[(0, 0)]).collect();
    let phases: Vec<f64> = group
        .elements()
        .map(|g| {
            let u = act.matrix(g);
            let mut acc = C64::new(0.0, 0.0);
            for (i, a) in amps.iter().enumerate() {
                for (j, b) in amps.iter().enumerate() {
                    acc += a.conj() * u[(i, j)] * *b;
                }
            }
            (acc.arg() / (2.0 * std::f64::consts::PI)).rem_euclid(1.0)
        })
        .collect();
    NumericCochain::new(group.clone(), 1, phases, 1e-12)?.snap_to_roots(group.order() as u64)
}
