//! End-to-end checks of the MPS layer and the index pipelines on the
//! built-in states.

use ndarray::{array, Array2};
use num_complex::Complex64 as C64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spt_core::builtins;
use spt_core::indices::{
    h2_index, h2_index_with_report, product_state_character, translation_index,
    verify_invariance_suite, ProjectiveRep, Transform,
};
use spt_core::linalg::{dagger, frobenius_norm};
use spt_core::mps::{mixed_transfer_leading, TOL_PROJ};
use spt_core::random::{random_symmetric_gate, random_unitary};
use spt_core::torus::TorusValue;
use spt_core::{FiniteGroup, OnSiteAction, SptError, UniformMPS};

fn cc(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

fn paulis() -> [Array2<C64>; 4] {
    [
        array![[cc(1.0, 0.0), cc(0.0, 0.0)], [cc(0.0, 0.0), cc(1.0, 0.0)]],
        array![[cc(0.0, 0.0), cc(1.0, 0.0)], [cc(1.0, 0.0), cc(0.0, 0.0)]],
        array![[cc(0.0, 0.0), cc(0.0, -1.0)], [cc(0.0, 1.0), cc(0.0, 0.0)]],
        array![[cc(1.0, 0.0), cc(0.0, 0.0)], [cc(0.0, 0.0), cc(-1.0, 0.0)]],
    ]
}

#[test]
fn canonicalize_products_and_scaling() {
    let s = UniformMPS::product(&[cc(1.0, 0.0), cc(0.0, 0.0)], "zero").unwrap();
    let c = s.canonicalize().unwrap();
    assert!(c.right_canonical_deviation() < 1e-12);
    assert!(frobenius_norm(&(&c.tensors()[0] - &s.tensors()[0])) < 1e-12);

    let (aklt, _) = builtins::aklt().unwrap();
    let scaled =
        UniformMPS::new(aklt.tensors().iter().map(|a| a.mapv(|z| z * 3.0)).collect(), "scaled").unwrap();
    let c = scaled.canonicalize().unwrap();
    assert!(c.right_canonical_deviation() < 1e-10);
    // idempotent up to tiny drift
    let c2 = c.canonicalize().unwrap();
    let drift: f64 = c
        .tensors()
        .iter()
        .zip(c2.tensors())
        .map(|(a, b)| frobenius_norm(&(a - b)))
        .sum();
    assert!(drift < 1e-9, "canonicalize drift {drift}");
}

#[test]
fn ghz_rejected_as_degenerate() {
    let a0 = array![[cc(1.0, 0.0), cc(0.0, 0.0)], [cc(0.0, 0.0), cc(0.0, 0.0)]];
    let a1 = array![[cc(0.0, 0.0), cc(0.0, 0.0)], [cc(0.0, 0.0), cc(1.0, 0.0)]];
    let ghz = UniformMPS::new(vec![a0, a1], "ghz").unwrap();
    assert!(matches!(
        ghz.canonicalize(),
        Err(SptError::DegenerateTransfer { multiplicity: 2 })
    ));
}

#[test]
fn redundant_bond_is_reduced() {
    // product |0> embedded in a 2-dimensional bond with a dead direction
    let a0 = array![[cc(1.0, 0.0), cc(0.0, 0.0)], [cc(0.0, 0.0), cc(0.5, 0.0)]];
    let a1 = array![[cc(0.0, 0.0), cc(0.0, 0.0)], [cc(0.0, 0.0), cc(0.0, 0.0)]];
    let s = UniformMPS::new(vec![a0, a1], "padded zero").unwrap();
    let c = s.canonicalize().unwrap();
    assert_eq!(c.bond_dim(), 1);
    assert!(c.right_canonical_deviation() < 1e-12);
}

#[test]
fn charged_product_eigenphases() {
    let (s, act) = builtins::charged_product(2, 1).unwrap();
    let c = s.canonicalize().unwrap();
    let e = mixed_transfer_leading(&c, &act, 0).unwrap();
    assert!((e.eigenphase - cc(1.0, 0.0)).norm() < 1e-12);
    let d = mixed_transfer_leading(&c, &act, 1).unwrap();
    assert!((d.eigenphase - cc(-1.0, 0.0)).norm() < 1e-12);
    assert!(d.residual < 1e-12);

    // stacking multiplies the 1x1 eigenphases
    let (ss, sact) = UniformMPS::stack(&s, &act, &s, &act).unwrap();
    let e = mixed_transfer_leading(&ss.canonicalize().unwrap(), &sact, 1).unwrap();
    assert!((e.eigenphase - cc(1.0, 0.0)).norm() < 1e-12);
}

#[test]
fn aklt_virtual_action_is_pauli() {
    let (aklt, act) = builtins::aklt().unwrap();
    let canon = aklt.canonicalize().unwrap();
    let group = act.group().clone();
    let pauli = paulis();
    let mut data = Vec::new();
    for g in group.elements() {
        let d = mixed_transfer_leading(&canon, &act, g).unwrap();
        assert!((d.eigenphase.norm() - 1.0).abs() < 1e-10);
        assert!((d.eigenphase - cc(1.0, 0.0)).norm() < 1e-8, "lambda_{g} = {}", d.eigenphase);
        assert!(d.residual < 1e-10, "residual {}", d.residual);
        // V(g) matches some Pauli up to a phase
        let v = &d.virtual_unitary;
        let matched = pauli.iter().any(|p| {
            let overlap = dagger(p).dot(v).diag().sum() / cc(2.0, 0.0);
            frobenius_norm(&(v - &p.mapv(|z| z * overlap))) < 1e-8 && (overlap.norm() - 1.0).abs() < 1e-8
        });
        assert!(matched, "V({g}) not proportional to a Pauli");
        data.push(d);
    }
    // eigenphase multiplicativity and projective proportionality
    for g in group.elements() {
        for h in group.elements() {
            let gh = group.mul(g, h);
            let lhs = data[g].eigenphase * data[h].eigenphase;
            assert!((lhs - data[gh].eigenphase).norm() < 1e-9);
            let prod = data[g].virtual_unitary.dot(&data[h].virtual_unitary).dot(&dagger(&data[gh].virtual_unitary));
            let phase = prod.diag().sum() / cc(2.0, 0.0);
            let dev = frobenius_norm(&(&prod - &Array2::eye(2).mapv(|z: C64| z * phase)));
            assert!(dev < TOL_PROJ, "proportionality deviation {dev}");
        }
    }
}

#[test]
fn pauli_rep_cocycle_and_phase_gauge() {
    let z2 = FiniteGroup::cyclic(2).unwrap();
    let v4 = FiniteGroup::direct_product(&z2, &z2).unwrap();
    let [id, x, _, z] = paulis();
    let xz = x.dot(&z);
    let rep = ProjectiveRep::new(v4.clone(), vec![id, x, z, xz]).unwrap();
    let (numeric, residual) = rep.extract_cocycle().unwrap();
    assert!(residual < 1e-12);
    let snapped = numeric.snap_to_roots(2).unwrap();
    assert!(snapped.is_cocycle());
    // beta(x, z) = c(x,z) - c(z,x) = 1/2: XZ = -ZX
    let beta = snapped.value(&[1, 2]).sub(&snapped.value(&[2, 1]));
    assert_eq!(beta, TorusValue::new(1, 2));

    // rescaling V(g) by exact eighth-root phases shifts the cocycle by the
    // coboundary of those phases; the class is unchanged
    let h = spt_core::CohomologyGroup::compute(&v4, 2, 2).unwrap();
    let base = h.class_of(&snapped).unwrap();
    assert!(!base.is_trivial());
    let eighth = C64::from_polar(1.0, std::f64::consts::FRAC_PI_4);
    let phases = [cc(1.0, 0.0), cc(0.0, 1.0), cc(-1.0, 0.0), eighth];
    let [id, x, _, z] = paulis();
    let rescaled = vec![
        id,
        x.mapv(|v| v * phases[1]),
        z.mapv(|v| v * phases[2]),
        paulis()[1].dot(&paulis()[3]).mapv(|v| v * phases[3]),
    ];
    let rep2 = ProjectiveRep::new(v4, rescaled).unwrap();
    let (numeric2, _) = rep2.extract_cocycle().unwrap();
    let snapped2 = numeric2.snap_to_roots(8).unwrap();
    let cls2 = h.class_of(&snapped2).unwrap();
    assert_eq!(base.coordinates, cls2.coordinates);
}

#[test]
fn h2_pipeline_on_builtins() {
    let (aklt, act) = builtins::aklt().unwrap();
    let (cls, residuals) = h2_index_with_report(&aklt, &act).unwrap();
    assert!(!cls.is_trivial(), "AKLT class: {}", cls.describe_coordinates());
    assert_eq!(cls.divisors, vec![2]);
    assert!(residuals.iter().all(|(_, r)| *r < 1e-8));
    assert!(!cls.fingerprint.as_ref().unwrap().is_zero());

    let (prod, pact) = builtins::product_spin1().unwrap();
    let cls0 = h2_index(&prod, &pact).unwrap();
    assert!(cls0.is_trivial());

    // stacking is 2-torsion
    let (double, dact) = UniformMPS::stack(&aklt, &act, &aklt, &act).unwrap();
    let cls2 = h2_index(&double, &dact).unwrap();
    assert!(cls2.is_trivial(), "stacked AKLT class: {}", cls2.describe_coordinates());

    let (cluster, cact) = builtins::cluster_z2z2().unwrap();
    let clsc = h2_index(&cluster, &cact).unwrap();
    assert!(!clsc.is_trivial());
}

#[test]
fn translation_index_on_products() {
    let (zero, act) = builtins::charged_product(2, 0).unwrap();
    let alpha = translation_index(&zero, &act).unwrap();
    assert!(alpha.is_zero());

    let (one, act) = builtins::charged_product(2, 1).unwrap();
    let alpha = translation_index(&one, &act).unwrap();
    assert_eq!(alpha.value(&[1]), TorusValue::new(1, 2));
    // matches the on-site expectation of U(g)
    assert_eq!(alpha, product_state_character(&one, &act).unwrap());

    let (stacked, sact) = UniformMPS::stack(&one, &act, &one, &act).unwrap();
    let alpha2 = translation_index(&stacked, &sact).unwrap();
    assert!(alpha2.is_zero());

    // charge 2 of Z_3: alpha(g) = 2/3 and the character is a homomorphism
    let (s3, a3) = builtins::charged_product(3, 2).unwrap();
    let alpha3 = translation_index(&s3, &a3).unwrap();
    assert_eq!(alpha3.value(&[1]), TorusValue::new(2, 3));
    assert_eq!(alpha3.value(&[2]), TorusValue::new(1, 3));
}

#[test]
fn invariance_suite_on_aklt() {
    let (aklt, act) = builtins::aklt().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let v = random_unitary(3, &mut rng).unwrap();
    let gate = random_symmetric_gate(&act, &mut rng).unwrap();
    // stack partner on the same Z2 x Z2: qubit charged under the first factor
    let signs = [1.0, -1.0, 1.0, -1.0];
    let matrices = (0..4)
        .map(|g| array![[cc(1.0, 0.0), cc(0.0, 0.0)], [cc(0.0, 0.0), cc(signs[g], 0.0)]])
        .collect();
    let zcharges = OnSiteAction::new(act.group().clone(), matrices).unwrap();
    let charged =
        UniformMPS::product(&[cc(0.0, 0.0), cc(1.0, 0.0)], "charged pair").unwrap();
    let rows = verify_invariance_suite(
        &aklt,
        &act,
        vec![
            Transform::BasisChange(v),
            Transform::SymmetricCircuit(gate),
            Transform::Block(2),
            Transform::Stack(charged, zcharges),
        ],
    )
    .unwrap();
    for row in &rows {
        assert!(row.passed, "{}: {} -- {}", row.transform, row.relation, row.details);
    }
}

#[test]
fn circuit_preserves_cluster_index() {
    let (cluster, act) = builtins::cluster_z2z2().unwrap();
    let base = h2_index(&cluster, &act).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let gate = random_symmetric_gate(&act, &mut rng).unwrap();
    let (evolved, eact) = cluster.apply_symmetric_circuit(&act, &gate).unwrap();
    let cls = h2_index(&evolved, &eact).unwrap();
    assert_eq!(base.coordinates, cls.coordinates);
}

#[test]
fn nonsymmetric_gate_rejected() {
    let (s, act) = builtins::charged_product(2, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let gate = random_unitary(4, &mut rng).unwrap();
    assert!(matches!(
        s.apply_symmetric_circuit(&act, &gate),
        Err(SptError::NonSymmetricGate(_))
    ));
}

#[test]
fn basis_change_by_symmetry_element_fixes_action() {
    let (s, act) = builtins::charged_product(4, 1).unwrap();
    let u1 = act.matrix(1).clone();
    let (_, act2) = s.basis_change(&act, &u1).unwrap();
    for g in act.group().elements() {
        assert!(frobenius_norm(&(act.matrix(g) - act2.matrix(g))) < 1e-12);
    }
}

#[test]
fn injectivity_lengths() {
    let (aklt, _) = builtins::aklt().unwrap();
    assert_eq!(aklt.canonicalize().unwrap().injectivity_length(), Some(2));
    let prod = UniformMPS::product(&[cc(1.0, 0.0), cc(0.0, 0.0)], "p").unwrap();
    assert_eq!(prod.injectivity_length(), Some(1));
}
