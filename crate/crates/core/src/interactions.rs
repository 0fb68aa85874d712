//! Interactions on finite lattice patches: the decay function F_phi, the
//! F-norm, restrictions to regions, and symmetry/translation invariance
//! checks.

use ndarray::Array2;
use num_complex::Complex64 as C64;
use std::collections::BTreeMap;

use crate::error::SptError;
use crate::linalg::{dagger, frobenius_norm, hermitian_deviation, hermitian_operator_norm, kron};
use crate::mps::OnSiteAction;

pub const TOL_HERM: f64 = 1e-9;

pub type Site = [i64; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Metric {
    Euclidean,
    L1,
}

impl Metric {
    pub fn distance(&self, x: Site, y: Site) -> f64 {
        let (dx, dy) = ((x[0] - y[0]) as f64, (x[1] - y[1]) as f64);
        match self {
            Metric::Euclidean => (dx * dx + dy * dy).sqrt(),
            Metric::L1 => dx.abs() + dy.abs(),
        }
    }
}

/// A finite rectangular window of Z^1 or Z^2 with a fixed on-site dimension.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LatticePatch {
    pub dimension: u8,
    /// Inclusive ranges; the second axis is [0, 0] for one-dimensional patches.
    pub bounds: [(i64, i64); 2],
    pub site_dim: usize,
}

impl LatticePatch {
    pub fn line(lo: i64, hi: i64, site_dim: usize) -> Result<Self, SptError> {
        if lo > hi || site_dim == 0 {
            return Err(SptError::Invalid("empty patch".into()));
        }
        Ok(LatticePatch { dimension: 1, bounds: [(lo, hi), (0, 0)], site_dim })
    }

    pub fn rect(x: (i64, i64), y: (i64, i64), site_dim: usize) -> Result<Self, SptError> {
        if x.0 > x.1 || y.0 > y.1 || site_dim == 0 {
            return Err(SptError::Invalid("empty patch".into()));
        }
        Ok(LatticePatch { dimension: 2, bounds: [x, y], site_dim })
    }

    pub fn contains(&self, s: Site) -> bool {
        s[0] >= self.bounds[0].0
            && s[0] <= self.bounds[0].1
            && s[1] >= self.bounds[1].0
            && s[1] <= self.bounds[1].1
    }

    pub fn sites(&self) -> Vec<Site> {
        let mut out = Vec::new();
        for x in self.bounds[0].0..=self.bounds[0].1 {
            for y in self.bounds[1].0..=self.bounds[1].1 {
                out.push([x, y]);
            }
        }
        out
    }
}

/// Map from finite site sets to hermitian matrices on the tensor product of
/// the member sites (ordered by the sorted site tuple).
#[derive(Debug, Clone)]
pub struct Interaction {
    patch: LatticePatch,
    terms: BTreeMap<Vec<Site>, Array2<C64>>,
}

impl Interaction {
    pub fn new(patch: LatticePatch) -> Self {
        Interaction { patch, terms: BTreeMap::new() }
    }

    pub fn patch(&self) -> &LatticePatch {
        &self.patch
    }

    pub fn terms(&self) -> &BTreeMap<Vec<Site>, Array2<C64>> {
        &self.terms
    }

    /// Insert a term; sites are sorted, the matrix must be hermitian and of
    /// dimension site_dim^|Z|.
    pub fn add_term(&mut self, sites: Vec<Site>, matrix: Array2<C64>) -> Result<(), SptError> {
        if sites.is_empty() {
            return Err(SptError::Invalid("empty site set".into()));
        }
        let mut sites = sites;
        sites.sort_unstable();
        sites.dedup();
        for s in &sites {
            if !self.patch.contains(*s) {
                return Err(SptError::Invalid(format!("site {s:?} outside the patch")));
            }
        }
        let want = self.patch.site_dim.pow(sites.len() as u32);
        if matrix.nrows() != want || matrix.ncols() != want {
            return Err(SptError::Dimension(format!("term on {} sites needs a {want} x {want} matrix", sites.len())));
        }
        let dev = hermitian_deviation(&matrix);
        if dev > TOL_HERM {
            return Err(SptError::Invalid(format!("term is not hermitian (deviation {dev})")));
        }
        // accumulate if a term on the same set already exists
        match self.terms.get_mut(&sites) {
            Some(existing) => *existing = &*existing + &matrix,
            None => {
                self.terms.insert(sites, matrix);
            }
        }
        Ok(())
    }

    pub fn scale(&self, c: f64) -> Interaction {
        let terms = self.terms.iter().map(|(k, v)| (k.clone(), v.mapv(|z| z * c))).collect();
        Interaction { patch: self.patch.clone(), terms }
    }

    pub fn add(&self, other: &Interaction) -> Result<Interaction, SptError> {
        if self.patch != other.patch {
            return Err(SptError::Mismatch("interaction addition needs a common patch".into()));
        }
        let mut out = self.clone();
        for (sites, m) in &other.terms {
            out.add_term(sites.clone(), m.clone())?;
        }
        Ok(out)
    }

    /// Keep terms with Z fully inside the region; others are dropped whole.
    pub fn restrict(&self, region: impl Fn(Site) -> bool) -> Interaction {
        let terms = self
            .terms
            .iter()
            .filter(|(sites, _)| sites.iter().all(|&s| region(s)))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Interaction { patch: self.patch.clone(), terms }
    }

    /// sup over site pairs of the F-weighted sum of term norms covering both.
    pub fn f_norm(&self, phi: f64, metric: Metric) -> Result<f64, SptError> {
        let norms: BTreeMap<&Vec<Site>, f64> = self
            .terms
            .iter()
            .map(|(k, v)| Ok((k, hermitian_operator_norm(v)?)))
            .collect::<Result<_, SptError>>()?;
        let sites = self.patch.sites();
        let mut sup = 0.0f64;
        for &x in &sites {
            for &y in &sites {
                let mut sum = 0.0;
                for (term_sites, norm) in &norms {
                    if term_sites.contains(&x) && term_sites.contains(&y) {
                        sum += norm;
                    }
                }
                if sum > 0.0 {
                    let w = sum / f_phi(metric.distance(x, y), phi)?;
                    sup = sup.max(w);
                }
            }
        }
        Ok(sup)
    }

    /// Deviations from G-invariance and from invariance under the given
    /// lattice shifts. Shifted terms are compared only where both the term
    /// and its image exist in the patch.
    pub fn check_invariance(
        &self,
        act: Option<&OnSiteAction>,
        shifts: &[Site],
    ) -> Result<InvarianceReport, SptError> {
        let mut g_dev = 0.0f64;
        if let Some(act) = act {
            if act.dim() != self.patch.site_dim {
                return Err(SptError::Dimension("action dimension differs from the site dimension".into()));
            }
            for (sites, m) in &self.terms {
                for g in act.group().elements() {
                    let mut u = Array2::from_elem((1, 1), C64::new(1.0, 0.0));
                    for _ in 0..sites.len() {
                        u = kron(&u, act.matrix(g));
                    }
                    let rotated = u.dot(m).dot(&dagger(&u));
                    g_dev = g_dev.max(frobenius_norm(&(&rotated - m)));
                }
            }
        }
        let mut t_dev = 0.0f64;
        let mut compared = 0usize;
        for &shift in shifts {
            for (sites, m) in &self.terms {
                let image: Vec<Site> = sites.iter().map(|s| [s[0] + shift[0], s[1] + shift[1]]).collect();
                if let Some(target) = self.terms.get(&image) {
                    t_dev = t_dev.max(frobenius_norm(&(target - m)));
                    compared += 1;
                }
            }
        }
        Ok(InvarianceReport { g_deviation: g_dev, translation_deviation: t_dev, translations_compared: compared })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub g_deviation: f64,
    pub translation_deviation: f64,
    pub translations_compared: usize,
}

/// The decay profile exp(-r^phi) / (1 + r)^4 for 0 < phi < 1, r >= 0.
pub fn f_phi(r: f64, phi: f64) -> Result<f64, SptError> {
    if !(0.0..1.0).contains(&phi) || phi == 0.0 {
        return Err(SptError::Invalid(format!("phi must be in (0, 1), got {phi}")));
    }
    if r < 0.0 || !r.is_finite() {
        return Err(SptError::Invalid(format!("r must be a nonnegative real, got {r}")));
    }
    Ok((-r.powf(phi)).exp() / (1.0 + r).powi(4))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn cc(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn pauli_zz() -> Array2<C64> {
        let z = array![[cc(1.0), cc(0.0)], [cc(0.0), cc(-1.0)]];
        kron(&z, &z)
    }

    #[test]
    fn f_phi_values() {
        assert!((f_phi(0.0, 0.5).unwrap() - 1.0).abs() < 1e-15);
        for phi in [0.2, 0.5, 0.9] {
            let expect = (-1.0f64).exp() / 16.0;
            assert!((f_phi(1.0, phi).unwrap() - expect).abs() < 1e-15);
        }
        let grid = [0.0, 1.0, 2.0, 4.0, 8.0];
        for w in grid.windows(2) {
            assert!(f_phi(w[1], 0.5).unwrap() < f_phi(w[0], 0.5).unwrap());
            assert!(f_phi(w[1], 0.5).unwrap() > 0.0);
        }
        assert!(f_phi(-1.0, 0.5).is_err());
        assert!(f_phi(1.0, 1.0).is_err());
        assert!(f_phi(1.0, 0.0).is_err());
    }

    #[test]
    fn empty_interaction_norm_zero() {
        let patch = LatticePatch::line(0, 5, 2).unwrap();
        let i = Interaction::new(patch);
        assert_eq!(i.f_norm(0.5, Metric::Euclidean).unwrap(), 0.0);
    }

    #[test]
    fn single_bond_is_sixteen_e() {
        let patch = LatticePatch::line(0, 9, 2).unwrap();
        let mut i = Interaction::new(patch);
        i.add_term(vec![[0, 0], [1, 0]], pauli_zz()).unwrap();
        let got = i.f_norm(0.5, Metric::Euclidean).unwrap();
        let expect = 16.0 * std::f64::consts::E;
        assert!((got - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn translation_invariant_chain_matches_single_term() {
        // each distance-1 pair lies in exactly one term, so the sup equals
        // the single-bond value (exhaustive pair loop is the oracle here)
        let patch = LatticePatch::line(0, 9, 2).unwrap();
        let mut i = Interaction::new(patch);
        for x in 0..9 {
            i.add_term(vec![[x, 0], [x + 1, 0]], pauli_zz()).unwrap();
        }
        let got = i.f_norm(0.5, Metric::Euclidean).unwrap();
        let expect = 16.0 * std::f64::consts::E;
        assert!((got - expect).abs() < 1e-10 * expect);
    }

    #[test]
    fn restrict_drops_crossing_terms() {
        let patch = LatticePatch::line(0, 9, 2).unwrap();
        let mut i = Interaction::new(patch.clone());
        for x in 0..9 {
            i.add_term(vec![[x, 0], [x + 1, 0]], pauli_zz()).unwrap();
        }
        let whole = i.restrict(|_| true);
        assert_eq!(whole.terms().len(), i.terms().len());
        let left = i.restrict(|s| s[0] <= 4);
        assert_eq!(left.terms().len(), 4); // bonds 0-1 .. 3-4; 4-5 crosses
        // restriction composes as intersection
        let a = i.restrict(|s| s[0] <= 6).restrict(|s| s[0] >= 3);
        let b = i.restrict(|s| (3..=6).contains(&s[0]));
        assert_eq!(a.terms().len(), b.terms().len());
        // and never increases the norm
        assert!(left.f_norm(0.5, Metric::Euclidean).unwrap() <= i.f_norm(0.5, Metric::Euclidean).unwrap() + 1e-12);
    }

    #[test]
    fn invariance_checks() {
        let z2 = crate::group::FiniteGroup::cyclic(2).unwrap();
        let act = crate::builtins::cyclic_diagonal_action(&z2, &[0, 1]).unwrap();
        let patch = LatticePatch::line(0, 5, 2).unwrap();
        let mut i = Interaction::new(patch.clone());
        for x in 0..5 {
            i.add_term(vec![[x, 0], [x + 1, 0]], pauli_zz()).unwrap();
        }
        let rep = i.check_invariance(Some(&act), &[[1, 0]]).unwrap();
        assert!(rep.g_deviation < 1e-12);
        assert!(rep.translation_deviation < 1e-12);
        assert!(rep.translations_compared > 0);

        // conjugating one bond by a non-symmetric unitary shows up
        let mut j = i.clone();
        let hx = array![[cc(1.0), cc(1.0)], [cc(1.0), cc(-1.0)]].mapv(|z| z / cc(2.0f64.sqrt()));
        let u = kron(&hx, &Array2::eye(2));
        let conj = u.dot(&pauli_zz()).dot(&dagger(&u));
        j.add_term(vec![[2, 0], [3, 0]], (&conj - &pauli_zz()).mapv(|z| z)).unwrap();
        let rep = j.check_invariance(Some(&act), &[[1, 0]]).unwrap();
        assert!(rep.g_deviation > 1e-3);
        assert!(rep.translation_deviation > 1e-3);
    }

    #[test]
    fn norm_axioms_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let patch = LatticePatch::rect((0, 3), (0, 3), 2).unwrap();
        for _ in 0..100 {
            let mut a = Interaction::new(patch.clone());
            let mut b = Interaction::new(patch.clone());
            for _ in 0..3 {
                for tgt in [&mut a, &mut b] {
                    let x = rng.gen_range(0..3);
                    let y = rng.gen_range(0..3);
                    let m = random_hermitian(4, &mut rng);
                    tgt.add_term(vec![[x, y], [x + 1, y]], m).unwrap();
                }
            }
            let (na, nb) = (a.f_norm(0.5, Metric::Euclidean).unwrap(), b.f_norm(0.5, Metric::Euclidean).unwrap());
            let nsum = a.add(&b).unwrap().f_norm(0.5, Metric::Euclidean).unwrap();
            assert!(nsum <= na + nb + 1e-9 * (na + nb));
            let c: f64 = rng.gen_range(-3.0..3.0);
            let scaled = a.scale(c).f_norm(0.5, Metric::Euclidean).unwrap();
            assert!((scaled - c.abs() * na).abs() < 1e-9 * (1.0 + na));
        }
    }

    fn random_hermitian(n: usize, rng: &mut impl rand::Rng) -> Array2<C64> {
        let mut m = Array2::<C64>::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                m[(i, j)] = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
            }
        }
        (&m + &dagger(&m)).mapv(|z| z * 0.5)
    }
}
