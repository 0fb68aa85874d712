//! Torus-valued cochains on G^n and the coboundary homomorphism, in an
//! exact (rational mod 1) and a numeric (phase + tolerance) variant.
//!
//! Values are stored row-major in group element indices: the tuple
//! (g_1, ..., g_n) lives at index ((g_1 * N + g_2) * N + ...) + g_n.
//! Cochains are not assumed normalized; the alternating-sum formula is
//! applied verbatim with the trivial group action.

use std::fmt::Write as _;
use std::sync::Arc;

use crate::error::SptError;
use crate::group::FiniteGroup;
use crate::torus::TorusValue;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cochain {
    group: Arc<FiniteGroup>,
    degree: usize,
    values: Vec<TorusValue>,
}

#[derive(Debug, Clone)]
pub struct NumericCochain {
    group: Arc<FiniteGroup>,
    degree: usize,
    /// Phases in [0, 1).
    values: Vec<f64>,
    /// Numerical tolerance the values were produced at.
    pub tol: f64,
}

pub fn tuple_count(order: usize, degree: usize) -> usize {
    order.pow(degree as u32)
}

/// Row-major index of a tuple of element indices.
pub fn tuple_index(order: usize, tuple: &[usize]) -> usize {
    tuple.iter().fold(0, |acc, &g| acc * order + g)
}

/// Iterate all tuples in G^n in row-major order.
pub fn tuples(order: usize, degree: usize) -> impl Iterator<Item = Vec<usize>> {
    let total = tuple_count(order, degree);
    (0..total).map(move |mut idx| {
        let mut t = vec![0; degree];
        for slot in t.iter_mut().rev() {
            *slot = idx % order;
            idx /= order;
        }
        t
    })
}

impl Cochain {
    pub fn zero(group: Arc<FiniteGroup>, degree: usize) -> Self {
        let len = tuple_count(group.order(), degree);
        Cochain { group, degree, values: vec![TorusValue::ZERO; len] }
    }

    pub fn from_values(group: Arc<FiniteGroup>, degree: usize, values: Vec<TorusValue>) -> Result<Self, SptError> {
        if values.len() != tuple_count(group.order(), degree) {
            return Err(SptError::Mismatch(format!(
                "cochain needs {} values, got {}",
                tuple_count(group.order(), degree),
                values.len()
            )));
        }
        Ok(Cochain { group, degree, values })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[TorusValue] {
        &self.values
    }

    pub fn value(&self, tuple: &[usize]) -> TorusValue {
        debug_assert_eq!(tuple.len(), self.degree);
        self.values[tuple_index(self.group.order(), tuple)]
    }

    pub fn set(&mut self, tuple: &[usize], v: TorusValue) {
        let i = tuple_index(self.group.order(), tuple);
        self.values[i] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.is_zero())
    }

    pub fn add(&self, other: &Cochain) -> Result<Cochain, SptError> {
        if self.group != other.group || self.degree != other.degree {
            return Err(SptError::Mismatch("cochain addition needs same group and degree".into()));
        }
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.add(b)).collect();
        Ok(Cochain { group: self.group.clone(), degree: self.degree, values })
    }

    pub fn neg(&self) -> Cochain {
        Cochain {
            group: self.group.clone(),
            degree: self.degree,
            values: self.values.iter().map(|v| v.neg()).collect(),
        }
    }

    /// The coboundary d^{n+1}: alternating sum over argument contractions
    /// with the trivial group action on the coefficients.
    pub fn coboundary(&self) -> Cochain {
        let group = &self.group;
        let n = self.degree;
        let mut out = Cochain::zero(group.clone(), n + 1);
        let order = group.order();
        for t in tuples(order, n + 1) {
            let mut acc = self.value(&t[1..]); // g_1 . phi(g_2, ..) = phi(g_2, ..)
            let mut contracted = Vec::with_capacity(n);
            for i in 1..=n {
                contracted.clear();
                contracted.extend_from_slice(&t[..i - 1]);
                contracted.push(group.mul(t[i - 1], t[i]));
                contracted.extend_from_slice(&t[i + 1..]);
                let term = self.value(&contracted);
                acc = if i % 2 == 1 { acc.sub(&term) } else { acc.add(&term) };
            }
            let last = self.value(&t[..n]);
            acc = if (n + 1) % 2 == 1 { acc.sub(&last) } else { acc.add(&last) };
            out.set(&t, acc);
        }
        out
    }

    pub fn is_cocycle(&self) -> bool {
        self.coboundary().is_zero()
    }

    /// Least common multiple of the value denominators (1 for the zero cochain).
    pub fn denominator_lcm(&self) -> u64 {
        self.values.iter().fold(1u64, |acc, v| {
            let d = v.denominator();
            acc / gcd(acc, d) * d
        })
    }

    pub fn to_numeric(&self, tol: f64) -> NumericCochain {
        NumericCochain {
            group: self.group.clone(),
            degree: self.degree,
            values: self.values.iter().map(|v| v.to_f64()).collect(),
            tol,
        }
    }

    /// One line per tuple: "g1 g2 ... gn  p/q".
    pub fn export_text(&self) -> String {
        let mut s = String::new();
        for t in tuples(self.group.order(), self.degree) {
            for g in &t {
                write!(s, "{g} ").unwrap();
            }
            writeln!(s, " {}", self.value(&t)).unwrap();
        }
        s
    }

    pub fn import_text(group: Arc<FiniteGroup>, degree: usize, text: &str) -> Result<Cochain, SptError> {
        let mut c = Cochain::zero(group.clone(), degree);
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != degree + 1 {
                return Err(SptError::Invalid(format!("line {}: expected {} fields", lineno + 1, degree + 1)));
            }
            let tuple: Vec<usize> = fields[..degree]
                .iter()
                .map(|f| f.parse::<usize>().map_err(|_| SptError::Invalid(format!("line {}: bad element index", lineno + 1))))
                .collect::<Result<_, _>>()?;
            if tuple.iter().any(|&g| g >= group.order()) {
                return Err(SptError::Invalid(format!("line {}: element index out of range", lineno + 1)));
            }
            c.set(&tuple, TorusValue::parse(fields[degree])?);
        }
        Ok(c)
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl NumericCochain {
    pub fn new(group: Arc<FiniteGroup>, degree: usize, values: Vec<f64>, tol: f64) -> Result<Self, SptError> {
        if values.len() != tuple_count(group.order(), degree) {
            return Err(SptError::Mismatch("numeric cochain length mismatch".into()));
        }
        let values = values.into_iter().map(|v| v.rem_euclid(1.0)).collect();
        Ok(NumericCochain { group, degree, values, tol })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, tuple: &[usize]) -> f64 {
        self.values[tuple_index(self.group.order(), tuple)]
    }

    pub fn coboundary(&self) -> NumericCochain {
        // same formula as the exact variant, phases mod 1
        let group = &self.group;
        let n = self.degree;
        let order = group.order();
        let mut values = Vec::with_capacity(tuple_count(order, n + 1));
        for t in tuples(order, n + 1) {
            let mut acc = self.value(&t[1..]);
            for i in 1..=n {
                let mut contracted = Vec::with_capacity(n);
                contracted.extend_from_slice(&t[..i - 1]);
                contracted.push(group.mul(t[i - 1], t[i]));
                contracted.extend_from_slice(&t[i + 1..]);
                let term = self.value(&contracted);
                acc += if i % 2 == 1 { -term } else { term };
            }
            let last = self.value(&t[..n]);
            acc += if (n + 1) % 2 == 1 { -last } else { last };
            values.push(acc.rem_euclid(1.0));
        }
        NumericCochain { group: group.clone(), degree: n + 1, values, tol: self.tol }
    }

    /// True when the coboundary vanishes within `tol` in the torus metric.
    pub fn is_cocycle(&self, tol: f64) -> bool {
        self.coboundary().values.iter().all(|&v| TorusValue::torus_distance(v, 0.0) <= tol)
    }

    /// Round every phase to the nearest multiple of 1/m. Degree-1 outputs are
    /// re-verified to be exact homomorphisms.
    pub fn snap_to_roots(&self, m: u64) -> Result<Cochain, SptError> {
        let values = self
            .values
            .iter()
            .map(|&v| TorusValue::snap(v, m))
            .collect::<Result<Vec<_>, _>>()?;
        let snapped = Cochain { group: self.group.clone(), degree: self.degree, values };
        if self.degree == 1 && !snapped.is_cocycle() {
            return Err(SptError::Homomorphism);
        }
        Ok(snapped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn random_cochain(group: &Arc<FiniteGroup>, degree: usize, m: u64, rng: &mut impl Rng) -> Cochain {
        let values = (0..tuple_count(group.order(), degree))
            .map(|_| TorusValue::new(rng.gen_range(0..m as i64), m))
            .collect();
        Cochain::from_values(group.clone(), degree, values).unwrap()
    }

    #[test]
    fn degree0_constant_has_zero_coboundary() {
        for n in [1, 2, 5] {
            let g = FiniteGroup::cyclic(n).unwrap();
            let c = Cochain::from_values(g, 0, vec![TorusValue::new(3, 7)]).unwrap();
            assert!(c.coboundary().is_zero());
        }
    }

    #[test]
    fn z2_character_coboundary() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let chi = Cochain::from_values(g, 1, vec![TorusValue::ZERO, TorusValue::new(1, 2)]).unwrap();
        let d = chi.coboundary();
        // (d chi)(a, a) = chi(a) - chi(a a) + chi(a) = 1/2 - 0 + 1/2 = 0
        assert_eq!(d.value(&[1, 1]), TorusValue::ZERO);
        assert!(d.is_zero());
    }

    #[test]
    fn dd_zero_on_z3() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let c = random_cochain(&g, 1, 6, &mut rng);
            assert!(c.coboundary().coboundary().is_zero());
        }
    }

    #[test]
    fn cocycle_detection_by_hand() {
        // hand oracle on the 8 triples of Z_2: the triple (0,0,1) evaluates
        // d c to c(0,1) - c(0,0), so c(0,1) = 1/3 alone is not a cocycle,
        // while the bilinear c(g,h) = t g h is one for any t
        let g = FiniteGroup::cyclic(2).unwrap();
        let mut c = Cochain::zero(g.clone(), 2);
        c.set(&[0, 1], TorusValue::new(1, 3));
        assert!(!c.is_cocycle());
        let mut b = Cochain::zero(g, 2);
        b.set(&[1, 1], TorusValue::new(1, 3));
        assert!(b.is_cocycle());
        assert!(Cochain::zero(FiniteGroup::cyclic(5).unwrap(), 3).is_cocycle());
    }

    #[test]
    fn snap_degree1_hom_check() {
        let g = FiniteGroup::cyclic(2).unwrap();
        let near_hom = NumericCochain::new(g.clone(), 1, vec![1e-12, 0.5 - 1e-12], 1e-10).unwrap();
        let snapped = near_hom.snap_to_roots(2).unwrap();
        assert_eq!(snapped.value(&[1]), TorusValue::new(1, 2));
        // phases that snap fine but are not a homomorphism must be rejected
        let not_hom = NumericCochain::new(g, 1, vec![0.5, 0.0], 1e-10).unwrap();
        assert!(matches!(not_hom.snap_to_roots(2), Err(SptError::Homomorphism)));
    }

    #[test]
    fn text_roundtrip() {
        let g = FiniteGroup::cyclic(3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let c = random_cochain(&g, 2, 9, &mut rng);
        let text = c.export_text();
        let back = Cochain::import_text(g, 2, &text).unwrap();
        assert_eq!(c, back);
    }
}
