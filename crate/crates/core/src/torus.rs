//! Exact values on the torus R/Z, stored as reduced fractions p/q with
//! 0 <= p < q. These are the coefficients of every exact cochain.

use std::fmt;

use crate::error::SptError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TorusValue {
    num: u64,
    den: u64,
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

impl TorusValue {
    pub const ZERO: TorusValue = TorusValue { num: 0, den: 1 };

    /// Value num/den reduced mod 1, sign handled.
    pub fn new(num: i64, den: u64) -> Self {
        assert!(den > 0, "zero denominator");
        let d = den as i64;
        let n = num.rem_euclid(d) as u64;
        let g = gcd(n, den).max(1);
        TorusValue { num: n / g, den: den / g }
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num == 0
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn neg(&self) -> Self {
        TorusValue::new(-(self.num as i64), self.den)
    }

    pub fn add(&self, other: &TorusValue) -> Self {
        let den = self.den / gcd(self.den, other.den) * other.den;
        let num = self.num as i64 * (den / self.den) as i64 + other.num as i64 * (den / other.den) as i64;
        TorusValue::new(num, den)
    }

    pub fn sub(&self, other: &TorusValue) -> Self {
        self.add(&other.neg())
    }

    /// Integer multiple k * self mod 1.
    pub fn scale(&self, k: i64) -> Self {
        TorusValue::new(self.num as i64 * k.rem_euclid(self.den as i64), self.den)
    }

    /// Distance in the torus metric min(|x - y|, 1 - |x - y|).
    pub fn torus_distance(x: f64, y: f64) -> f64 {
        let d = (x - y).rem_euclid(1.0);
        d.min(1.0 - d)
    }

    /// Nearest lattice point k/m to a numeric phase in [0, 1). Rejects values
    /// at distance >= 1/(2m), the boundary included.
    pub fn snap(phase: f64, m: u64) -> Result<Self, SptError> {
        assert!(m > 0);
        let p = phase.rem_euclid(1.0);
        let k = (p * m as f64).round() as i64;
        let v = TorusValue::new(k, m);
        let dist = Self::torus_distance(p, v.to_f64());
        let limit = 0.5 / m as f64;
        if dist >= limit {
            return Err(SptError::Snap { value: phase, m, distance: dist, limit });
        }
        Ok(v)
    }

    /// Parse "p/q" (or a bare integer, meaning 0 mod 1).
    pub fn parse(s: &str) -> Result<Self, SptError> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let num: i64 = p.trim().parse().map_err(|_| SptError::Invalid(format!("bad fraction {s:?}")))?;
            let den: u64 = q.trim().parse().map_err(|_| SptError::Invalid(format!("bad fraction {s:?}")))?;
            if den == 0 {
                return Err(SptError::Invalid(format!("zero denominator in {s:?}")));
            }
            Ok(TorusValue::new(num, den))
        } else {
            let _: i64 = s.parse().map_err(|_| SptError::Invalid(format!("bad fraction {s:?}")))?;
            Ok(TorusValue::ZERO)
        }
    }
}

impl fmt::Display for TorusValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduction_and_range() {
        assert_eq!(TorusValue::new(3, 6), TorusValue::new(1, 2));
        assert_eq!(TorusValue::new(-1, 4), TorusValue::new(3, 4));
        assert_eq!(TorusValue::new(8, 4), TorusValue::ZERO);
    }

    #[test]
    fn snap_boundary_rejected() {
        assert_eq!(TorusValue::snap(0.0, 4).unwrap(), TorusValue::ZERO);
        assert_eq!(TorusValue::snap(0.2501, 4).unwrap(), TorusValue::new(1, 4));
        assert!(TorusValue::snap(0.125, 4).is_err());
        // wrap-around: 0.99 snaps to 0/1 for m = 4... nearest is 4/4 = 0
        assert_eq!(TorusValue::snap(0.99, 4).unwrap(), TorusValue::ZERO);
    }

    proptest! {
        #[test]
        fn group_laws(a in -40i64..40, b in -40i64..40, c in -40i64..40,
                      p in 1u64..12, q in 1u64..12, r in 1u64..12) {
            let (x, y, z) = (TorusValue::new(a, p), TorusValue::new(b, q), TorusValue::new(c, r));
            prop_assert_eq!(x.add(&y), y.add(&x));
            prop_assert_eq!(x.add(&y).add(&z), x.add(&y.add(&z)));
            prop_assert_eq!(x.add(&x.neg()), TorusValue::ZERO);
            prop_assert_eq!(x.sub(&y).add(&y), x);
        }
    }
}
