//! Finite groups as explicit multiplication tables.
//!
//! Tables are validated on construction (identity, Latin square, inverses,
//! and full associativity for orders up to the default cap of 64). Element
//! encoding in direct products is lexicographic: (a, b) -> a * |B| + b.

use itertools::Itertools;
use std::sync::Arc;

use crate::error::SptError;

/// Largest order accepted by the validating constructors. Cohomology cost
/// grows as |G|^n, so anything bigger is out of desk range anyway.
pub const MAX_GROUP_ORDER: usize = 64;

#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    identity: usize,
    inverses: Vec<usize>,
    label: String,
}

impl PartialEq for FiniteGroup {
    fn eq(&self, other: &Self) -> bool {
        self.order == other.order && self.table == other.table
    }
}
impl Eq for FiniteGroup {}

impl FiniteGroup {
    /// Validate and wrap an explicit multiplication table.
    pub fn from_table(rows: Vec<Vec<usize>>, label: impl Into<String>) -> Result<Arc<Self>, SptError> {
        let n = rows.len();
        if n == 0 {
            return Err(SptError::InvalidGroup("empty table".into()));
        }
        if n > MAX_GROUP_ORDER {
            return Err(SptError::InvalidGroup(format!("order {n} exceeds cap {MAX_GROUP_ORDER}")));
        }
        let mut table = Vec::with_capacity(n * n);
        for row in &rows {
            if row.len() != n {
                return Err(SptError::InvalidGroup("table is not square".into()));
            }
            for &x in row {
                if x >= n {
                    return Err(SptError::InvalidGroup(format!("entry {x} out of range")));
                }
                table.push(x);
            }
        }
        // identity: the element whose row and column are both the identity map
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e * n + g] == g && table[g * n + e] == g))
            .ok_or_else(|| SptError::InvalidGroup("no identity element".into()))?;
        // Latin square
        for i in 0..n {
            let mut seen_row = vec![false; n];
            let mut seen_col = vec![false; n];
            for j in 0..n {
                seen_row[table[i * n + j]] = true;
                seen_col[table[j * n + i]] = true;
            }
            if seen_row.contains(&false) || seen_col.contains(&false) {
                return Err(SptError::InvalidGroup(format!("row/column {i} is not a permutation")));
            }
        }
        // associativity, all triples
        for g in 0..n {
            for h in 0..n {
                let gh = table[g * n + h];
                for k in 0..n {
                    if table[gh * n + k] != table[g * n + table[h * n + k]] {
                        return Err(SptError::InvalidGroup(format!("associativity fails at ({g}, {h}, {k})")));
                    }
                }
            }
        }
        let inverses = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| table[g * n + h] == identity)
                    .ok_or_else(|| SptError::InvalidGroup(format!("no inverse for {g}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Arc::new(FiniteGroup { order: n, table, identity, inverses, label: label.into() }))
    }

    /// Cyclic group Z_n.
    pub fn cyclic(n: usize) -> Result<Arc<Self>, SptError> {
        if n == 0 {
            return Err(SptError::InvalidGroup("cyclic group of order 0".into()));
        }
        let rows = (0..n).map(|i| (0..n).map(|j| (i + j) % n).collect()).collect();
        Self::from_table(rows, format!("Z_{n}"))
    }

    /// Direct product, encoded lexicographically: (a, b) -> a * |B| + b.
    pub fn direct_product(a: &Arc<Self>, b: &Arc<Self>) -> Result<Arc<Self>, SptError> {
        let (na, nb) = (a.order, b.order);
        let n = na * nb;
        let rows = (0..n)
            .map(|x| {
                let (xa, xb) = (x / nb, x % nb);
                (0..n)
                    .map(|y| {
                        let (ya, yb) = (y / nb, y % nb);
                        a.mul(xa, ya) * nb + b.mul(xb, yb)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(rows, format!("{} x {}", a.label, b.label))
    }

    /// Symmetric group S_n on n letters (n <= 5), elements indexed by the
    /// position of the permutation in lexicographic order.
    pub fn symmetric(n: usize) -> Result<Arc<Self>, SptError> {
        if n == 0 || n > 5 {
            return Err(SptError::InvalidGroup("symmetric group supported for 1 <= n <= 5".into()));
        }
        let perms: Vec<Vec<usize>> = (0..n).permutations(n).collect();
        let index_of = |p: &[usize]| perms.iter().position(|q| q == p).unwrap();
        let rows = perms
            .iter()
            .map(|p| {
                perms
                    .iter()
                    .map(|q| {
                        // (p * q)(i) = p(q(i))
                        let composed: Vec<usize> = (0..n).map(|i| p[q[i]]).collect();
                        index_of(&composed)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(rows, format!("S_{n}"))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn mul(&self, g: usize, h: usize) -> usize {
        self.table[g * self.order + h]
    }

    pub fn inv(&self, g: usize) -> usize {
        self.inverses[g]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    /// Least k >= 1 with g^k = e. Always divides the group order.
    pub fn element_order(&self, g: usize) -> usize {
        let mut x = g;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, g);
            k += 1;
        }
        debug_assert_eq!(self.order % k, 0);
        k
    }

    /// All ordered pairs (g, h) with gh = hg, diagonal included.
    pub fn commuting_pairs(&self) -> Vec<(usize, usize)> {
        let mut pairs = Vec::new();
        for g in self.elements() {
            for h in self.elements() {
                if self.mul(g, h) == self.mul(h, g) {
                    pairs.push((g, h));
                }
            }
        }
        pairs
    }

    pub fn is_abelian(&self) -> bool {
        self.commuting_pairs().len() == self.order * self.order
    }

    /// Brute-force search for an isomorphism onto `other` (orders <= 8 only,
    /// the search is over all bijections).
    pub fn find_isomorphism(&self, other: &FiniteGroup) -> Option<GroupHom> {
        if self.order != other.order || self.order > 8 {
            return None;
        }
        for perm in (0..self.order).permutations(self.order) {
            if perm[self.identity] != other.identity {
                continue;
            }
            let ok = self
                .elements()
                .all(|g| self.elements().all(|h| perm[self.mul(g, h)] == other.mul(perm[g], perm[h])));
            if ok {
                return Some(GroupHom { map: perm });
            }
        }
        None
    }
}

/// A homomorphism between explicit groups, stored as the image of each index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupHom {
    map: Vec<usize>,
}

impl GroupHom {
    pub fn new(source: &FiniteGroup, target: &FiniteGroup, map: Vec<usize>) -> Result<Self, SptError> {
        if map.len() != source.order() {
            return Err(SptError::Mismatch("hom map length != source order".into()));
        }
        if map.iter().any(|&x| x >= target.order()) {
            return Err(SptError::Mismatch("hom image out of range".into()));
        }
        if map[source.identity()] != target.identity() {
            return Err(SptError::Mismatch("hom does not fix the identity".into()));
        }
        for g in source.elements() {
            for h in source.elements() {
                if map[source.mul(g, h)] != target.mul(map[g], map[h]) {
                    return Err(SptError::Mismatch(format!("hom fails at ({g}, {h})")));
                }
            }
        }
        Ok(GroupHom { map })
    }

    pub fn apply(&self, g: usize) -> usize {
        self.map[g]
    }

    pub fn is_bijective(&self) -> bool {
        let mut seen = vec![false; self.map.len()];
        for &x in &self.map {
            if x >= seen.len() || seen[x] {
                return false;
            }
            seen[x] = true;
        }
        true
    }
}
