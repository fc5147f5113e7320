//! Finite abelian groups in product form `Z_m1 × … × Z_mn`, their elements
//! as exponent vectors, generation tests, and the wedge-square torsion
//! prediction `⊕_{i<j} Z_gcd(mi,mj)`.

use crate::linalg::{self, IntMatrix};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("modulus 0 is not a valid cyclic order")]
    ZeroModulus,
    #[error("cannot parse group moduli from {0:?}")]
    Parse(String),
    #[error("cannot parse group element from {0:?}")]
    ParseElement(String),
}

/// `G = Z_m1 × … × Z_mn`, written multiplicatively. Moduli are kept in the
/// order given; factors `Z_1` are dropped so the trivial group has an empty
/// list.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct FinAbGroup {
    moduli: Vec<u64>,
}

/// Element of a [`FinAbGroup`], stored as the exponent vector of
/// `p_1^{k_1} … p_n^{k_n}` with `0 ≤ k_i < m_i`. Operations live on the
/// group, which acts as the arithmetic context; feeding an element to a
/// group it does not belong to is a caller bug and panics.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElt {
    exps: Vec<u64>,
}

impl FinAbGroup {
    pub fn new(moduli: Vec<u64>) -> Result<Self, GroupError> {
        if moduli.contains(&0) {
            return Err(GroupError::ZeroModulus);
        }
        Ok(FinAbGroup {
            moduli: moduli.into_iter().filter(|&m| m >= 2).collect(),
        })
    }

    pub fn trivial() -> Self {
        FinAbGroup { moduli: Vec::new() }
    }

    /// Parses a comma-separated moduli list, e.g. `"2,2"` or `"6,4"`.
    /// The empty string gives the trivial group.
    pub fn parse(s: &str) -> Result<Self, GroupError> {
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Ok(Self::trivial());
        }
        let mut moduli = Vec::new();
        for part in trimmed.split(',') {
            let m: u64 = part
                .trim()
                .parse()
                .map_err(|_| GroupError::Parse(s.to_string()))?;
            moduli.push(m);
        }
        Self::new(moduli)
    }

    pub fn moduli(&self) -> &[u64] {
        &self.moduli
    }

    pub fn moduli_string(&self) -> String {
        self.moduli
            .iter()
            .map(|m| m.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Number of stored cyclic factors.
    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> u64 {
        self.checked_order().expect("group order overflows u64")
    }

    pub fn is_trivial(&self) -> bool {
        self.moduli.is_empty()
    }

    pub fn identity(&self) -> GroupElt {
        GroupElt {
            exps: vec![0; self.moduli.len()],
        }
    }

    /// The distinguished generator `p_i` of the i-th factor (0-based).
    pub fn generator(&self, i: usize) -> GroupElt {
        assert!(i < self.moduli.len(), "generator index out of range");
        let mut exps = vec![0; self.moduli.len()];
        exps[i] = 1;
        GroupElt { exps }
    }

    pub fn generators(&self) -> Vec<GroupElt> {
        (0..self.rank()).map(|i| self.generator(i)).collect()
    }

    /// Builds an element from arbitrary integer exponents, reducing each
    /// coordinate modulo its modulus.
    pub fn elt(&self, exps: &[i64]) -> GroupElt {
        assert_eq!(
            exps.len(),
            self.moduli.len(),
            "exponent vector length must match the number of factors"
        );
        GroupElt {
            exps: exps
                .iter()
                .zip(&self.moduli)
                .map(|(&k, &m)| (k as i128).rem_euclid(m as i128) as u64)
                .collect(),
        }
    }

    /// Group order, or `None` when the product overflows u64. [`Self::order`]
    /// panics in that case; callers handling untrusted moduli should check
    /// here first.
    pub fn checked_order(&self) -> Option<u64> {
        self.moduli
            .iter()
            .try_fold(1u64, |acc, &m| acc.checked_mul(m))
    }

    pub fn contains(&self, x: &GroupElt) -> bool {
        x.exps.len() == self.moduli.len()
            && x.exps.iter().zip(&self.moduli).all(|(&k, &m)| k < m)
    }

    fn check(&self, x: &GroupElt) {
        assert!(
            self.contains(x),
            "element {:?} does not belong to the group Z_({})",
            x.exps,
            self.moduli_string()
        );
    }

    pub fn mul(&self, x: &GroupElt, y: &GroupElt) -> GroupElt {
        self.check(x);
        self.check(y);
        GroupElt {
            exps: x
                .exps
                .iter()
                .zip(&y.exps)
                .zip(&self.moduli)
                .map(|((&a, &b), &m)| (a + b) % m)
                .collect(),
        }
    }

    pub fn inv(&self, x: &GroupElt) -> GroupElt {
        self.check(x);
        GroupElt {
            exps: x
                .exps
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| if a == 0 { 0 } else { m - a })
                .collect(),
        }
    }

    pub fn pow(&self, x: &GroupElt, k: i64) -> GroupElt {
        self.check(x);
        GroupElt {
            exps: x
                .exps
                .iter()
                .zip(&self.moduli)
                .map(|(&a, &m)| {
                    let m128 = m as i128;
                    ((a as i128 * k as i128).rem_euclid(m128)) as u64
                })
                .collect(),
        }
    }

    pub fn elt_order(&self, x: &GroupElt) -> u64 {
        self.check(x);
        x.exps
            .iter()
            .zip(&self.moduli)
            .map(|(&a, &m)| m / a.gcd(&m))
            .fold(1u64, |acc, o| acc.lcm(&o))
    }

    /// Canonical enumeration of all elements; the last factor varies
    /// fastest. [`Self::index_of`] and [`Self::elt_at`] are its inverses.
    pub fn elements(&self) -> impl Iterator<Item = GroupElt> + '_ {
        let order = self.order() as usize;
        (0..order).map(move |i| self.elt_at(i))
    }

    pub fn index_of(&self, x: &GroupElt) -> usize {
        self.check(x);
        let mut idx = 0usize;
        for (&k, &m) in x.exps.iter().zip(&self.moduli) {
            idx = idx * m as usize + k as usize;
        }
        idx
    }

    pub fn elt_at(&self, mut idx: usize) -> GroupElt {
        assert!(idx < self.order() as usize, "element index out of range");
        let mut exps = vec![0u64; self.moduli.len()];
        for (slot, &m) in exps.iter_mut().zip(&self.moduli).rev() {
            *slot = (idx % m as usize) as u64;
            idx /= m as usize;
        }
        GroupElt { exps }
    }

    /// Does the subgroup closure of `s` exhaust the group? Breadth-first
    /// closure under multiplication.
    pub fn generates(&self, s: &[GroupElt]) -> bool {
        for x in s {
            self.check(x);
        }
        let order = self.order() as usize;
        let mut seen = vec![false; order];
        let mut queue = vec![self.identity()];
        seen[self.index_of(&queue[0])] = true;
        let mut count = 1usize;
        while let Some(x) = queue.pop() {
            for g in s {
                let y = self.mul(&x, g);
                let idx = self.index_of(&y);
                if !seen[idx] {
                    seen[idx] = true;
                    count += 1;
                    queue.push(y);
                }
            }
        }
        count == order
    }

    /// Invariant factors of the wedge square `G ∧ G = ⊕_{i<j} Z_d(i,j)`
    /// with `d(i,j) = gcd(m_i, m_j)`: the predicted torsion of the
    /// coinvariants of any skew product with non-degenerate `G`-valued
    /// cocycles. Empty for cyclic or trivial `G`, and more generally when
    /// all the pairwise gcds are 1.
    pub fn predicted_torsion(&self) -> Vec<u64> {
        let mut orders = Vec::new();
        for i in 0..self.moduli.len() {
            for j in i + 1..self.moduli.len() {
                let d = self.moduli[i].gcd(&self.moduli[j]);
                if d > 1 {
                    orders.push(d);
                }
            }
        }
        canonical_invariant_factors(&orders)
    }
}

impl fmt::Debug for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FinAbGroup({})", self.moduli_string())
    }
}

impl fmt::Display for FinAbGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.moduli.is_empty() {
            return write!(f, "trivial");
        }
        let parts: Vec<String> = self.moduli.iter().map(|m| format!("Z_{m}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl GroupElt {
    pub fn exponents(&self) -> &[u64] {
        &self.exps
    }

    pub fn is_identity(&self) -> bool {
        self.exps.iter().all(|&k| k == 0)
    }

    /// Parses `"(1,0)"` or `"1,0"`; `"()"` is the element of the trivial
    /// group. Exponents may be any integers and are reduced by `group`.
    pub fn parse(group: &FinAbGroup, s: &str) -> Result<GroupElt, GroupError> {
        let inner = s.trim().trim_start_matches('(').trim_end_matches(')');
        let mut exps = Vec::new();
        if !inner.trim().is_empty() {
            for part in inner.split(',') {
                let k: i64 = part
                    .trim()
                    .parse()
                    .map_err(|_| GroupError::ParseElement(s.to_string()))?;
                exps.push(k);
            }
        }
        if exps.len() != group.rank() {
            return Err(GroupError::ParseElement(s.to_string()));
        }
        Ok(group.elt(&exps))
    }
}

impl fmt::Debug for GroupElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for GroupElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.exps.iter().map(|k| k.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// Canonical invariant-factor chain of `⊕ Z_orders[i]`, via Smith normal
/// form of the diagonal matrix of cyclic orders. `Z_2 ⊕ Z_3` and `Z_6`
/// produce the same chain, so chains compare by isomorphism type.
pub fn canonical_invariant_factors(orders: &[u64]) -> Vec<u64> {
    let nontrivial: Vec<BigInt> = orders
        .iter()
        .filter(|&&d| d > 1)
        .map(|&d| BigInt::from(d))
        .collect();
    if nontrivial.is_empty() {
        return Vec::new();
    }
    let snf = linalg::smith_normal_form(&IntMatrix::diagonal(&nontrivial));
    snf.diagonal()
        .into_iter()
        .filter(|d| d > &BigInt::one())
        .map(|d| d.to_u64().expect("invariant factor overflows u64"))
        .collect()
}
