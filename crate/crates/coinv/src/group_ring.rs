//! Exact arithmetic in the group rings `Z[G]` and `Q[G]` of a finite
//! abelian group, the distinguished elements `N`, `P_i`, `Q_i`, and the
//! telescoping coboundary solver behind every transfer map.

use crate::abelian::{FinAbGroup, GroupElt};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::collections::VecDeque;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RingError {
    #[error("the given elements do not generate the group")]
    NotGenerating,
    #[error("cannot parse ring element from {0:?}")]
    Parse(String),
}

/// Semantic coefficient domain of a ring element. The tag is sticky:
/// combining anything with a `Rational` operand yields `Rational`, even if
/// every coefficient happens to be an integer. [`RingElt::is_integral`]
/// looks at the actual denominators instead.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Domain {
    Integer,
    Rational,
}

impl Domain {
    fn join(self, other: Domain) -> Domain {
        match (self, other) {
            (Domain::Integer, Domain::Integer) => Domain::Integer,
            _ => Domain::Rational,
        }
    }
}

/// Element of `Z[G]` or `Q[G]`, stored densely along the canonical element
/// enumeration of `G`. Equality is mathematical: the domain tag does not
/// participate.
#[derive(Clone)]
pub struct RingElt {
    group: FinAbGroup,
    domain: Domain,
    coeffs: Vec<BigRational>,
}

impl PartialEq for RingElt {
    fn eq(&self, other: &Self) -> bool {
        self.group == other.group && self.coeffs == other.coeffs
    }
}

impl Eq for RingElt {}

impl RingElt {
    pub fn zero(group: &FinAbGroup) -> Self {
        RingElt {
            group: group.clone(),
            domain: Domain::Integer,
            coeffs: vec![BigRational::zero(); group.order() as usize],
        }
    }

    pub fn one(group: &FinAbGroup) -> Self {
        Self::monomial(group, &group.identity())
    }

    /// The single group element `g` with coefficient 1.
    pub fn monomial(group: &FinAbGroup, g: &GroupElt) -> Self {
        Self::term(group, g, BigRational::one())
    }

    pub fn term(group: &FinAbGroup, g: &GroupElt, coeff: BigRational) -> Self {
        let domain = if coeff.is_integer() {
            Domain::Integer
        } else {
            Domain::Rational
        };
        let mut coeffs = vec![BigRational::zero(); group.order() as usize];
        coeffs[group.index_of(g)] = coeff;
        RingElt {
            group: group.clone(),
            domain,
            coeffs,
        }
    }

    pub fn from_coeffs(group: &FinAbGroup, coeffs: Vec<BigRational>) -> Self {
        assert_eq!(coeffs.len(), group.order() as usize);
        let domain = if coeffs.iter().all(|c| c.is_integer()) {
            Domain::Integer
        } else {
            Domain::Rational
        };
        RingElt {
            group: group.clone(),
            domain,
            coeffs,
        }
    }

    /// `e - g`.
    pub fn one_minus(group: &FinAbGroup, g: &GroupElt) -> Self {
        Self::one(group).sub(&Self::monomial(group, g))
    }

    /// `N = Σ_{g∈G} g`, the full group sum.
    pub fn full_sum(group: &FinAbGroup) -> Self {
        RingElt {
            group: group.clone(),
            domain: Domain::Integer,
            coeffs: vec![BigRational::one(); group.order() as usize],
        }
    }

    /// `P_i = e + p_i + p_i² + … + p_i^{m_i - 1}` (0-based factor index).
    pub fn cyclic_sum(group: &FinAbGroup, i: usize) -> Self {
        assert!(i < group.rank(), "factor index out of range");
        let mut coeffs = vec![BigRational::zero(); group.order() as usize];
        let p = group.generator(i);
        let mut cur = group.identity();
        for _ in 0..group.moduli()[i] {
            coeffs[group.index_of(&cur)] = BigRational::one();
            cur = group.mul(&cur, &p);
        }
        RingElt {
            group: group.clone(),
            domain: Domain::Integer,
            coeffs,
        }
    }

    /// `Q_i = Π_{j≠i} P_j`, equivalently the sum of all elements whose i-th
    /// exponent vanishes.
    pub fn complementary_sum(group: &FinAbGroup, i: usize) -> Self {
        assert!(i < group.rank(), "factor index out of range");
        let mut coeffs = vec![BigRational::zero(); group.order() as usize];
        for g in group.elements() {
            if g.exponents()[i] == 0 {
                coeffs[group.index_of(&g)] = BigRational::one();
            }
        }
        RingElt {
            group: group.clone(),
            domain: Domain::Integer,
            coeffs,
        }
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    pub fn coeff(&self, g: &GroupElt) -> &BigRational {
        &self.coeffs[self.group.index_of(g)]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_integral(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_integer())
    }

    pub fn integer_coeffs(&self) -> Option<Vec<BigInt>> {
        self.coeffs
            .iter()
            .map(|c| c.is_integer().then(|| c.to_integer()))
            .collect()
    }

    /// Coefficient sum; a ring homomorphism onto the coefficient ring.
    pub fn augmentation(&self) -> BigRational {
        self.coeffs.iter().sum()
    }

    fn check_same_group(&self, other: &RingElt) {
        assert!(
            self.group == other.group,
            "ring elements over different groups"
        );
    }

    pub fn add(&self, other: &RingElt) -> RingElt {
        self.check_same_group(other);
        RingElt {
            group: self.group.clone(),
            domain: self.domain.join(other.domain),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &RingElt) -> RingElt {
        self.check_same_group(other);
        RingElt {
            group: self.group.clone(),
            domain: self.domain.join(other.domain),
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn neg(&self) -> RingElt {
        RingElt {
            group: self.group.clone(),
            domain: self.domain,
            coeffs: self.coeffs.iter().map(|a| -a).collect(),
        }
    }

    pub fn scale(&self, k: &BigRational) -> RingElt {
        let domain = if k.is_integer() {
            self.domain
        } else {
            Domain::Rational
        };
        RingElt {
            group: self.group.clone(),
            domain,
            coeffs: self.coeffs.iter().map(|a| a * k).collect(),
        }
    }

    pub fn scale_int(&self, k: &BigInt) -> RingElt {
        self.scale(&BigRational::from_integer(k.clone()))
    }

    /// Convolution product.
    pub fn mul(&self, other: &RingElt) -> RingElt {
        self.check_same_group(other);
        let g = &self.group;
        let left: Vec<(GroupElt, &BigRational)> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (g.elt_at(i), c))
            .collect();
        let right: Vec<(GroupElt, &BigRational)> = other
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (g.elt_at(i), c))
            .collect();
        let mut coeffs = vec![BigRational::zero(); g.order() as usize];
        for (x, cx) in &left {
            for (y, cy) in &right {
                coeffs[g.index_of(&g.mul(x, y))] += *cx * *cy;
            }
        }
        RingElt {
            group: g.clone(),
            domain: self.domain.join(other.domain),
            coeffs,
        }
    }

    /// Translation by a single group element: `g · self`.
    pub fn mul_elt(&self, g: &GroupElt) -> RingElt {
        let grp = &self.group;
        let mut coeffs = vec![BigRational::zero(); grp.order() as usize];
        for (i, c) in self.coeffs.iter().enumerate() {
            if !c.is_zero() {
                coeffs[grp.index_of(&grp.mul(&grp.elt_at(i), g))] = c.clone();
            }
        }
        RingElt {
            group: grp.clone(),
            domain: self.domain,
            coeffs,
        }
    }

    /// `self · (e - g)`.
    pub fn mul_one_minus(&self, g: &GroupElt) -> RingElt {
        self.sub(&self.mul_elt(g))
    }

    /// Nonzero terms as (element, coefficient) pairs in canonical order.
    pub fn terms(&self) -> Vec<(GroupElt, BigRational)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (self.group.elt_at(i), c.clone()))
            .collect()
    }

    /// Parses the textual syntax `1*(0,0) - 1*(1,0) + 1/2*(1,1)`.
    /// The bare token `0` is the zero element.
    pub fn parse(group: &FinAbGroup, s: &str) -> Result<RingElt, RingError> {
        let src = s.trim();
        if src.is_empty() {
            return Err(RingError::Parse(s.to_string()));
        }
        if src == "0" {
            return Ok(RingElt::zero(group));
        }
        let mut out = RingElt::zero(group);
        // Split into signed terms at top-level + and -. A sign must be
        // followed by a term: trailing or doubled signs are errors.
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut depth = 0usize;
        let mut cur = String::new();
        let mut neg = false;
        let mut sign_pending = false;
        for ch in src.chars() {
            match ch {
                '(' => {
                    depth += 1;
                    cur.push(ch);
                    sign_pending = false;
                }
                ')' => {
                    depth = depth
                        .checked_sub(1)
                        .ok_or_else(|| RingError::Parse(s.to_string()))?;
                    cur.push(ch);
                }
                '+' | '-' if depth == 0 => {
                    if sign_pending {
                        return Err(RingError::Parse(s.to_string()));
                    }
                    if !cur.trim().is_empty() {
                        terms.push((neg, std::mem::take(&mut cur)));
                    }
                    neg = ch == '-';
                    sign_pending = true;
                }
                _ => {
                    if !ch.is_whitespace() {
                        sign_pending = false;
                    }
                    cur.push(ch);
                }
            }
        }
        if sign_pending || cur.trim().is_empty() {
            return Err(RingError::Parse(s.to_string()));
        }
        terms.push((neg, cur));
        for (negate, term) in terms {
            let term = term.trim();
            let (coeff_str, elt_str) = term
                .split_once('*')
                .ok_or_else(|| RingError::Parse(s.to_string()))?;
            let coeff: BigRational = coeff_str
                .trim()
                .parse()
                .map_err(|_| RingError::Parse(s.to_string()))?;
            let elt = GroupElt::parse(group, elt_str.trim())
                .map_err(|_| RingError::Parse(s.to_string()))?;
            let signed = if negate { -coeff } else { coeff };
            out = out.add(&RingElt::term(group, &elt, signed));
        }
        Ok(out)
    }
}

impl fmt::Display for RingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let terms = self.terms();
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (g, c)) in terms.iter().enumerate() {
            if k == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else if c.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", c.abs(), g)?;
        }
        Ok(())
    }
}

impl fmt::Debug for RingElt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RingElt[{self}]")
    }
}

/// Coefficients `s_a ∈ Z[G]` with `Σ_a (e - gens[a]) · s_a = e - target`,
/// found by telescoping `e - gh = (e - g) + g(e - h)` along a shortest
/// generator word for `target` (breadth-first, ties broken by generator
/// order). When `target` equals a generator, its coefficient is `e` and all
/// others are zero; when `target = e`, all coefficients are zero.
pub fn solve_coboundary(
    group: &FinAbGroup,
    gens: &[GroupElt],
    target: &GroupElt,
) -> Result<Vec<RingElt>, RingError> {
    let order = group.order() as usize;
    let mut parent: Vec<Option<(usize, usize)>> = vec![None; order];
    let mut visited = vec![false; order];
    let start = group.index_of(&group.identity());
    visited[start] = true;
    let mut reached = 1usize;
    let mut queue = VecDeque::from([start]);
    while let Some(cur) = queue.pop_front() {
        let cur_elt = group.elt_at(cur);
        for (gi, g) in gens.iter().enumerate() {
            let nxt = group.index_of(&group.mul(&cur_elt, g));
            if !visited[nxt] {
                visited[nxt] = true;
                parent[nxt] = Some((cur, gi));
                reached += 1;
                queue.push_back(nxt);
            }
        }
    }
    if reached != order {
        return Err(RingError::NotGenerating);
    }
    let mut word = Vec::new();
    let mut cur = group.index_of(target);
    while let Some((prev, gi)) = parent[cur] {
        word.push(gi);
        cur = prev;
    }
    word.reverse();
    let mut coeffs = vec![RingElt::zero(group); gens.len()];
    let mut prefix = group.identity();
    for gi in word {
        coeffs[gi] = coeffs[gi].add(&RingElt::monomial(group, &prefix));
        prefix = group.mul(&prefix, &gens[gi]);
    }
    Ok(coeffs)
}
