//! Finite presentations of the coinvariant groups.
//!
//! For a finite abelian group `G`, label sets `A`, `B` and a map
//! `μ : A ∪ B → G` whose restrictions both generate `G`, the module
//! `M(A,B) = Z[G] ⊗ Z^A ⊗ Z^B` is divided by the subgroups of coboundary
//! elements `α(a)(e-μ(b)) ⊗ a ⊗ b` and `β(b)(e-μ(a)) ⊗ a ⊗ b`. The quotient
//! `N(A,B)` is the stage group whose torsion this crate computes; its
//! torsion is `G ∧ G` independently of `A`, `B`, `μ`.
//!
//! Besides the presentation itself this module hosts the residue classifier
//! for torsion classes, the explicit witness elements realizing each
//! `Z_gcd(mi,mj)` component, and the constructive solvers those proofs run
//! on (`integral_shift`, `integral_adjustment`).

use crate::abelian::{FinAbGroup, GroupElt, GroupError};
use crate::group_ring::{RingElt, RingError};
use crate::linalg::{self, CokernelInvariants, IntMatrix, LinalgError, SnfResult};
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use std::fmt;
use std::sync::OnceLock;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PresError {
    #[error("label set {side} is empty")]
    EmptyLabels { side: char },
    #[error("duplicate label {label:?} in set {side}")]
    DuplicateLabel { side: char, label: String },
    #[error("label {label:?} carries an element outside the group")]
    ForeignValue { label: String },
    #[error("the values of side {side} do not generate the group")]
    NonGenerating { side: char },
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("vector has length {found}, expected {expected}")]
    VectorLength { found: usize, expected: usize },
    #[error("component ({a},{b}) is not integral")]
    NonIntegralComponent { a: String, b: String },
    #[error("the class of the element is not torsion")]
    NotTorsionClass,
    #[error("gcd(m{i},m{j}) = 1: no torsion in that component")]
    NoTorsionPair { i: usize, j: usize },
    #[error("factor index out of range")]
    FactorIndex,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("cannot parse fixture: {0}")]
    Fixture(String),
    #[error("transfer construction failed: {0}")]
    Transfer(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// The data `(A, B, μ)` of a stage: two ordered label lists with a group
/// value attached to each label. Both value sets must generate the group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleData {
    group: FinAbGroup,
    a: Vec<(String, GroupElt)>,
    b: Vec<(String, GroupElt)>,
}

impl CocycleData {
    pub fn new(
        group: FinAbGroup,
        a: Vec<(String, GroupElt)>,
        b: Vec<(String, GroupElt)>,
    ) -> Result<Self, PresError> {
        for (side, list) in [('A', &a), ('B', &b)] {
            if list.is_empty() {
                return Err(PresError::EmptyLabels { side });
            }
            for (i, (label, value)) in list.iter().enumerate() {
                if list[..i].iter().any(|(other, _)| other == label) {
                    return Err(PresError::DuplicateLabel {
                        side,
                        label: label.clone(),
                    });
                }
                if !group.contains(value) {
                    return Err(PresError::ForeignValue {
                        label: label.clone(),
                    });
                }
            }
            let values: Vec<GroupElt> = list.iter().map(|(_, v)| v.clone()).collect();
            if !group.generates(&values) {
                return Err(PresError::NonGenerating { side });
            }
        }
        Ok(CocycleData { group, a, b })
    }

    /// `A = B = {p_1, …, p_n}` with `μ` the inclusion. The trivial group
    /// gets the single label `e` carrying the identity.
    pub fn standard(group: &FinAbGroup) -> Self {
        let side: Vec<(String, GroupElt)> = if group.is_trivial() {
            vec![("e".to_string(), group.identity())]
        } else {
            (0..group.rank())
                .map(|i| (format!("p{}", i + 1), group.generator(i)))
                .collect()
        };
        CocycleData {
            group: group.clone(),
            a: side.clone(),
            b: side,
        }
    }

    pub fn is_standard(&self) -> bool {
        *self == Self::standard(&self.group)
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn a_len(&self) -> usize {
        self.a.len()
    }

    pub fn b_len(&self) -> usize {
        self.b.len()
    }

    pub fn a_label(&self, i: usize) -> &str {
        &self.a[i].0
    }

    pub fn b_label(&self, i: usize) -> &str {
        &self.b[i].0
    }

    pub fn a_value(&self, i: usize) -> &GroupElt {
        &self.a[i].1
    }

    pub fn b_value(&self, i: usize) -> &GroupElt {
        &self.b[i].1
    }

    pub fn a_values(&self) -> Vec<GroupElt> {
        self.a.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn b_values(&self) -> Vec<GroupElt> {
        self.b.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn a_index(&self, label: &str) -> Option<usize> {
        self.a.iter().position(|(l, _)| l == label)
    }

    pub fn b_index(&self, label: &str) -> Option<usize> {
        self.b.iter().position(|(l, _)| l == label)
    }

    /// Parses the fixture format:
    ///
    /// ```text
    /// group: 2,2
    /// A: a1=(1,0) a2=(0,1)
    /// B: b1=(1,0) b2=(1,1)
    /// ```
    ///
    /// Blank lines and `#` comments are ignored.
    pub fn parse_fixture(text: &str) -> Result<Self, PresError> {
        let mut group: Option<FinAbGroup> = None;
        let mut a: Option<Vec<(String, GroupElt)>> = None;
        let mut b: Option<Vec<(String, GroupElt)>> = None;
        for raw in text.lines() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("group:") {
                group = Some(FinAbGroup::parse(rest)?);
            } else if let Some(rest) = line.strip_prefix("A:") {
                let g = group
                    .as_ref()
                    .ok_or_else(|| PresError::Fixture("A: before group:".into()))?;
                a = Some(parse_labeled_values(g, rest)?);
            } else if let Some(rest) = line.strip_prefix("B:") {
                let g = group
                    .as_ref()
                    .ok_or_else(|| PresError::Fixture("B: before group:".into()))?;
                b = Some(parse_labeled_values(g, rest)?);
            } else {
                return Err(PresError::Fixture(format!("unrecognized line {line:?}")));
            }
        }
        let group = group.ok_or_else(|| PresError::Fixture("missing group: line".into()))?;
        let a = a.ok_or_else(|| PresError::Fixture("missing A: line".into()))?;
        let b = b.ok_or_else(|| PresError::Fixture("missing B: line".into()))?;
        Self::new(group, a, b)
    }

    pub fn to_fixture(&self) -> String {
        let fmt_side = |side: &[(String, GroupElt)]| {
            side.iter()
                .map(|(l, v)| format!("{l}={v}"))
                .collect::<Vec<_>>()
                .join(" ")
        };
        format!(
            "group: {}\nA: {}\nB: {}\n",
            self.group.moduli_string(),
            fmt_side(&self.a),
            fmt_side(&self.b)
        )
    }
}

fn parse_labeled_values(
    group: &FinAbGroup,
    text: &str,
) -> Result<Vec<(String, GroupElt)>, PresError> {
    let mut out = Vec::new();
    for token in text.split_whitespace() {
        let (label, value) = token
            .split_once('=')
            .ok_or_else(|| PresError::Fixture(format!("expected label=(…) in {token:?}")))?;
        let elt = GroupElt::parse(group, value)?;
        out.push((label.to_string(), elt));
    }
    Ok(out)
}

/// Index scheme for the basis `g ⊗ a ⊗ b` of `M(A,B)`:
/// `position = (g·|A| + a)·|B| + b` with `g` the canonical element index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModuleBasis {
    group: FinAbGroup,
    a_len: usize,
    b_len: usize,
}

impl ModuleBasis {
    pub fn new(group: FinAbGroup, a_len: usize, b_len: usize) -> Self {
        ModuleBasis {
            group,
            a_len,
            b_len,
        }
    }

    pub fn dim(&self) -> usize {
        self.group.order() as usize * self.a_len * self.b_len
    }

    pub fn index(&self, g_idx: usize, a_idx: usize, b_idx: usize) -> usize {
        debug_assert!(a_idx < self.a_len && b_idx < self.b_len);
        (g_idx * self.a_len + a_idx) * self.b_len + b_idx
    }

    pub fn decode(&self, pos: usize) -> (usize, usize, usize) {
        let b_idx = pos % self.b_len;
        let rest = pos / self.b_len;
        (rest / self.a_len, rest % self.a_len, b_idx)
    }

    /// The `(a,b)` component of an integer vector, as a ring element.
    pub fn block(&self, v: &[BigInt], a_idx: usize, b_idx: usize) -> RingElt {
        let coeffs = (0..self.group.order() as usize)
            .map(|g| BigRational::from_integer(v[self.index(g, a_idx, b_idx)].clone()))
            .collect();
        RingElt::from_coeffs(&self.group, coeffs)
    }

    /// Assembles an integer vector from per-component ring elements; every
    /// component must be integral.
    pub fn assemble(
        &self,
        f: impl Fn(usize, usize) -> RingElt,
    ) -> Result<Vec<BigInt>, PresError> {
        let mut v = vec![BigInt::zero(); self.dim()];
        for a_idx in 0..self.a_len {
            for b_idx in 0..self.b_len {
                let elt = f(a_idx, b_idx);
                let ints = elt.integer_coeffs().ok_or_else(|| {
                    PresError::NonIntegralComponent {
                        a: a_idx.to_string(),
                        b: b_idx.to_string(),
                    }
                })?;
                for (g_idx, c) in ints.into_iter().enumerate() {
                    v[self.index(g_idx, a_idx, b_idx)] = c;
                }
            }
        }
        Ok(v)
    }
}

/// `N(A,B) = M(A,B) / (relation row span)`, with the relation rows spanning
/// the two coboundary subgroups over `Z`: one generator per `(label, group
/// element)` pair.
#[derive(Clone, Debug)]
pub struct Presentation {
    data: CocycleData,
    basis: ModuleBasis,
    rows: IntMatrix,
    snf: OnceLock<SnfResult>,
}

impl Presentation {
    pub fn build(data: CocycleData) -> Self {
        let group = data.group().clone();
        let order = group.order() as usize;
        let basis = ModuleBasis::new(group.clone(), data.a_len(), data.b_len());
        let dim = basis.dim();
        let mut rows: Vec<Vec<BigInt>> = Vec::with_capacity(order * (data.a_len() + data.b_len()));
        // For each a and g: Σ_b g(e - μ(b)) ⊗ a ⊗ b.
        for a_idx in 0..data.a_len() {
            for g_idx in 0..order {
                let g = group.elt_at(g_idx);
                let mut row = vec![BigInt::zero(); dim];
                for b_idx in 0..data.b_len() {
                    let shifted = group.index_of(&group.mul(&g, data.b_value(b_idx)));
                    row[basis.index(g_idx, a_idx, b_idx)] += 1;
                    row[basis.index(shifted, a_idx, b_idx)] -= 1;
                }
                rows.push(row);
            }
        }
        // For each b and g: Σ_a g(e - μ(a)) ⊗ a ⊗ b.
        for b_idx in 0..data.b_len() {
            for g_idx in 0..order {
                let g = group.elt_at(g_idx);
                let mut row = vec![BigInt::zero(); dim];
                for a_idx in 0..data.a_len() {
                    let shifted = group.index_of(&group.mul(&g, data.a_value(a_idx)));
                    row[basis.index(g_idx, a_idx, b_idx)] += 1;
                    row[basis.index(shifted, a_idx, b_idx)] -= 1;
                }
                rows.push(row);
            }
        }
        let rows = linalg::relation_matrix(&rows, dim).expect("rows built with matching length");
        Presentation {
            data,
            basis,
            rows,
            snf: OnceLock::new(),
        }
    }

    pub fn standard(group: &FinAbGroup) -> Self {
        Self::build(CocycleData::standard(group))
    }

    pub fn data(&self) -> &CocycleData {
        &self.data
    }

    pub fn group(&self) -> &FinAbGroup {
        self.data.group()
    }

    pub fn basis(&self) -> &ModuleBasis {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn relation_rows(&self) -> &IntMatrix {
        &self.rows
    }

    /// Row indices generating the `A`-side coboundary subgroup (the rest
    /// generate the `B`-side one).
    pub fn a_side_rows(&self) -> std::ops::Range<usize> {
        0..self.group().order() as usize * self.data.a_len()
    }

    pub fn b_side_rows(&self) -> std::ops::Range<usize> {
        let split = self.group().order() as usize * self.data.a_len();
        split..self.rows.rows()
    }

    pub fn snf(&self) -> &SnfResult {
        self.snf.get_or_init(|| linalg::smith_normal_form(&self.rows))
    }

    /// Free rank and torsion invariant factors of `N(A,B)`.
    pub fn invariants(&self) -> CokernelInvariants {
        let snf = self.snf();
        CokernelInvariants {
            free_rank: self.dim() - snf.rank(),
            torsion_factors: snf.torsion_factors(),
        }
    }

    /// Does the computed torsion agree with the wedge-square prediction?
    pub fn matches_predicted(&self) -> bool {
        let predicted: Vec<BigInt> = self
            .group()
            .predicted_torsion()
            .into_iter()
            .map(BigInt::from)
            .collect();
        self.invariants().torsion_factors == predicted
    }

    fn check_len(&self, v: &[BigInt]) -> Result<(), PresError> {
        if v.len() != self.dim() {
            return Err(PresError::VectorLength {
                found: v.len(),
                expected: self.dim(),
            });
        }
        Ok(())
    }

    /// Is the class of `v` torsion, i.e. is `v` a rational combination of
    /// relation rows?
    pub fn is_torsion_class(&self, v: &[BigInt]) -> Result<bool, PresError> {
        self.check_len(v)?;
        Ok(self.snf().in_span_q(v))
    }

    /// Is `v` an integer combination of relation rows (a trivial class)?
    pub fn in_relation_span(&self, v: &[BigInt]) -> Result<bool, PresError> {
        self.check_len(v)?;
        Ok(self.snf().in_span_z(v))
    }

    pub fn classes_equal(&self, v: &[BigInt], w: &[BigInt]) -> Result<bool, PresError> {
        self.check_len(v)?;
        self.check_len(w)?;
        let diff: Vec<BigInt> = v.iter().zip(w).map(|(a, b)| a - b).collect();
        Ok(self.snf().in_span_z(&diff))
    }

    /// Smallest `n ≥ 1` with `n·v` trivial in `N(A,B)`, `None` when the
    /// class is non-torsion.
    pub fn class_order(&self, v: &[BigInt]) -> Result<Option<BigInt>, PresError> {
        self.check_len(v)?;
        Ok(self.snf().class_order(v))
    }
}

/// Residue of a torsion class in one `Z_d(i,j)` component (0-based factor
/// indices).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionResidue {
    pub i: usize,
    pub j: usize,
    pub modulus: u64,
    pub residue: u64,
}

/// The full residue vector `(t_{i,j} mod d(i,j))_{i<j}` classifying a
/// torsion class of `N` on standard data.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionResidues {
    pub entries: Vec<TorsionResidue>,
}

impl TorsionResidues {
    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|e| e.residue == 0)
    }

    pub fn residue(&self, i: usize, j: usize) -> Option<&TorsionResidue> {
        self.entries.iter().find(|e| e.i == i && e.j == j)
    }

    /// Componentwise sum modulo each `d(i,j)`; `None` if the shapes differ.
    pub fn add(&self, other: &TorsionResidues) -> Option<TorsionResidues> {
        if self.entries.len() != other.entries.len() {
            return None;
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| {
                (x.i == y.i && x.j == y.j && x.modulus == y.modulus).then(|| TorsionResidue {
                    i: x.i,
                    j: x.j,
                    modulus: x.modulus,
                    residue: (x.residue + y.residue) % x.modulus.max(1),
                })
            })
            .collect::<Option<Vec<_>>>()?;
        Some(TorsionResidues { entries })
    }
}

impl fmt::Display for TorsionResidues {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.entries.is_empty() {
            return write!(f, "(no pairs)");
        }
        let parts: Vec<String> = self
            .entries
            .iter()
            .map(|e| format!("({},{}): {} mod {}", e.i + 1, e.j + 1, e.residue, e.modulus))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

struct AlphaBeta {
    alpha: Vec<RingElt>,
    beta: Vec<RingElt>,
}

/// Solves `r(p_i, p_j) = α(p_i)(e - p_j) + β(p_j)(e - p_i)` over `Q[G]` on
/// standard data. `None` when no solution exists (the class of `r` is not
/// torsion). Also returns the rational nullspace so callers can verify
/// solution-independence.
fn solve_alpha_beta(
    pres: &Presentation,
    r: &[BigInt],
) -> Option<(AlphaBeta, Vec<Vec<BigRational>>)> {
    let group = pres.group();
    let n = group.rank();
    let order = group.order() as usize;
    let unknowns = 2 * n * order;
    let mut rows = Vec::with_capacity(n * n * order);
    let mut rhs = Vec::with_capacity(n * n * order);
    let alpha_col = |i: usize, g: usize| i * order + g;
    let beta_col = |j: usize, g: usize| (n + j) * order + g;
    for i in 0..n {
        for j in 0..n {
            let pj_inv = group.inv(&group.generator(j));
            let pi_inv = group.inv(&group.generator(i));
            for g_idx in 0..order {
                let g = group.elt_at(g_idx);
                let mut row = vec![BigInt::zero(); unknowns];
                row[alpha_col(i, g_idx)] += 1;
                row[alpha_col(i, group.index_of(&group.mul(&g, &pj_inv)))] -= 1;
                row[beta_col(j, g_idx)] += 1;
                row[beta_col(j, group.index_of(&group.mul(&g, &pi_inv)))] -= 1;
                rows.push(row);
                rhs.push(r[pres.basis().index(g_idx, i, j)].clone());
            }
        }
    }
    let system = linalg::relation_matrix(&rows, unknowns).expect("uniform row length");
    let (sol, nullspace) = linalg::solve_q_with_nullspace(&system, &rhs)?;
    Some((split_alpha_beta(group, &sol), nullspace))
}

fn split_alpha_beta(group: &FinAbGroup, sol: &[BigRational]) -> AlphaBeta {
    let n = group.rank();
    let order = group.order() as usize;
    let slice_elt = |block: usize| {
        RingElt::from_coeffs(group, sol[block * order..(block + 1) * order].to_vec())
    };
    AlphaBeta {
        alpha: (0..n).map(slice_elt).collect(),
        beta: (0..n).map(|j| slice_elt(n + j)).collect(),
    }
}

/// Residue of the torsion class of `r` for one ordered pair `(i, j)` of
/// distinct factor indices: the unique `t ∈ Q` modulo `Z` with
/// `(α(p_i)+β(p_i))(e-p_j) − t·N` integral, returned as `t·d mod d` with
/// `d = gcd(m_i, m_j)`.
fn pair_residue(ab: &AlphaBeta, group: &FinAbGroup, i: usize, j: usize) -> (u64, u64) {
    let kappa = ab.alpha[i]
        .add(&ab.beta[i])
        .mul_one_minus(&group.generator(j));
    let t = kappa.coeff(&group.identity()).clone();
    let n_elt = RingElt::full_sum(group);
    assert!(
        kappa.sub(&n_elt.scale(&t)).is_integral(),
        "kappa - t*N must be integral for a torsion class"
    );
    let d = group.moduli()[i].gcd(&group.moduli()[j]);
    let td = t * BigRational::from_integer(BigInt::from(d));
    assert!(td.is_integer(), "t*d must be an integer");
    let residue = td.to_integer().mod_floor(&BigInt::from(d));
    (d, residue.to_u64().expect("residue fits in u64"))
}

#[cfg(debug_assertions)]
fn assert_solution_independent(
    pres: &Presentation,
    ab: &AlphaBeta,
    nullspace: &[Vec<BigRational>],
    sol_check: impl Fn(&AlphaBeta) -> Vec<(u64, u64)>,
) {
    if nullspace.is_empty() {
        return;
    }
    let group = pres.group();
    let order = group.order() as usize;
    let n = group.rank();
    // Deterministic perturbation: cycle small coefficients over the
    // nullspace basis to land on a different solution of the same system.
    let weights = [1i64, -1, 2, -2, 3];
    let mut perturbed: Vec<BigRational> = vec![BigRational::zero(); 2 * n * order];
    for (k, basis_vec) in nullspace.iter().enumerate() {
        let w = BigRational::from_integer(BigInt::from(weights[k % weights.len()]));
        for (slot, c) in perturbed.iter_mut().zip(basis_vec) {
            *slot += c * &w;
        }
    }
    for (block, elt) in ab.alpha.iter().chain(&ab.beta).enumerate() {
        for (g_idx, c) in elt.coeffs().iter().enumerate() {
            perturbed[block * order + g_idx] += c;
        }
    }
    let ab2 = split_alpha_beta(group, &perturbed);
    assert_eq!(
        sol_check(ab),
        sol_check(&ab2),
        "torsion residues must not depend on the (alpha, beta) solution"
    );
}

/// Residue vector of a torsion class on standard data; general data is
/// handled by composing with the transfer map to standard data.
pub fn torsion_class_invariant(
    pres: &Presentation,
    r: &[BigInt],
) -> Result<TorsionResidues, PresError> {
    if pres.data().is_standard() {
        return torsion_class_invariant_standard(pres, r);
    }
    if !pres.is_torsion_class(r)? {
        return Err(PresError::NotTorsionClass);
    }
    let std_pres = Presentation::standard(pres.group());
    let map = crate::morphism::build_transfer(pres, &std_pres)
        .map_err(|e| PresError::Transfer(e.to_string()))?;
    let mapped = map.apply(r);
    torsion_class_invariant_standard(&std_pres, &mapped)
}

fn torsion_class_invariant_standard(
    pres: &Presentation,
    r: &[BigInt],
) -> Result<TorsionResidues, PresError> {
    debug_assert!(pres.data().is_standard());
    if !pres.is_torsion_class(r)? {
        return Err(PresError::NotTorsionClass);
    }
    let (ab, nullspace) = solve_alpha_beta(pres, r)
        .expect("a torsion class always admits a rational (alpha, beta) decomposition");
    let group = pres.group();
    let n = group.rank();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    #[cfg(debug_assertions)]
    assert_solution_independent(pres, &ab, &nullspace, |candidate| {
        pairs
            .iter()
            .map(|&(i, j)| pair_residue(candidate, group, i, j))
            .collect()
    });
    #[cfg(not(debug_assertions))]
    let _ = &nullspace;
    let entries = pairs
        .iter()
        .map(|&(i, j)| {
            let (modulus, residue) = pair_residue(&ab, group, i, j);
            TorsionResidue {
                i,
                j,
                modulus,
                residue,
            }
        })
        .collect();
    Ok(TorsionResidues { entries })
}

/// Residue for a single ordered pair of distinct factor indices, allowing
/// `i > j`; swapping the pair negates the residue.
pub fn ordered_pair_residue(
    pres: &Presentation,
    r: &[BigInt],
    i: usize,
    j: usize,
) -> Result<(u64, u64), PresError> {
    if !pres.data().is_standard() {
        return Err(PresError::Precondition(
            "ordered pair residues are defined on standard data".into(),
        ));
    }
    let n = pres.group().rank();
    if i >= n || j >= n || i == j {
        return Err(PresError::FactorIndex);
    }
    if !pres.is_torsion_class(r)? {
        return Err(PresError::NotTorsionClass);
    }
    let (ab, _) = solve_alpha_beta(pres, r)
        .expect("a torsion class always admits a rational (alpha, beta) decomposition");
    Ok(pair_residue(&ab, pres.group(), i, j))
}

/// The explicit integral element of `M` on standard data whose class has
/// order exactly `d = gcd(m_k, m_l)` and residue 1 in component `(k, l)`,
/// zero elsewhere: `((m_k/d)·Q_k − (m_l/d)·Q_l) ⊗ p_k ⊗ p_l`.
pub fn surjectivity_witness(
    group: &FinAbGroup,
    k: usize,
    l: usize,
) -> Result<Vec<BigInt>, PresError> {
    let n = group.rank();
    if k >= n || l >= n || k == l {
        return Err(PresError::FactorIndex);
    }
    let d = group.moduli()[k].gcd(&group.moduli()[l]);
    if d <= 1 {
        return Err(PresError::NoTorsionPair { i: k, j: l });
    }
    let qk = RingElt::complementary_sum(group, k).scale_int(&BigInt::from(group.moduli()[k] / d));
    let ql = RingElt::complementary_sum(group, l).scale_int(&BigInt::from(group.moduli()[l] / d));
    let w = qk.sub(&ql);
    let basis = ModuleBasis::new(group.clone(), n, n);
    basis.assemble(|a, b| {
        if (a, b) == (k, l) {
            w.clone()
        } else {
            RingElt::zero(group)
        }
    })
}

/// Parses a module element given per-component ring elements, one line per
/// nonzero component:
///
/// ```text
/// p1 p2: 1*(0,1) - 1*(1,0)
/// ```
///
/// Unlisted components are zero. Blank lines, `#` comments and a leading
/// `group:` line (already consumed by the caller) are ignored.
pub fn parse_element_text(data: &CocycleData, text: &str) -> Result<Vec<BigInt>, PresError> {
    let basis = ModuleBasis::new(data.group().clone(), data.a_len(), data.b_len());
    let mut v = vec![BigInt::zero(); basis.dim()];
    for raw in text.lines() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with("group:") {
            continue;
        }
        let (head, body) = line
            .split_once(':')
            .ok_or_else(|| PresError::Fixture(format!("expected `a b: …` in {line:?}")))?;
        let mut labels = head.split_whitespace();
        let a_label = labels
            .next()
            .ok_or_else(|| PresError::Fixture("missing A label".into()))?;
        let b_label = labels
            .next()
            .ok_or_else(|| PresError::Fixture("missing B label".into()))?;
        if labels.next().is_some() {
            return Err(PresError::Fixture(format!("too many labels in {line:?}")));
        }
        let a_idx = data
            .a_index(a_label)
            .ok_or_else(|| PresError::UnknownLabel(a_label.to_string()))?;
        let b_idx = data
            .b_index(b_label)
            .ok_or_else(|| PresError::UnknownLabel(b_label.to_string()))?;
        let elt = RingElt::parse(data.group(), body.trim())?;
        let ints = elt
            .integer_coeffs()
            .ok_or_else(|| PresError::NonIntegralComponent {
                a: a_label.to_string(),
                b: b_label.to_string(),
            })?;
        for (g_idx, c) in ints.into_iter().enumerate() {
            v[basis.index(g_idx, a_idx, b_idx)] += c;
        }
    }
    Ok(v)
}

fn check_rank_and_group(group: &FinAbGroup, rs: &[RingElt]) -> Result<(), PresError> {
    if rs.len() != group.rank() {
        return Err(PresError::Precondition(format!(
            "expected one element per factor ({}), got {}",
            group.rank(),
            rs.len()
        )));
    }
    if rs.iter().any(|r| r.group() != group) {
        return Err(PresError::Precondition(
            "all elements must live over the given group".into(),
        ));
    }
    Ok(())
}

fn check_pairwise(group: &FinAbGroup, rs: &[RingElt]) -> Result<(), PresError> {
    for i in 0..rs.len() {
        for j in i + 1..rs.len() {
            let cross = rs[i]
                .mul_one_minus(&group.generator(j))
                .sub(&rs[j].mul_one_minus(&group.generator(i)));
            if !cross.is_integral() {
                return Err(PresError::Precondition(format!(
                    "r{}(e-p{}) - r{}(e-p{}) is not integral",
                    i + 1,
                    j + 1,
                    j + 1,
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// Given `r_1,…,r_n ∈ Q[G]` with every `r_i·P_i` integral and every
/// `r_i(e-p_j) − r_j(e-p_i)` integral, finds `x ∈ Q[G]` with each
/// `r_i − x(e-p_i)` integral. Inducts on the number of factors; the base
/// case runs prefix sums of the coefficients along the powers of the
/// cyclic generator (including a fractional constant term).
pub fn integral_shift(group: &FinAbGroup, rs: &[RingElt]) -> Result<RingElt, PresError> {
    check_rank_and_group(group, rs)?;
    for (i, r) in rs.iter().enumerate() {
        if !r.mul(&RingElt::cyclic_sum(group, i)).is_integral() {
            return Err(PresError::Precondition(format!(
                "r{}·P{} is not integral",
                i + 1,
                i + 1
            )));
        }
    }
    check_pairwise(group, rs)?;
    let x = shift_rec(group, rs);
    debug_assert!(rs
        .iter()
        .enumerate()
        .all(|(i, r)| r.sub(&x.mul_one_minus(&group.generator(i))).is_integral()));
    Ok(x)
}

fn shift_rec(group: &FinAbGroup, rs: &[RingElt]) -> RingElt {
    let n = group.rank();
    if n == 0 {
        return RingElt::zero(group);
    }
    if n == 1 {
        // x = Σ_j (Σ_{k ≤ j} s_k) p^j; the wraparound term is integral
        // because the coefficients of r sum to an integer.
        let m = group.moduli()[0] as usize;
        let mut coeffs = Vec::with_capacity(m);
        let mut acc = BigRational::zero();
        for g_idx in 0..m {
            acc += &rs[0].coeffs()[g_idx];
            coeffs.push(acc.clone());
        }
        return RingElt::from_coeffs(group, coeffs);
    }
    let m0 = group.moduli()[0] as usize;
    let sub = FinAbGroup::new(group.moduli()[1..].to_vec()).expect("tail moduli are valid");
    let sub_order = sub.order() as usize;
    let grade = |r: &RingElt| -> Vec<RingElt> {
        // Split along powers of the first generator; slice k lives in Q[H].
        (0..m0)
            .map(|k| {
                let coeffs = (0..sub_order)
                    .map(|h_idx| {
                        let mut exps = vec![k as i64];
                        exps.extend(sub.elt_at(h_idx).exponents().iter().map(|&e| e as i64));
                        r.coeff(&group.elt(&exps)).clone()
                    })
                    .collect();
                RingElt::from_coeffs(&sub, coeffs)
            })
            .collect()
    };
    let lift = |slices: &[RingElt]| -> RingElt {
        let coeffs = (0..group.order() as usize)
            .map(|g_idx| {
                let g = group.elt_at(g_idx);
                let k = g.exponents()[0] as usize;
                let tail: Vec<i64> = g.exponents()[1..].iter().map(|&e| e as i64).collect();
                slices[k].coeff(&sub.elt(&tail)).clone()
            })
            .collect();
        RingElt::from_coeffs(group, coeffs)
    };
    // Solve the tail factors gradewise by induction.
    let graded: Vec<Vec<RingElt>> = rs[1..].iter().map(&grade).collect();
    let y_slices: Vec<RingElt> = (0..m0)
        .map(|k| {
            let layer: Vec<RingElt> = graded.iter().map(|slices| slices[k].clone()).collect();
            shift_rec(&sub, &layer)
        })
        .collect();
    let y = lift(&y_slices);
    for (i, r) in rs.iter().enumerate().skip(1) {
        debug_assert!(r
            .sub(&y.mul_one_minus(&group.generator(i)))
            .is_integral());
    }
    // The residual first component is congruent to s·Q_1 with s supported
    // on powers of p_1; pull out s and finish with the cyclic base case.
    let p0 = group.generator(0);
    let r0_res = rs[0].sub(&y.mul_one_minus(&p0));
    let res_slices = grade(&r0_res);
    let s_coeffs: Vec<BigRational> = res_slices
        .iter()
        .map(|u| u.coeff(&sub.identity()).clone())
        .collect();
    let g1 = FinAbGroup::new(vec![group.moduli()[0]]).expect("single modulus is valid");
    let s1 = RingElt::from_coeffs(&g1, s_coeffs.clone());
    let q0 = RingElt::complementary_sum(group, 0);
    let s_in_g = {
        let mut coeffs = vec![BigRational::zero(); group.order() as usize];
        for (k, c) in s_coeffs.iter().enumerate() {
            let mut exps = vec![k as i64];
            exps.extend(std::iter::repeat_n(0, n - 1));
            coeffs[group.index_of(&group.elt(&exps))] = c.clone();
        }
        RingElt::from_coeffs(group, coeffs)
    };
    assert!(
        r0_res.sub(&s_in_g.mul(&q0)).is_integral(),
        "residual must be congruent to s·Q_1 modulo integral elements"
    );
    assert!(
        s1.augmentation().is_integer(),
        "coefficients of s must sum to an integer"
    );
    let z1 = shift_rec(&g1, std::slice::from_ref(&s1));
    let z_in_g = {
        let mut coeffs = vec![BigRational::zero(); group.order() as usize];
        for (k, c) in z1.coeffs().iter().enumerate() {
            let mut exps = vec![k as i64];
            exps.extend(std::iter::repeat_n(0, n - 1));
            coeffs[group.index_of(&group.elt(&exps))] = c.clone();
        }
        RingElt::from_coeffs(group, coeffs)
    };
    y.add(&z_in_g.mul(&q0))
}

/// Given `r_1,…,r_n ∈ Q[G]` with every `r_i(e-p_j) − r_j(e-p_i)` integral,
/// finds integral `u_1,…,u_n` with `(r_i-u_i)(e-p_j) = (r_j-u_j)(e-p_i)`
/// exactly for all `i, j`: peel off the `t_i·Q_i` obstruction, then shift
/// by a common `x` from [`integral_shift`].
pub fn integral_adjustment(
    group: &FinAbGroup,
    rs: &[RingElt],
) -> Result<Vec<RingElt>, PresError> {
    check_rank_and_group(group, rs)?;
    check_pairwise(group, rs)?;
    let n_elt = RingElt::full_sum(group);
    let mut shifted = Vec::with_capacity(rs.len());
    for (i, r) in rs.iter().enumerate() {
        let v = r.mul(&RingElt::cyclic_sum(group, i));
        let t = v.coeff(&group.identity()).clone();
        assert!(
            v.sub(&n_elt.scale(&t)).is_integral(),
            "r_i·P_i must be constant modulo integral elements"
        );
        shifted.push(r.sub(&RingElt::complementary_sum(group, i).scale(&t)));
    }
    let x = integral_shift(group, &shifted)
        .expect("the peeled family always satisfies the shift preconditions");
    let us: Vec<RingElt> = shifted
        .iter()
        .enumerate()
        .map(|(i, s)| s.sub(&x.mul_one_minus(&group.generator(i))))
        .collect();
    for u in &us {
        assert!(u.is_integral(), "adjustment outputs must be integral");
    }
    Ok(us)
}
