//! Transfer homomorphisms between presentations of the same group.
//!
//! Given stages `(A,B,μ)` and `(C,D,ν)` over one group, coefficients
//! `s(a,c)`, `t(b,d) ∈ Z[G]` with `Σ_a (e-μ(a))s(a,c) = e-ν(c)` and
//! `Σ_b (e-μ(b))t(b,d) = e-ν(d)` define a module map
//! `r ⊗ a ⊗ b ↦ Σ_{c,d} r·s(a,c)·t(b,d) ⊗ c ⊗ d` carrying relations into
//! relations. On torsion it induces an isomorphism, which
//! [`induced_torsion_iso_check`] verifies computationally.

use crate::group_ring::{self, RingElt, RingError};
use crate::linalg::{self, IntMatrix};
use crate::presentation::{PresError, Presentation};
use num_bigint::BigInt;
use num_traits::Zero;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransferError {
    #[error("source and target live over different groups")]
    GroupMismatch,
    #[error("coefficient table has wrong shape")]
    TableShape,
    #[error("coefficient {side}({idx}) is not integral")]
    NonIntegralCoefficient { side: char, idx: usize },
    #[error("defining identity fails for target label {label:?}")]
    IdentityViolated { label: String },
    #[error("image of relation row {row} is not in the target relation span")]
    ContainmentViolated { row: usize },
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Pres(#[from] PresError),
}

/// An integral module map between two presentations of the same group that
/// carries the source relation lattice into the target one. Rows of
/// `matrix` are images of source basis vectors; vectors map by
/// right-multiplication.
#[derive(Clone, Debug)]
pub struct TransferMap<'a> {
    source: &'a Presentation,
    target: &'a Presentation,
    matrix: IntMatrix,
}

impl<'a> TransferMap<'a> {
    pub fn source(&self) -> &'a Presentation {
        self.source
    }

    pub fn target(&self) -> &'a Presentation {
        self.target
    }

    pub fn matrix(&self) -> &IntMatrix {
        &self.matrix
    }

    /// Image of a source module vector.
    pub fn apply(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(v.len(), self.source.dim(), "vector length mismatch");
        self.matrix.mul_row_vec(v)
    }
}

/// Builds the transfer map with coboundary coefficients found by word
/// telescoping. With source = target on standard data the words are single
/// letters and the map is the identity matrix.
pub fn build_transfer<'a>(
    source: &'a Presentation,
    target: &'a Presentation,
) -> Result<TransferMap<'a>, TransferError> {
    if source.group() != target.group() {
        return Err(TransferError::GroupMismatch);
    }
    let group = source.group();
    let src = source.data();
    let tgt = target.data();
    let a_values = src.a_values();
    let b_values = src.b_values();
    // s_table[a][c] and t_table[b][d].
    let mut s_table = vec![Vec::new(); src.a_len()];
    for c in 0..tgt.a_len() {
        let sols = group_ring::solve_coboundary(group, &a_values, tgt.a_value(c))?;
        for (a, sol) in sols.into_iter().enumerate() {
            s_table[a].push(sol);
        }
    }
    let mut t_table = vec![Vec::new(); src.b_len()];
    for d in 0..tgt.b_len() {
        let sols = group_ring::solve_coboundary(group, &b_values, tgt.b_value(d))?;
        for (b, sol) in sols.into_iter().enumerate() {
            t_table[b].push(sol);
        }
    }
    transfer_from_tables(source, target, &s_table, &t_table)
}

/// Builds a transfer map from explicit coefficient tables
/// (`s_table[a][c]`, `t_table[b][d]`), verifying the defining identities
/// and relation containment exactly.
pub fn transfer_from_tables<'a>(
    source: &'a Presentation,
    target: &'a Presentation,
    s_table: &[Vec<RingElt>],
    t_table: &[Vec<RingElt>],
) -> Result<TransferMap<'a>, TransferError> {
    if source.group() != target.group() {
        return Err(TransferError::GroupMismatch);
    }
    let group = source.group();
    let src = source.data();
    let tgt = target.data();
    if s_table.len() != src.a_len()
        || s_table.iter().any(|row| row.len() != tgt.a_len())
        || t_table.len() != src.b_len()
        || t_table.iter().any(|row| row.len() != tgt.b_len())
    {
        return Err(TransferError::TableShape);
    }
    for (side, table) in [('s', s_table), ('t', t_table)] {
        for (idx, elt) in table.iter().flatten().enumerate() {
            if !elt.is_integral() {
                return Err(TransferError::NonIntegralCoefficient { side, idx });
            }
        }
    }
    // Σ_a (e - μ(a)) s(a,c) = e - ν(c), and the same on the other side.
    for c in 0..tgt.a_len() {
        let mut acc = RingElt::zero(group);
        for a in 0..src.a_len() {
            acc = acc.add(&s_table[a][c].mul_one_minus(src.a_value(a)));
        }
        if acc != RingElt::one_minus(group, tgt.a_value(c)) {
            return Err(TransferError::IdentityViolated {
                label: tgt.a_label(c).to_string(),
            });
        }
    }
    for d in 0..tgt.b_len() {
        let mut acc = RingElt::zero(group);
        for b in 0..src.b_len() {
            acc = acc.add(&t_table[b][d].mul_one_minus(src.b_value(b)));
        }
        if acc != RingElt::one_minus(group, tgt.b_value(d)) {
            return Err(TransferError::IdentityViolated {
                label: tgt.b_label(d).to_string(),
            });
        }
    }
    // Assemble: row (g,a,b) gets g·s(a,c)·t(b,d) scattered over (·,c,d).
    let order = group.order() as usize;
    let mut matrix = IntMatrix::zeros(source.dim(), target.dim());
    for a in 0..src.a_len() {
        for b in 0..src.b_len() {
            for c in 0..tgt.a_len() {
                for d in 0..tgt.b_len() {
                    let prod = s_table[a][c].mul(&t_table[b][d]);
                    let terms: Vec<(usize, BigInt)> = prod
                        .terms()
                        .into_iter()
                        .map(|(h, coeff)| (group.index_of(&h), coeff.to_integer()))
                        .collect();
                    if terms.is_empty() {
                        continue;
                    }
                    for g_idx in 0..order {
                        let g = group.elt_at(g_idx);
                        let row = source.basis().index(g_idx, a, b);
                        for (h_idx, coeff) in &terms {
                            let gh = group.index_of(&group.mul(&g, &group.elt_at(*h_idx)));
                            let col = target.basis().index(gh, c, d);
                            *matrix.at_mut(row, col) += coeff;
                        }
                    }
                }
            }
        }
    }
    let map = TransferMap {
        source,
        target,
        matrix,
    };
    // Relations must land in the target relation lattice.
    for row_idx in 0..source.relation_rows().rows() {
        let image = map.apply(source.relation_rows().row(row_idx));
        if !target.snf().in_span_z(&image) {
            return Err(TransferError::ContainmentViolated { row: row_idx });
        }
    }
    Ok(map)
}

/// Outcome of checking that a transfer map induces an isomorphism between
/// the torsion subgroups of source and target.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorsionIsoReport {
    pub is_iso: bool,
    pub source_factors: Vec<BigInt>,
    pub target_factors: Vec<BigInt>,
}

/// Expresses the induced map on torsion in Smith-basis coordinates of both
/// sides and decides bijectivity: the factor chains must agree and the
/// image classes together with the target relations must span the whole
/// torsion group.
pub fn induced_torsion_iso_check(map: &TransferMap<'_>) -> TorsionIsoReport {
    let s_snf = map.source().snf();
    let t_snf = map.target().snf();
    let source_factors = s_snf.torsion_factors();
    let target_factors = t_snf.torsion_factors();
    let mut all_torsion = true;
    let mut image_rows: Vec<Vec<BigInt>> = Vec::new();
    for gen in s_snf.torsion_basis() {
        match t_snf.torsion_class_coords(&map.apply(&gen)) {
            Some(coords) => image_rows.push(coords),
            None => {
                all_torsion = false;
                break;
            }
        }
    }
    let surjective = all_torsion && {
        let ambient = target_factors.len();
        let mut rows = image_rows;
        for (j, d) in target_factors.iter().enumerate() {
            let mut row = vec![BigInt::zero(); ambient];
            row[j] = d.clone();
            rows.push(row);
        }
        match linalg::cokernel_invariants(&rows, ambient) {
            Ok(inv) => inv.free_rank == 0 && inv.torsion_factors.is_empty(),
            Err(_) => false,
        }
    };
    // Finite groups of equal order: surjective implies bijective.
    let is_iso = all_torsion && source_factors == target_factors && surjective;
    TorsionIsoReport {
        is_iso,
        source_factors,
        target_factors,
    }
}
