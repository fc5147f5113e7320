//! Exact computation of coinvariant torsion for skew product extensions of
//! products of Cantor minimal Z-systems by cocycles valued in a finite
//! abelian group `G`.
//!
//! The torsion of such a system's coinvariant group depends only on `G`: it
//! is the wedge square `G ∧ G`, the direct sum of `Z_gcd(m_i, m_j)` over all
//! pairs of cyclic factors. This crate builds the finite presentations that
//! realize the coinvariants, computes their torsion exactly via Smith normal
//! form, and verifies the wedge-square answer both on abstract presentations
//! and on stage approximations read off ordered Bratteli–Vershik diagrams.
//!
//! All arithmetic is exact: arbitrary-precision integers and rationals
//! throughout, no floating point anywhere.

#![allow(clippy::needless_range_loop)]

pub mod abelian;
pub mod bv;
pub mod generators;
pub mod group_ring;
pub mod linalg;
pub mod morphism;
pub mod presentation;
pub mod sampling;
