//! Seeded random generation of groups, ring elements, cocycle data and
//! diagrams. Everything is driven by a ChaCha stream cipher, so a fixed
//! seed reproduces the same objects on any platform.

use crate::abelian::{canonical_invariant_factors, FinAbGroup, GroupElt};
use crate::bv::OrderedBvDiagram;
use crate::group_ring::RingElt;
use crate::presentation::{CocycleData, Presentation};
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub struct Sampler {
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn range(&mut self, lo: i64, hi: i64) -> i64 {
        self.rng.random_range(lo..=hi)
    }

    pub fn usize_range(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn elt(&mut self, group: &FinAbGroup) -> GroupElt {
        let exps: Vec<i64> = group
            .moduli()
            .iter()
            .map(|&m| self.rng.random_range(0..m as i64))
            .collect();
        group.elt(&exps)
    }

    pub fn rational(&mut self, max_abs_num: i64, max_den: i64) -> BigRational {
        let num = self.range(-max_abs_num, max_abs_num);
        let den = self.range(1, max_den);
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }

    /// Dense ring element with integer coefficients in `[-max_abs, max_abs]`.
    pub fn ring_elt_integral(&mut self, group: &FinAbGroup, max_abs: i64) -> RingElt {
        let coeffs = (0..group.order())
            .map(|_| BigRational::from_integer(BigInt::from(self.range(-max_abs, max_abs))))
            .collect();
        RingElt::from_coeffs(group, coeffs)
    }

    pub fn ring_elt_rational(
        &mut self,
        group: &FinAbGroup,
        max_abs_num: i64,
        max_den: i64,
    ) -> RingElt {
        let coeffs = (0..group.order())
            .map(|_| self.rational(max_abs_num, max_den))
            .collect();
        RingElt::from_coeffs(group, coeffs)
    }

    /// A list of `count ≤ max_count` elements whose set generates the
    /// group, drawn by rejection. `count` never falls below the number of
    /// invariant factors of the group, so a generating draw always exists.
    pub fn generating_values(&mut self, group: &FinAbGroup, max_count: usize) -> Vec<GroupElt> {
        let min = canonical_invariant_factors(group.moduli()).len().max(1);
        let max = max_count.max(min);
        for _ in 0..100_000 {
            let count = self.usize_range(min, max);
            let values: Vec<GroupElt> = (0..count).map(|_| self.elt(group)).collect();
            if group.generates(&values) {
                return values;
            }
        }
        panic!("failed to draw a generating set for {group:?}");
    }

    /// Random `(A, B, μ)` with generating images and side sizes bounded by
    /// `max_side`.
    pub fn cocycle_data(&mut self, group: &FinAbGroup, max_side: usize) -> CocycleData {
        let a = self
            .generating_values(group, max_side)
            .into_iter()
            .enumerate()
            .map(|(i, v)| (format!("a{}", i + 1), v))
            .collect();
        let b = self
            .generating_values(group, max_side)
            .into_iter()
            .enumerate()
            .map(|(i, v)| (format!("b{}", i + 1), v))
            .collect();
        CocycleData::new(group.clone(), a, b).expect("generating draws build valid data")
    }

    /// Random integer combination of relation rows: an element of the
    /// relation lattice, hence a trivial class.
    pub fn relation_combo(&mut self, pres: &Presentation, max_coeff: i64) -> Vec<BigInt> {
        let rows = pres.relation_rows();
        let mut out = vec![BigInt::zero(); pres.dim()];
        for r in 0..rows.rows() {
            let c = self.range(-max_coeff, max_coeff);
            if c == 0 {
                continue;
            }
            let c = BigInt::from(c);
            for (slot, entry) in out.iter_mut().zip(rows.row(r)) {
                *slot += entry * &c;
            }
        }
        out
    }

    /// Random valid diagram: tower counts in `1..=max_towers`, level-1
    /// heights in `1..=max_cells`, traversal lengths in
    /// `min_segments..=max_segments` (padded so every tower is used).
    pub fn diagram(
        &mut self,
        group: &FinAbGroup,
        levels: usize,
        max_towers: usize,
        max_cells: usize,
        min_segments: usize,
        max_segments: usize,
    ) -> OrderedBvDiagram {
        assert!(levels >= 1);
        assert!(1 <= min_segments && min_segments <= max_segments);
        let counts: Vec<usize> = (0..levels)
            .map(|_| self.usize_range(1, max_towers))
            .collect();
        let names = |count: usize| -> Vec<String> {
            (0..count).map(|t| format!("t{t}")).collect()
        };
        let level1: Vec<(String, Vec<GroupElt>)> = names(counts[0])
            .into_iter()
            .map(|name| {
                let height = self.usize_range(1, max_cells);
                let cells = (0..height).map(|_| self.elt(group)).collect();
                (name, cells)
            })
            .collect();
        let mut upper = Vec::with_capacity(levels - 1);
        for li in 1..levels {
            let prev = names(counts[li - 1]);
            let mut towers: Vec<(String, Vec<String>)> = names(counts[li])
                .into_iter()
                .map(|name| {
                    let len = self.usize_range(min_segments, max_segments);
                    let traversal = (0..len)
                        .map(|_| prev[self.usize_range(0, prev.len() - 1)].clone())
                        .collect();
                    (name, traversal)
                })
                .collect();
            // Every lower tower must appear somewhere above.
            for p in &prev {
                if !towers.iter().any(|(_, trav)| trav.contains(p)) {
                    let target = self.usize_range(0, towers.len() - 1);
                    towers[target].1.push(p.clone());
                }
            }
            upper.push(towers);
        }
        OrderedBvDiagram::new(group.clone(), level1, upper)
            .expect("sampled diagrams satisfy the structural invariants")
    }

    /// Random diagram that stays non-degenerate through `levels`, drawn by
    /// rejection.
    pub fn nondegenerate_diagram(
        &mut self,
        group: &FinAbGroup,
        levels: usize,
        max_towers: usize,
        max_cells: usize,
        min_segments: usize,
        max_segments: usize,
    ) -> OrderedBvDiagram {
        for _ in 0..100_000 {
            let d = self.diagram(group, levels, max_towers, max_cells, min_segments, max_segments);
            if d.nondegenerate_through(levels) {
                return d;
            }
        }
        panic!("failed to draw a non-degenerate diagram over {group:?}");
    }
}
