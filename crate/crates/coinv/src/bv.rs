//! Ordered Bratteli–Vershik diagrams with per-cell cocycle labels.
//!
//! A diagram is a stack of levels: level 1 towers carry an ordered list of
//! cocycle values in `G`, one per cell; each higher tower carries an ordered
//! traversal of the towers one level down. Heights, incidence matrices, the
//! tower products `ξ̃(v)` with their partial products, non-degeneracy, the
//! connection coefficients `s(v,v')` and the stage presentations
//! `N(V_n, W_n)` of a skew product are all derived from this finite data;
//! the clopen sets themselves never materialize.
//!
//! The file format is JSON:
//!
//! ```json
//! {
//!   "group": [2, 2],
//!   "levels": [
//!     [ {"name": "a", "cells": [[1,0]]}, {"name": "b", "cells": [[0,1]]} ],
//!     [ {"name": "a", "traversal": ["a", "b"]}, {"name": "b", "traversal": ["a"]} ]
//!   ]
//! }
//! ```

use crate::abelian::{FinAbGroup, GroupElt, GroupError};
use crate::group_ring::RingElt;
use crate::linalg::IntMatrix;
use crate::morphism::{self, TorsionIsoReport, TransferMap};
use crate::presentation::{CocycleData, PresError, Presentation};
use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DiagramError {
    #[error("cannot parse diagram: {0}")]
    Parse(String),
    #[error("diagram has no levels")]
    NoLevels,
    #[error("level {level} has no towers")]
    EmptyLevel { level: usize },
    #[error("duplicate tower name {name:?} at level {level}")]
    DuplicateName { level: usize, name: String },
    #[error("tower {name:?} at level 1 must carry cells")]
    Level1NeedsCells { name: String },
    #[error("tower {name:?} at level {level} must carry a traversal")]
    UpperNeedsTraversal { level: usize, name: String },
    #[error("tower {name:?} has no cells")]
    EmptyCells { name: String },
    #[error("tower {name:?} at level {level} has an empty traversal")]
    EmptyTraversal { level: usize, name: String },
    #[error("tower {name:?} at level {level} references unknown tower {referenced:?}")]
    DanglingReference {
        level: usize,
        name: String,
        referenced: String,
    },
    #[error("tower {name:?} at level {level} is not used by any traversal above")]
    UnusedTower { level: usize, name: String },
    #[error("cell label has {found} exponents, expected {expected}")]
    CellExponents { found: usize, expected: usize },
    #[error("level {level} out of range (diagram has {available})")]
    LevelOutOfRange { level: usize, available: usize },
    #[error("the diagrams live over different groups")]
    GroupMismatch,
    #[error("cocycle is degenerate at level {level}: tower products do not generate the group")]
    Degenerate { level: usize },
    #[error("transfer construction failed: {0}")]
    Transfer(String),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error(transparent)]
    Pres(#[from] PresError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct CellTower {
    name: String,
    cells: Vec<GroupElt>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
struct PathTower {
    name: String,
    traversal: Vec<usize>,
}

/// A validated ordered Bratteli–Vershik diagram. Levels are 1-based in the
/// public API; cocycle labels live only at level 1 and everything higher is
/// derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderedBvDiagram {
    group: FinAbGroup,
    level1: Vec<CellTower>,
    upper: Vec<Vec<PathTower>>,
    heights: Vec<Vec<u64>>,
}

/// Tower products at one level: the full product `ξ̃(v)` and the partial
/// product before each cell (level 1) or each traversal segment (higher
/// levels). The first partial is always the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TowerProducts {
    pub full: GroupElt,
    pub partials: Vec<GroupElt>,
}

/// `ξ̃` data for every tower of every level.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CocycleProducts {
    pub levels: Vec<Vec<TowerProducts>>,
}

#[derive(Serialize, Deserialize)]
struct RawTower {
    name: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    cells: Option<Vec<Vec<i64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    traversal: Option<Vec<String>>,
}

#[derive(Serialize, Deserialize)]
struct RawDiagram {
    group: Vec<u64>,
    levels: Vec<Vec<RawTower>>,
}

impl OrderedBvDiagram {
    /// Validates and builds a diagram from its raw parts: level-1 towers as
    /// `(name, cells)` and each higher level as `(name, traversal names)`.
    pub fn new(
        group: FinAbGroup,
        level1: Vec<(String, Vec<GroupElt>)>,
        upper: Vec<Vec<(String, Vec<String>)>>,
    ) -> Result<Self, DiagramError> {
        if level1.is_empty() {
            return Err(DiagramError::EmptyLevel { level: 1 });
        }
        let mut towers1 = Vec::with_capacity(level1.len());
        for (name, cells) in level1 {
            if towers1.iter().any(|t: &CellTower| t.name == name) {
                return Err(DiagramError::DuplicateName {
                    level: 1,
                    name,
                });
            }
            if cells.is_empty() {
                return Err(DiagramError::EmptyCells { name });
            }
            for cell in &cells {
                if !group.contains(cell) {
                    return Err(DiagramError::CellExponents {
                        found: cell.exponents().len(),
                        expected: group.rank(),
                    });
                }
            }
            towers1.push(CellTower { name, cells });
        }
        let mut prev_names: Vec<String> = towers1.iter().map(|t| t.name.clone()).collect();
        let mut upper_levels = Vec::with_capacity(upper.len());
        for (li, level) in upper.into_iter().enumerate() {
            let level_no = li + 2;
            if level.is_empty() {
                return Err(DiagramError::EmptyLevel { level: level_no });
            }
            let mut towers = Vec::with_capacity(level.len());
            let mut used = vec![false; prev_names.len()];
            for (name, traversal) in level {
                if towers.iter().any(|t: &PathTower| t.name == name) {
                    return Err(DiagramError::DuplicateName {
                        level: level_no,
                        name,
                    });
                }
                if traversal.is_empty() {
                    return Err(DiagramError::EmptyTraversal {
                        level: level_no,
                        name,
                    });
                }
                let mut resolved = Vec::with_capacity(traversal.len());
                for referenced in traversal {
                    match prev_names.iter().position(|p| *p == referenced) {
                        Some(idx) => {
                            used[idx] = true;
                            resolved.push(idx);
                        }
                        None => {
                            return Err(DiagramError::DanglingReference {
                                level: level_no,
                                name,
                                referenced,
                            })
                        }
                    }
                }
                towers.push(PathTower {
                    name,
                    traversal: resolved,
                });
            }
            if let Some(idx) = used.iter().position(|u| !u) {
                return Err(DiagramError::UnusedTower {
                    level: level_no - 1,
                    name: prev_names[idx].clone(),
                });
            }
            prev_names = towers.iter().map(|t| t.name.clone()).collect();
            upper_levels.push(towers);
        }
        let mut heights: Vec<Vec<u64>> = Vec::with_capacity(1 + upper_levels.len());
        heights.push(towers1.iter().map(|t| t.cells.len() as u64).collect());
        for level in &upper_levels {
            let prev = heights.last().expect("level 1 height is present");
            heights.push(
                level
                    .iter()
                    .map(|t| t.traversal.iter().map(|&i| prev[i]).sum())
                    .collect(),
            );
        }
        Ok(OrderedBvDiagram {
            group,
            level1: towers1,
            upper: upper_levels,
            heights,
        })
    }

    pub fn from_json_str(text: &str) -> Result<Self, DiagramError> {
        let raw: RawDiagram =
            serde_json::from_str(text).map_err(|e| DiagramError::Parse(e.to_string()))?;
        let group = FinAbGroup::new(raw.group)?;
        let mut levels = raw.levels.into_iter();
        let first = levels.next().ok_or(DiagramError::NoLevels)?;
        let mut level1 = Vec::with_capacity(first.len());
        for tower in first {
            let cells = tower
                .cells
                .ok_or_else(|| DiagramError::Level1NeedsCells {
                    name: tower.name.clone(),
                })?;
            let mut parsed = Vec::with_capacity(cells.len());
            for exps in cells {
                if exps.len() != group.rank() {
                    return Err(DiagramError::CellExponents {
                        found: exps.len(),
                        expected: group.rank(),
                    });
                }
                parsed.push(group.elt(&exps));
            }
            level1.push((tower.name, parsed));
        }
        let mut upper = Vec::new();
        for (li, level) in levels.enumerate() {
            let mut towers = Vec::with_capacity(level.len());
            for tower in level {
                let traversal =
                    tower
                        .traversal
                        .ok_or_else(|| DiagramError::UpperNeedsTraversal {
                            level: li + 2,
                            name: tower.name.clone(),
                        })?;
                towers.push((tower.name, traversal));
            }
            upper.push(towers);
        }
        Self::new(group, level1, upper)
    }

    pub fn to_json_string(&self) -> String {
        let mut levels = Vec::with_capacity(self.num_levels());
        levels.push(
            self.level1
                .iter()
                .map(|t| RawTower {
                    name: t.name.clone(),
                    cells: Some(
                        t.cells
                            .iter()
                            .map(|c| c.exponents().iter().map(|&e| e as i64).collect())
                            .collect(),
                    ),
                    traversal: None,
                })
                .collect(),
        );
        for (li, level) in self.upper.iter().enumerate() {
            let prev_names = self.tower_names(li + 1);
            levels.push(
                level
                    .iter()
                    .map(|t| RawTower {
                        name: t.name.clone(),
                        cells: None,
                        traversal: Some(
                            t.traversal
                                .iter()
                                .map(|&i| prev_names[i].to_string())
                                .collect(),
                        ),
                    })
                    .collect(),
            );
        }
        let raw = RawDiagram {
            group: self.group.moduli().to_vec(),
            levels,
        };
        serde_json::to_string_pretty(&raw).expect("diagram serialization cannot fail")
    }

    pub fn group(&self) -> &FinAbGroup {
        &self.group
    }

    pub fn num_levels(&self) -> usize {
        1 + self.upper.len()
    }

    pub fn num_towers(&self, level: usize) -> usize {
        self.check_level(level);
        if level == 1 {
            self.level1.len()
        } else {
            self.upper[level - 2].len()
        }
    }

    fn check_level(&self, level: usize) {
        assert!(
            level >= 1 && level <= self.num_levels(),
            "level {level} out of range"
        );
    }

    pub fn tower_names(&self, level: usize) -> Vec<&str> {
        self.check_level(level);
        if level == 1 {
            self.level1.iter().map(|t| t.name.as_str()).collect()
        } else {
            self.upper[level - 2]
                .iter()
                .map(|t| t.name.as_str())
                .collect()
        }
    }

    pub fn heights(&self, level: usize) -> &[u64] {
        self.check_level(level);
        &self.heights[level - 1]
    }

    pub fn cells(&self, tower: usize) -> &[GroupElt] {
        &self.level1[tower].cells
    }

    pub fn traversal(&self, level: usize, tower: usize) -> &[usize] {
        self.check_level(level);
        assert!(level >= 2, "level 1 towers carry cells, not traversals");
        &self.upper[level - 2][tower].traversal
    }

    /// Incidence matrix between `level` and `level + 1`:
    /// `A(v, v') = #{occurrences of v in the traversal of v'}`.
    /// Heights satisfy `h_{n+1} = Aᵀ · h_n`.
    pub fn incidence(&self, level: usize) -> IntMatrix {
        self.check_level(level);
        self.check_level(level + 1);
        let rows = self.num_towers(level);
        let next = &self.upper[level - 1];
        let mut m = IntMatrix::zeros(rows, next.len());
        for (vp, tower) in next.iter().enumerate() {
            for &v in &tower.traversal {
                *m.at_mut(v, vp) += 1;
            }
        }
        m
    }

    /// Tower products `ξ̃` with partial products at every level.
    pub fn cocycle_products(&self) -> CocycleProducts {
        let mut levels = Vec::with_capacity(self.num_levels());
        let mut first = Vec::with_capacity(self.level1.len());
        for tower in &self.level1 {
            let mut partials = Vec::with_capacity(tower.cells.len());
            let mut running = self.group.identity();
            for cell in &tower.cells {
                partials.push(running.clone());
                running = self.group.mul(&running, cell);
            }
            first.push(TowerProducts {
                full: running,
                partials,
            });
        }
        levels.push(first);
        for upper in &self.upper {
            let prev: &Vec<TowerProducts> = levels.last().expect("previous level exists");
            let mut here = Vec::with_capacity(upper.len());
            for tower in upper {
                let mut partials = Vec::with_capacity(tower.traversal.len());
                let mut running = self.group.identity();
                for &seg in &tower.traversal {
                    partials.push(running.clone());
                    running = self.group.mul(&running, &prev[seg].full);
                }
                here.push(TowerProducts {
                    full: running,
                    partials,
                });
            }
            levels.push(here);
        }
        CocycleProducts { levels }
    }

    /// Per-level non-degeneracy: do the tower products generate the group?
    pub fn nondegenerate_levels(&self) -> Vec<bool> {
        let products = self.cocycle_products();
        products
            .levels
            .iter()
            .map(|level| {
                let values: Vec<GroupElt> = level.iter().map(|t| t.full.clone()).collect();
                self.group.generates(&values)
            })
            .collect()
    }

    pub fn nondegenerate_through(&self, max_level: usize) -> bool {
        self.nondegenerate_levels()
            .iter()
            .take(max_level)
            .all(|&ok| ok)
    }

    /// Connection coefficients `s(v, v') ∈ Z[G]` between `level` and
    /// `level + 1`, indexed `[v][v']`: walking the traversal of `v'` with a
    /// running product `c`, each segment occupied by `v` contributes
    /// `c^{-1}`. The telescoping identity
    /// `Σ_v (e − ξ̃(v)^{-1}) s(v,v') = e − ξ̃(v')^{-1}` is asserted for
    /// every `v'`.
    pub fn connection_coefficients(
        &self,
        level: usize,
    ) -> Result<Vec<Vec<RingElt>>, DiagramError> {
        if level < 1 || level + 1 > self.num_levels() {
            return Err(DiagramError::LevelOutOfRange {
                level,
                available: self.num_levels(),
            });
        }
        let products = self.cocycle_products();
        let prev = &products.levels[level - 1];
        let here = &products.levels[level];
        let next = &self.upper[level - 1];
        let mut table =
            vec![vec![RingElt::zero(&self.group); next.len()]; prev.len()];
        for (vp, tower) in next.iter().enumerate() {
            for (seg, &v) in tower.traversal.iter().enumerate() {
                let partial_inv = self.group.inv(&here[vp].partials[seg]);
                table[v][vp] =
                    table[v][vp].add(&RingElt::monomial(&self.group, &partial_inv));
            }
        }
        // Telescoping identity check.
        for vp in 0..next.len() {
            let mut sum = RingElt::zero(&self.group);
            for (v, row) in table.iter().enumerate() {
                let xi_inv = self.group.inv(&prev[v].full);
                sum = sum.add(&row[vp].sub(&row[vp].mul_elt(&xi_inv)));
            }
            let expected =
                RingElt::one_minus(&self.group, &self.group.inv(&here[vp].full));
            assert_eq!(
                sum, expected,
                "connection identity violated at level {level}, tower {vp}"
            );
        }
        Ok(table)
    }

    /// Stage ranks `|V_n|` and the incidence matrices connecting them: the
    /// free-abelian stage data of the underlying Z-system's coinvariants.
    pub fn stage_ranks(&self) -> Vec<(usize, Option<IntMatrix>)> {
        (1..=self.num_levels())
            .map(|level| {
                let rank = self.num_towers(level);
                let matrix = (level < self.num_levels()).then(|| self.incidence(level));
                (rank, matrix)
            })
            .collect()
    }
}

/// The stage data `N(V_n, W_n)` of the skew product of two diagrams:
/// `A = V_n`, `B = W_n`, `μ(v) = ξ̃(v)^{-1}`, `μ(w) = η̃(w)^{-1}`.
/// Requires both cocycles non-degenerate at that level.
pub fn skew_stage(
    dx: &OrderedBvDiagram,
    dy: &OrderedBvDiagram,
    level: usize,
) -> Result<CocycleData, DiagramError> {
    if dx.group != dy.group {
        return Err(DiagramError::GroupMismatch);
    }
    for d in [dx, dy] {
        if level < 1 || level > d.num_levels() {
            return Err(DiagramError::LevelOutOfRange {
                level,
                available: d.num_levels(),
            });
        }
    }
    for d in [dx, dy] {
        if !d.nondegenerate_levels()[level - 1] {
            return Err(DiagramError::Degenerate { level });
        }
    }
    let side = |d: &OrderedBvDiagram| -> Vec<(String, GroupElt)> {
        let products = d.cocycle_products();
        d.tower_names(level)
            .into_iter()
            .zip(&products.levels[level - 1])
            .map(|(name, p)| (name.to_string(), d.group.inv(&p.full)))
            .collect()
    };
    Ok(CocycleData::new(dx.group.clone(), side(dx), side(dy))?)
}

/// The connecting transfer map from stage `level` to stage `level + 1`,
/// assembled from the connection coefficients of both diagrams. The
/// presentations must be the ones built from [`skew_stage`] at those
/// levels.
pub fn skew_connecting_map<'a>(
    dx: &OrderedBvDiagram,
    dy: &OrderedBvDiagram,
    level: usize,
    source: &'a Presentation,
    target: &'a Presentation,
) -> Result<TransferMap<'a>, DiagramError> {
    let expected_source = skew_stage(dx, dy, level)?;
    let expected_target = skew_stage(dx, dy, level + 1)?;
    if *source.data() != expected_source || *target.data() != expected_target {
        return Err(DiagramError::Transfer(
            "presentations do not match the stage data at these levels".into(),
        ));
    }
    let s_table = dx.connection_coefficients(level)?;
    let t_table = dy.connection_coefficients(level)?;
    morphism::transfer_from_tables(source, target, &s_table, &t_table)
        .map_err(|e| DiagramError::Transfer(e.to_string()))
}

/// Torsion report for one stage of a skew product.
#[derive(Clone, Debug)]
pub struct StageReport {
    pub level: usize,
    pub free_rank: usize,
    pub torsion: Vec<BigInt>,
    pub matches_predicted: bool,
    /// Torsion-isomorphism verdict for the connecting map to the next
    /// stage; `None` on the last stage.
    pub iso_to_next: Option<bool>,
}

/// Stage-by-stage verification that the skew product's torsion is the
/// predicted wedge square at every level and that consecutive stages are
/// linked by torsion isomorphisms.
#[derive(Clone, Debug)]
pub struct StabilizationReport {
    pub predicted: Vec<u64>,
    pub stages: Vec<StageReport>,
}

impl StabilizationReport {
    pub fn all_match(&self) -> bool {
        self.stages
            .iter()
            .all(|s| s.matches_predicted && s.iso_to_next.unwrap_or(true))
    }
}

/// Runs stages `1..=max_level` of the skew product of two diagrams.
pub fn torsion_stabilization(
    dx: &OrderedBvDiagram,
    dy: &OrderedBvDiagram,
    max_level: usize,
) -> Result<StabilizationReport, DiagramError> {
    let predicted = dx.group.predicted_torsion();
    let mut presentations = Vec::with_capacity(max_level);
    for level in 1..=max_level {
        presentations.push(Presentation::build(skew_stage(dx, dy, level)?));
    }
    let mut isos: Vec<Option<bool>> = Vec::with_capacity(max_level);
    for level in 1..max_level {
        let map = skew_connecting_map(
            dx,
            dy,
            level,
            &presentations[level - 1],
            &presentations[level],
        )?;
        let report: TorsionIsoReport = morphism::induced_torsion_iso_check(&map);
        isos.push(Some(report.is_iso));
    }
    isos.push(None);
    let predicted_big: Vec<BigInt> = predicted.iter().map(|&d| BigInt::from(d)).collect();
    let stages = presentations
        .iter()
        .zip(isos)
        .enumerate()
        .map(|(idx, (pres, iso_to_next))| {
            let inv = pres.invariants();
            StageReport {
                level: idx + 1,
                free_rank: inv.free_rank,
                matches_predicted: inv.torsion_factors == predicted_big,
                torsion: inv.torsion_factors,
                iso_to_next,
            }
        })
        .collect();
    Ok(StabilizationReport { predicted, stages })
}
