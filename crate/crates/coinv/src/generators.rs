//! Built-in diagram generators: rotation (Sturmian-type) diagrams driven by
//! continued-fraction digits, and the octagonal pair over `Z_2 × Z_2`.

use crate::abelian::{FinAbGroup, GroupElt};
use crate::bv::{DiagramError, OrderedBvDiagram};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GeneratorError {
    #[error("continued-fraction digits must be ≥ 1")]
    ZeroDigit,
    #[error("need at least one level")]
    ZeroLevels,
    #[error("need {needed} digits for {levels} levels, got {got}")]
    NotEnoughDigits {
        needed: usize,
        levels: usize,
        got: usize,
    },
    #[error("expected exactly two level-1 cell labels, got {0}")]
    LabelCount(usize),
    #[error("label does not belong to the group")]
    ForeignLabel,
    #[error(transparent)]
    Diagram(#[from] DiagramError),
}

/// A circle rotation encoded by the partial quotients of its angle's
/// continued fraction, truncated to `levels` diagram levels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RotationSpec {
    pub cf_digits: Vec<u64>,
    pub levels: usize,
}

impl RotationSpec {
    pub fn new(cf_digits: Vec<u64>, levels: usize) -> Result<Self, GeneratorError> {
        if levels == 0 {
            return Err(GeneratorError::ZeroLevels);
        }
        if cf_digits.contains(&0) {
            return Err(GeneratorError::ZeroDigit);
        }
        if cf_digits.len() + 1 < levels {
            return Err(GeneratorError::NotEnoughDigits {
                needed: levels - 1,
                levels,
                got: cf_digits.len(),
            });
        }
        Ok(RotationSpec { cf_digits, levels })
    }
}

/// Two-tower diagram of the rotation with partial quotients `a_1, a_2, …`.
///
/// Level 1 has two one-cell towers `long` and `short` carrying the two
/// given labels. Splitting with digit `a` sends `long ↦ long^a · short`
/// and `short ↦ long`, except that the first split uses `long^{a_1 - 1} ·
/// short` so the convergent denominators come out on the nose: the `long`
/// heights at levels `1, 2, 3, …` are `q_0, q_1, q_2, …` with
/// `q_k = a_k·q_{k-1} + q_{k-2}`, and the `short` height always trails one
/// level behind.
pub fn rotation_diagram(
    spec: &RotationSpec,
    group: &FinAbGroup,
    labels: &[GroupElt],
) -> Result<OrderedBvDiagram, GeneratorError> {
    if labels.len() != 2 {
        return Err(GeneratorError::LabelCount(labels.len()));
    }
    if labels.iter().any(|l| !group.contains(l)) {
        return Err(GeneratorError::ForeignLabel);
    }
    let level1 = vec![
        ("long".to_string(), vec![labels[0].clone()]),
        ("short".to_string(), vec![labels[1].clone()]),
    ];
    let mut upper = Vec::with_capacity(spec.levels.saturating_sub(1));
    for (step, &a) in spec.cf_digits[..spec.levels - 1].iter().enumerate() {
        let long_count = if step == 0 { a - 1 } else { a };
        let mut long_traversal: Vec<String> =
            std::iter::repeat_n("long".to_string(), long_count as usize).collect();
        long_traversal.push("short".to_string());
        upper.push(vec![
            ("long".to_string(), long_traversal),
            ("short".to_string(), vec!["long".to_string()]),
        ]);
    }
    Ok(OrderedBvDiagram::new(group.clone(), level1, upper)?)
}

/// The two rotation-by-√2 diagrams (all partial quotients 2) whose skew
/// product by `Z_2 × Z_2`-valued cocycles reproduces the octagonal torsion
/// `Z_2`. The shipped labels put `{p1, p2}` (resp. `{p2, p1}`) on the two
/// level-1 cells; this is one non-degenerate choice among many, and any
/// other non-degenerate labeling gives the same torsion. Non-degeneracy
/// holds at every level: the tower products alternate between `{p1, p2}`
/// shapes and `{p1·p2, p_i}` shapes, both generating.
pub fn octagonal_pair(
    levels: usize,
) -> Result<(OrderedBvDiagram, OrderedBvDiagram), GeneratorError> {
    let group = FinAbGroup::new(vec![2, 2]).expect("2,2 moduli are valid");
    let spec = RotationSpec::new(vec![2; levels.saturating_sub(1)], levels)?;
    let p1 = group.generator(0);
    let p2 = group.generator(1);
    let dx = rotation_diagram(&spec, &group, &[p1.clone(), p2.clone()])?;
    let dy = rotation_diagram(&spec, &group, &[p2, p1])?;
    Ok((dx, dy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bv;

    /// Convergent denominators q_k of the continued fraction, by the
    /// standard recursion.
    fn convergents(digits: &[u64], count: usize) -> Vec<u64> {
        let mut qs = vec![1u64]; // q_0
        let (mut prev, mut cur) = (0u64, 1u64); // q_{-1}, q_0
        for &a in digits.iter().take(count.saturating_sub(1)) {
            let next = a * cur + prev;
            prev = cur;
            cur = next;
            qs.push(cur);
        }
        qs
    }

    #[test]
    fn rotation_heights_follow_convergents() {
        let group = FinAbGroup::parse("2,2").unwrap();
        let labels = [group.generator(0), group.generator(1)];
        let spec = RotationSpec::new(vec![2, 2, 2, 2], 5).unwrap();
        let d = rotation_diagram(&spec, &group, &labels).unwrap();
        assert_eq!(d.num_levels(), 5);
        let expected = convergents(&[2, 2, 2, 2], 5);
        assert_eq!(expected, vec![1, 2, 5, 12, 29]);
        for level in 1..=5 {
            assert_eq!(d.num_towers(level), 2);
            assert_eq!(d.heights(level)[0], expected[level - 1]);
            if level >= 2 {
                assert_eq!(d.heights(level)[1], expected[level - 2]);
            }
        }

        // Mixed digits, e.g. the golden-ratio tail.
        let spec = RotationSpec::new(vec![1, 1, 1, 1], 5).unwrap();
        let d = rotation_diagram(&spec, &group, &labels).unwrap();
        let expected = convergents(&[1, 1, 1, 1], 5);
        for level in 1..=5 {
            assert_eq!(d.heights(level)[0], expected[level - 1]);
        }
    }

    #[test]
    fn rotation_spec_validation() {
        assert!(matches!(
            RotationSpec::new(vec![2, 0], 3),
            Err(GeneratorError::ZeroDigit)
        ));
        assert!(matches!(
            RotationSpec::new(vec![2], 0),
            Err(GeneratorError::ZeroLevels)
        ));
        assert!(matches!(
            RotationSpec::new(vec![2], 4),
            Err(GeneratorError::NotEnoughDigits { .. })
        ));
    }

    #[test]
    fn octagonal_pair_is_nondegenerate_with_z2_torsion() {
        let (dx, dy) = octagonal_pair(4).unwrap();
        assert!(dx.nondegenerate_through(4));
        assert!(dy.nondegenerate_through(4));
        let report = bv::torsion_stabilization(&dx, &dy, 4).unwrap();
        assert_eq!(report.predicted, vec![2]);
        assert!(report.all_match());
        for stage in &report.stages {
            assert_eq!(stage.torsion, vec![num_bigint::BigInt::from(2)]);
        }
    }

    #[test]
    fn degenerate_labels_are_rejected_at_stage_build() {
        let group = FinAbGroup::parse("2,2").unwrap();
        let spec = RotationSpec::new(vec![2, 2, 2], 4).unwrap();
        let e = group.identity();
        let degenerate = rotation_diagram(&spec, &group, &[e.clone(), e]).unwrap();
        let (_, dy) = octagonal_pair(4).unwrap();
        assert!(matches!(
            bv::skew_stage(&degenerate, &dy, 1),
            Err(bv::DiagramError::Degenerate { level: 1 })
        ));
    }
}
