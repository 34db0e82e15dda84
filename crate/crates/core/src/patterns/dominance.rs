use super::{DominanceRule, PatternError};
use crate::exactnum::{int, Rational};
use crate::model::ItemType;
use crate::packing::{PlacedItem, Placement};

fn check_indices(rule: &DominanceRule, k: usize) -> Result<(), PatternError> {
    if rule.dominator >= k || rule.dominated >= k || rule.dominator == rule.dominated {
        return Err(PatternError::Rule(rule.to_string(), format!("type indices must be distinct and below {k}")));
    }
    if rule.m1 == 0 || rule.m2 == 0 {
        return Err(PatternError::Rule(rule.to_string(), "multiplicities must be positive".into()));
    }
    Ok(())
}

/// `m1·w_i ≤ w_j` and `m2·h_i ≤ h_j`.
pub fn size_condition(rule: &DominanceRule, types: &[ItemType]) -> Result<bool, PatternError> {
    check_indices(rule, types.len())?;
    let (a, b) = (&types[rule.dominator], &types[rule.dominated]);
    Ok(a.width.times(rule.m1 as i64).le(&b.width)? && a.height.times(rule.m2 as i64).le(&b.height)?)
}

/// `m1·m2·λ_i ≥ λ_j`.
pub fn weight_condition(rule: &DominanceRule, lambda: &[Rational]) -> Result<bool, PatternError> {
    check_indices(rule, lambda.len())?;
    Ok(&lambda[rule.dominator] * int(rule.m1 as i64 * rule.m2 as i64) >= lambda[rule.dominated])
}

pub fn check_dominance(rule: &DominanceRule, types: &[ItemType], lambda: &[Rational]) -> Result<bool, PatternError> {
    Ok(size_condition(rule, types)? && weight_condition(rule, lambda)?)
}

/// Reflexive-free transitive closure of a rule list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominanceClosure {
    reach: Vec<Vec<bool>>,
}

impl DominanceClosure {
    pub fn new(rules: &[DominanceRule], k: usize) -> Result<Self, PatternError> {
        let mut reach = vec![vec![false; k]; k];
        for r in rules {
            check_indices(r, k)?;
            reach[r.dominator][r.dominated] = true;
        }
        for m in 0..k {
            for i in 0..k {
                if reach[i][m] {
                    for j in 0..k {
                        if reach[m][j] {
                            reach[i][j] = true;
                        }
                    }
                }
            }
        }
        Ok(DominanceClosure { reach })
    }

    pub fn num_types(&self) -> usize {
        self.reach.len()
    }

    /// Whether `i` dominates `j` directly or through a chain of rules.
    pub fn dominates(&self, i: usize, j: usize) -> bool {
        i != j && self.reach[i][j]
    }
}

/// Types `t ≥ j` not dominated by another type `≥ j`; among mutually dominating types
/// the lowest index is kept.
pub fn reduced_type_set(j: usize, closure: &DominanceClosure) -> Vec<usize> {
    let k = closure.num_types();
    (j..k)
        .filter(|&t| {
            !(j..k).any(|i| closure.dominates(i, t) && !(closure.dominates(t, i) && t < i))
        })
        .collect()
}

/// Replaces the item at `index` (of the rule's dominated type) by an `m1 × m2` grid of
/// dominator items anchored at the same corner.
pub fn substitute(
    placement: &Placement,
    index: usize,
    rule: &DominanceRule,
    types: &[ItemType],
) -> Result<Placement, PatternError> {
    check_indices(rule, types.len())?;
    let item = placement
        .items
        .get(index)
        .ok_or_else(|| PatternError::Rule(rule.to_string(), format!("no item at index {index}")))?;
    if item.type_idx != rule.dominated {
        return Err(PatternError::Rule(rule.to_string(), format!("item {index} is of type {}", item.type_idx + 1)));
    }
    let d = &types[rule.dominator];
    let mut items: Vec<PlacedItem> = placement.items.iter().enumerate().filter(|(i, _)| *i != index).map(|(_, it)| it.clone()).collect();
    for a in 0..rule.m1 {
        for b in 0..rule.m2 {
            items.push(PlacedItem {
                type_idx: rule.dominator,
                x: &item.x + &d.width.times(a as i64),
                y: &item.y + &d.height.times(b as i64),
            });
        }
    }
    Ok(Placement { items })
}
