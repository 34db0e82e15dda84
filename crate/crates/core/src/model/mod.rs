//! Instances, patterns, certificates and solutions.
//!
//! Item types are indexed from 0 internally; files and reports use 1-based ids.

mod load;

pub use load::{
    instance_to_file, load_certificate, load_instance, load_opt_scheme, load_pattern_set,
    load_primal, parse_instance, read_json,
};

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::exactnum::{format_rational, NumError, PerturbedSize, Rational};
use crate::packing::Placement;
use crate::patterns::DominanceRule;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("i/o error on {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invalid {field}: {msg}")]
    Invalid { field: String, msg: String },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Num(#[from] NumError),
}

impl ModelError {
    pub(crate) fn invalid(field: impl Into<String>, msg: impl Into<String>) -> Self {
        ModelError::Invalid { field: field.into(), msg: msg.into() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Geometry {
    Hypercube,
    Rectangle2d,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ItemType {
    pub id: usize,
    pub width: PerturbedSize,
    pub height: PerturbedSize,
}

impl ItemType {
    pub fn square(id: usize, side: PerturbedSize) -> Self {
        ItemType { id, width: side.clone(), height: side }
    }

    /// Area of the limit sizes (infinitesimals dropped).
    pub fn base_area(&self) -> Rational {
        &self.width.base * &self.height.base
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub name: String,
    pub dimension: u32,
    pub geometry: Geometry,
    /// Anchor grid resolution used for offline packings of grid-aligned hypercubes.
    pub anchor_grid: Option<u32>,
    pub types: Vec<ItemType>,
    /// Items of type j per n.
    pub alpha: Vec<Rational>,
    /// Declared upper bounds on lim OPT(L_1..L_j)/n.
    pub opt_ratios: Vec<Rational>,
}

impl Instance {
    pub fn num_types(&self) -> usize {
        self.types.len()
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let k = self.types.len();
        if k == 0 {
            return Err(ModelError::invalid("sublists", "instance has no sublists"));
        }
        if self.dimension == 0 {
            return Err(ModelError::invalid("dimension", "must be at least 1"));
        }
        if self.geometry == Geometry::Rectangle2d && self.dimension != 2 {
            return Err(ModelError::invalid("dimension", "rectangle2d instances are 2-dimensional"));
        }
        if self.alpha.len() != k {
            return Err(ModelError::DimensionMismatch { expected: k, got: self.alpha.len() });
        }
        if self.opt_ratios.len() != k {
            return Err(ModelError::invalid(
                "optRatios",
                format!("expected {k} entries, got {}", self.opt_ratios.len()),
            ));
        }
        let zero = PerturbedSize::zero();
        let one = PerturbedSize::one();
        for t in &self.types {
            for (axis, s) in [("width", &t.width), ("height", &t.height)] {
                if !zero.lt(s)? || !s.le(&one)? {
                    return Err(ModelError::invalid(
                        format!("sublists[{}].{axis}", t.id),
                        format!("size {s} not in (0, 1]"),
                    ));
                }
            }
            if self.geometry == Geometry::Hypercube && t.width != t.height {
                return Err(ModelError::invalid(format!("sublists[{}]", t.id), "hypercube item with unequal sides"));
            }
        }
        if self.geometry == Geometry::Hypercube {
            for w in self.types.windows(2) {
                if !w[0].width.le(&w[1].width)? {
                    return Err(ModelError::invalid(
                        format!("sublists[{}].side", w[1].id),
                        "hypercube sizes must be nondecreasing",
                    ));
                }
            }
        }
        for (j, a) in self.alpha.iter().enumerate() {
            if a < &Rational::zero() {
                return Err(ModelError::invalid(format!("sublists[{}].alpha", j + 1), "negative multiplicity"));
            }
        }
        for (j, w) in self.opt_ratios.windows(2).enumerate() {
            if w[1] < w[0] {
                return Err(ModelError::invalid(
                    "optRatios",
                    format!("optRatios not nondecreasing at index {}", j + 2),
                ));
            }
        }
        if self.opt_ratios[0] <= Rational::zero() {
            return Err(ModelError::invalid("optRatios", "ratios must be positive"));
        }
        Ok(())
    }
}

/// One bin's content as a count per item type.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern {
    pub counts: Vec<u64>,
}

impl Pattern {
    pub fn new(counts: Vec<u64>) -> Result<Self, ModelError> {
        if counts.iter().all(|&c| c == 0) {
            return Err(ModelError::invalid("counts", "pattern must contain at least one item"));
        }
        Ok(Pattern { counts })
    }

    /// A pattern with the given (0-based type, count) entries over `k` types.
    pub fn from_entries(k: usize, entries: &[(usize, u64)]) -> Self {
        let mut counts = vec![0; k];
        for &(t, c) in entries {
            counts[t] += c;
        }
        Pattern { counts }
    }

    /// Index of the smallest used type: membership in T_j.
    pub fn class_index(&self) -> usize {
        self.counts.iter().position(|&c| c > 0).expect("nonempty pattern")
    }

    pub fn total_items(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.iter().all(|&c| c == 0)
    }

    pub fn with_extra(&self, t: usize) -> Pattern {
        let mut p = self.clone();
        p.counts[t] += 1;
        p
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .counts
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, c)| format!("{c}×s{}", i + 1))
            .collect();
        write!(f, "{}", parts.join(", "))
    }
}

pub fn pattern_weight(p: &Pattern, lambda: &[Rational]) -> Result<Rational, ModelError> {
    if p.counts.len() != lambda.len() {
        return Err(ModelError::DimensionMismatch { expected: p.counts.len(), got: lambda.len() });
    }
    Ok(p.counts
        .iter()
        .zip(lambda)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, l)| Rational::from_integer(c.into()) * l)
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualCertificate {
    pub lambda: Vec<Rational>,
    pub mu: Vec<Rational>,
    pub dominance: Vec<DominanceRule>,
    /// Conjectural certificates can never yield a proven bound.
    pub exploratory: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalEntry {
    pub label: Option<String>,
    pub pattern: Pattern,
    pub x: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrimalSolution {
    pub entries: Vec<PrimalEntry>,
    pub ratio: Rational,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeEntry {
    pub pattern: Pattern,
    pub bins: Rational,
    pub placement: Option<Placement>,
}

/// For each prefix j, the bins (per n) realizing optRatios[j].
#[derive(Debug, Clone, PartialEq)]
pub struct OptScheme {
    pub prefixes: Vec<Vec<SchemeEntry>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    AtLeast,
    AtMost,
    Equal,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstraintCheck {
    pub label: String,
    pub lhs: Rational,
    pub sense: Sense,
    pub rhs: Rational,
}

impl ConstraintCheck {
    pub fn holds(&self) -> bool {
        match self.sense {
            Sense::AtLeast => self.lhs >= self.rhs,
            Sense::AtMost => self.lhs <= self.rhs,
            Sense::Equal => self.lhs == self.rhs,
        }
    }

    pub fn tight(&self) -> bool {
        self.lhs == self.rhs
    }

    /// Nonnegative exactly when the constraint holds.
    pub fn slack(&self) -> Rational {
        match self.sense {
            Sense::AtLeast => &self.lhs - &self.rhs,
            Sense::AtMost => &self.rhs - &self.lhs,
            Sense::Equal => -num_traits::Signed::abs(&(&self.lhs - &self.rhs)),
        }
    }
}

impl fmt::Display for Sense {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sense::AtLeast => ">=",
            Sense::AtMost => "<=",
            Sense::Equal => "==",
        })
    }
}

impl fmt::Display for ConstraintCheck {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = self.sense;
        let status = if !self.holds() {
            "VIOLATED"
        } else if self.tight() {
            "tight"
        } else {
            "ok"
        };
        write!(
            f,
            "{}: {} {op} {} slack {} [{status}]",
            self.label,
            format_rational(&self.lhs),
            format_rational(&self.rhs),
            format_rational(&self.slack())
        )
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CoverageReport {
    pub checks: Vec<ConstraintCheck>,
}

impl CoverageReport {
    pub fn all_hold(&self) -> bool {
        self.checks.iter().all(ConstraintCheck::holds)
    }

    pub fn all_tight(&self) -> bool {
        self.checks.iter().all(ConstraintCheck::tight)
    }

    pub fn failures(&self) -> impl Iterator<Item = &ConstraintCheck> {
        self.checks.iter().filter(|c| !c.holds())
    }

    pub fn find(&self, label: &str) -> Option<&ConstraintCheck> {
        self.checks.iter().find(|c| c.label == label)
    }
}

/// Primal LP constraints at a given solution: coverage of every type and the prefix
/// bin budgets `Σ_{i≤j} Σ_{p∈T_i} x(p) ≤ optRatios[j]·R`.
pub fn coverage_check_primal(sol: &PrimalSolution, inst: &Instance) -> Result<CoverageReport, ModelError> {
    let k = inst.num_types();
    for e in &sol.entries {
        if e.pattern.len() != k {
            return Err(ModelError::DimensionMismatch { expected: k, got: e.pattern.len() });
        }
        if e.x < Rational::zero() {
            return Err(ModelError::invalid("x", format!("negative x for pattern {}", e.pattern)));
        }
    }
    let mut report = CoverageReport::default();
    for j in 0..k {
        let lhs: Rational = sol
            .entries
            .iter()
            .map(|e| Rational::from_integer(e.pattern.counts[j].into()) * &e.x)
            .sum();
        report.checks.push(ConstraintCheck {
            label: format!("coverage type {}", j + 1),
            lhs,
            sense: Sense::AtLeast,
            rhs: inst.alpha[j].clone(),
        });
    }
    for j in 0..k {
        let lhs: Rational = sol
            .entries
            .iter()
            .filter(|e| !e.pattern.is_empty() && e.pattern.class_index() <= j)
            .map(|e| e.x.clone())
            .sum();
        report.checks.push(ConstraintCheck {
            label: format!("prefix {}", j + 1),
            lhs,
            sense: Sense::AtMost,
            rhs: &inst.opt_ratios[j] * &sol.ratio,
        });
    }
    Ok(report)
}

/// Coverage of the cumulative item counts of each prefix by an OPT scheme.
pub fn coverage_check_scheme(scheme: &OptScheme, inst: &Instance) -> Result<CoverageReport, ModelError> {
    let k = inst.num_types();
    if scheme.prefixes.len() != k {
        return Err(ModelError::DimensionMismatch { expected: k, got: scheme.prefixes.len() });
    }
    let mut report = CoverageReport::default();
    for (j, entries) in scheme.prefixes.iter().enumerate() {
        for e in entries {
            if e.pattern.len() != k {
                return Err(ModelError::DimensionMismatch { expected: k, got: e.pattern.len() });
            }
        }
        for i in 0..=j {
            let lhs: Rational = entries
                .iter()
                .map(|e| Rational::from_integer(e.pattern.counts[i].into()) * &e.bins)
                .sum();
            report.checks.push(ConstraintCheck {
                label: format!("prefix {} coverage type {}", j + 1, i + 1),
                lhs,
                sense: Sense::AtLeast,
                rhs: inst.alpha[i].clone(),
            });
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    fn table3_lambda() -> Vec<Rational> {
        let x = rat(4410, 338989303);
        [1, 16, 25, 100, 400, 400, 1600, 6400, 6400, 25600].iter().map(|&v| &x * int(v)).collect()
    }

    #[test]
    fn weight_of_sand_pattern() {
        let x = rat(4410, 338989303);
        let p = Pattern::from_entries(10, &[(0, 176400)]);
        assert_eq!(pattern_weight(&p, &table3_lambda()).unwrap(), x * int(176400));
    }

    #[test]
    fn weight_of_mixed_class_two_pattern() {
        let x = rat(4410, 338989303);
        let p = Pattern::from_entries(10, &[(1, 207), (2, 6889)]);
        assert_eq!(pattern_weight(&p, &table3_lambda()).unwrap(), x * int(175537));
    }

    #[test]
    fn zero_weights_and_mismatch() {
        let p = Pattern::from_entries(3, &[(0, 5), (2, 1)]);
        assert!(pattern_weight(&p, &[int(0), int(0), int(0)]).unwrap().is_zero());
        assert!(matches!(pattern_weight(&p, &[int(1)]), Err(ModelError::DimensionMismatch { .. })));
    }

    #[test]
    fn class_index_is_first_nonzero() {
        let p = Pattern::from_entries(9, &[(4, 1), (5, 1), (6, 2)]);
        assert_eq!(p.class_index(), 4);
        assert!(Pattern::new(vec![0, 0]).is_err());
    }

    #[test]
    fn empty_solution_fails_coverage() {
        let inst = Instance {
            name: "t".into(),
            dimension: 1,
            geometry: Geometry::Hypercube,
            anchor_grid: None,
            types: vec![ItemType::square(1, PerturbedSize::exact(rat(1, 3)))],
            alpha: vec![int(1)],
            opt_ratios: vec![rat(1, 3)],
        };
        let sol = PrimalSolution { entries: vec![], ratio: int(1) };
        let r = coverage_check_primal(&sol, &inst).unwrap();
        let c = r.find("coverage type 1").unwrap();
        assert!(!c.holds());
        assert_eq!(r.failures().count(), 1);
    }
}
