use std::collections::HashMap;
use std::fmt;

use num_traits::Signed;

use super::{one, zero, LpError};
use crate::exactnum::{format_rational, rational::pow, Rational};
use crate::model::{
    coverage_check_scheme, ConstraintCheck, DualCertificate, Geometry, Instance, OptScheme, Pattern, Sense,
};
use crate::packing::{
    count_available_anchors, exhaustive_feasible, grid_layout, grid_units, verify_placement, AnchorGrid, Feasibility,
    GridPlacement, PackingError, Placement, SearchConfig,
};
use crate::patterns::{check_dominance, KnapsackReport, Provenance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    Proven,
    Refuted(String),
    Unproven(String),
}

impl Status {
    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Proven => 0,
            Status::Refuted(_) => 1,
            Status::Unproven(_) => 2,
        }
    }

    pub fn is_proven(&self) -> bool {
        *self == Status::Proven
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Proven => f.write_str("PROVEN"),
            Status::Refuted(r) => write!(f, "REFUTED ({r})"),
            Status::Unproven(r) => write!(f, "UNPROVEN ({r})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Certification {
    /// Non-sand items at anchors, sand counted on the free anchors.
    Grid { layout: GridPlacement, sand: u64, free: u64 },
    Placed(Placement),
    Supplied(Placement),
    Infeasible(String),
    Unknown(String),
}

impl Certification {
    pub fn is_certified(&self) -> bool {
        matches!(self, Certification::Grid { .. } | Certification::Placed(_) | Certification::Supplied(_))
    }
}

impl fmt::Display for Certification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Certification::Grid { layout, sand, free } => {
                write!(f, "anchor layout of {} items, {free} anchors free for {sand} sand items", layout.items.len())
            }
            Certification::Placed(p) => write!(f, "explicit placement of {} items", p.items.len()),
            Certification::Supplied(p) => write!(f, "supplied placement of {} items verified", p.items.len()),
            Certification::Infeasible(r) => write!(f, "infeasible: {r}"),
            Certification::Unknown(r) => write!(f, "not certified: {r}"),
        }
    }
}

/// Limit volume of the pattern with all infinitesimals dropped.
fn base_volume(inst: &Instance, p: &Pattern) -> Rational {
    p.counts
        .iter()
        .zip(&inst.types)
        .map(|(&c, t)| {
            let v = match inst.geometry {
                Geometry::Hypercube => pow(&t.width.base, inst.dimension),
                Geometry::Rectangle2d => t.base_area(),
            };
            v * Rational::from_integer(c.into())
        })
        .sum()
}

fn grid_certify(inst: &Instance, p: &Pattern, grid: &AnchorGrid) -> Result<Option<Certification>, LpError> {
    let layout = match grid_layout(p, &inst.types, grid) {
        Ok(Some(l)) => l,
        Ok(None) => return Ok(Some(Certification::Unknown("no anchor layout found".into()))),
        Err(PackingError::NotMultiple(_)) => return Ok(None),
        Err(e) => return Err(e.into()),
    };
    let s = p.class_index();
    let sand = if grid_units(&inst.types[s].width, grid).is_err() { p.counts[s] } else { 0 };
    if sand > 0 && !inst.types[s].width.le(&grid.unit()).map_err(PackingError::from)? {
        return Ok(Some(Certification::Unknown(format!("type {} is larger than one anchor cell", s + 1))));
    }
    let free = count_available_anchors(&layout)?;
    Ok(Some(if free >= sand {
        Certification::Grid { layout, sand, free }
    } else {
        Certification::Unknown(format!("anchor layout leaves {free} anchors for {sand} sand items"))
    }))
}

/// Certifies that `pattern` fits in one bin: a supplied placement, an anchor layout with
/// sand counted on free anchors, or exhaustive search. A limit volume above 1 proves
/// infeasibility.
pub fn certify_pattern(
    inst: &Instance,
    pattern: &Pattern,
    supplied: Option<&Placement>,
    cfg: &SearchConfig,
) -> Result<Certification, LpError> {
    if pattern.is_empty() {
        return Ok(Certification::Infeasible("empty pattern".into()));
    }
    let k = inst.num_types();
    if let Some(pl) = supplied {
        if pl.counts(k) == pattern.counts && verify_placement(pl, &inst.types)? {
            return Ok(Certification::Supplied(pl.clone()));
        }
    }
    let vol = base_volume(inst, pattern);
    if vol > one() {
        return Ok(Certification::Infeasible(format!("limit volume {} exceeds the bin", format_rational(&vol))));
    }
    let mut fallback = None;
    if let (Geometry::Hypercube, Some(g), 2) = (inst.geometry, inst.anchor_grid, inst.dimension) {
        match grid_certify(inst, pattern, &AnchorGrid::new(g, 2))? {
            Some(c) if c.is_certified() => return Ok(c),
            other => fallback = other,
        }
        // anchor-scale patterns are far beyond exhaustive search
        if pattern.total_items() > cfg.item_cap {
            return Ok(fallback.unwrap_or_else(|| Certification::Unknown("no anchor layout found".into())));
        }
    }
    if inst.dimension != 2 {
        return Ok(Certification::Unknown(format!("no feasibility oracle in dimension {}", inst.dimension)));
    }
    Ok(match exhaustive_feasible(pattern, &inst.types, cfg)? {
        Feasibility::Feasible(pl) => Certification::Placed(pl),
        Feasibility::Infeasible => Certification::Infeasible("exhaustive placement search".into()),
        Feasibility::BudgetExceeded => {
            fallback.unwrap_or_else(|| Certification::Unknown("placement search budget exhausted".into()))
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub bound: Rational,
    pub status: Status,
    pub ledger: Vec<ConstraintCheck>,
    pub notes: Vec<String>,
}

/// Checks a dual certificate against a knapsack report computed for its λ.
pub fn verify_dual_certificate(
    inst: &Instance,
    cert: &DualCertificate,
    knapsack: &KnapsackReport,
) -> Result<BoundResult, LpError> {
    let k = inst.num_types();
    if cert.lambda.len() != k || cert.mu.len() != k {
        return Err(crate::model::ModelError::DimensionMismatch { expected: k, got: cert.lambda.len().min(cert.mu.len()) }.into());
    }
    if knapsack.classes.len() != k {
        return Err(LpError::Shape(format!("knapsack report covers {} of {k} classes", knapsack.classes.len())));
    }
    let mut ledger = Vec::new();
    let mut notes = Vec::new();
    for (j, l) in cert.lambda.iter().enumerate() {
        ledger.push(ConstraintCheck { label: format!("lambda{} >= 0", j + 1), lhs: l.clone(), sense: Sense::AtLeast, rhs: zero() });
    }
    for (j, m) in cert.mu.iter().enumerate() {
        ledger.push(ConstraintCheck { label: format!("mu{} <= 0", j + 1), lhs: m.clone(), sense: Sense::AtMost, rhs: zero() });
    }
    let norm: Rational = cert.mu.iter().zip(&inst.opt_ratios).map(|(m, r)| -(m * r)).sum();
    ledger.push(ConstraintCheck { label: "normalization".into(), lhs: norm, sense: Sense::AtMost, rhs: one() });
    for c in &knapsack.classes {
        let h = &c.heaviest;
        ledger.push(ConstraintCheck {
            label: format!("class {} heaviest {} [{}]", c.class + 1, h.best, h.provenance),
            lhs: h.weight.clone(),
            sense: Sense::AtMost,
            rhs: c.capacity.clone(),
        });
        if h.upper > h.weight {
            notes.push(format!(
                "class {}: weight of feasible patterns only bounded by {} (capacity {})",
                c.class + 1,
                format_rational(&h.upper),
                format_rational(&c.capacity)
            ));
        }
        if let Some(n) = &h.note {
            notes.push(format!("class {}: {n}", c.class + 1));
        }
    }
    let mut broken_rules = Vec::new();
    for r in &cert.dominance {
        if !check_dominance(r, &inst.types, &cert.lambda)? {
            broken_rules.push(r.to_string());
        }
    }
    let bound: Rational = inst.alpha.iter().zip(&cert.lambda).map(|(a, l)| a * l).sum();

    let status = if let Some(bad) = ledger.iter().find(|c| !c.holds()) {
        Status::Refuted(format!("{bad}"))
    } else if !broken_rules.is_empty() {
        Status::Unproven(format!("dominance rules do not hold: {}", broken_rules.join(", ")))
    } else if let Some(c) = knapsack.classes.iter().find(|c| c.within_capacity() != Some(true)) {
        Status::Unproven(format!("class {} maximality not established", c.class + 1))
    } else if let Some(c) = knapsack.classes.iter().find(|c| c.heaviest.provenance < Provenance::PrunedExact) {
        Status::Unproven(format!("class {} maximality is only {}", c.class + 1, c.heaviest.provenance))
    } else if cert.exploratory {
        Status::Unproven("exploratory certificate: pattern maximality is conjectural".into())
    } else {
        Status::Proven
    };
    if !bound.is_positive() && status.is_proven() {
        notes.push("bound is not positive".into());
    }
    Ok(BoundResult { bound, status, ledger, notes })
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternVerdict {
    pub pattern: Pattern,
    pub bins: Rational,
    pub certification: Certification,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PrefixReport {
    /// 0-based prefix index.
    pub prefix: usize,
    pub ratio: ConstraintCheck,
    pub coverage: Vec<ConstraintCheck>,
    pub patterns: Vec<PatternVerdict>,
    pub errors: Vec<String>,
}

impl PrefixReport {
    pub fn status(&self) -> Status {
        let n = self.prefix + 1;
        if let Some(e) = self.errors.first() {
            return Status::Refuted(format!("prefix {n}: {e}"));
        }
        if let Some(v) = self.patterns.iter().find(|v| matches!(v.certification, Certification::Infeasible(_))) {
            return Status::Refuted(format!("prefix {n}: pattern {} {}", v.pattern, v.certification));
        }
        if let Some(c) = self.coverage.iter().find(|c| !c.holds()) {
            return Status::Refuted(format!("coverage shortfall {c}"));
        }
        if !self.ratio.holds() {
            return Status::Refuted(format!("prefix {n}: ratio mismatch {}", self.ratio));
        }
        if let Some(v) = self.patterns.iter().find(|v| !v.certification.is_certified()) {
            return Status::Unproven(format!("prefix {n}: pattern {} {}", v.pattern, v.certification));
        }
        Status::Proven
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SchemeReport {
    pub prefixes: Vec<PrefixReport>,
}

impl SchemeReport {
    /// Refuted if any prefix is, else Unproven if any prefix is, else Proven.
    pub fn status(&self) -> Status {
        let all: Vec<Status> = self.prefixes.iter().map(PrefixReport::status).collect();
        all.iter()
            .find(|s| matches!(s, Status::Refuted(_)))
            .or_else(|| all.iter().find(|s| matches!(s, Status::Unproven(_))))
            .cloned()
            .unwrap_or(Status::Proven)
    }
}

/// Per prefix: bins sum to the OPT ratio, every pattern fits, and the cumulative item
/// counts are covered.
pub fn verify_opt_scheme(inst: &Instance, scheme: &OptScheme, cfg: &SearchConfig) -> Result<SchemeReport, LpError> {
    let coverage = coverage_check_scheme(scheme, inst)?;
    let mut cache: HashMap<Vec<u64>, Certification> = HashMap::new();
    let mut prefixes = Vec::new();
    let mut checks = coverage.checks.into_iter();
    for (j, entries) in scheme.prefixes.iter().enumerate() {
        let mut errors = Vec::new();
        let mut patterns = Vec::new();
        for e in entries {
            if e.bins.is_negative() {
                errors.push(format!("negative bin count for {}", e.pattern));
            }
            if e.pattern.counts[j + 1..].iter().any(|&c| c > 0) {
                errors.push(format!("pattern {} uses types beyond the prefix", e.pattern));
            }
            let certification = match (&e.placement, cache.get(&e.pattern.counts)) {
                (None, Some(c)) => c.clone(),
                _ => {
                    let c = certify_pattern(inst, &e.pattern, e.placement.as_ref(), cfg)?;
                    cache.insert(e.pattern.counts.clone(), c.clone());
                    c
                }
            };
            patterns.push(PatternVerdict { pattern: e.pattern.clone(), bins: e.bins.clone(), certification });
        }
        let total: Rational = entries.iter().map(|e| e.bins.clone()).sum();
        let ratio = ConstraintCheck {
            label: format!("prefix {} bins", j + 1),
            lhs: total,
            sense: Sense::Equal,
            rhs: inst.opt_ratios[j].clone(),
        };
        let cov: Vec<ConstraintCheck> = checks.by_ref().take(j + 1).collect();
        prefixes.push(PrefixReport { prefix: j, ratio, coverage: cov, patterns, errors });
    }
    Ok(SchemeReport { prefixes })
}
