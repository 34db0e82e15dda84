//! Heaviest feasible pattern per class.
//!
//! A pattern in `T_j` is only constrained against `−Σ_{i≥j} μ_i`, which grows as `j`
//! shrinks, so it suffices to maximize over all patterns built from the reduced type set
//! of `j`; reduced patterns that miss type `j` belong to a later class with a smaller
//! capacity and are covered there as well.

use std::fmt;

use num_traits::{One, Zero};

use super::dominance::{reduced_type_set, DominanceClosure};
use super::witness::{best_two_size_layout, TwoSizes};
use super::PatternError;
use crate::exactnum::{int, Rational};
use crate::model::{pattern_weight, DualCertificate, Geometry, Instance, ItemType, Pattern};
use crate::packing::{
    exhaustive_feasible, grid_units, AnchorGrid, Feasibility, GridPlacement, Placement, SearchConfig,
};

/// How much of a maximality claim was actually established.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Provenance {
    Unproven,
    /// Feasibility and weight checked, maximality taken on trust.
    Trusted,
    /// Full enumeration in which some candidates were discarded by a sound area bound.
    PrunedExact,
    Exact,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Exact => "exact",
            Provenance::PrunedExact => "pruned-exact",
            Provenance::Trusted => "trusted",
            Provenance::Unproven => "unproven",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KnapsackConfig {
    pub search: SearchConfig,
    /// Discard count vectors whose limit area exceeds the bin without calling the oracle.
    pub prune: bool,
    /// Largest number of count vectors enumerated for one class.
    pub max_vectors: u64,
    /// Feasibility oracle calls per class before the class is left unresolved.
    pub max_oracle_calls: u64,
}

impl Default for KnapsackConfig {
    fn default() -> Self {
        KnapsackConfig { search: SearchConfig::default(), prune: true, max_vectors: 2_000_000, max_oracle_calls: 5_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    Grid(GridPlacement),
    Free(Placement),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Heaviest {
    /// Heaviest pattern found with a feasibility witness or an exact capacity argument.
    pub best: Pattern,
    pub weight: Rational,
    /// Other patterns of the same weight found by enumeration.
    pub ties: Vec<Pattern>,
    /// Proven upper bound on the weight of any feasible pattern of the class.
    pub upper: Rational,
    pub provenance: Provenance,
    pub witness: Option<Witness>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassReport {
    /// 0-based class index.
    pub class: usize,
    pub reduced: Vec<usize>,
    pub heaviest: Heaviest,
    pub capacity: Rational,
}

impl ClassReport {
    /// The heaviest pattern followed by its equal-weight alternatives.
    pub fn best_or_ties(&self) -> Vec<&Pattern> {
        std::iter::once(&self.heaviest.best).chain(&self.heaviest.ties).collect()
    }

    /// `Some(false)` when a witnessed pattern is heavier than the capacity, `Some(true)` when
    /// the proven upper bound fits, `None` when neither is known.
    pub fn within_capacity(&self) -> Option<bool> {
        if self.heaviest.weight > self.capacity {
            Some(false)
        } else if self.heaviest.upper <= self.capacity {
            Some(true)
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnapsackReport {
    pub classes: Vec<ClassReport>,
}

/// Per-axis count of a single item type (`c` with `c·side ≤ 1`), raised over all axes.
fn single_capacity(t: &ItemType, inst: &Instance) -> Result<u64, PatternError> {
    let one = crate::exactnum::PerturbedSize::one();
    let cw = t.width.max_multiple_within(&one)?;
    Ok(match inst.geometry {
        Geometry::Hypercube => cw.pow(inst.dimension),
        Geometry::Rectangle2d => cw * t.height.max_multiple_within(&one)?,
    })
}

fn expand(k: usize, types: &[usize], v: &[u64]) -> Pattern {
    let mut counts = vec![0; k];
    for (i, &t) in types.iter().enumerate() {
        counts[t] = v[i];
    }
    Pattern { counts }
}

fn single_type(inst: &Instance, t: usize, lambda: &[Rational]) -> Result<Heaviest, PatternError> {
    let c = single_capacity(&inst.types[t], inst)?;
    let best = Pattern::from_entries(inst.num_types(), &[(t, c)]);
    let weight = &lambda[t] * Rational::from_integer(c.into());
    Ok(Heaviest {
        best,
        upper: weight.clone(),
        weight,
        ties: vec![],
        provenance: Provenance::Exact,
        witness: None,
        note: None,
    })
}

/// Largest `λ_t / area_t` over the types, times the bin area.
fn density_bound(inst: &Instance, reduced: &[usize], lambda: &[Rational]) -> Rational {
    reduced
        .iter()
        .map(|&t| {
            let t_area = match inst.geometry {
                Geometry::Hypercube => crate::exactnum::rational::pow(&inst.types[t].width.base, inst.dimension),
                Geometry::Rectangle2d => inst.types[t].base_area(),
            };
            &lambda[t] / t_area
        })
        .max()
        .unwrap_or_else(Rational::zero)
}

fn enumerate(
    inst: &Instance,
    reduced: &[usize],
    lambda: &[Rational],
    cfg: &KnapsackConfig,
) -> Result<Heaviest, PatternError> {
    let k = inst.num_types();
    let caps: Vec<u64> = reduced.iter().map(|&t| single_capacity(&inst.types[t], inst)).collect::<Result<_, _>>()?;
    let space = caps.iter().try_fold(1u64, |acc, &c| acc.checked_mul(c + 1));
    if space.map_or(true, |s| s > cfg.max_vectors) {
        let mut fallback = reduced
            .iter()
            .map(|&t| single_type(inst, t, lambda))
            .collect::<Result<Vec<_>, _>>()?
            .into_iter()
            .max_by(|a, b| a.weight.cmp(&b.weight))
            .expect("nonempty reduced set");
        fallback.upper = density_bound(inst, reduced, lambda);
        fallback.provenance = if fallback.upper == fallback.weight { Provenance::PrunedExact } else { Provenance::Unproven };
        fallback.note = Some(format!("count-vector space too large to enumerate (limit {})", cfg.max_vectors));
        return Ok(fallback);
    }
    let weights = integer_scale(reduced.iter().map(|&t| lambda[t].clone()))?;
    let areas = integer_scale(reduced.iter().map(|&t| inst.types[t].base_area()))?;
    let area_one = areas.1;
    let (weights, areas) = (weights.0, areas.0);
    let mut vectors: Vec<(i128, Vec<u64>)> = Vec::new();
    let mut v = vec![0u64; caps.len()];
    loop {
        let mut i = 0;
        while i < v.len() && v[i] == caps[i] {
            v[i] = 0;
            i += 1;
        }
        if i == v.len() {
            break;
        }
        v[i] += 1;
        let area: i128 = v.iter().zip(&areas).map(|(&c, a)| c as i128 * a).sum();
        if cfg.prune && area > area_one {
            continue;
        }
        let w: i128 = v.iter().zip(&weights).map(|(&c, w)| c as i128 * w).sum();
        vectors.push((w, v.clone()));
    }
    vectors.sort_by(|a, b| b.0.cmp(&a.0).then_with(|| b.1.cmp(&a.1)));

    let weight_of = |v: &[u64]| -> Rational {
        v.iter().zip(reduced).map(|(&c, &t)| &lambda[t] * Rational::from_integer(c.into())).sum()
    };
    let mut best: Option<(i128, Pattern, Placement)> = None;
    let mut ties = Vec::new();
    let mut infeasible: Vec<Vec<u64>> = Vec::new();
    let mut unresolved: Option<(i128, Vec<u64>)> = None;
    let mut calls = 0u64;
    for (w, v) in vectors {
        if best.as_ref().is_some_and(|(bw, ..)| w < *bw) {
            break;
        }
        if infeasible.iter().any(|u| u.iter().zip(&v).all(|(a, b)| b >= a)) {
            continue;
        }
        if calls >= cfg.max_oracle_calls {
            unresolved.get_or_insert((w, v));
            break;
        }
        calls += 1;
        let p = expand(k, reduced, &v);
        match exhaustive_feasible(&p, &inst.types, &cfg.search)? {
            Feasibility::Feasible(pl) => match &best {
                None => best = Some((w, p, pl)),
                Some(_) => ties.push(p),
            },
            Feasibility::Infeasible => infeasible.push(v),
            Feasibility::BudgetExceeded => {
                unresolved.get_or_insert((w, v));
            }
        }
    }
    let unresolved = unresolved.map(|(_, v)| weight_of(&v));
    let (weight, best, witness) = match best {
        Some((_, p, pl)) => (pattern_weight(&p, lambda)?, p, Some(Witness::Free(pl))),
        None => {
            let h = reduced
                .iter()
                .map(|&t| single_type(inst, t, lambda))
                .collect::<Result<Vec<_>, _>>()?
                .into_iter()
                .max_by(|a, b| a.weight.cmp(&b.weight))
                .expect("nonempty reduced set");
            (h.weight, h.best, None)
        }
    };
    let unresolved = unresolved.filter(|u| u > &weight);
    Ok(Heaviest {
        upper: unresolved.clone().unwrap_or_else(|| weight.clone()),
        provenance: match (&unresolved, cfg.prune) {
            (Some(_), _) => Provenance::Unproven,
            (None, true) => Provenance::PrunedExact,
            (None, false) => Provenance::Exact,
        },
        note: unresolved.map(|u| format!("search budget exhausted on a pattern of weight {u}")),
        best,
        weight,
        ties,
        witness,
    })
}

/// Scales rationals to integers over a common denominator, with the scaled value of 1.
fn integer_scale(values: impl Iterator<Item = Rational>) -> Result<(Vec<i128>, i128), PatternError> {
    use num_traits::ToPrimitive;
    let values: Vec<Rational> = values.collect();
    let l = values.iter().fold(num_bigint::BigInt::one(), |acc, v| num_integer::Integer::lcm(&acc, v.denom()));
    let overflow = || PatternError::Budget("weights too fine for integer enumeration".into());
    let scaled = values
        .iter()
        .map(|v| (v * Rational::from_integer(l.clone())).to_integer().to_i128().ok_or_else(overflow))
        .collect::<Result<_, _>>()?;
    Ok((scaled, l.to_i128().ok_or_else(overflow)?))
}

/// Grid-aligned squares: witnesses from explicit layouts, upper bound from the fact that
/// any line meets items of total side at most `(G−1)` units.
fn grid_squares(inst: &Instance, reduced: &[usize], lambda: &[Rational], grid: &AnchorGrid) -> Result<Heaviest, PatternError> {
    let k = inst.num_types();
    let units: Vec<u32> = reduced.iter().map(|&t| grid_units(&inst.types[t].width, grid)).collect::<Result<_, _>>()?;
    let g1 = int(grid.usable() as i64);
    let upper = reduced
        .iter()
        .zip(&units)
        .map(|(&t, &u)| &lambda[t] * crate::exactnum::rational::pow(&(&g1 / int(u as i64)), 2))
        .max()
        .expect("nonempty reduced set");
    let mut best: Option<(Rational, Pattern, Option<GridPlacement>)> = None;
    let mut offer = |w: Rational, p: Pattern, gp: Option<GridPlacement>| {
        if best.as_ref().map_or(true, |(bw, ..)| w > *bw) {
            best = Some((w, p, gp));
        }
    };
    for &t in reduced {
        let h = single_type(inst, t, lambda)?;
        offer(h.weight, h.best, None);
    }
    // integer weights for ranking layouts
    let denom = reduced.iter().fold(num_bigint::BigInt::one(), |acc, &t| num_integer::Integer::lcm(&acc, lambda[t].denom()));
    let scaled: Vec<Option<i128>> = reduced
        .iter()
        .map(|&t| {
            use num_traits::ToPrimitive;
            (&lambda[t] * Rational::from_integer(denom.clone())).to_integer().to_i128()
        })
        .collect();
    for i in 0..reduced.len() {
        for j in 0..reduced.len() {
            if units[i] >= units[j] {
                continue;
            }
            let (Some(wa), Some(wb)) = (scaled[i], scaled[j]) else { continue };
            let sz = TwoSizes { a: units[i], b: units[j], ta: reduced[i], tb: reduced[j] };
            if let Some(gp) = best_two_size_layout(grid, sz, wa, wb) {
                let p = Pattern { counts: gp.counts(k) };
                let w = pattern_weight(&p, lambda)?;
                offer(w, p, Some(gp));
            }
        }
    }
    let (weight, best, gp) = best.expect("at least one single-type candidate");
    let exact = weight == upper;
    Ok(Heaviest {
        note: (!exact).then(|| format!("heaviest layout found has weight {weight}; line bound gives {upper}")),
        provenance: if exact { Provenance::PrunedExact } else { Provenance::Unproven },
        upper,
        best,
        weight,
        ties: vec![],
        witness: gp.map(Witness::Grid),
    })
}

/// Heaviest feasible pattern over the reduced type set of class `j`.
pub fn heaviest_pattern(
    inst: &Instance,
    j: usize,
    lambda: &[Rational],
    closure: &DominanceClosure,
    cfg: &KnapsackConfig,
) -> Result<(Vec<usize>, Heaviest), PatternError> {
    let reduced = reduced_type_set(j, closure);
    if reduced.is_empty() {
        return Err(PatternError::Rule(format!("class {}", j + 1), "every type is dominated".into()));
    }
    let h = if reduced.len() == 1 {
        single_type(inst, reduced[0], lambda)?
    } else {
        let grid = inst.anchor_grid.map(|g| AnchorGrid::new(g, inst.dimension));
        let aligned = grid.filter(|g| {
            inst.geometry == Geometry::Hypercube
                && g.dimension == 2
                && reduced.iter().all(|&t| grid_units(&inst.types[t].width, g).is_ok())
        });
        match (aligned, inst.geometry, inst.dimension) {
            (Some(g), ..) => grid_squares(inst, &reduced, lambda, &g)?,
            (None, _, 2) => enumerate(inst, &reduced, lambda, cfg)?,
            (None, ..) => {
                let mut h = reduced
                    .iter()
                    .map(|&t| single_type(inst, t, lambda))
                    .collect::<Result<Vec<_>, _>>()?
                    .into_iter()
                    .max_by(|a, b| a.weight.cmp(&b.weight))
                    .expect("nonempty reduced set");
                h.upper = density_bound(inst, &reduced, lambda);
                h.provenance = if h.upper == h.weight { Provenance::PrunedExact } else { Provenance::Unproven };
                h
            }
        }
    };
    Ok((reduced, h))
}

/// Heaviest pattern and capacity `−Σ_{i≥j} μ_i` for every class, classes searched in parallel.
pub fn knapsack_report(inst: &Instance, cert: &DualCertificate, cfg: &KnapsackConfig) -> Result<KnapsackReport, PatternError> {
    let k = inst.num_types();
    let closure = DominanceClosure::new(&cert.dominance, k)?;
    let results: Vec<Result<ClassReport, PatternError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = (0..k)
            .map(|j| {
                let closure = &closure;
                scope.spawn(move || {
                    let (reduced, heaviest) = heaviest_pattern(inst, j, &cert.lambda, closure, cfg)?;
                    let capacity = -cert.mu[j..].iter().sum::<Rational>();
                    Ok(ClassReport { class: j, reduced, heaviest, capacity })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("knapsack worker panicked")).collect()
    });
    Ok(KnapsackReport { classes: results.into_iter().collect::<Result<_, _>>()? })
}

/// Dominance in the pattern sense: one more item of the smallest used type no longer fits.
pub fn verify_dominant_only(pattern: &Pattern, types: &[ItemType], cfg: &SearchConfig) -> Result<bool, PatternError> {
    if pattern.is_empty() {
        return Err(PatternError::Rule("pattern".into(), "empty pattern".into()));
    }
    let extended = pattern.with_extra(pattern.class_index());
    match exhaustive_feasible(&extended, types, cfg)? {
        Feasibility::Infeasible => Ok(true),
        Feasibility::Feasible(_) => Ok(false),
        Feasibility::BudgetExceeded => Err(PatternError::Budget(extended.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;
    use crate::model::{load_certificate, load_instance};
    use std::path::PathBuf;

    fn data(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
    }

    fn report(inst: &str, cert: &str) -> KnapsackReport {
        let inst = load_instance(&data(inst)).unwrap();
        let cert = load_certificate(&data(cert), &inst).unwrap();
        knapsack_report(&inst, &cert, &KnapsackConfig::default()).unwrap()
    }

    #[test]
    fn rectangle_classes_fit_their_capacities() {
        let r = report("rect-1p859.json", "table9-cert.json");
        let expect = [1152, 864, 816, 576, 504, 432, 288, 216, 144];
        for (c, &e) in r.classes.iter().zip(&expect) {
            assert_eq!(c.heaviest.weight, rat(e, 413), "class {}", c.class + 1);
            assert_eq!(c.capacity, rat(e, 413));
            assert!(c.heaviest.provenance >= Provenance::PrunedExact, "class {}", c.class + 1);
            assert_eq!(c.within_capacity(), Some(true));
        }
        assert_eq!(r.classes[1].reduced, vec![1, 3]);
        assert_eq!(r.classes[2].best_or_ties().len(), 1);
        assert_eq!(r.classes[1].best_or_ties().len(), 3);
    }

    #[test]
    fn square_class_two_is_exceeded() {
        let r = report("squares-1p68.json", "table3-cert.json");
        let x = rat(4410, 338989303);
        let c = &r.classes[1];
        assert_eq!(c.reduced, vec![1, 2]);
        assert_eq!(c.capacity, &x * rat(175537, 1));
        assert!(c.heaviest.weight >= &x * rat(175544, 1));
        assert_eq!(c.heaviest.upper, &x * rat(175561, 1));
        assert_eq!(c.within_capacity(), Some(false));
        assert!(matches!(c.heaviest.witness, Some(Witness::Grid(_))));
        for c in r.classes.iter().filter(|c| c.class != 1) {
            assert_eq!(c.heaviest.weight, c.capacity, "class {}", c.class + 1);
            assert_eq!(c.within_capacity(), Some(true));
        }
    }

    #[test]
    fn dominant_only_check() {
        let cfg = SearchConfig::default();
        let sq = load_instance(&data("squares-1p68.json")).unwrap();
        assert!(verify_dominant_only(&Pattern::from_entries(10, &[(7, 16)]), &sq.types, &cfg).unwrap());
        assert!(!verify_dominant_only(&Pattern::from_entries(10, &[(7, 15)]), &sq.types, &cfg).unwrap());
        let rect = load_instance(&data("rect-1p859.json")).unwrap();
        assert!(verify_dominant_only(&Pattern::from_entries(9, &[(3, 8)]), &rect.types, &cfg).unwrap());
        assert!(verify_dominant_only(&Pattern::from_entries(9, &[(2, 4), (3, 6)]), &rect.types, &cfg).unwrap());
    }
}
