//! The pattern LP, its dual, and the verification pipelines that turn certificates and
//! offline schemes into bound verdicts.

mod simplex;
mod verify;

pub use simplex::{solve_exact, LpProblem, LpSolution, Objective, Row};
pub use verify::{
    certify_pattern, verify_dual_certificate, verify_opt_scheme, BoundResult, Certification, PatternVerdict,
    PrefixReport, SchemeReport, Status,
};

use thiserror::Error;

use crate::exactnum::Rational;
use crate::model::{Instance, ModelError, Pattern, PrimalEntry, PrimalSolution, Sense};
use crate::packing::{PackingError, SearchConfig};
use crate::patterns::PatternError;

#[derive(Debug, Error)]
pub enum LpError {
    #[error("malformed LP: {0}")]
    Shape(String),
    #[error("LP is infeasible")]
    Infeasible,
    #[error("LP is unbounded")]
    Unbounded,
    #[error("pattern {0} is not certified feasible: {1}")]
    Uncertified(String, String),
    #[error("empty pattern set")]
    EmptyPatternSet,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Packing(#[from] PackingError),
    #[error(transparent)]
    Pattern(#[from] PatternError),
}

fn zero() -> Rational {
    Rational::from_integer(0.into())
}

fn one() -> Rational {
    Rational::from_integer(1.into())
}

fn check_patterns(inst: &Instance, patterns: &[Pattern]) -> Result<(), LpError> {
    if patterns.is_empty() {
        return Err(LpError::EmptyPatternSet);
    }
    let k = inst.num_types();
    for p in patterns {
        if p.len() != k {
            return Err(ModelError::DimensionMismatch { expected: k, got: p.len() }.into());
        }
        if p.is_empty() {
            return Err(ModelError::invalid("pattern", "pattern must contain at least one item").into());
        }
    }
    Ok(())
}

/// Certifies every pattern, then builds the primal LP over them.
pub fn build_primal(inst: &Instance, patterns: &[Pattern], cfg: &SearchConfig) -> Result<LpProblem, LpError> {
    check_patterns(inst, patterns)?;
    for p in patterns {
        let c = certify_pattern(inst, p, None, cfg)?;
        if !c.is_certified() {
            return Err(LpError::Uncertified(p.to_string(), c.to_string()));
        }
    }
    Ok(primal_lp(inst, patterns))
}

/// `min R` subject to coverage `Σ_p p_j x(p) ≥ α_j` and prefix budgets
/// `Σ_{i≤j} Σ_{p∈T_i} x(p) − optRatios[j]·R ≤ 0`. Variables are `x(p)` in order, then `R`.
pub fn primal_lp(inst: &Instance, patterns: &[Pattern]) -> LpProblem {
    let k = inst.num_types();
    let n = patterns.len();
    let mut rows = Vec::with_capacity(2 * k);
    for j in 0..k {
        let mut coeffs: Vec<Rational> = patterns.iter().map(|p| Rational::from_integer(p.counts[j].into())).collect();
        coeffs.push(zero());
        rows.push(Row { label: format!("coverage type {}", j + 1), coeffs, sense: Sense::AtLeast, rhs: inst.alpha[j].clone() });
    }
    for j in 0..k {
        let mut coeffs: Vec<Rational> =
            patterns.iter().map(|p| if p.class_index() <= j { one() } else { zero() }).collect();
        coeffs.push(-inst.opt_ratios[j].clone());
        rows.push(Row { label: format!("prefix {}", j + 1), coeffs, sense: Sense::AtMost, rhs: zero() });
    }
    let mut costs = vec![zero(); n];
    costs.push(one());
    let mut var_names: Vec<String> = (1..=n).map(|i| format!("x(p{i})")).collect();
    var_names.push("R".into());
    LpProblem { objective: Objective::Minimize, costs, var_names, rows }
}

/// `max Σ α_j λ_j` subject to `Σ_i p_i λ_i − Σ_{i≥j} ν_i ≤ 0` for every pattern `p ∈ T_j`
/// and `Σ_j optRatios[j]·ν_j ≤ 1`, with `ν = −μ`. Variables are `λ_1..λ_k, ν_1..ν_k`.
pub fn build_dual(inst: &Instance, patterns: &[Pattern]) -> Result<LpProblem, LpError> {
    check_patterns(inst, patterns)?;
    let k = inst.num_types();
    let mut rows = Vec::with_capacity(patterns.len() + 1);
    for (idx, p) in patterns.iter().enumerate() {
        let j = p.class_index();
        let mut coeffs: Vec<Rational> = p.counts.iter().map(|&c| Rational::from_integer(c.into())).collect();
        coeffs.extend((0..k).map(|i| if i >= j { -one() } else { zero() }));
        rows.push(Row { label: format!("pattern p{} ({p})", idx + 1), coeffs, sense: Sense::AtMost, rhs: zero() });
    }
    let mut coeffs = vec![zero(); k];
    coeffs.extend(inst.opt_ratios.iter().cloned());
    rows.push(Row { label: "normalization".into(), coeffs, sense: Sense::AtMost, rhs: one() });
    let mut costs = inst.alpha.clone();
    costs.extend(std::iter::repeat(zero()).take(k));
    let var_names = (1..=k).map(|i| format!("lambda{i}")).chain((1..=k).map(|i| format!("-mu{i}"))).collect();
    Ok(LpProblem { objective: Objective::Maximize, costs, var_names, rows })
}

/// Reads a primal LP solution back as pattern multiplicities and the ratio `R`.
pub fn primal_solution(patterns: &[Pattern], sol: &LpSolution) -> PrimalSolution {
    let n = patterns.len();
    PrimalSolution {
        entries: patterns
            .iter()
            .zip(&sol.x)
            .enumerate()
            .map(|(i, (p, x))| PrimalEntry { label: Some(format!("p{}", i + 1)), pattern: p.clone(), x: x.clone() })
            .collect(),
        ratio: sol.x[n].clone(),
    }
}

/// Splits a dual LP solution into `(λ, μ)`.
pub fn dual_solution(k: usize, sol: &LpSolution) -> (Vec<Rational>, Vec<Rational>) {
    (sol.x[..k].to_vec(), sol.x[k..2 * k].iter().map(|v| -v).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};
    use crate::model::{coverage_check_primal, load_certificate, load_instance, load_opt_scheme, load_pattern_set};
    use crate::patterns::{knapsack_report, KnapsackConfig};
    use std::path::PathBuf;

    fn data(name: &str) -> PathBuf {
        PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
    }

    #[test]
    fn rectangle_primal_and_dual_agree() {
        let inst = load_instance(&data("rect-1p859.json")).unwrap();
        let pats = load_pattern_set(&data("table7-patterns.json"), &inst).unwrap();
        let lp = build_primal(&inst, &pats, &SearchConfig::default()).unwrap();
        assert_eq!((lp.num_vars(), lp.num_rows()), (18, 18));
        let p = solve_exact(&lp).unwrap();
        assert_eq!(p.optimum, rat(768, 413));
        let cov = coverage_check_primal(&primal_solution(&pats, &p), &inst).unwrap();
        assert!(cov.all_hold());
        let d = solve_exact(&build_dual(&inst, &pats).unwrap()).unwrap();
        assert_eq!(d.optimum, p.optimum);
        let (lambda, mu) = dual_solution(9, &d);
        assert!(lambda.iter().all(|l| *l >= int(0)) && mu.iter().all(|m| *m <= int(0)));
    }

    #[test]
    fn empty_pattern_set_is_rejected() {
        let inst = load_instance(&data("rect-1p859.json")).unwrap();
        assert!(matches!(build_primal(&inst, &[], &SearchConfig::default()), Err(LpError::EmptyPatternSet)));
    }

    #[test]
    fn missing_last_class_makes_primal_infeasible() {
        let inst = load_instance(&data("rect-1p859.json")).unwrap();
        let pats: Vec<Pattern> = load_pattern_set(&data("table7-patterns.json"), &inst)
            .unwrap()
            .into_iter()
            .filter(|p| p.counts[8] == 0)
            .collect();
        assert!(matches!(solve_exact(&primal_lp(&inst, &pats)), Err(LpError::Infeasible)));
    }

    #[test]
    fn rectangle_certificate_is_proven() {
        let inst = load_instance(&data("rect-1p859.json")).unwrap();
        let cert = load_certificate(&data("table9-cert.json"), &inst).unwrap();
        let ks = knapsack_report(&inst, &cert, &KnapsackConfig::default()).unwrap();
        let r = verify_dual_certificate(&inst, &cert, &ks).unwrap();
        assert_eq!(r.status, Status::Proven);
        assert_eq!(r.bound, rat(768, 413));
        assert!(r.ledger.iter().find(|c| c.label == "normalization").unwrap().tight());
    }

    #[test]
    fn perturbed_certificates_are_refuted() {
        let inst = load_instance(&data("rect-1p859.json")).unwrap();
        let mut cert = load_certificate(&data("table9-cert.json"), &inst).unwrap();
        cert.lambda[0] = rat(-1, 413);
        let ks = knapsack_report(&inst, &cert, &KnapsackConfig::default()).unwrap();
        assert!(matches!(verify_dual_certificate(&inst, &cert, &ks).unwrap().status, Status::Refuted(_)));
    }

    #[test]
    fn square_certificate_fails_on_class_two() {
        let inst = load_instance(&data("squares-1p68.json")).unwrap();
        let mut cert = load_certificate(&data("table3-cert.json"), &inst).unwrap();
        let ks = knapsack_report(&inst, &cert, &KnapsackConfig::default()).unwrap();
        let r = verify_dual_certificate(&inst, &cert, &ks).unwrap();
        assert_eq!(r.bound, rat(569767590, 338989303));
        match &r.status {
            Status::Refuted(why) => assert!(why.starts_with("class 2"), "{why}"),
            s => panic!("unexpected {s}"),
        }
        cert.lambda[4] = &cert.lambda[4] * int(2);
        let ks = knapsack_report(&inst, &cert, &KnapsackConfig::default()).unwrap();
        let r = verify_dual_certificate(&inst, &cert, &ks).unwrap();
        assert!(r.ledger.iter().any(|c| c.label.starts_with("class 5") && !c.holds()));
    }

    #[test]
    fn rectangle_scheme_is_certified() {
        let inst = load_instance(&data("rect-1p859.json")).unwrap();
        let scheme = load_opt_scheme(&data("figure2-scheme.json"), &inst).unwrap();
        let r = verify_opt_scheme(&inst, &scheme, &SearchConfig::default()).unwrap();
        assert_eq!(r.status(), Status::Proven);
    }

    #[test]
    fn square_scheme_prefixes() {
        let inst = load_instance(&data("squares-1p68.json")).unwrap();
        let scheme = load_opt_scheme(&data("table2-scheme.json"), &inst).unwrap();
        let r = verify_opt_scheme(&inst, &scheme, &SearchConfig::default()).unwrap();
        for p in &r.prefixes {
            eprintln!("prefix {}: {}", p.prefix + 1, p.status());
            for v in &p.patterns {
                eprintln!("   {} -> {}", v.pattern, v.certification);
            }
        }
        let last = &r.prefixes[9].patterns[0].certification;
        assert!(matches!(last, Certification::Grid { free: 839, sand: 839, .. }));
        assert_eq!(r.prefixes[0].status(), Status::Proven);
    }
}
