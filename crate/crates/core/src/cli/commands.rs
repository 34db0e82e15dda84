use std::error::Error;
use std::fmt::Write as _;
use std::path::Path;

use serde_json::{json, Value};

use super::formats::HarmonicParamsFile;
use super::{BoundKind, Command, Ctx, LpForm, Outcome, EXIT_PROVEN, EXIT_REFUTED, EXIT_UNPROVEN};
use crate::exactnum::{format_rational, parse_rational, to_decimal, Rational};
use crate::harmonic::{
    b1_optimize, b2_optimize, closed_form_bound, equalized, explore, worst_case_terms, BClassOptimum, BoundValue,
    HarmonicParams,
};
use crate::lp::{
    build_dual, certify_pattern, dual_solution, primal_lp, solve_exact, verify_dual_certificate, verify_opt_scheme,
    Certification, LpError, Status,
};
use crate::model::{
    coverage_check_primal, load_certificate, load_instance, load_opt_scheme, load_pattern_set, load_primal, read_json,
    ConstraintCheck, Instance, Pattern,
};
use crate::patterns::{check_dominance, knapsack_report, KnapsackReport};

type CmdResult = Result<Outcome, Box<dyn Error>>;

pub(super) fn dispatch(cmd: &Command, ctx: &Ctx) -> CmdResult {
    match cmd {
        Command::VerifyDual { instance, certificate } => verify_dual(ctx, instance, certificate, false, None),
        Command::Explore { instance, certificate, patterns } => {
            verify_dual(ctx, instance, certificate, true, patterns.as_deref())
        }
        Command::VerifyOpt { instance, scheme } => verify_opt(ctx, instance, scheme),
        Command::VerifyPrimal { instance, primal } => verify_primal(ctx, instance, primal),
        Command::SolveLp { instance, patterns, form } => solve_lp(ctx, instance, patterns, *form),
        Command::Bound(b) => match &b.which {
            BoundKind::Harmonic { d, h, table6 } => harmonic(ctx, *d, *h, *table6),
            BoundKind::WorstCase { params } => worst_case(ctx, params),
            BoundKind::B1 => bclass(ctx, "B1", b1_optimize(&ctx.tol)?),
            BoundKind::B2 => bclass(ctx, "B2", b2_optimize(&ctx.tol)?),
            BoundKind::HarmonicExplore { d, h_max } => harmonic_explore(ctx, *d, *h_max as usize),
        },
    }
}

fn approx(r: &Rational, places: usize) -> String {
    format!("{} ≈ {}", format_rational(r), to_decimal(r, places))
}

fn check_json(c: &ConstraintCheck) -> Value {
    json!({
        "label": c.label,
        "lhs": format_rational(&c.lhs),
        "sense": c.sense.to_string(),
        "rhs": format_rational(&c.rhs),
        "holds": c.holds(),
        "tight": c.tight(),
    })
}

fn status_json(s: &Status) -> Value {
    let (name, reason) = match s {
        Status::Proven => ("proven", None),
        Status::Refuted(r) => ("refuted", Some(r)),
        Status::Unproven(r) => ("unproven", Some(r)),
    };
    json!({ "status": name, "reason": reason })
}

fn bound_json(b: &BoundValue) -> Value {
    json!({
        "exact": b.exact.as_ref().map(format_rational),
        "lo": format_rational(b.lo()),
        "hi": format_rational(b.hi()),
    })
}

fn types_1based(v: &[usize]) -> String {
    v.iter().map(|t| format!("s{}", t + 1)).collect::<Vec<_>>().join(",")
}

fn load_inst(ctx: &Ctx, p: &Path) -> Result<Instance, Box<dyn Error>> {
    Ok(load_instance(&ctx.resolve(p))?)
}

fn class_lines(text: &mut String, ks: &KnapsackReport) -> Vec<Value> {
    let _ = writeln!(text, "knapsack classes:");
    let mut out = Vec::new();
    for c in &ks.classes {
        let h = &c.heaviest;
        let verdict = match c.within_capacity() {
            Some(true) => "ok",
            Some(false) => "OVER CAPACITY",
            None => "undecided",
        };
        let _ = writeln!(
            text,
            "  class {:>2} [{}]: heaviest {} weight {} capacity {} ({}) {verdict}",
            c.class + 1,
            types_1based(&c.reduced),
            h.best,
            format_rational(&h.weight),
            format_rational(&c.capacity),
            h.provenance
        );
        out.push(json!({
            "class": c.class + 1,
            "reducedTypes": c.reduced.iter().map(|t| t + 1).collect::<Vec<_>>(),
            "heaviest": h.best.to_string(),
            "ties": h.ties.iter().map(|p| p.to_string()).collect::<Vec<_>>(),
            "weight": format_rational(&h.weight),
            "upper": format_rational(&h.upper),
            "capacity": format_rational(&c.capacity),
            "provenance": h.provenance.to_string(),
            "withinCapacity": c.within_capacity(),
        }));
    }
    out
}

fn verify_dual(ctx: &Ctx, instance: &Path, certificate: &Path, exploratory: bool, conjecture: Option<&Path>) -> CmdResult {
    let inst = load_inst(ctx, instance)?;
    let cert = load_certificate(&ctx.resolve(certificate), &inst)?;
    let ks = knapsack_report(&inst, &cert, &ctx.knapsack)?;
    let r = verify_dual_certificate(&inst, &cert, &ks)?;
    let mut text = String::new();
    let _ = writeln!(text, "instance {}: {} item types", inst.name, inst.num_types());
    let _ = writeln!(text, "dominance rules:");
    let mut rules = Vec::new();
    for rule in &cert.dominance {
        let ok = check_dominance(rule, &inst.types, &cert.lambda)?;
        let _ = writeln!(text, "  {rule}: {}", if ok { "holds" } else { "FAILS" });
        rules.push(json!({ "rule": rule.to_string(), "holds": ok }));
    }
    let classes = class_lines(&mut text, &ks);
    let mut comparisons = Vec::new();
    if let Some(p) = conjecture {
        let pats = load_pattern_set(&ctx.resolve(p), &inst)?;
        let _ = writeln!(text, "conjectured heaviest patterns:");
        for p in &pats {
            let j = p.class_index();
            let found = ks.classes[j].best_or_ties().contains(&p);
            let _ = writeln!(text, "  class {:>2}: {p} {}", j + 1, if found { "reproduced" } else { "not reproduced" });
            comparisons.push(json!({ "class": j + 1, "pattern": p.to_string(), "reproduced": found }));
        }
    }
    let _ = writeln!(text, "ledger:");
    for c in &r.ledger {
        let _ = writeln!(text, "  {c}");
    }
    for n in &r.notes {
        let _ = writeln!(text, "note: {n}");
    }
    let status = match r.status {
        Status::Proven if exploratory => Status::Unproven("exploratory run, maximality is not proven".into()),
        s => s,
    };
    let _ = writeln!(text, "bound = {}", approx(&r.bound, ctx.precision));
    let _ = writeln!(text, "status: {status}");
    let json = json!({
        "instance": inst.name,
        "bound": format_rational(&r.bound),
        "boundDecimal": to_decimal(&r.bound, ctx.precision),
        "dominance": rules,
        "classes": classes,
        "conjecture": comparisons,
        "ledger": r.ledger.iter().map(check_json).collect::<Vec<_>>(),
        "notes": r.notes,
        "verdict": status_json(&status),
    });
    Ok(Outcome { code: status.exit_code(), text, json })
}

fn verify_opt(ctx: &Ctx, instance: &Path, scheme: &Path) -> CmdResult {
    let inst = load_inst(ctx, instance)?;
    let sch = load_opt_scheme(&ctx.resolve(scheme), &inst)?;
    let rep = verify_opt_scheme(&inst, &sch, &ctx.search)?;
    let mut text = String::new();
    let _ = writeln!(text, "instance {}: {} prefixes", inst.name, rep.prefixes.len());
    let mut prefixes = Vec::new();
    for p in &rep.prefixes {
        let s = p.status();
        let _ = writeln!(text, "prefix {:>2}: {s}", p.prefix + 1);
        let _ = writeln!(text, "  {}", p.ratio);
        for v in &p.patterns {
            let _ = writeln!(text, "  {} x {}: {}", format_rational(&v.bins), v.pattern, v.certification);
        }
        for c in p.coverage.iter().filter(|c| !c.holds()) {
            let _ = writeln!(text, "  {c}");
        }
        for e in &p.errors {
            let _ = writeln!(text, "  error: {e}");
        }
        prefixes.push(json!({
            "prefix": p.prefix + 1,
            "ratio": check_json(&p.ratio),
            "coverage": p.coverage.iter().map(check_json).collect::<Vec<_>>(),
            "patterns": p.patterns.iter().map(|v| json!({
                "pattern": v.pattern.to_string(),
                "bins": format_rational(&v.bins),
                "certified": v.certification.is_certified(),
                "certification": v.certification.to_string(),
            })).collect::<Vec<_>>(),
            "errors": p.errors,
            "verdict": status_json(&s),
        }));
    }
    let status = rep.status();
    let _ = writeln!(text, "status: {status}");
    let json = json!({ "instance": inst.name, "prefixes": prefixes, "verdict": status_json(&status) });
    Ok(Outcome { code: status.exit_code(), text, json })
}

fn verify_primal(ctx: &Ctx, instance: &Path, primal: &Path) -> CmdResult {
    let inst = load_inst(ctx, instance)?;
    let sol = load_primal(&ctx.resolve(primal), &inst)?;
    let cov = coverage_check_primal(&sol, &inst)?;
    let mut text = String::new();
    let _ = writeln!(text, "instance {}: {} patterns, R = {}", inst.name, sol.entries.len(), approx(&sol.ratio, ctx.precision));
    let mut patterns = Vec::new();
    let mut status = Status::Proven;
    for e in &sol.entries {
        let c = certify_pattern(&inst, &e.pattern, None, &ctx.search)?;
        let name = e.label.clone().unwrap_or_else(|| e.pattern.to_string());
        let _ = writeln!(text, "  {name}: x = {} {}: {c}", format_rational(&e.x), e.pattern);
        match &c {
            Certification::Infeasible(why) if !matches!(status, Status::Refuted(_)) => {
                status = Status::Refuted(format!("pattern {} does not fit: {why}", e.pattern));
            }
            Certification::Unknown(why) if status.is_proven() => {
                status = Status::Unproven(format!("pattern {} not certified: {why}", e.pattern));
            }
            _ => {}
        }
        patterns.push(json!({
            "label": e.label,
            "pattern": e.pattern.to_string(),
            "x": format_rational(&e.x),
            "certified": c.is_certified(),
            "certification": c.to_string(),
        }));
    }
    let _ = writeln!(text, "constraints:");
    for c in &cov.checks {
        let _ = writeln!(text, "  {c}");
    }
    if let Some(bad) = cov.failures().next() {
        status = Status::Refuted(bad.to_string());
    }
    let _ = writeln!(text, "all constraints tight: {}", if cov.all_tight() { "yes" } else { "no" });
    let _ = writeln!(text, "status: {status}");
    let json = json!({
        "instance": inst.name,
        "ratio": format_rational(&sol.ratio),
        "patterns": patterns,
        "constraints": cov.checks.iter().map(check_json).collect::<Vec<_>>(),
        "allTight": cov.all_tight(),
        "verdict": status_json(&status),
    });
    Ok(Outcome { code: status.exit_code(), text, json })
}

/// Types that no pattern of the set contains.
fn uncovered(inst: &Instance, pats: &[Pattern]) -> Vec<usize> {
    (0..inst.num_types()).filter(|&j| pats.iter().all(|p| p.counts[j] == 0)).collect()
}

fn solve_lp(ctx: &Ctx, instance: &Path, patterns: &Path, form: LpForm) -> CmdResult {
    let inst = load_inst(ctx, instance)?;
    let pats = load_pattern_set(&ctx.resolve(patterns), &inst)?;
    let mut text = String::new();
    let mut json = json!({ "instance": inst.name, "patterns": pats.len() });
    let mut uncertified = Vec::new();
    for p in &pats {
        let c = certify_pattern(&inst, p, None, &ctx.search)?;
        if !c.is_certified() {
            let _ = writeln!(text, "pattern {p} not certified: {c}");
            uncertified.push(p.to_string());
        }
    }
    let infeasible = |text: &mut String, which: &str| -> Outcome {
        let missing = uncovered(&inst, &pats);
        let _ = writeln!(text, "{which} LP is infeasible");
        for j in &missing {
            let _ = writeln!(text, "  coverage type {} cannot be met: no pattern contains s{}", j + 1, j + 1);
        }
        let _ = writeln!(text, "status: REFUTED");
        Outcome {
            code: EXIT_REFUTED,
            text: std::mem::take(text),
            json: json!({ "infeasible": which, "uncoveredTypes": missing.iter().map(|j| j + 1).collect::<Vec<_>>() }),
        }
    };
    let mut primal_opt = None;
    if form != LpForm::Dual {
        match solve_exact(&primal_lp(&inst, &pats)) {
            Ok(s) => {
                let r = s.x[pats.len()].clone();
                let _ = writeln!(text, "primal: R = {}", approx(&r, ctx.precision));
                let mut xs = Vec::new();
                for (i, (p, x)) in pats.iter().zip(&s.x).enumerate() {
                    if x != &Rational::from_integer(0.into()) {
                        let _ = writeln!(text, "  x(p{}) = {} for {p}", i + 1, format_rational(x));
                    }
                    xs.push(json!({ "label": format!("p{}", i + 1), "pattern": p.to_string(), "x": format_rational(x) }));
                }
                json["primal"] = json!({ "ratio": format_rational(&r), "x": xs, "pivots": s.pivots });
                primal_opt = Some(r);
            }
            Err(LpError::Infeasible) => return Ok(infeasible(&mut text, "primal")),
            Err(e) => return Err(e.into()),
        }
    }
    let mut dual_opt = None;
    if form != LpForm::Primal {
        match solve_exact(&build_dual(&inst, &pats)?) {
            Ok(s) => {
                let (lambda, mu) = dual_solution(inst.num_types(), &s);
                let _ = writeln!(text, "dual: objective = {}", approx(&s.optimum, ctx.precision));
                for (j, (l, m)) in lambda.iter().zip(&mu).enumerate() {
                    let _ = writeln!(text, "  lambda{} = {}  mu{} = {}", j + 1, format_rational(l), j + 1, format_rational(m));
                }
                json["dual"] = json!({
                    "objective": format_rational(&s.optimum),
                    "lambda": lambda.iter().map(format_rational).collect::<Vec<_>>(),
                    "mu": mu.iter().map(format_rational).collect::<Vec<_>>(),
                });
                dual_opt = Some(s.optimum);
            }
            Err(LpError::Unbounded) => return Ok(infeasible(&mut text, "dual unbounded, primal")),
            Err(e) => return Err(e.into()),
        }
    }
    let mut status = if uncertified.is_empty() {
        Status::Proven
    } else {
        Status::Unproven(format!("{} patterns not certified feasible", uncertified.len()))
    };
    if let (Some(p), Some(d)) = (&primal_opt, &dual_opt) {
        let equal = p == d;
        let _ = writeln!(text, "strong duality: {}", if equal { "primal = dual" } else { "MISMATCH" });
        json["strongDuality"] = json!(equal);
        if !equal {
            status = Status::Refuted(format!("primal {} differs from dual {}", format_rational(p), format_rational(d)));
        }
    }
    let _ = writeln!(text, "status: {status}");
    json["uncertified"] = json!(uncertified);
    json["verdict"] = status_json(&status);
    Ok(Outcome { code: status.exit_code(), text, json })
}

fn harmonic(ctx: &Ctx, d: Option<u32>, h: Option<u64>, table6: bool) -> CmdResult {
    let mut text = String::new();
    let mut rows = Vec::new();
    if table6 {
        let _ = writeln!(text, "Harmonic-type lower bounds");
        let _ = writeln!(text, "{:>4}  {:>14}  {}", "d", "exact", "decimal");
        for d in 1..=6 {
            let v = closed_form_bound(d);
            let _ = writeln!(text, "{d:>4}  {:>14}  {}", format_rational(&v), to_decimal(&v, ctx.precision));
            rows.push(json!({ "d": d, "bound": format_rational(&v), "decimal": to_decimal(&v, ctx.precision) }));
        }
        let _ = writeln!(text, "{:>4}  {:>14}  {}", "inf", "3", to_decimal(&Rational::from_integer(3.into()), ctx.precision));
        rows.push(json!({ "d": "inf", "bound": "3" }));
        if d.is_none() {
            return Ok(Outcome { code: EXIT_PROVEN, text, json: json!({ "table6": rows }) });
        }
    }
    let d = d.ok_or("bound harmonic needs --d or --table6")?;
    let v = closed_form_bound(d);
    let _ = writeln!(text, "closed form (d = {d}): bound = {}", approx(&v, ctx.precision));
    let mut json = json!({ "d": d, "bound": format_rational(&v), "decimal": to_decimal(&v, ctx.precision) });
    if !rows.is_empty() {
        json["table6"] = json!(rows);
    }
    if let Some(h) = h {
        let e = equalized(d, h as usize, &ctx.tol)?;
        let _ = writeln!(text, "equalized, h = {h}: R = {}", e.bound.render(ctx.precision));
        for (i, (y, m)) in e.params.y.iter().zip(&e.params.m).enumerate() {
            let _ = writeln!(text, "  y{} ≈ {}  m{} ≈ {}", i + 1, to_decimal(y, ctx.precision), i + 1, to_decimal(m, ctx.precision));
        }
        for (label, t) in worst_case_terms(&e.params)? {
            let _ = writeln!(text, "  {label} = {}", to_decimal(&t, ctx.precision));
        }
        json["equalized"] = json!({
            "h": h,
            "ratio": bound_json(&e.bound),
            "y": e.params.y.iter().map(format_rational).collect::<Vec<_>>(),
            "m": e.params.m.iter().map(format_rational).collect::<Vec<_>>(),
        });
    }
    Ok(Outcome { code: EXIT_PROVEN, text, json })
}

fn worst_case(ctx: &Ctx, params: &Path) -> CmdResult {
    let f: HarmonicParamsFile = read_json(&ctx.resolve(params))?;
    let parse = |v: &[String]| v.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>, _>>();
    let p = HarmonicParams {
        d: f.d,
        y: parse(&f.y)?,
        m: parse(&f.m)?,
        lambda: f.lambda.as_deref().map(parse_rational).transpose()?,
    };
    let terms = worst_case_terms(&p)?;
    let mut text = String::new();
    for (label, t) in &terms {
        let _ = writeln!(text, "{label} = {}", approx(t, ctx.precision));
    }
    let max = terms.iter().map(|(_, v)| v).max().expect("h ≥ 1").clone();
    let _ = writeln!(text, "bound = {}", approx(&max, ctx.precision));
    let json = json!({
        "terms": terms.iter().map(|(l, v)| json!({ "label": l, "value": format_rational(v) })).collect::<Vec<_>>(),
        "bound": format_rational(&max),
    });
    Ok(Outcome { code: EXIT_PROVEN, text, json })
}

fn bclass(ctx: &Ctx, name: &str, o: BClassOptimum) -> CmdResult {
    let [a, b, c] = &o.quadratic;
    let mut text = String::new();
    let _ = writeln!(text, "{name}: bounds meet where {a}a^2 + ({b})a + ({c}) = 0");
    let _ = writeln!(text, "alpha* = {} in {}", o.surd, o.alpha.render(ctx.precision));
    let _ = writeln!(text, "bound in {}", o.bound.render(ctx.precision));
    let _ = writeln!(text, "bound > {}", to_decimal(&truncate(o.bound.lo(), 4), 4));
    let json = json!({
        "class": name,
        "quadratic": [a.to_string(), b.to_string(), c.to_string()],
        "alphaSurd": { "p": o.surd.p.to_string(), "q": o.surd.q.to_string(), "r": o.surd.r.to_string() },
        "alpha": bound_json(&o.alpha),
        "bound": bound_json(&o.bound),
    });
    Ok(Outcome { code: EXIT_PROVEN, text, json })
}

fn truncate(r: &Rational, places: usize) -> Rational {
    let s = Rational::from_integer(num_traits::pow(num_bigint::BigInt::from(10), places));
    (r * &s).floor() / s
}

fn harmonic_explore(ctx: &Ctx, d: u32, h_max: usize) -> CmdResult {
    let rs = explore(d, h_max, &ctx.tol)?;
    let cf = closed_form_bound(d);
    let mut text = String::new();
    let _ = writeln!(text, "equalized ratios, d = {d} (numerical exploration, not a proof)");
    let mut rows = Vec::new();
    for e in &rs {
        let _ = writeln!(text, "  h = {:>3}: R = {}", e.h, e.bound.render(ctx.precision));
        rows.push(json!({ "h": e.h, "ratio": bound_json(&e.bound) }));
    }
    let _ = writeln!(text, "  limit:   R = {}", approx(&cf, ctx.precision));
    let _ = writeln!(text, "status: UNPROVEN (exploration only)");
    let json = json!({
        "d": d,
        "rows": rows,
        "limit": format_rational(&cf),
        "verdict": status_json(&Status::Unproven("exploration only".into())),
    });
    Ok(Outcome { code: EXIT_UNPROVEN, text, json })
}
