use std::path::Path;

use num_traits::{One, Zero};
use serde::de::DeserializeOwned;

use super::{
    DualCertificate, Geometry, Instance, ItemType, ModelError, OptScheme, Pattern, PrimalEntry,
    PrimalSolution, SchemeEntry,
};
use crate::cli::formats::{
    CertificateFile, GeometryTag, InstanceFile, OptSchemeFile, PatternSetFile, PlacedFile, PrimalFile,
    SublistFile,
};
use crate::exactnum::{format_rational, parse_rational, PerturbedSize, Rational};
use crate::packing::{AnchorGrid, PlacedItem, Placement};
use crate::patterns::DominanceRule;

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, ModelError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| ModelError::Io { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| ModelError::Schema(format!("{}: {e}", path.display())))
}

fn size(field: &str, s: &str) -> Result<PerturbedSize, ModelError> {
    s.parse().map_err(|e| ModelError::invalid(field, format!("{e}")))
}

fn rational(field: &str, s: &str) -> Result<Rational, ModelError> {
    parse_rational(s).map_err(|e| ModelError::invalid(field, format!("{e}")))
}

pub fn parse_instance(file: &InstanceFile) -> Result<Instance, ModelError> {
    let geometry = match file.geometry {
        GeometryTag::Hypercube => Geometry::Hypercube,
        GeometryTag::Rectangle2d => Geometry::Rectangle2d,
    };
    let mut types = Vec::with_capacity(file.sublists.len());
    let mut alpha = Vec::with_capacity(file.sublists.len());
    for (i, sub) in file.sublists.iter().enumerate() {
        let id = i + 1;
        let field = |f: &str| format!("sublists[{id}].{f}");
        let t = match (geometry, &sub.side, &sub.width, &sub.height) {
            (Geometry::Hypercube, Some(side), None, None) => ItemType::square(id, size(&field("side"), side)?),
            (Geometry::Rectangle2d, None, Some(w), Some(h)) => ItemType {
                id,
                width: size(&field("width"), w)?,
                height: size(&field("height"), h)?,
            },
            (Geometry::Hypercube, ..) => {
                return Err(ModelError::invalid(field("side"), "hypercube sublists take exactly a 'side'"))
            }
            (Geometry::Rectangle2d, ..) => {
                return Err(ModelError::invalid(field("width"), "rectangle sublists take 'width' and 'height'"))
            }
        };
        types.push(t);
        alpha.push(rational(&field("alpha"), &sub.alpha)?);
    }
    let opt_ratios = file
        .opt_ratios
        .iter()
        .enumerate()
        .map(|(j, s)| rational(&format!("optRatios[{}]", j + 1), s))
        .collect::<Result<Vec<_>, _>>()?;
    if let Some(g) = file.anchor_grid {
        if g < 2 {
            return Err(ModelError::invalid("anchorGrid", "resolution must be at least 2"));
        }
    }
    let inst = Instance {
        name: file.name.clone().unwrap_or_default(),
        dimension: file.dimension,
        geometry,
        anchor_grid: file.anchor_grid,
        types,
        alpha,
        opt_ratios,
    };
    inst.validate()?;
    Ok(inst)
}

pub fn instance_to_file(inst: &Instance) -> InstanceFile {
    let sublists = inst
        .types
        .iter()
        .zip(&inst.alpha)
        .map(|(t, a)| match inst.geometry {
            Geometry::Hypercube => SublistFile {
                side: Some(t.width.to_string()),
                width: None,
                height: None,
                alpha: format_rational(a),
            },
            Geometry::Rectangle2d => SublistFile {
                side: None,
                width: Some(t.width.to_string()),
                height: Some(t.height.to_string()),
                alpha: format_rational(a),
            },
        })
        .collect();
    InstanceFile {
        name: if inst.name.is_empty() { None } else { Some(inst.name.clone()) },
        dimension: inst.dimension,
        geometry: match inst.geometry {
            Geometry::Hypercube => GeometryTag::Hypercube,
            Geometry::Rectangle2d => GeometryTag::Rectangle2d,
        },
        anchor_grid: inst.anchor_grid,
        sublists,
        opt_ratios: inst.opt_ratios.iter().map(format_rational).collect(),
    }
}

pub fn load_instance(path: &Path) -> Result<Instance, ModelError> {
    parse_instance(&read_json(path)?)
}

fn check_type_id(id: usize, k: usize, field: &str) -> Result<usize, ModelError> {
    if id == 0 || id > k {
        return Err(ModelError::invalid(field, format!("type id {id} out of range 1..={k}")));
    }
    Ok(id - 1)
}

fn pattern(counts: &[u64], k: usize, field: &str) -> Result<Pattern, ModelError> {
    if counts.len() != k {
        return Err(ModelError::invalid(field, format!("expected {k} counts, got {}", counts.len())));
    }
    Pattern::new(counts.to_vec()).map_err(|_| ModelError::invalid(field, "empty pattern"))
}

pub fn parse_certificate(file: &CertificateFile, inst: &Instance) -> Result<DualCertificate, ModelError> {
    let k = inst.num_types();
    let scale = match &file.scale {
        Some(s) => rational("scale", s)?,
        None => Rational::one(),
    };
    if scale <= Rational::zero() {
        return Err(ModelError::invalid("scale", "must be positive"));
    }
    if file.lambda.len() != k || file.mu.len() != k {
        return Err(ModelError::invalid(
            "lambda/mu",
            format!("expected {k} entries each, got {} and {}", file.lambda.len(), file.mu.len()),
        ));
    }
    let vec = |name: &str, v: &[String]| -> Result<Vec<Rational>, ModelError> {
        v.iter()
            .enumerate()
            .map(|(i, s)| rational(&format!("{name}[{}]", i + 1), s).map(|r| r * &scale))
            .collect()
    };
    let mut dominance = Vec::with_capacity(file.dominance.len());
    for (i, d) in file.dominance.iter().enumerate() {
        let field = format!("dominance[{}]", i + 1);
        let (m1, m2) = match (d.m, d.m1, d.m2) {
            (Some(m), None, None) => (m, m),
            (None, m1, m2) => (m1.unwrap_or(1), m2.unwrap_or(1)),
            _ => return Err(ModelError::invalid(field, "give either 'm' or 'm1'/'m2'")),
        };
        if m1 == 0 || m2 == 0 {
            return Err(ModelError::invalid(field, "multiplicities must be positive"));
        }
        dominance.push(DominanceRule {
            dominator: check_type_id(d.dominator, k, &field)?,
            dominated: check_type_id(d.dominated, k, &field)?,
            m1,
            m2,
        });
    }
    Ok(DualCertificate {
        lambda: vec("lambda", &file.lambda)?,
        mu: vec("mu", &file.mu)?,
        dominance,
        exploratory: file.exploratory,
    })
}

pub fn load_certificate(path: &Path, inst: &Instance) -> Result<DualCertificate, ModelError> {
    parse_certificate(&read_json(path)?, inst)
}

pub fn load_pattern_set(path: &Path, inst: &Instance) -> Result<Vec<Pattern>, ModelError> {
    let file: PatternSetFile = read_json(path)?;
    file.patterns
        .iter()
        .enumerate()
        .map(|(i, p)| pattern(&p.counts, inst.num_types(), &format!("patterns[{}]", i + 1)))
        .collect()
}

pub fn parse_primal(file: &PrimalFile, inst: &Instance) -> Result<PrimalSolution, ModelError> {
    let entries = file
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let field = format!("entries[{}]", i + 1);
            Ok(PrimalEntry {
                label: e.label.clone(),
                pattern: pattern(&e.counts, inst.num_types(), &field)?,
                x: rational(&format!("{field}.x"), &e.x)?,
            })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    Ok(PrimalSolution { entries, ratio: rational("ratio", &file.ratio)? })
}

pub fn load_primal(path: &Path, inst: &Instance) -> Result<PrimalSolution, ModelError> {
    parse_primal(&read_json(path)?, inst)
}

fn parse_placement(items: &[PlacedFile], inst: &Instance, field: &str) -> Result<Placement, ModelError> {
    let k = inst.num_types();
    let mut out = Vec::with_capacity(items.len());
    for it in items {
        match it {
            PlacedFile::Exact { type_id, x, y } => out.push(PlacedItem {
                type_idx: check_type_id(*type_id, k, field)?,
                x: size(field, x)?,
                y: size(field, y)?,
            }),
            PlacedFile::Grid { type_id, ix, iy } => {
                let g = inst
                    .anchor_grid
                    .ok_or_else(|| ModelError::invalid(field, "grid positions need an instance anchorGrid"))?;
                let unit = AnchorGrid::new(g, inst.dimension).unit();
                out.push(PlacedItem {
                    type_idx: check_type_id(*type_id, k, field)?,
                    x: unit.times(*ix as i64),
                    y: unit.times(*iy as i64),
                });
            }
        }
    }
    Ok(Placement { items: out })
}

pub fn parse_opt_scheme(file: &OptSchemeFile, inst: &Instance) -> Result<OptScheme, ModelError> {
    let k = inst.num_types();
    let mut prefixes: Vec<Option<Vec<SchemeEntry>>> = vec![None; k];
    for pf in &file.prefixes {
        let j = check_type_id(pf.prefix, k, "prefixes.prefix")?;
        if prefixes[j].is_some() {
            return Err(ModelError::invalid("prefixes", format!("prefix {} listed twice", pf.prefix)));
        }
        let mut entries = Vec::with_capacity(pf.entries.len());
        for (i, e) in pf.entries.iter().enumerate() {
            let field = format!("prefix {} entries[{}]", pf.prefix, i + 1);
            let bins = rational(&format!("{field}.bins"), &e.bins)?;
            if bins < Rational::zero() {
                return Err(ModelError::invalid(field, "negative bin count"));
            }
            entries.push(SchemeEntry {
                pattern: pattern(&e.counts, k, &field)?,
                bins,
                placement: e.placement.as_deref().map(|p| parse_placement(p, inst, &field)).transpose()?,
            });
        }
        prefixes[j] = Some(entries);
    }
    let prefixes = prefixes
        .into_iter()
        .enumerate()
        .map(|(j, p)| p.ok_or_else(|| ModelError::invalid("prefixes", format!("prefix {} missing", j + 1))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(OptScheme { prefixes })
}

pub fn load_opt_scheme(path: &Path, inst: &Instance) -> Result<OptScheme, ModelError> {
    parse_opt_scheme(&read_json(path)?, inst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn squares_file() -> InstanceFile {
        serde_json::from_str(
            r#"{
            "dimension": 2, "geometry": "hypercube", "anchorGrid": 4,
            "sublists": [
                {"side": "1/4 - e", "alpha": "3"},
                {"side": "1/2 + (1/2)e", "alpha": "1"}
            ],
            "optRatios": ["3/16", "1"]
        }"#,
        )
        .unwrap()
    }

    #[test]
    fn parses_and_round_trips() {
        let f = squares_file();
        let inst = parse_instance(&f).unwrap();
        assert_eq!(inst.alpha, vec![rat(3, 1), rat(1, 1)]);
        assert_eq!(instance_to_file(&inst), f);
    }

    #[test]
    fn rejects_decreasing_opt_ratios() {
        let mut f = squares_file();
        f.opt_ratios = vec!["1/2".into(), "1/3".into()];
        let err = parse_instance(&f).unwrap_err().to_string();
        assert!(err.contains("optRatios not nondecreasing"), "{err}");
    }

    #[test]
    fn rejects_oversized_items() {
        let mut f = squares_file();
        f.sublists[1].side = Some("1 + e".into());
        let err = parse_instance(&f).unwrap_err().to_string();
        assert!(err.contains("sublists[2].width"), "{err}");
    }

    #[test]
    fn rejects_bad_rational() {
        let mut f = squares_file();
        f.sublists[0].alpha = "3/x".into();
        assert!(parse_instance(&f).unwrap_err().to_string().contains("sublists[1].alpha"));
    }

    #[test]
    fn certificate_scale_and_rules() {
        let inst = parse_instance(&squares_file()).unwrap();
        let f: CertificateFile = serde_json::from_str(
            r#"{"scale": "1/7", "lambda": ["1", "4"], "mu": ["-2", "-3"],
                "dominance": [{"dominator": 1, "dominated": 2, "m": 2}]}"#,
        )
        .unwrap();
        let c = parse_certificate(&f, &inst).unwrap();
        assert_eq!(c.lambda[1], rat(4, 7));
        assert_eq!(c.mu[0], rat(-2, 7));
        assert_eq!(c.dominance[0], DominanceRule { dominator: 0, dominated: 1, m1: 2, m2: 2 });
        let bad: CertificateFile =
            serde_json::from_str(r#"{"lambda": ["1", "4"], "mu": ["-2", "-3"], "dominance": [{"dominator": 3, "dominated": 1}]}"#)
                .unwrap();
        assert!(parse_certificate(&bad, &inst).is_err());
    }
}
