//! JSON file formats. Every number that is not a count or an index is an exact string:
//! rationals as `"p/q"`, sizes as `"p/q + (a/b)e + (c/d)d"`.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeometryTag {
    Hypercube,
    Rectangle2d,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InstanceFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dimension: u32,
    pub geometry: GeometryTag,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub anchor_grid: Option<u32>,
    pub sublists: Vec<SublistFile>,
    pub opt_ratios: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SublistFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub height: Option<String>,
    pub alpha: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DominanceFile {
    /// 1-based type id of the smaller, dominating item.
    pub dominator: usize,
    pub dominated: usize,
    /// Grid multiplicity for hypercubes (`m × m`); rectangles use `m1 × m2`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m1: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m2: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertificateFile {
    /// Common multiplier applied to every lambda and mu entry (defaults to 1).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
    pub lambda: Vec<String>,
    pub mu: Vec<String>,
    #[serde(default)]
    pub dominance: Vec<DominanceFile>,
    #[serde(default)]
    pub exploratory: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub counts: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PatternSetFile {
    pub patterns: Vec<PatternFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimalEntryFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub counts: Vec<u64>,
    pub x: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrimalFile {
    pub ratio: String,
    pub entries: Vec<PrimalEntryFile>,
}

/// A placed item, either at exact coordinates or at anchor-grid indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PlacedFile {
    Exact {
        #[serde(rename = "type")]
        type_id: usize,
        x: String,
        y: String,
    },
    Grid {
        #[serde(rename = "type")]
        type_id: usize,
        ix: u32,
        iy: u32,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeEntryFile {
    pub counts: Vec<u64>,
    pub bins: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub placement: Option<Vec<PlacedFile>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemePrefixFile {
    pub prefix: usize,
    pub entries: Vec<SchemeEntryFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OptSchemeFile {
    pub prefixes: Vec<SchemePrefixFile>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HarmonicParamsFile {
    pub d: u32,
    pub y: Vec<String>,
    pub m: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<String>,
}
