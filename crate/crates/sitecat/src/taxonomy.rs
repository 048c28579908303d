//! The NAICS classification scheme and the SIC crosswalk.
//!
//! The label space of the classifier is the 21 top-level categories of the
//! 1997 North American Industrial Classification System. Full NAICS codes
//! run up to six digits; [`Taxonomy::generalize`] folds any of them up to
//! the owning top-level category. Three top-level categories are ranges
//! ("31-33", "44-45", "48-49") covering several two-digit prefixes.
//!
//! Legacy SIC codes are mapped through a user-supplied crosswalk file; the
//! crosswalk tables themselves are published data and are not bundled.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Errors from code validation, generalization, and crosswalk parsing.
#[derive(Debug, Error)]
pub enum TaxonomyError {
    #[error("invalid category code {0:?}: must be 2-6 digits or a range label (31-33, 44-45, 48-49)")]
    InvalidCode(String),

    #[error("unknown NAICS prefix {0:?}: not a top-level category prefix")]
    UnknownPrefix(String),

    #[error("crosswalk parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("crosswalk io error: {0}")]
    Io(#[from] std::io::Error),
}

/// A NAICS category code: 2-6 digits, or one of the three top-level range
/// labels ("31-33", "44-45", "48-49"). Range labels are the canonical form
/// for the three multi-prefix top-level categories.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CategoryCode(String);

const RANGE_LABELS: [&str; 3] = ["31-33", "44-45", "48-49"];

impl CategoryCode {
    pub fn new(raw: impl Into<String>) -> Result<Self, TaxonomyError> {
        let raw = raw.into();
        let digits = raw.len() >= 2 && raw.len() <= 6 && raw.bytes().all(|b| b.is_ascii_digit());
        if digits || RANGE_LABELS.contains(&raw.as_str()) {
            Ok(CategoryCode(raw))
        } else {
            Err(TaxonomyError::InvalidCode(raw))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// True for the three hyphenated range labels.
    pub fn is_range_label(&self) -> bool {
        RANGE_LABELS.contains(&self.0.as_str())
    }

    /// The two-digit prefix used for generalization; range labels have no
    /// single prefix and return None.
    pub fn prefix(&self) -> Option<&str> {
        if self.is_range_label() {
            None
        } else {
            Some(&self.0[..2])
        }
    }
}

impl fmt::Display for CategoryCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl FromStr for CategoryCode {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CategoryCode::new(s)
    }
}

impl TryFrom<String> for CategoryCode {
    type Error = TaxonomyError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        CategoryCode::new(s)
    }
}

impl From<CategoryCode> for String {
    fn from(c: CategoryCode) -> String {
        c.0
    }
}

/// The 21 top-level categories with display names, in code order.
const TOP_LEVELS: [(&str, &str); 21] = [
    ("11", "Agriculture, Forestry, Fishing, and Hunting"),
    ("21", "Mining"),
    ("22", "Utilities"),
    ("23", "Construction"),
    ("31-33", "Manufacturing"),
    ("42", "Wholesale Trade"),
    ("44-45", "Retail Trade"),
    ("48-49", "Transportation and Warehousing"),
    ("51", "Information"),
    ("52", "Finance and Insurance"),
    ("53", "Real Estate and Rental and Leasing"),
    ("54", "Professional, Scientific and Technical Services"),
    ("55", "Management of Companies and Enterprises"),
    (
        "56",
        "Administrative and Support, Waste Management and Remediation Services",
    ),
    ("61", "Educational Services"),
    ("62", "Health Care and Social Assistance"),
    ("71", "Arts, Entertainment and Recreation"),
    ("72", "Accommodation and Food Services"),
    ("81", "Other Services (except Public Administration)"),
    ("92", "Public Administration"),
    ("99", "Unclassified Establishments"),
];

/// The top-level NAICS scheme: the 21 categories plus the mapping from
/// every valid two-digit prefix to its owning top-level code.
///
/// Immutable after construction; safe to share across threads.
#[derive(Debug, Clone)]
pub struct Taxonomy {
    top_levels: Vec<(CategoryCode, &'static str)>,
    range_map: BTreeMap<&'static str, CategoryCode>,
}

/// Builds the built-in 21-category taxonomy.
pub fn load_taxonomy() -> Taxonomy {
    Taxonomy::new()
}

impl Taxonomy {
    pub fn new() -> Self {
        let top_levels: Vec<(CategoryCode, &'static str)> = TOP_LEVELS
            .iter()
            .map(|(code, name)| (CategoryCode(code.to_string()), *name))
            .collect();
        let mut range_map = BTreeMap::new();
        for (code, _) in &top_levels {
            match code.as_str() {
                "31-33" => {
                    for p in ["31", "32", "33"] {
                        range_map.insert(p, code.clone());
                    }
                }
                "44-45" => {
                    for p in ["44", "45"] {
                        range_map.insert(p, code.clone());
                    }
                }
                "48-49" => {
                    for p in ["48", "49"] {
                        range_map.insert(p, code.clone());
                    }
                }
                other => {
                    // 2-digit codes are their own prefix
                    let p: &'static str = TOP_LEVELS
                        .iter()
                        .find(|(c, _)| *c == other)
                        .map(|(c, _)| *c)
                        .unwrap();
                    range_map.insert(p, code.clone());
                }
            }
        }
        Taxonomy {
            top_levels,
            range_map,
        }
    }

    /// The 21 top-level categories in code order.
    pub fn top_levels(&self) -> &[(CategoryCode, &'static str)] {
        &self.top_levels
    }

    pub fn is_top_level(&self, code: &CategoryCode) -> bool {
        self.top_levels.iter().any(|(c, _)| c == code)
    }

    pub fn display_name(&self, code: &CategoryCode) -> Option<&'static str> {
        self.top_levels
            .iter()
            .find(|(c, _)| c == code)
            .map(|(_, name)| *name)
    }

    /// The top-level code owning a two-digit prefix, if any.
    pub fn range_map(&self, prefix: &str) -> Option<&CategoryCode> {
        self.range_map.get(prefix)
    }

    /// Folds an arbitrary-depth NAICS code up to its top-level category.
    /// Range labels are already top level and return themselves.
    pub fn generalize(&self, code: &CategoryCode) -> Result<CategoryCode, TaxonomyError> {
        let prefix = match code.prefix() {
            None => return Ok(code.clone()),
            Some(p) => p,
        };
        self.range_map
            .get(prefix)
            .cloned()
            .ok_or_else(|| TaxonomyError::UnknownPrefix(prefix.to_string()))
    }
}

impl Default for Taxonomy {
    fn default() -> Self {
        Taxonomy::new()
    }
}

/// A parsed SIC-to-NAICS crosswalk: 4-digit SIC codes mapped to one or
/// more NAICS codes. Immutable after construction.
#[derive(Debug, Clone, Default)]
pub struct SicCrosswalk {
    entries: BTreeMap<String, BTreeSet<CategoryCode>>,
}

impl SicCrosswalk {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, sic: &str) -> Option<&BTreeSet<CategoryCode>> {
        self.entries.get(sic)
    }

    /// Maps a 4-digit SIC code to the set of top-level NAICS categories it
    /// crosswalks to. An absent SIC yields the empty set.
    pub fn map_sic(&self, taxonomy: &Taxonomy, sic: &str) -> BTreeSet<CategoryCode> {
        let mut out = BTreeSet::new();
        if let Some(naics) = self.entries.get(sic) {
            for code in naics {
                // prefixes were validated at load time
                if let Ok(top) = taxonomy.generalize(code) {
                    out.insert(top);
                }
            }
        }
        out
    }
}

/// Parses a crosswalk file: one `SIC,NAICS` mapping per line (4-digit SIC,
/// 2-6 digit NAICS), `#` comments and blank lines ignored, UTF-8.
/// Duplicate SIC keys merge their NAICS sets. Rows whose NAICS prefix is
/// not a top-level prefix are rejected, since they could never generalize.
pub fn load_crosswalk(path: impl AsRef<Path>) -> Result<SicCrosswalk, TaxonomyError> {
    let text = std::fs::read_to_string(path)?;
    parse_crosswalk(&text)
}

pub fn parse_crosswalk(text: &str) -> Result<SicCrosswalk, TaxonomyError> {
    let taxonomy = Taxonomy::new();
    let mut entries: BTreeMap<String, BTreeSet<CategoryCode>> = BTreeMap::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut parts = line.splitn(2, ',');
        let sic = parts.next().unwrap_or("").trim();
        let naics = parts
            .next()
            .ok_or_else(|| TaxonomyError::Parse {
                line: line_no,
                message: format!("expected `SIC,NAICS`, got {raw_line:?}"),
            })?
            .trim();
        if sic.len() != 4 || !sic.bytes().all(|b| b.is_ascii_digit()) {
            return Err(TaxonomyError::Parse {
                line: line_no,
                message: format!("SIC code {sic:?} is not 4 digits"),
            });
        }
        if naics.len() < 2 || naics.len() > 6 || !naics.bytes().all(|b| b.is_ascii_digit()) {
            return Err(TaxonomyError::Parse {
                line: line_no,
                message: format!("NAICS code {naics:?} is not 2-6 digits"),
            });
        }
        let code = CategoryCode(naics.to_string());
        if taxonomy.generalize(&code).is_err() {
            return Err(TaxonomyError::Parse {
                line: line_no,
                message: format!("NAICS code {naics:?} has no top-level prefix"),
            });
        }
        entries.entry(sic.to_string()).or_default().insert(code);
    }
    Ok(SicCrosswalk { entries })
}
