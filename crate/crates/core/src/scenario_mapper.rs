//! Technique-to-ability and technique-to-rule mapping through local
//! dictionaries. Gaps are reported, never fatal: an unmapped technique gets a
//! stub ability flagged for analyst review.

use std::collections::{BTreeMap, BTreeSet};

use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MapError {
    #[error("invalid technique id {0:?}, expected T0000 or T0000.000")]
    InvalidTechniqueId(String),
    #[error("duplicate ability_number {0:?} in catalog")]
    DuplicateAbilityNumber(String),
    #[error("ability {ability:?} command has malformed placeholder {placeholder:?}")]
    BadPlaceholder { ability: String, placeholder: String },
    #[error("ability catalog: {0}")]
    Catalog(#[from] serde_yaml::Error),
    #[error("mapping table: {0}")]
    Table(#[from] csv::Error),
}

/// An ATT&CK technique or sub-technique id, e.g. `T1133` or `T1505.003`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TechniqueId(pub String);

impl TechniqueId {
    pub fn parse(s: &str) -> Result<Self, MapError> {
        let re = Regex::new(r"^T\d{4}(\.\d{3})?$").unwrap();
        if re.is_match(s) {
            Ok(TechniqueId(s.to_string()))
        } else {
            Err(MapError::InvalidTechniqueId(s.to_string()))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl std::fmt::Display for TechniqueId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

/// Parse an ordered scenario technique list, one id per line. Duplicates are
/// legal (the same technique can appear at several steps).
pub fn parse_technique_list(text: &str) -> Result<Vec<TechniqueId>, MapError> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(TechniqueId::parse)
        .collect()
}

/// A Caldera-style ability definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AbilityDef {
    pub name: String,
    pub ability_number: String,
    pub technique: TechniqueId,
    pub technique_name: String,
    #[serde(default)]
    pub description: String,
    #[serde(rename = "type")]
    pub kind: String,
    #[serde(default)]
    pub tags: Vec<String>,
    pub platform: String,
    pub executor: String,
    #[serde(default)]
    pub command: String,
}

impl AbilityDef {
    /// All `#{namespace.key}` placeholders in the command template.
    pub fn placeholders(&self) -> Vec<String> {
        let re = Regex::new(r"#\{[a-z]+\.[a-z_]+\}").unwrap();
        re.find_iter(&self.command)
            .map(|m| m.as_str().to_string())
            .collect()
    }

    pub fn is_stub(&self) -> bool {
        self.tags.iter().any(|t| t == "stub")
    }
}

/// Load and validate an ability catalog from a YAML document (a sequence of
/// ability definitions).
pub fn parse_ability_catalog(text: &str) -> Result<Vec<AbilityDef>, MapError> {
    let abilities: Vec<AbilityDef> = serde_yaml::from_str(text)?;
    let mut seen = BTreeSet::new();
    // any `#{...}` that is not a well-formed placeholder is a typo we want
    // caught at load time, not at binding time
    let loose = Regex::new(r"#\{[^}]*\}").unwrap();
    let strict = Regex::new(r"^#\{[a-z]+\.[a-z_]+\}$").unwrap();
    for ability in &abilities {
        if !seen.insert(ability.ability_number.clone()) {
            return Err(MapError::DuplicateAbilityNumber(
                ability.ability_number.clone(),
            ));
        }
        for m in loose.find_iter(&ability.command) {
            if !strict.is_match(m.as_str()) {
                return Err(MapError::BadPlaceholder {
                    ability: ability.ability_number.clone(),
                    placeholder: m.as_str().to_string(),
                });
            }
        }
    }
    Ok(abilities)
}

/// Local dictionaries: technique to ability numbers and technique to
/// interaction-rule files.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct MappingTables {
    pub abilities: BTreeMap<TechniqueId, Vec<String>>,
    pub irs: BTreeMap<TechniqueId, Vec<String>>,
}

#[derive(Debug, Deserialize)]
struct AbilityRow {
    technique_id: String,
    ability_number: String,
}

#[derive(Debug, Deserialize)]
struct IrRow {
    technique_id: String,
    ir_file: String,
}

impl MappingTables {
    /// `technique_id,ability_number` CSV.
    pub fn load_ability_table(&mut self, csv_text: &str) -> Result<(), MapError> {
        let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
        for row in reader.deserialize() {
            let row: AbilityRow = row?;
            let id = TechniqueId::parse(&row.technique_id)?;
            self.abilities.entry(id).or_default().push(row.ability_number);
        }
        Ok(())
    }

    /// `technique_id,ir_file` CSV.
    pub fn load_ir_table(&mut self, csv_text: &str) -> Result<(), MapError> {
        let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
        for row in reader.deserialize() {
            let row: IrRow = row?;
            let id = TechniqueId::parse(&row.technique_id)?;
            self.irs.entry(id).or_default().push(row.ir_file);
        }
        Ok(())
    }
}

/// Deterministic stub for a technique that has no catalog ability. Tagged for
/// analyst review; the simulator refuses to execute it.
fn stub_ability(technique: &TechniqueId) -> AbilityDef {
    AbilityDef {
        name: format!("Stub for {technique}"),
        ability_number: format!("stub-{}", technique.0.to_lowercase().replace('.', "-")),
        technique: technique.clone(),
        technique_name: String::new(),
        description: "Generated placeholder; model this step manually.".into(),
        kind: "manual".into(),
        tags: vec!["stub".into()],
        platform: String::new(),
        executor: String::new(),
        command: String::new(),
    }
}

/// Map an ordered technique list to abilities. Output order is exactly the
/// input order; each technique yields exactly one ability. Techniques without
/// a usable mapping come back as stubs and are listed in the second element.
pub fn map_techniques_to_abilities(
    techniques: &[TechniqueId],
    catalog: &[AbilityDef],
    tables: &MappingTables,
) -> (Vec<AbilityDef>, Vec<TechniqueId>) {
    let by_number: BTreeMap<&str, &AbilityDef> = catalog
        .iter()
        .map(|a| (a.ability_number.as_str(), a))
        .collect();
    let mut out = Vec::with_capacity(techniques.len());
    let mut unmatched = Vec::new();
    for technique in techniques {
        let mut candidates: Vec<&str> = tables
            .abilities
            .get(technique)
            .map(|numbers| {
                numbers
                    .iter()
                    .map(String::as_str)
                    .filter(|n| by_number.contains_key(n))
                    .collect()
            })
            .unwrap_or_default();
        // smallest ability_number wins a tie so reruns agree byte for byte
        candidates.sort_unstable();
        match candidates.first() {
            Some(number) => out.push((*by_number.get(number).unwrap()).clone()),
            None => {
                unmatched.push(technique.clone());
                out.push(stub_ability(technique));
            }
        }
    }
    (out, unmatched)
}

/// Resolve the interaction-rule files relevant to a technique list. The file
/// list is deduplicated in first-seen order; techniques with no rule mapping
/// should be modeled manually and are reported.
pub fn map_techniques_to_irs(
    techniques: &[TechniqueId],
    tables: &MappingTables,
) -> (Vec<String>, Vec<TechniqueId>) {
    let mut files = Vec::new();
    let mut seen = BTreeSet::new();
    let mut unmodeled = Vec::new();
    for technique in techniques {
        match tables.irs.get(technique) {
            Some(refs) => {
                for file in refs {
                    if seen.insert(file.clone()) {
                        files.push(file.clone());
                    }
                }
            }
            None => unmodeled.push(technique.clone()),
        }
    }
    (files, unmodeled)
}
