//! Given-name gender lookup backed by a frequency table.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameEntry {
    pub male_freq: u64,
    pub female_freq: u64,
    /// Countries the rows for this name came from, in first-seen order.
    pub countries: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Gender {
    Male,
    Female,
}

/// Normalized given name -> accumulated per-gender frequencies.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NameDatabase {
    entries: BTreeMap<String, NameEntry>,
}

pub fn normalize_name(name: &str) -> String {
    name.trim().to_lowercase()
}

impl NameDatabase {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add `frequency` occurrences of `name` for `gender`; repeated rows
    /// accumulate.
    pub fn add(&mut self, name: &str, gender: Gender, frequency: u64, country: Option<&str>) {
        let entry = self.entries.entry(normalize_name(name)).or_default();
        match gender {
            Gender::Male => entry.male_freq += frequency,
            Gender::Female => entry.female_freq += frequency,
        }
        if let Some(c) = country.map(str::trim).filter(|c| !c.is_empty()) {
            if !entry.countries.iter().any(|x| x == c) {
                entry.countries.push(c.to_string());
            }
        }
    }

    pub fn get(&self, name: &str) -> Option<&NameEntry> {
        self.entries.get(name)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &NameEntry)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), v))
    }

    /// Parse `name,gender(M|F),frequency[,country]` rows. A leading
    /// `name,gender,...` header row is skipped.
    pub fn parse(text: &str) -> Result<NameDatabase> {
        let mut db = NameDatabase::new();
        let mut first = true;
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let row = raw.trim();
            if row.is_empty() {
                continue;
            }
            let cols: Vec<&str> = row.split(',').collect();
            if first {
                first = false;
                if cols.len() >= 2 && cols[1].trim().eq_ignore_ascii_case("gender") {
                    continue;
                }
            }
            if cols.len() < 3 || cols.len() > 4 {
                return Err(Error::NameDatabase {
                    line,
                    message: "expected `name,gender,frequency[,country]`".into(),
                });
            }
            let name = normalize_name(cols[0]);
            if name.is_empty() {
                return Err(Error::NameDatabase {
                    line,
                    message: "empty name".into(),
                });
            }
            let gender = match cols[1].trim() {
                "M" | "m" => Gender::Male,
                "F" | "f" => Gender::Female,
                other => {
                    return Err(Error::NameDatabase {
                        line,
                        message: format!("unknown gender `{other}`"),
                    })
                }
            };
            let freq: u64 = cols[2].trim().parse().map_err(|_| Error::NameDatabase {
                line,
                message: format!("nonnumeric frequency `{}`", cols[2].trim()),
            })?;
            db.add(&name, gender, freq, cols.get(3).copied());
        }
        if let Some((name, _)) = db
            .entries
            .iter()
            .find(|(_, e)| e.male_freq == 0 && e.female_freq == 0)
        {
            return Err(Error::NameDatabase {
                line: 0,
                message: format!("name `{name}` has zero total frequency"),
            });
        }
        Ok(db)
    }
}

pub fn load_name_database(path: &Path) -> Result<NameDatabase> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    NameDatabase::parse(&text)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NameGenderClass {
    Female,
    Male,
    Unisex,
    None,
}

/// How a multi-token screen name is resolved against the database.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TokenStrategy {
    /// Use the first token present in the database.
    #[default]
    FirstMatch,
    /// Use the matching token with the highest total frequency; ties go to
    /// the earlier token.
    HighestFrequency,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NameConfig {
    /// Minimum share of one gender for a name to count as that gender.
    pub threshold: f64,
    pub strategy: TokenStrategy,
}

impl Default for NameConfig {
    fn default() -> Self {
        NameConfig {
            threshold: 0.9,
            strategy: TokenStrategy::FirstMatch,
        }
    }
}

impl NameConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.threshold > 0.5 && self.threshold <= 1.0) {
            return Err(Error::Config(format!(
                "name threshold must be in (0.5, 1], got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

fn name_tokens(screen_name: &str) -> impl Iterator<Item = String> + '_ {
    screen_name
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

pub fn classify_name(screen_name: &str, db: &NameDatabase) -> NameGenderClass {
    classify_name_with(screen_name, db, &NameConfig::default())
}

pub fn classify_name_with(
    screen_name: &str,
    db: &NameDatabase,
    config: &NameConfig,
) -> NameGenderClass {
    let mut chosen: Option<&NameEntry> = None;
    for token in name_tokens(screen_name) {
        let Some(entry) = db.get(&token) else {
            continue;
        };
        match config.strategy {
            TokenStrategy::FirstMatch => {
                chosen = Some(entry);
                break;
            }
            TokenStrategy::HighestFrequency => {
                let total = entry.male_freq + entry.female_freq;
                if chosen.is_none_or(|c| total > c.male_freq + c.female_freq) {
                    chosen = Some(entry);
                }
            }
        }
    }
    let Some(entry) = chosen else {
        return NameGenderClass::None;
    };
    let f = entry.female_freq as f64;
    let m = entry.male_freq as f64;
    let total = f + m;
    if total == 0.0 {
        return NameGenderClass::None;
    }
    if f / total >= config.threshold {
        NameGenderClass::Female
    } else if m / total >= config.threshold {
        NameGenderClass::Male
    } else {
        NameGenderClass::Unisex
    }
}

pub const NAME_DIM: usize = 3;

/// One-hot over (female, male, unisex); no match encodes as zeros.
pub fn encode_name_features(class: NameGenderClass) -> [f64; NAME_DIM] {
    match class {
        NameGenderClass::Female => [1.0, 0.0, 0.0],
        NameGenderClass::Male => [0.0, 1.0, 0.0],
        NameGenderClass::Unisex => [0.0, 0.0, 1.0],
        NameGenderClass::None => [0.0, 0.0, 0.0],
    }
}

/// Inverse of [`encode_name_features`] for vectors it produced.
pub fn decode_name_features(values: &[f64]) -> NameGenderClass {
    match values {
        [f, _, _] if *f == 1.0 => NameGenderClass::Female,
        [_, m, _] if *m == 1.0 => NameGenderClass::Male,
        [_, _, u] if *u == 1.0 => NameGenderClass::Unisex,
        _ => NameGenderClass::None,
    }
}
