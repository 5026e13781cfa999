//! Domain types shared by every stage: user records, labels and class tallies.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The three target classes. The declaration order is the canonical class
/// order used for tie-breaking, confusion matrices and score vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UserType {
    Male,
    Female,
    Organization,
}

pub const NUM_CLASSES: usize = 3;

impl UserType {
    pub const ALL: [UserType; NUM_CLASSES] =
        [UserType::Male, UserType::Female, UserType::Organization];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<UserType> {
        Self::ALL.get(index).copied()
    }

    pub fn as_str(self) -> &'static str {
        match self {
            UserType::Male => "male",
            UserType::Female => "female",
            UserType::Organization => "organization",
        }
    }
}

impl fmt::Display for UserType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for UserType {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "male" => Ok(UserType::Male),
            "female" => Ok(UserType::Female),
            "organization" => Ok(UserType::Organization),
            other => Err(format!("unknown label `{other}`")),
        }
    }
}

/// One tweet plus the profile snapshot of its author.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserRecord {
    pub user_id: String,
    pub screen_name: String,
    pub handle: String,
    pub description: String,
    pub tweet_text: String,
    pub friends_count: u64,
    pub followers_count: u64,
    pub statuses_count: u64,
    pub verified: bool,
    pub retweet_count: u64,
    pub favorite_count: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub image_vector_ref: Option<String>,
}

impl UserRecord {
    /// A record with the given id and every other field at its default.
    pub fn new(user_id: impl Into<String>) -> Self {
        UserRecord {
            user_id: user_id.into(),
            screen_name: String::new(),
            handle: String::new(),
            description: String::new(),
            tweet_text: String::new(),
            friends_count: 0,
            followers_count: 0,
            statuses_count: 0,
            verified: false,
            retweet_count: 0,
            favorite_count: 0,
            image_vector_ref: None,
        }
    }

    /// Serialize as one line of the users input format (no trailing newline).
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("UserRecord serialization is infallible")
    }
}

// Wire shape: every key optional so absent keys can be told apart from
// malformed ones. Counts are signed so negatives surface as invalid records
// rather than type errors.
#[derive(Deserialize)]
struct RawRecord {
    user_id: Option<String>,
    screen_name: Option<String>,
    handle: Option<String>,
    description: Option<String>,
    tweet_text: Option<String>,
    friends_count: Option<i64>,
    followers_count: Option<i64>,
    statuses_count: Option<i64>,
    verified: Option<bool>,
    retweet_count: Option<i64>,
    favorite_count: Option<i64>,
    image_vector_ref: Option<String>,
}

fn count_field(line: usize, name: &str, value: Option<i64>) -> Result<u64> {
    match value {
        None => Ok(0),
        Some(v) if v >= 0 => Ok(v as u64),
        Some(v) => Err(Error::InvalidRecord {
            line,
            message: format!("{name} is negative ({v})"),
        }),
    }
}

/// Parse one line of the users input. `line` is the 1-based line number used
/// in error messages.
///
/// Absent (or `null`) keys take their defaults: empty text, zero counts,
/// unverified, no image. Type errors are never defaulted.
pub fn parse_user_record(text: &str, line: usize) -> Result<UserRecord> {
    let raw: RawRecord = serde_json::from_str(text).map_err(|e| Error::Parse {
        line,
        message: e.to_string(),
    })?;
    let user_id = match raw.user_id {
        Some(id) if !id.is_empty() => id,
        _ => {
            return Err(Error::InvalidRecord {
                line,
                message: "missing or empty user_id".into(),
            })
        }
    };
    Ok(UserRecord {
        user_id,
        screen_name: raw.screen_name.unwrap_or_default(),
        handle: raw.handle.unwrap_or_default(),
        description: raw.description.unwrap_or_default(),
        tweet_text: raw.tweet_text.unwrap_or_default(),
        friends_count: count_field(line, "friends_count", raw.friends_count)?,
        followers_count: count_field(line, "followers_count", raw.followers_count)?,
        statuses_count: count_field(line, "statuses_count", raw.statuses_count)?,
        verified: raw.verified.unwrap_or(false),
        retweet_count: count_field(line, "retweet_count", raw.retweet_count)?,
        favorite_count: count_field(line, "favorite_count", raw.favorite_count)?,
        image_vector_ref: raw.image_vector_ref.filter(|r| !r.is_empty()),
    })
}

/// Line-by-line reader over a users stream. Blank lines are skipped; every
/// other line yields a parsed record or its error, so callers can skip and
/// tally bad lines without stopping.
pub struct RecordReader<R> {
    inner: R,
    buf: String,
    line: usize,
}

impl<R: BufRead> RecordReader<R> {
    pub fn new(inner: R) -> Self {
        RecordReader {
            inner,
            buf: String::new(),
            line: 0,
        }
    }

    /// Number of physical lines consumed so far.
    pub fn lines_read(&self) -> usize {
        self.line
    }
}

impl<R: BufRead> Iterator for RecordReader<R> {
    type Item = Result<UserRecord>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            self.buf.clear();
            match self.inner.read_line(&mut self.buf) {
                Ok(0) => return None,
                Ok(_) => {
                    self.line += 1;
                    let text = self.buf.trim();
                    if text.is_empty() {
                        continue;
                    }
                    return Some(parse_user_record(text, self.line));
                }
                Err(e) => {
                    self.line += 1;
                    return Some(Err(Error::Parse {
                        line: self.line,
                        message: e.to_string(),
                    }));
                }
            }
        }
    }
}

/// Records loaded from a users file plus the lines that failed to parse.
#[derive(Debug, Default)]
pub struct LoadedUsers {
    pub records: Vec<UserRecord>,
    pub skipped: Vec<Error>,
}

pub fn load_users(path: &Path) -> Result<LoadedUsers> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut loaded = LoadedUsers::default();
    for item in RecordReader::new(BufReader::new(file)) {
        match item {
            Ok(r) => loaded.records.push(r),
            Err(e) => loaded.skipped.push(e),
        }
    }
    Ok(loaded)
}

/// Keep the first-seen record for every user id, preserving input order.
pub fn first_per_user(records: &[UserRecord]) -> Vec<&UserRecord> {
    let mut seen = HashSet::new();
    records
        .iter()
        .filter(|r| seen.insert(r.user_id.as_str()))
        .collect()
}

pub type LabelMap = HashMap<String, UserType>;

/// Parse `user_id,label` rows. A first row whose label column reads `label`
/// is treated as a header. Blank lines are ignored.
pub fn parse_labels(text: &str) -> Result<LabelMap> {
    let mut labels = LabelMap::new();
    let mut first = true;
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let row = raw.trim();
        if row.is_empty() {
            continue;
        }
        let (id, token) = row.rsplit_once(',').ok_or_else(|| Error::Labels {
            line,
            message: "expected `user_id,label`".into(),
        })?;
        let (id, token) = (id.trim(), token.trim());
        if first {
            first = false;
            if token.eq_ignore_ascii_case("label") {
                continue;
            }
        }
        if id.is_empty() {
            return Err(Error::Labels {
                line,
                message: "empty user_id".into(),
            });
        }
        let label: UserType = token
            .parse()
            .map_err(|message| Error::Labels { line, message })?;
        if let Some(prev) = labels.insert(id.to_string(), label) {
            if prev != label {
                return Err(Error::Labels {
                    line,
                    message: format!("conflicting labels for `{id}`: {prev} and {label}"),
                });
            }
        }
    }
    Ok(labels)
}

pub fn load_labels(path: &Path) -> Result<LabelMap> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_labels(&text)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledExample {
    pub record: UserRecord,
    pub label: UserType,
}

/// Per-class counts over a labelled population. Shares are derived on demand
/// as `count / total`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub counts: [u64; NUM_CLASSES],
    pub total: u64,
}

impl ClassDistribution {
    pub fn from_labels<I>(labels: I) -> Result<ClassDistribution>
    where
        I: IntoIterator<Item = UserType>,
    {
        let mut counts = [0u64; NUM_CLASSES];
        for label in labels {
            counts[label.index()] += 1;
        }
        Self::from_counts(counts)
    }

    pub fn from_counts(counts: [u64; NUM_CLASSES]) -> Result<ClassDistribution> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyDataset);
        }
        Ok(ClassDistribution { counts, total })
    }

    pub fn count(&self, class: UserType) -> u64 {
        self.counts[class.index()]
    }

    pub fn share(&self, class: UserType) -> f64 {
        self.counts[class.index()] as f64 / self.total as f64
    }

    pub fn shares(&self) -> [f64; NUM_CLASSES] {
        UserType::ALL.map(|c| self.share(c))
    }

    /// Most frequent class, ties resolved by class order.
    pub fn majority(&self) -> UserType {
        let mut best = UserType::Male;
        for c in UserType::ALL {
            if self.count(c) > self.count(best) {
                best = c;
            }
        }
        best
    }
}

impl fmt::Display for ClassDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:>14} {:>14} {:>14} {:>10}",
            "Male", "Female", "Organization", "Total"
        )?;
        writeln!(
            f,
            "{:>14} {:>14} {:>14} {:>10}",
            self.counts[0], self.counts[1], self.counts[2], self.total
        )?;
        let s = self.shares();
        write!(
            f,
            "{:>13.2}% {:>13.2}% {:>13.2}% {:>9}%",
            s[0] * 100.0,
            s[1] * 100.0,
            s[2] * 100.0,
            100
        )
    }
}

pub fn dataset_summary(examples: &[LabeledExample]) -> Result<ClassDistribution> {
    ClassDistribution::from_labels(examples.iter().map(|e| e.label))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_line() -> &'static str {
        r#"{"user_id":"u1","screen_name":"Isis Anchalee","handle":"isisanchalee","description":"engineer","tweet_text":"I look like an engineer!","friends_count":10,"followers_count":20,"statuses_count":30,"verified":true,"retweet_count":4,"favorite_count":5,"image_vector_ref":"u1.txt"}"#
    }

    #[test]
    fn parses_fully_populated_line() {
        let r = parse_user_record(full_line(), 1).unwrap();
        assert_eq!(r.user_id, "u1");
        assert_eq!(r.screen_name, "Isis Anchalee");
        assert_eq!(r.handle, "isisanchalee");
        assert_eq!(r.description, "engineer");
        assert_eq!(r.tweet_text, "I look like an engineer!");
        assert_eq!(
            (r.friends_count, r.followers_count, r.statuses_count),
            (10, 20, 30)
        );
        assert!(r.verified);
        assert_eq!((r.retweet_count, r.favorite_count), (4, 5));
        assert_eq!(r.image_vector_ref.as_deref(), Some("u1.txt"));
        assert_eq!(parse_user_record(&r.to_json_line(), 1).unwrap(), r);
    }

    #[test]
    fn absent_description_defaults_to_empty() {
        let r = parse_user_record(r#"{"user_id":"u2","screen_name":"x"}"#, 1).unwrap();
        assert_eq!(r.description, "");
        assert_eq!(r.followers_count, 0);
        assert_eq!(r.image_vector_ref, None);
    }

    #[test]
    fn negative_count_is_invalid() {
        let err = parse_user_record(r#"{"user_id":"u3","followers_count":-1}"#, 7).unwrap_err();
        assert!(matches!(err, Error::InvalidRecord { line: 7, .. }), "{err}");
    }

    #[test]
    fn wrong_type_is_a_parse_error_not_a_default() {
        let err = parse_user_record(r#"{"user_id":"u3","followers_count":"ten"}"#, 2).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
        let err = parse_user_record(r#"{"user_id":"u3","#, 3).unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }));
    }

    #[test]
    fn missing_user_id_is_invalid() {
        for line in [r#"{"screen_name":"a"}"#, r#"{"user_id":""}"#] {
            assert!(matches!(
                parse_user_record(line, 1),
                Err(Error::InvalidRecord { .. })
            ));
        }
    }

    #[test]
    fn reader_skips_blank_lines_and_reports_line_numbers() {
        let input = format!("{}\n\nnot json\n{}\n", full_line(), r#"{"user_id":"u9"}"#);
        let items: Vec<_> = RecordReader::new(input.as_bytes()).collect();
        assert_eq!(items.len(), 3);
        assert!(items[0].is_ok());
        assert!(matches!(items[1], Err(Error::Parse { line: 3, .. })));
        assert_eq!(items[2].as_ref().unwrap().user_id, "u9");
    }

    #[test]
    fn labels_basic_and_case_insensitive() {
        let m = parse_labels("u1,female").unwrap();
        assert_eq!(m["u1"], UserType::Female);
        let m = parse_labels("u1,FEMALE").unwrap();
        assert_eq!(m["u1"], UserType::Female);
        let m = parse_labels("user_id,label\nu1,male\nu2,Organization\n").unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(m["u2"], UserType::Organization);
    }

    #[test]
    fn labels_conflict_and_unknown_token() {
        assert!(matches!(
            parse_labels("u1,female\nu1,male"),
            Err(Error::Labels { line: 2, .. })
        ));
        assert!(parse_labels("u1,female\nu1,female").is_ok());
        assert!(matches!(
            parse_labels("u1,robot"),
            Err(Error::Labels { line: 1, .. })
        ));
    }

    #[test]
    fn summary_of_reference_datasets() {
        let d = ClassDistribution::from_counts([353, 451, 630]).unwrap();
        assert_eq!(d.total, 1434);
        let pct = d.shares().map(|s| format!("{:.2}", s * 100.0));
        assert_eq!(pct, ["24.62", "31.45", "43.93"]);

        let d = ClassDistribution::from_counts([3698, 4024, 2464]).unwrap();
        assert_eq!(d.total, 10186);
        let pct = d.shares().map(|s| format!("{:.2}", s * 100.0));
        assert_eq!(pct, ["36.30", "39.51", "24.19"]);
    }

    #[test]
    fn summary_single_and_empty() {
        let ex = LabeledExample {
            record: UserRecord::new("u"),
            label: UserType::Male,
        };
        let d = dataset_summary(&[ex]).unwrap();
        assert_eq!(d.shares(), [1.0, 0.0, 0.0]);
        assert_eq!(d.total, 1);
        assert!(matches!(dataset_summary(&[]), Err(Error::EmptyDataset)));
    }

    #[test]
    fn first_per_user_keeps_first_tweet() {
        let mut a = UserRecord::new("a");
        a.tweet_text = "first".into();
        let mut a2 = UserRecord::new("a");
        a2.tweet_text = "second".into();
        let b = UserRecord::new("b");
        let recs = vec![a, b, a2];
        let kept = first_per_user(&recs);
        assert_eq!(kept.len(), 2);
        assert_eq!(kept[0].tweet_text, "first");
    }
}
