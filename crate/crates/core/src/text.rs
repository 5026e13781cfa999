//! Word-category lexicon engine.
//!
//! A lexicon maps literal words and trailing-`*` prefix patterns to sets of
//! categories. Each text source yields its raw word count followed by, for
//! every category in lexicon order, the percentage of tokens that fall in
//! that category.
//!
//! File format (UTF-8):
//!
//! ```text
//! %
//! 1 pronoun
//! 2 posemo
//! %
//! i 1
//! happ* 2
//! we 1
//! ```
//!
//! Columns are separated by tabs (any whitespace is accepted). A token that
//! matches a literal entry uses that entry; otherwise the longest matching
//! prefix pattern is used. The token then counts once toward each category of
//! the chosen entry.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Category {
    pub id: u32,
    pub name: String,
}

#[derive(Debug, Clone)]
pub struct Lexicon {
    categories: Vec<Category>,
    // pattern without `*` -> sorted category positions
    literals: HashMap<String, Vec<usize>>,
    prefixes: HashMap<String, Vec<usize>>,
    longest_prefix: usize,
}

/// A validated lexicon entry, as handed to [`Lexicon::new`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    pub pattern: String,
    pub category_ids: Vec<u32>,
}

impl Entry {
    pub fn new(pattern: &str, category_ids: &[u32]) -> Self {
        Entry {
            pattern: pattern.to_string(),
            category_ids: category_ids.to_vec(),
        }
    }
}

fn check_pattern(pattern: &str) -> std::result::Result<(String, bool), String> {
    let lower = pattern.to_lowercase();
    let (body, wildcard) = match lower.strip_suffix('*') {
        Some(body) => (body.to_string(), true),
        None => (lower, false),
    };
    if body.contains('*') {
        return Err(format!("malformed wildcard `{pattern}`"));
    }
    if body.is_empty() {
        return Err(format!("empty pattern `{pattern}`"));
    }
    Ok((body, wildcard))
}

impl Lexicon {
    /// Build a lexicon from a category table and entries. Entries repeating
    /// a pattern are merged. `line_of` maps an entry index to a source line
    /// for error reporting.
    fn build(
        categories: Vec<Category>,
        entries: Vec<Entry>,
        line_of: impl Fn(usize) -> usize,
    ) -> Result<Lexicon> {
        let mut position = HashMap::new();
        for (i, c) in categories.iter().enumerate() {
            if c.id == 0 {
                return Err(Error::Lexicon {
                    line: 0,
                    message: format!("category id must be positive (`{}`)", c.name),
                });
            }
            if position.insert(c.id, i).is_some() {
                return Err(Error::Lexicon {
                    line: 0,
                    message: format!("duplicate category id {}", c.id),
                });
            }
        }
        let mut literals: HashMap<String, Vec<usize>> = HashMap::new();
        let mut prefixes: HashMap<String, Vec<usize>> = HashMap::new();
        for (i, entry) in entries.into_iter().enumerate() {
            let line = line_of(i);
            let (body, wildcard) =
                check_pattern(&entry.pattern).map_err(|message| Error::Lexicon { line, message })?;
            let mut cats = Vec::with_capacity(entry.category_ids.len());
            for id in &entry.category_ids {
                let pos = position.get(id).ok_or_else(|| Error::Lexicon {
                    line,
                    message: format!("`{}` references unknown category {id}", entry.pattern),
                })?;
                cats.push(*pos);
            }
            let slot = if wildcard {
                prefixes.entry(body).or_default()
            } else {
                literals.entry(body).or_default()
            };
            slot.extend(cats);
            slot.sort_unstable();
            slot.dedup();
        }
        let longest_prefix = prefixes.keys().map(|k| k.chars().count()).max().unwrap_or(0);
        Ok(Lexicon {
            categories,
            literals,
            prefixes,
            longest_prefix,
        })
    }

    pub fn new(categories: Vec<Category>, entries: Vec<Entry>) -> Result<Lexicon> {
        Self::build(categories, entries, |_| 0)
    }

    pub fn parse(text: &str) -> Result<Lexicon> {
        let mut section = 0;
        let mut categories = Vec::new();
        let mut entries = Vec::new();
        let mut entry_lines = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx + 1;
            let row = raw.trim();
            if row.is_empty() {
                continue;
            }
            if row == "%" {
                section += 1;
                if section > 2 {
                    return Err(Error::Lexicon {
                        line,
                        message: "more than two `%` separators".into(),
                    });
                }
                continue;
            }
            let cols: Vec<&str> = row.split_whitespace().collect();
            match section {
                0 => {
                    return Err(Error::Lexicon {
                        line,
                        message: "expected leading `%`".into(),
                    })
                }
                1 => {
                    let [id, name] = cols[..] else {
                        return Err(Error::Lexicon {
                            line,
                            message: "category rows are `id<TAB>name`".into(),
                        });
                    };
                    let id: u32 = id.parse().map_err(|_| Error::Lexicon {
                        line,
                        message: format!("bad category id `{id}`"),
                    })?;
                    if id == 0 {
                        return Err(Error::Lexicon {
                            line,
                            message: "category id must be positive".into(),
                        });
                    }
                    if categories.iter().any(|c: &Category| c.id == id) {
                        return Err(Error::Lexicon {
                            line,
                            message: format!("duplicate category id {id}"),
                        });
                    }
                    categories.push(Category {
                        id,
                        name: name.to_string(),
                    });
                }
                _ => {
                    if cols.len() < 2 {
                        return Err(Error::Lexicon {
                            line,
                            message: "entry rows are `pattern<TAB>id[<TAB>id...]`".into(),
                        });
                    }
                    let ids = cols[1..]
                        .iter()
                        .map(|s| {
                            s.parse::<u32>().map_err(|_| Error::Lexicon {
                                line,
                                message: format!("bad category id `{s}`"),
                            })
                        })
                        .collect::<Result<Vec<_>>>()?;
                    entries.push(Entry {
                        pattern: cols[0].to_string(),
                        category_ids: ids,
                    });
                    entry_lines.push(line);
                }
            }
        }
        if section < 2 {
            return Err(Error::Lexicon {
                line: 0,
                message: "missing `%` section separator".into(),
            });
        }
        Self::build(categories, entries, |i| entry_lines[i])
    }

    pub fn categories(&self) -> &[Category] {
        &self.categories
    }

    pub fn category_count(&self) -> usize {
        self.categories.len()
    }

    /// All entries as `(pattern, category ids)`, wildcards with their `*`,
    /// sorted by pattern.
    pub fn entries(&self) -> Vec<Entry> {
        let ids = |cats: &Vec<usize>| cats.iter().map(|&c| self.categories[c].id).collect();
        let mut out: BTreeMap<String, Vec<u32>> = BTreeMap::new();
        for (k, v) in &self.literals {
            out.insert(k.clone(), ids(v));
        }
        for (k, v) in &self.prefixes {
            out.insert(format!("{k}*"), ids(v));
        }
        out.into_iter()
            .map(|(pattern, category_ids)| Entry {
                pattern,
                category_ids,
            })
            .collect()
    }

    /// Category positions the token counts toward, or `None` when no entry
    /// matches.
    pub fn lookup(&self, token: &str) -> Option<&[usize]> {
        if let Some(cats) = self.literals.get(token) {
            return Some(cats);
        }
        if self.longest_prefix == 0 {
            return None;
        }
        let ends: Vec<usize> = token
            .char_indices()
            .map(|(i, c)| i + c.len_utf8())
            .take(self.longest_prefix)
            .collect();
        ends.iter()
            .rev()
            .find_map(|&end| self.prefixes.get(&token[..end]))
            .map(Vec::as_slice)
    }

    /// The same lexicon with one category dropped. Entries keep their
    /// patterns even if left without categories, so the remaining categories
    /// see identical matches.
    pub fn without_category(&self, id: u32) -> Lexicon {
        let Some(removed) = self.categories.iter().position(|c| c.id == id) else {
            return self.clone();
        };
        let remap = |cats: &Vec<usize>| -> Vec<usize> {
            cats.iter()
                .filter(|&&c| c != removed)
                .map(|&c| if c > removed { c - 1 } else { c })
                .collect()
        };
        let mut categories = self.categories.clone();
        categories.remove(removed);
        Lexicon {
            categories,
            literals: self.literals.iter().map(|(k, v)| (k.clone(), remap(v))).collect(),
            prefixes: self.prefixes.iter().map(|(k, v)| (k.clone(), remap(v))).collect(),
            longest_prefix: self.longest_prefix,
        }
    }
}

pub fn load_lexicon(path: &Path) -> Result<Lexicon> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Lexicon::parse(&text)
}

fn normalize_apostrophe(c: char) -> char {
    if c == '\u{2019}' {
        '\''
    } else {
        c
    }
}

/// Lowercased word tokens. Splits on anything that is not alphanumeric,
/// keeping apostrophes only between two alphanumerics. Runs starting with
/// `http` and `@mentions` are dropped; the `#` of a hashtag is a separator,
/// so the hashtag body survives as a word.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    for chunk in text.split_whitespace() {
        let chars: Vec<char> = chunk
            .to_lowercase()
            .chars()
            .map(normalize_apostrophe)
            .collect();
        let mut current = String::new();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let boundary_before = i == 0 || !chars[i - 1].is_alphanumeric();
            if current.is_empty() && boundary_before && chars[i..].starts_with(&['h', 't', 't', 'p'])
            {
                break;
            }
            if c == '@' && boundary_before {
                if !current.is_empty() {
                    tokens.push(std::mem::take(&mut current));
                }
                i += 1;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                continue;
            }
            let apostrophe = c == '\''
                && !current.is_empty()
                && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
            if c.is_alphanumeric() || apostrophe {
                current.push(c);
            } else if !current.is_empty() {
                tokens.push(std::mem::take(&mut current));
            }
            i += 1;
        }
        if !current.is_empty() {
            tokens.push(current);
        }
    }
    tokens
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryProfile {
    pub word_count: usize,
    /// Percent (0-100) of tokens hitting each category, in lexicon order.
    pub percentages: Vec<f64>,
}

pub fn category_profile<S: AsRef<str>>(tokens: &[S], lexicon: &Lexicon) -> CategoryProfile {
    let k = lexicon.category_count();
    let mut hits = vec![0usize; k];
    for token in tokens {
        if let Some(cats) = lexicon.lookup(token.as_ref()) {
            for &c in cats {
                hits[c] += 1;
            }
        }
    }
    let word_count = tokens.len();
    let percentages = if word_count == 0 {
        vec![0.0; k]
    } else {
        hits.iter()
            .map(|&h| percent(h, word_count))
            .collect()
    };
    CategoryProfile {
        word_count,
        percentages,
    }
}

/// `100 * hits / words`, the one formula every profile percentage uses.
pub fn percent(hits: usize, words: usize) -> f64 {
    100.0 * hits as f64 / words as f64
}

/// Length of the text feature group for a lexicon with `k` categories.
pub fn text_dim(k: usize) -> usize {
    2 * (k + 1)
}

/// `[tweet words, tweet percentages.., description words, description
/// percentages..]`.
pub fn extract_text_features(tweet_text: &str, description: &str, lexicon: &Lexicon) -> Vec<f64> {
    let mut out = Vec::with_capacity(text_dim(lexicon.category_count()));
    for source in [tweet_text, description] {
        let profile = category_profile(&tokenize(source), lexicon);
        out.push(profile.word_count as f64);
        out.extend(profile.percentages);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn cat(id: u32, name: &str) -> Category {
        Category {
            id,
            name: name.into(),
        }
    }

    #[test]
    fn parses_fixture_file() {
        let lex = Lexicon::parse("%\n1\tpronoun\n2\tposemo\n%\ni\t1\nwe\t1\nhapp*\t2\n").unwrap();
        assert_eq!(lex.category_count(), 2);
        assert_eq!(lex.entries().len(), 3);
        assert_eq!(lex.lookup("happiness"), Some(&[1usize][..]));
        assert_eq!(lex.lookup("hap"), None);
    }

    #[test]
    fn rejects_unknown_category() {
        let err = Lexicon::parse("%\n1\tposemo\n%\nhapp*\t99\n").unwrap_err();
        assert!(matches!(err, Error::Lexicon { line: 4, .. }), "{err}");
    }

    #[test]
    fn rejects_interior_wildcard_and_duplicates() {
        assert!(Lexicon::parse("%\n1\ta\n%\nwo*rd\t1\n").is_err());
        assert!(Lexicon::parse("%\n1\ta\n%\nword**\t1\n").is_err());
        assert!(Lexicon::parse("%\n1\ta\n%\n*\t1\n").is_err());
        assert!(Lexicon::parse("%\n1\ta\n1\tb\n%\nx\t1\n").is_err());
        assert!(Lexicon::parse("1\ta\n%\nx\t1\n").is_err());
        assert!(Lexicon::parse("%\n1\ta\n").is_err());
    }

    #[test]
    fn repeated_patterns_merge_and_uppercase_normalizes() {
        let lex = Lexicon::parse("%\n1\ta\n2\tb\n%\nWord\t1\nword\t2\n").unwrap();
        assert_eq!(lex.lookup("word"), Some(&[0usize, 1][..]));
    }

    #[test]
    fn tokenize_examples() {
        assert!(tokenize("").is_empty());
        assert_eq!(
            tokenize("I look like an engineer!"),
            ["i", "look", "like", "an", "engineer"]
        );
        assert_eq!(
            tokenize("Don't stop @user #ILookLikeAnEngineer"),
            ["don't", "stop", "ilooklikeanengineer"]
        );
    }

    #[test]
    fn tokenize_urls_apostrophes_and_mentions() {
        assert_eq!(
            tokenize("see https://t.co/abc (http://x.y) now"),
            ["see", "now"]
        );
        assert_eq!(tokenize("'quoted' dogs' rock'n'roll"), ["quoted", "dogs", "rock'n'roll"]);
        assert_eq!(tokenize("it\u{2019}s"), ["it's"]);
        assert_eq!(tokenize("mail a@b.com @x_y, hi"), ["mail", "a", "b", "com", "hi"]);
        assert_eq!(tokenize("über CAFÉ 42"), ["über", "café", "42"]);
    }

    #[test]
    fn profile_examples() {
        let lex = Lexicon::new(vec![cat(1, "pronoun")], vec![Entry::new("i", &[1]), Entry::new("we", &[1])]).unwrap();
        let p = category_profile::<String>(&[], &lex);
        assert_eq!(p.word_count, 0);
        assert_eq!(p.percentages, [0.0]);

        let p = category_profile(&tokenize("I look like an engineer"), &lex);
        assert_eq!(p.word_count, 5);
        assert_eq!(p.percentages, [20.0]);

        let lex = Lexicon::new(vec![cat(7, "occup")], vec![Entry::new("engineer*", &[7])]).unwrap();
        let p = category_profile(&["engineers", "engineer"], &lex);
        assert_eq!(p.percentages, [100.0]);
    }

    #[test]
    fn literal_beats_wildcard_and_longest_prefix_wins() {
        let lex = Lexicon::new(
            vec![cat(1, "a"), cat(2, "b"), cat(3, "c")],
            vec![
                Entry::new("happy", &[1]),
                Entry::new("happy*", &[2]),
                Entry::new("hap*", &[3]),
            ],
        )
        .unwrap();
        assert_eq!(lex.lookup("happy"), Some(&[0usize][..]));
        assert_eq!(lex.lookup("happyness"), Some(&[1usize][..]));
        assert_eq!(lex.lookup("hapless"), Some(&[2usize][..]));
    }

    #[test]
    fn text_feature_examples() {
        let lex = Lexicon::new(vec![cat(1, "pos")], vec![Entry::new("good", &[1])]).unwrap();
        assert_eq!(extract_text_features("", "", &lex), [0.0; 4]);
        let v = extract_text_features("good good bad", "", &lex);
        assert_eq!(v, [3.0, 200.0 / 3.0, 0.0, 0.0]);
        assert!((v[1] - 66.666_666_666_666_67).abs() < 1e-12);
        let swapped = extract_text_features("", "good good bad", &lex);
        assert_eq!(swapped, [0.0, 0.0, 3.0, 200.0 / 3.0]);
    }

    fn small_lexicon() -> Lexicon {
        Lexicon::parse("%\n1\ta\n2\tb\n3\tc\n%\nab\t1\nab*\t2\nb*\t1\t3\nca\t2\t3\n").unwrap()
    }

    proptest! {
        #[test]
        fn bag_of_words(mut tokens in proptest::collection::vec("[abc]{1,4}", 0..20), seed in any::<u64>()) {
            let lex = small_lexicon();
            let before = category_profile(&tokens, &lex);
            let n = tokens.len();
            if n > 1 {
                tokens.rotate_left((seed as usize) % n);
                tokens.reverse();
            }
            prop_assert_eq!(category_profile(&tokens, &lex), before);
        }

        #[test]
        fn duplicating_tokens(tokens in proptest::collection::vec("[abc]{1,4}", 1..20)) {
            let lex = small_lexicon();
            let once = category_profile(&tokens, &lex);
            let doubled: Vec<String> = tokens.iter().chain(tokens.iter()).cloned().collect();
            let twice = category_profile(&doubled, &lex);
            prop_assert_eq!(twice.word_count, 2 * once.word_count);
            for (a, b) in once.percentages.iter().zip(&twice.percentages) {
                prop_assert!((a - b).abs() <= 1e-12 * a.abs().max(1.0));
            }
        }

        #[test]
        fn removing_a_category(tokens in proptest::collection::vec("[abc]{1,4}", 0..20), drop in 1u32..=3) {
            let lex = small_lexicon();
            let full = category_profile(&tokens, &lex);
            let reduced_lex = lex.without_category(drop);
            let reduced = category_profile(&tokens, &reduced_lex);
            let kept: Vec<f64> = lex.categories().iter().zip(&full.percentages)
                .filter(|(c, _)| c.id != drop).map(|(_, p)| *p).collect();
            prop_assert_eq!(reduced.percentages, kept);
        }

        #[test]
        fn percentages_bounded(text in "[abc @#']{0,40}") {
            let p = category_profile(&tokenize(&text), &small_lexicon());
            prop_assert!(p.percentages.iter().all(|v| (0.0..=100.0).contains(v)));
            if p.word_count == 0 {
                prop_assert!(p.percentages.iter().all(|v| *v == 0.0));
            }
        }
    }
}
