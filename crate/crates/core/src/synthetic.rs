//! Seeded synthetic datasets with class signal planted in every feature
//! group. Used by tests, benchmarks and the `synth` command.

use std::collections::HashMap;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal};

use crate::error::{Error, Result};
use crate::image::{ImageProbabilityVector, InMemoryImages, IMAGE_DIM};
use crate::name::NameDatabase;
use crate::record::{LabelMap, UserRecord, UserType};
use crate::text::Lexicon;

pub const LEXICON_TEXT: &str = "%
1\tsports
2\tfamily
3\tbusiness
4\tsocial
5\temotion
6\ttime
%
game\t1
team\t1
score\t1
football\t1
match\t1
coach*\t1
mom\t2
kids\t2
husband\t2
baby\t2
famil*\t2
love\t2\t5
we\t3\t4
our\t3\t4
company\t3
product\t3
launch\t3
invest*\t3
customer*\t3
friend*\t4
you\t4
happy\t5
great\t5
sad\t5
today\t6
now\t6
week*\t6
";

pub const NAME_DB_TEXT: &str = "name,gender,frequency,country
james,M,4800,US
john,M,4500,US
robert,M,4300,US
michael,M,4200,US
david,M,3800,US
william,M,3700,GB
thomas,M,2500,GB
daniel,M,2400,US
mary,F,3400,US
patricia,F,1500,US
jennifer,F,1400,US
linda,F,1300,US
elizabeth,F,1250,GB
susan,F,1100,US
sarah,F,1000,GB
emma,F,950,GB
jordan,M,500,US
jordan,F,480,US
taylor,F,520,US
taylor,M,470,US
";

const MALE_NAMES: &[&str] = &["james", "john", "robert", "michael", "david", "william", "thomas", "daniel"];
const FEMALE_NAMES: &[&str] = &["mary", "patricia", "jennifer", "linda", "elizabeth", "susan", "sarah", "emma"];
const SURNAMES: &[&str] = &["smith", "garcia", "nguyen", "okafor", "kowalski", "tanaka", "muller", "silva"];
const ORG_WORDS: &[&str] = &["acme", "globex", "initech", "umbrella", "stark", "wayne", "tyrell", "cyberdyne"];
const ORG_SUFFIXES: &[&str] = &["labs", "inc", "systems", "group", "institute", "foundation"];

const MALE_WORDS: &[&str] = &["game", "team", "score", "football", "match", "coaching"];
const FEMALE_WORDS: &[&str] = &["mom", "kids", "husband", "baby", "family", "love"];
const ORG_WORDS_TEXT: &[&str] = &["we", "our", "company", "product", "launch", "investors", "customers"];
const IMAGE_SIGNAL_DIMS: usize = 10;
const IMAGE_BACKGROUND_DIMS: usize = 100;

const FILLER: &[&str] = &[
    "the", "a", "engineer", "code", "you", "friends", "happy", "great", "today", "now", "weekend", "look", "like",
    "build", "data", "city", "coffee", "and", "with", "this",
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticConfig {
    pub per_class: usize,
    pub seed: u64,
    /// Chance that a feature group independently expresses a random class
    /// instead of the true one.
    pub corruption: f64,
    /// Chance that a record carries an image.
    pub image_rate: f64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            per_class: 200,
            seed: 0,
            corruption: 0.05,
            image_rate: 0.8,
        }
    }
}

pub struct SyntheticDataset {
    pub records: Vec<UserRecord>,
    pub labels: Vec<UserType>,
    pub name_db: NameDatabase,
    pub lexicon: Lexicon,
    pub images: InMemoryImages,
}

impl SyntheticDataset {
    pub fn label_map(&self) -> LabelMap {
        self.records
            .iter()
            .zip(&self.labels)
            .map(|(r, y)| (r.user_id.clone(), *y))
            .collect()
    }

    /// Write `users.jsonl`, `labels.csv`, `names.csv`, `lexicon.dic` and an
    /// `images/` directory into `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<()> {
        let write = |name: &str, body: String| {
            let p = dir.join(name);
            fs::write(&p, body).map_err(|e| Error::io(&p, e))
        };
        let images = dir.join("images");
        fs::create_dir_all(&images).map_err(|e| Error::io(&images, e))?;
        let mut users = String::new();
        let mut labels = String::from("user_id,label\n");
        for (r, y) in self.records.iter().zip(&self.labels) {
            users.push_str(&r.to_json_line());
            users.push('\n');
            labels.push_str(&format!("{},{}\n", r.user_id, y));
        }
        write("users.jsonl", users)?;
        write("labels.csv", labels)?;
        write("names.csv", NAME_DB_TEXT.to_string())?;
        write("lexicon.dic", LEXICON_TEXT.to_string())?;
        for (reference, v) in self.images.iter() {
            let p = images.join(reference);
            fs::write(&p, v.to_text()).map_err(|e| Error::io(&p, e))?;
        }
        Ok(())
    }
}

pub fn name_database() -> NameDatabase {
    NameDatabase::parse(NAME_DB_TEXT).expect("built-in name table parses")
}

pub fn lexicon() -> Lexicon {
    Lexicon::parse(LEXICON_TEXT).expect("built-in lexicon parses")
}

/// Record generator; one instance yields a reproducible sequence.
pub struct Generator {
    rng: ChaCha8Rng,
    config: SyntheticConfig,
}

fn pick<'a>(rng: &mut ChaCha8Rng, words: &[&'a str]) -> &'a str {
    words[rng.random_range(0..words.len())]
}

fn lognormal(rng: &mut ChaCha8Rng, median: f64) -> u64 {
    LogNormal::new(median.ln(), 0.5)
        .expect("valid log-normal parameters")
        .sample(rng)
        .round() as u64
}

impl Generator {
    pub fn new(config: SyntheticConfig) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
        }
    }

    fn expressed(&mut self, class: UserType) -> UserType {
        if self.rng.random_bool(self.config.corruption) {
            UserType::ALL[self.rng.random_range(0..3)]
        } else {
            class
        }
    }

    fn screen_name(&mut self, class: UserType) -> String {
        let r = &mut self.rng;
        match class {
            UserType::Male => format!("{} {}", pick(r, MALE_NAMES), pick(r, SURNAMES)),
            UserType::Female => format!("{} {}", pick(r, FEMALE_NAMES), pick(r, SURNAMES)),
            UserType::Organization => format!("{} {}", pick(r, ORG_WORDS), pick(r, ORG_SUFFIXES)),
        }
    }

    fn text(&mut self, class: UserType, signal: usize, filler: usize) -> String {
        let vocab = match class {
            UserType::Male => MALE_WORDS,
            UserType::Female => FEMALE_WORDS,
            UserType::Organization => ORG_WORDS_TEXT,
        };
        let mut words: Vec<&str> = (0..signal).map(|_| pick(&mut self.rng, vocab)).collect();
        words.extend((0..filler).map(|_| pick(&mut self.rng, FILLER)));
        for i in (1..words.len()).rev() {
            let j = self.rng.random_range(0..=i);
            words.swap(i, j);
        }
        words.join(" ")
    }

    /// A peaked distribution: most mass on a few class-specific categories,
    /// a little spread over a shared pool of background categories, none
    /// elsewhere.
    fn image(&mut self, class: UserType) -> ImageProbabilityVector {
        let mut v = vec![0.0; IMAGE_DIM];
        let lo = class.index() * IMAGE_SIGNAL_DIMS;
        for x in &mut v[lo..lo + IMAGE_SIGNAL_DIMS] {
            *x = self.rng.random_range(20.0..40.0);
        }
        let pool = 3 * IMAGE_SIGNAL_DIMS;
        for x in &mut v[pool..pool + IMAGE_BACKGROUND_DIMS] {
            *x = self.rng.random_range(0.0..1.0);
        }
        let total: f64 = v.iter().sum();
        v.iter_mut().for_each(|x| *x /= total);
        ImageProbabilityVector::new(v).expect("normalized vector is valid")
    }

    /// One record of the given class. The image, when drawn, is returned
    /// alongside and referenced as `<user_id>.vec`.
    pub fn record(&mut self, user_id: String, class: UserType, with_images: bool) -> (UserRecord, Option<ImageProbabilityVector>) {
        let mut r = UserRecord::new(user_id);
        let name_class = self.expressed(class);
        r.screen_name = self.screen_name(name_class);
        r.handle = r.screen_name.replace(' ', "_");

        let text_class = self.expressed(class);
        let signal = self.rng.random_range(3..6);
        let filler = self.rng.random_range(4..10);
        r.tweet_text = self.text(text_class, signal, filler);
        let filler = self.rng.random_range(2..6);
        r.description = self.text(text_class, 3, filler);

        let meta_class = self.expressed(class);
        let rng = &mut self.rng;
        r.friends_count = lognormal(rng, if meta_class == UserType::Male { 3000.0 } else { 300.0 });
        r.statuses_count = lognormal(rng, if meta_class == UserType::Female { 30000.0 } else { 2000.0 });
        r.followers_count = lognormal(rng, if meta_class == UserType::Organization { 60000.0 } else { 600.0 });
        r.verified = rng.random_bool(if meta_class == UserType::Organization { 0.7 } else { 0.03 });
        r.retweet_count = lognormal(rng, 4.0);
        r.favorite_count = lognormal(rng, 8.0);

        let mut image = None;
        if with_images && self.rng.random_bool(self.config.image_rate) {
            let image_class = self.expressed(class);
            image = Some(self.image(image_class));
            r.image_vector_ref = Some(format!("{}.vec", r.user_id));
        }
        (r, image)
    }
}

/// Classes interleave (male, female, organization, male, ...).
pub fn generate(config: &SyntheticConfig) -> SyntheticDataset {
    let mut g = Generator::new(*config);
    let n = config.per_class * 3;
    let mut records = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    let mut images = InMemoryImages::new();
    for i in 0..n {
        let class = UserType::ALL[i % 3];
        let (r, img) = g.record(format!("u{i:06}"), class, true);
        if let (Some(reference), Some(v)) = (&r.image_vector_ref, img) {
            images.insert(reference.clone(), v);
        }
        records.push(r);
        labels.push(class);
    }
    SyntheticDataset {
        records,
        labels,
        name_db: name_database(),
        lexicon: lexicon(),
        images,
    }
}

/// An endless, lazily generated record stream without images.
pub fn stream(seed: u64) -> impl Iterator<Item = UserRecord> {
    let mut g = Generator::new(SyntheticConfig {
        seed,
        ..SyntheticConfig::default()
    });
    (0u64..).map(move |i| g.record(format!("s{i}"), UserType::ALL[(i % 3) as usize], false).0)
}

/// Label of each generated record by user id.
pub fn labels_by_id(dataset: &SyntheticDataset) -> HashMap<&str, UserType> {
    dataset
        .records
        .iter()
        .zip(&dataset.labels)
        .map(|(r, y)| (r.user_id.as_str(), *y))
        .collect()
}
