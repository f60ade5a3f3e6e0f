//! Reviews, food services, queries and relevance judgments, plus the shared
//! tokenizer.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Number of star classes (0..=4).
pub const NUM_LABELS: usize = 5;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Review {
    pub id: String,
    pub service_id: String,
    pub text: String,
    pub label: u8,
    #[serde(default)]
    pub categories: Vec<String>,
    #[serde(default)]
    pub timestamp: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoodService {
    pub id: String,
    pub name: String,
    #[serde(default)]
    pub categories: Vec<String>,
    #[serde(default)]
    pub location: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Query {
    pub id: String,
    pub text: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelevanceJudgment {
    pub query_id: String,
    pub doc_id: String,
    pub label: u8,
}

/// Raw review line; `label` is wide so out-of-range values get a proper error.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReviewRecord {
    id: String,
    service_id: String,
    text: String,
    label: i64,
    #[serde(default)]
    categories: Vec<String>,
    #[serde(default)]
    timestamp: Option<i64>,
}

/// Lowercases, trims and deduplicates categories, keeping first occurrences.
pub fn normalize_categories<I, S>(categories: I) -> Vec<String>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for c in categories {
        let c = c.as_ref().trim().to_lowercase();
        if !c.is_empty() && seen.insert(c.clone()) {
            out.push(c);
        }
    }
    out
}

fn read_lines(path: &Path) -> Result<Vec<String>> {
    let file = fs::File::open(path).map_err(|e| Error::io(path, e))?;
    BufReader::new(file)
        .lines()
        .collect::<std::io::Result<Vec<_>>>()
        .map_err(|e| Error::io(path, e))
}

/// Loads reviews from JSONL. Blank lines are ignored; line numbers in errors
/// are 1-based.
pub fn load_reviews(path: impl AsRef<Path>) -> Result<Vec<Review>> {
    let path = path.as_ref();
    parse_reviews(path, read_lines(path)?.iter().map(String::as_str))
}

pub(crate) fn parse_reviews<'a>(
    path: &Path,
    lines: impl Iterator<Item = &'a str>,
) -> Result<Vec<Review>> {
    let mut seen = HashSet::new();
    let mut reviews = Vec::new();
    for (i, line) in lines.enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let rec: ReviewRecord =
            serde_json::from_str(line).map_err(|e| Error::parse(path, lineno, e.to_string()))?;
        if rec.id.is_empty() {
            return Err(Error::parse(path, lineno, "empty review id"));
        }
        if !(0..NUM_LABELS as i64).contains(&rec.label) {
            return Err(Error::LabelOutOfRange {
                label: rec.label,
                classes: NUM_LABELS,
            });
        }
        if !seen.insert(rec.id.clone()) {
            return Err(Error::DuplicateId {
                id: rec.id,
                line: lineno,
            });
        }
        reviews.push(Review {
            id: rec.id,
            service_id: rec.service_id,
            text: rec.text,
            label: rec.label as u8,
            categories: normalize_categories(rec.categories),
            timestamp: rec.timestamp.unwrap_or(0),
        });
    }
    Ok(reviews)
}

pub fn write_reviews(path: impl AsRef<Path>, reviews: &[Review]) -> Result<()> {
    let path = path.as_ref();
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut out = BufWriter::new(file);
    for r in reviews {
        serde_json::to_writer(&mut out, r)?;
        out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn load_services(path: impl AsRef<Path>) -> Result<Vec<FoodService>> {
    let path = path.as_ref();
    let mut seen = HashSet::new();
    let mut services = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let mut s: FoodService =
            serde_json::from_str(line).map_err(|e| Error::parse(path, i + 1, e.to_string()))?;
        if s.id.is_empty() {
            return Err(Error::parse(path, i + 1, "empty service id"));
        }
        if !seen.insert(s.id.clone()) {
            return Err(Error::DuplicateId { id: s.id, line: i + 1 });
        }
        s.categories = normalize_categories(&s.categories);
        services.push(s);
    }
    Ok(services)
}

fn tsv_fields<'a>(path: &Path, lineno: usize, line: &'a str, n: usize) -> Result<Vec<&'a str>> {
    let fields: Vec<&str> = line.splitn(n, '\t').collect();
    if fields.len() != n {
        return Err(Error::parse(
            path,
            lineno,
            format!("expected {n} tab-separated fields, found {}", fields.len()),
        ));
    }
    Ok(fields)
}

/// Loads `query_id<TAB>text` lines.
pub fn load_queries(path: impl AsRef<Path>) -> Result<Vec<Query>> {
    let path = path.as_ref();
    let mut seen = HashSet::new();
    let mut queries = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f = tsv_fields(path, i + 1, line, 2)?;
        let (id, text) = (f[0].trim(), f[1].trim());
        if text.is_empty() {
            return Err(Error::parse(path, i + 1, "empty query text"));
        }
        if !seen.insert(id.to_string()) {
            return Err(Error::DuplicateId {
                id: id.to_string(),
                line: i + 1,
            });
        }
        queries.push(Query {
            id: id.to_string(),
            text: text.to_string(),
        });
    }
    Ok(queries)
}

/// Loads `query_id<TAB>doc_id<TAB>label` lines with binary labels.
pub fn load_judgments(path: impl AsRef<Path>) -> Result<Vec<RelevanceJudgment>> {
    let path = path.as_ref();
    let mut seen = HashSet::new();
    let mut judgments = Vec::new();
    for (i, line) in read_lines(path)?.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let f = tsv_fields(path, i + 1, line, 3)?;
        let label: u8 = match f[2].trim() {
            "0" => 0,
            "1" => 1,
            other => {
                return Err(Error::parse(
                    path,
                    i + 1,
                    format!("relevance label must be 0 or 1, found `{other}`"),
                ))
            }
        };
        let key = (f[0].trim().to_string(), f[1].trim().to_string());
        if !seen.insert(key.clone()) {
            return Err(Error::parse(
                path,
                i + 1,
                format!("duplicate judgment for ({}, {})", key.0, key.1),
            ));
        }
        judgments.push(RelevanceJudgment {
            query_id: key.0,
            doc_id: key.1,
            label,
        });
    }
    Ok(judgments)
}

/// Lowercases and splits on every non-alphanumeric character.
pub fn tokenize(text: &str) -> Vec<String> {
    text.to_lowercase()
        .split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_string)
        .collect()
}

/// Seeded stratified split. Each label's test share is `round(n * fraction)`
/// items; both halves keep input order.
pub fn split_dataset(
    reviews: &[Review],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<Review>, Vec<Review>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "test_fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    if reviews.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut by_label: BTreeMap<u8, Vec<usize>> = BTreeMap::new();
    for (i, r) in reviews.iter().enumerate() {
        by_label.entry(r.label).or_default().push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut in_test = vec![false; reviews.len()];
    for idx in by_label.values_mut() {
        idx.shuffle(&mut rng);
        let take = (idx.len() as f64 * test_fraction).round() as usize;
        for &i in idx.iter().take(take) {
            in_test[i] = true;
        }
    }
    let (test, train): (Vec<_>, Vec<_>) = reviews
        .iter()
        .zip(in_test)
        .partition(|(_, t)| *t);
    Ok((
        train.into_iter().map(|(r, _)| r.clone()).collect(),
        test.into_iter().map(|(r, _)| r.clone()).collect(),
    ))
}

/// Reviews plus the services they belong to.
#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub services: Vec<FoodService>,
    pub reviews: Vec<Review>,
    review_pos: HashMap<String, usize>,
}

impl Corpus {
    /// Checks id uniqueness and that every review's service exists.
    pub fn new(services: Vec<FoodService>, reviews: Vec<Review>) -> Result<Self> {
        let service_ids: HashSet<&str> = services.iter().map(|s| s.id.as_str()).collect();
        if service_ids.len() != services.len() {
            return Err(Error::InvalidArgument("duplicate service id".into()));
        }
        let mut review_pos = HashMap::with_capacity(reviews.len());
        for (i, r) in reviews.iter().enumerate() {
            if !service_ids.contains(r.service_id.as_str()) {
                return Err(Error::InvalidArgument(format!(
                    "review `{}` references unknown service `{}`",
                    r.id, r.service_id
                )));
            }
            if review_pos.insert(r.id.clone(), i).is_some() {
                return Err(Error::DuplicateId {
                    id: r.id.clone(),
                    line: i + 1,
                });
            }
        }
        Ok(Corpus {
            services,
            reviews,
            review_pos,
        })
    }

    pub fn review(&self, id: &str) -> Option<&Review> {
        self.review_pos.get(id).map(|&i| &self.reviews[i])
    }

    pub fn service(&self, id: &str) -> Option<&FoodService> {
        self.services.iter().find(|s| s.id == id)
    }

    /// Returns a new corpus with `review` appended.
    pub fn with_review(&self, review: Review) -> Result<Self> {
        let mut reviews = self.reviews.clone();
        reviews.push(review);
        Corpus::new(self.services.clone(), reviews)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn parse(text: &str) -> Result<Vec<Review>> {
        parse_reviews(Path::new("mem"), text.lines())
    }

    #[test]
    fn empty_file_is_empty() {
        assert!(parse("").unwrap().is_empty());
    }

    #[test]
    fn single_review() {
        let r = parse(
            r#"{"id":"r1","service_id":"s1","text":"Great food","label":4,"categories":["noodles"]}"#,
        )
        .unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r[0].label, 4);
        assert_eq!(r[0].categories, vec!["noodles"]);
        assert_eq!(r[0].timestamp, 0);
    }

    #[test]
    fn duplicate_id_names_second_line() {
        let text = concat!(
            r#"{"id":"r1","service_id":"s1","text":"a","label":1,"categories":[]}"#,
            "\n",
            r#"{"id":"r1","service_id":"s1","text":"b","label":2,"categories":[]}"#
        );
        match parse(text) {
            Err(Error::DuplicateId { id, line }) => {
                assert_eq!(id, "r1");
                assert_eq!(line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn label_out_of_range() {
        let text = r#"{"id":"r1","service_id":"s1","text":"a","label":5,"categories":[]}"#;
        assert!(matches!(parse(text), Err(Error::LabelOutOfRange { label: 5, .. })));
    }

    #[test]
    fn malformed_line_reports_line_number() {
        let text = "\n{not json}";
        match parse(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn categories_are_deduplicated() {
        let text = r#"{"id":"r1","service_id":"s1","text":"a","label":1,"categories":["Rice","rice","noodles"]}"#;
        assert_eq!(parse(text).unwrap()[0].categories, vec!["rice", "noodles"]);
    }

    #[test]
    fn tokenizer_examples() {
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("Great food!!"), vec!["great", "food"]);
        assert_eq!(
            tokenize("chicken-rice, S$3.50"),
            vec!["chicken", "rice", "s", "3", "50"]
        );
        assert_eq!(tokenize("Crème BRÛLÉE"), vec!["crème", "brûlée"]);
    }

    fn labelled(n_per_label: usize) -> Vec<Review> {
        (0..NUM_LABELS * n_per_label)
            .map(|i| Review {
                id: format!("r{i}"),
                service_id: "s".into(),
                text: String::new(),
                label: (i % NUM_LABELS) as u8,
                categories: vec![],
                timestamp: 0,
            })
            .collect()
    }

    #[test]
    fn stratified_split() {
        let reviews = labelled(20);
        let (train, test) = split_dataset(&reviews, 0.1, 7).unwrap();
        assert_eq!((train.len(), test.len()), (90, 10));
        for label in 0..NUM_LABELS as u8 {
            assert_eq!(test.iter().filter(|r| r.label == label).count(), 2);
        }
        let again = split_dataset(&reviews, 0.1, 7).unwrap();
        assert_eq!((train, test), again);
    }

    #[test]
    fn split_rejects_bad_fraction() {
        let reviews = labelled(2);
        assert!(split_dataset(&reviews, 1.5, 7).is_err());
        assert!(split_dataset(&reviews, 0.0, 7).is_err());
        assert!(split_dataset(&[], 0.5, 7).is_err());
    }

    #[test]
    fn corpus_requires_known_service() {
        let reviews = labelled(1);
        assert!(Corpus::new(vec![], reviews.clone()).is_err());
        let svc = FoodService {
            id: "s".into(),
            name: "S".into(),
            categories: vec![],
            location: String::new(),
        };
        let c = Corpus::new(vec![svc], reviews).unwrap();
        assert_eq!(c.review("r3").unwrap().label, 3);
    }

    proptest! {
        #[test]
        fn tokenize_idempotent(text in "\\PC{0,60}") {
            let once = tokenize(&text);
            prop_assert_eq!(tokenize(&once.join(" ")), once);
        }

        #[test]
        fn split_is_a_partition(n in 1usize..60, frac in 0.05f64..0.95, seed in any::<u64>()) {
            let reviews: Vec<Review> = labelled(12).into_iter().take(n).collect();
            let (train, test) = split_dataset(&reviews, frac, seed).unwrap();
            let mut ids: Vec<&str> = train.iter().chain(&test).map(|r| r.id.as_str()).collect();
            ids.sort_unstable();
            let mut expected: Vec<&str> = reviews.iter().map(|r| r.id.as_str()).collect();
            expected.sort_unstable();
            prop_assert_eq!(ids, expected);
            for label in 0..NUM_LABELS as u8 {
                let total = reviews.iter().filter(|r| r.label == label).count() as f64;
                let got = test.iter().filter(|r| r.label == label).count() as f64;
                prop_assert!((got - total * frac).abs() <= 1.0);
            }
        }
    }
}
