//! Adjective-noun review tags extracted from POS/dependency annotations.

mod annotate;
mod conll;
mod lexicon;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sentiment::Polarity;

pub use annotate::annotate;
pub use conll::{load_annotated, load_gold, parse_annotated, to_conll, GoldSentence};
pub use lexicon::is_negation;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pos {
    Adj,
    Noun,
    Verb,
    Adv,
    Det,
    Adp,
    Part,
    Pron,
    Punct,
    Other,
}

impl Pos {
    pub fn as_str(self) -> &'static str {
        match self {
            Pos::Adj => "ADJ",
            Pos::Noun => "NOUN",
            Pos::Verb => "VERB",
            Pos::Adv => "ADV",
            Pos::Det => "DET",
            Pos::Adp => "ADP",
            Pos::Part => "PART",
            Pos::Pron => "PRON",
            Pos::Punct => "PUNCT",
            Pos::Other => "OTHER",
        }
    }
}

impl FromStr for Pos {
    type Err = Error;

    /// Accepts the ten tags plus the common universal tags that fold into
    /// them (`AUX` → VERB, `PROPN` → NOUN, anything else → OTHER).
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Annotation("empty POS tag".into()));
        }
        Ok(match s.to_ascii_uppercase().as_str() {
            "ADJ" => Pos::Adj,
            "NOUN" | "PROPN" => Pos::Noun,
            "VERB" | "AUX" => Pos::Verb,
            "ADV" => Pos::Adv,
            "DET" => Pos::Det,
            "ADP" => Pos::Adp,
            "PART" => Pos::Part,
            "PRON" => Pos::Pron,
            "PUNCT" => Pos::Punct,
            _ => Pos::Other,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Dep {
    Amod,
    Acomp,
    Nsubj,
    Neg,
    Root,
    Other,
}

impl Dep {
    pub fn as_str(self) -> &'static str {
        match self {
            Dep::Amod => "amod",
            Dep::Acomp => "acomp",
            Dep::Nsubj => "nsubj",
            Dep::Neg => "neg",
            Dep::Root => "ROOT",
            Dep::Other => "other",
        }
    }
}

impl FromStr for Dep {
    type Err = Error;

    /// Labels outside the five the extractor reads become `Other`.
    fn from_str(s: &str) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Annotation("empty dependency label".into()));
        }
        Ok(match s {
            "amod" => Dep::Amod,
            "acomp" => Dep::Acomp,
            "nsubj" => Dep::Nsubj,
            "neg" => Dep::Neg,
            "ROOT" | "root" => Dep::Root,
            _ => Dep::Other,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedToken {
    pub index: usize,
    pub text: String,
    pub pos: Pos,
    pub dep: Dep,
    /// Index of the syntactic head; the root points at itself.
    pub head: usize,
}

/// A dependency tree over the tokens of one sentence.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnnotatedSentence {
    tokens: Vec<AnnotatedToken>,
}

impl AnnotatedSentence {
    /// Validates contiguous indices, head range, a single root and
    /// acyclicity.
    pub fn new(tokens: Vec<AnnotatedToken>) -> Result<Self> {
        let n = tokens.len();
        if n == 0 {
            return Err(Error::Annotation("empty sentence".into()));
        }
        for (i, t) in tokens.iter().enumerate() {
            if t.index != i {
                return Err(Error::Annotation(format!(
                    "token index {} at position {i}",
                    t.index
                )));
            }
            if t.head >= n {
                return Err(Error::Annotation(format!(
                    "head {} of token {i} out of range for {n} tokens",
                    t.head
                )));
            }
        }
        let roots: Vec<usize> = (0..n).filter(|&i| tokens[i].head == i).collect();
        if roots.len() != 1 {
            return Err(Error::Annotation(format!(
                "expected exactly one root, found {}",
                roots.len()
            )));
        }
        for start in 0..n {
            let mut at = start;
            for _ in 0..n {
                if tokens[at].head == at {
                    break;
                }
                at = tokens[at].head;
            }
            if tokens[at].head != at {
                return Err(Error::Annotation(format!("cycle through token {start}")));
            }
        }
        Ok(AnnotatedSentence { tokens })
    }

    pub fn tokens(&self) -> &[AnnotatedToken] {
        &self.tokens
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn root(&self) -> usize {
        self.tokens
            .iter()
            .position(|t| t.head == t.index)
            .expect("validated sentence has a root")
    }

    pub fn text(&self) -> String {
        self.tokens
            .iter()
            .map(|t| t.text.as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Direct dependents of `index`.
    pub fn children(&self, index: usize) -> impl Iterator<Item = usize> + '_ {
        self.tokens
            .iter()
            .filter(move |t| t.head == index && t.index != index)
            .map(|t| t.index)
    }

    /// The token plus all of its transitive dependents.
    pub fn subtree(&self, index: usize) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        let mut stack = vec![index];
        while let Some(i) = stack.pop() {
            if out.insert(i) {
                stack.extend(self.children(i));
            }
        }
        out
    }
}

/// An opinion tag such as `beautiful-restaurant` or `not-good-food`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct TagPair {
    pub negated: bool,
    pub adjective: String,
    pub noun: String,
}

impl TagPair {
    pub fn new(negated: bool, adjective: &str, noun: &str) -> Self {
        TagPair {
            negated,
            adjective: adjective.to_lowercase(),
            noun: noun.to_lowercase(),
        }
    }

    /// Tag colour: the owning review's polarity, flipped when negated.
    pub fn polarity(&self, review: Polarity) -> Polarity {
        if self.negated {
            review.flip()
        } else {
            review
        }
    }
}

impl fmt::Display for TagPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.negated {
            f.write_str("not-")?;
        }
        write!(f, "{}-{}", self.adjective, self.noun)
    }
}

impl FromStr for TagPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (negated, rest) = match s.strip_prefix("not-") {
            Some(rest) if rest.contains('-') => (true, rest),
            _ => (false, s),
        };
        match rest.split_once('-') {
            Some((adj, noun)) if !adj.is_empty() && !noun.is_empty() && !noun.contains('-') => {
                Ok(TagPair::new(negated, adj, noun))
            }
            _ => Err(Error::Annotation(format!("malformed tag `{s}`"))),
        }
    }
}

/// Annotates raw text and extracts the tags of every sentence.
pub fn text_tags(text: &str) -> Vec<TagPair> {
    annotate(text).iter().flat_map(extract_pairs).collect()
}

fn negates(token: &AnnotatedToken) -> bool {
    token.dep == Dep::Neg || is_negation(&token.text)
}

/// Walks the adjectives of `sentence` in order:
/// an `amod` adjective pairs with its head when that head is a noun; an
/// `acomp` adjective pairs with the leftmost `nsubj` noun in the subtree of
/// its head. Either way, a negation anywhere in that subtree marks the pair
/// as negated.
pub fn extract_pairs(sentence: &AnnotatedSentence) -> Vec<TagPair> {
    let tokens = sentence.tokens();
    let mut pairs = Vec::new();
    for adj in tokens.iter().filter(|t| t.pos == Pos::Adj) {
        let head = &tokens[adj.head];
        let noun = match adj.dep {
            Dep::Amod if adj.head != adj.index && head.pos == Pos::Noun => Some(head),
            Dep::Acomp => sentence
                .subtree(adj.head)
                .into_iter()
                .map(|i| &tokens[i])
                .find(|t| t.pos == Pos::Noun && t.dep == Dep::Nsubj),
            _ => None,
        };
        let Some(noun) = noun else { continue };
        let negated = sentence
            .subtree(adj.head)
            .into_iter()
            .any(|i| negates(&tokens[i]));
        pairs.push(TagPair::new(negated, &adj.text, &noun.text));
    }
    pairs
}

/// A tag as displayed: merged across occurrences and coloured.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredTag {
    pub pair: TagPair,
    pub polarity: Polarity,
    pub count: usize,
}

impl ColoredTag {
    pub fn text(&self) -> String {
        self.pair.to_string()
    }
}

/// Merges pairs tagged with their review's polarity. Entries with the same
/// pair and resulting colour are counted together; output is sorted by
/// count descending, then tag text.
pub fn aggregate_tags<I>(pairs: I) -> Vec<ColoredTag>
where
    I: IntoIterator<Item = (TagPair, Polarity)>,
{
    let mut counts: BTreeMap<(String, Polarity), (TagPair, usize)> = BTreeMap::new();
    for (pair, review) in pairs {
        let polarity = pair.polarity(review);
        counts
            .entry((pair.to_string(), polarity))
            .or_insert_with(|| (pair, 0))
            .1 += 1;
    }
    let mut tags: Vec<ColoredTag> = counts
        .into_iter()
        .map(|((_, polarity), (pair, count))| ColoredTag {
            pair,
            polarity,
            count,
        })
        .collect();
    // Stable sort keeps the (text, polarity) order from the map for ties.
    tags.sort_by(|a, b| b.count.cmp(&a.count));
    tags
}
