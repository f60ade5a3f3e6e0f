//! A small rule-based tokenizer, tagger and dependency attacher for review
//! text. It is tuned for the constructions the tag extractor reads:
//! attributive adjectives, copular complements, subjects and negation.

use std::ops::Range;

use super::lexicon::{is_auxiliary, is_clause_break, is_copula, is_negation, lexical_pos};
use super::{AnnotatedSentence, AnnotatedToken, Dep, Pos};

const CONTRACTION_SUFFIXES: &[&str] = &["'s", "'re", "'ve", "'ll", "'d", "'m"];

/// Splits text into word and punctuation tokens, separating clitics the way
/// treebank tokenizers do (`isn't` → `is n't`, `it's` → `it 's`).
fn tokenize(text: &str) -> Vec<String> {
    let normalized = text.replace(['\u{2019}', '\u{2018}'], "'");
    let chars: Vec<char> = normalized.chars().collect();
    let mut words = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_alphanumeric() {
            let start = i;
            while i < chars.len()
                && (chars[i].is_alphanumeric()
                    || (chars[i] == '\''
                        && i + 1 < chars.len()
                        && chars[i + 1].is_alphanumeric()))
            {
                i += 1;
            }
            split_clitics(&chars[start..i].iter().collect::<String>(), &mut words);
        } else {
            words.push(c.to_string());
            i += 1;
        }
    }
    words
}

fn split_clitics(word: &str, out: &mut Vec<String>) {
    let lower = word.to_lowercase();
    if lower.len() > 3 && lower.ends_with("n't") {
        let cut = word.len() - 3;
        out.push(word[..cut].to_string());
        out.push(word[cut..].to_string());
        return;
    }
    for suffix in CONTRACTION_SUFFIXES {
        if lower.len() > suffix.len() && lower.ends_with(suffix) {
            let cut = word.len() - suffix.len();
            out.push(word[..cut].to_string());
            out.push(word[cut..].to_string());
            return;
        }
    }
    out.push(word.to_string());
}

fn split_sentences(tokens: Vec<String>) -> Vec<Vec<String>> {
    let mut sentences = Vec::new();
    let mut current = Vec::new();
    for (i, t) in tokens.iter().enumerate() {
        current.push(t.clone());
        let terminal = matches!(t.as_str(), "." | "!" | "?");
        let next_terminal = tokens
            .get(i + 1)
            .is_some_and(|n| matches!(n.as_str(), "." | "!" | "?"));
        if terminal && !next_terminal {
            sentences.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        sentences.push(current);
    }
    sentences
}

fn tag(lower: &[String]) -> Vec<Pos> {
    let mut pos: Vec<Pos> = Vec::with_capacity(lower.len());
    for (i, w) in lower.iter().enumerate() {
        let prev = if i > 0 { Some(pos[i - 1]) } else { None };
        let p = match lexical_pos(w) {
            Some(p) => p,
            // `'s` is a copula after pronouns and adverbs, possessive elsewhere.
            None => match prev {
                Some(Pos::Pron | Pos::Det | Pos::Adv) => Pos::Verb,
                _ => Pos::Part,
            },
        };
        let p = if w == "like"
            && (matches!(prev, Some(Pos::Pron))
                || (i > 0 && (is_auxiliary(&lower[i - 1]) || lower[i - 1] == "really")))
        {
            Pos::Verb
        } else {
            p
        };
        pos.push(p);
    }
    pos
}

struct Builder<'a> {
    lower: &'a [String],
    pos: &'a [Pos],
    head: Vec<Option<usize>>,
    dep: Vec<Dep>,
}

impl<'a> Builder<'a> {
    fn attach(&mut self, i: usize, head: usize, dep: Dep) {
        if self.head[i].is_none() && i != head {
            self.head[i] = Some(head);
            self.dep[i] = dep;
        }
    }

    /// Cuts at a break token when the following stretch contains a verb.
    fn clauses(&self) -> Vec<Range<usize>> {
        let n = self.lower.len();
        let mut starts = vec![0];
        for i in 1..n {
            if !is_clause_break(&self.lower[i]) {
                continue;
            }
            let end = (i + 1..n)
                .find(|&j| is_clause_break(&self.lower[j]))
                .unwrap_or(n);
            let right_has_verb = (i + 1..end).any(|j| self.pos[j] == Pos::Verb);
            let left_has_content = (*starts.last().unwrap()..i).any(|j| self.pos[j] != Pos::Punct);
            if right_has_verb && left_has_content {
                starts.push(i);
            }
        }
        let mut ranges: Vec<Range<usize>> = starts.windows(2).map(|w| w[0]..w[1]).collect();
        ranges.push(*starts.last().unwrap()..n);
        ranges
    }

    /// Attaches every token of the clause and returns its root.
    fn clause(&mut self, range: Range<usize>) -> usize {
        let (lo, hi) = (range.start, range.end);
        let pos = self.pos;

        // Noun runs: all but the last token are compounds of the last.
        let mut noun_heads = Vec::new();
        let mut run_head = vec![None; hi];
        let mut i = lo;
        while i < hi {
            if pos[i] == Pos::Noun {
                let start = i;
                while i < hi && pos[i] == Pos::Noun {
                    i += 1;
                }
                let h = i - 1;
                noun_heads.push(h);
                for j in start..i {
                    run_head[j] = Some(h);
                    self.attach(j, h, Dep::Other);
                }
            } else {
                i += 1;
            }
        }

        // Verb group: the first verb plus any auxiliaries, adverbs and
        // particles it chains through; the last verb is the main one.
        let first_verb = (lo..hi).find(|&j| pos[j] == Pos::Verb);
        let main = first_verb.map(|v0| {
            let mut main = v0;
            let mut k = v0 + 1;
            while k < hi && matches!(pos[k], Pos::Verb | Pos::Adv | Pos::Part) {
                if pos[k] == Pos::Verb {
                    main = k;
                }
                k += 1;
            }
            main
        });

        let pobj_of = |j: usize| -> Option<usize> {
            let mut k = j;
            while k > lo {
                k -= 1;
                match pos[k] {
                    Pos::Adp => return Some(k),
                    Pos::Det | Pos::Adj | Pos::Adv | Pos::Other | Pos::Noun
                        if run_head[k] != Some(k) =>
                    {
                        continue
                    }
                    _ => return None,
                }
            }
            None
        };

        let root = match main {
            Some(m) => m,
            None => noun_heads
                .iter()
                .copied()
                .find(|&h| pobj_of(h).is_none())
                .or_else(|| noun_heads.first().copied())
                .or_else(|| (lo..hi).find(|&j| pos[j] == Pos::Adj))
                .or_else(|| (lo..hi).find(|&j| pos[j] != Pos::Punct))
                .unwrap_or(lo),
        };
        let copular = main.is_some_and(|m| is_copula(&self.lower[m]));

        if let (Some(v0), Some(m)) = (first_verb, main) {
            let subject = (lo..v0).find(|&j| {
                (pos[j] == Pos::Pron || run_head[j] == Some(j)) && pobj_of(j).is_none()
            });
            if let Some(s) = subject {
                self.attach(s, m, Dep::Nsubj);
            }
            for j in v0..m {
                let dep = if is_negation(&self.lower[j]) { Dep::Neg } else { Dep::Other };
                self.attach(j, m, dep);
            }
        }

        for &h in &noun_heads {
            if let Some(adp) = pobj_of(h) {
                self.attach(h, adp, Dep::Other);
            }
        }
        for j in lo..hi {
            if pos[j] != Pos::Adp {
                continue;
            }
            let host = noun_heads
                .iter()
                .rev()
                .copied()
                .find(|&h| h < j && !(h..j).any(|k| pos[k] == Pos::Verb));
            self.attach(j, host.unwrap_or(root), Dep::Other);
        }

        for j in lo..hi {
            match pos[j] {
                Pos::Adj => {
                    if let Some(noun) = self.attributive_target(j, hi) {
                        self.attach(j, run_head[noun].unwrap_or(noun), Dep::Amod);
                    } else if copular && main.is_some_and(|m| j > m) {
                        self.attach(j, root, Dep::Acomp);
                    }
                }
                Pos::Adv if j + 1 < hi && matches!(pos[j + 1], Pos::Adj | Pos::Adv) => {
                    let dep = if is_negation(&self.lower[j]) { Dep::Neg } else { Dep::Other };
                    let target = if dep == Dep::Neg { root } else { j + 1 };
                    self.attach(j, target, dep);
                }
                Pos::Det => {
                    let noun = (j + 1..hi)
                        .take_while(|&k| matches!(pos[k], Pos::Adj | Pos::Adv | Pos::Det | Pos::Other | Pos::Noun))
                        .find(|&k| run_head[k] == Some(k));
                    if let Some(noun) = noun {
                        self.attach(j, noun, Dep::Other);
                    }
                }
                _ => {}
            }
            let dep = if is_negation(&self.lower[j]) { Dep::Neg } else { Dep::Other };
            self.attach(j, root, dep);
        }
        root
    }

    /// Noun modified by the adjective at `j`, looking through adverbs and
    /// coordinated adjectives (`cheap and tasty noodles`).
    fn attributive_target(&self, j: usize, hi: usize) -> Option<usize> {
        let mut k = j + 1;
        while k < hi {
            match self.pos[k] {
                Pos::Noun => return Some(k),
                Pos::Adj | Pos::Adv => k += 1,
                _ if matches!(self.lower[k].as_str(), "," | "and" | "or") => {
                    let next = (k + 1..hi).find(|&m| self.pos[m] != Pos::Adv)?;
                    if self.pos[next] != Pos::Adj {
                        return None;
                    }
                    k = next;
                }
                _ => return None,
            }
        }
        None
    }
}

fn parse(words: &[String]) -> AnnotatedSentence {
    let lower: Vec<String> = words.iter().map(|w| w.to_lowercase()).collect();
    let pos = tag(&lower);
    let mut b = Builder {
        lower: &lower,
        pos: &pos,
        head: vec![None; words.len()],
        dep: vec![Dep::Other; words.len()],
    };
    let roots: Vec<usize> = b
        .clauses()
        .into_iter()
        .map(|range| b.clause(range))
        .collect();
    let root = roots[0];
    b.head[root] = Some(root);
    b.dep[root] = Dep::Root;
    for &r in &roots[1..] {
        b.attach(r, root, Dep::Other);
    }
    let tokens = words
        .iter()
        .enumerate()
        .map(|(i, w)| AnnotatedToken {
            index: i,
            text: w.clone(),
            pos: pos[i],
            dep: b.dep[i],
            head: b.head[i].unwrap_or(root),
        })
        .collect();
    AnnotatedSentence::new(tokens).expect("annotator builds well-formed trees")
}

/// Tokenizes, tags and parses `text`, one tree per sentence.
pub fn annotate(text: &str) -> Vec<AnnotatedSentence> {
    split_sentences(tokenize(text))
        .iter()
        .map(|words| parse(words))
        .collect()
}
