//! Tab-separated annotation files: one token per line as
//! `index<TAB>text<TAB>pos<TAB>head<TAB>dep`, sentences separated by blank
//! lines. A sentence may carry its hand-checked tags on a
//! `#pairs<TAB>tag,tag` line; other `#` lines are comments.

use std::fs;
use std::path::Path;

use super::{AnnotatedSentence, AnnotatedToken, TagPair};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GoldSentence {
    pub sentence: AnnotatedSentence,
    /// `None` when the sentence has no `#pairs` line.
    pub pairs: Option<Vec<TagPair>>,
}

pub fn load_annotated(path: impl AsRef<Path>) -> Result<Vec<AnnotatedSentence>> {
    Ok(load_gold(path)?.into_iter().map(|g| g.sentence).collect())
}

pub fn load_gold(path: impl AsRef<Path>) -> Result<Vec<GoldSentence>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_annotated(path, &text)
}

pub fn parse_annotated(path: &Path, text: &str) -> Result<Vec<GoldSentence>> {
    let mut out = Vec::new();
    let mut tokens: Vec<AnnotatedToken> = Vec::new();
    let mut pairs: Option<Vec<TagPair>> = None;
    let mut start_line = 1;

    let mut flush = |tokens: &mut Vec<AnnotatedToken>,
                     pairs: &mut Option<Vec<TagPair>>,
                     line: usize|
     -> Result<()> {
        if tokens.is_empty() {
            if pairs.is_some() {
                return Err(Error::parse(path, line, "#pairs line without tokens"));
            }
            return Ok(());
        }
        let sentence = AnnotatedSentence::new(std::mem::take(tokens))
            .map_err(|e| Error::parse(path, line, e.to_string()))?;
        out.push(GoldSentence {
            sentence,
            pairs: pairs.take(),
        });
        Ok(())
    };

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            flush(&mut tokens, &mut pairs, start_line)?;
            start_line = line_no + 1;
            continue;
        }
        if let Some(rest) = line.strip_prefix("#pairs") {
            let parsed = rest
                .split(',')
                .map(str::trim)
                .filter(|t| !t.is_empty())
                .map(|t| t.parse::<TagPair>())
                .collect::<Result<Vec<_>>>()
                .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
            pairs = Some(parsed);
            continue;
        }
        if line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 5 {
            return Err(Error::parse(
                path,
                line_no,
                format!("expected 5 tab-separated fields, found {}", fields.len()),
            ));
        }
        let number = |s: &str, what: &str| {
            s.trim()
                .parse::<usize>()
                .map_err(|_| Error::parse(path, line_no, format!("bad {what} `{s}`")))
        };
        let token = AnnotatedToken {
            index: number(fields[0], "index")?,
            text: fields[1].to_string(),
            pos: fields[2]
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(path, line_no, e.to_string()))?,
            head: number(fields[3], "head")?,
            dep: fields[4]
                .trim()
                .parse()
                .map_err(|e: Error| Error::parse(path, line_no, e.to_string()))?,
        };
        tokens.push(token);
    }
    flush(&mut tokens, &mut pairs, start_line)?;
    Ok(out)
}

/// Serializes one sentence in the same format (no trailing blank line).
pub fn to_conll(sentence: &AnnotatedSentence) -> String {
    sentence
        .tokens()
        .iter()
        .map(|t| {
            format!(
                "{}\t{}\t{}\t{}\t{}\n",
                t.index,
                t.text,
                t.pos.as_str(),
                t.head,
                t.dep.as_str()
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tagging::{annotate, extract_pairs};

    const SAMPLE: &str = "\
# a comment
#pairs\tnot-good-food
0\tThis\tDET\t1\tdet
1\tfood\tNOUN\t2\tnsubj
2\tis\tAUX\t2\tROOT
3\tnot\tPART\t2\tneg
4\tgood\tADJ\t2\tacomp

0\tYum\tINTJ\t0\tROOT
";

    #[test]
    fn parses_sample() {
        let gold = parse_annotated(Path::new("sample"), SAMPLE).unwrap();
        assert_eq!(gold.len(), 2);
        assert_eq!(gold[0].pairs.as_ref().unwrap()[0].to_string(), "not-good-food");
        assert_eq!(extract_pairs(&gold[0].sentence), gold[0].pairs.clone().unwrap());
        assert!(gold[1].pairs.is_none());
    }

    #[test]
    fn malformed_input_reports_line() {
        let bad_head = "0\ta\tNOUN\t0\tROOT\n1\tb\tNOUN\t7\tdep\n";
        match parse_annotated(Path::new("x"), bad_head) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        let cycle = "0\ta\tNOUN\t0\tROOT\n1\tb\tNOUN\t2\tdep\n2\tc\tNOUN\t1\tdep\n";
        assert!(parse_annotated(Path::new("x"), cycle).is_err());
        let short = "0\ta\tNOUN\t0\n";
        match parse_annotated(Path::new("x"), short) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 1),
            other => panic!("unexpected {other:?}"),
        }
        assert!(parse_annotated(Path::new("x"), "0\ta\t\t0\tROOT\n").is_err());
    }

    #[test]
    fn round_trip_through_text() {
        for s in annotate("The chicken rice was cheap. Service is slow but friendly!") {
            let text = to_conll(&s);
            let back = parse_annotated(Path::new("rt"), &text).unwrap();
            assert_eq!(back[0].sentence, s);
        }
    }
}
