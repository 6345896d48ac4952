//! Keyword scanning over corpus text.
//!
//! Matching is byte-wise substring search after a shared normalisation:
//! Unicode NFC, ASCII case folding, and whitespace collapsing (runs of
//! whitespace become a single space, leading/trailing whitespace dropped).
//! Full Unicode case folding is deliberately out of scope; keyword lists
//! targeting non-ASCII case distinctions should be pre-folded.

use serde::Serialize;
use unicode_normalization::UnicodeNormalization;

use super::Corpus;
use crate::error::{Error, Result};

/// One keyword hit: a (tweet, keyword) pair. A tweet that contains a
/// keyword several times still yields one match record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct KeywordMatch {
    /// 1-based row index within the corpus.
    pub row: usize,
    pub tweet_id: String,
    pub keyword: String,
}

/// Normalise text for matching: NFC, ASCII lowercase, collapsed whitespace.
fn normalize(s: &str) -> String {
    let folded: String = s.nfc().collect::<String>().to_ascii_lowercase();
    folded.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Scan every row's text for the given keywords.
///
/// Matches are emitted in row order and, within a row, in keyword order.
/// Errors if the corpus carries no text at all, or if any keyword
/// normalises to the empty string.
pub fn scan_keywords(corpus: &Corpus, keywords: &[String]) -> Result<Vec<KeywordMatch>> {
    if !corpus.has_text() {
        return Err(Error::TextUnavailable);
    }
    let normalized_keywords: Vec<(String, &str)> = keywords
        .iter()
        .map(|k| {
            let n = normalize(k);
            if n.is_empty() {
                Err(Error::invalid(format!("keyword `{k}` normalises to empty")))
            } else {
                Ok((n, k.as_str()))
            }
        })
        .collect::<Result<_>>()?;

    let mut matches = Vec::new();
    for (idx, row) in corpus.rows().iter().enumerate() {
        let Some(text) = &row.text else { continue };
        let haystack = normalize(text);
        for (needle, original) in &normalized_keywords {
            if haystack.contains(needle.as_str()) {
                matches.push(KeywordMatch {
                    row: idx + 1,
                    tweet_id: row.tweet_id.clone(),
                    keyword: (*original).to_string(),
                });
            }
        }
    }
    Ok(matches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{test_row, Corpus, CorpusSource};

    fn corpus_with_texts(texts: &[&str]) -> Corpus {
        let rows = texts
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let mut r = test_row(&format!("t{i}"), "en");
                r.text = Some((*t).to_string());
                r
            })
            .collect();
        Corpus::new(rows, CorpusSource::Memory)
    }

    #[test]
    fn case_and_whitespace_insensitive_substring_match() {
        let corpus = corpus_with_texts(&["prefix KILL  ALL\texamples suffix", "benign text"]);
        let matches = scan_keywords(&corpus, &["kill all examples".to_string()]).unwrap();
        assert_eq!(matches.len(), 1);
        assert_eq!(matches[0].tweet_id, "t0");
        assert_eq!(matches[0].row, 1);
    }

    #[test]
    fn repeated_occurrences_yield_one_match_record() {
        let corpus = corpus_with_texts(&["bad thing bad thing"]);
        let matches = scan_keywords(&corpus, &["bad thing".to_string()]).unwrap();
        assert_eq!(matches.len(), 1);
    }

    #[test]
    fn multiple_keywords_report_in_keyword_order() {
        let corpus = corpus_with_texts(&["alpha beta gamma"]);
        let keywords = vec!["gamma".to_string(), "alpha".to_string()];
        let matches = scan_keywords(&corpus, &keywords).unwrap();
        let found: Vec<&str> = matches.iter().map(|m| m.keyword.as_str()).collect();
        assert_eq!(found, vec!["gamma", "alpha"]);
    }

    #[test]
    fn nfc_normalisation_unifies_composed_and_decomposed_forms() {
        // "é" composed (U+00E9) vs decomposed (U+0065 U+0301).
        let corpus = corpus_with_texts(&["caf\u{0065}\u{0301} talk"]);
        let matches = scan_keywords(&corpus, &["caf\u{00E9}".to_string()]).unwrap();
        assert_eq!(matches.len(), 1);
    }

    #[test]
    fn corpus_without_text_is_an_error() {
        let corpus = Corpus::new(vec![test_row("t0", "en")], CorpusSource::Memory);
        assert!(matches!(
            scan_keywords(&corpus, &["x".to_string()]),
            Err(Error::TextUnavailable)
        ));
    }

    #[test]
    fn empty_keyword_is_rejected() {
        let corpus = corpus_with_texts(&["anything"]);
        assert!(scan_keywords(&corpus, &["   ".to_string()]).is_err());
    }

    #[test]
    fn rows_without_text_are_skipped() {
        let mut with_text = test_row("t0", "en");
        with_text.text = Some("needle here".into());
        let without = test_row("t1", "en");
        let corpus = Corpus::new(vec![with_text, without], CorpusSource::Memory);
        let matches = scan_keywords(&corpus, &["needle".to_string()]).unwrap();
        assert_eq!(matches.len(), 1);
    }
}
