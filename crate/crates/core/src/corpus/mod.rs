//! Annotated tweet corpus: data model, ingest, validation, summaries,
//! keyword scanning, and synthetic generation.
//!
//! A corpus is a flat list of [`AnnotatedTweet`] rows, each belonging to a
//! stratum (language or country cut) and to one of two sampling designs:
//! a uniform random sample or an engagement-weighted sample. Downstream
//! estimators choose rows by stratum and sample kind; prevalence-style
//! statistics use random rows, engagement statistics use weighted rows.

mod io;
mod keywords;
mod summary;
mod synth;

pub use io::{load_corpus, write_corpus, CorpusFormat};
pub use keywords::{scan_keywords, KeywordMatch};
pub use summary::{summarize_strata, ClassSummary, StratumSummary};
pub use synth::{
    generate_synthetic, BetaParams, LogNormalParams, RemovalRates, ScoreModel, StratumSynth,
    SynthConfig,
};

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sampling design a row was collected under.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SampleKind {
    /// Uniform random sample of the stratum's daily tweets.
    Random,
    /// Sample drawn with probability proportional to total engagement.
    EngagementWeighted,
}

impl SampleKind {
    pub fn as_str(self) -> &'static str {
        match self {
            SampleKind::Random => "random",
            SampleKind::EngagementWeighted => "engagement_weighted",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "random" => Some(SampleKind::Random),
            "engagement_weighted" => Some(SampleKind::EngagementWeighted),
            _ => None,
        }
    }
}

/// Primary annotation label. Categories are mutually exclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Hate,
    Offensive,
    Neutral,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Hate => "hate",
            Label::Offensive => "offensive",
            Label::Neutral => "neutral",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "hate" => Some(Label::Hate),
            "offensive" => Some(Label::Offensive),
            "neutral" => Some(Label::Neutral),
            _ => None,
        }
    }
}

/// Why a tweet is no longer publicly visible, as observed at re-crawl.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RemovalReason {
    /// The author's account was suspended by the platform.
    Suspended,
    /// The author deactivated their own account.
    Deactivated,
    /// The tweet is gone but the cause is not attributable.
    DeletedOrUnknown,
    /// The tweet is still up. Required exactly when `removed` is false.
    None,
}

impl RemovalReason {
    pub fn as_str(self) -> &'static str {
        match self {
            RemovalReason::Suspended => "suspended",
            RemovalReason::Deactivated => "deactivated",
            RemovalReason::DeletedOrUnknown => "deleted_or_unknown",
            RemovalReason::None => "none",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "suspended" => Some(RemovalReason::Suspended),
            "deactivated" => Some(RemovalReason::Deactivated),
            "deleted_or_unknown" => Some(RemovalReason::DeletedOrUnknown),
            "none" => Some(RemovalReason::None),
            _ => None,
        }
    }
}

/// One annotated tweet.
///
/// Invariants (checked by [`validate_corpus`] and enforced on ingest):
/// * `violent` is present if and only if `primary_label == Hate`;
/// * `removal_reason == None` if and only if `removed == false`;
/// * `tweet_id` is unique within a corpus.
///
/// `scam` and `adult` are `None` for rows outside the policy-annotated
/// subsample; engagement counters are non-negative by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotatedTweet {
    pub tweet_id: String,
    pub stratum: String,
    pub sample_kind: SampleKind,
    pub primary_label: Label,
    pub violent: Option<bool>,
    pub scam: Option<bool>,
    pub adult: Option<bool>,
    pub likes: u64,
    pub replies: u64,
    pub retweets: u64,
    pub quotes: u64,
    pub removed: bool,
    pub removal_reason: RemovalReason,
    pub author_id: String,
    pub author_verified: bool,
    pub followers: u64,
    pub following: u64,
    pub tweet_count: u64,
    pub is_reply: bool,
    pub possibly_sensitive: bool,
    /// Continuous hate scores keyed by model id, in `[0, 1]`.
    pub scores: BTreeMap<String, f64>,
    /// Tweet text; present on synthetic corpora, absent on de-identified ones.
    pub text: Option<String>,
}

impl AnnotatedTweet {
    /// Total engagement: likes + replies + retweets + quotes.
    pub fn engagement(&self) -> u64 {
        self.likes + self.replies + self.retweets + self.quotes
    }

    /// Natural log of one plus total engagement.
    pub fn log_engagement(&self) -> f64 {
        (self.engagement() as f64).ln_1p()
    }

    pub fn is_hate(&self) -> bool {
        self.primary_label == Label::Hate
    }

    pub fn is_violent_hate(&self) -> bool {
        self.is_hate() && self.violent == Some(true)
    }

    /// Score for `model_id`, or an error naming the row and model.
    pub fn score(&self, model_id: &str) -> Result<f64> {
        self.scores.get(model_id).copied().ok_or_else(|| {
            Error::invalid(format!(
                "tweet `{}` has no score for model `{model_id}`",
                self.tweet_id
            ))
        })
    }
}

/// Where a corpus came from, for report headers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CorpusSource {
    File { path: PathBuf },
    Generator { seed: u64 },
    Memory,
}

/// Provenance record attached to every corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub source: CorpusSource,
    pub row_count: usize,
}

/// An in-memory corpus with its stratum index and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    rows: Vec<AnnotatedTweet>,
    strata: BTreeSet<String>,
    has_text: bool,
    provenance: Provenance,
}

impl Corpus {
    /// Build a corpus from rows without validating invariants; call
    /// [`validate_corpus`] to check them. The stratum index and text flag
    /// are derived from the rows.
    pub fn new(rows: Vec<AnnotatedTweet>, source: CorpusSource) -> Self {
        let strata = rows.iter().map(|r| r.stratum.clone()).collect();
        let has_text = rows.iter().any(|r| r.text.is_some());
        let row_count = rows.len();
        Corpus {
            rows,
            strata,
            has_text,
            provenance: Provenance { source, row_count },
        }
    }

    pub fn rows(&self) -> &[AnnotatedTweet] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Stratum codes present in the corpus, sorted.
    pub fn strata(&self) -> &BTreeSet<String> {
        &self.strata
    }

    /// Whether any row carries text (keyword scanning requires it).
    pub fn has_text(&self) -> bool {
        self.has_text
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    /// All model ids that appear in score maps, sorted.
    pub fn model_ids(&self) -> BTreeSet<String> {
        self.rows
            .iter()
            .flat_map(|r| r.scores.keys().cloned())
            .collect()
    }

    /// All rows of `stratum`, or an error if the stratum is unknown.
    pub fn stratum_rows(&self, stratum: &str) -> Result<Vec<&AnnotatedTweet>> {
        if !self.strata.contains(stratum) {
            return Err(Error::UnknownStratum {
                stratum: stratum.to_string(),
            });
        }
        Ok(self.rows.iter().filter(|r| r.stratum == stratum).collect())
    }

    /// Rows of `stratum` collected under `kind`.
    pub fn sample_rows(&self, stratum: &str, kind: SampleKind) -> Result<Vec<&AnnotatedTweet>> {
        Ok(self
            .stratum_rows(stratum)?
            .into_iter()
            .filter(|r| r.sample_kind == kind)
            .collect())
    }
}

/// Validation rule identifiers, used in violation reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    /// `violent` must be present iff the primary label is hate.
    ViolentAnnotation,
    /// `removal_reason` must be `none` iff `removed` is false.
    RemovalReason,
    /// `tweet_id` must be unique.
    DuplicateTweetId,
}

/// A single invariant violation found by [`validate_corpus`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    /// 1-based row index within the corpus.
    pub row: usize,
    pub rule: Rule,
    pub detail: String,
}

/// Check every corpus invariant and return all violations (empty when the
/// corpus is well formed). Row indices are 1-based; duplicates are reported
/// at the second and later occurrences.
pub fn validate_corpus(corpus: &Corpus) -> Vec<Violation> {
    let mut violations = Vec::new();
    let mut seen: BTreeMap<&str, usize> = BTreeMap::new();

    for (idx, row) in corpus.rows().iter().enumerate() {
        let rownum = idx + 1;

        match (row.primary_label, row.violent) {
            (Label::Hate, None) => violations.push(Violation {
                row: rownum,
                rule: Rule::ViolentAnnotation,
                detail: format!("tweet `{}` is hate but `violent` is null", row.tweet_id),
            }),
            (Label::Offensive | Label::Neutral, Some(_)) => violations.push(Violation {
                row: rownum,
                rule: Rule::ViolentAnnotation,
                detail: format!(
                    "tweet `{}` is {} but carries a `violent` annotation",
                    row.tweet_id,
                    row.primary_label.as_str()
                ),
            }),
            _ => {}
        }

        let reason_is_none = row.removal_reason == RemovalReason::None;
        if row.removed == reason_is_none {
            violations.push(Violation {
                row: rownum,
                rule: Rule::RemovalReason,
                detail: format!(
                    "tweet `{}`: removed={} with removal_reason={}",
                    row.tweet_id,
                    row.removed,
                    row.removal_reason.as_str()
                ),
            });
        }

        if let Some(first) = seen.insert(row.tweet_id.as_str(), rownum) {
            violations.push(Violation {
                row: rownum,
                rule: Rule::DuplicateTweetId,
                detail: format!(
                    "tweet_id `{}` already appeared at row {first}",
                    row.tweet_id
                ),
            });
        }
    }

    violations
}

#[cfg(test)]
pub(crate) fn test_row(id: &str, stratum: &str) -> AnnotatedTweet {
    AnnotatedTweet {
        tweet_id: id.to_string(),
        stratum: stratum.to_string(),
        sample_kind: SampleKind::Random,
        primary_label: Label::Neutral,
        violent: None,
        scam: None,
        adult: None,
        likes: 0,
        replies: 0,
        retweets: 0,
        quotes: 0,
        removed: false,
        removal_reason: RemovalReason::None,
        author_id: format!("author-{id}"),
        author_verified: false,
        followers: 10,
        following: 10,
        tweet_count: 100,
        is_reply: false,
        possibly_sensitive: false,
        scores: BTreeMap::new(),
        text: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn engagement_sums_all_four_counters() {
        let mut row = test_row("t1", "en");
        row.likes = 1;
        row.replies = 2;
        row.retweets = 3;
        row.quotes = 4;
        assert_eq!(row.engagement(), 10);
        assert!((row.log_engagement() - (11.0_f64).ln()).abs() < 1e-15);
    }

    #[test]
    fn validate_accepts_well_formed_corpus() {
        let mut hate = test_row("t1", "en");
        hate.primary_label = Label::Hate;
        hate.violent = Some(false);
        let mut removed = test_row("t2", "en");
        removed.removed = true;
        removed.removal_reason = RemovalReason::Suspended;
        let corpus = Corpus::new(vec![hate, removed], CorpusSource::Memory);
        assert!(validate_corpus(&corpus).is_empty());
    }

    #[test]
    fn validate_flags_removal_reason_mismatch() {
        let mut row = test_row("t1", "en");
        row.removed = false;
        row.removal_reason = RemovalReason::Suspended;
        let corpus = Corpus::new(vec![row], CorpusSource::Memory);
        let violations = validate_corpus(&corpus);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].rule, Rule::RemovalReason);
        assert_eq!(violations[0].row, 1);
    }

    #[test]
    fn validate_flags_missing_and_spurious_violent_annotation() {
        let mut hate = test_row("t1", "en");
        hate.primary_label = Label::Hate; // violent missing
        let mut neutral = test_row("t2", "en");
        neutral.violent = Some(true); // spurious
        let corpus = Corpus::new(vec![hate, neutral], CorpusSource::Memory);
        let violations = validate_corpus(&corpus);
        assert_eq!(violations.len(), 2);
        assert!(violations.iter().all(|v| v.rule == Rule::ViolentAnnotation));
    }

    #[test]
    fn validate_reports_duplicates_at_second_occurrence() {
        let corpus = Corpus::new(
            vec![
                test_row("t1", "en"),
                test_row("t2", "en"),
                test_row("t1", "ar"),
            ],
            CorpusSource::Memory,
        );
        let violations = validate_corpus(&corpus);
        assert_eq!(violations.len(), 1);
        assert_eq!(violations[0].rule, Rule::DuplicateTweetId);
        assert_eq!(violations[0].row, 3);
    }

    #[test]
    fn stratum_lookup_errors_on_unknown_stratum() {
        let corpus = Corpus::new(vec![test_row("t1", "en")], CorpusSource::Memory);
        assert!(corpus.stratum_rows("en").is_ok());
        assert!(matches!(
            corpus.stratum_rows("xx"),
            Err(Error::UnknownStratum { .. })
        ));
    }

    #[test]
    fn sample_rows_filters_by_kind() {
        let mut ew = test_row("t2", "en");
        ew.sample_kind = SampleKind::EngagementWeighted;
        let corpus = Corpus::new(vec![test_row("t1", "en"), ew], CorpusSource::Memory);
        assert_eq!(
            corpus.sample_rows("en", SampleKind::Random).unwrap().len(),
            1
        );
        assert_eq!(
            corpus
                .sample_rows("en", SampleKind::EngagementWeighted)
                .unwrap()
                .len(),
            1
        );
    }
}
