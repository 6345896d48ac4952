//! Per-stratum corpus summaries: label-class counts, removal rates, and
//! suspension rates.

use serde::Serialize;

use super::{Corpus, Label, RemovalReason};

/// Counts and removal rate for one label class within a stratum.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClassSummary {
    /// Rows in the class.
    pub count: u64,
    /// Rows in the class that were removed.
    pub removed: u64,
    /// `removed / count`; `None` when the class is empty.
    pub removal_rate: Option<f64>,
}

impl ClassSummary {
    fn new(count: u64, removed: u64) -> Self {
        let removal_rate = (count > 0).then(|| removed as f64 / count as f64);
        ClassSummary {
            count,
            removed,
            removal_rate,
        }
    }
}

/// Summary of one stratum.
///
/// `hate + offensive + neutral` counts sum to `n`; `violent_hate` and
/// `nonviolent_hate` partition `hate`. All rates are proportions in
/// `[0, 1]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumSummary {
    pub stratum: String,
    pub n: u64,
    pub hate: ClassSummary,
    pub violent_hate: ClassSummary,
    pub nonviolent_hate: ClassSummary,
    pub offensive: ClassSummary,
    pub neutral: ClassSummary,
    /// Rows whose removal reason is an account suspension.
    pub suspended: u64,
    /// `suspended / n`.
    pub suspension_rate: f64,
}

#[derive(Default)]
struct Tally {
    n: u64,
    counts: [u64; 5],
    removed: [u64; 5],
    suspended: u64,
}

const HATE: usize = 0;
const VIOLENT: usize = 1;
const NONVIOLENT: usize = 2;
const OFFENSIVE: usize = 3;
const NEUTRAL: usize = 4;

/// Summarise every stratum of the corpus, sorted by stratum code.
///
/// Rows of both sample kinds are included; callers wanting a single design
/// should filter the corpus first.
pub fn summarize_strata(corpus: &Corpus) -> Vec<StratumSummary> {
    let mut tallies: std::collections::BTreeMap<&str, Tally> = corpus
        .strata()
        .iter()
        .map(|s| (s.as_str(), Tally::default()))
        .collect();

    for row in corpus.rows() {
        let tally = tallies
            .get_mut(row.stratum.as_str())
            .expect("stratum index covers every row");
        tally.n += 1;
        let classes: &[usize] = match row.primary_label {
            Label::Hate => {
                if row.violent == Some(true) {
                    &[HATE, VIOLENT]
                } else {
                    &[HATE, NONVIOLENT]
                }
            }
            Label::Offensive => &[OFFENSIVE],
            Label::Neutral => &[NEUTRAL],
        };
        for &c in classes {
            tally.counts[c] += 1;
            if row.removed {
                tally.removed[c] += 1;
            }
        }
        if row.removal_reason == RemovalReason::Suspended {
            tally.suspended += 1;
        }
    }

    tallies
        .into_iter()
        .map(|(stratum, t)| StratumSummary {
            stratum: stratum.to_string(),
            n: t.n,
            hate: ClassSummary::new(t.counts[HATE], t.removed[HATE]),
            violent_hate: ClassSummary::new(t.counts[VIOLENT], t.removed[VIOLENT]),
            nonviolent_hate: ClassSummary::new(t.counts[NONVIOLENT], t.removed[NONVIOLENT]),
            offensive: ClassSummary::new(t.counts[OFFENSIVE], t.removed[OFFENSIVE]),
            neutral: ClassSummary::new(t.counts[NEUTRAL], t.removed[NEUTRAL]),
            suspended: t.suspended,
            suspension_rate: if t.n > 0 {
                t.suspended as f64 / t.n as f64
            } else {
                0.0
            },
        })
        .collect()
}
