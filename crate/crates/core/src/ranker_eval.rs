//! Classifier evaluation, both as rankers and as discrete predictors:
//! average precision, precision–recall curves, precision/recall/F1,
//! percentile-rank distributions of hateful items, and top-bin
//! composition.
//!
//! Conventions, applied uniformly:
//!
//! * the binary positive class is hate (violent and non-violent merged);
//! * tied scores cross every threshold together (grouped-tie convention),
//!   so curves and AP have one step per distinct score;
//! * an item's percentile rank is the share of the corpus scored
//!   *strictly higher* — the top item gets rank 0.0, and a median of
//!   0.032 means half of the hateful items sit in the top 3.2%.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::corpus::{AnnotatedTweet, Corpus, Label};
use crate::error::{Error, Result};
use crate::stats::quantile_type7;

/// One scored, labeled item; the unit every evaluation operates on.
#[derive(Debug, Clone, Serialize)]
pub struct ScoredItem {
    pub tweet_id: String,
    /// Model hatefulness score `ĥ_i`; must be finite.
    pub score: f64,
    /// Three-way annotation label; hate is the binary positive class.
    pub label: Label,
}

impl ScoredItem {
    pub fn is_positive(&self) -> bool {
        self.label == Label::Hate
    }
}

/// Extract scored items for one model from corpus rows, in row order.
/// Errors when a row lacks the model's score.
pub fn collect_scored(rows: &[&AnnotatedTweet], model_id: &str) -> Result<Vec<ScoredItem>> {
    rows.iter()
        .map(|r| {
            Ok(ScoredItem {
                tweet_id: r.tweet_id.clone(),
                score: r.score(model_id)?,
                label: r.primary_label,
            })
        })
        .collect()
}

/// One point of a precision–recall curve.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct PrPoint {
    pub threshold: f64,
    pub precision: f64,
    pub recall: f64,
}

/// Precision–recall curve with one point per distinct threshold, ordered
/// by descending threshold; the final point always has recall 1.
#[derive(Debug, Clone, Serialize)]
pub struct PrCurve {
    pub points: Vec<PrPoint>,
    pub ap: f64,
}

/// Precision, recall, and F1 of a discrete predictor.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Prf {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

/// Percentile ranks of the positive items (sorted ascending) and their
/// median.
#[derive(Debug, Clone, Serialize)]
pub struct PercentileRanks {
    /// Rank of every positive item, ascending. Rank = share of all items
    /// with a strictly higher score.
    pub ranks: Vec<f64>,
    pub median: f64,
}

impl PercentileRanks {
    /// Type-7 quantile of the rank distribution.
    pub fn quantile(&self, q: f64) -> f64 {
        quantile_type7(&self.ranks, q)
    }
}

/// Label composition of one contiguous bin of top-scored items.
#[derive(Debug, Clone, Serialize)]
pub struct BinComposition {
    /// 0-based bin index; bin 0 holds the highest-scored items.
    pub bin: usize,
    pub n: usize,
    pub hate_share: f64,
    pub offensive_share: f64,
    pub neutral_share: f64,
}

fn check_items(items: &[ScoredItem]) -> Result<()> {
    if let Some(bad) = items.iter().find(|i| !i.score.is_finite()) {
        return Err(Error::invalid(format!(
            "non-finite score {} for tweet `{}`",
            bad.score, bad.tweet_id
        )));
    }
    Ok(())
}

/// Items sorted by score descending, ties by tweet_id ascending.
fn sorted_desc(items: &[ScoredItem]) -> Vec<&ScoredItem> {
    let mut sorted: Vec<&ScoredItem> = items.iter().collect();
    sorted.sort_by(|a, b| {
        b.score
            .total_cmp(&a.score)
            .then_with(|| a.tweet_id.cmp(&b.tweet_id))
    });
    sorted
}

/// Cumulative confusion counts at each distinct-score threshold, walking
/// thresholds from high to low: `(threshold, tp, fp)` after all items
/// scoring ≥ threshold are predicted positive.
fn confusion_steps(sorted: &[&ScoredItem]) -> Vec<(f64, u64, u64)> {
    let mut steps = Vec::new();
    let mut tp = 0u64;
    let mut fp = 0u64;
    let mut i = 0;
    while i < sorted.len() {
        let threshold = sorted[i].score;
        while i < sorted.len() && sorted[i].score == threshold {
            if sorted[i].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        steps.push((threshold, tp, fp));
    }
    steps
}

fn total_positives(items: &[ScoredItem]) -> u64 {
    items.iter().filter(|i| i.is_positive()).count() as u64
}

/// Step-wise average precision `Σ (R_n − R_{n−1}) · P_n` over
/// descending-score thresholds, with tied scores grouped.
pub fn average_precision(items: &[ScoredItem]) -> Result<f64> {
    check_items(items)?;
    let positives = total_positives(items);
    if positives == 0 {
        return Err(Error::invalid(
            "average precision needs at least one positive item",
        ));
    }
    let sorted = sorted_desc(items);
    let steps = confusion_steps(&sorted);
    // Accumulate Σ Δtp · P_n and divide by the positive count once, so
    // the untied case reduces digit-for-digit to the mean of precisions
    // at the positive ranks.
    let mut weighted = 0.0;
    let mut prev_tp = 0;
    for (_, tp, fp) in steps {
        let precision = tp as f64 / (tp + fp) as f64;
        weighted += (tp - prev_tp) as f64 * precision;
        prev_tp = tp;
    }
    Ok(weighted / positives as f64)
}

/// Precision–recall curve over distinct thresholds; `ap` equals
/// [`average_precision`] on the same items.
pub fn pr_curve(items: &[ScoredItem]) -> Result<PrCurve> {
    let ap = average_precision(items)?;
    let positives = total_positives(items);
    let sorted = sorted_desc(items);
    let points = confusion_steps(&sorted)
        .into_iter()
        .map(|(threshold, tp, fp)| PrPoint {
            threshold,
            precision: tp as f64 / (tp + fp) as f64,
            recall: tp as f64 / positives as f64,
        })
        .collect();
    Ok(PrCurve { points, ap })
}

/// Best F1 over the curve's thresholds, with its threshold; F1 ties are
/// broken toward the higher threshold.
pub fn best_f1(items: &[ScoredItem]) -> Result<(f64, f64)> {
    check_items(items)?;
    let positives = total_positives(items);
    if positives == 0 {
        return Err(Error::invalid("best F1 needs at least one positive item"));
    }
    let sorted = sorted_desc(items);
    let mut best = (0.0f64, f64::NAN);
    for (threshold, tp, fp) in confusion_steps(&sorted) {
        // F1 = 2 tp / (tp + fp + positives), the harmonic mean unrolled.
        let f1 = 2.0 * tp as f64 / (tp + fp + positives) as f64;
        if f1 > best.0 || best.1.is_nan() {
            best = (f1, threshold);
        }
    }
    Ok(best)
}

/// Precision, recall, and F1 of a binary prediction vector against labels.
/// Precision is 0 when nothing is predicted positive; F1 is 0 when
/// precision + recall is 0.
pub fn discrete_prf(predictions: &[bool], labels: &[bool]) -> Result<Prf> {
    if predictions.len() != labels.len() {
        return Err(Error::invalid(format!(
            "{} predictions against {} labels",
            predictions.len(),
            labels.len()
        )));
    }
    let positives = labels.iter().filter(|&&l| l).count();
    if positives == 0 {
        return Err(Error::invalid("labels contain no positive items"));
    }
    let mut tp = 0u64;
    let mut fp = 0u64;
    for (&pred, &label) in predictions.iter().zip(labels) {
        if pred {
            if label {
                tp += 1;
            } else {
                fp += 1;
            }
        }
    }
    let precision = if tp + fp > 0 {
        tp as f64 / (tp + fp) as f64
    } else {
        0.0
    };
    let recall = tp as f64 / positives as f64;
    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        0.0
    };
    Ok(Prf {
        precision,
        recall,
        f1,
    })
}

/// Percentile ranks of the positive items: for each, the share of all
/// items with a strictly higher score.
pub fn percentile_ranks(items: &[ScoredItem]) -> Result<PercentileRanks> {
    check_items(items)?;
    if total_positives(items) == 0 {
        return Err(Error::invalid(
            "percentile ranks need at least one positive item",
        ));
    }
    let n = items.len() as f64;
    let sorted = sorted_desc(items);
    let mut ranks = Vec::new();
    let mut i = 0;
    while i < sorted.len() {
        let score = sorted[i].score;
        let before = i; // items with strictly higher score
        while i < sorted.len() && sorted[i].score == score {
            if sorted[i].is_positive() {
                ranks.push(before as f64 / n);
            }
            i += 1;
        }
    }
    ranks.sort_by(f64::total_cmp);
    let median = quantile_type7(&ranks, 0.5);
    Ok(PercentileRanks { ranks, median })
}

/// Composition of the top `⌈top_q·n⌉` items split into `n_bins`
/// contiguous bins (bin 0 highest-scored; the last bin takes the
/// remainder). Ties are broken by tweet_id for determinism.
pub fn top_bin_composition(
    items: &[ScoredItem],
    top_q: f64,
    n_bins: usize,
) -> Result<Vec<BinComposition>> {
    check_items(items)?;
    if !(top_q > 0.0 && top_q <= 1.0) {
        return Err(Error::invalid(format!(
            "top share must lie in (0, 1], got {top_q}"
        )));
    }
    if n_bins == 0 {
        return Err(Error::invalid("need at least one bin"));
    }
    if items.len() < n_bins {
        return Err(Error::invalid(format!(
            "{} items cannot fill {n_bins} bins",
            items.len()
        )));
    }
    let top = (top_q * items.len() as f64).ceil() as usize;
    if top < n_bins {
        return Err(Error::invalid(format!(
            "top selection of {top} items cannot fill {n_bins} bins"
        )));
    }
    let sorted = sorted_desc(items);
    let base = top / n_bins;
    let remainder = top % n_bins;
    let mut out = Vec::with_capacity(n_bins);
    let mut start = 0;
    for bin in 0..n_bins {
        let size = if bin == n_bins - 1 {
            base + remainder
        } else {
            base
        };
        let slice = &sorted[start..start + size];
        start += size;
        let mut hate = 0usize;
        let mut offensive = 0usize;
        let mut neutral = 0usize;
        for item in slice {
            match item.label {
                Label::Hate => hate += 1,
                Label::Offensive => offensive += 1,
                Label::Neutral => neutral += 1,
            }
        }
        out.push(BinComposition {
            bin,
            n: size,
            hate_share: hate as f64 / size as f64,
            offensive_share: offensive as f64 / size as f64,
            neutral_share: neutral as f64 / size as f64,
        });
    }
    Ok(out)
}

/// The model with the highest AP over the corpus rows, plus every
/// candidate's AP. AP ties go to the lexicographically smallest id.
#[derive(Debug, Clone, Serialize)]
pub struct BestModel {
    pub best: String,
    pub aps: BTreeMap<String, f64>,
}

pub fn select_best_model(corpus: &Corpus, model_ids: &[String]) -> Result<BestModel> {
    if model_ids.is_empty() {
        return Err(Error::invalid("no candidate models given"));
    }
    let rows: Vec<&AnnotatedTweet> = corpus.rows().iter().collect();
    let mut aps = BTreeMap::new();
    for id in model_ids {
        let items = collect_scored(&rows, id)?;
        aps.insert(id.clone(), average_precision(&items)?);
    }
    let best = aps
        .iter()
        .max_by(|a, b| a.1.total_cmp(b.1).then_with(|| b.0.cmp(a.0)))
        .map(|(id, _)| id.clone())
        .expect("non-empty by construction");
    Ok(BestModel { best, aps })
}

/// Full evaluation of one model over a set of rows.
#[derive(Debug, Clone, Serialize)]
pub struct ModelEval {
    pub model_id: String,
    pub n: usize,
    pub n_positive: u64,
    pub ap: f64,
    pub best_f1: f64,
    pub best_f1_threshold: f64,
    pub median_hate_percentile: f64,
    pub rank_p25: f64,
    pub rank_p75: f64,
    pub top_bins: Vec<BinComposition>,
    #[serde(skip)]
    pub curve: PrCurve,
}

/// Evaluate one model on the given rows: AP, PR curve, best F1,
/// percentile-rank summary, and top-bin composition.
pub fn evaluate_model(
    rows: &[&AnnotatedTweet],
    model_id: &str,
    top_q: f64,
    n_bins: usize,
) -> Result<ModelEval> {
    let items = collect_scored(rows, model_id)?;
    let curve = pr_curve(&items)?;
    let (f1, threshold) = best_f1(&items)?;
    let ranks = percentile_ranks(&items)?;
    let top_bins = top_bin_composition(&items, top_q, n_bins)?;
    Ok(ModelEval {
        model_id: model_id.to_string(),
        n: items.len(),
        n_positive: total_positives(&items),
        ap: curve.ap,
        best_f1: f1,
        best_f1_threshold: threshold,
        median_hate_percentile: ranks.median,
        rank_p25: ranks.quantile(0.25),
        rank_p75: ranks.quantile(0.75),
        top_bins,
        curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn item(id: &str, score: f64, label: Label) -> ScoredItem {
        ScoredItem {
            tweet_id: id.to_string(),
            score,
            label,
        }
    }

    /// Six-item fixture with two tie groups, used across the hand-checked
    /// tests: AP = 1/3 + (1/3)(2/3) + (1/3)(3/5) = 34/45.
    fn mixed_fixture() -> Vec<ScoredItem> {
        vec![
            item("a", 0.9, Label::Hate),
            item("b", 0.8, Label::Neutral),
            item("c", 0.8, Label::Hate),
            item("d", 0.5, Label::Hate),
            item("e", 0.5, Label::Neutral),
            item("f", 0.2, Label::Offensive),
        ]
    }

    #[test]
    fn ap_of_perfect_and_worst_single_positive_rankings() {
        let first = vec![
            item("a", 0.9, Label::Hate),
            item("b", 0.5, Label::Neutral),
            item("c", 0.1, Label::Neutral),
        ];
        assert_eq!(average_precision(&first).unwrap(), 1.0);

        let last = vec![
            item("a", 0.9, Label::Neutral),
            item("b", 0.7, Label::Neutral),
            item("c", 0.5, Label::Neutral),
            item("d", 0.1, Label::Hate),
        ];
        assert!((average_precision(&last).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn ap_matches_hand_computed_tie_grouping() {
        let ap = average_precision(&mixed_fixture()).unwrap();
        assert!((ap - 34.0 / 45.0).abs() < 1e-15);
    }

    #[test]
    fn ap_matches_prefix_precision_oracle_on_distinct_scores() {
        // With all-distinct scores, AP is the mean over positives of the
        // precision at each positive's position in the ranking.
        let mut rng = crate::seed::substream(2024, 0);
        for _ in 0..200 {
            let n = rng.random_range(2..=8);
            let mut items: Vec<ScoredItem> = (0..n)
                .map(|i| {
                    let label = if rng.random::<f64>() < 0.4 {
                        Label::Hate
                    } else {
                        Label::Neutral
                    };
                    // Distinct scores by construction.
                    item(
                        &format!("t{i}"),
                        i as f64 + rng.random::<f64>() * 0.5,
                        label,
                    )
                })
                .collect();
            if !items.iter().any(|i| i.is_positive()) {
                items[0].label = Label::Hate;
            }

            let mut by_rank: Vec<&ScoredItem> = items.iter().collect();
            by_rank.sort_by(|a, b| b.score.total_cmp(&a.score));
            let mut tp = 0u64;
            let mut precisions = Vec::new();
            for (pos, it) in by_rank.iter().enumerate() {
                if it.is_positive() {
                    tp += 1;
                    precisions.push(tp as f64 / (pos as f64 + 1.0));
                }
            }
            let oracle = precisions.iter().sum::<f64>() / precisions.len() as f64;
            let ap = average_precision(&items).unwrap();
            assert!((ap - oracle).abs() < 1e-12, "ap {ap} vs oracle {oracle}");
        }
    }

    #[test]
    fn ap_requires_a_positive() {
        let items = vec![item("a", 0.9, Label::Neutral)];
        assert!(average_precision(&items).is_err());
    }

    #[test]
    fn ap_is_invariant_under_monotone_transforms() {
        let items = mixed_fixture();
        let transformed: Vec<ScoredItem> = items
            .iter()
            .map(|i| item(&i.tweet_id, (i.score * 3.0).exp(), i.label))
            .collect();
        assert!(
            (average_precision(&items).unwrap() - average_precision(&transformed).unwrap()).abs()
                < 1e-12
        );
    }

    #[test]
    fn pr_curve_matches_hand_tabulated_confusions() {
        let curve = pr_curve(&mixed_fixture()).unwrap();
        let expected = [
            (0.9, 1.0, 1.0 / 3.0),
            (0.8, 2.0 / 3.0, 2.0 / 3.0),
            (0.5, 3.0 / 5.0, 1.0),
            (0.2, 0.5, 1.0),
        ];
        assert_eq!(curve.points.len(), expected.len());
        for (point, (t, p, r)) in curve.points.iter().zip(expected) {
            assert_eq!(point.threshold, t);
            assert!((point.precision - p).abs() < 1e-15);
            assert!((point.recall - r).abs() < 1e-15);
        }
        assert!((curve.ap - 34.0 / 45.0).abs() < 1e-15);
        // Recall never decreases as the threshold drops.
        for pair in curve.points.windows(2) {
            assert!(pair[1].recall >= pair[0].recall);
        }
    }

    #[test]
    fn perfectly_separated_scores_give_precision_one_everywhere() {
        let items = vec![
            item("a", 0.9, Label::Hate),
            item("b", 0.8, Label::Hate),
            item("c", 0.2, Label::Neutral),
            item("d", 0.1, Label::Neutral),
        ];
        let curve = pr_curve(&items).unwrap();
        for point in &curve.points[..2] {
            assert_eq!(point.precision, 1.0);
        }
        assert_eq!(curve.points.last().unwrap().recall, 1.0);
    }

    #[test]
    fn total_tie_collapses_to_single_base_rate_point() {
        let items = vec![
            item("a", 0.5, Label::Hate),
            item("b", 0.5, Label::Neutral),
            item("c", 0.5, Label::Neutral),
            item("d", 0.5, Label::Neutral),
        ];
        let curve = pr_curve(&items).unwrap();
        assert_eq!(curve.points.len(), 1);
        assert!((curve.points[0].precision - 0.25).abs() < 1e-15);
        assert_eq!(curve.points[0].recall, 1.0);
    }

    #[test]
    fn discrete_prf_matches_hand_arithmetic() {
        // TP=3, FP=1, FN=2.
        let predictions = [true, true, true, true, false, false, false];
        let labels = [true, true, true, false, true, true, false];
        let prf = discrete_prf(&predictions, &labels).unwrap();
        assert!((prf.precision - 0.75).abs() < 1e-15);
        assert!((prf.recall - 0.6).abs() < 1e-15);
        assert!((prf.f1 - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn discrete_prf_edges() {
        let labels = [true, false, true];
        let perfect = discrete_prf(&[true, false, true], &labels).unwrap();
        assert_eq!(
            (perfect.precision, perfect.recall, perfect.f1),
            (1.0, 1.0, 1.0)
        );
        let silent = discrete_prf(&[false, false, false], &labels).unwrap();
        assert_eq!((silent.recall, silent.f1), (0.0, 0.0));
        assert!(discrete_prf(&[true], &labels).is_err());
        assert!(discrete_prf(&[false, false], &[false, false]).is_err());
    }

    #[test]
    fn f1_is_harmonic_mean_of_reported_p_and_r() {
        let mut rng = crate::seed::substream(7, 0);
        for _ in 0..100 {
            let n = rng.random_range(2..20);
            let predictions: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < 0.5).collect();
            let mut labels: Vec<bool> = (0..n).map(|_| rng.random::<f64>() < 0.5).collect();
            if !labels.iter().any(|&l| l) {
                labels[0] = true;
            }
            let prf = discrete_prf(&predictions, &labels).unwrap();
            let expected = if prf.precision + prf.recall > 0.0 {
                2.0 * prf.precision * prf.recall / (prf.precision + prf.recall)
            } else {
                0.0
            };
            assert!((prf.f1 - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn percentile_rank_extremes() {
        let mut items: Vec<ScoredItem> = (0..99)
            .map(|i| item(&format!("n{i}"), 0.001 * i as f64 + 0.01, Label::Neutral))
            .collect();
        items.push(item("top", 0.99, Label::Hate));
        let ranks = percentile_ranks(&items).unwrap();
        assert_eq!(ranks.ranks, vec![0.0]);

        let mut items: Vec<ScoredItem> = (0..99)
            .map(|i| item(&format!("n{i}"), 0.001 * i as f64 + 0.01, Label::Neutral))
            .collect();
        items.push(item("bottom", 0.0001, Label::Hate));
        let ranks = percentile_ranks(&items).unwrap();
        assert!((ranks.ranks[0] - 0.99).abs() < 1e-15);
    }

    #[test]
    fn percentile_ranks_match_counting_oracle_with_ties() {
        let items = mixed_fixture();
        let ranks = percentile_ranks(&items).unwrap();
        // Counting oracle: per positive, strictly-higher items / n.
        let mut oracle: Vec<f64> = items
            .iter()
            .filter(|i| i.is_positive())
            .map(|target| {
                items.iter().filter(|o| o.score > target.score).count() as f64 / items.len() as f64
            })
            .collect();
        oracle.sort_by(f64::total_cmp);
        assert_eq!(ranks.ranks, oracle);
        assert!((ranks.median - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn percentile_ranks_are_invariant_under_monotone_transforms() {
        let items = mixed_fixture();
        let transformed: Vec<ScoredItem> = items
            .iter()
            .map(|i| item(&i.tweet_id, i.score.powi(3), i.label))
            .collect();
        assert_eq!(
            percentile_ranks(&items).unwrap().ranks,
            percentile_ranks(&transformed).unwrap().ranks
        );
    }

    #[test]
    fn top_bins_split_evenly_with_remainder_in_last() {
        let items: Vec<ScoredItem> = (0..1000)
            .map(|i| {
                let label = if i < 25 { Label::Hate } else { Label::Neutral };
                item(&format!("t{i:04}"), 1.0 - i as f64 / 1000.0, label)
            })
            .collect();
        let bins = top_bin_composition(&items, 0.05, 10).unwrap();
        assert_eq!(bins.len(), 10);
        for bin in &bins {
            assert_eq!(bin.n, 5);
            let total = bin.hate_share + bin.offensive_share + bin.neutral_share;
            assert!((total - 1.0).abs() < 1e-12);
        }
        // First 25 items are hate: bins 0..5 fully hate, bins 5..10 neutral.
        for bin in &bins[..5] {
            assert_eq!(bin.hate_share, 1.0);
        }
        for bin in &bins[5..] {
            assert_eq!(bin.neutral_share, 1.0);
        }
    }

    #[test]
    fn uneven_top_selection_puts_remainder_in_last_bin() {
        let items: Vec<ScoredItem> = (0..100)
            .map(|i| item(&format!("t{i:03}"), 1.0 - i as f64 / 100.0, Label::Neutral))
            .collect();
        // top = ceil(0.11 * 100) = 11 items over 3 bins: 3, 3, 5.
        let bins = top_bin_composition(&items, 0.11, 3).unwrap();
        assert_eq!(bins.iter().map(|b| b.n).collect::<Vec<_>>(), vec![3, 3, 5]);
        for bin in &bins {
            assert_eq!(bin.neutral_share, 1.0);
        }
    }

    #[test]
    fn top_bins_reject_degenerate_shapes() {
        let items: Vec<ScoredItem> = (0..4)
            .map(|i| item(&format!("t{i}"), i as f64, Label::Neutral))
            .collect();
        assert!(top_bin_composition(&items, 0.5, 5).is_err());
        assert!(top_bin_composition(&items, 0.25, 2).is_err());
        assert!(top_bin_composition(&items, 0.0, 1).is_err());
        assert!(top_bin_composition(&items, 0.5, 0).is_err());
    }

    #[test]
    fn best_model_selection_prefers_higher_ap_then_lexicographic() {
        use crate::corpus::{test_row, Corpus, CorpusSource};
        let mut rows = Vec::new();
        for i in 0..10 {
            let mut row = test_row(&format!("t{i}"), "en");
            if i < 3 {
                row.primary_label = Label::Hate;
                row.violent = Some(false);
            }
            // `good` ranks hate on top; `noisy` ranks it at the bottom.
            let good = if i < 3 { 0.9 - i as f64 * 0.01 } else { 0.1 };
            let noisy = 1.0 - good;
            row.scores.insert("good".into(), good);
            row.scores.insert("noisy".into(), noisy);
            // `twin_a`/`twin_b` are identical -> AP tie.
            row.scores.insert("twin_a".into(), good);
            row.scores.insert("twin_b".into(), good);
            rows.push(row);
        }
        let corpus = Corpus::new(rows, CorpusSource::Memory);

        let pick = select_best_model(&corpus, &["good".into(), "noisy".into()]).unwrap();
        assert_eq!(pick.best, "good");
        assert_eq!(pick.aps["good"], 1.0);
        assert!(pick.aps["noisy"] < 0.5);

        let tie = select_best_model(&corpus, &["twin_b".into(), "twin_a".into()]).unwrap();
        assert_eq!(tie.best, "twin_a");

        assert!(select_best_model(&corpus, &["missing".into()]).is_err());
        assert!(select_best_model(&corpus, &[]).is_err());
    }

    #[test]
    fn best_f1_scans_thresholds() {
        // Thresholds: 0.9 -> f1 = 2*1/(1+0+3) = 0.5; 0.8 -> 2*2/(3+3) = 2/3;
        // 0.5 -> 2*3/(5+3) = 0.75; 0.2 -> 2*3/(6+3) = 2/3. Best: 0.75 at 0.5.
        let (f1, threshold) = best_f1(&mixed_fixture()).unwrap();
        assert!((f1 - 0.75).abs() < 1e-15);
        assert_eq!(threshold, 0.5);
    }

    #[test]
    fn evaluate_model_assembles_consistent_report() {
        use crate::corpus::{test_row, Corpus, CorpusSource};
        let mut rows = Vec::new();
        for i in 0..40 {
            let mut row = test_row(&format!("t{i:02}"), "en");
            if i % 10 == 0 {
                row.primary_label = Label::Hate;
                row.violent = Some(false);
            }
            row.scores.insert(
                "m".into(),
                if i % 10 == 0 {
                    0.95
                } else {
                    0.4 + (i as f64) * 0.001
                },
            );
            rows.push(row);
        }
        let corpus = Corpus::new(rows, CorpusSource::Memory);
        let refs: Vec<&AnnotatedTweet> = corpus.rows().iter().collect();
        let eval = evaluate_model(&refs, "m", 0.25, 2).unwrap();
        assert_eq!(eval.n, 40);
        assert_eq!(eval.n_positive, 4);
        assert_eq!(eval.ap, 1.0);
        assert_eq!(eval.best_f1, 1.0);
        assert!(eval.median_hate_percentile < 0.1);
        assert_eq!(eval.top_bins.len(), 2);
        assert!(eval.rank_p25 <= eval.median_hate_percentile);
        assert!(eval.rank_p75 >= eval.median_hate_percentile);
    }
}
