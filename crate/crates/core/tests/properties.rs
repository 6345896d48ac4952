//! Randomized invariant checks across the library: serialization
//! round-trips, estimator ranges and orderings, scheduling independence,
//! and allocator feasibility/dominance.

use std::collections::BTreeMap;

use modaudit_core::corpus::{
    load_corpus, write_corpus, AnnotatedTweet, Corpus, CorpusFormat, CorpusSource, Label,
    RemovalReason, SampleKind,
};
use modaudit_core::cost_alloc::{
    allocate_simultaneous, allocate_utilitarian, OutcomeCurve, WageTable,
};
use modaudit_core::numfmt::{fmt_roundtrip, round_sig};
use modaudit_core::prevalence::estimate_prevalence;
use modaudit_core::ranker_eval::{
    average_precision, percentile_ranks, top_bin_composition, ScoredItem,
};
use modaudit_core::seed::{mix, substream};
use modaudit_core::stats::{
    cohens_kappa, fleiss_kappa, ols_fit, percentile_bootstrap, quantile_type7, wilson_interval,
    ConfidenceSpec, Design, SeKind,
};
use proptest::prelude::*;
use rand::RngCore;

#[derive(Debug, Clone)]
struct RowSpec {
    stratum: u8,
    ew: bool,
    label: u8,
    violent: Option<bool>,
    likes: u32,
    replies: u32,
    removed: bool,
    reason: u8,
    score: f64,
    text: Option<String>,
    verified: bool,
}

fn arb_spec() -> impl Strategy<Value = RowSpec> {
    (
        (
            0..3u8,
            any::<bool>(),
            0..3u8,
            proptest::option::of(any::<bool>()),
        ),
        (0..50_000u32, 0..500u32, any::<bool>(), 0..4u8),
        (
            0.0..=1.0f64,
            proptest::option::of("[a-z,\"\n ]{1,12}"),
            any::<bool>(),
        ),
    )
        .prop_map(
            |(
                (stratum, ew, label, violent),
                (likes, replies, removed, reason),
                (score, text, verified),
            )| RowSpec {
                stratum,
                ew,
                label,
                violent,
                likes,
                replies,
                removed,
                reason,
                score,
                text,
                verified,
            },
        )
}

fn spec_to_row(i: usize, spec: &RowSpec) -> AnnotatedTweet {
    let stratum = ["ar", "en", "tr"][spec.stratum as usize];
    let mut scores = BTreeMap::new();
    scores.insert("m1".to_string(), spec.score);
    let primary_label = [Label::Neutral, Label::Hate, Label::Offensive][spec.label as usize];
    AnnotatedTweet {
        tweet_id: format!("{stratum}-{i:04}"),
        stratum: stratum.to_string(),
        sample_kind: if spec.ew {
            SampleKind::EngagementWeighted
        } else {
            SampleKind::Random
        },
        primary_label,
        // `violent` is annotated exactly on hate rows; `adult` is a free
        // optional annotation.
        violent: (primary_label == Label::Hate).then(|| spec.violent.unwrap_or(false)),
        scam: None,
        adult: spec.violent,
        likes: u64::from(spec.likes),
        replies: u64::from(spec.replies),
        retweets: 0,
        quotes: 1,
        removed: spec.removed,
        removal_reason: if spec.removed {
            [
                RemovalReason::Suspended,
                RemovalReason::Deactivated,
                RemovalReason::DeletedOrUnknown,
            ][(spec.reason % 3) as usize]
        } else {
            RemovalReason::None
        },
        author_id: format!("a-{i}"),
        author_verified: spec.verified,
        followers: u64::from(spec.likes) * 2,
        following: 7,
        tweet_count: 123,
        is_reply: spec.ew,
        possibly_sensitive: spec.removed,
        scores,
        text: spec.text.clone(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn corpus_round_trips_through_both_formats(
        specs in proptest::collection::vec(arb_spec(), 1..24)
    ) {
        let rows: Vec<AnnotatedTweet> = specs
            .iter()
            .enumerate()
            .map(|(i, s)| spec_to_row(i, s))
            .collect();
        let corpus = Corpus::new(rows, CorpusSource::Memory);
        let dir = tempfile::tempdir().unwrap();
        for (format, name) in [(CorpusFormat::Csv, "c.csv"), (CorpusFormat::Jsonl, "c.jsonl")] {
            let path = dir.path().join(name);
            write_corpus(&corpus, &path, format).unwrap();
            let loaded = load_corpus(&path, format).unwrap();
            prop_assert_eq!(loaded.rows(), corpus.rows());
        }
    }

    #[test]
    fn wilson_interval_contains_the_point_estimate(
        (n, k) in (1..10_000u64).prop_flat_map(|n| (Just(n), 0..=n))
    ) {
        let spec = ConfidenceSpec::default();
        let (lo, hi) = wilson_interval(k, n, &spec).unwrap();
        let p_hat = k as f64 / n as f64;
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!((0.0..=1.0).contains(&hi));
        prop_assert!(lo <= p_hat && p_hat <= hi);
    }

    #[test]
    fn quantiles_stay_in_range_and_are_monotone(
        mut data in proptest::collection::vec(-1e6..1e6f64, 1..60),
        q_pair in (0.0..=1.0f64, 0.0..=1.0f64)
    ) {
        data.sort_by(f64::total_cmp);
        let (q1, q2) = if q_pair.0 <= q_pair.1 { q_pair } else { (q_pair.1, q_pair.0) };
        let v1 = quantile_type7(&data, q1);
        let v2 = quantile_type7(&data, q2);
        prop_assert!(data[0] <= v1 && v2 <= data[data.len() - 1]);
        prop_assert!(v1 <= v2);
        prop_assert_eq!(quantile_type7(&data, 0.0), data[0]);
        prop_assert_eq!(quantile_type7(&data, 1.0), data[data.len() - 1]);
    }

    #[test]
    fn average_precision_is_bounded_and_scale_invariant(
        raw in proptest::collection::vec((0.0..1.0f64, any::<bool>()), 1..24)
    ) {
        let mut items: Vec<ScoredItem> = raw
            .iter()
            .enumerate()
            .map(|(i, &(score, positive))| ScoredItem {
                tweet_id: format!("t{i:03}"),
                score,
                label: if positive { Label::Hate } else { Label::Neutral },
            })
            .collect();
        items[0].label = Label::Hate; // guarantee a positive
        let ap = average_precision(&items).unwrap();
        prop_assert!((0.0..=1.0).contains(&ap));

        // Power-of-two rescaling is exact and order-preserving.
        let scaled: Vec<ScoredItem> = items
            .iter()
            .map(|it| ScoredItem { score: it.score * 4.0, ..it.clone() })
            .collect();
        prop_assert_eq!(average_precision(&scaled).unwrap(), ap);

        let ranks = percentile_ranks(&items).unwrap();
        prop_assert!(ranks.ranks.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!(ranks.ranks.iter().all(|r| (0.0..1.0).contains(r)));
    }

    #[test]
    fn top_bins_partition_the_head_of_the_ranking(
        raw in proptest::collection::vec((0.0..1.0f64, 0..3u8), 10..80),
        top_q in 0.1..=1.0f64,
        n_bins in 1..5usize
    ) {
        let items: Vec<ScoredItem> = raw
            .iter()
            .enumerate()
            .map(|(i, &(score, label))| ScoredItem {
                tweet_id: format!("t{i:03}"),
                score,
                label: [Label::Hate, Label::Offensive, Label::Neutral][label as usize],
            })
            .collect();
        let top = (top_q * items.len() as f64).ceil() as usize;
        prop_assume!(top >= n_bins);
        let bins = top_bin_composition(&items, top_q, n_bins).unwrap();
        prop_assert_eq!(bins.len(), n_bins);
        prop_assert_eq!(bins.iter().map(|b| b.n).sum::<usize>(), top);
        for bin in &bins {
            let total = bin.hate_share + bin.offensive_share + bin.neutral_share;
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn kappa_statistics_stay_in_range(
        assignments in proptest::collection::vec(
            proptest::collection::vec(0..3usize, 3), 2..20
        ),
        pairs in proptest::collection::vec((0..3u8, 0..3u8), 2..40)
    ) {
        let table: Vec<Vec<u64>> = assignments
            .iter()
            .map(|raters| {
                let mut counts = vec![0u64; 3];
                for &c in raters {
                    counts[c] += 1;
                }
                counts
            })
            .collect();
        let fleiss = fleiss_kappa(&table).unwrap();
        prop_assert!((-1.0..=1.0 + 1e-12).contains(&fleiss.kappa));
        let cohen = cohens_kappa(&pairs).unwrap();
        prop_assert!((-1.0 - 1e-12..=1.0 + 1e-12).contains(&cohen.kappa));
    }

    #[test]
    fn formatting_round_trips_and_rounding_is_idempotent(
        x in any::<f64>().prop_filter("finite", |v: &f64| v.is_finite())
    ) {
        let parsed: f64 = fmt_roundtrip(x).parse().unwrap();
        prop_assert_eq!(parsed.to_bits(), x.to_bits());
        let once = round_sig(x, 9);
        prop_assert_eq!(round_sig(once, 9).to_bits(), once.to_bits());
    }

    #[test]
    fn seed_substreams_are_deterministic_and_distinct(
        seed in any::<u64>(),
        index in 0..1_000u64
    ) {
        prop_assert_eq!(mix(seed, index), mix(seed, index));
        let a: Vec<u64> = {
            let mut rng = substream(seed, index);
            (0..4).map(|_| rng.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut rng = substream(seed, index);
            (0..4).map(|_| rng.next_u64()).collect()
        };
        prop_assert_eq!(&a, &b);
        let c: Vec<u64> = {
            let mut rng = substream(seed, index + 1);
            (0..4).map(|_| rng.next_u64()).collect()
        };
        prop_assert_ne!(&a, &c);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn bootstrap_results_are_worker_count_independent(
        data in proptest::collection::vec(-100.0..100.0f64, 2..40),
        seed in any::<u64>()
    ) {
        let spec = ConfidenceSpec::default();
        let run = |threads: usize| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| {
                    percentile_bootstrap(
                        &data,
                        |s| s.iter().copied().sum::<f64>() / s.len() as f64,
                        50,
                        seed,
                        &spec,
                    )
                    .unwrap()
                })
        };
        let one = run(1);
        let four = run(4);
        prop_assert_eq!(one.point.to_bits(), four.point.to_bits());
        prop_assert_eq!(one.lo.to_bits(), four.lo.to_bits());
        prop_assert_eq!(one.hi.to_bits(), four.hi.to_bits());
    }

    #[test]
    fn ols_is_invariant_under_row_permutation(
        (n, extras, y, order) in (8..=20usize).prop_flat_map(|n| {
            (
                Just(n),
                proptest::collection::vec(
                    proptest::collection::vec(-2.0..2.0f64, 2), n
                ),
                proptest::collection::vec(-3.0..3.0f64, n),
                Just((0..n).collect::<Vec<usize>>()).prop_shuffle(),
            )
        })
    ) {
        let names = vec!["const".to_string(), "x1".to_string(), "x2".to_string()];
        let mut design = Design::new(names.clone()).unwrap();
        for row in &extras {
            design.push_row(&[1.0, row[0], row[1]]).unwrap();
        }
        let fit = match ols_fit(&design, &y, SeKind::Hc3, None) {
            Ok(f) => f,
            Err(_) => return Ok(()), // discard the rare degenerate draw
        };

        let mut permuted = Design::new(names).unwrap();
        let mut y_perm = Vec::with_capacity(n);
        for &i in &order {
            permuted.push_row(&[1.0, extras[i][0], extras[i][1]]).unwrap();
            y_perm.push(y[i]);
        }
        let fit_perm = ols_fit(&permuted, &y_perm, SeKind::Hc3, None).unwrap();
        for (a, b) in fit.terms.iter().zip(&fit_perm.terms) {
            prop_assert!((a.coef - b.coef).abs() <= 1e-7, "{} vs {}", a.coef, b.coef);
            prop_assert!((a.se - b.se).abs() <= 1e-7);
        }
    }

    #[test]
    fn allocators_meet_targets_and_utilitarian_dominates(
        raw_curves in proptest::collection::vec(
            (
                proptest::collection::vec(0.01..1.0f64, 1..12),
                0.05..1.0f64,
            ),
            1..4
        ),
        weight_seeds in proptest::collection::vec(0.1..1.0f64, 4),
        wage_seeds in proptest::collection::vec(1.0..20.0f64, 4),
        frac in 0.05..0.95f64
    ) {
        let k = raw_curves.len();
        let total_w: f64 = weight_seeds[..k].iter().sum();
        let mut curves = Vec::with_capacity(k);
        let mut wages = Vec::with_capacity(k);
        for (s, (deltas, top)) in raw_curves.iter().enumerate() {
            let sum: f64 = deltas.iter().sum();
            let mut cum = 0.0;
            let points: Vec<(f64, f64)> = deltas
                .iter()
                .enumerate()
                .map(|(i, d)| {
                    cum += d / sum * top;
                    ((i as f64 + 1.0) * 10.0, cum.min(1.0))
                })
                .collect();
            let name = format!("s{s}");
            wages.push((name.clone(), wage_seeds[s]));
            curves.push(OutcomeCurve::new(name, points, weight_seeds[s] / total_w).unwrap());
        }
        let wt = WageTable::new(wages).unwrap();
        let saturated: f64 = curves
            .iter()
            .map(|c| c.engagement_weight * c.max_outcome())
            .sum();
        let target = saturated * frac;

        let util = allocate_utilitarian(target, &curves, &wt, 10.0).unwrap();
        prop_assert!(util.aggregate_outcome >= target);
        prop_assert!(util.total_annual_cost_usd >= 0.0);

        if let Ok(simul) = allocate_simultaneous(target, &curves, &wt) {
            prop_assert!(util.total_annual_cost_usd <= simul.total_annual_cost_usd);
            for (alloc, curve) in simul.per_stratum.iter().zip(&curves) {
                prop_assert!(alloc.outcome >= target);
                let idx = curve
                    .points()
                    .iter()
                    .position(|&(m, _)| m == alloc.m)
                    .unwrap();
                if idx > 0 {
                    prop_assert!(curve.points()[idx - 1].1 < target);
                }
            }
        }
    }

    #[test]
    fn prevalence_replicates_keep_violent_within_hate(
        cats in proptest::collection::vec(0..3u8, 1..120),
        seed in any::<u64>()
    ) {
        let rows: Vec<AnnotatedTweet> = cats
            .iter()
            .enumerate()
            .map(|(i, &c)| {
                let mut spec = RowSpec {
                    stratum: 0,
                    ew: false,
                    label: u8::from(c > 0),
                    violent: (c > 0).then_some(c == 2),
                    likes: 0,
                    replies: 0,
                    removed: false,
                    reason: 0,
                    score: 0.5,
                    text: None,
                    verified: false,
                };
                if spec.label == 1 {
                    spec.label = 1; // hate
                }
                spec_to_row(i, &spec)
            })
            .collect();
        let corpus = Corpus::new(rows, CorpusSource::Memory);
        let est = estimate_prevalence(&corpus, "ar", 64, seed, &ConfidenceSpec::default()).unwrap();
        for &(hate, violent) in est.replicates() {
            prop_assert!(violent <= hate);
        }
        prop_assert!(est.ci_violent.hi <= est.ci_hate.hi + 1e-15);
        prop_assert!(0.0 <= est.ci_hate.lo && est.ci_hate.hi <= 1.0);
        prop_assert!(est.ci_hate.lo <= est.ci_hate.hi);
    }
}
