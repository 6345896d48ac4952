//! Inter-rater agreement: Fleiss' kappa for many raters over categorical
//! items, Cohen's kappa for two raters.

use serde::Serialize;

use crate::error::{Error, Result};

/// Which agreement statistic a result came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AgreementKind {
    Fleiss,
    Cohen,
}

/// An agreement estimate.
#[derive(Debug, Clone, Serialize)]
pub struct AgreementResult {
    pub kind: AgreementKind,
    /// Chance-corrected agreement in `[-1, 1]`.
    pub kappa: f64,
    /// Number of rated items (Fleiss) or paired ratings (Cohen).
    pub n_items: usize,
    /// Raw (uncorrected) agreement proportion.
    pub raw_agreement: f64,
}

/// Fleiss' kappa from an items-by-categories count matrix.
///
/// `counts[i][j]` is the number of raters that put item `i` in category
/// `j`; every row must sum to the same number of raters `m >= 2`. When
/// expected chance agreement is 1 (all ratings in a single category),
/// observed agreement is necessarily perfect and kappa is defined as 1.
pub fn fleiss_kappa(counts: &[Vec<u64>]) -> Result<AgreementResult> {
    if counts.is_empty() {
        return Err(Error::invalid("fleiss kappa requires at least one item"));
    }
    let n_categories = counts[0].len();
    if n_categories == 0 {
        return Err(Error::invalid(
            "fleiss kappa requires at least one category",
        ));
    }
    let m: u64 = counts[0].iter().sum();
    if m < 2 {
        return Err(Error::invalid(
            "fleiss kappa requires at least two raters per item",
        ));
    }
    for (i, row) in counts.iter().enumerate() {
        if row.len() != n_categories {
            return Err(Error::invalid(format!(
                "item {i} has {} categories, expected {n_categories}",
                row.len()
            )));
        }
        let sum: u64 = row.iter().sum();
        if sum != m {
            return Err(Error::invalid(format!(
                "item {i} has {sum} ratings, expected {m}"
            )));
        }
    }

    let n_items = counts.len();
    let m_f = m as f64;

    // Per-item agreement P_i = (sum_j n_ij^2 - m) / (m (m - 1)).
    let p_bar = counts
        .iter()
        .map(|row| {
            let sq: f64 = row.iter().map(|&c| (c as f64) * (c as f64)).sum();
            (sq - m_f) / (m_f * (m_f - 1.0))
        })
        .sum::<f64>()
        / n_items as f64;

    // Category shares p_j across all ratings; chance agreement sum p_j^2.
    let total = n_items as f64 * m_f;
    let p_e: f64 = (0..n_categories)
        .map(|j| {
            let col: u64 = counts.iter().map(|row| row[j]).sum();
            let share = col as f64 / total;
            share * share
        })
        .sum();

    let kappa = if (1.0 - p_e).abs() < 1e-12 {
        1.0
    } else {
        (p_bar - p_e) / (1.0 - p_e)
    };

    Ok(AgreementResult {
        kind: AgreementKind::Fleiss,
        kappa,
        n_items,
        raw_agreement: p_bar,
    })
}

/// Cohen's kappa for two raters over paired categorical ratings.
///
/// Categories are compared by equality of the supplied labels. When
/// expected chance agreement is 1 (both raters constant on the same
/// category), observed agreement is perfect and kappa is defined as 1.
pub fn cohens_kappa<C: Eq + std::hash::Hash + Clone>(pairs: &[(C, C)]) -> Result<AgreementResult> {
    if pairs.is_empty() {
        return Err(Error::invalid("cohen kappa requires at least one pair"));
    }
    let n = pairs.len() as f64;

    let observed = pairs.iter().filter(|(a, b)| a == b).count() as f64 / n;

    let mut marginal_a: std::collections::HashMap<&C, f64> = std::collections::HashMap::new();
    let mut marginal_b: std::collections::HashMap<&C, f64> = std::collections::HashMap::new();
    for (a, b) in pairs {
        *marginal_a.entry(a).or_insert(0.0) += 1.0;
        *marginal_b.entry(b).or_insert(0.0) += 1.0;
    }
    let expected: f64 = marginal_a
        .iter()
        .map(|(cat, count_a)| {
            let count_b = marginal_b.get(cat).copied().unwrap_or(0.0);
            (count_a / n) * (count_b / n)
        })
        .sum();

    let kappa = if (1.0 - expected).abs() < 1e-12 {
        1.0
    } else {
        (observed - expected) / (1.0 - expected)
    };

    Ok(AgreementResult {
        kind: AgreementKind::Cohen,
        kappa,
        n_items: pairs.len(),
        raw_agreement: observed,
    })
}
