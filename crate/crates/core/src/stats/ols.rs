//! Ordinary least squares with classical, heteroskedasticity-robust (HC3),
//! and cluster-robust (CR1) covariance estimators, plus delta-method
//! marginal effects for interaction terms.
//!
//! The coefficient solve uses a Householder QR factorisation. Rank is
//! checked first by modified Gram–Schmidt with a relative tolerance of
//! `1e-10`: a column whose residual after projection onto the preceding
//! columns falls below `1e-10` times its own norm is reported as linearly
//! dependent, and the fit aborts naming the offending columns.
//!
//! Covariance estimators, with `A = X'X`, residuals `e`, and leverages
//! `h_i = x_i' A^{-1} x_i`:
//!
//! * classical: `sigma^2 A^{-1}`, `sigma^2 = e'e / (n - p)`;
//! * HC3:       `A^{-1} (sum_i x_i x_i' e_i^2 / (1 - h_i)^2) A^{-1}`;
//! * CR1:       `c A^{-1} (sum_g s_g s_g') A^{-1}` with `s_g = X_g' e_g`
//!   and small-sample factor `c = G/(G-1) * (n-1)/(n-p)`.
//!
//! Two-sided p-values use a t reference with `n - p` degrees of freedom
//! (classical, HC3) or `G - 1` (cluster).

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use super::ConfidenceSpec;
use crate::error::{Error, Result};

/// Relative tolerance for rank detection.
const RANK_TOL: f64 = 1e-10;

/// A dense design matrix with named columns. Callers are responsible for
/// including an intercept column when they want one.
#[derive(Debug, Clone)]
pub struct Design {
    names: Vec<String>,
    data: Vec<f64>,
    n: usize,
}

impl Design {
    /// Create an empty design with the given column names (non-empty,
    /// unique).
    pub fn new(names: Vec<String>) -> Result<Design> {
        if names.is_empty() {
            return Err(Error::invalid("design matrix needs at least one column"));
        }
        let mut seen = std::collections::HashSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::invalid(format!("duplicate design column `{name}`")));
            }
        }
        Ok(Design {
            names,
            data: Vec::new(),
            n: 0,
        })
    }

    /// Append one observation; `row` must have one finite value per column.
    pub fn push_row(&mut self, row: &[f64]) -> Result<()> {
        if row.len() != self.names.len() {
            return Err(Error::invalid(format!(
                "design row has {} values, expected {}",
                row.len(),
                self.names.len()
            )));
        }
        if let Some(bad) = row.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid(format!("non-finite design value {bad}")));
        }
        self.data.extend_from_slice(row);
        self.n += 1;
        Ok(())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Number of observations.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of columns.
    pub fn p(&self) -> usize {
        self.names.len()
    }
}

/// Covariance estimator selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SeKind {
    Classical,
    Hc3,
    Cluster,
}

/// One fitted coefficient with its inference.
#[derive(Debug, Clone, Serialize)]
pub struct RegressionTerm {
    pub name: String,
    pub coef: f64,
    pub se: f64,
    pub t: f64,
    pub p: f64,
}

/// A fitted linear model.
#[derive(Debug, Clone, Serialize)]
pub struct RegressionResult {
    pub terms: Vec<RegressionTerm>,
    pub n: usize,
    pub se_kind: SeKind,
    /// Degrees of freedom of the t reference used for p-values.
    pub df: f64,
    /// Number of clusters, for cluster-robust fits.
    pub n_clusters: Option<usize>,
    /// Centered R².
    pub r2: f64,
    /// Row-major p x p coefficient covariance (not serialized).
    #[serde(skip)]
    covariance: Vec<f64>,
}

impl RegressionResult {
    fn term_index(&self, name: &str) -> Result<usize> {
        self.terms
            .iter()
            .position(|t| t.name == name)
            .ok_or_else(|| Error::UnknownTerm {
                term: name.to_string(),
            })
    }

    /// The fitted term named `name`.
    pub fn term(&self, name: &str) -> Result<&RegressionTerm> {
        Ok(&self.terms[self.term_index(name)?])
    }

    /// Coefficient of the term named `name`.
    pub fn coef(&self, name: &str) -> Result<f64> {
        Ok(self.term(name)?.coef)
    }

    /// Estimated covariance between two coefficients.
    pub fn covariance_between(&self, a: &str, b: &str) -> Result<f64> {
        let (i, j) = (self.term_index(a)?, self.term_index(b)?);
        Ok(self.covariance[i * self.terms.len() + j])
    }

    /// Row-major p x p coefficient covariance matrix.
    pub fn covariance_matrix(&self) -> &[f64] {
        &self.covariance
    }
}

/// Columns that are (numerically) linear combinations of earlier columns,
/// found by modified Gram–Schmidt with re-orthogonalisation.
fn dependent_columns(x: &DMatrix<f64>, tol: f64) -> Vec<usize> {
    let p = x.ncols();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..p {
        let col = x.column(j).into_owned();
        let norm0 = col.norm();
        let mut v = col;
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dot(&v);
                v.axpy(-proj, b, 1.0);
            }
        }
        let norm = v.norm();
        if norm0 == 0.0 || norm <= tol * norm0 {
            dependent.push(j);
        } else {
            basis.push(v / norm);
        }
    }
    dependent
}

fn two_sided_p(t: f64, df: f64) -> f64 {
    if t.is_infinite() {
        return 0.0;
    }
    let dist = StudentsT::new(0.0, 1.0, df).expect("df > 0 checked by caller");
    2.0 * (1.0 - dist.cdf(t.abs()))
}

/// Fit `y = X b + e` by OLS and estimate the coefficient covariance with
/// the requested estimator.
///
/// Requirements: `x.n() == y.len()`, `n > p`, full column rank. For
/// [`SeKind::Cluster`], `clusters` must supply one label per row and at
/// least two distinct labels; other estimators ignore it.
pub fn ols_fit(
    x: &Design,
    y: &[f64],
    se_kind: SeKind,
    clusters: Option<&[String]>,
) -> Result<RegressionResult> {
    let n = x.n();
    let p = x.p();
    if y.len() != n {
        return Err(Error::invalid(format!(
            "y has {} values but the design has {n} rows",
            y.len()
        )));
    }
    if n <= p {
        return Err(Error::invalid(format!(
            "need more observations than parameters (n = {n}, p = {p})"
        )));
    }
    if let Some(bad) = y.iter().find(|v| !v.is_finite()) {
        return Err(Error::invalid(format!("non-finite response value {bad}")));
    }

    let x_mat = DMatrix::from_row_slice(n, p, &x.data);
    let y_vec = DVector::from_column_slice(y);

    let dependent = dependent_columns(&x_mat, RANK_TOL);
    if !dependent.is_empty() {
        return Err(Error::RankDeficient {
            columns: dependent.iter().map(|&j| x.names[j].clone()).collect(),
        });
    }

    // Householder QR least squares: R b = Q' y.
    let qr = x_mat.clone().qr();
    let r = qr.r();
    let qty = qr.q().transpose() * &y_vec;
    let beta = r
        .solve_upper_triangular(&qty)
        .ok_or_else(|| Error::invalid("QR solve failed despite full rank"))?;

    let residuals = &y_vec - &x_mat * &beta;
    let sse: f64 = residuals.iter().map(|e| e * e).sum();
    let y_mean = y_vec.iter().sum::<f64>() / n as f64;
    let sst: f64 = y_vec.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let r2 = if sst > 0.0 {
        1.0 - sse / sst
    } else if sse <= f64::EPSILON {
        1.0
    } else {
        0.0
    };

    // (X'X)^{-1} = R^{-1} R^{-T}.
    let r_inv = r
        .solve_upper_triangular(&DMatrix::identity(p, p))
        .ok_or_else(|| Error::invalid("triangular inverse failed despite full rank"))?;
    let xtx_inv = &r_inv * r_inv.transpose();

    let (cov, df, n_clusters) = match se_kind {
        SeKind::Classical => {
            let sigma2 = sse / (n - p) as f64;
            (&xtx_inv * sigma2, (n - p) as f64, None)
        }
        SeKind::Hc3 => {
            let mut meat = DMatrix::zeros(p, p);
            for i in 0..n {
                let xi = x_mat.row(i);
                let hi = (xi * &xtx_inv * xi.transpose())[(0, 0)];
                let denom = 1.0 - hi;
                if denom <= 1e-12 {
                    return Err(Error::invalid(format!(
                        "observation {i} has leverage 1; HC3 weights are undefined"
                    )));
                }
                let u = residuals[i] / denom;
                let w = u * u;
                for a in 0..p {
                    for b in 0..p {
                        meat[(a, b)] += w * xi[a] * xi[b];
                    }
                }
            }
            (&xtx_inv * meat * &xtx_inv, (n - p) as f64, None)
        }
        SeKind::Cluster => {
            let labels = clusters
                .ok_or_else(|| Error::invalid("cluster-robust errors require cluster labels"))?;
            if labels.len() != n {
                return Err(Error::invalid(format!(
                    "got {} cluster labels for {n} rows",
                    labels.len()
                )));
            }
            let mut groups: std::collections::BTreeMap<&str, DVector<f64>> =
                std::collections::BTreeMap::new();
            for i in 0..n {
                let s = groups
                    .entry(labels[i].as_str())
                    .or_insert_with(|| DVector::zeros(p));
                for a in 0..p {
                    s[a] += residuals[i] * x_mat[(i, a)];
                }
            }
            let g = groups.len();
            if g < 2 {
                return Err(Error::invalid(
                    "cluster-robust errors require at least two clusters",
                ));
            }
            let mut meat = DMatrix::zeros(p, p);
            for s in groups.values() {
                for a in 0..p {
                    for b in 0..p {
                        meat[(a, b)] += s[a] * s[b];
                    }
                }
            }
            let scale = (g as f64 / (g as f64 - 1.0)) * ((n as f64 - 1.0) / (n - p) as f64);
            (&xtx_inv * meat * &xtx_inv * scale, (g - 1) as f64, Some(g))
        }
    };

    let terms = (0..p)
        .map(|j| {
            let coef = beta[j];
            let var = cov[(j, j)].max(0.0);
            let se = var.sqrt();
            let (t, pval) = if se == 0.0 {
                if coef == 0.0 {
                    (0.0, 1.0)
                } else {
                    (coef.signum() * f64::INFINITY, 0.0)
                }
            } else {
                let t = coef / se;
                (t, two_sided_p(t, df))
            };
            RegressionTerm {
                name: x.names[j].clone(),
                coef,
                se,
                t,
                p: pval,
            }
        })
        .collect();

    Ok(RegressionResult {
        terms,
        n,
        se_kind,
        df,
        n_clusters,
        r2,
        covariance: cov.transpose().as_slice().to_vec(),
    })
}

/// Marginal effect of a base term across a moderator grid.
#[derive(Debug, Clone, Serialize)]
pub struct MarginalEffect {
    /// Moderator value `g`.
    pub moderator: f64,
    /// `coef(base) + g * coef(interaction)`.
    pub effect: f64,
    /// Delta-method standard error.
    pub se: f64,
    pub lo: f64,
    pub hi: f64,
}

/// Delta-method marginal effects for a model with an interaction term.
///
/// For each grid value `g`, the effect is `b_base + g * b_int` with
/// variance `v_bb + g² v_ii + 2 g v_bi` read from the fitted covariance;
/// the confidence band is `effect ± z · se` with `z` from `spec`.
pub fn interaction_marginal_effects(
    result: &RegressionResult,
    base_term: &str,
    interaction_term: &str,
    moderator_grid: &[f64],
    spec: &ConfidenceSpec,
) -> Result<Vec<MarginalEffect>> {
    let b_base = result.coef(base_term)?;
    let b_int = result.coef(interaction_term)?;
    let v_bb = result.covariance_between(base_term, base_term)?;
    let v_ii = result.covariance_between(interaction_term, interaction_term)?;
    let v_bi = result.covariance_between(base_term, interaction_term)?;

    moderator_grid
        .iter()
        .map(|&g| {
            if !g.is_finite() {
                return Err(Error::invalid(format!("non-finite moderator value {g}")));
            }
            let effect = b_base + g * b_int;
            let var = (v_bb + g * g * v_ii + 2.0 * g * v_bi).max(0.0);
            let se = var.sqrt();
            Ok(MarginalEffect {
                moderator: g,
                effect,
                se,
                lo: effect - spec.z * se,
                hi: effect + spec.z * se,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn design(names: &[&str], rows: &[&[f64]]) -> Design {
        let mut d = Design::new(names.iter().map(|s| s.to_string()).collect()).unwrap();
        for row in rows {
            d.push_row(row).unwrap();
        }
        d
    }

    #[test]
    fn exact_fit_recovers_coefficients_with_zero_residual_variance() {
        let d = design(
            &["intercept", "x"],
            &[&[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0], &[1.0, 3.0]],
        );
        let y: Vec<f64> = [0.0, 1.0, 2.0, 3.0].iter().map(|x| 2.0 + 3.0 * x).collect();
        let r = ols_fit(&d, &y, SeKind::Classical, None).unwrap();
        assert!((r.coef("intercept").unwrap() - 2.0).abs() < 1e-12);
        assert!((r.coef("x").unwrap() - 3.0).abs() < 1e-12);
        assert!((r.r2 - 1.0).abs() < 1e-12);
        for term in &r.terms {
            assert!(term.se < 1e-10, "zero residual variance");
        }
    }

    #[test]
    fn classical_fit_matches_hand_computed_normal_equations() {
        // X = [(1,0),(1,1),(1,2)], y = (1,2,4). By hand:
        // beta = (5/6, 3/2); sigma^2 = 1/6; var = sigma^2 * diag(5/6, 1/2).
        let d = design(&["c", "x"], &[&[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0]]);
        let y = [1.0, 2.0, 4.0];
        let r = ols_fit(&d, &y, SeKind::Classical, None).unwrap();
        assert!((r.coef("c").unwrap() - 5.0 / 6.0).abs() < 1e-12);
        assert!((r.coef("x").unwrap() - 1.5).abs() < 1e-12);
        assert!((r.term("c").unwrap().se - (5.0_f64 / 36.0).sqrt()).abs() < 1e-12);
        assert!((r.term("x").unwrap().se - (1.0_f64 / 12.0).sqrt()).abs() < 1e-12);
        // df = 1 -> t is Cauchy: p = 1 - 2 atan(|t|) / pi.
        let t = 1.5 / (1.0_f64 / 12.0).sqrt();
        let expected_p = 1.0 - 2.0 * t.atan() / std::f64::consts::PI;
        assert!((r.term("x").unwrap().p - expected_p).abs() < 1e-10);
    }

    #[test]
    fn hc3_matches_hand_computed_sandwich() {
        // Same data; by hand the HC3 covariance is [[0.75, -0.5], [-0.5, 0.5]].
        let d = design(&["c", "x"], &[&[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0]]);
        let y = [1.0, 2.0, 4.0];
        let r = ols_fit(&d, &y, SeKind::Hc3, None).unwrap();
        assert!((r.covariance_between("c", "c").unwrap() - 0.75).abs() < 1e-12);
        assert!((r.covariance_between("c", "x").unwrap() + 0.5).abs() < 1e-12);
        assert!((r.covariance_between("x", "x").unwrap() - 0.5).abs() < 1e-12);
        assert!((r.term("x").unwrap().se - 0.5_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn cr1_matches_hand_computed_cluster_sandwich() {
        // Intercept-only, y = (1,2,3,6), clusters (a,a,b,b).
        // beta = 3, cluster scores s = (-3, 3), meat = 18, A = 4,
        // c = 2 * (3/3) = 2 -> var = 2 * 18 / 16 = 2.25, se = 1.5, df = 1.
        let d = design(&["c"], &[&[1.0], &[1.0], &[1.0], &[1.0]]);
        let y = [1.0, 2.0, 3.0, 6.0];
        let clusters: Vec<String> = ["a", "a", "b", "b"].iter().map(|s| s.to_string()).collect();
        let r = ols_fit(&d, &y, SeKind::Cluster, Some(&clusters)).unwrap();
        assert!((r.coef("c").unwrap() - 3.0).abs() < 1e-12);
        assert!((r.term("c").unwrap().se - 1.5).abs() < 1e-12);
        assert_eq!(r.df, 1.0);
        assert_eq!(r.n_clusters, Some(2));
        let expected_p = 1.0 - 2.0 * (2.0_f64).atan() / std::f64::consts::PI;
        assert!((r.term("c").unwrap().p - expected_p).abs() < 1e-10);
    }

    #[test]
    fn duplicated_column_is_reported_by_name() {
        let d = design(
            &["c", "x", "x_dup"],
            &[
                &[1.0, 0.0, 0.0],
                &[1.0, 1.0, 1.0],
                &[1.0, 2.0, 2.0],
                &[1.0, 3.0, 3.0],
            ],
        );
        let y = [0.0, 1.0, 2.0, 3.0];
        match ols_fit(&d, &y, SeKind::Classical, None) {
            Err(Error::RankDeficient { columns }) => assert_eq!(columns, vec!["x_dup"]),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn zero_column_is_reported() {
        let d = design(&["c", "zero"], &[&[1.0, 0.0], &[1.0, 0.0], &[1.0, 0.0]]);
        let y = [1.0, 2.0, 3.0];
        match ols_fit(&d, &y, SeKind::Classical, None) {
            Err(Error::RankDeficient { columns }) => assert_eq!(columns, vec!["zero"]),
            other => panic!("expected rank deficiency, got {other:?}"),
        }
    }

    #[test]
    fn single_cluster_is_rejected() {
        let d = design(&["c"], &[&[1.0], &[1.0], &[1.0]]);
        let y = [1.0, 2.0, 3.0];
        let clusters: Vec<String> = vec!["a".into(), "a".into(), "a".into()];
        assert!(ols_fit(&d, &y, SeKind::Cluster, Some(&clusters)).is_err());
    }

    #[test]
    fn underdetermined_fit_is_rejected() {
        let d = design(&["c", "x"], &[&[1.0, 0.0], &[1.0, 1.0]]);
        let y = [1.0, 2.0];
        assert!(ols_fit(&d, &y, SeKind::Classical, None).is_err());
    }

    #[test]
    fn row_order_does_not_change_the_fit() {
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|i| vec![1.0, f64::from(i), f64::from(i * i % 5)])
            .collect();
        let y: Vec<f64> = (0..12)
            .map(|i| 0.3 + 0.7 * f64::from(i) + f64::from(i % 3))
            .collect();
        let names = ["c", "a", "b"];

        let refs: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
        let d1 = design(&names, &refs);
        let r1 = ols_fit(&d1, &y, SeKind::Hc3, None).unwrap();

        let perm = [5usize, 2, 9, 0, 7, 1, 11, 3, 10, 4, 8, 6];
        let rows2: Vec<&[f64]> = perm.iter().map(|&i| rows[i].as_slice()).collect();
        let y2: Vec<f64> = perm.iter().map(|&i| y[i]).collect();
        let d2 = design(&names, &rows2);
        let r2 = ols_fit(&d2, &y2, SeKind::Hc3, None).unwrap();

        for (a, b) in r1.terms.iter().zip(&r2.terms) {
            assert!((a.coef - b.coef).abs() < 1e-10);
            assert!((a.se - b.se).abs() < 1e-10);
        }
    }

    #[test]
    fn marginal_effects_match_recentred_refits() {
        // y = 1 + 2 d + 0.5 g + 1.5 d*g + noise-free pattern breaker.
        let mut d = Design::new(
            ["c", "d", "g", "dg"]
                .iter()
                .map(|s| s.to_string())
                .collect(),
        )
        .unwrap();
        let mut y = Vec::new();
        let gs = [0.0, 1.0, 2.0, 3.0, 4.0, 0.5, 1.5, 2.5];
        let ds = [0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0];
        let bumps = [0.1, -0.2, 0.05, 0.3, -0.15, 0.0, 0.2, -0.1];
        for i in 0..8 {
            d.push_row(&[1.0, ds[i], gs[i], ds[i] * gs[i]]).unwrap();
            y.push(1.0 + 2.0 * ds[i] + 0.5 * gs[i] + 1.5 * ds[i] * gs[i] + bumps[i]);
        }
        let fit = ols_fit(&d, &y, SeKind::Classical, None).unwrap();
        let spec = ConfidenceSpec::default();
        let grid = [0.0, 1.0, 2.5];
        let effects = interaction_marginal_effects(&fit, "d", "dg", &grid, &spec).unwrap();

        // Oracle: refit with the moderator re-centred at g0; the base
        // coefficient and its SE are the marginal effect at g0.
        for (k, &g0) in grid.iter().enumerate() {
            let mut dc = Design::new(
                ["c", "d", "g", "dg"]
                    .iter()
                    .map(|s| s.to_string())
                    .collect(),
            )
            .unwrap();
            for i in 0..8 {
                let gc = gs[i] - g0;
                dc.push_row(&[1.0, ds[i], gc, ds[i] * gc]).unwrap();
            }
            let refit = ols_fit(&dc, &y, SeKind::Classical, None).unwrap();
            assert!(
                (effects[k].effect - refit.coef("d").unwrap()).abs() < 1e-10,
                "effect at g = {g0}"
            );
            assert!(
                (effects[k].se - refit.term("d").unwrap().se).abs() < 1e-10,
                "se at g = {g0}"
            );
            assert!((effects[k].lo - (effects[k].effect - spec.z * effects[k].se)).abs() < 1e-12);
        }
    }

    #[test]
    fn unknown_terms_are_reported() {
        let d = design(&["c", "x"], &[&[1.0, 0.0], &[1.0, 1.0], &[1.0, 2.0]]);
        let y = [1.0, 2.0, 4.0];
        let fit = ols_fit(&d, &y, SeKind::Classical, None).unwrap();
        assert!(matches!(
            interaction_marginal_effects(&fit, "nope", "x", &[0.0], &ConfidenceSpec::default()),
            Err(Error::UnknownTerm { .. })
        ));
    }

    #[test]
    fn covariance_matrix_is_symmetric() {
        let d = design(
            &["c", "x", "z"],
            &[
                &[1.0, 0.2, 1.0],
                &[1.0, 1.4, 0.0],
                &[1.0, 2.1, 3.0],
                &[1.0, 3.7, 2.0],
                &[1.0, 4.1, 5.0],
                &[1.0, 5.9, 4.0],
            ],
        );
        let y = [1.0, 2.2, 2.9, 4.3, 5.2, 5.8];
        for kind in [SeKind::Classical, SeKind::Hc3] {
            let r = ols_fit(&d, &y, kind, None).unwrap();
            let p = r.terms.len();
            let cov = r.covariance_matrix();
            for i in 0..p {
                for j in 0..p {
                    assert!((cov[i * p + j] - cov[j * p + i]).abs() < 1e-12);
                }
            }
        }
    }
}
