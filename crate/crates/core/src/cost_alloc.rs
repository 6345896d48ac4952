//! Cost analysis over simulated outcome curves: annual moderation cost,
//! revenue-share framing against statutory fine ceilings, minimum-cost
//! moderator allocation under a per-stratum (simultaneous) and an
//! aggregate (utilitarian) policy, cost frontiers, and a workforce
//! sensitivity sweep.
//!
//! Money arithmetic is plain `f64` USD: annual cost is `Σ M_l·w_l·H`
//! with `H` annual working hours, and revenue share divides by a fixed
//! annual revenue. Aggregate outcomes average the per-stratum curves
//! with engagement weights that sum to 1.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, SampleKind};
use crate::error::{Error, Result};
use crate::prevalence::LanguageVolume;

/// EU Digital Services Act fine ceiling, as a share of global revenue.
pub const DSA_FINE_SHARE: f64 = 0.06;
/// UK Online Safety Act fine ceiling, as a share of global revenue.
pub const OSA_FINE_SHARE: f64 = 0.10;
/// Default annual working hours per moderator (8 hours × 365 days).
pub const DEFAULT_ANNUAL_HOURS: f64 = 2920.0;
/// Default annual platform revenue in USD.
pub const DEFAULT_REVENUE_USD: f64 = 5.27e9;
/// Default greedy allocation increment, in moderators.
pub const DEFAULT_INCREMENT: f64 = 10.0;

/// Hourly wages per stratum plus the cost-model constants.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WageTable {
    wages: BTreeMap<String, f64>,
    /// Annual working hours per moderator.
    pub annual_hours: f64,
    /// Annual platform revenue in USD.
    pub revenue: f64,
}

impl WageTable {
    /// Build a wage table with default hours and revenue; wages must be
    /// positive and strata unique.
    pub fn new(wages: impl IntoIterator<Item = (String, f64)>) -> Result<WageTable> {
        let mut map = BTreeMap::new();
        for (stratum, wage) in wages {
            if !wage.is_finite() || wage <= 0.0 {
                return Err(Error::invalid(format!(
                    "wage for stratum `{stratum}` must be positive, got {wage}"
                )));
            }
            if map.insert(stratum.clone(), wage).is_some() {
                return Err(Error::invalid(format!(
                    "duplicate wage entry for stratum `{stratum}`"
                )));
            }
        }
        if map.is_empty() {
            return Err(Error::invalid("wage table has no entries"));
        }
        Ok(WageTable {
            wages: map,
            annual_hours: DEFAULT_ANNUAL_HOURS,
            revenue: DEFAULT_REVENUE_USD,
        })
    }

    pub fn with_annual_hours(mut self, hours: f64) -> Result<WageTable> {
        if !hours.is_finite() || hours <= 0.0 {
            return Err(Error::invalid(format!(
                "annual hours must be positive, got {hours}"
            )));
        }
        self.annual_hours = hours;
        Ok(self)
    }

    pub fn with_revenue(mut self, revenue: f64) -> Result<WageTable> {
        if !revenue.is_finite() || revenue <= 0.0 {
            return Err(Error::invalid(format!(
                "revenue must be positive, got {revenue}"
            )));
        }
        self.revenue = revenue;
        Ok(self)
    }

    /// Hourly wage for a stratum.
    pub fn wage(&self, stratum: &str) -> Result<f64> {
        self.wages
            .get(stratum)
            .copied()
            .ok_or_else(|| Error::MissingEntry {
                table: "wage",
                stratum: stratum.to_string(),
            })
    }

    pub fn strata(&self) -> impl Iterator<Item = &str> {
        self.wages.keys().map(String::as_str)
    }
}

/// A monotone step function from moderator count to an outcome share,
/// with the stratum's weight in the aggregate outcome.
#[derive(Debug, Clone, Serialize)]
pub struct OutcomeCurve {
    pub stratum: String,
    /// Sorted `(M, outcome)` pairs; the outcome holds from each `M` up to
    /// the next grid point.
    points: Vec<(f64, f64)>,
    /// Stratum share of total hate engagement; weights sum to 1 across a
    /// curve set.
    pub engagement_weight: f64,
}

impl OutcomeCurve {
    pub fn new(
        stratum: impl Into<String>,
        points: Vec<(f64, f64)>,
        engagement_weight: f64,
    ) -> Result<OutcomeCurve> {
        let stratum = stratum.into();
        if points.is_empty() {
            return Err(Error::invalid(format!(
                "outcome curve for `{stratum}` has no points"
            )));
        }
        for &(m, v) in &points {
            if !m.is_finite() || m < 0.0 {
                return Err(Error::invalid(format!(
                    "curve for `{stratum}` has invalid moderator count {m}"
                )));
            }
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::invalid(format!(
                    "curve for `{stratum}` has outcome {v} outside [0, 1]"
                )));
            }
        }
        if points.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::invalid(format!(
                "curve for `{stratum}` must have strictly ascending moderator counts"
            )));
        }
        if points.windows(2).any(|w| w[1].1 < w[0].1) {
            return Err(Error::invalid(format!(
                "curve for `{stratum}` must be non-decreasing in moderators"
            )));
        }
        if !engagement_weight.is_finite() || engagement_weight < 0.0 {
            return Err(Error::invalid(format!(
                "curve for `{stratum}` has negative weight {engagement_weight}"
            )));
        }
        Ok(OutcomeCurve {
            stratum,
            points,
            engagement_weight,
        })
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Step-function value at an arbitrary moderator count: the outcome
    /// of the largest grid point ≤ `m`, or 0 below the grid.
    pub fn outcome_at(&self, m: f64) -> f64 {
        let idx = self.points.partition_point(|&(grid_m, _)| grid_m <= m);
        if idx == 0 {
            0.0
        } else {
            self.points[idx - 1].1
        }
    }

    pub fn max_outcome(&self) -> f64 {
        self.points.last().map(|&(_, v)| v).unwrap_or(0.0)
    }
}

/// Which allocation policy produced a plan.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AllocationPolicy {
    /// Every stratum individually reaches the target.
    Simultaneous,
    /// The engagement-weighted aggregate reaches the target.
    Utilitarian,
}

/// One stratum's slice of an allocation plan.
#[derive(Debug, Clone, Serialize)]
pub struct StratumAllocation {
    pub stratum: String,
    pub m: f64,
    pub hourly_wage_usd: f64,
    pub annual_cost_usd: f64,
    /// Outcome the curve attains at `m`.
    pub outcome: f64,
}

/// A costed moderator allocation.
#[derive(Debug, Clone, Serialize)]
pub struct AllocationPlan {
    pub policy: AllocationPolicy,
    pub target: f64,
    pub per_stratum: Vec<StratumAllocation>,
    pub total_moderators: f64,
    pub total_annual_cost_usd: f64,
    /// `total cost / revenue`.
    pub revenue_share: f64,
    /// Engagement-weighted aggregate outcome of the plan.
    pub aggregate_outcome: f64,
}

fn validate_target(target: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&target) || !target.is_finite() {
        return Err(Error::invalid(format!(
            "target must lie in [0, 1], got {target}"
        )));
    }
    Ok(())
}

fn validate_curves(curves: &[OutcomeCurve]) -> Result<()> {
    if curves.is_empty() {
        return Err(Error::invalid("no outcome curves given"));
    }
    let mut seen = std::collections::BTreeSet::new();
    for curve in curves {
        if !seen.insert(curve.stratum.as_str()) {
            return Err(Error::invalid(format!(
                "duplicate curve for stratum `{}`",
                curve.stratum
            )));
        }
    }
    let weight_sum: f64 = curves.iter().map(|c| c.engagement_weight).sum();
    if (weight_sum - 1.0).abs() > 1e-6 {
        return Err(Error::invalid(format!(
            "engagement weights must sum to 1, got {weight_sum}"
        )));
    }
    Ok(())
}

/// Aggregate outcome `Σ weight_l · value_l`, summed in curve order.
fn aggregate(curves: &[OutcomeCurve], values: &[f64]) -> f64 {
    curves
        .iter()
        .zip(values)
        .map(|(c, v)| c.engagement_weight * v)
        .sum()
}

fn build_plan(
    policy: AllocationPolicy,
    target: f64,
    curves: &[OutcomeCurve],
    wt: &WageTable,
    ms: &[f64],
    values: &[f64],
) -> Result<AllocationPlan> {
    let mut per_stratum = Vec::with_capacity(curves.len());
    let mut total_m = 0.0;
    let mut total_cost = 0.0;
    for ((curve, &m), &outcome) in curves.iter().zip(ms).zip(values) {
        let wage = wt.wage(&curve.stratum)?;
        let cost = m * wage * wt.annual_hours;
        total_m += m;
        total_cost += cost;
        per_stratum.push(StratumAllocation {
            stratum: curve.stratum.clone(),
            m,
            hourly_wage_usd: wage,
            annual_cost_usd: cost,
            outcome,
        });
    }
    Ok(AllocationPlan {
        policy,
        target,
        per_stratum,
        total_moderators: total_m,
        total_annual_cost_usd: total_cost,
        revenue_share: total_cost / wt.revenue,
        aggregate_outcome: aggregate(curves, values),
    })
}

/// Annual cost of a per-stratum moderator assignment: `Σ M_l·w_l·H`.
pub fn annual_cost(plan: &[(String, f64)], wt: &WageTable) -> Result<f64> {
    let mut total = 0.0;
    for (stratum, m) in plan {
        if !m.is_finite() || *m < 0.0 {
            return Err(Error::invalid(format!(
                "moderator count for `{stratum}` must be non-negative, got {m}"
            )));
        }
        total += m * wt.wage(stratum)? * wt.annual_hours;
    }
    Ok(total)
}

/// Cost expressed as a share of annual revenue.
pub fn cost_share(cost: f64, wt: &WageTable) -> f64 {
    cost / wt.revenue
}

/// Smallest grid allocation where every stratum individually attains the
/// target. Errors name the first stratum whose curve never reaches it.
pub fn allocate_simultaneous(
    target: f64,
    curves: &[OutcomeCurve],
    wt: &WageTable,
) -> Result<AllocationPlan> {
    validate_target(target)?;
    validate_curves(curves)?;
    let mut ms = Vec::with_capacity(curves.len());
    let mut values = Vec::with_capacity(curves.len());
    for curve in curves {
        let idx = curve.points.partition_point(|&(_, v)| v < target);
        if idx == curve.points.len() {
            return Err(Error::UnreachableTarget {
                target,
                stratum: Some(curve.stratum.clone()),
            });
        }
        ms.push(curve.points[idx].0);
        values.push(curve.points[idx].1);
    }
    build_plan(
        AllocationPolicy::Simultaneous,
        target,
        curves,
        wt,
        &ms,
        &values,
    )
}

/// Number of `increment` steps needed to move from `from` to at least
/// `to`, robust to floating-point division fuzz.
fn steps_to_reach(from: f64, to: f64, increment: f64) -> f64 {
    (((to - from) / increment) - 1e-9).ceil().max(1.0)
}

/// Greedy state for the utilitarian allocator.
struct GreedyState<'a> {
    curves: &'a [OutcomeCurve],
    wages: Vec<f64>,
    annual_hours: f64,
    increment: f64,
    ms: Vec<f64>,
    values: Vec<f64>,
}

impl GreedyState<'_> {
    fn aggregate(&self) -> f64 {
        aggregate(self.curves, &self.values)
    }

    fn cost(&self) -> f64 {
        self.ms
            .iter()
            .zip(&self.wages)
            .map(|(&m, &w)| m * w * self.annual_hours)
            .sum()
    }

    fn apply(&mut self, stratum: usize, steps: f64) {
        self.ms[stratum] += steps * self.increment;
        self.values[stratum] = self.curves[stratum].outcome_at(self.ms[stratum]);
    }

    /// Best marginal move for one stratum: scan every future edge where
    /// the curve strictly rises and keep the edge with the highest
    /// weighted-gain-per-dollar rate. Returns `(rate, steps)`.
    fn best_move(&self, stratum: usize) -> Option<(f64, f64)> {
        let curve = &self.curves[stratum];
        let cur_m = self.ms[stratum];
        let cur_v = self.values[stratum];
        let step_cost = self.increment * self.wages[stratum] * self.annual_hours;
        let mut best: Option<(f64, f64)> = None;
        for &(edge_m, edge_v) in &curve.points {
            if edge_m <= cur_m || edge_v <= cur_v {
                continue;
            }
            let steps = steps_to_reach(cur_m, edge_m, self.increment);
            let gain = curve.engagement_weight * (edge_v - cur_v);
            let rate = gain / (steps * step_cost);
            if best.is_none_or(|(r, _)| rate > r) {
                best = Some((rate, steps));
            }
        }
        best
    }

    /// Cheapest single-stratum move that lifts the aggregate to the
    /// target from the current state: `(cost, stratum, steps)`.
    /// `exclude` omits one stratum from consideration.
    fn cheapest_closing_move(
        &self,
        target: f64,
        exclude: Option<usize>,
    ) -> Option<(f64, usize, f64)> {
        let agg = self.aggregate();
        let gap = target - agg;
        let mut best: Option<(f64, usize, f64)> = None;
        for (i, curve) in self.curves.iter().enumerate() {
            if Some(i) == exclude || curve.engagement_weight <= 0.0 {
                continue;
            }
            let v_need = self.values[i] + gap / curve.engagement_weight;
            if v_need > curve.max_outcome() {
                continue;
            }
            let idx = curve.points.partition_point(|&(_, v)| v < v_need);
            let (edge_m, _) = curve.points[idx];
            if edge_m <= self.ms[i] {
                // Already attained; the gap must be numeric noise.
                continue;
            }
            let steps = steps_to_reach(self.ms[i], edge_m, self.increment);
            let cost = steps * self.increment * self.wages[i] * self.annual_hours;
            let better = match best {
                None => true,
                Some((c, j, _)) => {
                    cost < c
                        || (cost == c
                            && (self.wages[i], &self.curves[i].stratum)
                                < (self.wages[j], &self.curves[j].stratum))
                }
            };
            if better {
                best = Some((cost, i, steps));
            }
        }
        best
    }

    /// Smallest increment-aligned moderator count not above the current
    /// one whose outcome still reaches `v_need`; the current count when
    /// no aligned reduction suffices.
    fn min_aligned_m(&self, i: usize, v_need: f64) -> f64 {
        let max_steps = (self.ms[i] / self.increment).floor() as u64;
        let feasible =
            |steps: u64| self.curves[i].outcome_at(steps as f64 * self.increment) >= v_need;
        let mut lo = 0u64;
        if !feasible(0) {
            // Binary search the smallest feasible step count.
            let mut hi = max_steps;
            while lo < hi {
                let mid = lo + (hi - lo) / 2;
                if feasible(mid) {
                    hi = mid;
                } else {
                    lo = mid + 1;
                }
            }
        }
        let new_m = lo as f64 * self.increment;
        if new_m < self.ms[i] && feasible(lo) {
            new_m
        } else {
            self.ms[i]
        }
    }

    /// Reduce each stratum to the smallest increment-aligned count that
    /// keeps the aggregate at or above the target. One pass in
    /// descending-wage order is maximal, because every reduction shrinks
    /// the remaining slack.
    fn prune(&mut self, target: f64) {
        let mut order: Vec<usize> = (0..self.curves.len()).collect();
        order.sort_by(|&a, &b| {
            self.wages[b]
                .total_cmp(&self.wages[a])
                .then_with(|| self.curves[a].stratum.cmp(&self.curves[b].stratum))
        });
        for i in order {
            if self.ms[i] == 0.0 {
                continue;
            }
            let slack = self.aggregate() - target;
            if slack <= 0.0 {
                continue;
            }
            let weight = self.curves[i].engagement_weight;
            let v_need = if weight > 0.0 {
                self.values[i] - slack / weight
            } else {
                f64::NEG_INFINITY
            };
            let new_m = self.min_aligned_m(i, v_need);
            if new_m < self.ms[i] {
                self.ms[i] = new_m;
                self.values[i] = self.curves[i].outcome_at(new_m);
            }
        }
    }

    /// Local search: drop one stratum to its next-lower outcome level
    /// and restore feasibility with the cheapest move elsewhere,
    /// whenever that strictly lowers total cost. Deterministic order,
    /// strict improvement, bounded iterations.
    fn swap_refine(&mut self, target: f64) {
        for _ in 0..100 {
            let mut improved = false;
            for a in 0..self.curves.len() {
                if self.ms[a] <= 0.0 {
                    continue;
                }
                let v_a = self.values[a];
                let lower_level = self.curves[a]
                    .points()
                    .iter()
                    .map(|&(_, v)| v)
                    .filter(|&v| v < v_a)
                    .fold(0.0_f64, f64::max);
                let new_m = self.min_aligned_m(a, lower_level);
                let new_v = self.curves[a].outcome_at(new_m);
                if new_m >= self.ms[a] || new_v >= v_a {
                    continue;
                }
                let saving = (self.ms[a] - new_m) * self.wages[a] * self.annual_hours;
                let (old_m, old_v) = (self.ms[a], self.values[a]);
                self.ms[a] = new_m;
                self.values[a] = new_v;
                if self.aggregate() >= target {
                    improved = true;
                    continue;
                }
                match self.cheapest_closing_move(target, Some(a)) {
                    Some((close_cost, b, steps)) if close_cost < saving => {
                        self.apply(b, steps);
                        improved = true;
                    }
                    _ => {
                        self.ms[a] = old_m;
                        self.values[a] = old_v;
                    }
                }
            }
            if improved {
                self.prune(target);
            } else {
                break;
            }
        }
    }
}

/// Greedy minimum-cost allocation for an aggregate
/// (engagement-weighted) outcome target.
///
/// The ascent repeatedly funds the stratum with the best marginal
/// weighted-gain per dollar, moving in `increment`-moderator steps and
/// looking across flat stretches to the best future step edge. The move
/// that would cross the target is replaced by the cheapest
/// target-closing move available anywhere, a prune pass then strips
/// spending the target does not need, and the result is never costlier
/// than the simultaneous plan for the same target (which is admissible
/// for the aggregate and used as a fallback bound).
pub fn allocate_utilitarian(
    target: f64,
    curves: &[OutcomeCurve],
    wt: &WageTable,
    increment: f64,
) -> Result<AllocationPlan> {
    validate_target(target)?;
    validate_curves(curves)?;
    if !increment.is_finite() || increment <= 0.0 {
        return Err(Error::invalid(format!(
            "allocation increment must be positive, got {increment}"
        )));
    }
    let saturated: f64 = curves
        .iter()
        .map(|c| c.engagement_weight * c.max_outcome())
        .sum();
    if saturated < target {
        return Err(Error::UnreachableTarget {
            target,
            stratum: None,
        });
    }

    let wages: Vec<f64> = curves
        .iter()
        .map(|c| wt.wage(&c.stratum))
        .collect::<Result<_>>()?;
    let mut state = GreedyState {
        curves,
        wages,
        annual_hours: wt.annual_hours,
        increment,
        ms: vec![0.0; curves.len()],
        values: curves.iter().map(|c| c.outcome_at(0.0)).collect(),
    };

    // Walk the greedy best-rate path; at every prefix, completing the
    // plan with the single cheapest closing move is a candidate. Keep
    // the cheapest completed state seen anywhere along the path.
    let mut best: Option<(f64, Vec<f64>, Vec<f64>)> = None;
    loop {
        if state.aggregate() >= target {
            let cost = state.cost();
            if best.as_ref().is_none_or(|&(c, _, _)| cost < c) {
                best = Some((cost, state.ms.clone(), state.values.clone()));
            }
            break;
        }
        if let Some((close_cost, i, steps)) = state.cheapest_closing_move(target, None) {
            let total = state.cost() + close_cost;
            if best.as_ref().is_none_or(|&(c, _, _)| total < c) {
                let mut ms = state.ms.clone();
                let mut values = state.values.clone();
                ms[i] += steps * increment;
                values[i] = curves[i].outcome_at(ms[i]);
                best = Some((total, ms, values));
            }
        }
        // Advance by the best-rate move; ties by lower wage, then code.
        let mut chosen: Option<(f64, usize, f64)> = None;
        for i in 0..curves.len() {
            if let Some((rate, steps)) = state.best_move(i) {
                let better = match chosen {
                    None => true,
                    Some((r, j, _)) => {
                        rate > r
                            || (rate == r
                                && (state.wages[i], &curves[i].stratum)
                                    < (state.wages[j], &curves[j].stratum))
                    }
                };
                if better {
                    chosen = Some((rate, i, steps));
                }
            }
        }
        let Some((_, stratum, steps)) = chosen else {
            break;
        };
        state.apply(stratum, steps);
    }
    let Some((_, ms, values)) = best else {
        return Err(Error::UnreachableTarget {
            target,
            stratum: None,
        });
    };
    state.ms = ms;
    state.values = values;
    state.prune(target);
    state.swap_refine(target);
    let greedy_plan = build_plan(
        AllocationPolicy::Utilitarian,
        target,
        curves,
        wt,
        &state.ms,
        &state.values,
    )?;

    // Dominance fallback: the simultaneous plan meets every stratum's
    // target, hence the aggregate; never return anything costlier.
    if let Ok(simul) = allocate_simultaneous(target, curves, wt) {
        if simul.total_annual_cost_usd < greedy_plan.total_annual_cost_usd {
            let mut fallback = GreedyState {
                ms: simul.per_stratum.iter().map(|s| s.m).collect(),
                values: simul.per_stratum.iter().map(|s| s.outcome).collect(),
                ..state
            };
            fallback.prune(target);
            fallback.swap_refine(target);
            return build_plan(
                AllocationPolicy::Utilitarian,
                target,
                curves,
                wt,
                &fallback.ms,
                &fallback.values,
            );
        }
    }
    Ok(greedy_plan)
}

/// One point of a cost frontier.
#[derive(Debug, Clone, Serialize)]
pub struct FrontierPoint {
    pub target: f64,
    pub total_cost_usd: f64,
    pub revenue_share: f64,
    pub plan: AllocationPlan,
}

/// Cost frontier over an ascending target grid, with the statutory fine
/// ceilings echoed as reference shares.
#[derive(Debug, Clone, Serialize)]
pub struct CostFrontier {
    pub policy: AllocationPolicy,
    pub points: Vec<FrontierPoint>,
    pub dsa_fine_share: f64,
    pub osa_fine_share: f64,
}

/// Compute one frontier point per target with the chosen policy;
/// `increment` applies to the utilitarian allocator.
pub fn cost_frontier(
    targets: &[f64],
    curves: &[OutcomeCurve],
    wt: &WageTable,
    policy: AllocationPolicy,
    increment: f64,
) -> Result<CostFrontier> {
    if targets.is_empty() {
        return Err(Error::invalid("no frontier targets given"));
    }
    if targets.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "frontier targets must be strictly ascending",
        ));
    }
    let points = targets
        .iter()
        .map(|&target| {
            let plan = match policy {
                AllocationPolicy::Simultaneous => allocate_simultaneous(target, curves, wt)?,
                AllocationPolicy::Utilitarian => {
                    allocate_utilitarian(target, curves, wt, increment)?
                }
            };
            Ok(FrontierPoint {
                target,
                total_cost_usd: plan.total_annual_cost_usd,
                revenue_share: plan.revenue_share,
                plan,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(CostFrontier {
        policy,
        points,
        dsa_fine_share: DSA_FINE_SHARE,
        osa_fine_share: OSA_FINE_SHARE,
    })
}

/// One row of the workforce sensitivity sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub k: f64,
    pub r: f64,
    pub total_moderators: f64,
    pub total_annual_cost_usd: f64,
    pub revenue_share: f64,
    /// Marks the reference configuration (k = 3, r = 100).
    pub baseline: bool,
}

/// Utilitarian allocation cost across a `(k, r)` workforce grid; the
/// generator supplies outcome curves for each parameter pair.
pub fn sensitivity_sweep<F>(
    k_values: &[f64],
    r_values: &[f64],
    target: f64,
    mut curves_for: F,
    wt: &WageTable,
    increment: f64,
) -> Result<Vec<SweepRow>>
where
    F: FnMut(f64, f64) -> Result<Vec<OutcomeCurve>>,
{
    if k_values.is_empty() || r_values.is_empty() {
        return Err(Error::invalid("sensitivity sweep needs k and r values"));
    }
    let mut rows = Vec::with_capacity(k_values.len() * r_values.len());
    for &k in k_values {
        for &r in r_values {
            let curves = curves_for(k, r)?;
            let plan = allocate_utilitarian(target, &curves, wt, increment)?;
            rows.push(SweepRow {
                k,
                r,
                total_moderators: plan.total_moderators,
                total_annual_cost_usd: plan.total_annual_cost_usd,
                revenue_share: plan.revenue_share,
                baseline: (k - 3.0).abs() < 1e-12 && (r - 100.0).abs() < 1e-12,
            });
        }
    }
    Ok(rows)
}

/// Aggregation weights: stratum share of total hate engagement,
/// estimated as `T_ℓ ×` (mean hate engagement per tweet in the stratum's
/// engagement-weighted sample), normalized over `strata`.
pub fn engagement_weights(
    corpus: &Corpus,
    volumes: &[LanguageVolume],
    strata: &[String],
) -> Result<BTreeMap<String, f64>> {
    if strata.is_empty() {
        return Err(Error::invalid("no strata given for engagement weights"));
    }
    let mut vol_by_stratum = BTreeMap::new();
    for v in volumes {
        vol_by_stratum.insert(v.stratum.as_str(), v.t);
    }
    let mut raw = Vec::with_capacity(strata.len());
    for stratum in strata {
        let t = *vol_by_stratum
            .get(stratum.as_str())
            .ok_or_else(|| Error::MissingEntry {
                table: "volume",
                stratum: stratum.clone(),
            })?;
        let rows = corpus.sample_rows(stratum, SampleKind::EngagementWeighted)?;
        let hate: Vec<f64> = rows
            .iter()
            .filter(|r| r.is_hate())
            .map(|r| r.engagement() as f64)
            .collect();
        let mean = if hate.is_empty() {
            0.0
        } else {
            hate.iter().sum::<f64>() / hate.len() as f64
        };
        raw.push((stratum.clone(), t * mean));
    }
    let total: f64 = raw.iter().map(|(_, w)| w).sum();
    if total <= 0.0 {
        return Err(Error::invalid(
            "no hate engagement mass; aggregation weights are undefined",
        ));
    }
    Ok(raw.into_iter().map(|(s, w)| (s, w / total)).collect())
}

/// Read a wage table from CSV with header `stratum,hourly_wage_usd`,
/// using the default annual hours and revenue.
pub fn load_wages(path: &Path) -> Result<WageTable> {
    let mut reader = csv::Reader::from_path(path)?;
    let headers = reader.headers()?.clone();
    let got: Vec<&str> = headers.iter().collect();
    if got != ["stratum", "hourly_wage_usd"] {
        return Err(Error::schema(format!(
            "wage table must have columns stratum,hourly_wage_usd; got {}",
            got.join(",")
        )));
    }
    let mut wages: Vec<(String, f64)> = Vec::new();
    for (i, record) in reader.deserialize::<(String, f64)>().enumerate() {
        let row = record.map_err(|e| Error::row(i + 2, e.to_string()))?;
        if wages.iter().any(|(s, _)| *s == row.0) {
            return Err(Error::row(
                i + 2,
                format!("duplicate wage entry for stratum `{}`", row.0),
            ));
        }
        wages.push(row);
    }
    WageTable::new(wages)
}
