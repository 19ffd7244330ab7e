//! Precision/recall evaluation over chronological holdouts and
//! dominant-trait population classification.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use rayon::prelude::*;
use thiserror::Error;

use crate::data::{Dataset, ItemId, RatingsTable, RatingsView, UserId};
use crate::personality::{dominant_trait, MbtiType, PersonalityModelKind};
use crate::recommender::{
    baseline_with_inputs, hybrid_with_inputs, simp_row, simr_row, type_row, PredictorConfig,
    RecommendError, SimInputs,
};

/// Errors from evaluation-set validation and sweep configuration.
#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("item {0:?} is both relevant and irrelevant")]
    OverlappingSets(ItemId),
    #[error("viewed item {0:?} lies outside the displayed set")]
    ViewedOutsideDisplayed(ItemId),
    #[error("buckets must be strictly increasing")]
    BucketsNotIncreasing,
    #[error("population classification needs a trait model or mbti, got {0}")]
    UnsupportedModel(PersonalityModelKind),
    #[error("relevance margin must be finite")]
    InvalidMargin,
    #[error(transparent)]
    Recommend(#[from] RecommendError),
}

/// The per-user sets behind one evaluation: relevant (R), irrelevant (I)
/// and viewed (V), with `V` contained in the displayed set `R + I`.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationSets {
    relevant: BTreeSet<ItemId>,
    irrelevant: BTreeSet<ItemId>,
    viewed: BTreeSet<ItemId>,
}

impl EvaluationSets {
    pub fn new(
        relevant: BTreeSet<ItemId>,
        irrelevant: BTreeSet<ItemId>,
        viewed: BTreeSet<ItemId>,
    ) -> Result<EvaluationSets, EvalError> {
        if let Some(&item) = relevant.intersection(&irrelevant).next() {
            return Err(EvalError::OverlappingSets(item));
        }
        if let Some(&item) = viewed
            .iter()
            .find(|i| !relevant.contains(i) && !irrelevant.contains(i))
        {
            return Err(EvalError::ViewedOutsideDisplayed(item));
        }
        Ok(EvaluationSets {
            relevant,
            irrelevant,
            viewed,
        })
    }

    pub fn relevant(&self) -> &BTreeSet<ItemId> {
        &self.relevant
    }

    pub fn irrelevant(&self) -> &BTreeSet<ItemId> {
        &self.irrelevant
    }

    pub fn viewed(&self) -> &BTreeSet<ItemId> {
        &self.viewed
    }
}

/// Splits the sets into true positives (relevant and viewed), false
/// positives (irrelevant but viewed) and false negatives (relevant but
/// not viewed).
pub fn confusion_sets(
    sets: &EvaluationSets,
) -> (BTreeSet<ItemId>, BTreeSet<ItemId>, BTreeSet<ItemId>) {
    let tp: BTreeSet<ItemId> = sets.relevant.intersection(&sets.viewed).copied().collect();
    let fp: BTreeSet<ItemId> = sets
        .irrelevant
        .intersection(&sets.viewed)
        .copied()
        .collect();
    let fn_: BTreeSet<ItemId> = sets.relevant.difference(&sets.viewed).copied().collect();
    (tp, fp, fn_)
}

/// `|TP| / (|TP| + |FP|)`, 0 when nothing was viewed.
pub fn precision(tp: usize, fp: usize) -> f64 {
    if tp + fp == 0 {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    }
}

/// `|TP| / (|TP| + |FN|)`, 0 when nothing was relevant.
pub fn recall(tp: usize, fn_: usize) -> f64 {
    if tp + fn_ == 0 {
        0.0
    } else {
        tp as f64 / (tp + fn_) as f64
    }
}

/// Harmonic mean of precision and recall, 0 when both are 0.
pub fn f_measure(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// How held-out items are judged relevant: a predicted score at least the
/// user's mean rating plus this margin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoldoutConfig {
    pub relevance_margin: f64,
}

impl HoldoutConfig {
    pub fn validate(&self) -> Result<(), EvalError> {
        if self.relevance_margin.is_finite() {
            Ok(())
        } else {
            Err(EvalError::InvalidMargin)
        }
    }
}

impl Default for HoldoutConfig {
    fn default() -> Self {
        HoldoutConfig {
            relevance_margin: 0.0,
        }
    }
}

/// One averaged sweep cell: a model evaluated at one history bucket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricPoint {
    pub model: PersonalityModelKind,
    pub bucket: u32,
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
    /// Users contributing to the averages; 0 flags an empty bucket.
    pub n_users: u32,
}

/// Per-user metrics for one (model, bucket) cell; `None` when the user has
/// no surviving held-out views at that bucket.
type CellMetrics = Option<(f64, f64, f64)>;

fn distinct_models(models: &[PersonalityModelKind]) -> (Vec<PersonalityModelKind>, Vec<usize>) {
    let mut distinct = Vec::new();
    let mut index_of = Vec::with_capacity(models.len());
    for &model in models {
        let idx = match distinct.iter().position(|&m| m == model) {
            Some(idx) => idx,
            None => {
                distinct.push(model);
                distinct.len() - 1
            }
        };
        index_of.push(idx);
    }
    (distinct, index_of)
}

/// Evaluates every listed model over every history bucket.
///
/// For each user and bucket `b`, the user's first `b` events become their
/// visible history and the remaining events form the held-out views. The
/// displayed set is the catalog minus the visible items; predicted scores
/// split it into relevant and irrelevant items; held-out views that
/// re-visit visible items are dropped to stay inside the displayed set.
/// Users with no surviving held-out views are skipped at that bucket.
/// Per-user precision, recall and F-measure are macro-averaged in user-id
/// order. Output rows follow the `models` list order, then bucket order.
pub fn run_sweep(
    ds: &Dataset,
    models: &[PersonalityModelKind],
    buckets: &[u32],
    cfg: &PredictorConfig,
    split: &HoldoutConfig,
) -> Result<Vec<MetricPoint>, EvalError> {
    cfg.validate()?;
    split.validate()?;
    if buckets.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::BucketsNotIncreasing);
    }
    let (distinct, index_of) = distinct_models(models);
    let needs_types = distinct
        .iter()
        .any(|m| matches!(m, PersonalityModelKind::Mbti | PersonalityModelKind::Hybrid));
    let mut trait_kinds: Vec<PersonalityModelKind> = distinct
        .iter()
        .copied()
        .filter(|m| m.is_trait_model())
        .collect();
    if distinct.contains(&PersonalityModelKind::Hybrid)
        && !trait_kinds.contains(&cfg.hybrid.trait_model)
    {
        trait_kinds.push(cfg.hybrid.trait_model);
    }

    let table = RatingsTable::new(ds);
    let n_buckets = buckets.len();
    let per_user: Vec<Vec<CellMetrics>> = (0..ds.n_users())
        .into_par_iter()
        .map(|u| evaluate_user(ds, &table, UserId(u as u32), &distinct, &trait_kinds, needs_types, buckets, cfg, split))
        .collect::<Result<_, EvalError>>()?;

    let mut points = Vec::with_capacity(models.len() * n_buckets);
    for (li, &model) in models.iter().enumerate() {
        let di = index_of[li];
        for (bi, &bucket) in buckets.iter().enumerate() {
            let mut sums = (0.0, 0.0, 0.0);
            let mut n_users = 0u32;
            for row in &per_user {
                if let Some((p, r, f)) = row[di * n_buckets + bi] {
                    sums.0 += p;
                    sums.1 += r;
                    sums.2 += f;
                    n_users += 1;
                }
            }
            let denom = if n_users == 0 { 1.0 } else { f64::from(n_users) };
            points.push(MetricPoint {
                model,
                bucket,
                precision: sums.0 / denom,
                recall: sums.1 / denom,
                f_measure: sums.2 / denom,
                n_users,
            });
        }
    }
    Ok(points)
}

#[allow(clippy::too_many_arguments)]
fn evaluate_user(
    ds: &Dataset,
    table: &RatingsTable,
    u: UserId,
    distinct: &[PersonalityModelKind],
    trait_kinds: &[PersonalityModelKind],
    needs_types: bool,
    buckets: &[u32],
    cfg: &PredictorConfig,
    split: &HoldoutConfig,
) -> Result<Vec<CellMetrics>, EvalError> {
    let n_buckets = buckets.len();
    let mut cells = vec![None; distinct.len() * n_buckets];
    let events = ds.user_events(u);

    let mut simp_rows: Vec<Vec<f64>> = Vec::with_capacity(trait_kinds.len());
    for &kind in trait_kinds {
        simp_rows.push(simp_row(ds, u, kind)?);
    }
    let simp_for = |kind: PersonalityModelKind| -> Option<&[f64]> {
        trait_kinds
            .iter()
            .position(|&k| k == kind)
            .map(|idx| simp_rows[idx].as_slice())
    };
    let types = needs_types.then(|| type_row(ds, u));

    for (bi, &bucket) in buckets.iter().enumerate() {
        let train_n = (bucket as usize).min(events.len());
        if train_n >= events.len() {
            continue; // nothing held out
        }
        let view = RatingsView::truncated(table, ds, u, train_n);
        let training_items: BTreeSet<ItemId> =
            view.row(u).entries().iter().map(|&(i, _)| i).collect();
        let held_out: BTreeSet<ItemId> = events[train_n..]
            .iter()
            .map(|&idx| ds.events()[idx].item)
            .filter(|i| !training_items.contains(i))
            .collect();
        if held_out.is_empty() {
            continue;
        }
        let simr = simr_row(u, &view).map_err(RecommendError::from)?;
        let n_rated = view.rated_count(u);
        let base_mean = view.mean_or_global(u);
        let cutoff = base_mean + split.relevance_margin;
        let candidates = ds.n_items() - training_items.len();

        for (di, &model) in distinct.iter().enumerate() {
            let inputs = SimInputs {
                simp: match model {
                    PersonalityModelKind::Hybrid => simp_for(cfg.hybrid.trait_model),
                    m if m.is_trait_model() => simp_for(m),
                    _ => None,
                },
                type_eq: types.as_deref(),
                simr: &simr,
                n_rated,
            };
            let nbhd = if model == PersonalityModelKind::Hybrid {
                let cold = n_rated < cfg.hybrid.coldstart_view_count as usize;
                hybrid_with_inputs(u, cold, &inputs, cfg)
            } else {
                baseline_with_inputs(u, model, &inputs, cfg)
            };

            // Per-item score accumulators over the candidate items any
            // neighbor rated; contributions arrive in neighborhood order,
            // matching the public prediction exactly.
            let mut acc: HashMap<ItemId, (f64, f64)> = HashMap::new();
            for &(v, weight) in nbhd.neighbors() {
                let row = view.row(v);
                let Some(v_mean) = row.mean() else { continue };
                for &(item, r_vi) in row.entries() {
                    if training_items.contains(&item) {
                        continue;
                    }
                    let slot = acc.entry(item).or_insert((0.0, 0.0));
                    slot.0 += weight * (r_vi - v_mean);
                    slot.1 += weight.abs();
                }
            }
            let score_of = |slot: Option<&(f64, f64)>| -> f64 {
                match slot {
                    Some(&(num, den)) if den != 0.0 => base_mean + num / den,
                    _ => base_mean,
                }
            };
            let mut relevant = 0usize;
            for slot in acc.values() {
                if score_of(Some(slot)) >= cutoff {
                    relevant += 1;
                }
            }
            if base_mean >= cutoff {
                // Items no neighbor rated score the fallback mean; count
                // them wholesale instead of enumerating the catalog.
                relevant += candidates - acc.len();
            }
            let mut tp = 0usize;
            for item in &held_out {
                if score_of(acc.get(item)) >= cutoff {
                    tp += 1;
                }
            }
            let fp = held_out.len() - tp;
            let fn_ = relevant - tp;
            let p = precision(tp, fp);
            let r = recall(tp, fn_);
            cells[di * n_buckets + bi] = Some((p, r, f_measure(p, r)));
        }
    }
    Ok(cells)
}

/// Counts users per dominant trait (trait models) or per type (MBTI).
/// Labels appear in canonical order, including zero counts.
pub fn classify_population(
    ds: &Dataset,
    model: PersonalityModelKind,
) -> Result<Vec<(String, u32)>, EvalError> {
    match model {
        PersonalityModelKind::Hybrid => Err(EvalError::UnsupportedModel(model)),
        PersonalityModelKind::Mbti => {
            let order = MbtiType::all();
            let mut counts = vec![0u32; order.len()];
            for profile in ds.users() {
                let idx = order
                    .iter()
                    .position(|t| *t == profile.mbti())
                    .expect("every type is canonical");
                counts[idx] += 1;
            }
            Ok(order
                .iter()
                .zip(counts)
                .map(|(t, c)| (t.to_string(), c))
                .collect())
        }
        kind => {
            let labels = kind.dimension_labels().expect("trait model");
            let mut counts = vec![0u32; labels.len()];
            for profile in ds.users() {
                let vector = profile.trait_vector(kind).expect("trait model");
                let label = dominant_trait(vector);
                let idx = labels.iter().position(|l| *l == label).expect("own label");
                counts[idx] += 1;
            }
            Ok(labels
                .iter()
                .zip(counts)
                .map(|(l, c)| (l.to_string(), c))
                .collect())
        }
    }
}

/// Renders sweep rows as CSV with a header, six fractional digits.
pub fn metrics_csv(points: &[MetricPoint]) -> String {
    let mut out = String::from("model,bucket,precision,recall,f_measure,n_users\n");
    for p in points {
        writeln!(
            out,
            "{},{},{:.6},{:.6},{:.6},{}",
            p.model, p.bucket, p.precision, p.recall, p.f_measure, p.n_users
        )
        .expect("string write");
    }
    out
}

/// Renders a label histogram as CSV with a header.
pub fn histogram_csv(rows: &[(String, u32)]) -> String {
    let mut out = String::from("label,count\n");
    for (label, count) in rows {
        writeln!(out, "{label},{count}").expect("string write");
    }
    out
}
