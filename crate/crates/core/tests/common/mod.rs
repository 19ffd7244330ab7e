//! Shared fixtures plus reference implementations written independently of
//! the library internals. The references favor clarity over speed: raw-sums
//! Pearson, brute-force neighbor filtering, full re-sorts. The suites compare
//! the optimized library code against these.

#![allow(dead_code)]

use personarec::data::{
    Dataset, EventRecord, Item, ItemId, RatingsView, UserId,
};
use personarec::personality::{MbtiType, PersonalityModelKind, TraitVector};
use personarec::recommender::{predict_score, Neighborhood, PredictorConfig, UserProfile};
use personarec::similarity::{alpha_for, sim_combined, sim_personality};

/// Pearson correlation in the raw-sums ("computational") form, a different
/// evaluation order from the library's centered two-pass form.
pub fn pearson_reference(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let sum_x: f64 = xs.iter().sum();
    let sum_y: f64 = ys.iter().sum();
    let sum_xy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
    let sum_xx: f64 = xs.iter().map(|x| x * x).sum();
    let sum_yy: f64 = ys.iter().map(|y| y * y).sum();
    let num = n * sum_xy - sum_x * sum_y;
    let den = (n * sum_xx - sum_x * sum_x).sqrt() * (n * sum_yy - sum_y * sum_y).sqrt();
    if den == 0.0 || !den.is_finite() {
        0.0
    } else {
        num / den
    }
}

/// Both users' effective ratings over their co-rated items, ascending by
/// item, read straight off the public row API.
pub fn corated(view: &RatingsView, ux: UserId, uy: UserId) -> (Vec<f64>, Vec<f64>) {
    let row_y = view.row(uy);
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for &(item, rx) in view.row(ux).entries() {
        if let Some(ry) = row_y.rating(item) {
            xs.push(rx);
            ys.push(ry);
        }
    }
    (xs, ys)
}

/// Reference rating similarity: raw-sums Pearson over the co-rated
/// intersection, `None` below two shared items.
pub fn sim_rating_reference(view: &RatingsView, ux: UserId, uy: UserId) -> Option<f64> {
    let (xs, ys) = corated(view, ux, uy);
    if xs.len() < 2 {
        None
    } else {
        Some(pearson_reference(&xs, &ys))
    }
}

fn simp_of(ds: &Dataset, u: UserId, v: UserId, model: PersonalityModelKind) -> f64 {
    let pu = ds.user(u).trait_vector(model).expect("trait model");
    let pv = ds.user(v).trait_vector(model).expect("trait model");
    sim_personality(pu, pv).expect("same model")
}

fn sorted_capped(u: UserId, mut kept: Vec<(UserId, f64)>, cap: usize) -> Neighborhood {
    kept.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    kept.truncate(cap);
    Neighborhood::new(u, kept).expect("reference neighborhood is well formed")
}

/// Brute-force single-model neighborhood built from the public similarity
/// primitives: trait models keep blended similarity above the threshold,
/// the type baseline keeps the exact type class weighted by rating
/// similarity.
pub fn neighborhood_reference_baseline(
    u: UserId,
    model: PersonalityModelKind,
    ds: &Dataset,
    view: &RatingsView,
    cfg: &PredictorConfig,
) -> Neighborhood {
    let mut kept = Vec::new();
    for idx in 0..ds.n_users() {
        let v = UserId(idx as u32);
        if v == u {
            continue;
        }
        if model == PersonalityModelKind::Mbti {
            if ds.user(v).mbti() == ds.user(u).mbti() {
                let w = sim_rating_of_library(view, u, v).unwrap_or(0.0);
                kept.push((v, w));
            }
            continue;
        }
        let alpha = alpha_for(view.rated_count(u), &cfg.blend);
        let combined = sim_combined(
            simp_of(ds, u, v, model),
            sim_rating_of_library(view, u, v),
            alpha,
            cfg.blend.combiner,
        );
        if combined > cfg.neighbor_threshold {
            kept.push((v, combined));
        }
    }
    sorted_capped(u, kept, cfg.max_neighbors)
}

/// Brute-force hybrid neighborhood: cold users take anyone passing the
/// personality threshold or sharing their type; warm users need both the
/// blended threshold and the type match. Weights are always the blend.
pub fn neighborhood_reference_hybrid(
    u: UserId,
    ds: &Dataset,
    view: &RatingsView,
    cfg: &PredictorConfig,
) -> Neighborhood {
    let cold = view.rated_count(u) < cfg.hybrid.coldstart_view_count as usize;
    let alpha = alpha_for(view.rated_count(u), &cfg.blend);
    let mut kept = Vec::new();
    for idx in 0..ds.n_users() {
        let v = UserId(idx as u32);
        if v == u {
            continue;
        }
        let simp = simp_of(ds, u, v, cfg.hybrid.trait_model);
        let same_type = ds.user(v).mbti() == ds.user(u).mbti();
        let combined = sim_combined(
            simp,
            sim_rating_of_library(view, u, v),
            alpha,
            cfg.blend.combiner,
        );
        let keep = if cold {
            simp > cfg.hybrid.lambda || same_type
        } else {
            combined > cfg.hybrid.delta && same_type
        };
        if keep {
            kept.push((v, combined));
        }
    }
    sorted_capped(u, kept, cfg.max_neighbors)
}

// The neighborhood references deliberately reuse the library's pairwise
// similarities (proven against the raw-sums oracle elsewhere) so that set
// membership, weighting, ordering and truncation are what is under test.
fn sim_rating_of_library(view: &RatingsView, u: UserId, v: UserId) -> Option<f64> {
    personarec::similarity::sim_rating(u, v, view).expect("users exist")
}

/// Reference ranking: score every unrated item with the public predictor,
/// then re-sort by descending score with ascending-id ties.
pub fn top_n_reference(
    u: UserId,
    n: usize,
    ds: &Dataset,
    view: &RatingsView,
    nbhd: &Neighborhood,
) -> Vec<(ItemId, f64)> {
    let mut scored = Vec::new();
    for idx in 0..ds.n_items() {
        let item = ItemId(idx as u32);
        if view.rating(u, item).is_none() {
            scored.push((item, predict_score(u, item, nbhd, view).expect("valid ids")));
        }
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(n);
    scored
}

/// A user whose four representations are built from explicit scores.
pub fn profile(
    id: &str,
    big5: [f64; 5],
    eysenck: [f64; 3],
    hexaco: [f64; 6],
    mbti: &str,
) -> UserProfile {
    UserProfile::new(
        id.to_string(),
        TraitVector::new(PersonalityModelKind::Big5, big5.to_vec()).unwrap(),
        TraitVector::new(PersonalityModelKind::Eysenck, eysenck.to_vec()).unwrap(),
        TraitVector::new(PersonalityModelKind::Hexaco, hexaco.to_vec()).unwrap(),
        mbti.parse::<MbtiType>().unwrap(),
    )
    .unwrap()
}

/// A profile with every trait pinned to one value; handy when only the type
/// or only the rating history matters.
pub fn flat_profile(id: &str, level: f64, mbti: &str) -> UserProfile {
    profile(id, [level; 5], [level; 3], [level; 6], mbti)
}

/// One catalog item with the given labels.
pub fn item(id: &str, labels: &[&str]) -> Item {
    Item {
        id: id.to_string(),
        labels: labels.iter().map(|s| s.to_string()).collect(),
    }
}

/// An explicit rating event; timestamps are synthesized so that events
/// listed later happen later.
pub fn event(user: &str, item: &str, timestamp: i64, rating: Option<u8>) -> EventRecord {
    EventRecord {
        user: user.to_string(),
        item: item.to_string(),
        timestamp,
        rating,
    }
}

/// A dataset of flat-trait users whose histories are given as explicit
/// `(item, rating)` lists; items i1..iN are created to cover every mention.
pub fn rated_dataset(rows: &[(&str, &str, &[(&str, u8)])]) -> Dataset {
    let users = rows
        .iter()
        .map(|(id, mbti, _)| flat_profile(id, 0.5, mbti))
        .collect::<Vec<_>>();
    let mut item_ids: Vec<&str> = rows
        .iter()
        .flat_map(|(_, _, history)| history.iter().map(|(item, _)| *item))
        .collect();
    item_ids.sort();
    item_ids.dedup();
    let items = item_ids
        .iter()
        .map(|id| item(id, &["tag"]))
        .collect::<Vec<_>>();
    let mut t = 0;
    let mut records = Vec::new();
    for (user, _, history) in rows {
        for (item, rating) in *history {
            records.push(event(user, item, t, Some(*rating)));
            t += 1;
        }
    }
    Dataset::new(users, items, records).unwrap()
}
