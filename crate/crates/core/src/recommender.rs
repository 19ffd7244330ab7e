//! Neighborhood construction for every model variant, rating prediction
//! and top-N recommendation.

use thiserror::Error;

use crate::data::{Dataset, ItemId, RatingsView, UserId};
use crate::personality::{MbtiType, PersonalityModelKind, TraitVector};
use crate::similarity::{
    alpha_for, sim_combined, sim_personality, sim_rating, BlendConfig, SimilarityError,
};

/// Errors from profile construction.
#[derive(Debug, Error, PartialEq)]
pub enum ProfileError {
    #[error("profile {id:?}: {field} field carries a {found} vector")]
    WrongModel {
        id: String,
        field: &'static str,
        found: PersonalityModelKind,
    },
    #[error("profile id must be non-empty")]
    EmptyId,
}

/// Errors from neighborhood construction and prediction.
#[derive(Debug, Error, PartialEq)]
pub enum RecommendError {
    #[error("user index {index} out of range ({n_users} users)")]
    UnknownUser { index: u32, n_users: usize },
    #[error("item index {index} out of range ({n_items} items)")]
    UnknownItem { index: u32, n_items: usize },
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("neighborhood contains {0}")]
    MalformedNeighborhood(String),
    #[error(transparent)]
    Similarity(#[from] SimilarityError),
}

/// One user's personality under all four representations.
#[derive(Debug, Clone, PartialEq)]
pub struct UserProfile {
    id: String,
    big5: TraitVector,
    eysenck: TraitVector,
    hexaco: TraitVector,
    mbti: MbtiType,
}

impl UserProfile {
    pub fn new(
        id: String,
        big5: TraitVector,
        eysenck: TraitVector,
        hexaco: TraitVector,
        mbti: MbtiType,
    ) -> Result<UserProfile, ProfileError> {
        if id.is_empty() {
            return Err(ProfileError::EmptyId);
        }
        for (field, vector, expected) in [
            ("big5", &big5, PersonalityModelKind::Big5),
            ("eysenck", &eysenck, PersonalityModelKind::Eysenck),
            ("hexaco", &hexaco, PersonalityModelKind::Hexaco),
        ] {
            if vector.model() != expected {
                return Err(ProfileError::WrongModel {
                    id,
                    field,
                    found: vector.model(),
                });
            }
        }
        Ok(UserProfile {
            id,
            big5,
            eysenck,
            hexaco,
            mbti,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn big5(&self) -> &TraitVector {
        &self.big5
    }

    pub fn eysenck(&self) -> &TraitVector {
        &self.eysenck
    }

    pub fn hexaco(&self) -> &TraitVector {
        &self.hexaco
    }

    pub fn mbti(&self) -> MbtiType {
        self.mbti
    }

    /// The trait vector for a trait model, `None` for type-based kinds.
    pub fn trait_vector(&self, model: PersonalityModelKind) -> Option<&TraitVector> {
        match model {
            PersonalityModelKind::Big5 => Some(&self.big5),
            PersonalityModelKind::Eysenck => Some(&self.eysenck),
            PersonalityModelKind::Hexaco => Some(&self.hexaco),
            PersonalityModelKind::Mbti | PersonalityModelKind::Hybrid => None,
        }
    }
}

/// Thresholds steering the hybrid's two selection branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridConfig {
    /// Personality-similarity threshold for the cold branch.
    pub lambda: f64,
    /// Combined-similarity threshold for the warm branch.
    pub delta: f64,
    /// History size below which a user counts as cold.
    pub coldstart_view_count: u32,
    /// Trait model backing the hybrid's personality similarity.
    pub trait_model: PersonalityModelKind,
}

impl HybridConfig {
    pub fn validate(&self) -> Result<(), RecommendError> {
        if !self.lambda.is_finite() || !self.delta.is_finite() {
            return Err(RecommendError::InvalidConfig(
                "hybrid thresholds must be finite".to_string(),
            ));
        }
        if self.coldstart_view_count == 0 {
            return Err(RecommendError::InvalidConfig(
                "coldstart_view_count must be at least 1".to_string(),
            ));
        }
        if !self.trait_model.is_trait_model() {
            return Err(RecommendError::InvalidConfig(format!(
                "hybrid trait_model must be a trait model, got {}",
                self.trait_model
            )));
        }
        Ok(())
    }
}

impl Default for HybridConfig {
    fn default() -> Self {
        HybridConfig {
            lambda: 0.5,
            delta: 0.2,
            coldstart_view_count: 5,
            trait_model: PersonalityModelKind::Big5,
        }
    }
}

/// Everything a recommender run needs besides the dataset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PredictorConfig {
    pub model: PersonalityModelKind,
    pub blend: BlendConfig,
    pub hybrid: HybridConfig,
    /// Combined-similarity cutoff for trait-model neighborhoods.
    pub neighbor_threshold: f64,
    /// Neighborhood size cap; highest weights kept, ties to lower user ids.
    pub max_neighbors: usize,
}

impl PredictorConfig {
    pub fn validate(&self) -> Result<(), RecommendError> {
        self.blend.validate()?;
        self.hybrid.validate()?;
        if !self.neighbor_threshold.is_finite() {
            return Err(RecommendError::InvalidConfig(
                "neighbor_threshold must be finite".to_string(),
            ));
        }
        if self.max_neighbors == 0 {
            return Err(RecommendError::InvalidConfig(
                "max_neighbors must be at least 1".to_string(),
            ));
        }
        Ok(())
    }
}

impl Default for PredictorConfig {
    fn default() -> Self {
        PredictorConfig {
            model: PersonalityModelKind::Big5,
            blend: BlendConfig::default(),
            hybrid: HybridConfig::default(),
            neighbor_threshold: 0.0,
            max_neighbors: 40,
        }
    }
}

/// A user's weighted neighbor list, ordered by descending weight with ties
/// on ascending user id. Never contains the user or duplicates.
#[derive(Debug, Clone, PartialEq)]
pub struct Neighborhood {
    user: UserId,
    neighbors: Vec<(UserId, f64)>,
}

impl Neighborhood {
    /// Builds a neighborhood from explicit weights, enforcing the no-self
    /// and no-duplicate invariants. Order is preserved as given.
    pub fn new(user: UserId, neighbors: Vec<(UserId, f64)>) -> Result<Neighborhood, RecommendError> {
        let mut seen: Vec<UserId> = neighbors.iter().map(|&(v, _)| v).collect();
        seen.sort();
        for pair in seen.windows(2) {
            if pair[0] == pair[1] {
                return Err(RecommendError::MalformedNeighborhood(format!(
                    "duplicate neighbor {:?}",
                    pair[0]
                )));
            }
        }
        if seen.binary_search(&user).is_ok() {
            return Err(RecommendError::MalformedNeighborhood(format!(
                "the user itself ({user:?})"
            )));
        }
        Ok(Neighborhood { user, neighbors })
    }

    pub fn user(&self) -> UserId {
        self.user
    }

    pub fn neighbors(&self) -> &[(UserId, f64)] {
        &self.neighbors
    }

    pub fn len(&self) -> usize {
        self.neighbors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.neighbors.is_empty()
    }

    pub fn contains(&self, v: UserId) -> bool {
        self.neighbors.iter().any(|&(n, _)| n == v)
    }
}

/// Precomputed similarity rows for one target user against all users.
/// Row slots at the target's own index are never read.
pub(crate) struct SimInputs<'a> {
    /// Personality similarities; required for trait models and hybrid.
    pub simp: Option<&'a [f64]>,
    /// MBTI type equality; required for the MBTI baseline and hybrid.
    pub type_eq: Option<&'a [bool]>,
    /// Rating similarities; `None` marks missing co-rated overlap.
    pub simr: &'a [Option<f64>],
    /// Target user's rated-item count in the active view.
    pub n_rated: usize,
}

pub(crate) fn simp_row(
    ds: &Dataset,
    u: UserId,
    model: PersonalityModelKind,
) -> Result<Vec<f64>, RecommendError> {
    let base = ds.user(u).trait_vector(model).ok_or_else(|| {
        RecommendError::InvalidConfig(format!("{model} carries no trait vector"))
    })?;
    let mut row = vec![0.0; ds.n_users()];
    for (v, profile) in ds.users().iter().enumerate() {
        if v as u32 == u.0 {
            continue;
        }
        let other = profile
            .trait_vector(model)
            .expect("profiles carry every trait model");
        row[v] = sim_personality(base, other)?;
    }
    Ok(row)
}

pub(crate) fn type_row(ds: &Dataset, u: UserId) -> Vec<bool> {
    let own = ds.user(u).mbti();
    ds.users().iter().map(|p| p.mbti() == own).collect()
}

pub(crate) fn simr_row(
    u: UserId,
    view: &RatingsView,
) -> Result<Vec<Option<f64>>, SimilarityError> {
    (0..view.n_users())
        .map(|v| {
            if v as u32 == u.0 {
                Ok(None)
            } else {
                sim_rating(u, UserId(v as u32), view)
            }
        })
        .collect()
}

fn finalize(user: UserId, mut candidates: Vec<(UserId, f64)>, cap: usize) -> Neighborhood {
    candidates.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    candidates.truncate(cap);
    Neighborhood {
        user,
        neighbors: candidates,
    }
}

pub(crate) fn baseline_with_inputs(
    u: UserId,
    model: PersonalityModelKind,
    inputs: &SimInputs,
    cfg: &PredictorConfig,
) -> Neighborhood {
    let n_users = inputs.simr.len();
    let mut candidates = Vec::new();
    if model == PersonalityModelKind::Mbti {
        let type_eq = inputs.type_eq.expect("MBTI baseline needs type equality");
        for v in 0..n_users {
            if v as u32 == u.0 || !type_eq[v] {
                continue;
            }
            candidates.push((UserId(v as u32), inputs.simr[v].unwrap_or(0.0)));
        }
    } else {
        let simp = inputs.simp.expect("trait baseline needs personality sims");
        let alpha = alpha_for(inputs.n_rated, &cfg.blend);
        for v in 0..n_users {
            if v as u32 == u.0 {
                continue;
            }
            let weight = sim_combined(simp[v], inputs.simr[v], alpha, cfg.blend.combiner);
            if weight > cfg.neighbor_threshold {
                candidates.push((UserId(v as u32), weight));
            }
        }
    }
    finalize(u, candidates, cfg.max_neighbors)
}

pub(crate) fn hybrid_with_inputs(
    u: UserId,
    cold: bool,
    inputs: &SimInputs,
    cfg: &PredictorConfig,
) -> Neighborhood {
    let simp = inputs.simp.expect("hybrid needs personality sims");
    let type_eq = inputs.type_eq.expect("hybrid needs type equality");
    let alpha = alpha_for(inputs.n_rated, &cfg.blend);
    let mut candidates = Vec::new();
    for v in 0..inputs.simr.len() {
        if v as u32 == u.0 {
            continue;
        }
        let weight = sim_combined(simp[v], inputs.simr[v], alpha, cfg.blend.combiner);
        let selected = if cold {
            simp[v] > cfg.hybrid.lambda || type_eq[v]
        } else {
            weight > cfg.hybrid.delta && type_eq[v]
        };
        if selected {
            candidates.push((UserId(v as u32), weight));
        }
    }
    finalize(u, candidates, cfg.max_neighbors)
}

fn check_user(u: UserId, n_users: usize) -> Result<(), RecommendError> {
    if u.0 as usize >= n_users {
        Err(RecommendError::UnknownUser {
            index: u.0,
            n_users,
        })
    } else {
        Ok(())
    }
}

fn check_consistency(ds: &Dataset, view: &RatingsView) -> Result<(), RecommendError> {
    if ds.n_users() != view.n_users() || ds.n_items() != view.n_items() {
        return Err(RecommendError::InvalidConfig(
            "ratings view was built from a different dataset".to_string(),
        ));
    }
    Ok(())
}

/// True when the user's history in this view is shorter than the
/// configured cold-start count (strict comparison).
pub fn is_cold_start(
    u: UserId,
    view: &RatingsView,
    cfg: &HybridConfig,
) -> Result<bool, RecommendError> {
    check_user(u, view.n_users())?;
    Ok(view.rated_count(u) < cfg.coldstart_view_count as usize)
}

/// Builds a single-model neighborhood.
///
/// Trait models admit every other user whose blended similarity exceeds
/// `neighbor_threshold`; the MBTI baseline admits exactly the users sharing
/// the target's type, weighted by rating similarity (0 without overlap).
pub fn build_neighborhood_baseline(
    u: UserId,
    model: PersonalityModelKind,
    ds: &Dataset,
    view: &RatingsView,
    cfg: &PredictorConfig,
) -> Result<Neighborhood, RecommendError> {
    cfg.validate()?;
    check_consistency(ds, view)?;
    check_user(u, ds.n_users())?;
    if model == PersonalityModelKind::Hybrid {
        return Err(RecommendError::InvalidConfig(
            "the hybrid model has a dedicated builder".to_string(),
        ));
    }
    let simr = simr_row(u, view)?;
    let n_rated = view.rated_count(u);
    let (simp, type_eq);
    let inputs = if model == PersonalityModelKind::Mbti {
        type_eq = type_row(ds, u);
        SimInputs {
            simp: None,
            type_eq: Some(&type_eq),
            simr: &simr,
            n_rated,
        }
    } else {
        simp = simp_row(ds, u, model)?;
        SimInputs {
            simp: Some(&simp),
            type_eq: None,
            simr: &simr,
            n_rated,
        }
    };
    Ok(baseline_with_inputs(u, model, &inputs, cfg))
}

/// Builds the hybrid neighborhood: cold users take anyone passing the
/// personality threshold or sharing their type; warm users require both a
/// blended-similarity threshold and a type match.
pub fn build_neighborhood_hybrid(
    u: UserId,
    ds: &Dataset,
    view: &RatingsView,
    cfg: &PredictorConfig,
) -> Result<Neighborhood, RecommendError> {
    cfg.validate()?;
    check_consistency(ds, view)?;
    check_user(u, ds.n_users())?;
    let simp = simp_row(ds, u, cfg.hybrid.trait_model)?;
    let type_eq = type_row(ds, u);
    let simr = simr_row(u, view)?;
    let n_rated = view.rated_count(u);
    let cold = n_rated < cfg.hybrid.coldstart_view_count as usize;
    let inputs = SimInputs {
        simp: Some(&simp),
        type_eq: Some(&type_eq),
        simr: &simr,
        n_rated,
    };
    Ok(hybrid_with_inputs(u, cold, &inputs, cfg))
}

/// Dispatches on `cfg.model`.
pub fn build_neighborhood(
    u: UserId,
    ds: &Dataset,
    view: &RatingsView,
    cfg: &PredictorConfig,
) -> Result<Neighborhood, RecommendError> {
    match cfg.model {
        PersonalityModelKind::Hybrid => build_neighborhood_hybrid(u, ds, view, cfg),
        model => build_neighborhood_baseline(u, model, ds, view, cfg),
    }
}

/// Mean-centered neighborhood prediction.
///
/// `score = mean(u) + (sum of w * (r_vi - mean(v))) / (sum of |w|)` over the
/// neighbors that rated the item, accumulated in neighborhood order. With no
/// contributing neighbor (or all-zero weights) the score falls back to the
/// user's mean; users without history fall back to the global mean.
pub fn predict_score(
    u: UserId,
    item: ItemId,
    nbhd: &Neighborhood,
    view: &RatingsView,
) -> Result<f64, RecommendError> {
    check_user(u, view.n_users())?;
    if item.0 as usize >= view.n_items() {
        return Err(RecommendError::UnknownItem {
            index: item.0,
            n_items: view.n_items(),
        });
    }
    let base = view.mean_or_global(u);
    let mut num = 0.0;
    let mut den = 0.0;
    for &(v, weight) in nbhd.neighbors() {
        if let Some(r_vi) = view.rating(v, item) {
            let r_v = view.user_mean(v).expect("raters have a mean");
            num += weight * (r_vi - r_v);
            den += weight.abs();
        }
    }
    Ok(if den == 0.0 { base } else { base + num / den })
}

/// Scores every item absent from the user's history and returns the `n`
/// best, ordered by descending score with ties on ascending item id.
pub fn recommend_top_n(
    u: UserId,
    n: usize,
    ds: &Dataset,
    view: &RatingsView,
    cfg: &PredictorConfig,
) -> Result<Vec<(ItemId, f64)>, RecommendError> {
    cfg.validate()?;
    check_consistency(ds, view)?;
    check_user(u, ds.n_users())?;
    let nbhd = build_neighborhood(u, ds, view, cfg)?;
    let mut scored = Vec::new();
    for idx in 0..ds.n_items() {
        let item = ItemId(idx as u32);
        if view.rating(u, item).is_some() {
            continue;
        }
        scored.push((item, predict_score(u, item, &nbhd, view)?));
    }
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(n);
    Ok(scored)
}
