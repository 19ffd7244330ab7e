//! Rating similarity, personality similarity and the cold-start blend.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::data::{RatingsView, UserId};
use crate::personality::{PersonalityModelKind, TraitVector};

/// Errors from similarity computation and blend configuration.
#[derive(Debug, Error, PartialEq)]
pub enum SimilarityError {
    #[error("user index {index} out of range ({n_users} users)")]
    UnknownUser { index: u32, n_users: usize },
    #[error("cannot compare {left} and {right} trait vectors")]
    ModelMismatch {
        left: PersonalityModelKind,
        right: PersonalityModelKind,
    },
    #[error("alpha0 is {0}, must lie in [0, 1]")]
    InvalidAlpha0(f64),
    #[error("decay_count must be at least 1")]
    InvalidDecayCount,
}

/// How personality and rating similarity are merged into one weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Combiner {
    /// `alpha * simP + (1 - alpha) * simR`, alpha decaying with history.
    WeightedSum,
    /// `simP * simR`, independent of alpha.
    Product,
}

impl Combiner {
    pub fn as_str(self) -> &'static str {
        match self {
            Combiner::WeightedSum => "weighted-sum",
            Combiner::Product => "product",
        }
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Combiner {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "weighted-sum" | "weighted_sum" => Ok(Combiner::WeightedSum),
            "product" => Ok(Combiner::Product),
            other => Err(format!(
                "unknown combiner '{other}' (expected weighted-sum or product)"
            )),
        }
    }
}

/// Cold-start blending parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlendConfig {
    /// Personality weight for a user with no history.
    pub alpha0: f64,
    /// Rated-item count at which the personality weight reaches zero.
    pub decay_count: u32,
    pub combiner: Combiner,
}

impl BlendConfig {
    pub fn new(alpha0: f64, decay_count: u32, combiner: Combiner) -> Result<Self, SimilarityError> {
        let cfg = BlendConfig {
            alpha0,
            decay_count,
            combiner,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), SimilarityError> {
        if !self.alpha0.is_finite() || !(0.0..=1.0).contains(&self.alpha0) {
            return Err(SimilarityError::InvalidAlpha0(self.alpha0));
        }
        if self.decay_count == 0 {
            return Err(SimilarityError::InvalidDecayCount);
        }
        Ok(())
    }
}

impl Default for BlendConfig {
    fn default() -> Self {
        BlendConfig {
            alpha0: 1.0,
            decay_count: 20,
            combiner: Combiner::WeightedSum,
        }
    }
}

/// Personality weight for a user with `n_rated` rated items: linear decay
/// from `alpha0` at zero history to 0 at `decay_count` items and beyond.
pub fn alpha_for(n_rated: usize, cfg: &BlendConfig) -> f64 {
    let fraction = 1.0 - n_rated as f64 / f64::from(cfg.decay_count);
    cfg.alpha0 * fraction.max(0.0)
}

/// Pearson correlation of two aligned samples, accumulated in index order.
/// Zero variance on either side yields 0.
fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mut mean_x = 0.0;
    let mut mean_y = 0.0;
    for k in 0..xs.len() {
        mean_x += xs[k];
        mean_y += ys[k];
    }
    mean_x /= n;
    mean_y /= n;
    let mut num = 0.0;
    let mut var_x = 0.0;
    let mut var_y = 0.0;
    for k in 0..xs.len() {
        let dx = xs[k] - mean_x;
        let dy = ys[k] - mean_y;
        num += dx * dy;
        var_x += dx * dx;
        var_y += dy * dy;
    }
    if var_x == 0.0 || var_y == 0.0 {
        0.0
    } else {
        num / (var_x.sqrt() * var_y.sqrt())
    }
}

/// Pearson correlation of two users' effective ratings over their co-rated
/// items, with both means taken over that intersection. Returns `None` when
/// fewer than two items are co-rated.
pub fn sim_rating(
    ux: UserId,
    uy: UserId,
    ratings: &RatingsView,
) -> Result<Option<f64>, SimilarityError> {
    let n_users = ratings.n_users();
    for id in [ux, uy] {
        if id.0 as usize >= n_users {
            return Err(SimilarityError::UnknownUser {
                index: id.0,
                n_users,
            });
        }
    }
    let a = ratings.row(ux).entries();
    let b = ratings.row(uy).entries();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                xs.push(a[i].1);
                ys.push(b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    if xs.len() < 2 {
        Ok(None)
    } else {
        Ok(Some(pearson(&xs, &ys)))
    }
}

/// Pearson correlation across the trait dimensions of two same-model
/// vectors. A constant vector on either side yields 0.
pub fn sim_personality(px: &TraitVector, py: &TraitVector) -> Result<f64, SimilarityError> {
    if px.model() != py.model() {
        return Err(SimilarityError::ModelMismatch {
            left: px.model(),
            right: py.model(),
        });
    }
    Ok(pearson(px.scores(), py.scores()))
}

/// Merges personality and rating similarity into one neighbor weight.
/// A missing rating similarity (no co-rated items) counts as 0.
pub fn sim_combined(sim_p: f64, sim_r: Option<f64>, alpha: f64, combiner: Combiner) -> f64 {
    let sim_r = sim_r.unwrap_or(0.0);
    match combiner {
        Combiner::WeightedSum => alpha * sim_p + (1.0 - alpha) * sim_r,
        Combiner::Product => sim_p * sim_r,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{Dataset, EventRecord, Item, RatingsTable};
    use crate::personality::MbtiType;
    use crate::recommender::UserProfile;

    fn profile(id: &str) -> UserProfile {
        UserProfile::new(
            id.to_string(),
            TraitVector::new(PersonalityModelKind::Big5, vec![0.5; 5]).unwrap(),
            TraitVector::new(PersonalityModelKind::Eysenck, vec![0.5; 3]).unwrap(),
            TraitVector::new(PersonalityModelKind::Hexaco, vec![0.5; 6]).unwrap(),
            "INTJ".parse::<MbtiType>().unwrap(),
        )
        .unwrap()
    }

    fn rated_dataset(rows: &[(&str, &[(&str, u8)])]) -> Dataset {
        let mut items: Vec<String> = rows
            .iter()
            .flat_map(|(_, rs)| rs.iter().map(|(i, _)| i.to_string()))
            .collect();
        items.sort();
        items.dedup();
        let mut records = Vec::new();
        for (user, rs) in rows {
            for (k, (item, rating)) in rs.iter().enumerate() {
                records.push(EventRecord {
                    user: user.to_string(),
                    item: item.to_string(),
                    timestamp: k as i64,
                    rating: Some(*rating),
                });
            }
        }
        Dataset::new(
            rows.iter().map(|(u, _)| profile(u)).collect(),
            items
                .into_iter()
                .map(|id| Item {
                    id,
                    labels: vec!["a".to_string()],
                })
                .collect(),
            records,
        )
        .unwrap()
    }

    fn sim_of(rows: &[(&str, &[(&str, u8)])]) -> Option<f64> {
        let ds = rated_dataset(rows);
        let table = RatingsTable::new(&ds);
        let view = RatingsView::full(&table);
        sim_rating(
            ds.user_id(rows[0].0).unwrap(),
            ds.user_id(rows[1].0).unwrap(),
            &view,
        )
        .unwrap()
    }

    #[test]
    fn rating_similarity_endpoints() {
        let identical = sim_of(&[
            ("u1", &[("i1", 1), ("i2", 4), ("i3", 5)]),
            ("u2", &[("i1", 1), ("i2", 4), ("i3", 5)]),
        ]);
        assert!((identical.unwrap() - 1.0).abs() < 1e-12);

        let opposed = sim_of(&[
            ("u1", &[("i1", 1), ("i2", 5)]),
            ("u2", &[("i1", 5), ("i2", 1)]),
        ]);
        assert!((opposed.unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn rating_similarity_known_value() {
        // xs = [1,2,3], ys = [2,2,4]: r = sqrt(3)/2.
        let r = sim_of(&[
            ("u1", &[("i1", 1), ("i2", 2), ("i3", 3)]),
            ("u2", &[("i1", 2), ("i2", 2), ("i3", 4)]),
        ])
        .unwrap();
        assert!((r - 3.0_f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rating_similarity_degenerate_cases() {
        let no_overlap = sim_of(&[("u1", &[("i1", 3), ("i2", 4)]), ("u2", &[("i3", 2)])]);
        assert_eq!(no_overlap, None);

        let single = sim_of(&[
            ("u1", &[("i1", 3), ("i2", 4)]),
            ("u2", &[("i2", 2), ("i3", 5)]),
        ]);
        assert_eq!(single, None);

        let flat = sim_of(&[
            ("u1", &[("i1", 3), ("i2", 3)]),
            ("u2", &[("i1", 1), ("i2", 5)]),
        ]);
        assert_eq!(flat, Some(0.0));
    }

    #[test]
    fn rating_similarity_means_use_the_intersection_only() {
        // u1 also rated i9 with an extreme value; it must not shift the
        // intersection means, so the result stays sqrt(3)/2.
        let r = sim_of(&[
            ("u1", &[("i1", 1), ("i2", 2), ("i3", 3), ("i9", 5)]),
            ("u2", &[("i1", 2), ("i2", 2), ("i3", 4)]),
        ])
        .unwrap();
        assert!((r - 3.0_f64.sqrt() / 2.0).abs() < 1e-12);
    }

    #[test]
    fn rating_similarity_rejects_unknown_users() {
        let ds = rated_dataset(&[("u1", &[("i1", 3)]), ("u2", &[("i1", 3)])]);
        let table = RatingsTable::new(&ds);
        let view = RatingsView::full(&table);
        let err = sim_rating(UserId(0), UserId(7), &view).unwrap_err();
        assert_eq!(
            err,
            SimilarityError::UnknownUser {
                index: 7,
                n_users: 2
            }
        );
    }

    #[test]
    fn personality_similarity_endpoints() {
        let p = TraitVector::new(
            PersonalityModelKind::Big5,
            vec![0.8, 0.2, 0.5, 0.6, 0.1],
        )
        .unwrap();
        assert!((sim_personality(&p, &p).unwrap() - 1.0).abs() < 1e-12);

        // Reflecting every score through the vector mean flips the sign.
        let mean = p.scores().iter().sum::<f64>() / 5.0;
        let reflected = TraitVector::new(
            PersonalityModelKind::Big5,
            p.scores().iter().map(|s| 2.0 * mean - s).collect(),
        )
        .unwrap();
        let r = sim_personality(&p, &reflected).unwrap();
        assert!((r + 1.0).abs() < 1e-12);

        let flat = TraitVector::new(PersonalityModelKind::Big5, vec![0.4; 5]).unwrap();
        assert_eq!(sim_personality(&flat, &p), Ok(0.0));
    }

    #[test]
    fn personality_similarity_rejects_model_mismatch() {
        let big5 = TraitVector::new(PersonalityModelKind::Big5, vec![0.5; 5]).unwrap();
        let pen = TraitVector::new(PersonalityModelKind::Eysenck, vec![0.5; 3]).unwrap();
        assert_eq!(
            sim_personality(&big5, &pen),
            Err(SimilarityError::ModelMismatch {
                left: PersonalityModelKind::Big5,
                right: PersonalityModelKind::Eysenck,
            })
        );
    }

    #[test]
    fn alpha_schedule() {
        let cfg = BlendConfig::new(1.0, 20, Combiner::WeightedSum).unwrap();
        assert_eq!(alpha_for(0, &cfg), 1.0);
        assert_eq!(alpha_for(20, &cfg), 0.0);
        assert_eq!(alpha_for(500, &cfg), 0.0);

        let cfg = BlendConfig::new(0.8, 20, Combiner::WeightedSum).unwrap();
        assert!((alpha_for(10, &cfg) - 0.4).abs() < 1e-15);
    }

    #[test]
    fn blend_config_validation() {
        assert_eq!(
            BlendConfig::new(1.5, 20, Combiner::WeightedSum).unwrap_err(),
            SimilarityError::InvalidAlpha0(1.5)
        );
        assert_eq!(
            BlendConfig::new(0.5, 0, Combiner::WeightedSum).unwrap_err(),
            SimilarityError::InvalidDecayCount
        );
    }

    #[test]
    fn combined_similarity_modes() {
        assert_eq!(
            sim_combined(0.9, Some(0.3), 1.0, Combiner::WeightedSum),
            0.9
        );
        assert_eq!(
            sim_combined(0.9, Some(0.3), 0.0, Combiner::WeightedSum),
            0.3
        );
        let blended = sim_combined(0.8, Some(0.5), 0.5, Combiner::WeightedSum);
        assert!((blended - 0.65).abs() < 1e-15);
        assert_eq!(sim_combined(0.8, Some(0.5), 0.5, Combiner::Product), 0.4);
        // Missing rating similarity counts as zero in both modes.
        assert_eq!(sim_combined(0.8, None, 0.5, Combiner::WeightedSum), 0.4);
        assert_eq!(sim_combined(0.8, None, 0.5, Combiner::Product), 0.0);
    }

    #[test]
    fn combiner_parses() {
        assert_eq!("weighted-sum".parse(), Ok(Combiner::WeightedSum));
        assert_eq!("PRODUCT".parse(), Ok(Combiner::Product));
        assert!("mean".parse::<Combiner>().is_err());
    }
}
