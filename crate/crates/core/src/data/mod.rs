//! Dataset schema, validation, persistence and synthetic generation.

mod io;
mod ratings;
mod synth;

pub use io::{load_dataset, save_dataset};
pub use ratings::{RatingsTable, RatingsView, UserRow};
pub use synth::{
    derive_big5, derive_eysenck, derive_mbti, generate_synthetic, quantize6, SynthConfig,
};

use std::io as stdio;
use std::path::PathBuf;

use thiserror::Error;

use crate::personality::{MbtiParseError, PersonalityError};
use crate::recommender::{ProfileError, UserProfile};

/// Index of a user within a dataset's id-sorted user list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UserId(pub u32);

/// Index of an item within a dataset's id-sorted item list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ItemId(pub u32);

/// Errors from dataset construction, ingestion and persistence.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("cannot access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: stdio::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },
    #[error("duplicate user id {0:?}")]
    DuplicateUser(String),
    #[error("duplicate item id {0:?}")]
    DuplicateItem(String),
    #[error("duplicate event for user {user:?}, item {item:?}, timestamp {timestamp}")]
    DuplicateEvent {
        user: String,
        item: String,
        timestamp: i64,
    },
    #[error("event {record} references unknown user {user:?}")]
    UnknownUser { record: usize, user: String },
    #[error("event {record} references unknown item {item:?}")]
    UnknownItem { record: usize, item: String },
    #[error("event {record} has rating {value}, must lie in 1..=5")]
    RatingOutOfRange { record: usize, value: u8 },
    #[error("invalid id {0:?}: ids must be non-empty and free of ',', ';', '\"' and newlines")]
    InvalidId(String),
    #[error("item {item:?} has invalid label {label:?}")]
    InvalidLabel { item: String, label: String },
    #[error("item {0:?} has no labels")]
    NoLabels(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Personality(#[from] PersonalityError),
    #[error(transparent)]
    Mbti(#[from] MbtiParseError),
    #[error(transparent)]
    Profile(#[from] ProfileError),
}

/// A catalog entry with its topic labels.
///
/// Labels are kept sorted and deduplicated; [`Dataset::new`] canonicalizes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Item {
    pub id: String,
    pub labels: Vec<String>,
}

/// A raw view/rating record with textual ids, as read from files or built
/// by callers before dataset validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventRecord {
    pub user: String,
    pub item: String,
    pub timestamp: i64,
    pub rating: Option<u8>,
}

/// A validated view event with resolved dense ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ViewEvent {
    pub user: UserId,
    pub item: ItemId,
    pub timestamp: i64,
    pub rating: Option<u8>,
}

/// A validated, canonically-ordered collection of users, items and events.
///
/// Users and items are sorted by textual id and addressed by dense indices;
/// events are sorted by `(timestamp, user, item)` and are unique per
/// `(user, item, timestamp)`.
#[derive(Debug, Clone)]
pub struct Dataset {
    users: Vec<UserProfile>,
    items: Vec<Item>,
    events: Vec<ViewEvent>,
    per_user_events: Vec<Vec<usize>>,
}

impl PartialEq for Dataset {
    fn eq(&self, other: &Self) -> bool {
        self.users == other.users && self.items == other.items && self.events == other.events
    }
}

fn valid_token(s: &str) -> bool {
    !s.is_empty()
        && !s
            .chars()
            .any(|c| matches!(c, ',' | ';' | '"' | '\n' | '\r'))
}

impl Dataset {
    /// Validates and canonicalizes the parts into a dataset.
    ///
    /// Users and items may arrive in any order; event records are resolved
    /// against them and sorted chronologically.
    pub fn new(
        mut users: Vec<UserProfile>,
        mut items: Vec<Item>,
        records: Vec<EventRecord>,
    ) -> Result<Dataset, DataError> {
        for profile in &users {
            if !valid_token(profile.id()) {
                return Err(DataError::InvalidId(profile.id().to_string()));
            }
        }
        users.sort_by(|a, b| a.id().cmp(b.id()));
        for pair in users.windows(2) {
            if pair[0].id() == pair[1].id() {
                return Err(DataError::DuplicateUser(pair[0].id().to_string()));
            }
        }

        for item in &mut items {
            if !valid_token(&item.id) {
                return Err(DataError::InvalidId(item.id.clone()));
            }
            item.labels.sort();
            item.labels.dedup();
            if item.labels.is_empty() {
                return Err(DataError::NoLabels(item.id.clone()));
            }
            for label in &item.labels {
                if !valid_token(label) {
                    return Err(DataError::InvalidLabel {
                        item: item.id.clone(),
                        label: label.clone(),
                    });
                }
            }
        }
        items.sort_by(|a, b| a.id.cmp(&b.id));
        for pair in items.windows(2) {
            if pair[0].id == pair[1].id {
                return Err(DataError::DuplicateItem(pair[0].id.clone()));
            }
        }

        let mut events = Vec::with_capacity(records.len());
        for (record, rec) in records.iter().enumerate() {
            let user = users
                .binary_search_by(|p| p.id().cmp(rec.user.as_str()))
                .map_err(|_| DataError::UnknownUser {
                    record,
                    user: rec.user.clone(),
                })?;
            let item = items
                .binary_search_by(|i| i.id.as_str().cmp(rec.item.as_str()))
                .map_err(|_| DataError::UnknownItem {
                    record,
                    item: rec.item.clone(),
                })?;
            if let Some(value) = rec.rating {
                if !(1..=5).contains(&value) {
                    return Err(DataError::RatingOutOfRange { record, value });
                }
            }
            events.push(ViewEvent {
                user: UserId(user as u32),
                item: ItemId(item as u32),
                timestamp: rec.timestamp,
                rating: rec.rating,
            });
        }
        events.sort_by_key(|e| (e.timestamp, e.user, e.item));
        for pair in events.windows(2) {
            let (a, b) = (pair[0], pair[1]);
            if (a.timestamp, a.user, a.item) == (b.timestamp, b.user, b.item) {
                return Err(DataError::DuplicateEvent {
                    user: users[a.user.0 as usize].id().to_string(),
                    item: items[a.item.0 as usize].id.clone(),
                    timestamp: a.timestamp,
                });
            }
        }

        let mut per_user_events = vec![Vec::new(); users.len()];
        for (idx, event) in events.iter().enumerate() {
            per_user_events[event.user.0 as usize].push(idx);
        }

        Ok(Dataset {
            users,
            items,
            events,
            per_user_events,
        })
    }

    pub fn n_users(&self) -> usize {
        self.users.len()
    }

    pub fn n_items(&self) -> usize {
        self.items.len()
    }

    pub fn users(&self) -> &[UserProfile] {
        &self.users
    }

    pub fn items(&self) -> &[Item] {
        &self.items
    }

    pub fn events(&self) -> &[ViewEvent] {
        &self.events
    }

    pub fn user(&self, id: UserId) -> &UserProfile {
        &self.users[id.0 as usize]
    }

    pub fn item(&self, id: ItemId) -> &Item {
        &self.items[id.0 as usize]
    }

    /// Resolves a textual user id to its dense index.
    pub fn user_id(&self, id: &str) -> Option<UserId> {
        self.users
            .binary_search_by(|p| p.id().cmp(id))
            .ok()
            .map(|i| UserId(i as u32))
    }

    /// Resolves a textual item id to its dense index.
    pub fn item_id(&self, id: &str) -> Option<ItemId> {
        self.items
            .binary_search_by(|i| i.id.as_str().cmp(id))
            .ok()
            .map(|i| ItemId(i as u32))
    }

    /// Indices into [`Dataset::events`] of one user's events, chronological.
    pub fn user_events(&self, id: UserId) -> &[usize] {
        &self.per_user_events[id.0 as usize]
    }

    fn event_records(&self, event_indices: impl Iterator<Item = usize>) -> Vec<EventRecord> {
        event_indices
            .map(|idx| {
                let e = &self.events[idx];
                EventRecord {
                    user: self.user(e.user).id().to_string(),
                    item: self.item(e.item).id.clone(),
                    timestamp: e.timestamp,
                    rating: e.rating,
                }
            })
            .collect()
    }
}

/// Drops users who viewed fewer than `min_views` distinct items, along with
/// their events. Items are kept even when orphaned.
pub fn filter_min_views(ds: &Dataset, min_views: u32) -> Dataset {
    let keep: Vec<bool> = (0..ds.n_users())
        .map(|u| {
            let mut items: Vec<ItemId> = ds
                .user_events(UserId(u as u32))
                .iter()
                .map(|&idx| ds.events()[idx].item)
                .collect();
            items.sort();
            items.dedup();
            items.len() >= min_views as usize
        })
        .collect();
    let users: Vec<UserProfile> = ds
        .users()
        .iter()
        .enumerate()
        .filter(|(u, _)| keep[*u])
        .map(|(_, p)| p.clone())
        .collect();
    let records = ds.event_records(
        (0..ds.events().len()).filter(|&idx| keep[ds.events()[idx].user.0 as usize]),
    );
    Dataset::new(users, ds.items().to_vec(), records)
        .expect("filtering preserves dataset validity")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::personality::{MbtiType, PersonalityModelKind, TraitVector};

    pub(crate) fn profile(id: &str, seed: f64) -> UserProfile {
        let v = |n: usize| {
            (0..n)
                .map(|k| ((seed + k as f64 * 0.07) % 1.0).abs())
                .collect::<Vec<f64>>()
        };
        UserProfile::new(
            id.to_string(),
            TraitVector::new(PersonalityModelKind::Big5, v(5)).unwrap(),
            TraitVector::new(PersonalityModelKind::Eysenck, v(3)).unwrap(),
            TraitVector::new(PersonalityModelKind::Hexaco, v(6)).unwrap(),
            "INTJ".parse::<MbtiType>().unwrap(),
        )
        .unwrap()
    }

    fn item(id: &str, labels: &[&str]) -> Item {
        Item {
            id: id.to_string(),
            labels: labels.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn rec(user: &str, item: &str, ts: i64, rating: Option<u8>) -> EventRecord {
        EventRecord {
            user: user.to_string(),
            item: item.to_string(),
            timestamp: ts,
            rating,
        }
    }

    #[test]
    fn canonicalizes_order() {
        let ds = Dataset::new(
            vec![profile("u2", 0.3), profile("u1", 0.6)],
            vec![item("i2", &["b", "a", "a"]), item("i1", &["c"])],
            vec![
                rec("u2", "i1", 20, Some(4)),
                rec("u1", "i2", 10, None),
                rec("u1", "i1", 10, None),
            ],
        )
        .unwrap();
        let user_ids: Vec<&str> = ds.users().iter().map(|p| p.id()).collect();
        assert_eq!(user_ids, ["u1", "u2"]);
        let item_ids: Vec<&str> = ds.items().iter().map(|i| i.id.as_str()).collect();
        assert_eq!(item_ids, ["i1", "i2"]);
        assert_eq!(ds.items()[1].labels, ["a", "b"]);
        let order: Vec<(i64, u32, u32)> = ds
            .events()
            .iter()
            .map(|e| (e.timestamp, e.user.0, e.item.0))
            .collect();
        assert_eq!(order, [(10, 0, 0), (10, 0, 1), (20, 1, 0)]);
        assert_eq!(ds.user_events(UserId(0)), &[0, 1]);
        assert_eq!(ds.user_id("u2"), Some(UserId(1)));
        assert_eq!(ds.item_id("nope"), None);
    }

    #[test]
    fn rejects_duplicates_and_dangling_references() {
        let dup = Dataset::new(
            vec![profile("u1", 0.1), profile("u1", 0.2)],
            vec![item("i1", &["a"])],
            vec![],
        );
        assert!(matches!(dup, Err(DataError::DuplicateUser(id)) if id == "u1"));

        let dangling = Dataset::new(
            vec![profile("u1", 0.1)],
            vec![item("i1", &["a"])],
            vec![rec("u1", "i9", 5, None)],
        );
        assert!(
            matches!(dangling, Err(DataError::UnknownItem { record: 0, item }) if item == "i9")
        );

        let dup_event = Dataset::new(
            vec![profile("u1", 0.1)],
            vec![item("i1", &["a"])],
            vec![rec("u1", "i1", 5, None), rec("u1", "i1", 5, Some(3))],
        );
        assert!(matches!(dup_event, Err(DataError::DuplicateEvent { .. })));
    }

    #[test]
    fn rejects_bad_tokens_and_ratings() {
        let bad_id = Dataset::new(vec![profile("u,1", 0.1)], vec![item("i1", &["a"])], vec![]);
        assert!(matches!(bad_id, Err(DataError::InvalidId(_))));

        let bad_label = Dataset::new(
            vec![profile("u1", 0.1)],
            vec![item("i1", &["a;b"])],
            vec![],
        );
        assert!(matches!(bad_label, Err(DataError::InvalidLabel { .. })));

        let no_labels = Dataset::new(vec![profile("u1", 0.1)], vec![item("i1", &[])], vec![]);
        assert!(matches!(no_labels, Err(DataError::NoLabels(_))));

        let bad_rating = Dataset::new(
            vec![profile("u1", 0.1)],
            vec![item("i1", &["a"])],
            vec![rec("u1", "i1", 5, Some(6))],
        );
        assert!(matches!(
            bad_rating,
            Err(DataError::RatingOutOfRange { record: 0, value: 6 })
        ));
    }

    #[test]
    fn empty_dataset_is_valid() {
        let ds = Dataset::new(vec![], vec![], vec![]).unwrap();
        assert_eq!(ds.n_users(), 0);
        assert_eq!(ds.events().len(), 0);
    }

    #[test]
    fn filter_min_views_drops_sparse_users() {
        let ds = Dataset::new(
            vec![profile("u1", 0.1), profile("u2", 0.4)],
            vec![item("i1", &["a"]), item("i2", &["b"])],
            vec![
                rec("u1", "i1", 1, None),
                rec("u1", "i2", 2, None),
                rec("u1", "i1", 3, None),
                rec("u2", "i1", 4, None),
            ],
        )
        .unwrap();
        let filtered = filter_min_views(&ds, 2);
        assert_eq!(filtered.n_users(), 1);
        assert_eq!(filtered.users()[0].id(), "u1");
        assert_eq!(filtered.events().len(), 3);
        assert_eq!(filtered.n_items(), 2);

        let unchanged = filter_min_views(&ds, 1);
        assert_eq!(unchanged, ds);
    }
}
