//! Effective-rating rows derived from view events, with per-user truncation
//! for chronological holdout evaluation.

use std::collections::BTreeMap;

use super::{Dataset, ItemId, UserId};

/// Fallback mean when a view contains no ratings at all: the midpoint of
/// the 1..=5 rating scale.
const EMPTY_SCALE_MEAN: f64 = 3.0;

/// One user's effective ratings, sorted by item id.
///
/// Each viewed item contributes exactly one rating: the last explicit
/// rating if any event carries one, otherwise `min(5, view count)` so that
/// repeat views read as implicit endorsement.
#[derive(Debug, Clone, PartialEq)]
pub struct UserRow {
    entries: Vec<(ItemId, f64)>,
    sum: f64,
}

impl UserRow {
    fn from_event_indices(ds: &Dataset, indices: &[usize]) -> UserRow {
        let mut per_item: BTreeMap<ItemId, (u32, Option<u8>)> = BTreeMap::new();
        for &idx in indices {
            let event = &ds.events()[idx];
            let slot = per_item.entry(event.item).or_insert((0, None));
            slot.0 += 1;
            if event.rating.is_some() {
                slot.1 = event.rating;
            }
        }
        let mut sum = 0.0;
        let entries: Vec<(ItemId, f64)> = per_item
            .into_iter()
            .map(|(item, (count, explicit))| {
                let value = match explicit {
                    Some(r) => f64::from(r),
                    None => f64::from(count.min(5)),
                };
                sum += value;
                (item, value)
            })
            .collect();
        UserRow { entries, sum }
    }

    pub fn entries(&self) -> &[(ItemId, f64)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn rating(&self, item: ItemId) -> Option<f64> {
        self.entries
            .binary_search_by_key(&item, |&(i, _)| i)
            .ok()
            .map(|idx| self.entries[idx].1)
    }

    /// Mean effective rating, `None` for an empty row.
    pub fn mean(&self) -> Option<f64> {
        if self.entries.is_empty() {
            None
        } else {
            Some(self.sum / self.entries.len() as f64)
        }
    }

    fn sum(&self) -> f64 {
        self.sum
    }
}

/// Effective-rating rows for every user of a dataset.
#[derive(Debug, Clone, PartialEq)]
pub struct RatingsTable {
    rows: Vec<UserRow>,
    n_items: usize,
    total_sum: f64,
    total_count: usize,
}

impl RatingsTable {
    pub fn new(ds: &Dataset) -> RatingsTable {
        let rows: Vec<UserRow> = (0..ds.n_users())
            .map(|u| UserRow::from_event_indices(ds, ds.user_events(UserId(u as u32))))
            .collect();
        let total_sum = rows.iter().map(|r| r.sum()).sum();
        let total_count = rows.iter().map(|r| r.len()).sum();
        RatingsTable {
            rows,
            n_items: ds.n_items(),
            total_sum,
            total_count,
        }
    }

    pub fn n_users(&self) -> usize {
        self.rows.len()
    }
}

/// A read view over a [`RatingsTable`], optionally replacing one user's row
/// with a truncated history. The global mean is adjusted accordingly.
#[derive(Debug)]
pub struct RatingsView<'a> {
    base: &'a RatingsTable,
    patch: Option<(UserId, UserRow)>,
}

impl<'a> RatingsView<'a> {
    pub fn full(table: &'a RatingsTable) -> RatingsView<'a> {
        RatingsView {
            base: table,
            patch: None,
        }
    }

    /// A view where `user`'s history is only their first `first_events`
    /// events. `table` must have been built from `ds`.
    pub fn truncated(
        table: &'a RatingsTable,
        ds: &Dataset,
        user: UserId,
        first_events: usize,
    ) -> RatingsView<'a> {
        let events = ds.user_events(user);
        let kept = &events[..first_events.min(events.len())];
        RatingsView {
            base: table,
            patch: Some((user, UserRow::from_event_indices(ds, kept))),
        }
    }

    pub fn n_users(&self) -> usize {
        self.base.n_users()
    }

    pub fn n_items(&self) -> usize {
        self.base.n_items
    }

    pub fn row(&self, user: UserId) -> &UserRow {
        match &self.patch {
            Some((patched, row)) if *patched == user => row,
            _ => &self.base.rows[user.0 as usize],
        }
    }

    /// Number of distinct items the user has rated or viewed in this view.
    pub fn rated_count(&self, user: UserId) -> usize {
        self.row(user).len()
    }

    pub fn rating(&self, user: UserId, item: ItemId) -> Option<f64> {
        self.row(user).rating(item)
    }

    /// Mean effective rating of one user, `None` when they have none.
    pub fn user_mean(&self, user: UserId) -> Option<f64> {
        self.row(user).mean()
    }

    /// The user's mean, falling back to the global mean for empty histories.
    pub fn mean_or_global(&self, user: UserId) -> f64 {
        self.user_mean(user).unwrap_or_else(|| self.global_mean())
    }

    /// Mean over every effective rating in the view.
    pub fn global_mean(&self) -> f64 {
        let (sum, count) = match &self.patch {
            Some((patched, row)) => {
                let replaced = &self.base.rows[patched.0 as usize];
                (
                    self.base.total_sum - replaced.sum() + row.sum(),
                    self.base.total_count - replaced.len() + row.len(),
                )
            }
            None => (self.base.total_sum, self.base.total_count),
        };
        if count == 0 {
            EMPTY_SCALE_MEAN
        } else {
            sum / count as f64
        }
    }
}
