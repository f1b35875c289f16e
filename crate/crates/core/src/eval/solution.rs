use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::model::{Instance, Slot};

/// Ordered client visits of one vehicle slot. The depot start and end are
/// implicit.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Route {
    pub slot: Slot,
    pub stops: Vec<usize>,
}

impl Route {
    pub fn new(slot: Slot, stops: Vec<usize>) -> Self {
        Route { slot, stops }
    }
}

/// Fleet selection plus routes: a slot is active iff it owns a route.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Solution {
    pub routes: Vec<Route>,
    pub unserved: Vec<usize>,
}

/// Ordering key of a solution, `(type, index, stops)` per route in slot order.
pub type Encoding = Vec<(usize, usize, Vec<usize>)>;

impl Solution {
    /// Builds a solution and fills `unserved` with every client of
    /// `instance` that no route visits.
    pub fn from_routes(instance: &Instance, routes: Vec<Route>) -> Self {
        let mut seen = vec![false; instance.n_clients() + 1];
        for r in &routes {
            for &c in &r.stops {
                if let Some(s) = seen.get_mut(c) {
                    *s = true;
                }
            }
        }
        let unserved = (1..=instance.n_clients()).filter(|&j| !seen[j]).collect();
        Solution { routes, unserved }
    }

    pub fn empty(instance: &Instance) -> Self {
        Self::from_routes(instance, Vec::new())
    }

    pub fn served(&self) -> usize {
        self.routes.iter().map(|r| r.stops.len()).sum()
    }

    /// Active vehicle count per type index.
    pub fn fleet_counts(&self, n_types: usize) -> Vec<usize> {
        let mut counts = vec![0; n_types];
        for r in &self.routes {
            if let Some(c) = counts.get_mut(r.slot.vtype) {
                *c += 1;
            }
        }
        counts
    }

    /// Relabels slots so that, within each type, routes occupy indices
    /// `0..count` in lexicographic order of their stop lists, and sorts
    /// routes by slot. Slots of one type are interchangeable, so this is
    /// cost-neutral; it gives every solution a unique representative.
    pub fn canonical(&self) -> Solution {
        let mut by_type: BTreeMap<usize, Vec<Vec<usize>>> = BTreeMap::new();
        for r in &self.routes {
            by_type.entry(r.slot.vtype).or_default().push(r.stops.clone());
        }
        let mut routes = Vec::with_capacity(self.routes.len());
        for (tau, mut stops) in by_type {
            stops.sort();
            routes.extend(
                stops
                    .into_iter()
                    .enumerate()
                    .map(|(v, s)| Route::new(Slot::new(tau, v), s)),
            );
        }
        let mut unserved = self.unserved.clone();
        unserved.sort_unstable();
        Solution { routes, unserved }
    }

    pub fn encoding(&self) -> Encoding {
        let mut enc: Encoding = self
            .routes
            .iter()
            .map(|r| (r.slot.vtype, r.slot.index, r.stops.clone()))
            .collect();
        enc.sort();
        enc
    }

    /// Lexicographic comparison of encodings, used as the tie-break
    /// between equal-cost solutions.
    pub fn cmp_encoding(&self, other: &Solution) -> Ordering {
        self.encoding().cmp(&other.encoding())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_relabels_within_type() {
        let s = Solution {
            routes: vec![
                Route::new(Slot::new(2, 3), vec![4, 1]),
                Route::new(Slot::new(0, 0), vec![5]),
                Route::new(Slot::new(2, 0), vec![2, 3]),
            ],
            unserved: vec![],
        };
        let c = s.canonical();
        assert_eq!(
            c.encoding(),
            vec![(0, 0, vec![5]), (2, 0, vec![2, 3]), (2, 1, vec![4, 1])]
        );
        assert_eq!(c.canonical(), c);
        assert_eq!(s.fleet_counts(5), vec![1, 0, 2, 0, 0]);
    }
}
