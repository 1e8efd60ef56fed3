//! Bounded instance store with metric-parameterized k-NN search.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::metric::{FeatureVector, MetricMatrix};
use crate::streams::AttrValue;

pub type ClassId = usize;

/// A labeled stream element.
#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub raw_attributes: Vec<AttrValue>,
    pub encoded: FeatureVector,
    pub label: ClassId,
    pub arrival_index: u64,
}

impl Instance {
    /// Builds an instance from an already encoded vector; `raw_attributes`
    /// mirror the encoding as numerics.
    pub fn from_encoded(encoded: Vec<f64>, label: ClassId, arrival_index: u64) -> Self {
        Instance {
            raw_attributes: encoded.iter().copied().map(AttrValue::Numeric).collect(),
            encoded: FeatureVector::new(encoded),
            label,
            arrival_index,
        }
    }
}

/// A k-NN search hit.
#[derive(Debug, Clone, Copy)]
pub struct Neighbor<'a> {
    pub instance: &'a Instance,
    pub distance: f64,
}

/// Instances in arrival order, bounded by `capacity` after every classifier step.
#[derive(Debug, Clone)]
pub struct InstanceBase {
    capacity: usize,
    store: VecDeque<Instance>,
}

impl InstanceBase {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "instance base capacity must be positive");
        InstanceBase {
            capacity,
            store: VecDeque::with_capacity(capacity + 1),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Instance> {
        self.store.iter()
    }

    pub fn clear(&mut self) {
        self.store.clear();
    }

    /// Appends `inst`. Arrival indices must be strictly increasing; eviction
    /// is a separate step.
    pub fn insert(&mut self, inst: Instance) -> Result<()> {
        if let Some(last) = self.store.back() {
            if inst.encoded.dim() != last.encoded.dim() {
                return Err(Error::Schema(format!(
                    "instance dimension {} does not match stored dimension {}",
                    inst.encoded.dim(),
                    last.encoded.dim()
                )));
            }
            if inst.arrival_index <= last.arrival_index {
                return Err(Error::Schema(format!(
                    "arrival index {} is not after {}",
                    inst.arrival_index, last.arrival_index
                )));
            }
        }
        self.store.push_back(inst);
        Ok(())
    }

    /// The `k` nearest stored instances under `metric`, ascending by
    /// distance; equal distances prefer the newer instance.
    pub fn knn(&self, query: &FeatureVector, k: usize, metric: &MetricMatrix) -> Result<Vec<Neighbor<'_>>> {
        if self.store.is_empty() {
            return Err(Error::NoNeighbors);
        }
        if query.dim() != metric.dim() {
            return Err(Error::DimensionMismatch {
                expected: metric.dim(),
                found: query.dim(),
            });
        }
        let mut scratch = Vec::with_capacity(query.dim());
        let mut hits: Vec<Neighbor<'_>> = self
            .store
            .iter()
            .map(|inst| {
                let q = metric.quad_form(query.as_slice(), inst.encoded.as_slice(), &mut scratch);
                Neighbor {
                    instance: inst,
                    distance: q.max(0.0).sqrt(),
                }
            })
            .collect();
        let order = |a: &Neighbor<'_>, b: &Neighbor<'_>| {
            a.distance
                .total_cmp(&b.distance)
                .then(b.instance.arrival_index.cmp(&a.instance.arrival_index))
        };
        let k = k.min(hits.len());
        if k == 0 {
            return Ok(Vec::new());
        }
        if k < hits.len() {
            hits.select_nth_unstable_by(k - 1, order);
            hits.truncate(k);
        }
        hits.sort_unstable_by(order);
        Ok(hits)
    }

    fn position(&self, arrival_index: u64) -> Option<usize> {
        self.store
            .binary_search_by_key(&arrival_index, |inst| inst.arrival_index)
            .ok()
    }

    pub fn get(&self, arrival_index: u64) -> Option<&Instance> {
        self.position(arrival_index).map(|i| &self.store[i])
    }

    pub fn last_arrival_index(&self) -> Option<u64> {
        self.store.back().map(|inst| inst.arrival_index)
    }

    /// Removes the instance with the given arrival index, if still stored.
    pub fn remove(&mut self, arrival_index: u64) -> Option<Instance> {
        self.position(arrival_index).and_then(|i| self.store.remove(i))
    }

    /// Drops every neighbor sharing the arriving instance's label. Only
    /// called after a correct prediction.
    pub fn edit_after_correct(&mut self, arriving_label: ClassId, neighbors: &[(u64, ClassId)]) -> usize {
        neighbors
            .iter()
            .filter(|(_, label)| *label == arriving_label)
            .filter(|(idx, _)| self.remove(*idx).is_some())
            .count()
    }

    /// Removes the oldest instances until the size is within capacity.
    pub fn evict_to_capacity(&mut self) -> usize {
        let mut evicted = 0;
        while self.store.len() > self.capacity {
            self.store.pop_front();
            evicted += 1;
        }
        evicted
    }
}
