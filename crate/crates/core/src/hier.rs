//! Layered write buffering over associative arrays.
//!
//! Updates land in the smallest layer. When layer `i` holds more than
//! `cuts[i]` non-zero entries after a batch, it is added into layer `i + 1`
//! and cleared; that flush may in turn push layer `i + 1` over its own cut,
//! so cascades chain upward within one call. The last layer is unbounded.
//! Queries sum every layer.

use serde::Serialize;

use crate::assoc::{AssociativeArray, Triple};
use crate::error::{Error, Result};

/// Cut values used when none are given: 2^15, 2^19, 2^23.
pub const DEFAULT_CUTS: [usize; 3] = [1 << 15, 1 << 19, 1 << 23];

/// Non-zero thresholds for every layer but the last.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CutSchedule {
    cuts: Vec<usize>,
}

impl CutSchedule {
    pub fn new(cuts: Vec<usize>) -> Result<Self> {
        if let Some(i) = cuts.iter().position(|&c| c == 0) {
            return Err(Error::InvalidSchedule(format!("cut {i} is zero")));
        }
        if let Some(i) = cuts.windows(2).position(|w| w[0] >= w[1]) {
            return Err(Error::InvalidSchedule(format!(
                "cuts must be strictly increasing, but cut {} ({}) >= cut {} ({})",
                i,
                cuts[i],
                i + 1,
                cuts[i + 1]
            )));
        }
        Ok(CutSchedule { cuts })
    }

    /// A single unbounded layer.
    pub fn flat() -> Self {
        CutSchedule { cuts: Vec::new() }
    }

    pub fn cuts(&self) -> &[usize] {
        &self.cuts
    }

    pub fn num_layers(&self) -> usize {
        self.cuts.len() + 1
    }

    /// Parses a comma-separated list, e.g. `"32768,524288"`. An empty string
    /// gives the flat schedule.
    pub fn parse(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Ok(Self::flat());
        }
        let cuts = s
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<usize>()
                    .map_err(|e| Error::InvalidSchedule(format!("bad cut {c:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(cuts)
    }
}

impl Default for CutSchedule {
    fn default() -> Self {
        CutSchedule {
            cuts: DEFAULT_CUTS.to_vec(),
        }
    }
}

impl std::fmt::Display for CutSchedule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (i, c) in self.cuts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HierStats {
    pub layer_nnz: Vec<usize>,
    /// Times each layer was flushed into the next. Always 0 for the last.
    pub cascades: Vec<u64>,
    pub lifetime_updates: u64,
}

#[derive(Debug, Clone)]
pub struct HierarchicalArray {
    layers: Vec<AssociativeArray>,
    schedule: CutSchedule,
    cascades: Vec<u64>,
    lifetime_updates: u64,
}

impl HierarchicalArray {
    pub fn new(schedule: CutSchedule) -> Self {
        let n = schedule.num_layers();
        HierarchicalArray {
            layers: vec![AssociativeArray::new(); n],
            schedule,
            cascades: vec![0; n],
            lifetime_updates: 0,
        }
    }

    pub fn schedule(&self) -> &CutSchedule {
        &self.schedule
    }

    pub fn layers(&self) -> &[AssociativeArray] {
        &self.layers
    }

    pub fn lifetime_updates(&self) -> u64 {
        self.lifetime_updates
    }

    /// Folds `triples` (duplicates summed) into the first layer and cascades.
    ///
    /// The call is atomic: on a malformed key or an overflow no layer is
    /// changed.
    pub fn insert_batch(&mut self, triples: &[Triple]) -> Result<()> {
        if triples.is_empty() {
            return Ok(());
        }
        let batch = AssociativeArray::from_triples(triples)?;
        self.insert_array(batch)?;
        self.lifetime_updates += triples.len() as u64;
        Ok(())
    }

    /// Cascade step for an already-built block. Does not count toward
    /// `lifetime_updates`.
    fn insert_array(&mut self, batch: AssociativeArray) -> Result<()> {
        let cuts = self.schedule.cuts();
        let mut pending = merge_into(&self.layers[0], batch)?;
        let mut level = 0;
        // New contents are staged so an overflow leaves every layer intact.
        let mut flushed = 0;
        while level < cuts.len() && pending.nnz() > cuts[level] {
            pending = merge_into(&self.layers[level + 1], pending)?;
            flushed += 1;
            level += 1;
        }
        for i in 0..flushed {
            self.layers[i] = AssociativeArray::new();
            self.cascades[i] += 1;
        }
        self.layers[level] = pending;
        Ok(())
    }

    /// Sum of all layers. Leaves the hierarchy unchanged.
    pub fn materialize(&self) -> Result<AssociativeArray> {
        let mut acc = AssociativeArray::new();
        for layer in &self.layers {
            acc = merge_into(layer, acc)?;
        }
        Ok(acc)
    }

    /// Sums every layer into the last one and clears the rest.
    pub fn compact(&mut self) -> Result<()> {
        let total = self.materialize()?;
        let last = self.layers.len() - 1;
        for layer in &mut self.layers[..last] {
            *layer = AssociativeArray::new();
        }
        self.layers[last] = total;
        Ok(())
    }

    /// Neighbours of `row` across all layers, without materializing.
    pub fn query_neighbors(&self, row: &str) -> Result<AssociativeArray> {
        let mut acc = AssociativeArray::new();
        for layer in &self.layers {
            acc = acc.add(&layer.row_query(row))?;
        }
        Ok(acc)
    }

    pub fn stats(&self) -> HierStats {
        HierStats {
            layer_nnz: self.layers.iter().map(AssociativeArray::nnz).collect(),
            cascades: self.cascades.clone(),
            lifetime_updates: self.lifetime_updates,
        }
    }

    /// Adds an entry directly to the largest layer, bypassing the cascade
    /// and the update counter. Exists so tests can simulate a corrupted
    /// backend.
    #[doc(hidden)]
    pub fn inject_fault(&mut self, row: &str, col: &str) -> Result<()> {
        let stray = AssociativeArray::from_triples(&[Triple::new(row, col, 1)])?;
        let last = self.layers.len() - 1;
        self.layers[last] = self.layers[last].add(&stray)?;
        Ok(())
    }
}

// `layer + incoming`, moving `incoming` through when the layer is empty.
fn merge_into(layer: &AssociativeArray, incoming: AssociativeArray) -> Result<AssociativeArray> {
    if layer.is_empty() {
        Ok(incoming)
    } else {
        layer.add(&incoming)
    }
}
