//! Sparse string-keyed associative arrays.
//!
//! An array is stored in row-major compressed form: sorted unique row keys,
//! sorted unique column keys, and per row a run of (column index, value)
//! pairs with strictly ascending column indices. The form is canonical:
//! no stored value equals the additive identity and every key has at least
//! one stored entry, so structural equality is value equality.
//!
//! Arrays are values. No operation mutates its inputs.

pub mod semiring;

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use semiring::{BinaryOp, ValueSemiring};

pub type Value = i64;

/// Interned key. Cloning shares the string.
pub type Key = Arc<str>;

/// One update record.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub row: String,
    pub col: String,
    pub val: Value,
}

impl Triple {
    pub fn new(row: impl Into<String>, col: impl Into<String>, val: Value) -> Self {
        Triple {
            row: row.into(),
            col: col.into(),
            val,
        }
    }

    /// Checks the key invariants; `index` is reported back in the error.
    pub fn validate(&self, index: usize) -> Result<()> {
        check_key(&self.row).map_err(|reason| Error::MalformedKey { index, reason })?;
        check_key(&self.col).map_err(|reason| Error::MalformedKey { index, reason })
    }
}

pub(crate) fn check_key(key: &str) -> std::result::Result<(), &'static str> {
    if key.is_empty() {
        Err("empty key")
    } else if key.bytes().any(|b| b == b'\t') {
        Err("key contains TAB")
    } else if key.bytes().any(|b| b == b'\n' || b == b'\r') {
        Err("key contains a line break")
    } else {
        Ok(())
    }
}

#[derive(Clone, PartialEq, Eq)]
pub struct AssociativeArray {
    row_keys: Vec<Key>,
    col_keys: Vec<Key>,
    // len == row_keys.len() + 1
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<Value>,
}

impl Default for AssociativeArray {
    fn default() -> Self {
        Self::new()
    }
}

impl fmt::Debug for AssociativeArray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(self.iter().map(|(r, c, v)| ((r, c), v)))
            .finish()
    }
}

impl AssociativeArray {
    /// The empty array.
    pub fn new() -> Self {
        AssociativeArray {
            row_keys: Vec::new(),
            col_keys: Vec::new(),
            row_ptr: vec![0],
            col_idx: Vec::new(),
            vals: Vec::new(),
        }
    }

    /// Block construction with `+` as the collision function.
    pub fn from_triples(triples: &[Triple]) -> Result<Self> {
        Self::from_triples_with(triples, semiring::checked_plus)
    }

    /// Block construction: sorts the batch, folds repeated (row, col) pairs
    /// with `collision` and drops zero results. `collision` must be
    /// associative and commutative; the fold order is unspecified.
    pub fn from_triples_with(triples: &[Triple], collision: BinaryOp) -> Result<Self> {
        for (i, t) in triples.iter().enumerate() {
            t.validate(i)?;
        }
        if triples.is_empty() {
            return Ok(Self::new());
        }

        assert!(triples.len() <= u32::MAX as usize, "batch too large");

        let mut sorted: Vec<SortKey> = triples.iter().enumerate().map(SortKey::new).collect();
        sorted.sort_unstable_by(|a, b| a.cmp_pair(b, triples));

        // Fold runs of equal (row, col).
        let mut folded: Vec<SortKey> = Vec::with_capacity(sorted.len());
        for k in sorted {
            match folded.last_mut() {
                Some(last) if last.cmp_pair(&k, triples) == Ordering::Equal => {
                    last.val = collision(last.val, k.val).ok_or(Error::Overflow)?;
                }
                _ => folded.push(k),
            }
        }
        folded.retain(|k| k.val != 0);

        // Column ids in key order.
        let mut by_col: Vec<u32> = (0..folded.len() as u32).collect();
        by_col.sort_unstable_by(|&a, &b| folded[a as usize].cmp_col(&folded[b as usize], triples));
        let mut col_keys: Vec<Key> = Vec::new();
        let mut col_idx = vec![0usize; folded.len()];
        for (n, &p) in by_col.iter().enumerate() {
            let k = &folded[p as usize];
            let new_col = n == 0
                || folded[by_col[n - 1] as usize].cmp_col(k, triples) != Ordering::Equal;
            if new_col {
                col_keys.push(k.col_key(triples));
            }
            col_idx[p as usize] = col_keys.len() - 1;
        }

        let mut row_keys: Vec<Key> = Vec::new();
        let mut row_ptr = vec![0];
        for (p, k) in folded.iter().enumerate() {
            if p > 0 && folded[p - 1].cmp_row(k, triples) != Ordering::Equal {
                row_ptr.push(p);
            }
            if p == 0 || *row_ptr.last().unwrap() == p {
                row_keys.push(k.row_key(triples));
            }
        }
        if !folded.is_empty() {
            row_ptr.push(folded.len());
        }

        Ok(AssociativeArray {
            row_keys,
            col_keys,
            row_ptr,
            col_idx,
            vals: folded.iter().map(|k| k.val).collect(),
        })
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vals.is_empty()
    }

    pub fn nrows(&self) -> usize {
        self.row_keys.len()
    }

    pub fn ncols(&self) -> usize {
        self.col_keys.len()
    }

    pub fn row_keys(&self) -> &[Key] {
        &self.row_keys
    }

    pub fn col_keys(&self) -> &[Key] {
        &self.col_keys
    }

    pub fn get(&self, row: &str, col: &str) -> Option<Value> {
        let i = self.find_row(row)?;
        let j = find_key(&self.col_keys, col)?;
        let range = self.row_range(i);
        let pos = self.col_idx[range.clone()].binary_search(&j).ok()?;
        Some(self.vals[range.start + pos])
    }

    /// Entries in (row, col) order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str, Value)> + '_ {
        (0..self.nrows()).flat_map(move |i| {
            self.row_range(i).map(move |p| {
                (
                    &*self.row_keys[i],
                    &*self.col_keys[self.col_idx[p]],
                    self.vals[p],
                )
            })
        })
    }

    pub fn to_triples(&self) -> Vec<Triple> {
        self.iter().map(|(r, c, v)| Triple::new(r, c, v)).collect()
    }

    /// Element-wise sum under the numeric semiring.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.ewise_add(other, &ValueSemiring::PLUS_TIMES)
    }

    /// Element-wise union: `sr.plus` where both arrays hold an entry, copy
    /// where one does.
    pub fn ewise_add(&self, other: &Self, sr: &ValueSemiring) -> Result<Self> {
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        let rows = merge_keys(&self.row_keys, &other.row_keys);
        let cols = merge_keys(&self.col_keys, &other.col_keys);

        let nnz_hint = self.nnz() + other.nnz();
        let mut b = CsrBuilder::with_capacity(rows.keys, cols.keys, nnz_hint);
        for &(ia, ib) in &rows.sources {
            match (ia, ib) {
                (Some(ia), None) => {
                    for p in self.row_range(ia) {
                        b.push(cols.left_map[self.col_idx[p]], self.vals[p]);
                    }
                }
                (None, Some(ib)) => {
                    for p in other.row_range(ib) {
                        b.push(cols.right_map[other.col_idx[p]], other.vals[p]);
                    }
                }
                (Some(ia), Some(ib)) => {
                    let (ra, rb) = (self.row_range(ia), other.row_range(ib));
                    let (mut pa, mut pb) = (ra.start, rb.start);
                    while pa < ra.end && pb < rb.end {
                        let ja = cols.left_map[self.col_idx[pa]];
                        let jb = cols.right_map[other.col_idx[pb]];
                        match ja.cmp(&jb) {
                            Ordering::Less => {
                                b.push(ja, self.vals[pa]);
                                pa += 1;
                            }
                            Ordering::Greater => {
                                b.push(jb, other.vals[pb]);
                                pb += 1;
                            }
                            Ordering::Equal => {
                                let v = (sr.plus)(self.vals[pa], other.vals[pb])
                                    .ok_or(Error::Overflow)?;
                                if v != sr.zero {
                                    b.push(ja, v);
                                }
                                pa += 1;
                                pb += 1;
                            }
                        }
                    }
                    for p in pa..ra.end {
                        b.push(cols.left_map[self.col_idx[p]], self.vals[p]);
                    }
                    for p in pb..rb.end {
                        b.push(cols.right_map[other.col_idx[p]], other.vals[p]);
                    }
                }
                (None, None) => unreachable!("merged key comes from at least one side"),
            }
            b.end_row();
        }
        Ok(b.finish())
    }

    /// Element-wise product under the numeric semiring.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.elementwise_multiply(other, &ValueSemiring::PLUS_TIMES)
    }

    /// Element-wise intersection: entries present in both arrays, combined
    /// with `sr.times`.
    pub fn elementwise_multiply(&self, other: &Self, sr: &ValueSemiring) -> Result<Self> {
        if self.is_empty() || other.is_empty() {
            return Ok(Self::new());
        }
        let rows = merge_keys(&self.row_keys, &other.row_keys);
        // Column space of the result is self's columns; map other's into it.
        let cols = merge_keys(&self.col_keys, &other.col_keys);
        let other_to_self = invert_into_left(&cols, other.col_keys.len());

        let mut row_keys = Vec::new();
        let mut b = CsrBuilder::with_capacity(Vec::new(), self.col_keys.clone(), 0);
        for (k, &(ia, ib)) in rows.sources.iter().enumerate() {
            let (Some(ia), Some(ib)) = (ia, ib) else {
                continue;
            };
            let (ra, rb) = (self.row_range(ia), other.row_range(ib));
            let (mut pa, mut pb) = (ra.start, rb.start);
            while pa < ra.end && pb < rb.end {
                let ja = self.col_idx[pa];
                let jb = match other_to_self[other.col_idx[pb]] {
                    Some(j) => j,
                    None => {
                        pb += 1;
                        continue;
                    }
                };
                match ja.cmp(&jb) {
                    Ordering::Less => pa += 1,
                    Ordering::Greater => pb += 1,
                    Ordering::Equal => {
                        let v = (sr.times)(self.vals[pa], other.vals[pb]).ok_or(Error::Overflow)?;
                        if v != sr.zero {
                            b.push(ja, v);
                        }
                        pa += 1;
                        pb += 1;
                    }
                }
            }
            row_keys.push(rows.keys[k].clone());
            b.end_row();
        }
        b.row_keys = row_keys;
        Ok(b.finish())
    }

    /// Semiring matrix product. Column keys of `self` are matched to row
    /// keys of `other` by string equality.
    pub fn semiring_matmul(&self, other: &Self, sr: &ValueSemiring) -> Result<Self> {
        if self.is_empty() || other.is_empty() {
            return Ok(Self::new());
        }
        let inner = merge_keys(&self.col_keys, &other.row_keys);
        // self column index -> other row index
        let inner_map = invert_into_right(&inner, self.col_keys.len());

        let ncols = other.ncols();
        let mut acc: Vec<Option<Value>> = vec![None; ncols];
        let mut touched: Vec<usize> = Vec::new();
        let mut b = CsrBuilder::with_capacity(self.row_keys.clone(), other.col_keys.clone(), 0);
        for i in 0..self.nrows() {
            for p in self.row_range(i) {
                let Some(k) = inner_map[self.col_idx[p]] else {
                    continue;
                };
                let a = self.vals[p];
                for q in other.row_range(k) {
                    let j = other.col_idx[q];
                    let prod = (sr.times)(a, other.vals[q]).ok_or(Error::Overflow)?;
                    acc[j] = Some(match acc[j] {
                        None => {
                            touched.push(j);
                            prod
                        }
                        Some(s) => (sr.plus)(s, prod).ok_or(Error::Overflow)?,
                    });
                }
            }
            touched.sort_unstable();
            for &j in &touched {
                if let Some(v) = acc[j].take() {
                    if v != sr.zero {
                        b.push(j, v);
                    }
                }
            }
            touched.clear();
            b.end_row();
        }
        Ok(b.finish())
    }

    /// The single-row sub-array for `row`; its column keys are the row's
    /// neighbours. Empty if the row is absent.
    pub fn row_query(&self, row: &str) -> Self {
        let Some(i) = self.find_row(row) else {
            return Self::new();
        };
        let range = self.row_range(i);
        AssociativeArray {
            row_keys: vec![self.row_keys[i].clone()],
            col_keys: self.col_idx[range.clone()]
                .iter()
                .map(|&j| self.col_keys[j].clone())
                .collect(),
            row_ptr: vec![0, range.len()],
            col_idx: (0..range.len()).collect(),
            vals: self.vals[range].to_vec(),
        }
    }

    pub fn transpose(&self) -> Self {
        let mut counts = vec![0usize; self.ncols() + 1];
        for &j in &self.col_idx {
            counts[j + 1] += 1;
        }
        for j in 0..self.ncols() {
            counts[j + 1] += counts[j];
        }
        let row_ptr = counts.clone();
        let mut next = counts;
        let mut col_idx = vec![0usize; self.nnz()];
        let mut vals = vec![0; self.nnz()];
        for i in 0..self.nrows() {
            for p in self.row_range(i) {
                let j = self.col_idx[p];
                let dst = next[j];
                col_idx[dst] = i;
                vals[dst] = self.vals[p];
                next[j] += 1;
            }
        }
        AssociativeArray {
            row_keys: self.col_keys.clone(),
            col_keys: self.row_keys.clone(),
            row_ptr,
            col_idx,
            vals,
        }
    }

    fn row_range(&self, i: usize) -> std::ops::Range<usize> {
        self.row_ptr[i]..self.row_ptr[i + 1]
    }

    fn find_row(&self, row: &str) -> Option<usize> {
        find_key(&self.row_keys, row)
    }

    /// Checks the canonical-form invariants, taking 0 as the additive
    /// identity.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        let ascending = |keys: &[Key]| keys.windows(2).all(|w| w[0].as_bytes() < w[1].as_bytes());
        if !ascending(&self.row_keys) {
            return Err("row keys not strictly ascending".into());
        }
        if !ascending(&self.col_keys) {
            return Err("column keys not strictly ascending".into());
        }
        if self.row_ptr.len() != self.row_keys.len() + 1 || self.row_ptr[0] != 0 {
            return Err("row pointer length mismatch".into());
        }
        if *self.row_ptr.last().unwrap() != self.vals.len() || self.col_idx.len() != self.vals.len() {
            return Err("entry count mismatch".into());
        }
        let mut col_used = vec![false; self.ncols()];
        for i in 0..self.nrows() {
            let range = self.row_range(i);
            if range.is_empty() {
                return Err(format!("row {:?} has no entries", self.row_keys[i]));
            }
            let cols = &self.col_idx[range];
            if !cols.windows(2).all(|w| w[0] < w[1]) {
                return Err(format!("row {:?} columns not ascending", self.row_keys[i]));
            }
            for &j in cols {
                *col_used.get_mut(j).ok_or("column index out of bounds")? = true;
            }
        }
        if let Some(j) = col_used.iter().position(|u| !u) {
            return Err(format!("column {:?} has no entries", self.col_keys[j]));
        }
        if self.vals.contains(&0) {
            return Err("explicit zero stored".into());
        }
        Ok(())
    }
}

/// Compact record for block construction. Keys of up to eight bytes are
/// fully described by their prefix and length, so sorting, folding and key
/// extraction never revisit the triple; longer keys fall back to the full
/// string when prefixes tie.
struct SortKey {
    row_prefix: u64,
    col_prefix: u64,
    val: Value,
    row_len: u32,
    col_len: u32,
    index: u32,
}

impl SortKey {
    fn new((index, t): (usize, &Triple)) -> Self {
        SortKey {
            row_prefix: key_prefix(&t.row),
            col_prefix: key_prefix(&t.col),
            val: t.val,
            row_len: t.row.len().min(u32::MAX as usize) as u32,
            col_len: t.col.len().min(u32::MAX as usize) as u32,
            index: index as u32,
        }
    }

    fn triple<'a>(&self, triples: &'a [Triple]) -> &'a Triple {
        &triples[self.index as usize]
    }

    #[inline]
    fn cmp_row(&self, other: &Self, triples: &[Triple]) -> Ordering {
        self.row_prefix.cmp(&other.row_prefix).then_with(|| {
            if self.row_len <= 8 && other.row_len <= 8 {
                self.row_len.cmp(&other.row_len)
            } else {
                self.triple(triples).row.cmp(&other.triple(triples).row)
            }
        })
    }

    #[inline]
    fn cmp_col(&self, other: &Self, triples: &[Triple]) -> Ordering {
        self.col_prefix.cmp(&other.col_prefix).then_with(|| {
            if self.col_len <= 8 && other.col_len <= 8 {
                self.col_len.cmp(&other.col_len)
            } else {
                self.triple(triples).col.cmp(&other.triple(triples).col)
            }
        })
    }

    #[inline]
    fn cmp_pair(&self, other: &Self, triples: &[Triple]) -> Ordering {
        self.cmp_row(other, triples)
            .then_with(|| self.cmp_col(other, triples))
    }

    fn row_key(&self, triples: &[Triple]) -> Key {
        short_key(self.row_prefix, self.row_len).unwrap_or_else(|| Key::from(self.triple(triples).row.as_str()))
    }

    fn col_key(&self, triples: &[Triple]) -> Key {
        short_key(self.col_prefix, self.col_len).unwrap_or_else(|| Key::from(self.triple(triples).col.as_str()))
    }
}

fn short_key(prefix: u64, len: u32) -> Option<Key> {
    if len > 8 {
        return None;
    }
    let bytes = prefix.to_be_bytes();
    let s = std::str::from_utf8(&bytes[..len as usize]).expect("prefix of a valid key");
    Some(Key::from(s))
}

/// First eight bytes, big-endian, zero padded.
#[inline]
fn key_prefix(key: &str) -> u64 {
    let mut buf = [0u8; 8];
    let n = key.len().min(8);
    buf[..n].copy_from_slice(&key.as_bytes()[..n]);
    u64::from_be_bytes(buf)
}

fn find_key(keys: &[Key], key: &str) -> Option<usize> {
    keys.binary_search_by(|k| k.as_bytes().cmp(key.as_bytes())).ok()
}

struct MergedKeys {
    keys: Vec<Key>,
    /// For each merged key, its index in the left and right input.
    sources: Vec<(Option<usize>, Option<usize>)>,
    left_map: Vec<usize>,
    right_map: Vec<usize>,
}

fn merge_keys(left: &[Key], right: &[Key]) -> MergedKeys {
    let mut out = MergedKeys {
        keys: Vec::with_capacity(left.len().max(right.len())),
        sources: Vec::with_capacity(left.len().max(right.len())),
        left_map: Vec::with_capacity(left.len()),
        right_map: Vec::with_capacity(right.len()),
    };
    let (mut i, mut j) = (0, 0);
    while i < left.len() || j < right.len() {
        let ord = match (left.get(i), right.get(j)) {
            (Some(a), Some(b)) => {
                if Arc::ptr_eq(a, b) {
                    Ordering::Equal
                } else {
                    a.as_bytes().cmp(b.as_bytes())
                }
            }
            (Some(_), None) => Ordering::Less,
            (None, Some(_)) => Ordering::Greater,
            (None, None) => unreachable!(),
        };
        let k = out.keys.len();
        match ord {
            Ordering::Less => {
                out.keys.push(left[i].clone());
                out.sources.push((Some(i), None));
                out.left_map.push(k);
                i += 1;
            }
            Ordering::Greater => {
                out.keys.push(right[j].clone());
                out.sources.push((None, Some(j)));
                out.right_map.push(k);
                j += 1;
            }
            Ordering::Equal => {
                out.keys.push(left[i].clone());
                out.sources.push((Some(i), Some(j)));
                out.left_map.push(k);
                out.right_map.push(k);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// Right index -> left index where the key is shared.
fn invert_into_left(m: &MergedKeys, right_len: usize) -> Vec<Option<usize>> {
    let mut out = vec![None; right_len];
    for &(l, r) in &m.sources {
        if let (Some(l), Some(r)) = (l, r) {
            out[r] = Some(l);
        }
    }
    out
}

/// Left index -> right index where the key is shared.
fn invert_into_right(m: &MergedKeys, left_len: usize) -> Vec<Option<usize>> {
    let mut out = vec![None; left_len];
    for &(l, r) in &m.sources {
        if let (Some(l), Some(r)) = (l, r) {
            out[l] = Some(r);
        }
    }
    out
}

/// Accumulates rows in a possibly over-wide key space, then drops keys left
/// without entries.
struct CsrBuilder {
    row_keys: Vec<Key>,
    col_keys: Vec<Key>,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    vals: Vec<Value>,
}

impl CsrBuilder {
    fn with_capacity(row_keys: Vec<Key>, col_keys: Vec<Key>, nnz: usize) -> Self {
        let mut row_ptr = Vec::with_capacity(row_keys.len() + 1);
        row_ptr.push(0);
        CsrBuilder {
            row_keys,
            col_keys,
            row_ptr,
            col_idx: Vec::with_capacity(nnz),
            vals: Vec::with_capacity(nnz),
        }
    }

    #[inline]
    fn push(&mut self, j: usize, v: Value) {
        self.col_idx.push(j);
        self.vals.push(v);
    }

    #[inline]
    fn end_row(&mut self) {
        self.row_ptr.push(self.col_idx.len());
    }

    fn finish(mut self) -> AssociativeArray {
        debug_assert_eq!(self.row_ptr.len(), self.row_keys.len() + 1);

        if self.row_ptr.windows(2).any(|w| w[0] == w[1]) {
            let mut keys = Vec::with_capacity(self.row_keys.len());
            let mut ptr = vec![0];
            for (i, key) in self.row_keys.into_iter().enumerate() {
                if self.row_ptr[i + 1] > self.row_ptr[i] {
                    keys.push(key);
                    ptr.push(self.row_ptr[i + 1]);
                }
            }
            self.row_keys = keys;
            self.row_ptr = ptr;
        }

        let mut used = vec![false; self.col_keys.len()];
        for &j in &self.col_idx {
            used[j] = true;
        }
        if used.iter().any(|u| !u) {
            let mut remap = vec![usize::MAX; used.len()];
            let mut keys = Vec::new();
            for (j, key) in self.col_keys.into_iter().enumerate() {
                if used[j] {
                    remap[j] = keys.len();
                    keys.push(key);
                }
            }
            for j in &mut self.col_idx {
                *j = remap[*j];
            }
            self.col_keys = keys;
        }

        AssociativeArray {
            row_keys: self.row_keys,
            col_keys: self.col_keys,
            row_ptr: self.row_ptr,
            col_idx: self.col_idx,
            vals: self.vals,
        }
    }
}
