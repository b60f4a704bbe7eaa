//! Mergeable F0 (distinct-count) sketch: k-minimum-values with a median over
//! independent repetitions.
//!
//! Each repetition hashes elements into `[0, P)` with `P = 2^61 - 1` and keeps
//! the `t` smallest distinct hash values. Below capacity the sketch is exact;
//! at capacity the estimate is `(t - 1) · P / v_t`. Two sketches built from
//! the same seed and capacity merge into exactly the sketch of the union.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::hashing::PolyHash;
use crate::seed;
use crate::setstream::ElementId;

/// Field size for sketch hashes.
pub const SKETCH_PRIME: u64 = (1 << 61) - 1;
/// Independence degree of each repetition's hash.
pub const SKETCH_HASH_DEGREE: usize = 8;
/// `t = ⌈CAPACITY_CONSTANT / ε²⌉` values per repetition.
pub const CAPACITY_CONSTANT: f64 = 4.0;
pub const MAX_REPETITIONS: usize = 64;

const MAGIC: &[u8; 4] = b"F0SK";
const FORMAT_VERSION: u16 = 1;

/// Shared hash family for one `(capacity, repetitions, seed)` triple.
#[derive(Debug)]
pub struct SketchFamily {
    capacity: usize,
    seed: u64,
    hashes: Vec<PolyHash>,
}

impl SketchFamily {
    pub fn new(capacity: usize, repetitions: usize, seed: u64) -> Result<Arc<Self>> {
        if capacity < 2 {
            return Err(Error::InvalidParameter("sketch capacity must be at least 2".into()));
        }
        if repetitions == 0 || repetitions > MAX_REPETITIONS {
            return Err(Error::InvalidParameter(format!(
                "repetitions must be in 1..={MAX_REPETITIONS}, got {repetitions}"
            )));
        }
        let hashes = (0..repetitions)
            .map(|r| {
                PolyHash::over_prime(SKETCH_HASH_DEGREE, SKETCH_PRIME, seed::derive(seed, "f0-rep", r as u64))
            })
            .collect::<Result<_>>()?;
        Ok(Arc::new(SketchFamily { capacity, seed, hashes }))
    }

    /// Capacity `⌈c₀/ε²⌉` and `⌈ln(1/δ)⌉` repetitions (capped).
    pub fn for_accuracy(epsilon: f64, delta: f64, seed: u64) -> Result<Arc<Self>> {
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta {delta} outside (0, 1)")));
        }
        Self::for_log_inverse_delta(epsilon, -delta.ln(), seed)
    }

    /// As [`SketchFamily::for_accuracy`] with `ln(1/δ)` given directly, for
    /// failure probabilities too small to represent.
    pub fn for_log_inverse_delta(epsilon: f64, ln_inv_delta: f64, seed: u64) -> Result<Arc<Self>> {
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::InvalidParameter(format!("epsilon {epsilon} outside (0, 1)")));
        }
        let capacity = (CAPACITY_CONSTANT / (epsilon * epsilon)).ceil() as usize;
        let repetitions = (ln_inv_delta.ceil().max(1.0) as usize).min(MAX_REPETITIONS);
        Self::new(capacity, repetitions, seed)
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn repetitions(&self) -> usize {
        self.hashes.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn empty_sketch(self: &Arc<Self>) -> F0Sketch {
        F0Sketch { family: Arc::clone(self), mins: vec![Vec::new(); self.hashes.len()] }
    }

    pub fn sketch_of(self: &Arc<Self>, elements: impl IntoIterator<Item = ElementId>) -> F0Sketch {
        let mut sketch = self.empty_sketch();
        for e in elements {
            sketch.insert(e);
        }
        sketch
    }
}

#[derive(Clone, Debug)]
pub struct F0Sketch {
    family: Arc<SketchFamily>,
    /// Per repetition, ascending distinct hash values, at most `capacity` long.
    mins: Vec<Vec<u64>>,
}

impl PartialEq for F0Sketch {
    fn eq(&self, other: &Self) -> bool {
        self.compatible(other) && self.mins == other.mins
    }
}

impl F0Sketch {
    pub fn capacity(&self) -> usize {
        self.family.capacity
    }

    pub fn seed(&self) -> u64 {
        self.family.seed
    }

    pub fn min_values(&self) -> &[Vec<u64>] {
        &self.mins
    }

    /// Stored hash values across all repetitions.
    pub fn registers(&self) -> usize {
        self.mins.iter().map(Vec::len).sum()
    }

    pub fn compatible(&self, other: &F0Sketch) -> bool {
        self.family.seed == other.family.seed
            && self.family.capacity == other.family.capacity
            && self.mins.len() == other.mins.len()
    }

    pub fn insert(&mut self, e: ElementId) {
        let t = self.family.capacity;
        for (hash, mins) in self.family.hashes.iter().zip(self.mins.iter_mut()) {
            let h = hash.eval(e);
            if mins.len() == t && h >= mins[t - 1] {
                continue;
            }
            if let Err(pos) = mins.binary_search(&h) {
                mins.insert(pos, h);
                mins.truncate(t);
            }
        }
    }

    /// Folds `other` into `self`; the result is the sketch of the union.
    pub fn merge_from(&mut self, other: &F0Sketch) -> Result<()> {
        if !self.compatible(other) {
            return Err(Error::IncompatibleSketch(format!(
                "seed/capacity ({}, {}) vs ({}, {})",
                self.seed(),
                self.capacity(),
                other.seed(),
                other.capacity()
            )));
        }
        let t = self.family.capacity;
        for (mine, theirs) in self.mins.iter_mut().zip(&other.mins) {
            *mine = merge_sorted_distinct(mine, theirs, t);
        }
        Ok(())
    }

    pub fn estimate(&self) -> f64 {
        let t = self.family.capacity;
        let mut per_rep: Vec<f64> = self
            .mins
            .iter()
            .map(|mins| {
                if mins.len() < t {
                    mins.len() as f64
                } else {
                    (t - 1) as f64 * SKETCH_PRIME as f64 / mins[t - 1] as f64
                }
            })
            .collect();
        median(&mut per_rep)
    }

    /// Versioned little-endian encoding: magic, version, capacity,
    /// repetitions, seed, then length-prefixed value arrays.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(22 + self.registers() * 8 + self.mins.len() * 4);
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.family.capacity as u32).to_le_bytes());
        out.extend_from_slice(&(self.mins.len() as u32).to_le_bytes());
        out.extend_from_slice(&self.family.seed.to_le_bytes());
        for mins in &self.mins {
            out.extend_from_slice(&(mins.len() as u32).to_le_bytes());
            for v in mins {
                out.extend_from_slice(&v.to_le_bytes());
            }
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<F0Sketch> {
        let mut reader = ByteReader { bytes, offset: 0 };
        if reader.take(4)? != MAGIC {
            return Err(bad_encoding("bad magic"));
        }
        let version = u16::from_le_bytes(reader.take(2)?.try_into().unwrap());
        if version != FORMAT_VERSION {
            return Err(bad_encoding(&format!("unsupported version {version}")));
        }
        let capacity = reader.u32()? as usize;
        let repetitions = reader.u32()? as usize;
        let seed = u64::from_le_bytes(reader.take(8)?.try_into().unwrap());
        let family = SketchFamily::new(capacity, repetitions, seed)?;
        let mut mins = Vec::with_capacity(repetitions);
        for _ in 0..repetitions {
            let len = reader.u32()? as usize;
            if len > capacity {
                return Err(bad_encoding("repetition longer than capacity"));
            }
            let values = (0..len)
                .map(|_| Ok(u64::from_le_bytes(reader.take(8)?.try_into().unwrap())))
                .collect::<Result<Vec<u64>>>()?;
            if values.windows(2).any(|w| w[0] >= w[1]) || values.iter().any(|&v| v >= SKETCH_PRIME) {
                return Err(bad_encoding("values not strictly ascending field elements"));
            }
            mins.push(values);
        }
        if reader.offset != bytes.len() {
            return Err(bad_encoding("trailing bytes"));
        }
        Ok(F0Sketch { family, mins })
    }
}

/// Merges a non-empty list of compatible sketches.
pub fn merge_all<'a>(sketches: impl IntoIterator<Item = &'a F0Sketch>) -> Result<F0Sketch> {
    let mut iter = sketches.into_iter();
    let mut merged = iter
        .next()
        .ok_or_else(|| Error::InvalidParameter("cannot merge an empty list of sketches".into()))?
        .clone();
    for sketch in iter {
        merged.merge_from(sketch)?;
    }
    Ok(merged)
}

fn merge_sorted_distinct(a: &[u64], b: &[u64], limit: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(limit.min(a.len() + b.len()));
    let (mut i, mut j) = (0, 0);
    while out.len() < limit && (i < a.len() || j < b.len()) {
        let next = match (a.get(i), b.get(j)) {
            (Some(&x), Some(&y)) if x < y => {
                i += 1;
                x
            }
            (Some(&x), Some(&y)) if y < x => {
                j += 1;
                y
            }
            (Some(&x), Some(_)) => {
                i += 1;
                j += 1;
                x
            }
            (Some(&x), None) => {
                i += 1;
                x
            }
            (None, Some(&y)) => {
                j += 1;
                y
            }
            (None, None) => unreachable!(),
        };
        out.push(next);
    }
    out
}

fn median(values: &mut [f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.sort_by(|a, b| a.total_cmp(b));
    let mid = values.len() / 2;
    if values.len() % 2 == 1 {
        values[mid]
    } else {
        (values[mid - 1] + values[mid]) / 2.0
    }
}

fn bad_encoding(message: &str) -> Error {
    Error::Format { line: None, message: format!("sketch encoding: {message}") }
}

struct ByteReader<'a> {
    bytes: &'a [u8],
    offset: usize,
}

impl<'a> ByteReader<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.offset + n;
        let slice = self.bytes.get(self.offset..end).ok_or_else(|| bad_encoding("truncated"))?;
        self.offset = end;
        Ok(slice)
    }

    fn u32(&mut self) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4)?.try_into().unwrap()))
    }
}
