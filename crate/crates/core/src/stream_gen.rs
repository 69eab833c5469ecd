//! Seedable power-law edge streams.
//!
//! Both endpoints of every edge are drawn independently from a Zipf law
//! over `[1, vertex_count]`, so the probability of vertex `k` is
//! proportional to `k^-alpha`. Batch `i` is generated from its own PRNG
//! stream seeded by mixing `(seed, i)`, which makes batches independent of
//! each other and of generation order.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};
use serde::Serialize;

use crate::assoc::Triple;
use crate::error::{Error, Result};

/// Fewest triples `degree_check` will fit.
pub const MIN_DEGREE_SAMPLES: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KeyFormat {
    #[default]
    Decimal,
    /// `a.b.c.d`, the four bytes of the 32-bit id, most significant first.
    DottedQuad,
}

impl FromStr for KeyFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "decimal" => Ok(KeyFormat::Decimal),
            "dotted-quad" => Ok(KeyFormat::DottedQuad),
            _ => Err(Error::InvalidConfig(format!(
                "unknown key format {s:?} (expected decimal or dotted-quad)"
            ))),
        }
    }
}

impl fmt::Display for KeyFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            KeyFormat::Decimal => "decimal",
            KeyFormat::DottedQuad => "dotted-quad",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StreamConfig {
    pub batch_size: usize,
    pub num_batches: usize,
    pub vertex_count: u64,
    pub alpha: f64,
    pub seed: u64,
    pub key_format: KeyFormat,
}

impl Default for StreamConfig {
    /// 1,000 batches of 100,000 edges over 2^24 vertices, alpha 1.2.
    fn default() -> Self {
        StreamConfig {
            batch_size: 100_000,
            num_batches: 1_000,
            vertex_count: 1 << 24,
            alpha: 1.2,
            seed: 0,
            key_format: KeyFormat::Decimal,
        }
    }
}

impl StreamConfig {
    /// Splits `total_entries` into batches of `batch_size`; the split must
    /// be exact.
    pub fn with_total(total_entries: u64, batch_size: usize) -> Result<Self> {
        if batch_size == 0 {
            return Err(Error::InvalidConfig("batch size must be positive".into()));
        }
        if total_entries == 0 {
            return Err(Error::InvalidConfig("entry count must be positive".into()));
        }
        if !total_entries.is_multiple_of(batch_size as u64) {
            return Err(Error::InvalidConfig(format!(
                "{total_entries} entries do not divide into batches of {batch_size}"
            )));
        }
        Ok(StreamConfig {
            batch_size,
            num_batches: (total_entries / batch_size as u64) as usize,
            ..Default::default()
        })
    }

    pub fn total_entries(&self) -> u64 {
        self.batch_size as u64 * self.num_batches as u64
    }

    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 || self.num_batches == 0 {
            return Err(Error::InvalidConfig(
                "batch size and batch count must be positive".into(),
            ));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "alpha must be positive and finite, got {}",
                self.alpha
            )));
        }
        if self.vertex_count < 2 {
            return Err(Error::InvalidConfig("vertex count must be at least 2".into()));
        }
        if self.key_format == KeyFormat::DottedQuad && self.vertex_count > u32::MAX as u64 {
            return Err(Error::InvalidConfig(format!(
                "vertex count {} exceeds the dotted-quad range",
                self.vertex_count
            )));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives a child seed from `(seed, index)`. Used for batch streams and
/// for per-worker seeds.
pub fn mix_seed(seed: u64, index: u64) -> u64 {
    splitmix64(seed ^ splitmix64(index))
}

pub fn format_key(vertex_id: u64, format: KeyFormat) -> Result<String> {
    match format {
        KeyFormat::Decimal => Ok(vertex_id.to_string()),
        KeyFormat::DottedQuad => {
            let id = u32::try_from(vertex_id).map_err(|_| Error::KeyFormatOverflow(vertex_id))?;
            let [a, b, c, d] = id.to_be_bytes();
            Ok(format!("{a}.{b}.{c}.{d}"))
        }
    }
}

/// Vertex-id sampler for one stream configuration.
pub struct VertexSampler {
    zipf: Zipf<f64>,
}

impl VertexSampler {
    pub fn new(cfg: &StreamConfig) -> Result<Self> {
        let zipf = Zipf::new(cfg.vertex_count as f64, cfg.alpha)
            .map_err(|e| Error::InvalidConfig(format!("zipf parameters: {e}")))?;
        Ok(VertexSampler { zipf })
    }

    pub fn sample<R: rand::Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        self.zipf.sample(rng) as u64
    }
}

/// Batch `batch_index` of the stream: `batch_size` triples, each of value 1.
pub fn gen_batch(cfg: &StreamConfig, batch_index: usize) -> Result<Vec<Triple>> {
    cfg.validate()?;
    if batch_index >= cfg.num_batches {
        return Err(Error::BatchOutOfRange {
            index: batch_index,
            num_batches: cfg.num_batches,
        });
    }
    let sampler = VertexSampler::new(cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(cfg.seed, batch_index as u64));
    (0..cfg.batch_size)
        .map(|_| {
            let src = sampler.sample(&mut rng);
            let dst = sampler.sample(&mut rng);
            Ok(Triple::new(
                format_key(src, cfg.key_format)?,
                format_key(dst, cfg.key_format)?,
                1,
            ))
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DegreeFit {
    /// Least-squares slope of ln(out-degree) against ln(rank).
    pub slope: f64,
    /// The slope a Zipf(alpha) source distribution would give, `-alpha`.
    pub expected_slope: f64,
    /// Number of ranks used in the fit.
    pub ranks: usize,
}

/// Fits the rank/out-degree curve of `triples` over its top three decades
/// (ranks 1..=1000, or fewer if there are fewer sources).
pub fn degree_check(triples: &[Triple], alpha: f64) -> Result<DegreeFit> {
    if triples.len() < MIN_DEGREE_SAMPLES {
        return Err(Error::TooFewSamples {
            got: triples.len(),
            need: MIN_DEGREE_SAMPLES,
        });
    }
    let mut degree: std::collections::HashMap<&str, u64> = std::collections::HashMap::new();
    for t in triples {
        *degree.entry(t.row.as_str()).or_insert(0) += 1;
    }
    let mut counts: Vec<u64> = degree.into_values().collect();
    if counts.len() < 10 {
        return Err(Error::Degenerate("fewer than 10 distinct sources"));
    }
    counts.sort_unstable_by(|a, b| b.cmp(a));
    counts.truncate(1000);

    let n = counts.len() as f64;
    let xs: Vec<f64> = (1..=counts.len()).map(|r| (r as f64).ln()).collect();
    let ys: Vec<f64> = counts.iter().map(|&c| (c as f64).ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    Ok(DegreeFit {
        slope: sxy / sxx,
        expected_slope: -alpha,
        ranks: counts.len(),
    })
}
