//! Unit-intensity Poisson point process on the torus with seeded streams.
//!
//! Randomness is organised in streams. A stream is a ChaCha8 generator keyed
//! by a 64-bit master seed and positioned on a 64-bit ChaCha stream id. The
//! stream id packs the replication index into the high 56 bits and a purpose
//! tag (cloud, edges, planting, ...) into the low 8 bits, so replication `i`
//! of an experiment always sees the same bits regardless of scheduling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::torus::{torus_distance_raw, wrap_coord, ModelParams, TorusPoint};

/// Largest admissible expected point count; vertex ids are `u32`.
pub const MAX_MEAN_POINTS: f64 = (1u64 << 31) as f64;

/// Purpose tags for the low byte of a stream id.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Purpose {
    Root = 0,
    Cloud = 1,
    Edges = 2,
    Planting = 3,
    Integration = 4,
}

/// Identifier of an independent random stream.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        RngStream { seed, stream }
    }

    /// Root stream of replication `index` under `master_seed`.
    pub fn replication(master_seed: u64, index: u64) -> Self {
        assert!(index < (1 << 56), "replication index out of range");
        RngStream {
            seed: master_seed,
            stream: index << 8,
        }
    }

    /// Sibling stream of the same replication with a different purpose tag.
    pub fn purpose(self, purpose: Purpose) -> Self {
        RngStream {
            seed: self.seed,
            stream: (self.stream & !0xff) | purpose as u64,
        }
    }

    /// Independent child stream number `index`, seeded through SplitMix64.
    pub fn child(self, index: u64) -> Self {
        let mixed = splitmix64(splitmix64(self.seed ^ splitmix64(self.stream)) ^ index);
        RngStream {
            seed: mixed,
            stream: self.stream,
        }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

/// SplitMix64 finaliser.
pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Sampled points stored as a flat `len × d` coordinate array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    params: ModelParams,
    coords: Vec<f64>,
    seed_record: Option<RngStream>,
}

impl PointCloud {
    pub fn empty(params: ModelParams) -> Self {
        PointCloud {
            params,
            coords: Vec::new(),
            seed_record: None,
        }
    }

    /// Builds a cloud from explicit points (planted test configurations).
    pub fn from_points(params: ModelParams, points: &[TorusPoint]) -> Result<Self> {
        let mut cloud = PointCloud::empty(params);
        for p in points {
            cloud.push(p)?;
        }
        Ok(cloud)
    }

    pub fn push(&mut self, point: &TorusPoint) -> Result<u32> {
        if point.dim() != self.params.dim {
            return Err(Error::DimensionMismatch {
                expected: self.params.dim,
                got: point.dim(),
            });
        }
        let id = self.len();
        if id >= u32::MAX as usize {
            return Err(Error::TooManyPoints {
                mean: id as f64,
                limit: u32::MAX as u64,
            });
        }
        self.coords.extend_from_slice(point.coords());
        Ok(id as u32)
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn seed_record(&self) -> Option<RngStream> {
        self.seed_record
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.params.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        let d = self.params.dim;
        &self.coords[i * d..(i + 1) * d]
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.params.dim)
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        torus_distance_raw(self.point(i), self.point(j), self.params.side)
    }
}

fn fill_uniform(params: &ModelParams, count: usize, rng: &mut impl Rng) -> Vec<f64> {
    let side = params.side;
    (0..count * params.dim)
        .map(|_| wrap_coord(rng.random::<f64>() * side, side))
        .collect()
}

/// Poisson(`n^d`) many i.i.d. uniform points on `[0, n)^d`.
pub fn sample_poisson_cloud(params: &ModelParams, stream: RngStream) -> Result<PointCloud> {
    params.validate()?;
    let mean = params.volume();
    if !(mean <= MAX_MEAN_POINTS) {
        return Err(Error::TooManyPoints {
            mean,
            limit: MAX_MEAN_POINTS as u64,
        });
    }
    let mut rng = stream.rng();
    let count = Poisson::new(mean)
        .map_err(|e| Error::InvalidParams(format!("poisson mean {mean}: {e}")))?
        .sample(&mut rng) as usize;
    Ok(PointCloud {
        params: *params,
        coords: fill_uniform(params, count, &mut rng),
        seed_record: Some(stream),
    })
}

/// Exactly `count` i.i.d. uniform points (binomial point process).
pub fn sample_fixed_cloud(count: usize, params: &ModelParams, stream: RngStream) -> PointCloud {
    let mut rng = stream.rng();
    PointCloud {
        params: *params,
        coords: fill_uniform(params, count, &mut rng),
        seed_record: Some(stream),
    }
}
