//! Deterministic synthetic label and probability volumes.
//!
//! Randomness comes from a counter-based generator (SplitMix64 evaluated at an
//! explicit position), so every value depends only on the seed and its voxel
//! index. Output is identical across runs, platforms and traversal orders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{BinaryMask, Dims, LabelClass, LabelVolume, ProbVolume, RegionId, Spacing, Volume};

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;
/// Boundary tolerance for rasterization in normalized units.
const RASTER_EPS: f64 = 1e-9;

/// SplitMix64 output function.
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// The value a SplitMix64 stream seeded with `seed` produces at position `counter`.
pub fn hash_at(seed: u64, counter: u64) -> u64 {
    mix64(seed.wrapping_add(counter.wrapping_add(1).wrapping_mul(GOLDEN_GAMMA)))
}

/// Uniform in [0, 1) with 53 random bits.
pub fn unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Uniform in [0, 1) with 24 random bits.
pub fn unit_f32(bits: u64) -> f32 {
    (bits >> 40) as f32 * (1.0 / (1u32 << 24) as f32)
}

/// Sequential view over the counter-based stream.
#[derive(Debug, Clone)]
pub struct CounterRng {
    seed: u64,
    counter: u64,
}

impl CounterRng {
    pub fn new(seed: u64) -> Self {
        Self { seed, counter: 0 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let v = hash_at(self.seed, self.counter);
        self.counter += 1;
        v
    }

    pub fn next_f64(&mut self) -> f64 {
        unit_f64(self.next_u64())
    }

    /// Uniform in `lo..hi` (half-open).
    pub fn range_f64(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }

    /// Uniform integer in `0..n`.
    pub fn below(&mut self, n: u64) -> u64 {
        assert!(n > 0);
        ((self.next_u64() as u128 * n as u128) >> 64) as u64
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Shape {
    /// Ellipsoid with per-axis radii in mm.
    Ball { radii: [f64; 3] },
    /// Outer ellipsoid minus inner ellipsoid (radii in mm).
    Shell { outer: [f64; 3], inner: [f64; 3] },
    /// Axis-aligned box with half extents in mm.
    Box { half_extent: [f64; 3] },
}

impl Shape {
    fn extent_mm(&self) -> [f64; 3] {
        match self {
            Shape::Ball { radii } => *radii,
            Shape::Shell { outer, .. } => *outer,
            Shape::Box { half_extent } => *half_extent,
        }
    }

    /// `offset` is the physical displacement from the center in mm.
    fn contains(&self, offset: [f64; 3]) -> bool {
        let in_ellipsoid = |r: &[f64; 3]| {
            (0..3).map(|a| (offset[a] / r[a]).powi(2)).sum::<f64>() <= 1.0 + RASTER_EPS
        };
        match self {
            Shape::Ball { radii } => in_ellipsoid(radii),
            Shape::Shell { outer, inner } => in_ellipsoid(outer) && !in_ellipsoid(inner),
            Shape::Box { half_extent } => {
                (0..3).all(|a| offset[a].abs() <= half_extent[a] + RASTER_EPS)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub class: LabelClass,
    /// Center in voxel coordinates.
    pub center: [f64; 3],
    #[serde(flatten)]
    pub shape: Shape,
    /// Probability level for voxels written by this primitive; defaults to the spec level.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub level: Option<f32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FixtureSpec {
    pub dims: [usize; 3],
    pub spacing: [f64; 3],
    pub seed: u64,
    /// Region probability inside a region (and `1 - level` ceiling outside it).
    pub level: f32,
    /// Fraction of the `1 - level` band filled with seeded noise; 0 gives flat maps.
    pub noise: f32,
    pub primitives: Vec<Primitive>,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        Self {
            dims: [32, 32, 32],
            spacing: [1.0, 1.0, 1.0],
            seed: 0,
            level: 0.8,
            noise: 0.0,
            primitives: Vec::new(),
        }
    }
}

impl FixtureSpec {
    pub fn geometry(&self) -> Result<(Dims, Spacing)> {
        let [nx, ny, nz] = self.dims;
        let [dx, dy, dz] = self.spacing;
        Ok((Dims::new(nx, ny, nz)?, Spacing::new(dx, dy, dz)?))
    }
}

/// Voxel index range `[lo, hi]` covered by a primitive, or `None` when it leaves the grid.
fn primitive_span(p: &Primitive, dims: Dims, spacing: Spacing) -> Option<([usize; 3], [usize; 3])> {
    let ext = p.shape.extent_mm();
    let n = dims.as_array();
    let d = spacing.as_array();
    let mut lo = [0; 3];
    let mut hi = [0; 3];
    for a in 0..3 {
        let half = ext[a] / d[a];
        let (min, max) = (p.center[a] - half, p.center[a] + half);
        if !(min >= -RASTER_EPS && max <= (n[a] - 1) as f64 + RASTER_EPS) || !half.is_finite() {
            return None;
        }
        lo[a] = (min - RASTER_EPS).ceil().max(0.0) as usize;
        hi[a] = ((max + RASTER_EPS).floor() as usize).min(n[a] - 1);
    }
    Some((lo, hi))
}

/// Rasterizes the primitives (last one wins) and derives matching probabilities.
pub fn generate(spec: &FixtureSpec) -> Result<(LabelVolume, ProbVolume)> {
    let (dims, spacing) = spec.geometry()?;
    if !(0.0..=1.0).contains(&spec.level) || !(0.0..=1.0).contains(&spec.noise) {
        return Err(Error::InvalidParameter("fixture level and noise must lie in [0, 1]".into()));
    }
    let mut codes = vec![0u8; dims.len()];
    let mut levels = vec![spec.level; dims.len()];
    let d = spacing.as_array();

    for (index, prim) in spec.primitives.iter().enumerate() {
        let (lo, hi) = primitive_span(prim, dims, spacing).ok_or(Error::PrimitiveOutOfBounds { index })?;
        let level = prim.level.unwrap_or(spec.level);
        if !(0.0..=1.0).contains(&level) {
            return Err(Error::InvalidParameter(format!("primitive {index} level {level} outside [0, 1]")));
        }
        for z in lo[2]..=hi[2] {
            for y in lo[1]..=hi[1] {
                for x in lo[0]..=hi[0] {
                    let p = [x, y, z];
                    let offset: [f64; 3] = std::array::from_fn(|a| (p[a] as f64 - prim.center[a]) * d[a]);
                    if prim.shape.contains(offset) {
                        let i = dims.index(x, y, z);
                        codes[i] = prim.class.code();
                        levels[i] = level;
                    }
                }
            }
        }
    }

    let channels: [Vec<f32>; 3] = std::array::from_fn(|c| {
        let region = RegionId::ALL[c];
        codes
            .iter()
            .zip(&levels)
            .enumerate()
            .map(|(i, (&code, &level))| {
                let band = 1.0 - level;
                let jitter = if spec.noise > 0.0 {
                    unit_f32(hash_at(spec.seed, (i * 3 + c) as u64)) * spec.noise * band
                } else {
                    0.0
                };
                let p = if region.contains_code(code) { level + jitter } else { jitter };
                p.clamp(0.0, 1.0)
            })
            .collect()
    });

    Ok((
        LabelVolume::new(dims, spacing, codes)?,
        ProbVolume::new(dims, spacing, channels)?,
    ))
}

/// Independent Bernoulli(`density`) voxels.
pub fn random_mask(dims: Dims, spacing: Spacing, density: f64, seed: u64) -> BinaryMask {
    let data = (0..dims.len())
        .map(|i| unit_f64(hash_at(seed, i as u64)) < density)
        .collect();
    Volume::new(dims, spacing, data).expect("length matches")
}

/// Independent uniform probabilities in every channel.
pub fn random_probs(dims: Dims, spacing: Spacing, seed: u64) -> ProbVolume {
    let channels = std::array::from_fn(|c| {
        (0..dims.len())
            .map(|i| unit_f32(hash_at(seed, (i * 3 + c) as u64)))
            .collect()
    });
    ProbVolume::new(dims, spacing, channels).expect("unit range")
}

/// A random tumor-like layout: edema blobs, cores with enhancing shells, and
/// scattered small components of every class.
pub fn random_tumor_spec(dims: [usize; 3], seed: u64) -> FixtureSpec {
    let mut rng = CounterRng::new(seed);
    let n = dims.map(|v| v as f64);
    let min_edge = n.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut primitives = Vec::new();

    let center = |rng: &mut CounterRng, r: f64| -> [f64; 3] {
        std::array::from_fn(|a| {
            let lo = r.ceil();
            let hi = (n[a] - 1.0 - r).floor().max(lo);
            rng.range_f64(lo, hi).round().clamp(lo, hi)
        })
    };

    let lesions = 1 + rng.below(2) as usize;
    for _ in 0..lesions {
        let r_ed = (min_edge * rng.range_f64(0.12, 0.22)).max(2.0);
        let c = center(&mut rng, r_ed);
        primitives.push(Primitive {
            class: LabelClass::Ed,
            center: c,
            shape: Shape::Ball { radii: [r_ed; 3] },
            level: None,
        });
        let r_et = (r_ed * rng.range_f64(0.5, 0.7)).max(1.5);
        let inner = r_et * rng.range_f64(0.3, 0.6);
        primitives.push(Primitive {
            class: LabelClass::Et,
            center: c,
            shape: Shape::Shell {
                outer: [r_et; 3],
                inner: [inner; 3],
            },
            level: None,
        });
        if rng.next_f64() < 0.5 {
            primitives.push(Primitive {
                class: LabelClass::Ncr,
                center: c,
                shape: Shape::Ball { radii: [inner; 3] },
                level: None,
            });
        }
    }

    let specks = rng.below(4) as usize;
    for _ in 0..specks {
        let class = LabelClass::TUMOR[rng.below(3) as usize];
        let h = rng.range_f64(0.0, 1.5);
        primitives.push(Primitive {
            class,
            center: center(&mut rng, 2.0),
            shape: Shape::Box { half_extent: [h; 3] },
            level: Some(rng.range_f64(0.55, 0.95) as f32),
        });
    }

    FixtureSpec {
        dims,
        spacing: [1.0; 3],
        seed,
        level: 0.8,
        noise: 1.0,
        primitives,
    }
}
