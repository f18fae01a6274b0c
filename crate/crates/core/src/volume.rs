//! Voxel-grid data model: geometry, label semantics and region composition.
//!
//! All buffers are stored x-fastest (`index = x + nx * (y + ny * z)`), which is
//! the on-disk order of NIfTI so buffer indices and file offsets coincide.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Voxel counts per axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Dims {
    pub nx: usize,
    pub ny: usize,
    pub nz: usize,
}

impl Dims {
    pub fn new(nx: usize, ny: usize, nz: usize) -> Result<Self> {
        if nx == 0 || ny == 0 || nz == 0 {
            return Err(Error::InvalidDims([nx, ny, nz]));
        }
        Ok(Self { nx, ny, nz })
    }

    /// Cube of edge `n`. Panics if `n == 0`.
    pub fn cube(n: usize) -> Self {
        Self::new(n, n, n).expect("cube edge must be positive")
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny * self.nz
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_array(&self) -> [usize; 3] {
        [self.nx, self.ny, self.nz]
    }

    #[inline]
    pub fn index(&self, x: usize, y: usize, z: usize) -> usize {
        debug_assert!(x < self.nx && y < self.ny && z < self.nz);
        x + self.nx * (y + self.ny * z)
    }

    #[inline]
    pub fn coords(&self, index: usize) -> [usize; 3] {
        let x = index % self.nx;
        let rest = index / self.nx;
        [x, rest % self.ny, rest / self.ny]
    }

    #[inline]
    pub fn contains(&self, x: isize, y: isize, z: isize) -> bool {
        x >= 0
            && y >= 0
            && z >= 0
            && (x as usize) < self.nx
            && (y as usize) < self.ny
            && (z as usize) < self.nz
    }
}

/// Physical voxel edge lengths in millimeters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spacing {
    pub dx: f64,
    pub dy: f64,
    pub dz: f64,
}

impl Spacing {
    pub fn new(dx: f64, dy: f64, dz: f64) -> Result<Self> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !(ok(dx) && ok(dy) && ok(dz)) {
            return Err(Error::InvalidSpacing([dx, dy, dz]));
        }
        Ok(Self { dx, dy, dz })
    }

    pub fn isotropic(d: f64) -> Result<Self> {
        Self::new(d, d, d)
    }

    /// 1 mm isotropic.
    pub fn unit() -> Self {
        Self {
            dx: 1.0,
            dy: 1.0,
            dz: 1.0,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.dx, self.dy, self.dz]
    }
}

impl Default for Spacing {
    fn default() -> Self {
        Self::unit()
    }
}

/// Physical volume of one voxel in mm³.
pub fn voxel_volume_mm3(spacing: Spacing) -> f64 {
    spacing.dx * spacing.dy * spacing.dz
}

/// Length of the volume's physical diagonal, `sqrt((nx·dx)² + (ny·dy)² + (nz·dz)²)`.
pub fn physical_diagonal_mm(dims: Dims, spacing: Spacing) -> f64 {
    let ex = dims.nx as f64 * spacing.dx;
    let ey = dims.ny as f64 * spacing.dy;
    let ez = dims.nz as f64 * spacing.dz;
    (ex * ex + ey * ey + ez * ez).sqrt()
}

/// Inclusive voxel-index box.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundingBox {
    pub min: [usize; 3],
    pub max: [usize; 3],
}

impl BoundingBox {
    pub fn point(p: [usize; 3]) -> Self {
        Self { min: p, max: p }
    }

    pub fn include(&mut self, p: [usize; 3]) {
        for a in 0..3 {
            self.min[a] = self.min[a].min(p[a]);
            self.max[a] = self.max[a].max(p[a]);
        }
    }

    pub fn union(&self, other: &BoundingBox) -> BoundingBox {
        let mut out = *self;
        out.include(other.min);
        out.include(other.max);
        out
    }

    pub fn extent(&self) -> [usize; 3] {
        [
            self.max[0] - self.min[0] + 1,
            self.max[1] - self.min[1] + 1,
            self.max[2] - self.min[2] + 1,
        ]
    }
}

/// A dense voxel grid carrying its own geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct Volume<T> {
    dims: Dims,
    spacing: Spacing,
    data: Vec<T>,
}

/// Foreground/background voxel set.
pub type BinaryMask = Volume<bool>;

impl<T> Volume<T> {
    pub fn new(dims: Dims, spacing: Spacing, data: Vec<T>) -> Result<Self> {
        if data.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: dims.len(),
                actual: data.len(),
            });
        }
        Ok(Self {
            dims,
            spacing,
            data,
        })
    }

    pub fn filled(dims: Dims, spacing: Spacing, value: T) -> Self
    where
        T: Clone,
    {
        Self {
            dims,
            spacing,
            data: vec![value; dims.len()],
        }
    }

    pub fn from_fn(dims: Dims, spacing: Spacing, mut f: impl FnMut([usize; 3]) -> T) -> Self {
        let mut data = Vec::with_capacity(dims.len());
        for z in 0..dims.nz {
            for y in 0..dims.ny {
                for x in 0..dims.nx {
                    data.push(f([x, y, z]));
                }
            }
        }
        Self {
            dims,
            spacing,
            data,
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> &T {
        &self.data[self.dims.index(x, y, z)]
    }

    pub fn set(&mut self, x: usize, y: usize, z: usize, value: T) {
        let i = self.dims.index(x, y, z);
        self.data[i] = value;
    }

    pub fn same_geometry<U>(&self, other: &Volume<U>) -> bool {
        self.dims == other.dims && self.spacing == other.spacing
    }

    pub fn check_geometry<U>(&self, other: &Volume<U>) -> Result<()> {
        check_geometry(self.dims, self.spacing, other.dims, other.spacing)
    }

    pub fn map<U>(&self, f: impl FnMut(&T) -> U) -> Volume<U> {
        Volume {
            dims: self.dims,
            spacing: self.spacing,
            data: self.data.iter().map(f).collect(),
        }
    }
}

pub(crate) fn check_geometry(da: Dims, sa: Spacing, db: Dims, sb: Spacing) -> Result<()> {
    if da != db {
        return Err(Error::GeometryMismatch(format!(
            "dims {:?} vs {:?}",
            da.as_array(),
            db.as_array()
        )));
    }
    if sa != sb {
        return Err(Error::GeometryMismatch(format!(
            "spacing {:?} vs {:?}",
            sa.as_array(),
            sb.as_array()
        )));
    }
    Ok(())
}

impl BinaryMask {
    pub fn empty(dims: Dims, spacing: Spacing) -> Self {
        Self::filled(dims, spacing, false)
    }

    pub fn count(&self) -> usize {
        self.data.iter().filter(|&&v| v).count()
    }

    pub fn any(&self) -> bool {
        self.data.iter().any(|&v| v)
    }

    pub fn bounding_box(&self) -> Option<BoundingBox> {
        let mut bbox: Option<BoundingBox> = None;
        for (i, _) in self.data.iter().enumerate().filter(|(_, &v)| v) {
            let p = self.dims.coords(i);
            match bbox.as_mut() {
                Some(b) => b.include(p),
                None => bbox = Some(BoundingBox::point(p)),
            }
        }
        bbox
    }

    /// True when every foreground voxel of `self` is foreground in `other`.
    pub fn is_subset_of(&self, other: &BinaryMask) -> bool {
        self.data.iter().zip(&other.data).all(|(&a, &b)| !a || b)
    }
}

/// The four canonical tissue classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
#[repr(u8)]
pub enum LabelClass {
    Background = 0,
    /// Necrotic tumor core.
    Ncr = 1,
    /// Peritumoral edema.
    Ed = 2,
    /// Enhancing tumor.
    Et = 3,
}

impl LabelClass {
    pub const TUMOR: [LabelClass; 3] = [LabelClass::Ncr, LabelClass::Ed, LabelClass::Et];

    pub fn code(self) -> u8 {
        self as u8
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Self::Background),
            1 => Some(Self::Ncr),
            2 => Some(Self::Ed),
            3 => Some(Self::Et),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Background => "background",
            Self::Ncr => "NCR",
            Self::Ed => "ED",
            Self::Et => "ET",
        }
    }
}

/// Composite evaluation regions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RegionId {
    #[serde(rename = "WT")]
    Wt,
    #[serde(rename = "TC")]
    Tc,
    #[serde(rename = "ET")]
    Et,
}

impl RegionId {
    pub const ALL: [RegionId; 3] = [RegionId::Wt, RegionId::Tc, RegionId::Et];

    pub fn name(self) -> &'static str {
        match self {
            Self::Wt => "WT",
            Self::Tc => "TC",
            Self::Et => "ET",
        }
    }

    /// Position of this region's channel in a [`ProbVolume`].
    pub fn channel(self) -> usize {
        match self {
            Self::Wt => 0,
            Self::Tc => 1,
            Self::Et => 2,
        }
    }

    /// WT = NCR ∪ ED ∪ ET, TC = NCR ∪ ET, ET = ET.
    #[inline]
    pub fn contains_code(self, code: u8) -> bool {
        match self {
            Self::Wt => matches!(code, 1..=3),
            Self::Tc => code == 1 || code == 3,
            Self::Et => code == 3,
        }
    }
}

impl std::str::FromStr for RegionId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_uppercase().as_str() {
            "WT" => Ok(Self::Wt),
            "TC" => Ok(Self::Tc),
            "ET" => Ok(Self::Et),
            other => Err(Error::InvalidParameter(format!("unknown region {other:?}"))),
        }
    }
}

impl std::fmt::Display for RegionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Label map restricted to the canonical codes {0, 1, 2, 3}.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelVolume(Volume<u8>);

impl LabelVolume {
    pub fn new(dims: Dims, spacing: Spacing, codes: Vec<u8>) -> Result<Self> {
        Self::from_volume(Volume::new(dims, spacing, codes)?)
    }

    pub fn from_volume(volume: Volume<u8>) -> Result<Self> {
        if let Some(&bad) = volume.data.iter().find(|&&c| c > 3) {
            return Err(Error::NonCanonicalLabel(bad));
        }
        Ok(Self(volume))
    }

    pub fn background(dims: Dims, spacing: Spacing) -> Self {
        Self(Volume::filled(dims, spacing, 0))
    }

    pub fn from_fn(dims: Dims, spacing: Spacing, mut f: impl FnMut([usize; 3]) -> LabelClass) -> Self {
        Self(Volume::from_fn(dims, spacing, |p| f(p).code()))
    }

    pub fn dims(&self) -> Dims {
        self.0.dims
    }

    pub fn spacing(&self) -> Spacing {
        self.0.spacing
    }

    pub fn codes(&self) -> &[u8] {
        &self.0.data
    }

    pub fn as_volume(&self) -> &Volume<u8> {
        &self.0
    }

    pub fn into_volume(self) -> Volume<u8> {
        self.0
    }

    pub fn class_at(&self, x: usize, y: usize, z: usize) -> LabelClass {
        LabelClass::from_code(*self.0.get(x, y, z)).expect("canonical by construction")
    }

    pub fn set_class(&mut self, x: usize, y: usize, z: usize, class: LabelClass) {
        self.0.set(x, y, z, class.code());
    }

    pub(crate) fn codes_mut(&mut self) -> &mut [u8] {
        &mut self.0.data
    }

    /// Mask of voxels carrying exactly `class`.
    pub fn class_mask(&self, class: LabelClass) -> BinaryMask {
        let code = class.code();
        self.0.map(|&c| c == code)
    }

    pub fn count(&self, class: LabelClass) -> usize {
        let code = class.code();
        self.0.data.iter().filter(|&&c| c == code).count()
    }
}

/// Builds the binary mask of a composite region.
pub fn compose_region(labels: &LabelVolume, region: RegionId) -> BinaryMask {
    labels.0.map(|&c| region.contains_code(c))
}

/// Total code-to-code translation table applied at ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    table: [Option<u8>; 256],
}

impl LabelMap {
    pub fn empty() -> Self {
        Self { table: [None; 256] }
    }

    /// {0, 1, 2, 3} onto themselves.
    pub fn identity() -> Self {
        let mut map = Self::empty();
        for c in 0..=3 {
            map.insert(c, c);
        }
        map
    }

    /// Identity plus the legacy encoding of enhancing tumor as 4.
    pub fn legacy_brats() -> Self {
        let mut map = Self::identity();
        map.insert(4, LabelClass::Et.code());
        map
    }

    pub fn insert(&mut self, from: u8, to: u8) {
        self.table[from as usize] = Some(to);
    }

    pub fn get(&self, code: u8) -> Option<u8> {
        self.table[code as usize]
    }

    pub fn entries(&self) -> impl Iterator<Item = (u8, u8)> + '_ {
        self.table
            .iter()
            .enumerate()
            .filter_map(|(from, to)| to.map(|t| (from as u8, t)))
    }
}

impl Default for LabelMap {
    fn default() -> Self {
        Self::legacy_brats()
    }
}

impl std::str::FromStr for LabelMap {
    type Err = Error;

    /// Parses `"identity"`, `"legacy"`, or a comma list of `from=to` pairs
    /// that extend the identity map, e.g. `"4=3"`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "identity" | "none" => return Ok(Self::identity()),
            "legacy" | "brats" => return Ok(Self::legacy_brats()),
            _ => {}
        }
        let mut map = Self::identity();
        for pair in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let bad = || Error::InvalidParameter(format!("bad label map entry {pair:?}"));
            let (from, to) = pair.split_once('=').ok_or_else(bad)?;
            let from: u8 = from.trim().parse().map_err(|_| bad())?;
            let to: u8 = to.trim().parse().map_err(|_| bad())?;
            if to > 3 {
                return Err(bad());
            }
            map.insert(from, to);
        }
        Ok(map)
    }
}

impl std::fmt::Display for LabelMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.entries().map(|(a, b)| format!("{a}={b}")).collect();
        f.write_str(&parts.join(","))
    }
}

/// Translates arbitrary raw codes into a canonical [`LabelVolume`].
pub fn remap_labels(raw: &Volume<u8>, map: &LabelMap) -> Result<LabelVolume> {
    let mut out = Vec::with_capacity(raw.data.len());
    for &code in &raw.data {
        let mapped = map.get(code).ok_or(Error::UnmappedCode(code))?;
        if mapped > 3 {
            return Err(Error::NonCanonicalLabel(mapped));
        }
        out.push(mapped);
    }
    Ok(LabelVolume(Volume::new(raw.dims, raw.spacing, out)?))
}

/// Three region-probability channels (WT, TC, ET) over one grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbVolume {
    dims: Dims,
    spacing: Spacing,
    channels: [Vec<f32>; 3],
}

impl ProbVolume {
    /// Channels are given in (WT, TC, ET) order. Every value must be finite and within [0, 1].
    pub fn new(dims: Dims, spacing: Spacing, channels: [Vec<f32>; 3]) -> Result<Self> {
        for (c, ch) in channels.iter().enumerate() {
            if ch.len() != dims.len() {
                return Err(Error::LengthMismatch {
                    expected: dims.len(),
                    actual: ch.len(),
                });
            }
            if let Some((index, &value)) = ch
                .iter()
                .enumerate()
                .find(|(_, &v)| !(0.0..=1.0).contains(&v))
            {
                return Err(Error::ProbabilityOutOfRange {
                    channel: c,
                    index,
                    value: value as f64,
                });
            }
        }
        Ok(Self {
            dims,
            spacing,
            channels,
        })
    }

    pub fn zeros(dims: Dims, spacing: Spacing) -> Self {
        Self {
            dims,
            spacing,
            channels: std::array::from_fn(|_| vec![0.0; dims.len()]),
        }
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn channel(&self, region: RegionId) -> &[f32] {
        &self.channels[region.channel()]
    }

    pub fn channels(&self) -> &[Vec<f32>; 3] {
        &self.channels
    }

    pub fn into_channels(self) -> [Vec<f32>; 3] {
        self.channels
    }

    /// Probabilities (WT, TC, ET) at one voxel index.
    pub fn at(&self, index: usize) -> [f32; 3] {
        [
            self.channels[0][index],
            self.channels[1][index],
            self.channels[2][index],
        ]
    }

    pub fn check_geometry<U>(&self, other: &Volume<U>) -> Result<()> {
        check_geometry(self.dims, self.spacing, other.dims(), other.spacing())
    }

    pub fn check_geometry_prob(&self, other: &ProbVolume) -> Result<()> {
        check_geometry(self.dims, self.spacing, other.dims, other.spacing)
    }
}
