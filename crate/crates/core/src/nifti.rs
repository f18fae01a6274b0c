//! NIfTI-1 reader and writer.
//!
//! Supports single-file (`n+1`) and header/image pair (`ni1`) layouts, both byte
//! orders, transparent gzip, and the datatypes uint8, int16, int32, float32 and
//! float64. Extensions are skipped on read and never written.

use std::fs;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;

use crate::error::{Error, NiftiError, Result};
use crate::volume::{
    check_geometry, remap_labels, Dims, LabelMap, LabelVolume, ProbVolume, RegionId, Spacing,
    Volume,
};

pub const HEADER_SIZE: usize = 348;
/// Data offset used on write: header plus the 4-byte extension flag.
pub const WRITE_VOX_OFFSET: usize = 352;
const NIFTI2_HEADER_SIZE: i32 = 540;
pub const MAGIC_SINGLE: [u8; 4] = *b"n+1\0";
pub const MAGIC_PAIR: [u8; 4] = *b"ni1\0";

/// Slack allowed when validating stored probabilities before clamping to [0, 1].
pub const PROBABILITY_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Endianness {
    #[default]
    Little,
    Big,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DataType {
    U8,
    I16,
    I32,
    F32,
    F64,
}

impl DataType {
    pub fn code(self) -> i16 {
        match self {
            Self::U8 => 2,
            Self::I16 => 4,
            Self::I32 => 8,
            Self::F32 => 16,
            Self::F64 => 64,
        }
    }

    pub fn from_code(code: i16) -> std::result::Result<Self, NiftiError> {
        match code {
            2 => Ok(Self::U8),
            4 => Ok(Self::I16),
            8 => Ok(Self::I32),
            16 => Ok(Self::F32),
            64 => Ok(Self::F64),
            other => Err(NiftiError::UnsupportedDatatype(other)),
        }
    }

    pub fn size(self) -> usize {
        match self {
            Self::U8 => 1,
            Self::I16 => 2,
            Self::I32 | Self::F32 => 4,
            Self::F64 => 8,
        }
    }
}

/// The 348-byte NIfTI-1 header. Unused ANALYZE fields are not retained.
#[derive(Debug, Clone, PartialEq)]
pub struct NiftiHeader {
    pub endianness: Endianness,
    pub dim_info: u8,
    pub dim: [i16; 8],
    pub intent_p: [f32; 3],
    pub intent_code: i16,
    pub datatype: i16,
    pub bitpix: i16,
    pub slice_start: i16,
    pub pixdim: [f32; 8],
    pub vox_offset: f32,
    pub scl_slope: f32,
    pub scl_inter: f32,
    pub slice_end: i16,
    pub slice_code: u8,
    pub xyzt_units: u8,
    pub cal_max: f32,
    pub cal_min: f32,
    pub slice_duration: f32,
    pub toffset: f32,
    pub descrip: [u8; 80],
    pub aux_file: [u8; 24],
    pub qform_code: i16,
    pub sform_code: i16,
    pub quatern: [f32; 3],
    pub qoffset: [f32; 3],
    pub srow_x: [f32; 4],
    pub srow_y: [f32; 4],
    pub srow_z: [f32; 4],
    pub intent_name: [u8; 16],
    pub magic: [u8; 4],
}

struct Fields<'a> {
    buf: &'a [u8],
    big: bool,
}

impl Fields<'_> {
    fn bytes<const N: usize>(&self, off: usize) -> [u8; N] {
        let mut b: [u8; N] = self.buf[off..off + N].try_into().expect("in range");
        if self.big {
            b.reverse();
        }
        b
    }
    fn i16(&self, off: usize) -> i16 {
        i16::from_le_bytes(self.bytes(off))
    }
    fn i32(&self, off: usize) -> i32 {
        i32::from_le_bytes(self.bytes(off))
    }
    fn f32(&self, off: usize) -> f32 {
        f32::from_le_bytes(self.bytes(off))
    }
    fn raw<const N: usize>(&self, off: usize) -> [u8; N] {
        self.buf[off..off + N].try_into().expect("in range")
    }
}

struct FieldsMut<'a> {
    buf: &'a mut [u8],
    big: bool,
}

impl FieldsMut<'_> {
    fn put(&mut self, off: usize, le: &[u8]) {
        let dst = &mut self.buf[off..off + le.len()];
        dst.copy_from_slice(le);
        if self.big {
            dst.reverse();
        }
    }
    fn i16(&mut self, off: usize, v: i16) {
        self.put(off, &v.to_le_bytes());
    }
    fn i32(&mut self, off: usize, v: i32) {
        self.put(off, &v.to_le_bytes());
    }
    fn f32(&mut self, off: usize, v: f32) {
        self.put(off, &v.to_le_bytes());
    }
    fn raw(&mut self, off: usize, b: &[u8]) {
        self.buf[off..off + b.len()].copy_from_slice(b);
    }
}

impl NiftiHeader {
    /// Header for a new single-file volume with `n_volumes` frames along dim[4].
    pub fn new(dims: Dims, n_volumes: usize, spacing: Spacing, datatype: DataType) -> Self {
        let ndim = if n_volumes > 1 { 4 } else { 3 };
        let mut dim = [1i16; 8];
        dim[0] = ndim;
        dim[1] = dims.nx as i16;
        dim[2] = dims.ny as i16;
        dim[3] = dims.nz as i16;
        dim[4] = n_volumes.max(1) as i16;
        let mut pixdim = [1.0f32; 8];
        pixdim[1] = spacing.dx as f32;
        pixdim[2] = spacing.dy as f32;
        pixdim[3] = spacing.dz as f32;
        let mut descrip = [0u8; 80];
        descrip[..8].copy_from_slice(b"tumorseg");
        Self {
            endianness: Endianness::Little,
            dim_info: 0,
            dim,
            intent_p: [0.0; 3],
            intent_code: 0,
            datatype: datatype.code(),
            bitpix: (datatype.size() * 8) as i16,
            slice_start: 0,
            pixdim,
            vox_offset: WRITE_VOX_OFFSET as f32,
            scl_slope: 1.0,
            scl_inter: 0.0,
            slice_end: 0,
            slice_code: 0,
            // millimeters
            xyzt_units: 2,
            cal_max: 0.0,
            cal_min: 0.0,
            slice_duration: 0.0,
            toffset: 0.0,
            descrip,
            aux_file: [0; 24],
            qform_code: 1,
            sform_code: 1,
            quatern: [0.0; 3],
            qoffset: [0.0; 3],
            srow_x: [pixdim[1], 0.0, 0.0, 0.0],
            srow_y: [0.0, pixdim[2], 0.0, 0.0],
            srow_z: [0.0, 0.0, pixdim[3], 0.0],
            intent_name: [0; 16],
            magic: MAGIC_SINGLE,
        }
    }

    /// Parses the first 348 bytes of `buf`.
    pub fn parse(buf: &[u8]) -> std::result::Result<Self, NiftiError> {
        if buf.len() < HEADER_SIZE {
            return Err(NiftiError::TruncatedFile {
                expected: HEADER_SIZE,
                actual: buf.len(),
            });
        }
        let size_le = i32::from_le_bytes(buf[0..4].try_into().expect("4 bytes"));
        if size_le == NIFTI2_HEADER_SIZE || size_le.swap_bytes() == NIFTI2_HEADER_SIZE {
            return Err(NiftiError::UnsupportedVersion(NIFTI2_HEADER_SIZE));
        }
        let dim0 = i16::from_le_bytes([buf[40], buf[41]]);
        let big = if (1..=7).contains(&dim0) {
            false
        } else if (1..=7).contains(&dim0.swap_bytes()) {
            true
        } else {
            return Err(NiftiError::DimMismatch(format!("implausible dim[0] = {dim0}")));
        };
        let f = Fields { buf, big };
        let sizeof_hdr = f.i32(0);
        if sizeof_hdr != HEADER_SIZE as i32 {
            return Err(NiftiError::UnsupportedVersion(sizeof_hdr));
        }
        let magic: [u8; 4] = f.raw(344);
        if magic != MAGIC_SINGLE && magic != MAGIC_PAIR {
            return Err(NiftiError::BadMagic(magic));
        }
        let arr4 = |off: usize| [f.f32(off), f.f32(off + 4), f.f32(off + 8), f.f32(off + 12)];
        Ok(Self {
            endianness: if big { Endianness::Big } else { Endianness::Little },
            dim_info: buf[39],
            dim: std::array::from_fn(|i| f.i16(40 + 2 * i)),
            intent_p: [f.f32(56), f.f32(60), f.f32(64)],
            intent_code: f.i16(68),
            datatype: f.i16(70),
            bitpix: f.i16(72),
            slice_start: f.i16(74),
            pixdim: std::array::from_fn(|i| f.f32(76 + 4 * i)),
            vox_offset: f.f32(108),
            scl_slope: f.f32(112),
            scl_inter: f.f32(116),
            slice_end: f.i16(120),
            slice_code: buf[122],
            xyzt_units: buf[123],
            cal_max: f.f32(124),
            cal_min: f.f32(128),
            slice_duration: f.f32(132),
            toffset: f.f32(136),
            descrip: f.raw(148),
            aux_file: f.raw(228),
            qform_code: f.i16(252),
            sform_code: f.i16(254),
            quatern: [f.f32(256), f.f32(260), f.f32(264)],
            qoffset: [f.f32(268), f.f32(272), f.f32(276)],
            srow_x: arr4(280),
            srow_y: arr4(296),
            srow_z: arr4(312),
            intent_name: f.raw(328),
            magic,
        })
    }

    /// Serializes to exactly 348 bytes in `self.endianness`.
    pub fn to_bytes(&self) -> [u8; HEADER_SIZE] {
        let mut buf = [0u8; HEADER_SIZE];
        let mut f = FieldsMut {
            buf: &mut buf,
            big: self.endianness == Endianness::Big,
        };
        f.i32(0, HEADER_SIZE as i32);
        f.buf[38] = b'r';
        f.buf[39] = self.dim_info;
        for (i, &d) in self.dim.iter().enumerate() {
            f.i16(40 + 2 * i, d);
        }
        for (i, &p) in self.intent_p.iter().enumerate() {
            f.f32(56 + 4 * i, p);
        }
        f.i16(68, self.intent_code);
        f.i16(70, self.datatype);
        f.i16(72, self.bitpix);
        f.i16(74, self.slice_start);
        for (i, &p) in self.pixdim.iter().enumerate() {
            f.f32(76 + 4 * i, p);
        }
        f.f32(108, self.vox_offset);
        f.f32(112, self.scl_slope);
        f.f32(116, self.scl_inter);
        f.i16(120, self.slice_end);
        f.buf[122] = self.slice_code;
        f.buf[123] = self.xyzt_units;
        f.f32(124, self.cal_max);
        f.f32(128, self.cal_min);
        f.f32(132, self.slice_duration);
        f.f32(136, self.toffset);
        f.raw(148, &self.descrip);
        f.raw(228, &self.aux_file);
        f.i16(252, self.qform_code);
        f.i16(254, self.sform_code);
        for i in 0..3 {
            f.f32(256 + 4 * i, self.quatern[i]);
            f.f32(268 + 4 * i, self.qoffset[i]);
        }
        for i in 0..4 {
            f.f32(280 + 4 * i, self.srow_x[i]);
            f.f32(296 + 4 * i, self.srow_y[i]);
            f.f32(312 + 4 * i, self.srow_z[i]);
        }
        f.raw(328, &self.intent_name);
        f.raw(344, &self.magic);
        buf
    }

    /// `(slope, intercept)` when intensity scaling changes stored values.
    pub fn scaling(&self) -> Option<(f64, f64)> {
        let (s, i) = (self.scl_slope as f64, self.scl_inter as f64);
        if s == 0.0 || !s.is_finite() || !i.is_finite() || (s == 1.0 && i == 0.0) {
            None
        } else {
            Some((s, i))
        }
    }

    /// Spatial dims and number of frames along dim[4].
    pub fn shape(&self) -> std::result::Result<(Dims, usize), NiftiError> {
        let ndim = self.dim[0] as usize;
        if !(1..=7).contains(&ndim) {
            return Err(NiftiError::DimMismatch(format!("dim[0] = {ndim}")));
        }
        let mut extent = [1usize; 7];
        for i in 1..=ndim {
            let d = self.dim[i];
            if d < 1 {
                return Err(NiftiError::DimMismatch(format!("dim[{i}] = {d}")));
            }
            extent[i - 1] = d as usize;
        }
        if extent[4..].iter().any(|&d| d != 1) {
            return Err(NiftiError::DimMismatch(format!(
                "volumes beyond 4D are not supported (dim = {:?})",
                &self.dim[..=ndim]
            )));
        }
        let dims = Dims::new(extent[0], extent[1], extent[2])
            .map_err(|e| NiftiError::DimMismatch(e.to_string()))?;
        Ok((dims, extent[3]))
    }

    pub fn spacing(&self) -> Result<Spacing> {
        Spacing::new(
            (self.pixdim[1] as f64).abs(),
            (self.pixdim[2] as f64).abs(),
            (self.pixdim[3] as f64).abs(),
        )
    }
}

/// Decoded voxel buffer in the file's datatype.
#[derive(Debug, Clone, PartialEq)]
pub enum VoxelData {
    U8(Vec<u8>),
    I16(Vec<i16>),
    I32(Vec<i32>),
    F32(Vec<f32>),
    F64(Vec<f64>),
}

impl VoxelData {
    pub fn len(&self) -> usize {
        match self {
            Self::U8(v) => v.len(),
            Self::I16(v) => v.len(),
            Self::I32(v) => v.len(),
            Self::F32(v) => v.len(),
            Self::F64(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn datatype(&self) -> DataType {
        match self {
            Self::U8(_) => DataType::U8,
            Self::I16(_) => DataType::I16,
            Self::I32(_) => DataType::I32,
            Self::F32(_) => DataType::F32,
            Self::F64(_) => DataType::F64,
        }
    }

    fn decode(bytes: &[u8], datatype: DataType, count: usize, endianness: Endianness) -> Self {
        let big = endianness == Endianness::Big;
        macro_rules! decode_as {
            ($t:ty, $n:expr) => {
                bytes[..count * $n]
                    .chunks_exact($n)
                    .map(|c| {
                        let b: [u8; $n] = c.try_into().expect("chunk");
                        if big {
                            <$t>::from_be_bytes(b)
                        } else {
                            <$t>::from_le_bytes(b)
                        }
                    })
                    .collect()
            };
        }
        match datatype {
            DataType::U8 => Self::U8(bytes[..count].to_vec()),
            DataType::I16 => Self::I16(decode_as!(i16, 2)),
            DataType::I32 => Self::I32(decode_as!(i32, 4)),
            DataType::F32 => Self::F32(decode_as!(f32, 4)),
            DataType::F64 => Self::F64(decode_as!(f64, 8)),
        }
    }

    fn encode(&self, endianness: Endianness, out: &mut Vec<u8>) {
        let big = endianness == Endianness::Big;
        macro_rules! encode_all {
            ($v:expr) => {
                for x in $v {
                    if big {
                        out.extend_from_slice(&x.to_be_bytes());
                    } else {
                        out.extend_from_slice(&x.to_le_bytes());
                    }
                }
            };
        }
        match self {
            Self::U8(v) => out.extend_from_slice(v),
            Self::I16(v) => encode_all!(v),
            Self::I32(v) => encode_all!(v),
            Self::F32(v) => encode_all!(v),
            Self::F64(v) => encode_all!(v),
        }
    }

    fn to_f64(&self) -> Vec<f64> {
        match self {
            Self::U8(v) => v.iter().map(|&x| x as f64).collect(),
            Self::I16(v) => v.iter().map(|&x| x as f64).collect(),
            Self::I32(v) => v.iter().map(|&x| x as f64).collect(),
            Self::F32(v) => v.iter().map(|&x| x as f64).collect(),
            Self::F64(v) => v.clone(),
        }
    }
}

/// A decoded NIfTI file.
#[derive(Debug, Clone, PartialEq)]
pub struct NiftiVolume {
    pub header: NiftiHeader,
    pub dims: Dims,
    /// Frames along dim[4]; 1 for 3D files.
    pub n_volumes: usize,
    pub spacing: Spacing,
    /// Raw stored values, before intensity scaling.
    pub data: VoxelData,
}

impl NiftiVolume {
    /// Values with intensity scaling applied, in double precision.
    pub fn values_f64(&self) -> Vec<f64> {
        let mut v = self.data.to_f64();
        if let Some((slope, inter)) = self.header.scaling() {
            v.iter_mut().for_each(|x| *x = *x * slope + inter);
        }
        v
    }

    pub fn values_f32(&self) -> Vec<f32> {
        match (&self.data, self.header.scaling()) {
            (VoxelData::F32(v), None) => v.clone(),
            _ => self.values_f64().into_iter().map(|x| x as f32).collect(),
        }
    }

    /// Integral label codes in 0..=255.
    pub fn label_codes(&self) -> Result<Vec<u8>> {
        if let (VoxelData::U8(v), None) = (&self.data, self.header.scaling()) {
            return Ok(v.clone());
        }
        self.values_f64()
            .into_iter()
            .enumerate()
            .map(|(index, value)| {
                if value.fract() == 0.0 && (0.0..=255.0).contains(&value) {
                    Ok(value as u8)
                } else {
                    Err(NiftiError::NonIntegralLabel { index, value }.into())
                }
            })
            .collect()
    }

    /// Values of frame `t` (scaled, f32).
    pub fn frame_f32(&self, t: usize) -> Vec<f32> {
        let n = self.dims.len();
        let all = self.values_f32();
        all[t * n..(t + 1) * n].to_vec()
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| {
        NiftiError::Io {
            path: path.to_path_buf(),
            source,
        }
        .into()
    }
}

/// Reads a file, inflating it when it starts with the gzip signature.
fn read_maybe_gz(path: &Path) -> Result<Vec<u8>> {
    let raw = fs::read(path).map_err(io_err(path))?;
    if raw.len() >= 2 && raw[0] == 0x1f && raw[1] == 0x8b {
        let mut out = Vec::new();
        MultiGzDecoder::new(&raw[..])
            .read_to_end(&mut out)
            .map_err(io_err(path))?;
        Ok(out)
    } else {
        Ok(raw)
    }
}

fn image_path_for(header_path: &Path) -> PathBuf {
    let s = header_path.to_string_lossy();
    for (hdr, img) in [(".hdr.gz", ".img.gz"), (".HDR.GZ", ".IMG.GZ"), (".hdr", ".img"), (".HDR", ".IMG")] {
        if let Some(stem) = s.strip_suffix(hdr) {
            return PathBuf::from(format!("{stem}{img}"));
        }
    }
    header_path.with_extension("img")
}

/// Parses an in-memory single-file NIfTI image (already decompressed).
pub fn decode(bytes: &[u8]) -> Result<NiftiVolume> {
    let header = NiftiHeader::parse(bytes)?;
    if header.magic != MAGIC_SINGLE {
        return Err(NiftiError::BadMagic(header.magic).into());
    }
    let offset = header.vox_offset.max(HEADER_SIZE as f32) as usize;
    decode_body(header, bytes, offset)
}

fn decode_body(header: NiftiHeader, bytes: &[u8], offset: usize) -> Result<NiftiVolume> {
    let datatype = DataType::from_code(header.datatype)?;
    let (dims, n_volumes) = header.shape()?;
    let spacing = header.spacing()?;
    let count = dims.len() * n_volumes;
    let expected = offset + count * datatype.size();
    if bytes.len() < expected {
        return Err(NiftiError::TruncatedFile {
            expected,
            actual: bytes.len(),
        }
        .into());
    }
    let data = VoxelData::decode(&bytes[offset..], datatype, count, header.endianness);
    Ok(NiftiVolume {
        header,
        dims,
        n_volumes,
        spacing,
        data,
    })
}

/// Reads a `.nii`, `.nii.gz` or `.hdr`/`.img` pair.
pub fn read_volume(path: impl AsRef<Path>) -> Result<NiftiVolume> {
    let path = path.as_ref();
    let bytes = read_maybe_gz(path)?;
    let header = NiftiHeader::parse(&bytes)?;
    if header.magic == MAGIC_PAIR {
        let img_path = image_path_for(path);
        let img = read_maybe_gz(&img_path)?;
        let offset = header.vox_offset.max(0.0) as usize;
        return decode_body(header, &img, offset);
    }
    let offset = header.vox_offset.max(HEADER_SIZE as f32) as usize;
    decode_body(header, &bytes, offset)
}

/// Reads a 3D label map and maps its codes onto the canonical set.
pub fn read_label_volume(path: impl AsRef<Path>, map: &LabelMap) -> Result<LabelVolume> {
    let vol = read_volume(path)?;
    if vol.n_volumes != 1 {
        return Err(NiftiError::DimMismatch(format!(
            "label map must be 3D, found {} frames",
            vol.n_volumes
        ))
        .into());
    }
    let raw = Volume::new(vol.dims, vol.spacing, vol.label_codes()?)?;
    remap_labels(&raw, map)
}

/// Region stored in each file channel.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ChannelOrder(pub [RegionId; 3]);

impl Default for ChannelOrder {
    fn default() -> Self {
        Self([RegionId::Wt, RegionId::Tc, RegionId::Et])
    }
}

impl std::str::FromStr for ChannelOrder {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let parts = s
            .split(',')
            .map(|p| p.parse::<RegionId>())
            .collect::<Result<Vec<_>>>()?;
        let order: [RegionId; 3] = parts
            .try_into()
            .map_err(|_| Error::InvalidParameter(format!("channel order needs three regions: {s:?}")))?;
        for r in RegionId::ALL {
            if !order.contains(&r) {
                return Err(Error::InvalidParameter(format!("channel order {s:?} lacks {r}")));
            }
        }
        Ok(Self(order))
    }
}

impl std::fmt::Display for ChannelOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{}", self.0[0], self.0[1], self.0[2])
    }
}

/// Where region probabilities are stored.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbSource {
    /// One 4D file with dim[4] = 3.
    FourD(PathBuf),
    /// Three 3D files, one per channel in file order.
    Channels([PathBuf; 3]),
}

fn checked_probabilities(values: Vec<f32>, channel: usize) -> Result<Vec<f32>> {
    let lo = -PROBABILITY_SLACK;
    let hi = 1.0 + PROBABILITY_SLACK;
    if let Some((index, &v)) = values
        .iter()
        .enumerate()
        .find(|(_, &v)| !((v as f64) >= lo && (v as f64) <= hi))
    {
        return Err(Error::ProbabilityOutOfRange {
            channel,
            index,
            value: v as f64,
        });
    }
    Ok(values.into_iter().map(|v| v.clamp(0.0, 1.0)).collect())
}

pub fn read_prob_volume(source: &ProbSource, order: ChannelOrder) -> Result<ProbVolume> {
    let (dims, spacing, stored): (Dims, Spacing, Vec<Vec<f32>>) = match source {
        ProbSource::FourD(path) => {
            let vol = read_volume(path)?;
            if vol.n_volumes != 3 {
                return Err(NiftiError::ChannelCountMismatch(vol.n_volumes).into());
            }
            let frames = (0..3).map(|t| vol.frame_f32(t)).collect();
            (vol.dims, vol.spacing, frames)
        }
        ProbSource::Channels(paths) => {
            let vols = paths.iter().map(read_volume).collect::<Result<Vec<_>>>()?;
            for v in &vols {
                if v.n_volumes != 1 {
                    return Err(NiftiError::ChannelCountMismatch(v.n_volumes).into());
                }
                check_geometry(vols[0].dims, vols[0].spacing, v.dims, v.spacing)?;
            }
            let frames = vols.iter().map(NiftiVolume::values_f32).collect();
            (vols[0].dims, vols[0].spacing, frames)
        }
    };
    let mut channels: [Vec<f32>; 3] = Default::default();
    for (k, values) in stored.into_iter().enumerate() {
        channels[order.0[k].channel()] = checked_probabilities(values, k)?;
    }
    ProbVolume::new(dims, spacing, channels)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct WriteOptions {
    pub endianness: Endianness,
    /// `None` compresses when the path ends in `.gz`.
    pub gzip: Option<bool>,
}

/// Bytes of a single-file image: header, zero extension flag, voxel data.
pub fn encode(header: &NiftiHeader, data: &VoxelData) -> Vec<u8> {
    let mut out = Vec::with_capacity(WRITE_VOX_OFFSET + data.len() * data.datatype().size());
    let mut h = header.clone();
    h.vox_offset = WRITE_VOX_OFFSET as f32;
    h.magic = MAGIC_SINGLE;
    h.datatype = data.datatype().code();
    h.bitpix = (data.datatype().size() * 8) as i16;
    out.extend_from_slice(&h.to_bytes());
    out.extend_from_slice(&[0u8; WRITE_VOX_OFFSET - HEADER_SIZE]);
    data.encode(h.endianness, &mut out);
    out
}

pub fn write_volume(path: impl AsRef<Path>, header: &NiftiHeader, data: &VoxelData, opts: WriteOptions) -> Result<()> {
    let path = path.as_ref();
    let mut h = header.clone();
    h.endianness = opts.endianness;
    let bytes = encode(&h, data);
    let gzip = opts
        .gzip
        .unwrap_or_else(|| path.to_string_lossy().to_ascii_lowercase().ends_with(".gz"));
    let file = fs::File::create(path).map_err(io_err(path))?;
    let mut writer = std::io::BufWriter::new(file);
    if gzip {
        let mut enc = GzEncoder::new(writer, Compression::fast());
        enc.write_all(&bytes).map_err(io_err(path))?;
        enc.finish()
            .and_then(|mut w| w.flush())
            .map_err(io_err(path))?;
    } else {
        writer.write_all(&bytes).map_err(io_err(path))?;
        writer.flush().map_err(io_err(path))?;
    }
    Ok(())
}

/// Writes a uint8 label map (scl_slope 1, scl_inter 0, pixdim from spacing).
pub fn write_label_volume(path: impl AsRef<Path>, labels: &LabelVolume) -> Result<()> {
    write_label_volume_with(path, labels, WriteOptions::default())
}

pub fn write_label_volume_with(path: impl AsRef<Path>, labels: &LabelVolume, opts: WriteOptions) -> Result<()> {
    let header = NiftiHeader::new(labels.dims(), 1, labels.spacing(), DataType::U8);
    write_volume(path, &header, &VoxelData::U8(labels.codes().to_vec()), opts)
}

/// Writes a 4D float32 image with the channels stored in `order`.
pub fn write_prob_volume(path: impl AsRef<Path>, probs: &ProbVolume, order: ChannelOrder, opts: WriteOptions) -> Result<()> {
    let header = NiftiHeader::new(probs.dims(), 3, probs.spacing(), DataType::F32);
    let mut data = Vec::with_capacity(probs.dims().len() * 3);
    for region in order.0 {
        data.extend_from_slice(probs.channel(region));
    }
    write_volume(path, &header, &VoxelData::F32(data), opts)
}

/// Writes a 3D float32 image.
pub fn write_f32_volume(path: impl AsRef<Path>, volume: &Volume<f32>, opts: WriteOptions) -> Result<()> {
    let header = NiftiHeader::new(volume.dims(), 1, volume.spacing(), DataType::F32);
    write_volume(path, &header, &VoxelData::F32(volume.data().to_vec()), opts)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn header_round_trip_both_orders() {
        let mut h = NiftiHeader::new(Dims::new(240, 240, 155).unwrap(), 1, Spacing::unit(), DataType::U8);
        for e in [Endianness::Little, Endianness::Big] {
            h.endianness = e;
            let bytes = h.to_bytes();
            assert_eq!(bytes.len(), HEADER_SIZE);
            let back = NiftiHeader::parse(&bytes).unwrap();
            assert_eq!(back, h);
            let (dims, n) = back.shape().unwrap();
            assert_eq!((dims.as_array(), n), ([240, 240, 155], 1));
        }
    }

    #[test]
    fn big_endian_layout() {
        let mut h = NiftiHeader::new(Dims::cube(2), 1, Spacing::unit(), DataType::I16);
        h.endianness = Endianness::Big;
        let b = h.to_bytes();
        assert_eq!(&b[0..4], &[0, 0, 1, 92]);
        assert_eq!(&b[40..42], &[0, 3]);
        assert_eq!(&b[344..348], b"n+1\0");
    }

    #[test]
    fn rejects_bad_headers() {
        assert!(matches!(
            NiftiHeader::parse(&[0u8; 347]),
            Err(NiftiError::TruncatedFile { expected: 348, actual: 347 })
        ));
        let h = NiftiHeader::new(Dims::cube(2), 1, Spacing::unit(), DataType::U8);
        let mut b = h.to_bytes();
        b[344..348].copy_from_slice(b"abcd");
        assert!(matches!(NiftiHeader::parse(&b), Err(NiftiError::BadMagic(_))));
        let mut b = h.to_bytes();
        b[0..4].copy_from_slice(&540i32.to_le_bytes());
        assert!(matches!(NiftiHeader::parse(&b), Err(NiftiError::UnsupportedVersion(540))));
        let mut b = h.to_bytes();
        b[70..72].copy_from_slice(&128i16.to_le_bytes());
        let mut file = b.to_vec();
        file.extend_from_slice(&[0u8; 4 + 8]);
        assert!(matches!(decode(&file), Err(Error::Nifti(NiftiError::UnsupportedDatatype(128)))));
    }

    #[test]
    fn truncated_body() {
        let h = NiftiHeader::new(Dims::cube(2), 1, Spacing::unit(), DataType::F32);
        let bytes = encode(&h, &VoxelData::F32(vec![0.0; 8]));
        assert!(decode(&bytes).is_ok());
        assert!(matches!(
            decode(&bytes[..bytes.len() - 1]),
            Err(Error::Nifti(NiftiError::TruncatedFile { .. }))
        ));
    }

    #[test]
    fn scaling_applies_in_double_precision() {
        let mut h = NiftiHeader::new(Dims::new(3, 1, 1).unwrap(), 1, Spacing::unit(), DataType::I16);
        h.scl_slope = 0.5;
        h.scl_inter = 1.0;
        let vol = decode(&encode(&h, &VoxelData::I16(vec![0, 2, 4]))).unwrap();
        assert_eq!(vol.values_f64(), vec![1.0, 2.0, 3.0]);
        assert_eq!(vol.label_codes().unwrap(), vec![1, 2, 3]);
        h.scl_slope = 0.25;
        let vol = decode(&encode(&h, &VoxelData::I16(vec![0, 2, 4]))).unwrap();
        assert!(matches!(
            vol.label_codes(),
            Err(Error::Nifti(NiftiError::NonIntegralLabel { index: 1, .. }))
        ));
    }

    #[test]
    fn zero_slope_means_unscaled() {
        let mut h = NiftiHeader::new(Dims::new(2, 1, 1).unwrap(), 1, Spacing::unit(), DataType::U8);
        h.scl_slope = 0.0;
        h.scl_inter = 5.0;
        assert!(h.scaling().is_none());
    }

    #[test]
    fn channel_order_parse() {
        assert_eq!("wt,tc,et".parse::<ChannelOrder>().unwrap(), ChannelOrder::default());
        let o: ChannelOrder = "ET,TC,WT".parse().unwrap();
        assert_eq!(o.0[0], RegionId::Et);
        assert!("wt,wt,et".parse::<ChannelOrder>().is_err());
        assert!("wt,tc".parse::<ChannelOrder>().is_err());
    }

    #[test]
    fn pair_image_path() {
        assert_eq!(image_path_for(Path::new("a/b.hdr")), PathBuf::from("a/b.img"));
        assert_eq!(image_path_for(Path::new("b.hdr.gz")), PathBuf::from("b.img.gz"));
    }
}
