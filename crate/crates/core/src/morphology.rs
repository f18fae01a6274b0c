//! 3D binary morphology: connected components, box dilation, interior holes,
//! surface extraction and the exact Euclidean distance transform.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::volume::{BinaryMask, BoundingBox, Dims, Spacing, Volume};

/// Voxel adjacency used for component analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
pub enum Connectivity {
    /// Shared face.
    #[serde(rename = "6")]
    Face6,
    /// Shared face or edge.
    #[serde(rename = "18")]
    Edge18,
    /// Shared face, edge or corner.
    #[default]
    #[serde(rename = "26")]
    Vertex26,
}

impl Connectivity {
    pub fn neighbor_count(self) -> usize {
        match self {
            Self::Face6 => 6,
            Self::Edge18 => 18,
            Self::Vertex26 => 26,
        }
    }

    fn max_manhattan(self) -> i32 {
        match self {
            Self::Face6 => 1,
            Self::Edge18 => 2,
            Self::Vertex26 => 3,
        }
    }

    /// All neighbor offsets `[dx, dy, dz]`.
    pub fn offsets(self) -> Vec<[isize; 3]> {
        let mut out = Vec::with_capacity(self.neighbor_count());
        for dz in -1i32..=1 {
            for dy in -1i32..=1 {
                for dx in -1i32..=1 {
                    let m = dx.abs() + dy.abs() + dz.abs();
                    if m > 0 && m <= self.max_manhattan() {
                        out.push([dx as isize, dy as isize, dz as isize]);
                    }
                }
            }
        }
        out
    }

    /// Offsets that precede the current voxel in x-fastest raster order.
    fn backward_offsets(self) -> Vec<[isize; 3]> {
        self.offsets()
            .into_iter()
            .filter(|&[dx, dy, dz]| dz < 0 || (dz == 0 && (dy < 0 || (dy == 0 && dx < 0))))
            .collect()
    }
}

impl std::str::FromStr for Connectivity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "6" | "face" | "face6" => Ok(Self::Face6),
            "18" | "edge" | "edge18" => Ok(Self::Edge18),
            "26" | "vertex" | "vertex26" => Ok(Self::Vertex26),
            other => Err(Error::InvalidParameter(format!(
                "connectivity must be 6, 18 or 26, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentStats {
    pub voxel_count: usize,
    pub volume_mm3: f64,
    pub bounding_box: BoundingBox,
    /// Mean voxel coordinate.
    pub centroid: [f64; 3],
}

/// Per-voxel component ids (0 = background, 1..=K foreground) with statistics.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentMap {
    dims: Dims,
    spacing: Spacing,
    ids: Vec<u32>,
    stats: Vec<ComponentStats>,
}

impl ComponentMap {
    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn spacing(&self) -> Spacing {
        self.spacing
    }

    pub fn ids(&self) -> &[u32] {
        &self.ids
    }

    /// Number of components K.
    pub fn len(&self) -> usize {
        self.stats.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stats.is_empty()
    }

    /// Statistics for component `id` (1-based).
    pub fn stats(&self, id: u32) -> &ComponentStats {
        &self.stats[id as usize - 1]
    }

    pub fn all_stats(&self) -> &[ComponentStats] {
        &self.stats
    }

    pub fn mask_of(&self, id: u32) -> BinaryMask {
        let data = self.ids.iter().map(|&v| v == id).collect();
        Volume::new(self.dims, self.spacing, data).expect("same dims")
    }
}

struct DisjointSet {
    parent: Vec<u32>,
}

impl DisjointSet {
    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> u32 {
        let ra = self.find(a);
        let rb = self.find(b);
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        lo
    }
}

/// Labels the foreground of `mask` with two-pass union-find.
///
/// Ids are contiguous and assigned in first-encounter raster order, so the
/// result is fully determined by the mask and the connectivity.
pub fn connected_components(mask: &BinaryMask, conn: Connectivity) -> Result<ComponentMap> {
    let dims = mask.dims();
    let data = mask.data();
    let (nx, ny, nz) = (dims.nx, dims.ny, dims.nz);
    let backward: Vec<([isize; 3], isize)> = conn
        .backward_offsets()
        .into_iter()
        .map(|o| (o, o[0] + o[1] * nx as isize + o[2] * (nx * ny) as isize))
        .collect();

    let mut provisional = vec![0u32; data.len()];
    let mut sets = DisjointSet { parent: vec![0] };

    for z in 0..nz {
        for y in 0..ny {
            let row = nx * (y + ny * z);
            for x in 0..nx {
                let i = row + x;
                if !data[i] {
                    continue;
                }
                let mut label = 0u32;
                for &([dx, dy, dz], delta) in &backward {
                    let (px, py, pz) = (x as isize + dx, y as isize + dy, z as isize + dz);
                    if !dims.contains(px, py, pz) {
                        continue;
                    }
                    let other = provisional[(i as isize + delta) as usize];
                    if other == 0 {
                        continue;
                    }
                    label = if label == 0 {
                        other
                    } else {
                        sets.union(label, other)
                    };
                }
                if label == 0 {
                    if sets.parent.len() >= u32::MAX as usize {
                        return Err(Error::ComponentOverflow);
                    }
                    label = sets.parent.len() as u32;
                    sets.parent.push(label);
                }
                provisional[i] = label;
            }
        }
    }

    // Second pass: resolve roots and renumber in raster order.
    let mut final_id = vec![0u32; sets.parent.len()];
    let mut stats: Vec<ComponentStats> = Vec::new();
    let mut sums: Vec<[f64; 3]> = Vec::new();
    let voxel_mm3 = crate::volume::voxel_volume_mm3(mask.spacing());
    for (i, slot) in provisional.iter_mut().enumerate() {
        if *slot == 0 {
            continue;
        }
        let root = sets.find(*slot);
        if final_id[root as usize] == 0 {
            stats.push(ComponentStats {
                voxel_count: 0,
                volume_mm3: 0.0,
                bounding_box: BoundingBox::point(dims.coords(i)),
                centroid: [0.0; 3],
            });
            sums.push([0.0; 3]);
            final_id[root as usize] = stats.len() as u32;
        }
        let id = final_id[root as usize];
        *slot = id;
        let p = dims.coords(i);
        let s = &mut stats[id as usize - 1];
        s.voxel_count += 1;
        s.bounding_box.include(p);
        let sum = &mut sums[id as usize - 1];
        for a in 0..3 {
            sum[a] += p[a] as f64;
        }
    }
    for (s, sum) in stats.iter_mut().zip(&sums) {
        let n = s.voxel_count as f64;
        s.volume_mm3 = n * voxel_mm3;
        s.centroid = [sum[0] / n, sum[1] / n, sum[2] / n];
    }

    Ok(ComponentMap {
        dims,
        spacing: mask.spacing(),
        ids: provisional,
        stats,
    })
}

/// Half-extent in voxels of the box structuring element for `radius_mm`.
pub fn box_half_extent(radius_mm: f64, spacing: Spacing) -> [usize; 3] {
    // Tolerance keeps e.g. 0.3 mm / 0.1 mm from flooring to 2.
    spacing
        .as_array()
        .map(|d| (radius_mm / d + 1e-9).floor().max(0.0) as usize)
}

fn for_each_line(dims: Dims, axis: usize, mut f: impl FnMut(usize, usize, usize)) {
    let (nx, ny, nz) = (dims.nx, dims.ny, dims.nz);
    match axis {
        0 => {
            for z in 0..nz {
                for y in 0..ny {
                    f(nx * (y + ny * z), 1, nx);
                }
            }
        }
        1 => {
            for z in 0..nz {
                for x in 0..nx {
                    f(x + nx * ny * z, nx, ny);
                }
            }
        }
        _ => {
            for y in 0..ny {
                for x in 0..nx {
                    f(x + nx * y, nx * ny, nz);
                }
            }
        }
    }
}

/// Box dilation with a half-extent of `⌊radius_mm / spacing⌋` voxels per axis.
///
/// A 1 mm radius on 1 mm isotropic data is the 3×3×3 kernel.
pub fn dilate(mask: &BinaryMask, radius_mm: f64) -> BinaryMask {
    assert!(radius_mm >= 0.0, "dilation radius must be non-negative");
    let half = box_half_extent(radius_mm, mask.spacing());
    let dims = mask.dims();
    let mut cur = mask.data().to_vec();
    let mut next = vec![false; cur.len()];
    for (axis, &h) in half.iter().enumerate() {
        if h == 0 {
            continue;
        }
        for_each_line(dims, axis, |start, stride, len| {
            // Distance to the nearest true voxel on either side, capped at h.
            let mut last: Option<usize> = None;
            for k in 0..len {
                let i = start + k * stride;
                if cur[i] {
                    last = Some(k);
                }
                next[i] = matches!(last, Some(l) if k - l <= h);
            }
            last = None;
            for k in (0..len).rev() {
                let i = start + k * stride;
                if cur[i] {
                    last = Some(k);
                }
                if matches!(last, Some(l) if l - k <= h) {
                    next[i] = true;
                }
            }
        });
        std::mem::swap(&mut cur, &mut next);
    }
    Volume::new(dims, mask.spacing(), cur).expect("same dims")
}

/// Background voxels whose Face6 background component never reaches the volume border.
pub fn interior_holes(mask: &BinaryMask) -> BinaryMask {
    let dims = mask.dims();
    let data = mask.data();
    let (nx, ny, nz) = (dims.nx, dims.ny, dims.nz);
    let mut outside = vec![false; data.len()];
    let mut stack = Vec::new();

    let seed = |i: usize, outside: &mut Vec<bool>, stack: &mut Vec<usize>| {
        if !data[i] && !outside[i] {
            outside[i] = true;
            stack.push(i);
        }
    };
    for z in 0..nz {
        for y in 0..ny {
            for x in 0..nx {
                let border = x == 0 || y == 0 || z == 0 || x + 1 == nx || y + 1 == ny || z + 1 == nz;
                if border {
                    seed(dims.index(x, y, z), &mut outside, &mut stack);
                }
            }
        }
    }

    let face = Connectivity::Face6.offsets();
    while let Some(i) = stack.pop() {
        let [x, y, z] = dims.coords(i);
        for &[dx, dy, dz] in &face {
            let (px, py, pz) = (x as isize + dx, y as isize + dy, z as isize + dz);
            if dims.contains(px, py, pz) {
                let j = dims.index(px as usize, py as usize, pz as usize);
                if !data[j] && !outside[j] {
                    outside[j] = true;
                    stack.push(j);
                }
            }
        }
    }

    let holes = data
        .iter()
        .zip(&outside)
        .map(|(&fg, &out)| !fg && !out)
        .collect();
    Volume::new(dims, mask.spacing(), holes).expect("same dims")
}

/// `mask ∪ interior_holes(mask)`.
pub fn fill_holes(mask: &BinaryMask) -> BinaryMask {
    let holes = interior_holes(mask);
    let data = mask
        .data()
        .iter()
        .zip(holes.data())
        .map(|(&a, &b)| a || b)
        .collect();
    Volume::new(mask.dims(), mask.spacing(), data).expect("same dims")
}

#[inline]
fn is_surface(data: &[bool], dims: Dims, x: usize, y: usize, z: usize) -> bool {
    let (nx, ny, nz) = (dims.nx, dims.ny, dims.nz);
    if x == 0 || y == 0 || z == 0 || x + 1 == nx || y + 1 == ny || z + 1 == nz {
        return true;
    }
    let i = dims.index(x, y, z);
    let sx = 1;
    let sy = nx;
    let sz = nx * ny;
    !(data[i - sx] && data[i + sx] && data[i - sy] && data[i + sy] && data[i - sz] && data[i + sz])
}

/// Foreground voxels with at least one Face6 neighbor that is background or outside the grid.
pub fn surface_voxels(mask: &BinaryMask) -> Vec<[usize; 3]> {
    let dims = mask.dims();
    let data = mask.data();
    let mut out = Vec::new();
    for (i, _) in data.iter().enumerate().filter(|(_, &v)| v) {
        let [x, y, z] = dims.coords(i);
        if is_surface(data, dims, x, y, z) {
            out.push([x, y, z]);
        }
    }
    out
}

/// Surface voxels as a mask over the same grid.
pub fn surface_mask(mask: &BinaryMask) -> BinaryMask {
    let dims = mask.dims();
    let mut out = BinaryMask::empty(dims, mask.spacing());
    for [x, y, z] in surface_voxels(mask) {
        out.set(x, y, z, true);
    }
    out
}

/// Lower envelope of parabolas along one line (Felzenszwalb & Huttenlocher).
/// `f` holds squared distances (`INFINITY` for no site); results go to `out`.
fn edt_line(f: &[f64], step: f64, out: &mut [f64], sites: &mut [usize], bounds: &mut [f64]) {
    let n = f.len();
    let mut k: isize = -1;
    for q in 0..n {
        if !f[q].is_finite() {
            continue;
        }
        let pq = q as f64 * step;
        if k < 0 {
            k = 0;
            sites[0] = q;
            bounds[0] = f64::NEG_INFINITY;
            bounds[1] = f64::INFINITY;
            continue;
        }
        loop {
            let v = sites[k as usize];
            let pv = v as f64 * step;
            let s = ((f[q] + pq * pq) - (f[v] + pv * pv)) / (2.0 * (pq - pv));
            if s <= bounds[k as usize] {
                k -= 1;
                continue;
            }
            k += 1;
            sites[k as usize] = q;
            bounds[k as usize] = s;
            bounds[k as usize + 1] = f64::INFINITY;
            break;
        }
    }
    if k < 0 {
        out.iter_mut().for_each(|v| *v = f64::INFINITY);
        return;
    }
    let mut j = 0usize;
    for (q, slot) in out.iter_mut().enumerate() {
        let x = q as f64 * step;
        while bounds[j + 1] < x {
            j += 1;
        }
        let v = sites[j];
        let d = (q as f64 - v as f64) * step;
        *slot = d * d + f[v];
    }
}

/// Exact squared Euclidean distance (mm²) from every voxel to the nearest foreground voxel.
pub fn squared_distance_transform(mask: &BinaryMask) -> Result<Volume<f64>> {
    if !mask.any() {
        return Err(Error::EmptyMask);
    }
    let dims = mask.dims();
    let steps = mask.spacing().as_array();
    let mut grid: Vec<f64> = mask
        .data()
        .iter()
        .map(|&v| if v { 0.0 } else { f64::INFINITY })
        .collect();

    let longest = dims.nx.max(dims.ny).max(dims.nz);
    let mut line = vec![0.0; longest];
    let mut out = vec![0.0; longest];
    let mut sites = vec![0usize; longest];
    let mut bounds = vec![0.0; longest + 1];
    for (axis, &step) in steps.iter().enumerate() {
        for_each_line(dims, axis, |start, stride, len| {
            for k in 0..len {
                line[k] = grid[start + k * stride];
            }
            edt_line(&line[..len], step, &mut out[..len], &mut sites, &mut bounds);
            for k in 0..len {
                grid[start + k * stride] = out[k];
            }
        });
    }
    Volume::new(dims, mask.spacing(), grid)
}

/// Exact Euclidean distance (mm) from every voxel to the nearest foreground voxel,
/// honoring anisotropic spacing.
pub fn distance_transform(mask: &BinaryMask) -> Result<Volume<f64>> {
    let mut sq = squared_distance_transform(mask)?;
    sq.data_mut().iter_mut().for_each(|v| *v = v.sqrt());
    Ok(sq)
}

/// Copies the voxels of `bbox` into a new mask with the same spacing.
pub fn crop(mask: &BinaryMask, bbox: &BoundingBox) -> BinaryMask {
    let [ex, ey, ez] = bbox.extent();
    let dims = Dims::new(ex, ey, ez).expect("non-empty box");
    let src = mask.dims();
    let mut data = Vec::with_capacity(dims.len());
    for z in bbox.min[2]..=bbox.max[2] {
        for y in bbox.min[1]..=bbox.max[1] {
            let row = src.index(bbox.min[0], y, z);
            data.extend_from_slice(&mask.data()[row..row + ex]);
        }
    }
    Volume::new(dims, mask.spacing(), data).expect("extent matches")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask_from(dims: Dims, spacing: Spacing, points: &[[usize; 3]]) -> BinaryMask {
        let mut m = BinaryMask::empty(dims, spacing);
        for &[x, y, z] in points {
            m.set(x, y, z, true);
        }
        m
    }

    #[test]
    fn offsets_counts() {
        assert_eq!(Connectivity::Face6.offsets().len(), 6);
        assert_eq!(Connectivity::Edge18.offsets().len(), 18);
        assert_eq!(Connectivity::Vertex26.offsets().len(), 26);
        assert_eq!(Connectivity::Vertex26.backward_offsets().len(), 13);
        assert_eq!(Connectivity::Edge18.backward_offsets().len(), 9);
        assert_eq!(Connectivity::Face6.backward_offsets().len(), 3);
    }

    #[test]
    fn ccl_empty() {
        let m = BinaryMask::empty(Dims::cube(4), Spacing::unit());
        let cc = connected_components(&m, Connectivity::Vertex26).unwrap();
        assert!(cc.is_empty());
        assert!(cc.ids().iter().all(|&v| v == 0));
    }

    #[test]
    fn ccl_diagonal_pair() {
        let m = mask_from(Dims::cube(3), Spacing::unit(), &[[0, 0, 0], [1, 1, 1]]);
        assert_eq!(connected_components(&m, Connectivity::Vertex26).unwrap().len(), 1);
        assert_eq!(connected_components(&m, Connectivity::Edge18).unwrap().len(), 2);
        assert_eq!(connected_components(&m, Connectivity::Face6).unwrap().len(), 2);
    }

    #[test]
    fn ccl_isolated_points() {
        let pts = [[0, 0, 0], [2, 0, 0], [4, 0, 0], [0, 2, 2], [4, 4, 4]];
        let m = mask_from(Dims::cube(5), Spacing::unit(), &pts);
        let cc = connected_components(&m, Connectivity::Vertex26).unwrap();
        assert_eq!(cc.len(), 5);
        assert!(cc.all_stats().iter().all(|s| s.voxel_count == 1));
        // raster order: (0,0,0) first, (4,4,4) last
        assert_eq!(cc.ids()[0], 1);
        assert_eq!(cc.ids()[Dims::cube(5).index(4, 4, 4)], 5);
    }

    #[test]
    fn ccl_u_shape_merges_late() {
        // Two arms joined at the bottom row: provisional labels must merge.
        let pts = [[0, 0, 0], [0, 1, 0], [0, 2, 0], [2, 0, 0], [2, 1, 0], [2, 2, 0], [1, 2, 0]];
        let m = mask_from(Dims::new(3, 3, 1).unwrap(), Spacing::unit(), &pts);
        let cc = connected_components(&m, Connectivity::Face6).unwrap();
        assert_eq!(cc.len(), 1);
        let s = cc.stats(1);
        assert_eq!(s.voxel_count, 7);
        assert_eq!(s.bounding_box, BoundingBox { min: [0, 0, 0], max: [2, 2, 0] });
    }

    #[test]
    fn ccl_stats_volume_uses_spacing() {
        let m = mask_from(Dims::cube(3), Spacing::new(1.0, 1.0, 2.0).unwrap(), &[[0, 0, 0], [1, 0, 0]]);
        let cc = connected_components(&m, Connectivity::Face6).unwrap();
        assert_eq!(cc.stats(1).volume_mm3, 4.0);
        assert_eq!(cc.stats(1).centroid, [0.5, 0.0, 0.0]);
    }

    #[test]
    fn dilate_radius_zero_is_identity() {
        let m = mask_from(Dims::cube(5), Spacing::unit(), &[[1, 2, 3], [4, 4, 4]]);
        assert_eq!(dilate(&m, 0.0), m);
    }

    #[test]
    fn dilate_center_voxel_gives_27() {
        let m = mask_from(Dims::cube(5), Spacing::unit(), &[[2, 2, 2]]);
        let d = dilate(&m, 1.0);
        assert_eq!(d.count(), 27);
        for z in 1..=3 {
            for y in 1..=3 {
                for x in 1..=3 {
                    assert!(*d.get(x, y, z));
                }
            }
        }
    }

    #[test]
    fn dilate_anisotropic_extent() {
        let m = mask_from(Dims::cube(7), Spacing::new(1.0, 1.0, 2.0).unwrap(), &[[3, 3, 3]]);
        // half-extent (2, 2, 1) for a 2 mm radius
        assert_eq!(dilate(&m, 2.0).count(), 5 * 5 * 3);
        assert_eq!(box_half_extent(0.3, Spacing::isotropic(0.1).unwrap()), [3, 3, 3]);
    }

    #[test]
    fn holes_of_solid_cube_and_empty() {
        let dims = Dims::cube(5);
        let solid = Volume::from_fn(dims, Spacing::unit(), |[x, y, z]| {
            (1..=3).contains(&x) && (1..=3).contains(&y) && (1..=3).contains(&z)
        });
        assert_eq!(interior_holes(&solid).count(), 0);
        assert_eq!(interior_holes(&BinaryMask::empty(dims, Spacing::unit())).count(), 0);
    }

    #[test]
    fn holes_of_hollow_box() {
        let dims = Dims::cube(5);
        let shell = Volume::from_fn(dims, Spacing::unit(), |p| p.iter().any(|&c| c == 0 || c == 4));
        let holes = interior_holes(&shell);
        assert_eq!(holes.count(), 27);
        assert!(*holes.get(2, 2, 2));
        assert!(!*holes.get(0, 2, 2));
    }

    #[test]
    fn hole_leaks_through_face_but_not_corner() {
        let dims = Dims::cube(5);
        let mut shell = Volume::from_fn(dims, Spacing::unit(), |p| p.iter().any(|&c| c == 0 || c == 4));
        // opening a corner voxel does not connect the cavity through a face
        shell.set(0, 0, 0, false);
        assert_eq!(interior_holes(&shell).count(), 27);
        // opening a face voxel does
        shell.set(2, 2, 0, false);
        assert_eq!(interior_holes(&shell).count(), 0);
    }

    #[test]
    fn surface_counts() {
        let single = mask_from(Dims::cube(3), Spacing::unit(), &[[1, 1, 1]]);
        assert_eq!(surface_voxels(&single), vec![[1, 1, 1]]);
        let dims = Dims::cube(6);
        let cube = Volume::from_fn(dims, Spacing::unit(), |p| p.iter().all(|&c| (1..=4).contains(&c)));
        assert_eq!(surface_voxels(&cube).len(), 56);
        assert!(surface_voxels(&BinaryMask::empty(dims, Spacing::unit())).is_empty());
        // grid border counts as outside
        let full = BinaryMask::filled(Dims::cube(4), Spacing::unit(), true);
        assert_eq!(surface_voxels(&full).len(), 56);
    }

    #[test]
    fn edt_basics() {
        let m = mask_from(Dims::new(5, 6, 2).unwrap(), Spacing::unit(), &[[0, 0, 0]]);
        let d = distance_transform(&m).unwrap();
        assert_eq!(*d.get(0, 0, 0), 0.0);
        assert_eq!(*d.get(3, 4, 0), 5.0);
        assert_eq!(*d.get(4, 0, 1), 17f64.sqrt());
    }

    #[test]
    fn edt_anisotropic() {
        let m = mask_from(Dims::new(1, 1, 5).unwrap(), Spacing::new(1.0, 1.0, 2.5).unwrap(), &[[0, 0, 0]]);
        let d = distance_transform(&m).unwrap();
        assert_eq!(d.data(), &[0.0, 2.5, 5.0, 7.5, 10.0]);
    }

    #[test]
    fn edt_empty_mask_errors() {
        let m = BinaryMask::empty(Dims::cube(3), Spacing::unit());
        assert!(matches!(distance_transform(&m), Err(Error::EmptyMask)));
    }

    #[test]
    fn crop_extracts_box() {
        let m = mask_from(Dims::cube(6), Spacing::unit(), &[[1, 2, 3], [3, 4, 3]]);
        let b = m.bounding_box().unwrap();
        let c = crop(&m, &b);
        assert_eq!(c.dims().as_array(), [3, 3, 1]);
        assert!(*c.get(0, 0, 0) && *c.get(2, 2, 0));
        assert_eq!(c.count(), 2);
    }
}
