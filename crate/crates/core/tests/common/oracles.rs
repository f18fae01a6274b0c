//! Brute-force reference implementations used to check the library.
//!
//! Everything here works on plain index arithmetic over the mask buffers and
//! deliberately avoids the library's morphology and metric routines.

#![allow(dead_code)]

use std::collections::VecDeque;

use tumorseg::BinaryMask;

pub fn neighborhood(max_manhattan: i64) -> Vec<[i64; 3]> {
    let mut out = Vec::new();
    for dx in -1i64..=1 {
        for dy in -1i64..=1 {
            for dz in -1i64..=1 {
                let m = dx.abs() + dy.abs() + dz.abs();
                if m >= 1 && m <= max_manhattan {
                    out.push([dx, dy, dz]);
                }
            }
        }
    }
    out
}

fn shape(mask: &BinaryMask) -> [i64; 3] {
    let d = mask.dims();
    [d.nx as i64, d.ny as i64, d.nz as i64]
}

fn idx(n: [i64; 3], p: [i64; 3]) -> usize {
    (p[0] + n[0] * (p[1] + n[1] * p[2])) as usize
}

fn pos(n: [i64; 3], i: usize) -> [i64; 3] {
    let i = i as i64;
    [i % n[0], (i / n[0]) % n[1], i / (n[0] * n[1])]
}

fn inside(n: [i64; 3], p: [i64; 3]) -> bool {
    (0..3).all(|a| p[a] >= 0 && p[a] < n[a])
}

/// BFS labeling seeded in raster order. `max_manhattan` 1/2/3 = 6/18/26-connectivity.
pub fn bfs_components(mask: &BinaryMask, max_manhattan: i64) -> (Vec<u32>, usize) {
    let n = shape(mask);
    let data = mask.data();
    let nb = neighborhood(max_manhattan);
    let mut labels = vec![0u32; data.len()];
    let mut next = 0u32;
    for start in 0..data.len() {
        if !data[start] || labels[start] != 0 {
            continue;
        }
        next += 1;
        labels[start] = next;
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let p = pos(n, i);
            for o in &nb {
                let q = [p[0] + o[0], p[1] + o[1], p[2] + o[2]];
                if inside(n, q) {
                    let j = idx(n, q);
                    if data[j] && labels[j] == 0 {
                        labels[j] = next;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    (labels, next as usize)
}

/// True when two labelings induce the same partition of the foreground.
pub fn same_partition(a: &[u32], b: &[u32]) -> bool {
    use std::collections::HashMap;
    let mut ab: HashMap<u32, u32> = HashMap::new();
    let mut ba: HashMap<u32, u32> = HashMap::new();
    for (&x, &y) in a.iter().zip(b) {
        if (x == 0) != (y == 0) {
            return false;
        }
        if x == 0 {
            continue;
        }
        if *ab.entry(x).or_insert(y) != y || *ba.entry(y).or_insert(x) != x {
            return false;
        }
    }
    true
}

/// Dilation by scanning every offset of the box with the given half-extents.
pub fn brute_dilate(mask: &BinaryMask, half: [i64; 3]) -> Vec<bool> {
    let n = shape(mask);
    let data = mask.data();
    let mut out = vec![false; data.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        let p = pos(n, i);
        'search: for dz in -half[2]..=half[2] {
            for dy in -half[1]..=half[1] {
                for dx in -half[0]..=half[0] {
                    let q = [p[0] + dx, p[1] + dy, p[2] + dz];
                    if inside(n, q) && data[idx(n, q)] {
                        *slot = true;
                        break 'search;
                    }
                }
            }
        }
    }
    out
}

/// Foreground voxels that do not survive a 6-neighbor erosion (outside = background).
pub fn brute_surface(mask: &BinaryMask) -> Vec<[i64; 3]> {
    let n = shape(mask);
    let data = mask.data();
    let face = neighborhood(1);
    let mut out = Vec::new();
    for i in 0..data.len() {
        if !data[i] {
            continue;
        }
        let p = pos(n, i);
        let eroded = face.iter().all(|o| {
            let q = [p[0] + o[0], p[1] + o[1], p[2] + o[2]];
            inside(n, q) && data[idx(n, q)]
        });
        if !eroded {
            out.push(p);
        }
    }
    out
}

fn phys_dist(a: [i64; 3], b: [i64; 3], spacing: [f64; 3]) -> f64 {
    (0..3)
        .map(|k| ((a[k] - b[k]) as f64 * spacing[k]).powi(2))
        .sum::<f64>()
        .sqrt()
}

/// Distance from every voxel to the nearest foreground voxel, by exhaustive scan.
pub fn brute_edt(mask: &BinaryMask) -> Vec<f64> {
    let n = shape(mask);
    let s = mask.spacing().as_array();
    let sources: Vec<[i64; 3]> = (0..mask.data().len())
        .filter(|&i| mask.data()[i])
        .map(|i| pos(n, i))
        .collect();
    (0..mask.data().len())
        .map(|i| {
            let p = pos(n, i);
            sources
                .iter()
                .map(|&q| phys_dist(p, q, s))
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

pub fn percentile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p / 100.0;
    let lo = h.floor() as usize;
    let frac = h - lo as f64;
    if frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] * (1.0 - frac) + sorted[lo + 1] * frac
    }
}

/// Pooled surface-distance percentile by scanning every pair of surface voxels.
pub fn allpairs_hd(a: &BinaryMask, b: &BinaryMask, p: f64, penalty: f64) -> f64 {
    let sa = brute_surface(a);
    let sb = brute_surface(b);
    match (sa.is_empty(), sb.is_empty()) {
        (true, true) => return 0.0,
        (true, false) | (false, true) => return penalty,
        _ => {}
    }
    let s = a.spacing().as_array();
    let directed = |from: &[[i64; 3]], to: &[[i64; 3]]| -> Vec<f64> {
        from.iter()
            .map(|&u| to.iter().map(|&v| phys_dist(u, v, s)).fold(f64::INFINITY, f64::min))
            .collect::<Vec<_>>()
    };
    let mut all = directed(&sa, &sb);
    all.extend(directed(&sb, &sa));
    all.sort_by(|x, y| x.partial_cmp(y).unwrap());
    percentile(&all, p)
}

pub fn brute_dice(a: &[bool], b: &[bool]) -> f64 {
    let na = a.iter().filter(|&&v| v).count();
    let nb = b.iter().filter(|&&v| v).count();
    let both = a.iter().zip(b).filter(|(&x, &y)| x && y).count();
    if na + nb == 0 {
        100.0
    } else {
        200.0 * both as f64 / (na + nb) as f64
    }
}

/// Background voxels not reachable from the border through 6-connected background,
/// computed as a fixpoint of repeated sweeps.
pub fn sweep_holes(mask: &BinaryMask) -> Vec<bool> {
    let n = shape(mask);
    let data = mask.data();
    let face = neighborhood(1);
    let mut outside: Vec<bool> = (0..data.len())
        .map(|i| {
            let p = pos(n, i);
            !data[i] && (0..3).any(|a| p[a] == 0 || p[a] == n[a] - 1)
        })
        .collect();
    loop {
        let mut changed = false;
        for i in 0..data.len() {
            if data[i] || outside[i] {
                continue;
            }
            let p = pos(n, i);
            if face.iter().any(|o| {
                let q = [p[0] + o[0], p[1] + o[1], p[2] + o[2]];
                inside(n, q) && outside[idx(n, q)]
            }) {
                outside[i] = true;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }
    (0..data.len()).map(|i| !data[i] && !outside[i]).collect()
}

/// Lesion-wise Dice / HD from oracle pieces: brute dilation, BFS components,
/// explicit matching and all-pairs distances. Returns (dice, hd, n_tp, n_fn, n_fp).
pub fn lesionwise_oracle(
    pred: &BinaryMask,
    gt: &BinaryMask,
    half: [i64; 3],
    max_manhattan: i64,
    penalty: f64,
    p: f64,
) -> (f64, f64, usize, usize, usize) {
    let dims = gt.dims();
    let spacing = gt.spacing();
    let dilated = BinaryMask::new(dims, spacing, brute_dilate(gt, half)).unwrap();
    let (zones, nz) = bfs_components(&dilated, max_manhattan);
    let (comps, nc) = bfs_components(pred, max_manhattan);

    let mut scores: Vec<(f64, f64)> = Vec::new();
    let mut comp_used = vec![false; nc + 1];
    let (mut tp, mut fn_) = (0, 0);
    for z in 1..=nz as u32 {
        let matched: Vec<u32> = (1..=nc as u32)
            .filter(|&c| (0..zones.len()).any(|i| zones[i] == z && comps[i] == c))
            .collect();
        for &c in &matched {
            comp_used[c as usize] = true;
        }
        if matched.is_empty() {
            fn_ += 1;
            scores.push((0.0, penalty));
            continue;
        }
        tp += 1;
        let u: Vec<bool> = comps.iter().map(|c| matched.contains(c)).collect();
        let l: Vec<bool> = (0..zones.len()).map(|i| gt.data()[i] && zones[i] == z).collect();
        let um = BinaryMask::new(dims, spacing, u.clone()).unwrap();
        let lm = BinaryMask::new(dims, spacing, l.clone()).unwrap();
        scores.push((brute_dice(&u, &l), allpairs_hd(&um, &lm, p, penalty)));
    }
    let fp = (1..=nc).filter(|&c| !comp_used[c]).count();
    for _ in 0..fp {
        scores.push((0.0, penalty));
    }
    if scores.is_empty() {
        return (100.0, 0.0, 0, 0, 0);
    }
    let n = scores.len() as f64;
    (
        scores.iter().map(|s| s.0).sum::<f64>() / n,
        scores.iter().map(|s| s.1).sum::<f64>() / n,
        tp,
        fn_,
        fp,
    )
}
