//! Rasterised interface patterns shared by unit blocks and the assembly.
//!
//! A tile is one plaquette of a block seen in a single slice. Its pattern
//! depends on the local height `y ∈ (0, 1)` (0 on the refined face) and on
//! the plaquette averages of the relaxed input in that slice. On the coarse
//! half (`y ≥ ½`) every row is `+1` on `[0, η₁] ∪ [½, η₂]`; on the refined
//! half every sub-plaquette row is `+1` on its first `¼(1 + M̄)` of the
//! block width, where `M̄` blends the sub-plaquette and plaquette averages.

use branchlab_elliptic::pairwise_sum;

/// Left interface of the coarse half.
pub fn eta_first(y: f64, mbar: f64) -> f64 {
    (y * (1.0 + mbar) / 2.0).min(0.5)
}

/// Right interface of the coarse half.
pub fn eta_second(y: f64, mbar: f64) -> f64 {
    0.5 + ((1.0 - y) * (1.0 + mbar) / 2.0).max(mbar / 2.0)
}

/// Blended average `(1 - 2y)·fine + 2y·coarse` of a sub-plaquette on the
/// refined half.
pub fn blended_average(y: f64, fine: f64, coarse: f64) -> f64 {
    (1.0 - 2.0 * y) * fine + 2.0 * y * coarse
}

/// Integer counts in `0..=cap` close to `ideal` whose sum is the rounded
/// sum of `ideal` (largest-remainder rounding, ties to the lower index).
pub fn apportion(ideal: &[f64], cap: usize) -> Vec<usize> {
    let max_total = cap * ideal.len();
    let total = (pairwise_sum(ideal).round().max(0.0) as usize).min(max_total);
    let mut counts: Vec<usize> = ideal
        .iter()
        .map(|v| (v.floor().max(0.0) as usize).min(cap))
        .collect();
    let mut assigned: usize = counts.iter().sum();
    let frac = |i: usize| ideal[i] - ideal[i].floor();
    let mut order: Vec<usize> = (0..ideal.len()).collect();
    order.sort_by(|&a, &b| frac(b).total_cmp(&frac(a)).then(a.cmp(&b)));
    while assigned < total {
        for &i in &order {
            if assigned == total {
                break;
            }
            if counts[i] < cap {
                counts[i] += 1;
                assigned += 1;
            }
        }
    }
    while assigned > total {
        for &i in order.iter().rev() {
            if assigned == total {
                break;
            }
            if counts[i] > 0 {
                counts[i] -= 1;
                assigned -= 1;
            }
        }
    }
    counts
}

/// Cell rectangle of one plaquette within a slice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Tile {
    pub origin: [usize; 2],
    pub size: [usize; 2],
}

/// Averages of the relaxed input over one tile in one slice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TileAverages {
    /// Plaquette average.
    pub coarse: f64,
    /// Sub-plaquette averages, index `i + 2j` for the sub-plaquette with
    /// offset `(i, j)` in half-widths; only the first `2^d` are used.
    pub fine: [f64; 4],
}

/// Number of sub-plaquettes of a tile.
pub fn sub_count(d: usize) -> usize {
    1 << d
}

/// Writes the `±1` pattern of one slice.
///
/// All tiles share one size with even side lengths, so every counting unit
/// covers the same number of rows and the largest-remainder rounding keeps
/// the number of `+1` cells of the slice equal to its rounded ideal value.
/// `row_len` is the number of cells along axis 0 of the slice array.
pub fn fill_slice(
    d: usize,
    row_len: usize,
    tiles: &[Tile],
    avgs: &[TileAverages],
    y: f64,
    out: &mut [f64],
) {
    for t in tiles {
        for_rows(d, t.origin[1], t.size[1], |r| {
            out[row_len * r + t.origin[0]..row_len * r + t.origin[0] + t.size[0]].fill(-1.0);
        });
    }
    if y >= 0.5 {
        let ideal: Vec<f64> = tiles
            .iter()
            .zip(avgs)
            .map(|(t, a)| t.size[0] as f64 * (1.0 + a.coarse) / 2.0)
            .collect();
        let cap = tiles.first().map_or(0, |t| t.size[0]);
        let plus = apportion(&ideal, cap);
        for ((t, a), &p) in tiles.iter().zip(avgs).zip(&plus) {
            let c = t.size[0];
            let h = c / 2;
            let first = ((c as f64) * eta_first(y, a.coarse)).round() as usize;
            let n1 = first.clamp(p.saturating_sub(h), p.min(h));
            let n2 = p - n1;
            for_rows(d, t.origin[1], t.size[1], |r| {
                let base = row_len * r + t.origin[0];
                out[base..base + n1].fill(1.0);
                out[base + h..base + h + n2].fill(1.0);
            });
        }
    } else {
        let subs = sub_count(d);
        let mut ideal = Vec::with_capacity(tiles.len() * subs);
        for (t, a) in tiles.iter().zip(avgs) {
            let h = (t.size[0] / 2) as f64;
            for q in 0..subs {
                ideal.push(h * (1.0 + blended_average(y, a.fine[q], a.coarse)) / 2.0);
            }
        }
        let cap = tiles.first().map_or(0, |t| t.size[0] / 2);
        let plus = apportion(&ideal, cap);
        for (b, t) in tiles.iter().enumerate() {
            let [h0, h1] = [t.size[0] / 2, t.size[1] / 2];
            for q in 0..subs {
                let (i, j) = (q % 2, q / 2);
                let p = plus[b * subs + q];
                let (row0, rows) = if d == 2 {
                    (t.origin[1] + j * h1, h1)
                } else {
                    (t.origin[1], 1)
                };
                for_rows(d, row0, rows, |r| {
                    let base = row_len * r + t.origin[0] + i * h0;
                    out[base..base + p].fill(1.0);
                });
            }
        }
    }
}

fn for_rows<F: FnMut(usize)>(d: usize, start: usize, count: usize, mut f: F) {
    let count = if d == 2 { count } else { 1 };
    for r in start..start + count {
        f(r);
    }
}

/// Averages of `slice` over every tile of a uniform tiling with tiles of
/// `size` cells, row by row of tiles (axis 0 fastest).
pub fn tile_averages(
    d: usize,
    n: [usize; 2],
    size: [usize; 2],
    slice: &[f64],
) -> Vec<TileAverages> {
    let half = [size[0] / 2, if d == 2 { size[1] / 2 } else { 1 }];
    let subs_per_row = n[0] / half[0];
    let sub_rows = if d == 2 { n[1] / half[1] } else { 1 };
    let mut sums = vec![0.0; subs_per_row * sub_rows];
    for i1 in 0..n[1] {
        let row = &slice[n[0] * i1..n[0] * (i1 + 1)];
        let sr = if d == 2 { i1 / half[1] } else { 0 };
        for (i0, v) in row.iter().enumerate() {
            sums[i0 / half[0] + subs_per_row * sr] += v;
        }
    }
    let area = (half[0] * half[1]) as f64;
    let tiles_per_row = n[0] / size[0];
    let tile_rows = if d == 2 { n[1] / size[1] } else { 1 };
    let subs = sub_count(d);
    let mut out = Vec::with_capacity(tiles_per_row * tile_rows);
    for p1 in 0..tile_rows {
        for p0 in 0..tiles_per_row {
            let mut fine = [0.0; 4];
            for (q, f) in fine.iter_mut().enumerate().take(subs) {
                let (i, j) = (q % 2, q / 2);
                let s1 = if d == 2 { 2 * p1 + j } else { 0 };
                *f = sums[2 * p0 + i + subs_per_row * s1] / area;
            }
            let coarse = fine[..subs].iter().sum::<f64>() / subs as f64;
            out.push(TileAverages { coarse, fine });
        }
    }
    out
}

/// The uniform tiling of a slice with `n` cells by tiles of `size` cells.
pub fn tiling(d: usize, n: [usize; 2], size: [usize; 2]) -> Vec<Tile> {
    let tile_rows = if d == 2 { n[1] / size[1] } else { 1 };
    let mut out = Vec::new();
    for p1 in 0..tile_rows {
        for p0 in 0..n[0] / size[0] {
            out.push(Tile {
                origin: [p0 * size[0], p1 * size[1]],
                size,
            });
        }
    }
    out
}
