//! Explicit anchor layouts mixing two square sizes.
//!
//! `l_shell_layout` is the block-plus-L arrangement: a `q × q` block of the larger squares
//! in the corner and the smaller squares in the two strips beside it. `pinwheel_layout`
//! rotates four blocks around a small central hole, which can waste less of the grid.

use crate::packing::{verify_grid_placement, AnchorGrid, GridItem, GridPlacement, LayoutRule, Skyline};

/// Side `a` (small) and `b` (large) in grid units with their type indices.
#[derive(Debug, Clone, Copy)]
pub(crate) struct TwoSizes {
    pub a: u32,
    pub b: u32,
    pub ta: usize,
    pub tb: usize,
}

fn block(out: &mut Vec<GridItem>, t: usize, k: u32, x0: u32, y0: u32, cols: u32, rows: u32) {
    for j in 0..rows {
        for i in 0..cols {
            out.push(GridItem { type_idx: t, ix: x0 + i * k, iy: y0 + j * k, k });
        }
    }
}

/// `q × q` large squares at the origin, small squares in the right and top strips.
pub fn l_shell_layout(grid: &AnchorGrid, a: u32, b: u32, ta: usize, tb: usize, q: u32) -> Option<GridPlacement> {
    let w = grid.usable();
    let side = q.checked_mul(b).filter(|&s| s <= w)?;
    let mut items = Vec::new();
    block(&mut items, tb, b, 0, 0, q, q);
    block(&mut items, ta, a, side, 0, (w - side) / a, w / a);
    block(&mut items, ta, a, 0, side, side / a, (w - side) / a);
    Some(GridPlacement { grid: *grid, items })
}

/// Four blocks turning around a central hole:
/// large squares `p × q` bottom-left and `s` columns top-right, small squares `r` rows
/// bottom-right and filling the top-left.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PinwheelParams {
    pub p: u32,
    pub q: u32,
    pub r: u32,
    pub s: u32,
}

struct Frame {
    x1: u32,
    y1: u32,
    x2: u32,
    y2: u32,
}

fn frame(w: u32, sz: TwoSizes, pp: PinwheelParams) -> Option<Frame> {
    let x1 = pp.p.checked_mul(sz.b).filter(|&v| v <= w)?;
    let y1 = pp.q.checked_mul(sz.b).filter(|&v| v <= w)?;
    let y2 = pp.r.checked_mul(sz.a).filter(|&v| v <= w)?;
    let x2 = w.checked_sub(pp.s.checked_mul(sz.b)?)?;
    (x2 <= x1 && y1 <= y2).then_some(Frame { x1, y1, x2, y2 })
}

fn fill_hole(cw: u32, ch: u32, sz: TwoSizes) -> Vec<(usize, u32, u32, u32)> {
    let mut sky = Skyline::new(cw, ch);
    let mut out = Vec::new();
    for (t, k) in [(sz.tb, sz.b), (sz.ta, sz.a)] {
        while let Some((x, y)) = sky.place(k, LayoutRule::BottomLeft) {
            out.push((t, k, x, y));
        }
    }
    out
}

pub fn pinwheel_layout(grid: &AnchorGrid, a: u32, b: u32, ta: usize, tb: usize, pp: PinwheelParams) -> Option<GridPlacement> {
    let w = grid.usable();
    let sz = TwoSizes { a, b, ta, tb };
    let f = frame(w, sz, pp)?;
    let mut items = Vec::new();
    block(&mut items, tb, b, 0, 0, pp.p, pp.q);
    block(&mut items, ta, a, f.x1, 0, (w - f.x1) / a, pp.r);
    block(&mut items, tb, b, f.x2, f.y2, pp.s, (w - f.y2) / b);
    block(&mut items, ta, a, 0, f.y1, f.x2 / a, (w - f.y1) / a);
    for (t, k, x, y) in fill_hole(f.x1 - f.x2, f.y2 - f.y1, sz) {
        items.push(GridItem { type_idx: t, ix: f.x2 + x, iy: f.y1 + y, k });
    }
    Some(GridPlacement { grid: *grid, items })
}

/// Counts `(small, large)` of the pinwheel without building it.
fn pinwheel_counts(w: u32, sz: TwoSizes, pp: PinwheelParams, hole_cap: u32) -> Option<(u64, u64)> {
    let f = frame(w, sz, pp)?;
    let (cw, ch) = (f.x1 - f.x2, f.y2 - f.y1);
    if cw > hole_cap || ch > hole_cap {
        return None;
    }
    let mut na = ((w - f.x1) / sz.a) as u64 * pp.r as u64 + (f.x2 / sz.a) as u64 * ((w - f.y1) / sz.a) as u64;
    let mut nb = pp.p as u64 * pp.q as u64 + pp.s as u64 * ((w - f.y2) / sz.b) as u64;
    for (t, ..) in fill_hole(cw, ch, sz) {
        if t == sz.tb {
            nb += 1;
        } else {
            na += 1;
        }
    }
    Some((na, nb))
}

/// Heaviest verified layout among the L-shell and symmetric pinwheel families, for
/// integer weights `wa`, `wb` per small and large square.
pub(crate) fn best_two_size_layout(grid: &AnchorGrid, sz: TwoSizes, wa: i128, wb: i128) -> Option<GridPlacement> {
    let w = grid.usable();
    let value = |na: u64, nb: u64| wa * na as i128 + wb * nb as i128;
    let mut best: Option<(i128, GridPlacement)> = None;
    let consider = |gp: Option<GridPlacement>, best: &mut Option<(i128, GridPlacement)>| {
        if let Some(gp) = gp {
            let c = gp.counts(sz.ta.max(sz.tb) + 1);
            let v = value(c[sz.ta], c[sz.tb]);
            if best.as_ref().map_or(true, |(bv, _)| v > *bv) && verify_grid_placement(&gp) {
                *best = Some((v, gp));
            }
        }
    };
    for q in 0..=w / sz.b {
        consider(l_shell_layout(grid, sz.a, sz.b, sz.ta, sz.tb, q), &mut best);
    }
    let hole_cap = 2 * sz.b + sz.a;
    let mut top: Option<(i128, PinwheelParams)> = None;
    for p in 1..=w / sz.b {
        for s in 1..=w / sz.b {
            if (p + s) * sz.b < w || (p + s) * sz.b > w + hole_cap {
                continue;
            }
            for r in 1..=w / sz.a {
                let pp = PinwheelParams { p, q: p, r, s };
                if let Some((na, nb)) = pinwheel_counts(w, sz, pp, hole_cap) {
                    let v = value(na, nb);
                    if top.map_or(true, |(tv, _)| v > tv) {
                        top = Some((v, pp));
                    }
                }
            }
        }
    }
    if let Some((_, pp)) = top {
        consider(pinwheel_layout(grid, sz.a, sz.b, sz.ta, sz.tb, pp), &mut best);
    }
    best.map(|(_, gp)| gp)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::raster_coverage;

    fn grid() -> AnchorGrid {
        AnchorGrid::new(420, 2)
    }

    #[test]
    fn l_shell_reproduces_block_and_strips() {
        let gp = l_shell_layout(&grid(), 4, 5, 1, 2, 83).unwrap();
        assert!(verify_grid_placement(&gp));
        assert_eq!(gp.counts(3), vec![0, 207, 6889]);
    }

    #[test]
    fn pinwheel_beats_l_shell() {
        let pp = PinwheelParams { p: 43, q: 43, r: 56, s: 43 };
        let gp = pinwheel_layout(&grid(), 4, 5, 1, 2, pp).unwrap();
        assert!(verify_grid_placement(&gp));
        assert_eq!(gp.counts(3), vec![0, 5459, 3528]);
        assert_eq!(raster_coverage(&gp), Some(5459 * 16 + 3528 * 25));
    }

    #[test]
    fn search_finds_at_least_the_known_pinwheel() {
        let sz = TwoSizes { a: 4, b: 5, ta: 1, tb: 2 };
        let gp = best_two_size_layout(&grid(), sz, 16, 25).unwrap();
        let c = gp.counts(3);
        assert!(16 * c[1] + 25 * c[2] >= 175544);
    }

    #[test]
    fn invalid_frames_are_rejected() {
        assert!(pinwheel_layout(&grid(), 4, 5, 1, 2, PinwheelParams { p: 10, q: 10, r: 10, s: 10 }).is_none());
        assert!(l_shell_layout(&grid(), 4, 5, 1, 2, 84).is_none());
    }
}
