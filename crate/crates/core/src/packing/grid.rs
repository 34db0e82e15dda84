//! Anchor-grid layouts for grid-aligned squares in the plane.

use num_traits::{ToPrimitive, Zero};

use super::{AnchorGrid, PackingError, PlacedItem, Placement};
use crate::exactnum::PerturbedSize;
use crate::model::{ItemType, Pattern};

/// An item occupying anchor indices `ix..ix+k` × `iy..iy+k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridItem {
    pub type_idx: usize,
    pub ix: u32,
    pub iy: u32,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridPlacement {
    pub grid: AnchorGrid,
    pub items: Vec<GridItem>,
}

impl GridPlacement {
    pub fn to_placement(&self) -> Placement {
        let unit = self.grid.unit();
        Placement {
            items: self
                .items
                .iter()
                .map(|g| PlacedItem { type_idx: g.type_idx, x: unit.times(g.ix as i64), y: unit.times(g.iy as i64) })
                .collect(),
        }
    }

    pub fn counts(&self, k: usize) -> Vec<u64> {
        let mut c = vec![0; k];
        for it in &self.items {
            c[it.type_idx] += 1;
        }
        c
    }
}

/// Side of `size` in grid units, if it is an exact multiple of the unit.
pub fn grid_units(size: &PerturbedSize, grid: &AnchorGrid) -> Result<u32, PackingError> {
    let not_multiple = || PackingError::NotMultiple(size.to_string());
    let g = crate::exactnum::int(grid.resolution as i64);
    let k = &size.base * &g;
    if !size.del.is_zero() || !k.is_integer() || &size.eps * &g != k {
        return Err(not_multiple());
    }
    let k = k.to_integer().to_u32().ok_or_else(not_multiple)?;
    if k == 0 {
        return Err(not_multiple());
    }
    Ok(k)
}

/// Number of `k`-unit hypercubes that fit at anchors: `⌊(G−1)/k⌋^d`.
pub fn grid_capacity(k: u32, grid: &AnchorGrid) -> Result<u64, PackingError> {
    if k == 0 || k > grid.usable() {
        return Err(PackingError::OutOfRange(format!(
            "side of {k} units outside 1..={} on a {}-grid",
            grid.usable(),
            grid.resolution
        )));
    }
    Ok(((grid.usable() / k) as u64).pow(grid.dimension))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LayoutRule {
    /// Lowest then leftmost position on the skyline.
    BottomLeft,
    /// Position wasting the least area beneath the item, ties bottom-left.
    MinWaste,
}

#[derive(Debug, Clone, Copy)]
struct Seg {
    x: u32,
    w: u32,
    y: u32,
}

/// Skyline packer over a `width × height` box of grid units.
pub(crate) struct Skyline {
    width: u32,
    height: u32,
    segs: Vec<Seg>,
}

impl Skyline {
    pub(crate) fn new(width: u32, height: u32) -> Self {
        Skyline { width, height, segs: vec![Seg { x: 0, w: width, y: 0 }] }
    }

    /// Resting height and wasted area for an item of side `k` starting at segment `i`.
    fn fit(&self, i: usize, k: u32) -> Option<(u32, u64)> {
        let x = self.segs[i].x;
        if x + k > self.width {
            return None;
        }
        let end = x + k;
        let mut y = 0;
        for s in &self.segs[i..] {
            if s.x >= end {
                break;
            }
            y = y.max(s.y);
        }
        if y + k > self.height {
            return None;
        }
        let mut waste = 0u64;
        for s in &self.segs[i..] {
            if s.x >= end {
                break;
            }
            let w = (s.x + s.w).min(end) - s.x;
            waste += (y - s.y) as u64 * w as u64;
        }
        Some((y, waste))
    }

    pub(crate) fn place(&mut self, k: u32, rule: LayoutRule) -> Option<(u32, u32)> {
        let mut best: Option<(u64, u32, u32)> = None;
        for i in 0..self.segs.len() {
            if let Some((y, waste)) = self.fit(i, k) {
                let x = self.segs[i].x;
                let key = match rule {
                    LayoutRule::BottomLeft => (y as u64, y, x),
                    LayoutRule::MinWaste => (waste, y, x),
                };
                if best.map_or(true, |b| key < b) {
                    best = Some(key);
                }
            }
        }
        let (_, y, x) = best?;
        self.raise(x, k, y + k);
        Some((x, y))
    }

    fn raise(&mut self, x: u32, w: u32, top: u32) {
        let end = x + w;
        let mut out = Vec::with_capacity(self.segs.len() + 2);
        for s in &self.segs {
            let s_end = s.x + s.w;
            if s_end <= x || s.x >= end {
                out.push(*s);
                continue;
            }
            if s.x < x {
                out.push(Seg { x: s.x, w: x - s.x, y: s.y });
            }
            if s.x <= x {
                out.push(Seg { x, w, y: top });
            }
            if s_end > end {
                out.push(Seg { x: end, w: s_end - end, y: s.y });
            }
        }
        let mut merged: Vec<Seg> = Vec::with_capacity(out.len());
        for s in out {
            match merged.last_mut() {
                Some(last) if last.y == s.y => last.w += s.w,
                _ => merged.push(s),
            }
        }
        self.segs = merged;
    }
}

fn skyline_layout(items: &[(usize, u32)], grid: &AnchorGrid, rule: LayoutRule) -> Option<GridPlacement> {
    let mut sky = Skyline::new(grid.usable(), grid.usable());
    let mut placed = Vec::with_capacity(items.len());
    for &(t, k) in items {
        let (ix, iy) = sky.place(k, rule)?;
        placed.push(GridItem { type_idx: t, ix, iy, k });
    }
    Some(GridPlacement { grid: *grid, items: placed })
}

/// Places every non-sand item of `pattern` at anchors, largest first, on a skyline.
///
/// The smallest used type is treated as sand and skipped when its side is not a whole
/// number of grid units. `Ok(None)` means no layout rule succeeded; it says nothing about
/// infeasibility.
pub fn grid_layout(pattern: &Pattern, types: &[ItemType], grid: &AnchorGrid) -> Result<Option<GridPlacement>, PackingError> {
    if grid.dimension != 2 {
        return Err(PackingError::OutOfRange("grid layouts are built in dimension 2 only".into()));
    }
    if pattern.len() != types.len() {
        return Err(PackingError::OutOfRange(format!(
            "pattern has {} counts for {} types",
            pattern.len(),
            types.len()
        )));
    }
    let mut items = Vec::new();
    for (t, &c) in pattern.counts.iter().enumerate() {
        if c == 0 {
            continue;
        }
        if types[t].width != types[t].height {
            return Err(PackingError::NotMultiple(format!("type {} is not a square", t + 1)));
        }
        match grid_units(&types[t].width, grid) {
            Ok(k) => items.extend(std::iter::repeat((t, k)).take(c as usize)),
            Err(_) if t == pattern.class_index() => {}
            Err(e) => return Err(e),
        }
    }
    items.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    for rule in [LayoutRule::BottomLeft, LayoutRule::MinWaste] {
        if let Some(p) = skyline_layout(&items, grid, rule) {
            return Ok(Some(p));
        }
    }
    Ok(None)
}

fn bitmap(placement: &GridPlacement) -> Option<(Vec<bool>, u64)> {
    let g = placement.grid.resolution as usize;
    let mut cells = vec![false; g * g];
    let mut covered = 0u64;
    for it in &placement.items {
        if it.k == 0 || it.ix + it.k > placement.grid.usable() || it.iy + it.k > placement.grid.usable() {
            return None;
        }
        for y in it.iy..it.iy + it.k {
            let row = y as usize * g;
            for x in it.ix..it.ix + it.k {
                let c = &mut cells[row + x as usize];
                if *c {
                    return None;
                }
                *c = true;
                covered += 1;
            }
        }
    }
    Some((cells, covered))
}

/// In-bounds and overlap-free, by rasterizing onto the anchor grid.
pub fn verify_grid_placement(placement: &GridPlacement) -> bool {
    placement.grid.dimension == 2 && bitmap(placement).is_some()
}

/// Anchors covered by the items (shifted by +ε on both axes), or `None` if the placement
/// is invalid.
pub fn raster_coverage(placement: &GridPlacement) -> Option<u64> {
    if placement.grid.dimension != 2 {
        return None;
    }
    bitmap(placement).map(|(_, c)| c)
}

/// Anchors still free for a sand item after the placement.
pub fn count_available_anchors(placement: &GridPlacement) -> Result<u64, PackingError> {
    let covered = raster_coverage(placement)
        .ok_or_else(|| PackingError::OutOfRange("placement is not a valid anchor packing".into()))?;
    Ok(placement.grid.total_anchors() - covered)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> AnchorGrid {
        AnchorGrid::new(420, 2)
    }

    fn squares() -> Vec<ItemType> {
        let mut v = vec![ItemType::square(1, "1/420 - e".parse().unwrap())];
        for (i, k) in [4, 5, 10, 20, 21, 42, 84, 105, 210].iter().enumerate() {
            v.push(ItemType::square(i + 2, grid().unit().times(*k)));
        }
        v
    }

    #[test]
    fn units_of_table_sizes() {
        let t = squares();
        assert_eq!(grid_units(&t[4].width, &grid()).unwrap(), 20);
        assert!(grid_units(&t[0].width, &grid()).is_err());
        assert!(grid_units(&"1/21".parse().unwrap(), &grid()).is_err());
    }

    #[test]
    fn capacities() {
        assert_eq!(grid_capacity(20, &grid()).unwrap(), 400);
        assert_eq!(grid_capacity(4, &grid()).unwrap(), 10816);
        assert_eq!(grid_capacity(419, &grid()).unwrap(), 1);
        assert!(grid_capacity(420, &grid()).is_err());
        assert!(grid_capacity(0, &grid()).is_err());
    }

    #[test]
    fn single_large_item() {
        let p = Pattern::from_entries(10, &[(9, 1)]);
        let gp = grid_layout(&p, &squares(), &grid()).unwrap().unwrap();
        assert_eq!(gp.items, vec![GridItem { type_idx: 9, ix: 0, iy: 0, k: 210 }]);
        assert_eq!(count_available_anchors(&gp).unwrap(), 132300);
    }

    #[test]
    fn two_halves_do_not_fit() {
        let p = Pattern::from_entries(10, &[(9, 2)]);
        assert!(grid_layout(&p, &squares(), &grid()).unwrap().is_none());
    }

    #[test]
    fn last_prefix_pattern_leaves_sand_room() {
        let p = Pattern { counts: vec![0, 10, 8, 4, 39, 8, 4, 7, 5, 1] };
        let gp = grid_layout(&p, &squares(), &grid()).unwrap().unwrap();
        assert!(verify_grid_placement(&gp));
        assert_eq!(raster_coverage(&gp), Some(175561));
        assert_eq!(count_available_anchors(&gp).unwrap(), 839);
    }

    #[test]
    fn empty_placement_leaves_all_anchors() {
        let gp = GridPlacement { grid: grid(), items: vec![] };
        assert_eq!(count_available_anchors(&gp).unwrap(), 176400);
    }

    #[test]
    fn raster_rejects_overlap_and_overhang() {
        let a = GridItem { type_idx: 0, ix: 0, iy: 0, k: 3 };
        let g = AnchorGrid::new(10, 2);
        assert!(!verify_grid_placement(&GridPlacement { grid: g, items: vec![a, GridItem { ix: 2, ..a }] }));
        assert!(!verify_grid_placement(&GridPlacement { grid: g, items: vec![GridItem { ix: 7, ..a }] }));
        assert!(verify_grid_placement(&GridPlacement { grid: g, items: vec![a, GridItem { ix: 6, ..a }] }));
    }

    #[test]
    fn l_shell_around_block() {
        // 83×83 five-unit squares leave an L of width 4 for the four-unit ones
        let p = Pattern::from_entries(10, &[(1, 207), (2, 6889)]);
        let gp = grid_layout(&p, &squares(), &grid()).unwrap().unwrap();
        assert!(verify_grid_placement(&gp));
        assert_eq!(gp.counts(10)[1], 207);
    }
}
