//! Feasibility oracles for packing a pattern into the unit bin.
//!
//! Grid-aligned hypercube patterns are handled on an anchor grid with integer arithmetic;
//! small mixed patterns go through a bounded corner-point search over exact sizes.

mod anchors;
mod grid;
mod search;

pub use anchors::{harmonic_anchor_count, raster_anchor_count, HarmonicFamily};
pub use grid::{
    count_available_anchors, grid_capacity, grid_layout, grid_units, raster_coverage, verify_grid_placement,
    GridItem, GridPlacement, LayoutRule,
};
pub(crate) use grid::Skyline;
pub use search::{exhaustive_feasible, Feasibility, SearchConfig};

use thiserror::Error;

use crate::exactnum::{NumError, PerturbedSize};
use crate::model::ItemType;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PackingError {
    #[error("{0}")]
    OutOfRange(String),
    #[error("size {0} is not a multiple of the grid unit")]
    NotMultiple(String),
    #[error("divisibility condition violated: {0}")]
    Divisibility(String),
    #[error(transparent)]
    Num(#[from] NumError),
}

/// Anchor points at multiples of `(1+ε)/G` on every axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnchorGrid {
    pub resolution: u32,
    pub dimension: u32,
}

impl AnchorGrid {
    pub fn new(resolution: u32, dimension: u32) -> Self {
        AnchorGrid { resolution, dimension }
    }

    pub fn unit(&self) -> PerturbedSize {
        let g = crate::exactnum::rat(1, self.resolution as i64);
        PerturbedSize::new(g.clone(), g, Default::default())
    }

    /// Anchors per axis that can hold the corner of an item: indices `0..G-1`.
    pub fn usable(&self) -> u32 {
        self.resolution - 1
    }

    pub fn total_anchors(&self) -> u64 {
        (self.resolution as u64).pow(self.dimension)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlacedItem {
    /// 0-based item type.
    pub type_idx: usize,
    pub x: PerturbedSize,
    pub y: PerturbedSize,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Placement {
    pub items: Vec<PlacedItem>,
}

impl Placement {
    pub fn counts(&self, k: usize) -> Vec<u64> {
        let mut c = vec![0; k];
        for it in &self.items {
            c[it.type_idx] += 1;
        }
        c
    }
}

/// Containment and pairwise disjoint interiors, all decided by lexicographic comparison.
pub fn verify_placement(placement: &Placement, types: &[ItemType]) -> Result<bool, PackingError> {
    let zero = PerturbedSize::zero();
    let one = PerturbedSize::one();
    let mut boxes = Vec::with_capacity(placement.items.len());
    for it in &placement.items {
        let t = types
            .get(it.type_idx)
            .ok_or_else(|| PackingError::OutOfRange(format!("type index {} out of range", it.type_idx)))?;
        let x2 = &it.x + &t.width;
        let y2 = &it.y + &t.height;
        if !zero.le(&it.x)? || !zero.le(&it.y)? || !x2.le(&one)? || !y2.le(&one)? {
            return Ok(false);
        }
        boxes.push((&it.x, x2, &it.y, y2));
    }
    for (i, a) in boxes.iter().enumerate() {
        for b in &boxes[i + 1..] {
            let separated = a.1.le(b.0)? || b.1.le(a.0)? || a.3.le(b.2)? || b.3.le(a.2)?;
            if !separated {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rat;

    fn sq(id: usize, side: &str) -> ItemType {
        ItemType::square(id, side.parse().unwrap())
    }

    fn at(t: usize, x: &str, y: &str) -> PlacedItem {
        PlacedItem { type_idx: t, x: x.parse().unwrap(), y: y.parse().unwrap() }
    }

    #[test]
    fn unit_is_one_plus_eps_over_g() {
        let u = AnchorGrid::new(420, 2).unit();
        assert_eq!(u.base, rat(1, 420));
        assert_eq!(u.eps, rat(1, 420));
        assert_eq!(AnchorGrid::new(420, 2).total_anchors(), 176400);
    }

    #[test]
    fn second_item_sticks_out() {
        let types = [sq(1, "1/2 + e")];
        let p = Placement { items: vec![at(0, "0", "0"), at(0, "1/2 + e", "1/2 + e")] };
        assert!(!verify_placement(&p, &types).unwrap());
    }

    #[test]
    fn duplicates_overlap() {
        let types = [sq(1, "1/4")];
        let p = Placement { items: vec![at(0, "0", "0"), at(0, "0", "0")] };
        assert!(!verify_placement(&p, &types).unwrap());
    }

    #[test]
    fn touching_items_are_fine() {
        let types = [sq(1, "1/2 - e")];
        let p = Placement { items: vec![at(0, "0", "0"), at(0, "1/2 - e", "0"), at(0, "0", "1/2")] };
        assert!(verify_placement(&p, &types).unwrap());
    }

    #[test]
    fn mixed_infinitesimals_on_one_axis_are_reported() {
        let types = [
            ItemType { id: 1, width: "1/2 + e".parse().unwrap(), height: "1/4".parse().unwrap() },
            ItemType { id: 2, width: "1/2 - d".parse().unwrap(), height: "1/4".parse().unwrap() },
        ];
        let p = Placement { items: vec![at(0, "0", "0"), at(1, "1/2 + e", "0")] };
        assert!(matches!(verify_placement(&p, &types), Err(PackingError::Num(NumError::Ambiguous(_)))));
    }
}
