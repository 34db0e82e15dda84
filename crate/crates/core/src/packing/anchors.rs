//! Anchor counts for the three families of Harmonic-type adversary instances.
//!
//! Every family packs one `u`-item at the origin and `2^d−1` `v`-items around the corner
//! point of the `u`-item; the remaining anchors of the fine `t`-grid hold `M` sand items.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use super::PackingError;
use crate::exactnum::{int, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HarmonicFamily {
    /// Instances `1..h`: `u = (1+ε)/2`, `v = (1+ε)y`, `t = (1+ε)y/(2K)`.
    Half,
    /// Instances `h+1..2h`: `u = (1+ε)(1−y')`, `v = (1+ε)y`, `t = (1+ε)y(1−y')/K`.
    Complement,
    /// Instance `2h+1`, same shape as `Half` with `y = y_h`.
    Last,
}

/// Sides in `t`-units: anchors per axis, `u` side, `v` side.
struct Shape {
    per_axis: BigInt,
    u: BigInt,
    v: BigInt,
}

fn whole(r: Rational, what: &str) -> Result<BigInt, PackingError> {
    if !r.is_integer() || !r.is_positive() {
        return Err(PackingError::Divisibility(format!("{what} = {r} is not a positive integer")));
    }
    Ok(r.to_integer())
}

fn shape(family: HarmonicFamily, k: u64, y: &Rational, y_next: Option<&Rational>) -> Result<Shape, PackingError> {
    let half = crate::exactnum::rat(1, 2);
    if !y.is_positive() || y >= &half {
        return Err(PackingError::OutOfRange(format!("y = {y} outside (0, 1/2)")));
    }
    let kk = int(k as i64);
    match family {
        HarmonicFamily::Half | HarmonicFamily::Last => {
            let u = whole(&kk / y, "K/y")?;
            Ok(Shape { per_axis: &u * 2 - 1, u, v: BigInt::from(2 * k) })
        }
        HarmonicFamily::Complement => {
            let yn = y_next.ok_or_else(|| PackingError::OutOfRange("family h+1..2h needs y_{h-j+1}".into()))?;
            if yn <= y || yn > &half {
                return Err(PackingError::OutOfRange(format!("y' = {yn} must lie in (y, 1/2]")));
            }
            let c = Rational::one() - yn;
            let u = whole(&kk / y, "K/y")?;
            let v = whole(&kk / &c, "K/(1-y')")?;
            let per_axis = whole(&kk / (y * &c), "K/(y(1-y'))")? - 1;
            Ok(Shape { per_axis, u, v })
        }
    }
}

/// `M`: anchors of the `t`-grid left free by the `u`-item and the `2^d−1` `v`-items.
pub fn harmonic_anchor_count(
    family: HarmonicFamily,
    d: u32,
    k: u64,
    y: &Rational,
    y_next: Option<&Rational>,
) -> Result<BigInt, PackingError> {
    if d == 0 {
        return Err(PackingError::OutOfRange("dimension must be positive".into()));
    }
    let s = shape(family, k, y, y_next)?;
    let p = |b: &BigInt| num_traits::pow(b.clone(), d as usize);
    let corners = (BigInt::one() << d) - 1;
    Ok(p(&s.per_axis) - p(&s.u) - corners * p(&s.v))
}

/// The same count by marking every blocked anchor of a `d`-dimensional grid.
///
/// `v`-items sit at the points whose coordinates are each `a` or `a − v` (with `a` the
/// `u` side) and at least one coordinate equal to `a`. Intended for small `K` only.
pub fn raster_anchor_count(
    family: HarmonicFamily,
    d: u32,
    k: u64,
    y: &Rational,
    y_next: Option<&Rational>,
) -> Result<u64, PackingError> {
    let s = shape(family, k, y, y_next)?;
    let too_big = || PackingError::OutOfRange("grid too large to rasterize".into());
    let n = s.per_axis.to_usize().ok_or_else(too_big)?;
    let u = s.u.to_usize().ok_or_else(too_big)?;
    let v = s.v.to_usize().ok_or_else(too_big)?;
    let cells = n.checked_pow(d).filter(|&c| c <= 50_000_000).ok_or_else(too_big)?;
    let mut grid = vec![false; cells];
    let mut mark = |origin: &[usize], side: usize| -> Result<(), PackingError> {
        if origin.iter().any(|&o| o + side > n) {
            return Err(PackingError::OutOfRange("item leaves the bin".into()));
        }
        let mut idx = vec![0usize; d as usize];
        loop {
            let mut flat = 0;
            for a in 0..d as usize {
                flat = flat * n + origin[a] + idx[a];
            }
            if grid[flat] {
                return Err(PackingError::OutOfRange("items overlap".into()));
            }
            grid[flat] = true;
            let mut a = 0;
            loop {
                if a == d as usize {
                    return Ok(());
                }
                idx[a] += 1;
                if idx[a] < side {
                    break;
                }
                idx[a] = 0;
                a += 1;
            }
        }
    };
    mark(&vec![0; d as usize], u)?;
    let low = u.checked_sub(v).ok_or_else(|| PackingError::OutOfRange("v larger than u".into()))?;
    for mask in 1u32..(1 << d) {
        let origin: Vec<usize> = (0..d).map(|a| if mask >> a & 1 == 1 { u } else { low }).collect();
        mark(&origin, v)?;
    }
    Ok(grid.iter().filter(|&&b| !b).count() as u64)
}
