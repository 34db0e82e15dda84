//! Bounded exhaustive search for two-dimensional patterns.
//!
//! Items are placed one at a time at the corner points of the staircase envelope of the
//! items placed so far. Every packing can be normalized into such a sequence, so an
//! exhausted search proves infeasibility. Failed states are memoized.

use std::cmp::Ordering;
use std::collections::HashSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use super::{PackingError, PlacedItem, Placement};
use crate::exactnum::{NumError, PerturbedSize, Rational};
use crate::model::{ItemType, Pattern};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchConfig {
    /// Search nodes before giving up.
    pub node_budget: u64,
    /// Patterns with more items only get the root bounds and one greedy attempt.
    pub item_cap: u64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { node_budget: 10_000_000, item_cap: 30 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Feasibility {
    Feasible(Placement),
    Infeasible,
    BudgetExceeded,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Feasibility::Feasible(_))
    }
}

/// A perturbed size scaled by a common denominator: `(b + e·ε + d·δ) / L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
struct Fx {
    b: i64,
    e: i64,
    d: i64,
}

impl Fx {
    fn add(self, o: Fx) -> Fx {
        Fx { b: self.b + o.b, e: self.e + o.e, d: self.d + o.d }
    }

    fn cmp(self, o: Fx) -> Result<Ordering, PackingError> {
        if self.b != o.b {
            return Ok(self.b.cmp(&o.b));
        }
        let (de, dd) = ((self.e - o.e).signum(), (self.d - o.d).signum());
        match (de, dd) {
            (0, 0) => Ok(Ordering::Equal),
            (1, s) | (s, 1) if s >= 0 => Ok(Ordering::Greater),
            (-1, s) | (s, -1) if s <= 0 => Ok(Ordering::Less),
            _ => Err(NumError::Ambiguous(format!("mixed infinitesimals at base {}", self.b)).into()),
        }
    }

    fn le(self, o: Fx) -> Result<bool, PackingError> {
        Ok(self.cmp(o)? != Ordering::Greater)
    }

    fn lt(self, o: Fx) -> Result<bool, PackingError> {
        Ok(self.cmp(o)? == Ordering::Less)
    }
}

type Point = (Fx, Fx);

struct Search {
    /// Type index and scaled sides, largest base area first; identical sides merged.
    kinds: Vec<(usize, Fx, Fx)>,
    one: Fx,
    scale: Rational,
    budget: u64,
    nodes: u64,
    failed: HashSet<(Vec<Point>, Vec<u64>)>,
    placed: Vec<(usize, Point)>,
}

const MEMO_LIMIT: usize = 2_000_000;

/// Decides whether `pattern` fits in the unit square.
pub fn exhaustive_feasible(pattern: &Pattern, types: &[ItemType], config: &SearchConfig) -> Result<Feasibility, PackingError> {
    if pattern.len() != types.len() {
        return Err(PackingError::OutOfRange(format!(
            "pattern has {} counts for {} types",
            pattern.len(),
            types.len()
        )));
    }
    let one = PerturbedSize::one();
    let mut counts = pattern.counts.clone();
    // identical dimensions are one kind of item
    let mut reps: Vec<usize> = Vec::new();
    for t in 0..types.len() {
        if counts[t] == 0 {
            continue;
        }
        if !types[t].width.le(&one)? || !types[t].height.le(&one)? {
            return Ok(Feasibility::Infeasible);
        }
        if let Some(&r) = reps.iter().find(|&&r| types[r].width == types[t].width && types[r].height == types[t].height) {
            counts[r] += counts[t];
            counts[t] = 0;
        } else {
            reps.push(t);
        }
    }
    reps.sort_by(|&a, &b| types[b].base_area().cmp(&types[a].base_area()).then(a.cmp(&b)));
    let total: u64 = counts.iter().sum();
    if total == 0 {
        return Ok(Feasibility::Feasible(Placement::default()));
    }
    if root_bounds_exclude(&counts, types)? {
        return Ok(Feasibility::Infeasible);
    }
    let mut s = Search::new(&reps, types, total, config.node_budget)?;
    let start = vec![(Fx::default(), Fx::default())];
    if total > config.item_cap {
        return Ok(match s.greedy(start, counts)? {
            true => Feasibility::Feasible(s.placement()),
            false => Feasibility::BudgetExceeded,
        });
    }
    if s.greedy(start.clone(), counts.clone())? {
        return Ok(Feasibility::Feasible(s.placement()));
    }
    s.placed.clear();
    Ok(match s.dfs(start, &mut counts)? {
        Some(true) => Feasibility::Feasible(s.placement()),
        Some(false) => Feasibility::Infeasible,
        None => Feasibility::BudgetExceeded,
    })
}

/// Dual feasible function `u^(k)`: `x` when `(k+1)x` is an integer, else `⌊(k+1)x⌋/k`.
fn dff(k: u64, x: &PerturbedSize) -> Result<Rational, PackingError> {
    let y = x.times(k as i64 + 1);
    if y.is_integer() {
        return Ok(x.base.clone());
    }
    Ok(Rational::new(y.floor()?, k.into()))
}

/// Area and dual-feasible-function bounds that rule a pattern out without search.
fn root_bounds_exclude(counts: &[u64], types: &[ItemType]) -> Result<bool, PackingError> {
    let used: Vec<usize> = (0..types.len()).filter(|&t| counts[t] > 0).collect();
    let area: Rational = used.iter().map(|&t| types[t].base_area() * Rational::from_integer(counts[t].into())).sum();
    if area > Rational::one() {
        return Ok(true);
    }
    let one = PerturbedSize::one();
    let mut ks: Vec<u64> = (1..=8).collect();
    for &t in &used {
        ks.push(types[t].width.max_multiple_within(&one)?);
        ks.push(types[t].height.max_multiple_within(&one)?);
    }
    ks.retain(|&k| k > 0);
    ks.sort_unstable();
    ks.dedup();
    let fw: Vec<Vec<Rational>> = ks.iter().map(|&k| used.iter().map(|&t| dff(k, &types[t].width)).collect()).collect::<Result<_, _>>()?;
    let fh: Vec<Vec<Rational>> = ks.iter().map(|&k| used.iter().map(|&t| dff(k, &types[t].height)).collect()).collect::<Result<_, _>>()?;
    for a in &fw {
        for b in &fh {
            let s: Rational = used
                .iter()
                .enumerate()
                .map(|(i, &t)| &a[i] * &b[i] * Rational::from_integer(counts[t].into()))
                .sum();
            if s > Rational::one() {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

impl Search {
    fn new(reps: &[usize], types: &[ItemType], total: u64, budget: u64) -> Result<Self, PackingError> {
        let mut l = BigInt::one();
        for &t in reps {
            for s in [&types[t].width, &types[t].height] {
                for r in [&s.base, &s.eps, &s.del] {
                    l = l.lcm(r.denom());
                }
            }
        }
        let limit = BigInt::from(i64::MAX / 4 / (total as i64 + 2));
        let scaled = |r: &Rational| -> Result<i64, PackingError> {
            let v = (r * Rational::from_integer(l.clone())).to_integer();
            if v.abs() > limit {
                return Err(PackingError::OutOfRange("sizes too fine for exact search".into()));
            }
            Ok(v.to_i64().expect("bounded"))
        };
        let fx = |s: &PerturbedSize| -> Result<Fx, PackingError> {
            Ok(Fx { b: scaled(&s.base)?, e: scaled(&s.eps)?, d: scaled(&s.del)? })
        };
        let kinds = reps
            .iter()
            .map(|&t| Ok((t, fx(&types[t].width)?, fx(&types[t].height)?)))
            .collect::<Result<Vec<_>, PackingError>>()?;
        if l > limit {
            return Err(PackingError::OutOfRange("sizes too fine for exact search".into()));
        }
        let one = Fx { b: l.to_i64().expect("bounded"), e: 0, d: 0 };
        Ok(Search {
            kinds,
            one,
            scale: Rational::new(BigInt::one(), l),
            budget,
            nodes: 0,
            failed: HashSet::new(),
            placed: Vec::new(),
        })
    }

    fn placement(&self) -> Placement {
        let back = |v: Fx| {
            PerturbedSize::new(
                Rational::from_integer(v.b.into()) * &self.scale,
                Rational::from_integer(v.e.into()) * &self.scale,
                Rational::from_integer(v.d.into()) * &self.scale,
            )
        };
        Placement {
            items: self.placed.iter().map(|&(t, (x, y))| PlacedItem { type_idx: t, x: back(x), y: back(y) }).collect(),
        }
    }

    /// Places an item at corner `i`, returning the new envelope.
    fn place(&self, env: &[Point], i: usize, w: Fx, h: Fx) -> Result<Option<Vec<Point>>, PackingError> {
        let (cx, cy) = env[i];
        let right = cx.add(w);
        let top = cy.add(h);
        if !right.le(self.one)? || !top.le(self.one)? {
            return Ok(None);
        }
        let mut out = Vec::with_capacity(env.len() + 1);
        let mut j = 0;
        while j < i && top.lt(env[j].1)? {
            out.push(env[j]);
            j += 1;
        }
        out.push((env[j].0, top));
        if right.lt(self.one)? {
            let mut last = i;
            while last + 1 < env.len() && env[last + 1].0.le(right)? {
                last += 1;
            }
            if env[last].0 == right {
                out.extend_from_slice(&env[last..]);
            } else {
                out.push((right, env[last].1));
                out.extend_from_slice(&env[last + 1..]);
            }
        }
        Ok(Some(out))
    }

    fn free_area(&self, env: &[Point]) -> i128 {
        let mut used = 0i128;
        for (i, (x, y)) in env.iter().enumerate() {
            let next = env.get(i + 1).map_or(self.one.b, |p| p.0.b);
            used += (next - x.b) as i128 * y.b as i128;
        }
        self.one.b as i128 * self.one.b as i128 - used
    }

    fn remaining_area(&self, counts: &[u64]) -> i128 {
        self.kinds.iter().map(|&(t, w, h)| w.b as i128 * h.b as i128 * counts[t] as i128).sum()
    }

    /// Fills the lowest, then leftmost, corner with the largest item that fits.
    fn greedy(&mut self, mut env: Vec<Point>, mut counts: Vec<u64>) -> Result<bool, PackingError> {
        let mut left: u64 = counts.iter().sum();
        while left > 0 {
            let mut order: Vec<usize> = (0..env.len()).collect();
            order.sort_by_key(|&a| (env[a].1.b, env[a].0.b));
            let mut done = false;
            'corners: for i in order {
                for ki in 0..self.kinds.len() {
                    let (t, w, h) = self.kinds[ki];
                    if counts[t] == 0 {
                        continue;
                    }
                    if let Some(next) = self.place(&env, i, w, h)? {
                        self.placed.push((t, env[i]));
                        env = next;
                        counts[t] -= 1;
                        left -= 1;
                        done = true;
                        break 'corners;
                    }
                }
            }
            if !done {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `Some(true)` on success, `Some(false)` when exhausted, `None` when out of budget.
    fn dfs(&mut self, env: Vec<Point>, counts: &mut Vec<u64>) -> Result<Option<bool>, PackingError> {
        if self.kinds.iter().all(|k| counts[k.0] == 0) {
            return Ok(Some(true));
        }
        self.nodes += 1;
        if self.nodes > self.budget {
            return Ok(None);
        }
        if self.remaining_area(counts) > self.free_area(&env) {
            return Ok(Some(false));
        }
        let key = (env, counts.clone());
        if self.failed.contains(&key) {
            return Ok(Some(false));
        }
        let env = &key.0;
        for i in 0..env.len() {
            for ki in 0..self.kinds.len() {
                let (t, w, h) = self.kinds[ki];
                if counts[t] == 0 {
                    continue;
                }
                let Some(next) = self.place(env, i, w, h)? else { continue };
                self.placed.push((t, env[i]));
                counts[t] -= 1;
                let r = self.dfs(next, counts)?;
                counts[t] += 1;
                match r {
                    Some(true) => return Ok(Some(true)),
                    None => return Ok(None),
                    Some(false) => {
                        self.placed.pop();
                    }
                }
            }
        }
        if self.failed.len() < MEMO_LIMIT {
            self.failed.insert(key);
        }
        Ok(Some(false))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::packing::{grid_capacity, verify_placement, AnchorGrid};

    fn rect(id: usize, w: &str, h: &str) -> ItemType {
        ItemType { id, width: w.parse().unwrap(), height: h.parse().unwrap() }
    }

    fn run(counts: &[u64], types: &[ItemType]) -> Feasibility {
        exhaustive_feasible(&Pattern { counts: counts.to_vec() }, types, &SearchConfig::default()).unwrap()
    }

    #[test]
    fn four_wide_items_cannot_share_a_bin() {
        let t = [rect(1, "1/4 + d", "1/2 + e")];
        assert_eq!(run(&[4], &t), Feasibility::Infeasible);
        assert!(run(&[3], &t).is_feasible());
    }

    #[test]
    fn witness_is_valid() {
        let t = [rect(1, "1/2 + (200)d", "1/6 - (2)e"), rect(2, "1/4 - (30)d", "1/3 + e")];
        match run(&[4, 6], &t) {
            Feasibility::Feasible(p) => {
                assert!(verify_placement(&p, &t).unwrap());
                assert_eq!(p.counts(2), vec![4, 6]);
            }
            other => panic!("expected feasible, got {other:?}"),
        }
        assert_eq!(run(&[4, 7], &t), Feasibility::Infeasible);
    }

    #[test]
    fn single_type_matches_grid_capacity() {
        for g in [5u32, 9, 14] {
            let grid = AnchorGrid::new(g, 2);
            for k in 1..g {
                let cap = grid_capacity(k, &grid).unwrap();
                let t = [ItemType::square(1, grid.unit().times(k as i64))];
                assert!(run(&[cap], &t).is_feasible(), "G={g} k={k}");
                assert_eq!(run(&[cap + 1], &t), Feasibility::Infeasible, "G={g} k={k}");
            }
        }
    }

    #[test]
    fn tiny_budget_is_reported() {
        let t = [rect(1, "1/2 + (200)d", "1/6 - (2)e"), rect(2, "1/4 - (30)d", "1/3 + e")];
        let cfg = SearchConfig { node_budget: 1, item_cap: 30 };
        let r = exhaustive_feasible(&Pattern { counts: vec![4, 7] }, &t, &cfg).unwrap();
        assert_eq!(r, Feasibility::BudgetExceeded);
    }

    #[test]
    fn over_cap_patterns_get_one_greedy_try() {
        let t = [rect(1, "1/8", "1/8")];
        let cfg = SearchConfig { node_budget: 10, item_cap: 5 };
        let r = exhaustive_feasible(&Pattern { counts: vec![64] }, &t, &cfg).unwrap();
        assert!(r.is_feasible());
    }
}
