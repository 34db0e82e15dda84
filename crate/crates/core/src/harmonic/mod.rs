//! Parametric lower bounds for Harmonic-type algorithms and for the classes B1 and B2.
//!
//! Values that are rational are returned exactly. Roots are enclosed in intervals with
//! dyadic endpoints, see [`interval`].

mod bclasses;
mod chain;
pub mod interval;

pub use bclasses::{b1_bounds, b1_optimize, b2_bounds, b2_optimize, BClassOptimum};
pub use chain::{closed_form_bound, equalized, explore, y_recursion, Equalized};
pub use interval::{Interval, Surd};

use std::fmt;

use num_traits::{One, Signed};
use thiserror::Error;

use crate::exactnum::rational::pow;
use crate::exactnum::{format_rational, int, rat, to_decimal, Rational};
use crate::packing::{harmonic_anchor_count, HarmonicFamily, PackingError};

#[derive(Debug, Error)]
pub enum HarmonicError {
    #[error("out of domain: {0}")]
    Domain(String),
    #[error(transparent)]
    Packing(#[from] PackingError),
}

fn domain(msg: impl Into<String>) -> HarmonicError {
    HarmonicError::Domain(msg.into())
}

pub fn default_tolerance() -> Rational {
    rat(1, 1_000_000_000_000)
}

/// An exact value, or an interval known to contain the value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundValue {
    pub exact: Option<Rational>,
    pub enclosure: Interval,
}

impl BoundValue {
    pub fn exact(v: Rational) -> Self {
        BoundValue { enclosure: Interval::point(v.clone()), exact: Some(v) }
    }

    pub fn enclosed(i: Interval) -> Self {
        if i.is_point() {
            return BoundValue::exact(i.lo);
        }
        BoundValue { exact: None, enclosure: i }
    }

    pub fn lo(&self) -> &Rational {
        &self.enclosure.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.enclosure.hi
    }

    pub fn contains(&self, v: &Rational) -> bool {
        self.enclosure.contains(v)
    }

    pub fn width(&self) -> Rational {
        self.enclosure.width()
    }

    pub fn mid(&self) -> Rational {
        self.exact.clone().unwrap_or_else(|| self.enclosure.mid())
    }

    /// `p/q ≈ x.xxxxx` when exact, `[lo, hi] ≈ x.xxxxx` otherwise.
    pub fn render(&self, places: usize) -> String {
        match &self.exact {
            Some(v) => format!("{} ≈ {}", format_rational(v), to_decimal(v, places)),
            None => format!(
                "[{}, {}] ≈ {}",
                to_decimal(&self.enclosure.lo, places + 3),
                to_decimal(&self.enclosure.hi, places + 3),
                to_decimal(&self.enclosure.mid(), places)
            ),
        }
    }
}

impl fmt::Display for BoundValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(10))
    }
}

/// Thresholds `1/3 < y_1 < … < y_h < 1/2` and red fractions `1/m_j`, for dimension `d`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarmonicParams {
    pub d: u32,
    pub y: Vec<Rational>,
    pub m: Vec<Rational>,
    pub lambda: Option<Rational>,
}

impl HarmonicParams {
    pub fn h(&self) -> usize {
        self.y.len()
    }

    /// `y_i` for `0 ≤ i ≤ h+1`, with `y_0 = 1/3` and `y_{h+1} = 1/2`.
    pub fn y_at(&self, i: usize) -> Rational {
        match i {
            0 => rat(1, 3),
            i if i == self.h() + 1 => rat(1, 2),
            i => self.y[i - 1].clone(),
        }
    }

    pub fn validate(&self) -> Result<(), HarmonicError> {
        if self.d == 0 {
            return Err(domain("dimension must be at least 1"));
        }
        if self.y.is_empty() || self.y.len() != self.m.len() {
            return Err(domain(format!("need h ≥ 1 thresholds and as many m values, got {} and {}", self.y.len(), self.m.len())));
        }
        for i in 0..=self.h() {
            if self.y_at(i) >= self.y_at(i + 1) {
                return Err(domain(format!("thresholds must increase strictly from 1/3 to 1/2 (y_{i} ≥ y_{})", i + 1)));
            }
        }
        if let Some(j) = self.m.iter().position(|m| m < &Rational::one()) {
            return Err(domain(format!("m_{} = {} is below 1", j + 1, self.m[j])));
        }
        Ok(())
    }
}

fn two_d(d: u32) -> Rational {
    pow(&int(2), d)
}

fn check_m(m: &Rational) -> Result<(), HarmonicError> {
    if m < &Rational::one() {
        return Err(domain(format!("m = {m} is below 1")));
    }
    Ok(())
}

fn check_y(y: &Rational) -> Result<(), HarmonicError> {
    if !y.is_positive() || y >= &rat(1, 2) {
        return Err(domain(format!("y = {y} outside (0, 1/2)")));
    }
    Ok(())
}

/// `2 + (1−1/m)(1−1/2^d) − 1/2^d − (2^d−1) y^d`
pub fn ineq1(d: u32, m: &Rational, y: &Rational) -> Result<Rational, HarmonicError> {
    check_m(m)?;
    check_y(y)?;
    let t = two_d(d);
    let r = Rational::one() - m.recip();
    Ok(int(2) + r * (Rational::one() - t.recip()) - t.recip() - (&t - Rational::one()) * pow(y, d))
}

/// `2 + 1/m + (1−1/m)(1−1/2^d) − (1−y')^d − (2^d−1) y^d`
pub fn ineq2(d: u32, m: &Rational, y: &Rational, y_next: &Rational) -> Result<Rational, HarmonicError> {
    check_m(m)?;
    check_y(y)?;
    if y_next <= y || y_next > &rat(1, 2) {
        return Err(domain(format!("y' = {y_next} must lie in (y, 1/2]")));
    }
    let t = two_d(d);
    let inv = m.recip();
    Ok(int(2) + &inv + (Rational::one() - &inv) * (Rational::one() - t.recip())
        - pow(&(Rational::one() - y_next), d)
        - (&t - Rational::one()) * pow(y, d))
}

/// `3 − 1/2^(d−1) − (2^d−1) y^d`
pub fn ineq3(d: u32, y: &Rational) -> Result<Rational, HarmonicError> {
    if y < &rat(1, 3) || y > &rat(1, 2) {
        return Err(domain(format!("y_h = {y} outside [1/3, 1/2]")));
    }
    Ok(ineq3_poly(d, y))
}

pub(crate) fn ineq3_poly(d: u32, y: &Rational) -> Rational {
    let t = two_d(d);
    int(3) - int(2) / &t - (&t - Rational::one()) * pow(y, d)
}

/// Right-hand sides of every inequality at `p`, labelled.
pub fn worst_case_terms(p: &HarmonicParams) -> Result<Vec<(String, Rational)>, HarmonicError> {
    p.validate()?;
    let h = p.h();
    let mut out = Vec::with_capacity(2 * h + 1);
    for j in 1..=h {
        let m = &p.m[j - 1];
        out.push((format!("(1) j={j}"), ineq1(p.d, m, &p.y_at(h - j))?));
        out.push((format!("(2) j={j}"), ineq2(p.d, m, &p.y_at(h - j), &p.y_at(h - j + 1))?));
    }
    out.push(("(3)".into(), ineq3(p.d, &p.y_at(h))?));
    Ok(out)
}

/// The largest right-hand side of the three inequality families at `p`.
pub fn harmonic_worst_case(p: &HarmonicParams) -> Result<BoundValue, HarmonicError> {
    let terms = worst_case_terms(p)?;
    let max = terms.into_iter().map(|(_, v)| v).max().expect("h ≥ 1");
    Ok(BoundValue::exact(max))
}

/// Which of the `2h+1` adversary instances.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InstanceFamily {
    /// instances `1..h`
    Lower,
    /// instances `h+1..2h`
    Upper,
    /// instance `2h+1`
    Last,
}

/// Bins per `N` that the algorithm opens on instance `j` of `family` with parameter `K`.
pub fn harmonic_instance_cost(
    family: InstanceFamily,
    k: u64,
    p: &HarmonicParams,
    j: usize,
) -> Result<Rational, HarmonicError> {
    p.validate()?;
    let h = p.h();
    match family {
        InstanceFamily::Last => family_cost(family, p.d, k, None, &p.y_at(h), None),
        _ if j == 0 || j > h => Err(domain(format!("instance index {j} outside 1..{h}"))),
        InstanceFamily::Lower => family_cost(family, p.d, k, Some(&p.m[j - 1]), &p.y_at(h - j), None),
        InstanceFamily::Upper => {
            family_cost(family, p.d, k, Some(&p.m[j - 1]), &p.y_at(h - j), Some(&p.y_at(h - j + 1)))
        }
    }
}

/// The same cost from raw parameters. `m` is required except for [`InstanceFamily::Last`],
/// `y_next` only for [`InstanceFamily::Upper`].
///
/// The `t`-item term is `M / (anchors per axis)^d`, with `M` the free anchor count.
pub fn family_cost(
    family: InstanceFamily,
    d: u32,
    k: u64,
    m: Option<&Rational>,
    y: &Rational,
    y_next: Option<&Rational>,
) -> Result<Rational, HarmonicError> {
    let t = two_d(d);
    let red = |m: Option<&Rational>| -> Result<(Rational, Rational), HarmonicError> {
        let m = m.ok_or_else(|| domain("this family needs m"))?;
        check_m(m)?;
        let inv = m.recip();
        Ok((&inv + (Rational::one() - &inv) * (Rational::one() - t.recip()), inv))
    };
    let kk = int(k as i64);
    let (pf, base, per_axis) = match family {
        InstanceFamily::Last => (HarmonicFamily::Last, int(2) - t.recip(), int(2) * &kk / y - Rational::one()),
        InstanceFamily::Lower => {
            let (r, inv) = red(m)?;
            (HarmonicFamily::Half, r + Rational::one() - inv, int(2) * &kk / y - Rational::one())
        }
        InstanceFamily::Upper => {
            let (r, _) = red(m)?;
            let yn = y_next.ok_or_else(|| domain("instances h+1..2h need y'"))?;
            (HarmonicFamily::Complement, r + Rational::one(), &kk / (y * (Rational::one() - yn)) - Rational::one())
        }
    };
    let free = harmonic_anchor_count(pf, d, k, y, y_next)?;
    if !free.is_positive() {
        return Err(domain(format!("no free anchors at K = {k}")));
    }
    Ok(base + Rational::from_integer(free) / pow(&per_axis, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn inequality_values() {
        assert_eq!(ineq1(2, &int(2), &rat(1, 3)).unwrap(), rat(43, 24));
        assert_eq!(ineq1(1, &int(1), &rat(2, 5)).unwrap(), int(2) - rat(1, 2) - rat(2, 5));
        // 2 + 1/2 + 3/8 − 9/25 − 1/3, summed in a different order
        let expect = rat(1, 2) - rat(1, 3) + rat(3, 8) - rat(9, 25) + int(2);
        assert_eq!(ineq2(2, &int(2), &rat(1, 3), &rat(2, 5)).unwrap(), expect);
        assert_eq!(ineq3(2, &rat(1, 3)).unwrap(), rat(13, 6));
        assert_eq!(ineq3(1, &rat(1, 2)).unwrap(), rat(3, 2));
    }

    #[test]
    fn domain_errors() {
        assert!(ineq1(2, &rat(1, 2), &rat(1, 3)).is_err());
        assert!(ineq1(2, &int(2), &rat(1, 2)).is_err());
        assert!(ineq2(2, &int(2), &rat(2, 5), &rat(1, 3)).is_err());
        assert!(ineq3(2, &rat(1, 4)).is_err());
    }

    #[test]
    fn worst_case_is_the_largest_term() {
        let p = HarmonicParams { d: 2, y: vec![rat(2, 5)], m: vec![int(3)], lambda: None };
        let terms = worst_case_terms(&p).unwrap();
        assert_eq!(terms.len(), 3);
        let w = harmonic_worst_case(&p).unwrap();
        assert!(terms.iter().all(|(_, v)| v <= w.exact.as_ref().unwrap()));
        assert!(w.exact.unwrap() >= rat(97, 48));
    }

    #[test]
    fn params_validation() {
        let bad = HarmonicParams { d: 2, y: vec![rat(1, 3)], m: vec![int(2)], lambda: None };
        assert!(bad.validate().is_err());
        let bad = HarmonicParams { d: 2, y: vec![rat(2, 5), rat(3, 8)], m: vec![int(2), int(2)], lambda: None };
        assert!(bad.validate().is_err());
    }

    #[test]
    fn last_instance_cost_converges_monotonically() {
        let target = ineq3(2, &rat(1, 3)).unwrap();
        let gaps: Vec<Rational> = [1_000u64, 10_000, 100_000]
            .iter()
            .map(|&k| target.clone() - family_cost(InstanceFamily::Last, 2, k, None, &rat(1, 3), None).unwrap())
            .collect();
        assert!(gaps.iter().all(|g| g.is_positive()));
        assert!(gaps[0] < rat(1, 100) && gaps[2] < rat(1, 10_000));
        assert!(gaps[1] < gaps[0] && gaps[2] < gaps[1]);
    }

    #[test]
    fn lower_and_upper_costs_approach_their_inequalities() {
        let p = HarmonicParams { d: 2, y: vec![rat(2, 5)], m: vec![int(3)], lambda: None };
        let mut prev: Option<Rational> = None;
        for k in [60u64, 600, 6000, 60000] {
            let c1 = harmonic_instance_cost(InstanceFamily::Lower, k, &p, 1).unwrap();
            let gap = (ineq1(2, &int(3), &rat(1, 3)).unwrap() - &c1).abs();
            assert!(&gap * int(k as i64) < int(10), "K={k}");
            if let Some(g) = &prev {
                assert!(&gap < g);
            }
            prev = Some(gap);
            let c2 = harmonic_instance_cost(InstanceFamily::Upper, k, &p, 1).unwrap();
            let gap2 = (ineq2(2, &int(3), &rat(1, 3), &rat(2, 5)).unwrap() - c2).abs();
            assert!(&gap2 * int(k as i64) < int(10), "K={k}");
        }
    }

    #[test]
    fn infinite_m_drops_the_red_saving() {
        let huge = int(1_000_000_000);
        let p = HarmonicParams { d: 2, y: vec![rat(2, 5)], m: vec![huge.clone()], lambda: None };
        let c = harmonic_instance_cost(InstanceFamily::Lower, 6000, &p, 1).unwrap();
        let limit = ineq1(2, &huge, &rat(1, 3)).unwrap();
        assert!((c - limit).abs() < rat(1, 100));
    }
}
