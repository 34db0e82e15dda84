//! The threshold recursion `y_{j−1} ↦ y_j` at a target ratio `R`, and the ratio at which
//! the chain `1/3 = y_0 < … < y_h` makes every inequality tight.

use num_traits::{One, Signed};

use super::interval::{root_interval, round_down, round_up, Interval};
use super::{domain, ineq3_poly, two_d, BoundValue, HarmonicError, HarmonicParams};
use crate::exactnum::rational::pow;
use crate::exactnum::{int, rat, Rational};

/// `3 − 2(2^d−1)/3^d − (2^d+1)/4^d`: the ratio at which the recursion fixes `y = 1/3`.
pub fn closed_form_bound(d: u32) -> Rational {
    let t = two_d(d);
    int(3) - int(2) * (&t - Rational::one()) / pow(&int(3), d) - (&t + Rational::one()) / pow(&int(4), d)
}

/// `(−2^d R + 2^d y^d − 4^d y^d − 1 + 3·2^d − 1/2^d) / (2^d−1)`. Decreasing in `y` and `R`.
fn radicand(d: u32, r: &Rational, y: &Rational) -> Rational {
    let t = two_d(d);
    let yd = pow(y, d);
    (-(&t * r) + &t * &yd - &t * &t * &yd - Rational::one() + int(3) * &t - t.recip()) / (&t - Rational::one())
}

/// `y_j = 1 − radicand^(1/d)`, exact when the root is rational (always for `d = 1`).
pub fn y_recursion(d: u32, r: &Rational, y_prev: &Rational, bits: u32) -> Result<BoundValue, HarmonicError> {
    let rad = radicand(d, r, y_prev);
    if !rad.is_positive() {
        return Err(domain(format!("radicand {rad} is not positive")));
    }
    let root = root_interval(&rad, d, bits);
    Ok(BoundValue::enclosed(Interval::new(Rational::one() - root.hi, Rational::one() - root.lo)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Sign {
    Pos,
    Neg,
    Unknown,
}

/// Encloses `y_1..y_h` at ratio `r`. `None` means the chain leaves the domain (R too large).
fn chain(d: u32, h: usize, r: &Rational, bits: u32) -> Option<Vec<Interval>> {
    let mut y = Interval::point(rat(1, 3));
    let mut out = Vec::with_capacity(h);
    for _ in 0..h {
        let rad_lo = radicand(d, r, &y.hi);
        let rad_hi = radicand(d, r, &y.lo);
        if !rad_hi.is_positive() {
            return None;
        }
        let lo_root = if rad_lo.is_positive() { root_interval(&rad_lo, d, bits).lo } else { Rational::default() };
        let hi_root = root_interval(&rad_hi, d, bits).hi;
        y = Interval::new(round_down(&(Rational::one() - hi_root), bits), round_up(&(Rational::one() - lo_root), bits));
        out.push(y.clone());
    }
    Some(out)
}

/// Sign of `ineq3(y_h(R)) − R`, which decreases in `R`.
fn gap_sign(d: u32, h: usize, r: &Rational, bits: u32) -> Sign {
    let Some(ys) = chain(d, h, r, bits) else { return Sign::Neg };
    let yh = ys.last().expect("h ≥ 1");
    if ineq3_poly(d, &yh.hi) > *r {
        Sign::Pos
    } else if ineq3_poly(d, &yh.lo) < *r {
        Sign::Neg
    } else {
        Sign::Unknown
    }
}

/// The equalized ratio for `h` thresholds with parameters that attain it.
#[derive(Debug, Clone)]
pub struct Equalized {
    pub h: usize,
    pub bound: BoundValue,
    /// Rational parameters taken at the centre of the enclosures.
    pub params: HarmonicParams,
}

/// `1/m_j = (1 − y_{h−j+1})^d − 1/2^d`.
fn equalizing_m(d: u32, y: &[Rational]) -> Vec<Rational> {
    let h = y.len();
    (1..=h).map(|j| (pow(&(Rational::one() - &y[h - j]), d) - two_d(d).recip()).recip()).collect()
}

fn params_at(d: u32, h: usize, r: &Rational, bits: u32) -> Result<HarmonicParams, HarmonicError> {
    let ys: Vec<Rational> = chain(d, h, r, bits)
        .ok_or_else(|| domain(format!("chain leaves the domain at R = {r}")))?
        .iter()
        .map(|i| i.mid())
        .collect();
    Ok(HarmonicParams { d, m: equalizing_m(d, &ys), y: ys, lambda: None })
}

/// Ratio `R_h` at which `y_0 = 1/3`, the recursion, and inequality (3) are all tight.
///
/// `R_h` decreases in `h` towards [`closed_form_bound`].
pub fn equalized(d: u32, h: usize, tol: &Rational) -> Result<Equalized, HarmonicError> {
    if d == 0 || h == 0 {
        return Err(domain("need d ≥ 1 and h ≥ 1"));
    }
    if d == 1 {
        // y_h and ineq3 are affine in R, so two evaluations give the root exactly
        let yh = |r: &Rational| -> Rational {
            let mut y = rat(1, 3);
            for _ in 0..h {
                y = Rational::one() - radicand(1, r, &y);
            }
            y
        };
        let (a, b) = (yh(&int(0)), yh(&int(1)) - yh(&int(0)));
        let r = (int(2) - a) / (b + Rational::one());
        let ys: Vec<Rational> = {
            let mut y = rat(1, 3);
            (0..h)
                .map(|_| {
                    y = Rational::one() - radicand(1, &r, &y);
                    y.clone()
                })
                .collect()
        };
        let params = HarmonicParams { d, m: equalizing_m(d, &ys), y: ys, lambda: None };
        return Ok(Equalized { h, bound: BoundValue::exact(r), params });
    }
    let mut lo = closed_form_bound(d);
    let mut hi = ineq3_poly(d, &rat(1, 3));
    let mut bits = 64 + 4 * h as u32;
    while gap_sign(d, h, &hi, bits) != Sign::Neg || gap_sign(d, h, &lo, bits) != Sign::Pos {
        bits *= 2;
        if bits > 4096 {
            return Err(domain("could not bracket the equalized ratio"));
        }
    }
    while &hi - &lo > *tol {
        let mid = round_down(&((&lo + &hi) / int(2)), bits);
        match gap_sign(d, h, &mid, bits) {
            Sign::Pos => lo = mid,
            Sign::Neg => hi = mid,
            Sign::Unknown => {
                bits *= 2;
                if bits > 4096 {
                    break;
                }
            }
        }
    }
    let mid = (&lo + &hi) / int(2);
    let params = params_at(d, h, &mid, bits)?;
    Ok(Equalized { h, bound: BoundValue::enclosed(Interval::new(lo, hi)), params })
}

/// `R_1, …, R_{h_max}` for dimension `d`. Numerical exploration only.
pub fn explore(d: u32, h_max: usize, tol: &Rational) -> Result<Vec<Equalized>, HarmonicError> {
    (1..=h_max).map(|h| equalized(d, h, tol)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::to_decimal;
    use crate::harmonic::{default_tolerance, harmonic_worst_case, worst_case_terms};

    #[test]
    fn closed_form_values() {
        assert_eq!(closed_form_bound(1), rat(19, 12));
        assert_eq!(closed_form_bound(2), rat(97, 48));
        let table = ["1.58333", "2.02083", "2.34085", "2.56322", "2.71262", "2.81129"];
        // the table truncates
        for (d, want) in (1..=6).zip(table) {
            let v = closed_form_bound(d);
            assert_eq!(to_decimal(&Rational::new((v * int(100_000)).floor().to_integer(), 100_000.into()), 5), want);
        }
        assert!(closed_form_bound(30) > rat(2999, 1000) && closed_form_bound(30) < int(3));
    }

    #[test]
    fn recursion_at_the_closed_form_fixes_one_third() {
        let y = y_recursion(1, &rat(19, 12), &rat(1, 3), 64).unwrap();
        assert_eq!(y.exact, Some(rat(1, 3)));
        let y = y_recursion(2, &rat(97, 48), &rat(1, 3), 64).unwrap();
        assert!(y.contains(&rat(1, 3)) && y.width() <= default_tolerance());
        let y = y_recursion(3, &closed_form_bound(3), &rat(1, 3), 64).unwrap();
        assert!(y.contains(&rat(1, 3)) && y.width() <= default_tolerance());
        assert!(y_recursion(2, &int(3), &rat(1, 3), 64).is_err());
    }

    #[test]
    fn recursion_increases_in_ratio() {
        let a = y_recursion(2, &rat(203, 100), &rat(1, 3), 80).unwrap();
        let b = y_recursion(2, &rat(204, 100), &rat(1, 3), 80).unwrap();
        assert!(a.hi() < b.lo() && a.lo() > &rat(1, 3));
    }

    #[test]
    fn one_dimension_is_exact() {
        assert_eq!(equalized(1, 1, &default_tolerance()).unwrap().bound.exact, Some(rat(29, 18)));
        let e = equalized(1, 3, &default_tolerance()).unwrap();
        let v = harmonic_worst_case(&e.params).unwrap().exact.unwrap();
        assert_eq!(Some(v.clone()), e.bound.exact);
        assert!(worst_case_terms(&e.params).unwrap().iter().all(|(_, t)| *t == v));
    }

    #[test]
    fn equalized_terms_agree() {
        for d in 1..=6 {
            let e = equalized(d, 1, &default_tolerance()).unwrap();
            assert!(e.bound.width() <= default_tolerance());
            let terms = worst_case_terms(&e.params).unwrap();
            for (label, t) in &terms {
                assert!((t - e.bound.mid()).abs() < rat(1, 1_000_000_000), "d={d} {label}");
            }
            assert!(e.bound.lo() > &closed_form_bound(d));
        }
    }

    #[test]
    fn ratios_decrease_towards_the_closed_form() {
        for d in [1, 2, 3] {
            let rs = explore(d, 8, &default_tolerance()).unwrap();
            for w in rs.windows(2) {
                assert!(w[1].bound.hi() < w[0].bound.lo(), "d={d}");
            }
            let gap = rs.last().unwrap().bound.lo() - closed_form_bound(d);
            assert!(gap.is_positive() && gap < rat(1, 100), "d={d}");
        }
    }
}
