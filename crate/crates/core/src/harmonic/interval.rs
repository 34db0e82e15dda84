//! Rational intervals with dyadic outward rounding, for d-th roots and square roots.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::exactnum::{to_decimal, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub lo: Rational,
    pub hi: Rational,
}

impl Interval {
    pub fn point(v: Rational) -> Self {
        Interval { lo: v.clone(), hi: v }
    }

    pub fn new(lo: Rational, hi: Rational) -> Self {
        debug_assert!(lo <= hi);
        Interval { lo, hi }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn mid(&self) -> Rational {
        (&self.lo + &self.hi) / Rational::from_integer(2.into())
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", to_decimal(&self.lo, 15), to_decimal(&self.hi, 15))
    }
}

fn two_pow(bits: u32) -> BigInt {
    BigInt::one() << bits
}

pub fn round_down(r: &Rational, bits: u32) -> Rational {
    let s = two_pow(bits);
    Rational::new((r * Rational::from_integer(s.clone())).floor().to_integer(), s)
}

pub fn round_up(r: &Rational, bits: u32) -> Rational {
    let s = two_pow(bits);
    Rational::new((r * Rational::from_integer(s.clone())).ceil().to_integer(), s)
}

/// Exact `r^(1/d)` when numerator and denominator are perfect powers.
pub fn exact_root(r: &Rational, d: u32) -> Option<Rational> {
    if r.is_negative() {
        return None;
    }
    let n = r.numer().nth_root(d);
    let m = r.denom().nth_root(d);
    (num_traits::pow(n.clone(), d as usize) == *r.numer() && num_traits::pow(m.clone(), d as usize) == *r.denom())
        .then(|| Rational::new(n, m))
}

/// Enclosure of `r^(1/d)` for `r ≥ 0` with endpoints on the grid `2^-bits`.
pub fn root_interval(r: &Rational, d: u32, bits: u32) -> Interval {
    assert!(!r.is_negative(), "root of a negative number");
    if let Some(e) = exact_root(r, d) {
        return Interval::point(e);
    }
    let scaled = r * Rational::from_integer(num_traits::pow(two_pow(bits), d as usize));
    let lo_n = scaled.floor().to_integer().nth_root(d);
    let ceil = scaled.ceil().to_integer();
    let mut hi_n = ceil.nth_root(d);
    if num_traits::pow(hi_n.clone(), d as usize) < ceil {
        hi_n += 1;
    }
    let s = two_pow(bits);
    Interval::new(Rational::new(lo_n, s.clone()), Rational::new(hi_n, s))
}

/// `(p − √q) / r` with `r > 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Surd {
    pub p: BigInt,
    pub q: BigInt,
    pub r: BigInt,
}

impl Surd {
    pub fn enclose(&self, bits: u32) -> Interval {
        let s = root_interval(&Rational::from_integer(self.q.clone()), 2, bits);
        let p = Rational::from_integer(self.p.clone());
        let r = Rational::from_integer(self.r.clone());
        Interval::new((&p - &s.hi) / &r, (&p - &s.lo) / &r)
    }
}

impl fmt::Display for Surd {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} - sqrt({}))/{}", self.p, self.q, self.r)
    }
}

/// Smaller root of `a x² + b x + c` (`a > 0`, nonnegative discriminant) in lowest terms.
pub fn smaller_root(a: &BigInt, b: &BigInt, c: &BigInt) -> Option<Surd> {
    let disc = b * b - BigInt::from(4) * a * c;
    if disc.is_negative() || !a.is_positive() {
        return None;
    }
    // split disc = s² q with q squarefree
    let (mut s, mut q) = (BigInt::one(), disc.clone());
    let mut f = BigInt::from(2);
    while &f * &f <= q {
        let ff = &f * &f;
        while (&q % &ff).is_zero() {
            q /= &ff;
            s *= &f;
        }
        f += 1;
    }
    if q.is_one() || q.is_zero() {
        // rational root, still expressed as a surd with a perfect-square radicand
        q = disc.clone();
        s = BigInt::one();
    }
    let p = -b.clone();
    let r = BigInt::from(2) * a;
    let g = num_integer::Integer::gcd(&num_integer::Integer::gcd(&p, &s), &r);
    let (p, s, r) = (p / &g, s / &g, r / &g);
    Some(Surd { p, q: &s * &s * q, r })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::{int, rat};

    #[test]
    fn root_enclosures() {
        let i = root_interval(&int(2), 2, 60);
        assert!(&i.lo * &i.lo <= int(2) && &i.hi * &i.hi >= int(2));
        assert!(i.width() <= rat(1, 1 << 59));
        assert_eq!(root_interval(&rat(4, 9), 2, 60), Interval::point(rat(2, 3)));
        let c = root_interval(&rat(7, 3), 3, 80);
        assert!(crate::exactnum::rational::pow(&c.lo, 3) <= rat(7, 3));
        assert!(crate::exactnum::rational::pow(&c.hi, 3) >= rat(7, 3));
    }

    #[test]
    fn quadratic_roots_reduce() {
        let s = smaller_root(&27.into(), &(-394).into(), &84.into()).unwrap();
        assert_eq!((s.p, s.q, s.r), (197.into(), 36541.into(), 27.into()));
        let s = smaller_root(&27.into(), &(-529).into(), &50.into()).unwrap();
        assert_eq!((s.p, s.q, s.r), (529.into(), 274441.into(), 54.into()));
        // x² − 3x + 2 has root 1
        let s = smaller_root(&1.into(), &(-3).into(), &2.into()).unwrap();
        assert_eq!(s.enclose(40), Interval::point(int(1)));
    }
}
