//! First-order infinitesimal sizes `base + a·ε + b·δ`.

use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use super::rational::{format_rational, int, parse_rational, Rational};
use super::NumError;

/// Outcome of comparing two perturbed sizes for all sufficiently small ε, δ > 0.
///
/// `Ambiguous` arises when the bases agree and the ε and δ coefficients pull in opposite
/// directions; the relative magnitude of ε and δ is never fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LexOrdering {
    Less,
    Equal,
    Greater,
    Ambiguous,
}

impl LexOrdering {
    pub fn is_le(self) -> Option<bool> {
        match self {
            LexOrdering::Less | LexOrdering::Equal => Some(true),
            LexOrdering::Greater => Some(false),
            LexOrdering::Ambiguous => None,
        }
    }

    pub fn is_lt(self) -> Option<bool> {
        match self {
            LexOrdering::Less => Some(true),
            LexOrdering::Equal | LexOrdering::Greater => Some(false),
            LexOrdering::Ambiguous => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct PerturbedSize {
    pub base: Rational,
    pub eps: Rational,
    pub del: Rational,
}

impl PerturbedSize {
    pub fn new(base: Rational, eps: Rational, del: Rational) -> Self {
        PerturbedSize { base, eps, del }
    }

    pub fn exact(base: Rational) -> Self {
        PerturbedSize { base, eps: Rational::zero(), del: Rational::zero() }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::exact(Rational::one())
    }

    pub fn is_zero(&self) -> bool {
        self.base.is_zero() && self.eps.is_zero() && self.del.is_zero()
    }

    pub fn is_unperturbed(&self) -> bool {
        self.eps.is_zero() && self.del.is_zero()
    }

    pub fn lex_cmp(&self, other: &PerturbedSize) -> LexOrdering {
        use std::cmp::Ordering::*;
        match self.base.cmp(&other.base) {
            Less => return LexOrdering::Less,
            Greater => return LexOrdering::Greater,
            Equal => {}
        }
        let de = &self.eps - &other.eps;
        let dd = &self.del - &other.del;
        let sign = |r: &Rational| -> i8 {
            if r.is_positive() {
                1
            } else if r.is_negative() {
                -1
            } else {
                0
            }
        };
        match (sign(&de), sign(&dd)) {
            (0, 0) => LexOrdering::Equal,
            (1, s) | (s, 1) if s >= 0 => LexOrdering::Greater,
            (-1, s) | (s, -1) if s <= 0 => LexOrdering::Less,
            _ => LexOrdering::Ambiguous,
        }
    }

    /// `self ≤ other`, failing on an ambiguous comparison.
    pub fn le(&self, other: &PerturbedSize) -> Result<bool, NumError> {
        self.lex_cmp(other).is_le().ok_or_else(|| ambiguous(self, other))
    }

    pub fn lt(&self, other: &PerturbedSize) -> Result<bool, NumError> {
        self.lex_cmp(other).is_lt().ok_or_else(|| ambiguous(self, other))
    }

    pub fn scale(&self, k: &Rational) -> PerturbedSize {
        PerturbedSize { base: &self.base * k, eps: &self.eps * k, del: &self.del * k }
    }

    pub fn times(&self, k: i64) -> PerturbedSize {
        self.scale(&int(k))
    }

    /// Largest integer `c ≥ 0` with `c · self ≤ bound`, for a strictly positive size.
    pub fn max_multiple_within(&self, bound: &PerturbedSize) -> Result<u64, NumError> {
        if self.le(&PerturbedSize::zero())? {
            return Err(NumError::Domain(format!("size {self} is not positive")));
        }
        let guess = (&bound.base / &self.base).floor().to_integer();
        let mut c: BigInt = guess.max(BigInt::zero()) + 1;
        while c > BigInt::zero() {
            let m = self.scale(&Rational::from_integer(c.clone()));
            if m.le(bound)? {
                break;
            }
            c -= 1;
        }
        u64::try_from(c).map_err(|_| NumError::Domain("multiple count overflow".into()))
    }

    /// `floor(self)` for sufficiently small infinitesimals.
    pub fn floor(&self) -> Result<BigInt, NumError> {
        let f = self.base.floor();
        if self.base != f {
            return Ok(f.to_integer());
        }
        let frac = PerturbedSize::new(Rational::zero(), self.eps.clone(), self.del.clone());
        match frac.lex_cmp(&PerturbedSize::zero()) {
            LexOrdering::Less => Ok(f.to_integer() - 1),
            LexOrdering::Equal | LexOrdering::Greater => Ok(f.to_integer()),
            LexOrdering::Ambiguous => Err(ambiguous(self, &PerturbedSize::exact(f))),
        }
    }

    pub fn is_integer(&self) -> bool {
        self.is_unperturbed() && self.base.is_integer()
    }
}

fn ambiguous(a: &PerturbedSize, b: &PerturbedSize) -> NumError {
    NumError::Ambiguous(format!("{a} vs {b}"))
}

pub fn lex_compare(a: &PerturbedSize, b: &PerturbedSize) -> LexOrdering {
    a.lex_cmp(b)
}

impl Add for &PerturbedSize {
    type Output = PerturbedSize;
    fn add(self, rhs: &PerturbedSize) -> PerturbedSize {
        PerturbedSize {
            base: &self.base + &rhs.base,
            eps: &self.eps + &rhs.eps,
            del: &self.del + &rhs.del,
        }
    }
}

impl Add for PerturbedSize {
    type Output = PerturbedSize;
    fn add(self, rhs: PerturbedSize) -> PerturbedSize {
        &self + &rhs
    }
}

impl AddAssign<&PerturbedSize> for PerturbedSize {
    fn add_assign(&mut self, rhs: &PerturbedSize) {
        self.base += &rhs.base;
        self.eps += &rhs.eps;
        self.del += &rhs.del;
    }
}

impl Sub for &PerturbedSize {
    type Output = PerturbedSize;
    fn sub(self, rhs: &PerturbedSize) -> PerturbedSize {
        PerturbedSize {
            base: &self.base - &rhs.base,
            eps: &self.eps - &rhs.eps,
            del: &self.del - &rhs.del,
        }
    }
}

impl Sub for PerturbedSize {
    type Output = PerturbedSize;
    fn sub(self, rhs: PerturbedSize) -> PerturbedSize {
        &self - &rhs
    }
}

impl Neg for &PerturbedSize {
    type Output = PerturbedSize;
    fn neg(self) -> PerturbedSize {
        PerturbedSize { base: -&self.base, eps: -&self.eps, del: -&self.del }
    }
}

impl Mul<i64> for &PerturbedSize {
    type Output = PerturbedSize;
    fn mul(self, k: i64) -> PerturbedSize {
        self.times(k)
    }
}

impl fmt::Display for PerturbedSize {
    /// `p/q`, `p/q + (a/b)e`, `p/q - (a/b)e + (c/d)d`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", format_rational(&self.base))?;
        for (coef, sym) in [(&self.eps, 'e'), (&self.del, 'd')] {
            if coef.is_zero() {
                continue;
            }
            let op = if coef.is_negative() { '-' } else { '+' };
            if coef.abs().is_one() {
                write!(f, " {op} {sym}")?;
            } else {
                write!(f, " {op} ({}){sym}", format_rational(&coef.abs()))?;
            }
        }
        Ok(())
    }
}

impl FromStr for PerturbedSize {
    type Err = NumError;

    /// Accepts a signed sum of terms; each term is a rational, optionally followed by `e`
    /// or `d` (the coefficient may be parenthesised or omitted), e.g. `1/4 - 300d`,
    /// `1/105 + (1/105)e`, `1/420 - e`.
    fn from_str(s: &str) -> Result<Self, NumError> {
        let mut out = PerturbedSize::zero();
        let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
        if chars.is_empty() {
            return Err(NumError::Parse("empty size".into()));
        }
        let mut i = 0;
        let mut first = true;
        while i < chars.len() {
            let mut negative = false;
            match chars[i] {
                '+' => i += 1,
                '-' => {
                    negative = true;
                    i += 1
                }
                _ if first => {}
                c => return Err(NumError::Parse(format!("expected '+' or '-' at {c:?} in {s:?}"))),
            }
            first = false;
            let coef_text: String = if i < chars.len() && chars[i] == '(' {
                let close = chars[i..]
                    .iter()
                    .position(|&c| c == ')')
                    .ok_or_else(|| NumError::Parse(format!("unbalanced parenthesis in {s:?}")))?;
                let t = chars[i + 1..i + close].iter().collect();
                i += close + 1;
                t
            } else {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '/' || chars[i] == '.') {
                    i += 1;
                }
                chars[start..i].iter().collect()
            };
            let coef = if coef_text.is_empty() { Rational::one() } else { parse_rational(&coef_text)? };
            let coef = if negative { -coef } else { coef };
            match chars.get(i) {
                Some('e') => {
                    out.eps += coef;
                    i += 1;
                }
                Some('d') => {
                    out.del += coef;
                    i += 1;
                }
                _ if coef_text.is_empty() => {
                    return Err(NumError::Parse(format!("dangling sign in {s:?}")));
                }
                _ => out.base += coef,
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactnum::rational::rat;

    fn p(s: &str) -> PerturbedSize {
        s.parse().unwrap()
    }

    #[test]
    fn positive_infinitesimal_is_greater() {
        assert_eq!(p("1/2 + (1/2)e").lex_cmp(&p("1/2")), LexOrdering::Greater);
    }

    #[test]
    fn sand_multiple_below_next_type() {
        let s1 = p("1/420 - e");
        let s2 = p("1/105 + (1/105)e");
        assert_eq!(s1.times(4).lex_cmp(&s2), LexOrdering::Less);
        assert_eq!(p("1/105 - 4e").lex_cmp(&s2), LexOrdering::Less);
    }

    #[test]
    fn opposite_infinitesimals_are_ambiguous() {
        assert_eq!(p("e - d").lex_cmp(&PerturbedSize::zero()), LexOrdering::Ambiguous);
        assert!(p("e - d").le(&PerturbedSize::zero()).is_err());
    }

    #[test]
    fn same_sign_mixed_infinitesimals_decide() {
        assert_eq!(p("e + 2d").lex_cmp(&PerturbedSize::zero()), LexOrdering::Greater);
        assert_eq!(p("-e - d").lex_cmp(&PerturbedSize::zero()), LexOrdering::Less);
        assert_eq!(p("-e").lex_cmp(&PerturbedSize::zero()), LexOrdering::Less);
    }

    #[test]
    fn parse_display_forms() {
        let a = p("1/4 - 300d");
        assert_eq!(a.base, rat(1, 4));
        assert_eq!(a.del, rat(-300, 1));
        assert_eq!(a.to_string(), "1/4 - (300)d");
        assert_eq!(p("1/6-2e").eps, rat(-2, 1));
        assert_eq!(p("(1/21)e + 1/21").to_string(), "1/21 + (1/21)e");
        assert!("1/4 +".parse::<PerturbedSize>().is_err());
        assert!("1/4 x".parse::<PerturbedSize>().is_err());
    }

    #[test]
    fn max_multiple_and_floor() {
        let unit = p("1/420 + (1/420)e");
        assert_eq!(unit.times(20).max_multiple_within(&PerturbedSize::one()).unwrap(), 20);
        assert_eq!(unit.times(4).max_multiple_within(&PerturbedSize::one()).unwrap(), 104);
        assert_eq!(p("1/420 - e").max_multiple_within(&PerturbedSize::one()).unwrap(), 420);
        assert_eq!(p("3 - e").floor().unwrap(), BigInt::from(2));
        assert_eq!(p("3 + e").floor().unwrap(), BigInt::from(3));
        assert_eq!(p("5/2 - e").floor().unwrap(), BigInt::from(2));
    }
}
