//! Classes B1 and B2: two bounds in the parameter `α`, one increasing and one decreasing,
//! balanced where they meet.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::interval::{smaller_root, Interval, Surd};
use super::{domain, BoundValue, HarmonicError};
use crate::exactnum::{rat, Rational};

/// `(a + bα) / (c + eα)` with integer coefficients.
#[derive(Clone, Copy)]
struct Ratio([i64; 2], [i64; 2]);

impl Ratio {
    fn at(&self, a: &Rational) -> Rational {
        let lin = |c: [i64; 2]| Rational::from_integer(c[0].into()) + Rational::from_integer(c[1].into()) * a;
        lin(self.0) / lin(self.1)
    }
}

fn mul(p: [i64; 2], q: [i64; 2]) -> [BigInt; 3] {
    [(p[0] * q[0]).into(), (p[0] * q[1] + p[1] * q[0]).into(), (p[1] * q[1]).into()]
}

/// Coefficients `(a, b, c)` of `aα² + bα + c = 0` from `f = g`, primitive with `a > 0`.
fn meeting_quadratic(f: Ratio, g: Ratio) -> [BigInt; 3] {
    let l = mul(f.0, g.1);
    let r = mul(g.0, f.1);
    let mut q: Vec<BigInt> = (0..3).rev().map(|i| &l[i] - &r[i]).collect();
    let g = q.iter().fold(BigInt::zero(), |acc, v| acc.gcd(v));
    let sign = if q[0].is_negative() { -1 } else { 1 };
    for v in q.iter_mut() {
        *v = &*v / &g * sign;
    }
    [q[0].clone(), q[1].clone(), q[2].clone()]
}

// (213−2α)/(9(12−α))
const EQ4: Ratio = Ratio([213, -2], [108, -9]);
// (26−9α)/12
const EQ5: Ratio = Ratio([26, -9], [12, 0]);
// (85+79α)/(9(5−α))
const EQ6: Ratio = Ratio([85, 79], [45, -9]);

fn check_alpha(alpha: &Rational) -> Result<(), HarmonicError> {
    if alpha.is_negative() || alpha > &rat(1, 1) {
        return Err(domain(format!("alpha = {alpha} outside [0, 1]")));
    }
    Ok(())
}

/// The two B1 bounds at `α`: the increasing one first.
pub fn b1_bounds(alpha: &Rational) -> Result<(Rational, Rational), HarmonicError> {
    check_alpha(alpha)?;
    Ok((EQ4.at(alpha), EQ5.at(alpha)))
}

/// The two B2 bounds at `α`: the increasing one first.
pub fn b2_bounds(alpha: &Rational) -> Result<(Rational, Rational), HarmonicError> {
    check_alpha(alpha)?;
    Ok((EQ6.at(alpha), EQ5.at(alpha)))
}

#[derive(Debug, Clone)]
pub struct BClassOptimum {
    /// `(a, b, c)` for `aα² + bα + c = 0`.
    pub quadratic: [BigInt; 3],
    /// The balancing `α` in closed form.
    pub surd: Surd,
    pub alpha: BoundValue,
    pub bound: BoundValue,
}

fn optimize(up: Ratio, down: Ratio, tol: &Rational) -> Result<BClassOptimum, HarmonicError> {
    let q = meeting_quadratic(up, down);
    let surd = smaller_root(&q[0], &q[1], &q[2]).ok_or_else(|| domain("bounds never meet"))?;
    let mut bits = 48;
    let alpha = loop {
        let a = surd.enclose(bits);
        if a.width() <= *tol {
            break a;
        }
        bits += 16;
    };
    check_alpha(&alpha.lo)?;
    check_alpha(&alpha.hi)?;
    // the decreasing bound brackets the common value
    let bound = Interval::new(down.at(&alpha.hi), down.at(&alpha.lo));
    Ok(BClassOptimum { quadratic: q, surd, alpha: BoundValue::enclosed(alpha), bound: BoundValue::enclosed(bound) })
}

pub fn b1_optimize(tol: &Rational) -> Result<BClassOptimum, HarmonicError> {
    optimize(EQ4, EQ5, tol)
}

pub fn b2_optimize(tol: &Rational) -> Result<BClassOptimum, HarmonicError> {
    optimize(EQ6, EQ5, tol)
}
