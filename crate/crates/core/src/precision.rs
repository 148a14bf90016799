//! Error-free transformations and the split lift representation used for
//! long orbits.

use serde::{Deserialize, Serialize};

/// Machine epsilon of the working precision.
pub const EPS: f64 = f64::EPSILON;

/// Interval lengths below this are treated as precision exhaustion.
pub const PRECISION_CUTOFF: f64 = 1.0e3 * EPS;

#[inline]
pub fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
pub fn fast_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
pub fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Unevaluated sum `hi + lo` with `|lo| <= ulp(hi)/2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DoubleDouble {
    pub hi: f64,
    pub lo: f64,
}

impl DoubleDouble {
    pub fn new(hi: f64, lo: f64) -> Self {
        let (hi, lo) = fast_two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    pub fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Compensated accumulator (Neumaier variant).
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, x: f64) {
        let (s, e) = two_sum(self.sum, x);
        self.sum = s;
        self.comp += e;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Leading and trailing parts of the running sum.
    pub fn parts(&self) -> (f64, f64) {
        fast_two_sum(self.sum, self.comp)
    }
}

impl FromIterator<f64> for CompensatedSum {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

pub fn compensated_sum<I: IntoIterator<Item = f64>>(iter: I) -> f64 {
    iter.into_iter().collect::<CompensatedSum>().value()
}

/// A point of the real line stored as an exact integer number of turns plus
/// a fractional part in `[0, 1)`, with a trailing correction term.
///
/// Orbits are advanced in this form so that the lift never loses absolute
/// precision as the integer part grows.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lift {
    pub turns: i64,
    pub frac: f64,
    pub carry: f64,
}

impl Lift {
    pub const ZERO: Lift = Lift { turns: 0, frac: 0.0, carry: 0.0 };

    pub fn from_f64(x: f64) -> Self {
        let t = x.floor();
        Self { turns: t as i64, frac: x - t, carry: 0.0 }
    }

    /// Builds a lift from an integer shift and a two-part real value, folding
    /// any whole turns of the real value into `turns`.
    pub fn normalized(turns: i64, hi: f64, lo: f64) -> Self {
        let t = hi.floor();
        let (mut frac, mut carry) = fast_two_sum(hi - t, lo);
        let mut turns = turns + t as i64;
        if frac >= 1.0 {
            frac -= 1.0;
            turns += 1;
        } else if frac < 0.0 {
            frac += 1.0;
            turns -= 1;
        }
        if frac >= 1.0 {
            // frac was within rounding of 1
            frac = 0.0;
            carry = 0.0;
            turns += 1;
        }
        Self { turns, frac, carry }
    }

    pub fn to_f64(self) -> f64 {
        self.turns as f64 + (self.frac + self.carry)
    }

    /// Position on the circle, in `[0, 1)`.
    pub fn circle(self) -> f64 {
        self.frac
    }

    /// `self - other - shift` evaluated without forming the large lift values.
    pub fn offset_from(self, other: Lift, shift: i64) -> f64 {
        let whole = (self.turns - other.turns - shift) as f64;
        whole + (self.frac - other.frac) + (self.carry - other.carry)
    }
}

/// Signed circle displacement of `x` reduced to `(-1/2, 1/2]`.
pub fn circle_signed(x: f64) -> f64 {
    let mut r = x - x.round();
    if r <= -0.5 {
        r += 1.0;
    }
    r
}

/// Distance from `x` to the nearest integer.
pub fn circle_norm(x: f64) -> f64 {
    (x - x.round()).abs()
}

/// Units in the last place of `x`.
pub fn ulp(x: f64) -> f64 {
    let x = x.abs();
    if x == 0.0 {
        return f64::MIN_POSITIVE;
    }
    let next = f64::from_bits(x.to_bits() + 1);
    next - x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_is_exact() {
        let (s, e) = two_sum(1.0, 1e-20);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-20);
    }

    #[test]
    fn two_prod_recovers_rounding() {
        let a = 0.1;
        let b = 3.0;
        let (p, e) = two_prod(a, b);
        assert_ne!(e, 0.0);
        assert_eq!(p, 0.30000000000000004);
        assert_eq!(e, -2.7755575615628914e-17);
    }

    #[test]
    fn lift_normalization() {
        let l = Lift::normalized(3, 1.25, 0.0);
        assert_eq!(l.turns, 4);
        assert_eq!(l.frac, 0.25);
        let l = Lift::normalized(0, -0.25, 0.0);
        assert_eq!(l.turns, -1);
        assert_eq!(l.frac, 0.75);
        assert_eq!(Lift::from_f64(-0.25).to_f64(), -0.25);
    }

    #[test]
    fn lift_offset_keeps_small_differences() {
        let a = Lift { turns: 1_000_000, frac: 0.5, carry: 0.0 };
        let b = Lift { turns: 999_000, frac: 0.5 - 1e-15, carry: 0.0 };
        let d = a.offset_from(b, 1000);
        assert_eq!(d, 0.5 - b.frac);
        assert!((d - 1e-15).abs() < 1e-16);
    }

    #[test]
    fn compensated_sum_beats_naive() {
        let xs = std::iter::once(1.0).chain(std::iter::repeat_n(1e-16, 10_000));
        let s = compensated_sum(xs);
        assert!((s - (1.0 + 1e-12)).abs() < 1e-20);
    }

    #[test]
    fn circle_helpers() {
        assert_eq!(circle_signed(0.75), -0.25);
        assert_eq!(circle_signed(0.5), 0.5);
        assert_eq!(circle_signed(-0.5), 0.5);
        assert!((circle_norm(2.9) - 0.1).abs() < 1e-15);
    }
}
