//! Directed high-precision evaluation of the transcendental constants.
//!
//! Everything the width thresholds need reduces to ln(1 + 2^e) and square
//! roots of rationals. Both are produced as exact rational enclosures with a
//! proven direction, so a threshold can always be rounded toward the
//! conservative side.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::poly::Rational;

/// Two-sided rational enclosure: lo <= value <= hi.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosure {
    pub lo: Rational,
    pub hi: Rational,
}

impl Enclosure {
    pub fn point(v: Rational) -> Self {
        Enclosure { lo: v.clone(), hi: v }
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    /// Relative width (hi-lo)/lo; meaningful for positive enclosures.
    pub fn rel_width(&self) -> Rational {
        self.width() / &self.lo
    }

    /// Sum of positive or mixed enclosures.
    pub fn add(&self, rhs: &Enclosure) -> Enclosure {
        Enclosure { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }

    pub fn add_exact(&self, v: &Rational) -> Enclosure {
        Enclosure { lo: &self.lo + v, hi: &self.hi + v }
    }

    /// Product of nonnegative enclosures.
    pub fn mul_pos(&self, rhs: &Enclosure) -> Enclosure {
        debug_assert!(!self.lo.is_negative() && !rhs.lo.is_negative());
        Enclosure { lo: &self.lo * &rhs.lo, hi: &self.hi * &rhs.hi }
    }

    pub fn scale_pos(&self, v: &Rational) -> Enclosure {
        debug_assert!(!v.is_negative());
        Enclosure { lo: &self.lo * v, hi: &self.hi * v }
    }

    /// Quotient of positive enclosures.
    pub fn div_pos(&self, rhs: &Enclosure) -> Enclosure {
        debug_assert!(self.lo.is_positive() && rhs.lo.is_positive());
        Enclosure { lo: &self.lo / &rhs.hi, hi: &self.hi / &rhs.lo }
    }
}

/// Enclosure of ln(1 + 2^e) for e <= 0, with relative width below
/// 2^-prec_bits.
///
/// Uses ln(1+x) = 2 atanh(x/(2+x)); with x <= 1 the series argument is at
/// most 1/3, so terms shrink at least ninefold and the tail bound
/// y^(2N+1) / ((2N+1)(1-y^2)) is cheap and rigorous.
pub fn ln_one_plus_pow2(e: i64, prec_bits: u32) -> Enclosure {
    assert!(e <= 0, "argument regime is 2^e <= 1");
    let x = if e == 0 {
        Rational::one()
    } else {
        Rational::new(BigInt::one(), BigInt::one() << (-e) as usize)
    };
    let y = &x / (&x + Rational::from_integer(2.into()));
    let y2 = &y * &y;
    // lower bound on contraction: y <= 1/3 so each term shrinks by >= 9;
    // run until the tail bound is small enough relative to the head term y
    let mut sum = Rational::zero();
    let mut pow = y.clone(); // y^(2k+1)
    let mut k = 0u32;
    loop {
        sum += &pow / Rational::from_integer(BigInt::from(2 * k + 1));
        pow *= &y2;
        k += 1;
        let tail = &pow / Rational::from_integer(BigInt::from(2 * k + 1))
            / (Rational::one() - &y2);
        if &tail * Rational::from_integer(BigInt::one() << (prec_bits as usize + 2)) < y {
            let two = Rational::from_integer(2.into());
            let lo = &two * &sum;
            let hi = &two * (&sum + &tail);
            return Enclosure { lo, hi };
        }
        assert!(k < 10_000, "series failed to converge");
    }
}

/// Enclosure of sqrt(q) for q >= 0 with absolute error below
/// denominator-adjusted 2^-prec_bits.
pub fn sqrt_rational(q: &Rational, prec_bits: u32) -> Enclosure {
    assert!(!q.is_negative(), "sqrt of a negative rational");
    if q.is_zero() {
        return Enclosure::point(Rational::zero());
    }
    // sqrt(a/b) = sqrt(a b) / b; scale by 4^p for p bits of the root
    let p = prec_bits as usize + 1;
    let m = (q.numer() * q.denom()) << (2 * p);
    let r = m.sqrt(); // floor square root
    let den = Rational::from_integer(q.denom() << p);
    let lo = Rational::from_integer(r.clone()) / &den;
    let hi = Rational::from_integer(r + BigInt::one()) / den;
    debug_assert!(&lo * &lo <= *q && *q <= &hi * &hi);
    Enclosure { lo, hi }
}

/// Enclosure of sqrt(k) for an integer k >= 0.
pub fn sqrt_integer(k: u64, prec_bits: u32) -> Enclosure {
    sqrt_rational(&Rational::from_integer(BigInt::from(k)), prec_bits)
}

/// Largest f64 that is <= q (directed conversion verified exactly).
pub fn f64_lower(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    let mut v = q.to_f64().unwrap_or(0.0);
    if v.is_nan() {
        v = 0.0;
    }
    if !v.is_finite() {
        return if v > 0.0 { f64::MAX } else { f64::MIN };
    }
    // to_f64 is close but not directed; walk ulps until provably below
    for _ in 0..64 {
        match Rational::from_float(v) {
            Some(vr) if vr <= *q => return v,
            _ => v = v.next_down(),
        }
    }
    panic!("directed f64 conversion failed to land below the target");
}

/// Smallest f64 that is >= q.
pub fn f64_upper(q: &Rational) -> f64 {
    -f64_lower(&-q.clone())
}
