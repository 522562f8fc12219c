//! Exact dyadic numbers: `mantissa * 2^exponent`.
//!
//! Box coordinates produced by repeated halving stay dyadic forever, so the
//! engine never needs a gcd. Canonical form keeps the mantissa zero or odd.

use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

/// Exact value `mantissa * 2^exp`, mantissa zero or odd.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Dyadic {
    mantissa: BigInt,
    exp: i64,
}

impl Dyadic {
    /// Builds and canonicalizes.
    pub fn new(mantissa: BigInt, exp: i64) -> Self {
        let mut d = Dyadic { mantissa, exp };
        d.normalize();
        d
    }

    fn normalize(&mut self) {
        if self.mantissa.is_zero() {
            self.exp = 0;
            return;
        }
        let tz = self.mantissa.trailing_zeros().unwrap_or(0);
        if tz > 0 {
            self.mantissa >>= tz;
            self.exp += tz as i64;
        }
    }

    pub fn zero() -> Self {
        Dyadic { mantissa: BigInt::zero(), exp: 0 }
    }

    pub fn one() -> Self {
        Dyadic { mantissa: BigInt::one(), exp: 0 }
    }

    pub fn from_int(v: i64) -> Self {
        Dyadic::new(BigInt::from(v), 0)
    }

    /// `1 * 2^exp`.
    pub fn pow2(exp: i64) -> Self {
        Dyadic { mantissa: BigInt::one(), exp }
    }

    pub fn mantissa(&self) -> &BigInt {
        &self.mantissa
    }

    pub fn exp(&self) -> i64 {
        self.exp
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.mantissa.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.mantissa.is_negative()
    }

    pub fn abs(&self) -> Self {
        Dyadic { mantissa: self.mantissa.abs(), exp: self.exp }
    }

    /// Exact halving; stays canonical.
    pub fn halve(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mantissa: self.mantissa.clone(), exp: self.exp - 1 }
    }

    pub fn double(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mantissa: self.mantissa.clone(), exp: self.exp + 1 }
    }

    /// Multiplies by `2^k`.
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        Dyadic { mantissa: self.mantissa.clone(), exp: self.exp + k }
    }

    /// Exact integer power (exponent ≥ 0).
    pub fn pow(&self, e: u32) -> Self {
        Dyadic::new(self.mantissa.pow(e), self.exp * e as i64)
    }

    pub fn to_rational(&self) -> BigRational {
        if self.exp >= 0 {
            BigRational::from_integer(&self.mantissa << self.exp as usize)
        } else {
            BigRational::new(self.mantissa.clone(), BigInt::one() << (-self.exp) as usize)
        }
    }

    /// Exact conversion when the reduced denominator is a power of two.
    pub fn from_rational(q: &BigRational) -> Option<Self> {
        let den = q.denom();
        if den.is_one() {
            return Some(Dyadic::new(q.numer().clone(), 0));
        }
        let bits = den.bits();
        // power of two iff a single set bit
        if den.trailing_zeros() != Some(bits - 1) {
            return None;
        }
        Some(Dyadic::new(q.numer().clone(), -((bits - 1) as i64)))
    }

    /// Largest dyadic with exponent ≥ -prec_bits that is ≤ q.
    pub fn floor_of_rational(q: &BigRational, prec_bits: u32) -> Self {
        let scaled = q * BigRational::from_integer(BigInt::one() << prec_bits as usize);
        Dyadic::new(scaled.floor().to_integer(), -(prec_bits as i64))
    }

    /// Bit-size of the mantissa (0 for zero).
    pub fn bitsize(&self) -> u64 {
        self.mantissa.bits()
    }

    /// Nearest f64, for reporting only.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.mantissa.bits() as i64;
        // keep the top 53 bits so the mantissa conversion cannot overflow
        let drop = (bits - 53).max(0);
        let top = (&self.mantissa >> drop as usize).to_f64().unwrap_or(f64::NAN);
        let e = self.exp + drop;
        if (-1020..=1020).contains(&e) {
            top * Float::powi(2.0_f64, e as i32)
        } else {
            // split the scaling to dodge intermediate overflow
            top * Float::powi(2.0_f64, (e / 2) as i32) * Float::powi(2.0_f64, (e - e / 2) as i32)
        }
    }

    pub fn cmp_value(&self, other: &Dyadic) -> Ordering {
        let (ls, rs) = (self.mantissa.sign(), other.mantissa.sign());
        if ls != rs {
            return ls.cmp(&rs);
        }
        let e = self.exp.min(other.exp);
        let a = &self.mantissa << (self.exp - e) as usize;
        let b = &other.mantissa << (other.exp - e) as usize;
        a.cmp(&b)
    }

    /// Parses `m*2^e`, `m`, `m/d` (d a power of two), or `m/2^k`.
    pub fn parse(text: &str) -> Result<Self, DyadicParseError> {
        let t: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let err = || DyadicParseError { input: String::from(text) };
        if let Some((m, e)) = t.split_once("*2^") {
            let mantissa: BigInt = m.parse().map_err(|_| err())?;
            let exp: i64 = e.parse().map_err(|_| err())?;
            return Ok(Dyadic::new(mantissa, exp));
        }
        if let Some((m, d)) = t.split_once('/') {
            let mantissa: BigInt = m.parse().map_err(|_| err())?;
            let den: BigInt = if let Some(k) = d.strip_prefix("2^") {
                BigInt::one() << k.parse::<u32>().map_err(|_| err())? as usize
            } else {
                d.parse().map_err(|_| err())?
            };
            if den.is_zero() || den.is_negative() {
                return Err(err());
            }
            let q = BigRational::new(mantissa, den);
            return Dyadic::from_rational(&q).ok_or_else(err);
        }
        let mantissa: BigInt = t.parse().map_err(|_| err())?;
        Ok(Dyadic::new(mantissa, 0))
    }
}

/// Input not a dyadic literal.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DyadicParseError {
    pub input: String,
}

impl fmt::Display for DyadicParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "not a dyadic literal: {:?}", self.input)
    }
}

impl core::error::Error for DyadicParseError {}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*2^{}", self.mantissa, self.exp)
    }
}

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp_value(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        self.cmp_value(other)
    }
}

impl Add for &Dyadic {
    type Output = Dyadic;
    fn add(self, rhs: &Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        let e = self.exp.min(rhs.exp);
        let a = &self.mantissa << (self.exp - e) as usize;
        let b = &rhs.mantissa << (rhs.exp - e) as usize;
        Dyadic::new(a + b, e)
    }
}

impl Sub for &Dyadic {
    type Output = Dyadic;
    fn sub(self, rhs: &Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl Mul for &Dyadic {
    type Output = Dyadic;
    fn mul(self, rhs: &Dyadic) -> Dyadic {
        Dyadic::new(&self.mantissa * &rhs.mantissa, self.exp + rhs.exp)
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;
    fn neg(self) -> Dyadic {
        Dyadic { mantissa: -self.mantissa.clone(), exp: self.exp }
    }
}

/// Exact decimal rendering (dyadics are finite in base 10).
///
/// Used by the SVG emitter so output bytes are platform-independent.
pub fn to_decimal_string(d: &Dyadic) -> String {
    use alloc::string::ToString;
    if d.is_zero() {
        return String::from("0");
    }
    if d.exp() >= 0 {
        return (d.mantissa() << d.exp() as usize).to_string();
    }
    let k = (-d.exp()) as u32;
    // m / 2^k = m * 5^k / 10^k
    let scaled = d.mantissa() * BigInt::from(5u32).pow(k);
    let neg = scaled.is_negative();
    let digits = scaled.abs().to_string();
    let digits: Vec<char> = digits.chars().collect();
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    if digits.len() as u32 <= k {
        out.push_str("0.");
        for _ in 0..(k as usize - digits.len()) {
            out.push('0');
        }
        out.extend(digits.iter());
    } else {
        let split = digits.len() - k as usize;
        out.extend(digits[..split].iter());
        if k > 0 {
            out.push('.');
            out.extend(digits[split..].iter());
        }
    }
    // trim trailing zeros after the point
    if out.contains('.') {
        while out.ends_with('0') {
            out.pop();
        }
        if out.ends_with('.') {
            out.pop();
        }
    }
    out
}
