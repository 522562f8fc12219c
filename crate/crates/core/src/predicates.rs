//! Exclusion and gradient-alignment predicates with their sufficiency
//! constants.
//!
//! C0 excludes the variety from a cube; C1 certifies that no two gradients
//! over the cube can be orthogonal (evaluated through the gradient pairing g
//! on the doubled cube). Both are exact rational tests. The diameter-distance
//! constants K0, K1 translate a complex distance to the variety into a width
//! at which the tests are guaranteed to fire.

use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::bounds::{ln_one_plus_pow2, sqrt_integer, Enclosure};
use crate::interval::{centered_form, centered_form_doubled, Cube, IntervalR};
use crate::poly::{MultiPoly, Rational};

/// True iff 0 is outside the centered-form enclosure of f on J; sound
/// exclusion of the real zero set from J.
pub fn c0_test(f: &MultiPoly, j: &Cube) -> (bool, IntervalR) {
    let enc = centered_form(f, j);
    (!enc.contains_zero(), enc)
}

/// True iff 0 is outside the centered-form enclosure of the gradient
/// pairing g on J x J. Requires g = gradient_pair(f).
pub fn c1_test(g: &MultiPoly, j: &Cube) -> (bool, IntervalR) {
    let enc = centered_form_doubled(g, j);
    (!enc.contains_zero(), enc)
}

/// The normalized inequality form of the C1 test, evaluated without ever
/// constructing the 2n-variable pairing: shifts each partial derivative of f
/// to the midpoint and sums the paired coefficient products directly.
///
/// Returns false when the gradient vanishes at the midpoint (the normalized
/// form is undefined there, and the enclosure route necessarily fails too).
/// Agrees with `c1_test` everywhere.
pub fn c1_inequality_direct(f: &MultiPoly, j: &Cube) -> bool {
    assert_eq!(f.nvars(), j.nvars(), "dimension mismatch");
    let n = f.nvars();
    let shifted_partials: Vec<MultiPoly> =
        (0..n).map(|i| f.partial_derivative(i).taylor_shift(j.center())).collect();
    let zero_key = alloc::vec![0u32; n];
    let grad_norm2: Rational = shifted_partials.iter().map(|u| {
        let c = u.coeff(&zero_key);
        &c * &c
    }).sum();
    if grad_norm2.is_zero() {
        return false;
    }
    // paired coefficients: value(alpha, beta) = sum_i u_i[alpha] u_i[beta];
    // the factorials of the printed inequality cancel against the shifted
    // coefficients, which already carry 1/alpha!
    let mut paired: alloc::collections::BTreeMap<(Vec<u32>, Vec<u32>), Rational> =
        alloc::collections::BTreeMap::new();
    for u in &shifted_partials {
        for (ka, ca) in u.terms() {
            for (kb, cb) in u.terms() {
                let e = paired.entry((ka.clone(), kb.clone())).or_insert_with(Rational::zero);
                *e += ca * cb;
            }
        }
    }
    let hw = j.halfwidth().to_rational();
    let mut sum = Rational::zero();
    for ((ka, kb), v) in &paired {
        let total: u32 = ka.iter().chain(kb).sum();
        if total == 0 {
            continue;
        }
        let mut pw = Rational::one();
        for _ in 0..total {
            pw *= &hw;
        }
        sum += v.abs() * pw;
    }
    sum < grad_norm2
}

/// Which test accepted a cube, if any.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PredicateTag {
    C0,
    C1,
    Neither,
}

impl fmt::Display for PredicateTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PredicateTag::C0 => write!(f, "C0"),
            PredicateTag::C1 => write!(f, "C1"),
            PredicateTag::Neither => write!(f, "NEITHER"),
        }
    }
}

/// Outcome of the short-circuit C0-then-C1 evaluation. `enclosure1` is
/// absent when C0 already accepted.
#[derive(Clone, Debug)]
pub struct PredicateOutcome {
    pub tag: PredicateTag,
    pub enclosure0: IntervalR,
    pub enclosure1: Option<IntervalR>,
}

/// Runs C0 first, then C1 on failure. Requires g = gradient_pair(f).
pub fn evaluate_pv(f: &MultiPoly, g: &MultiPoly, j: &Cube) -> PredicateOutcome {
    let (ok0, enc0) = c0_test(f, j);
    if ok0 {
        return PredicateOutcome { tag: PredicateTag::C0, enclosure0: enc0, enclosure1: None };
    }
    let (ok1, enc1) = c1_test(g, j);
    let tag = if ok1 { PredicateTag::C1 } else { PredicateTag::Neither };
    PredicateOutcome { tag, enclosure0: enc0, enclosure1: Some(enc1) }
}

/// Diameter-distance constants for dimension n and degree d.
///
/// All three values are rational lower bounds within a relative 2^-40 of the
/// true constants (well past 30 significant bits), rounded down so that
/// sufficiency claims are never overstated. For d >= 2 both lie in (0, 1).
/// For d = 1 the degree term of K1's denominator vanishes and the raw value
/// is sqrt(2); the C1 test is unconditionally true there (the pairing of a
/// degree-1 polynomial is a positive constant), so K1 never gates anything.
#[derive(Clone, Debug)]
pub struct PredicateConstants {
    pub n: u32,
    pub d: u32,
    pub k0: Rational,
    pub k1: Rational,
    pub k: Rational,
}

/// Enclosure of K0(n, d) = 2 sqrt(n) L / (2^n d + sqrt(n) L) with
/// L = ln(1 + 2^(2-2n)).
pub fn k0_enclosure(n: u32, d: u32, prec_bits: u32) -> Enclosure {
    let l = ln_one_plus_pow2(2 - 2 * n as i64, prec_bits);
    let sn = sqrt_integer(n as u64, prec_bits);
    let t = sn.mul_pos(&l);
    let a = Rational::from_integer(BigInt::from(d) << n as usize);
    let two = Rational::from_integer(2.into());
    // 2t/(a+t) is increasing in t
    Enclosure {
        lo: &two * &t.lo / (&a + &t.lo),
        hi: &two * &t.hi / (&a + &t.hi),
    }
}

/// Enclosure of K1(n, d) = 2 sqrt(n) L' / (2^(2n+1)(d-1) + sqrt(2n) L')
/// with L' = ln(1 + 2^(2-4n)).
pub fn k1_enclosure(n: u32, d: u32, prec_bits: u32) -> Enclosure {
    let l = ln_one_plus_pow2(2 - 4 * n as i64, prec_bits);
    let sn = sqrt_integer(n as u64, prec_bits);
    let s2n = sqrt_integer(2 * n as u64, prec_bits);
    let b = Rational::from_integer(BigInt::from(d - 1) << (2 * n as usize + 1));
    let num = sn.mul_pos(&l).scale_pos(&Rational::from_integer(2.into()));
    let den = s2n.mul_pos(&l).add_exact(&b);
    num.div_pos(&den)
}

/// Enclosure of the C0 width threshold at dist = 1:
/// 2 L / (2^n d + sqrt(n) L).
pub fn unit_width_c0_enclosure(n: u32, d: u32, prec_bits: u32) -> Enclosure {
    let l = ln_one_plus_pow2(2 - 2 * n as i64, prec_bits);
    let sn = sqrt_integer(n as u64, prec_bits);
    let a = Rational::from_integer(BigInt::from(d) << n as usize);
    let num = l.scale_pos(&Rational::from_integer(2.into()));
    let den = sn.mul_pos(&l).add_exact(&a);
    num.div_pos(&den)
}

/// Enclosure of the C1 width threshold at dist = 1:
/// 2 L' / (2^(2n+1)(d-1) + sqrt(2n) L').
pub fn unit_width_c1_enclosure(n: u32, d: u32, prec_bits: u32) -> Enclosure {
    let l = ln_one_plus_pow2(2 - 4 * n as i64, prec_bits);
    let s2n = sqrt_integer(2 * n as u64, prec_bits);
    let b = Rational::from_integer(BigInt::from(d - 1) << (2 * n as usize + 1));
    let num = l.scale_pos(&Rational::from_integer(2.into()));
    let den = s2n.mul_pos(&l).add_exact(&b);
    num.div_pos(&den)
}

fn tighten<F: Fn(u32) -> Enclosure>(f: F) -> Enclosure {
    let target = Rational::new(BigInt::one(), BigInt::one() << 40);
    let mut prec = 48;
    loop {
        let e = f(prec);
        if e.rel_width() <= target {
            return e;
        }
        prec *= 2;
        assert!(prec <= 4096, "enclosure failed to tighten");
    }
}

/// K0, K1, K = min, as directed rational lower bounds.
pub fn predicate_constants(n: u32, d: u32) -> PredicateConstants {
    assert!(n >= 1 && d >= 1);
    let k0 = tighten(|p| k0_enclosure(n, d, p)).lo;
    let k1 = tighten(|p| k1_enclosure(n, d, p)).lo;
    let k = k0.clone().min(k1.clone());
    PredicateConstants { n, d, k0, k1, k }
}

/// Width threshold under which C0 must fire for any cube containing a point
/// at complex distance >= dist from the zero set. Rounded down.
pub fn sufficient_width_c0(n: u32, d: u32, dist: &Rational) -> Rational {
    assert!(dist.is_positive(), "dist must be positive");
    tighten(|p| unit_width_c0_enclosure(n, d, p)).lo * dist
}

/// Width threshold under which C1 must fire for any cube whose doubled
/// point (x, x) is at complex distance >= dist from the zero set of the
/// pairing. Rounded down.
pub fn sufficient_width_c1(n: u32, d: u32, dist: &Rational) -> Rational {
    assert!(dist.is_positive(), "dist must be positive");
    tighten(|p| unit_width_c1_enclosure(n, d, p)).lo * dist
}
