//! Named polynomial families used by the benchmarks and the tightness
//! tests.

use num_bigint::BigInt;
use num_traits::One;

use crate::poly::{MultiPoly, Rational};

/// Sign of the constant term in the circle family.
///
/// `Plus` gives x1^2 + x2^2 + eps^2, whose real zero set is empty but whose
/// complex zeros still drive subdivision near the origin. `Minus` gives
/// x1^2 + x2^2 - eps^2, the circle of radius eps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CircleVariant {
    Plus,
    Minus,
}

/// The two-variable circle-family polynomial for the given variant.
pub fn circle_poly(variant: CircleVariant, eps: &Rational) -> MultiPoly {
    let eps2 = eps * eps;
    let c = match variant {
        CircleVariant::Plus => eps2,
        CircleVariant::Minus => -eps2,
    };
    MultiPoly::from_terms(
        2,
        [
            (alloc::vec![2, 0], Rational::one()),
            (alloc::vec![0, 2], Rational::one()),
            (alloc::vec![0, 0], c),
        ],
    )
}

/// Product of two unit circles centered at (3, 0) and (-3, 0), expanded.
pub fn two_circles() -> MultiPoly {
    let left = MultiPoly::parse("x1^2 - 6x1 + x2^2 + 8", 2).unwrap();
    let right = MultiPoly::parse("x1^2 + 6x1 + x2^2 + 8", 2).unwrap();
    left.mul(&right)
}

/// Root-cluster product (x1^d - 2(a x1 - 1)^2)(x1^d - (a x1 - 1)^2) as a
/// two-variable polynomial. Its roots include three reals within a^(-d/2-1)
/// of 1/a, forcing deep subdivision along that vertical strip.
pub fn mignotte_product(a: u32, d: u32) -> MultiPoly {
    assert!(a >= 2 && d >= 3);
    let ai = Rational::from_integer(BigInt::from(a));
    // (a x1 - 1)^2 = a^2 x1^2 - 2a x1 + 1
    let sq = MultiPoly::from_terms(
        2,
        [
            (alloc::vec![2, 0], &ai * &ai),
            (alloc::vec![1, 0], Rational::from_integer(BigInt::from(-2i64 * a as i64))),
            (alloc::vec![0, 0], Rational::one()),
        ],
    );
    let xd = MultiPoly::from_terms(2, [(alloc::vec![d, 0], Rational::one())]);
    let p = xd.sub(&sq.scale(&Rational::from_integer(2.into())));
    let p2 = xd.sub(&sq);
    p.mul(&p2)
}

/// x1^a1 x2^a2 - c in two variables. With c = eps^(a1+a2) the zero set is a
/// pair of branches sharing the coordinate axes as asymptotes, the family
/// with provably exponential region counts.
pub fn asymptote_poly(a1: u32, a2: u32, c: &Rational) -> MultiPoly {
    assert!(a1 >= 1 && a2 >= 1);
    MultiPoly::from_terms(2, [(alloc::vec![a1, a2], Rational::one()), (alloc::vec![0, 0], -c)])
}
