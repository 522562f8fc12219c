//! Exact interval arithmetic and the standard centered form on n-cubes.
//!
//! The centered form is evaluated by Taylor-shifting f to the cube's
//! midpoint: the shifted coefficients are exactly the scaled derivatives the
//! remainder sum needs, so the enclosure is a pure rational computation.

use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::dyadic::Dyadic;
use crate::poly::{MultiPoly, Rational};

/// Closed interval with exact rational endpoints, lo <= hi.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalR {
    lo: Rational,
    hi: Rational,
}

impl IntervalR {
    pub fn new(lo: Rational, hi: Rational) -> Self {
        assert!(lo <= hi, "interval endpoints out of order");
        IntervalR { lo, hi }
    }

    pub fn point(v: Rational) -> Self {
        IntervalR { lo: v.clone(), hi: v }
    }

    pub fn lo(&self) -> &Rational {
        &self.lo
    }

    pub fn hi(&self) -> &Rational {
        &self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, v: &Rational) -> bool {
        &self.lo <= v && v <= &self.hi
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative()
    }

    pub fn subset_of(&self, other: &IntervalR) -> bool {
        other.lo <= self.lo && self.hi <= other.hi
    }

    pub fn add(&self, rhs: &IntervalR) -> IntervalR {
        IntervalR { lo: &self.lo + &rhs.lo, hi: &self.hi + &rhs.hi }
    }

    pub fn sub(&self, rhs: &IntervalR) -> IntervalR {
        self.add(&rhs.neg())
    }

    pub fn neg(&self) -> IntervalR {
        IntervalR { lo: -self.hi.clone(), hi: -self.lo.clone() }
    }

    /// Set-image product: min/max over the four endpoint products.
    pub fn mul(&self, rhs: &IntervalR) -> IntervalR {
        let products = [
            &self.lo * &rhs.lo,
            &self.lo * &rhs.hi,
            &self.hi * &rhs.lo,
            &self.hi * &rhs.hi,
        ];
        let lo = products.iter().min().unwrap().clone();
        let hi = products.iter().max().unwrap().clone();
        IntervalR { lo, hi }
    }

    pub fn add_scalar(&self, v: &Rational) -> IntervalR {
        IntervalR { lo: &self.lo + v, hi: &self.hi + v }
    }

    pub fn mul_scalar(&self, v: &Rational) -> IntervalR {
        match v.cmp(&Rational::zero()) {
            Ordering::Less => IntervalR { lo: &self.hi * v, hi: &self.lo * v },
            _ => IntervalR { lo: &self.lo * v, hi: &self.hi * v },
        }
    }
}

impl fmt::Display for IntervalR {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Axis-aligned n-cube: dyadic center and one dyadic halfwidth for all axes.
///
/// Width is 2*halfwidth; the diameter is sqrt(n) times the width and is
/// always carried as the exact pair (w, n), never a rounded root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cube {
    center: Vec<Dyadic>,
    halfwidth: Dyadic,
}

impl Cube {
    pub fn new(center: Vec<Dyadic>, halfwidth: Dyadic) -> Self {
        assert!(!center.is_empty(), "cube needs at least one axis");
        assert!(halfwidth.is_positive(), "halfwidth must be positive");
        Cube { center, halfwidth }
    }

    pub fn nvars(&self) -> usize {
        self.center.len()
    }

    pub fn center(&self) -> &[Dyadic] {
        &self.center
    }

    pub fn halfwidth(&self) -> &Dyadic {
        &self.halfwidth
    }

    pub fn width(&self) -> Dyadic {
        self.halfwidth.double()
    }

    /// Exact measure w^n.
    pub fn measure(&self) -> Dyadic {
        self.width().pow(self.nvars() as u32)
    }

    pub fn contains(&self, p: &[Rational]) -> bool {
        assert_eq!(p.len(), self.nvars(), "dimension mismatch");
        let hw = self.halfwidth.to_rational();
        self.center.iter().zip(p).all(|(c, x)| (x - c.to_rational()).abs() <= hw)
    }

    /// The 2^n corner points (exact dyadics), in axis-bit order.
    pub fn corners(&self) -> Vec<Vec<Dyadic>> {
        let n = self.nvars();
        let mut out = Vec::with_capacity(1 << n);
        for mask in 0..(1u32 << n) {
            let corner: Vec<Dyadic> = (0..n)
                .map(|i| {
                    if mask >> i & 1 == 1 {
                        &self.center[i] + &self.halfwidth
                    } else {
                        &self.center[i] - &self.halfwidth
                    }
                })
                .collect();
            out.push(corner);
        }
        out
    }
}

/// Standard centered form: f(m) + R [-1, 1] with
/// R = sum over 1 <= |alpha| <= d of |d^alpha f(m)| / alpha! * (w/2)^|alpha|.
///
/// Exact; contains f(J). Panics on dimension mismatch or zero polynomial.
pub fn centered_form(f: &MultiPoly, j: &Cube) -> IntervalR {
    assert_eq!(f.nvars(), j.nvars(), "dimension mismatch");
    assert!(!f.is_zero(), "centered form of the zero polynomial");
    let shifted = f.taylor_shift(j.center());
    centered_form_of_shifted(&shifted, j.halfwidth())
}

/// Same enclosure given the polynomial already shifted to the cube center.
///
/// The engine's incremental-shift fast path lands here.
pub fn centered_form_of_shifted(shifted: &MultiPoly, halfwidth: &Dyadic) -> IntervalR {
    let hw = halfwidth.to_rational();
    let dmax = shifted.degree() as usize;
    let mut hw_pow = Vec::with_capacity(dmax + 1);
    hw_pow.push(Rational::from_integer(1.into()));
    for _ in 0..dmax {
        hw_pow.push(hw_pow.last().unwrap() * &hw);
    }
    let mut mid = Rational::zero();
    let mut radius = Rational::zero();
    for (k, c) in shifted.terms() {
        let total: u32 = k.iter().sum();
        if total == 0 {
            mid = c.clone();
        } else {
            radius += c.abs() * &hw_pow[total as usize];
        }
    }
    IntervalR { lo: &mid - &radius, hi: &mid + &radius }
}

/// Centered form of a 2n-variable polynomial on the doubled cube J x J
/// (center (m, m), same halfwidth).
pub fn centered_form_doubled(g: &MultiPoly, j: &Cube) -> IntervalR {
    assert_eq!(g.nvars(), 2 * j.nvars(), "dimension mismatch");
    assert!(!g.is_zero(), "centered form of the zero polynomial");
    let mut doubled = j.center().to_vec();
    doubled.extend_from_slice(j.center());
    let shifted = g.taylor_shift(&doubled);
    centered_form_of_shifted(&shifted, j.halfwidth())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::gradient_pair;
    use num_bigint::BigInt;

    fn q(n: i64) -> Rational {
        Rational::from_integer(BigInt::from(n))
    }

    fn qd(n: i64, d: i64) -> Rational {
        Rational::new(BigInt::from(n), BigInt::from(d))
    }

    fn d2(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    fn cube(cx: (i64, i64), cy: (i64, i64), hw: (i64, i64)) -> Cube {
        Cube::new(vec![d2(cx.0, cx.1), d2(cy.0, cy.1)], d2(hw.0, hw.1))
    }

    #[test]
    fn interval_op_examples() {
        let sym = IntervalR::new(q(-1), q(1));
        assert_eq!(sym.mul(&sym), sym);
        assert_eq!(
            IntervalR::new(q(1), q(2)).add(&IntervalR::new(q(3), q(4))),
            IntervalR::new(q(4), q(6))
        );
        assert_eq!(
            IntervalR::new(q(-1), q(2)).mul(&IntervalR::new(q(3), q(4))),
            IntervalR::new(q(-4), q(8))
        );
    }

    #[test]
    fn linear_centered_form_is_exact() {
        let f = MultiPoly::parse("x1", 1).unwrap();
        let j = Cube::new(vec![d2(5, -1)], d2(1, -1));
        assert_eq!(centered_form(&f, &j), IntervalR::new(q(2), q(3)));
    }

    #[test]
    fn circle_enclosures() {
        let f = MultiPoly::parse("x1^2 + x2^2 - 1", 2).unwrap();
        let j = cube((0, 0), (0, 0), (1, 0));
        assert_eq!(centered_form(&f, &j), IntervalR::new(q(-3), q(1)));

        let far = cube((3, 0), (3, 0), (1, -2));
        let enc = centered_form(&f, &far);
        // f(m) = 17, R = (6+6)/4 + 2/16
        assert_eq!(enc.lo(), &(q(17) - (q(3) + qd(1, 8))));
        assert!(enc.lo().is_positive());
    }

    #[test]
    fn doubled_form_examples() {
        let j = cube((1, 0), (0, 0), (1, -2));
        let one = MultiPoly::constant(4, q(1));
        assert_eq!(centered_form_doubled(&one, &j), IntervalR::point(q(1)));

        let g = gradient_pair(&MultiPoly::parse("x1^2 + x2^2 - 1", 2).unwrap());
        let enc = centered_form_doubled(&g, &j);
        assert!(!enc.contains_zero(), "g(m,m) = 4 with R = 2.5");
        assert_eq!(enc.lo(), &qd(3, 2));

        let origin = cube((0, 0), (0, 0), (1, 0));
        assert!(centered_form_doubled(&g, &origin).contains_zero());
    }

    #[test]
    fn soundness_random() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0xc0ffee);
        for _ in 0..1000 {
            let n = rng.gen_range(1..=3usize);
            let mut f = MultiPoly::zero(n);
            for _ in 0..rng.gen_range(1..=6) {
                let key: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=3u32)).collect();
                f = f.add(&MultiPoly::from_terms(
                    n,
                    [(key, qd(rng.gen_range(-9..=9), rng.gen_range(1..=4)))],
                ));
            }
            if f.is_zero() {
                continue;
            }
            let center: Vec<Dyadic> =
                (0..n).map(|_| d2(rng.gen_range(-8..=8), rng.gen_range(-2..=0))).collect();
            let hw = d2(rng.gen_range(1..=4), rng.gen_range(-3..=0));
            let j = Cube::new(center.clone(), hw.clone());
            // random p in J, coordinate-wise  c + t*hw  with t in [-1, 1]
            let p: Vec<Rational> = center
                .iter()
                .map(|c| {
                    let t = qd(rng.gen_range(-16..=16), 16);
                    c.to_rational() + t * hw.to_rational()
                })
                .collect();
            assert!(j.contains(&p));
            assert!(centered_form(&f, &j).contains(&f.evaluate(&p)));
        }
    }

    #[test]
    fn width_monotone_and_convergent() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let n = rng.gen_range(1..=2usize);
            let mut f = MultiPoly::zero(n);
            for _ in 0..4 {
                let key: Vec<u32> = (0..n).map(|_| rng.gen_range(0..=3u32)).collect();
                f = f.add(&MultiPoly::from_terms(n, [(key, q(rng.gen_range(-5..=5)))]));
            }
            if f.is_zero() {
                continue;
            }
            let center: Vec<Dyadic> = (0..n).map(|_| d2(rng.gen_range(-4..=4), -1)).collect();
            let p: Vec<Rational> = center.iter().map(|c| c.to_rational()).collect();
            let fp = f.evaluate(&p);
            let mut hw = d2(1, 0);
            let mut prev = centered_form(&f, &Cube::new(center.clone(), hw.clone()));
            let mut halvings = 0u32;
            loop {
                hw = hw.halve();
                halvings += 1;
                let cur = centered_form(&f, &Cube::new(center.clone(), hw.clone()));
                assert!(cur.subset_of(&prev), "nested boxes give nested enclosures");
                assert!(cur.contains(&fp));
                if cur.width() < qd(1, 1 << 40) {
                    break;
                }
                assert!(halvings < 60, "enclosure width failed to shrink");
                prev = cur;
            }
            assert!(halvings >= 10);
        }
    }
}
