//! Sparse multivariate polynomials over exact rationals.
//!
//! Houses the input polynomial f, its partial derivatives, the gradient
//! pairing g(x,y) = <grad f(x), grad f(y)>, and the exact multivariate
//! Taylor shift that the centered-form enclosures are built on. No floating
//! point anywhere near a predicate.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::dyadic::Dyadic;

/// Exact rational scalar. Reduced form (gcd 1, positive denominator) is
/// maintained by the arithmetic itself.
pub type Rational = num_rational::BigRational;

/// Multi-index exponent vector, one entry per variable.
pub type MultiIndex = Vec<u32>;

/// Sparse polynomial: multi-index -> nonzero rational coefficient.
///
/// The zero polynomial has an empty term map and degree 0 by convention.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Rational>,
}

/// Degree, coefficient height, and coefficient bit-size of a polynomial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoeffStats {
    /// Total degree (0 for the zero polynomial).
    pub degree: u32,
    /// Max |coefficient|; 0 only for the zero polynomial.
    pub height: Rational,
    /// ceil(lg height), clamped to >= 0.
    pub bitsize: u32,
}

impl MultiPoly {
    pub fn zero(nvars: usize) -> Self {
        assert!(nvars >= 1, "nvars must be positive");
        MultiPoly { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = MultiPoly::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(vec![0; nvars], c);
        }
        p
    }

    pub fn monomial(nvars: usize, key: &[u32], c: &Rational) -> Self {
        let mut p = MultiPoly::zero(nvars);
        p.add_term(key.to_vec(), c.clone());
        p
    }

    /// Builds from raw terms, merging duplicates and dropping zeros.
    ///
    /// Panics if a key has the wrong length.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Rational)>,
    {
        let mut p = MultiPoly::zero(nvars);
        for (k, c) in terms {
            p.add_term(k, c);
        }
        p
    }

    fn add_term(&mut self, key: MultiIndex, c: Rational) {
        assert_eq!(key.len(), self.nvars, "multi-index length mismatch");
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(key);
        match entry {
            alloc::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            alloc::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&MultiIndex, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, key: &[u32]) -> Rational {
        self.terms.get(key).cloned().unwrap_or_else(Rational::zero)
    }

    /// Total degree; 0 for the zero polynomial.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn add(&self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "dimension mismatch");
        let mut out = self.clone();
        for (k, c) in &rhs.terms {
            out.add_term(k.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c.clone())).collect(),
        }
    }

    pub fn sub(&self, rhs: &MultiPoly) -> MultiPoly {
        self.add(&rhs.neg())
    }

    pub fn scale(&self, c: &Rational) -> MultiPoly {
        if c.is_zero() {
            return MultiPoly::zero(self.nvars);
        }
        MultiPoly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(k, v)| (k.clone(), v * c)).collect(),
        }
    }

    /// The smallest positive integer multiple of self with integer
    /// coefficients: self scaled by the lcm of coefficient denominators.
    pub fn denominator_cleared(&self) -> MultiPoly {
        let mut l = BigInt::one();
        for (_, c) in &self.terms {
            l = l.lcm(c.denom());
        }
        self.scale(&Rational::from_integer(l))
    }

    pub fn mul(&self, rhs: &MultiPoly) -> MultiPoly {
        assert_eq!(self.nvars, rhs.nvars, "dimension mismatch");
        let mut out = MultiPoly::zero(self.nvars);
        for (ka, ca) in &self.terms {
            for (kb, cb) in &rhs.terms {
                let key: MultiIndex = ka.iter().zip(kb).map(|(a, b)| a + b).collect();
                out.add_term(key, ca * cb);
            }
        }
        out
    }

    /// Exact value at a rational point.
    ///
    /// Panics on dimension mismatch.
    pub fn evaluate(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.nvars, "dimension mismatch");
        // memoized per-variable powers
        let dmax = self.degree() as usize;
        let mut powers: Vec<Vec<Rational>> = Vec::with_capacity(self.nvars);
        for x in point {
            let mut row = Vec::with_capacity(dmax + 1);
            row.push(Rational::one());
            for _ in 0..dmax {
                let last = row.last().unwrap() * x;
                row.push(last);
            }
            powers.push(row);
        }
        let mut acc = Rational::zero();
        for (k, c) in &self.terms {
            let mut t = c.clone();
            for (i, &e) in k.iter().enumerate() {
                if e > 0 {
                    t *= &powers[i][e as usize];
                }
            }
            acc += t;
        }
        acc
    }

    /// Exact formal partial derivative along `axis`.
    ///
    /// Panics if `axis >= nvars`.
    pub fn partial_derivative(&self, axis: usize) -> MultiPoly {
        assert!(axis < self.nvars, "axis out of range");
        let mut out = MultiPoly::zero(self.nvars);
        for (k, c) in &self.terms {
            let e = k[axis];
            if e == 0 {
                continue;
            }
            let mut k2 = k.clone();
            k2[axis] = e - 1;
            out.add_term(k2, c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    /// Exact Taylor shift: returns q with q(x) = p(x + center).
    ///
    /// Centers are dyadic because subdivision only ever produces dyadic
    /// midpoints; this keeps the coefficient growth of the shift linear in
    /// the recursion depth. Panics on dimension mismatch.
    pub fn taylor_shift(&self, center: &[Dyadic]) -> MultiPoly {
        assert_eq!(center.len(), self.nvars, "dimension mismatch");
        let mut terms = self.terms.clone();
        for (axis, a) in center.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            terms = shift_axis(terms, axis, &a.to_rational());
        }
        MultiPoly { nvars: self.nvars, terms }
    }

    pub fn coeff_stats(&self) -> CoeffStats {
        let height = self
            .terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero);
        let bitsize = if height <= Rational::one() {
            0
        } else {
            ceil_log2_rational(&height).max(0) as u32
        };
        CoeffStats { degree: self.degree(), height, bitsize }
    }

    /// Parses the term grammar (see module docs of the CLI crate): terms
    /// joined by + / -, each an optional integer or integer/integer
    /// coefficient followed by x<k> factors with optional ^e exponents;
    /// optional * separators; whitespace ignored.
    pub fn parse(text: &str, nvars: usize) -> Result<MultiPoly, PolyParseError> {
        Parser { s: text.as_bytes(), pos: 0, nvars }.parse()
    }
}

/// Smallest t with q <= 2^t, for q > 0.
fn ceil_log2_rational(q: &Rational) -> i64 {
    assert!(q.is_positive());
    let mut t = q.numer().bits() as i64 - q.denom().bits() as i64;
    let le_pow2 = |q: &Rational, t: i64| {
        // q <= 2^t  <=>  num <= den << t  (or num << -t <= den)
        if t >= 0 {
            *q.numer() <= (q.denom() << t as usize)
        } else {
            (q.numer() << (-t) as usize) <= *q.denom()
        }
    };
    while !le_pow2(q, t) {
        t += 1;
    }
    while t > i64::MIN && le_pow2(q, t - 1) {
        t -= 1;
    }
    t
}

/// Shift one variable by rational a: substitute x_axis -> x_axis + a.
///
/// Groups terms into a dense ladder over the axis exponent, then runs the
/// classic synthetic-shift triangle; each rung is a sparse map over the
/// remaining exponents.
fn shift_axis(
    terms: BTreeMap<MultiIndex, Rational>,
    axis: usize,
    a: &Rational,
) -> BTreeMap<MultiIndex, Rational> {
    let d = terms.keys().map(|k| k[axis]).max().unwrap_or(0) as usize;
    if d == 0 {
        return terms;
    }
    let mut rows: Vec<BTreeMap<MultiIndex, Rational>> = vec![BTreeMap::new(); d + 1];
    for (mut k, c) in terms {
        let e = k[axis] as usize;
        k[axis] = 0;
        rows[e].insert(k, c);
    }
    for i in 0..d {
        for j in (i..d).rev() {
            let (lo, hi) = rows.split_at_mut(j + 1);
            let dst = &mut lo[j];
            for (k, c) in hi[0].iter() {
                let add = a * c;
                match dst.entry(k.clone()) {
                    alloc::collections::btree_map::Entry::Vacant(v) => {
                        v.insert(add);
                    }
                    alloc::collections::btree_map::Entry::Occupied(mut o) => {
                        *o.get_mut() += add;
                        if o.get().is_zero() {
                            o.remove();
                        }
                    }
                }
            }
        }
    }
    let mut out = BTreeMap::new();
    for (e, row) in rows.into_iter().enumerate() {
        for (mut k, c) in row {
            k[axis] = e as u32;
            out.insert(k, c);
        }
    }
    out
}

/// Gradient pairing: g(x, y) = sum_i  d_i f(x) * d_i f(y), a polynomial in
/// 2n variables (x block first, then y block). deg g = 2 deg f - 2 for
/// nonconstant f.
pub fn gradient_pair(f: &MultiPoly) -> MultiPoly {
    let n = f.nvars();
    let mut g = MultiPoly::zero(2 * n);
    for i in 0..n {
        let di = f.partial_derivative(i);
        for (ka, ca) in di.terms() {
            for (kb, cb) in di.terms() {
                let mut key = Vec::with_capacity(2 * n);
                key.extend_from_slice(ka);
                key.extend_from_slice(kb);
                g.add_term(key, ca * cb);
            }
        }
    }
    g
}

// ====== Parsing ======

/// Syntax error with byte position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PolyParseError {
    pub pos: usize,
    pub msg: String,
}

impl fmt::Display for PolyParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at byte {}: {}", self.pos, self.msg)
    }
}

impl core::error::Error for PolyParseError {}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl<'a> Parser<'a> {
    fn err(&self, msg: &str) -> PolyParseError {
        PolyParseError { pos: self.pos, msg: String::from(msg) }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn parse(mut self) -> Result<MultiPoly, PolyParseError> {
        let mut p = MultiPoly::zero(self.nvars);
        let mut sign = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                -1
            }
            Some(b'+') => {
                self.pos += 1;
                1
            }
            Some(_) => 1,
            None => return Err(self.err("empty input")),
        };
        loop {
            let (key, coeff) = self.parse_term()?;
            let signed = if sign < 0 { -coeff } else { coeff };
            p.add_term(key, signed);
            match self.peek() {
                None => return Ok(p),
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1;
                }
                Some(_) => return Err(self.err("expected '+' or '-' between terms")),
            }
        }
    }

    fn parse_term(&mut self) -> Result<(MultiIndex, Rational), PolyParseError> {
        let mut key = vec![0u32; self.nvars];
        let mut coeff = Rational::one();
        let mut any = false;
        if matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            let num = self.parse_bigint()?;
            let den = if self.peek() == Some(b'/') {
                self.pos += 1;
                if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    return Err(self.err("expected denominator after '/'"));
                }
                let d = self.parse_bigint()?;
                if d.is_zero() {
                    return Err(self.err("zero denominator"));
                }
                d
            } else {
                BigInt::one()
            };
            coeff = Rational::new(num, den);
            any = true;
        }
        loop {
            // '*' separators are optional everywhere between factors
            if self.peek() == Some(b'*') {
                self.pos += 1;
                if self.peek() != Some(b'x') {
                    return Err(self.err("expected variable after '*'"));
                }
            }
            if self.peek() != Some(b'x') {
                break;
            }
            self.pos += 1;
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(self.err("expected variable index after 'x'"));
            }
            let idx_pos = self.pos;
            let idx = self.parse_usize()?;
            if idx == 0 || idx > self.nvars {
                return Err(PolyParseError {
                    pos: idx_pos,
                    msg: alloc::format!("variable x{idx} out of range (nvars = {})", self.nvars),
                });
            }
            let e = if self.peek() == Some(b'^') {
                self.pos += 1;
                if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    return Err(self.err("expected exponent after '^'"));
                }
                self.parse_usize()? as u32
            } else {
                1
            };
            key[idx - 1] += e;
            any = true;
        }
        if !any {
            return Err(self.err("expected a coefficient or a variable"));
        }
        Ok((key, coeff))
    }

    fn parse_bigint(&mut self) -> Result<BigInt, PolyParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = core::str::from_utf8(&self.s[start..self.pos]).unwrap();
        digits.parse().map_err(|_| PolyParseError {
            pos: start,
            msg: String::from("bad integer"),
        })
    }

    fn parse_usize(&mut self) -> Result<usize, PolyParseError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        let digits = core::str::from_utf8(&self.s[start..self.pos]).unwrap();
        digits.parse().map_err(|_| PolyParseError {
            pos: start,
            msg: String::from("number too large"),
        })
    }
}

// ====== Printing ======

impl fmt::Display for MultiPoly {
    /// Canonical form: terms sorted by total degree descending, then
    /// reverse-lex on the exponent vector; round-trips through `parse`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut keys: Vec<&MultiIndex> = self.terms.keys().collect();
        keys.sort_by(|a, b| {
            let (da, db) = (a.iter().sum::<u32>(), b.iter().sum::<u32>());
            db.cmp(&da).then_with(|| b.cmp(a))
        });
        for (pos, k) in keys.iter().enumerate() {
            let c = &self.terms[*k];
            let neg = c.is_negative();
            if pos == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let a = c.abs();
            let has_vars = k.iter().any(|&e| e > 0);
            let mut wrote_coeff = false;
            if !has_vars || !a.is_one() {
                if a.denom().is_one() {
                    write!(f, "{}", a.numer())?;
                } else {
                    write!(f, "{}/{}", a.numer(), a.denom())?;
                }
                wrote_coeff = true;
            }
            let mut first_var = !wrote_coeff;
            for (i, &e) in k.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                if !first_var {
                    write!(f, "*")?;
                }
                first_var = false;
                write!(f, "x{}", i + 1)?;
                if e > 1 {
                    write!(f, "^{e}")?;
                }
            }
        }
        Ok(())
    }
}
