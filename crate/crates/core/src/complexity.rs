//! Cost estimates for the subdivision: worst-case region counts from the
//! width thresholds, separation-driven gap bounds for the rigorous route,
//! and amortized integrals that price the adaptive run pointwise through
//! distance oracles.
//!
//! Everything here is estimate-grade f64 (the certified arithmetic lives
//! in the predicate layer); quantities that overflow f64 travel as base-2
//! logarithms.

use alloc::vec::Vec;
use core::fmt;

use num_complex::Complex64;
use num_traits::One;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{f64_lower, f64_upper};
use crate::dyadic::Dyadic;
use crate::families::CircleVariant;
use crate::interval::Cube;
use crate::poly::{gradient_pair, MultiIndex, MultiPoly, Rational};
use crate::predicates::{predicate_constants, sufficient_width_c0, sufficient_width_c1};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ComplexityError {
    /// The gap route needs the paired system, which is vacuous for
    /// linear inputs.
    DegreeTooSmall,
    NonPositiveArgument,
}

impl fmt::Display for ComplexityError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexityError::DegreeTooSmall => write!(f, "degree must be at least 2"),
            ComplexityError::NonPositiveArgument => write!(f, "argument must be positive"),
        }
    }
}

impl core::error::Error for ComplexityError {}

/// Positive real carried as its base-2 logarithm, so region counts far
/// beyond f64 range stay comparable.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogScalar {
    pub log2: f64,
}

impl LogScalar {
    pub fn from_f64(v: f64) -> LogScalar {
        assert!(v > 0.0 && v.is_finite());
        LogScalar { log2: v.log2() }
    }

    pub fn from_log2(log2: f64) -> LogScalar {
        LogScalar { log2 }
    }

    /// 2^log2; saturates to infinity past f64 range.
    pub fn value_f64(&self) -> f64 {
        self.log2.exp2()
    }

    pub fn mul(self, other: LogScalar) -> LogScalar {
        LogScalar { log2: self.log2 + other.log2 }
    }

    pub fn pow_i64(self, e: i64) -> LogScalar {
        LogScalar { log2: self.log2 * e as f64 }
    }

    pub fn max(self, other: LogScalar) -> LogScalar {
        LogScalar { log2: self.log2.max(other.log2) }
    }

    pub fn add(self, other: LogScalar) -> LogScalar {
        let (hi, lo) = if self.log2 >= other.log2 {
            (self.log2, other.log2)
        } else {
            (other.log2, self.log2)
        };
        LogScalar { log2: hi + (lo - hi).exp2().ln_1p() / core::f64::consts::LN_2 }
    }
}

fn approx(q: &Rational) -> f64 {
    0.5 * (f64_lower(q) + f64_upper(q))
}

/// Point-to-variety distance estimators. The closed forms are exact for
/// the circle family; the generic pair brackets the true distance from
/// below (mean-value argument) and above (roots along sampled lines).
#[derive(Clone, Debug)]
pub enum DistanceOracle {
    ClosedFormCirclePlus { eps: f64 },
    ClosedFormCircleMinus { eps: f64 },
    ClosedFormPairing,
    LowerBoundGeneric(LowerBoundData),
    UpperBoundDirectional(DirectionalData),
}

#[derive(Clone, Debug)]
pub struct LowerBoundData {
    doubled: bool,
    terms: Vec<(MultiIndex, f64)>,
    gradient_abs: Vec<Vec<(MultiIndex, f64)>>,
    r: f64,
}

#[derive(Clone, Debug)]
pub struct DirectionalData {
    doubled: bool,
    terms: Vec<(MultiIndex, f64)>,
    degree: u32,
    directions: Vec<Vec<f64>>,
}

impl DistanceOracle {
    pub fn mode_label(&self) -> &'static str {
        match self {
            DistanceOracle::ClosedFormCirclePlus { .. } => "CLOSED_FORM_CIRCLE_PLUS",
            DistanceOracle::ClosedFormCircleMinus { .. } => "CLOSED_FORM_CIRCLE_MINUS",
            DistanceOracle::ClosedFormPairing => "CLOSED_FORM_PAIRING",
            DistanceOracle::LowerBoundGeneric(_) => "LOWER_BOUND_GENERIC",
            DistanceOracle::UpperBoundDirectional(_) => "UPPER_BOUND_DIRECTIONAL",
        }
    }

    /// Distance from the real point p to the complex zero set this oracle
    /// models (pairing oracles measure from the doubled point (p, p)).
    pub fn eval(&self, p: &[f64]) -> f64 {
        match self {
            DistanceOracle::ClosedFormCirclePlus { eps } => {
                let r2 = p[0] * p[0] + p[1] * p[1];
                (0.5 * r2 + eps * eps).sqrt()
            }
            DistanceOracle::ClosedFormCircleMinus { eps } => {
                let r2 = p[0] * p[0] + p[1] * p[1];
                if r2 <= 4.0 * eps * eps {
                    (r2.sqrt() - eps).abs()
                } else {
                    (0.5 * r2 - eps * eps).sqrt()
                }
            }
            DistanceOracle::ClosedFormPairing => (p[0] * p[0] + p[1] * p[1]).sqrt(),
            DistanceOracle::LowerBoundGeneric(data) => eval_lower(data, p),
            DistanceOracle::UpperBoundDirectional(data) => eval_directional(data, p),
        }
    }
}

fn doubled_point(p: &[f64], doubled: bool) -> Vec<f64> {
    if doubled {
        p.iter().chain(p).copied().collect()
    } else {
        p.to_vec()
    }
}

fn monomial(point: &[f64], alpha: &[u32]) -> f64 {
    alpha
        .iter()
        .enumerate()
        .map(|(j, &e)| point[j].powi(e as i32))
        .product()
}

fn eval_lower(data: &LowerBoundData, p: &[f64]) -> f64 {
    let point = doubled_point(p, data.doubled);
    let fp: f64 = data.terms.iter().map(|(a, c)| c * monomial(&point, a)).sum();
    let fp = fp.abs();
    if fp == 0.0 {
        return 0.0;
    }
    // |grad| on the complex ball of radius r, coefficient-wise
    let shifted: Vec<f64> = point.iter().map(|x| x.abs() + data.r).collect();
    let mut m2 = 0.0;
    for g in &data.gradient_abs {
        let s: f64 = g.iter().map(|(a, c)| c * monomial(&shifted, a)).sum();
        m2 += s * s;
    }
    let m = m2.sqrt();
    if m == 0.0 {
        return data.r;
    }
    data.r.min(fp / m)
}

fn eval_directional(data: &DirectionalData, p: &[f64]) -> f64 {
    let point = doubled_point(p, data.doubled);
    let deg = data.degree as usize;
    let mut best = f64::INFINITY;
    for v in &data.directions {
        // restrict to the line point + t v
        let mut line = alloc::vec![0.0f64; deg + 1];
        for (alpha, c) in &data.terms {
            let mut cur = alloc::vec![*c];
            for (j, &e) in alpha.iter().enumerate() {
                for _ in 0..e {
                    let mut next = alloc::vec![0.0f64; cur.len() + 1];
                    for (i, &q) in cur.iter().enumerate() {
                        next[i] += q * point[j];
                        next[i + 1] += q * v[j];
                    }
                    cur = next;
                }
            }
            for (i, q) in cur.into_iter().enumerate() {
                line[i] += q;
            }
        }
        for root in poly_roots(&line) {
            best = best.min(root.norm());
        }
    }
    best
}

/// All complex roots of a dense univariate with f64 coefficients
/// (ascending). Exact formulas through degree 2, simultaneous iteration
/// above.
fn poly_roots(coeffs: &[f64]) -> Vec<Complex64> {
    let maxc = coeffs.iter().fold(0.0f64, |a, &c| a.max(c.abs()));
    if maxc == 0.0 {
        return Vec::new();
    }
    let mut cs: Vec<f64> = coeffs.to_vec();
    while cs.len() > 1 && cs.last().unwrap().abs() <= 1e-14 * maxc {
        cs.pop();
    }
    match cs.len() - 1 {
        0 => Vec::new(),
        1 => alloc::vec![Complex64::new(-cs[0] / cs[1], 0.0)],
        2 => {
            let (a, b, c) = (cs[2], cs[1], cs[0]);
            let disc = b * b - 4.0 * a * c;
            let sq = if disc >= 0.0 {
                Complex64::new(disc.sqrt(), 0.0)
            } else {
                Complex64::new(0.0, (-disc).sqrt())
            };
            let bb = Complex64::new(b, 0.0);
            let den = Complex64::new(2.0 * a, 0.0);
            alloc::vec![(-bb + sq) / den, (-bb - sq) / den]
        }
        _ => durand_kerner(&cs),
    }
}

fn durand_kerner(cs: &[f64]) -> Vec<Complex64> {
    let deg = cs.len() - 1;
    let lead = cs[deg];
    let monic: Vec<Complex64> = cs.iter().map(|&c| Complex64::new(c / lead, 0.0)).collect();
    let radius = 1.0 + monic[..deg].iter().map(|c| c.norm()).fold(0.0, f64::max);
    let rot = Complex64::new(0.4, 0.9);
    let mut z: Vec<Complex64> = (0..deg)
        .map(|k| rot.powu(k as u32 + 1) * Complex64::new(radius, 0.0))
        .collect();
    for _ in 0..200 {
        let mut delta = 0.0f64;
        for k in 0..deg {
            let pz = monic.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z[k] + c);
            let mut den = Complex64::new(1.0, 0.0);
            for j in 0..deg {
                if j != k {
                    den *= z[k] - z[j];
                }
            }
            if den.norm() == 0.0 {
                den = Complex64::new(1e-12, 0.0);
            }
            let step = pz / den;
            z[k] -= step;
            delta = delta.max(step.norm());
        }
        if delta <= 1e-13 * radius {
            break;
        }
    }
    z
}

fn poly_terms_f64(f: &MultiPoly) -> Vec<(MultiIndex, f64)> {
    f.terms().map(|(a, c)| (a.clone(), approx(c))).collect()
}

fn gradient_abs_f64(f: &MultiPoly) -> Vec<Vec<(MultiIndex, f64)>> {
    (0..f.nvars())
        .map(|axis| {
            f.partial_derivative(axis)
                .terms()
                .map(|(a, c)| (a.clone(), approx(c).abs()))
                .collect()
        })
        .collect()
}

/// Exact distance oracles for the circle family: point distance to the
/// variety and pairing distance from the doubled point.
pub fn circle_distance_oracles(variant: CircleVariant, eps: f64) -> (DistanceOracle, DistanceOracle) {
    assert!(eps > 0.0);
    let point = match variant {
        CircleVariant::Plus => DistanceOracle::ClosedFormCirclePlus { eps },
        CircleVariant::Minus => DistanceOracle::ClosedFormCircleMinus { eps },
    };
    (point, DistanceOracle::ClosedFormPairing)
}

/// Certifiable-in-spirit lower bound: min(r, |f(p)| / M) where M bounds
/// the gradient norm on the complex ball of radius r around p.
pub fn generic_lower_oracle(f: &MultiPoly, r: f64) -> DistanceOracle {
    assert!(r > 0.0 && !f.is_zero());
    DistanceOracle::LowerBoundGeneric(LowerBoundData {
        doubled: false,
        terms: poly_terms_f64(f),
        gradient_abs: gradient_abs_f64(f),
        r,
    })
}

/// Same lower-bound construction for the paired system, evaluated at
/// (p, p).
pub fn generic_lower_pairing_oracle(f: &MultiPoly, r: f64) -> DistanceOracle {
    let g = gradient_pair(f);
    DistanceOracle::LowerBoundGeneric(LowerBoundData {
        doubled: true,
        terms: poly_terms_f64(&g),
        gradient_abs: gradient_abs_f64(&g),
        r,
    })
}

fn sampled_directions(nvars: usize, samples: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut gauss = || {
        let u1: f64 = 1.0 - rng.gen::<f64>();
        let u2: f64 = rng.gen();
        (-2.0 * u1.ln()).sqrt() * (2.0 * core::f64::consts::PI * u2).cos()
    };
    (0..samples)
        .map(|_| {
            loop {
                let v: Vec<f64> = (0..nvars).map(|_| gauss()).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-6 {
                    return v.into_iter().map(|x| x / norm).collect();
                }
            }
        })
        .collect()
}

/// Upper bound from exact zeros along pseudorandom real lines through p.
/// Deterministic for a fixed seed.
pub fn directional_upper_oracle(f: &MultiPoly, samples: usize, seed: u64) -> DistanceOracle {
    assert!(samples > 0 && !f.is_zero());
    DistanceOracle::UpperBoundDirectional(DirectionalData {
        doubled: false,
        terms: poly_terms_f64(f),
        degree: f.degree(),
        directions: sampled_directions(f.nvars(), samples, seed),
    })
}

/// Directional upper bound for the paired system from (p, p).
pub fn directional_upper_pairing_oracle(f: &MultiPoly, samples: usize, seed: u64) -> DistanceOracle {
    let g = gradient_pair(f);
    DistanceOracle::UpperBoundDirectional(DirectionalData {
        doubled: true,
        terms: poly_terms_f64(&g),
        degree: g.degree(),
        directions: sampled_directions(g.nvars(), samples, seed),
    })
}

/// Region-count ceiling for a run driven by abstract local size bounds:
/// max(1, eps1^(-1 + (ln diam(I) - ln(K delta)) / ln eps2)).
pub fn generic_region_bound(
    diam_i: f64,
    k: f64,
    delta: f64,
    eps1: f64,
    eps2: f64,
) -> LogScalar {
    assert!(diam_i > 0.0 && k > 0.0 && delta > 0.0);
    assert!(0.0 < eps1 && eps1 < 1.0 && 0.0 < eps2 && eps2 < 1.0);
    let expo = -1.0 + (diam_i.ln() - (k * delta).ln()) / eps2.ln();
    LogScalar::from_log2((expo * eps1.log2()).max(0.0))
}

/// Specialization to the standard engine: max(1, (2 diam(I) / (K delta))^n)
/// with K the combined predicate constant and delta given as log2.
pub fn pv_region_bound(n: u32, d: u32, diam_i: f64, delta_log2: f64) -> LogScalar {
    assert!(diam_i > 0.0);
    let k = predicate_constants(n, d).k;
    let k_log2 = f64_lower(&k).log2();
    let nf = n as f64;
    LogScalar::from_log2((nf * (1.0 + diam_i.log2() - k_log2 - delta_log2)).max(0.0))
}

/// log2 of the worst-case distance D between distinct zeros of the paired
/// system over the height-H integer inputs, plus the smallest k with
/// sqrt(n) / 2^(k-1) < D. Linear inputs have no paired zeros to separate.
pub fn separation_k_log2(n: u32, d: u32, h: f64) -> Result<(f64, u64), ComplexityError> {
    if d < 2 {
        return Err(ComplexityError::DegreeTooSmall);
    }
    assert!(n >= 1 && h >= 1.0);
    let (nf, df) = (n as f64, d as f64);
    let twod2 = 2.0 * df - 2.0;
    let e2 = 2.0 * nf * (4.0 * nf).exp2() * twod2.powi(4 * n as i32);
    let log2_base = (4.0 - 2.0 * nf)
        + (twod2 + (nf * df * df * h * h).log2()).max((32.0 * nf + 8.0).log2())
        + 4.0 * nf * twod2.log2();
    let log2_d = -e2 * log2_base;
    let k = (0.5 * nf.log2() - log2_d + 1.0).floor() as u64 + 1;
    Ok((log2_d, k))
}

/// log2 of the certified width-threshold gap at refinement level k: the
/// min-max distance bound, halved once more and shrunk by sqrt(2) for the
/// move out of the doubled space.
pub fn separation_delta_log2(n: u32, d: u32, h: f64, k: u64) -> Result<f64, ComplexityError> {
    if d < 2 {
        return Err(ComplexityError::DegreeTooSmall);
    }
    assert!(n >= 1 && h >= 1.0);
    let (nf, df) = (n as f64, d as f64);
    let twod2 = 2.0 * df - 2.0;
    let e = 4.0 * nf * (8.0 * nf).exp2() * twod2.powi(8 * n as i32);
    let k1 = (k + 1) as f64;
    let log2_base = (4.0 - 4.0 * nf)
        + (twod2 * k1 + (nf * df * df * h * h).log2()).max((60.0 * nf + 8.0).log2())
        + 8.0 * nf * twod2.log2();
    Ok(-k1 - e * log2_base - 0.5)
}

fn unit_width_pair(n: u32, d: u32) -> (f64, f64) {
    let one = Rational::one();
    (
        approx(&sufficient_width_c0(n, d, &one)),
        approx(&sufficient_width_c1(n, d, &one)),
    )
}

/// Exclusion-side local size: (w0(n, d) * dist(x))^n, the width below
/// which the exclusion test is guaranteed at x.
pub fn local_size_g0(x: &[f64], n: u32, d: u32, oracle: &DistanceOracle) -> f64 {
    let (w0, _) = unit_width_pair(n, d);
    (w0 * oracle.eval(x)).powi(n as i32)
}

/// Alignment-side local size: (w1(n, d) * dist(x))^n against the pairing
/// distance.
pub fn local_size_g1(x: &[f64], n: u32, d: u32, oracle: &DistanceOracle) -> f64 {
    let (_, w1) = unit_width_pair(n, d);
    (w1 * oracle.eval(x)).powi(n as i32)
}

/// Local size for an abstract criterion pair with contraction profile
/// (eps1, eps2): eps1^(1 + (ln(K dist(x)) - ln diam(I)) / ln eps2) * mu(I).
pub fn generic_local_size_f(
    x: &[f64],
    k: f64,
    oracle: &DistanceOracle,
    diam_i: f64,
    eps1: f64,
    eps2: f64,
    mu_i: f64,
) -> f64 {
    assert!(k > 0.0 && diam_i > 0.0 && mu_i > 0.0);
    assert!(0.0 < eps1 && eps1 < 1.0 && 0.0 < eps2 && eps2 < 1.0);
    let dist = oracle.eval(x);
    let expo = 1.0 + ((k * dist).ln() - diam_i.ln()) / eps2.ln();
    eps1.powf(expo) * mu_i
}

const H0_COST_SCALE: f64 = 1.0;
const H1_COST_SCALE: f64 = 1.0;

fn h0_raw(y: f64, n: u32, d: u32, tau: f64, w_i: f64) -> f64 {
    let dn = (d as f64).powi(n as i32);
    let dn1 = dn * d as f64;
    (dn1 * w_i.log2() - dn1 / n as f64 * y.log2() + dn * tau) * H0_COST_SCALE
}

fn h1_raw(y: f64, n: u32, d: u32, tau: f64, w_i: f64) -> f64 {
    let q = (2.0 * n as f64).exp2() * (d as f64).powi(2 * n as i32);
    let qd = q * d as f64;
    (qd * w_i.log2() - qd / n as f64 * y.log2() + q * tau) * H1_COST_SCALE
}

/// Bit cost charged to an exclusion-side region of local size y inside a
/// box of width w_i, coefficient size tau.
pub fn bit_cost_h0(y: f64, n: u32, d: u32, tau: f64, w_i: f64) -> Result<f64, ComplexityError> {
    if y <= 0.0 {
        return Err(ComplexityError::NonPositiveArgument);
    }
    Ok(h0_raw(y, n, d, tau, w_i))
}

/// Alignment-side analogue of `bit_cost_h0`.
pub fn bit_cost_h1(y: f64, n: u32, d: u32, tau: f64, w_i: f64) -> Result<f64, ComplexityError> {
    if y <= 0.0 {
        return Err(ComplexityError::NonPositiveArgument);
    }
    Ok(h1_raw(y, n, d, tau, w_i))
}

#[derive(Clone, Debug)]
pub struct QuadConfig {
    /// Per-cell acceptance: children within this relative distance of the
    /// parent estimate stop refining.
    pub rel_tol: f64,
    pub max_depth: u32,
    pub max_cells: u64,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { rel_tol: 0.01, max_depth: 30, max_cells: 500_000 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CAEstimate {
    pub value: f64,
    pub refinement_depth: u32,
    pub diverged: bool,
    pub cells_evaluated: u64,
}

struct QuadState {
    cells: u64,
    max_depth: u32,
    diverged: bool,
}

/// Midpoint-rule refinement. A cell that reaches the depth cap without
/// converging is deemed singular when its midpoint sits within a few
/// diameters of both varieties: maximal refinement plus vanishing
/// distances is the signature of an integrand pole, while a mere cell
/// budget stop on a coarse cell is not. Non-finite samples flag either
/// way.
fn quad_cell(
    eval: &dyn Fn(&[f64]) -> (f64, f64, f64),
    n: usize,
    center: &[f64],
    hw: f64,
    sample: (f64, f64, f64),
    depth: u32,
    cfg: &QuadConfig,
    st: &mut QuadState,
) -> f64 {
    st.max_depth = st.max_depth.max(depth);
    let (val, d0, d1) = sample;
    let measure = (2.0 * hw).powi(n as i32);
    if depth >= cfg.max_depth || st.cells >= cfg.max_cells {
        let diam = 2.0 * hw * (n as f64).sqrt();
        if !val.is_finite() || (depth >= cfg.max_depth && d0.max(d1) <= 4.0 * diam) {
            st.diverged = true;
        }
        return val * measure;
    }
    let ch = 0.5 * hw;
    let kids: Vec<(Vec<f64>, (f64, f64, f64))> = (0..1usize << n)
        .map(|ci| {
            let cc: Vec<f64> = (0..n)
                .map(|ax| center[ax] + if ci >> ax & 1 == 1 { ch } else { -ch })
                .collect();
            let s = eval(&cc);
            (cc, s)
        })
        .collect();
    st.cells += 1 << n;
    let child_measure = (2.0 * ch).powi(n as i32);
    let child_sum: f64 = kids.iter().map(|(_, s)| s.0 * child_measure).sum();
    let parent_est = val * measure;
    if child_sum.is_finite()
        && (child_sum - parent_est).abs() <= cfg.rel_tol * child_sum.abs().max(f64::MIN_POSITIVE)
    {
        return child_sum;
    }
    kids.into_iter()
        .map(|(cc, s)| quad_cell(eval, n, &cc, ch, s, depth + 1, cfg, st))
        .sum()
}

/// Shared integral core: integrand max(1, 2^n min(h0(2^-n G0)/G0,
/// h1(2^-n G1)/G1)) over I, with G_i built from the oracles.
fn ca_weighted_integral(
    f: &MultiPoly,
    i: &Cube,
    o0: &DistanceOracle,
    o1: &DistanceOracle,
    h0: &dyn Fn(f64) -> f64,
    h1: &dyn Fn(f64) -> f64,
    cfg: &QuadConfig,
) -> CAEstimate {
    let n = f.nvars();
    let d = f.degree();
    assert_eq!(n, i.nvars());
    let (w0, w1) = unit_width_pair(n as u32, d.max(1));
    let two_n = (n as f64).exp2();
    let eval = |x: &[f64]| {
        let d0 = o0.eval(x);
        let d1 = o1.eval(x);
        let g0 = (w0 * d0).powi(n as i32).min(1e300);
        let g1 = (w1 * d1).powi(n as i32).min(1e300);
        let t0 = h0(g0 / two_n) / g0;
        let t1 = h1(g1 / two_n) / g1;
        ((two_n * t0.min(t1)).max(1.0), d0, d1)
    };
    let center: Vec<f64> = i.center().iter().map(Dyadic::to_f64).collect();
    let hw = i.halfwidth().to_f64();
    let mut st = QuadState { cells: 1, max_depth: 0, diverged: false };
    let root = eval(&center);
    let value = quad_cell(&eval, n, &center, hw, root, 0, cfg, &mut st);
    CAEstimate {
        value,
        refinement_depth: st.max_depth,
        diverged: st.diverged,
        cells_evaluated: st.cells,
    }
}

/// Amortized region-count integral max(1, int_I max(1, 2^n min(1/G0,
/// 1/G1))). Diverges exactly when both distances vanish together inside I,
/// i.e. at a singular point of the paired system.
pub fn ca_region_integral(
    f: &MultiPoly,
    i: &Cube,
    o0: &DistanceOracle,
    o1: &DistanceOracle,
    cfg: &QuadConfig,
) -> CAEstimate {
    let one = |_: f64| 1.0;
    let mut est = ca_weighted_integral(f, i, o0, o1, &one, &one, cfg);
    est.value = est.value.max(1.0);
    est
}

/// Amortized bit-cost integral: the region integral reweighted by the
/// per-region work h0/h1, floored by the whole-box charges h0(w(I)^n) and
/// h1(w(I)^n).
pub fn ca_bit_integral(
    f: &MultiPoly,
    i: &Cube,
    o0: &DistanceOracle,
    o1: &DistanceOracle,
    tau: f64,
    cfg: &QuadConfig,
) -> CAEstimate {
    let n = f.nvars() as u32;
    let d = f.degree().max(1);
    let w_i = i.width().to_f64();
    let hh0 = move |y: f64| h0_raw(y, n, d, tau, w_i);
    let hh1 = move |y: f64| h1_raw(y, n, d, tau, w_i);
    let mut est = ca_weighted_integral(f, i, o0, o1, &hh0, &hh1, cfg);
    let whole = w_i.powi(n as i32);
    est.value = est.value.max(h0_raw(whole, n, d, tau, w_i)).max(h1_raw(whole, n, d, tau, w_i));
    est
}

/// Count lower bound from the cluster family: w^(n-1) a^(d/2+1) / 2 boxes
/// meet the slab around the cluster abscissa at the guaranteed width.
pub fn mignotte_lower_bound(n: u32, d: u32, a: u32, w: f64) -> f64 {
    assert!(n >= 1 && d >= 1 && a >= 2 && w > 0.0);
    w.powi(n as i32 - 1) * (a as f64).powf(d as f64 / 2.0 + 1.0) / 2.0
}

/// Count lower bound along the positive x-axis for the sharpened-corner
/// family: (a2 / (2 (a1 + a2))) ((r2 / eps)^((a1+a2)/a2) -
/// (r1 / eps)^((a1+a2)/a2)).
pub fn asymptote_family_lower_bound(a1: u32, a2: u32, eps: f64, r1: f64, r2: f64) -> f64 {
    assert!(a1 >= 1 && a2 >= 1 && eps > 0.0 && 0.0 < r1 && r1 <= r2);
    let expo = (a1 + a2) as f64 / a2 as f64;
    let scale = a2 as f64 / (2.0 * (a1 + a2) as f64);
    scale * ((r2 / eps).powf(expo) - (r1 / eps).powf(expo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::circle_poly;
    use crate::subdivide::{run_pv, EngineConfig};
    use num_bigint::BigInt;

    fn dy(m: i64, e: i64) -> Dyadic {
        Dyadic::new(BigInt::from(m), e)
    }

    fn box2(hw: i64) -> Cube {
        Cube::new(alloc::vec![dy(0, 0), dy(0, 0)], dy(hw, 0))
    }

    fn rational(num: i64, den: i64) -> Rational {
        Rational::new(BigInt::from(num), BigInt::from(den))
    }

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn logscalar_matches_direct_arithmetic() {
        let a = LogScalar::from_f64(3.0);
        let b = LogScalar::from_f64(5.0);
        assert!(rel_close(a.mul(b).value_f64(), 15.0, 1e-12));
        assert!(rel_close(a.add(b).value_f64(), 8.0, 1e-12));
        assert!(rel_close(b.add(a).value_f64(), 8.0, 1e-12));
        assert!(rel_close(a.pow_i64(7).value_f64(), 3f64.powi(7), 1e-12));
        assert!(rel_close(a.max(b).value_f64(), 5.0, 1e-12));
        assert!(rel_close(LogScalar::from_log2(4.0).value_f64(), 16.0, 1e-12));
        // far-separated addition degenerates to max without overflow
        let huge = LogScalar::from_log2(1e18);
        let tiny = LogScalar::from_log2(-40.0);
        assert_eq!(huge.add(tiny).log2, 1e18);
    }

    #[test]
    fn region_bound_routes_agree() {
        // the abstract bound, its engine specialization, and the measure
        // form are one identity in three spellings
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..200 {
            let n = 1 + (rng.gen::<u64>() % 3) as u32;
            let diam = 1.0 + 99.0 * rng.gen::<f64>();
            let kdelta = (rng.gen::<f64>() * 0.99 + 0.005) * 0.1;
            let eps1 = 0.5f64.powi(n as i32);
            let got = generic_region_bound(diam, kdelta, 1.0, eps1, 0.5).log2;
            let direct = (n as f64 * (1.0 + diam.log2() - kdelta.log2())).max(0.0);
            assert!(rel_close(got, direct, 1e-9), "{got} vs {direct}");
            let nf = n as f64;
            let mu = (diam / nf.sqrt()).powi(n as i32);
            let measure_form =
                ((2.0 * nf.sqrt() / kdelta).powi(n as i32).log2() + mu.log2()).max(0.0);
            assert!(rel_close(got, measure_form, 1e-9), "{got} vs {measure_form}");
        }
        let frozen = generic_region_bound(32f64.sqrt(), 0.0759, 0.1, 0.25, 0.5);
        assert!((frozen.log2 - 21.08336879804269).abs() < 1e-6);
        assert!(rel_close(frozen.value_f64(), 2221909.766161357, 1e-9));
    }

    #[test]
    fn separation_frozen_values() {
        let (log2_d, k) = separation_k_log2(2, 2, 1.0).unwrap();
        assert!(rel_close(log2_d, -3714560.8195780935, 1e-12), "{log2_d}");
        assert_eq!(k, 3714563);
        let delta = separation_delta_log2(2, 2, 1.0, k).unwrap();
        assert!(rel_close(delta, -2.552634097821732e17, 1e-12), "{delta}");

        let (log2_d16, k16) = separation_k_log2(2, 2, 16.0).unwrap();
        assert!(rel_close(log2_d16, -5505024.0, 1e-12), "{log2_d16}");
        assert_eq!(k16, 5505026);
        let delta16 = separation_delta_log2(2, 2, 16.0, k16).unwrap();
        assert!(rel_close(delta16, -3.7830336513703936e17, 1e-12), "{delta16}");

        let diam = 32f64.sqrt();
        let b1 = pv_region_bound(2, 2, diam, delta);
        assert!(rel_close(b1.log2, 5.1052681956434643e17, 1e-12), "{}", b1.log2);
        let b16 = pv_region_bound(2, 2, diam, delta16);
        assert!(rel_close(b16.log2, 7.566067302740787e17, 1e-12), "{}", b16.log2);
    }

    #[test]
    fn separation_monotone_and_guarded() {
        let (_, k1) = separation_k_log2(2, 2, 1.0).unwrap();
        let (_, k16) = separation_k_log2(2, 2, 16.0).unwrap();
        assert!(k16 > k1);
        let d_a = separation_delta_log2(2, 2, 1.0, k1).unwrap();
        let d_b = separation_delta_log2(2, 2, 1.0, k1 + 1000).unwrap();
        assert!(d_b < d_a, "gap shrinks as refinement deepens");
        assert_eq!(separation_k_log2(2, 1, 1.0).unwrap_err(), ComplexityError::DegreeTooSmall);
        assert_eq!(
            separation_delta_log2(2, 1, 1.0, 5).unwrap_err(),
            ComplexityError::DegreeTooSmall
        );
    }

    #[test]
    fn region_count_exponent_shape() {
        // log2 of the rigorous ceiling, normalized by the stated growth
        // envelope, stays bounded across a small parameter grid
        for n in [1u32, 2] {
            for d in [2u32, 3, 4] {
                for tau in [0u32, 4, 8] {
                    let h = (tau as f64).exp2();
                    let (_, k) = separation_k_log2(n, d, h).unwrap();
                    let delta = separation_delta_log2(n, d, h, k).unwrap();
                    let diam = 2.0 * (n as f64).sqrt() * h.max(1.0);
                    let bound = pv_region_bound(n, d, diam, delta);
                    let envelope = (n as f64).powi(3)
                        * (24.0 * n as f64).exp2()
                        * (d as f64).powi(12 * n as i32 + 1)
                        * (d as f64 + tau as f64 + n as f64 * (d as f64).log2());
                    // grid maximum sits near 1.42 (n=1, d=4, tau=0)
                    let ratio = bound.log2 / envelope;
                    assert!(ratio > 0.0 && ratio < 2.0, "n={n} d={d} tau={tau}: {ratio}");
                }
            }
        }
    }

    #[test]
    fn local_size_frozen_values() {
        let (o0, o1) = circle_distance_oracles(CircleVariant::Plus, 1.0);
        let g0 = local_size_g0(&[0.0, 0.0], 2, 2, &o0);
        assert!(g0 > 2.8803e-3 && g0 < 2.8804e-3, "{g0}");
        let g1 = local_size_g1(&[1.0, 0.0], 2, 2, &o1);
        assert!(g1 > 9.3716e-7 && g1 < 9.3717e-7, "{g1}");

        // scaling in the distance is exactly degree n
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let p = [rng.gen::<f64>() * 3.0 + 0.1, rng.gen::<f64>() * 3.0 + 0.1];
            let q = [2.0 * p[0], 2.0 * p[1]];
            let a = local_size_g1(&p, 2, 2, &o1);
            let b = local_size_g1(&q, 2, 2, &o1);
            assert!(rel_close(b, 4.0 * a, 1e-12));
        }
    }

    #[test]
    fn generic_local_size_matches_motivating_case() {
        // with profile (2^-n, 1/2) on a cube, the abstract local size
        // collapses to (K dist / (2 sqrt(n)))^n
        let o = DistanceOracle::ClosedFormPairing;
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..100 {
            let n = 2u32;
            let nf = n as f64;
            let diam = 0.5 + 10.0 * rng.gen::<f64>();
            let mu = (diam / nf.sqrt()).powi(n as i32);
            let k = 0.001 + rng.gen::<f64>() * 0.2;
            let p = [rng.gen::<f64>() * 4.0 + 0.05, rng.gen::<f64>() * 4.0 + 0.05];
            let f_val = generic_local_size_f(&p, k, &o, diam, 0.25, 0.5, mu);
            let dist = o.eval(&p);
            let direct = (k * dist / (2.0 * nf.sqrt())).powi(n as i32);
            assert!(rel_close(f_val, direct, 1e-9), "{f_val} vs {direct}");
        }
    }

    #[test]
    fn bit_cost_examples() {
        assert!(rel_close(bit_cost_h0(1.0, 2, 2, 1.0, 4.0).unwrap(), 20.0, 1e-12));
        // at the whole-box size the width terms cancel, leaving d^n tau
        assert!(rel_close(bit_cost_h0(16.0, 2, 2, 1.0, 4.0).unwrap(), 4.0, 1e-12));
        assert!(rel_close(bit_cost_h1(16.0, 2, 2, 1.0, 4.0).unwrap(), 256.0, 1e-12));
        assert_eq!(
            bit_cost_h0(0.0, 2, 2, 1.0, 4.0).unwrap_err(),
            ComplexityError::NonPositiveArgument
        );
        assert_eq!(
            bit_cost_h1(-1.0, 2, 2, 1.0, 4.0).unwrap_err(),
            ComplexityError::NonPositiveArgument
        );
    }

    #[test]
    fn oracle_ordering_at_sampled_points() {
        let eps = 0.5;
        let f = circle_poly(CircleVariant::Minus, &rational(1, 2));
        let (closed0, closed1) = circle_distance_oracles(CircleVariant::Minus, eps);
        let lower0 = generic_lower_oracle(&f, 1.0);
        let lower1 = generic_lower_pairing_oracle(&f, 1.0);
        let upper0 = directional_upper_oracle(&f, 24, 7);
        let upper1 = directional_upper_pairing_oracle(&f, 24, 7);
        let mut rng = ChaCha8Rng::seed_from_u64(0x07de);
        for _ in 0..1000 {
            let p = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            let (l0, c0, u0) = (lower0.eval(&p), closed0.eval(&p), upper0.eval(&p));
            assert!(l0 <= c0 * (1.0 + 1e-9) + 1e-12, "point lower {l0} > closed {c0}");
            assert!(c0 <= u0 * (1.0 + 1e-9) + 1e-12, "closed {c0} > upper {u0}");
            let (l1, c1, u1) = (lower1.eval(&p), closed1.eval(&p), upper1.eval(&p));
            assert!(l1 <= c1 * (1.0 + 1e-9) + 1e-12, "pair lower {l1} > closed {c1}");
            assert!(c1 <= u1 * (1.0 + 1e-9) + 1e-12, "pair closed {c1} > upper {u1}");
        }
        assert_eq!(lower0.mode_label(), "LOWER_BOUND_GENERIC");
        assert_eq!(closed0.mode_label(), "CLOSED_FORM_CIRCLE_MINUS");
        assert_eq!(closed1.mode_label(), "CLOSED_FORM_PAIRING");
        assert_eq!(upper0.mode_label(), "UPPER_BOUND_DIRECTIONAL");
        assert_eq!(
            circle_distance_oracles(CircleVariant::Plus, 1.0).0.mode_label(),
            "CLOSED_FORM_CIRCLE_PLUS"
        );
    }

    #[test]
    fn region_integrand_matches_direct_form() {
        // 1/G spelled through widths equals the (A_i / d_i)^n spelling
        let f = circle_poly(CircleVariant::Minus, &rational(1, 4));
        let (o0, o1) = circle_distance_oracles(CircleVariant::Minus, 0.25);
        let (w0, w1) = unit_width_pair(2, 2);
        let (a0, a1) = (1.0 / w0, 1.0 / w1);
        let mut rng = ChaCha8Rng::seed_from_u64(91);
        for _ in 0..50 {
            let p = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            let (d0, d1) = (o0.eval(&p), o1.eval(&p));
            let direct = (4.0 * (a0 / d0).powi(2).min((a1 / d1).powi(2))).max(1.0);
            let via_g = (4.0 * (1.0 / (w0 * d0).powi(2)).min(1.0 / (w1 * d1).powi(2))).max(1.0);
            assert!(rel_close(direct, via_g, 1e-9));
        }
        // the region integral is the bit integral with unit work
        let cfg = QuadConfig::default();
        let one = |_: f64| 1.0;
        let region = ca_region_integral(&f, &box2(2), &o0, &o1, &cfg);
        let weighted = ca_weighted_integral(&f, &box2(2), &o0, &o1, &one, &one, &cfg);
        assert_eq!(region.value, weighted.value.max(1.0));
        assert_eq!(region.cells_evaluated, weighted.cells_evaluated);
        assert!(!region.diverged);
    }

    #[test]
    fn bit_integral_dominates_region_integral() {
        let f = circle_poly(CircleVariant::Minus, &rational(1, 4));
        let (o0, o1) = circle_distance_oracles(CircleVariant::Minus, 0.25);
        let region = ca_region_integral(&f, &box2(2), &o0, &o1, &QuadConfig::default());
        // the work-weighted plateau is taller, so the transition ring needs
        // a few more octaves of cells than the plain count integral
        let cfg = QuadConfig { max_cells: 6_000_000, ..QuadConfig::default() };
        let bit = ca_bit_integral(&f, &box2(2), &o0, &o1, 1.0, &cfg);
        assert!(!bit.diverged, "{bit:?} region {region:?}");
        assert!(bit.cells_evaluated < cfg.max_cells, "budget-starved: {bit:?}");
        assert!(bit.value >= 0.95 * region.value, "{} vs {}", bit.value, region.value);
        // pointwise the work weights exceed one in this regime
        let (w0, w1) = unit_width_pair(2, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(93);
        for _ in 0..50 {
            let p = [rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0];
            let g0 = (w0 * o0.eval(&p)).powi(2);
            let g1 = (w1 * o1.eval(&p)).powi(2);
            assert!(h0_raw(g0 / 4.0, 2, 2, 1.0, 4.0) >= 1.0);
            assert!(h1_raw(g1 / 4.0, 2, 2, 1.0, 4.0) >= 1.0);
        }
    }

    #[test]
    fn divergence_dichotomy() {
        let cfg = QuadConfig::default();
        // singular at the origin: both distances vanish together
        for text in ["x1^2-x2^2", "x1^2+x2^2"] {
            let f = MultiPoly::parse(text, 2).unwrap();
            let o0 = generic_lower_oracle(&f, 1.0);
            let o1 = generic_lower_pairing_oracle(&f, 1.0);
            let est = ca_region_integral(&f, &box2(2), &o0, &o1, &cfg);
            assert!(est.diverged, "{text} should diverge");
            let again = ca_region_integral(&f, &box2(2), &o0, &o1, &cfg);
            assert_eq!(est, again, "quadrature must be deterministic");
        }
        // smooth controls converge with room below the caps
        let smooth = MultiPoly::parse("x1^2+x2^2-1", 2).unwrap();
        let o0 = generic_lower_oracle(&smooth, 1.0);
        let o1 = generic_lower_pairing_oracle(&smooth, 1.0);
        let est = ca_region_integral(&smooth, &box2(2), &o0, &o1, &cfg);
        assert!(!est.diverged);
        assert!(est.value.is_finite());
        assert!(est.refinement_depth < cfg.max_depth);

        let f = circle_poly(CircleVariant::Minus, &rational(1, 4));
        let (c0, c1) = circle_distance_oracles(CircleVariant::Minus, 0.25);
        let est = ca_region_integral(&f, &box2(2), &c0, &c1, &cfg);
        assert!(!est.diverged);
        assert!(est.refinement_depth < cfg.max_depth);
    }

    #[test]
    fn count_below_integral_below_worst_case() {
        for (eps_num, eps_den, eps) in [(1i64, 2i64, 0.5f64), (1, 4, 0.25)] {
            let f = circle_poly(CircleVariant::Minus, &rational(eps_num, eps_den));
            let run = run_pv(&f, &box2(2), &EngineConfig { max_depth: 16, ..Default::default() })
                .unwrap();
            assert_eq!(run.counts.depth_capped, 0);
            let count = run.terminal.len() as f64;

            let (o0, o1) = circle_distance_oracles(CircleVariant::Minus, eps);
            let ca = ca_region_integral(&f, &box2(2), &o0, &o1, &QuadConfig::default());
            assert!(!ca.diverged);
            assert!(count <= ca.value, "count {count} above integral {}", ca.value);

            // true gap for this family: the ring where near and pairing
            // distances cross, at half the radius
            let delta_log2 = (eps / 2.0).log2();
            let worst = pv_region_bound(2, 2, 32f64.sqrt(), delta_log2);
            assert!(ca.value.log2() <= worst.log2, "integral above worst case");
            assert!(count.log2() < worst.log2, "adaptive run above worst case");
        }
    }

    #[test]
    fn family_count_floors() {
        assert!(rel_close(mignotte_lower_bound(2, 3, 3, 2.0), 15.588457268119896, 1e-12));
        assert!(rel_close(mignotte_lower_bound(2, 4, 2, 2.0), 8.0, 1e-12));
        let eps = 1000f64.powf(-1.0 / 8.0);
        assert!(rel_close(
            asymptote_family_lower_bound(4, 4, eps, 0.25, 2.0),
            5.535547419842499,
            1e-12
        ));
        assert!(rel_close(asymptote_family_lower_bound(1, 1, 1.0, 1.0, 4.0), 3.75, 1e-12));
        assert_eq!(asymptote_family_lower_bound(3, 2, 0.5, 1.0, 1.0), 0.0);
    }
}
