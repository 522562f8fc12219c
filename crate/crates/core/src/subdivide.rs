//! The subdivision engine: 2^n-way bisection of a cube until a stopping
//! criterion accepts each region or the depth cap is reached.
//!
//! `run_generic` drives arbitrary criteria. `run_pv` instantiates the
//! exclusion/alignment pair and keeps the per-node shifted polynomials
//! incrementally: a child's Taylor shift is the parent's shifted polynomial
//! re-shifted by +-halfwidth/2 per axis, so the bulk of the work is
//! shift-and-add on dyadic mantissas.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::One;

use crate::dyadic::Dyadic;
use crate::interval::Cube;
use crate::poly::{gradient_pair, MultiIndex, MultiPoly, Rational};

/// Terminal or internal disposition of a node. `Accepted(i)` means
/// criterion i fired; the standard pair is 0 = exclusion, 1 = gradient
/// alignment.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Accepted(usize),
    Split,
    DepthCapped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Accepted(i) => write!(f, "ACCEPTED_C{i}"),
            Status::Split => write!(f, "SPLIT"),
            Status::DepthCapped => write!(f, "DEPTH_CAPPED"),
        }
    }
}

/// One node of the subdivision tree. `path` lists child indices from the
/// root; bit k of an index selects the upper half along axis k.
#[derive(Clone, Debug)]
pub struct TreeNode {
    pub path: Vec<u8>,
    pub cube: Cube,
    pub status: Status,
}

impl TreeNode {
    pub fn depth(&self) -> u32 {
        self.path.len() as u32
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Hard recursion cap; nodes failing every criterion at this depth are
    /// reported as DEPTH_CAPPED instead of recursing forever.
    pub max_depth: u32,
    /// Worker hint for the caller's Parallelism impl; the engine itself is
    /// agnostic.
    pub parallelism: usize,
    /// Record internal (SPLIT) nodes as well as terminals.
    pub record_tree: bool,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig { max_depth: 24, parallelism: 1, record_tree: false }
    }
}

/// Per-criterion and structural node counts.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub accepted: Vec<u64>,
    pub split: u64,
    pub depth_capped: u64,
}

impl Counts {
    pub fn c0_accepted(&self) -> u64 {
        self.accepted.first().copied().unwrap_or(0)
    }

    pub fn c1_accepted(&self) -> u64 {
        self.accepted.get(1).copied().unwrap_or(0)
    }

    pub fn terminal(&self) -> u64 {
        self.accepted.iter().sum::<u64>() + self.depth_capped
    }
}

/// Output of a subdivision run. `terminal` is in breadth-first
/// path-lexicographic order; `internal` is populated only under
/// `record_tree` and holds the SPLIT nodes in the same order.
#[derive(Clone, Debug)]
pub struct SubdivisionResult {
    pub initial: Cube,
    pub terminal: Vec<TreeNode>,
    pub internal: Vec<TreeNode>,
    pub counts: Counts,
    pub max_depth_reached: u32,
    pub total_nodes: u64,
    /// Sum over evaluated nodes of (depth + initial coordinate bit-size),
    /// the growth model for the per-node Taylor-shift center size.
    pub taylor_shift_bit_total: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EngineError {
    ZeroPolynomial,
    NoCriteria,
    DimensionMismatch,
}

impl fmt::Display for EngineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EngineError::ZeroPolynomial => write!(f, "zero polynomial has no locus to certify"),
            EngineError::NoCriteria => write!(f, "at least one stopping criterion is required"),
            EngineError::DimensionMismatch => {
                write!(f, "polynomial and box dimensions disagree")
            }
        }
    }
}

impl core::error::Error for EngineError {}

/// Splits a cube into its 2^n children: halfwidth halves, centers move by
/// +-halfwidth/2 along each axis, child index bit k picking the upper half
/// along axis k.
pub fn subdivide_box(j: &Cube) -> Vec<Cube> {
    let n = j.nvars();
    let child_hw = j.halfwidth().halve();
    (0..1usize << n)
        .map(|i| {
            let center: Vec<Dyadic> = (0..n)
                .map(|axis| {
                    if i >> axis & 1 == 1 {
                        &j.center()[axis] + &child_hw
                    } else {
                        &j.center()[axis] - &child_hw
                    }
                })
                .collect();
            Cube::new(center, child_hw.clone())
        })
        .collect()
}

/// Deterministic map over a work frontier. The engine only requires that
/// output order equal input order; implementations may run items
/// concurrently.
pub trait Parallelism {
    fn run<T, U, F>(&self, items: Vec<T>, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Sync;
}

/// In-order single-threaded executor.
pub struct Serial;

impl Parallelism for Serial {
    fn run<T, U, F>(&self, items: Vec<T>, f: F) -> Vec<U>
    where
        T: Send,
        U: Send,
        F: Fn(T) -> U + Sync,
    {
        items.into_iter().map(f).collect()
    }
}

enum NodeOutcome<S> {
    Terminal(Status),
    Split(Vec<S>),
}

/// Generic breadth-first engine over abstract per-node states. `eval`
/// returns the node's disposition, producing child states on split.
fn drive<S, P, F>(
    initial: Cube,
    root: S,
    root_bits: u64,
    cfg: &EngineConfig,
    par: &P,
    ncrit: usize,
    eval: F,
) -> SubdivisionResult
where
    S: Send,
    P: Parallelism,
    F: Fn(&S, &Cube, u32) -> NodeOutcome<S> + Sync,
{
    struct Pending<S> {
        path: Vec<u8>,
        cube: Cube,
        state: S,
    }

    let mut counts = Counts { accepted: alloc::vec![0; ncrit], ..Counts::default() };
    let mut terminal = Vec::new();
    let mut internal = Vec::new();
    let mut total_nodes = 0u64;
    let mut max_depth_reached = 0u32;
    let mut bit_total = 0u64;
    let mut frontier =
        alloc::vec![Pending { path: Vec::new(), cube: initial.clone(), state: root }];

    while !frontier.is_empty() {
        let depth = frontier[0].path.len() as u32;
        max_depth_reached = max_depth_reached.max(depth);
        total_nodes += frontier.len() as u64;
        bit_total += frontier.len() as u64 * (depth as u64 + root_bits);

        let results = par.run(frontier, |node| {
            let outcome = eval(&node.state, &node.cube, depth);
            (node.path, node.cube, outcome)
        });

        let mut next = Vec::new();
        for (path, cube, outcome) in results {
            match outcome {
                NodeOutcome::Terminal(status) => {
                    match status {
                        Status::Accepted(i) => counts.accepted[i] += 1,
                        Status::DepthCapped => counts.depth_capped += 1,
                        Status::Split => unreachable!("split is not terminal"),
                    }
                    terminal.push(TreeNode { path, cube, status });
                }
                NodeOutcome::Split(children) => {
                    counts.split += 1;
                    let child_cubes = subdivide_box(&cube);
                    if cfg.record_tree {
                        internal.push(TreeNode {
                            path: path.clone(),
                            cube,
                            status: Status::Split,
                        });
                    }
                    debug_assert_eq!(children.len(), child_cubes.len());
                    for (i, (state, ccube)) in
                        children.into_iter().zip(child_cubes).enumerate()
                    {
                        let mut cpath = path.clone();
                        cpath.push(i as u8);
                        next.push(Pending { path: cpath, cube: ccube, state });
                    }
                }
            }
        }
        frontier = next;
    }

    SubdivisionResult {
        initial,
        terminal,
        internal,
        counts,
        max_depth_reached,
        total_nodes,
        taylor_shift_bit_total: bit_total,
    }
}

/// Runs the engine with caller-supplied criteria, first true criterion
/// wins. Criteria must be pure; the terminal partition is independent of
/// evaluation order.
pub fn run_generic<P: Parallelism>(
    i: &Cube,
    criteria: &[&(dyn Fn(&Cube) -> bool + Sync)],
    cfg: &EngineConfig,
    par: &P,
) -> Result<SubdivisionResult, EngineError> {
    if criteria.is_empty() {
        return Err(EngineError::NoCriteria);
    }
    assert!(cfg.max_depth >= 1);
    let root_bits = input_bits(i);
    Ok(drive(i.clone(), (), root_bits, cfg, par, criteria.len(), |_, cube, depth| {
        for (k, c) in criteria.iter().enumerate() {
            if c(cube) {
                return NodeOutcome::Terminal(Status::Accepted(k));
            }
        }
        if depth >= cfg.max_depth {
            NodeOutcome::Terminal(Status::DepthCapped)
        } else {
            NodeOutcome::Split(alloc::vec![(); 1 << cube.nvars()])
        }
    }))
}

fn input_bits(i: &Cube) -> u64 {
    i.center()
        .iter()
        .chain(core::iter::once(i.halfwidth()))
        .map(Dyadic::bitsize)
        .max()
        .unwrap_or(0)
}

/// Sparse polynomial with dyadic coefficients, the working form inside the
/// run loop. Shifting by a dyadic offset keeps coefficients dyadic, so the
/// predicates reduce to exact mantissa comparisons.
#[derive(Clone, Debug)]
struct DyadicPoly {
    nvars: usize,
    terms: BTreeMap<MultiIndex, Dyadic>,
}

impl DyadicPoly {
    /// Clears the odd parts of the denominators (a positive constant
    /// scaling, which no predicate outcome depends on).
    fn from_scaled(f: &MultiPoly) -> DyadicPoly {
        let mut odd_lcm = BigInt::one();
        for (_, c) in f.terms() {
            let den = c.denom();
            let odd = den >> den.trailing_zeros().unwrap_or(0);
            odd_lcm = odd_lcm.lcm(&odd);
        }
        let scale = Rational::from_integer(odd_lcm);
        let mut terms = BTreeMap::new();
        for (k, c) in f.terms() {
            let scaled = c * &scale;
            let d = Dyadic::from_rational(&scaled)
                .expect("odd denominator parts were cleared");
            if !d.is_zero() {
                terms.insert(k.clone(), d);
            }
        }
        DyadicPoly { nvars: f.nvars(), terms }
    }

    /// Max degree in one variable.
    fn axis_degree(&self, axis: usize) -> u32 {
        self.terms.keys().map(|k| k[axis]).max().unwrap_or(0)
    }

    /// Replaces x_axis by x_axis + a.
    fn shift_axis(&self, axis: usize, a: &Dyadic) -> DyadicPoly {
        if a.is_zero() {
            return self.clone();
        }
        let deg = self.axis_degree(axis) as usize;
        if deg == 0 {
            return self.clone();
        }
        // group terms by the key with the shifted axis zeroed
        let mut groups: BTreeMap<MultiIndex, Vec<Dyadic>> = BTreeMap::new();
        for (k, c) in &self.terms {
            let mut base = k.clone();
            let e = base[axis] as usize;
            base[axis] = 0;
            let row = groups.entry(base).or_insert_with(|| alloc::vec![Dyadic::zero(); deg + 1]);
            row[e] = c.clone();
        }
        let mut terms = BTreeMap::new();
        for (base, mut row) in groups {
            // synthetic Taylor ladder: after the sweeps, row[j] holds the
            // coefficient of x^j in sum row[e] (x + a)^e
            for i in 0..row.len().saturating_sub(1) {
                for j in (i..row.len() - 1).rev() {
                    let t = &row[j + 1] * a;
                    row[j] = &row[j] + &t;
                }
            }
            for (e, c) in row.into_iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let mut k = base.clone();
                k[axis] = e as u32;
                terms.insert(k, c);
            }
        }
        DyadicPoly { nvars: self.nvars, terms }
    }

    fn shift(&self, offsets: &[Dyadic]) -> DyadicPoly {
        debug_assert_eq!(offsets.len(), self.nvars);
        let mut out = self.clone();
        for (axis, a) in offsets.iter().enumerate() {
            out = out.shift_axis(axis, a);
        }
        out
    }

    /// Exclusion check on the centered form at the represented midpoint:
    /// true iff |constant term| > sum over |alpha|>=1 of |c_alpha| hw^|alpha|.
    fn excludes_zero(&self, halfwidth: &Dyadic) -> bool {
        let mut mid_abs = Dyadic::zero();
        let mut radius = Dyadic::zero();
        let mut powers: Vec<Dyadic> = alloc::vec![Dyadic::one()];
        for (k, c) in &self.terms {
            let total: u32 = k.iter().sum();
            if total == 0 {
                mid_abs = c.abs();
                continue;
            }
            while powers.len() <= total as usize {
                let next = &powers[powers.len() - 1] * halfwidth;
                powers.push(next);
            }
            radius = &radius + &(&c.abs() * &powers[total as usize]);
        }
        mid_abs.cmp_value(&radius) == core::cmp::Ordering::Greater
    }
}

/// Per-node state of the standard run: both polynomials shifted to the
/// node's center.
struct PvState {
    f: DyadicPoly,
    g: DyadicPoly,
}

/// Runs the standard exclusion-then-alignment subdivision on f over I with
/// the serial executor.
pub fn run_pv(f: &MultiPoly, i: &Cube, cfg: &EngineConfig) -> Result<SubdivisionResult, EngineError> {
    run_pv_with(f, i, cfg, &Serial)
}

/// `run_pv` with a caller-chosen executor. Output is bit-identical across
/// executors: all arithmetic is exact and assembly is order-normalized.
pub fn run_pv_with<P: Parallelism>(
    f: &MultiPoly,
    i: &Cube,
    cfg: &EngineConfig,
    par: &P,
) -> Result<SubdivisionResult, EngineError> {
    if f.is_zero() {
        return Err(EngineError::ZeroPolynomial);
    }
    if f.nvars() != i.nvars() {
        return Err(EngineError::DimensionMismatch);
    }
    assert!(cfg.max_depth >= 1);
    let n = f.nvars();
    let g = gradient_pair(f);
    let fd = DyadicPoly::from_scaled(f);
    let gd = DyadicPoly::from_scaled(&g);

    // one-off exact shift to the root center; children then move by
    // +-hw/2 per axis
    let root_f = fd.shift(i.center());
    let doubled: Vec<Dyadic> = i.center().iter().chain(i.center()).cloned().collect();
    let root_g = gd.shift(&doubled);
    let root_bits = input_bits(i);

    Ok(drive(
        i.clone(),
        PvState { f: root_f, g: root_g },
        root_bits,
        cfg,
        par,
        2,
        |state, cube, depth| {
            let hw = cube.halfwidth();
            if state.f.excludes_zero(hw) {
                return NodeOutcome::Terminal(Status::Accepted(0));
            }
            if state.g.excludes_zero(hw) {
                return NodeOutcome::Terminal(Status::Accepted(1));
            }
            if depth >= cfg.max_depth {
                return NodeOutcome::Terminal(Status::DepthCapped);
            }
            let step = hw.halve();
            let children = (0..1usize << n)
                .map(|ci| {
                    let offsets: Vec<Dyadic> = (0..n)
                        .map(|axis| {
                            if ci >> axis & 1 == 1 { step.clone() } else { -&step }
                        })
                        .collect();
                    let doubled: Vec<Dyadic> =
                        offsets.iter().chain(offsets.iter()).cloned().collect();
                    PvState { f: state.f.shift(&offsets), g: state.g.shift(&doubled) }
                })
                .collect();
            NodeOutcome::Split(children)
        },
    ))
}

/// Boxed criterion list adapter so `run_generic` can take closures stored
/// by the caller.
pub type Criterion<'a> = Box<dyn Fn(&Cube) -> bool + Sync + 'a>;
