//! Subcommand implementations. Every command prints a `key: value` report
//! to stdout (see formats.rs for the grammar); run and mesh additionally
//! write record, mesh, and SVG files on request. Output is byte-identical
//! across repeat invocations and across --jobs settings.

use std::fmt::{Display, Write as _};
use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pvsubdiv_core::bounds::f64_lower;
use pvsubdiv_core::complexity::{
    asymptote_family_lower_bound, ca_bit_integral, ca_region_integral, circle_distance_oracles,
    directional_upper_oracle, directional_upper_pairing_oracle, generic_lower_oracle,
    generic_lower_pairing_oracle, mignotte_lower_bound, pv_region_bound, separation_delta_log2,
    separation_k_log2, CAEstimate, DistanceOracle, QuadConfig,
};
use pvsubdiv_core::dyadic::Dyadic;
use pvsubdiv_core::families::{self, CircleVariant};
use pvsubdiv_core::interval::Cube;
use pvsubdiv_core::mesh2d::{balance, closed_loop_count, corner_signs, extract_segments};
use pvsubdiv_core::poly::{MultiPoly, Rational};
use pvsubdiv_core::predicates::predicate_constants;
use pvsubdiv_core::subdivide::{
    run_pv_with, EngineConfig, EngineError, Status, SubdivisionResult,
};

use crate::formats;
use crate::par;
use crate::svg;

pub enum CliError {
    /// bad invocation or input: exit 2
    Usage(String),
    /// regions left uncertified at the depth cap where that is fatal: exit 3
    Capped(String),
    /// filesystem trouble: exit 4
    Io(String),
}

impl CliError {
    pub fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Capped(m) | CliError::Io(m) => m,
        }
    }

    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Capped(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

fn usage(m: impl Into<String>) -> CliError {
    CliError::Usage(m.into())
}

#[derive(Parser)]
#[command(name = "pvsubdiv", version, about = "certified subdivision for implicit curves")]
pub struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Subdivide until every region is certified root-free or gradient-stable
    Run(RunArgs),
    /// Subdivide in 2D, then extract an isotopic segment mesh
    Mesh(MeshArgs),
    /// A-priori region-count bound from a distance floor
    Bound(BoundArgs),
    /// Amortized region-count and bit-cost integrals
    Ca(CaArgs),
    /// Sweep a named input family and tabulate counts against known floors
    Bench(BenchArgs),
}

#[derive(Args)]
struct BoxArgs {
    /// Input polynomial in x1..xn, e.g. "x1^2 + x2^2 - 1/4"
    #[arg(long)]
    poly: String,
    /// Box center: comma-separated dyadics ("0,0", "1*2^-2,3/4"); the
    /// component count fixes the dimension
    #[arg(long, default_value = "0,0")]
    center: String,
    /// Box halfwidth, a positive dyadic
    #[arg(long, default_value = "2")]
    halfwidth: String,
}

#[derive(Args)]
struct EngineArgs {
    /// Recursion depth cap
    #[arg(long, default_value_t = 24)]
    max_depth: u32,
    /// Worker threads for the subdivision engine
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    boxargs: BoxArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Fail (exit 3) if any region hits the depth cap uncertified
    #[arg(long)]
    strict: bool,
    /// Write one record line per terminal region to this path
    #[arg(long)]
    records: Option<PathBuf>,
    /// Write an SVG rendering to this path (2D only)
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Args)]
struct MeshArgs {
    #[command(flatten)]
    boxargs: BoxArgs,
    #[command(flatten)]
    engine: EngineArgs,
    /// Write the mesh (v/s lines) to this path
    #[arg(long)]
    records: Option<PathBuf>,
    /// Write an SVG rendering (balanced cells plus segments) to this path
    #[arg(long)]
    svg: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    /// Worst-case route: coefficient height drives a certified root
    /// separation floor
    Rigorous,
    /// Distance-oracle route: the floor comes from --oracle
    Oracle,
}

#[derive(Args)]
struct BoundArgs {
    #[command(flatten)]
    boxargs: BoxArgs,
    #[arg(long, value_enum, default_value_t = Mode::Rigorous)]
    mode: Mode,
    /// Distance oracle: circle-plus:EPS, circle-minus:EPS, or generic:R
    #[arg(long)]
    oracle: Option<String>,
}

#[derive(Args)]
struct CaArgs {
    #[command(flatten)]
    boxargs: BoxArgs,
    /// Distance oracle: circle-plus:EPS, circle-minus:EPS, or generic:R
    #[arg(long)]
    oracle: String,
    /// Quadrature acceptance tolerance per cell
    #[arg(long, default_value_t = 0.01)]
    rel_tol: f64,
    /// Quadrature cell budget
    #[arg(long, default_value_t = 500_000)]
    max_cells: u64,
    /// Seed for the sampling-based oracle bracket check (generic mode)
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also run the subdivision and report the observed region count
    #[arg(long)]
    with_run: bool,
    #[command(flatten)]
    engine: EngineArgs,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    #[value(name = "mignotte", alias = "mignotte-product")]
    Mignotte,
    #[value(name = "asymptote", alias = "monomial")]
    Asymptote,
    #[value(name = "circle_plus", alias = "circle-plus")]
    CirclePlus,
    #[value(name = "circle_minus", alias = "circle-minus")]
    CircleMinus,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(value_enum)]
    family: Family,
    #[command(flatten)]
    engine: EngineArgs,
}

pub fn dispatch() -> Result<(), CliError> {
    match Cli::parse().cmd {
        Cmd::Run(a) => cmd_run(&a),
        Cmd::Mesh(a) => cmd_mesh(&a),
        Cmd::Bound(a) => cmd_bound(&a),
        Cmd::Ca(a) => cmd_ca(&a),
        Cmd::Bench(a) => cmd_bench(&a),
    }
}

fn kv(out: &mut String, key: &str, value: impl Display) {
    let _ = writeln!(out, "{key}: {value}");
}

fn parse_box(a: &BoxArgs) -> Result<(MultiPoly, Cube), CliError> {
    let center: Vec<Dyadic> = a
        .center
        .split(',')
        .map(|c| {
            Dyadic::parse(c).map_err(|e| usage(format!("bad center component: {e}")))
        })
        .collect::<Result<_, _>>()?;
    let hw = Dyadic::parse(&a.halfwidth).map_err(|e| usage(format!("bad halfwidth: {e}")))?;
    if !hw.is_positive() {
        return Err(usage("halfwidth must be positive"));
    }
    let f = MultiPoly::parse(&a.poly, center.len())
        .map_err(|e| usage(format!("bad polynomial: {e}")))?;
    Ok((f, Cube::new(center, hw)))
}

fn require_2d(cube: &Cube) -> Result<(), CliError> {
    if cube.nvars() == 2 {
        Ok(())
    } else {
        Err(usage("this operation is two-dimensional; pass a 2-component --center"))
    }
}

fn engine_usage(e: EngineError) -> CliError {
    usage(e.to_string())
}

fn report_header(out: &mut String, cmd: &str, f: &MultiPoly, cube: &Cube) {
    kv(out, "command", cmd);
    kv(out, "poly", f);
    kv(out, "nvars", f.nvars());
    kv(out, "degree", f.degree());
    let center =
        cube.center().iter().map(formats::dyadic_str).collect::<Vec<_>>().join(",");
    kv(out, "center", center);
    kv(out, "halfwidth", formats::dyadic_str(cube.halfwidth()));
}

fn report_counts(out: &mut String, run: &SubdivisionResult) {
    kv(out, "regions", run.counts.terminal());
    kv(out, "c0_accepted", run.counts.c0_accepted());
    kv(out, "c1_accepted", run.counts.c1_accepted());
    kv(out, "depth_capped", run.counts.depth_capped);
    kv(out, "splits", run.counts.split);
    kv(out, "max_depth_reached", run.max_depth_reached);
    kv(out, "total_nodes", run.total_nodes);
    kv(out, "taylor_shift_bits", run.taylor_shift_bit_total);
}

fn cmd_run(a: &RunArgs) -> Result<(), CliError> {
    let (f, cube) = parse_box(&a.boxargs)?;
    let pool = par::pool(a.engine.jobs).map_err(usage)?;
    let cfg = EngineConfig {
        max_depth: a.engine.max_depth,
        parallelism: a.engine.jobs,
        record_tree: false,
    };
    let run = run_pv_with(&f, &cube, &cfg, &pool).map_err(engine_usage)?;
    let mut out = String::new();
    report_header(&mut out, "run", &f, &cube);
    kv(&mut out, "depth_cap", cfg.max_depth);
    kv(&mut out, "jobs", a.engine.jobs);
    report_counts(&mut out, &run);
    if let Some(p) = &a.records {
        fs::write(p, formats::records_text(&run.terminal))?;
        kv(&mut out, "records_written", p.display());
    }
    if let Some(p) = &a.svg {
        require_2d(&cube)?;
        fs::write(p, svg::render(&run.initial, &run.terminal, None))?;
        kv(&mut out, "svg_written", p.display());
    }
    print!("{out}");
    if a.strict && run.counts.depth_capped > 0 {
        for node in run.terminal.iter().filter(|t| t.status == Status::DepthCapped) {
            println!("capped: {}", formats::record_line(node));
        }
        return Err(CliError::Capped(format!(
            "{} regions still uncertified at depth {}",
            run.counts.depth_capped, cfg.max_depth
        )));
    }
    Ok(())
}

fn cmd_mesh(a: &MeshArgs) -> Result<(), CliError> {
    let (f, cube) = parse_box(&a.boxargs)?;
    require_2d(&cube)?;
    let pool = par::pool(a.engine.jobs).map_err(usage)?;
    let cfg = EngineConfig {
        max_depth: a.engine.max_depth,
        parallelism: a.engine.jobs,
        record_tree: false,
    };
    let run = run_pv_with(&f, &cube, &cfg, &pool).map_err(engine_usage)?;
    if run.counts.depth_capped > 0 {
        return Err(CliError::Capped(format!(
            "{} regions uncertified at depth {}; no isotopy guarantee, refusing to mesh",
            run.counts.depth_capped, cfg.max_depth
        )));
    }
    let tree = balance(&run).map_err(|e| usage(e.to_string()))?;
    let signs = corner_signs(&f, &tree);
    let mesh = extract_segments(&f, &tree, &signs);
    let mut out = String::new();
    report_header(&mut out, "mesh", &f, &cube);
    kv(&mut out, "depth_cap", cfg.max_depth);
    kv(&mut out, "jobs", a.engine.jobs);
    report_counts(&mut out, &run);
    kv(&mut out, "balanced_leaves", tree.leaves.len());
    kv(&mut out, "vertices", mesh.vertices.len());
    kv(&mut out, "segments", mesh.segments.len());
    match closed_loop_count(&mesh) {
        Some(l) => kv(&mut out, "closed_loops", l),
        None => kv(&mut out, "closed_loops", "open"),
    }
    if let Some(p) = &a.records {
        fs::write(p, formats::mesh_text(&mesh))?;
        kv(&mut out, "mesh_written", p.display());
    }
    if let Some(p) = &a.svg {
        fs::write(p, svg::render(&run.initial, &tree.leaves, Some(&mesh)))?;
        kv(&mut out, "svg_written", p.display());
    }
    print!("{out}");
    Ok(())
}

enum OracleChoice {
    CirclePlus(f64),
    CircleMinus(f64),
    Generic(f64),
}

fn parse_oracle(spec: &str) -> Result<OracleChoice, CliError> {
    let (kind, val) = spec
        .split_once(':')
        .ok_or_else(|| usage("oracle spec is kind:value, e.g. circle-minus:1/4"))?;
    let v = parse_ratio(val)?;
    match kind {
        "circle-plus" => Ok(OracleChoice::CirclePlus(v)),
        "circle-minus" => Ok(OracleChoice::CircleMinus(v)),
        "generic" => Ok(OracleChoice::Generic(v)),
        other => Err(usage(format!(
            "unknown oracle kind {other:?} (want circle-plus, circle-minus, or generic)"
        ))),
    }
}

fn parse_ratio(text: &str) -> Result<f64, CliError> {
    let bad = || usage(format!("not a positive number: {text:?}"));
    let v = if let Some((a, b)) = text.split_once('/') {
        let num: f64 = a.trim().parse().map_err(|_| bad())?;
        let den: f64 = b.trim().parse().map_err(|_| bad())?;
        num / den
    } else {
        text.trim().parse().map_err(|_| bad())?
    };
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(bad())
    }
}

fn oracle_label(c: &OracleChoice) -> String {
    match c {
        OracleChoice::CirclePlus(e) => format!("circle-plus:{e}"),
        OracleChoice::CircleMinus(e) => format!("circle-minus:{e}"),
        OracleChoice::Generic(r) => format!("generic:{r}"),
    }
}

fn build_oracles(f: &MultiPoly, c: &OracleChoice) -> (DistanceOracle, DistanceOracle) {
    match c {
        OracleChoice::CirclePlus(e) => circle_distance_oracles(CircleVariant::Plus, *e),
        OracleChoice::CircleMinus(e) => circle_distance_oracles(CircleVariant::Minus, *e),
        OracleChoice::Generic(r) => {
            (generic_lower_oracle(f, *r), generic_lower_pairing_oracle(f, *r))
        }
    }
}

/// Floor of max(dist to f's zero set, dist to the pairing's zero set) over
/// the box. Exact for the circle family; a sampled (non-certified) minimum
/// of the lower-bound oracles otherwise.
fn oracle_delta(
    f: &MultiPoly,
    cube: &Cube,
    choice: &OracleChoice,
) -> Result<(f64, bool), CliError> {
    match choice {
        // d0 = sqrt(r^2/2 + eps^2) >= eps everywhere, attained at the
        // origin where the pairing distance is 0
        OracleChoice::CirclePlus(e) => Ok((*e, true)),
        // max(|r - eps|-ish, r) is minimized near r = eps/2
        OracleChoice::CircleMinus(e) => Ok((e / 2.0, true)),
        OracleChoice::Generic(r) => {
            let (o0, o1) = (generic_lower_oracle(f, *r), generic_lower_pairing_oracle(f, *r));
            let n = cube.nvars();
            let per_axis: usize = match n {
                1 => 4096,
                2 => 64,
                3 => 16,
                _ => 8,
            };
            let c: Vec<f64> = cube.center().iter().map(|d| d.to_f64()).collect();
            let h = cube.halfwidth().to_f64();
            let mut idx = vec![0usize; n];
            let mut best = f64::INFINITY;
            loop {
                let p: Vec<f64> = (0..n)
                    .map(|i| c[i] - h + 2.0 * h * (idx[i] as f64 + 0.5) / per_axis as f64)
                    .collect();
                best = best.min(o0.eval(&p).max(o1.eval(&p)));
                let mut axis = 0;
                loop {
                    if axis == n {
                        return if best > 0.0 {
                            Ok((best, false))
                        } else {
                            Err(usage("sampled distance floor is zero on this box"))
                        };
                    }
                    idx[axis] += 1;
                    if idx[axis] < per_axis {
                        break;
                    }
                    idx[axis] = 0;
                    axis += 1;
                }
            }
        }
    }
}

fn cmd_bound(a: &BoundArgs) -> Result<(), CliError> {
    let (f, cube) = parse_box(&a.boxargs)?;
    if f.is_zero() {
        return Err(usage("zero polynomial has no locus to certify"));
    }
    let n = f.nvars() as u32;
    let d = f.degree();
    let mut out = String::new();
    report_header(&mut out, "bound", &f, &cube);
    if d == 0 {
        kv(&mut out, "note", "constant polynomial: empty zero set, one region suffices");
        kv(&mut out, "region_bound_log2", 0);
        print!("{out}");
        return Ok(());
    }
    let kc = predicate_constants(n, d);
    kv(&mut out, "k0", f64_lower(&kc.k0));
    kv(&mut out, "k1", f64_lower(&kc.k1));
    let diam = cube.width().to_f64() * (n as f64).sqrt();
    kv(&mut out, "diam", diam);
    match a.mode {
        Mode::Oracle => {
            let spec =
                a.oracle.as_deref().ok_or_else(|| usage("--mode oracle requires --oracle"))?;
            let choice = parse_oracle(spec)?;
            kv(&mut out, "mode", "oracle");
            kv(&mut out, "oracle", oracle_label(&choice));
            if d == 1 {
                kv(&mut out, "note", "degree 1: the gradient-stability test accepts every box");
                kv(&mut out, "region_bound_log2", 0);
                print!("{out}");
                return Ok(());
            }
            let (delta, certified) = oracle_delta(&f, &cube, &choice)?;
            kv(&mut out, "delta", delta);
            kv(&mut out, "delta_certified", certified);
            let b = pv_region_bound(n, d, diam, delta.log2());
            kv(&mut out, "region_bound_log2", b.log2);
            kv(&mut out, "region_bound", b.value_f64());
        }
        Mode::Rigorous => {
            kv(&mut out, "mode", "rigorous");
            if d == 1 {
                kv(&mut out, "note", "degree 1: the gradient-stability test accepts every box");
                kv(&mut out, "region_bound_log2", 0);
                print!("{out}");
                return Ok(());
            }
            // the worst-case floor wants integer data: integer coefficients
            // (clear denominators) and integer box corners
            let fi = f.denominator_cleared();
            for corner in cube.corners() {
                for x in &corner {
                    if !x.to_rational().is_integer() {
                        return Err(usage(
                            "rigorous mode needs integer box corners; widen the box or use --mode oracle",
                        ));
                    }
                }
            }
            let stats = fi.coeff_stats();
            let mut h = f64_lower(&stats.height);
            for corner in cube.corners() {
                for x in &corner {
                    h = h.max(x.to_f64().abs());
                }
            }
            kv(&mut out, "height", h);
            let (log2_dist, k) = separation_k_log2(n, d, h)
                .map_err(|e| usage(e.to_string()))?;
            let dl2 = separation_delta_log2(n, d, h, k).map_err(|e| usage(e.to_string()))?;
            kv(&mut out, "separation_k", k);
            kv(&mut out, "pair_distance_log2", log2_dist);
            kv(&mut out, "delta_log2", dl2);
            kv(&mut out, "delta_certified", true);
            let b = pv_region_bound(n, d, diam, dl2);
            kv(&mut out, "region_bound_log2", b.log2);
        }
    }
    print!("{out}");
    Ok(())
}

fn ca_report(out: &mut String, prefix: &str, est: &CAEstimate) {
    kv(out, &format!("{prefix}_estimate"), est.value);
    kv(out, &format!("{prefix}_log2"), est.value.log2());
    kv(out, &format!("{prefix}_diverged"), est.diverged);
    kv(out, &format!("{prefix}_cells"), est.cells_evaluated);
    kv(out, &format!("{prefix}_depth"), est.refinement_depth);
}

fn cmd_ca(a: &CaArgs) -> Result<(), CliError> {
    let (f, cube) = parse_box(&a.boxargs)?;
    if f.is_zero() {
        return Err(usage("zero polynomial has no locus to certify"));
    }
    let choice = parse_oracle(&a.oracle)?;
    let (o0, o1) = build_oracles(&f, &choice);
    let tau = f.denominator_cleared().coeff_stats().bitsize as f64;
    let cfg = QuadConfig { rel_tol: a.rel_tol, max_depth: 30, max_cells: a.max_cells };
    let region = ca_region_integral(&f, &cube, &o0, &o1, &cfg);
    let bit = ca_bit_integral(&f, &cube, &o0, &o1, tau, &cfg);
    let mut out = String::new();
    report_header(&mut out, "ca", &f, &cube);
    kv(&mut out, "oracle", oracle_label(&choice));
    kv(&mut out, "oracle_point", o0.mode_label());
    kv(&mut out, "oracle_pairing", o1.mode_label());
    kv(&mut out, "tau", tau);
    ca_report(&mut out, "region", &region);
    ca_report(&mut out, "bit", &bit);
    if region.diverged || bit.diverged {
        kv(
            &mut out,
            "divergence_hint",
            "both distances vanish together inside the box: singular input, local refinement does not terminate",
        );
    }
    if let OracleChoice::Generic(_) = choice {
        // sampled sanity bracket: lower-bound oracles must sit below the
        // directional upper bounds
        let up0 = directional_upper_oracle(&f, 16, a.seed ^ 0x5eed);
        let up1 = directional_upper_pairing_oracle(&f, 16, a.seed ^ 0xca11);
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
        let c: Vec<f64> = cube.center().iter().map(|d| d.to_f64()).collect();
        let h = cube.halfwidth().to_f64();
        let mut ok = true;
        for _ in 0..64 {
            let p: Vec<f64> =
                c.iter().map(|ci| ci + h * rng.gen_range(-1.0..1.0)).collect();
            if o0.eval(&p) > up0.eval(&p) * (1.0 + 1e-9) + 1e-12
                || o1.eval(&p) > up1.eval(&p) * (1.0 + 1e-9) + 1e-12
            {
                ok = false;
            }
        }
        kv(&mut out, "oracle_bracket_ok", ok);
    }
    if a.with_run {
        let pool = par::pool(a.engine.jobs).map_err(usage)?;
        let cfg = EngineConfig {
            max_depth: a.engine.max_depth,
            parallelism: a.engine.jobs,
            record_tree: false,
        };
        let run = run_pv_with(&f, &cube, &cfg, &pool).map_err(engine_usage)?;
        kv(&mut out, "observed_regions", run.counts.terminal());
        kv(&mut out, "observed_depth_capped", run.counts.depth_capped);
        if !region.diverged {
            kv(
                &mut out,
                "count_within_region_estimate",
                (run.counts.terminal() as f64) <= region.value,
            );
        }
    }
    print!("{out}");
    Ok(())
}

// full refinement depth (the divergence signature is calibrated to it),
// bounded cell budget; budget-capped values print with a ~ prefix
fn bench_quad() -> QuadConfig {
    QuadConfig { rel_tol: 0.01, max_depth: 30, max_cells: 200_000 }
}

fn ca_cell(est: &CAEstimate, budget: u64) -> String {
    if est.diverged {
        String::from("div")
    } else if est.cells_evaluated >= budget {
        format!("~{}", est.value)
    } else {
        format!("{}", est.value)
    }
}

fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, my - slope * mx, r2)
}

fn origin_box(hw: i64) -> Cube {
    Cube::new(vec![Dyadic::zero(), Dyadic::zero()], Dyadic::from_int(hw))
}

/// Terminal region meets the probe segment {(x, 0) : lo <= x <= hi}. Exact.
fn meets_segment(cube: &Cube, lo: &Rational, hi: &Rational) -> bool {
    let zero = Dyadic::zero().to_rational();
    let cx = cube.center()[0].to_rational();
    let cy = cube.center()[1].to_rational();
    let h = cube.halfwidth().to_rational();
    &cy - &h <= zero && zero <= &cy + &h && &cx - &h <= *hi && *lo <= &cx + &h
}

fn cmd_bench(a: &BenchArgs) -> Result<(), CliError> {
    let pool = par::pool(a.engine.jobs).map_err(usage)?;
    let cfg = EngineConfig {
        max_depth: a.engine.max_depth,
        parallelism: a.engine.jobs,
        record_tree: false,
    };
    let qcfg = bench_quad();
    let mut out = String::new();
    kv(&mut out, "command", "bench");
    match a.family {
        Family::CirclePlus | Family::CircleMinus => {
            let variant = if matches!(a.family, Family::CirclePlus) {
                kv(&mut out, "family", "circle_plus");
                CircleVariant::Plus
            } else {
                kv(&mut out, "family", "circle_minus");
                CircleVariant::Minus
            };
            kv(&mut out, "columns", "eps regions ca_region");
            let cube = origin_box(2);
            let mut xs = Vec::new();
            let mut ys = Vec::new();
            for k in 1..=8i64 {
                let eps = Dyadic::pow2(-k).to_rational();
                let f = families::circle_poly(variant, &eps);
                let run = run_pv_with(&f, &cube, &cfg, &pool).map_err(engine_usage)?;
                let (o0, o1) = circle_distance_oracles(variant, 0.5f64.powi(k as i32));
                let ca = ca_region_integral(&f, &cube, &o0, &o1, &qcfg);
                let count = run.counts.terminal();
                kv(
                    &mut out,
                    "row",
                    format!("2^-{k} {count} {}", ca_cell(&ca, qcfg.max_cells)),
                );
                xs.push(k as f64);
                ys.push(count as f64);
            }
            let (slope, intercept, r2) = linear_fit(&xs, &ys);
            kv(&mut out, "fit_slope", slope);
            kv(&mut out, "fit_intercept", intercept);
            kv(&mut out, "fit_r2", r2);
            kv(&mut out, "growth_ratio", ys[7] / ys[0]);
        }
        Family::Mignotte => {
            kv(&mut out, "family", "mignotte");
            kv(&mut out, "columns", "a regions floor ca_region");
            let cube = origin_box(1);
            for a_par in [2u32, 3, 4] {
                let f = families::mignotte_product(a_par, 3);
                let run = run_pv_with(&f, &cube, &cfg, &pool).map_err(engine_usage)?;
                let (o0, o1) =
                    (generic_lower_oracle(&f, 0.5), generic_lower_pairing_oracle(&f, 0.5));
                let ca = ca_region_integral(&f, &cube, &o0, &o1, &qcfg);
                let floor = mignotte_lower_bound(2, 3, a_par, 2.0);
                kv(
                    &mut out,
                    "row",
                    format!(
                        "{a_par} {} {floor} {}",
                        run.counts.terminal(),
                        ca_cell(&ca, qcfg.max_cells)
                    ),
                );
            }
        }
        Family::Asymptote => {
            kv(&mut out, "family", "asymptote");
            kv(&mut out, "columns", "c regions segment_regions floor ca_region");
            let cube = origin_box(2);
            let lo = Dyadic::pow2(-2).to_rational();
            let hi = Dyadic::from_int(2).to_rational();
            for c in [10u64, 1000, 100_000] {
                let f = MultiPoly::parse(&format!("{c}x1^4x2^4-1"), 2)
                    .expect("family template parses");
                let run = run_pv_with(&f, &cube, &cfg, &pool).map_err(engine_usage)?;
                let seg = run
                    .terminal
                    .iter()
                    .filter(|t| meets_segment(&t.cube, &lo, &hi))
                    .count();
                let (o0, o1) =
                    (generic_lower_oracle(&f, 0.5), generic_lower_pairing_oracle(&f, 0.5));
                let ca = ca_region_integral(&f, &cube, &o0, &o1, &qcfg);
                let floor =
                    asymptote_family_lower_bound(4, 4, (c as f64).powf(-0.125), 0.25, 2.0);
                kv(
                    &mut out,
                    "row",
                    format!(
                        "{c} {} {seg} {floor} {}",
                        run.counts.terminal(),
                        ca_cell(&ca, qcfg.max_cells)
                    ),
                );
            }
        }
    }
    print!("{out}");
    Ok(())
}
