//! Curve extraction from a 2D subdivision: balance the quadtree so edge
//! neighbors differ by at most one level, read exact corner signs, and
//! connect sign changes into segments.
//!
//! Vertices sit at midpoints of sign-changing leaf sub-edges (no
//! interpolation). Hanging vertices are handled by the balance pass: a
//! coarse leaf's side midpoint is exactly the shared corner of its two
//! finer neighbors, so both sides of an edge agree on the vertex.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use num_traits::{Signed, Zero};

use crate::dyadic::Dyadic;
use crate::interval::Cube;
use crate::poly::{MultiPoly, Rational};
use crate::subdivide::{subdivide_box, SubdivisionResult, TreeNode};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MeshError {
    /// Depth-capped leaves carry no certificate; meshing them would fake a
    /// topology the run never established.
    CappedInput,
    NotTwoDimensional,
}

impl fmt::Display for MeshError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeshError::CappedInput => write!(f, "subdivision has depth-capped regions"),
            MeshError::NotTwoDimensional => write!(f, "meshing requires a 2D subdivision"),
        }
    }
}

impl core::error::Error for MeshError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Cell {
    Leaf(usize),
    Internal,
}

type CellKey = (u32, u64, u64);

/// Edge-balanced quadtree: any two leaves sharing an edge differ in depth
/// by at most one.
#[derive(Clone, Debug)]
pub struct BalancedTree {
    pub leaves: Vec<TreeNode>,
    pub initial: Cube,
    cells: BTreeMap<CellKey, Cell>,
}

fn cell_key(path: &[u8]) -> CellKey {
    let mut ix = 0u64;
    let mut iy = 0u64;
    for &step in path {
        ix = ix << 1 | (step & 1) as u64;
        iy = iy << 1 | (step >> 1 & 1) as u64;
    }
    (path.len() as u32, ix, iy)
}

/// The two depth-(k+1) cells of the same-depth neighbor in direction
/// (dx, dy) that border the shared edge, or None past the boundary.
fn edge_subcells(key: CellKey, dx: i64, dy: i64) -> Option<[CellKey; 2]> {
    let (depth, ix, iy) = key;
    let side = 1u64 << depth;
    let nx = ix.checked_add_signed(dx)?;
    let ny = iy.checked_add_signed(dy)?;
    if nx >= side || ny >= side {
        return None;
    }
    // coordinates of the neighbor's children hugging the shared edge
    let (cx0, cy0) = (
        if dx == 1 { 2 * nx } else if dx == -1 { 2 * nx + 1 } else { 2 * nx },
        if dy == 1 { 2 * ny } else if dy == -1 { 2 * ny + 1 } else { 2 * ny },
    );
    Some(if dx == 0 {
        [(depth + 1, cx0, cy0), (depth + 1, cx0 + 1, cy0)]
    } else {
        [(depth + 1, cx0, cy0), (depth + 1, cx0, cy0 + 1)]
    })
}

const DIRS: [(i64, i64); 4] = [(-1, 0), (1, 0), (0, -1), (0, 1)];

/// Splits leaves until no leaf has an edge neighbor two or more levels
/// deeper. New leaves inherit the parent's status. Only certified
/// (cap-free) 2D subdivisions are accepted.
pub fn balance(result: &SubdivisionResult) -> Result<BalancedTree, MeshError> {
    if result.counts.depth_capped > 0 {
        return Err(MeshError::CappedInput);
    }
    if result.initial.nvars() != 2 {
        return Err(MeshError::NotTwoDimensional);
    }

    let mut leaves: Vec<TreeNode> = result.terminal.clone();
    let mut cells: BTreeMap<CellKey, Cell> = BTreeMap::new();
    for (i, leaf) in leaves.iter().enumerate() {
        cells.insert(cell_key(&leaf.path), Cell::Leaf(i));
        for prefix in 0..leaf.path.len() {
            cells.insert(cell_key(&leaf.path[..prefix]), Cell::Internal);
        }
    }

    // fixpoint: each pass splits every currently violating leaf, and depth
    // is bounded by the deepest input leaf, so this terminates
    loop {
        let mut violators: Vec<usize> = Vec::new();
        for (i, leaf) in leaves.iter().enumerate() {
            let key = cell_key(&leaf.path);
            let violated = DIRS.iter().any(|&(dx, dy)| {
                edge_subcells(key, dx, dy).is_some_and(|subs| {
                    subs.iter().any(|s| cells.get(s) == Some(&Cell::Internal))
                })
            });
            if violated {
                violators.push(i);
            }
        }
        if violators.is_empty() {
            break;
        }
        for i in violators {
            let parent = leaves[i].clone();
            cells.insert(cell_key(&parent.path), Cell::Internal);
            for (ci, cube) in subdivide_box(&parent.cube).into_iter().enumerate() {
                let mut path = parent.path.clone();
                path.push(ci as u8);
                let node = TreeNode { path, cube, status: parent.status };
                if ci == 0 {
                    leaves[i] = node;
                } else {
                    leaves.push(node);
                }
            }
        }
        // re-key everything the splits moved
        cells.retain(|_, c| *c == Cell::Internal);
        for (i, leaf) in leaves.iter().enumerate() {
            cells.insert(cell_key(&leaf.path), Cell::Leaf(i));
        }
    }

    leaves.sort_by(|a, b| a.path.cmp(&b.path));
    let mut cells: BTreeMap<CellKey, Cell> =
        cells.into_iter().filter(|(_, c)| *c == Cell::Internal).collect();
    for (i, leaf) in leaves.iter().enumerate() {
        cells.insert(cell_key(&leaf.path), Cell::Leaf(i));
    }
    Ok(BalancedTree { leaves, initial: result.initial.clone(), cells })
}

fn sign_of(v: &Rational) -> i8 {
    if v.is_zero() {
        0
    } else if v.is_positive() {
        1
    } else {
        -1
    }
}

/// Exact sign of f at every leaf corner. Keys are the corner coordinates;
/// shared corners are evaluated once.
pub fn corner_signs(f: &MultiPoly, tree: &BalancedTree) -> BTreeMap<(Dyadic, Dyadic), i8> {
    let mut signs = BTreeMap::new();
    for leaf in &tree.leaves {
        for (x, y) in corner_points(&leaf.cube) {
            signs.entry((x.clone(), y.clone())).or_insert_with(|| {
                sign_of(&f.evaluate(&[x.to_rational(), y.to_rational()]))
            });
        }
    }
    signs
}

/// SW, SE, NE, NW.
fn corner_points(cube: &Cube) -> [(Dyadic, Dyadic); 4] {
    let h = cube.halfwidth();
    let (cx, cy) = (&cube.center()[0], &cube.center()[1]);
    let (x0, x1) = (cx - h, cx + h);
    let (y0, y1) = (cy - h, cy + h);
    [
        (x0.clone(), y0.clone()),
        (x1.clone(), y0.clone()),
        (x1.clone(), y1.clone()),
        (x0.clone(), y1.clone()),
    ]
}

/// Piecewise-linear curve approximation. Segment endpoints index into
/// `vertices`; vertices shared between leaves are merged.
#[derive(Clone, Debug, Default)]
pub struct Mesh2D {
    pub vertices: Vec<(Rational, Rational)>,
    pub segments: Vec<(usize, usize)>,
}

/// Connects corner sign changes into segments. Per leaf, the boundary is
/// walked cyclically (corners plus hanging midpoints); each maximal arc of
/// boundary points whose sign differs from the center sign contributes one
/// segment joining the arc's two bounding crossings. Zero signs count as
/// positive throughout.
pub fn extract_segments(
    f: &MultiPoly,
    tree: &BalancedTree,
    signs: &BTreeMap<(Dyadic, Dyadic), i8>,
) -> Mesh2D {
    let mut mesh = Mesh2D::default();
    let mut vertex_ids: BTreeMap<(Rational, Rational), usize> = BTreeMap::new();

    for leaf in &tree.leaves {
        let key = cell_key(&leaf.path);
        let corners = corner_points(&leaf.cube);
        let h = leaf.cube.halfwidth();
        let (cx, cy) = (&leaf.cube.center()[0], &leaf.cube.center()[1]);
        // boundary walk: side k runs corner k -> corner k+1, carrying a
        // hanging midpoint iff the same-depth cross-edge cell is split
        let mids = [
            ((cx.clone(), cy - h), (0i64, -1i64)),
            ((cx + h, cy.clone()), (1, 0)),
            ((cx.clone(), cy + h), (0, 1)),
            ((cx - h, cy.clone()), (-1, 0)),
        ];
        let mut pts: Vec<(Dyadic, Dyadic)> = Vec::with_capacity(8);
        for (side, (mid, (dx, dy))) in mids.into_iter().enumerate() {
            pts.push(corners[side].clone());
            let (depth, ix, iy) = key;
            let side_len = 1u64 << depth;
            let hanging = ix
                .checked_add_signed(dx)
                .zip(iy.checked_add_signed(dy))
                .filter(|&(nx, ny)| nx < side_len && ny < side_len)
                .is_some_and(|(nx, ny)| {
                    tree.cells.get(&(depth, nx, ny)) == Some(&Cell::Internal)
                });
            if hanging {
                pts.push(mid);
            }
        }

        let pos = |s: i8| if s == 0 { 1 } else { s };
        let ps: Vec<i8> = pts
            .iter()
            .map(|p| pos(*signs.get(p).expect("balanced tree covers boundary points")))
            .collect();
        let m = pts.len();
        let center_sign = pos(sign_of(
            &f.evaluate(&[cx.to_rational(), cy.to_rational()]),
        ));

        // crossings in cyclic order, each as the mesh vertex at the
        // sub-edge midpoint
        let mut crossings: Vec<usize> = Vec::new();
        let mut arc_signs: Vec<i8> = Vec::new();
        for i in 0..m {
            let j = (i + 1) % m;
            if ps[i] != ps[j] {
                let vx = (&pts[i].0 + &pts[j].0).halve().to_rational();
                let vy = (&pts[i].1 + &pts[j].1).halve().to_rational();
                let next = vertex_ids.len();
                let id = *vertex_ids.entry((vx.clone(), vy.clone())).or_insert(next);
                if id == next {
                    mesh.vertices.push((vx, vy));
                }
                crossings.push(id);
                arc_signs.push(ps[j]);
            }
        }
        // arc after crossing c has constant sign arc_signs[c]; arcs
        // alternate, so each crossing bounds exactly one emitted segment
        for c in 0..crossings.len() {
            if arc_signs[c] != center_sign {
                let d = (c + 1) % crossings.len();
                mesh.segments.push((crossings[c], crossings[d]));
            }
        }
    }
    mesh
}

/// Number of closed loops, or None unless every vertex has degree exactly
/// two (an open or tangled mesh has no loop decomposition).
pub fn closed_loop_count(mesh: &Mesh2D) -> Option<usize> {
    let n = mesh.vertices.len();
    let mut degree = alloc::vec![0usize; n];
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, mut a: usize) -> usize {
        while parent[a] != a {
            parent[a] = parent[parent[a]];
            a = parent[a];
        }
        a
    }
    for &(a, b) in &mesh.segments {
        degree[a] += 1;
        degree[b] += 1;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra] = rb;
    }
    if n == 0 || degree.iter().any(|&d| d != 2) {
        return if n == 0 { Some(0) } else { None };
    }
    let mut roots: Vec<usize> = (0..n).map(|i| find(&mut parent, i)).collect();
    roots.sort_unstable();
    roots.dedup();
    Some(roots.len())
}
