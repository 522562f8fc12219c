//! Flat-file grammars. Three of them:
//!
//!   records   one terminal region per line, breadth-first order:
//!             `path=0.3.1 center=1*2^-1,-3*2^-2 hw=1*2^-2 status=ACCEPTED_C0`
//!             (`path=-` is the root)
//!   mesh      `v <x> <y>` vertex lines (exact rationals) followed by
//!             `s <i> <j>` segment lines indexing them
//!   report    `key: value` lines, what every subcommand prints on stdout
//!
//! Writers are deterministic; readers accept exactly what the writers emit.

use pvsubdiv_core::dyadic::Dyadic;
use pvsubdiv_core::mesh2d::Mesh2D;
use pvsubdiv_core::poly::Rational;
use pvsubdiv_core::subdivide::{Status, TreeNode};

pub fn dyadic_str(d: &Dyadic) -> String {
    format!("{}*2^{}", d.mantissa(), d.exp())
}

pub fn path_str(path: &[u8]) -> String {
    if path.is_empty() {
        String::from("-")
    } else {
        path.iter().map(|b| b.to_string()).collect::<Vec<_>>().join(".")
    }
}

pub fn record_line(node: &TreeNode) -> String {
    let center =
        node.cube.center().iter().map(dyadic_str).collect::<Vec<_>>().join(",");
    format!(
        "path={} center={} hw={} status={}",
        path_str(&node.path),
        center,
        dyadic_str(node.cube.halfwidth()),
        node.status
    )
}

pub fn records_text(nodes: &[TreeNode]) -> String {
    let mut out = String::new();
    for n in nodes {
        out.push_str(&record_line(n));
        out.push('\n');
    }
    out
}

pub struct RecordLine {
    pub path: Vec<u8>,
    pub center: Vec<Dyadic>,
    pub halfwidth: Dyadic,
    pub status: Status,
}

pub fn parse_records(text: &str) -> Result<Vec<RecordLine>, String> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        out.push(parse_record_line(line).map_err(|e| format!("line {}: {e}", ln + 1))?);
    }
    Ok(out)
}

fn parse_record_line(line: &str) -> Result<RecordLine, String> {
    let mut path = None;
    let mut center = None;
    let mut hw = None;
    let mut status = None;
    for tok in line.split_whitespace() {
        let (k, v) = tok.split_once('=').ok_or_else(|| format!("expected key=value, got {tok:?}"))?;
        match k {
            "path" => path = Some(parse_path(v)?),
            "center" => {
                center = Some(
                    v.split(',')
                        .map(|c| Dyadic::parse(c).map_err(|e| e.to_string()))
                        .collect::<Result<Vec<_>, _>>()?,
                )
            }
            "hw" => hw = Some(Dyadic::parse(v).map_err(|e| e.to_string())?),
            "status" => status = Some(parse_status(v)?),
            other => return Err(format!("unknown key {other:?}")),
        }
    }
    Ok(RecordLine {
        path: path.ok_or("missing path")?,
        center: center.ok_or("missing center")?,
        halfwidth: hw.ok_or("missing hw")?,
        status: status.ok_or("missing status")?,
    })
}

fn parse_path(text: &str) -> Result<Vec<u8>, String> {
    if text == "-" {
        return Ok(Vec::new());
    }
    text.split('.')
        .map(|p| p.parse::<u8>().map_err(|_| format!("bad path step {p:?}")))
        .collect()
}

fn parse_status(text: &str) -> Result<Status, String> {
    if let Some(i) = text.strip_prefix("ACCEPTED_C") {
        return i
            .parse::<usize>()
            .map(Status::Accepted)
            .map_err(|_| format!("bad status {text:?}"));
    }
    match text {
        "SPLIT" => Ok(Status::Split),
        "DEPTH_CAPPED" => Ok(Status::DepthCapped),
        _ => Err(format!("bad status {text:?}")),
    }
}

pub fn mesh_text(mesh: &Mesh2D) -> String {
    let mut out = String::new();
    for (x, y) in &mesh.vertices {
        out.push_str(&format!("v {x} {y}\n"));
    }
    for (a, b) in &mesh.segments {
        out.push_str(&format!("s {a} {b}\n"));
    }
    out
}

pub fn parse_mesh(text: &str) -> Result<Mesh2D, String> {
    let mut mesh = Mesh2D::default();
    for (ln, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let err = |m: &str| format!("line {}: {m}", ln + 1);
        let mut parts = line.split_whitespace();
        match parts.next() {
            Some("v") => {
                let x = parts.next().ok_or_else(|| err("missing x"))?;
                let y = parts.next().ok_or_else(|| err("missing y"))?;
                let xq = x.parse::<Rational>().map_err(|_| err("bad rational"))?;
                let yq = y.parse::<Rational>().map_err(|_| err("bad rational"))?;
                mesh.vertices.push((xq, yq));
            }
            Some("s") => {
                let a = parts.next().ok_or_else(|| err("missing index"))?;
                let b = parts.next().ok_or_else(|| err("missing index"))?;
                let ai = a.parse::<usize>().map_err(|_| err("bad index"))?;
                let bi = b.parse::<usize>().map_err(|_| err("bad index"))?;
                if ai >= mesh.vertices.len() || bi >= mesh.vertices.len() {
                    return Err(err("segment index out of range"));
                }
                mesh.segments.push((ai, bi));
            }
            Some(other) => return Err(err(&format!("unknown row kind {other:?}"))),
            None => {}
        }
        if parts.next().is_some() {
            return Err(err("trailing fields"));
        }
    }
    Ok(mesh)
}

/// `key: value` lines in emission order. Unknown lines are an error so the
/// report grammar stays honest.
pub fn parse_report(text: &str) -> Result<Vec<(String, String)>, String> {
    let mut out = Vec::new();
    for (ln, line) in text.lines().enumerate() {
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once(": ")
            .ok_or_else(|| format!("line {}: expected `key: value`", ln + 1))?;
        out.push((String::from(k), String::from(v)));
    }
    Ok(out)
}
