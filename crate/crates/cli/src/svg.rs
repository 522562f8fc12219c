//! SVG rendering of a subdivision (and optionally its mesh). Coordinates
//! are exact decimal expansions of the dyadic data, so the same run always
//! produces the same bytes. The y axis is negated so mathematical up is up.

use pvsubdiv_core::dyadic::{to_decimal_string, Dyadic};
use pvsubdiv_core::interval::Cube;
use pvsubdiv_core::mesh2d::Mesh2D;
use pvsubdiv_core::poly::Rational;
use pvsubdiv_core::subdivide::{Status, TreeNode};

fn dec(d: &Dyadic) -> String {
    to_decimal_string(d)
}

fn fill(status: &Status) -> &'static str {
    match status {
        Status::Accepted(0) => "#eef2fb",
        Status::Accepted(_) => "#e7f6ec",
        Status::Split => "#ffffff",
        Status::DepthCapped => "#f6d5d5",
    }
}

pub fn render(initial: &Cube, leaves: &[TreeNode], mesh: Option<&Mesh2D>) -> String {
    assert_eq!(initial.nvars(), 2, "svg output is two-dimensional");
    let hw = initial.halfwidth();
    let min_x = &initial.center()[0] - hw;
    let min_y = -&(&initial.center()[1] + hw);
    let side = hw.double();
    let grid_stroke = hw.mul_pow2(-9);
    let curve_stroke = hw.mul_pow2(-6);
    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"{} {} {} {}\">\n",
        dec(&min_x),
        dec(&min_y),
        dec(&side),
        dec(&side)
    ));
    for leaf in leaves {
        let h = leaf.cube.halfwidth();
        let x = &leaf.cube.center()[0] - h;
        let y = -&(&leaf.cube.center()[1] + h);
        out.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"{}\" \
             stroke=\"#9aa3b2\" stroke-width=\"{}\"/>\n",
            dec(&x),
            dec(&y),
            dec(&h.double()),
            dec(&h.double()),
            fill(&leaf.status),
            dec(&grid_stroke)
        ));
    }
    if let Some(m) = mesh {
        for &(a, b) in &m.segments {
            let (x1, y1) = vertex(&m.vertices[a]);
            let (x2, y2) = vertex(&m.vertices[b]);
            out.push_str(&format!(
                "<line x1=\"{x1}\" y1=\"{y1}\" x2=\"{x2}\" y2=\"{y2}\" \
                 stroke=\"#16324f\" stroke-width=\"{}\" stroke-linecap=\"round\"/>\n",
                dec(&curve_stroke)
            ));
        }
    }
    out.push_str("</svg>\n");
    out
}

// mesh vertices sit on edges of dyadic cells, hence are dyadic themselves
fn vertex(v: &(Rational, Rational)) -> (String, String) {
    let x = Dyadic::from_rational(&v.0).expect("mesh vertex coordinates are dyadic");
    let y = Dyadic::from_rational(&v.1).expect("mesh vertex coordinates are dyadic");
    (dec(&x), dec(&(-&y)))
}
