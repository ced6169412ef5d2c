//! Hit maps: how many rows each SOM unit attracted, as text and as SVG.

use std::fmt::Write;

use gdpsom_core::som::{SomModel, Topology};

pub fn text(model: &SomModel, hits: &[usize]) -> String {
    let grid = model.config.grid;
    let topology = match grid.topology {
        Topology::Hexagonal => "hexagonal",
        Topology::Rectangular => "rectangular",
    };
    let mut s = format!(
        "SOM hit map, {}x{} {topology} grid (class: rows)\n",
        grid.rows, grid.cols
    );
    for r in 0..grid.rows {
        if grid.topology == Topology::Hexagonal && r % 2 == 1 {
            s.push_str("       ");
        }
        for c in 0..grid.cols {
            let u = r * grid.cols + c;
            let _ = write!(s, " [{:>3}:{:>6}]", u + 1, hits.get(u).copied().unwrap_or(0));
        }
        s.push('\n');
    }
    s
}

fn hexagon(cx: f64, cy: f64, radius: f64) -> String {
    // Pointy-top hexagon.
    (0..6)
        .map(|k| {
            let a = std::f64::consts::PI / 180.0 * (60.0 * k as f64 - 30.0);
            format!("{:.2},{:.2}", cx + radius * a.cos(), cy + radius * a.sin())
        })
        .collect::<Vec<_>>()
        .join(" ")
}

/// Static SVG: one cell per unit at its grid position, shaded by hit count.
pub fn svg(model: &SomModel, hits: &[usize]) -> String {
    const SCALE: f64 = 100.0;
    const MARGIN: f64 = 70.0;
    let max_hits = hits.iter().copied().max().unwrap_or(0).max(1) as f64;
    let (mut max_x, mut max_y) = (0.0f64, 0.0f64);
    for p in &model.positions {
        max_x = max_x.max(p[0]);
        max_y = max_y.max(p[1]);
    }
    let width = max_x * SCALE + 2.0 * MARGIN;
    let height = max_y * SCALE + 2.0 * MARGIN + 20.0;
    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0}" height="{height:.0}" viewBox="0 0 {width:.0} {height:.0}">"#
    );
    let _ = writeln!(s, r#"  <rect width="100%" height="100%" fill="white"/>"#);
    for (u, p) in model.positions.iter().enumerate() {
        let n = hits.get(u).copied().unwrap_or(0);
        let shade = n as f64 / max_hits;
        // White (no hits) to deep blue (most hits).
        let channel = |full: f64| (255.0 - (255.0 - full) * shade).round() as u8;
        let fill = format!("#{:02x}{:02x}{:02x}", channel(33.0), channel(102.0), channel(172.0));
        let (cx, cy) = (MARGIN + p[0] * SCALE, MARGIN + p[1] * SCALE);
        let shape = match model.config.grid.topology {
            Topology::Hexagonal => format!(
                r##"<polygon points="{}" fill="{fill}" stroke="#444" stroke-width="2"/>"##,
                hexagon(cx, cy, SCALE / 3f64.sqrt())
            ),
            Topology::Rectangular => format!(
                r##"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{fill}" stroke="#444" stroke-width="2"/>"##,
                cx - SCALE / 2.0,
                cy - SCALE / 2.0,
                SCALE,
                SCALE
            ),
        };
        let text_fill = if shade > 0.55 { "white" } else { "black" };
        let _ = writeln!(s, "  <g>");
        let _ = writeln!(s, "    {shape}");
        let _ = writeln!(
            s,
            r#"    <text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="14" fill="{text_fill}">class {}</text>"#,
            cy - 6.0,
            u + 1
        );
        let _ = writeln!(
            s,
            r#"    <text x="{cx:.2}" y="{:.2}" text-anchor="middle" font-family="sans-serif" font-size="18" font-weight="bold" fill="{text_fill}">{n}</text>"#,
            cy + 16.0
        );
        let _ = writeln!(s, "  </g>");
    }
    s.push_str("</svg>\n");
    s
}
