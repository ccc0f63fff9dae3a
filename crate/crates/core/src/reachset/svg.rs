use std::fmt::Write;

use super::{ReachableSet2D, SpiralRegion};

#[derive(Debug, Clone, PartialEq)]
pub struct SvgOptions {
    /// Width and height in pixels.
    pub size: u32,
    /// Overlay of the exactly reachable spiral region.
    pub spiral: Option<SpiralRegion>,
    pub title: Option<String>,
}

impl Default for SvgOptions {
    fn default() -> Self {
        Self {
            size: 600,
            spiral: None,
            title: None,
        }
    }
}

/// Fixed-style SVG of the `(z, R)` plane: unit circle, set boundary, optional
/// spiral overlay. Output is deterministic so figures can be diffed as text.
pub fn render_svg(set: &ReachableSet2D, opts: &SvgOptions) -> String {
    let s = opts.size as f64;
    let px = |z: f64| (z + 1.1) / 2.2 * s;
    let py = |r: f64| (1.1 - r) / 2.2 * s;
    let path = |pts: &[[f64; 2]]| {
        let mut d = String::new();
        for (k, p) in pts.iter().enumerate() {
            let cmd = if k == 0 { 'M' } else { 'L' };
            let _ = write!(d, "{cmd}{:.2} {:.2} ", px(p[0]), py(p[1]));
        }
        d.push('Z');
        d
    };

    let mut out = String::new();
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        opts.size
    );
    let title = opts
        .title
        .clone()
        .unwrap_or_else(|| format!("omega T = {}", set.t_scaled));
    let _ = writeln!(out, "<title>{title}</title>");
    let _ = writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        out,
        r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#bbbbbb" stroke-width="0.5"/>"##,
        px(-1.05),
        py(0.0),
        px(1.05),
        py(0.0)
    );
    let _ = writeln!(
        out,
        r#"<circle cx="{:.2}" cy="{:.2}" r="{:.2}" fill="none" stroke="black" stroke-width="1"/>"#,
        px(0.0),
        py(0.0),
        s / 2.2
    );
    let mut d = String::new();
    for poly in &set.boundary {
        d.push_str(&path(poly));
        d.push(' ');
    }
    let _ = writeln!(
        out,
        r##"<path d="{}" fill="#4a78c2" fill-opacity="0.35" fill-rule="evenodd" stroke="#1f3f7a" stroke-width="1"/>"##,
        d.trim_end()
    );
    if let Some(sp) = &opts.spiral {
        let _ = writeln!(
            out,
            r##"<path d="{}" fill="none" stroke="#c23b22" stroke-width="1" stroke-dasharray="4 3"/>"##,
            path(&sp.boundary(64))
        );
    }
    out.push_str("</svg>\n");
    out
}
