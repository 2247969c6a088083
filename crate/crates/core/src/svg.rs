//! Static SVG rendering of a tour.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::instance::Instance;
use crate::tour::Tour;

const CANVAS: f64 = 800.0;
const MARGIN: f64 = 20.0;

/// Renders city dots and one `<line>` per tour edge. The output depends only
/// on the coordinates and the visiting order.
pub fn tour_svg(inst: &Instance, tour: &Tour) -> Result<String> {
    if inst.len() != tour.len() {
        return Err(Error::invalid("tour and instance sizes differ"));
    }
    let c = inst.coords();
    let (mut x0, mut y0, mut x1, mut y1) = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
    for &(x, y) in c {
        x0 = x0.min(x);
        y0 = y0.min(y);
        x1 = x1.max(x);
        y1 = y1.max(y);
    }
    let span = (x1 - x0).max(y1 - y0).max(f64::MIN_POSITIVE);
    let scale = (CANVAS - 2.0 * MARGIN) / span;
    // SVG's y axis points down
    let px = |x: f64| MARGIN + (x - x0) * scale;
    let py = |y: f64| CANVAS - MARGIN - (y - y0) * scale;

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{CANVAS}" height="{CANVAS}" viewBox="0 0 {CANVAS} {CANVAS}">"#
    )
    .unwrap();
    writeln!(out, r#"<rect width="100%" height="100%" fill="white"/>"#).unwrap();
    writeln!(out, r##"<g stroke="#1f5fa8" stroke-width="1.5">"##).unwrap();
    let order = tour.order();
    let n = order.len();
    for k in 0..n {
        let (a, b) = (c[order[k]], c[order[(k + 1) % n]]);
        writeln!(
            out,
            r#"<line x1="{:.3}" y1="{:.3}" x2="{:.3}" y2="{:.3}"/>"#,
            px(a.0),
            py(a.1),
            px(b.0),
            py(b.1)
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, r##"<g fill="#c0392b">"##).unwrap();
    for &(x, y) in c {
        writeln!(out, r#"<circle cx="{:.3}" cy="{:.3}" r="3"/>"#, px(x), py(y)).unwrap();
    }
    writeln!(out, "</g>").unwrap();
    writeln!(out, "</svg>").unwrap();
    Ok(out)
}

/// Writes [`tour_svg`] to `path`.
pub fn emit_tour_svg(inst: &Instance, tour: &Tour, path: &Path) -> Result<()> {
    std::fs::write(path, tour_svg(inst, tour)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn square_has_four_dots_and_four_segments() {
        let inst = Instance::new(vec![(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]).unwrap();
        let svg = tour_svg(&inst, &Tour::identity(4).unwrap()).unwrap();
        assert_eq!(svg.matches("<circle").count(), 4);
        assert_eq!(svg.matches("<line").count(), 4);
    }

    #[test]
    fn unwritable_path_is_an_io_error() {
        let inst = Instance::random(5, 0).unwrap();
        let err = emit_tour_svg(&inst, &Tour::identity(5).unwrap(), Path::new("/nonexistent/dir/t.svg"));
        assert!(matches!(err, Err(Error::Io(_))));
    }
}
