//! Self-contained SVG scatter plots (no external renderer).

use crate::error::Result;
use crate::fpp::RatioCurve;
use std::fmt::Write as _;
use std::path::Path;

const W: f64 = 640.0;
const H: f64 = 480.0;
const MARGIN: f64 = 50.0;

/// Scatter of ratio vs distance with a horizontal line at `gamma_hat`.
pub fn write_ratio_scatter_svg(curve: &RatioCurve, gamma_hat: f64, path: &Path) -> Result<()> {
    let mut x_max: f64 = 1.0;
    let mut y_max: f64 = gamma_hat.max(1e-9);
    for row in &curve.rows {
        x_max = x_max.max(row.distance);
        y_max = y_max.max(row.ratio);
    }
    x_max *= 1.05;
    y_max *= 1.05;
    let sx = |x: f64| MARGIN + x / x_max * (W - 2.0 * MARGIN);
    let sy = |y: f64| H - MARGIN - y / y_max * (H - 2.0 * MARGIN);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" viewBox="0 0 {W} {H}">"#
    );
    let _ = writeln!(
        s,
        r#"<rect width="{W}" height="{H}" fill="white"/>"#
    );
    // axes
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        sx(0.0),
        sy(0.0),
        sx(x_max),
        sy(0.0)
    );
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="black"/>"#,
        sx(0.0),
        sy(0.0),
        sx(0.0),
        sy(y_max)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{}" font-size="12" text-anchor="middle">distance</text>"#,
        W / 2.0,
        H - 12.0
    );
    let _ = writeln!(
        s,
        r#"<text x="14" y="{}" font-size="12" text-anchor="middle" transform="rotate(-90 14 {})">delay / distance</text>"#,
        H / 2.0,
        H / 2.0
    );
    for row in &curve.rows {
        let _ = writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="1.5" fill="steelblue" fill-opacity="0.5"/>"#,
            sx(row.distance),
            sy(row.ratio)
        );
    }
    let _ = writeln!(
        s,
        r#"<line x1="{}" y1="{:.2}" x2="{}" y2="{:.2}" stroke="crimson" stroke-width="1.5" stroke-dasharray="6 3"/>"#,
        sx(0.0),
        sy(gamma_hat),
        sx(x_max),
        sy(gamma_hat)
    );
    let _ = writeln!(
        s,
        r#"<text x="{}" y="{:.2}" font-size="11" fill="crimson">gamma_hat = {:.4}</text>"#,
        sx(x_max * 0.78),
        sy(gamma_hat) - 5.0,
        gamma_hat
    );
    let _ = writeln!(s, "</svg>");
    std::fs::write(path, s)?;
    Ok(())
}
