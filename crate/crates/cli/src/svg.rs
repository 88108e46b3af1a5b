//! Minimal static plot: ellipse outlines, trajectories, start and end markers.

use std::fmt::Write;

use eigprog::algebra::sym::sym_eigen;
use eigprog::apps::{EllipsoidInstance, EllipsoidRun};

const SIZE: f64 = 600.0;
const COLORS: [&str; 8] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf"];

pub fn plot(inst: &EllipsoidInstance, runs: &[EllipsoidRun]) -> String {
    // outlines as (center, semi-axes, angle)
    let outlines: Vec<([f64; 2], [f64; 2], f64)> = inst
        .q
        .iter()
        .zip(&inst.centers)
        .map(|(q, p)| {
            let eig = sym_eigen(q).expect("validated when the problem was built");
            let v = eig.vectors.row(0);
            let axes = [1.0 / eig.values[0].sqrt(), 1.0 / eig.values[1].sqrt()];
            ([p[0], p[1]], axes, v[1].atan2(v[0]))
        })
        .collect();

    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    let mut include = |x: f64, y: f64| {
        lo = [lo[0].min(x), lo[1].min(y)];
        hi = [hi[0].max(x), hi[1].max(y)];
    };
    for (c, a, _) in &outlines {
        let r = a[0].max(a[1]);
        include(c[0] - r, c[1] - r);
        include(c[0] + r, c[1] + r);
    }
    for run in runs {
        for x in &run.trajectory {
            include(x[0], x[1]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]).max(1e-9) * 1.1;
    let mid = [(lo[0] + hi[0]) / 2.0, (lo[1] + hi[1]) / 2.0];
    let scale = SIZE / span;
    let px = |x: f64, y: f64| ((x - mid[0]) * scale + SIZE / 2.0, (mid[1] - y) * scale + SIZE / 2.0);

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}">"#
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (c, a, angle) in &outlines {
        let (cx, cy) = px(c[0], c[1]);
        let _ = writeln!(
            s,
            r#"<ellipse cx="{cx:.2}" cy="{cy:.2}" rx="{:.2}" ry="{:.2}" transform="rotate({:.4} {cx:.2} {cy:.2})" fill="none" stroke="black" stroke-width="1.5"/>"#,
            a[0] * scale,
            a[1] * scale,
            -angle.to_degrees()
        );
    }
    for (i, run) in runs.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        let points: Vec<String> = run
            .trajectory
            .iter()
            .map(|x| {
                let (a, b) = px(x[0], x[1]);
                format!("{a:.2},{b:.2}")
            })
            .collect();
        let _ = writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.2"/>"#,
            points.join(" ")
        );
        let (sx, sy) = px(run.trajectory[0][0], run.trajectory[0][1]);
        let (ex, ey) = px(run.final_x[0], run.final_x[1]);
        let _ = writeln!(s, r#"<circle cx="{sx:.2}" cy="{sy:.2}" r="4" fill="none" stroke="{color}"/>"#);
        let _ = writeln!(s, r#"<circle cx="{ex:.2}" cy="{ey:.2}" r="3.5" fill="{color}"/>"#);
        let _ = writeln!(
            s,
            r#"<text x="{:.2}" y="{:.2}" font-size="11" fill="{color}">iters {}</text>"#,
            sx + 6.0,
            sy - 6.0,
            run.report.iterations
        );
    }
    s.push_str("</svg>\n");
    s
}
