//! Static SVG rendering of confidential-rate boundary slices.
//!
//! Each traced boundary point carries a rate triple; the plot shows the
//! Pareto staircase of `(R1, R2)` restricted to points whose common rate
//! clears each of four evenly spaced `R0` levels. Pure string assembly,
//! no plotting dependency, deterministic output.

const WIDTH: f64 = 640.0;
const HEIGHT: f64 = 480.0;
const LEFT: f64 = 70.0;
const RIGHT: f64 = 470.0;
const TOP: f64 = 30.0;
const BOTTOM: f64 = 430.0;
const PALETTE: [&str; 4] = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd"];

/// Pareto staircase of `(r1, r2)` pairs: keeps points not weakly dominated
/// in both coordinates, sorted by increasing `r1`.
fn frontier(mut pts: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    pts.sort_by(|a, b| b.0.total_cmp(&a.0).then(b.1.total_cmp(&a.1)));
    let mut kept: Vec<(f64, f64)> = Vec::new();
    let mut best_r2 = f64::NEG_INFINITY;
    for (r1, r2) in pts {
        if r2 > best_r2 {
            kept.push((r1, r2));
            best_r2 = r2;
        }
    }
    kept.reverse();
    kept
}

/// Renders the slice plot for traced boundary triples `(r0, r1, r2)`,
/// already scaled to display units.
pub fn slice_plot(points: &[(f64, f64, f64)], units: &str) -> String {
    let r0_max = points.iter().map(|p| p.0).fold(0.0f64, f64::max);
    let r1_max = points.iter().map(|p| p.1).fold(0.0f64, f64::max);
    let r2_max = points.iter().map(|p| p.2).fold(0.0f64, f64::max);
    let x_span = (r1_max * 1.05).max(1e-9);
    let y_span = (r2_max * 1.05).max(1e-9);
    let x = |v: f64| LEFT + (RIGHT - LEFT) * v / x_span;
    let y = |v: f64| BOTTOM - (BOTTOM - TOP) * v / y_span;

    let mut out = String::new();
    out.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{WIDTH}\" height=\"{HEIGHT}\" \
         viewBox=\"0 0 {WIDTH} {HEIGHT}\">\n"
    ));
    out.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");

    // axes and ticks
    out.push_str(&format!(
        "<line x1=\"{LEFT}\" y1=\"{BOTTOM}\" x2=\"{RIGHT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n\
         <line x1=\"{LEFT}\" y1=\"{TOP}\" x2=\"{LEFT}\" y2=\"{BOTTOM}\" stroke=\"black\"/>\n"
    ));
    for i in 0..=5 {
        let f = i as f64 / 5.0;
        let (vx, vy) = (x_span * f, y_span * f);
        let (px, py) = (x(vx), y(vy));
        out.push_str(&format!(
            "<line x1=\"{px:.2}\" y1=\"{BOTTOM}\" x2=\"{px:.2}\" y2=\"{:.2}\" stroke=\"black\"/>\n",
            BOTTOM + 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{px:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"middle\">{vx:.3}</text>\n",
            BOTTOM + 18.0
        ));
        out.push_str(&format!(
            "<line x1=\"{:.2}\" y1=\"{py:.2}\" x2=\"{LEFT}\" y2=\"{py:.2}\" stroke=\"black\"/>\n",
            LEFT - 5.0
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"11\" text-anchor=\"end\">{vy:.3}</text>\n",
            LEFT - 8.0,
            py + 4.0
        ));
    }
    out.push_str(&format!(
        "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\">R1 ({units})</text>\n",
        (LEFT + RIGHT) / 2.0,
        BOTTOM + 38.0
    ));
    out.push_str(&format!(
        "<text x=\"18\" y=\"{:.2}\" font-size=\"13\" text-anchor=\"middle\" \
         transform=\"rotate(-90 18 {:.2})\">R2 ({units})</text>\n",
        (TOP + BOTTOM) / 2.0,
        (TOP + BOTTOM) / 2.0
    ));

    // one staircase per R0 level
    for (i, frac) in [0.0, 0.25, 0.5, 0.75].iter().enumerate() {
        let level = r0_max * frac;
        let slice: Vec<(f64, f64)> = points
            .iter()
            .filter(|p| p.0 >= level - 1e-12)
            .map(|p| (p.1, p.2))
            .collect();
        if slice.is_empty() {
            continue;
        }
        let front = frontier(slice);
        let color = PALETTE[i];
        if front.len() > 1 {
            let path: Vec<String> = front
                .iter()
                .map(|(a, b)| format!("{:.2},{:.2}", x(*a), y(*b)))
                .collect();
            out.push_str(&format!(
                "<polyline points=\"{}\" fill=\"none\" stroke=\"{color}\" stroke-width=\"1.5\"/>\n",
                path.join(" ")
            ));
        }
        for (a, b) in &front {
            out.push_str(&format!(
                "<circle cx=\"{:.2}\" cy=\"{:.2}\" r=\"2.5\" fill=\"{color}\"/>\n",
                x(*a),
                y(*b)
            ));
        }
        let ly = TOP + 16.0 * i as f64;
        out.push_str(&format!(
            "<rect x=\"{:.2}\" y=\"{:.2}\" width=\"10\" height=\"10\" fill=\"{color}\"/>\n",
            RIGHT + 10.0,
            ly
        ));
        out.push_str(&format!(
            "<text x=\"{:.2}\" y=\"{:.2}\" font-size=\"12\">R0 &#8805; {level:.4}</text>\n",
            RIGHT + 25.0,
            ly + 9.0
        ));
    }
    out.push_str("</svg>\n");
    out
}
