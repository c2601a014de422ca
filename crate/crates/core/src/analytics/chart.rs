use std::fmt::Write as _;

use super::series::GroupedSeries;

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 360.0;
const MARGIN: f64 = 48.0;
const COLORS: [&str; 6] = [
    "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
];

/// Static line chart of yearly fractions: raw values dashed, smoothed
/// values solid with a shaded interval band.
pub fn render_svg(title: &str, series: &[GroupedSeries]) -> String {
    let years = series.iter().flat_map(|s| s.points.iter().map(|p| p.year));
    let (min_y, max_y) = years.fold((i32::MAX, i32::MIN), |(a, b), y| (a.min(y), b.max(y)));
    let (min_y, max_y) = if min_y > max_y {
        (0, 1)
    } else {
        (min_y, max_y.max(min_y + 1))
    };
    let x = |year: i32| {
        MARGIN + (year - min_y) as f64 / (max_y - min_y) as f64 * (WIDTH - 2.0 * MARGIN)
    };
    let y = |v: f64| HEIGHT - MARGIN - v.clamp(0.0, 1.0) * (HEIGHT - 2.0 * MARGIN);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="20" font-size="13">{}</text>"#,
        escape(title)
    );
    for tick in 0..=4 {
        let v = tick as f64 / 4.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{MARGIN}" x2="{:.1}" y1="{:.1}" y2="{:.1}" stroke="#ddd"/><text x="8" y="{:.1}">{v:.2}</text>"##,
            WIDTH - MARGIN,
            y(v),
            y(v),
            y(v) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{MARGIN}" y="{:.1}">{min_y}</text><text x="{:.1}" y="{:.1}" text-anchor="end">{max_y}</text>"#,
        HEIGHT - MARGIN + 16.0,
        WIDTH - MARGIN,
        HEIGHT - MARGIN + 16.0
    );

    for (i, s) in series.iter().enumerate() {
        let color = COLORS[i % COLORS.len()];
        if let Some(sm) = s.smoothed.as_ref().filter(|sm| !sm.is_empty()) {
            let mut band: Vec<String> = sm
                .iter()
                .map(|p| format!("{:.1},{:.1}", x(p.year), y(p.ci_high)))
                .collect();
            band.extend(
                sm.iter()
                    .rev()
                    .map(|p| format!("{:.1},{:.1}", x(p.year), y(p.ci_low))),
            );
            let _ = writeln!(
                svg,
                r#"<polygon points="{}" fill="{color}" fill-opacity="0.15" stroke="none"/>"#,
                band.join(" ")
            );
            let line: Vec<String> = sm
                .iter()
                .map(|p| format!("{:.1},{:.1}", x(p.year), y(p.value)))
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2"/>"#,
                line.join(" ")
            );
        }
        let raw: Vec<String> = s
            .points
            .iter()
            .filter_map(|p| p.fraction.map(|f| format!("{:.1},{:.1}", x(p.year), y(f))))
            .collect();
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-dasharray="4 3"/>"#,
            raw.join(" ")
        );
        let _ = writeln!(
            svg,
            r#"<text x="{:.1}" y="{:.1}" fill="{color}">{}</text>"#,
            WIDTH - MARGIN - 200.0,
            MARGIN + 14.0 * i as f64,
            escape(&s.key.to_string())
        );
    }
    svg.push_str("</svg>\n");
    svg
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
