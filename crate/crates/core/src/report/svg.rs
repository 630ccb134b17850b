use std::fmt::Write;

use super::{Category, ComparisonReport, ReportError};

pub const PALETTE: [&str; 8] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#9c755f",
];

const WIDTH: f64 = 900.0;
const HEIGHT: f64 = 480.0;
const PLOT_LEFT: f64 = 60.0;
const PLOT_RIGHT: f64 = 740.0;
const PLOT_TOP: f64 = 50.0;
const PLOT_BOTTOM: f64 = 410.0;
pub(crate) const PLOT_HEIGHT: f64 = PLOT_BOTTOM - PLOT_TOP;
const LEGEND_X: f64 = 760.0;
const GROUP_FILL: f64 = 0.8;

/// Coordinates with at most two decimals.
fn coord(v: f64) -> String {
    let s = format!("{v:.2}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn escape(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    for c in text.chars() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\'' => out.push_str("&apos;"),
            c if (c as u32) < 0x20 && !matches!(c, '\t' | '\n' | '\r') => out.push('\u{fffd}'),
            c => out.push(c),
        }
    }
    out
}

/// Grouped vertical bar chart on a fixed 900x480 canvas.
///
/// Zero-valued bars are omitted; every site still appears in the legend.
pub fn render_svg(report: &ComparisonReport) -> Result<String, ReportError> {
    let series = report.entries.len();
    if series > PALETTE.len() {
        return Err(ReportError::TooManySeries(series));
    }

    let mut svg = String::new();
    let _ = writeln!(svg, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="0 0 {w} {h}" font-family="sans-serif" font-size="12">"#,
        w = WIDTH,
        h = HEIGHT
    );
    let _ = writeln!(
        svg,
        r##"<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="#ffffff"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="28" text-anchor="middle" font-size="16">Element usage by category (% of countable elements)</text>"#,
        coord((PLOT_LEFT + PLOT_RIGHT) / 2.0)
    );

    let _ = writeln!(svg, r#"<g class="grid">"#);
    for step in 0..=10 {
        let y = PLOT_BOTTOM - PLOT_HEIGHT * step as f64 / 10.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{l}" y1="{y}" x2="{r}" y2="{y}" stroke="#dddddd" stroke-width="1"/>"##,
            l = coord(PLOT_LEFT),
            r = coord(PLOT_RIGHT),
            y = coord(y)
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{}</text>"#,
            coord(PLOT_LEFT - 8.0),
            coord(y + 4.0),
            step * 10
        );
    }
    let _ = writeln!(svg, "</g>");
    let _ = writeln!(
        svg,
        r##"<line x1="{l}" y1="{t}" x2="{l}" y2="{b}" stroke="#333333" stroke-width="1"/>"##,
        l = coord(PLOT_LEFT),
        t = coord(PLOT_TOP),
        b = coord(PLOT_BOTTOM)
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{l}" y1="{b}" x2="{r}" y2="{b}" stroke="#333333" stroke-width="1"/>"##,
        l = coord(PLOT_LEFT),
        r = coord(PLOT_RIGHT),
        b = coord(PLOT_BOTTOM)
    );
    let _ = writeln!(
        svg,
        r#"<text x="18" y="{}" text-anchor="middle" transform="rotate(-90 18 {})">percent</text>"#,
        coord((PLOT_TOP + PLOT_BOTTOM) / 2.0),
        coord((PLOT_TOP + PLOT_BOTTOM) / 2.0)
    );

    let group_width = (PLOT_RIGHT - PLOT_LEFT) / Category::ALL.len() as f64;
    let bar_width = if series == 0 {
        0.0
    } else {
        group_width * GROUP_FILL / series as f64
    };
    let _ = writeln!(svg, r#"<g class="bars">"#);
    for (ci, category) in Category::ALL.into_iter().enumerate() {
        let group_x = PLOT_LEFT + group_width * ci as f64;
        let first_bar_x = group_x + group_width * (1.0 - GROUP_FILL) / 2.0;
        for (si, entry) in report.entries.iter().enumerate() {
            let share = entry.shares.get(category);
            if share <= 0.0 {
                continue;
            }
            let height = PLOT_HEIGHT * share / 100.0;
            let _ = writeln!(
                svg,
                r#"<rect class="bar" x="{}" y="{}" width="{}" height="{}" fill="{}"><title>{}: {} {:.1}%</title></rect>"#,
                coord(first_bar_x + bar_width * si as f64),
                coord(PLOT_BOTTOM - height),
                coord(bar_width),
                coord(height),
                PALETTE[si],
                escape(&entry.label),
                category,
                share
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{}</text>"#,
            coord(group_x + group_width / 2.0),
            coord(PLOT_BOTTOM + 20.0),
            category
        );
    }
    let _ = writeln!(svg, "</g>");

    let _ = writeln!(svg, r#"<g class="legend">"#);
    for (si, entry) in report.entries.iter().enumerate() {
        let y = PLOT_TOP + 22.0 * si as f64;
        let _ = writeln!(
            svg,
            r#"<rect x="{}" y="{}" width="14" height="14" fill="{}"/>"#,
            coord(LEGEND_X),
            coord(y),
            PALETTE[si]
        );
        let label = if entry.shares.is_empty() {
            format!("{} (no countable elements)", entry.label)
        } else {
            entry.label.clone()
        };
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}">{}</text>"#,
            coord(LEGEND_X + 20.0),
            coord(y + 11.0),
            escape(&label)
        );
    }
    let _ = writeln!(svg, "</g>");
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::report::build_comparison;
    use crate::report::tests::summary;

    #[test]
    fn single_full_bar() {
        let r = build_comparison(vec![("s".to_string(), summary([0, 0, 5, 0, 0, 0, 0]))]).unwrap();
        let svg = render_svg(&r).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let bars: Vec<_> = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("bar"))
            .collect();
        assert_eq!(bars.len(), 1);
        assert_eq!(
            bars[0].attribute("height"),
            Some(coord(PLOT_HEIGHT).as_str())
        );
        assert_eq!(bars[0].attribute("y"), Some(coord(PLOT_TOP).as_str()));
    }

    #[test]
    fn empty_entry_keeps_legend() {
        let r = build_comparison(vec![
            ("empty & co".to_string(), summary([0; 7])),
            ("full".to_string(), summary([1; 7])),
        ])
        .unwrap();
        let svg = render_svg(&r).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let legend = doc
            .descendants()
            .find(|n| n.attribute("class") == Some("legend"))
            .unwrap();
        let texts: Vec<_> = legend
            .descendants()
            .filter(|n| n.has_tag_name("text"))
            .map(|n| n.text().unwrap().to_string())
            .collect();
        assert_eq!(texts, vec!["empty & co (no countable elements)", "full"]);
        let fills: Vec<_> = doc
            .descendants()
            .filter(|n| n.attribute("class") == Some("bar"))
            .map(|n| n.attribute("fill").unwrap())
            .collect();
        assert_eq!(fills, vec![PALETTE[1]; 7]);
        assert_eq!(svg, render_svg(&r).unwrap());
    }

    #[test]
    fn gridlines_and_canvas() {
        let r = build_comparison(vec![("s".to_string(), summary([1; 7]))]).unwrap();
        let svg = render_svg(&r).unwrap();
        let doc = roxmltree::Document::parse(&svg).unwrap();
        let root = doc.root_element();
        assert_eq!(root.attribute("width"), Some("900"));
        assert_eq!(root.attribute("height"), Some("480"));
        let grid = doc
            .descendants()
            .find(|n| n.attribute("class") == Some("grid"))
            .unwrap();
        assert_eq!(
            grid.children().filter(|n| n.has_tag_name("line")).count(),
            11
        );
    }

    #[test]
    fn too_many_series() {
        let sites = (0..9).map(|i| (format!("s{i}"), summary([1; 7])));
        let r = build_comparison(sites).unwrap();
        assert_eq!(render_svg(&r), Err(ReportError::TooManySeries(9)));
    }
}
