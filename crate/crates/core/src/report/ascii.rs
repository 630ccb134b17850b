use std::fmt::Write;

use super::{Category, ComparisonReport};

/// Characters in a 100% bar.
pub const BAR_WIDTH: usize = 50;

/// Grouped horizontal bar chart: one group per category, one row per site.
pub fn render_ascii(report: &ComparisonReport) -> String {
    let width = report
        .labels()
        .map(|l| l.chars().count())
        .max()
        .unwrap_or(0)
        .max("label".len());
    let mut out = String::new();
    out.push_str("Element usage by category (% of countable elements)\n");

    for category in Category::ALL {
        let _ = write!(out, "\n{category}\n");
        for entry in &report.entries {
            let label = &entry.label;
            if entry.shares.is_empty() {
                let _ = writeln!(out, "  {label:<width$}  (no countable elements)");
                continue;
            }
            let share = entry.shares.get(category);
            let filled = ((share / 2.0).round() as usize).min(BAR_WIDTH);
            let bar = format!("{}{}", "#".repeat(filled), " ".repeat(BAR_WIDTH - filled));
            let _ = writeln!(out, "  {label:<width$}  |{bar}| {share:>5.1}");
        }
    }

    let _ = write!(
        out,
        "\n{:<width$}  {:>5}  {:>6}  {:>7}  {:>8}  {:>7}  {:>5}  scorm\n",
        "label", "pages", "failed", "words", "keywords", "scripts", "forms"
    );
    for entry in &report.entries {
        let site = &entry.site;
        let scorm = if site.scorm.api_names_found.is_empty() {
            "no".to_string()
        } else {
            let names: Vec<&str> = site
                .scorm
                .api_names_found
                .iter()
                .map(String::as_str)
                .collect();
            let verdict = if site.scorm.looks_scorm {
                "yes"
            } else {
                "partial"
            };
            format!("{verdict} ({})", names.join(", "))
        };
        let _ = writeln!(
            out,
            "{:<width$}  {:>5}  {:>6}  {:>7}  {:>8}  {:>7}  {:>5}  {scorm}",
            entry.label,
            site.pages_visited,
            site.pages_failed,
            site.census.word_count,
            site.census.keyword_count,
            site.census.script_functions,
            site.census.form_control_count,
        );
    }
    out
}
