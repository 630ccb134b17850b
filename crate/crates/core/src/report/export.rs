use serde::{Deserialize, Serialize, Serializer};

use super::{
    build_comparison, Category, CategoryShares, ComparisonReport, ReportError, SiteSummary,
};
use crate::census::{ElementCensus, ScormFindings};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Fixed-point with at most six fractional digits, trailing zeros removed.
pub fn format_number(value: f64) -> String {
    let s = format!("{value:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".to_string()
    } else {
        s.to_string()
    }
}

fn serialize_share<S: Serializer>(value: &f64, serializer: S) -> Result<S::Ok, S::Error> {
    let number: serde_json::Number = format_number(*value)
        .parse()
        .map_err(serde::ser::Error::custom)?;
    number.serialize(serializer)
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ReportFile {
    tool_version: String,
    generated_for: Vec<String>,
    sites: Vec<SiteRecord>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SiteRecord {
    label: String,
    seed_url: String,
    pages_visited: u64,
    pages_failed: u64,
    census: ElementCensus,
    shares: SharesRecord,
    scorm: ScormFindings,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SharesRecord {
    #[serde(serialize_with = "serialize_share")]
    images: f64,
    #[serde(serialize_with = "serialize_share")]
    audio: f64,
    #[serde(serialize_with = "serialize_share")]
    video: f64,
    #[serde(serialize_with = "serialize_share")]
    active: f64,
    #[serde(serialize_with = "serialize_share")]
    downloadable: f64,
    #[serde(serialize_with = "serialize_share")]
    inbound_links: f64,
    #[serde(serialize_with = "serialize_share")]
    outbound_links: f64,
    denominator: u64,
}

impl From<&CategoryShares> for SharesRecord {
    fn from(s: &CategoryShares) -> Self {
        SharesRecord {
            images: s.get(Category::Images),
            audio: s.get(Category::Audio),
            video: s.get(Category::Video),
            active: s.get(Category::Active),
            downloadable: s.get(Category::Downloadable),
            inbound_links: s.get(Category::InboundLinks),
            outbound_links: s.get(Category::OutboundLinks),
            denominator: s.denominator,
        }
    }
}

/// Pretty-printed JSON with a fixed key order and a trailing newline.
pub fn export_json(report: &ComparisonReport) -> String {
    let file = ReportFile {
        tool_version: TOOL_VERSION.to_string(),
        generated_for: report.labels().map(str::to_string).collect(),
        sites: report
            .entries
            .iter()
            .map(|e| SiteRecord {
                label: e.label.clone(),
                seed_url: e.site.seed_url.clone(),
                pages_visited: e.site.pages_visited,
                pages_failed: e.site.pages_failed,
                census: e.site.census,
                shares: SharesRecord::from(&e.shares),
                scorm: e.site.scorm.clone(),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&file).expect("report serializes");
    out.push('\n');
    out
}

/// Reads a JSON report back into labelled site summaries.
///
/// Shares in the file are ignored; they are recomputed from the counters.
pub fn load_json(text: &str) -> Result<Vec<(String, SiteSummary)>, ReportError> {
    let file: ReportFile =
        serde_json::from_str(text).map_err(|e| ReportError::Schema(e.to_string()))?;
    let labels: Vec<&str> = file.sites.iter().map(|s| s.label.as_str()).collect();
    if file.generated_for != labels {
        return Err(ReportError::Schema(
            "generated_for does not match the site labels".to_string(),
        ));
    }
    let sites = file
        .sites
        .into_iter()
        .map(|s| {
            let mut census = s.census;
            census.pages_counted = s.pages_visited;
            let scorm = ScormFindings::from_names(s.scorm.api_names_found);
            (
                s.label,
                SiteSummary {
                    seed_url: s.seed_url,
                    pages_visited: s.pages_visited,
                    pages_failed: s.pages_failed,
                    census,
                    scorm,
                },
            )
        })
        .collect::<Vec<_>>();
    // Validate labels the same way a fresh comparison would.
    build_comparison(sites.clone())?;
    Ok(sites)
}

/// One row per (site, category): `label,category,count,share`.
pub fn export_csv(report: &ComparisonReport) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["label", "category", "count", "share"])
        .expect("write to memory");
    for entry in &report.entries {
        for category in Category::ALL {
            writer
                .write_record([
                    entry.label.as_str(),
                    category.name(),
                    &category.count(&entry.site.census).to_string(),
                    &format_number(entry.shares.get(category)),
                ])
                .expect("write to memory");
        }
    }
    let bytes = writer.into_inner().expect("flush to memory");
    String::from_utf8(bytes).expect("csv output is UTF-8")
}
