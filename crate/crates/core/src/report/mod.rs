//! Percentage shares per element category and the comparison report built
//! from them.

mod ascii;
mod export;
mod svg;

use std::fmt;

use thiserror::Error;

use crate::census::{ElementCensus, ScormFindings};
use crate::crawler::SiteCensus;

pub use ascii::{render_ascii, BAR_WIDTH};
pub use export::{export_csv, export_json, format_number, load_json, TOOL_VERSION};
pub use svg::{render_svg, PALETTE};

/// Chart categories, in display order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Category {
    Images,
    Audio,
    Video,
    Active,
    Downloadable,
    InboundLinks,
    OutboundLinks,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Images,
        Category::Audio,
        Category::Video,
        Category::Active,
        Category::Downloadable,
        Category::InboundLinks,
        Category::OutboundLinks,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::Images => "images",
            Category::Audio => "audio",
            Category::Video => "video",
            Category::Active => "active",
            Category::Downloadable => "downloadable",
            Category::InboundLinks => "inbound_links",
            Category::OutboundLinks => "outbound_links",
        }
    }

    pub fn count(self, census: &ElementCensus) -> u64 {
        match self {
            Category::Images => census.image_count,
            Category::Audio => census.audio_count,
            Category::Video => census.video_count,
            Category::Active => census.active_content_count,
            Category::Downloadable => census.downloadable_content_count,
            Category::InboundLinks => census.inbound_link_count,
            Category::OutboundLinks => census.outbound_link_count,
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Each category's percentage of all countable elements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CategoryShares {
    values: [f64; 7],
    pub denominator: u64,
}

impl CategoryShares {
    pub fn get(&self, category: Category) -> f64 {
        self.values[category as usize]
    }

    /// No countable elements: every share is zero.
    pub fn is_empty(&self) -> bool {
        self.denominator == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (Category, f64)> + '_ {
        Category::ALL.into_iter().map(|c| (c, self.get(c)))
    }
}

/// Word, keyword, script and form counts are not part of the denominator.
pub fn compute_shares(census: &ElementCensus) -> CategoryShares {
    let denominator: u64 = Category::ALL.iter().map(|c| c.count(census)).sum();
    let mut values = [0.0; 7];
    if denominator > 0 {
        for c in Category::ALL {
            values[c as usize] = 100.0 * c.count(census) as f64 / denominator as f64;
        }
    }
    CategoryShares {
        values,
        denominator,
    }
}

/// The parts of a crawl result that a report carries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteSummary {
    pub seed_url: String,
    pub pages_visited: u64,
    pub pages_failed: u64,
    pub census: ElementCensus,
    pub scorm: ScormFindings,
}

impl From<&SiteCensus> for SiteSummary {
    fn from(site: &SiteCensus) -> Self {
        SiteSummary {
            seed_url: site.seed_url.to_string(),
            pages_visited: site.pages_visited(),
            pages_failed: site.pages_failed,
            census: site.census,
            scorm: site.scorm.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportEntry {
    pub label: String,
    pub site: SiteSummary,
    pub shares: CategoryShares,
}

/// Sites side by side, in the order given.
#[derive(Debug, Clone, PartialEq)]
pub struct ComparisonReport {
    pub entries: Vec<ReportEntry>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReportError {
    #[error("a report needs at least one site")]
    Empty,
    #[error("duplicate site label \"{0}\"")]
    DuplicateLabel(String),
    #[error("{0} series exceed the {max}-colour palette; split the comparison", max = PALETTE.len())]
    TooManySeries(usize),
    #[error("report does not match the expected schema: {0}")]
    Schema(String),
}

pub fn build_comparison<I>(sites: I) -> Result<ComparisonReport, ReportError>
where
    I: IntoIterator<Item = (String, SiteSummary)>,
{
    let mut entries: Vec<ReportEntry> = Vec::new();
    for (label, site) in sites {
        if entries.iter().any(|e| e.label == label) {
            return Err(ReportError::DuplicateLabel(label));
        }
        entries.push(ReportEntry {
            label,
            shares: compute_shares(&site.census),
            site,
        });
    }
    if entries.is_empty() {
        return Err(ReportError::Empty);
    }
    Ok(ComparisonReport { entries })
}

impl ComparisonReport {
    pub fn labels(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.label.as_str())
    }
}
