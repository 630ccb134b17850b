//! Per-page element counters and their aggregate record.
//!
//! Every counter works on a [`SegmentStream`]: attribute-driven counters look
//! at tag segments, word and keyword counters at prose text, and the script
//! and SCORM counters at script bodies only.

mod lexicon;
mod policy;
mod scorm;

use std::iter::Sum;
use std::ops::{Add, AddAssign};

use serde::{Deserialize, Serialize};
use thiserror::Error;
use url::Url;

use crate::crawler::{normalize_url, PageSource, SiteScope};
use crate::markup::{extension_of, scan, SegmentStream, TagToken};

pub use lexicon::{Lexicon, LexiconError, MAX_TERM_WORDS};
pub use policy::{ExtensionPolicy, MediaClass, PolicyError};
pub use scorm::{detect_scorm_api, ScormFindings, SCORM_API_NAMES};

/// Element counts for one page or the sum over many.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ElementCensus {
    pub word_count: u64,
    pub image_count: u64,
    pub audio_count: u64,
    pub video_count: u64,
    pub active_content_count: u64,
    pub downloadable_content_count: u64,
    pub script_functions: u64,
    pub form_control_count: u64,
    pub inbound_link_count: u64,
    pub outbound_link_count: u64,
    pub keyword_count: u64,
    #[serde(skip)]
    pub pages_counted: u64,
}

impl ElementCensus {
    /// The eleven counters in their canonical order, by name.
    pub fn counters(&self) -> [(&'static str, u64); 11] {
        [
            ("word_count", self.word_count),
            ("image_count", self.image_count),
            ("audio_count", self.audio_count),
            ("video_count", self.video_count),
            ("active_content_count", self.active_content_count),
            (
                "downloadable_content_count",
                self.downloadable_content_count,
            ),
            ("script_functions", self.script_functions),
            ("form_control_count", self.form_control_count),
            ("inbound_link_count", self.inbound_link_count),
            ("outbound_link_count", self.outbound_link_count),
            ("keyword_count", self.keyword_count),
        ]
    }
}

impl AddAssign for ElementCensus {
    fn add_assign(&mut self, rhs: Self) {
        self.word_count += rhs.word_count;
        self.image_count += rhs.image_count;
        self.audio_count += rhs.audio_count;
        self.video_count += rhs.video_count;
        self.active_content_count += rhs.active_content_count;
        self.downloadable_content_count += rhs.downloadable_content_count;
        self.script_functions += rhs.script_functions;
        self.form_control_count += rhs.form_control_count;
        self.inbound_link_count += rhs.inbound_link_count;
        self.outbound_link_count += rhs.outbound_link_count;
        self.keyword_count += rhs.keyword_count;
        self.pages_counted += rhs.pages_counted;
    }
}

impl Add for ElementCensus {
    type Output = ElementCensus;

    fn add(mut self, rhs: Self) -> Self::Output {
        self += rhs;
        self
    }
}

impl Sum for ElementCensus {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(ElementCensus::default(), Add::add)
    }
}

impl<'a> Sum<&'a ElementCensus> for ElementCensus {
    fn sum<I: Iterator<Item = &'a ElementCensus>>(iter: I) -> Self {
        iter.copied().sum()
    }
}

fn words(text: &str) -> impl Iterator<Item = &str> {
    text.split_whitespace()
}

pub fn count_words(stream: &SegmentStream<'_>) -> u64 {
    stream.prose().map(|t| words(t).count() as u64).sum()
}

/// Opening tags (comments and declarations excluded).
fn opening_tags<'s>(stream: &'s SegmentStream<'_>) -> impl Iterator<Item = TagToken> + 's {
    stream.tags().filter(|t| t.is_element() && !t.is_closing)
}

fn count_attr_class(
    stream: &SegmentStream<'_>,
    attr: &str,
    policy: &ExtensionPolicy,
    class: MediaClass,
) -> u64 {
    opening_tags(stream)
        .filter(|t| {
            t.attr(attr)
                .and_then(extension_of)
                .is_some_and(|ext| policy.contains(class, &ext))
        })
        .count() as u64
}

/// Tags of any name whose `src` has an image extension.
pub fn count_images(stream: &SegmentStream<'_>, policy: &ExtensionPolicy) -> u64 {
    count_attr_class(stream, "src", policy, MediaClass::Image)
}

pub fn count_audio(stream: &SegmentStream<'_>, policy: &ExtensionPolicy) -> u64 {
    count_attr_class(stream, "src", policy, MediaClass::Audio)
}

pub fn count_video(stream: &SegmentStream<'_>, policy: &ExtensionPolicy) -> u64 {
    count_attr_class(stream, "src", policy, MediaClass::Video)
}

/// Opening `applet` tags plus tags whose `src` names active content.
pub fn count_active(stream: &SegmentStream<'_>, policy: &ExtensionPolicy) -> u64 {
    let applets = opening_tags(stream).filter(|t| t.name == "applet").count() as u64;
    applets + count_attr_class(stream, "src", policy, MediaClass::Active)
}

/// Tags whose `href` names a downloadable document.
pub fn count_downloadables(stream: &SegmentStream<'_>, policy: &ExtensionPolicy) -> u64 {
    count_attr_class(stream, "href", policy, MediaClass::Downloadable)
}

/// `input` tags plus opening `textarea`, `select` and `button` tags.
pub fn count_form_controls(stream: &SegmentStream<'_>) -> u64 {
    opening_tags(stream)
        .filter(|t| matches!(t.name.as_str(), "input" | "textarea" | "select" | "button"))
        .count() as u64
}

/// Number of top-level `{ ... }` groups in script bodies.
///
/// Depth resets at each script element; a `}` at depth zero is ignored and a
/// group left open at the end of a script does not count.
pub fn count_script_functions(stream: &SegmentStream<'_>) -> u64 {
    stream.scripts().map(count_top_level_blocks).sum()
}

fn count_top_level_blocks(code: &str) -> u64 {
    let mut depth = 0u64;
    let mut groups = 0;
    for c in code.chars() {
        match c {
            '{' => depth += 1,
            '}' if depth > 0 => {
                depth -= 1;
                if depth == 0 {
                    groups += 1;
                }
            }
            _ => {}
        }
    }
    groups
}

/// Lowercases and trims characters outside `[A-Za-z0-9-]` from both ends.
fn keyword_token(word: &str) -> Option<String> {
    let lower = word.to_lowercase();
    let trimmed = lower.trim_matches(|c: char| !(c.is_ascii_alphanumeric() || c == '-'));
    (!trimmed.is_empty()).then(|| trimmed.to_string())
}

/// Non-overlapping, longest-first lexicon matches over the prose tokens.
pub fn count_keywords(stream: &SegmentStream<'_>, lexicon: &Lexicon) -> u64 {
    if lexicon.is_empty() {
        return 0;
    }
    let tokens: Vec<String> = stream
        .prose()
        .flat_map(words)
        .filter_map(keyword_token)
        .collect();

    let mut count = 0;
    let mut i = 0;
    while i < tokens.len() {
        let longest = MAX_TERM_WORDS.min(tokens.len() - i);
        let matched = (1..=longest)
            .rev()
            .find(|&width| lexicon.contains(&tokens[i..i + width].join(" ")));
        match matched {
            Some(width) => {
                count += 1;
                i += width;
            }
            None => i += 1,
        }
    }
    count
}

/// Where an `href` points, relative to the crawled site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LinkTarget {
    Inbound(Url),
    Outbound(Url),
    /// Fragment-only self link, non-fetchable scheme or malformed reference.
    Skipped,
}

/// Classifies every `href` that is not a downloadable document.
pub fn page_links(
    stream: &SegmentStream<'_>,
    page_url: &Url,
    scope: &SiteScope,
    policy: &ExtensionPolicy,
) -> Vec<LinkTarget> {
    let mut links = Vec::new();
    for tag in opening_tags(stream) {
        let Some(href) = tag.attr("href") else {
            continue;
        };
        if extension_of(href).is_some_and(|e| policy.contains(MediaClass::Downloadable, &e)) {
            continue;
        }
        let href = href.trim();
        if href.starts_with('#') {
            links.push(LinkTarget::Skipped);
            continue;
        }
        links.push(match normalize_url(page_url, href) {
            Ok(url) if scope.is_outbound(&url) => LinkTarget::Outbound(url),
            Ok(url) => LinkTarget::Inbound(url),
            Err(_) => LinkTarget::Skipped,
        });
    }
    links
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct LinkTally {
    pub inbound: u64,
    pub outbound: u64,
    pub skipped: u64,
}

impl LinkTally {
    fn from_links(links: &[LinkTarget]) -> Self {
        let mut tally = LinkTally::default();
        for link in links {
            match link {
                LinkTarget::Inbound(_) => tally.inbound += 1,
                LinkTarget::Outbound(_) => tally.outbound += 1,
                LinkTarget::Skipped => tally.skipped += 1,
            }
        }
        tally
    }
}

pub fn classify_links(
    stream: &SegmentStream<'_>,
    page_url: &Url,
    scope: &SiteScope,
    policy: &ExtensionPolicy,
) -> LinkTally {
    LinkTally::from_links(&page_links(stream, page_url, scope, policy))
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CensusError {
    #[error("{url} is not an HTML page")]
    NotHtml { url: String },
    #[error("{url} has no body (status {status})")]
    NoBody { url: String, status: u16 },
}

/// Everything learned from a single page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageCensus {
    pub census: ElementCensus,
    pub scorm: ScormFindings,
    pub links_skipped: u64,
    /// Resolved same-site link targets in document order.
    pub inbound_links: Vec<Url>,
}

/// Counts every element class on one HTML page.
pub fn census_page(
    page: &PageSource,
    lexicon: &Lexicon,
    policy: &ExtensionPolicy,
    scope: &SiteScope,
) -> Result<PageCensus, CensusError> {
    let Some(body) = page.body.as_deref() else {
        return Err(CensusError::NoBody {
            url: page.final_url.to_string(),
            status: page.status,
        });
    };
    if !page.is_html() {
        return Err(CensusError::NotHtml {
            url: page.final_url.to_string(),
        });
    }
    let text = String::from_utf8_lossy(body);
    Ok(census_html(&text, &page.final_url, lexicon, policy, scope))
}

/// [`census_page`] over already-decoded markup.
pub fn census_html(
    html: &str,
    page_url: &Url,
    lexicon: &Lexicon,
    policy: &ExtensionPolicy,
    scope: &SiteScope,
) -> PageCensus {
    let stream = scan(html);
    let links = page_links(&stream, page_url, scope, policy);
    let tally = LinkTally::from_links(&links);
    let census = ElementCensus {
        word_count: count_words(&stream),
        image_count: count_images(&stream, policy),
        audio_count: count_audio(&stream, policy),
        video_count: count_video(&stream, policy),
        active_content_count: count_active(&stream, policy),
        downloadable_content_count: count_downloadables(&stream, policy),
        script_functions: count_script_functions(&stream),
        form_control_count: count_form_controls(&stream),
        inbound_link_count: tally.inbound,
        outbound_link_count: tally.outbound,
        keyword_count: count_keywords(&stream, lexicon),
        pages_counted: 1,
    };
    let inbound_links = links
        .into_iter()
        .filter_map(|l| match l {
            LinkTarget::Inbound(url) => Some(url),
            _ => None,
        })
        .collect();
    PageCensus {
        census,
        scorm: detect_scorm_api(&stream),
        links_skipped: tally.skipped,
        inbound_links,
    }
}
