//! Same-site breadth-first crawl that censuses every HTML page it reaches.
//!
//! The frontier is FIFO by discovery; links found on one page are queued in
//! lexicographic order. Pages are fetched in batches of up to `parallelism`
//! and the results are processed in frontier order, so the set of censused
//! pages and the aggregate do not depend on how many workers ran.

mod fetch;
mod urls;

use std::collections::{HashSet, VecDeque};
use std::sync::Mutex;
use std::time::Duration;

use thiserror::Error;
use url::Url;

use crate::census::{
    census_page, CensusError, ElementCensus, ExtensionPolicy, Lexicon, PageCensus, ScormFindings,
};
use crate::markup::extension_of;

pub use fetch::{
    fetch, Backend, FetchError, FileBackend, HostThrottle, HttpBackend, RawResponse, RobotsCache,
    MAX_REDIRECTS,
};
pub use urls::{is_outbound, normalize_url, parse_absolute, SiteScope, UnresolvableUrl};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ConfigError {
    #[error("invalid seed URL \"{input}\": {reason}")]
    BadSeed { input: String, reason: String },
    #[error("{0} must be positive")]
    NotPositive(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrawlConfig {
    pub seed_url: Url,
    pub max_pages: usize,
    pub max_depth: usize,
    pub delay_ms: u64,
    pub timeout_ms: u64,
    pub user_agent: String,
    pub treat_subdomains_inbound: bool,
    pub parallelism: usize,
    pub respect_robots: bool,
}

pub const DEFAULT_USER_AGENT: &str = concat!("mediacensus/", env!("CARGO_PKG_VERSION"));

impl CrawlConfig {
    /// Config with default limits for an `http`, `https` or `file` seed.
    pub fn new(seed: &str) -> Result<Self, ConfigError> {
        let bad = |reason: String| ConfigError::BadSeed {
            input: seed.to_string(),
            reason,
        };
        let seed_url = parse_absolute(seed).map_err(|e| bad(e.to_string()))?;
        let has_location = match seed_url.scheme() {
            "file" => seed_url.path() != "/" || seed_url.host_str().is_some(),
            _ => seed_url.host_str().is_some_and(|h| !h.is_empty()),
        };
        if !has_location {
            return Err(bad("missing host".to_string()));
        }
        Ok(CrawlConfig {
            seed_url,
            max_pages: 200,
            max_depth: 10,
            delay_ms: 500,
            timeout_ms: 10_000,
            user_agent: DEFAULT_USER_AGENT.to_string(),
            treat_subdomains_inbound: false,
            parallelism: 1,
            respect_robots: true,
        })
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.max_pages == 0 {
            return Err(ConfigError::NotPositive("max_pages"));
        }
        if self.timeout_ms == 0 {
            return Err(ConfigError::NotPositive("timeout_ms"));
        }
        if self.parallelism == 0 {
            return Err(ConfigError::NotPositive("parallelism"));
        }
        Ok(())
    }

    pub fn scope(&self) -> SiteScope {
        SiteScope::new(self.seed_url.clone(), self.treat_subdomains_inbound)
    }
}

/// A fetched page.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PageSource {
    pub requested_url: Url,
    /// Normalized URL after redirects.
    pub final_url: Url,
    pub status: u16,
    pub content_type: Option<String>,
    /// Present only for 2xx responses.
    pub body: Option<Vec<u8>>,
    pub depth: usize,
}

impl PageSource {
    pub fn is_success(&self) -> bool {
        (200..300).contains(&self.status)
    }

    /// HTML by content type, or by extension (none, `htm`, `html`) when the
    /// content type is unknown.
    pub fn is_html(&self) -> bool {
        match &self.content_type {
            Some(ct) => ct.to_ascii_lowercase().contains("html"),
            None => matches!(
                extension_of(self.final_url.path()).as_deref(),
                None | Some("htm") | Some("html")
            ),
        }
    }
}

/// URLs already claimed by this crawl. Insertion is atomic.
#[derive(Debug, Default)]
pub struct VisitedSet {
    urls: Mutex<HashSet<String>>,
}

impl VisitedSet {
    /// Returns `true` if the URL was not yet present.
    pub fn insert(&self, url: &Url) -> bool {
        self.urls
            .lock()
            .expect("visited set poisoned")
            .insert(url.as_str().to_string())
    }

    pub fn contains(&self, url: &Url) -> bool {
        self.urls
            .lock()
            .expect("visited set poisoned")
            .contains(url.as_str())
    }

    pub fn len(&self) -> usize {
        self.urls.lock().expect("visited set poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Aggregate result of crawling one site.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteCensus {
    pub seed_url: Url,
    pub census: ElementCensus,
    pub scorm: ScormFindings,
    pub pages_failed: u64,
    pub links_skipped: u64,
    pub robots_skipped: u64,
    /// Successful fetches that were not HTML.
    pub non_html: u64,
    pub per_page: Vec<(Url, ElementCensus)>,
    pub failures: Vec<(Url, String)>,
}

impl SiteCensus {
    pub fn new(seed_url: Url) -> Self {
        SiteCensus {
            seed_url,
            census: ElementCensus::default(),
            scorm: ScormFindings::default(),
            pages_failed: 0,
            links_skipped: 0,
            robots_skipped: 0,
            non_html: 0,
            per_page: Vec::new(),
            failures: Vec::new(),
        }
    }

    pub fn pages_visited(&self) -> u64 {
        self.per_page.len() as u64
    }

    fn record(&mut self, url: Url, page: &PageCensus) {
        self.census += page.census;
        self.scorm.merge(&page.scorm);
        self.links_skipped += page.links_skipped;
        self.per_page.push((url, page.census));
    }

    fn fail(&mut self, url: Url, reason: String) {
        self.pages_failed += 1;
        self.failures.push((url, reason));
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CrawlError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("seed {url} unreachable: {reason}")]
    SeedUnreachable { url: String, reason: String },
    #[error("seed {url} is not censusable: {reason}")]
    SeedNotHtml { url: String, reason: String },
}

/// Crawls one site from `config.seed_url`.
pub fn crawl(
    config: &CrawlConfig,
    lexicon: &Lexicon,
    policy: &ExtensionPolicy,
    backend: &dyn Backend,
) -> Result<SiteCensus, CrawlError> {
    config.validate()?;
    let scope = config.scope();
    let throttle = HostThrottle::new(Duration::from_millis(config.delay_ms));
    let robots = RobotsCache::new(&config.user_agent, config.respect_robots);
    let seed = config.seed_url.clone();

    // Everything ever queued, plus every redirect target reached.
    let discovered = VisitedSet::default();
    let censused = VisitedSet::default();
    let mut frontier: VecDeque<(Url, usize)> = VecDeque::new();
    discovered.insert(&seed);
    frontier.push_back((seed.clone(), 0));

    let mut site = SiteCensus::new(seed.clone());
    let seed_error = |reason: String| CrawlError::SeedUnreachable {
        url: seed.to_string(),
        reason,
    };

    while !frontier.is_empty() && (site.pages_visited() as usize) < config.max_pages {
        let room = config.max_pages - site.pages_visited() as usize;
        let want = config.parallelism.min(room);
        let mut batch = Vec::with_capacity(want);
        while batch.len() < want {
            let Some((url, depth)) = frontier.pop_front() else {
                break;
            };
            if scope.is_outbound(&url) || depth > config.max_depth {
                continue;
            }
            if !robots.allowed(&url, backend) {
                if url == seed {
                    return Err(seed_error("disallowed by robots.txt".into()));
                }
                site.robots_skipped += 1;
                continue;
            }
            batch.push((url, depth));
        }

        let results: Vec<Result<PageSource, FetchError>> = if batch.len() <= 1 {
            batch
                .iter()
                .map(|(url, depth)| fetch(url, *depth, backend, &scope, &throttle))
                .collect()
        } else {
            std::thread::scope(|s| {
                let handles: Vec<_> = batch
                    .iter()
                    .map(|(url, depth)| {
                        let (scope, throttle) = (&scope, &throttle);
                        s.spawn(move || fetch(url, *depth, backend, scope, throttle))
                    })
                    .collect();
                handles
                    .into_iter()
                    .map(|h| h.join().expect("fetch worker panicked"))
                    .collect()
            })
        };

        for ((url, depth), result) in batch.into_iter().zip(results) {
            let is_seed = url == seed;
            let page = match result {
                Ok(page) if page.is_success() => page,
                Ok(page) => {
                    let reason = format!("HTTP status {}", page.status);
                    if is_seed {
                        return Err(seed_error(reason));
                    }
                    site.fail(url, reason);
                    continue;
                }
                Err(e) => {
                    if is_seed {
                        return Err(seed_error(e.to_string()));
                    }
                    site.fail(url, e.to_string());
                    continue;
                }
            };
            discovered.insert(&page.final_url);
            if !censused.insert(&page.final_url) {
                continue;
            }
            let page_census = match census_page(&page, lexicon, policy, &scope) {
                Ok(c) => c,
                Err(e @ (CensusError::NotHtml { .. } | CensusError::NoBody { .. })) => {
                    if is_seed {
                        return Err(CrawlError::SeedNotHtml {
                            url: seed.to_string(),
                            reason: e.to_string(),
                        });
                    }
                    site.non_html += 1;
                    continue;
                }
            };
            if depth < config.max_depth {
                let mut fresh: Vec<Url> = page_census
                    .inbound_links
                    .iter()
                    .filter(|u| !discovered.contains(u))
                    .cloned()
                    .collect();
                fresh.sort();
                fresh.dedup();
                for link in fresh {
                    discovered.insert(&link);
                    frontier.push_back((link, depth + 1));
                }
            }
            site.record(page.final_url, &page_census);
        }
    }

    Ok(site)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    struct Site(HashMap<String, String>);

    impl Backend for Site {
        fn get(&self, url: &Url) -> Result<RawResponse, FetchError> {
            Ok(match self.0.get(url.as_str()) {
                Some(html) => RawResponse::ok(Some("text/html"), html.clone().into_bytes()),
                None => RawResponse::status(404),
            })
        }
    }

    fn site(pages: &[(&str, &str)]) -> Site {
        Site(
            pages
                .iter()
                .map(|(p, h)| (format!("http://s.edu/{p}"), h.to_string()))
                .collect(),
        )
    }

    fn config() -> CrawlConfig {
        let mut c = CrawlConfig::new("http://s.edu/").unwrap();
        c.delay_ms = 0;
        c.respect_robots = false;
        c
    }

    fn run(c: &CrawlConfig, s: &Site) -> Result<SiteCensus, CrawlError> {
        crawl(c, &Lexicon::default(), &ExtensionPolicy::default(), s)
    }

    #[test]
    fn single_page() {
        let s = site(&[("", "<p>only page</p>")]);
        let result = run(&config(), &s).unwrap();
        assert_eq!(result.pages_visited(), 1);
        assert_eq!(result.census.word_count, 2);
        assert_eq!(result.census, result.per_page[0].1);
    }

    #[test]
    fn cycle_terminates() {
        let s = site(&[
            ("", r#"<a href="a.html">a</a>"#),
            ("a.html", r#"<a href="b.html">b</a><a href="a.html">me</a>"#),
            (
                "b.html",
                r#"<a href="a.html">a</a><a href="b.html">me</a><a href="/">home</a>"#,
            ),
        ]);
        let result = run(&config(), &s).unwrap();
        assert_eq!(result.pages_visited(), 3);
        let urls: HashSet<_> = result.per_page.iter().map(|(u, _)| u.to_string()).collect();
        assert_eq!(urls.len(), 3);
    }

    #[test]
    fn page_limit_binds() {
        let mut pages = vec![("".to_string(), String::new())];
        let mut index = String::new();
        for i in 0..9 {
            index.push_str(&format!(r#"<a href="p{i}.html">{i}</a>"#));
            pages.push((format!("p{i}.html"), "<p>x</p>".to_string()));
        }
        pages[0].1 = index;
        let s = Site(
            pages
                .into_iter()
                .map(|(p, h)| (format!("http://s.edu/{p}"), h))
                .collect(),
        );
        let mut c = config();
        c.max_pages = 5;
        assert_eq!(run(&c, &s).unwrap().pages_visited(), 5);
        c.parallelism = 3;
        assert_eq!(run(&c, &s).unwrap().pages_visited(), 5);
    }

    #[test]
    fn depth_limit() {
        let s = site(&[
            ("", r#"<a href="1.html">1</a>"#),
            ("1.html", r#"<a href="2.html">2</a>"#),
            ("2.html", r#"<a href="3.html">3</a>"#),
            ("3.html", "end"),
        ]);
        let mut c = config();
        c.max_depth = 0;
        assert_eq!(run(&c, &s).unwrap().pages_visited(), 1);
        c.max_depth = 2;
        assert_eq!(run(&c, &s).unwrap().pages_visited(), 3);
    }

    #[test]
    fn seed_failures_are_errors() {
        let s = site(&[]);
        assert!(matches!(
            run(&config(), &s),
            Err(CrawlError::SeedUnreachable { .. })
        ));
    }

    #[test]
    fn outbound_links_never_fetched() {
        struct Guard(Site);
        impl Backend for Guard {
            fn get(&self, url: &Url) -> Result<RawResponse, FetchError> {
                assert_eq!(url.host_str(), Some("s.edu"), "fetched {url}");
                self.0.get(url)
            }
        }
        let s = Guard(site(&[(
            "",
            r#"<a href="http://other.org/">x</a><a href="http://www.s.edu/">y</a>"#,
        )]));
        let result = crawl(
            &config(),
            &Lexicon::default(),
            &ExtensionPolicy::default(),
            &s,
        )
        .unwrap();
        assert_eq!(result.census.outbound_link_count, 2);
    }

    #[test]
    fn config_validation() {
        assert!(CrawlConfig::new("ftp://s.edu/").is_err());
        assert!(CrawlConfig::new("not a url").is_err());
        assert!(CrawlConfig::new("file:///sites/a/index.html").is_ok());
        let mut c = config();
        c.parallelism = 0;
        assert_eq!(c.validate(), Err(ConfigError::NotPositive("parallelism")));
    }

    #[test]
    fn html_detection() {
        let page = |path: &str, ct: Option<&str>| PageSource {
            requested_url: Url::parse(path).unwrap(),
            final_url: Url::parse(path).unwrap(),
            status: 200,
            content_type: ct.map(str::to_string),
            body: Some(vec![]),
            depth: 0,
        };
        assert!(page("http://s.edu/a.php", Some("text/html; charset=utf-8")).is_html());
        assert!(page("http://s.edu/", None).is_html());
        assert!(page("http://s.edu/a.HTM", None).is_html());
        assert!(!page("http://s.edu/a.css", None).is_html());
        assert!(!page("http://s.edu/a.html", Some("image/png")).is_html());
    }
}
