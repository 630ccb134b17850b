#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use mediacensus::census::{census_html, ElementCensus, ExtensionPolicy, Lexicon, PageCensus};
use mediacensus::crawler::{
    crawl, Backend, CrawlConfig, FetchError, FileBackend, RawResponse, SiteCensus, SiteScope,
};
use mediacensus::report::{build_comparison, ComparisonReport, SiteSummary};
use serde::Deserialize;
use url::Url;

pub fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

#[derive(Debug, Deserialize)]
pub struct Manifest {
    pub page_base: String,
    pub seed: String,
    pub lexicon: String,
    pub pages: Vec<ExpectedPage>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExpectedPage {
    pub file: String,
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
    pub links_skipped: u64,
    pub scorm_found: Vec<String>,
    pub looks_scorm: bool,
}

impl ExpectedPage {
    pub fn census(&self) -> ElementCensus {
        ElementCensus {
            word_count: self.word_count,
            image_count: self.image_count,
            audio_count: self.audio_count,
            video_count: self.video_count,
            active_content_count: self.active_content_count,
            downloadable_content_count: self.downloadable_content_count,
            script_functions: self.script_functions,
            form_control_count: self.form_control_count,
            inbound_link_count: self.inbound_link_count,
            outbound_link_count: self.outbound_link_count,
            keyword_count: self.keyword_count,
            pages_counted: 1,
        }
    }
}

pub fn manifest() -> Manifest {
    let text = std::fs::read_to_string(fixtures().join("manifest.json")).unwrap();
    serde_json::from_str(&text).unwrap()
}

/// Runs the census on one manifest page; returns (expected, actual).
pub fn census_fixture(m: &Manifest, page: &ExpectedPage) -> PageCensus {
    let lexicon = Lexicon::load(&fixtures().join(&m.lexicon)).unwrap();
    let html = std::fs::read_to_string(fixtures().join("pages").join(&page.file)).unwrap();
    let url = Url::parse(&m.page_base).unwrap().join(&page.file).unwrap();
    let scope = SiteScope::new(Url::parse(&m.seed).unwrap(), false);
    census_html(&html, &url, &lexicon, &ExtensionPolicy::default(), &scope)
}

/// Returns a list of mismatch descriptions for one page.
pub fn check_fixture(m: &Manifest, page: &ExpectedPage) -> Vec<String> {
    let got = census_fixture(m, page);
    let mut problems = Vec::new();
    let expected = page.census();
    for ((name, want), (_, have)) in expected.counters().iter().zip(got.census.counters()) {
        if *want != have {
            problems.push(format!("{}: {name} expected {want}, got {have}", page.file));
        }
    }
    if got.links_skipped != page.links_skipped {
        problems.push(format!(
            "{}: links_skipped expected {}, got {}",
            page.file, page.links_skipped, got.links_skipped
        ));
    }
    let found: Vec<String> = got.scorm.api_names_found.iter().cloned().collect();
    if found != page.scorm_found || got.scorm.looks_scorm != page.looks_scorm {
        problems.push(format!(
            "{}: scorm expected {:?}/{}, got {:?}/{}",
            page.file, page.scorm_found, page.looks_scorm, found, got.scorm.looks_scorm
        ));
    }
    problems
}

pub fn offline_root() -> PathBuf {
    fixtures().join("offline")
}

pub fn offline_config(host: &str, parallelism: usize, robots: bool) -> CrawlConfig {
    let mut config = CrawlConfig::new(&format!("http://{host}/index.html")).unwrap();
    config.delay_ms = 0;
    config.parallelism = parallelism;
    config.respect_robots = robots;
    config
}

/// Serves the offline fixtures and records every URL requested.
pub struct RecordingBackend {
    inner: FileBackend,
    pub requested: Mutex<Vec<Url>>,
}

impl RecordingBackend {
    pub fn new() -> Self {
        RecordingBackend {
            inner: FileBackend::new(offline_root()).unwrap(),
            requested: Mutex::new(Vec::new()),
        }
    }

    pub fn requested_hosts(&self) -> BTreeSet<String> {
        self.requested
            .lock()
            .unwrap()
            .iter()
            .filter_map(|u| u.host_str().map(str::to_string))
            .collect()
    }
}

impl Backend for RecordingBackend {
    fn get(&self, url: &Url) -> Result<RawResponse, FetchError> {
        self.requested.lock().unwrap().push(url.clone());
        self.inner.get(url)
    }
}

pub fn crawl_offline(
    host: &str,
    parallelism: usize,
    robots: bool,
) -> (SiteCensus, RecordingBackend) {
    let backend = RecordingBackend::new();
    let lexicon = Lexicon::load(&fixtures().join("lexicon.txt")).unwrap();
    let site = crawl(
        &offline_config(host, parallelism, robots),
        &lexicon,
        &ExtensionPolicy::default(),
        &backend,
    )
    .unwrap();
    (site, backend)
}

/// The two offline sites as a labelled comparison, used for the golden charts.
pub fn two_site_report() -> ComparisonReport {
    let (a, _) = crawl_offline("site-a.test", 1, true);
    let (b, _) = crawl_offline("site-b.test", 1, true);
    build_comparison(vec![
        ("site-a".to_string(), SiteSummary::from(&a)),
        ("site-b".to_string(), SiteSummary::from(&b)),
    ])
    .unwrap()
}

pub struct CliRun {
    pub code: i32,
    pub stderr: String,
}

pub fn run_cli<I, S>(args: I) -> CliRun
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    let output = std::process::Command::new(env!("CARGO_BIN_EXE_mediacensus"))
        .args(args)
        .output()
        .unwrap();
    CliRun {
        code: output.status.code().unwrap_or(-1),
        stderr: String::from_utf8_lossy(&output.stderr).into_owned(),
    }
}

/// Scans the given offline fixture hosts into `out`, labelled by host prefix.
pub fn cli_scan(out: &Path, hosts: &[&str], extra: &[&str]) -> CliRun {
    let mut args: Vec<String> = vec!["scan".into()];
    for host in hosts {
        args.push(format!("http://{host}/index.html"));
    }
    for host in hosts {
        args.push("--label".into());
        args.push(host.trim_end_matches(".test").to_string());
    }
    let root = offline_root();
    let lexicon = fixtures().join("lexicon.txt");
    args.extend([
        "--offline-root".to_string(),
        root.display().to_string(),
        "--lexicon".to_string(),
        lexicon.display().to_string(),
        "--delay-ms".to_string(),
        "0".to_string(),
        "--out".to_string(),
        out.display().to_string(),
    ]);
    args.extend(extra.iter().map(|s| s.to_string()));
    run_cli(args)
}

/// Sorted (relative path, contents) of every file under `dir`.
pub fn dir_contents(dir: &Path) -> Vec<(String, Vec<u8>)> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<(String, Vec<u8>)>) {
        for entry in std::fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(root, &path, out);
            } else {
                let rel = path.strip_prefix(root).unwrap().display().to_string();
                out.push((rel, std::fs::read(&path).unwrap()));
            }
        }
    }
    let mut files = Vec::new();
    walk(dir, dir, &mut files);
    files.sort();
    files
}
