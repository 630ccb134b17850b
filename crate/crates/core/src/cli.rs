//! Command-line front end: `scan` crawls sites and saves one JSON report per
//! site, `compare` and `render` turn saved reports into charts and exports.
//!
//! Exit codes: 0 on success, 1 on bad arguments or an unusable seed,
//! 2 when a scan finished but some pages failed to load.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::census::{ExtensionPolicy, Lexicon, MediaClass};
use crate::crawler::{crawl, Backend, CrawlConfig, FileBackend, HttpBackend, DEFAULT_USER_AGENT};
use crate::report::{
    build_comparison, export_csv, export_json, load_json, render_ascii, render_svg,
    ComparisonReport, SiteSummary,
};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILURE: u8 = 1;
pub const EXIT_PARTIAL: u8 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "mediacensus",
    version,
    about = "Measure the share of interactive multimedia elements on e-learning sites"
)]
pub struct RunSpec {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Crawl each URL and write <label>.json per site plus the requested charts
    Scan(Box<ScanArgs>),
    /// Combine saved JSON reports into comparison.<ext>
    Compare(ReportArgs),
    /// Re-render saved JSON reports into report.<ext>
    Render(ReportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Svg,
    Ascii,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Json => "json",
            Format::Csv => "csv",
            Format::Svg => "svg",
            Format::Ascii => "txt",
        }
    }
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output directory
    #[arg(long, value_name = "DIR", default_value = ".")]
    pub out: PathBuf,
    /// Output format; repeat for several [default: svg]
    #[arg(long = "format", value_enum, value_name = "F")]
    pub formats: Vec<Format>,
    /// Site label, paired in order with each site
    #[arg(long = "label", value_name = "NAME")]
    pub labels: Vec<String>,
}

impl OutputArgs {
    fn formats(&self) -> Vec<Format> {
        let mut formats = Vec::new();
        for f in &self.formats {
            if !formats.contains(f) {
                formats.push(*f);
            }
        }
        if formats.is_empty() {
            formats.push(Format::Svg);
        }
        formats
    }
}

#[derive(Debug, Args)]
pub struct CrawlArgs {
    /// Stop after this many censused pages per site
    #[arg(long, value_name = "N", default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_pages: u64,
    /// Follow links at most this many hops from the seed
    #[arg(long, value_name = "N", default_value_t = 10)]
    pub max_depth: u64,
    /// Minimum delay between requests to one host, in milliseconds
    #[arg(long, value_name = "MS", default_value_t = 500)]
    pub delay_ms: u64,
    /// Per-request timeout in milliseconds
    #[arg(long, value_name = "MS", default_value_t = 10_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub timeout_ms: u64,
    /// Concurrent fetches per site
    #[arg(long, value_name = "N", default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub parallelism: u64,
    /// User-Agent header and robots.txt agent name
    #[arg(long, value_name = "UA", default_value = DEFAULT_USER_AGENT)]
    pub user_agent: String,
    /// Count subdomains of the seed host as the same site
    #[arg(long)]
    pub subdomains_inbound: bool,
    /// Ignore robots.txt
    #[arg(long)]
    pub no_robots: bool,
}

#[derive(Debug, Args)]
pub struct ScanArgs {
    /// Home page URL of each site (http, https or file)
    #[arg(required = true, value_name = "URL")]
    pub urls: Vec<String>,
    #[command(flatten)]
    pub crawl: CrawlArgs,
    /// Domain lexicon: one 1-3 word term per line [default: empty]
    #[arg(long, value_name = "FILE")]
    pub lexicon: Option<PathBuf>,
    /// Image extensions, comma separated [default: bmp,jpg,gif]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub ext_image: Option<Vec<String>>,
    /// Audio extensions [default: wav,mp3]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub ext_audio: Option<Vec<String>>,
    /// Video extensions [default: dat,avi]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub ext_video: Option<Vec<String>>,
    /// Active content extensions [default: swf]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub ext_active: Option<Vec<String>>,
    /// Downloadable document extensions [default: doc,pdf,ppt]
    #[arg(long, value_name = "LIST", value_delimiter = ',')]
    pub ext_downloadable: Option<Vec<String>>,
    /// Serve pages from this directory instead of the network
    /// (http://host/path maps to DIR/host/path)
    #[arg(long, value_name = "DIR")]
    pub offline_root: Option<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// JSON reports written by `scan`
    #[arg(required = true, value_name = "REPORT")]
    pub reports: Vec<PathBuf>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let spec = match RunSpec::try_parse_from(args) {
        Ok(spec) => spec,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                EXIT_FAILURE
            } else {
                EXIT_OK
            };
        }
    };
    let result = match &spec.command {
        Command::Scan(args) => run_scan(args),
        Command::Compare(args) => run_compare(args, "comparison"),
        Command::Render(args) => run_compare(args, "report"),
    };
    result.unwrap_or_else(|message| {
        eprintln!("error: {message}");
        EXIT_FAILURE
    })
}

fn default_label(config: &CrawlConfig) -> String {
    let url = &config.seed_url;
    if let Some(host) = url.host_str().filter(|h| !h.is_empty()) {
        return host.to_string();
    }
    url.path()
        .rsplit('/')
        .skip(1)
        .find(|s| !s.is_empty())
        .unwrap_or("site")
        .to_string()
}

fn file_stem_for(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') {
                c
            } else {
                '_'
            }
        })
        .collect()
}

fn resolve_labels(explicit: &[String], defaults: Vec<String>) -> Result<Vec<String>, String> {
    if explicit.is_empty() {
        let mut labels: Vec<String> = Vec::new();
        for base in defaults {
            let mut label = base.clone();
            let mut n = 2;
            while labels.contains(&label) {
                label = format!("{base}-{n}");
                n += 1;
            }
            labels.push(label);
        }
        return Ok(labels);
    }
    if explicit.len() != defaults.len() {
        return Err(format!(
            "{} labels given for {} sites; pass one --label per site or none",
            explicit.len(),
            defaults.len()
        ));
    }
    Ok(explicit.to_vec())
}

fn build_policy(args: &ScanArgs) -> Result<ExtensionPolicy, String> {
    let overrides = [
        (MediaClass::Image, &args.ext_image),
        (MediaClass::Audio, &args.ext_audio),
        (MediaClass::Video, &args.ext_video),
        (MediaClass::Active, &args.ext_active),
        (MediaClass::Downloadable, &args.ext_downloadable),
    ];
    let mut policy = ExtensionPolicy::default();
    for (class, list) in overrides {
        if let Some(list) = list {
            policy = policy.with_class(class, list).map_err(|e| e.to_string())?;
        }
    }
    Ok(policy)
}

fn write_file(path: &Path, contents: &str) -> Result<(), String> {
    std::fs::write(path, contents).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn write_formats(
    report: &ComparisonReport,
    formats: &[Format],
    dir: &Path,
    stem: &str,
) -> Result<(), String> {
    for format in formats {
        let contents = match format {
            Format::Json => export_json(report),
            Format::Csv => export_csv(report),
            Format::Svg => render_svg(report).map_err(|e| e.to_string())?,
            Format::Ascii => render_ascii(report),
        };
        let path = dir.join(format!("{stem}.{}", format.extension()));
        write_file(&path, &contents)?;
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

pub fn run_scan(args: &ScanArgs) -> Result<u8, String> {
    let mut configs = Vec::with_capacity(args.urls.len());
    for url in &args.urls {
        let mut config = CrawlConfig::new(url).map_err(|e| e.to_string())?;
        config.max_pages = args.crawl.max_pages as usize;
        config.max_depth = args.crawl.max_depth as usize;
        config.delay_ms = args.crawl.delay_ms;
        config.timeout_ms = args.crawl.timeout_ms;
        config.parallelism = args.crawl.parallelism as usize;
        config.user_agent = args.crawl.user_agent.clone();
        config.treat_subdomains_inbound = args.crawl.subdomains_inbound;
        config.respect_robots = !args.crawl.no_robots;
        configs.push(config);
    }
    let labels = resolve_labels(
        &args.output.labels,
        configs.iter().map(default_label).collect(),
    )?;
    let mut stems: Vec<String> = Vec::new();
    for label in &labels {
        let stem = file_stem_for(label);
        if stems.contains(&stem) {
            return Err(format!("labels collide on output file {stem}.json"));
        }
        stems.push(stem);
    }
    let lexicon = match &args.lexicon {
        Some(path) => Lexicon::load(path).map_err(|e| e.to_string())?,
        None => Lexicon::default(),
    };
    let policy = build_policy(args)?;
    let offline = match &args.offline_root {
        Some(root) => Some(
            FileBackend::new(root).map_err(|e| format!("offline root {}: {e}", root.display()))?,
        ),
        None => None,
    };
    let local_files = FileBackend::new("/").map_err(|e| e.to_string())?;
    let http = HttpBackend::new(&configs[0]);

    std::fs::create_dir_all(&args.output.out)
        .map_err(|e| format!("cannot create {}: {e}", args.output.out.display()))?;

    let mut sites: Vec<(String, SiteSummary)> = Vec::new();
    let mut seed_failed = false;
    let mut partial = false;
    for ((config, label), stem) in configs.iter().zip(&labels).zip(&stems) {
        let backend: &dyn Backend = match (&offline, config.seed_url.scheme()) {
            (Some(root), _) => root,
            (None, "file") => &local_files,
            (None, _) => &http,
        };
        let site = match crawl(config, &lexicon, &policy, backend) {
            Ok(site) => site,
            Err(e) => {
                eprintln!("{label}: {e}");
                seed_failed = true;
                continue;
            }
        };
        eprintln!(
            "{label}: {} pages censused, {} failed, {} skipped by robots.txt",
            site.pages_visited(),
            site.pages_failed,
            site.robots_skipped
        );
        for (url, reason) in &site.failures {
            eprintln!("  failed {url}: {reason}");
        }
        partial |= site.pages_failed > 0;

        let summary = SiteSummary::from(&site);
        let single =
            build_comparison(vec![(label.clone(), summary.clone())]).map_err(|e| e.to_string())?;
        let path = args.output.out.join(format!("{stem}.json"));
        write_file(&path, &export_json(&single))?;
        eprintln!("wrote {}", path.display());
        sites.push((label.clone(), summary));
    }

    if !sites.is_empty() {
        let report = build_comparison(sites).map_err(|e| e.to_string())?;
        write_formats(&report, &args.output.formats(), &args.output.out, "report")?;
    }

    Ok(if seed_failed {
        EXIT_FAILURE
    } else if partial {
        EXIT_PARTIAL
    } else {
        EXIT_OK
    })
}

pub fn run_compare(args: &ReportArgs, stem: &str) -> Result<u8, String> {
    let mut sites = Vec::new();
    for path in &args.reports {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
        let loaded = load_json(&text).map_err(|e| format!("{}: {e}", path.display()))?;
        sites.extend(loaded);
    }
    let labels = if args.output.labels.is_empty() {
        sites.iter().map(|(l, _)| l.clone()).collect()
    } else {
        resolve_labels(&args.output.labels, vec![String::new(); sites.len()])?
    };
    let sites = labels
        .into_iter()
        .zip(sites)
        .map(|(label, (_, site))| (label, site));
    let report = build_comparison(sites).map_err(|e| e.to_string())?;
    std::fs::create_dir_all(&args.output.out)
        .map_err(|e| format!("cannot create {}: {e}", args.output.out.display()))?;
    write_formats(&report, &args.output.formats(), &args.output.out, stem)?;
    Ok(EXIT_OK)
}
