use thiserror::Error;
use url::Url;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum UnresolvableUrl {
    #[error("unsupported scheme \"{0}\"")]
    UnsupportedScheme(String),
    #[error("invalid URL reference: {0}")]
    Invalid(#[from] url::ParseError),
}

const SUPPORTED_SCHEMES: [&str; 3] = ["http", "https", "file"];

fn finish(mut url: Url) -> Result<Url, UnresolvableUrl> {
    if !SUPPORTED_SCHEMES.contains(&url.scheme()) {
        return Err(UnresolvableUrl::UnsupportedScheme(url.scheme().to_string()));
    }
    // The url crate already lowercases scheme and host, drops default ports
    // and removes dot segments.
    url.set_fragment(None);
    Ok(url)
}

/// Resolves `reference` against `base` and normalizes the result.
pub fn normalize_url(base: &Url, reference: &str) -> Result<Url, UnresolvableUrl> {
    finish(base.join(reference.trim())?)
}

/// Parses and normalizes an absolute URL.
pub fn parse_absolute(input: &str) -> Result<Url, UnresolvableUrl> {
    finish(Url::parse(input.trim())?)
}

/// The part of the web that counts as "this site".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiteScope {
    seed: Url,
    treat_subdomains_inbound: bool,
}

impl SiteScope {
    pub fn new(seed: Url, treat_subdomains_inbound: bool) -> Self {
        SiteScope {
            seed,
            treat_subdomains_inbound,
        }
    }

    pub fn seed(&self) -> &Url {
        &self.seed
    }

    pub fn seed_host(&self) -> &str {
        self.seed.host_str().unwrap_or("")
    }

    /// True when `url` lies outside the seed's site.
    ///
    /// For web URLs the host must equal the seed host (or be a subdomain of
    /// it when subdomains are treated as inbound). For `file` URLs the path
    /// must sit under the seed's directory.
    pub fn is_outbound(&self, url: &Url) -> bool {
        let seed_is_file = self.seed.scheme() == "file";
        if seed_is_file != (url.scheme() == "file") {
            return true;
        }
        if seed_is_file {
            let seed_path = self.seed.path();
            let dir = &seed_path[..=seed_path.rfind('/').unwrap_or(0)];
            return !url.path().starts_with(dir);
        }
        let Some(host) = url.host_str() else {
            return true;
        };
        let seed_host = self.seed_host();
        if host == seed_host {
            return false;
        }
        let subdomain = host
            .strip_suffix(seed_host)
            .is_some_and(|prefix| prefix.ends_with('.'));
        !(self.treat_subdomains_inbound && subdomain)
    }
}

/// See [`SiteScope::is_outbound`].
pub fn is_outbound(url: &Url, scope: &SiteScope) -> bool {
    scope.is_outbound(url)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn url(s: &str) -> Url {
        Url::parse(s).unwrap()
    }

    #[test]
    fn dot_segments() {
        assert_eq!(
            normalize_url(&url("http://s.edu/a/b.html"), "../c.html")
                .unwrap()
                .as_str(),
            "http://s.edu/c.html"
        );
    }

    #[test]
    fn case_port_fragment() {
        assert_eq!(
            normalize_url(&url("http://s.edu/"), "http://S.EDU:80/x#y")
                .unwrap()
                .as_str(),
            "http://s.edu/x"
        );
        assert_eq!(
            normalize_url(&url("http://s.edu/"), "HTTPS://s.edu:443/q?b=2&a=1")
                .unwrap()
                .as_str(),
            "https://s.edu/q?b=2&a=1"
        );
        assert_eq!(
            normalize_url(&url("http://s.edu/"), "http://s.edu:8080/")
                .unwrap()
                .as_str(),
            "http://s.edu:8080/"
        );
    }

    #[test]
    fn excluded_schemes() {
        let base = url("http://s.edu/");
        for r in [
            "mailto:a@b",
            "javascript:void(0)",
            "data:text/plain,x",
            "ftp://s.edu/",
        ] {
            assert!(
                matches!(
                    normalize_url(&base, r),
                    Err(UnresolvableUrl::UnsupportedScheme(_))
                ),
                "{r}"
            );
        }
        assert!(matches!(
            normalize_url(&base, "http://[::1"),
            Err(UnresolvableUrl::Invalid(_))
        ));
    }

    #[test]
    fn outbound_by_host() {
        let scope = SiteScope::new(url("http://s.edu/"), false);
        assert!(!scope.is_outbound(&url("http://s.edu/x")));
        assert!(!scope.is_outbound(&url("https://s.edu:8443/x")));
        assert!(scope.is_outbound(&url("http://www.s.edu/x")));
        assert!(scope.is_outbound(&url("http://other.org/")));
        assert!(scope.is_outbound(&url("http://evils.edu/")));
        assert!(scope.is_outbound(&url("file:///s.edu/x")));
        assert!(!scope.is_outbound(scope.seed()));

        let scope = SiteScope::new(url("http://s.edu/"), true);
        assert!(!scope.is_outbound(&url("http://www.s.edu/x")));
        assert!(!scope.is_outbound(&url("http://a.b.s.edu/x")));
        assert!(scope.is_outbound(&url("http://evils.edu/")));
    }

    #[test]
    fn outbound_by_file_tree() {
        let scope = SiteScope::new(url("file:///sites/a/index.html"), false);
        assert!(!scope.is_outbound(&url("file:///sites/a/sub/page.html")));
        assert!(scope.is_outbound(&url("file:///sites/b/page.html")));
        assert!(scope.is_outbound(&url("file:///sites/ab/page.html")));
        assert!(scope.is_outbound(&url("http://sites/a/")));
        assert!(!scope.is_outbound(scope.seed()));
    }
}
