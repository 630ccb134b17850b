//! Census of interactive multimedia elements across e-learning sites.
//!
//! The pipeline is: [`crawler::crawl`] walks a site from its home page,
//! [`census::census_page`] counts elements on each HTML page using the
//! [`markup`] scanner, and [`report`] turns per-site totals into percentage
//! shares, charts and machine-readable exports.

pub mod census;
pub mod cli;
pub mod crawler;
pub mod markup;
pub mod report;
