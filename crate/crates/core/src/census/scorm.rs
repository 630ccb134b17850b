use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::markup::SegmentStream;

/// SCORM 1.2 and 2004 run-time API verbs.
pub const SCORM_API_NAMES: [&str; 11] = [
    "LMSInitialize",
    "LMSFinish",
    "LMSCommit",
    "LMSGetValue",
    "LMSSetValue",
    "LMSGetLastError",
    "Initialize",
    "Terminate",
    "Commit",
    "GetValue",
    "SetValue",
];

const INITIALIZE_FAMILY: [&str; 2] = ["LMSInitialize", "Initialize"];
const TERMINATE_FAMILY: [&str; 2] = ["LMSFinish", "Terminate"];

/// SCORM run-time API calls seen in page scripts.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScormFindings {
    pub api_names_found: BTreeSet<String>,
    pub looks_scorm: bool,
}

impl ScormFindings {
    pub fn from_names(names: BTreeSet<String>) -> Self {
        let has = |family: &[&str]| family.iter().any(|n| names.contains(*n));
        let looks_scorm = has(&INITIALIZE_FAMILY) && has(&TERMINATE_FAMILY);
        ScormFindings {
            api_names_found: names,
            looks_scorm,
        }
    }

    /// Union of two findings; the family rule is re-evaluated on the union.
    pub fn merge(&mut self, other: &ScormFindings) {
        let mut names = std::mem::take(&mut self.api_names_found);
        names.extend(other.api_names_found.iter().cloned());
        *self = ScormFindings::from_names(names);
    }
}

fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Whole-identifier, case-sensitive search for the API names in script bodies.
pub fn detect_scorm_api(stream: &SegmentStream<'_>) -> ScormFindings {
    let mut names = BTreeSet::new();
    for script in stream.scripts() {
        for ident in script.split(|c: char| !is_ident_char(c)) {
            if let Some(name) = SCORM_API_NAMES.iter().find(|n| **n == ident) {
                names.insert(name.to_string());
            }
        }
    }
    ScormFindings::from_names(names)
}
