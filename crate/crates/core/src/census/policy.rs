use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// The media classes recognised by file extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MediaClass {
    Image,
    Audio,
    Video,
    Active,
    Downloadable,
}

impl MediaClass {
    pub const ALL: [MediaClass; 5] = [
        MediaClass::Image,
        MediaClass::Audio,
        MediaClass::Video,
        MediaClass::Active,
        MediaClass::Downloadable,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MediaClass::Image => "image",
            MediaClass::Audio => "audio",
            MediaClass::Video => "video",
            MediaClass::Active => "active",
            MediaClass::Downloadable => "downloadable",
        }
    }
}

impl fmt::Display for MediaClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PolicyError {
    #[error("extension \"{ext}\" is listed as both {first} and {second}")]
    Overlap {
        ext: String,
        first: MediaClass,
        second: MediaClass,
    },
    #[error("empty extension in {0} list")]
    EmptyExtension(MediaClass),
}

/// Which file extensions count as which media class.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtensionPolicy {
    sets: [BTreeSet<String>; 5],
}

impl Default for ExtensionPolicy {
    fn default() -> Self {
        let set = |exts: &[&str]| exts.iter().map(|e| e.to_string()).collect();
        ExtensionPolicy {
            sets: [
                set(&["bmp", "jpg", "gif"]),
                set(&["wav", "mp3"]),
                set(&["dat", "avi"]),
                set(&["swf"]),
                set(&["doc", "pdf", "ppt"]),
            ],
        }
    }
}

fn normalize_ext(ext: &str) -> String {
    ext.trim().trim_start_matches('.').to_lowercase()
}

impl ExtensionPolicy {
    /// Replaces the extension list for one class, keeping the others.
    pub fn with_class<I, S>(mut self, class: MediaClass, exts: I) -> Result<Self, PolicyError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut set = BTreeSet::new();
        for ext in exts {
            let ext = normalize_ext(ext.as_ref());
            if ext.is_empty() {
                return Err(PolicyError::EmptyExtension(class));
            }
            set.insert(ext);
        }
        self.sets[class as usize] = set;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<(), PolicyError> {
        for (i, first) in MediaClass::ALL.iter().enumerate() {
            for second in &MediaClass::ALL[i + 1..] {
                if let Some(ext) = self.sets[*first as usize]
                    .intersection(&self.sets[*second as usize])
                    .next()
                {
                    return Err(PolicyError::Overlap {
                        ext: ext.clone(),
                        first: *first,
                        second: *second,
                    });
                }
            }
        }
        Ok(())
    }

    pub fn extensions(&self, class: MediaClass) -> &BTreeSet<String> {
        &self.sets[class as usize]
    }

    pub fn contains(&self, class: MediaClass, ext: &str) -> bool {
        self.sets[class as usize].contains(ext)
    }

    pub fn classify(&self, ext: &str) -> Option<MediaClass> {
        MediaClass::ALL.into_iter().find(|c| self.contains(*c, ext))
    }
}
