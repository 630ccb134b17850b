use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use thiserror::Error;

/// Longest phrase a lexicon entry may hold, in words.
pub const MAX_TERM_WORDS: usize = 3;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("empty lexicon term")]
    EmptyTerm,
    #[error("line {line}: term \"{term}\" has {words} words (at most 3 allowed)")]
    TooManyWords {
        line: usize,
        term: String,
        words: usize,
    },
    #[error("cannot read lexicon {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

/// Domain terms of one to three words, stored lowercased.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Lexicon {
    entries: BTreeSet<String>,
}

impl Lexicon {
    pub fn new<I, S>(terms: I) -> Result<Self, LexiconError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut lexicon = Lexicon::default();
        for term in terms {
            lexicon.insert(term.as_ref(), 0)?;
        }
        Ok(lexicon)
    }

    /// Parses the lexicon file format: one term per line, `#` comment lines,
    /// blank lines ignored.
    pub fn parse(text: &str) -> Result<Self, LexiconError> {
        let mut lexicon = Lexicon::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            lexicon.insert(line, i + 1)?;
        }
        Ok(lexicon)
    }

    pub fn load(path: &Path) -> Result<Self, LexiconError> {
        let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::parse(&text)
    }

    fn insert(&mut self, term: &str, line: usize) -> Result<(), LexiconError> {
        let words: Vec<String> = term.split_whitespace().map(str::to_lowercase).collect();
        if words.is_empty() {
            return Err(LexiconError::EmptyTerm);
        }
        if words.len() > MAX_TERM_WORDS {
            return Err(LexiconError::TooManyWords {
                line,
                term: term.to_string(),
                words: words.len(),
            });
        }
        self.entries.insert(words.join(" "));
        Ok(())
    }

    pub fn contains(&self, phrase: &str) -> bool {
        self.entries.contains(phrase)
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(String::as_str)
    }
}
