//! Character-level partition of HTML into text and tag segments.
//!
//! Every `<` opens a tag segment that runs to the next `>`; everything else
//! is text. Comments (`<!-- ... -->`) are consumed whole so that a `>` inside
//! them does not end the tag early, and the bodies of `<script>` and `<style>`
//! are kept as single text segments marked with their enclosing element.
//! The partition is lossless: [`SegmentStream::reassemble`] returns the input.

use std::fmt;

/// Reserved tag name for `<!-- ... -->`.
pub const COMMENT: &str = "#comment";
/// Reserved tag name for `<!DOCTYPE ...>` and other `<!...>` declarations.
pub const DECLARATION: &str = "#declaration";
/// Reserved tag name for `<?...?>` processing instructions.
pub const INSTRUCTION: &str = "#instruction";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Text,
    Tag,
}

/// Raw-text element whose body is carried as a single text segment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RawTextElement {
    Script,
    Style,
}

impl RawTextElement {
    fn from_tag_name(name: &str) -> Option<Self> {
        match name {
            "script" => Some(Self::Script),
            "style" => Some(Self::Style),
            _ => None,
        }
    }

    pub fn tag_name(self) -> &'static str {
        match self {
            Self::Script => "script",
            Self::Style => "style",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Segment<'a> {
    pub kind: SegmentKind,
    /// Segment text; for tags, the delimiting `<` and `>` are excluded.
    pub content: &'a str,
    /// Byte offset of the segment start in the source (the `<` for tags).
    pub offset: usize,
    /// Set on text segments that form the body of a script or style element.
    pub enclosing: Option<RawTextElement>,
    /// `false` only for a tag cut off by the end of input.
    pub terminated: bool,
}

impl Segment<'_> {
    pub fn is_text(&self) -> bool {
        self.kind == SegmentKind::Text
    }

    pub fn is_tag(&self) -> bool {
        self.kind == SegmentKind::Tag
    }

    /// Text that a reader would see: outside script and style bodies.
    pub fn is_prose(&self) -> bool {
        self.is_text() && self.enclosing.is_none()
    }

    pub fn is_script(&self) -> bool {
        self.is_text() && self.enclosing == Some(RawTextElement::Script)
    }
}

/// Ordered alternation of text and tag segments covering a whole document.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SegmentStream<'a> {
    segments: Vec<Segment<'a>>,
}

impl<'a> SegmentStream<'a> {
    pub fn segments(&self) -> &[Segment<'a>] {
        &self.segments
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Segment<'a>> {
        self.segments.iter()
    }

    pub fn len(&self) -> usize {
        self.segments.len()
    }

    pub fn is_empty(&self) -> bool {
        self.segments.is_empty()
    }

    /// Parsed tokens of every tag segment, in document order.
    pub fn tags(&self) -> impl Iterator<Item = TagToken> + '_ {
        self.segments
            .iter()
            .filter(|s| s.is_tag())
            .map(|s| parse_tag(s.content))
    }

    /// Text segments outside script and style bodies.
    pub fn prose(&self) -> impl Iterator<Item = &'a str> + '_ {
        self.segments
            .iter()
            .filter(|s| s.is_prose())
            .map(|s| s.content)
    }

    /// Bodies of script elements.
    pub fn scripts(&self) -> impl Iterator<Item = &'a str> + '_ {
        self.segments
            .iter()
            .filter(|s| s.is_script())
            .map(|s| s.content)
    }

    /// Rebuilds the source text from the segments.
    pub fn reassemble(&self) -> String {
        let mut out = String::new();
        for seg in &self.segments {
            match seg.kind {
                SegmentKind::Text => out.push_str(seg.content),
                SegmentKind::Tag => {
                    out.push('<');
                    out.push_str(seg.content);
                    if seg.terminated {
                        out.push('>');
                    }
                }
            }
        }
        out
    }
}

impl<'s, 'a> IntoIterator for &'s SegmentStream<'a> {
    type Item = &'s Segment<'a>;
    type IntoIter = std::slice::Iter<'s, Segment<'a>>;

    fn into_iter(self) -> Self::IntoIter {
        self.segments.iter()
    }
}

/// Decodes raw page bytes as UTF-8, replacing invalid sequences.
pub fn decode(bytes: &[u8]) -> std::borrow::Cow<'_, str> {
    String::from_utf8_lossy(bytes)
}

/// Partitions `html` into text and tag segments. Never fails.
pub fn scan(html: &str) -> SegmentStream<'_> {
    let bytes = html.as_bytes();
    let len = bytes.len();
    let mut segments = Vec::new();
    let mut pos = 0;
    let mut raw: Option<RawTextElement> = None;

    while pos < len {
        if let Some(element) = raw.take() {
            let end = find_raw_text_end(bytes, pos, element.tag_name()).unwrap_or(len);
            if end > pos {
                segments.push(Segment {
                    kind: SegmentKind::Text,
                    content: &html[pos..end],
                    offset: pos,
                    enclosing: Some(element),
                    terminated: true,
                });
            }
            pos = end;
            continue;
        }

        if bytes[pos] != b'<' {
            let end = find_byte(bytes, pos, b'<').unwrap_or(len);
            segments.push(Segment {
                kind: SegmentKind::Text,
                content: &html[pos..end],
                offset: pos,
                enclosing: None,
                terminated: true,
            });
            pos = end;
            continue;
        }

        let start = pos + 1;
        let close = if html[start..].starts_with("!--") {
            // "-->" may overlap the opening dashes, as in "<!-->".
            html[start + 1..].find("-->").map(|i| start + 1 + i + 2)
        } else {
            find_byte(bytes, start, b'>')
        };
        let (content, terminated, next) = match close {
            Some(gt) => (&html[start..gt], true, gt + 1),
            None => (&html[start..], false, len),
        };
        segments.push(Segment {
            kind: SegmentKind::Tag,
            content,
            offset: pos,
            enclosing: None,
            terminated,
        });
        pos = next;

        let token = parse_tag(content);
        if !token.is_closing {
            raw = RawTextElement::from_tag_name(&token.name);
        }
    }

    SegmentStream { segments }
}

fn find_byte(bytes: &[u8], from: usize, needle: u8) -> Option<usize> {
    bytes[from..]
        .iter()
        .position(|&b| b == needle)
        .map(|i| from + i)
}

/// Finds the `<` of the `</name` that closes a raw-text element.
fn find_raw_text_end(bytes: &[u8], from: usize, name: &str) -> Option<usize> {
    let name = name.as_bytes();
    let mut i = from;
    while let Some(lt) = find_byte(bytes, i, b'<') {
        let after = lt + 2 + name.len();
        if bytes.get(lt + 1) == Some(&b'/')
            && after <= bytes.len()
            && bytes[lt + 2..after].eq_ignore_ascii_case(name)
            && bytes
                .get(after)
                .is_none_or(|b| b.is_ascii_whitespace() || *b == b'/' || *b == b'>')
        {
            return Some(lt);
        }
        i = lt + 1;
    }
    None
}

/// A tag segment structured into name and attributes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TagToken {
    /// ASCII-lowercased element name, or one of the reserved `#` names.
    pub name: String,
    pub is_closing: bool,
    /// Lowercased attribute names with raw values; first occurrence wins.
    pub attributes: Vec<(String, String)>,
    /// The tag ended in `/` (`<br/>`).
    pub is_void_style: bool,
}

impl TagToken {
    pub fn attr(&self, name: &str) -> Option<&str> {
        self.attributes
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_str())
    }

    /// True for real elements, false for comments, declarations, instructions
    /// and nameless junk.
    pub fn is_element(&self) -> bool {
        !self.name.is_empty() && !self.name.starts_with('#')
    }

    pub fn is_opening(&self, name: &str) -> bool {
        !self.is_closing && self.name == name
    }
}

impl fmt::Display for TagToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_closing {
            f.write_str("/")?;
        }
        f.write_str(&self.name)?;
        for (name, value) in &self.attributes {
            write!(f, " {name}=\"{value}\"")?;
        }
        Ok(())
    }
}

fn is_space(b: u8) -> bool {
    b.is_ascii_whitespace()
}

/// Parses the content of a tag segment. Unparseable trailing junk is dropped.
pub fn parse_tag(content: &str) -> TagToken {
    if content.starts_with("!--") {
        return TagToken {
            name: COMMENT.to_string(),
            ..TagToken::default()
        };
    }
    if content.starts_with('!') {
        return TagToken {
            name: DECLARATION.to_string(),
            ..TagToken::default()
        };
    }
    if content.starts_with('?') {
        return TagToken {
            name: INSTRUCTION.to_string(),
            ..TagToken::default()
        };
    }

    let b = content.as_bytes();
    let n = b.len();
    let mut i = 0;

    let is_closing = b.first() == Some(&b'/');
    if is_closing {
        i = 1;
    }
    let name_start = i;
    while i < n && !is_space(b[i]) && b[i] != b'/' {
        i += 1;
    }
    let name = content[name_start..i].to_ascii_lowercase();

    let mut attributes: Vec<(String, String)> = Vec::new();
    loop {
        while i < n && (is_space(b[i]) || b[i] == b'/') {
            i += 1;
        }
        if i >= n {
            break;
        }

        let attr_start = i;
        while i < n && !is_space(b[i]) && b[i] != b'=' && b[i] != b'/' {
            i += 1;
        }
        if i == attr_start {
            // stray '='
            i += 1;
            continue;
        }
        let attr_name = content[attr_start..i].to_ascii_lowercase();

        let mut j = i;
        while j < n && is_space(b[j]) {
            j += 1;
        }
        let mut value = "";
        if j < n && b[j] == b'=' {
            j += 1;
            while j < n && is_space(b[j]) {
                j += 1;
            }
            if j < n && (b[j] == b'"' || b[j] == b'\'') {
                let quote = b[j];
                let value_start = j + 1;
                let value_end = find_byte(b, value_start, quote).unwrap_or(n);
                value = &content[value_start..value_end];
                i = (value_end + 1).min(n);
            } else {
                let value_start = j;
                while j < n && !is_space(b[j]) {
                    j += 1;
                }
                value = &content[value_start..j];
                i = j;
            }
        }

        if !attributes
            .iter()
            .any(|(existing, _)| *existing == attr_name)
        {
            attributes.push((attr_name, value.to_string()));
        }
    }

    TagToken {
        name,
        is_closing,
        attributes,
        is_void_style: content.trim_end().ends_with('/'),
    }
}

/// Lowercase file extension of a URL or path, ignoring query and fragment.
///
/// Returns `None` when the last path component has no dot, starts with its
/// only dot (`.htaccess`), or ends in a dot.
pub fn extension_of(url_or_path: &str) -> Option<String> {
    let cut = url_or_path.find(['?', '#']).unwrap_or(url_or_path.len());
    let mut path = &url_or_path[..cut];
    if let Some(i) = path.find("://") {
        let after_scheme = &path[i + 3..];
        path = after_scheme.find('/').map_or("", |j| &after_scheme[j..]);
    }
    let component = path.rsplit('/').next().unwrap_or(path);
    let dot = component.rfind('.')?;
    if dot == 0 || dot + 1 == component.len() {
        return None;
    }
    Some(component[dot + 1..].to_lowercase())
}
