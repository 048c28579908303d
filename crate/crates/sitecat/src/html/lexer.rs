//! A forgiving tag-soup lexer.
//!
//! Produces a flat event stream (start tags, end tags, text) from any
//! input string without ever failing. Malformed markup degrades to text
//! or gets skipped; it never aborts. Raw-text elements (script, style,
//! title, textarea, xmp, noframes) swallow their content up to the
//! matching close tag, so `<` inside them never opens a tag.

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Event<'a> {
    Text(&'a str),
    Start(Tag<'a>),
    End(&'a str),
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Tag<'a> {
    pub name: &'a str,
    pub attrs: Vec<(&'a str, &'a str)>,
    pub self_closing: bool,
}

impl<'a> Tag<'a> {
    pub fn is(&self, name: &str) -> bool {
        self.name.eq_ignore_ascii_case(name)
    }

    pub fn attr(&self, name: &str) -> Option<&'a str> {
        self.attrs
            .iter()
            .find(|(k, _)| k.eq_ignore_ascii_case(name))
            .map(|(_, v)| *v)
    }
}

const RAW_TEXT_ELEMENTS: [&str; 6] = ["script", "style", "title", "textarea", "xmp", "noframes"];

pub(crate) struct Lexer<'a> {
    src: &'a str,
    pos: usize,
    pending: Option<Event<'a>>,
    raw_until: Option<&'a str>,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Self {
        Lexer {
            src,
            pos: 0,
            pending: None,
            raw_until: None,
        }
    }

    fn bytes(&self) -> &'a [u8] {
        self.src.as_bytes()
    }

    fn peek(&self, offset: usize) -> Option<u8> {
        self.bytes().get(self.pos + offset).copied()
    }

    /// Case-insensitive search for `needle` starting at `from`.
    fn find_ci(&self, needle: &str, from: usize) -> Option<usize> {
        let hay = self.bytes();
        let n = needle.as_bytes();
        if n.is_empty() || from >= hay.len() {
            return None;
        }
        hay[from..]
            .windows(n.len())
            .position(|w| w.eq_ignore_ascii_case(n))
            .map(|i| from + i)
    }

    /// Consumes raw-text element content up to `</name`, emitting the text
    /// and queueing the end tag.
    fn raw_text(&mut self, name: &'a str) -> Event<'a> {
        let close = format!("</{name}");
        let start = self.pos;
        let text = match self.find_ci(&close, start) {
            Some(at) => {
                // skip past the close tag's '>'
                let after = at + close.len();
                self.pos = match self.bytes()[after..].iter().position(|&b| b == b'>') {
                    Some(gt) => after + gt + 1,
                    None => self.src.len(),
                };
                &self.src[start..at]
            }
            None => {
                // unterminated: everything to EOF is content
                self.pos = self.src.len();
                &self.src[start..]
            }
        };
        if text.is_empty() {
            Event::End(name)
        } else {
            self.pending = Some(Event::End(name));
            Event::Text(text)
        }
    }

    fn skip_until_byte(&mut self, b: u8, from: usize) {
        self.pos = match self.bytes()[from..].iter().position(|&x| x == b) {
            Some(i) => from + i + 1,
            None => self.src.len(),
        };
    }

    /// Parses a start tag beginning at `self.pos` (which points at '<').
    fn start_tag(&mut self) -> Event<'a> {
        let bytes = self.bytes();
        let mut i = self.pos + 1;
        let name_start = i;
        while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'-' || bytes[i] == b':') {
            i += 1;
        }
        let name = &self.src[name_start..i];
        let mut attrs = Vec::new();
        let mut self_closing = false;
        loop {
            while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                i += 1;
            }
            if i >= bytes.len() {
                break;
            }
            match bytes[i] {
                b'>' => {
                    i += 1;
                    break;
                }
                b'/' => {
                    if self.bytes().get(i + 1) == Some(&b'>') {
                        self_closing = true;
                        i += 2;
                        break;
                    }
                    i += 1;
                }
                _ => {
                    let attr_start = i;
                    while i < bytes.len()
                        && !bytes[i].is_ascii_whitespace()
                        && bytes[i] != b'='
                        && bytes[i] != b'>'
                        && bytes[i] != b'/'
                    {
                        i += 1;
                    }
                    let attr_name = &self.src[attr_start..i];
                    while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                        i += 1;
                    }
                    let mut value: &'a str = "";
                    if i < bytes.len() && bytes[i] == b'=' {
                        i += 1;
                        while i < bytes.len() && bytes[i].is_ascii_whitespace() {
                            i += 1;
                        }
                        if i < bytes.len() && (bytes[i] == b'"' || bytes[i] == b'\'') {
                            let quote = bytes[i];
                            i += 1;
                            let v_start = i;
                            while i < bytes.len() && bytes[i] != quote {
                                i += 1;
                            }
                            value = &self.src[v_start..i];
                            if i < bytes.len() {
                                i += 1; // closing quote
                            }
                        } else {
                            let v_start = i;
                            while i < bytes.len() && !bytes[i].is_ascii_whitespace() && bytes[i] != b'>' {
                                i += 1;
                            }
                            value = &self.src[v_start..i];
                        }
                    }
                    if !attr_name.is_empty() {
                        attrs.push((attr_name, value));
                    }
                }
            }
        }
        self.pos = i;
        let tag = Tag {
            name,
            attrs,
            self_closing,
        };
        if !self_closing && RAW_TEXT_ELEMENTS.iter().any(|r| tag.is(r)) {
            self.raw_until = Some(name);
        }
        Event::Start(tag)
    }
}

impl<'a> Iterator for Lexer<'a> {
    type Item = Event<'a>;

    fn next(&mut self) -> Option<Event<'a>> {
        if let Some(ev) = self.pending.take() {
            return Some(ev);
        }
        if let Some(name) = self.raw_until.take() {
            return Some(self.raw_text(name));
        }
        loop {
            if self.pos >= self.src.len() {
                return None;
            }
            let bytes = self.bytes();
            if bytes[self.pos] != b'<' {
                // text run: up to the next '<' that actually opens markup
                let start = self.pos;
                let mut i = self.pos;
                while i < bytes.len() {
                    if bytes[i] == b'<' && self.opens_markup(i) {
                        break;
                    }
                    i += 1;
                }
                self.pos = i;
                return Some(Event::Text(&self.src[start..i]));
            }
            // at '<'
            match self.peek(1) {
                None => {
                    self.pos = self.src.len();
                    return Some(Event::Text("<"));
                }
                Some(b'!') => {
                    if self.src[self.pos..].starts_with("<!--") {
                        match self.find_ci("-->", self.pos + 4) {
                            Some(at) => self.pos = at + 3,
                            None => self.pos = self.src.len(),
                        }
                    } else {
                        self.skip_until_byte(b'>', self.pos + 2);
                    }
                }
                Some(b'?') => self.skip_until_byte(b'>', self.pos + 2),
                Some(b'/') => {
                    let mut i = self.pos + 2;
                    let name_start = i;
                    while i < bytes.len()
                        && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'-' || bytes[i] == b':')
                    {
                        i += 1;
                    }
                    let name = &self.src[name_start..i];
                    self.skip_until_byte(b'>', i);
                    if !name.is_empty() {
                        return Some(Event::End(name));
                    }
                    // bogus `</>` or `</ >`: skip silently
                }
                Some(c) if c.is_ascii_alphabetic() => {
                    return Some(self.start_tag());
                }
                Some(_) => {
                    // literal '<' in text; fold it into a text run
                    let start = self.pos;
                    let mut i = self.pos + 1;
                    while i < bytes.len() {
                        if bytes[i] == b'<' && self.opens_markup(i) {
                            break;
                        }
                        i += 1;
                    }
                    self.pos = i;
                    return Some(Event::Text(&self.src[start..i]));
                }
            }
        }
    }
}

impl<'a> Lexer<'a> {
    fn opens_markup(&self, at: usize) -> bool {
        match self.bytes().get(at + 1) {
            Some(c) => c.is_ascii_alphabetic() || *c == b'!' || *c == b'?' || *c == b'/',
            None => false,
        }
    }
}

/// Decodes the handful of entities that matter for text extraction:
/// the named basics plus numeric references. Unknown entities pass
/// through untouched.
pub(crate) fn decode_entities(s: &str) -> String {
    if !s.contains('&') {
        return s.to_string();
    }
    let mut out = String::with_capacity(s.len());
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < s.len() {
        if bytes[i] == b'&' {
            if let Some(semi) = s[i + 1..].find(';').map(|p| i + 1 + p) {
                let body = &s[i + 1..semi];
                if body.len() <= 10 {
                    let decoded = match body {
                        "amp" => Some('&'),
                        "lt" => Some('<'),
                        "gt" => Some('>'),
                        "quot" => Some('"'),
                        "apos" => Some('\''),
                        "nbsp" => Some(' '),
                        _ => numeric_entity(body),
                    };
                    if let Some(c) = decoded {
                        out.push(c);
                        i = semi + 1;
                        continue;
                    }
                }
            }
        }
        let c_len = s[i..].chars().next().map(|c| c.len_utf8()).unwrap_or(1);
        out.push_str(&s[i..i + c_len]);
        i += c_len;
    }
    out
}

fn numeric_entity(body: &str) -> Option<char> {
    let code = match body.strip_prefix("#x").or_else(|| body.strip_prefix("#X")) {
        Some(hex) => u32::from_str_radix(hex, 16).ok()?,
        None => body.strip_prefix('#')?.parse::<u32>().ok()?,
    };
    char::from_u32(code)
}
