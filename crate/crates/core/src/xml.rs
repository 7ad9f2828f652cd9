//! Minimal element-tree reader shared by the XMath and MathML parsers.
//!
//! Wraps `quick-xml` events into an owned tree with byte offsets, resolving
//! character references, the predefined XML entities and a small table of
//! MathML named entities.

use quick_xml::events::{BytesStart, Event};
use quick_xml::reader::Reader;
use quick_xml::XmlVersion;

use crate::error::{Location, ParseError, ParseErrorKind};

#[derive(Debug, Clone)]
pub(crate) struct RawElement {
    /// Qualified name as written, e.g. `m:mrow`.
    pub qname: String,
    pub attrs: Vec<(String, String)>,
    pub children: Vec<RawElement>,
    /// Concatenated character data of this element (ignoring children).
    pub text: String,
    /// True if some non-whitespace text sits next to element children.
    pub mixed: bool,
    pub offset: usize,
}

impl RawElement {
    pub fn local_name(&self) -> &str {
        local_part(&self.qname)
    }
}

pub(crate) fn local_part(qname: &str) -> &str {
    qname.rsplit_once(':').map_or(qname, |(_, local)| local)
}

/// Named entities accepted beyond the five predefined by XML.
const NAMED_ENTITIES: &[(&str, &str)] = &[
    ("ApplyFunction", "\u{2061}"),
    ("af", "\u{2061}"),
    ("InvisibleTimes", "\u{2062}"),
    ("it", "\u{2062}"),
    ("InvisibleComma", "\u{2063}"),
    ("ic", "\u{2063}"),
    ("LeftAngleBracket", "\u{27E8}"),
    ("langle", "\u{27E8}"),
    ("RightAngleBracket", "\u{27E9}"),
    ("rangle", "\u{27E9}"),
    ("HilbertSpace", "\u{210B}"),
    ("int", "\u{222B}"),
    ("Integral", "\u{222B}"),
    ("sum", "\u{2211}"),
    ("prod", "\u{220F}"),
    ("DifferentialD", "\u{2146}"),
    ("dd", "\u{2146}"),
    ("PartialD", "\u{2202}"),
    ("part", "\u{2202}"),
    ("infin", "\u{221E}"),
    ("minus", "\u{2212}"),
    ("times", "\u{00D7}"),
    ("sdot", "\u{22C5}"),
    ("VerticalBar", "\u{2223}"),
    ("mid", "\u{2223}"),
    ("nbsp", "\u{00A0}"),
    ("Alpha", "\u{0391}"),
    ("Beta", "\u{0392}"),
    ("Gamma", "\u{0393}"),
    ("Delta", "\u{0394}"),
    ("Epsilon", "\u{0395}"),
    ("Zeta", "\u{0396}"),
    ("Eta", "\u{0397}"),
    ("Theta", "\u{0398}"),
    ("Iota", "\u{0399}"),
    ("Kappa", "\u{039A}"),
    ("Lambda", "\u{039B}"),
    ("Mu", "\u{039C}"),
    ("Nu", "\u{039D}"),
    ("Xi", "\u{039E}"),
    ("Omicron", "\u{039F}"),
    ("Pi", "\u{03A0}"),
    ("Rho", "\u{03A1}"),
    ("Sigma", "\u{03A3}"),
    ("Tau", "\u{03A4}"),
    ("Upsilon", "\u{03A5}"),
    ("Phi", "\u{03A6}"),
    ("Chi", "\u{03A7}"),
    ("Psi", "\u{03A8}"),
    ("Omega", "\u{03A9}"),
    ("alpha", "\u{03B1}"),
    ("beta", "\u{03B2}"),
    ("gamma", "\u{03B3}"),
    ("delta", "\u{03B4}"),
    ("epsilon", "\u{03B5}"),
    ("zeta", "\u{03B6}"),
    ("eta", "\u{03B7}"),
    ("theta", "\u{03B8}"),
    ("iota", "\u{03B9}"),
    ("kappa", "\u{03BA}"),
    ("lambda", "\u{03BB}"),
    ("mu", "\u{03BC}"),
    ("nu", "\u{03BD}"),
    ("xi", "\u{03BE}"),
    ("omicron", "\u{03BF}"),
    ("pi", "\u{03C0}"),
    ("rho", "\u{03C1}"),
    ("sigma", "\u{03C3}"),
    ("tau", "\u{03C4}"),
    ("upsilon", "\u{03C5}"),
    ("phi", "\u{03C6}"),
    ("chi", "\u{03C7}"),
    ("psi", "\u{03C8}"),
    ("omega", "\u{03C9}"),
];

fn resolve_entity(name: &str) -> Option<&'static str> {
    match name {
        "lt" => Some("<"),
        "gt" => Some(">"),
        "amp" => Some("&"),
        "apos" => Some("'"),
        "quot" => Some("\""),
        _ => NAMED_ENTITIES.iter().find(|(n, _)| *n == name).map(|(_, v)| *v),
    }
}

/// Converts a byte offset into a 1-based line/column pair (columns count chars).
pub(crate) fn location_at(text: &str, offset: usize) -> Location {
    let offset = offset.min(text.len());
    let mut cut = offset;
    while !text.is_char_boundary(cut) {
        cut -= 1;
    }
    let before = &text[..cut];
    let line = before.matches('\n').count() + 1;
    let line_start = before.rfind('\n').map_or(0, |i| i + 1);
    let column = before[line_start..].chars().count() + 1;
    Location { line, column }
}

fn malformed(text: &str, offset: usize, detail: impl Into<String>) -> ParseError {
    ParseError::new(ParseErrorKind::MalformedXml, location_at(text, offset), detail)
}

fn open_element(start: &BytesStart<'_>, text: &str, offset: usize) -> Result<RawElement, ParseError> {
    let qname = start.name().as_ref().to_string();
    let mut attrs = Vec::new();
    for attr in start.attributes() {
        let attr = attr.map_err(|e| malformed(text, offset, format!("bad attribute: {e}")))?;
        let key = attr.key.as_ref().to_string();
        if key == "xmlns" || key.starts_with("xmlns:") {
            continue;
        }
        let value = attr
            .normalized_value_with(XmlVersion::Implicit1_0, 4, resolve_entity)
            .map_err(|e| malformed(text, offset, format!("bad value for `{key}`: {e}")))?;
        if attrs.iter().any(|(k, _)| *k == key) {
            return Err(malformed(text, offset, format!("duplicate attribute `{key}`")));
        }
        attrs.push((key, value.into_owned()));
    }
    Ok(RawElement {
        qname,
        attrs,
        children: Vec::new(),
        text: String::new(),
        mixed: false,
        offset,
    })
}

fn push_text(stack: &mut [RawElement], chunk: &str, text: &str, offset: usize) -> Result<(), ParseError> {
    match stack.last_mut() {
        Some(top) => {
            top.text.push_str(chunk);
            Ok(())
        }
        None if chunk.trim().is_empty() => Ok(()),
        None => Err(malformed(text, offset, "text outside of the root element")),
    }
}

fn close_element(
    stack: &mut Vec<RawElement>,
    root: &mut Option<RawElement>,
    text: &str,
    offset: usize,
) -> Result<(), ParseError> {
    let mut done = stack.pop().expect("close without open");
    if !done.children.is_empty() && !done.text.trim().is_empty() {
        done.mixed = true;
    }
    match stack.last_mut() {
        Some(parent) => parent.children.push(done),
        None => {
            if root.is_some() {
                return Err(malformed(text, offset, "more than one root element"));
            }
            *root = Some(done);
        }
    }
    Ok(())
}

/// Parses a complete document into its root element.
pub(crate) fn parse_tree(text: &str) -> Result<RawElement, ParseError> {
    let mut reader = Reader::from_str(text);
    reader.config_mut().check_end_names = true;

    let mut stack: Vec<RawElement> = Vec::new();
    let mut root: Option<RawElement> = None;

    loop {
        let offset = reader.buffer_position() as usize;
        let event = match reader.read_event() {
            Ok(ev) => ev,
            Err(e) => {
                return Err(malformed(text, reader.error_position() as usize, e.to_string()));
            }
        };
        match event {
            Event::Start(start) => {
                if stack.is_empty() && root.is_some() {
                    return Err(malformed(text, offset, "more than one root element"));
                }
                stack.push(open_element(&start, text, offset)?);
            }
            Event::Empty(start) => {
                if stack.is_empty() && root.is_some() {
                    return Err(malformed(text, offset, "more than one root element"));
                }
                stack.push(open_element(&start, text, offset)?);
                close_element(&mut stack, &mut root, text, offset)?;
            }
            Event::End(_) => close_element(&mut stack, &mut root, text, offset)?,
            Event::Text(t) => {
                let chunk = t.xml10_content();
                push_text(&mut stack, &chunk, text, offset)?;
            }
            Event::CData(c) => {
                let chunk = c.into_inner().into_owned();
                push_text(&mut stack, &chunk, text, offset)?;
            }
            Event::GeneralRef(r) => {
                let resolved = if r.is_char_ref() {
                    match r.resolve_char_ref() {
                        Ok(Some(ch)) => ch.to_string(),
                        _ => {
                            return Err(malformed(
                                text,
                                offset,
                                format!("invalid character reference `&{};`", &*r),
                            ));
                        }
                    }
                } else {
                    match resolve_entity(&r) {
                        Some(s) => s.to_string(),
                        None => {
                            return Err(malformed(text, offset, format!("unknown entity `&{};`", &*r)));
                        }
                    }
                };
                push_text(&mut stack, &resolved, text, offset)?;
            }
            Event::Comment(_) | Event::Decl(_) | Event::PI(_) | Event::DocType(_) => {}
            Event::Eof => break,
        }
    }

    if let Some(open) = stack.last() {
        return Err(malformed(
            text,
            open.offset,
            format!("unclosed element `{}`", open.qname),
        ));
    }
    root.ok_or_else(|| malformed(text, text.len(), "document has no root element"))
}

/// Escapes character data. Non-ASCII is written as numeric references when
/// `numeric` is set.
pub(crate) fn escape_into(out: &mut String, s: &str, in_attr: bool, numeric: bool) {
    for ch in s.chars() {
        match ch {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' if in_attr => out.push_str("&quot;"),
            '\t' | '\n' | '\r' if in_attr => {
                out.push_str(&format!("&#x{:X};", ch as u32));
            }
            '\r' => out.push_str("&#xD;"),
            c if numeric && !c.is_ascii() => out.push_str(&format!("&#x{:X};", c as u32)),
            c => out.push(c),
        }
    }
}
