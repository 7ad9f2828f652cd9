//! MathML text output and input.

use crate::error::{ParseError, ParseErrorKind};
use crate::target::TargetNode;
use crate::xml::{escape_into, location_at, parse_tree, RawElement};

pub const MATHML_NS: &str = "http://www.w3.org/1998/Math/MathML";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EntityMode {
    /// Literal UTF-8 for everything but markup characters.
    #[default]
    Utf8,
    /// Non-ASCII characters as hexadecimal character references.
    NumericRefs,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SerializeOptions {
    pub pretty: bool,
    pub entity_mode: EntityMode,
    /// Prefix bound to the MathML namespace, e.g. `m` for `<m:mi>`.
    pub namespace_prefix: Option<String>,
}

/// Attribute keys in output order: `id`, `xref`, then the rest alphabetically.
fn ordered_attrs(node: &TargetNode) -> Vec<(&str, &str)> {
    let mut out: Vec<(&str, &str)> = Vec::with_capacity(node.attrs.len());
    for key in ["id", "xref"] {
        if let Some(v) = node.attr(key) {
            out.push((key, v));
        }
    }
    out.extend(
        node.attrs
            .iter()
            .filter(|(k, _)| *k != "id" && *k != "xref")
            .map(|(k, v)| (k.as_str(), v.as_str())),
    );
    out
}

struct Writer<'o> {
    opts: &'o SerializeOptions,
    out: String,
}

impl Writer<'_> {
    fn name(&mut self, element: &str) {
        if let Some(prefix) = &self.opts.namespace_prefix {
            self.out.push_str(prefix);
            self.out.push(':');
        }
        self.out.push_str(element);
    }

    fn indent(&mut self, depth: usize) {
        if self.opts.pretty {
            for _ in 0..depth {
                self.out.push_str("  ");
            }
        }
    }

    fn newline(&mut self) {
        if self.opts.pretty {
            self.out.push('\n');
        }
    }

    fn node(&mut self, node: &TargetNode, depth: usize, root: bool) {
        let numeric = self.opts.entity_mode == EntityMode::NumericRefs;
        self.indent(depth);
        self.out.push('<');
        self.name(&node.element);
        if root {
            match &self.opts.namespace_prefix {
                Some(prefix) => self.out.push_str(&format!(" xmlns:{prefix}=\"{MATHML_NS}\"")),
                None => self.out.push_str(&format!(" xmlns=\"{MATHML_NS}\"")),
            }
        }
        for (k, v) in ordered_attrs(node) {
            self.out.push(' ');
            self.out.push_str(k);
            self.out.push_str("=\"");
            escape_into(&mut self.out, v, true, numeric);
            self.out.push('"');
        }
        if node.children.is_empty() {
            match &node.text {
                None => self.out.push_str("/>"),
                Some(text) => {
                    self.out.push('>');
                    escape_into(&mut self.out, text, false, numeric);
                    self.out.push_str("</");
                    self.name(&node.element);
                    self.out.push('>');
                }
            }
            self.newline();
            return;
        }
        self.out.push('>');
        self.newline();
        for child in &node.children {
            self.node(child, depth + 1, false);
        }
        self.indent(depth);
        self.out.push_str("</");
        self.name(&node.element);
        self.out.push('>');
        self.newline();
    }
}

/// Serializes a tree as XML. Equal inputs give byte-identical output.
pub fn serialize_mathml(root: &TargetNode, opts: &SerializeOptions) -> String {
    let mut writer = Writer {
        opts,
        out: String::new(),
    };
    writer.node(root, 0, true);
    writer.out
}

/// Reads MathML text back into a tree (no sources). Prefixes are dropped,
/// whitespace between elements is ignored, and token text is kept as is.
pub fn parse_mathml(text: &str) -> Result<TargetNode, ParseError> {
    let raw = parse_tree(text)?;
    convert(&raw, text)
}

fn convert(raw: &RawElement, text: &str) -> Result<TargetNode, ParseError> {
    if raw.mixed {
        return Err(ParseError::new(
            ParseErrorKind::MalformedXml,
            location_at(text, raw.offset),
            format!("mixed content in `{}`", raw.qname),
        ));
    }
    let mut node = TargetNode::new(raw.local_name());
    for (k, v) in &raw.attrs {
        node.attrs.insert(k.clone(), v.clone());
    }
    if raw.children.is_empty() {
        node.set_text(raw.text.as_str());
    }
    for child in &raw.children {
        node.children.push(convert(child, text)?);
    }
    Ok(node)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_element() {
        let opts = SerializeOptions::default();
        assert_eq!(
            serialize_mathml(&TargetNode::new("mrow"), &opts),
            format!("<mrow xmlns=\"{MATHML_NS}\"/>")
        );
    }

    #[test]
    fn numeric_refs_escape_non_ascii() {
        let opts = SerializeOptions {
            entity_mode: EntityMode::NumericRefs,
            ..Default::default()
        };
        let out = serialize_mathml(&TargetNode::token("mo", "\u{2062}"), &opts);
        assert!(out.ends_with(">&#x2062;</mo>"), "{out}");
        let utf8 = serialize_mathml(&TargetNode::token("mo", "\u{2062}"), &SerializeOptions::default());
        assert!(utf8.contains('\u{2062}'));
    }

    #[test]
    fn attribute_order_and_escaping() {
        let node = TargetNode::token("mi", "a<b")
            .with_attr("class", "c")
            .with_attr("xref", "x")
            .with_attr("id", "i")
            .with_attr("alttext", "\"q\" & r");
        let out = serialize_mathml(&node, &SerializeOptions::default());
        assert_eq!(
            out,
            format!(
                "<mi xmlns=\"{MATHML_NS}\" id=\"i\" xref=\"x\" alttext=\"&quot;q&quot; &amp; r\" class=\"c\">a&lt;b</mi>"
            )
        );
    }

    #[test]
    fn prefixed_pretty_output_parses_back() {
        let tree = TargetNode::with_children(
            "math",
            vec![TargetNode::with_children(
                "mrow",
                vec![TargetNode::token("mi", " a "), TargetNode::new("mrow")],
            )],
        );
        let opts = SerializeOptions {
            pretty: true,
            entity_mode: EntityMode::Utf8,
            namespace_prefix: Some("m".into()),
        };
        let text = serialize_mathml(&tree, &opts);
        assert!(text.starts_with("<m:math xmlns:m="));
        assert!(text.contains("\n  <m:mrow>\n    <m:mi> a </m:mi>\n    <m:mrow/>\n"));
        assert_eq!(parse_mathml(&text).unwrap(), tree);
    }
}
