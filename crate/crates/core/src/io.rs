//! Reading and writing XMath XML.

use crate::error::{ParseError, ParseErrorKind};
use crate::model::{DocumentBuilder, NodeId, NodeKind, XMathDocument, XMathNode};
use crate::xml::{escape_into, location_at, parse_tree, RawElement};

/// Wrapper elements that may enclose the single formula.
const WRAPPERS: &[&str] = &["Math", "XMath"];

/// Parses XMath text into a validated document.
pub fn parse_xmath(text: &str) -> Result<XMathDocument, ParseError> {
    let mut raw = parse_tree(text)?;
    while WRAPPERS.contains(&raw.local_name()) {
        if raw.mixed || (raw.children.is_empty() && !raw.text.trim().is_empty()) {
            return Err(ParseError::new(
                ParseErrorKind::MalformedXml,
                location_at(text, raw.offset),
                format!("unexpected text in `{}`", raw.qname),
            ));
        }
        if raw.children.len() != 1 {
            return Err(ParseError::new(
                ParseErrorKind::MalformedXml,
                location_at(text, raw.offset),
                format!(
                    "`{}` must contain exactly one formula, found {}",
                    raw.qname,
                    raw.children.len()
                ),
            ));
        }
        raw = raw.children.pop().expect("one child");
    }
    let mut builder = DocumentBuilder::new();
    let root = convert(&raw, text, &mut builder)?;
    builder.finish(root)
}

fn convert(raw: &RawElement, text: &str, builder: &mut DocumentBuilder) -> Result<NodeId, ParseError> {
    let location = location_at(text, raw.offset);
    let kind = NodeKind::from_element(raw.local_name()).ok_or_else(|| {
        ParseError::new(
            ParseErrorKind::UnknownElement,
            location,
            format!("unknown element `{}`", raw.qname),
        )
    })?;
    let mut node = XMathNode::new(kind);
    for (k, v) in &raw.attrs {
        node.attrs.set(k, v.as_str());
    }
    if kind == NodeKind::Tok {
        if !raw.children.is_empty() {
            return Err(ParseError::new(
                ParseErrorKind::MalformedXml,
                location,
                "XMTok cannot have element children",
            ));
        }
        node.text = raw.text.clone();
    } else if raw.mixed || !raw.text.trim().is_empty() {
        return Err(ParseError::new(
            ParseErrorKind::MalformedXml,
            location,
            format!("unexpected text in `{}`", raw.qname),
        ));
    }
    for child in &raw.children {
        let id = convert(child, text, builder)?;
        node.children.push(id);
    }
    Ok(builder.add_at(node, location))
}

/// Writes a document back as indented XMath, attributes sorted by name.
pub fn serialize_xmath(doc: &XMathDocument) -> String {
    let mut out = String::new();
    write_node(doc, doc.root(), 0, &mut out);
    out
}

fn write_node(doc: &XMathDocument, id: NodeId, depth: usize, out: &mut String) {
    let node = doc.node(id);
    let name = node.kind.element_name();
    out.push_str(&"  ".repeat(depth));
    out.push('<');
    out.push_str(name);
    for (k, v) in node.attrs.to_pairs() {
        out.push(' ');
        out.push_str(&k);
        out.push_str("=\"");
        escape_into(out, &v, true, false);
        out.push('"');
    }
    if node.children.is_empty() && node.text.is_empty() {
        out.push_str("/>\n");
    } else if node.children.is_empty() {
        out.push('>');
        escape_into(out, &node.text, false, false);
        out.push_str(&format!("</{name}>\n"));
    } else {
        out.push_str(">\n");
        for &child in &node.children {
            write_node(doc, child, depth + 1, out);
        }
        out.push_str(&"  ".repeat(depth));
        out.push_str(&format!("</{name}>\n"));
    }
}

/// Structural equality of two documents: kinds, text, attributes, child order.
pub fn same_structure(a: &XMathDocument, b: &XMathDocument) -> bool {
    fn eq(a: &XMathDocument, x: NodeId, b: &XMathDocument, y: NodeId) -> bool {
        let (nx, ny) = (a.node(x), b.node(y));
        nx.kind == ny.kind
            && nx.text == ny.text
            && nx.attrs == ny.attrs
            && nx.children.len() == ny.children.len()
            && nx.children.iter().zip(&ny.children).all(|(&cx, &cy)| eq(a, cx, b, cy))
    }
    eq(a, a.root(), b, b.root())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Role;

    const SUM: &str = r#"<XMApp>
  <XMTok meaning="plus" role="ADDOP">+</XMTok>
  <XMTok role="ID" font="italic">a</XMTok>
  <XMDual>
    <XMApp>
      <XMRef idref="m1.1"/>
      <XMRef idref="m1.2"/>
      <XMRef idref="m1.3"/>
    </XMApp>
    <XMApp>
      <XMTok role="FUNCTION" xml:id="m1.1" font="italic">F</XMTok>
      <XMWrap>
        <XMTok role="OPEN" stretchy="false">(</XMTok>
        <XMTok role="ID" xml:id="m1.2" font="italic">a</XMTok>
        <XMTok role="PUNCT">,</XMTok>
        <XMTok role="ID" xml:id="m1.3" font="italic">b</XMTok>
        <XMTok role="CLOSE" stretchy="false">)</XMTok>
      </XMWrap>
    </XMApp>
  </XMDual>
</XMApp>"#;

    #[test]
    fn parses_sum_with_function() {
        let doc = parse_xmath(SUM).unwrap();
        let root = doc.node(doc.root());
        assert_eq!(root.kind, NodeKind::App);
        let kinds: Vec<_> = root.children.iter().map(|&c| doc.node(c).kind).collect();
        assert_eq!(kinds, [NodeKind::Tok, NodeKind::Tok, NodeKind::Dual]);
        let plus = doc.node(root.children[0]);
        assert_eq!(plus.text, "+");
        assert_eq!(plus.attrs.role, Some(Role::AddOp));
        let open = doc.node(
            doc.node(doc.node(doc.node(root.children[2]).children[1]).children[1])
                .children[0],
        );
        assert_eq!(open.attrs.stretchy, Some(false));
    }

    #[test]
    fn minimal_token() {
        let doc = parse_xmath("<XMTok/>").unwrap();
        let tok = doc.node(doc.root());
        assert_eq!(tok.kind, NodeKind::Tok);
        assert_eq!(tok.text, "");
        assert_eq!(tok.attrs, Default::default());
    }

    #[test]
    fn dangling_idref_is_reported() {
        let broken = SUM.replacen("idref=\"m1.2\"", "idref=\"m1.9\"", 1);
        let declared: std::collections::BTreeSet<&str> = ["m1.1", "m1.2", "m1.3"].into();
        let referenced: std::collections::BTreeSet<&str> = ["m1.1", "m1.9", "m1.3"].into();
        assert_eq!(referenced.difference(&declared).count(), 1);
        let err = parse_xmath(&broken).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::DanglingIdref);
        assert_eq!(err.location.line, 7);
        assert!(err.detail.contains("m1.9"));
    }

    #[test]
    fn typed_errors() {
        let cases = [
            ("<XMApp><XMFoo/></XMApp>", ParseErrorKind::UnknownElement),
            ("<XMDual><XMTok/></XMDual>", ParseErrorKind::DualArity),
            ("<XMDual><XMTok/><XMTok/><XMTok/></XMDual>", ParseErrorKind::DualArity),
            (
                r#"<XMWrap><XMTok xml:id="a"/><XMTok xml:id="a"/></XMWrap>"#,
                ParseErrorKind::DuplicateId,
            ),
            ("<XMApp>x<XMTok/></XMApp>", ParseErrorKind::MalformedXml),
            ("<XMTok><XMTok/></XMTok>", ParseErrorKind::MalformedXml),
            ("<XMRef/>", ParseErrorKind::MalformedXml),
            ("<XMApp>", ParseErrorKind::MalformedXml),
            ("<Math><XMTok/><XMTok/></Math>", ParseErrorKind::MalformedXml),
        ];
        for (input, kind) in cases {
            assert_eq!(parse_xmath(input).unwrap_err().kind, kind, "{input}");
        }
    }

    #[test]
    fn accepts_wrappers_prefixes_and_char_refs() {
        let doc = parse_xmath(
            r#"<ltx:Math xmlns:ltx="http://dlmf.nist.gov/LaTeXML"><ltx:XMath><ltx:XMTok role="ID">&#x3A8;</ltx:XMTok></ltx:XMath></ltx:Math>"#,
        )
        .unwrap();
        assert_eq!(doc.node(doc.root()).text, "\u{03A8}");
    }

    #[test]
    fn token_text_kept_verbatim() {
        let doc = parse_xmath("<XMTok> a </XMTok>").unwrap();
        assert_eq!(doc.node(doc.root()).text, " a ");
    }

    #[test]
    fn round_trip_keeps_structure() {
        let doc = parse_xmath(SUM).unwrap();
        let again = parse_xmath(&serialize_xmath(&doc)).unwrap();
        assert!(same_structure(&doc, &again));
    }

    #[test]
    fn round_trip_empty_token_and_scriptpos() {
        let src = r#"<XMApp><XMTok role="SUPERSCRIPTOP" scriptpos="post2"/><XMTok meaning="times" role="MULOP"></XMTok><XMTok data-x="1">y</XMTok></XMApp>"#;
        let doc = parse_xmath(src).unwrap();
        let text = serialize_xmath(&doc);
        assert!(text.contains(r#"scriptpos="post2""#));
        assert!(text.contains(r#"<XMTok meaning="times" role="MULOP"/>"#));
        assert!(text.contains(r#"data-x="1""#));
        assert!(same_structure(&doc, &parse_xmath(&text).unwrap()));
    }
}
