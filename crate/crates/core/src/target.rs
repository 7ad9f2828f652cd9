//! Generated MathML nodes.

use std::collections::BTreeMap;

use crate::model::{Branch, NodeId};

/// The XMath node a target was ascribed to, and which tree it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Source {
    pub node: NodeId,
    pub branch: Branch,
}

/// A MathML element. `source` is unset for wrappers (`math`, `semantics`,
/// annotations) and for trees read back from text.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TargetNode {
    pub element: String,
    pub attrs: BTreeMap<String, String>,
    pub children: Vec<TargetNode>,
    /// Character data of a token element; never `Some("")`.
    pub text: Option<String>,
    pub source: Option<Source>,
}

impl TargetNode {
    pub fn new(element: impl Into<String>) -> Self {
        Self {
            element: element.into(),
            attrs: BTreeMap::new(),
            children: Vec::new(),
            text: None,
            source: None,
        }
    }

    pub fn token(element: impl Into<String>, text: impl Into<String>) -> Self {
        let mut node = Self::new(element);
        node.set_text(text);
        node
    }

    pub fn with_children(element: impl Into<String>, children: Vec<TargetNode>) -> Self {
        let mut node = Self::new(element);
        node.children = children;
        node
    }

    pub fn set_text(&mut self, text: impl Into<String>) {
        let text = text.into();
        self.text = (!text.is_empty()).then_some(text);
    }

    pub fn with_attr(mut self, key: &str, value: impl Into<String>) -> Self {
        self.attrs.insert(key.to_string(), value.into());
        self
    }

    pub fn with_source(mut self, node: NodeId, branch: Branch) -> Self {
        self.source = Some(Source { node, branch });
        self
    }

    pub fn attr(&self, key: &str) -> Option<&str> {
        self.attrs.get(key).map(String::as_str)
    }

    pub fn id(&self) -> Option<&str> {
        self.attr("id")
    }

    pub fn xref(&self) -> Option<&str> {
        self.attr("xref")
    }

    /// Pre-order (document order) traversal.
    pub fn preorder(&self) -> Vec<&TargetNode> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(node) = stack.pop() {
            out.push(node);
            stack.extend(node.children.iter().rev());
        }
        out
    }

    /// Mutable pre-order visit.
    pub fn visit_mut(&mut self, f: &mut impl FnMut(&mut TargetNode)) {
        f(self);
        for child in &mut self.children {
            child.visit_mut(f);
        }
    }

    /// Copy with every `id` and `xref` attribute removed.
    pub fn without_ids(&self) -> TargetNode {
        let mut copy = self.clone();
        copy.visit_mut(&mut |n| {
            n.attrs.remove("id");
            n.attrs.remove("xref");
        });
        copy
    }

    /// Equality of element names, text, attributes and children; sources
    /// are ignored.
    pub fn same_markup(&self, other: &TargetNode) -> bool {
        self.element == other.element
            && self.text == other.text
            && self.attrs == other.attrs
            && self.children.len() == other.children.len()
            && self.children.iter().zip(&other.children).all(|(a, b)| a.same_markup(b))
    }
}
