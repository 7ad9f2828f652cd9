//! The XMath document tree.
//!
//! Nodes live in an arena owned by [`XMathDocument`] and are addressed by
//! [`NodeId`]. A document is immutable once built; [`DocumentBuilder`] checks
//! the structural invariants (dual arity, ref shape, unique ids, resolvable
//! idrefs) before handing one out.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::error::{Location, ModelError, ParseError, ParseErrorKind};

/// Handle of a node inside its [`XMathDocument`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    App,
    Tok,
    Dual,
    Ref,
    Wrap,
}

impl NodeKind {
    pub fn from_element(local_name: &str) -> Option<Self> {
        Some(match local_name {
            "XMApp" => NodeKind::App,
            "XMTok" => NodeKind::Tok,
            "XMDual" => NodeKind::Dual,
            "XMRef" => NodeKind::Ref,
            "XMWrap" => NodeKind::Wrap,
            _ => return None,
        })
    }

    pub fn element_name(self) -> &'static str {
        match self {
            NodeKind::App => "XMApp",
            NodeKind::Tok => "XMTok",
            NodeKind::Dual => "XMDual",
            NodeKind::Ref => "XMRef",
            NodeKind::Wrap => "XMWrap",
        }
    }
}

/// One of the two output trees of a parallel rendering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Branch {
    Content,
    Presentation,
}

impl Branch {
    /// Child position of this branch inside an `XMDual`.
    pub fn dual_child(self) -> usize {
        match self {
            Branch::Content => 0,
            Branch::Presentation => 1,
        }
    }

    pub fn opposite(self) -> Branch {
        match self {
            Branch::Content => Branch::Presentation,
            Branch::Presentation => Branch::Content,
        }
    }
}

/// Grammatical role of a token.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Role {
    AddOp,
    MulOp,
    Id,
    Function,
    Open,
    Close,
    Punct,
    Unknown,
    IntOp,
    DiffOp,
    SuperscriptOp,
    SubscriptOp,
    Other(String),
}

impl Role {
    pub fn parse(s: &str) -> Role {
        match s {
            "ADDOP" => Role::AddOp,
            "MULOP" => Role::MulOp,
            "ID" => Role::Id,
            "FUNCTION" => Role::Function,
            "OPEN" => Role::Open,
            "CLOSE" => Role::Close,
            "PUNCT" => Role::Punct,
            "UNKNOWN" => Role::Unknown,
            "INTOP" => Role::IntOp,
            "DIFFOP" => Role::DiffOp,
            "SUPERSCRIPTOP" => Role::SuperscriptOp,
            "SUBSCRIPTOP" => Role::SubscriptOp,
            other => Role::Other(other.to_string()),
        }
    }

    pub fn as_str(&self) -> &str {
        match self {
            Role::AddOp => "ADDOP",
            Role::MulOp => "MULOP",
            Role::Id => "ID",
            Role::Function => "FUNCTION",
            Role::Open => "OPEN",
            Role::Close => "CLOSE",
            Role::Punct => "PUNCT",
            Role::Unknown => "UNKNOWN",
            Role::IntOp => "INTOP",
            Role::DiffOp => "DIFFOP",
            Role::SuperscriptOp => "SUPERSCRIPTOP",
            Role::SubscriptOp => "SUBSCRIPTOP",
            Role::Other(s) => s,
        }
    }
}

/// Attributes with a defined meaning, plus everything else verbatim.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SemanticAttrs {
    pub role: Option<Role>,
    pub meaning: Option<String>,
    pub xml_id: Option<String>,
    pub idref: Option<String>,
    pub font: Option<String>,
    pub mathstyle: Option<String>,
    pub stretchy: Option<bool>,
    pub scriptpos: Option<String>,
    /// Unrecognised attributes, keyed by qualified name.
    pub extra: BTreeMap<String, String>,
}

impl SemanticAttrs {
    /// Sets an attribute by its XML name, routing known names to typed fields.
    pub fn set(&mut self, name: &str, value: impl Into<String>) {
        let value = value.into();
        match name {
            "role" => self.role = Some(Role::parse(&value)),
            "meaning" => self.meaning = Some(value),
            "xml:id" => self.xml_id = Some(value),
            "idref" => self.idref = Some(value),
            "font" => self.font = Some(value),
            "mathstyle" => self.mathstyle = Some(value),
            "scriptpos" => self.scriptpos = Some(value),
            "stretchy" if value == "true" => self.stretchy = Some(true),
            "stretchy" if value == "false" => self.stretchy = Some(false),
            _ => {
                self.extra.insert(name.to_string(), value);
            }
        }
    }

    /// All attributes as name/value pairs, sorted by name.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let mut out: BTreeMap<String, String> = self.extra.clone();
        let mut put = |k: &str, v: Option<&str>| {
            if let Some(v) = v {
                out.insert(k.to_string(), v.to_string());
            }
        };
        put("role", self.role.as_ref().map(Role::as_str));
        put("meaning", self.meaning.as_deref());
        put("xml:id", self.xml_id.as_deref());
        put("idref", self.idref.as_deref());
        put("font", self.font.as_deref());
        put("mathstyle", self.mathstyle.as_deref());
        put("scriptpos", self.scriptpos.as_deref());
        put("stretchy", self.stretchy.map(|b| if b { "true" } else { "false" }));
        out.into_iter().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct XMathNode {
    pub kind: NodeKind,
    pub children: Vec<NodeId>,
    /// Token text; always empty for non-tokens.
    pub text: String,
    pub attrs: SemanticAttrs,
}

impl XMathNode {
    pub fn new(kind: NodeKind) -> Self {
        Self {
            kind,
            children: Vec::new(),
            text: String::new(),
            attrs: SemanticAttrs::default(),
        }
    }

    pub fn role(&self) -> Option<&Role> {
        self.attrs.role.as_ref()
    }

    pub fn meaning(&self) -> Option<&str> {
        self.attrs.meaning.as_deref()
    }
}

/// An XMath formula with its id and parent indexes.
#[derive(Debug, Clone)]
pub struct XMathDocument {
    nodes: Vec<XMathNode>,
    parents: Vec<Option<NodeId>>,
    locations: Vec<Location>,
    id_index: HashMap<String, NodeId>,
    root: NodeId,
}

impl XMathDocument {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn node(&self, id: NodeId) -> &XMathNode {
        &self.nodes[id.index()]
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len() as u32).map(NodeId)
    }

    pub fn parent(&self, id: NodeId) -> Option<NodeId> {
        self.parents[id.index()]
    }

    /// Source position of the element that produced `id`.
    pub fn location(&self, id: NodeId) -> Location {
        self.locations[id.index()]
    }

    pub fn lookup_id(&self, xml_id: &str) -> Option<NodeId> {
        self.id_index.get(xml_id).copied()
    }

    /// All `xml:id` values declared in the document.
    pub fn declared_ids(&self) -> impl Iterator<Item = &str> {
        self.id_index.keys().map(String::as_str)
    }

    /// Nodes in document order (pre-order, structural children only).
    pub fn preorder(&self) -> Vec<NodeId> {
        let mut out = Vec::with_capacity(self.nodes.len());
        let mut stack = vec![self.root];
        while let Some(id) = stack.pop() {
            out.push(id);
            stack.extend(self.node(id).children.iter().rev());
        }
        out
    }

    /// Follows one `XMRef` step.
    pub fn resolve_ref(&self, ref_node: NodeId) -> Result<NodeId, ModelError> {
        let node = self.node(ref_node);
        if node.kind != NodeKind::Ref {
            return Err(ModelError::NotARef);
        }
        let idref = node.attrs.idref.as_deref().unwrap_or_default();
        self.lookup_id(idref)
            .ok_or_else(|| ModelError::DanglingRef(idref.to_string()))
    }

    /// `id` itself, or its referent when it is an `XMRef`.
    pub fn deref(&self, id: NodeId) -> NodeId {
        if self.node(id).kind == NodeKind::Ref {
            // Builder guarantees idrefs resolve.
            self.resolve_ref(id).expect("validated idref")
        } else {
            id
        }
    }

    /// Closest strict ancestor that is an `XMDual`, following parent links only.
    pub fn nearest_dual_ancestor(&self, node: NodeId) -> Option<NodeId> {
        let mut cur = self.parent(node);
        while let Some(id) = cur {
            if self.node(id).kind == NodeKind::Dual {
                return Some(id);
            }
            cur = self.parent(id);
        }
        None
    }

    /// Operator applied at the root of one branch of `dual`: the first child of
    /// that branch when it is an `XMApp`, with a ref resolved one step.
    pub fn top_operator_of(&self, dual: NodeId, branch: Branch) -> Option<NodeId> {
        let node = self.node(dual);
        debug_assert_eq!(node.kind, NodeKind::Dual);
        let branch_root = *node.children.get(branch.dual_child())?;
        let app = self.node(branch_root);
        if app.kind != NodeKind::App {
            return None;
        }
        app.children.first().map(|&op| self.deref(op))
    }
}

/// Incremental constructor for [`XMathDocument`].
#[derive(Debug, Default)]
pub struct DocumentBuilder {
    nodes: Vec<XMathNode>,
    locations: Vec<Location>,
}

impl DocumentBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a node whose children were added earlier.
    pub fn add(&mut self, node: XMathNode) -> NodeId {
        self.add_at(node, Location::default())
    }

    pub fn add_at(&mut self, node: XMathNode, location: Location) -> NodeId {
        let id = NodeId(self.nodes.len() as u32);
        self.nodes.push(node);
        self.locations.push(location);
        id
    }

    pub fn tok(&mut self, text: &str, attrs: &[(&str, &str)]) -> NodeId {
        let mut node = XMathNode::new(NodeKind::Tok);
        node.text = text.to_string();
        for (k, v) in attrs {
            node.attrs.set(k, *v);
        }
        self.add(node)
    }

    pub fn parent(&mut self, kind: NodeKind, children: Vec<NodeId>, attrs: &[(&str, &str)]) -> NodeId {
        let mut node = XMathNode::new(kind);
        node.children = children;
        for (k, v) in attrs {
            node.attrs.set(k, *v);
        }
        self.add(node)
    }

    pub fn reference(&mut self, idref: &str) -> NodeId {
        self.parent(NodeKind::Ref, Vec::new(), &[("idref", idref)])
    }

    /// Validates the invariants and freezes the document rooted at `root`.
    pub fn finish(self, root: NodeId) -> Result<XMathDocument, ParseError> {
        let DocumentBuilder { nodes, locations } = self;
        let n = nodes.len();
        let err = |kind, id: NodeId, detail: String| ParseError::new(kind, locations[id.index()], detail);

        // Reachability from root and single-parent check, in document order.
        let mut parents: Vec<Option<NodeId>> = vec![None; n];
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut stack = vec![root];
        seen[root.index()] = true;
        while let Some(id) = stack.pop() {
            order.push(id);
            for &child in nodes[id.index()].children.iter().rev() {
                if seen[child.index()] {
                    return Err(err(
                        ParseErrorKind::MalformedXml,
                        child,
                        "node has more than one parent".into(),
                    ));
                }
                seen[child.index()] = true;
                parents[child.index()] = Some(id);
                stack.push(child);
            }
        }

        let mut id_index = HashMap::new();
        for &id in &order {
            let node = &nodes[id.index()];
            let name = node.kind.element_name();
            match node.kind {
                NodeKind::Dual if node.children.len() != 2 => {
                    return Err(err(
                        ParseErrorKind::DualArity,
                        id,
                        format!("XMDual needs exactly 2 children, found {}", node.children.len()),
                    ));
                }
                NodeKind::Ref | NodeKind::Tok if !node.children.is_empty() => {
                    return Err(err(
                        ParseErrorKind::MalformedXml,
                        id,
                        format!("{name} cannot have children"),
                    ));
                }
                NodeKind::Ref if node.attrs.idref.is_none() => {
                    return Err(err(ParseErrorKind::MalformedXml, id, "XMRef without idref".into()));
                }
                _ => {}
            }
            if node.kind != NodeKind::Tok && !node.text.is_empty() {
                return Err(err(
                    ParseErrorKind::MalformedXml,
                    id,
                    format!("{name} cannot hold text"),
                ));
            }
            if let Some(xml_id) = &node.attrs.xml_id {
                if id_index.insert(xml_id.clone(), id).is_some() {
                    return Err(err(
                        ParseErrorKind::DuplicateId,
                        id,
                        format!("duplicate xml:id `{xml_id}`"),
                    ));
                }
            }
        }
        for &id in &order {
            if let Some(idref) = &nodes[id.index()].attrs.idref {
                if !id_index.contains_key(idref) {
                    return Err(err(
                        ParseErrorKind::DanglingIdref,
                        id,
                        format!("idref `{idref}` has no matching xml:id"),
                    ));
                }
            }
        }

        // Drop anything not reachable from the root so ids stay dense.
        if order.len() != n {
            let mut remap = vec![None; n];
            for (new, old) in order.iter().enumerate() {
                remap[old.index()] = Some(NodeId(new as u32));
            }
            let map = |id: NodeId| remap[id.index()].expect("reachable");
            let mut new_nodes = Vec::with_capacity(order.len());
            let mut new_locs = Vec::with_capacity(order.len());
            let mut new_parents = Vec::with_capacity(order.len());
            for &old in &order {
                let mut node = nodes[old.index()].clone();
                node.children = node.children.iter().map(|&c| map(c)).collect();
                new_nodes.push(node);
                new_locs.push(locations[old.index()]);
                new_parents.push(parents[old.index()].map(map));
            }
            let id_index = id_index.into_iter().map(|(k, v)| (k, map(v))).collect();
            return Ok(XMathDocument {
                nodes: new_nodes,
                parents: new_parents,
                locations: new_locs,
                id_index,
                root: map(root),
            });
        }

        Ok(XMathDocument {
            nodes,
            parents,
            locations,
            id_index,
            root,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// a + F(a,b) with F applied through a dual.
    fn sum_with_function() -> (XMathDocument, Vec<NodeId>) {
        let mut b = DocumentBuilder::new();
        let plus = b.tok("+", &[("meaning", "plus"), ("role", "ADDOP")]);
        let a = b.tok("a", &[("role", "ID"), ("font", "italic")]);
        let r1 = b.reference("m1.1");
        let r2 = b.reference("m1.2");
        let r3 = b.reference("m1.3");
        let capp = b.parent(NodeKind::App, vec![r1, r2, r3], &[]);
        let f = b.tok("F", &[("role", "FUNCTION"), ("xml:id", "m1.1")]);
        let open = b.tok("(", &[("role", "OPEN"), ("stretchy", "false")]);
        let a2 = b.tok("a", &[("role", "ID"), ("xml:id", "m1.2")]);
        let comma = b.tok(",", &[("role", "PUNCT")]);
        let bb = b.tok("b", &[("role", "ID"), ("xml:id", "m1.3")]);
        let close = b.tok(")", &[("role", "CLOSE"), ("stretchy", "false")]);
        let wrap = b.parent(NodeKind::Wrap, vec![open, a2, comma, bb, close], &[]);
        let papp = b.parent(NodeKind::App, vec![f, wrap], &[]);
        let dual = b.parent(NodeKind::Dual, vec![capp, papp], &[]);
        let root = b.parent(NodeKind::App, vec![plus, a, dual], &[]);
        let doc = b.finish(root).unwrap();
        // Ids are dense and stable because every node is reachable.
        (
            doc,
            vec![
                plus, a, r1, r2, r3, capp, f, open, a2, comma, bb, close, wrap, papp, dual, root,
            ],
        )
    }

    #[test]
    fn resolves_refs_to_declaring_node() {
        let (doc, ids) = sum_with_function();
        let (r1, f) = (ids[2], ids[6]);
        assert_eq!(doc.resolve_ref(r1), Ok(f));
        assert_eq!(doc.resolve_ref(f), Err(ModelError::NotARef));
    }

    #[test]
    fn two_refs_share_identity() {
        let mut b = DocumentBuilder::new();
        let t = b.tok("x", &[("xml:id", "t")]);
        let r1 = b.reference("t");
        let r2 = b.reference("t");
        let root = b.parent(NodeKind::Wrap, vec![t, r1, r2], &[]);
        let doc = b.finish(root).unwrap();
        let expected = doc.lookup_id("t").unwrap();
        assert_eq!(doc.resolve_ref(r1).unwrap(), expected);
        assert_eq!(doc.resolve_ref(r2).unwrap(), expected);
    }

    #[test]
    fn nearest_dual_is_structural() {
        let (doc, ids) = sum_with_function();
        let (plus, open, dual, f) = (ids[0], ids[7], ids[14], ids[6]);
        assert_eq!(doc.nearest_dual_ancestor(open), Some(dual));
        assert_eq!(doc.nearest_dual_ancestor(f), Some(dual));
        assert_eq!(doc.nearest_dual_ancestor(plus), None);
        assert_eq!(doc.nearest_dual_ancestor(dual), None);
    }

    #[test]
    fn top_operator_resolves_ref() {
        let (doc, ids) = sum_with_function();
        let (f, dual) = (ids[6], ids[14]);
        assert_eq!(doc.top_operator_of(dual, Branch::Content), Some(f));
        assert_eq!(doc.top_operator_of(dual, Branch::Presentation), Some(f));
    }

    #[test]
    fn top_operator_absent_for_bare_token_branch() {
        let mut b = DocumentBuilder::new();
        let c = b.tok("c", &[]);
        let p = b.tok("p", &[]);
        let dual = b.parent(NodeKind::Dual, vec![c, p], &[]);
        let doc = b.finish(dual).unwrap();
        assert_eq!(doc.top_operator_of(dual, Branch::Content), None);
    }

    #[test]
    fn builder_rejects_bad_structure() {
        let mut b = DocumentBuilder::new();
        let c = b.tok("c", &[]);
        let dual = b.parent(NodeKind::Dual, vec![c], &[]);
        assert_eq!(b.finish(dual).unwrap_err().kind, ParseErrorKind::DualArity);

        let mut b = DocumentBuilder::new();
        let r = b.reference("nowhere");
        assert_eq!(b.finish(r).unwrap_err().kind, ParseErrorKind::DanglingIdref);

        let mut b = DocumentBuilder::new();
        let t1 = b.tok("a", &[("xml:id", "x")]);
        let t2 = b.tok("b", &[("xml:id", "x")]);
        let w = b.parent(NodeKind::Wrap, vec![t1, t2], &[]);
        assert_eq!(b.finish(w).unwrap_err().kind, ParseErrorKind::DuplicateId);
    }

    #[test]
    fn unknown_roles_are_kept() {
        assert_eq!(Role::parse("RELOP"), Role::Other("RELOP".into()));
        assert_eq!(Role::parse("INTOP"), Role::IntOp);
        assert_eq!(Role::parse("RELOP").as_str(), "RELOP");
    }
}
