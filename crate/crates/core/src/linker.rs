//! Id allocation, cross-reference linking and parallel assembly.
//!
//! Every generated node carries the XMath node it was ascribed to. Sources get
//! a base id (their `xml:id`, or a fresh `prefix.k`); the targets of one
//! source in one tree are numbered base, base+"a", base+"b", ... in document
//! order, and content ids end in `.cmml`. A target's `xref` is the
//! document-order-first target of the same source in the other tree.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::error::ConvertError;
use crate::model::{Branch, NodeId, XMathDocument};
use crate::target::TargetNode;

pub const CONTENT_ENCODING: &str = "MathML-Content";
pub const TEX_ENCODING: &str = "application/x-tex";
pub const MATH_CLASS: &str = "ltx_Math";

/// Letters appended to the base id of the n-th target of a source
/// (0 → "", 1 → "a", 26 → "z", 27 → "aa", ...).
pub fn suffix_letters(mut n: usize) -> String {
    let mut out = Vec::new();
    while n > 0 {
        n -= 1;
        out.push(b'a' + (n % 26) as u8);
        n /= 26;
    }
    out.reverse();
    String::from_utf8(out).expect("ascii")
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdScheme {
    pub prefix: String,
    /// Next `k` for `prefix.k` allocation.
    pub next_counter: usize,
    pub content_suffix: String,
}

impl IdScheme {
    /// Prefix taken from the first `xml:id` in the document (the part before
    /// the first dot), defaulting to `m1`.
    pub fn for_document(doc: &XMathDocument) -> Self {
        let prefix = doc
            .preorder()
            .into_iter()
            .find_map(|id| doc.node(id).attrs.xml_id.clone())
            .map(|xml_id| xml_id.split('.').next().unwrap_or_default().to_string())
            .filter(|p| !p.is_empty())
            .unwrap_or_else(|| "m1".to_string());
        Self::with_prefix(prefix, doc)
    }

    /// Counter continues after the largest `k` among input ids `prefix.k...`.
    pub fn with_prefix(prefix: impl Into<String>, doc: &XMathDocument) -> Self {
        let prefix = prefix.into();
        let head = format!("{prefix}.");
        let max = doc
            .declared_ids()
            .filter_map(|id| id.strip_prefix(&head))
            .filter_map(|rest| {
                let digits: String = rest.chars().take_while(char::is_ascii_digit).collect();
                digits.parse::<usize>().ok()
            })
            .max()
            .unwrap_or(0);
        Self {
            prefix,
            next_counter: max + 1,
            content_suffix: ".cmml".to_string(),
        }
    }

    /// Ids of `math`, `semantics`, `annotation-xml`, `annotation`.
    pub fn wrapper_ids(&self) -> [String; 4] {
        let p = &self.prefix;
        [p.clone(), format!("{p}a"), format!("{p}b"), format!("{p}c")]
    }
}

/// Targets per source and branch, in document order.
#[derive(Debug, Clone, Default)]
pub struct AscriptionRegistry {
    bases: HashMap<NodeId, String>,
    targets: HashMap<(NodeId, Branch), Vec<String>>,
    /// Every ascribed target as (branch, document-order index, id, source).
    entries: Vec<(Branch, usize, String, NodeId)>,
}

impl AscriptionRegistry {
    pub fn base_id(&self, source: NodeId) -> Option<&str> {
        self.bases.get(&source).map(String::as_str)
    }

    pub fn targets_of(&self, source: NodeId, branch: Branch) -> &[String] {
        self.targets.get(&(source, branch)).map_or(&[], Vec::as_slice)
    }

    pub fn first_target(&self, source: NodeId, branch: Branch) -> Option<&str> {
        self.targets_of(source, branch).first().map(String::as_str)
    }

    pub fn entries(&self) -> &[(Branch, usize, String, NodeId)] {
        &self.entries
    }

    pub fn sources(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.bases.keys().copied()
    }
}

/// Generated trees awaiting ids and links.
#[derive(Debug, Clone, Default)]
pub struct ParallelTrees {
    pub presentation: Option<TargetNode>,
    pub content: Option<TargetNode>,
}

impl ParallelTrees {
    fn each_mut(&mut self) -> impl Iterator<Item = (Branch, &mut TargetNode)> {
        self.presentation
            .as_mut()
            .map(|t| (Branch::Presentation, t))
            .into_iter()
            .chain(self.content.as_mut().map(|t| (Branch::Content, t)))
    }
}

/// Sets `id` on every ascribed node and returns the registry of targets.
pub fn assign_ids(
    trees: &mut ParallelTrees,
    doc: &XMathDocument,
    scheme: &IdScheme,
) -> Result<AscriptionRegistry, ConvertError> {
    let mut reg = AscriptionRegistry::default();
    let mut counter = scheme.next_counter;
    let mut used: HashSet<String> = scheme.wrapper_ids().into_iter().collect();

    for (branch, tree) in trees.each_mut() {
        let mut seen: HashMap<NodeId, usize> = HashMap::new();
        let mut order = 0;
        let mut failure = None;
        tree.visit_mut(&mut |node| {
            let Some(source) = node.source else { return };
            let base = reg
                .bases
                .entry(source.node)
                .or_insert_with(|| match &doc.node(source.node).attrs.xml_id {
                    Some(xml_id) => xml_id.clone(),
                    None => {
                        counter += 1;
                        format!("{}.{}", scheme.prefix, counter - 1)
                    }
                })
                .clone();
            let n = seen.entry(source.node).or_insert(0);
            let mut id = format!("{base}{}", suffix_letters(*n));
            *n += 1;
            if branch == Branch::Content {
                id.push_str(&scheme.content_suffix);
            }
            if !used.insert(id.clone()) && failure.is_none() {
                failure = Some(ConvertError::IdCollision(id.clone()));
            }
            node.attrs.insert("id".into(), id.clone());
            reg.targets.entry((source.node, branch)).or_default().push(id.clone());
            reg.entries.push((branch, order, id, source.node));
            order += 1;
        });
        if let Some(err) = failure {
            return Err(err);
        }
    }
    Ok(reg)
}

/// Sets `xref` on every ascribed node whose source has targets in the other tree.
pub fn link_xrefs(trees: &mut ParallelTrees, reg: &AscriptionRegistry) {
    for (branch, tree) in trees.each_mut() {
        tree.visit_mut(&mut |node| {
            let Some(source) = node.source else { return };
            match reg.first_target(source.node, branch.opposite()) {
                Some(first) => {
                    node.attrs.insert("xref".into(), first.to_string());
                }
                None => {
                    node.attrs.remove("xref");
                }
            }
        });
    }
}

fn math_element(scheme: &IdScheme, display: Option<&str>) -> TargetNode {
    let mut math = TargetNode::new("math")
        .with_attr("id", scheme.prefix.clone())
        .with_attr("class", MATH_CLASS);
    if let Some(display) = display {
        math = math.with_attr("display", display);
    }
    math
}

/// `math[semantics[presentation, annotation-xml[content], annotation?]]`.
pub fn assemble_parallel(
    pmml: TargetNode,
    cmml: TargetNode,
    tex: Option<&str>,
    display: Option<&str>,
    scheme: &IdScheme,
) -> TargetNode {
    let [_, semantics_id, xml_id, tex_id] = scheme.wrapper_ids();
    let mut math = math_element(scheme, display);
    let annotation_xml = TargetNode::with_children("annotation-xml", vec![cmml])
        .with_attr("id", xml_id)
        .with_attr("encoding", CONTENT_ENCODING);
    let mut semantics =
        TargetNode::with_children("semantics", vec![pmml, annotation_xml]).with_attr("id", semantics_id);
    if let Some(tex) = tex {
        math = math.with_attr("alttext", tex);
        let mut annotation = TargetNode::new("annotation")
            .with_attr("id", tex_id)
            .with_attr("encoding", TEX_ENCODING);
        annotation.set_text(tex);
        semantics.children.push(annotation);
    }
    math.children.push(semantics);
    math
}

/// `math[root]` for single-tree output.
pub fn assemble_single(root: TargetNode, display: Option<&str>, scheme: &IdScheme) -> TargetNode {
    let mut math = math_element(scheme, display);
    math.children.push(root);
    math
}

/// One broken link rule.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateId {
        id: String,
    },
    UnresolvedXref {
        id: String,
        xref: String,
    },
    /// The xref lands in the same tree, or on a wrapper.
    WrongBranch {
        id: String,
        xref: String,
    },
    WrapperXref {
        id: String,
    },
    /// `id -> xref`, but `xref` does not point back into `id`'s source group.
    InconsistentSource {
        id: String,
        xref: String,
        back: Option<String>,
    },
    /// Nodes referring to `target` start at `first`, yet `target` refers to `actual`.
    NotFirstInOrder {
        target: String,
        first: String,
        actual: String,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateId { id } => write!(f, "duplicate id `{id}`"),
            Violation::UnresolvedXref { id, xref } => {
                write!(f, "xref `{xref}` on `{id}` does not resolve")
            }
            Violation::WrongBranch { id, xref } => {
                write!(f, "xref `{xref}` on `{id}` does not point into the opposite branch")
            }
            Violation::WrapperXref { id } => write!(f, "wrapper `{id}` carries an xref"),
            Violation::InconsistentSource { id, xref, back } => match back {
                Some(back) => write!(
                    f,
                    "`{id}` refers to `{xref}`, which refers to `{back}` whose xref is not `{xref}`"
                ),
                None => write!(f, "`{id}` refers to `{xref}`, which has no xref back"),
            },
            Violation::NotFirstInOrder { target, first, actual } => write!(
                f,
                "`{target}` refers to `{actual}`, but the first node referring to it is `{first}`"
            ),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkReport {
    pub violations: Vec<Violation>,
}

impl LinkReport {
    pub fn is_empty(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for LinkReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.violations {
            writeln!(f, "{v}")?;
        }
        Ok(())
    }
}

struct Flat<'t> {
    node: &'t TargetNode,
    branch: Option<Branch>,
}

fn flatten<'t>(node: &'t TargetNode, branch: Option<Branch>, out: &mut Vec<Flat<'t>>) {
    out.push(Flat { node, branch });
    for child in &node.children {
        flatten(child, branch, out);
    }
}

/// Splits an assembled element into wrappers and the two trees.
fn classify(math: &TargetNode) -> Vec<Flat<'_>> {
    let mut out = Vec::new();
    let semantics = if math.element == "semantics" {
        Some(math)
    } else {
        math.children.iter().find(|c| c.element == "semantics")
    };
    let Some(semantics) = semantics else {
        // Single-tree output: nothing has an opposite branch.
        out.push(Flat {
            node: math,
            branch: None,
        });
        for child in &math.children {
            flatten(child, Some(Branch::Presentation), &mut out);
        }
        return out;
    };
    if !std::ptr::eq(semantics, math) {
        out.push(Flat {
            node: math,
            branch: None,
        });
    }
    out.push(Flat {
        node: semantics,
        branch: None,
    });
    for (i, child) in semantics.children.iter().enumerate() {
        if i == 0 && !child.element.starts_with("annotation") {
            flatten(child, Some(Branch::Presentation), &mut out);
        } else if child.element == "annotation-xml" && child.attr("encoding").is_none_or(|e| e == CONTENT_ENCODING) {
            out.push(Flat {
                node: child,
                branch: None,
            });
            for grandchild in &child.children {
                flatten(grandchild, Some(Branch::Content), &mut out);
            }
        } else {
            flatten(child, None, &mut out);
        }
    }
    out
}

/// Validates the cross-reference contract of an assembled `math` element.
pub fn check_links(math: &TargetNode) -> LinkReport {
    let nodes = classify(math);
    let mut violations = Vec::new();

    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, flat) in nodes.iter().enumerate() {
        if let Some(id) = flat.node.id() {
            if index.insert(id, i).is_some() {
                violations.push(Violation::DuplicateId { id: id.to_string() });
            }
        }
    }
    let id_of = |i: usize| nodes[i].node.id().unwrap_or("").to_string();

    // Valid xref target per node: resolves, and lands in the opposite tree.
    let mut target: Vec<Option<usize>> = vec![None; nodes.len()];
    for (i, flat) in nodes.iter().enumerate() {
        let Some(xref) = flat.node.xref() else { continue };
        let id = flat.node.id().unwrap_or("").to_string();
        let Some(branch) = flat.branch else {
            violations.push(Violation::WrapperXref { id });
            continue;
        };
        match index.get(xref) {
            None => violations.push(Violation::UnresolvedXref {
                id,
                xref: xref.to_string(),
            }),
            Some(&j) if nodes[j].branch != Some(branch.opposite()) => violations.push(Violation::WrongBranch {
                id,
                xref: xref.to_string(),
            }),
            Some(&j) => target[i] = Some(j),
        }
    }

    // Round trip t -> u -> v must come back to u.
    for i in 0..nodes.len() {
        let Some(u) = target[i] else { continue };
        match nodes[u].node.xref() {
            None => violations.push(Violation::InconsistentSource {
                id: id_of(i),
                xref: id_of(u),
                back: None,
            }),
            Some(_) => {
                let Some(v) = target[u] else { continue };
                if let Some(w) = target[v] {
                    if w != u {
                        violations.push(Violation::InconsistentSource {
                            id: id_of(i),
                            xref: id_of(u),
                            back: Some(id_of(v)),
                        });
                    }
                }
            }
        }
    }

    // The node a group refers back to must be the group's first member.
    let mut first_referrer: HashMap<usize, usize> = HashMap::new();
    for (i, t) in target.iter().enumerate() {
        if let Some(u) = *t {
            first_referrer.entry(u).or_insert(i);
        }
    }
    let mut targets: Vec<_> = first_referrer.into_iter().collect();
    targets.sort_unstable();
    for (u, first) in targets {
        if let Some(actual) = target[u] {
            if actual != first {
                violations.push(Violation::NotFirstInOrder {
                    target: id_of(u),
                    first: id_of(first),
                    actual: id_of(actual),
                });
            }
        }
    }

    LinkReport { violations }
}
