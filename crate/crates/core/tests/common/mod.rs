#![allow(dead_code)]

use std::collections::HashMap;
use std::path::PathBuf;

use proptest::prelude::Rng;
use proptest::test_runner::{RngAlgorithm, TestRng};
use xmath_mathml::{parse_xmath, NodeId, NodeKind, TargetNode, Visibility, XMathDocument};

pub fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "tests", "fixtures", name].iter().collect();
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

/// Checks that `b` equals `a` up to a bijective renaming of ids that carries
/// every xref along. All other attributes, names and text must match.
pub fn isomorphic(a: &TargetNode, b: &TargetNode) -> Result<(), String> {
    let mut forward: HashMap<&str, &str> = HashMap::new();
    let mut backward: HashMap<&str, &str> = HashMap::new();
    let mut xrefs: Vec<(&str, &str, String)> = Vec::new();
    walk_pair(a, b, "/".to_string(), &mut forward, &mut backward, &mut xrefs)?;
    for (xa, xb, path) in xrefs {
        match forward.get(xa) {
            Some(mapped) if *mapped == xb => {}
            Some(mapped) => return Err(format!("{path}: xref {xa} maps to {mapped}, found {xb}")),
            None => return Err(format!("{path}: xref {xa} does not resolve")),
        }
    }
    Ok(())
}

fn walk_pair<'t>(
    a: &'t TargetNode,
    b: &'t TargetNode,
    path: String,
    forward: &mut HashMap<&'t str, &'t str>,
    backward: &mut HashMap<&'t str, &'t str>,
    xrefs: &mut Vec<(&'t str, &'t str, String)>,
) -> Result<(), String> {
    let path = format!("{path}{}", a.element);
    if a.element != b.element {
        return Err(format!("{path}: element {} vs {}", a.element, b.element));
    }
    if a.text != b.text {
        return Err(format!("{path}: text {:?} vs {:?}", a.text, b.text));
    }
    let plain = |n: &'t TargetNode| {
        n.attrs
            .iter()
            .filter(|(k, _)| k.as_str() != "id" && k.as_str() != "xref")
            .collect::<Vec<_>>()
    };
    if plain(a) != plain(b) {
        return Err(format!("{path}: attributes {:?} vs {:?}", plain(a), plain(b)));
    }
    match (a.id(), b.id()) {
        (None, None) => {}
        (Some(ia), Some(ib)) => {
            if forward.insert(ia, ib).is_some() || backward.insert(ib, ia).is_some() {
                return Err(format!("{path}: id {ia}/{ib} is not unique"));
            }
        }
        _ => return Err(format!("{path}: id {:?} vs {:?}", a.id(), b.id())),
    }
    match (a.xref(), b.xref()) {
        (None, None) => {}
        (Some(xa), Some(xb)) => xrefs.push((xa, xb, path.clone())),
        _ => return Err(format!("{path}: xref {:?} vs {:?}", a.xref(), b.xref())),
    }
    if a.children.len() != b.children.len() {
        return Err(format!("{path}: {} children vs {}", a.children.len(), b.children.len()));
    }
    for (i, (ca, cb)) in a.children.iter().zip(&b.children).enumerate() {
        walk_pair(ca, cb, format!("{path}[{i}]/"), forward, backward, xrefs)?;
    }
    Ok(())
}

/// Renames one element everywhere, e.g. to normalize a typo in reference text.
pub fn rename_elements(tree: &mut TargetNode, from: &str, to: &str) {
    tree.visit_mut(&mut |n| {
        if n.element == from {
            n.element = to.to_string();
        }
    });
}

/// Random XMath documents as text.
///
/// Refs of a Dual all run one way between its branches, so Ref chains always
/// descend into strictly nested subtrees and never cycle. Wraps only appear
/// where no content walk can reach them.
pub struct Generator {
    rng: TestRng,
    nodes: Vec<GenNode>,
    budget: usize,
}

#[derive(Debug, Clone)]
enum GenKind {
    Tok {
        text: &'static str,
        attrs: Vec<(&'static str, &'static str)>,
    },
    App(Vec<usize>),
    Wrap(Vec<usize>),
    Dual(usize, usize),
    Ref(usize),
}

#[derive(Debug, Clone)]
struct GenNode {
    kind: GenKind,
    id: Option<String>,
    /// A content walk from here reaches a Wrap.
    has_wrap: bool,
}

const MAX_NODES: usize = 40;
const MAX_DEPTH: usize = 6;

const TOKENS: &[(&str, &[(&str, &str)])] = &[
    ("a", &[("role", "ID"), ("font", "italic")]),
    ("x", &[("role", "UNKNOWN")]),
    ("F", &[("role", "FUNCTION"), ("font", "italic")]),
    ("+", &[("role", "ADDOP"), ("meaning", "plus")]),
    ("", &[("role", "MULOP"), ("meaning", "times")]),
    ("=", &[("role", "RELOP"), ("meaning", "equals")]),
    ("(", &[("role", "OPEN"), ("stretchy", "false")]),
    (")", &[("role", "CLOSE"), ("stretchy", "false")]),
    ("|", &[("role", "OPEN"), ("stretchy", "true")]),
    (",", &[("role", "PUNCT")]),
    ("12", &[("role", "NUMBER")]),
    ("\u{3a8}", &[("role", "ID")]),
    ("H", &[("role", "ID"), ("font", "caligraphic")]),
    (
        "\u{222b}",
        &[("role", "INTOP"), ("meaning", "integral"), ("mathstyle", "display")],
    ),
    ("", &[("role", "SUBSCRIPTOP"), ("scriptpos", "post2")]),
    ("", &[("role", "SUPERSCRIPTOP"), ("scriptpos", "post2")]),
    ("", &[("meaning", "quantum-operator-product")]),
    ("d", &[("role", "DIFFOP"), ("meaning", "differential-d")]),
    ("a&b", &[("role", "ID")]),
];

impl Generator {
    pub fn new(seed: u64) -> Self {
        let mut bytes = [0u8; 32];
        bytes[..8].copy_from_slice(&seed.to_le_bytes());
        Self::from_seed(bytes)
    }

    pub fn from_seed(seed: [u8; 32]) -> Self {
        Self {
            rng: TestRng::from_seed(RngAlgorithm::ChaCha, &seed),
            nodes: Vec::new(),
            budget: 0,
        }
    }

    fn below(&mut self, n: usize) -> usize {
        (self.rng.next_u32() as usize) % n
    }

    fn chance(&mut self, percent: usize) -> bool {
        self.below(100) < percent
    }

    fn push(&mut self, kind: GenKind, has_wrap: bool) -> usize {
        self.nodes.push(GenNode {
            kind,
            id: None,
            has_wrap,
        });
        self.nodes.len() - 1
    }

    fn token(&mut self) -> usize {
        let (text, attrs) = TOKENS[self.below(TOKENS.len())];
        self.push(
            GenKind::Tok {
                text,
                attrs: attrs.to_vec(),
            },
            false,
        )
    }

    fn children(&mut self, depth: usize, content_reach: bool, targets: &[usize]) -> Vec<usize> {
        let n = 1 + self.below(4);
        let mut kids = vec![self.node(depth + 1, content_reach, targets)];
        while kids.len() < n && self.budget > 0 {
            kids.push(self.node(depth + 1, content_reach, targets));
        }
        kids
    }

    /// `targets` are the nodes a Ref here may point at; `content_reach` says
    /// whether a content walk can get here. Each call spends at least one
    /// unit of budget and never more than it has.
    fn node(&mut self, depth: usize, content_reach: bool, targets: &[usize]) -> usize {
        self.budget -= 1;
        let leaf = depth + 1 >= MAX_DEPTH || self.budget < 2;
        let choice = if leaf { self.below(10) } else { self.below(100) };
        match choice {
            0..=2 if !targets.is_empty() => {
                let pick = targets[self.below(targets.len())];
                let ok: Vec<usize> = if content_reach {
                    targets.iter().copied().filter(|&t| !self.nodes[t].has_wrap).collect()
                } else {
                    targets.to_vec()
                };
                let target = if ok.contains(&pick) {
                    Some(pick)
                } else {
                    ok.first().copied()
                };
                match target {
                    Some(t) => {
                        let has_wrap = self.nodes[t].has_wrap;
                        self.push(GenKind::Ref(t), has_wrap)
                    }
                    None => self.token(),
                }
            }
            _ if leaf => self.token(),
            0..=29 => self.token(),
            30..=69 => {
                let kids = self.children(depth, content_reach, targets);
                let has_wrap = kids.iter().any(|&k| self.nodes[k].has_wrap);
                self.push(GenKind::App(kids), has_wrap)
            }
            70..=79 if !content_reach => {
                let kids = self.children(depth, content_reach, targets);
                self.push(GenKind::Wrap(kids), true)
            }
            _ => self.dual(depth, content_reach, targets),
        }
    }

    fn dual(&mut self, depth: usize, content_reach: bool, targets: &[usize]) -> usize {
        let content_to_presentation = self.chance(70);
        // Hold one unit back so the second branch always has room.
        self.budget -= 1;
        let start = self.nodes.len();
        let first = if content_to_presentation {
            self.node(depth + 1, false, targets)
        } else {
            self.node(depth + 1, content_reach, targets)
        };
        self.budget += 1;
        let mut inner = targets.to_vec();
        inner.extend((start..self.nodes.len()).filter(|&i| !matches!(self.nodes[i].kind, GenKind::Ref(_))));
        let (content, presentation) = if content_to_presentation {
            (self.node(depth + 1, content_reach, &inner), first)
        } else {
            (first, self.node(depth + 1, false, &inner))
        };
        let has_wrap = self.nodes[content].has_wrap;
        self.push(GenKind::Dual(content, presentation), has_wrap)
    }

    /// Generates one document as XMath text.
    pub fn document(&mut self) -> String {
        self.nodes.clear();
        self.budget = MAX_NODES;
        let root = self.node(0, true, &[]);
        let mut next = 1;
        for i in 0..self.nodes.len() {
            if let GenKind::Ref(t) = self.nodes[i].kind {
                if self.nodes[t].id.is_none() {
                    self.nodes[t].id = Some(format!("m1.{next}"));
                    next += 1;
                }
            }
        }
        let mut out = String::new();
        self.write(root, 0, &mut out);
        out
    }

    fn write(&self, i: usize, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        let node = &self.nodes[i];
        let id = node
            .id
            .as_ref()
            .map(|id| format!(" xml:id=\"{id}\""))
            .unwrap_or_default();
        let (name, kids): (&str, Vec<usize>) = match &node.kind {
            GenKind::Tok { text, attrs } => {
                let attrs: String = attrs.iter().map(|(k, v)| format!(" {k}=\"{v}\"")).collect();
                let text = text.replace('&', "&amp;");
                out.push_str(&format!("{pad}<XMTok{attrs}{id}>{text}</XMTok>\n"));
                return;
            }
            GenKind::Ref(t) => {
                let target = self.nodes[*t].id.as_ref().expect("ref target has an id");
                out.push_str(&format!("{pad}<XMRef idref=\"{target}\"{id}/>\n"));
                return;
            }
            GenKind::App(k) => ("XMApp", k.clone()),
            GenKind::Wrap(k) => ("XMWrap", k.clone()),
            GenKind::Dual(c, p) => ("XMDual", vec![*c, *p]),
        };
        out.push_str(&format!("{pad}<{name}{id}>\n"));
        for k in kids {
            self.write(k, depth + 1, out);
        }
        out.push_str(&format!("{pad}</{name}>\n"));
    }
}

/// Seeded corpus of parsed documents with their text.
pub fn corpus(size: usize) -> Vec<(String, XMathDocument)> {
    let mut gen = Generator::new(0x5eed);
    (0..size)
        .map(|i| {
            let text = gen.document();
            let doc = parse_xmath(&text).unwrap_or_else(|e| panic!("corpus tree {i} does not parse: {e}\n{text}"));
            (text, doc)
        })
        .collect()
}

/// Visibility by enumerating every path from the root. Each path carries the
/// flags it has kept through Dual branches; a node's visibility is the union
/// over all paths reaching it.
pub fn oracle_visibility(doc: &XMathDocument) -> Vec<Visibility> {
    let mut flags = vec![Visibility::NONE; doc.len()];
    let mut on_path = vec![false; doc.len()];
    paths(doc, doc.root(), Visibility::BOTH, &mut flags, &mut on_path);
    flags
}

fn paths(doc: &XMathDocument, id: NodeId, carried: Visibility, flags: &mut [Visibility], on_path: &mut [bool]) {
    if on_path[id.index()] {
        return;
    }
    on_path[id.index()] = true;
    flags[id.index()] = flags[id.index()].union(carried);
    let node = doc.node(id);
    match node.kind {
        NodeKind::Ref => {
            if let Ok(target) = doc.resolve_ref(id) {
                paths(doc, target, carried, flags, on_path);
            }
        }
        NodeKind::Dual => {
            paths(
                doc,
                node.children[0],
                carried.intersect(Visibility::CONTENT),
                flags,
                on_path,
            );
            paths(
                doc,
                node.children[1],
                carried.intersect(Visibility::PRESENTATION),
                flags,
                on_path,
            );
        }
        _ => {
            for &child in &node.children {
                paths(doc, child, carried, flags, on_path);
            }
        }
    }
    on_path[id.index()] = false;
}

/// The presentation tree inside a parallel `math` element.
pub fn presentation_part(math: &TargetNode) -> &TargetNode {
    &math.children[0].children[0]
}
