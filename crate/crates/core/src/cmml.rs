//! Content MathML generation and pragmatic expansion of known meanings.
//!
//! A [`MeaningTable`] maps token meanings either to an empty content element
//! (`plus`, `int`, ...) or to an [`ExpansionRule`] whose template rearranges
//! an application's arguments under wrapper elements such as `bvar` and
//! `lowlimit`. Everything else becomes `csymbol cd="latexml"`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::error::ConvertError;
use crate::glyphs;
use crate::model::{Branch, NodeId, NodeKind, XMathDocument, XMathNode};
use crate::target::TargetNode;
use crate::visibility::VisibilityMap;
use crate::walk::Walk;

/// Meanings rendered as empty content elements.
const KNOWN_ELEMENTS: &[(&str, &str)] = &[
    ("plus", "plus"),
    ("minus", "minus"),
    ("times", "times"),
    ("divide", "divide"),
    ("integral", "int"),
    ("sum", "sum"),
    ("product", "product"),
    ("equals", "eq"),
    ("not-equals", "neq"),
    ("less-than", "lt"),
    ("greater-than", "gt"),
    ("less-than-or-equals", "leq"),
    ("greater-than-or-equals", "geq"),
    ("and", "and"),
    ("or", "or"),
    ("not", "not"),
    ("implies", "implies"),
    ("power", "power"),
    ("root", "root"),
    ("absolute-value", "abs"),
    ("factorial", "factorial"),
    ("exponential", "exp"),
    ("natural-logarithm", "ln"),
    ("logarithm", "log"),
    ("sine", "sin"),
    ("cosine", "cos"),
    ("tangent", "tan"),
    ("limit", "limit"),
    ("partial-differential", "partialdiff"),
    ("infinity", "infinity"),
    ("element-of", "in"),
    ("subset-of", "subset"),
    ("union", "union"),
    ("intersection", "intersect"),
];

/// Expansion rules shipped with the crate, in table-file syntax.
pub const BUILTIN_RULES: &str =
    "hack-definite-integral 4 (apply head=int (bvar slot4) (lowlimit slot1) (uplimit slot2) slot3)\n";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Template {
    /// An element built around the application, ascribed as a container.
    Element { name: String, children: Vec<Template> },
    /// The operator. With a name, an empty element of that name replaces the
    /// operator's usual rendering.
    Head(Option<String>),
    /// The 1-based argument.
    Slot(usize),
}

impl fmt::Display for Template {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Template::Element { name, children } => {
                write!(f, "({name}")?;
                for c in children {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
            Template::Head(None) => write!(f, "head"),
            Template::Head(Some(name)) => write!(f, "head={name}"),
            Template::Slot(i) => write!(f, "slot{i}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionRule {
    pub meaning: String,
    pub arity: usize,
    pub template: Template,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct TableError {
    pub line: usize,
    pub message: String,
}

fn is_name_char(c: char) -> bool {
    !c.is_whitespace() && c != '(' && c != ')'
}

fn tokenize(src: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '(' || c == ')' {
            tokens.push(c.to_string());
            chars.next();
        } else {
            let mut atom = String::new();
            while let Some(&c) = chars.peek() {
                if !is_name_char(c) {
                    break;
                }
                atom.push(c);
                chars.next();
            }
            // `slot(3)` is accepted as a spelling of `slot3`.
            if atom == "slot" && chars.peek() == Some(&'(') {
                let rest: String = chars.clone().take_while(|&c| c != ')').collect();
                let digits = &rest[1..];
                if !digits.is_empty() && digits.chars().all(|c| c.is_ascii_digit()) {
                    atom.push_str(digits);
                    for _ in 0..rest.chars().count() + 1 {
                        chars.next();
                    }
                }
            }
            tokens.push(atom);
        }
    }
    tokens
}

fn parse_term(tokens: &[String], pos: &mut usize) -> Result<Template, String> {
    let tok = tokens.get(*pos).ok_or("unexpected end of template")?;
    *pos += 1;
    match tok.as_str() {
        "(" => {
            let name = tokens.get(*pos).ok_or("missing element name")?;
            if name == "(" || name == ")" {
                return Err("missing element name".into());
            }
            *pos += 1;
            let mut children = Vec::new();
            loop {
                match tokens.get(*pos).map(String::as_str) {
                    Some(")") => {
                        *pos += 1;
                        break;
                    }
                    Some(_) => children.push(parse_term(tokens, pos)?),
                    None => return Err(format!("unclosed `({name}`")),
                }
            }
            Ok(Template::Element {
                name: name.clone(),
                children,
            })
        }
        ")" => Err("unexpected `)`".into()),
        "head" => Ok(Template::Head(None)),
        atom => {
            if let Some(name) = atom.strip_prefix("head=") {
                if name.is_empty() {
                    return Err("empty head element name".into());
                }
                return Ok(Template::Head(Some(name.to_string())));
            }
            if let Some(n) = atom.strip_prefix("slot") {
                return n
                    .parse::<usize>()
                    .ok()
                    .filter(|&n| n > 0)
                    .map(Template::Slot)
                    .ok_or_else(|| format!("bad slot `{atom}`"));
            }
            Err(format!("unexpected `{atom}`; leaves must be `head` or `slotN`"))
        }
    }
}

impl Template {
    pub fn parse(src: &str) -> Result<Template, String> {
        let tokens = tokenize(src);
        let mut pos = 0;
        let term = parse_term(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(format!("trailing input after template: `{}`", tokens[pos..].join(" ")));
        }
        Ok(term)
    }

    fn collect(&self, slots: &mut Vec<usize>, heads: &mut usize) {
        match self {
            Template::Element { children, .. } => children.iter().for_each(|c| c.collect(slots, heads)),
            Template::Head(_) => *heads += 1,
            Template::Slot(i) => slots.push(*i),
        }
    }
}

impl ExpansionRule {
    pub fn new(meaning: impl Into<String>, arity: usize, template: Template) -> Result<Self, String> {
        if !matches!(template, Template::Element { .. }) {
            return Err("template root must be an element".into());
        }
        let (mut slots, mut heads) = (Vec::new(), 0);
        template.collect(&mut slots, &mut heads);
        if heads != 1 {
            return Err(format!("template must use `head` exactly once, found {heads}"));
        }
        slots.sort_unstable();
        if slots != (1..=arity).collect::<Vec<_>>() {
            return Err(format!("slots must be a permutation of 1..={arity}"));
        }
        Ok(Self {
            meaning: meaning.into(),
            arity,
            template,
        })
    }

    /// Parses one `meaning arity template` line.
    pub fn parse_line(line: &str) -> Result<Self, String> {
        let line = line.trim();
        let (meaning, rest) = line
            .split_once(char::is_whitespace)
            .ok_or("expected `meaning arity template`")?;
        let rest = rest.trim_start();
        let (arity, template) = rest
            .split_once(char::is_whitespace)
            .ok_or("expected `meaning arity template`")?;
        let arity: usize = arity.parse().map_err(|_| format!("bad arity `{arity}`"))?;
        ExpansionRule::new(meaning, arity, Template::parse(template)?)
    }
}

/// What a content token's meaning turns into.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MeaningEntry {
    Element(String),
    Expansion(ExpansionRule),
}

#[derive(Debug, Clone)]
pub struct MeaningTable {
    elements: HashMap<String, String>,
    rules: HashMap<String, ExpansionRule>,
}

impl Default for MeaningTable {
    fn default() -> Self {
        let mut table = Self::empty();
        table.elements = KNOWN_ELEMENTS
            .iter()
            .map(|(m, e)| (m.to_string(), e.to_string()))
            .collect();
        table.load_rules(BUILTIN_RULES).expect("built-in rules parse");
        table
    }
}

impl MeaningTable {
    /// A table that maps nothing; every meaning falls back to `csymbol`.
    pub fn empty() -> Self {
        Self {
            elements: HashMap::new(),
            rules: HashMap::new(),
        }
    }

    pub fn insert_element(&mut self, meaning: impl Into<String>, element: impl Into<String>) {
        self.elements.insert(meaning.into(), element.into());
    }

    pub fn insert_rule(&mut self, rule: ExpansionRule) {
        self.rules.insert(rule.meaning.clone(), rule);
    }

    /// Adds the rules of an expansion-table text, replacing same-meaning rules.
    /// Blank lines and lines starting with `#` are skipped.
    pub fn load_rules(&mut self, text: &str) -> Result<usize, TableError> {
        let mut count = 0;
        for (idx, line) in text.lines().enumerate() {
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let rule = ExpansionRule::parse_line(trimmed).map_err(|message| TableError { line: idx + 1, message })?;
            self.insert_rule(rule);
            count += 1;
        }
        Ok(count)
    }

    pub fn lookup(&self, meaning: &str) -> Option<MeaningEntry> {
        if let Some(rule) = self.rules.get(meaning) {
            return Some(MeaningEntry::Expansion(rule.clone()));
        }
        self.elements.get(meaning).map(|e| MeaningEntry::Element(e.clone()))
    }

    pub fn rule(&self, meaning: &str) -> Option<&ExpansionRule> {
        self.rules.get(meaning)
    }

    pub fn element(&self, meaning: &str) -> Option<&str> {
        self.elements.get(meaning).map(String::as_str)
    }
}

/// The content token for an XMath token, without a source.
pub fn token_to_cmml(tok: &XMathNode, table: &MeaningTable) -> TargetNode {
    match tok.meaning() {
        Some(meaning) => match table.element(meaning) {
            Some(element) => TargetNode::new(element),
            None => TargetNode::token("csymbol", meaning).with_attr("cd", "latexml"),
        },
        None => TargetNode::token("ci", glyphs::ci_name(&tok.text, tok.attrs.font.as_deref())),
    }
}

/// Stateful content walk; exposed so expansion can be driven directly.
pub struct ContentGenerator<'a> {
    walk: Walk<'a>,
    table: &'a MeaningTable,
}

impl<'a> ContentGenerator<'a> {
    pub fn new(doc: &'a XMathDocument, vis: &'a VisibilityMap, table: &'a MeaningTable) -> Self {
        Self {
            walk: Walk::new(doc, vis, Branch::Content),
            table,
        }
    }

    pub fn gen(&mut self, id: NodeId) -> Result<TargetNode, ConvertError> {
        self.walk.enter(id)?;
        let result = self.gen_entered(id);
        self.walk.leave(id);
        result
    }

    fn gen_entered(&mut self, id: NodeId) -> Result<TargetNode, ConvertError> {
        let doc = self.walk.doc;
        let node = doc.node(id);
        match node.kind {
            NodeKind::Dual => self.gen(node.children[Branch::Content.dual_child()]),
            NodeKind::Ref => self.gen(doc.deref(id)),
            NodeKind::Tok => Ok(self.walk.ascribed(token_to_cmml(node, self.table), id, false)),
            NodeKind::Wrap => Err(ConvertError::ContentWrap {
                location: doc.location(id),
            }),
            NodeKind::App => {
                let Some((&op, args)) = node.children.split_first() else {
                    return Err(ConvertError::MalformedApply {
                        location: doc.location(id),
                    });
                };
                let op_node = doc.node(self.walk.peek(op));
                if op_node.kind == NodeKind::Tok {
                    if let Some(rule) = op_node.meaning().and_then(|m| self.table.rule(m)) {
                        return self.expand_pragmatic(rule, id, args);
                    }
                }
                let mut children = vec![self.gen(op)?];
                for &arg in args {
                    children.push(self.gen(arg)?);
                }
                Ok(self
                    .walk
                    .ascribed(TargetNode::with_children("apply", children), id, true))
            }
        }
    }

    /// Instantiates `rule` for the application `app` (already entered) with
    /// the given arguments.
    pub fn expand_pragmatic(
        &mut self,
        rule: &ExpansionRule,
        app: NodeId,
        args: &[NodeId],
    ) -> Result<TargetNode, ConvertError> {
        let doc = self.walk.doc;
        if args.len() != rule.arity {
            return Err(ConvertError::ArityMismatch {
                meaning: rule.meaning.clone(),
                expected: rule.arity,
                found: args.len(),
                location: doc.location(app),
            });
        }
        let op = doc.node(app).children[0];
        self.instantiate(&rule.template, app, op, args)
    }

    fn instantiate(
        &mut self,
        template: &Template,
        app: NodeId,
        op: NodeId,
        args: &[NodeId],
    ) -> Result<TargetNode, ConvertError> {
        match template {
            Template::Element { name, children } => {
                let children = children
                    .iter()
                    .map(|c| self.instantiate(c, app, op, args))
                    .collect::<Result<Vec<_>, _>>()?;
                Ok(self
                    .walk
                    .ascribed(TargetNode::with_children(name.as_str(), children), app, true))
            }
            Template::Head(None) => self.gen(op),
            Template::Head(Some(name)) => {
                let current = self.walk.peek(op);
                Ok(self.walk.ascribed(TargetNode::new(name.as_str()), current, false))
            }
            Template::Slot(i) => self.gen(args[i - 1]),
        }
    }
}

/// Content tree of the whole document.
pub fn gen_cmml(doc: &XMathDocument, vis: &VisibilityMap, table: &MeaningTable) -> Result<TargetNode, ConvertError> {
    ContentGenerator::new(doc, vis, table).gen(doc.root())
}

/// Distinct element names a template can produce around its arguments.
pub fn wrapper_elements(table: &MeaningTable) -> BTreeSet<String> {
    fn walk(t: &Template, out: &mut BTreeSet<String>) {
        match t {
            Template::Element { name, children } => {
                out.insert(name.clone());
                children.iter().for_each(|c| walk(c, out));
            }
            Template::Head(Some(name)) => {
                out.insert(name.clone());
            }
            _ => {}
        }
    }
    let mut out = BTreeSet::new();
    for rule in table.rules.values() {
        walk(&rule.template, &mut out);
    }
    out
}
