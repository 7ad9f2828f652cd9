//! Presentation MathML generation.

use std::collections::VecDeque;

use crate::error::ConvertError;
use crate::glyphs;
use crate::model::{Branch, NodeId, NodeKind, Role, XMathDocument, XMathNode};
use crate::target::TargetNode;
use crate::visibility::VisibilityMap;
use crate::walk::Walk;

const APPLY_FUNCTION: &str = "\u{2061}";
const INVISIBLE_TIMES: &str = "\u{2062}";

/// Roles outside the core set that still denote operator symbols.
const OPERATOR_ROLES: &[&str] = &[
    "RELOP",
    "METARELOP",
    "BINOP",
    "ARROW",
    "COMPOSEOP",
    "MIDDLE",
    "VERTBAR",
    "SUMOP",
    "BIGOP",
    "LIMITOP",
    "OPERATOR",
    "POSTFIX",
    "PERIOD",
    "MODIFIEROP",
];

/// Roles laid out infix between their arguments.
const INFIX_ROLES: &[&str] = &["RELOP", "METARELOP", "BINOP", "ARROW", "COMPOSEOP"];

fn renders_as_mo(role: Option<&Role>) -> bool {
    match role {
        Some(
            Role::Open
            | Role::Close
            | Role::Punct
            | Role::AddOp
            | Role::MulOp
            | Role::IntOp
            | Role::DiffOp
            | Role::SuperscriptOp
            | Role::SubscriptOp,
        ) => true,
        Some(Role::Other(r)) => OPERATOR_ROLES.contains(&r.as_str()),
        _ => false,
    }
}

fn is_infix(role: Option<&Role>) -> bool {
    match role {
        Some(Role::AddOp | Role::MulOp) => true,
        Some(Role::Other(r)) => INFIX_ROLES.contains(&r.as_str()),
        _ => false,
    }
}

fn is_number(text: &str) -> bool {
    !text.is_empty() && text.chars().all(|c| c.is_ascii_digit())
}

/// The presentation token for an XMath token, without a source.
pub fn token_to_pmml(tok: &XMathNode) -> TargetNode {
    let attrs = &tok.attrs;
    let role = attrs.role.as_ref();
    let font = attrs.font.as_deref();

    if renders_as_mo(role) {
        let text = if tok.text.is_empty() && role == Some(&Role::MulOp) && tok.meaning() == Some("times") {
            INVISIBLE_TIMES
        } else {
            tok.text.as_str()
        };
        let mut mo = TargetNode::token("mo", text);
        if let Some(stretchy) = attrs.stretchy {
            mo = mo.with_attr("stretchy", stretchy.to_string());
            if stretchy && matches!(role, Some(Role::Open | Role::Close)) {
                mo = mo.with_attr("fence", "true");
            }
        }
        if role == Some(&Role::IntOp) {
            mo = mo.with_attr("largeop", "true").with_attr("symmetric", "true");
        }
        return mo;
    }

    if is_number(&tok.text) || matches!(role, Some(Role::Other(r)) if r == "NUMBER") {
        return TargetNode::token("mn", tok.text.as_str());
    }

    let mut mi = TargetNode::token("mi", glyphs::styled_glyph(&tok.text, font));
    if glyphs::forced_upright(&tok.text, font) {
        mi = mi.with_attr("mathvariant", "normal");
    } else {
        match font {
            Some("caligraphic") => mi = mi.with_attr("class", glyphs::CALIGRAPHIC_CLASS),
            Some("italic") if tok.text.chars().count() > 1 => mi = mi.with_attr("mathvariant", "italic"),
            Some(f) => {
                if let Some(variant) = glyphs::mathvariant(f) {
                    mi = mi.with_attr("mathvariant", variant);
                }
            }
            None => {}
        }
    }
    mi
}

struct Presenter<'a> {
    walk: Walk<'a>,
}

impl<'a> Presenter<'a> {
    fn gen(&mut self, id: NodeId) -> Result<TargetNode, ConvertError> {
        self.walk.enter(id)?;
        let result = self.gen_entered(id);
        self.walk.leave(id);
        result
    }

    fn gen_entered(&mut self, id: NodeId) -> Result<TargetNode, ConvertError> {
        let doc = self.walk.doc;
        let node = doc.node(id);
        match node.kind {
            NodeKind::Dual => self.gen(node.children[Branch::Presentation.dual_child()]),
            NodeKind::Ref => self.gen(doc.deref(id)),
            NodeKind::Tok => Ok(self.walk.ascribed(token_to_pmml(node), id, false)),
            NodeKind::Wrap => {
                let children = self.gen_all(&node.children)?;
                Ok(self
                    .walk
                    .ascribed(TargetNode::with_children("mrow", children), id, true))
            }
            NodeKind::App => self.apply_to_pmml(id),
        }
    }

    fn gen_all(&mut self, ids: &[NodeId]) -> Result<Vec<TargetNode>, ConvertError> {
        ids.iter().map(|&c| self.gen(c)).collect()
    }

    fn operator_role(&self, op: NodeId) -> Option<&'a Role> {
        let node = self.walk.doc.node(self.walk.peek(op));
        (node.kind == NodeKind::Tok).then(|| node.role()).flatten()
    }

    fn apply_to_pmml(&mut self, app: NodeId) -> Result<TargetNode, ConvertError> {
        let doc = self.walk.doc;
        let node = doc.node(app);
        let Some((&op, args)) = node.children.split_first() else {
            return Err(ConvertError::MalformedApply {
                location: doc.location(app),
            });
        };
        let role = self.operator_role(op);

        let layout = match role {
            Some(Role::SuperscriptOp) if args.len() == 2 => {
                if let Some((base, sub)) = self.fusable_subscript(op, args[0]) {
                    let inner = self.walk.peek(args[0]);
                    // The inner script application produces no element of its own.
                    self.walk.enter(inner)?;
                    let parts = self.gen(base).and_then(|b| Ok(vec![b, self.gen(sub)?]));
                    self.walk.leave(inner);
                    let mut children = parts?;
                    children.push(self.gen(args[1])?);
                    TargetNode::with_children("msubsup", children)
                } else {
                    TargetNode::with_children("msup", self.gen_all(args)?)
                }
            }
            Some(Role::SubscriptOp) if args.len() == 2 => TargetNode::with_children("msub", self.gen_all(args)?),
            Some(Role::Function) => {
                let mut children = vec![self.gen(op)?];
                let apply_fn = TargetNode::token("mo", APPLY_FUNCTION);
                children.push(self.walk.ascribed(apply_fn, app, false));
                children.extend(self.gen_all(args)?);
                TargetNode::with_children("mrow", children)
            }
            r if is_infix(r) && args.len() >= 2 => {
                let mut children = Vec::with_capacity(args.len() * 2 - 1);
                for (i, &arg) in args.iter().enumerate() {
                    if i > 0 {
                        children.push(self.gen(op)?);
                    }
                    children.push(self.gen(arg)?);
                }
                TargetNode::with_children("mrow", children)
            }
            _ => {
                let mut children = vec![self.gen(op)?];
                children.extend(self.gen_all(args)?);
                TargetNode::with_children("mrow", children)
            }
        };
        Ok(self.walk.ascribed(layout, app, true))
    }

    /// For `sup(base, _)` where `base` is `sub(inner, script)` with a matching
    /// script position, returns `(inner, script)`.
    fn fusable_subscript(&self, sup_op: NodeId, base: NodeId) -> Option<(NodeId, NodeId)> {
        let doc = self.walk.doc;
        let inner = doc.node(self.walk.peek(base));
        if inner.kind != NodeKind::App || inner.children.len() != 3 {
            return None;
        }
        let sub_op = doc.node(self.walk.peek(inner.children[0]));
        if sub_op.kind != NodeKind::Tok || sub_op.role() != Some(&Role::SubscriptOp) {
            return None;
        }
        let sup_pos = &doc.node(self.walk.peek(sup_op)).attrs.scriptpos;
        (sub_op.attrs.scriptpos == *sup_pos).then_some((inner.children[1], inner.children[2]))
    }
}

/// Presentation tree of the whole document.
pub fn gen_pmml(doc: &XMathDocument, vis: &VisibilityMap) -> Result<TargetNode, ConvertError> {
    gen_pmml_from(doc, vis, doc.root())
}

/// Presentation tree of the subtree at `start`, as if it were the whole
/// formula. Containers are only those entered below `start`.
pub fn gen_pmml_from(doc: &XMathDocument, vis: &VisibilityMap, start: NodeId) -> Result<TargetNode, ConvertError> {
    let mut presenter = Presenter {
        walk: Walk::new(doc, vis, Branch::Presentation),
    };
    presenter.gen(start)
}

/// `display` value implied by the outermost large operator, if that operator
/// asks for display style.
pub fn display_hint(doc: &XMathDocument) -> Option<&'static str> {
    // Breadth-first over the presentation view so the shallowest operator wins.
    let mut queue = VecDeque::from([doc.root()]);
    let mut seen = vec![false; doc.len()];
    while let Some(id) = queue.pop_front() {
        if std::mem::replace(&mut seen[id.index()], true) {
            continue;
        }
        let node = doc.node(id);
        match node.kind {
            NodeKind::Tok if node.role() == Some(&Role::IntOp) => {
                return (node.attrs.mathstyle.as_deref() == Some("display")).then_some("block");
            }
            NodeKind::Dual => queue.push_back(node.children[Branch::Presentation.dual_child()]),
            NodeKind::Ref => queue.push_back(doc.deref(id)),
            _ => queue.extend(node.children.iter().copied()),
        }
    }
    None
}
