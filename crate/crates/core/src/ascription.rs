//! Choosing the XMath node a generated MathML node is ascribed to.

use crate::model::{Branch, NodeId, XMathDocument};
use crate::visibility::VisibilityMap;

/// Everything the source decision looks at for one generated node.
#[derive(Debug, Clone, Copy)]
pub struct AscriptionContext<'a> {
    pub doc: &'a XMathDocument,
    pub vis: &'a VisibilityMap,
    /// The XMath node that directly generated the target.
    pub current: NodeId,
    pub branch: Branch,
    /// The current container: the innermost `XMDual` on the walk that led to
    /// `current`. Differs from the structural ancestor when the walk entered
    /// `current` through an `XMRef`.
    pub container: Option<NodeId>,
}

impl<'a> AscriptionContext<'a> {
    /// Context whose container is the structural nearest `XMDual` ancestor.
    pub fn structural(doc: &'a XMathDocument, vis: &'a VisibilityMap, current: NodeId, branch: Branch) -> Self {
        Self {
            doc,
            vis,
            current,
            branch,
            container: doc.nearest_dual_ancestor(current),
        }
    }

    /// The top operator of the current container's content branch, when that
    /// operator never shows up in the presentation.
    pub fn hidden_operator(&self) -> Option<NodeId> {
        let container = self.container?;
        let op = self.doc.top_operator_of(container, Branch::Content)?;
        (!self.vis.get(op).presentation).then_some(op)
    }
}

/// Source node for a target generated in `ctx`.
///
/// Containers go to the current container. Tokens from nodes visible in both
/// branches keep their own node. Other tokens inside a container go to the
/// container's operator if it is hidden from presentation, else to the
/// container itself.
pub fn ascribe(ctx: &AscriptionContext<'_>, target_is_container: bool) -> NodeId {
    if target_is_container {
        return ctx.container.unwrap_or(ctx.current);
    }
    if ctx.vis.get(ctx.current).is_both() {
        return ctx.current;
    }
    match ctx.container {
        Some(container) => ctx.hidden_operator().unwrap_or(container),
        None => ctx.current,
    }
}
