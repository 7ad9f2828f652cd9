//! Traversal state shared by the two generators.

use crate::ascription::{ascribe, AscriptionContext};
use crate::error::ConvertError;
use crate::model::{Branch, NodeId, NodeKind, XMathDocument};
use crate::target::TargetNode;
use crate::visibility::VisibilityMap;

pub(crate) struct Walk<'a> {
    pub doc: &'a XMathDocument,
    pub vis: &'a VisibilityMap,
    pub branch: Branch,
    /// Nodes currently being expanded, for ref-cycle detection.
    active: Vec<NodeId>,
    /// Duals entered along the walk, innermost last.
    containers: Vec<NodeId>,
}

impl<'a> Walk<'a> {
    pub fn new(doc: &'a XMathDocument, vis: &'a VisibilityMap, branch: Branch) -> Self {
        Self {
            doc,
            vis,
            branch,
            active: Vec::new(),
            containers: Vec::new(),
        }
    }

    pub fn context(&self, current: NodeId) -> AscriptionContext<'a> {
        AscriptionContext {
            doc: self.doc,
            vis: self.vis,
            current,
            branch: self.branch,
            container: self.containers.last().copied(),
        }
    }

    /// Tags `target` with the source chosen for it.
    pub fn ascribed(&self, target: TargetNode, current: NodeId, is_container: bool) -> TargetNode {
        let source = ascribe(&self.context(current), is_container);
        target.with_source(source, self.branch)
    }

    /// Starts expanding `id`; fails if it is already being expanded.
    pub fn enter(&mut self, id: NodeId) -> Result<(), ConvertError> {
        if self.active.contains(&id) {
            let node = self.doc.node(id);
            return Err(ConvertError::RefCycle {
                idref: node.attrs.xml_id.clone().unwrap_or_default(),
                location: self.doc.location(id),
            });
        }
        self.active.push(id);
        if self.doc.node(id).kind == NodeKind::Dual {
            self.containers.push(id);
        }
        Ok(())
    }

    pub fn leave(&mut self, id: NodeId) {
        let popped = self.active.pop();
        debug_assert_eq!(popped, Some(id));
        if self.doc.node(id).kind == NodeKind::Dual {
            self.containers.pop();
        }
    }

    /// Follows refs from `id` without entering anything.
    pub fn peek(&self, id: NodeId) -> NodeId {
        let mut cur = id;
        for _ in 0..=self.doc.len() {
            if self.doc.node(cur).kind != NodeKind::Ref {
                return cur;
            }
            cur = self.doc.deref(cur);
        }
        cur
    }
}
