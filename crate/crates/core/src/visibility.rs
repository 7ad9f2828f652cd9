//! Branch reachability marking.
//!
//! Starting at the root with both branches live, a worklist walk narrows the
//! live set to content at the first child of every `XMDual` and to
//! presentation at the second, and carries the current set unchanged across
//! `XMRef` edges. Flags are unioned per node until nothing changes, so cycles
//! through refs terminate.

use crate::model::{Branch, NodeId, NodeKind, XMathDocument};

/// Set of branches a node is visible to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Visibility {
    pub content: bool,
    pub presentation: bool,
}

impl Visibility {
    pub const NONE: Visibility = Visibility {
        content: false,
        presentation: false,
    };
    pub const BOTH: Visibility = Visibility {
        content: true,
        presentation: true,
    };
    pub const CONTENT: Visibility = Visibility {
        content: true,
        presentation: false,
    };
    pub const PRESENTATION: Visibility = Visibility {
        content: false,
        presentation: true,
    };

    pub fn only(branch: Branch) -> Visibility {
        match branch {
            Branch::Content => Visibility::CONTENT,
            Branch::Presentation => Visibility::PRESENTATION,
        }
    }

    pub fn in_branch(self, branch: Branch) -> bool {
        match branch {
            Branch::Content => self.content,
            Branch::Presentation => self.presentation,
        }
    }

    pub fn is_both(self) -> bool {
        self.content && self.presentation
    }

    pub fn is_none(self) -> bool {
        !self.content && !self.presentation
    }

    pub fn union(self, other: Visibility) -> Visibility {
        Visibility {
            content: self.content || other.content,
            presentation: self.presentation || other.presentation,
        }
    }

    pub fn intersect(self, other: Visibility) -> Visibility {
        Visibility {
            content: self.content && other.content,
            presentation: self.presentation && other.presentation,
        }
    }

    /// True if every flag in `self` is also set in `other`.
    pub fn is_subset(self, other: Visibility) -> bool {
        self.union(other) == other
    }
}

/// Per-node visibility, indexed by [`NodeId`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VisibilityMap {
    flags: Vec<Visibility>,
}

impl VisibilityMap {
    pub fn get(&self, id: NodeId) -> Visibility {
        self.flags[id.index()]
    }

    pub fn len(&self) -> usize {
        self.flags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.flags.is_empty()
    }
}

pub fn mark_visibility(doc: &XMathDocument) -> VisibilityMap {
    let mut flags = vec![Visibility::NONE; doc.len()];
    let mut work = vec![(doc.root(), Visibility::BOTH)];

    while let Some((id, incoming)) = work.pop() {
        let current = flags[id.index()];
        if incoming.is_none() || incoming.is_subset(current) {
            continue;
        }
        // Only the newly added flags need to flow further.
        let added = Visibility {
            content: incoming.content && !current.content,
            presentation: incoming.presentation && !current.presentation,
        };
        flags[id.index()] = current.union(incoming);

        let node = doc.node(id);
        match node.kind {
            NodeKind::Dual => {
                for (idx, &child) in node.children.iter().enumerate() {
                    let branch = if idx == 0 {
                        Branch::Content
                    } else {
                        Branch::Presentation
                    };
                    work.push((child, added.intersect(Visibility::only(branch))));
                }
            }
            NodeKind::Ref => {
                work.push((doc.deref(id), added));
            }
            _ => {
                work.extend(node.children.iter().map(|&child| (child, added)));
            }
        }
    }

    VisibilityMap { flags }
}
