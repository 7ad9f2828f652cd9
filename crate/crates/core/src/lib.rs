//! Parallel, cross-referenced MathML generation from XMath trees.

pub mod ascription;
pub mod cli;
pub mod cmml;
pub mod error;
mod glyphs;
pub mod io;
pub mod linker;
pub mod model;
pub mod pipeline;
pub mod pmml;
pub mod serialize;
pub mod target;
pub mod visibility;
mod walk;
mod xml;

pub use error::{ConvertError, Location, ModelError, ParseError, ParseErrorKind};
pub use io::{parse_xmath, serialize_xmath};
pub use linker::{check_links, LinkReport, Violation};
pub use model::{Branch, NodeId, NodeKind, XMathDocument};
pub use pipeline::{convert, Conversion, ConvertOptions, OutputMode};
pub use serialize::{parse_mathml, serialize_mathml, EntityMode, SerializeOptions};
pub use target::TargetNode;
pub use visibility::{mark_visibility, Visibility, VisibilityMap};
