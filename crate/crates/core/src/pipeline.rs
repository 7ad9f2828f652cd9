//! End-to-end conversion: mark, generate, link, assemble.

use crate::cmml::{gen_cmml, MeaningTable};
use crate::error::ConvertError;
use crate::linker::{
    assemble_parallel, assemble_single, assign_ids, link_xrefs, AscriptionRegistry, IdScheme, ParallelTrees,
};
use crate::model::XMathDocument;
use crate::pmml::{display_hint, gen_pmml};
use crate::target::TargetNode;
use crate::visibility::mark_visibility;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OutputMode {
    Presentation,
    Content,
    #[default]
    Parallel,
}

#[derive(Debug, Clone, Default)]
pub struct ConvertOptions {
    pub mode: OutputMode,
    /// TeX source for `alttext` and the TeX annotation.
    pub tex: Option<String>,
    /// Value of `display` on `math`; when unset it is derived from the
    /// outermost large operator.
    pub display: Option<String>,
    /// Id prefix; inferred from the input ids when unset.
    pub prefix: Option<String>,
    pub table: MeaningTable,
}

#[derive(Debug, Clone)]
pub struct Conversion {
    pub math: TargetNode,
    pub registry: AscriptionRegistry,
}

pub fn convert(doc: &XMathDocument, opts: &ConvertOptions) -> Result<Conversion, ConvertError> {
    let vis = mark_visibility(doc);
    let scheme = match &opts.prefix {
        Some(prefix) => IdScheme::with_prefix(prefix.clone(), doc),
        None => IdScheme::for_document(doc),
    };
    let display = opts.display.as_deref().or_else(|| display_hint(doc));

    let mut trees = ParallelTrees::default();
    if opts.mode != OutputMode::Content {
        trees.presentation = Some(gen_pmml(doc, &vis)?);
    }
    if opts.mode != OutputMode::Presentation {
        trees.content = Some(gen_cmml(doc, &vis, &opts.table)?);
    }
    let registry = assign_ids(&mut trees, doc, &scheme)?;

    let math = match opts.mode {
        OutputMode::Parallel => {
            link_xrefs(&mut trees, &registry);
            let ParallelTrees { presentation, content } = trees;
            assemble_parallel(
                presentation.expect("generated"),
                content.expect("generated"),
                opts.tex.as_deref(),
                display,
                &scheme,
            )
        }
        OutputMode::Presentation => assemble_single(trees.presentation.expect("generated"), display, &scheme),
        OutputMode::Content => assemble_single(trees.content.expect("generated"), display, &scheme),
    };
    Ok(Conversion { math, registry })
}
