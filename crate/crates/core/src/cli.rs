//! Command-line driver behind the `xmath2mml` binary.

use std::fs;
use std::io::{Read, Write};
use std::path::PathBuf;

use crate::cmml::MeaningTable;
use crate::error::Location;
use crate::io::parse_xmath;
use crate::linker::check_links;
use crate::pipeline::{convert, ConvertOptions, OutputMode};
use crate::serialize::{parse_mathml, serialize_mathml, EntityMode, SerializeOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VIOLATIONS: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Pmml,
    Cmml,
    Parallel,
    Check,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Display {
    /// Derived from the outermost large operator.
    Auto,
    Value(String),
}

#[derive(Debug, Clone)]
pub struct CliConfig {
    /// `None` reads standard input.
    pub input: Option<PathBuf>,
    /// `None` writes standard output.
    pub output: Option<PathBuf>,
    pub mode: Mode,
    pub tex: Option<String>,
    pub expansions: Option<PathBuf>,
    pub display: Display,
    pub pretty: bool,
    pub numeric_entities: bool,
}

impl CliConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            input: None,
            output: None,
            mode,
            tex: None,
            expansions: None,
            display: Display::Value("block".into()),
            pretty: false,
            numeric_entities: false,
        }
    }

    fn input_name(&self) -> String {
        self.input
            .as_ref()
            .map_or_else(|| "<stdin>".to_string(), |p| p.display().to_string())
    }
}

fn diag(stderr: &mut dyn Write, file: &str, location: Option<Location>, message: impl std::fmt::Display) {
    let _ = match location {
        Some(loc) => writeln!(stderr, "{file}:{}:{}: error: {message}", loc.line, loc.column),
        None => writeln!(stderr, "{file}: error: {message}"),
    };
}

/// Runs one invocation and returns its exit code.
pub fn run(config: &CliConfig, stdin: &mut dyn Read, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let name = config.input_name();
    let text = match &config.input {
        Some(path) => fs::read_to_string(path),
        None => {
            let mut buf = String::new();
            stdin.read_to_string(&mut buf).map(|_| buf)
        }
    };
    let text = match text {
        Ok(t) => t,
        Err(e) => {
            diag(stderr, &name, None, e);
            return EXIT_ERROR;
        }
    };

    let (output, code) = match config.mode {
        Mode::Check => match parse_mathml(&text) {
            Ok(math) => {
                let report = check_links(&math);
                let code = if report.is_empty() { EXIT_OK } else { EXIT_VIOLATIONS };
                (report.to_string(), code)
            }
            Err(e) => {
                diag(stderr, &name, Some(e.location), format!("{:?}: {}", e.kind, e.detail));
                return EXIT_ERROR;
            }
        },
        _ => match convert_text(config, &name, &text, stderr) {
            Some(out) => (out, EXIT_OK),
            None => return EXIT_ERROR,
        },
    };

    let written = match &config.output {
        Some(path) => fs::write(path, output.as_bytes()),
        None => stdout.write_all(output.as_bytes()),
    };
    if let Err(e) = written {
        let target = config
            .output
            .as_ref()
            .map_or_else(|| "<stdout>".to_string(), |p| p.display().to_string());
        diag(stderr, &target, None, e);
        return EXIT_ERROR;
    }
    code
}

fn convert_text(config: &CliConfig, name: &str, text: &str, stderr: &mut dyn Write) -> Option<String> {
    let mut table = MeaningTable::default();
    if let Some(path) = &config.expansions {
        let table_name = path.display().to_string();
        let loaded = fs::read_to_string(path).map_err(|e| e.to_string()).and_then(|t| {
            table.load_rules(&t).map_err(|e| {
                diag(
                    stderr,
                    &table_name,
                    Some(Location {
                        line: e.line,
                        column: 1,
                    }),
                    &e.message,
                );
                String::new()
            })
        });
        if let Err(msg) = loaded {
            if !msg.is_empty() {
                diag(stderr, &table_name, None, msg);
            }
            return None;
        }
    }

    let doc = match parse_xmath(text) {
        Ok(doc) => doc,
        Err(e) => {
            diag(stderr, name, Some(e.location), format!("{:?}: {}", e.kind, e.detail));
            return None;
        }
    };
    let opts = ConvertOptions {
        mode: match config.mode {
            Mode::Pmml => OutputMode::Presentation,
            Mode::Cmml => OutputMode::Content,
            _ => OutputMode::Parallel,
        },
        tex: config.tex.clone(),
        display: match &config.display {
            Display::Auto => None,
            Display::Value(v) => Some(v.clone()),
        },
        prefix: None,
        table,
    };
    let conversion = match convert(&doc, &opts) {
        Ok(c) => c,
        Err(e) => {
            diag(stderr, name, e.location(), &e);
            return None;
        }
    };
    let serialize_opts = SerializeOptions {
        pretty: config.pretty,
        entity_mode: if config.numeric_entities {
            EntityMode::NumericRefs
        } else {
            EntityMode::Utf8
        },
        namespace_prefix: None,
    };
    let mut out = serialize_mathml(&conversion.math, &serialize_opts);
    if !out.ends_with('\n') {
        out.push('\n');
    }
    Some(out)
}
