use std::io;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use xmath_mathml::cli::{run, CliConfig, Display, Mode};

#[derive(Clone, Copy, ValueEnum)]
enum To {
    Pmml,
    Cmml,
    Parallel,
    /// Validate the links of an existing MathML document.
    Check,
}

#[derive(Parser)]
#[command(name = "xmath2mml", version, about = "Convert XMath to cross-referenced MathML")]
struct Args {
    /// Input file, or `-` for standard input.
    input: PathBuf,
    #[arg(long, value_enum, default_value = "parallel")]
    to: To,
    /// TeX source for alttext and the TeX annotation.
    #[arg(long)]
    tex: Option<String>,
    /// Extra expansion rules, one per line.
    #[arg(long, value_name = "FILE")]
    expansions: Option<PathBuf>,
    /// `display` on the math element; `auto` derives it from the formula.
    #[arg(long, default_value = "block")]
    display: String,
    #[arg(long)]
    pretty: bool,
    /// Write non-ASCII characters as character references.
    #[arg(long)]
    numeric_entities: bool,
    #[arg(long, short, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mode = match args.to {
        To::Pmml => Mode::Pmml,
        To::Cmml => Mode::Cmml,
        To::Parallel => Mode::Parallel,
        To::Check => Mode::Check,
    };
    let mut config = CliConfig::new(mode);
    config.input = (args.input.as_os_str() != "-").then_some(args.input);
    config.output = args.out;
    config.tex = args.tex;
    config.expansions = args.expansions;
    config.display = match args.display.as_str() {
        "auto" => Display::Auto,
        v => Display::Value(v.to_string()),
    };
    config.pretty = args.pretty;
    config.numeric_entities = args.numeric_entities;
    let code = run(&config, &mut io::stdin(), &mut io::stdout(), &mut io::stderr());
    ExitCode::from(code as u8)
}
