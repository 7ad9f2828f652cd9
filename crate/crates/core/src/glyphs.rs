//! Font-dependent glyph and identifier tables.

/// Script capitals used for the caligraphic font. Letters without a code point
/// in the Letterlike Symbols block use Mathematical Script Capitals.
const SCRIPT_CAPITALS: [char; 26] = [
    '\u{1D49C}',
    '\u{212C}',
    '\u{1D49E}',
    '\u{1D49F}',
    '\u{2130}',
    '\u{2131}',
    '\u{1D4A2}',
    '\u{210B}',
    '\u{2110}',
    '\u{1D4A5}',
    '\u{1D4A6}',
    '\u{2112}',
    '\u{2133}',
    '\u{1D4A9}',
    '\u{1D4AA}',
    '\u{1D4AB}',
    '\u{1D4AC}',
    '\u{211B}',
    '\u{1D4AE}',
    '\u{1D4AF}',
    '\u{1D4B0}',
    '\u{1D4B1}',
    '\u{1D4B2}',
    '\u{1D4B3}',
    '\u{1D4B4}',
    '\u{1D4B5}',
];

/// `mathvariant` values for fonts MathML can express directly.
const MATHVARIANTS: &[(&str, &str)] = &[
    ("bold", "bold"),
    ("bold-italic", "bold-italic"),
    ("sans-serif", "sans-serif"),
    ("typewriter", "monospace"),
    ("fraktur", "fraktur"),
    ("blackboard", "double-struck"),
    ("script", "script"),
];

pub(crate) const CALIGRAPHIC_CLASS: &str = "ltx_font_mathcaligraphic";

fn single_char(text: &str) -> Option<char> {
    let mut chars = text.chars();
    let c = chars.next()?;
    chars.next().is_none().then_some(c)
}

pub(crate) fn is_greek_capital(c: char) -> bool {
    matches!(c, '\u{0391}'..='\u{03A9}') && c != '\u{03A2}'
}

/// True for single letters that render upright although MathML would
/// italicise them: explicit `normal` font, or an unadorned Greek capital.
pub(crate) fn forced_upright(text: &str, font: Option<&str>) -> bool {
    match single_char(text) {
        Some(c) => match font {
            Some("normal") => c.is_alphabetic(),
            None => is_greek_capital(c),
            Some(_) => false,
        },
        None => false,
    }
}

/// The glyph a token shows in the given font.
pub(crate) fn styled_glyph(text: &str, font: Option<&str>) -> String {
    match font {
        Some("caligraphic") => text
            .chars()
            .map(|c| {
                if c.is_ascii_uppercase() {
                    SCRIPT_CAPITALS[(c as u8 - b'A') as usize]
                } else {
                    c
                }
            })
            .collect(),
        _ => text.to_string(),
    }
}

pub(crate) fn mathvariant(font: &str) -> Option<&'static str> {
    MATHVARIANTS.iter().find(|(f, _)| *f == font).map(|(_, v)| *v)
}

/// Identifier text for a `ci` element.
pub(crate) fn ci_name(text: &str, font: Option<&str>) -> String {
    if forced_upright(text, font) {
        format!("normal-{text}")
    } else {
        styled_glyph(text, font)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn upright_rules() {
        assert!(forced_upright("\u{03A8}", None));
        assert!(!forced_upright("\u{03C8}", None));
        assert!(!forced_upright("a", Some("italic")));
        assert!(forced_upright("d", Some("normal")));
        assert!(!forced_upright("\u{03A8}", Some("italic")));
        assert!(!forced_upright("sin", Some("normal")));
    }

    #[test]
    fn caligraphic_h_is_hilbert_space() {
        assert_eq!(styled_glyph("H", Some("caligraphic")), "\u{210B}");
        assert_eq!(ci_name("H", Some("caligraphic")), "\u{210B}");
        assert_eq!(ci_name("\u{03A6}", None), "normal-\u{03A6}");
        assert_eq!(ci_name("x", Some("italic")), "x");
    }

    #[test]
    fn script_table_is_distinct() {
        let mut v = SCRIPT_CAPITALS.to_vec();
        v.sort();
        v.dedup();
        assert_eq!(v.len(), 26);
    }
}
