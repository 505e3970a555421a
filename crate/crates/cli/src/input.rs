//! Input documents: a small TOML (or JSON) description of a t-module.
//!
//! ```toml
//! q = 3
//! mode = "rational_perfection"
//! d = 2
//! ell = "th"
//! phi_t = [
//!   ["th + tau^2", "tau^3"],
//!   ["1 + tau", "th + tau^2"],
//! ]
//!
//! [options]
//! n_max = 8
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;
use tmodule_core::base_field::{FieldConfig, FieldMode, PerfectField};
use tmodule_core::expr::{parse_element, parse_tau, render_element, render_tau};
use tmodule_core::{AnalyzeOptions, TModule, TauMatrix};

/// Analysis settings stored in a document; command-line flags override them.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DocOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_cap: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub check: Option<bool>,
}

impl DocOptions {
    pub fn is_empty(&self) -> bool {
        *self == DocOptions::default()
    }

    pub fn to_analyze_options(&self) -> AnalyzeOptions {
        AnalyzeOptions {
            precision: self.precision,
            precision_cap: self.precision_cap,
            n_max: self.n_max,
            seed: self.seed,
            check: self.check.unwrap_or(false),
        }
    }
}

fn default_mode() -> FieldMode {
    FieldMode::RationalPerfection
}

/// A t-module description. After [`parse`], every expression is in
/// canonical form (`∑ c_k·tau^k`, ascending).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputDocument {
    pub q: u64,
    #[serde(default = "default_mode")]
    pub mode: FieldMode,
    pub d: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ell: Option<String>,
    pub phi_t: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "DocOptions::is_empty")]
    pub options: DocOptions,
}

/// A 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Position {
    pub line: usize,
    pub column: usize,
}

impl std::fmt::Display for Position {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Debug, Error)]
pub enum InputError {
    #[error("{pos}: syntax error: {message}")]
    Syntax { pos: Position, message: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("{pos}: in {location}: {message}")]
    Expression { pos: Position, location: String, message: String },
    #[error("invalid field: {0}")]
    Field(String),
    #[error("not a t-module: {0}")]
    Module(tmodule_core::Error),
}

/// A parsed document together with the module it describes.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub doc: InputDocument,
    pub module: TModule,
}

pub fn position_of(src: &str, offset: usize) -> Position {
    let before = &src[..offset.min(src.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    Position { line, column }
}

fn looks_like_json(src: &str) -> bool {
    src.trim_start().starts_with('{')
}

/// Locates the `nth` quoted occurrence of `needle` in the source.
struct StringLocator<'a> {
    src: &'a str,
    cursor: usize,
}

impl StringLocator<'_> {
    fn find(&mut self, needle: &str) -> Option<usize> {
        let pattern = format!("\"{needle}\"");
        let at = self.src[self.cursor..].find(&pattern).map(|i| i + self.cursor)?;
        self.cursor = at + pattern.len();
        Some(at + 1)
    }
}

/// Parses TOML or JSON (detected by a leading `{`), validates the shape,
/// evaluates the expressions and canonicalizes them.
pub fn parse(src: &str) -> Result<Loaded, InputError> {
    let raw: InputDocument = if looks_like_json(src) {
        serde_json::from_str(src).map_err(|e| InputError::Syntax {
            pos: Position { line: e.line(), column: e.column() },
            message: e.to_string(),
        })?
    } else {
        toml::from_str(src).map_err(|e| InputError::Syntax {
            pos: position_of(src, e.span().map_or(0, |s| s.start)),
            message: e.message().to_string(),
        })?
    };
    let config = FieldConfig::new(raw.q, raw.mode).map_err(|e| InputError::Field(e.to_string()))?;
    let field = PerfectField::new(config).map_err(|e| InputError::Field(e.to_string()))?;
    if raw.d == 0 {
        return Err(InputError::Dimension("d must be at least 1".into()));
    }
    if raw.phi_t.len() != raw.d {
        return Err(InputError::Dimension(format!("phi_t has {} rows, expected d = {}", raw.phi_t.len(), raw.d)));
    }
    for (i, row) in raw.phi_t.iter().enumerate() {
        if row.len() != raw.d {
            return Err(InputError::Dimension(format!(
                "row {} of phi_t has {} entries, expected {}",
                i + 1,
                row.len(),
                raw.d
            )));
        }
    }
    let mut locator = StringLocator { src, cursor: 0 };
    let ell = match &raw.ell {
        None => None,
        Some(text) => {
            let at = locator.find(text);
            let x = parse_element(&field, text).map_err(|e| InputError::Expression {
                pos: position_of(src, at.map_or(0, |a| a + e.offset)),
                location: "ell".into(),
                message: e.message.clone(),
            })?;
            Some(x)
        }
    };
    let mut rows = Vec::with_capacity(raw.d);
    for (i, row) in raw.phi_t.iter().enumerate() {
        let mut out = Vec::with_capacity(raw.d);
        for (j, text) in row.iter().enumerate() {
            let at = locator.find(text);
            let p = parse_tau(&field, text).map_err(|e| InputError::Expression {
                pos: position_of(src, at.map_or(0, |a| a + e.offset)),
                location: format!("phi_t[{}][{}]", i + 1, j + 1),
                message: e.message.clone(),
            })?;
            out.push(p);
        }
        rows.push(out);
    }
    let matrix = TauMatrix::from_rows(rows).map_err(InputError::Module)?;
    let module = TModule::new(matrix, ell).map_err(InputError::Module)?;
    let doc = InputDocument {
        q: raw.q,
        mode: raw.mode,
        d: raw.d,
        ell: module_ell_text(&raw, &module),
        phi_t: module.phi_t().rows().map(|r| r.iter().map(render_tau).collect()).collect(),
        options: raw.options,
    };
    Ok(Loaded { doc, module })
}

fn module_ell_text(raw: &InputDocument, m: &TModule) -> Option<String> {
    raw.ell.as_ref().map(|_| render_element(m.ell()))
}

fn toml_string(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        match c {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            c => out.push(c),
        }
    }
    out.push('"');
    out
}

/// Canonical TOML rendering; `parse(render(doc))` reproduces `doc`.
pub fn render(doc: &InputDocument) -> String {
    let mut out = String::new();
    out.push_str(&format!("q = {}\n", doc.q));
    let mode = match doc.mode {
        FieldMode::FiniteField => "finite_field",
        FieldMode::RationalPerfection => "rational_perfection",
    };
    out.push_str(&format!("mode = \"{mode}\"\n"));
    out.push_str(&format!("d = {}\n", doc.d));
    if let Some(ell) = &doc.ell {
        out.push_str(&format!("ell = {}\n", toml_string(ell)));
    }
    out.push_str("phi_t = [\n");
    for row in &doc.phi_t {
        let cells: Vec<String> = row.iter().map(|c| toml_string(c)).collect();
        out.push_str(&format!("  [{}],\n", cells.join(", ")));
    }
    out.push_str("]\n");
    let o = &doc.options;
    if !o.is_empty() {
        out.push_str("\n[options]\n");
        if let Some(v) = o.precision {
            out.push_str(&format!("precision = {v}\n"));
        }
        if let Some(v) = o.precision_cap {
            out.push_str(&format!("precision_cap = {v}\n"));
        }
        if let Some(v) = o.n_max {
            out.push_str(&format!("n_max = {v}\n"));
        }
        if let Some(v) = o.seed {
            out.push_str(&format!("seed = {v}\n"));
        }
        if let Some(v) = o.check {
            out.push_str(&format!("check = {v}\n"));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const EXAMPLE: &str = r#"
q = 3
d = 2
phi_t = [
  ["th + tau^2", "tau^3"],
  ["1 + tau", "th + tau^2"],
]
"#;

    #[test]
    fn parses_and_canonicalizes() {
        let loaded = parse(EXAMPLE).unwrap();
        assert_eq!(loaded.doc.phi_t[1][0], "1 + tau");
        assert_eq!(loaded.module.dim(), 2);
        let src = "q = 3\nd = 1\nphi_t = [[\"tau*th\"]]\nell = \"th\"\n";
        let err = parse(src).unwrap_err();
        assert!(matches!(err, InputError::Module(_)), "{err}");
        let src = "q = 3\nd = 1\nphi_t = [[\"th + tau*th\"]]\n";
        assert_eq!(parse(src).unwrap().doc.phi_t[0][0], "th + th^3*tau");
    }

    #[test]
    fn round_trip() {
        let loaded = parse(EXAMPLE).unwrap();
        let text = render(&loaded.doc);
        let again = parse(&text).unwrap();
        assert_eq!(again.doc, loaded.doc);
        assert_eq!(render(&again.doc), text);
    }

    #[test]
    fn json_input() {
        let src = r#"{"q": 3, "d": 1, "phi_t": [["th + tau + tau^2"]], "options": {"n_max": 4}}"#;
        let loaded = parse(src).unwrap();
        assert_eq!(loaded.doc.options.n_max, Some(4));
    }

    #[test]
    fn diagnostics_carry_positions() {
        let src = "q = 3\nd = 1\nphi_t = [[\"th + tau^\"]]\n";
        match parse(src).unwrap_err() {
            InputError::Expression { pos, location, .. } => {
                assert_eq!(pos.line, 3);
                assert_eq!(location, "phi_t[1][1]");
            }
            e => panic!("unexpected {e}"),
        }
        let src = "q = 3\nd = \nphi_t = []\n";
        match parse(src).unwrap_err() {
            InputError::Syntax { pos, .. } => assert_eq!(pos.line, 2),
            e => panic!("unexpected {e}"),
        }
        let src = "q = 6\nd = 1\nphi_t = [[\"th\"]]\n";
        assert!(matches!(parse(src).unwrap_err(), InputError::Field(_)));
        let src = "q = 3\nd = 2\nphi_t = [[\"th\"]]\n";
        assert!(matches!(parse(src).unwrap_err(), InputError::Dimension(_)));
    }
}
