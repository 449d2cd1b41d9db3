//! Recursive-descent parser for `.bnet` documents.
//!
//! ```text
//! document := "version" INT item*
//! item     := "meta" IDENT "=" (STRING | IDENT | NUMBER)
//!           | "variable" IDENT "{" IDENT ("," IDENT)* ","? "}"
//!           | "cpt" IDENT ("|" IDENT (","? IDENT)*)? "{" row* "}"
//! row      := IDENT* ":" NUMBER+ ("[" "band" "=" IDENT "]")?
//! ```
//!
//! `#` starts a comment running to end of line.

use std::collections::{BTreeMap, HashMap, HashSet};

use super::document::{configuration_names, CptDecl, NetworkDocument, Position, RowDecl, VariableDecl};
use super::error::NetSpecError;
use super::lexer::{tokenize, Token, TokenKind};
use super::FORMAT_VERSION;
use crate::band::ElicitationBand;

pub fn parse_network(text: &str) -> Result<NetworkDocument, NetSpecError> {
    let tokens = tokenize(text)?;
    let end = end_position(text);
    let doc = Parser { tokens, cursor: 0, end }.document()?;
    check_document(&doc)?;
    Ok(doc)
}

/// JSON import. The same completeness checks as the text parser apply.
pub fn parse_network_json(text: &str) -> Result<NetworkDocument, NetSpecError> {
    let doc: NetworkDocument = serde_json::from_str(text).map_err(|e| NetSpecError::Json {
        message: e.to_string(),
        position: Position { line: e.line(), column: e.column() },
    })?;
    if doc.version != FORMAT_VERSION {
        return Err(NetSpecError::VersionUnsupported { version: doc.version as i64, position: Position::default() });
    }
    check_document(&doc)?;
    Ok(doc)
}

fn end_position(text: &str) -> Position {
    let line = text.lines().count().max(1);
    let column = text.lines().last().map_or(0, |l| l.chars().count()) + 1;
    Position { line, column }
}

struct Parser {
    tokens: Vec<Token>,
    cursor: usize,
    end: Position,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.cursor)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.cursor).cloned();
        self.cursor += 1;
        t
    }

    fn here(&self) -> Position {
        self.peek().map_or(self.end, |t| t.position)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, NetSpecError> {
        Err(NetSpecError::Syntax { position: self.here(), message: message.into() })
    }

    fn unexpected<T>(&self, expected: &str) -> Result<T, NetSpecError> {
        match self.peek() {
            Some(t) => self.error(format!("expected {expected}, found {}", t.kind.describe())),
            None => self.error(format!("expected {expected}, found end of input")),
        }
    }

    fn expect(&mut self, kind: TokenKind, expected: &str) -> Result<Position, NetSpecError> {
        match self.peek() {
            Some(t) if t.kind == kind => Ok(self.next().expect("peeked").position),
            _ => self.unexpected(expected),
        }
    }

    fn ident(&mut self, expected: &str) -> Result<(String, Position), NetSpecError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(_), .. }) => {
                let t = self.next().expect("peeked");
                let TokenKind::Ident(s) = t.kind else { unreachable!() };
                Ok((s, t.position))
            }
            _ => self.unexpected(expected),
        }
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek().is_some_and(|t| &t.kind == kind)
    }

    fn at_ident(&self) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Ident(_), .. }))
    }

    fn document(mut self) -> Result<NetworkDocument, NetSpecError> {
        let version = self.version()?;
        let mut doc = NetworkDocument { version, metadata: BTreeMap::new(), variables: Vec::new(), cpts: Vec::new() };
        while let Some(tok) = self.peek() {
            match &tok.kind {
                TokenKind::Ident(k) if k == "meta" => {
                    self.next();
                    let (key, _) = self.ident("metadata key")?;
                    self.expect(TokenKind::Equals, "`=`")?;
                    let value = match self.next().map(|t| t.kind) {
                        Some(TokenKind::Str(s)) | Some(TokenKind::Ident(s)) => s,
                        Some(TokenKind::Number(n)) => n.to_string(),
                        _ => {
                            self.cursor -= 1;
                            return self.unexpected("metadata value");
                        }
                    };
                    doc.metadata.insert(key, value);
                }
                TokenKind::Ident(k) if k == "variable" => {
                    let decl = self.variable()?;
                    doc.variables.push(decl);
                }
                TokenKind::Ident(k) if k == "cpt" => {
                    let decl = self.cpt()?;
                    doc.cpts.push(decl);
                }
                TokenKind::Ident(k) if k == "version" => {
                    return self.error("`version` may only appear once, at the top");
                }
                _ => return self.unexpected("`variable`, `cpt` or `meta`"),
            }
        }
        Ok(doc)
    }

    fn version(&mut self) -> Result<u32, NetSpecError> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(k), .. }) if k == "version" => {}
            _ => return Err(NetSpecError::MissingVersion { position: self.here() }),
        }
        self.next();
        let position = self.here();
        match self.next().map(|t| t.kind) {
            Some(TokenKind::Number(n)) if n.fract() == 0.0 => {
                if n == FORMAT_VERSION as f64 {
                    Ok(FORMAT_VERSION)
                } else {
                    Err(NetSpecError::VersionUnsupported { version: n as i64, position })
                }
            }
            _ => Err(NetSpecError::Syntax { position, message: "expected integer format version".to_string() }),
        }
    }

    fn variable(&mut self) -> Result<VariableDecl, NetSpecError> {
        let position = self.next().expect("keyword").position;
        let (name, _) = self.ident("variable name")?;
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut states = Vec::new();
        loop {
            if self.at(&TokenKind::RBrace) && !states.is_empty() {
                break;
            }
            let (state, _) = self.ident("state name")?;
            states.push(state);
            if self.at(&TokenKind::Comma) {
                self.next();
            } else {
                break;
            }
        }
        self.expect(TokenKind::RBrace, "`,` or `}`")?;
        Ok(VariableDecl { name, states, position })
    }

    fn cpt(&mut self) -> Result<CptDecl, NetSpecError> {
        let position = self.next().expect("keyword").position;
        let (child, _) = self.ident("CPT child variable")?;
        let mut parents = Vec::new();
        if self.at(&TokenKind::Pipe) {
            self.next();
            loop {
                let (p, _) = self.ident("parent variable")?;
                parents.push(p);
                if self.at(&TokenKind::Comma) {
                    self.next();
                } else if !self.at_ident() {
                    break;
                }
            }
        }
        self.expect(TokenKind::LBrace, "`{`")?;
        let mut rows = Vec::new();
        while !self.at(&TokenKind::RBrace) {
            if self.peek().is_none() {
                return self.unexpected("row or `}`");
            }
            rows.push(self.row(parents.len())?);
        }
        self.next();
        Ok(CptDecl { child, parents, rows, position })
    }

    fn row(&mut self, arity: usize) -> Result<RowDecl, NetSpecError> {
        let position = self.here();
        let mut parent_states = Vec::new();
        while self.at_ident() {
            parent_states.push(self.ident("parent state")?.0);
        }
        if parent_states.len() != arity {
            return Err(NetSpecError::Syntax {
                position,
                message: format!("row key names {} parent state(s), CPT has {arity} parent(s)", parent_states.len()),
            });
        }
        self.expect(TokenKind::Colon, "`:` after row key")?;
        let mut probabilities = Vec::new();
        while let Some(Token { kind: TokenKind::Number(n), .. }) = self.peek() {
            probabilities.push(*n);
            self.next();
        }
        if probabilities.is_empty() {
            return self.unexpected("probability");
        }
        let mut band = None;
        if self.at(&TokenKind::LBracket) {
            self.next();
            let (key, _) = self.ident("`band`")?;
            if key != "band" {
                return Err(NetSpecError::Syntax {
                    position: self.tokens[self.cursor - 1].position,
                    message: format!("unknown row annotation `{key}`"),
                });
            }
            self.expect(TokenKind::Equals, "`=`")?;
            let (value, at) = self.ident("band level")?;
            band = Some(value.parse::<ElicitationBand>().map_err(|e| NetSpecError::Syntax {
                position: at,
                message: e.to_string(),
            })?);
            self.expect(TokenKind::RBracket, "`]`")?;
        }
        Ok(RowDecl { parent_states, probabilities, band, position })
    }
}

/// Duplicate declarations, unknown row states, and row completeness.
///
/// Structural problems that the network validator already reports (unknown
/// parents, cycles, row sums, probability counts) are left to compilation.
pub(crate) fn check_document(doc: &NetworkDocument) -> Result<(), NetSpecError> {
    let mut declared: HashMap<&str, &VariableDecl> = HashMap::new();
    for v in &doc.variables {
        if let Some(first) = declared.get(v.name.as_str()) {
            return Err(NetSpecError::DuplicateVariable {
                name: v.name.clone(),
                position: v.position,
                first: first.position,
            });
        }
        declared.insert(&v.name, v);
    }

    let mut seen_cpts: HashMap<&str, Position> = HashMap::new();
    for cpt in &doc.cpts {
        if let Some(first) = seen_cpts.get(cpt.child.as_str()) {
            return Err(NetSpecError::DuplicateCpt { child: cpt.child.clone(), position: cpt.position, first: *first });
        }
        seen_cpts.insert(&cpt.child, cpt.position);

        let parent_decls: Option<Vec<&VariableDecl>> = cpt.parents.iter().map(|p| declared.get(p.as_str()).copied()).collect();
        let mut keys = HashSet::new();
        for row in &cpt.rows {
            if row.parent_states.len() != cpt.parents.len() {
                return Err(NetSpecError::Syntax {
                    position: row.position,
                    message: format!(
                        "row key names {} parent state(s), CPT has {} parent(s)",
                        row.parent_states.len(),
                        cpt.parents.len()
                    ),
                });
            }
            for (parent, state) in cpt.parents.iter().zip(&row.parent_states) {
                if let Some(decl) = declared.get(parent.as_str()) {
                    if !decl.states.contains(state) {
                        return Err(NetSpecError::UnknownStateInRow {
                            child: cpt.child.clone(),
                            parent: parent.clone(),
                            state: state.clone(),
                            position: row.position,
                        });
                    }
                }
            }
            if !keys.insert(row.parent_states.clone()) {
                return Err(NetSpecError::DuplicateRow {
                    child: cpt.child.clone(),
                    configuration: row.parent_states.clone(),
                    position: row.position,
                });
            }
        }

        // Completeness can only be judged once every parent is known.
        if let Some(parents) = parent_decls {
            let states: Vec<Vec<String>> = parents.iter().map(|d| d.states.clone()).collect();
            let expected: usize = states.iter().map(Vec::len).product();
            for r in 0..expected {
                let config = configuration_names(&states, r);
                if !keys.contains(&config) {
                    return Err(NetSpecError::MissingRow {
                        child: cpt.child.clone(),
                        configuration: config,
                        position: cpt.position,
                    });
                }
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "version 1\nvariable HeadTrauma { wound, normal }\ncpt HeadTrauma {\n  : 0.2 0.8\n}\n";

    #[test]
    fn minimal_document() {
        let doc = parse_network(MINIMAL).unwrap();
        assert_eq!(doc.variables.len(), 1);
        assert_eq!(doc.cpts.len(), 1);
        assert_eq!(doc.cpts[0].rows.len(), 1);
        assert_eq!(doc.cpts[0].rows[0].probabilities, vec![0.2, 0.8]);
        assert_eq!(doc.variables[0].position, Position { line: 2, column: 1 });
        assert_eq!(doc.cpts[0].rows[0].position, Position { line: 4, column: 3 });
    }

    #[test]
    fn missing_row_names_configuration() {
        let text = "version 1\n\
                    variable h { wound, normal }\n\
                    variable o { open, closed }\n\
                    cpt h { : 0.2 0.8 }\n\
                    cpt o | h {\n  normal : 0.9 0.1\n}\n";
        match parse_network(text).unwrap_err() {
            NetSpecError::MissingRow { child, configuration, position } => {
                assert_eq!(child, "o");
                assert_eq!(configuration, vec!["wound".to_string()]);
                assert_eq!(position.line, 5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_state_in_row() {
        let text = "version 1\nvariable h { wound, normal }\nvariable o { a, b }\ncpt h { : 0.5 0.5 }\ncpt o | h {\n wound : 0.5 0.5\n broken : 0.5 0.5\n}";
        let err = parse_network(text).unwrap_err();
        assert!(matches!(err, NetSpecError::UnknownStateInRow { ref state, .. } if state == "broken"));
        assert_eq!(err.position(), Position { line: 7, column: 2 });
    }

    #[test]
    fn duplicate_variable_reports_both_positions() {
        let text = "version 1\nvariable a { x, y }\nvariable a { x, y }\n";
        match parse_network(text).unwrap_err() {
            NetSpecError::DuplicateVariable { position, first, .. } => {
                assert_eq!(position.line, 3);
                assert_eq!(first.line, 2);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn version_is_mandatory_and_checked() {
        assert!(matches!(parse_network("variable a { x, y }"), Err(NetSpecError::MissingVersion { .. })));
        assert!(matches!(
            parse_network("version 2\n"),
            Err(NetSpecError::VersionUnsupported { version: 2, position: Position { line: 1, column: 9 } })
        ));
        assert!(matches!(parse_network(""), Err(NetSpecError::MissingVersion { .. })));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let err = parse_network("version 1\nvariable a { x y }").unwrap_err();
        assert_eq!(err.position(), Position { line: 2, column: 16 });
        let err = parse_network("version 1\nvariable a { x, y }\ncpt a {\n : 0.5 0.5").unwrap_err();
        assert!(matches!(err, NetSpecError::Syntax { .. }));
        let err = parse_network("version 1\nvariable a { x, y }\ncpt a {\n : 0.5 0.5 [bnd=weak] }").unwrap_err();
        assert_eq!(err.position().line, 4);
    }

    #[test]
    fn band_annotations_and_metadata() {
        let text = "version 1\nmeta source = \"expert panel\"\nvariable a { x, y }\ncpt a { : 0.9 0.1 [band=strong] }";
        let doc = parse_network(text).unwrap();
        assert_eq!(doc.metadata["source"], "expert panel");
        assert_eq!(doc.cpts[0].rows[0].band, Some(ElicitationBand::Strong));
    }

    #[test]
    fn parents_may_be_comma_or_space_separated() {
        let base = "version 1\nvariable a { x, y }\nvariable b { x, y }\nvariable c { x, y }\ncpt a { : 0.5 0.5 }\ncpt b { : 0.5 0.5 }\n";
        let rows = "{ x x : 0.5 0.5\n x y : 0.5 0.5\n y x : 0.5 0.5\n y y : 0.5 0.5 }";
        let spaced = parse_network(&format!("{base}cpt c | a b {rows}")).unwrap();
        let commas = parse_network(&format!("{base}cpt c | a, b {rows}")).unwrap();
        assert!(spaced.structurally_eq(&commas));
        assert_eq!(spaced.cpts[2].parents, vec!["a", "b"]);
    }

    #[test]
    fn json_import_checks_completeness() {
        let doc = parse_network(MINIMAL).unwrap();
        let back = parse_network_json(&doc.to_json()).unwrap();
        assert!(back.structurally_eq(&doc));
        let mut broken = doc.clone();
        broken.cpts[0].rows.clear();
        assert!(matches!(parse_network_json(&broken.to_json()), Err(NetSpecError::MissingRow { .. })));
        let err = parse_network_json("{\"version\": 1,\n \"wat\": 3}").unwrap_err();
        assert!(matches!(err, NetSpecError::Json { .. }));
        assert!(err.position().line >= 1);
    }
}
