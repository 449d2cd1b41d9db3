use super::document::Position;
use super::error::NetSpecError;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum TokenKind {
    Ident(String),
    Number(f64),
    Str(String),
    LBrace,
    RBrace,
    LBracket,
    RBracket,
    Pipe,
    Colon,
    Comma,
    Equals,
}

impl TokenKind {
    pub fn describe(&self) -> String {
        match self {
            Self::Ident(s) => format!("identifier `{s}`"),
            Self::Number(n) => format!("number {n}"),
            Self::Str(_) => "string".to_string(),
            Self::LBrace => "`{`".to_string(),
            Self::RBrace => "`}`".to_string(),
            Self::LBracket => "`[`".to_string(),
            Self::RBracket => "`]`".to_string(),
            Self::Pipe => "`|`".to_string(),
            Self::Colon => "`:`".to_string(),
            Self::Comma => "`,`".to_string(),
            Self::Equals => "`=`".to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct Token {
    pub kind: TokenKind,
    pub position: Position,
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.')
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<Token>, NetSpecError> {
    let mut tokens = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1usize, 1usize);

    macro_rules! bump {
        () => {{
            let c = chars.next();
            if c == Some('\n') {
                line += 1;
                column = 1;
            } else if c.is_some() {
                column += 1;
            }
            c
        }};
    }

    while let Some(&c) = chars.peek() {
        let position = Position { line, column };
        match c {
            '\n' | ' ' | '\t' | '\r' => {
                bump!();
            }
            '#' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    bump!();
                }
            }
            '{' | '}' | '[' | ']' | '|' | ':' | ',' | '=' => {
                bump!();
                let kind = match c {
                    '{' => TokenKind::LBrace,
                    '}' => TokenKind::RBrace,
                    '[' => TokenKind::LBracket,
                    ']' => TokenKind::RBracket,
                    '|' => TokenKind::Pipe,
                    ':' => TokenKind::Colon,
                    ',' => TokenKind::Comma,
                    _ => TokenKind::Equals,
                };
                tokens.push(Token { kind, position });
            }
            '"' => {
                bump!();
                let mut value = String::new();
                loop {
                    match bump!() {
                        Some('"') => break,
                        Some('\\') => match bump!() {
                            Some('"') => value.push('"'),
                            Some('\\') => value.push('\\'),
                            Some('n') => value.push('\n'),
                            other => {
                                return Err(NetSpecError::Syntax {
                                    position: Position { line, column },
                                    message: format!("invalid escape `\\{}`", other.map(String::from).unwrap_or_default()),
                                })
                            }
                        },
                        Some('\n') | None => {
                            return Err(NetSpecError::Syntax { position, message: "unterminated string".to_string() })
                        }
                        Some(c) => value.push(c),
                    }
                }
                tokens.push(Token { kind: TokenKind::Str(value), position });
            }
            c if c.is_ascii_digit() || c == '-' || c == '.' => {
                let mut raw = String::new();
                while let Some(&c) = chars.peek() {
                    let exponent_sign = matches!(c, '-' | '+') && matches!(raw.chars().last(), Some('e' | 'E'));
                    if c.is_ascii_digit() || c == '.' || c == 'e' || c == 'E' || exponent_sign || (c == '-' && raw.is_empty()) {
                        raw.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                let value: f64 = raw.parse().map_err(|_| NetSpecError::Syntax {
                    position,
                    message: format!("malformed number `{raw}`"),
                })?;
                tokens.push(Token { kind: TokenKind::Number(value), position });
            }
            c if is_ident_start(c) => {
                let mut ident = String::new();
                while let Some(&c) = chars.peek() {
                    if is_ident_continue(c) {
                        ident.push(c);
                        bump!();
                    } else {
                        break;
                    }
                }
                tokens.push(Token { kind: TokenKind::Ident(ident), position });
            }
            other => {
                return Err(NetSpecError::Syntax { position, message: format!("unexpected character `{other}`") });
            }
        }
    }
    Ok(tokens)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tracks_line_and_column() {
        let toks = tokenize("version 1\n  variable a { x, y }").unwrap();
        assert_eq!(toks[0].position, Position { line: 1, column: 1 });
        assert_eq!(toks[1].kind, TokenKind::Number(1.0));
        assert_eq!(toks[2].position, Position { line: 2, column: 3 });
        assert_eq!(toks[3].kind, TokenKind::Ident("a".into()));
    }

    #[test]
    fn comments_and_strings() {
        let toks = tokenize("# header\nmeta k = \"a \\\"b\\\"\" # trailing").unwrap();
        assert_eq!(toks.len(), 4);
        assert_eq!(toks[3].kind, TokenKind::Str("a \"b\"".into()));
    }

    #[test]
    fn numbers_with_exponents() {
        let toks = tokenize("1e-3 0.25 -0.5").unwrap();
        let values: Vec<_> = toks.into_iter().map(|t| t.kind).collect();
        assert_eq!(values, vec![TokenKind::Number(1e-3), TokenKind::Number(0.25), TokenKind::Number(-0.5)]);
    }

    #[test]
    fn bad_character_reports_position() {
        let err = tokenize("version 1\ncpt a ; ").unwrap_err();
        assert_eq!(err.position(), Position { line: 2, column: 7 });
    }
}
