use super::ParseError;

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Open,
    Close,
    Atom(String),
    Str(String),
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Open => "`(`".into(),
            Tok::Close => "`)`".into(),
            Tok::Atom(a) => format!("`{a}`"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub(crate) struct Token {
    pub tok: Tok,
    pub line: usize,
    pub col: usize,
}

/// Splits text into parentheses, atoms and strings. `;` starts a comment
/// running to the end of the line. Lines and columns are 1-based and count
/// characters.
pub(crate) fn lex(text: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut col) = (1usize, 1usize);
    while let Some(&c) = chars.peek() {
        let (l0, c0) = (line, col);
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            ';' => {
                while let Some(&c) = chars.peek() {
                    if c == '\n' {
                        break;
                    }
                    chars.next();
                    col += 1;
                }
            }
            '(' | ')' => {
                chars.next();
                col += 1;
                let tok = if c == '(' { Tok::Open } else { Tok::Close };
                out.push(Token { tok, line: l0, col: c0 });
            }
            '"' => {
                chars.next();
                col += 1;
                let mut s = String::new();
                loop {
                    match chars.next() {
                        None => {
                            return Err(ParseError::new(l0, c0, "unterminated string", &["`\"`"], "end of input"));
                        }
                        Some('"') => {
                            col += 1;
                            break;
                        }
                        Some('\\') => {
                            col += 1;
                            match chars.next() {
                                Some(e @ ('"' | '\\')) => {
                                    col += 1;
                                    s.push(e);
                                }
                                Some('n') => {
                                    col += 1;
                                    s.push('\n');
                                }
                                other => {
                                    let found = other.map(|c| format!("`{c}`")).unwrap_or("end of input".into());
                                    return Err(ParseError::new(line, col, "bad escape in string", &["`\\\"`", "`\\\\`", "`\\n`"], &found));
                                }
                            }
                        }
                        Some('\n') => {
                            line += 1;
                            col = 1;
                            s.push('\n');
                        }
                        Some(c) => {
                            col += 1;
                            s.push(c);
                        }
                    }
                }
                out.push(Token { tok: Tok::Str(s), line: l0, col: c0 });
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || matches!(c, '(' | ')' | '"' | ';') {
                        break;
                    }
                    s.push(c);
                    chars.next();
                    col += 1;
                }
                out.push(Token { tok: Tok::Atom(s), line: l0, col: c0 });
            }
        }
    }
    out.push(Token { tok: Tok::Eof, line, col });
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn positions_are_tracked() {
        let toks = lex("(a\n  \"b c\" ; note\n 1.5)").unwrap();
        let got: Vec<_> = toks.iter().map(|t| (t.tok.clone(), t.line, t.col)).collect();
        assert_eq!(
            got,
            vec![
                (Tok::Open, 1, 1),
                (Tok::Atom("a".into()), 1, 2),
                (Tok::Str("b c".into()), 2, 3),
                (Tok::Atom("1.5".into()), 3, 2),
                (Tok::Close, 3, 5),
                (Tok::Eof, 3, 6),
            ]
        );
    }

    #[test]
    fn escapes() {
        let toks = lex(r#""a\"b\\c""#).unwrap();
        assert_eq!(toks[0].tok, Tok::Str("a\"b\\c".into()));
    }

    #[test]
    fn unterminated_string() {
        let e = lex("(game \"x").unwrap_err();
        assert_eq!((e.line, e.col), (1, 7));
    }
}
