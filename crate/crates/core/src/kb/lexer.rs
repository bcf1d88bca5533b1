use super::{KbError, Span};

#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Tok {
    Ident(String),
    /// Raw digits, optionally with one fractional part.
    Number(String),
    Str(String),
    LBrace,
    RBrace,
    LParen,
    RParen,
    Semi,
    Comma,
    Eof,
}

impl Tok {
    pub(crate) fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number {n}"),
            Tok::Str(s) => format!("string {s:?}"),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

struct Cursor<'a> {
    chars: std::iter::Peekable<std::str::CharIndices<'a>>,
    len: usize,
    line: usize,
    col: usize,
}

impl Cursor<'_> {
    fn peek(&mut self) -> Option<char> {
        self.chars.peek().map(|&(_, c)| c)
    }

    fn span(&mut self) -> Span {
        let offset = self.chars.peek().map_or(self.len, |&(o, _)| o);
        Span {
            line: self.line,
            col: self.col,
            offset,
        }
    }

    fn bump(&mut self) -> Option<char> {
        let (_, c) = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn take_while(&mut self, s: &mut String, pred: impl Fn(char) -> bool) {
        while let Some(c) = self.peek() {
            if !pred(c) {
                break;
            }
            s.push(c);
            self.bump();
        }
    }
}

pub(crate) fn tokenize(text: &str) -> Result<Vec<(Tok, Span)>, KbError> {
    let mut out = Vec::new();
    let mut cur = Cursor {
        chars: text.char_indices().peekable(),
        len: text.len(),
        line: 1,
        col: 1,
    };

    while let Some(c) = cur.peek() {
        let span = cur.span();
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                cur.bump();
            }
            '#' => {
                while cur.peek().is_some_and(|c| c != '\n') {
                    cur.bump();
                }
            }
            '{' | '}' | '(' | ')' | ';' | ',' => {
                cur.bump();
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    ';' => Tok::Semi,
                    _ => Tok::Comma,
                };
                out.push((tok, span));
            }
            '"' => {
                cur.bump();
                let mut s = String::new();
                loop {
                    match cur.peek() {
                        Some('"') => {
                            cur.bump();
                            break;
                        }
                        Some('\n') | None => {
                            return Err(KbError::Lex {
                                span,
                                message: "unterminated string".into(),
                            })
                        }
                        Some(c) => {
                            s.push(c);
                            cur.bump();
                        }
                    }
                }
                out.push((Tok::Str(s), span));
            }
            c if c.is_ascii_digit() => {
                let mut s = String::new();
                cur.take_while(&mut s, |c| c.is_ascii_digit());
                if cur.peek() == Some('.') {
                    s.push('.');
                    cur.bump();
                    let digits_span = cur.span();
                    let before = s.len();
                    cur.take_while(&mut s, |c| c.is_ascii_digit());
                    if s.len() == before {
                        return Err(KbError::Lex {
                            span: digits_span,
                            message: "expected digits after `.`".into(),
                        });
                    }
                }
                out.push((Tok::Number(s), span));
            }
            c if c.is_ascii_lowercase() || c == '_' => {
                let mut s = String::new();
                cur.take_while(&mut s, |c| {
                    c.is_ascii_lowercase() || c.is_ascii_digit() || c == '_'
                });
                out.push((Tok::Ident(s), span));
            }
            other => {
                return Err(KbError::Lex {
                    span,
                    message: format!("unexpected character {other:?}"),
                })
            }
        }
    }
    out.push((Tok::Eof, cur.span()));
    Ok(out)
}
