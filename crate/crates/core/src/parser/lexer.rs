use super::error::{ParseError, ParseErrorKind};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Tok {
    Ident(String),
    Number(String),
    Str(String),
    /// `:=`
    Walrus,
    Sym(char),
    Eof,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Number(n) => format!("number `{n}`"),
            Tok::Str(_) => "string literal".into(),
            Tok::Walrus => "`:=`".into(),
            Tok::Sym(c) => format!("`{c}`"),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Token {
    pub tok: Tok,
    pub line: u32,
    pub col: u32,
}

pub fn lex(src: &str, origin: &str) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let (mut i, mut line, mut col) = (0usize, 1u32, 1u32);
    while i < chars.len() {
        let c = chars[i];
        let (tl, tc) = (line, col);
        let bump = |i: &mut usize, line: &mut u32, col: &mut u32| {
            if chars[*i] == '\n' {
                *line += 1;
                *col = 1;
            } else {
                *col += 1;
            }
            *i += 1;
        };
        if c.is_whitespace() {
            bump(&mut i, &mut line, &mut col);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'/') {
            while i < chars.len() && chars[i] != '\n' {
                bump(&mut i, &mut line, &mut col);
            }
            continue;
        }
        if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                bump(&mut i, &mut line, &mut col);
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                bump(&mut i, &mut line, &mut col);
            }
            out.push(Token {
                tok: Tok::Number(chars[start..i].iter().collect()),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c == '"' {
            bump(&mut i, &mut line, &mut col);
            let start = i;
            while i < chars.len() && chars[i] != '"' {
                bump(&mut i, &mut line, &mut col);
            }
            if i >= chars.len() {
                return Err(ParseError::new(
                    origin,
                    tl,
                    tc,
                    ParseErrorKind::Invalid("unterminated string literal".into()),
                ));
            }
            let s: String = chars[start..i].iter().collect();
            bump(&mut i, &mut line, &mut col);
            out.push(Token {
                tok: Tok::Str(s),
                line: tl,
                col: tc,
            });
            continue;
        }
        if c == ':' && chars.get(i + 1) == Some(&'=') {
            bump(&mut i, &mut line, &mut col);
            bump(&mut i, &mut line, &mut col);
            out.push(Token {
                tok: Tok::Walrus,
                line: tl,
                col: tc,
            });
            continue;
        }
        if c.is_ascii_punctuation() {
            bump(&mut i, &mut line, &mut col);
            out.push(Token {
                tok: Tok::Sym(c),
                line: tl,
                col: tc,
            });
            continue;
        }
        return Err(ParseError::new(
            origin,
            tl,
            tc,
            ParseErrorKind::Invalid(format!("unexpected character `{c}`")),
        ));
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

/// Token cursor shared by the program, annotation and term grammars.
pub struct Cursor<'a> {
    toks: Vec<Token>,
    pos: usize,
    pub origin: &'a str,
}

impl<'a> Cursor<'a> {
    pub fn new(src: &str, origin: &'a str) -> Result<Self, ParseError> {
        Ok(Cursor {
            toks: lex(src, origin)?,
            pos: 0,
            origin,
        })
    }

    pub fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    pub fn peek_at(&self, k: usize) -> &Tok {
        let i = (self.pos + k).min(self.toks.len() - 1);
        &self.toks[i].tok
    }

    pub fn here(&self) -> (u32, u32) {
        let t = &self.toks[self.pos];
        (t.line, t.col)
    }

    pub fn next(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_sym(&self, c: char) -> bool {
        *self.peek() == Tok::Sym(c)
    }

    pub fn at_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    pub fn eat_sym(&mut self, c: char) -> bool {
        if self.at_sym(c) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn eat_kw(&mut self, kw: &str) -> bool {
        if self.at_kw(kw) {
            self.next();
            true
        } else {
            false
        }
    }

    pub fn unexpected(&self, expected: &[&str]) -> ParseError {
        let (l, c) = self.here();
        ParseError::new(
            self.origin,
            l,
            c,
            ParseErrorKind::Unexpected {
                found: self.peek().describe(),
                expected: expected.iter().map(|s| s.to_string()).collect(),
            },
        )
    }

    pub fn error(&self, kind: ParseErrorKind) -> ParseError {
        let (l, c) = self.here();
        ParseError::new(self.origin, l, c, kind)
    }

    pub fn expect_sym(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat_sym(c) {
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{c}`")]))
        }
    }

    pub fn expect_kw(&mut self, kw: &str) -> Result<(), ParseError> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            Err(self.unexpected(&[&format!("`{kw}`")]))
        }
    }

    pub fn expect_walrus(&mut self) -> Result<(), ParseError> {
        if *self.peek() == Tok::Walrus {
            self.next();
            Ok(())
        } else {
            Err(self.unexpected(&["`:=`"]))
        }
    }

    /// An identifier that is not one of `reserved`.
    pub fn ident(&mut self, reserved: &[&str]) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Ident(s) if !reserved.contains(&s.as_str()) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => Err(self.unexpected(&["identifier"])),
        }
    }
}
