use crate::rational::Rational;

use super::{DslError, DslResult, ErrorKind};

/// A value with its 1-based source position.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Spanned<T> {
    pub v: T,
    pub line: usize,
    pub col: usize,
}

impl<T> Spanned<T> {
    pub fn err(&self, kind: ErrorKind, message: impl Into<String>) -> DslError {
        DslError::new(self.line, self.col, kind, message)
    }
}

pub fn is_ident_char(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_'
}

/// Character cursor over one line (or one expression).
pub struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    pub fn new(text: &'a str, line: usize) -> Cursor<'a> {
        Cursor { text, pos: 0, line }
    }

    pub fn col(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    pub fn error(&self, kind: ErrorKind, message: impl Into<String>) -> DslError {
        DslError::new(self.line, self.col(), kind, message)
    }

    fn syntax(&self, message: impl Into<String>) -> DslError {
        self.error(ErrorKind::Syntax, message)
    }

    pub fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    /// Next non-space character.
    pub fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    pub fn at_end(&mut self) -> bool {
        self.peek().is_none()
    }

    pub fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    pub fn eat_str(&mut self, s: &str) -> bool {
        self.skip_ws();
        if self.text[self.pos..].starts_with(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    pub fn expect(&mut self, c: char) -> DslResult<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.syntax(match self.peek_raw() {
                Some(found) => format!("expected `{c}`, found `{found}`"),
                None => format!("expected `{c}`, found end of line"),
            }))
        }
    }

    pub fn expect_end(&mut self) -> DslResult<()> {
        match self.peek() {
            None => Ok(()),
            Some(c) => Err(self.syntax(format!("unexpected `{c}`"))),
        }
    }

    pub fn ident(&mut self) -> DslResult<Spanned<String>> {
        self.skip_ws();
        let (line, col, start) = (self.line, self.col(), self.pos);
        while let Some(c) = self.peek_raw() {
            if is_ident_char(c) {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        if self.pos == start {
            return Err(self.syntax(match self.peek_raw() {
                Some(c) => format!("expected a name, found `{c}`"),
                None => "expected a name, found end of line".to_string(),
            }));
        }
        Ok(Spanned {
            v: self.text[start..self.pos].to_string(),
            line,
            col,
        })
    }

    /// `{a b c}`; commas are accepted as separators.
    pub fn set(&mut self) -> DslResult<Spanned<Vec<Spanned<String>>>> {
        self.skip_ws();
        let (line, col) = (self.line, self.col());
        self.expect('{')?;
        let mut items = Vec::new();
        loop {
            if self.eat('}') {
                break;
            }
            if !items.is_empty() {
                self.eat(',');
            }
            if self.peek().is_none() {
                return Err(self.syntax("unterminated set; expected `}`"));
            }
            items.push(self.ident()?);
        }
        Ok(Spanned { v: items, line, col })
    }

    /// An integer or `p/q`, with the position of its first character.
    pub fn rational(&mut self) -> DslResult<Spanned<Rational>> {
        self.skip_ws();
        let (line, col, start) = (self.line, self.col(), self.pos);
        while let Some(c) = self.peek_raw() {
            if c.is_ascii_digit() || c == '/' || c == '-' || c == '.' || c == '+' || c == 'e' || c == 'E' {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
        let lit = &self.text[start..self.pos];
        if lit.is_empty() {
            return Err(self.syntax("expected a rational `p/q` or an integer"));
        }
        let v = lit
            .parse::<Rational>()
            .map_err(|e| DslError::new(line, col, ErrorKind::Syntax, e.to_string()))?;
        Ok(Spanned { v, line, col })
    }
}
