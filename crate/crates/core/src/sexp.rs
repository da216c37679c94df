//! Reader and printer for the command language: s-expressions plus
//! angle-bracketed structures `<tag key value ...>`.

use std::fmt;

use crate::error::Error;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Value {
    Sym(String),
    Str(String),
    List(Vec<Datum>),
    Struct { tag: String, items: Vec<Datum> },
}

/// A value with the position of its first character (1-based).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Datum {
    pub value: Value,
    pub line: usize,
    pub column: usize,
}

impl Datum {
    pub fn sym(s: &str) -> Self {
        Self::at(Value::Sym(s.to_string()), 0, 0)
    }

    pub fn string(s: &str) -> Self {
        Self::at(Value::Str(s.to_string()), 0, 0)
    }

    pub fn list(items: Vec<Datum>) -> Self {
        Self::at(Value::List(items), 0, 0)
    }

    pub fn structure(tag: &str, items: Vec<Datum>) -> Self {
        Self::at(
            Value::Struct {
                tag: tag.to_string(),
                items,
            },
            0,
            0,
        )
    }

    fn at(value: Value, line: usize, column: usize) -> Self {
        Datum { value, line, column }
    }

    pub fn as_sym(&self) -> Option<&str> {
        match &self.value {
            Value::Sym(s) => Some(s),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match &self.value {
            Value::Str(s) => Some(s),
            _ => None,
        }
    }

    /// A symbol or a string.
    pub fn as_text(&self) -> Option<&str> {
        self.as_sym().or_else(|| self.as_str())
    }

    pub fn as_list(&self) -> Option<&[Datum]> {
        match &self.value {
            Value::List(items) => Some(items),
            _ => None,
        }
    }

    pub fn as_struct(&self) -> Option<(&str, &[Datum])> {
        match &self.value {
            Value::Struct { tag, items } => Some((tag, items)),
            _ => None,
        }
    }

    /// A syntax error located at this datum.
    pub fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }
}

impl fmt::Display for Datum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.value {
            Value::Sym(s) => f.write_str(s),
            Value::Str(s) => f.write_str(&crate::trace::quote(s)),
            Value::List(items) => {
                f.write_str("(")?;
                write_items(f, items)?;
                f.write_str(")")
            }
            Value::Struct { tag, items } => {
                write!(f, "<{tag}")?;
                if !items.is_empty() {
                    f.write_str(" ")?;
                }
                write_items(f, items)?;
                f.write_str(">")
            }
        }
    }
}

fn write_items(f: &mut fmt::Formatter<'_>, items: &[Datum]) -> fmt::Result {
    for (i, d) in items.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "{d}")?;
    }
    Ok(())
}

struct Reader<'a> {
    chars: std::iter::Peekable<std::str::Chars<'a>>,
    line: usize,
    column: usize,
}

fn is_delimiter(c: char) -> bool {
    c.is_whitespace() || matches!(c, '(' | ')' | '<' | '>' | '"' | ';')
}

impl<'a> Reader<'a> {
    fn new(src: &'a str) -> Self {
        Reader {
            chars: src.chars().peekable(),
            line: 1,
            column: 1,
        }
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Syntax {
            line: self.line,
            column: self.column,
            message: message.into(),
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.chars.next()?;
        if c == '\n' {
            self.line += 1;
            self.column = 1;
        } else {
            self.column += 1;
        }
        Some(c)
    }

    fn skip_blank(&mut self) {
        while let Some(&c) = self.chars.peek() {
            if c == ';' {
                while self.chars.peek().is_some_and(|&c| c != '\n') {
                    self.bump();
                }
            } else if c.is_whitespace() {
                self.bump();
            } else {
                break;
            }
        }
    }

    fn read(&mut self) -> Result<Option<Datum>, Error> {
        self.skip_blank();
        let (line, column) = (self.line, self.column);
        let Some(&c) = self.chars.peek() else {
            return Ok(None);
        };
        let value = match c {
            '(' => {
                self.bump();
                Value::List(self.read_until(')')?)
            }
            '<' => {
                self.bump();
                let tag = match self.read()? {
                    Some(Datum {
                        value: Value::Sym(s), ..
                    }) => s,
                    _ => {
                        return Err(Error::Syntax {
                            line,
                            column,
                            message: "structure needs a tag".into(),
                        })
                    }
                };
                Value::Struct {
                    tag,
                    items: self.read_until('>')?,
                }
            }
            ')' | '>' => return Err(self.error(format!("unexpected `{c}`"))),
            '"' => {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => {
                            return Err(Error::Syntax {
                                line,
                                column,
                                message: "unterminated string".into(),
                            })
                        }
                        Some('"') => break,
                        Some('\\') => match self.bump() {
                            Some(e) => s.push(e),
                            None => return Err(self.error("unterminated string")),
                        },
                        Some(c) => s.push(c),
                    }
                }
                Value::Str(s)
            }
            _ => {
                let mut s = String::new();
                while let Some(&c) = self.chars.peek() {
                    if is_delimiter(c) {
                        break;
                    }
                    s.push(c);
                    self.bump();
                }
                Value::Sym(s)
            }
        };
        Ok(Some(Datum { value, line, column }))
    }

    fn read_until(&mut self, close: char) -> Result<Vec<Datum>, Error> {
        let mut items = Vec::new();
        loop {
            self.skip_blank();
            match self.chars.peek() {
                None => return Err(self.error(format!("missing `{close}`"))),
                Some(&c) if c == close => {
                    self.bump();
                    return Ok(items);
                }
                Some(_) => items.push(self.read()?.expect("input is not exhausted")),
            }
        }
    }
}

/// Reads every top-level datum in `src`.
pub fn read_all(src: &str) -> Result<Vec<Datum>, Error> {
    let mut reader = Reader::new(src);
    let mut out = Vec::new();
    while let Some(d) = reader.read()? {
        out.push(d);
    }
    Ok(out)
}

/// Reads exactly one datum.
pub fn read_one(src: &str) -> Result<Datum, Error> {
    let mut all = read_all(src)?;
    match all.len() {
        1 => Ok(all.remove(0)),
        0 => Err(Error::Syntax {
            line: 1,
            column: 1,
            message: "expected an expression".into(),
        }),
        _ => Err(all[1].error("expected a single expression")),
    }
}
