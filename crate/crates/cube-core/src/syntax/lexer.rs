//! Tokenizer for Cube and Prolog source. UTF-8 input, `%` comments to end
//! of line. An end-of-clause `.` must be followed by layout or end of
//! input; an infix pair `.` must not be.

use num_bigint::BigInt;

use super::SyntaxError;

#[derive(Debug, Clone, PartialEq)]
pub enum Tok {
    Atom(String),
    Var(String),
    Int(BigInt),
    /// Symbolic operator or punctuation, from the fixed token set.
    Punct(&'static str),
    /// `.` that terminates a clause.
    ClauseEnd,
    Eof,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pos {
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone)]
pub struct Sp {
    pub tok: Tok,
    pub pos: Pos,
}

const SYMBOLIC: &[&str] = &[
    "=:=", "=\\=", "-;", "->", "=<", ">=", "::", "..", "<-", "<>", ":-", ";", "=", "<", ">", "+",
    "-", "*", "//", ".",
];

fn is_symbol_char(c: char) -> bool {
    matches!(c, '+' | '-' | '*' | '/' | '\\' | '<' | '>' | '=' | ':' | ';' | '.')
}

pub struct Lexer<'a> {
    src: &'a [u8],
    i: usize,
    line: u32,
    col: u32,
}

impl<'a> Lexer<'a> {
    pub fn new(src: &'a str) -> Lexer<'a> {
        Lexer {
            src: src.as_bytes(),
            i: 0,
            line: 1,
            col: 1,
        }
    }

    fn pos(&self) -> Pos {
        Pos {
            line: self.line,
            col: self.col,
        }
    }

    fn peek(&self) -> Option<char> {
        if self.i < self.src.len() {
            Some(self.src[self.i] as char)
        } else {
            None
        }
    }

    fn peek2(&self) -> Option<char> {
        if self.i + 1 < self.src.len() {
            Some(self.src[self.i + 1] as char)
        } else {
            None
        }
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.i += 1;
        if c == '\n' {
            self.line += 1;
            self.col = 1;
        } else {
            self.col += 1;
        }
        Some(c)
    }

    fn skip_layout(&mut self) {
        loop {
            match self.peek() {
                Some(c) if c.is_ascii_whitespace() => {
                    self.bump();
                }
                Some('%') => {
                    while let Some(c) = self.bump() {
                        if c == '\n' {
                            break;
                        }
                    }
                }
                _ => return,
            }
        }
    }

    pub fn tokenize(mut self) -> Result<Vec<Sp>, SyntaxError> {
        let mut out = Vec::new();
        loop {
            self.skip_layout();
            let pos = self.pos();
            let Some(c) = self.peek() else {
                out.push(Sp { tok: Tok::Eof, pos });
                return Ok(out);
            };
            let tok = if c.is_ascii_digit() {
                let mut s = String::new();
                while let Some(d) = self.peek() {
                    if d.is_ascii_digit() {
                        s.push(d);
                        self.bump();
                    } else {
                        break;
                    }
                }
                Tok::Int(s.parse().expect("digit run"))
            } else if c.is_ascii_lowercase() {
                Tok::Atom(self.ident())
            } else if c.is_ascii_uppercase() || c == '_' {
                Tok::Var(self.ident())
            } else if c == '\'' {
                self.bump();
                let mut s = String::new();
                loop {
                    match self.bump() {
                        None => {
                            return Err(SyntaxError::new(pos, "unterminated quoted atom"));
                        }
                        Some('\'') => {
                            if self.peek() == Some('\'') {
                                self.bump();
                                s.push('\'');
                            } else {
                                break;
                            }
                        }
                        Some(ch) => s.push(ch),
                    }
                }
                Tok::Atom(s)
            } else if matches!(c, '(' | ')' | '[' | ']' | ',' | '|' | '!') {
                self.bump();
                let p = match c {
                    '(' => "(",
                    ')' => ")",
                    '[' => "[",
                    ']' => "]",
                    ',' => ",",
                    '|' => "|",
                    _ => "!",
                };
                Tok::Punct(p)
            } else if is_symbol_char(c) {
                // lone end-of-clause dot: followed by layout, comment or EOF
                if c == '.' {
                    let nxt = self.peek2();
                    if nxt.is_none() || nxt.map_or(false, |n| n.is_ascii_whitespace() || n == '%')
                    {
                        self.bump();
                        out.push(Sp {
                            tok: Tok::ClauseEnd,
                            pos,
                        });
                        continue;
                    }
                }
                let mut s = String::new();
                while let Some(d) = self.peek() {
                    if is_symbol_char(d) {
                        s.push(d);
                        self.bump();
                    } else {
                        break;
                    }
                }
                match SYMBOLIC.iter().find(|&&k| k == s) {
                    Some(&k) => Tok::Punct(k),
                    None => {
                        return Err(SyntaxError::new(pos, &format!("unknown operator `{}`", s)))
                    }
                }
            } else {
                return Err(SyntaxError::new(pos, &format!("unexpected character `{}`", c)));
            };
            out.push(Sp { tok, pos });
        }
    }

    fn ident(&mut self) -> String {
        let mut s = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                s.push(c);
                self.bump();
            } else {
                break;
            }
        }
        s
    }
}
