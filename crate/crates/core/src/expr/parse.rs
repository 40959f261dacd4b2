//! Tokenizer and Pratt parser for profile expressions.

use super::{BinOp, Expr, Func};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Eof,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => Some(Tok::Plus),
            b'-' => Some(Tok::Minus),
            b'*' => Some(Tok::Star),
            b'/' => Some(Tok::Slash),
            b'^' => Some(Tok::Caret),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, offset: start });
            i += 1;
            continue;
        }
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let lit = &text[start..i];
            let value: f64 = lit.parse().map_err(|_| Error::Syntax {
                offset: start,
                message: format!("malformed number `{lit}`"),
            })?;
            if !value.is_finite() {
                return Err(Error::Syntax {
                    offset: start,
                    message: format!("number `{lit}` out of range"),
                });
            }
            out.push(Token {
                tok: Tok::Num(value),
                offset: start,
            });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(text[start..i].to_string()),
                offset: start,
            });
            continue;
        }
        let ch = text[start..].chars().next().unwrap_or('?');
        return Err(Error::Syntax {
            offset: start,
            message: format!("unexpected character `{ch}`"),
        });
    }
    out.push(Token {
        tok: Tok::Eof,
        offset: text.len(),
    });
    Ok(out)
}

// Binding powers: + - < * / < unary minus < ^ (right associative).
const UNARY_BP: u8 = 5;

fn infix_bp(tok: &Tok) -> Option<(u8, u8)> {
    match tok {
        Tok::Plus | Tok::Minus => Some((1, 2)),
        Tok::Star | Tok::Slash => Some((3, 4)),
        Tok::Caret => Some((8, 7)),
        _ => None,
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect_rparen(&mut self) -> Result<()> {
        let t = self.next();
        if t.tok == Tok::RParen {
            Ok(())
        } else {
            Err(Error::Syntax {
                offset: t.offset,
                message: "expected `)`".into(),
            })
        }
    }

    fn expr(&mut self, min_bp: u8) -> Result<Expr> {
        let mut lhs = self.prefix()?;
        loop {
            let t = self.peek().clone();
            let Some((lbp, rbp)) = infix_bp(&t.tok) else {
                match t.tok {
                    Tok::Eof | Tok::RParen => break,
                    _ => {
                        return Err(Error::Syntax {
                            offset: t.offset,
                            message: "expected an operator".into(),
                        })
                    }
                }
            };
            if lbp < min_bp {
                break;
            }
            self.next();
            let rhs = self.expr(rbp)?;
            lhs = match t.tok {
                Tok::Plus => Expr::Binary(BinOp::Add, Box::new(lhs), Box::new(rhs)),
                Tok::Minus => Expr::Binary(BinOp::Sub, Box::new(lhs), Box::new(rhs)),
                Tok::Star => Expr::Binary(BinOp::Mul, Box::new(lhs), Box::new(rhs)),
                Tok::Slash => Expr::Binary(BinOp::Div, Box::new(lhs), Box::new(rhs)),
                Tok::Caret => Expr::Pow(Box::new(lhs), Box::new(rhs)),
                _ => unreachable!(),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr> {
        let t = self.next();
        match t.tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::Minus => Ok(Expr::Neg(Box::new(self.expr(UNARY_BP)?))),
            Tok::LParen => {
                let inner = self.expr(0)?;
                self.expect_rparen()?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "x" => return Ok(Expr::Var),
                    "exp" => Func::Exp,
                    "log" => Func::Log,
                    "sqrt" => Func::Sqrt,
                    _ => {
                        return Err(Error::UnknownIdentifier {
                            offset: t.offset,
                            name,
                        })
                    }
                };
                let open = self.next();
                if open.tok != Tok::LParen {
                    return Err(Error::Syntax {
                        offset: open.offset,
                        message: format!("expected `(` after `{name}`"),
                    });
                }
                let arg = self.expr(0)?;
                self.expect_rparen()?;
                Ok(Expr::Call(func, Box::new(arg)))
            }
            Tok::Eof => Err(Error::Syntax {
                offset: t.offset,
                message: "unexpected end of input".into(),
            }),
            _ => Err(Error::Syntax {
                offset: t.offset,
                message: "expected an operand".into(),
            }),
        }
    }
}

pub(super) fn parse_expr(text: &str) -> Result<Expr> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens, pos: 0 };
    let e = p.expr(0)?;
    let t = p.peek();
    if t.tok != Tok::Eof {
        return Err(Error::Syntax {
            offset: t.offset,
            message: "unmatched `)`".into(),
        });
    }
    Ok(e)
}
