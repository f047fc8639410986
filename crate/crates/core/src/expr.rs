//! Minimal arithmetic expressions for user-supplied family specs.
//!
//! Grammar (`^` binds tighter than unary minus and is right associative):
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | ident | ident '(' expr ')' | '(' expr ')'
//! ```
//!
//! Functions: `exp`, `ln`, `sqrt`. Constants: `pi`. Every other identifier must
//! be one of the variables declared when parsing.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Const(f64),
    Var(usize),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
}

/// A parsed expression over a fixed list of variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    root: Node,
    arity: usize,
}

impl Expr {
    /// Parses `src`; identifiers are resolved against `vars` by position.
    pub fn parse(src: &str, vars: &[&str]) -> Result<Self> {
        let tokens = lex(src)?;
        let mut p = Parser {
            tokens,
            pos: 0,
            vars,
            end_column: src.chars().count() + 1,
        };
        let root = p.expr()?;
        if let Some(tok) = p.tokens.get(p.pos) {
            return Err(Error::Parse {
                column: tok.column,
                message: format!("unexpected {}", tok.kind.describe()),
            });
        }
        Ok(Self {
            root,
            arity: vars.len(),
        })
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// Evaluates with `values[i]` bound to the i-th declared variable.
    pub fn eval(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.arity);
        eval(&self.root, values)
    }
}

fn eval(node: &Node, v: &[f64]) -> f64 {
    match node {
        Node::Const(c) => *c,
        Node::Var(i) => v[*i],
        Node::Neg(a) => -eval(a, v),
        Node::Add(a, b) => eval(a, v) + eval(b, v),
        Node::Sub(a, b) => eval(a, v) - eval(b, v),
        Node::Mul(a, b) => eval(a, v) * eval(b, v),
        Node::Div(a, b) => eval(a, v) / eval(b, v),
        Node::Pow(a, b) => {
            let base = eval(a, v);
            let exp = eval(b, v);
            if exp.fract() == 0.0 && exp.abs() < 1024.0 {
                base.powi(exp as i32)
            } else {
                base.powf(exp)
            }
        }
        Node::Call(f, a) => {
            let x = eval(a, v);
            match f {
                Func::Exp => x.exp(),
                Func::Ln => x.ln(),
                Func::Sqrt => x.sqrt(),
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum TokenKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

impl TokenKind {
    fn describe(&self) -> String {
        match self {
            TokenKind::Num(x) => format!("number {x}"),
            TokenKind::Ident(s) => format!("identifier '{s}'"),
            TokenKind::Op(c) => format!("'{c}'"),
            TokenKind::LParen => "'('".into(),
            TokenKind::RParen => "')'".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokenKind,
    column: usize,
}

fn lex(src: &str) -> Result<Vec<Token>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let value = text.parse::<f64>().map_err(|_| Error::Parse {
                column,
                message: format!("malformed number '{text}'"),
            })?;
            out.push(Token {
                kind: TokenKind::Num(value),
                column,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                kind: TokenKind::Ident(chars[start..i].iter().collect()),
                column,
            });
        } else {
            let kind = match c {
                '+' | '-' | '*' | '/' | '^' => TokenKind::Op(c),
                '(' => TokenKind::LParen,
                ')' => TokenKind::RParen,
                _ => {
                    return Err(Error::Parse {
                        column,
                        message: format!("unexpected character '{c}'"),
                    })
                }
            };
            out.push(Token { kind, column });
            i += 1;
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Token>,
    pos: usize,
    vars: &'a [&'a str],
    end_column: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |t| t.column)
    }

    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Parse {
            column: self.column(),
            message: message.into(),
        })
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(TokenKind::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                Node::Add(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(TokenKind::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                Node::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                Node::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if let Some(TokenKind::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if let Some(TokenKind::Op('+')) = self.peek() {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(TokenKind::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        let Some(kind) = self.peek().cloned() else {
            return self.err("unexpected end of expression");
        };
        match kind {
            TokenKind::Num(x) => {
                self.pos += 1;
                Ok(Node::Const(x))
            }
            TokenKind::LParen => {
                self.pos += 1;
                let inner = self.expr()?;
                self.expect_rparen()?;
                Ok(inner)
            }
            TokenKind::Ident(name) => {
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "ln" => Some(Func::Ln),
                    "sqrt" => Some(Func::Sqrt),
                    _ => None,
                };
                if let Some(func) = func {
                    self.pos += 1;
                    if self.peek() != Some(&TokenKind::LParen) {
                        return self.err(format!("expected '(' after '{name}'"));
                    }
                    self.pos += 1;
                    let arg = self.expr()?;
                    self.expect_rparen()?;
                    return Ok(Node::Call(func, Box::new(arg)));
                }
                if name == "pi" {
                    self.pos += 1;
                    return Ok(Node::Const(std::f64::consts::PI));
                }
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => {
                        self.pos += 1;
                        Ok(Node::Var(i))
                    }
                    None => self.err(format!("unknown identifier '{name}'")),
                }
            }
            other => self.err(format!("unexpected {}", other.describe())),
        }
    }

    fn expect_rparen(&mut self) -> Result<()> {
        if self.peek() == Some(&TokenKind::RParen) {
            self.pos += 1;
            Ok(())
        } else {
            self.err("expected ')'")
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval1(src: &str, x: f64) -> f64 {
        Expr::parse(src, &["x"]).unwrap().eval(&[x])
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval1("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(eval1("-x^2", 3.0), -9.0);
        assert_eq!(eval1("2^3^2", 0.0), 512.0);
        assert_eq!(eval1("(1 + 2) * 3", 0.0), 9.0);
        assert_eq!(eval1("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(eval1("2 - 3 - 4", 0.0), -5.0);
        assert_eq!(eval1("x^-1", 4.0), 0.25);
    }

    #[test]
    fn functions_and_constants() {
        assert!((eval1("ln(exp(x))", 1.25) - 1.25).abs() < 1e-15);
        assert!((eval1("sqrt(2*pi)", 0.0) - (2.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert_eq!(eval1("1.5e2 + x", 1.0), 151.0);
    }

    #[test]
    fn binomial_log_partition() {
        let e = Expr::parse("2*ln(1+exp(theta1))", &["theta1"]).unwrap();
        assert!((e.eval(&[0.0]) - 2.0 * 2f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn errors_carry_column() {
        match Expr::parse("1 + * 2", &["x"]) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 5),
            other => panic!("{other:?}"),
        }
        match Expr::parse("x + y", &["x"]) {
            Err(Error::Parse { column, message }) => {
                assert_eq!(column, 5);
                assert!(message.contains("'y'"));
            }
            other => panic!("{other:?}"),
        }
        match Expr::parse("exp(x", &["x"]) {
            Err(Error::Parse { column, .. }) => assert_eq!(column, 6),
            other => panic!("{other:?}"),
        }
        assert!(matches!(Expr::parse("2 $ 3", &[]), Err(Error::Parse { column: 3, .. })));
        assert!(matches!(Expr::parse("(1))", &[]), Err(Error::Parse { column: 4, .. })));
    }
}
