//! A small arithmetic expression language for user-supplied mappings and
//! mixing densities.
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := unary (('*' | '/') unary)*
//! unary := '-' unary | power
//! power := atom ('^' unary)?
//! atom  := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Functions: `exp`, `ln`, `sqrt`, `cosh`, `acosh`, `sinh`, `asinh`, `expm1`,
//! `ln1p`, `abs`, `pow(x, y)`, `min(x, y)`, `max(x, y)`.
//! Constants: `pi`, `e`, `inf`.

use std::fmt;

use crate::error::{input, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Exp,
    Ln,
    Sqrt,
    Cosh,
    Acosh,
    Sinh,
    Asinh,
    Expm1,
    Ln1p,
    Abs,
    Pow,
    Min,
    Max,
}

impl Func {
    fn lookup(name: &str) -> Option<(Func, usize)> {
        Some(match name {
            "exp" => (Func::Exp, 1),
            "ln" => (Func::Ln, 1),
            "sqrt" => (Func::Sqrt, 1),
            "cosh" => (Func::Cosh, 1),
            "acosh" => (Func::Acosh, 1),
            "sinh" => (Func::Sinh, 1),
            "asinh" => (Func::Asinh, 1),
            "expm1" => (Func::Expm1, 1),
            "ln1p" => (Func::Ln1p, 1),
            "abs" => (Func::Abs, 1),
            "pow" => (Func::Pow, 2),
            "min" => (Func::Min, 2),
            "max" => (Func::Max, 2),
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(String),
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// A parsed expression. Evaluation looks variables up by name.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    root: Node,
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.source)
    }
}

impl std::str::FromStr for Expr {
    type Err = crate::Error;
    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '0'..='9' | '.' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                // exponent part
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
                let v: f64 = text
                    .parse()
                    .map_err(|_| input!("bad number `{text}` in `{src}`"))?;
                out.push(Tok::Num(v));
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(chars[start..i].iter().collect()));
            }
            '+' | '*' | '/' | '^' | '-' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            '−' => {
                out.push(Tok::Op('-'));
                i += 1;
            }
            '×' => {
                out.push(Tok::Op('*'));
                i += 1;
            }
            '÷' => {
                out.push(Tok::Op('/'));
                i += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                i += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                i += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                i += 1;
            }
            other => return Err(input!("unexpected character `{other}` in `{src}`")),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        match self.next() {
            Some(t) if t == want => Ok(()),
            other => Err(input!("expected {want:?}, found {other:?} in `{}`", self.src)),
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        while let Some(Tok::Op(op @ ('+' | '-'))) = self.peek().cloned() {
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
        while let Some(Tok::Op(op @ ('*' | '/'))) = self.peek().cloned() {
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
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if let Some(Tok::Op('+')) = self.peek() {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.next() {
            Some(Tok::Num(v)) => Ok(Node::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if let Some(Tok::LParen) = self.peek() {
                    self.pos += 1;
                    let (func, arity) = Func::lookup(&name)
                        .ok_or_else(|| input!("unknown function `{name}` in `{}`", self.src))?;
                    let mut args = vec![self.expr()?];
                    while let Some(Tok::Comma) = self.peek() {
                        self.pos += 1;
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    if args.len() != arity {
                        return Err(input!(
                            "`{name}` takes {arity} argument(s), got {} in `{}`",
                            args.len(),
                            self.src
                        ));
                    }
                    return Ok(Node::Call(func, args));
                }
                Ok(match name.as_str() {
                    "pi" => Node::Num(std::f64::consts::PI),
                    "e" => Node::Num(std::f64::consts::E),
                    "inf" => Node::Num(f64::INFINITY),
                    _ => Node::Var(name),
                })
            }
            other => Err(input!("unexpected token {other:?} in `{}`", self.src)),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self> {
        let toks = tokenize(src)?;
        if toks.is_empty() {
            return Err(input!("empty expression"));
        }
        let mut p = Parser { toks, pos: 0, src };
        let root = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(input!("trailing input in `{src}`"));
        }
        Ok(Expr {
            source: src.trim().to_string(),
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Names of all free variables, sorted and deduplicated.
    pub fn variables(&self) -> Vec<String> {
        fn walk(n: &Node, out: &mut Vec<String>) {
            match n {
                Node::Num(_) => {}
                Node::Var(v) => out.push(v.clone()),
                Node::Neg(a) => walk(a, out),
                Node::Add(a, b)
                | Node::Sub(a, b)
                | Node::Mul(a, b)
                | Node::Div(a, b)
                | Node::Pow(a, b) => {
                    walk(a, out);
                    walk(b, out);
                }
                Node::Call(_, args) => args.iter().for_each(|a| walk(a, out)),
            }
        }
        let mut out = Vec::new();
        walk(&self.root, &mut out);
        out.sort();
        out.dedup();
        out
    }

    /// Evaluates with variables resolved through `lookup`.
    pub fn eval_with<F: Fn(&str) -> Option<f64>>(&self, lookup: &F) -> Result<f64> {
        eval(&self.root, lookup)
    }

    /// Evaluates against a list of `(name, value)` bindings.
    pub fn eval(&self, vars: &[(&str, f64)]) -> Result<f64> {
        self.eval_with(&|name: &str| vars.iter().find(|(n, _)| *n == name).map(|(_, v)| *v))
    }
}

fn eval<F: Fn(&str) -> Option<f64>>(n: &Node, lookup: &F) -> Result<f64> {
    Ok(match n {
        Node::Num(v) => *v,
        Node::Var(name) => lookup(name).ok_or_else(|| input!("unbound variable `{name}`"))?,
        Node::Neg(a) => -eval(a, lookup)?,
        Node::Add(a, b) => eval(a, lookup)? + eval(b, lookup)?,
        Node::Sub(a, b) => eval(a, lookup)? - eval(b, lookup)?,
        Node::Mul(a, b) => eval(a, lookup)? * eval(b, lookup)?,
        Node::Div(a, b) => eval(a, lookup)? / eval(b, lookup)?,
        Node::Pow(a, b) => pow(eval(a, lookup)?, eval(b, lookup)?),
        Node::Call(f, args) => {
            let x = eval(&args[0], lookup)?;
            match f {
                Func::Exp => x.exp(),
                Func::Ln => x.ln(),
                Func::Sqrt => x.sqrt(),
                Func::Cosh => x.cosh(),
                Func::Acosh => x.acosh(),
                Func::Sinh => x.sinh(),
                Func::Asinh => x.asinh(),
                Func::Expm1 => x.exp_m1(),
                Func::Ln1p => x.ln_1p(),
                Func::Abs => x.abs(),
                Func::Pow => pow(x, eval(&args[1], lookup)?),
                Func::Min => x.min(eval(&args[1], lookup)?),
                Func::Max => x.max(eval(&args[1], lookup)?),
            }
        }
    })
}

fn pow(x: f64, y: f64) -> f64 {
    if y == y.trunc() && y.abs() <= 64.0 {
        x.powi(y as i32)
    } else {
        x.powf(y)
    }
}
