//! Tiny arithmetic expressions over the entry indices i and j.
//!
//! Grammar: comparisons (returning 0/1 as masks) over +, -, *, /, ^ with
//! unary minus, parentheses, and a fixed function set. Deterministic and
//! side-effect free, so entries can be generated lazily anywhere.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct ExprGen {
    src: String,
    ast: Node,
}

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    VarI,
    VarJ,
    Neg(Box<Node>),
    Bin(BinOp, Box<Node>, Box<Node>),
    Cmp(CmpOp, Box<Node>, Box<Node>),
    Call1(Fn1, Box<Node>),
    Call2(Fn2, Box<Node>, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum CmpOp {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Fn1 {
    Abs,
    Sqrt,
    Exp,
    Ln,
    Floor,
    Ceil,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Fn2 {
    Min,
    Max,
    Pow,
}

impl ExprGen {
    pub fn parse(src: &str) -> Result<Self> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0, src };
        let ast = p.comparison()?;
        if p.pos != p.tokens.len() {
            return Err(p.err("trailing input"));
        }
        Ok(ExprGen { src: src.to_string(), ast })
    }

    pub fn source(&self) -> &str {
        &self.src
    }

    pub fn eval(&self, i: usize, j: usize) -> f64 {
        eval_node(&self.ast, i as f64, j as f64)
    }
}

fn eval_node(n: &Node, i: f64, j: f64) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::VarI => i,
        Node::VarJ => j,
        Node::Neg(x) => -eval_node(x, i, j),
        Node::Bin(op, a, b) => {
            let (x, y) = (eval_node(a, i, j), eval_node(b, i, j));
            match op {
                BinOp::Add => x + y,
                BinOp::Sub => x - y,
                BinOp::Mul => x * y,
                BinOp::Div => x / y,
                BinOp::Pow => x.powf(y),
            }
        }
        Node::Cmp(op, a, b) => {
            let (x, y) = (eval_node(a, i, j), eval_node(b, i, j));
            let t = match op {
                CmpOp::Le => x <= y,
                CmpOp::Lt => x < y,
                CmpOp::Ge => x >= y,
                CmpOp::Gt => x > y,
                CmpOp::Eq => x == y,
            };
            if t {
                1.0
            } else {
                0.0
            }
        }
        Node::Call1(f, a) => {
            let x = eval_node(a, i, j);
            match f {
                Fn1::Abs => x.abs(),
                Fn1::Sqrt => x.sqrt(),
                Fn1::Exp => x.exp(),
                Fn1::Ln => x.ln(),
                Fn1::Floor => x.floor(),
                Fn1::Ceil => x.ceil(),
            }
        }
        Node::Call2(f, a, b) => {
            let (x, y) = (eval_node(a, i, j), eval_node(b, i, j));
            match f {
                Fn2::Min => x.min(y),
                Fn2::Max => x.max(y),
                Fn2::Pow => x.powf(y),
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    Cmp(CmpOp),
    LParen,
    RParen,
    Comma,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut k = 0;
    while k < bytes.len() {
        let c = bytes[k];
        match c {
            ' ' | '\t' | '\n' | '\r' => k += 1,
            '0'..='9' | '.' => {
                let start = k;
                while k < bytes.len() && (bytes[k].is_ascii_digit() || bytes[k] == '.') {
                    k += 1;
                }
                // Exponent suffix like 1e-3.
                if k < bytes.len() && (bytes[k] == 'e' || bytes[k] == 'E') {
                    let mut k2 = k + 1;
                    if k2 < bytes.len() && (bytes[k2] == '+' || bytes[k2] == '-') {
                        k2 += 1;
                    }
                    if k2 < bytes.len() && bytes[k2].is_ascii_digit() {
                        k = k2;
                        while k < bytes.len() && bytes[k].is_ascii_digit() {
                            k += 1;
                        }
                    }
                }
                let text: String = bytes[start..k].iter().collect();
                let v = text
                    .parse::<f64>()
                    .map_err(|_| Error::InvalidMatrix(format!("bad number {text:?} in expr")))?;
                out.push(Tok::Num(v));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = k;
                while k < bytes.len() && (bytes[k].is_ascii_alphanumeric() || bytes[k] == '_') {
                    k += 1;
                }
                out.push(Tok::Ident(bytes[start..k].iter().collect()));
            }
            '+' | '-' | '*' | '/' | '^' => {
                out.push(Tok::Op(c));
                k += 1;
            }
            '(' => {
                out.push(Tok::LParen);
                k += 1;
            }
            ')' => {
                out.push(Tok::RParen);
                k += 1;
            }
            ',' => {
                out.push(Tok::Comma);
                k += 1;
            }
            '<' | '>' | '=' => {
                let two = k + 1 < bytes.len() && bytes[k + 1] == '=';
                let op = match (c, two) {
                    ('<', true) => CmpOp::Le,
                    ('<', false) => CmpOp::Lt,
                    ('>', true) => CmpOp::Ge,
                    ('>', false) => CmpOp::Gt,
                    ('=', true) => CmpOp::Eq,
                    _ => return Err(Error::InvalidMatrix("single '=' in expr".into())),
                };
                out.push(Tok::Cmp(op));
                k += if two { 2 } else { 1 };
            }
            _ => return Err(Error::InvalidMatrix(format!("unexpected character {c:?} in expr"))),
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::InvalidMatrix(format!("expr {:?}: {msg}", self.src))
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn comparison(&mut self) -> Result<Node> {
        let lhs = self.additive()?;
        if let Some(Tok::Cmp(op)) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.additive()?;
            return Ok(Node::Cmp(op, Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn additive(&mut self) -> Result<Node> {
        let mut lhs = self.multiplicative()?;
        while let Some(Tok::Op(c @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.multiplicative()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn multiplicative(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        while let Some(Tok::Op(c @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node> {
        if let Some(Tok::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let exp = self.unary()?; // right-associative
            return Ok(Node::Bin(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node> {
        match self.peek().cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.comparison()?;
                match self.peek() {
                    Some(Tok::RParen) => {
                        self.pos += 1;
                        Ok(inner)
                    }
                    _ => Err(self.err("missing ')'")),
                }
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                match name.as_str() {
                    "i" => Ok(Node::VarI),
                    "j" => Ok(Node::VarJ),
                    _ => {
                        if !matches!(self.peek(), Some(Tok::LParen)) {
                            return Err(self.err(&format!("unknown identifier {name:?}")));
                        }
                        self.pos += 1;
                        let first = self.comparison()?;
                        let second = if matches!(self.peek(), Some(Tok::Comma)) {
                            self.pos += 1;
                            Some(self.comparison()?)
                        } else {
                            None
                        };
                        if !matches!(self.peek(), Some(Tok::RParen)) {
                            return Err(self.err("missing ')' after arguments"));
                        }
                        self.pos += 1;
                        match (name.as_str(), second) {
                            ("abs", None) => Ok(Node::Call1(Fn1::Abs, Box::new(first))),
                            ("sqrt", None) => Ok(Node::Call1(Fn1::Sqrt, Box::new(first))),
                            ("exp", None) => Ok(Node::Call1(Fn1::Exp, Box::new(first))),
                            ("ln", None) => Ok(Node::Call1(Fn1::Ln, Box::new(first))),
                            ("floor", None) => Ok(Node::Call1(Fn1::Floor, Box::new(first))),
                            ("ceil", None) => Ok(Node::Call1(Fn1::Ceil, Box::new(first))),
                            ("min", Some(s)) => {
                                Ok(Node::Call2(Fn2::Min, Box::new(first), Box::new(s)))
                            }
                            ("max", Some(s)) => {
                                Ok(Node::Call2(Fn2::Max, Box::new(first), Box::new(s)))
                            }
                            ("pow", Some(s)) => {
                                Ok(Node::Call2(Fn2::Pow, Box::new(first), Box::new(s)))
                            }
                            _ => Err(self.err(&format!("unknown function {name:?}"))),
                        }
                    }
                }
            }
            _ => Err(self.err("expected a value")),
        }
    }
}
