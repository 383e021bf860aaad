//! Arithmetic expressions for inline objectives.
//!
//! Grammar: `+ - * / ^`, unary minus, parentheses, numbers, constants `pi`
//! and `e`, functions `sin cos tan exp ln sqrt abs`, variables `x1..xn`,
//! `y1..ym` (plain `x` / `y` when the dimension is 1).

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Node {
    Num(f64),
    X(usize),
    Y(usize),
    Neg(Box<Node>),
    Bin(Op, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Abs,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expr {
    root: Node,
    source: String,
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn lex(s: &str) -> Result<Vec<Tok>> {
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    let mut out = Vec::new();
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_digit() || cs[i] == '.') {
                i += 1;
            }
            if i < cs.len() && (cs[i] == 'e' || cs[i] == 'E') {
                let save = i;
                i += 1;
                if i < cs.len() && (cs[i] == '+' || cs[i] == '-') {
                    i += 1;
                }
                if i < cs.len() && cs[i].is_ascii_digit() {
                    while i < cs.len() && cs[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let t: String = cs[st..i].iter().collect();
            out.push(Tok::Num(t.parse().map_err(|_| Error::Expr(format!("bad number `{t}`")))?));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let st = i;
            while i < cs.len() && (cs[i].is_ascii_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[st..i].iter().collect()));
        } else if "+-*/^()".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else {
            return Err(Error::Expr(format!("unexpected character `{c}` in `{s}`")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    n: usize,
    m: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Expr(format!("{msg} in `{}`", self.src))
    }

    fn peek_sym(&self, c: char) -> bool {
        matches!(self.toks.get(self.pos), Some(Tok::Sym(s)) if *s == c)
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek_sym(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.peek_sym('+') {
                Op::Add
            } else if self.peek_sym('-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.peek_sym('*') {
                Op::Mul
            } else if self.peek_sym('/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            self.pos += 1;
            lhs = Node::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.peek_sym('-') {
            self.pos += 1;
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.peek_sym('+') {
            self.pos += 1;
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.peek_sym('^') {
            self.pos += 1;
            let exp = self.unary()?;
            return Ok(Node::Bin(Op::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn var(&self, name: &str) -> Option<Node> {
        let (kind, rest) = name.split_at(1);
        let dim = match kind {
            "x" => self.n,
            "y" => self.m,
            _ => return None,
        };
        let idx = if rest.is_empty() {
            (dim == 1).then_some(0)?
        } else {
            let k: usize = rest.parse().ok()?;
            (1..=dim).contains(&k).then(|| k - 1)?
        };
        Some(if kind == "x" { Node::X(idx) } else { Node::Y(idx) })
    }

    fn atom(&mut self) -> Result<Node> {
        match self.toks.get(self.pos).cloned() {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(Node::Num(v))
            }
            Some(Tok::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                let func = match name.as_str() {
                    "sin" => Some(Func::Sin),
                    "cos" => Some(Func::Cos),
                    "tan" => Some(Func::Tan),
                    "exp" => Some(Func::Exp),
                    "ln" | "log" => Some(Func::Ln),
                    "sqrt" => Some(Func::Sqrt),
                    "abs" => Some(Func::Abs),
                    _ => None,
                };
                if let Some(f) = func {
                    self.expect('(')?;
                    let arg = self.expr()?;
                    self.expect(')')?;
                    return Ok(Node::Call(f, Box::new(arg)));
                }
                match name.as_str() {
                    "pi" => Ok(Node::Num(std::f64::consts::PI)),
                    "e" => Ok(Node::Num(std::f64::consts::E)),
                    _ => self.var(&name).ok_or_else(|| self.err(&format!("unknown identifier `{name}`"))),
                }
            }
            _ => Err(self.err("unexpected end of expression")),
        }
    }
}

impl Expr {
    /// Parses an expression over `n` parameter and `m` decision variables.
    pub fn parse(src: &str, n: usize, m: usize) -> Result<Self> {
        let toks = lex(src)?;
        let mut p = Parser { toks, pos: 0, n, m, src };
        let root = p.expr()?;
        if p.pos != p.toks.len() {
            return Err(p.err("trailing input"));
        }
        Ok(Expr { root, source: src.to_string() })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn eval(&self, x: &[f64], y: &[f64]) -> f64 {
        eval(&self.root, x, y)
    }
}

/// Evaluates a variable-free expression such as `"3*pi/2"`.
pub fn eval_const(src: &str) -> Result<f64> {
    Ok(Expr::parse(src, 0, 0)?.eval(&[], &[]))
}

fn eval(n: &Node, x: &[f64], y: &[f64]) -> f64 {
    match n {
        Node::Num(v) => *v,
        Node::X(i) => x[*i],
        Node::Y(i) => y[*i],
        Node::Neg(a) => -eval(a, x, y),
        Node::Bin(op, a, b) => {
            let (a, b) = (eval(a, x, y), eval(b, x, y));
            match op {
                Op::Add => a + b,
                Op::Sub => a - b,
                Op::Mul => a * b,
                Op::Div => a / b,
                Op::Pow => {
                    if b == b.trunc() && b.abs() <= 64.0 {
                        a.powi(b as i32)
                    } else {
                        a.powf(b)
                    }
                }
            }
        }
        Node::Call(f, a) => {
            let a = eval(a, x, y);
            match f {
                Func::Sin => a.sin(),
                Func::Cos => a.cos(),
                Func::Tan => a.tan(),
                Func::Exp => a.exp(),
                Func::Ln => a.ln(),
                Func::Sqrt => a.sqrt(),
                Func::Abs => a.abs(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn precedence_and_unary() {
        assert_eq!(eval_const("1 + 2 * 3").unwrap(), 7.0);
        assert_eq!(eval_const("-2^2").unwrap(), -4.0);
        assert_eq!(eval_const("2^-1").unwrap(), 0.5);
        assert_eq!(eval_const("2^3^2").unwrap(), 512.0);
        assert_eq!(eval_const("(1 - 4) / 2").unwrap(), -1.5);
        assert_eq!(eval_const("1.5e1").unwrap(), 15.0);
        assert_eq!(eval_const("3*pi/2").unwrap(), 1.5 * std::f64::consts::PI);
    }

    #[test]
    fn variables_and_functions() {
        let e = Expr::parse("(y1 + 1/4)^2 + y2^2", 1, 2).unwrap();
        assert_eq!(e.eval(&[1.0], &[-0.25, 1.0]), 1.0);
        let e = Expr::parse("sin(y) + x*cos(0)", 1, 1).unwrap();
        assert!((e.eval(&[2.0], &[std::f64::consts::FRAC_PI_2]) - 3.0).abs() < 1e-15);
        assert_eq!(Expr::parse("abs(x1 - x2)", 2, 0).unwrap().eval(&[1.0, 3.0], &[]), 2.0);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Expr::parse("y3", 1, 2).is_err());
        assert!(Expr::parse("x", 2, 1).is_err());
        assert!(Expr::parse("1 +", 0, 0).is_err());
        assert!(Expr::parse("foo(1)", 0, 0).is_err());
        assert!(Expr::parse("(1", 0, 0).is_err());
        assert!(Expr::parse("1 2", 0, 0).is_err());
        assert!(Expr::parse("1 # 2", 0, 0).is_err());
    }
}
