//! Expression grammar for custom sublevel domains `{rho < 0}`.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?
//! atom   := number | variable | func '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! Variables are `xk`, `yk` (real and imaginary part of `z_k`), `rk`
//! (`|z_k|`) for `k = 1..d`, and `nz` (the Euclidean norm of `z`). Functions
//! are `exp`, `log`, `sqrt`, `abs` and the variadic `min`, `max`.

use crate::error::{Error, Result};
use crate::geom::{norm, C64};

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Re(usize),
    Im(usize),
    Modulus(usize),
    Norm,
    Neg(Box<Node>),
    Add(Box<Node>, Box<Node>),
    Sub(Box<Node>, Box<Node>),
    Mul(Box<Node>, Box<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
}

/// A compiled real-valued expression of `z in C^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    source: String,
    dim: usize,
    root: Node,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
}

fn tokenize(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let chars: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            // exponent part
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let save = i;
                i += 1;
                if i < chars.len() && (chars[i] == '+' || chars[i] == '-') {
                    i += 1;
                }
                if i < chars.len() && chars[i].is_ascii_digit() {
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                } else {
                    i = save;
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| Error::Expression(format!("bad number '{text}'")))?;
            out.push(Tok::Num(v));
        } else if c.is_ascii_alphabetic() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_alphanumeric() {
                i += 1;
            }
            out.push(Tok::Ident(chars[start..i].iter().collect()));
        } else if "+-*/^(),".contains(c) {
            out.push(Tok::Op(c));
            i += 1;
        } else {
            return Err(Error::Expression(format!("unexpected character '{c}'")));
        }
    }
    Ok(out)
}

struct Parser<'a> {
    toks: &'a [Tok],
    pos: usize,
    dim: usize,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn eat_op(&mut self, op: char) -> bool {
        if self.peek() == Some(&Tok::Op(op)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_op(&mut self, op: char) -> Result<()> {
        if self.eat_op(op) {
            Ok(())
        } else {
            Err(Error::Expression(format!("expected '{op}'")))
        }
    }

    fn expr(&mut self) -> Result<Node> {
        let mut lhs = self.term()?;
        loop {
            if self.eat_op('+') {
                lhs = Node::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat_op('-') {
                lhs = Node::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Node> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat_op('*') {
                lhs = Node::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat_op('/') {
                lhs = Node::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Node> {
        if self.eat_op('-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node> {
        let base = self.atom()?;
        if self.eat_op('^') {
            let exp = self.unary()?;
            return Ok(Node::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn index(&self, name: &str, prefix: &str) -> Result<Option<usize>> {
        let Some(rest) = name.strip_prefix(prefix) else {
            return Ok(None);
        };
        let Ok(k) = rest.parse::<usize>() else {
            return Ok(None);
        };
        if k == 0 || k > self.dim {
            return Err(Error::Expression(format!(
                "variable '{name}' out of range for dimension {}",
                self.dim
            )));
        }
        Ok(Some(k - 1))
    }

    fn atom(&mut self) -> Result<Node> {
        let tok = self
            .peek()
            .cloned()
            .ok_or_else(|| Error::Expression("unexpected end of expression".into()))?;
        self.pos += 1;
        match tok {
            Tok::Num(v) => Ok(Node::Num(v)),
            Tok::Op('(') => {
                let inner = self.expr()?;
                self.expect_op(')')?;
                Ok(inner)
            }
            Tok::Op(c) => Err(Error::Expression(format!("unexpected '{c}'"))),
            Tok::Ident(name) => {
                let func = match name.as_str() {
                    "exp" => Some(Func::Exp),
                    "log" => Some(Func::Log),
                    "sqrt" => Some(Func::Sqrt),
                    "abs" => Some(Func::Abs),
                    "min" => Some(Func::Min),
                    "max" => Some(Func::Max),
                    _ => None,
                };
                if let Some(func) = func {
                    self.expect_op('(')?;
                    let mut args = vec![self.expr()?];
                    while self.eat_op(',') {
                        args.push(self.expr()?);
                    }
                    self.expect_op(')')?;
                    let variadic = matches!(func, Func::Min | Func::Max);
                    if !variadic && args.len() != 1 {
                        return Err(Error::Expression(format!("'{name}' takes one argument")));
                    }
                    return Ok(Node::Call(func, args));
                }
                if name == "nz" {
                    return Ok(Node::Norm);
                }
                if name == "pi" {
                    return Ok(Node::Num(std::f64::consts::PI));
                }
                if let Some(k) = self.index(&name, "x")? {
                    return Ok(Node::Re(k));
                }
                if let Some(k) = self.index(&name, "y")? {
                    return Ok(Node::Im(k));
                }
                if let Some(k) = self.index(&name, "r")? {
                    return Ok(Node::Modulus(k));
                }
                Err(Error::Expression(format!("unknown identifier '{name}'")))
            }
        }
    }
}

impl Expr {
    pub fn parse(source: &str, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Expression("dimension must be at least 1".into()));
        }
        let toks = tokenize(source)?;
        let mut p = Parser {
            toks: &toks,
            pos: 0,
            dim,
        };
        let root = p.expr()?;
        if p.pos != toks.len() {
            return Err(Error::Expression("trailing input".into()));
        }
        Ok(Expr {
            source: source.to_string(),
            dim,
            root,
        })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, z: &[C64]) -> f64 {
        eval(&self.root, z)
    }
}

fn eval(node: &Node, z: &[C64]) -> f64 {
    match node {
        Node::Num(v) => *v,
        Node::Re(k) => z[*k].re,
        Node::Im(k) => z[*k].im,
        Node::Modulus(k) => z[*k].norm(),
        Node::Norm => norm(z),
        Node::Neg(a) => -eval(a, z),
        Node::Add(a, b) => eval(a, z) + eval(b, z),
        Node::Sub(a, b) => eval(a, z) - eval(b, z),
        Node::Mul(a, b) => eval(a, z) * eval(b, z),
        Node::Div(a, b) => eval(a, z) / eval(b, z),
        Node::Pow(a, b) => {
            let base = eval(a, z);
            let e = eval(b, z);
            if e.fract() == 0.0 && e.abs() < 64.0 {
                base.powi(e as i32)
            } else {
                base.powf(e)
            }
        }
        Node::Call(f, args) => match f {
            Func::Exp => eval(&args[0], z).exp(),
            Func::Log => eval(&args[0], z).ln(),
            Func::Sqrt => eval(&args[0], z).sqrt(),
            Func::Abs => eval(&args[0], z).abs(),
            Func::Min => args
                .iter()
                .map(|a| eval(a, z))
                .fold(f64::INFINITY, f64::min),
            Func::Max => args
                .iter()
                .map(|a| eval(a, z))
                .fold(f64::NEG_INFINITY, f64::max),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn evaluates_unit_ball() {
        let e = Expr::parse("x1^2 + y1^2 + x2^2 + y2^2 - 1", 2).unwrap();
        assert_eq!(e.eval(&[c(0.0, 0.0), c(0.0, 0.0)]), -1.0);
        assert!((e.eval(&[c(0.6, 0.0), c(0.0, 0.8)])).abs() < 1e-15);
    }

    #[test]
    fn precedence_and_unary_minus() {
        let e = Expr::parse("-2^2 + 3*4/2 - (1 - 1e-1)", 1).unwrap();
        assert!((e.eval(&[c(0.0, 0.0)]) - (-4.0 + 6.0 - 0.9)).abs() < 1e-15);
    }

    #[test]
    fn variadic_min_and_modulus() {
        let e = Expr::parse("min(r1 - 1, nz - 2, 5)", 2).unwrap();
        assert_eq!(e.eval(&[c(0.0, 3.0), c(0.0, 0.0)]), 1.0);
    }

    #[test]
    fn rejects_out_of_range_variable() {
        assert!(matches!(Expr::parse("x3", 2), Err(Error::Expression(_))));
        assert!(Expr::parse("foo(1)", 1).is_err());
        assert!(Expr::parse("1 +", 1).is_err());
        assert!(Expr::parse("(1", 1).is_err());
    }
}
