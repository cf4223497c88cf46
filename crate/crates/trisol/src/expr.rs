//! Tiny arithmetic-expression grammar for user-supplied scalar functions:
//! `+  -  *  /  ^  ( )`, numeric literals, named variables, and the functions
//! `log` (natural), `exp`, `abs`, and `piecewise(c, a, b)` which evaluates to
//! `a` when the first declared variable is `<= c` and to `b` otherwise.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Log(Box<Expr>),
    Exp(Box<Expr>),
    Abs(Box<Expr>),
    /// piecewise(threshold, low, high): low branch when var0 <= threshold.
    Piecewise(Box<Expr>, Box<Expr>, Box<Expr>),
}

impl Expr {
    /// Parse `src` with the given variable names (e.g. `["t"]` for
    /// nonlinearities, `["x", "y", "r"]` for planar weights).
    pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
        let tokens = lex(src)?;
        let mut p = Parser { tokens, pos: 0, vars };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return Err(Error::Expression(format!(
                "unexpected trailing input at token {} in {src:?}",
                p.pos
            )));
        }
        Ok(e)
    }

    pub fn eval(&self, vals: &[f64]) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Var(i) => vals[*i],
            Expr::Add(a, b) => a.eval(vals) + b.eval(vals),
            Expr::Sub(a, b) => a.eval(vals) - b.eval(vals),
            Expr::Mul(a, b) => a.eval(vals) * b.eval(vals),
            Expr::Div(a, b) => a.eval(vals) / b.eval(vals),
            Expr::Pow(a, b) => a.eval(vals).powf(b.eval(vals)),
            Expr::Neg(a) => -a.eval(vals),
            Expr::Log(a) => a.eval(vals).ln(),
            Expr::Exp(a) => a.eval(vals).exp(),
            Expr::Abs(a) => a.eval(vals).abs(),
            Expr::Piecewise(c, lo, hi) => {
                if vals[0] <= c.eval(vals) {
                    lo.eval(vals)
                } else {
                    hi.eval(vals)
                }
            }
        }
    }
}

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
    Comma,
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let bytes: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                out.push(Tok::Plus);
                i += 1;
            }
            '-' => {
                out.push(Tok::Minus);
                i += 1;
            }
            '*' => {
                out.push(Tok::Star);
                i += 1;
            }
            '/' => {
                out.push(Tok::Slash);
                i += 1;
            }
            '^' => {
                out.push(Tok::Caret);
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
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit()
                        || bytes[i] == '.'
                        || bytes[i] == 'e'
                        || bytes[i] == 'E'
                        || ((bytes[i] == '+' || bytes[i] == '-')
                            && i > start
                            && (bytes[i - 1] == 'e' || bytes[i - 1] == 'E')))
                {
                    i += 1;
                }
                let s: String = bytes[start..i].iter().collect();
                let v: f64 = s
                    .parse()
                    .map_err(|_| Error::Expression(format!("bad number literal {s:?}")))?;
                out.push(Tok::Num(v));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == '_') {
                    i += 1;
                }
                out.push(Tok::Ident(bytes[start..i].iter().collect()));
            }
            other => {
                return Err(Error::Expression(format!("unexpected character {other:?}")));
            }
        }
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: Vec<Tok>,
    pos: usize,
    vars: &'a [&'a str],
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, t: Tok) -> Result<()> {
        match self.bump() {
            Some(got) if got == t => Ok(()),
            got => Err(Error::Expression(format!("expected {t:?}, got {got:?}"))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Plus) => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Minus) => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Star) => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Slash) => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if matches!(self.peek(), Some(Tok::Minus)) {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if matches!(self.peek(), Some(Tok::Caret)) {
            self.bump();
            // right-associative
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.bump() {
            Some(Tok::Num(v)) => Ok(Expr::Num(v)),
            Some(Tok::LParen) => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if matches!(self.peek(), Some(Tok::LParen)) {
                    self.bump();
                    let mut args = vec![self.expr()?];
                    while matches!(self.peek(), Some(Tok::Comma)) {
                        self.bump();
                        args.push(self.expr()?);
                    }
                    self.expect(Tok::RParen)?;
                    self.call(&name, args)
                } else if let Some(i) = self.vars.iter().position(|v| *v == name) {
                    Ok(Expr::Var(i))
                } else if name == "pi" {
                    Ok(Expr::Num(std::f64::consts::PI))
                } else {
                    Err(Error::Expression(format!(
                        "unknown identifier {name:?} (variables here: {:?})",
                        self.vars
                    )))
                }
            }
            got => Err(Error::Expression(format!("unexpected token {got:?}"))),
        }
    }

    fn call(&mut self, name: &str, mut args: Vec<Expr>) -> Result<Expr> {
        let arity = |n: usize, args: &Vec<Expr>| -> Result<()> {
            if args.len() != n {
                Err(Error::Expression(format!("{name} expects {n} argument(s), got {}", args.len())))
            } else {
                Ok(())
            }
        };
        match name {
            "log" => {
                arity(1, &args)?;
                Ok(Expr::Log(Box::new(args.remove(0))))
            }
            "exp" => {
                arity(1, &args)?;
                Ok(Expr::Exp(Box::new(args.remove(0))))
            }
            "abs" => {
                arity(1, &args)?;
                Ok(Expr::Abs(Box::new(args.remove(0))))
            }
            "piecewise" => {
                arity(3, &args)?;
                let c = args.remove(0);
                let lo = args.remove(0);
                let hi = args.remove(0);
                Ok(Expr::Piecewise(Box::new(c), Box::new(lo), Box::new(hi)))
            }
            other => Err(Error::Expression(format!("unknown function {other:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn eval1(src: &str, t: f64) -> f64 {
        Expr::parse(src, &["t"]).unwrap().eval(&[t])
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_relative_eq!(eval1("1 + 2 * 3", 0.0), 7.0);
        assert_relative_eq!(eval1("(1 + 2) * 3", 0.0), 9.0);
        assert_relative_eq!(eval1("2 ^ 3 ^ 2", 0.0), 512.0); // right assoc
        assert_relative_eq!(eval1("-t^2", 3.0), -9.0);
        assert_relative_eq!(eval1("6 / 3 / 2", 0.0), 1.0);
    }

    #[test]
    fn functions() {
        assert_relative_eq!(eval1("log(exp(2))", 0.0), 2.0, max_relative = 1e-14);
        assert_relative_eq!(eval1("abs(t)^3", -2.0), 8.0);
        assert_relative_eq!(eval1("log(1 + t^4)", 1.0), (2.0f64).ln(), max_relative = 1e-14);
    }

    #[test]
    fn piecewise_branches_on_first_variable() {
        let e = Expr::parse("piecewise(1, t, 2*t)", &["t"]).unwrap();
        assert_relative_eq!(e.eval(&[0.5]), 0.5);
        assert_relative_eq!(e.eval(&[1.0]), 1.0); // boundary takes the low branch
        assert_relative_eq!(e.eval(&[2.0]), 4.0);
    }

    #[test]
    fn multi_variable() {
        let e = Expr::parse("1 + x*y + r^2", &["x", "y", "r"]).unwrap();
        assert_relative_eq!(e.eval(&[2.0, 3.0, 4.0]), 23.0);
    }

    #[test]
    fn errors_are_reported() {
        assert!(Expr::parse("1 +", &["t"]).is_err());
        assert!(Expr::parse("foo(1)", &["t"]).is_err());
        assert!(Expr::parse("s + 1", &["t"]).is_err());
        assert!(Expr::parse("1 2", &["t"]).is_err());
        assert!(Expr::parse("piecewise(1, 2)", &["t"]).is_err());
    }

    #[test]
    fn scientific_literals() {
        assert_relative_eq!(eval1("1.5e-3 + 2E2", 0.0), 200.0015);
    }
}
