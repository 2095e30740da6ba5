//! A small expression grammar for user-supplied boundary data and latent-heat
//! coefficients: numeric constants, one free variable (`t` or `x`), the
//! functions `exp`, `sin`, `cos`, the four arithmetic operators and
//! parentheses. Enough to state every benchmark in a config file without
//! pulling in a symbolic engine.

use std::fmt;

use crate::error::{Result, StefanError};

/// Parsed expression tree over a single free variable.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
}

impl Expr {
    /// Parses `source` with `var` (`"t"` or `"x"`) as the free variable.
    pub fn parse(source: &str, var: &str) -> Result<Self> {
        let tokens = tokenize(source, var)?;
        let mut parser = Parser { tokens, pos: 0, source: source.to_string() };
        let expr = parser.expression()?;
        if parser.pos != parser.tokens.len() {
            return Err(parser.error("trailing input"));
        }
        Ok(expr)
    }

    pub fn eval(&self, v: f64) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var => v,
            Expr::Neg(a) => -a.eval(v),
            Expr::Add(a, b) => a.eval(v) + b.eval(v),
            Expr::Sub(a, b) => a.eval(v) - b.eval(v),
            Expr::Mul(a, b) => a.eval(v) * b.eval(v),
            Expr::Div(a, b) => a.eval(v) / b.eval(v),
            Expr::Exp(a) => a.eval(v).exp(),
            Expr::Sin(a) => a.eval(v).sin(),
            Expr::Cos(a) => a.eval(v).cos(),
        }
    }

    /// True when the expression never reads the free variable.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Const(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Number(f64),
    Var,
    Func(Func),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Func {
    Exp,
    Sin,
    Cos,
}

fn tokenize(source: &str, var: &str) -> Result<Vec<Token>> {
    let mut tokens = Vec::new();
    let chars: Vec<char> = source.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => i += 1,
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            // accept both the ascii hyphen and the unicode minus sign
            '-' | '\u{2212}' => {
                tokens.push(Token::Minus);
                i += 1;
            }
            '*' => {
                tokens.push(Token::Star);
                i += 1;
            }
            '/' => {
                tokens.push(Token::Slash);
                i += 1;
            }
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            _ if c.is_ascii_digit() || c == '.' => {
                let start = i;
                while i < chars.len()
                    && (chars[i].is_ascii_digit()
                        || chars[i] == '.'
                        || chars[i] == 'e'
                        || chars[i] == 'E'
                        || ((chars[i] == '+' || chars[i] == '-')
                            && i > start
                            && (chars[i - 1] == 'e' || chars[i - 1] == 'E')))
                {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                let value: f64 = text
                    .parse()
                    .map_err(|_| StefanError::Expression(format!("bad number '{text}' in '{source}'")))?;
                tokens.push(Token::Number(value));
            }
            _ if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_alphabetic() {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                match word.as_str() {
                    "exp" => tokens.push(Token::Func(Func::Exp)),
                    "sin" => tokens.push(Token::Func(Func::Sin)),
                    "cos" => tokens.push(Token::Func(Func::Cos)),
                    w if w == var => tokens.push(Token::Var),
                    w => {
                        return Err(StefanError::Expression(format!(
                            "unknown identifier '{w}' in '{source}' (free variable is '{var}')"
                        )))
                    }
                }
            }
            _ => {
                return Err(StefanError::Expression(format!(
                    "unexpected character '{c}' in '{source}'"
                )))
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    source: String,
}

impl Parser {
    fn error(&self, message: &str) -> StefanError {
        StefanError::Expression(format!("{message} in '{}'", self.source))
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn advance(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn expression(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Plus => {
                    self.advance();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Token::Minus => {
                    self.advance();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.peek().cloned() {
            match op {
                Token::Star => {
                    self.advance();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Token::Slash => {
                    self.advance();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(Token::Minus) => {
                self.advance();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Plus) => {
                self.advance();
                self.unary()
            }
            _ => self.primary(),
        }
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.advance() {
            Some(Token::Number(v)) => Ok(Expr::Const(v)),
            Some(Token::Var) => Ok(Expr::Var),
            Some(Token::Func(f)) => {
                match self.advance() {
                    Some(Token::LParen) => {}
                    _ => return Err(self.error("expected '(' after function name")),
                }
                let arg = self.expression()?;
                match self.advance() {
                    Some(Token::RParen) => {}
                    _ => return Err(self.error("missing ')'")),
                }
                let arg = Box::new(arg);
                Ok(match f {
                    Func::Exp => Expr::Exp(arg),
                    Func::Sin => Expr::Sin(arg),
                    Func::Cos => Expr::Cos(arg),
                })
            }
            Some(Token::LParen) => {
                let inner = self.expression()?;
                match self.advance() {
                    Some(Token::RParen) => Ok(inner),
                    _ => Err(self.error("missing ')'")),
                }
            }
            Some(_) => Err(self.error("unexpected token")),
            None => Err(self.error("unexpected end of expression")),
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var => write!(f, "v"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Sin(a) => write!(f, "sin({a})"),
            Expr::Cos(a) => write!(f, "cos({a})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, var: &str, v: f64) -> f64 {
        Expr::parse(src, var).unwrap().eval(v)
    }

    #[test]
    fn parses_constants_and_variable() {
        assert_eq!(eval("1", "t", 5.0), 1.0);
        assert_eq!(eval("t", "t", 5.0), 5.0);
        assert_eq!(eval("1+x", "x", 0.5), 1.5);
    }

    #[test]
    fn respects_precedence() {
        assert_eq!(eval("1+2*3", "t", 0.0), 7.0);
        assert_eq!(eval("(1+2)*3", "t", 0.0), 9.0);
        assert_eq!(eval("4/2/2", "t", 0.0), 1.0);
        assert_eq!(eval("2-3-4", "t", 0.0), -5.0);
    }

    #[test]
    fn unary_minus_and_scientific_notation() {
        assert_eq!(eval("-t", "t", 2.0), -2.0);
        assert_eq!(eval("--1", "t", 0.0), 1.0);
        assert_eq!(eval("1e-2", "t", 0.0), 0.01);
        assert_eq!(eval("2.5e3", "t", 0.0), 2500.0);
    }

    #[test]
    fn benchmark_expressions() {
        let g = Expr::parse("exp(t)-1", "t").unwrap();
        assert!((g.eval(1.0) - (std::f64::consts::E - 1.0)).abs() < 1e-15);
        let osc = Expr::parse("1 - 0.1*sin(6.283185307179586*t)", "t").unwrap();
        assert!((osc.eval(0.25) - (1.0 - 0.1)).abs() < 1e-12);
        let beta = Expr::parse("1+x", "x").unwrap();
        assert!(!beta.is_constant());
        assert!(Expr::parse("cos(0)", "x").unwrap().is_constant());
    }

    #[test]
    fn rejects_malformed_input() {
        assert!(Expr::parse("y", "t").is_err());
        assert!(Expr::parse("x", "t").is_err());
        assert!(Expr::parse("sin()", "t").is_err());
        assert!(Expr::parse("1+", "t").is_err());
        assert!(Expr::parse("(1", "t").is_err());
        assert!(Expr::parse("1 2", "t").is_err());
        assert!(Expr::parse("tan(t)", "t").is_err());
        assert!(Expr::parse("1..2", "t").is_err());
    }
}
