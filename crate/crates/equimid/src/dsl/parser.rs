//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr   := term (("+"|"-") term)*
//! term   := factor (("*"|"/") factor)*
//! factor := unary ("^" factor)?
//! unary  := "-" unary | atom
//! atom   := NUMBER | VAR | FUNC "(" [expr ("," expr)*] ")" | "(" expr ")"
//! VAR    := "t" [1-9][0-9]*
//! FUNC   := sqrt | exp | log | abs | min | max | norm2
//! ```
//!
//! `norm2()` with no arguments stands for `t1^2 + ... + tn^2`; with
//! arguments it is the sum of squares of the arguments.

use super::ast::{Expr, Func};
use crate::error::{Error, Result};
use crate::Scalar;

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
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number `{v}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Star => "`*`".into(),
            Tok::Slash => "`/`".into(),
            Tok::Caret => "`^`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\r' | '\n' => {
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, start));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, start));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, start));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, start));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, start));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, start));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, start));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, start));
                i += 1;
            }
            '0'..='9' | '.' => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    i += 1;
                    while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value: f64 = text.parse().map_err(|_| Error::Syntax {
                    position: start,
                    expected: "a number".into(),
                    found: format!("`{text}`"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Syntax {
                        position: start,
                        expected: "a finite number".into(),
                        found: format!("`{text}`"),
                    });
                }
                toks.push((Tok::Num(value), start));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                while i < bytes.len()
                    && ((bytes[i] as char).is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start));
            }
            _ => {
                return Err(Error::Syntax {
                    position: start,
                    expected: "a token".into(),
                    found: format!("`{c}`"),
                })
            }
        }
    }
    toks.push((Tok::Eof, src.len()));
    Ok(toks)
}

struct Parser<'a, T> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    n: usize,
    _marker: std::marker::PhantomData<T>,
}

impl<T: Scalar> Parser<'_, T> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn here(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].0.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, expected: &str) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn unexpected(&self, expected: &str) -> Error {
        Error::Syntax {
            position: self.here(),
            expected: expected.into(),
            found: self.peek().describe(),
        }
    }

    fn expr(&mut self) -> Result<Expr<T>> {
        let mut node = self.term()?;
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    node = Expr::Add(Box::new(node), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.bump();
                    node = Expr::Sub(Box::new(node), Box::new(self.term()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn term(&mut self) -> Result<Expr<T>> {
        let mut node = self.factor()?;
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    node = Expr::Mul(Box::new(node), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.bump();
                    node = Expr::Div(Box::new(node), Box::new(self.factor()?));
                }
                _ => return Ok(node),
            }
        }
    }

    fn factor(&mut self) -> Result<Expr<T>> {
        let base = self.unary()?;
        if *self.peek() == Tok::Caret {
            self.bump();
            let exponent = self.factor()?; // right-associative
            return Ok(Expr::Pow(Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr<T>> {
        if *self.peek() == Tok::Minus {
            self.bump();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr<T>> {
        match self.peek().clone() {
            Tok::Num(v) => {
                let position = self.here();
                self.bump();
                let lit = T::from_f64(v).ok_or(Error::Syntax {
                    position,
                    expected: "a representable number".into(),
                    found: format!("`{v}`"),
                })?;
                Ok(Expr::Num(lit))
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Tok::Ident(name) => {
                let position = self.here();
                self.bump();
                self.ident(&name, position)
            }
            _ => Err(self.unexpected("a number, variable, function or `(`")),
        }
    }

    fn ident(&mut self, name: &str, position: usize) -> Result<Expr<T>> {
        if let Some(idx) = parse_var_name(name) {
            if idx > self.n {
                return Err(Error::Dimension {
                    var: idx,
                    n: self.n,
                });
            }
            return Ok(Expr::Var(idx - 1));
        }
        let func = match name {
            "sqrt" => Some(Func::Sqrt),
            "exp" => Some(Func::Exp),
            "log" => Some(Func::Log),
            "abs" => Some(Func::Abs),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            "norm2" => None,
            _ => {
                return Err(Error::Syntax {
                    position,
                    expected: "a variable t1..tn or one of sqrt, exp, log, abs, min, max, norm2"
                        .into(),
                    found: format!("`{name}`"),
                })
            }
        };
        self.expect(Tok::LParen, "`(`")?;
        let mut args = Vec::new();
        if *self.peek() != Tok::RParen {
            args.push(self.expr()?);
            while *self.peek() == Tok::Comma {
                self.bump();
                args.push(self.expr()?);
            }
        }
        let close = self.here();
        self.expect(Tok::RParen, "`,` or `)`")?;
        match func {
            Some(f) => {
                let arity_ok = match f {
                    Func::Sqrt | Func::Exp | Func::Log | Func::Abs => args.len() == 1,
                    Func::Min | Func::Max => !args.is_empty(),
                };
                if !arity_ok {
                    return Err(Error::Syntax {
                        position: close,
                        expected: match f {
                            Func::Min | Func::Max => "at least one argument".into(),
                            _ => "exactly one argument".into(),
                        },
                        found: format!("{} arguments to {}", args.len(), f.name()),
                    });
                }
                Ok(Expr::Call(f, args))
            }
            // norm2: sum of squares, either of all variables or of the
            // explicit arguments.
            None => {
                let squares: Vec<Expr<T>> = if args.is_empty() {
                    (0..self.n)
                        .map(|i| Expr::Mul(Box::new(Expr::Var(i)), Box::new(Expr::Var(i))))
                        .collect()
                } else {
                    args.into_iter()
                        .map(|a| Expr::Mul(Box::new(a.clone()), Box::new(a)))
                        .collect()
                };
                Ok(squares
                    .into_iter()
                    .reduce(|acc, s| Expr::Add(Box::new(acc), Box::new(s)))
                    .expect("dimension is at least one"))
            }
        }
    }
}

/// `t1`, `t2`, ... (no leading zero). Returns the one-based index.
fn parse_var_name(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('t')?;
    if digits.is_empty() || digits.starts_with('0') {
        return None;
    }
    if !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

pub fn parse<T: Scalar>(src: &str, n: usize) -> Result<Expr<T>> {
    assert!(n >= 1, "dimension must be at least 1");
    let toks = tokenize(src)?;
    let mut p = Parser {
        toks: &toks,
        pos: 0,
        n,
        _marker: std::marker::PhantomData,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::Eof {
        return Err(p.unexpected("end of input or an operator"));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(src: &str, n: usize) -> Expr<f64> {
        parse(src, n).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        // 1 + 2 * 3 = 7, (1 + 2) * 3 = 9
        let e = p("1 + 2 * 3", 1);
        assert_eq!(e.eval_num(&[0.0]), 7.0);
        let e = p("(1 + 2) * 3", 1);
        assert_eq!(e.eval_num(&[0.0]), 9.0);
        // left-assoc subtraction: 8 - 3 - 2 = 3
        assert_eq!(p("8 - 3 - 2", 1).eval_num(&[0.0]), 3.0);
        // right-assoc power: 2 ^ 3 ^ 2 = 512
        assert_eq!(p("2 ^ 3 ^ 2", 1).eval_num(&[0.0]), 512.0);
    }

    #[test]
    fn unary_minus_binds_before_power() {
        // factor := unary ("^" factor)? puts the sign inside the base
        assert_eq!(p("-2 ^ 2", 1).eval_num(&[0.0]), 4.0);
        assert_eq!(p("2 ^ -2", 1).eval_num(&[0.0]), 0.25);
    }

    #[test]
    fn variables_and_dimension() {
        let e = p("t1 + t2", 2);
        assert_eq!(e.eval_num(&[1.0, 2.0]), 3.0);
        match parse::<f64>("t3", 2) {
            Err(Error::Dimension { var: 3, n: 2 }) => {}
            other => panic!("expected dimension error, got {other:?}"),
        }
    }

    #[test]
    fn norm2_desugars() {
        let e = p("norm2()", 3);
        assert_eq!(e.eval_num(&[1.0, 2.0, 3.0]), 14.0);
        let e = p("norm2(t1 - 1, t2)", 2);
        assert_eq!(e.eval_num(&[3.0, 4.0]), 20.0);
    }

    #[test]
    fn rejects_garbage_with_position() {
        match parse::<f64>("sqrt(t1", 1) {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 7),
            other => panic!("expected syntax error, got {other:?}"),
        }
        match parse::<f64>("2 +", 1) {
            Err(Error::Syntax { position, .. }) => assert_eq!(position, 3),
            other => panic!("expected syntax error, got {other:?}"),
        }
        assert!(parse::<f64>("", 1).is_err());
        assert!(parse::<f64>("foo(1)", 1).is_err());
        assert!(parse::<f64>("t0", 1).is_err());
        assert!(parse::<f64>("sqrt(1, 2)", 1).is_err());
    }

    #[test]
    fn scientific_literals() {
        assert_eq!(p("1.5e2", 1).eval_num(&[0.0]), 150.0);
        assert_eq!(p("2.5e-1", 1).eval_num(&[0.0]), 0.25);
    }
}
