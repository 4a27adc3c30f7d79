use std::fmt;

use super::dual::Num;
use crate::Scalar;

/// Built-in functions of the expression language.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sqrt,
    Exp,
    Log,
    Abs,
    Min,
    Max,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Sqrt => "sqrt",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
        }
    }
}

/// Expression tree over variables `t1..tn`.
///
/// `norm2()` is desugared by the parser into an explicit sum of squares,
/// so it never appears as a node.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T> {
    Num(T),
    /// Zero-based variable index; `t1` is `Var(0)`.
    Var(usize),
    Neg(Box<Expr<T>>),
    Add(Box<Expr<T>>, Box<Expr<T>>),
    Sub(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Box<Expr<T>>, Box<Expr<T>>),
    Div(Box<Expr<T>>, Box<Expr<T>>),
    Pow(Box<Expr<T>>, Box<Expr<T>>),
    Call(Func, Vec<Expr<T>>),
}

impl<T: Scalar> Expr<T> {
    pub(crate) fn eval_num<N: Num<T>>(&self, vars: &[N]) -> N {
        match self {
            Expr::Num(c) => N::constant(*c),
            Expr::Var(i) => vars[*i],
            Expr::Neg(e) => -e.eval_num(vars),
            Expr::Add(a, b) => a.eval_num(vars) + b.eval_num(vars),
            Expr::Sub(a, b) => a.eval_num(vars) - b.eval_num(vars),
            Expr::Mul(a, b) => a.eval_num(vars) * b.eval_num(vars),
            Expr::Div(a, b) => a.eval_num(vars) / b.eval_num(vars),
            Expr::Pow(a, b) => a.eval_num(vars).powf(b.eval_num(vars)),
            Expr::Call(f, args) => {
                let mut vals = args.iter().map(|a| a.eval_num(vars));
                match f {
                    Func::Sqrt => vals.next().unwrap().sqrt(),
                    Func::Exp => vals.next().unwrap().exp(),
                    Func::Log => vals.next().unwrap().ln(),
                    Func::Abs => vals.next().unwrap().abs(),
                    Func::Min => vals.reduce(|a, b| a.min2(b)).unwrap(),
                    Func::Max => vals.reduce(|a, b| a.max2(b)).unwrap(),
                }
            }
        }
    }

    /// True if the tree contains `abs`, `min` or `max` anywhere.
    pub fn has_nonsmooth_node(&self) -> bool {
        match self {
            Expr::Num(_) | Expr::Var(_) => false,
            Expr::Neg(e) => e.has_nonsmooth_node(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => a.has_nonsmooth_node() || b.has_nonsmooth_node(),
            Expr::Call(f, args) => {
                matches!(f, Func::Abs | Func::Min | Func::Max)
                    || args.iter().any(|a| a.has_nonsmooth_node())
            }
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) => e.max_var(),
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Pow(a, b) => match (a.max_var(), b.max_var()) {
                (Some(x), Some(y)) => Some(x.max(y)),
                (x, y) => x.or(y),
            },
            Expr::Call(_, args) => args.iter().filter_map(|a| a.max_var()).max(),
        }
    }
}

// Fully parenthesized so that re-parsing reproduces the same tree shape.
impl<T: fmt::Debug> fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(c) => write!(f, "{c:?}"),
            Expr::Var(i) => write!(f, "t{}", i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (k, a) in args.iter().enumerate() {
                    if k > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{a}")?;
                }
                write!(f, ")")
            }
        }
    }
}
