//! A small expression language for scalar fields f: R^n -> R, with exact
//! forward-mode differentiation (gradients and Hessian-vector products).

mod ast;
mod dual;
mod parser;

use std::fmt;
use std::sync::Arc;

pub use ast::{Expr, Func};

use crate::error::{Error, Result};
use crate::Scalar;
use dual::Dual;

/// How derivatives of a field can be obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Differentiability {
    /// Exact forward-mode gradients and Hessian-vector products.
    Exact,
    /// Central finite differences only.
    FiniteDiff,
    /// No derivatives (the field contains abs/min/max, or is an opaque
    /// evaluator registered without derivative support).
    NonDifferentiable,
}

enum FieldRepr<T: Scalar> {
    Expr(Expr<T>),
    #[allow(clippy::type_complexity)]
    Custom(Arc<dyn Fn(&[T]) -> T + Send + Sync>),
}

impl<T: Scalar> Clone for FieldRepr<T> {
    fn clone(&self) -> Self {
        match self {
            FieldRepr::Expr(e) => FieldRepr::Expr(e.clone()),
            FieldRepr::Custom(f) => FieldRepr::Custom(Arc::clone(f)),
        }
    }
}

/// A scalar field over `t1..tn`: a parsed expression or a built-in
/// evaluator, plus its differentiability tier.
#[derive(Clone)]
pub struct ScalarField<T: Scalar> {
    n: usize,
    repr: FieldRepr<T>,
    diff: Differentiability,
}

impl<T: Scalar> fmt::Debug for ScalarField<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let repr = match &self.repr {
            FieldRepr::Expr(e) => format!("{e}"),
            FieldRepr::Custom(_) => "<custom>".to_string(),
        };
        f.debug_struct("ScalarField")
            .field("n", &self.n)
            .field("diff", &self.diff)
            .field("repr", &repr)
            .finish()
    }
}

impl<T: Scalar> ScalarField<T> {
    /// Parse `source` over variables `t1..tn`.
    pub fn parse(source: &str, n: usize) -> Result<Self> {
        let expr = parser::parse(source, n)?;
        Ok(Self::from_expr(expr, n))
    }

    pub fn from_expr(expr: Expr<T>, n: usize) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        if let Some(max) = expr.max_var() {
            assert!(max < n, "expression uses a variable beyond dimension {n}");
        }
        let diff = if expr.has_nonsmooth_node() {
            Differentiability::NonDifferentiable
        } else {
            Differentiability::Exact
        };
        ScalarField {
            n,
            repr: FieldRepr::Expr(expr),
            diff,
        }
    }

    /// The constant field `t -> c`.
    pub fn constant(c: T, n: usize) -> Self {
        Self::from_expr(Expr::Num(c), n)
    }

    /// Wrap an arbitrary evaluator. `diff` must not be `Exact`; opaque
    /// evaluators can only be differentiated by finite differences.
    pub fn custom(
        n: usize,
        diff: Differentiability,
        eval: impl Fn(&[T]) -> T + Send + Sync + 'static,
    ) -> Self {
        assert!(n >= 1, "dimension must be at least 1");
        assert!(
            diff != Differentiability::Exact,
            "custom evaluators cannot promise exact derivatives"
        );
        ScalarField {
            n,
            repr: FieldRepr::Custom(Arc::new(eval)),
            diff,
        }
    }

    /// Pointwise minimum of a nonempty family over the same dimension.
    /// The result is non-differentiable.
    pub fn min_of(fields: Vec<ScalarField<T>>) -> Result<Self> {
        let first = fields.first().ok_or(Error::EmptyFamily)?;
        let n = first.n;
        for f in &fields {
            if f.n != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    got: f.n,
                });
            }
        }
        let all_exprs: Option<Vec<Expr<T>>> = fields
            .iter()
            .map(|f| match &f.repr {
                FieldRepr::Expr(e) => Some(e.clone()),
                FieldRepr::Custom(_) => None,
            })
            .collect();
        match all_exprs {
            Some(exprs) if exprs.len() > 1 => Ok(ScalarField {
                n,
                repr: FieldRepr::Expr(Expr::Call(Func::Min, exprs)),
                diff: Differentiability::NonDifferentiable,
            }),
            Some(mut exprs) => Ok(Self::from_expr(exprs.remove(0), n)),
            None => {
                let diff = Differentiability::NonDifferentiable;
                let owned = fields;
                Ok(ScalarField {
                    n,
                    repr: FieldRepr::Custom(Arc::new(move |t: &[T]| {
                        owned
                            .iter()
                            .map(|f| f.eval(t))
                            .reduce(num_traits::Float::min)
                            .unwrap()
                    })),
                    diff,
                })
            }
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn differentiability(&self) -> Differentiability {
        self.diff
    }

    /// The underlying expression, when the field was built from one.
    pub fn expr(&self) -> Option<&Expr<T>> {
        match &self.repr {
            FieldRepr::Expr(e) => Some(e),
            FieldRepr::Custom(_) => None,
        }
    }

    pub fn eval(&self, t: &[T]) -> T {
        assert_eq!(t.len(), self.n, "point dimension mismatch");
        match &self.repr {
            FieldRepr::Expr(e) => e.eval_num(t),
            FieldRepr::Custom(f) => f(t),
        }
    }

    /// Gradient at `t`. Exact fields use dual numbers; finite-difference
    /// fields fall back to [`ScalarField::grad_fd`].
    pub fn grad(&self, t: &[T]) -> Result<Vec<T>> {
        assert_eq!(t.len(), self.n, "point dimension mismatch");
        match (self.diff, &self.repr) {
            (Differentiability::Exact, FieldRepr::Expr(expr)) => Ok((0..self.n)
                .map(|i| {
                    let vars: Vec<Dual<T>> = t
                        .iter()
                        .enumerate()
                        .map(|(j, &tj)| Dual::new(tj, if i == j { T::one() } else { T::zero() }))
                        .collect();
                    expr.eval_num(&vars).d
                })
                .collect()),
            (Differentiability::FiniteDiff, _) => Ok(self.grad_fd(t)),
            _ => Err(Error::NonDifferentiable),
        }
    }

    /// Hessian-vector product `H(t) v` (the directional derivative of the
    /// gradient along `v`).
    pub fn hess_vec(&self, t: &[T], v: &[T]) -> Result<Vec<T>> {
        assert_eq!(t.len(), self.n, "point dimension mismatch");
        assert_eq!(v.len(), self.n, "direction dimension mismatch");
        match (self.diff, &self.repr) {
            (Differentiability::Exact, FieldRepr::Expr(expr)) => Ok((0..self.n)
                .map(|i| {
                    let vars: Vec<Dual<Dual<T>>> = t
                        .iter()
                        .enumerate()
                        .map(|(j, &tj)| {
                            Dual::new(
                                Dual::new(tj, v[j]),
                                Dual::new(if i == j { T::one() } else { T::zero() }, T::zero()),
                            )
                        })
                        .collect();
                    expr.eval_num(&vars).d.d
                })
                .collect()),
            (Differentiability::FiniteDiff, _) => {
                let h = crate::c::<T>(1e-6);
                let plus: Vec<T> = t.iter().zip(v).map(|(&a, &b)| a + h * b).collect();
                let minus: Vec<T> = t.iter().zip(v).map(|(&a, &b)| a - h * b).collect();
                let gp = self.grad_fd(&plus);
                let gm = self.grad_fd(&minus);
                Ok(gp
                    .into_iter()
                    .zip(gm)
                    .map(|(p, m)| (p - m) / (h + h))
                    .collect())
            }
            _ => Err(Error::NonDifferentiable),
        }
    }

    /// Central finite-difference gradient with per-axis step
    /// `1e-6 * max(1, |t_i|)`. Available for any field.
    pub fn grad_fd(&self, t: &[T]) -> Vec<T> {
        assert_eq!(t.len(), self.n, "point dimension mismatch");
        let base = crate::c::<T>(1e-6);
        (0..self.n)
            .map(|i| {
                let h = base * num_traits::Float::max(T::one(), t[i].abs());
                let mut plus = t.to_vec();
                let mut minus = t.to_vec();
                plus[i] = plus[i] + h;
                minus[i] = minus[i] - h;
                (self.eval(&plus) - self.eval(&minus)) / (h + h)
            })
            .collect()
    }
}
