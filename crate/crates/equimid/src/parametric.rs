//! Parametric form of the equidistant graph for a twice continuously
//! differentiable convex positive field `f`:
//!
//! ```text
//! x(t) = t + f(t) grad f(t) / (1 + sqrt(1 + |grad f|^2))
//! y(t) = f(t) sqrt(1 + |grad f|^2) / (1 + sqrt(1 + |grad f|^2))
//! ```
//!
//! The abscissa map `x` is a bijection with nonvanishing Jacobian, so the
//! equidistant function is `G = y ∘ x⁻¹`; the inverse is computed by a
//! damped Newton iteration.

use std::fmt;

use crate::dsl::{Differentiability, ScalarField};
use crate::error::{Error, Result};
use crate::{c, linalg, Scalar};

/// Newton controls for inverting the abscissa map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewtonConfig<T> {
    pub tol: T,
    pub max_iter: usize,
    /// Relative step for finite-difference Jacobians.
    pub fd_step: T,
}

impl<T: Scalar> Default for NewtonConfig<T> {
    fn default() -> Self {
        NewtonConfig {
            tol: c(1e-12),
            max_iter: 100,
            fd_step: c(1e-6),
        }
    }
}

/// The pair `(x(t), y(t))` for a differentiable field, with the Newton
/// machinery to invert `x`.
#[derive(Debug, Clone)]
pub struct EquidistantParam<T: Scalar> {
    field: ScalarField<T>,
    newton: NewtonConfig<T>,
}

impl<T: Scalar> EquidistantParam<T> {
    /// Requires a field with gradient access (exact or finite-difference).
    pub fn new(field: ScalarField<T>) -> Result<Self> {
        if field.differentiability() == Differentiability::NonDifferentiable {
            return Err(Error::GradientUnavailable);
        }
        Ok(EquidistantParam {
            field,
            newton: NewtonConfig::default(),
        })
    }

    pub fn with_newton(mut self, newton: NewtonConfig<T>) -> Self {
        self.newton = newton;
        self
    }

    pub fn field(&self) -> &ScalarField<T> {
        &self.field
    }

    pub fn n(&self) -> usize {
        self.field.n()
    }

    /// Evaluate the parametric point `(x(t), y(t))`.
    pub fn param_point(&self, t: &[T]) -> Result<(Vec<T>, T)> {
        let f = self.field.eval(t);
        let grad = self.grad(t)?;
        let w = (T::one() + linalg::dot(&grad, &grad)).sqrt();
        let denom = T::one() + w;
        let x = t
            .iter()
            .zip(&grad)
            .map(|(&ti, &gi)| ti + f * gi / denom)
            .collect();
        let y = f * w / denom;
        Ok((x, y))
    }

    /// Solve `x(t) = x_target` by damped Newton from `t0 = x_target`.
    pub fn invert_x(&self, x_target: &[T]) -> Result<Vec<T>> {
        if x_target.len() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: x_target.len(),
            });
        }
        let map = |t: &[T]| self.param_point(t).map(|(x, _)| x);
        let jac = |t: &[T]| self.jacobian_x(t);
        linalg::damped_newton(
            &map,
            &jac,
            x_target,
            x_target,
            self.newton.tol,
            self.newton.max_iter,
        )
    }

    /// The equidistant function through the parameterization:
    /// `G(x) = y(x⁻¹(x))`.
    pub fn eval_g(&self, x: &[T]) -> Result<T> {
        let t = self.invert_x(x)?;
        Ok(self.param_point(&t)?.1)
    }

    /// Directional derivative of `x` along `v` from the closed form
    /// (needs Hessian-vector products of `f`).
    pub fn dir_deriv_x_analytic(&self, t: &[T], v: &[T]) -> Result<Vec<T>> {
        let f = self.field.eval(t);
        let grad = self.grad(t)?;
        let hv = self.field.hess_vec(t, v).map_err(|e| match e {
            Error::NonDifferentiable => Error::GradientUnavailable,
            other => other,
        })?;
        let w = (T::one() + linalg::dot(&grad, &grad)).sqrt();
        let denom = T::one() + w;
        let dv_f = linalg::dot(&grad, v);
        let g_dot_hv = linalg::dot(&grad, &hv);
        let coeff = (dv_f * denom * w - f * g_dot_hv) / (denom * denom * w);
        Ok((0..self.n())
            .map(|i| v[i] + coeff * grad[i] + f / denom * hv[i])
            .collect())
    }

    /// Directional derivative of `x` along `v` by central differences on
    /// the parametric map.
    pub fn dir_deriv_x_fd(&self, t: &[T], v: &[T]) -> Result<Vec<T>> {
        let scale = num_traits::Float::max(T::one(), linalg::norm(t));
        let h = self.newton.fd_step * scale;
        let plus: Vec<T> = t.iter().zip(v).map(|(&a, &b)| a + h * b).collect();
        let minus: Vec<T> = t.iter().zip(v).map(|(&a, &b)| a - h * b).collect();
        let (xp, _) = self.param_point(&plus)?;
        let (xm, _) = self.param_point(&minus)?;
        Ok(xp
            .into_iter()
            .zip(xm)
            .map(|(a, b)| (a - b) / (h + h))
            .collect())
    }

    fn grad(&self, t: &[T]) -> Result<Vec<T>> {
        self.field.grad(t).map_err(|e| match e {
            Error::NonDifferentiable => Error::GradientUnavailable,
            other => other,
        })
    }

    /// Jacobian of the abscissa map, `J[i][j] = d x_i / d t_j`, analytic
    /// when the field supports exact Hessians, finite-difference otherwise.
    fn jacobian_x(&self, t: &[T]) -> Result<Vec<Vec<T>>> {
        let n = self.n();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![T::zero(); n];
            e[j] = T::one();
            let col = if self.field.differentiability() == Differentiability::Exact {
                self.dir_deriv_x_analytic(t, &e)?
            } else {
                self.dir_deriv_x_fd(t, &e)?
            };
            cols.push(col);
        }
        Ok((0..n)
            .map(|i| (0..n).map(|j| cols[j][i]).collect())
            .collect())
    }

    /// Wrap the parametric maps as opaque scalar fields (one per abscissa
    /// component plus the height), differentiable by finite differences.
    pub fn as_maps(&self) -> ParamMaps<T> {
        let n = self.n();
        let components = (0..n)
            .map(|i| {
                let inner = self.clone();
                ScalarField::custom(n, Differentiability::FiniteDiff, move |t: &[T]| {
                    inner
                        .param_point(t)
                        .map(|(x, _)| x[i])
                        .unwrap_or_else(|_| T::nan())
                })
            })
            .collect();
        let inner = self.clone();
        let y = ScalarField::custom(n, Differentiability::FiniteDiff, move |t: &[T]| {
            inner
                .param_point(t)
                .map(|(_, y)| y)
                .unwrap_or_else(|_| T::nan())
        });
        ParamMaps { components, y }
    }
}

/// A candidate parameterization: `n` abscissa component maps and one
/// height map, all over the parameter `t`.
#[derive(Debug, Clone)]
pub struct ParamMaps<T: Scalar> {
    pub components: Vec<ScalarField<T>>,
    pub y: ScalarField<T>,
}

impl<T: Scalar> ParamMaps<T> {
    pub fn new(components: Vec<ScalarField<T>>, y: ScalarField<T>) -> Self {
        let n = y.n();
        assert_eq!(components.len(), n, "x must have n components");
        assert!(components.iter().all(|f| f.n() == n));
        ParamMaps { components, y }
    }

    pub fn n(&self) -> usize {
        self.y.n()
    }

    pub fn eval_x(&self, t: &[T]) -> Vec<T> {
        self.components.iter().map(|f| f.eval(t)).collect()
    }

    fn grad_any(field: &ScalarField<T>, t: &[T]) -> Vec<T> {
        match field.differentiability() {
            Differentiability::Exact | Differentiability::FiniteDiff => {
                field.grad(t).expect("gradient available")
            }
            Differentiability::NonDifferentiable => field.grad_fd(t),
        }
    }
}

/// Recover the generating field value at `t` from a parameterization:
/// `f(t) = y + sqrt(y^2 - |x - t|^2)`.
pub fn reconstruct_f<T: Scalar>(maps: &ParamMaps<T>, t: &[T]) -> Result<T> {
    let x = maps.eval_x(t);
    let y = maps.y.eval(t);
    let offset = linalg::dist(&x, t);
    let rad = y * y - offset * offset;
    if rad < T::zero() {
        return Err(Error::NegativeRadicand);
    }
    Ok(y + rad.sqrt())
}

/// Outcome of validating a candidate parameterization on a grid: the
/// bound `|g| < 1`, the derivative relation between `x` and `y`, and the
/// pairwise monotonicity of `X = g / sqrt(1 - |g|^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ParamValidationReport<T> {
    pub g_bound_ok: bool,
    pub worst_g_norm: T,
    pub relation_ok: bool,
    pub worst_relation_residual: T,
    pub monotone_ok: bool,
    pub worst_monotone_product: T,
    pub relation_tol: T,
    pub monotone_tol: T,
}

impl<T: Scalar> ParamValidationReport<T> {
    pub fn pass(&self) -> bool {
        self.g_bound_ok && self.relation_ok && self.monotone_ok
    }
}

impl<T: Scalar> fmt::Display for ParamValidationReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "g-bound: {} (worst |g| = {:.6})",
            if self.g_bound_ok { "pass" } else { "FAIL" },
            self.worst_g_norm.to_f64().unwrap_or(f64::NAN)
        )?;
        writeln!(
            f,
            "derivative relation: {} (worst residual {:.3e})",
            if self.relation_ok { "pass" } else { "FAIL" },
            self.worst_relation_residual.to_f64().unwrap_or(f64::NAN)
        )?;
        write!(
            f,
            "X monotone on grid: {} (worst pair product {:.3e})",
            if self.monotone_ok { "pass" } else { "FAIL" },
            self.worst_monotone_product.to_f64().unwrap_or(f64::NAN)
        )
    }
}

/// Validate a candidate parameterization at the sampled parameters.
///
/// Checks, in order: `|g(t)| < 1` with `g = (x(t) - t) / y(t)`; the
/// relation `<d_i x, g> / (1 + sqrt(1 - |g|^2)) = d_i y` per axis; and
/// `<X(t1) - X(t2), t1 - t2> >= 0` over all sample pairs.
pub fn validate_parameterization<T: Scalar>(
    maps: &ParamMaps<T>,
    samples: &[Vec<T>],
    relation_tol: T,
    monotone_tol: T,
) -> ParamValidationReport<T> {
    let n = maps.n();
    let one = T::one();
    let mut worst_g = T::zero();
    let mut g_bound_ok = true;
    let mut worst_rel = T::zero();
    let mut xs = Vec::with_capacity(samples.len());
    for t in samples {
        let x = maps.eval_x(t);
        let y = maps.y.eval(t);
        let g: Vec<T> = x.iter().zip(t).map(|(&xi, &ti)| (xi - ti) / y).collect();
        let gn = linalg::norm(&g);
        if gn > worst_g {
            worst_g = gn;
        }
        // negated so that a NaN norm also counts as a bound failure
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(gn < one) {
            g_bound_ok = false;
            xs.push(None);
            continue;
        }
        let root = (one - gn * gn).sqrt();
        // derivative relation per axis
        let grads_x: Vec<Vec<T>> = maps
            .components
            .iter()
            .map(|f| ParamMaps::grad_any(f, t))
            .collect();
        let grad_y = ParamMaps::grad_any(&maps.y, t);
        for i in 0..n {
            let di_x: Vec<T> = (0..n).map(|j| grads_x[j][i]).collect();
            let lhs = linalg::dot(&di_x, &g) / (one + root);
            let resid = (lhs - grad_y[i]).abs();
            if resid > worst_rel {
                worst_rel = resid;
            }
        }
        let x_field: Vec<T> = g.iter().map(|&gi| gi / root).collect();
        xs.push(Some(x_field));
    }
    let mut worst_mono = T::infinity();
    for i in 0..samples.len() {
        for j in (i + 1)..samples.len() {
            if let (Some(xi), Some(xj)) = (&xs[i], &xs[j]) {
                let dx = linalg::sub(xi, xj);
                let dt = linalg::sub(&samples[i], &samples[j]);
                let prod = linalg::dot(&dx, &dt);
                if prod < worst_mono {
                    worst_mono = prod;
                }
            }
        }
    }
    if worst_mono == T::infinity() {
        worst_mono = T::zero();
    }
    ParamValidationReport {
        g_bound_ok,
        worst_g_norm: worst_g,
        relation_ok: worst_rel <= relation_tol,
        worst_relation_residual: worst_rel,
        monotone_ok: worst_mono >= -monotone_tol,
        worst_monotone_product: worst_mono,
        relation_tol,
        monotone_tol,
    }
}

/// Outcome of checking one parametric point against the paraboloid family
/// `y = |x - s|^2 / (2 f(s)) + f(s) / 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeReport<T> {
    /// `| |x(t)-t|^2/(2 f(t)) + f(t)/2 - y(t) |`
    pub membership_residual: T,
    /// Distance between the paraboloid gradient at the contact point and
    /// the equidistant gradient `g / (1 + sqrt(1 - |g|^2))`.
    pub tangency_residual: T,
    /// Minimum over probes of `P_s(x(t)) - y(t)`; nonnegative when the
    /// graph stays below the family.
    pub worst_probe_margin: T,
    pub probes: usize,
    pub tol: T,
}

impl<T: Scalar> EnvelopeReport<T> {
    pub fn pass(&self) -> bool {
        self.membership_residual <= self.tol
            && self.tangency_residual <= self.tol
            && self.worst_probe_margin >= -self.tol
    }
}

impl<T: Scalar> fmt::Display for EnvelopeReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "envelope: {} (membership {:.3e}, tangency {:.3e}, probe margin {:.3e}, {} probes)",
            if self.pass() { "pass" } else { "FAIL" },
            self.membership_residual.to_f64().unwrap_or(f64::NAN),
            self.tangency_residual.to_f64().unwrap_or(f64::NAN),
            self.worst_probe_margin.to_f64().unwrap_or(f64::NAN),
            self.probes,
        )
    }
}

/// Check that the parametric point at `t` touches its paraboloid, with
/// matching gradient, and stays below the paraboloids of the probe
/// parameters.
pub fn envelope_check<T: Scalar>(
    param: &EquidistantParam<T>,
    t: &[T],
    probes: &[Vec<T>],
    tol: T,
) -> Result<EnvelopeReport<T>> {
    let half = c::<T>(0.5);
    let f_t = param.field().eval(t);
    let (x0, y0) = param.param_point(t)?;
    let offset = linalg::dist(&x0, t);
    let membership = (offset * offset / (f_t + f_t) + half * f_t - y0).abs();

    let g: Vec<T> = x0.iter().zip(t).map(|(&xi, &ti)| (xi - ti) / y0).collect();
    let gn2 = linalg::dot(&g, &g);
    let denom = T::one() + (T::one() - gn2).sqrt();
    let mut tangency = T::zero();
    for i in 0..t.len() {
        let parab = (x0[i] - t[i]) / f_t;
        let equi = g[i] / denom;
        tangency = tangency + (parab - equi) * (parab - equi);
    }
    let tangency = tangency.sqrt();

    let mut worst = T::infinity();
    for s in probes {
        let f_s = param.field().eval(s);
        let off = linalg::dist(&x0, s);
        let height = off * off / (f_s + f_s) + half * f_s;
        let margin = height - y0;
        if margin < worst {
            worst = margin;
        }
    }
    if probes.is_empty() {
        worst = T::zero();
    }
    Ok(EnvelopeReport {
        membership_residual: membership,
        tangency_residual: tangency,
        worst_probe_margin: worst,
        probes: probes.len(),
        tol,
    })
}

/// Report for the lower bound `<d_v x, v + (d_v f / (1 + w)) grad f> >= |v|^2`
/// (with `w = sqrt(1 + |grad f|^2)`), checked per direction along both the
/// analytic and the finite-difference route where available.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobianBoundReport<T> {
    pub directions: usize,
    /// Smallest value of `lhs - |v|^2` seen over directions and routes.
    pub worst_margin: T,
    /// Largest disagreement between analytic and finite-difference rows.
    pub max_route_gap: T,
    pub tol: T,
}

impl<T: Scalar> JacobianBoundReport<T> {
    pub fn pass(&self) -> bool {
        self.worst_margin >= -self.tol
    }
}

impl<T: Scalar> fmt::Display for JacobianBoundReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "jacobian bound: {} ({} directions, worst margin {:.3e}, route gap {:.3e})",
            if self.pass() { "pass" } else { "FAIL" },
            self.directions,
            self.worst_margin.to_f64().unwrap_or(f64::NAN),
            self.max_route_gap.to_f64().unwrap_or(f64::NAN),
        )
    }
}

pub fn jacobian_bound_check<T: Scalar>(
    param: &EquidistantParam<T>,
    t: &[T],
    directions: &[Vec<T>],
    tol: T,
) -> Result<JacobianBoundReport<T>> {
    let grad = param.field().grad(t).map_err(|e| match e {
        Error::NonDifferentiable => Error::GradientUnavailable,
        other => other,
    })?;
    let w = (T::one() + linalg::dot(&grad, &grad)).sqrt();
    let denom = T::one() + w;
    let mut worst = T::infinity();
    let mut route_gap = T::zero();
    for v in directions {
        let dv_f = linalg::dot(&grad, v);
        let rhs: Vec<T> = (0..t.len())
            .map(|i| v[i] + dv_f / denom * grad[i])
            .collect();
        let vv = linalg::dot(v, v);
        let fd = param.dir_deriv_x_fd(t, v)?;
        let margin_fd = linalg::dot(&fd, &rhs) - vv;
        if margin_fd < worst {
            worst = margin_fd;
        }
        if param.field().differentiability() == Differentiability::Exact {
            let analytic = param.dir_deriv_x_analytic(t, v)?;
            let margin_an = linalg::dot(&analytic, &rhs) - vv;
            if margin_an < worst {
                worst = margin_an;
            }
            let gap = linalg::dist(&analytic, &fd);
            if gap > route_gap {
                route_gap = gap;
            }
        }
    }
    if directions.is_empty() {
        worst = T::zero();
    }
    Ok(JacobianBoundReport {
        directions: directions.len(),
        worst_margin: worst,
        max_route_gap: route_gap,
        tol,
    })
}
