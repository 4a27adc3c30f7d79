//! The inverse problem: given a smooth convex positive candidate `G`,
//! decide whether it is an equidistant function and reconstruct the
//! generating field.
//!
//! The three conditions tested on a sample grid are `|grad G| < 1`,
//! injectivity of the foot map
//! `H(x) = x - 2 G(x) grad G(x) / (1 + |grad G(x)|^2)`
//! (grid evidence: separated images, Newton inversion roundtrips and a
//! nonvanishing finite-difference Jacobian), and the pairwise
//! monotonicity `<Y(x1) - Y(x2), H(x1) - H(x2)> >= 0` of
//! `Y = 2 grad G / (1 - |grad G|^2)`. When all pass, the generating field
//! is `f(t) = y + sqrt(y^2 - |x - t|^2)` at `t = H(x)`, `y = G(x)`, and a
//! bisection cross-check confirms the reconstruction reproduces `G`.

use std::fmt;

use crate::dsl::{Differentiability, ScalarField};
use crate::error::{Error, Result};
use crate::geometry::{EpigraphFocal, SearchBox};
use crate::parametric::NewtonConfig;
use crate::sample::AxisRange;
use crate::solver::solve_g_at;
use crate::{c, linalg, Scalar};

/// Tolerances and evidence thresholds for [`CandidateG::characterize`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacterizeConfig<T> {
    /// Minimum pairwise distance between grid images of `H`.
    pub image_sep: T,
    /// Tolerance on the Newton roundtrip `H^{-1}(H(x)) = x`.
    pub roundtrip_tol: T,
    /// Slack allowed in the pairwise monotonicity products.
    pub monotone_tol: T,
    /// Smallest acceptable `|det H'|` on the grid.
    pub det_floor: T,
    /// Tolerance for the bisection cross-check of the reconstruction.
    pub crosscheck_tol: T,
    pub crosscheck_points: usize,
    pub newton: NewtonConfig<T>,
}

impl<T: Scalar> Default for CharacterizeConfig<T> {
    fn default() -> Self {
        CharacterizeConfig {
            image_sep: c(1e-9),
            roundtrip_tol: c(1e-8),
            monotone_tol: c(1e-9),
            det_floor: c(1e-8),
            crosscheck_tol: c(1e-7),
            crosscheck_points: 5,
            // Inverting H only needs to be an order tighter than the
            // roundtrip tolerance; finite-difference gradients leave
            // ~1e-10 of noise in H itself, so 1e-12 would stall.
            newton: NewtonConfig {
                tol: c(1e-9),
                ..NewtonConfig::default()
            },
        }
    }
}

/// A candidate equidistant function over a sample grid.
#[derive(Debug, Clone)]
pub struct CandidateG<T: Scalar> {
    field: ScalarField<T>,
    grid: Vec<AxisRange<T>>,
}

impl<T: Scalar> CandidateG<T> {
    /// The field needs gradient access (exact or finite-difference) and
    /// the grid must match its dimension.
    pub fn new(field: ScalarField<T>, grid: Vec<AxisRange<T>>) -> Result<Self> {
        if field.differentiability() == Differentiability::NonDifferentiable {
            return Err(Error::GradientUnavailable);
        }
        if grid.len() != field.n() {
            return Err(Error::DimensionMismatch {
                expected: field.n(),
                got: grid.len(),
            });
        }
        Ok(CandidateG { field, grid })
    }

    pub fn field(&self) -> &ScalarField<T> {
        &self.field
    }

    pub fn grid(&self) -> &[AxisRange<T>] {
        &self.grid
    }

    /// The foot map `H(x) = x - 2 G grad G / (1 + |grad G|^2)`.
    pub fn h_map(&self, x: &[T]) -> Result<Vec<T>> {
        h_map_of(&self.field, x)
    }

    /// The monotone field `Y(x) = 2 grad G / (1 - |grad G|^2)`; rejects
    /// points where `|grad G| >= 1`.
    pub fn y_field(&self, x: &[T]) -> Result<Vec<T>> {
        let grad = grad_of(&self.field, x)?;
        let gn2 = linalg::dot(&grad, &grad);
        if gn2 >= T::one() {
            return Err(Error::GradientBoundViolated {
                norm: gn2.sqrt().to_f64().unwrap_or(f64::NAN),
            });
        }
        let two = c::<T>(2.0);
        Ok(grad.iter().map(|&gi| two * gi / (T::one() - gn2)).collect())
    }

    /// Run the three-condition test and, when everything passes, build
    /// and cross-check the reconstructed generating field.
    pub fn characterize(&self, cfg: &CharacterizeConfig<T>) -> Result<CharacterizationReport<T>> {
        let points = crate::sample::grid(&self.grid);
        let m = points.len();
        let mut gvals = Vec::with_capacity(m);
        let mut grads = Vec::with_capacity(m);
        let mut worst_grad = T::zero();
        for x in &points {
            let gv = self.field.eval(x);
            if gv <= T::zero() {
                return Err(Error::NonPositiveField {
                    value: gv.to_f64().unwrap_or(f64::NAN),
                });
            }
            let grad = grad_of(&self.field, x)?;
            let gn = linalg::norm(&grad);
            if gn > worst_grad {
                worst_grad = gn;
            }
            gvals.push(gv);
            grads.push(grad);
        }
        let grad_bound_ok = worst_grad < T::one();
        let mut report = CharacterizationReport {
            grid_size: m,
            grad_bound_ok,
            worst_grad_norm: worst_grad,
            h_injective: None,
            y_monotone: None,
            crosscheck: None,
            reconstructed: None,
        };
        if !grad_bound_ok {
            return Ok(report);
        }

        let hs: Vec<Vec<T>> = points
            .iter()
            .zip(gvals.iter().zip(&grads))
            .map(|(x, (&gv, grad))| h_from_parts(x, gv, grad))
            .collect();
        let ys: Vec<Vec<T>> = grads
            .iter()
            .map(|grad| {
                let gn2 = linalg::dot(grad, grad);
                let two = c::<T>(2.0);
                grad.iter().map(|&gi| two * gi / (T::one() - gn2)).collect()
            })
            .collect();

        // (b) injectivity evidence
        let mut min_sep = T::infinity();
        for i in 0..m {
            for j in (i + 1)..m {
                let d = linalg::dist(&hs[i], &hs[j]);
                if d < min_sep {
                    min_sep = d;
                }
            }
        }
        let mut worst_roundtrip = T::zero();
        let mut min_det = T::infinity();
        for (x, h) in points.iter().zip(&hs) {
            let jac = h_jacobian_fd(&self.field, x, cfg.newton.fd_step)?;
            let d = linalg::det(jac).abs();
            if d < min_det {
                min_det = d;
            }
            match invert_h(&self.field, h, h, &cfg.newton) {
                Ok(back) => {
                    let err = linalg::dist(&back, x);
                    if err > worst_roundtrip {
                        worst_roundtrip = err;
                    }
                }
                Err(_) => {
                    worst_roundtrip = T::infinity();
                }
            }
        }
        let injective_ok = min_sep >= cfg.image_sep
            && worst_roundtrip <= cfg.roundtrip_tol
            && min_det >= cfg.det_floor;
        report.h_injective = Some(InjectivityEvidence {
            min_image_separation: min_sep,
            worst_roundtrip,
            min_abs_jacobian_det: min_det,
            ok: injective_ok,
        });

        // (c) pairwise monotonicity of Y against H
        let mut worst_mono = T::infinity();
        for i in 0..m {
            for j in (i + 1)..m {
                let dy = linalg::sub(&ys[i], &ys[j]);
                let dh = linalg::sub(&hs[i], &hs[j]);
                let prod = linalg::dot(&dy, &dh);
                if prod < worst_mono {
                    worst_mono = prod;
                }
            }
        }
        if worst_mono == T::infinity() {
            worst_mono = T::zero();
        }
        let monotone_ok = worst_mono >= -cfg.monotone_tol;
        report.y_monotone = Some(MonotoneEvidence {
            worst_pair_product: worst_mono,
            ok: monotone_ok,
        });

        if !(injective_ok && monotone_ok) {
            return Ok(report);
        }

        // reconstruction f(t) = y + sqrt(y^2 - |x - t|^2) at t = H(x)
        let mut table = Vec::with_capacity(m);
        for ((x, h), &gv) in points.iter().zip(&hs).zip(&gvals) {
            let off = linalg::dist(x, h);
            let rad = gv * gv - off * off;
            if rad < T::zero() {
                return Err(Error::NegativeRadicand);
            }
            table.push((h.clone(), gv + rad.sqrt()));
        }
        let reconstructed = ReconstructedF {
            candidate: self.field.clone(),
            newton: cfg.newton,
            table,
        };

        // cross-check: bisection on the reconstructed field reproduces G
        let box_ = reconstruction_box(&reconstructed.table, &self.grid);
        let focal = EpigraphFocal::new(reconstructed.to_field(), box_);
        let spots = spot_indices(m, cfg.crosscheck_points);
        let mut worst_gap = T::zero();
        for &i in &spots {
            let x = &points[i];
            let g_bis = solve_g_at(x, &focal, c(1e-10))?;
            let gap = (g_bis - gvals[i]).abs();
            if gap > worst_gap {
                worst_gap = gap;
            }
        }
        report.crosscheck = Some(CrosscheckEvidence {
            points: spots.len(),
            worst_gap,
            ok: worst_gap <= cfg.crosscheck_tol,
        });
        report.reconstructed = Some(reconstructed);
        Ok(report)
    }
}

fn grad_of<T: Scalar>(field: &ScalarField<T>, x: &[T]) -> Result<Vec<T>> {
    field.grad(x).map_err(|e| match e {
        Error::NonDifferentiable => Error::GradientUnavailable,
        other => other,
    })
}

fn h_from_parts<T: Scalar>(x: &[T], gv: T, grad: &[T]) -> Vec<T> {
    let gn2 = linalg::dot(grad, grad);
    let scale = (gv + gv) / (T::one() + gn2);
    x.iter()
        .zip(grad)
        .map(|(&xi, &gi)| xi - scale * gi)
        .collect()
}

fn h_map_of<T: Scalar>(field: &ScalarField<T>, x: &[T]) -> Result<Vec<T>> {
    let gv = field.eval(x);
    let grad = grad_of(field, x)?;
    Ok(h_from_parts(x, gv, &grad))
}

fn h_jacobian_fd<T: Scalar>(field: &ScalarField<T>, x: &[T], fd_step: T) -> Result<Vec<Vec<T>>> {
    let n = x.len();
    let mut cols = Vec::with_capacity(n);
    for j in 0..n {
        let h = fd_step * num_traits::Float::max(T::one(), x[j].abs());
        let mut plus = x.to_vec();
        let mut minus = x.to_vec();
        plus[j] = plus[j] + h;
        minus[j] = minus[j] - h;
        let hp = h_map_of(field, &plus)?;
        let hm = h_map_of(field, &minus)?;
        cols.push(
            hp.into_iter()
                .zip(hm)
                .map(|(a, b)| (a - b) / (h + h))
                .collect::<Vec<T>>(),
        );
    }
    Ok((0..n)
        .map(|i| (0..n).map(|j| cols[j][i]).collect())
        .collect())
}

fn invert_h<T: Scalar>(
    field: &ScalarField<T>,
    target: &[T],
    init: &[T],
    newton: &NewtonConfig<T>,
) -> Result<Vec<T>> {
    let map = |u: &[T]| h_map_of(field, u);
    let jac = |u: &[T]| h_jacobian_fd(field, u, newton.fd_step);
    linalg::damped_newton(&map, &jac, target, init, newton.tol, newton.max_iter)
}

fn reconstruction_box<T: Scalar>(table: &[(Vec<T>, T)], grid: &[AxisRange<T>]) -> SearchBox<T> {
    let n = grid.len();
    let mut lo = vec![T::infinity(); n];
    let mut hi = vec![T::neg_infinity(); n];
    for (t, _) in table {
        for k in 0..n {
            if t[k] < lo[k] {
                lo[k] = t[k];
            }
            if t[k] > hi[k] {
                hi[k] = t[k];
            }
        }
    }
    for k in 0..n {
        let pad = num_traits::Float::max(
            (hi[k] - lo[k]) * c(0.25),
            (grid[k].max - grid[k].min) * c(0.05),
        );
        lo[k] = lo[k] - pad;
        hi[k] = hi[k] + pad;
    }
    SearchBox::new(lo, hi)
}

fn spot_indices(total: usize, want: usize) -> Vec<usize> {
    let want = want.clamp(1, total);
    if want == total {
        return (0..total).collect();
    }
    (0..want)
        .map(|k| k * (total - 1) / (want - 1).max(1))
        .collect()
}

/// Grid evidence for injectivity of the foot map.
#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityEvidence<T> {
    pub min_image_separation: T,
    pub worst_roundtrip: T,
    pub min_abs_jacobian_det: T,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneEvidence<T> {
    pub worst_pair_product: T,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrosscheckEvidence<T> {
    pub points: usize,
    pub worst_gap: T,
    pub ok: bool,
}

/// The reconstructed generating field: a sample table plus an exact
/// re-evaluator that inverts the foot map per query (no interpolation).
#[derive(Debug, Clone)]
pub struct ReconstructedF<T: Scalar> {
    candidate: ScalarField<T>,
    newton: NewtonConfig<T>,
    /// `(t, f(t))` rows at the grid images `t = H(x)`.
    pub table: Vec<(Vec<T>, T)>,
}

impl<T: Scalar> ReconstructedF<T> {
    pub fn eval(&self, t: &[T]) -> Result<T> {
        let x = invert_h(&self.candidate, t, t, &self.newton)?;
        let y = self.candidate.eval(&x);
        let off = linalg::dist(&x, t);
        let rad = y * y - off * off;
        if rad < T::zero() {
            return Err(Error::NegativeRadicand);
        }
        Ok(y + rad.sqrt())
    }

    /// Wrap as an opaque field; evaluation failures surface as NaN.
    pub fn to_field(&self) -> ScalarField<T> {
        let inner = self.clone();
        ScalarField::custom(
            self.candidate.n(),
            Differentiability::FiniteDiff,
            move |t: &[T]| inner.eval(t).unwrap_or_else(|_| T::nan()),
        )
    }
}

/// Outcome of the characterization test. The reconstruction is present
/// only when all three conditions (and the cross-check) pass.
#[derive(Debug, Clone)]
pub struct CharacterizationReport<T: Scalar> {
    pub grid_size: usize,
    pub grad_bound_ok: bool,
    pub worst_grad_norm: T,
    pub h_injective: Option<InjectivityEvidence<T>>,
    pub y_monotone: Option<MonotoneEvidence<T>>,
    pub crosscheck: Option<CrosscheckEvidence<T>>,
    pub reconstructed: Option<ReconstructedF<T>>,
}

impl<T: Scalar> CharacterizationReport<T> {
    pub fn pass(&self) -> bool {
        self.grad_bound_ok
            && self.h_injective.as_ref().is_some_and(|e| e.ok)
            && self.y_monotone.as_ref().is_some_and(|e| e.ok)
            && self.crosscheck.as_ref().is_some_and(|e| e.ok)
    }
}

impl<T: Scalar> fmt::Display for CharacterizationReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "gradient bound |grad G| < 1: {} (worst {:.6})",
            if self.grad_bound_ok { "pass" } else { "FAIL" },
            self.worst_grad_norm.to_f64().unwrap_or(f64::NAN),
        )?;
        match &self.h_injective {
            Some(e) => writeln!(
                f,
                "H injectivity: {} (min image sep {:.3e}, worst roundtrip {:.3e}, min |det H'| {:.3e})",
                if e.ok { "pass" } else { "FAIL" },
                e.min_image_separation.to_f64().unwrap_or(f64::NAN),
                e.worst_roundtrip.to_f64().unwrap_or(f64::NAN),
                e.min_abs_jacobian_det.to_f64().unwrap_or(f64::NAN),
            )?,
            None => writeln!(f, "H injectivity: skipped")?,
        }
        match &self.y_monotone {
            Some(e) => writeln!(
                f,
                "Y monotone against H: {} (worst pair product {:.3e})",
                if e.ok { "pass" } else { "FAIL" },
                e.worst_pair_product.to_f64().unwrap_or(f64::NAN),
            )?,
            None => writeln!(f, "Y monotone against H: skipped")?,
        }
        match &self.crosscheck {
            Some(e) => write!(
                f,
                "reconstruction cross-check: {} ({} spot points, worst gap {:.3e})",
                if e.ok { "pass" } else { "FAIL" },
                e.points,
                e.worst_gap.to_f64().unwrap_or(f64::NAN),
            ),
            None => write!(f, "reconstruction cross-check: skipped"),
        }
    }
}
