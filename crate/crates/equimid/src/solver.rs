//! The equidistant function `G` for an arbitrary positive continuous
//! field, computed by bisection of `z -> d((x, z), epi f) - z` on the
//! bracket `(0, f(x))`, plus the order-theoretic checks: pointwise
//! minima of families, monotonicity in `f`, and convexity.

use std::fmt;

use crate::error::{Error, Result};
use crate::geometry::{EpigraphFocal, SpacePoint};
use crate::parametric::EquidistantParam;
use crate::{c, linalg, Scalar};

const MAX_BISECTIONS: usize = 80;

/// Solve for the unique height `z` with `d((x, z), epi f) = z`.
///
/// The residual is positive at `z = 0` and negative at `z = f(x)`, so the
/// root is bracketed from the start; iteration stops when the residual
/// magnitude drops below `tol`.
pub fn solve_g_at<T: Scalar>(x: &[T], focal: &EpigraphFocal<T>, tol: T) -> Result<T> {
    if x.len() != focal.n() {
        return Err(Error::DimensionMismatch {
            expected: focal.n(),
            got: x.len(),
        });
    }
    let fx = focal.field().eval(x);
    if fx <= T::zero() {
        return Err(Error::NonPositiveField {
            value: fx.to_f64().unwrap_or(f64::NAN),
        });
    }
    let residual = |z: T| -> Result<T> {
        let p = SpacePoint::new(x.to_vec(), z);
        let d = focal
            .distance_to_epigraph(&p)
            .map_err(|e| match e {
                Error::BoxTooSmall { .. } => Error::OracleFailure(e.to_string()),
                other => other,
            })?
            .distance;
        Ok(d - z)
    };
    let mut lo = T::zero();
    let mut hi = fx;
    let mut mid = (lo + hi) * c(0.5);
    for _ in 0..MAX_BISECTIONS {
        mid = (lo + hi) * c(0.5);
        let r = residual(mid)?;
        if r.abs() <= tol {
            return Ok(mid);
        }
        if r > T::zero() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(mid)
}

enum Source<T: Scalar> {
    Bisection(EpigraphFocal<T>),
    Parametric(EquidistantParam<T>),
}

/// An evaluable equidistant function: bisection against the distance
/// oracle for any continuous field, or the parametric inverse for smooth
/// convex fields.
pub struct EquidistantFunction<T: Scalar> {
    source: Source<T>,
    tolerance: T,
}

impl<T: Scalar> EquidistantFunction<T> {
    /// Bisection mode with the default residual tolerance `1e-10`.
    pub fn bisection(focal: EpigraphFocal<T>) -> Self {
        EquidistantFunction {
            source: Source::Bisection(focal),
            tolerance: c(1e-10),
        }
    }

    pub fn parametric(param: EquidistantParam<T>) -> Self {
        EquidistantFunction {
            source: Source::Parametric(param),
            tolerance: c(1e-10),
        }
    }

    pub fn with_tolerance(mut self, tol: T) -> Self {
        self.tolerance = tol;
        self
    }

    pub fn tolerance(&self) -> T {
        self.tolerance
    }

    pub fn n(&self) -> usize {
        match &self.source {
            Source::Bisection(focal) => focal.n(),
            Source::Parametric(param) => param.n(),
        }
    }

    pub fn eval(&self, x: &[T]) -> Result<T> {
        match &self.source {
            Source::Bisection(focal) => solve_g_at(x, focal, self.tolerance),
            Source::Parametric(param) => param.eval_g(x),
        }
    }
}

/// Pointwise minimum of a family of equidistant functions at `x`.
pub fn min_compose<T: Scalar>(family: &[EquidistantFunction<T>], x: &[T]) -> Result<T> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let n = family[0].n();
    for g in family {
        if g.n() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: g.n(),
            });
        }
    }
    let mut best = T::infinity();
    for g in family {
        let v = g.eval(x)?;
        if v < best {
            best = v;
        }
    }
    Ok(best)
}

/// Outcome of checking `f1 < f2  =>  G1 < G2` on samples.
#[derive(Debug, Clone, PartialEq)]
pub enum MonotonicityOutcome<T> {
    /// The hypothesis `f1 < f2` failed at a sample; nothing to check.
    PreconditionUnmet { sample: usize },
    /// Hypothesis held everywhere; margin is the smallest `G2 - G1`.
    Checked { worst_margin: T, violations: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct MonotonicityReport<T> {
    pub samples: usize,
    pub outcome: MonotonicityOutcome<T>,
    pub tol: T,
}

impl<T: Scalar> MonotonicityReport<T> {
    pub fn pass(&self) -> bool {
        matches!(
            self.outcome,
            MonotonicityOutcome::Checked { violations: 0, .. }
        )
    }
}

impl<T: Scalar> fmt::Display for MonotonicityReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.outcome {
            MonotonicityOutcome::PreconditionUnmet { sample } => write!(
                f,
                "monotonicity: precondition unmet (f1 < f2 fails at sample {sample})"
            ),
            MonotonicityOutcome::Checked {
                worst_margin,
                violations,
            } => write!(
                f,
                "monotonicity: {} ({} samples, min G2-G1 = {:.3e})",
                if *violations == 0 { "pass" } else { "FAIL" },
                self.samples,
                worst_margin.to_f64().unwrap_or(f64::NAN),
            ),
        }
    }
}

/// Check that the map from the field to its equidistant function is
/// monotone: where `f1 < f2` holds on all samples, `G1 < G2 + tol` must
/// hold too.
pub fn monotonicity_check<T: Scalar>(
    f1: &EpigraphFocal<T>,
    f2: &EpigraphFocal<T>,
    samples: &[Vec<T>],
    tol: T,
) -> Result<MonotonicityReport<T>> {
    for (i, x) in samples.iter().enumerate() {
        // negated so that NaN evaluations invalidate the hypothesis
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(f1.field().eval(x) < f2.field().eval(x)) {
            return Ok(MonotonicityReport {
                samples: samples.len(),
                outcome: MonotonicityOutcome::PreconditionUnmet { sample: i },
                tol,
            });
        }
    }
    let mut worst = T::infinity();
    let mut violations = 0;
    for x in samples {
        let g1 = solve_g_at(x, f1, tol.min(c(1e-10)))?;
        let g2 = solve_g_at(x, f2, tol.min(c(1e-10)))?;
        let margin = g2 - g1;
        if margin < worst {
            worst = margin;
        }
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(g1 < g2 + tol) {
            violations += 1;
        }
    }
    if samples.is_empty() {
        worst = T::zero();
    }
    Ok(MonotonicityReport {
        samples: samples.len(),
        outcome: MonotonicityOutcome::Checked {
            worst_margin: worst,
            violations,
        },
        tol,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvexityReport<T> {
    pub triples: usize,
    /// Largest value of `G(blend) - (lambda G(a) + (1-lambda) G(b))`.
    pub worst_violation: T,
    pub violations: usize,
    pub tol: T,
}

impl<T: Scalar> ConvexityReport<T> {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

impl<T: Scalar> fmt::Display for ConvexityReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "convexity: {} ({} triples, worst violation {:.3e})",
            if self.pass() { "pass" } else { "FAIL" },
            self.triples,
            self.worst_violation.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Check convexity of `G` on interpolation triples `(a, b, lambda)`:
/// `G(lambda a + (1-lambda) b) <= lambda G(a) + (1-lambda) G(b) + tol`.
/// Meaningful when the generating field is convex.
pub fn convexity_check<T: Scalar>(
    g: &EquidistantFunction<T>,
    triples: &[(Vec<T>, Vec<T>, T)],
    tol: T,
) -> Result<ConvexityReport<T>> {
    let mut worst = T::neg_infinity();
    let mut violations = 0;
    for (a, b, lambda) in triples {
        assert!(
            T::zero() <= *lambda && *lambda <= T::one(),
            "lambda must lie in [0, 1]"
        );
        let blend: Vec<T> = a
            .iter()
            .zip(b)
            .map(|(&ai, &bi)| *lambda * ai + (T::one() - *lambda) * bi)
            .collect();
        let lhs = g.eval(&blend)?;
        let rhs = *lambda * g.eval(a)? + (T::one() - *lambda) * g.eval(b)?;
        let violation = lhs - rhs;
        if violation > worst {
            worst = violation;
        }
        if violation > tol {
            violations += 1;
        }
    }
    if triples.is_empty() {
        worst = T::zero();
    }
    Ok(ConvexityReport {
        triples: triples.len(),
        worst_violation: worst,
        violations,
        tol,
    })
}

/// Advisory continuity scan: largest jump between consecutive samples,
/// normalized by the sample spacing. Dense sampling of a continuous `G`
/// keeps this bounded; it is heuristic evidence, not a proof.
pub fn continuity_scan<T: Scalar>(g: &EquidistantFunction<T>, samples: &[Vec<T>]) -> Result<T> {
    let mut worst = T::zero();
    let mut prev: Option<(Vec<T>, T)> = None;
    for x in samples {
        let v = g.eval(x)?;
        if let Some((px, pv)) = prev {
            let gap = linalg::dist(&px, x);
            if gap > T::zero() {
                let slope = (v - pv).abs() / gap;
                if slope > worst {
                    worst = slope;
                }
            }
        }
        prev = Some((x.clone(), v));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::ScalarField;
    use crate::geometry::SearchBox;

    const X1: f64 = 1.449489742783178;
    const Y1: f64 = 0.7785390719815306;

    fn focal(expr: &str, lo: f64, hi: f64) -> EpigraphFocal<f64> {
        EpigraphFocal::new(
            ScalarField::parse(expr, 1).unwrap(),
            SearchBox::cube(lo, hi, 1),
        )
    }

    #[test]
    fn constant_field_gives_the_midline() {
        let f = focal("2", -4.0, 4.0);
        let g = solve_g_at(&[0.0], &f, 1e-10).unwrap();
        assert!((g - 1.0).abs() < 1e-9, "{g}");
    }

    #[test]
    fn hyperboloid_matches_parametric_values() {
        let f = focal("sqrt(t1^2+1)", -8.0, 8.0);
        let g0 = solve_g_at(&[0.0], &f, 1e-10).unwrap();
        assert!((g0 - 0.5).abs() < 1e-8, "{g0}");
        let g1 = solve_g_at(&[X1], &f, 1e-10).unwrap();
        assert!((g1 - Y1).abs() < 1e-8, "{g1}");
    }

    #[test]
    fn sandwich_between_zero_and_f() {
        let f = focal("sqrt(t1^2+1)", -10.0, 10.0);
        for &x in &[-3.0, -1.0, 0.0, 0.4, 2.7] {
            let g = solve_g_at(&[x], &f, 1e-10).unwrap();
            let fx = f.field().eval(&[x]);
            assert!(0.0 < g && g < fx, "x={x}: G={g}, f={fx}");
        }
    }

    #[test]
    fn distance_signs_flip_across_the_graph() {
        let f = focal("sqrt(t1^2+1)", -10.0, 10.0);
        let x = [0.8];
        let g = solve_g_at(&x, &f, 1e-12).unwrap();
        let eps = 1e-3;
        let above = SpacePoint::new(x.to_vec(), g + eps);
        let below = SpacePoint::new(x.to_vec(), g - eps);
        let d_above = f.distance_to_epigraph(&above).unwrap().distance;
        let d_below = f.distance_to_epigraph(&below).unwrap().distance;
        assert!(d_above < g + eps, "above: {d_above} vs {}", g + eps);
        assert!(g - eps < d_below, "below: {d_below} vs {}", g - eps);
    }

    #[test]
    fn any_valid_bracket_finds_the_same_root() {
        // vertical uniqueness: restart bisection from a shifted bracket
        let f = focal("sqrt(t1^2+1)", -10.0, 10.0);
        let x = [1.3];
        let tol = 1e-10;
        let g = solve_g_at(&x, &f, tol).unwrap();
        let residual = |z: f64| {
            f.distance_to_epigraph(&SpacePoint::new(x.to_vec(), z))
                .unwrap()
                .distance
                - z
        };
        let (mut lo, mut hi) = (g - 0.25, g + 0.25);
        assert!(residual(lo) > 0.0 && residual(hi) < 0.0);
        for _ in 0..60 {
            let mid = 0.5 * (lo + hi);
            if residual(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let g2 = 0.5 * (lo + hi);
        assert!((g - g2).abs() <= 2.0 * tol + 1e-12, "{g} vs {g2}");
    }

    #[test]
    fn exhausted_box_surfaces_as_oracle_failure() {
        let focal = EpigraphFocal::new(
            ScalarField::parse("sqrt(t1^2+1)", 1).unwrap(),
            SearchBox::cube(-0.1, 0.1, 1),
        )
        .with_refinement(crate::geometry::RefineConfig {
            max_expansions: 0,
            ..Default::default()
        });
        let err = solve_g_at(&[5.0], &focal, 1e-10).unwrap_err();
        assert!(matches!(err, Error::OracleFailure(_)), "{err:?}");
    }

    #[test]
    fn min_family_of_constants() {
        let g1 = EquidistantFunction::bisection(focal("2", -4.0, 4.0));
        let g2 = EquidistantFunction::bisection(focal("4", -4.0, 4.0));
        let v = min_compose(&[g1, g2], &[0.7]).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn singleton_family_is_identity() {
        let g1 = EquidistantFunction::bisection(focal("sqrt(t1^2+1)", -8.0, 8.0));
        let direct = g1.eval(&[0.9]).unwrap();
        let v = min_compose(&[g1], &[0.9]).unwrap();
        assert_eq!(v, direct);
    }

    #[test]
    fn families_can_mix_bisection_and_parametric_sources() {
        let field: ScalarField<f64> = ScalarField::parse("sqrt(t1^2+1)", 1).unwrap();
        let g_bis = EquidistantFunction::bisection(EpigraphFocal::new(
            field.clone(),
            SearchBox::cube(-8.0, 8.0, 1),
        ));
        let g_par = EquidistantFunction::parametric(
            crate::parametric::EquidistantParam::new(field).unwrap(),
        );
        let other = EquidistantFunction::bisection(focal("sqrt((t1-3)^2+1)", -7.0, 10.0));
        let x = [2.1];
        let direct = g_par.eval(&x).unwrap().min(other.eval(&x).unwrap());
        let v = min_compose(&[g_bis, g_par, other], &x).unwrap();
        assert!((v - direct).abs() < 1e-7, "{v} vs {direct}");
    }

    #[test]
    fn mixed_dimensions_are_rejected() {
        let g1 = EquidistantFunction::bisection(focal("2", -4.0, 4.0));
        let g2 = EquidistantFunction::bisection(EpigraphFocal::new(
            ScalarField::constant(2.0, 2),
            SearchBox::cube(-4.0, 4.0, 2),
        ));
        assert!(matches!(
            min_compose(&[g1, g2], &[0.0]),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn empty_family_is_an_error() {
        let fam: Vec<EquidistantFunction<f64>> = vec![];
        assert!(matches!(min_compose(&fam, &[0.0]), Err(Error::EmptyFamily)));
    }

    #[test]
    fn min_field_bisection_equals_pointwise_minimum() {
        let f1 = focal("sqrt(t1^2+1)", -7.0, 10.0);
        let f2 = focal("sqrt((t1-3)^2+1)", -7.0, 10.0);
        let fmin = EpigraphFocal::new(
            ScalarField::min_of(vec![f1.field().clone(), f2.field().clone()]).unwrap(),
            SearchBox::cube(-7.0, 10.0, 1),
        );
        for &x in &[-2.0, 0.0, 1.5, 3.0, 5.5] {
            let lhs = solve_g_at(&[x], &fmin, 1e-10).unwrap();
            let rhs = solve_g_at(&[x], &f1, 1e-10)
                .unwrap()
                .min(solve_g_at(&[x], &f2, 1e-10).unwrap());
            assert!((lhs - rhs).abs() < 1e-7, "x={x}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn monotonicity_of_constants_and_vacuous_case() {
        let f1 = focal("1", -4.0, 4.0);
        let f2 = focal("3", -4.0, 4.0);
        let samples: Vec<Vec<f64>> = vec![vec![-1.0], vec![0.0], vec![2.0]];
        let rep = monotonicity_check(&f1, &f2, &samples, 1e-9).unwrap();
        assert!(rep.pass(), "{rep}");

        let same = monotonicity_check(&f1, &f1, &samples, 1e-9).unwrap();
        assert!(!same.pass());
        assert!(matches!(
            same.outcome,
            MonotonicityOutcome::PreconditionUnmet { sample: 0 }
        ));
    }

    #[test]
    fn convexity_endpoint_and_constant_cases() {
        let g = EquidistantFunction::bisection(focal("2", -4.0, 4.0));
        // lambda = 0 degenerates to G(b) <= G(b)
        let rep = convexity_check(
            &g,
            &[(vec![1.0], vec![-1.0], 0.0), (vec![1.0], vec![-1.0], 0.5)],
            1e-9,
        )
        .unwrap();
        assert!(rep.pass(), "{rep}");
        assert!(rep.worst_violation.abs() < 1e-9);
    }

    #[test]
    fn continuity_scan_is_tame_on_dense_grid() {
        let g = EquidistantFunction::bisection(focal("sqrt(t1^2+1)", -8.0, 8.0));
        let samples: Vec<Vec<f64>> = crate::sample::linspace(-2.0, 2.0, 41)
            .into_iter()
            .map(|x| vec![x])
            .collect();
        let worst = continuity_scan(&g, &samples).unwrap();
        // |G'| <= 1 for this field; the discrete slope should not exceed
        // it by much (advisory heuristic, generous bound)
        assert!(worst < 1.5, "worst slope {worst}");
    }
}
