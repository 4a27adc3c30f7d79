//! Distance and closest-point queries against the two focal sets: the
//! base hyperplane `y = 0` and the epigraph of a positive field `f`.
//!
//! The epigraph query is the brute-force oracle the rest of the crate is
//! verified against: a coarse grid scan over a search box followed by
//! derivative-free coordinate refinement. It assumes nothing about `f`
//! beyond continuity and positivity.

use std::fmt;

use crate::dsl::ScalarField;
use crate::error::{Error, Result};
use crate::{c, linalg, Scalar};

/// A point of the ambient space `R^{n+1}`: `n` base coordinates plus a
/// height above (or below) the base hyperplane.
#[derive(Debug, Clone, PartialEq)]
pub struct SpacePoint<T> {
    pub base: Vec<T>,
    pub height: T,
}

impl<T: Scalar> SpacePoint<T> {
    pub fn new(base: Vec<T>, height: T) -> Self {
        assert!(!base.is_empty(), "dimension must be at least 1");
        SpacePoint { base, height }
    }

    pub fn dim(&self) -> usize {
        self.base.len()
    }

    /// Euclidean distance in `R^{n+1}`.
    pub fn dist(&self, other: &Self) -> T {
        assert_eq!(self.dim(), other.dim());
        let mut acc = (self.height - other.height) * (self.height - other.height);
        for (a, b) in self.base.iter().zip(&other.base) {
            acc = acc + (*a - *b) * (*a - *b);
        }
        acc.sqrt()
    }
}

/// Distance from a point to the base hyperplane `y = 0`.
pub fn distance_to_hyperplane<T: Scalar>(p: &SpacePoint<T>) -> T {
    p.height.abs()
}

/// Axis-aligned bounds on the graph parameter `t` searched by the oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchBox<T> {
    pub lo: Vec<T>,
    pub hi: Vec<T>,
}

impl<T: Scalar> SearchBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>) -> Self {
        assert_eq!(lo.len(), hi.len());
        assert!(!lo.is_empty(), "dimension must be at least 1");
        for (a, b) in lo.iter().zip(&hi) {
            assert!(a < b, "search box must have positive extent");
            assert!(a.is_finite() && b.is_finite());
        }
        SearchBox { lo, hi }
    }

    /// The cube `[lo, hi]^n`.
    pub fn cube(lo: T, hi: T, n: usize) -> Self {
        Self::new(vec![lo; n], vec![hi; n])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, t: &[T]) -> bool {
        t.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (a, b))| a <= x && x <= b)
    }

    /// Doubled extent about the same center.
    pub fn expanded(&self) -> Self {
        let lo = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(&a, &b)| a - (b - a) * c(0.5))
            .collect();
        let hi = self
            .hi
            .iter()
            .zip(&self.lo)
            .map(|(&b, &a)| b + (b - a) * c(0.5))
            .collect();
        SearchBox { lo, hi }
    }
}

/// Oracle resolution: coarse grid density, refinement step tolerance and
/// the cap on automatic box doublings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineConfig<T> {
    pub grid_points: usize,
    pub step_tol: T,
    pub max_expansions: usize,
    pub max_sweeps: usize,
}

impl<T: Scalar> Default for RefineConfig<T> {
    fn default() -> Self {
        RefineConfig {
            grid_points: 64,
            step_tol: c(1e-12),
            max_expansions: 8,
            max_sweeps: 60,
        }
    }
}

/// Result of a closest-point query against the epigraph.
#[derive(Debug, Clone, PartialEq)]
pub struct ClosestPointResult<T> {
    /// The closest point found. For queries outside the epigraph it lies
    /// on the graph of `f`; for queries inside, it is the query itself.
    pub point: SpacePoint<T>,
    pub distance: T,
    /// The graph parameter achieving the minimum.
    pub parameter: Vec<T>,
}

/// The epigraph of a positive field `f`, with a numerical closest-point
/// oracle over a search box.
#[derive(Debug, Clone)]
pub struct EpigraphFocal<T: Scalar> {
    field: ScalarField<T>,
    search_box: SearchBox<T>,
    refinement: RefineConfig<T>,
}

enum ScanOutcome<T> {
    Interior(ClosestPointResult<T>),
    Boundary,
}

impl<T: Scalar> EpigraphFocal<T> {
    pub fn new(field: ScalarField<T>, search_box: SearchBox<T>) -> Self {
        assert_eq!(field.n(), search_box.dim(), "box dimension mismatch");
        EpigraphFocal {
            field,
            search_box,
            refinement: RefineConfig::default(),
        }
    }

    pub fn with_refinement(mut self, refinement: RefineConfig<T>) -> Self {
        assert!(refinement.grid_points >= 3);
        self.refinement = refinement;
        self
    }

    pub fn field(&self) -> &ScalarField<T> {
        &self.field
    }

    pub fn search_box(&self) -> &SearchBox<T> {
        &self.search_box
    }

    pub fn refinement(&self) -> &RefineConfig<T> {
        &self.refinement
    }

    pub fn n(&self) -> usize {
        self.field.n()
    }

    /// Distance from `p` to the epigraph, with the minimizing graph point.
    ///
    /// Points on or above the graph are members of the (closed) epigraph
    /// and report distance zero. Everything else is a minimization over
    /// the graph: coarse grid scan, then per-axis golden-section sweeps.
    /// When the minimizer sticks to the box boundary the box is doubled,
    /// up to the configured cap.
    pub fn distance_to_epigraph(&self, p: &SpacePoint<T>) -> Result<ClosestPointResult<T>> {
        if p.dim() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: p.dim(),
            });
        }
        let f_base = self.field.eval(&p.base);
        if f_base <= T::zero() {
            return Err(Error::NonPositiveField {
                value: f_base.to_f64().unwrap_or(f64::NAN),
            });
        }
        if p.height >= f_base {
            return Ok(ClosestPointResult {
                point: p.clone(),
                distance: T::zero(),
                parameter: p.base.clone(),
            });
        }
        let mut bx = self.search_box.clone();
        let mut expansions = 0;
        while !bx.contains(&p.base) {
            if expansions >= self.refinement.max_expansions {
                return Err(Error::BoxTooSmall { expansions });
            }
            bx = bx.expanded();
            expansions += 1;
        }
        loop {
            match self.scan(p, &bx)? {
                ScanOutcome::Interior(res) => return Ok(res),
                ScanOutcome::Boundary => {
                    if expansions >= self.refinement.max_expansions {
                        return Err(Error::BoxTooSmall { expansions });
                    }
                    bx = bx.expanded();
                    expansions += 1;
                }
            }
        }
    }

    fn scan(&self, p: &SpacePoint<T>, bx: &SearchBox<T>) -> Result<ScanOutcome<T>> {
        let n = self.n();
        let cfg = &self.refinement;
        let sq_to_graph = |t: &[T]| {
            let ft = self.field.eval(t);
            let mut acc = (p.height - ft) * (p.height - ft);
            for (&b, &tk) in p.base.iter().zip(t) {
                acc = acc + (b - tk) * (b - tk);
            }
            acc
        };

        // Coarse pass, in lexicographic order so that exact ties resolve
        // to the smallest t. Positivity of f is checked on these nodes.
        let axes: Vec<Vec<T>> = (0..n)
            .map(|k| crate::sample::linspace(bx.lo[k], bx.hi[k], cfg.grid_points))
            .collect();
        let mut idx = vec![0usize; n];
        let mut best_t: Vec<T> = axes.iter().map(|v| v[0]).collect();
        let mut best_sq = T::infinity();
        loop {
            let t: Vec<T> = idx.iter().zip(&axes).map(|(&i, v)| v[i]).collect();
            let ft = self.field.eval(&t);
            if ft <= T::zero() {
                return Err(Error::NonPositiveField {
                    value: ft.to_f64().unwrap_or(f64::NAN),
                });
            }
            let mut sq = (p.height - ft) * (p.height - ft);
            for (&b, &tk) in p.base.iter().zip(&t) {
                sq = sq + (b - tk) * (b - tk);
            }
            if sq < best_sq {
                best_sq = sq;
                best_t = t;
            }
            let mut axis = n;
            let mut done = true;
            while axis > 0 {
                axis -= 1;
                idx[axis] += 1;
                if idx[axis] < cfg.grid_points {
                    done = false;
                    break;
                }
                idx[axis] = 0;
            }
            if done {
                break;
            }
        }

        // Refinement: golden-section line searches per axis, re-centered
        // each sweep, never accepting a worse value.
        let spacing: Vec<T> = (0..n)
            .map(|k| (bx.hi[k] - bx.lo[k]) / T::from_usize(cfg.grid_points - 1).unwrap())
            .collect();
        let mut cur = best_t;
        let mut cur_sq = best_sq;
        for _ in 0..cfg.max_sweeps {
            let before = cur.clone();
            for k in 0..n {
                let a = num_traits::Float::max(bx.lo[k], cur[k] - spacing[k]);
                let b = num_traits::Float::min(bx.hi[k], cur[k] + spacing[k]);
                let line = |x: T| {
                    let mut t = cur.clone();
                    t[k] = x;
                    sq_to_graph(&t)
                };
                let (xm, ym) = golden_min(&line, a, b, cfg.step_tol);
                if ym < cur_sq {
                    cur[k] = xm;
                    cur_sq = ym;
                }
            }
            if linalg::dist(&before, &cur) <= cfg.step_tol {
                break;
            }
        }

        for k in 0..n {
            let eps = spacing[k] * c(1e-3);
            if cur[k] - bx.lo[k] <= eps || bx.hi[k] - cur[k] <= eps {
                return Ok(ScanOutcome::Boundary);
            }
        }
        let f_cur = self.field.eval(&cur);
        Ok(ScanOutcome::Interior(ClosestPointResult {
            point: SpacePoint::new(cur.clone(), f_cur),
            distance: cur_sq.sqrt(),
            parameter: cur,
        }))
    }
}

/// Golden-section minimization on `[a, b]` down to interval width `tol`.
fn golden_min<T: Scalar>(f: &dyn Fn(T) -> T, mut a: T, mut b: T, tol: T) -> (T, T) {
    let invphi = (c::<T>(5.0).sqrt() - T::one()) * c(0.5);
    let invphi2 = T::one() - invphi;
    let mut h = b - a;
    if h <= tol {
        let m = (a + b) * c(0.5);
        return (m, f(m));
    }
    let mut xc = a + invphi2 * h;
    let mut xd = a + invphi * h;
    let mut yc = f(xc);
    let mut yd = f(xd);
    while h > tol {
        if yc < yd {
            b = xd;
            xd = xc;
            yd = yc;
            h = b - a;
            xc = a + invphi2 * h;
            yc = f(xc);
        } else {
            a = xc;
            xc = xd;
            yc = yd;
            h = b - a;
            xd = a + invphi * h;
            yd = f(xd);
        }
    }
    if yc < yd {
        (xc, yc)
    } else {
        (xd, yd)
    }
}

/// Outcome of checking `|d(p2, L) - d(p1, L)| <= |p2 - p1|` over a list
/// of point pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct LipschitzReport<T> {
    pub pairs: usize,
    /// Largest value of `|d2 - d1| - |p2 - p1|` (negative when slack).
    pub max_violation: T,
    pub worst_pair: Option<usize>,
    pub tol: T,
    pub violations: usize,
}

impl<T: Scalar> LipschitzReport<T> {
    pub fn pass(&self) -> bool {
        self.violations == 0
    }
}

impl<T: Scalar> fmt::Display for LipschitzReport<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "lipschitz: {} ({} pairs, max violation {:.3e})",
            if self.pass() { "pass" } else { "FAIL" },
            self.pairs,
            self.max_violation.to_f64().unwrap_or(f64::NAN),
        )
    }
}

/// Check the 1-Lipschitz bound of the epigraph distance on point pairs.
/// The tolerance is relative: pair `(p1, p2)` fails when
/// `|d2 - d1| - |p2 - p1| > tol * (1 + |p2 - p1|)`.
pub fn lipschitz_check<T: Scalar>(
    focal: &EpigraphFocal<T>,
    pairs: &[(SpacePoint<T>, SpacePoint<T>)],
    tol: T,
) -> Result<LipschitzReport<T>> {
    let mut max_violation = T::neg_infinity();
    let mut worst_pair = None;
    let mut violations = 0;
    for (i, (p1, p2)) in pairs.iter().enumerate() {
        let d1 = focal.distance_to_epigraph(p1)?.distance;
        let d2 = focal.distance_to_epigraph(p2)?.distance;
        let gap = p1.dist(p2);
        let violation = (d2 - d1).abs() - gap;
        if violation > max_violation {
            max_violation = violation;
            worst_pair = Some(i);
        }
        if violation > tol * (T::one() + gap) {
            violations += 1;
        }
    }
    Ok(LipschitzReport {
        pairs: pairs.len(),
        max_violation,
        worst_pair,
        tol,
        violations,
    })
}
