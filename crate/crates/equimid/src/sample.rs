//! Sampling grids over axis-aligned regions.

use crate::Scalar;

/// One axis of a sampling region: `count` evenly spaced values over
/// `[min, max]`, endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisRange<T> {
    pub min: T,
    pub max: T,
    pub count: usize,
}

impl<T: Scalar> AxisRange<T> {
    pub fn new(min: T, max: T, count: usize) -> Self {
        assert!(count >= 2, "each axis needs at least 2 samples");
        assert!(min < max, "axis range must be nonempty");
        assert!(
            min.is_finite() && max.is_finite(),
            "axis range must be finite"
        );
        AxisRange { min, max, count }
    }

    pub fn values(&self) -> Vec<T> {
        linspace(self.min, self.max, self.count)
    }
}

pub fn linspace<T: Scalar>(min: T, max: T, count: usize) -> Vec<T> {
    assert!(count >= 2);
    let span = max - min;
    let denom = T::from_usize(count - 1).unwrap();
    (0..count)
        .map(|i| {
            if i == count - 1 {
                max
            } else {
                min + span * T::from_usize(i).unwrap() / denom
            }
        })
        .collect()
}

/// Cartesian product of the axis samples, in lexicographic order
/// (the first axis varies slowest).
pub fn grid<T: Scalar>(axes: &[AxisRange<T>]) -> Vec<Vec<T>> {
    assert!(!axes.is_empty());
    let per_axis: Vec<Vec<T>> = axes.iter().map(|a| a.values()).collect();
    let total: usize = per_axis.iter().map(|v| v.len()).product();
    let mut out = Vec::with_capacity(total);
    let mut idx = vec![0usize; axes.len()];
    loop {
        out.push(idx.iter().zip(&per_axis).map(|(&i, v)| v[i]).collect());
        let mut axis = axes.len();
        loop {
            if axis == 0 {
                return out;
            }
            axis -= 1;
            idx[axis] += 1;
            if idx[axis] < per_axis[axis].len() {
                break;
            }
            idx[axis] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linspace_hits_endpoints() {
        let v = linspace(-1.0, 1.0, 5);
        assert_eq!(v, vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
    }

    #[test]
    fn grid_is_lexicographic() {
        let axes = [AxisRange::new(0.0, 1.0, 2), AxisRange::new(0.0, 2.0, 3)];
        let g = grid(&axes);
        assert_eq!(g.len(), 6);
        assert_eq!(g[0], vec![0.0, 0.0]);
        assert_eq!(g[1], vec![0.0, 1.0]);
        assert_eq!(g[2], vec![0.0, 2.0]);
        assert_eq!(g[3], vec![1.0, 0.0]);
        assert_eq!(g[5], vec![1.0, 2.0]);
    }
}
