//! Periodic trapezoidal quadrature on products of circles and on their
//! coordinate subtori, and single-node quadrature on homogeneous spaces.
//!
//! Node samples are evaluated in parallel but always reduced by the same
//! pairwise tree in node order, so results do not depend on scheduling.

use rayon::prelude::*;

use crate::error::{GeometryError, Result};
use crate::manifold::{Manifold, Point};

#[derive(Clone, Debug, PartialEq)]
enum Layout {
    Chart { counts: Vec<usize>, periods: Vec<f64> },
    Homogeneous { dim: usize, volume: f64 },
}

/// Quadrature nodes with coordinate weights; the Riemannian density is
/// applied by the integrand.
#[derive(Clone, Debug, PartialEq)]
pub struct QuadratureGrid {
    layout: Layout,
}

/// Grid description carried in reports.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridMetadata {
    pub backend: String,
    pub counts: Vec<usize>,
    pub nodes: usize,
}

impl QuadratureGrid {
    /// Trapezoidal grid with `counts[i]` nodes on axis `i`; homogeneous
    /// backends ignore `counts` and use one node weighted by the volume.
    pub fn new(manifold: &Manifold, counts: &[usize]) -> Result<Self> {
        match manifold {
            Manifold::InvariantFrame(h) => Ok(QuadratureGrid {
                layout: Layout::Homogeneous {
                    dim: manifold.dim(),
                    volume: h.volume(),
                },
            }),
            Manifold::Chart(c) => {
                if counts.len() != c.periods().len() || counts.contains(&0) {
                    return Err(GeometryError::Dimension(format!(
                        "grid needs {} positive node counts, got {counts:?}",
                        c.periods().len()
                    )));
                }
                Ok(QuadratureGrid {
                    layout: Layout::Chart {
                        counts: counts.to_vec(),
                        periods: c.periods().to_vec(),
                    },
                })
            }
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self.layout, Layout::Homogeneous { .. })
    }

    /// Every axis count doubled.
    pub fn refined(&self) -> Self {
        match &self.layout {
            Layout::Chart { counts, periods } => QuadratureGrid {
                layout: Layout::Chart {
                    counts: counts.iter().map(|c| 2 * c).collect(),
                    periods: periods.clone(),
                },
            },
            Layout::Homogeneous { .. } => self.clone(),
        }
    }

    pub fn counts(&self) -> Vec<usize> {
        match &self.layout {
            Layout::Chart { counts, .. } => counts.clone(),
            Layout::Homogeneous { .. } => vec![1],
        }
    }

    pub fn metadata(&self) -> GridMetadata {
        let counts = self.counts();
        GridMetadata {
            backend: if self.is_homogeneous() {
                "invariant_frame".into()
            } else {
                "chart".into()
            },
            nodes: counts.iter().product(),
            counts,
        }
    }

    /// Nodes with coordinate weights (product of `period/count`).
    pub fn nodes(&self) -> Vec<(Point, f64)> {
        match &self.layout {
            Layout::Homogeneous { dim, volume } => vec![(Point::origin(*dim), *volume)],
            Layout::Chart { counts, periods } => {
                let axes: Vec<usize> = (0..counts.len()).collect();
                product_nodes(&axes, counts, periods, &vec![0.0; counts.len()])
            }
        }
    }

    /// Nodes of a coordinate subtorus, using this grid's counts on the free axes.
    pub fn leaf_nodes(&self, leaf: &LeafSpec) -> Result<Vec<(Point, f64)>> {
        match &self.layout {
            Layout::Homogeneous { .. } => Err(GeometryError::UnsupportedLeaf(format!(
                "{}: homogeneous backends have no coordinate leaves",
                leaf.name
            ))),
            Layout::Chart { counts, periods } => {
                let m = counts.len();
                let mut base = vec![0.0; m];
                for &(axis, v) in &leaf.fixed {
                    if axis >= m {
                        return Err(GeometryError::UnsupportedLeaf(format!(
                            "{}: fixed axis {axis} out of range",
                            leaf.name
                        )));
                    }
                    base[axis] = v;
                }
                let covered = leaf.free_axes.len() + leaf.fixed.len() == m
                    && (0..m).all(|a| {
                        leaf.free_axes.contains(&a) || leaf.fixed.iter().any(|f| f.0 == a)
                    });
                if !covered {
                    return Err(GeometryError::UnsupportedLeaf(format!(
                        "{}: every axis must be either free or fixed",
                        leaf.name
                    )));
                }
                Ok(product_nodes(&leaf.free_axes, counts, periods, &base))
            }
        }
    }
}

fn product_nodes(axes: &[usize], counts: &[usize], periods: &[f64], base: &[f64]) -> Vec<(Point, f64)> {
    let weight: f64 = axes.iter().map(|&a| periods[a] / counts[a] as f64).product();
    let total: usize = axes.iter().map(|&a| counts[a]).product();
    (0..total)
        .map(|mut idx| {
            let mut p = base.to_vec();
            // last listed axis varies fastest
            for &a in axes.iter().rev() {
                let k = idx % counts[a];
                idx /= counts[a];
                p[a] = periods[a] * k as f64 / counts[a] as f64;
            }
            (Point(p), weight)
        })
        .collect()
}

/// A closed leaf given as a coordinate subtorus.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LeafSpec {
    pub name: String,
    pub free_axes: Vec<usize>,
    pub fixed: Vec<(usize, f64)>,
}

/// Fixed-shape pairwise summation.
pub fn pairwise_sum(v: &[f64]) -> f64 {
    match v.len() {
        0 => 0.0,
        1 => v[0],
        2 => v[0] + v[1],
        n => {
            let h = n / 2;
            pairwise_sum(&v[..h]) + pairwise_sum(&v[h..])
        }
    }
}

/// Samples a vector-valued function at every node, in node order.
pub fn sample_nodes<F>(nodes: &[(Point, f64)], k: usize, f: F) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&Point) -> Result<Vec<f64>> + Sync,
{
    nodes
        .par_iter()
        .map(|(p, _)| {
            let v = f(p)?;
            if v.len() != k {
                return Err(GeometryError::Dimension(format!(
                    "integrand returned {} components, expected {k}",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(GeometryError::NonFinite {
                    what: "integrand sample".into(),
                    point: p.0.clone(),
                });
            }
            Ok(v)
        })
        .collect()
}

/// `Σ w_i s_i[c]` for component `c` of node samples.
pub fn weighted_sum(nodes: &[(Point, f64)], samples: &[Vec<f64>], c: usize) -> f64 {
    let col: Vec<f64> = nodes
        .iter()
        .zip(samples)
        .map(|((_, w), s)| s[c] * w)
        .collect();
    pairwise_sum(&col)
}

/// Largest `|s_i[c]|`.
pub fn max_abs(samples: &[Vec<f64>], c: usize) -> f64 {
    samples.iter().fold(0.0, |m, s| m.max(s[c].abs()))
}

/// `Σ w_i f(p_i)` for a vector-valued integrand returning `k` components.
/// The integrand supplies any density factor itself.
pub fn integrate_nodes<F>(nodes: &[(Point, f64)], k: usize, f: F) -> Result<Vec<f64>>
where
    F: Fn(&Point) -> Result<Vec<f64>> + Sync,
{
    let samples = sample_nodes(nodes, k, f)?;
    Ok((0..k).map(|c| weighted_sum(nodes, &samples, c)).collect())
}

/// `∫_M f dvol_g`.
pub fn integrate<F>(manifold: &Manifold, grid: &QuadratureGrid, f: F) -> Result<f64>
where
    F: Fn(&Point) -> Result<f64> + Sync,
{
    let nodes = grid.nodes();
    let out = integrate_nodes(&nodes, 1, |p| {
        let density = manifold.local(p)?.density;
        Ok(vec![f(p)? * density])
    })?;
    Ok(out[0])
}

/// Riemannian density of the induced metric on a coordinate subtorus.
pub fn leaf_density(metric: &crate::linalg::Mat<f64>, free_axes: &[usize]) -> f64 {
    let k = free_axes.len();
    let sub = crate::linalg::Mat::from_fn(k, k, |i, j| metric[(free_axes[i], free_axes[j])]);
    crate::manifold::determinant(&sub).max(0.0).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{ChartManifold, InvariantFrameManifold};

    #[test]
    fn unit_torus_volume() {
        let m = Manifold::Chart(ChartManifold::flat(vec![1.0; 3]).unwrap());
        let g = QuadratureGrid::new(&m, &[3, 4, 5]).unwrap();
        let v = integrate(&m, &g, |_| Ok(1.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        assert_eq!(g.nodes().len(), 60);
    }

    #[test]
    fn trig_polynomial_is_exact() {
        let tau = std::f64::consts::TAU;
        let m = Manifold::Chart(ChartManifold::flat(vec![tau; 2]).unwrap());
        let g = QuadratureGrid::new(&m, &[16, 16]).unwrap();
        let v = integrate(&m, &g, |p| Ok(3.0 + (2.0 * p[0]).cos() * p[1].sin())).unwrap();
        assert!((v - 3.0 * tau * tau).abs() < 1e-12);
    }

    #[test]
    fn homogeneous_single_node() {
        let h = InvariantFrameManifold::from_brackets(3, &[(0, 1, 2, 1.0)], 2.5).unwrap();
        let m = Manifold::InvariantFrame(h);
        let g = QuadratureGrid::new(&m, &[]).unwrap();
        assert_eq!(integrate(&m, &g, |_| Ok(4.0)).unwrap(), 10.0);
        assert_eq!(g.metadata().nodes, 1);
    }

    #[test]
    fn non_finite_sample_reports_point() {
        let m = Manifold::Chart(ChartManifold::flat(vec![1.0; 2]).unwrap());
        let g = QuadratureGrid::new(&m, &[2, 2]).unwrap();
        let err = integrate(&m, &g, |p| Ok(if p[0] > 0.0 { f64::NAN } else { 1.0 })).unwrap_err();
        assert!(matches!(err, GeometryError::NonFinite { point, .. } if point[0] == 0.5));
    }

    #[test]
    fn leaf_nodes_cover_free_axes() {
        let m = Manifold::Chart(ChartManifold::flat(vec![1.0, 2.0, 3.0]).unwrap());
        let g = QuadratureGrid::new(&m, &[2, 4, 8]).unwrap();
        let leaf = LeafSpec {
            name: "t".into(),
            free_axes: vec![1],
            fixed: vec![(0, 0.25), (2, 1.0)],
        };
        let nodes = g.leaf_nodes(&leaf).unwrap();
        assert_eq!(nodes.len(), 4);
        assert!(nodes.iter().all(|(p, w)| p[0] == 0.25 && p[2] == 1.0 && *w == 0.5));
        let bad = LeafSpec { fixed: vec![(0, 0.0)], ..leaf };
        assert!(g.leaf_nodes(&bad).is_err());
    }

    #[test]
    fn pairwise_is_order_stable() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64 * 0.37).sin()).collect();
        assert_eq!(pairwise_sum(&v), pairwise_sum(&v.clone()));
    }
}
