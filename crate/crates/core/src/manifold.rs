//! Closed Riemannian manifolds and their Levi-Civita calculus.
//!
//! Two backends are supported. A [`ChartManifold`] is a product of circles
//! with a globally periodic metric given in closed form; an
//! [`InvariantFrameManifold`] is a compact quotient of a Lie group described
//! by the structure constants of an orthonormal left-invariant frame.
//!
//! Both backends are handled uniformly: components are taken with respect to
//! a basis `E_a` (coordinate fields or the invariant frame) and connection
//! coefficients are `Γ^k_{ij} = ⟨∇_{E_i} E_j, E^k⟩`. Fields on the
//! invariant-frame backend are left-invariant, i.e. have constant components,
//! which is why [`Manifold::seed`] hands out constant jets there.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::jet::{truncate_vec, values, Jet1, Jet2, Lower, Scalar, MAX_DIM};
use crate::linalg::{sub_vec, Mat};

/// A location on a scenario manifold: periodic chart coordinates, or an
/// arbitrary tag of length `dim` for homogeneous backends.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }
}

impl Deref for Point {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

/// Metric coefficients as a function of the coordinate jets.
pub type MetricFn = Arc<dyn Fn(&[Jet2]) -> Mat<Jet2> + Send + Sync>;

/// A vector field given by closed-form components in the backend basis.
pub type VectorField = Arc<dyn Fn(&[Jet2]) -> Vec<Jet2> + Send + Sync>;

/// A scalar field given in closed form.
pub type ScalarField = Arc<dyn Fn(&[Jet2]) -> Jet2 + Send + Sync>;

#[derive(Clone, Debug, PartialEq)]
pub struct TangentVector {
    pub components: Vec<f64>,
    pub base: Point,
}

impl TangentVector {
    pub fn norm_with(&self, metric: &Mat<f64>) -> f64 {
        let gv = metric.mul_vec(&self.components);
        gv.iter()
            .zip(&self.components)
            .map(|(a, b)| a * b)
            .sum::<f64>()
            .sqrt()
    }
}

/// Connection coefficients `Γ^k_{ij}`, stored as `[k][i][j]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Christoffel<S> {
    dim: usize,
    data: Vec<S>,
}

impl<S: Scalar> Christoffel<S> {
    pub fn zeros(dim: usize) -> Self {
        Christoffel {
            dim,
            data: vec![S::zero(); dim * dim * dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> S {
        self.data[(k * self.dim + i) * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: S) {
        self.data[(k * self.dim + i) * self.dim + j] = v;
    }

    pub fn values(&self) -> Christoffel<f64> {
        Christoffel {
            dim: self.dim,
            data: values(&self.data),
        }
    }
}

impl<S: Lower> Christoffel<S> {
    pub fn truncate(&self) -> Christoffel<S::Down> {
        Christoffel {
            dim: self.dim,
            data: truncate_vec(&self.data),
        }
    }
}

#[derive(Clone)]
pub struct ChartManifold {
    dim: usize,
    periods: Vec<f64>,
    metric: MetricFn,
}

impl fmt::Debug for ChartManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartManifold")
            .field("dim", &self.dim)
            .field("periods", &self.periods)
            .finish_non_exhaustive()
    }
}

impl ChartManifold {
    pub fn new(periods: Vec<f64>, metric: MetricFn) -> Result<Self> {
        let dim = periods.len();
        if dim == 0 || dim > MAX_DIM {
            return Err(GeometryError::Dimension(format!(
                "chart dimension {dim} outside 1..={MAX_DIM}"
            )));
        }
        if periods.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
            return Err(GeometryError::Dimension(
                "periods must be positive and finite".into(),
            ));
        }
        Ok(ChartManifold {
            dim,
            periods,
            metric,
        })
    }

    /// The flat metric on a product of circles.
    pub fn flat(periods: Vec<f64>) -> Result<Self> {
        let m = periods.len();
        Self::new(periods, Arc::new(move |_| Mat::identity(m)))
    }

    pub fn periods(&self) -> &[f64] {
        &self.periods
    }
}

#[derive(Clone, Debug)]
pub struct InvariantFrameManifold {
    dim: usize,
    /// `c^k_{ij}` stored as `[k][i][j]`, `[E_i, E_j] = c^k_{ij} E_k`.
    structure: Vec<f64>,
    volume: f64,
}

impl InvariantFrameManifold {
    /// Builds the backend from brackets `[E_i, E_j] = coef · E_k`, listed
    /// once per unordered pair.
    pub fn from_brackets(dim: usize, brackets: &[(usize, usize, usize, f64)], volume: f64) -> Result<Self> {
        let mut c = vec![0.0; dim * dim * dim];
        for &(i, j, k, coef) in brackets {
            if i >= dim || j >= dim || k >= dim {
                return Err(GeometryError::Dimension(format!(
                    "bracket index out of range for dimension {dim}"
                )));
            }
            c[(k * dim + i) * dim + j] += coef;
            c[(k * dim + j) * dim + i] -= coef;
        }
        Self::new(dim, c, volume)
    }

    pub fn new(dim: usize, structure: Vec<f64>, volume: f64) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM || structure.len() != dim * dim * dim {
            return Err(GeometryError::Dimension(format!(
                "structure constants do not match dimension {dim}"
            )));
        }
        if !(volume.is_finite() && volume > 0.0) {
            return Err(GeometryError::Construction("volume must be positive".into()));
        }
        let mf = InvariantFrameManifold {
            dim,
            structure,
            volume,
        };
        let anti = mf.antisymmetry_residual();
        if anti > 0.0 {
            return Err(GeometryError::Construction(format!(
                "structure constants not antisymmetric (residual {anti:e})"
            )));
        }
        let jac = mf.jacobi_residual();
        if jac > 1e-12 {
            return Err(GeometryError::Construction(format!(
                "structure constants violate the Jacobi identity (residual {jac:e})"
            )));
        }
        Ok(mf)
    }

    pub fn structure_constant(&self, k: usize, i: usize, j: usize) -> f64 {
        self.structure[(k * self.dim + i) * self.dim + j]
    }

    pub fn volume(&self) -> f64 {
        self.volume
    }

    pub fn antisymmetry_residual(&self) -> f64 {
        let m = self.dim;
        let mut r: f64 = 0.0;
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    r = r.max(
                        (self.structure_constant(k, i, j) + self.structure_constant(k, j, i)).abs(),
                    );
                }
            }
        }
        r
    }

    /// `max |[[E_i,E_j],E_k] + [[E_j,E_k],E_i] + [[E_k,E_i],E_j]|`.
    pub fn jacobi_residual(&self) -> f64 {
        let m = self.dim;
        let c = |k, i, j| self.structure_constant(k, i, j);
        let mut r: f64 = 0.0;
        for i in 0..m {
            for j in 0..m {
                for k in 0..m {
                    for p in 0..m {
                        let mut s = 0.0;
                        for l in 0..m {
                            s += c(l, i, j) * c(p, l, k)
                                + c(l, j, k) * c(p, l, i)
                                + c(l, k, i) * c(p, l, j);
                        }
                        r = r.max(s.abs());
                    }
                }
            }
        }
        r
    }

    /// Koszul formula on an orthonormal frame:
    /// `Γ^k_{ij} = ½(c^k_{ij} − c^i_{jk} + c^j_{ki})`.
    pub fn connection(&self) -> Christoffel<f64> {
        let m = self.dim;
        let mut g = Christoffel::zeros(m);
        for k in 0..m {
            for i in 0..m {
                for j in 0..m {
                    let v = 0.5
                        * (self.structure_constant(k, i, j) - self.structure_constant(i, j, k)
                            + self.structure_constant(j, k, i));
                    g.set(k, i, j, v);
                }
            }
        }
        g
    }
}

#[derive(Clone, Debug)]
pub enum Manifold {
    Chart(ChartManifold),
    InvariantFrame(InvariantFrameManifold),
}

impl Manifold {
    pub fn dim(&self) -> usize {
        match self {
            Manifold::Chart(c) => c.dim,
            Manifold::InvariantFrame(h) => h.dim,
        }
    }

    pub fn is_homogeneous(&self) -> bool {
        matches!(self, Manifold::InvariantFrame(_))
    }

    /// Coordinate jets at `p`. Constant on the invariant-frame backend.
    pub fn seed(&self, p: &Point) -> Vec<Jet2> {
        match self {
            Manifold::Chart(_) => Jet2::seed(p),
            Manifold::InvariantFrame(_) => Jet2::seed_constant(p),
        }
    }

    fn check_point(&self, p: &Point) -> Result<()> {
        if p.len() != self.dim() {
            return Err(GeometryError::Dimension(format!(
                "point has {} coordinates, manifold dimension is {}",
                p.len(),
                self.dim()
            )));
        }
        if p.iter().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite {
                what: "point coordinates".into(),
                point: p.0.clone(),
            });
        }
        Ok(())
    }

    /// Metric and connection jets at a point.
    pub fn local(&self, p: &Point) -> Result<ManifoldLocal> {
        self.check_point(p)?;
        let m = self.dim();
        let seeds = self.seed(p);
        match self {
            Manifold::InvariantFrame(h) => {
                let gamma0 = h.connection();
                let gamma1 = Christoffel {
                    dim: m,
                    data: gamma0.data.iter().map(|&x| Jet1::constant(x)).collect(),
                };
                Ok(ManifoldLocal {
                    point: p.clone(),
                    seeds,
                    g1: Mat::identity(m),
                    g0: Mat::identity(m),
                    gamma1,
                    gamma0,
                    density: 1.0,
                })
            }
            Manifold::Chart(c) => {
                let raw = (c.metric)(&seeds);
                if raw.rows() != m || raw.cols() != m {
                    return Err(GeometryError::Dimension(format!(
                        "metric evaluator returned {}x{} matrix for dimension {m}",
                        raw.rows(),
                        raw.cols()
                    )));
                }
                for i in 0..m {
                    for j in 0..m {
                        if !raw[(i, j)].is_finite() {
                            return Err(GeometryError::NonFinite {
                                what: format!("metric coefficient g[{i}][{j}]"),
                                point: p.0.clone(),
                            });
                        }
                    }
                }
                // Upper triangle is authoritative; symmetry is exact by construction.
                let g2 = Mat::from_fn(m, m, |i, j| raw[(i.min(j), i.max(j))]);
                let g1 = g2.truncate();
                let g0 = g2.values();
                if !g0.is_positive_definite() {
                    return Err(GeometryError::SingularMetric { point: p.0.clone() });
                }
                let ginv = g1
                    .inverse()
                    .ok_or_else(|| GeometryError::SingularMetric { point: p.0.clone() })?;
                // dg[l][(i,j)] = ∂_l g_ij
                let dg: Vec<Mat<Jet1>> =
                    (0..m).map(|l| g2.map(|x| x.partial(l))).collect();
                let mut gamma1 = Christoffel::zeros(m);
                for i in 0..m {
                    for j in i..m {
                        // first kind: Γ_{l,ij} = ½(∂_i g_jl + ∂_j g_il − ∂_l g_ij)
                        let first: Vec<Jet1> = (0..m)
                            .map(|l| (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]) * 0.5)
                            .collect();
                        for k in 0..m {
                            let mut acc = Jet1::constant(0.0);
                            for (l, f) in first.iter().enumerate() {
                                acc += ginv[(k, l)] * *f;
                            }
                            gamma1.set(k, i, j, acc);
                            gamma1.set(k, j, i, acc);
                        }
                    }
                }
                let gamma0 = gamma1.values();
                let density = determinant(&g0).sqrt();
                Ok(ManifoldLocal {
                    point: p.clone(),
                    seeds,
                    g1,
                    g0,
                    gamma1,
                    gamma0,
                    density,
                })
            }
        }
    }

    pub fn metric_at(&self, p: &Point) -> Result<Mat<f64>> {
        Ok(self.local(p)?.g0)
    }

    pub fn christoffel(&self, p: &Point) -> Result<Christoffel<f64>> {
        Ok(self.local(p)?.gamma0)
    }

    /// `∇_X Y` at `p` for closed-form fields.
    pub fn covariant_derivative(
        &self,
        x: &VectorField,
        y: &VectorField,
        p: &Point,
    ) -> Result<TangentVector> {
        let loc = self.local(p)?;
        let xv = values(&x(&loc.seeds));
        let yv = y(&loc.seeds);
        let yj = truncate_vec(&yv);
        Ok(TangentVector {
            components: loc.nabla::<Jet1>(&xv, &yj),
            base: p.clone(),
        })
    }

    /// `R(X,Y)V` for tangent vectors at `p`, extended with constant
    /// components in the backend basis.
    pub fn riemann(&self, x: &[f64], y: &[f64], v: &[f64], p: &Point) -> Result<TangentVector> {
        let loc = self.local(p)?;
        let ext = |w: &[f64]| w.iter().map(|&c| Jet2::constant(c)).collect::<Vec<_>>();
        Ok(TangentVector {
            components: loc.curvature_fields(&ext(x), &ext(y), &ext(v), None),
            base: p.clone(),
        })
    }

    /// Periods of the chart backend.
    pub fn periods(&self) -> Option<&[f64]> {
        match self {
            Manifold::Chart(c) => Some(c.periods()),
            Manifold::InvariantFrame(_) => None,
        }
    }
}

/// Determinant by Gaussian elimination (small matrices only).
pub fn determinant(m: &Mat<f64>) -> f64 {
    let n = m.rows();
    let mut a = m.clone();
    let mut det = 1.0;
    for col in 0..n {
        let piv = (col..n)
            .max_by(|&i, &j| a[(i, col)].abs().total_cmp(&a[(j, col)].abs()))
            .unwrap();
        if a[(piv, col)] == 0.0 {
            return 0.0;
        }
        if piv != col {
            for j in 0..n {
                let t = a[(piv, j)];
                a[(piv, j)] = a[(col, j)];
                a[(col, j)] = t;
            }
            det = -det;
        }
        det *= a[(col, col)];
        for i in col + 1..n {
            let f = a[(i, col)] / a[(col, col)];
            for j in col..n {
                let t = a[(col, j)];
                a[(i, j)] -= f * t;
            }
        }
    }
    det
}

/// Scalars for which the pointwise caches hold a metric and connection.
pub trait Level: Scalar {
    fn metric(loc: &ManifoldLocal) -> &Mat<Self>;
    fn gamma(loc: &ManifoldLocal) -> &Christoffel<Self>;
}

impl Level for f64 {
    fn metric(loc: &ManifoldLocal) -> &Mat<f64> {
        &loc.g0
    }
    fn gamma(loc: &ManifoldLocal) -> &Christoffel<f64> {
        &loc.gamma0
    }
}

impl Level for Jet1 {
    fn metric(loc: &ManifoldLocal) -> &Mat<Jet1> {
        &loc.g1
    }
    fn gamma(loc: &ManifoldLocal) -> &Christoffel<Jet1> {
        &loc.gamma1
    }
}

/// Metric and connection at a point, at every order the calculus needs.
#[derive(Clone, Debug)]
pub struct ManifoldLocal {
    pub point: Point,
    pub seeds: Vec<Jet2>,
    pub g1: Mat<Jet1>,
    pub g0: Mat<f64>,
    pub gamma1: Christoffel<Jet1>,
    pub gamma0: Christoffel<f64>,
    /// `√det g` (1 on the invariant-frame backend).
    pub density: f64,
}

impl ManifoldLocal {
    pub fn dim(&self) -> usize {
        self.g0.rows()
    }

    pub fn inner<S: Level>(&self, u: &[S], v: &[S]) -> S {
        let g = S::metric(self);
        let m = self.dim();
        let mut acc = S::zero();
        for i in 0..m {
            for j in 0..m {
                acc += g[(i, j)] * u[i] * v[j];
            }
        }
        acc
    }

    pub fn norm(&self, u: &[f64]) -> f64 {
        self.inner(u, u).max(0.0).sqrt()
    }

    /// `(∇_X Y)^k = X^i ∂_i Y^k + Γ^k_{ij} X^i Y^j`; the result is one
    /// order lower than `Y`.
    pub fn nabla<S>(&self, x: &[S::Down], y: &[S]) -> Vec<S::Down>
    where
        S: Lower,
        S::Down: Level,
    {
        let m = self.dim();
        let gamma = <S::Down as Level>::gamma(self);
        let yl: Vec<S::Down> = truncate_vec(y);
        (0..m)
            .map(|k| {
                let mut acc = y[k].directional(x);
                for i in 0..m {
                    let mut inner = S::Down::zero();
                    for j in 0..m {
                        inner += gamma.get(k, i, j) * yl[j];
                    }
                    acc += x[i] * inner;
                }
                acc
            })
            .collect()
    }

    /// `[X, Y] = ∇_X Y − ∇_Y X` (the connection is torsion free).
    pub fn bracket<S>(&self, x: &[S], y: &[S]) -> Vec<S::Down>
    where
        S: Lower,
        S::Down: Level,
    {
        let xl = truncate_vec(x);
        let yl = truncate_vec(y);
        sub_vec(&self.nabla(&xl, y), &self.nabla(&yl, x))
    }

    /// Divergence `E_i(X^i) + Γ^i_{ij} X^j`.
    pub fn divergence<S>(&self, x: &[S]) -> S::Down
    where
        S: Lower,
        S::Down: Level,
    {
        let m = self.dim();
        let gamma = <S::Down as Level>::gamma(self);
        let mut acc = S::Down::zero();
        for i in 0..m {
            acc += x[i].partial(i);
            for j in 0..m {
                acc += gamma.get(i, i, j) * x[j].truncate();
            }
        }
        acc
    }

    /// Curvature of `∇` (when `proj` is `None`) or of the induced connection
    /// `P∇P` on the image of `P`, with all arguments extended as fields:
    /// `R(X,Y)V = ∇_X∇_Y V − ∇_Y∇_X V − ∇_{[X,Y]} V`.
    pub fn curvature_fields(
        &self,
        x: &[Jet2],
        y: &[Jet2],
        v: &[Jet2],
        proj: Option<(&Mat<Jet1>, &Mat<f64>)>,
    ) -> Vec<f64> {
        let x1 = truncate_vec(x);
        let y1 = truncate_vec(y);
        let x0 = values(x);
        let y0 = values(y);
        let p1 = |w: Vec<Jet1>| match proj {
            Some((p, _)) => p.mul_vec(&w),
            None => w,
        };
        let p0 = |w: Vec<f64>| match proj {
            Some((_, p)) => p.mul_vec(&w),
            None => w,
        };
        let nyv = p1(self.nabla::<Jet2>(&y1, v));
        let nxv = p1(self.nabla::<Jet2>(&x1, v));
        let nxnyv = p0(self.nabla::<Jet1>(&x0, &nyv));
        let nynxv = p0(self.nabla::<Jet1>(&y0, &nxv));
        let br: Vec<f64> = values(&self.bracket::<Jet2>(x, y));
        let v1 = truncate_vec(v);
        let nbr = p0(self.nabla::<Jet1>(&br, &v1));
        (0..self.dim())
            .map(|k| nxnyv[k] - nynxv[k] - nbr[k])
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn warped3() -> Manifold {
        let tau = 2.0 * std::f64::consts::PI;
        let metric: MetricFn = Arc::new(|x: &[Jet2]| {
            let a = x[2].cos() + 2.0;
            Mat::diagonal(&[Jet2::constant(1.0), a * a, Jet2::constant(1.0)])
        });
        Manifold::Chart(ChartManifold::new(vec![tau; 3], metric).unwrap())
    }

    #[test]
    fn flat_christoffel_vanishes() {
        let m = Manifold::Chart(ChartManifold::flat(vec![1.0; 3]).unwrap());
        let g = m.christoffel(&Point::new(vec![0.1, 0.2, 0.3])).unwrap();
        assert!(g.data.iter().all(|x| *x == 0.0));
        let id = m.metric_at(&Point::new(vec![0.7, 0.2, 0.9])).unwrap();
        assert_eq!(id, Mat::identity(3));
    }

    #[test]
    fn warped_christoffel_matches_hand_derivation() {
        let m = warped3();
        let z = 0.8_f64;
        let g = m.christoffel(&Point::new(vec![0.0, 0.0, z])).unwrap();
        let (a, da) = (2.0 + z.cos(), -z.sin());
        assert!((g.get(1, 1, 2) - da / a).abs() < 1e-15);
        assert_eq!(g.get(1, 1, 2), g.get(1, 2, 1));
        assert!((g.get(2, 1, 1) + a * da).abs() < 1e-15);
        assert_eq!(g.get(0, 1, 1), 0.0);
    }

    #[test]
    fn non_finite_metric_names_the_coefficient() {
        let metric: MetricFn = Arc::new(|x: &[Jet2]| {
            let bad = x[0].ln();
            Mat::diagonal(&[bad, Jet2::constant(1.0)])
        });
        let m = Manifold::Chart(ChartManifold::new(vec![1.0, 1.0], metric).unwrap());
        let err = m.metric_at(&Point::new(vec![-1.0, 0.0])).unwrap_err();
        match err {
            GeometryError::NonFinite { what, .. } => assert!(what.contains("g[0][0]")),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn indefinite_metric_is_rejected() {
        let metric: MetricFn =
            Arc::new(|_: &[Jet2]| Mat::diagonal(&[Jet2::constant(1.0), Jet2::constant(-1.0)]));
        let m = Manifold::Chart(ChartManifold::new(vec![1.0, 1.0], metric).unwrap());
        assert!(matches!(
            m.christoffel(&Point::origin(2)),
            Err(GeometryError::SingularMetric { .. })
        ));
    }

    #[test]
    fn structure_constants_are_validated() {
        // Jacobi on (E0,E1,E2) gives -E2
        let bad = InvariantFrameManifold::from_brackets(3, &[(0, 1, 2, 1.0), (1, 2, 1, 1.0)], 1.0);
        assert!(bad.is_err());
        let heis = InvariantFrameManifold::from_brackets(3, &[(0, 1, 2, 1.0)], 1.0).unwrap();
        assert_eq!(heis.jacobi_residual(), 0.0);
    }

    #[test]
    fn bi_invariant_connection_is_half_bracket() {
        let s3 = InvariantFrameManifold::from_brackets(
            3,
            &[(0, 1, 2, 2.0), (1, 2, 0, 2.0), (2, 0, 1, 2.0)],
            1.0,
        )
        .unwrap();
        let g = s3.connection();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    let half = 0.5 * s3.structure_constant(k, i, j);
                    assert!((g.get(k, i, j) - half).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn determinant_of_diagonal() {
        let d = Mat::diagonal(&[2.0, 3.0, 0.5]);
        assert!((determinant(&d) - 3.0).abs() < 1e-15);
    }
}
