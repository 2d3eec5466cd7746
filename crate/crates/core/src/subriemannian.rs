//! Distributions, the orthoprojector onto them, the induced connection
//! `∇^P_X U = P∇_X U` on sections of `D` and its curvature `R^P`.
//!
//! A foliated sub-Riemannian structure is described by an [`AdaptedFrame`]
//! field: an orthonormal frame `e_1..e_n` of the leaves, the unit normal `N`
//! of the leaves inside `D`, and an orthonormal frame of `D^⊥`. The
//! distribution itself is `D = span(e_1..e_n, N)`.

use std::fmt;
use std::sync::Arc;

use crate::error::{GeometryError, Result};
use crate::jet::{truncate_vec, values, Jet1, Jet2, Lower, Scalar};
use crate::linalg::{combine, norm, Mat};
use crate::manifold::{Manifold, ManifoldLocal, Point, TangentVector, VectorField};
use crate::tolerances;

/// Orthonormal frame adapted to `TM = TF ⊕ span(N) ⊕ D^⊥`, components in
/// the backend basis.
#[derive(Clone, Debug, PartialEq)]
pub struct AdaptedFrame<S> {
    pub leaf: Vec<Vec<S>>,
    pub normal: Vec<S>,
    pub perp: Vec<Vec<S>>,
}

impl<S: Scalar> AdaptedFrame<S> {
    /// Frame of `D`: leaf vectors followed by `N`.
    pub fn d_frame(&self) -> Vec<Vec<S>> {
        let mut v = self.leaf.clone();
        v.push(self.normal.clone());
        v
    }

    /// Full ambient frame: leaf, `N`, then `D^⊥`.
    pub fn ambient(&self) -> Vec<Vec<S>> {
        let mut v = self.d_frame();
        v.extend(self.perp.iter().cloned());
        v
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> AdaptedFrame<T> {
        let mv = |v: &Vec<S>| v.iter().map(&f).collect::<Vec<T>>();
        AdaptedFrame {
            leaf: self.leaf.iter().map(mv).collect(),
            normal: mv(&self.normal),
            perp: self.perp.iter().map(mv).collect(),
        }
    }
}

impl<S: Lower> AdaptedFrame<S> {
    pub fn truncate(&self) -> AdaptedFrame<S::Down> {
        self.map(Lower::truncate)
    }
}

pub type FrameField = Arc<dyn Fn(&[Jet2]) -> AdaptedFrame<Jet2> + Send + Sync>;

/// How the integrability of the leaf distribution is known.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IntegrabilityWitness {
    /// Leaf fields are tangent to coordinate subtori.
    CoordinateSubtori,
    /// Leaf fields span a subalgebra of the invariant frame.
    Subalgebra,
    /// No structural reason; integrability is only checked numerically.
    Numerical,
}

/// A manifold with a distribution `D = TF ⊕ span(N)` and its orthogonal
/// complement.
#[derive(Clone)]
pub struct FoliatedManifold {
    pub manifold: Manifold,
    frame: FrameField,
    leaf_dim: usize,
    pub witness: IntegrabilityWitness,
}

impl fmt::Debug for FoliatedManifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FoliatedManifold")
            .field("manifold", &self.manifold)
            .field("leaf_dim", &self.leaf_dim)
            .field("witness", &self.witness)
            .finish_non_exhaustive()
    }
}

impl FoliatedManifold {
    pub fn new(
        manifold: Manifold,
        frame: FrameField,
        leaf_dim: usize,
        witness: IntegrabilityWitness,
    ) -> Result<Self> {
        let m = manifold.dim();
        if leaf_dim == 0 || leaf_dim + 1 > m {
            return Err(GeometryError::Dimension(format!(
                "leaf dimension {leaf_dim} incompatible with manifold dimension {m}"
            )));
        }
        let fol = FoliatedManifold {
            manifold,
            frame,
            leaf_dim,
            witness,
        };
        // shape check at one point; orthonormality is checked on every evaluation
        let seeds = fol.manifold.seed(&Point::origin(m));
        let f = (fol.frame)(&seeds);
        let ok = f.leaf.len() == leaf_dim
            && f.perp.len() == m - leaf_dim - 1
            && f.ambient().iter().all(|v| v.len() == m);
        if !ok {
            return Err(GeometryError::Dimension(format!(
                "frame evaluator does not produce {leaf_dim} leaf, 1 normal and {} perpendicular vectors of length {m}",
                m - leaf_dim - 1
            )));
        }
        Ok(fol)
    }

    pub fn dim(&self) -> usize {
        self.manifold.dim()
    }

    /// `n`, the leaf dimension.
    pub fn leaf_dim(&self) -> usize {
        self.leaf_dim
    }

    /// Rank of `D`, i.e. `n + 1`.
    pub fn rank(&self) -> usize {
        self.leaf_dim + 1
    }

    pub fn frame_field(&self) -> &FrameField {
        &self.frame
    }

    /// Same manifold and distribution with a different adapted frame.
    pub fn with_frame(&self, frame: FrameField) -> Result<Self> {
        Self::new(self.manifold.clone(), frame, self.leaf_dim, self.witness)
    }

    pub fn local(&self, p: &Point) -> Result<Local> {
        Local::new(self, p)
    }

    pub fn orthoprojector(&self, p: &Point) -> Result<Projector> {
        let loc = self.local(p)?;
        Ok(Projector {
            matrix: loc.proj0.clone(),
            metric: loc.base.g0.clone(),
        })
    }

    /// `∇^P_X U` for a section `U` of `D`.
    pub fn nabla_p(&self, x: &[f64], u: &VectorField, p: &Point) -> Result<TangentVector> {
        let loc = self.local(p)?;
        let u2 = u(&loc.base.seeds);
        loc.check_in_d(&values(&u2), "U")?;
        Ok(TangentVector {
            components: loc.nabla_p::<Jet2>(&loc.lower_vec(x), &u2)
                .iter()
                .map(Scalar::value)
                .collect(),
            base: p.clone(),
        })
    }

    /// `R^P(X,Y)V` for tangent vectors `X`, `Y` (extended through the
    /// adapted frame) and a section `V` of `D`.
    pub fn curvature_p(
        &self,
        x: &[f64],
        y: &[f64],
        v: &VectorField,
        p: &Point,
    ) -> Result<TangentVector> {
        let loc = self.local(p)?;
        let v2 = v(&loc.base.seeds);
        loc.check_in_d(&values(&v2), "V")?;
        Ok(TangentVector {
            components: loc.curvature_p_fields(&loc.extend(x), &loc.extend(y), &v2),
            base: p.clone(),
        })
    }

    pub fn mean_curvature_perp(&self, p: &Point) -> Result<TangentVector> {
        let loc = self.local(p)?;
        Ok(TangentVector {
            components: loc.mean_curvature_perp(),
            base: p.clone(),
        })
    }

    pub fn admissibility_residual(&self, p: &Point) -> Result<f64> {
        Ok(self.local(p)?.admissibility_residual())
    }
}

/// The orthoprojector onto `D` at a point, as a matrix acting on components.
#[derive(Clone, Debug, PartialEq)]
pub struct Projector {
    pub matrix: Mat<f64>,
    pub metric: Mat<f64>,
}

impl Projector {
    /// `P^⊥ = Id − P`.
    pub fn complement(&self) -> Mat<f64> {
        Mat::identity(self.matrix.rows()).sub(&self.matrix)
    }

    pub fn idempotence_residual(&self) -> f64 {
        self.matrix.matmul(&self.matrix).sub(&self.matrix).max_abs()
    }

    /// Self-adjointness with respect to `g`: `gP` must be symmetric.
    pub fn self_adjoint_residual(&self) -> f64 {
        self.metric.matmul(&self.matrix).asymmetry()
    }
}

/// Everything known about the structure at one point.
#[derive(Clone, Debug)]
pub struct Local {
    pub base: ManifoldLocal,
    pub leaf_dim: usize,
    pub frame2: AdaptedFrame<Jet2>,
    pub frame1: AdaptedFrame<Jet1>,
    pub frame0: AdaptedFrame<f64>,
    pub proj1: Mat<Jet1>,
    pub proj0: Mat<f64>,
}

impl Local {
    fn new(fol: &FoliatedManifold, p: &Point) -> Result<Self> {
        let base = fol.manifold.local(p)?;
        let frame2 = (fol.frame)(&base.seeds);
        if frame2.ambient().iter().flatten().any(|x| !x.is_finite()) {
            return Err(GeometryError::NonFinite {
                what: "adapted frame".into(),
                point: p.0.clone(),
            });
        }
        let frame1 = frame2.truncate();
        let frame0 = frame2.map(Scalar::value);
        let amb = frame0.ambient();
        let mut worst: f64 = 0.0;
        for (a, u) in amb.iter().enumerate() {
            for (b, v) in amb.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((base.inner(u, v) - target).abs());
            }
        }
        if worst > tolerances::FRAME_ORTHONORMALITY {
            return Err(GeometryError::Frame {
                reason: format!("adapted frame not orthonormal (residual {worst:e})"),
                point: p.0.clone(),
            });
        }
        let m = base.dim();
        let d1 = frame1.d_frame();
        let gd: Vec<Vec<Jet1>> = d1.iter().map(|d| base.g1.mul_vec(d)).collect();
        let proj1 = Mat::from_fn(m, m, |i, j| {
            let mut acc = Jet1::constant(0.0);
            for (d, gdv) in d1.iter().zip(&gd) {
                acc += d[i] * gdv[j];
            }
            acc
        });
        let proj0 = proj1.values();
        Ok(Local {
            base,
            leaf_dim: fol.leaf_dim,
            frame2,
            frame1,
            frame0,
            proj1,
            proj0,
        })
    }

    pub fn dim(&self) -> usize {
        self.base.dim()
    }

    pub fn point(&self) -> &Point {
        &self.base.point
    }

    /// Promotes a component vector to constant jets.
    pub fn lower_vec(&self, x: &[f64]) -> Vec<Jet1> {
        x.iter().map(|&c| Jet1::constant(c)).collect()
    }

    /// Extends a tangent vector at the point to a field with constant
    /// coefficients in the adapted frame.
    pub fn extend(&self, x: &[f64]) -> Vec<Jet2> {
        let amb0 = self.frame0.ambient();
        let coeffs: Vec<Jet2> = amb0
            .iter()
            .map(|f| Jet2::constant(self.base.inner(x, f)))
            .collect();
        combine(&coeffs, &self.frame2.ambient())
    }

    pub fn project1(&self, v: &[Jet1]) -> Vec<Jet1> {
        self.proj1.mul_vec(v)
    }

    pub fn project0(&self, v: &[f64]) -> Vec<f64> {
        self.proj0.mul_vec(v)
    }

    /// `‖P^⊥ v‖`.
    pub fn distance_from_d(&self, v: &[f64]) -> f64 {
        let pv = self.project0(v);
        let diff: Vec<f64> = v.iter().zip(&pv).map(|(a, b)| a - b).collect();
        self.base.norm(&diff)
    }

    fn check_in_d(&self, v: &[f64], name: &str) -> Result<()> {
        let d = self.distance_from_d(v);
        if d > tolerances::IN_DISTRIBUTION * (1.0 + self.base.norm(v)) {
            return Err(GeometryError::Domain(format!(
                "{name} is not a section of D at {:?} (distance {d:e})",
                self.point().0
            )));
        }
        Ok(())
    }

    /// `∇^P_X U = P∇_X U`; the result is one order lower than `U`.
    pub fn nabla_p<S>(&self, x: &[S::Down], u: &[S]) -> Vec<S::Down>
    where
        S: Lower,
        S::Down: ProjLevel,
    {
        let w = self.base.nabla::<S>(x, u);
        <S::Down as ProjLevel>::proj(self).mul_vec(&w)
    }

    pub fn curvature_p_fields(&self, x: &[Jet2], y: &[Jet2], v: &[Jet2]) -> Vec<f64> {
        self.base
            .curvature_fields(x, y, v, Some((&self.proj1, &self.proj0)))
    }

    /// Re-evaluates `R^P(X,Y)V` with every extension multiplied by a
    /// nonconstant function equal to one at the point; returns the largest
    /// component change. Zero up to rounding iff the computation is tensorial.
    pub fn curvature_p_rescaling_residual(&self, x: &[f64], y: &[f64], v: &[f64]) -> f64 {
        let base = self.curvature_p_fields(&self.extend(x), &self.extend(y), &self.extend(v));
        let p = self.point().0.clone();
        let seeds = &self.base.seeds;
        let bump = |phase: f64| {
            let mut s = Jet2::constant(0.0);
            for (k, q) in seeds.iter().enumerate() {
                s += (*q - p[k]) * (1.0 + 0.5 * k as f64 + phase);
            }
            s.sin() * 0.4 + s.cos() * 0.3 + 0.7
        };
        let scale = |f: Jet2, w: Vec<Jet2>| w.into_iter().map(|c| c * f).collect::<Vec<_>>();
        let scaled = self.curvature_p_fields(
            &scale(bump(0.1), self.extend(x)),
            &scale(bump(0.7), self.extend(y)),
            &scale(bump(1.3), self.extend(v)),
        );
        base.iter()
            .zip(&scaled)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `H^⊥ = Σ_ξ P∇_ξ ξ` over the orthonormal frame of `D^⊥`.
    pub fn mean_curvature_perp(&self) -> Vec<f64> {
        let m = self.dim();
        let mut h = vec![0.0; m];
        for (xi0, xi1) in self.frame0.perp.iter().zip(&self.frame1.perp) {
            let w = self.nabla_p::<Jet1>(xi0, xi1);
            for k in 0..m {
                h[k] += w[k];
            }
        }
        h
    }

    /// `max_ξ ‖∇^P_ξ N‖` over the frame of `D^⊥`.
    pub fn admissibility_residual(&self) -> f64 {
        self.frame0
            .perp
            .iter()
            .map(|xi| {
                let w = self.nabla_p::<Jet1>(xi, &self.frame1.normal);
                self.base.norm(&w)
            })
            .fold(0.0, f64::max)
    }

    /// Components `⟨R(F_a,F_b)F_c, F_e⟩` over the frame of `D`, either for
    /// `R^P` (`projected`) or the Riemann tensor.
    pub fn d_curvature(&self, projected: bool) -> DCurvature {
        let d2 = self.frame2.d_frame();
        let d0 = self.frame0.d_frame();
        let r = d2.len();
        let mut data = vec![0.0; r * r * r * r];
        for a in 0..r {
            for b in (a + 1)..r {
                for c in 0..r {
                    let w = if projected {
                        self.curvature_p_fields(&d2[a], &d2[b], &d2[c])
                    } else {
                        self.base.curvature_fields(&d2[a], &d2[b], &d2[c], None)
                    };
                    for (e, fe) in d0.iter().enumerate() {
                        let val = self.base.inner(&w, fe);
                        data[((a * r + b) * r + c) * r + e] = val;
                        data[((b * r + a) * r + c) * r + e] = -val;
                    }
                }
            }
        }
        DCurvature { rank: r, data }
    }

    /// Residual of `X⟨U,V⟩ = ⟨∇^P_X U, V⟩ + ⟨U, ∇^P_X V⟩` for sections `U`, `V`.
    pub fn metric_compatibility_residual(&self, x: &[f64], u: &[Jet2], v: &[Jet2]) -> f64 {
        let u1 = truncate_vec(u);
        let v1 = truncate_vec(v);
        let x1 = self.lower_vec(x);
        let lhs = self.base.inner::<Jet1>(&u1, &v1).directional(x);
        let u0 = values(u);
        let v0 = values(v);
        let nu = self.nabla_p::<Jet2>(&x1, u);
        let nv = self.nabla_p::<Jet2>(&x1, v);
        let rhs = self.base.inner(&values(&nu), &v0) + self.base.inner(&u0, &values(&nv));
        (lhs - rhs).abs()
    }

    /// `‖(Id − Π_TF) [e_i, e_j]‖` maximised over leaf pairs.
    pub fn integrability_residual(&self) -> f64 {
        let n = self.leaf_dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let br = values(&self.base.bracket::<Jet2>(&self.frame2.leaf[i], &self.frame2.leaf[j]));
                let mut rest = br.clone();
                for e in &self.frame0.leaf {
                    let c = self.base.inner(&br, e);
                    for (r, ek) in rest.iter_mut().zip(e) {
                        *r -= c * ek;
                    }
                }
                worst = worst.max(self.base.norm(&rest));
            }
        }
        worst
    }

    /// Orthogonal projection onto `TF`.
    pub fn leaf_projection(&self, v: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; v.len()];
        for e in &self.frame0.leaf {
            let c = self.base.inner(v, e);
            for (o, ek) in out.iter_mut().zip(e) {
                *o += c * ek;
            }
        }
        out
    }

    /// Components of `v` in the leaf frame.
    pub fn leaf_components(&self, v: &[f64]) -> Vec<f64> {
        self.frame0.leaf.iter().map(|e| self.base.inner(v, e)).collect()
    }

    /// `max ‖P v − v‖/‖v‖`-style check that the adapted `D` frame is
    /// consistent with the projector (used by tests).
    pub fn projector_residuals(&self) -> (f64, f64) {
        let p = Projector {
            matrix: self.proj0.clone(),
            metric: self.base.g0.clone(),
        };
        (p.idempotence_residual(), p.self_adjoint_residual())
    }

    pub fn norm(&self, v: &[f64]) -> f64 {
        self.base.norm(v)
    }

    pub fn euclidean_norm(v: &[f64]) -> f64 {
        norm(v)
    }
}

/// Scalars at which the projector is cached.
pub trait ProjLevel: crate::manifold::Level {
    fn proj(loc: &Local) -> &Mat<Self>;
}

impl ProjLevel for f64 {
    fn proj(loc: &Local) -> &Mat<f64> {
        &loc.proj0
    }
}

impl ProjLevel for Jet1 {
    fn proj(loc: &Local) -> &Mat<Jet1> {
        &loc.proj1
    }
}

/// `⟨R(F_a,F_b)F_c, F_e⟩` for `a, b, c, e` indexing the frame of `D`
/// (leaf vectors `0..n`, then `N` at index `n`).
#[derive(Clone, Debug, PartialEq)]
pub struct DCurvature {
    rank: usize,
    data: Vec<f64>,
}

impl DCurvature {
    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize, e: usize) -> f64 {
        let r = self.rank;
        self.data[((a * r + b) * r + c) * r + e]
    }

    /// Index of `N` in the frame of `D`.
    pub fn normal_index(&self) -> usize {
        self.rank - 1
    }

    /// Leaf-frame matrix of `V ↦ R(V, X)N` for `X` given by its
    /// `D`-frame coefficients; entry `(k, l) = ⟨R(e_l, X)N, e_k⟩`.
    pub fn operator(&self, x: &[f64]) -> Mat<f64> {
        let n = self.rank - 1;
        let nn = self.normal_index();
        Mat::from_fn(n, n, |k, l| {
            x.iter()
                .enumerate()
                .map(|(b, xb)| xb * self.get(l, b, nn, k))
                .sum()
        })
    }

    /// `Σ_i ⟨R(e_i, X)N, e_i⟩`.
    pub fn ricci(&self, x: &[f64]) -> f64 {
        self.operator(x).trace()
    }

    /// Coefficients of `N` in the frame of `D`.
    pub fn normal_coeffs(&self) -> Vec<f64> {
        let mut v = vec![0.0; self.rank];
        v[self.rank - 1] = 1.0;
        v
    }

    /// Largest `|⟨R(X,Y)V,U⟩ + ⟨R(X,Y)U,V⟩|` over frame indices.
    pub fn pair_antisymmetry(&self) -> f64 {
        let r = self.rank;
        let mut w: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                for c in 0..r {
                    for e in 0..r {
                        w = w.max((self.get(a, b, c, e) + self.get(a, b, e, c)).abs());
                    }
                }
            }
        }
        w
    }

    /// Largest deviation from `R(X,Y)V = c(⟨Y,V⟩X − ⟨X,V⟩Y)` on the frame.
    pub fn constant_curvature_residual(&self, c: f64) -> f64 {
        let r = self.rank;
        let d = |i: usize, j: usize| if i == j { 1.0 } else { 0.0 };
        let mut w: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                for v in 0..r {
                    for e in 0..r {
                        let model = c * (d(b, v) * d(a, e) - d(a, v) * d(b, e));
                        w = w.max((self.get(a, b, v, e) - model).abs());
                    }
                }
            }
        }
        w
    }

    /// Largest `N`-component of `R(X,Y)V` for leaf `X, Y, V`.
    pub fn leaf_invariance_residual(&self) -> f64 {
        let n = self.rank - 1;
        let mut w: f64 = 0.0;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    w = w.max(self.get(a, b, c, n).abs());
                }
            }
        }
        w
    }
}
