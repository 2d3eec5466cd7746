//! Foliation quantities inside `D = TF ⊕ span(N)`: shape operator, the
//! curvature vector `Z = P∇_N N`, Newton transformations as fields, Ricci
//! P-curvature, leafwise divergences and the pointwise identities relating
//! them.
//!
//! Leafwise operators are matrices in the leaf frame `e_1..e_n`, with entry
//! `(k, l) = ⟨B e_l, e_k⟩`. Their covariant derivative is corrected by the
//! connection forms `ω_{kl}(X) = ⟨∇_X e_l, e_k⟩` of the frame, which makes it
//! independent of the frame chosen.

use std::sync::{Arc, OnceLock};

use crate::error::Result;
use crate::jet::{truncate_vec, values, Jet1, Jet2, Lower, Scalar};
use crate::linalg::{combine, Mat};
use crate::manifold::{Point, TangentVector, VectorField};
use crate::subriemannian::{AdaptedFrame, DCurvature, FoliatedManifold, FrameField, Local};
use crate::symmetric::{newton_transforms, sigmas};

/// The three integrals of the main formula at one point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct MainTerms {
    /// `(r+2)σ_{r+2}`
    pub sigma: f64,
    /// `tr(T_r R_N)`
    pub ricci: f64,
    /// `Σ_{j=1}^r (−1)^{j−1} tr(T_{r−j} R_{A^{j−1}Z})`
    pub z_series: f64,
}

impl MainTerms {
    pub fn integrand(&self) -> f64 {
        self.sigma - self.ricci - self.z_series
    }
}

/// Additional terms of the compact-leaf formula.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LeafTerms {
    pub main: MainTerms,
    /// `N(σ_{r+1})`
    pub n_sigma: f64,
    /// `σ_1 σ_{r+1}`
    pub sigma_product: f64,
    /// `⟨T_r Z, Z⟩`
    pub tz_z: f64,
}

impl LeafTerms {
    pub fn integrand(&self) -> f64 {
        self.main.sigma + self.n_sigma - self.sigma_product - self.main.ricci - self.tz_z - self.main.z_series
    }
}

/// Every foliation quantity at one point.
#[derive(Debug)]
pub struct FoliationPoint {
    pub local: Local,
    /// Symmetrized shape operator with its first derivatives.
    pub a1: Mat<Jet1>,
    pub a: Mat<f64>,
    /// Largest entry of `|A − Aᵀ|` before symmetrization.
    pub shape_asymmetry: f64,
    /// `σ_0..σ_n` with first derivatives.
    pub sigma1: Vec<Jet1>,
    /// `T_0..T_n` with first derivatives.
    pub newton1: Vec<Mat<Jet1>>,
    pub newton: Vec<Mat<f64>>,
    /// `Z = P∇_N N`, ambient components, with first derivatives.
    pub z1: Vec<Jet1>,
    pub z: Vec<f64>,
    /// `Z` in the leaf frame.
    pub z_leaf: Vec<f64>,
    /// `R^P` on the frame of `D`.
    pub rp: DCurvature,
    riemann: OnceLock<DCurvature>,
}

impl FoliationPoint {
    pub fn new(fol: &FoliatedManifold, p: &Point) -> Result<Self> {
        Self::from_local(fol.local(p)?)
    }

    pub fn from_local(local: Local) -> Result<Self> {
        let n = local.leaf_dim;
        let normal2 = &local.frame2.normal;
        let raw = Mat::from_fn(n, n, |k, l| {
            // ⟨A e_l, e_k⟩ = −⟨P∇_{e_l} N, e_k⟩
            let w = local.nabla_p::<Jet2>(&local.frame1.leaf[l], normal2);
            -local.base.inner::<Jet1>(&w, &local.frame1.leaf[k])
        });
        let shape_asymmetry = raw.values().asymmetry();
        let a1 = raw.symmetrized();
        let a = a1.values();
        let sigma1 = sigmas(&a1);
        let newton1 = newton_transforms(&a1);
        let newton = newton1.iter().map(Mat::values).collect();
        let z1 = local.nabla_p::<Jet2>(&local.frame1.normal, normal2);
        let z = values(&z1);
        let z_leaf = local.leaf_components(&z);
        let rp = local.d_curvature(true);
        Ok(FoliationPoint {
            local,
            a1,
            a,
            shape_asymmetry,
            sigma1,
            newton1,
            newton,
            z1,
            z,
            z_leaf,
            rp,
            riemann: OnceLock::new(),
        })
    }

    /// Leaf dimension `n`.
    pub fn n(&self) -> usize {
        self.local.leaf_dim
    }

    fn frame0(&self) -> &AdaptedFrame<f64> {
        &self.local.frame0
    }

    /// `σ_k`, zero for `k > n`.
    pub fn sigma(&self, k: usize) -> f64 {
        self.sigma1.get(k).map_or(0.0, Scalar::value)
    }

    /// `N(σ_k)`, zero for `k > n`.
    pub fn n_sigma(&self, k: usize) -> f64 {
        self.sigma1
            .get(k)
            .map_or(0.0, |s| s.directional(&self.frame0().normal))
    }

    /// Riemann tensor on the frame of `D` (computed on first use).
    pub fn riemann(&self) -> &DCurvature {
        self.riemann.get_or_init(|| self.local.d_curvature(false))
    }

    fn curvature(&self, projected: bool) -> &DCurvature {
        if projected {
            &self.rp
        } else {
            self.riemann()
        }
    }

    /// Coefficients of a vector of `D` in the frame of `D`.
    pub fn d_coeffs(&self, x: &[f64]) -> Vec<f64> {
        self.frame0()
            .d_frame()
            .iter()
            .map(|d| self.local.base.inner(x, d))
            .collect()
    }

    fn leaf_to_d(&self, x_leaf: &[f64]) -> Vec<f64> {
        let mut v = x_leaf.to_vec();
        v.push(0.0);
        v
    }

    /// Ambient components of a leaf-frame vector.
    pub fn leaf_to_ambient(&self, x_leaf: &[f64]) -> Vec<f64> {
        combine(x_leaf, &self.frame0().leaf)
    }

    /// Matrix of `R^P_X : V ↦ R^P(V, X)N` (or of `R` when not projected).
    pub fn curvature_operator(&self, x: &[f64], projected: bool) -> Mat<f64> {
        self.curvature(projected).operator(&self.d_coeffs(x))
    }

    /// `Ric^P_{X,N}`.
    pub fn ricci_p(&self, x: &[f64]) -> f64 {
        self.rp.ricci(&self.d_coeffs(x))
    }

    /// `tr(T_r R_X)` for `X` given by its coefficients in the frame of `D`.
    fn tr_newton_curvature(&self, r: usize, x_d: &[f64], projected: bool) -> f64 {
        let op = self.curvature(projected).operator(x_d);
        self.newton[r].matmul(&op).trace()
    }

    /// `Σ_{j=1}^r (−1)^{j−1} tr(T_{r−j} R_{A^{j−1}X})` for a leaf vector `X`.
    pub fn newton_series(&self, r: usize, x_leaf: &[f64], projected: bool) -> f64 {
        let mut acc = 0.0;
        let mut ax = x_leaf.to_vec();
        for j in 1..=r {
            let t = self.tr_newton_curvature(r - j, &self.leaf_to_d(&ax), projected);
            acc += if j % 2 == 1 { t } else { -t };
            ax = self.a.mul_vec(&ax);
        }
        acc
    }

    pub fn main_terms(&self, r: usize, projected: bool) -> MainTerms {
        let n_d = self.rp.normal_coeffs();
        MainTerms {
            sigma: (r + 2) as f64 * self.sigma(r + 2),
            ricci: self.tr_newton_curvature(r, &n_d, projected),
            z_series: self.newton_series(r, &self.z_leaf, projected),
        }
    }

    pub fn leaf_terms(&self, r: usize) -> LeafTerms {
        let tz = self.newton[r].mul_vec(&self.z_leaf);
        LeafTerms {
            main: self.main_terms(r, true),
            n_sigma: self.n_sigma(r + 1),
            sigma_product: self.sigma(1) * self.sigma(r + 1),
            tz_z: tz.iter().zip(&self.z_leaf).map(|(a, b)| a * b).sum(),
        }
    }

    /// Connection forms `ω_{kl}(X) = ⟨∇_X e_l, e_k⟩`.
    pub fn connection_forms(&self, x: &[f64]) -> Mat<f64> {
        let n = self.n();
        let cols: Vec<Vec<f64>> = self
            .local
            .frame1
            .leaf
            .iter()
            .map(|e| self.local.base.nabla::<Jet1>(x, e))
            .collect();
        Mat::from_fn(n, n, |k, l| {
            self.local.base.inner(&cols[l], &self.frame0().leaf[k])
        })
    }

    /// `∇^F_X B` for a leafwise operator field `B` known to first order.
    pub fn covariant_operator(&self, b: &Mat<Jet1>, x: &[f64]) -> Mat<f64> {
        let w = self.connection_forms(x);
        let db = b.map(|e| e.directional(x));
        let b0 = b.values();
        db.add(&w.matmul(&b0)).sub(&b0.matmul(&w))
    }

    /// `∇^F_N A`.
    pub fn nabla_f_n_a(&self) -> Mat<f64> {
        self.covariant_operator(&self.a1, &self.frame0().normal)
    }

    /// `Div_F T_r = Σ_i (∇^F_{e_i} T_r) e_i`, in the leaf frame.
    pub fn div_f_newton_direct(&self, r: usize) -> Vec<f64> {
        let n = self.n();
        let mut out = vec![0.0; n];
        for i in 0..n {
            let d = self.covariant_operator(&self.newton1[r], &self.frame0().leaf[i]);
            for (j, o) in out.iter_mut().enumerate() {
                *o += d[(j, i)];
            }
        }
        out
    }

    /// `⟨Div_F T_r, e_l⟩ = Σ_{j=1}^r (−1)^{j−1} tr(T_{r−j} R^P_{A^{j−1} e_l})`.
    pub fn div_f_newton_formula(&self, r: usize) -> Vec<f64> {
        let n = self.n();
        (0..n)
            .map(|l| {
                let mut e = vec![0.0; n];
                e[l] = 1.0;
                self.newton_series(r, &e, true)
            })
            .collect()
    }

    /// `Σ_i ⟨∇_{e_i} X, e_i⟩` for a field known to first order.
    pub fn leafwise_divergence1(&self, x: &[Jet1]) -> f64 {
        self.frame0()
            .leaf
            .iter()
            .map(|e| self.local.base.inner(&self.local.base.nabla::<Jet1>(e, x), e))
            .sum()
    }

    /// `Div_F(T_r Z)` by direct differentiation.
    pub fn div_f_newton_z(&self, r: usize) -> f64 {
        let leaf1 = &self.local.frame1.leaf;
        let zc: Vec<Jet1> = leaf1
            .iter()
            .map(|e| self.local.base.inner::<Jet1>(&self.z1, e))
            .collect();
        let coeffs = self.newton1[r].mul_vec(&zc);
        self.leafwise_divergence1(&combine(&coeffs, leaf1))
    }

    /// `Div_F(T_r Z)` minus the right-hand side of the pointwise
    /// proposition, with `⟨Div_F T_r, Z⟩` from the curvature series.
    pub fn proposition_residual(&self, r: usize) -> f64 {
        let t = self.leaf_terms(r);
        let div_z: f64 = self
            .div_f_newton_formula(r)
            .iter()
            .zip(&self.z_leaf)
            .map(|(a, b)| a * b)
            .sum();
        let rhs = div_z + t.main.ricci + t.tz_z - t.main.sigma - t.n_sigma + t.sigma_product;
        self.div_f_newton_z(r) - rhs
    }

    /// Largest entry of `⟨∇_{e_i}Z, e_j⟩ − [⟨A²e_i,e_j⟩ + ⟨R^P(e_i,N)N,e_j⟩
    /// − ⟨(∇^F_N A)e_i,e_j⟩ + ⟨Z,e_i⟩⟨Z,e_j⟩]`.
    pub fn einnc_residual(&self) -> f64 {
        let n = self.n();
        let nn = self.rp.normal_index();
        let a2 = self.a.matmul(&self.a);
        let dna = self.nabla_f_n_a();
        let leaf = &self.frame0().leaf;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let dz = self.local.base.nabla::<Jet1>(&leaf[i], &self.z1);
            for j in 0..n {
                let lhs = self.local.base.inner(&dz, &leaf[j]);
                let rhs = a2[(j, i)] + self.rp.get(i, nn, nn, j) - dna[(j, i)]
                    + self.z_leaf[i] * self.z_leaf[j];
                worst = worst.max((lhs - rhs).abs());
            }
        }
        worst
    }

    /// `‖(∇^F_X A)Y − (∇^F_Y A)X + R(X,Y)N‖` for leaf-frame vectors, with
    /// `R^P` or (for `D = TM`) the Riemann tensor.
    pub fn codazzi_residual_with(&self, x_leaf: &[f64], y_leaf: &[f64], projected: bool) -> f64 {
        let n = self.n();
        let nn = self.rp.normal_index();
        let curv = self.curvature(projected);
        let x = self.leaf_to_ambient(x_leaf);
        let y = self.leaf_to_ambient(y_leaf);
        let ax = self.covariant_operator(&self.a1, &x).mul_vec(y_leaf);
        let ay = self.covariant_operator(&self.a1, &y).mul_vec(x_leaf);
        let mut out = vec![0.0; n + 1];
        for a in 0..n {
            for b in 0..n {
                let c = x_leaf[a] * y_leaf[b];
                if c == 0.0 {
                    continue;
                }
                for (k, o) in out.iter_mut().enumerate() {
                    *o += c * curv.get(a, b, nn, k);
                }
            }
        }
        for k in 0..n {
            out[k] += ax[k] - ay[k];
        }
        out.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn codazzi_residual(&self, x_leaf: &[f64], y_leaf: &[f64]) -> f64 {
        self.codazzi_residual_with(x_leaf, y_leaf, true)
    }

    /// Asymmetry of `∇^F_X T_r` over the leaf frame directions.
    pub fn tr_adjoint_residual(&self, r: usize) -> f64 {
        self.frame0()
            .leaf
            .iter()
            .map(|e| self.covariant_operator(&self.newton1[r], e).asymmetry())
            .fold(0.0, f64::max)
    }

    /// `tr(T_{r−1}(∇^F_X A)) − X(σ_r)` for `1 ≤ r ≤ n` and a leaf vector `X`.
    pub fn field_trace_residual(&self, r: usize, x_leaf: &[f64]) -> f64 {
        let x = self.leaf_to_ambient(x_leaf);
        let lhs = self.newton[r - 1]
            .matmul(&self.covariant_operator(&self.a1, &x))
            .trace();
        lhs - self.sigma1[r].directional(&x)
    }

    /// `Div_F N + σ_1`.
    pub fn div_f_normal_residual(&self) -> f64 {
        let n1 = truncate_vec(&self.local.frame2.normal);
        self.leafwise_divergence1(&n1) + self.sigma(1)
    }

    /// Terms of the ambient divergence of a field `X` of `D`.
    pub fn divergence_split(&self, x: &[Jet2]) -> DivergenceSplit {
        let x1 = truncate_vec(x);
        let x0 = values(x);
        let base = &self.local.base;
        let h = self.local.mean_curvature_perp();
        let normal1 = &self.local.frame1.normal;
        DivergenceSplit {
            div: base.divergence::<Jet2>(x).value(),
            div_f: self.leafwise_divergence1(&x1),
            x_z: base.inner(&x0, &self.z),
            x_h: base.inner(&x0, &h),
            n_x_n: base
                .inner::<Jet1>(&x1, normal1)
                .directional(&self.frame0().normal),
        }
    }

    /// `h(X,Y) = (∇_X Y)^⊥` for leaf vectors, `Y` extended with constant
    /// leaf-frame coefficients.
    pub fn second_fundamental_form(&self, x_leaf: &[f64], y_leaf: &[f64]) -> Vec<f64> {
        let x = self.leaf_to_ambient(x_leaf);
        let coeffs: Vec<Jet1> = y_leaf.iter().map(|&c| Jet1::constant(c)).collect();
        let y1 = combine(&coeffs, &self.local.frame1.leaf);
        let w = self.local.base.nabla::<Jet1>(&x, &y1);
        let t = self.local.leaf_projection(&w);
        w.iter().zip(&t).map(|(a, b)| a - b).collect()
    }

    /// Largest `|⟨R^P(X,Y)V, N⟩|` over leaf frame vectors.
    pub fn p_curvature_invariance_residual(&self) -> f64 {
        self.rp.leaf_invariance_residual()
    }

    /// How far the frame is from the one assumed by the adapted-frame lemma:
    /// `(max ‖ω(X)‖ over the ambient frame, max ‖P∇_ξ e_i‖)`.
    pub fn lemma_frame_residual(&self) -> (f64, f64) {
        let amb = self.frame0().ambient();
        let b1 = amb
            .iter()
            .map(|x| self.connection_forms(x).max_abs())
            .fold(0.0, f64::max);
        let mut b2: f64 = 0.0;
        for xi in &self.frame0().perp {
            for e in &self.local.frame1.leaf {
                let w = self.local.nabla_p::<Jet1>(xi, e);
                b2 = b2.max(self.local.norm(&w));
            }
        }
        (b1, b2)
    }

    pub fn mean_curvature_perp(&self) -> TangentVector {
        TangentVector {
            components: self.local.mean_curvature_perp(),
            base: self.local.point().clone(),
        }
    }
}

/// `Div X` against the pieces of its leafwise decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DivergenceSplit {
    pub div: f64,
    pub div_f: f64,
    pub x_z: f64,
    pub x_h: f64,
    /// `N⟨X, N⟩`, which vanishes for leaf fields.
    pub n_x_n: f64,
}

impl DivergenceSplit {
    /// `Div X − (Div_F X − ⟨X,Z⟩ − ⟨X,H^⊥⟩)`.
    pub fn leafwise_residual(&self) -> f64 {
        self.div - (self.div_f - self.x_z - self.x_h)
    }

    /// Same with the `N⟨X,N⟩` term restored; zero for every field of `D`.
    pub fn full_residual(&self) -> f64 {
        self.leafwise_residual() - self.n_x_n
    }
}

/// `Σ_i ⟨∇_{e_i} X, e_i⟩` at a point.
pub fn leafwise_divergence(fol: &FoliatedManifold, x: &VectorField, p: &Point) -> Result<f64> {
    let loc = fol.local(p)?;
    let x2 = x(&loc.base.seeds);
    let f = FoliationPoint::from_local(loc)?;
    Ok(f.leafwise_divergence1(&truncate_vec(&x2)))
}

pub fn shape_operator(fol: &FoliatedManifold, p: &Point) -> Result<Mat<f64>> {
    Ok(FoliationPoint::new(fol, p)?.a)
}

pub fn curvature_vector_z(fol: &FoliatedManifold, p: &Point) -> Result<TangentVector> {
    let f = FoliationPoint::new(fol, p)?;
    Ok(TangentVector {
        components: f.z,
        base: p.clone(),
    })
}

/// The same structure with the leaf frame rotated by a point-dependent
/// angle in the `(e_1, e_2)` plane (a sign flip when `n = 1`).
pub fn rotate_leaf_frame(fol: &FoliatedManifold, phase: f64) -> Result<FoliatedManifold> {
    let inner = fol.frame_field().clone();
    let frame: FrameField = Arc::new(move |q: &[Jet2]| {
        let mut f = inner(q);
        if f.leaf.len() < 2 {
            for e in f.leaf.iter_mut() {
                for c in e.iter_mut() {
                    *c = -*c;
                }
            }
            return f;
        }
        let mut s = Jet2::constant(phase);
        for (k, x) in q.iter().enumerate() {
            s += *x * (k as f64 + 1.0);
        }
        let angle = s.sin() * 0.3 + 0.4;
        let (c, sn) = (angle.cos(), angle.sin());
        let e0 = f.leaf[0].clone();
        let e1 = f.leaf[1].clone();
        f.leaf[0] = e0.iter().zip(&e1).map(|(a, b)| c * *a + sn * *b).collect();
        f.leaf[1] = e0.iter().zip(&e1).map(|(a, b)| c * *b - sn * *a).collect();
        f
    });
    fol.with_frame(frame)
}

/// Leaf-frame rotation `Q` with `e'_k = Σ_l Q_{lk} e_l` relating two frames at a point.
pub fn frame_change(from: &FoliationPoint, to: &FoliationPoint) -> Mat<f64> {
    let n = from.n();
    let base = &from.local.base;
    Mat::from_fn(n, n, |l, k| {
        base.inner(&to.local.frame0.leaf[k], &from.local.frame0.leaf[l])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::manifold::{ChartManifold, Manifold};
    use crate::subriemannian::IntegrabilityWitness;

    /// Flat 3-torus, leaves span(∂0), N = ∂1, D^⊥ = span(∂2).
    fn flat() -> FoliatedManifold {
        let m = Manifold::Chart(ChartManifold::flat(vec![1.0; 3]).unwrap());
        let unit = |i: usize| {
            let mut v = vec![Jet2::constant(0.0); 3];
            v[i] = Jet2::constant(1.0);
            v
        };
        let frame: FrameField = Arc::new(move |_| AdaptedFrame {
            leaf: vec![unit(0)],
            normal: unit(1),
            perp: vec![unit(2)],
        });
        FoliatedManifold::new(m, frame, 1, IntegrabilityWitness::CoordinateSubtori).unwrap()
    }

    #[test]
    fn flat_torus_quantities_vanish() {
        let f = FoliationPoint::new(&flat(), &Point::new(vec![0.2, 0.5, 0.1])).unwrap();
        assert_eq!(f.a.max_abs(), 0.0);
        assert!(f.z.iter().all(|x| *x == 0.0));
        assert_eq!(f.main_terms(0, true).integrand(), 0.0);
        assert_eq!(f.div_f_newton_direct(0), vec![0.0]);
        assert_eq!(f.einnc_residual(), 0.0);
    }

    #[test]
    fn projector_of_coordinate_distribution() {
        let p = flat().orthoprojector(&Point::new(vec![0.3, 0.1, 0.9])).unwrap();
        assert_eq!(p.matrix, Mat::diagonal(&[1.0, 1.0, 0.0]));
        assert_eq!(p.complement(), Mat::diagonal(&[0.0, 0.0, 1.0]));
    }

    #[test]
    fn rotation_flips_single_leaf_vector() {
        let fol = flat();
        let rot = rotate_leaf_frame(&fol, 0.0).unwrap();
        let p = Point::new(vec![0.1, 0.2, 0.3]);
        let a = FoliationPoint::new(&fol, &p).unwrap();
        let b = FoliationPoint::new(&rot, &p).unwrap();
        assert_eq!(frame_change(&a, &b), Mat::diagonal(&[-1.0]));
    }
}
