//! Catalog of closed foliated sub-Riemannian manifolds with known invariants.
//!
//! Every scenario carries claimed flags that are re-measured when it is
//! built, and a list of expected quantities: a closed-form oracle paired with
//! the probe that measures the same quantity through the generic stack.

use std::f64::consts::{FRAC_PI_2, PI, TAU};
use std::fmt;
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;

use crate::error::{GeometryError, Result};
use crate::foliation::FoliationPoint;
use crate::jet::{Jet2, Scalar};
use crate::linalg::Mat;
use crate::manifold::{ChartManifold, InvariantFrameManifold, Manifold, MetricFn, Point};
use crate::quadrature::{LeafSpec, QuadratureGrid};
use crate::subriemannian::{AdaptedFrame, FoliatedManifold, FrameField, IntegrabilityWitness};
use crate::tolerances;

/// `mean + amp · cos(freq · z + phase)` with integer `freq`.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Trig {
    pub mean: f64,
    pub amp: f64,
    pub freq: f64,
    pub phase: f64,
}

impl Trig {
    pub const fn new(mean: f64, amp: f64, freq: f64, phase: f64) -> Self {
        Trig {
            mean,
            amp,
            freq,
            phase,
        }
    }

    /// `2 + cos z`
    pub const fn default_a() -> Self {
        Trig::new(2.0, 1.0, 1.0, 0.0)
    }

    /// `2 + sin z`
    pub const fn default_b() -> Self {
        Trig::new(2.0, 1.0, 1.0, -FRAC_PI_2)
    }

    /// `0.3 sin z`
    pub const fn default_tilt() -> Self {
        Trig::new(0.0, 0.3, 1.0, -FRAC_PI_2)
    }

    pub fn eval<S: Scalar>(&self, z: S) -> S {
        (z * self.freq + self.phase).cos() * self.amp + self.mean
    }

    pub fn value(&self, z: f64) -> f64 {
        self.eval(z)
    }

    pub fn d1(&self, z: f64) -> f64 {
        -self.amp * self.freq * (self.freq * z + self.phase).sin()
    }

    pub fn d2(&self, z: f64) -> f64 {
        -self.amp * self.freq * self.freq * (self.freq * z + self.phase).cos()
    }

    pub fn min(&self) -> f64 {
        self.mean - self.amp.abs()
    }

    fn validate(&self, what: &str) -> Result<()> {
        let finite = [self.mean, self.amp, self.freq, self.phase]
            .iter()
            .all(|x| x.is_finite());
        if !finite || self.freq.fract() != 0.0 {
            return Err(GeometryError::Construction(format!(
                "{what}: parameters must be finite with integer frequency"
            )));
        }
        Ok(())
    }

    /// Zeros in `[0, 2π)`.
    pub fn zeros(&self) -> Vec<f64> {
        if self.amp == 0.0 || self.freq == 0.0 {
            return Vec::new();
        }
        let c = -self.mean / self.amp;
        if c.abs() > 1.0 {
            return Vec::new();
        }
        let u0 = c.acos();
        let f = self.freq.abs();
        let mut out = Vec::new();
        for base in [u0, -u0] {
            for k in 0..(2 * f as usize + 2) {
                let u = base + TAU * k as f64 - TAU * f;
                let z = ((u - self.phase) / self.freq).rem_euclid(TAU);
                if !out.iter().any(|w: &f64| (w - z).abs() < 1e-12 || (TAU - (w - z).abs()) < 1e-12) {
                    out.push(z);
                }
            }
        }
        out.sort_by(f64::total_cmp);
        out
    }
}

/// Structural properties of a scenario.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Flags {
    pub harmonic_perp: bool,
    pub admissible: bool,
    pub p_curvature_invariant: bool,
    /// `Some(c)` when `R^P(X,Y)V = c(⟨Y,V⟩X − ⟨X,V⟩Y)` on `D`.
    pub pcurv_c: Option<f64>,
    pub umbilical: bool,
}

/// Maxima over the construction grid backing the flags.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FlagResiduals {
    pub h_perp: f64,
    pub admissibility: f64,
    pub integrability: f64,
    pub p_curvature_invariance: f64,
    pub pcurv_c: Option<f64>,
    pub umbilical: f64,
    pub shape_asymmetry: f64,
}

pub type Oracle = Arc<dyn Fn(&Point) -> f64 + Send + Sync>;
pub type Probe = Arc<dyn Fn(&FoliationPoint) -> f64 + Send + Sync>;

/// An expected quantity: closed-form value and its measurement.
#[derive(Clone)]
pub struct Expected {
    pub name: String,
    pub note: String,
    pub oracle: Oracle,
    pub probe: Probe,
}

impl fmt::Debug for Expected {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Expected")
            .field("name", &self.name)
            .field("note", &self.note)
            .finish_non_exhaustive()
    }
}

fn expected(
    name: &str,
    note: &str,
    oracle: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    probe: impl Fn(&FoliationPoint) -> f64 + Send + Sync + 'static,
) -> Expected {
    Expected {
        name: name.into(),
        note: note.into(),
        oracle: Arc::new(oracle),
        probe: Arc::new(probe),
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub description: String,
    pub structure: FoliatedManifold,
    pub flags: Flags,
    pub residuals: FlagResiduals,
    pub expected: Vec<Expected>,
    pub leaves: Vec<LeafSpec>,
    pub default_grid: Vec<usize>,
    pub notes: Vec<String>,
}

impl Scenario {
    pub fn manifold(&self) -> &Manifold {
        &self.structure.manifold
    }

    pub fn dim(&self) -> usize {
        self.structure.dim()
    }

    /// Leaf dimension `n`.
    pub fn leaf_dim(&self) -> usize {
        self.structure.leaf_dim()
    }

    pub fn backend(&self) -> &'static str {
        if self.manifold().is_homogeneous() {
            "invariant_frame"
        } else {
            "chart"
        }
    }

    pub fn grid(&self, counts: Option<&[usize]>) -> Result<QuadratureGrid> {
        QuadratureGrid::new(self.manifold(), counts.unwrap_or(&self.default_grid))
    }

    pub fn leaf(&self, name: &str) -> Result<&LeafSpec> {
        self.leaves.iter().find(|l| l.name == name).ok_or_else(|| {
            GeometryError::UnsupportedLeaf(format!(
                "scenario {} declares no closed leaf named {name:?}",
                self.name
            ))
        })
    }

    /// Uniform random point (any point on homogeneous backends).
    pub fn random_point<R: Rng>(&self, rng: &mut R) -> Point {
        match self.manifold().periods() {
            Some(per) => Point(per.iter().map(|p| rng.gen_range(0.0..*p)).collect()),
            None => Point((0..self.dim()).map(|_| rng.gen_range(-1.0..1.0)).collect()),
        }
    }

    pub fn point(&self, p: &Point) -> Result<FoliationPoint> {
        FoliationPoint::new(&self.structure, p)
    }

    pub fn expected(&self, name: &str) -> Option<&Expected> {
        self.expected.iter().find(|e| e.name == name)
    }
}

/// Measures the flags on the default grid (cheap quantities) and on a
/// coarser grid (curvature quantities).
fn measure(
    structure: &FoliatedManifold,
    default_grid: &[usize],
    pcurv_c: Option<f64>,
) -> Result<FlagResiduals> {
    let grid = QuadratureGrid::new(&structure.manifold, default_grid)?;
    let nodes: Vec<Point> = grid.nodes().into_iter().map(|(p, _)| p).collect();
    let cheap: Vec<(f64, f64, f64)> = nodes
        .par_iter()
        .map(|p| {
            let loc = structure.local(p)?;
            Ok((
                loc.norm(&loc.mean_curvature_perp()),
                loc.admissibility_residual(),
                loc.integrability_residual(),
            ))
        })
        .collect::<Result<_>>()?;
    let coarse_counts: Vec<usize> = default_grid.iter().map(|&c| c.min(8)).collect();
    let coarse = QuadratureGrid::new(&structure.manifold, &coarse_counts)?;
    let coarse_nodes: Vec<Point> = coarse.nodes().into_iter().map(|(p, _)| p).collect();
    let heavy: Vec<(f64, f64, f64, f64)> = coarse_nodes
        .par_iter()
        .map(|p| {
            let f = FoliationPoint::new(structure, p)?;
            let n = f.n();
            let h = f.sigma(1) / n as f64;
            let umb = f.a.sub(&Mat::identity(n).scale(h)).max_abs();
            let c_res = pcurv_c.map_or(0.0, |c| f.rp.constant_curvature_residual(c));
            Ok((f.p_curvature_invariance_residual(), c_res, umb, f.shape_asymmetry))
        })
        .collect::<Result<_>>()?;
    let mx = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, f64::max);
    Ok(FlagResiduals {
        h_perp: mx(&mut cheap.iter().map(|t| t.0)),
        admissibility: mx(&mut cheap.iter().map(|t| t.1)),
        integrability: mx(&mut cheap.iter().map(|t| t.2)),
        p_curvature_invariance: mx(&mut heavy.iter().map(|t| t.0)),
        pcurv_c: pcurv_c.map(|_| mx(&mut heavy.iter().map(|t| t.1))),
        umbilical: mx(&mut heavy.iter().map(|t| t.2)),
        shape_asymmetry: mx(&mut heavy.iter().map(|t| t.3)),
    })
}

struct Draft {
    name: &'static str,
    description: String,
    structure: FoliatedManifold,
    /// `None` when the flags are to be computed rather than checked.
    claims: Option<Flags>,
    expected: Vec<Expected>,
    leaves: Vec<LeafSpec>,
    default_grid: Vec<usize>,
    notes: Vec<String>,
}

impl Draft {
    fn finish(self) -> Result<Scenario> {
        let pc = self.claims.and_then(|c| c.pcurv_c);
        let res = measure(&self.structure, &self.default_grid, pc)?;
        if res.integrability > tolerances::INTEGRABILITY {
            return Err(GeometryError::Construction(format!(
                "{}: leaf distribution is not integrable (residual {:e})",
                self.name, res.integrability
            )));
        }
        if res.shape_asymmetry > tolerances::OPERATOR_SYMMETRY {
            return Err(GeometryError::Construction(format!(
                "{}: shape operator asymmetric (residual {:e})",
                self.name, res.shape_asymmetry
            )));
        }
        let measured = Flags {
            harmonic_perp: res.h_perp <= tolerances::HARMONIC,
            admissible: res.admissibility <= tolerances::ADMISSIBILITY,
            p_curvature_invariant: res.p_curvature_invariance <= tolerances::DIFFERENTIAL,
            pcurv_c: match (pc, res.pcurv_c) {
                (Some(c), Some(r)) if r <= tolerances::DIFFERENTIAL => Some(c),
                _ => None,
            },
            umbilical: res.umbilical <= tolerances::DIFFERENTIAL,
        };
        if let Some(claims) = self.claims {
            if claims != measured {
                return Err(GeometryError::Construction(format!(
                    "{}: claimed flags {claims:?} do not match measured {measured:?} ({res:?})",
                    self.name
                )));
            }
        }
        Ok(Scenario {
            name: self.name.into(),
            description: self.description,
            structure: self.structure,
            flags: measured,
            residuals: res,
            expected: self.expected,
            leaves: self.leaves,
            default_grid: self.default_grid,
            notes: self.notes,
        })
    }
}

fn unit(m: usize, i: usize) -> Vec<Jet2> {
    let mut v = vec![Jet2::constant(0.0); m];
    v[i] = Jet2::constant(1.0);
    v
}

fn coordinate_frame(m: usize, n: usize) -> FrameField {
    Arc::new(move |_| AdaptedFrame {
        leaf: (0..n).map(|i| unit(m, i)).collect(),
        normal: unit(m, n),
        perp: ((n + 1)..m).map(|i| unit(m, i)).collect(),
    })
}

fn zero_expectations() -> Vec<Expected> {
    vec![
        expected("shape_max", "A vanishes", |_| 0.0, |f| f.a.max_abs()),
        expected("ric_p_nn", "flat metric", |_| 0.0, |f| f.rp.ricci(&f.rp.normal_coeffs())),
        expected("z_norm", "constant N", |_| 0.0, |f| f.local.norm(&f.z)),
        expected("h_perp_norm", "constant frame", |_| 0.0, |f| {
            f.local.norm(&f.local.mean_curvature_perp())
        }),
    ]
}

/// Flat `m`-torus with unit periods, leaves tangent to the first `n` axes,
/// `N = ∂_n` and `D^⊥` spanned by the remaining axes.
pub fn build_flat_torus(m: usize, n: usize) -> Result<Scenario> {
    if n < 1 || n + 1 >= m || m > crate::MAX_DIM {
        return Err(GeometryError::Dimension(format!(
            "flat torus needs 1 <= n < m-1 <= {}, got m = {m}, n = {n}",
            crate::MAX_DIM - 1
        )));
    }
    let manifold = Manifold::Chart(ChartManifold::flat(vec![1.0; m])?);
    let structure = FoliatedManifold::new(
        manifold,
        coordinate_frame(m, n),
        n,
        IntegrabilityWitness::CoordinateSubtori,
    )?;
    Draft {
        name: "flat_torus",
        description: format!("flat {m}-torus, unit periods, {n}-dimensional coordinate leaves"),
        structure,
        claims: Some(Flags {
            harmonic_perp: true,
            admissible: true,
            p_curvature_invariant: true,
            pcurv_c: Some(0.0),
            umbilical: true,
        }),
        expected: zero_expectations(),
        leaves: vec![LeafSpec {
            name: "origin".into(),
            free_axes: (0..n).collect(),
            fixed: (n..m).map(|a| (a, 0.0)).collect(),
        }],
        default_grid: vec![4; m],
        notes: vec!["every curvature and shape quantity vanishes".into()],
    }
    .finish()
}

fn warped_metric4(a: Trig, b: Trig) -> MetricFn {
    Arc::new(move |x: &[Jet2]| {
        let (wa, wb) = (a.eval(x[3]), b.eval(x[3]));
        Mat::diagonal(&[Jet2::constant(1.0), wa * wa, wb * wb, Jet2::constant(1.0)])
    })
}

fn check_warp(w: &Trig, what: &str) -> Result<()> {
    w.validate(what)?;
    if w.min() <= 0.0 {
        return Err(GeometryError::Construction(format!(
            "{what}: warp must be strictly positive (minimum {})",
            w.min()
        )));
    }
    Ok(())
}

fn z_leaves(free: Vec<usize>, fixed_x: bool, z_axis: usize, zs: &[f64]) -> Vec<LeafSpec> {
    zs.iter()
        .map(|&z| {
            let mut fixed = Vec::new();
            if fixed_x {
                fixed.push((0, 0.0));
            }
            fixed.push((z_axis, z));
            LeafSpec {
                name: format!("z={z:.4}"),
                free_axes: free.clone(),
                fixed,
            }
        })
        .collect()
}

/// Warped torus with metric `dx² + a(z)²dy1² + b(z)²dy2² + dz²` (`m = 4`) or
/// `dx² + a(z)²dy² + dz²` (`m = 3`, `b` unused). `D` is spanned by all axes
/// but `x`, `N = ∂z`, `D^⊥ = span(∂x)`.
pub fn build_warped_torus(m: usize, a: Trig, b: Trig) -> Result<Scenario> {
    check_warp(&a, "a")?;
    match m {
        3 => build_warped3(a),
        4 => {
            check_warp(&b, "b")?;
            build_warped4(a, b, "warped_torus_4")
        }
        _ => Err(GeometryError::Dimension(format!(
            "warped torus is defined for m = 3 or 4, got {m}"
        ))),
    }
}

fn build_warped4(a: Trig, b: Trig, name: &'static str) -> Result<Scenario> {
    let manifold = Manifold::Chart(ChartManifold::new(vec![TAU; 4], warped_metric4(a, b))?);
    let frame: FrameField = Arc::new(move |x: &[Jet2]| {
        let mut e1 = unit(4, 1);
        e1[1] = a.eval(x[3]).recip();
        let mut e2 = unit(4, 2);
        e2[2] = b.eval(x[3]).recip();
        AdaptedFrame {
            leaf: vec![e1, e2],
            normal: unit(4, 3),
            perp: vec![unit(4, 0)],
        }
    });
    let structure =
        FoliatedManifold::new(manifold, frame, 2, IntegrabilityWitness::CoordinateSubtori)?;
    let umbilical = a == b;
    let z = |p: &Point| p[3];
    let la = move |p: &Point| a.d1(z(p)) / a.value(z(p));
    let lb = move |p: &Point| b.d1(z(p)) / b.value(z(p));
    let expected = vec![
        expected(
            "metric_y1y1",
            "a(z)^2 by definition",
            move |p| a.value(z(p)).powi(2),
            |f| f.local.base.g0[(1, 1)],
        ),
        expected(
            "christoffel_y1_y1z",
            "hand-differentiated diagonal metric: a'/a",
            la,
            |f| f.local.base.gamma0.get(1, 1, 3),
        ),
        expected(
            "christoffel_z_y1y1",
            "hand-differentiated diagonal metric: -a a'",
            move |p| -a.value(z(p)) * a.d1(z(p)),
            |f| f.local.base.gamma0.get(3, 1, 1),
        ),
        expected("shape_11", "warped product: -a'/a", move |p| -la(p), |f| f.a[(0, 0)]),
        expected("shape_22", "warped product: -b'/b", move |p| -lb(p), |f| f.a[(1, 1)]),
        expected("shape_12", "warped product: diagonal", |_| 0.0, |f| f.a[(0, 1)]),
        expected(
            "sigma_2",
            "a'b'/(ab)",
            move |p| la(p) * lb(p),
            |f| f.sigma(2),
        ),
        expected(
            "ric_p_nn",
            "warped product: -a''/a - b''/b",
            move |p| -a.d2(z(p)) / a.value(z(p)) - b.d2(z(p)) / b.value(z(p)),
            |f| f.rp.ricci(&f.rp.normal_coeffs()),
        ),
        expected(
            "riemann_e1_n_n_e1",
            "warped product: <R(e1,N)N,e1> = -a''/a",
            move |p| -a.d2(z(p)) / a.value(z(p)),
            |f| {
                let nn = f.rp.normal_index();
                f.riemann().get(0, nn, nn, 0)
            },
        ),
        expected(
            "nabla_f_n_a_11",
            "-(a'/a)' = -(a''/a - (a'/a)^2)",
            move |p| -(a.d2(z(p)) / a.value(z(p)) - la(p) * la(p)),
            |f| f.nabla_f_n_a()[(0, 0)],
        ),
        expected(
            "nabla_f_n_a_22",
            "-(b'/b)'",
            move |p| -(b.d2(z(p)) / b.value(z(p)) - lb(p) * lb(p)),
            |f| f.nabla_f_n_a()[(1, 1)],
        ),
        expected(
            "main_integrand_0",
            "(ab)''/(ab): an exact derivative after multiplying by the density ab",
            move |p| {
                let (z, av, bv) = (z(p), a.value(z(p)), b.value(z(p)));
                (a.d2(z) * bv + 2.0 * a.d1(z) * b.d1(z) + av * b.d2(z)) / (av * bv)
            },
            |f| f.main_terms(0, true).integrand(),
        ),
        expected(
            "main_integrand_1",
            "-(a'b')'/(ab)",
            move |p| {
                let z = z(p);
                -(a.d2(z) * b.d1(z) + a.d1(z) * b.d2(z)) / (a.value(z) * b.value(z))
            },
            |f| f.main_terms(1, true).integrand(),
        ),
        expected("leaf_integrand_0", "cancels pointwise", |_| 0.0, |f| {
            f.leaf_terms(0).integrand()
        }),
        expected("leaf_integrand_1", "cancels pointwise", |_| 0.0, |f| {
            f.leaf_terms(1).integrand()
        }),
        expected("z_norm", "N = ∂z is geodesic", |_| 0.0, |f| f.local.norm(&f.z)),
        expected("h_perp_norm", "∇_{∂x}∂x = 0", |_| 0.0, |f| {
            f.local.norm(&f.local.mean_curvature_perp())
        }),
        expected("admissibility", "∇_{∂x}∂z = 0", |_| 0.0, |f| {
            f.local.admissibility_residual()
        }),
    ];
    Draft {
        name,
        description: format!(
            "warped 4-torus dx² + a(z)²dy1² + b(z)²dy2² + dz², a = {a:?}, b = {b:?}"
        ),
        structure,
        claims: Some(Flags {
            harmonic_perp: true,
            admissible: true,
            p_curvature_invariant: true,
            pcurv_c: None,
            umbilical,
        }),
        expected,
        leaves: z_leaves(vec![1, 2], true, 3, &[0.0, 1.0, 2.5]),
        default_grid: vec![4, 4, 4, 64],
        notes: vec!["every level set {x, z fixed} is a closed leaf".into()],
    }
    .finish()
}

/// The warped 4-torus with `a = b = 2 + cos z`.
pub fn build_warped_torus_umbilical() -> Result<Scenario> {
    build_warped4(Trig::default_a(), Trig::default_a(), "warped_torus_4_umbilical")
}

fn warped_metric3(a: Trig) -> MetricFn {
    Arc::new(move |x: &[Jet2]| {
        let wa = a.eval(x[2]);
        Mat::diagonal(&[Jet2::constant(1.0), wa * wa, Jet2::constant(1.0)])
    })
}

fn warped3_expectations(a: Trig, n_leaf: usize) -> Vec<Expected> {
    let z = |p: &Point| p[2];
    let la = move |p: &Point| a.d1(z(p)) / a.value(z(p));
    let y_slot = n_leaf - 1;
    vec![
        expected("shape_y", "-a'/a", move |p| -la(p), move |f| f.a[(y_slot, y_slot)]),
        expected(
            "ric_p_nn",
            "-a''/a",
            move |p| -a.d2(z(p)) / a.value(z(p)),
            |f| f.rp.ricci(&f.rp.normal_coeffs()),
        ),
        expected(
            "main_integrand_0",
            "a''/a: an exact derivative after multiplying by the density a",
            move |p| a.d2(z(p)) / a.value(z(p)),
            |f| f.main_terms(0, true).integrand(),
        ),
        expected("z_norm", "N = ∂z is geodesic", |_| 0.0, |f| f.local.norm(&f.z)),
    ]
}

fn build_warped3(a: Trig) -> Result<Scenario> {
    let manifold = Manifold::Chart(ChartManifold::new(vec![TAU; 3], warped_metric3(a))?);
    let frame: FrameField = Arc::new(move |x: &[Jet2]| {
        let mut e = unit(3, 1);
        e[1] = a.eval(x[2]).recip();
        AdaptedFrame {
            leaf: vec![e],
            normal: unit(3, 2),
            perp: vec![unit(3, 0)],
        }
    });
    let structure =
        FoliatedManifold::new(manifold, frame, 1, IntegrabilityWitness::CoordinateSubtori)?;
    Draft {
        name: "warped_torus_3",
        description: format!("warped 3-torus dx² + a(z)²dy² + dz², D = span(∂y, ∂z), a = {a:?}"),
        structure,
        claims: Some(Flags {
            harmonic_perp: true,
            admissible: true,
            p_curvature_invariant: true,
            pcurv_c: None,
            umbilical: true,
        }),
        expected: warped3_expectations(a, 1),
        leaves: z_leaves(vec![1], true, 2, &[0.0, 1.0]),
        default_grid: vec![4, 4, 64],
        notes: vec!["leaves are circles; only r = 0 is in range".into()],
    }
    .finish()
}

/// Warped 3-torus with `D = TM`: leaves span `(∂x, ∂y)`, `N = ∂z`.
pub fn build_warped_torus_riemannian(a: Trig) -> Result<Scenario> {
    check_warp(&a, "a")?;
    let manifold = Manifold::Chart(ChartManifold::new(vec![TAU; 3], warped_metric3(a))?);
    let frame: FrameField = Arc::new(move |x: &[Jet2]| {
        let mut e = unit(3, 1);
        e[1] = a.eval(x[2]).recip();
        AdaptedFrame {
            leaf: vec![unit(3, 0), e],
            normal: unit(3, 2),
            perp: Vec::new(),
        }
    });
    let structure =
        FoliatedManifold::new(manifold, frame, 2, IntegrabilityWitness::CoordinateSubtori)?;
    Draft {
        name: "warped_torus_3_riemannian",
        description: format!("warped 3-torus dx² + a(z)²dy² + dz² with D = TM, a = {a:?}"),
        structure,
        claims: Some(Flags {
            harmonic_perp: true,
            admissible: true,
            p_curvature_invariant: true,
            pcurv_c: None,
            umbilical: false,
        }),
        expected: warped3_expectations(a, 2),
        leaves: z_leaves(vec![0, 1], false, 2, &[0.0, 1.0]),
        default_grid: vec![4, 4, 64],
        notes: vec!["D = TM, so R^P is the Riemann tensor".into()],
    }
    .finish()
}

/// Heisenberg nilmanifold, invariant frame `X, Y, T` with `[X,Y] = T`,
/// `TF = span(X)`, `N = T`, `D^⊥ = span(Y)`, volume 1.
pub fn build_heisenberg() -> Result<Scenario> {
    let h = InvariantFrameManifold::from_brackets(3, &[(0, 1, 2, 1.0)], 1.0)?;
    let frame: FrameField = Arc::new(|_| AdaptedFrame {
        leaf: vec![unit(3, 0)],
        normal: unit(3, 2),
        perp: vec![unit(3, 1)],
    });
    let structure = FoliatedManifold::new(
        Manifold::InvariantFrame(h),
        frame,
        1,
        IntegrabilityWitness::Subalgebra,
    )?;
    Draft {
        name: "heisenberg",
        description: "Heisenberg nilmanifold, [X,Y] = T, D = span(X, T)".into(),
        structure,
        claims: Some(Flags {
            harmonic_perp: true,
            admissible: false,
            p_curvature_invariant: true,
            pcurv_c: Some(0.0),
            umbilical: true,
        }),
        expected: vec![
            expected("shape_11", "Koszul: ∇_X T = -Y/2 ⊥ D", |_| 0.0, |f| f.a[(0, 0)]),
            expected("ric_p_nn", "R^P(X,T)T = 0", |_| 0.0, |f| {
                f.rp.ricci(&f.rp.normal_coeffs())
            }),
            expected("riemann_ric_nn", "Koszul: <R(X,T)T,X> = 1/4", |_| 0.25, |f| {
                f.riemann().ricci(&f.rp.normal_coeffs())
            }),
            expected("admissibility", "∇^P_Y T = X/2", |_| 0.5, |f| {
                f.local.admissibility_residual()
            }),
            expected("h_perp_norm", "∇_Y Y = 0", |_| 0.0, |f| {
                f.local.norm(&f.local.mean_curvature_perp())
            }),
            expected("z_norm", "∇_T T = 0", |_| 0.0, |f| f.local.norm(&f.z)),
        ],
        leaves: Vec::new(),
        default_grid: Vec::new(),
        notes: vec![
            "volume normalised to 1".into(),
            "inadmissible: no frame satisfies the adapted-frame hypotheses".into(),
        ],
    }
    .finish()
}

/// Round unit 3-sphere as a group, `[e_i, e_{i+1}] = 2e_{i+2}`,
/// `TF = span(e1)`, `N = e2`, `D^⊥ = span(e3)`.
pub fn build_round_s3() -> Result<Scenario> {
    let h = InvariantFrameManifold::from_brackets(
        3,
        &[(0, 1, 2, 2.0), (1, 2, 0, 2.0), (2, 0, 1, 2.0)],
        2.0 * PI * PI,
    )?;
    let frame: FrameField = Arc::new(|_| AdaptedFrame {
        leaf: vec![unit(3, 0)],
        normal: unit(3, 1),
        perp: vec![unit(3, 2)],
    });
    let structure = FoliatedManifold::new(
        Manifold::InvariantFrame(h),
        frame,
        1,
        IntegrabilityWitness::Subalgebra,
    )?;
    Draft {
        name: "round_s3",
        description: "round S³, [e1,e2] = 2e3 cyclic, D = span(e1, e2)".into(),
        structure,
        claims: Some(Flags {
            harmonic_perp: true,
            admissible: false,
            p_curvature_invariant: true,
            pcurv_c: Some(2.0),
            umbilical: true,
        }),
        expected: vec![
            expected("shape_11", "∇_{e1} e2 = e3 ⊥ D", |_| 0.0, |f| f.a[(0, 0)]),
            expected("ric_p_nn", "<R^P(e1,e2)e2,e1> = 2", |_| 2.0, |f| {
                f.rp.ricci(&f.rp.normal_coeffs())
            }),
            expected("riemann_e1_e2_e2_e1", "bi-invariant: |[e1,e2]|²/4 = 1", |_| 1.0, |f| {
                f.riemann().get(0, 1, 1, 0)
            }),
            expected("admissibility", "P∇_{e3} e2 = -e1", |_| 1.0, |f| {
                f.local.admissibility_residual()
            }),
            expected("main_integrand_0", "2σ_2 - Ric^P = -2", |_| -2.0, |f| {
                f.main_terms(0, true).integrand()
            }),
        ],
        leaves: Vec::new(),
        default_grid: Vec::new(),
        notes: vec!["inadmissible; main formula at r = 0 integrates to -2 Vol = -4π²".into()],
    }
    .finish()
}

/// Warped 4-torus (default warps) with `N = cos θ ∂z + sin θ ∂y2/b`.
pub fn build_tilted_torus(theta: Trig) -> Result<Scenario> {
    theta.validate("theta")?;
    let (a, b) = (Trig::default_a(), Trig::default_b());
    let manifold = Manifold::Chart(ChartManifold::new(vec![TAU; 4], warped_metric4(a, b))?);
    let frame: FrameField = Arc::new(move |x: &[Jet2]| {
        let th = theta.eval(x[3]);
        let (c, s) = (th.cos(), th.sin());
        let inv_b = b.eval(x[3]).recip();
        let zero = Jet2::constant(0.0);
        let mut e1 = unit(4, 1);
        e1[1] = a.eval(x[3]).recip();
        AdaptedFrame {
            leaf: vec![e1, vec![zero, zero, c * inv_b, -s]],
            normal: vec![zero, zero, s * inv_b, c],
            perp: vec![unit(4, 0)],
        }
    });
    let structure = FoliatedManifold::new(manifold, frame, 2, IntegrabilityWitness::Numerical)?;
    let z = |p: &Point| p[3];
    let k = move |p: &Point| {
        let (t, zz) = (theta.value(z(p)), z(p));
        theta.d1(zz) * t.cos() + b.d1(zz) / b.value(zz) * t.sin()
    };
    let expected = vec![
        expected(
            "z_y2",
            "Z = k e2, k = θ' cos θ + (b'/b) sin θ",
            move |p| k(p) * theta.value(z(p)).cos() / b.value(z(p)),
            |f| f.z[2],
        ),
        expected(
            "z_z",
            "Z = k e2",
            move |p| -k(p) * theta.value(z(p)).sin(),
            |f| f.z[3],
        ),
        expected(
            "shape_11",
            "-cos θ a'/a",
            move |p| -theta.value(z(p)).cos() * a.d1(z(p)) / a.value(z(p)),
            |f| f.a[(0, 0)],
        ),
        expected(
            "shape_22",
            "-cos θ b'/b + sin θ θ'",
            move |p| {
                let t = theta.value(z(p));
                -t.cos() * b.d1(z(p)) / b.value(z(p)) + t.sin() * theta.d1(z(p))
            },
            |f| f.a[(1, 1)],
        ),
        expected("shape_12", "diagonal", |_| 0.0, |f| f.a[(0, 1)]),
        expected("h_perp_norm", "D^⊥ = span(∂x) untouched", |_| 0.0, |f| {
            f.local.norm(&f.local.mean_curvature_perp())
        }),
        expected("admissibility", "∇_{∂x} vanishes on every field", |_| 0.0, |f| {
            f.local.admissibility_residual()
        }),
    ];
    let zeros = theta.zeros();
    let mut notes = vec!["flags are measured, not claimed".into()];
    if zeros.is_empty() {
        notes.push("θ has no zeros: no closed coordinate leaves".into());
    }
    Draft {
        name: "tilted_torus",
        description: format!("warped 4-torus with N tilted by θ(z), θ = {theta:?}"),
        structure,
        claims: None,
        expected,
        leaves: z_leaves(vec![1, 2], true, 3, &zeros),
        default_grid: vec![4, 4, 4, 64],
        notes,
    }
    .finish()
}

/// A catalog row.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub backend: String,
    pub dim: usize,
    pub leaf_dim: usize,
    pub flags: Flags,
    pub expected: Vec<(String, String)>,
    pub leaves: Vec<String>,
    pub notes: Vec<String>,
}

/// Catalog names, sorted.
pub const NAMES: [&str; 8] = [
    "flat_torus",
    "heisenberg",
    "round_s3",
    "tilted_torus",
    "warped_torus_3",
    "warped_torus_3_riemannian",
    "warped_torus_4",
    "warped_torus_4_umbilical",
];

/// Builds a catalog scenario with default parameters.
pub fn build(name: &str) -> Result<Scenario> {
    match name {
        "flat_torus" => build_flat_torus(4, 2),
        "heisenberg" => build_heisenberg(),
        "round_s3" => build_round_s3(),
        "tilted_torus" => build_tilted_torus(Trig::default_tilt()),
        "warped_torus_3" => build_warped_torus(3, Trig::default_a(), Trig::default_b()),
        "warped_torus_3_riemannian" => build_warped_torus_riemannian(Trig::default_a()),
        "warped_torus_4" => build_warped_torus(4, Trig::default_a(), Trig::default_b()),
        "warped_torus_4_umbilical" => build_warped_torus_umbilical(),
        other => Err(GeometryError::Construction(format!(
            "unknown scenario {other:?}; known: {}",
            NAMES.join(", ")
        ))),
    }
}

pub fn catalog_entry(s: &Scenario) -> CatalogEntry {
    CatalogEntry {
        name: s.name.clone(),
        backend: s.backend().into(),
        dim: s.dim(),
        leaf_dim: s.leaf_dim(),
        flags: s.flags,
        expected: s
            .expected
            .iter()
            .map(|e| (e.name.clone(), e.note.clone()))
            .collect(),
        leaves: s.leaves.iter().map(|l| l.name.clone()).collect(),
        notes: s.notes.clone(),
    }
}

/// Stable sorted listing of the catalog.
pub fn catalog() -> Result<Vec<CatalogEntry>> {
    NAMES.iter().map(|n| build(n).map(|s| catalog_entry(&s))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trig_defaults() {
        let b = Trig::default_b();
        assert!((b.value(0.7) - (2.0 + 0.7_f64.sin())).abs() < 1e-15);
        assert!((b.d1(0.7) - 0.7_f64.cos()).abs() < 1e-15);
        let zs = Trig::default_tilt().zeros();
        assert_eq!(zs.len(), 2);
        assert!(zs[0].abs() < 1e-12 && (zs[1] - PI).abs() < 1e-12);
    }

    #[test]
    fn nonpositive_warp_is_rejected() {
        let bad = Trig::new(0.5, 1.0, 1.0, 0.0);
        assert!(build_warped_torus(4, bad, Trig::default_b()).is_err());
        assert!(build_warped_torus(5, Trig::default_a(), Trig::default_b()).is_err());
    }

    #[test]
    fn flat_torus_dimensions() {
        assert!(build_flat_torus(3, 2).is_err());
        let s = build_flat_torus(3, 1).unwrap();
        assert!(s.flags.admissible && s.flags.harmonic_perp);
    }

    #[test]
    fn names_are_sorted() {
        let mut sorted = NAMES;
        sorted.sort();
        assert_eq!(sorted, NAMES);
        assert!(build("nope").is_err());
    }
}
