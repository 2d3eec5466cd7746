//! Elementary symmetric functions, power sums and Newton transformations
//! of a leafwise operator.
//!
//! `σ_r` are the coefficients of `det(Id + tA)`, computed from the power sums
//! `τ_j = tr A^j` by Newton's identities
//! `r σ_r = Σ_{i=1}^r (−1)^{i−1} σ_{r−i} τ_i`. Everything is generic over
//! [`Scalar`] so the same code yields σ_r as a jet along the leaves.

use crate::error::{GeometryError, Result};
use crate::jet::Scalar;
use crate::linalg::Mat;

fn check(r: usize, n: usize) -> Result<()> {
    if r > n {
        Err(GeometryError::OutOfRange { index: r, max: n })
    } else {
        Ok(())
    }
}

/// `τ_1..τ_n` (index 0 holds `τ_0 = n`).
pub fn power_sums<S: Scalar>(a: &Mat<S>) -> Vec<S> {
    let n = a.rows();
    let mut out = Vec::with_capacity(n + 1);
    out.push(S::from(n as f64));
    let mut pow = Mat::identity(n);
    for _ in 0..n {
        pow = pow.matmul(a);
        out.push(pow.trace());
    }
    out
}

/// `σ_0..σ_n`.
pub fn sigmas<S: Scalar>(a: &Mat<S>) -> Vec<S> {
    let n = a.rows();
    let tau = power_sums(a);
    let mut s = vec![S::one()];
    for r in 1..=n {
        let mut acc = S::zero();
        for i in 1..=r {
            let term = s[r - i] * tau[i];
            if i % 2 == 1 {
                acc += term;
            } else {
                acc -= term;
            }
        }
        s.push(acc / r as f64);
    }
    s
}

pub fn sigma<S: Scalar>(r: usize, a: &Mat<S>) -> Result<S> {
    check(r, a.rows())?;
    Ok(sigmas(a)[r])
}

/// `τ_j = tr A^j` for `1 ≤ j ≤ n`.
pub fn tau<S: Scalar>(j: usize, a: &Mat<S>) -> Result<S> {
    let n = a.rows();
    if j == 0 || j > n {
        return Err(GeometryError::OutOfRange { index: j, max: n });
    }
    Ok(power_sums(a)[j])
}

/// σ_r, τ_j and the mean curvature `H = σ_1/n` of an operator.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SymmetricFunctions {
    pub sigma: Vec<f64>,
    pub tau: Vec<f64>,
    pub mean_curvature: f64,
}

impl SymmetricFunctions {
    pub fn of(a: &Mat<f64>) -> Self {
        let n = a.rows();
        let sigma = sigmas(a);
        let tau = power_sums(a)[1..].to_vec();
        let mean_curvature = if n == 0 { 0.0 } else { sigma[1] / n as f64 };
        SymmetricFunctions {
            sigma,
            tau,
            mean_curvature,
        }
    }
}

/// All of `T_0(A)..T_n(A)` by the recursion `T_r = σ_r Id − A T_{r−1}`.
pub fn newton_transforms<S: Scalar>(a: &Mat<S>) -> Vec<Mat<S>> {
    let n = a.rows();
    let s = sigmas(a);
    let id = Mat::identity(n);
    let mut out = vec![id.clone()];
    for r in 1..=n {
        let next = id.scale(s[r]).sub(&a.matmul(&out[r - 1]));
        out.push(next);
    }
    out
}

pub fn newton_transform<S: Scalar>(r: usize, a: &Mat<S>) -> Result<Mat<S>> {
    check(r, a.rows())?;
    let mut all = newton_transforms(a);
    Ok(all.swap_remove(r))
}

/// `T_r(A) = Σ_{j=0}^r (−1)^j σ_{r−j} A^j`.
pub fn newton_transform_explicit<S: Scalar>(r: usize, a: &Mat<S>) -> Result<Mat<S>> {
    let n = a.rows();
    check(r, n)?;
    let s = sigmas(a);
    let mut out = Mat::zeros(n, n);
    let mut pow = Mat::identity(n);
    for j in 0..=r {
        let term = pow.scale(s[r - j]);
        out = if j % 2 == 0 { out.add(&term) } else { out.sub(&term) };
        pow = pow.matmul(a);
    }
    Ok(out)
}

/// Residuals of the algebraic trace identities at order `r`.
#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct TraceResiduals {
    /// `tr T_r − (n−r)σ_r`
    pub trace: f64,
    /// `tr(A T_r) − (r+1)σ_{r+1}`
    pub trace_a: f64,
    /// `tr(A² T_r) − σ_1σ_{r+1} + (r+2)σ_{r+2}`
    pub trace_a2: f64,
}

impl TraceResiduals {
    pub fn max(&self) -> f64 {
        self.trace.abs().max(self.trace_a.abs()).max(self.trace_a2.abs())
    }
}

/// Algebraic trace identities for `0 ≤ r ≤ n−1`, with `σ_k = 0` for `k > n`.
pub fn trace_identities(r: usize, a: &Mat<f64>) -> Result<TraceResiduals> {
    let n = a.rows();
    if n == 0 || r + 1 > n {
        return Err(GeometryError::OutOfRange {
            index: r,
            max: n.saturating_sub(1),
        });
    }
    let s = sigmas(a);
    let sg = |k: usize| if k <= n { s[k] } else { 0.0 };
    let t = newton_transform(r, a)?;
    let at = a.matmul(&t);
    let aat = a.matmul(&at);
    Ok(TraceResiduals {
        trace: t.trace() - (n - r) as f64 * sg(r),
        trace_a: at.trace() - (r + 1) as f64 * sg(r + 1),
        trace_a2: aat.trace() - sg(1) * sg(r + 1) + (r + 2) as f64 * sg(r + 2),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_matrix() {
        let s = sigmas(&Mat::<f64>::identity(3));
        assert_eq!(s, vec![1.0, 3.0, 3.0, 1.0]);
    }

    #[test]
    fn diagonal_one_two() {
        let a = Mat::diagonal(&[1.0, 2.0]);
        assert_eq!(sigma(1, &a).unwrap(), 3.0);
        assert_eq!(sigma(2, &a).unwrap(), 2.0);
        assert_eq!(tau(2, &a).unwrap(), 5.0);
    }

    #[test]
    fn out_of_range() {
        let a = Mat::diagonal(&[1.0, 2.0]);
        assert_eq!(
            sigma(3, &a),
            Err(GeometryError::OutOfRange { index: 3, max: 2 })
        );
        assert!(newton_transform(3, &a).is_err());
        assert!(trace_identities(2, &a).is_err());
        assert!(tau(0, &a).is_err());
    }

    #[test]
    fn first_newton_transform() {
        let a = Mat::from_rows(&[vec![1.0, 0.5], vec![0.5, -2.0]]);
        let t1 = newton_transform(1, &a).unwrap();
        let expect = Mat::identity(2).scale(-1.0).sub(&a);
        assert!(t1.sub(&expect).max_abs() < 1e-15);
        assert!(newton_transform(2, &a).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn umbilical_newton_transform() {
        let n = 4;
        let h = 0.7;
        let a = Mat::identity(n).scale(h);
        let s = sigmas(&a);
        for r in 0..=n {
            let t = newton_transform(r, &a).unwrap();
            let expect = Mat::identity(n).scale((n - r) as f64 / n as f64 * s[r]);
            assert!(t.sub(&expect).max_abs() < 1e-12);
        }
    }

    #[test]
    fn zero_matrix_identities() {
        let a = Mat::<f64>::zeros(3, 3);
        for r in 0..3 {
            assert_eq!(trace_identities(r, &a).unwrap().max(), 0.0);
        }
    }
}
