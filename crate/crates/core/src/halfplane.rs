//! Points of the upper half-plane, reproducing kernels of H²(ℂ₊) and finite
//! kernel expansions.
//!
//! The reproducing kernel at `z` is `k_z(w) = 1 / (2πi (conj(z) - w))`, so
//! every inner product between kernels is available in closed form through
//! `⟨k_a, k_b⟩ = k_a(b)`.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// `|w|` below which `Log(1 + w) / w` switches to its Taylor series.
pub const SERIES_THRESHOLD: f64 = 1e-6;

const I: Complex64 = Complex64::new(0.0, 1.0);

/// A point `z` with `Im z > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    z: Complex64,
}

impl HalfPlanePoint {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !(re.is_finite() && im.is_finite()) || im <= 0.0 {
            return Err(Error::OutsideHalfPlane { re, im });
        }
        Ok(Self {
            z: Complex64::new(re, im),
        })
    }

    pub fn from_complex(z: Complex64) -> Result<Self> {
        Self::new(z.re, z.im)
    }

    /// The point `i·s` on the positive imaginary axis.
    pub fn on_axis(s: f64) -> Result<Self> {
        Self::new(0.0, s)
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        self.z
    }

    #[inline]
    pub fn re(&self) -> f64 {
        self.z.re
    }

    #[inline]
    pub fn im(&self) -> f64 {
        self.z.im
    }

    #[inline]
    pub fn conj(&self) -> Complex64 {
        self.z.conj()
    }

    /// `Some(s)` when the point is exactly `i·s`.
    pub fn axis_parameter(&self) -> Option<f64> {
        (self.z.re == 0.0).then_some(self.z.im)
    }
}

/// A point `i·s` with `s > 0`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ImaginaryAxisPoint(f64);

impl ImaginaryAxisPoint {
    pub fn new(s: f64) -> Result<Self> {
        if !s.is_finite() || s <= 0.0 {
            return Err(Error::invalid(
                "s",
                format!("must be finite and > 0, got {s}"),
            ));
        }
        Ok(Self(s))
    }

    #[inline]
    pub fn s(&self) -> f64 {
        self.0
    }

    pub fn to_point(self) -> HalfPlanePoint {
        HalfPlanePoint {
            z: Complex64::new(0.0, self.0),
        }
    }
}

impl From<ImaginaryAxisPoint> for HalfPlanePoint {
    fn from(p: ImaginaryAxisPoint) -> Self {
        p.to_point()
    }
}

/// The reproducing kernel `k_z` of H²(ℂ₊).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReproducingKernel {
    anchor: HalfPlanePoint,
}

impl ReproducingKernel {
    pub fn new(anchor: HalfPlanePoint) -> Self {
        Self { anchor }
    }

    pub fn anchor(&self) -> HalfPlanePoint {
        self.anchor
    }

    pub fn eval(&self, w: HalfPlanePoint) -> Complex64 {
        self.eval_raw(w.value())
    }

    /// Evaluates the kernel formula at any `w` with `Im w ≥ 0`, including the
    /// real boundary, where `conj(z) - w` never vanishes.
    #[inline]
    pub fn eval_raw(&self, w: Complex64) -> Complex64 {
        1.0 / (2.0 * PI * I * (self.anchor.conj() - w))
    }

    /// `⟨k_self, k_other⟩ = k_self(other.anchor)`.
    pub fn inner(&self, other: &ReproducingKernel) -> Complex64 {
        self.eval(other.anchor)
    }

    /// `‖k_z‖² = 1 / (4π Im z)`.
    pub fn norm_squared(&self) -> f64 {
        1.0 / (4.0 * PI * self.anchor.im())
    }
}

pub fn kernel_eval(k: &ReproducingKernel, w: HalfPlanePoint) -> Complex64 {
    k.eval(w)
}

pub fn kernel_inner(a: &ReproducingKernel, b: &ReproducingKernel) -> Complex64 {
    a.inner(b)
}

/// A finite combination `Σ a_j k_{z_j}` with pairwise distinct anchors.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KernelExpansion {
    terms: Vec<(Complex64, HalfPlanePoint)>,
}

impl KernelExpansion {
    /// Builds an expansion, merging terms whose anchors compare equal.
    /// First-occurrence order is kept.
    pub fn new<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (Complex64, HalfPlanePoint)>,
    {
        let mut merged: Vec<(Complex64, HalfPlanePoint)> = Vec::new();
        for (a, z) in terms {
            match merged.iter_mut().find(|(_, w)| *w == z) {
                Some(slot) => slot.0 += a,
                None => merged.push((a, z)),
            }
        }
        Self { terms: merged }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn kernel(anchor: HalfPlanePoint) -> Self {
        Self {
            terms: vec![(Complex64::new(1.0, 0.0), anchor)],
        }
    }

    /// `Σ a_j k_{i s_j}` from real axis parameters.
    pub fn on_axis<I>(terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Complex64, f64)>,
    {
        let terms = terms
            .into_iter()
            .map(|(a, s)| Ok((a, HalfPlanePoint::on_axis(s)?)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::new(terms))
    }

    pub fn terms(&self) -> &[(Complex64, HalfPlanePoint)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, w: HalfPlanePoint) -> Complex64 {
        self.eval_raw(w.value())
    }

    /// Evaluation for `Im w ≥ 0`; on the real line this is the boundary trace.
    pub fn eval_raw(&self, w: Complex64) -> Complex64 {
        self.terms
            .iter()
            .map(|&(a, z)| a * ReproducingKernel::new(z).eval_raw(w))
            .sum()
    }

    pub fn boundary(&self, t: f64) -> Complex64 {
        self.eval_raw(Complex64::new(t, 0.0))
    }

    /// Closed-form inner product `⟨self, other⟩`.
    pub fn inner(&self, other: &KernelExpansion) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &(a, z) in &self.terms {
            let kz = ReproducingKernel::new(z);
            for &(b, w) in &other.terms {
                acc += a * b.conj() * kz.inner(&ReproducingKernel::new(w));
            }
        }
        acc
    }

    /// Exact squared H² norm from the Gram quadratic form.
    pub fn norm_squared(&self) -> f64 {
        self.inner(self).re.max(0.0)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Self {
            terms: self.terms.iter().map(|&(a, z)| (c * a, z)).collect(),
        }
    }

    pub fn add(&self, other: &KernelExpansion) -> Self {
        Self::new(self.terms.iter().chain(other.terms.iter()).copied())
    }

    /// Axis parameters `s_j` and coefficients when every anchor is `i·s_j`.
    pub fn axis_terms(&self) -> Result<Vec<(Complex64, f64)>> {
        self.terms
            .iter()
            .map(|&(a, z)| match z.axis_parameter() {
                Some(s) => Ok((a, s)),
                None => Err(Error::OffImaginaryAxis {
                    re: z.re(),
                    im: z.im(),
                }),
            })
            .collect()
    }

    /// Index pairs of anchors closer than `rel_tol` relative to their size.
    /// Such pairs are kept but make Gram matrices badly conditioned.
    pub fn near_duplicates(&self, rel_tol: f64) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (j, (_, a)) in self.terms.iter().enumerate() {
            for (k, (_, b)) in self.terms.iter().enumerate().skip(j + 1) {
                let scale = a.value().norm().max(b.value().norm());
                if (a.value() - b.value()).norm() <= rel_tol * scale {
                    out.push((j, k));
                }
            }
        }
        out
    }

    /// Largest anchor modulus; zero for the empty expansion.
    pub fn max_anchor_modulus(&self) -> f64 {
        self.terms
            .iter()
            .map(|(_, z)| z.value().norm())
            .fold(0.0, f64::max)
    }

    /// `Σ |a_j|`.
    pub fn coefficient_l1(&self) -> f64 {
        self.terms.iter().map(|(a, _)| a.norm()).sum()
    }
}

pub fn expansion_eval(f: &KernelExpansion, w: HalfPlanePoint) -> Complex64 {
    f.eval(w)
}

/// Gram matrix `G[j][k] = ⟨k_{i s_k}, k_{i s_j}⟩ = 1 / (2π (s_j + s_k))`.
pub fn gram_matrix(points: &[ImaginaryAxisPoint]) -> Result<DMatrix<f64>> {
    reject_duplicates(points)?;
    let n = points.len();
    Ok(DMatrix::from_fn(n, n, |j, k| {
        1.0 / (2.0 * PI * (points[j].s() + points[k].s()))
    }))
}

pub(crate) fn reject_duplicates(points: &[ImaginaryAxisPoint]) -> Result<()> {
    for (j, p) in points.iter().enumerate() {
        if points[..j].iter().any(|q| q.s() == p.s()) {
            return Err(Error::DuplicatePoint(p.s()));
        }
    }
    Ok(())
}

/// True when `w` avoids the principal-log cut `(-∞, 0]`.
#[inline]
pub fn off_branch_cut(w: Complex64) -> bool {
    !(w.im == 0.0 && w.re <= 0.0)
}

/// Principal `Log(1 + w)` without cancellation for small `w`.
pub fn log1p(w: Complex64) -> Complex64 {
    let x = w.re;
    let y = w.im;
    let t = x * (2.0 + x) + y * y;
    let re = if t.abs() < 0.5 {
        0.5 * t.ln_1p()
    } else {
        (1.0 + x).hypot(y).ln()
    };
    Complex64::new(re, y.atan2(1.0 + x))
}

/// Principal `Log(1 + w)`, rejecting arguments on the cut.
pub fn checked_log1p(w: Complex64) -> Result<Complex64> {
    let arg = Complex64::new(1.0 + w.re, w.im);
    if !off_branch_cut(arg) {
        return Err(Error::BranchCut {
            re: arg.re,
            im: arg.im,
        });
    }
    Ok(log1p(w))
}

/// `Log(1 + w) / w`, continuous through `w = 0` where it equals 1.
pub fn log1p_over(w: Complex64) -> Result<Complex64> {
    if w.norm() < SERIES_THRESHOLD {
        return Ok(1.0 - w / 2.0 + w * w / 3.0);
    }
    Ok(checked_log1p(w)? / w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn rejects_points_off_the_half_plane() {
        assert!(HalfPlanePoint::new(1.0, 0.0).is_err());
        assert!(HalfPlanePoint::new(0.0, -1.0).is_err());
        assert!(HalfPlanePoint::new(f64::NAN, 1.0).is_err());
        assert!(ImaginaryAxisPoint::new(0.0).is_err());
        assert!(ImaginaryAxisPoint::new(-2.0).is_err());
    }

    #[test]
    fn kernel_values() {
        let i1 = HalfPlanePoint::on_axis(1.0).unwrap();
        let i2 = HalfPlanePoint::on_axis(2.0).unwrap();
        let k1 = ReproducingKernel::new(i1);
        let v = kernel_eval(&k1, i1);
        assert_relative_eq!(v.re, 1.0 / (4.0 * PI), max_relative = 1e-15);
        assert!(v.im.abs() < 1e-18);
        assert!((v.re - 0.0795775).abs() < 1e-7);

        let v = kernel_eval(&ReproducingKernel::new(i2), i1);
        assert_relative_eq!(v.re, 1.0 / (6.0 * PI), max_relative = 1e-15);

        let w = HalfPlanePoint::new(1.0, 1.0).unwrap();
        let expected = 1.0 / (2.0 * PI * I * c(-1.0, -2.0));
        let v = kernel_eval(&k1, w);
        assert_relative_eq!(v.re, expected.re, max_relative = 1e-14);
        assert_relative_eq!(v.im, expected.im, max_relative = 1e-14);
        // Hermitian partner.
        let back = kernel_inner(&ReproducingKernel::new(w), &k1);
        assert_relative_eq!(back.re, v.re, max_relative = 1e-14);
        assert_relative_eq!(back.im, -v.im, max_relative = 1e-14);
    }

    #[test]
    fn kernel_inner_on_axis() {
        let k = |s: f64| ReproducingKernel::new(HalfPlanePoint::on_axis(s).unwrap());
        assert_relative_eq!(
            kernel_inner(&k(1.0), &k(1.0)).re,
            1.0 / (4.0 * PI),
            max_relative = 1e-15
        );
        assert_relative_eq!(
            kernel_inner(&k(1.0), &k(3.0)).re,
            1.0 / (8.0 * PI),
            max_relative = 1e-15
        );
        for x in [-3.0, 0.0, 0.5, 10.0] {
            let kz = ReproducingKernel::new(HalfPlanePoint::new(x, 0.7).unwrap());
            let v = kz.inner(&kz);
            assert_relative_eq!(v.re, 1.0 / (4.0 * PI * 0.7), max_relative = 1e-14);
            assert!(v.im.abs() < 1e-15);
            assert_relative_eq!(kz.norm_squared(), v.re, max_relative = 1e-14);
        }
    }

    #[test]
    fn expansion_merge_and_eval() {
        let i1 = HalfPlanePoint::on_axis(1.0).unwrap();
        assert_eq!(KernelExpansion::zero().eval(i1), c(0.0, 0.0));
        let single = KernelExpansion::kernel(i1);
        assert_relative_eq!(
            expansion_eval(&single, i1).re,
            1.0 / (4.0 * PI),
            max_relative = 1e-15
        );

        let cancel = KernelExpansion::new([(c(1.0, 0.0), i1), (c(-1.0, 0.0), i1)]);
        assert_eq!(cancel.len(), 1);
        for w in [i1, HalfPlanePoint::new(3.0, 0.2).unwrap()] {
            assert_eq!(cancel.eval(w), c(0.0, 0.0));
        }
    }

    #[test]
    fn near_duplicates_are_flagged_not_merged() {
        let a = HalfPlanePoint::on_axis(1.0).unwrap();
        let b = HalfPlanePoint::on_axis(1.0 + 1e-12).unwrap();
        let f = KernelExpansion::new([(c(1.0, 0.0), a), (c(1.0, 0.0), b)]);
        assert_eq!(f.len(), 2);
        assert_eq!(f.near_duplicates(1e-8), vec![(0, 1)]);
    }

    #[test]
    fn gram_examples() {
        let p = |s| ImaginaryAxisPoint::new(s).unwrap();
        let g = gram_matrix(&[p(1.0)]).unwrap();
        assert_relative_eq!(g[(0, 0)], 1.0 / (4.0 * PI), max_relative = 1e-15);
        let g = gram_matrix(&[p(1.0), p(3.0)]).unwrap();
        assert_relative_eq!(g[(0, 1)], 1.0 / (8.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(g[(1, 0)], 1.0 / (8.0 * PI), max_relative = 1e-15);
        assert_relative_eq!(g[(1, 1)], 1.0 / (12.0 * PI), max_relative = 1e-15);
        assert!(matches!(
            gram_matrix(&[p(1.0), p(2.0), p(1.0)]),
            Err(Error::DuplicatePoint(s)) if s == 1.0
        ));
    }

    #[test]
    fn log1p_matches_principal_log() {
        for w in [
            c(0.3, -0.2),
            c(-0.5, 0.5),
            c(3.0, 4.0),
            c(-2.0, 1e-3),
            c(1e-9, 2e-9),
        ] {
            let direct = (1.0 + w).ln();
            let ours = log1p(w);
            assert!((direct - ours).norm() <= 1e-14 * direct.norm().max(1e-300) + 1e-16);
        }
        // Small arguments keep full relative accuracy.
        let w = c(1e-12, -3e-12);
        assert_relative_eq!(log1p(w).re, 1e-12 - (w * w).re / 2.0, max_relative = 1e-12);
    }

    #[test]
    fn cut_is_rejected() {
        assert!(matches!(
            checked_log1p(c(-2.0, 0.0)),
            Err(Error::BranchCut { .. })
        ));
        assert!(checked_log1p(c(-1.0, 0.0)).is_err());
        assert!(checked_log1p(c(-2.0, 1e-300)).is_ok());
    }

    #[test]
    fn log1p_over_is_continuous_at_zero() {
        assert_eq!(log1p_over(c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
        let w = c(0.0, SERIES_THRESHOLD * 1.0001);
        let series = 1.0 - w / 2.0 + w * w / 3.0;
        assert!((log1p_over(w).unwrap() - series).norm() < 1e-15);
    }

    fn seeded_points(seed: u64, n: usize) -> Vec<HalfPlanePoint> {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let re = rng.random_range(-10.0..10.0);
                let im = rng.random_range(-3.0f64..3.0).exp();
                HalfPlanePoint::new(re, im).unwrap()
            })
            .collect()
    }

    #[test]
    fn segment_log_argument_avoids_the_cut() {
        let pts = seeded_points(11, 20_000);
        for pair in pts.chunks(2) {
            let (zeta, z) = (pair[0].value(), pair[1]);
            let w = 1.0 - zeta / z.conj();
            assert!(w.re >= 0.0 || w.im.abs() > 0.0, "{w}");
            assert!(off_branch_cut(-zeta / z.conj()));
        }
    }

    #[test]
    fn kernel_inner_is_hermitian() {
        let pts = seeded_points(12, 2000);
        for pair in pts.chunks(2) {
            let (a, b) = (
                ReproducingKernel::new(pair[0]),
                ReproducingKernel::new(pair[1]),
            );
            let ab = kernel_inner(&a, &b);
            assert!((ab - kernel_inner(&b, &a).conj()).norm() <= 1e-15 * ab.norm());
        }
    }

    #[test]
    fn random_gram_matrices_are_positive_definite() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for _ in 0..50 {
            let n = rng.random_range(1..=20);
            let mut s: Vec<f64> = (0..n)
                .map(|_| rng.random_range(0.1f64.ln()..10f64.ln()).exp())
                .collect();
            s.sort_by(f64::total_cmp);
            s.dedup();
            let pts: Vec<_> = s
                .iter()
                .map(|&v| ImaginaryAxisPoint::new(v).unwrap())
                .collect();
            let g = gram_matrix(&pts).unwrap();
            // dense eigenvalues can lose sign for clustered points; Cholesky of
            // the unit-diagonal rescaling is the robust definiteness test
            let d: Vec<f64> = (0..s.len()).map(|j| g[(j, j)].sqrt()).collect();
            let scaled = DMatrix::from_fn(s.len(), s.len(), |j, k| g[(j, k)] / (d[j] * d[k]));
            assert!(crate::verify::gram_pivots(&s).iter().all(|&p| p > 0.0));
            let min_gap = s
                .windows(2)
                .map(|w| (w[1] - w[0]) / w[1])
                .fold(1.0, f64::min);
            if min_gap > 0.05 {
                assert!(scaled.clone().cholesky().is_some(), "{s:?}");
                assert!(g.symmetric_eigenvalues().min() > 0.0, "{s:?}");
            }
        }
    }
}
