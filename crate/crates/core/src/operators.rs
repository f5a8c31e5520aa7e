//! The Cesàro operator `C`, its adjoint `C*`, the weighted family `C_μ` and
//! the Cauchy integral.
//!
//! Every operator has two routes: closed forms on reproducing kernels, and
//! quadrature applied to an arbitrary [`FunctionHandle`]. The quadrature
//! route never consults the closed forms, so the two can check each other.

use std::f64::consts::{E, PI};
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::halfplane::{checked_log1p, log1p_over, HalfPlanePoint, KernelExpansion};
use crate::quadrature::{
    integrate_real_line_with_breaks, integrate_unit_interval_with_breaks, segment_breaks,
    DecayEnvelope, QuadratureResult, QuadratureSpec,
};

const I: Complex64 = Complex64::new(0.0, 1.0);
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

type Interior = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;
type Boundary = Arc<dyn Fn(f64) -> Complex64 + Send + Sync>;

/// A holomorphic function on ℂ₊ given only by evaluators.
///
/// Evaluators must be safe to call concurrently. `decay` majorizes `|f|` on
/// the boundary, on every horizontal line and on rays from the origin.
#[derive(Clone)]
pub struct BlackBox {
    interior: Interior,
    boundary: Option<Boundary>,
    decay: DecayEnvelope,
    feature_scale: f64,
}

impl BlackBox {
    pub fn new<F>(interior: F, decay: DecayEnvelope) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            interior: Arc::new(interior),
            boundary: None,
            decay,
            feature_scale: 1.0,
        }
    }

    pub fn with_boundary<B>(mut self, boundary: B) -> Self
    where
        B: Fn(f64) -> Complex64 + Send + Sync + 'static,
    {
        self.boundary = Some(Arc::new(boundary));
        self
    }

    /// Length scale of the function's features near the origin (default 1).
    pub fn with_feature_scale(mut self, scale: f64) -> Self {
        self.feature_scale = scale;
        self
    }

    pub fn decay(&self) -> DecayEnvelope {
        self.decay
    }
}

impl fmt::Debug for BlackBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BlackBox")
            .field("has_boundary", &self.boundary.is_some())
            .field("decay", &self.decay)
            .field("feature_scale", &self.feature_scale)
            .finish()
    }
}

#[derive(Debug, Clone)]
pub enum FunctionHandle {
    Expansion(KernelExpansion),
    BlackBox(BlackBox),
}

impl From<KernelExpansion> for FunctionHandle {
    fn from(f: KernelExpansion) -> Self {
        FunctionHandle::Expansion(f)
    }
}

impl From<BlackBox> for FunctionHandle {
    fn from(f: BlackBox) -> Self {
        FunctionHandle::BlackBox(f)
    }
}

impl FunctionHandle {
    /// Value at `w` with `Im w > 0`; kernel expansions also accept the real line.
    pub fn eval(&self, w: Complex64) -> Complex64 {
        match self {
            FunctionHandle::Expansion(f) => f.eval_raw(w),
            FunctionHandle::BlackBox(b) => (b.interior)(w),
        }
    }

    pub fn has_boundary(&self) -> bool {
        match self {
            FunctionHandle::Expansion(_) => true,
            FunctionHandle::BlackBox(b) => b.boundary.is_some(),
        }
    }

    pub fn boundary_eval(&self, t: f64) -> Result<Complex64> {
        match self {
            FunctionHandle::Expansion(f) => Ok(f.boundary(t)),
            FunctionHandle::BlackBox(b) => b
                .boundary
                .as_ref()
                .map(|g| g(t))
                .ok_or(Error::MissingBoundary),
        }
    }

    fn require_boundary(&self) -> Result<()> {
        if self.has_boundary() {
            Ok(())
        } else {
            Err(Error::MissingBoundary)
        }
    }

    /// Majorant of `|f|` at infinity along lines `Im w = const ≥ 0` and rays.
    pub fn envelope(&self) -> DecayEnvelope {
        match self {
            // |conj(z) - w| ≥ |w| - |z| ≥ |w|/2 once |w| ≥ 2|z|
            FunctionHandle::Expansion(f) => {
                DecayEnvelope::power(f.coefficient_l1() / PI, 1.0, 2.0 * f.max_anchor_modulus())
            }
            FunctionHandle::BlackBox(b) => b.decay,
        }
    }

    /// Real abscissae where boundary integrands have structure.
    pub fn feature_points(&self) -> Vec<f64> {
        match self {
            FunctionHandle::Expansion(f) => f.terms().iter().map(|(_, z)| z.re()).collect(),
            FunctionHandle::BlackBox(_) => Vec::new(),
        }
    }

    pub fn feature_scale(&self) -> f64 {
        match self {
            FunctionHandle::Expansion(f) => f
                .terms()
                .iter()
                .map(|(_, z)| z.value().norm())
                .fold(f64::INFINITY, f64::min)
                .min(1.0),
            FunctionHandle::BlackBox(b) => b.feature_scale,
        }
    }

    pub fn is_known_zero(&self) -> bool {
        matches!(self, FunctionHandle::Expansion(f) if f.terms().iter().all(|(a, _)| *a == ZERO))
    }
}

/// Bounds `|Log(1 + c·x)| ≤ K ln|x|` for `|x| ≥ R`, returning `(K, R)`.
///
/// Requires `R ≥ max(2/|c|, e², floor)`, where `|1 + c x|` lies in
/// `[|c x|/2, 3|c x|/2]` and `ln|x| ≥ 2`.
pub(crate) fn log_growth(c_modulus: f64, floor: f64) -> (f64, f64) {
    let r = (2.0 / c_modulus).max(E * E).max(floor);
    let extra = (1.5 * c_modulus).ln().max(0.0) + PI;
    (1.0 + extra / r.ln(), r)
}

fn with_boundary_features(f: &FunctionHandle, extra: &[f64]) -> Vec<f64> {
    let mut pts = f.feature_points();
    pts.extend_from_slice(extra);
    pts
}

fn segment_mean<W>(
    f: &FunctionHandle,
    z: HalfPlanePoint,
    weight: W,
    spec: &QuadratureSpec,
) -> Result<Complex64>
where
    W: Fn(f64) -> Complex64,
{
    if f.is_known_zero() {
        return Ok(ZERO);
    }
    let zv = z.value();
    let g = |s: f64| weight(s) * f.eval(zv * s);
    let breaks = segment_breaks(zv.norm() / f.feature_scale());
    Ok(integrate_unit_interval_with_breaks(&g, &breaks, spec)?.value)
}

/// `(Cf)(z) = ∫_0^1 f(z s) ds`, by quadrature.
pub fn cesaro_apply(
    f: &FunctionHandle,
    z: HalfPlanePoint,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    segment_mean(f, z, |_| Complex64::new(1.0, 0.0), spec)
}

/// `C k_z` in closed form:
/// `ζ ↦ -(1/(2πiζ))·Log(1 - ζ/conj(z))`, with the removable singularity at
/// `ζ = 0` filled by its series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CesaroKernelImage {
    anchor: HalfPlanePoint,
}

impl CesaroKernelImage {
    pub fn anchor(&self) -> HalfPlanePoint {
        self.anchor
    }

    /// Valid for `Im ζ ≥ 0`, including the boundary and `ζ = 0`.
    pub fn eval(&self, zeta: Complex64) -> Result<Complex64> {
        let zb = self.anchor.conj();
        Ok(log1p_over(-zeta / zb)? / (2.0 * PI * I * zb))
    }

    /// The `ζ → 0` limit `1/(2πi·conj(z))`.
    pub fn limit_at_origin(&self) -> Complex64 {
        1.0 / (2.0 * PI * I * self.anchor.conj())
    }
}

pub fn cesaro_on_kernel(anchor: HalfPlanePoint) -> CesaroKernelImage {
    CesaroKernelImage { anchor }
}

/// `C* k_z` in closed form: `ζ ↦ (1/(2πi·conj(z)))·Log(1 - conj(z)/ζ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdjointKernelImage {
    anchor: HalfPlanePoint,
}

impl AdjointKernelImage {
    pub fn anchor(&self) -> HalfPlanePoint {
        self.anchor
    }

    /// Valid for `Im ζ ≥ 0`, `ζ ≠ 0`.
    pub fn eval(&self, zeta: Complex64) -> Result<Complex64> {
        if zeta == ZERO {
            return Err(Error::invalid("zeta", "C*k_z is singular at the origin"));
        }
        let zb = self.anchor.conj();
        Ok(checked_log1p(-zb / zeta)? / (2.0 * PI * I * zb))
    }
}

pub fn adjoint_on_kernel(anchor: HalfPlanePoint) -> AdjointKernelImage {
    AdjointKernelImage { anchor }
}

/// `C f` for a kernel expansion, summed from the closed forms.
pub fn cesaro_expansion_closed(f: &KernelExpansion, zeta: Complex64) -> Result<Complex64> {
    f.terms()
        .iter()
        .map(|&(a, z)| Ok(a * cesaro_on_kernel(z).eval(zeta)?))
        .sum()
}

/// `C* f` for a kernel expansion, summed from the closed forms.
pub fn adjoint_expansion_closed(f: &KernelExpansion, zeta: Complex64) -> Result<Complex64> {
    f.terms()
        .iter()
        .map(|&(a, z)| Ok(a * adjoint_on_kernel(z).eval(zeta)?))
        .sum()
}

/// `(C*f)(z) = (1/2πi) ∫_ℝ f(t) (1/t) Log(1 - t/z) dt`, by quadrature of
/// the boundary trace.
pub fn adjoint_apply(
    f: &FunctionHandle,
    z: HalfPlanePoint,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    f.require_boundary()?;
    if f.is_known_zero() {
        return Ok(ZERO);
    }
    let zv = z.value();
    // (1/t) Log(1 - t/z) = -(1/z) · Log(1 + w)/w with w = -t/z; regular at t = 0
    let g = |t: f64| -> Complex64 {
        let w = -Complex64::new(t, 0.0) / zv;
        let fb = f
            .boundary_eval(t)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        match log1p_over(w) {
            Ok(l) => fb * (-l / zv) / (2.0 * PI * I),
            Err(_) => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let (k, r0) = log_growth(
        1.0 / zv.norm(),
        f.envelope().valid_from.max(2.0 * zv.norm()),
    );
    let env = f
        .envelope()
        .times(&DecayEnvelope::with_log(k / (2.0 * PI), 1.0, 1.0, r0));
    let breaks = with_boundary_features(f, &[zv.re]);
    Ok(integrate_real_line_with_breaks(&g, &env, &breaks, spec)?.value)
}

/// `μ` in `(C_μ f)(z) = z^(-μ-1) ∫_0^z ζ^μ f(ζ) dζ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuParameter {
    mu: Complex64,
}

impl MuParameter {
    /// For H²: requires `Re μ > -1/2`.
    pub fn new(mu: Complex64) -> Result<Self> {
        Self::for_exponent(mu, 2.0)
    }

    /// Requires `Re μ > -(p-1)/p`, `1 < p < ∞`.
    pub fn for_exponent(mu: Complex64, p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::invalid("p", format!("need 1 < p < inf, got {p}")));
        }
        let floor = -(p - 1.0) / p;
        if !(mu.re > floor) || !mu.im.is_finite() {
            return Err(Error::invalid(
                "mu",
                format!("Re mu = {} must exceed {floor}", mu.re),
            ));
        }
        Ok(Self { mu })
    }

    pub fn value(&self) -> Complex64 {
        self.mu
    }
}

/// `(C_μ f)(z) = ∫_0^1 s^μ f(z s) ds`; identical to [`cesaro_apply`] at `μ = 0`.
pub fn cmu_apply(
    mu: MuParameter,
    f: &FunctionHandle,
    z: HalfPlanePoint,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let m = mu.value();
    if m == ZERO {
        return cesaro_apply(f, z, spec);
    }
    segment_mean(f, z, |s| (m * s.ln()).exp(), spec)
}

/// `f(z) = (1/2πi) ∫_ℝ f(t)/(t - z) dt` from the boundary trace.
pub fn cauchy_reconstruct(
    f: &FunctionHandle,
    z: HalfPlanePoint,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    f.require_boundary()?;
    if f.is_known_zero() {
        return Ok(ZERO);
    }
    let zv = z.value();
    let g = |t: f64| {
        let fb = f
            .boundary_eval(t)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN));
        fb / (Complex64::new(t, 0.0) - zv) / (2.0 * PI * I)
    };
    let env = f
        .envelope()
        .times(&DecayEnvelope::power(1.0 / PI, 1.0, 2.0 * zv.norm()));
    let breaks = with_boundary_features(f, &[zv.re]);
    Ok(integrate_real_line_with_breaks(&g, &env, &breaks, spec)?.value)
}

/// Inner products between `C k_{is}`, `C* k_{is}` and kernels on the
/// imaginary axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum PairKind {
    /// `⟨C k_{is}, C k_{it}⟩`
    CesaroCesaro,
    /// `⟨C k_{is}, k_{it}⟩`
    CesaroKernel,
    /// `⟨C* k_{is}, k_{it}⟩`
    AdjointKernel,
    /// `⟨C* k_{is}, C* k_{it}⟩`
    AdjointAdjoint,
}

impl PairKind {
    pub const ALL: [PairKind; 4] = [
        PairKind::CesaroCesaro,
        PairKind::CesaroKernel,
        PairKind::AdjointKernel,
        PairKind::AdjointAdjoint,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            PairKind::CesaroCesaro => "CC",
            PairKind::CesaroKernel => "CK",
            PairKind::AdjointKernel => "CstarK",
            PairKind::AdjointAdjoint => "CstarCstar",
        }
    }
}

fn check_axis(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

/// Closed forms on the imaginary axis. With
/// `u = log(1 + s/t)/(2πs)` and `v = log(1 + t/s)/(2πt)`:
/// `CC = u + v`, `CK = v`, `CstarK = u`, `CstarCstar = v + u`.
pub fn pair_inner_closed(kind: PairKind, s: f64, t: f64) -> Result<f64> {
    check_axis("s", s)?;
    check_axis("t", t)?;
    let u = (s / t).ln_1p() / (2.0 * PI * s);
    let v = (t / s).ln_1p() / (2.0 * PI * t);
    Ok(match kind {
        PairKind::CesaroCesaro => u + v,
        PairKind::CesaroKernel => v,
        PairKind::AdjointKernel => u,
        PairKind::AdjointAdjoint => v + u,
    })
}

/// `⟨C k_{is}, C k_{it}⟩ = (1/4π²) ∫ x⁻² Log(1 - ix/s) Log(1 + ix/t) dx`.
pub fn cc_boundary_integral(s: f64, t: f64, spec: &QuadratureSpec) -> Result<QuadratureResult> {
    check_axis("s", s)?;
    check_axis("t", t)?;
    // Log(1 - ix/s)/x = (-i/s)·Log(1+w)/w, w = -ix/s
    let g = |x: f64| -> Complex64 {
        let a = log1p_over(Complex64::new(0.0, -x / s)).map(|l| l * (-I / s));
        let b = log1p_over(Complex64::new(0.0, x / t)).map(|l| l * (I / t));
        match (a, b) {
            (Ok(a), Ok(b)) => a * b / (4.0 * PI * PI),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let r0 = (2.0 * s).max(2.0 * t);
    let (k1, r0) = log_growth(1.0 / s, r0);
    let (k2, _) = log_growth(1.0 / t, r0);
    let env = DecayEnvelope::with_log(k1 * k2 / (4.0 * PI * PI), 2.0, 2.0, r0);
    integrate_real_line_with_breaks(&g, &env, &[], spec)
}

/// `⟨C* k_{is}, C* k_{it}⟩ = (1/(4π² s t)) ∫ x⁻² Log(1 + isx) Log(1 - itx) dx`,
/// the form obtained from the boundary product after `x ↦ 1/x`.
pub fn adjoint_adjoint_boundary_integral(
    s: f64,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    check_axis("s", s)?;
    check_axis("t", t)?;
    let g = |x: f64| -> Complex64 {
        let a = log1p_over(Complex64::new(0.0, s * x)).map(|l| l * (I * s));
        let b = log1p_over(Complex64::new(0.0, -t * x)).map(|l| l * (-I * t));
        match (a, b) {
            (Ok(a), Ok(b)) => a * b / (4.0 * PI * PI * s * t),
            _ => Complex64::new(f64::NAN, f64::NAN),
        }
    };
    let r0 = (2.0 / s).max(2.0 / t);
    let (k1, r0) = log_growth(s, r0);
    let (k2, _) = log_growth(t, r0);
    let env = DecayEnvelope::with_log(k1 * k2 / (4.0 * PI * PI * s * t), 2.0, 2.0, r0);
    integrate_real_line_with_breaks(&g, &env, &[], spec)
}

/// The quadrature route for every [`PairKind`]; independent of
/// [`pair_inner_closed`].
pub fn pair_inner_quadrature(
    kind: PairKind,
    s: f64,
    t: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    check_axis("s", s)?;
    check_axis("t", t)?;
    let ks: FunctionHandle = KernelExpansion::kernel(HalfPlanePoint::on_axis(s)?).into();
    let it = HalfPlanePoint::on_axis(t)?;
    match kind {
        PairKind::CesaroCesaro => Ok(cc_boundary_integral(s, t, spec)?.value),
        PairKind::AdjointAdjoint => Ok(adjoint_adjoint_boundary_integral(s, t, spec)?.value),
        // ⟨C k_{is}, k_{it}⟩ = (C k_{is})(it)
        PairKind::CesaroKernel => cesaro_apply(&ks, it, spec),
        PairKind::AdjointKernel => adjoint_apply(&ks, it, spec),
    }
}

/// Envelope of `|C f|` on the real line for a kernel expansion.
pub(crate) fn cesaro_expansion_envelope(f: &KernelExpansion) -> DecayEnvelope {
    let r0 = (2.0 * f.max_anchor_modulus()).max(E * E).max(1.0);
    let constant: f64 = f
        .terms()
        .iter()
        .map(|&(a, z)| a.norm() * log_growth(1.0 / z.value().norm(), r0).0 / (2.0 * PI))
        .sum();
    DecayEnvelope::with_log(constant, 1.0, 1.0, r0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn axis(s: f64) -> HalfPlanePoint {
        HalfPlanePoint::on_axis(s).unwrap()
    }

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn inv_z_plus_i() -> FunctionHandle {
        BlackBox::new(
            |z: Complex64| 1.0 / (z + I),
            DecayEnvelope::power(2.0, 1.0, 2.0),
        )
        .with_boundary(|t: f64| 1.0 / c(t, 1.0))
        .into()
    }

    fn close(a: Complex64, b: Complex64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1e-300)
    }

    #[test]
    fn cesaro_apply_examples() {
        let ln2 = 2f64.ln();
        // Cf(z) = Log(1 - iz)/z, so Cf(i) = -i·ln 2
        let v = cesaro_apply(&inv_z_plus_i(), axis(1.0), &spec()).unwrap();
        assert!(close(v, c(0.0, -ln2), 1e-11), "{v}");

        let ki: FunctionHandle = KernelExpansion::kernel(axis(1.0)).into();
        let v = cesaro_apply(&ki, axis(1.0), &spec()).unwrap();
        assert!(close(v, c(ln2 / (2.0 * PI), 0.0), 1e-11));
        let closed = cesaro_on_kernel(axis(1.0)).eval(c(0.0, 1.0)).unwrap();
        assert!(close(v, closed, 1e-11));

        let zero: FunctionHandle = KernelExpansion::zero().into();
        assert_eq!(cesaro_apply(&zero, axis(2.0), &spec()).unwrap(), ZERO);
    }

    #[test]
    fn cesaro_on_kernel_examples() {
        let img = cesaro_on_kernel(axis(1.0));
        let v = img.eval(c(0.0, 1.0)).unwrap();
        assert_relative_eq!(v.re, 2f64.ln() / (2.0 * PI), max_relative = 1e-14);
        assert!((v.re - 0.110318).abs() < 1e-6);
        assert!(v.im.abs() < 1e-16);

        for (s, t) in [(1.0, 1.0), (0.3, 2.0), (5.0, 0.2)] {
            let v = cesaro_on_kernel(axis(s)).eval(c(0.0, t)).unwrap();
            let expected = (1.0 + t / s).ln() / (2.0 * PI * t);
            assert_relative_eq!(v.re, expected, max_relative = 1e-13);
            assert_relative_eq!(
                v.re,
                pair_inner_closed(PairKind::CesaroKernel, s, t).unwrap(),
                max_relative = 1e-13
            );
        }

        assert!(close(
            img.limit_at_origin(),
            c(1.0 / (2.0 * PI), 0.0),
            1e-15
        ));
        assert!(close(img.eval(ZERO).unwrap(), img.limit_at_origin(), 1e-15));
    }

    #[test]
    fn removable_singularity_matches_series_limit() {
        for anchor in [axis(1.0), HalfPlanePoint::new(0.4, 0.3).unwrap()] {
            let img = cesaro_on_kernel(anchor);
            let lim = img.limit_at_origin();
            for r in [1e-8, 1e-6] {
                for dir in [c(1.0, 0.0), c(0.0, 1.0), c(-0.6, 0.8)] {
                    let v = img.eval(dir * r).unwrap();
                    assert!((v - lim).norm() <= 5e-6 * lim.norm(), "r={r}: {v} vs {lim}");
                }
            }
        }
    }

    #[test]
    fn adjoint_on_kernel_examples() {
        for (s, t) in [(1.0, 1.0), (2.0, 1.0), (0.1, 7.0)] {
            let v = adjoint_on_kernel(axis(s)).eval(c(0.0, t)).unwrap();
            assert_relative_eq!(
                v.re,
                (1.0 + s / t).ln() / (2.0 * PI * s),
                max_relative = 1e-13
            );
            assert!(v.im.abs() < 1e-15);
        }
        assert!(adjoint_on_kernel(axis(1.0)).eval(ZERO).is_err());
    }

    #[test]
    fn closed_form_adjoint_consistency_on_random_pairs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..100 {
            let a = HalfPlanePoint::new(rng.random_range(-5.0..5.0), rng.random_range(0.05..5.0))
                .unwrap();
            let b = HalfPlanePoint::new(rng.random_range(-5.0..5.0), rng.random_range(0.05..5.0))
                .unwrap();
            // ⟨C k_a, k_b⟩ = (C k_a)(b) and ⟨C* k_b, k_a⟩ = (C* k_b)(a)
            let lhs = cesaro_on_kernel(a).eval(b.value()).unwrap();
            let rhs = adjoint_on_kernel(b).eval(a.value()).unwrap().conj();
            assert!(close(lhs, rhs, 1e-12), "{lhs} vs {rhs}");
        }
    }

    #[test]
    fn adjoint_apply_examples() {
        let ki: FunctionHandle = KernelExpansion::kernel(axis(1.0)).into();
        let v = adjoint_apply(&ki, axis(1.0), &spec()).unwrap();
        assert!(close(v, c(2f64.ln() / (2.0 * PI), 0.0), 1e-9), "{v}");

        let k2i: FunctionHandle = KernelExpansion::kernel(axis(2.0)).into();
        let v = adjoint_apply(&k2i, axis(1.0), &spec()).unwrap();
        assert!(close(v, c(3f64.ln() / (4.0 * PI), 0.0), 1e-9), "{v}");

        let zero: FunctionHandle = KernelExpansion::zero().into();
        assert_eq!(adjoint_apply(&zero, axis(1.0), &spec()).unwrap(), ZERO);

        let no_boundary: FunctionHandle =
            BlackBox::new(|z| z, DecayEnvelope::power(1.0, 2.0, 1.0)).into();
        assert!(matches!(
            adjoint_apply(&no_boundary, axis(1.0), &spec()),
            Err(Error::MissingBoundary)
        ));
    }

    #[test]
    fn cauchy_reconstruct_examples() {
        let ki: FunctionHandle = KernelExpansion::kernel(axis(1.0)).into();
        let v = cauchy_reconstruct(&ki, axis(2.0), &spec()).unwrap();
        assert!(close(v, c(1.0 / (6.0 * PI), 0.0), 1e-9), "{v}");
        let v = cauchy_reconstruct(&ki, axis(1.0), &spec()).unwrap();
        assert!(close(v, c(1.0 / (4.0 * PI), 0.0), 1e-9), "{v}");
        let zero: FunctionHandle = KernelExpansion::zero().into();
        assert_eq!(cauchy_reconstruct(&zero, axis(1.0), &spec()).unwrap(), ZERO);
    }

    #[test]
    fn cmu_examples() {
        let f = inv_z_plus_i();
        let z = HalfPlanePoint::new(0.3, 0.8).unwrap();
        let zero_mu = MuParameter::new(ZERO).unwrap();
        let a = cmu_apply(zero_mu, &f, z, &spec()).unwrap();
        let b = cesaro_apply(&f, z, &spec()).unwrap();
        assert_eq!(a.re.to_bits(), b.re.to_bits());
        assert_eq!(a.im.to_bits(), b.im.to_bits());

        // ∫_0^1 s/(is + i) ds = -i(1 - ln 2)
        let v = cmu_apply(
            MuParameter::new(c(1.0, 0.0)).unwrap(),
            &f,
            axis(1.0),
            &spec(),
        )
        .unwrap();
        assert!(close(v, c(0.0, -(1.0 - 2f64.ln())), 1e-11), "{v}");

        let ki: FunctionHandle = KernelExpansion::kernel(axis(1.0)).into();
        let mu = MuParameter::new(c(-0.25, 0.0)).unwrap();
        let fine = cmu_apply(mu, &ki, axis(1.0), &spec()).unwrap();
        let coarse = cmu_apply(mu, &ki, axis(1.0), &spec().scaled_tolerances(10.0)).unwrap();
        assert!((fine - coarse).norm() < 1e-9, "{}", (fine - coarse).norm());
        // ∫ s^(-1/4) / (2π(1+s)) ds by an independent substitution s = u⁴
        let oracle = crate::quadrature::integrate_unit_interval(
            &|u: f64| c(4.0 * u * u / (2.0 * PI * (1.0 + u.powi(4))), 0.0),
            &spec(),
        )
        .unwrap()
        .value;
        assert!(close(fine, oracle, 1e-9), "{fine} vs {oracle}");

        assert!(MuParameter::new(c(-0.5, 0.0)).is_err());
        assert!(MuParameter::new(c(-0.49, 3.0)).is_ok());
        assert!(MuParameter::for_exponent(c(-0.3, 0.0), 1.25).is_err());
    }

    #[test]
    fn pair_inner_closed_examples() {
        let cc = pair_inner_closed(PairKind::CesaroCesaro, 1.0, 1.0).unwrap();
        assert_relative_eq!(cc, 2f64.ln() / PI, max_relative = 1e-15);
        assert!((cc - 0.2206356).abs() < 1e-7);
        for s in [0.1, 1.0, 10.0] {
            let n = pair_inner_closed(PairKind::CesaroCesaro, s, s).unwrap();
            assert_relative_eq!(n, 2f64.ln() / (PI * s), max_relative = 1e-14);
        }
        let (s, t) = (2.0, 5.0);
        let cc = pair_inner_closed(PairKind::CesaroCesaro, s, t).unwrap();
        let sum = pair_inner_closed(PairKind::CesaroKernel, s, t).unwrap()
            + pair_inner_closed(PairKind::AdjointKernel, s, t).unwrap();
        assert!((cc - sum).abs() <= 1e-16);
        assert!(pair_inner_closed(PairKind::CesaroKernel, 0.0, 1.0).is_err());
        assert!(pair_inner_closed(PairKind::CesaroKernel, 1.0, -1.0).is_err());
    }

    #[test]
    fn pair_quadrature_matches_closed_forms() {
        for &(s, t) in &[(1.0, 1.0), (0.1, 10.0), (3.0, 0.5)] {
            for kind in PairKind::ALL {
                let q = pair_inner_quadrature(kind, s, t, &spec()).unwrap();
                let cf = pair_inner_closed(kind, s, t).unwrap();
                assert!(
                    (q.re - cf).abs() <= 1e-8 * cf,
                    "{kind:?} s={s} t={t}: {} vs {cf}",
                    q.re
                );
                assert!(q.im.abs() <= 1e-8 * cf);
            }
        }
    }

    #[test]
    fn linearity_of_cesaro_apply() {
        let f = KernelExpansion::on_axis([(c(1.0, 0.5), 1.0), (c(-0.3, 0.0), 2.5)]).unwrap();
        let g = KernelExpansion::new([
            (c(0.2, -1.0), HalfPlanePoint::new(1.0, 0.5).unwrap()),
            (c(0.7, 0.0), axis(0.3)),
        ]);
        let (a, b) = (c(0.5, 2.0), c(-1.5, 0.25));
        let combo = f.scale(a).add(&g.scale(b));
        let z = HalfPlanePoint::new(-0.4, 1.3).unwrap();
        let lhs = cesaro_apply(&combo.into(), z, &spec()).unwrap();
        let rhs = a * cesaro_apply(&f.into(), z, &spec()).unwrap()
            + b * cesaro_apply(&g.into(), z, &spec()).unwrap();
        assert!((lhs - rhs).norm() <= 1e-12, "{}", (lhs - rhs).norm());
    }

    #[test]
    fn branch_cut_is_a_domain_error() {
        // conj(z)/ζ = -3 puts 1 - conj(z)/ζ = 4 (fine); force the cut with ζ on the far side
        let img = adjoint_on_kernel(axis(1.0));
        assert!(img.eval(c(0.0, -0.5)).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn quadrature_cesaro_matches_closed_form_on_expansions(
            s1 in 0.1f64..10.0, s2 in 0.1f64..10.0, x in -3.0f64..3.0, y in 0.1f64..3.0,
            a_re in -1.0f64..1.0, a_im in -1.0f64..1.0,
        ) {
            let f = KernelExpansion::new([
                (c(a_re, a_im), axis(s1)),
                (c(1.0, 0.0), HalfPlanePoint::new(0.5, s2).unwrap()),
            ]);
            let z = HalfPlanePoint::new(x, y).unwrap();
            let q = cesaro_apply(&f.clone().into(), z, &spec()).unwrap();
            let closed = cesaro_expansion_closed(&f, z.value()).unwrap();
            prop_assert!((q - closed).norm() <= 1e-9 * closed.norm().max(1e-3));
        }

        #[test]
        fn log_argument_never_meets_the_cut(
            zr in -50.0f64..50.0, zi in 1e-3f64..50.0, wr in -50.0f64..50.0, wi in 1e-3f64..50.0,
        ) {
            // 1 - ζ/conj(z) for ζ, z in ℂ₊
            let arg = 1.0 - c(wr, wi) / c(zr, -zi);
            prop_assert!(arg.re >= 0.0 || arg.im.abs() > 0.0);
            prop_assert!(crate::halfplane::off_branch_cut(arg));
        }
    }
}
