//! Identity checks for `C - I` and `C* - I` being isometries on kernel
//! spans, their corollaries, and quadrature cross-checks of every closed form.

use std::f64::consts::{LN_2, PI};

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::halfplane::{
    kernel_inner, HalfPlanePoint, ImaginaryAxisPoint, KernelExpansion, ReproducingKernel,
};
use crate::operators::{
    adjoint_apply, adjoint_on_kernel, cauchy_reconstruct, cc_boundary_integral, pair_inner_closed,
    pair_inner_quadrature, FunctionHandle, PairKind,
};
use crate::quadrature::QuadratureSpec;
use crate::spectral::PointGrid;

/// Tolerance for checks that compare closed forms with each other.
pub const CLOSED_FORM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Scalar {
    Real(f64),
    Complex { re: f64, im: f64 },
}

impl From<f64> for Scalar {
    fn from(v: f64) -> Self {
        Scalar::Real(v)
    }
}

impl From<Complex64> for Scalar {
    fn from(z: Complex64) -> Self {
        Scalar::Complex { re: z.re, im: z.im }
    }
}

impl Scalar {
    pub fn re(&self) -> f64 {
        match *self {
            Scalar::Real(v) => v,
            Scalar::Complex { re, .. } => re,
        }
    }

    pub fn im(&self) -> f64 {
        match *self {
            Scalar::Real(_) => 0.0,
            Scalar::Complex { im, .. } => im,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Lane {
    ClosedForm,
    Quadrature,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    /// The identity being checked, in words.
    #[serde(rename = "paper_anchor")]
    pub identity: String,
    pub lane: Lane,
    pub inputs: Value,
    pub lhs: Scalar,
    pub rhs: Scalar,
    pub residual: f64,
    pub tol: f64,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl IdentityCheck {
    #[allow(clippy::too_many_arguments)]
    fn new(
        name: impl Into<String>,
        identity: &str,
        lane: Lane,
        inputs: Value,
        lhs: impl Into<Scalar>,
        rhs: impl Into<Scalar>,
        residual: f64,
        tol: f64,
    ) -> Self {
        Self {
            name: name.into(),
            identity: identity.to_string(),
            lane,
            inputs,
            lhs: lhs.into(),
            rhs: rhs.into(),
            residual,
            tol,
            passed: residual <= tol,
            error: None,
        }
    }

    /// A check whose computation itself failed.
    fn failed(
        name: impl Into<String>,
        identity: &str,
        lane: Lane,
        inputs: Value,
        tol: f64,
        err: &Error,
    ) -> Self {
        Self {
            name: name.into(),
            identity: identity.to_string(),
            lane,
            inputs,
            lhs: Scalar::Real(f64::NAN),
            rhs: Scalar::Real(f64::NAN),
            residual: f64::INFINITY,
            tol,
            passed: false,
            error: Some(err.to_string()),
        }
    }
}

fn positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(
            name,
            format!("must be finite and > 0, got {v}"),
        ))
    }
}

fn gram_entry(s: f64, t: f64) -> f64 {
    1.0 / (2.0 * PI * (s + t))
}

/// Residual normalization `‖k_{is}‖·‖k_{it}‖ = 1/(4π√(st))`.
fn kernel_scale(s: f64, t: f64) -> f64 {
    1.0 / (4.0 * PI * (s * t).sqrt())
}

fn closed(kind: PairKind, s: f64, t: f64) -> f64 {
    pair_inner_closed(kind, s, t).expect("arguments validated by caller")
}

/// `⟨(C-I)k_{is}, (C-I)k_{it}⟩` expanded bilinearly.
fn c_minus_i_entry(s: f64, t: f64) -> f64 {
    closed(PairKind::CesaroCesaro, s, t)
        - closed(PairKind::CesaroKernel, s, t)
        - closed(PairKind::AdjointKernel, s, t)
        + gram_entry(s, t)
}

/// `⟨(C*-I)k_{is}, (C*-I)k_{it}⟩` expanded bilinearly.
fn cstar_minus_i_entry(s: f64, t: f64) -> f64 {
    closed(PairKind::AdjointAdjoint, s, t)
        - closed(PairKind::AdjointKernel, s, t)
        - closed(PairKind::CesaroKernel, s, t)
        + gram_entry(s, t)
}

/// `⟨(C-I)k_{is}, (C-I)k_{it}⟩ = ⟨k_{is}, k_{it}⟩`.
pub fn check_c_minus_i_isometry(s: f64, t: f64) -> Result<IdentityCheck> {
    positive("s", s)?;
    positive("t", t)?;
    let lhs = c_minus_i_entry(s, t);
    let rhs = kernel_inner(
        &ReproducingKernel::new(HalfPlanePoint::on_axis(s)?),
        &ReproducingKernel::new(HalfPlanePoint::on_axis(t)?),
    )
    .re;
    Ok(IdentityCheck::new(
        "c_minus_i_isometry/pair",
        "<(C-I)k_is,(C-I)k_it> = <k_is,k_it>",
        Lane::ClosedForm,
        json!({"s": s, "t": t}),
        lhs,
        rhs,
        (lhs - rhs).abs() / kernel_scale(s, t),
        CLOSED_FORM_TOL,
    ))
}

/// `⟨(C*-I)k_{is}, (C*-I)k_{it}⟩ = ⟨k_{is}, k_{it}⟩`.
pub fn check_cstar_minus_i_isometry(s: f64, t: f64) -> Result<IdentityCheck> {
    positive("s", s)?;
    positive("t", t)?;
    let lhs = cstar_minus_i_entry(s, t);
    let rhs = gram_entry(s, t);
    Ok(IdentityCheck::new(
        "cstar_minus_i_isometry/pair",
        "<(C*-I)k_is,(C*-I)k_it> = <k_is,k_it>",
        Lane::ClosedForm,
        json!({"s": s, "t": t}),
        lhs,
        rhs,
        (lhs - rhs).abs() / kernel_scale(s, t),
        CLOSED_FORM_TOL,
    ))
}

/// `⟨Ck_{is}, Ck_{it}⟩ = ⟨C*k_{is}, C*k_{it}⟩`.
pub fn check_cc_equals_cstarcstar(s: f64, t: f64) -> Result<IdentityCheck> {
    let lhs = pair_inner_closed(PairKind::CesaroCesaro, s, t)?;
    let rhs = pair_inner_closed(PairKind::AdjointAdjoint, s, t)?;
    Ok(IdentityCheck::new(
        "cc_equals_cstarcstar",
        "<Ck_is,Ck_it> = <C*k_is,C*k_it>",
        Lane::ClosedForm,
        json!({"s": s, "t": t}),
        lhs,
        rhs,
        (lhs - rhs).abs() / kernel_scale(s, t),
        CLOSED_FORM_TOL,
    ))
}

/// `⟨Ck_{is}, Ck_{it}⟩ = ⟨Ck_{is}, k_{it}⟩ + ⟨C*k_{is}, k_{it}⟩`, i.e. `C*C = C + C*`.
pub fn check_cstarc_identity(s: f64, t: f64) -> Result<IdentityCheck> {
    let lhs = pair_inner_closed(PairKind::CesaroCesaro, s, t)?;
    let rhs = pair_inner_closed(PairKind::CesaroKernel, s, t)?
        + pair_inner_closed(PairKind::AdjointKernel, s, t)?;
    Ok(IdentityCheck::new(
        "cstarc_equals_c_plus_cstar",
        "C*C = C + C*",
        Lane::ClosedForm,
        json!({"s": s, "t": t}),
        lhs,
        rhs,
        (lhs - rhs).abs() / kernel_scale(s, t),
        1e-13,
    ))
}

/// `M[j][k] = ⟨(C + C*)k_{is_k}, k_{is_j}⟩` is symmetric positive semidefinite.
pub fn check_positivity(points: &[ImaginaryAxisPoint]) -> Result<IdentityCheck> {
    if points.is_empty() {
        return Err(Error::invalid("points", "need at least one point"));
    }
    crate::halfplane::reject_duplicates(points)?;
    let n = points.len();
    let m = DMatrix::from_fn(n, n, |j, k| {
        let (sk, sj) = (points[k].s(), points[j].s());
        closed(PairKind::CesaroKernel, sk, sj) + closed(PairKind::AdjointKernel, sk, sj)
    });
    let asym = (0..n)
        .flat_map(|j| (0..n).map(move |k| (j, k)))
        .map(|(j, k)| (m[(j, k)] - m[(k, j)]).abs())
        .fold(0.0, f64::max);
    let min_eig = m
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let s: Vec<f64> = points.iter().map(|p| p.s()).collect();
    Ok(IdentityCheck::new(
        "c_plus_cstar_positive",
        "C + C* is positive",
        Lane::ClosedForm,
        json!({"points": s}),
        min_eig,
        0.0,
        (-min_eig).max(0.0) + asym,
        1e-10,
    ))
}

/// `½[log(1+s/t)/s + log(1+t/s)/t]` and `log 2/√(st)`.
pub fn log_inequality_sides(s: f64, t: f64) -> (f64, f64) {
    let lhs = 0.5 * ((s / t).ln_1p() / s + (t / s).ln_1p() / t);
    (lhs, LN_2 / (s * t).sqrt())
}

/// `½[log(1+s/t)/s + log(1+t/s)/t] ≤ log 2/√(st)`, with equality iff `s = t`.
///
/// Sides are compared after multiplying by `√(st)`. Equality is required
/// within the tolerance at `s = t` and a strictly positive gap once
/// `|log(s/t)| ≥ 0.1`.
pub fn check_log_inequality(s: f64, t: f64) -> Result<IdentityCheck> {
    positive("s", s)?;
    positive("t", t)?;
    let (lhs, rhs) = log_inequality_sides(s, t);
    let scale = (s * t).sqrt();
    let excess = (lhs - rhs) * scale;
    let (residual, tol) = if s == t {
        (excess.abs(), CLOSED_FORM_TOL)
    } else if (s / t).ln().abs() >= 0.1 {
        // strict: any non-negative excess fails
        (
            if excess < 0.0 {
                0.0
            } else {
                excess.max(f64::MIN_POSITIVE)
            },
            0.0,
        )
    } else {
        (excess.max(0.0), CLOSED_FORM_TOL)
    };
    Ok(IdentityCheck::new(
        "log_inequality",
        "(1/2)[log(1+s/t)/s + log(1+t/s)/t] <= log2/sqrt(st)",
        Lane::ClosedForm,
        json!({"s": s, "t": t}),
        lhs,
        rhs,
        residual,
        tol,
    ))
}

fn expansion_inputs(terms: &[(Complex64, f64)]) -> Value {
    json!({"terms": terms.iter().map(|(a, s)| json!([a.re, a.im, s])).collect::<Vec<_>>()})
}

fn bilinear<F: Fn(f64, f64) -> f64>(terms: &[(Complex64, f64)], entry: F) -> f64 {
    // Σ a_j conj(a_k) ⟨X k_{is_j}, X k_{is_k}⟩
    let mut acc = Complex64::new(0.0, 0.0);
    for &(a, s) in terms {
        for &(b, t) in terms {
            acc += a * b.conj() * entry(s, t);
        }
    }
    acc.re
}

/// `‖(C-I)f‖² = ‖(C*-I)f‖² = ‖f‖²` for a kernel expansion on the imaginary axis.
pub fn check_unitarity_on_expansion(f: &KernelExpansion) -> Result<(IdentityCheck, IdentityCheck)> {
    let terms = f.axis_terms()?;
    if terms.len() > 20 {
        return Err(Error::invalid("f", "at most 20 terms"));
    }
    let norm2 = f.norm_squared();
    if !(norm2 > 0.0) {
        return Err(Error::ZeroFunction);
    }
    let inputs = expansion_inputs(&terms);
    let c = bilinear(&terms, c_minus_i_entry);
    let cs = bilinear(&terms, cstar_minus_i_entry);
    Ok((
        IdentityCheck::new(
            "c_minus_i_isometry/expansion",
            "||(C-I)f||^2 = ||f||^2",
            Lane::ClosedForm,
            inputs.clone(),
            c,
            norm2,
            (c - norm2).abs() / norm2,
            1e-9,
        ),
        IdentityCheck::new(
            "cstar_minus_i_isometry/expansion",
            "||(C*-I)f||^2 = ||f||^2",
            Lane::ClosedForm,
            inputs,
            cs,
            norm2,
            (cs - norm2).abs() / norm2,
            1e-9,
        ),
    ))
}

/// Leading pivots of the Cholesky factorization of the kernel Gram matrix,
/// in closed form from the Cauchy determinant:
/// `d_k = (1/(4π s_k)) ∏_{j<k} ((s_k - s_j)/(s_k + s_j))²`.
pub fn gram_pivots(points: &[f64]) -> Vec<f64> {
    points
        .iter()
        .enumerate()
        .map(|(k, &sk)| {
            points[..k]
                .iter()
                .map(|&sj| ((sk - sj) / (sk + sj)).powi(2))
                .product::<f64>()
                / (4.0 * PI * sk)
        })
        .collect()
}

/// Kernels at `s_j = 1 + 1/j` are linearly independent: every Gram pivot is positive.
pub fn check_density_gram(n: usize) -> IdentityCheck {
    let s: Vec<f64> = (1..=n).map(|j| 1.0 + 1.0 / j as f64).collect();
    let min_pivot = gram_pivots(&s).into_iter().fold(f64::INFINITY, f64::min);
    IdentityCheck::new(
        "density_gram_positive",
        "kernels at points with a limit point are linearly independent",
        Lane::ClosedForm,
        json!({"points": s}),
        min_pivot,
        0.0,
        if min_pivot > 0.0 { 0.0 } else { 1.0 },
        0.0,
    )
}

fn relative(q: Complex64, c: Complex64) -> f64 {
    (q - c).norm() / c.norm()
}

/// Quadrature value of a pair inner product against its closed form.
pub fn check_pair_quadrature(
    kind: PairKind,
    s: f64,
    t: f64,
    spec: &QuadratureSpec,
    tol: f64,
) -> IdentityCheck {
    let name = format!("quadrature/{}", kind.label());
    let identity = match kind {
        PairKind::CesaroCesaro => "(1/4pi^2) int x^-2 Log(1-ix/s) Log(1+ix/t) dx = <Ck_is,Ck_it>",
        PairKind::CesaroKernel => "int_0^1 k_is(its) ds = <Ck_is,k_it>",
        PairKind::AdjointKernel => "(1/2pi i) int k_is(x) x^-1 Log(1-x/(it)) dx = <C*k_is,k_it>",
        PairKind::AdjointAdjoint => "boundary integral of C*k_is conj(C*k_it) = <C*k_is,C*k_it>",
    };
    let inputs = json!({"s": s, "t": t});
    let result = pair_inner_closed(kind, s, t)
        .and_then(|c| Ok((pair_inner_quadrature(kind, s, t, spec)?, c)));
    match result {
        Ok((q, c)) => {
            let c = Complex64::new(c, 0.0);
            IdentityCheck::new(
                name,
                identity,
                Lane::Quadrature,
                inputs,
                q,
                c,
                relative(q, c),
                tol,
            )
        }
        Err(e) => IdentityCheck::failed(name, identity, Lane::Quadrature, inputs, tol, &e),
    }
}

/// `‖Ck_{is}‖² = log 2/(πs)` by boundary quadrature.
pub fn check_cesaro_image_norm(s: f64, spec: &QuadratureSpec, tol: f64) -> IdentityCheck {
    let name = "quadrature/cesaro_image_norm";
    let identity = "||Ck_is||^2 = log2/(pi s)";
    let inputs = json!({"s": s});
    match positive("s", s).and_then(|_| cc_boundary_integral(s, s, spec)) {
        Ok(r) => {
            let c = LN_2 / (PI * s);
            IdentityCheck::new(
                name,
                identity,
                Lane::Quadrature,
                inputs,
                r.value,
                c,
                relative(r.value, c.into()),
                tol,
            )
        }
        Err(e) => IdentityCheck::failed(name, identity, Lane::Quadrature, inputs, tol, &e),
    }
}

/// Adjoint integral applied to the boundary trace of `k_anchor`, against the closed form.
pub fn check_adjoint_formula(
    anchor: HalfPlanePoint,
    z: HalfPlanePoint,
    spec: &QuadratureSpec,
    tol: f64,
) -> IdentityCheck {
    let name = "quadrature/adjoint_formula";
    let identity = "(1/2pi i) int f(t) t^-1 Log(1-t/z) dt = (C*k_a)(z)";
    let inputs = json!({"anchor": [anchor.re(), anchor.im()], "z": [z.re(), z.im()]});
    let f: FunctionHandle = KernelExpansion::kernel(anchor).into();
    let result = adjoint_on_kernel(anchor)
        .eval(z.value())
        .and_then(|c| Ok((adjoint_apply(&f, z, spec)?, c)));
    match result {
        Ok((q, c)) => IdentityCheck::new(
            name,
            identity,
            Lane::Quadrature,
            inputs,
            q,
            c,
            relative(q, c),
            tol,
        ),
        Err(e) => IdentityCheck::failed(name, identity, Lane::Quadrature, inputs, tol, &e),
    }
}

/// Cauchy integral of the boundary trace reproduces the interior value.
pub fn check_cauchy_reconstruction(
    f: &KernelExpansion,
    z: HalfPlanePoint,
    spec: &QuadratureSpec,
    tol: f64,
) -> IdentityCheck {
    let name = "quadrature/cauchy_reconstruction";
    let identity = "(1/2pi i) int f(t)/(t-z) dt = f(z)";
    let terms: Vec<Value> = f
        .terms()
        .iter()
        .map(|(a, w)| json!([a.re, a.im, w.re(), w.im()]))
        .collect();
    let inputs = json!({"terms": terms, "z": [z.re(), z.im()]});
    let exact = f.eval(z);
    let handle: FunctionHandle = f.clone().into();
    match cauchy_reconstruct(&handle, z, spec) {
        Ok(q) => IdentityCheck::new(
            name,
            identity,
            Lane::Quadrature,
            inputs,
            q,
            exact,
            relative(q, exact),
            tol,
        ),
        Err(e) => IdentityCheck::failed(name, identity, Lane::Quadrature, inputs, tol, &e),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteConfig {
    pub seed: u64,
    /// Points `s` for the pairwise checks, including the quadrature lane.
    pub grid: PointGrid,
    /// Overrides every quadrature-lane tolerance when set.
    pub quadrature_tol: Option<f64>,
    pub random_pairs: usize,
    pub random_expansions: usize,
    pub inequality_samples: usize,
    pub positivity_points: usize,
    pub quadrature: QuadratureSpec,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            grid: PointGrid::log(0.1, 10.0, 5).expect("valid default grid"),
            quadrature_tol: None,
            random_pairs: 100,
            random_expansions: 100,
            inequality_samples: 10_000,
            positivity_points: 20,
            quadrature: QuadratureSpec::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Default)]
pub struct LaneSummary {
    pub total: usize,
    pub passed: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
    pub closed_form: LaneSummary,
    pub quadrature: LaneSummary,
    pub all_passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub config: SuiteConfig,
    pub checks: Vec<IdentityCheck>,
    pub summary: Summary,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &IdentityCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn unit_disk(rng: &mut ChaCha8Rng) -> Complex64 {
    Complex64::from_polar(
        rng.random_range(0.0f64..1.0).sqrt(),
        rng.random_range(-PI..PI),
    )
}

fn random_point(rng: &mut ChaCha8Rng) -> HalfPlanePoint {
    HalfPlanePoint::new(rng.random_range(-2.0..2.0), log_uniform(rng, 0.1, 10.0))
        .expect("positive imaginary part")
}

/// Random kernel expansion on the imaginary axis with `1..=max_terms` terms,
/// `s ∈ [0.1, 10]` log-uniform and coefficients in the unit disk.
pub fn random_axis_expansion(rng: &mut ChaCha8Rng, max_terms: usize) -> KernelExpansion {
    let n = rng.random_range(1..=max_terms);
    let terms: Vec<(Complex64, f64)> = (0..n)
        .map(|_| (unit_disk(rng), log_uniform(rng, 0.1, 10.0)))
        .collect();
    KernelExpansion::on_axis(terms).expect("positive axis parameters")
}

/// Worst case of the log inequality over seeded log-uniform pairs in `[1e-3, 1e3]`.
fn log_inequality_batch(rng: &mut ChaCha8Rng, count: usize) -> IdentityCheck {
    let mut violations = 0usize;
    let mut worst: Option<(f64, f64, f64)> = None;
    for _ in 0..count {
        let s = log_uniform(rng, 1e-3, 1e3);
        let t = log_uniform(rng, 1e-3, 1e3);
        let check = check_log_inequality(s, t).expect("positive samples");
        if !check.passed {
            violations += 1;
        }
        let excess = (check.lhs.re() - check.rhs.re()) * (s * t).sqrt();
        if worst.is_none_or(|w| excess > w.2) {
            worst = Some((s, t, excess));
        }
    }
    let (s, t) = worst.map_or((1.0, 1.0), |w| (w.0, w.1));
    let (lhs, rhs) = log_inequality_sides(s, t);
    IdentityCheck::new(
        "log_inequality/random",
        "(1/2)[log(1+s/t)/s + log(1+t/s)/t] <= log2/sqrt(st)",
        Lane::ClosedForm,
        json!({"samples": count, "worst_s": s, "worst_t": t, "violations": violations}),
        lhs,
        rhs,
        violations as f64,
        0.0,
    )
}

fn push<F>(out: &mut Vec<IdentityCheck>, name: &str, identity: &str, inputs: Value, f: F)
where
    F: FnOnce() -> Result<IdentityCheck>,
{
    out.push(f().unwrap_or_else(|e| {
        IdentityCheck::failed(name, identity, Lane::ClosedForm, inputs, 0.0, &e)
    }));
}

/// Runs every check. Failures are recorded, never raised; the result is a
/// deterministic function of the config.
pub fn run_suite(config: &SuiteConfig) -> Result<VerificationReport> {
    config.quadrature.validate()?;
    if let Some(tol) = config.quadrature_tol {
        if !(tol >= 0.0) {
            return Err(Error::invalid("tol", format!("must be >= 0, got {tol}")));
        }
    }
    let qtol = |default: f64| config.quadrature_tol.unwrap_or(default);
    let spec = &config.quadrature;
    let grid = config.grid.values();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut checks = Vec::new();

    for &s in &grid {
        for &t in &grid {
            let inputs = json!({"s": s, "t": t});
            push(
                &mut checks,
                "c_minus_i_isometry/pair",
                "",
                inputs.clone(),
                || check_c_minus_i_isometry(s, t),
            );
            push(
                &mut checks,
                "cstar_minus_i_isometry/pair",
                "",
                inputs.clone(),
                || check_cstar_minus_i_isometry(s, t),
            );
            push(
                &mut checks,
                "cc_equals_cstarcstar",
                "",
                inputs.clone(),
                || check_cc_equals_cstarcstar(s, t),
            );
            push(
                &mut checks,
                "cstarc_equals_c_plus_cstar",
                "",
                inputs.clone(),
                || check_cstarc_identity(s, t),
            );
            push(&mut checks, "log_inequality", "", inputs, || {
                check_log_inequality(s, t)
            });
            for kind in PairKind::ALL {
                checks.push(check_pair_quadrature(kind, s, t, spec, qtol(1e-8)));
            }
        }
    }

    for _ in 0..config.random_pairs {
        let s = log_uniform(&mut rng, 0.1, 10.0);
        let t = log_uniform(&mut rng, 0.1, 10.0);
        push(
            &mut checks,
            "cstarc_equals_c_plus_cstar",
            "",
            json!({"s": s, "t": t}),
            || check_cstarc_identity(s, t),
        );
    }

    for _ in 0..config.random_expansions {
        let f = random_axis_expansion(&mut rng, 10);
        match check_unitarity_on_expansion(&f) {
            Ok((a, b)) => {
                checks.push(a);
                checks.push(b);
            }
            Err(e) => checks.push(IdentityCheck::failed(
                "c_minus_i_isometry/expansion",
                "",
                Lane::ClosedForm,
                Value::Null,
                1e-9,
                &e,
            )),
        }
    }

    let mut pos: Vec<f64> = (0..config.positivity_points)
        .map(|_| log_uniform(&mut rng, 0.1, 10.0))
        .collect();
    pos.sort_by(f64::total_cmp);
    let pos_points: Result<Vec<ImaginaryAxisPoint>> =
        pos.iter().map(|&s| ImaginaryAxisPoint::new(s)).collect();
    push(
        &mut checks,
        "c_plus_cstar_positive",
        "",
        json!({"points": pos}),
        || check_positivity(&pos_points?),
    );

    checks.push(log_inequality_batch(&mut rng, config.inequality_samples));
    checks.push(check_density_gram(12));

    for s in [0.1, 1.0, 10.0] {
        checks.push(check_cesaro_image_norm(s, spec, qtol(1e-8)));
    }
    for _ in 0..10 {
        let anchor = random_point(&mut rng);
        let z = random_point(&mut rng);
        checks.push(check_adjoint_formula(anchor, z, spec, qtol(1e-7)));
    }
    for _ in 0..10 {
        let terms: Vec<(Complex64, HalfPlanePoint)> = (0..3)
            .map(|_| (unit_disk(&mut rng), random_point(&mut rng)))
            .collect();
        let f = KernelExpansion::new(terms);
        let z = random_point(&mut rng);
        checks.push(check_cauchy_reconstruction(&f, z, spec, qtol(1e-6)));
    }

    checks.sort_by(|a, b| a.name.cmp(&b.name));
    let summary = summarize(&checks);
    Ok(VerificationReport {
        config: config.clone(),
        checks,
        summary,
    })
}

fn summarize(checks: &[IdentityCheck]) -> Summary {
    let mut closed_form = LaneSummary::default();
    let mut quadrature = LaneSummary::default();
    for c in checks {
        let lane = match c.lane {
            Lane::ClosedForm => &mut closed_form,
            Lane::Quadrature => &mut quadrature,
        };
        lane.total += 1;
        lane.passed += usize::from(c.passed);
    }
    let passed = closed_form.passed + quadrature.passed;
    Summary {
        total: checks.len(),
        passed,
        failed: checks.len() - passed,
        closed_form,
        quadrature,
        all_passed: passed == checks.len(),
    }
}
