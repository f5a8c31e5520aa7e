//! H^p norms, the ray norm, the β-family bound on `‖C‖_p` and empirical
//! ratios `‖Cf‖_p / ‖f‖_p`.

use std::cell::RefCell;
use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfplane::{HalfPlanePoint, KernelExpansion};
use crate::operators::{
    cesaro_expansion_closed, cesaro_expansion_envelope, pair_inner_closed, BlackBox,
    FunctionHandle, PairKind,
};
use crate::quadrature::{
    graded_breaks, integrate_half_line, integrate_interval, integrate_real_line_with_breaks,
    integrate_unit_interval_with_breaks, segment_breaks, DecayEnvelope, QuadratureSpec,
};

/// Exponent `p` of H^p, finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct ExponentP(f64);

impl ExponentP {
    /// `1 ≤ p < ∞`, enough for norm computation.
    pub fn new(p: f64) -> Result<Self> {
        if !(p >= 1.0 && p.is_finite()) {
            return Err(Error::invalid("p", format!("need 1 <= p < inf, got {p}")));
        }
        Ok(Self(p))
    }

    /// `1 < p < ∞`, the range where `C` is bounded.
    pub fn for_bound(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return Err(Error::invalid("p", format!("need 1 < p < inf, got {p}")));
        }
        Ok(Self(p))
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    /// `q` with `1/p + 1/q = 1`; infinite for `p = 1`.
    pub fn conjugate(&self) -> f64 {
        if self.0 == 1.0 {
            f64::INFINITY
        } else {
            self.0 / (self.0 - 1.0)
        }
    }

    fn is_two(&self) -> bool {
        self.0 == 2.0
    }
}

/// `β` with `0 < β < (p-1)/p`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BetaParameter {
    beta: f64,
    p: ExponentP,
}

impl BetaParameter {
    pub fn new(beta: f64, p: ExponentP) -> Result<Self> {
        if p.value() <= 1.0 {
            return Err(Error::invalid("p", "the beta family needs p > 1"));
        }
        let hi = (p.value() - 1.0) / p.value();
        if !(beta > 0.0 && beta < hi) {
            return Err(Error::invalid(
                "beta",
                format!("need 0 < beta < {hi}, got {beta}"),
            ));
        }
        Ok(Self { beta, p })
    }

    pub fn value(&self) -> f64 {
        self.beta
    }
}

/// `(1 - βq)^(-1/q) · (βp)^(-1/p)`, an upper bound on `‖C‖_p` for each β.
pub fn beta_bound(beta: BetaParameter) -> f64 {
    log_beta_bound(beta.beta, beta.p.value()).exp()
}

fn log_beta_bound(beta: f64, p: f64) -> f64 {
    let q = p / (p - 1.0);
    -(-beta * q).ln_1p() / q - (beta * p).ln() / p
}

/// Minimizes [`beta_bound`] over the open β-interval by bisection on the
/// derivative of its logarithm, `1/(1 - βq) - 1/(pβ)`, which is increasing.
pub fn optimize_beta_bound(p: ExponentP) -> Result<(f64, f64)> {
    let pv = p.value();
    if pv <= 1.0 {
        return Err(Error::invalid("p", "the beta family needs p > 1"));
    }
    let q = pv / (pv - 1.0);
    let slope = |b: f64| 1.0 / (1.0 - b * q) - 1.0 / (pv * b);
    let (mut lo, mut hi) = (0.0, 1.0 / q);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if slope(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let beta = 0.5 * (lo + hi);
    Ok((beta, log_beta_bound(beta, pv).exp()))
}

fn line_features(f: &FunctionHandle) -> Vec<f64> {
    f.feature_points()
}

fn power_envelope(f: &FunctionHandle, p: ExponentP) -> Result<DecayEnvelope> {
    let env = f.envelope().pow(p.value());
    env.check_integrable()?;
    Ok(env)
}

/// `(∫_ℝ |f(t)|^p dt)^(1/p)` by quadrature of the boundary trace.
pub fn hp_norm_boundary(f: &FunctionHandle, p: ExponentP, spec: &QuadratureSpec) -> Result<f64> {
    if !f.has_boundary() {
        return Err(Error::MissingBoundary);
    }
    if f.is_known_zero() {
        return Ok(0.0);
    }
    let env = power_envelope(f, p)?;
    let pv = p.value();
    let g = |t: f64| {
        let v = f
            .boundary_eval(t)
            .map(|v| v.norm().powf(pv))
            .unwrap_or(f64::NAN);
        Complex64::new(v, 0.0)
    };
    let r = integrate_real_line_with_breaks(&g, &env, &line_features(f), spec)?;
    Ok(r.value.re.max(0.0).powf(1.0 / pv))
}

/// H^p norm; kernel expansions at `p = 2` use the exact Gram form.
pub fn hp_norm(f: &FunctionHandle, p: ExponentP, spec: &QuadratureSpec) -> Result<f64> {
    match f {
        FunctionHandle::Expansion(e) if p.is_two() => Ok(e.norm_squared().sqrt()),
        _ => hp_norm_boundary(f, p, spec),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LineIntegral {
    pub y: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct YScan {
    /// `(max over the grid and the boundary)^(1/p)`.
    pub norm: f64,
    /// `∫ |f(x + iy)|^p dx` per grid height, sorted by `y`.
    pub lines: Vec<LineIntegral>,
    /// The `y → 0` value, when a boundary trace exists.
    pub boundary: Option<f64>,
    /// Whether line values are nonincreasing in `y` (within 1e-10).
    pub nonincreasing: bool,
}

/// Line integrals of `|f|^p` on horizontal lines; the supremum in the H^p
/// norm is taken over the grid plus the boundary value.
pub fn hp_norm_yscan(
    f: &FunctionHandle,
    p: ExponentP,
    y_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<YScan> {
    if y_grid.iter().any(|&y| !(y > 0.0 && y.is_finite())) {
        return Err(Error::invalid("y_grid", "heights must be finite and > 0"));
    }
    let pv = p.value();
    let mut ys = y_grid.to_vec();
    ys.sort_by(f64::total_cmp);
    ys.dedup();

    let boundary = if f.has_boundary() {
        let n = hp_norm_boundary(f, p, spec)?;
        Some(n.powf(pv))
    } else {
        None
    };
    let mut lines = Vec::with_capacity(ys.len());
    if f.is_known_zero() {
        lines.extend(ys.iter().map(|&y| LineIntegral { y, value: 0.0 }));
    } else {
        let env = power_envelope(f, p)?;
        for &y in &ys {
            let g = |x: f64| Complex64::new(f.eval(Complex64::new(x, y)).norm().powf(pv), 0.0);
            let r = integrate_real_line_with_breaks(&g, &env, &line_features(f), spec)?;
            lines.push(LineIntegral {
                y,
                value: r.value.re.max(0.0),
            });
        }
    }
    let mut sequence: Vec<f64> = boundary.into_iter().collect();
    sequence.extend(lines.iter().map(|l| l.value));
    let nonincreasing = sequence
        .windows(2)
        .all(|w| w[1] <= w[0] + 1e-10 * w[0].abs().max(1e-2));
    let sup = sequence.iter().copied().fold(0.0, f64::max);
    Ok(YScan {
        norm: sup.powf(1.0 / pv),
        lines,
        boundary,
        nonincreasing,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RayScan {
    pub norm: f64,
    /// `(θ, ∫_0^∞ |f(r e^{iθ})|^p dr)`.
    pub rays: Vec<(f64, f64)>,
}

/// `(sup_θ ∫_0^∞ |f(r e^{iθ})|^p dr)^(1/p)` with the sup over a grid in `(0, π)`.
pub fn ray_norm(
    f: &FunctionHandle,
    p: ExponentP,
    t_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<RayScan> {
    if t_grid.iter().any(|&t| !(t > 0.0 && t < PI)) {
        return Err(Error::invalid("t_grid", "angles must lie in (0, pi)"));
    }
    let pv = p.value();
    let mut rays = Vec::with_capacity(t_grid.len());
    for &theta in t_grid {
        let value = if f.is_known_zero() {
            0.0
        } else {
            let env = power_envelope(f, p)?;
            let dir = Complex64::from_polar(1.0, theta);
            let g = |r: f64| Complex64::new(f.eval(dir * r).norm().powf(pv), 0.0);
            integrate_half_line(&g, &env, &[], spec)?.value.re.max(0.0)
        };
        rays.push((theta, value));
    }
    let sup = rays.iter().map(|r| r.1).fold(0.0, f64::max);
    Ok(RayScan {
        norm: sup.powf(1.0 / pv),
        rays,
    })
}

/// `‖f‖*_2 / ‖f‖_2` for seeded random kernel expansions. Report only.
pub fn ray_ratio_report(
    count: usize,
    seed: u64,
    t_grid: &[f64],
    spec: &QuadratureSpec,
) -> Result<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = ExponentP::new(2.0)?;
    (0..count)
        .map(|_| {
            let n = rng.random_range(1..=4);
            let terms = (0..n)
                .map(|_| {
                    let a =
                        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                    let z = HalfPlanePoint::new(
                        rng.random_range(-2.0..2.0),
                        10f64.powf(rng.random_range(-1.0..1.0)),
                    )?;
                    Ok((a, z))
                })
                .collect::<Result<Vec<_>>>()?;
            let f: FunctionHandle = KernelExpansion::new(terms).into();
            let star = ray_norm(&f, p, t_grid, spec)?.norm;
            Ok(star / hp_norm(&f, p, spec)?)
        })
        .collect()
}

/// `(Cf)(x) = ∫_0^1 f(xs) ds` on the real line from a boundary trace.
fn cesaro_boundary_quadrature(
    f: &FunctionHandle,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<Complex64> {
    let g = |s: f64| {
        f.boundary_eval(x * s)
            .unwrap_or(Complex64::new(f64::NAN, f64::NAN))
    };
    let breaks = segment_breaks(x.abs() / f.feature_scale());
    Ok(integrate_unit_interval_with_breaks(&g, &breaks, spec)?.value)
}

/// Majorant of `|Cf|` on ℝ from that of `|f|`:
/// `|Cf(x)| ≤ (∫_{|t|≤R}|f| + ∫_{R≤|t|≤|x|}|f|) / |x|`.
fn cesaro_blackbox_envelope(
    b: &BlackBox,
    f: &FunctionHandle,
    spec: &QuadratureSpec,
) -> Result<DecayEnvelope> {
    let env = b.decay();
    if env.exponent < 1.0 {
        return Err(Error::NonIntegrableEnvelope(
            "|f| must decay at least like 1/|t| to bound Cf".into(),
        ));
    }
    let r0 = env.min_radius().max(E * E);
    let g = |t: f64| {
        Complex64::new(
            f.boundary_eval(t).map(|v| v.norm()).unwrap_or(f64::NAN),
            0.0,
        )
    };
    let mut breaks = graded_breaks(0.0, -r0, r0);
    breaks.push(0.0);
    let near = integrate_interval(&g, -r0, r0, &breaks, spec)?;
    let near = (near.value.re + near.error_estimate) * (1.0 + 1e-6);
    if env.exponent > 1.0 {
        Ok(DecayEnvelope::power(
            near + 2.0 * env.tail_mass(r0),
            1.0,
            r0,
        ))
    } else {
        // ∫_R^|x| C (ln t)^k / t dt = C ((ln|x|)^(k+1) - (ln R)^(k+1)) / (k+1)
        let k = env.log_power;
        let l0 = r0.ln();
        let c = near / l0.powf(k + 1.0) + 2.0 * env.constant / (k + 1.0);
        Ok(DecayEnvelope::with_log(c, 1.0, k + 1.0, r0))
    }
}

/// `‖Cf‖_p` from the boundary trace of `Cf`.
pub fn cesaro_norm(f: &FunctionHandle, p: ExponentP, spec: &QuadratureSpec) -> Result<f64> {
    if !f.has_boundary() {
        return Err(Error::MissingBoundary);
    }
    let pv = p.value();
    if let (FunctionHandle::Expansion(e), true) = (f, p.is_two()) {
        if let Ok(terms) = e.axis_terms() {
            let mut acc = Complex64::new(0.0, 0.0);
            for &(a, s) in &terms {
                for &(b, t) in &terms {
                    acc += a * b.conj() * pair_inner_closed(PairKind::CesaroCesaro, s, t)?;
                }
            }
            return Ok(acc.re.max(0.0).sqrt());
        }
    }
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let record = |e: Error| {
        failure.borrow_mut().get_or_insert(e);
        f64::NAN
    };
    let value = match f {
        FunctionHandle::Expansion(e) => {
            let env = cesaro_expansion_envelope(e).pow(pv);
            let g = |x: f64| {
                let v = cesaro_expansion_closed(e, Complex64::new(x, 0.0))
                    .map(|v| v.norm().powf(pv))
                    .unwrap_or_else(record);
                Complex64::new(v, 0.0)
            };
            env.check_integrable()?;
            integrate_real_line_with_breaks(&g, &env, &f.feature_points(), spec)
        }
        FunctionHandle::BlackBox(b) => {
            let env = cesaro_blackbox_envelope(b, f, spec)?.pow(pv);
            env.check_integrable()?;
            let g = |x: f64| {
                let v = cesaro_boundary_quadrature(f, x, spec)
                    .map(|v| v.norm().powf(pv))
                    .unwrap_or_else(record);
                Complex64::new(v, 0.0)
            };
            integrate_real_line_with_breaks(&g, &env, &[], spec)
        }
    };
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(value?.value.re.max(0.0).powf(1.0 / pv))
}

/// `‖Cf‖_p / ‖f‖_p`, bounded above by `p/(p-1)`.
pub fn cesaro_ratio(f: &FunctionHandle, p: ExponentP, spec: &QuadratureSpec) -> Result<f64> {
    if f.is_known_zero() {
        return Err(Error::ZeroFunction);
    }
    let denom = hp_norm(f, p, spec)?;
    if !(denom > 0.0) {
        return Err(Error::ZeroFunction);
    }
    Ok(cesaro_norm(f, p, spec)? / denom)
}

/// `1/(z+i)^k` as a black box with boundary trace.
pub fn inverse_power_of_z_plus_i(k: i32) -> FunctionHandle {
    let i = Complex64::new(0.0, 1.0);
    // |t + i|^-k ≤ |t|^-k
    BlackBox::new(
        move |z: Complex64| (z + i).powi(-k),
        DecayEnvelope::power(1.0, f64::from(k), 1.0),
    )
    .with_boundary(move |t: f64| Complex64::new(t, 1.0).powi(-k))
    .into()
}

/// Functions used for the empirical `‖Cf‖_p / ‖f‖_p` study.
pub fn ratio_test_family() -> Result<Vec<(String, FunctionHandle)>> {
    let c = Complex64::new;
    let mut out: Vec<(String, FunctionHandle)> = Vec::new();
    for s in [0.1, 1.0, 10.0] {
        out.push((
            format!("k_i{s}"),
            KernelExpansion::kernel(HalfPlanePoint::on_axis(s)?).into(),
        ));
    }
    out.push((
        "k_i - 0.5 k_3i".into(),
        KernelExpansion::on_axis([(c(1.0, 0.0), 1.0), (c(-0.5, 0.0), 3.0)])?.into(),
    ));
    out.push((
        "k_(1+2i) + (0.3+0.2i) k_(-0.5+0.5i)".into(),
        KernelExpansion::new([
            (c(1.0, 0.0), HalfPlanePoint::new(1.0, 2.0)?),
            (c(0.3, 0.2), HalfPlanePoint::new(-0.5, 0.5)?),
        ])
        .into(),
    ));
    out.push(("1/(z+i)".into(), inverse_power_of_z_plus_i(1)));
    out.push(("1/(z+i)^2".into(), inverse_power_of_z_plus_i(2)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H1Row {
    pub radius: f64,
    /// `∫_{|x|≤R} |Cf(x)| dx` by quadrature.
    pub integral: f64,
    /// `2·asinh(R)`, the exact value for `Cf = -i/(z+i)`.
    pub closed_form: f64,
    /// Growth since the previous row.
    pub increment: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct H1Report {
    /// `‖f‖_1` for `f = (z+i)^-2`; equals π.
    pub f_norm: f64,
    pub rows: Vec<H1Row>,
}

/// `C` is unbounded on H¹: for `f = (z+i)^-2`, `‖f‖_1 = π` while
/// `∫_{|x|≤R} |Cf|` grows like `2 log R`.
pub fn h1_counterexample_report(r_grid: &[f64], spec: &QuadratureSpec) -> Result<H1Report> {
    if r_grid.iter().any(|&r| !(r > 1.0 && r.is_finite())) {
        return Err(Error::invalid("R_grid", "radii must be finite and > 1"));
    }
    if r_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("R_grid", "radii must be increasing"));
    }
    let f = inverse_power_of_z_plus_i(2);
    let f_norm = hp_norm_boundary(&f, ExponentP::new(1.0)?, spec)?;
    let failure: RefCell<Option<Error>> = RefCell::new(None);
    let g = |x: f64| {
        let v = cesaro_boundary_quadrature(&f, x, spec)
            .map(|v| v.norm())
            .unwrap_or_else(|e| {
                failure.borrow_mut().get_or_insert(e);
                f64::NAN
            });
        Complex64::new(v, 0.0)
    };
    let mut rows: Vec<H1Row> = Vec::with_capacity(r_grid.len());
    for &radius in r_grid {
        let mut breaks = graded_breaks(0.0, -radius, radius);
        breaks.push(0.0);
        let r = integrate_interval(&g, -radius, radius, &breaks, spec);
        if let Some(e) = failure.borrow_mut().take() {
            return Err(e);
        }
        let integral = r?.value.re;
        let increment = rows.last().map(|prev| integral - prev.integral);
        rows.push(H1Row {
            radius,
            integral,
            closed_form: 2.0 * radius.asinh(),
            increment,
        });
    }
    Ok(H1Report { f_norm, rows })
}
