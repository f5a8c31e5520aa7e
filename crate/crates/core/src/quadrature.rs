//! Deterministic adaptive Gauss–Legendre quadrature for complex-valued
//! integrands on finite intervals, straight segments in ℂ, half-lines and the
//! real line.
//!
//! Each panel carries two estimates: the Gauss rule on the panel and the same
//! rule on its two halves. Their difference is the panel error estimate and
//! the finer value is the one accumulated. The worst panel is bisected until
//! the summed estimate plus the tail bound fits `max(abs_tol, rel_tol·|I|)`.
//!
//! Infinite ranges are cut at a truncation radius chosen from the caller's
//! [`DecayEnvelope`] so that the discarded mass is provably below a quarter
//! of the tolerance. The range between `tail_radius` and that cut is
//! partitioned by decades and integrated like any other panel.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};

/// Hard cap on live panels in one integration.
pub const MAX_PANELS: usize = 200_000;

/// Smallest decade exponent used when grading a partition toward a break.
const GRADING_MIN_EXP: i32 = -3;
/// Largest abscissa considered when extending a truncation radius.
const MAX_RADIUS: f64 = 1e300;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Maximum bisection depth of any panel.
    pub max_subdivisions: u32,
    /// Radius of the core interval `[-R, R]`; the tails beyond it are graded
    /// by decades out to the envelope-controlled truncation radius.
    pub tail_radius: f64,
    /// Gauss–Legendre nodes per panel.
    pub gl_order: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-12,
            max_subdivisions: 60,
            tail_radius: 1e6,
            gl_order: 15,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0) {
            return Err(Error::invalid("rel_tol", "must be > 0"));
        }
        if !(self.abs_tol > 0.0) {
            return Err(Error::invalid("abs_tol", "must be > 0"));
        }
        if self.gl_order < 2 {
            return Err(Error::invalid("gl_order", "must be >= 2"));
        }
        if !(self.tail_radius > 0.0) || !self.tail_radius.is_finite() {
            return Err(Error::invalid("tail_radius", "must be finite and > 0"));
        }
        Ok(())
    }

    /// Same spec with both tolerances multiplied by `factor`.
    pub fn scaled_tolerances(&self, factor: f64) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            abs_tol: self.abs_tol * factor,
            ..*self
        }
    }

    fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub panels_used: usize,
    /// Bound on the integral mass discarded beyond `truncation_radius`.
    pub tail_bound: f64,
    /// Where an infinite range was cut; `0` for finite ranges.
    pub truncation_radius: f64,
}

impl QuadratureResult {
    pub fn total_error(&self) -> f64 {
        self.error_estimate + self.tail_bound
    }
}

/// Majorant `|g(x)| ≤ C·(ln|x|)^k / |x|^α` valid for `|x| ≥ valid_from`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayEnvelope {
    pub constant: f64,
    pub exponent: f64,
    pub log_power: f64,
    pub valid_from: f64,
}

impl DecayEnvelope {
    pub fn power(constant: f64, exponent: f64, valid_from: f64) -> Self {
        Self {
            constant,
            exponent,
            log_power: 0.0,
            valid_from,
        }
    }

    pub fn with_log(constant: f64, exponent: f64, log_power: f64, valid_from: f64) -> Self {
        Self {
            constant,
            exponent,
            log_power,
            valid_from,
        }
    }

    pub fn bound(&self, x: f64) -> f64 {
        let x = x.abs();
        let log_factor = if self.log_power == 0.0 {
            1.0
        } else {
            x.ln().max(0.0).powf(self.log_power)
        };
        self.constant * log_factor / x.powf(self.exponent)
    }

    /// Envelope of `|g|^p`.
    pub fn pow(&self, p: f64) -> Self {
        Self {
            constant: self.constant.powf(p),
            exponent: self.exponent * p,
            log_power: self.log_power * p,
            valid_from: self.valid_from,
        }
    }

    /// Envelope of the product of two majorized functions.
    pub fn times(&self, other: &DecayEnvelope) -> Self {
        Self {
            constant: self.constant * other.constant,
            exponent: self.exponent + other.exponent,
            log_power: self.log_power + other.log_power,
            valid_from: self.valid_from.max(other.valid_from),
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            constant: self.constant * factor.abs(),
            ..*self
        }
    }

    pub fn check_integrable(&self) -> Result<()> {
        if !(self.exponent > 1.0) {
            return Err(Error::NonIntegrableEnvelope(format!(
                "exponent {} must exceed 1",
                self.exponent
            )));
        }
        if !(self.constant >= 0.0) || !self.constant.is_finite() {
            return Err(Error::NonIntegrableEnvelope(format!(
                "constant {} must be finite and non-negative",
                self.constant
            )));
        }
        if !(self.log_power >= 0.0) || !(self.valid_from >= 0.0) {
            return Err(Error::NonIntegrableEnvelope(
                "log power and validity radius must be non-negative".into(),
            ));
        }
        Ok(())
    }

    /// Smallest radius from which [`Self::tail_mass`] is valid.
    pub fn min_radius(&self) -> f64 {
        if self.log_power > 0.0 {
            self.valid_from.max(E)
        } else {
            self.valid_from
        }
    }

    /// Upper bound on `∫_r^∞ C (ln x)^k x^(-α) dx` for `r ≥ min_radius()`.
    ///
    /// Integer `k` is exact; fractional `k` is bounded by `⌈k⌉`, valid since
    /// `ln x ≥ 1` there.
    pub fn tail_mass(&self, r: f64) -> f64 {
        debug_assert!(r >= self.min_radius());
        let beta = self.exponent - 1.0;
        let m = self.log_power.ceil() as u32;
        let l = if m == 0 { 0.0 } else { r.ln() };
        // ∫_r^∞ (ln x)^m x^(-1-β) dx = r^(-β) Σ_j m!/(m-j)! · l^(m-j) / β^(j+1)
        let mut sum = 0.0;
        let mut falling = 1.0;
        for j in 0..=m {
            if j > 0 {
                falling *= f64::from(m - j + 1);
            }
            sum += falling * l.powi((m - j) as i32) / beta.powi(j as i32 + 1);
        }
        // rounded up so the bound survives floating-point comparison
        self.constant * sum * r.powf(-beta) * (1.0 + 1e-12)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let nf = n as f64;
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, p_prev) = legendre_pair(n, x);
                dp = nf * (x * p - p_prev) / (x * x - 1.0);
                let dx = p / dp;
                x -= dx;
                if dx.abs() <= 1e-16 {
                    let (p, p_prev) = legendre_pair(n, x);
                    dp = nf * (x * p - p_prev) / (x * x - 1.0);
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        Self { nodes, weights }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Single-panel rule on `[a, b]`. Nodes are strictly interior.
    pub fn apply<G: Fn(f64) -> Complex64 + ?Sized>(&self, g: &G, a: f64, b: f64) -> Complex64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = Complex64::new(0.0, 0.0);
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc += *w * g(mid + half * x);
        }
        acc * half
    }
}

fn legendre_pair(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        (1.0, 0.0)
    } else {
        (p1, p0)
    }
}

/// Non-adaptive composite rule: `panels` equal panels of `order` nodes.
pub fn composite_gauss_legendre<G: Fn(f64) -> Complex64>(
    g: G,
    a: f64,
    b: f64,
    panels: usize,
    order: usize,
) -> Complex64 {
    let rule = GaussLegendre::new(order);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|k| rule.apply(&g, a + h * k as f64, a + h * (k + 1) as f64))
        .sum()
}

struct Panel {
    a: f64,
    b: f64,
    depth: u32,
    left: Complex64,
    right: Complex64,
    err: f64,
    id: u64,
}

impl Panel {
    fn fine(&self) -> Complex64 {
        self.left + self.right
    }
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.err
            .total_cmp(&other.err)
            .then_with(|| other.id.cmp(&self.id))
    }
}

struct Engine<'a, G: ?Sized> {
    g: &'a G,
    rule: GaussLegendre,
    next_id: u64,
}

impl<'a, G: Fn(f64) -> Complex64 + ?Sized> Engine<'a, G> {
    fn panel(&mut self, a: f64, b: f64, depth: u32, coarse: Complex64) -> Panel {
        let m = 0.5 * (a + b);
        let left = self.rule.apply(self.g, a, m);
        let right = self.rule.apply(self.g, m, b);
        let err = (left + right - coarse).norm();
        let id = self.next_id;
        self.next_id += 1;
        Panel {
            a,
            b,
            depth,
            left,
            right,
            err: if err.is_nan() { f64::INFINITY } else { err },
            id,
        }
    }
}

fn adaptive<G: Fn(f64) -> Complex64 + ?Sized>(
    g: &G,
    breaks: &[f64],
    spec: &QuadratureSpec,
    tail_bound: f64,
    truncation_radius: f64,
) -> Result<QuadratureResult> {
    spec.validate()?;
    let mut engine = Engine {
        g,
        rule: GaussLegendre::new(spec.gl_order),
        next_id: 0,
    };
    let mut heap = BinaryHeap::new();
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        if b > a {
            let coarse = engine.rule.apply(g, a, b);
            heap.push(engine.panel(a, b, 0, coarse));
        }
    }

    let sums = |heap: &BinaryHeap<Panel>| {
        let mut panels: Vec<&Panel> = heap.iter().collect();
        panels.sort_by(|p, q| p.a.total_cmp(&q.a));
        let value: Complex64 = panels.iter().map(|p| p.fine()).sum();
        let err: f64 = panels.iter().map(|p| p.err).sum();
        (value, err)
    };

    let (mut value, mut err) = sums(&heap);
    let mut iterations = 0usize;
    loop {
        if err + tail_bound <= spec.target(value) {
            break;
        }
        let exhausted = match heap.peek() {
            None => true,
            Some(top) => {
                let m = 0.5 * (top.a + top.b);
                top.depth >= spec.max_subdivisions
                    || heap.len() >= MAX_PANELS
                    || !(top.a < m && m < top.b)
                    || !top.err.is_finite()
            }
        };
        if exhausted {
            let (value, err) = sums(&heap);
            let best = QuadratureResult {
                value,
                error_estimate: err,
                panels_used: heap.len(),
                tail_bound,
                truncation_radius,
            };
            if err + tail_bound <= spec.target(value) {
                return Ok(best);
            }
            return Err(Error::NotConverged { best });
        }
        let top = heap.pop().expect("heap is non-empty");
        let m = 0.5 * (top.a + top.b);
        let l = engine.panel(top.a, m, top.depth + 1, top.left);
        let r = engine.panel(m, top.b, top.depth + 1, top.right);
        value += l.fine() + r.fine() - top.fine();
        err += l.err + r.err - top.err;
        heap.push(l);
        heap.push(r);
        iterations += 1;
        if iterations.is_multiple_of(64) {
            (value, err) = sums(&heap);
        }
    }
    let (value, err) = sums(&heap);
    Ok(QuadratureResult {
        value,
        error_estimate: err,
        panels_used: heap.len(),
        tail_bound,
        truncation_radius,
    })
}

fn sorted_breaks(mut pts: Vec<f64>) -> Vec<f64> {
    pts.retain(|x| x.is_finite());
    pts.sort_by(f64::total_cmp);
    pts.dedup();
    pts
}

/// Decade grading `±10^k` toward `center` inside `(lo, hi)`.
pub(crate) fn graded_breaks(center: f64, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    let reach = (hi - center).max(center - lo);
    if reach <= 0.0 {
        return out;
    }
    let top = reach.log10().floor() as i32;
    for k in GRADING_MIN_EXP..=top {
        let d = 10f64.powi(k);
        for x in [center - d, center + d] {
            if x > lo && x < hi {
                out.push(x);
            }
        }
    }
    out
}

/// `∫_a^b g(x) dx` with optional interior breakpoints.
pub fn integrate_interval<G: Fn(f64) -> Complex64 + ?Sized>(
    g: &G,
    a: f64,
    b: f64,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::invalid("interval", "endpoints must be finite"));
    }
    if a == b {
        return Ok(QuadratureResult {
            value: Complex64::new(0.0, 0.0),
            error_estimate: 0.0,
            panels_used: 0,
            tail_bound: 0.0,
            truncation_radius: 0.0,
        });
    }
    if a > b {
        let mut r = integrate_interval(g, b, a, breaks, spec)?;
        r.value = -r.value;
        return Ok(r);
    }
    let mut pts = vec![a, b];
    pts.extend(breaks.iter().copied().filter(|&x| x > a && x < b));
    adaptive(g, &sorted_breaks(pts), spec, 0.0, 0.0)
}

/// `∫_0^1 g(s) ds`. Endpoint singularities `|g(s)| ≤ C s^(-α)`, `α < 1`,
/// are resolved by bisection; nodes never touch 0 or 1.
pub fn integrate_unit_interval<G: Fn(f64) -> Complex64 + ?Sized>(
    g: &G,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    integrate_interval(g, 0.0, 1.0, &[], spec)
}

pub fn integrate_unit_interval_with_breaks<G: Fn(f64) -> Complex64 + ?Sized>(
    g: &G,
    breaks: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    integrate_interval(g, 0.0, 1.0, breaks, spec)
}

/// Breakpoints in `s` for the segment `ζ = z s` so that panels resolve
/// features of size ~1 near the origin when `|z|` is large.
pub fn segment_breaks(z_modulus: f64) -> Vec<f64> {
    if !(z_modulus > 1.0) {
        return Vec::new();
    }
    graded_breaks(0.0, 0.0, z_modulus)
        .into_iter()
        .filter(|&x| x > 0.0)
        .map(|x| x / z_modulus)
        .collect()
}

/// `∫_[0,z] g(ζ) dζ` along the straight segment, parametrized as `ζ = z s`.
pub fn integrate_segment<G: Fn(Complex64) -> Complex64 + ?Sized>(
    g: &G,
    z: Complex64,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    let h = |s: f64| g(z * s);
    let mut r = integrate_unit_interval_with_breaks(&h, &segment_breaks(z.norm()), spec)?;
    r.value *= z;
    r.error_estimate *= z.norm();
    Ok(r)
}

/// Picks the cut radius beyond which the envelope tail mass on one side is
/// below `budget`, together with the decade breaks leading up to it.
fn tail_decades(env: &DecayEnvelope, core: f64, budget: f64) -> (Vec<f64>, f64, f64) {
    let mut x = core;
    let mut pts = Vec::new();
    let mut mass = env.tail_mass(x);
    while mass > budget && x * 10.0 <= MAX_RADIUS {
        x *= 10.0;
        pts.push(x);
        mass = env.tail_mass(x);
    }
    (pts, x, mass)
}

fn core_radius(env: &DecayEnvelope, spec: &QuadratureSpec) -> f64 {
    spec.tail_radius.max(env.min_radius()).max(1.0)
}

/// `∫_ℝ g(x) dx` for `g` continuous on ℝ with `|g| ≤ envelope` at infinity.
pub fn integrate_real_line<G: Fn(f64) -> Complex64 + ?Sized>(
    g: &G,
    envelope: &DecayEnvelope,
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    integrate_real_line_with_breaks(g, envelope, &[], spec)
}

/// As [`integrate_real_line`], with extra breakpoints at known features
/// (each gets its own decade grading).
pub fn integrate_real_line_with_breaks<G: Fn(f64) -> Complex64 + ?Sized>(
    g: &G,
    envelope: &DecayEnvelope,
    features: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    envelope.check_integrable()?;
    let core = core_radius(envelope, spec);
    let mut pts = vec![-core, core];
    pts.extend(graded_breaks(0.0, -core, core));
    pts.push(0.0);
    for &f in features {
        if f.abs() < core {
            pts.push(f);
            if f != 0.0 {
                pts.extend(graded_breaks(f, -core, core).into_iter().filter(|x| {
                    // grading around off-centre features only near the feature
                    (x - f).abs() <= f.abs().max(1.0)
                }));
            }
        }
    }
    let core_pts = sorted_breaks(pts);
    let rule = GaussLegendre::new(spec.gl_order);
    let rough: Complex64 = core_pts.windows(2).map(|w| rule.apply(g, w[0], w[1])).sum();
    let budget = 0.125 * spec.target(rough);
    let (decades, cut, mass) = tail_decades(envelope, core, budget);
    let mut all = core_pts;
    for x in decades {
        all.push(x);
        all.push(-x);
    }
    adaptive(g, &sorted_breaks(all), spec, 2.0 * mass, cut)
}

/// `∫_0^∞ g(x) dx` with the same tail treatment as the real line.
pub fn integrate_half_line<G: Fn(f64) -> Complex64 + ?Sized>(
    g: &G,
    envelope: &DecayEnvelope,
    features: &[f64],
    spec: &QuadratureSpec,
) -> Result<QuadratureResult> {
    spec.validate()?;
    envelope.check_integrable()?;
    let core = core_radius(envelope, spec);
    let mut pts = vec![0.0, core];
    pts.extend(graded_breaks(0.0, 0.0, core));
    pts.extend(features.iter().copied().filter(|&f| f > 0.0 && f < core));
    let core_pts = sorted_breaks(pts);
    let rule = GaussLegendre::new(spec.gl_order);
    let rough: Complex64 = core_pts.windows(2).map(|w| rule.apply(g, w[0], w[1])).sum();
    let budget = 0.25 * spec.target(rough);
    let (decades, cut, mass) = tail_decades(envelope, core, budget);
    let mut all = core_pts;
    all.extend(decades);
    adaptive(g, &sorted_breaks(all), spec, mass, cut)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn real<F: Fn(f64) -> f64>(f: F) -> impl Fn(f64) -> Complex64 {
        move |x| Complex64::new(f(x), 0.0)
    }

    #[test]
    fn gauss_legendre_is_exact_for_high_degree_polynomials() {
        for n in [2usize, 3, 7, 15, 20] {
            let rule = GaussLegendre::new(n);
            let w: f64 = rule.weights().iter().sum();
            assert_relative_eq!(w, 2.0, max_relative = 1e-14);
            for deg in [2 * n - 2, 2 * n - 1] {
                let v = rule.apply(&real(|x: f64| x.powi(deg as i32)), 0.0, 1.0);
                assert_relative_eq!(v.re, 1.0 / (deg as f64 + 1.0), max_relative = 1e-13);
            }
            assert!(rule.nodes().iter().all(|x| x.abs() < 1.0));
        }
    }

    #[test]
    fn unit_interval_examples() {
        let spec = QuadratureSpec::default();
        let r = integrate_unit_interval(&real(|_| 1.0), &spec).unwrap();
        assert_relative_eq!(r.value.re, 1.0, max_relative = 1e-14);

        let r = integrate_unit_interval(&real(|s: f64| s.sqrt()), &spec).unwrap();
        assert_relative_eq!(r.value.re, 2.0 / 3.0, max_relative = 1e-10);

        let g = |s: f64| 1.0 / Complex64::new(1.0, -s);
        let r = integrate_unit_interval(&g, &spec).unwrap();
        // i·Log(1 - i) = i(½ ln 2 - iπ/4) = π/4 + i·½ln 2
        let expected = Complex64::new(0.0, 1.0) * Complex64::new(1.0, -1.0).ln();
        assert_relative_eq!(r.value.re, expected.re, max_relative = 1e-12);
        assert_relative_eq!(r.value.im, expected.im, max_relative = 1e-12);
        assert_relative_eq!(expected.re, PI / 4.0, max_relative = 1e-15);
    }

    #[test]
    fn nodes_never_touch_the_endpoints() {
        let g = |s: f64| {
            assert!(s > 0.0 && s < 1.0, "node at endpoint: {s}");
            Complex64::new(s.powf(-0.5), 0.0)
        };
        let r = integrate_unit_interval(&g, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(r.value.re, 2.0, max_relative = 1e-9);
    }

    #[test]
    fn non_convergence_is_reported_with_best_estimate() {
        let spec = QuadratureSpec {
            max_subdivisions: 3,
            ..QuadratureSpec::default()
        };
        match integrate_unit_interval(&real(|s: f64| s.powf(-0.9)), &spec) {
            Err(Error::NotConverged { best }) => {
                assert!(best.value.re > 0.0 && best.value.re.is_finite());
                assert!(best.error_estimate > 0.0);
            }
            other => panic!("expected NotConverged, got {other:?}"),
        }
    }

    #[test]
    fn segment_examples() {
        let spec = QuadratureSpec::default();
        let i = Complex64::new(0.0, 1.0);
        let r = integrate_segment(&|_| Complex64::new(1.0, 0.0), i, &spec).unwrap();
        assert!((r.value - i).norm() < 1e-14);

        let r = integrate_segment(&|z: Complex64| z, 2.0 * i, &spec).unwrap();
        assert!((r.value - Complex64::new(-2.0, 0.0)).norm() < 1e-13);

        let r = integrate_segment(&|z: Complex64| 1.0 / (z + i), i, &spec).unwrap();
        assert!((r.value - Complex64::new(2f64.ln(), 0.0)).norm() < 1e-12);
    }

    #[test]
    fn real_line_examples() {
        let spec = QuadratureSpec::default();
        let env = DecayEnvelope::power(1.0, 2.0, 1.0);
        let r = integrate_real_line(&real(|x: f64| 1.0 / (1.0 + x * x)), &env, &spec).unwrap();
        assert_relative_eq!(r.value.re, PI, max_relative = 1e-10);
        assert!(r.total_error() <= 1e-10 * PI);

        let env = DecayEnvelope::power(1.0, 2.0, 10.0);
        let r = integrate_real_line(&real(|x: f64| x * (-x * x).exp()), &env, &spec).unwrap();
        assert!(r.value.norm() < 1e-12);
    }

    #[test]
    fn log_squared_integrand_reaches_its_closed_form() {
        // (1/x²)·Log(1 - ix)·Log(1 + ix), regular at 0 with value 1.
        let g = |x: f64| {
            if x == 0.0 {
                return Complex64::new(1.0, 0.0);
            }
            let a = crate::halfplane::log1p(Complex64::new(0.0, -x));
            let b = crate::halfplane::log1p(Complex64::new(0.0, x));
            a * b / (x * x)
        };
        // |Log(1 ± ix)| ≤ ln|x| + ln√2 + π/2 ≤ 2 ln|x| for |x| ≥ 10.
        let env = DecayEnvelope::with_log(4.0, 2.0, 2.0, 10.0);
        let r = integrate_real_line(&g, &env, &QuadratureSpec::default()).unwrap();
        let expected = 4.0 * PI * 2f64.ln();
        assert_relative_eq!(r.value.re, expected, max_relative = 1e-9);
        assert!((r.value.re - 8.710).abs() < 1e-3);
        assert!(r.value.im.abs() < 1e-9);
    }

    #[test]
    fn tail_bound_dominates_discarded_mass() {
        let env = DecayEnvelope::power(1.0, 2.0, 1.0);
        for radius in [1.0, 10.0, 100.0, 1e4, 1e6] {
            let spec = QuadratureSpec {
                tail_radius: radius,
                ..QuadratureSpec::default()
            };
            let r = integrate_real_line(&real(|x: f64| 1.0 / (1.0 + x * x)), &env, &spec).unwrap();
            let cut = r.truncation_radius;
            let discarded = 2.0 * (1.0 / cut).atan();
            assert!(
                r.tail_bound >= discarded,
                "R={radius}: {} < {discarded}",
                r.tail_bound
            );
            // and the envelope tail from the nominal radius itself
            assert!(2.0 * env.tail_mass(radius) >= 2.0 * (1.0 / radius).atan());
        }
    }

    #[test]
    fn tail_mass_closed_form_matches_quadrature() {
        let env = DecayEnvelope::with_log(1.5, 2.5, 2.0, 3.0);
        let r = 5.0;
        // ∫_5^∞ 1.5 ln²x x^-2.5 dx via x = 5/u
        let g = |u: f64| {
            let x = r / u;
            Complex64::new(env.bound(x) * r / (u * u), 0.0)
        };
        let q = integrate_unit_interval(&g, &QuadratureSpec::default()).unwrap();
        assert_relative_eq!(env.tail_mass(r), q.value.re, max_relative = 1e-9);
    }

    #[test]
    fn deterministic_bitwise() {
        let g = |x: f64| {
            Complex64::new(
                (x * 3.0).atan() / (1.0 + x * x),
                (-x * x).exp() + 1.0 / (2.0 + x * x),
            )
        };
        let env = DecayEnvelope::power(1.0, 2.0, 1.0);
        let a = integrate_real_line(&g, &env, &QuadratureSpec::default()).unwrap();
        let b = integrate_real_line(&g, &env, &QuadratureSpec::default()).unwrap();
        assert_eq!(a.value.re.to_bits(), b.value.re.to_bits());
        assert_eq!(a.value.im.to_bits(), b.value.im.to_bits());
        assert_eq!(a.panels_used, b.panels_used);
    }

    #[test]
    fn composite_rule_convergence_order() {
        let exact = 1f64.exp() - 1.0;
        for order in [2usize, 3, 4] {
            let err = |panels| {
                (composite_gauss_legendre(real(f64::exp), 0.0, 1.0, panels, order).re - exact).abs()
            };
            let ratio = err(2) / err(4);
            let floor = 2f64.powi(2 * order as i32 - 1);
            assert!(ratio >= floor, "order {order}: ratio {ratio} < {floor}");
        }
    }

    #[test]
    fn invalid_specs_and_envelopes_are_rejected() {
        let bad = QuadratureSpec {
            gl_order: 1,
            ..QuadratureSpec::default()
        };
        assert!(integrate_unit_interval(&real(|_| 1.0), &bad).is_err());
        let env = DecayEnvelope::power(1.0, 1.0, 1.0);
        assert!(matches!(
            integrate_real_line(
                &real(|x: f64| 1.0 / (1.0 + x.abs())),
                &env,
                &QuadratureSpec::default()
            ),
            Err(Error::NonIntegrableEnvelope(_))
        ));
    }
}
