//! Finite sections of `C` on spans of kernels `k_{i s_j}`.

use std::fmt;
use std::str::FromStr;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::halfplane::{gram_matrix, ImaginaryAxisPoint};
use crate::operators::{pair_inner_closed, PairKind};

pub const DEFAULT_CONDITION_CAP: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GridKind {
    Linear,
    Log,
}

/// `KIND:LO:HI:N` grid of points `s_j` on the positive axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PointGrid {
    pub kind: GridKind,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl PointGrid {
    pub fn new(kind: GridKind, lo: f64, hi: f64, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("grid", "n must be at least 1"));
        }
        if !(lo > 0.0 && hi.is_finite()) {
            return Err(Error::invalid(
                "grid",
                format!("need 0 < lo and finite hi, got {lo}, {hi}"),
            ));
        }
        // a single point only needs lo
        if !(lo < hi || (n == 1 && lo <= hi)) {
            return Err(Error::invalid(
                "grid",
                format!("need lo < hi, got {lo}, {hi}"),
            ));
        }
        Ok(Self { kind, lo, hi, n })
    }

    pub fn log(lo: f64, hi: f64, n: usize) -> Result<Self> {
        Self::new(GridKind::Log, lo, hi, n)
    }

    /// Grid values; both endpoints are exact, `n = 1` gives `[lo]`.
    pub fn values(&self) -> Vec<f64> {
        if self.n == 1 {
            return vec![self.lo];
        }
        let last = (self.n - 1) as f64;
        (0..self.n)
            .map(|k| {
                if k == 0 {
                    self.lo
                } else if k == self.n - 1 {
                    self.hi
                } else {
                    let frac = k as f64 / last;
                    match self.kind {
                        GridKind::Linear => self.lo + (self.hi - self.lo) * frac,
                        GridKind::Log => {
                            (self.lo.ln() + (self.hi.ln() - self.lo.ln()) * frac).exp()
                        }
                    }
                }
            })
            .collect()
    }

    pub fn points(&self) -> Result<Vec<ImaginaryAxisPoint>> {
        self.values()
            .into_iter()
            .map(ImaginaryAxisPoint::new)
            .collect()
    }
}

impl fmt::Display for PointGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match self.kind {
            GridKind::Linear => "linear",
            GridKind::Log => "log",
        };
        write!(f, "{kind}:{}:{}:{}", self.lo, self.hi, self.n)
    }
}

impl FromStr for PointGrid {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let parts: Vec<&str> = text.split(':').collect();
        let [kind, lo, hi, n] = parts[..] else {
            return Err(Error::invalid(
                "grid",
                format!("expected KIND:LO:HI:N, got `{text}`"),
            ));
        };
        let kind = match kind {
            "linear" | "lin" => GridKind::Linear,
            "log" => GridKind::Log,
            other => return Err(Error::invalid("grid", format!("unknown kind `{other}`"))),
        };
        let num = |v: &str| {
            v.parse::<f64>()
                .map_err(|_| Error::invalid("grid", format!("`{v}` is not a number")))
        };
        let n = n
            .parse::<usize>()
            .map_err(|_| Error::invalid("grid", format!("`{n}` is not a count")))?;
        Self::new(kind, num(lo)?, num(hi)?, n)
    }
}

/// Gram matrix `G` and interaction matrix `A[j][k] = ⟨C k_{is_k}, k_{is_j}⟩`.
#[derive(Debug, Clone)]
pub struct CompressionModel {
    points: Vec<ImaginaryAxisPoint>,
    gram: DMatrix<f64>,
    interaction: DMatrix<f64>,
    condition_estimate: f64,
}

impl CompressionModel {
    pub fn points(&self) -> &[ImaginaryAxisPoint] {
        &self.points
    }

    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    pub fn interaction(&self) -> &DMatrix<f64> {
        &self.interaction
    }

    /// Eigenvalue ratio of the unit-diagonal rescaling of `G`.
    pub fn condition_estimate(&self) -> f64 {
        self.condition_estimate
    }

    pub fn dim(&self) -> usize {
        self.points.len()
    }

    /// `D^{-1/2}`, where `D = diag(G)`.
    fn inv_sqrt_diag(&self) -> Vec<f64> {
        (0..self.dim())
            .map(|j| 1.0 / self.gram[(j, j)].sqrt())
            .collect()
    }

    fn scaled(&self, m: &DMatrix<f64>) -> DMatrix<f64> {
        let d = self.inv_sqrt_diag();
        DMatrix::from_fn(m.nrows(), m.ncols(), |j, k| d[j] * m[(j, k)] * d[k])
    }

    /// `L⁻¹ M L⁻ᵀ` for the Cholesky factor of the rescaled Gram matrix.
    /// The diagonal rescaling is a congruence, so eigenvalues are unchanged.
    fn similarity(&self, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        let chol = self.scaled(&self.gram).cholesky().ok_or_else(|| {
            Error::Factorization("Gram matrix is not numerically positive definite".into())
        })?;
        let l = chol.l();
        let left = l
            .solve_lower_triangular(&self.scaled(m))
            .ok_or_else(|| Error::Factorization("singular Cholesky factor".into()))?;
        let both = l
            .solve_lower_triangular(&left.transpose())
            .ok_or_else(|| Error::Factorization("singular Cholesky factor".into()))?;
        Ok(both.transpose())
    }
}

/// Assembles `G` and `A`, refusing sets whose Gram matrix is too
/// ill-conditioned for double precision to resolve.
pub fn build_compression(points: &[ImaginaryAxisPoint]) -> Result<CompressionModel> {
    build_compression_with_cap(points, DEFAULT_CONDITION_CAP)
}

pub fn build_compression_with_cap(
    points: &[ImaginaryAxisPoint],
    cap: f64,
) -> Result<CompressionModel> {
    if points.is_empty() {
        return Err(Error::invalid("points", "need at least one point"));
    }
    if !(cap >= 1.0) {
        return Err(Error::invalid("cap", format!("must be >= 1, got {cap}")));
    }
    let gram = gram_matrix(points)?;
    let n = points.len();
    let mut interaction = DMatrix::zeros(n, n);
    for j in 0..n {
        for k in 0..n {
            interaction[(j, k)] =
                pair_inner_closed(PairKind::CesaroKernel, points[k].s(), points[j].s())?;
        }
    }
    let mut model = CompressionModel {
        points: points.to_vec(),
        gram,
        interaction,
        condition_estimate: f64::INFINITY,
    };
    let eig = model.scaled(&model.gram).symmetric_eigenvalues();
    let (lo, hi) = eig.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
        (lo.min(v), hi.max(v))
    });
    let condition = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    model.condition_estimate = condition;
    if !(condition <= cap) {
        let (s_a, s_b) = closest_pair(points);
        return Err(Error::IllConditioned {
            condition,
            cap,
            s_a,
            s_b,
        });
    }
    Ok(model)
}

/// Pair with the smallest relative separation `|s - t| / max(s, t)`.
fn closest_pair(points: &[ImaginaryAxisPoint]) -> (f64, f64) {
    let mut best = (f64::INFINITY, points[0].s(), points[0].s());
    for (j, a) in points.iter().enumerate() {
        for b in &points[..j] {
            let (s, t) = (a.s().min(b.s()), a.s().max(b.s()));
            let gap = (t - s) / t;
            if gap < best.0 {
                best = (gap, s, t);
            }
        }
    }
    (best.1, best.2)
}

fn sort_complex(v: &mut [Complex64]) {
    v.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));
}

/// Eigenvalues of `A v = λ G v`, sorted by real then imaginary part.
pub fn compression_eigs(model: &CompressionModel) -> Result<Vec<Complex64>> {
    if model.dim() == 1 {
        let g = model.gram[(0, 0)];
        return Ok(vec![Complex64::new(model.interaction[(0, 0)] / g, 0.0)]);
    }
    let m = model.similarity(&model.interaction)?;
    let mut eigs: Vec<Complex64> = m.complex_eigenvalues().iter().copied().collect();
    if eigs.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Factorization(
            "eigensolver produced non-finite values".into(),
        ));
    }
    sort_complex(&mut eigs);
    Ok(eigs)
}

/// `‖C restricted to span{k_{is_j}}‖`, i.e. `sup ‖Cf‖/‖f‖` over the span,
/// from the generalized problem `Q c = λ G c` with `Q[j][k] = ⟨C k_{is_k}, C k_{is_j}⟩`.
pub fn compression_norm(model: &CompressionModel) -> Result<f64> {
    let n = model.dim();
    let q = DMatrix::from_fn(n, n, |j, k| {
        pair_inner_closed(
            PairKind::CesaroCesaro,
            model.points[k].s(),
            model.points[j].s(),
        )
        .expect("points validated at construction")
    });
    if n == 1 {
        return Ok((q[(0, 0)] / model.gram[(0, 0)]).sqrt());
    }
    let m = model.similarity(&q)?;
    let m = (&m + m.transpose()) * 0.5;
    let top = m
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    Ok(top.max(0.0).sqrt())
}

/// `‖P C P‖`, the largest singular value of the compressed matrix.
pub fn section_norm(model: &CompressionModel) -> Result<f64> {
    if model.dim() == 1 {
        return Ok((model.interaction[(0, 0)] / model.gram[(0, 0)]).abs());
    }
    let m = model.similarity(&model.interaction)?;
    Ok(m.singular_values().iter().copied().fold(0.0, f64::max))
}

/// `⟨Cf, f⟩ / ⟨f, f⟩` for `f = Σ c_k k_{is_k}`.
pub fn rayleigh_quotient(model: &CompressionModel, coeffs: &[Complex64]) -> Result<Complex64> {
    if coeffs.len() != model.dim() {
        return Err(Error::invalid(
            "coeffs",
            format!(
                "expected {} coefficients, got {}",
                model.dim(),
                coeffs.len()
            ),
        ));
    }
    let mut num = Complex64::new(0.0, 0.0);
    let mut den = Complex64::new(0.0, 0.0);
    for (j, cj) in coeffs.iter().enumerate() {
        for (k, ck) in coeffs.iter().enumerate() {
            let w = cj.conj() * ck;
            num += w * model.interaction[(j, k)];
            den += w * model.gram[(j, k)];
        }
    }
    if !(den.re > 0.0) {
        return Err(Error::ZeroFunction);
    }
    Ok(num / den.re)
}

/// Rayleigh quotients for `count` seeded random coefficient vectors.
pub fn numerical_range_samples(
    model: &CompressionModel,
    count: usize,
    seed: u64,
) -> Result<Vec<Complex64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = model.inv_sqrt_diag();
    (0..count)
        .map(|_| {
            // unit-norm kernels as the sampling basis so all scales contribute
            let c: Vec<Complex64> = d
                .iter()
                .map(|&dj| {
                    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * dj
                })
                .collect();
            rayleigh_quotient(model, &c)
        })
        .collect()
}

/// Min and mean of `||λ - 1| - 1|`, the distance to the circle `|λ - 1| = 1`.
pub fn circle_distance(eigs: &[Complex64]) -> (f64, f64) {
    if eigs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let d: Vec<f64> = eigs
        .iter()
        .map(|z| ((z - 1.0).norm() - 1.0).abs())
        .collect();
    let min = d.iter().copied().fold(f64::INFINITY, f64::min);
    (min, d.iter().sum::<f64>() / d.len() as f64)
}
