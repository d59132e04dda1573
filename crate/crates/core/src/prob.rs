//! Monte Carlo probabilities of linear events in a Gaussian input.
//!
//! Every branch probability is a probability of the form
//! `P[P X + q <= 0, X in D]` where `D` is the truncation box. Lower and upper
//! events of one branch are estimated on the same sample batch, which makes
//! `p_lower <= p_upper` hold exactly rather than statistically. The mass
//! outside `D` is not attributed to any branch; it is charged once to the
//! global upper bound.

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_xoshiro::Xoshiro256PlusPlus;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::lirpa::{ConstraintSet, InputBox, LinearBoundsSet, NeuronId, Sign};

/// Confidence the engine aims for before accepting a verdict.
pub const TARGET_CONFIDENCE: f64 = 1.0 - 1e-4;

/// Mixes a base seed with a list of tags (splitmix64 finalizer per step).
pub fn derive_seed(base: u64, tags: &[u64]) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    tags.iter().fold(mix(base), |acc, t| mix(acc ^ mix(*t)))
}

/// Input covariance as given by the user.
#[derive(Debug, Clone, PartialEq)]
pub enum Covariance {
    Diagonal(DVector<f64>),
    Full(DMatrix<f64>),
}

impl Covariance {
    pub fn isotropic(dim: usize, sigma: f64) -> Self {
        Covariance::Diagonal(DVector::from_element(dim, sigma * sigma))
    }

    pub fn dim(&self) -> usize {
        match self {
            Covariance::Diagonal(d) => d.len(),
            Covariance::Full(m) => m.nrows(),
        }
    }

    pub fn variances(&self) -> DVector<f64> {
        match self {
            Covariance::Diagonal(d) => d.clone(),
            Covariance::Full(m) => m.diagonal(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.factor().map(|_| ())
    }

    fn factor(&self) -> Result<Factor> {
        match self {
            Covariance::Diagonal(d) => {
                if d.iter().any(|v| !v.is_finite() || *v <= 0.0) {
                    return Err(Error::Covariance(
                        "diagonal variances must be finite and strictly positive".into(),
                    ));
                }
                Ok(Factor::Diagonal(d.map(f64::sqrt)))
            }
            Covariance::Full(m) => {
                if !m.is_square() {
                    return Err(Error::Covariance("covariance matrix must be square".into()));
                }
                if m.iter().any(|v| !v.is_finite()) {
                    return Err(Error::Covariance(
                        "covariance has non-finite entries".into(),
                    ));
                }
                let scale = m.amax().max(f64::MIN_POSITIVE);
                for i in 0..m.nrows() {
                    if m[(i, i)] <= 0.0 {
                        return Err(Error::Covariance(
                            "diagonal variances must be strictly positive".into(),
                        ));
                    }
                    for j in 0..i {
                        if (m[(i, j)] - m[(j, i)]).abs() > 1e-12 * scale {
                            return Err(Error::Covariance("covariance is not symmetric".into()));
                        }
                    }
                }
                if let Some(ch) = m.clone().cholesky() {
                    return Ok(Factor::Full(ch.l()));
                }
                // Singular PSD: fall back to a symmetric square root.
                let eig = m.clone().symmetric_eigen();
                if eig.eigenvalues.iter().any(|&v| v < -1e-10 * scale) {
                    return Err(Error::Covariance(
                        "covariance is not positive semidefinite".into(),
                    ));
                }
                let sqrt = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
                let root = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt);
                Ok(Factor::Full(root))
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Factor {
    Diagonal(DVector<f64>),
    Full(DMatrix<f64>),
}

/// `N(mean, cov)` with a precomputed factor `L L^T = cov`.
#[derive(Debug, Clone)]
pub struct GaussianInput {
    mean: DVector<f64>,
    cov: Covariance,
    factor: Factor,
}

impl GaussianInput {
    pub fn new(mean: DVector<f64>, cov: Covariance) -> Result<Self> {
        if mean.len() != cov.dim() {
            return Err(Error::Shape(format!(
                "mean has length {} but covariance has dimension {}",
                mean.len(),
                cov.dim()
            )));
        }
        if mean.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("gaussian mean".into()));
        }
        let factor = cov.factor()?;
        Ok(Self { mean, cov, factor })
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }

    pub fn mean(&self) -> &DVector<f64> {
        &self.mean
    }

    pub fn covariance(&self) -> &Covariance {
        &self.cov
    }

    /// The factor as a dense matrix (diagonal case expanded).
    pub fn factor_matrix(&self) -> DMatrix<f64> {
        match &self.factor {
            Factor::Diagonal(s) => DMatrix::from_diagonal(s),
            Factor::Full(l) => l.clone(),
        }
    }

    pub fn marginal_std(&self) -> DVector<f64> {
        self.cov.variances().map(f64::sqrt)
    }

    /// Writes `mean + L z` into `out`, drawing `z` from `rng`.
    pub fn sample_into<R: rand::Rng + ?Sized>(&self, rng: &mut R, z: &mut [f64], out: &mut [f64]) {
        for zi in z.iter_mut() {
            *zi = StandardNormal.sample(rng);
        }
        match &self.factor {
            Factor::Diagonal(s) => {
                for i in 0..out.len() {
                    out[i] = self.mean[i] + s[i] * z[i];
                }
            }
            Factor::Full(l) => {
                for i in 0..out.len() {
                    let mut acc = self.mean[i];
                    for (j, zj) in z.iter().enumerate() {
                        acc += l[(i, j)] * zj;
                    }
                    out[i] = acc;
                }
            }
        }
    }

    pub fn sampler(&self, seed: u64) -> GaussianSampler<'_> {
        GaussianSampler {
            gaussian: self,
            rng: Xoshiro256PlusPlus::seed_from_u64(seed),
            z: vec![0.0; self.dim()],
            x: vec![0.0; self.dim()],
        }
    }
}

/// Seeded stream of Gaussian samples.
pub struct GaussianSampler<'a> {
    gaussian: &'a GaussianInput,
    rng: Xoshiro256PlusPlus,
    z: Vec<f64>,
    x: Vec<f64>,
}

impl GaussianSampler<'_> {
    pub fn next_sample(&mut self) -> &[f64] {
        self.gaussian
            .sample_into(&mut self.rng, &mut self.z, &mut self.x);
        &self.x
    }
}

/// Truncation box `mean +- z * sigma` and the Gaussian mass `delta` outside it.
#[derive(Debug, Clone)]
pub struct TruncationDomain {
    pub input_box: InputBox,
    pub delta: f64,
    pub z: f64,
}

impl TruncationDomain {
    /// For diagonal covariance `delta` is exact; for a full covariance it is
    /// the union bound over coordinates, which is conservative.
    pub fn new(gaussian: &GaussianInput, z: f64) -> Result<Self> {
        if !(z > 0.0 && z.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "truncation z must be positive, got {z}"
            )));
        }
        let std = gaussian.marginal_std();
        let lo = gaussian.mean() - &std * z;
        let hi = gaussian.mean() + &std * z;
        let input_box = InputBox::new(lo, hi)?;
        let n = gaussian.dim() as f64;
        let tail = erfc(z / std::f64::consts::SQRT_2);
        let delta = match gaussian.covariance() {
            Covariance::Diagonal(_) => -(n * (-tail).ln_1p()).exp_m1(),
            Covariance::Full(_) => (n * tail).min(1.0),
        };
        Ok(Self {
            input_box,
            delta,
            z,
        })
    }
}

/// The event `{ P x + q <= 0 }`, rows stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearEvent {
    dim: usize,
    rows: Vec<f64>,
    offsets: Vec<f64>,
}

impl LinearEvent {
    pub fn new(p: &DMatrix<f64>, q: &DVector<f64>) -> Result<Self> {
        if p.nrows() != q.len() {
            return Err(Error::Shape(format!(
                "event matrix has {} rows but offset has length {}",
                p.nrows(),
                q.len()
            )));
        }
        let mut event = Self::empty(p.ncols());
        for i in 0..p.nrows() {
            event.push_row(p.row(i).iter().copied(), q[i]);
        }
        if event
            .rows
            .iter()
            .chain(event.offsets.iter())
            .any(|v| !v.is_finite())
        {
            return Err(Error::NonFinite("linear event".into()));
        }
        Ok(event)
    }

    /// Event with no rows (always satisfied).
    pub fn empty(dim: usize) -> Self {
        Self {
            dim,
            rows: Vec::new(),
            offsets: Vec::new(),
        }
    }

    fn push_row(&mut self, coeffs: impl Iterator<Item = f64>, offset: f64) {
        self.rows.extend(coeffs);
        self.offsets.push(offset);
        debug_assert_eq!(self.rows.len(), self.offsets.len() * self.dim);
    }

    fn push_scaled_row(&mut self, coeffs: impl Iterator<Item = f64>, offset: f64, scale: f64) {
        self.push_row(coeffs.map(|v| scale * v), scale * offset);
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn num_rows(&self) -> usize {
        self.offsets.len()
    }

    pub fn row(&self, i: usize) -> (&[f64], f64) {
        (
            &self.rows[i * self.dim..(i + 1) * self.dim],
            self.offsets[i],
        )
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.num_rows(), self.dim, &self.rows)
    }

    pub fn offsets(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.offsets)
    }

    /// Bitwise equality of rows and offsets.
    pub fn bitwise_eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.rows.len() == other.rows.len()
            && self.offsets.len() == other.offsets.len()
            && self
                .rows
                .iter()
                .zip(&other.rows)
                .all(|(a, b)| a.to_bits() == b.to_bits())
            && self
                .offsets
                .iter()
                .zip(&other.offsets)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.offsets.iter().enumerate().all(|(i, &q)| {
            let row = &self.rows[i * self.dim..(i + 1) * self.dim];
            let mut acc = q;
            for (a, xi) in row.iter().zip(x) {
                acc += a * xi;
            }
            acc <= 0.0
        })
    }
}

/// A Monte Carlo estimate `hits / sample_count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbEstimate {
    pub value: f64,
    pub hits: u64,
    pub sample_count: u64,
    pub seed: u64,
}

impl ProbEstimate {
    pub fn from_counts(hits: u64, sample_count: u64, seed: u64) -> Self {
        Self {
            value: hits as f64 / sample_count as f64,
            hits,
            sample_count,
            seed,
        }
    }

    /// Binomial standard error of the estimate.
    pub fn std_error(&self) -> f64 {
        (self.value * (1.0 - self.value) / self.sample_count as f64).sqrt()
    }
}

/// Lower and upper events of a branch.
///
/// Lower event rows: `-a_lower`, then for each constraint in `(layer, index)`
/// order `-A_lower[j]` (for `y >= 0`) or `+A_upper[j]` (for `y < 0`). The
/// upper event swaps the roles of lower and upper functions.
pub fn build_branch_events(
    bounds: &LinearBoundsSet,
    constraints: &ConstraintSet,
) -> Result<(LinearEvent, LinearEvent)> {
    let f = bounds.output();
    let dim = f.lower_a.ncols();
    let mut lower = LinearEvent::empty(dim);
    let mut upper = LinearEvent::empty(dim);
    lower.push_scaled_row(f.lower_a.row(0).iter().copied(), f.lower_b[0], -1.0);
    upper.push_scaled_row(f.upper_a.row(0).iter().copied(), f.upper_b[0], -1.0);
    for (neuron, sign) in constraints.iter() {
        let NeuronId { layer, index } = neuron;
        if layer >= bounds.hidden_layers() || index >= bounds.per_layer[layer].width() {
            return Err(Error::UnknownNeuron { layer, index });
        }
        let b = &bounds.per_layer[layer];
        match sign {
            Sign::GeqZero => {
                lower.push_scaled_row(b.lower_a.row(index).iter().copied(), b.lower_b[index], -1.0);
                upper.push_scaled_row(b.upper_a.row(index).iter().copied(), b.upper_b[index], -1.0);
            }
            Sign::LtZero => {
                lower.push_row(b.upper_a.row(index).iter().copied(), b.upper_b[index]);
                upper.push_row(b.lower_a.row(index).iter().copied(), b.lower_b[index]);
            }
        }
    }
    Ok((lower, upper))
}

fn check_event_dims(
    events: &[&LinearEvent],
    gaussian: &GaussianInput,
    domain: &TruncationDomain,
) -> Result<()> {
    for e in events {
        if e.dim() != gaussian.dim() {
            return Err(Error::Shape(format!(
                "event has dimension {} but input has dimension {}",
                e.dim(),
                gaussian.dim()
            )));
        }
    }
    if domain.input_box.dim() != gaussian.dim() {
        return Err(Error::Shape(
            "truncation box dimension does not match input".into(),
        ));
    }
    Ok(())
}

/// Estimates several events on one shared sample batch. Samples outside the
/// truncation box count as misses for every event.
pub fn estimate_events(
    events: &[&LinearEvent],
    gaussian: &GaussianInput,
    domain: &TruncationDomain,
    n_samples: u64,
    seed: u64,
) -> Result<Vec<ProbEstimate>> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument(
            "n_samples must be at least 1".into(),
        ));
    }
    check_event_dims(events, gaussian, domain)?;
    let mut hits = vec![0u64; events.len()];
    let mut sampler = gaussian.sampler(seed);
    for _ in 0..n_samples {
        let x = sampler.next_sample();
        if !domain.input_box.contains(x) {
            continue;
        }
        for (h, e) in hits.iter_mut().zip(events) {
            if e.contains(x) {
                *h += 1;
            }
        }
    }
    Ok(hits
        .into_iter()
        .map(|h| ProbEstimate::from_counts(h, n_samples, seed))
        .collect())
}

/// `P[P X + q <= 0, X in D]` by Monte Carlo.
pub fn estimate_event_probability(
    event: &LinearEvent,
    gaussian: &GaussianInput,
    domain: &TruncationDomain,
    n_samples: u64,
    seed: u64,
) -> Result<ProbEstimate> {
    Ok(estimate_events(&[event], gaussian, domain, n_samples, seed)?[0])
}

/// Both probability bounds of a branch, estimated on shared samples. Both are
/// restricted to the truncation box; `delta` is added at aggregation time.
pub fn bound_branch_probability(
    bounds: &LinearBoundsSet,
    constraints: &ConstraintSet,
    gaussian: &GaussianInput,
    domain: &TruncationDomain,
    n_samples: u64,
    seed: u64,
) -> Result<(ProbEstimate, ProbEstimate)> {
    let (lower, upper) = build_branch_events(bounds, constraints)?;
    estimate_event_pair(&lower, &upper, gaussian, domain, n_samples, seed)
}

/// Shared-sample estimate of a (lower, upper) event pair.
pub fn estimate_event_pair(
    lower: &LinearEvent,
    upper: &LinearEvent,
    gaussian: &GaussianInput,
    domain: &TruncationDomain,
    n_samples: u64,
    seed: u64,
) -> Result<(ProbEstimate, ProbEstimate)> {
    let est = estimate_events(&[lower, upper], gaussian, domain, n_samples, seed)?;
    debug_assert!(est[0].hits <= est[1].hits);
    Ok((est[0], est[1]))
}

/// The two-row event `{ upper_j(x) >= 0, lower_j(x) <= 0 }` for a neuron.
pub fn uncertainty_event(bounds: &LinearBoundsSet, neuron: NeuronId) -> Result<LinearEvent> {
    let NeuronId { layer, index } = neuron;
    if layer >= bounds.hidden_layers() || index >= bounds.per_layer[layer].width() {
        return Err(Error::UnknownNeuron { layer, index });
    }
    let b = &bounds.per_layer[layer];
    let mut event = LinearEvent::empty(b.lower_a.ncols());
    event.push_scaled_row(b.upper_a.row(index).iter().copied(), b.upper_b[index], -1.0);
    event.push_row(b.lower_a.row(index).iter().copied(), b.lower_b[index]);
    Ok(event)
}

/// Mass of inputs on which the relaxed bounds of `neuron` disagree in sign.
///
/// When the lower and upper functions coincide the event reduces to the
/// hyperplane `y = 0`, which has measure zero; that case returns exactly 0
/// without sampling.
pub fn uncertainty_level(
    bounds: &LinearBoundsSet,
    neuron: NeuronId,
    gaussian: &GaussianInput,
    domain: &TruncationDomain,
    n_samples: u64,
    seed: u64,
) -> Result<ProbEstimate> {
    let event = uncertainty_event(bounds, neuron)?;
    if bounds.per_layer[neuron.layer].rows_identical(neuron.index) {
        if n_samples == 0 {
            return Err(Error::InvalidArgument(
                "n_samples must be at least 1".into(),
            ));
        }
        return Ok(ProbEstimate::from_counts(0, n_samples, seed));
    }
    estimate_event_probability(&event, gaussian, domain, n_samples, seed)
}

/// Which side of the threshold a verdict asserts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundSide {
    /// `P_lower >= eta` (TRUE verdict)
    Lower,
    /// `P_upper < eta` (FALSE verdict)
    Upper,
}

/// Bernstein confidence that the true aggregate bound lies on the declared
/// side of `eta`:
///
/// `1 - exp(-N eps^2 / (2 V + 2 eps / 3))`, with `V = sum p (1 - p)` over the
/// per-branch estimates and `eps` the margin of the estimated aggregate
/// (`sum values + offset`) past `eta`.
pub fn bernstein_confidence(
    values: &[f64],
    offset: f64,
    n_samples: u64,
    eta: f64,
    side: BoundSide,
) -> Result<f64> {
    let total = kahan_sum(values.iter().copied()) + offset;
    let eps = match side {
        BoundSide::Lower if total >= eta => total - eta,
        BoundSide::Upper if total < eta => eta - total,
        _ => {
            return Err(Error::Precondition(format!(
                "no {side:?} verdict: estimated bound {total} against eta {eta}"
            )))
        }
    };
    let variance = kahan_sum(values.iter().map(|p| p * (1.0 - p)));
    Ok(bernstein_from_parts(eps, variance, n_samples))
}

/// The closed form on its own; `eps >= 0`.
pub fn bernstein_from_parts(eps: f64, variance: f64, n_samples: u64) -> f64 {
    let denom = 2.0 * variance + 2.0 / 3.0 * eps;
    if eps <= 0.0 || denom <= 0.0 {
        return 0.0;
    }
    let exponent = n_samples as f64 * eps * eps / denom;
    -(-exponent).exp_m1()
}

/// Compensated summation.
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut comp = 0.0;
    for v in values {
        let y = v - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_normal(dim: usize) -> GaussianInput {
        GaussianInput::new(DVector::zeros(dim), Covariance::isotropic(dim, 1.0)).unwrap()
    }

    #[test]
    fn half_line_probability() {
        let g = std_normal(1);
        let dom = TruncationDomain::new(&g, 8.0).unwrap();
        let e = LinearEvent::new(&DMatrix::from_element(1, 1, -1.0), &DVector::zeros(1)).unwrap();
        let p = estimate_event_probability(&e, &g, &dom, 1_000_000, 7).unwrap();
        assert!((p.value - 0.5).abs() < 0.002, "{}", p.value);
    }

    #[test]
    fn orthant_probability() {
        let g = std_normal(2);
        let dom = TruncationDomain::new(&g, 8.0).unwrap();
        let e = LinearEvent::new(&DMatrix::identity(2, 2), &DVector::zeros(2)).unwrap();
        let p = estimate_event_probability(&e, &g, &dom, 1_000_000, 11).unwrap();
        assert!((p.value - 0.25).abs() < 0.002, "{}", p.value);
    }

    #[test]
    fn vacuous_event_measures_box_mass() {
        let g = std_normal(3);
        let dom = TruncationDomain::new(&g, 1.5).unwrap();
        let n = 400_000;
        let p = estimate_event_probability(&LinearEvent::empty(3), &g, &dom, n, 3).unwrap();
        let se = ((1.0 - dom.delta) * dom.delta / n as f64).sqrt();
        assert!(
            (p.value + dom.delta - 1.0).abs() <= 3.0 * se,
            "{} {}",
            p.value,
            dom.delta
        );
    }

    #[test]
    fn delta_matches_closed_form() {
        let g = std_normal(1);
        let dom = TruncationDomain::new(&g, 3.0).unwrap();
        // 1 - (Phi(3) - Phi(-3))
        assert!((dom.delta - 0.002_699_796_063_260_207).abs() < 1e-12);
        let g5 = std_normal(5);
        let dom5 = TruncationDomain::new(&g5, 3.0).unwrap();
        let expect = 1.0 - (1.0f64 - 0.002_699_796_063_260_207).powi(5);
        assert!((dom5.delta - expect).abs() < 1e-12);
    }

    #[test]
    fn estimates_are_deterministic() {
        let g = std_normal(2);
        let dom = TruncationDomain::new(&g, 3.0).unwrap();
        let e = LinearEvent::new(
            &DMatrix::from_row_slice(1, 2, &[1.0, -0.5]),
            &DVector::from_element(1, 0.2),
        )
        .unwrap();
        let a = estimate_event_probability(&e, &g, &dom, 10_000, 99).unwrap();
        let b = estimate_event_probability(&e, &g, &dom, 10_000, 99).unwrap();
        assert_eq!(a.value.to_bits(), b.value.to_bits());
        assert_eq!(a.hits, b.hits);
    }

    #[test]
    fn zero_samples_rejected() {
        let g = std_normal(1);
        let dom = TruncationDomain::new(&g, 3.0).unwrap();
        assert!(estimate_event_probability(&LinearEvent::empty(1), &g, &dom, 0, 0).is_err());
    }

    #[test]
    fn cholesky_factor_reproduces_covariance() {
        let cov = DMatrix::from_row_slice(3, 3, &[2.0, 0.3, 0.1, 0.3, 1.0, -0.2, 0.1, -0.2, 0.5]);
        let g = GaussianInput::new(DVector::zeros(3), Covariance::Full(cov.clone())).unwrap();
        let l = g.factor_matrix();
        assert!((&l * l.transpose() - cov).amax() < 1e-10);
        for i in 0..3 {
            for j in (i + 1)..3 {
                assert_eq!(l[(i, j)], 0.0);
            }
        }
    }

    #[test]
    fn singular_psd_covariance_accepted() {
        let cov = DMatrix::from_row_slice(2, 2, &[1.0, 1.0, 1.0, 1.0]);
        let g = GaussianInput::new(DVector::zeros(2), Covariance::Full(cov.clone())).unwrap();
        let l = g.factor_matrix();
        assert!((&l * l.transpose() - cov).amax() < 1e-10);
    }

    #[test]
    fn invalid_covariances_rejected() {
        let neg = Covariance::Diagonal(DVector::from_vec(vec![1.0, 0.0]));
        assert!(GaussianInput::new(DVector::zeros(2), neg).is_err());
        let asym = Covariance::Full(DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]));
        assert!(GaussianInput::new(DVector::zeros(2), asym).is_err());
        let indefinite = Covariance::Full(DMatrix::from_row_slice(2, 2, &[1.0, 2.0, 2.0, 1.0]));
        assert!(GaussianInput::new(DVector::zeros(2), indefinite).is_err());
    }

    #[test]
    fn bernstein_zero_variance_limit() {
        let c = bernstein_confidence(&[1.0], 0.0, 100_000, 0.95, BoundSide::Lower).unwrap();
        assert!(c >= 1.0 - 1e-30);
    }

    #[test]
    fn bernstein_hand_evaluated() {
        // eps = 0.01, V = 0.0384: exponent = 1e5 * 1e-4 / (0.0768 + 0.02/3)
        let c = bernstein_confidence(&[0.96], 0.0, 100_000, 0.95, BoundSide::Lower).unwrap();
        let exponent: f64 = 10.0 / (0.0768 + 0.02 / 3.0);
        assert!((exponent - 119.8).abs() < 0.1);
        let expect = 1.0 - (-exponent).exp();
        assert_eq!(c, expect);
        assert!(c >= TARGET_CONFIDENCE);
    }

    #[test]
    fn bernstein_upper_side_and_precondition() {
        let c = bernstein_confidence(&[0.5, 0.3], 0.01, 10_000, 0.95, BoundSide::Upper).unwrap();
        assert!(c > 0.999);
        assert!(bernstein_confidence(&[0.5], 0.0, 10_000, 0.95, BoundSide::Lower).is_err());
        assert!(bernstein_confidence(&[0.99], 0.0, 10_000, 0.95, BoundSide::Upper).is_err());
    }

    #[test]
    fn bernstein_monotonicity() {
        let base = bernstein_from_parts(0.005, 0.05, 10_000);
        assert!(bernstein_from_parts(0.006, 0.05, 10_000) > base);
        assert!(bernstein_from_parts(0.005, 0.05, 20_000) > base);
        assert!(bernstein_from_parts(0.005, 0.06, 10_000) < base);
        assert_eq!(bernstein_from_parts(0.0, 0.05, 10_000), 0.0);
    }

    #[test]
    fn kahan_is_accurate() {
        let values = vec![0.1; 1_000_000];
        assert!((kahan_sum(values) - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(1, &[0]);
        let b = derive_seed(1, &[1]);
        let c = derive_seed(2, &[0]);
        assert_ne!(a, b);
        assert_ne!(a, c);
        assert_eq!(a, derive_seed(1, &[0]));
    }
}
