//! Backward linear bound propagation (CROWN-style) conditioned on ReLU sign
//! constraints.
//!
//! For every layer `k` the propagation produces affine functions
//! `lower_k(x) <= y^(k)(x) <= upper_k(x)` valid on the input box for all `x`
//! that satisfy the constraints placed on layers `< k`. Constrained neurons
//! pass through their ReLU as exact linear pieces (identity for `y >= 0`,
//! zero for `y < 0`); unconstrained neurons whose concrete bounds straddle
//! zero are relaxed.
//!
//! Layer bundles are computed front to back: the bundle for layer `k` only
//! reads relaxations of layers `< k`, so two constraint sets that agree on
//! layers `< k` yield bitwise identical layer-`k` bundles.

use std::collections::BTreeMap;
use std::fmt;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Network;

/// Sign constraint on a hidden preactivation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    /// `y >= 0`
    GeqZero,
    /// `y < 0`
    LtZero,
}

impl Sign {
    pub fn holds(self, y: f64) -> bool {
        match self {
            Sign::GeqZero => y >= 0.0,
            Sign::LtZero => y < 0.0,
        }
    }
}

/// A hidden neuron, addressed by zero-based layer and index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NeuronId {
    pub layer: usize,
    pub index: usize,
}

impl NeuronId {
    pub fn new(layer: usize, index: usize) -> Self {
        Self { layer, index }
    }
}

impl fmt::Display for NeuronId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.layer, self.index)
    }
}

/// Sign constraints defining a branch. Iteration is ordered by
/// `(layer, index)`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ConstraintSet {
    entries: BTreeMap<NeuronId, Sign>,
}

impl ConstraintSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, neuron: NeuronId) -> Option<Sign> {
        self.entries.get(&neuron).copied()
    }

    /// Adds a constraint. Fails if the neuron already carries one.
    pub fn insert(&mut self, neuron: NeuronId, sign: Sign) -> Result<()> {
        if let Some(existing) = self.entries.get(&neuron) {
            return Err(Error::InvalidArgument(format!(
                "neuron {neuron} already constrained to {existing:?}"
            )));
        }
        self.entries.insert(neuron, sign);
        Ok(())
    }

    /// Copy of `self` with one extra constraint.
    pub fn with(&self, neuron: NeuronId, sign: Sign) -> Result<Self> {
        let mut next = self.clone();
        next.insert(neuron, sign)?;
        Ok(next)
    }

    pub fn iter(&self) -> impl Iterator<Item = (NeuronId, Sign)> + '_ {
        self.entries.iter().map(|(n, s)| (*n, *s))
    }

    /// Constraints on a single layer.
    pub fn layer(&self, layer: usize) -> impl Iterator<Item = (usize, Sign)> + '_ {
        self.entries
            .range(NeuronId::new(layer, 0)..NeuronId::new(layer + 1, 0))
            .map(|(n, s)| (n.index, *s))
    }

    /// Constraints restricted to layers `< layer`.
    pub fn prefix(&self, layer: usize) -> Self {
        Self {
            entries: self
                .entries
                .range(..NeuronId::new(layer, 0))
                .map(|(n, s)| (*n, *s))
                .collect(),
        }
    }

    /// Checks every constraint against concrete preactivation values.
    pub fn satisfied_by(&self, preactivations: &[DVector<f64>]) -> bool {
        self.iter()
            .all(|(n, s)| s.holds(preactivations[n.layer][n.index]))
    }

    pub fn validate(&self, network: &Network) -> Result<()> {
        for (n, _) in self.iter() {
            let ok =
                n.layer < network.hidden_layers() && n.index < network.layer(n.layer).output_dim();
            if !ok {
                return Err(Error::UnknownNeuron {
                    layer: n.layer,
                    index: n.index,
                });
            }
        }
        Ok(())
    }
}

impl FromIterator<(NeuronId, Sign)> for ConstraintSet {
    fn from_iter<T: IntoIterator<Item = (NeuronId, Sign)>>(iter: T) -> Self {
        Self {
            entries: iter.into_iter().collect(),
        }
    }
}

/// Axis-aligned input domain.
#[derive(Debug, Clone, PartialEq)]
pub struct InputBox {
    lo: DVector<f64>,
    hi: DVector<f64>,
}

impl InputBox {
    pub fn new(lo: DVector<f64>, hi: DVector<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Shape(format!(
                "box bounds have lengths {} and {}",
                lo.len(),
                hi.len()
            )));
        }
        if lo.iter().chain(hi.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("input box".into()));
        }
        if lo.iter().zip(hi.iter()).any(|(l, h)| l > h) {
            return Err(Error::InvalidArgument(
                "box lower bound exceeds upper bound".into(),
            ));
        }
        Ok(Self { lo, hi })
    }

    pub fn lo(&self) -> &DVector<f64> {
        &self.lo
    }

    pub fn hi(&self) -> &DVector<f64> {
        &self.hi
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(self.hi.iter()))
            .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }

    /// `min` and `max` of `a^T x + b` over the box.
    pub fn affine_range(&self, a: impl Iterator<Item = f64>, b: f64) -> (f64, f64) {
        let mut lo = b;
        let mut hi = b;
        for ((ai, l), h) in a.zip(self.lo.iter()).zip(self.hi.iter()) {
            if ai >= 0.0 {
                lo += ai * l;
                hi += ai * h;
            } else {
                lo += ai * h;
                hi += ai * l;
            }
        }
        (lo, hi)
    }
}

/// Lower and upper affine functions of the input bounding one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearFunctionBundle {
    pub lower_a: DMatrix<f64>,
    pub lower_b: DVector<f64>,
    pub upper_a: DMatrix<f64>,
    pub upper_b: DVector<f64>,
}

impl LinearFunctionBundle {
    pub fn width(&self) -> usize {
        self.lower_b.len()
    }

    /// True when the lower and upper functions of neuron `j` coincide bitwise.
    pub fn rows_identical(&self, j: usize) -> bool {
        let bits = |v: f64| v.to_bits();
        self.lower_b[j].to_bits() == self.upper_b[j].to_bits()
            && self
                .lower_a
                .row(j)
                .iter()
                .zip(self.upper_a.row(j).iter())
                .all(|(l, u)| bits(*l) == bits(*u))
    }

    pub fn lower_at(&self, j: usize, x: &DVector<f64>) -> f64 {
        self.lower_a.row(j).transpose().dot(x) + self.lower_b[j]
    }

    pub fn upper_at(&self, j: usize, x: &DVector<f64>) -> f64 {
        self.upper_a.row(j).transpose().dot(x) + self.upper_b[j]
    }
}

/// Linear lines sandwiching `ReLU` on an interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReluRelaxation {
    pub lower_slope: f64,
    pub lower_intercept: f64,
    pub upper_slope: f64,
    pub upper_intercept: f64,
}

impl ReluRelaxation {
    const ACTIVE: Self = Self {
        lower_slope: 1.0,
        lower_intercept: 0.0,
        upper_slope: 1.0,
        upper_intercept: 0.0,
    };
    const INACTIVE: Self = Self {
        lower_slope: 0.0,
        lower_intercept: 0.0,
        upper_slope: 0.0,
        upper_intercept: 0.0,
    };

    pub fn is_exact(&self) -> bool {
        self.lower_slope == self.upper_slope && self.lower_intercept == self.upper_intercept
    }
}

/// Relaxation lines for one neuron. Constraints and stable intervals give
/// exact pieces; unstable neurons get the chord as upper line and the
/// adaptive `{0, 1}` slope as lower line.
pub fn relax_relu(l: f64, u: f64, constraint: Option<Sign>) -> Result<ReluRelaxation> {
    if l > u {
        return Err(Error::InvalidInterval { lower: l, upper: u });
    }
    Ok(relaxation_lines(l, u, constraint))
}

// Also used on clamped bounds of infeasible branches, where `l > u` may occur;
// the stability tests are ordered so that case never reaches the chord.
fn relaxation_lines(l: f64, u: f64, constraint: Option<Sign>) -> ReluRelaxation {
    match constraint {
        Some(Sign::GeqZero) => return ReluRelaxation::ACTIVE,
        Some(Sign::LtZero) => return ReluRelaxation::INACTIVE,
        None => {}
    }
    if l >= 0.0 {
        ReluRelaxation::ACTIVE
    } else if u <= 0.0 {
        ReluRelaxation::INACTIVE
    } else {
        let width = u - l;
        ReluRelaxation {
            lower_slope: if u >= -l { 1.0 } else { 0.0 },
            lower_intercept: 0.0,
            upper_slope: u / width,
            upper_intercept: -u * l / width,
        }
    }
}

/// Result of one propagation: linear and concrete bounds for every layer.
#[derive(Debug, Clone)]
pub struct LinearBoundsSet {
    /// Bundles for layers `0..N`; the last one bounds `f`.
    pub per_layer: Vec<LinearFunctionBundle>,
    /// Concrete bounds after constraint clamping.
    pub concrete_lower: Vec<DVector<f64>>,
    pub concrete_upper: Vec<DVector<f64>>,
    /// Relaxation used for each hidden neuron.
    pub relaxations: Vec<Vec<ReluRelaxation>>,
    /// Coefficients on each hidden layer's ReLU output reached by the
    /// lower-bound backward pass of `f`.
    pub output_lower_coeffs: Vec<DVector<f64>>,
}

impl LinearBoundsSet {
    pub fn output(&self) -> &LinearFunctionBundle {
        self.per_layer.last().expect("at least one layer")
    }

    pub fn hidden_layers(&self) -> usize {
        self.per_layer.len() - 1
    }

    pub fn is_unstable(&self, neuron: NeuronId, constraints: &ConstraintSet) -> bool {
        neuron.layer < self.hidden_layers()
            && constraints.get(neuron).is_none()
            && self.concrete_lower[neuron.layer][neuron.index] < 0.0
            && self.concrete_upper[neuron.layer][neuron.index] > 0.0
    }

    /// Unstable neurons ordered by `(layer, index)`.
    pub fn unstable_neurons(&self, constraints: &ConstraintSet) -> Vec<NeuronId> {
        (0..self.hidden_layers())
            .flat_map(|k| (0..self.per_layer[k].width()).map(move |j| NeuronId::new(k, j)))
            .filter(|n| self.is_unstable(*n, constraints))
            .collect()
    }

    /// JSON dump used for fixtures and debugging.
    pub fn to_json(&self) -> serde_json::Value {
        let mat = |m: &DMatrix<f64>| -> Vec<Vec<f64>> {
            m.row_iter().map(|r| r.iter().copied().collect()).collect()
        };
        let vec = |v: &DVector<f64>| -> Vec<f64> { v.iter().copied().collect() };
        serde_json::json!({
            "layers": self.per_layer.iter().enumerate().map(|(k, b)| serde_json::json!({
                "lower_A": mat(&b.lower_a),
                "lower_b": vec(&b.lower_b),
                "upper_A": mat(&b.upper_a),
                "upper_b": vec(&b.upper_b),
                "concrete_lower": vec(&self.concrete_lower[k]),
                "concrete_upper": vec(&self.concrete_upper[k]),
            })).collect::<Vec<_>>(),
        })
    }
}

struct BackwardResult {
    bundle: LinearFunctionBundle,
    lower_coeffs: Vec<DVector<f64>>,
}

/// Pushes a coefficient matrix on `ReLU(y^(j))` back onto `y^(j)`.
fn relax_through(
    lam: &DMatrix<f64>,
    offset: &mut DVector<f64>,
    relax: &[ReluRelaxation],
    upper: bool,
) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(lam.nrows(), lam.ncols());
    for m in 0..lam.ncols() {
        let r = &relax[m];
        for i in 0..lam.nrows() {
            let c = lam[(i, m)];
            let use_lower_line = (c >= 0.0) != upper;
            let (s, t) = if use_lower_line {
                (r.lower_slope, r.lower_intercept)
            } else {
                (r.upper_slope, r.upper_intercept)
            };
            out[(i, m)] = c * s;
            offset[i] += c * t;
        }
    }
    out
}

fn backward(
    network: &Network,
    k: usize,
    relaxations: &[Vec<ReluRelaxation>],
    record_lower_coeffs: bool,
) -> BackwardResult {
    let layer = network.layer(k);
    let mut lower_lam = layer.weights().clone();
    let mut upper_lam = layer.weights().clone();
    let mut lower_off = layer.bias().clone();
    let mut upper_off = layer.bias().clone();
    let mut lower_coeffs = vec![DVector::zeros(0); k];

    for j in (0..k).rev() {
        if record_lower_coeffs {
            lower_coeffs[j] = lower_lam.row(0).transpose();
        }
        let lower_y = relax_through(&lower_lam, &mut lower_off, &relaxations[j], false);
        let upper_y = relax_through(&upper_lam, &mut upper_off, &relaxations[j], true);
        let prev = network.layer(j);
        lower_off += &lower_y * prev.bias();
        upper_off += &upper_y * prev.bias();
        lower_lam = &lower_y * prev.weights();
        upper_lam = &upper_y * prev.weights();
    }

    BackwardResult {
        bundle: LinearFunctionBundle {
            lower_a: lower_lam,
            lower_b: lower_off,
            upper_a: upper_lam,
            upper_b: upper_off,
        },
        lower_coeffs,
    }
}

/// Linear and concrete bounds for every layer of `network` over `domain`,
/// valid for inputs satisfying `constraints`.
pub fn compute_linear_bounds(
    network: &Network,
    domain: &InputBox,
    constraints: &ConstraintSet,
) -> Result<LinearBoundsSet> {
    constraints.validate(network)?;
    if domain.dim() != network.input_dim() {
        return Err(Error::Shape(format!(
            "box has dimension {} but network input width is {}",
            domain.dim(),
            network.input_dim()
        )));
    }
    let depth = network.depth();
    let mut per_layer = Vec::with_capacity(depth);
    let mut concrete_lower = Vec::with_capacity(depth);
    let mut concrete_upper = Vec::with_capacity(depth);
    let mut relaxations: Vec<Vec<ReluRelaxation>> = Vec::with_capacity(depth - 1);
    let mut output_lower_coeffs = Vec::new();

    for k in 0..depth {
        let is_output = k + 1 == depth;
        let result = backward(network, k, &relaxations, is_output);
        let bundle = result.bundle;
        let width = bundle.width();
        let mut lo = DVector::zeros(width);
        let mut hi = DVector::zeros(width);
        for j in 0..width {
            lo[j] = domain
                .affine_range(bundle.lower_a.row(j).iter().copied(), bundle.lower_b[j])
                .0;
            hi[j] = domain
                .affine_range(bundle.upper_a.row(j).iter().copied(), bundle.upper_b[j])
                .1;
        }
        if !is_output {
            let mut layer_relax = Vec::with_capacity(width);
            for j in 0..width {
                let sign = constraints.get(NeuronId::new(k, j));
                match sign {
                    Some(Sign::GeqZero) => lo[j] = lo[j].max(0.0),
                    Some(Sign::LtZero) => hi[j] = hi[j].min(0.0),
                    None => {}
                }
                layer_relax.push(relaxation_lines(lo[j], hi[j], sign));
            }
            relaxations.push(layer_relax);
        } else {
            output_lower_coeffs = result.lower_coeffs;
        }
        per_layer.push(bundle);
        concrete_lower.push(lo);
        concrete_upper.push(hi);
    }

    Ok(LinearBoundsSet {
        per_layer,
        concrete_lower,
        concrete_upper,
        relaxations,
        output_lower_coeffs,
    })
}

/// Evaluates many constraint sets concurrently. Results are in input order
/// and identical to calling [`compute_linear_bounds`] one at a time.
pub fn compute_linear_bounds_batch(
    network: &Network,
    domain: &InputBox,
    constraint_sets: &[ConstraintSet],
) -> Vec<Result<LinearBoundsSet>> {
    constraint_sets
        .par_iter()
        .map(|c| compute_linear_bounds(network, domain, c))
        .collect()
}

/// Per-layer concrete lower and upper bounds.
pub type LayerBounds = (Vec<DVector<f64>>, Vec<DVector<f64>>);

/// Concrete bounds `(l, u)` for every hidden layer.
pub fn compute_intermediate_bounds(
    network: &Network,
    domain: &InputBox,
    constraints: &ConstraintSet,
) -> Result<LayerBounds> {
    let mut bounds = compute_linear_bounds(network, domain, constraints)?;
    let hidden = network.hidden_layers();
    bounds.concrete_lower.truncate(hidden);
    bounds.concrete_upper.truncate(hidden);
    Ok((bounds.concrete_lower, bounds.concrete_upper))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::AffineLayer;

    fn net(layers: Vec<(Vec<Vec<f64>>, Vec<f64>)>) -> Network {
        Network::new(
            layers
                .into_iter()
                .map(|(w, b)| AffineLayer::from_rows(&w, &b).unwrap())
                .collect(),
        )
        .unwrap()
    }

    fn unit_box(n: usize, r: f64) -> InputBox {
        InputBox::new(DVector::from_element(n, -r), DVector::from_element(n, r)).unwrap()
    }

    fn sandwiches(r: &ReluRelaxation, l: f64, u: f64) -> bool {
        (0..=200).all(|i| {
            let y = l + (u - l) * i as f64 / 200.0;
            let relu = y.max(0.0);
            r.lower_slope * y + r.lower_intercept <= relu + 1e-12
                && relu <= r.upper_slope * y + r.upper_intercept + 1e-12
        })
    }

    #[test]
    fn relax_symmetric_interval() {
        let r = relax_relu(-1.0, 1.0, None).unwrap();
        assert_eq!((r.upper_slope, r.upper_intercept), (0.5, 0.5));
        assert_eq!(r.lower_slope, 1.0);
        assert!(sandwiches(&r, -1.0, 1.0));
    }

    #[test]
    fn relax_stable_active() {
        let r = relax_relu(2.0, 5.0, None).unwrap();
        assert_eq!(r, ReluRelaxation::ACTIVE);
    }

    #[test]
    fn relax_mostly_negative() {
        let r = relax_relu(-3.0, 1.0, None).unwrap();
        assert_eq!((r.upper_slope, r.upper_intercept), (0.25, 0.75));
        assert_eq!(r.lower_slope, 0.0);
        assert!(sandwiches(&r, -3.0, 1.0));
    }

    #[test]
    fn relax_constraints_override_bounds() {
        assert_eq!(
            relax_relu(-3.0, 1.0, Some(Sign::GeqZero)).unwrap(),
            ReluRelaxation::ACTIVE
        );
        assert_eq!(
            relax_relu(-3.0, 1.0, Some(Sign::LtZero)).unwrap(),
            ReluRelaxation::INACTIVE
        );
        assert_eq!(
            relax_relu(-3.0, -1.0, None).unwrap(),
            ReluRelaxation::INACTIVE
        );
    }

    #[test]
    fn relax_rejects_crossed_interval() {
        assert!(matches!(
            relax_relu(1.0, 0.0, None),
            Err(Error::InvalidInterval { .. })
        ));
    }

    #[test]
    fn affine_network_is_exact() {
        let n = net(vec![(vec![vec![2.0]], vec![-1.0])]);
        let dom =
            InputBox::new(DVector::from_vec(vec![0.0]), DVector::from_vec(vec![1.0])).unwrap();
        let b = compute_linear_bounds(&n, &dom, &ConstraintSet::new()).unwrap();
        let f = b.output();
        assert_eq!(f.lower_a[(0, 0)], 2.0);
        assert_eq!(f.upper_a[(0, 0)], 2.0);
        assert_eq!(f.lower_b[0], -1.0);
        assert_eq!(f.upper_b[0], -1.0);
        assert_eq!(
            (b.concrete_lower[0][0], b.concrete_upper[0][0]),
            (-1.0, 1.0)
        );
    }

    #[test]
    fn forced_active_relu_is_identity() {
        let n = net(vec![
            (vec![vec![1.0]], vec![0.0]),
            (vec![vec![1.0]], vec![0.0]),
        ]);
        let dom = unit_box(1, 1.0);
        let c: ConstraintSet = [(NeuronId::new(0, 0), Sign::GeqZero)].into_iter().collect();
        let b = compute_linear_bounds(&n, &dom, &c).unwrap();
        let f = b.output();
        assert_eq!(f.lower_a[(0, 0)], 1.0);
        assert_eq!(f.upper_a[(0, 0)], 1.0);
        assert_eq!(f.lower_b[0], 0.0);
        assert_eq!(f.upper_b[0], 0.0);
        assert_eq!(b.concrete_lower[0][0], 0.0);
        assert_eq!(b.concrete_upper[0][0], 1.0);
    }

    #[test]
    fn first_layer_bounds_are_box_extrema() {
        let n = net(vec![
            (vec![vec![1.0]], vec![0.0]),
            (vec![vec![1.0]], vec![0.0]),
        ]);
        let (l, u) =
            compute_intermediate_bounds(&n, &unit_box(1, 1.0), &ConstraintSet::new()).unwrap();
        assert_eq!((l[0][0], u[0][0]), (-1.0, 1.0));
    }

    #[test]
    fn fully_constrained_network_has_exact_extrema() {
        let n = net(vec![
            (vec![vec![1.0, -1.0], vec![0.5, 2.0]], vec![0.1, -0.3]),
            (vec![vec![1.0, 1.0]], vec![0.2]),
        ]);
        let dom = unit_box(2, 1.0);
        let c: ConstraintSet = [
            (NeuronId::new(0, 0), Sign::GeqZero),
            (NeuronId::new(0, 1), Sign::LtZero),
        ]
        .into_iter()
        .collect();
        let b = compute_linear_bounds(&n, &dom, &c).unwrap();
        let f = b.output();
        assert!(f.rows_identical(0));
        // f = y0 = x0 - x1 + 0.1 + 0.2 on the constrained region
        assert_eq!(
            f.lower_a.row(0).iter().copied().collect::<Vec<_>>(),
            vec![1.0, -1.0]
        );
        assert!((f.lower_b[0] - 0.3).abs() < 1e-15);
        assert!((b.concrete_lower[1][0] - (-1.7)).abs() < 1e-12);
        assert!((b.concrete_upper[1][0] - 2.3).abs() < 1e-12);
    }

    #[test]
    fn unknown_neuron_rejected() {
        let n = net(vec![
            (vec![vec![1.0]], vec![0.0]),
            (vec![vec![1.0]], vec![0.0]),
        ]);
        let c: ConstraintSet = [(NeuronId::new(0, 3), Sign::GeqZero)].into_iter().collect();
        assert!(matches!(
            compute_linear_bounds(&n, &unit_box(1, 1.0), &c),
            Err(Error::UnknownNeuron { layer: 0, index: 3 })
        ));
        let c: ConstraintSet = [(NeuronId::new(1, 0), Sign::GeqZero)].into_iter().collect();
        assert!(compute_linear_bounds(&n, &unit_box(1, 1.0), &c).is_err());
    }

    #[test]
    fn infeasible_constraints_still_produce_bounds() {
        // y = x - 5 on [-1, 1] is always negative; forcing y >= 0 is empty.
        let n = net(vec![
            (vec![vec![1.0]], vec![-5.0]),
            (vec![vec![1.0]], vec![0.0]),
        ]);
        let c: ConstraintSet = [(NeuronId::new(0, 0), Sign::GeqZero)].into_iter().collect();
        let b = compute_linear_bounds(&n, &unit_box(1, 1.0), &c).unwrap();
        assert!(b.concrete_lower[0][0] > b.concrete_upper[0][0]);
    }

    #[test]
    fn constraint_set_prefix_and_layer_views() {
        let c: ConstraintSet = [
            (NeuronId::new(1, 2), Sign::LtZero),
            (NeuronId::new(0, 4), Sign::GeqZero),
            (NeuronId::new(0, 1), Sign::LtZero),
        ]
        .into_iter()
        .collect();
        let order: Vec<_> = c.iter().map(|(n, _)| n).collect();
        assert_eq!(
            order,
            vec![
                NeuronId::new(0, 1),
                NeuronId::new(0, 4),
                NeuronId::new(1, 2)
            ]
        );
        assert_eq!(c.prefix(1).len(), 2);
        assert_eq!(c.layer(1).collect::<Vec<_>>(), vec![(2, Sign::LtZero)]);
        assert!(c.with(NeuronId::new(0, 1), Sign::GeqZero).is_err());
    }
}
