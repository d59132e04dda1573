#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use probverif_core::{AffineLayer, ConstraintSet, InputBox, Network, NeuronId, Sign};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_network(rng: &mut ChaCha8Rng, widths: &[usize]) -> Network {
    let layers = widths
        .windows(2)
        .map(|w| {
            let weights = DMatrix::from_fn(w[1], w[0], |_, _| StandardNormal.sample(rng));
            let bias = DVector::from_fn(w[1], |_, _| {
                let v: f64 = StandardNormal.sample(rng);
                0.5 * v
            });
            AffineLayer::new(weights, bias).unwrap()
        })
        .collect();
    Network::new(layers).unwrap()
}

pub fn random_box(rng: &mut ChaCha8Rng, dim: usize) -> InputBox {
    let center: Vec<f64> = (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect();
    let radius: Vec<f64> = (0..dim).map(|_| rng.random_range(0.05..1.0)).collect();
    InputBox::new(
        DVector::from_fn(dim, |i, _| center[i] - radius[i]),
        DVector::from_fn(dim, |i, _| center[i] + radius[i]),
    )
    .unwrap()
}

pub fn sample_box(rng: &mut ChaCha8Rng, domain: &InputBox) -> DVector<f64> {
    DVector::from_fn(domain.dim(), |i, _| {
        rng.random_range(domain.lo()[i]..=domain.hi()[i])
    })
}

/// A random subset of the sign pattern realised at `x`, so that the set is
/// satisfiable.
pub fn constraints_at(
    rng: &mut ChaCha8Rng,
    network: &Network,
    x: &DVector<f64>,
    keep: f64,
) -> ConstraintSet {
    let pre = network.preactivations(x).unwrap();
    let mut set = ConstraintSet::new();
    for (k, y) in pre.iter().take(network.hidden_layers()).enumerate() {
        for (j, v) in y.iter().enumerate() {
            if rng.random_bool(keep) {
                let sign = if *v >= 0.0 {
                    Sign::GeqZero
                } else {
                    Sign::LtZero
                };
                set.insert(NeuronId::new(k, j), sign).unwrap();
            }
        }
    }
    set
}

/// Up to `count` points of `domain` satisfying `constraints`.
pub fn satisfying_points(
    rng: &mut ChaCha8Rng,
    network: &Network,
    domain: &InputBox,
    constraints: &ConstraintSet,
    count: usize,
    max_draws: usize,
) -> Vec<DVector<f64>> {
    let mut out = Vec::new();
    for _ in 0..max_draws {
        if out.len() == count {
            break;
        }
        let x = sample_box(rng, domain);
        if constraints.satisfied_by(&network.preactivations(&x).unwrap()) {
            out.push(x);
        }
    }
    out
}

/// `f(x) = relu(x2) + relu(-x2) - 0.3` plus an unstable first neuron on `x1`
/// that does not reach the output. `X ~ N(0, I)`, so `P[f > 0] = P[|X2| > 0.3]`.
pub fn decoy_instance(eta: f64) -> probverif_core::ProblemInstance {
    let net = Network::new(vec![
        AffineLayer::from_rows(
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![0.0, -1.0]],
            &[0.0, 0.0, 0.0],
        )
        .unwrap(),
        AffineLayer::from_rows(&[vec![0.0, 1.0, 1.0]], &[-0.3]).unwrap(),
    ])
    .unwrap();
    probverif_core::ProblemInstance::new(
        net,
        DVector::zeros(2),
        probverif_core::Covariance::isotropic(2, 1.0),
        eta,
        3.0,
    )
    .unwrap()
}

/// `P[|N(0, 1)| > 0.3]`
pub const DECOY_PROBABILITY: f64 = 0.7641771556220948;

pub fn small_toy(seed: u64) -> probverif_core::ProblemInstance {
    probverif_core::ToyConfig {
        widths: vec![2, 4, 4, 1],
        ..probverif_core::ToyConfig::default()
    }
    .instance(seed)
    .unwrap()
}
