//! Branch and bound over ReLU sign splits.
//!
//! The pool holds branches `<p_lower, p_upper, C>`. Each iteration sums the
//! per-branch bounds into global bounds, stops when they decide the
//! threshold, and otherwise pops the branch with the largest gap and replaces
//! it by its two children. A branch's split neuron is chosen when the branch
//! is created, while its linear bounds are still at hand; only the two
//! probability events are kept afterwards.
//!
//! Per-branch estimates are restricted to the truncation box. The Gaussian
//! mass outside the box is added once to the global upper bound.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use tracing::{debug, info};

use crate::error::{Error, Result};
use crate::lirpa::{compute_linear_bounds, ConstraintSet, LinearBoundsSet, Sign};
use crate::model::ProblemInstance;
use crate::prob::{
    bernstein_confidence, build_branch_events, derive_seed, estimate_event_pair, kahan_sum,
    BoundSide, GaussianInput, LinearEvent, ProbEstimate, TruncationDomain, TARGET_CONFIDENCE,
};
use crate::split::{choose_split, SelectionContext, SplitChoice, Strategy};

pub const DEFAULT_SAMPLES: u64 = 100_000;
pub const DEFAULT_TIME_LIMIT_S: f64 = 120.0;

/// Resource limits and sampling parameters for one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    /// `None` runs until a verdict is reached.
    pub time_limit: Option<Duration>,
    /// Samples per branch probability.
    pub n_samples: u64,
    /// Nested splits applied to each popped branch.
    pub split_depth: usize,
    /// Branches popped per wave; their children are evaluated concurrently.
    pub batch_size: usize,
    /// Ceiling for the per-branch sample count during confidence escalation.
    pub max_samples: u64,
    pub target_confidence: f64,
    /// Samples per uncertainty level during split selection. `None` means
    /// `max(n_samples / 10, 10_000)`.
    pub uncertainty_samples: Option<u64>,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            time_limit: Some(Duration::from_secs_f64(DEFAULT_TIME_LIMIT_S)),
            n_samples: DEFAULT_SAMPLES,
            split_depth: 1,
            batch_size: 1,
            max_samples: 64 * DEFAULT_SAMPLES,
            target_confidence: TARGET_CONFIDENCE,
            uncertainty_samples: None,
        }
    }
}

impl Budget {
    pub fn unlimited() -> Self {
        Self {
            time_limit: None,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidArgument(msg.to_string()));
        if self.n_samples == 0 {
            return bad("n_samples must be at least 1");
        }
        if self.split_depth == 0 {
            return bad("split_depth must be at least 1");
        }
        if self.batch_size == 0 {
            return bad("batch_size must be at least 1");
        }
        if self.max_samples < self.n_samples {
            return bad("max_samples must be at least n_samples");
        }
        if !(self.target_confidence >= 0.0 && self.target_confidence < 1.0) {
            return bad("target_confidence must lie in [0, 1)");
        }
        if self.time_limit.is_some_and(|t| t.is_zero()) {
            return bad("time limit must be positive");
        }
        if self.uncertainty_samples == Some(0) {
            return bad("uncertainty_samples must be at least 1");
        }
        Ok(())
    }

    fn uncertainty_samples(&self, n_samples: u64) -> u64 {
        self.uncertainty_samples
            .unwrap_or_else(|| (n_samples / 10).max(10_000))
    }
}

/// A subproblem of the partition.
#[derive(Debug, Clone)]
pub struct Branch {
    pub id: u64,
    pub constraints: ConstraintSet,
    pub p_lower: ProbEstimate,
    pub p_upper: ProbEstimate,
    pub marked_split: Option<SplitChoice>,
    lower_event: LinearEvent,
    upper_event: LinearEvent,
}

impl Branch {
    pub fn gap(&self) -> f64 {
        self.p_upper.value - self.p_lower.value
    }

    pub fn events(&self) -> (&LinearEvent, &LinearEvent) {
        (&self.lower_event, &self.upper_event)
    }
}

impl PartialEq for Branch {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Branch {}

impl PartialOrd for Branch {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Branch {
    /// Larger gap first, then smaller id.
    fn cmp(&self, other: &Self) -> Ordering {
        self.gap()
            .total_cmp(&other.gap())
            .then_with(|| other.id.cmp(&self.id))
    }
}

/// Max-gap priority queue of branches.
#[derive(Debug, Default)]
pub struct BranchPool {
    heap: BinaryHeap<Branch>,
}

impl BranchPool {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, branch: Branch) {
        self.heap.push(branch);
    }

    pub fn pop(&mut self) -> Option<Branch> {
        self.heap.pop()
    }

    pub fn peek(&self) -> Option<&Branch> {
        self.heap.peek()
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Branch> {
        self.heap.iter()
    }

    /// Branches sorted by id.
    pub fn sorted(&self) -> Vec<&Branch> {
        let mut v: Vec<&Branch> = self.heap.iter().collect();
        v.sort_by_key(|b| b.id);
        v
    }

    fn drain(&mut self) -> Vec<Branch> {
        let mut v = std::mem::take(&mut self.heap).into_vec();
        v.sort_by_key(|b| b.id);
        v
    }
}

/// Sums of per-branch estimates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GlobalBounds {
    pub lower: f64,
    /// Includes the truncation mass.
    pub upper: f64,
    pub variance_lower: f64,
    pub variance_upper: f64,
}

/// Global bounds `P_lower = sum p_lower`, `P_upper = sum p_upper + delta`.
pub fn bound_global_probability(pool: &BranchPool, delta: f64) -> Result<GlobalBounds> {
    if pool.is_empty() {
        return Err(Error::InvalidArgument("branch pool is empty".into()));
    }
    let branches = pool.sorted();
    let lower = kahan_sum(branches.iter().map(|b| b.p_lower.value));
    let upper = kahan_sum(branches.iter().map(|b| b.p_upper.value)) + delta;
    let var = |p: f64| p * (1.0 - p);
    Ok(GlobalBounds {
        lower,
        upper,
        variance_lower: kahan_sum(branches.iter().map(|b| var(b.p_lower.value))),
        variance_upper: kahan_sum(branches.iter().map(|b| var(b.p_upper.value))),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    True,
    False,
    Timeout,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    Decided,
    TimeLimit,
    /// Root bounds do not decide and splitting is disabled.
    NoSplitMode,
    /// Every branch has zero gap but the truncation mass keeps the global
    /// bounds straddling the threshold.
    Exhausted,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub verdict: Verdict,
    #[serde(rename = "P_lower")]
    pub p_lower: f64,
    #[serde(rename = "P_upper")]
    pub p_upper: f64,
    pub confidence: f64,
    pub splits: u64,
    pub branches_final: usize,
    pub wall_time: f64,
    pub seed: u64,
    pub strategy: String,
    pub eta: f64,
    pub delta: f64,
    pub n_samples: u64,
    pub root_unstable: usize,
    pub stop_reason: StopReason,
}

impl VerificationReport {
    pub fn decided(&self) -> bool {
        self.verdict != Verdict::Timeout
    }

    /// JSON without the wall-clock field, for reproducibility comparisons.
    pub fn to_json_without_timing(&self) -> String {
        let mut v = serde_json::to_value(self).expect("report serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("wall_time");
        }
        serde_json::to_string(&v).expect("report serializes")
    }
}

/// Progress notifications, used for monitoring and tests.
#[derive(Debug, Clone)]
pub enum EngineEvent {
    /// Global bounds at the top of an iteration.
    Iteration {
        iteration: u64,
        bounds: GlobalBounds,
        n_samples: u64,
        pool_size: usize,
    },
    /// A branch was taken from the pool for splitting.
    Popped {
        branch_id: u64,
        gap: f64,
        choice: SplitChoice,
        constraints: ConstraintSet,
    },
    /// A split neuron was chosen for a branch; `rows_identical` tells
    /// whether its lower and upper linear bounds coincide.
    Marked {
        branch_id: u64,
        choice: SplitChoice,
        rows_identical: bool,
    },
    /// All branches are re-estimated with more samples.
    Escalated { n_samples: u64 },
}

struct Engine<'a> {
    problem: &'a ProblemInstance,
    gaussian: GaussianInput,
    domain: TruncationDomain,
    strategy: Option<Strategy>,
    budget: &'a Budget,
    seed: u64,
    n_samples: u64,
    round: u64,
    next_id: u64,
    splits: u64,
    split_cap: u64,
    start: Instant,
}

struct Evaluated {
    branch: Branch,
    rows_identical: Option<bool>,
}

impl<'a> Engine<'a> {
    fn new(
        problem: &'a ProblemInstance,
        strategy: Option<Strategy>,
        budget: &'a Budget,
        seed: u64,
    ) -> Result<Self> {
        budget.validate()?;
        let gaussian = GaussianInput::new(problem.input_mean.clone(), problem.input_cov.clone())?;
        let domain = TruncationDomain::new(&gaussian, problem.truncation_z)?;
        let hidden = problem.network.hidden_neurons();
        let split_cap = if hidden >= 63 {
            u64::MAX
        } else {
            (1u64 << hidden) - 1
        };
        Ok(Self {
            problem,
            gaussian,
            domain,
            strategy,
            budget,
            seed,
            n_samples: budget.n_samples,
            round: 0,
            next_id: 0,
            splits: 0,
            split_cap,
            start: Instant::now(),
        })
    }

    fn out_of_time(&self) -> bool {
        self.budget
            .time_limit
            .is_some_and(|limit| self.start.elapsed() >= limit)
    }

    fn branch_seed(&self, id: u64, purpose: u64) -> u64 {
        derive_seed(self.seed, &[self.round, id, purpose])
    }

    fn bounds(&self, constraints: &ConstraintSet) -> Result<LinearBoundsSet> {
        compute_linear_bounds(&self.problem.network, &self.domain.input_box, constraints)
    }

    fn choose(
        &self,
        bounds: &LinearBoundsSet,
        constraints: &ConstraintSet,
        seed: u64,
    ) -> Result<(SplitChoice, bool)> {
        let strategy = self.strategy.expect("split selection requires a strategy");
        let ctx = SelectionContext {
            gaussian: &self.gaussian,
            domain: &self.domain,
            n_samples: self.budget.uncertainty_samples(self.n_samples),
            seed,
        };
        let choice = choose_split(strategy, bounds, constraints, &ctx)?;
        let identical = bounds.per_layer[choice.neuron.layer].rows_identical(choice.neuron.index);
        Ok((choice, identical))
    }

    /// Bounds, probability estimates and (if the gap is positive) the split
    /// mark for a new branch.
    fn evaluate(&self, id: u64, constraints: ConstraintSet) -> Result<Evaluated> {
        let bounds = self.bounds(&constraints)?;
        let (lower_event, upper_event) = build_branch_events(&bounds, &constraints)?;
        let (p_lower, p_upper) = estimate_event_pair(
            &lower_event,
            &upper_event,
            &self.gaussian,
            &self.domain,
            self.n_samples,
            self.branch_seed(id, 0),
        )?;
        let mut branch = Branch {
            id,
            constraints,
            p_lower,
            p_upper,
            marked_split: None,
            lower_event,
            upper_event,
        };
        let mut rows_identical = None;
        if self.strategy.is_some() && branch.gap() > 0.0 {
            let (choice, identical) =
                self.choose(&bounds, &branch.constraints, self.branch_seed(id, 1))?;
            branch.marked_split = Some(choice);
            rows_identical = Some(identical);
        }
        Ok(Evaluated {
            branch,
            rows_identical,
        })
    }

    /// Re-estimates a branch at the current sample count and round.
    fn reestimate(&self, mut branch: Branch) -> Result<Evaluated> {
        let (p_lower, p_upper) = estimate_event_pair(
            &branch.lower_event,
            &branch.upper_event,
            &self.gaussian,
            &self.domain,
            self.n_samples,
            self.branch_seed(branch.id, 0),
        )?;
        branch.p_lower = p_lower;
        branch.p_upper = p_upper;
        let mut rows_identical = None;
        if self.strategy.is_none() || branch.gap() <= 0.0 {
            branch.marked_split = None;
        } else if branch.marked_split.is_none() {
            let bounds = self.bounds(&branch.constraints)?;
            let (choice, identical) =
                self.choose(&bounds, &branch.constraints, self.branch_seed(branch.id, 1))?;
            branch.marked_split = Some(choice);
            rows_identical = Some(identical);
        }
        Ok(Evaluated {
            branch,
            rows_identical,
        })
    }

    /// Applies `split_depth` nested splits to a popped branch and returns
    /// the leaf constraint sets.
    fn expand(&mut self, parent: &Branch) -> Result<Vec<ConstraintSet>> {
        let first = parent.marked_split.ok_or_else(|| {
            Error::Invariant(format!("branch {} popped without a split mark", parent.id))
        })?;
        let mut frontier = vec![(parent.constraints.clone(), first)];
        let mut leaves = Vec::new();
        for level in 0..self.budget.split_depth {
            let mut next = Vec::new();
            for (slot, (constraints, choice)) in frontier.into_iter().enumerate() {
                self.splits += 1;
                if self.splits > self.split_cap {
                    return Err(Error::Invariant(format!(
                        "split count {} exceeds the cap {}",
                        self.splits, self.split_cap
                    )));
                }
                for (side, sign) in [Sign::GeqZero, Sign::LtZero].into_iter().enumerate() {
                    let child = constraints.with(choice.neuron, sign)?;
                    if level + 1 < self.budget.split_depth {
                        let bounds = self.bounds(&child)?;
                        if !bounds.unstable_neurons(&child).is_empty() {
                            let seed = derive_seed(
                                self.seed,
                                &[
                                    self.round,
                                    parent.id,
                                    level as u64,
                                    slot as u64,
                                    side as u64,
                                    2,
                                ],
                            );
                            let (next_choice, _) = self.choose(&bounds, &child, seed)?;
                            next.push((child, next_choice));
                            continue;
                        }
                    }
                    leaves.push(child);
                }
            }
            frontier = next;
        }
        Ok(leaves)
    }

    fn evaluate_all(&self, jobs: Vec<(u64, ConstraintSet)>) -> Result<Vec<Evaluated>> {
        jobs.into_par_iter()
            .map(|(id, c)| self.evaluate(id, c))
            .collect()
    }

    fn confidence(
        &self,
        pool: &BranchPool,
        global: &GlobalBounds,
        verdict: Verdict,
    ) -> Result<f64> {
        let branches = pool.sorted();
        match verdict {
            Verdict::True => {
                let values: Vec<f64> = branches.iter().map(|b| b.p_lower.value).collect();
                bernstein_confidence(
                    &values,
                    0.0,
                    self.n_samples,
                    self.problem.eta,
                    BoundSide::Lower,
                )
            }
            Verdict::False => {
                let values: Vec<f64> = branches.iter().map(|b| b.p_upper.value).collect();
                debug_assert!(global.upper < self.problem.eta);
                bernstein_confidence(
                    &values,
                    self.domain.delta,
                    self.n_samples,
                    self.problem.eta,
                    BoundSide::Upper,
                )
            }
            Verdict::Timeout => Ok(0.0),
        }
    }

    fn report(
        &self,
        verdict: Verdict,
        global: GlobalBounds,
        confidence: f64,
        pool: &BranchPool,
        root_unstable: usize,
        stop_reason: StopReason,
    ) -> VerificationReport {
        VerificationReport {
            verdict,
            p_lower: global.lower,
            p_upper: global.upper,
            confidence,
            splits: self.splits,
            branches_final: pool.len(),
            wall_time: self.start.elapsed().as_secs_f64(),
            seed: self.seed,
            strategy: self.strategy.map_or("no-split", |s| s.name()).to_string(),
            eta: self.problem.eta,
            delta: self.domain.delta,
            n_samples: self.n_samples,
            root_unstable,
            stop_reason,
        }
    }

    fn run(&mut self, observer: &mut dyn FnMut(&EngineEvent)) -> Result<VerificationReport> {
        let eta = self.problem.eta;
        let root_bounds = self.bounds(&ConstraintSet::new())?;
        let root_unstable = root_bounds.unstable_neurons(&ConstraintSet::new()).len();
        drop(root_bounds);

        let mut pool = BranchPool::new();
        let root = self.evaluate(self.next_id, ConstraintSet::new())?;
        self.next_id += 1;
        self.notify_mark(&root, observer);
        pool.insert(root.branch);

        let mut iteration = 0u64;
        loop {
            let global = bound_global_probability(&pool, self.domain.delta)?;
            observer(&EngineEvent::Iteration {
                iteration,
                bounds: global,
                n_samples: self.n_samples,
                pool_size: pool.len(),
            });
            debug!(
                iteration,
                p_lower = global.lower,
                p_upper = global.upper,
                pool = pool.len(),
                top_gap = pool.peek().map_or(0.0, Branch::gap),
                "bab iteration"
            );
            iteration += 1;

            let verdict = if global.lower >= eta {
                Some(Verdict::True)
            } else if global.upper < eta {
                Some(Verdict::False)
            } else {
                None
            };

            // Below the confidence bar, refinement continues while some branch
            // has a gap; once none has, the sample count is doubled instead.
            if let Some(verdict) = verdict {
                let confidence = self.confidence(&pool, &global, verdict)?;
                let refinable =
                    self.strategy.is_some() && pool.peek().is_some_and(|b| b.gap() > 0.0);
                let escalable = self.n_samples.saturating_mul(2) <= self.budget.max_samples;
                if confidence >= self.budget.target_confidence
                    || self.out_of_time()
                    || !(refinable || escalable)
                {
                    info!(
                        ?verdict,
                        confidence,
                        splits = self.splits,
                        "verdict reached"
                    );
                    return Ok(self.report(
                        verdict,
                        global,
                        confidence,
                        &pool,
                        root_unstable,
                        StopReason::Decided,
                    ));
                }
                if !refinable {
                    self.escalate(&mut pool, observer)?;
                    continue;
                }
            }

            if self.out_of_time() {
                return Ok(self.report(
                    Verdict::Timeout,
                    global,
                    0.0,
                    &pool,
                    root_unstable,
                    StopReason::TimeLimit,
                ));
            }
            if self.strategy.is_none() {
                return Ok(self.report(
                    Verdict::Timeout,
                    global,
                    0.0,
                    &pool,
                    root_unstable,
                    StopReason::NoSplitMode,
                ));
            }
            if pool.peek().is_none_or(|b| b.gap() <= 0.0) {
                return Ok(self.report(
                    Verdict::Timeout,
                    global,
                    0.0,
                    &pool,
                    root_unstable,
                    StopReason::Exhausted,
                ));
            }

            let mut jobs = Vec::new();
            for _ in 0..self.budget.batch_size {
                match pool.peek() {
                    Some(b) if b.gap() > 0.0 => {}
                    _ => break,
                }
                let parent = pool.pop().expect("peeked");
                let choice = parent.marked_split.ok_or_else(|| {
                    Error::Invariant(format!("branch {} has a gap but no split mark", parent.id))
                })?;
                observer(&EngineEvent::Popped {
                    branch_id: parent.id,
                    gap: parent.gap(),
                    choice,
                    constraints: parent.constraints.clone(),
                });
                for leaf in self.expand(&parent)? {
                    jobs.push((self.next_id, leaf));
                    self.next_id += 1;
                }
            }
            for evaluated in self.evaluate_all(jobs)? {
                self.notify_mark(&evaluated, observer);
                pool.insert(evaluated.branch);
            }
        }
    }

    fn notify_mark(&self, evaluated: &Evaluated, observer: &mut dyn FnMut(&EngineEvent)) {
        if let (Some(choice), Some(identical)) =
            (evaluated.branch.marked_split, evaluated.rows_identical)
        {
            observer(&EngineEvent::Marked {
                branch_id: evaluated.branch.id,
                choice,
                rows_identical: identical,
            });
        }
    }

    fn escalate(
        &mut self,
        pool: &mut BranchPool,
        observer: &mut dyn FnMut(&EngineEvent),
    ) -> Result<()> {
        self.n_samples *= 2;
        self.round += 1;
        info!(
            n_samples = self.n_samples,
            "confidence below target, re-estimating"
        );
        observer(&EngineEvent::Escalated {
            n_samples: self.n_samples,
        });
        let branches = pool.drain();
        let evaluated: Vec<Evaluated> = branches
            .into_par_iter()
            .map(|b| self.reestimate(b))
            .collect::<Result<_>>()?;
        for e in evaluated {
            self.notify_mark(&e, observer);
            pool.insert(e.branch);
        }
        Ok(())
    }
}

/// Decides `P[f(X) > 0] >= eta` by branch and bound.
pub fn verify(
    problem: &ProblemInstance,
    strategy: Strategy,
    budget: &Budget,
    seed: u64,
) -> Result<VerificationReport> {
    verify_with_observer(problem, strategy, budget, seed, &mut |_| {})
}

pub fn verify_with_observer(
    problem: &ProblemInstance,
    strategy: Strategy,
    budget: &Budget,
    seed: u64,
    observer: &mut dyn FnMut(&EngineEvent),
) -> Result<VerificationReport> {
    Engine::new(problem, Some(strategy), budget, seed)?.run(observer)
}

/// Root-branch bounds only; sound but incomplete. Undecided instances come
/// back as `Timeout` with zero splits.
pub fn verify_no_split(
    problem: &ProblemInstance,
    budget: &Budget,
    seed: u64,
) -> Result<VerificationReport> {
    Engine::new(problem, None, budget, seed)?.run(&mut |_| {})
}

/// Evaluates one branch outside the engine: linear bounds, events and
/// shared-sample estimates, without a split mark.
pub fn evaluate_branch(
    problem: &ProblemInstance,
    constraints: &ConstraintSet,
    n_samples: u64,
    seed: u64,
) -> Result<Branch> {
    let budget = Budget {
        n_samples,
        max_samples: n_samples,
        ..Budget::unlimited()
    };
    let engine = Engine::new(problem, None, &budget, seed)?;
    Ok(engine.evaluate(0, constraints.clone())?.branch)
}

/// Splits `parent` on `choice` and evaluates both children with the given
/// strategy marking them.
pub fn split_branch(
    problem: &ProblemInstance,
    parent: &Branch,
    strategy: Strategy,
    n_samples: u64,
    seed: u64,
) -> Result<(Branch, Branch)> {
    let choice = parent
        .marked_split
        .ok_or_else(|| Error::Invariant(format!("branch {} has no split mark", parent.id)))?;
    let budget = Budget {
        n_samples,
        max_samples: n_samples,
        ..Budget::unlimited()
    };
    let engine = Engine::new(problem, Some(strategy), &budget, seed)?;
    let geq = engine.evaluate(1, parent.constraints.with(choice.neuron, Sign::GeqZero)?)?;
    let lt = engine.evaluate(2, parent.constraints.with(choice.neuron, Sign::LtZero)?)?;
    Ok((geq.branch, lt.branch))
}

/// Like [`evaluate_branch`] but also marks a split neuron when the gap is
/// positive.
pub fn evaluate_marked_branch(
    problem: &ProblemInstance,
    constraints: &ConstraintSet,
    strategy: Strategy,
    n_samples: u64,
    seed: u64,
) -> Result<Branch> {
    let budget = Budget {
        n_samples,
        max_samples: n_samples,
        ..Budget::unlimited()
    };
    let engine = Engine::new(problem, Some(strategy), &budget, seed)?;
    Ok(engine.evaluate(0, constraints.clone())?.branch)
}
