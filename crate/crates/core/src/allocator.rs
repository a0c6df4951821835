//! Bandwidth allocation under a shared budget.
//!
//! A scenario is `n` customers with fixed file sizes and quality scores, a
//! satisfaction model, and total bandwidth `B`. The allocator picks the
//! vector `A` (with `sum(A) <= B`, `A_i >= a_min`) minimizing one of three
//! dissatisfaction objectives. Three metaheuristics (simulated annealing,
//! a genetic algorithm, tabu search) share a grid brute-force oracle and a
//! requirement-proportional baseline for validation.
//!
//! SA and tabu move bandwidth between slots, so the state carries one extra
//! "unallocated" slot: transfers into it explore allocations that leave part
//! of the budget unused, which the absolute-difference objectives reward when
//! a customer would otherwise be over-satisfied. Every strategy warm-starts
//! from the equal split and (when the model permits) the baseline point, and
//! those candidates count as evaluated, so a search can never return anything
//! worse than them.

use crate::error::{Error, Result};
use crate::parallel;
use crate::satisfaction::{
    self, image_quality, BandwidthRequirement, Customer, SatisfactionModel,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    /// `sum_i |US_i - tau_i|` — over-satisfaction is penalized too.
    TotalAbs,
    /// `max_i |US_i - tau_i|`.
    MaxAbs,
    /// `sum_i max(tau_i - US_i, 0)` — only shortfalls count.
    TotalOneSided,
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub customers: Vec<Customer>,
    /// Combined gateway bandwidth B in bits/s.
    pub total_bandwidth: f64,
    pub objective: Objective,
    pub model: SatisfactionModel,
    /// Per-customer allocation floor (default 0).
    pub a_min: f64,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        if self.customers.is_empty() {
            return Err(Error::InvalidScenario("no customers".into()));
        }
        if !(self.total_bandwidth > 0.0) {
            return Err(Error::NonPositiveBandwidth(self.total_bandwidth));
        }
        if !(self.a_min >= 0.0) {
            return Err(Error::InvalidScenario(format!("a_min {} negative", self.a_min)));
        }
        if self.customers.len() as f64 * self.a_min > self.total_bandwidth {
            return Err(Error::InvalidScenario("n * a_min exceeds total bandwidth".into()));
        }
        for c in &self.customers {
            c.validate()?;
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.customers.len()
    }
}

/// An allocation plus how it was found.
#[derive(Debug, Clone, PartialEq)]
pub struct Allocation {
    pub a: Vec<f64>,
    pub objective_value: f64,
    pub evaluations: u64,
    pub seed: u64,
}

// Feasibility slack for intermediate grid points whose sums carry fp dust;
// returned vectors are always projected back under B exactly.
const FEASIBILITY_REL_TOL: f64 = 1e-12;

fn is_feasible(a: &[f64], sc: &Scenario) -> bool {
    a.len() == sc.n()
        && a.iter().all(|&v| v >= sc.a_min && v.is_finite())
        && a.iter().sum::<f64>() <= sc.total_bandwidth * (1.0 + FEASIBILITY_REL_TOL)
}

/// Clamps to the floor and rescales the above-floor mass until the sum is at
/// most B in exact f64 comparison. No-op for vectors that already comply.
fn project_feasible(a: &mut [f64], sc: &Scenario) {
    for v in a.iter_mut() {
        if *v < sc.a_min {
            *v = sc.a_min;
        }
    }
    let floor_total = sc.a_min * a.len() as f64;
    let mut guard = 0;
    while a.iter().sum::<f64>() > sc.total_bandwidth && guard < 64 {
        let above: f64 = a.iter().map(|v| v - sc.a_min).sum();
        if above <= 0.0 {
            break;
        }
        let factor = ((sc.total_bandwidth - floor_total) / above).min(1.0) * (1.0 - 1e-15);
        for v in a.iter_mut() {
            *v = sc.a_min + (*v - sc.a_min) * factor.max(0.0);
        }
        guard += 1;
    }
}

/// Precomputed per-customer quality scores; evaluation itself is pure.
struct Evaluator<'a> {
    scenario: &'a Scenario,
    iqs: Vec<f64>,
}

impl<'a> Evaluator<'a> {
    fn new(scenario: &'a Scenario) -> Result<Self> {
        scenario.validate()?;
        let iqs = scenario
            .customers
            .iter()
            .map(|c| image_quality(&c.quality))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { scenario, iqs })
    }

    fn satisfaction(&self, i: usize, bandwidth: f64) -> f64 {
        if bandwidth <= 0.0 {
            // zero bandwidth means the file never arrives
            return 0.0;
        }
        let delay = self.scenario.customers[i].file_bits / bandwidth;
        satisfaction::predict_unchecked(&self.scenario.model, self.iqs[i], delay)
    }

    fn eval(&self, a: &[f64]) -> f64 {
        debug_assert!(is_feasible(a, self.scenario), "evaluated vector must be feasible");
        let sc = self.scenario;
        match sc.objective {
            Objective::TotalAbs => (0..sc.n())
                .map(|i| (self.satisfaction(i, a[i]) - sc.customers[i].tau).abs())
                .sum(),
            Objective::MaxAbs => (0..sc.n())
                .map(|i| (self.satisfaction(i, a[i]) - sc.customers[i].tau).abs())
                .fold(0.0, f64::max),
            Objective::TotalOneSided => (0..sc.n())
                .map(|i| (sc.customers[i].tau - self.satisfaction(i, a[i])).max(0.0))
                .sum(),
        }
    }
}

/// Dissatisfaction of a feasible allocation vector under the scenario's
/// objective. Pure: identical inputs give bit-identical results.
pub fn evaluate_objective(a: &[f64], scenario: &Scenario) -> Result<f64> {
    let evaluator = Evaluator::new(scenario)?;
    if !is_feasible(a, scenario) {
        return Err(Error::InfeasibleAllocation(format!(
            "sum {} vs budget {} (floor {})",
            a.iter().sum::<f64>(),
            scenario.total_bandwidth,
            scenario.a_min
        )));
    }
    Ok(evaluator.eval(a))
}

/// Per-customer satisfaction under an allocation, using the same evaluation
/// rules as [`evaluate_objective`] (zero bandwidth means satisfaction 0), so
/// reports derived from it aggregate back to the objective exactly.
pub fn satisfactions(a: &[f64], scenario: &Scenario) -> Result<Vec<f64>> {
    let evaluator = Evaluator::new(scenario)?;
    if !is_feasible(a, scenario) {
        return Err(Error::InfeasibleAllocation("satisfaction breakdown".into()));
    }
    Ok((0..scenario.n()).map(|i| evaluator.satisfaction(i, a[i])).collect())
}

/// The per-customer dissatisfaction term the scenario's objective aggregates.
pub fn dissatisfaction(objective: Objective, us: f64, tau: f64) -> f64 {
    match objective {
        Objective::TotalAbs | Objective::MaxAbs => (us - tau).abs(),
        Objective::TotalOneSided => (tau - us).max(0.0),
    }
}

// ---------------------------------------------------------------------------
// Grid brute force (validation oracle)
// ---------------------------------------------------------------------------

const BRUTE_FORCE_MAX_N: usize = 3;
const BRUTE_FORCE_MAX_STEPS: usize = 64;

fn better(a: &(f64, Vec<f64>), b: &(f64, Vec<f64>)) -> bool {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Less => true,
        std::cmp::Ordering::Greater => false,
        std::cmp::Ordering::Equal => {
            for (x, y) in a.1.iter().zip(&b.1) {
                match x.total_cmp(y) {
                    std::cmp::Ordering::Less => return true,
                    std::cmp::Ordering::Greater => return false,
                    std::cmp::Ordering::Equal => {}
                }
            }
            false
        }
    }
}

/// Exhaustive search over the grid `A_i = a_min + j * (B - n*a_min)/G`,
/// `j = 0..=G`, keeping vectors with `sum(A) <= B`. Ties break toward the
/// lexicographically smallest vector. Limited to three customers.
pub fn allocate_bruteforce(scenario: &Scenario, grid_steps: usize) -> Result<Allocation> {
    let evaluator = Evaluator::new(scenario)?;
    let n = scenario.n();
    if n > BRUTE_FORCE_MAX_N {
        return Err(Error::BruteForceTooLarge { n, max: BRUTE_FORCE_MAX_N });
    }
    if grid_steps == 0 || grid_steps > BRUTE_FORCE_MAX_STEPS {
        return Err(Error::InvalidOptimizerConfig(format!(
            "grid_steps {grid_steps} outside 1..={BRUTE_FORCE_MAX_STEPS}"
        )));
    }
    let b = scenario.total_bandwidth;
    let span = b - n as f64 * scenario.a_min;
    let values: Vec<f64> =
        (0..=grid_steps).map(|j| scenario.a_min + j as f64 * span / grid_steps as f64).collect();
    let budget_cap = b * (1.0 + FEASIBILITY_REL_TOL);

    // parallel over the first coordinate; min-reduction over a total order is
    // grouping-independent, so the result is deterministic
    type Partial = (Option<(f64, Vec<f64>)>, u64);
    let partials: Vec<Partial> =
        parallel::map_slice(&values, |&a0| {
            let mut best: Option<(f64, Vec<f64>)> = None;
            let mut count = 0u64;
            let mut consider = |candidate: Vec<f64>, evaluator: &Evaluator| {
                let obj = evaluator.eval(&candidate);
                count += 1;
                let entry = (obj, candidate);
                if best.as_ref().is_none_or(|b| better(&entry, b)) {
                    best = Some(entry);
                }
            };
            match n {
                1 => {
                    if a0 <= budget_cap {
                        consider(vec![a0], &evaluator);
                    }
                }
                2 => {
                    for &a1 in &values {
                        if a0 + a1 <= budget_cap {
                            consider(vec![a0, a1], &evaluator);
                        }
                    }
                }
                _ => {
                    for &a1 in &values {
                        if a0 + a1 > budget_cap {
                            continue;
                        }
                        for &a2 in &values {
                            if a0 + a1 + a2 <= budget_cap {
                                consider(vec![a0, a1, a2], &evaluator);
                            }
                        }
                    }
                }
            }
            (best, count)
        });

    let mut evaluations = 0u64;
    let mut best: Option<(f64, Vec<f64>)> = None;
    for (candidate, count) in partials {
        evaluations += count;
        if let Some(entry) = candidate {
            if best.as_ref().is_none_or(|b| better(&entry, b)) {
                best = Some(entry);
            }
        }
    }
    let (_, mut a) = best.expect("all-floor vector is always feasible");
    project_feasible(&mut a, scenario);
    let objective_value = evaluator.eval(&a);
    Ok(Allocation { a, objective_value, evaluations, seed: 0 })
}

// ---------------------------------------------------------------------------
// Metaheuristics
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Sa,
    Ga,
    Tabu,
}

/// Simulated-annealing knobs. `transfer_delta` defaults to `B/50`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct SaParams {
    pub transfer_delta: Option<f64>,
    pub cooling: f64,
    pub iterations_per_temperature: usize,
    pub stop_temperature_ratio: f64,
}

impl Default for SaParams {
    fn default() -> Self {
        Self {
            transfer_delta: None,
            cooling: 0.95,
            iterations_per_temperature: 200,
            stop_temperature_ratio: 1e-4,
        }
    }
}

/// Genetic-algorithm knobs. `mutation_sd` defaults to `B/100`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct GaParams {
    pub population: usize,
    pub generations: usize,
    pub mutation_sd: Option<f64>,
    pub elitism: usize,
}

impl Default for GaParams {
    fn default() -> Self {
        Self { population: 64, generations: 200, mutation_sd: None, elitism: 2 }
    }
}

/// Tabu-search knobs. `step` defaults to `B/100`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct TabuParams {
    pub step: Option<f64>,
    pub tenure: usize,
    pub iterations: usize,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self { step: None, tenure: 20, iterations: 2000 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case")]
pub enum StrategyParams {
    Sa(SaParams),
    Ga(GaParams),
    Tabu(TabuParams),
}

impl StrategyParams {
    pub fn defaults(strategy: Strategy) -> Self {
        match strategy {
            Strategy::Sa => StrategyParams::Sa(SaParams::default()),
            Strategy::Ga => StrategyParams::Ga(GaParams::default()),
            Strategy::Tabu => StrategyParams::Tabu(TabuParams::default()),
        }
    }

    pub fn strategy(&self) -> Strategy {
        match self {
            StrategyParams::Sa(_) => Strategy::Sa,
            StrategyParams::Ga(_) => Strategy::Ga,
            StrategyParams::Tabu(_) => Strategy::Tabu,
        }
    }
}

/// Feasible starting candidates: the equal split, plus the baseline point
/// when the model supports it.
fn warm_starts(scenario: &Scenario) -> Vec<Vec<f64>> {
    let n = scenario.n();
    let mut starts = vec![vec![scenario.total_bandwidth / n as f64; n]];
    if scenario.model.is_delay_monotone() {
        if let Ok(baseline) = allocate_baseline(scenario) {
            starts.push(baseline.a);
        }
    }
    for s in &mut starts {
        project_feasible(s, scenario);
    }
    starts
}

// Keeps the first vector reaching each objective level: replacement requires
// a strict improvement, so among tied optima the earliest candidate (the
// warm starts, then search order) wins. A tie-break that preferred "smaller"
// vectors would happily starve customers in degenerate scenarios where every
// allocation scores the same.
struct BestTracker {
    best: Option<(f64, Vec<f64>)>,
    evaluations: u64,
}

impl BestTracker {
    fn new() -> Self {
        Self { best: None, evaluations: 0 }
    }

    fn observe(&mut self, objective: f64, a: &[f64]) {
        self.evaluations += 1;
        if self.best.as_ref().is_none_or(|(current, _)| objective < *current) {
            self.best = Some((objective, a.to_vec()));
        }
    }

    fn observe_batch(&mut self, pairs: &[(f64, Vec<f64>)]) {
        for (obj, a) in pairs {
            self.observe(*obj, a);
        }
    }
}

/// Runs the chosen metaheuristic. Deterministic for fixed
/// `(scenario, params, seed)` regardless of evaluation parallelism.
pub fn allocate_metaheuristic(
    scenario: &Scenario,
    params: &StrategyParams,
    seed: u64,
) -> Result<Allocation> {
    let evaluator = Evaluator::new(scenario)?;
    let mut tracker = BestTracker::new();
    for start in warm_starts(scenario) {
        let obj = evaluator.eval(&start);
        tracker.observe(obj, &start);
    }
    match params {
        StrategyParams::Sa(p) => run_sa(scenario, &evaluator, p, seed, &mut tracker)?,
        StrategyParams::Ga(p) => run_ga(scenario, &evaluator, p, seed, &mut tracker)?,
        StrategyParams::Tabu(p) => run_tabu(scenario, &evaluator, p, &mut tracker)?,
    }
    let (_, mut a) = tracker.best.take().expect("warm starts always evaluated");
    project_feasible(&mut a, scenario);
    let objective_value = evaluator.eval(&a);
    Ok(Allocation { a, objective_value, evaluations: tracker.evaluations, seed })
}

fn run_sa(
    scenario: &Scenario,
    evaluator: &Evaluator,
    params: &SaParams,
    seed: u64,
    tracker: &mut BestTracker,
) -> Result<()> {
    if !(params.cooling > 0.0 && params.cooling < 1.0)
        || params.iterations_per_temperature == 0
        || !(params.stop_temperature_ratio > 0.0 && params.stop_temperature_ratio < 1.0)
    {
        return Err(Error::InvalidOptimizerConfig("SA cooling/iteration parameters".into()));
    }
    let b = scenario.total_bandwidth;
    let delta = params.transfer_delta.unwrap_or(b / 50.0);
    if !(delta > 0.0) {
        return Err(Error::InvalidOptimizerConfig(format!("transfer delta {delta}")));
    }
    let n = scenario.n();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    // state: customer allocations plus one slack slot holding unused budget
    let start = tracker.best.as_ref().expect("warm start present").1.clone();
    let mut state = start.clone();
    state.push((b - start.iter().sum::<f64>()).max(0.0));
    let mut current_obj = evaluator.eval(&start);

    let t0 = current_obj.max(1e-12);
    let t_stop = t0 * params.stop_temperature_ratio;
    let mut t = t0;
    let slots = n + 1;
    while t > t_stop {
        for _ in 0..params.iterations_per_temperature {
            let from = rng.random_range(0..slots);
            let mut to = rng.random_range(0..slots - 1);
            if to >= from {
                to += 1;
            }
            let floor = if from < n { scenario.a_min } else { 0.0 };
            let amount = (delta * rng.random::<f64>()).min(state[from] - floor).max(0.0);
            let mut next = state.clone();
            next[from] -= amount;
            next[to] += amount;
            let candidate = &next[..n];
            let obj = evaluator.eval(candidate);
            tracker.observe(obj, candidate);
            let accept = obj <= current_obj
                || rng.random::<f64>() < (-(obj - current_obj) / t).exp();
            if accept {
                state = next;
                current_obj = obj;
            }
        }
        t *= params.cooling;
    }
    Ok(())
}

fn run_ga(
    scenario: &Scenario,
    evaluator: &Evaluator,
    params: &GaParams,
    seed: u64,
    tracker: &mut BestTracker,
) -> Result<()> {
    if params.population < 2 || params.elitism >= params.population || params.generations == 0 {
        return Err(Error::InvalidOptimizerConfig("GA population/elitism/generations".into()));
    }
    let b = scenario.total_bandwidth;
    let n = scenario.n();
    let sd = params.mutation_sd.unwrap_or(b / 100.0);
    if !(sd > 0.0) {
        return Err(Error::InvalidOptimizerConfig(format!("mutation sd {sd}")));
    }
    let normal = Normal::new(0.0, sd).expect("positive sd");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut population: Vec<Vec<f64>> = warm_starts(scenario);
    population.truncate(params.population);
    while population.len() < params.population {
        let mut individual: Vec<f64> =
            (0..n).map(|_| scenario.a_min + rng.random::<f64>() * (b - n as f64 * scenario.a_min)).collect();
        project_feasible(&mut individual, scenario);
        population.push(individual);
    }

    // parametric evaluation is a handful of flops per customer; fanning those
    // out costs more than computing them, so only the learned model runs the
    // population in parallel (results are order-fixed and identical either way)
    let fan_out = matches!(scenario.model, SatisfactionModel::LearnedKnn(_));
    let score = |population: &[Vec<f64>]| -> Vec<(f64, Vec<f64>)> {
        if fan_out {
            parallel::map_slice(population, |ind| (evaluator.eval(ind), ind.clone()))
        } else {
            population.iter().map(|ind| (evaluator.eval(ind), ind.clone())).collect()
        }
    };

    for _ in 0..params.generations {
        let scored = score(&population);
        tracker.observe_batch(&scored);

        // rank for elitism: objective, then lexicographic for determinism
        let mut ranked: Vec<usize> = (0..scored.len()).collect();
        ranked.sort_by(|&i, &j| {
            scored[i]
                .0
                .total_cmp(&scored[j].0)
                .then_with(|| {
                    for (x, y) in scored[i].1.iter().zip(&scored[j].1) {
                        let ord = x.total_cmp(y);
                        if ord != std::cmp::Ordering::Equal {
                            return ord;
                        }
                    }
                    std::cmp::Ordering::Equal
                })
        });

        let mut next: Vec<Vec<f64>> = ranked
            .iter()
            .take(params.elitism)
            .map(|&i| scored[i].1.clone())
            .collect();
        let tournament = |rng: &mut ChaCha8Rng| -> usize {
            let a = rng.random_range(0..scored.len());
            let b = rng.random_range(0..scored.len());
            if scored[a].0 <= scored[b].0 {
                a
            } else {
                b
            }
        };
        while next.len() < params.population {
            let p1 = tournament(&mut rng);
            let p2 = tournament(&mut rng);
            let mut child: Vec<f64> = (0..n)
                .map(|g| {
                    let u: f64 = rng.random();
                    scored[p1].1[g] + u * (scored[p2].1[g] - scored[p1].1[g])
                })
                .collect();
            for gene in &mut child {
                *gene += normal.sample(&mut rng);
            }
            project_feasible(&mut child, scenario);
            next.push(child);
        }
        population = next;
    }
    let final_scored = score(&population);
    tracker.observe_batch(&final_scored);
    Ok(())
}

fn run_tabu(
    scenario: &Scenario,
    evaluator: &Evaluator,
    params: &TabuParams,
    tracker: &mut BestTracker,
) -> Result<()> {
    if params.iterations == 0 {
        return Err(Error::InvalidOptimizerConfig("tabu iterations must be positive".into()));
    }
    let b = scenario.total_bandwidth;
    let n = scenario.n();
    let step = params.step.unwrap_or(b / 100.0);
    if !(step > 0.0) {
        return Err(Error::InvalidOptimizerConfig(format!("tabu step {step}")));
    }
    let capacity = ((b - n as f64 * scenario.a_min) / step).floor() as i64;
    if capacity < 1 {
        return Err(Error::InvalidOptimizerConfig("tabu step larger than free budget".into()));
    }

    // discretize the best warm start; flooring keeps it feasible
    let start = tracker.best.as_ref().expect("warm start present").1.clone();
    let mut state: Vec<i64> =
        start.iter().map(|&a| (((a - scenario.a_min) / step).floor() as i64).max(0)).collect();

    let to_vector = |s: &[i64]| -> Vec<f64> {
        s.iter().map(|&v| scenario.a_min + v as f64 * step).collect()
    };

    // directed transfer moves over customer slots plus the slack slot `n`
    let slots = n + 1;
    let moves: Vec<(usize, usize)> = (0..slots)
        .flat_map(|i| (0..slots).filter(move |&j| j != i).map(move |j| (i, j)))
        .collect();
    let mut tabu_until = std::collections::HashMap::<(usize, usize), usize>::new();

    let mut current = state.clone();
    let mut best_obj = tracker.best.as_ref().expect("warm start present").0;
    for iteration in 0..params.iterations {
        let used: i64 = current.iter().sum();
        let mut chosen: Option<((usize, usize), Vec<i64>, f64)> = None;
        let mut chosen_tabu: Option<((usize, usize), Vec<i64>, f64)> = None;
        for &(from, to) in &moves {
            let available = if from < n { current[from] } else { capacity - used };
            if available < 1 {
                continue;
            }
            let mut next = current.clone();
            if from < n {
                next[from] -= 1;
            }
            if to < n {
                next[to] += 1;
            }
            if next.iter().sum::<i64>() > capacity {
                continue;
            }
            let vector = to_vector(&next);
            let obj = evaluator.eval(&vector);
            tracker.observe(obj, &vector);
            let is_tabu = tabu_until.get(&(from, to)).is_some_and(|&until| until > iteration);
            let aspirated = obj < best_obj;
            let slot = if !is_tabu || aspirated { &mut chosen } else { &mut chosen_tabu };
            let replace = slot.as_ref().is_none_or(|(_, _, cur)| obj < *cur);
            if replace {
                *slot = Some(((from, to), next, obj));
            }
        }
        // when every move is tabu and none aspirates, take the best tabu move
        let Some(((from, to), next, obj)) = chosen.or(chosen_tabu) else {
            break;
        };
        current = next;
        if obj < best_obj {
            best_obj = obj;
        }
        tabu_until.insert((to, from), iteration + 1 + params.tenure);
        state = current.clone();
    }
    let _ = state;
    Ok(())
}

// ---------------------------------------------------------------------------
// Baseline
// ---------------------------------------------------------------------------

/// Requirement-driven baseline: give everyone their minimum satisfying
/// bandwidth `SA_i` when the budget covers it (splitting the surplus
/// equally), otherwise scale proportionally, `A_i = B * SA_i / sum(SA)`.
/// Customers whose threshold is unattainable even at full budget contribute
/// `SA_i = B`.
pub fn allocate_baseline(scenario: &Scenario) -> Result<Allocation> {
    let evaluator = Evaluator::new(scenario)?;
    if !scenario.model.is_delay_monotone() {
        return Err(Error::NonMonotoneModel);
    }
    let b = scenario.total_bandwidth;
    let n = scenario.n();
    let requirements: Vec<f64> = scenario
        .customers
        .iter()
        .map(|c| {
            satisfaction::required_bandwidth(c, &scenario.model, b).map(|r| match r {
                BandwidthRequirement::Attainable(sa) => sa,
                BandwidthRequirement::Unattainable => b,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let total: f64 = requirements.iter().sum();
    let mut a: Vec<f64> = if total <= b {
        let surplus = (b - total) / n as f64;
        requirements.iter().map(|sa| sa + surplus).collect()
    } else {
        requirements.iter().map(|sa| b * sa / total).collect()
    };
    project_feasible(&mut a, scenario);
    let objective_value = evaluator.eval(&a);
    Ok(Allocation { a, objective_value, evaluations: 1, seed: 0 })
}
