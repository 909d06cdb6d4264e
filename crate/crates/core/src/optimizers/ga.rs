use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{beats, OptimizerResult};
use crate::channel::gain_for;
use crate::model::{ControlVector, ModelParameters};

#[derive(Debug, Clone, PartialEq)]
pub struct GaParams {
    pub population: usize,
    /// `None` means `100 n_s`.
    pub max_generations: Option<usize>,
    pub tournament: usize,
    pub crossover_rate: f64,
    /// `None` means `1 / n_s`.
    pub mutation_rate: Option<f64>,
    pub elitism: usize,
    /// Stop once the best gain has improved by at most
    /// `improvement_tol * |best|` over this many generations.
    pub stall_generations: usize,
    pub improvement_tol: f64,
}

impl Default for GaParams {
    fn default() -> Self {
        Self {
            population: 200,
            max_generations: None,
            tournament: 3,
            crossover_rate: 0.9,
            mutation_rate: None,
            elitism: 2,
            stall_generations: 50,
            improvement_tol: 1e-6,
        }
    }
}

/// Binary genetic algorithm maximizing `|h(v)|^2` with tournament selection,
/// uniform crossover, per-bit mutation and elitism. Returns the best
/// individual ever evaluated.
pub fn genetic_algorithm(model: &ModelParameters, seed: u64, params: &GaParams) -> OptimizerResult {
    let n = model.n_s();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pop_size = params.population.max(2);
    let max_gen = params.max_generations.unwrap_or(100 * n);
    let mutation = params.mutation_rate.unwrap_or(1.0 / n as f64);
    let mut evaluations = 0u64;
    let mut fitness = |v: &ControlVector| {
        evaluations += 1;
        gain_for(model, v).unwrap_or(f64::NEG_INFINITY)
    };

    let mut pop: Vec<(ControlVector, f64)> = (0..pop_size)
        .map(|_| {
            let v = ControlVector::from_bits((0..n).map(|_| rng.random::<bool>()).collect());
            let f = fitness(&v);
            (v, f)
        })
        .collect();
    let mut best = pop[0].clone();
    let update_best = |pop: &[(ControlVector, f64)], best: &mut (ControlVector, f64)| {
        for ind in pop {
            if beats(ind.1, best.1) || (!beats(best.1, ind.1) && ind.0 < best.0) {
                *best = ind.clone();
            }
        }
    };
    update_best(&pop, &mut best);
    let mut trace = vec![best.1];

    for _ in 0..max_gen {
        let mut order: Vec<usize> = (0..pop.len()).collect();
        order.sort_by(|&i, &j| pop[j].1.total_cmp(&pop[i].1).then(i.cmp(&j)));
        let mut next: Vec<(ControlVector, f64)> = order.iter().take(params.elitism.min(pop_size)).map(|&i| pop[i].clone()).collect();
        while next.len() < pop_size {
            let p1 = tournament(&pop, params.tournament, &mut rng);
            let p2 = tournament(&pop, params.tournament, &mut rng);
            let mut child: Vec<bool> = if rng.random::<f64>() < params.crossover_rate {
                (0..n)
                    .map(|i| if rng.random::<bool>() { pop[p1].0.get(i) } else { pop[p2].0.get(i) })
                    .collect()
            } else {
                pop[p1].0.bits().to_vec()
            };
            for bit in child.iter_mut() {
                if rng.random::<f64>() < mutation {
                    *bit = !*bit;
                }
            }
            let v = ControlVector::from_bits(child);
            let f = fitness(&v);
            next.push((v, f));
        }
        pop = next;
        update_best(&pop, &mut best);
        trace.push(best.1);
        let g = trace.len() - 1;
        if g >= params.stall_generations {
            let past = trace[g - params.stall_generations];
            if best.1 - past <= params.improvement_tol * best.1.abs() {
                break;
            }
        }
    }
    OptimizerResult {
        gain: gain_for(model, &best.0).unwrap_or(best.1),
        v: best.0,
        evaluations,
        trace: Some(trace),
        rng_seed: seed,
        flagged: Vec::new(),
    }
}

fn tournament(pop: &[(ControlVector, f64)], size: usize, rng: &mut ChaCha8Rng) -> usize {
    let mut winner = rng.random_range(0..pop.len());
    for _ in 1..size.max(1) {
        let k = rng.random_range(0..pop.len());
        if pop[k].1 > pop[winner].1 {
            winner = k;
        }
    }
    winner
}
