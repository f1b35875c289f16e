use std::collections::HashSet;
use std::time::Instant;

use itertools::Itertools;
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::insert::{insert_all, Rule};
use super::state::{route_cost, OpenPolicy, State, Tour};
use super::SearchParams;
use crate::model::Instance;

const SIGMA_BEST: f64 = 33.0;
const SIGMA_BETTER: f64 = 9.0;
const SIGMA_ACCEPTED: f64 = 13.0;
const REACTION: f64 = 0.1;
const SEGMENT: usize = 100;
/// Routes up to this length are reordered exhaustively.
const EXACT_ORDER_LEN: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Move {
    RandomRemoval,
    WorstRemoval,
    RouteRemoval,
    TypeSwap,
    Merge,
    Split,
}

const MOVES: [Move; 6] = [
    Move::RandomRemoval,
    Move::WorstRemoval,
    Move::RouteRemoval,
    Move::TypeSwap,
    Move::Merge,
    Move::Split,
];
const REPAIRS: [Rule; 2] = [Rule::Greedy, Rule::Regret2];

/// Roulette weights with segment-wise adaptive updates.
struct Adaptive {
    weights: Vec<f64>,
    score: Vec<f64>,
    uses: Vec<u32>,
}

impl Adaptive {
    fn new(weights: Vec<f64>) -> Self {
        let n = weights.len();
        Adaptive { weights, score: vec![0.0; n], uses: vec![0; n] }
    }

    fn pick(&self, rng: &mut ChaCha8Rng) -> usize {
        let total: f64 = self.weights.iter().sum();
        if total <= 0.0 {
            return rng.random_range(0..self.weights.len());
        }
        let mut r = rng.random_range(0.0..total);
        for (i, &w) in self.weights.iter().enumerate() {
            if r < w {
                return i;
            }
            r -= w;
        }
        self.weights.len() - 1
    }

    fn reward(&mut self, i: usize, s: f64) {
        self.score[i] += s;
        self.uses[i] += 1;
    }

    fn end_segment(&mut self) {
        for i in 0..self.weights.len() {
            if self.uses[i] > 0 {
                self.weights[i] = self.weights[i] * (1.0 - REACTION) + REACTION * self.score[i] / self.uses[i] as f64;
            }
            self.score[i] = 0.0;
            self.uses[i] = 0;
        }
    }
}

/// Draws how many clients to remove. Small instances may lose up to three
/// so that swaps between full routes stay reachable.
fn removal_count(n: usize, fraction: f64, rng: &mut ChaCha8Rng) -> usize {
    let hi = ((n as f64 * fraction).round() as usize).max(n.min(3)).clamp(1, n);
    rng.random_range(1..=hi)
}

fn destroy_random(instance: &Instance, state: &mut State, q: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let all: Vec<usize> = state.tours.iter().flat_map(|t| t.stops.iter().copied()).sorted().collect();
    let picked: Vec<usize> = sample(rng, all.len(), q.min(all.len())).into_iter().map(|i| all[i]).collect();
    for &j in &picked {
        state.remove_client(instance, j);
    }
    picked
}

fn destroy_worst(instance: &Instance, state: &mut State, q: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut savings: Vec<(f64, usize)> = Vec::new();
    for t in &state.tours {
        for p in 0..t.stops.len() {
            let mut rest = t.stops.clone();
            let j = rest.remove(p);
            let rest_cost = if rest.is_empty() { 0.0 } else { route_cost(instance, t.tau, &rest).unwrap_or(t.cost) };
            savings.push((t.cost - rest_cost, j));
        }
    }
    savings.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
    let mut picked = Vec::with_capacity(q);
    while picked.len() < q && !savings.is_empty() {
        let y: f64 = rng.random();
        let idx = ((y.powi(3)) * savings.len() as f64) as usize;
        picked.push(savings.remove(idx.min(savings.len() - 1)).1);
    }
    for &j in &picked {
        state.remove_client(instance, j);
    }
    picked
}

/// Empties one random tour, then removes random clients up to `q`.
fn destroy_route(instance: &Instance, state: &mut State, q: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    if state.tours.is_empty() {
        return Vec::new();
    }
    let k = rng.random_range(0..state.tours.len());
    let mut removed = state.take(k).stops;
    if removed.len() < q {
        removed.extend(destroy_random(instance, state, q - removed.len(), rng));
    }
    removed
}

fn type_swap(instance: &Instance, state: &mut State, rng: &mut ChaCha8Rng) -> bool {
    if state.tours.is_empty() {
        return false;
    }
    let k = rng.random_range(0..state.tours.len());
    let cur = state.tours[k].tau;
    let best = (0..instance.types().len())
        .filter(|&tau| tau != cur && state.can_open(instance, tau, &[cur]))
        .filter_map(|tau| route_cost(instance, tau, &state.tours[k].stops).map(|c| (c, tau)))
        .min_by(|a, b| a.0.total_cmp(&b.0));
    let Some((cost, tau)) = best else { return false };
    let stops = state.take(k).stops;
    state.push(Tour { tau, stops, cost });
    true
}

/// Cheapest single route over `clients` on `tau`, built by insertion and
/// then polished.
fn pack(instance: &Instance, tau: usize, clients: &[usize]) -> Option<Tour> {
    let mut stops: Vec<usize> = Vec::with_capacity(clients.len());
    for &j in clients {
        let mut best: Option<(f64, usize)> = None;
        for pos in 0..=stops.len() {
            let mut s = stops.clone();
            s.insert(pos, j);
            if let Some(c) = route_cost(instance, tau, &s) {
                if best.is_none_or(|(b, _)| c < b) {
                    best = Some((c, pos));
                }
            }
        }
        let (_, pos) = best?;
        stops.insert(pos, j);
    }
    let cost = route_cost(instance, tau, &stops)?;
    let mut tour = Tour { tau, stops, cost };
    polish(instance, &mut tour);
    Some(tour)
}

/// Consolidates two or three random tours into one, of whichever type
/// serves them cheapest.
fn merge(instance: &Instance, state: &mut State, rng: &mut ChaCha8Rng) -> bool {
    if state.tours.len() < 2 {
        return false;
    }
    let k = rng.random_range(2..=state.tours.len().min(3));
    let mut picked: Vec<usize> = sample(rng, state.tours.len(), k).into_vec();
    picked.sort_unstable();
    let freed: Vec<usize> = picked.iter().map(|&i| state.tours[i].tau).collect();
    let clients: Vec<usize> = picked.iter().flat_map(|&i| state.tours[i].stops.iter().copied()).collect();
    let best = (0..instance.types().len())
        .filter(|&tau| state.can_open(instance, tau, &freed))
        .filter_map(|tau| pack(instance, tau, &clients))
        .min_by(|a, b| a.cost.total_cmp(&b.cost));
    let Some(tour) = best else { return false };
    for &i in picked.iter().rev() {
        state.take(i);
    }
    state.push(tour);
    true
}

/// Whether two more slots, of `t1` and `t2`, fit the fleet limits.
fn two_fit(instance: &Instance, state: &State, t1: usize, t2: usize) -> bool {
    let need = |t: usize| 1 + usize::from(t1 == t2 && t == t1);
    state.tours.len() + 2 <= instance.total_fleet_cap()
        && state.counts[t1] + need(t1) <= instance.vtype(t1).max_slots
        && state.counts[t2] + need(t2) <= instance.vtype(t2).max_slots
}

fn split(instance: &Instance, state: &mut State, rng: &mut ChaCha8Rng) -> bool {
    let long: Vec<usize> = (0..state.tours.len()).filter(|&k| state.tours[k].stops.len() > 1).collect();
    if long.is_empty() {
        return false;
    }
    let k = long[rng.random_range(0..long.len())];
    let t = state.take(k);
    let n_types = instance.types().len();
    let mut best: Option<(f64, usize, usize, usize)> = None;
    for cut in 1..t.stops.len() {
        let (left, right) = t.stops.split_at(cut);
        let lc: Vec<Option<f64>> = (0..n_types).map(|tau| route_cost(instance, tau, left)).collect();
        let rc: Vec<Option<f64>> = (0..n_types).map(|tau| route_cost(instance, tau, right)).collect();
        for t1 in 0..n_types {
            let Some(c1) = lc[t1] else { continue };
            for t2 in 0..n_types {
                let Some(c2) = rc[t2] else { continue };
                if two_fit(instance, state, t1, t2) && best.is_none_or(|(bc, ..)| c1 + c2 < bc) {
                    best = Some((c1 + c2, cut, t1, t2));
                }
            }
        }
    }
    let Some((_, cut, t1, t2)) = best else {
        state.push(t);
        return false;
    };
    let (left, right) = t.stops.split_at(cut);
    for (tau, stops) in [(t1, left), (t2, right)] {
        let cost = route_cost(instance, tau, stops).expect("checked above");
        state.push(Tour { tau, stops: stops.to_vec(), cost });
    }
    true
}

/// Reorders one route: exhaustively when short, else by relocating single
/// stops until no move helps.
pub(crate) fn polish(instance: &Instance, tour: &mut Tour) {
    let n = tour.stops.len();
    if n < 2 {
        return;
    }
    if n <= EXACT_ORDER_LEN {
        let mut sorted = tour.stops.clone();
        sorted.sort_unstable();
        for perm in sorted.iter().copied().permutations(n) {
            if let Some(c) = route_cost(instance, tour.tau, &perm) {
                if c < tour.cost - 1e-12 * tour.cost.abs().max(1.0) {
                    tour.cost = c;
                    tour.stops = perm;
                }
            }
        }
        return;
    }
    let mut improved = true;
    let mut passes = 0;
    while improved && passes < 20 {
        improved = false;
        passes += 1;
        for from in 0..n {
            for to in 0..n {
                if from == to {
                    continue;
                }
                let mut s = tour.stops.clone();
                let j = s.remove(from);
                s.insert(to, j);
                if let Some(c) = route_cost(instance, tour.tau, &s) {
                    if c < tour.cost - 1e-12 * tour.cost.abs().max(1.0) {
                        tour.cost = c;
                        tour.stops = s;
                        improved = true;
                    }
                }
            }
        }
    }
}

/// Polishes tours that are not byte-identical to one in `before`.
fn polish_changed(instance: &Instance, state: &mut State, before: &HashSet<Vec<usize>>) {
    for t in state.tours.iter_mut() {
        if !before.contains(&t.stops) {
            polish(instance, t);
        }
    }
}

fn fingerprint(state: &State) -> HashSet<Vec<usize>> {
    state.tours.iter().map(|t| t.stops.clone()).collect()
}

/// Adaptive destroy/repair with simulated annealing. Returns the best
/// state seen and the best-cost trace, one entry per iteration.
pub(crate) fn run(instance: &Instance, start: State, params: &SearchParams) -> (State, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = instance.n_clients();
    let clock = Instant::now();
    let start_cost = start.cost();
    let t0 = params.temperature.0 * start_cost.abs().max(1.0);
    let t1 = (params.temperature.1 * start_cost.abs().max(1.0)).min(t0);
    let w = &params.operator_weights;
    let mut moves = Adaptive::new(vec![w.random_removal, w.worst_removal, w.route_removal, w.type_swap, w.merge, w.split]);
    let mut repairs = Adaptive::new(vec![w.greedy_repair, w.regret_repair]);

    let mut current = start.clone();
    let mut current_cost = start_cost;
    let mut best = start;
    let mut best_cost = start_cost;
    let mut trace = Vec::with_capacity(params.iterations);

    for it in 0..params.iterations {
        if params.time_limit.is_some_and(|l| clock.elapsed() > l) {
            break;
        }
        let frac = it as f64 / params.iterations.max(1) as f64;
        let temp = if t0 > 0.0 && t1 > 0.0 { t0 * (t1 / t0).powf(frac) } else { 0.0 };

        let m = moves.pick(&mut rng);
        let mut repair_used = None;
        let mut cand = current.clone();
        let before = fingerprint(&cand);
        let ok = match MOVES[m] {
            Move::TypeSwap => type_swap(instance, &mut cand, &mut rng),
            Move::Merge => merge(instance, &mut cand, &mut rng),
            Move::Split => split(instance, &mut cand, &mut rng),
            destroy => {
                let q = removal_count(n, params.destroy_fraction, &mut rng);
                let mut removed = match destroy {
                    Move::RandomRemoval => destroy_random(instance, &mut cand, q, &mut rng),
                    Move::WorstRemoval => destroy_worst(instance, &mut cand, q, &mut rng),
                    _ => destroy_route(instance, &mut cand, q, &mut rng),
                };
                let r = repairs.pick(&mut rng);
                repair_used = Some(r);
                !removed.is_empty()
                    && insert_all(instance, &mut cand, &mut removed, REPAIRS[r], OpenPolicy::AnyType, &mut rng, 0.0)
                        .is_ok()
            }
        };
        let mut reward = 0.0;
        if ok {
            cand.remove_empty();
            polish_changed(instance, &mut cand, &before);
            let c = cand.cost();
            let feasible = c.is_finite() && cand.served() == n && cand.meets_minimums(instance);
            if feasible {
                let accept = c < current_cost || (temp > 0.0 && rng.random::<f64>() < (-(c - current_cost) / temp).exp());
                if accept {
                    reward = if c < best_cost - 1e-9 * best_cost.abs().max(1.0) {
                        SIGMA_BEST
                    } else if c < current_cost {
                        SIGMA_BETTER
                    } else {
                        SIGMA_ACCEPTED
                    };
                    if reward == SIGMA_BEST {
                        best = cand.clone();
                        best_cost = c;
                    }
                    current = cand;
                    current_cost = c;
                }
            }
        }
        moves.reward(m, reward);
        if let Some(r) = repair_used {
            repairs.reward(r, reward);
        }
        if (it + 1) % SEGMENT == 0 {
            moves.end_segment();
            repairs.end_segment();
        }
        trace.push(best_cost);
    }
    (best, trace)
}
