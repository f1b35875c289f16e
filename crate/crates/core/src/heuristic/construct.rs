use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::insert::{insert_all, Rule};
use super::state::{route_cost, OpenPolicy, State, Tour};
use crate::error::{Error, Result};
use crate::eval::Solution;
use crate::model::Instance;

/// Regret noise used by construction; zero regret stays zero.
const CONSTRUCT_NOISE: f64 = 0.15;

/// Regret-2 insertion. A new slot of the cheapest feasible type is opened
/// only when no existing route can take the chosen client. The seed only
/// perturbs the regret ranking.
pub fn construct(instance: &Instance, seed: u64) -> Result<Solution> {
    construct_state(instance, seed).map(|s| s.to_solution(instance))
}

pub(crate) fn construct_state(instance: &Instance, seed: u64) -> Result<State> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut state = State::new(instance.types().len());
    let mut pending: Vec<usize> = (1..=instance.n_clients()).collect();
    if let Err(j) = insert_all(
        instance,
        &mut state,
        &mut pending,
        Rule::Regret2,
        OpenPolicy::CheapestWhenStuck,
        &mut rng,
        CONSTRUCT_NOISE,
    ) {
        let alone = (0..instance.types().len()).any(|tau| route_cost(instance, tau, &[j]).is_some());
        return Err(if alone {
            Error::Infeasible(format!("no free vehicle slot can take client {j}"))
        } else {
            Error::InfeasibleClient(j)
        });
    }
    meet_minimums(instance, &mut state)?;
    Ok(state)
}

/// Moves single clients onto new slots of types below their minimum count.
fn meet_minimums(instance: &Instance, state: &mut State) -> Result<()> {
    for tau in 0..instance.types().len() {
        while state.counts[tau] < instance.vtype(tau).min_slots {
            let mut best: Option<(f64, usize, usize)> = None;
            for (k, t) in state.tours.iter().enumerate().filter(|(_, t)| t.stops.len() > 1) {
                for (p, &j) in t.stops.iter().enumerate() {
                    let mut rest = t.stops.clone();
                    rest.remove(p);
                    let (Some(a), Some(b)) = (route_cost(instance, t.tau, &rest), route_cost(instance, tau, &[j])) else {
                        continue;
                    };
                    let delta = a + b - t.cost;
                    if best.is_none_or(|(d, _, _)| delta < d) {
                        best = Some((delta, k, p));
                    }
                }
            }
            let Some((_, k, p)) = best else {
                return Err(Error::Infeasible(format!("cannot meet the minimum count of type {}", tau + 1)));
            };
            let t = &mut state.tours[k];
            let j = t.stops.remove(p);
            t.cost = route_cost(instance, t.tau, &t.stops).expect("checked above");
            let cost = route_cost(instance, tau, &[j]).expect("checked above");
            state.push(Tour { tau, stops: vec![j], cost });
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::validate_solution;
    use crate::model::{catalog, Client, CostCoefficients, Location};

    fn at(x: f64) -> Location {
        Location::Planar { x, y: 0.0 }
    }

    #[test]
    fn single_client_gets_cheapest_type() {
        let inst = Instance::from_coordinates(
            "one",
            at(0.0),
            vec![Client::new(1, at(4.0), 40.0, 150.0, 0.0, 24.0)],
            catalog::default_catalog(),
            36,
            CostCoefficients::default(),
            1.3,
        )
        .unwrap();
        let sol = construct(&inst, 3).unwrap();
        assert_eq!(sol.routes.len(), 1);
        let cheapest = (0..5)
            .min_by(|&a, &b| route_cost(&inst, a, &[1]).unwrap().total_cmp(&route_cost(&inst, b, &[1]).unwrap()))
            .unwrap();
        assert_eq!(sol.routes[0].slot.vtype, cheapest);
    }

    #[test]
    fn saturation_opens_mega_slots() {
        // Only Standard and Mega available; 200 kWh each exceeds the
        // Standard budget and four fill a Mega (900 kWh usable).
        let mut types = catalog::default_catalog();
        for t in &mut types[1..4] {
            t.max_slots = 0;
        }
        let clients = (1..=9).map(|id| Client::new(id, at(id as f64 * 0.5), 200.0, 1000.0, 0.0, 24.0)).collect();
        let inst =
            Instance::from_coordinates("sat", at(0.0), clients, types, 36, CostCoefficients::default(), 1.3).unwrap();
        for seed in 0..5 {
            let sol = construct(&inst, seed).unwrap();
            let mut sizes: Vec<usize> = sol.routes.iter().map(|r| r.stops.len()).collect();
            sizes.sort_unstable();
            assert_eq!(sizes, vec![1, 4, 4]);
            assert!(sol.routes.iter().all(|r| r.slot.vtype == 4));
            assert!(validate_solution(&sol, &inst).is_empty());
        }
    }

    #[test]
    fn reports_unservable_client() {
        let inst = Instance::from_coordinates(
            "far",
            at(0.0),
            vec![Client::new(1, at(300.0), 40.0, 150.0, 0.0, 24.0)],
            catalog::default_catalog(),
            36,
            CostCoefficients::default(),
            1.3,
        )
        .unwrap();
        assert!(matches!(construct(&inst, 0), Err(Error::InfeasibleClient(1))));
    }
}
