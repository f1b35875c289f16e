use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::state::{Insertion, OpenPolicy, State};
use crate::model::Instance;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rule {
    Greedy,
    Regret2,
}

/// Inserts every pending client. Returns the first client that cannot be
/// placed; the state is then partially repaired and must be discarded.
///
/// With `noise > 0`, regret values are scaled by a random factor in
/// `[1 - noise, 1 + noise]` before ranking.
pub(crate) fn insert_all(
    instance: &Instance,
    state: &mut State,
    pending: &mut Vec<usize>,
    rule: Rule,
    open: OpenPolicy,
    rng: &mut ChaCha8Rng,
    noise: f64,
) -> Result<(), usize> {
    pending.sort_unstable();
    while !pending.is_empty() {
        let mut pick: Option<(usize, Insertion, f64)> = None;
        for (idx, &j) in pending.iter().enumerate() {
            let opts = state.options(instance, j, open);
            let Some(&first) = opts.first() else { return Err(j) };
            let key = match rule {
                Rule::Greedy => -first.delta,
                Rule::Regret2 => {
                    let regret = opts.get(1).map_or(f64::INFINITY, |s| s.delta - first.delta);
                    let factor = if noise > 0.0 { 1.0 + noise * rng.random_range(-1.0..=1.0) } else { 1.0 };
                    regret * factor
                }
            };
            let better = match &pick {
                None => true,
                Some((_, best, k)) => {
                    if key.is_infinite() && k.is_infinite() {
                        // Both have a single option: the costlier one first.
                        first.delta > best.delta
                    } else {
                        key > *k
                    }
                }
            };
            if better {
                pick = Some((idx, first, key));
            }
        }
        let (idx, ins, _) = pick.expect("pending is non-empty");
        pending.swap_remove(idx);
        pending.sort_unstable();
        state.apply(instance, ins);
    }
    Ok(())
}
