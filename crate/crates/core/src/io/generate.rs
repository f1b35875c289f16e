//! Synthetic scenarios in planar miles. Client data are random; only the
//! densities and window styles follow the two reference geographies.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{catalog, demand_from_battery, Client, CostCoefficients, Instance, Location, DEFAULT_ROAD_FACTOR};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Gaussian client clusters.
    UrbanDense,
    /// Uniformly scattered clients.
    RuralSparse,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowStyle {
    /// 2 to 4 hour windows opening within a few hours of each other.
    NarrowOverlapping,
    /// 4 to 8 hour windows with openings staggered across the day.
    WideOffset,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    pub profile: Profile,
    pub n_clients: usize,
    /// Square service area, mi².
    pub area: f64,
    pub window_style: WindowStyle,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Reference density and window style of the profile.
    pub fn new(profile: Profile, n_clients: usize, seed: u64) -> Self {
        let (area, window_style) = match profile {
            Profile::UrbanDense => (800.0, WindowStyle::NarrowOverlapping),
            Profile::RuralSparse => (210.0, WindowStyle::WideOffset),
        };
        GeneratorConfig { profile, n_clients, area, window_style, seed }
    }
}

/// Equipment acceptance ratings drawn for clients, kW.
const RHO_CHOICES: [f64; 5] = [50.0, 100.0, 150.0, 250.0, 350.0];
const BATTERY_RANGE: (f64, f64) = (120.0, 1000.0);

pub fn generate(config: &GeneratorConfig) -> Result<Instance> {
    if config.n_clients == 0 {
        return Err(Error::DegenerateInput("n_clients must be positive".into()));
    }
    if !(config.area.is_finite() && config.area > 0.0) {
        return Err(Error::DegenerateInput("area must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let side = config.area.sqrt();
    let n = config.n_clients;

    let points: Vec<(f64, f64)> = match config.profile {
        Profile::UrbanDense => {
            let k = n.div_ceil(6).max(2);
            let centres: Vec<(f64, f64)> = (0..k)
                .map(|_| (rng.random_range(0.2 * side..0.8 * side), rng.random_range(0.2 * side..0.8 * side)))
                .collect();
            let spread = Normal::new(0.0, 0.06 * side).expect("positive deviation");
            (0..n)
                .map(|_| {
                    let (cx, cy) = centres[rng.random_range(0..k)];
                    let x = (cx + spread.sample(&mut rng)).clamp(0.0, side);
                    let y = (cy + spread.sample(&mut rng)).clamp(0.0, side);
                    (x, y)
                })
                .collect()
        }
        Profile::RuralSparse => (0..n).map(|_| (rng.random_range(0.0..side), rng.random_range(0.0..side))).collect(),
    };

    let mut order: Vec<usize> = (0..n).collect();
    for i in (1..n).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    let mut windows = vec![(0.0, 0.0); n];
    for (rank, &i) in order.iter().enumerate() {
        windows[i] = match config.window_style {
            WindowStyle::NarrowOverlapping => {
                let open = rng.random_range(7.0..11.0);
                (open, open + rng.random_range(2.0..4.0))
            }
            WindowStyle::WideOffset => {
                let open = 5.0 + 7.0 * rank as f64 / n as f64 + rng.random_range(0.0..1.0);
                (open, (open + rng.random_range(4.0..8.0)).min(20.0))
            }
        };
    }

    let clients = points
        .iter()
        .zip(&windows)
        .enumerate()
        .map(|(i, (&(x, y), &(open, close)))| {
            let battery = rng.random_range(BATTERY_RANGE.0..=BATTERY_RANGE.1);
            // Ratings too slow to finish inside the window are not drawn.
            let need = demand_from_battery(battery) / (close - open);
            let ok: Vec<f64> = RHO_CHOICES.iter().copied().filter(|&r| r >= need).collect();
            let rho = ok[rng.random_range(0..ok.len())];
            Client::from_battery(i + 1, Location::Planar { x, y }, battery, rho, open, close)
        })
        .collect();
    let cx = points.iter().map(|p| p.0).sum::<f64>() / n as f64;
    let cy = points.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let profile = match config.profile {
        Profile::UrbanDense => "urban_dense",
        Profile::RuralSparse => "rural_sparse",
    };
    Instance::from_coordinates(
        format!("{profile}-n{n}-s{}", config.seed),
        Location::Planar { x: cx, y: cy },
        clients,
        catalog::default_catalog(),
        catalog::DEFAULT_TOTAL_FLEET_CAP,
        CostCoefficients::default(),
        DEFAULT_ROAD_FACTOR,
    )
}

/// Small random instance over a pool of at most four vehicle slots, for
/// sweeps against the exact solvers. Types are drawn with replacement.
pub fn oracle_instance(n_clients: usize, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clients = (1..=n_clients)
        .map(|id| {
            let open = rng.random_range(0.0..10.0);
            let len = rng.random_range(0.3..5.0);
            Client::new(
                id,
                Location::Planar { x: rng.random_range(-15.0..15.0), y: rng.random_range(-15.0..15.0) },
                rng.random_range(30.0..200.0),
                RHO_CHOICES[rng.random_range(0..RHO_CHOICES.len())],
                open,
                open + len,
            )
        })
        .collect();
    let mut types = catalog::default_catalog();
    for t in types.iter_mut() {
        t.max_slots = 0;
    }
    for _ in 0..rng.random_range(1..=4) {
        types[rng.random_range(0..5)].max_slots += 1;
    }
    Instance::from_coordinates(
        format!("oracle-n{n_clients}-s{seed}"),
        Location::Planar { x: 0.0, y: 0.0 },
        clients,
        types,
        catalog::DEFAULT_TOTAL_FLEET_CAP,
        CostCoefficients::default(),
        DEFAULT_ROAD_FACTOR,
    )
    .expect("generated data are well formed")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate_instance;

    fn mean_pairwise(inst: &Instance) -> f64 {
        let pts: Vec<(f64, f64)> = inst
            .clients()
            .iter()
            .map(|c| match c.location {
                Location::Planar { x, y } => (x, y),
                Location::LatLon { .. } => unreachable!(),
            })
            .collect();
        let mut sum = 0.0;
        let mut k = 0;
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                sum += (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
                k += 1;
            }
        }
        sum / k as f64
    }

    #[test]
    fn urban_is_clustered() {
        // Mean distance between two uniform points in a unit square.
        const UNIFORM_MEAN: f64 = 0.5214;
        let side = 800f64.sqrt();
        let mut below = 0;
        for seed in 0..100 {
            let inst = generate(&GeneratorConfig::new(Profile::UrbanDense, 25, seed)).unwrap();
            assert_eq!(inst.n_clients(), 25);
            if mean_pairwise(&inst) < UNIFORM_MEAN * side {
                below += 1;
            }
        }
        assert!(below >= 95, "{below}");
    }

    #[test]
    fn rural_counts_and_determinism() {
        let cfg = GeneratorConfig::new(Profile::RuralSparse, 6, 3);
        let a = generate(&cfg).unwrap();
        assert_eq!(a.n_clients(), 6);
        assert_eq!(a, generate(&cfg).unwrap());
        assert_ne!(a, generate(&GeneratorConfig { seed: 4, ..cfg }).unwrap());
    }

    #[test]
    fn generated_instances_validate() {
        for seed in 0..30 {
            for profile in [Profile::UrbanDense, Profile::RuralSparse] {
                let inst = generate(&GeneratorConfig::new(profile, 12, seed)).unwrap();
                assert!(validate_instance(&inst).is_empty(), "{:?}", validate_instance(&inst));
                for c in inst.clients() {
                    assert!((30.0..=250.0).contains(&c.energy_demand));
                    let w = c.window_close - c.window_open;
                    match profile {
                        Profile::UrbanDense => assert!((2.0..=4.0).contains(&w)),
                        Profile::RuralSparse => assert!((4.0..=8.0).contains(&w)),
                    }
                }
            }
        }
    }

    #[test]
    fn bad_config() {
        let mut cfg = GeneratorConfig::new(Profile::RuralSparse, 0, 1);
        assert!(generate(&cfg).is_err());
        cfg.n_clients = 3;
        cfg.area = -1.0;
        assert!(generate(&cfg).is_err());
    }
}
