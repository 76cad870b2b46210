use dconc_core::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() {
    let rho = werner_state(2, -0.5).unwrap();
    for seed in 0..6u64 {
        let cfg = RoofConfig { restarts: 1, rng_seed: seed, ..RoofConfig::default() };
        let t = std::time::Instant::now();
        let est = minimize_roof(&rho, MeasureKind::DConcurrence, &cfg).unwrap();
        println!("seed {seed}: value - 0.25 = {:+.3e}  ({:?})", est.value - 0.25, t.elapsed());
    }

    // acceptance-style check: m=8, restarts=20, random two-qubit states
    let mut bad = 0;
    let mut worst = 0.0f64;
    let t = std::time::Instant::now();
    let n_states = 30;
    for i in 0..n_states {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + i);
        let rank = 1 + (i as usize % 4);
        let rho = ginibre_random_density(2, 2, rank, &mut rng).unwrap();
        let cfg = RoofConfig { ensemble_size: 8, rng_seed: i, ..RoofConfig::default() };
        let est = minimize_roof(&rho, MeasureKind::DConcurrence, &cfg).unwrap();
        let target = wootters_concurrence(&rho).unwrap().value / 2.0;
        let dev = (est.value - target).abs();
        worst = worst.max(dev);
        if dev > 2e-3 { bad += 1; println!("  state {i} rank {rank}: dev {dev:.3e}"); }
    }
    println!("random states: {bad}/{n_states} beyond 2e-3, worst {worst:.3e}, total {:?}", t.elapsed());
}
