use branchlab_construction::{zero_branching, BranchingConfig};
use branchlab_core::{GridSpec, LateralBc, Magnetisation, Mode};
use branchlab_energy::total_energy;
use branchlab_minimize::*;
use proptest::prelude::*;

/// Balanced random sharp field: every slice holds equally many `±1` cells.
fn random_balanced(g: GridSpec, seed: u64) -> Magnetisation {
    let sc = g.slice_cells();
    let mut rng = Stream::new(seed);
    let mut values = Vec::with_capacity(g.cells());
    for _ in 0..g.n_v {
        let mut slice: Vec<f64> = (0..sc)
            .map(|i| if i < sc / 2 { 1.0 } else { -1.0 })
            .collect();
        for i in (1..sc).rev() {
            slice.swap(i, rng.below(i + 1));
        }
        values.extend(slice);
    }
    Magnetisation::new(g, values, Mode::Sharp).unwrap()
}

fn full(m: &Magnetisation, sigma: f64) -> f64 {
    total_energy(m, sigma).unwrap().total
}

#[test]
fn pair_flip_and_its_inverse_cancel() {
    let g = GridSpec::new(2, 8, 4, 1.0, 0.5, LateralBc::Periodic).unwrap();
    let mut st = EnergyState::new(&random_balanced(g, 5), 1.3).unwrap();
    let sc = g.slice_cells();
    let v = st.values().to_vec();
    let a = 2 * sc + 3;
    let b = (2 * sc..3 * sc).find(|&b| v[b] != v[a]).unwrap();
    let e0 = st.energy();
    let forward = st.pair_delta(a, b).unwrap();
    let d1 = forward.delta;
    st.apply(forward);
    let back = st.pair_delta(a, b).unwrap();
    assert!((d1 + back.delta).abs() < 1e-10, "{} {}", d1, back.delta);
    st.apply(back);
    assert_eq!(st.values(), &v[..]);
    assert!((st.energy() - e0).abs() < 1e-10);
}

#[test]
fn incremental_deltas_match_full_re_evaluation() {
    let cases = [
        (1, 16, 6, LateralBc::ZeroFlux),
        (1, 16, 6, LateralBc::Periodic),
        (2, 8, 4, LateralBc::ZeroFlux),
        (2, 8, 4, LateralBc::Periodic),
    ];
    let mut checked = 0;
    for (j, &(d, n, nv, bc)) in cases.iter().enumerate() {
        let g = GridSpec::new(d, n, nv, 2.0, 1.0, bc).unwrap();
        let sigma = 0.8;
        let mut st = EnergyState::new(&random_balanced(g, j as u64), sigma).unwrap();
        let mut rng = Stream::new(100 + j as u64);
        let sc = g.slice_cells();
        let mut e = full(&st.magnetisation(), sigma);
        for step in 0..250 {
            let mv = if step % 5 == 4 {
                let a = rng.below(sc);
                let b = (a + 1 + rng.below(sc - 1)) % sc;
                st.column_swap_delta(a, b).unwrap()
            } else {
                let a = rng.below(g.cells());
                let base = a - a % sc;
                let v = st.values();
                let b = loop {
                    let b = base + rng.below(sc);
                    if v[b] != v[a] {
                        break b;
                    }
                };
                st.pair_delta(a, b).unwrap()
            };
            let delta = mv.delta;
            st.apply(mv);
            let after = full(&st.magnetisation(), sigma);
            assert!(
                ((after - e) - delta).abs() <= 1e-8 * after,
                "case {j} step {step}: {} vs {delta}",
                after - e
            );
            assert!((st.energy() - after).abs() <= 1e-8 * after);
            e = after;
            checked += 1;
        }
    }
    assert_eq!(checked, 1000);
}

#[test]
fn same_seed_gives_identical_runs() {
    let g = GridSpec::new(2, 8, 4, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
    let m = random_balanced(g, 9);
    for moves in [MoveSet::SingleFlip, MoveSet::ColumnSwap] {
        let cfg = AnnealConfig {
            seed: 11,
            steps: 2000,
            beta0: 2.0,
            rate: 0.998,
            moves,
        };
        let a = anneal(&m, 1.0, &cfg).unwrap();
        let b = anneal(&m, 1.0, &cfg).unwrap();
        assert_eq!(a.best.values(), b.best.values());
        assert_eq!(a.energy.to_bits(), b.energy.to_bits());
        assert_eq!(a.trace, b.trace);
        let c = anneal(&m, 1.0, &AnnealConfig { seed: 12, ..cfg }).unwrap();
        assert_ne!(a.trace, c.trace);
    }
}

#[test]
fn greedy_descent_from_the_competitor_does_not_increase_energy() {
    let g = GridSpec::new(1, 64, 32, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
    let comp = zero_branching(
        &g,
        &BranchingConfig {
            n_blocks: 1,
            levels: 2,
        },
    )
    .unwrap();
    let e0 = full(&comp.m, 1.0);
    for moves in [MoveSet::SingleFlip, MoveSet::ColumnSwap] {
        let cfg = AnnealConfig {
            seed: 1,
            steps: 3000,
            beta0: f64::INFINITY,
            rate: 1.0,
            moves,
        };
        let r = anneal(&comp.m, 1.0, &cfg).unwrap();
        assert!((r.initial_energy - e0).abs() < 1e-9 * e0);
        assert!(r.energy <= e0 * (1.0 + 1e-12), "{} > {e0}", r.energy);
        assert!((full(&r.best, 1.0) - r.energy).abs() < 1e-10 * e0);
        assert!(r
            .trace
            .windows(2)
            .all(|w| w[1].energy <= w[0].energy + 1e-12 * e0));
    }
}

#[test]
fn annealing_finds_the_enumerated_optimum_on_four_by_four() {
    let sigma = 1.0;
    let g = GridSpec::new(1, 4, 4, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
    let ex = exhaustive_minimum(&g, sigma).unwrap();
    assert_eq!(ex.count, 1296);
    assert!((full(&ex.best, sigma) - ex.energy).abs() < 1e-10);
    let start = random_balanced(g, 4);
    let cfg = AnnealConfig {
        seed: 2024,
        steps: 20_000,
        beta0: 0.5,
        rate: 0.9995,
        moves: MoveSet::SingleFlip,
    };
    let r = anneal(&start, sigma, &cfg).unwrap();
    assert!(
        (r.energy - ex.energy).abs() < 1e-8,
        "{} vs {}",
        r.energy,
        ex.energy
    );
}

#[test]
fn oversized_enumeration_is_refused() {
    let g = GridSpec::new(1, 8, 8, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
    assert!(matches!(
        exhaustive_minimum(&g, 1.0),
        Err(MinimizeError::TooLarge { .. })
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn anneal_never_leaves_the_admissible_class(seed in any::<u64>(), d in 1usize..3, swap in any::<bool>()) {
        let g = GridSpec::new(d, 8, 3, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let m = random_balanced(g, seed);
        let moves = if swap { MoveSet::ColumnSwap } else { MoveSet::SingleFlip };
        let cfg = AnnealConfig { seed, steps: 200, beta0: 1.0, rate: 0.99, moves };
        let r = anneal(&m, 1.0, &cfg).unwrap();
        prop_assert!(r.best.is_sharp_valued());
        for k in 0..g.n_v {
            prop_assert_eq!(r.best.slice_mean(k), 0.0);
        }
        prop_assert!(r.energy <= r.initial_energy + 1e-10 * r.initial_energy);
    }
}
