//! The invariant suites behind `verify`, on grids small enough for a quick
//! run.

use crate::fieldio::{magnetisation_from_str, magnetisation_to_string};
use branchlab_bounds::{chain_of, stripe_pattern, YOUNG_CONSTANT};
use branchlab_construction::{
    block_correctors, building_block, zero_branching, BlockInput, BranchingConfig,
};
use branchlab_core::{check_admissibility, GridSpec, LateralBc, Magnetisation, Mode, StrayField};
use branchlab_energy::{minimal_stray_field, monotonicity_profile, orthogonality, total_energy};
use branchlab_minimize::{anneal, exhaustive_minimum, AnnealConfig, EnergyState, MoveSet, Stream};
use branchlab_relaxed::{boundary_layer, conditioned_data, LAYER_CONSTANT};

/// Outcome of one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteResult {
    pub name: &'static str,
    pub passed: bool,
    /// Worst measured value against its bound.
    pub detail: String,
}

type Outcome = Result<(bool, String), String>;

fn result(name: &'static str, outcome: Outcome) -> SuiteResult {
    match outcome {
        Ok((passed, detail)) => SuiteResult {
            name,
            passed,
            detail,
        },
        Err(e) => SuiteResult {
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

/// Runs every suite with `seeds` seeds for the randomised ones.
pub fn run_suites(seeds: u64) -> Vec<SuiteResult> {
    vec![
        result("field_file_round_trip", field_round_trip(seeds)),
        result("orthogonality", orthogonality_suite(seeds)),
        result("monotonicity", monotonicity_suite(seeds)),
        result("competitor_admissibility", competitor_suite()),
        result("corrector_residual", corrector_suite()),
        result("chain_below_energy", chain_suite()),
        result("incremental_energy", incremental_suite(seeds)),
        result("exhaustive_vs_anneal", exhaustive_suite()),
        result("boundary_layer_weights", layer_suite(seeds)),
    ]
}

/// Table with one `name result detail` row per suite.
pub fn table(results: &[SuiteResult]) -> String {
    let mut out = String::new();
    for r in results {
        out.push_str(&format!(
            "{:<26} {} {}\n",
            r.name,
            if r.passed { "PASS" } else { "FAIL" },
            r.detail
        ));
    }
    out
}

fn random_balanced(g: GridSpec, rng: &mut Stream) -> Magnetisation {
    let sc = g.slice_cells();
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
    Magnetisation::new(g, values, Mode::Sharp).expect("balanced values")
}

fn field_round_trip(seeds: u64) -> Outcome {
    for seed in 0..seeds {
        let mut rng = Stream::new(seed);
        let g = GridSpec::new(
            1 + (seed % 2) as usize,
            4,
            3,
            1.0 + rng.uniform(),
            0.5 + rng.uniform(),
            LateralBc::ZeroFlux,
        )
        .map_err(|e| e.to_string())?;
        let m = Magnetisation::from_fn(g, Mode::Relaxed, |_, _, _| 2.0 * rng.uniform() - 1.0)
            .map_err(|e| e.to_string())?;
        let text = magnetisation_to_string(&m).map_err(|e| e.to_string())?;
        if magnetisation_from_str(&text).map_err(|e| e.to_string())? != m {
            return Ok((false, format!("seed {seed} changed on reload")));
        }
    }
    Ok((true, format!("{seeds} fields bit-exact")))
}

fn orthogonality_suite(seeds: u64) -> Outcome {
    let mut worst = 0.0_f64;
    for seed in 0..seeds {
        let mut rng = Stream::new(seed);
        let g = GridSpec::new(1 + (seed % 2) as usize, 8, 6, 1.0, 1.0, LateralBc::ZeroFlux)
            .map_err(|e| e.to_string())?;
        let h = minimal_stray_field(&random_balanced(g, &mut rng)).map_err(|e| e.to_string())?;
        worst = worst.max(orthogonality(&h).relative_defect());
    }
    Ok((
        worst <= 1e-12,
        format!("max relative defect {worst:.3e} (bound 1e-12)"),
    ))
}

fn monotonicity_suite(seeds: u64) -> Outcome {
    let mut worst = 0.0_f64;
    for seed in 0..seeds {
        let mut rng = Stream::new(seed);
        let nv = 4 + rng.below(6);
        let g = GridSpec::new(
            1 + (seed % 2) as usize,
            4,
            nv,
            1.0,
            1.0,
            LateralBc::ZeroFlux,
        )
        .map_err(|e| e.to_string())?;
        let comps = [0, 1].map(|a| {
            (0..g.levels() * g.facets(a))
                .map(|_| 2.0 * rng.uniform() - 1.0)
                .collect()
        });
        let h = StrayField::from_parts(g, comps).map_err(|e| e.to_string())?;
        let slices: Vec<usize> = (1..=nv).collect();
        let p = monotonicity_profile(&h, [0, 0], g.n, &slices).map_err(|e| e.to_string())?;
        for w in p.windows(2) {
            worst = worst.max((w[0] - w[1]) / w[0].abs().max(f64::MIN_POSITIVE));
        }
    }
    Ok((
        worst <= 1e-12,
        format!("largest relative decrease {worst:.3e}"),
    ))
}

fn competitor_suite() -> Outcome {
    let mut worst = 0.0_f64;
    for (d, nh, nv) in [(1usize, 64usize, 32usize), (2, 64, 32)] {
        let g =
            GridSpec::new(d, nh, nv, 1.0, 1.0, LateralBc::ZeroFlux).map_err(|e| e.to_string())?;
        let b = zero_branching(
            &g,
            &BranchingConfig {
                n_blocks: 1,
                levels: 2,
            },
        )
        .map_err(|e| e.to_string())?;
        let h = b.field().map_err(|e| e.to_string())?;
        let r = check_admissibility(&b.m, &h, 1e-10).map_err(|e| e.to_string())?;
        if !r.passed {
            return Ok((false, format!("d = {d}: residual {:.3e}", r.max_residual)));
        }
        worst = worst.max(r.max_residual);
    }
    Ok((true, format!("max residual {worst:.3e} (bound 1e-10)")))
}

fn corrector_suite() -> Outcome {
    let inp = BlockInput::uniform(2, 16, 8, 0.0).map_err(|e| e.to_string())?;
    let m = building_block(&inp).map_err(|e| e.to_string())?;
    let c = block_correctors(&inp, &m).map_err(|e| e.to_string())?;
    Ok((
        c.residual <= 1e-10,
        format!("residual {:.3e} (bound 1e-10)", c.residual),
    ))
}

fn chain_suite() -> Outcome {
    let g = GridSpec::new(1, 128, 32, 2.0, 1.0, LateralBc::ZeroFlux).map_err(|e| e.to_string())?;
    let b = zero_branching(
        &g,
        &BranchingConfig {
            n_blocks: 2,
            levels: 2,
        },
    )
    .map_err(|e| e.to_string())?;
    let mut fields = vec![b.m];
    for cells in [8, 16, 32] {
        fields.push(stripe_pattern(&g, cells).map_err(|e| e.to_string())?);
    }
    let mut worst = 0.0_f64;
    for m in &fields {
        let e = total_energy(m, 1.0).map_err(|e| e.to_string())?.total;
        let c = chain_of(m, 1.0).map_err(|e| e.to_string())?.value;
        worst = worst.max(c / (YOUNG_CONSTANT * e));
    }
    Ok((worst <= 1.0, format!("max chain/(C_young E) {worst:.4}")))
}

fn incremental_suite(seeds: u64) -> Outcome {
    let mut worst = 0.0_f64;
    for seed in 0..seeds {
        let mut rng = Stream::new(seed);
        let bc = if seed % 2 == 0 {
            LateralBc::ZeroFlux
        } else {
            LateralBc::Periodic
        };
        let g = GridSpec::new(1 + (seed as usize / 2) % 2, 8, 4, 1.0, 1.0, bc)
            .map_err(|e| e.to_string())?;
        let mut st =
            EnergyState::new(&random_balanced(g, &mut rng), 1.0).map_err(|e| e.to_string())?;
        let sc = g.slice_cells();
        for _ in 0..20 {
            let a = rng.below(g.cells());
            let base = a - a % sc;
            let b = loop {
                let b = base + rng.below(sc);
                if st.values()[b] != st.values()[a] {
                    break b;
                }
            };
            let mv = st.pair_delta(a, b).map_err(|e| e.to_string())?;
            st.apply(mv);
            let full = total_energy(&st.magnetisation(), 1.0)
                .map_err(|e| e.to_string())?
                .total;
            worst = worst.max((st.energy() - full).abs() / full);
        }
    }
    Ok((
        worst <= 1e-8,
        format!("max relative drift {worst:.3e} (bound 1e-8)"),
    ))
}

fn exhaustive_suite() -> Outcome {
    let g = GridSpec::new(1, 4, 4, 1.0, 1.0, LateralBc::ZeroFlux).map_err(|e| e.to_string())?;
    let ex = exhaustive_minimum(&g, 1.0).map_err(|e| e.to_string())?;
    let start = random_balanced(g, &mut Stream::new(4));
    let cfg = AnnealConfig {
        seed: 2024,
        steps: 20_000,
        beta0: 0.5,
        rate: 0.9995,
        moves: MoveSet::SingleFlip,
    };
    let r = anneal(&start, 1.0, &cfg).map_err(|e| e.to_string())?;
    let gap = (r.energy - ex.energy).abs();
    Ok((
        gap <= 1e-8,
        format!("{} configurations, |anneal - optimum| {gap:.3e}", ex.count),
    ))
}

fn layer_suite(seeds: u64) -> Outcome {
    let g = GridSpec::new(1, 64, 16, 1.0, 1.0, LateralBc::ZeroFlux).map_err(|e| e.to_string())?;
    for seed in 0..seeds {
        let bd = conditioned_data(&g, seed, 8, 2.0 * LAYER_CONSTANT).map_err(|e| e.to_string())?;
        let pair = boundary_layer(&bd, 8, LAYER_CONSTANT).map_err(|e| e.to_string())?;
        for l in &pair.lambda {
            let ends = l[0] == 0.0 && l[l.len() - 1] == 0.0;
            if !ends || l.iter().any(|v| !(0.0..=0.5).contains(v)) {
                return Ok((false, format!("seed {seed}: weights {l:?}")));
            }
        }
    }
    Ok((true, format!("{seeds} seeds, λ ∈ [0, 1/2] with zero ends")))
}
