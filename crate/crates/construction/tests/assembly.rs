use branchlab_construction::*;
use branchlab_core::{check_admissibility, GridSpec, LateralBc, Magnetisation, Mode};
use branchlab_energy::{field_energy, interfacial_energy, minimal_stray_energy};
use proptest::prelude::*;

fn zf(d: usize, n: usize, nv: usize, l: f64, t: f64) -> GridSpec {
    GridSpec::new(d, n, nv, l, t, LateralBc::ZeroFlux).unwrap()
}

#[test]
fn block_counts() {
    assert_eq!(choose_n(8.0, 1.0), 8);
    assert_eq!(choose_n(10.0, 8.0), 3);
    assert_eq!(choose_n(8.0_f64.powf(2.0 / 3.0), 8.0), 1);
}

#[test]
fn single_zero_block_pair_is_admissible_and_mirrored() {
    let g = zf(2, 16, 16, 1.0, 1.0);
    let b = zero_branching(
        &g,
        &BranchingConfig {
            n_blocks: 1,
            levels: 1,
        },
    )
    .unwrap();
    assert!(b.m.is_sharp_valued());
    for s in 0..16 {
        assert_eq!(b.m.slice_mean(s), 0.0);
        assert_eq!(b.m.slice(s), b.m.slice(15 - s));
    }
    let h = b.field().unwrap();
    let rep = check_admissibility(&b.m, &h, 1e-10).unwrap();
    assert!(rep.passed, "{}", rep.max_residual);
    assert_eq!(b.blocks.len(), 2 * 16);
    assert!(b.report.max_side_jumps <= 8.0);
    let r = &b.report;
    assert!((r.stray - field_energy(&h)).abs() < 1e-10 * r.stray);
    assert!((r.interfacial - interfacial_energy(&b.m)).abs() < 1e-12 * r.interfacial);
    assert!((r.field_distance - 2.0 * r.stray / r.volume).abs() < 1e-12);
    let per_level: f64 = r.interfacial_per_level.iter().sum::<f64>() + r.truncation_interfacial;
    assert!((per_level - r.interfacial).abs() < 1e-10 * r.interfacial);
    let per_level: f64 = r.field_per_level.iter().sum::<f64>() + r.truncation_field;
    assert!((per_level - r.stray).abs() < 1e-10 * r.stray);
}

#[test]
fn level_contributions_decay_geometrically_when_resolved() {
    // Fine enough that every interface moves several cells per slice and
    // every interval holds ten or more slices.
    let g = zf(1, 8192, 700, 1.0, 1.0);
    let b = zero_branching(
        &g,
        &BranchingConfig {
            n_blocks: 1,
            levels: 4,
        },
    )
    .unwrap();
    let target = 0.5_f64.sqrt();
    for values in [&b.report.interfacial_per_level, &b.report.field_per_level] {
        for q in BranchingReport::decay(values) {
            assert!((q / target - 1.0).abs() <= 0.15, "ratio {q} in {values:?}");
        }
    }
    assert!(b.report.max_side_jumps <= 8.0);
}

#[test]
fn unresolvable_and_inadmissible_inputs_are_rejected() {
    let g = zf(2, 16, 16, 1.0, 1.0);
    let too_deep = zero_branching(
        &g,
        &BranchingConfig {
            n_blocks: 1,
            levels: 2,
        },
    );
    assert!(matches!(too_deep, Err(ConstructionError::Unresolvable(_))));
    let too_thin = zero_branching(
        &zf(1, 64, 8, 1.0, 1.0),
        &BranchingConfig {
            n_blocks: 1,
            levels: 3,
        },
    );
    assert!(matches!(too_thin, Err(ConstructionError::Unresolvable(_))));
    let per = GridSpec::new(1, 16, 16, 1.0, 1.0, LateralBc::Periodic).unwrap();
    let periodic = zero_branching(
        &per,
        &BranchingConfig {
            n_blocks: 1,
            levels: 1,
        },
    );
    assert!(matches!(periodic, Err(ConstructionError::Inadmissible(_))));
    let biased = Magnetisation::from_fn(g, Mode::Relaxed, |_, _, _| 0.1).unwrap();
    let err = assemble_branching(
        &biased,
        &BranchingConfig {
            n_blocks: 1,
            levels: 1,
        },
    );
    assert!(matches!(err, Err(ConstructionError::Inadmissible(_))));
}

#[test]
fn periodic_variant_stays_within_the_dimensional_factor() {
    for d in [1, 2] {
        let g = zf(d, 32, 32, 1.0, 1.0);
        let b = zero_branching(
            &g,
            &BranchingConfig {
                n_blocks: 1,
                levels: 2,
            },
        )
        .unwrap();
        let h = b.field().unwrap();
        let e = b.report.energy(1.0).total;
        let (mp, hp) = periodic_competitor(&b.m, &h).unwrap();
        assert!(check_admissibility(&mp, &hp, 1e-10).unwrap().passed);
        let ep = interfacial_energy(&mp) + field_energy(&hp);
        assert!(ep <= (1 << d) as f64 * e, "d={d}: {ep} vs {e}");
        // The periodic minimal field can only be cheaper.
        assert!(minimal_stray_energy(&mp).unwrap() <= field_energy(&hp) * (1.0 + 1e-12));
        let pg = GridSpec::new(d, 64, 32, 1.0, 1.0, LateralBc::Periodic).unwrap();
        let (m2, _) = periodic_branching(
            &pg,
            &BranchingConfig {
                n_blocks: 1,
                levels: 2,
            },
        )
        .unwrap();
        assert_eq!(m2.values(), mp.values());
    }
}

#[test]
fn manifest_lists_every_block() {
    let g = zf(1, 64, 32, 1.0, 1.0);
    let b = zero_branching(
        &g,
        &BranchingConfig {
            n_blocks: 1,
            levels: 2,
        },
    )
    .unwrap();
    let text = manifest_string(&b.blocks);
    // Levels 1 and 2 hold 4 and 8 blocks per half.
    assert_eq!(text.lines().count(), 2 * (4 + 8));
    for line in text.lines() {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v["sigma_h"].as_f64().unwrap() > 0.0);
        assert!(v["side_jumps"].as_f64().unwrap() <= 8.0);
    }
}

/// Relaxed input with zero slice means: a few random plaquette-scale
/// modes per slice, scaled into [-1, 1].
fn relaxed_input(g: GridSpec, coeffs: &[f64]) -> Magnetisation {
    let raw = Magnetisation::from_fn(g, Mode::Relaxed, |i0, i1, k| {
        let x = (i0 as f64 + 0.5) / g.n[0] as f64;
        let y = (i1 as f64 + 0.5) / g.n[1] as f64;
        let a = coeffs[k % coeffs.len()];
        a * (std::f64::consts::TAU * x).sin()
            + 0.5 * (1.0 - a.abs()) * (std::f64::consts::TAU * 2.0 * y).cos()
    })
    .unwrap();
    let means = raw.slice_means();
    let mut values = raw.into_values();
    for (k, chunk) in values.chunks_mut(g.slice_cells()).enumerate() {
        chunk
            .iter_mut()
            .for_each(|v| *v = (*v - means[k]).clamp(-1.0, 1.0));
    }
    // Clamping can move a mean; recentre once more inside the margin.
    let m = Magnetisation::new(g, values, Mode::Relaxed).unwrap();
    let means = m.slice_means();
    let mut values = m.into_values();
    for (k, chunk) in values.chunks_mut(g.slice_cells()).enumerate() {
        chunk.iter_mut().for_each(|v| *v -= means[k]);
    }
    Magnetisation::new(g, values, Mode::Relaxed).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn relaxed_inputs_give_admissible_competitors(
        d in 1usize..3,
        coeffs in prop::collection::vec(-0.6f64..0.6, 1..5),
    ) {
        let g = zf(d, 32, 32, 1.0, 1.0);
        let m_rel = relaxed_input(g, &coeffs);
        let b = assemble_branching(&m_rel, &BranchingConfig { n_blocks: 1, levels: 2 }).unwrap();
        prop_assert!(b.m.is_sharp_valued());
        prop_assert!(b.report.slice_mean_defect < 1e-12, "{}", b.report.slice_mean_defect);
        let h = b.field().unwrap();
        prop_assert!(check_admissibility(&b.m, &h, 1e-10).unwrap().passed);
        prop_assert!(b.report.max_side_jumps <= 8.0);
        prop_assert!(b.report.field_distance.is_finite());
    }
}
