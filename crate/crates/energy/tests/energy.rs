use branchlab_core::{
    check_admissibility, restrict, restrict_field, CellBox, GridSpec, LateralBc, Magnetisation,
    Mode, StrayField, SubCuboid,
};
use branchlab_energy::*;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;
use std::f64::consts::PI;

fn uniform(rng: &mut SplitMix64) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

fn random_field(g: GridSpec, rng: &mut SplitMix64) -> StrayField {
    let comps = [0, 1].map(|a| {
        (0..g.levels() * g.facets(a))
            .map(|_| 2.0 * uniform(rng) - 1.0)
            .collect()
    });
    StrayField::from_parts(g, comps).unwrap()
}

/// Sharp field whose slices are random balanced ±1 patterns.
fn random_balanced(g: GridSpec, rng: &mut SplitMix64) -> Magnetisation {
    let s = g.slice_cells();
    let mut values = Vec::with_capacity(g.cells());
    for _ in 0..g.n_v {
        let mut slice: Vec<f64> = (0..s).map(|i| if i < s / 2 { 1.0 } else { -1.0 }).collect();
        for i in (1..s).rev() {
            let j = (rng.next_u64() % (i as u64 + 1)) as usize;
            slice.swap(i, j);
        }
        values.extend(slice);
    }
    Magnetisation::new(g, values, Mode::Sharp).unwrap()
}

/// Least-norm admissible field energy of one level, by weighted
/// pseudo-inverse: minimise Σ w_f h_f² subject to the divergence balance.
fn qp_level_energy(n: usize, dx: f64, periodic: bool, rho: &[f64]) -> f64 {
    let vars = if periodic { n } else { n - 1 };
    let mut a = DMatrix::<f64>::zeros(n, vars);
    let var_of = |f: usize| -> Option<usize> {
        if periodic {
            Some(f % n)
        } else if f == 0 || f == n {
            None
        } else {
            Some(f - 1)
        }
    };
    for i in 0..n {
        if let Some(v) = var_of(i + 1) {
            a[(i, v)] += 1.0 / dx;
        }
        if let Some(v) = var_of(i) {
            a[(i, v)] -= 1.0 / dx;
        }
    }
    // All variables carry unit weight: interior facets, or the two
    // identified periodic end facets with weight ½ each.
    let b = DVector::from_column_slice(rho);
    let pinv = a.clone().pseudo_inverse(1e-12).unwrap();
    let h = pinv * b;
    h.iter().map(|v| v * v).sum::<f64>() * dx
}

#[test]
fn minimal_field_matches_quadratic_oracle_on_all_small_configurations() {
    // All 6⁴ = 1296 sharp fields on the 4 × 4 grid with balanced slices.
    let patterns: Vec<[f64; 4]> = (0u32..16)
        .filter(|b| b.count_ones() == 2)
        .map(|b| [0, 1, 2, 3].map(|i| if b >> i & 1 == 1 { 1.0 } else { -1.0 }))
        .collect();
    assert_eq!(patterns.len(), 6);
    for bc in [LateralBc::ZeroFlux, LateralBc::Periodic] {
        let g = GridSpec::new(1, 4, 4, 1.0, 1.0, bc).unwrap();
        let mut worst = 0.0_f64;
        for code in 0..1296usize {
            let mut values = Vec::with_capacity(16);
            let mut c = code;
            for _ in 0..4 {
                values.extend_from_slice(&patterns[c % 6]);
                c /= 6;
            }
            let m = Magnetisation::new(g, values, Mode::Sharp).unwrap();
            let got = minimal_stray_energy(&m).unwrap();
            let mut want = 0.0;
            for k in 0..=4 {
                let rho = m.charge_level(k).unwrap();
                want += 0.5 * g.dz() * qp_level_energy(4, g.dx(0), bc == LateralBc::Periodic, &rho);
            }
            worst = worst.max((got - want).abs() / want);
        }
        assert!(worst < 1e-8, "{bc:?}: relative deviation {worst}");
    }
}

#[test]
fn height_constant_stripes_carry_only_boundary_sheets() {
    // Square wave with period 8 cells on 64 cells, constant in height.
    let (n, l, t, nv) = (64usize, 2.0, 1.0, 16usize);
    let g = GridSpec::new(1, n, nv, l, t, LateralBc::Periodic).unwrap();
    let m = Magnetisation::from_fn(
        g,
        Mode::Sharp,
        |i, _, _| if (i / 4) % 2 == 0 { 1.0 } else { -1.0 },
    )
    .unwrap();
    let h = minimal_stray_field(&m).unwrap();
    for k in 1..nv {
        assert!(h.level(k)[0].iter().all(|v| v.abs() < 1e-12));
    }
    // Oracle: naive DFT with the discrete symbol (4/dx²) sin²(πq/n).
    let dx = g.dx(0);
    let s = m.slice(0);
    let mut norm = 0.0;
    for q in 1..n {
        let (mut re, mut im) = (0.0, 0.0);
        for (j, v) in s.iter().enumerate() {
            let ang = -2.0 * PI * (j * q % n) as f64 / n as f64;
            re += v * ang.cos();
            im += v * ang.sin();
        }
        let lam = 4.0 / (dx * dx) * (PI * q as f64 / n as f64).sin().powi(2);
        norm += (re * re + im * im) / lam * dx / n as f64;
    }
    let want = norm / g.dz();
    let got = minimal_stray_energy(&m).unwrap();
    assert!(((got - want) / want).abs() < 1e-6, "{got} vs {want}");
}

#[test]
fn minimal_field_is_curl_free_and_admissible() {
    let mut rng = SplitMix64::seed_from_u64(11);
    for bc in [LateralBc::ZeroFlux, LateralBc::Periodic] {
        let g = GridSpec::new(2, 8, 6, 1.5, 1.0, bc).unwrap();
        let m = random_balanced(g, &mut rng);
        let h = minimal_stray_field(&m).unwrap();
        assert!(discrete_curl_max(&h) < 1e-10);
        assert!(check_admissibility(&m, &h, 1e-10).unwrap().passed);
        // The full-height cumulated field of the minimal field vanishes.
        let hbar = height_average(&h, g.n_v).unwrap();
        assert!(hbar.max_abs() < 1e-12, "{}", hbar.max_abs());
    }
}

#[test]
fn energies_are_additive_over_partitions() {
    let mut rng = SplitMix64::seed_from_u64(5);
    let g = GridSpec::new(2, 8, 8, 1.0, 2.0, LateralBc::Periodic).unwrap();
    let m = random_balanced(g, &mut rng);
    let h = minimal_stray_field(&m).unwrap();
    let whole = pair_energy(&m, &h, 1.0).unwrap();
    let mut int = 0.0;
    let mut stray = 0.0;
    for (k_lo, k_hi) in [(0, 3), (3, 8)] {
        for (x_lo, x_hi) in [(0, 5), (5, 8)] {
            for (y_lo, y_hi) in [(0, 2), (2, 8)] {
                let cb = CellBox {
                    lo: [x_lo, y_lo],
                    hi: [x_hi, y_hi],
                    k_lo,
                    k_hi,
                };
                let b = box_energy(&m, &restrict_field(&h, &cb).unwrap(), &cb, 1.0).unwrap();
                int += b.interfacial;
                stray += b.stray;
            }
        }
    }
    assert!((int - whole.interfacial).abs() < 1e-12 * whole.interfacial);
    assert!((stray - whole.stray).abs() < 1e-12 * whole.stray);
    // Spectral and direct evaluation agree.
    let spectral = total_energy(&m, 1.0).unwrap();
    assert!((spectral.total - whole.total).abs() < 1e-10 * whole.total);
}

#[test]
fn two_level_field_has_closed_form_profile() {
    let (nv, c) = (8usize, 0.7);
    let g = GridSpec::new(1, 4, nv, 1.0, 2.0, LateralBc::ZeroFlux).unwrap();
    let mut comps = [vec![0.0; g.levels() * g.facets(0)], vec![]];
    for k in nv / 2 + 1..=nv {
        for f in 0..g.facets(0) {
            comps[0][k * g.facets(0) + f] = c;
        }
    }
    let h = StrayField::from_parts(g, comps).unwrap();
    let slices: Vec<usize> = (1..=nv).collect();
    let p = monotonicity_profile(&h, [0, 0], [4, 1], &slices).unwrap();
    for (j, &nt) in slices.iter().enumerate() {
        let w = if nt == nv {
            nt as f64 + 1.0
        } else {
            nt as f64 + 0.5
        };
        let top = if nt == nv { 1.0 } else { 0.5 };
        let ones = (nt as f64 - (nv / 2) as f64 - 1.0).max(0.0);
        let q = if nt > nv / 2 { ones + top } else { 0.0 };
        let t = nt as f64 * g.dz();
        let want = (t / g.half[0]).powi(2) * c * c * q * (w - q) / (w * w);
        assert!((p[j] - want).abs() < 1e-13, "nt={nt}: {} vs {want}", p[j]);
        if nt <= nv / 2 {
            assert_eq!(p[j], 0.0);
        } else {
            assert!(p[j] > p[j - 1]);
        }
    }
}

#[test]
fn monotonicity_profile_never_decreases_on_random_fields() {
    let mut rng = SplitMix64::seed_from_u64(2024);
    for case in 0..1000 {
        let d = 1 + case % 2;
        let nv = 4 + (rng.next_u64() % 8) as usize;
        let g = GridSpec::new(d, 4, nv, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let h = random_field(g, &mut rng);
        let slices: Vec<usize> = (1..=nv).collect();
        let p = monotonicity_profile(&h, [0, 0], g.n, &slices).unwrap();
        for w in p.windows(2) {
            assert!(w[1] >= w[0] - 1e-12 * w[0].abs(), "case {case}: {p:?}");
        }
    }
}

#[test]
fn good_width_skips_a_loaded_ring() {
    let g = GridSpec::new(2, 16, 4, 2.0, 1.0, LateralBc::ZeroFlux).unwrap();
    let mut h = StrayField::zeros(g);
    let sg = g.slice_grid();
    // Load the normal facets of the square of half-width 3 cells about the
    // centre vertex (8, 8) on every level.
    for k in 0..g.levels() {
        let [c0, c1] = h.level_mut(k);
        for i in 5..11 {
            c0[sg.facet0(5, i)] = 1.0;
            c0[sg.facet0(11, i)] = 1.0;
            c1[sg.facet1(i, 5)] = 1.0;
            c1[sg.facet1(i, 11)] = 1.0;
        }
    }
    let dx = g.dx(0);
    let w = good_width(&h, [0.0, 0.0], 2.0 * dx, 5.0 * dx, 0.5, 1.0).unwrap();
    assert_eq!(w.cells, 2);
    let w = good_width(&h, [0.0, 0.0], 3.0 * dx, 5.0 * dx, 0.5, 1.0).unwrap();
    assert_eq!(w.cells, 4, "the loaded ring at 3 cells is skipped");
    assert!(w.trace <= w.threshold);
}

#[test]
fn local_stats_of_interface_free_field_vanish() {
    let g = GridSpec::new(2, 8, 4, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
    let m = Magnetisation::from_fn(
        g,
        Mode::Sharp,
        |_, _, k| if k % 2 == 0 { 1.0 } else { -1.0 },
    )
    .unwrap();
    let s = local_stats(
        &m,
        &StrayField::zeros(g),
        &SubCuboid::bottom([0.0, 0.0], 0.5, 0.5),
        1.0,
    )
    .unwrap();
    assert_eq!((s.f, s.f0, s.n), (0.0, 0.0, 0.0));
}

#[test]
fn restricted_patch_drops_only_boundary_facets() {
    let mut rng = SplitMix64::seed_from_u64(3);
    let g = GridSpec::new(2, 8, 4, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
    let m = random_balanced(g, &mut rng);
    let cb = CellBox {
        lo: [2, 1],
        hi: [6, 7],
        k_lo: 1,
        k_hi: 3,
    };
    let patch = restrict(&m, &cb).unwrap();
    let inner = interfacial_energy(&patch);
    let with_boundary = interfacial_energy_in(&m, &cb);
    assert!(inner <= with_boundary + 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn orthogonality_holds_to_round_off(seed in any::<u64>(), d in 1usize..3, nv in 1usize..9, top_cut in any::<bool>()) {
        let mut rng = SplitMix64::seed_from_u64(seed);
        let g = GridSpec::new(d, 4, nv + 1, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let h = random_field(g, &mut rng);
        let k_hi = if top_cut { nv } else { nv + 1 };
        let cb = CellBox { lo: [0, 0], hi: g.n, k_lo: 0, k_hi };
        let o = orthogonality(&restrict_field(&h, &cb).unwrap());
        prop_assert!(o.relative_defect() <= 1e-12, "{o:?}");
    }

    #[test]
    fn local_bounds_hold(seed in any::<u64>(), nt in 1usize..8, half_cells in 1usize..5) {
        let mut rng = SplitMix64::seed_from_u64(seed);
        let g = GridSpec::new(2, 8, 8, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let m = random_balanced(g, &mut rng);
        let h = random_field(g, &mut rng);
        let sub = SubCuboid::bottom([0.0, 0.0], half_cells as f64 * g.dx(0), nt as f64 * g.dz());
        let s = local_stats(&m, &h, &sub, 1.0).unwrap();
        prop_assert!(s.f >= 0.0 && s.f0 >= s.f - 1e-12 * s.f0 && s.n >= 0.0);
        prop_assert!(s.e <= s.reconstruction * (1.0 + 1e-12));
    }
}
