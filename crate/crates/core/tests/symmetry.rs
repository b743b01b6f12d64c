use branchlab_core::{
    anisotropic_rescale, check_admissibility, mirror_vertical, reflect_even, reflect_odd, restrict,
    CellBox, CoreError, GridSpec, LateralBc, Magnetisation, Mode, StrayField, SubCuboid,
    VerticalFace,
};
use branchlab_elliptic::PoissonSolver;
use proptest::prelude::*;
use rand_xoshiro::rand_core::{RngCore, SeedableRng};
use rand_xoshiro::SplitMix64;

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

/// Admissible least-norm field, one Poisson solve per level.
fn solved_field(m: &Magnetisation) -> StrayField {
    let g = *m.grid();
    let solver = PoissonSolver::new(g.slice_grid(), g.solver_bc().unwrap()).unwrap();
    let mut h = StrayField::zeros(g);
    for k in 0..g.levels() {
        let rho = m.charge_level(k).unwrap();
        let mut f = solver.gradient(&solver.solve(&rho).unwrap()).unwrap();
        f.scale(-1.0);
        h.set_level(k, &f).unwrap();
    }
    h
}

/// Naive energy: interface jumps times facet area plus the weighted field
/// energy, with half weight on cut faces and on lateral end facets.
fn naive_energy(m: &Magnetisation, h: &StrayField) -> (f64, f64) {
    let g = *m.grid();
    let [n0, n1] = g.n;
    let dz = g.dz();
    let mut int = 0.0;
    for k in 0..g.n_v {
        for i1 in 0..n1 {
            for i0 in 0..n0 {
                let here = m.get(i0, i1, k);
                let area0 = if g.d == 2 { g.dx(1) } else { 1.0 };
                if i0 + 1 < n0 {
                    int += (m.get(i0 + 1, i1, k) - here).abs() * area0 * dz;
                } else if g.bc[0] == LateralBc::Periodic {
                    int += (m.get(0, i1, k) - here).abs() * area0 * dz;
                }
                if g.d == 2 {
                    if i1 + 1 < n1 {
                        int += (m.get(i0, i1 + 1, k) - here).abs() * g.dx(0) * dz;
                    } else if g.bc[1] == LateralBc::Periodic {
                        int += (m.get(i0, 0, k) - here).abs() * g.dx(0) * dz;
                    }
                }
            }
        }
    }
    let mut field = 0.0;
    for k in 0..=g.n_v {
        let face = if k == 0 {
            Some(g.bottom)
        } else if k == g.n_v {
            Some(g.top)
        } else {
            None
        };
        let wk = if face == Some(VerticalFace::Cut) {
            0.5
        } else {
            1.0
        };
        let [c0, c1] = h.level(k);
        for (j, v) in c0.iter().enumerate() {
            let f0 = j % (n0 + 1);
            let w = if f0 == 0 || f0 == n0 { 0.5 } else { 1.0 };
            field += 0.5 * wk * dz * w * v * v * g.cell_area();
        }
        if g.d == 2 {
            for (j, v) in c1.iter().enumerate() {
                let f1 = j / n0;
                let w = if f1 == 0 || f1 == n1 { 0.5 } else { 1.0 };
                field += 0.5 * wk * dz * w * v * v * g.cell_area();
            }
        }
    }
    (int, field)
}

fn total(m: &Magnetisation, h: &StrayField) -> f64 {
    let (a, b) = naive_energy(m, h);
    a + b
}

#[test]
fn even_reflection_doubles_energy_and_stays_minimal() {
    let mut rng = SplitMix64::seed_from_u64(8);
    for d in [1, 2] {
        let g = GridSpec::new(d, 8, 4, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let m = random_balanced(g, &mut rng);
        let h = solved_field(&m);
        let e = total(&m, &h);
        for axis in 0..d {
            let (rm, rh) = reflect_even(&m, &h, axis).unwrap();
            assert!(check_admissibility(&rm, &rh, 1e-10).unwrap().passed);
            let er = total(&rm, &rh);
            assert!(
                (er - 2.0 * e).abs() < 1e-12 * e,
                "d={d} axis={axis}: {er} vs {}",
                2.0 * e
            );
            // The reflected field is again the least-norm one.
            let best = total(&rm, &solved_field(&rm));
            assert!((best - er).abs() < 1e-10 * er);
        }
    }
}

#[test]
fn odd_reflection_adds_the_plane_interface() {
    let mut rng = SplitMix64::seed_from_u64(9);
    for d in [1, 2] {
        let g = GridSpec::new(d, 8, 4, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let m = random_balanced(g, &mut rng);
        let h = solved_field(&m);
        let e = total(&m, &h);
        for axis in 0..d {
            let (rm, rh) = reflect_odd(&m, &h, axis).unwrap();
            assert_eq!(rm.grid().bc[axis], LateralBc::Free);
            assert!(check_admissibility(&rm, &rh, 1e-10).unwrap().passed);
            let mut plane = 0.0;
            let last = g.n[axis] - 1;
            let measure = if d == 2 { g.dx(1 - axis) } else { 1.0 };
            for k in 0..g.n_v {
                for t in 0..g.n[1 - axis].max(1) {
                    let v = if axis == 0 {
                        m.get(last, t, k)
                    } else {
                        m.get(t, last, k)
                    };
                    plane += v.abs() * measure * g.dz();
                }
            }
            let er = total(&rm, &rh);
            let want = 2.0 * e + 2.0 * plane;
            assert!((er - want).abs() < 1e-12 * want, "d={d} axis={axis}");
        }
    }
    let g = GridSpec::new(1, 4, 2, 1.0, 1.0, LateralBc::Periodic).unwrap();
    let z = Magnetisation::zeros(g);
    assert!(matches!(
        reflect_odd(&z, &StrayField::zeros(g), 0),
        Err(CoreError::BoundaryCondition(_))
    ));
}

#[test]
fn vertical_mirror_is_admissible_and_at_most_doubles_energy() {
    let mut rng = SplitMix64::seed_from_u64(10);
    let g = GridSpec::new(2, 8, 6, 1.0, 1.0, LateralBc::Periodic).unwrap();
    let m = random_balanced(g, &mut rng);
    let h = solved_field(&m);
    let (int, field) = naive_energy(&m, &h);
    let (rm, rh) = mirror_vertical(&m, &h).unwrap();
    assert!(check_admissibility(&rm, &rh, 1e-10).unwrap().passed);
    assert_eq!(rm.slice(0), rm.slice(2 * g.n_v - 1));
    let (rint, rfield) = naive_energy(&rm, &rh);
    assert!((rint - 2.0 * int).abs() < 1e-12 * int);
    assert!(rfield <= 2.0 * field * (1.0 + 1e-12));
}

#[test]
fn rescaling_multiplies_energy_by_the_scaling_power() {
    let mut rng = SplitMix64::seed_from_u64(12);
    let lambda: f64 = 8.0;
    for d in [1, 2] {
        let g = GridSpec::new(d, 8, 4, 2.0, 1.0, LateralBc::Periodic).unwrap();
        let m = random_balanced(g, &mut rng);
        let h = solved_field(&m);
        let (sm, sh) = anisotropic_rescale(&m, &h, lambda).unwrap();
        assert!(check_admissibility(&sm, &sh, 1e-10).unwrap().passed);
        let ratio = total(&sm, &sh) / total(&m, &h);
        let want = lambda.powf(-(2.0 * d as f64 + 1.0) / 3.0);
        assert!(
            (ratio - want).abs() < 1e-12 * want,
            "d={d}: {ratio} vs {want}"
        );
        assert!((sm.grid().half[0] - 2.0 * lambda.powf(-2.0 / 3.0)).abs() < 1e-15);
        assert!((sm.grid().height - 1.0 / lambda).abs() < 1e-15);
    }
}

#[test]
fn misaligned_and_outside_sub_boxes_are_rejected() {
    let g = GridSpec::new(2, 8, 8, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
    let ok = SubCuboid::bottom([0.0, 0.0], 0.5, 0.5)
        .to_cells(&g)
        .unwrap();
    assert_eq!(
        ok,
        CellBox {
            lo: [2, 2],
            hi: [6, 6],
            k_lo: 0,
            k_hi: 4
        }
    );
    let top = SubCuboid::top([0.0, 0.0], 0.5, 0.25).to_cells(&g).unwrap();
    assert_eq!((top.k_lo, top.k_hi), (6, 8));
    assert!(matches!(
        SubCuboid::bottom([0.1, 0.0], 0.5, 0.5).to_cells(&g),
        Err(CoreError::Misaligned(_))
    ));
    assert!(matches!(
        SubCuboid::bottom([0.75, 0.0], 0.5, 0.5).to_cells(&g),
        Err(CoreError::OutOfDomain(_))
    ));
}

#[test]
fn restriction_cuts_interior_faces() {
    let mut rng = SplitMix64::seed_from_u64(13);
    let g = GridSpec::new(2, 8, 8, 1.0, 1.0, LateralBc::Periodic).unwrap();
    let m = random_balanced(g, &mut rng);
    let cb = CellBox {
        lo: [0, 2],
        hi: [8, 6],
        k_lo: 3,
        k_hi: 8,
    };
    let r = restrict(&m, &cb).unwrap();
    let sg = r.grid();
    assert_eq!(sg.bc, [LateralBc::Periodic, LateralBc::Free]);
    assert_eq!(
        (sg.bottom, sg.top),
        (VerticalFace::Cut, VerticalFace::Closed)
    );
    assert_eq!(r.get(0, 0, 0), m.get(0, 2, 3));
    assert_eq!(r.get(7, 3, 4), m.get(7, 5, 7));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rescale_round_trip_restores_geometry(seed in any::<u64>(), lambda in 0.1f64..10.0) {
        let mut rng = SplitMix64::seed_from_u64(seed);
        let g = GridSpec::new(1, 8, 2, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let m = random_balanced(g, &mut rng);
        let h = solved_field(&m);
        let (a, b) = anisotropic_rescale(&m, &h, lambda).unwrap();
        let (c, d) = anisotropic_rescale(&a, &b, 1.0 / lambda).unwrap();
        prop_assert_eq!(c.values(), m.values());
        prop_assert!((c.grid().half[0] - 1.0).abs() < 1e-12);
        prop_assert!((c.grid().height - 1.0).abs() < 1e-12);
        for (x, y) in d.comps()[0].iter().zip(&h.comps()[0]) {
            prop_assert!((x - y).abs() <= 1e-12 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn solved_fields_are_admissible(seed in any::<u64>(), d in 1usize..3, periodic in any::<bool>()) {
        let mut rng = SplitMix64::seed_from_u64(seed);
        let bc = if periodic { LateralBc::Periodic } else { LateralBc::ZeroFlux };
        let g = GridSpec::new(d, 8, 4, 1.0, 1.0, bc).unwrap();
        let m = random_balanced(g, &mut rng);
        let rep = check_admissibility(&m, &solved_field(&m), 1e-10).unwrap();
        prop_assert!(rep.passed, "{:?}", rep);
        // A perturbed field violates the balance.
        let mut bad = solved_field(&m);
        bad.level_mut(1)[0][3] += 0.5;
        prop_assert!(!check_admissibility(&m, &bad, 1e-10).unwrap().passed);
    }
}
