//! Periodic competitor from a zero-flux one.
//!
//! One even reflection per horizontal axis turns a zero-flux pair on
//! `[-L, L]^d` into a zero-flux pair on `[-L, 3L]^d` whose opposite faces
//! match, so it is also periodic. Contracting horizontally by 2 brings it
//! back to `[-L, L]^d`; the constraint `∂₃m + ∇'·h = 0` then needs the
//! field halved. The energy becomes `2 E_int + ¼ E_stray ≤ 2^d E`.

use crate::assemble::{zero_branching, BranchingConfig};
use crate::{ConstructionError, Result};
use branchlab_core::{reflect_even, GridSpec, LateralBc, Magnetisation, StrayField, VerticalFace};

/// Reflects and contracts a zero-flux pair into a periodic pair on the
/// same box with twice the cells per horizontal axis.
pub fn periodic_competitor(
    m: &Magnetisation,
    h: &StrayField,
) -> Result<(Magnetisation, StrayField)> {
    let g = *m.grid();
    g.ensure_same(h.grid())?;
    let (mut mr, mut hr) = (m.clone(), h.clone());
    for axis in 0..g.d {
        (mr, hr) = reflect_even(&mr, &hr, axis)?;
    }
    let rg = *mr.grid();
    let pg = GridSpec::with_parts(
        g.d,
        rg.n,
        g.n_v,
        g.half,
        g.height,
        [LateralBc::Periodic; 2],
        g.bottom,
        g.top,
    )?;
    let m_hat = Magnetisation::new(pg, mr.into_values(), m.mode())?;
    let [h0, h1] = hr.scaled(0.5).into_parts();
    let h_hat = StrayField::from_parts(pg, [h0, h1])?;
    Ok((m_hat, h_hat))
}

/// The periodic competitor on the periodic `grid`, contracted from the
/// zero-flux branching competitor (`m_rel ≡ 0`) at half the horizontal
/// resolution.
pub fn periodic_branching(
    grid: &GridSpec,
    cfg: &BranchingConfig,
) -> Result<(Magnetisation, StrayField)> {
    if grid.bottom != VerticalFace::Closed || grid.top != VerticalFace::Closed {
        return Err(ConstructionError::Inadmissible(
            "both horizontal faces must be closed".into(),
        ));
    }
    let mut n = grid.n;
    for (a, cells) in n.iter_mut().enumerate().take(grid.d) {
        if *cells % 2 != 0 {
            return Err(ConstructionError::Unresolvable(format!(
                "{cells} cells on axis {a} are not divisible by 2"
            )));
        }
        *cells /= 2;
    }
    let zg = GridSpec::with_parts(
        grid.d,
        n,
        grid.n_v,
        grid.half,
        grid.height,
        [LateralBc::ZeroFlux; 2],
        grid.bottom,
        grid.top,
    )?;
    let b = zero_branching(&zg, cfg)?;
    let h = b.field()?;
    periodic_competitor(&b.m, &h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use branchlab_core::{check_admissibility, Mode};
    use branchlab_energy::{field_energy, interfacial_energy, minimal_stray_field};

    #[test]
    fn one_dimensional_block_gives_four_images() {
        let g = GridSpec::new(1, 32, 8, 1.0, 1.0, LateralBc::ZeroFlux).unwrap();
        let b = zero_branching(
            &g,
            &BranchingConfig {
                n_blocks: 1,
                levels: 1,
            },
        )
        .unwrap();
        let h = minimal_stray_field(&b.m).unwrap();
        let (mp, hp) = periodic_competitor(&b.m, &h).unwrap();
        assert_eq!(mp.grid().n[0], 64);
        assert_eq!(mp.grid().bc[0], LateralBc::Periodic);
        assert_eq!(mp.mode(), Mode::Sharp);
        for s in 0..8 {
            let orig = b.m.slice(s);
            let refl = mp.slice(s);
            for i in 0..32 {
                assert_eq!(refl[i], orig[i]);
                assert_eq!(refl[63 - i], orig[i]);
            }
            assert!(mp.slice_mean(s).abs() < 1e-15);
        }
        assert!(check_admissibility(&mp, &hp, 1e-10).unwrap().passed);
        let (ei, es) = (interfacial_energy(&b.m), field_energy(&h));
        assert!((interfacial_energy(&mp) - 2.0 * ei).abs() < 1e-9 * ei.max(1.0));
        assert!((field_energy(&hp) - 0.25 * es).abs() < 1e-9 * es.max(1.0));
    }

    #[test]
    fn odd_resolution_is_rejected() {
        let g = GridSpec::with_parts(
            1,
            [6, 1],
            8,
            [1.0, 0.5],
            1.0,
            [LateralBc::Periodic; 2],
            VerticalFace::Closed,
            VerticalFace::Closed,
        )
        .unwrap();
        let err = periodic_branching(
            &g,
            &BranchingConfig {
                n_blocks: 1,
                levels: 1,
            },
        );
        assert!(matches!(err, Err(ConstructionError::Unresolvable(_))));
    }
}
