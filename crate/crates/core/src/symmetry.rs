//! Reflections, vertical mirroring and the anisotropic rescaling.

use crate::field::{Magnetisation, StrayField};
use crate::grid::{GridSpec, LateralBc};
use crate::{CoreError, Result};

/// Parity of a lateral reflection.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Parity {
    Even,
    Odd,
}

/// Even reflection across the upper face of `axis`.
///
/// The magnetisation is mirrored, the normal field component changes sign
/// and the tangential components are mirrored. The face must carry zero
/// flux, so the reflected pair is admissible with the same zero-flux
/// condition, gains no interface on the reflection plane, and has exactly
/// twice the energy.
pub fn reflect_even(
    m: &Magnetisation,
    h: &StrayField,
    axis: usize,
) -> Result<(Magnetisation, StrayField)> {
    m.grid().ensure_axis(axis)?;
    if m.grid().bc[axis] != LateralBc::ZeroFlux {
        return Err(CoreError::BoundaryCondition(format!(
            "even reflection needs a zero-flux face on axis {axis}"
        )));
    }
    reflect(m, h, axis, Parity::Even)
}

/// Odd reflection across the upper face of `axis`.
///
/// The image carries `-m`, the normal field component is mirrored
/// unchanged and the tangential components change sign. The pair stays
/// admissible, every slice of the extension has zero mean, and the energy
/// becomes `2E` plus the interface created on the reflection plane:
/// `2 |m|` times the plane's area in every slice. The extended axis is
/// free.
pub fn reflect_odd(
    m: &Magnetisation,
    h: &StrayField,
    axis: usize,
) -> Result<(Magnetisation, StrayField)> {
    m.grid().ensure_axis(axis)?;
    if m.grid().bc[axis] == LateralBc::Periodic {
        return Err(CoreError::BoundaryCondition(format!(
            "odd reflection across a periodic face on axis {axis}"
        )));
    }
    reflect(m, h, axis, Parity::Odd)
}

fn reflect(
    m: &Magnetisation,
    h: &StrayField,
    axis: usize,
    parity: Parity,
) -> Result<(Magnetisation, StrayField)> {
    let g = *m.grid();
    g.ensure_same(h.grid())?;
    let mut n = g.n;
    n[axis] *= 2;
    let mut half = g.half;
    half[axis] *= 2.0;
    let mut bc = g.bc;
    bc[axis] = match parity {
        Parity::Even => LateralBc::ZeroFlux,
        Parity::Odd => LateralBc::Free,
    };
    let ng = GridSpec::with_parts(g.d, n, g.n_v, half, g.height, bc, g.bottom, g.top)?;
    let na = g.n[axis];
    let (sign_m, sign_normal, sign_tangent) = match parity {
        Parity::Even => (1.0, -1.0, 1.0),
        Parity::Odd => (-1.0, 1.0, -1.0),
    };
    // Cell coordinate along the reflected axis → (source coordinate, sign).
    let cell = |i: usize| {
        if i < na {
            (i, 1.0)
        } else {
            (2 * na - 1 - i, sign_m)
        }
    };
    let cell_t = |i: usize| {
        if i < na {
            (i, 1.0)
        } else {
            (2 * na - 1 - i, sign_tangent)
        }
    };
    let facet = |f: usize| {
        if f <= na {
            (f, 1.0)
        } else {
            (2 * na - f, sign_normal)
        }
    };

    let mut values = Vec::with_capacity(ng.cells());
    for k in 0..g.n_v {
        for i1 in 0..ng.n[1] {
            for i0 in 0..ng.n[0] {
                let (j0, j1, s) = if axis == 0 {
                    let (j, s) = cell(i0);
                    (j, i1, s)
                } else {
                    let (j, s) = cell(i1);
                    (i0, j, s)
                };
                values.push(s * m.get(j0, j1, k));
            }
        }
    }
    let nm = Magnetisation::new(ng, values, m.mode())?;

    let sg = g.slice_grid();
    let nsg = ng.slice_grid();
    let mut c0 = Vec::with_capacity(ng.levels() * ng.facets(0));
    let mut c1 = Vec::with_capacity(ng.levels() * ng.facets(1));
    for k in 0..g.levels() {
        let [l0, l1] = h.level(k);
        for i1 in 0..ng.n[1] {
            for f0 in 0..=ng.n[0] {
                let (src, s) = if axis == 0 {
                    let (f, s) = facet(f0);
                    (sg.facet0(f, i1), s)
                } else {
                    let (j, s) = cell_t(i1);
                    (sg.facet0(f0, j), s)
                };
                c0.push(s * l0[src]);
            }
        }
        if g.d == 2 {
            for f1 in 0..=ng.n[1] {
                for i0 in 0..ng.n[0] {
                    let (src, s) = if axis == 1 {
                        let (f, s) = facet(f1);
                        (sg.facet1(i0, f), s)
                    } else {
                        let (j, s) = cell_t(i0);
                        (sg.facet1(j, f1), s)
                    };
                    c1.push(s * l1[src]);
                }
            }
        }
        debug_assert_eq!(c0.len(), (k + 1) * nsg.facets(0));
    }
    let nh = StrayField::from_parts(ng, [c0, c1])?;
    Ok((nm, nh))
}

/// Even reflection of the box across its top face.
///
/// The magnetisation is mirrored (`m'_{n+s} = m_{n-1-s}`), the field is
/// mirrored with a sign change and vanishes on the mirror level. The new
/// top face has the type of the original bottom face, so the traces on the
/// new bottom and top coincide. Interfacial energy doubles exactly; the
/// stray energy is twice the original minus the two copies of the
/// original top level, so the total is at most doubled.
pub fn mirror_vertical(m: &Magnetisation, h: &StrayField) -> Result<(Magnetisation, StrayField)> {
    let g = *m.grid();
    g.ensure_same(h.grid())?;
    let nv = g.n_v;
    let ng = GridSpec::with_parts(
        g.d,
        g.n,
        2 * nv,
        g.half,
        2.0 * g.height,
        g.bc,
        g.bottom,
        g.bottom,
    )?;
    let mut values = Vec::with_capacity(ng.cells());
    values.extend_from_slice(m.values());
    for s in 0..nv {
        values.extend_from_slice(m.slice(nv - 1 - s));
    }
    let nm = Magnetisation::new(ng, values, m.mode())?;
    let mut nh = StrayField::zeros(ng);
    for k in 0..nv {
        let [a, b] = h.level(k);
        let [x, y] = nh.level_mut(k);
        x.copy_from_slice(a);
        y.copy_from_slice(b);
    }
    for s in 1..=nv {
        let [a, b] = h.level(nv - s);
        let [x, y] = nh.level_mut(nv + s);
        for (t, v) in x.iter_mut().zip(a) {
            *t = -v;
        }
        for (t, v) in y.iter_mut().zip(b) {
            *t = -v;
        }
    }
    Ok((nm, nh))
}

/// The rescaled pair `m_λ(x) = m(λ^{2/3}x', λx_z)`,
/// `h_λ = λ^{1/3} h(λ^{2/3}x', λx_z)` on `Q_{λ^{-2/3}L, λ^{-1}T}`.
///
/// Cell counts are kept and only the geometry is relabelled, so the
/// energy identity `E(m_λ, h_λ) = λ^{-(2d+1)/3} E(m, h)` holds exactly.
pub fn anisotropic_rescale(
    m: &Magnetisation,
    h: &StrayField,
    lambda: f64,
) -> Result<(Magnetisation, StrayField)> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(CoreError::InvalidScale(lambda));
    }
    let g = *m.grid();
    g.ensure_same(h.grid())?;
    let s = lambda.powf(-2.0 / 3.0);
    let mut half = g.half;
    for a in 0..g.d {
        half[a] *= s;
    }
    let ng = GridSpec::with_parts(
        g.d,
        g.n,
        g.n_v,
        half,
        g.height / lambda,
        g.bc,
        g.bottom,
        g.top,
    )?;
    let nh = h.scaled(lambda.cbrt()).relabel(ng);
    Ok((m.clone().relabel(ng), nh))
}
