//! Separable spectral transforms diagonalising the facet Laplacian.
//!
//! Along a periodic axis the eigenvectors of the three-point Laplacian are
//! the discrete Fourier modes, with eigenvalues `(4/dx²) sin²(πq/n)`. Along
//! a Neumann axis they are the type-II cosine modes `cos(πq(i+½)/n)`, with
//! eigenvalues `(4/dx²) sin²(πq/(2n))`. The cosine transform is evaluated
//! with Makhoul's permutation, which needs a single complex FFT of the same
//! length; two real lines are packed into one complex transform wherever the
//! data are real.

use crate::fft::Fft;
use crate::{AxisBc, SliceGrid};
use num_complex::Complex64;
use std::f64::consts::PI;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Spectral transform along one axis.
#[derive(Debug, Clone)]
pub struct AxisTransform {
    n: usize,
    bc: AxisBc,
    fft: Fft,
    /// `exp(-iπq/(2n))`, used by the cosine transform.
    phase: Vec<Complex64>,
    eigen: Vec<f64>,
    weight: Vec<f64>,
}

impl AxisTransform {
    /// Plans the transform of `n` cells of width `dx`.
    pub fn new(n: usize, dx: f64, bc: AxisBc) -> Self {
        let nf = n as f64;
        let phase = (0..n)
            .map(|q| Complex64::from_polar(1.0, -PI * q as f64 / (2.0 * nf)))
            .collect();
        let eigen = (0..n)
            .map(|q| {
                let arg = match bc {
                    AxisBc::Periodic => PI * q as f64 / nf,
                    AxisBc::Neumann => PI * q as f64 / (2.0 * nf),
                };
                4.0 / (dx * dx) * arg.sin().powi(2)
            })
            .collect();
        let weight = (0..n)
            .map(|q| match bc {
                AxisBc::Periodic => 1.0 / nf,
                AxisBc::Neumann => {
                    if q == 0 {
                        1.0 / nf
                    } else {
                        2.0 / nf
                    }
                }
            })
            .collect();
        Self {
            n,
            bc,
            fft: Fft::new(n),
            phase,
            eigen,
            weight,
        }
    }

    /// Number of cells along the axis.
    pub fn len(&self) -> usize {
        self.n
    }

    /// Always false: axes have at least one cell.
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Boundary condition of the axis.
    pub fn bc(&self) -> AxisBc {
        self.bc
    }

    /// Eigenvalue of `-∂²` (three-point stencil) for mode `q`.
    pub fn eigenvalue(&self, q: usize) -> f64 {
        self.eigen[q]
    }

    /// Parseval weight of mode `q`: `Σ_i |x_i|² = Σ_q weight(q) |X_q|²`.
    pub fn weight(&self, q: usize) -> f64 {
        self.weight[q]
    }

    /// Transform coefficients of the unit vector at `cell`.
    pub fn basis(&self, cell: usize) -> Vec<Complex64> {
        let nf = self.n as f64;
        (0..self.n)
            .map(|q| match self.bc {
                AxisBc::Periodic => {
                    let k = ((q * cell) % self.n) as f64;
                    Complex64::from_polar(1.0, -2.0 * PI * k / nf)
                }
                AxisBc::Neumann => {
                    Complex64::new((PI * q as f64 * (cell as f64 + 0.5) / nf).cos(), 0.0)
                }
            })
            .collect()
    }

    /// In-place forward transform of a complex line.
    ///
    /// Periodic: `X_q = Σ_i x_i exp(-2πi iq/n)`. Neumann:
    /// `X_q = Σ_i x_i cos(πq(i+½)/n)`, applied to the real and imaginary
    /// parts independently.
    pub fn forward(&self, line: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        match self.bc {
            AxisBc::Periodic => self.fft.forward(line),
            AxisBc::Neumann => self.dct2(line, scratch),
        }
    }

    /// In-place inverse of [`AxisTransform::forward`].
    pub fn inverse(&self, line: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        match self.bc {
            AxisBc::Periodic => {
                self.fft.inverse_unscaled(line);
                let s = 1.0 / self.n as f64;
                for v in line.iter_mut() {
                    *v *= s;
                }
            }
            AxisBc::Neumann => self.idct2(line, scratch),
        }
    }

    fn dct2(&self, line: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let n = self.n;
        scratch.clear();
        scratch.resize(n, ZERO);
        for i in 0..n.div_ceil(2) {
            scratch[i] = line[2 * i];
        }
        for i in 0..n / 2 {
            scratch[n - 1 - i] = line[2 * i + 1];
        }
        self.fft.forward(scratch);
        for q in 0..n {
            let v = scratch[q];
            let w = scratch[(n - q) % n].conj();
            let va = (v + w) * 0.5;
            let vb = (v - w) * Complex64::new(0.0, -0.5);
            let t = self.phase[q];
            line[q] = Complex64::new((t * va).re, (t * vb).re);
        }
    }

    fn idct2(&self, line: &mut [Complex64], scratch: &mut Vec<Complex64>) {
        let n = self.n;
        scratch.clear();
        scratch.resize(n, ZERO);
        for q in 0..n {
            let mirrored = if q == 0 { ZERO } else { line[n - q] };
            let x = line[q] - Complex64::new(0.0, 1.0) * mirrored;
            scratch[q] = self.phase[q].conj() * x;
        }
        self.fft.inverse_unscaled(scratch);
        let s = 1.0 / n as f64;
        for i in 0..n.div_ceil(2) {
            line[2 * i] = scratch[i] * s;
        }
        for i in 0..n / 2 {
            line[2 * i + 1] = scratch[n - 1 - i] * s;
        }
    }
}

/// Two-dimensional separable transform of real slice data.
#[derive(Debug, Clone)]
pub struct SliceTransform {
    grid: SliceGrid,
    axes: [AxisTransform; 2],
}

impl SliceTransform {
    /// Plans the transform for `grid` with the given axis conditions.
    pub fn new(grid: SliceGrid, bc: [AxisBc; 2]) -> Self {
        let axes = [
            AxisTransform::new(grid.n[0], grid.dx[0], bc[0]),
            AxisTransform::new(grid.n[1], grid.dx[1], bc[1]),
        ];
        Self { grid, axes }
    }

    /// The per-axis transforms.
    pub fn axes(&self) -> &[AxisTransform; 2] {
        &self.axes
    }

    /// Forward transform of real cell data; coefficients use the cell layout.
    pub fn forward(&self, data: &[f64]) -> Vec<Complex64> {
        let [n0, n1] = self.grid.n;
        let mut out = vec![ZERO; n0 * n1];
        let mut line = vec![ZERO; n0];
        let mut scratch = Vec::with_capacity(n0.max(n1));
        let ax0 = &self.axes[0];
        let mut i1 = 0;
        while i1 < n1 {
            let pair = i1 + 1 < n1;
            for i0 in 0..n0 {
                let b = if pair { data[i0 + n0 * (i1 + 1)] } else { 0.0 };
                line[i0] = Complex64::new(data[i0 + n0 * i1], b);
            }
            ax0.forward(&mut line, &mut scratch);
            if !pair {
                out[n0 * i1..n0 * (i1 + 1)].copy_from_slice(&line);
            } else {
                unpack_pair(ax0.bc(), &line, &mut out, n0 * i1, n0 * (i1 + 1));
            }
            i1 += if pair { 2 } else { 1 };
        }
        if n1 > 1 {
            self.columns(&mut out, true);
        }
        out
    }

    /// Inverse transform; returns the real part of the reconstruction.
    pub fn inverse(&self, coeffs: &[Complex64]) -> Vec<f64> {
        let [n0, n1] = self.grid.n;
        let mut work = coeffs.to_vec();
        if n1 > 1 {
            self.columns(&mut work, false);
        }
        let mut out = vec![0.0; n0 * n1];
        let mut line = vec![ZERO; n0];
        let mut scratch = Vec::with_capacity(n0);
        let ax0 = &self.axes[0];
        let mut i1 = 0;
        while i1 < n1 {
            let pair = i1 + 1 < n1;
            for i0 in 0..n0 {
                let a = work[i0 + n0 * i1];
                line[i0] = if pair {
                    a + Complex64::new(0.0, 1.0) * work[i0 + n0 * (i1 + 1)]
                } else {
                    a
                };
            }
            ax0.inverse(&mut line, &mut scratch);
            for i0 in 0..n0 {
                out[i0 + n0 * i1] = line[i0].re;
                if pair {
                    out[i0 + n0 * (i1 + 1)] = line[i0].im;
                }
            }
            i1 += if pair { 2 } else { 1 };
        }
        out
    }

    /// Transforms all columns (axis 1) in place.
    ///
    /// After a Neumann axis-0 transform the intermediate data are real, so
    /// columns are processed in packed pairs; otherwise one complex column
    /// per transform.
    fn columns(&self, work: &mut [Complex64], forward: bool) {
        let [n0, n1] = self.grid.n;
        let ax1 = &self.axes[1];
        let real_columns = self.axes[0].bc() == AxisBc::Neumann;
        let mut col = vec![ZERO; n1];
        let mut scratch = Vec::with_capacity(n1);
        let mut q0 = 0;
        while q0 < n0 {
            let pair = real_columns && q0 + 1 < n0;
            for i1 in 0..n1 {
                col[i1] = if pair {
                    work[q0 + n0 * i1] + Complex64::new(0.0, 1.0) * work[q0 + 1 + n0 * i1]
                } else {
                    work[q0 + n0 * i1]
                };
            }
            if forward {
                ax1.forward(&mut col, &mut scratch);
            } else {
                ax1.inverse(&mut col, &mut scratch);
            }
            if pair && forward {
                let mut a = vec![ZERO; n1];
                let mut b = vec![ZERO; n1];
                unpack_pair_into(ax1.bc(), &col, &mut a, &mut b);
                for i1 in 0..n1 {
                    work[q0 + n0 * i1] = a[i1];
                    work[q0 + 1 + n0 * i1] = b[i1];
                }
            } else if pair {
                for i1 in 0..n1 {
                    work[q0 + n0 * i1] = Complex64::new(col[i1].re, 0.0);
                    work[q0 + 1 + n0 * i1] = Complex64::new(col[i1].im, 0.0);
                }
            } else {
                for i1 in 0..n1 {
                    work[q0 + n0 * i1] = col[i1];
                }
            }
            q0 += if pair { 2 } else { 1 };
        }
    }
}

/// Separates the transforms of two real lines packed as `a + i b`.
fn unpack_pair(bc: AxisBc, line: &[Complex64], out: &mut [Complex64], oa: usize, ob: usize) {
    let n = line.len();
    let (head, tail) = out.split_at_mut(ob);
    let a = &mut head[oa..oa + n];
    let b = &mut tail[..n];
    unpack_pair_into(bc, line, a, b);
}

fn unpack_pair_into(bc: AxisBc, line: &[Complex64], a: &mut [Complex64], b: &mut [Complex64]) {
    let n = line.len();
    match bc {
        AxisBc::Neumann => {
            for q in 0..n {
                a[q] = Complex64::new(line[q].re, 0.0);
                b[q] = Complex64::new(line[q].im, 0.0);
            }
        }
        AxisBc::Periodic => {
            for q in 0..n {
                let v = line[q];
                let w = line[(n - q) % n].conj();
                a[q] = (v + w) * 0.5;
                b[q] = (v - w) * Complex64::new(0.0, -0.5);
            }
        }
    }
}
