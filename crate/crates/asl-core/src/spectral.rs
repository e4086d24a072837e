//! Periodic grids, real scalar fields, and the Fourier-side operators:
//! fractional Laplacian, Hilbert transform, spectral derivatives and the
//! active-scalar velocity laws.
//!
//! The domain is `[−L, L)` per axis (period 2L), so physical wavenumbers
//! are `κ = (π/L)·k` with integer mode index `k ∈ [−n/2, n/2)`.

use crate::error::{CoreError, Result};
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};
use serde::Serialize;
use std::sync::Arc;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicGrid {
    /// 1 or 2 spatial dimensions.
    pub dim: usize,
    /// Points per axis, a power of two ≥ 16.
    pub n: usize,
    /// Half period L; the domain is [−L, L) per axis.
    pub half_period: f64,
}

impl PeriodicGrid {
    pub fn new(dim: usize, n: usize, half_period: f64) -> Result<Self> {
        if dim != 1 && dim != 2 {
            return Err(CoreError::Dimension(format!("dim must be 1 or 2, got {dim}")));
        }
        if n < 16 || !n.is_power_of_two() {
            return Err(CoreError::Precondition(format!(
                "n must be a power of two ≥ 16, got {n}"
            )));
        }
        if !(half_period > 0.0) {
            return Err(CoreError::Precondition(format!(
                "half period must be positive, got {half_period}"
            )));
        }
        Ok(PeriodicGrid { dim, n, half_period })
    }

    pub fn spacing(&self) -> f64 {
        2.0 * self.half_period / self.n as f64
    }

    pub fn len(&self) -> usize {
        self.n.pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Coordinate of index i along one axis.
    pub fn coord(&self, i: usize) -> f64 {
        -self.half_period + i as f64 * self.spacing()
    }

    /// Signed mode index for array position i.
    pub fn mode_index(&self, i: usize) -> i64 {
        if i <= self.n / 2 {
            i as i64
        } else {
            i as i64 - self.n as i64
        }
    }

    /// Physical wavenumber (π/L scaling) for array position i.
    pub fn wavenumber(&self, i: usize) -> f64 {
        std::f64::consts::PI / self.half_period * self.mode_index(i) as f64
    }

    /// Largest retained mode index under the 2/3 rule.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.n as i64) / 3
    }
}

/// Real scalar samples on a periodic grid (row-major in 2D: index
/// `iy·n + ix`). The spectral representation is computed on demand by a
/// [`SpectralEngine`]; round-trip consistency is a tested invariant.
#[derive(Debug, Clone, Serialize)]
pub struct Field {
    pub grid: PeriodicGrid,
    pub values: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: PeriodicGrid) -> Self {
        Field { values: vec![0.0; grid.len()], grid }
    }

    pub fn from_fn_1d(grid: PeriodicGrid, f: impl Fn(f64) -> f64) -> Result<Self> {
        if grid.dim != 1 {
            return Err(CoreError::Dimension("from_fn_1d needs a 1D grid".into()));
        }
        let values = (0..grid.n).map(|i| f(grid.coord(i))).collect();
        Ok(Field { grid, values })
    }

    pub fn from_fn_2d(grid: PeriodicGrid, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if grid.dim != 2 {
            return Err(CoreError::Dimension("from_fn_2d needs a 2D grid".into()));
        }
        let n = grid.n;
        let mut values = Vec::with_capacity(grid.len());
        for iy in 0..n {
            let y = grid.coord(iy);
            for ix in 0..n {
                values.push(f(grid.coord(ix), y));
            }
        }
        Ok(Field { grid, values })
    }

    pub fn assert_finite(&self, t: f64) -> Result<()> {
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(CoreError::SolverDiverged { t });
        }
        Ok(())
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn linf(&self) -> f64 {
        self.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()))
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Grid Lp norm (rectangle rule, exact for trigonometric polynomials
    /// in L²).
    pub fn lp_norm(&self, p: f64) -> f64 {
        let dv = self.grid.spacing().powi(self.grid.dim as i32);
        if p.is_infinite() {
            return self.linf();
        }
        (self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>() * dv).powf(1.0 / p)
    }

    /// |θ(−x) − s·θ(x)| residual with s = +1 (even) or −1 (odd), 1D.
    pub fn parity_residual(&self, sign: f64) -> f64 {
        let n = self.grid.n;
        let mut worst = 0.0_f64;
        for i in 0..n {
            let j = (n - i) % n;
            let r = (self.values[j] - sign * self.values[i]).abs();
            worst = worst.max(r);
        }
        worst
    }
}

/// The active-scalar velocity laws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum VelocityLaw {
    /// u = θ (1D).
    Burgers,
    /// u = Hθ (1D).
    Ccf,
    /// u = ∇⊥(−Δ)^(−1/2) θ with ∇⊥ = (∂₂, −∂₁) (2D).
    Sqg,
    /// u = ∇⊥(−Δ)^(−β) θ (2D), β ∈ [1/2, 1].
    BetaSqg(f64),
}

impl VelocityLaw {
    pub fn dim(&self) -> usize {
        match self {
            VelocityLaw::Burgers | VelocityLaw::Ccf => 1,
            VelocityLaw::Sqg | VelocityLaw::BetaSqg(_) => 2,
        }
    }
}

pub enum Velocity {
    Scalar(Field),
    Vector([Field; 2]),
}

impl Velocity {
    pub fn max_speed(&self) -> f64 {
        match self {
            Velocity::Scalar(u) => u.linf(),
            Velocity::Vector([u, v]) => u
                .values
                .iter()
                .zip(&v.values)
                .fold(0.0_f64, |a, (x, y)| a.max((x * x + y * y).sqrt())),
        }
    }
}

/// FFT plans and scratch for one grid size.
pub struct SpectralEngine {
    grid: PeriodicGrid,
    fwd: Arc<dyn Fft<f64>>,
    inv: Arc<dyn Fft<f64>>,
}

impl SpectralEngine {
    pub fn new(grid: PeriodicGrid) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = planner.plan_fft_forward(grid.n);
        let inv = planner.plan_fft_inverse(grid.n);
        SpectralEngine { grid, fwd, inv }
    }

    pub fn grid(&self) -> &PeriodicGrid {
        &self.grid
    }

    /// Forward transform (unnormalized rustfft convention; normalization
    /// by 1/n per axis happens on the inverse).
    pub fn to_spectrum(&self, f: &Field) -> Vec<Complex<f64>> {
        let n = self.grid.n;
        let mut buf: Vec<Complex<f64>> =
            f.values.iter().map(|&v| Complex::new(v, 0.0)).collect();
        match self.grid.dim {
            1 => self.fwd.process(&mut buf),
            2 => {
                for row in buf.chunks_exact_mut(n) {
                    self.fwd.process(row);
                }
                let mut col = vec![Complex::new(0.0, 0.0); n];
                for ix in 0..n {
                    for iy in 0..n {
                        col[iy] = buf[iy * n + ix];
                    }
                    self.fwd.process(&mut col);
                    for iy in 0..n {
                        buf[iy * n + ix] = col[iy];
                    }
                }
            }
            _ => unreachable!(),
        }
        buf
    }

    /// Inverse transform, taking the real part.
    pub fn from_spectrum(&self, mut spec: Vec<Complex<f64>>) -> Field {
        let n = self.grid.n;
        match self.grid.dim {
            1 => self.inv.process(&mut spec),
            2 => {
                let mut col = vec![Complex::new(0.0, 0.0); n];
                for ix in 0..n {
                    for iy in 0..n {
                        col[iy] = spec[iy * n + ix];
                    }
                    self.inv.process(&mut col);
                    for iy in 0..n {
                        spec[iy * n + ix] = col[iy];
                    }
                }
                for row in spec.chunks_exact_mut(n) {
                    self.inv.process(row);
                }
            }
            _ => unreachable!(),
        }
        let norm = 1.0 / self.grid.len() as f64;
        Field {
            grid: self.grid,
            values: spec.iter().map(|c| c.re * norm).collect(),
        }
    }

    /// Apply a Fourier multiplier given as a function of the physical
    /// wavenumber vector (κ₁, κ₂); κ₂ = 0 in 1D.
    pub fn apply_multiplier(
        &self,
        f: &Field,
        m: impl Fn(f64, f64) -> Complex<f64>,
    ) -> Field {
        let mut spec = self.to_spectrum(f);
        self.multiply_in_place(&mut spec, m);
        self.from_spectrum(spec)
    }

    pub fn multiply_in_place(
        &self,
        spec: &mut [Complex<f64>],
        m: impl Fn(f64, f64) -> Complex<f64>,
    ) {
        let n = self.grid.n;
        match self.grid.dim {
            1 => {
                for (i, c) in spec.iter_mut().enumerate() {
                    *c *= m(self.grid.wavenumber(i), 0.0);
                }
            }
            2 => {
                for iy in 0..n {
                    let ky = self.grid.wavenumber(iy);
                    for ix in 0..n {
                        spec[iy * n + ix] *= m(self.grid.wavenumber(ix), ky);
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    /// Zero all modes with any axis index above the 2/3 cutoff.
    pub fn dealias_in_place(&self, spec: &mut [Complex<f64>]) {
        let n = self.grid.n;
        let cut = self.grid.dealias_cutoff();
        match self.grid.dim {
            1 => {
                for (i, c) in spec.iter_mut().enumerate() {
                    if self.grid.mode_index(i).abs() > cut {
                        *c = Complex::new(0.0, 0.0);
                    }
                }
            }
            2 => {
                for iy in 0..n {
                    let my = self.grid.mode_index(iy).abs();
                    for ix in 0..n {
                        if my > cut || self.grid.mode_index(ix).abs() > cut {
                            spec[iy * n + ix] = Complex::new(0.0, 0.0);
                        }
                    }
                }
            }
            _ => unreachable!(),
        }
    }

    /// `(−Δ)^α`: multiplier `|κ|^{2α}`, zero mode mapped to 0 (so the
    /// α = 0 case is the identity on mean-free fields).
    pub fn fractional_laplacian(&self, f: &Field, alpha: f64) -> Result<Field> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(CoreError::Domain(format!("α must lie in [0,1], got {alpha}")));
        }
        Ok(self.apply_multiplier(f, |kx, ky| {
            let k2 = kx * kx + ky * ky;
            if k2 == 0.0 {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(k2.powf(alpha), 0.0)
            }
        }))
    }

    /// Periodic Hilbert transform: multiplier −i·sgn(κ), zero mode and
    /// Nyquist mapped to 0.
    pub fn hilbert_transform(&self, f: &Field) -> Result<Field> {
        if self.grid.dim != 1 {
            return Err(CoreError::Dimension("Hilbert transform is 1D".into()));
        }
        let nyq = (self.grid.n / 2) as i64;
        let mut spec = self.to_spectrum(f);
        for (i, c) in spec.iter_mut().enumerate() {
            let k = self.grid.mode_index(i);
            *c *= if k == 0 || k == nyq {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(0.0, -(k.signum() as f64))
            };
        }
        Ok(self.from_spectrum(spec))
    }

    /// Spectral derivative along an axis (0 = x, 1 = y); Nyquist zeroed.
    pub fn derivative(&self, f: &Field, axis: usize) -> Field {
        let nyq = (self.grid.n / 2) as i64;
        let grid = self.grid;
        self.apply_multiplier(f, move |kx, ky| {
            let (k, idx) = if axis == 0 {
                (kx, (kx * grid.half_period / std::f64::consts::PI).round() as i64)
            } else {
                (ky, (ky * grid.half_period / std::f64::consts::PI).round() as i64)
            };
            if idx.abs() == nyq {
                Complex::new(0.0, 0.0)
            } else {
                Complex::new(0.0, k)
            }
        })
    }

    pub fn grad_max(&self, f: &Field) -> f64 {
        match self.grid.dim {
            1 => self.derivative(f, 0).linf(),
            _ => {
                let gx = self.derivative(f, 0);
                let gy = self.derivative(f, 1);
                gx.values
                    .iter()
                    .zip(&gy.values)
                    .fold(0.0_f64, |a, (x, y)| a.max((x * x + y * y).sqrt()))
            }
        }
    }

    /// Velocity from the active-scalar law; zero mode always 0, and the
    /// 2D laws are discretely divergence free.
    pub fn velocity(&self, theta: &Field, law: VelocityLaw) -> Result<Velocity> {
        if law.dim() != self.grid.dim {
            return Err(CoreError::Dimension(format!(
                "{law:?} needs dim {} but grid is {}D",
                law.dim(),
                self.grid.dim
            )));
        }
        match law {
            VelocityLaw::Burgers => Ok(Velocity::Scalar(theta.clone())),
            VelocityLaw::Ccf => Ok(Velocity::Scalar(self.hilbert_transform(theta)?)),
            VelocityLaw::Sqg => self.velocity(theta, VelocityLaw::BetaSqg(0.5)),
            VelocityLaw::BetaSqg(beta) => {
                if !(0.5..=1.0).contains(&beta) {
                    return Err(CoreError::Domain(format!(
                        "β must lie in [1/2, 1], got {beta}"
                    )));
                }
                let spec = self.to_spectrum(theta);
                let n = self.grid.n;
                let mut sx = spec.clone();
                let mut sy = spec;
                for iy in 0..n {
                    let ky = self.grid.wavenumber(iy);
                    for ix in 0..n {
                        let kx = self.grid.wavenumber(ix);
                        let k2 = kx * kx + ky * ky;
                        let idx = iy * n + ix;
                        if k2 == 0.0 {
                            sx[idx] = Complex::new(0.0, 0.0);
                            sy[idx] = Complex::new(0.0, 0.0);
                        } else {
                            let w = k2.powf(-beta);
                            // ∇⊥ψ = (∂₂ψ, −∂₁ψ)
                            sx[idx] *= Complex::new(0.0, ky * w);
                            sy[idx] *= Complex::new(0.0, -kx * w);
                        }
                    }
                }
                Ok(Velocity::Vector([self.from_spectrum(sx), self.from_spectrum(sy)]))
            }
        }
    }

    /// Spectral divergence sup-norm of a 2D velocity field.
    pub fn divergence_max(&self, v: &Velocity) -> f64 {
        match v {
            Velocity::Scalar(_) => 0.0,
            Velocity::Vector([u, w]) => {
                let du = self.derivative(u, 0);
                let dw = self.derivative(w, 1);
                du.values
                    .iter()
                    .zip(&dw.values)
                    .fold(0.0_f64, |a, (x, y)| a.max((x + y).abs()))
            }
        }
    }

    /// Discrete H^s seminorm (Σ |κ|^{2s} |θ̂|²)^{1/2} with Plancherel
    /// normalization.
    pub fn hs_seminorm(&self, f: &Field, s: f64) -> f64 {
        let spec = self.to_spectrum(f);
        let n = self.grid.n;
        let norm = self.grid.spacing().powi(self.grid.dim as i32) / self.grid.len() as f64;
        let mut acc = 0.0;
        match self.grid.dim {
            1 => {
                for (i, c) in spec.iter().enumerate() {
                    let k = self.grid.wavenumber(i).abs();
                    if k > 0.0 {
                        acc += k.powf(2.0 * s) * c.norm_sqr();
                    }
                }
            }
            _ => {
                for iy in 0..n {
                    let ky = self.grid.wavenumber(iy);
                    for ix in 0..n {
                        let kx = self.grid.wavenumber(ix);
                        let k2 = kx * kx + ky * ky;
                        if k2 > 0.0 {
                            acc += k2.powf(s) * spec[iy * n + ix].norm_sqr();
                        }
                    }
                }
            }
        }
        (acc * norm).sqrt()
    }

    /// Fraction of spectral energy in the top third of retained modes
    /// (the under-resolution indicator).
    pub fn tail_energy_fraction(&self, f: &Field) -> f64 {
        let spec = self.to_spectrum(f);
        let n = self.grid.n;
        let cut = self.grid.dealias_cutoff();
        let tail_from = (2 * cut) / 3;
        let mut total = 0.0;
        let mut tail = 0.0;
        let mut add = |k: i64, e: f64| {
            if k != 0 && k.abs() <= cut {
                total += e;
                if k.abs() > tail_from {
                    tail += e;
                }
            }
        };
        match self.grid.dim {
            1 => {
                for (i, c) in spec.iter().enumerate() {
                    add(self.grid.mode_index(i), c.norm_sqr());
                }
            }
            _ => {
                for iy in 0..n {
                    let my = self.grid.mode_index(iy);
                    for ix in 0..n {
                        let mx = self.grid.mode_index(ix);
                        let k = mx.abs().max(my.abs());
                        add(k, spec[iy * n + ix].norm_sqr());
                    }
                }
            }
        }
        if total == 0.0 {
            0.0
        } else {
            tail / total
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid1(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(1, n, std::f64::consts::PI).unwrap()
    }

    #[test]
    fn round_trip_identity() {
        let g = grid1(128);
        let e = SpectralEngine::new(g);
        let f = Field::from_fn_1d(g, |x| (3.0 * x).sin() + 0.3 * (7.0 * x).cos() + 0.11).unwrap();
        let back = e.from_spectrum(e.to_spectrum(&f));
        for (a, b) in f.values.iter().zip(&back.values) {
            assert!((a - b).abs() < 1e-12);
        }

        let g2 = PeriodicGrid::new(2, 32, 1.5).unwrap();
        let e2 = SpectralEngine::new(g2);
        let f2 = Field::from_fn_2d(g2, |x, y| {
            (std::f64::consts::PI * x / 1.5).sin() * (2.0 * std::f64::consts::PI * y / 1.5).cos()
        })
        .unwrap();
        let back = e2.from_spectrum(e2.to_spectrum(&f2));
        for (a, b) in f2.values.iter().zip(&back.values) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn fractional_laplacian_eigenfunctions() {
        let g = grid1(256);
        let e = SpectralEngine::new(g);
        for k in [1.0, 2.0, 5.0] {
            let f = Field::from_fn_1d(g, |x| (k * x).sin()).unwrap();
            let out = e.fractional_laplacian(&f, 0.5).unwrap();
            for (o, v) in out.values.iter().zip(&f.values) {
                assert!((o - k * v).abs() < 1e-12 * k, "k={k}");
            }
        }
    }

    #[test]
    fn fractional_laplacian_zero_mode_conventions() {
        let g = grid1(64);
        let e = SpectralEngine::new(g);
        let c = Field::from_fn_1d(g, |_| 4.2).unwrap();
        let out = e.fractional_laplacian(&c, 0.5).unwrap();
        assert!(out.linf() < 1e-13, "constant must map to 0 for α > 0");

        // α = 0 is the identity on mean-free fields
        let f = Field::from_fn_1d(g, |x| (2.0 * x).sin()).unwrap();
        let out = e.fractional_laplacian(&f, 0.0).unwrap();
        for (o, v) in out.values.iter().zip(&f.values) {
            assert!((o - v).abs() < 1e-12);
        }
    }

    #[test]
    fn hilbert_transform_rotates_modes() {
        let g = grid1(128);
        let e = SpectralEngine::new(g);
        let cosx = Field::from_fn_1d(g, |x| x.cos()).unwrap();
        let sinx = Field::from_fn_1d(g, |x| x.sin()).unwrap();
        let h = e.hilbert_transform(&cosx).unwrap();
        for (a, b) in h.values.iter().zip(&sinx.values) {
            assert!((a - b).abs() < 1e-12, "H cos = sin");
        }
        let h = e.hilbert_transform(&sinx).unwrap();
        for (a, b) in h.values.iter().zip(&cosx.values) {
            assert!((a + b).abs() < 1e-12, "H sin = -cos");
        }
        let c = Field::from_fn_1d(g, |_| 2.0).unwrap();
        assert!(e.hilbert_transform(&c).unwrap().linf() < 1e-13);
        // H(Hf) = −f on mean-free band-limited fields
        let f = Field::from_fn_1d(g, |x| (3.0 * x).sin() + 0.5 * (8.0 * x).cos()).unwrap();
        let hh = e.hilbert_transform(&e.hilbert_transform(&f).unwrap()).unwrap();
        for (a, b) in hh.values.iter().zip(&f.values) {
            assert!((a + b).abs() < 1e-10);
        }
    }

    #[test]
    fn hilbert_needs_one_dimension() {
        let g2 = PeriodicGrid::new(2, 32, 1.0).unwrap();
        let e2 = SpectralEngine::new(g2);
        let f2 = Field::zeros(g2);
        assert!(e2.hilbert_transform(&f2).is_err());
    }

    #[test]
    fn sqg_velocity_single_mode_orientation() {
        // θ = cos x₁, ψ = (−Δ)^(−1/2)θ = cos x₁,
        // u = (∂₂ψ, −∂₁ψ) = (0, sin x₁)
        let g = PeriodicGrid::new(2, 64, std::f64::consts::PI).unwrap();
        let e = SpectralEngine::new(g);
        let theta = Field::from_fn_2d(g, |x, _| x.cos()).unwrap();
        let v = e.velocity(&theta, VelocityLaw::Sqg).unwrap();
        let Velocity::Vector([u1, u2]) = &v else { panic!("sqg velocity is 2D") };
        assert!(u1.linf() < 1e-12);
        let expect = Field::from_fn_2d(g, |x, _| x.sin()).unwrap();
        for (a, b) in u2.values.iter().zip(&expect.values) {
            assert!((a - b).abs() < 1e-12);
        }
        assert!(e.divergence_max(&v) < 1e-11);
    }

    #[test]
    fn beta_half_coincides_with_sqg() {
        let g = PeriodicGrid::new(2, 32, 2.0).unwrap();
        let e = SpectralEngine::new(g);
        let theta = Field::from_fn_2d(g, |x, y| {
            (std::f64::consts::PI * x / 2.0).sin() + (std::f64::consts::PI * y).cos()
        })
        .unwrap();
        let a = e.velocity(&theta, VelocityLaw::Sqg).unwrap();
        let b = e.velocity(&theta, VelocityLaw::BetaSqg(0.5)).unwrap();
        let (Velocity::Vector([a1, a2]), Velocity::Vector([b1, b2])) = (&a, &b) else {
            panic!()
        };
        for (x, y) in a1.values.iter().zip(&b1.values) {
            assert!((x - y).abs() < 1e-12);
        }
        for (x, y) in a2.values.iter().zip(&b2.values) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn burgers_velocity_is_identity() {
        let g = grid1(64);
        let e = SpectralEngine::new(g);
        let theta = Field::from_fn_1d(g, |x| x.sin() + 0.2).unwrap();
        let Velocity::Scalar(u) = e.velocity(&theta, VelocityLaw::Burgers).unwrap() else {
            panic!()
        };
        assert_eq!(u.values, theta.values);
    }

    #[test]
    fn derivative_and_seminorm() {
        let g = grid1(128);
        let e = SpectralEngine::new(g);
        let f = Field::from_fn_1d(g, |x| (4.0 * x).sin()).unwrap();
        let d = e.derivative(&f, 0);
        let expect = Field::from_fn_1d(g, |x| 4.0 * (4.0 * x).cos()).unwrap();
        for (a, b) in d.values.iter().zip(&expect.values) {
            assert!((a - b).abs() < 1e-11);
        }
        // ‖sin(4x)‖_{H^1} seminorm = 4·‖sin‖_{L²} = 4·√π
        let h1 = e.hs_seminorm(&f, 1.0);
        let expect = 4.0 * std::f64::consts::PI.sqrt();
        assert!((h1 - expect).abs() < 1e-10 * expect, "{h1} vs {expect}");
    }

    #[test]
    fn parity_residual_detects_oddness() {
        let g = grid1(64);
        let odd = Field::from_fn_1d(g, |x| x.sin()).unwrap();
        assert!(odd.parity_residual(-1.0) < 1e-14);
        let even = Field::from_fn_1d(g, |x| x.cos()).unwrap();
        assert!(even.parity_residual(1.0) < 1e-14);
        assert!(even.parity_residual(-1.0) > 0.5);
    }
}
