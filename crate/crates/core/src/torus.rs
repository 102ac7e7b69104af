//! Quantization on the torus: Fourier basis change, the quantum tartan and
//! Husimi portraits over shifted Gaussian coherent states.

use std::f64::consts::PI;
use std::sync::Arc;

use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::invariant::Superoperator;
use crate::io::HusimiGrid;
use crate::linalg::{self, c, CMat, CVec, C64};
use crate::qstate::{trace_distance, DensityMatrix, Ket};

/// Largest `N` for which the tartan superoperator is diagonalized densely.
pub const DENSE_TARTAN_DIM: usize = 27;
/// Traces below this drop a map from the normalized tartan average.
pub const TARTAN_TRACE_FLOOR: f64 = 1e-14;

/// `W_lj = e^{−2πi lj/N} / √N`; column `l` is the momentum eigenstate `|l⟩_p`.
pub fn dft_matrix(n: usize) -> CMat {
    let s = 1.0 / (n as f64).sqrt();
    CMat::from_fn(n, n, |l, j| C64::from_polar(s, -2.0 * PI * ((l * j) % n) as f64 / n as f64))
}

/// Fourier transforms along the rows or columns of a matrix, scaled to be
/// unitary.
#[derive(Clone)]
struct Fourier {
    n: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Fourier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Fourier({})", self.n)
    }
}

impl Fourier {
    fn new(n: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self { n, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    fn columns(&self, m: &mut CMat, inverse: bool) {
        let plan = if inverse { &self.inverse } else { &self.forward };
        let s = c(1.0 / (self.n as f64).sqrt(), 0.0);
        for mut col in m.column_iter_mut() {
            let buf = col.as_mut_slice();
            plan.process(buf);
            buf.iter_mut().for_each(|z| *z *= s);
        }
    }

    /// `W·m`.
    fn left(&self, m: &CMat) -> CMat {
        let mut out = m.clone();
        self.columns(&mut out, false);
        out
    }

    /// `W†·m`.
    fn left_adjoint(&self, m: &CMat) -> CMat {
        let mut out = m.clone();
        self.columns(&mut out, true);
        out
    }

    /// `m·W`, using `(mW)ᵀ = W mᵀ`.
    fn right(&self, m: &CMat) -> CMat {
        self.left(&m.transpose()).transpose()
    }

    /// `m·W†`, using `(mW†)ᵀ = W† mᵀ`.
    fn right_adjoint(&self, m: &CMat) -> CMat {
        self.left_adjoint(&m.transpose()).transpose()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TartanMode {
    /// Leading eigenvector of `(1/4) Σ AᵢρAᵢ†`, normalized afterwards.
    LinearSpectral,
    /// Fixed point of `(1/4) Σ Gᵢ(ρ)/tr Gᵢ(ρ)`.
    NonlinearNormalized,
}

/// Contraction operators of the quantum tartan on `N = 3L` levels.
#[derive(Clone, Debug)]
pub struct TartanChannel {
    l: usize,
    fourier: Fourier,
}

/// Position-basis contraction onto the first (`upper = false`) or last third.
pub fn position_contraction(l: usize, upper: bool) -> CMat {
    let n = 3 * l;
    let offset = if upper { 2 * l } else { 0 };
    let mut a = CMat::zeros(n, n);
    for i in 0..l {
        for m in 0..3 {
            a[(offset + i, 3 * i + m)] = linalg::ONE;
        }
    }
    a
}

impl TartanChannel {
    pub fn new(l: usize) -> Result<Self> {
        if l == 0 {
            return Err(Error::Invalid("tartan needs L ≥ 1".into()));
        }
        Ok(Self { l, fourier: Fourier::new(3 * l) })
    }

    /// Tartan on `n` levels; `n` must be a positive multiple of 3.
    pub fn with_dim(n: usize) -> Result<Self> {
        if n == 0 || !n.is_multiple_of(3) {
            return Err(Error::Invalid(format!("tartan dimension {n} is not a positive multiple of 3")));
        }
        Self::new(n / 3)
    }

    pub fn dim(&self) -> usize {
        3 * self.l
    }

    pub fn l(&self) -> usize {
        self.l
    }

    /// `[A₁, A₂, A₃, A₄]`, with `A₃ = WÃ₁W†` and `A₄ = WÃ₂W†`.
    pub fn operators(&self) -> [CMat; 4] {
        let a1 = position_contraction(self.l, false);
        let a2 = position_contraction(self.l, true);
        let w = dft_matrix(self.dim());
        let a3 = &w * &a1 * w.adjoint();
        let a4 = &w * &a2 * w.adjoint();
        [a1, a2, a3, a4]
    }

    /// `ÃρÃ†` shares its `L × L` block of 3×3 sums between the two position
    /// contractions; returns that block.
    fn block_sums(&self, rho: &CMat) -> CMat {
        let l = self.l;
        CMat::from_fn(l, l, |i, k| {
            let mut s = linalg::ZERO;
            for m in 0..3 {
                for n in 0..3 {
                    s += rho[(3 * i + m, 3 * k + n)];
                }
            }
            s
        })
    }

    fn place(&self, block: &CMat, upper: bool) -> CMat {
        let n = self.dim();
        let off = if upper { 2 * self.l } else { 0 };
        let mut out = CMat::zeros(n, n);
        out.view_mut((off, off), (self.l, self.l)).copy_from(block);
        out
    }

    /// `[G₁(ρ), G₂(ρ), G₃(ρ), G₄(ρ)]` without normalization.
    pub fn images(&self, rho: &CMat) -> [CMat; 4] {
        let sq = self.block_sums(rho);
        let sigma = self.fourier.right(&self.fourier.left_adjoint(rho));
        let sp = self.block_sums(&sigma);
        let back = |m: CMat| self.fourier.right_adjoint(&self.fourier.left(&m));
        [self.place(&sq, false), self.place(&sq, true), back(self.place(&sp, false)), back(self.place(&sp, true))]
    }

    /// `(1/4) Σ AᵢρAᵢ†`.
    pub fn apply_linear(&self, rho: &CMat) -> CMat {
        let [g1, g2, g3, g4] = self.images(rho);
        (g1 + g2 + g3 + g4) * c(0.25, 0.0)
    }

    /// `(1/4) Σ Gᵢ(ρ)/tr Gᵢ(ρ)`; maps whose trace vanishes are dropped and
    /// the weights of the others renormalized.
    pub fn apply_nonlinear(&self, rho: &CMat) -> Result<CMat> {
        let mut out = CMat::zeros(self.dim(), self.dim());
        let mut kept = 0usize;
        for g in self.images(rho) {
            let t = linalg::trace(&g).re;
            if t > TARTAN_TRACE_FLOOR {
                out += g / c(t, 0.0);
                kept += 1;
            }
        }
        if kept == 0 {
            return Err(Error::Vanishing(0.0));
        }
        Ok(out / c(kept as f64, 0.0))
    }

    pub fn superoperator(&self) -> Superoperator {
        Superoperator::from_fn(self.dim(), |m| self.apply_linear(m))
    }
}

#[derive(Clone, Debug)]
pub struct TartanOptions {
    pub tol: f64,
    pub max_steps: usize,
    /// Weight of the new iterate in the nonlinear mode.
    pub damping: f64,
    /// Use the dense eigensolver when `N ≤` this.
    pub dense_dim: usize,
}

impl Default for TartanOptions {
    fn default() -> Self {
        Self { tol: 1e-12, max_steps: 10_000, damping: 0.5, dense_dim: DENSE_TARTAN_DIM }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TartanInvariant {
    pub state: DensityMatrix,
    pub mode: TartanMode,
    /// "dense-spectral" or "power-iteration".
    pub method: &'static str,
    pub steps: usize,
    /// Trace distance between the state and its normalized image.
    pub residual: f64,
    /// Trace of the linear image of the state (the leading eigenvalue in
    /// linear mode).
    pub growth: f64,
}

/// Hermitian part, negative eigenvalues clipped, unit trace.
fn psd_projection(m: &CMat) -> Result<DensityMatrix> {
    let (vals, vecs) = linalg::eigh(&linalg::hermitian_part(m));
    let clipped = CVec::from_iterator(vals.len(), vals.iter().map(|&v| c(v.max(0.0), 0.0)));
    DensityMatrix::from_unnormalized(&vecs * CMat::from_diagonal(&clipped) * vecs.adjoint())
}

fn normalized_image(ch: &TartanChannel, mode: TartanMode, rho: &CMat) -> Result<CMat> {
    match mode {
        TartanMode::LinearSpectral => {
            let m = ch.apply_linear(rho);
            let t = linalg::trace(&m).re;
            if !(t > TARTAN_TRACE_FLOOR) {
                return Err(Error::Vanishing(t));
            }
            Ok(m / c(t, 0.0))
        }
        TartanMode::NonlinearNormalized => ch.apply_nonlinear(rho),
    }
}

/// Invariant state of the tartan in the chosen mode.
pub fn tartan_invariant(ch: &TartanChannel, mode: TartanMode, opts: &TartanOptions) -> Result<TartanInvariant> {
    let n = ch.dim();
    let finish = |state: DensityMatrix, method, steps| -> Result<TartanInvariant> {
        let image = DensityMatrix::from_unnormalized(linalg::hermitian_part(&normalized_image(ch, mode, state.matrix())?))?;
        let residual = trace_distance(&image, &state)?;
        let growth = linalg::trace(&ch.apply_linear(state.matrix())).re;
        Ok(TartanInvariant { state, mode, method, steps, residual, growth })
    };
    if mode == TartanMode::LinearSpectral && n <= opts.dense_dim {
        let sup = ch.superoperator();
        let lead = sup.spectrum()[0];
        let shifted = sup.matrix() - linalg::identity(n * n) * lead;
        let kernel = linalg::null_space(&shifted, 1e-9);
        if let Some(v) = kernel.first() {
            // fix the arbitrary phase so the trace is real and positive
            let b = linalg::unvec(v, n);
            let t = linalg::trace(&b);
            if t.norm() > TARTAN_TRACE_FLOOR {
                return finish(psd_projection(&(b * (t.conj() / t.norm())))?, "dense-spectral", 0);
            }
        }
    }
    let mut rho = DensityMatrix::maximally_mixed(n).into_matrix();
    let eta = if mode == TartanMode::NonlinearNormalized { opts.damping } else { 1.0 };
    for step in 1..=opts.max_steps {
        let next = normalized_image(ch, mode, &rho)? * c(eta, 0.0) + &rho * c(1.0 - eta, 0.0);
        let next = linalg::hermitian_part(&next);
        let diff = crate::qstate::trace_norm(&(&next - &rho));
        rho = next;
        if diff < opts.tol {
            return finish(psd_projection(&rho)?, "power-iteration", step);
        }
    }
    let last = psd_projection(&rho)?;
    let r = finish(last, "power-iteration", opts.max_steps)?;
    Err(Error::NonConvergence { steps: opts.max_steps, residual: r.residual })
}

/// Reference state `⟨n|κ⟩ ∝ e^{−π(n − N/2)²/N − iπn}`, numerically normalized.
pub fn reference_state(n: usize) -> Ket {
    let half = n as f64 / 2.0;
    let amps = CVec::from_iterator(
        n,
        (0..n).map(|k| {
            let x = k as f64 - half;
            C64::from_polar((-PI * x * x / n as f64).exp(), -PI * k as f64)
        }),
    );
    let norm = amps.norm();
    Ket::new(amps / c(norm, 0.0)).expect("Gaussian has positive norm")
}

/// Position shift `X|j⟩ = |j+1 mod N⟩`.
pub fn shift_x(n: usize) -> CMat {
    CMat::from_fn(n, n, |i, j| if i == (j + 1) % n { linalg::ONE } else { linalg::ZERO })
}

/// Momentum shift `Y|l⟩_p = |l+1 mod N⟩_p`; diagonal in position,
/// `Y = diag(e^{−2πij/N})`.
pub fn shift_y(n: usize) -> CMat {
    CMat::from_diagonal(&CVec::from_iterator(n, (0..n).map(|j| C64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64))))
}

fn shift_exponent(n: usize, x: f64) -> usize {
    let s = (n as f64 * x - n as f64 / 2.0).round() as i64;
    s.rem_euclid(n as i64) as usize
}

/// `X^a κ` as a cyclic rotation of the reference amplitudes.
fn shifted_reference(kappa: &CVec, a: usize) -> CVec {
    let n = kappa.len();
    CVec::from_fn(n, |j, _| kappa[(j + n - a) % n])
}

/// `|q,p⟩ = Y^{Np − N/2} X^{Nq − N/2} |κ⟩` with rounded exponents.
pub fn coherent_torus(q: f64, p: f64, n: usize) -> Result<Ket> {
    if !(0.0..1.0).contains(&q) || !(0.0..1.0).contains(&p) {
        return Err(Error::Invalid(format!("(q, p) = ({q}, {p}) outside [0, 1)²")));
    }
    let kappa = reference_state(n);
    let v = shifted_reference(kappa.amplitudes(), shift_exponent(n, q));
    let b = shift_exponent(n, p);
    let amps = CVec::from_fn(n, |j, _| v[j] * C64::from_polar(1.0, -2.0 * PI * ((b * j) % n) as f64 / n as f64));
    Ket::new(amps)
}

/// `H(q, p) = ⟨q,p|ρ|q,p⟩ / 2π` at cell centres of an `m × m` grid; rows
/// run over `q`, columns over `p`.
///
/// For a fixed position shift the values over all momentum shifts are one
/// discrete Fourier transform of the diagonal sums of `ρ` weighted by the
/// shifted reference state.
pub fn husimi_torus(rho: &DensityMatrix, m: usize) -> Result<HusimiGrid> {
    let n = rho.dim();
    if m == 0 {
        return Err(Error::Invalid("empty Husimi grid".into()));
    }
    let mut grid = HusimiGrid {
        rows: m,
        cols: m,
        row_label: "q".into(),
        row_range: (0.0, 1.0),
        col_label: "p".into(),
        col_range: (0.0, 1.0),
        values: vec![],
        meta: serde_json::json!({ "dim": n, "resolution": m, "normalization": 1.0 / (2.0 * PI) }),
    };
    let kappa = reference_state(n);
    let inverse = FftPlanner::new().plan_fft_inverse(n);
    let r = rho.matrix();
    let col_shifts: Vec<usize> = (0..m).map(|k| shift_exponent(n, grid.col_centre(k))).collect();
    let rows: Vec<Vec<f64>> = (0..m)
        .into_par_iter()
        .map(|row| {
            let v = shifted_reference(kappa.amplitudes(), shift_exponent(n, grid.row_centre(row)));
            // c_d = Σ_{j−k ≡ d} conj(v_j) ρ_jk v_k, then H(b) = Σ_d c_d e^{2πi bd/N}
            let mut cd = vec![linalg::ZERO; n];
            for k in 0..n {
                for j in 0..n {
                    cd[(j + n - k) % n] += v[j].conj() * r[(j, k)] * v[k];
                }
            }
            inverse.process(&mut cd);
            col_shifts.iter().map(|&b| (cd[b].re / (2.0 * PI)).max(0.0)).collect()
        })
        .collect();
    grid.values = rows.into_iter().flatten().collect();
    Ok(grid)
}

/// Whether a cell centre lies in the open middle third.
fn in_middle_third(x: f64) -> bool {
    x > 1.0 / 3.0 && x < 2.0 / 3.0
}

/// Fraction of Husimi mass with `q` or `p` in the middle third, where the
/// classical tartan has no mass.
pub fn excluded_mass(grid: &HusimiGrid) -> f64 {
    let mut excluded = 0.0;
    let mut total = 0.0;
    for r in 0..grid.rows {
        let rq = in_middle_third(grid.row_centre(r));
        for k in 0..grid.cols {
            let h = grid.get(r, k);
            total += h;
            if rq || in_middle_third(grid.col_centre(k)) {
                excluded += h;
            }
        }
    }
    excluded / total
}

/// Position-basis diagonal of `ρ`.
pub fn position_profile(rho: &DensityMatrix) -> Vec<f64> {
    rho.matrix().diagonal().iter().map(|z| z.re).collect()
}

/// Level-`k` Cantor measure sampled on `n` cells: uniform on the cells whose
/// first `k` ternary digits avoid 1.
pub fn cantor_profile(n: usize, level: u32) -> Vec<f64> {
    let cells = 3usize.pow(level);
    let raw: Vec<f64> = (0..n)
        .map(|j| {
            let mut x = j * cells / n;
            for _ in 0..level {
                if x % 3 == 1 {
                    return 0.0;
                }
                x /= 3;
            }
            1.0
        })
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|x| x / s).collect()
}

/// Cantor level resolved at dimension `n`: `⌊log₃ n / 2⌋`, the scale of a
/// coherent-state width `1/√n`.
pub fn matched_cantor_level(n: usize) -> u32 {
    let mut level = 0;
    while 3usize.pow(2 * (level + 1)) <= n {
        level += 1;
    }
    level
}
