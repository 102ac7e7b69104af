//! Spin-j quantization of maps on the sphere.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io::HusimiGrid;
use crate::linalg::{self, c, exp_i_hermitian, CMat, CVec};
use crate::qstate::{DensityMatrix, Ket, PureState};
use crate::quantum::{HomogeneousQIFS, PureQIFS};

/// Spin quantum number stored as `2j`; basis `|j, m⟩` ordered `m = j, …, −j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Spin {
    two_j: usize,
}

impl Spin {
    pub fn from_twice(two_j: usize) -> Result<Self> {
        if two_j == 0 {
            return Err(Error::Invalid("spin needs N = 2j + 1 ≥ 2".into()));
        }
        Ok(Self { two_j })
    }

    /// Spin `j` with `2j` a positive integer.
    pub fn new(j: f64) -> Result<Self> {
        let t = 2.0 * j;
        if !(t >= 1.0) || (t - t.round()).abs() > 1e-12 {
            return Err(Error::Invalid(format!("j = {j} is not a positive half-integer")));
        }
        Self::from_twice(t.round() as usize)
    }

    /// Spin with Hilbert-space dimension `n = 2j + 1`.
    pub fn from_dim(n: usize) -> Result<Self> {
        Self::from_twice(n.saturating_sub(1))
    }

    pub fn j(self) -> f64 {
        self.two_j as f64 / 2.0
    }

    pub fn dim(self) -> usize {
        self.two_j + 1
    }

    /// `m` of basis index `k`.
    pub fn m(self, k: usize) -> f64 {
        self.j() - k as f64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug)]
pub struct AngularMomentum {
    pub spin: Spin,
    pub jx: CMat,
    pub jy: CMat,
    pub jz: CMat,
}

impl AngularMomentum {
    pub fn new(spin: Spin) -> Self {
        let n = spin.dim();
        let j = spin.j();
        let mut jp = CMat::zeros(n, n);
        for k in 1..n {
            let m = spin.m(k);
            jp[(k - 1, k)] = c((j * (j + 1.0) - m * (m + 1.0)).sqrt(), 0.0);
        }
        let jm = jp.adjoint();
        let jx = (&jp + &jm) * c(0.5, 0.0);
        let jy = (&jp - &jm) * c(0.0, -0.5);
        let jz = CMat::from_diagonal(&CVec::from_iterator(n, (0..n).map(|k| c(spin.m(k), 0.0))));
        Self { spin, jx, jy, jz }
    }

    pub fn component(&self, axis: Axis) -> &CMat {
        match axis {
            Axis::X => &self.jx,
            Axis::Y => &self.jy,
            Axis::Z => &self.jz,
        }
    }

    pub fn casimir(&self) -> CMat {
        &self.jx * &self.jx + &self.jy * &self.jy + &self.jz * &self.jz
    }
}

/// `exp(iθJ_axis)`.
pub fn rotation(spin: Spin, axis: Axis, theta: f64) -> CMat {
    exp_i_hermitian(AngularMomentum::new(spin).component(axis), theta)
}

/// Kicked top `exp(−iβJz²/2j) exp(−iαJx)`.
pub fn kicked_top(spin: Spin, alpha: f64, beta: f64) -> CMat {
    let l = AngularMomentum::new(spin);
    let j = spin.j();
    // Jz² is diagonal
    let twist = CMat::from_diagonal(&CVec::from_iterator(
        spin.dim(),
        (0..spin.dim()).map(|k| (linalg::I * (-beta * spin.m(k).powi(2) / (2.0 * j))).exp()),
    ));
    twist * exp_i_hermitian(&l.jx, -alpha)
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Amplitudes of `exp(−iφJz) exp(−iθJy)|j, j⟩`:
/// `√C(2j, j−m) cos^{j+m}(θ/2) sin^{j−m}(θ/2) e^{−imφ}`.
pub fn spin_coherent(spin: Spin, theta: f64, phi: f64) -> Ket {
    let (s, co) = (theta / 2.0).sin_cos();
    let n = spin.dim();
    let amps = CVec::from_iterator(
        n,
        (0..n).map(|k| {
            let m = spin.m(k);
            let r = binomial(spin.two_j, k).sqrt() * co.powi((spin.two_j - k) as i32) * s.powi(k as i32);
            (linalg::I * (-m * phi)).exp() * r
        }),
    );
    Ket::new(amps).expect("coherent amplitudes are normalized")
}

/// Latitude operators `L₁ = (𝟙 + Jz/j)/2`, `L₂ = (𝟙 − Jz/j)/2`.
pub fn latitude_operators(spin: Spin) -> [CMat; 2] {
    let n = spin.dim();
    let j = spin.j();
    let diag = |sign: f64| CMat::from_diagonal(&CVec::from_iterator(n, (0..n).map(|k| c(0.5 + sign * spin.m(k) / (2.0 * j), 0.0))));
    [diag(1.0), diag(-1.0)]
}

/// `(1/2 + ⟨Jz⟩/2j, 1/2 − ⟨Jz⟩/2j)`.
pub fn latitude_probabilities(spin: Spin, rho: &DensityMatrix) -> Result<(f64, f64)> {
    crate::error::check_dim(spin.dim(), rho.dim())?;
    let jz = rho.expectation(&AngularMomentum::new(spin).jz).re;
    let p1 = (0.5 + jz / (2.0 * spin.j())).clamp(0.0, 1.0);
    Ok((p1, 1.0 - p1))
}

/// Rotations `exp(iθ₁Jz)` and `exp(iθ₂Jx)` with probability one half each.
pub fn random_rotations(spin: Spin, theta1: f64, theta2: f64) -> Result<HomogeneousQIFS> {
    HomogeneousQIFS::unitary(&[0.5, 0.5], vec![rotation(spin, Axis::Z, theta1), rotation(spin, Axis::X, theta2)])
}

/// The same rotations chosen with the latitude probabilities: `Vᵢ` the
/// rotations, `Wᵢ = √Lᵢ`.
pub fn latitude_rotations(spin: Spin, theta1: f64, theta2: f64) -> Result<PureQIFS> {
    let [l1, l2] = latitude_operators(spin);
    PureQIFS::new(
        vec![rotation(spin, Axis::Z, theta1), rotation(spin, Axis::X, theta2)],
        vec![linalg::sqrt_psd(&l1), linalg::sqrt_psd(&l2)],
    )
}

/// Kicks of strength `β` and `β + Δ` with probabilities `p` and `1 − p`.
pub fn random_kicked_top(spin: Spin, alpha: f64, beta: f64, delta: f64, p: f64) -> Result<HomogeneousQIFS> {
    HomogeneousQIFS::unitary(&[p, 1.0 - p], vec![kicked_top(spin, alpha, beta), kicked_top(spin, alpha, beta + delta)])
}

/// `H(θ, φ) = ⟨θ,φ|ρ|θ,φ⟩` at the cell centres of an equiangular grid,
/// `rows` in θ ∈ [0, π] and `cols` in φ ∈ [0, 2π).
pub fn husimi_sphere(rho: &DensityMatrix, rows: usize, cols: usize) -> Result<HusimiGrid> {
    let spin = Spin::from_dim(rho.dim())?;
    if rows == 0 || cols == 0 {
        return Err(Error::Invalid("empty Husimi grid".into()));
    }
    let mut grid = HusimiGrid {
        rows,
        cols,
        row_label: "theta".into(),
        row_range: (0.0, std::f64::consts::PI),
        col_label: "phi".into(),
        col_range: (0.0, 2.0 * std::f64::consts::PI),
        values: vec![],
        meta: serde_json::json!({ "j": spin.j(), "dim": spin.dim() }),
    };
    let values: Vec<f64> = (0..rows)
        .into_par_iter()
        .flat_map_iter(|r| {
            let theta = grid.row_centre(r);
            (0..cols)
                .map(|k| spin_coherent(spin, theta, grid.col_centre(k)).expectation(rho.matrix()).re.clamp(0.0, 1.0))
                .collect::<Vec<_>>()
        })
        .collect();
    grid.values = values;
    Ok(grid)
}

/// `(N/4π) ∫ H sin θ dθ dφ` by the midpoint rule; equals `tr ρ = 1` in the
/// continuum.
pub fn sphere_integral(grid: &HusimiGrid, dim: usize) -> f64 {
    let dt = (grid.row_range.1 - grid.row_range.0) / grid.rows as f64;
    let dp = (grid.col_range.1 - grid.col_range.0) / grid.cols as f64;
    let mut total = 0.0;
    for r in 0..grid.rows {
        let w = grid.row_centre(r).sin() * dt * dp;
        total += (0..grid.cols).map(|k| grid.get(r, k)).sum::<f64>() * w;
    }
    total * dim as f64 / (4.0 * std::f64::consts::PI)
}

/// `cos²(γ/2)` with `γ` the great-circle angle between two directions.
pub fn half_angle_cos_sq(t1: f64, p1: f64, t2: f64, p2: f64) -> f64 {
    let cos_gamma = t1.cos() * t2.cos() + t1.sin() * t2.sin() * (p1 - p2).cos();
    (1.0 + cos_gamma) / 2.0
}

/// Pure coherent state as a [`PureState`].
pub fn coherent_state(spin: Spin, theta: f64, phi: f64) -> PureState {
    PureState::new(spin_coherent(spin, theta, phi))
}
