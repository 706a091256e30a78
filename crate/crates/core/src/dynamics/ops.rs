//! Truncated Fock-space operators stored as sparse matrices.

use nalgebra::{DMatrix, DVector};
use nalgebra_sparse::{CooMatrix, CsrMatrix};
use num_complex::Complex64;

use crate::error::{NemsError, Result};

pub type C64 = Complex64;

/// An operator on a product of truncated Fock spaces. The basis index is
/// row-major in the modes: the last mode varies fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct FockOperator {
    pub dims: Vec<usize>,
    pub matrix: CsrMatrix<C64>,
    pub label: String,
}

fn total_dim(dims: &[usize]) -> usize {
    dims.iter().product()
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

impl FockOperator {
    fn from_triplets(
        dims: &[usize],
        label: impl Into<String>,
        triplets: impl IntoIterator<Item = (usize, usize, C64)>,
    ) -> Self {
        let d = total_dim(dims);
        let mut coo = CooMatrix::new(d, d);
        for (i, j, v) in triplets {
            if v != C64::new(0.0, 0.0) {
                coo.push(i, j, v);
            }
        }
        Self { dims: dims.to_vec(), matrix: CsrMatrix::from(&coo), label: label.into() }
    }

    pub fn identity(dims: &[usize]) -> Self {
        Self { dims: dims.to_vec(), matrix: CsrMatrix::identity(total_dim(dims)), label: "I".into() }
    }

    pub fn zero(dims: &[usize]) -> Self {
        let d = total_dim(dims);
        Self { dims: dims.to_vec(), matrix: CsrMatrix::zeros(d, d), label: "0".into() }
    }

    /// Annihilation operator of `mode`.
    pub fn annihilation(dims: &[usize], mode: usize) -> Self {
        let st = strides(dims);
        let d = total_dim(dims);
        let trip = (0..d).filter_map(|j| {
            let n = (j / st[mode]) % dims[mode];
            (n > 0).then(|| (j - st[mode], j, C64::new((n as f64).sqrt(), 0.0)))
        });
        Self::from_triplets(dims, format!("a{mode}"), trip)
    }

    pub fn creation(dims: &[usize], mode: usize) -> Self {
        Self::annihilation(dims, mode).adjoint()
    }

    pub fn number(dims: &[usize], mode: usize) -> Self {
        let st = strides(dims);
        let d = total_dim(dims);
        let trip = (0..d).map(|j| (j, j, C64::new(((j / st[mode]) % dims[mode]) as f64, 0.0)));
        Self::from_triplets(dims, format!("n{mode}"), trip)
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn adjoint(&self) -> Self {
        let trip: Vec<_> = self.matrix.triplet_iter().map(|(i, j, v)| (j, i, v.conj())).collect();
        Self::from_triplets(&self.dims, format!("({})†", self.label), trip)
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: &self.matrix * &other.matrix,
            label: format!("{}·{}", self.label, other.label),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dims: self.dims.clone(),
            matrix: &self.matrix + &other.matrix,
            label: format!("{} + {}", self.label, other.label),
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let mut m = self.matrix.clone();
        m.values_mut().iter_mut().for_each(|v| *v *= c);
        Self { dims: self.dims.clone(), matrix: m, label: format!("({c})·{}", self.label) }
    }

    /// `self + c·I`.
    pub fn shift(&self, c: C64) -> Self {
        self.add(&Self::identity(&self.dims).scale(c))
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::identity(&self.dims);
        for _ in 0..k {
            out = out.mul(self);
        }
        out.label = format!("{}^{k}", self.label);
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self).scale(C64::new(-1.0, 0.0)))
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn to_dense(&self) -> DMatrix<C64> {
        let mut m = DMatrix::zeros(self.dim(), self.dim());
        for (i, j, v) in self.matrix.triplet_iter() {
            m[(i, j)] += *v;
        }
        m
    }

    /// Infinity norm (max absolute row sum), an upper bound on the spectral
    /// norm of a Hermitian operator.
    pub fn norm_inf(&self) -> f64 {
        self.matrix.row_iter().map(|r| r.values().iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn apply(&self, psi: &DVector<C64>) -> DVector<C64> {
        &self.matrix * psi
    }

    /// `⟨ψ|O|ψ⟩`.
    pub fn expect_pure(&self, psi: &DVector<C64>) -> C64 {
        psi.dotc(&self.apply(psi))
    }

    /// `Tr(O ρ)`.
    pub fn expect_mixed(&self, rho: &DMatrix<C64>) -> C64 {
        let mut t = C64::new(0.0, 0.0);
        for (i, j, v) in self.matrix.triplet_iter() {
            t += v * rho[(j, i)];
        }
        t
    }
}

/// Normalized coherent state of one mode, truncated and renormalized.
pub fn coherent(dim: usize, alpha: C64) -> DVector<C64> {
    let mut v = DVector::zeros(dim);
    let mut c = C64::new((-alpha.norm_sqr() / 2.0).exp(), 0.0);
    for n in 0..dim {
        v[n] = c;
        c *= alpha / ((n + 1) as f64).sqrt();
    }
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

/// Normalized cat state `|α⟩ ± |−α⟩`.
pub fn cat(dim: usize, alpha: C64, plus: bool) -> DVector<C64> {
    let s = if plus { 1.0 } else { -1.0 };
    let v = coherent(dim, alpha) + coherent(dim, -alpha) * C64::new(s, 0.0);
    let norm = v.norm();
    if norm < 1e-300 {
        return coherent(dim, alpha);
    }
    v / C64::new(norm, 0.0)
}

/// Normalized four-component cat with Z4 parity `k` (0..4):
/// `Σ_m i^{−km} |i^m α⟩`.
pub fn four_cat(dim: usize, alpha: C64, k: u32) -> DVector<C64> {
    let i = C64::new(0.0, 1.0);
    let mut v = DVector::zeros(dim);
    for m in 0..4 {
        let rot = i.powu(m);
        v += coherent(dim, alpha * rot) * rot.powu(k).conj();
    }
    let norm = v.norm();
    v / C64::new(norm, 0.0)
}

pub fn fock(dim: usize, n: usize) -> Result<DVector<C64>> {
    if n >= dim {
        return Err(NemsError::Truncation { dim, required: n + 1 });
    }
    let mut v = DVector::zeros(dim);
    v[n] = C64::new(1.0, 0.0);
    Ok(v)
}

/// Kronecker product of per-mode state vectors, first mode slowest.
pub fn product_state(parts: &[DVector<C64>]) -> DVector<C64> {
    let mut out = DVector::from_element(1, C64::new(1.0, 0.0));
    for p in parts {
        out = out.kronecker(p);
    }
    out
}

/// `|ψ⟩⟨ψ|`.
pub fn projector(psi: &DVector<C64>) -> DMatrix<C64> {
    psi * psi.adjoint()
}

/// Uhlmann fidelity `(Tr√(√ρ σ √ρ))²` for density matrices.
pub fn state_fidelity(rho: &DMatrix<C64>, sigma: &DMatrix<C64>) -> f64 {
    let sqrt_rho = hermitian_sqrt(rho);
    let m = &sqrt_rho * sigma * &sqrt_rho;
    let m = (&m + m.adjoint()) * C64::new(0.5, 0.0);
    let ev = m.symmetric_eigenvalues();
    let t: f64 = ev.iter().map(|&e| e.max(0.0).sqrt()).sum();
    t * t
}

/// Fidelity of a density matrix with a pure state, `⟨ψ|ρ|ψ⟩`.
pub fn pure_fidelity(rho: &DMatrix<C64>, psi: &DVector<C64>) -> f64 {
    psi.dotc(&(rho * psi)).re
}

fn hermitian_sqrt(m: &DMatrix<C64>) -> DMatrix<C64> {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    let eig = h.symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::new(e.max(0.0).sqrt(), 0.0)));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

/// Smallest eigenvalue of the Hermitian part.
pub fn min_eigenvalue(m: &DMatrix<C64>) -> f64 {
    let h = (m + m.adjoint()) * C64::new(0.5, 0.0);
    h.symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}
