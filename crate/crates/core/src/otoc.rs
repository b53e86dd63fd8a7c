//! Direct dense evaluation of Pauli OTOCs
//! `C(t) = Tr[ρ σ_i^a(t) σ_j^b σ_i^a(t) σ_j^b]` and of the squared commutator.
//!
//! These are the reference values the measurement protocols are checked
//! against.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::dynamics::Propagator;
use crate::error::{Error, Result};
use crate::hilbert::{
    dim, embed_pauli, pauli_left, pauli_right, trace_of_product, CMatrix, DensityOperator,
    PauliAxis, SiteIndex,
};

/// `W = σ_i^a`, `V = σ_j^b`. The sites may coincide, although the
/// commuting-operator interpretation assumes `i ≠ j`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OtocSpec {
    pub i: SiteIndex,
    pub a: PauliAxis,
    pub j: SiteIndex,
    pub b: PauliAxis,
}

impl OtocSpec {
    pub fn new(i: usize, a: PauliAxis, j: usize, b: PauliAxis) -> Result<Self> {
        Ok(Self { i: SiteIndex::new(i)?, a, j: SiteIndex::new(j)?, b })
    }

    pub fn validate(&self, n_sites: usize) -> Result<()> {
        self.i.check(n_sites)?;
        self.j.check(n_sites)
    }
}

pub(crate) fn check_inputs(rho: &DensityOperator, spec: &OtocSpec, prop: &Propagator) -> Result<()> {
    if rho.n_sites() != prop.n_sites() {
        return Err(Error::DimensionMismatch { expected: prop.dim(), found: dim(rho.n_sites()) });
    }
    spec.validate(rho.n_sites())
}

/// `σ_i^a(t)` as a dense matrix.
pub(crate) fn evolved_w(spec: &OtocSpec, prop: &Propagator, t: f64) -> Result<CMatrix> {
    let w = embed_pauli(spec.i, spec.a, prop.n_sites())?;
    Ok(prop.heisenberg(&w, t)?.into_matrix())
}

pub fn otoc_direct(rho: &DensityOperator, spec: &OtocSpec, prop: &Propagator, t: f64) -> Result<C64> {
    check_inputs(rho, spec, prop)?;
    let w_t = evolved_w(spec, prop, t)?;
    let wv = pauli_right(spec.j, spec.b, &w_t);
    let product = &wv * &wv;
    Ok(trace_of_product(rho.matrix(), &product))
}

/// `Tr(ρ [W(t), V]† [W(t), V])`.
pub fn commutator_norm(rho: &DensityOperator, spec: &OtocSpec, prop: &Propagator, t: f64) -> Result<f64> {
    check_inputs(rho, spec, prop)?;
    let w_t = evolved_w(spec, prop, t)?;
    let comm = pauli_right(spec.j, spec.b, &w_t) - pauli_left(spec.j, spec.b, &w_t);
    let gram = comm.adjoint() * comm;
    Ok(trace_of_product(rho.matrix(), &gram).re)
}

/// `C(t)` on many time points from a single spectral decomposition.
///
/// In the energy eigenbasis `W(t)` only picks up phases, and writing
/// `ρ = Σ_k p_k |k⟩⟨k|` reduces each evaluation to matrix-vector products,
/// `O(rank(ρ) · d²)` per time point.
#[derive(Clone, Debug)]
pub struct OtocSeries {
    energies: DVector<f64>,
    w: CMatrix,
    v: CMatrix,
    /// Columns `√p_k |k⟩`, in the energy eigenbasis.
    factors: CMatrix,
}

impl OtocSeries {
    pub fn new(rho: &DensityOperator, spec: &OtocSpec, prop: &Propagator) -> Result<Self> {
        check_inputs(rho, spec, prop)?;
        let n = prop.n_sites();
        let basis = prop.eigenvectors();
        let to_eigenbasis = |m: &CMatrix| basis.adjoint() * m * basis;
        let w = to_eigenbasis(embed_pauli(spec.i, spec.a, n)?.matrix());
        let v = to_eigenbasis(embed_pauli(spec.j, spec.b, n)?.matrix());

        let state = rho.matrix().clone().symmetric_eigen();
        let kept: Vec<usize> = (0..state.eigenvalues.len()).filter(|&k| state.eigenvalues[k] > 0.0).collect();
        let mut factors = CMatrix::zeros(prop.dim(), kept.len());
        for (col, &k) in kept.iter().enumerate() {
            let scaled = state.eigenvectors.column(k) * C64::from(state.eigenvalues[k].sqrt());
            factors.set_column(col, &(basis.adjoint() * scaled));
        }
        Ok(Self { energies: prop.eigenvalues().clone(), w, v, factors })
    }

    pub fn at(&self, t: f64) -> C64 {
        let phases: Vec<C64> = self.energies.iter().map(|&e| C64::from_polar(1.0, e * t)).collect();
        let w_t = CMatrix::from_fn(self.w.nrows(), self.w.ncols(), |m, n| phases[m] * self.w[(m, n)] * phases[n].conj());
        self.factors
            .column_iter()
            .map(|b| {
                let x = &self.v * b;
                let x = &w_t * x;
                let x = &self.v * x;
                b.dotc(&(&w_t * x))
            })
            .sum()
    }
}
