//! Hamiltonians and exact unitary time evolution.
//!
//! Units: the XY coupling constant is 1 and ℏ = 1, so time is dimensionless.
//! Backward evolution is evolution with negative `t`.

use nalgebra::DVector;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::hilbert::{
    dim, embed_pauli, hermiticity_residual, CMatrix, DensityOperator, Operator, PauliAxis,
    SiteIndex, ALGEBRA_TOL,
};

#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    n_sites: usize,
    matrix: CMatrix,
}

impl Hamiltonian {
    pub fn from_matrix(n_sites: usize, matrix: CMatrix) -> Result<Self> {
        let op = Operator::new(n_sites, matrix, true)?;
        Ok(Self { n_sites, matrix: op.into_matrix() })
    }

    pub fn zero(n_sites: usize) -> Result<Self> {
        build_custom(n_sites, &[])
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        dim(self.n_sites)
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn as_operator(&self) -> Operator {
        Operator::from_parts(self.n_sites, self.matrix.clone(), true)
    }
}

/// One additive contribution to a custom Hamiltonian.
#[derive(Clone, Debug)]
pub enum Term {
    /// `strength · σ_i^a σ_j^b`
    Pair { i: SiteIndex, a: PauliAxis, j: SiteIndex, b: PauliAxis, strength: f64 },
    /// `strength · σ_site^axis`
    Field { site: SiteIndex, axis: PauliAxis, strength: f64 },
    /// Arbitrary Hermitian operator, e.g. a multi-site interaction.
    Raw(Operator),
}

/// Open-boundary XY chain `H = −Σ_{k=1}^{N−1} (σ_k^x σ_{k+1}^x + σ_k^y σ_{k+1}^y)`.
///
/// Built from the flip-flop form: each bond contributes `−2` between basis
/// states that differ by exchanging antiparallel neighbours.
pub fn build_xy_chain(n_sites: usize) -> Result<Hamiltonian> {
    if n_sites < 2 {
        return Err(Error::TooFewSites { min: 2, n_sites });
    }
    let d = dim(n_sites);
    let mut m = CMatrix::zeros(d, d);
    for k in 0..n_sites - 1 {
        let pair = (1 << k) | (1 << (k + 1));
        for s in 0..d {
            let bits = s & pair;
            if bits != 0 && bits != pair {
                m[(s ^ pair, s)] += C64::from(-2.0);
            }
        }
    }
    Ok(Hamiltonian { n_sites, matrix: m })
}

pub fn build_custom(n_sites: usize, terms: &[Term]) -> Result<Hamiltonian> {
    let identity = Operator::identity(n_sites)?;
    let d = identity.dim();
    let mut m = CMatrix::zeros(d, d);
    for term in terms {
        match term {
            Term::Pair { i, a, j, b, strength } => {
                let left = embed_pauli(*i, *a, n_sites)?;
                let right = embed_pauli(*j, *b, n_sites)?;
                m += (left.matrix() * right.matrix()) * C64::from(*strength);
            }
            Term::Field { site, axis, strength } => {
                m += embed_pauli(*site, *axis, n_sites)?.matrix() * C64::from(*strength);
            }
            Term::Raw(op) => {
                if op.n_sites() != n_sites {
                    return Err(Error::DimensionMismatch { expected: d, found: op.dim() });
                }
                let residual = hermiticity_residual(op.matrix());
                if residual >= ALGEBRA_TOL {
                    return Err(Error::NotHermitian { residual });
                }
                m += op.matrix();
            }
        }
    }
    Hamiltonian::from_matrix(n_sites, m)
}

/// Cached spectral decomposition `H = V diag(λ) V†`, from which `U(t) =
/// exp(−iHt)` is assembled for any `t`.
#[derive(Clone, Debug)]
pub struct Propagator {
    n_sites: usize,
    eigenvalues: DVector<f64>,
    eigenvectors: CMatrix,
}

impl Propagator {
    pub fn new(h: &Hamiltonian) -> Self {
        let eig = h.matrix.clone().symmetric_eigen();
        Self { n_sites: h.n_sites, eigenvalues: eig.eigenvalues, eigenvectors: eig.eigenvectors }
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        dim(self.n_sites)
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.eigenvalues
    }

    pub fn eigenvectors(&self) -> &CMatrix {
        &self.eigenvectors
    }

    /// `‖V Λ V† − H‖_max`.
    pub fn reconstruction_residual(&self, h: &Hamiltonian) -> f64 {
        let lambda = self.eigenvalues.map(C64::from);
        let rebuilt = &self.eigenvectors * CMatrix::from_diagonal(&lambda) * self.eigenvectors.adjoint();
        crate::hilbert::max_abs(&(rebuilt - h.matrix()))
    }

    /// `exp(−iHt)`.
    pub fn unitary(&self, t: f64) -> CMatrix {
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, mut col) in scaled.column_iter_mut().enumerate() {
            col *= C64::from_polar(1.0, -self.eigenvalues[k] * t);
        }
        scaled * v.adjoint()
    }

    fn check(&self, n_sites: usize) -> Result<()> {
        if n_sites != self.n_sites {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: dim(n_sites) });
        }
        Ok(())
    }

    /// `U(t) ρ U(t)†`.
    pub fn evolve(&self, state: &DensityOperator, t: f64) -> Result<DensityOperator> {
        self.check(state.n_sites())?;
        let u = self.unitary(t);
        Ok(DensityOperator::from_matrix_unchecked(self.n_sites, conjugate(&u, state.matrix())))
    }

    /// Heisenberg-picture operator `U(t)† O U(t) = e^{iHt} O e^{−iHt}`.
    pub fn heisenberg(&self, op: &Operator, t: f64) -> Result<Operator> {
        self.check(op.n_sites())?;
        let u_dag = self.unitary(-t);
        Ok(Operator::from_parts(self.n_sites, conjugate(&u_dag, op.matrix()), op.is_hermitian()))
    }
}

/// `u m u†`.
pub(crate) fn conjugate(u: &CMatrix, m: &CMatrix) -> CMatrix {
    u * m * u.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{all_up_state, expectation, max_abs, trace_of_product, SPECTRAL_TOL};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha20Rng;

    fn site(v: usize) -> SiteIndex {
        SiteIndex::new(v).unwrap()
    }

    fn random_hermitian(n_sites: usize, rng: &mut ChaCha20Rng) -> Hamiltonian {
        let d = dim(n_sites);
        let a = CMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let h = (&a + a.adjoint()) * C64::from(0.5);
        Hamiltonian::from_matrix(n_sites, h).unwrap()
    }

    #[test]
    fn xy_two_sites_by_hand() {
        // σ^xσ^x + σ^yσ^y = 2(σ^+σ^- + σ^-σ^+): only |↑↓⟩ ↔ |↓↑⟩ (indices 1, 2).
        let h = build_xy_chain(2).unwrap();
        for r in 0..4 {
            for c in 0..4 {
                let expected = if (r, c) == (1, 2) || (r, c) == (2, 1) { -2.0 } else { 0.0 };
                assert_eq!(h.matrix()[(r, c)], C64::from(expected), "entry ({r}, {c})");
            }
        }
    }

    #[test]
    fn xy_annihilates_all_up_and_conserves_magnetization() {
        for n in 2..=5 {
            let h = build_xy_chain(n).unwrap();
            assert!(h.matrix().column(0).iter().all(|z| z.norm() == 0.0));
            let d = dim(n);
            let mut mz = CMatrix::zeros(d, d);
            for k in 1..=n {
                mz += embed_pauli(site(k), PauliAxis::Z, n).unwrap().matrix();
            }
            let comm = h.matrix() * &mz - &mz * h.matrix();
            assert_eq!(max_abs(&comm), 0.0);
        }
    }

    #[test]
    fn xy_needs_two_sites() {
        assert_eq!(build_xy_chain(1).unwrap_err(), Error::TooFewSites { min: 2, n_sites: 1 });
    }

    #[test]
    fn custom_matches_xy_chain() {
        let n = 4;
        let mut terms = Vec::new();
        for k in 1..n {
            for axis in [PauliAxis::X, PauliAxis::Y] {
                terms.push(Term::Pair { i: site(k), a: axis, j: site(k + 1), b: axis, strength: -1.0 });
            }
        }
        let custom = build_custom(n, &terms).unwrap();
        assert_eq!(custom, build_xy_chain(n).unwrap());
        assert_eq!(max_abs(Hamiltonian::zero(3).unwrap().matrix()), 0.0);
    }

    #[test]
    fn custom_rejects_non_hermitian() {
        // σ^x σ^y on the same site is iσ^z.
        let bad = [Term::Pair { i: site(1), a: PauliAxis::X, j: site(1), b: PauliAxis::Y, strength: 1.0 }];
        assert!(matches!(build_custom(2, &bad), Err(Error::NotHermitian { .. })));
        let raw = Operator::new(1, CMatrix::from_row_slice(2, 2, &[C64::from(0.0), C64::from(1.0), C64::from(0.0), C64::from(0.0)]), false).unwrap();
        assert!(matches!(build_custom(1, &[Term::Raw(raw)]), Err(Error::NotHermitian { .. })));
        let out_of_range = [Term::Field { site: site(4), axis: PauliAxis::Z, strength: 1.0 }];
        assert!(matches!(build_custom(3, &out_of_range), Err(Error::SiteOutOfRange { .. })));
    }

    #[test]
    fn random_two_site_terms_stay_hermitian() {
        let mut rng = ChaCha20Rng::seed_from_u64(7);
        for _ in 0..20 {
            let raw = random_hermitian(2, &mut rng);
            let terms = [
                Term::Raw(raw.as_operator()),
                Term::Field { site: site(1), axis: PauliAxis::X, strength: rng.random() },
                Term::Pair { i: site(1), a: PauliAxis::Z, j: site(2), b: PauliAxis::Y, strength: rng.random() },
            ];
            let h = build_custom(2, &terms).unwrap();
            assert!(hermiticity_residual(h.matrix()) < ALGEBRA_TOL);
        }
    }

    #[test]
    fn propagator_reconstructs_and_is_unitary() {
        let mut rng = ChaCha20Rng::seed_from_u64(11);
        let h = random_hermitian(4, &mut rng);
        let prop = Propagator::new(&h);
        assert!(prop.reconstruction_residual(&h) < SPECTRAL_TOL);
        let v = prop.eigenvectors();
        assert!(max_abs(&(v * v.adjoint() - CMatrix::identity(16, 16))) < SPECTRAL_TOL);
        for _ in 0..50 {
            let t = rng.random_range(-10.0..10.0);
            let prod = prop.unitary(t) * prop.unitary(-t);
            assert!(max_abs(&(prod - CMatrix::identity(16, 16))) < SPECTRAL_TOL);
        }
    }

    #[test]
    fn evolve_examples() {
        let h = build_xy_chain(3).unwrap();
        let prop = Propagator::new(&h);
        let up = all_up_state(3).unwrap();
        assert!(max_abs(&(prop.evolve(&up, 0.0).unwrap().matrix() - up.matrix())) < SPECTRAL_TOL);
        for t in [0.3, 1.7, -4.2] {
            let evolved = prop.evolve(&up, t).unwrap();
            assert!(max_abs(&(evolved.matrix() - up.matrix())) < SPECTRAL_TOL);
        }

        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let hr = random_hermitian(3, &mut rng);
        let pr = Propagator::new(&hr);
        let psi = crate::random::random_density(3, &mut rng);
        let there = pr.evolve(&psi, 1.3).unwrap();
        let back = pr.evolve(&there, -1.3).unwrap();
        assert!(max_abs(&(back.matrix() - psi.matrix())) < SPECTRAL_TOL);
        assert!((there.matrix().trace() - C64::from(1.0)).norm() < SPECTRAL_TOL);
        assert!(hermiticity_residual(there.matrix()) < SPECTRAL_TOL);

        let wrong = all_up_state(2).unwrap();
        assert!(matches!(pr.evolve(&wrong, 1.0), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn energy_is_conserved() {
        let mut rng = ChaCha20Rng::seed_from_u64(5);
        let h = random_hermitian(3, &mut rng);
        let prop = Propagator::new(&h);
        let rho = crate::random::random_density(3, &mut rng);
        let e0 = trace_of_product(rho.matrix(), h.matrix()).re;
        for k in 0..20 {
            let rt = prop.evolve(&rho, 0.5 * k as f64).unwrap();
            let e = expectation(&rt, &h.as_operator()).unwrap().re;
            assert!((e - e0).abs() < SPECTRAL_TOL);
        }
    }

    #[test]
    fn heisenberg_examples() {
        let h = build_xy_chain(4).unwrap();
        let prop = Propagator::new(&h);
        let x1 = embed_pauli(site(1), PauliAxis::X, 4).unwrap();
        assert!(max_abs(&(prop.heisenberg(&x1, 0.0).unwrap().matrix() - x1.matrix())) < SPECTRAL_TOL);
        for t in [0.4, 1.0, 2.5] {
            let xt = prop.heisenberg(&x1, t).unwrap();
            assert!(xt.is_hermitian());
            assert!(hermiticity_residual(xt.matrix()) < SPECTRAL_TOL);
            let spectrum = xt.matrix().clone().symmetric_eigenvalues();
            assert!(spectrum.iter().all(|&l| (l.abs() - 1.0).abs() < SPECTRAL_TOL));
            let (lo, hi) = (spectrum.min(), spectrum.max());
            assert!((lo + 1.0).abs() < SPECTRAL_TOL && (hi - 1.0).abs() < SPECTRAL_TOL);
            // Operator norm is the largest singular value.
            let norm = xt.matrix().clone().singular_values().max();
            assert!((norm - 1.0).abs() < SPECTRAL_TOL);
        }
    }
}
