//! Random problem instances for the identity checks.

use rand::Rng;
use num_complex::Complex64 as C64;

use crate::dynamics::Hamiltonian;
use crate::hilbert::{dim, max_abs, CMatrix, DensityOperator, PauliAxis, SiteIndex};
use crate::otoc::OtocSpec;
use crate::protocol::RotationAngles;

fn ginibre<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMatrix {
    CMatrix::from_fn(d, d, |_, _| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
}

/// Random Hermitian matrix whose largest entry has modulus at most `max_norm`.
pub fn random_hamiltonian<R: Rng + ?Sized>(n_sites: usize, max_norm: f64, rng: &mut R) -> Hamiltonian {
    let a = ginibre(dim(n_sites), rng);
    let h = (&a + a.adjoint()) * C64::from(0.5);
    let scale = max_norm * rng.random_range(0.25..=1.0) / max_abs(&h);
    // Exact symmetrization after scaling keeps the Hermiticity check tight.
    let h = h * C64::from(scale);
    let h = (&h + h.adjoint()) * C64::from(0.5);
    Hamiltonian::from_matrix(n_sites, h).expect("symmetrized matrix is Hermitian")
}

/// Random full-rank density operator `B B† / Tr(B B†)` with Ginibre `B`.
pub fn random_density<R: Rng + ?Sized>(n_sites: usize, rng: &mut R) -> DensityOperator {
    let b = ginibre(dim(n_sites), rng);
    let m = &b * b.adjoint();
    let m = &m / m.trace();
    let m = (&m + m.adjoint()) * C64::from(0.5);
    DensityOperator::from_matrix(n_sites, m).expect("Gram matrix is a valid state")
}

/// Random spec on two distinct sites with the given axes.
pub fn random_spec<R: Rng + ?Sized>(n_sites: usize, a: PauliAxis, b: PauliAxis, rng: &mut R) -> OtocSpec {
    assert!(n_sites >= 2, "two distinct sites need a register of at least 2");
    let i = rng.random_range(1..=n_sites);
    let mut j = rng.random_range(1..n_sites);
    if j >= i {
        j += 1;
    }
    OtocSpec {
        i: SiteIndex::new(i).unwrap(),
        a,
        j: SiteIndex::new(j).unwrap(),
        b,
    }
}

/// The nine ordered axis pairs, in a fixed order.
pub fn axis_pairs() -> impl Iterator<Item = (PauliAxis, PauliAxis)> {
    PauliAxis::ALL.into_iter().flat_map(|a| PauliAxis::ALL.into_iter().map(move |b| (a, b)))
}

/// Rejection-samples angles in `(−π, π]³` with `|prefactor| > min_prefactor`.
pub fn random_angles<R: Rng + ?Sized>(min_prefactor: f64, rng: &mut R) -> RotationAngles {
    use std::f64::consts::PI;
    loop {
        let angles = RotationAngles::new(
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
            rng.random_range(-PI..PI),
        );
        if angles.prefactor().abs() > min_prefactor {
            return angles;
        }
    }
}
