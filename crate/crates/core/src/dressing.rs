//! Reduced two-atom model of microwave-assisted Rydberg dressing.
//!
//! Each atom has a ground state `g` and two Rydberg states `S` and `P`. A
//! laser couples `g ↔ S`, a microwave couples `S ↔ P`. The pair interacts via
//! a van der Waals shift `C₆/r⁶` on `|SS⟩` and a resonant dipolar exchange
//! `C₃/r³` between `|SP⟩` and `|PS⟩`. All energies are in MHz, distances in
//! µm.
//!
//! Rotating-frame convention: the laser-targeted energy is zero, so single-atom
//! energies are `E_g = 0`, `E_S = Δ_L`, `E_P = Δ_L + Δ_μ`. A laser red-detuned
//! from the `g → S` resonance has `Δ_L > 0`; likewise `Δ_μ > 0` puts the
//! microwave below the `S → P` transition.
//!
//! Pair basis index: `3·(atom 1 level) + (atom 2 level)` with `g = 0`, `S = 1`,
//! `P = 2`.

use nalgebra::{Matrix3, Matrix4, SMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub type PairMatrix = SMatrix<f64, 9, 9>;

const G: usize = 0;
const S: usize = 1;
const P: usize = 2;
const GG: usize = 0;
const SS: usize = 3 * S + S;
const SP: usize = 3 * S + P;
const PS: usize = 3 * P + S;
const PP: usize = 3 * P + P;
const RYDBERG_BLOCK: [usize; 4] = [SS, SP, PS, PP];

/// Minimum `|⟨gg|ψ⟩|²` (or `|⟨g|ψ⟩|²`) for a dressed state to count as
/// ground-state connected.
pub const MIN_OVERLAP: f64 = 0.5;

/// A coherent drive: Rabi frequency and detuning, both in MHz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Drive {
    pub rabi: f64,
    pub detuning: f64,
}

impl Drive {
    pub const OFF: Drive = Drive { rabi: 0.0, detuning: 0.0 };

    pub const fn new(rabi: f64, detuning: f64) -> Self {
        Self { rabi, detuning }
    }

    fn validate(&self, what: &str) -> Result<()> {
        if !self.rabi.is_finite() || !self.detuning.is_finite() || self.rabi < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "{what} drive needs a finite, non-negative Rabi frequency and finite detuning, got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelScheme {
    pub laser: Drive,
    pub microwave: Drive,
}

impl LevelScheme {
    pub fn new(laser: Drive, microwave: Drive) -> Result<Self> {
        let scheme = Self { laser, microwave };
        scheme.validate()?;
        Ok(scheme)
    }

    pub fn validate(&self) -> Result<()> {
        self.laser.validate("laser")?;
        self.microwave.validate("microwave")
    }

    /// Same laser, microwave switched off.
    pub fn microwave_off(&self) -> Self {
        Self { laser: self.laser, microwave: Drive::OFF }
    }

    pub fn laser_off(&self) -> Self {
        Self { laser: Drive { rabi: 0.0, ..self.laser }, microwave: self.microwave }
    }

    pub fn single_atom_hamiltonian(&self) -> Matrix3<f64> {
        let mut h = Matrix3::zeros();
        h[(S, S)] = self.laser.detuning;
        h[(P, P)] = self.laser.detuning + self.microwave.detuning;
        h[(G, S)] = 0.5 * self.laser.rabi;
        h[(S, G)] = 0.5 * self.laser.rabi;
        h[(S, P)] = 0.5 * self.microwave.rabi;
        h[(P, S)] = 0.5 * self.microwave.rabi;
        h
    }
}

/// Interaction strengths: `c6` in MHz·µm⁶ for `|SS⟩`, `c3` in MHz·µm³ for the
/// `|SP⟩ ↔ |PS⟩` exchange.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InteractionCoefficients {
    pub c6: f64,
    pub c3: f64,
}

impl InteractionCoefficients {
    /// Illustrative values, not atomic data. They place the `|SS⟩`–dipolar
    /// crossing of the default microwave configuration near 3.3 µm.
    pub const EXAMPLE: Self = Self { c6: 20_000.0, c3: -1_000.0 };

    pub const NONE: Self = Self { c6: 0.0, c3: 0.0 };

    fn validate(&self) -> Result<()> {
        if self.c6.is_finite() && self.c3.is_finite() {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("non-finite interaction coefficients {self:?}")))
        }
    }
}

fn check_distance(r: f64) -> Result<()> {
    if r.is_finite() && r > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidDistance(r))
    }
}

/// Pair basis index after exchanging the two atoms.
pub fn swap_index(k: usize) -> usize {
    3 * (k % 3) + k / 3
}

pub fn swap_atoms(m: &PairMatrix) -> PairMatrix {
    PairMatrix::from_fn(|r, c| m[(swap_index(r), swap_index(c))])
}

fn non_interacting(scheme: &LevelScheme) -> PairMatrix {
    let h1 = scheme.single_atom_hamiltonian();
    let mut h = PairMatrix::zeros();
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                // h1 ⊗ 1 + 1 ⊗ h1
                h[(3 * a + c, 3 * b + c)] += h1[(a, b)];
                h[(3 * c + a, 3 * c + b)] += h1[(a, b)];
            }
        }
    }
    h
}

/// Rotating-frame two-atom Hamiltonian at distance `r`.
pub fn build_two_atom_hamiltonian(
    scheme: &LevelScheme,
    coeffs: &InteractionCoefficients,
    r: f64,
) -> Result<PairMatrix> {
    check_distance(r)?;
    scheme.validate()?;
    coeffs.validate()?;
    let mut h = non_interacting(scheme);
    h[(SS, SS)] += coeffs.c6 / r.powi(6);
    let exchange = coeffs.c3 / r.powi(3);
    h[(SP, PS)] += exchange;
    h[(PS, SP)] += exchange;
    Ok(h)
}

/// Sorted eigenvalues of the Rydberg block `{SS, SP, PS, PP}` with the laser
/// switched off.
pub fn pair_potential(scheme: &LevelScheme, coeffs: &InteractionCoefficients, r: f64) -> Result<[f64; 4]> {
    let h = build_two_atom_hamiltonian(&scheme.laser_off(), coeffs, r)?;
    let block = Matrix4::from_fn(|a, b| h[(RYDBERG_BLOCK[a], RYDBERG_BLOCK[b])]);
    let mut energies: [f64; 4] = block.symmetric_eigenvalues().into();
    energies.sort_by(f64::total_cmp);
    Ok(energies)
}

/// Energy of the single-atom dressed state with the largest `|g⟩` weight.
pub fn single_atom_ground_energy(scheme: &LevelScheme) -> Result<f64> {
    scheme.validate()?;
    let eig = SymmetricEigen::new(scheme.single_atom_hamiltonian());
    let (k, overlap) = (0..3)
        .map(|k| (k, eig.eigenvectors[(G, k)].powi(2)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("three eigenvectors");
    if overlap <= MIN_OVERLAP {
        return Err(Error::Adiabaticity { overlap });
    }
    Ok(eig.eigenvalues[k])
}

/// A dressed eigenstate: energy and normalized vector.
#[derive(Clone, Debug)]
struct DressedState {
    energy: f64,
    vector: SMatrix<f64, 9, 1>,
}

impl DressedState {
    fn gg_weight(&self) -> f64 {
        self.vector[GG].powi(2)
    }
}

/// Eigenstate of `h` maximizing `|⟨reference|ψ⟩|²`, with that overlap.
fn best_overlap(h: &PairMatrix, reference: &SMatrix<f64, 9, 1>) -> (DressedState, f64) {
    let eig = SymmetricEigen::new(*h);
    let (k, overlap) = (0..9)
        .map(|k| (k, eig.eigenvectors.column(k).dot(reference).powi(2)))
        .max_by(|a, b| a.1.total_cmp(&b.1))
        .expect("nine eigenvectors");
    let state = DressedState { energy: eig.eigenvalues[k], vector: eig.eigenvectors.column(k).into_owned() };
    (state, overlap)
}

fn gg_vector() -> SMatrix<f64, 9, 1> {
    let mut v = SMatrix::<f64, 9, 1>::zeros();
    v[GG] = 1.0;
    v
}

/// `E₀ = 2E_g − E_gg(∞)`, which makes `J(∞) = 0`.
fn asymptotic_offset(scheme: &LevelScheme, e_g: f64) -> Result<f64> {
    let (state, overlap) = best_overlap(&non_interacting(scheme), &gg_vector());
    if overlap <= MIN_OVERLAP {
        return Err(Error::Adiabaticity { overlap });
    }
    Ok(2.0 * e_g - state.energy)
}

/// Dressed Ising coupling `J(r) = E_gg(r) − 2E_g + E₀` in MHz, with `E_gg`
/// taken from the eigenstate of largest `|gg⟩` weight.
pub fn dressed_ising_coupling(scheme: &LevelScheme, coeffs: &InteractionCoefficients, r: f64) -> Result<f64> {
    let h = build_two_atom_hamiltonian(scheme, coeffs, r)?;
    let e_g = single_atom_ground_energy(scheme)?;
    let offset = asymptotic_offset(scheme, e_g)?;
    let (state, overlap) = best_overlap(&h, &gg_vector());
    if overlap <= MIN_OVERLAP {
        return Err(Error::Adiabaticity { overlap });
    }
    Ok(state.energy - 2.0 * e_g + offset)
}

/// `J(r)` on a distance grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DressedCurve {
    pub distances: Vec<f64>,
    pub j_values: Vec<f64>,
}

impl DressedCurve {
    pub fn len(&self) -> usize {
        self.distances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distances.is_empty()
    }
}

pub fn uniform_grid(r_min: f64, r_max: f64, n_points: usize) -> Result<Vec<f64>> {
    if !(r_min > 0.0 && r_min < r_max && r_max.is_finite()) {
        return Err(Error::InvalidGrid(format!("need 0 < r_min < r_max, got [{r_min}, {r_max}]")));
    }
    if n_points < 2 {
        return Err(Error::InvalidGrid(format!("need at least 2 points, got {n_points}")));
    }
    let step = (r_max - r_min) / (n_points - 1) as f64;
    Ok((0..n_points)
        .map(|k| if k + 1 == n_points { r_max } else { r_min + step * k as f64 })
        .collect())
}

/// `J(r)` on a uniform grid, following the ground-connected eigenstate
/// adiabatically from `r_max` inward by maximum overlap with the previous
/// grid point.
pub fn scan_curve(
    scheme: &LevelScheme,
    coeffs: &InteractionCoefficients,
    r_min: f64,
    r_max: f64,
    n_points: usize,
    microwave_on: bool,
) -> Result<DressedCurve> {
    let scheme = if microwave_on { *scheme } else { scheme.microwave_off() };
    let distances = uniform_grid(r_min, r_max, n_points)?;
    let e_g = single_atom_ground_energy(&scheme)?;
    let offset = asymptotic_offset(&scheme, e_g)?;

    let mut j_values = vec![0.0; n_points];
    let mut reference = gg_vector();
    for (k, &r) in distances.iter().enumerate().rev() {
        let h = build_two_atom_hamiltonian(&scheme, coeffs, r)?;
        let (mut state, _) = best_overlap(&h, &reference);
        if state.gg_weight() <= MIN_OVERLAP {
            return Err(Error::Adiabaticity { overlap: state.gg_weight() });
        }
        // Keep a consistent eigenvector phase along the path.
        if state.vector.dot(&reference) < 0.0 {
            state.vector = -state.vector;
        }
        j_values[k] = state.energy - 2.0 * e_g + offset;
        reference = state.vector;
    }
    Ok(DressedCurve { distances, j_values })
}

/// Contiguous distance range where the microwave inverts the coupling.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InversionWindow {
    pub r_start: f64,
    pub r_end: f64,
}

impl InversionWindow {
    /// `r_end / r_start`.
    pub fn span(&self) -> f64 {
        self.r_end / self.r_start
    }
}

/// Inverted-coupling criterion at a single distance: opposite signs and
/// `|J_on / J_off| ∈ [0.5, 2]`.
pub fn is_inverted(j_off: f64, j_on: f64) -> bool {
    if j_off * j_on >= 0.0 {
        return false;
    }
    let ratio = (j_on / j_off).abs();
    (0.5..=2.0).contains(&ratio)
}

/// Widest (by `r_end / r_start`) contiguous run of grid points satisfying
/// [`is_inverted`]. The curves must share their grid.
pub fn inversion_window(off: &DressedCurve, on: &DressedCurve) -> Option<InversionWindow> {
    assert_eq!(off.distances, on.distances, "curves on different grids");
    let mut best: Option<InversionWindow> = None;
    let mut start: Option<usize> = None;
    for k in 0..off.len() {
        if is_inverted(off.j_values[k], on.j_values[k]) {
            let s = *start.get_or_insert(k);
            let window = InversionWindow { r_start: off.distances[s], r_end: off.distances[k] };
            if best.is_none_or(|b| window.span() > b.span()) {
                best = Some(window);
            }
        } else {
            start = None;
        }
    }
    best
}

/// Grid searched for a sign-inverting microwave configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct InversionSearch {
    pub rabi_grid: Vec<f64>,
    pub detuning_grid: Vec<f64>,
    pub r_min: f64,
    pub r_max: f64,
    pub n_points: usize,
}

impl Default for InversionSearch {
    /// Microwave Rabi 10–60 MHz in steps of 10, microwave detuning −60 to
    /// +60 MHz in steps of 2.5, distances 1–12 µm in steps of 0.1.
    fn default() -> Self {
        Self {
            rabi_grid: (1..=6).map(|k| 10.0 * k as f64).collect(),
            detuning_grid: (0..=48).map(|k| -60.0 + 2.5 * k as f64).collect(),
            r_min: 1.0,
            r_max: 12.0,
            n_points: 111,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InversionResult {
    pub microwave: Drive,
    pub window: InversionWindow,
    pub off: DressedCurve,
    pub on: DressedCurve,
}

/// Exhaustive search over `search`'s microwave grid for the widest inversion
/// window. Ties keep the first configuration in grid order (Rabi outer,
/// detuning inner). Configurations whose scan fails are skipped.
pub fn search_inversion(
    laser: Drive,
    coeffs: &InteractionCoefficients,
    search: &InversionSearch,
) -> Result<Option<InversionResult>> {
    let base = LevelScheme::new(laser, Drive::OFF)?;
    let off = scan_curve(&base, coeffs, search.r_min, search.r_max, search.n_points, false)?;
    let mut best: Option<InversionResult> = None;
    for &rabi in &search.rabi_grid {
        for &detuning in &search.detuning_grid {
            let microwave = Drive::new(rabi, detuning);
            let scheme = LevelScheme::new(laser, microwave)?;
            let Ok(on) = scan_curve(&scheme, coeffs, search.r_min, search.r_max, search.n_points, true) else {
                continue;
            };
            let Some(window) = inversion_window(&off, &on) else { continue };
            if best.as_ref().is_none_or(|b| window.span() > b.window.span()) {
                best = Some(InversionResult { microwave, window, off: off.clone(), on });
            }
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laser() -> Drive {
        Drive::new(2.0, 4.0)
    }

    #[test]
    fn bare_detunings_without_drives() {
        let scheme = LevelScheme::new(Drive::new(0.0, 4.0), Drive::new(0.0, 18.0)).unwrap();
        let h = build_two_atom_hamiltonian(&scheme, &InteractionCoefficients::EXAMPLE, 1e6).unwrap();
        let energies = [0.0, 4.0, 22.0];
        for a in 0..3 {
            for b in 0..3 {
                let k = 3 * a + b;
                for c in 0..9 {
                    let expected = if c == k { energies[a] + energies[b] } else { 0.0 };
                    assert!((h[(k, c)] - expected).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn hamiltonian_is_symmetric_and_exchange_invariant() {
        let scheme = LevelScheme::new(Drive::new(1.3, -2.2), Drive::new(17.0, 5.5)).unwrap();
        for r in [0.7, 2.0, 3.3, 9.0] {
            let h = build_two_atom_hamiltonian(&scheme, &InteractionCoefficients::EXAMPLE, r).unwrap();
            assert_eq!(h, h.transpose());
            assert_eq!(swap_atoms(&h), h);
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let scheme = LevelScheme::new(laser(), Drive::OFF).unwrap();
        let c = InteractionCoefficients::EXAMPLE;
        assert_eq!(build_two_atom_hamiltonian(&scheme, &c, 0.0), Err(Error::InvalidDistance(0.0)));
        assert!(build_two_atom_hamiltonian(&scheme, &c, -1.0).is_err());
        assert!(LevelScheme::new(Drive::new(-1.0, 0.0), Drive::OFF).is_err());
        assert!(scan_curve(&scheme, &c, 3.0, 2.0, 10, false).is_err());
        assert!(scan_curve(&scheme, &c, 1.0, 2.0, 1, false).is_err());
    }

    #[test]
    fn microwave_off_ss_branch_is_bare_vdw() {
        let scheme = LevelScheme::new(laser(), Drive::new(0.0, 30.0)).unwrap();
        let c = InteractionCoefficients { c6: 20_000.0, c3: 0.0 };
        for r in [2.0, 3.5, 6.0] {
            let energies = pair_potential(&scheme, &c, r).unwrap();
            let expected = c.c6 / r.powi(6) + 2.0 * scheme.laser.detuning;
            assert!(energies.iter().any(|e| (e - expected).abs() < 1e-9), "{energies:?}");
        }
    }

    #[test]
    fn autler_townes_splitting_at_large_distance() {
        let mw = Drive::new(30.0, 18.0);
        let scheme = LevelScheme::new(laser(), mw).unwrap();
        let energies = pair_potential(&scheme, &InteractionCoefficients::EXAMPLE, 1e4).unwrap();
        let splitting = (mw.rabi.powi(2) + mw.detuning.powi(2)).sqrt();
        for w in energies.windows(2) {
            let gap = w[1] - w[0];
            // The middle pair is the degenerate SP/PS-like doublet.
            assert!((gap - splitting).abs() < 1e-6 || gap.abs() < 1e-6, "{energies:?}");
        }
        assert!((energies[3] - energies[0] - 2.0 * splitting).abs() < 1e-6);
    }

    #[test]
    fn no_laser_no_coupling() {
        let scheme = LevelScheme::new(Drive::new(0.0, 4.0), Drive::new(40.0, 45.0)).unwrap();
        for r in [1.0, 3.0, 10.0] {
            assert!(dressed_ising_coupling(&scheme, &InteractionCoefficients::EXAMPLE, r).unwrap().abs() < 1e-12);
        }
        let curve = scan_curve(&scheme, &InteractionCoefficients::EXAMPLE, 1.0, 10.0, 20, true).unwrap();
        assert!(curve.j_values.iter().all(|j| j.abs() < 1e-12));
    }

    #[test]
    fn scan_endpoints_match_point_calls() {
        let scheme = LevelScheme::new(laser(), Drive::new(40.0, 45.0)).unwrap();
        let c = InteractionCoefficients::EXAMPLE;
        for on in [false, true] {
            let curve = scan_curve(&scheme, &c, 2.0, 8.0, 2, on).unwrap();
            let s = if on { scheme } else { scheme.microwave_off() };
            for (r, j) in curve.distances.iter().zip(&curve.j_values) {
                assert!((dressed_ising_coupling(&s, &c, *r).unwrap() - j).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coupling_vanishes_far_away() {
        let scheme = LevelScheme::new(laser(), Drive::new(40.0, 45.0)).unwrap();
        let c = InteractionCoefficients::EXAMPLE;
        assert!(dressed_ising_coupling(&scheme.microwave_off(), &c, 200.0).unwrap().abs() < 1e-6);
        assert!(dressed_ising_coupling(&scheme, &c, 200.0).unwrap().abs() < 1e-6);
    }

    #[test]
    fn tail_decays_monotonically() {
        let scheme = LevelScheme::new(laser(), Drive::OFF).unwrap();
        let curve = scan_curve(&scheme, &InteractionCoefficients::EXAMPLE, 5.0, 20.0, 61, false).unwrap();
        for w in curve.j_values.windows(2) {
            assert!(w[1].abs() < w[0].abs());
        }
    }

    #[test]
    fn ground_connected_state_is_swap_symmetric() {
        let scheme = LevelScheme::new(laser(), Drive::new(40.0, 45.0)).unwrap();
        for r in [1.5, 3.3, 6.0] {
            let h = build_two_atom_hamiltonian(&scheme, &InteractionCoefficients::EXAMPLE, r).unwrap();
            let (state, overlap) = best_overlap(&h, &gg_vector());
            assert!(overlap > MIN_OVERLAP);
            let swapped = SMatrix::<f64, 9, 1>::from_fn(|k, _| state.vector[swap_index(k)]);
            assert!((swapped - state.vector).amax() < 1e-10);
        }
    }

    #[test]
    fn eigenvectors_are_orthonormal() {
        let scheme = LevelScheme::new(laser(), Drive::new(30.0, 18.4)).unwrap();
        let h = build_two_atom_hamiltonian(&scheme, &InteractionCoefficients::EXAMPLE, 3.1).unwrap();
        let eig = SymmetricEigen::new(h);
        let gram = eig.eigenvectors.transpose() * eig.eigenvectors;
        assert!((gram - PairMatrix::identity()).amax() < 1e-10);
    }

    #[test]
    fn adiabaticity_failure_is_reported() {
        // Laser on resonance with strong drive: g is maximally mixed with S.
        let scheme = LevelScheme::new(Drive::new(50.0, 0.0), Drive::OFF).unwrap();
        assert!(matches!(single_atom_ground_energy(&scheme), Err(Error::Adiabaticity { .. })));
    }

    #[test]
    fn inversion_criterion() {
        assert!(is_inverted(1.0, -1.0));
        assert!(is_inverted(1.0, -0.5));
        assert!(!is_inverted(1.0, -0.4));
        assert!(!is_inverted(1.0, 1.0));
        assert!(!is_inverted(0.0, -1.0));
        let grid = vec![1.0, 2.0, 3.0, 4.0, 5.0];
        let off = DressedCurve { distances: grid.clone(), j_values: vec![1.0, 1.0, 1.0, 1.0, 1.0] };
        let on = DressedCurve { distances: grid, j_values: vec![-1.0, 1.0, -1.0, -0.9, -1.1] };
        assert_eq!(inversion_window(&off, &on), Some(InversionWindow { r_start: 3.0, r_end: 5.0 }));
    }
}
