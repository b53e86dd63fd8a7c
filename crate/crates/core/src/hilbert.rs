//! N-qubit Hilbert space primitives.
//!
//! Basis convention, used by every module in this crate: the computational
//! basis is indexed by bitstrings, site 1 is the least significant bit, and
//! spin up `|↑⟩` is bit value 0. The fully polarized state `|↑⋯↑⟩` is
//! therefore basis index 0, and `σ^z` has eigenvalue `+1` on it.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<C64>;

/// Absolute tolerance for algebraic identities.
pub const ALGEBRA_TOL: f64 = 1e-12;
/// Absolute tolerance for spectral quantities.
pub const SPECTRAL_TOL: f64 = 1e-10;
/// Largest register accepted by the dense constructors.
pub const MAX_SITES: usize = 12;

const ZERO: C64 = C64::new(0.0, 0.0);
const ONE: C64 = C64::new(1.0, 0.0);
const I: C64 = C64::new(0.0, 1.0);

/// Hilbert space dimension of an `n_sites` qubit register.
pub fn dim(n_sites: usize) -> usize {
    1 << n_sites
}

fn check_register(n_sites: usize) -> Result<()> {
    if n_sites == 0 {
        return Err(Error::TooFewSites { min: 1, n_sites });
    }
    if n_sites > MAX_SITES {
        return Err(Error::InvalidParameter(format!(
            "{n_sites} sites exceeds the dense limit of {MAX_SITES}"
        )));
    }
    Ok(())
}

/// 1-based site label.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SiteIndex(usize);

impl SiteIndex {
    pub fn new(value: usize) -> Result<Self> {
        if value == 0 {
            return Err(Error::InvalidParameter("site labels start at 1".into()));
        }
        Ok(Self(value))
    }

    pub fn get(self) -> usize {
        self.0
    }

    /// Bit mask of this site in a basis index.
    pub fn mask(self) -> usize {
        1 << (self.0 - 1)
    }

    pub fn check(self, n_sites: usize) -> Result<()> {
        if self.0 > n_sites {
            return Err(Error::SiteOutOfRange { site: self.0, n_sites });
        }
        Ok(())
    }
}

impl fmt::Display for SiteIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PauliAxis {
    X,
    Y,
    Z,
}

impl PauliAxis {
    pub const ALL: [PauliAxis; 3] = [PauliAxis::X, PauliAxis::Y, PauliAxis::Z];

    /// Single-site 2×2 matrix in the `{↑, ↓}` basis.
    pub fn matrix(self) -> [[C64; 2]; 2] {
        match self {
            PauliAxis::X => [[ZERO, ONE], [ONE, ZERO]],
            PauliAxis::Y => [[ZERO, -I], [I, ZERO]],
            PauliAxis::Z => [[ONE, ZERO], [ZERO, -ONE]],
        }
    }

    /// Where the Pauli sends basis column `col` (given the site mask), and
    /// with which phase: `σ|col⟩ = phase |row⟩`.
    #[inline]
    fn action(self, mask: usize, col: usize) -> (usize, C64) {
        let up = col & mask == 0;
        match self {
            PauliAxis::X => (col ^ mask, ONE),
            PauliAxis::Y => (col ^ mask, if up { I } else { -I }),
            PauliAxis::Z => (col, if up { ONE } else { -ONE }),
        }
    }
}

impl fmt::Display for PauliAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PauliAxis::X => "x",
            PauliAxis::Y => "y",
            PauliAxis::Z => "z",
        })
    }
}

impl FromStr for PauliAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "x" => Ok(PauliAxis::X),
            "y" => Ok(PauliAxis::Y),
            "z" => Ok(PauliAxis::Z),
            other => Err(Error::InvalidParameter(format!("unknown Pauli axis '{other}'"))),
        }
    }
}

/// Measurement outcome sign of a two-valued observable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Self {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// `σ_site^axis · m` without forming the embedded operator.
pub fn pauli_left(site: SiteIndex, axis: PauliAxis, m: &CMatrix) -> CMatrix {
    let mask = site.mask();
    let (rows, cols) = m.shape();
    CMatrix::from_fn(rows, cols, |r, c| {
        // σ is an involution, so the column feeding row r is r's partner.
        let (k, _) = axis.action(mask, r);
        let (_, phase) = axis.action(mask, k);
        phase * m[(k, c)]
    })
}

/// `m · σ_site^axis` without forming the embedded operator.
pub fn pauli_right(site: SiteIndex, axis: PauliAxis, m: &CMatrix) -> CMatrix {
    let mask = site.mask();
    let (rows, cols) = m.shape();
    CMatrix::from_fn(rows, cols, |r, c| {
        let (k, phase) = axis.action(mask, c);
        m[(r, k)] * phase
    })
}

/// `Tr(σ_site^axis · m)` in `O(d)`.
pub fn pauli_trace(site: SiteIndex, axis: PauliAxis, m: &CMatrix) -> C64 {
    let mask = site.mask();
    (0..m.nrows())
        .map(|k| {
            let (row, phase) = axis.action(mask, k);
            phase * m[(k, row)]
        })
        .sum()
}

/// `Π m Π` with `Π = (1 ± σ)/2`.
pub fn project_both_sides(site: SiteIndex, axis: PauliAxis, sign: Sign, m: &CMatrix) -> CMatrix {
    let s = sign.value();
    let left = pauli_left(site, axis, m);
    let right = pauli_right(site, axis, m);
    let both = pauli_right(site, axis, &left);
    (m + left * C64::from(s) + right * C64::from(s) + both) * C64::from(0.25)
}

/// Largest entry of `M − M†`.
pub fn hermiticity_residual(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..n {
        for c in r..n {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// `Tr(a · b)` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for r in 0..n {
        for k in 0..n {
            acc += a[(r, k)] * b[(k, r)];
        }
    }
    acc
}

fn check_square(n_sites: usize, m: &CMatrix) -> Result<()> {
    let d = dim(n_sites);
    if m.nrows() != d || m.ncols() != d {
        return Err(Error::DimensionMismatch { expected: d, found: m.nrows().max(m.ncols()) });
    }
    Ok(())
}

/// Pure state of an N-qubit register.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_sites: usize,
    amplitudes: DVector<C64>,
}

impl StateVector {
    pub fn new(n_sites: usize, amplitudes: DVector<C64>) -> Result<Self> {
        check_register(n_sites)?;
        if amplitudes.len() != dim(n_sites) {
            return Err(Error::DimensionMismatch { expected: dim(n_sites), found: amplitudes.len() });
        }
        let norm = amplitudes.norm_squared();
        if (norm - 1.0).abs() > ALGEBRA_TOL {
            return Err(Error::InvalidState(format!("squared norm {norm} is not 1")));
        }
        Ok(Self { n_sites, amplitudes })
    }

    pub fn basis(n_sites: usize, index: usize) -> Result<Self> {
        check_register(n_sites)?;
        if index >= dim(n_sites) {
            return Err(Error::InvalidState(format!("basis index {index} out of range")));
        }
        let mut amplitudes = DVector::zeros(dim(n_sites));
        amplitudes[index] = ONE;
        Ok(Self { n_sites, amplitudes })
    }

    pub fn all_up(n_sites: usize) -> Result<Self> {
        Self::basis(n_sites, 0)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn to_density(&self) -> DensityOperator {
        let m = &self.amplitudes * self.amplitudes.adjoint();
        DensityOperator { n_sites: self.n_sites, matrix: m }
    }
}

/// Mixed or pure state `ρ`: Hermitian, unit trace, positive semidefinite.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityOperator {
    n_sites: usize,
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn from_matrix(n_sites: usize, matrix: CMatrix) -> Result<Self> {
        check_register(n_sites)?;
        check_square(n_sites, &matrix)?;
        let residual = hermiticity_residual(&matrix);
        if residual > ALGEBRA_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let trace = matrix.trace();
        if (trace - ONE).norm() > ALGEBRA_TOL {
            return Err(Error::InvalidState(format!("trace {trace} is not 1")));
        }
        let min_eig = matrix.clone().symmetric_eigenvalues().min();
        if min_eig < -SPECTRAL_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { n_sites, matrix })
    }

    /// Skips validation; for results of trace- and positivity-preserving maps.
    pub(crate) fn from_matrix_unchecked(n_sites: usize, matrix: CMatrix) -> Self {
        Self { n_sites, matrix }
    }

    /// `|↑⋯↑⟩⟨↑⋯↑|`.
    pub fn all_up(n_sites: usize) -> Result<Self> {
        Ok(StateVector::all_up(n_sites)?.to_density())
    }

    pub fn maximally_mixed(n_sites: usize) -> Result<Self> {
        check_register(n_sites)?;
        let d = dim(n_sites);
        let m = CMatrix::identity(d, d) * C64::from(1.0 / d as f64);
        Ok(Self { n_sites, matrix: m })
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

    pub fn purity(&self) -> f64 {
        trace_of_product(&self.matrix, &self.matrix).re
    }
}

impl From<&StateVector> for DensityOperator {
    fn from(psi: &StateVector) -> Self {
        psi.to_density()
    }
}

/// Dense operator on an N-qubit register. Hermiticity is checked when
/// claimed, never assumed.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    n_sites: usize,
    matrix: CMatrix,
    hermitian: bool,
}

impl Operator {
    pub fn new(n_sites: usize, matrix: CMatrix, hermitian: bool) -> Result<Self> {
        check_register(n_sites)?;
        check_square(n_sites, &matrix)?;
        if hermitian {
            let residual = hermiticity_residual(&matrix);
            if residual >= ALGEBRA_TOL {
                return Err(Error::NotHermitian { residual });
            }
        }
        Ok(Self { n_sites, matrix, hermitian })
    }

    pub(crate) fn from_parts(n_sites: usize, matrix: CMatrix, hermitian: bool) -> Self {
        Self { n_sites, matrix, hermitian }
    }

    pub fn identity(n_sites: usize) -> Result<Self> {
        check_register(n_sites)?;
        let d = dim(n_sites);
        Ok(Self { n_sites, matrix: CMatrix::identity(d, d), hermitian: true })
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

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn adjoint(&self) -> Operator {
        Self { n_sites: self.n_sites, matrix: self.matrix.adjoint(), hermitian: self.hermitian }
    }

    pub fn mul(&self, other: &Operator) -> Result<Operator> {
        if self.n_sites != other.n_sites {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: other.dim() });
        }
        Ok(Self::from_parts(self.n_sites, &self.matrix * &other.matrix, false))
    }

    pub fn commutator(&self, other: &Operator) -> Result<Operator> {
        let ab = self.mul(other)?;
        let ba = other.mul(self)?;
        Ok(Self::from_parts(self.n_sites, ab.matrix - ba.matrix, false))
    }
}

/// `I ⊗ … ⊗ σ^axis ⊗ … ⊗ I` with the Pauli at `site`.
pub fn embed_pauli(site: SiteIndex, axis: PauliAxis, n_sites: usize) -> Result<Operator> {
    check_register(n_sites)?;
    site.check(n_sites)?;
    let d = dim(n_sites);
    let mask = site.mask();
    let mut m = CMatrix::zeros(d, d);
    for col in 0..d {
        let (row, phase) = axis.action(mask, col);
        m[(row, col)] = phase;
    }
    Ok(Operator::from_parts(n_sites, m, true))
}

/// `(I ± σ_site^axis)/2`.
pub fn projector(site: SiteIndex, axis: PauliAxis, sign: Sign, n_sites: usize) -> Result<Operator> {
    let sigma = embed_pauli(site, axis, n_sites)?;
    let d = dim(n_sites);
    let m = (CMatrix::identity(d, d) + sigma.matrix * C64::from(sign.value())) * C64::from(0.5);
    Ok(Operator::from_parts(n_sites, m, true))
}

pub fn all_up_state(n_sites: usize) -> Result<DensityOperator> {
    DensityOperator::all_up(n_sites)
}

/// `Tr(ρ · obs)`.
pub fn expectation(state: &DensityOperator, obs: &Operator) -> Result<C64> {
    if state.n_sites != obs.n_sites {
        return Err(Error::DimensionMismatch { expected: state.dim(), found: obs.dim() });
    }
    Ok(trace_of_product(&state.matrix, &obs.matrix))
}
