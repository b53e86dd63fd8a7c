//! The two ancilla-free measurement protocols.
//!
//! Projective branch: measure `σ_j^b`, evolve `+t`, measure `σ_i^a`, evolve
//! `−t`, measure `σ_j^b`, evolve `+t`, measure `σ_i^a`. The sixteen joint
//! outcome probabilities give the signed correlation `𝒞(t)`, and
//! `2𝒞(t) − 1 = Re C(t)` exactly, measurement backaction included.
//!
//! Rotation branch: the measurements at steps two to four are replaced by
//! rotations `R(θ) = exp(−iσθ/2)` and only the final `σ_i^a` is measured.
//! Four sign patterns of `(θ₁, θ₂, θ₃)` combine to
//! `4 sin θ₂ sin(θ₁ + θ₃/2) sin(θ₃/2) · Im C(t)`.

use std::f64::consts::FRAC_PI_2;
use std::fmt;

use num_complex::Complex64 as C64;

use crate::dynamics::{conjugate, Propagator};
use crate::error::{Error, Result};
use crate::hilbert::{
    dim, embed_pauli, pauli_left, pauli_right, pauli_trace, project_both_sides, CMatrix,
    DensityOperator, Operator, PauliAxis, Sign, SiteIndex,
};
use crate::otoc::{check_inputs, OtocSpec};

/// Branches whose parent probability falls below this are dropped with joint
/// probability zero; the conditional state is never formed.
pub const BRANCH_CUTOFF: f64 = 1e-14;
/// Per-entry slack before a probability is rejected rather than clamped.
pub const ENTRY_TOL: f64 = 1e-12;
/// Allowed deviation of the table sum from one.
pub const NORM_TOL: f64 = 1e-10;
/// Smallest usable `|4 sin θ₂ sin(θ₁ + θ₃/2) sin(θ₃/2)|`.
pub const PREFACTOR_GUARD: f64 = 1e-6;

/// Outcomes `(o₁, o₂, o₃, o₄)` of the four projective measurements.
///
/// Index encoding: bit `k` of [`OutcomeSequence::index`] is set when
/// `o_{k+1} = −1`, so `(++++)` is 0 and `(−−−−)` is 15.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct OutcomeSequence(pub [Sign; 4]);

impl OutcomeSequence {
    pub const COUNT: usize = 16;

    pub fn from_index(index: usize) -> Self {
        assert!(index < Self::COUNT);
        let sign = |k: usize| if index >> k & 1 == 0 { Sign::Plus } else { Sign::Minus };
        Self([sign(0), sign(1), sign(2), sign(3)])
    }

    pub fn index(self) -> usize {
        self.0
            .iter()
            .enumerate()
            .map(|(k, s)| usize::from(*s == Sign::Minus) << k)
            .sum()
    }

    /// `o₁ o₂ o₃ o₄`.
    pub fn parity(self) -> f64 {
        self.0.iter().map(|s| s.value()).product()
    }

    pub fn all() -> impl Iterator<Item = OutcomeSequence> {
        (0..Self::COUNT).map(Self::from_index)
    }
}

impl fmt::Display for OutcomeSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for s in self.0 {
            f.write_str(if s == Sign::Plus { "+" } else { "-" })?;
        }
        Ok(())
    }
}

/// Joint probabilities `P_{o₁o₂o₃o₄}`, indexed by [`OutcomeSequence::index`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProbabilityTable {
    probs: [f64; 16],
}

impl ProbabilityTable {
    /// Validates and clamps entries to `[0, 1]`.
    pub fn new(probs: [f64; 16]) -> Result<Self> {
        let sum: f64 = probs.iter().sum();
        let entries_ok = probs.iter().all(|p| p.is_finite() && *p >= -ENTRY_TOL && *p <= 1.0 + ENTRY_TOL);
        if !entries_ok || (sum - 1.0).abs() > NORM_TOL {
            return Err(Error::UnnormalizedTable { sum });
        }
        Ok(Self { probs: probs.map(|p| p.clamp(0.0, 1.0)) })
    }

    pub fn uniform() -> Self {
        Self { probs: [1.0 / 16.0; 16] }
    }

    /// All weight on one sequence.
    pub fn certain(seq: OutcomeSequence) -> Self {
        let mut probs = [0.0; 16];
        probs[seq.index()] = 1.0;
        Self { probs }
    }

    pub fn get(&self, seq: OutcomeSequence) -> f64 {
        self.probs[seq.index()]
    }

    pub fn probabilities(&self) -> &[f64; 16] {
        &self.probs
    }

    pub fn iter(&self) -> impl Iterator<Item = (OutcomeSequence, f64)> + '_ {
        self.probs.iter().enumerate().map(|(k, p)| (OutcomeSequence::from_index(k), *p))
    }

    /// The table with every outcome sign flipped.
    pub fn flipped(&self) -> Self {
        let mut probs = [0.0; 16];
        for (k, p) in self.probs.iter().enumerate() {
            probs[k ^ 0b1111] = *p;
        }
        Self { probs }
    }
}

/// `𝒞 = Σ o₁o₂o₃o₄ P_{o₁o₂o₃o₄}`.
pub fn corr_from_table(table: &ProbabilityTable) -> Result<f64> {
    let sum: f64 = table.probs.iter().sum();
    if (sum - 1.0).abs() > NORM_TOL {
        return Err(Error::UnnormalizedTable { sum });
    }
    Ok(table.iter().map(|(seq, p)| seq.parity() * p).sum())
}

/// Exact joint outcome probabilities of the projective protocol, following
/// the conditional chain `P = P_{o₁} P_{o₂|o₁} P_{o₃|o₁o₂} P_{o₄|o₁o₂o₃}`
/// with explicit post-measurement states.
pub fn outcome_probabilities(
    rho: &DensityOperator,
    spec: &OtocSpec,
    prop: &Propagator,
    t: f64,
) -> Result<ProbabilityTable> {
    check_inputs(rho, spec, prop)?;
    let forward = prop.unitary(t);
    let backward = forward.adjoint();

    // (site, axis, evolution applied after the measurement) for steps 1–3.
    let steps: [(SiteIndex, PauliAxis, &CMatrix); 3] =
        [(spec.j, spec.b, &forward), (spec.i, spec.a, &backward), (spec.j, spec.b, &forward)];

    let mut probs = [0.0; 16];
    branch(rho.matrix(), 0, 1.0, 0, &steps, spec, &mut probs);
    ProbabilityTable::new(probs)
}

fn branch(
    state: &CMatrix,
    depth: usize,
    joint: f64,
    index: usize,
    steps: &[(SiteIndex, PauliAxis, &CMatrix); 3],
    spec: &OtocSpec,
    probs: &mut [f64; 16],
) {
    if depth == 3 {
        let sigma = pauli_trace(spec.i, spec.a, state).re;
        for sign in Sign::BOTH {
            let p = 0.5 * (1.0 + sign.value() * sigma);
            let bit = usize::from(sign == Sign::Minus) << depth;
            probs[index | bit] = joint * p.clamp(0.0, 1.0);
        }
        return;
    }
    let (site, axis, evolution) = steps[depth];
    let sigma = pauli_trace(site, axis, state).re;
    for sign in Sign::BOTH {
        let p = 0.5 * (1.0 + sign.value() * sigma);
        if p < BRANCH_CUTOFF {
            // Descendants keep their initial zero.
            continue;
        }
        let collapsed = project_both_sides(site, axis, sign, state) / C64::from(p);
        let next = conjugate(evolution, &collapsed);
        let bit = usize::from(sign == Sign::Minus) << depth;
        branch(&next, depth + 1, joint * p, index | bit, steps, spec, probs);
    }
}

/// `2𝒞(t) − 1`, equal to `Re C(t)`.
pub fn re_otoc_via_protocol(rho: &DensityOperator, spec: &OtocSpec, prop: &Propagator, t: f64) -> Result<f64> {
    let table = outcome_probabilities(rho, spec, prop, t)?;
    Ok(2.0 * corr_from_table(&table)? - 1.0)
}

/// Rotation angles `(θ₁, θ₂, θ₃)` in radians.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RotationAngles {
    pub theta1: f64,
    pub theta2: f64,
    pub theta3: f64,
}

impl Default for RotationAngles {
    /// `θ₁ = θ₂ = θ₃ = π/2`, where the prefactor is 2.
    fn default() -> Self {
        Self::new(FRAC_PI_2, FRAC_PI_2, FRAC_PI_2)
    }
}

impl RotationAngles {
    pub const fn new(theta1: f64, theta2: f64, theta3: f64) -> Self {
        Self { theta1, theta2, theta3 }
    }

    pub fn validate(&self) -> Result<()> {
        if [self.theta1, self.theta2, self.theta3].iter().all(|x| x.is_finite()) {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("non-finite rotation angles {self:?}")))
        }
    }

    pub fn negated(&self) -> Self {
        Self::new(-self.theta1, -self.theta2, -self.theta3)
    }

    /// `4 sin θ₂ sin(θ₁ + θ₃/2) sin(θ₃/2)`.
    pub fn prefactor(&self) -> f64 {
        4.0 * self.theta2.sin() * (self.theta1 + 0.5 * self.theta3).sin() * (0.5 * self.theta3).sin()
    }

    /// The four angle sets and the signs they enter the combination with:
    /// `+⟨σ⟩(−θ₁,−θ₂,−θ₃) − ⟨σ⟩(θ₁,θ₂,θ₃) − ⟨σ⟩(−θ₁,θ₂,−θ₃) + ⟨σ⟩(θ₁,−θ₂,θ₃)`.
    pub fn variants(&self) -> [(RotationAngles, f64); 4] {
        let Self { theta1: a, theta2: b, theta3: c } = *self;
        [
            (Self::new(-a, -b, -c), 1.0),
            (Self::new(a, b, c), -1.0),
            (Self::new(-a, b, -c), -1.0),
            (Self::new(a, -b, c), 1.0),
        ]
    }

    fn checked_prefactor(&self) -> Result<f64> {
        self.validate()?;
        let prefactor = self.prefactor();
        if prefactor.abs() <= PREFACTOR_GUARD {
            return Err(Error::DegenerateAngles { prefactor });
        }
        Ok(prefactor)
    }
}

/// `R = exp(−iσθ/2) = cos(θ/2) − i sin(θ/2) σ`.
pub fn rotation_operator(site: SiteIndex, axis: PauliAxis, theta: f64, n_sites: usize) -> Result<Operator> {
    let sigma = embed_pauli(site, axis, n_sites)?;
    let d = dim(n_sites);
    let (s, c) = (0.5 * theta).sin_cos();
    let m = CMatrix::identity(d, d) * C64::from(c) - sigma.matrix() * C64::new(0.0, s);
    Ok(Operator::from_parts(n_sites, m, false))
}

/// `R ρ R†` for a single-site rotation, applied through the Pauli action.
fn rotate(site: SiteIndex, axis: PauliAxis, theta: f64, m: &CMatrix) -> CMatrix {
    let (s, c) = (0.5 * theta).sin_cos();
    let left = pauli_left(site, axis, m);
    let right = pauli_right(site, axis, m);
    let both = pauli_right(site, axis, &left);
    // (c − isσ) m (c + isσ) = c² m + ics (mσ − σm) + s² σmσ
    m * C64::from(c * c) + (right - left) * C64::new(0.0, c * s) + both * C64::from(s * s)
}

fn rotated_expectation_with(
    rho: &DensityOperator,
    spec: &OtocSpec,
    forward: &CMatrix,
    angles: &RotationAngles,
) -> f64 {
    let backward = forward.adjoint();
    let mut state = rotate(spec.j, spec.b, angles.theta1, rho.matrix());
    state = conjugate(forward, &state);
    state = rotate(spec.i, spec.a, angles.theta2, &state);
    state = conjugate(&backward, &state);
    state = rotate(spec.j, spec.b, angles.theta3, &state);
    state = conjugate(forward, &state);
    pauli_trace(spec.i, spec.a, &state).re
}

/// `Tr[ℛ ρ ℛ† σ_i^a]` with
/// `ℛ = e^{−iHt} R_j^b(θ₃) e^{iHt} R_i^a(θ₂) e^{−iHt} R_j^b(θ₁)`.
pub fn rotated_expectation(
    rho: &DensityOperator,
    spec: &OtocSpec,
    prop: &Propagator,
    t: f64,
    angles: &RotationAngles,
) -> Result<f64> {
    check_inputs(rho, spec, prop)?;
    angles.validate()?;
    Ok(rotated_expectation_with(rho, spec, &prop.unitary(t), angles))
}

/// `⟨σ_i^a⟩` for the four angle sets of [`RotationAngles::variants`], in order.
pub fn rotated_expectations(
    rho: &DensityOperator,
    spec: &OtocSpec,
    prop: &Propagator,
    t: f64,
    angles: &RotationAngles,
) -> Result<[f64; 4]> {
    check_inputs(rho, spec, prop)?;
    angles.validate()?;
    let forward = prop.unitary(t);
    Ok(angles.variants().map(|(set, _)| rotated_expectation_with(rho, spec, &forward, &set)))
}

/// Combines four expectations, ordered as in [`RotationAngles::variants`],
/// into `Im C`.
pub fn combine_rotated(expectations: &[f64; 4], angles: &RotationAngles) -> Result<f64> {
    let prefactor = angles.checked_prefactor()?;
    let combination: f64 = angles
        .variants()
        .iter()
        .zip(expectations)
        .map(|((_, sign), value)| sign * value)
        .sum();
    Ok(combination / prefactor)
}

pub fn im_otoc_via_protocol(
    rho: &DensityOperator,
    spec: &OtocSpec,
    prop: &Propagator,
    t: f64,
    angles: &RotationAngles,
) -> Result<f64> {
    angles.checked_prefactor()?;
    let values = rotated_expectations(rho, spec, prop, t, angles)?;
    combine_rotated(&values, angles)
}
