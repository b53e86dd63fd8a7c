//! Randomized identity suite: both measurement protocols and the
//! squared-commutator relation against the direct correlator.

use rand::Rng;
use rayon::prelude::*;

use otoc_sim::dynamics::Propagator;
use otoc_sim::otoc::{commutator_norm, otoc_direct};
use otoc_sim::protocol::{im_otoc_via_protocol, re_otoc_via_protocol};
use otoc_sim::random::{axis_pairs, random_angles, random_density, random_hamiltonian, random_spec};
use otoc_sim::sampling::substream;

/// Family of random instances.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SuiteParams {
    pub n_instances: usize,
    pub seed: u64,
    pub min_sites: usize,
    pub max_sites: usize,
    pub max_norm: f64,
    pub t_max: f64,
    pub min_prefactor: f64,
}

impl Default for SuiteParams {
    fn default() -> Self {
        Self {
            n_instances: 200,
            seed: 2017,
            min_sites: 2,
            max_sites: 5,
            max_norm: 4.0,
            t_max: 5.0,
            min_prefactor: 0.1,
        }
    }
}

/// Largest residuals seen over the suite.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct SuiteReport {
    pub n_instances: usize,
    /// `|2𝒞 − 1 − Re C|`.
    pub re: f64,
    /// `|Im C (rotation protocol) − Im C|`.
    pub im: f64,
    /// `|Re C − 1 + Tr(ρ K†K)/2|` with `K = [W(t), V]`.
    pub commutator: f64,
}

impl SuiteReport {
    pub fn max(&self) -> f64 {
        self.re.max(self.im).max(self.commutator)
    }

    fn merge(self, other: Self) -> Self {
        Self {
            n_instances: self.n_instances + other.n_instances,
            re: self.re.max(other.re),
            im: self.im.max(other.im),
            commutator: self.commutator.max(other.commutator),
        }
    }
}

/// Instance `k` draws from its own ChaCha stream, so the report does not
/// depend on scheduling. Axis pairs cycle through all nine combinations.
pub fn run_suite(params: &SuiteParams) -> Result<SuiteReport, otoc_sim::Error> {
    let pairs: Vec<_> = axis_pairs().collect();
    (0..params.n_instances)
        .into_par_iter()
        .map(|k| {
            let mut rng = substream(params.seed, 0, k as u64);
            let n = rng.random_range(params.min_sites..=params.max_sites);
            let h = random_hamiltonian(n, params.max_norm, &mut rng);
            let rho = random_density(n, &mut rng);
            let (a, b) = pairs[k % pairs.len()];
            let spec = random_spec(n, a, b, &mut rng);
            let t = rng.random_range(0.0..=params.t_max);
            let angles = random_angles(params.min_prefactor, &mut rng);

            let prop = Propagator::new(&h);
            let c = otoc_direct(&rho, &spec, &prop, t)?;
            let re = (re_otoc_via_protocol(&rho, &spec, &prop, t)? - c.re).abs();
            let im = (im_otoc_via_protocol(&rho, &spec, &prop, t, &angles)? - c.im).abs();
            let commutator = (c.re - 1.0 + 0.5 * commutator_norm(&rho, &spec, &prop, t)?).abs();
            Ok(SuiteReport { n_instances: 1, re, im, commutator })
        })
        .try_reduce(SuiteReport::default, |x, y| Ok(x.merge(y)))
}
