//! Exact output distributions of linear interferometers fed with single
//! photons.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{ensure_unitary, CMatrix};

use super::fock::{configurations, FockConfig};
use super::permanent::permanent;

/// Largest photon number handled exactly.
pub const MAX_PHOTONS: usize = 5;
/// Largest mode count handled exactly.
pub const MAX_MODES: usize = 16;

const UNITARITY_TOLERANCE: f64 = 1e-10;

/// A probability for every `n`-photon output configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    m: usize,
    n: usize,
    probabilities: BTreeMap<FockConfig, f64>,
    success_mass: f64,
}

#[derive(Serialize, Deserialize)]
struct Entry {
    occ: FockConfig,
    p: f64,
}

#[derive(Serialize, Deserialize)]
struct DistributionJson {
    m: usize,
    n: usize,
    entries: Vec<Entry>,
    success_mass: f64,
}

impl Distribution {
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Probability that all `n` photons were detected; `1` for lossless
    /// distributions.
    pub fn success_mass(&self) -> f64 {
        self.success_mass
    }

    pub fn probability(&self, occ: &FockConfig) -> f64 {
        self.probabilities.get(occ).copied().unwrap_or(0.0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&FockConfig, f64)> {
        self.probabilities.iter().map(|(c, &p)| (c, p))
    }

    pub fn len(&self) -> usize {
        self.probabilities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probabilities.is_empty()
    }

    pub fn total_mass(&self) -> f64 {
        self.probabilities.values().sum()
    }

    /// Mass on outputs with at most one photon per mode.
    pub fn collision_free_mass(&self) -> f64 {
        self.iter().filter(|(c, _)| c.is_collision_free()).map(|(_, p)| p).sum()
    }

    /// Total-variation distance over the union of supports.
    pub fn tv_distance(&self, other: &Distribution) -> f64 {
        let mut keys: Vec<&FockConfig> = self.probabilities.keys().collect();
        keys.extend(other.probabilities.keys().filter(|k| !self.probabilities.contains_key(*k)));
        0.5 * keys
            .into_iter()
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .sum::<f64>()
    }

    /// Largest pointwise difference over the union of supports.
    pub fn max_deviation(&self, other: &Distribution) -> f64 {
        self.probabilities
            .keys()
            .chain(other.probabilities.keys())
            .map(|k| (self.probability(k) - other.probability(k)).abs())
            .fold(0.0, f64::max)
    }

    /// Normalised histogram of observed configurations.
    pub fn empirical(m: usize, n: usize, counts: &BTreeMap<FockConfig, u64>) -> Self {
        let total: u64 = counts.values().sum();
        let probabilities = counts
            .iter()
            .map(|(c, &k)| (c.clone(), if total == 0 { 0.0 } else { k as f64 / total as f64 }))
            .collect();
        Self {
            m,
            n,
            probabilities,
            success_mass: 1.0,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_json_value())?)
    }

    pub fn to_json_value(&self) -> serde_json::Value {
        let raw = DistributionJson {
            m: self.m,
            n: self.n,
            entries: self
                .iter()
                .map(|(occ, p)| Entry { occ: occ.clone(), p })
                .collect(),
            success_mass: self.success_mass,
        };
        serde_json::to_value(raw).expect("distribution serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: DistributionJson = serde_json::from_str(text)?;
        let mut probabilities = BTreeMap::new();
        for e in raw.entries {
            if e.occ.m() != raw.m || e.occ.total() != raw.n {
                return Err(Error::InvalidInput(format!("entry {:?} does not match m, n", e.occ)));
            }
            probabilities.insert(e.occ, e.p);
        }
        Ok(Self {
            m: raw.m,
            n: raw.n,
            probabilities,
            success_mass: raw.success_mass,
        })
    }
}

/// Validates `u` and a collision-free `input` against the exact-enumeration caps.
pub(crate) fn check_instance(u: &CMatrix, input: &FockConfig) -> Result<usize> {
    ensure_unitary(u, UNITARITY_TOLERANCE)?;
    let m = u.nrows();
    if input.m() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            found: input.m(),
        });
    }
    if !input.is_collision_free() {
        return Err(Error::InvalidInput("input must hold at most one photon per mode".into()));
    }
    let n = input.total();
    if n > MAX_PHOTONS {
        return Err(Error::ScaleCap {
            what: "photons",
            cap: MAX_PHOTONS,
            got: n,
        });
    }
    if m > MAX_MODES {
        return Err(Error::ScaleCap {
            what: "modes",
            cap: MAX_MODES,
            got: m,
        });
    }
    Ok(n)
}

/// `|Perm(U_{T,S})|^2 / prod_j t_j!` for input modes `S`, output `T`.
pub(crate) fn transition_probability(u: &CMatrix, input_modes: &[usize], output: &FockConfig) -> Result<f64> {
    let rows = output.photon_modes();
    let sub = CMatrix::from_fn(rows.len(), input_modes.len(), |i, j| u[(rows[i], input_modes[j])]);
    let perm: Complex64 = permanent(&sub)?;
    Ok(perm.norm_sqr() / output.multiplicity())
}

/// Exact output distribution with no loss. `u[(out, in)]` is the amplitude
/// for a photon entering `in` to leave through `out`.
pub fn lossless_distribution(u: &CMatrix, input: &FockConfig) -> Result<Distribution> {
    let n = check_instance(u, input)?;
    let m = u.nrows();
    let modes = input.photon_modes();
    let mut probabilities = BTreeMap::new();
    for out in configurations(n, m) {
        let p = transition_probability(u, &modes, &out)?;
        probabilities.insert(out, p);
    }
    Ok(Distribution {
        m,
        n,
        probabilities,
        success_mass: 1.0,
    })
}

/// Exact distribution conditioned on detecting all `n` photons when every
/// mode suffers loss `gamma_eff`.
///
/// The loss is dilated into `m` environment modes: each input mode first
/// meets a beamsplitter of transmissivity `gamma_eff` with its own
/// environment mode, then the system modes pass through `u`. All `n`-photon
/// outputs of the `2m`-mode network are enumerated; the success mass is the
/// weight of outputs with an empty environment.
pub fn postselected_distribution(u: &CMatrix, input: &FockConfig, gamma_eff: f64) -> Result<Distribution> {
    let n = check_instance(u, input)?;
    if !(gamma_eff > 0.0 && gamma_eff <= 1.0) {
        return Err(Error::InvalidEfficiency(gamma_eff));
    }
    let m = u.nrows();
    let t = gamma_eff.sqrt();
    let l = (1.0 - gamma_eff).sqrt();
    let mut loss = CMatrix::zeros(2 * m, 2 * m);
    for i in 0..m {
        loss[(i, i)] = Complex64::new(t, 0.0);
        loss[(i, m + i)] = Complex64::new(-l, 0.0);
        loss[(m + i, i)] = Complex64::new(l, 0.0);
        loss[(m + i, m + i)] = Complex64::new(t, 0.0);
    }
    let mut interferometer = CMatrix::identity(2 * m, 2 * m);
    interferometer.view_mut((0, 0), (m, m)).copy_from(u);
    let dilated = interferometer * loss;

    let modes = input.photon_modes();
    let mut probabilities = BTreeMap::new();
    let mut success_mass = 0.0;
    let mut total = 0.0;
    for out in configurations(n, 2 * m) {
        let p = transition_probability(&dilated, &modes, &out)?;
        total += p;
        let occ = out.occupations();
        if occ[m..].iter().all(|&c| c == 0) {
            success_mass += p;
            probabilities.insert(FockConfig::new(occ[..m].to_vec())?, p);
        }
    }
    debug_assert!((total - 1.0).abs() < 1e-9);
    if success_mass > 0.0 {
        for p in probabilities.values_mut() {
            *p /= success_mass;
        }
    }
    Ok(Distribution {
        m,
        n,
        probabilities,
        success_mass,
    })
}
