//! Photon-number configurations.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Photon number in each of `m` modes.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FockConfig(Vec<usize>);

impl FockConfig {
    pub fn new(occupations: Vec<usize>) -> Result<Self> {
        if occupations.is_empty() {
            return Err(Error::NoModes);
        }
        Ok(Self(occupations))
    }

    /// One photon in each of the first `n` of `m` modes.
    pub fn first_modes(n: usize, m: usize) -> Result<Self> {
        if n > m {
            return Err(Error::InvalidInput(format!("{n} photons do not fit in {m} modes")));
        }
        Self::new((0..m).map(|i| usize::from(i < n)).collect())
    }

    pub fn from_modes(modes: &[usize], m: usize) -> Result<Self> {
        let mut occ = vec![0; m];
        for &mode in modes {
            if mode >= m {
                return Err(Error::ModeOutOfRange { index: mode, n_modes: m });
            }
            occ[mode] += 1;
        }
        Self::new(occ)
    }

    pub fn occupations(&self) -> &[usize] {
        &self.0
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn is_collision_free(&self) -> bool {
        self.0.iter().all(|&c| c <= 1)
    }

    /// Mode index of every photon, repeated by occupation.
    pub fn photon_modes(&self) -> Vec<usize> {
        self.0
            .iter()
            .enumerate()
            .flat_map(|(mode, &count)| std::iter::repeat_n(mode, count))
            .collect()
    }

    /// `prod_j t_j!`.
    pub fn multiplicity(&self) -> f64 {
        self.0
            .iter()
            .map(|&c| (1..=c).map(|v| v as f64).product::<f64>())
            .product()
    }
}

/// All configurations of `n` photons in `m` modes, in lexicographically
/// decreasing order of occupations.
pub fn configurations(n: usize, m: usize) -> Vec<FockConfig> {
    fn fill(mode: usize, left: usize, current: &mut Vec<usize>, out: &mut Vec<FockConfig>) {
        let m = current.len();
        if mode == m - 1 {
            current[mode] = left;
            out.push(FockConfig(current.clone()));
            return;
        }
        for c in (0..=left).rev() {
            current[mode] = c;
            fill(mode + 1, left - c, current, out);
        }
    }
    if m == 0 {
        return Vec::new();
    }
    let mut out = Vec::new();
    fill(0, n, &mut vec![0; m], &mut out);
    out
}
