//! Coefficient dependence structures.
//!
//! A scheme ties some coefficients of `V(x) = sum a_j cos(jx)` together. Every
//! scheme is described by an [`IndexMap`] sending each coefficient index to one
//! of `F` independent Gaussian free variables. Grouping the cosines by free
//! variable gives the [`EffectiveBasis`], an i.i.d. representation of the same
//! random function that the Kac-Rice engine consumes.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SchemeKind {
    Iid,
    PalindromicBlocks,
    #[serde(rename = "contiguous-blocks")]
    ContiguousEqualBlocks,
}

impl SchemeKind {
    pub fn name(self) -> &'static str {
        match self {
            SchemeKind::Iid => "iid",
            SchemeKind::PalindromicBlocks => "palindromic-blocks",
            SchemeKind::ContiguousEqualBlocks => "contiguous-blocks",
        }
    }

    pub fn is_block(self) -> bool {
        !matches!(self, SchemeKind::Iid)
    }
}

impl fmt::Display for SchemeKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SchemeKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "iid" => Ok(SchemeKind::Iid),
            "palindromic-blocks" => Ok(SchemeKind::PalindromicBlocks),
            "contiguous-blocks" => Ok(SchemeKind::ContiguousEqualBlocks),
            other => Err(Error::InvalidParameter(format!(
                "unknown scheme `{other}` (expected iid, palindromic-blocks or contiguous-blocks)"
            ))),
        }
    }
}

/// Which dependence structure generates the coefficient vector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoefficientScheme {
    pub kind: SchemeKind,
    /// Block length; ignored for [`SchemeKind::Iid`].
    pub ell: usize,
    pub sigma: f64,
}

impl CoefficientScheme {
    pub fn iid() -> Self {
        Self { kind: SchemeKind::Iid, ell: 1, sigma: 1.0 }
    }

    pub fn palindromic(ell: usize) -> Self {
        Self { kind: SchemeKind::PalindromicBlocks, ell, sigma: 1.0 }
    }

    pub fn contiguous(ell: usize) -> Self {
        Self { kind: SchemeKind::ContiguousEqualBlocks, ell, sigma: 1.0 }
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.ell == 0 {
            return Err(Error::InvalidParameter("block length must be >= 1".into()));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!("sigma must be positive and finite, got {}", self.sigma)));
        }
        Ok(())
    }

    /// Block length as reported in outputs (0 for i.i.d.).
    pub fn reported_ell(&self) -> usize {
        if self.kind.is_block() {
            self.ell
        } else {
            0
        }
    }
}

/// The arithmetic skeleton `n = 2*ell*m + r` of a palindromic block layout.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockDecomposition {
    pub n: usize,
    pub ell: usize,
    pub m: usize,
    /// Remainder in `-1..=2*ell-2`.
    pub r: i64,
    /// Indices `ell*m ..= ell*m + r` of the middle block; empty when `r = -1`.
    pub tilde_indices: Vec<usize>,
}

impl BlockDecomposition {
    /// Coefficient indices of block `j` (`0 <= j < 2m`) in the palindromic layout.
    pub fn block_indices(&self, j: usize) -> std::ops::Range<usize> {
        let start = if j < self.m { self.ell * j } else { (self.ell as i64 * j as i64 + self.r + 1) as usize };
        start..start + self.ell
    }

    /// Number of independent variables, `ell*m + r + 1`.
    pub fn free_count(&self) -> usize {
        (self.ell as i64 * self.m as i64 + self.r + 1) as usize
    }
}

/// Splits `n = 2*ell*m + r` with `r` in `{-1, ..., 2*ell - 2}` and `m >= 1`.
pub fn decompose(n: usize, ell: usize) -> Result<BlockDecomposition> {
    if ell == 0 {
        return Err(Error::InvalidParameter("block length must be >= 1".into()));
    }
    if n == 0 || n + 1 < 2 * ell {
        return Err(Error::DegreeTooSmall { n, ell });
    }
    let m = (n + 1) / (2 * ell);
    let r = n as i64 - (2 * ell * m) as i64;
    let tilde_indices = (ell * m..ell * m + (r + 1) as usize).collect();
    Ok(BlockDecomposition { n, ell, m, r, tilde_indices })
}

/// Assignment of coefficient indices to free Gaussian variables.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IndexMap {
    pub assignment: Vec<usize>,
    pub free_count: usize,
}

impl IndexMap {
    /// Builds a map from tie pairs; ids are numbered by smallest covered index.
    fn from_ties(len: usize, ties: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut rep: Vec<usize> = (0..len).collect();
        for (a, b) in ties {
            let (lo, hi) = if a < b { (a, b) } else { (b, a) };
            rep[hi] = rep[lo].min(rep[hi]);
        }
        let mut id_of_rep = vec![usize::MAX; len];
        let mut assignment = Vec::with_capacity(len);
        let mut next = 0;
        for &root in &rep {
            if id_of_rep[root] == usize::MAX {
                id_of_rep[root] = next;
                next += 1;
            }
            assignment.push(id_of_rep[root]);
        }
        IndexMap { assignment, free_count: next }
    }

    pub fn degree(&self) -> usize {
        self.assignment.len() - 1
    }

    /// Expands free values into the full coefficient vector.
    pub fn expand(&self, free: &[f64]) -> Vec<f64> {
        self.assignment.iter().map(|&id| free[id]).collect()
    }
}

/// Builds the tying map of `scheme` for degree `n`.
pub fn index_map(scheme: &CoefficientScheme, n: usize) -> Result<IndexMap> {
    scheme.validate()?;
    let len = n + 1;
    match scheme.kind {
        SchemeKind::Iid => Ok(IndexMap::from_ties(len, std::iter::empty())),
        SchemeKind::PalindromicBlocks => {
            let d = decompose(n, scheme.ell)?;
            let ties = (0..d.m).flat_map(|j| {
                let mirror = d.block_indices(2 * d.m - 1 - j).start;
                (0..d.ell).map(move |k| (d.ell * j + k, mirror + k))
            });
            Ok(IndexMap::from_ties(len, ties.collect::<Vec<_>>()))
        }
        SchemeKind::ContiguousEqualBlocks => {
            let d = decompose(n, scheme.ell)?;
            let ell = d.ell;
            let ties = (0..d.m).flat_map(|j| (0..ell).map(move |k| (2 * ell * j + k, 2 * ell * j + ell + k)));
            Ok(IndexMap::from_ties(len, ties.collect::<Vec<_>>()))
        }
    }
}

/// One combined basis function per free variable, stored as its cosine frequencies.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EffectiveBasis {
    pub functions: Vec<Vec<usize>>,
    pub sigma: f64,
}

impl EffectiveBasis {
    pub fn from_index_map(map: &IndexMap, sigma: f64) -> Self {
        let mut functions = vec![Vec::new(); map.free_count];
        for (j, &id) in map.assignment.iter().enumerate() {
            functions[id].push(j);
        }
        EffectiveBasis { functions, sigma }
    }

    /// A basis of independent functions, each a single cosine.
    pub fn single_frequencies(freqs: &[usize], sigma: f64) -> Self {
        EffectiveBasis { functions: freqs.iter().map(|&f| vec![f]).collect(), sigma }
    }

    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    pub fn max_frequency(&self) -> usize {
        self.functions.iter().flatten().copied().max().unwrap_or(0)
    }

    pub fn with_sigma(mut self, sigma: f64) -> Self {
        self.sigma = sigma;
        self
    }
}

pub fn effective_basis(scheme: &CoefficientScheme, n: usize) -> Result<EffectiveBasis> {
    let map = index_map(scheme, n)?;
    Ok(EffectiveBasis::from_index_map(&map, scheme.sigma))
}

/// SplitMix64 finalizer.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-trial stream seed: `splitmix64(master ^ splitmix64(trial))`.
pub fn trial_seed(master_seed: u64, trial: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(trial))
}

/// Reusable coefficient generator for one `(scheme, n)` pair.
#[derive(Debug, Clone)]
pub struct CoefficientSampler {
    map: IndexMap,
    sigma: f64,
}

impl CoefficientSampler {
    pub fn new(scheme: &CoefficientScheme, n: usize) -> Result<Self> {
        Ok(Self { map: index_map(scheme, n)?, sigma: scheme.sigma })
    }

    pub fn index_map(&self) -> &IndexMap {
        &self.map
    }

    pub fn sample(&self, master_seed: u64, trial: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(trial_seed(master_seed, trial));
        let free: Vec<f64> = (0..self.map.free_count)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                self.sigma * z
            })
            .collect();
        self.map.expand(&free)
    }
}

/// Draws the coefficient vector of trial `trial`; identical inputs give identical bits.
pub fn sample_coefficients(scheme: &CoefficientScheme, n: usize, master_seed: u64, trial: u64) -> Result<Vec<f64>> {
    Ok(CoefficientSampler::new(scheme, n)?.sample(master_seed, trial))
}
