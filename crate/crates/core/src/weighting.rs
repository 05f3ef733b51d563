//! Power-law discrimination weights.
//!
//! Each included asset gets a weight proportional to `V^(-alpha)`, normalized
//! to sum to one over the included assets. Positive alpha tilts the portfolio
//! away from heavily searched assets, negative alpha toward them, and zero
//! gives the uniform portfolio.

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::timeseries::{AssetId, Universe, WeekId};

/// Strength of the tilt against search popularity.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct DiscriminationParam<T>(T);

impl<T: Scalar> DiscriminationParam<T> {
    pub fn new(alpha: T) -> Result<Self> {
        if alpha.is_finite() {
            Ok(Self(alpha))
        } else {
            Err(Error::InvalidParameter(format!(
                "alpha must be finite, got {alpha}"
            )))
        }
    }

    pub fn uniform() -> Self {
        Self(T::zero())
    }

    pub fn value(self) -> T {
        self.0
    }
}

/// Portfolio weights for one rebalance.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector<T> {
    week: WeekId,
    assets: Universe,
    weights: Vec<T>,
    excluded: Vec<bool>,
}

impl<T: Scalar> WeightVector<T> {
    /// Full weight on the first asset of a one-asset universe.
    pub fn single(week: WeekId, assets: Universe) -> Result<Self> {
        if assets.len() != 1 {
            return Err(Error::InvalidParameter(format!(
                "single-asset weights need one asset, got {}",
                assets.len()
            )));
        }
        Ok(Self {
            week,
            assets,
            weights: vec![T::one()],
            excluded: vec![false],
        })
    }

    /// Week whose volumes produced these weights.
    pub fn week(&self) -> WeekId {
        self.week
    }

    pub fn assets(&self) -> &Universe {
        &self.assets
    }

    /// Weights aligned with `assets()`; excluded assets hold exactly zero.
    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn excluded(&self) -> &[bool] {
        &self.excluded
    }

    pub fn get(&self, asset: &AssetId) -> Option<T> {
        self.assets
            .iter()
            .position(|a| a == asset)
            .map(|i| self.weights[i])
    }

    pub fn is_excluded(&self, asset: &AssetId) -> bool {
        self.assets
            .iter()
            .position(|a| a == asset)
            .is_some_and(|i| self.excluded[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&AssetId, T)> + '_ {
        self.assets.iter().zip(self.weights.iter().copied())
    }

    pub fn included_count(&self) -> usize {
        self.excluded.iter().filter(|x| !**x).count()
    }
}

/// Power-law weights for one week's volume cross-section.
///
/// `volumes` and `excluded` are aligned with `assets`. Weights are evaluated
/// as `exp(-alpha * ln V)` shifted by the largest exponent, which keeps every
/// term in `(0, 1]` for any alpha and volume ratio.
pub fn compute_weights<T: Scalar>(
    week: WeekId,
    assets: &Universe,
    volumes: &[T],
    alpha: DiscriminationParam<T>,
    excluded: &[bool],
) -> Result<WeightVector<T>> {
    if volumes.len() != assets.len() || excluded.len() != assets.len() {
        return Err(Error::InvalidParameter(format!(
            "{} volumes and {} exclusion flags for {} assets",
            volumes.len(),
            excluded.len(),
            assets.len()
        )));
    }
    let alpha = alpha.value();
    let mut exponents = vec![T::neg_infinity(); assets.len()];
    let mut any = false;
    for (i, &v) in volumes.iter().enumerate() {
        if excluded[i] {
            continue;
        }
        if !(v.is_finite() && v >= T::zero()) {
            return Err(Error::InvalidParameter(format!(
                "volume {v} for {} is not a finite nonnegative number",
                assets[i]
            )));
        }
        exponents[i] = if alpha == T::zero() {
            T::zero()
        } else if v == T::zero() {
            return Err(Error::ZeroVolume {
                asset: assets[i].clone(),
            });
        } else {
            -alpha * v.ln()
        };
        any = true;
    }
    if !any {
        return Err(Error::EmptyUniverse);
    }

    let shift = exponents.iter().copied().fold(T::neg_infinity(), T::max);
    let mut weights: Vec<T> = exponents
        .iter()
        .zip(excluded)
        .map(|(&e, &x)| if x { T::zero() } else { (e - shift).exp() })
        .collect();
    let total: T = weights.iter().copied().sum();
    for w in &mut weights {
        *w = *w / total;
    }
    Ok(WeightVector {
        week,
        assets: assets.clone(),
        weights,
        excluded: excluded.to_vec(),
    })
}
