//! Rescaling of separately normalized search-volume batches onto one scale,
//! and handling of zero volumes before weighting.
//!
//! The provider scales each query batch (at most five terms) so that its
//! largest entry is 100. Batches that share a reference term can be chained:
//! each batch is multiplied by the ratio of the reference series' mean in the
//! first batch to its mean in that batch.

use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::timeseries::{AssetId, VolumePanel, WeekId};

/// Most terms the provider accepts in one query.
pub const MAX_BATCH_TERMS: usize = 5;

/// Allowed disagreement, in volume units, between a rescaled reference series
/// and the first batch's copy of it.
pub const ROUNDING_TOLERANCE: f64 = 1.0;

/// One provider export: up to five volume series over a shared calendar.
#[derive(Debug, Clone, PartialEq)]
pub struct QueryBatch<T> {
    weeks: Vec<WeekId>,
    series: Vec<(AssetId, Vec<T>)>,
    anchor: AssetId,
}

impl<T: Scalar> QueryBatch<T> {
    pub fn new(
        weeks: Vec<WeekId>,
        series: Vec<(AssetId, Vec<T>)>,
        anchor: AssetId,
    ) -> Result<Self> {
        if !(2..=MAX_BATCH_TERMS).contains(&series.len()) {
            return Err(Error::InvalidBatch(format!(
                "{} series, expected 2 to {MAX_BATCH_TERMS}",
                series.len()
            )));
        }
        let mut seen = HashSet::new();
        for (asset, values) in &series {
            if !seen.insert(asset) {
                return Err(Error::InvalidBatch(format!("{asset} appears twice")));
            }
            if values.len() != weeks.len() {
                return Err(Error::InvalidBatch(format!(
                    "{asset} has {} values for {} weeks",
                    values.len(),
                    weeks.len()
                )));
            }
            if values.iter().any(|v| !(v.is_finite() && *v >= T::zero())) {
                return Err(Error::InvalidBatch(format!(
                    "{asset} has a negative or non-finite volume"
                )));
            }
        }
        let anchor_values = series
            .iter()
            .find(|(a, _)| *a == anchor)
            .map(|(_, v)| v)
            .ok_or_else(|| Error::InvalidBatch(format!("anchor {anchor} not among the series")))?;
        if !anchor_values.iter().any(|v| *v > T::zero()) {
            return Err(Error::InvalidBatch(format!("anchor {anchor} is all zero")));
        }
        Ok(Self {
            weeks,
            series,
            anchor,
        })
    }

    pub fn weeks(&self) -> &[WeekId] {
        &self.weeks
    }

    pub fn series(&self) -> &[(AssetId, Vec<T>)] {
        &self.series
    }

    pub fn anchor(&self) -> &AssetId {
        &self.anchor
    }

    pub fn get(&self, asset: &AssetId) -> Option<&[T]> {
        self.series
            .iter()
            .find(|(a, _)| a == asset)
            .map(|(_, v)| v.as_slice())
    }

    pub fn max_volume(&self) -> T {
        self.series
            .iter()
            .flat_map(|(_, v)| v.iter().copied())
            .fold(T::zero(), T::max)
    }

    /// Whether the batch maximum is 100 up to integer rounding.
    pub fn is_provider_scaled(&self) -> bool {
        (self.max_volume() - T::of(100.0)).abs() <= T::of(ROUNDING_TOLERANCE)
    }
}

/// Volumes from several batches on one common scale.
#[derive(Debug, Clone, PartialEq)]
pub struct MergedVolumePanel<T> {
    pub panel: VolumePanel<T>,
    /// Multiplier applied to each asset's series, aligned with `panel.assets`.
    pub scale_factors: Vec<T>,
    /// Multiplier applied to each input batch.
    pub batch_scales: Vec<T>,
    /// Largest absolute gap between a rescaled reference series and the
    /// first batch's reference series.
    pub discrepancy: T,
}

impl<T: Scalar> MergedVolumePanel<T> {
    pub fn anchor_consistent(&self) -> bool {
        self.discrepancy <= T::of(ROUNDING_TOLERANCE)
    }
}

fn mean<T: Scalar>(xs: &[T]) -> T {
    xs.iter().copied().sum::<T>() / T::of(xs.len() as f64)
}

/// Chains `batches` onto the scale of the first batch through `reference`.
///
/// The output lists each non-reference asset once, in batch order, with the
/// reference series taken from the first batch.
pub fn merge_batches<T: Scalar>(
    batches: &[QueryBatch<T>],
    reference: &AssetId,
) -> Result<MergedVolumePanel<T>> {
    let first = batches
        .first()
        .ok_or_else(|| Error::InvalidParameter("no batches to merge".into()))?;

    let mut refs = Vec::with_capacity(batches.len());
    for (b, batch) in batches.iter().enumerate() {
        let series = batch.get(reference).ok_or_else(|| Error::BatchStructure {
            batch: b,
            reason: format!("reference {reference} missing"),
        })?;
        if batch.weeks != first.weeks {
            return Err(Error::BatchCalendar { batch: b });
        }
        let m = mean(series);
        if m.is_nan() || m <= T::zero() {
            return Err(Error::UnmergeableBatch {
                batch: b,
                reference: reference.clone(),
            });
        }
        refs.push(series);
    }

    let base = mean(refs[0]);
    let batch_scales: Vec<T> = refs.iter().map(|r| base / mean(r)).collect();

    let mut assets = Vec::new();
    let mut volume = Vec::new();
    let mut scale_factors = Vec::new();
    let mut origin: Vec<usize> = Vec::new();
    for (b, batch) in batches.iter().enumerate() {
        let scale = batch_scales[b];
        for (asset, values) in &batch.series {
            if asset == reference && b > 0 {
                continue;
            }
            if let Some(k) = assets.iter().position(|a| a == asset) {
                return Err(Error::BatchStructure {
                    batch: b,
                    reason: format!("{asset} already appeared in batch {}", origin[k]),
                });
            }
            assets.push(asset.clone());
            origin.push(b);
            scale_factors.push(scale);
            volume.push(values.iter().map(|&v| v * scale).collect());
        }
    }

    let discrepancy = refs
        .iter()
        .zip(&batch_scales)
        .flat_map(|(r, &s)| {
            r.iter()
                .zip(refs[0])
                .map(move |(&v, &v0)| (v * s - v0).abs())
        })
        .fold(T::zero(), T::max);

    Ok(MergedVolumePanel {
        panel: VolumePanel::new(assets, first.weeks.clone(), volume)?,
        scale_factors,
        batch_scales,
        discrepancy,
    })
}

/// What to do with a zero search volume.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum ZeroPolicy<T> {
    /// Drop the asset for that week; weights renormalize over the rest.
    #[default]
    Exclude,
    /// Replace zeros by a fixed positive floor.
    Floor(T),
}

impl<T: Scalar> ZeroPolicy<T> {
    pub const DEFAULT_FLOOR: f64 = 0.5;

    pub fn floor(value: T) -> Result<Self> {
        if value.is_finite() && value > T::zero() {
            Ok(ZeroPolicy::Floor(value))
        } else {
            Err(Error::InvalidParameter(format!(
                "zero-volume floor must be positive, got {value}"
            )))
        }
    }
}

/// Per (asset, week) exclusion flags, shaped like the volume panel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExclusionMask {
    excluded: Vec<Vec<bool>>,
}

impl ExclusionMask {
    pub fn none(n_assets: usize, n_weeks: usize) -> Self {
        Self {
            excluded: vec![vec![false; n_weeks]; n_assets],
        }
    }

    pub fn is_excluded(&self, asset: usize, week: usize) -> bool {
        self.excluded[asset][week]
    }

    /// Flags of every asset in week position `t`.
    pub fn column(&self, t: usize) -> Vec<bool> {
        self.excluded.iter().map(|row| row[t]).collect()
    }

    pub fn count(&self) -> usize {
        self.excluded.iter().flatten().filter(|x| **x).count()
    }

    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }
}

/// Applies `policy` to every zero entry; positive entries are never touched.
pub fn resolve_zero_volumes<T: Scalar>(
    panel: &VolumePanel<T>,
    policy: ZeroPolicy<T>,
) -> (VolumePanel<T>, ExclusionMask) {
    let mut out = panel.clone();
    let mut mask = ExclusionMask::none(panel.assets.len(), panel.weeks.len());
    for (i, row) in out.volume.iter_mut().enumerate() {
        for (t, v) in row.iter_mut().enumerate() {
            if *v == T::zero() {
                match policy {
                    ZeroPolicy::Exclude => mask.excluded[i][t] = true,
                    ZeroPolicy::Floor(f) => *v = f,
                }
            }
        }
    }
    (out, mask)
}
