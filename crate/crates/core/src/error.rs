use chrono::NaiveDate;
use thiserror::Error;

use crate::timeseries::{AssetId, Diagnostic, WeekId};

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid ticker {0:?}: expected 1-6 characters from [A-Z0-9.-]")]
    InvalidAsset(String),

    #[error("asset {0} listed more than once")]
    DuplicateAsset(AssetId),

    #[error("duplicate observation for {asset} on {date}")]
    DuplicateObservation { asset: AssetId, date: NaiveDate },

    #[error("invalid week calendar: {0}")]
    InvalidCalendar(String),

    #[error("price gaps: {}", format_gaps(.0))]
    PriceGaps(Vec<(AssetId, WeekId)>),

    #[error("volume gaps: {}", format_gaps(.0))]
    VolumeGaps(Vec<(AssetId, WeekId)>),

    #[error("invalid price {value} for {asset} on {date}")]
    InvalidPrice {
        asset: AssetId,
        date: NaiveDate,
        value: f64,
    },

    #[error("insufficient data: need at least {needed} {what}, got {got}")]
    InsufficientData {
        what: &'static str,
        needed: usize,
        got: usize,
    },

    #[error("panel failed validation: {}", format_diagnostics(.0))]
    InvalidPanel(Vec<Diagnostic>),

    #[error("asset universes differ: {0}")]
    UniverseMismatch(String),

    #[error("invalid query batch: {0}")]
    InvalidBatch(String),

    #[error("batch {batch}: {reason}")]
    BatchStructure { batch: usize, reason: String },

    #[error("batch {batch}: reference {reference} has no positive volume, cannot rescale")]
    UnmergeableBatch { batch: usize, reference: AssetId },

    #[error("batch {batch}: week calendar differs from batch 0")]
    BatchCalendar { batch: usize },

    #[error("zero volume for included asset {asset} with nonzero alpha")]
    ZeroVolume { asset: AssetId },

    #[error("no included assets to weight")]
    EmptyUniverse,

    #[error("missing return for included asset {asset}")]
    DataGap { asset: AssetId },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("week {week}: {source}")]
    AtWeek {
        week: WeekId,
        #[source]
        source: Box<Error>,
    },

    #[error("sharpe ratio undefined: return series has zero standard deviation")]
    SharpeUndefined,

    #[error("portfolio value fell to {value} after week {position}")]
    Ruin { position: usize, value: f64 },

    #[error("summaries are not comparable: {0}")]
    NotComparable(String),

    #[error("every grid point failed ({skipped} skipped), first failure: {first_reason}")]
    EmptySweep {
        skipped: usize,
        first_reason: String,
    },

    #[error("sweep table has no rows")]
    EmptyTable,
}

impl Error {
    pub(crate) fn at_week(self, week: WeekId) -> Self {
        Error::AtWeek {
            week,
            source: Box::new(self),
        }
    }
}

fn format_gaps(gaps: &[(AssetId, WeekId)]) -> String {
    gaps.iter()
        .map(|(a, w)| format!("{a}@{w}"))
        .collect::<Vec<_>>()
        .join(", ")
}

fn format_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(|d| d.to_string())
        .collect::<Vec<_>>()
        .join("; ")
}
