use thiserror::Error;

use crate::cluster::ClusterError;
use crate::dimensions::DimensionError;
use crate::ingest::IngestError;
use crate::measures::MeasureError;
use crate::netbuild::NetError;
use crate::synth::SynthError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Any failure produced by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Ingest(#[from] IngestError),
    #[error(transparent)]
    Net(#[from] NetError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
    #[error(transparent)]
    Dimension(#[from] DimensionError),
    #[error(transparent)]
    Cluster(#[from] ClusterError),
    #[error(transparent)]
    Synth(#[from] SynthError),
}
