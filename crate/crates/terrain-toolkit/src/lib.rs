//! Terrain analysis toolkit: geomorphon landform classification of digital
//! elevation models, perceived-realism scoring (PTRM), six families of
//! seeded synthetic terrain, and the statistics to recalibrate the metric
//! on new perception studies.
//!
//! The typical pipeline is:
//!
//! 1. load or synthesize a DEM ([`raster`], [`synth`]),
//! 2. fill voids and resample to the 512-cell working resolution,
//! 3. classify landforms and reduce to a coverage histogram
//!    ([`geomorphon`]),
//! 4. normalize and score against a calibration ([`metric`]),
//! 5. batch over a corpus, rank study votes, and refit ([`corpus`],
//!    [`stats`]).
//!
//! Each step is a pure function of its inputs; seeded generators and batch
//! scoring are bit-reproducible regardless of thread count. See the
//! crate examples for runnable end-to-end walkthroughs of every
//! capability, or the `terrain-toolkit` binary for the same surface as a
//! command line.

pub mod cli;
pub mod corpus;
pub mod error;
pub mod geomorphon;
pub mod metric;
pub mod raster;
pub mod stats;
pub mod synth;

pub use error::{Result, TerrainError};
pub use raster::HeightField;
