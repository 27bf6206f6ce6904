//! Behavioral network analysis over edit-event streams.
//!
//! Every edit is linked to the edit immediately before it on the same page.
//! The resulting multigraph keeps self-loops (an editor following their own
//! edit) and repeated dyadic links, which a simple-graph view would drop.
//! Ratio-form measures computed on it feed four composite dimension scores
//! per corpus, and corpora are grouped by Ward clustering with the cluster
//! count chosen by average silhouette width.
//!
//! ```
//! use behavnet::ingest::{EditEvent, EditStream};
//! use behavnet::measures::{measure_all, MeasureConfig};
//!
//! let events: Vec<_> = ["A", "A", "B", "A", "B"]
//!     .iter()
//!     .enumerate()
//!     .map(|(i, e)| EditEvent::new("P1", *e, 600 * i as u64, false).unwrap())
//!     .collect();
//! let stream = EditStream::from_events(events);
//! let m = measure_all(&stream, &MeasureConfig::default()).unwrap();
//! assert_eq!(m.self_loop_ratio, 0.25);
//! assert_eq!(m.multiple_link_ratio, 0.75);
//! ```

pub mod cli;
pub mod cluster;
pub mod dimensions;
mod error;
pub mod exec;
pub mod ingest;
pub mod measures;
pub mod netbuild;
pub mod report;
pub mod synth;

pub use error::{Error, Result};
pub use exec::Strategy;
