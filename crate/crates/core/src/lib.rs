//! Whole-body support-pose taxonomy and motion analysis.
//!
//! The crate is organised around the data flow of a motion analysis run:
//!
//! * [`taxonomy`] holds the 46 support-pose classes, their contact types and
//!   the one-contact-change transition graph.
//! * [`motion_model`] ingests trajectory and scene files and defines the
//!   contact / pose-instance types.
//! * [`signal`] low-pass filters positions and differentiates them into speeds.
//! * [`contact`] answers point-to-primitive proximity queries against a scene.
//! * [`segmentation`] combines speed thresholds and contact probes into
//!   per-frame support sets and splits a motion into labelled segments.
//! * [`posegraph`] turns a labelled report into an order-annotated transition
//!   multigraph with DOT export.
//! * [`actions`] classifies stretches of segments into manipulation,
//!   locomotion, and combined loco-manipulation actions.
//! * [`cli`] is the command-line front end; [`fixtures`] builds the synthetic
//!   scenarios shipped under `fixtures/`.

pub mod actions;
pub mod cli;
pub mod contact;
pub mod fixtures;
pub mod motion_model;
pub mod posegraph;
pub mod segmentation;
pub mod signal;
pub mod taxonomy;

use thiserror::Error;

pub type Point3 = [f64; 3];

/// Union of the per-module errors, returned by the end-to-end pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Taxonomy(#[from] taxonomy::TaxonomyError),
    #[error(transparent)]
    Motion(#[from] motion_model::MotionError),
    #[error(transparent)]
    Signal(#[from] signal::SignalError),
    #[error(transparent)]
    Contact(#[from] contact::ContactError),
    #[error(transparent)]
    Graph(#[from] posegraph::GraphError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
