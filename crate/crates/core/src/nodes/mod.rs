//! Zeros of the wave function: location, winding, continuation in time, and
//! the closed-form three-state case.

mod finder;
mod m3;
mod tracker;
mod winding;

pub use finder::{find_nodes, Node, NodeSearch};
pub use m3::{node_ellipse_m3, node_path_m3, EllipseM3};
pub use tracker::{
    track_nodes, EventKind, NodeEvent, NodeTrack, NodeTracking, PairEvent, TrackOptions,
    TrackSample,
};
pub use winding::{node_winding, node_winding_sign_linearized};

#[cfg(test)]
mod tests;
