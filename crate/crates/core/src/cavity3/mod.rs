//! One-dimensional model of a cavity with a dielectric membrane near one
//! mirror: resonance, linewidth and dispersive coupling versus membrane
//! position, the resonant port asymmetry, and the transverse overlap between
//! the optical spot and a membrane drum mode.

mod overlap;
mod ports;
mod scan;
mod slab;

pub use overlap::{coupling_g, end_mirror_coupling, mode_overlap, ModeOverlapSpec};
pub use ports::{port_rates, PortRates};
pub use scan::{CavityScanPoint, DrivenPort, Resonance, ScanSummary, ThreeElementCavity};
pub use slab::{membrane_reflectivity, slab_response, SlabResponse};
