//! Witt vectors: integer polynomial tables, arithmetic over any [`Ring`],
//! and a ghost-component shortcut for Laurent series over finite fields.
//!
//! [`Ring`]: crate::ring::Ring

mod checks;
mod ghost;
mod table;
mod vector;

pub use checks::{cn_leading_term_check, nth_component_identity_check, ComponentIdentity, LeadingTerm};
pub use ghost::{ghost_components, ghost_inverse, lift_ring, series_combine, WittSeries};
pub use table::{table, WittTable};
pub use vector::{Witt, WittVector};
