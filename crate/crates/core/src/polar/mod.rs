//! Polar-grid fields on the unit disk, symmetry projections and the two
//! change-of-variable transforms between mode classes.

mod dump;
mod field;
mod grid;
mod spectral;
mod transform;

pub use dump::{parse_field_dump, read_field_dump, render_field_dump, write_field_dump, FieldDump};
pub use field::{
    angular_variation, is_in_mode, mode_defect, parse_mode_list, project_mode, radial_profile,
    DiskField, ModeClass, RadialProfile, MODE_TOLERANCE,
};
pub use grid::PolarGrid;
pub use transform::{mode_reduce, unfold};

pub(crate) use spectral::RingFft;
