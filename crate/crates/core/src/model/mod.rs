//! First-order homogeneous systems from assembled FEM matrices.

mod assemble;
mod homogenize;
mod input;
mod io;
mod system;

pub use assemble::{assemble_bar_1d, assemble_heat_1d, initial_box};
pub use homogenize::{homogenize, homogenize_first_order, LinearSystem};
pub use input::{nominal_forcing, InputModel, InputTerm};
pub use io::{format_system, load_system, parse_system, save_system, SystemFile};
pub use system::{dynamics_first_order, heat_first_order, SecondOrderSystem, SystemKind};
