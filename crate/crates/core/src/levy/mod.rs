//! Spectrally positive Lévy processes of finite variation: exponent
//! arithmetic, exact path sampling, reflection, killing, the reflected
//! constructions, and splitting trees whose contours they are.

mod law;
mod params;
mod path;
mod reflected;
mod splitting_tree;

pub use law::{JumpLaw, LAPLACE_TOL};
pub use params::{conjugate, largest_root, psi_eval, sojourn_of, LevyParams, ROOT_TOL};
pub use path::{kill_at_zero, reflect_below, sample_path, time_change, PathRepr, SampledPath};
pub use reflected::{
    marginal, simulate_poissonian, simulate_qxr, simulate_qxr_counted, simulate_reflected_direct, synthesize,
    DoublyIndexed, MAX_COPIES, MAX_EVENTS,
};
pub use splitting_tree::{simulate_splitting_tree, SplittingParams};
