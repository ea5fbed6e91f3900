//! The classifier: a small convolutional text model (plus a bag-of-words
//! baseline), its gradients, and its optimizer. Written against flat
//! row-major buffers so the whole stack stays dependency-free and can be
//! cross-checked numerically.

pub mod adam;
pub mod backward;
pub mod config;
pub mod forward;
pub mod gradcheck;
pub mod params;

pub use adam::{adam_step, AdamHyper, AdamState};
pub use backward::{loss_and_grad, mean_cross_entropy, Gradients};
pub use config::{ClassifierConfig, ModelKind};
pub use forward::{forward, forward_eval, predict, Tape};
pub use gradcheck::{check_gradients, nudge_biases, GradCheckReport};
pub use params::{tensor_specs, ClassifierParams, TensorSpec};
