//! Theorem checks on finite instances.

pub mod enumerate;
pub mod generator;
pub mod gstoping;
pub mod immersion;
pub mod pseudo;

pub use enumerate::{count_stopping_times, enumerate_stopping_times, for_each_stopping_time};
pub use generator::{gen_random_instance, GeneratorParams, Mode};
pub use gstoping::{barrier_representation_check, decompose_stopping_time, gstoping_d_check, Decomposition};
pub use immersion::{immersion_cond_indep, is_immersed, pseudo_h_check, pseudo_h_check_with, PseudoHOptions};
pub use pseudo::{honest_pseudo_check, is_pseudo_stopping, ny2_check, PseudoStoppingTest};
