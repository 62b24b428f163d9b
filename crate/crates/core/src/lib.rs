//! HNN extensions and amalgams: normal forms, pre-actions, free
//! globalization onto the Bass-Serre tree, and a certificate-emitting builder
//! for highly transitive faithful actions.
//!
//! ```
//! use bass_serre_ht::base_groups::make_bs_presentation;
//! use bass_serre_ht::ht_builder::{parse_demands, run_rounds, HnnEngine, RoundsConfig};
//!
//! let data = make_bs_presentation(2, 3).unwrap();
//! let demands = parse_demands::<HnnEngine>(&data, "map (0,0) (1,2) -> (2,1) (0,5)\n").unwrap();
//! let config = RoundsConfig { rounds: 1, ..Default::default() };
//! let outcome = run_rounds::<HnnEngine>(&data, &demands, &config).unwrap();
//! assert!(outcome.error.is_none() && outcome.all_verify());
//! ```

pub mod base_groups;
pub mod hnn_words;
pub mod amalgam_words;
pub mod graphs;
pub mod preaction_hnn;
pub mod preaction_amalgam;
pub mod ht_builder;
pub mod cli;
