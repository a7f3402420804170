//! Report envelope shared by the CLI and the gallery.
//!
//! Every report carries the schema version and the tolerance constants in
//! force, so that a change of tolerance shows up when reports are diffed.

use serde::Serialize;

use crate::{decision, ellipticity, lie_algebra, linalg, solvable_group, torus_rep};

pub const SCHEMA_VERSION: &str = "almell-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Tolerances {
    pub rank_cutoff: f64,
    pub zero_floor: f64,
    pub structure: f64,
    pub ideal: f64,
    pub killing_definite: f64,
    pub commutation: f64,
    pub skew: f64,
    pub integrality: f64,
    pub free_action: f64,
    pub homomorphism: f64,
    pub automorphism: f64,
    pub invertibility: f64,
    pub delta_solve: f64,
    pub spectral: f64,
    pub cluster_radius: f64,
    pub image: f64,
    pub density_threshold: f64,
}

impl Tolerances {
    pub fn with_spectral(spectral: f64) -> Self {
        Tolerances {
            spectral,
            ..Tolerances::default()
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_cutoff: linalg::RANK_CUTOFF,
            zero_floor: linalg::ZERO_FLOOR,
            structure: lie_algebra::STRUCTURE_TOL,
            ideal: lie_algebra::IDEAL_TOL,
            killing_definite: lie_algebra::KILLING_DEFINITE_TOL,
            commutation: torus_rep::COMMUTATION_TOL,
            skew: torus_rep::SKEW_TOL,
            integrality: torus_rep::INTEGRALITY_TOL,
            free_action: torus_rep::FREE_ACTION_TOL,
            homomorphism: solvable_group::HOMOMORPHISM_TOL,
            automorphism: solvable_group::AUTOMORPHISM_TOL,
            invertibility: solvable_group::INVERTIBILITY_TOL,
            delta_solve: solvable_group::DELTA_SOLVE_TOL,
            spectral: ellipticity::SPECTRAL_TOL,
            cluster_radius: ellipticity::CLUSTER_RADIUS,
            image: ellipticity::IMAGE_TOL,
            density_threshold: decision::DENSITY_THRESHOLD,
        }
    }
}

/// `{"schema_version", "command", "seed", "samples", "tolerances", "result"}`.
#[derive(Debug, Clone, Serialize)]
pub struct Envelope<T: Serialize> {
    pub schema_version: &'static str,
    pub command: String,
    pub seed: u64,
    pub samples: usize,
    pub tolerances: Tolerances,
    pub result: T,
}

impl<T: Serialize> Envelope<T> {
    pub fn new(command: impl Into<String>, seed: u64, samples: usize, tolerances: Tolerances, result: T) -> Self {
        Envelope {
            schema_version: SCHEMA_VERSION,
            command: command.into(),
            seed,
            samples,
            tolerances,
            result,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}
