use crate::error::{Error, Result};
use crate::numerics::Rng;

use super::schema::{FEATURE_NAMES, N_FEATURES, TARGET_NAMES};
use super::table::RawTable;

/// Inclusive integer range each feature column is drawn from.
const FEATURE_RANGES: [(i64, i64); N_FEATURES] = [
    (0, 3),      // hh_veh_0
    (0, 5),      // hh_veh_1
    (0, 6),      // hh_veh_2p
    (0, 4),      // workers_1
    (0, 5),      // workers_2p
    (500, 20000), // total_pop
    (0, 4),      // lc_child_u18
    (0, 3),      // lc_1p_u65
    (0, 5),      // lc_2p_u65
    (0, 2),      // lc_1p_65p
    (0, 3),      // lc_2p_65p
    (0, 500),    // pop_group_quarters
    (1, 8),      // hh_count
    (1, 11),     // hh_income
    (1, 6),      // cluster
    (1, 3),      // urban_group
];

/// Ground-truth generative model: each target is a positive-coefficient
/// linear blend of household, worker, vehicle, and life-cycle columns plus
/// one product interaction term, multiplied by lognormal noise
/// exp(noise_sd * N(0,1)).
pub const PERSON_BASE: f64 = 1.2;
pub const PERSON_LINEAR: [(&str, f64); 10] = [
    ("hh_count", 0.50),
    ("workers_1", 0.60),
    ("workers_2p", 0.90),
    ("hh_veh_1", 0.30),
    ("hh_veh_2p", 0.40),
    ("lc_child_u18", 0.50),
    ("lc_1p_u65", 0.20),
    ("lc_2p_u65", 0.30),
    ("lc_1p_65p", 0.15),
    ("lc_2p_65p", 0.20),
];
pub const PERSON_INTERACTION: (&str, &str, f64) = ("hh_count", "lc_child_u18", 0.08);

pub const VEHICLE_BASE: f64 = 0.8;
pub const VEHICLE_LINEAR: [(&str, f64); 8] = [
    ("hh_count", 0.35),
    ("workers_1", 0.50),
    ("workers_2p", 0.70),
    ("hh_veh_1", 0.45),
    ("hh_veh_2p", 0.65),
    ("lc_child_u18", 0.25),
    ("lc_2p_u65", 0.20),
    ("lc_2p_65p", 0.15),
];
pub const VEHICLE_INTERACTION: (&str, &str, f64) = ("hh_veh_2p", "workers_2p", 0.10);

fn feature_index(name: &str) -> usize {
    FEATURE_NAMES.iter().position(|&f| f == name).unwrap()
}

fn blend(
    row: &[f64],
    base: f64,
    linear: &[(&str, f64)],
    interaction: (&str, &str, f64),
) -> f64 {
    let mut y = base;
    for &(name, w) in linear {
        y += w * row[feature_index(name)];
    }
    let (a, b, w) = interaction;
    y + w * row[feature_index(a)] * row[feature_index(b)]
}

/// Noiseless person-trip count for one feature row (the generative truth).
pub fn truth_person_trips(row: &[f64]) -> f64 {
    blend(row, PERSON_BASE, &PERSON_LINEAR, PERSON_INTERACTION)
}

/// Noiseless vehicle-trip count for one feature row.
pub fn truth_vehicle_trips(row: &[f64]) -> f64 {
    blend(row, VEHICLE_BASE, &VEHICLE_LINEAR, VEHICLE_INTERACTION)
}

/// Human-readable dump of the generative coefficients (for --show-truth).
pub fn render_truth() -> String {
    let mut out = String::new();
    let mut section = |label: &str, base: f64, linear: &[(&str, f64)], inter: (&str, &str, f64)| {
        out.push_str(&format!("{label} = {base}"));
        for (name, w) in linear {
            out.push_str(&format!(" + {w}*{name}"));
        }
        out.push_str(&format!(" + {}*{}*{}\n", inter.2, inter.0, inter.1));
    };
    section("person_trips", PERSON_BASE, &PERSON_LINEAR, PERSON_INTERACTION);
    section("vehicle_trips", VEHICLE_BASE, &VEHICLE_LINEAR, VEHICLE_INTERACTION);
    out.push_str("noise: target *= exp(noise_sd * N(0,1))\n");
    out
}

/// Seeded synthetic table at the canonical schema, desk-scale stand-in for
/// the real survey extract. Fully populated: no absent cells.
pub fn synthesize(n: usize, seed: u64, noise_sd: f64) -> Result<RawTable> {
    if n == 0 {
        return Err(Error::Argument("row count must be at least 1".into()));
    }
    if noise_sd < 0.0 {
        return Err(Error::Argument(format!(
            "noise_sd must be non-negative, got {noise_sd}"
        )));
    }
    let mut rng = Rng::new(seed);
    let mut rows = Vec::with_capacity(n);
    for _ in 0..n {
        let mut row = Vec::with_capacity(N_FEATURES + 2);
        for &(lo, hi) in &FEATURE_RANGES {
            let span = (hi - lo + 1) as usize;
            row.push((lo + rng.below(span) as i64) as f64);
        }
        let mut person = truth_person_trips(&row);
        let mut vehicle = truth_vehicle_trips(&row);
        if noise_sd > 0.0 {
            person *= (noise_sd * rng.normal()).exp();
            vehicle *= (noise_sd * rng.normal()).exp();
        }
        row.push(person);
        row.push(vehicle);
        rows.push(row.into_iter().map(Some).collect());
    }
    Ok(RawTable {
        header: FEATURE_NAMES
            .iter()
            .chain(TARGET_NAMES.iter())
            .map(|s| s.to_string())
            .collect(),
        rows,
        provenance: format!("synthetic(n={n}, seed={seed}, noise_sd={noise_sd})"),
    })
}
