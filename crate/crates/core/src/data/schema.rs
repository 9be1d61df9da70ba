use crate::error::{Error, Result};

/// Canonical feature column names, order fixed. One row is one observation
/// with 16 numeric features; categorical codes (income category, cluster,
/// urban group) are consumed as single numeric codes, not one-hot expanded.
pub const FEATURE_NAMES: [&str; 16] = [
    "hh_veh_0",
    "hh_veh_1",
    "hh_veh_2p",
    "workers_1",
    "workers_2p",
    "total_pop",
    "lc_child_u18",
    "lc_1p_u65",
    "lc_2p_u65",
    "lc_1p_65p",
    "lc_2p_65p",
    "pop_group_quarters",
    "hh_count",
    "hh_income",
    "cluster",
    "urban_group",
];

pub const TARGET_NAMES: [&str; 2] = ["person_trips", "vehicle_trips"];

pub const N_FEATURES: usize = 16;

/// The five columns whose missing values the source survey pipeline treats as
/// grounds for row deletion; tracked separately in CleanReport.
pub const REQUIRED_FIVE: [&str; 5] = [
    "urban_group",
    "person_trips",
    "vehicle_trips",
    "hh_count",
    "hh_income",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Target {
    PersonTrips,
    VehicleTrips,
}

impl Target {
    pub fn name(self) -> &'static str {
        match self {
            Target::PersonTrips => "person_trips",
            Target::VehicleTrips => "vehicle_trips",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name {
            "person_trips" => Ok(Target::PersonTrips),
            "vehicle_trips" => Ok(Target::VehicleTrips),
            other => Err(Error::Argument(format!(
                "unknown target '{other}'; expected person_trips or vehicle_trips"
            ))),
        }
    }
}
