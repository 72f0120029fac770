//! Canned scenarios reproducing the published experiments, with the numbers
//! reported for them and the tolerance bands they are checked against.

use uav_lifetime::channel::SPEED_OF_LIGHT_ROUNDED;
use uav_lifetime::scenario::{generate_clustered, generate_uniform};
use uav_lifetime::{AreaBounds, ClusterSpec, RfParams, Result, Scenario};

pub const AREA_SIDE: f64 = 250.0;
pub const ALTITUDE: f64 = 650.0;
pub const LOW_ALTITUDE: f64 = 30.0;
pub const USERS: usize = 200;
pub const ENERGY_LOW: f64 = 4500.0;
pub const ENERGY_HIGH: f64 = 18000.0;
pub const UNIFORM_SEED: u64 = 1;
pub const NONUNIFORM_SEED: u64 = 1;
pub const NSD_SAMPLES: usize = 1000;
pub const NSD_SEED: u64 = 2019;

/// Published uniform-case optimum: placement, cost (J/m^2), lifetime (s).
pub const PUBLISHED_UNIFORM: ((f64, f64, f64), f64, f64) = ((131.0, 128.0, 650.0), 5.19, 282_096.0);
/// Published non-uniform-case optimum.
pub const PUBLISHED_NONUNIFORM: ((f64, f64, f64), f64, f64) = ((92.0, 156.0, 650.0), 5.22, 283_727.0);

pub const COST_BAND: (f64, f64) = (5.0, 5.4);
pub const LIFETIME_BAND: (f64, f64) = (2.70e5, 2.95e5);
pub const PLACEMENT_CENTER: (f64, f64) = (125.0, 125.0);
pub const PLACEMENT_RADIUS: f64 = 15.0;
pub const MAX_ITERS: usize = 100;
pub const K_RATIO_TOL: f64 = 5e-3;

pub const DENSE_CENTER: (f64, f64) = (80.0, 165.0);
pub const SPARSE_CENTER: (f64, f64) = (185.0, 70.0);
pub const CLUSTER_STD: f64 = 30.0;

/// Reference radio parameters with the rounded speed of light.
pub fn table_rf() -> RfParams {
    RfParams::reference().with_speed_of_light(SPEED_OF_LIGHT_ROUNDED)
}

pub fn table_bounds(altitude: f64) -> AreaBounds {
    AreaBounds::square(AREA_SIDE, AREA_SIDE, altitude)
}

/// 200 uniform devices on the 250 m square, energies uniform on [4500, 18000] J.
pub fn uniform_scenario(seed: u64) -> Result<Scenario> {
    generate_uniform(
        USERS,
        table_bounds(ALTITUDE),
        ENERGY_LOW,
        ENERGY_HIGH,
        table_rf(),
        seed,
    )
}

pub fn two_cluster_spec() -> [ClusterSpec; 2] {
    let cluster = |(cx, cy): (f64, f64), count| ClusterSpec {
        center_x: cx,
        center_y: cy,
        std: CLUSTER_STD,
        count,
        energy_low: ENERGY_LOW,
        energy_high: ENERGY_HIGH,
    };
    [cluster(DENSE_CENTER, 150), cluster(SPARSE_CENTER, 50)]
}

/// 150 devices around a dense center and 50 around a sparse one.
pub fn nonuniform_scenario(seed: u64) -> Result<Scenario> {
    generate_clustered(&two_cluster_spec(), table_bounds(ALTITUDE), table_rf(), seed)
}

/// Centroid of the devices generated by cluster `index` (clusters are
/// generated in order).
pub fn cluster_centroid(scenario: &Scenario, index: usize) -> (f64, f64) {
    let spec = two_cluster_spec();
    let start: usize = spec[..index].iter().map(|c| c.count).sum();
    let users = &scenario.users[start..start + spec[index].count];
    let n = users.len() as f64;
    (
        users.iter().map(|u| u.x).sum::<f64>() / n,
        users.iter().map(|u| u.y).sum::<f64>() / n,
    )
}
