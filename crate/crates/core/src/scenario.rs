//! Problem instances: ground devices, radio parameters, the UAV box, seeded
//! generators and the JSON scenario file format.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channel::SPEED_OF_LIGHT;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::ScenarioRng;

/// A ground device with its position (m) and residual battery energy (J).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserDevice<T> {
    pub x: T,
    pub y: T,
    pub energy: T,
}

impl<T: Real> UserDevice<T> {
    pub fn new(x: T, y: T, energy: T) -> Self {
        Self { x, y, energy }
    }
}

/// Radio and system parameters shared by every device.
///
/// `bandwidth` is the total UAV bandwidth; each device gets `bandwidth / n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct RfParams<T> {
    /// Required per-device data rate (bit/s).
    pub rate: T,
    /// Total bandwidth (Hz).
    pub bandwidth: T,
    /// Noise power (W).
    pub noise: T,
    /// Carrier frequency (Hz).
    pub frequency: T,
    /// Maximum device transmit power (W).
    pub p_max: T,
    /// Minimum uplink duration every device must sustain (s).
    pub tau_th: T,
    /// Speed of light (m/s) used by the path loss.
    #[serde(default = "default_speed_of_light")]
    pub speed_of_light: T,
}

fn default_speed_of_light<T: Real>() -> T {
    T::lit(SPEED_OF_LIGHT)
}

impl<T: Real> RfParams<T> {
    /// Reference parameters: 4 Mbit/s, 50 MHz, 1e-14 W noise, 4 GHz,
    /// 0.5 W peak power and a 900 s service threshold.
    pub fn reference() -> Self {
        Self {
            rate: T::lit(4.0e6),
            bandwidth: T::lit(50.0e6),
            noise: T::lit(1.0e-14),
            frequency: T::lit(4.0e9),
            p_max: T::lit(0.5),
            tau_th: T::lit(900.0),
            speed_of_light: T::lit(SPEED_OF_LIGHT),
        }
    }

    pub fn with_speed_of_light(mut self, c: T) -> Self {
        self.speed_of_light = c;
        self
    }

    /// Bandwidth available to each of `user_count` devices.
    pub fn bandwidth_per_user(&self, user_count: usize) -> T {
        self.bandwidth / T::count(user_count)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rate", self.rate),
            ("bandwidth", self.bandwidth),
            ("noise", self.noise),
            ("frequency", self.frequency),
            ("p_max", self.p_max),
            ("tau_th", self.tau_th),
            ("speed_of_light", self.speed_of_light),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > T::zero()) {
                return Err(Error::Validation(format!(
                    "rf.{name} must be finite and > 0, got {v}"
                )));
            }
        }
        Ok(())
    }
}

/// Allowed UAV coordinates; the x/y rectangle is also the deployment area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AreaBounds<T> {
    pub x_min: T,
    pub x_max: T,
    pub y_min: T,
    pub y_max: T,
    pub z_min: T,
    pub z_max: T,
}

impl<T: Real> AreaBounds<T> {
    /// `[0, width] x [0, height]` with the UAV pinned at `altitude`.
    pub fn square(width: T, height: T, altitude: T) -> Self {
        Self {
            x_min: T::zero(),
            x_max: width,
            y_min: T::zero(),
            y_max: height,
            z_min: altitude,
            z_max: altitude,
        }
    }

    pub fn with_altitude(mut self, z_min: T) -> Self {
        self.z_min = z_min;
        if self.z_max < z_min {
            self.z_max = z_min;
        }
        self
    }

    pub fn center(&self) -> (T, T) {
        let half = T::lit(0.5);
        (
            (self.x_min + self.x_max) * half,
            (self.y_min + self.y_max) * half,
        )
    }

    pub fn width(&self) -> T {
        self.x_max - self.x_min
    }

    pub fn height(&self) -> T {
        self.y_max - self.y_min
    }

    pub fn diagonal(&self) -> T {
        self.width().hypot(self.height())
    }

    pub fn contains_xy(&self, x: T, y: T) -> bool {
        x >= self.x_min && x <= self.x_max && y >= self.y_min && y <= self.y_max
    }

    pub fn clamp_xy(&self, x: T, y: T) -> (T, T) {
        (
            x.max(self.x_min).min(self.x_max),
            y.max(self.y_min).min(self.y_max),
        )
    }

    /// Checks `x_min < x_max`, `y_min < y_max`, `0 < z_min <= z_max`.
    pub fn validate(&self) -> Result<()> {
        self.validate_with(false)
    }

    /// Like [`validate`](Self::validate) but admits zero-extent rectangles.
    pub fn validate_allow_degenerate(&self) -> Result<()> {
        self.validate_with(true)
    }

    fn validate_with(&self, allow_degenerate: bool) -> Result<()> {
        let all = [
            self.x_min, self.x_max, self.y_min, self.y_max, self.z_min, self.z_max,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::Validation("bounds must be finite".into()));
        }
        let ordered = |lo: T, hi: T| if allow_degenerate { lo <= hi } else { lo < hi };
        if !ordered(self.x_min, self.x_max) {
            return Err(Error::Validation(format!(
                "bounds.x_min ({}) must be < bounds.x_max ({})",
                self.x_min, self.x_max
            )));
        }
        if !ordered(self.y_min, self.y_max) {
            return Err(Error::Validation(format!(
                "bounds.y_min ({}) must be < bounds.y_max ({})",
                self.y_min, self.y_max
            )));
        }
        if !(self.z_min > T::zero() && self.z_min <= self.z_max) {
            return Err(Error::Validation(format!(
                "bounds must satisfy 0 < z_min <= z_max, got z_min = {}, z_max = {}",
                self.z_min, self.z_max
            )));
        }
        Ok(())
    }
}

/// A complete problem instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound(deserialize = "T: Real + Deserialize<'de>"))]
pub struct Scenario<T> {
    pub users: Vec<UserDevice<T>>,
    pub rf: RfParams<T>,
    pub bounds: AreaBounds<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl<T: Real> Scenario<T> {
    /// Builds and validates a scenario.
    pub fn new(users: Vec<UserDevice<T>>, rf: RfParams<T>, bounds: AreaBounds<T>) -> Result<Self> {
        let s = Self {
            users,
            rf,
            bounds,
            seed: None,
        };
        s.validate()?;
        Ok(s)
    }

    /// Operating altitude of the UAV: the lowest admissible one.
    pub fn altitude(&self) -> T {
        self.bounds.z_min
    }

    pub fn validate(&self) -> Result<()> {
        if self.users.is_empty() {
            return Err(Error::Validation("scenario has no users".into()));
        }
        self.rf.validate()?;
        self.bounds.validate_allow_degenerate()?;
        for (i, u) in self.users.iter().enumerate() {
            if !(u.energy.is_finite() && u.energy > T::zero()) {
                return Err(Error::Validation(format!(
                    "users[{i}].energy must be > 0, got {}",
                    u.energy
                )));
            }
            if !(u.x.is_finite() && u.y.is_finite()) || !self.bounds.contains_xy(u.x, u.y) {
                return Err(Error::Validation(format!(
                    "users[{i}] at ({}, {}) lies outside the area",
                    u.x, u.y
                )));
            }
        }
        Ok(())
    }

    /// Users' energies multiplied by a common factor.
    pub fn scale_energies(&self, factor: T) -> Self {
        let mut s = self.clone();
        for u in &mut s.users {
            u.energy = u.energy * factor;
        }
        s
    }
}

fn check_energy_interval<T: Real>(low: T, high: T) -> Result<()> {
    if !(low.is_finite() && high.is_finite() && low > T::zero() && low <= high) {
        return Err(Error::Validation(format!(
            "energy interval must satisfy 0 < low <= high, got [{low}, {high}]"
        )));
    }
    Ok(())
}

/// `count` devices with i.i.d. uniform positions over the area rectangle and
/// i.i.d. uniform energies over `[energy_low, energy_high]`.
///
/// Draw order per device: x, y, energy.
pub fn generate_uniform<T: Real>(
    count: usize,
    bounds: AreaBounds<T>,
    energy_low: T,
    energy_high: T,
    rf: RfParams<T>,
    seed: u64,
) -> Result<Scenario<T>> {
    if count == 0 {
        return Err(Error::Validation("count must be >= 1".into()));
    }
    bounds.validate_allow_degenerate()?;
    check_energy_interval(energy_low, energy_high)?;
    let (xl, xh) = (bounds.x_min.to_f64_lossy(), bounds.x_max.to_f64_lossy());
    let (yl, yh) = (bounds.y_min.to_f64_lossy(), bounds.y_max.to_f64_lossy());
    let (el, eh) = (energy_low.to_f64_lossy(), energy_high.to_f64_lossy());

    let mut rng = ScenarioRng::new(seed);
    let users = (0..count)
        .map(|_| {
            let x = T::lit(rng.uniform_in(xl, xh));
            let y = T::lit(rng.uniform_in(yl, yh));
            let e = if el == eh {
                energy_low
            } else {
                T::lit(rng.uniform_in(el, eh))
            };
            let (x, y) = bounds.clamp_xy(x, y);
            UserDevice::new(x, y, e.max(energy_low).min(energy_high))
        })
        .collect();
    let s = Scenario {
        users,
        rf,
        bounds,
        seed: Some(seed),
    };
    s.validate()?;
    Ok(s)
}

/// One Gaussian cluster of devices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClusterSpec<T> {
    pub center_x: T,
    pub center_y: T,
    /// Isotropic standard deviation (m).
    pub std: T,
    pub count: usize,
    pub energy_low: T,
    pub energy_high: T,
}

const MAX_REJECTIONS: usize = 100_000;

/// Devices drawn from isotropic Gaussians around each cluster center,
/// rejection-sampled into the area rectangle.
///
/// Clusters are sampled in order; per device the draws are `(gx, gy)` pairs
/// until one lands inside the area, followed by one uniform energy draw.
pub fn generate_clustered<T: Real>(
    clusters: &[ClusterSpec<T>],
    bounds: AreaBounds<T>,
    rf: RfParams<T>,
    seed: u64,
) -> Result<Scenario<T>> {
    if clusters.is_empty() {
        return Err(Error::Validation("cluster list is empty".into()));
    }
    bounds.validate_allow_degenerate()?;
    for (k, c) in clusters.iter().enumerate() {
        if !bounds.contains_xy(c.center_x, c.center_y) {
            return Err(Error::Validation(format!(
                "cluster {k} center ({}, {}) lies outside the area",
                c.center_x, c.center_y
            )));
        }
        if !(c.std.is_finite() && c.std >= T::zero()) {
            return Err(Error::Validation(format!("cluster {k} std must be >= 0")));
        }
        check_energy_interval(c.energy_low, c.energy_high)?;
    }

    let mut rng = ScenarioRng::new(seed);
    let mut users = Vec::with_capacity(clusters.iter().map(|c| c.count).sum());
    for (k, c) in clusters.iter().enumerate() {
        let (cx, cy, sd) = (
            c.center_x.to_f64_lossy(),
            c.center_y.to_f64_lossy(),
            c.std.to_f64_lossy(),
        );
        let (el, eh) = (c.energy_low.to_f64_lossy(), c.energy_high.to_f64_lossy());
        for _ in 0..c.count {
            let mut placed = None;
            for _ in 0..MAX_REJECTIONS {
                let x = T::lit(cx + sd * rng.gaussian());
                let y = T::lit(cy + sd * rng.gaussian());
                if bounds.contains_xy(x, y) {
                    placed = Some((x, y));
                    break;
                }
            }
            let (x, y) = placed.ok_or_else(|| {
                Error::Validation(format!("cluster {k}: rejection sampling did not terminate"))
            })?;
            let e = if el == eh {
                c.energy_low
            } else {
                T::lit(rng.uniform_in(el, eh))
            };
            users.push(UserDevice::new(x, y, e.max(c.energy_low).min(c.energy_high)));
        }
    }
    let s = Scenario {
        users,
        rf,
        bounds,
        seed: Some(seed),
    };
    s.validate()?;
    Ok(s)
}

/// Reads and validates a scenario file.
pub fn load<T>(path: impl AsRef<Path>) -> Result<Scenario<T>>
where
    T: Real + for<'de> Deserialize<'de>,
{
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let s = from_json::<T>(&text).map_err(|e| match e {
        Error::Parse { message, .. } => Error::Parse {
            path: path.to_path_buf(),
            message,
        },
        other => other,
    })?;
    Ok(s)
}

pub fn from_json<T>(text: &str) -> Result<Scenario<T>>
where
    T: Real + for<'de> Deserialize<'de>,
{
    let s: Scenario<T> = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: "<memory>".into(),
        message: e.to_string(),
    })?;
    s.validate()?;
    Ok(s)
}

pub fn to_json<T: Real + Serialize>(scenario: &Scenario<T>) -> String {
    serde_json::to_string_pretty(scenario).expect("scenario serializes")
}

/// Writes a scenario file. Floats are written in shortest round-trip form.
pub fn save<T: Real + Serialize>(scenario: &Scenario<T>, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut text = to_json(scenario);
    text.push('\n');
    fs::write(path, text).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table_bounds() -> AreaBounds<f64> {
        AreaBounds::square(250.0, 250.0, 650.0)
    }

    #[test]
    fn uniform_reference_instance() {
        let s = generate_uniform(200, table_bounds(), 4500.0, 18000.0, RfParams::reference(), 1)
            .unwrap();
        assert_eq!(s.users.len(), 200);
        for u in &s.users {
            assert!((0.0..=250.0).contains(&u.x) && (0.0..=250.0).contains(&u.y));
            assert!((4500.0..=18000.0).contains(&u.energy));
        }
        assert_eq!(s.seed, Some(1));
    }

    #[test]
    fn degenerate_energy_interval_is_exact() {
        let eps: f64 = 1e-9;
        let b = AreaBounds::square(eps, eps, 10.0);
        let s = generate_uniform(1, b, 5.0, 5.0, RfParams::reference(), 42).unwrap();
        assert_eq!(s.users[0].energy, 5.0);
        assert!(s.users[0].x.abs() <= eps && s.users[0].y.abs() <= eps);
    }

    #[test]
    fn generators_are_deterministic() {
        let b = table_bounds();
        let a = generate_uniform(50, b, 1.0, 2.0, RfParams::reference(), 7).unwrap();
        let c = generate_uniform(50, b, 1.0, 2.0, RfParams::reference(), 7).unwrap();
        assert_eq!(a, c);
        let d = generate_uniform(50, b, 1.0, 2.0, RfParams::reference(), 8).unwrap();
        assert_ne!(a, d);

        let spec = [ClusterSpec {
            center_x: 60.0,
            center_y: 60.0,
            std: 20.0,
            count: 30,
            energy_low: 1.0,
            energy_high: 3.0,
        }];
        let x = generate_clustered(&spec, b, RfParams::reference(), 5).unwrap();
        let y = generate_clustered(&spec, b, RfParams::reference(), 5).unwrap();
        assert_eq!(x, y);
    }

    #[test]
    fn invalid_generator_arguments() {
        let b = table_bounds();
        let rf = RfParams::reference();
        assert!(matches!(
            generate_uniform(10, b, 5.0, 4.0, rf, 0),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            generate_uniform(0, b, 1.0, 2.0, rf, 0),
            Err(Error::Validation(_))
        ));
        let mut bad = b;
        bad.x_max = -1.0;
        assert!(matches!(
            generate_uniform(10, bad, 1.0, 2.0, rf, 0),
            Err(Error::Validation(_))
        ));
        assert!(matches!(
            generate_clustered::<f64>(&[], b, rf, 0),
            Err(Error::Validation(_))
        ));
    }

    #[test]
    fn zero_std_cluster_collapses_to_center() {
        let spec = [ClusterSpec {
            center_x: 80.0,
            center_y: 170.0,
            std: 0.0,
            count: 12,
            energy_low: 10.0,
            energy_high: 20.0,
        }];
        let s = generate_clustered(&spec, table_bounds(), RfParams::reference(), 3).unwrap();
        assert_eq!(s.users.len(), 12);
        assert!(s.users.iter().all(|u| u.x == 80.0 && u.y == 170.0));
    }

    #[test]
    fn two_clusters_show_density_contrast() {
        // Dense cluster on the left half, sparse on the right half.
        let spec = [
            ClusterSpec {
                center_x: 70.0,
                center_y: 125.0,
                std: 25.0,
                count: 150,
                energy_low: 4500.0,
                energy_high: 18000.0,
            },
            ClusterSpec {
                center_x: 190.0,
                center_y: 125.0,
                std: 25.0,
                count: 50,
                energy_low: 4500.0,
                energy_high: 18000.0,
            },
        ];
        let s = generate_clustered(&spec, table_bounds(), RfParams::reference(), 11).unwrap();
        assert_eq!(s.users.len(), 200);
        let left = s.users.iter().filter(|u| u.x < 125.0).count();
        let right = s.users.len() - left;
        assert!(left as f64 / right as f64 > 2.0, "left {left}, right {right}");
    }

    #[test]
    fn cluster_center_outside_area_is_rejected() {
        let spec = [ClusterSpec {
            center_x: 300.0,
            center_y: 10.0,
            std: 1.0,
            count: 1,
            energy_low: 1.0,
            energy_high: 1.0,
        }];
        assert!(generate_clustered(&spec, table_bounds(), RfParams::reference(), 0).is_err());
    }

    #[test]
    fn file_round_trip_is_identity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("s.json");
        let s = generate_uniform(200, table_bounds(), 4500.0, 18000.0, RfParams::reference(), 99)
            .unwrap();
        save(&s, &path).unwrap();
        let back: Scenario<f64> = load(&path).unwrap();
        assert_eq!(s, back);
    }

    #[test]
    fn negative_energy_is_a_validation_error() {
        let mut s = generate_uniform(3, table_bounds(), 1.0, 2.0, RfParams::reference(), 1).unwrap();
        s.users[1].energy = -1.0;
        let text = to_json(&s);
        match from_json::<f64>(&text) {
            Err(Error::Validation(msg)) => assert!(msg.contains("energy")),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn missing_noise_names_the_field() {
        let s = generate_uniform(3, table_bounds(), 1.0, 2.0, RfParams::reference(), 1).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&s)).unwrap();
        v["rf"].as_object_mut().unwrap().remove("noise");
        match from_json::<f64>(&v.to_string()) {
            Err(Error::Parse { message, .. }) => assert!(message.contains("noise"), "{message}"),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn speed_of_light_defaults_when_absent() {
        let s = generate_uniform(2, table_bounds(), 1.0, 2.0, RfParams::reference(), 1).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&to_json(&s)).unwrap();
        v["rf"].as_object_mut().unwrap().remove("speed_of_light");
        let back = from_json::<f64>(&v.to_string()).unwrap();
        assert_eq!(back.rf.speed_of_light, SPEED_OF_LIGHT);
    }

    #[test]
    fn single_precision_scenarios_work() {
        let b = AreaBounds::<f32>::square(250.0, 250.0, 650.0);
        let s = generate_uniform(20, b, 4500.0f32, 18000.0, RfParams::reference(), 4).unwrap();
        let back = from_json::<f32>(&to_json(&s)).unwrap();
        assert_eq!(s, back);
    }
}
