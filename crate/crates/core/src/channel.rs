//! Free-space line-of-sight channel: path loss, FDMA rate, minimum transmit
//! power and device lifetime. Everything is linear scale (W, J, m).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;
use crate::scenario::RfParams;

/// Exact SI speed of light (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// The rounded value `3e8` m/s, useful for matching published figures.
pub const SPEED_OF_LIGHT_ROUNDED: f64 = 3.0e8;

fn positive<T: Real>(name: &str, v: T) -> Result<()> {
    if v.is_finite() && v > T::zero() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} must be finite and > 0, got {v}")))
    }
}

/// Free-space path loss factor `(4 pi d f / c)^2`.
pub fn path_loss<T: Real>(distance: T, frequency: T, speed_of_light: T) -> Result<T> {
    positive("distance", distance)?;
    positive("frequency", frequency)?;
    positive("speed_of_light", speed_of_light)?;
    let a = T::lit(4.0) * T::PI() * distance * frequency / speed_of_light;
    Ok(a * a)
}

/// Shannon rate `B_i log2(1 + (p / L) / N)` in bit/s.
pub fn rate<T: Real>(bandwidth_per_user: T, power: T, loss: T, noise: T) -> Result<T> {
    positive("bandwidth_per_user", bandwidth_per_user)?;
    positive("power", power)?;
    positive("loss", loss)?;
    positive("noise", noise)?;
    let snr = power / loss / noise;
    Ok(bandwidth_per_user * snr.ln_1p() / T::LN_2())
}

/// Minimum power achieving `rate` over `bandwidth_per_user` through `loss`:
/// `(2^(rate / B_i) - 1) N L`.
pub fn power_for_rate<T: Real>(rate: T, bandwidth_per_user: T, loss: T, noise: T) -> Result<T> {
    positive("rate", rate)?;
    positive("bandwidth_per_user", bandwidth_per_user)?;
    positive("loss", loss)?;
    positive("noise", noise)?;
    let growth = (rate / bandwidth_per_user * T::LN_2()).exp_m1();
    if !growth.is_finite() {
        return Err(Error::Config(format!(
            "2^(rate / bandwidth) overflows for rate / bandwidth = {}",
            rate / bandwidth_per_user
        )));
    }
    Ok(growth * noise * loss)
}

/// `K` such that a device at distance `d` needs exactly `K d^2` watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemConstant<T> {
    /// W/m^2.
    pub k: T,
    pub rate: T,
    pub user_count: usize,
    pub bandwidth: T,
    pub noise: T,
    pub frequency: T,
    pub speed_of_light: T,
}

impl<T: Real> SystemConstant<T> {
    /// Spectral efficiency demanded of each device, `R |I| / B` (bit/s/Hz).
    pub fn exponent(&self) -> T {
        self.rate * T::count(self.user_count) / self.bandwidth
    }
}

/// `K = (2^(R |I| / B) - 1) N (4 pi f / c)^2`.
pub fn system_constant<T: Real>(rf: &RfParams<T>, user_count: usize) -> Result<SystemConstant<T>> {
    if user_count == 0 {
        return Err(Error::Domain("user_count must be >= 1".into()));
    }
    rf.validate().map_err(|e| Error::Domain(e.to_string()))?;
    let exponent = rf.rate * T::count(user_count) / rf.bandwidth;
    let growth = (exponent * T::LN_2()).exp_m1();
    let a = T::lit(4.0) * T::PI() * rf.frequency / rf.speed_of_light;
    let k = growth * rf.noise * a * a;
    if !growth.is_finite() || !k.is_finite() {
        return Err(Error::Config(format!(
            "2^(R |I| / B) overflows (R |I| / B = {exponent}); review rate, bandwidth and user count"
        )));
    }
    if k <= T::zero() {
        return Err(Error::Config(format!("system constant underflows to {k}")));
    }
    Ok(SystemConstant {
        k,
        rate: rf.rate,
        user_count,
        bandwidth: rf.bandwidth,
        noise: rf.noise,
        frequency: rf.frequency,
        speed_of_light: rf.speed_of_light,
    })
}

/// Transmit power needed at `distance`: `K d^2`.
pub fn required_power<T: Real>(k: &SystemConstant<T>, distance: T) -> Result<T> {
    positive("distance", distance)?;
    Ok(k.k * distance * distance)
}

/// Uplink lifetime of a device holding `energy` at `distance`: `E / (K d^2)`.
pub fn lifetime<T: Real>(energy: T, k: &SystemConstant<T>, distance: T) -> Result<T> {
    positive("energy", energy)?;
    positive("distance", distance)?;
    Ok(energy / (k.k * distance * distance))
}
