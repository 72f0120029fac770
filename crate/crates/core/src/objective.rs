//! Lifetime objective at fixed altitude and its derivatives.
//!
//! With `D_i(p) = |p - u_i|^2 + z^2` the objective is `F(p) = sum_i E_i / D_i`
//! (J/m^2). Dividing by the system constant `K` gives total lifetime in
//! seconds. Sums run over users in index order so results are bit-stable.

use serde::{Deserialize, Serialize};

use crate::channel::SystemConstant;
use crate::error::{Error, Result};
use crate::real::Real;
use crate::rng::ScenarioRng;
use crate::scenario::{AreaBounds, UserDevice};

/// Relative tolerance of the negative-semidefiniteness test.
pub const NSD_REL_TOL: f64 = 1e-12;

/// Symmetric 2x2 matrix.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Sym2<T> {
    pub xx: T,
    pub xy: T,
    pub yy: T,
}

impl<T: Real> Sym2<T> {
    pub fn trace(&self) -> T {
        self.xx + self.yy
    }

    pub fn det(&self) -> T {
        self.xx * self.yy - self.xy * self.xy
    }

    /// Eigenvalues, smallest first.
    pub fn eigenvalues(&self) -> (T, T) {
        let half = T::lit(0.5);
        let mean = (self.xx + self.yy) * half;
        let radius = ((self.xx - self.yy) * half).hypot(self.xy);
        (mean - radius, mean + radius)
    }

    pub fn frobenius(&self) -> T {
        (self.xx * self.xx + T::lit(2.0) * self.xy * self.xy + self.yy * self.yy).sqrt()
    }

    /// NSD with a tolerance relative to the trace magnitude.
    pub fn is_nsd(&self) -> bool {
        let (_, hi) = self.eigenvalues();
        hi <= T::lit(NSD_REL_TOL) * self.trace().abs()
    }
}

/// Unit-energy second derivatives of `1 / (dx^2 + dy^2 + z^2)`.
pub fn unit_hessian<T: Real>(dx: T, dy: T, z: T) -> Sym2<T> {
    let (dx2, dy2, z2) = (dx * dx, dy * dy, z * z);
    let d = dx2 + dy2 + z2;
    let d3 = d * d * d;
    let two = T::lit(2.0);
    Sym2 {
        xx: (T::lit(6.0) * dx2 - two * dy2 - two * z2) / d3,
        xy: T::lit(8.0) * dx * dy / d3,
        yy: (T::lit(6.0) * dy2 - two * dx2 - two * z2) / d3,
    }
}

/// Closed form of the unit-energy Hessian determinant:
/// `(4 z^2 - 12 dx^2 - 12 dy^2) / D^5`.
pub fn unit_hessian_det<T: Real>(dx: T, dy: T, z: T) -> T {
    let (dx2, dy2, z2) = (dx * dx, dy * dy, z * z);
    let d = dx2 + dy2 + z2;
    let d5 = d * d * d * d * d;
    (T::lit(4.0) * z2 - T::lit(12.0) * (dx2 + dy2)) / d5
}

/// Objective, per-user lifetimes and derivatives at one point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveEval<T> {
    /// J/m^2.
    pub value: T,
    /// Seconds per device.
    pub per_user_tau: Vec<T>,
    /// J/m^3.
    pub gradient: (T, T),
    /// J/m^4.
    pub hessian: Sym2<T>,
}

/// Sign pattern of the three per-user sufficient conditions for concavity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct UserConcavity {
    pub user_index: usize,
    /// `z^2 > 3 dx^2 - dy^2`
    pub xx_nonpositive: bool,
    /// `z^2 > 3 dy^2 - dx^2`
    pub yy_nonpositive: bool,
    /// `z^2 > 3 (dx^2 + dy^2)`
    pub det_nonnegative: bool,
}

impl UserConcavity {
    pub fn all(&self) -> bool {
        self.xx_nonpositive && self.yy_nonpositive && self.det_nonnegative
    }
}

/// `F(p) = sum_i E_i / (|p - u_i|^2 + z^2)` over a fixed user set.
#[derive(Debug, Clone, Copy)]
pub struct Objective<'a, T> {
    users: &'a [UserDevice<T>],
    z: T,
}

impl<'a, T: Real> Objective<'a, T> {
    pub fn new(users: &'a [UserDevice<T>], altitude: T) -> Result<Self> {
        if !(altitude.is_finite() && altitude > T::zero()) {
            return Err(Error::Domain(format!("altitude must be > 0, got {altitude}")));
        }
        Ok(Self { users, z: altitude })
    }

    pub fn altitude(&self) -> T {
        self.z
    }

    pub fn users(&self) -> &'a [UserDevice<T>] {
        self.users
    }

    fn denom(&self, u: &UserDevice<T>, x: T, y: T) -> T {
        let (dx, dy) = (x - u.x, y - u.y);
        dx * dx + dy * dy + self.z * self.z
    }

    pub fn value(&self, x: T, y: T) -> T {
        self.users
            .iter()
            .fold(T::zero(), |acc, u| acc + u.energy / self.denom(u, x, y))
    }

    pub fn gradient(&self, x: T, y: T) -> (T, T) {
        let m2 = T::lit(-2.0);
        self.users.iter().fold((T::zero(), T::zero()), |(gx, gy), u| {
            let d = self.denom(u, x, y);
            let w = m2 * u.energy / (d * d);
            (gx + w * (x - u.x), gy + w * (y - u.y))
        })
    }

    pub fn hessian(&self, x: T, y: T) -> Sym2<T> {
        self.users.iter().fold(Sym2::default(), |h, u| {
            let uh = unit_hessian(x - u.x, y - u.y, self.z);
            Sym2 {
                xx: h.xx + u.energy * uh.xx,
                xy: h.xy + u.energy * uh.xy,
                yy: h.yy + u.energy * uh.yy,
            }
        })
    }

    /// Full evaluation; per-user lifetimes are `E_i / (K D_i)`.
    pub fn evaluate(&self, x: T, y: T, k: &SystemConstant<T>) -> ObjectiveEval<T> {
        let per_user_tau = self
            .users
            .iter()
            .map(|u| u.energy / (k.k * self.denom(u, x, y)))
            .collect();
        ObjectiveEval {
            value: self.value(x, y),
            per_user_tau,
            gradient: self.gradient(x, y),
            hessian: self.hessian(x, y),
        }
    }

    /// Per-user sufficient concavity conditions at a point.
    pub fn user_conditions(&self, x: T, y: T) -> Vec<UserConcavity> {
        let z2 = self.z * self.z;
        let three = T::lit(3.0);
        self.users
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let (dx2, dy2) = ((x - u.x).powi(2), (y - u.y).powi(2));
                UserConcavity {
                    user_index: i,
                    xx_nonpositive: z2 > three * dx2 - dy2,
                    yy_nonpositive: z2 > three * dy2 - dx2,
                    det_nonnegative: z2 > three * (dx2 + dy2),
                }
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    /// Altitude equals the threshold to within rounding.
    Marginal,
    Fails,
}

/// Altitude test guaranteeing a concave objective over the whole area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConcavityCertificate<T> {
    pub z_min: T,
    /// Largest horizontal distance between two points of the area (its diagonal).
    pub d_max: T,
    /// `sqrt(3) d_max`.
    pub threshold: T,
    /// `z_min > threshold`.
    pub holds: bool,
    pub verdict: Verdict,
}

pub fn concavity_certificate<T: Real>(bounds: &AreaBounds<T>) -> ConcavityCertificate<T> {
    let d_max = bounds.diagonal();
    let threshold = T::lit(3.0).sqrt() * d_max;
    let z = bounds.z_min;
    let holds = z > threshold;
    let marginal = (z - threshold).abs() <= T::lit(1e-12) * threshold.max(z);
    let verdict = if marginal {
        Verdict::Marginal
    } else if holds {
        Verdict::Holds
    } else {
        Verdict::Fails
    };
    ConcavityCertificate {
        z_min: z,
        d_max,
        threshold,
        holds,
        verdict,
    }
}

/// Result of sampling Hessian eigenvalues over the area.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NsdScan<T> {
    pub all_nsd: bool,
    pub samples: usize,
    /// Largest eigenvalue at the point where it is largest relative to `|trace|`.
    pub worst_eigenvalue: T,
    pub worst_point: (T, T),
    /// First sampled point where the Hessian fails the NSD test.
    pub witness: Option<(T, T)>,
}

/// Tests the summed Hessian for negative semidefiniteness at `samples`
/// seeded uniform points of the area (draw order: x then y).
pub fn nsd_scan<T: Real>(
    users: &[UserDevice<T>],
    altitude: T,
    bounds: &AreaBounds<T>,
    samples: usize,
    seed: u64,
) -> Result<NsdScan<T>> {
    if samples == 0 {
        return Err(Error::Domain("samples must be >= 1".into()));
    }
    let f = Objective::new(users, altitude)?;
    let mut rng = ScenarioRng::new(seed);
    let (xl, xh) = (bounds.x_min.to_f64_lossy(), bounds.x_max.to_f64_lossy());
    let (yl, yh) = (bounds.y_min.to_f64_lossy(), bounds.y_max.to_f64_lossy());
    let mut worst_ratio = T::neg_infinity();
    let mut worst = (T::neg_infinity(), bounds.center());
    let mut witness = None;
    for _ in 0..samples {
        let x = T::lit(rng.uniform_in(xl, xh));
        let y = T::lit(rng.uniform_in(yl, yh));
        let h = f.hessian(x, y);
        let (_, hi) = h.eigenvalues();
        let scale = h.trace().abs().max(T::min_positive_value());
        let ratio = hi / scale;
        if ratio > worst_ratio {
            worst_ratio = ratio;
            worst = (hi, (x, y));
        }
        if witness.is_none() && !h.is_nsd() {
            witness = Some((x, y));
        }
    }
    Ok(NsdScan {
        all_nsd: witness.is_none(),
        samples,
        worst_eigenvalue: worst.0,
        worst_point: worst.1,
        witness,
    })
}
