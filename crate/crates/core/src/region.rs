//! Feasible UAV placements at fixed altitude.
//!
//! Each device admits the UAV inside a ball of radius `d_i` around itself,
//! where `d_i` is the smaller of the power-limited and the energy-limited
//! range. At altitude `z` the ball cuts the flight plane in a disk of radius
//! `sqrt(d_i^2 - z^2)`, so the feasible set is an intersection of disks with
//! the area rectangle. Projection onto it uses Dykstra's algorithm.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::channel::{system_constant, SystemConstant};
use crate::error::{Error, Result};
use crate::real::{norm2, Real};
use crate::scenario::{AreaBounds, Scenario};

/// Membership slack on constraint boundaries (m).
pub const MEMBERSHIP_TOL: f64 = 1e-9;
/// Dykstra stops once a full sweep moves the iterate less than this (m).
pub const DYKSTRA_STEP_TOL: f64 = 1e-10;
pub const DYKSTRA_MAX_SWEEPS: usize = 10_000;
/// Largest constraint violation still accepted as a non-empty witness (m).
pub const EMPTINESS_TOL: f64 = 1e-6;

/// `sqrt(P_max / K)`: farthest distance at which peak power suffices.
pub fn max_range_power<T: Real>(p_max: T, k: &SystemConstant<T>) -> Result<T> {
    if !(p_max > T::zero()) {
        return Err(Error::Domain(format!("p_max must be > 0, got {p_max}")));
    }
    Ok((p_max / k.k).sqrt())
}

/// `sqrt(E / (tau_th K))`: farthest distance at which the battery still
/// covers `tau_th` seconds of transmission.
pub fn max_range_energy<T: Real>(energy: T, tau_th: T, k: &SystemConstant<T>) -> Result<T> {
    if !(energy > T::zero() && tau_th > T::zero()) {
        return Err(Error::Domain(format!(
            "energy and tau_th must be > 0, got {energy} and {tau_th}"
        )));
    }
    Ok((energy / (tau_th * k.k)).sqrt())
}

/// Which device constraint sets `d_i`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Binding {
    Power,
    Energy,
}

impl fmt::Display for Binding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Binding::Power => "power",
            Binding::Energy => "energy",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserRangeLimit<T> {
    pub user_index: usize,
    pub d_power: T,
    pub d_energy: T,
    /// `min(d_power, d_energy)`.
    pub d_i: T,
    pub binding: Binding,
    /// Radius of the disk cut at the operating altitude; `None` when `d_i <= z`.
    pub radius_2d: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk<T> {
    pub cx: T,
    pub cy: T,
    pub r: T,
}

impl<T: Real> Disk<T> {
    pub fn new(cx: T, cy: T, r: T) -> Self {
        Self { cx, cy, r }
    }

    /// Signed distance to the boundary; negative inside.
    pub fn excess(&self, x: T, y: T) -> T {
        norm2(x - self.cx, y - self.cy) - self.r
    }

    /// Radial clamp onto the closed disk.
    pub fn project(&self, x: T, y: T) -> (T, T) {
        let (dx, dy) = (x - self.cx, y - self.cy);
        let dist = norm2(dx, dy);
        if dist <= self.r {
            (x, y)
        } else {
            let s = self.r / dist;
            (self.cx + dx * s, self.cy + dy * s)
        }
    }
}

/// Why a region has no feasible point.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EmptyCause<T> {
    /// Some devices cannot be reached at all from the operating altitude.
    Unreachable {
        altitude: T,
        user_count: usize,
        users: Vec<UserRangeLimit<T>>,
    },
    /// Every disk exists but they have no common point inside the area.
    NoCommonPoint {
        /// Certified lower bound on the worst constraint violation (m).
        lower_bound: T,
    },
}

impl<T: Real> fmt::Display for EmptyCause<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EmptyCause::Unreachable {
                altitude,
                user_count,
                users,
            } => {
                let worst = users
                    .iter()
                    .min_by(|a, b| a.d_i.partial_cmp(&b.d_i).unwrap_or(Ordering::Equal))
                    .expect("unreachable cause lists at least one user");
                let same_binding = users.iter().all(|u| u.binding == worst.binding);
                if users.len() == *user_count && same_binding {
                    let hi = users.iter().map(|u| u.d_i).fold(worst.d_i, T::max);
                    if hi - worst.d_i <= T::lit(1e-9) * hi {
                        write!(
                            f,
                            "{} constraint unsatisfiable: d_i = {:.1} m <= z_min = {} m for all {} users",
                            worst.binding, worst.d_i, altitude, user_count
                        )
                    } else {
                        write!(
                            f,
                            "{} constraint unsatisfiable: d_i in [{:.1}, {:.1}] m <= z_min = {} m for all {} users",
                            worst.binding, worst.d_i, hi, altitude, user_count
                        )
                    }
                } else {
                    let n_power = users.iter().filter(|u| u.binding == Binding::Power).count();
                    write!(
                        f,
                        "{} of {} users out of reach at z_min = {} m ({} power-limited, {} energy-limited); \
                         worst is user {} ({} constraint, d_i = {:.1} m)",
                        users.len(),
                        user_count,
                        altitude,
                        n_power,
                        users.len() - n_power,
                        worst.user_index,
                        worst.binding,
                        worst.d_i
                    )
                }
            }
            EmptyCause::NoCommonPoint { lower_bound } => write!(
                f,
                "the per-user disks have no common point inside the area (violation >= {:.3e} m)",
                lower_bound
            ),
        }
    }
}

/// Outcome of [`check_empty`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Emptiness<T> {
    pub empty: bool,
    /// Point with worst violation `<= EMPTINESS_TOL` when not empty.
    pub witness: Option<(T, T)>,
    /// Best (smallest) worst-constraint violation found.
    pub upper_bound: T,
    /// Certified lower bound on the smallest achievable violation.
    pub lower_bound: T,
}

/// Convex feasible set at a fixed altitude.
#[derive(Debug, Clone, PartialEq)]
pub struct FeasibleRegion<T> {
    pub altitude: T,
    /// Per-user range limits; empty for a box-only region.
    pub limits: Vec<UserRangeLimit<T>>,
    pub disks: Vec<Disk<T>>,
    /// Only the x/y extent is used.
    pub bounds: AreaBounds<T>,
    pub cause: Option<EmptyCause<T>>,
    pub witness: Option<(T, T)>,
    pub system_constant: Option<SystemConstant<T>>,
}

/// Result of a projection with its iteration diagnostics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Projection<T> {
    pub point: (T, T),
    pub sweeps: usize,
    pub converged: bool,
}

impl<T: Real> FeasibleRegion<T> {
    /// Full feasible set of a scenario at altitude `bounds.z_min`.
    pub fn build(scenario: &Scenario<T>) -> Result<Self> {
        let k = system_constant(&scenario.rf, scenario.users.len())?;
        let z = scenario.altitude();
        let d_power = max_range_power(scenario.rf.p_max, &k)?;
        let limits = scenario
            .users
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let d_energy = max_range_energy(u.energy, scenario.rf.tau_th, &k)?;
                let (d_i, binding) = if d_power <= d_energy {
                    (d_power, Binding::Power)
                } else {
                    (d_energy, Binding::Energy)
                };
                let radius_2d = (d_i > z).then(|| ((d_i - z) * (d_i + z)).sqrt());
                Ok(UserRangeLimit {
                    user_index: i,
                    d_power,
                    d_energy,
                    d_i,
                    binding,
                    radius_2d,
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let unreachable: Vec<_> = limits.iter().filter(|l| l.radius_2d.is_none()).copied().collect();
        let disks: Vec<_> = scenario
            .users
            .iter()
            .zip(&limits)
            .filter_map(|(u, l)| l.radius_2d.map(|r| Disk::new(u.x, u.y, r)))
            .collect();

        let mut region = Self {
            altitude: z,
            limits,
            disks,
            bounds: scenario.bounds,
            cause: None,
            witness: None,
            system_constant: Some(k),
        };
        if !unreachable.is_empty() {
            region.cause = Some(EmptyCause::Unreachable {
                altitude: z,
                user_count: scenario.users.len(),
                users: unreachable,
            });
            return Ok(region);
        }
        region.certify();
        Ok(region)
    }

    /// The area rectangle alone, ignoring every device constraint.
    pub fn box_only(bounds: AreaBounds<T>) -> Self {
        Self {
            altitude: bounds.z_min,
            limits: Vec::new(),
            disks: Vec::new(),
            bounds,
            cause: None,
            witness: Some(bounds.center()),
            system_constant: None,
        }
    }

    /// Region from explicit disks; runs the emptiness test.
    pub fn from_disks(disks: Vec<Disk<T>>, bounds: AreaBounds<T>) -> Self {
        let mut region = Self {
            altitude: bounds.z_min,
            limits: Vec::new(),
            disks,
            bounds,
            cause: None,
            witness: None,
            system_constant: None,
        };
        region.certify();
        region
    }

    fn certify(&mut self) {
        let e = check_empty(&self.disks, &self.bounds);
        if e.empty {
            self.cause = Some(EmptyCause::NoCommonPoint {
                lower_bound: e.lower_bound,
            });
        } else {
            self.witness = e.witness;
        }
    }

    pub fn is_empty(&self) -> bool {
        self.cause.is_some()
    }

    fn tolerance(&self) -> T {
        let b = &self.bounds;
        let scale = [b.x_min, b.x_max, b.y_min, b.y_max]
            .iter()
            .fold(T::one(), |m, v| m.max(v.abs()));
        T::lit(MEMBERSHIP_TOL).max(T::epsilon() * scale * T::lit(8.0))
    }

    /// Closed-set membership with a small boundary slack.
    pub fn contains(&self, x: T, y: T) -> bool {
        let tol = self.tolerance();
        let b = &self.bounds;
        x >= b.x_min - tol
            && x <= b.x_max + tol
            && y >= b.y_min - tol
            && y <= b.y_max + tol
            && self.disks.iter().all(|d| d.excess(x, y) <= tol)
    }

    /// Nearest feasible point in the Euclidean norm.
    pub fn project(&self, x: T, y: T) -> Result<(T, T)> {
        self.project_detailed(x, y).map(|p| p.point)
    }

    /// Dykstra's alternating projections over the rectangle and every disk.
    pub fn project_detailed(&self, x: T, y: T) -> Result<Projection<T>> {
        if let Some(cause) = &self.cause {
            return Err(Error::EmptyRegion(cause.to_string()));
        }
        if !(x.is_finite() && y.is_finite()) {
            return Err(Error::Numerical(format!("cannot project non-finite point ({x}, {y})")));
        }
        if self.contains(x, y) {
            return Ok(Projection {
                point: (x, y),
                sweeps: 0,
                converged: true,
            });
        }
        if self.disks.is_empty() {
            return Ok(Projection {
                point: self.bounds.clamp_xy(x, y),
                sweeps: 1,
                converged: true,
            });
        }

        let step_tol = T::lit(DYKSTRA_STEP_TOL).max(self.tolerance() * T::lit(1e-2));
        let sets = self.disks.len() + 1;
        let mut corr = vec![(T::zero(), T::zero()); sets];
        let (mut px, mut py) = (x, y);
        for sweep in 1..=DYKSTRA_MAX_SWEEPS {
            let (sx, sy) = (px, py);
            let mut corr_change = T::zero();
            for (slot, c) in corr.iter_mut().enumerate() {
                let (yx, yy) = (px + c.0, py + c.1);
                let (nx, ny) = if slot == 0 {
                    self.bounds.clamp_xy(yx, yy)
                } else {
                    self.disks[slot - 1].project(yx, yy)
                };
                let nc = (yx - nx, yy - ny);
                corr_change = corr_change.max(norm2(nc.0 - c.0, nc.1 - c.1));
                *c = nc;
                px = nx;
                py = ny;
            }
            if norm2(px - sx, py - sy) < step_tol && corr_change < step_tol {
                return Ok(Projection {
                    point: (px, py),
                    sweeps: sweep,
                    converged: true,
                });
            }
        }
        Ok(Projection {
            point: (px, py),
            sweeps: DYKSTRA_MAX_SWEEPS,
            converged: false,
        })
    }

    /// Plain-text table of per-user limits.
    pub fn limits_table(&self) -> String {
        let mut out = format!(
            "{:>6} {:>12} {:>12} {:>12} {:>8} {:>12}\n",
            "user", "d_power", "d_energy", "d_i", "binding", "radius_2d"
        );
        for l in &self.limits {
            let r = l
                .radius_2d
                .map(|r| format!("{:.3}", r))
                .unwrap_or_else(|| "-".into());
            out.push_str(&format!(
                "{:>6} {:>12.3} {:>12.3} {:>12.3} {:>8} {:>12}\n",
                l.user_index, l.d_power, l.d_energy, l.d_i, l.binding, r
            ));
        }
        out
    }
}

/// Worst signed constraint violation at a point; `<= 0` means feasible.
fn violation<T: Real>(disks: &[Disk<T>], b: &AreaBounds<T>, x: T, y: T) -> (T, Option<usize>) {
    let mut worst = (b.x_min - x).max(x - b.x_max).max(b.y_min - y).max(y - b.y_max);
    let mut arg = None;
    for (i, d) in disks.iter().enumerate() {
        let e = d.excess(x, y);
        if e > worst {
            worst = e;
            arg = Some(i);
        }
    }
    (worst, arg)
}

struct Cell<T> {
    cx: T,
    cy: T,
    half_w: T,
    half_h: T,
    lower: T,
}

impl<T: Real> PartialEq for Cell<T> {
    fn eq(&self, other: &Self) -> bool {
        self.lower == other.lower
    }
}
impl<T: Real> Eq for Cell<T> {}
impl<T: Real> PartialOrd for Cell<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<T: Real> Ord for Cell<T> {
    // Reversed: BinaryHeap pops the smallest lower bound first.
    fn cmp(&self, other: &Self) -> Ordering {
        other.lower.partial_cmp(&self.lower).unwrap_or(Ordering::Equal)
    }
}

const SUBGRADIENT_ITERS: usize = 4_000;
const MAX_CELLS: usize = 2_000_000;

/// Decides whether the disks intersect inside the rectangle.
///
/// Minimizes the worst violation `g(p) = max(max_i(|p - c_i| - r_i), box)`
/// by projected subgradient descent from the box center. If that does not
/// reach `EMPTINESS_TOL`, a best-first subdivision of the rectangle bounds
/// `g` from below using its unit Lipschitz constant; emptiness is declared
/// only once the certified lower bound exceeds the tolerance.
pub fn check_empty<T: Real>(disks: &[Disk<T>], bounds: &AreaBounds<T>) -> Emptiness<T> {
    let tol = T::lit(EMPTINESS_TOL);
    let (mut x, mut y) = bounds.center();
    let (g0, _) = violation(disks, bounds, x, y);
    let mut best = (g0, x, y);
    if g0 <= tol {
        return Emptiness {
            empty: false,
            witness: Some((x, y)),
            upper_bound: g0,
            lower_bound: T::neg_infinity(),
        };
    }

    let scale = bounds.diagonal().max(T::one());
    for k in 1..=SUBGRADIENT_ITERS {
        let (g, arg) = violation(disks, bounds, x, y);
        if g < best.0 {
            best = (g, x, y);
        }
        if g <= tol {
            break;
        }
        let (sx, sy) = match arg {
            Some(i) => {
                let d = &disks[i];
                let (dx, dy) = (x - d.cx, y - d.cy);
                let n = norm2(dx, dy);
                if n > T::zero() {
                    (dx / n, dy / n)
                } else {
                    (T::zero(), T::zero())
                }
            }
            // Box term is active only outside the box; projection handles it.
            None => (T::zero(), T::zero()),
        };
        if sx == T::zero() && sy == T::zero() {
            break;
        }
        // Polyak step toward level zero, capped by a diminishing schedule.
        let step = g.min(scale / T::count(k).sqrt());
        let (nx, ny) = bounds.clamp_xy(x - step * sx, y - step * sy);
        x = nx;
        y = ny;
    }
    if best.0 <= tol {
        return Emptiness {
            empty: false,
            witness: Some((best.1, best.2)),
            upper_bound: best.0,
            lower_bound: T::neg_infinity(),
        };
    }

    let half = T::lit(0.5);
    let (cx, cy) = bounds.center();
    let (hw, hh) = (bounds.width() * half, bounds.height() * half);
    let mut heap = BinaryHeap::new();
    let (gc, _) = violation(disks, bounds, cx, cy);
    heap.push(Cell {
        cx,
        cy,
        half_w: hw,
        half_h: hh,
        lower: gc - norm2(hw, hh),
    });
    let min_half = scale * T::epsilon() * T::lit(16.0);
    let mut processed = 0usize;
    while let Some(cell) = heap.pop() {
        if cell.lower > tol {
            return Emptiness {
                empty: true,
                witness: None,
                upper_bound: best.0,
                lower_bound: cell.lower,
            };
        }
        processed += 1;
        if processed > MAX_CELLS || norm2(cell.half_w, cell.half_h) < min_half {
            heap.push(cell);
            break;
        }
        let (qw, qh) = (cell.half_w * half, cell.half_h * half);
        for (ox, oy) in [(-qw, -qh), (qw, -qh), (-qw, qh), (qw, qh)] {
            let (px, py) = (cell.cx + ox, cell.cy + oy);
            let (g, _) = violation(disks, bounds, px, py);
            if g < best.0 {
                best = (g, px, py);
                if g <= tol {
                    return Emptiness {
                        empty: false,
                        witness: Some((px, py)),
                        upper_bound: g,
                        lower_bound: T::neg_infinity(),
                    };
                }
            }
            heap.push(Cell {
                cx: px,
                cy: py,
                half_w: qw,
                half_h: qh,
                lower: g - norm2(qw, qh),
            });
        }
    }
    // Resolution exhausted: the optimum sits within rounding of the tolerance.
    let lower = heap.peek().map(|c| c.lower).unwrap_or(best.0);
    Emptiness {
        empty: best.0 > tol,
        witness: (best.0 <= tol).then_some((best.1, best.2)),
        upper_bound: best.0,
        lower_bound: lower,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::SPEED_OF_LIGHT_ROUNDED;
    use crate::scenario::{generate_uniform, RfParams, UserDevice};
    use approx::assert_relative_eq;

    fn sq(lo: f64, hi: f64) -> AreaBounds<f64> {
        AreaBounds {
            x_min: lo,
            x_max: hi,
            y_min: lo,
            y_max: hi,
            z_min: 1.0,
            z_max: 1.0,
        }
    }

    fn table_k() -> SystemConstant<f64> {
        let rf = RfParams::reference().with_speed_of_light(SPEED_OF_LIGHT_ROUNDED);
        system_constant(&rf, 200).unwrap()
    }

    fn table_scenario() -> Scenario<f64> {
        let rf = RfParams::reference().with_speed_of_light(SPEED_OF_LIGHT_ROUNDED);
        generate_uniform(200, AreaBounds::square(250.0, 250.0, 650.0), 4500.0, 18000.0, rf, 1)
            .unwrap()
    }

    #[test]
    fn range_examples() {
        let k = table_k();
        let unit = SystemConstant { k: 0.5, ..k };
        assert_relative_eq!(max_range_power(0.5, &unit).unwrap(), 1.0);
        assert_relative_eq!(
            max_range_power(0.5, &k).unwrap(),
            164.854_098_834_978_13,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            max_range_power(2.0, &k).unwrap(),
            2.0 * max_range_power(0.5, &k).unwrap(),
            max_relative = 1e-15
        );
        let unit = SystemConstant { k: 1.0 / 900.0, ..k };
        assert_relative_eq!(max_range_energy(1.0, 900.0, &unit).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(
            max_range_energy(4500.0, 900.0, &k).unwrap(),
            521.314_433_933_041_4,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            max_range_energy(18000.0, 900.0, &k).unwrap(),
            1042.6288678660828,
            max_relative = 1e-12
        );
    }

    #[test]
    fn reference_is_power_infeasible() {
        let region = FeasibleRegion::build(&table_scenario()).unwrap();
        assert!(region.is_empty());
        assert!(region.limits.iter().all(|l| l.binding == Binding::Power));
        let msg = region.cause.as_ref().unwrap().to_string();
        assert!(msg.contains("power"), "{msg}");
        assert!(msg.contains("164.9"), "{msg}");
        assert!(msg.contains("650"), "{msg}");
        assert!(matches!(region.project(1.0, 1.0), Err(Error::EmptyRegion(_))));
    }

    #[test]
    fn mixed_unreachable_cause_names_worst_user() {
        let mut s = table_scenario();
        s.users[1].energy = 1.0;
        let region = FeasibleRegion::build(&s).unwrap();
        let msg = region.cause.unwrap().to_string();
        assert!(msg.contains("user 1") && msg.contains("energy"), "{msg}");
    }

    #[test]
    fn pythagorean_disk() {
        let mut s = table_scenario();
        s.users = vec![UserDevice::new(0.0, 0.0, 1.0)];
        s.bounds = AreaBounds {
            x_min: -10.0,
            x_max: 10.0,
            y_min: -10.0,
            y_max: 10.0,
            z_min: 1.0,
            z_max: 1.0,
        };
        // Choose p_max and energy so that d_i = 2 exactly.
        let k = system_constant(&s.rf, 1).unwrap();
        s.rf.p_max = 4.0 * k.k;
        s.users[0].energy = 100.0 * s.rf.tau_th * k.k;
        let region = FeasibleRegion::build(&s).unwrap();
        assert!(!region.is_empty());
        assert_eq!(region.disks.len(), 1);
        assert_relative_eq!(region.disks[0].r, 3f64.sqrt(), max_relative = 1e-12);
        assert_eq!(region.limits[0].binding, Binding::Power);
    }

    #[test]
    fn disjoint_disks_are_empty() {
        let r = FeasibleRegion::from_disks(
            vec![Disk::new(0.0, 0.0, 4.0), Disk::new(10.0, 0.0, 4.0)],
            sq(-20.0, 20.0),
        );
        assert!(r.is_empty());
        match r.cause.unwrap() {
            EmptyCause::NoCommonPoint { lower_bound } => assert!(lower_bound > 1e-6),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn concentric_disks_witness_near_center() {
        let e = check_empty(
            &[Disk::new(3.0, 4.0, 1.0), Disk::new(3.0, 4.0, 2.0), Disk::new(3.0, 4.0, 0.5)],
            &sq(-10.0, 10.0),
        );
        assert!(!e.empty);
        let (wx, wy) = e.witness.unwrap();
        assert!(norm2(wx - 3.0, wy - 4.0) <= 0.5 + 1e-6);
    }

    #[test]
    fn tangent_disks_meet_at_tangency_point() {
        let e = check_empty(
            &[Disk::new(0.0, 0.0, 3.0), Disk::new(5.0, 0.0, 2.0)],
            &sq(-10.0, 10.0),
        );
        assert!(!e.empty);
        let (wx, wy) = e.witness.unwrap();
        assert!(norm2(wx - 3.0, wy) < 1e-2, "witness ({wx}, {wy})");
        assert!(e.upper_bound <= EMPTINESS_TOL);
    }

    #[test]
    fn disk_outside_box_is_empty() {
        let e = check_empty(&[Disk::new(30.0, 30.0, 5.0)], &sq(0.0, 10.0));
        assert!(e.empty);
        assert!(e.lower_bound > 1e-6);
    }

    #[test]
    fn emptiness_agrees_with_grid_scan() {
        // Grid scan certifies non-emptiness when it finds a member and
        // emptiness when min g on the grid exceeds the half-spacing bound.
        let b = sq(0.0, 20.0);
        let configs: Vec<Vec<Disk<f64>>> = vec![
            vec![Disk::new(5.0, 5.0, 3.0), Disk::new(9.0, 5.0, 2.0)],
            vec![Disk::new(5.0, 5.0, 2.0), Disk::new(12.0, 5.0, 2.0)],
            vec![Disk::new(2.0, 2.0, 5.0), Disk::new(8.0, 2.0, 5.0), Disk::new(5.0, 7.0, 5.0)],
            vec![Disk::new(0.0, 10.0, 6.0), Disk::new(10.0, 10.0, 6.0), Disk::new(5.0, 0.0, 4.0)],
        ];
        let h = 0.01;
        let n = (20.0 / h) as usize;
        for disks in configs {
            let mut min_g = f64::INFINITY;
            for i in 0..=n {
                for j in 0..=n {
                    let (g, _) = violation(&disks, &b, i as f64 * h, j as f64 * h);
                    min_g = min_g.min(g);
                }
            }
            let e = check_empty(&disks, &b);
            if min_g <= 0.0 {
                assert!(!e.empty, "{disks:?}");
            } else if min_g - h / 2f64.sqrt() > EMPTINESS_TOL {
                assert!(e.empty, "{disks:?}");
            }
        }
    }

    #[test]
    fn membership_boundaries() {
        let r = FeasibleRegion::from_disks(vec![Disk::new(0.0, 0.0, 2.0)], sq(-10.0, 10.0));
        assert!(r.contains(0.0, 0.0));
        assert!(r.contains(2.0, 0.0));
        assert!(!r.contains(2.0 + 1e-6, 0.0));
        assert!(!r.contains(0.0, 10.5));
    }

    #[test]
    fn radial_pull_back() {
        let r = FeasibleRegion::from_disks(vec![Disk::new(0.0, 0.0, 2.0)], sq(-10.0, 10.0));
        let (x, y) = r.project(5.0, 0.0).unwrap();
        assert!((x - 2.0).abs() < 1e-12 && y.abs() < 1e-12);
        assert_eq!(r.project(0.5, -0.3).unwrap(), (0.5, -0.3));
    }

    #[test]
    fn lens_projection() {
        let r = FeasibleRegion::from_disks(
            vec![Disk::new(0.0, 0.0, 1.0), Disk::new(1.0, 0.0, 1.0)],
            sq(-10.0, 10.0),
        );
        let p = r.project_detailed(0.5, 5.0).unwrap();
        assert!(p.converged);
        assert!((p.point.0 - 0.5).abs() < 1e-8, "{:?}", p);
        assert!((p.point.1 - 0.75f64.sqrt()).abs() < 1e-8, "{:?}", p);
    }

    #[test]
    fn box_only_projection_clamps() {
        let r = FeasibleRegion::box_only(sq(0.0, 10.0));
        assert_eq!(r.project(-3.0, 12.0).unwrap(), (0.0, 10.0));
        assert_eq!(r.project(3.0, 4.0).unwrap(), (3.0, 4.0));
    }

    #[test]
    fn disks_shrink_with_altitude() {
        let mut s = table_scenario();
        s.rf.p_max = 40.0;
        let mut prev: Option<Vec<f64>> = None;
        for z in [100.0, 300.0, 600.0, 900.0, 1200.0] {
            s.bounds = s.bounds.with_altitude(z);
            s.bounds.z_max = z;
            let r = FeasibleRegion::build(&s).unwrap();
            let radii: Vec<f64> = r.limits.iter().map(|l| l.radius_2d.unwrap_or(0.0)).collect();
            if let Some(p) = prev {
                assert!(radii.iter().zip(&p).all(|(a, b)| a <= b));
            }
            let min_d = r.limits.iter().map(|l| l.d_i).fold(f64::INFINITY, f64::min);
            if min_d <= z {
                assert!(r.is_empty());
            }
            prev = Some(radii);
        }
    }

    #[test]
    fn table_lists_every_user() {
        let r = FeasibleRegion::build(&table_scenario()).unwrap();
        let t = r.limits_table();
        assert_eq!(t.lines().count(), 201);
        assert!(t.lines().nth(1).unwrap().contains("power"));
    }
}
