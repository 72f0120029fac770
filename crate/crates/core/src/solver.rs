//! Gradient projection ascent on the lifetime objective.
//!
//! Each iteration steps along the gradient and projects back onto the
//! feasible set: `p <- P(p + gamma * grad F(p))`, stopping once an iteration
//! moves the placement less than the tolerance.

use serde::{Deserialize, Serialize};

use crate::channel::system_constant;
use crate::error::{Error, Result};
use crate::objective::{concavity_certificate, ConcavityCertificate, Objective};
use crate::oracle::{grid_search_region, GridSpec};
use crate::real::{norm2, Real};
use crate::region::FeasibleRegion;
use crate::rng::ScenarioRng;
use crate::scenario::Scenario;

/// Feasible set the solver projects onto.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Device power/energy disks intersected with the area.
    Region,
    /// The area rectangle only.
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Init<T> {
    /// Center of the area rectangle.
    Centroid,
    Point(T, T),
    /// Uniform point of the area drawn from the given seed (x then y).
    SeededRandom(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig<T> {
    /// Initial step size (m^3/J). `None` picks the inverse spectral radius of
    /// the Hessian at the start point.
    pub step_size: Option<T>,
    /// Stop once an iteration moves less than this (m).
    pub tolerance: T,
    pub max_iters: usize,
    pub mode: Mode,
    pub init: Init<T>,
    /// Halve the step until the projected step does not decrease the objective.
    pub line_search: bool,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            step_size: None,
            tolerance: T::lit(1e-3),
            max_iters: 100,
            mode: Mode::Region,
            init: Init::Centroid,
            line_search: true,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(g) = self.step_size {
            if !(g.is_finite() && g > T::zero()) {
                return Err(Error::Validation(format!("step size must be > 0, got {g}")));
            }
        }
        if !(self.tolerance.is_finite() && self.tolerance > T::zero()) {
            return Err(Error::Validation(format!(
                "tolerance must be > 0, got {}",
                self.tolerance
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::Validation("max_iters must be >= 1".into()));
        }
        Ok(())
    }
}

/// Smallest step, relative to the initial one, tried by the line search.
const STEP_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryPoint<T> {
    pub x: T,
    pub y: T,
    pub objective: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveReport<T> {
    /// `(X, Y, Z)` in meters; `Z` is the operating altitude.
    pub placement: (T, T, T),
    /// J/m^2.
    pub objective: T,
    /// `objective / K` in seconds.
    pub lifetime_seconds: T,
    /// W/m^2.
    pub system_constant: T,
    pub iterations: usize,
    pub converged: bool,
    pub mode: Mode,
    /// Projected start point.
    pub start: (T, T),
    pub start_objective: T,
    pub initial_step_size: T,
    /// Step accepted by the last iteration.
    pub final_step_size: T,
    /// Iterates after each step; at most `max_iters` entries.
    pub trajectory: Vec<TrajectoryPoint<T>>,
    pub certificate: ConcavityCertificate<T>,
    /// Why the feasible region is empty, if it is.
    pub infeasible: Option<String>,
}

impl<T: Real + Serialize> SolveReport<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Trajectory as CSV with header `iteration,x,y,objective`.
    pub fn trajectory_csv(&self) -> String {
        let mut out = String::from("iteration,x,y,objective\n");
        out.push_str(&format!(
            "0,{},{},{}\n",
            self.start.0, self.start.1, self.start_objective
        ));
        for (i, p) in self.trajectory.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}\n", i + 1, p.x, p.y, p.objective));
        }
        out
    }
}

fn start_point<T: Real>(scenario: &Scenario<T>, init: Init<T>) -> (T, T) {
    let b = &scenario.bounds;
    match init {
        Init::Centroid => b.center(),
        Init::Point(x, y) => (x, y),
        Init::SeededRandom(seed) => {
            let mut rng = ScenarioRng::new(seed);
            let x = rng.uniform_in(b.x_min.to_f64_lossy(), b.x_max.to_f64_lossy());
            let y = rng.uniform_in(b.y_min.to_f64_lossy(), b.y_max.to_f64_lossy());
            (T::lit(x), T::lit(y))
        }
    }
}

/// Step whose ascent move is a Newton step for an isotropic quadratic with
/// the local curvature.
fn auto_step<T: Real>(f: &Objective<'_, T>, x: T, y: T) -> T {
    let (lo, hi) = f.hessian(x, y).eigenvalues();
    let rho = lo.abs().max(hi.abs());
    if rho.is_finite() && rho > T::zero() {
        return T::one() / rho;
    }
    let (gx, gy) = f.gradient(x, y);
    let g = norm2(gx, gy);
    if g.is_finite() && g > T::zero() {
        T::lit(0.1) / g
    } else {
        T::one()
    }
}

/// Maximizes total device lifetime over the chosen feasible set.
///
/// An empty region in [`Mode::Region`] yields a report with `infeasible` set
/// rather than an error.
pub fn solve<T: Real>(scenario: &Scenario<T>, config: &SolverConfig<T>) -> Result<SolveReport<T>> {
    scenario.validate()?;
    config.validate()?;
    let k = system_constant(&scenario.rf, scenario.users.len())?;
    let z = scenario.altitude();
    let certificate = concavity_certificate(&scenario.bounds);
    let f = Objective::new(&scenario.users, z)?;
    let region = match config.mode {
        Mode::Region => FeasibleRegion::build(scenario)?,
        Mode::Box => FeasibleRegion::box_only(scenario.bounds),
    };

    let (sx, sy) = start_point(scenario, config.init);
    if let Some(cause) = &region.cause {
        let v = f.value(sx, sy);
        return Ok(SolveReport {
            placement: (sx, sy, z),
            objective: v,
            lifetime_seconds: v / k.k,
            system_constant: k.k,
            iterations: 0,
            converged: false,
            mode: config.mode,
            start: (sx, sy),
            start_objective: v,
            initial_step_size: T::zero(),
            final_step_size: T::zero(),
            trajectory: Vec::new(),
            certificate,
            infeasible: Some(cause.to_string()),
        });
    }

    let (mut x, mut y) = region.project(sx, sy)?;
    let start = (x, y);
    let gamma0 = config.step_size.unwrap_or_else(|| auto_step(&f, x, y));
    let mut fx = f.value(x, y);
    let start_objective = fx;
    let mut trajectory = Vec::with_capacity(config.max_iters.min(1024));
    let mut converged = false;
    let mut gamma_last = gamma0;

    for _ in 0..config.max_iters {
        let (gx, gy) = f.gradient(x, y);
        if !(gx.is_finite() && gy.is_finite()) {
            return Err(Error::Numerical(format!(
                "non-finite gradient ({gx}, {gy}) at ({x}, {y})"
            )));
        }
        let (nx, ny, nf, gamma) = if config.line_search {
            let floor = gamma0 * T::lit(STEP_FLOOR);
            let mut gamma = gamma0;
            loop {
                let (qx, qy) = region.project(x + gamma * gx, y + gamma * gy)?;
                let fq = f.value(qx, qy);
                if fq >= fx {
                    break (qx, qy, fq, gamma);
                }
                gamma = gamma * T::lit(0.5);
                if gamma < floor {
                    break (x, y, fx, T::zero());
                }
            }
        } else {
            let (qx, qy) = region.project(x + gamma0 * gx, y + gamma0 * gy)?;
            (qx, qy, f.value(qx, qy), gamma0)
        };
        let moved = norm2(nx - x, ny - y);
        x = nx;
        y = ny;
        fx = nf;
        gamma_last = gamma;
        trajectory.push(TrajectoryPoint { x, y, objective: fx });
        if moved < config.tolerance {
            converged = true;
            break;
        }
    }

    Ok(SolveReport {
        placement: (x, y, z),
        objective: fx,
        lifetime_seconds: fx / k.k,
        system_constant: k.k,
        iterations: trajectory.len(),
        converged,
        mode: config.mode,
        start,
        start_objective,
        initial_step_size: gamma0,
        final_step_size: gamma_last,
        trajectory,
        certificate,
        infeasible: None,
    })
}

/// Grid search followed by gradient projection polishing from the best node.
///
/// The polish always uses the line search, so the returned objective is at
/// least the grid optimum.
pub fn solve_grid_refined<T: Real>(
    scenario: &Scenario<T>,
    config: &SolverConfig<T>,
    grid: &GridSpec<T>,
) -> Result<SolveReport<T>> {
    scenario.validate()?;
    config.validate()?;
    let region = match config.mode {
        Mode::Region => FeasibleRegion::build(scenario)?,
        Mode::Box => FeasibleRegion::box_only(scenario.bounds),
    };
    if region.is_empty() {
        return solve(scenario, config);
    }
    let f = Objective::new(&scenario.users, scenario.altitude())?;
    let best = grid_search_region(&f, &region, grid)?;
    let polish = SolverConfig {
        init: Init::Point(best.point.0, best.point.1),
        line_search: true,
        ..*config
    };
    let mut report = solve(scenario, &polish)?;
    if report.objective < best.objective {
        report.placement = (best.point.0, best.point.1, scenario.altitude());
        report.objective = best.objective;
        report.lifetime_seconds = best.objective / report.system_constant;
    }
    Ok(report)
}
