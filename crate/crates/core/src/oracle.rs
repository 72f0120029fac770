//! Brute-force references used to check the optimizer and the analytic
//! derivatives. Nothing here calls the gradient or Hessian code.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{Objective, Sym2};
use crate::real::Real;
use crate::region::FeasibleRegion;
use crate::scenario::{AreaBounds, Scenario, UserDevice};
use crate::solver::Mode;

/// Regular grid over the x/y rectangle, including both edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec<T> {
    pub spacing: T,
    pub bounds: AreaBounds<T>,
}

fn axis<T: Real>(lo: T, hi: T, h: T) -> Vec<T> {
    let n = ((hi - lo) / h).floor().to_f64_lossy().max(0.0) as usize;
    let mut out: Vec<T> = (0..=n).map(|k| lo + T::count(k) * h).collect();
    let last = *out.last().expect("axis has a node");
    if hi - last > h * T::lit(1e-9) {
        out.push(hi);
    } else if let Some(l) = out.last_mut() {
        *l = hi;
    }
    out
}

impl<T: Real> GridSpec<T> {
    pub fn new(spacing: T, bounds: AreaBounds<T>) -> Result<Self> {
        if !(spacing.is_finite() && spacing > T::zero()) {
            return Err(Error::Domain(format!("grid spacing must be > 0, got {spacing}")));
        }
        Ok(Self { spacing, bounds })
    }

    pub fn xs(&self) -> Vec<T> {
        axis(self.bounds.x_min, self.bounds.x_max, self.spacing)
    }

    pub fn ys(&self) -> Vec<T> {
        axis(self.bounds.y_min, self.bounds.y_max, self.spacing)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridResult<T> {
    pub point: (T, T),
    pub objective: T,
    pub evaluated: usize,
}

/// Exhaustive maximization of the objective over feasible grid nodes.
///
/// Nodes are visited with x ascending, then y ascending; only a strictly
/// larger value replaces the incumbent, so ties go to the smallest x, then y.
pub fn grid_search<T: Real>(
    scenario: &Scenario<T>,
    grid: &GridSpec<T>,
    mode: Mode,
) -> Result<GridResult<T>> {
    let region = match mode {
        Mode::Region => FeasibleRegion::build(scenario)?,
        Mode::Box => FeasibleRegion::box_only(scenario.bounds),
    };
    if let Some(cause) = &region.cause {
        return Err(Error::EmptyRegion(cause.to_string()));
    }
    let f = Objective::new(&scenario.users, scenario.altitude())?;
    grid_search_region(&f, &region, grid)
}

pub fn grid_search_region<T: Real>(
    f: &Objective<'_, T>,
    region: &FeasibleRegion<T>,
    grid: &GridSpec<T>,
) -> Result<GridResult<T>> {
    let ys = grid.ys();
    let mut best: Option<((T, T), T)> = None;
    let mut evaluated = 0;
    for x in grid.xs() {
        for &y in &ys {
            if !region.contains(x, y) {
                continue;
            }
            let v = f.value(x, y);
            evaluated += 1;
            if best.is_none_or(|(_, b)| v > b) {
                best = Some(((x, y), v));
            }
        }
    }
    let (point, objective) = best.ok_or_else(|| {
        Error::EmptyRegion(format!(
            "no grid node with spacing {} lies in the feasible region",
            grid.spacing
        ))
    })?;
    Ok(GridResult {
        point,
        objective,
        evaluated,
    })
}

/// Central-difference gradient of the objective with step `h`.
pub fn fd_gradient<T: Real>(
    users: &[UserDevice<T>],
    altitude: T,
    point: (T, T),
    h: T,
) -> Result<(T, T)> {
    if !(h > T::zero()) {
        return Err(Error::Domain(format!("step must be > 0, got {h}")));
    }
    let f = Objective::new(users, altitude)?;
    let (x, y) = point;
    let two_h = h + h;
    Ok((
        (f.value(x + h, y) - f.value(x - h, y)) / two_h,
        (f.value(x, y + h) - f.value(x, y - h)) / two_h,
    ))
}

/// Second-order central-difference Hessian. The mixed partial uses the
/// four-corner stencil, so the result is symmetric by construction.
pub fn fd_hessian<T: Real>(
    users: &[UserDevice<T>],
    altitude: T,
    point: (T, T),
    h: T,
) -> Result<Sym2<T>> {
    if !(h > T::zero()) {
        return Err(Error::Domain(format!("step must be > 0, got {h}")));
    }
    let f = Objective::new(users, altitude)?;
    let (x, y) = point;
    let c = f.value(x, y);
    let two = T::lit(2.0);
    let hh = h * h;
    let xx = (f.value(x + h, y) - two * c + f.value(x - h, y)) / hh;
    let yy = (f.value(x, y + h) - two * c + f.value(x, y - h)) / hh;
    let xy = (f.value(x + h, y + h) - f.value(x + h, y - h) - f.value(x - h, y + h)
        + f.value(x - h, y - h))
        / (T::lit(4.0) * hh);
    Ok(Sym2 { xx, xy, yy })
}

/// Mixed partials taken in both orders: `d/dy (d/dx F)` and `d/dx (d/dy F)`.
pub fn fd_mixed_both_orders<T: Real>(
    users: &[UserDevice<T>],
    altitude: T,
    point: (T, T),
    h: T,
) -> Result<(T, T)> {
    let (x, y) = point;
    let two_h = h + h;
    let gx = |yy: T| fd_gradient(users, altitude, (x, yy), h).map(|g| g.0);
    let gy = |xx: T| fd_gradient(users, altitude, (xx, y), h).map(|g| g.1);
    Ok((
        (gx(y + h)? - gx(y - h)?) / two_h,
        (gy(x + h)? - gy(x - h)?) / two_h,
    ))
}
