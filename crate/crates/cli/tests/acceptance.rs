//! Acceptance criteria. Each criterion prints one PASS/FAIL line; the test
//! fails if any criterion fails.

use std::process::Command;
use std::time::{Duration, Instant};

use uav_lifetime::channel::system_constant;
use uav_lifetime::objective::{concavity_certificate, nsd_scan, unit_hessian, unit_hessian_det, Objective, Sym2};
use uav_lifetime::oracle::{fd_gradient, fd_hessian, grid_search, GridSpec};
use uav_lifetime::region::Disk;
use uav_lifetime::rng::ScenarioRng;
use uav_lifetime::scenario::{generate_uniform, save};
use uav_lifetime::{AreaBounds, FeasibleRegion, Mode, RfParams, SolverConfig, UserDevice};
use uavplace::cases;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn within(t: Instant, limit: Duration) -> (bool, String) {
    let e = t.elapsed();
    (e < limit, format!("{:.2} s (limit {} s)", e.as_secs_f64(), limit.as_secs()))
}

fn system_constant_ratio() -> Outcome {
    let k = system_constant(&cases::table_rf(), cases::USERS).unwrap().k;
    let (_, cost, life) = cases::PUBLISHED_UNIFORM;
    let implied = cost / life;
    let rel = ((k - implied) / implied).abs();
    outcome(
        rel <= cases::K_RATIO_TOL,
        format!("K = {k:.8e} vs {implied:.8e}, rel. error {rel:.2e} (limit 5e-3)"),
    )
}

fn uniform_case() -> Outcome {
    let s = cases::uniform_scenario(cases::UNIFORM_SEED).unwrap();
    let t = Instant::now();
    let r = uav_lifetime::solver::solve(&s, &SolverConfig::default().with_mode(Mode::Box)).unwrap();
    let (fast, time) = within(t, Duration::from_secs(5));
    let off = dist((r.placement.0, r.placement.1), (125.0, 125.0));
    let pass = (5.0..=5.4).contains(&r.objective)
        && (2.70e5..=2.95e5).contains(&r.lifetime_seconds)
        && off <= 15.0
        && r.converged
        && r.iterations <= 100
        && r.placement.2 == 650.0
        && fast;
    outcome(
        pass,
        format!(
            "objective {:.4} J/m^2, lifetime {:.0} s, placement ({:.1}, {:.1}) {off:.1} m from center, {} iterations, {time}",
            r.objective, r.lifetime_seconds, r.placement.0, r.placement.1, r.iterations
        ),
    )
}

fn nonuniform_case() -> Outcome {
    let t = Instant::now();
    let mut pass = true;
    let mut parts = Vec::new();
    for seed in 1..=5 {
        let s = cases::nonuniform_scenario(seed).unwrap();
        let r = uav_lifetime::solver::solve(&s, &SolverConfig::default().with_mode(Mode::Box)).unwrap();
        let p = (r.placement.0, r.placement.1);
        let dd = dist(p, cases::cluster_centroid(&s, 0));
        let ds = dist(p, cases::cluster_centroid(&s, 1));
        pass &= dd < ds;
        parts.push(format!("seed {seed}: {dd:.1} < {ds:.1}"));
    }
    let (fast, time) = within(t, Duration::from_secs(5));
    outcome(
        pass && fast,
        format!("distance to dense vs sparse centroid, {}; {time}", parts.join(", ")),
    )
}

fn concavity_contrast() -> Outcome {
    let s = cases::uniform_scenario(cases::UNIFORM_SEED).unwrap();
    let t = Instant::now();
    let high = s.bounds.with_altitude(650.0);
    let low = s.bounds.with_altitude(30.0);
    let cert = concavity_certificate(&high);
    let scan_high = nsd_scan(&s.users, 650.0, &high, 1000, cases::NSD_SEED).unwrap();
    let scan_low = nsd_scan(&s.users, 30.0, &low, 1000, cases::NSD_SEED).unwrap();
    let (fast, time) = within(t, Duration::from_secs(2));
    let pass = cert.holds
        && (cert.threshold - 612.372).abs() < 1e-3
        && scan_high.all_nsd
        && scan_high.samples == 1000
        && scan_low.witness.is_some()
        && fast;
    outcome(
        pass,
        format!(
            "z=650: threshold {:.2}, max eigenvalue {:.2e}; z=30: witness {:?} with eigenvalue {:.2e}; {time}",
            cert.threshold, scan_high.worst_eigenvalue, scan_low.witness, scan_low.worst_eigenvalue
        ),
    )
}

fn oracle_equivalence() -> Outcome {
    let t = Instant::now();
    let rf = RfParams::reference().with_speed_of_light(3.0e8);
    let mut worst_gap_ratio: f64 = 0.0;
    let mut worst_dist: f64 = 0.0;
    let mut pass = true;
    for seed in 0..20 {
        let bounds = AreaBounds::square(50.0, 50.0, 130.0);
        let s = generate_uniform(200, bounds, 4500.0, 18000.0, rf, 500 + seed).unwrap();
        pass &= concavity_certificate(&s.bounds).holds;
        pass &= !FeasibleRegion::build(&s).unwrap().is_empty();
        let grid = GridSpec::new(1.0, s.bounds).unwrap();
        let g = grid_search(&s, &grid, Mode::Region).unwrap();
        let r = uav_lifetime::solver::solve(&s, &SolverConfig::default()).unwrap();
        let f = Objective::new(&s.users, 130.0).unwrap();
        let mut max_grad: f64 = 0.0;
        for &x in &grid.xs() {
            for &y in &grid.ys() {
                let (gx, gy) = f.gradient(x, y);
                max_grad = max_grad.max(gx.hypot(gy));
            }
        }
        let gap = (r.objective - g.objective).abs();
        let bound = grid.spacing * max_grad;
        worst_gap_ratio = worst_gap_ratio.max(gap / bound);
        let d = dist((r.placement.0, r.placement.1), g.point);
        worst_dist = worst_dist.max(d);
        pass &= gap <= bound && d <= 2f64.sqrt();
    }
    let (fast, time) = within(t, Duration::from_secs(30));
    outcome(
        pass && fast,
        format!(
            "20 instances, worst gap / (h max|grad|) = {worst_gap_ratio:.3e}, worst distance to best node {worst_dist:.3} m; {time}"
        ),
    )
}

fn derivative_checks() -> Outcome {
    let t = Instant::now();
    let mut rng = ScenarioRng::new(6);
    let (mut grad_err, mut hess_err, mut det_err): (f64, f64, f64) = (0.0, 0.0, 0.0);
    for _ in 0..100 {
        let n = 1 + (rng.next_u64() % 50) as usize;
        let side = rng.uniform_in(50.0, 300.0);
        let z = rng.uniform_in(30.0, 700.0);
        let users: Vec<UserDevice> = (0..n)
            .map(|_| {
                UserDevice::new(
                    rng.uniform_in(0.0, side),
                    rng.uniform_in(0.0, side),
                    rng.uniform_in(4500.0, 18000.0),
                )
            })
            .collect();
        let p = (rng.uniform_in(0.0, side), rng.uniform_in(0.0, side));
        let f = Objective::new(&users, z).unwrap();
        let g = f.gradient(p.0, p.1);
        let fd = fd_gradient(&users, z, p, 1e-4).unwrap();
        grad_err = grad_err.max(dist(g, fd) / g.0.hypot(g.1).max(fd.0.hypot(fd.1)));
        let h = f.hessian(p.0, p.1);
        let fh = fd_hessian(&users, z, p, z * 1e-3).unwrap();
        let diff = Sym2 {
            xx: h.xx - fh.xx,
            xy: h.xy - fh.xy,
            yy: h.yy - fh.yy,
        };
        hess_err = hess_err.max(diff.frobenius() / h.frobenius());
        for u in &users {
            let (dx, dy) = (p.0 - u.x, p.1 - u.y);
            let lhs = unit_hessian(dx, dy, z).det();
            let rhs = unit_hessian_det(dx, dy, z);
            det_err = det_err.max((lhs - rhs).abs() / lhs.abs().max(rhs.abs()));
        }
    }
    let (fast, time) = within(t, Duration::from_secs(5));
    outcome(
        grad_err < 1e-6 && hess_err < 1e-4 && det_err < 1e-10 && fast,
        format!(
            "100 pairs: gradient {grad_err:.2e} (< 1e-6), Hessian {hess_err:.2e} (< 1e-4), determinant {det_err:.2e} (< 1e-10); {time}"
        ),
    )
}

fn random_region(rng: &mut ScenarioRng) -> FeasibleRegion {
    let anchor = (rng.uniform_in(-20.0, 20.0), rng.uniform_in(-20.0, 20.0));
    let n = 2 + (rng.next_u64() % 5) as usize;
    let disks = (0..n)
        .map(|_| {
            let c = (
                anchor.0 + rng.uniform_in(-30.0, 30.0),
                anchor.1 + rng.uniform_in(-30.0, 30.0),
            );
            Disk::new(c.0, c.1, dist(c, anchor) + rng.uniform_in(0.5, 15.0))
        })
        .collect();
    let bounds = AreaBounds {
        x_min: anchor.0 - rng.uniform_in(1.0, 50.0),
        x_max: anchor.0 + rng.uniform_in(1.0, 50.0),
        y_min: anchor.1 - rng.uniform_in(1.0, 50.0),
        y_max: anchor.1 + rng.uniform_in(1.0, 50.0),
        z_min: 1.0,
        z_max: 1.0,
    };
    FeasibleRegion::from_disks(disks, bounds)
}

fn random_point(rng: &mut ScenarioRng) -> (f64, f64) {
    (rng.uniform_in(-120.0, 120.0), rng.uniform_in(-120.0, 120.0))
}

/// Closest feasible point among dense samples of every disk circle and box edge.
fn sampled_distance(r: &FeasibleRegion, q: (f64, f64), n: usize) -> f64 {
    let b = &r.bounds;
    let corners = [
        (b.x_min, b.y_min),
        (b.x_max, b.y_min),
        (b.x_max, b.y_max),
        (b.x_min, b.y_max),
    ];
    let mut best = f64::INFINITY;
    let mut visit = |p: (f64, f64)| {
        if r.contains(p.0, p.1) {
            best = best.min(dist(p, q));
        }
    };
    for k in 0..n {
        let t = k as f64 / n as f64;
        for d in &r.disks {
            let a = std::f64::consts::TAU * t;
            visit((d.cx + d.r * a.cos(), d.cy + d.r * a.sin()));
        }
        for i in 0..4 {
            let (a, c) = (corners[i], corners[(i + 1) % 4]);
            visit((a.0 + t * (c.0 - a.0), a.1 + t * (c.1 - a.1)));
        }
    }
    best
}

fn projection_checks() -> Outcome {
    let t = Instant::now();
    let mut rng = ScenarioRng::new(7);
    let regions: Vec<_> = (0..50).map(|_| random_region(&mut rng)).collect();
    let (mut idem, mut ratio, mut beaten): (f64, f64, f64) = (0.0, 0.0, f64::NEG_INFINITY);
    let mut expanded = false;
    let mut feasible = true;
    for k in 0..1000 {
        let r = &regions[k % regions.len()];
        let (a, b) = (random_point(&mut rng), random_point(&mut rng));
        let pa = r.project(a.0, a.1).unwrap();
        let pb = r.project(b.0, b.1).unwrap();
        feasible &= r.contains(pa.0, pa.1);
        let again = r.project(pa.0, pa.1).unwrap();
        idem = idem.max(dist(pa, again));
        expanded |= dist(pa, pb) > dist(a, b) + 1e-9;
        ratio = ratio.max(dist(pa, pb) / dist(a, b));
        if k < 100 {
            beaten = beaten.max(dist(pa, a) - sampled_distance(r, a, 4000));
        }
    }
    let (fast, time) = within(t, Duration::from_secs(10));
    outcome(
        feasible && idem <= 1e-8 && !expanded && beaten <= 1e-6 && fast,
        format!(
            "idempotence {idem:.1e} m (<= 1e-8), max |P(a) - P(b)| / |a - b| = {ratio:.4} over 1000 pairs, projection minus best boundary sample {beaten:.1e} m (<= 1e-6); {time}"
        ),
    )
}

fn infeasibility_surfacing() -> Outcome {
    let s = cases::uniform_scenario(cases::UNIFORM_SEED).unwrap();
    let r = uav_lifetime::solver::solve(&s, &SolverConfig::default()).unwrap();
    let cause = r.infeasible.clone().unwrap_or_default();
    let lib_ok = cause.contains("power") && cause.contains("164.9") && cause.contains("650");

    let dir = tempfile::TempDir::new().unwrap();
    let path = dir.path().join("table.json");
    save(&s, &path).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_uavplace"))
        .args(["solve", path.to_str().unwrap(), "--mode", "region"])
        .output()
        .unwrap();
    let stdout = String::from_utf8_lossy(&out.stdout);
    let code = out.status.code();
    outcome(
        lib_ok && code == Some(3) && stdout.contains("power") && stdout.contains("164.9"),
        format!("exit code {code:?}, cause: {cause}"),
    )
}

#[test]
fn acceptance_criteria() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("system constant cross-check", system_constant_ratio),
        ("uniform case reproduction", uniform_case),
        ("non-uniform case leans to the dense cluster", nonuniform_case),
        ("concavity contrast", concavity_contrast),
        ("oracle equivalence", oracle_equivalence),
        ("derivative correctness", derivative_checks),
        ("projection correctness", projection_checks),
        ("infeasibility surfacing", infeasibility_surfacing),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "{} criterion {}: {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        if !o.pass {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
