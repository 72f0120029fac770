use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::{Context, Result};
use uav_lifetime::channel::system_constant;
use uav_lifetime::objective::{concavity_certificate, nsd_scan, Verdict};
use uav_lifetime::oracle::grid_search;
use uav_lifetime::scenario::{self as scn, generate_clustered, generate_uniform};
use uav_lifetime::solver::{self, solve, solve_grid_refined};
use uav_lifetime::surface::sample_surface;
use uav_lifetime::{
    AreaBounds, ClusterSpec, ConcavityCertificate, FeasibleRegion, GridSpec, Init, Mode, RfParams, Scenario,
    SolveReport, SolverConfig,
};

use crate::args::*;
use crate::cases;

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_INFEASIBLE: u8 = 3;
pub const EXIT_NUMERICAL: u8 = 4;

/// Malformed flag value detected after clap parsing.
#[derive(Debug)]
pub struct UsageError(pub String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// Maps an error to the process exit code.
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<UsageError>().is_some() {
        return EXIT_USAGE;
    }
    match err.downcast_ref::<uav_lifetime::Error>() {
        Some(uav_lifetime::Error::EmptyRegion(_)) => EXIT_INFEASIBLE,
        Some(uav_lifetime::Error::Numerical(_)) | Some(uav_lifetime::Error::Config(_)) => {
            EXIT_NUMERICAL
        }
        _ => EXIT_USAGE,
    }
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<u8> {
    match cli.command {
        Command::Generate(a) => generate(a, out),
        Command::Check(a) => check(a, out),
        Command::Solve(a) => solve_cmd(a, out),
        Command::Grid(a) => grid(a, out),
        Command::Surface(a) => surface(a, out),
        Command::Reproduce(a) => reproduce(a, out),
    }
}

pub fn parse_area(s: &str) -> Result<(f64, f64)> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| usage(format!("--area must look like WIDTHxHEIGHT, got {s:?}")))?;
    let parse = |v: &str| -> Result<f64> {
        let x: f64 = v
            .trim()
            .parse()
            .map_err(|_| usage(format!("bad area dimension {v:?}")))?;
        if x.is_finite() && x >= 0.0 {
            Ok(x)
        } else {
            Err(usage(format!("area dimension must be >= 0, got {v:?}")))
        }
    };
    Ok((parse(w)?, parse(h)?))
}

pub fn parse_clusters(s: &str, energy_low: f64, energy_high: f64) -> Result<Vec<ClusterSpec>> {
    s.split(';')
        .filter(|c| !c.trim().is_empty())
        .map(|c| {
            let f: Vec<&str> = c.split(',').map(str::trim).collect();
            if f.len() != 4 && f.len() != 6 {
                return Err(usage(format!(
                    "cluster {c:?} must be cx,cy,std,count[,energy_low,energy_high]"
                )));
            }
            let num = |v: &str| -> Result<f64> {
                v.parse().map_err(|_| usage(format!("bad number {v:?} in cluster {c:?}")))
            };
            let count = f[3]
                .parse()
                .map_err(|_| usage(format!("bad count {:?} in cluster {c:?}", f[3])))?;
            let (lo, hi) = if f.len() == 6 {
                (num(f[4])?, num(f[5])?)
            } else {
                (energy_low, energy_high)
            };
            Ok(ClusterSpec {
                center_x: num(f[0])?,
                center_y: num(f[1])?,
                std: num(f[2])?,
                count,
                energy_low: lo,
                energy_high: hi,
            })
        })
        .collect()
}

pub fn parse_init(s: &str) -> Result<Init<f64>> {
    let s = s.trim();
    if s == "centroid" {
        return Ok(Init::Centroid);
    }
    if let Some(seed) = s.strip_prefix("random:") {
        let seed = seed
            .parse()
            .map_err(|_| usage(format!("bad seed in --init {s:?}")))?;
        return Ok(Init::SeededRandom(seed));
    }
    if let Some((x, y)) = s.split_once(',') {
        let p = |v: &str| -> Result<f64> {
            v.trim()
                .parse()
                .map_err(|_| usage(format!("bad coordinate in --init {s:?}")))
        };
        return Ok(Init::Point(p(x)?, p(y)?));
    }
    Err(usage(format!(
        "--init must be centroid, X,Y or random:SEED, got {s:?}"
    )))
}

fn rf_from(args: &RfArgs, c: Option<f64>) -> RfParams {
    let mut rf = RfParams {
        rate: args.rate,
        bandwidth: args.bandwidth,
        noise: args.noise,
        frequency: args.frequency,
        p_max: args.p_max,
        tau_th: args.tau_th,
        ..RfParams::reference()
    };
    if let Some(c) = c {
        rf.speed_of_light = c;
    }
    rf
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn generate(a: GenerateArgs, out: &mut dyn Write) -> Result<u8> {
    let (w, h) = parse_area(&a.area)?;
    let bounds = AreaBounds::square(w, h, a.altitude);
    let rf = rf_from(&a.rf, a.speed_of_light);
    let scenario = match &a.clusters {
        Some(spec) => {
            let clusters = parse_clusters(spec, a.energy_low, a.energy_high)?;
            generate_clustered(&clusters, bounds, rf, a.seed)?
        }
        None => {
            let count = a.count.ok_or_else(|| usage("--count is required"))?;
            generate_uniform(count, bounds, a.energy_low, a.energy_high, rf, a.seed)?
        }
    };
    match &a.out {
        Some(path) => {
            scn::save(&scenario, path)?;
            writeln!(
                out,
                "wrote {} users to {} (seed {})",
                scenario.users.len(),
                path.display(),
                a.seed
            )?;
        }
        None => writeln!(out, "{}", scn::to_json(&scenario))?,
    }
    Ok(EXIT_OK)
}

fn load_input(a: &ScenarioArgs) -> Result<Scenario> {
    let mut s: Scenario = scn::load(&a.scenario)?;
    if let Some(z) = a.altitude {
        if !(z.is_finite() && z > 0.0) {
            return Err(usage(format!("--z must be > 0, got {z}")));
        }
        s.bounds = s.bounds.with_altitude(z);
    }
    if let Some(c) = a.speed_of_light {
        s.rf.speed_of_light = c;
    }
    s.validate()?;
    Ok(s)
}

fn certificate_line(c: &ConcavityCertificate) -> String {
    let verdict = match c.verdict {
        Verdict::Holds => "holds (objective concave over the area)",
        Verdict::Marginal => "marginal (z_min equals the threshold)",
        Verdict::Fails => "fails (concavity not guaranteed)",
    };
    format!(
        "concavity: d_max = {:.3} m, sqrt(3) d_max = {:.3} m, z_min = {} m -> {}",
        c.d_max, c.threshold, c.z_min, verdict
    )
}

fn check(a: CheckArgs, out: &mut dyn Write) -> Result<u8> {
    let s = load_input(&a.input)?;
    let b = &s.bounds;
    let k = system_constant(&s.rf, s.users.len())?;
    writeln!(
        out,
        "scenario: {} users, area [{}, {}] x [{}, {}] m, z_min = {} m",
        s.users.len(),
        b.x_min,
        b.x_max,
        b.y_min,
        b.y_max,
        b.z_min
    )?;
    writeln!(
        out,
        "system constant K = {:.6e} W/m^2 (R|I|/B = {})",
        k.k,
        k.exponent()
    )?;
    let region = FeasibleRegion::build(&s)?;
    write!(out, "{}", region.limits_table())?;
    let code = match &region.cause {
        Some(cause) => {
            writeln!(out, "region: INFEASIBLE - {cause}")?;
            EXIT_INFEASIBLE
        }
        None => {
            let (wx, wy) = region.witness.unwrap_or_else(|| b.center());
            writeln!(
                out,
                "region: feasible ({} disks), witness ({:.3}, {:.3})",
                region.disks.len(),
                wx,
                wy
            )?;
            EXIT_OK
        }
    };
    writeln!(out, "{}", certificate_line(&concavity_certificate(b)))?;
    Ok(code)
}

fn mode_of(m: ModeArg) -> Mode {
    match m {
        ModeArg::Box => Mode::Box,
        ModeArg::Region => Mode::Region,
    }
}

pub fn summary_line(r: &SolveReport) -> String {
    format!(
        "placement = ({:.3}, {:.3}, {:.3}) m, objective = {:.6} J/m^2, lifetime = {:.1} s, iterations = {}, converged = {}",
        r.placement.0,
        r.placement.1,
        r.placement.2,
        r.objective,
        r.lifetime_seconds,
        r.iterations,
        r.converged
    )
}

fn solve_cmd(a: SolveArgs, out: &mut dyn Write) -> Result<u8> {
    let s = load_input(&a.input)?;
    let cfg = SolverConfig {
        step_size: a.gamma,
        tolerance: a.eps,
        max_iters: a.max_iters,
        mode: mode_of(a.mode),
        init: parse_init(&a.init)?,
        line_search: !a.no_line_search,
    };
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    let report = match a.grid_start {
        Some(h) => {
            let grid = GridSpec::new(h, s.bounds).map_err(|e| usage(e.to_string()))?;
            solve_grid_refined(&s, &cfg, &grid)?
        }
        None => solve(&s, &cfg)?,
    };
    if let Some(path) = &a.report {
        write_text(path, &(report.to_json() + "\n"))?;
    }
    if let Some(path) = &a.trajectory {
        write_text(path, &report.trajectory_csv())?;
    }
    if let Some(cause) = &report.infeasible {
        writeln!(out, "infeasible: {cause}")?;
        return Ok(EXIT_INFEASIBLE);
    }
    if !report.certificate.holds {
        eprintln!(
            "warning: {}; the result may be a local maximum",
            certificate_line(&report.certificate)
        );
    }
    writeln!(out, "{}", summary_line(&report))?;
    Ok(EXIT_OK)
}

fn grid(a: GridArgs, out: &mut dyn Write) -> Result<u8> {
    let s = load_input(&a.input)?;
    let spec = GridSpec::new(a.spacing, s.bounds).map_err(|e| usage(e.to_string()))?;
    let r = grid_search(&s, &spec, mode_of(a.mode))?;
    let k = system_constant(&s.rf, s.users.len())?;
    writeln!(
        out,
        "best node = ({}, {}) m, objective = {:.6} J/m^2, lifetime = {:.1} s, evaluated {} nodes",
        r.point.0,
        r.point.1,
        r.objective,
        r.objective / k.k,
        r.evaluated
    )?;
    Ok(EXIT_OK)
}

fn surface(a: SurfaceArgs, out: &mut dyn Write) -> Result<u8> {
    if !(a.spacing.is_finite() && a.spacing > 0.0) {
        return Err(usage(format!("--spacing must be > 0, got {}", a.spacing)));
    }
    let format = match a.format {
        Some(f) => f,
        None => match a.out.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => SurfaceFormat::Csv,
            Some(e) if e.eq_ignore_ascii_case("svg") => SurfaceFormat::Svg,
            _ => return Err(usage("cannot infer surface format; pass --format csv|svg")),
        },
    };
    let s = load_input(&a.input)?;
    let surf = sample_surface(&s.users, s.altitude(), &s.bounds, a.spacing)?;
    let text = match format {
        SurfaceFormat::Csv => surf.to_csv(),
        SurfaceFormat::Svg => surf.to_svg(),
    };
    write_text(&a.out, &text)?;
    let (lo, hi) = surf.range();
    writeln!(
        out,
        "wrote {} nodes to {}; value range [{:.6}, {:.6}] J/m^2; {} nodes with a non-NSD Hessian",
        surf.values.len(),
        a.out.display(),
        lo,
        hi,
        surf.non_nsd_nodes
    )?;
    Ok(EXIT_OK)
}

/// One tolerance verdict of a reproduction run.
#[derive(Debug, Clone)]
pub struct CheckLine {
    pub pass: bool,
    pub text: String,
}

fn verdict(out: &mut dyn Write, lines: &[CheckLine]) -> Result<u8> {
    for l in lines {
        writeln!(out, "{}  {}", if l.pass { "PASS" } else { "FAIL" }, l.text)?;
    }
    Ok(if lines.iter().all(|l| l.pass) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

pub fn reproduce_uniform(seed: u64, out: &mut dyn Write) -> Result<Vec<CheckLine>> {
    let s = cases::uniform_scenario(seed)?;
    let cfg = SolverConfig {
        max_iters: cases::MAX_ITERS,
        ..SolverConfig::default().with_mode(Mode::Box)
    };
    let r = solve(&s, &cfg)?;
    let ((px, py, pz), cost, life) = cases::PUBLISHED_UNIFORM;
    let implied = cost / life;
    writeln!(
        out,
        "case uniform: seed {seed}, {} users on [0, {}]^2, z = {} m, box mode",
        s.users.len(),
        cases::AREA_SIDE,
        cases::ALTITUDE
    )?;
    writeln!(out, "{:<20}{:<28}published", "", "this run")?;
    writeln!(
        out,
        "{:<20}{:<28}({px}, {py}, {pz})",
        "placement (m)",
        format!("({:.1}, {:.1}, {})", r.placement.0, r.placement.1, r.placement.2)
    )?;
    writeln!(out, "{:<20}{:<28.4}{cost}", "objective (J/m^2)", r.objective)?;
    writeln!(out, "{:<20}{:<28.0}{life}", "lifetime (s)", r.lifetime_seconds)?;
    writeln!(
        out,
        "{:<20}{:<28}{:.5e} (cost / lifetime)",
        "K (W/m^2)",
        format!("{:.5e}", r.system_constant),
        implied
    )?;

    let k_err = ((r.system_constant - implied) / implied).abs();
    let off = dist((r.placement.0, r.placement.1), cases::PLACEMENT_CENTER);
    let region = solver::solve(&s, &SolverConfig::default())?;
    let mut lines = vec![
        CheckLine {
            pass: k_err <= cases::K_RATIO_TOL,
            text: format!("K within 0.5% of published cost/lifetime ratio (rel. error {k_err:.2e})"),
        },
        CheckLine {
            pass: (cases::COST_BAND.0..=cases::COST_BAND.1).contains(&r.objective),
            text: format!(
                "objective {:.4} J/m^2 in [{}, {}]",
                r.objective,
                cases::COST_BAND.0,
                cases::COST_BAND.1
            ),
        },
        CheckLine {
            pass: (cases::LIFETIME_BAND.0..=cases::LIFETIME_BAND.1).contains(&r.lifetime_seconds),
            text: format!(
                "lifetime {:.0} s in [{:.2e}, {:.2e}]",
                r.lifetime_seconds,
                cases::LIFETIME_BAND.0,
                cases::LIFETIME_BAND.1
            ),
        },
        CheckLine {
            pass: off <= cases::PLACEMENT_RADIUS,
            text: format!(
                "placement {off:.1} m from ({}, {}) (limit {} m)",
                cases::PLACEMENT_CENTER.0,
                cases::PLACEMENT_CENTER.1,
                cases::PLACEMENT_RADIUS
            ),
        },
        CheckLine {
            pass: r.converged && r.iterations <= cases::MAX_ITERS,
            text: format!(
                "converged in {} iterations (limit {})",
                r.iterations,
                cases::MAX_ITERS
            ),
        },
    ];
    lines.push(CheckLine {
        pass: region.infeasible.is_some(),
        text: format!(
            "region mode: {}",
            region.infeasible.as_deref().unwrap_or("unexpectedly feasible")
        ),
    });
    Ok(lines)
}

pub fn reproduce_nonuniform(seed: u64, out: &mut dyn Write) -> Result<Vec<CheckLine>> {
    let s = cases::nonuniform_scenario(seed)?;
    let r = solve(&s, &SolverConfig::default().with_mode(Mode::Box))?;
    let dense = cases::cluster_centroid(&s, 0);
    let sparse = cases::cluster_centroid(&s, 1);
    let p = (r.placement.0, r.placement.1);
    let ((px, py, pz), cost, life) = cases::PUBLISHED_NONUNIFORM;
    writeln!(
        out,
        "case nonuniform: seed {seed}, 150 + 50 users around ({}, {}) and ({}, {}), z = {} m, box mode",
        cases::DENSE_CENTER.0,
        cases::DENSE_CENTER.1,
        cases::SPARSE_CENTER.0,
        cases::SPARSE_CENTER.1,
        cases::ALTITUDE
    )?;
    writeln!(out, "{:<20}{:<28}published", "", "this run")?;
    writeln!(
        out,
        "{:<20}{:<28}({px}, {py}, {pz})",
        "placement (m)",
        format!("({:.1}, {:.1}, {})", p.0, p.1, r.placement.2)
    )?;
    writeln!(out, "{:<20}{:<28.4}{cost}", "objective (J/m^2)", r.objective)?;
    writeln!(out, "{:<20}{:<28.0}{life}", "lifetime (s)", r.lifetime_seconds)?;
    writeln!(
        out,
        "dense centroid ({:.1}, {:.1}), sparse centroid ({:.1}, {:.1})",
        dense.0, dense.1, sparse.0, sparse.1
    )?;
    let (dd, ds) = (dist(p, dense), dist(p, sparse));
    Ok(vec![
        CheckLine {
            pass: dd < ds,
            text: format!("placement nearer the dense cluster ({dd:.1} m vs {ds:.1} m)"),
        },
        CheckLine {
            pass: r.converged,
            text: format!("converged in {} iterations", r.iterations),
        },
    ])
}

pub fn reproduce_concavity(seed: u64, out: &mut dyn Write) -> Result<Vec<CheckLine>> {
    let s = cases::uniform_scenario(seed)?;
    let mut lines = Vec::new();
    for (z, expect_concave) in [(cases::ALTITUDE, true), (cases::LOW_ALTITUDE, false)] {
        let b = s.bounds.with_altitude(z);
        let cert = concavity_certificate(&b);
        let scan = nsd_scan(&s.users, z, &b, cases::NSD_SAMPLES, cases::NSD_SEED)?;
        writeln!(out, "z = {z} m: {}", certificate_line(&cert))?;
        writeln!(
            out,
            "z = {z} m: {} samples, largest eigenvalue {:.3e} J/m^4 at ({:.1}, {:.1})",
            scan.samples, scan.worst_eigenvalue, scan.worst_point.0, scan.worst_point.1
        )?;
        if expect_concave {
            lines.push(CheckLine {
                pass: cert.holds && scan.all_nsd,
                text: format!(
                    "z = {z} m: certificate holds ({z} > {:.1}) and Hessian NSD at all {} samples",
                    cert.threshold, scan.samples
                ),
            });
        } else {
            let text = match scan.witness {
                Some((wx, wy)) => format!(
                    "z = {z} m: certificate fails and Hessian has a positive eigenvalue at ({wx:.1}, {wy:.1})"
                ),
                None => format!("z = {z} m: no non-concavity witness among {} samples", scan.samples),
            };
            lines.push(CheckLine {
                pass: !cert.holds && scan.witness.is_some(),
                text,
            });
        }
    }
    Ok(lines)
}

fn reproduce(a: ReproduceArgs, out: &mut dyn Write) -> Result<u8> {
    let lines = match a.case {
        Case::Uniform => reproduce_uniform(a.seed.unwrap_or(cases::UNIFORM_SEED), out)?,
        Case::Nonuniform => reproduce_nonuniform(a.seed.unwrap_or(cases::NONUNIFORM_SEED), out)?,
        Case::Concavity => reproduce_concavity(a.seed.unwrap_or(cases::UNIFORM_SEED), out)?,
    };
    verdict(out, &lines)
}
