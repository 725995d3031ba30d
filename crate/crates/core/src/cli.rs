//! The `fatou` command line. Reports go to stdout as JSON; images to files.
//!
//! Exit codes: 0 on success, 1 when a computation fails (or a verify check
//! fails), 2 on usage errors.

use std::ffi::OsString;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::basins::{self, Bounds, Palette};
use crate::catalog;
use crate::lifting::{self, OrientedPolyCurve, SequenceOptions, Selector};
use crate::numerics::{ComplexValue, SpherePoint};
use crate::orbits::{self, PortraitOptions};
use crate::ratmap::{MapJson, RationalMap};
use crate::rays::{self, RayAngle, RayOptions};
use crate::report::{self, Report};
use crate::verify::{self, Group, PaperMaps};

pub const THREADS_ENV: &str = "FATOU_THREADS";

#[derive(Parser, Debug)]
#[command(name = "fatou", version, about = "Critically finite rational maps: orbits, basins, rays and lifts")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Classify a grid by superattracting basin and write a PPM image.
    Render(RenderArgs),
    /// Critical points, their orbits and the postcritical set.
    Portrait(PortraitArgs),
    /// Solutions of f^p(z) = z with multiplicities.
    Periodic(PeriodicArgs),
    /// Trace an external ray in a superattracting basin.
    Ray(RayArgs),
    /// Lift a closed curve, or follow outermost lifts for several steps.
    Lift(LiftArgs),
    /// List catalog maps or print one of them.
    Catalog(CatalogArgs),
    /// Run the numerical checks and print PASS/FAIL per check.
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
pub struct MapArg {
    /// Catalog name (paper-g, paper-degree4, pseudo-basilica:<d>,
    /// pseudo-rabbit:<d>:<idx>) or a JSON file {"num": [[re, im], ...], "den": [...]}.
    #[arg(long, value_parser = parse_map)]
    pub map: RationalMap,
}

#[derive(Args, Debug)]
pub struct RenderArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// x_min,x_max,y_min,y_max
    #[arg(long, value_parser = parse_bounds, default_value = "-3,3,-3,3", allow_hyphen_values = true)]
    pub bounds: Bounds,
    #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u32).range(1..))]
    pub width: u32,
    #[arg(long, default_value_t = 400, value_parser = clap::value_parser!(u32).range(1..))]
    pub height: u32,
    #[arg(long, default_value_t = basins::DEFAULT_TRAP_RADIUS, value_parser = positive)]
    pub trap: f64,
    #[arg(long, default_value_t = basins::DEFAULT_MAX_ITER)]
    pub max_iter: usize,
    /// Output PPM path.
    #[arg(long)]
    pub out: PathBuf,
    /// Optional JSON sidecar with grid metadata.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct PortraitArgs {
    #[command(flatten)]
    pub map: MapArg,
    #[arg(long, default_value_t = PortraitOptions::default().tol, value_parser = positive)]
    pub tol: f64,
    #[arg(long, default_value_t = PortraitOptions::default().max_iter)]
    pub max_iter: usize,
}

#[derive(Args, Debug)]
pub struct PeriodicArgs {
    #[command(flatten)]
    pub map: MapArg,
    #[arg(long, value_parser = clap::value_parser!(u32).range(1..))]
    pub period: u32,
}

#[derive(Args, Debug)]
pub struct RayArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// Reduced fraction a/b.
    #[arg(long)]
    pub angle: RayAngle,
    #[arg(long, default_value_t = RayOptions::default().depth)]
    pub depth: usize,
    #[arg(long, default_value_t = RayOptions::default().r0, value_parser = positive)]
    pub r0: f64,
    /// Landing tolerance.
    #[arg(long, default_value_t = RayOptions::default().landing_tol, value_parser = positive)]
    pub tol: f64,
    /// Superattracting fixed point: "inf" or "re,im".
    #[arg(long, default_value = "inf", value_parser = parse_sphere_point, allow_hyphen_values = true)]
    pub basin: SpherePoint,
}

#[derive(Args, Debug)]
pub struct LiftArgs {
    #[command(flatten)]
    pub map: MapArg,
    /// Circle "cx,cy,r".
    #[arg(long, value_parser = parse_circle, allow_hyphen_values = true, conflicts_with = "curve", required_unless_present = "curve")]
    pub circle: Option<(ComplexValue, f64)>,
    /// JSON file with an array of [re, im] vertices.
    #[arg(long)]
    pub curve: Option<PathBuf>,
    #[arg(long, default_value_t = 256, value_parser = clap::value_parser!(u32).range(3..))]
    pub vertices: u32,
    /// Traverse the circle clockwise.
    #[arg(long)]
    pub cw: bool,
    /// Base point standing in for the reference component: "re,im".
    #[arg(long, default_value = "1e6,0", value_parser = parse_complex, allow_hyphen_values = true)]
    pub omega: ComplexValue,
    /// Minimum chordal distance from vertices to critical values.
    #[arg(long, default_value_t = lifting::DEFAULT_EPS, value_parser = positive)]
    pub eps: f64,
    /// Follow outermost lifts for this many steps instead of a single lift.
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Args, Debug)]
pub struct CatalogArgs {
    /// Print this catalog map.
    #[arg(long)]
    pub name: Option<String>,
    /// Print the pseudo-rabbit parameters for this degree.
    #[arg(long)]
    pub rabbit_roots: Option<usize>,
    /// Solve for the denominator of the degree-3 map.
    #[arg(long)]
    pub pinch: bool,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    /// Run only this group (repeatable): catalog, portrait, periodic, rays,
    /// lifting, basins.
    #[arg(long)]
    pub only: Vec<Group>,
    /// Replace the displayed degree-3 map under test.
    #[arg(long, value_parser = parse_map)]
    pub f3: Option<RationalMap>,
    /// Also print the checks as JSON.
    #[arg(long)]
    pub json: bool,
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn positive(s: &str) -> Result<f64, String> {
    let v = parse_f64(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{s} must be positive"))
    }
}

fn parse_list(s: &str, n: usize) -> Result<Vec<f64>, String> {
    let v: Vec<f64> = s.split(',').map(parse_f64).collect::<Result<_, _>>()?;
    if v.len() != n {
        return Err(format!("expected {n} comma-separated numbers, got {}", v.len()));
    }
    Ok(v)
}

fn parse_complex(s: &str) -> Result<ComplexValue, String> {
    let v = parse_list(s, 2)?;
    Ok(ComplexValue::new(v[0], v[1]))
}

fn parse_sphere_point(s: &str) -> Result<SpherePoint, String> {
    if s.trim() == "inf" {
        Ok(SpherePoint::INFINITY)
    } else {
        parse_complex(s).map(SpherePoint::finite)
    }
}

fn parse_bounds(s: &str) -> Result<Bounds, String> {
    let v = parse_list(s, 4)?;
    Bounds::new(v[0], v[1], v[2], v[3]).map_err(|e| e.to_string())
}

fn parse_circle(s: &str) -> Result<(ComplexValue, f64), String> {
    let v = parse_list(s, 3)?;
    if !(v[2] > 0.0) {
        return Err("radius must be positive".into());
    }
    Ok((ComplexValue::new(v[0], v[1]), v[2]))
}

/// Catalog names first; anything else is read as a JSON map file.
pub fn parse_map(s: &str) -> Result<RationalMap, String> {
    match catalog::by_name(s) {
        Ok(f) => Ok(f),
        Err(catalog::CatalogError::UnknownName(_)) if Path::new(s).is_file() => {
            let text = fs::read_to_string(s).map_err(|e| format!("{s}: {e}"))?;
            let json: MapJson = serde_json::from_str(&text).map_err(|e| format!("{s}: {e}"))?;
            RationalMap::try_from(json).map_err(|e| format!("{s}: {e}"))
        }
        Err(e) => Err(e.to_string()),
    }
}

/// Applies `FATOU_THREADS` to the global rayon pool, once.
fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV).ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        // A second call in the same process finds the pool already built.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

type Failure = Box<dyn std::error::Error>;

fn emit<T: Serialize>(out: &mut dyn Write, kind: &str, body: T) -> Result<(), Failure> {
    report::to_writer(&mut *out, &Report::new(kind, body))?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct WithMap<'a, T: Serialize> {
    map: MapJson,
    #[serde(flatten)]
    body: &'a T,
}

fn with_map<'a, T: Serialize>(f: &RationalMap, body: &'a T) -> WithMap<'a, T> {
    WithMap {
        map: MapJson::from(f.clone()),
        body,
    }
}

#[derive(Serialize)]
struct RenderBody<'a> {
    out: String,
    summary: &'a basins::GridSummary,
}

fn render(a: &RenderArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let f = &a.map.map;
    let portrait = orbits::critical_portrait(f)?;
    let grid = basins::classify_grid(
        f,
        &portrait,
        a.bounds,
        (a.width as usize, a.height as usize),
        a.trap,
        a.max_iter,
    )?;
    fs::write(&a.out, basins::render_ppm(&grid, &Palette::default()))?;
    let summary = grid.summary();
    if let Some(path) = &a.json {
        fs::write(path, report::to_string(&Report::new("render", &summary)) + "\n")?;
    }
    emit(
        out,
        "render",
        with_map(
            f,
            &RenderBody {
                out: a.out.display().to_string(),
                summary: &summary,
            },
        ),
    )?;
    Ok(0)
}

fn portrait(a: &PortraitArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let opts = PortraitOptions {
        tol: a.tol,
        max_iter: a.max_iter,
    };
    let p = orbits::critical_portrait_with(&a.map.map, opts)?;
    emit(out, "portrait", with_map(&a.map.map, &p))?;
    Ok(0)
}

#[derive(Serialize)]
struct PeriodicBody {
    period: u32,
    count: usize,
    points: Vec<orbits::PeriodicPoint>,
}

fn periodic(a: &PeriodicArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let points = orbits::periodic_points(&a.map.map, a.period as usize)?;
    let body = PeriodicBody {
        period: a.period,
        count: points.iter().map(|p| p.multiplicity).sum(),
        points,
    };
    emit(out, "periodic", with_map(&a.map.map, &body))?;
    Ok(0)
}

fn ray(a: &RayArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let opts = RayOptions {
        depth: a.depth,
        r0: a.r0,
        landing_tol: a.tol,
        ..RayOptions::default()
    };
    let trace = rays::trace_ray(&a.map.map, &a.basin, a.angle, &opts)?;
    emit(out, "ray", with_map(&a.map.map, &trace))?;
    Ok(0)
}

fn lift(a: &LiftArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let f = &a.map.map;
    let gamma = match (&a.circle, &a.curve) {
        (Some((c, r)), _) => OrientedPolyCurve::circle(*c, *r, a.vertices as usize, !a.cw)?,
        (None, Some(path)) => serde_json::from_str(&fs::read_to_string(path)?)?,
        (None, None) => unreachable!("clap requires one of --circle and --curve"),
    };
    match a.steps {
        None => {
            let set = lifting::lift_curve(f, &gamma, a.omega, a.eps)?;
            emit(out, "lift", with_map(f, &set))?;
        }
        Some(n) => {
            let opts = SequenceOptions {
                eps: a.eps,
                selector: Selector::default(),
                ..SequenceOptions::default()
            };
            let seq = lifting::sign_change_sequence(f, &gamma, a.omega, n, &opts)?;
            emit(out, "sign-sequence", with_map(f, &seq))?;
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct RabbitBody {
    d: usize,
    roots: Vec<ComplexValue>,
}

#[derive(Serialize)]
struct PinchBody {
    a: ComplexValue,
    b: ComplexValue,
    denominator: crate::numerics::Polynomial,
    residuals: [f64; 3],
}

fn catalog_cmd(a: &CatalogArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    if let Some(name) = &a.name {
        let f = catalog::by_name(name)?;
        emit(out, "map", MapJson::from(f))?;
    } else if let Some(d) = a.rabbit_roots {
        let roots = catalog::pseudo_rabbit_roots(d)?;
        emit(out, "pseudo-rabbit-roots", RabbitBody { d, roots })?;
    } else if a.pinch {
        let sol = catalog::solve_pinch_params()?;
        let residuals = catalog::pinch_residuals(&sol.map);
        emit(
            out,
            "pinch",
            PinchBody {
                a: sol.a,
                b: sol.b,
                denominator: sol.denominator,
                residuals,
            },
        )?;
    } else {
        #[derive(Serialize)]
        struct Names {
            names: Vec<String>,
        }
        emit(out, "catalog", Names { names: catalog::names() })?;
    }
    Ok(0)
}

fn verify_cmd(a: &VerifyArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let mut maps = PaperMaps::default();
    if let Some(f3) = &a.f3 {
        maps.f3 = f3.clone();
    }
    let checks = verify::run(&maps, &a.only);
    for c in &checks {
        writeln!(out, "{c}")?;
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    writeln!(out, "{} checks, {} failed", checks.len(), failed)?;
    if a.json {
        #[derive(Serialize)]
        struct Body<'a> {
            passed: bool,
            checks: &'a [verify::Check],
        }
        emit(
            out,
            "verify",
            Body {
                passed: failed == 0,
                checks: &checks,
            },
        )?;
    }
    Ok(if failed == 0 { 0 } else { 1 })
}

/// Parses `args` (including the program name) and runs the command,
/// writing reports to `out` and diagnostics to stderr.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            if code == 0 {
                let _ = write!(out, "{}", e.render());
            } else {
                let _ = e.print();
            }
            return code;
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::Render(a) => render(a, out),
        Command::Portrait(a) => portrait(a, out),
        Command::Periodic(a) => periodic(a, out),
        Command::Ray(a) => ray(a, out),
        Command::Lift(a) => lift(a, out),
        Command::Catalog(a) => catalog_cmd(a, out),
        Command::Verify(a) => verify_cmd(a, out),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(io::stderr(), "error: {e}");
            1
        }
    }
}
