use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use warpiso::bounds::cheeger_upper_bound;
use warpiso::cheeger::certify;
use warpiso::curvature::{curvature_at, gauss_bonnet_energy, slice_shape, tangential_sectional};
use warpiso::oracle::{discrete_cheeger_intervals, fd_operator_check, DiscreteLine};
use warpiso::profiles::{
    compare_profiles, equidistant_ratio, renvol_estimate, ModelGeometry, ProfileCurve, ProfileKind,
};
use warpiso::radial::{default_grid, uniform_grid, verify_identities, DerivativeMode, RadialFunction};
use warpiso::spectrum::{lambda0_truncated, BoundaryCondition};
use warpiso::{BaseSurface, WarpFunction, WarpedProduct};

use crate::args::*;
use crate::output::{usage, Artifact, Emitted};

fn to_json<T: Serialize>(value: &T) -> Result<Value> {
    Ok(serde_json::to_value(value)?)
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be positive, got {x}")))
    }
}

fn grid_size(name: &str, n: usize, min: usize) -> Result<()> {
    if n >= min {
        Ok(())
    } else {
        Err(usage(format!("--{name} must be at least {min}, got {n}")))
    }
}

pub fn build_geometry(g: &GeometryArgs) -> Result<WarpedProduct> {
    let base = match g.base {
        BaseChoice::Hyperbolic => BaseSurface::hyperbolic(g.genus)?,
        BaseChoice::Sphere => BaseSurface::sphere(),
        BaseChoice::Torus => BaseSurface::flat_torus(g.area)?,
    };
    let warp = match g.warp {
        WarpChoice::Cosh => WarpFunction::cosh(),
        WarpChoice::CoshScaled => WarpFunction::cosh_scaled(g.rate)?,
        WarpChoice::Exp => WarpFunction::exponential(),
        WarpChoice::Constant => WarpFunction::constant(),
    };
    Ok(WarpedProduct::with_window(base, warp, g.window)?)
}

fn geometry_json(m: &WarpedProduct) -> Value {
    json!({
        "warp": m.warp.name(),
        "base": to_json(&m.base).unwrap_or(Value::Null),
        "window": m.window(),
    })
}

fn build_model(a: &ModelArgs) -> Result<ModelGeometry> {
    Ok(ModelGeometry::new(&a.genera, a.tg_core, a.outermost.unwrap_or(a.tg_core))?)
}

fn volumes(grid: &VolumeGrid) -> Result<Vec<f64>> {
    if let Some(v) = &grid.volumes {
        return Ok(v.clone());
    }
    grid_size("samples", grid.samples, 2)?;
    if grid.vmax.partial_cmp(&grid.vmin) != Some(std::cmp::Ordering::Greater) {
        return Err(usage(format!("--vmax {} must exceed --vmin {}", grid.vmax, grid.vmin)));
    }
    let step = (grid.vmax - grid.vmin) / (grid.samples - 1) as f64;
    Ok((0..grid.samples).map(|i| grid.vmin + step * i as f64).collect())
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| usage(format!("sweep value `{value}` is not valid for `{key}`")))
}

/// Arguments that can be varied by `--sweep`.
trait Sweepable: Clone + Send + Sync {
    fn set(&mut self, key: &str, value: &str) -> Result<()>;
    fn sweep_spec(&self) -> Option<&str>;
}

fn set_geometry(g: &mut GeometryArgs, key: &str, value: &str) -> Result<bool> {
    match key {
        "genus" => g.genus = parse_value(key, value)?,
        "rate" => g.rate = parse_value(key, value)?,
        "window" => g.window = parse_value(key, value)?,
        "area" => g.area = parse_value(key, value)?,
        _ => return Ok(false),
    }
    Ok(true)
}

fn set_model(m: &mut ModelArgs, key: &str, value: &str) -> Result<bool> {
    match key {
        "tg-core" => m.tg_core = parse_value(key, value)?,
        "outermost" => m.outermost = Some(parse_value(key, value)?),
        _ => return Ok(false),
    }
    Ok(true)
}

fn unknown_key(key: &str, allowed: &str) -> anyhow::Error {
    usage(format!("cannot sweep `{key}`; sweepable keys: {allowed}"))
}

impl Sweepable for CheegerArgs {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if set_geometry(&mut self.geometry, key, value)? {
            return Ok(());
        }
        match key {
            "tol" => self.tol = parse_value(key, value)?,
            _ => return Err(unknown_key(key, "genus, rate, window, area, tol")),
        }
        Ok(())
    }
    fn sweep_spec(&self) -> Option<&str> {
        self.sweep.sweep.as_deref()
    }
}

impl Sweepable for SpectrumArgs {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if set_geometry(&mut self.geometry, key, value)? {
            return Ok(());
        }
        match key {
            "L" => self.half_width = parse_value(key, value)?,
            "n" => self.n = parse_value(key, value)?,
            _ => return Err(unknown_key(key, "genus, rate, window, area, L, n")),
        }
        Ok(())
    }
    fn sweep_spec(&self) -> Option<&str> {
        self.sweep.sweep.as_deref()
    }
}

impl Sweepable for RatioArgs {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if set_model(&mut self.model, key, value)? {
            return Ok(());
        }
        match key {
            "t" => self.t = parse_value(key, value)?,
            _ => return Err(unknown_key(key, "tg-core, outermost, t")),
        }
        Ok(())
    }
    fn sweep_spec(&self) -> Option<&str> {
        self.sweep.sweep.as_deref()
    }
}

impl Sweepable for BoundArgs {
    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if set_model(&mut self.model, key, value)? {
            return Ok(());
        }
        Err(unknown_key(key, "tg-core, outermost"))
    }
    fn sweep_spec(&self) -> Option<&str> {
        self.sweep.sweep.as_deref()
    }
}

/// Runs `single` once, or once per sweep value in parallel with results in input order.
fn sweep_or_single<A: Sweepable>(
    command: &'static str,
    args: &A,
    single: impl Fn(&A) -> Result<Value> + Sync,
) -> Result<Emitted> {
    let Some(spec) = args.sweep_spec() else {
        return Ok(Emitted::ok(command, Artifact::Report(single(args)?)));
    };
    let (key, values) = spec
        .split_once('=')
        .ok_or_else(|| usage(format!("--sweep expects KEY=V1,V2,..., got `{spec}`")))?;
    let key = key.trim();
    let values: Vec<&str> = values.split(',').map(str::trim).filter(|v| !v.is_empty()).collect();
    if values.is_empty() {
        return Err(usage("--sweep needs at least one value"));
    }
    let runs = values
        .iter()
        .map(|v| {
            let mut a = args.clone();
            a.set(key, v)?;
            Ok(a)
        })
        .collect::<Result<Vec<A>>>()?;
    let results = runs.par_iter().map(&single).collect::<Result<Vec<Value>>>()?;
    let values: Vec<Value> = values
        .iter()
        .map(|v| v.parse::<f64>().map_or_else(|_| json!(v), |x| json!(x)))
        .collect();
    Ok(Emitted::ok(
        command,
        Artifact::Report(json!({
            "sweep": { "parameter": key, "values": values },
            "results": results,
        })),
    ))
}

fn cheeger_single(a: &CheegerArgs) -> Result<Value> {
    positive("tol", a.tol)?;
    let m = build_geometry(&a.geometry)?;
    let cert = certify(&m, a.tol)?;
    Ok(json!({
        "alpha": cert.alpha,
        "h_upper": cert.upper,
        "h_lower": cert.lower,
        "certified": cert.certified,
        "gap": cert.gap,
        "stationarity_residual": cert.residual,
        "sup_phi_prime": cert.sup_phi_prime,
        "sup_at": cert.sup_at,
        "tol": cert.tol,
        "geometry": geometry_json(&m),
    }))
}

fn spectrum_single(a: &SpectrumArgs) -> Result<Value> {
    positive("L", a.half_width)?;
    grid_size("n", a.n, 100)?;
    let m = build_geometry(&a.geometry)?;
    let bc = match a.bc {
        BcChoice::Dirichlet => BoundaryCondition::Dirichlet,
        BcChoice::Neumann => BoundaryCondition::Neumann,
    };
    let mut v = to_json(&lambda0_truncated(&m, a.half_width, a.n, bc)?)?;
    v["geometry"] = geometry_json(&m);
    Ok(v)
}

fn ratio_single(a: &RatioArgs) -> Result<Value> {
    let model = build_model(&a.model)?;
    let mut v = to_json(&equidistant_ratio(&model, a.t)?)?;
    v["thick_core"] = json!(model.has_thick_core());
    v["model"] = to_json(&model)?;
    Ok(v)
}

fn bound_single(a: &BoundArgs) -> Result<Value> {
    let model = build_model(&a.model)?;
    to_json(&cheeger_upper_bound(&model)?)
}

fn read_curve(path: &Path) -> Result<ProfileCurve> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let is_json = path.extension().is_some_and(|e| e.eq_ignore_ascii_case("json"));
    Ok(if is_json {
        ProfileCurve::from_json(&text)?
    } else {
        ProfileCurve::read_csv(ProfileKind::External, text.as_bytes())?
    })
}

fn profile(cmd: &ProfileCommand) -> Result<Emitted> {
    Ok(match cmd {
        ProfileCommand::Tg { model, grid } => {
            let model = build_model(model)?;
            Emitted::ok("profile tg", Artifact::Curve(ProfileCurve::sample_tg(&model, &volumes(grid)?)?))
        }
        ProfileCommand::Beta { geometry, grid } => {
            let m = build_geometry(geometry)?;
            let vols: Vec<f64> = volumes(grid)?;
            // β starts at V > 0; a leading zero from the default grid is dropped
            let vols = match vols.first() {
                Some(&v) if v == 0.0 && grid.volumes.is_none() => vols[1..].to_vec(),
                _ => vols,
            };
            Emitted::ok("profile beta", Artifact::Curve(ProfileCurve::sample_beta(&m, &vols)?))
        }
        ProfileCommand::Compare { input, model } => {
            let curve = read_curve(input)?;
            let model = build_model(model)?;
            Emitted::ok("profile compare", Artifact::Report(to_json(&compare_profiles(&curve, &model)?)?))
        }
        ProfileCommand::Renvol { input, model } => {
            let curve = read_curve(input)?;
            let model = build_model(model)?;
            Emitted::ok("profile renvol", Artifact::Report(to_json(&renvol_estimate(&curve, &model)?)?))
        }
    })
}

fn radial_function(choice: FunctionChoice) -> RadialFunction {
    match choice {
        FunctionChoice::Distance => RadialFunction::distance(),
        FunctionChoice::Sinh => RadialFunction::sinh(),
        FunctionChoice::Tanh => RadialFunction::tanh(),
        FunctionChoice::Sech => RadialFunction::sech(),
        FunctionChoice::RTanhR => RadialFunction::r_tanh_r(),
    }
}

fn oracle(cmd: &OracleCommand) -> Result<Emitted> {
    Ok(match cmd {
        OracleCommand::Search { geometry, half_width, n, components } => {
            positive("L", *half_width)?;
            grid_size("n", *n, 100)?;
            grid_size("components", *components, 1)?;
            let m = build_geometry(geometry)?;
            let line = DiscreteLine::new(&m, *half_width, *n)?;
            let mut v = to_json(&discrete_cheeger_intervals(&line, *components)?)?;
            v["half_width"] = json!(half_width);
            v["n"] = json!(n);
            v["step"] = json!(line.step);
            v["geometry"] = geometry_json(&m);
            Emitted::ok("oracle search", Artifact::Report(v))
        }
        OracleCommand::Fd { geometry, function, h, rmax, points } => {
            positive("rmax", *rmax)?;
            grid_size("points", *points, 2)?;
            let m = build_geometry(geometry)?;
            let u = radial_function(*function);
            let grid = uniform_grid(-rmax, *rmax, *points);
            let residual = fd_operator_check(&m, &u, &grid, *h)?;
            Emitted::ok(
                "oracle fd",
                Artifact::Report(json!({
                    "function": u.name(),
                    "h": h,
                    "points": points,
                    "rmax": rmax,
                    "max_residual": residual,
                    "geometry": geometry_json(&m),
                })),
            )
        }
    })
}

fn curvature(a: &CurvatureArgs) -> Result<Emitted> {
    let m = build_geometry(&a.geometry)?;
    let radii = match &a.r {
        Some(r) => r.clone(),
        None => {
            grid_size("points", a.points, 2)?;
            uniform_grid(a.rmin, a.rmax, a.points)
        }
    };
    let rows = radii
        .iter()
        .map(|&r| {
            let c = curvature_at(&m, r);
            vec![r, c.ric_radial, c.ric_tangential, c.scalar, m.slice_mean_curvature(r)]
        })
        .collect();
    Ok(Emitted::ok(
        "curvature",
        Artifact::Table {
            columns: vec!["r", "ric_radial", "ric_tangential", "scalar", "mean_curvature"],
            rows,
        },
    ))
}

#[derive(Serialize)]
struct Check {
    name: String,
    passed: bool,
    value: Option<f64>,
    tol: Option<f64>,
    error: Option<String>,
}

fn check(name: &str, value: f64, tol: f64) -> Check {
    Check { name: name.into(), passed: value <= tol, value: Some(value), tol: Some(tol), error: None }
}

fn failed(name: &str, err: anyhow::Error) -> Check {
    Check { name: name.into(), passed: false, value: None, tol: None, error: Some(format!("{err:#}")) }
}

fn identity_checks(m: &WarpedProduct, tol: f64) -> Vec<Check> {
    let grid = default_grid();
    let mut out = Vec::new();
    for (mode, tol, tag) in [
        (DerivativeMode::Analytic, tol, "analytic"),
        (DerivativeMode::FiniteDifference { step: 1e-4 }, 1e-6, "finite-difference"),
    ] {
        match verify_identities(m, &grid, tol, mode) {
            Ok(report) => out.extend(
                report
                    .checks
                    .iter()
                    .map(|c| check(&format!("{} ({tag})", c.label), c.max_residual, tol)),
            ),
            Err(e) => out.push(failed(&format!("identities ({tag})"), e.into())),
        }
    }
    out
}

fn curvature_checks(m: &WarpedProduct, tol: f64) -> Vec<Check> {
    let grid = uniform_grid(-10.0, 10.0, 1000);
    let mut out = Vec::new();
    let trace = grid
        .iter()
        .map(|&r| {
            let c = curvature_at(m, r);
            c.trace_residual().abs() / c.scalar.abs().max(1.0)
        })
        .fold(0.0, f64::max);
    out.push(check("trace identity", trace, tol));
    let gauss = grid
        .iter()
        .map(|&r| slice_shape(m, r).gauss_residual(tangential_sectional(m, r)).abs())
        .fold(0.0, f64::max);
    out.push(check("Gauss equation", gauss, tol));
    let cosh = m.warp.name() == WarpFunction::cosh().name();
    if cosh && m.base.curvature == -1.0 {
        let constant = grid
            .iter()
            .map(|&r| {
                let c = curvature_at(m, r);
                (c.ric_radial + 2.0).abs().max((c.ric_tangential + 2.0).abs()).max((c.scalar + 6.0).abs())
            })
            .fold(0.0, f64::max);
        out.push(check("constant curvature -1", constant, tol.max(1e-12)));
        let target = m.slice_area(0.0);
        let energy = uniform_grid(0.0, 20.0, 200)
            .iter()
            .map(|&r| gauss_bonnet_energy(m, r).map(|e| (e - target).abs() / target))
            .try_fold(0.0f64, |acc, e| e.map(|e| acc.max(e)));
        match energy {
            Ok(e) => out.push(check("Gauss-Bonnet energy constant", e, 1e-9)),
            Err(e) => out.push(failed("Gauss-Bonnet energy constant", e.into())),
        }
    }
    if cosh && m.base.curvature == 1.0 {
        let formula = grid
            .iter()
            .map(|&r| {
                let c = curvature_at(m, r);
                let t2 = r.tanh().powi(2);
                (c.ric_radial + 2.0)
                    .abs()
                    .max((c.ric_tangential + 2.0 * t2).abs())
                    .max((c.scalar + 6.0 - 4.0 * (1.0 - t2)).abs())
            })
            .fold(0.0, f64::max);
        out.push(check("sphere-base curvature formulas", formula, tol));
    }
    out
}

fn cheeger_checks(m: &WarpedProduct) -> Vec<Check> {
    let mut out = Vec::new();
    match certify(m, 1e-8) {
        Ok(cert) => {
            out.push(check("certificate gap", cert.gap, 1e-8));
            out.push(check("slab stationarity", cert.residual, 1e-9));
            match DiscreteLine::new(m, 10.0, 4000).and_then(|line| discrete_cheeger_intervals(&line, 1)) {
                Ok(r) => out.push(check("discrete oracle agreement", (r.quotient - cert.upper).abs(), 1e-3)),
                Err(e) => out.push(failed("discrete oracle agreement", e.into())),
            }
        }
        Err(e) => out.push(failed("certificate", e.into())),
    }
    out
}

fn verify(a: &VerifyArgs) -> Result<Emitted> {
    positive("tol", a.tol)?;
    let m = build_geometry(&a.geometry)?;
    let mut checks = Vec::new();
    if matches!(a.suite, Suite::Identities | Suite::All) {
        checks.extend(identity_checks(&m, a.tol));
    }
    if matches!(a.suite, Suite::Curvature | Suite::All) {
        checks.extend(curvature_checks(&m, a.tol));
    }
    if matches!(a.suite, Suite::Cheeger | Suite::All) {
        checks.extend(cheeger_checks(&m));
    }
    let passed = checks.iter().all(|c| c.passed);
    let suite = match a.suite {
        Suite::Identities => "identities",
        Suite::Curvature => "curvature",
        Suite::Cheeger => "cheeger",
        Suite::All => "all",
    };
    Ok(Emitted {
        command: "verify",
        artifact: Artifact::Report(json!({
            "suite": suite,
            "passed": passed,
            "checks": checks,
            "geometry": geometry_json(&m),
        })),
        exit: if passed { 0 } else { 3 },
    })
}

pub fn run(command: &Command) -> Result<Emitted> {
    match command {
        Command::Cheeger(a) => sweep_or_single("cheeger", a, cheeger_single),
        Command::Spectrum(a) => sweep_or_single("spectrum", a, spectrum_single),
        Command::Profile { command } => profile(command),
        Command::Ratio(a) => sweep_or_single("ratio", a, ratio_single),
        Command::Bound(a) => sweep_or_single("bound", a, bound_single),
        Command::Oracle { command } => oracle(command),
        Command::Curvature(a) => curvature(a),
        Command::Verify(a) => verify(a),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::Parser;

    fn parse(args: &[&str]) -> Cli {
        Cli::try_parse_from(std::iter::once("warpiso").chain(args.iter().copied())).unwrap()
    }

    fn report(args: &[&str]) -> Value {
        match run(&parse(args).command).unwrap().artifact {
            Artifact::Report(v) => v,
            _ => panic!("expected a report"),
        }
    }

    #[test]
    fn cheeger_report_fields() {
        let v = report(&["cheeger", "--genus", "3"]);
        assert!((v["h_upper"].as_f64().unwrap() - 1.66711).abs() < 1e-5);
        assert_eq!(v["certified"], json!(true));
        assert_eq!(v["geometry"]["base"]["genus"], json!(3));
    }

    #[test]
    fn sweep_keeps_input_order() {
        let v = report(&["bound", "--genera", "2", "--tg-core", "2", "--sweep", "outermost=100,2,50"]);
        let results = v["results"].as_array().unwrap();
        assert_eq!(results.len(), 3);
        assert_eq!(v["sweep"]["values"], json!([100.0, 2.0, 50.0]));
        assert_eq!(results[0]["case_taken"], json!("CoreDominates"));
        assert_eq!(results[1]["model"]["outermost_volume"], json!(2.0));
    }

    #[test]
    fn unknown_sweep_keys_are_usage_errors() {
        let Err(err) = run(&parse(&["bound", "--sweep", "genus=2,3"]).command) else { panic!("expected an error") };
        assert!(err.downcast_ref::<crate::output::UsageError>().is_some());
        let Err(err) = run(&parse(&["bound", "--sweep", "outermost"]).command) else { panic!("expected an error") };
        assert!(err.downcast_ref::<crate::output::UsageError>().is_some());
    }

    #[test]
    fn verify_flags_non_fuchsian_identities() {
        let ok = run(&parse(&["verify", "--suite", "identities"]).command).unwrap();
        assert_eq!(ok.exit, 0);
        let bad = run(&parse(&["verify", "--suite", "identities", "--warp", "exp"]).command).unwrap();
        assert_eq!(bad.exit, 3);
        let uncertifiable = run(&parse(&["verify", "--suite", "cheeger", "--warp", "constant"]).command).unwrap();
        assert_eq!(uncertifiable.exit, 3);
    }

    #[test]
    fn area_of_flat_torus_base_is_respected() {
        let v = report(&["spectrum", "--base", "torus", "--area", "2", "--warp", "constant", "--L", "3", "--n", "200", "--bc", "neumann"]);
        assert_eq!(v["geometry"]["base"]["area"], json!(2.0));
        assert!(v["lambda0"].as_f64().unwrap().abs() < 1e-8);
    }
}
