//! The `check` subcommand: wraps the library's report-producing
//! verification routines, prints a human-readable summary and optionally
//! writes the same report as JSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, ValueEnum};
use serde_json::json;

use equimid::characterization::{CandidateG, CharacterizeConfig};
use equimid::geometry::{lipschitz_check, SpacePoint};
use equimid::parametric::{
    envelope_check, jacobian_bound_check, validate_parameterization, EquidistantParam, ParamMaps,
};
use equimid::sample;
use equimid::solver::{convexity_check, EquidistantFunction};

use crate::{ensure_dimension, focal_over, parse_field, parse_ranges, CliResult, Failure};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CheckKind {
    /// 1-Lipschitz bound of the epigraph distance
    Lipschitz,
    /// Convexity of G for a convex field
    Convexity,
    /// Candidate (x, y) parameterization conditions
    Parameterization,
    /// Candidate G: gradient bound, foot-map injectivity, monotonicity
    Characterization,
    /// Paraboloid family: membership, tangency, domination
    Envelope,
    /// Lower bound on the abscissa-map Jacobian
    Jacobian,
}

#[derive(Args)]
pub struct CheckArgs {
    #[arg(value_enum)]
    kind: CheckKind,
    /// Field expression f over t1..tn
    #[arg(long = "f")]
    field: Option<String>,
    /// Candidate equidistant function G over t1..tn
    #[arg(long = "G")]
    candidate: Option<String>,
    /// Components of a candidate abscissa map (repeat n times)
    #[arg(long = "x")]
    x_maps: Vec<String>,
    /// Candidate height map
    #[arg(long = "y")]
    y_map: Option<String>,
    #[arg(long, default_value_t = 1)]
    n: usize,
    /// Sample range MIN:MAX:COUNT; repeat per axis or give one for all
    #[arg(long = "range", allow_hyphen_values = true)]
    ranges: Vec<String>,
    /// Check tolerance (falls back to the check's default)
    #[arg(long)]
    tol: Option<f64>,
    /// Contact parameter, comma-separated coordinates (envelope, jacobian)
    #[arg(long = "t", allow_hyphen_values = true)]
    contact: Option<String>,
    /// Probe parameters (envelope): points separated by `;`, coordinates
    /// by `,`; plain commas are accepted for n = 1
    #[arg(long, allow_hyphen_values = true)]
    probes: Option<String>,
    /// Write the JSON report here
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn cmd_check(args: CheckArgs) -> CliResult<u8> {
    ensure_dimension(args.n)?;
    let (pass, report) = match args.kind {
        CheckKind::Lipschitz => check_lipschitz(&args)?,
        CheckKind::Convexity => check_convexity(&args)?,
        CheckKind::Parameterization => check_parameterization(&args)?,
        CheckKind::Characterization => check_characterization(&args)?,
        CheckKind::Envelope => check_envelope(&args)?,
        CheckKind::Jacobian => check_jacobian(&args)?,
    };
    println!("overall: {}", if pass { "pass" } else { "FAIL" });
    if let Some(path) = &args.out {
        let file = File::create(path)
            .map_err(|e| Failure::Run(format!("cannot create {}: {e}", path.display())))?;
        let mut w = BufWriter::new(file);
        writeln!(w, "{}", serde_json::to_string_pretty(&report).unwrap())
            .map_err(|e| Failure::Run(format!("write failed: {e}")))?;
    }
    Ok(if pass { 0 } else { 1 })
}

fn required<'a>(opt: &'a Option<String>, what: &str) -> CliResult<&'a str> {
    opt.as_deref()
        .ok_or_else(|| Failure::Usage(format!("this check needs {what}")))
}

fn parse_point(src: &str, n: usize) -> CliResult<Vec<f64>> {
    let coords: Result<Vec<f64>, _> = src.split(',').map(|p| p.trim().parse()).collect();
    let coords = coords.map_err(|_| Failure::Usage(format!("bad point `{src}`")))?;
    if coords.len() != n {
        return Err(Failure::Usage(format!(
            "point `{src}` has {} coordinates, expected {n}",
            coords.len()
        )));
    }
    Ok(coords)
}

fn parse_probes(src: &str, n: usize) -> CliResult<Vec<Vec<f64>>> {
    if n == 1 && !src.contains(';') {
        return src
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map(|v| vec![v])
                    .map_err(|_| Failure::Usage(format!("bad probe `{p}`")))
            })
            .collect();
    }
    src.split(';').map(|p| parse_point(p, n)).collect()
}

fn check_lipschitz(args: &CheckArgs) -> CliResult<(bool, serde_json::Value)> {
    let src = required(&args.field, "a field via --f")?;
    let field = parse_field(src, args.n)?;
    let region = parse_ranges(&args.ranges, args.n, (-4.0, 4.0, 25))?;
    let focal = focal_over(field.clone(), &region);
    let tol = args.tol.unwrap_or(1e-9);

    let grid = sample::grid(&region);
    let fractions = [0.2, 0.5, 0.8];
    let points: Vec<SpacePoint<f64>> = grid
        .iter()
        .enumerate()
        .map(|(i, x)| SpacePoint::new(x.clone(), fractions[i % 3] * field.eval(x)))
        .collect();
    let mut pairs = Vec::new();
    for i in 1..points.len() {
        pairs.push((points[i - 1].clone(), points[i].clone()));
    }
    let stride = (points.len() / 2).max(1);
    for i in 0..points.len().saturating_sub(stride) {
        pairs.push((points[i].clone(), points[i + stride].clone()));
    }
    let rep = lipschitz_check(&focal, &pairs, tol)?;
    println!("{rep}");
    let pass = rep.pass();
    Ok((
        pass,
        json!({
            "check": "lipschitz",
            "pass": pass,
            "pairs": rep.pairs,
            "max_violation": rep.max_violation,
            "tol": rep.tol,
        }),
    ))
}

fn check_convexity(args: &CheckArgs) -> CliResult<(bool, serde_json::Value)> {
    let src = required(&args.field, "a field via --f")?;
    let field = parse_field(src, args.n)?;
    let region = parse_ranges(&args.ranges, args.n, (-4.0, 4.0, 21))?;
    let tol = args.tol.unwrap_or(1e-8);
    let g = EquidistantFunction::bisection(focal_over(field, &region));

    let grid = sample::grid(&region);
    let m = grid.len();
    let lambdas = [0.0, 0.25, 0.5, 0.75, 1.0];
    let mut triples = Vec::new();
    for i in 0..m / 2 {
        let a = grid[i].clone();
        let b = grid[m - 1 - i].clone();
        for &l in &lambdas {
            triples.push((a.clone(), b.clone(), l));
        }
    }
    let rep = convexity_check(&g, &triples, tol)?;
    println!("{rep}");
    let pass = rep.pass();
    Ok((
        pass,
        json!({
            "check": "convexity",
            "pass": pass,
            "triples": rep.triples,
            "worst_violation": rep.worst_violation,
            "tol": rep.tol,
        }),
    ))
}

fn check_parameterization(args: &CheckArgs) -> CliResult<(bool, serde_json::Value)> {
    if args.x_maps.len() != args.n {
        return Err(Failure::Usage(format!(
            "this check needs {} --x components, got {}",
            args.n,
            args.x_maps.len()
        )));
    }
    let y_src = required(&args.y_map, "a height map via --y")?;
    let components: Vec<_> = args
        .x_maps
        .iter()
        .map(|s| parse_field(s, args.n))
        .collect::<CliResult<_>>()?;
    let y = parse_field(y_src, args.n)?;
    let maps = ParamMaps::new(components, y);
    let region = parse_ranges(&args.ranges, args.n, (-2.0, 2.0, 9))?;
    let samples = sample::grid(&region);
    let relation_tol = args.tol.unwrap_or(1e-6);
    let rep = validate_parameterization(&maps, &samples, relation_tol, 1e-9);
    println!("{rep}");
    let pass = rep.pass();
    Ok((
        pass,
        json!({
            "check": "parameterization",
            "pass": pass,
            "g_bound_ok": rep.g_bound_ok,
            "worst_g_norm": rep.worst_g_norm,
            "relation_ok": rep.relation_ok,
            "worst_relation_residual": rep.worst_relation_residual,
            "monotone_ok": rep.monotone_ok,
            "worst_monotone_product": rep.worst_monotone_product,
        }),
    ))
}

fn check_characterization(args: &CheckArgs) -> CliResult<(bool, serde_json::Value)> {
    let src = required(&args.candidate, "a candidate via --G")?;
    let field = parse_field(src, args.n)?;
    let region = parse_ranges(&args.ranges, args.n, (-4.0, 4.0, 41))?;
    let candidate = CandidateG::new(field, region).map_err(|e| match e {
        equimid::Error::GradientUnavailable => {
            Failure::Usage("the candidate must be differentiable (no abs/min/max)".into())
        }
        other => Failure::from(other),
    })?;
    let mut cfg = CharacterizeConfig::default();
    if let Some(tol) = args.tol {
        cfg.crosscheck_tol = tol;
    }
    let rep = candidate.characterize(&cfg)?;
    println!("{rep}");
    let pass = rep.pass();
    let mut doc = json!({
        "check": "characterization",
        "pass": pass,
        "grid_size": rep.grid_size,
        "grad_bound_ok": rep.grad_bound_ok,
        "worst_grad_norm": rep.worst_grad_norm,
        "h_injective": rep.h_injective.as_ref().map(|e| json!({
            "ok": e.ok,
            "min_image_separation": e.min_image_separation,
            "worst_roundtrip": e.worst_roundtrip,
            "min_abs_jacobian_det": e.min_abs_jacobian_det,
        })),
        "y_monotone": rep.y_monotone.as_ref().map(|e| json!({
            "ok": e.ok,
            "worst_pair_product": e.worst_pair_product,
        })),
        "crosscheck": rep.crosscheck.as_ref().map(|e| json!({
            "ok": e.ok,
            "points": e.points,
            "worst_gap": e.worst_gap,
        })),
    });
    if let Some(recon) = &rep.reconstructed {
        let ts: Vec<&Vec<f64>> = recon.table.iter().map(|(t, _)| t).collect();
        let fs: Vec<f64> = recon.table.iter().map(|(_, f)| *f).collect();
        doc["reconstructed_f"] = json!({ "t": ts, "f": fs });
    }
    Ok((pass, doc))
}

fn check_envelope(args: &CheckArgs) -> CliResult<(bool, serde_json::Value)> {
    let src = required(&args.field, "a field via --f")?;
    let field = parse_field(src, args.n)?;
    let param = EquidistantParam::new(field)
        .map_err(|_| Failure::Usage("the field must be differentiable (no abs/min/max)".into()))?;
    let contact = required(&args.contact, "a contact parameter via --t")?;
    let t = parse_point(contact, args.n)?;
    let probes_src = required(&args.probes, "probe parameters via --probes")?;
    let probes = parse_probes(probes_src, args.n)?;
    let tol = args.tol.unwrap_or(1e-10);
    let rep = envelope_check(&param, &t, &probes, tol)?;
    println!("{rep}");
    let pass = rep.pass();
    Ok((
        pass,
        json!({
            "check": "envelope",
            "pass": pass,
            "membership_residual": rep.membership_residual,
            "tangency_residual": rep.tangency_residual,
            "worst_probe_margin": rep.worst_probe_margin,
            "probes": rep.probes,
            "tol": rep.tol,
        }),
    ))
}

fn check_jacobian(args: &CheckArgs) -> CliResult<(bool, serde_json::Value)> {
    let src = required(&args.field, "a field via --f")?;
    let field = parse_field(src, args.n)?;
    let param = EquidistantParam::new(field)
        .map_err(|_| Failure::Usage("the field must be differentiable (no abs/min/max)".into()))?;
    let contact = required(&args.contact, "a contact parameter via --t")?;
    let t = parse_point(contact, args.n)?;
    let mut directions: Vec<Vec<f64>> = (0..args.n)
        .map(|i| {
            let mut v = vec![0.0; args.n];
            v[i] = 1.0;
            v
        })
        .collect();
    if args.n > 1 {
        let unit = 1.0 / (args.n as f64).sqrt();
        directions.push(vec![unit; args.n]);
    }
    let tol = args.tol.unwrap_or(1e-9);
    let rep = jacobian_bound_check(&param, &t, &directions, tol)?;
    println!("{rep}");
    let pass = rep.pass();
    Ok((
        pass,
        json!({
            "check": "jacobian",
            "pass": pass,
            "directions": rep.directions,
            "worst_margin": rep.worst_margin,
            "max_route_gap": rep.max_route_gap,
            "tol": rep.tol,
        }),
    ))
}
