use anyhow::Result;
use evolute::figures::{level_curves_svg, write_level_curve_csv};
use evolute::levelset::{
    bounded_intervals, bounded_to_unbounded, sample_level_curve, singular_levels, verify_conjugacy,
    ComponentKind,
};
use evolute::pentagon::{
    degeneracy_report, invariant_i, jacobian_ratio_residual, t_map, PentagonModuli,
};
use evolute::{Error, Exact};
use serde_json::{json, Value};

use crate::output::{create, say, write_json, write_text, CliScalar};
use crate::{ConjugacyArgs, LevelsetArgs, MapArgs, SingularArgs, Status};

const DEFAULT_LEVELS: [f64; 4] = [-1.0, -0.05, 1.0, 12.0];

pub fn map(args: &MapArgs) -> Result<Status> {
    if args.arith.is_exact(true) {
        map_generic::<Exact>(args)
    } else {
        map_generic::<f64>(args)
    }
}

fn map_generic<S: CliScalar>(args: &MapArgs) -> Result<Status> {
    let j = &args.out.json;
    let start = PentagonModuli::new(S::parse(&args.x)?, S::parse(&args.y)?);
    let mut current = start.clone();
    let mut iterates = Vec::new();
    let mut stopped = None;
    for k in 0..=args.iters {
        let i = invariant_i(&current).ok();
        let loci: Vec<String> = degeneracy_report(&current)
            .iter()
            .map(|l| l.to_string())
            .collect();
        say(
            j,
            &format!(
                "T^{k}: ({}, {})  I = {}{}",
                current.x.render(),
                current.y.render(),
                i.as_ref().map_or("undefined".into(), |v| v.render()),
                if loci.is_empty() {
                    String::new()
                } else {
                    format!("  degenerate: {}", loci.join(", "))
                }
            ),
        );
        iterates.push(json!({
            "k": k,
            "x": current.x.to_json(),
            "y": current.y.to_json(),
            "invariant": i.as_ref().map(CliScalar::to_json),
            "degenerate": loci,
        }));
        if k == args.iters {
            break;
        }
        match t_map(&current) {
            Ok(next) => current = next,
            Err(e) => {
                say(j, &format!("stopped: {e}"));
                stopped = Some(e.to_string());
                break;
            }
        }
    }

    let product = match (
        invariant_i(&start),
        t_map(&start).and_then(|t| invariant_i(&t)),
    ) {
        (Ok(a), Ok(b)) => Some(a * b),
        _ => None,
    };
    if let Some(p) = &product {
        say(j, &format!("I(x,y) * I(T(x,y)) = {}", p.render()));
    }
    let symplectic = jacobian_ratio_residual(&start).ok();
    if let Some(r) = &symplectic {
        say(j, &format!("J(T^2)/(x''y'') + 4/(xy) = {}", r.render()));
    }
    let result = json!({
        "mode": args.arith.name(true),
        "iterates": iterates,
        "stopped": stopped,
        "invariant_product": product.as_ref().map(CliScalar::to_json),
        "symplectic_residual": symplectic.as_ref().map(CliScalar::to_json),
    });
    write_json(j, args, result)?;
    Ok(Status::Ok)
}

pub fn levelset(args: &LevelsetArgs) -> Result<Status> {
    if args.arith.exact {
        return Err(anyhow::Error::new(Error::ExactUnsupported).context("pentagon levelset"));
    }
    let levels = if args.r.is_empty() {
        DEFAULT_LEVELS.to_vec()
    } else {
        args.r.clone()
    };
    let curves = levels
        .iter()
        .map(|&r| sample_level_curve(r, args.samples, args.tol))
        .collect::<Result<Vec<_>, _>>()?;
    let j = &args.out.json;
    for c in &curves {
        let parts: Vec<String> = c
            .components
            .iter()
            .map(|k| {
                format!(
                    "{} (period {:.10}, basepoint ({:.6}, {:.6}))",
                    k.kind, k.period, k.basepoint.0, k.basepoint.1
                )
            })
            .collect();
        say(
            j,
            &format!(
                "r = {}: {} component(s): {}",
                c.r,
                c.components.len(),
                parts.join("; ")
            ),
        );
    }
    if let Some(path) = &args.csv {
        let mut w = create(path)?;
        write_level_curve_csv(&mut w, &curves)?;
    }
    if let Some(path) = &args.svg {
        write_text(path, &level_curves_svg(&curves))?;
    }
    write_json(j, args, serde_json::to_value(&curves)?)?;
    Ok(Status::Ok)
}

pub fn conjugacy(args: &ConjugacyArgs) -> Result<Status> {
    if args.arith.exact {
        return Err(anyhow::Error::new(Error::ExactUnsupported).context("pentagon conjugacy"));
    }
    let j = &args.out.json;
    let rep = verify_conjugacy(args.r, args.points, args.tol, args.ode_tol)?;
    say(
        j,
        &format!(
            "r = {}: lambda = {:.12} (relative change under a halved ODE tolerance {:.1e})",
            rep.r, rep.lambda, rep.lambda_relative_change
        ),
    );
    say(
        j,
        &format!(
            "basepoint ({:.10}, {:.10}) fixed by T^2 to {:.1e}, offset from (-1,0) = {:.10}",
            rep.basepoint.0, rep.basepoint.1, rep.basepoint_residual, rep.offset_from_axis_point
        ),
    );
    say(
        j,
        &format!(
            "{} samples, {} skipped; max |theta(T^2 p) + 4 theta(p)| / lambda = {:.2e} (tol {:.1e}); max differential residual {:.2e}",
            rep.samples.len(),
            rep.skipped.len(),
            rep.max_residual,
            rep.tol,
            rep.max_differential_residual
        ),
    );
    let mut passed = rep.passed;
    let mut bounded = Value::Null;
    if !bounded_intervals(args.r).is_empty() {
        let b = bounded_to_unbounded(args.r, args.points, args.ode_tol)?;
        let on = b
            .samples
            .iter()
            .filter(|s| s.image_kind == ComponentKind::Unbounded && s.located)
            .count();
        say(
            j,
            &format!(
                "bounded component: {on}/{} images under T^2 lie on the unbounded component",
                b.samples.len()
            ),
        );
        passed &= b.passed;
        bounded = serde_json::to_value(&b)?;
    }
    say(j, if passed { "PASS" } else { "FAIL" });
    let mut result = serde_json::to_value(&rep)?;
    result["bounded_to_unbounded"] = bounded;
    result["passed"] = json!(passed);
    write_json(j, args, result)?;
    Ok(if passed {
        Status::Ok
    } else {
        Status::CheckFailed
    })
}

pub fn singular(args: &SingularArgs) -> Result<Status> {
    let s = singular_levels();
    let j = &args.out.json;
    say(
        j,
        &format!(
            "singular levels: 0, (11 - 5 sqrt 5)/2 = {:.12}, (11 + 5 sqrt 5)/2 = {:.12}",
            s.values[1], s.values[2]
        ),
    );
    for p in &s.points {
        say(
            j,
            &format!(
                "  r = {:.12}: singular point ({:.12}, {:.12}), residual {:.1e}",
                p.r, p.x, p.y, p.residual
            ),
        );
    }
    write_json(j, args, serde_json::to_value(&s)?)?;
    Ok(Status::Ok)
}
