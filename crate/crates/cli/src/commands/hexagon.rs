use anyhow::{bail, Result};
use evolute::figures::{hexagon_orbits_svg, write_monte_carlo_csv, write_orbit_csv};
use evolute::hexagon::{
    abcd, axis_aligned_residual, f_map, hexagon_step, monte_carlo, orbit_experiment,
    renormalized_step, AxisAlignedHexagon, Extended, HexagonModuli, MonteCarloConfig,
    OrbitExperiment, OrbitRecord,
};
use evolute::Exact;
use serde_json::json;

use crate::output::{create, say, write_json, write_text, CliScalar};
use crate::{FArgs, OrbitArgs, Status, StepArgs};

fn parse_coords<S: CliScalar>(text: &str) -> Result<HexagonModuli<S>> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        bail!("expected four comma-separated values x5,y5,x6,y6, got {text:?}");
    }
    Ok(HexagonModuli::new(
        S::parse(parts[0])?,
        S::parse(parts[1])?,
        S::parse(parts[2])?,
        S::parse(parts[3])?,
    ))
}

fn record_line(r: &OrbitRecord) -> String {
    format!(
        "{:>3}  A={:+.6e} B={:+.6e} C={:+.6e} D={:+.6e}  residual {:.2e}",
        r.iter,
        r.a,
        r.b,
        r.c,
        r.d,
        r.residual()
    )
}

pub fn orbit(args: &OrbitArgs) -> Result<Status> {
    let j = &args.out.json;
    if let Some(coords) = &args.coords {
        let start = parse_coords::<f64>(coords)?;
        let orbit = orbit_experiment(&start, args.iters);
        single_orbit(args, &orbit)
    } else if args.count == 1 {
        let rep = monte_carlo(&MonteCarloConfig {
            count: 1,
            iters: args.iters,
            seed: args.seed,
            ..MonteCarloConfig::default()
        });
        let run = &rep.runs[0];
        say(
            j,
            &format!(
                "random start (seed {}): x5={:.6} y5={:.6} x6={:.6} y6={:.6}",
                args.seed, run.start[0], run.start[1], run.start[2], run.start[3]
            ),
        );
        single_orbit(args, &run.orbit)
    } else {
        let rep = monte_carlo(&MonteCarloConfig {
            count: args.count,
            iters: args.iters,
            seed: args.seed,
            ..MonteCarloConfig::default()
        });
        for run in &rep.runs {
            say(
                j,
                &format!(
                    "run {:>4}: {}",
                    run.index,
                    run.converged_at.map_or_else(
                        || {
                            format!(
                                "no convergence{}",
                                run.orbit
                                    .stopped
                                    .as_ref()
                                    .map_or(String::new(), |s| format!(" (stopped: {s})"))
                            )
                        },
                        |k| format!("residual < {:.0e} at step {k}", rep.config.threshold)
                    )
                ),
            );
        }
        say(
            j,
            &format!(
                "{}/{} starts converged ({:.1}%)",
                rep.converged,
                rep.runs.len(),
                100.0 * rep.success_fraction()
            ),
        );
        if let Some(path) = &args.csv {
            write_monte_carlo_csv(create(path)?, &rep)?;
        }
        if let Some(path) = &args.svg {
            let orbits: Vec<&[OrbitRecord]> = rep
                .runs
                .iter()
                .take(10)
                .map(|r| r.orbit.records.as_slice())
                .collect();
            write_text(path, &hexagon_orbits_svg(&orbits))?;
        }
        write_json(j, args, serde_json::to_value(&rep)?)?;
        Ok(Status::Ok)
    }
}

fn single_orbit(args: &OrbitArgs, orbit: &OrbitExperiment) -> Result<Status> {
    let j = &args.out.json;
    for r in &orbit.records {
        say(j, &record_line(r));
    }
    if let Some(s) = &orbit.stopped {
        say(j, &format!("stopped: {s}"));
    }
    match orbit.first_below(1e-6) {
        Some(k) => say(j, &format!("residual below 1e-6 from step {k}")),
        None => say(j, "residual never dropped below 1e-6"),
    }
    if let Some(path) = &args.csv {
        write_orbit_csv(create(path)?, &orbit.records)?;
    }
    if let Some(path) = &args.svg {
        write_text(path, &hexagon_orbits_svg(&[orbit.records.as_slice()]))?;
    }
    write_json(j, args, serde_json::to_value(orbit)?)?;
    Ok(Status::Ok)
}

pub fn f(args: &FArgs) -> Result<Status> {
    if args.arith.is_exact(true) {
        f_generic::<Exact>(args)
    } else {
        f_generic::<f64>(args)
    }
}

fn parse_extended<S: CliScalar>(text: &str) -> Result<Extended<S>> {
    if matches!(text.trim(), "inf" | "infinity" | "∞") {
        Ok(Extended::Infinity)
    } else {
        Ok(Extended::Finite(S::parse(text)?))
    }
}

fn same<S: CliScalar>(a: &S, b: &S) -> bool {
    let scale = 1.0 + a.to_f64().abs().max(b.to_f64().abs());
    (a.clone() - b.clone()).negligible(scale)
}

fn f_generic<S: CliScalar>(args: &FArgs) -> Result<Status> {
    let j = &args.out.json;
    let mut a = parse_extended::<S>(&args.a)?;
    let mut b = parse_extended::<S>(&args.b)?;
    let mut steps = Vec::new();
    let mut ok = true;
    for k in 0..=args.iters {
        let (fa, fb) = (f_map(&a), f_map(&b));
        let geometric = match (a.finite(), b.finite()) {
            (Some(x), Some(y)) if k < args.iters => {
                match renormalized_step(&AxisAlignedHexagon::new(x.clone(), y.clone())) {
                    Ok(h) => {
                        let agrees = matches!((&fa, &fb), (Extended::Finite(p), Extended::Finite(q))
                            if same(p, &h.a) && same(q, &h.b));
                        ok &= agrees;
                        Some(if agrees { "agrees" } else { "DISAGREES" }.to_string())
                    }
                    Err(e) => Some(format!("n/a ({e})")),
                }
            }
            _ => None,
        };
        say(
            j,
            &format!(
                "{k:>3}  a = {}  b = {}{}",
                a.render(),
                b.render(),
                geometric
                    .as_ref()
                    .map_or(String::new(), |g| format!("  evolute step: {g}"))
            ),
        );
        steps.push(json!({
            "k": k,
            "a": a.render(),
            "b": b.render(),
            "evolute_step": geometric,
        }));
        a = fa;
        b = fb;
    }
    write_json(
        j,
        args,
        json!({ "mode": args.arith.name(true), "steps": steps, "passed": ok }),
    )?;
    Ok(if ok { Status::Ok } else { Status::CheckFailed })
}

pub fn step(args: &StepArgs) -> Result<Status> {
    if args.arith.is_exact(true) {
        step_generic::<Exact>(args)
    } else {
        step_generic::<f64>(args)
    }
}

fn step_generic<S: CliScalar>(args: &StepArgs) -> Result<Status> {
    let j = &args.out.json;
    let mut current = parse_coords::<S>(&args.coords)?;
    let mut steps = Vec::new();
    for k in 0..=args.iters {
        let (a, b, c, d) = abcd(&current);
        let (rq, rd) = axis_aligned_residual(&current);
        say(
            j,
            &format!(
                "{k:>3}  (x5, y5, x6, y6) = ({}, {}, {}, {})  A={} B={} C={} D={}  quadric residual {}  D residual {}",
                current.x5.render(),
                current.y5.render(),
                current.x6.render(),
                current.y6.render(),
                a.render(),
                b.render(),
                c.render(),
                d.render(),
                rq.render(),
                rd.render()
            ),
        );
        steps.push(json!({
            "k": k,
            "moduli": current.as_array().iter().map(CliScalar::to_json).collect::<Vec<_>>(),
            "abcd": [a.to_json(), b.to_json(), c.to_json(), d.to_json()],
            "quadric_residual": rq.to_json(),
            "d_residual": rd.to_json(),
        }));
        if k < args.iters {
            current = hexagon_step(&current)?;
        }
    }
    write_json(
        j,
        args,
        json!({ "mode": args.arith.name(true), "steps": steps }),
    )?;
    Ok(Status::Ok)
}

#[cfg(test)]
mod tests {
    use super::*;
    use evolute::scalar::q;

    #[test]
    fn coordinates_parse_in_order() {
        let m = parse_coords::<Exact>("1, -2/3, 4, 5").unwrap();
        assert_eq!(m.as_array(), [q(1, 1), q(-2, 3), q(4, 1), q(5, 1)]);
        assert!(parse_coords::<f64>("1,2,3").is_err());
    }

    #[test]
    fn infinity_is_accepted_by_f() {
        assert_eq!(parse_extended::<Exact>("inf").unwrap(), Extended::Infinity);
        assert_eq!(
            f_map(&parse_extended::<Exact>("inf").unwrap()),
            Extended::Finite(q(0, 1))
        );
    }
}
