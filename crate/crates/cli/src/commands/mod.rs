pub mod hexagon;
pub mod pentagon;

use std::io::Read;
use std::path::Path;

use anyhow::{bail, Context, Result};
use evolute::evolute::{
    iterate_evolute, parse_polygon_json, polygon_to_json, Polygon, PolygonInput,
};
use evolute::figures::polygon_overlay_svg;
use evolute::frieze::{
    coefficients_from_moduli, evolute_coefficients, frieze_coordinates_of_frame, frieze_rows,
    lift_from_coefficients, monodromy_check,
};
use evolute::pentagon::{invariant_i, t_map, PentagonModuli};
use evolute::verify::exact_suite;
use evolute::Exact;
use serde_json::{json, Value};

use crate::output::{say, write_json, write_text, CliScalar};
use crate::{EvoluteArgs, FriezeArgs, Status, VerifyArgs};

fn read_input(path: &Path) -> Result<String> {
    let mut text = String::new();
    if path == Path::new("-") {
        std::io::stdin().read_to_string(&mut text)?;
    } else {
        text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read {}", path.display()))?;
    }
    Ok(text)
}

pub fn evolute_cmd(args: &EvoluteArgs) -> Result<Status> {
    let input = parse_polygon_json(&read_input(&args.input)?)?;
    match input {
        PolygonInput::Exact(p) if !args.arith.approx => run_evolute(args, &p, "exact"),
        PolygonInput::Exact(p) => run_evolute(args, &p.to_f64(), "approx"),
        PolygonInput::Approx(_) if args.arith.exact => {
            bail!("--exact needs vertex entries written as rational strings such as \"3/4\"")
        }
        PolygonInput::Approx(p) => run_evolute(args, &p, "approx"),
    }
}

fn run_evolute<S: CliScalar>(args: &EvoluteArgs, p: &Polygon<S>, mode: &str) -> Result<Status> {
    let orbit = iterate_evolute(p, args.iters);
    if orbit.polygons.len() == 1 {
        if let Some(e) = &orbit.stopped {
            bail!("the evolute is undefined: {e}");
        }
    }
    for (k, poly) in orbit.polygons.iter().enumerate() {
        say(
            &args.out.json,
            &format!("T^{k}: {}", polygon_to_json(poly)["vertices"]),
        );
    }
    if let Some(e) = &orbit.stopped {
        say(
            &args.out.json,
            &format!("stopped after {} steps: {e}", orbit.polygons.len() - 1),
        );
    }
    if let Some(svg) = &args.svg {
        let image = orbit.polygons.get(1).unwrap_or(&orbit.polygons[0]);
        write_text(
            svg,
            &polygon_overlay_svg(&p.affine_points(), &image.affine_points()),
        )?;
    }
    let result = json!({
        "mode": mode,
        "iterates": orbit.polygons.iter().map(polygon_to_json).collect::<Vec<_>>(),
        "stopped": orbit.stopped.as_ref().map(|e| e.to_string()),
    });
    write_json(&args.out.json, args, result)?;
    Ok(Status::Ok)
}

pub fn frieze_cmd(args: &FriezeArgs) -> Result<Status> {
    if args.arith.is_exact(true) {
        frieze_generic::<Exact>(args)
    } else {
        frieze_generic::<f64>(args)
    }
}

fn values<S: CliScalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(CliScalar::to_json).collect())
}

fn row<S: CliScalar>(v: &[S]) -> String {
    v.iter().map(|s| s.render()).collect::<Vec<_>>().join("  ")
}

fn close<S: CliScalar>(a: &S, b: &S) -> bool {
    let scale = 1.0 + a.to_f64().abs().max(b.to_f64().abs());
    (a.clone() - b.clone()).negligible(scale)
}

fn frieze_generic<S: CliScalar>(args: &FriezeArgs) -> Result<Status> {
    let given = PentagonModuli::new(S::parse(&args.x)?, S::parse(&args.y)?);
    let m = if args.frame {
        frieze_coordinates_of_frame(&given)?
    } else {
        given
    };
    let c = coefficients_from_moduli(&m.x, &m.y)?;
    let rows = frieze_rows(&m.x, &m.y)?;
    let diamonds = rows.diamonds();
    let (prod, sum) = monodromy_check(&c);
    let i = invariant_i(&m)?;
    let image = evolute_coefficients(&lift_from_coefficients(&c)?)?.moduli();
    let closed_form = t_map(&m)?;

    let diamonds_ok = diamonds.iter().all(|d| close(d, &S::one()));
    let monodromy_ok = close(&prod, &i) && close(&sum, &i);
    let image_ok = close(&image.x, &closed_form.x) && close(&image.y, &closed_form.y);

    let j = &args.out.json;
    say(
        j,
        &format!("frieze coordinates: ({}, {})", m.x.render(), m.y.render()),
    );
    say(j, &format!("a: {}", row(&c.a)));
    say(j, &format!("b: {}", row(&c.b)));
    say(j, "frieze rows:");
    for r in &rows.rows {
        say(j, &format!("  {}", row(r)));
    }
    say(j, &format!("diamonds all equal 1: {diamonds_ok}"));
    say(
        j,
        &format!(
            "prod a_i = {}, sum a_i + 3 = {}, I = {} ({})",
            prod.render(),
            sum.render(),
            i.render(),
            if monodromy_ok { "agree" } else { "DISAGREE" }
        ),
    );
    say(
        j,
        &format!(
            "T via coefficients: ({}, {}); closed form: ({}, {}) ({})",
            image.x.render(),
            image.y.render(),
            closed_form.x.render(),
            closed_form.y.render(),
            if image_ok { "agree" } else { "DISAGREE" }
        ),
    );
    let ok = diamonds_ok && monodromy_ok && image_ok;
    let result = json!({
        "mode": args.arith.name(true),
        "frieze_coordinates": [m.x.to_json(), m.y.to_json()],
        "a": values(&c.a),
        "b": values(&c.b),
        "rows": rows.rows.iter().map(|r| values(r)).collect::<Vec<_>>(),
        "diamonds": values(&diamonds),
        "product": prod.to_json(),
        "sum_plus_3": sum.to_json(),
        "invariant": i.to_json(),
        "t_via_coefficients": [image.x.to_json(), image.y.to_json()],
        "t_closed_form": [closed_form.x.to_json(), closed_form.y.to_json()],
        "passed": ok,
    });
    write_json(j, args, result)?;
    Ok(if ok { Status::Ok } else { Status::CheckFailed })
}

pub fn verify_cmd(args: &VerifyArgs) -> Result<Status> {
    let report = exact_suite(args.count, args.seed);
    for c in &report.checks {
        say(
            &args.out.json,
            &format!(
                "{:<3} {} {}/{}  {}",
                c.id,
                if c.passed { "PASS" } else { "FAIL" },
                c.checked - c.failed,
                c.checked,
                c.description
            ),
        );
        for e in &c.examples {
            say(&args.out.json, &format!("      failing at {e}"));
        }
    }
    write_json(&args.out.json, args, serde_json::to_value(&report)?)?;
    Ok(if report.passed {
        Status::Ok
    } else {
        Status::CheckFailed
    })
}
