//! Numerical check that `T^2` acts on the unbounded component as `θ -> -4θ`.
//!
//! Measured from `(-1, 0)`, the circle coordinate satisfies
//! `θ(T²p) + 4θ(p) ≡ c (mod λ)` for a constant `c`, which turns out to be a
//! nonzero multiple of `λ/5`. Any affine map `θ -> -4θ + c` of `R/λZ` has a
//! fixed point `θ* = c/5`, and measured from it the action is exactly
//! multiplication by `-4`. The report locates a fixed point of `T^2` on the
//! component and uses it as basepoint; `c` is recorded alongside.

use rayon::prelude::*;
use serde::Serialize;

use super::flow::{affine_of, sphere_point, Orbit};
use super::{check_nonsingular, component_of, component_orbit, hamiltonian_field, ComponentKind};
use crate::pentagon::{t2_jacobian, t_map, PentagonModuli};
use crate::{Error, MapFactor};

/// Representative of `v mod λ` in `[-λ/2, λ/2)`.
fn wrap(v: f64, lambda: f64) -> f64 {
    (v + 0.5 * lambda).rem_euclid(lambda) - 0.5 * lambda
}

fn t_squared(x: f64, y: f64) -> Result<(f64, f64), Error> {
    let once = t_map(&PentagonModuli::new(x, y))?;
    let twice = t_map(&once)?;
    if !(twice.x.is_finite() && twice.y.is_finite()) {
        return Err(Error::MapUndefined(vec![]));
    }
    Ok((twice.x, twice.y))
}

/// `|d(T²)_p X_I(p) + 4 X_I(T²p)| / |4 X_I(T²p)|`.
pub fn differential_residual(x: f64, y: f64) -> Result<f64, Error> {
    let (x2, y2) = t_squared(x, y)?;
    let (_, j) = t2_jacobian(&PentagonModuli::new(x, y));
    let (vx, vy) = hamiltonian_field(&x, &y)?;
    let (wx, wy) = hamiltonian_field(&x2, &y2)?;
    let pushed = (j[0][0] * vx + j[0][1] * vy, j[1][0] * vx + j[1][1] * vy);
    let num = ((pushed.0 + 4.0 * wx).powi(2) + (pushed.1 + 4.0 * wy).powi(2)).sqrt();
    let den = 4.0 * (wx * wx + wy * wy).sqrt();
    Ok(num / den)
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacySample {
    pub x: f64,
    pub y: f64,
    /// Circle coordinate from the fixed-point basepoint.
    pub theta: f64,
    pub theta_image: f64,
    /// `|θ(T²p) + 4θ(p)| mod λ`, divided by `λ`.
    pub residual: f64,
    /// Relative error of `d(T²) X_I = -4 X_I`.
    pub differential_residual: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct SkippedSample {
    pub theta: f64,
    pub reason: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConjugacyReport {
    pub r: f64,
    pub lambda: f64,
    /// `λ` recomputed with half the ODE tolerance.
    pub lambda_refined: f64,
    pub lambda_relative_change: f64,
    /// The fixed point of `T^2` used as basepoint.
    pub basepoint: (f64, f64),
    pub basepoint_residual: f64,
    /// `(θ(T²p) + 4θ(p)) / λ mod 1` with `θ` measured from `(-1, 0)`.
    pub offset_from_axis_point: f64,
    pub samples: Vec<ConjugacySample>,
    pub skipped: Vec<SkippedSample>,
    pub tol: f64,
    pub ode_tol: f64,
    pub max_residual: f64,
    pub max_differential_residual: f64,
    pub passed: bool,
}

/// Image of the orbit point at time `t` under `T^2`, with its time.
fn image_time(orbit: &Orbit, t: f64) -> Result<(f64, f64, f64), Error> {
    let (x, y) = affine_of(&orbit.point_at(t)).ok_or(Error::AtInfinity)?;
    let (x2, y2) = t_squared(x, y)?;
    let t2 = orbit.locate(&sphere_point(x2, y2))?;
    Ok((x, y, t2))
}

/// Finds a time `t*` with `T²(p(t*)) = p(t*)`.
fn fixed_time(orbit: &Orbit) -> Result<f64, Error> {
    let lambda = orbit.period;
    let d = |t: f64| image_time(orbit, t).map(|(_, _, t2)| wrap(t2 - t, lambda));
    let grid = 200;
    let mut prev: Option<(f64, f64)> = None;
    for k in 0..=grid {
        let t = lambda * (k as f64 + 0.25) / grid as f64;
        let cur = d(t).ok().map(|v| (t, v));
        if let (Some((t0, d0)), Some((t1, d1))) = (prev, cur) {
            // slope is -5, so a genuine zero goes from + to - with small values
            if d0 >= 0.0 && d1 <= 0.0 && d0 - d1 < 0.25 * lambda {
                let (mut lo, mut hi) = (t0, t1);
                for _ in 0..100 {
                    let mid = 0.5 * (lo + hi);
                    match d(mid) {
                        Ok(v) if v >= 0.0 => lo = mid,
                        Ok(_) => hi = mid,
                        Err(_) => break,
                    }
                    if hi - lo < 1e-14 * lambda {
                        break;
                    }
                }
                return Ok(0.5 * (lo + hi));
            }
        }
        prev = cur;
    }
    Err(Error::Numerical("no fixed point of T^2 found".into()))
}

/// Checks `θ(T²p) ≡ -4θ(p) (mod λ)` at `n` points of the unbounded
/// component of `I = r`, together with the differential identity and the
/// convergence of `λ` under halving of `ode_tol`.
pub fn verify_conjugacy(
    r: f64,
    n: usize,
    tol: f64,
    ode_tol: f64,
) -> Result<ConjugacyReport, Error> {
    check_nonsingular(r)?;
    let (orbit, refined) = rayon::join(
        || component_orbit(r, ComponentKind::Unbounded, ode_tol),
        || component_orbit(r, ComponentKind::Unbounded, 0.5 * ode_tol),
    );
    let (orbit, refined) = (orbit?, refined?);
    let lambda = orbit.period;
    let t_star = fixed_time(&orbit)?;
    let (bx, by) = affine_of(&orbit.point_at(t_star)).ok_or(Error::AtInfinity)?;
    let basepoint_residual = t_squared(bx, by)
        .map(|(x, y)| ((x - bx).powi(2) + (y - by).powi(2)).sqrt())
        .unwrap_or(f64::INFINITY);

    let results: Vec<Result<(ConjugacySample, f64), SkippedSample>> = (0..n)
        .into_par_iter()
        .map(|k| {
            let base = lambda * (k as f64 + 0.5) / n as f64;
            let mut last = String::new();
            // nudge off points where T^2 or the chart fails
            for nudge in [0.0, 1e-3, -1e-3, 1e-2, -1e-2] {
                let t = base + nudge * lambda / n as f64;
                let attempt = image_time(&orbit, t)
                    .and_then(|(x, y, t2)| Ok((x, y, t2, differential_residual(x, y)?)));
                match attempt {
                    Ok((x, y, t2, dres)) => {
                        let theta = (t - t_star).rem_euclid(lambda);
                        let theta_image = (t2 - t_star).rem_euclid(lambda);
                        let residual = wrap(theta_image + 4.0 * theta, lambda).abs() / lambda;
                        let raw = (t2 + 4.0 * t).rem_euclid(lambda) / lambda;
                        return Ok((
                            ConjugacySample {
                                x,
                                y,
                                theta,
                                theta_image,
                                residual,
                                differential_residual: dres,
                            },
                            raw,
                        ));
                    }
                    Err(e) => last = e.to_string(),
                }
            }
            Err(SkippedSample {
                theta: base,
                reason: last,
            })
        })
        .collect();

    let mut samples = Vec::new();
    let mut skipped = Vec::new();
    let mut raw_offsets = Vec::new();
    for res in results {
        match res {
            Ok((s, raw)) => {
                samples.push(s);
                raw_offsets.push(raw);
            }
            Err(s) => skipped.push(s),
        }
    }
    raw_offsets.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let offset_from_axis_point = raw_offsets
        .get(raw_offsets.len() / 2)
        .copied()
        .unwrap_or(f64::NAN);
    let max_residual = samples.iter().map(|s| s.residual).fold(0.0, f64::max);
    let max_differential_residual = samples
        .iter()
        .map(|s| s.differential_residual)
        .fold(0.0, f64::max);
    let lambda_relative_change = (refined.period - lambda).abs() / lambda;
    let passed = !samples.is_empty()
        && max_residual <= tol
        && max_differential_residual <= 1e-6
        && lambda_relative_change <= 1e-7;
    Ok(ConjugacyReport {
        r,
        lambda,
        lambda_refined: refined.period,
        lambda_relative_change,
        basepoint: (bx, by),
        basepoint_residual,
        offset_from_axis_point,
        samples,
        skipped,
        tol,
        ode_tol,
        max_residual,
        max_differential_residual,
        passed,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundedImageSample {
    pub x: f64,
    pub y: f64,
    pub image_x: f64,
    pub image_y: f64,
    pub image_kind: ComponentKind,
    /// Whether the image was found on the integrated unbounded loop.
    pub located: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct BoundedImageReport {
    pub r: f64,
    pub samples: Vec<BoundedImageSample>,
    pub undefined: Vec<Vec<MapFactor>>,
    pub passed: bool,
}

/// Applies `T^2` to `n` points of the bounded component and checks that
/// every image lies on the unbounded component.
pub fn bounded_to_unbounded(r: f64, n: usize, ode_tol: f64) -> Result<BoundedImageReport, Error> {
    check_nonsingular(r)?;
    let bounded = component_orbit(r, ComponentKind::Bounded, ode_tol)?;
    let unbounded = component_orbit(r, ComponentKind::Unbounded, ode_tol)?;
    let mut samples = Vec::new();
    let mut undefined = Vec::new();
    for k in 0..n {
        let t = bounded.period * (k as f64 + 0.5) / n as f64;
        let Some((x, y)) = affine_of(&bounded.point_at(t)) else {
            continue;
        };
        match t_squared(x, y) {
            Ok((ix, iy)) => samples.push(BoundedImageSample {
                x,
                y,
                image_x: ix,
                image_y: iy,
                image_kind: component_of(r, ix),
                located: unbounded.locate(&sphere_point(ix, iy)).is_ok(),
            }),
            Err(Error::MapUndefined(f)) => undefined.push(f),
            Err(e) => return Err(e),
        }
    }
    let passed = !samples.is_empty()
        && samples
            .iter()
            .all(|s| s.image_kind == ComponentKind::Unbounded && s.located);
    Ok(BoundedImageReport {
        r,
        samples,
        undefined,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrap_is_symmetric() {
        assert!((wrap(0.9, 1.0) + 0.1).abs() < 1e-15);
        assert_eq!(wrap(0.25, 1.0), 0.25);
        assert_eq!(wrap(-0.5, 1.0), -0.5);
    }

    #[test]
    fn differential_identity_at_spot_point() {
        assert!(differential_residual(3.0, 4.0).unwrap() < 1e-10);
        assert!(differential_residual(-0.3, 2.5).unwrap() < 1e-10);
    }

    #[test]
    fn conjugacy_at_r_one() {
        let rep = verify_conjugacy(1.0, 20, 1e-6, 1e-10).unwrap();
        assert!(rep.passed, "{rep:#?}");
        assert_eq!(rep.samples.len() + rep.skipped.len(), 20);
        assert!(rep.basepoint_residual < 1e-6);
        // the offset measured from (-1,0) is a multiple of λ/5
        let five = 5.0 * rep.offset_from_axis_point;
        assert!(
            (five - five.round()).abs() < 1e-6,
            "{}",
            rep.offset_from_axis_point
        );
    }

    #[test]
    fn bounded_oval_maps_to_unbounded_component() {
        let rep = bounded_to_unbounded(12.0, 12, 1e-10).unwrap();
        assert!(rep.passed, "{rep:#?}");
    }
}
