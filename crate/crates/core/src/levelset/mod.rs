//! Level curves of the invariant and the dynamics of `T^2` on them.
//!
//! The level set `I = r` is the affine part of the projective cubic
//!
//! ```text
//! Q(x,y,z) = x²y + xy² + x²z + y²z + (3-r)xyz + 2xz² + 2yz² + z³
//! ```
//!
//! which is singular exactly for `r ∈ {0, (11 ± 5√5)/2}`. For fixed `x`,
//! `F(x,y) = Q(x,y,1)` is quadratic in `y` with discriminant
//! `Δ(x) = x (x³ + (2-2r)x² + ((3-r)²-8)x - 4r)`; every finite interval where
//! `Δ ≥ 0` that avoids `x = -1` carries a bounded oval, and everything else
//! belongs to the one unbounded component, which always contains `(-1,0)`.
//!
//! Time along the Hamiltonian field `X_I` makes each component (closed up by
//! its points at infinity and the axis points) a circle `R/λZ`. On that
//! circle `T^2` acts as `θ -> -4θ`; see [`conjugacy`].

pub mod conjugacy;
pub mod flow;
pub mod ode;

use serde::Serialize;

use crate::scalar::{Field, Scalar};
use crate::Error;
use flow::{affine_of, sphere_point, Orbit};
use ode::Vec3;

pub use conjugacy::{bounded_to_unbounded, verify_conjugacy, BoundedImageReport, ConjugacyReport};

/// Default ODE tolerance for flow computations.
pub const DEFAULT_ODE_TOL: f64 = 1e-10;

/// The homogenised level cubic.
pub fn homogeneous_q<F: Field>(x: &F, y: &F, z: &F, r: &F) -> F {
    let two = F::from_i64(2);
    let three = F::from_i64(3);
    x.square() * y.clone()
        + x.clone() * y.square()
        + x.square() * z.clone()
        + y.square() * z.clone()
        + (three - r.clone()) * x.clone() * y.clone() * z.clone()
        + two.clone() * x.clone() * z.square()
        + two * y.clone() * z.square()
        + z.square() * z.clone()
}

pub(crate) fn q_value(p: &Vec3, r: f64) -> f64 {
    homogeneous_q(&p[0], &p[1], &p[2], &r)
}

pub(crate) fn grad_q(p: &Vec3, r: f64) -> Vec3 {
    let [x, y, z] = *p;
    let s = 3.0 - r;
    [
        2.0 * x * y + y * y + 2.0 * x * z + s * y * z + 2.0 * z * z,
        x * x + 2.0 * x * y + 2.0 * y * z + s * x * z + 2.0 * z * z,
        x * x + y * y + s * x * y + 4.0 * x * z + 4.0 * y * z + 3.0 * z * z,
    ]
}

/// `X_I = ((1+x)(1+x-y²)/y, (1+y)(-1-y+x²)/x)`.
pub fn hamiltonian_field<S: Scalar>(x: &S, y: &S) -> Result<(S, S), Error> {
    if x.is_exact_zero() || y.is_exact_zero() {
        return Err(Error::OnAxis);
    }
    let one = S::one();
    let vx = (one.clone() + x.clone()) * (one.clone() + x.clone() - y.square()) / y.clone();
    let vy = (one.clone() + y.clone()) * (x.square() - one - y.clone()) / x.clone();
    Ok((vx, vy))
}

/// The three singular levels together with a located singular point on each
/// nonzero one.
#[derive(Debug, Clone, Serialize)]
pub struct SingularLevels {
    /// `0`, `r₋`, `r₊` in that order.
    pub values: [f64; 3],
    /// `|r² - 11r - 1|` at `r₋` and `r₊`.
    pub quadratic_residuals: [f64; 2],
    /// Singular point found on each level, with `max(|F|, |F_x|, |F_y|)`.
    pub points: Vec<SingularPoint>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingularPoint {
    pub r: f64,
    pub x: f64,
    pub y: f64,
    pub residual: f64,
}

fn affine_gradient(x: f64, y: f64, r: f64) -> (f64, f64, f64) {
    let g = grad_q(&[x, y, 1.0], r);
    (q_value(&[x, y, 1.0], r), g[0], g[1])
}

/// Newton's method on `F_x = F_y = 0`.
fn newton_critical(r: f64, mut x: f64, mut y: f64) -> (f64, f64) {
    let s = 3.0 - r;
    for _ in 0..100 {
        let (_, fx, fy) = affine_gradient(x, y, r);
        // Hessian of F(x,y) = Q(x,y,1)
        let fxx = 2.0 * y + 2.0;
        let fyy = 2.0 * x + 2.0;
        let fxy = 2.0 * x + 2.0 * y + s;
        let det = fxx * fyy - fxy * fxy;
        if det == 0.0 {
            break;
        }
        let dx = (fyy * fx - fxy * fy) / det;
        let dy = (fxx * fy - fxy * fx) / det;
        x -= dx;
        y -= dy;
        if dx.abs().max(dy.abs()) < 1e-16 {
            break;
        }
    }
    (x, y)
}

/// Solves `r² - 11r - 1 = 0` and locates a critical point of `F` lying on
/// each singular curve.
pub fn singular_levels() -> SingularLevels {
    let disc = (121.0f64 + 4.0).sqrt();
    let r_plus = (11.0 + disc) / 2.0;
    // product of the roots is -1; avoids cancellation
    let r_minus = -1.0 / r_plus;
    let quad = |r: f64| (r * r - 11.0 * r - 1.0).abs();
    let mut points = Vec::new();
    for (r, guesses) in [
        (0.0, vec![(-0.9, -1.1)]),
        (r_minus, vec![(-0.5, -0.5), (-0.7, -0.7)]),
        (r_plus, vec![(1.5, 1.5), (2.0, 2.0)]),
    ] {
        let best = guesses
            .into_iter()
            .map(|(x0, y0)| {
                let (x, y) = newton_critical(r, x0, y0);
                let (f, fx, fy) = affine_gradient(x, y, r);
                SingularPoint {
                    r,
                    x,
                    y,
                    residual: f.abs().max(fx.abs()).max(fy.abs()),
                }
            })
            .min_by(|a, b| a.residual.partial_cmp(&b.residual).expect("finite"))
            .expect("nonempty");
        points.push(best);
    }
    SingularLevels {
        values: [0.0, r_minus, r_plus],
        quadratic_residuals: [quad(r_minus), quad(r_plus)],
        points,
    }
}

/// Rejects levels within `1e-9` of a singular value.
pub fn check_nonsingular(r: f64) -> Result<(), Error> {
    let s = singular_levels();
    if s.values
        .iter()
        .any(|v| (r - v).abs() <= 1e-9 * (1.0 + v.abs()))
    {
        return Err(Error::SingularLevel(r));
    }
    Ok(())
}

/// `Δ(x)`, the discriminant of `F(x, ·)`.
pub fn discriminant(x: f64, r: f64) -> f64 {
    let b = x * x + (3.0 - r) * x + 2.0;
    b * b - 4.0 * (x + 1.0).powi(3)
}

/// Roots `y` of `F(x, y) = 0` for fixed `x` (at most two).
pub fn roots_in_y(x: f64, r: f64) -> Vec<f64> {
    let a = x + 1.0;
    let b = x * x + (3.0 - r) * x + 2.0;
    let c = (x + 1.0).powi(2);
    if a.abs() < 1e-14 {
        return if b.abs() < 1e-14 {
            vec![]
        } else {
            vec![-c / b]
        };
    }
    let d = b * b - 4.0 * a * c;
    if d < 0.0 {
        return vec![];
    }
    let sq = d.sqrt();
    // numerically stable pair
    let qq = -0.5 * (b + b.signum() * sq);
    let mut out = vec![qq / a];
    if qq != 0.0 {
        out.push(c / qq);
    }
    out.sort_by(|u, v| u.partial_cmp(v).expect("finite"));
    out
}

/// Half-width of the `x` sweep: at least 50, and large enough to contain
/// every root of `Δ`.
pub fn sweep_half_width(r: f64) -> f64 {
    let coefs = [2.0 - 2.0 * r, (3.0 - r).powi(2) - 8.0, -4.0 * r];
    let cauchy = 1.0 + coefs.iter().fold(0.0f64, |m, c| m.max(c.abs()));
    cauchy.max(50.0)
}

/// Number of sweep points across `[-w, w]`.
pub const SWEEP_POINTS: usize = 2001;

fn bisect(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let mut flo = f(lo);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * (1.0 + lo.abs()) {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Closed `x`-intervals carrying a bounded oval.
pub fn bounded_intervals(r: f64) -> Vec<(f64, f64)> {
    // Δ = x c(x); locate the roots of c by a sign sweep
    let c = |x: f64| x * x * x + (2.0 - 2.0 * r) * x * x + ((3.0 - r).powi(2) - 8.0) * x - 4.0 * r;
    let w = sweep_half_width(r);
    let xs: Vec<f64> = (0..SWEEP_POINTS)
        .map(|k| -w + 2.0 * w * k as f64 / (SWEEP_POINTS - 1) as f64)
        .collect();
    let mut roots = vec![0.0];
    for pair in xs.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (ca, cb) = (c(a), c(b));
        if ca == 0.0 {
            roots.push(a);
        } else if (ca < 0.0) != (cb < 0.0) && cb != 0.0 {
            roots.push(bisect(c, a, b));
        }
    }
    roots.sort_by(|u, v| u.partial_cmp(v).expect("finite"));
    roots.dedup_by(|u, v| (*u - *v).abs() < 1e-12);
    roots
        .windows(2)
        .map(|p| (p[0], p[1]))
        .filter(|&(a, b)| discriminant(0.5 * (a + b), r) > 0.0 && !(a <= -1.0 && -1.0 <= b))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ComponentKind {
    Bounded,
    Unbounded,
}

impl std::fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ComponentKind::Bounded => "bounded",
            ComponentKind::Unbounded => "unbounded",
        })
    }
}

/// Which component of `I = r` the affine point lies on.
pub fn component_of(r: f64, x: f64) -> ComponentKind {
    if bounded_intervals(r).iter().any(|&(a, b)| a <= x && x <= b) {
        ComponentKind::Bounded
    } else {
        ComponentKind::Unbounded
    }
}

/// The point of minimal `x` on a bounded oval, where `Δ` vanishes and `y`
/// is the double root.
fn leftmost_point(r: f64, interval: (f64, f64)) -> (f64, f64) {
    let x = interval.0;
    let b = x * x + (3.0 - r) * x + 2.0;
    (x, -b / (2.0 * (x + 1.0)))
}

/// Basepoint of a component: `(-1, 0)` on the unbounded one, the leftmost
/// point on a bounded one.
pub fn basepoint(r: f64, kind: ComponentKind) -> Result<(f64, f64), Error> {
    match kind {
        ComponentKind::Unbounded => Ok((-1.0, 0.0)),
        ComponentKind::Bounded => bounded_intervals(r)
            .first()
            .map(|&iv| leftmost_point(r, iv))
            .ok_or_else(|| Error::Numerical(format!("level {r} has no bounded component"))),
    }
}

/// The flow loop of a component, starting at its basepoint.
pub fn component_orbit(r: f64, kind: ComponentKind, tol: f64) -> Result<Orbit, Error> {
    check_nonsingular(r)?;
    let (x, y) = basepoint(r, kind)?;
    Orbit::new(r, sphere_point(x, y), tol)
}

/// Flow time `λ` of one loop of a component.
pub fn component_period(r: f64, kind: ComponentKind, tol: f64) -> Result<f64, Error> {
    Ok(component_orbit(r, kind, tol)?.period)
}

fn check_on_curve(r: f64, p: &Vec3) -> Result<(), Error> {
    let p = flow::normalize(p);
    let g = grad_q(&p, r);
    let gn = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
    let dist = q_value(&p, r).abs() / gn.max(1e-300);
    if dist > 1e-8 {
        return Err(Error::NotOnCurve(dist));
    }
    Ok(())
}

/// Flow time from `p` to `q` along `X_I`, in `[0, λ)`.
pub fn flow_time(r: f64, p: (f64, f64), q: (f64, f64), tol: f64) -> Result<f64, Error> {
    check_nonsingular(r)?;
    let (sp, sq) = (sphere_point(p.0, p.1), sphere_point(q.0, q.1));
    check_on_curve(r, &sp)?;
    check_on_curve(r, &sq)?;
    Orbit::new(r, sp, tol)?.locate(&sq)
}

#[derive(Debug, Clone, Serialize)]
pub struct CircleCoordinate {
    pub theta: f64,
    pub period: f64,
    pub kind: ComponentKind,
}

/// `θ(p)`: flow time from the basepoint of `p`'s component to `p`.
pub fn circle_coordinate(r: f64, p: (f64, f64), tol: f64) -> Result<CircleCoordinate, Error> {
    let sp = sphere_point(p.0, p.1);
    check_on_curve(r, &sp)?;
    let kind = component_of(r, p.0);
    let orbit = component_orbit(r, kind, tol)?;
    Ok(CircleCoordinate {
        theta: orbit.locate(&sp)?,
        period: orbit.period,
        kind,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct CurveSample {
    pub x: f64,
    pub y: f64,
    pub theta: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Component {
    pub kind: ComponentKind,
    pub basepoint: (f64, f64),
    pub period: f64,
    /// Samples evenly spaced in flow time; points at infinity are omitted.
    pub samples: Vec<CurveSample>,
}

#[derive(Debug, Clone, Serialize)]
pub struct LevelCurve {
    pub r: f64,
    pub singular: bool,
    pub components: Vec<Component>,
}

/// Finds the components of `I = r` and samples `n` points on each, evenly
/// spaced in flow time.
pub fn sample_level_curve(r: f64, n: usize, tol: f64) -> Result<LevelCurve, Error> {
    check_nonsingular(r)?;
    let mut kinds = vec![ComponentKind::Unbounded];
    kinds.extend(bounded_intervals(r).iter().map(|_| ComponentKind::Bounded));
    let mut components = Vec::new();
    for (idx, kind) in kinds.into_iter().enumerate() {
        let (bx, by) = match kind {
            ComponentKind::Unbounded => (-1.0, 0.0),
            ComponentKind::Bounded => leftmost_point(r, bounded_intervals(r)[idx - 1]),
        };
        let orbit = Orbit::new(r, sphere_point(bx, by), tol)?;
        let samples = (0..n)
            .filter_map(|k| {
                let theta = orbit.period * k as f64 / n as f64;
                affine_of(&orbit.point_at(theta)).map(|(x, y)| CurveSample { x, y, theta })
            })
            .collect();
        components.push(Component {
            kind,
            basepoint: (bx, by),
            period: orbit.period,
            samples,
        });
    }
    Ok(LevelCurve {
        r,
        singular: false,
        components,
    })
}

/// Affine points where a loop meets the line `x = 0` or `y = 0`.
///
/// The level curves touch the axes tangentially, so contacts show up as
/// zeros of `|x|` (or `|y|`) without a sign change. They are found as local
/// minima of the chart distance on a fine time grid, refined by
/// golden-section search, and kept when the distance falls below `1e-7`.
pub fn axis_crossings(orbit: &Orbit) -> Vec<(f64, f64)> {
    const GRID: usize = 4000;
    let lambda = orbit.period;
    let dist = |axis: usize, t: f64| {
        let p = orbit.point_at(t);
        if p[2].abs() < 1e-3 {
            f64::INFINITY
        } else {
            (p[axis] / p[2]).abs()
        }
    };
    let mut out: Vec<(f64, f64)> = Vec::new();
    for axis in 0..2 {
        let h = lambda / GRID as f64;
        let vals: Vec<f64> = (0..GRID).map(|k| dist(axis, k as f64 * h)).collect();
        for k in 0..GRID {
            let (prev, cur, next) = (vals[(k + GRID - 1) % GRID], vals[k], vals[(k + 1) % GRID]);
            if !(cur.is_finite() && cur <= prev && cur <= next) {
                continue;
            }
            let g = (5f64.sqrt() - 1.0) / 2.0;
            let (mut a, mut b) = ((k as f64 - 1.0) * h, (k as f64 + 1.0) * h);
            for _ in 0..80 {
                let c = b - g * (b - a);
                let d = a + g * (b - a);
                if dist(axis, c) < dist(axis, d) {
                    b = d;
                } else {
                    a = c;
                }
            }
            let t = 0.5 * (a + b);
            if dist(axis, t) < 1e-7 {
                if let Some(pt) = affine_of(&orbit.point_at(t)) {
                    let seen = out
                        .iter()
                        .any(|q| (q.0 - pt.0).abs() < 1e-6 && (q.1 - pt.1).abs() < 1e-6);
                    if !seen {
                        out.push(pt);
                    }
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::q;

    #[test]
    fn cubic_identities() {
        let (x, y) = (q(7, 3), q(-2, 5));
        let r = q(9, 4);
        let one = q(1, 1);
        let affine = (x.clone() + one.clone())
            * (y.clone() + one.clone())
            * (x.clone() + y.clone() + one.clone())
            - r.clone() * x.clone() * y.clone();
        assert_eq!(homogeneous_q(&x, &y, &one, &r), affine);
        assert_eq!(
            homogeneous_q(&x, &y, &q(0, 1), &r),
            x.clone() * y.clone() * (x.clone() + y.clone())
        );
        assert_eq!(
            homogeneous_q(&q(0, 1), &y, &one, &r),
            (one.clone() + y.clone()) * (one + y)
        );
        assert_eq!(
            homogeneous_q(&q(3, 1), &q(4, 1), &q(1, 1), &q(40, 3)),
            q(0, 1)
        );
    }

    #[test]
    fn field_values() {
        assert_eq!(
            hamiltonian_field(&q(3, 1), &q(4, 1)).unwrap(),
            (q(-12, 1), q(20, 3))
        );
        assert_eq!(hamiltonian_field(&q(0, 1), &q(1, 1)), Err(Error::OnAxis));
        // tangent to level sets: grad I . X_I = 0
        let (x, y) = (0.7f64, -2.2f64);
        let (vx, vy) = hamiltonian_field(&x, &y).unwrap();
        let i = |x: f64, y: f64| (x + 1.0) * (y + 1.0) * (x + y + 1.0) / (x * y);
        let h = 1e-6;
        let ix = (i(x + h, y) - i(x - h, y)) / (2.0 * h);
        let iy = (i(x, y + h) - i(x, y - h)) / (2.0 * h);
        assert!((ix * vx + iy * vy).abs() < 1e-6);
    }

    #[test]
    fn singular_levels_and_points() {
        let s = singular_levels();
        assert_eq!(s.values[0], 0.0);
        assert!((s.values[1] + 0.0902).abs() < 1e-4);
        assert!((s.values[2] - 11.0902).abs() < 1e-4);
        assert!(s.quadratic_residuals.iter().all(|v| *v < 1e-12));
        assert!(
            s.points.iter().all(|p| p.residual <= 1e-9),
            "{:?}",
            s.points
        );
        assert!(matches!(
            sample_level_curve(0.0, 10, 1e-8),
            Err(Error::SingularLevel(_))
        ));
    }

    #[test]
    fn roots_in_y_solve_the_cubic() {
        for (x, r) in [(2.0, 12.0), (-0.5, -0.05), (5.0, 1.0)] {
            for y in roots_in_y(x, r) {
                assert!(q_value(&[x, y, 1.0], r).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn component_counts() {
        for (r, count) in [(-1.0, 1), (-0.05, 2), (1.0, 1), (12.0, 2)] {
            assert_eq!(bounded_intervals(r).len() + 1, count, "r = {r}");
        }
        assert_eq!(component_of(12.0, 2.0), ComponentKind::Bounded);
        assert_eq!(component_of(12.0, -1.0), ComponentKind::Unbounded);
    }

    #[test]
    fn invariant_is_constant_along_the_flow() {
        let o = component_orbit(1.0, ComponentKind::Unbounded, DEFAULT_ODE_TOL).unwrap();
        for (_, p) in o.steps() {
            if let Some((x, y)) = affine_of(p) {
                if x.abs() > 0.05 && y.abs() > 0.05 && x.abs() < 1e3 && y.abs() < 1e3 {
                    let i = (x + 1.0) * (y + 1.0) * (x + y + 1.0) / (x * y);
                    assert!((i - 1.0).abs() <= 1e-9, "I = {i} at ({x}, {y})");
                }
            }
        }
    }

    #[test]
    fn flow_time_matches_fixed_step_reference() {
        let r = 1.0;
        let o = component_orbit(r, ComponentKind::Unbounded, DEFAULT_ODE_TOL).unwrap();
        let (t1, t2) = (0.1 * o.period, 0.45 * o.period);
        let p = affine_of(&o.point_at(t1)).unwrap();
        let q = affine_of(&o.point_at(t2)).unwrap();
        let adaptive = flow_time(r, p, q, DEFAULT_ODE_TOL).unwrap();
        // fixed-step RK4 reference over the same time span
        let f = |v: &Vec3| flow::sphere_field(v, r);
        let steps = 40_000;
        let h = (t2 - t1) / steps as f64;
        let mut v = sphere_point(p.0, p.1);
        for _ in 0..steps {
            v = ode::rk4_step(&f, &v, h);
        }
        assert!(flow::projective_distance(&v, &sphere_point(q.0, q.1)) < 1e-9);
        assert!(
            (adaptive - (t2 - t1)).abs() <= 1e-8 * adaptive,
            "{adaptive} vs {}",
            t2 - t1
        );
        // additivity around the loop
        let back = flow_time(r, q, p, DEFAULT_ODE_TOL).unwrap();
        let total = (adaptive + back) / o.period;
        assert!((total - total.round()).abs() < 1e-9);
    }

    #[test]
    fn circle_coordinate_basics() {
        let r = 1.0;
        let c = circle_coordinate(r, (-1.0, 0.0), DEFAULT_ODE_TOL).unwrap();
        assert!(c.theta.min(c.period - c.theta) < 1e-9);
        let lc = sample_level_curve(r, 40, DEFAULT_ODE_TOL).unwrap();
        let thetas: Vec<f64> = lc.components[0].samples.iter().map(|s| s.theta).collect();
        assert!(thetas.windows(2).all(|w| w[0] < w[1]));
        assert!(matches!(
            circle_coordinate(r, (3.0, 4.0), DEFAULT_ODE_TOL),
            Err(Error::NotOnCurve(_))
        ));
    }

    #[test]
    fn bounded_components_sit_in_their_quadrant() {
        for (r, sign) in [(12.0, 1.0), (-0.05, -1.0)] {
            let lc = sample_level_curve(r, 60, DEFAULT_ODE_TOL).unwrap();
            let bounded = lc
                .components
                .iter()
                .find(|c| c.kind == ComponentKind::Bounded)
                .unwrap();
            assert!(bounded.samples.len() == 60);
            assert!(bounded
                .samples
                .iter()
                .all(|s| s.x * sign > 0.0 && s.y * sign > 0.0));
        }
    }

    #[test]
    fn unbounded_component_meets_axes_at_two_points() {
        for r in [-1.0, -0.05, 1.0, 12.0] {
            let o = component_orbit(r, ComponentKind::Unbounded, DEFAULT_ODE_TOL).unwrap();
            let crossings = axis_crossings(&o);
            assert_eq!(crossings.len(), 2, "r = {r}: {crossings:?}");
            for (x, y) in crossings {
                let ok = (x + 1.0).abs() < 1e-6 && y.abs() < 1e-6
                    || x.abs() < 1e-6 && (y + 1.0).abs() < 1e-6;
                assert!(ok, "r = {r}: crossing at ({x}, {y})");
            }
        }
    }
}
