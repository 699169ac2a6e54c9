//! The flow of `X_I` on a level curve, integrated on the unit sphere.
//!
//! A point of the plane is represented by a unit vector `p` with
//! `[x:y:1] = [p]`. The field
//!
//! ```text
//! V(p) = p × ∇Q(p) / |p|^2
//! ```
//!
//! is tangent to the cone `Q = 0` and to the sphere, and on the affine
//! chart it pushes forward to `(-F_y, F_x)`, which equals `X_I` on the level
//! curve. Unlike the planar field it stays bounded at the points at
//! infinity, so a full loop around a component, including its completion
//! points, is a single regular integration. An unbounded component lifts to
//! a path from `p0` to `-p0`; a bounded one closes up on itself.

use super::ode::{dopri_step, Controller, Vec3};
use super::{grad_q, q_value};
use crate::Error;

fn norm(v: &Vec3) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn dot(u: &Vec3, v: &Vec3) -> f64 {
    u[0] * v[0] + u[1] * v[1] + u[2] * v[2]
}

fn sub(u: &Vec3, v: &Vec3) -> Vec3 {
    [u[0] - v[0], u[1] - v[1], u[2] - v[2]]
}

fn scale(u: &Vec3, s: f64) -> Vec3 {
    [u[0] * s, u[1] * s, u[2] * s]
}

pub fn normalize(v: &Vec3) -> Vec3 {
    scale(v, 1.0 / norm(v))
}

/// Unit vector of the affine point `(x, y)`.
pub fn sphere_point(x: f64, y: f64) -> Vec3 {
    normalize(&[x, y, 1.0])
}

/// Affine chart of a sphere point, `None` near the line at infinity.
pub fn affine_of(p: &Vec3) -> Option<(f64, f64)> {
    (p[2].abs() > 1e-9).then(|| (p[0] / p[2], p[1] / p[2]))
}

/// Distance between the projective classes of two unit vectors.
pub fn projective_distance(p: &Vec3, q: &Vec3) -> f64 {
    norm(&sub(p, q)).min(norm(&sub(p, &scale(q, -1.0))))
}

/// The field `V(p) = p × ∇Q(p) / |p|^2`.
pub fn sphere_field(p: &Vec3, r: f64) -> Vec3 {
    let g = grad_q(p, r);
    let c = [
        p[1] * g[2] - p[2] * g[1],
        p[2] * g[0] - p[0] * g[2],
        p[0] * g[1] - p[1] * g[0],
    ];
    scale(&c, 1.0 / dot(p, p))
}

/// One Newton step towards `Q = 0` along the gradient, then back to the
/// unit sphere.
pub fn project(p: &Vec3, r: f64) -> Vec3 {
    let g = grad_q(p, r);
    let gg = dot(&g, &g);
    if gg == 0.0 {
        return normalize(p);
    }
    normalize(&sub(p, &scale(&g, q_value(p, r) / gg)))
}

/// One trip around a component, stored as the accepted integration steps.
#[derive(Debug, Clone)]
pub struct Orbit {
    pub r: f64,
    pub start: Vec3,
    /// Flow time of one loop of the component.
    pub period: f64,
    /// `true` when the sphere lift ends at `-start` (unbounded components).
    pub antipodal: bool,
    pub tol: f64,
    times: Vec<f64>,
    states: Vec<Vec3>,
}

/// Upper bound on the flow time searched for a period.
const MAX_TIME: f64 = 1e4;

impl Orbit {
    /// Integrates from `start` until the component closes up.
    pub fn new(r: f64, start: Vec3, tol: f64) -> Result<Orbit, Error> {
        let f = |p: &Vec3| sphere_field(p, r);
        let start = project(&normalize(&start), r);
        let v0 = f(&start);
        if norm(&v0) == 0.0 {
            return Err(Error::Numerical("start is a stationary point".into()));
        }
        let mut ctl = Controller::new(tol);
        let mut times = vec![0.0];
        let mut states = vec![start];
        let mut t = 0.0;
        let mut g_prev = 0.0;
        while t < MAX_TIME {
            let y = *states.last().expect("nonempty");
            let (h, y1) = ctl.advance(&f, &y).map_err(Error::Numerical)?;
            let y1 = project(&y1, r);
            let g = dot(&y1, &v0);
            let near =
                projective_distance(&y1, &start) < 0.5 || projective_distance(&y, &start) < 0.5;
            if t > 0.0 && near && g_prev != 0.0 && (g_prev < 0.0) != (g < 0.0) {
                // refine the crossing of the plane p . v0 = 0 inside this step
                let eval = |s: f64| project(&dopri_step(&f, &y, s).0, r);
                let (mut lo, mut hi) = (0.0, h);
                let (mut glo, mut ghi) = (g_prev, g);
                let mut s = h;
                for _ in 0..60 {
                    s = lo - glo * (hi - lo) / (ghi - glo);
                    if !(s > lo && s < hi) {
                        s = 0.5 * (lo + hi);
                    }
                    let gs = dot(&eval(s), &v0);
                    if gs.abs() < 1e-15 {
                        break;
                    }
                    if (gs < 0.0) == (glo < 0.0) {
                        lo = s;
                        glo = gs;
                    } else {
                        hi = s;
                        ghi = gs;
                    }
                    if hi - lo < 1e-15 * (1.0 + t) {
                        break;
                    }
                }
                let p_star = eval(s);
                if projective_distance(&p_star, &start) < 1e-6 {
                    let antipodal = dot(&p_star, &start) < 0.0;
                    return Ok(Orbit {
                        r,
                        start,
                        period: t + s,
                        antipodal,
                        tol,
                        times,
                        states,
                    });
                }
            }
            t += h;
            g_prev = g;
            times.push(t);
            states.push(y1);
        }
        Err(Error::Numerical("no period found".into()))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    /// Stored `(time, point)` pairs.
    pub fn steps(&self) -> impl Iterator<Item = (f64, &Vec3)> {
        self.times.iter().copied().zip(self.states.iter())
    }

    /// The point reached after flowing for time `t` from the start; `t` is
    /// taken modulo the period.
    pub fn point_at(&self, t: f64) -> Vec3 {
        let t = t.rem_euclid(self.period);
        let k = match self
            .times
            .binary_search_by(|v| v.partial_cmp(&t).expect("finite"))
        {
            Ok(k) => return self.states[k],
            Err(k) => k - 1,
        };
        let f = |p: &Vec3| sphere_field(p, self.r);
        let h = t - self.times[k];
        project(&dopri_step(&f, &self.states[k], h).0, self.r)
    }

    /// Flow time from the start to `q`, in `[0, period)`.
    pub fn locate(&self, q: &Vec3) -> Result<f64, Error> {
        let q = normalize(q);
        let v = sphere_field(&q, self.r);
        let vn = norm(&v);
        if vn == 0.0 {
            return Err(Error::Numerical("stationary query point".into()));
        }
        let vhat = scale(&v, 1.0 / vn);
        let mut order: Vec<(f64, usize)> = self
            .states
            .iter()
            .enumerate()
            .map(|(k, p)| (projective_distance(p, &q), k))
            .collect();
        order.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite"));
        for &(_, k) in order.iter().take(6) {
            let mut t = self.times[k];
            for _ in 0..40 {
                let p = self.point_at(t);
                let sigma = if dot(&p, &q) < 0.0 { -1.0 } else { 1.0 };
                let g = dot(&sub(&scale(&p, sigma), &q), &vhat);
                let dg = sigma * dot(&sphere_field(&p, self.r), &vhat);
                if dg.abs() < 1e-300 {
                    break;
                }
                let dt = g / dg;
                t -= dt;
                if dt.abs() < 1e-15 * self.period {
                    break;
                }
            }
            if projective_distance(&self.point_at(t), &q) < 1e-7 {
                return Ok(t.rem_euclid(self.period));
            }
        }
        Err(Error::WrongComponent)
    }
}
