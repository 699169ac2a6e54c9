//! Moduli coordinates on the space of projective pentagons.
//!
//! Every non-degenerate pentagon is projectively equivalent to exactly one
//! pentagon with vertices `[0:-1:1], [1:0:0], [0:1:0], [-1:0:1], [x:y:1]`.
//! In these coordinates the evolute map has the closed form [`t_map`], it
//! preserves the pencil of level sets of [`invariant_i`] up to the sign
//! flip `I(T(m)) = -1/I(m)`, and `T^2` scales the area form `dx dy / (xy)`
//! by `-4`.

use serde::Serialize;

use crate::dual::Dual;
use crate::evolute::{evolute, Polygon, PENTAGON_READOUT_OFFSET};
use crate::projective::{affine_chart, apply_map, transform_from_correspondence, HomTriple};
use crate::scalar::{Field, Scalar};
use crate::{Error, Locus, MapFactor};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PentagonModuli<S> {
    pub x: S,
    pub y: S,
}

impl<S> PentagonModuli<S> {
    pub fn new(x: S, y: S) -> Self {
        PentagonModuli { x, y }
    }
}

impl<S: Scalar> PentagonModuli<S> {
    pub fn to_f64(&self) -> PentagonModuli<f64> {
        PentagonModuli::new(self.x.to_f64(), self.y.to_f64())
    }
}

/// The first four vertices of the normalised frame.
pub fn frame<S: Scalar>() -> [HomTriple<S>; 4] {
    let i = |v: i64| S::from_i64(v);
    [
        HomTriple::point(i(0), i(-1), i(1)).expect("nonzero"),
        HomTriple::point(i(1), i(0), i(0)).expect("nonzero"),
        HomTriple::point(i(0), i(1), i(0)).expect("nonzero"),
        HomTriple::point(i(-1), i(0), i(1)).expect("nonzero"),
    ]
}

/// Degeneracy loci containing the fifth vertex `[x:y:z]` of a normalised
/// pentagon.
pub fn degeneracy_of_vertex<S: Scalar>(v: &HomTriple<S>) -> Vec<Locus> {
    let [x, y, z] = v.coords().clone();
    let scale = v.norm();
    let checks = [
        (Locus::XZero, x.clone()),
        (Locus::YZero, y.clone()),
        (Locus::XPlusOne, x.clone() + z.clone()),
        (Locus::YPlusOne, y.clone() + z.clone()),
        (Locus::XPlusYPlusOne, x + y + z.clone()),
        (Locus::LineAtInfinity, z),
    ];
    checks
        .into_iter()
        .filter(|(_, v)| v.negligible(scale))
        .map(|(l, _)| l)
        .collect()
}

pub fn degeneracy_report<S: Scalar>(m: &PentagonModuli<S>) -> Vec<Locus> {
    degeneracy_of_vertex(&HomTriple::affine(m.x.clone(), m.y.clone()))
}

pub fn pentagon_from_moduli<S: Scalar>(m: &PentagonModuli<S>) -> Result<Polygon<S>, Error> {
    let loci = degeneracy_report(m);
    if !loci.is_empty() {
        return Err(Error::DegenerateModuli(loci));
    }
    let mut vertices = frame::<S>().to_vec();
    vertices.push(HomTriple::affine(m.x.clone(), m.y.clone()));
    Polygon::new(vertices)
}

/// Normalises a pentagon by the projective map sending its first four
/// vertices to the frame.
pub fn moduli_from_pentagon<S: Scalar>(p: &Polygon<S>) -> Result<PentagonModuli<S>, Error> {
    if p.len() != 5 {
        return Err(Error::InvalidPolygon(format!(
            "expected a pentagon, got {} vertices",
            p.len()
        )));
    }
    let v = p.vertices();
    let src = [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()];
    let m = transform_from_correspondence(&src, &frame())?;
    let (x, y) = affine_chart(&apply_map(&m, &v[4]))?;
    Ok(PentagonModuli::new(x, y))
}

/// The closed form of `T` without any checks, for any field (including
/// dual numbers).
pub fn t_map_raw<F: Field>(x: &F, y: &F) -> (F, F) {
    let one = F::one();
    let xy = x.clone() * y.clone();
    let a = one.clone() + x.clone() - xy.clone();
    let xbar = (one.clone() + y.clone()) * a.square()
        / ((one.clone() + x.clone())
            * (xy - one.clone() - y.clone())
            * (one.clone() + x.clone() - y.square()));
    let ybar = (x.clone() - y.clone()).square() * (one.clone() + x.clone() + y.clone())
        / ((one.clone() + y.clone() - x.square()) * (one + x.clone() - y.square()));
    (xbar, ybar)
}

/// Denominator factors of [`t_map`] vanishing at `m`.
pub fn vanishing_factors<S: Scalar>(m: &PentagonModuli<S>) -> Vec<MapFactor> {
    let (x, y) = (&m.x, &m.y);
    let one = S::one();
    let scale = 1.0 + x.to_f64().abs().max(y.to_f64().abs()).powi(2);
    let factors = [
        (MapFactor::OnePlusX, one.clone() + x.clone()),
        (
            MapFactor::XyMinusOneMinusY,
            x.clone() * y.clone() - one.clone() - y.clone(),
        ),
        (
            MapFactor::OnePlusXMinusYSquared,
            one.clone() + x.clone() - y.square(),
        ),
        (
            MapFactor::OnePlusYMinusXSquared,
            one + y.clone() - x.square(),
        ),
    ];
    factors
        .into_iter()
        .filter(|(_, v)| v.negligible(scale))
        .map(|(f, _)| f)
        .collect()
}

/// The evolute map in moduli coordinates.
pub fn t_map<S: Scalar>(m: &PentagonModuli<S>) -> Result<PentagonModuli<S>, Error> {
    let bad = vanishing_factors(m);
    if !bad.is_empty() {
        return Err(Error::MapUndefined(bad));
    }
    let (x, y) = t_map_raw(&m.x, &m.y);
    Ok(PentagonModuli::new(x, y))
}

/// `T` applied `n` times.
pub fn t_iterate<S: Scalar>(m: &PentagonModuli<S>, n: usize) -> Result<PentagonModuli<S>, Error> {
    (0..n).try_fold(m.clone(), |acc, _| t_map(&acc))
}

/// `I(x,y) = (x+1)(y+1)(x+y+1) / (xy)`.
pub fn invariant_i<S: Scalar>(m: &PentagonModuli<S>) -> Result<S, Error> {
    let (x, y) = (&m.x, &m.y);
    let xy = x.clone() * y.clone();
    if xy.is_exact_zero() {
        return Err(Error::DivisionByZero);
    }
    let one = S::one();
    Ok((x.clone() + one.clone()) * (y.clone() + one.clone()) * (x.clone() + y.clone() + one) / xy)
}

/// `J / (x'' y'') + 4 / (xy)` where `J` is the Jacobian determinant of
/// `T^2` at `(x, y)` and `(x'', y'') = T^2(x, y)`. Vanishes identically.
pub fn jacobian_ratio_residual<S: Scalar>(m: &PentagonModuli<S>) -> Result<S, Error> {
    let once = t_map(m)?;
    let twice = t_map(&once)?;
    if m.x.is_exact_zero()
        || m.y.is_exact_zero()
        || twice.x.is_exact_zero()
        || twice.y.is_exact_zero()
    {
        return Err(Error::DivisionByZero);
    }
    let (j, _) = t2_jacobian(m);
    let four = S::from_i64(4);
    Ok(j / (twice.x * twice.y) + four / (m.x.clone() * m.y.clone()))
}

/// Jacobian matrix of `T^2` at `m` (rows: outputs, columns: `x`, `y`),
/// returned with its determinant. Assumes `T^2` is defined at `m`.
pub fn t2_jacobian<S: Scalar>(m: &PentagonModuli<S>) -> (S, [[S; 2]; 2]) {
    let (x1, y1) = t_map_raw(&Dual::var_x(m.x.clone()), &Dual::var_y(m.y.clone()));
    let (x2, y2) = t_map_raw(&x1, &y1);
    let mat = [[x2.dx, x2.dy], [y2.dx, y2.dy]];
    let det = mat[0][0].clone() * mat[1][1].clone() - mat[0][1].clone() * mat[1][0].clone();
    (det, mat)
}

/// `T` computed through the polygon construction: the evolute of the frame
/// pentagon, renormalised.
pub fn t_map_geometric<S: Scalar>(m: &PentagonModuli<S>) -> Result<PentagonModuli<S>, Error> {
    let p = pentagon_from_moduli(m)?;
    let image = evolute(&p)?;
    moduli_from_pentagon(&image.rotated(PENTAGON_READOUT_OFFSET))
}

/// Moduli of the regular pentagon (`star = false`) or the regular
/// pentagram (`star = true`), by numerical normalisation.
pub fn regular_pentagon_moduli(star: bool) -> Result<PentagonModuli<f64>, Error> {
    let step = if star { 2 } else { 1 };
    let pts: Vec<(f64, f64)> = (0..5)
        .map(|i| {
            let a = std::f64::consts::TAU * (i * step) as f64 / 5.0;
            (a.cos(), a.sin())
        })
        .collect();
    moduli_from_pentagon(&Polygon::from_affine(&pts)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Exact};

    fn em(x: Exact, y: Exact) -> PentagonModuli<Exact> {
        PentagonModuli::new(x, y)
    }

    #[test]
    fn frame_pentagon_from_moduli() {
        let p = pentagon_from_moduli(&em(q(3, 1), q(4, 1))).unwrap();
        assert!(p.vertices()[4].same_class(&HomTriple::affine(q(6, 2), q(8, 2))));
        assert_eq!(
            pentagon_from_moduli(&em(q(0, 1), q(1, 1))).unwrap_err(),
            Error::DegenerateModuli(vec![Locus::XZero])
        );
        assert_eq!(
            pentagon_from_moduli(&em(q(-2, 1), q(1, 1))).unwrap_err(),
            Error::DegenerateModuli(vec![Locus::XPlusYPlusOne])
        );
    }

    #[test]
    fn degeneracy_reports() {
        assert!(degeneracy_report(&em(q(3, 1), q(4, 1))).is_empty());
        assert_eq!(
            degeneracy_report(&em(q(-1, 1), q(-1, 1))),
            vec![Locus::XPlusOne, Locus::YPlusOne]
        );
        assert_eq!(
            degeneracy_report(&em(q(-2, 1), q(1, 1))),
            vec![Locus::XPlusYPlusOne]
        );
        let inf = HomTriple::point(q(1, 1), q(2, 1), q(0, 1)).unwrap();
        assert_eq!(degeneracy_of_vertex(&inf), vec![Locus::LineAtInfinity]);
    }

    #[test]
    fn moduli_round_trip_and_projective_invariance() {
        let m = em(q(3, 1), q(4, 1));
        let p = pentagon_from_moduli(&m).unwrap();
        assert_eq!(moduli_from_pentagon(&p).unwrap(), m);
        let map = crate::ProjMap::new([
            [q(2, 1), q(1, 3), q(-1, 1)],
            [q(0, 1), q(5, 2), q(1, 1)],
            [q(1, 1), q(1, 1), q(3, 1)],
        ])
        .unwrap();
        let moved =
            Polygon::new(p.vertices().iter().map(|v| apply_map(&map, v)).collect()).unwrap();
        assert_eq!(moduli_from_pentagon(&moved).unwrap(), m);
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(
            t_map(&em(q(3, 1), q(4, 1))).unwrap(),
            em(q(-20, 21), q(1, 6))
        );
        assert_eq!(t_map(&em(q(1, 1), q(1, 1))).unwrap(), em(q(-1, 1), q(0, 1)));
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        match t_map(&PentagonModuli::new(phi, phi)) {
            Err(Error::MapUndefined(f)) => {
                assert!(f.contains(&MapFactor::XyMinusOneMinusY));
                assert!(f.contains(&MapFactor::OnePlusXMinusYSquared));
                assert!(f.contains(&MapFactor::OnePlusYMinusXSquared));
            }
            other => panic!("expected MapUndefined, got {other:?}"),
        }
        assert_eq!(
            t_map(&em(q(-1, 1), q(2, 1))).unwrap_err(),
            Error::MapUndefined(vec![MapFactor::OnePlusX])
        );
    }

    #[test]
    fn closed_form_matches_hand_evaluation() {
        // independent evaluation of the formula at (3,4) term by term
        let (x, y) = (3i64, 4i64);
        let num_x = (1 + y) * (1 + x - x * y).pow(2);
        let den_x = (1 + x) * (-1 - y + x * y) * (1 + x - y * y);
        let num_y = (x - y).pow(2) * (1 + x + y);
        let den_y = (1 + y - x * x) * (1 + x - y * y);
        assert_eq!(
            t_map(&em(q(x, 1), q(y, 1))).unwrap(),
            em(q(num_x, den_x), q(num_y, den_y))
        );
    }

    #[test]
    fn geometric_route_matches_closed_form() {
        for (x, y) in [(q(3, 1), q(4, 1)), (q(-3, 1), q(1, 2)), (q(7, 5), q(-9, 4))] {
            let m = em(x, y);
            assert_eq!(t_map_geometric(&m).unwrap(), t_map(&m).unwrap());
        }
    }

    #[test]
    fn invariant_values() {
        assert_eq!(invariant_i(&em(q(3, 1), q(4, 1))).unwrap(), q(40, 3));
        assert_eq!(invariant_i(&em(q(-1, 1), q(5, 7))).unwrap(), q(0, 1));
        assert_eq!(invariant_i(&em(q(-20, 21), q(1, 6))).unwrap(), q(-3, 40));
        assert_eq!(
            invariant_i(&em(q(0, 1), q(1, 1))),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn conformal_symplectic_residual() {
        for (x, y) in [(q(3, 1), q(4, 1)), (q(-3, 1), q(1, 2))] {
            assert_eq!(jacobian_ratio_residual(&em(x, y)).unwrap(), q(0, 1));
        }
        assert!(matches!(
            jacobian_ratio_residual(&em(q(-1, 1), q(2, 1))),
            Err(Error::MapUndefined(_))
        ));
    }

    #[test]
    fn dual_partials_match_finite_differences() {
        let (x, y) = (0.7, -2.3);
        let h = 1e-6;
        let (tx, ty) = t_map_raw(&Dual::var_x(x), &Dual::var_y(y));
        let f = |x: f64, y: f64| t_map_raw(&x, &y);
        let fd_x = (
            (f(x + h, y).0 - f(x - h, y).0) / (2.0 * h),
            (f(x + h, y).1 - f(x - h, y).1) / (2.0 * h),
        );
        let fd_y = (
            (f(x, y + h).0 - f(x, y - h).0) / (2.0 * h),
            (f(x, y + h).1 - f(x, y - h).1) / (2.0 * h),
        );
        for (a, b) in [
            (tx.dx, fd_x.0),
            (ty.dx, fd_x.1),
            (tx.dy, fd_y.0),
            (ty.dy, fd_y.1),
        ] {
            assert!((a - b).abs() <= 1e-6 * a.abs().max(1.0), "{a} vs {b}");
        }
    }

    #[test]
    fn t_squared_and_fourth_of_three_four() {
        let m = em(q(3, 1), q(4, 1));
        for n in [2, 4] {
            let t = t_iterate(&m, n).unwrap();
            assert!(t.x.is_negative() && !t.y.is_negative(), "T^{n} = {t:?}");
        }
    }

    #[test]
    fn regular_pentagon_classes() {
        let phi = (1.0 + 5f64.sqrt()) / 2.0;
        let r = regular_pentagon_moduli(false).unwrap();
        assert!((r.x - r.y).abs() < 1e-12);
        assert!((1.0 + r.x - r.x * r.y).abs() < 1e-12);
        assert!((r.x + 1.0 / phi).abs() < 1e-12);
        let s = regular_pentagon_moduli(true).unwrap();
        assert!((s.x - s.y).abs() < 1e-12);
        assert!((1.0 + s.x - s.x * s.y).abs() < 1e-12);
        assert!((s.x - phi).abs() < 1e-12);
        let r_plus = (11.0 + 5.0 * 5f64.sqrt()) / 2.0;
        let r_minus = (11.0 - 5.0 * 5f64.sqrt()) / 2.0;
        assert!((invariant_i(&r).unwrap() - r_minus).abs() < 1e-9);
        assert!((invariant_i(&s).unwrap() - r_plus).abs() < 1e-9);
    }
}
