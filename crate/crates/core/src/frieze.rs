//! Lifts of polygons to `R^3`, their recurrence coefficients, and the
//! frieze-pattern route to the evolute map.
//!
//! A lift assigns to every vertex a concrete vector. It is *unimodular*
//! when every consecutive determinant `D_i = det(U_{i-1}, U_i, U_{i+1})`
//! equals `1`; such a lift satisfies
//!
//! ```text
//! P_{i+2} = a_{i+1} P_{i+1} - b_i P_i + P_{i-1}
//! ```
//!
//! and, for pentagons, `b_i = a_{i+3}` and `a_i + 1 = a_{i+2} a_{i+3}`.
//!
//! Indices are 1-based and cyclic in the formulas. Storage is 0-based:
//! `vertices[k]` is `P_{k+1}` and `a[k]` is `a_{k+1}`.
//!
//! # Coordinates
//!
//! The frieze coordinates of a pentagon are `(x, y) = (a_3, a_1)`. They are
//! *not* the frame coordinates of [`crate::pentagon`]: the pentagon with
//! frame coordinates `(x, y)` has frieze coordinates
//! [`frieze_coordinates_of_frame`]. The evolute map has the same closed form
//! in both systems.

use serde::Serialize;

use crate::evolute::Polygon;
use crate::pentagon::PentagonModuli;
use crate::projective::{cross_raw, det3, HomTriple};
use crate::scalar::{Exact, Field, Scalar};
use crate::Error;

/// A lift `P_1, ..., P_n` with `n` not divisible by 3.
#[derive(Debug, Clone, PartialEq)]
pub struct Lift<S> {
    vertices: Vec<[S; 3]>,
}

impl<S: Scalar> Lift<S> {
    pub fn new(vertices: Vec<[S; 3]>) -> Result<Self, Error> {
        let n = vertices.len();
        if n < 4 || n.is_multiple_of(3) {
            return Err(Error::InvalidPolygon(format!(
                "lifts need n >= 4 and n not divisible by 3, got n = {n}"
            )));
        }
        Ok(Lift { vertices })
    }

    /// Lift through the canonical representative of every vertex.
    pub fn from_polygon(p: &Polygon<S>) -> Result<Self, Error> {
        Self::new(p.vertices().iter().map(HomTriple::canonical).collect())
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[[S; 3]] {
        &self.vertices
    }

    /// `P_i` with a 1-based cyclic index.
    pub fn p(&self, i: isize) -> &[S; 3] {
        let n = self.vertices.len() as isize;
        &self.vertices[(i - 1).rem_euclid(n) as usize]
    }

    /// `D_i = det(P_{i-1}, P_i, P_{i+1})`.
    pub fn consecutive_det(&self, i: isize) -> S {
        det3(self.p(i - 1), self.p(i), self.p(i + 1))
    }

    /// `D_1, ..., D_n`.
    pub fn dets(&self) -> Vec<S> {
        (1..=self.len() as isize)
            .map(|i| self.consecutive_det(i))
            .collect()
    }

    pub fn is_unimodular(&self) -> bool {
        self.dets()
            .iter()
            .all(|d| (d.clone() - S::one()).is_negligible(1.0, 1e-12))
    }

    /// Vertex `i` multiplied by `t[i]`.
    pub fn rescaled(&self, t: &[S]) -> Self {
        Lift {
            vertices: self
                .vertices
                .iter()
                .zip(t)
                .map(|(v, s)| v.clone().map(|c| c * s.clone()))
                .collect(),
        }
    }

    /// Same lift relabelled to start at `P_{offset+1}`.
    pub fn rotated(&self, offset: usize) -> Self {
        let n = self.vertices.len();
        Lift {
            vertices: (0..n)
                .map(|k| self.vertices[(k + offset) % n].clone())
                .collect(),
        }
    }

    /// Every vertex mapped by the matrix `m`.
    pub fn transformed(&self, m: &[[S; 3]; 3]) -> Self {
        Lift {
            vertices: self
                .vertices
                .iter()
                .map(|v| std::array::from_fn(|i| crate::projective::dot(&m[i], v)))
                .collect(),
        }
    }

    pub fn to_polygon(&self) -> Result<Polygon<S>, Error> {
        Polygon::new(
            self.vertices
                .iter()
                .map(|v| HomTriple::point(v[0].clone(), v[1].clone(), v[2].clone()))
                .collect::<Result<_, _>>()?,
        )
    }
}

/// Recurrence coefficients `a_1..a_n`, `b_1..b_n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Coefficients<S> {
    pub a: Vec<S>,
    pub b: Vec<S>,
}

impl<S: Scalar> Coefficients<S> {
    /// `a_i` with a 1-based cyclic index.
    pub fn a(&self, i: isize) -> &S {
        &self.a[(i - 1).rem_euclid(self.a.len() as isize) as usize]
    }

    /// `b_i` with a 1-based cyclic index.
    pub fn b(&self, i: isize) -> &S {
        &self.b[(i - 1).rem_euclid(self.b.len() as isize) as usize]
    }

    /// Frieze coordinates `(a_3, a_1)`.
    pub fn moduli(&self) -> PentagonModuli<S> {
        PentagonModuli::new(self.a(3).clone(), self.a(1).clone())
    }

    /// Whether `b_i = a_{i+3}` and `a_i + 1 = a_{i+2} a_{i+3}` hold for all
    /// `i` (pentagons only).
    pub fn satisfies_pentagon_relations(&self) -> bool {
        if self.a.len() != 5 {
            return false;
        }
        (1..=5).all(|i| {
            let scale = 1.0 + self.a(i + 2).to_f64().abs() * self.a(i + 3).to_f64().abs();
            (self.b(i).clone() - self.a(i + 3).clone()).negligible(scale)
                && (self.a(i).clone() + S::one() - self.a(i + 2).clone() * self.a(i + 3).clone())
                    .negligible(scale)
        })
    }
}

/// `3 W^{-1}` as an integer matrix, where `W` is the cyclic window matrix
/// with ones at offsets `-1, 0, 1`. Invertible exactly when `3` does not
/// divide `n`.
fn window_inverse_times_three(n: usize) -> Vec<Vec<i64>> {
    let mut m: Vec<Vec<Exact>> = (0..n)
        .map(|i| {
            let mut row = vec![<Exact as Field>::zero(); 2 * n];
            for d in [n - 1, 0, 1] {
                row[(i + d) % n] = <Exact as Field>::one();
            }
            row[n + i] = Exact::from_i64(3);
            row
        })
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .find(|&r| !m[r][col].is_exact_zero())
            .expect("window matrix is invertible for n not divisible by 3");
        m.swap(col, pivot);
        let inv = <Exact as Field>::one() / m[col][col].clone();
        for v in m[col].iter_mut() {
            *v = v.clone() * inv.clone();
        }
        for r in 0..n {
            if r != col && !m[r][col].is_exact_zero() {
                let f = m[r][col].clone();
                for c in 0..2 * n {
                    let sub = f.clone() * m[col][c].clone();
                    m[r][c] = m[r][c].clone() - sub;
                }
            }
        }
    }
    m.iter()
        .map(|row| {
            row[n..]
                .iter()
                .map(|v| {
                    assert!(v.is_integer(), "3 W^-1 is integral");
                    i64::try_from(v.to_integer()).expect("small entries")
                })
                .collect()
        })
        .collect()
}

fn int_pow<S: Field>(base: &S, e: i64) -> S {
    let mut acc = S::one();
    for _ in 0..e.unsigned_abs() {
        acc = if e > 0 {
            acc * base.clone()
        } else {
            acc / base.clone()
        };
    }
    acc
}

/// The unique rescaling `t_i U_i` with all consecutive determinants `1`.
///
/// For pentagons `t_i = (D_1 ... D_5)^{1/3} / (D_{i-1} D_{i+1})`. In exact
/// arithmetic the cube root must itself be rational, otherwise
/// [`Error::InexactCubeRoot`] is returned and [`normalized_coefficients`]
/// should be used instead.
pub fn lift_unimodular<S: Scalar>(u: &Lift<S>) -> Result<Lift<S>, Error> {
    let d = u.dets();
    let scale: f64 = u
        .vertices
        .iter()
        .flatten()
        .map(|c| c.to_f64().abs())
        .fold(0.0, f64::max);
    if d.iter().any(|v| v.negligible(scale.powi(3))) {
        return Err(Error::DegenerateLift);
    }
    let n = u.len();
    let c = window_inverse_times_three(n);
    // t_i^3 = prod_j D_j^{-c_ij}, with D_j stored at index j - 1 and
    // t_i at index i - 1
    let t = (0..n)
        .map(|i| {
            let cube = (0..n).fold(S::one(), |acc, j| acc * int_pow(&d[j], -c[i][j]));
            cube.cbrt()
                .ok_or_else(|| Error::InexactCubeRoot(cube.render()))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(u.rescaled(&t))
}

/// Coefficients of a unimodular lift, read off by determinants.
pub fn recurrence_coefficients<S: Scalar>(q: &Lift<S>) -> Result<Coefficients<S>, Error> {
    if !q.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    Ok(raw_coefficients(q, &S::one()))
}

/// `a_{i+1} = det(P_{i-1}, P_i, P_{i+2}) / kappa` and
/// `b_i = det(P_{i-1}, P_{i+1}, P_{i+2}) / kappa`.
fn raw_coefficients<S: Scalar>(q: &Lift<S>, kappa: &S) -> Coefficients<S> {
    let n = q.len() as isize;
    let mut a = vec![S::zero(); n as usize];
    let mut b = vec![S::zero(); n as usize];
    for i in 1..=n {
        a[i.rem_euclid(n) as usize] = det3(q.p(i - 1), q.p(i), q.p(i + 2)) / kappa.clone();
        b[(i - 1) as usize] = det3(q.p(i - 1), q.p(i + 1), q.p(i + 2)) / kappa.clone();
    }
    Coefficients { a, b }
}

/// Coefficients of the unimodular rescaling of an arbitrary lift, computed
/// without cube roots.
///
/// The unimodular scale factors satisfy `t_{j+3} / t_j = D_{j+1} / D_{j+2}`.
/// Because 3 does not divide `n`, this chain reaches every index from
/// `t_1 = 1`, fixing `t` up to one global factor. That factor cancels once
/// all determinants are divided by their common value `kappa`.
pub fn normalized_coefficients<S: Scalar>(u: &Lift<S>) -> Result<Coefficients<S>, Error> {
    let d = u.dets();
    if d.iter().any(Scalar::is_exact_zero) {
        return Err(Error::DegenerateLift);
    }
    let n = u.len();
    let mut t: Vec<Option<S>> = vec![None; n];
    t[0] = Some(S::one());
    let mut j = 0usize;
    for _ in 1..n {
        // indices are 0-based here: D_{j+1} of the 1-based chain sits at d[j + 1]
        let next = (j + 3) % n;
        let ratio = d[(j + 1) % n].clone() / d[(j + 2) % n].clone();
        t[next] = Some(t[j].clone().expect("visited") * ratio);
        j = next;
    }
    let t: Vec<S> = t
        .into_iter()
        .map(|v| v.expect("chain covers every index"))
        .collect();
    let scaled = u.rescaled(&t);
    let kappa = scaled.consecutive_det(1);
    if kappa.is_exact_zero() {
        return Err(Error::DegenerateLift);
    }
    Ok(raw_coefficients(&scaled, &kappa))
}

/// The pentagon coefficients in frieze coordinates:
/// `a_1 = y, a_2 = (1+x+y)/(xy), a_3 = x, a_4 = (1+y)/x, a_5 = (1+x)/y` and
/// `b_i = a_{i+3}`.
pub fn coefficients_from_moduli<S: Scalar>(x: &S, y: &S) -> Result<Coefficients<S>, Error> {
    if x.is_exact_zero() || y.is_exact_zero() {
        return Err(Error::DivisionByZero);
    }
    let one = S::one();
    let a = vec![
        y.clone(),
        (one.clone() + x.clone() + y.clone()) / (x.clone() * y.clone()),
        x.clone(),
        (one.clone() + y.clone()) / x.clone(),
        (one + x.clone()) / y.clone(),
    ];
    let b = (0..5).map(|i| a[(i + 3) % 5].clone()).collect();
    Ok(Coefficients { a, b })
}

/// Rebuilds a lift from its coefficients: `P_1, P_2, P_3` is the standard
/// basis and the recurrence produces the rest. Fails unless the sequence
/// closes up with period `n`.
pub fn lift_from_coefficients<S: Scalar>(c: &Coefficients<S>) -> Result<Lift<S>, Error> {
    let n = c.a.len();
    let e =
        |k: usize| std::array::from_fn::<S, 3, _>(|j| if j == k { S::one() } else { S::zero() });
    let mut p: Vec<[S; 3]> = vec![e(0), e(1), e(2)];
    // p[k] holds P_{k+1}; P_{i+2} = a_{i+1} P_{i+1} - b_i P_i + P_{i-1}
    for i in 2..=(n as isize + 1) {
        let (pm, p0, p1) = (&p[(i - 2) as usize], &p[(i - 1) as usize], &p[i as usize]);
        let a = c.a(i + 1);
        let b = c.b(i);
        let next = std::array::from_fn(|k| {
            a.clone() * p1[k].clone() - b.clone() * p0[k].clone() + pm[k].clone()
        });
        p.push(next);
    }
    let scale = p
        .iter()
        .flatten()
        .map(|v| v.to_f64().abs())
        .fold(1.0, f64::max);
    let closes = (0..3).all(|k| {
        p[n + k]
            .iter()
            .zip(&p[k])
            .all(|(u, v)| (u.clone() - v.clone()).negligible(scale))
    });
    if !closes {
        return Err(Error::DegenerateInput(
            "coefficients do not define a closed polygon".into(),
        ));
    }
    p.truncate(n);
    Lift::new(p)
}

/// The lift of the evolute built from a lift of `P` by iterated cross
/// products, with no projective normalisation in between:
///
/// ```text
/// Q_i = [((P_{i-2} x P_{i-1}) x (P_i x P_{i+1})) x ((P_{i-2} x P_i) x (P_{i-1} x P_{i+1}))]
///     x [((P_{i-1} x P_i) x (P_{i+1} x P_{i+2})) x ((P_{i-1} x P_{i+1}) x (P_i x P_{i+2}))]
/// ```
///
/// `Q_i` is the vertex of `T(P)` next to `P_i`. The result is relabelled to
/// the convention of [`crate::evolute::evolute`], so that its vertex `i` is
/// `Q_{i+1}`.
pub fn evolute_lift<S: Scalar>(u: &Lift<S>) -> Result<Lift<S>, Error> {
    let n = u.len() as isize;
    let x = |a: &[S; 3], b: &[S; 3]| S::reduce_triple(cross_raw(a, b));
    let q = |i: isize| {
        let p = |k: isize| u.p(k);
        let first = x(
            &x(&x(p(i - 2), p(i - 1)), &x(p(i), p(i + 1))),
            &x(&x(p(i - 2), p(i)), &x(p(i - 1), p(i + 1))),
        );
        let second = x(
            &x(&x(p(i - 1), p(i)), &x(p(i + 1), p(i + 2))),
            &x(&x(p(i - 1), p(i + 1)), &x(p(i), p(i + 2))),
        );
        x(&first, &second)
    };
    let vertices: Vec<[S; 3]> = (1..=n).map(|i| q(i + 1)).collect();
    if vertices.iter().any(|v| v.iter().all(Scalar::is_exact_zero)) {
        return Err(Error::DegenerateImage("a cross product vanishes".into()));
    }
    Lift::new(vertices)
}

/// Coefficients of the unimodular lift of `T(P)`, computed from any lift of
/// `P` without cube roots.
pub fn evolute_coefficients<S: Scalar>(u: &Lift<S>) -> Result<Coefficients<S>, Error> {
    normalized_coefficients(&evolute_lift(u)?)
}

/// The evolute map in frieze coordinates, computed entirely through lifts:
/// coefficients, closed lift, cross-product evolute lift, root-free
/// rescaling, and read-out of `(a_3, a_1)`.
pub fn t_map_frieze<S: Scalar>(m: &PentagonModuli<S>) -> Result<PentagonModuli<S>, Error> {
    let c = coefficients_from_moduli(&m.x, &m.y)?;
    let lift = lift_from_coefficients(&c)?;
    Ok(evolute_coefficients(&lift)?.moduli())
}

/// `(prod a_i, sum a_i + 3)`; both equal the invariant for pentagons.
pub fn monodromy_check<S: Scalar>(c: &Coefficients<S>) -> (S, S) {
    let prod = c.a.iter().fold(S::one(), |acc, v| acc * v.clone());
    let sum = c.a.iter().fold(S::from_i64(3), |acc, v| acc + v.clone());
    (prod, sum)
}

/// The frieze pattern of a pentagon: a row of ones, the coefficient row,
/// its shifted companion, and a closing row of ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FriezeRows<S> {
    pub rows: Vec<Vec<S>>,
}

impl<S: Scalar> FriezeRows<S> {
    /// Every 2x2 diamond `m_j(k) m_j(k+1) - m_{j-1}(k+1) m_{j+1}(k)` for the
    /// two interior rows. Each equals `1` in a frieze.
    pub fn diamonds(&self) -> Vec<S> {
        let n = self.rows[0].len();
        let mut out = Vec::new();
        for j in 1..self.rows.len() - 1 {
            for k in 0..n {
                let r = &self.rows;
                out.push(
                    r[j][k].clone() * r[j][(k + 1) % n].clone()
                        - r[j - 1][(k + 1) % n].clone() * r[j + 1][k].clone(),
                );
            }
        }
        out
    }
}

/// Frieze rows of the pentagon with frieze coordinates `(x, y)`.
pub fn frieze_rows<S: Scalar>(x: &S, y: &S) -> Result<FriezeRows<S>, Error> {
    if x.is_exact_zero() || y.is_exact_zero() {
        return Err(Error::DivisionByZero);
    }
    let one = S::one();
    let first = vec![
        x.clone(),
        (y.clone() + one.clone()) / x.clone(),
        (x.clone() + one.clone()) / y.clone(),
        y.clone(),
        (x.clone() + y.clone() + one.clone()) / (x.clone() * y.clone()),
    ];
    let second = (0..5)
        .map(|k| first[k].clone() * first[(k + 1) % 5].clone() - one.clone())
        .collect();
    let ones = vec![one; 5];
    Ok(FriezeRows {
        rows: vec![ones.clone(), first, second, ones],
    })
}

/// Frieze coordinates of the pentagon with frame coordinates `(x, y)`:
/// `(-(x+1)/(x+y+1), -y/(y+1))`.
pub fn frieze_coordinates_of_frame<S: Scalar>(
    m: &PentagonModuli<S>,
) -> Result<PentagonModuli<S>, Error> {
    let one = S::one();
    let s = m.x.clone() + m.y.clone() + one.clone();
    let t = m.y.clone() + one.clone();
    if s.is_exact_zero() || t.is_exact_zero() {
        return Err(Error::DivisionByZero);
    }
    Ok(PentagonModuli::new(
        -(m.x.clone() + one) / s,
        -m.y.clone() / t,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pentagon::{invariant_i, pentagon_from_moduli, t_map};
    use crate::scalar::q;

    fn qs(v: &[(i64, i64)]) -> Vec<Exact> {
        v.iter().map(|&(n, d)| q(n, d)).collect()
    }

    #[test]
    fn coefficients_from_moduli_examples() {
        let c = coefficients_from_moduli(&q(3, 1), &q(4, 1)).unwrap();
        assert_eq!(c.a, qs(&[(4, 1), (2, 3), (3, 1), (5, 3), (1, 1)]));
        assert_eq!(c.a(1).clone() + q(1, 1), c.a(3).clone() * c.a(4).clone());
        assert_eq!(c.a(1).clone() + q(1, 1), q(5, 1));
        let c = coefficients_from_moduli(&q(1, 1), &q(1, 1)).unwrap();
        assert_eq!(c.a, qs(&[(1, 1), (3, 1), (1, 1), (2, 1), (2, 1)]));
        assert_eq!(
            coefficients_from_moduli(&q(0, 1), &q(1, 1)),
            Err(Error::DivisionByZero)
        );
    }

    #[test]
    fn closed_lift_reproduces_coefficients() {
        let c = coefficients_from_moduli(&q(3, 1), &q(4, 1)).unwrap();
        let lift = lift_from_coefficients(&c).unwrap();
        assert!(lift.dets().iter().all(|d| *d == q(1, 1)));
        let back = recurrence_coefficients(&lift).unwrap();
        assert_eq!(back, c);
        assert!(back.satisfies_pentagon_relations());
    }

    #[test]
    fn non_closing_coefficients_are_rejected() {
        let mut c = coefficients_from_moduli(&q(3, 1), &q(4, 1)).unwrap();
        c.a[0] = q(7, 1);
        assert!(matches!(
            lift_from_coefficients(&c),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn frame_lift_has_converted_coordinates() {
        let m = PentagonModuli::new(q(3, 1), q(4, 1));
        let p = pentagon_from_moduli(&m).unwrap();
        let u = Lift::from_polygon(&p).unwrap();
        let c = normalized_coefficients(&u).unwrap();
        let phi = frieze_coordinates_of_frame(&m).unwrap();
        assert_eq!(phi, PentagonModuli::new(q(-1, 2), q(-4, 5)));
        assert_eq!(c, coefficients_from_moduli(&phi.x, &phi.y).unwrap());
        // product of the coefficients is -1/I in frame coordinates
        assert_eq!(monodromy_check(&c).0, q(-1, 1) / invariant_i(&m).unwrap());
    }

    #[test]
    fn unimodular_rescaling() {
        let c = coefficients_from_moduli(&q(3, 1), &q(4, 1)).unwrap();
        let lift = lift_from_coefficients(&c).unwrap();
        let same = lift_unimodular(&lift).unwrap();
        assert_eq!(same, lift);

        let doubled = lift.rescaled(&vec![q(2, 1); 5]);
        assert!(doubled.dets().iter().all(|d| *d == q(8, 1)));
        assert_eq!(lift_unimodular(&doubled).unwrap(), lift);

        let squashed = lift.rescaled(&[q(1, 1), q(1, 1), q(0, 1), q(1, 1), q(1, 1)]);
        assert_eq!(lift_unimodular(&squashed), Err(Error::DegenerateLift));

        let frame = Lift::from_polygon(
            &pentagon_from_moduli(&PentagonModuli::new(q(3, 1), q(4, 1))).unwrap(),
        )
        .unwrap();
        let uneven = frame.rescaled(&[q(2, 1), q(1, 1), q(1, 1), q(1, 1), q(1, 1)]);
        assert!(matches!(
            lift_unimodular(&uneven),
            Err(Error::InexactCubeRoot(_))
        ));
        let approx = Lift::new(
            uneven
                .vertices()
                .iter()
                .map(|v| v.clone().map(|c| Scalar::to_f64(&c)))
                .collect(),
        )
        .unwrap();
        let fixed = lift_unimodular(&approx).unwrap();
        assert!(fixed.dets().iter().all(|d| (d - 1.0).abs() < 1e-12));
    }

    #[test]
    fn constant_determinant_scaling_is_a_cube_root() {
        let c = coefficients_from_moduli(&0.4f64, &-2.5).unwrap();
        let lift = lift_from_coefficients(&c).unwrap();
        let s = 1.7f64;
        let scaled = lift.rescaled(&[s; 5]);
        let d = s.powi(3);
        assert!(scaled.dets().iter().all(|v| (v - d).abs() < 1e-12 * d));
        assert_eq!(recurrence_coefficients(&scaled), Err(Error::NotUnimodular));
        let u = lift_unimodular(&scaled).unwrap();
        // every t_i equals d^(-1/3), so t_{i-1} t_i t_{i+1} = 1/d
        for (got, want) in u
            .vertices()
            .iter()
            .flatten()
            .zip(lift.vertices().iter().flatten())
        {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn general_n_lift() {
        for n in [4usize, 7, 8] {
            let pts: Vec<[f64; 3]> = (0..n)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / n as f64;
                    [a.cos() * 1.3, a.sin(), 1.0 + 0.1 * i as f64]
                })
                .collect();
            let u = lift_unimodular(&Lift::new(pts.clone()).unwrap()).unwrap();
            assert!(u.is_unimodular(), "n = {n}");
            let direct = recurrence_coefficients(&u).unwrap();
            let rootless = normalized_coefficients(&Lift::new(pts).unwrap()).unwrap();
            for (a, b) in direct.a.iter().zip(&rootless.a) {
                assert!((a - b).abs() < 1e-9);
            }
        }
        assert!(Lift::new(vec![[1.0, 0.0, 0.0]; 6]).is_err());
    }

    #[test]
    fn recurrence_reproduces_vertices() {
        let c = coefficients_from_moduli(&q(-3, 1), &q(5, 7)).unwrap();
        let u = lift_from_coefficients(&c).unwrap();
        for i in 1..=5isize {
            let lhs = u.p(i + 2).clone();
            let rhs: [Exact; 3] = std::array::from_fn(|k| {
                c.a(i + 1).clone() * u.p(i + 1)[k].clone() - c.b(i).clone() * u.p(i)[k].clone()
                    + u.p(i - 1)[k].clone()
            });
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn sl3_invariance() {
        let c = coefficients_from_moduli(&q(2, 3), &q(-5, 2)).unwrap();
        let u = lift_from_coefficients(&c).unwrap();
        let m = [
            [q(1, 1), q(2, 1), q(0, 1)],
            [q(0, 1), q(1, 1), q(3, 1)],
            [q(0, 1), q(0, 1), q(1, 1)],
        ];
        assert_eq!(det3(&m[0], &m[1], &m[2]), q(1, 1));
        assert_eq!(recurrence_coefficients(&u.transformed(&m)).unwrap(), c);
    }

    #[test]
    fn frieze_route_gives_the_evolute_map() {
        let m = PentagonModuli::new(q(3, 1), q(4, 1));
        assert_eq!(
            t_map_frieze(&m).unwrap(),
            PentagonModuli::new(q(-20, 21), q(1, 6))
        );
        let c = coefficients_from_moduli(&m.x, &m.y).unwrap();
        let ev = evolute_coefficients(&lift_from_coefficients(&c).unwrap()).unwrap();
        assert!(ev.satisfies_pentagon_relations());
        let (p, s) = monodromy_check(&ev);
        assert_eq!(p, s);
        assert_eq!(p, q(-3, 40));
    }

    #[test]
    fn frieze_route_at_one_one_is_degenerate() {
        let m = PentagonModuli::new(q(1, 1), q(1, 1));
        match t_map_frieze(&m) {
            Ok(image) => {
                assert_eq!(image, PentagonModuli::new(q(-1, 1), q(0, 1)));
                assert!(!crate::pentagon::degeneracy_report(&image).is_empty());
            }
            Err(e) => assert!(matches!(
                e,
                Error::DegenerateLift | Error::DegenerateImage(_)
            )),
        }
    }

    #[test]
    fn frame_evolute_read_out_matches_conversion() {
        // the frame pentagon's evolute, relabelled like the frame read-out
        // and converted to frieze coordinates, is the closed-form image
        let m = PentagonModuli::new(q(7, 2), q(-5, 3));
        let u = Lift::from_polygon(&pentagon_from_moduli(&m).unwrap()).unwrap();
        let ev = evolute_lift(&u)
            .unwrap()
            .rotated(crate::evolute::PENTAGON_READOUT_OFFSET);
        let image = normalized_coefficients(&ev).unwrap().moduli();
        let expected = frieze_coordinates_of_frame(&t_map(&m).unwrap()).unwrap();
        assert_eq!(image, expected);
    }

    #[test]
    fn monodromy_examples() {
        let c = coefficients_from_moduli(&q(3, 1), &q(4, 1)).unwrap();
        assert_eq!(monodromy_check(&c), (q(40, 3), q(40, 3)));
        let c = coefficients_from_moduli(&q(1, 1), &q(1, 1)).unwrap();
        assert_eq!(monodromy_check(&c), (q(12, 1), q(12, 1)));
    }

    #[test]
    fn frieze_row_examples() {
        let f = frieze_rows(&q(3, 1), &q(4, 1)).unwrap();
        assert_eq!(f.rows[1], qs(&[(3, 1), (5, 3), (1, 1), (4, 1), (2, 3)]));
        assert!(f.diamonds().iter().all(|d| *d == q(1, 1)));
        let f = frieze_rows(&q(1, 1), &q(1, 1)).unwrap();
        assert_eq!(f.rows[1], qs(&[(1, 1), (2, 1), (2, 1), (1, 1), (3, 1)]));
        assert!(f.diamonds().iter().all(|d| *d == q(1, 1)));
        assert!(frieze_rows(&q(0, 1), &q(1, 1)).is_err());
    }
}
