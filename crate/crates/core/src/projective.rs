//! Homogeneous coordinates in the real projective plane.
//!
//! A [`HomTriple`] is a nonzero triple up to scale. The same type represents
//! points and lines; the [`Kind`] tag only matters when a projective map is
//! applied, since lines transform contragrediently.

use crate::scalar::{Field, Scalar, DEFAULT_TOL};
use crate::Error;

/// Whether a triple is read as a point or as a line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    Point,
    Line,
}

impl Kind {
    pub fn dual(self) -> Kind {
        match self {
            Kind::Point => Kind::Line,
            Kind::Line => Kind::Point,
        }
    }
}

#[derive(Debug, Clone)]
pub struct HomTriple<S> {
    coords: [S; 3],
    kind: Kind,
}

impl<S: Scalar> HomTriple<S> {
    /// Builds a triple. Fails on the zero vector.
    pub fn new(coords: [S; 3], kind: Kind) -> Result<Self, Error> {
        if coords.iter().all(Scalar::is_exact_zero) {
            return Err(Error::ZeroResult);
        }
        Ok(HomTriple { coords, kind })
    }

    pub fn point(a: S, b: S, c: S) -> Result<Self, Error> {
        Self::new([a, b, c], Kind::Point)
    }

    pub fn line(a: S, b: S, c: S) -> Result<Self, Error> {
        Self::new([a, b, c], Kind::Line)
    }

    /// The affine point `[x:y:1]`.
    pub fn affine(x: S, y: S) -> Self {
        HomTriple {
            coords: [x, y, S::one()],
            kind: Kind::Point,
        }
    }

    pub fn coords(&self) -> &[S; 3] {
        &self.coords
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn with_kind(mut self, kind: Kind) -> Self {
        self.kind = kind;
        self
    }

    pub fn norm(&self) -> f64 {
        self.coords
            .iter()
            .map(|c| c.to_f64().powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn to_f64(&self) -> HomTriple<f64> {
        HomTriple {
            coords: [
                self.coords[0].to_f64(),
                self.coords[1].to_f64(),
                self.coords[2].to_f64(),
            ],
            kind: self.kind,
        }
    }

    pub fn dot(&self, other: &Self) -> S {
        dot(&self.coords, &other.coords)
    }

    /// Representative divided by the last nonzero coordinate, scanning
    /// `c`, then `b`, then `a`.
    pub fn canonical(&self) -> [S; 3] {
        let pivot = self
            .coords
            .iter()
            .rev()
            .find(|c| !c.is_exact_zero())
            .cloned()
            .expect("nonzero triple");
        [
            self.coords[0].clone() / pivot.clone(),
            self.coords[1].clone() / pivot.clone(),
            self.coords[2].clone() / pivot,
        ]
    }

    /// Scale-invariant equality.
    pub fn same_class(&self, other: &Self) -> bool {
        let c = cross_raw(&self.coords, &other.coords);
        let scale = self.norm() * other.norm();
        c.iter().all(|v| v.is_negligible(scale, DEFAULT_TOL))
    }

    fn scaled_down(self) -> Self {
        HomTriple {
            coords: S::reduce_triple(self.coords),
            kind: self.kind,
        }
    }

    /// Same class, convenient representative (see [`Scalar::reduce_triple`]).
    pub fn reduced(&self) -> Self {
        self.clone().scaled_down()
    }
}

pub(crate) fn dot<S: Field>(u: &[S; 3], v: &[S; 3]) -> S {
    u[0].clone() * v[0].clone() + u[1].clone() * v[1].clone() + u[2].clone() * v[2].clone()
}

pub(crate) fn cross_raw<S: Field>(u: &[S; 3], v: &[S; 3]) -> [S; 3] {
    [
        u[1].clone() * v[2].clone() - u[2].clone() * v[1].clone(),
        u[2].clone() * v[0].clone() - u[0].clone() * v[2].clone(),
        u[0].clone() * v[1].clone() - u[1].clone() * v[0].clone(),
    ]
}

/// `det(p, q, r)` of three raw triples.
pub fn det3<S: Field>(p: &[S; 3], q: &[S; 3], r: &[S; 3]) -> S {
    dot(p, &cross_raw(q, r))
}

/// Line through two points, or intersection of two lines.
pub fn cross<S: Scalar>(u: &HomTriple<S>, v: &HomTriple<S>) -> Result<HomTriple<S>, Error> {
    let coords = cross_raw(&u.coords, &v.coords);
    let scale = u.norm() * v.norm();
    if coords.iter().all(|c| c.is_negligible(scale, DEFAULT_TOL)) {
        return Err(Error::ZeroResult);
    }
    Ok(HomTriple {
        coords,
        kind: u.kind.dual(),
    }
    .scaled_down())
}

pub fn collinear<S: Scalar>(p: &HomTriple<S>, q: &HomTriple<S>, r: &HomTriple<S>) -> bool {
    collinear_with_tol(p, q, r, DEFAULT_TOL)
}

/// Collinearity with the scale-aware threshold `|det| <= tol * |p||q||r|`.
pub fn collinear_with_tol<S: Scalar>(
    p: &HomTriple<S>,
    q: &HomTriple<S>,
    r: &HomTriple<S>,
    tol: f64,
) -> bool {
    let d = det3(&p.coords, &q.coords, &r.coords);
    d.is_negligible(p.norm() * q.norm() * r.norm(), tol)
}

/// True when no three of the points are collinear.
pub fn general_position<S: Scalar>(points: &[HomTriple<S>]) -> bool {
    let n = points.len();
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                if collinear(&points[i], &points[j], &points[k]) {
                    return false;
                }
            }
        }
    }
    true
}

/// Third coordinate-normalised affine coordinates `(a/c, b/c)`.
pub fn affine_chart<S: Scalar>(p: &HomTriple<S>) -> Result<(S, S), Error> {
    let [a, b, c] = p.coords.clone();
    if c.is_negligible(p.norm(), DEFAULT_TOL) {
        return Err(Error::AtInfinity);
    }
    Ok((a / c.clone(), b / c))
}

/// A projective transformation, stored as an unnormalised 3x3 matrix.
#[derive(Debug, Clone)]
pub struct ProjMap<S> {
    m: [[S; 3]; 3],
}

impl<S: Scalar> ProjMap<S> {
    pub fn new(m: [[S; 3]; 3]) -> Result<Self, Error> {
        let map = ProjMap { m };
        let scale = map
            .m
            .iter()
            .flatten()
            .map(|v| v.to_f64().abs())
            .fold(0.0, f64::max);
        if map.det().is_negligible(scale.powi(3), DEFAULT_TOL) {
            return Err(Error::DegenerateInput("singular matrix".into()));
        }
        Ok(map)
    }

    pub fn identity() -> Self {
        let o = S::one;
        let z = S::zero;
        ProjMap {
            m: [[o(), z(), z()], [z(), o(), z()], [z(), z(), o()]],
        }
    }

    pub fn matrix(&self) -> &[[S; 3]; 3] {
        &self.m
    }

    pub fn det(&self) -> S {
        let [r0, r1, r2] = &self.m;
        det3(r0, r1, r2)
    }

    fn column_matrix(cols: [[S; 3]; 3]) -> Self {
        let mut m: [[S; 3]; 3] = std::array::from_fn(|_| std::array::from_fn(|_| S::zero()));
        for (j, col) in cols.into_iter().enumerate() {
            for (i, v) in col.into_iter().enumerate() {
                m[i][j] = v;
            }
        }
        ProjMap { m }
    }

    /// Adjugate: the inverse up to the factor `det`.
    pub fn adjugate(&self) -> Self {
        let m = &self.m;
        let cof = |i: usize, j: usize| {
            let (r0, r1) = ((i + 1) % 3, (i + 2) % 3);
            let (c0, c1) = ((j + 1) % 3, (j + 2) % 3);
            m[r0][c0].clone() * m[r1][c1].clone() - m[r0][c1].clone() * m[r1][c0].clone()
        };
        // adj[i][j] = cofactor(j, i); the cyclic index choice absorbs signs
        ProjMap {
            m: std::array::from_fn(|i| std::array::from_fn(|j| cof(j, i))),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        ProjMap {
            m: std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    (0..3).fold(S::zero(), |acc, k| {
                        acc + self.m[i][k].clone() * other.m[k][j].clone()
                    })
                })
            }),
        }
    }

    fn mul_vec(&self, v: &[S; 3]) -> [S; 3] {
        std::array::from_fn(|i| dot(&self.m[i], v))
    }

    fn transpose(&self) -> Self {
        ProjMap {
            m: std::array::from_fn(|i| std::array::from_fn(|j| self.m[j][i].clone())),
        }
    }
}

/// Applies `m` to a point, or its inverse transpose to a line.
pub fn apply_map<S: Scalar>(m: &ProjMap<S>, p: &HomTriple<S>) -> HomTriple<S> {
    let coords = match p.kind {
        Kind::Point => m.mul_vec(&p.coords),
        Kind::Line => m.adjugate().transpose().mul_vec(&p.coords),
    };
    HomTriple {
        coords,
        kind: p.kind,
    }
    .scaled_down()
}

/// The map sending the standard frame `e1, e2, e3, (1,1,1)` to `pts`.
fn frame_map<S: Scalar>(pts: &[HomTriple<S>; 4]) -> Result<ProjMap<S>, Error> {
    if !general_position(pts) {
        return Err(Error::DegenerateInput(
            "three of the four points are collinear".into(),
        ));
    }
    let basis = ProjMap::column_matrix([
        pts[0].coords.clone(),
        pts[1].coords.clone(),
        pts[2].coords.clone(),
    ]);
    // solve basis * lambda = p4 by Cramer's rule (adjugate), dropping det
    let lambda = basis.adjugate().mul_vec(&pts[3].coords);
    let scaled = std::array::from_fn(|j| {
        let col = &pts[j].coords;
        std::array::from_fn(|i| col[i].clone() * lambda[j].clone())
    });
    Ok(ProjMap::column_matrix(scaled))
}

/// The unique projective map (up to scale) with `src[i] -> dst[i]`.
pub fn transform_from_correspondence<S: Scalar>(
    src: &[HomTriple<S>; 4],
    dst: &[HomTriple<S>; 4],
) -> Result<ProjMap<S>, Error> {
    let a = frame_map(src)?;
    let b = frame_map(dst)?;
    Ok(b.compose(&a.adjugate()))
}
