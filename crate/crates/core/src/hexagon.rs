//! Hexagons: normalised coordinates, the axis-aligned quadric, the circle
//! map `f(t) = (2t-1)/(t^2-1)`, and orbit experiments.
//!
//! A hexagon is normalised by the projective map sending its first four
//! vertices to `(0,1), (-1,1), (-1,0), (0,0)`. The remaining two vertices
//! give the coordinates `(x5, y5, x6, y6)`. Classes of axis-aligned hexagons
//! form the quadric `A^2 - B^2 + C^2 = 1, D = 0` with
//! `A = x5 + x6 + 1`, `B = x5 - x6 + 2 y5 - 1`, `C = 2 y5 - 1`, `D = y6 - y5`.
//! This holds for every cyclic relabelling and reversal of `H(a,b)`.
//!
//! On axis-aligned hexagons `T` acts on `H(a,b)` (vertices `(0,0), (a,0),
//! (a,b), (1,b), (1,1), (0,1)`) as `(a, b) -> (f(a), f(b))` once the image
//! is reflected in the diagonal and renormalised by a direction-preserving
//! affine map. See [`renormalized_step`] for the exact labelling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::evolute::{evolute, Polygon};
use crate::projective::{affine_chart, apply_map, transform_from_correspondence, HomTriple};
use crate::scalar::Scalar;
use crate::Error;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HexagonModuli<S> {
    pub x5: S,
    pub y5: S,
    pub x6: S,
    pub y6: S,
}

impl<S: Scalar> HexagonModuli<S> {
    pub fn new(x5: S, y5: S, x6: S, y6: S) -> Self {
        HexagonModuli { x5, y5, x6, y6 }
    }

    pub fn to_f64(&self) -> HexagonModuli<f64> {
        HexagonModuli::new(
            self.x5.to_f64(),
            self.y5.to_f64(),
            self.x6.to_f64(),
            self.y6.to_f64(),
        )
    }

    pub fn as_array(&self) -> [S; 4] {
        [
            self.x5.clone(),
            self.y5.clone(),
            self.x6.clone(),
            self.y6.clone(),
        ]
    }
}

/// `(A, B, C, D)`.
pub fn abcd<S: Scalar>(m: &HexagonModuli<S>) -> (S, S, S, S) {
    let one = S::one();
    let two = S::from_i64(2);
    let a = m.x5.clone() + m.x6.clone() + one.clone();
    let b = m.x5.clone() - m.x6.clone() + two.clone() * m.y5.clone() - one.clone();
    let c = two * m.y5.clone() - one;
    let d = m.y6.clone() - m.y5.clone();
    (a, b, c, d)
}

/// `(|A^2 - B^2 + C^2 - 1|, |D|)`.
pub fn axis_aligned_residual<S: Scalar>(m: &HexagonModuli<S>) -> (S, S) {
    let (a, b, c, d) = abcd(m);
    let quad = a.square() - b.square() + c.square() - S::one();
    (quad.abs(), d.abs())
}

fn frame<S: Scalar>() -> [HomTriple<S>; 4] {
    let i = |v: i64| S::from_i64(v);
    [
        HomTriple::affine(i(0), i(1)),
        HomTriple::affine(i(-1), i(1)),
        HomTriple::affine(i(-1), i(0)),
        HomTriple::affine(i(0), i(0)),
    ]
}

pub fn hexagon_from_moduli<S: Scalar>(m: &HexagonModuli<S>) -> Result<Polygon<S>, Error> {
    let mut vertices = frame::<S>().to_vec();
    vertices.push(HomTriple::affine(m.x5.clone(), m.y5.clone()));
    vertices.push(HomTriple::affine(m.x6.clone(), m.y6.clone()));
    let p = Polygon::new(vertices).map_err(|e| Error::DegenerateInput(e.to_string()))?;
    if p.is_degenerate() {
        return Err(Error::DegenerateInput(
            "three consecutive vertices are collinear".into(),
        ));
    }
    Ok(p)
}

pub fn moduli_from_hexagon<S: Scalar>(p: &Polygon<S>) -> Result<HexagonModuli<S>, Error> {
    if p.len() != 6 {
        return Err(Error::InvalidPolygon(format!(
            "expected a hexagon, got {} vertices",
            p.len()
        )));
    }
    if p.is_degenerate() {
        return Err(Error::DegenerateInput(
            "three consecutive vertices are collinear".into(),
        ));
    }
    let v = p.vertices();
    let src = [v[0].clone(), v[1].clone(), v[2].clone(), v[3].clone()];
    let m = transform_from_correspondence(&src, &frame())?;
    let (x5, y5) = affine_chart(&apply_map(&m, &v[4]))?;
    let (x6, y6) = affine_chart(&apply_map(&m, &v[5]))?;
    Ok(HexagonModuli::new(x5, y5, x6, y6))
}

/// One step of `T` on normalised coordinates.
pub fn hexagon_step<S: Scalar>(m: &HexagonModuli<S>) -> Result<HexagonModuli<S>, Error> {
    let image = evolute(&hexagon_from_moduli(m)?)?;
    moduli_from_hexagon(&image).map_err(|e| Error::DegenerateImage(e.to_string()))
}

/// The axis-aligned hexagon `H(a, b)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AxisAlignedHexagon<S> {
    pub a: S,
    pub b: S,
}

impl<S: Scalar> AxisAlignedHexagon<S> {
    pub fn new(a: S, b: S) -> Self {
        AxisAlignedHexagon { a, b }
    }

    /// Vertices `(0,0), (a,0), (a,b), (1,b), (1,1), (0,1)`.
    pub fn polygon(&self) -> Result<Polygon<S>, Error> {
        let (z, o) = (S::zero(), S::one());
        let pts = [
            (z.clone(), z.clone()),
            (self.a.clone(), z.clone()),
            (self.a.clone(), self.b.clone()),
            (o.clone(), self.b.clone()),
            (o.clone(), o.clone()),
            (z, o),
        ];
        Polygon::from_affine(&pts)
    }

    pub fn moduli(&self) -> Result<HexagonModuli<S>, Error> {
        moduli_from_hexagon(&self.polygon()?)
    }
}

/// A point of the projective line `R ∪ {∞}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum Extended<S> {
    Finite(S),
    Infinity,
}

impl<S: Scalar> Extended<S> {
    pub fn finite(&self) -> Option<&S> {
        match self {
            Extended::Finite(v) => Some(v),
            Extended::Infinity => None,
        }
    }

    pub fn render(&self) -> String {
        match self {
            Extended::Finite(v) => v.render(),
            Extended::Infinity => "inf".into(),
        }
    }
}

/// `f(t) = (2t - 1) / (t^2 - 1)` on `R ∪ {∞}`, with `f(±1) = ∞` and
/// `f(∞) = 0`.
pub fn f_map<S: Scalar>(t: &Extended<S>) -> Extended<S> {
    match t {
        Extended::Infinity => Extended::Finite(S::zero()),
        Extended::Finite(t) => {
            let den = t.square() - S::one();
            if den.negligible(1.0 + t.to_f64().abs().powi(2)) {
                Extended::Infinity
            } else {
                Extended::Finite((S::from_i64(2) * t.clone() - S::one()) / den)
            }
        }
    }
}

/// `f` on the affine line; the poles `t = ±1` are errors.
pub fn f_affine<S: Scalar>(t: &S) -> Result<S, Error> {
    match f_map(&Extended::Finite(t.clone())) {
        Extended::Finite(v) => Ok(v),
        Extended::Infinity => Err(Error::PoleAtInput),
    }
}

/// Topological degree of `f` as a map of the circle, counted by tracking
/// the angle `2 atan(t)` over `samples` points.
pub fn circle_degree(samples: usize) -> i64 {
    let angle = |t: &Extended<f64>| match t {
        Extended::Finite(v) => 2.0 * v.atan(),
        Extended::Infinity => std::f64::consts::PI,
    };
    let point = |k: usize| {
        let theta = -std::f64::consts::PI + std::f64::consts::TAU * k as f64 / samples as f64;
        if (theta.abs() - std::f64::consts::PI).abs() < 1e-15 {
            Extended::Infinity
        } else {
            Extended::Finite((theta / 2.0).tan())
        }
    };
    let mut total = 0.0;
    let mut prev = angle(&f_map(&point(0)));
    for k in 1..=samples {
        let cur = angle(&f_map(&point(k)));
        let mut d = cur - prev;
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        total += d;
        prev = cur;
    }
    (total / std::f64::consts::TAU).round() as i64
}

/// Cyclic offset applied after the diagonal reflection in
/// [`renormalized_step`].
pub const HEXAGON_READOUT_OFFSET: usize = 3;

/// `T` followed by reflection in `y = x` and the direction-preserving
/// affine map returning the image to the form `H(a', b')`.
///
/// After reflection the vertices are relabelled from
/// [`HEXAGON_READOUT_OFFSET`]; the affine map `(x, y) -> ((x - x0)/(x4 - x0),
/// (y - y0)/(y4 - y0))` then sends vertex 0 to `(0,0)` and vertex 4 to
/// `(1,1)`, and `a'`, `b'` are read from vertices 1 and 3.
pub fn renormalized_step<S: Scalar>(
    h: &AxisAlignedHexagon<S>,
) -> Result<AxisAlignedHexagon<S>, Error> {
    for t in [&h.a, &h.b] {
        f_affine(t)?;
    }
    let image = evolute(&h.polygon()?)?;
    let pts = image
        .vertices()
        .iter()
        .map(|v| affine_chart(v).map(|(x, y)| (y, x)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|_| Error::DegenerateImage("a vertex of T(H) is at infinity".into()))?;
    let r = |i: usize| &pts[(HEXAGON_READOUT_OFFSET + i) % 6];
    let (x0, y0) = r(0).clone();
    let (x4, y4) = r(4).clone();
    let sx = x4 - x0.clone();
    let sy = y4 - y0.clone();
    if sx.is_exact_zero() || sy.is_exact_zero() {
        return Err(Error::DegenerateImage("renormalisation is singular".into()));
    }
    let norm = |p: &(S, S)| {
        (
            (p.0.clone() - x0.clone()) / sx.clone(),
            (p.1.clone() - y0.clone()) / sy.clone(),
        )
    };
    let q: Vec<(S, S)> = (0..6).map(|i| norm(r(i))).collect();
    let a = q[1].0.clone();
    let b = q[3].1.clone();
    let expected = AxisAlignedHexagon::new(a.clone(), b.clone());
    let target = [
        (S::zero(), S::zero()),
        (a.clone(), S::zero()),
        (a.clone(), b.clone()),
        (S::one(), b.clone()),
        (S::one(), S::one()),
        (S::zero(), S::one()),
    ];
    let scale = 1.0 + a.to_f64().abs() + b.to_f64().abs();
    let fits = q.iter().zip(&target).all(|(p, t)| {
        (p.0.clone() - t.0.clone()).is_negligible(scale, 1e-9)
            && (p.1.clone() - t.1.clone()).is_negligible(scale, 1e-9)
    });
    if !fits {
        return Err(Error::DegenerateImage(
            "renormalised image is not of the form H(a, b)".into(),
        ));
    }
    Ok(expected)
}

/// Orientation of each side of a polygon: `Some('H')` for horizontal,
/// `Some('V')` for vertical, `None` otherwise.
pub fn side_orientations<S: Scalar>(p: &Polygon<S>) -> Vec<Option<char>> {
    (0..p.len() as isize)
        .map(|i| {
            let e = p.edge(i);
            let [a, b, _] = e.coords().clone();
            let scale = e.norm();
            if a.negligible(scale) {
                Some('H')
            } else if b.negligible(scale) {
                Some('V')
            } else {
                None
            }
        })
        .collect()
}

/// One record of an orbit experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitRecord {
    pub iter: usize,
    pub x5: f64,
    pub y5: f64,
    pub x6: f64,
    pub y6: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub quadric_residual: f64,
    pub d_residual: f64,
}

impl OrbitRecord {
    fn new<S: Scalar>(iter: usize, m: &HexagonModuli<S>) -> Self {
        let (a, b, c, d) = abcd(m);
        let (rq, rd) = axis_aligned_residual(m);
        OrbitRecord {
            iter,
            x5: m.x5.to_f64(),
            y5: m.y5.to_f64(),
            x6: m.x6.to_f64(),
            y6: m.y6.to_f64(),
            a: a.to_f64(),
            b: b.to_f64(),
            c: c.to_f64(),
            d: d.to_f64(),
            quadric_residual: rq.to_f64(),
            d_residual: rd.to_f64(),
        }
    }

    pub fn residual(&self) -> f64 {
        self.quadric_residual.max(self.d_residual)
    }

    /// The residuals divided by the size of the terms they cancel:
    /// `1 + A^2 + B^2 + C^2` for the quadric and `1 + |y5| + |y6|` for `D`.
    pub fn relative_residual(&self) -> f64 {
        let q = self.quadric_residual / (1.0 + self.a * self.a + self.b * self.b + self.c * self.c);
        let d = self.d_residual / (1.0 + self.y5.abs() + self.y6.abs());
        q.max(d)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrbitExperiment {
    pub records: Vec<OrbitRecord>,
    /// Why the orbit ended early, if it did.
    pub stopped: Option<String>,
}

impl OrbitExperiment {
    /// First iteration whose residual is below `threshold`.
    pub fn first_below(&self, threshold: f64) -> Option<usize> {
        self.records
            .iter()
            .find(|r| r.residual() < threshold)
            .map(|r| r.iter)
    }
}

/// Iterates [`hexagon_step`] and records the coordinates and residuals.
pub fn orbit_experiment<S: Scalar>(start: &HexagonModuli<S>, iters: usize) -> OrbitExperiment {
    let mut records = vec![OrbitRecord::new(0, start)];
    let mut current = start.clone();
    let mut stopped = None;
    for k in 1..=iters {
        match hexagon_step(&current) {
            Ok(next) if next.as_array().iter().all(|v| v.to_f64().is_finite()) => {
                records.push(OrbitRecord::new(k, &next));
                current = next;
            }
            Ok(_) => {
                stopped = Some("coordinates overflowed".into());
                break;
            }
            Err(e) => {
                stopped = Some(e.to_string());
                break;
            }
        }
    }
    OrbitExperiment { records, stopped }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloConfig {
    pub count: usize,
    pub iters: usize,
    pub seed: u64,
    /// Starts are drawn uniformly from `[-range, range]^4`.
    pub range: f64,
    pub threshold: f64,
}

impl Default for MonteCarloConfig {
    fn default() -> Self {
        MonteCarloConfig {
            count: 100,
            iters: 50,
            seed: 7,
            range: 3.0,
            threshold: 1e-6,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloRun {
    pub index: usize,
    pub start: [f64; 4],
    pub converged_at: Option<usize>,
    pub orbit: OrbitExperiment,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonteCarloReport {
    pub config: MonteCarloConfig,
    pub runs: Vec<MonteCarloRun>,
    pub converged: usize,
}

impl MonteCarloReport {
    pub fn success_fraction(&self) -> f64 {
        self.converged as f64 / self.runs.len().max(1) as f64
    }
}

/// Minimum `|det|` of consecutive vertex triples, relative to the vertex
/// norms, below which a random start is rejected.
const START_MARGIN: f64 = 1e-3;

fn random_start(rng: &mut ChaCha8Rng, range: f64) -> HexagonModuli<f64> {
    loop {
        let v: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-range..=range));
        let m = HexagonModuli::new(v[0], v[1], v[2], v[3]);
        let Ok(p) = hexagon_from_moduli(&m) else {
            continue;
        };
        let clear = (0..6).all(|i| {
            !crate::projective::collinear_with_tol(
                p.vertex(i),
                p.vertex(i + 1),
                p.vertex(i + 2),
                START_MARGIN,
            )
        });
        if clear {
            return m;
        }
    }
}

/// Orbits from random starts. Each start has its own RNG stream derived from
/// the master seed, so the result does not depend on thread scheduling.
pub fn monte_carlo(config: &MonteCarloConfig) -> MonteCarloReport {
    let runs: Vec<MonteCarloRun> = (0..config.count)
        .into_par_iter()
        .map(|index| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(index as u64);
            let start = random_start(&mut rng, config.range);
            let orbit = orbit_experiment(&start, config.iters);
            MonteCarloRun {
                index,
                start: start.as_array(),
                converged_at: orbit.first_below(config.threshold),
                orbit,
            }
        })
        .collect();
    let converged = runs.iter().filter(|r| r.converged_at.is_some()).count();
    MonteCarloReport {
        config: config.clone(),
        runs,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{q, Exact};

    fn hm(v: [(i64, i64); 4]) -> HexagonModuli<Exact> {
        HexagonModuli::new(
            q(v[0].0, v[0].1),
            q(v[1].0, v[1].1),
            q(v[2].0, v[2].1),
            q(v[3].0, v[3].1),
        )
    }

    #[test]
    fn abcd_examples() {
        let m = hm([(0, 1), (1, 2), (0, 1), (1, 2)]);
        assert_eq!(abcd(&m), (q(1, 1), q(0, 1), q(0, 1), q(0, 1)));
        assert_eq!(axis_aligned_residual(&m), (q(0, 1), q(0, 1)));
        let m = hm([(1, 1), (1, 1), (1, 1), (1, 1)]);
        assert_eq!(abcd(&m), (q(3, 1), q(1, 1), q(1, 1), q(0, 1)));
        assert_eq!(axis_aligned_residual(&m), (q(8, 1), q(0, 1)));
        let m = hm([(5, 1), (-2, 3), (7, 1), (-2, 3)]);
        assert_eq!(abcd(&m).3, q(0, 1));
    }

    #[test]
    fn moduli_round_trip() {
        let m = hm([(3, 2), (-1, 3), (2, 5), (7, 4)]);
        let p = hexagon_from_moduli(&m).unwrap();
        assert!(p.vertices()[0].same_class(&HomTriple::affine(q(0, 1), q(1, 1))));
        assert!(p.vertices()[3].same_class(&HomTriple::affine(q(0, 1), q(0, 1))));
        assert_eq!(moduli_from_hexagon(&p).unwrap(), m);
        let map = crate::ProjMap::new([
            [q(1, 1), q(2, 1), q(-1, 1)],
            [q(3, 1), q(1, 2), q(1, 1)],
            [q(1, 3), q(1, 1), q(4, 1)],
        ])
        .unwrap();
        let moved =
            Polygon::new(p.vertices().iter().map(|v| apply_map(&map, v)).collect()).unwrap();
        assert_eq!(moduli_from_hexagon(&moved).unwrap(), m);
    }

    #[test]
    fn collinear_start_is_rejected() {
        // (0,0), (x5,y5) = (1,0) and (-1,0) are collinear
        let m = hm([(1, 1), (0, 1), (3, 1), (5, 1)]);
        assert!(matches!(
            hexagon_from_moduli(&m),
            Err(Error::DegenerateInput(_))
        ));
    }

    #[test]
    fn axis_aligned_hexagons_lie_on_the_quadric() {
        for (a, b) in [(q(3, 1), q(3, 10)), (q(-2, 7), q(5, 3)), (q(4, 1), q(9, 2))] {
            let h = AxisAlignedHexagon::new(a, b);
            let p = h.polygon().unwrap();
            for offset in 0..6 {
                for reverse in [false, true] {
                    let mut lab = p.rotated(offset);
                    if reverse {
                        lab = lab.reversed();
                    }
                    let m = moduli_from_hexagon(&lab).unwrap();
                    assert_eq!(axis_aligned_residual(&m), (q(0, 1), q(0, 1)));
                }
            }
        }
    }

    #[test]
    fn evolute_swaps_side_orientations() {
        let p = AxisAlignedHexagon::new(q(3, 1), q(-2, 5))
            .polygon()
            .unwrap();
        let before = side_orientations(&p);
        let after = side_orientations(&evolute(&p).unwrap());
        assert!(before.iter().all(Option::is_some));
        let swap = |c: &Option<char>| c.map(|c| if c == 'H' { 'V' } else { 'H' });
        // side k of T(P) lies on the normal of side k+1 of P
        let expected: Vec<_> = (0..6).map(|k| swap(&before[(k + 1) % 6])).collect();
        assert_eq!(after, expected);
    }

    #[test]
    fn f_values() {
        let f = |n, d| f_map(&Extended::Finite(q(n, d)));
        assert_eq!(f(0, 1), Extended::Finite(q(1, 1)));
        assert_eq!(f(3, 1), Extended::Finite(q(5, 8)));
        assert_eq!(f(1, 1), Extended::Infinity);
        assert_eq!(f(-1, 1), Extended::Infinity);
        assert_eq!(
            f_map::<Exact>(&Extended::Infinity),
            Extended::Finite(q(0, 1))
        );
        assert_eq!(f_affine(&q(1, 1)), Err(Error::PoleAtInput));
        assert_eq!(f_affine(&q(3, 1)), Ok(q(5, 8)));
    }

    #[test]
    fn f_has_degree_two() {
        assert_eq!(circle_degree(100_000).abs(), 2);
    }

    #[test]
    fn renormalized_step_examples() {
        let h = AxisAlignedHexagon::new(q(3, 1), q(3, 1));
        assert_eq!(
            renormalized_step(&h).unwrap(),
            AxisAlignedHexagon::new(q(5, 8), q(5, 8))
        );
        let h = AxisAlignedHexagon::new(q(7, 3), q(-4, 5));
        let expected = AxisAlignedHexagon::new(f_affine(&h.a).unwrap(), f_affine(&h.b).unwrap());
        assert_eq!(renormalized_step(&h).unwrap(), expected);
        // H(0, b) repeats a vertex, so only the f route applies
        assert!(renormalized_step(&AxisAlignedHexagon::new(q(0, 1), q(3, 1))).is_err());
        assert_eq!(
            (f_affine(&q(0, 1)).unwrap(), f_affine(&q(3, 1)).unwrap()),
            (q(1, 1), q(5, 8))
        );
        assert_eq!(
            renormalized_step(&AxisAlignedHexagon::new(q(1, 1), q(3, 1))),
            Err(Error::PoleAtInput)
        );
    }

    #[test]
    fn orbit_on_quadric_stays_there() {
        let start = AxisAlignedHexagon::new(3.0, 0.3).moduli().unwrap();
        let orbit = orbit_experiment(&start, 50);
        assert!(orbit.records.iter().all(|r| r.residual() <= 1e-9));
        assert_eq!(orbit_experiment(&start, 0).records.len(), 1);
    }

    #[test]
    fn monte_carlo_is_deterministic() {
        let config = MonteCarloConfig {
            count: 8,
            iters: 20,
            ..Default::default()
        };
        let a = monte_carlo(&config);
        let b = monte_carlo(&config);
        assert_eq!(
            serde_json::to_string(&a.runs).unwrap(),
            serde_json::to_string(&b.runs).unwrap()
        );
        let sequential: Vec<[f64; 4]> = (0..8)
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(i);
                random_start(&mut rng, config.range).as_array()
            })
            .collect();
        assert_eq!(
            a.runs.iter().map(|r| r.start).collect::<Vec<_>>(),
            sequential
        );
    }
}
