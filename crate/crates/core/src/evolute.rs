//! Projective normals and the evolute map `T` on k-gons.
//!
//! For an edge `V2 V3` with neighbours `V1`, `V4` the projective normal is
//! the line through `(V1V3 ∩ V2V4)` and `(V1V2 ∩ V3V4)`.
//!
//! Index alignment: `n_i` is the normal of edge `V_i V_{i+1}` (built from
//! `V_{i-1} .. V_{i+2}`) and vertex `i` of `T(P)` is `n_i ∩ n_{i+1}`, so it sits
//! next to `V_{i+1}`. With this labelling, normalising a pentagon image
//! starting from vertex [`PENTAGON_READOUT_OFFSET`] reproduces the closed form
//! in [`crate::pentagon::t_map`].

use serde_json::Value;

use crate::projective::{collinear, cross, HomTriple, Kind};
use crate::scalar::{parse_exact, Exact, Scalar};
use crate::Error;

/// First vertex of `T(P)` used when renormalising a pentagon image.
pub const PENTAGON_READOUT_OFFSET: usize = 2;

/// A closed polygon, vertices in cyclic order.
#[derive(Debug, Clone)]
pub struct Polygon<S> {
    vertices: Vec<HomTriple<S>>,
    degenerate: bool,
}

impl<S: Scalar> Polygon<S> {
    /// Needs at least five vertices, consecutive ones distinct. Three
    /// consecutive collinear vertices only set the degeneracy flag.
    pub fn new(vertices: Vec<HomTriple<S>>) -> Result<Self, Error> {
        let k = vertices.len();
        if k < 5 {
            return Err(Error::InvalidPolygon(format!(
                "need at least 5 vertices, got {k}"
            )));
        }
        let vertices: Vec<_> = vertices
            .into_iter()
            .map(|v| v.with_kind(Kind::Point))
            .collect();
        for i in 0..k {
            if vertices[i].same_class(&vertices[(i + 1) % k]) {
                return Err(Error::InvalidPolygon(format!(
                    "vertices {i} and {} coincide",
                    (i + 1) % k
                )));
            }
        }
        let degenerate =
            (0..k).any(|i| collinear(&vertices[i], &vertices[(i + 1) % k], &vertices[(i + 2) % k]));
        Ok(Polygon {
            vertices,
            degenerate,
        })
    }

    pub fn from_affine(points: &[(S, S)]) -> Result<Self, Error> {
        Self::new(
            points
                .iter()
                .map(|(x, y)| HomTriple::affine(x.clone(), y.clone()))
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[HomTriple<S>] {
        &self.vertices
    }

    /// Vertex with a cyclic index.
    pub fn vertex(&self, i: isize) -> &HomTriple<S> {
        let k = self.vertices.len() as isize;
        &self.vertices[i.rem_euclid(k) as usize]
    }

    /// Three consecutive vertices are collinear somewhere.
    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    /// Edge line `e_i = V_i x V_{i+1}`.
    pub fn edge(&self, i: isize) -> HomTriple<S> {
        cross(self.vertex(i), self.vertex(i + 1)).expect("consecutive vertices are distinct")
    }

    /// Same polygon relabelled to start at vertex `offset`.
    pub fn rotated(&self, offset: usize) -> Self {
        let k = self.vertices.len();
        let vertices = (0..k)
            .map(|i| self.vertices[(i + offset) % k].clone())
            .collect();
        Polygon {
            vertices,
            degenerate: self.degenerate,
        }
    }

    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        vertices.reverse();
        Polygon {
            vertices,
            degenerate: self.degenerate,
        }
    }

    pub fn to_f64(&self) -> Polygon<f64> {
        Polygon {
            vertices: self.vertices.iter().map(HomTriple::to_f64).collect(),
            degenerate: self.degenerate,
        }
    }

    /// Affine coordinates of every vertex, `None` for points at infinity.
    pub fn affine_points(&self) -> Vec<Option<(f64, f64)>> {
        self.vertices
            .iter()
            .map(|v| crate::projective::affine_chart(&v.to_f64()).ok())
            .collect()
    }
}

/// The projective normal of edge `V2 V3`.
pub fn projective_normal<S: Scalar>(
    v1: &HomTriple<S>,
    v2: &HomTriple<S>,
    v3: &HomTriple<S>,
    v4: &HomTriple<S>,
) -> Result<HomTriple<S>, Error> {
    let diag = cross(&cross(v1, v3)?, &cross(v2, v4)?)?;
    let sides = cross(&cross(v1, v2)?, &cross(v3, v4)?)?;
    cross(&diag, &sides)
}

/// Normal `n_i` of edge `V_i V_{i+1}`.
pub fn normal_of_edge<S: Scalar>(p: &Polygon<S>, i: isize) -> Result<HomTriple<S>, Error> {
    projective_normal(
        p.vertex(i - 1),
        p.vertex(i),
        p.vertex(i + 1),
        p.vertex(i + 2),
    )
}

/// The evolute polygon `T(P)`.
pub fn evolute<S: Scalar>(p: &Polygon<S>) -> Result<Polygon<S>, Error> {
    if p.is_degenerate() {
        return Err(Error::DegenerateInput(
            "three consecutive vertices are collinear".into(),
        ));
    }
    let k = p.len() as isize;
    let normals = (0..k)
        .map(|i| {
            normal_of_edge(p, i)
                .map_err(|_| Error::DegenerateImage(format!("normal of edge {i} is undefined")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let vertices = (0..k as usize)
        .map(|i| {
            cross(&normals[i], &normals[(i + 1) % k as usize])
                .map(|v| v.with_kind(Kind::Point))
                .map_err(|_| Error::DegenerateImage(format!("normals {i} and {} coincide", i + 1)))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Polygon::new(vertices).map_err(|e| Error::DegenerateImage(e.to_string()))
}

/// `P, T(P), ..., T^n(P)`, truncated at the first failure.
#[derive(Debug, Clone)]
pub struct EvoluteOrbit<S> {
    pub polygons: Vec<Polygon<S>>,
    pub stopped: Option<Error>,
}

pub fn iterate_evolute<S: Scalar>(p: &Polygon<S>, n: usize) -> EvoluteOrbit<S> {
    let mut polygons = vec![p.clone()];
    let mut stopped = None;
    for _ in 0..n {
        match evolute(polygons.last().expect("nonempty")) {
            Ok(next) => polygons.push(next),
            Err(e) => {
                stopped = Some(e);
                break;
            }
        }
    }
    EvoluteOrbit { polygons, stopped }
}

/// Polygon read from `{"vertices": [[a,b,c], ...]}`.
#[derive(Debug, Clone)]
pub enum PolygonInput {
    Exact(Polygon<Exact>),
    Approx(Polygon<f64>),
}

/// Parses polygon JSON. Entries are either all strings holding exact
/// rationals (`"p/q"`) or all JSON numbers.
pub fn parse_polygon_json(text: &str) -> Result<PolygonInput, Error> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    let rows = value
        .get("vertices")
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Parse("missing \"vertices\" array".into()))?;
    let mut entries = Vec::with_capacity(rows.len());
    for row in rows {
        let row = row
            .as_array()
            .filter(|r| r.len() == 3)
            .ok_or_else(|| Error::Parse("each vertex must be a 3-element array".into()))?;
        entries.push(row.clone());
    }
    let all_strings = entries.iter().flatten().all(Value::is_string);
    let all_numbers = entries.iter().flatten().all(Value::is_number);
    if all_strings {
        let vertices = entries
            .iter()
            .map(|r| {
                let c = r
                    .iter()
                    .map(|v| parse_exact(v.as_str().expect("checked")))
                    .collect::<Result<Vec<_>, _>>()?;
                HomTriple::point(c[0].clone(), c[1].clone(), c[2].clone())
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolygonInput::Exact(Polygon::new(vertices)?))
    } else if all_numbers {
        let vertices = entries
            .iter()
            .map(|r| {
                let c: Vec<f64> = r.iter().map(|v| v.as_f64().expect("checked")).collect();
                HomTriple::point(c[0], c[1], c[2])
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(PolygonInput::Approx(Polygon::new(vertices)?))
    } else {
        Err(Error::Parse(
            "vertex entries must be all rational strings or all numbers".into(),
        ))
    }
}

/// Serialises a polygon in the same JSON layout.
pub fn polygon_to_json<S: Scalar>(p: &Polygon<S>) -> Value {
    let rows: Vec<Value> = p
        .vertices()
        .iter()
        .map(|v| {
            let c = S::reduce_triple(v.coords().clone());
            Value::Array(
                c.iter()
                    .map(|x| {
                        if S::EXACT {
                            Value::String(x.render())
                        } else {
                            serde_json::json!(x.to_f64())
                        }
                    })
                    .collect(),
            )
        })
        .collect();
    serde_json::json!({ "vertices": rows })
}
