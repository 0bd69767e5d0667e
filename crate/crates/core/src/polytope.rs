//! Convex polygons in moment-map coordinates.
//!
//! A [`Polytope`] stores its vertices as a counter-clockwise cycle. Only the
//! planar case is implemented; the type keeps the dimension explicit so that
//! higher-dimensional callers get [`PolytopeError::Unsupported`] instead of a
//! silently wrong answer.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Relative tolerance for collinearity and convexity tests, scaled by the
/// squared diameter of the vertex set.
const CROSS_REL_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolytopeError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("polygon is not convex at vertex {0}")]
    NonConvex(usize),
    #[error("unknown built-in polytope `{0}` (expected pentagon, trapezium or square)")]
    UnknownName(String),
    #[error("operation unsupported in dimension {0}")]
    Unsupported(usize),
    #[error("polytope file: {0}")]
    File(String),
}

/// A point in moment coordinates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Point(vec![x, y])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    /// Componentwise translation.
    pub fn translated(&self, t: &[f64]) -> Point {
        Point(self.0.iter().zip(t).map(|(a, b)| a + b).collect())
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A nondegenerate simplex with its signed volume `det(v1 - v0, ..., vd - v0) / d!`.
#[derive(Debug, Clone, PartialEq)]
pub struct Simplex {
    vertices: Vec<Point>,
    signed_volume: f64,
}

impl Simplex {
    /// Builds a planar simplex (triangle). Returns `None` for collinear input.
    pub fn triangle(a: Point, b: Point, c: Point) -> Option<Simplex> {
        if a.dim() != 2 || b.dim() != 2 || c.dim() != 2 {
            return None;
        }
        let vol = 0.5 * cross(&a, &b, &c);
        if vol == 0.0 || !vol.is_finite() {
            return None;
        }
        Some(Simplex {
            vertices: vec![a, b, c],
            signed_volume: vol,
        })
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn signed_volume(&self) -> f64 {
        self.signed_volume
    }

    pub fn volume(&self) -> f64 {
        self.signed_volume.abs()
    }

    pub fn dim(&self) -> usize {
        self.vertices.len() - 1
    }
}

/// A strictly convex polygon with counter-clockwise vertex order.
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope {
    vertices: Vec<Point>,
    dimension: usize,
}

/// z-component of (b - a) × (c - b).
fn cross(a: &Point, b: &Point, c: &Point) -> f64 {
    (b[0] - a[0]) * (c[1] - b[1]) - (b[1] - a[1]) * (c[0] - b[0])
}

fn shoelace(vertices: &[Point]) -> f64 {
    let n = vertices.len();
    let mut twice = 0.0;
    for i in 0..n {
        let p = &vertices[i];
        let q = &vertices[(i + 1) % n];
        twice += p[0] * q[1] - q[0] * p[1];
    }
    0.5 * twice
}

/// Checks a planar vertex cycle and returns it as a counter-clockwise polygon.
///
/// The input order is taken as the boundary cycle; clockwise cycles are
/// reversed, while orders that do not trace a convex boundary are rejected.
pub fn validate_polygon(raw_vertices: &[Point]) -> Result<Polytope, PolytopeError> {
    if raw_vertices.len() < 3 {
        return Err(PolytopeError::DegenerateInput(format!(
            "need at least 3 vertices, got {}",
            raw_vertices.len()
        )));
    }
    if let Some(p) = raw_vertices.iter().find(|p| p.dim() != 2) {
        return Err(PolytopeError::Unsupported(p.dim()));
    }
    if let Some(i) = raw_vertices.iter().position(|p| !p.is_finite()) {
        return Err(PolytopeError::DegenerateInput(format!(
            "vertex {i} has a non-finite coordinate"
        )));
    }
    for (i, p) in raw_vertices.iter().enumerate() {
        if raw_vertices[i + 1..].iter().any(|q| q == p) {
            return Err(PolytopeError::DegenerateInput(format!(
                "repeated vertex {p}"
            )));
        }
    }

    let n = raw_vertices.len();
    let mut diam2: f64 = 0.0;
    for (i, p) in raw_vertices.iter().enumerate() {
        for q in &raw_vertices[i + 1..] {
            diam2 = diam2.max((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2));
        }
    }
    let tol = CROSS_REL_TOL * diam2;

    let mut sign = 0.0;
    let mut turning = 0.0;
    for i in 0..n {
        let a = &raw_vertices[i];
        let b = &raw_vertices[(i + 1) % n];
        let c = &raw_vertices[(i + 2) % n];
        let z = cross(a, b, c);
        if z.abs() <= tol {
            return Err(PolytopeError::DegenerateInput(format!(
                "vertices {a}, {b}, {c} are collinear"
            )));
        }
        if sign == 0.0 {
            sign = z.signum();
        } else if z.signum() != sign {
            return Err(PolytopeError::NonConvex((i + 1) % n));
        }
        let e1 = (b[0] - a[0], b[1] - a[1]);
        let e2 = (c[0] - b[0], c[1] - b[1]);
        turning += (e1.0 * e2.1 - e1.1 * e2.0).atan2(e1.0 * e2.0 + e1.1 * e2.1);
    }
    // A convex cycle turns exactly once; star-shaped self-intersecting cycles
    // turn the same way at every vertex but wind more than once.
    if (turning.abs() - std::f64::consts::TAU).abs() > 1e-6 {
        return Err(PolytopeError::NonConvex(0));
    }

    let mut vertices = raw_vertices.to_vec();
    if sign < 0.0 {
        vertices.reverse();
    }
    let area = shoelace(&vertices);
    if !(area > 0.0) {
        return Err(PolytopeError::DegenerateInput("zero area".into()));
    }
    Ok(Polytope {
        vertices,
        dimension: 2,
    })
}

impl Polytope {
    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Enclosed area.
    pub fn area(&self) -> f64 {
        shoelace(&self.vertices)
    }

    /// Area-weighted centroid.
    pub fn centroid(&self) -> Point {
        let n = self.vertices.len();
        let (mut cx, mut cy) = (0.0, 0.0);
        for i in 0..n {
            let p = &self.vertices[i];
            let q = &self.vertices[(i + 1) % n];
            let w = p[0] * q[1] - q[0] * p[1];
            cx += (p[0] + q[0]) * w;
            cy += (p[1] + q[1]) * w;
        }
        let a6 = 6.0 * self.area();
        Point::xy(cx / a6, cy / a6)
    }

    /// Fan triangulation from vertex 0.
    pub fn triangulate(&self) -> Vec<Simplex> {
        let v = &self.vertices;
        (1..v.len() - 1)
            .map(|i| {
                Simplex::triangle(v[0].clone(), v[i].clone(), v[i + 1].clone())
                    .expect("strictly convex polygon has nondegenerate fan triangles")
            })
            .collect()
    }

    /// Strict interior test.
    pub fn contains_interior(&self, p: &Point) -> bool {
        let n = self.vertices.len();
        (0..n).all(|i| {
            let a = &self.vertices[i];
            let b = &self.vertices[(i + 1) % n];
            (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) > 0.0
        })
    }

    pub fn translated(&self, t: &[f64]) -> Polytope {
        Polytope {
            vertices: self.vertices.iter().map(|p| p.translated(t)).collect(),
            dimension: self.dimension,
        }
    }

    pub fn scaled(&self, factor: f64) -> Result<Polytope, PolytopeError> {
        let pts: Vec<Point> = self
            .vertices
            .iter()
            .map(|p| Point(p.0.iter().map(|c| c * factor).collect()))
            .collect();
        validate_polygon(&pts)
    }

    /// True when the vertex set is invariant under exchanging the two coordinates.
    pub fn is_swap_symmetric(&self, tol: f64) -> bool {
        self.vertices.iter().all(|p| {
            self.vertices
                .iter()
                .any(|q| (p[0] - q[1]).abs() <= tol && (p[1] - q[0]).abs() <= tol)
        })
    }

    /// Parses `{"vertices": [[x, y], ...]}`.
    pub fn from_json_str(text: &str) -> Result<Polytope, PolytopeError> {
        let file: PolytopeFile =
            serde_json::from_str(text).map_err(|e| PolytopeError::File(e.to_string()))?;
        let mut points = Vec::with_capacity(file.vertices.len());
        for (i, v) in file.vertices.into_iter().enumerate() {
            if v.len() != 2 {
                return Err(PolytopeError::File(format!(
                    "field `vertices[{i}]` must be an [x, y] pair, got {} numbers",
                    v.len()
                )));
            }
            points.push(Point(v));
        }
        validate_polygon(&points)
    }

    pub fn from_json_file(path: &Path) -> Result<Polytope, PolytopeError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PolytopeError::File(format!("{}: {e}", path.display())))?;
        Self::from_json_str(&text)
    }

    pub fn to_json_string(&self) -> String {
        let file = PolytopeFile {
            vertices: self.vertices.iter().map(|p| p.0.clone()).collect(),
        };
        serde_json::to_string(&file).expect("vertex lists always serialize")
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PolytopeFile {
    vertices: Vec<Vec<f64>>,
}

fn from_pairs(pairs: &[(f64, f64)]) -> Polytope {
    let pts: Vec<Point> = pairs.iter().map(|&(x, y)| Point::xy(x, y)).collect();
    validate_polygon(&pts).expect("built-in polygons are valid")
}

/// Moment pentagon of CP² blown up at two points.
pub fn pentagon() -> Polytope {
    from_pairs(&[
        (-1.0, -1.0),
        (1.0, -1.0),
        (1.0, 0.0),
        (0.0, 1.0),
        (-1.0, 1.0),
    ])
}

/// Moment trapezium of CP² blown up at one point.
pub fn trapezium() -> Polytope {
    from_pairs(&[(2.0, -1.0), (-1.0, 2.0), (-1.0, 0.0), (0.0, -1.0)])
}

/// The square [-1, 1]².
pub fn square() -> Polytope {
    from_pairs(&[(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)])
}

pub fn builtin(name: &str) -> Result<Polytope, PolytopeError> {
    match name {
        "pentagon" => Ok(pentagon()),
        "trapezium" => Ok(trapezium()),
        "square" => Ok(square()),
        other => Err(PolytopeError::UnknownName(other.to_string())),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(pairs: &[(f64, f64)]) -> Vec<Point> {
        pairs.iter().map(|&(x, y)| Point::xy(x, y)).collect()
    }

    fn unit_triangle() -> Polytope {
        validate_polygon(&pts(&[(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])).unwrap()
    }

    #[test]
    fn pentagon_is_valid_and_has_area_three_and_a_half() {
        let p = validate_polygon(&pts(&[
            (-1.0, -1.0),
            (1.0, -1.0),
            (1.0, 0.0),
            (0.0, 1.0),
            (-1.0, 1.0),
        ]))
        .unwrap();
        assert_eq!(p.vertices().len(), 5);
        assert_eq!(p.area(), 3.5);
    }

    #[test]
    fn areas_of_builtins() {
        assert_eq!(trapezium().area(), 4.0);
        assert_eq!(square().area(), 4.0);
        assert_eq!(unit_triangle().area(), 0.5);
    }

    #[test]
    fn self_intersecting_order_is_non_convex() {
        let err =
            validate_polygon(&pts(&[(0.0, 0.0), (2.0, 0.0), (1.0, 1.0), (1.0, -1.0)])).unwrap_err();
        assert!(matches!(err, PolytopeError::NonConvex(_)), "{err:?}");
    }

    #[test]
    fn reflex_vertex_is_non_convex() {
        let err = validate_polygon(&pts(&[
            (0.0, 0.0),
            (2.0, 0.0),
            (1.0, 0.5),
            (2.0, 2.0),
            (0.0, 2.0),
        ]))
        .unwrap_err();
        assert!(matches!(err, PolytopeError::NonConvex(_)));
    }

    #[test]
    fn pentagram_is_rejected() {
        let star: Vec<Point> = (0..5)
            .map(|k| {
                let t = std::f64::consts::TAU * (2 * k) as f64 / 5.0;
                Point::xy(t.cos(), t.sin())
            })
            .collect();
        assert!(matches!(
            validate_polygon(&star),
            Err(PolytopeError::NonConvex(_))
        ));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(matches!(
            validate_polygon(&pts(&[(0.0, 0.0), (1.0, 0.0)])),
            Err(PolytopeError::DegenerateInput(_))
        ));
        assert!(matches!(
            validate_polygon(&pts(&[(0.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 1.0)])),
            Err(PolytopeError::DegenerateInput(_))
        ));
        assert!(matches!(
            validate_polygon(&pts(&[(0.0, 0.0), (1.0, 1.0), (2.0, 2.0)])),
            Err(PolytopeError::DegenerateInput(_))
        ));
        assert!(matches!(
            validate_polygon(&pts(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (1.0, 1.0)])),
            Err(PolytopeError::DegenerateInput(_))
        ));
        assert!(matches!(
            validate_polygon(&vec![Point::new(vec![0.0, 0.0, 0.0]); 4]),
            Err(PolytopeError::Unsupported(3))
        ));
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let p = validate_polygon(&pts(&[(0.0, 0.0), (0.0, 1.0), (1.0, 0.0)])).unwrap();
        assert_eq!(p.area(), 0.5);
    }

    #[test]
    fn trapezium_in_listed_order_is_counter_clockwise() {
        let t = trapezium();
        assert_eq!(t.vertices()[0], Point::xy(2.0, -1.0));
        assert_eq!(t.vertices()[1], Point::xy(-1.0, 2.0));
    }

    #[test]
    fn centroids() {
        let c = square().centroid();
        assert_eq!((c[0], c[1]), (0.0, 0.0));
        let c = pentagon().centroid();
        assert!((c[0] + 2.0 / 21.0).abs() < 1e-15);
        assert!((c[1] + 2.0 / 21.0).abs() < 1e-15);
        let c = unit_triangle().centroid();
        assert!((c[0] - 1.0 / 3.0).abs() < 1e-15 && (c[1] - 1.0 / 3.0).abs() < 1e-15);
        assert!(pentagon().contains_interior(&pentagon().centroid()));
    }

    #[test]
    fn pentagon_centroid_matches_monte_carlo() {
        use rand::{Rng, SeedableRng};
        let p = pentagon();
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let (mut sum, mut hits) = (0.0, 0usize);
        for _ in 0..200_000 {
            let q = Point::xy(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            if p.contains_interior(&q) {
                sum += q[0];
                hits += 1;
            }
        }
        assert!((sum / hits as f64 + 2.0 / 21.0).abs() < 5e-3);
    }

    #[test]
    fn triangulations() {
        let tris = pentagon().triangulate();
        assert_eq!(tris.len(), 3);
        assert!(tris.iter().all(|s| s.signed_volume() > 0.0));
        let total: f64 = tris.iter().map(Simplex::signed_volume).sum();
        assert!((total - 3.5).abs() <= 1e-14 * 3.5);
        assert_eq!(trapezium().triangulate().len(), 2);
        let t = unit_triangle();
        let tris = t.triangulate();
        assert_eq!(tris.len(), 1);
        assert_eq!(tris[0].vertices(), t.vertices());
    }

    #[test]
    fn builtin_lookup() {
        assert_eq!(builtin("pentagon").unwrap(), pentagon());
        assert_eq!(builtin("trapezium").unwrap().vertices().len(), 4);
        assert_eq!(builtin("square").unwrap().area(), 4.0);
        assert!(matches!(
            builtin("hexagon"),
            Err(PolytopeError::UnknownName(_))
        ));
    }

    #[test]
    fn symmetry_detection() {
        assert!(pentagon().is_swap_symmetric(1e-12));
        assert!(trapezium().is_swap_symmetric(1e-12));
        let skew = validate_polygon(&pts(&[(0.0, 0.0), (2.0, 0.0), (0.0, 1.0)])).unwrap();
        assert!(!skew.is_swap_symmetric(1e-12));
    }

    #[test]
    fn json_loading() {
        let p = Polytope::from_json_str(r#"{"vertices": [[-1,1],[-1,-1],[1,-1],[1,0],[0,1]]}"#)
            .unwrap();
        assert_eq!(p.area(), 3.5);
        let back = Polytope::from_json_str(&p.to_json_string()).unwrap();
        assert_eq!(back, p);
        let err = Polytope::from_json_str(r#"{"vertices": [[0,0],[1,0,3],[0,1]]}"#).unwrap_err();
        assert!(err.to_string().contains("vertices[1]"), "{err}");
        let err = Polytope::from_json_str(r#"{"verts": []}"#).unwrap_err();
        assert!(err.to_string().contains("verts"), "{err}");
    }
}
