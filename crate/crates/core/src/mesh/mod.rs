//! Polygonal meshes: storage, validation, generators and the text format.

mod io;
mod quality;
mod voronoi;

pub use io::{load_mesh, parse_mesh, save_mesh, write_mesh};
pub use quality::{quality_report, MeshQualityReport};
pub use voronoi::{cvt_energy, generate_voronoi, voronoi_from_generators, Rect};

use std::collections::HashMap;

use crate::error::MeshError;
use crate::geometry::{self, Point};

/// Tag of a boundary face that was not assigned one.
pub const UNTAGGED: u32 = 0;

#[derive(Debug, Clone)]
pub struct Element {
    /// Counter-clockwise vertex loop.
    pub vertices: Vec<usize>,
    pub area: f64,
    pub diameter: f64,
    pub centroid: Point,
    pub bbox_min: Point,
    pub bbox_max: Point,
    /// Sub-triangulation covering the element, counter-clockwise triangles.
    pub triangles: Vec<[Point; 3]>,
    /// Face attached to each local edge `vertices[i] -> vertices[i+1]`.
    pub faces: Vec<FaceRef>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FaceRef {
    /// Interior face index and the side (0 for κ⁺, 1 for κ⁻) this element is on.
    Interior(usize, usize),
    Boundary(usize),
}

#[derive(Debug, Clone)]
pub struct InteriorFace {
    /// `[κ⁺, κ⁻]`; κ⁺ traverses the edge counter-clockwise from `a` to `b`.
    pub elements: [usize; 2],
    pub local_edges: [usize; 2],
    pub a: Point,
    pub b: Point,
    /// Unit normal pointing from κ⁺ to κ⁻; κ⁻ uses its negative.
    pub normal: Point,
    pub length: f64,
}

#[derive(Debug, Clone)]
pub struct BoundaryFace {
    pub element: usize,
    pub local_edge: usize,
    pub a: Point,
    pub b: Point,
    pub normal: Point,
    pub length: f64,
    pub tag: u32,
}

/// Optional structured-grid layout for meshes built by [`PolyMesh::cartesian`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridShape {
    pub nx: usize,
    pub ny: usize,
}

#[derive(Debug, Clone)]
pub struct PolyMesh {
    pub vertices: Vec<Point>,
    pub elements: Vec<Element>,
    pub interior_faces: Vec<InteriorFace>,
    pub boundary_faces: Vec<BoundaryFace>,
    pub grid: Option<GridShape>,
}

impl PolyMesh {
    /// Build and validate a mesh from vertex coordinates, counter-clockwise
    /// element loops and `(element, local_edge, tag)` boundary tags.
    pub fn new(
        vertices: Vec<Point>,
        loops: Vec<Vec<usize>>,
        tags: &[(usize, usize, u32)],
    ) -> Result<Self, MeshError> {
        let mut elements = Vec::with_capacity(loops.len());
        for (k, lp) in loops.into_iter().enumerate() {
            elements.push(build_element(k, lp, &vertices)?);
        }

        // match edges by their (sorted) vertex pair
        let mut edges: HashMap<(usize, usize), Vec<(usize, usize)>> = HashMap::new();
        for (k, el) in elements.iter().enumerate() {
            let n = el.vertices.len();
            for i in 0..n {
                let (p, q) = (el.vertices[i], el.vertices[(i + 1) % n]);
                edges.entry((p.min(q), p.max(q))).or_default().push((k, i));
            }
        }
        let mut keys: Vec<_> = edges.keys().copied().collect();
        keys.sort_unstable();

        let mut interior_faces = Vec::new();
        let mut boundary_faces = Vec::new();
        for key in keys {
            let owners = &edges[&key];
            match owners.as_slice() {
                [(k, i)] => {
                    let (a, b) = edge_points(&elements[*k], *i, &vertices);
                    let (normal, length) = outward_normal(a, b);
                    boundary_faces.push(BoundaryFace {
                        element: *k,
                        local_edge: *i,
                        a,
                        b,
                        normal,
                        length,
                        tag: UNTAGGED,
                    });
                }
                [(k0, i0), (k1, i1)] => {
                    if k0 == k1 {
                        return Err(MeshError::Topology(format!(
                            "element {k0} uses edge {}-{} twice",
                            key.0, key.1
                        )));
                    }
                    let (a, b) = edge_points(&elements[*k0], *i0, &vertices);
                    let (a1, _) = edge_points(&elements[*k1], *i1, &vertices);
                    if a1 == a {
                        return Err(MeshError::Topology(format!(
                            "elements {k0} and {k1} traverse edge {}-{} in the same direction",
                            key.0, key.1
                        )));
                    }
                    let (normal, length) = outward_normal(a, b);
                    interior_faces.push(InteriorFace {
                        elements: [*k0, *k1],
                        local_edges: [*i0, *i1],
                        a,
                        b,
                        normal,
                        length,
                    });
                }
                _ => {
                    return Err(MeshError::Topology(format!(
                        "edge {}-{} borders {} elements",
                        key.0,
                        key.1,
                        owners.len()
                    )))
                }
            }
        }

        for (f, face) in interior_faces.iter().enumerate() {
            for s in 0..2 {
                elements[face.elements[s]].faces[face.local_edges[s]] = FaceRef::Interior(f, s);
            }
        }
        for (f, face) in boundary_faces.iter().enumerate() {
            elements[face.element].faces[face.local_edge] = FaceRef::Boundary(f);
        }

        let mut tagged = vec![false; boundary_faces.len()];
        for &(k, i, tag) in tags {
            let el = elements.get(k).ok_or_else(|| {
                MeshError::Topology(format!("boundary tag refers to missing element {k}"))
            })?;
            match el.faces.get(i) {
                Some(FaceRef::Boundary(f)) => {
                    if tagged[*f] {
                        return Err(MeshError::Topology(format!(
                            "edge {i} of element {k} tagged twice"
                        )));
                    }
                    tagged[*f] = true;
                    boundary_faces[*f].tag = tag;
                }
                Some(FaceRef::Interior(..)) => {
                    return Err(MeshError::Topology(format!(
                        "boundary tag on interior edge {i} of element {k}"
                    )))
                }
                None => {
                    return Err(MeshError::Topology(format!(
                        "element {k} has no local edge {i}"
                    )))
                }
            }
        }

        Ok(PolyMesh { vertices, elements, interior_faces, boundary_faces, grid: None })
    }

    /// Structured `nx × ny` grid of rectangles. Element `(i, j)` has id
    /// `j * nx + i`; boundary tags are 1 bottom, 2 right, 3 top, 4 left.
    pub fn cartesian(rect: Rect, nx: usize, ny: usize) -> Result<Self, MeshError> {
        if nx == 0 || ny == 0 {
            return Err(MeshError::Input("grid needs at least one cell per direction".into()));
        }
        rect.validate()?;
        let dx = (rect.x1 - rect.x0) / nx as f64;
        let dy = (rect.y1 - rect.y0) / ny as f64;
        let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                let x = if i == nx { rect.x1 } else { rect.x0 + i as f64 * dx };
                let y = if j == ny { rect.y1 } else { rect.y0 + j as f64 * dy };
                vertices.push([x, y]);
            }
        }
        let vid = |i: usize, j: usize| j * (nx + 1) + i;
        let mut loops = Vec::with_capacity(nx * ny);
        let mut tags = Vec::new();
        for j in 0..ny {
            for i in 0..nx {
                let k = j * nx + i;
                loops.push(vec![vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)]);
                if j == 0 {
                    tags.push((k, 0, 1));
                }
                if i == nx - 1 {
                    tags.push((k, 1, 2));
                }
                if j == ny - 1 {
                    tags.push((k, 2, 3));
                }
                if i == 0 {
                    tags.push((k, 3, 4));
                }
            }
        }
        let mut mesh = PolyMesh::new(vertices, loops, &tags)?;
        mesh.grid = Some(GridShape { nx, ny });
        Ok(mesh)
    }

    pub fn n_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn n_faces(&self) -> usize {
        self.interior_faces.len() + self.boundary_faces.len()
    }

    /// Mesh size `h = max_κ h_κ`.
    pub fn h(&self) -> f64 {
        self.elements.iter().map(|e| e.diameter).fold(0.0, f64::max)
    }

    pub fn total_area(&self) -> f64 {
        self.elements.iter().map(|e| e.area).sum()
    }

    pub fn polygon(&self, k: usize) -> Vec<Point> {
        self.elements[k].vertices.iter().map(|&v| self.vertices[v]).collect()
    }

    /// Element containing `p` (boundary points resolve to the first match).
    pub fn locate(&self, p: Point) -> Option<usize> {
        let tol = 1e-12 * self.h().max(1.0);
        (0..self.elements.len()).find(|&k| {
            let e = &self.elements[k];
            p[0] >= e.bbox_min[0] - tol
                && p[0] <= e.bbox_max[0] + tol
                && p[1] >= e.bbox_min[1] - tol
                && p[1] <= e.bbox_max[1] + tol
                && geometry::contains(&self.polygon(k), p, tol)
        })
    }

    /// Axis-aligned bounding box of all vertices.
    pub fn bounding_box(&self) -> Rect {
        let mut r = Rect { x0: f64::INFINITY, y0: f64::INFINITY, x1: -f64::INFINITY, y1: -f64::INFINITY };
        for v in &self.vertices {
            r.x0 = r.x0.min(v[0]);
            r.y0 = r.y0.min(v[1]);
            r.x1 = r.x1.max(v[0]);
            r.y1 = r.y1.max(v[1]);
        }
        r
    }
}

fn edge_points(el: &Element, i: usize, vertices: &[Point]) -> (Point, Point) {
    let n = el.vertices.len();
    (vertices[el.vertices[i]], vertices[el.vertices[(i + 1) % n]])
}

/// Right-hand normal of the directed edge `a -> b`, which points out of a
/// counter-clockwise polygon.
fn outward_normal(a: Point, b: Point) -> (Point, f64) {
    let d = geometry::sub(b, a);
    let len = geometry::norm(d);
    ([d[1] / len, -d[0] / len], len)
}

fn build_element(k: usize, lp: Vec<usize>, vertices: &[Point]) -> Result<Element, MeshError> {
    let bad = |msg: String| MeshError::Element { element: k, msg };
    if lp.len() < 3 {
        return Err(bad(format!("{} vertices", lp.len())));
    }
    if let Some(&v) = lp.iter().find(|&&v| v >= vertices.len()) {
        return Err(bad(format!("vertex index {v} out of range")));
    }
    let poly: Vec<Point> = lp.iter().map(|&v| vertices[v]).collect();
    let area = geometry::signed_area(&poly);
    if !(area > 0.0) {
        return Err(bad(format!("signed area {area:e} is not positive")));
    }
    if !geometry::is_simple(&poly) {
        return Err(bad("polygon is self-intersecting".into()));
    }
    let centroid = geometry::centroid(&poly);
    let diameter = geometry::diameter(&poly);
    let mut bbox_min = poly[0];
    let mut bbox_max = poly[0];
    for p in &poly {
        bbox_min = [bbox_min[0].min(p[0]), bbox_min[1].min(p[1])];
        bbox_max = [bbox_max[0].max(p[0]), bbox_max[1].max(p[1])];
    }
    let triangles = sub_triangulate(&poly, centroid, area)
        .ok_or_else(|| bad("sub-triangulation does not cover the element".into()))?;
    let n = lp.len();
    Ok(Element {
        vertices: lp,
        area,
        diameter,
        centroid,
        bbox_min,
        bbox_max,
        triangles,
        faces: vec![FaceRef::Boundary(usize::MAX); n],
    })
}

/// Fan from the centroid when every fan triangle is positively oriented
/// (star-shaped w.r.t. the centroid), otherwise ear clipping.
fn sub_triangulate(poly: &[Point], c: Point, area: f64) -> Option<Vec<[Point; 3]>> {
    let n = poly.len();
    let tol = 1e-14 * area;
    let fan: Vec<[Point; 3]> = (0..n).map(|i| [c, poly[i], poly[(i + 1) % n]]).collect();
    let tris = if fan.iter().all(|t| geometry::signed_area(t) > tol) {
        fan
    } else {
        geometry::ear_clip(poly)
            .into_iter()
            .map(|t| [poly[t[0]], poly[t[1]], poly[t[2]]])
            .collect()
    };
    let sum: f64 = tris.iter().map(|t| geometry::signed_area(t)).sum();
    ((sum - area).abs() <= 1e-12 * area).then_some(tris)
}
