use super::{FaceRef, PolyMesh};

/// Shape- and contact-regularity indicators of a mesh.
#[derive(Debug, Clone, PartialEq)]
pub struct MeshQualityReport {
    pub min_area_ratio: f64,
    pub max_area_ratio: f64,
    /// Smallest face length relative to the diameter of an adjacent element.
    pub min_face_ratio: f64,
    pub min_area: f64,
    pub h: f64,
    pub element_count: usize,
    pub face_count: usize,
}

/// Ratios `|K| / h_K²` and `|F| / h_K` over all elements and faces.
pub fn quality_report(mesh: &PolyMesh) -> MeshQualityReport {
    let mut min_r = f64::INFINITY;
    let mut max_r: f64 = 0.0;
    let mut min_f = f64::INFINITY;
    let mut min_area = f64::INFINITY;
    for e in &mesh.elements {
        let r = e.area / (e.diameter * e.diameter);
        min_r = min_r.min(r);
        max_r = max_r.max(r);
        min_area = min_area.min(e.area);
        for f in &e.faces {
            let len = match *f {
                FaceRef::Interior(i, _) => mesh.interior_faces[i].length,
                FaceRef::Boundary(i) => mesh.boundary_faces[i].length,
            };
            min_f = min_f.min(len / e.diameter);
        }
    }
    MeshQualityReport {
        min_area_ratio: min_r,
        max_area_ratio: max_r,
        min_face_ratio: min_f,
        min_area,
        h: mesh.h(),
        element_count: mesh.n_elements(),
        face_count: mesh.n_faces(),
    }
}
