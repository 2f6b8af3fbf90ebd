use std::collections::BTreeMap;

use crate::error::AssemblyError;
use crate::mesh::PolyMesh;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldBc {
    Dirichlet,
    /// Natural condition with zero flux/traction.
    Neumann,
}

/// Conditions for both unknowns on one boundary tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TagCondition {
    pub displacement: FieldBc,
    pub pressure: FieldBc,
}

impl TagCondition {
    pub const DIRICHLET: TagCondition =
        TagCondition { displacement: FieldBc::Dirichlet, pressure: FieldBc::Dirichlet };
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BoundaryConditions {
    pub tags: BTreeMap<u32, TagCondition>,
    /// Condition for tags without an explicit entry.
    pub default: Option<TagCondition>,
}

/// Per boundary face: whether each unknown is Dirichlet there.
#[derive(Debug, Clone, PartialEq)]
pub struct FaceMask {
    pub u_dirichlet: Vec<bool>,
    pub p_dirichlet: Vec<bool>,
}

impl BoundaryConditions {
    pub fn all_dirichlet() -> Self {
        BoundaryConditions { tags: BTreeMap::new(), default: Some(TagCondition::DIRICHLET) }
    }

    pub fn uniform(c: TagCondition) -> Self {
        BoundaryConditions { tags: BTreeMap::new(), default: Some(c) }
    }

    pub fn with_tag(mut self, tag: u32, c: TagCondition) -> Self {
        self.tags.insert(tag, c);
        self
    }

    pub fn condition(&self, tag: u32) -> Option<TagCondition> {
        self.tags.get(&tag).copied().or(self.default)
    }

    pub fn resolve(&self, mesh: &PolyMesh) -> Result<FaceMask, AssemblyError> {
        let mut u = Vec::with_capacity(mesh.boundary_faces.len());
        let mut p = Vec::with_capacity(mesh.boundary_faces.len());
        for (i, f) in mesh.boundary_faces.iter().enumerate() {
            let c = self.condition(f.tag).ok_or(AssemblyError::UntaggedBoundary { face: i, tag: f.tag })?;
            u.push(c.displacement == FieldBc::Dirichlet);
            p.push(c.pressure == FieldBc::Dirichlet);
        }
        Ok(FaceMask { u_dirichlet: u, p_dirichlet: p })
    }
}
