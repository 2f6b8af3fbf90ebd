//! Plain-text mesh format.
//!
//! ```text
//! polymesh 2d
//! vertices N
//! x y            (N lines)
//! elements M
//! k i0 ... ik-1  (M lines, counter-clockwise)
//! boundary_tags B
//! elem local_edge tag   (B lines)
//! ```
//!
//! Tokens are whitespace separated; `#` starts a comment.

use std::fmt::Write as _;
use std::path::Path;

use super::PolyMesh;
use crate::error::{Error, MeshError};

pub fn save_mesh(mesh: &PolyMesh, path: impl AsRef<Path>) -> Result<(), Error> {
    std::fs::write(path, write_mesh(mesh))?;
    Ok(())
}

pub fn load_mesh(path: impl AsRef<Path>) -> Result<PolyMesh, Error> {
    let text = std::fs::read_to_string(path)?;
    Ok(parse_mesh(&text)?)
}

/// Serialize with shortest round-trip float formatting so that
/// `write(parse(write(m))) == write(m)` byte for byte.
pub fn write_mesh(mesh: &PolyMesh) -> String {
    let mut s = String::new();
    s.push_str("polymesh 2d\n");
    let _ = writeln!(s, "vertices {}", mesh.vertices.len());
    for v in &mesh.vertices {
        let _ = writeln!(s, "{:?} {:?}", v[0], v[1]);
    }
    let _ = writeln!(s, "elements {}", mesh.elements.len());
    for e in &mesh.elements {
        let _ = write!(s, "{}", e.vertices.len());
        for v in &e.vertices {
            let _ = write!(s, " {v}");
        }
        s.push('\n');
    }
    let mut tags: Vec<(usize, usize, u32)> = mesh
        .boundary_faces
        .iter()
        .filter(|f| f.tag != super::UNTAGGED)
        .map(|f| (f.element, f.local_edge, f.tag))
        .collect();
    tags.sort_unstable();
    let _ = writeln!(s, "boundary_tags {}", tags.len());
    for (k, i, t) in tags {
        let _ = writeln!(s, "{k} {i} {t}");
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    /// Next non-empty line with comments stripped, as (1-based number, tokens).
    fn next(&mut self) -> Option<(usize, Vec<&'a str>)> {
        for (i, line) in self.inner.by_ref() {
            self.last = i + 1;
            let body = line.split('#').next().unwrap_or("");
            let toks: Vec<&str> = body.split_whitespace().collect();
            if !toks.is_empty() {
                return Some((i + 1, toks));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, Vec<&'a str>), MeshError> {
        let last = self.last;
        self.next().ok_or_else(|| MeshError::Parse {
            line: last + 1,
            msg: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn perr(line: usize, msg: impl Into<String>) -> MeshError {
    MeshError::Parse { line, msg: msg.into() }
}

fn num<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, MeshError> {
    tok.parse().map_err(|_| perr(line, format!("invalid {what} {tok:?}")))
}

fn section(lines: &mut Lines, name: &str) -> Result<usize, MeshError> {
    let (ln, t) = lines.expect(name)?;
    if t.len() != 2 || t[0] != name {
        return Err(perr(ln, format!("expected `{name} <count>`")));
    }
    num(ln, t[1], "count")
}

pub fn parse_mesh(text: &str) -> Result<PolyMesh, MeshError> {
    let mut lines = Lines { inner: text.lines().enumerate(), last: 0 };
    let (ln, head) = lines.expect("header")?;
    if head != ["polymesh", "2d"] {
        return Err(perr(ln, "expected header `polymesh 2d`"));
    }

    let nv = section(&mut lines, "vertices")?;
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, t) = lines.expect("vertex")?;
        if t.len() != 2 {
            return Err(perr(ln, "vertex line needs 2 coordinates"));
        }
        let x: f64 = num(ln, t[0], "coordinate")?;
        let y: f64 = num(ln, t[1], "coordinate")?;
        if !x.is_finite() || !y.is_finite() {
            return Err(perr(ln, "non-finite coordinate"));
        }
        vertices.push([x, y]);
    }

    let ne = section(&mut lines, "elements")?;
    let mut loops = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (ln, t) = lines.expect("element")?;
        let k: usize = num(ln, t[0], "vertex count")?;
        if t.len() != k + 1 {
            return Err(perr(ln, format!("element declares {k} vertices but lists {}", t.len() - 1)));
        }
        let mut lp = Vec::with_capacity(k);
        for tok in &t[1..] {
            let v: usize = num(ln, tok, "vertex index")?;
            if v >= nv {
                return Err(perr(ln, format!("vertex index {v} out of range")));
            }
            lp.push(v);
        }
        loops.push(lp);
    }

    let nb = section(&mut lines, "boundary_tags")?;
    let mut tags = Vec::with_capacity(nb);
    for _ in 0..nb {
        let (ln, t) = lines.expect("boundary tag")?;
        if t.len() != 3 {
            return Err(perr(ln, "boundary tag line needs `elem local_edge tag`"));
        }
        tags.push((num(ln, t[0], "element")?, num(ln, t[1], "local edge")?, num(ln, t[2], "tag")?));
    }
    if let Some((ln, _)) = lines.next() {
        return Err(perr(ln, "trailing content after boundary tags"));
    }
    PolyMesh::new(vertices, loops, &tags)
}
