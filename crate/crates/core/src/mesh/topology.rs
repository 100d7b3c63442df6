use std::collections::BTreeMap;

use super::BoundaryComponent;
use crate::error::{Error, Result};

/// Extracts the closed boundary loops of a triangle soup.
///
/// Interior edges must be shared by exactly two triangles traversing them in
/// opposite directions. Loops are returned in order of their smallest vertex
/// and labeled `boundary-<i>`.
pub fn boundary_components(triangles: &[[usize; 3]]) -> Result<Vec<BoundaryComponent>> {
    // undirected edge -> directed uses (from, to); ordered so the first error reported is reproducible
    let mut uses: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
    for &[a, b, c] in triangles {
        for (i, j) in [(a, b), (b, c), (c, a)] {
            uses.entry((i.min(j), i.max(j))).or_default().push((i, j));
        }
    }

    // boundary edges keyed by their start vertex, following triangle orientation
    let mut next: BTreeMap<usize, usize> = BTreeMap::new();
    for (&(lo, hi), directed) in &uses {
        match directed.as_slice() {
            [(i, j)] => {
                if next.insert(*i, *j).is_some() {
                    return Err(Error::NonManifoldVertex(*i));
                }
            }
            [first, second] => {
                if first == second {
                    return Err(Error::InconsistentOrientation(lo, hi));
                }
            }
            _ => return Err(Error::NonManifoldEdge(lo, hi, directed.len())),
        }
    }

    let mut loops = Vec::new();
    while let Some((&start, _)) = next.iter().next() {
        let mut vertices = vec![start];
        let mut current = next.remove(&start).expect("start present");
        while current != start {
            vertices.push(current);
            current = next.remove(&current).ok_or(Error::NonManifoldVertex(current))?;
        }
        loops.push(BoundaryComponent {
            label: format!("boundary-{}", loops.len()),
            vertices,
        });
    }
    Ok(loops)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_tetrahedron_has_no_boundary() {
        let tris = [[0, 2, 1], [0, 1, 3], [1, 2, 3], [2, 0, 3]];
        assert!(boundary_components(&tris).unwrap().is_empty());
    }

    #[test]
    fn square_strip_boundary_follows_orientation() {
        let tris = [[0, 1, 2], [0, 2, 3]];
        let loops = boundary_components(&tris).unwrap();
        assert_eq!(loops.len(), 1);
        assert_eq!(loops[0].vertices, vec![0, 1, 2, 3]);
    }

    #[test]
    fn three_triangles_on_one_edge_are_non_manifold() {
        let tris = [[0, 1, 2], [1, 0, 3], [0, 1, 4]];
        let err = boundary_components(&tris).unwrap_err();
        assert!(matches!(err, Error::NonManifoldEdge(0, 1, 3)));
    }

    #[test]
    fn bowtie_vertex_is_rejected() {
        // Two triangles touching at vertex 0 only.
        let tris = [[0, 1, 2], [0, 3, 4]];
        assert!(matches!(
            boundary_components(&tris),
            Err(Error::NonManifoldVertex(0))
        ));
    }
}
