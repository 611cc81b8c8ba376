//! File formats: body JSON (`{"dim": n, "vertices": [[…], …]}`), blend
//! parameter JSON, and polyline CSV dumps for plotting 2D bodies and
//! slices. Writers order vertices lexicographically so identical bodies
//! serialize to identical bytes.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::body::{convex_hull, ConvexBody, Point};
use crate::error::{Error, Result};
use crate::functional::BlendSpec;
use crate::scalar::Real;

#[derive(Serialize, Deserialize)]
struct BodyFile<T> {
    dim: usize,
    vertices: Vec<Vec<T>>,
}

/// Reads a body from JSON. Redundant points in the file are tolerated:
/// the body is rebuilt as the hull of the listed vertices.
pub fn read_body<T: Real + DeserializeOwned>(path: impl AsRef<Path>) -> Result<ConvexBody<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;
    let file: BodyFile<T> = serde_json::from_str(&text)
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;
    if file.vertices.is_empty() {
        return Err(Error::ParseError(format!(
            "{}: field `vertices` must not be empty",
            path.display()
        )));
    }
    let points: Vec<Point<T>> = file.vertices.into_iter().map(Point).collect();
    convex_hull(&points, file.dim)
}

/// JSON form of a body with lexicographically sorted vertices.
pub fn body_to_json<T: Real + Serialize>(body: &ConvexBody<T>) -> String {
    let file = BodyFile { dim: body.dim(), vertices: body.sorted_vertex_coords() };
    let mut text = serde_json::to_string_pretty(&file).expect("body serializes");
    text.push('\n');
    text
}

pub fn write_body<T: Real + Serialize>(
    path: impl AsRef<Path>,
    body: &ConvexBody<T>,
) -> Result<()> {
    fs::write(path, body_to_json(body))?;
    Ok(())
}

pub fn read_blend_spec<T: Real + DeserializeOwned>(
    path: impl AsRef<Path>,
) -> Result<BlendSpec<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| Error::ParseError(format!("{}: {e}", path.display())))
}

/// Boundary loop of a 2D body: vertices in counterclockwise order around
/// the centroid.
pub fn polygon_loop<T: Real>(body: &ConvexBody<T>) -> Result<Vec<Vec<T>>> {
    if body.dim() != 2 {
        return Err(Error::InvalidParameter("polygon loops are for 2D bodies".into()));
    }
    let c = body.centroid();
    let mut verts: Vec<Vec<T>> = body.vertices().iter().map(|v| v.as_slice().to_vec()).collect();
    verts.sort_by(|a, b| {
        let ta = (a[1] - c[1]).to_f64_lossy().atan2((a[0] - c[0]).to_f64_lossy());
        let tb = (b[1] - c[1]).to_f64_lossy().atan2((b[0] - c[0]).to_f64_lossy());
        ta.partial_cmp(&tb)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| crate::hull::lex_cmp(a, b))
    });
    Ok(verts)
}

/// Polyline CSV: one `x,y` row per point, loops closed by repeating their
/// first point, loops separated by a blank line.
pub fn plot_csv<T: Real>(loops: &[Vec<Vec<T>>]) -> String {
    let mut out = String::new();
    for (i, poly) in loops.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        for p in poly.iter().chain(poly.first().into_iter()) {
            out.push_str(&format!(
                "{:e},{:e}\n",
                p[0].to_f64_lossy(),
                p[1].to_f64_lossy()
            ));
        }
    }
    out
}

pub fn write_polylines<T: Real>(
    path: impl AsRef<Path>,
    loops: &[Vec<Vec<T>>],
) -> Result<()> {
    fs::write(path, plot_csv(loops))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> ConvexBody<f64> {
        let pts = vec![
            Point(vec![0.0, 0.0]),
            Point(vec![1.0, 0.0]),
            Point(vec![1.0, 1.0]),
            Point(vec![0.0, 1.0]),
        ];
        convex_hull(&pts, 2).unwrap()
    }

    #[test]
    fn body_round_trips_through_file() {
        let dir = std::env::temp_dir().join("equipoint-io-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("square.json");
        let b = square();
        write_body(&path, &b).unwrap();
        let back: ConvexBody<f64> = read_body(&path).unwrap();
        assert_eq!(b.sorted_vertex_coords(), back.sorted_vertex_coords());
        // identical bodies serialize identically
        assert_eq!(body_to_json(&b), body_to_json(&back));
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn redundant_file_points_are_dropped() {
        let text = r#"{"dim": 2, "vertices": [[0,0],[1,0],[1,1],[0,1],[0.5,0.5]]}"#;
        let dir = std::env::temp_dir().join("equipoint-io-test2");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("clutter.json");
        std::fs::write(&path, text).unwrap();
        let b: ConvexBody<f64> = read_body(&path).unwrap();
        assert_eq!(b.vertices().len(), 4);
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn malformed_json_is_a_parse_error_with_location() {
        let dir = std::env::temp_dir().join("equipoint-io-test3");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.json");
        std::fs::write(&path, "{\"dim\": 2, \"vertices\": [[0,0").unwrap();
        let err = read_body::<f64>(&path).unwrap_err();
        assert_eq!(err.code(), "parse_error");
        assert!(err.to_string().contains("line"), "error: {err}");
        std::fs::remove_dir_all(&dir).ok();
    }

    #[test]
    fn polygon_loop_is_counterclockwise() {
        let verts = polygon_loop(&square()).unwrap();
        assert_eq!(verts.len(), 4);
        // shoelace area positive => counterclockwise
        let mut area = 0.0;
        for i in 0..verts.len() {
            let a = &verts[i];
            let b = &verts[(i + 1) % verts.len()];
            area += a[0] * b[1] - b[0] * a[1];
        }
        assert!(area > 0.0);
    }

    #[test]
    fn plot_csv_closes_loops_and_separates_them() {
        let loops = vec![
            vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![0.0, 1.0]],
            vec![vec![2.0, 2.0], vec![3.0, 2.0], vec![2.0, 3.0]],
        ];
        let csv = plot_csv(&loops);
        let blocks: Vec<&str> = csv.split("\n\n").collect();
        assert_eq!(blocks.len(), 2);
        for block in blocks {
            let rows: Vec<&str> = block.trim_end().lines().collect();
            assert_eq!(rows.len(), 4); // 3 vertices + closing repeat
            assert_eq!(rows.first(), rows.last());
        }
    }
}
