//! Text and SVG pictures of plane partitions.

use std::fmt::Write;

use super::PlanePartition;

/// Rows of entries separated by spaces, one row per line.
pub fn ascii(pp: &PlanePartition) -> String {
    if pp.is_empty() {
        return "(empty)".to_string();
    }
    pp.rows()
        .iter()
        .map(|row| row.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" "))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Clone, Copy)]
enum Face {
    Top,
    Left,
    Right,
}

impl Face {
    fn class(self) -> &'static str {
        match self {
            Face::Top => "lozenge top",
            Face::Left => "lozenge left",
            Face::Right => "lozenge right",
        }
    }

    fn fill(self) -> &'static str {
        match self {
            Face::Top => "#f2d16b",
            Face::Left => "#5b8fd6",
            Face::Right => "#d6605b",
        }
    }
}

/// Depth key, face kind and the four corners in space.
type SpaceFace = (usize, Face, [(f64, f64, f64); 4]);

const SCALE: f64 = 24.0;
const MARGIN: f64 = 16.0;

fn project(x: f64, y: f64, z: f64) -> (f64, f64) {
    let c = 3f64.sqrt() / 2.0;
    ((x - y) * c * SCALE, ((x + y) / 2.0 - z) * SCALE)
}

/// Stacked unit cubes over the Young diagram, one lozenge per visible face,
/// above the strip boundary: one segment per particle of `x0` and one cut
/// triangle per hole in `0..=x_1`.
pub fn svg(pp: &PlanePartition) -> String {
    let mut faces: Vec<SpaceFace> = Vec::new();
    for (i, row) in pp.rows().iter().enumerate() {
        for (j, &h) in row.iter().enumerate() {
            let (x, y) = (j as f64, i as f64);
            for z in 0..h {
                let zf = z as f64;
                faces.push((
                    i + j + z,
                    Face::Right,
                    [
                        (x + 1.0, y, zf),
                        (x + 1.0, y + 1.0, zf),
                        (x + 1.0, y + 1.0, zf + 1.0),
                        (x + 1.0, y, zf + 1.0),
                    ],
                ));
                faces.push((
                    i + j + z,
                    Face::Left,
                    [
                        (x, y + 1.0, zf),
                        (x + 1.0, y + 1.0, zf),
                        (x + 1.0, y + 1.0, zf + 1.0),
                        (x, y + 1.0, zf + 1.0),
                    ],
                ));
            }
            let zf = h as f64;
            faces.push((
                i + j + h,
                Face::Top,
                [
                    (x, y, zf),
                    (x + 1.0, y, zf),
                    (x + 1.0, y + 1.0, zf),
                    (x, y + 1.0, zf),
                ],
            ));
        }
    }
    faces.sort_by_key(|f| f.0);

    let projected: Vec<(Face, Vec<(f64, f64)>)> = faces
        .iter()
        .map(|(_, face, pts)| (*face, pts.iter().map(|&(x, y, z)| project(x, y, z)).collect()))
        .collect();

    let coords = pp.x0().coords();
    let width_cells = coords[0] + 1;
    let strip_w = width_cells as f64 * SCALE;
    let (mut min_x, mut max_x, mut min_y, mut max_y) = (0.0f64, strip_w, 0.0f64, 0.0f64);
    for (_, pts) in &projected {
        for &(px, py) in pts {
            min_x = min_x.min(px);
            max_x = max_x.max(px);
            min_y = min_y.min(py);
            max_y = max_y.max(py);
        }
    }
    let boundary_y = max_y + SCALE;
    let width = max_x - min_x + 2.0 * MARGIN;
    let height = boundary_y - min_y + SCALE + 2.0 * MARGIN;
    let (dx, dy) = (MARGIN - min_x, MARGIN - min_y);

    let mut out = String::new();
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{:.1}" height="{:.1}" viewBox="0 0 {:.1} {:.1}">"#,
        width, height, width, height
    )
    .unwrap();
    writeln!(out, r##"<g class="tiling" stroke="#222" stroke-width="0.8">"##).unwrap();
    for (face, pts) in &projected {
        let points: Vec<String> = pts
            .iter()
            .map(|(x, y)| format!("{:.2},{:.2}", x + dx, y + dy))
            .collect();
        writeln!(
            out,
            r#"<polygon class="{}" fill="{}" points="{}"/>"#,
            face.class(),
            face.fill(),
            points.join(" ")
        )
        .unwrap();
    }
    writeln!(out, "</g>").unwrap();

    writeln!(out, r##"<g class="boundary" stroke="#222" stroke-width="1.2">"##).unwrap();
    let base = boundary_y + dy;
    let left = dx.min(MARGIN);
    for p in 0..width_cells {
        let x0 = left + p as f64 * SCALE;
        if coords.contains(&p) {
            writeln!(
                out,
                r#"<line class="particle" x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}"/>"#,
                x0,
                base,
                x0 + SCALE,
                base + SCALE / 2.0
            )
            .unwrap();
        } else {
            writeln!(
                out,
                r##"<polygon class="hole" fill="#bbb" points="{:.2},{:.2} {:.2},{:.2} {:.2},{:.2}"/>"##,
                x0,
                base,
                x0 + SCALE,
                base,
                x0 + SCALE / 2.0,
                base + SCALE / 2.0
            )
            .unwrap();
        }
    }
    writeln!(out, "</g>").unwrap();
    out.push_str("</svg>\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partitions::ParticleConfig;

    fn pp(x0: &[usize], rows: Vec<Vec<usize>>) -> PlanePartition {
        PlanePartition::new(ParticleConfig::new(x0.to_vec()).unwrap(), rows).unwrap()
    }

    #[test]
    fn ascii_layout() {
        assert_eq!(ascii(&pp(&[1, 0], vec![])), "(empty)");
        assert_eq!(ascii(&pp(&[3, 1], vec![vec![2, 1], vec![1]])), "2 1\n1");
    }

    #[test]
    fn svg_structure() {
        let p = pp(&[3, 1], vec![vec![2, 1], vec![1]]);
        let text = svg(&p);
        assert!(text.starts_with("<svg") && text.trim_end().ends_with("</svg>"));
        assert_eq!(text.matches("lozenge top").count(), 3);
        // side faces: two per unit cube
        assert_eq!(text.matches("lozenge left").count(), 4);
        assert_eq!(text.matches("lozenge right").count(), 4);
        assert_eq!(text.matches(r#"class="particle""#).count(), 2);
        assert_eq!(text.matches(r#"class="hole""#).count(), 2);
    }
}
