use crate::field::{CellState, PotentialField};
use std::fmt::Write as _;

const UNSAFE_RGB: [u8; 3] = [186, 44, 38];
const GOAL_RGB: [u8; 3] = [46, 160, 67];

/// Free-cell colormap: light at the goal basin, dark blue at the barrier.
fn heat(v: f64) -> [u8; 3] {
    let t = v.clamp(0.0, 1.0);
    let lerp = |a: u8, b: u8| (a as f64 + (b as f64 - a as f64) * t).round() as u8;
    [lerp(251, 33), lerp(248, 48), lerp(213, 116)]
}

/// Binary PPM (P6) heatmap, one pixel per cell, with goal and unsafe cells
/// in distinct colors. Rows run top-down, so row 0 of the image is the
/// max-`y` grid row.
pub fn render_ppm(field: &PotentialField) -> Vec<u8> {
    let occ = field.occupancy();
    let (w, h) = (occ.width(), occ.height());
    let mut out = format!("P6\n{w} {h}\n255\n").into_bytes();
    out.reserve(3 * w * h);
    for j in (0..h).rev() {
        for i in 0..w {
            let rgb = match occ.get(i, j) {
                CellState::Unsafe => UNSAFE_RGB,
                CellState::Goal => GOAL_RGB,
                CellState::Free => heat(field.v_at(i, j)),
            };
            out.extend_from_slice(&rgb);
        }
    }
    out
}

/// SVG render: cell rectangles for goal/unsafe regions and descent arrows
/// (`-grad V`, the commanded flow direction) on free cells, subsampled every
/// `arrow_stride` cells.
pub fn render_svg(field: &PotentialField, arrow_stride: usize) -> String {
    let occ = field.occupancy();
    let t = field.transform();
    let (w, h) = (occ.width(), occ.height());
    let (dx, dy) = t.cell_size();
    let b = t.bounds;
    // SVG y grows downward; flip world y.
    let flip = |y: f64| b.y_max + b.y_min - y;
    let stride = arrow_stride.max(1);

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r##"<svg xmlns="http://www.w3.org/2000/svg" viewBox="{} {} {} {}">"##,
        b.x_min - 0.5 * dx,
        b.y_min - 0.5 * dy,
        (b.x_max - b.x_min) + dx,
        (b.y_max - b.y_min) + dy,
    );
    let _ = writeln!(
        svg,
        r##"<rect x="{}" y="{}" width="{}" height="{}" fill="#fbf8d5"/>"##,
        b.x_min - 0.5 * dx,
        b.y_min - 0.5 * dy,
        (b.x_max - b.x_min) + dx,
        (b.y_max - b.y_min) + dy,
    );

    for j in 0..h {
        for i in 0..w {
            let state = occ.get(i, j);
            if state == CellState::Free {
                continue;
            }
            let c = t.cell_center(i, j);
            let fill = match state {
                CellState::Unsafe => "#ba2c26",
                CellState::Goal => "#2ea043",
                CellState::Free => unreachable!(),
            };
            let _ = writeln!(
                svg,
                r##"<rect x="{}" y="{}" width="{dx}" height="{dy}" fill="{fill}"/>"##,
                c.x - 0.5 * dx,
                flip(c.y) - 0.5 * dy,
            );
        }
    }

    let arrow_len = 0.45 * stride as f64 * dx.min(dy);
    for j in (0..h).step_by(stride) {
        for i in (0..w).step_by(stride) {
            if occ.get(i, j) != CellState::Free {
                continue;
            }
            let g = field.grad_at(i, j);
            let dir = (-g).normalized();
            if dir == crate::geom::Vec2::ZERO {
                continue;
            }
            let c = t.cell_center(i, j);
            let tip_x = c.x + dir.x * arrow_len;
            let tip_y = c.y + dir.y * arrow_len;
            // shaft
            let _ = writeln!(
                svg,
                r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#1c2f6e" stroke-width="{}"/>"##,
                c.x,
                flip(c.y),
                tip_x,
                flip(tip_y),
                0.12 * arrow_len,
            );
            // two short head strokes
            for sign in [1.0, -1.0] {
                let (hx, hy) = rotate(dir.x, dir.y, sign * 2.6);
                let _ = writeln!(
                    svg,
                    r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#1c2f6e" stroke-width="{}"/>"##,
                    tip_x,
                    flip(tip_y),
                    tip_x + hx * 0.35 * arrow_len,
                    flip(tip_y + hy * 0.35 * arrow_len),
                    0.12 * arrow_len,
                );
            }
        }
    }
    svg.push_str("</svg>\n");
    svg
}

fn rotate(x: f64, y: f64, angle: f64) -> (f64, f64) {
    let (s, c) = angle.sin_cos();
    (x * c - y * s, x * s + y * c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{solve, GridDims, OccupancyGrid, SolverParams, WorldSpec};
    use crate::geom::Rect;

    fn small_field() -> PotentialField {
        let world = WorldSpec {
            bounds: Rect::new(0.0, 1.0, 0.0, 1.0),
            grid: GridDims { width: 7, height: 5 },
            obstacles: vec![],
            goal: None,
        };
        let mut occ = OccupancyGrid::free(world.transform());
        occ.close_border();
        occ.set(3, 2, CellState::Goal);
        solve(&occ, &SolverParams::default()).unwrap()
    }

    #[test]
    fn ppm_has_correct_header_and_size() {
        let field = small_field();
        let ppm = render_ppm(&field);
        let header = b"P6\n7 5\n255\n";
        assert_eq!(&ppm[..header.len()], header);
        assert_eq!(ppm.len(), header.len() + 3 * 7 * 5);
    }

    #[test]
    fn ppm_paints_goal_and_unsafe_distinctly() {
        let field = small_field();
        let ppm = render_ppm(&field);
        let header_len = b"P6\n7 5\n255\n".len();
        // top-left pixel = cell (0, 4): border, unsafe
        assert_eq!(&ppm[header_len..header_len + 3], &UNSAFE_RGB);
        // goal cell (3,2) is image row 2, column 3
        let off = header_len + 3 * (2 * 7 + 3);
        assert_eq!(&ppm[off..off + 3], &GOAL_RGB);
    }

    #[test]
    fn svg_is_well_formed_and_has_arrows() {
        let field = small_field();
        let svg = render_svg(&field, 1);
        assert!(svg.starts_with("<svg"));
        assert!(svg.ends_with("</svg>\n"));
        assert!(svg.contains("<line"));
        assert!(svg.contains("#ba2c26"));
    }
}
