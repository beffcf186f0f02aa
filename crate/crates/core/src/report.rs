//! Run artifacts: eigenvalue CSV, summary JSON and SVG drawings.
//!
//! SVG colours: light gray cells of `G_{ℓ,ℓ}`, dark gray cells of `G_{ℓ,ℓ+1}`, blue
//! boundary tree edges, red active tree edges, cyan deactivated tree edges.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::eigen::Comparison;
use crate::error::Result;
use crate::gauging::LevelTree;
use crate::greville::{EntityClass, LevelGraph};
use crate::hierarchy::HierarchicalMesh;
use crate::pipeline::Experiment;
use crate::tensor::{Axis, Geometry};

pub const CSV_HEADER: &str = "i,lambda_gauged,lambda_ungauged,abs_diff,rel_diff";

/// One row per paired eigenvalue. `f64` values use the shortest representation that
/// round-trips, so equal runs give byte-identical files.
pub fn eigenvalue_csv(comparison: &Comparison) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for p in &comparison.pairs {
        writeln!(out, "{},{:?},{:?},{:?},{:?}", p.index, p.gauged, p.ungauged, p.abs_diff, p.rel_diff).unwrap();
    }
    out
}

const SIZE: f64 = 600.0;
const MARGIN: f64 = 20.0;

struct Canvas {
    body: String,
    /// Pixels per physical length unit.
    unit: f64,
}

impl Canvas {
    fn new(geometry: &Geometry) -> Self {
        let [a, b] = geometry.scale;
        Canvas { body: String::new(), unit: SIZE / a.max(b) }
    }

    fn width(&self, geometry: &Geometry) -> f64 {
        geometry.scale[0] * self.unit + 2.0 * MARGIN
    }

    fn height(&self, geometry: &Geometry) -> f64 {
        geometry.scale[1] * self.unit + 2.0 * MARGIN
    }

    /// Physical point to SVG coordinates (y axis pointing up).
    fn at(&self, geometry: &Geometry, p: [f64; 2]) -> (f64, f64) {
        (MARGIN + p[0] * self.unit, MARGIN + (geometry.scale[1] - p[1]) * self.unit)
    }

    fn polygon(&mut self, geometry: &Geometry, pts: &[[f64; 2]], fill: &str, stroke: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&p| {
                let (x, y) = self.at(geometry, p);
                format!("{x:.3},{y:.3}")
            })
            .collect();
        writeln!(
            self.body,
            r#"<polygon points="{}" fill="{fill}" stroke="{stroke}" stroke-width="0.5"/>"#,
            coords.join(" ")
        )
        .unwrap();
    }

    fn line(&mut self, geometry: &Geometry, a: [f64; 2], b: [f64; 2], colour: &str, width: f64) {
        let (x1, y1) = self.at(geometry, a);
        let (x2, y2) = self.at(geometry, b);
        writeln!(
            self.body,
            r#"<line x1="{x1:.3}" y1="{y1:.3}" x2="{x2:.3}" y2="{y2:.3}" stroke="{colour}" stroke-width="{width}"/>"#
        )
        .unwrap();
    }

    fn finish(self, geometry: &Geometry, title: &str) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w:.0}\" height=\"{h:.0}\" viewBox=\"0 0 {w:.3} {h:.3}\">\n<title>{title}</title>\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            w = self.width(geometry),
            h = self.height(geometry),
        )
    }
}

fn tree_colour(class: EntityClass) -> &'static str {
    match class {
        EntityClass::Boundary => "blue",
        EntityClass::Active => "red",
        EntityClass::Deactivated => "cyan",
    }
}

/// Greville subgrid of one level with its spanning tree.
pub fn level_svg(graph: &LevelGraph, tree: &LevelTree) -> String {
    let grid = graph.grid();
    let geo = *grid.geometry();
    let mut canvas = Canvas::new(&geo);
    for c in 0..grid.num_cells() {
        let fill = if graph.has_next_cell(c) {
            "#555555"
        } else if graph.has_cell(c) {
            "#d0d0d0"
        } else {
            continue;
        };
        let pts = grid.cell_nodes(c).map(|v| grid.position(v));
        canvas.polygon(&geo, &pts, fill, "#888888");
    }
    for &(e, class) in tree.classified_edges() {
        let (a, b) = grid.edge_nodes(e);
        canvas.line(&geo, grid.position(a), grid.position(b), tree_colour(class), 2.0);
    }
    canvas.finish(&geo, &format!("level {} Greville subgrid and tree", graph.level()))
}

/// Active tree edges of all levels on top of each other. Drawn for `p = 1` only: for
/// higher degree the Greville edges of different levels overlap and the picture is
/// unreadable, so `None` is returned.
pub fn multilevel_svg(graphs: &[LevelGraph], trees: &[LevelTree], degree: usize) -> Option<String> {
    if degree != 1 {
        return None;
    }
    let geo = *graphs.first()?.grid().geometry();
    let mut canvas = Canvas::new(&geo);
    for (graph, tree) in graphs.iter().zip(trees) {
        let grid = graph.grid();
        for c in 0..grid.num_cells() {
            if graph.has_cell(c) && !graph.has_next_cell(c) {
                let pts = grid.cell_nodes(c).map(|v| grid.position(v));
                canvas.polygon(&geo, &pts, "#f0f0f0", "#999999");
            }
        }
        for e in tree.edges_of(EntityClass::Active) {
            let (a, b) = grid.edge_nodes(e);
            canvas.line(&geo, grid.position(a), grid.position(b), "red", 2.0);
        }
    }
    Some(canvas.finish(&geo, "multi-level tree"))
}

/// Active cells of every level, drawn in physical coordinates.
pub fn mesh_svg(mesh: &HierarchicalMesh, geometry: &Geometry) -> String {
    let mut canvas = Canvas::new(geometry);
    let shades = ["#ffffff", "#e6eef8", "#c9dbf0", "#a9c5e6", "#89aedb"];
    for l in 0..mesh.num_levels() {
        let level = mesh.level(l);
        let bx = level.standard(Axis::X).breakpoints();
        let by = level.standard(Axis::Y).breakpoints();
        for (e1, e2) in mesh.active_cells(l).iter() {
            let pts = [[bx[e1], by[e2]], [bx[e1 + 1], by[e2]], [bx[e1 + 1], by[e2 + 1]], [bx[e1], by[e2 + 1]]]
                .map(|p| geometry.map(p));
            canvas.polygon(geometry, &pts, shades[l.min(shades.len() - 1)], "black");
        }
    }
    canvas.finish(geometry, "hierarchical mesh")
}

/// Files written by [`write_artifacts`].
#[derive(Debug, Clone, Default)]
pub struct WrittenFiles {
    pub csv: PathBuf,
    pub summary: PathBuf,
    pub svgs: Vec<PathBuf>,
    /// Set when the multi-level overlay was skipped because `p > 1`.
    pub overlay_suppressed: bool,
}

pub fn write_artifacts(experiment: &Experiment, dir: &Path, svg: bool) -> Result<WrittenFiles> {
    std::fs::create_dir_all(dir)?;
    let mut files = WrittenFiles { csv: dir.join("eigenvalues.csv"), summary: dir.join("summary.json"), ..Default::default() };
    std::fs::write(&files.csv, eigenvalue_csv(&experiment.comparison))?;
    let mut summary = serde_json::to_string_pretty(&experiment.summary)?;
    summary.push('\n');
    std::fs::write(&files.summary, summary)?;
    if svg {
        let mesh_path = dir.join("mesh.svg");
        std::fs::write(&mesh_path, mesh_svg(&experiment.mesh, &experiment.config.geometry()))?;
        files.svgs.push(mesh_path);
        for (graph, tree) in experiment.graphs.iter().zip(&experiment.trees) {
            let path = dir.join(format!("tree_level{}.svg", graph.level()));
            std::fs::write(&path, level_svg(graph, tree))?;
            files.svgs.push(path);
        }
        match multilevel_svg(&experiment.graphs, &experiment.trees, experiment.config.degree) {
            Some(text) => {
                let path = dir.join("multilevel_tree.svg");
                std::fs::write(&path, text)?;
                files.svgs.push(path);
            }
            None => files.overlay_suppressed = true,
        }
    }
    Ok(files)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{compare_spectra, Spectrum};

    #[test]
    fn csv_layout() {
        let u = Spectrum::from_eigenvalues(vec![0.0, 1.0, 2.0, 5.0], 1e-10);
        let g = Spectrum::from_eigenvalues(vec![1.0, 2.0, 5.0], 1e-10);
        let text = eigenvalue_csv(&compare_spectra(&u, &g));
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], CSV_HEADER);
        assert_eq!(lines[1], "0,1.0,1.0,0.0,0.0");
        assert!(lines[1..].iter().all(|l| l.split(',').nth(3) == Some("0.0")));
    }
}
