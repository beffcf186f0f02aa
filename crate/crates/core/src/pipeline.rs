//! End-to-end experiment: mesh, bases, trees, assembly, both eigensolves, comparison.

use serde::{Deserialize, Serialize};

use crate::assembly::{assemble, AssembledSystem};
use crate::config::ExperimentConfig;
use crate::eigen::{compare_spectra, solve_gauged, solve_ungauged, Comparison, Spectrum};
use crate::error::{Error, Result};
use crate::gauging::{build_level_tree, build_multilevel_tree, gauge_indices, verify_level_tree, LevelTree, MultiLevelTree, TreeStats};
use crate::gradient::hierarchical_gradient;
use crate::greville::{build_level_graphs, LevelGraph};
use crate::hierarchy::{check_admissibility, HierarchicalMesh, HierarchicalSpace};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelCounts {
    pub level: usize,
    pub active_cells: usize,
    /// Active and deactivated functions for `k = 0, 1, 2`.
    pub active: [usize; 3],
    pub deactivated: [usize; 3],
}

/// Outcome of each acceptance-style check of one run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Checks {
    pub admissible: bool,
    pub trees: bool,
    /// `zero-count = |M_L| = dim W⁰_L`.
    pub zero_count_identity: bool,
    /// Gauged spectrum has no zero eigenvalue.
    pub gauged_kernel_trivial: bool,
    pub spectral_equivalence: bool,
}

impl Checks {
    pub fn all(&self) -> bool {
        self.admissible && self.trees && self.zero_count_identity && self.gauged_kernel_trivial && self.spectral_equivalence
    }
}

/// Machine-readable summary written as `summary.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub name: String,
    pub degree: usize,
    pub levels: usize,
    pub base_elements: [usize; 2],
    pub domain_scale: [f64; 2],
    pub dim_w0: usize,
    pub dim_w1: usize,
    pub dim_w2: usize,
    pub per_level: Vec<LevelCounts>,
    pub trees: Vec<TreeStats>,
    pub multilevel_tree: usize,
    pub cotree: usize,
    pub zero_count_ungauged: usize,
    pub zero_count_gauged: usize,
    pub tau: f64,
    pub paired_eigenvalues: usize,
    /// `None` when the two spectra have different lengths.
    pub max_rel_diff: Option<f64>,
    pub max_abs_diff: f64,
    pub spectral_tolerance: f64,
    /// Whether each `Ω_{ℓ+1}` is also a union of `X⁰` supports (reported, not enforced).
    pub generated_by_x0: Vec<bool>,
    pub checks: Checks,
    pub passed: bool,
}

/// Everything a run produces, kept in memory for reporting.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub config: ExperimentConfig,
    pub mesh: HierarchicalMesh,
    pub space: HierarchicalSpace,
    pub graphs: Vec<LevelGraph>,
    pub trees: Vec<LevelTree>,
    pub multilevel: MultiLevelTree,
    pub system: AssembledSystem,
    pub ungauged: Spectrum,
    pub gauged: Spectrum,
    pub comparison: Comparison,
    pub summary: Summary,
}

/// Mesh, bases, graphs and trees; stops at the first admissibility or tree failure.
pub struct GaugeSetup {
    pub mesh: HierarchicalMesh,
    pub space: HierarchicalSpace,
    pub graphs: Vec<LevelGraph>,
    pub trees: Vec<LevelTree>,
    pub tree_stats: Vec<TreeStats>,
    pub multilevel: MultiLevelTree,
    pub generated_by_x0: Vec<bool>,
}

pub fn build_gauge(config: &ExperimentConfig) -> Result<GaugeSetup> {
    config.validate()?;
    let mesh = HierarchicalMesh::build(config.degree, config.base_elements, &config.refinement)?;
    let report = check_admissibility(&mesh);
    if let Some(f) = report.failures.first() {
        return Err(Error::Admissibility {
            level: f.level,
            detail: format!(
                "support of {:?} minus the refined region is {:?} ({} failures in total)",
                f.function,
                f.defect,
                report.failures.len()
            ),
        });
    }
    let space = HierarchicalSpace::new(&mesh)?;
    let graphs = build_level_graphs(&mesh, &space, config.geometry())?;
    let trees: Vec<LevelTree> = graphs.iter().map(build_level_tree).collect();
    let tree_stats = graphs.iter().zip(&trees).map(|(g, t)| verify_level_tree(g, t)).collect::<Result<Vec<_>>>()?;
    let multilevel = build_multilevel_tree(&trees, space.basis(1))?;
    Ok(GaugeSetup { mesh, space, graphs, trees, tree_stats, multilevel, generated_by_x0: report.generated_by_x0 })
}

/// Runs the whole pipeline. Admissibility and internal errors are returned as `Err`;
/// spectral and counting checks are recorded in the summary.
pub fn execute(config: &ExperimentConfig) -> Result<Experiment> {
    let setup = build_gauge(config)?;
    let GaugeSetup { mesh, space, graphs, trees, tree_stats, multilevel, generated_by_x0 } = setup;
    let system = assemble(&mesh, &space, config.geometry(), config.material())?;
    for (name, m) in [("stiffness", &system.stiffness), ("mass", &system.mass)] {
        let defect = m.symmetry_defect();
        if defect > 1e-12 {
            return Err(Error::Numerical(format!("{name} matrix not symmetric (relative defect {defect:.2e})")));
        }
    }
    let gradient = hierarchical_gradient(&mesh, &space)?;
    let cotree = gauge_indices(&multilevel);
    let ungauged = solve_ungauged(&system, config.zero_tolerance)?;
    let gauged = solve_gauged(&system, &cotree, &gradient, config.zero_tolerance)?;
    if ungauged.negativity() < -1.0 {
        return Err(Error::Numerical(format!(
            "stiffness not semidefinite: smallest eigenvalue {:e} below -tau",
            ungauged.eigenvalues[0]
        )));
    }
    let comparison = compare_spectra(&ungauged, &gauged);

    let dim_w0 = space.basis(0).len();
    let max_rel = comparison.max_rel_diff();
    let checks = Checks {
        admissible: true,
        trees: true,
        zero_count_identity: ungauged.zero_count == multilevel.len() && multilevel.len() == dim_w0,
        gauged_kernel_trivial: gauged.zero_count == 0,
        spectral_equivalence: max_rel < config.spectral_tolerance,
    };
    let per_level = (0..mesh.num_levels())
        .map(|l| LevelCounts {
            level: l,
            active_cells: mesh.active_cells(l).len(),
            active: [0, 1, 2].map(|k| space.basis(k).active(l).len()),
            deactivated: [0, 1, 2].map(|k| space.basis(k).deactivated(l).len()),
        })
        .collect();
    let summary = Summary {
        name: config.name.clone(),
        degree: config.degree,
        levels: config.levels,
        base_elements: config.base_elements,
        domain_scale: config.domain_scale,
        dim_w0,
        dim_w1: space.basis(1).len(),
        dim_w2: space.basis(2).len(),
        per_level,
        trees: tree_stats,
        multilevel_tree: multilevel.len(),
        cotree: cotree.len(),
        zero_count_ungauged: ungauged.zero_count,
        zero_count_gauged: gauged.zero_count,
        tau: ungauged.tau,
        paired_eigenvalues: comparison.pairs.len(),
        max_rel_diff: max_rel.is_finite().then_some(max_rel),
        max_abs_diff: comparison.max_abs_diff(),
        spectral_tolerance: config.spectral_tolerance,
        generated_by_x0,
        passed: checks.all(),
        checks,
    };
    Ok(Experiment {
        config: config.clone(),
        mesh,
        space,
        graphs,
        trees,
        multilevel,
        system,
        ungauged,
        gauged,
        comparison,
        summary,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    #[test]
    fn single_level_run_passes() {
        let e = execute(&config(r#"{"degree": 1, "base_elements": [4, 4], "levels": 0}"#)).unwrap();
        assert!(e.summary.passed, "{:?}", e.summary.checks);
        assert_eq!(e.summary.multilevel_tree, 9);
        assert_eq!(e.summary.zero_count_ungauged, 9);
        assert_eq!(e.summary.paired_eigenvalues, e.summary.cotree);
    }

    #[test]
    fn two_level_run_passes_and_round_trips() {
        let e = execute(&config(
            r#"{"degree": 2, "base_elements": [4, 4], "levels": 1, "refinement": [[{"x": [2, 6], "y": [2, 6]}]]}"#,
        ))
        .unwrap();
        assert!(e.summary.passed, "{:?}", e.summary.checks);
        let text = serde_json::to_string_pretty(&e.summary).unwrap();
        let back: Summary = serde_json::from_str(&text).unwrap();
        assert_eq!(back, e.summary);
    }

    #[test]
    fn inadmissible_region_is_reported() {
        let err = execute(&config(
            r#"{"degree": 2, "base_elements": [4, 4], "levels": 1, "refinement": [[{"x": [2, 4], "y": [2, 4]}]]}"#,
        ))
        .unwrap_err();
        assert!(matches!(err, Error::Admissibility { level: 1, .. }), "{err}");
    }
}
