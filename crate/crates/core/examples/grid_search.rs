//! Cross-validated hyperparameter search.

use stripscreen::color::ColorSpaceId;
use stripscreen::learners::{grid_search, Family, HyperGrid, ModelConfig};
use stripscreen::synth::{generate, SynthConfig};

fn main() -> stripscreen::Result<()> {
    let ds = generate(&SynthConfig::preset("paper-like")?.with_n(600))?;

    let grid = HyperGrid::new(ModelConfig::new(Family::GradientBoosting, 1))
        .axis("n_stages", &[25.0, 75.0])
        .axis("max_depth", &[1.0, 3.0])
        .axis("shrinkage", &[0.05, 0.2]);
    let result = grid_search(&grid, &ds, ColorSpaceId::Ycbcr, 3, 42)?;
    for (i, (cfg, score)) in grid.points()?.iter().zip(&result.scores).enumerate() {
        let mark = if i == result.best_index { "*" } else { " " };
        let score = score.map_or("failed".to_string(), |s| format!("{s:.4}"));
        println!("{mark} {:>2} {} {score}", i, serde_json::to_string(&cfg.params).unwrap_or_default());
    }

    let default = HyperGrid::default_for(Family::Mlp, 0);
    println!("shipped mlp grid has {} points", default.size());
    Ok(())
}
