//! Level sets of `H` and paired trajectories for external plotting.

use std::path::Path;

use anyhow::{anyhow, Context, Result};

use revham::verify::integrate_rk4;
use revham::{HamiltonianNF, NormalFormResult, PlanarField, Rat};

use crate::config::{Format, JobConfig};

pub struct Table {
    pub name: String,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
}

/// `levels`: `x, y, H(x, y), H(h̄(x, y))` on a square grid;
/// `trajectory_k`: `t`, the orbit of `X`, its image under `h̄`, and the orbit of `X_H` from `h̄(q₀)`.
pub fn tables(cfg: &JobConfig, x: &PlanarField<Rat>, nf: &NormalFormResult, ham: &HamiltonianNF) -> Result<Vec<Table>> {
    let not_real = |what| anyhow!("{what} has non-real coefficients");
    let h = ham.h.to_f64().ok_or_else(|| not_real("H"))?;
    let hb = nf.h_bar_f64().ok_or_else(|| not_real("h_bar"))?;
    let map = |q: (f64, f64)| (hb.0.value_at(q.0, q.1), hb.1.value_at(q.0, q.1));
    let mut out = Vec::new();
    if cfg.plot.level_sets {
        let n = cfg.plot.grid.max(2);
        let e = cfg.plot.extent;
        let step = 2.0 * e / (n - 1) as f64;
        let mut rows = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                let (px, py) = (-e + a as f64 * step, -e + b as f64 * step);
                let (hx, hy) = map((px, py));
                rows.push(vec![px, py, h.value_at(px, py), h.value_at(hx, hy)]);
            }
        }
        out.push(Table { name: "levels".into(), header: vec!["x", "y", "H", "H_pullback"], rows });
    }
    if cfg.plot.trajectories {
        let xf = x.to_f64().expect("rational field");
        let xh = ham.x_h.to_f64().ok_or_else(|| not_real("X_H"))?;
        let (dt, a) = (cfg.verify.dt, cfg.verify.amplitude);
        let steps = (cfg.verify.horizon / dt).round() as usize;
        for (k, q0) in [(a, 0.0), (0.0, a)].into_iter().enumerate() {
            let orbit = integrate_rk4(&xf, q0, dt, steps)?;
            let image = integrate_rk4(&xh, map(q0), dt, steps)?;
            let rows = orbit
                .iter()
                .zip(&image)
                .enumerate()
                .step_by(cfg.plot.stride)
                .map(|(s, (&q, &w))| {
                    let (hx, hy) = map(q);
                    vec![s as f64 * dt, q.0, q.1, hx, hy, w.0, w.1]
                })
                .collect();
            out.push(Table {
                name: format!("trajectory_{k}"),
                header: vec!["t", "x", "y", "hx", "hy", "yx", "yy"],
                rows,
            });
        }
    }
    Ok(out)
}

pub fn write(dir: &Path, format: Format, tables: &[Table]) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    for t in tables {
        match format {
            Format::Json => {
                let path = dir.join(format!("{}.json", t.name));
                let doc = serde_json::json!({ "columns": t.header, "rows": t.rows });
                std::fs::write(&path, serde_json::to_string(&doc)? + "\n")
                    .with_context(|| format!("writing {}", path.display()))?;
            }
            Format::Csv | Format::Text => {
                let path = dir.join(format!("{}.csv", t.name));
                let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
                w.write_record(&t.header)?;
                for row in &t.rows {
                    w.write_record(row.iter().map(|v| format!("{v:e}")))?;
                }
                w.flush()?;
            }
        }
    }
    Ok(())
}
