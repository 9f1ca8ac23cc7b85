//! Job configuration: a TOML or JSON file, overridden by command-line flags.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use revham::parser::{parse_with, ParseOptions};
use revham::scalar::parse_rat;
use revham::verify::{Tolerances, VerifyOptions};
use revham::{PlanarField, Rat, Series2};

use crate::Failure;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct JobConfig {
    pub p: Option<String>,
    pub q: Option<String>,
    /// Coefficient tables `[[i, j, "p/q"], …]`, an alternative to `p`/`q`.
    pub p_terms: Option<Vec<(usize, usize, String)>>,
    pub q_terms: Option<Vec<(usize, usize, String)>>,
    pub variables: (String, String),
    pub order: usize,
    pub strict_degree: bool,
    pub verify: VerifySection,
    pub plot: PlotSection,
    pub output: OutputSection,
}

impl Default for JobConfig {
    fn default() -> Self {
        JobConfig {
            p: None,
            q: None,
            p_terms: None,
            q_terms: None,
            variables: ("u".into(), "v".into()),
            order: 10,
            strict_degree: false,
            verify: VerifySection::default(),
            plot: PlotSection::default(),
            output: OutputSection::default(),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct VerifySection {
    pub symbolic: bool,
    pub numeric: bool,
    pub periods: bool,
    pub amplitude: f64,
    pub dt: f64,
    pub horizon: f64,
    pub trajectory_tolerance: f64,
    pub drift_tolerance: f64,
    pub period_tolerance: f64,
}

impl Default for VerifySection {
    fn default() -> Self {
        let o = VerifyOptions::default();
        let t = Tolerances::default();
        VerifySection {
            symbolic: o.symbolic,
            numeric: o.numeric,
            periods: o.periods,
            amplitude: o.amplitude,
            dt: o.dt,
            horizon: o.horizon,
            trajectory_tolerance: t.trajectory,
            drift_tolerance: t.drift,
            period_tolerance: t.period,
        }
    }
}

impl VerifySection {
    pub fn options(&self) -> VerifyOptions {
        VerifyOptions {
            symbolic: self.symbolic,
            numeric: self.numeric,
            periods: self.periods,
            amplitude: self.amplitude,
            dt: self.dt,
            horizon: self.horizon,
        }
    }

    pub fn tolerances(&self) -> Tolerances {
        Tolerances { trajectory: self.trajectory_tolerance, drift: self.drift_tolerance, period: self.period_tolerance }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct PlotSection {
    pub level_sets: bool,
    pub trajectories: bool,
    /// Points per side of the level-set grid.
    pub grid: usize,
    /// The grid covers `[-extent, extent]²`.
    pub extent: f64,
    /// Keep every `stride`-th integration step in trajectory dumps.
    pub stride: usize,
}

impl Default for PlotSection {
    fn default() -> Self {
        PlotSection { level_sets: true, trajectories: true, grid: 101, extent: 0.1, stride: 1 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

#[derive(Clone, Debug, Default, Deserialize, Serialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSection {
    /// File for JSON documents, directory for plot data; stdout when absent.
    pub path: Option<PathBuf>,
    pub format: Option<Format>,
}

impl JobConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let cfg = if path.extension().is_some_and(|e| e == "json") {
            serde_json::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        } else {
            toml::from_str(&text).map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?
        };
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.order < 2 {
            bail!(Failure::Config(format!("order must be at least 2, got {}", self.order)));
        }
        if !(self.verify.amplitude > 0.0) {
            bail!(Failure::Config("amplitude must be positive".into()));
        }
        if !(self.verify.dt > 0.0) {
            bail!(Failure::Config("dt must be positive".into()));
        }
        if !(self.verify.horizon >= 0.0) {
            bail!(Failure::Config("horizon must be nonnegative".into()));
        }
        if self.plot.stride == 0 {
            bail!(Failure::Config("plot stride must be positive".into()));
        }
        Ok(())
    }

    pub fn vars(&self) -> (&str, &str) {
        (&self.variables.0, &self.variables.1)
    }

    fn component(
        &self,
        expr: &Option<String>,
        terms: &Option<Vec<(usize, usize, String)>>,
        name: &str,
    ) -> Result<Series2<Rat>> {
        match (expr, terms) {
            (Some(_), Some(_)) => bail!(Failure::Config(format!("give either {name} or {name}_terms, not both"))),
            (None, None) => bail!(Failure::Config(format!("missing {name}"))),
            (Some(text), None) => {
                let opts = ParseOptions { strict: self.strict_degree, ..ParseOptions::default() };
                let parsed = parse_with(text, self.vars(), self.order, &opts)
                    .map_err(|e| Failure::Parse(format!("{name}: {e}")))?;
                if parsed.dropped_degree {
                    eprintln!("warning: {name} has terms above order {}; they were dropped", self.order);
                }
                Ok(parsed.series)
            }
            (None, Some(table)) => {
                let mut s = Series2::zero(self.order);
                for (i, j, c) in table {
                    let c =
                        parse_rat(c).ok_or_else(|| Failure::Parse(format!("{name}_terms: bad coefficient {c:?}")))?;
                    if i + j > self.order {
                        if self.strict_degree {
                            bail!(Failure::Parse(format!(
                                "{name}_terms: degree {} exceeds order {}",
                                i + j,
                                self.order
                            )));
                        }
                        continue;
                    }
                    s.set(*i, *j, c);
                }
                Ok(s)
            }
        }
    }

    pub fn field(&self) -> Result<PlanarField<Rat>> {
        let p = self.component(&self.p, &self.p_terms, "p")?;
        let q = self.component(&self.q, &self.q_terms, "q")?;
        PlanarField::new(p, q).map_err(|e| Failure::Parse(e.to_string()).into())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_defaults() {
        let cfg: JobConfig = toml::from_str(
            r#"
            p = "v + u*v"
            q = "u + u^2"
            order = 8
            [verify]
            amplitude = 0.02
            "#,
        )
        .unwrap();
        assert_eq!(cfg.order, 8);
        assert_eq!(cfg.verify.amplitude, 0.02);
        assert_eq!(cfg.verify.dt, 1e-3);
        assert_eq!(cfg.plot.grid, 101);
        assert_eq!(cfg.field().unwrap().order(), 8);
    }

    #[test]
    fn coefficient_tables() {
        let cfg: JobConfig =
            serde_json::from_str(r#"{"p_terms": [[0, 1, "1"], [1, 1, "1/2"]], "q_terms": [[1, 0, "-1"]], "order": 4}"#)
                .unwrap();
        let x = cfg.field().unwrap();
        assert_eq!(x.p().coeff(1, 1), revham::scalar::rat(1, 2));
    }

    #[test]
    fn rejects_bad_values() {
        let cfg = JobConfig { order: 1, ..JobConfig::default() };
        assert!(cfg.validate().is_err());
        assert!(toml::from_str::<JobConfig>("bogus = 1").is_err());
    }
}
