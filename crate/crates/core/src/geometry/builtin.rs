//! Named model geometries and their JSON description.

use serde::{Deserialize, Serialize};

use super::chart::{ChartGeometry, ConstantSpan, DistributionSpec, FlatTorus, RoundS3, RoundS5, TiltedLine};
use crate::error::{Error, Result};

/// Names accepted by [`builtin_geometry`].
pub const BUILTIN_GEOMETRIES: [&str; 4] = ["flat-torus", "flat-torus-tilted", "hopf-s3", "hopf-s5"];

/// Default amplitude of the tilted torus line field.
pub const DEFAULT_TILT: f64 = 0.3;

/// A chart together with a distribution `F` on it.
pub struct ModelGeometry {
    name: String,
    chart: Box<dyn ChartGeometry>,
    distribution: Box<dyn DistributionSpec>,
}

impl std::fmt::Debug for ModelGeometry {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ModelGeometry")
            .field("name", &self.name)
            .field("chart", &self.chart.name())
            .field("distribution", &self.distribution.name())
            .finish()
    }
}

impl ModelGeometry {
    pub fn new(
        name: impl Into<String>,
        chart: Box<dyn ChartGeometry>,
        distribution: Box<dyn DistributionSpec>,
    ) -> Self {
        ModelGeometry { name: name.into(), chart, distribution }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn chart(&self) -> &dyn ChartGeometry {
        self.chart.as_ref()
    }

    pub fn distribution(&self) -> &dyn DistributionSpec {
        self.distribution.as_ref()
    }

    /// `n = dim D`.
    pub fn n(&self) -> usize {
        self.chart.dim() - self.distribution.rank()
    }

    /// `l = dim F`.
    pub fn l(&self) -> usize {
        self.distribution.rank()
    }
}

fn unknown(name: &str) -> Error {
    Error::UnknownGeometry {
        name: name.to_string(),
        available: BUILTIN_GEOMETRIES.iter().map(|s| s.to_string()).collect(),
    }
}

fn vertical_line() -> ConstantSpan {
    ConstantSpan::new("z", vec![vec![0.0, 0.0, 1.0]])
}

/// Looks up a built-in geometry by name.
pub fn builtin_geometry(name: &str) -> Result<ModelGeometry> {
    Ok(match name {
        "flat-torus" => ModelGeometry::new(name, Box::new(FlatTorus::new(3)), Box::new(vertical_line())),
        "flat-torus-tilted" => {
            ModelGeometry::new(name, Box::new(FlatTorus::new(3)), Box::new(TiltedLine { amplitude: DEFAULT_TILT }))
        }
        "hopf-s3" => ModelGeometry::new(name, Box::new(RoundS3::default()), Box::new(ConstantSpan::hopf(3, 2))),
        "hopf-s5" => ModelGeometry::new(name, Box::new(RoundS5::default()), Box::new(ConstantSpan::hopf(5, 3))),
        _ => return Err(unknown(name)),
    })
}

/// How `F` is specified in a geometry description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase", deny_unknown_fields)]
pub enum SpanSpec {
    /// The distribution that comes with the named geometry.
    Builtin,
    /// Fields with constant coordinate components.
    Constant { vectors: Vec<Vec<f64>> },
    /// The bent line field on the flat 3-torus.
    Tilted { amplitude: f64 },
}

/// `{"metric": "builtin:<name>", "f_span": {...}}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometrySpec {
    pub metric: String,
    #[serde(default = "builtin_span", alias = "F_span")]
    pub f_span: SpanSpec,
}

fn builtin_span() -> SpanSpec {
    SpanSpec::Builtin
}

impl GeometrySpec {
    pub fn build(&self) -> Result<ModelGeometry> {
        let name = self
            .metric
            .strip_prefix("builtin:")
            .ok_or_else(|| Error::validation(format!("metric `{}` must be `builtin:<name>`", self.metric)))?;
        let base = builtin_geometry(name)?;
        let m = base.chart().dim();
        let distribution: Box<dyn DistributionSpec> = match &self.f_span {
            SpanSpec::Builtin => return Ok(base),
            SpanSpec::Constant { vectors } => {
                if vectors.is_empty() || vectors.len() >= m || vectors.iter().any(|v| v.len() != m) {
                    return Err(Error::validation(format!(
                        "constant span needs between 1 and {} vectors of length {m}",
                        m - 1
                    )));
                }
                if vectors.iter().flatten().any(|x| !x.is_finite()) {
                    return Err(Error::validation("span vectors must be finite"));
                }
                Box::new(ConstantSpan::new("constant", vectors.clone()))
            }
            SpanSpec::Tilted { amplitude } => {
                if !name.starts_with("flat-torus") {
                    return Err(Error::validation("the tilted span is defined only on the flat torus"));
                }
                if !amplitude.is_finite() {
                    return Err(Error::validation("tilt amplitude must be finite"));
                }
                Box::new(TiltedLine { amplitude: *amplitude })
            }
        };
        let chart = builtin_geometry(name)?.chart;
        Ok(ModelGeometry::new(format!("{name}+custom"), chart, distribution))
    }
}

/// Parses a geometry description and builds it.
pub fn geometry_from_json(text: &str) -> Result<ModelGeometry> {
    let spec: GeometrySpec = serde_json::from_str(text)?;
    spec.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_builtin_resolves() {
        for name in BUILTIN_GEOMETRIES {
            let g = builtin_geometry(name).unwrap();
            assert_eq!(g.name(), name);
            assert!(g.n() >= 2 && g.l() == 1);
        }
        assert_eq!(builtin_geometry("hopf-s5").unwrap().n(), 4);
    }

    #[test]
    fn unknown_name_lists_choices() {
        let err = builtin_geometry("klein-bottle").unwrap_err();
        let text = err.to_string();
        assert!(text.contains("klein-bottle") && text.contains("hopf-s3"));
    }

    #[test]
    fn json_descriptions() {
        let g = geometry_from_json(r#"{"metric": "builtin:hopf-s3"}"#).unwrap();
        assert_eq!(g.name(), "hopf-s3");
        let g = geometry_from_json(r#"{"metric":"builtin:flat-torus","f_span":{"type":"tilted","amplitude":0.1}}"#)
            .unwrap();
        assert_eq!(g.distribution().name(), "tilted");
        let g = geometry_from_json(
            r#"{"metric":"builtin:hopf-s3","f_span":{"type":"constant","vectors":[[0.0,1.0,2.0]]}}"#,
        )
        .unwrap();
        assert_eq!(g.l(), 1);
        assert!(geometry_from_json(r#"{"metric":"hopf-s3"}"#).is_err());
        assert!(geometry_from_json(r#"{"metric":"builtin:hopf-s3","f_span":{"type":"tilted","amplitude":1}}"#).is_err());
        assert!(geometry_from_json(r#"{"metric":"builtin:nope"}"#).is_err());
        assert!(geometry_from_json(r#"{"metric":"builtin:hopf-s3","f_span":{"type":"constant","vectors":[[1,0]]}}"#)
            .is_err());
    }
}
