use std::path::Path;

use ppln_core::mode_solver::ProfileShape;
use ppln_core::spdc::ScanAxis;
use ppln_core::{
    DesignRequest, IndexIncrementTable, IndexTreatment, Material, Pairing, Scheme, SellmeierModel,
    SpectrumSettings, WaveguideGeometry,
};
use serde::Deserialize;

use crate::CliError;

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub material: Option<MaterialBlock>,
    pub geometry: Option<GeometryBlock>,
    pub process: Option<ProcessBlock>,
    pub scan: Option<ScanBlock>,
    pub output: Option<OutputBlock>,
    pub sweep: Option<SweepBlock>,
    pub poling: Option<PolingBlock>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialBlock {
    #[serde(default = "default_sellmeier")]
    pub sellmeier: String,
    #[serde(default = "default_temperature")]
    pub temperature_c: f64,
    /// Full coefficient set; overrides `sellmeier` when present.
    pub custom: Option<SellmeierModel>,
    pub increments: Option<IndexIncrementTable>,
}

fn default_sellmeier() -> String {
    "zelmon1997".into()
}

fn default_temperature() -> f64 {
    ppln_core::dispersion::DEFAULT_TEMPERATURE_C
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryBlock {
    pub width_um: f64,
    pub depth_um: f64,
    #[serde(default = "default_length")]
    pub length_cm: f64,
    pub profile: Option<ProfileShape>,
}

fn default_length() -> f64 {
    1.0
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessBlock {
    pub scheme: Scheme,
    pub pump_nm: f64,
    pub signal_1_nm: f64,
    pub signal_2_nm: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanBlock {
    #[serde(default = "default_process")]
    pub process: u8,
    #[serde(default = "default_axis")]
    pub axis: ScanAxis,
    /// Omit to size the window from the estimated bandwidth.
    pub span_nm: Option<f64>,
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default)]
    pub indices: IndexTreatment,
}

fn default_process() -> u8 {
    1
}

fn default_axis() -> ScanAxis {
    ScanAxis::Signal
}

fn default_samples() -> usize {
    SpectrumSettings::default().samples
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// Human-readable report, or delimited text for tabular data.
    Text,
    /// JSON records.
    Records,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputBlock {
    pub format: Option<Format>,
    pub path: Option<String>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepBlock {
    #[serde(default)]
    pub depths_um: Vec<f64>,
    #[serde(default)]
    pub widths_um: Vec<f64>,
    #[serde(default)]
    pub pairing: Pairing,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolingBlock {
    pub period_1_um: Option<f64>,
    pub period_2_um: Option<f64>,
}

fn missing(block: &str, command: &str) -> CliError {
    CliError::Config(format!("missing [{block}] block, required by `{command}`"))
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn material(&self, command: &str) -> Result<Material, CliError> {
        let block = self
            .material
            .as_ref()
            .ok_or_else(|| missing("material", command))?;
        let sellmeier = match &block.custom {
            Some(custom) => custom.clone(),
            None => SellmeierModel::named(&block.sellmeier, block.temperature_c)?,
        };
        let material = Material {
            sellmeier,
            increments: block.increments.clone().unwrap_or_default(),
        };
        material.validate()?;
        Ok(material)
    }

    pub fn geometry(&self, command: &str) -> Result<WaveguideGeometry, CliError> {
        let g = self
            .geometry
            .as_ref()
            .ok_or_else(|| missing("geometry", command))?;
        Ok(WaveguideGeometry::new(g.width_um, g.depth_um, g.length_cm)?)
    }

    pub fn shape(&self) -> Result<ProfileShape, CliError> {
        let shape = self
            .geometry
            .as_ref()
            .and_then(|g| g.profile)
            .unwrap_or_default();
        shape.validate()?;
        Ok(shape)
    }

    pub fn process(&self, command: &str) -> Result<&ProcessBlock, CliError> {
        self.process
            .as_ref()
            .ok_or_else(|| missing("process", command))
    }

    pub fn scan(&self, command: &str) -> Result<&ScanBlock, CliError> {
        self.scan.as_ref().ok_or_else(|| missing("scan", command))
    }

    /// Design request from the geometry, process and (optional) scan blocks.
    pub fn request(&self, command: &str) -> Result<DesignRequest, CliError> {
        let geometry = self.geometry(command)?;
        let p = self.process(command)?;
        let mut spectrum = SpectrumSettings::default();
        if let Some(scan) = &self.scan {
            spectrum.samples = scan.samples;
            spectrum.indices = scan.indices;
        }
        let request = DesignRequest {
            pump_nm: p.pump_nm,
            signal_1_nm: p.signal_1_nm,
            signal_2_nm: p.signal_2_nm,
            scheme: p.scheme,
            geometry,
            spectrum,
        };
        request.validate()?;
        Ok(request)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const FULL: &str = r#"
        [material]
        sellmeier = "zelmon1997"

        [geometry]
        width_um = 10.0
        depth_um = 10.0

        [process]
        scheme = "type0-eee"
        pump_nm = 519.0
        signal_1_nm = 780.0
        signal_2_nm = 775.0
    "#;

    #[test]
    fn parses_minimal_config() {
        let c = RunConfig::parse(FULL).unwrap();
        let r = c.request("design").unwrap();
        assert_eq!(r.scheme, Scheme::Type0Eee);
        assert_eq!(r.geometry.length_cm, 1.0);
        assert_eq!(c.material("design").unwrap(), Material::default());
    }

    #[test]
    fn missing_block_is_named() {
        let c = RunConfig::parse("[material]\n").unwrap();
        match c.geometry("index") {
            Err(CliError::Config(msg)) => assert!(msg.contains("geometry"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_field_reports_location() {
        let err = RunConfig::parse("[geometry]\nwidth_um = 10.0\ndepht_um = 10.0\n").unwrap_err();
        match err {
            CliError::Config(msg) => {
                assert!(msg.contains("depht_um") && msg.contains("line 3"), "{msg}")
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn edwards_lawrence_by_name() {
        let c = RunConfig::parse(
            "[material]\nsellmeier = \"edwards-lawrence1984\"\ntemperature_c = 100.0\n",
        )
        .unwrap();
        let m = c.material("index").unwrap();
        assert_eq!(m.sellmeier.temperature_c, 100.0);
        assert!(RunConfig::parse("[material]\nsellmeier = \"x\"\n")
            .unwrap()
            .material("index")
            .is_err());
    }
}
