//! Config file schema (TOML: `key = value` lines grouped in sections).
//!
//! ```toml
//! [code]
//! constraint_length = 5
//! generators = ["23", "33"]   # octal, leftmost bit = D^0
//!
//! [channel]
//! label = "c"                 # none | a | b | c
//!
//! [frame]
//! info_bits = 252
//! tail = 4
//! puncture = "1110"           # or "none"
//! interleaver = "16x24"
//!
//! [sim]
//! algorithms = ["cod-map", "map-sbvp"]
//! iterations = 4
//! ebn0_db = [0.0, 2.0, 4.0, 6.0]
//! min_bit_errors = 100
//! max_frames = 2000
//! seed = 1
//! decoder = "log-map"         # or "max-log"
//! boxplus = "approx"          # or "exact"
//! sbvp_subtract_input = false
//! ```
//!
//! Every key is optional; missing keys take the defaults shown. A `[run]`
//! table (present in manifests) is ignored.

use anyhow::{anyhow, bail, Context, Result};
use serde::{Deserialize, Serialize};
use toml::{Table, Value};

use teq_core::convcode::CodeSpec;
use teq_core::mapdec::{Algorithm, DecoderAlgo};
use teq_core::sim::{FrameConfig, SimConfig};
use teq_core::BoxPlus;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub code: CodeSection,
    pub channel: ChannelSection,
    pub frame: FrameSection,
    pub sim: SimSection,
    #[serde(skip_serializing)]
    pub run: Option<Table>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeSection {
    pub constraint_length: usize,
    pub generators: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelSection {
    pub label: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FrameSection {
    pub info_bits: usize,
    pub tail: usize,
    pub puncture: String,
    pub interleaver: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimSection {
    pub algorithms: Vec<Algorithm>,
    pub iterations: usize,
    pub ebn0_db: Vec<f64>,
    pub min_bit_errors: u64,
    pub max_frames: u64,
    pub seed: u64,
    pub decoder: DecoderAlgo,
    pub boxplus: BoxPlus,
    pub sbvp_subtract_input: bool,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile::from_sim(&SimConfig::default())
    }
}

impl Default for CodeSection {
    fn default() -> Self {
        ConfigFile::default().code
    }
}

impl Default for ChannelSection {
    fn default() -> Self {
        ConfigFile::default().channel
    }
}

impl Default for FrameSection {
    fn default() -> Self {
        ConfigFile::default().frame
    }
}

impl Default for SimSection {
    fn default() -> Self {
        ConfigFile::default().sim
    }
}

impl ConfigFile {
    pub fn from_sim(cfg: &SimConfig) -> Self {
        ConfigFile {
            code: CodeSection {
                constraint_length: cfg.code.constraint_length(),
                generators: cfg.code.octal(),
            },
            channel: ChannelSection {
                label: cfg.channel.clone(),
            },
            frame: FrameSection {
                info_bits: cfg.frame.info_bits,
                tail: cfg.frame.tail,
                puncture: cfg.frame.puncture.to_string(),
                interleaver: cfg.frame.interleaver.to_string(),
            },
            sim: SimSection {
                algorithms: cfg.algorithms.clone(),
                iterations: cfg.iterations,
                ebn0_db: cfg.ebn0_db.clone(),
                min_bit_errors: cfg.min_bit_errors,
                max_frames: cfg.max_frames,
                seed: cfg.seed,
                decoder: cfg.decoder,
                boxplus: cfg.boxplus,
                sbvp_subtract_input: cfg.sbvp_subtract_input,
            },
            run: None,
        }
    }

    /// Parses config text and applies `section.key=value` overrides on top.
    pub fn parse(text: &str, overrides: &[String]) -> Result<Self> {
        let mut table: Table = text.parse().context("config is not valid TOML")?;
        for ov in overrides {
            apply_override(&mut table, ov)?;
        }
        let cfg: ConfigFile = Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| anyhow!("invalid config: {}", e.message()))?;
        Ok(cfg)
    }

    pub fn to_sim(&self) -> Result<SimConfig> {
        let gens: Vec<&str> = self.code.generators.iter().map(String::as_str).collect();
        let code = CodeSpec::from_octal(self.code.constraint_length, &gens)?;
        let cfg = SimConfig {
            code,
            channel: self.channel.label.clone(),
            algorithms: self.sim.algorithms.clone(),
            iterations: self.sim.iterations,
            frame: FrameConfig {
                info_bits: self.frame.info_bits,
                tail: self.frame.tail,
                puncture: self.frame.puncture.parse()?,
                interleaver: self.frame.interleaver.parse()?,
            },
            ebn0_db: self.sim.ebn0_db.clone(),
            min_bit_errors: self.sim.min_bit_errors,
            max_frames: self.sim.max_frames,
            seed: self.sim.seed,
            decoder: self.sim.decoder,
            boxplus: self.sim.boxplus,
            sbvp_subtract_input: self.sim.sbvp_subtract_input,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Canonical TOML of the resolved settings (no `[run]` table).
    pub fn canonical(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// `sim.iterations=6`, `channel.label=b`, `sim.ebn0_db=[1,2]`.
///
/// The value is read as TOML, falling back to a bare string.
fn apply_override(table: &mut Table, ov: &str) -> Result<()> {
    let (path, raw) = ov
        .split_once('=')
        .ok_or_else(|| anyhow!("override '{ov}' is not of the form section.key=value"))?;
    let (section, key) = path
        .trim()
        .split_once('.')
        .ok_or_else(|| anyhow!("override key '{path}' must be section.key"))?;
    let value = parse_value(raw.trim());
    let entry = table
        .entry(section.to_string())
        .or_insert_with(|| Value::Table(Table::new()));
    match entry {
        Value::Table(t) => {
            t.insert(key.to_string(), value);
            Ok(())
        }
        _ => bail!("'{section}' is not a section"),
    }
}

fn parse_value(raw: &str) -> Value {
    format!("v = {raw}")
        .parse::<Table>()
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| Value::String(raw.to_string()))
}
