//! Scenario configuration. Every field has a default, so `{}` is a valid
//! config; unknown keys are rejected.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use maxlip_core::{CubeFamily, Grid};
use serde::{Deserialize, Serialize};

use crate::error::VerifyError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scenario {
    Lemmas,
    Identities,
    Theorem1,
    Theorem2,
    Theorem3,
    Normequiv,
    Counterexamples,
    All,
}

impl Scenario {
    pub const PARTS: [Scenario; 7] = [
        Scenario::Lemmas,
        Scenario::Identities,
        Scenario::Theorem1,
        Scenario::Theorem2,
        Scenario::Theorem3,
        Scenario::Normequiv,
        Scenario::Counterexamples,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Scenario::Lemmas => "lemmas",
            Scenario::Identities => "identities",
            Scenario::Theorem1 => "theorem1",
            Scenario::Theorem2 => "theorem2",
            Scenario::Theorem3 => "theorem3",
            Scenario::Normequiv => "normequiv",
            Scenario::Counterexamples => "counterexamples",
            Scenario::All => "all",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::PARTS
            .into_iter()
            .chain([Scenario::All])
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario {s:?}"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub dim: usize,
    pub cells: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<Vec<f64>>,
    #[serde(default = "one")]
    pub side: f64,
}

impl GridSpec {
    pub fn unit(dim: usize, cells: usize) -> Self {
        GridSpec {
            dim,
            cells,
            origin: None,
            side: 1.0,
        }
    }

    pub fn build(&self) -> Result<Grid, VerifyError> {
        let origin = self.origin.clone().unwrap_or_else(|| vec![0.0; self.dim]);
        Ok(Grid::new(self.dim, self.cells, &origin, self.side)?)
    }

    /// Same box, different resolution.
    pub fn with_cells(&self, cells: usize) -> Self {
        GridSpec { cells, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilySpec {
    #[default]
    Full,
    Dyadic,
}

impl From<FamilySpec> for CubeFamily {
    fn from(f: FamilySpec) -> Self {
        match f {
            FamilySpec::Full => CubeFamily::Full,
            FamilySpec::Dyadic => CubeFamily::DyadicSides,
        }
    }
}

/// Closed-form test functions. Coordinates are absolute positions in the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FunctionSpec {
    Const {
        value: f64,
    },
    /// `offset + sum_i coeffs[i] x_i`; missing coefficients are zero.
    Affine {
        coeffs: Vec<f64>,
        #[serde(default)]
        offset: f64,
    },
    /// `scale |x - center|^gamma`; a one-element center is used on every axis.
    Power {
        #[serde(default)]
        center: Vec<f64>,
        gamma: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `left` for `x_0 < at`, `right` otherwise.
    Step {
        at: f64,
        left: f64,
        right: f64,
    },
    /// `offset + amplitude sin(2 pi freq sum_i x_i + phase)`.
    Sine {
        freq: f64,
        #[serde(default = "one")]
        amplitude: f64,
        #[serde(default)]
        offset: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Independent uniform values in `[lo, hi)` per cell.
    Random {
        seed: u64,
        #[serde(default = "neg_one")]
        lo: f64,
        #[serde(default = "one")]
        hi: f64,
    },
}

/// Exponent specifications. Affine and step profiles run along the first
/// axis, with `t` the position rescaled to `[0, 1]` across the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ExponentSpec {
    Const {
        value: f64,
    },
    /// `from + (to - from) t`.
    Affine {
        from: f64,
        to: f64,
    },
    /// `left` for `t < at`, `right` otherwise.
    Step {
        left: f64,
        right: f64,
        #[serde(default = "half")]
        at: f64,
    },
    /// A GridFunction CSV; only defined on the base grid.
    Csv {
        path: PathBuf,
    },
}

impl ExponentSpec {
    pub fn is_constant(&self) -> bool {
        matches!(self, ExponentSpec::Const { .. })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FunctionBanks {
    /// Symbols `b` for the commutators and Lipschitz functionals.
    pub b: Vec<FunctionSpec>,
    /// Test functions `f`.
    pub f: Vec<FunctionSpec>,
}

impl Default for FunctionBanks {
    fn default() -> Self {
        FunctionBanks {
            b: vec![
                FunctionSpec::Affine {
                    coeffs: vec![1.0],
                    offset: 0.0,
                },
                FunctionSpec::Power {
                    center: vec![0.0],
                    gamma: 0.5,
                    scale: 1.0,
                },
                FunctionSpec::Power {
                    center: vec![0.5],
                    gamma: 0.5,
                    scale: 1.0,
                },
                FunctionSpec::Sine {
                    freq: 1.0,
                    amplitude: 0.5,
                    offset: 0.5,
                    phase: 0.0,
                },
                FunctionSpec::Random {
                    seed: 11,
                    lo: 0.0,
                    hi: 1.0,
                },
            ],
            f: vec![
                FunctionSpec::Const { value: 1.0 },
                FunctionSpec::Step {
                    at: 0.5,
                    left: 2.0,
                    right: -1.0,
                },
                FunctionSpec::Sine {
                    freq: 2.0,
                    amplitude: 1.0,
                    offset: 0.0,
                    phase: 0.3,
                },
                FunctionSpec::Random {
                    seed: 23,
                    lo: -1.0,
                    hi: 1.0,
                },
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub identity_tol: f64,
    pub oracle_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            identity_tol: 1e-9,
            oracle_tol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleConfig {
    pub cells_1d: usize,
    pub cells_2d: usize,
    pub pairs: usize,
    pub alphas: Vec<f64>,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            cells_1d: 32,
            cells_2d: 8,
            pairs: 20,
            alphas: vec![0.25, 0.5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CounterexampleConfig {
    pub cells: usize,
    /// Exponent of `|x - 1/2|^gamma`; must be below `beta`.
    pub gamma: f64,
}

impl Default for CounterexampleConfig {
    fn default() -> Self {
        CounterexampleConfig {
            cells: 256,
            gamma: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormEquivConfig {
    /// Largest allowed max/min spread of a ratio table.
    pub max_variation: f64,
    pub ratio_floor: f64,
    /// Turns spread violations into failures instead of monitored entries.
    pub fail_on_variation: bool,
    /// Splitting ratios `r`, each above `n/(n - beta)`.
    pub split_r: Vec<f64>,
}

impl Default for NormEquivConfig {
    fn default() -> Self {
        NormEquivConfig {
            max_variation: 3.0,
            ratio_floor: 0.01,
            fail_on_variation: false,
            split_r: vec![2.5, 3.0],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeSpec {
    pub start: Vec<usize>,
    pub side: usize,
}

/// Inputs for the `compute` subcommand; indices refer to the banks.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComputeConfig {
    pub f: usize,
    pub b: usize,
    pub exponent: usize,
    /// Fractional order; defaults to `beta`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    /// Local cube; defaults to the whole box.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cube: Option<CubeSpec>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub scenario: Option<Scenario>,
    /// The first grid is the base grid; refinements reuse its box.
    pub grids: Vec<GridSpec>,
    pub beta: f64,
    pub cube_family: FamilySpec,
    /// Above this many cells per axis the Lipschitz tables and norm lower
    /// bounds switch to dyadic side lengths.
    pub dyadic_above: usize,
    pub exponents: Vec<ExponentSpec>,
    pub functions: FunctionBanks,
    pub tolerances: Tolerances,
    pub refinement: Vec<usize>,
    pub seed: u64,
    pub holder_triples: usize,
    pub oracle: OracleConfig,
    pub counterexample: CounterexampleConfig,
    pub normequiv: NormEquivConfig,
    pub compute: ComputeConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            scenario: None,
            grids: vec![GridSpec::unit(1, 64), GridSpec::unit(2, 16)],
            beta: 0.5,
            cube_family: FamilySpec::Full,
            dyadic_above: 64,
            exponents: vec![
                ExponentSpec::Const { value: 2.0 },
                ExponentSpec::Const { value: 4.0 },
                ExponentSpec::Step {
                    left: 2.0,
                    right: 4.0,
                    at: 0.5,
                },
                ExponentSpec::Affine { from: 2.0, to: 3.0 },
            ],
            functions: FunctionBanks::default(),
            tolerances: Tolerances::default(),
            refinement: vec![32, 64, 128],
            seed: 0x5eed,
            holder_triples: 100,
            oracle: OracleConfig::default(),
            counterexample: CounterexampleConfig::default(),
            normequiv: NormEquivConfig::default(),
            compute: ComputeConfig::default(),
        }
    }
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, VerifyError> {
        serde_json::from_str(text).map_err(|e| VerifyError::Config(e.to_string()))
    }

    /// Reads and parses a config file. Read failures are I/O errors; parse
    /// failures are config errors.
    pub fn load(path: &Path) -> Result<Self, VerifyError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| VerifyError::Io(format!("cannot read config {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn base_grid(&self) -> &GridSpec {
        &self.grids[0]
    }

    /// Family used for cube sweeps on a grid with `cells` cells per axis.
    pub fn family_for(&self, cells: usize) -> CubeFamily {
        if cells > self.dyadic_above {
            CubeFamily::DyadicSides
        } else {
            self.cube_family.into()
        }
    }
}

fn one() -> f64 {
    1.0
}

fn neg_one() -> f64 {
    -1.0
}

fn half() -> f64 {
    0.5
}
