//! Model constants and the on-disk config file.
//!
//! Every calibration constant lives in one flat [`ModelConfig`]. The config
//! file is JSON with a `constants` section (any subset of the fields, missing
//! ones take the shipped defaults) and optional named physical `presets`.
//! See `CALIBRATION.md` at the repository root for where each default comes
//! from.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::distillation::{ProtocolName, ProtocolSpec, Protocols, SuccessModel};
use crate::error::{Error, Result};
use crate::fib_compile::BraidModel;
use crate::physical::PhysicalParams;
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    // gate budget
    pub kappa: f64,
    pub f_not: f64,
    pub f_cnot: f64,
    pub f_ccnot: f64,
    pub delta_total: f64,
    pub k_a4_per_ccnot: u64,
    pub k_cnot_per_ccnot: u64,

    // |a8> protocol
    pub a8_n_raw: u32,
    pub a8_map_coeff: f64,
    pub a8_map_exponent: f64,
    pub a8_input_cap: f64,
    pub a8_qubits_per_raw: u32,
    pub a8_round_ops_braid: f64,
    pub a8_round_ops_measure: f64,

    // |a4> protocol
    pub a4_n_raw: u32,
    pub a4_map_coeff: f64,
    pub a4_map_exponent: f64,
    pub a4_input_cap: f64,
    pub a4_qubits_per_raw: u32,
    pub a4_ancilla_a8_per_round: u32,
    pub a4_round_ops_braid: f64,
    pub a4_round_ops_measure: f64,

    pub success_model: SuccessModel,
    /// Duration of one measurement in braid time steps.
    pub measurement_steps: f64,

    // gate execution (braids + measurements per gate)
    pub exec_not_braid: f64,
    pub exec_not_measure: f64,
    pub exec_cnot_braid: f64,
    pub exec_cnot_measure: f64,
    pub exec_ccnot_braid: f64,
    pub exec_ccnot_measure: f64,

    // scheduling
    pub qubit_budget_fraction: f64,
    pub interleave_slack: f64,

    // Fibonacci braids
    pub braid_alpha: f64,
    pub braid_amp: f64,
    pub braid_l_max: u32,
    pub sk_c: f64,
    pub sk_len_factor: f64,
    pub braid_mult_not: f64,
    pub braid_mult_cnot: f64,
    pub braid_mult_ccnot: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            kappa: 477.0,
            f_not: 0.1,
            f_cnot: 0.4,
            f_ccnot: 0.5,
            delta_total: 1.0,
            k_a4_per_ccnot: 7,
            k_cnot_per_ccnot: 6,

            a8_n_raw: 6,
            a8_map_coeff: 1.0 / 0.38,
            a8_map_exponent: 2.0,
            a8_input_cap: 0.38,
            a8_qubits_per_raw: 2,
            a8_round_ops_braid: 46_500.0,
            a8_round_ops_measure: 3_500.0,

            a4_n_raw: 15,
            a4_map_coeff: 35.0,
            a4_map_exponent: 3.0,
            a4_input_cap: 0.14,
            a4_qubits_per_raw: 1,
            a4_ancilla_a8_per_round: 36,
            a4_round_ops_braid: 651_000.0,
            a4_round_ops_measure: 49_000.0,

            success_model: SuccessModel::Linear,
            measurement_steps: 1.0,

            exec_not_braid: 2.0,
            exec_not_measure: 0.0,
            exec_cnot_braid: 28.0,
            exec_cnot_measure: 2.0,
            exec_ccnot_braid: 233.0,
            exec_ccnot_measure: 17.0,

            qubit_budget_fraction: 0.75,
            interleave_slack: 0.1,

            braid_alpha: (1e10f64).ln() / 80.0,
            braid_amp: 1.0,
            braid_l_max: 80,
            sk_c: 1.0,
            sk_len_factor: 5.0,
            braid_mult_not: 1.0,
            braid_mult_cnot: 1.0,
            braid_mult_ccnot: 1.0,
        }
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {x}")))
    }
}

fn non_negative(name: &str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must be non-negative, got {x}")))
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, f) in [("f_not", self.f_not), ("f_cnot", self.f_cnot), ("f_ccnot", self.f_ccnot)] {
            if !(0.0..=1.0).contains(&f) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {f}")));
            }
        }
        let sum = self.f_not + self.f_cnot + self.f_ccnot;
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidConfig(format!("gate mix must sum to 1, got {sum}")));
        }
        positive("kappa", self.kappa)?;
        positive("delta_total", self.delta_total)?;
        if self.delta_total > 1.0 {
            return Err(Error::InvalidConfig("delta_total must not exceed 1".into()));
        }
        for (name, x) in [
            ("a8_map_coeff", self.a8_map_coeff),
            ("a8_map_exponent", self.a8_map_exponent),
            ("a8_input_cap", self.a8_input_cap),
            ("a4_map_coeff", self.a4_map_coeff),
            ("a4_map_exponent", self.a4_map_exponent),
            ("a4_input_cap", self.a4_input_cap),
            ("qubit_budget_fraction", self.qubit_budget_fraction),
            ("interleave_slack", self.interleave_slack),
            ("braid_alpha", self.braid_alpha),
            ("braid_amp", self.braid_amp),
            ("sk_c", self.sk_c),
            ("braid_mult_not", self.braid_mult_not),
            ("braid_mult_cnot", self.braid_mult_cnot),
            ("braid_mult_ccnot", self.braid_mult_ccnot),
        ] {
            positive(name, x)?;
        }
        for (name, x) in [
            ("a8_round_ops_braid", self.a8_round_ops_braid),
            ("a8_round_ops_measure", self.a8_round_ops_measure),
            ("a4_round_ops_braid", self.a4_round_ops_braid),
            ("a4_round_ops_measure", self.a4_round_ops_measure),
            ("measurement_steps", self.measurement_steps),
            ("exec_not_braid", self.exec_not_braid),
            ("exec_not_measure", self.exec_not_measure),
            ("exec_cnot_braid", self.exec_cnot_braid),
            ("exec_cnot_measure", self.exec_cnot_measure),
            ("exec_ccnot_braid", self.exec_ccnot_braid),
            ("exec_ccnot_measure", self.exec_ccnot_measure),
        ] {
            non_negative(name, x)?;
        }
        if self.a8_input_cap > 1.0 || self.a4_input_cap > 1.0 {
            return Err(Error::InvalidConfig("input caps are probabilities".into()));
        }
        if self.a8_n_raw < 1 || self.a4_n_raw < 1 {
            return Err(Error::InvalidConfig("fan-in must be at least 1".into()));
        }
        if self.a8_qubits_per_raw < 1 || self.a4_qubits_per_raw < 1 {
            return Err(Error::InvalidConfig("qubits per raw state must be at least 1".into()));
        }
        if self.braid_l_max < 1 {
            return Err(Error::InvalidConfig("braid_l_max must be at least 1".into()));
        }
        if !(self.sk_len_factor > 1.0) {
            return Err(Error::InvalidConfig("sk_len_factor must exceed 1".into()));
        }
        if let SuccessModel::Power { exponent } = self.success_model {
            positive("success_model.exponent", exponent)?;
        }
        Ok(())
    }

    pub fn a8_spec<T: Real>(&self) -> ProtocolSpec<T> {
        ProtocolSpec {
            name: ProtocolName::A8,
            n_raw: self.a8_n_raw,
            map_coeff: T::lit(self.a8_map_coeff),
            map_exponent: T::lit(self.a8_map_exponent),
            input_cap: T::lit(self.a8_input_cap),
            success_model: self.success_model,
            qubits_per_raw: self.a8_qubits_per_raw,
            ancilla_a8_per_round: 0,
            round_ops_braid: T::lit(self.a8_round_ops_braid),
            round_ops_measure: T::lit(self.a8_round_ops_measure),
            measurement_steps: T::lit(self.measurement_steps),
        }
    }

    pub fn a4_spec<T: Real>(&self) -> ProtocolSpec<T> {
        ProtocolSpec {
            name: ProtocolName::A4,
            n_raw: self.a4_n_raw,
            map_coeff: T::lit(self.a4_map_coeff),
            map_exponent: T::lit(self.a4_map_exponent),
            input_cap: T::lit(self.a4_input_cap),
            success_model: self.success_model,
            qubits_per_raw: self.a4_qubits_per_raw,
            ancilla_a8_per_round: self.a4_ancilla_a8_per_round,
            round_ops_braid: T::lit(self.a4_round_ops_braid),
            round_ops_measure: T::lit(self.a4_round_ops_measure),
            measurement_steps: T::lit(self.measurement_steps),
        }
    }

    pub fn protocols<T: Real>(&self) -> Protocols<T> {
        Protocols { a8: self.a8_spec(), a4: self.a4_spec() }
    }

    pub fn braid_model<T: Real>(&self) -> BraidModel<T> {
        BraidModel {
            alpha: T::lit(self.braid_alpha),
            amp: T::lit(self.braid_amp),
            l_max: self.braid_l_max,
            sk_c: T::lit(self.sk_c),
            sk_len_factor: T::lit(self.sk_len_factor),
        }
    }
}

/// Built-in physical parameter sets.
pub fn builtin_presets() -> BTreeMap<String, PhysicalParams<f64>> {
    let mut m = BTreeMap::new();
    m.insert("nu52".to_string(), PhysicalParams::nu52());
    m.insert("nu125".to_string(), PhysicalParams::nu125());
    m
}

/// On-disk config: flat constants plus named physical presets.
///
/// Unknown top-level keys are ignored so run manifests (which carry an extra
/// `manifest` section) can be fed back in as configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigFile {
    #[serde(default)]
    pub constants: ModelConfig,
    #[serde(default = "builtin_presets")]
    pub presets: BTreeMap<String, PhysicalParams<f64>>,
}

impl Default for ConfigFile {
    fn default() -> Self {
        Self { constants: ModelConfig::default(), presets: builtin_presets() }
    }
}

impl ConfigFile {
    pub fn from_json(text: &str) -> Result<Self> {
        let mut cfg: ConfigFile =
            serde_json::from_str(text).map_err(|e| Error::InvalidConfig(e.to_string()))?;
        // presets given in the file extend the built-ins rather than replace them
        for (name, p) in builtin_presets() {
            cfg.presets.entry(name).or_insert(p);
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        self.constants.validate()?;
        for (name, p) in &self.presets {
            p.validate().map_err(|e| Error::InvalidConfig(format!("preset {name}: {e}")))?;
        }
        Ok(())
    }

    pub fn preset(&self, name: &str) -> Result<PhysicalParams<f64>> {
        self.presets
            .get(name)
            .cloned()
            .ok_or_else(|| Error::InvalidConfig(format!("unknown preset {name:?}")))
    }
}
