use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{CroError, Result};
use crate::operators::{BoundaryRule, SynthesisRule};

/// The seven optimizer variants.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum Variant {
    AcroBp,
    AcroHp,
    AcroBb,
    CroBp,
    CroHp,
    CroBb,
    CroD,
}

impl Variant {
    pub const ALL: [Variant; 7] = [
        Variant::AcroBp,
        Variant::AcroHp,
        Variant::AcroBb,
        Variant::CroBp,
        Variant::CroHp,
        Variant::CroBb,
        Variant::CroD,
    ];

    pub fn tag(self) -> &'static str {
        match self {
            Variant::AcroBp => "ACRO/BP",
            Variant::AcroHp => "ACRO/HP",
            Variant::AcroBb => "ACRO/BB",
            Variant::CroBp => "CRO/BP",
            Variant::CroHp => "CRO/HP",
            Variant::CroBb => "CRO/BB",
            Variant::CroD => "CRO/D",
        }
    }

    pub fn is_adaptive(self) -> bool {
        matches!(self, Variant::AcroBp | Variant::AcroHp | Variant::AcroBb)
    }

    pub fn boundary_rule(self) -> BoundaryRule {
        match self {
            Variant::AcroHp | Variant::CroHp => BoundaryRule::Hybrid,
            _ => BoundaryRule::Resample,
        }
    }

    pub fn synthesis_rule(self) -> SynthesisRule {
        match self {
            Variant::AcroBb | Variant::CroBb => SynthesisRule::Blx05,
            _ => SynthesisRule::ProbabilisticSelect,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Variant {
    type Err = CroError;

    /// Accepts `ACRO/BP`, `acro-bp`, `acro_bp` and similar spellings.
    fn from_str(s: &str) -> Result<Self> {
        let norm: String = s
            .chars()
            .filter(|c| c.is_ascii_alphanumeric())
            .map(|c| c.to_ascii_uppercase())
            .collect();
        Variant::ALL
            .into_iter()
            .find(|v| v.tag().replace('/', "") == norm)
            .ok_or_else(|| CroError::UnknownAlgorithm(s.to_string()))
    }
}

impl TryFrom<String> for Variant {
    type Error = CroError;

    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Variant> for String {
    fn from(v: Variant) -> String {
        v.tag().to_string()
    }
}

/// Deterministic step decay used by CRO/D.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepDecay {
    /// Evaluations between two decays.
    pub interval: u64,
    pub rate: f64,
}

/// Parameters of the canonical algorithm.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CroParams {
    pub ini_ke: f64,
    pub ini_buffer: f64,
    pub loss_rate: f64,
    pub dec_thres: f64,
    pub syn_thres: f64,
    pub step_size: f64,
    pub decay: Option<StepDecay>,
}

impl Default for CroParams {
    fn default() -> Self {
        CroParams {
            ini_ke: 1e7,
            ini_buffer: 1e5,
            loss_rate: 0.1,
            dec_thres: 1.5e5,
            syn_thres: 10.0,
            step_size: 1.0,
            decay: None,
        }
    }
}

/// Parameters of the adaptive algorithm beyond population size and collision
/// rate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AcroParams {
    pub change_rate: f64,
    #[serde(default)]
    pub update_policy: UpdatePolicy,
}

impl Default for AcroParams {
    fn default() -> Self {
        AcroParams {
            change_rate: 1e-4,
            update_policy: UpdatePolicy::default(),
        }
    }
}

/// Which structures count as updates of the step-size success rule.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum UpdatePolicy {
    /// Every evaluated candidate, whether or not its reaction succeeded.
    /// Updates then advance at one per evaluation.
    #[default]
    EvaluatedCandidates,
    /// Only structures adopted by successful reactions. Far fewer updates
    /// per evaluation, so the window fills late and the step size barely
    /// moves within a 300,000-evaluation budget.
    AdoptedStructures,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum VariantParams {
    Canonical(CroParams),
    Adaptive(AcroParams),
}

/// A fully specified optimizer configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgorithmConfig {
    pub variant: Variant,
    pub ini_pop_size: usize,
    pub coll_rate: f64,
    pub max_fes: u64,
    pub params: VariantParams,
    /// Reactions between two whole-reactor energy ledger checks; 0 disables
    /// the check. Defaults to every reaction in debug builds.
    #[serde(default = "default_ledger_interval")]
    pub ledger_check_interval: u64,
}

pub const DEFAULT_POP_SIZE: usize = 20;
pub const DEFAULT_COLL_RATE: f64 = 0.2;
pub const DEFAULT_MAX_FES: u64 = 300_000;

fn default_ledger_interval() -> u64 {
    if cfg!(debug_assertions) {
        1
    } else {
        1_000
    }
}

impl AlgorithmConfig {
    /// The published default settings for `variant` with the given budget.
    pub fn defaults(variant: Variant, max_fes: u64) -> Self {
        let params = if variant.is_adaptive() {
            VariantParams::Adaptive(AcroParams::default())
        } else {
            VariantParams::Canonical(CroParams {
                decay: (variant == Variant::CroD).then_some(StepDecay {
                    interval: 100,
                    rate: 0.99,
                }),
                ..CroParams::default()
            })
        };
        AlgorithmConfig {
            variant,
            ini_pop_size: DEFAULT_POP_SIZE,
            coll_rate: DEFAULT_COLL_RATE,
            max_fes,
            params,
            ledger_check_interval: default_ledger_interval(),
        }
    }

    pub fn canonical(&self) -> Option<&CroParams> {
        match &self.params {
            VariantParams::Canonical(p) => Some(p),
            VariantParams::Adaptive(_) => None,
        }
    }

    pub fn adaptive(&self) -> Option<&AcroParams> {
        match &self.params {
            VariantParams::Adaptive(p) => Some(p),
            VariantParams::Canonical(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let invalid = |msg: String| Err(CroError::InvalidConfig(msg));
        if self.ini_pop_size == 0 {
            return invalid("ini_pop_size must be positive".into());
        }
        if !(0.0..=1.0).contains(&self.coll_rate) {
            return invalid(format!("coll_rate {} outside [0, 1]", self.coll_rate));
        }
        if self.max_fes < self.ini_pop_size as u64 {
            return invalid(format!(
                "max_fes {} cannot cover the initial population of {}",
                self.max_fes, self.ini_pop_size
            ));
        }
        match (&self.params, self.variant.is_adaptive()) {
            (VariantParams::Adaptive(p), true) => {
                if !(0.0..=1.0).contains(&p.change_rate) {
                    return invalid(format!("change_rate {} outside [0, 1]", p.change_rate));
                }
            }
            (VariantParams::Canonical(p), false) => {
                if !(p.ini_ke >= 0.0 && p.ini_buffer >= 0.0) {
                    return invalid("ini_ke and ini_buffer must be non-negative".into());
                }
                if !(0.0..=1.0).contains(&p.loss_rate) {
                    return invalid(format!("loss_rate {} outside [0, 1]", p.loss_rate));
                }
                if !(p.dec_thres >= 0.0 && p.syn_thres >= 0.0) {
                    return invalid("dec_thres and syn_thres must be non-negative".into());
                }
                if !(p.step_size > 0.0 && p.step_size.is_finite()) {
                    return invalid(format!("step_size {} must be positive", p.step_size));
                }
                match (self.variant == Variant::CroD, p.decay) {
                    (true, Some(d)) => {
                        if d.interval == 0 || !(d.rate > 0.0 && d.rate < 1.0) {
                            return invalid("CRO/D needs interval >= 1 and rate in (0, 1)".into());
                        }
                    }
                    (true, None) => return invalid("CRO/D requires a step decay".into()),
                    (false, Some(_)) => {
                        return invalid(format!("{} does not use a step decay", self.variant))
                    }
                    (false, None) => {}
                }
            }
            _ => {
                return invalid(format!(
                    "parameter set does not match variant {}",
                    self.variant
                ))
            }
        }
        Ok(())
    }
}
