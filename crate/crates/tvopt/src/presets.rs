//! Built-in experiment configs.

use crate::{ExperimentConfig, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    /// Time-varying least squares with jumps, five classical methods.
    Fig1,
    /// The first fig1 slice held fixed.
    #[value(name = "fig1-static")]
    Fig1Static,
    /// Network tracking with five decentralized methods.
    Fig6,
    Rpca,
    Ssc,
    Feedback,
}

impl Preset {
    pub const ALL: [Preset; 6] = [
        Preset::Fig1,
        Preset::Fig1Static,
        Preset::Fig6,
        Preset::Rpca,
        Preset::Ssc,
        Preset::Feedback,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Fig1 => "fig1",
            Self::Fig1Static => "fig1-static",
            Self::Fig6 => "fig6",
            Self::Rpca => "rpca",
            Self::Ssc => "ssc",
            Self::Feedback => "feedback",
        }
    }

    pub fn toml(&self) -> &'static str {
        match self {
            Self::Fig1 => include_str!("../presets/fig1.toml"),
            Self::Fig1Static => include_str!("../presets/fig1_static.toml"),
            Self::Fig6 => include_str!("../presets/fig6.toml"),
            Self::Rpca => include_str!("../presets/rpca.toml"),
            Self::Ssc => include_str!("../presets/ssc.toml"),
            Self::Feedback => include_str!("../presets/feedback.toml"),
        }
    }

    pub fn config(&self) -> Result<ExperimentConfig> {
        ExperimentConfig::from_toml(self.toml())
    }
}
