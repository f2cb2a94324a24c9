//! Information measures and capacity bounds for `V_A`.

pub mod ba;
pub mod block;
pub mod bracket;
pub mod converse;
pub mod info;
pub mod stability;

pub use ba::{blahut_arimoto, parse_dmc, BaOutcome, DiscreteChannel};
pub use block::{
    achievable_rate, chain_lower_rate, chain_report, check_stationarity, induced_block_channel,
    tail_entropy, BlockChannel, ChainReport, ControlSchedule, InputLaw, RateReport,
    StationarityReport, DEFAULT_BLOCK_BUDGET,
};
pub use bracket::{
    capacity_bracket, chain_block_length, BracketOptions, CandidateRow, CapacityBracket,
    LowerMethod, UpperCertificate, UpperKind,
};
pub use converse::{converse_check, ConverseReport, ConverseTrial};
pub use info::{
    binary_entropy, entropy, information_spectrum, mutual_information, SpectrumSample,
};
pub use stability::{
    spectrum_concentration_demo, stability_schedule, ConcentrationReport, DemoOptions, DemoRow,
    DemoStage, StabilitySchedule, StageRecord,
};

use crate::error::Result;
use crate::fsmc::{build_v, LiftedChannel};
use crate::pfa::{Pfa, FREEZE_SYMBOL, RESET_SYMBOL};

/// The automaton with freeze and reset symbols (adding them unless it
/// already has both) and its channel.
pub fn lift(a: &Pfa) -> Result<(Pfa, LiftedChannel)> {
    let has = |s: &str| a.alphabet().iter().any(|x| x == s);
    let g = if has(FREEZE_SYMBOL) && has(RESET_SYMBOL) {
        a.clone()
    } else {
        a.gamma()?
    };
    let v = build_v(&g)?;
    Ok((g, v))
}
