//! Circuit selection shared by the subcommands.

use clap::{Args, ValueEnum};
use tcepi::circuit::{
    build_parity, build_popc_restricted, build_popc_tc, build_repeater, build_stack, build_sum_tc,
    Circuit, CircuitError, ParityMode,
};
use tcepi::snn::HardwareProfile;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Kind {
    Parity,
    Popc,
    Sum,
    PopcRestricted,
    Stack,
    Repeater,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Parity => "parity",
            Kind::Popc => "popc",
            Kind::Sum => "sum",
            Kind::PopcRestricted => "popc-restricted",
            Kind::Stack => "stack",
            Kind::Repeater => "repeater",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Even,
    Odd,
}

impl From<Mode> for ParityMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Even => ParityMode::Even,
            Mode::Odd => ParityMode::Odd,
        }
    }
}

/// Shape parameters; each kind reads the ones it needs.
#[derive(Args, Clone, Debug)]
pub struct Shape {
    /// Parity detector mode.
    #[arg(long, value_enum, default_value_t = Mode::Even)]
    pub mode: Mode,
    /// Addend width in bits for `sum`.
    #[arg(short = 'l', long, default_value_t = 4)]
    pub width: usize,
    /// Stored bit pattern for `stack`, first bit first.
    #[arg(long, default_value = "101")]
    pub pattern: String,
    /// Adder-tree arity for `popc-restricted`.
    #[arg(long, default_value_t = 2)]
    pub arity: usize,
}

pub fn parse_bits(s: &str) -> Result<Vec<bool>, String> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(false),
            '1' => Ok(true),
            other => Err(format!("bit string `{s}` contains `{other}`")),
        })
        .collect()
}

pub fn format_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Builds `kind` at `size`: input count for parity and the counters, addend
/// count for `sum`, repetition factor for `repeater`; `stack` ignores it.
pub fn build(kind: Kind, size: usize, shape: &Shape, profile: &HardwareProfile) -> Result<Circuit, CircuitError> {
    match kind {
        Kind::Parity => build_parity(size, shape.mode.into()),
        Kind::Popc => build_popc_tc(size),
        Kind::Sum => build_sum_tc(size, shape.width),
        Kind::PopcRestricted => build_popc_restricted(size, profile, shape.arity),
        Kind::Stack => {
            let pattern = parse_bits(&shape.pattern).map_err(CircuitError::InvalidSize)?;
            build_stack(&pattern, profile)
        }
        Kind::Repeater => build_repeater(size, profile),
    }
}
