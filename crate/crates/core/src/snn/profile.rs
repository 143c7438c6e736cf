//! Hardware implementability limits.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Precision, delay and degree limits a network must respect to be mapped
/// onto a neuromorphic chip.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HardwareProfile {
    /// Signed synaptic weight precision in bits.
    pub s_pr: u32,
    /// Signed current and threshold precision in bits.
    pub n_pr: u32,
    /// Largest synaptic delay in timesteps.
    pub m_delay: u32,
    /// Largest number of synapses into one neuron.
    pub f_in: usize,
    /// Largest number of synapses out of one neuron.
    pub f_out: usize,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ProfileError {
    #[error("weight precision s_pr={0} is below the minimum of 5 bits")]
    WeightPrecision(u32),
    #[error("s_pr={s_pr} exceeds n_pr={n_pr}")]
    PrecisionOrder { s_pr: u32, n_pr: u32 },
    #[error("n_pr={0} exceeds the supported maximum of 62 bits")]
    CurrentPrecision(u32),
    #[error("{0} must be at least 1")]
    Zero(&'static str),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("missing key `{0}`")]
    MissingKey(&'static str),
}

impl HardwareProfile {
    pub fn new(
        s_pr: u32,
        n_pr: u32,
        m_delay: u32,
        f_in: usize,
        f_out: usize,
    ) -> Result<Self, ProfileError> {
        let p = HardwareProfile {
            s_pr,
            n_pr,
            m_delay,
            f_in,
            f_out,
        };
        p.check()?;
        Ok(p)
    }

    pub fn check(&self) -> Result<(), ProfileError> {
        if self.m_delay == 0 {
            return Err(ProfileError::Zero("m_delay"));
        }
        if self.f_in == 0 {
            return Err(ProfileError::Zero("f_in"));
        }
        if self.f_out == 0 {
            return Err(ProfileError::Zero("f_out"));
        }
        if self.s_pr < 5 {
            return Err(ProfileError::WeightPrecision(self.s_pr));
        }
        if self.s_pr > self.n_pr {
            return Err(ProfileError::PrecisionOrder {
                s_pr: self.s_pr,
                n_pr: self.n_pr,
            });
        }
        if self.n_pr > 62 {
            return Err(ProfileError::CurrentPrecision(self.n_pr));
        }
        Ok(())
    }

    /// `2^(S_pr-1)`: weights lie in the signed range `[-bound, bound)`.
    pub fn weight_bound(&self) -> i64 {
        1i64 << (self.s_pr - 1)
    }

    /// `2^(N_pr-1)`: thresholds and biases lie in `[-bound, bound)`, currents in `(-bound, bound)`.
    pub fn current_bound(&self) -> i64 {
        1i64 << (self.n_pr - 1)
    }

    /// Largest input size a restricted population count can accept.
    pub fn popc_capacity(&self) -> usize {
        1usize << (self.s_pr - 2)
    }

    /// Generous limits; every circuit in this crate validates cleanly.
    pub fn unbounded() -> Self {
        HardwareProfile {
            s_pr: 62,
            n_pr: 62,
            m_delay: u32::MAX,
            f_in: usize::MAX,
            f_out: usize::MAX,
        }
    }
}

impl fmt::Display for HardwareProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "s_pr={}", self.s_pr)?;
        writeln!(f, "n_pr={}", self.n_pr)?;
        writeln!(f, "m_delay={}", self.m_delay)?;
        writeln!(f, "f_in={}", self.f_in)?;
        writeln!(f, "f_out={}", self.f_out)
    }
}

impl FromStr for HardwareProfile {
    type Err = ProfileError;

    /// Parses `key=value` lines; blank lines and `#` comments are skipped.
    fn from_str(text: &str) -> Result<Self, Self::Err> {
        let mut fields: [Option<u64>; 5] = [None; 5];
        const KEYS: [&str; 5] = ["s_pr", "n_pr", "m_delay", "f_in", "f_out"];
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let parse_err = |msg: String| ProfileError::Parse { line: i + 1, msg };
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| parse_err(format!("expected key=value, got `{line}`")))?;
            let key = key.trim().to_ascii_lowercase();
            let slot = KEYS
                .iter()
                .position(|k| *k == key)
                .ok_or_else(|| parse_err(format!("unknown key `{key}`")))?;
            let v: u64 = value
                .trim()
                .parse()
                .map_err(|e| parse_err(format!("bad value for {key}: {e}")))?;
            fields[slot] = Some(v);
        }
        let get = |i: usize| fields[i].ok_or(ProfileError::MissingKey(KEYS[i]));
        let p = HardwareProfile {
            s_pr: get(0)? as u32,
            n_pr: get(1)? as u32,
            m_delay: get(2)? as u32,
            f_in: get(3)? as usize,
            f_out: get(4)? as usize,
        };
        p.check()?;
        Ok(p)
    }
}
