use crate::{Error, Result};

/// Size limits for exhaustive enumeration. Every audit in this crate is
/// exhaustive, so these keep accidental `q^(2d)` blowups out.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Guardrails {
    pub max_q: u32,
    pub max_dim: usize,
    /// Upper bound on the number of elementary steps of a single enumeration.
    pub max_work: u128,
    /// Exceeding a limit only logs a warning.
    pub force: bool,
}

impl Default for Guardrails {
    fn default() -> Self {
        Guardrails {
            max_q: 49,
            max_dim: 4,
            max_work: 100_000_000,
            force: false,
        }
    }
}

impl Guardrails {
    pub fn forced() -> Self {
        Guardrails {
            force: true,
            ..Default::default()
        }
    }

    pub fn check(&self, what: &str, size: u128, limit: u128) -> Result<()> {
        if size <= limit {
            return Ok(());
        }
        if self.force {
            log::warn!("{what}: size {size} exceeds guardrail {limit}, continuing (forced)");
            return Ok(());
        }
        Err(Error::TooLarge {
            what: what.to_string(),
            size,
            limit,
        })
    }

    pub fn check_work(&self, what: &str, work: u128) -> Result<()> {
        self.check(what, work, self.max_work)
    }
}
