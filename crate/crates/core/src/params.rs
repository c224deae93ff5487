use crate::error::{CoronaError, Result};

/// Largest value any of the level-dependent powers may reach.
pub const POWER_LIMIT: u64 = i64::MAX as u64;

/// Model parameters: the weight-reinforcement factor and the number of
/// growth iterations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ModelParams {
    delta: u64,
    levels: u32,
}

impl ModelParams {
    /// Validates `delta >= 1` and that `(delta+4)^levels`,
    /// `2 (delta+2)^levels` and `(delta+1)^levels` all fit in 63 bits.
    pub fn new(delta: u64, levels: u32) -> Result<Self> {
        if delta == 0 {
            return Err(CoronaError::InvalidParams(
                "delta must be a positive integer".into(),
            ));
        }
        let fits = |base: u64, factor: u64| -> bool {
            base.checked_pow(levels)
                .and_then(|p| p.checked_mul(factor))
                .is_some_and(|p| p <= POWER_LIMIT)
        };
        let ok = delta
            .checked_add(4)
            .is_some_and(|b| fits(b, 1) && fits(b - 2, 2) && fits(b - 3, 1));
        if !ok {
            return Err(CoronaError::InvalidParams(format!(
                "delta={delta}, levels={levels} exceeds the 63-bit range for (delta+4)^n"
            )));
        }
        Ok(ModelParams { delta, levels })
    }

    pub fn delta(&self) -> u64 {
        self.delta
    }

    pub fn levels(&self) -> u32 {
        self.levels
    }

    /// Same delta, different level. Lower levels are always valid.
    pub fn at_level(&self, levels: u32) -> Result<Self> {
        ModelParams::new(self.delta, levels)
    }
}

pub(crate) fn checked_pow(base: u64, exp: u32, what: &'static str) -> Result<u64> {
    base.checked_pow(exp).ok_or(CoronaError::Overflow(what))
}

pub(crate) fn exact_div(numerator: u128, denominator: u128, what: &'static str) -> Result<u128> {
    if denominator == 0 || !numerator.is_multiple_of(denominator) {
        return Err(CoronaError::InexactDivision {
            what,
            numerator,
            denominator,
        });
    }
    Ok(numerator / denominator)
}

pub(crate) fn to_u64(value: u128, what: &'static str) -> Result<u64> {
    u64::try_from(value).map_err(|_| CoronaError::Overflow(what))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_delta() {
        assert!(matches!(
            ModelParams::new(0, 3),
            Err(CoronaError::InvalidParams(_))
        ));
    }

    #[test]
    fn accepts_small_and_rejects_huge() {
        assert!(ModelParams::new(1, 0).is_ok());
        assert!(ModelParams::new(4, 8).is_ok());
        // 5^27 < 2^63 < 5^28
        assert!(ModelParams::new(1, 27).is_ok());
        assert!(ModelParams::new(1, 28).is_err());
        assert!(ModelParams::new(u64::MAX, 1).is_err());
        assert!(ModelParams::new(u64::MAX - 10, 0).is_ok());
    }

    #[test]
    fn exact_division_reports_remainder() {
        assert_eq!(exact_div(12, 4, "t").unwrap(), 3);
        assert!(matches!(
            exact_div(13, 4, "t"),
            Err(CoronaError::InexactDivision { .. })
        ));
    }
}
