use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
pub enum ScoreError {
    #[error("makespans must be positive (got {0})")]
    NonPositive(u32),
}

/// IPC-style score: the best known makespan over this one, in `(0, 1]` when
/// `best` really is a lower bound of `makespan`.
pub fn score(best: u32, makespan: u32) -> Result<f64, ScoreError> {
    if best == 0 {
        return Err(ScoreError::NonPositive(best));
    }
    if makespan == 0 {
        return Err(ScoreError::NonPositive(makespan));
    }
    Ok(f64::from(best) / f64::from(makespan))
}

/// Relative makespan change in percent; positive when `after` is better.
pub fn improvement_delta(before: u32, after: u32) -> Result<f64, ScoreError> {
    if before == 0 {
        return Err(ScoreError::NonPositive(before));
    }
    if after == 0 {
        return Err(ScoreError::NonPositive(after));
    }
    Ok(100.0 * (f64::from(before) - f64::from(after)) / f64::from(before))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn values() {
        assert_eq!(score(5, 5), Ok(1.0));
        assert_eq!(score(5, 10), Ok(0.5));
        assert_eq!(improvement_delta(10, 8), Ok(20.0));
        assert!(improvement_delta(8, 10).unwrap() < 0.0);
        assert!(score(0, 3).is_err());
        assert!(improvement_delta(3, 0).is_err());
    }
}
