use super::model::{assignment_from_schedule, check, Assignment, Model};
use super::CpError;
use crate::schedule::Schedule;

/// Maps a known-valid schedule onto the model and checks every constraint.
///
/// Any violation means the model and the validator disagree about the
/// schedule, which is a bug; it is reported, never ignored.
pub fn warm_start(model: &Model, schedule: &Schedule) -> Result<Assignment, CpError> {
    let a = assignment_from_schedule(model, schedule)?;
    let violations = check(model, &a);
    if !violations.is_empty() {
        return Err(CpError::Rejected(violations));
    }
    Ok(a)
}
