use serde::Serialize;

/// Outcome of a decision procedure: whether the property holds and, if not,
/// the first violating input in the checker's deterministic order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Verdict<W> {
    pub holds: bool,
    pub witness: Option<W>,
}

impl<W> Verdict<W> {
    pub fn from_witness(witness: Option<W>) -> Self {
        Verdict { holds: witness.is_none(), witness }
    }

    pub fn pass() -> Self {
        Verdict { holds: true, witness: None }
    }
}
