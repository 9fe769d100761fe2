use std::fmt;

use hamwave_core::Error;

/// A terminal error with its process exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub kind: String,
    pub reason: String,
}

impl Failure {
    pub fn invalid(reason: impl Into<String>) -> Self {
        Failure { code: 3, kind: "InvalidParameter".into(), reason: reason.into() }
    }

    pub fn io(reason: impl Into<String>) -> Self {
        Failure { code: 1, kind: "Io".into(), reason: reason.into() }
    }

    pub fn check(reason: impl Into<String>) -> Self {
        Failure { code: 1, kind: "CheckFailed".into(), reason: reason.into() }
    }

    /// The single stderr line scripts can parse.
    pub fn line(&self) -> String {
        format!("error code={} kind={} reason={:?}", self.code, self.kind, self.reason)
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.line())
    }
}

/// 2: numerical failure, 3: bad input, 4: structural check violated, 1: I/O.
pub fn exit_code(e: &Error) -> i32 {
    use Error::*;
    match e {
        NoConvergence { .. } | CollapseToZero { .. } | NewtonStall { .. } | JacobianSingular | ExpansionDiverging { .. } | BlowupDetected { .. } | ResolutionLoss { .. } | AdmissibilityLost { .. } => 2,
        InvalidParameter(_) | ZeroModeRejected { .. } | UnderResolved { .. } | NonZeroMean { .. } | SingularEvaluation { .. } | DegenerateConstraints | ZeroField => 3,
        SpectralConfigViolation { .. } | SymmetryDefect { .. } => 4,
        Io(_) => 1,
    }
}

fn kind(e: &Error) -> String {
    let dbg = format!("{e:?}");
    dbg.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure { code: exit_code(&e), kind: kind(&e), reason: e.to_string() }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::io(e.to_string())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn codes_by_family() {
        assert_eq!(Failure::from(Error::JacobianSingular).code, 2);
        assert_eq!(Failure::from(Error::NonZeroMean { mean: 1.0 }).code, 3);
        let f = Failure::from(Error::SymmetryDefect { defect: 1.0 });
        assert_eq!((f.code, f.kind.as_str()), (4, "SymmetryDefect"));
        assert_eq!(Failure::from(Error::Io("x".into())).code, 1);
    }

    #[test]
    fn line_is_parseable() {
        let l = Failure::invalid("alpha \"bad\"").line();
        assert!(l.starts_with("error code=3 kind=InvalidParameter reason=\""));
    }
}
