use serde::{Deserialize, Serialize};

/// Machine-readable violation kinds, shared by scenario validation and the
/// plan consistency checker.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ViolationCode {
    // scenario
    InvalidValue,
    InvalidId,
    CellCountMismatch,
    MobilityMismatch,
    DuplicateId,
    OutOfBounds,
    UnitOnImpassable,
    AnchorImpassable,
    EmptyGeometry,
    EmptyGroup,
    MixedSideGroup,
    DanglingReference,
    CyclicOrder,
    CoaSize,
    AtypicalCoaSize,
    // plan
    CyclicDependency,
    CyclicParent,
    Unscheduled,
    InvertedWindow,
    DoubleBooking,
    DependencyViolated,
    ReleaseViolated,
    NegativeStrength,
    ShortfallViolation,
    ArcDepthExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub path: String,
    pub message: String,
}

impl Violation {
    pub fn new(code: ViolationCode, path: impl Into<String>, message: impl Into<String>) -> Self {
        Self {
            code,
            path: path.into(),
            message: message.into(),
        }
    }
}

impl std::fmt::Display for Violation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} at {}: {}", self.code, self.path, self.message)
    }
}

#[derive(Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Segment<'a> {
    Name(&'a str),
    Index(usize),
}

/// Splits `a.b[3].c` into segments so that indices compare numerically.
fn path_key(path: &str) -> Vec<Segment<'_>> {
    let mut out = Vec::new();
    for part in path.split('.') {
        let mut rest = part;
        if let Some(open) = rest.find('[') {
            out.push(Segment::Name(&rest[..open]));
            rest = &rest[open..];
            while let Some(stripped) = rest.strip_prefix('[') {
                let close = stripped.find(']').unwrap_or(stripped.len());
                match stripped[..close].parse() {
                    Ok(i) => out.push(Segment::Index(i)),
                    Err(_) => out.push(Segment::Name(&stripped[..close])),
                }
                rest = stripped.get(close + 1..).unwrap_or("");
            }
        } else {
            out.push(Segment::Name(rest));
        }
    }
    out
}

/// Orders violations by path (numeric indices), then code, then message.
pub fn sort_violations(v: &mut [Violation]) {
    v.sort_by(|a, b| {
        path_key(&a.path)
            .cmp(&path_key(&b.path))
            .then(a.code.cmp(&b.code))
            .then_with(|| a.message.cmp(&b.message))
    });
}
