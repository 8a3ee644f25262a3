//! Report status, JSON helpers and stable float formatting.

use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Status {
    Pass,
    Indeterminate,
    Fail,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Indeterminate => "indeterminate",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Indeterminate => 2,
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }

    /// Fail dominates indeterminate, which dominates pass.
    pub fn combine(self, o: Status) -> Status {
        self.max(o)
    }
}

/// A float as a JSON number with 17 significant digits; non-finite values
/// become strings.
pub fn fnum(x: f64) -> Value {
    if x.is_finite() {
        let s = format!("{x:.16e}");
        serde_json::from_str(&s).unwrap_or(Value::String(s))
    } else {
        Value::String(format!("{x}"))
    }
}

/// Pretty JSON with a trailing newline. Object keys come out sorted.
pub fn to_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}
