//! Number formatting shared by the JSON writers.

use serde::{Serialize, Serializer};

/// An `f64` that serializes with 17 significant digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sig17(pub f64);

impl Serialize for Sig17 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return s.serialize_none();
        }
        let n: serde_json::Number = format!("{:.16e}", self.0)
            .parse()
            .map_err(serde::ser::Error::custom)?;
        n.serialize(s)
    }
}

pub fn sig17_vec(v: &[f64]) -> Vec<Sig17> {
    v.iter().copied().map(Sig17).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits() {
        assert_eq!(
            serde_json::to_string(&Sig17(0.25)).unwrap(),
            "2.5000000000000000e-1"
        );
        let s = serde_json::to_string(&Sig17(0.1)).unwrap();
        assert_eq!(s.parse::<f64>().unwrap(), 0.1);
        assert_eq!(serde_json::to_string(&Sig17(f64::NAN)).unwrap(), "null");
    }
}
