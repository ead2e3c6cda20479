//! Serializable verification records shared by the symbolic modules.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

/// One checked identity: a stable id, the expression, the expected value,
/// the computed value and the verdict.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquationCheck {
    #[serde(rename = "equation-id")]
    pub id: String,
    pub lhs: String,
    pub rhs: String,
    pub value: String,
    pub pass: bool,
}

/// All checks for one (series, rank) pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub series: String,
    pub rank: usize,
    pub equations: Vec<EquationCheck>,
    pub pass: bool,
}

impl VerificationReport {
    pub fn new(series: impl Into<String>, rank: usize) -> Self {
        VerificationReport {
            series: series.into(),
            rank,
            equations: Vec::new(),
            pass: true,
        }
    }

    pub fn push(
        &mut self,
        id: &str,
        lhs: impl Into<String>,
        rhs: impl Into<String>,
        value: impl Into<String>,
        pass: bool,
    ) {
        self.pass &= pass;
        self.equations.push(EquationCheck {
            id: id.to_string(),
            lhs: lhs.into(),
            rhs: rhs.into(),
            value: value.into(),
            pass,
        });
    }

    /// Records `computed == expected` for values with a textual form.
    pub fn check_eq<T: PartialEq + fmt::Display>(
        &mut self,
        id: &str,
        lhs: impl Into<String>,
        computed: &T,
        expected: &T,
    ) {
        self.push(
            id,
            lhs,
            expected.to_string(),
            computed.to_string(),
            computed == expected,
        );
    }

    pub fn check_true(&mut self, id: &str, lhs: impl Into<String>, holds: bool) {
        self.push(id, lhs, "true", holds.to_string(), holds);
    }

    pub fn failures(&self) -> impl Iterator<Item = &EquationCheck> {
        self.equations.iter().filter(|e| !e.pass)
    }

    pub fn ids(&self) -> Vec<&str> {
        let mut ids: Vec<&str> = self.equations.iter().map(|e| e.id.as_str()).collect();
        ids.dedup();
        ids
    }
}

/// Non-negative rational kept as an exact reduced fraction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactRatio {
    pub num: u64,
    pub den: u64,
}

impl ExactRatio {
    pub fn new(num: u64, den: u64) -> Self {
        assert!(den != 0, "zero denominator");
        let g = num_integer::gcd(num, den);
        ExactRatio {
            num: num / g,
            den: den / g,
        }
    }

    pub fn to_f64(self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl Ord for ExactRatio {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.num as u128 * other.den as u128).cmp(&(other.num as u128 * self.den as u128))
    }
}

impl PartialOrd for ExactRatio {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for ExactRatio {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_reduces_and_orders_exactly() {
        assert_eq!(ExactRatio::new(4, 6), ExactRatio { num: 2, den: 3 });
        assert!(ExactRatio::new(2, 3) < ExactRatio::new(1, 1));
        assert!(ExactRatio::new(1, 2) <= ExactRatio::new(6, 12));
        assert_eq!(ExactRatio::new(0, 5).to_string(), "0/1");
    }

    #[test]
    fn report_tracks_failures() {
        let mut r = VerificationReport::new("A", 5);
        r.check_eq("x.ok", "1", &1, &1);
        assert!(r.pass);
        r.check_eq("x.bad", "1", &1, &2);
        assert!(!r.pass);
        assert_eq!(r.failures().count(), 1);
        let json = serde_json::to_string(&r.equations[0]).unwrap();
        assert!(json.contains("\"equation-id\":\"x.ok\""));
    }
}
