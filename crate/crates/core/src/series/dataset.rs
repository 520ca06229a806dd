//! The sixteen length-5 Wilf classes with their known coefficients.

use rug::{Integer, Rational};

use super::tables::{Entry, ENTRIES, HEAD};
use super::ExactSeries;

/// Read-only view over the embedded class data.
#[derive(Clone, Copy, Debug, Default)]
pub struct Dataset;

#[derive(Clone, Debug)]
pub struct ClassInfo {
    /// Class name as `Av(xxxxx)`.
    pub name: String,
    pub pattern: &'static str,
    pub oeis: &'static str,
    pub members: Vec<&'static str>,
}

fn entry_series(e: &Entry) -> ExactSeries {
    let coeffs: Vec<Rational> = HEAD
        .iter()
        .map(|&v| Rational::from(v))
        .chain(e.tail.iter().map(|s| Rational::from(s.parse::<Integer>().expect("embedded integer"))))
        .collect();
    ExactSeries::new(format!("Av({})", e.name), 0, coeffs).expect("non-empty")
}

fn info(e: &Entry) -> ClassInfo {
    ClassInfo {
        name: format!("Av({})", e.name),
        pattern: e.name,
        oeis: e.oeis,
        members: e.members.to_vec(),
    }
}

fn normalize(key: &str) -> String {
    let k = key.trim();
    let k = k.strip_prefix("Av(").and_then(|r| r.strip_suffix(')')).unwrap_or(k);
    k.to_ascii_uppercase()
}

impl Dataset {
    /// Classes in the embedded order (increasing growth rate).
    pub fn classes(&self) -> Vec<ClassInfo> {
        ENTRIES.iter().map(info).collect()
    }

    pub fn all(&self) -> Vec<ExactSeries> {
        ENTRIES.iter().map(entry_series).collect()
    }

    fn find(&self, key: &str) -> Option<&'static Entry> {
        let k = normalize(key);
        ENTRIES
            .iter()
            .find(|e| e.name == k || e.oeis == k || e.members.iter().any(|m| *m == k))
    }

    /// Look up by class name, any member pattern, `Av(...)` form or OEIS id.
    pub fn get(&self, key: &str) -> Option<ExactSeries> {
        self.find(key).map(entry_series)
    }

    pub fn info(&self, key: &str) -> Option<ClassInfo> {
        self.find(key).map(info)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_forms() {
        let d = Dataset;
        assert_eq!(d.all().len(), 16);
        let a = d.get("Av(12453)").unwrap();
        assert_eq!(a.name, "Av(31245)");
        assert_eq!(d.get("a116485").unwrap().name, "Av(31245)");
        assert_eq!(d.get("24153").unwrap().name, "Av(31524)");
        assert!(d.get("12346").is_none());
    }

    #[test]
    fn spot_values() {
        let d = Dataset;
        let s = d.get("43251").unwrap();
        assert_eq!(s.coeff(26).unwrap(), &"41134198972534449502215".parse::<Integer>().unwrap());
        assert_eq!(s.last_index(), 27);
        assert_eq!(d.get("52341").unwrap().last_index(), 23);
        let total: usize = d.classes().iter().map(|c| c.members.len()).sum();
        assert_eq!(total, 120);
    }
}
