//! Named Young functions and the example pairs shipped with the toolkit.

use serde::{Deserialize, Serialize};

use super::{Kind, YoungFunction};
use crate::error::{Error, Result};

pub const CATALOG_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    #[serde(flatten)]
    pub function: YoungFunction,
}

/// A pair `(A, B)` for which the Korn-type inequality `‖∇u‖_B <= C ‖E^D u‖_A` is known to hold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExamplePair {
    pub label: &'static str,
    pub a: &'static str,
    pub b: &'static str,
}

pub const EXAMPLE_PAIRS: &[ExamplePair] = &[
    ExamplePair { label: "L^2 log L, same", a: "L2logL", b: "L2logL" },
    ExamplePair { label: "L^2 (log L)^-1, same", a: "L2/logL", b: "L2/logL" },
    ExamplePair { label: "L log L into L^1", a: "LlogL", b: "L1" },
    ExamplePair { label: "L (log L)^2 into L log L", a: "L(logL)^2", b: "LlogL*" },
    ExamplePair { label: "L^2 log log L, same", a: "L2loglogL", b: "L2loglogL" },
    ExamplePair { label: "L log L log log L into L log log L", a: "LlogLloglogL", b: "LloglogL" },
    ExamplePair { label: "exp L into exp L^1/2", a: "expL", b: "expL^1/2" },
    ExamplePair { label: "exp L^2 into exp L^2/3", a: "expL^2", b: "expL^2/3" },
    ExamplePair { label: "L^inf into exp L", a: "Linf", b: "expL" },
    ExamplePair { label: "exp (log L + log log L)^2 into exp (log L)^2", a: "exp(logL+loglogL)^2", b: "exp(logL)^2" },
];

fn entry(name: &str, kind: Kind) -> (String, YoungFunction) {
    (name.to_string(), YoungFunction::new(kind).unwrap_or_else(|e| panic!("catalog entry {name}: {e}")))
}

/// Every shipped function, in catalog order.
pub fn shipped_functions() -> Vec<(String, YoungFunction)> {
    vec![
        entry("L1", Kind::Power { p: 1.0, coef: 1.0 }),
        entry("L2", Kind::Power { p: 2.0, coef: 1.0 }),
        entry("L3", Kind::Power { p: 3.0, coef: 1.0 }),
        entry("LlogL", Kind::LinearLog),
        entry("LlogL*", Kind::PowerLog { p: 1.0, alpha: 1.0 }),
        entry("L(logL)^2", Kind::PowerLog { p: 1.0, alpha: 2.0 }),
        entry("L2logL", Kind::PowerLog { p: 2.0, alpha: 1.0 }),
        entry("L2/logL", Kind::PowerLog { p: 2.0, alpha: -1.0 }),
        entry("L2loglogL", Kind::PowerLogLog { p: 2.0, alpha: 0.0, gamma: 1.0 }),
        entry("LlogLloglogL", Kind::PowerLogLog { p: 1.0, alpha: 1.0, gamma: 1.0 }),
        entry("LloglogL", Kind::PowerLogLog { p: 1.0, alpha: 0.0, gamma: 1.0 }),
        entry("expL", Kind::ExpPower { beta: 1.0 }),
        entry("expL^1/2", Kind::ExpPower { beta: 0.5 }),
        entry("expL^2", Kind::ExpPower { beta: 2.0 }),
        entry("expL^2/3", Kind::ExpPower { beta: 2.0 / 3.0 }),
        entry("Linf", Kind::Indicator { t1: 1.0 }),
        entry("exp(logL)^2", Kind::ExpLogPower { a: 1.0, beta: 2.0 }),
        entry("exp(logL+loglogL)^2", Kind::ExpLogPowerLog { a: 1.0, beta: 2.0, shift: 1.0 }),
    ]
}

pub fn shipped_catalog() -> Vec<CatalogEntry> {
    shipped_functions().into_iter().map(|(name, function)| CatalogEntry { name, function }).collect()
}

pub fn shipped_catalog_json() -> String {
    serde_json::to_string_pretty(&shipped_catalog()).expect("catalog serializes")
}

/// Parses a JSON array of catalog entries, validating each function.
pub fn load_catalog(json: &str) -> Result<Vec<CatalogEntry>> {
    let entries: Vec<CatalogEntry> = serde_json::from_str(json)?;
    for e in &entries {
        YoungFunction::new(e.function.kind().clone())
            .map_err(|err| Error::InvalidYoung(format!("{}: {err}", e.name)))?;
    }
    Ok(entries)
}

pub fn names() -> Vec<String> {
    shipped_functions().into_iter().map(|(n, _)| n).collect()
}

pub fn lookup(name: &str) -> Result<YoungFunction> {
    shipped_functions()
        .into_iter()
        .find(|(n, _)| n == name)
        .map(|(_, f)| f)
        .ok_or_else(|| Error::UnknownFunction { name: name.to_string(), available: names().join(", ") })
}

/// Resolves a catalog name or an inline JSON function (`{"kind": .., "params": ..}`).
pub fn resolve(name_or_json: &str) -> Result<(String, YoungFunction)> {
    let trimmed = name_or_json.trim();
    if trimmed.starts_with('{') {
        let v: serde_json::Value = serde_json::from_str(trimmed)?;
        let name = v.get("name").and_then(|n| n.as_str()).map(str::to_string);
        let f: YoungFunction = serde_json::from_value(v)?;
        let f = YoungFunction::new(f.kind().clone())?;
        let name = name.unwrap_or_else(|| f.label());
        Ok((name, f))
    } else {
        Ok((trimmed.to_string(), lookup(trimmed)?))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_round_trip() {
        let json = shipped_catalog_json();
        let back = load_catalog(&json).unwrap();
        assert_eq!(back, shipped_catalog());
    }

    #[test]
    fn entry_format() {
        let v: serde_json::Value = serde_json::to_value(&shipped_catalog()[3]).unwrap();
        assert_eq!(v["name"], "LlogL");
        assert_eq!(v["kind"], "LinearLog");
        let p: CatalogEntry = serde_json::from_str(r#"{"name":"sq","kind":"Power","params":{"p":2}}"#).unwrap();
        assert_eq!(p.function.eval(3.0), 9.0);
    }

    #[test]
    fn example_pairs_resolve() {
        for pair in EXAMPLE_PAIRS {
            lookup(pair.a).unwrap();
            lookup(pair.b).unwrap();
        }
    }

    #[test]
    fn unknown_name_lists_catalog() {
        match lookup("nope") {
            Err(Error::UnknownFunction { available, .. }) => assert!(available.contains("L2")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn inline_json_resolves() {
        let (name, f) = resolve(r#"{"kind":"ExpPower","params":{"beta":1}}"#).unwrap();
        assert!(name.contains("exp"));
        assert!((f.eval(1.0) - (1f64.exp() - 1.0)).abs() < 1e-15);
    }
}
