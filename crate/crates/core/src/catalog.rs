//! Bundled fixture graphs.
//!
//! Fixture files may carry metadata in comment lines: `# terminals v1 v2 v3`,
//! `# rho <polynomial in x, y, z>` and `# left-edges <n>`.

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId};
use crate::io::parse_graph;
use crate::poly::{parse_poly, Poly, Var};

const FIXTURES: &[(&str, &str)] = &[
    ("10_a", include_str!("../../../fixtures/catalog/10_a.g")),
    ("10_b", include_str!("../../../fixtures/catalog/10_b.g")),
    ("2join-w3-w3", include_str!("../../../fixtures/catalog/2join-w3-w3.g")),
    ("2join-w3-w4", include_str!("../../../fixtures/catalog/2join-w3-w4.g")),
    ("5_1", include_str!("../../../fixtures/catalog/5_1.g")),
    ("5_2", include_str!("../../../fixtures/catalog/5_2.g")),
    ("6_1", include_str!("../../../fixtures/catalog/6_1.g")),
    ("6_2", include_str!("../../../fixtures/catalog/6_2.g")),
    ("6_3", include_str!("../../../fixtures/catalog/6_3.g")),
    ("6_4", include_str!("../../../fixtures/catalog/6_4.g")),
    ("6_5", include_str!("../../../fixtures/catalog/6_5.g")),
    ("6_6", include_str!("../../../fixtures/catalog/6_6.g")),
    ("7", include_str!("../../../fixtures/catalog/7.g")),
    ("8_a", include_str!("../../../fixtures/catalog/8_a.g")),
    ("8_b", include_str!("../../../fixtures/catalog/8_b.g")),
    ("8a-8a", include_str!("../../../fixtures/catalog/8a-8a.g")),
    ("8a-8b", include_str!("../../../fixtures/catalog/8a-8b.g")),
    ("8b-8b", include_str!("../../../fixtures/catalog/8b-8b.g")),
    ("9", include_str!("../../../fixtures/catalog/9.g")),
    ("cor-G", include_str!("../../../fixtures/catalog/cor-G.g")),
    ("intro-5loop", include_str!("../../../fixtures/catalog/intro-5loop.g")),
    ("k34", include_str!("../../../fixtures/catalog/k34.g")),
    ("k4", include_str!("../../../fixtures/catalog/k4.g")),
    ("w3", include_str!("../../../fixtures/catalog/w3.g")),
    ("w3-double", include_str!("../../../fixtures/catalog/w3-double.g")),
    ("wtdrop", include_str!("../../../fixtures/catalog/wtdrop.g")),
    ("w4", include_str!("../../../fixtures/catalog/w4.g")),
];

/// Names of the three-vertex-join left sides with a tabulated rho.
pub const RHO_TABLE: &[&str] =
    &["5_1", "5_2", "6_1", "6_2", "6_3", "6_4", "6_5", "6_6", "7", "8_a", "8_b", "9", "10_a", "10_b"];

/// Variable ids used for `x`, `y`, `z` in rho polynomials.
pub const X: Var = 1;
pub const Y: Var = 2;
pub const Z: Var = 3;

/// Maps `x`, `y`, `z` to [`X`], [`Y`], [`Z`].
pub fn xyz_name(s: &str) -> Option<Var> {
    match s {
        "x" => Some(X),
        "y" => Some(Y),
        "z" => Some(Z),
        _ => None,
    }
}

pub fn xyz_display(v: Var) -> String {
    match v {
        X => "x".into(),
        Y => "y".into(),
        Z => "z".into(),
        other => format!("a{other}"),
    }
}

#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: &'static str,
    pub text: &'static str,
}

impl Fixture {
    pub fn graph(&self) -> Graph {
        parse_graph(self.text).expect("bundled fixtures parse")
    }

    fn meta(&self, key: &str) -> Option<&'static str> {
        self.text.lines().find_map(|l| {
            let rest = l.trim().strip_prefix('#')?.trim();
            let val = rest.strip_prefix(key)?;
            val.starts_with(' ').then(|| val.trim())
        })
    }

    pub fn terminals(&self) -> Option<[VertexId; 3]> {
        let vs: Vec<VertexId> = self.meta("terminals")?.split_whitespace().filter_map(|t| t.parse().ok()).collect();
        vs.try_into().ok()
    }

    /// The tabulated rho polynomial, in [`X`], [`Y`], [`Z`].
    pub fn rho(&self) -> Option<Poly> {
        parse_poly(self.meta("rho")?, &xyz_name).ok()
    }

    /// Number of edges on the left of a bundled join; left edges are `1..=n`.
    pub fn left_edges(&self) -> Option<usize> {
        self.meta("left-edges")?.parse().ok()
    }

    /// Whether the labelling was read from an ambiguous drawing.
    pub fn unverified(&self) -> bool {
        self.text.lines().any(|l| l.contains("unverified-labeling"))
    }
}

pub fn all() -> Vec<Fixture> {
    FIXTURES.iter().map(|&(name, text)| Fixture { name, text }).collect()
}

pub fn get(name: &str) -> Result<Fixture> {
    all().into_iter().find(|f| f.name == name).ok_or_else(|| Error::UnknownCatalogEntry(name.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::io::write_graph;

    #[test]
    fn fixtures_parse_and_round_trip() {
        for f in all() {
            let g = f.graph();
            assert!(g.is_connected(), "{}", f.name);
            assert_eq!(parse_graph(&write_graph(&g)).unwrap(), g, "{}", f.name);
        }
    }

    #[test]
    fn rho_table_metadata() {
        for name in RHO_TABLE {
            let f = get(name).unwrap();
            assert_eq!(f.terminals(), Some([1, 2, 3]));
            let rho = f.rho().unwrap();
            assert!(rho.variables().iter().all(|v| [X, Y, Z].contains(v)), "{name}");
        }
        assert_eq!(get("6_6").unwrap().rho(), Some(Poly::one()));
        assert_eq!(get("k34").unwrap().graph().num_edges(), 12);
        assert_eq!(get("cor-G").unwrap().left_edges(), Some(10));
        assert!(get("intro-5loop").unwrap().unverified());
        assert!(get("nope").is_err());
    }
}
