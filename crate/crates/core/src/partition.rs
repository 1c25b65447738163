//! Set partitions of vertex subsets.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::VertexId;

/// Disjoint nonempty vertex sets, each sorted, ordered by minimal vertex.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SetPartition {
    parts: Vec<Vec<VertexId>>,
}

impl SetPartition {
    pub fn new(parts: Vec<Vec<VertexId>>) -> Result<SetPartition> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::with_capacity(parts.len());
        for mut p in parts {
            if p.is_empty() {
                return Err(Error::InvalidPartition("empty part".into()));
            }
            p.sort_unstable();
            for &v in &p {
                if !seen.insert(v) {
                    return Err(Error::InvalidPartition(format!("vertex {v} appears twice")));
                }
            }
            out.push(p);
        }
        out.sort_by_key(|p| p[0]);
        Ok(SetPartition { parts: out })
    }

    pub fn parts(&self) -> &[Vec<VertexId>] {
        &self.parts
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn vertices(&self) -> BTreeSet<VertexId> {
        self.parts.iter().flatten().copied().collect()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.part_of(v).is_some()
    }

    /// Index of the part containing `v`.
    pub fn part_of(&self, v: VertexId) -> Option<usize> {
        self.parts.iter().position(|p| p.contains(&v))
    }

    /// Renames `gone` to `keep` (as when contracting an edge); merges their parts.
    ///
    /// Fails if both vertices lie in different parts.
    pub fn identify(&self, keep: VertexId, gone: VertexId) -> Result<SetPartition> {
        match (self.part_of(keep), self.part_of(gone)) {
            (Some(a), Some(b)) if a != b => {
                Err(Error::InvalidPartition(format!("{keep} and {gone} lie in different parts")))
            }
            _ => {
                let mut parts = self.parts.clone();
                let has_keep = self.contains(keep);
                for p in parts.iter_mut() {
                    if let Some(i) = p.iter().position(|&v| v == gone) {
                        if has_keep {
                            p.remove(i);
                        } else {
                            p[i] = keep;
                        }
                    }
                }
                SetPartition::new(parts)
            }
        }
    }

    /// All partitions of `vs` (Bell-number many).
    pub fn all(vs: &[VertexId]) -> Vec<SetPartition> {
        let mut out = Vec::new();
        let mut blocks: Vec<Vec<VertexId>> = Vec::new();
        fn rec(vs: &[VertexId], blocks: &mut Vec<Vec<VertexId>>, out: &mut Vec<SetPartition>) {
            let Some((&v, rest)) = vs.split_first() else {
                out.push(SetPartition::new(blocks.clone()).unwrap());
                return;
            };
            for i in 0..blocks.len() {
                blocks[i].push(v);
                rec(rest, blocks, out);
                blocks[i].pop();
            }
            blocks.push(vec![v]);
            rec(rest, blocks, out);
            blocks.pop();
        }
        rec(vs, &mut blocks, &mut out);
        out.sort();
        out
    }
}

impl fmt::Display for SetPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.parts {
            write!(f, "{{")?;
            for (i, v) in p.iter().enumerate() {
                if i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{v}")?;
            }
            write!(f, "}}")?;
        }
        Ok(())
    }
}

impl FromStr for SetPartition {
    type Err = Error;

    /// Parses `{1,3}{2}{4,5}`.
    fn from_str(s: &str) -> Result<SetPartition> {
        let bad = |m: &str| Error::InvalidPartition(format!("{m} in '{s}'"));
        let mut parts = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            let body = rest.strip_prefix('{').ok_or_else(|| bad("expected '{'"))?;
            let end = body.find('}').ok_or_else(|| bad("unclosed part"))?;
            let part = body[..end]
                .split(',')
                .map(|t| t.trim().parse::<VertexId>().map_err(|_| bad("bad vertex id")))
                .collect::<Result<Vec<_>>>()?;
            parts.push(part);
            rest = body[end + 1..].trim_start();
        }
        if parts.is_empty() {
            return Err(bad("no parts"));
        }
        SetPartition::new(parts)
    }
}
