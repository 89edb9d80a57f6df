//! JSON, Macaulay2 and plain-text output for complexes and monads.

use std::collections::HashSet;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::coxalg::{CoxBlock, Entry, Field, FreeComplex, Generator, GradedFreeModule, LinearMatrix, RingSpec};
use crate::error::Result;
use crate::monad::Monad;

#[derive(Serialize, Deserialize)]
struct RingJson {
    vars: Vec<String>,
    degrees: Vec<Vec<i64>>,
    blocks: Vec<CoxBlock>,
    #[serde(default)]
    field: Field,
}

#[derive(Serialize, Deserialize)]
struct ComplexJson {
    ring: RingJson,
    terms: Vec<Vec<Generator>>,
    diffs: Vec<Vec<Entry>>,
}

impl From<&FreeComplex> for ComplexJson {
    fn from(c: &FreeComplex) -> Self {
        ComplexJson {
            ring: RingJson {
                vars: c.ring.variable_names.clone(),
                degrees: c.ring.degrees.clone(),
                blocks: c.ring.blocks.clone(),
                field: c.ring.field,
            },
            terms: c.terms.iter().map(|t| t.generators.clone()).collect(),
            diffs: c
                .diffs
                .iter()
                .map(|d| {
                    let mut e = d.entries.clone();
                    e.sort_by_key(|e| (e.col, e.row));
                    e
                })
                .collect(),
        }
    }
}

impl TryFrom<ComplexJson> for FreeComplex {
    type Error = crate::error::Error;

    fn try_from(j: ComplexJson) -> Result<Self> {
        let ring = RingSpec {
            variable_names: j.ring.vars,
            degrees: j.ring.degrees,
            blocks: j.ring.blocks,
            field: j.ring.field,
        };
        let terms: Vec<GradedFreeModule> =
            j.terms.into_iter().map(GradedFreeModule::new).collect::<Result<_>>()?;
        if j.diffs.len() + 1 != terms.len() && !(terms.is_empty() && j.diffs.is_empty()) {
            return Err(crate::error::Error::MalformedComplex(format!(
                "{} terms but {} differentials",
                terms.len(),
                j.diffs.len()
            )));
        }
        let diffs = j
            .diffs
            .into_iter()
            .enumerate()
            .map(|(k, entries)| LinearMatrix { rows: terms[k].rank(), cols: terms[k + 1].rank(), entries })
            .collect();
        FreeComplex::new(ring, terms, diffs)
    }
}

impl Serialize for FreeComplex {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        ComplexJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FreeComplex {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = ComplexJson::deserialize(d)?;
        FreeComplex::try_from(j).map_err(serde::de::Error::custom)
    }
}

pub fn complex_to_json(c: &FreeComplex) -> String {
    serde_json::to_string_pretty(c).expect("complex serializes")
}

pub fn complex_from_json(s: &str) -> Result<FreeComplex> {
    let j: ComplexJson = serde_json::from_str(s)?;
    FreeComplex::try_from(j)
}

#[derive(Serialize)]
struct TagJson<'a> {
    slot: usize,
    r_label: &'a str,
    summand: usize,
    copy: u64,
    z: String,
}

#[derive(Serialize)]
struct MonadJson<'a> {
    sheaf: String,
    complex: &'a FreeComplex,
    provenance: Vec<Vec<TagJson<'a>>>,
}

/// The monad's complex plus, per generator, the R-generator and H⁰ basis element it comes from.
pub fn monad_to_json(m: &Monad) -> String {
    let names = m.variety.variable_names();
    let provenance = m
        .provenance
        .iter()
        .enumerate()
        .map(|(slot, tags)| {
            tags.iter()
                .map(|t| TagJson {
                    slot,
                    r_label: &m.r_labels[slot][t.r_index],
                    summand: t.summand,
                    copy: t.copy,
                    z: t.z.display(names, "*"),
                })
                .collect()
        })
        .collect();
    let j = MonadJson { sheaf: m.sheaf.to_string(), complex: &m.complex, provenance };
    serde_json::to_string_pretty(&j).expect("monad serializes")
}

/// Identifier-safe variable names: primes become a `p` suffix, anything else
/// non-alphanumeric is dropped, clashes fall back to `v<i>`.
pub fn m2_variable_names(names: &[String]) -> Vec<String> {
    let mut used = HashSet::new();
    names
        .iter()
        .enumerate()
        .map(|(i, n)| {
            let mut s: String = n.replace('\'', "p").chars().filter(|c| c.is_ascii_alphanumeric()).collect();
            if s.is_empty() || !s.starts_with(|c: char| c.is_ascii_alphabetic()) || used.contains(&s) {
                s = format!("v{i}");
            }
            used.insert(s.clone());
            s
        })
        .collect()
}

fn m2_degree(d: &[i64]) -> String {
    let parts: Vec<String> = d.iter().map(|x| x.to_string()).collect();
    format!("{{{}}}", parts.join(","))
}

/// A Macaulay2 script defining the ring, the free modules, the differentials
/// and the chain complex, and asserting that consecutive maps compose to zero.
pub fn complex_to_m2(c: &FreeComplex) -> String {
    let names = m2_variable_names(&c.ring.variable_names);
    let field = match c.ring.field {
        Field::Rationals => "QQ".to_string(),
        Field::Prime(p) => format!("ZZ/{p}"),
    };
    let mut out = String::new();
    let degs: Vec<String> = c.ring.degrees.iter().map(|d| m2_degree(d)).collect();
    writeln!(out, "R = {field}[{}, Degrees => {{{}}}];", names.join(","), degs.join(",")).unwrap();
    for (k, t) in c.terms.iter().enumerate() {
        if t.rank() == 0 {
            writeln!(out, "F{k} = R^0;").unwrap();
        } else {
            let d: Vec<String> = t.degrees().map(m2_degree).collect();
            writeln!(out, "F{k} = R^{{{}}};", d.join(",")).unwrap();
        }
    }
    for (k, d) in c.diffs.iter().enumerate() {
        let (src, tgt) = (k + 1, k);
        if d.entries.is_empty() || d.rows == 0 || d.cols == 0 {
            writeln!(out, "d{src} = map(F{tgt}, F{src}, 0);").unwrap();
            continue;
        }
        let rows: Vec<String> = d
            .render(&names)
            .into_iter()
            .map(|row| format!("{{{}}}", row.join(",")))
            .collect();
        writeln!(out, "d{src} = map(F{tgt}, F{src}, {{{}}});", rows.join(",")).unwrap();
    }
    for k in 1..c.diffs.len() {
        writeln!(out, "assert(d{k} * d{} == 0);", k + 1).unwrap();
    }
    if c.diffs.is_empty() {
        writeln!(out, "C = chainComplex{{map(F0, R^0, 0)}};").unwrap();
    } else {
        let ds: Vec<String> = (1..=c.diffs.len()).map(|k| format!("d{k}")).collect();
        writeln!(out, "C = chainComplex{{{}}};", ds.join(",")).unwrap();
    }
    out
}

/// Labels and twists of every term, then each differential as an aligned grid.
pub fn complex_to_text(c: &FreeComplex) -> String {
    let mut out = String::new();
    writeln!(out, "ranks {:?}", c.ranks()).unwrap();
    for (k, t) in c.terms.iter().enumerate() {
        writeln!(out, "\nslot {k}").unwrap();
        for (i, g) in t.generators.iter().enumerate() {
            writeln!(out, "  [{i}] {} {:?}", g.label, g.degree).unwrap();
        }
    }
    for (k, d) in c.diffs.iter().enumerate() {
        writeln!(out, "\nd{}: slot {} -> slot {k}", k + 1, k + 1).unwrap();
        out.push_str(&render_grid(&d.render(&c.ring.variable_names)));
    }
    out
}

/// Right-aligned columns, one line per row.
pub fn render_grid(cells: &[Vec<String>]) -> String {
    let ncols = cells.first().map_or(0, |r| r.len());
    let widths: Vec<usize> =
        (0..ncols).map(|j| cells.iter().map(|r| r[j].chars().count()).max().unwrap_or(1)).collect();
    let mut out = String::new();
    for row in cells {
        let line: Vec<String> = row
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{}{c}", " ".repeat(w - c.chars().count())))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohom::SheafSpec;
    use crate::diagonal::build_r;
    use crate::monad::build_monad;
    use crate::toric::ToricVariety;

    #[test]
    fn json_round_trip() {
        let x = ToricVariety::hirzebruch(2).unwrap();
        let c = build_r(&x).complex;
        let s = complex_to_json(&c);
        let back = complex_from_json(&s).unwrap();
        assert_eq!(back.ranks(), c.ranks());
        assert_eq!(complex_to_json(&back), s);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert!(v["ring"]["vars"].is_array() && v["ring"]["degrees"].is_array());
        assert!(v["diffs"][0][0]["var"].is_number());
    }

    #[test]
    fn json_rejects_inhomogeneous_entries() {
        let x = ToricVariety::hirzebruch(1).unwrap();
        let c = build_r(&x).complex;
        let mut v: serde_json::Value = serde_json::from_str(&complex_to_json(&c)).unwrap();
        v["diffs"][0][0]["var"] = serde_json::json!(null);
        assert!(complex_from_json(&v.to_string()).is_err());
    }

    #[test]
    fn m2_script_shape() {
        let x = ToricVariety::hirzebruch(1).unwrap();
        let s = complex_to_m2(&build_r(&x).complex);
        assert!(s.starts_with("R = QQ[x0,x1,y0,y1,x0p,x1p,y0p,y1p, Degrees => {{1,0,0,0},"));
        assert!(s.contains("F1 = R^{"));
        assert!(s.contains("assert(d1 * d2 == 0);"));
        assert!(s.contains("C = chainComplex{d1,d2};"));
    }

    #[test]
    fn m2_names_are_unique() {
        let names: Vec<String> = ["x0'", "x0p", "1a", "y"].iter().map(|s| s.to_string()).collect();
        assert_eq!(m2_variable_names(&names), vec!["x0p", "v1", "v2", "y"]);
    }

    #[test]
    fn monad_json_has_provenance() {
        let x = ToricVariety::hirzebruch(1).unwrap();
        let m = build_monad(&x, &SheafSpec::line(0, 0)).unwrap();
        let v: serde_json::Value = serde_json::from_str(&monad_to_json(&m)).unwrap();
        assert_eq!(v["provenance"][0].as_array().unwrap().len(), m.complex.terms[0].rank());
        assert_eq!(v["sheaf"], "0,0:1");
    }

    #[test]
    fn text_grid_alignment() {
        let cells = vec![vec!["x0".to_string(), "-y1'".to_string()], vec!["0".to_string(), "0".to_string()]];
        assert_eq!(render_grid(&cells), "x0  -y1'\n 0     0\n");
    }
}
