use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::closed::cohomology_vector;
use crate::error::{Error, Result};
use crate::toric::ToricVariety;
use crate::window::{Degree2, Rect};

/// A finite direct sum ⊕ O(b_i, c_i)^{m_i}.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SheafSpec {
    summands: Vec<Summand>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Summand {
    pub twist: Degree2,
    pub mult: u64,
}

impl SheafSpec {
    pub fn new(summands: Vec<(Degree2, u64)>) -> Result<Self> {
        for &(t, m) in &summands {
            if m == 0 {
                return Err(Error::ZeroMultiplicity(t[0], t[1]));
            }
        }
        Ok(SheafSpec { summands: summands.into_iter().map(|(twist, mult)| Summand { twist, mult }).collect() })
    }

    pub fn empty() -> Self {
        SheafSpec::default()
    }

    pub fn line(b: i64, c: i64) -> Self {
        SheafSpec { summands: vec![Summand { twist: [b, c], mult: 1 }] }
    }

    pub fn summands(&self) -> &[Summand] {
        &self.summands
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn rank(&self) -> u64 {
        self.summands.iter().map(|s| s.mult).sum()
    }

    /// Tensor with O(shift).
    pub fn twisted(&self, shift: Degree2) -> SheafSpec {
        SheafSpec {
            summands: self
                .summands
                .iter()
                .map(|s| Summand { twist: [s.twist[0] + shift[0], s.twist[1] + shift[1]], mult: s.mult })
                .collect(),
        }
    }

    /// Same sheaf with repeated twists merged, sorted by twist.
    pub fn normalized(&self) -> SheafSpec {
        let mut acc: BTreeMap<Degree2, u64> = BTreeMap::new();
        for s in &self.summands {
            *acc.entry(s.twist).or_insert(0) += s.mult;
        }
        SheafSpec { summands: acc.into_iter().map(|(twist, mult)| Summand { twist, mult }).collect() }
    }
}

impl fmt::Display for SheafSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.summands.iter().map(|s| format!("{},{}:{}", s.twist[0], s.twist[1], s.mult)).collect();
        write!(f, "{}", parts.join(";"))
    }
}

/// Parses `b,c:m;b,c:m`; the `:m` part defaults to 1.
impl FromStr for SheafSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut summands = Vec::new();
        for part in s.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (twist, mult) = match part.split_once(':') {
                Some((t, m)) => (t, m.trim().parse::<u64>().map_err(|e| Error::Parse(format!("{part}: {e}")))?),
                None => (part, 1),
            };
            let coords: Vec<i64> = twist
                .split(',')
                .map(|c| c.trim().parse::<i64>())
                .collect::<std::result::Result<_, _>>()
                .map_err(|e| Error::Parse(format!("{part}: {e}")))?;
            let [b, c] = coords[..] else {
                return Err(Error::Parse(format!("{part}: expected a twist b,c")));
            };
            summands.push(([b, c], mult));
        }
        SheafSpec::new(summands)
    }
}

/// γ(F) on a window: `rows[i][p]` is dim H^i(F(k, ℓ)) at the p-th window point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyTable {
    pub window: Rect,
    pub rows: Vec<Vec<u64>>,
}

impl CohomologyTable {
    pub fn zero(dim: usize, window: Rect) -> Self {
        CohomologyTable { window, rows: vec![vec![0; window.len()]; dim + 1] }
    }

    pub fn dim(&self) -> usize {
        self.rows.len().saturating_sub(1)
    }

    fn position(&self, d: Degree2) -> Option<usize> {
        if !self.window.contains(d) {
            return None;
        }
        let width = self.window.k.1 - self.window.k.0 + 1;
        Some(((d[1] - self.window.l.0) * width + (d[0] - self.window.k.0)) as usize)
    }

    pub fn get(&self, i: usize, d: Degree2) -> Option<u64> {
        let p = self.position(d)?;
        self.rows.get(i).map(|row| row[p])
    }

    /// h^0..h^{dim} at one twist.
    pub fn column(&self, d: Degree2) -> Option<Vec<u64>> {
        let p = self.position(d)?;
        Some(self.rows.iter().map(|row| row[p]).collect())
    }

    pub fn add_assign(&mut self, other: &CohomologyTable) {
        assert_eq!(self.window, other.window, "tables on different windows");
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        }
    }

    /// Aligned text, one grid per index; ℓ decreases down the page and k increases across.
    pub fn render_text(&self) -> String {
        let w = self
            .rows
            .iter()
            .flatten()
            .map(|v| v.to_string().len())
            .chain([self.window.k.0.to_string().len(), self.window.k.1.to_string().len()])
            .max()
            .unwrap_or(1);
        let lw = [self.window.l.0, self.window.l.1].iter().map(|v| v.to_string().len()).max().unwrap_or(1);
        let mut out = String::new();
        for (i, _) in self.rows.iter().enumerate() {
            out.push_str(&format!("h^{i}\n"));
            for l in (self.window.l.0..=self.window.l.1).rev() {
                out.push_str(&format!("{l:>lw$} |"));
                for k in self.window.k.0..=self.window.k.1 {
                    let v = self.get(i, [k, l]).unwrap_or(0);
                    let cell = if v == 0 { ".".to_string() } else { v.to_string() };
                    out.push_str(&format!(" {cell:>w$}"));
                }
                out.push('\n');
            }
            out.push_str(&format!("{:>lw$} +", ""));
            out.push_str(&"-".repeat((w + 1) * (self.window.k.1 - self.window.k.0 + 1).max(0) as usize));
            out.push('\n');
            out.push_str(&format!("{:>lw$}  ", ""));
            for k in self.window.k.0..=self.window.k.1 {
                out.push_str(&format!(" {k:>w$}"));
            }
            out.push('\n');
        }
        out
    }
}

#[derive(Serialize, Deserialize)]
struct TableJson {
    window: Rect,
    rows: Vec<BTreeMap<String, u64>>,
}

impl Serialize for CohomologyTable {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let points = self.window.points();
        let rows = self
            .rows
            .iter()
            .map(|row| points.iter().zip(row).map(|(p, &v)| (format!("{},{}", p[0], p[1]), v)).collect())
            .collect();
        TableJson { window: self.window, rows }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CohomologyTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let raw = TableJson::deserialize(d)?;
        let mut t = CohomologyTable::zero(raw.rows.len().saturating_sub(1), raw.window);
        if raw.rows.is_empty() {
            t.rows.clear();
        }
        for (i, row) in raw.rows.iter().enumerate() {
            for (key, &v) in row {
                let parsed: Vec<i64> = key
                    .split(',')
                    .map(|c| c.parse::<i64>())
                    .collect::<std::result::Result<_, _>>()
                    .map_err(D::Error::custom)?;
                let [k, l] = parsed[..] else {
                    return Err(D::Error::custom(format!("bad degree key {key}")));
                };
                let p = t.position([k, l]).ok_or_else(|| D::Error::custom(format!("degree {key} outside window")))?;
                t.rows[i][p] = v;
            }
        }
        Ok(t)
    }
}

/// γ(F) on the window, summing over the summands of F.
pub fn cohomology_table(x: &ToricVariety, f: &SheafSpec, window: Rect) -> CohomologyTable {
    let points = window.points();
    let columns: Vec<Vec<u64>> = points
        .par_iter()
        .map(|&[k, l]| {
            let mut col = vec![0u64; x.dim() + 1];
            for s in f.summands() {
                for (c, h) in col.iter_mut().zip(cohomology_vector(x, [s.twist[0] + k, s.twist[1] + l])) {
                    *c += s.mult * h;
                }
            }
            col
        })
        .collect();
    let mut t = CohomologyTable::zero(x.dim(), window);
    for (p, col) in columns.into_iter().enumerate() {
        for (i, v) in col.into_iter().enumerate() {
            t.rows[i][p] = v;
        }
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn structure_sheaf_on_f1() {
        let x = ToricVariety::hirzebruch(1).unwrap();
        let t = cohomology_table(&x, &SheafSpec::line(0, 0), Rect::square(-1, 1));
        assert_eq!(t.get(0, [0, 0]), Some(1));
        assert_eq!(t.get(0, [1, 1]), Some(5));
        assert_eq!(t.get(1, [-1, 1]), Some(0));
        assert_eq!(t.get(0, [2, 2]), None);
    }

    #[test]
    fn multiplicity_doubles() {
        let x = ToricVariety::hirzebruch(2).unwrap();
        let w = Rect::square(-4, 4);
        let one = cohomology_table(&x, &SheafSpec::line(1, 0), w);
        let two = cohomology_table(&x, &"1,0:2".parse().unwrap(), w);
        for (a, b) in one.rows.iter().flatten().zip(two.rows.iter().flatten()) {
            assert_eq!(2 * a, *b);
        }
    }

    #[test]
    fn empty_sheaf_has_zero_table() {
        let x = ToricVariety::hirzebruch(1).unwrap();
        let t = cohomology_table(&x, &SheafSpec::empty(), Rect::square(-2, 2));
        assert!(t.rows.iter().flatten().all(|&v| v == 0));
    }

    #[test]
    fn sheaf_spec_parsing() {
        let f: SheafSpec = "0,0:1; -1,-2:2".parse().unwrap();
        assert_eq!(f.rank(), 3);
        assert_eq!(f.to_string(), "0,0:1;-1,-2:2");
        assert!("0,0:0".parse::<SheafSpec>().is_err());
        assert!("1".parse::<SheafSpec>().is_err());
        assert_eq!("2,3".parse::<SheafSpec>().unwrap(), SheafSpec::line(2, 3));
    }

    #[test]
    fn json_roundtrip() {
        let x = ToricVariety::new(1, vec![1, 2]).unwrap();
        let t = cohomology_table(&x, &"0,0;1,-3:2".parse().unwrap(), Rect::new((-3, 2), (-4, 1)));
        let s = serde_json::to_string(&t).unwrap();
        let back: CohomologyTable = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
    }

    #[test]
    fn text_grid_shape() {
        let x = ToricVariety::hirzebruch(1).unwrap();
        let t = cohomology_table(&x, &SheafSpec::line(0, 0), Rect::square(-1, 1));
        let text = t.render_text();
        assert!(text.starts_with("h^0\n 1 |  1  3  5\n 0 |  .  1  2\n-1 |  .  .  .\n"), "{text}");
    }
}
