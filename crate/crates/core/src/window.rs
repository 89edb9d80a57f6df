//! Degree windows: rectangles in Z² and boxes in Z^g.

use serde::{Deserialize, Serialize};

/// A class in Pic X = Z², in the basis (ρ_0, σ_0).
pub type Degree2 = [i64; 2];

/// Inclusive rectangle `[k_lo, k_hi] × [l_lo, l_hi]` in Z².
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub k: (i64, i64),
    pub l: (i64, i64),
}

impl Rect {
    pub fn new(k: (i64, i64), l: (i64, i64)) -> Self {
        Rect { k, l }
    }

    pub fn square(lo: i64, hi: i64) -> Self {
        Rect { k: (lo, hi), l: (lo, hi) }
    }

    pub fn is_empty(&self) -> bool {
        self.k.0 > self.k.1 || self.l.0 > self.l.1
    }

    pub fn contains(&self, d: Degree2) -> bool {
        self.k.0 <= d[0] && d[0] <= self.k.1 && self.l.0 <= d[1] && d[1] <= self.l.1
    }

    pub fn padded(&self, margin: i64) -> Self {
        Rect {
            k: (self.k.0 - margin, self.k.1 + margin),
            l: (self.l.0 - margin, self.l.1 + margin),
        }
    }

    /// Smallest rectangle containing all points; `None` when there are none.
    pub fn bounding<I: IntoIterator<Item = Degree2>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut r = Rect::new((first[0], first[0]), (first[1], first[1]));
        for p in it {
            r.k = (r.k.0.min(p[0]), r.k.1.max(p[0]));
            r.l = (r.l.0.min(p[1]), r.l.1.max(p[1]));
        }
        Some(r)
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            0
        } else {
            ((self.k.1 - self.k.0 + 1) * (self.l.1 - self.l.0 + 1)) as usize
        }
    }

    /// Points in row-major order: `l` outer, `k` inner, both ascending.
    pub fn points(&self) -> Vec<Degree2> {
        let mut out = Vec::with_capacity(self.len());
        if self.is_empty() {
            return out;
        }
        for l in self.l.0..=self.l.1 {
            for k in self.k.0..=self.k.1 {
                out.push([k, l]);
            }
        }
        out
    }
}

/// Inclusive box in Z^g.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeBox {
    pub lo: Vec<i64>,
    pub hi: Vec<i64>,
}

impl DegreeBox {
    pub fn new(lo: Vec<i64>, hi: Vec<i64>) -> Self {
        assert_eq!(lo.len(), hi.len(), "box corners of different rank");
        DegreeBox { lo, hi }
    }

    pub fn bounding<'a, I: IntoIterator<Item = &'a [i64]>>(points: I) -> Option<Self> {
        let mut it = points.into_iter();
        let first = it.next()?;
        let mut lo = first.to_vec();
        let mut hi = first.to_vec();
        for p in it {
            for (i, &x) in p.iter().enumerate() {
                lo[i] = lo[i].min(x);
                hi[i] = hi[i].max(x);
            }
        }
        Some(DegreeBox { lo, hi })
    }

    pub fn padded(&self, margin: i64) -> Self {
        DegreeBox {
            lo: self.lo.iter().map(|x| x - margin).collect(),
            hi: self.hi.iter().map(|x| x + margin).collect(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.lo.iter().zip(&self.hi).any(|(l, h)| l > h)
    }

    pub fn len(&self) -> usize {
        if self.is_empty() {
            return 0;
        }
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l + 1) as usize)
            .product()
    }

    /// All points, last coordinate varying fastest.
    pub fn points(&self) -> Vec<Vec<i64>> {
        let mut out = Vec::with_capacity(self.len());
        if self.is_empty() {
            return out;
        }
        let mut cur = self.lo.clone();
        loop {
            out.push(cur.clone());
            let mut i = cur.len();
            loop {
                if i == 0 {
                    return out;
                }
                i -= 1;
                if cur[i] < self.hi[i] {
                    cur[i] += 1;
                    break;
                }
                cur[i] = self.lo[i];
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rect_points_and_bounds() {
        let r = Rect::square(-1, 1);
        assert_eq!(r.len(), 9);
        assert_eq!(r.points()[0], [-1, -1]);
        assert!(r.contains([0, 1]));
        assert!(!r.contains([2, 0]));
        let b = Rect::bounding([[3, -2], [0, 5]]).unwrap();
        assert_eq!(b, Rect::new((0, 3), (-2, 5)));
        assert!(Rect::new((1, 0), (0, 0)).points().is_empty());
    }

    #[test]
    fn box_points() {
        let b = DegreeBox::new(vec![0, 0, 0], vec![1, 2, 0]);
        let p = b.points();
        assert_eq!(p.len(), 6);
        assert_eq!(p[1], vec![0, 1, 0]);
        assert!(DegreeBox::new(vec![1], vec![0]).points().is_empty());
    }
}
