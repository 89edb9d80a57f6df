//! Smooth projective toric varieties of Picard rank 2 in Kleinschmidt normal form,
//! X = P(O ⊕ O(a_1) ⊕ … ⊕ O(a_s)) over P^r, and the Hirzebruch-fibred bundle E over X × X
//! on which the diagonal is cut out by binomials.

use serde::{Deserialize, Serialize};

use crate::coxalg::{CoxBlock, Monomial};
use crate::error::{Error, Result};
use crate::window::Degree2;

/// The pair (r; a_1 ≤ … ≤ a_s) classifying X.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct KleinschmidtData {
    r: usize,
    a: Vec<i64>,
    m: i64,
}

impl KleinschmidtData {
    pub fn new(r: usize, a: Vec<i64>) -> Result<Self> {
        if r < 1 {
            return Err(Error::BaseDimension(r));
        }
        if a.is_empty() {
            return Err(Error::EmptyTwists);
        }
        for (i, &ai) in a.iter().enumerate() {
            if ai < 0 {
                return Err(Error::NegativeTwist { index: i + 1, value: ai });
            }
        }
        for i in 1..a.len() {
            if a[i - 1] > a[i] {
                return Err(Error::UnsortedTwists { index: i });
            }
        }
        let m = a.iter().sum();
        Ok(KleinschmidtData { r, a, m })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn s(&self) -> usize {
        self.a.len()
    }

    /// The twists a_1..a_s.
    pub fn a(&self) -> &[i64] {
        &self.a
    }

    /// a_i with the convention a_0 = 0.
    pub fn twist(&self, i: usize) -> i64 {
        if i == 0 {
            0
        } else {
            self.a[i - 1]
        }
    }

    pub fn a_s(&self) -> i64 {
        *self.a.last().expect("s >= 1")
    }

    pub fn m(&self) -> i64 {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.r + self.a.len()
    }
}

/// X together with its ray matrix P and grading matrix A.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ToricVariety {
    data: KleinschmidtData,
    ray_matrix: Vec<Vec<i64>>,
    grading: Vec<Vec<i64>>,
    variable_names: Vec<String>,
}

/// Builds X from Kleinschmidt data, rejecting anything not in normal form.
pub fn build_variety(r: usize, a: &[i64]) -> Result<ToricVariety> {
    ToricVariety::new(r, a.to_vec())
}

impl ToricVariety {
    pub fn new(r: usize, a: Vec<i64>) -> Result<Self> {
        let data = KleinschmidtData::new(r, a)?;
        Ok(Self::from_data(data))
    }

    pub fn from_data(data: KleinschmidtData) -> Self {
        let r = data.r();
        let s = data.s();
        let n = r + s + 2;
        let ncols = r + s;

        // Rows ρ_0..ρ_r, σ_0..σ_s.
        let mut ray_matrix = vec![vec![0i64; ncols]; n];
        for c in 0..r {
            ray_matrix[0][c] = -1;
        }
        for j in 0..s {
            ray_matrix[0][r + j] = data.a()[j];
        }
        for i in 1..=r {
            ray_matrix[i][i - 1] = 1;
        }
        for j in 0..s {
            ray_matrix[r + 1][r + j] = -1;
        }
        for j in 1..=s {
            ray_matrix[r + 1 + j][r + j - 1] = 1;
        }

        let mut grading = vec![vec![0i64; n]; 2];
        for i in 0..=r {
            grading[0][i] = 1;
        }
        for j in 0..=s {
            grading[0][r + 1 + j] = -data.twist(j);
            grading[1][r + 1 + j] = 1;
        }

        let variable_names = (0..=r)
            .map(|i| format!("x{i}"))
            .chain((0..=s).map(|j| format!("y{j}")))
            .collect();

        ToricVariety {
            data,
            ray_matrix,
            grading,
            variable_names,
        }
    }

    /// The Hirzebruch surface F_a = P(O ⊕ O(a)) over P¹.
    pub fn hirzebruch(a: i64) -> Result<Self> {
        Self::new(1, vec![a])
    }

    /// P^r × P^s.
    pub fn product_of_projective_spaces(r: usize, s: usize) -> Result<Self> {
        Self::new(r, vec![0; s])
    }

    pub fn data(&self) -> &KleinschmidtData {
        &self.data
    }

    pub fn r(&self) -> usize {
        self.data.r()
    }

    pub fn s(&self) -> usize {
        self.data.s()
    }

    pub fn a_s(&self) -> i64 {
        self.data.a_s()
    }

    pub fn m(&self) -> i64 {
        self.data.m()
    }

    pub fn dim(&self) -> usize {
        self.data.dim()
    }

    pub fn ray_matrix(&self) -> &[Vec<i64>] {
        &self.ray_matrix
    }

    pub fn grading(&self) -> &[Vec<i64>] {
        &self.grading
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn num_vars(&self) -> usize {
        self.variable_names.len()
    }

    pub fn var_degree(&self, i: usize) -> Degree2 {
        [self.grading[0][i], self.grading[1][i]]
    }

    /// Index of x_i in the Cox ring.
    pub fn x(&self, i: usize) -> usize {
        i
    }

    /// Index of y_j in the Cox ring.
    pub fn y(&self, j: usize) -> usize {
        self.r() + 1 + j
    }

    pub fn cox_block(&self) -> CoxBlock {
        CoxBlock::kleinschmidt(self.r(), self.data.a().to_vec())
    }

    /// Short human-readable name such as `F_2`, `P1xP1` or `X(2;0,3)`.
    pub fn name(&self) -> String {
        let a = self.data.a();
        if self.r() == 1 && self.s() == 1 && a[0] > 0 {
            format!("F_{}", a[0])
        } else if a.iter().all(|&x| x == 0) {
            format!("P{}xP{}", self.r(), self.s())
        } else {
            let tw: Vec<String> = a.iter().map(|x| x.to_string()).collect();
            format!("X({};{})", self.r(), tw.join(","))
        }
    }
}

/// Componentwise (nef) order on Z²: d1 ≤ d2 iff d2 − d1 is nef.
pub fn nef_le(d1: Degree2, d2: Degree2) -> bool {
    d1[0] <= d2[0] && d1[1] <= d2[1]
}

/// Whether O(k, ℓ) has a nonzero section: ℓ ≥ 0 and k + a_s ℓ ≥ 0.
pub fn is_effective(x: &ToricVariety, d: Degree2) -> bool {
    d[1] >= 0 && d[0] + x.a_s() * d[1] >= 0
}

/// One term of a binomial: coefficient times monomial in the Cox ring of E.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BinomialTerm {
    pub coeff: i64,
    pub monomial: Monomial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Binomial {
    pub terms: [BinomialTerm; 2],
}

impl Binomial {
    /// Degree of each term under `grading` (rows = grading coordinates).
    pub fn term_degrees(&self, grading: &[Vec<i64>]) -> [Vec<i64>; 2] {
        [
            self.terms[0].monomial.degree_under(grading),
            self.terms[1].monomial.degree_under(grading),
        ]
    }
}

/// The toric bundle E → X × X with fibre F_{a_s}.
///
/// Variables are ordered x_0..x_r, y_0..y_s, x'_0..x'_r, y'_0..y'_s, u_0..u_3.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagonalBundle {
    base: ToricVariety,
    ray_matrix: Vec<Vec<i64>>,
    grading: Vec<Vec<i64>>,
    variable_names: Vec<String>,
    alpha: Vec<Binomial>,
    beta: Vec<Binomial>,
}

pub fn build_diagonal_bundle(x: &ToricVariety) -> DiagonalBundle {
    DiagonalBundle::new(x)
}

impl DiagonalBundle {
    pub fn new(x: &ToricVariety) -> Self {
        let r = x.r();
        let s = x.s();
        let n = r + s + 2;
        let d = r + s;
        let a_s = x.a_s();
        let nvars = 2 * n + 4;
        let ncols = 2 * d + 2;
        let p = x.ray_matrix();

        let mut rays = vec![vec![0i64; ncols]; nvars];
        for i in 0..n {
            for c in 0..d {
                rays[i][c] = p[i][c];
                rays[n + i][d + c] = p[i][c];
            }
        }
        // v = e_1 (ρ_0 row), w = e_{r+2} (σ_0 row).
        rays[0][2 * d] = 1;
        rays[r + 1][2 * d + 1] = -1;
        rays[n][2 * d] = -1;
        rays[n + r + 1][2 * d + 1] = 1;
        let u = 2 * n;
        rays[u] = fibre_row(ncols, -1, a_s);
        rays[u + 1] = fibre_row(ncols, 0, 1);
        rays[u + 2] = fibre_row(ncols, 1, 0);
        rays[u + 3] = fibre_row(ncols, 0, -1);

        // (A 0 B; 0 A −B; 0 0 C)
        let a_mat = x.grading();
        let b_mat = [[1, -a_s, 0, 0], [0, 1, 0, 0]];
        let c_mat = [[1, -a_s, 1, 0], [0, 1, 0, 1]];
        let mut grading = vec![vec![0i64; nvars]; 6];
        for row in 0..2 {
            for i in 0..n {
                grading[row][i] = a_mat[row][i];
                grading[2 + row][n + i] = a_mat[row][i];
            }
            for k in 0..4 {
                grading[row][u + k] = b_mat[row][k];
                grading[2 + row][u + k] = -b_mat[row][k];
                grading[4 + row][u + k] = c_mat[row][k];
            }
        }

        let mut variable_names: Vec<String> = x.variable_names().to_vec();
        variable_names.extend(x.variable_names().iter().map(|v| format!("{v}'")));
        variable_names.extend((0..4).map(|k| format!("u{k}")));

        let unit = |idx: usize| {
            let mut e = vec![0u32; nvars];
            e[idx] = 1;
            e
        };
        let alpha = (0..=r)
            .map(|i| {
                let mut t0 = unit(i);
                t0[u + 2] = 1;
                let mut t1 = unit(n + i);
                t1[u] = 1;
                Binomial {
                    terms: [
                        BinomialTerm { coeff: 1, monomial: Monomial::new(t0) },
                        BinomialTerm { coeff: -1, monomial: Monomial::new(t1) },
                    ],
                }
            })
            .collect();
        let beta = (0..=s)
            .map(|j| {
                let aj = x.data().twist(j);
                let mut t0 = unit(r + 1 + j);
                t0[u + 3] = 1;
                let mut t1 = unit(n + r + 1 + j);
                t1[u] = (a_s - aj) as u32;
                t1[u + 1] = 1;
                t1[u + 2] = aj as u32;
                Binomial {
                    terms: [
                        BinomialTerm { coeff: 1, monomial: Monomial::new(t0) },
                        BinomialTerm { coeff: -1, monomial: Monomial::new(t1) },
                    ],
                }
            })
            .collect();

        DiagonalBundle {
            base: x.clone(),
            ray_matrix: rays,
            grading,
            variable_names,
            alpha,
            beta,
        }
    }

    pub fn base(&self) -> &ToricVariety {
        &self.base
    }

    pub fn ray_matrix(&self) -> &[Vec<i64>] {
        &self.ray_matrix
    }

    pub fn grading(&self) -> &[Vec<i64>] {
        &self.grading
    }

    pub fn variable_names(&self) -> &[String] {
        &self.variable_names
    }

    pub fn alpha(&self) -> &[Binomial] {
        &self.alpha
    }

    pub fn beta(&self) -> &[Binomial] {
        &self.beta
    }

    /// Index of u_k among the variables of E.
    pub fn u(&self, k: usize) -> usize {
        2 * (self.base.r() + self.base.s() + 2) + k
    }

    /// Renders a binomial such as `u3*y0 - u0*u1*y0'`.
    pub fn display_binomial(&self, b: &Binomial) -> String {
        // fibre variables first, as in u3*y0
        let u0 = self.u(0);
        let term = |t: &BinomialTerm| {
            let e = t.monomial.exps();
            let rotated: Vec<u32> = e[u0..].iter().chain(&e[..u0]).copied().collect();
            let names: Vec<String> = self.variable_names[u0..].iter().chain(&self.variable_names[..u0]).cloned().collect();
            Monomial::new(rotated).display(&names, "*")
        };
        let sign = if b.terms[1].coeff < 0 { "-" } else { "+" };
        let lead = if b.terms[0].coeff < 0 { "-" } else { "" };
        format!("{lead}{} {sign} {}", term(&b.terms[0]), term(&b.terms[1]))
    }
}

fn fibre_row(ncols: usize, v: i64, w: i64) -> Vec<i64> {
    let mut row = vec![0i64; ncols];
    row[ncols - 2] = v;
    row[ncols - 1] = w;
    row
}

/// Product `grading · rays`; zero exactly when the grading is Gale dual to the rays.
pub fn gale_product(grading: &[Vec<i64>], rays: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let ncols = rays.first().map_or(0, |r| r.len());
    grading
        .iter()
        .map(|g| {
            (0..ncols)
                .map(|c| g.iter().zip(rays).map(|(gi, row)| gi * row[c]).sum())
                .collect()
        })
        .collect()
}
