//! Pointwise algebra of even-degree matrix- and scalar-valued forms on a
//! 2- or 4-dimensional chart, and the invariant polynomials evaluated on
//! curvature.
//!
//! A degree-2 matrix form is stored by its components on the coordinate
//! pairs `(a,b)`, `a < b`, in lexicographic order. Everything of odd degree
//! is eliminated by hand before reaching this module, so elements carry
//! degrees 0, 2 and 4 only, truncated at the chart's top degree.

use std::str::FromStr;

use num_complex::Complex64;

use super::matrix::CMatrix;

/// Coordinate pairs `(a,b)` with `a < b` in lexicographic order.
pub fn coordinate_pairs(dim: usize) -> &'static [(usize, usize)] {
    match dim {
        2 => &[(0, 1)],
        4 => &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        _ => panic!("charts are 2- or 4-dimensional"),
    }
}

/// For each pair index, the complementary pair index and the sign of the
/// permutation `(a,b,c,d) -> (0,1,2,3)`; the building block of every
/// top-degree wedge in dimension 4.
const COMPLEMENT_4D: [(usize, f64); 6] = [
    (5, 1.0),  // (0,1)^(2,3)
    (4, -1.0), // (0,2)^(1,3)
    (3, 1.0),  // (0,3)^(1,2)
    (2, 1.0),  // (1,2)^(0,3)
    (1, -1.0), // (1,3)^(0,2)
    (0, 1.0),  // (2,3)^(0,1)
];

/// Matrix-valued 2-form at a point.
#[derive(Clone, Debug)]
pub struct MatrixTwoForm {
    dim: usize,
    comps: Vec<CMatrix>,
}

impl MatrixTwoForm {
    pub fn new(dim: usize, comps: Vec<CMatrix>) -> Self {
        assert_eq!(comps.len(), coordinate_pairs(dim).len());
        MatrixTwoForm { dim, comps }
    }

    pub fn zeros(dim: usize, size: usize) -> Self {
        let pairs = coordinate_pairs(dim).len();
        MatrixTwoForm {
            dim,
            comps: vec![CMatrix::zeros(size); pairs],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn matrix_size(&self) -> usize {
        self.comps[0].size()
    }

    pub fn component(&self, pair: usize) -> &CMatrix {
        &self.comps[pair]
    }

    pub fn component_mut(&mut self, pair: usize) -> &mut CMatrix {
        &mut self.comps[pair]
    }

    pub fn scale(&self, factor: Complex64) -> MatrixTwoForm {
        MatrixTwoForm {
            dim: self.dim,
            comps: self.comps.iter().map(|c| c.scale(factor)).collect(),
        }
    }

    pub fn add(&self, rhs: &MatrixTwoForm) -> MatrixTwoForm {
        assert_eq!(self.dim, rhs.dim);
        MatrixTwoForm {
            dim: self.dim,
            comps: self
                .comps
                .iter()
                .zip(&rhs.comps)
                .map(|(a, b)| a.add(b))
                .collect(),
        }
    }

    pub fn block_diag(forms: &[&MatrixTwoForm]) -> MatrixTwoForm {
        let dim = forms[0].dim;
        let pairs = coordinate_pairs(dim).len();
        let comps = (0..pairs)
            .map(|p| {
                let blocks: Vec<&CMatrix> = forms.iter().map(|f| f.component(p)).collect();
                CMatrix::block_diag(&blocks)
            })
            .collect();
        MatrixTwoForm { dim, comps }
    }

    /// Top (degree 4) coefficient of `self ^ rhs`; dimension-4 charts only.
    pub fn wedge_top(&self, rhs: &MatrixTwoForm) -> CMatrix {
        assert_eq!(self.dim, 4, "top wedge of two 2-forms needs dimension 4");
        let mut out = CMatrix::zeros(self.matrix_size());
        for (pair, &(complement, sign)) in COMPLEMENT_4D.iter().enumerate() {
            let product = self.comps[pair].mul(&rhs.comps[complement]);
            out = out.add(&product.scale(Complex64::new(sign, 0.0)));
        }
        out
    }

    /// `tr` of the top coefficient of `self ^ rhs` without forming products.
    pub fn wedge_top_trace(&self, rhs: &MatrixTwoForm) -> Complex64 {
        assert_eq!(self.dim, 4);
        let mut sum = Complex64::ZERO;
        for (pair, &(complement, sign)) in COMPLEMENT_4D.iter().enumerate() {
            sum += self.comps[pair].trace_mul(&rhs.comps[complement]) * sign;
        }
        sum
    }
}

/// Top coefficient of `phi ^ psi` for scalar-valued 2-forms given by their
/// pair components; dimension-4 charts.
pub fn scalar_wedge_top(phi: &[f64], psi: &[f64]) -> f64 {
    COMPLEMENT_4D
        .iter()
        .enumerate()
        .map(|(pair, &(complement, sign))| phi[pair] * psi[complement] * sign)
        .sum()
}

/// Scalar element of even degree, truncated above degree 4.
#[derive(Clone, Debug, PartialEq)]
pub struct EvenElement {
    pub d0: Complex64,
    pub d2: Vec<Complex64>,
    pub d4: Complex64,
}

impl EvenElement {
    pub fn zero(dim: usize) -> Self {
        EvenElement {
            d0: Complex64::ZERO,
            d2: vec![Complex64::ZERO; coordinate_pairs(dim).len()],
            d4: Complex64::ZERO,
        }
    }

    pub fn constant(dim: usize, value: Complex64) -> Self {
        let mut e = EvenElement::zero(dim);
        e.d0 = value;
        e
    }

    fn dim(&self) -> usize {
        if self.d2.len() == 1 {
            2
        } else {
            4
        }
    }

    pub fn add(&self, rhs: &EvenElement) -> EvenElement {
        EvenElement {
            d0: self.d0 + rhs.d0,
            d2: self
                .d2
                .iter()
                .zip(&rhs.d2)
                .map(|(a, b)| a + b)
                .collect(),
            d4: self.d4 + rhs.d4,
        }
    }

    pub fn scale(&self, factor: Complex64) -> EvenElement {
        EvenElement {
            d0: self.d0 * factor,
            d2: self.d2.iter().map(|a| a * factor).collect(),
            d4: self.d4 * factor,
        }
    }

    /// Graded (commutative in even degrees) product, truncated at degree 4.
    pub fn mul(&self, rhs: &EvenElement) -> EvenElement {
        let dim = self.dim();
        assert_eq!(dim, rhs.dim());
        let mut out = EvenElement::zero(dim);
        out.d0 = self.d0 * rhs.d0;
        for k in 0..self.d2.len() {
            out.d2[k] = self.d0 * rhs.d2[k] + self.d2[k] * rhs.d0;
        }
        out.d4 = self.d0 * rhs.d4 + self.d4 * rhs.d0;
        if dim == 4 {
            for (pair, &(complement, sign)) in COMPLEMENT_4D.iter().enumerate() {
                out.d4 += self.d2[pair] * rhs.d2[complement] * sign;
            }
        }
        out
    }

    /// Real part of the chart's top-degree coefficient.
    pub fn top(&self, dim: usize) -> f64 {
        match dim {
            2 => self.d2[0].re,
            _ => self.d4.re,
        }
    }
}

/// Determinant over the commutative even algebra by Leibniz expansion;
/// intended for the small matrices of the algebraic identity tests.
pub fn even_det(entries: &[Vec<EvenElement>]) -> EvenElement {
    let n = entries.len();
    let dim = entries[0][0].dim();
    fn go(
        entries: &[Vec<EvenElement>],
        used: &mut Vec<bool>,
        row: usize,
        dim: usize,
    ) -> EvenElement {
        let n = entries.len();
        if row == n {
            return EvenElement::constant(dim, Complex64::ONE);
        }
        let mut acc = EvenElement::zero(dim);
        for col in 0..n {
            if used[col] {
                continue;
            }
            used[col] = true;
            let swaps_before = used[..col].iter().filter(|&&u| u).count();
            let sign = if (col - swaps_before) % 2 == 0 { 1.0 } else { -1.0 };
            let sub = go(entries, used, row + 1, dim);
            acc = acc.add(
                &entries[row][col]
                    .mul(&sub)
                    .scale(Complex64::new(sign, 0.0)),
            );
            used[col] = false;
        }
        acc
    }
    let mut used = vec![false; n];
    go(entries, &mut used, 0, dim)
}

/// Lifts a matrix 2-form into a matrix of scalar even elements (`1 + F` when
/// `with_identity`), for determinant-based identities.
pub fn matrix_form_entries(f: &MatrixTwoForm, with_identity: bool) -> Vec<Vec<EvenElement>> {
    let dim = f.dim();
    let size = f.matrix_size();
    let pairs = coordinate_pairs(dim).len();
    (0..size)
        .map(|i| {
            (0..size)
                .map(|j| {
                    let mut e = EvenElement::zero(dim);
                    if with_identity && i == j {
                        e.d0 = Complex64::ONE;
                    }
                    for p in 0..pairs {
                        e.d2[p] = f.component(p).get(i, j);
                    }
                    e
                })
                .collect()
        })
        .collect()
}

/// Conjugation-invariant polynomial applied to curvature.
#[derive(Clone, Debug, PartialEq)]
pub enum InvariantPolynomial {
    /// `ch_n(A) = tr(A^n) / n!`.
    ChernCharacter(u32),
    /// `det(1 + A)` for realified bundles: degree-2 part cancels, the
    /// degree-4 part is `p_1 = tr(A ^ A)` under this module's sign
    /// convention (anchored to `int ch_1 = -1` on the tautological line).
    TotalPontryagin,
    /// `sum c_k tr(A^k)`.
    TracePowers(Vec<(f64, u32)>),
}

impl InvariantPolynomial {
    /// Plain-matrix evaluation, used for the `p(AB) = p(BA)` spot checks.
    pub fn evaluate_matrix(&self, m: &CMatrix) -> Complex64 {
        match self {
            InvariantPolynomial::ChernCharacter(n) => {
                let mut factorial = 1.0;
                let mut power = CMatrix::identity(m.size());
                for k in 1..=*n {
                    factorial *= f64::from(k);
                    power = power.mul(m);
                }
                power.trace() / factorial
            }
            InvariantPolynomial::TotalPontryagin => CMatrix::identity(m.size()).add(m).det(),
            InvariantPolynomial::TracePowers(terms) => {
                let mut sum = Complex64::ZERO;
                for &(coefficient, power) in terms {
                    let mut acc = CMatrix::identity(m.size());
                    for _ in 0..power {
                        acc = acc.mul(m);
                    }
                    sum += acc.trace() * coefficient;
                }
                sum
            }
        }
    }

    /// Evaluation on a normalized curvature form, yielding a scalar even
    /// form (degrees above the chart dimension vanish on the manifold).
    pub fn evaluate_curvature(&self, f: &MatrixTwoForm, rank: usize) -> EvenElement {
        let dim = f.dim();
        let pairs = coordinate_pairs(dim).len();
        match self {
            InvariantPolynomial::ChernCharacter(0) => {
                EvenElement::constant(dim, Complex64::new(rank as f64, 0.0))
            }
            InvariantPolynomial::ChernCharacter(1) => {
                let mut e = EvenElement::zero(dim);
                for p in 0..pairs {
                    e.d2[p] = f.component(p).trace();
                }
                e
            }
            InvariantPolynomial::ChernCharacter(2) => {
                let mut e = EvenElement::zero(dim);
                if dim == 4 {
                    e.d4 = f.wedge_top_trace(f) * 0.5;
                }
                e
            }
            InvariantPolynomial::ChernCharacter(_) => EvenElement::zero(dim),
            InvariantPolynomial::TotalPontryagin => {
                let mut e = EvenElement::constant(dim, Complex64::ONE);
                if dim == 4 {
                    e.d4 = f.wedge_top_trace(f);
                }
                e
            }
            InvariantPolynomial::TracePowers(terms) => {
                let mut e = EvenElement::zero(dim);
                for &(coefficient, power) in terms {
                    match power {
                        0 => e.d0 += Complex64::new(coefficient * rank as f64, 0.0),
                        1 => {
                            for p in 0..pairs {
                                e.d2[p] += f.component(p).trace() * coefficient;
                            }
                        }
                        2 if dim == 4 => e.d4 += f.wedge_top_trace(f) * coefficient,
                        _ => {}
                    }
                }
                e
            }
        }
    }
}

impl std::fmt::Display for InvariantPolynomial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            InvariantPolynomial::ChernCharacter(n) => write!(f, "ch{n}"),
            InvariantPolynomial::TotalPontryagin => f.write_str("pontryagin"),
            InvariantPolynomial::TracePowers(_) => f.write_str("trace-powers"),
        }
    }
}

impl FromStr for InvariantPolynomial {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        if let Some(rest) = trimmed.strip_prefix("ch") {
            let n: u32 = rest
                .parse()
                .map_err(|_| format!("bad invariant {trimmed:?}"))?;
            return Ok(InvariantPolynomial::ChernCharacter(n));
        }
        match trimmed {
            "pontryagin" | "p" | "p1" => Ok(InvariantPolynomial::TotalPontryagin),
            other => Err(format!(
                "unknown invariant {other:?}; expected chN or pontryagin"
            )),
        }
    }
}
