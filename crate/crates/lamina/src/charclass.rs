//! Exact characteristic-class algebra for products of even complex
//! projective spaces.
//!
//! The cohomology ring of `CP^{m_1} x ... x CP^{m_r}` is modeled as a
//! truncated polynomial ring over exact rationals: one degree-2 generator
//! `g_i` per factor with `g_i^{m_i+1} = 0`. Total Pontryagin classes come
//! from the classical stable splitting `p(CP^m) = (1+g^2)^{m+1}`, Pontryagin
//! numbers from the coefficient of the top monomial, and the partition-
//! indexed matrix `A = (p_beta(M_alpha))` is inverted exactly to express any
//! rational vector of target numbers as a signed, measure-weighted
//! combination of the model manifolds.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::cobordism::Sign;
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CharClassError {
    #[error("partition parts must be strictly positive")]
    ZeroPart,
    #[error("malformed partition string {0:?}")]
    MalformedPartition(String),
    #[error("malformed projective product {0:?}: expected e.g. \"CP4xCP2\" with even exponents")]
    MalformedProduct(String),
    #[error("dimension mismatch: manifold has 4n = {manifold_dim} but partition weighs {partition_weight}")]
    DimensionMismatch {
        manifold_dim: u32,
        partition_weight: u32,
    },
    #[error("target vector has {found} entries but there are {expected} partitions")]
    TargetLength { expected: usize, found: usize },
    #[error("unknown partition key {0:?} in target")]
    UnknownPartition(String),
    #[error("ensemble weights must be positive, found {0}")]
    NonPositiveWeight(String),
    #[error("the Pontryagin matrix for n = {0} is singular; this contradicts its nonsingularity and indicates an internal arithmetic bug")]
    SingularMatrix(u32),
    #[error("solve round-trip failed at partition {0}; internal arithmetic bug")]
    RoundTripMismatch(String),
}

/// Integer partition in canonical descending order, e.g. `2+1`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Partition(Vec<u32>);

impl Partition {
    pub fn new(mut parts: Vec<u32>) -> Result<Self, CharClassError> {
        if parts.iter().any(|&p| p == 0) {
            return Err(CharClassError::ZeroPart);
        }
        parts.sort_unstable_by(|a, b| b.cmp(a));
        Ok(Partition(parts))
    }

    pub fn empty() -> Self {
        Partition(Vec::new())
    }

    pub fn parts(&self) -> &[u32] {
        &self.0
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.0.iter().map(u32::to_string).collect();
        f.write_str(&parts.join("+"))
    }
}

impl FromStr for Partition {
    type Err = CharClassError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        if trimmed == "0" || trimmed.is_empty() {
            return Ok(Partition::empty());
        }
        let parts: Result<Vec<u32>, _> = trimmed.split('+').map(|p| p.trim().parse()).collect();
        let parts = parts.map_err(|_| CharClassError::MalformedPartition(s.to_owned()))?;
        Partition::new(parts)
    }
}

impl Serialize for Partition {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Partition {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// All partitions of `n` in reverse-lexicographic order: `n` itself first,
/// all-ones last.
pub fn partitions(n: u32) -> Vec<Partition> {
    fn emit(remaining: u32, max_part: u32, stack: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if remaining == 0 {
            out.push(Partition(stack.clone()));
            return;
        }
        for part in (1..=remaining.min(max_part)).rev() {
            stack.push(part);
            emit(remaining - part, part, stack, out);
            stack.pop();
        }
    }
    let mut out = Vec::new();
    emit(n, n.max(1), &mut Vec::new(), &mut out);
    out
}

/// Product of even-dimensional complex projective spaces, one factor
/// `CP^{2k}` per part `k` of a partition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct ProjectiveProduct {
    factors: Vec<u32>,
}

impl ProjectiveProduct {
    /// Factors are complex dimensions; each must be even and positive.
    pub fn new(mut factors: Vec<u32>) -> Result<Self, CharClassError> {
        if factors.iter().any(|&m| m == 0 || m % 2 != 0) {
            return Err(CharClassError::MalformedProduct(format!("{factors:?}")));
        }
        factors.sort_unstable_by(|a, b| b.cmp(a));
        Ok(ProjectiveProduct { factors })
    }

    pub fn from_partition(alpha: &Partition) -> Self {
        ProjectiveProduct {
            factors: alpha.parts().iter().map(|k| 2 * k).collect(),
        }
    }

    /// Complex dimensions of the factors, descending.
    pub fn factors(&self) -> &[u32] {
        &self.factors
    }

    /// The `n` with `dim_R = 4n`.
    pub fn weight(&self) -> u32 {
        self.factors.iter().map(|m| m / 2).sum()
    }

    pub fn real_dimension(&self) -> u32 {
        2 * self.factors.iter().sum::<u32>()
    }
}

impl fmt::Display for ProjectiveProduct {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return f.write_str("pt");
        }
        let parts: Vec<String> = self.factors.iter().map(|m| format!("CP{m}")).collect();
        f.write_str(&parts.join("x"))
    }
}

impl FromStr for ProjectiveProduct {
    type Err = CharClassError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let trimmed = s.trim();
        if trimmed == "pt" {
            return ProjectiveProduct::new(Vec::new());
        }
        let mut factors = Vec::new();
        for piece in trimmed.split('x') {
            let rest = piece
                .trim()
                .strip_prefix("CP")
                .ok_or_else(|| CharClassError::MalformedProduct(s.to_owned()))?;
            let m: u32 = rest
                .parse()
                .map_err(|_| CharClassError::MalformedProduct(s.to_owned()))?;
            factors.push(m);
        }
        ProjectiveProduct::new(factors).map_err(|_| CharClassError::MalformedProduct(s.to_owned()))
    }
}

impl Serialize for ProjectiveProduct {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for ProjectiveProduct {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(de::Error::custom)
    }
}

/// Element of the truncated ring `Q[g_1..g_r] / (g_i^{caps_i + 1})`, with
/// `g_i` of degree 2. Keys are exponent vectors, values nonzero rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CohomologyClass {
    caps: Vec<u32>,
    terms: BTreeMap<Vec<u32>, Scalar>,
}

impl CohomologyClass {
    pub fn zero(caps: Vec<u32>) -> Self {
        CohomologyClass {
            caps,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(caps: Vec<u32>) -> Self {
        let exponents = vec![0; caps.len()];
        let mut terms = BTreeMap::new();
        terms.insert(exponents, Scalar::one());
        CohomologyClass { caps, terms }
    }

    pub fn generator(caps: Vec<u32>, index: usize) -> Self {
        assert!(index < caps.len(), "generator index out of range");
        let mut exponents = vec![0; caps.len()];
        exponents[index] = 1;
        let mut class = CohomologyClass::zero(caps);
        class.insert(exponents, Scalar::one());
        class
    }

    pub fn caps(&self) -> &[u32] {
        &self.caps
    }

    pub fn terms(&self) -> &BTreeMap<Vec<u32>, Scalar> {
        &self.terms
    }

    pub fn coefficient(&self, exponents: &[u32]) -> Scalar {
        self.terms.get(exponents).cloned().unwrap_or_else(Scalar::zero)
    }

    fn insert(&mut self, exponents: Vec<u32>, coefficient: Scalar) {
        if coefficient.is_zero() {
            return;
        }
        if exponents
            .iter()
            .zip(&self.caps)
            .any(|(e, cap)| e > cap)
        {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(exponents) {
            Entry::Vacant(slot) => {
                slot.insert(coefficient);
            }
            Entry::Occupied(mut slot) => {
                let sum = slot.get().clone() + coefficient;
                if sum.is_zero() {
                    slot.remove();
                } else {
                    slot.insert(sum);
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &CohomologyClass) -> CohomologyClass {
        assert_eq!(self.caps, other.caps, "mismatched rings");
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.insert(e.clone(), c.clone());
        }
        out
    }

    pub fn scale(&self, factor: &Scalar) -> CohomologyClass {
        if factor.is_zero() {
            return CohomologyClass::zero(self.caps.clone());
        }
        CohomologyClass {
            caps: self.caps.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.clone() * factor.clone()))
                .collect(),
        }
    }

    pub fn mul(&self, other: &CohomologyClass) -> CohomologyClass {
        assert_eq!(self.caps, other.caps, "mismatched rings");
        let mut out = CohomologyClass::zero(self.caps.clone());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let exponents: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.insert(exponents, ca.clone() * cb.clone());
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> CohomologyClass {
        let mut out = CohomologyClass::one(self.caps.clone());
        for _ in 0..exp {
            out = out.mul(self);
        }
        out
    }

    /// Part of cohomological degree `2 * half_degree` (each generator has
    /// degree 2, so a monomial's half-degree is the exponent sum).
    pub fn component(&self, half_degree: u32) -> CohomologyClass {
        CohomologyClass {
            caps: self.caps.clone(),
            terms: self
                .terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == half_degree)
                .map(|(e, c)| (e.clone(), c.clone()))
                .collect(),
        }
    }

    /// Coefficient of the top monomial `prod g_i^{caps_i}`; evaluation
    /// against the fundamental class.
    pub fn top_coefficient(&self) -> Scalar {
        self.coefficient(&self.caps.clone())
    }

    /// Joins two classes over different factor lists into the product ring,
    /// self's generators first.
    pub fn tensor(&self, other: &CohomologyClass) -> CohomologyClass {
        let mut caps = self.caps.clone();
        caps.extend(other.caps.iter().copied());
        let mut out = CohomologyClass::zero(caps);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let mut exponents = ea.clone();
                exponents.extend(eb.iter().copied());
                out.insert(exponents, ca.clone() * cb.clone());
            }
        }
        out
    }
}

/// Exponent caps of the cohomology ring of `M`: `g_i^{m_i}` is the top
/// power of each factor `CP^{m_i}`.
fn ring_caps(m: &ProjectiveProduct) -> Vec<u32> {
    m.factors().to_vec()
}

/// `p(M) = prod_i (1 + g_i^2)^{m_i + 1}`, truncated in the ring of `M`.
pub fn total_pontryagin_class(m: &ProjectiveProduct) -> CohomologyClass {
    let caps = ring_caps(m);
    let mut total = CohomologyClass::one(caps.clone());
    for (i, &mi) in m.factors().iter().enumerate() {
        let g = CohomologyClass::generator(caps.clone(), i);
        let factor = CohomologyClass::one(caps.clone()).add(&g.mul(&g));
        total = total.mul(&factor.pow(mi + 1));
    }
    total
}

/// `p_j(M)`: the degree-`4j` component of the total class.
pub fn pontryagin_component(m: &ProjectiveProduct, j: u32) -> CohomologyClass {
    total_pontryagin_class(m).component(2 * j)
}

/// `p_beta(M) = <prod_{j in beta} p_j(M), [M]>`.
pub fn pontryagin_number(m: &ProjectiveProduct, beta: &Partition) -> Result<Scalar, CharClassError> {
    if m.weight() != beta.weight() {
        return Err(CharClassError::DimensionMismatch {
            manifold_dim: m.real_dimension(),
            partition_weight: beta.weight(),
        });
    }
    let total = total_pontryagin_class(m);
    let mut product = CohomologyClass::one(ring_caps(m));
    for &j in beta.parts() {
        product = product.mul(&total.component(2 * j));
    }
    Ok(product.top_coefficient())
}

/// The partition-indexed matrix of Pontryagin numbers together with its
/// exact determinant.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PontryaginTable {
    pub n: u32,
    pub order: Vec<Partition>,
    pub matrix: Vec<Vec<Scalar>>,
    pub det: Scalar,
}

/// Row `alpha`, column `beta`: `p_beta(M_alpha)`, partitions in
/// reverse-lexicographic order.
pub fn pontryagin_matrix(n: u32) -> PontryaginTable {
    let order = partitions(n);
    let matrix: Vec<Vec<Scalar>> = order
        .iter()
        .map(|alpha| {
            let m = ProjectiveProduct::from_partition(alpha);
            order
                .iter()
                .map(|beta| pontryagin_number(&m, beta).expect("weights match by construction"))
                .collect()
        })
        .collect();
    let det = determinant(&matrix);
    PontryaginTable {
        n,
        order,
        matrix,
        det,
    }
}

/// Exact determinant by fraction-aware Gaussian elimination; pivots are the
/// structurally cheapest nonzero entries to keep intermediate fractions
/// small.
pub fn determinant(matrix: &[Vec<Scalar>]) -> Scalar {
    let n = matrix.len();
    let mut work: Vec<Vec<Scalar>> = matrix.to_vec();
    for row in &work {
        assert_eq!(row.len(), n, "determinant needs a square matrix");
    }
    let mut det = Scalar::one();
    for col in 0..n {
        let pivot_row = (col..n)
            .filter(|&r| !work[r][col].is_zero())
            .min_by_key(|&r| work[r][col].pivot_complexity());
        let Some(pivot_row) = pivot_row else {
            return Scalar::zero();
        };
        if pivot_row != col {
            work.swap(pivot_row, col);
            det = -det;
        }
        let pivot = work[col][col].clone();
        det = det * pivot.clone();
        for r in (col + 1)..n {
            if work[r][col].is_zero() {
                continue;
            }
            let factor = work[r][col].clone() / pivot.clone();
            for c in col..n {
                let delta = factor.clone() * work[col][c].clone();
                work[r][c] = work[r][c].clone() - delta;
            }
        }
    }
    det
}

/// Solves `M x = b` exactly; `None` if `M` is singular.
fn gaussian_solve(matrix: &[Vec<Scalar>], rhs: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = matrix.len();
    let mut work: Vec<Vec<Scalar>> = matrix.to_vec();
    let mut b = rhs.to_vec();
    for col in 0..n {
        let pivot_row = (col..n)
            .filter(|&r| !work[r][col].is_zero())
            .min_by_key(|&r| work[r][col].pivot_complexity())?;
        work.swap(pivot_row, col);
        b.swap(pivot_row, col);
        let pivot = work[col][col].clone();
        for r in (col + 1)..n {
            if work[r][col].is_zero() {
                continue;
            }
            let factor = work[r][col].clone() / pivot.clone();
            for c in col..n {
                let delta = factor.clone() * work[col][c].clone();
                work[r][c] = work[r][c].clone() - delta;
            }
            let delta = factor * b[col].clone();
            b[r] = b[r].clone() - delta;
        }
    }
    let mut x = vec![Scalar::zero(); n];
    for row in (0..n).rev() {
        let mut acc = b[row].clone();
        for c in (row + 1)..n {
            acc = acc - work[row][c].clone() * x[c].clone();
        }
        x[row] = acc / work[row][row].clone();
    }
    Some(x)
}

/// One signed, measure-weighted model manifold `M tensor K_weight`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleEntry {
    pub manifold: ProjectiveProduct,
    pub weight: Scalar,
    pub orientation: Sign,
}

/// Formal combination of weighted projective products.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnsembleDescription {
    pub entries: Vec<EnsembleEntry>,
}

impl EnsembleDescription {
    pub fn new(entries: Vec<EnsembleEntry>) -> Result<Self, CharClassError> {
        for entry in &entries {
            if !entry.weight.is_positive() {
                return Err(CharClassError::NonPositiveWeight(entry.weight.to_string()));
            }
        }
        Ok(EnsembleDescription { entries })
    }

    pub fn empty() -> Self {
        EnsembleDescription {
            entries: Vec::new(),
        }
    }
}

/// `E[p_beta] = sum orientation * weight * p_beta(M)`, exact.
pub fn expected_pontryagin(
    ensemble: &EnsembleDescription,
    beta: &Partition,
) -> Result<Scalar, CharClassError> {
    let mut total = Scalar::zero();
    for entry in &ensemble.entries {
        let number = pontryagin_number(&entry.manifold, beta)?;
        let signed = match entry.orientation {
            Sign::Plus => number,
            Sign::Minus => -number,
        };
        total = total + entry.weight.clone() * signed;
    }
    Ok(total)
}

/// Finds a signed weighted combination of the model manifolds whose
/// Pontryagin numbers equal `target` (indexed like `partitions(n)`), by
/// exactly solving `A^T lambda = target`. The result is round-trip checked.
pub fn solve_target(n: u32, target: &[Scalar]) -> Result<EnsembleDescription, CharClassError> {
    let order = partitions(n);
    if target.len() != order.len() {
        return Err(CharClassError::TargetLength {
            expected: order.len(),
            found: target.len(),
        });
    }
    let table = pontryagin_matrix(n);
    // Equation beta: sum_alpha p_beta(M_alpha) lambda_alpha = v_beta.
    let size = order.len();
    let transposed: Vec<Vec<Scalar>> = (0..size)
        .map(|beta| (0..size).map(|alpha| table.matrix[alpha][beta].clone()).collect())
        .collect();
    let lambda =
        gaussian_solve(&transposed, target).ok_or(CharClassError::SingularMatrix(n))?;

    let mut entries = Vec::new();
    for (alpha, coefficient) in order.iter().zip(&lambda) {
        if coefficient.is_zero() {
            continue;
        }
        entries.push(EnsembleEntry {
            manifold: ProjectiveProduct::from_partition(alpha),
            weight: coefficient.abs(),
            orientation: if coefficient.is_negative() {
                Sign::Minus
            } else {
                Sign::Plus
            },
        });
    }
    let ensemble = EnsembleDescription::new(entries)?;

    for (beta, expected) in order.iter().zip(target) {
        let achieved = expected_pontryagin(&ensemble, beta)?;
        if achieved != *expected {
            return Err(CharClassError::RoundTripMismatch(beta.to_string()));
        }
    }
    Ok(ensemble)
}

/// Reads a target map keyed by partition strings (like `"2+1"`) into the
/// canonical reverse-lexicographic vector, missing keys defaulting to zero.
pub fn target_from_map(
    n: u32,
    map: &BTreeMap<String, Scalar>,
) -> Result<Vec<Scalar>, CharClassError> {
    let order = partitions(n);
    let mut canonical: BTreeMap<String, usize> = BTreeMap::new();
    for (i, alpha) in order.iter().enumerate() {
        canonical.insert(alpha.to_string(), i);
    }
    let mut target = vec![Scalar::zero(); order.len()];
    for (key, value) in map {
        let normalized: Partition = key
            .parse()
            .map_err(|_| CharClassError::UnknownPartition(key.clone()))?;
        let index = canonical
            .get(&normalized.to_string())
            .ok_or_else(|| CharClassError::UnknownPartition(key.clone()))?;
        target[*index] = value.clone();
    }
    Ok(target)
}
