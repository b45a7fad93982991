//! Low-dimensional cobordism calculus for measured families.
//!
//! Dimension zero: a [`RandomZeroManifold`] is a pair of measure spaces
//! (positively and negatively oriented points). Its class is determined by
//! [`phi0`], the signed total mass.
//!
//! Dimension one: a [`RandomOneManifold`] is a formal sum of suspensions.
//! The suspension of an automorphism `g` of a base `K` is the family of
//! oriented lines/circles obtained by gluing `[0,1] x K` along
//! `(1, x) ~ (0, g(x))`. [`split_compact_leaves`] separates the circle part
//! (finite orbits) from the aperiodic part, reducing circles to a family
//! over a fundamental domain: the lowest-id atom of a finite orbit, or the
//! interval `[0, length/q)` on the lowest-id segment of a cycle with net
//! rotation `p/q`.
//!
//! Nullity of one-dimensional classes is certified by explicit
//! [`CobordismWitness`] values rather than decided abstractly:
//! disk fillings for compact-leaf families, pairs of pants realizing
//! `bd M = S(phi) + S(psi) - S(phi . psi)`, cylinders for orientation
//! inverses and disjoint sums. [`verify_witness`] checks the declared
//! boundary equation.
//!
//! Isomorphism of suspensions is decided three-valuedly
//! ([`compare_manifolds`]): `Isomorphic` is returned only with an explicit
//! matching, `Distinct` only on a mismatch of invariants that are sound for
//! any isomorphism (the reduced compact part, and the presence of aperiodic
//! leaves), and everything else is `Unknown`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::measure::{
    Angle, Automorphism, AutomorphismData, MassViolations, MeasureError, MeasureSpace,
    Periodicity, SegmentArrow,
};
use crate::scalar::Scalar;

#[derive(Debug, thiserror::Error)]
pub enum CobordismError {
    #[error("plus and minus parts share ids: {0:?}")]
    OverlappingSupports(Vec<String>),
    #[error("term {term}: holonomy is not measure preserving: {violations}")]
    NotMeasurePreserving {
        term: usize,
        violations: MassViolations,
    },
    #[error("manifold has non-compact leaves (first aperiodic cycle starts at {component:?})")]
    NonCompactLeaves { component: String },
    #[error("pair of pants factors are defined over different bases")]
    BaseMismatch,
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Orientation sign, serialized as `1` / `-1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_i8(self.as_i8())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        match i8::deserialize(deserializer)? {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(de::Error::custom(format!(
                "orientation must be 1 or -1, got {other}"
            ))),
        }
    }
}

/// Zero-dimensional measured manifold: signed point families.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RandomZeroManifold {
    pub plus: MeasureSpace,
    pub minus: MeasureSpace,
}

impl RandomZeroManifold {
    pub fn new(plus: MeasureSpace, minus: MeasureSpace) -> Result<Self, CobordismError> {
        let plus_ids: BTreeSet<&str> = plus.ids().collect();
        let shared: Vec<String> = minus
            .ids()
            .filter(|id| plus_ids.contains(id))
            .map(str::to_owned)
            .collect();
        if !shared.is_empty() {
            return Err(CobordismError::OverlappingSupports(shared));
        }
        Ok(RandomZeroManifold { plus, minus })
    }

    pub fn reverse(&self) -> RandomZeroManifold {
        RandomZeroManifold {
            plus: self.minus.clone(),
            minus: self.plus.clone(),
        }
    }

    pub fn disjoint_union(&self, other: &RandomZeroManifold) -> RandomZeroManifold {
        let mut taken: BTreeSet<String> = self.plus.ids().chain(self.minus.ids()).map(str::to_owned).collect();
        let mut renaming = MeasureSpace::disjoint_renaming(&mut taken, &other.plus);
        renaming.extend(MeasureSpace::disjoint_renaming(&mut taken, &other.minus));
        RandomZeroManifold {
            plus: self
                .plus
                .disjoint_union(&other.plus.rename_ids(&renaming)),
            minus: self
                .minus
                .disjoint_union(&other.minus.rename_ids(&renaming)),
        }
    }
}

impl<'de> Deserialize<'de> for RandomZeroManifold {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default = "MeasureSpace::empty")]
            plus: MeasureSpace,
            #[serde(default = "MeasureSpace::empty")]
            minus: MeasureSpace,
        }
        let raw = Raw::deserialize(deserializer)?;
        RandomZeroManifold::new(raw.plus, raw.minus).map_err(de::Error::custom)
    }
}

/// Signed total mass; a complete invariant of the zero-dimensional class.
pub fn phi0(x: &RandomZeroManifold) -> Scalar {
    x.plus.total_mass() - x.minus.total_mass()
}

/// Zero-dimensional classes agree exactly when their signed masses do.
pub fn cobordant0(x: &RandomZeroManifold, y: &RandomZeroManifold) -> bool {
    phi0(x) == phi0(y)
}

/// Boundary of the prism `[0,1] x K`: a positive and a negative copy of `K`.
pub fn boundary_of_prism(k: &MeasureSpace) -> RandomZeroManifold {
    let mut taken: BTreeSet<String> = k.ids().map(str::to_owned).collect();
    let renaming = MeasureSpace::disjoint_renaming(&mut taken, k);
    RandomZeroManifold {
        plus: k.clone(),
        minus: k.rename_ids(&renaming),
    }
}

/// One suspension term: holonomy automorphism plus a global orientation.
#[derive(Clone, Debug, PartialEq)]
pub struct SuspensionPresentation {
    pub gamma: Automorphism,
    pub orientation: Sign,
}

impl SuspensionPresentation {
    pub fn new(gamma: Automorphism, orientation: Sign) -> Self {
        SuspensionPresentation { gamma, orientation }
    }

    pub fn base(&self) -> &MeasureSpace {
        self.gamma.base()
    }

    /// Folds a negative orientation into inverse holonomy.
    pub fn oriented_positively(&self) -> SuspensionPresentation {
        match self.orientation {
            Sign::Plus => self.clone(),
            Sign::Minus => SuspensionPresentation {
                gamma: self.gamma.invert(),
                orientation: Sign::Plus,
            },
        }
    }
}

impl Serialize for SuspensionPresentation {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct Raw<'a> {
            base: &'a MeasureSpace,
            gamma: AutomorphismData,
            orientation: Sign,
        }
        Raw {
            base: self.gamma.base(),
            gamma: self.gamma.data(),
            orientation: self.orientation,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for SuspensionPresentation {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            base: MeasureSpace,
            gamma: AutomorphismData,
            orientation: Sign,
        }
        let raw = Raw::deserialize(deserializer)?;
        let gamma = Automorphism::bind(raw.base, raw.gamma).map_err(de::Error::custom)?;
        Ok(SuspensionPresentation {
            gamma,
            orientation: raw.orientation,
        })
    }
}

/// Formal sum of suspensions, normalized so no two terms share base ids and
/// no term has an empty base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawOneManifold", into = "RawOneManifold")]
pub struct RandomOneManifold {
    terms: Vec<SuspensionPresentation>,
}

#[derive(Serialize, Deserialize)]
struct RawOneManifold {
    terms: Vec<SuspensionPresentation>,
}

impl From<RandomOneManifold> for RawOneManifold {
    fn from(m: RandomOneManifold) -> RawOneManifold {
        RawOneManifold { terms: m.terms }
    }
}

impl TryFrom<RawOneManifold> for RandomOneManifold {
    type Error = String;
    fn try_from(raw: RawOneManifold) -> Result<Self, String> {
        Ok(RandomOneManifold::new(raw.terms))
    }
}

impl RandomOneManifold {
    /// Builds the formal sum, dropping empty terms and renaming colliding
    /// ids deterministically (left to right).
    pub fn new(terms: Vec<SuspensionPresentation>) -> Self {
        let mut taken: BTreeSet<String> = BTreeSet::new();
        let mut normalized = Vec::new();
        for term in terms {
            if term.base().is_empty() {
                continue;
            }
            let renaming = MeasureSpace::disjoint_renaming(&mut taken, term.base());
            let gamma = if renaming.is_empty() {
                term.gamma
            } else {
                term.gamma.rename_ids(&renaming)
            };
            normalized.push(SuspensionPresentation {
                gamma,
                orientation: term.orientation,
            });
        }
        RandomOneManifold { terms: normalized }
    }

    pub fn empty() -> Self {
        RandomOneManifold { terms: Vec::new() }
    }

    pub fn suspension(gamma: Automorphism, orientation: Sign) -> Self {
        RandomOneManifold::new(vec![SuspensionPresentation::new(gamma, orientation)])
    }

    /// Family of circles over `base`: suspension of the identity.
    pub fn circle_family(base: MeasureSpace) -> Self {
        RandomOneManifold::suspension(Automorphism::identity(base), Sign::Plus)
    }

    pub fn terms(&self) -> &[SuspensionPresentation] {
        &self.terms
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &RandomOneManifold) -> RandomOneManifold {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.clone());
        RandomOneManifold::new(terms)
    }

    pub fn neg(&self) -> RandomOneManifold {
        RandomOneManifold {
            terms: self
                .terms
                .iter()
                .map(|t| SuspensionPresentation {
                    gamma: t.gamma.clone(),
                    orientation: t.orientation.flip(),
                })
                .collect(),
        }
    }

    pub fn sum_of(parts: &[RandomOneManifold]) -> RandomOneManifold {
        parts
            .iter()
            .fold(RandomOneManifold::empty(), |acc, m| acc.add(m))
    }

    pub fn total_transverse_mass(&self) -> Scalar {
        self.terms.iter().map(|t| t.base().total_mass()).sum()
    }
}

/// Merges all terms into a single positively-oriented presentation over the
/// disjoint union of the bases; idempotent.
pub fn suspension_normal_form(x: &RandomOneManifold) -> SuspensionPresentation {
    let mut acc = Automorphism::identity(MeasureSpace::empty());
    for term in x.terms() {
        let folded = term.oriented_positively();
        acc = acc.disjoint_union(&folded.gamma);
    }
    SuspensionPresentation {
        gamma: acc,
        orientation: Sign::Plus,
    }
}

/// Result of separating compact from aperiodic leaves.
#[derive(Clone, Debug, Serialize)]
pub struct SplitOutcome {
    /// Circle families over the fundamental domains of the finite orbits.
    pub compact: RandomOneManifold,
    /// Suspension terms whose cycles have irrational net rotation.
    pub aperiodic: RandomOneManifold,
    /// Transversal crossings per leaf, keyed by fundamental-domain id;
    /// `mass(domain) * period` recovers the transverse mass of each orbit.
    #[serde(serialize_with = "periods_as_decimal")]
    pub periods: BTreeMap<String, BigInt>,
}

fn periods_as_decimal<S: serde::Serializer>(
    periods: &BTreeMap<String, BigInt>,
    serializer: S,
) -> Result<S::Ok, S::Error> {
    serializer.collect_map(periods.iter().map(|(id, period)| (id, period.to_string())))
}

/// Splits `x` into its compact-leaf part, reduced to circle families over
/// fundamental domains, and the aperiodic remainder. Transverse mass is
/// conserved: `mass(x) = sum(domain mass * period) + mass(aperiodic)`.
pub fn split_compact_leaves(x: &RandomOneManifold) -> Result<SplitOutcome, CobordismError> {
    let mut compact_terms = Vec::new();
    let mut aperiodic_terms = Vec::new();
    let mut periods = BTreeMap::new();

    for (index, term) in x.terms().iter().enumerate() {
        term.gamma
            .verify_measure_preserving()
            .map_err(|violations| CobordismError::NotMeasurePreserving {
                term: index,
                violations,
            })?;
        let decomposition = term.gamma.orbit_decomposition();

        let mut fundamental_atoms = Vec::new();
        for orbit in &decomposition.atom_orbits {
            let rep = orbit.ids[0].clone();
            periods.insert(rep.clone(), BigInt::from(orbit.period));
            fundamental_atoms.push(crate::measure::Atom {
                id: rep,
                mass: orbit.rep_mass.clone(),
            });
        }

        let mut fundamental_segments = Vec::new();
        let mut aperiodic_ids: BTreeSet<String> = BTreeSet::new();
        for orbit in &decomposition.segment_orbits {
            match &orbit.periodicity {
                Periodicity::Periodic { period } => {
                    let rep = orbit.ids[0].clone();
                    periods.insert(rep.clone(), period.clone());
                    fundamental_segments.push(crate::measure::Segment {
                        id: rep,
                        length: orbit.fundamental_length().expect("periodic orbit"),
                    });
                }
                Periodicity::Aperiodic => {
                    aperiodic_ids.extend(orbit.ids.iter().cloned());
                }
            }
        }

        if !(fundamental_atoms.is_empty() && fundamental_segments.is_empty()) {
            let base = MeasureSpace::new(fundamental_atoms, fundamental_segments)
                .expect("fundamental domains have unique ids");
            compact_terms.push(SuspensionPresentation {
                gamma: Automorphism::identity(base),
                orientation: term.orientation,
            });
        }

        if !aperiodic_ids.is_empty() {
            let segments = term
                .base()
                .segments()
                .iter()
                .filter(|s| aperiodic_ids.contains(&s.id))
                .cloned()
                .collect();
            let base = MeasureSpace::new(Vec::new(), segments).expect("subspace is well formed");
            let data = AutomorphismData {
                atom_map: Vec::new(),
                segment_map: aperiodic_ids
                    .iter()
                    .map(|id| {
                        let (to, angle) = term.gamma.segment_image(id).expect("bound segment");
                        SegmentArrow {
                            from: id.clone(),
                            to: to.to_owned(),
                            angle: angle.clone(),
                        }
                    })
                    .collect(),
            };
            let gamma = Automorphism::bind(base, data).expect("cycles are closed under the map");
            aperiodic_terms.push(SuspensionPresentation {
                gamma,
                orientation: term.orientation,
            });
        }
    }

    Ok(SplitOutcome {
        compact: RandomOneManifold { terms: compact_terms },
        aperiodic: RandomOneManifold { terms: aperiodic_terms },
        periods,
    })
}

/// Three-valued isomorphism verdict for measured one-manifolds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum IsoVerdict {
    Isomorphic { witness: String },
    Distinct { reason: String },
    Unknown { reason: String },
}

impl IsoVerdict {
    pub fn is_isomorphic(&self) -> bool {
        matches!(self, IsoVerdict::Isomorphic { .. })
    }
    pub fn is_distinct(&self) -> bool {
        matches!(self, IsoVerdict::Distinct { .. })
    }
}

/// Invariants of the reduced compact part. Zero-mass atom families are
/// measure-negligible and dropped; the diffuse part of a fundamental domain
/// is determined up to isomorphism by its total mass alone.
#[derive(Debug, PartialEq, Eq)]
struct CompactInvariant {
    atom_masses: Vec<Scalar>,
    diffuse_mass: Scalar,
}

/// Aperiodic cycles reduced to first-return presentations on a single
/// segment: `(length, net rotation up to sign)`.
type AperiodicSignature = Vec<(Scalar, Angle)>;

fn canonical_angle(angle: &Angle) -> Angle {
    let negated = angle.neg();
    if (&negated.rational, &negated.tau_units) < (&angle.rational, &angle.tau_units) {
        negated
    } else {
        angle.clone()
    }
}

fn manifold_signature(
    x: &RandomOneManifold,
) -> Result<(CompactInvariant, AperiodicSignature), CobordismError> {
    let folded = RandomOneManifold::suspension(suspension_normal_form(x).gamma, Sign::Plus);
    let split = split_compact_leaves(&folded)?;

    let mut atom_masses: Vec<Scalar> = split
        .compact
        .terms()
        .iter()
        .flat_map(|t| t.base().atoms().iter())
        .filter(|a| !a.mass.is_zero())
        .map(|a| a.mass.clone())
        .collect();
    atom_masses.sort();
    let diffuse_mass = split
        .compact
        .terms()
        .iter()
        .flat_map(|t| t.base().segments().iter())
        .map(|s| s.length.clone())
        .sum();

    let mut aperiodic: AperiodicSignature = split
        .aperiodic
        .terms()
        .iter()
        .flat_map(|t| t.gamma.orbit_decomposition().segment_orbits)
        .map(|orbit| (orbit.rep_length.clone(), canonical_angle(&orbit.net_angle)))
        .collect();
    aperiodic.sort();

    Ok((
        CompactInvariant {
            atom_masses,
            diffuse_mass,
        },
        aperiodic,
    ))
}

fn format_masses(masses: &[Scalar]) -> String {
    let parts: Vec<String> = masses.iter().map(Scalar::display).collect();
    format!("[{}]", parts.join(", "))
}

/// Decides isomorphism of two measured one-manifolds.
///
/// The compact parts are compared after fundamental-domain reduction, where
/// atom-mass multisets together with total diffuse mass are a complete
/// invariant. Aperiodic parts are matched rigidly by `(segment length, net
/// rotation up to sign)` after collapsing cycles to first-return
/// presentations; a failed rigid match downgrades to `Unknown` because those
/// data are not isomorphism invariants, while the mere presence of aperiodic
/// leaves is.
pub fn compare_manifolds(
    x: &RandomOneManifold,
    y: &RandomOneManifold,
) -> Result<IsoVerdict, CobordismError> {
    let (cx, ax) = manifold_signature(x)?;
    let (cy, ay) = manifold_signature(y)?;

    if cx.atom_masses != cy.atom_masses {
        return Ok(IsoVerdict::Distinct {
            reason: format!(
                "compact circle families differ: atom masses {} vs {}",
                format_masses(&cx.atom_masses),
                format_masses(&cy.atom_masses)
            ),
        });
    }
    if cx.diffuse_mass != cy.diffuse_mass {
        return Ok(IsoVerdict::Distinct {
            reason: format!(
                "compact circle families differ: diffuse transverse mass {} vs {}",
                cx.diffuse_mass, cy.diffuse_mass
            ),
        });
    }

    match (ax.is_empty(), ay.is_empty()) {
        (true, true) => Ok(IsoVerdict::Isomorphic {
            witness: format!(
                "compact parts matched: atoms {}, diffuse {}",
                format_masses(&cx.atom_masses),
                cx.diffuse_mass
            ),
        }),
        (true, false) | (false, true) => Ok(IsoVerdict::Distinct {
            reason: "aperiodic leaves present on one side only".to_owned(),
        }),
        (false, false) => {
            if ax == ay {
                Ok(IsoVerdict::Isomorphic {
                    witness: format!(
                        "compact parts matched and {} aperiodic first-return cycles matched",
                        ax.len()
                    ),
                })
            } else {
                Ok(IsoVerdict::Unknown {
                    reason: "aperiodic parts are not matched by rigid first-return invariants"
                        .to_owned(),
                })
            }
        }
    }
}

/// Convenience wrapper for single presentations.
pub fn suspension_iso(
    a: &SuspensionPresentation,
    b: &SuspensionPresentation,
) -> Result<IsoVerdict, CobordismError> {
    compare_manifolds(
        &RandomOneManifold::new(vec![a.clone()]),
        &RandomOneManifold::new(vec![b.clone()]),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    DiskFilling,
    PairOfPants,
    DisjointSum,
    OrientationInverse,
}

impl fmt::Display for WitnessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            WitnessKind::DiskFilling => "disk_filling",
            WitnessKind::PairOfPants => "pair_of_pants",
            WitnessKind::DisjointSum => "disjoint_sum",
            WitnessKind::OrientationInverse => "orientation_inverse",
        };
        f.write_str(name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignedManifold {
    pub sign: Sign,
    pub manifold: RandomOneManifold,
}

impl SignedManifold {
    /// Folds the formal sign into orientation, yielding a plain manifold.
    pub fn folded(&self) -> RandomOneManifold {
        match self.sign {
            Sign::Plus => self.manifold.clone(),
            Sign::Minus => self.manifold.neg(),
        }
    }
}

/// Data for a pair-of-pants witness: two automorphisms of a common base.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairOfPantsPayload {
    pub base: MeasureSpace,
    pub phi: AutomorphismData,
    pub psi: AutomorphismData,
}

/// Certificate that a two-dimensional family exists with the declared
/// boundary. Verification recomputes the boundary from the witness data and
/// compares it with the declaration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CobordismWitness {
    pub kind: WitnessKind,
    #[serde(default)]
    pub inputs: Vec<RandomOneManifold>,
    pub boundary: Vec<SignedManifold>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub payload: Option<PairOfPantsPayload>,
}

/// Disk filling `D x K` of a manifold all of whose leaves are compact.
pub fn disk_filling(x: &RandomOneManifold) -> Result<CobordismWitness, CobordismError> {
    let split = split_compact_leaves(x)?;
    if let Some(term) = split.aperiodic.terms().first() {
        let component = term
            .base()
            .segments()
            .first()
            .map(|s| s.id.clone())
            .unwrap_or_default();
        return Err(CobordismError::NonCompactLeaves { component });
    }
    Ok(CobordismWitness {
        kind: WitnessKind::DiskFilling,
        inputs: vec![x.clone()],
        boundary: vec![SignedManifold {
            sign: Sign::Plus,
            manifold: x.clone(),
        }],
        payload: None,
    })
}

/// Pair of pants over `phi`, `psi`: boundary `S(phi) + S(psi) - S(phi.psi)`.
pub fn pair_of_pants(
    phi: &Automorphism,
    psi: &Automorphism,
) -> Result<CobordismWitness, CobordismError> {
    if phi.base() != psi.base() {
        return Err(CobordismError::BaseMismatch);
    }
    for (term, auto) in [(0usize, phi), (1, psi)] {
        auto.verify_measure_preserving()
            .map_err(|violations| CobordismError::NotMeasurePreserving { term, violations })?;
    }
    let composite = phi.compose(psi)?;
    Ok(CobordismWitness {
        kind: WitnessKind::PairOfPants,
        inputs: Vec::new(),
        boundary: vec![
            SignedManifold {
                sign: Sign::Plus,
                manifold: RandomOneManifold::suspension(phi.clone(), Sign::Plus),
            },
            SignedManifold {
                sign: Sign::Plus,
                manifold: RandomOneManifold::suspension(psi.clone(), Sign::Plus),
            },
            SignedManifold {
                sign: Sign::Minus,
                manifold: RandomOneManifold::suspension(composite, Sign::Plus),
            },
        ],
        payload: Some(PairOfPantsPayload {
            base: phi.base().clone(),
            phi: phi.data(),
            psi: psi.data(),
        }),
    })
}

/// Cylinder witness for `[x1] + ... + [xn] = [x1 + ... + xn]`.
pub fn disjoint_sum(parts: &[RandomOneManifold]) -> CobordismWitness {
    let total = RandomOneManifold::sum_of(parts);
    let mut boundary: Vec<SignedManifold> = parts
        .iter()
        .map(|m| SignedManifold {
            sign: Sign::Plus,
            manifold: m.clone(),
        })
        .collect();
    boundary.push(SignedManifold {
        sign: Sign::Minus,
        manifold: total,
    });
    CobordismWitness {
        kind: WitnessKind::DisjointSum,
        inputs: parts.to_vec(),
        boundary,
        payload: None,
    }
}

/// Cylinder witness for `[x] + [-x] = 0`.
pub fn orientation_inverse(x: &RandomOneManifold) -> CobordismWitness {
    CobordismWitness {
        kind: WitnessKind::OrientationInverse,
        inputs: vec![x.clone()],
        boundary: vec![
            SignedManifold {
                sign: Sign::Plus,
                manifold: x.clone(),
            },
            SignedManifold {
                sign: Sign::Plus,
                manifold: x.neg(),
            },
        ],
        payload: None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Fail,
    Unknown,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Status::Ok => "ok",
            Status::Fail => "fail",
            Status::Unknown => "unknown",
        })
    }
}

impl Status {
    fn worst(self, other: Status) -> Status {
        use Status::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Unknown, _) | (_, Unknown) => Unknown,
            _ => Ok,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentCheck {
    pub name: String,
    pub verdict: Status,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WitnessReport {
    pub status: Status,
    pub components: Vec<ComponentCheck>,
}

impl WitnessReport {
    fn from_components(mut components: Vec<ComponentCheck>) -> WitnessReport {
        components.sort_by(|a, b| a.name.cmp(&b.name));
        let status = components
            .iter()
            .fold(Status::Ok, |acc, c| acc.worst(c.verdict));
        WitnessReport { status, components }
    }
}

fn check(name: &str, verdict: Status, detail: impl Into<String>) -> ComponentCheck {
    ComponentCheck {
        name: name.to_owned(),
        verdict,
        detail: detail.into(),
    }
}

fn verdict_component(name: &str, verdict: IsoVerdict) -> ComponentCheck {
    match verdict {
        IsoVerdict::Isomorphic { witness } => check(name, Status::Ok, witness),
        IsoVerdict::Distinct { reason } => check(name, Status::Fail, reason),
        IsoVerdict::Unknown { reason } => check(name, Status::Unknown, reason),
    }
}

/// Checks that every suspension term of every manifold mentioned by the
/// witness is measure preserving, reporting violations per location.
fn preservation_checks(witness: &CobordismWitness) -> Vec<ComponentCheck> {
    let mut failures = Vec::new();
    let mut visit = |label: String, manifold: &RandomOneManifold| {
        for (i, term) in manifold.terms().iter().enumerate() {
            if let Err(violations) = term.gamma.verify_measure_preserving() {
                failures.push(format!("{label}.term[{i}]: {violations}"));
            }
        }
    };
    for (i, input) in witness.inputs.iter().enumerate() {
        visit(format!("inputs[{i}]"), input);
    }
    for (i, signed) in witness.boundary.iter().enumerate() {
        visit(format!("boundary[{i}]"), &signed.manifold);
    }
    if failures.is_empty() {
        vec![check(
            "measure-preserving",
            Status::Ok,
            "all holonomies preserve mass",
        )]
    } else {
        vec![check(
            "measure-preserving",
            Status::Fail,
            failures.join("; "),
        )]
    }
}

/// Verifies the declared boundary equation of a witness.
///
/// The declared boundary, with formal signs folded into orientations, must
/// be isomorphic to the boundary recomputed from the witness data; for disk
/// fillings the input must additionally have no aperiodic leaves.
pub fn verify_witness(witness: &CobordismWitness) -> WitnessReport {
    let mut components = Vec::new();

    let expected_terms: usize = match witness.kind {
        WitnessKind::DiskFilling => 1,
        WitnessKind::PairOfPants => 3,
        WitnessKind::OrientationInverse => 2,
        WitnessKind::DisjointSum => witness.inputs.len() + 1,
    };
    let expected_inputs: Option<usize> = match witness.kind {
        WitnessKind::DiskFilling | WitnessKind::OrientationInverse => Some(1),
        WitnessKind::PairOfPants => None,
        WitnessKind::DisjointSum => None,
    };
    let arity_ok = witness.boundary.len() == expected_terms
        && expected_inputs.is_none_or(|n| witness.inputs.len() == n)
        && (witness.kind != WitnessKind::DisjointSum || !witness.inputs.is_empty());
    components.push(if arity_ok {
        check(
            "arity",
            Status::Ok,
            format!("{} boundary terms as required", witness.boundary.len()),
        )
    } else {
        check(
            "arity",
            Status::Fail,
            format!(
                "{} expects {} boundary terms and {} inputs, found {} and {}",
                witness.kind,
                expected_terms,
                expected_inputs.map_or("any".to_owned(), |n| n.to_string()),
                witness.boundary.len(),
                witness.inputs.len()
            ),
        )
    });
    if !arity_ok {
        return WitnessReport::from_components(components);
    }

    components.extend(preservation_checks(witness));
    if components.iter().any(|c| c.verdict == Status::Fail) {
        return WitnessReport::from_components(components);
    }

    // Recompute the boundary the witness claims to have.
    let expected: Option<RandomOneManifold> = match witness.kind {
        WitnessKind::DiskFilling => {
            let input = &witness.inputs[0];
            match split_compact_leaves(input) {
                Ok(split) if split.aperiodic.is_empty() => {
                    components.push(check(
                        "compactness",
                        Status::Ok,
                        "every leaf of the input is compact",
                    ));
                    Some(input.clone())
                }
                Ok(split) => {
                    let id = split
                        .aperiodic
                        .terms()
                        .first()
                        .and_then(|t| t.base().segments().first())
                        .map(|s| s.id.clone())
                        .unwrap_or_default();
                    components.push(check(
                        "compactness",
                        Status::Fail,
                        format!("aperiodic leaves over segment {id:?} cannot bound a disk family"),
                    ));
                    None
                }
                Err(e) => {
                    components.push(check("compactness", Status::Fail, e.to_string()));
                    None
                }
            }
        }
        WitnessKind::PairOfPants => match &witness.payload {
            None => {
                components.push(check(
                    "payload",
                    Status::Fail,
                    "pair_of_pants requires (phi, psi) payload",
                ));
                None
            }
            Some(payload) => {
                let bound = Automorphism::bind(payload.base.clone(), payload.phi.clone())
                    .and_then(|phi| {
                        let psi = Automorphism::bind(payload.base.clone(), payload.psi.clone())?;
                        Ok((phi, psi))
                    })
                    .and_then(|(phi, psi)| {
                        phi.verify_measure_preserving()
                            .map_err(MeasureError::NotMeasurePreserving)?;
                        psi.verify_measure_preserving()
                            .map_err(MeasureError::NotMeasurePreserving)?;
                        let composite = phi.compose(&psi)?;
                        Ok((phi, psi, composite))
                    });
                match bound {
                    Err(e) => {
                        components.push(check("payload", Status::Fail, e.to_string()));
                        None
                    }
                    Ok((phi, psi, composite)) => {
                        components.push(check(
                            "payload",
                            Status::Ok,
                            "phi and psi are measure-preserving automorphisms of the base",
                        ));
                        Some(
                            RandomOneManifold::suspension(phi, Sign::Plus)
                                .add(&RandomOneManifold::suspension(psi, Sign::Plus))
                                .add(&RandomOneManifold::suspension(composite, Sign::Minus)),
                        )
                    }
                }
            }
        },
        WitnessKind::DisjointSum => {
            let total = RandomOneManifold::sum_of(&witness.inputs);
            Some(total.add(&total.neg()))
        }
        WitnessKind::OrientationInverse => {
            let x = &witness.inputs[0];
            Some(x.add(&x.neg()))
        }
    };

    if let Some(expected) = expected {
        let declared = RandomOneManifold::sum_of(
            &witness
                .boundary
                .iter()
                .map(SignedManifold::folded)
                .collect::<Vec<_>>(),
        );
        match compare_manifolds(&declared, &expected) {
            Ok(verdict) => components.push(verdict_component("boundary-equation", verdict)),
            Err(e) => components.push(check("boundary-equation", Status::Fail, e.to_string())),
        }
    }

    WitnessReport::from_components(components)
}

/// Chart of an atlas: a parameter interval times a vertical measure space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasChart {
    pub base_extent: [f64; 2],
    pub vertical: MeasureSpace,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AtlasDescription {
    pub charts: Vec<AtlasChart>,
    pub compact: bool,
}

impl AtlasDescription {
    pub fn empty() -> Self {
        AtlasDescription {
            charts: Vec::new(),
            compact: true,
        }
    }

    pub fn disjoint_union(&self, other: &AtlasDescription) -> AtlasDescription {
        let mut charts = self.charts.clone();
        charts.extend(other.charts.clone());
        AtlasDescription {
            charts,
            compact: self.compact && other.compact,
        }
    }
}

/// Total transverse mass of the atlas: the sum of the vertical masses.
pub fn atlas_cost(atlas: &AtlasDescription) -> Scalar {
    atlas.charts.iter().map(|c| c.vertical.total_mass()).sum()
}

/// Standard two-chart atlas of a suspension: overlapping parameter intervals
/// around the gluing locus, each carrying the full base vertically.
pub fn suspension_atlas(presentation: &SuspensionPresentation) -> AtlasDescription {
    let base = presentation.base().clone();
    AtlasDescription {
        charts: vec![
            AtlasChart {
                base_extent: [0.0, 0.75],
                vertical: base.clone(),
            },
            AtlasChart {
                base_extent: [0.5, 1.25],
                vertical: base,
            },
        ],
        compact: true,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::Atom;

    fn atoms(spec: &[(&str, &str)]) -> MeasureSpace {
        MeasureSpace::new(
            spec.iter()
                .map(|(id, m)| Atom {
                    id: (*id).to_owned(),
                    mass: m.parse().unwrap(),
                })
                .collect(),
            Vec::new(),
        )
        .unwrap()
    }

    /// Cycles `ids` and fixes every other atom of the base.
    fn cycle(base: &MeasureSpace, ids: &[&str]) -> Automorphism {
        let n = ids.len();
        let mut atom_map: Vec<(String, String)> = (0..n)
            .map(|i| (ids[i].to_owned(), ids[(i + 1) % n].to_owned()))
            .collect();
        for atom in base.atoms() {
            if !ids.contains(&atom.id.as_str()) {
                atom_map.push((atom.id.clone(), atom.id.clone()));
            }
        }
        let data = AutomorphismData {
            atom_map,
            segment_map: Vec::new(),
        };
        Automorphism::bind(base.clone(), data).unwrap()
    }

    fn seg_rotation(id: &str, length: &str, angle: Angle) -> Automorphism {
        let base = MeasureSpace::single_segment(id, length.parse().unwrap());
        Automorphism::rotation(base, angle)
    }

    #[test]
    fn phi0_is_the_signed_mass() {
        let x = RandomZeroManifold::new(
            atoms(&[("a", "2")]),
            atoms(&[("b", "1/2")]),
        )
        .unwrap();
        assert_eq!(phi0(&x), "3/2".parse().unwrap());
    }

    #[test]
    fn prism_boundaries_are_null() {
        let k = atoms(&[("a", "1/3"), ("b", "2/3")]);
        let boundary = boundary_of_prism(&k);
        assert_eq!(boundary.plus.total_mass(), Scalar::one());
        assert_eq!(boundary.minus.total_mass(), Scalar::one());
        assert_eq!(phi0(&boundary), Scalar::zero());
        let empty = RandomZeroManifold::new(MeasureSpace::empty(), MeasureSpace::empty()).unwrap();
        assert!(cobordant0(&boundary, &empty));
    }

    #[test]
    fn phi0_respects_sum_and_reversal() {
        let x = RandomZeroManifold::new(atoms(&[("a", "1")]), atoms(&[("b", "1/4")])).unwrap();
        let y = RandomZeroManifold::new(atoms(&[("a", "1/3")]), MeasureSpace::empty()).unwrap();
        assert_eq!(phi0(&x.disjoint_union(&y)), phi0(&x) + phi0(&y));
        assert_eq!(phi0(&x.reverse()), -phi0(&x));
    }

    #[test]
    fn overlapping_supports_rejected() {
        let err = RandomZeroManifold::new(atoms(&[("a", "1")]), atoms(&[("a", "2")])).unwrap_err();
        assert!(matches!(err, CobordismError::OverlappingSupports(ids) if ids == vec!["a"]));
    }

    #[test]
    fn normal_form_is_idempotent_and_folds_orientation() {
        let rot = seg_rotation("s", "1", Angle::rational(1, 3));
        let x = RandomOneManifold::new(vec![
            SuspensionPresentation::new(rot.clone(), Sign::Minus),
            SuspensionPresentation::new(rot, Sign::Plus),
        ]);
        let nf = suspension_normal_form(&x);
        assert_eq!(nf.orientation, Sign::Plus);
        let (_, angle) = nf.gamma.segment_image("s").unwrap();
        assert_eq!(*angle, Angle::rational(2, 3));
        let again = suspension_normal_form(&RandomOneManifold::new(vec![nf.clone()]));
        assert_eq!(again, nf);
    }

    #[test]
    fn split_reduces_atom_cycles_to_fundamental_atoms() {
        let base = atoms(&[("a", "1/3"), ("b", "1/3"), ("c", "1/3")]);
        let x = RandomOneManifold::suspension(cycle(&base, &["a", "b", "c"]), Sign::Plus);
        let split = split_compact_leaves(&x).unwrap();
        assert!(split.aperiodic.is_empty());
        let f_base = split.compact.terms()[0].base();
        assert_eq!(f_base.atoms().len(), 1);
        assert_eq!(f_base.atoms()[0].id, "a");
        assert_eq!(f_base.atoms()[0].mass, "1/3".parse().unwrap());
        assert_eq!(split.periods["a"], BigInt::from(3));
    }

    #[test]
    fn split_reduces_rational_rotations_and_keeps_irrational_ones() {
        let rational = seg_rotation("s", "1", Angle::rational(2, 5));
        let irrational = seg_rotation("t", "1", Angle::tau(1, 1));
        let x = RandomOneManifold::new(vec![
            SuspensionPresentation::new(rational, Sign::Plus),
            SuspensionPresentation::new(irrational, Sign::Plus),
        ]);
        let split = split_compact_leaves(&x).unwrap();
        let f_base = split.compact.terms()[0].base();
        assert_eq!(f_base.segments()[0].length, "1/5".parse().unwrap());
        assert_eq!(split.periods["s"], BigInt::from(5));
        assert_eq!(split.aperiodic.terms().len(), 1);
        assert_eq!(split.aperiodic.terms()[0].base().segments()[0].id, "t");
    }

    #[test]
    fn split_conserves_transverse_mass() {
        let base = atoms(&[("a", "1/2"), ("b", "1/2"), ("c", "3")]);
        let x = RandomOneManifold::suspension(cycle(&base, &["a", "b"]), Sign::Plus);
        let split = split_compact_leaves(&x).unwrap();
        let recovered: Scalar = split
            .compact
            .terms()
            .iter()
            .flat_map(|t| t.base().atoms().iter())
            .map(|a| {
                a.mass.clone() * Scalar::from_bigint(split.periods[&a.id].clone())
            })
            .sum();
        assert_eq!(
            recovered + split.aperiodic.total_transverse_mass(),
            x.total_transverse_mass()
        );
    }

    #[test]
    fn cycle_and_identity_of_equal_fundamental_mass_are_isomorphic() {
        let three = atoms(&[("a", "1/3"), ("b", "1/3"), ("c", "1/3")]);
        let x = RandomOneManifold::suspension(cycle(&three, &["a", "b", "c"]), Sign::Plus);
        let y = RandomOneManifold::circle_family(atoms(&[("z", "1/3")]));
        assert!(compare_manifolds(&x, &y).unwrap().is_isomorphic());
    }

    #[test]
    fn rational_rotations_compare_by_fundamental_length() {
        let s5 = |p| {
            RandomOneManifold::suspension(
                seg_rotation("s", "1", Angle::rational(p, 5)),
                Sign::Plus,
            )
        };
        // 1/5 and 2/5 both reduce to a circle family over a length-1/5 segment.
        assert!(compare_manifolds(&s5(1), &s5(2)).unwrap().is_isomorphic());

        let third = RandomOneManifold::suspension(
            seg_rotation("s", "1", Angle::rational(1, 3)),
            Sign::Plus,
        );
        let quarter = RandomOneManifold::suspension(
            seg_rotation("s", "1", Angle::rational(1, 4)),
            Sign::Plus,
        );
        assert!(compare_manifolds(&third, &quarter).unwrap().is_distinct());
    }

    #[test]
    fn distinct_irrational_rotations_are_unknown() {
        let x = RandomOneManifold::suspension(seg_rotation("s", "1", Angle::tau(1, 1)), Sign::Plus);
        let y = RandomOneManifold::suspension(seg_rotation("s", "1", Angle::tau(2, 1)), Sign::Plus);
        assert!(matches!(
            compare_manifolds(&x, &y).unwrap(),
            IsoVerdict::Unknown { .. }
        ));
        // Same rotation up to sign is an explicit match.
        let z = RandomOneManifold::suspension(
            seg_rotation("s", "1", Angle::tau(-1, 1)),
            Sign::Plus,
        );
        assert!(compare_manifolds(&x, &z).unwrap().is_isomorphic());
        // Aperiodic leaves on one side only refute.
        let compact = RandomOneManifold::circle_family(MeasureSpace::single_segment(
            "u",
            Scalar::one(),
        ));
        assert!(compare_manifolds(&x, &compact).unwrap().is_distinct());
    }

    #[test]
    fn conjugation_preserves_orbit_invariants() {
        let base = atoms(&[("a", "1/4"), ("b", "1/4"), ("c", "1/4"), ("d", "1/4")]);
        let phi = cycle(&base, &["a", "b", "c", "d"]);
        let g = cycle(&base, &["a", "c"]);
        let conjugated = g.compose(&phi).unwrap().compose(&g.invert()).unwrap();

        let periods = |auto: &Automorphism| {
            let mut p: Vec<(usize, Scalar)> = auto
                .orbit_decomposition()
                .atom_orbits
                .iter()
                .map(|o| (o.period, o.rep_mass.clone()))
                .collect();
            p.sort();
            p
        };
        assert_eq!(periods(&phi), periods(&conjugated));

        let iso = suspension_iso(
            &SuspensionPresentation::new(phi, Sign::Plus),
            &SuspensionPresentation::new(conjugated, Sign::Plus),
        )
        .unwrap();
        assert!(iso.is_isomorphic());
    }

    #[test]
    fn pair_of_pants_witness_verifies() {
        let base = atoms(&[("a", "1/3"), ("b", "1/3"), ("c", "1/3")]);
        let phi = cycle(&base, &["a", "b", "c"]);
        let psi = cycle(&base, &["a", "b"]);
        let witness = pair_of_pants(&phi, &psi).unwrap();
        let report = verify_witness(&witness);
        assert_eq!(report.status, Status::Ok, "{report:?}");
    }

    #[test]
    fn disk_filling_requires_compact_leaves() {
        let compact = RandomOneManifold::suspension(
            seg_rotation("s", "1", Angle::rational(1, 3)),
            Sign::Plus,
        );
        let witness = disk_filling(&compact).unwrap();
        assert_eq!(verify_witness(&witness).status, Status::Ok);

        let aperiodic = RandomOneManifold::suspension(
            seg_rotation("s", "1", Angle::tau(1, 1)),
            Sign::Plus,
        );
        assert!(matches!(
            disk_filling(&aperiodic),
            Err(CobordismError::NonCompactLeaves { .. })
        ));
    }

    #[test]
    fn orientation_inverse_and_disjoint_sum_verify() {
        let x = RandomOneManifold::suspension(
            seg_rotation("s", "1", Angle::tau(1, 1)),
            Sign::Plus,
        );
        assert_eq!(verify_witness(&orientation_inverse(&x)).status, Status::Ok);

        let y = RandomOneManifold::circle_family(atoms(&[("a", "2")]));
        let witness = disjoint_sum(&[x, y]);
        assert_eq!(verify_witness(&witness).status, Status::Ok);
    }

    #[test]
    fn forged_boundary_is_rejected_with_reason() {
        // Claims S(rot 1/3) - S(rot 1/4) bounds: fundamental lengths differ.
        let third = RandomOneManifold::suspension(
            seg_rotation("s", "1", Angle::rational(1, 3)),
            Sign::Plus,
        );
        let quarter = RandomOneManifold::suspension(
            seg_rotation("s", "1", Angle::rational(1, 4)),
            Sign::Plus,
        );
        let forged = CobordismWitness {
            kind: WitnessKind::OrientationInverse,
            inputs: vec![third.clone()],
            boundary: vec![
                SignedManifold {
                    sign: Sign::Plus,
                    manifold: third,
                },
                SignedManifold {
                    sign: Sign::Minus,
                    manifold: quarter,
                },
            ],
            payload: None,
        };
        let report = verify_witness(&forged);
        assert_eq!(report.status, Status::Fail);
        let equation = report
            .components
            .iter()
            .find(|c| c.name == "boundary-equation")
            .unwrap();
        assert!(equation.detail.contains("diffuse transverse mass"));
    }

    #[test]
    fn atlas_cost_is_additive_and_doubles_on_suspensions() {
        assert_eq!(atlas_cost(&AtlasDescription::empty()), Scalar::zero());
        let k = atoms(&[("a", "1/2"), ("b", "1")]);
        let presentation =
            SuspensionPresentation::new(Automorphism::identity(k.clone()), Sign::Plus);
        let atlas = suspension_atlas(&presentation);
        assert_eq!(atlas_cost(&atlas), Scalar::from_integer(3));
        let doubled = atlas.disjoint_union(&atlas);
        assert_eq!(atlas_cost(&doubled), Scalar::from_integer(6));
    }

    #[test]
    fn one_manifold_json_round_trip() {
        let x = RandomOneManifold::suspension(
            seg_rotation("s", "1", Angle::rational(1, 3)),
            Sign::Minus,
        );
        let json = serde_json::to_string(&x).unwrap();
        let back: RandomOneManifold = serde_json::from_str(&json).unwrap();
        assert_eq!(back, x);
        assert!(json.contains("\"orientation\":-1"));
    }

    #[test]
    fn witness_json_round_trip() {
        let base = atoms(&[("a", "1/2"), ("b", "1/2")]);
        let phi = cycle(&base, &["a", "b"]);
        let witness = pair_of_pants(&phi, &phi).unwrap();
        let json = serde_json::to_string(&witness).unwrap();
        let back: CobordismWitness = serde_json::from_str(&json).unwrap();
        assert_eq!(back, witness);
        assert_eq!(verify_witness(&back).status, Status::Ok);
    }
}
