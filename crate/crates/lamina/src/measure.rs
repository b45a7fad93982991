//! Measure spaces with atoms and circle segments, and their automorphisms.
//!
//! A [`MeasureSpace`] is a finite list of atoms (point masses) and segments
//! (circles `R / length.Z` carrying Lebesgue measure). An [`Automorphism`]
//! permutes atoms mass-preservingly and matches segments of equal length,
//! rotating each by an [`Angle`].
//!
//! Angles are `rational + units * TAU0` turns, where `TAU0 = (sqrt(5)-1)/2`
//! is a fixed irrational. The rational part is kept reduced mod 1, so
//! periodicity of a rotation is decidable by inspecting the irrational part.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_bigint::BigInt;
use serde::{de, Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::Scalar;

/// Numeric value of the irrational angle unit, in turns: `(sqrt(5)-1)/2`.
pub fn tau0() -> f64 {
    (5.0_f64.sqrt() - 1.0) / 2.0
}

/// Prepends `r.` until the id is free in `taken`, then claims it.
pub(crate) fn freshen(taken: &mut BTreeSet<String>, id: &str) -> String {
    let mut candidate = id.to_owned();
    while taken.contains(&candidate) {
        candidate = format!("r.{candidate}");
    }
    taken.insert(candidate.clone());
    candidate
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum MeasureError {
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("atom {id:?} has negative mass {mass}")]
    NegativeMass { id: String, mass: Scalar },
    #[error("segment {id:?} has non-positive length {length}")]
    NonPositiveLength { id: String, length: Scalar },
    #[error("bijection is malformed: missing sources {missing_sources:?}, unknown ids {unknown_ids:?}, duplicated targets {duplicated_targets:?}")]
    MalformedBijection {
        missing_sources: Vec<String>,
        unknown_ids: Vec<String>,
        duplicated_targets: Vec<String>,
    },
    #[error("automorphisms are defined over different bases")]
    BaseMismatch,
    #[error("map is not measure preserving: {0}")]
    NotMeasurePreserving(MassViolations),
}

/// Mass/length mismatches found by [`Automorphism::verify_measure_preserving`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct MassViolations {
    /// `(from, to, mass(from), mass(to))` for offending atom pairs.
    pub atoms: Vec<(String, String, Scalar, Scalar)>,
    /// `(from, to, length(from), length(to))` for offending segment pairs.
    pub segments: Vec<(String, String, Scalar, Scalar)>,
}

impl MassViolations {
    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty()
    }
}

impl fmt::Display for MassViolations {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let atoms: Vec<String> = self
            .atoms
            .iter()
            .map(|(a, b, ma, mb)| format!("{a}->{b} ({ma} vs {mb})"))
            .collect();
        let segs: Vec<String> = self
            .segments
            .iter()
            .map(|(a, b, la, lb)| format!("{a}->{b} ({la} vs {lb})"))
            .collect();
        write!(f, "atoms [{}], segments [{}]", atoms.join(", "), segs.join(", "))
    }
}

/// Rotation angle in turns: `rational + units * TAU0`, rational part reduced
/// into `[0, 1)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Angle {
    pub rational: Scalar,
    #[serde(rename = "tau")]
    pub tau_units: Scalar,
}

impl Angle {
    pub fn new(rational: Scalar, tau_units: Scalar) -> Self {
        Angle {
            rational: rational.fract_mod_one(),
            tau_units,
        }
    }

    pub fn zero() -> Self {
        Angle::new(Scalar::zero(), Scalar::zero())
    }

    pub fn rational(p: i64, q: i64) -> Self {
        Angle::new(Scalar::new(p, q).expect("nonzero denominator"), Scalar::zero())
    }

    pub fn tau(units_p: i64, units_q: i64) -> Self {
        Angle::new(
            Scalar::zero(),
            Scalar::new(units_p, units_q).expect("nonzero denominator"),
        )
    }

    pub fn add(&self, other: &Angle) -> Angle {
        Angle::new(
            &self.rational + &other.rational,
            &self.tau_units + &other.tau_units,
        )
    }

    pub fn neg(&self) -> Angle {
        Angle::new(-&self.rational, -&self.tau_units)
    }

    pub fn is_zero(&self) -> bool {
        self.rational.is_zero() && self.tau_units.is_zero()
    }

    /// A rotation is periodic exactly when its irrational part vanishes.
    pub fn is_periodic(&self) -> bool {
        self.tau_units.is_zero()
    }

    /// Orbit count `q` of a periodic rotation `p/q` (reduced); `None` when
    /// the angle has an irrational component.
    pub fn periodic_denominator(&self) -> Option<BigInt> {
        self.is_periodic().then(|| self.rational.denom().clone())
    }

    /// Numeric rendering in turns, folded into `[0, 1)`.
    pub fn to_f64_turns(&self) -> f64 {
        (self.rational.to_f64() + self.tau_units.to_f64() * tau0()).rem_euclid(1.0)
    }
}

impl fmt::Debug for Angle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.tau_units.is_zero() {
            write!(f, "Angle({})", self.rational)
        } else {
            write!(f, "Angle({} + {}t)", self.rational, self.tau_units)
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atom {
    pub id: String,
    pub mass: Scalar,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Segment {
    pub id: String,
    pub length: Scalar,
}

/// Finite measure space: atoms plus circle segments, ids globally unique,
/// stored sorted by id.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MeasureSpace {
    atoms: Vec<Atom>,
    segments: Vec<Segment>,
}

impl MeasureSpace {
    pub fn new(mut atoms: Vec<Atom>, mut segments: Vec<Segment>) -> Result<Self, MeasureError> {
        atoms.sort_by(|a, b| a.id.cmp(&b.id));
        segments.sort_by(|a, b| a.id.cmp(&b.id));
        let mut seen = BTreeSet::new();
        for atom in &atoms {
            if !seen.insert(atom.id.clone()) {
                return Err(MeasureError::DuplicateId(atom.id.clone()));
            }
            if atom.mass.is_negative() {
                return Err(MeasureError::NegativeMass {
                    id: atom.id.clone(),
                    mass: atom.mass.clone(),
                });
            }
        }
        for seg in &segments {
            if !seen.insert(seg.id.clone()) {
                return Err(MeasureError::DuplicateId(seg.id.clone()));
            }
            if !seg.length.is_positive() {
                return Err(MeasureError::NonPositiveLength {
                    id: seg.id.clone(),
                    length: seg.length.clone(),
                });
            }
        }
        Ok(MeasureSpace { atoms, segments })
    }

    pub fn empty() -> Self {
        MeasureSpace {
            atoms: Vec::new(),
            segments: Vec::new(),
        }
    }

    pub fn single_atom(id: &str, mass: Scalar) -> Self {
        MeasureSpace::new(
            vec![Atom {
                id: id.to_owned(),
                mass,
            }],
            Vec::new(),
        )
        .expect("single atom is well formed")
    }

    /// Standard diffuse space of the given mass: one segment.
    pub fn single_segment(id: &str, length: Scalar) -> Self {
        MeasureSpace::new(
            Vec::new(),
            vec![Segment {
                id: id.to_owned(),
                length,
            }],
        )
        .expect("single segment is well formed")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty() && self.segments.is_empty()
    }

    pub fn atom_mass(&self, id: &str) -> Option<&Scalar> {
        self.atoms
            .binary_search_by(|a| a.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.atoms[i].mass)
    }

    pub fn segment_length(&self, id: &str) -> Option<&Scalar> {
        self.segments
            .binary_search_by(|s| s.id.as_str().cmp(id))
            .ok()
            .map(|i| &self.segments[i].length)
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.atoms
            .iter()
            .map(|a| a.id.as_str())
            .chain(self.segments.iter().map(|s| s.id.as_str()))
    }

    pub fn total_mass(&self) -> Scalar {
        self.atoms
            .iter()
            .map(|a| a.mass.clone())
            .chain(self.segments.iter().map(|s| s.length.clone()))
            .sum()
    }

    /// Renames every id through the map; ids absent from the map are kept.
    pub fn rename_ids(&self, renaming: &BTreeMap<String, String>) -> MeasureSpace {
        let rn = |id: &str| renaming.get(id).cloned().unwrap_or_else(|| id.to_owned());
        MeasureSpace::new(
            self.atoms
                .iter()
                .map(|a| Atom {
                    id: rn(&a.id),
                    mass: a.mass.clone(),
                })
                .collect(),
            self.segments
                .iter()
                .map(|s| Segment {
                    id: rn(&s.id),
                    length: s.length.clone(),
                })
                .collect(),
        )
        .expect("renaming preserves well-formedness")
    }

    /// Renaming that makes `other`'s ids disjoint from `taken`, extending
    /// `taken` with the chosen names.
    pub fn disjoint_renaming(
        taken: &mut BTreeSet<String>,
        other: &MeasureSpace,
    ) -> BTreeMap<String, String> {
        let mut renaming = BTreeMap::new();
        for id in other.ids() {
            let fresh = freshen(taken, id);
            if fresh != id {
                renaming.insert(id.to_owned(), fresh);
            }
        }
        renaming
    }

    /// Disjoint union. Ids on the left are kept; colliding ids on the right
    /// are re-namespaced with a deterministic `r.` prefix (repeated until
    /// free), so `K + empty == K` structurally. The returned map records the
    /// renaming applied to the right operand.
    pub fn disjoint_union_with_renaming(
        &self,
        other: &MeasureSpace,
    ) -> (MeasureSpace, BTreeMap<String, String>) {
        let mut taken: BTreeSet<String> = self.ids().map(str::to_owned).collect();
        let renaming = MeasureSpace::disjoint_renaming(&mut taken, other);
        let renamed = other.rename_ids(&renaming);
        let mut atoms = self.atoms.clone();
        atoms.extend(renamed.atoms);
        let mut segments = self.segments.clone();
        segments.extend(renamed.segments);
        let space = MeasureSpace::new(atoms, segments).expect("renamed union is well formed");
        (space, renaming)
    }

    pub fn disjoint_union(&self, other: &MeasureSpace) -> MeasureSpace {
        self.disjoint_union_with_renaming(other).0
    }
}

impl<'de> Deserialize<'de> for MeasureSpace {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            #[serde(default)]
            atoms: Vec<Atom>,
            #[serde(default)]
            segments: Vec<Segment>,
        }
        let raw = Raw::deserialize(deserializer)?;
        MeasureSpace::new(raw.atoms, raw.segments).map_err(de::Error::custom)
    }
}

/// The maps of an automorphism without its base; this is the wire format.
#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct AutomorphismData {
    /// `[from, to]` pairs over atom ids.
    #[serde(default)]
    pub atom_map: Vec<(String, String)>,
    /// Segment matches with a rotation each.
    #[serde(default)]
    pub segment_map: Vec<SegmentArrow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SegmentArrow {
    pub from: String,
    pub to: String,
    pub angle: Angle,
}

/// Automorphism of a measure space: an atom bijection plus a segment
/// bijection with one rotation per segment.
#[derive(Clone, Debug, PartialEq)]
pub struct Automorphism {
    base: MeasureSpace,
    atom_map: BTreeMap<String, String>,
    segment_map: BTreeMap<String, (String, Angle)>,
}

impl Automorphism {
    /// Binds raw map data to a base, checking that both maps are total
    /// bijections over the base's ids.
    pub fn bind(base: MeasureSpace, data: AutomorphismData) -> Result<Self, MeasureError> {
        let atom_ids: BTreeSet<&str> = base.atoms().iter().map(|a| a.id.as_str()).collect();
        let seg_ids: BTreeSet<&str> = base.segments().iter().map(|s| s.id.as_str()).collect();

        let mut missing_sources = Vec::new();
        let mut unknown_ids = Vec::new();
        let mut duplicated_targets = Vec::new();

        let mut atom_map = BTreeMap::new();
        let mut atom_targets = BTreeSet::new();
        for (from, to) in &data.atom_map {
            if !atom_ids.contains(from.as_str()) {
                unknown_ids.push(from.clone());
            }
            if !atom_ids.contains(to.as_str()) {
                unknown_ids.push(to.clone());
            }
            if atom_map.insert(from.clone(), to.clone()).is_some() {
                duplicated_targets.push(from.clone());
            }
            if !atom_targets.insert(to.clone()) {
                duplicated_targets.push(to.clone());
            }
        }
        for id in &atom_ids {
            if !atom_map.contains_key(*id) {
                missing_sources.push((*id).to_owned());
            }
        }

        let mut segment_map = BTreeMap::new();
        let mut seg_targets = BTreeSet::new();
        for arrow in &data.segment_map {
            if !seg_ids.contains(arrow.from.as_str()) {
                unknown_ids.push(arrow.from.clone());
            }
            if !seg_ids.contains(arrow.to.as_str()) {
                unknown_ids.push(arrow.to.clone());
            }
            if segment_map
                .insert(arrow.from.clone(), (arrow.to.clone(), arrow.angle.clone()))
                .is_some()
            {
                duplicated_targets.push(arrow.from.clone());
            }
            if !seg_targets.insert(arrow.to.clone()) {
                duplicated_targets.push(arrow.to.clone());
            }
        }
        for id in &seg_ids {
            if !segment_map.contains_key(*id) {
                missing_sources.push((*id).to_owned());
            }
        }

        if !(missing_sources.is_empty() && unknown_ids.is_empty() && duplicated_targets.is_empty())
        {
            return Err(MeasureError::MalformedBijection {
                missing_sources,
                unknown_ids,
                duplicated_targets,
            });
        }
        Ok(Automorphism {
            base,
            atom_map,
            segment_map,
        })
    }

    pub fn identity(base: MeasureSpace) -> Self {
        let atom_map = base
            .atoms()
            .iter()
            .map(|a| (a.id.clone(), a.id.clone()))
            .collect();
        let segment_map = base
            .segments()
            .iter()
            .map(|s| (s.id.clone(), (s.id.clone(), Angle::zero())))
            .collect();
        Automorphism {
            base,
            atom_map,
            segment_map,
        }
    }

    /// Rotation of every segment of `base` in place by `angle`; atoms fixed.
    pub fn rotation(base: MeasureSpace, angle: Angle) -> Self {
        let mut auto = Automorphism::identity(base);
        for (_, (_, a)) in auto.segment_map.iter_mut() {
            *a = angle.clone();
        }
        auto
    }

    pub fn base(&self) -> &MeasureSpace {
        &self.base
    }

    pub fn data(&self) -> AutomorphismData {
        AutomorphismData {
            atom_map: self
                .atom_map
                .iter()
                .map(|(f, t)| (f.clone(), t.clone()))
                .collect(),
            segment_map: self
                .segment_map
                .iter()
                .map(|(f, (t, a))| SegmentArrow {
                    from: f.clone(),
                    to: t.clone(),
                    angle: a.clone(),
                })
                .collect(),
        }
    }

    pub fn atom_image(&self, id: &str) -> Option<&str> {
        self.atom_map.get(id).map(String::as_str)
    }

    pub fn segment_image(&self, id: &str) -> Option<(&str, &Angle)> {
        self.segment_map.get(id).map(|(t, a)| (t.as_str(), a))
    }

    /// Mass and length preservation along the maps; structural validity is
    /// already guaranteed by [`Automorphism::bind`].
    pub fn verify_measure_preserving(&self) -> Result<(), MassViolations> {
        let mut violations = MassViolations::default();
        for (from, to) in &self.atom_map {
            let mf = self.base.atom_mass(from).expect("bound atom");
            let mt = self.base.atom_mass(to).expect("bound atom");
            if mf != mt {
                violations
                    .atoms
                    .push((from.clone(), to.clone(), mf.clone(), mt.clone()));
            }
        }
        for (from, (to, _)) in &self.segment_map {
            let lf = self.base.segment_length(from).expect("bound segment");
            let lt = self.base.segment_length(to).expect("bound segment");
            if lf != lt {
                violations
                    .segments
                    .push((from.clone(), to.clone(), lf.clone(), lt.clone()));
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// `self . other` (apply `other` first). Rotations along matched
    /// segments add.
    pub fn compose(&self, other: &Automorphism) -> Result<Automorphism, MeasureError> {
        if self.base != other.base {
            return Err(MeasureError::BaseMismatch);
        }
        let atom_map = other
            .atom_map
            .iter()
            .map(|(x, mid)| {
                let y = self.atom_map.get(mid).expect("bound atom").clone();
                (x.clone(), y)
            })
            .collect();
        let segment_map = other
            .segment_map
            .iter()
            .map(|(x, (mid, a1))| {
                let (y, a2) = self.segment_map.get(mid).expect("bound segment");
                (x.clone(), (y.clone(), a1.add(a2)))
            })
            .collect();
        Ok(Automorphism {
            base: self.base.clone(),
            atom_map,
            segment_map,
        })
    }

    pub fn invert(&self) -> Automorphism {
        let atom_map = self
            .atom_map
            .iter()
            .map(|(f, t)| (t.clone(), f.clone()))
            .collect();
        let segment_map = self
            .segment_map
            .iter()
            .map(|(f, (t, a))| (t.clone(), (f.clone(), a.neg())))
            .collect();
        Automorphism {
            base: self.base.clone(),
            atom_map,
            segment_map,
        }
    }

    pub fn is_identity(&self) -> bool {
        self.atom_map.iter().all(|(f, t)| f == t)
            && self
                .segment_map
                .iter()
                .all(|(f, (t, a))| f == t && a.is_zero())
    }

    /// Applies an id renaming to the base and both maps.
    pub fn rename_ids(&self, renaming: &BTreeMap<String, String>) -> Automorphism {
        let rn = |id: &str| -> String {
            renaming
                .get(id)
                .cloned()
                .unwrap_or_else(|| id.to_owned())
        };
        let base = self.base.rename_ids(renaming);
        let atom_map = self
            .atom_map
            .iter()
            .map(|(f, t)| (rn(f), rn(t)))
            .collect();
        let segment_map = self
            .segment_map
            .iter()
            .map(|(f, (t, a))| (rn(f), (rn(t), a.clone())))
            .collect();
        Automorphism {
            base,
            atom_map,
            segment_map,
        }
    }

    /// Disjoint union of two automorphisms over the union of their bases,
    /// applying the same renaming to maps as to ids.
    pub fn disjoint_union(&self, other: &Automorphism) -> Automorphism {
        let (base, renaming) = self.base.disjoint_union_with_renaming(&other.base);
        let renamed = other.rename_ids(&renaming);
        let mut atom_map = self.atom_map.clone();
        atom_map.extend(renamed.atom_map);
        let mut segment_map = self.segment_map.clone();
        segment_map.extend(renamed.segment_map);
        Automorphism {
            base,
            atom_map,
            segment_map,
        }
    }

    pub fn orbit_decomposition(&self) -> OrbitDecomposition {
        let mut atom_orbits = Vec::new();
        let mut visited: BTreeSet<&str> = BTreeSet::new();
        for atom in self.base.atoms() {
            if visited.contains(atom.id.as_str()) {
                continue;
            }
            let mut ids = Vec::new();
            let mut current = atom.id.as_str();
            loop {
                visited.insert(current);
                ids.push(current.to_owned());
                current = self.atom_map.get(current).expect("bound atom");
                if current == atom.id {
                    break;
                }
            }
            atom_orbits.push(AtomOrbit {
                period: ids.len(),
                rep_mass: atom.mass.clone(),
                ids,
            });
        }

        let mut segment_orbits = Vec::new();
        let mut visited: BTreeSet<&str> = BTreeSet::new();
        for seg in self.base.segments() {
            if visited.contains(seg.id.as_str()) {
                continue;
            }
            let mut ids = Vec::new();
            let mut net_angle = Angle::zero();
            let mut current = seg.id.as_str();
            loop {
                visited.insert(current);
                ids.push(current.to_owned());
                let (next, angle) = self.segment_map.get(current).expect("bound segment");
                net_angle = net_angle.add(angle);
                current = next;
                if current == seg.id {
                    break;
                }
            }
            let cycle_len = ids.len();
            let periodicity = match net_angle.periodic_denominator() {
                Some(q) => Periodicity::Periodic {
                    period: BigInt::from(cycle_len) * q,
                },
                None => Periodicity::Aperiodic,
            };
            segment_orbits.push(SegmentOrbit {
                ids,
                cycle_len,
                rep_length: seg.length.clone(),
                net_angle,
                periodicity,
            });
        }

        OrbitDecomposition {
            atom_orbits,
            segment_orbits,
        }
    }
}

/// Orbit of the atom permutation; `ids` starts at the lexicographically
/// smallest member, which is the orbit's fundamental domain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AtomOrbit {
    pub ids: Vec<String>,
    pub rep_mass: Scalar,
    pub period: usize,
}

/// Cycle of the segment bijection with the net rotation accumulated around
/// it. A leaf over the cycle crosses the transversal `cycle_len * q` times
/// when the net rotation is `p/q`, and never closes up otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentOrbit {
    pub ids: Vec<String>,
    pub cycle_len: usize,
    pub rep_length: Scalar,
    pub net_angle: Angle,
    pub periodicity: Periodicity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Periodicity {
    Periodic { period: BigInt },
    Aperiodic,
}

impl SegmentOrbit {
    pub fn is_periodic(&self) -> bool {
        matches!(self.periodicity, Periodicity::Periodic { .. })
    }

    /// Length of the fundamental transversal interval `[0, length/q)` on the
    /// lowest-id segment of a periodic cycle.
    pub fn fundamental_length(&self) -> Option<Scalar> {
        let q = self.net_angle.periodic_denominator()?;
        Some(
            self.rep_length.clone()
                / crate::scalar::Scalar::from_bigint(q),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrbitDecomposition {
    pub atom_orbits: Vec<AtomOrbit>,
    pub segment_orbits: Vec<SegmentOrbit>,
}

impl Serialize for Automorphism {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.data().serialize(serializer)
    }
}
