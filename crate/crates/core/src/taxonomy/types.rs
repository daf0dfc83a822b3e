use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::TaxonomyError;

/// Body area providing a support.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContactType {
    Hold,
    Palm,
    ArmLine,
    Foot,
    Knee,
}

impl ContactType {
    pub const ALL: [ContactType; 5] = [
        ContactType::Hold,
        ContactType::Palm,
        ContactType::ArmLine,
        ContactType::Foot,
        ContactType::Knee,
    ];

    /// Mechanical idealisation used for this kind of support.
    pub fn model(self) -> ContactModel {
        match self {
            ContactType::Hold => ContactModel::Bilateral,
            ContactType::Palm | ContactType::Foot => ContactModel::Plane,
            ContactType::ArmLine => ContactModel::LineWithFriction,
            ContactType::Knee => ContactModel::PointWithFriction,
        }
    }

    pub fn limb(self) -> LimbClass {
        match self {
            ContactType::Hold | ContactType::Palm | ContactType::ArmLine => LimbClass::Arm,
            ContactType::Foot | ContactType::Knee => LimbClass::Leg,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            ContactType::Hold => "Hold",
            ContactType::Palm => "Palm",
            ContactType::ArmLine => "ArmLine",
            ContactType::Foot => "Foot",
            ContactType::Knee => "Knee",
        }
    }
}

impl fmt::Display for ContactType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ContactType {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ContactType::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| TaxonomyError::InvalidSpec(format!("unknown contact type `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ContactModel {
    PointWithFriction,
    LineWithFriction,
    Plane,
    Bilateral,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum LimbClass {
    Arm,
    Leg,
}

impl LimbClass {
    pub fn admits(self, contact: ContactType) -> bool {
        contact.limb() == self
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LimbClass::Arm => "Arm",
            LimbClass::Leg => "Leg",
        }
    }
}

impl FromStr for LimbClass {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "arm" => Ok(LimbClass::Arm),
            "leg" => Ok(LimbClass::Leg),
            _ => Err(TaxonomyError::InvalidSpec(format!("unknown limb `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Side {
    Left,
    Right,
}

/// Side-collapsed support multiset plus the torso flag.
///
/// Entries are kept sorted, so two specs compare equal exactly when their
/// multisets are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct SupportSpec {
    entries: Vec<(LimbClass, ContactType)>,
    torso_contact: bool,
}

pub const MAX_PER_LIMB: usize = 2;

impl SupportSpec {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a spec from contact types; the limb of each entry follows from the type.
    pub fn from_contacts<I>(contacts: I, torso_contact: bool) -> Result<Self, TaxonomyError>
    where
        I: IntoIterator<Item = ContactType>,
    {
        Self::new(contacts.into_iter().map(|c| (c.limb(), c)), torso_contact)
    }

    pub fn new<I>(entries: I, torso_contact: bool) -> Result<Self, TaxonomyError>
    where
        I: IntoIterator<Item = (LimbClass, ContactType)>,
    {
        let mut entries: Vec<_> = entries.into_iter().collect();
        for &(limb, contact) in &entries {
            if !limb.admits(contact) {
                return Err(TaxonomyError::InvalidSpec(format!(
                    "{} cannot provide a {contact} support",
                    limb.as_str()
                )));
            }
        }
        for limb in [LimbClass::Arm, LimbClass::Leg] {
            let n = entries.iter().filter(|(l, _)| *l == limb).count();
            if n > MAX_PER_LIMB {
                return Err(TaxonomyError::InvalidSpec(format!(
                    "{n} {} supports exceed the bilateral limit of {MAX_PER_LIMB}",
                    limb.as_str()
                )));
            }
        }
        entries.sort();
        Ok(Self {
            entries,
            torso_contact,
        })
    }

    /// Drops the side of every sided support, merging mirror-image poses.
    pub fn collapse<I>(sided: I, torso_contact: bool) -> Result<Self, TaxonomyError>
    where
        I: IntoIterator<Item = (Side, ContactType)>,
    {
        Self::from_contacts(sided.into_iter().map(|(_, c)| c), torso_contact)
    }

    /// One sided representative of this spec: arm and leg entries alternate Right, Left.
    pub fn sided(&self) -> Vec<(Side, ContactType)> {
        let mut next = BTreeMap::new();
        self.entries
            .iter()
            .map(|&(limb, c)| {
                let k = next.entry(limb).or_insert(0usize);
                let side = if *k % 2 == 0 { Side::Right } else { Side::Left };
                *k += 1;
                (side, c)
            })
            .collect()
    }

    pub fn entries(&self) -> &[(LimbClass, ContactType)] {
        &self.entries
    }

    pub fn torso_contact(&self) -> bool {
        self.torso_contact
    }

    /// Number of limb supports (torso excluded).
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty() && !self.torso_contact
    }

    pub fn count(&self, contact: ContactType) -> usize {
        self.entries.iter().filter(|(_, c)| *c == contact).count()
    }

    /// Multiset difference `self - other` as a list of entries.
    pub fn minus(&self, other: &SupportSpec) -> Vec<(LimbClass, ContactType)> {
        let mut rest = other.entries.clone();
        let mut out = Vec::new();
        for e in &self.entries {
            if let Some(pos) = rest.iter().position(|r| r == e) {
                rest.remove(pos);
            } else {
                out.push(*e);
            }
        }
        out
    }

    /// True when the two specs differ by exactly one support: one added,
    /// one removed, or one retyped on the same limb class.
    pub fn one_change_from(&self, other: &SupportSpec) -> bool {
        if self.torso_contact != other.torso_contact {
            return false;
        }
        let gained = other.minus(self);
        let lost = self.minus(other);
        match (lost.len(), gained.len()) {
            (1, 0) | (0, 1) => true,
            (1, 1) => lost[0].0 == gained[0].0,
            _ => false,
        }
    }
}

impl fmt::Display for SupportSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<String> = self
            .entries
            .iter()
            .map(|(l, c)| format!("{}:{}", l.as_str(), c))
            .collect();
        if self.torso_contact {
            parts.push("Torso".into());
        }
        if parts.is_empty() {
            f.write_str("{}")
        } else {
            f.write_str(&parts.join(","))
        }
    }
}

/// Parses comma-separated `Limb:ContactType` tokens (order-insensitive).
/// The bare token `Torso` sets the torso flag; an empty string is the empty spec.
impl FromStr for SupportSpec {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut entries = Vec::new();
        let mut torso = false;
        for token in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            if token.eq_ignore_ascii_case("torso") {
                torso = true;
                continue;
            }
            let (limb, contact) = token.split_once(':').ok_or_else(|| {
                TaxonomyError::InvalidSpec(format!("expected `Limb:ContactType`, got `{token}`"))
            })?;
            entries.push((limb.trim().parse()?, contact.trim().parse()?));
        }
        SupportSpec::new(entries, torso)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Category {
    Standing,
    Kneeling,
    Resting,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RestingTier {
    /// Torso inclination still has to be balanced.
    Balance,
    /// Stable given flat contact areas with friction.
    Friction,
    /// Fully at rest.
    Rest,
}

impl RestingTier {
    /// Tier implied by the resting index `n` of `r.<n>`.
    pub fn for_index(n: u32) -> Option<Self> {
        match n {
            1..=4 => Some(RestingTier::Balance),
            5..=6 => Some(RestingTier::Friction),
            7..=10 => Some(RestingTier::Rest),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum IdKey {
    Flight,
    Grid { row: u32, col: u32 },
    Resting(u32),
}

/// Class identifier: `<row>.<col>`, `r.<n>`, or the flight pseudo-class `0.0`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ClassId {
    raw: String,
    key: IdKey,
}

pub const FLIGHT_ID: &str = "0.0";

impl ClassId {
    pub fn flight() -> Self {
        ClassId {
            raw: FLIGHT_ID.to_string(),
            key: IdKey::Flight,
        }
    }

    pub fn as_str(&self) -> &str {
        &self.raw
    }

    pub fn is_flight(&self) -> bool {
        self.key == IdKey::Flight
    }

    /// Row number (support count) for grid ids; `Some(0)` for flight.
    pub fn row(&self) -> Option<u32> {
        match self.key {
            IdKey::Flight => Some(0),
            IdKey::Grid { row, .. } => Some(row),
            IdKey::Resting(_) => None,
        }
    }

    pub fn resting_index(&self) -> Option<u32> {
        match self.key {
            IdKey::Resting(n) => Some(n),
            _ => None,
        }
    }

    fn sort_key(&self) -> (u8, u32, u32) {
        match self.key {
            IdKey::Flight => (0, 0, 0),
            IdKey::Grid { row, col } => (1, row, col),
            IdKey::Resting(n) => (2, n, 0),
        }
    }
}

impl Ord for ClassId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for ClassId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl FromStr for ClassId {
    type Err = TaxonomyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || TaxonomyError::MalformedId(s.to_string());
        let (head, tail) = s.split_once('.').ok_or_else(bad)?;
        let num = |t: &str| -> Result<u32, TaxonomyError> {
            if t.is_empty() || !t.bytes().all(|b| b.is_ascii_digit()) || (t.len() > 1 && t.starts_with('0')) {
                return Err(bad());
            }
            t.parse().map_err(|_| bad())
        };
        let key = if head == "r" {
            let n = num(tail)?;
            if n == 0 {
                return Err(bad());
            }
            IdKey::Resting(n)
        } else {
            let (row, col) = (num(head)?, num(tail)?);
            match (row, col) {
                (0, 0) => IdKey::Flight,
                (0, _) | (_, 0) => return Err(bad()),
                _ => IdKey::Grid { row, col },
            }
        };
        Ok(ClassId {
            raw: s.to_string(),
            key,
        })
    }
}

impl TryFrom<String> for ClassId {
    type Error = TaxonomyError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<ClassId> for String {
    fn from(id: ClassId) -> String {
        id.raw
    }
}

impl fmt::Display for ClassId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.raw)
    }
}

/// One taxonomy entry.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportClass {
    pub id: ClassId,
    pub category: Category,
    pub spec: SupportSpec,
    /// Declared neighbours, sorted.
    pub neighbors: Vec<ClassId>,
    /// Neighbours in a different category.
    pub cross_category: Vec<ClassId>,
    pub tier: Option<RestingTier>,
}

impl SupportClass {
    /// Contacts in an instance of this class: limb supports plus the torso.
    pub fn support_count(&self) -> usize {
        self.spec.len() + usize::from(self.spec.torso_contact())
    }
}
