use serde::{Deserialize, Serialize};

/// Similarity class of an algebra: which extra-Boolean operators it carries.
///
/// All of the diagonal-free through quasi-polyadic-equational kinds are
/// n-dimensional; `Ra` is the signature of relation algebras (composition,
/// converse, identity) and ignores the dimension field except that it is
/// conventionally stored as 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Kind {
    /// Cylindrifiers only.
    Df,
    /// Cylindrifiers and replacements `s_i^j`.
    Sc,
    /// Cylindrifiers and diagonals `d_ij` (replacements are term-definable).
    Ca,
    /// Cylindrifiers, replacements and transpositions `s_[i,j]`, no diagonals.
    Qa,
    /// Cylindrifiers, diagonals, replacements and transpositions.
    Qea,
    /// Relation algebra: composition, converse, identity constant.
    Ra,
}

impl Kind {
    pub fn as_str(&self) -> &'static str {
        match self {
            Kind::Df => "Df",
            Kind::Sc => "Sc",
            Kind::Ca => "CA",
            Kind::Qa => "QA",
            Kind::Qea => "QEA",
            Kind::Ra => "RA",
        }
    }

    pub fn parse(s: &str) -> Option<Kind> {
        match s {
            "Df" | "df" | "DF" => Some(Kind::Df),
            "Sc" | "sc" | "SC" => Some(Kind::Sc),
            "CA" | "Ca" | "ca" => Some(Kind::Ca),
            "QA" | "Qa" | "qa" => Some(Kind::Qa),
            "QEA" | "Qea" | "qea" => Some(Kind::Qea),
            "RA" | "Ra" | "ra" => Some(Kind::Ra),
            _ => None,
        }
    }

    pub fn has_cylindrifiers(&self) -> bool {
        !matches!(self, Kind::Ra)
    }

    pub fn has_diagonals(&self) -> bool {
        matches!(self, Kind::Ca | Kind::Qea)
    }

    pub fn has_replacements(&self) -> bool {
        matches!(self, Kind::Sc | Kind::Qa | Kind::Qea)
    }

    pub fn has_transpositions(&self) -> bool {
        matches!(self, Kind::Qa | Kind::Qea)
    }

    pub fn is_ra(&self) -> bool {
        matches!(self, Kind::Ra)
    }

    /// Does a structure of kind `self` carry every operator of `other`?
    /// Diagonal-carrying kinds also cover replacements, which are
    /// term-definable from cylindrifiers and diagonals.
    pub fn covers(&self, other: Kind) -> bool {
        if *self == other {
            return true;
        }
        if self.is_ra() || other.is_ra() {
            return false;
        }
        (!other.has_diagonals() || self.has_diagonals())
            && (!other.has_replacements() || self.has_replacements() || self.has_diagonals())
            && (!other.has_transpositions() || self.has_transpositions())
    }
}

/// Signature: kind plus dimension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Signature {
    pub kind: Kind,
    pub dim: usize,
}

impl Signature {
    pub fn new(kind: Kind, dim: usize) -> Self {
        Signature { kind, dim }
    }

    pub fn ra() -> Self {
        Signature { kind: Kind::Ra, dim: 2 }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coverage_order() {
        assert!(Kind::Qea.covers(Kind::Ca));
        assert!(Kind::Qea.covers(Kind::Sc));
        assert!(Kind::Qea.covers(Kind::Df));
        assert!(Kind::Ca.covers(Kind::Sc)); // replacements definable from diagonals
        assert!(!Kind::Ca.covers(Kind::Qa)); // no transpositions
        assert!(!Kind::Sc.covers(Kind::Ca));
        assert!(!Kind::Ra.covers(Kind::Df));
    }
}
