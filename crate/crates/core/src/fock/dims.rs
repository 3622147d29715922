use serde::{Deserialize, Serialize};

use super::FockError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum AtomLevel {
    A = 0,
    B = 1,
    C = 2,
}

impl AtomLevel {
    pub const ALL: [AtomLevel; 3] = [AtomLevel::A, AtomLevel::B, AtomLevel::C];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Truncation sizes. `atom` is 1 for field-only spaces and 3 with the atom.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockDims {
    pub atom: usize,
    pub d1: usize,
    pub d2: usize,
}

impl FockDims {
    pub fn field(d1: usize, d2: usize) -> Result<Self, FockError> {
        Self::checked(1, d1, d2)
    }

    pub fn with_atom(d1: usize, d2: usize) -> Result<Self, FockError> {
        Self::checked(3, d1, d2)
    }

    fn checked(atom: usize, d1: usize, d2: usize) -> Result<Self, FockError> {
        for d in [d1, d2] {
            if d < 2 {
                return Err(FockError::DimensionTooSmall(d));
            }
        }
        Ok(Self { atom, d1, d2 })
    }

    pub fn has_atom(&self) -> bool {
        self.atom == 3
    }

    pub fn field_len(&self) -> usize {
        self.d1 * self.d2
    }

    pub fn len(&self) -> usize {
        self.atom * self.d1 * self.d2
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, level: usize, n1: usize, n2: usize) -> usize {
        (level * self.d1 + n1) * self.d2 + n2
    }

    /// Inverse of [`FockDims::index`].
    #[inline]
    pub fn split(&self, index: usize) -> (usize, usize, usize) {
        let n2 = index % self.d2;
        let rest = index / self.d2;
        (rest / self.d1, rest % self.d1, n2)
    }

    /// True for states in the top two layers of either mode.
    #[inline]
    pub fn in_tail(&self, n1: usize, n2: usize) -> bool {
        n1 + 2 >= self.d1 || n2 + 2 >= self.d2
    }
}
