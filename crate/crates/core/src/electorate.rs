//! The fixed two-class voter population.
//!
//! Class sizes are the source of truth. The margin is always recomputed from
//! them, and so is the winner: `a1` wins on a strict majority, a tie goes to
//! `a2`.

use std::fmt;

use crate::error::{Error, Result};

/// Preference class: `H1` prefers `a1`, `H2` prefers `a2`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Class {
    H1,
    H2,
}

impl Class {
    pub fn other(self) -> Class {
        match self {
            Class::H1 => Class::H2,
            Class::H2 => Class::H1,
        }
    }

    pub fn preferred(self) -> Candidate {
        match self {
            Class::H1 => Candidate::A1,
            Class::H2 => Candidate::A2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Candidate {
    A1,
    A2,
}

impl fmt::Display for Candidate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Candidate::A1 => write!(f, "a1"),
            Candidate::A2 => write!(f, "a2"),
        }
    }
}

/// Winning margin ε = (n1 − n2) / (2n).
#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Margin(pub f64);

impl Margin {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// Voters `0..n1` are class `H1`, voters `n1..n` are class `H2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Electorate {
    n1: usize,
    n2: usize,
}

impl Electorate {
    /// One class may be empty (a unanimous sample); an empty electorate is rejected.
    pub fn new(n1: usize, n2: usize) -> Result<Self> {
        if n1 + n2 == 0 {
            return Err(Error::Electorate("an electorate needs at least one voter".into()));
        }
        Ok(Electorate { n1, n2 })
    }

    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn n1(&self) -> usize {
        self.n1
    }

    pub fn n2(&self) -> usize {
        self.n2
    }

    pub fn class_size(&self, class: Class) -> usize {
        match class {
            Class::H1 => self.n1,
            Class::H2 => self.n2,
        }
    }

    /// σ: voter index to class.
    pub fn class_of(&self, voter: usize) -> Class {
        debug_assert!(voter < self.n());
        if voter < self.n1 {
            Class::H1
        } else {
            Class::H2
        }
    }

    pub fn voters(&self, class: Class) -> std::ops::Range<usize> {
        match class {
            Class::H1 => 0..self.n1,
            Class::H2 => self.n1..self.n(),
        }
    }

    pub fn winner(&self) -> Candidate {
        if self.n1 > self.n2 {
            Candidate::A1
        } else {
            Candidate::A2
        }
    }

    /// The larger class; `H1` on a tie.
    pub fn majority(&self) -> Class {
        if self.n1 >= self.n2 {
            Class::H1
        } else {
            Class::H2
        }
    }

    pub fn minority(&self) -> Class {
        self.majority().other()
    }

    pub fn margin(&self) -> Margin {
        Margin((self.n1 as f64 - self.n2 as f64) / (2.0 * self.n() as f64))
    }
}

/// Builds the canonical electorate for the given class sizes.
pub fn build_electorate(n1: usize, n2: usize) -> Result<Electorate> {
    Electorate::new(n1, n2)
}

pub fn margin(e: &Electorate) -> Margin {
    e.margin()
}
