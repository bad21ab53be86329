use std::fmt;
use std::ops::Add;

/// Dependent variables: `u` for the equation itself and `v` for the potential `u = v_x`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DepVar {
    U,
    V,
}

impl DepVar {
    pub fn name(self) -> &'static str {
        match self {
            DepVar::U => "u",
            DepVar::V => "v",
        }
    }
}

/// Independent variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Indep {
    X,
    Y,
    T,
}

impl Indep {
    pub const ALL: [Indep; 3] = [Indep::X, Indep::Y, Indep::T];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn letter(self) -> char {
        match self {
            Indep::X => 'x',
            Indep::Y => 'y',
            Indep::T => 't',
        }
    }

    pub fn from_letter(c: char) -> Option<Indep> {
        match c {
            'x' => Some(Indep::X),
            'y' => Some(Indep::Y),
            't' => Some(Indep::T),
            _ => None,
        }
    }
}

impl fmt::Display for Indep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Derivative orders `(i, j, k)` in `(x, y, t)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MultiIndex(pub [u8; 3]);

impl MultiIndex {
    pub const ZERO: MultiIndex = MultiIndex([0, 0, 0]);

    pub const fn new(i: u8, j: u8, k: u8) -> Self {
        MultiIndex([i, j, k])
    }

    pub fn unit(dir: Indep) -> Self {
        let mut m = [0; 3];
        m[dir.index()] = 1;
        MultiIndex(m)
    }

    pub fn order(&self) -> u32 {
        self.0.iter().map(|&n| n as u32).sum()
    }

    pub fn get(&self, dir: Indep) -> u8 {
        self.0[dir.index()]
    }

    pub fn bump(&self, dir: Indep) -> Self {
        let mut m = self.0;
        m[dir.index()] += 1;
        MultiIndex(m)
    }

    /// `self - other` when `other <= self` componentwise.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        let mut m = [0; 3];
        for (i, slot) in m.iter_mut().enumerate() {
            *slot = self.0[i].checked_sub(other.0[i])?;
        }
        Some(MultiIndex(m))
    }

    /// Directions with multiplicity, x first.
    pub fn directions(&self) -> impl Iterator<Item = Indep> + '_ {
        Indep::ALL
            .into_iter()
            .flat_map(move |d| std::iter::repeat(d).take(self.get(d) as usize))
    }

    pub(crate) fn suffix(&self) -> String {
        let mut s = String::new();
        for d in Indep::ALL {
            match self.get(d) {
                0 => {}
                n @ 1..=3 => s.extend(std::iter::repeat(d.letter()).take(n as usize)),
                n => {
                    s.push(d.letter());
                    s.push_str(&n.to_string());
                }
            }
        }
        s
    }
}

impl Add for MultiIndex {
    type Output = MultiIndex;
    fn add(self, rhs: MultiIndex) -> MultiIndex {
        MultiIndex([self.0[0] + rhs.0[0], self.0[1] + rhs.0[1], self.0[2] + rhs.0[2]])
    }
}

/// A jet coordinate: a partial derivative of a dependent variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JetVar {
    pub dep: DepVar,
    pub index: MultiIndex,
}

impl JetVar {
    pub const fn new(dep: DepVar, index: MultiIndex) -> Self {
        JetVar { dep, index }
    }

    pub const fn u(i: u8, j: u8, k: u8) -> Self {
        JetVar::new(DepVar::U, MultiIndex::new(i, j, k))
    }

    pub const fn v(i: u8, j: u8, k: u8) -> Self {
        JetVar::new(DepVar::V, MultiIndex::new(i, j, k))
    }

    pub fn order(&self) -> u32 {
        self.index.order()
    }

    /// Not `u_tx` and not one of its differential consequences.
    pub fn is_normal(&self) -> bool {
        !(self.index.0[0] >= 1 && self.index.0[2] >= 1)
    }

    pub fn derive(&self, dir: Indep) -> JetVar {
        JetVar::new(self.dep, self.index.bump(dir))
    }
}

impl fmt::Display for JetVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.index == MultiIndex::ZERO {
            f.write_str(self.dep.name())
        } else {
            write!(f, "{}_{}", self.dep.name(), self.index.suffix())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normal_jets() {
        assert!(JetVar::u(0, 0, 0).is_normal());
        assert!(JetVar::u(6, 0, 0).is_normal());
        assert!(JetVar::u(0, 1, 1).is_normal());
        assert!(!JetVar::u(1, 0, 1).is_normal());
        assert!(!JetVar::u(3, 2, 1).is_normal());
    }

    #[test]
    fn display() {
        assert_eq!(JetVar::u(1, 0, 1).to_string(), "u_xt");
        assert_eq!(JetVar::u(6, 0, 0).to_string(), "u_x6");
        assert_eq!(JetVar::u(4, 1, 0).to_string(), "u_x4y");
        assert_eq!(JetVar::v(0, 2, 0).to_string(), "v_yy");
    }

    #[test]
    fn multiindex_sum_commutes() {
        let a = MultiIndex::new(2, 0, 1);
        let b = MultiIndex::new(6, 1, 0);
        assert_eq!(a + b, b + a);
        assert_eq!((a + b).order(), 10);
    }
}
