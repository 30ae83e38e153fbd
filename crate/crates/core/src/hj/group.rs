use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_complex::Complex;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use super::CLOSURE_CAP;
use crate::error::{Error, Result};
use crate::Rational;

type Gauss = Complex<Rational>;

/// An element of a finite subgroup of `U(2)`, stored exactly.
///
/// Diagonal elements are pairs of angles in turns, reduced to `[0, 1)`:
/// `diag(e^{2πi a}, e^{2πi b})`. Non-diagonal elements are matrices over the
/// Gaussian rationals; any such matrix that happens to be diagonal is
/// normalised to the angle form, so equality is structural.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[allow(clippy::large_enum_variant)]
pub enum GroupElement {
    Diagonal { a: Rational, b: Rational },
    Matrix([[Gauss; 2]; 2]),
}

fn frac(x: Rational) -> Rational {
    let f = &x - x.floor();
    debug_assert!(f >= Rational::zero() && f < Rational::one());
    f
}

fn turns_of_unit(z: &Gauss) -> Option<Rational> {
    let (o, z0) = (Rational::one(), Rational::zero());
    let q = |n: i64| Some(Rational::new(n.into(), 4.into()));
    match (&z.re, &z.im) {
        (re, im) if *re == o && *im == z0 => q(0),
        (re, im) if re.is_zero() && *im == o => q(1),
        (re, im) if *re == -o.clone() && im.is_zero() => q(2),
        (re, im) if re.is_zero() && *im == -o.clone() => q(3),
        _ => None,
    }
}

fn unit_of_turns(t: &Rational) -> Option<Gauss> {
    let four = t * Rational::from_integer(4.into());
    if !four.is_integer() {
        return None;
    }
    let k = (four.to_integer() % 4i32 + 4i32) % 4i32;
    let (o, z) = (Rational::one(), Rational::zero());
    let k: i32 = k.try_into().expect("small");
    Some(match k {
        0 => Complex::new(o, z),
        1 => Complex::new(z, o),
        2 => Complex::new(-o, z),
        _ => Complex::new(z, -o),
    })
}

impl GroupElement {
    pub fn identity() -> Self {
        GroupElement::Diagonal {
            a: Rational::zero(),
            b: Rational::zero(),
        }
    }

    /// `diag(e^{2πi a}, e^{2πi b})`.
    pub fn diagonal(a: Rational, b: Rational) -> Self {
        GroupElement::Diagonal {
            a: frac(a),
            b: frac(b),
        }
    }

    /// `diag(ζ^j, ζ^k)` with `ζ = e^{2πi/n}`.
    pub fn root_pair(n: i64, j: i64, k: i64) -> Self {
        Self::diagonal(
            Rational::new(j.into(), n.into()),
            Rational::new(k.into(), n.into()),
        )
    }

    /// Gaussian-rational matrix, normalised when diagonal.
    pub fn matrix(m: [[Gauss; 2]; 2]) -> Self {
        if m[0][1].is_zero() && m[1][0].is_zero() {
            if let (Some(a), Some(b)) = (turns_of_unit(&m[0][0]), turns_of_unit(&m[1][1])) {
                return GroupElement::Diagonal { a, b };
            }
        }
        GroupElement::Matrix(m)
    }

    fn as_matrix(&self) -> Result<[[Gauss; 2]; 2]> {
        match self {
            GroupElement::Matrix(m) => Ok(m.clone()),
            GroupElement::Diagonal { a, b } => {
                let (Some(x), Some(y)) = (unit_of_turns(a), unit_of_turns(b)) else {
                    return Err(Error::InvalidModel(
                        "diagonal element with roots of unity beyond order 4 cannot be combined with a matrix element"
                            .into(),
                    ));
                };
                Ok([[x, Gauss::zero()], [Gauss::zero(), y]])
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        match (self, other) {
            (GroupElement::Diagonal { a, b }, GroupElement::Diagonal { a: c, b: d }) => {
                Ok(Self::diagonal(a + c, b + d))
            }
            _ => {
                let (x, y) = (self.as_matrix()?, other.as_matrix()?);
                let mut m: [[Gauss; 2]; 2] = Default::default();
                for i in 0..2 {
                    for j in 0..2 {
                        m[i][j] = &x[i][0] * &y[0][j] + &x[i][1] * &y[1][j];
                    }
                }
                Ok(Self::matrix(m))
            }
        }
    }

    /// Scalar matrices `λ·I`.
    pub fn is_scalar(&self) -> bool {
        matches!(self, GroupElement::Diagonal { a, b } if a == b)
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity()
    }

    /// Whether 1 is an eigenvalue, i.e. the element fixes a nonzero vector.
    pub fn has_unit_eigenvalue(&self) -> bool {
        match self {
            GroupElement::Diagonal { a, b } => a.is_zero() || b.is_zero(),
            GroupElement::Matrix(m) => {
                let one = Gauss::one();
                let det = (&m[0][0] - &one) * (&m[1][1] - &one) - &m[0][1] * &m[1][0];
                det.is_zero()
            }
        }
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupElement::Diagonal { a, b } => write!(f, "diag(e^(2pi i {a}), e^(2pi i {b}))"),
            GroupElement::Matrix(m) => write!(
                f,
                "[[{}, {}], [{}, {}]]",
                m[0][0], m[0][1], m[1][0], m[1][1]
            ),
        }
    }
}

/// The cyclic action `(z₁, z₂) ↦ (ζz₁, ζᵖz₂)`, `ζ = e^{2πi/q}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LensAction {
    pub q: i64,
    pub p: i64,
}

impl LensAction {
    /// `(j, jp mod q)` for `j = 0..q`.
    pub fn exponent_pairs(&self) -> Vec<(i64, i64)> {
        (0..self.q)
            .map(|j| (j, (j * self.p).rem_euclid(self.q)))
            .collect()
    }

    pub fn generator(&self) -> GroupElement {
        GroupElement::root_pair(self.q, 1, self.p)
    }

    pub fn elements(&self) -> Vec<GroupElement> {
        self.exponent_pairs()
            .into_iter()
            .map(|(j, k)| GroupElement::root_pair(self.q, j, k))
            .collect()
    }

    /// No non-identity element has eigenvalue 1.
    pub fn is_free(&self) -> bool {
        self.elements()
            .iter()
            .filter(|g| !g.is_identity())
            .all(|g| !g.has_unit_eigenvalue())
    }
}

/// Validates `(q, p)` and checks that the action on `S³` is free.
pub fn lens_generator(q: i64, p: i64) -> Result<LensAction> {
    if q < 2 {
        return Err(Error::InvalidCyclicType {
            q,
            p,
            reason: "q must be at least 2".into(),
        });
    }
    if p <= 0 || p >= q {
        return Err(Error::InvalidCyclicType {
            q,
            p,
            reason: "p must satisfy 0 < p < q".into(),
        });
    }
    let action = LensAction { q, p };
    for (j, k) in action.exponent_pairs().into_iter().skip(1) {
        // j < q, so only the second eigenvalue can be 1: (0, z₂) is fixed.
        if k == 0 {
            return Err(Error::NotFree {
                q,
                p,
                element: j,
                axis: "z2",
            });
        }
    }
    debug_assert_eq!(q.gcd(&p), 1);
    Ok(action)
}

/// All products of the generators, by breadth-first search.
pub fn group_closure(generators: &[GroupElement]) -> Result<Vec<GroupElement>> {
    let id = GroupElement::identity();
    let mut seen: HashSet<GroupElement> = HashSet::from([id.clone()]);
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = g.mul(s)?;
            if seen.insert(h.clone()) {
                if seen.len() > CLOSURE_CAP {
                    return Err(Error::ClosureCapExceeded(CLOSURE_CAP));
                }
                order.push(h.clone());
                queue.push_back(h);
            }
        }
    }
    Ok(order)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct CentralQuotient {
    /// `|Γ|`.
    pub order: usize,
    /// `|Γ ∩ Z(U(2))|`.
    pub ell: usize,
    /// `|Γ̌| = |Γ|/ℓ`.
    pub reduced_order: usize,
}

pub fn central_quotient(generators: &[GroupElement]) -> Result<CentralQuotient> {
    let group = group_closure(generators)?;
    let ell = group.iter().filter(|g| g.is_scalar()).count();
    Ok(CentralQuotient {
        order: group.len(),
        ell,
        reduced_order: group.len() / ell,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(re: i64, im: i64) -> Gauss {
        Complex::new(
            Rational::from_integer(re.into()),
            Rational::from_integer(im.into()),
        )
    }

    #[test]
    fn lens_examples() {
        let a = lens_generator(2, 1).unwrap();
        assert_eq!(a.generator(), GroupElement::root_pair(2, 1, 1));
        assert!(a.generator().is_scalar());
        let b = lens_generator(4, 3).unwrap();
        assert_eq!(b.exponent_pairs()[1], (1, 3));
        assert!(b.is_free());
        assert_eq!(
            lens_generator(4, 2),
            Err(Error::NotFree {
                q: 4,
                p: 2,
                element: 2,
                axis: "z2"
            })
        );
        assert!(!LensAction { q: 6, p: 3 }.is_free());
    }

    #[test]
    fn central_quotient_examples() {
        let l = lens_generator(7, 1).unwrap();
        assert_eq!(
            central_quotient(&[l.generator()]).unwrap(),
            CentralQuotient {
                order: 7,
                ell: 7,
                reduced_order: 1
            }
        );
        let l = lens_generator(5, 2).unwrap();
        assert_eq!(
            central_quotient(&[l.generator()]).unwrap(),
            CentralQuotient {
                order: 5,
                ell: 1,
                reduced_order: 5
            }
        );
        assert_eq!(
            central_quotient(&[]).unwrap(),
            CentralQuotient {
                order: 1,
                ell: 1,
                reduced_order: 1
            }
        );
        // ℤ₆ of type (6, 5) contains −I.
        let l = lens_generator(6, 5).unwrap();
        assert_eq!(central_quotient(&[l.generator()]).unwrap().ell, 2);
    }

    #[test]
    fn quaternion_group() {
        let i = GroupElement::matrix([[g(0, 1), g(0, 0)], [g(0, 0), g(0, -1)]]);
        let j = GroupElement::matrix([[g(0, 0), g(-1, 0)], [g(1, 0), g(0, 0)]]);
        assert!(matches!(i, GroupElement::Diagonal { .. }));
        let cq = central_quotient(&[i, j]).unwrap();
        assert_eq!(
            cq,
            CentralQuotient {
                order: 8,
                ell: 2,
                reduced_order: 4
            }
        );
    }

    #[test]
    fn closure_cap() {
        let big = GroupElement::root_pair(20_011, 1, 2);
        assert_eq!(
            central_quotient(&[big]),
            Err(Error::ClosureCapExceeded(CLOSURE_CAP))
        );
    }
}
