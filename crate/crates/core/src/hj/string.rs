use std::fmt;

use num_integer::Integer;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cohomass::IntersectionForm;
use crate::error::{Error, Result};
use crate::Rational;

/// Resolution string of the cyclic quotient singularity of type `(q, p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HJString {
    pub q: i64,
    pub p: i64,
    /// `e_1, …, e_r`, all at least 2; the curves have self-intersection `−e_j`.
    pub chain: Vec<i64>,
    /// `d_1 = q/p, d_2, …, d_r`.
    #[serde(serialize_with = "ser_rationals")]
    pub intermediates: Vec<Rational>,
}

fn ser_rationals<S: serde::Serializer>(
    v: &[Rational],
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

impl fmt::Display for HJString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_chain(f, &self.chain)
    }
}

pub(crate) fn write_chain(f: &mut impl fmt::Write, chain: &[i64]) -> fmt::Result {
    write!(f, "[")?;
    for (i, e) in chain.iter().enumerate() {
        if i > 0 {
            write!(f, ",")?;
        }
        write!(f, "{e}")?;
    }
    write!(f, "]")
}

/// `d_1 = q/p`, `e_j = ⌈d_j⌉`, `d_{j+1} = 1/(e_j − d_j)`, stopping at the
/// first integral `d_j`.
pub fn hj_resolve(q: i64, p: i64) -> Result<HJString> {
    let bad = |reason: &str| {
        Err(Error::InvalidCyclicType {
            q,
            p,
            reason: reason.into(),
        })
    };
    if q < 2 {
        return bad("q must be at least 2");
    }
    if p <= 0 || p >= q {
        return bad("p must satisfy 0 < p < q");
    }
    if q.gcd(&p) != 1 {
        return bad("gcd(p, q) must be 1");
    }
    let mut d = Rational::new(q.into(), p.into());
    let mut chain = Vec::new();
    let mut intermediates = Vec::new();
    loop {
        let e = d.ceil();
        intermediates.push(d.clone());
        let e_int = i64::try_from(e.to_integer()).expect("chain entry fits i64");
        chain.push(e_int);
        if d.is_integer() {
            break;
        }
        d = (e - d).recip();
    }
    Ok(HJString {
        q,
        p,
        chain,
        intermediates,
    })
}

/// `e_1 − 1/(e_2 − 1/(⋯ − 1/e_r))` as an exact fraction.
pub fn hj_evaluate(chain: &[i64]) -> Result<Rational> {
    if chain.is_empty() {
        return Err(Error::InvalidChain("chain is empty".into()));
    }
    if let Some(e) = chain.iter().find(|&&e| e < 2) {
        return Err(Error::InvalidChain(format!("entry {e} is below 2")));
    }
    let mut acc = Rational::from_integer(chain[chain.len() - 1].into());
    for &e in chain[..chain.len() - 1].iter().rev() {
        // acc ≥ 1 strictly above 1 by induction, so the reciprocal exists.
        assert!(!acc.is_zero());
        acc = Rational::from_integer(e.into()) - acc.recip();
    }
    debug_assert!(acc > Rational::one());
    Ok(acc)
}

/// Intersection matrix of the linear plumbing: `−e_j` on the diagonal and 1
/// between neighbours.
pub fn plumbing_matrix(chain: &[i64]) -> IntersectionForm {
    let n = chain.len();
    let mut m = vec![vec![0i64; n]; n];
    for (i, &e) in chain.iter().enumerate() {
        m[i][i] = -e;
        if i + 1 < n {
            m[i][i + 1] = 1;
            m[i + 1][i] = 1;
        }
    }
    let labels = (1..=n).map(|i| format!("E{i}")).collect();
    IntersectionForm::new(m, labels).expect("plumbing matrix is symmetric")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a.into(), b.into())
    }

    #[test]
    fn hand_traces() {
        assert_eq!(hj_resolve(2, 1).unwrap().chain, vec![2]);
        assert_eq!(hj_resolve(3, 2).unwrap().chain, vec![2, 2]);
        assert_eq!(hj_resolve(5, 2).unwrap().chain, vec![3, 2]);
        let s = hj_resolve(7, 3).unwrap();
        assert_eq!(s.chain, vec![3, 2, 2]);
        assert_eq!(s.intermediates, vec![r(7, 3), r(3, 2), r(2, 1)]);
        assert_eq!(s.to_string(), "[3,2,2]");
    }

    #[test]
    fn evaluation() {
        assert_eq!(hj_evaluate(&[2]).unwrap(), r(2, 1));
        assert_eq!(hj_evaluate(&[2, 2]).unwrap(), r(3, 2));
        assert_eq!(hj_evaluate(&[3, 2, 2]).unwrap(), r(7, 3));
        assert!(hj_evaluate(&[]).is_err());
        assert!(hj_evaluate(&[3, 1]).is_err());
    }

    #[test]
    fn invalid_types() {
        assert!(hj_resolve(4, 2).is_err());
        assert!(hj_resolve(1, 1).is_err());
        assert!(hj_resolve(5, 5).is_err());
        assert!(hj_resolve(5, 0).is_err());
    }

    #[test]
    fn plumbing_layout() {
        let m = plumbing_matrix(&[3, 2, 2]);
        assert_eq!(
            m.matrix,
            vec![vec![-3, 1, 0], vec![1, -2, 1], vec![0, 1, -2]]
        );
    }
}
