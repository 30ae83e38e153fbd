use std::fmt::Write;

use serde::Serialize;

use super::string::write_chain;
use super::{hj_resolve, plumbing_matrix, HJString, OrbifoldGroupType};
use crate::cohomass::IntersectionForm;
use crate::error::{Error, Result};
use crate::Rational;

/// `⟨c₁, [Σ]⟩ = χ(Σ) + Σ·Σ = 2 + ℓ` for the sphere at the capsule's core.
pub fn capsule_degree(ell: u64) -> Result<u64> {
    if ell < 1 {
        return Err(Error::InvalidModel(
            "central quotient order must be at least 1".into(),
        ));
    }
    let d = 2 + ell;
    assert!(d >= 3);
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Vertex {
    pub label: String,
    /// Self-intersection; `None` for the central sphere unless supplied.
    #[serde(serialize_with = "ser_weight")]
    pub weight: Option<Rational>,
}

fn ser_weight<S: serde::Serializer>(
    w: &Option<Rational>,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    match w {
        Some(r) => s.serialize_some(&r.to_string()),
        None => s.serialize_none(),
    }
}

/// Plumbing graph: vertex 0 is the central sphere.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapsuleTree {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<(usize, usize)>,
}

impl CapsuleTree {
    /// Connected with `|E| = |V| − 1`.
    pub fn is_tree(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 || self.edges.len() + 1 != n {
            return false;
        }
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &self.edges {
            if a >= n || b >= n || a == b {
                return false;
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }

    /// One line per vertex: `id label weight: neighbours`.
    pub fn adjacency_list(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let mut nbrs: Vec<usize> = self
                .edges
                .iter()
                .filter_map(|&(a, b)| {
                    if a == i {
                        Some(b)
                    } else if b == i {
                        Some(a)
                    } else {
                        None
                    }
                })
                .collect();
            nbrs.sort_unstable();
            let w = v.weight.as_ref().map_or("?".to_string(), |r| r.to_string());
            let nbrs: Vec<String> = nbrs.iter().map(|n| n.to_string()).collect();
            writeln!(out, "{i} {} {w}: {}", v.label, nbrs.join(" ")).expect("write to string");
        }
        out
    }
}

/// Combinatorial model of a `Γ`-capsule.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CapsuleModel {
    pub ell: u64,
    pub gamma_check: OrbifoldGroupType,
    pub local_types: Vec<(i64, i64)>,
    pub chains: Vec<HJString>,
    pub tree: CapsuleTree,
    /// Orbifold self-intersection of the central sphere, if known.
    #[serde(serialize_with = "ser_weight")]
    pub central_weight: Option<Rational>,
    pub degree: u64,
}

impl CapsuleModel {
    /// Intersection matrices of the attached chains (the central vertex is
    /// excluded).
    pub fn chain_matrices(&self) -> Vec<IntersectionForm> {
        self.chains
            .iter()
            .map(|c| plumbing_matrix(&c.chain))
            .collect()
    }

    /// `[e,…]` for each chain, one per line.
    pub fn chains_text(&self) -> String {
        let mut out = String::new();
        for (c, (q, p)) in self.chains.iter().zip(&self.local_types) {
            write!(out, "({q},{p}) ").expect("write to string");
            write_chain(&mut out, &c.chain).expect("write to string");
            out.push('\n');
        }
        out
    }
}

/// Attaches the Hirzebruch–Jung chain of each local type `(q_i, p_i)` to
/// a central sphere. The `q_i` must equal the cone orders of `Γ̌`.
pub fn build_capsule(
    ell: u64,
    gamma_check: OrbifoldGroupType,
    local_types: &[(i64, i64)],
    central_weight: Option<Rational>,
) -> Result<CapsuleModel> {
    let degree = capsule_degree(ell)?;
    let gamma_check = gamma_check.validate()?;
    let profile = gamma_check.classify_singularities();
    if profile.len() != local_types.len() {
        return Err(Error::ProfileMismatch(format!(
            "{gamma_check} has {} cone points, {} local types given",
            profile.len(),
            local_types.len()
        )));
    }
    for (i, (&order, &(q, _))) in profile.iter().zip(local_types).enumerate() {
        if q != order as i64 {
            return Err(Error::ProfileMismatch(format!(
                "local type {i} has q = {q}, profile order is {order}"
            )));
        }
    }
    let chains = local_types
        .iter()
        .map(|&(q, p)| hj_resolve(q, p))
        .collect::<Result<Vec<_>>>()?;
    let mut vertices = vec![Vertex {
        label: "S".into(),
        weight: central_weight.clone(),
    }];
    let mut edges = Vec::new();
    for (ci, c) in chains.iter().enumerate() {
        let mut prev = 0;
        for (j, &e) in c.chain.iter().enumerate() {
            let id = vertices.len();
            vertices.push(Vertex {
                label: format!("C{}.{}", ci + 1, j + 1),
                weight: Some(Rational::from_integer((-e).into())),
            });
            edges.push((prev, id));
            prev = id;
        }
    }
    let tree = CapsuleTree { vertices, edges };
    assert!(tree.is_tree(), "capsule plumbing graph must be a tree");
    Ok(CapsuleModel {
        ell,
        gamma_check,
        local_types: local_types.to_vec(),
        chains,
        tree,
        central_weight,
        degree,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degrees() {
        assert_eq!(capsule_degree(1).unwrap(), 3);
        assert_eq!(capsule_degree(2).unwrap(), 4);
        assert_eq!(capsule_degree(10).unwrap(), 12);
        assert!(capsule_degree(0).is_err());
    }

    #[test]
    fn examples() {
        let c = build_capsule(1, OrbifoldGroupType::Cyclic(2), &[(2, 1), (2, 1)], None).unwrap();
        assert_eq!(c.tree.vertices.len(), 3);
        assert_eq!(c.chains_text(), "(2,1) [2]\n(2,1) [2]\n");

        let c = build_capsule(2, OrbifoldGroupType::Trivial, &[], None).unwrap();
        assert_eq!(c.tree.vertices.len(), 1);
        assert!(c.tree.is_tree());

        let c = build_capsule(
            1,
            OrbifoldGroupType::Tetrahedral,
            &[(2, 1), (3, 1), (3, 2)],
            None,
        )
        .unwrap();
        let chains: Vec<Vec<i64>> = c.chains.iter().map(|s| s.chain.clone()).collect();
        assert_eq!(chains, vec![vec![2], vec![3], vec![2, 2]]);
        assert_eq!(c.tree.vertices.len(), 5);
        assert_eq!(
            c.tree.adjacency_list().lines().next().unwrap(),
            "0 S ?: 1 2 3"
        );
    }

    #[test]
    fn mismatches() {
        assert!(matches!(
            build_capsule(1, OrbifoldGroupType::Tetrahedral, &[(2, 1), (3, 1)], None),
            Err(Error::ProfileMismatch(_))
        ));
        assert!(matches!(
            build_capsule(1, OrbifoldGroupType::Cyclic(3), &[(3, 1), (2, 1)], None),
            Err(Error::ProfileMismatch(_))
        ));
    }

    #[test]
    fn tree_check_detects_cycles() {
        let v = |l: &str| Vertex {
            label: l.into(),
            weight: None,
        };
        let t = CapsuleTree {
            vertices: vec![v("a"), v("b"), v("c")],
            edges: vec![(0, 1), (1, 0)],
        };
        assert!(!t.is_tree());
    }
}
