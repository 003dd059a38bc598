//! Recursive spectral bisection on the modularity matrix.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CommunityError, Partition};
use crate::graph::{Graph, VertexId};

/// Groups up to this size are solved with a dense symmetric eigensolver;
/// larger ones use shifted power iteration.
pub const DENSE_LIMIT: usize = 1024;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeadingEigenvectorOptions {
    /// Convergence tolerance for the power iteration, and the thresholds
    /// below which a group is indivisible: the leading eigenvalue relative
    /// to `‖B^(g)‖₁`, and the realized modularity gain.
    pub tol: f64,
    /// Power-iteration cap for groups larger than [`DENSE_LIMIT`].
    pub max_iter: usize,
}

impl Default for LeadingEigenvectorOptions {
    fn default() -> Self {
        LeadingEigenvectorOptions {
            tol: 1e-10,
            max_iter: 200_000,
        }
    }
}

/// Generalized modularity matrix `B^(g)` restricted to one group.
struct GroupMatrix<'a> {
    graph: &'a Graph,
    members: &'a [VertexId],
    // position of each graph vertex inside `members`, usize::MAX if absent
    position: Vec<usize>,
    strength: Vec<f64>,
    diagonal: Vec<f64>,
    two_w: f64,
}

impl<'a> GroupMatrix<'a> {
    fn new(graph: &'a Graph, members: &'a [VertexId], all_strengths: &[f64], two_w: f64) -> Self {
        let mut position = vec![usize::MAX; graph.vertex_count()];
        for (i, &v) in members.iter().enumerate() {
            position[v] = i;
        }
        let strength: Vec<f64> = members.iter().map(|&v| all_strengths[v]).collect();
        let group_strength: f64 = strength.iter().sum();
        let diagonal = members
            .iter()
            .zip(&strength)
            .map(|(&v, &s)| {
                let inside: f64 = graph
                    .neighbors(v)
                    .filter(|&(u, _)| position[u] != usize::MAX)
                    .map(|(_, w)| w)
                    .sum();
                inside - s * group_strength / two_w
            })
            .collect();
        GroupMatrix {
            graph,
            members,
            position,
            strength,
            diagonal,
            two_w,
        }
    }

    fn len(&self) -> usize {
        self.members.len()
    }

    fn entry(&self, i: usize, j: usize) -> f64 {
        let w = if i == j {
            0.0
        } else {
            self.graph
                .edge_weight(self.members[i], self.members[j])
                .unwrap_or(0.0)
        };
        let mut b = w - self.strength[i] * self.strength[j] / self.two_w;
        if i == j {
            b -= self.diagonal[i];
        }
        b
    }

    fn one_norm(&self) -> f64 {
        (0..self.len())
            .map(|j| (0..self.len()).map(|i| self.entry(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    fn multiply(&self, x: &[f64], out: &mut [f64]) {
        let projection: f64 = self.strength.iter().zip(x).map(|(s, x)| s * x).sum::<f64>() / self.two_w;
        for (i, &v) in self.members.iter().enumerate() {
            let adjacent: f64 = self
                .graph
                .neighbors(v)
                .filter_map(|(u, w)| {
                    let j = self.position[u];
                    (j != usize::MAX).then(|| w * x[j])
                })
                .sum();
            out[i] = adjacent - self.strength[i] * projection - self.diagonal[i] * x[i];
        }
    }

    fn quadratic_form(&self, x: &[f64]) -> f64 {
        let mut y = vec![0.0; x.len()];
        self.multiply(x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a * b).sum()
    }

    fn dense_leading_eigenpair(&self) -> (f64, Vec<f64>) {
        let n = self.len();
        let b = DMatrix::from_fn(n, n, |i, j| self.entry(i, j));
        let eigen = SymmetricEigen::new(b);
        // Most positive eigenvalue; the lowest index wins exact ties.
        let mut best = 0;
        for k in 1..n {
            if eigen.eigenvalues[k] > eigen.eigenvalues[best] {
                best = k;
            }
        }
        (eigen.eigenvalues[best], eigen.eigenvectors.column(best).iter().copied().collect())
    }

    /// Most positive eigenpair by power iteration on `B^(g) + ‖B^(g)‖₁ I`.
    fn power_iteration(&self, shift: f64, options: &LeadingEigenvectorOptions) -> Result<(f64, Vec<f64>), CommunityError> {
        let n = self.len();
        // A fixed non-uniform start: the all-ones vector is an exact
        // eigenvector (eigenvalue 0) whenever the group is a whole component.
        let mut rng = ChaCha8Rng::seed_from_u64(0x05ee_d1e5);
        let mut x: Vec<f64> = (0..n).map(|_| rng.gen_range(0.5..1.5)).collect();
        normalize(&mut x);
        let mut y = vec![0.0; n];
        let mut residual = f64::INFINITY;
        for _ in 0..options.max_iter {
            self.multiply(&x, &mut y);
            for (yi, xi) in y.iter_mut().zip(&x) {
                *yi += shift * xi;
            }
            if normalize(&mut y) == 0.0 {
                // B^(g) = -‖B‖₁ I: every direction is an eigenvector.
                return Ok((-shift, x));
            }
            residual = x
                .iter()
                .zip(&y)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            std::mem::swap(&mut x, &mut y);
            if residual < options.tol {
                let eigenvalue = self.quadratic_form(&x);
                return Ok((eigenvalue, x));
            }
        }
        Err(CommunityError::NoConvergence {
            iterations: options.max_iter,
            residual,
        })
    }
}

fn normalize(x: &mut [f64]) -> f64 {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        for v in x.iter_mut() {
            *v /= norm;
        }
    }
    norm
}

/// Newman's leading-eigenvector method without a refinement pass.
///
/// Each connected component starts as its own group. A group is bisected by
/// the signs of the leading eigenvector of its generalized modularity
/// matrix; it stays whole when the leading eigenvalue or the realized
/// modularity gain does not exceed `tol`.
pub fn leading_eigenvector(g: &Graph, options: &LeadingEigenvectorOptions) -> Result<Partition, CommunityError> {
    let n = g.vertex_count();
    let two_w = 2.0 * g.total_weight();
    if two_w <= 0.0 {
        return Ok(Partition::singletons(n));
    }
    let strengths = g.strengths();
    let mut pending: std::collections::VecDeque<Vec<VertexId>> =
        g.connected_components().components.into_iter().collect();
    let mut leaves = Vec::new();
    while let Some(group) = pending.pop_front() {
        if group.len() < 2 {
            leaves.push(group);
            continue;
        }
        match bisect(g, &group, &strengths, two_w, options)? {
            Some((left, right)) => {
                pending.push_back(left);
                pending.push_back(right);
            }
            None => leaves.push(group),
        }
    }
    Ok(Partition::from_groups(n, &leaves))
}

fn bisect(
    g: &Graph,
    group: &[VertexId],
    strengths: &[f64],
    two_w: f64,
    options: &LeadingEigenvectorOptions,
) -> Result<Option<(Vec<VertexId>, Vec<VertexId>)>, CommunityError> {
    let matrix = GroupMatrix::new(g, group, strengths, two_w);
    let scale = matrix.one_norm();
    let (eigenvalue, mut x) = if group.len() <= DENSE_LIMIT {
        matrix.dense_leading_eigenpair()
    } else {
        matrix.power_iteration(scale, options)?
    };
    if eigenvalue <= options.tol * scale {
        return Ok(None);
    }
    // Near-zero entries join the side of the smallest-id vertex, which is
    // oriented positive.
    let zero = 10.0 * options.tol;
    if let Some(first) = x.iter().position(|v| v.abs() > zero) {
        if x[first] < 0.0 {
            x.iter_mut().for_each(|v| *v = -*v);
        }
    }
    let signs: Vec<f64> = x
        .iter()
        .map(|&v| if v < -zero { -1.0 } else { 1.0 })
        .collect();
    let gain = matrix.quadratic_form(&signs) / (2.0 * two_w);
    if gain <= options.tol {
        return Ok(None);
    }
    let (mut left, mut right) = (Vec::new(), Vec::new());
    for (&v, &s) in group.iter().zip(&signs) {
        if s > 0.0 {
            left.push(v);
        } else {
            right.push(v);
        }
    }
    if left.is_empty() || right.is_empty() {
        return Ok(None);
    }
    Ok(Some((left, right)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::modularity;
    use crate::graph::fixtures::*;

    fn run(g: &Graph) -> Partition {
        leading_eigenvector(g, &LeadingEigenvectorOptions::default()).unwrap()
    }

    #[test]
    fn complete_graph_is_indivisible() {
        assert_eq!(run(&complete(4)).community_count(), 1);
    }

    #[test]
    fn barbell_splits_into_triangles() {
        let g = barbell();
        let p = run(&g);
        assert_eq!(p.membership(), &[0, 0, 0, 1, 1, 1]);
        assert!((modularity(&g, &p).unwrap() - 5.0 / 14.0).abs() < 1e-15);
    }

    #[test]
    fn components_are_separated() {
        let p = run(&two_triangles());
        assert_eq!(p.membership(), &[0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn edgeless_graph_gives_singletons() {
        let mut b = crate::graph::GraphBuilder::new();
        b.vertex("a");
        b.vertex("b");
        assert_eq!(run(&b.build()).community_count(), 2);
    }

    #[test]
    fn eigenpair_matches_dense_oracle_on_barbell() {
        // B for the whole barbell; the leading eigenvector is antisymmetric
        // across the bridge.
        let g = barbell();
        let members: Vec<_> = (0..6).collect();
        let s = g.strengths();
        let m = GroupMatrix::new(&g, &members, &s, 14.0);
        let dense = m.dense_leading_eigenpair();
        let power = m.power_iteration(m.one_norm(), &LeadingEigenvectorOptions::default()).unwrap();
        for (lambda, x) in [dense, power] {
            let mut residual: f64 = 0.0;
            for i in 0..6 {
                let bx: f64 = (0..6).map(|j| m.entry(i, j) * x[j]).sum();
                residual = residual.max((bx - lambda * x[i]).abs());
            }
            assert!(residual < 1e-8, "{residual}");
            assert!(x[0] * x[5] < 0.0);
        }
    }

    #[test]
    fn iteration_cap_is_reported() {
        let g = barbell();
        let members: Vec<_> = (0..6).collect();
        let m = GroupMatrix::new(&g, &members, &g.strengths(), 14.0);
        let opts = LeadingEigenvectorOptions {
            tol: 1e-15,
            max_iter: 2,
        };
        assert!(matches!(
            m.power_iteration(m.one_norm(), &opts),
            Err(CommunityError::NoConvergence { .. })
        ));
    }
}
