//! Fruchterman–Reingold force-directed layout.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::graph::Graph;

pub const DEFAULT_ITERATIONS: usize = 500;
pub const DEFAULT_AREA: f64 = 1.0;

/// Vertex positions in the unit square, indexed by vertex id.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayoutCoordinates {
    pub positions: Vec<(f64, f64)>,
}

impl LayoutCoordinates {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn distance(&self, a: usize, b: usize) -> f64 {
        let (pa, pb) = (self.positions[a], self.positions[b]);
        (pa.0 - pb.0).hypot(pa.1 - pb.1)
    }
}

pub fn fruchterman_reingold(g: &Graph, iterations: usize, seed: u64) -> LayoutCoordinates {
    fruchterman_reingold_with_area(g, iterations, DEFAULT_AREA, seed)
}

/// Attraction `d²/k` along edges, repulsion `k²/d` between all pairs,
/// `k = sqrt(area / n)`, and a displacement cap that cools linearly from
/// a tenth of the frame width to zero. Initial positions are drawn from
/// `seed`; the result is rescaled into the unit square.
pub fn fruchterman_reingold_with_area(g: &Graph, iterations: usize, area: f64, seed: u64) -> LayoutCoordinates {
    let n = g.vertex_count();
    if n == 0 {
        return LayoutCoordinates { positions: Vec::new() };
    }
    let side = area.sqrt();
    let k = (area / n as f64).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pos: Vec<[f64; 2]> = (0..n)
        .map(|_| [rng.gen_range(0.0..side), rng.gen_range(0.0..side)])
        .collect();
    let mut disp = vec![[0.0f64; 2]; n];
    let floor = 1e-9 * side;
    let t0 = side / 10.0;

    for step in 0..iterations {
        let temperature = t0 * (1.0 - step as f64 / iterations as f64);
        disp.iter_mut().for_each(|d| *d = [0.0, 0.0]);
        for u in 0..n {
            for v in u + 1..n {
                let (dx, dy, d) = separation(&pos, u, v, floor);
                let force = k * k / d;
                let (fx, fy) = (dx / d * force, dy / d * force);
                disp[u][0] += fx;
                disp[u][1] += fy;
                disp[v][0] -= fx;
                disp[v][1] -= fy;
            }
        }
        for e in g.edges() {
            let (u, v) = (e.source, e.target);
            let (dx, dy, d) = separation(&pos, u, v, floor);
            let force = d * d / k;
            let (fx, fy) = (dx / d * force, dy / d * force);
            disp[u][0] -= fx;
            disp[u][1] -= fy;
            disp[v][0] += fx;
            disp[v][1] += fy;
        }
        for (p, d) in pos.iter_mut().zip(&disp) {
            let len = d[0].hypot(d[1]);
            if len > 0.0 {
                let scale = len.min(temperature) / len;
                p[0] = (p[0] + d[0] * scale).clamp(0.0, side);
                p[1] = (p[1] + d[1] * scale).clamp(0.0, side);
            }
        }
    }
    LayoutCoordinates {
        positions: rescale(&pos),
    }
}

fn separation(pos: &[[f64; 2]], u: usize, v: usize, floor: f64) -> (f64, f64, f64) {
    let (mut dx, dy) = (pos[u][0] - pos[v][0], pos[u][1] - pos[v][1]);
    let mut d = dx.hypot(dy);
    if d < floor {
        // Coincident points: push apart along x, lower id to the right.
        dx = floor;
        d = floor;
    }
    (dx, dy, d)
}

/// Centers the bounding box and scales its longer side to 1.
fn rescale(pos: &[[f64; 2]]) -> Vec<(f64, f64)> {
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for p in pos {
        for a in 0..2 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    let span = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let center = [(hi[0] + lo[0]) / 2.0, (hi[1] + lo[1]) / 2.0];
    pos.iter()
        .map(|p| {
            if span > 0.0 {
                (
                    0.5 + (p[0] - center[0]) / span,
                    0.5 + (p[1] - center[1]) / span,
                )
            } else {
                (0.5, 0.5)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::GraphBuilder;

    #[test]
    fn single_vertex_is_centered() {
        let mut b = GraphBuilder::new();
        b.vertex("only");
        let layout = fruchterman_reingold(&b.build(), 10, 1);
        assert_eq!(layout.positions, vec![(0.5, 0.5)]);
    }

    #[test]
    fn same_seed_same_layout() {
        let g = barbell();
        assert_eq!(fruchterman_reingold(&g, 200, 5), fruchterman_reingold(&g, 200, 5));
        assert_ne!(fruchterman_reingold(&g, 200, 5), fruchterman_reingold(&g, 200, 6));
    }

    #[test]
    fn coordinates_stay_in_unit_square() {
        let layout = fruchterman_reingold(&complete(12), 100, 3);
        for &(x, y) in &layout.positions {
            assert!(x.is_finite() && y.is_finite());
            assert!((0.0..=1.0).contains(&x) && (0.0..=1.0).contains(&y));
        }
    }

    #[test]
    fn barbell_triangles_cluster() {
        let g = barbell();
        for seed in 0..5 {
            let layout = fruchterman_reingold(&g, DEFAULT_ITERATIONS, seed);
            let (mut intra, mut cross) = (Vec::new(), Vec::new());
            for a in 0..6 {
                for b in a + 1..6 {
                    let d = layout.distance(a, b);
                    if (a < 3) == (b < 3) {
                        intra.push(d);
                    } else {
                        cross.push(d);
                    }
                }
            }
            let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
            assert!(mean(&intra) < mean(&cross), "seed {seed}");
        }
    }
}
