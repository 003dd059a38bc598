//! Potts-model community detection by simulated annealing.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{CommunityError, Partition};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinglassOptions {
    /// Number of available spin states (upper bound on communities).
    pub q_max: usize,
    /// Resolution: weight of the configuration-model null term.
    pub gamma: f64,
    pub t_start: f64,
    pub t_stop: f64,
    /// Geometric cooling factor applied after each temperature step.
    pub cooling: f64,
    /// Full Metropolis sweeps performed at each temperature.
    pub sweeps_per_temperature: usize,
}

impl Default for SpinglassOptions {
    fn default() -> Self {
        SpinglassOptions {
            q_max: 25,
            gamma: 1.0,
            t_start: 1.0,
            t_stop: 0.01,
            cooling: 0.99,
            sweeps_per_temperature: 10,
        }
    }
}

impl SpinglassOptions {
    fn validate(&self) -> Result<(), CommunityError> {
        let bad = |m: &str| Err(CommunityError::InvalidParameter(m.to_string()));
        if self.q_max < 2 {
            return bad("q_max must be at least 2");
        }
        if !(self.cooling > 0.0 && self.cooling < 1.0) {
            return bad("cooling factor must lie in (0, 1)");
        }
        if !(self.t_stop > 0.0 && self.t_stop < self.t_start) {
            return bad("temperatures must satisfy 0 < t_stop < t_start");
        }
        if !(self.gamma >= 0.0 && self.gamma.is_finite()) {
            return bad("gamma must be a non-negative number");
        }
        if self.sweeps_per_temperature == 0 {
            return bad("at least one sweep per temperature is required");
        }
        Ok(())
    }
}

/// `H(σ) = -Σ_{i<j} (w_ij - γ s_i s_j / 2W) δ(σ_i, σ_j)`.
pub fn hamiltonian(g: &Graph, p: &Partition, gamma: f64) -> f64 {
    let two_w = 2.0 * g.total_weight();
    if two_w <= 0.0 {
        return 0.0;
    }
    let strengths = g.strengths();
    let internal: f64 = g
        .edges()
        .iter()
        .filter(|e| p.community_of(e.source) == p.community_of(e.target))
        .map(|e| e.weight)
        .sum();
    let mut total = vec![0.0; p.community_count()];
    let mut squares = vec![0.0; p.community_count()];
    for (v, &s) in strengths.iter().enumerate() {
        total[p.community_of(v)] += s;
        squares[p.community_of(v)] += s * s;
    }
    let null: f64 = total
        .iter()
        .zip(&squares)
        .map(|(t, sq)| (t * t - sq) / 2.0)
        .sum();
    -(internal - gamma * null / two_w)
}

struct State<'a> {
    graph: &'a Graph,
    strengths: Vec<f64>,
    spins: Vec<usize>,
    state_strength: Vec<f64>,
    // scratch: weight from the current vertex to each state
    link: Vec<f64>,
    gamma_over_two_w: f64,
}

impl State<'_> {
    fn load_links(&mut self, v: usize) {
        self.link.iter_mut().for_each(|x| *x = 0.0);
        for (u, w) in self.graph.neighbors(v) {
            self.link[self.spins[u]] += w;
        }
    }

    /// Energy change for moving `v` to `target`; requires `load_links(v)`.
    fn delta(&self, v: usize, target: usize) -> f64 {
        let current = self.spins[v];
        if target == current {
            return 0.0;
        }
        let s = self.strengths[v];
        let stay = self.link[current] - self.gamma_over_two_w * s * (self.state_strength[current] - s);
        let go = self.link[target] - self.gamma_over_two_w * s * self.state_strength[target];
        stay - go
    }

    fn move_to(&mut self, v: usize, target: usize) {
        let s = self.strengths[v];
        self.state_strength[self.spins[v]] -= s;
        self.state_strength[target] += s;
        self.spins[v] = target;
    }
}

/// Minimizes the Potts Hamiltonian with single-spin Metropolis updates
/// under geometric cooling, then quenches at zero temperature until no
/// single move lowers the energy. Empty states are dropped. The result is
/// fully determined by `seed`.
pub fn spinglass(g: &Graph, options: &SpinglassOptions, seed: u64) -> Result<Partition, CommunityError> {
    options.validate()?;
    let n = g.vertex_count();
    if n <= 1 {
        return Ok(Partition::single(n));
    }
    let components = g.connected_components().len();
    if components > 1 {
        return Err(CommunityError::Disconnected { components });
    }
    let q = options.q_max;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let strengths = g.strengths();
    let spins: Vec<usize> = (0..n).map(|_| rng.gen_range(0..q)).collect();
    let mut state_strength = vec![0.0; q];
    for (v, &s) in spins.iter().enumerate() {
        state_strength[s] += strengths[v];
    }
    let mut state = State {
        graph: g,
        gamma_over_two_w: options.gamma / (2.0 * g.total_weight()),
        strengths,
        spins,
        state_strength,
        link: vec![0.0; q],
    };

    let mut order: Vec<usize> = (0..n).collect();
    let mut temperature = options.t_start;
    while temperature > options.t_stop {
        order.shuffle(&mut rng);
        for _ in 0..options.sweeps_per_temperature {
            for &v in &order {
                state.load_links(v);
                // Uniform proposal among the other q - 1 states.
                let mut target = rng.gen_range(0..q - 1);
                if target >= state.spins[v] {
                    target += 1;
                }
                let delta = state.delta(v, target);
                let accept = delta <= 0.0 || rng.gen::<f64>() < (-delta / temperature).exp();
                if accept {
                    state.move_to(v, target);
                }
            }
        }
        temperature *= options.cooling;
    }

    // Zero-temperature quench: steepest single-spin descent.
    let eps = 1e-12 * g.total_weight().max(1.0);
    for _ in 0..1000 {
        let mut moved = false;
        for v in 0..n {
            state.load_links(v);
            let mut best = (0.0, state.spins[v]);
            for target in 0..q {
                let d = state.delta(v, target);
                if d < best.0 - eps {
                    best = (d, target);
                }
            }
            if best.1 != state.spins[v] {
                state.move_to(v, best.1);
                moved = true;
            }
        }
        if !moved {
            break;
        }
    }
    Ok(Partition::from_labels(&state.spins))
}
