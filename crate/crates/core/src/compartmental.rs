//! Generators for symmetric diffusion chains and small reaction networks.
//!
//! The n-compartment chain with exchange rate k has the tridiagonal state
//! matrix with -k at the ends, -2k inside, and k on the off-diagonals. Its
//! spectrum and eigenvectors have closed forms (a discrete cosine basis),
//! which makes the chains convenient ground truth for the eigensolver and a
//! ready source of exact lumpings.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::lti::LtiSystem;

/// Parameters of a diffusion chain: `n` compartments in a row, nearest
/// neighbours exchanging at rate `k` in both directions.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainSpec {
    pub n: usize,
    pub k: f64,
}

/// First-order transfer between two species at a positive rate.
#[derive(Debug, Clone, PartialEq)]
pub struct Reaction {
    pub from: usize,
    pub to: usize,
    pub rate: f64,
}

/// A list of species and first-order transfers between them.
#[derive(Debug, Clone, PartialEq)]
pub struct ReactionNetwork {
    pub species: Vec<String>,
    pub reactions: Vec<Reaction>,
}

impl ChainSpec {
    pub fn new(n: usize, k: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::UnsupportedChainLength(n));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::NonPositive { name: "k", value: k });
        }
        Ok(ChainSpec { n, k })
    }
}

/// Builds the chain system with B = C = identity (every compartment both
/// drivable and observed) and labels X1..Xn.
pub fn gen_chain(spec: &ChainSpec) -> LtiSystem {
    let (n, k) = (spec.n, spec.k);
    let mut a = Matrix::zeros(n, n);
    for i in 0..n {
        a[(i, i)] = if i == 0 || i == n - 1 { -k } else { -2.0 * k };
        if i + 1 < n {
            a[(i, i + 1)] = k;
            a[(i + 1, i)] = k;
        }
    }
    let labels = (1..=n).map(|i| format!("X{i}")).collect();
    LtiSystem::new(a, Matrix::identity(n), Matrix::identity(n))
        .expect("chain shapes are consistent")
        .with_labels(labels)
        .expect("one label per state")
}

/// Eigenvalues of the chain state matrix in ascending order:
/// `-4 k sin^2((h - 1) pi / (2 n))` for h = 1..n.
pub fn chain_spectrum(spec: &ChainSpec) -> Vec<f64> {
    let (n, k) = (spec.n, spec.k);
    let mut values: Vec<f64> = (0..n)
        .map(|h| {
            let s = (h as f64 * std::f64::consts::PI / (2.0 * n as f64)).sin();
            -4.0 * k * s * s
        })
        .collect();
    values.sort_by(|a, b| a.partial_cmp(b).unwrap());
    values
}

/// Orthonormal eigenvector rows of the chain state matrix.
///
/// Row eta (1-based) belongs to the eigenvalue
/// `-4 k sin^2((eta - 1) pi / (2 n))`, so the first row is the flat vector
/// of the conserved total. Entries follow the cosine closed form
/// `sqrt(2/n) cos((2 q - 1)(eta - 1) pi / (2 n))`; each row is normalized
/// to a positive leading entry.
pub fn chain_eigenvectors(spec: &ChainSpec) -> Matrix {
    let n = spec.n;
    let mut f = Matrix::zeros(n, n);
    for q in 0..n {
        f[(0, q)] = 1.0 / (n as f64).sqrt();
    }
    let scale = (2.0 / n as f64).sqrt();
    for eta in 1..n {
        for q in 0..n {
            let angle = (2 * q + 1) as f64 * eta as f64 * std::f64::consts::PI
                / (2.0 * n as f64);
            f[(eta, q)] = scale * angle.cos();
        }
        // The leading cosine is positive for every row, but keep the sign
        // rule explicit.
        if f[(eta, 0)] < 0.0 {
            for q in 0..n {
                f[(eta, q)] = -f[(eta, q)];
            }
        }
    }
    f
}

/// The displayed two-row lumping pattern for chains: rows built from 2s and
/// 0s (and the middle 1s for n = 3) that merge the chain into a pair of
/// super-compartments.
///
/// Defined for n = 3 and for every even n; other lengths have no such
/// integer pattern and are rejected.
pub fn standard_two_row_m(n: usize) -> Result<Matrix> {
    if n == 3 {
        return Matrix::from_rows(&[vec![2.0, 1.0, 0.0], vec![0.0, 1.0, 2.0]]);
    }
    if n >= 2 && n.is_multiple_of(2) {
        // 1 +- f2 with the period-four sign pattern (-1, 1, 1, -1) of the
        // eigenvector at eigenvalue -2k.
        const PATTERN: [f64; 4] = [-1.0, 1.0, 1.0, -1.0];
        let mut rows = vec![vec![0.0; n], vec![0.0; n]];
        for q in 0..n {
            let f2 = PATTERN[q % 4];
            rows[0][q] = 1.0 + f2;
            rows[1][q] = 1.0 - f2;
        }
        return Matrix::from_rows(&rows);
    }
    Err(Error::UnsupportedChainLength(n))
}

/// Assembles the state matrix of a reaction network: each transfer moves
/// mass out of its source column into its target, so every column sums to
/// zero. B = C = identity.
pub fn network_to_system(net: &ReactionNetwork) -> Result<LtiSystem> {
    let n = net.species.len();
    if n == 0 {
        return Err(Error::InvalidShape("network has no species".into()));
    }
    let mut a = Matrix::zeros(n, n);
    for (index, reaction) in net.reactions.iter().enumerate() {
        if reaction.from >= n {
            return Err(Error::UnknownSpecies {
                index: reaction.from,
                count: n,
            });
        }
        if reaction.to >= n {
            return Err(Error::UnknownSpecies {
                index: reaction.to,
                count: n,
            });
        }
        if reaction.from == reaction.to {
            return Err(Error::SelfLoop { index });
        }
        if !(reaction.rate > 0.0 && reaction.rate.is_finite()) {
            return Err(Error::NonPositive {
                name: "reaction rate",
                value: reaction.rate,
            });
        }
        a[(reaction.to, reaction.from)] += reaction.rate;
        a[(reaction.from, reaction.from)] -= reaction.rate;
    }
    LtiSystem::new(a, Matrix::identity(n), Matrix::identity(n))?
        .with_labels(net.species.clone())
}

/// The chain written out as a reaction network: X1 <-> X2 <-> ... <-> Xn
/// with rate k in both directions.
pub fn chain_to_network(spec: &ChainSpec) -> ReactionNetwork {
    let species = (1..=spec.n).map(|i| format!("X{i}")).collect();
    let mut reactions = Vec::with_capacity(2 * (spec.n - 1));
    for i in 0..spec.n - 1 {
        reactions.push(Reaction {
            from: i,
            to: i + 1,
            rate: spec.k,
        });
        reactions.push(Reaction {
            from: i + 1,
            to: i,
            rate: spec.k,
        });
    }
    ReactionNetwork { species, reactions }
}
