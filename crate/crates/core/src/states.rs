//! Bell-diagonal two-qubit states and their negativity.
//!
//! A Bell mixture `sum_i c_i |B_i><B_i|` over `(Phi+, Phi-, Psi+, Psi-)` is
//! equivalently `(I + sum_i a_i sigma_i (x) sigma_i) / 4`. In the
//! computational basis `|00>, |01>, |10>, |11>` every such state, and every
//! state reached from one by dephasing, is an X-matrix: nonzero only on the
//! diagonal and the anti-diagonal. Partial transposition maps an X-matrix to
//! another X-matrix, which splits into two 2x2 Hermitian blocks, so all the
//! spectra needed here have closed forms.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::dynamics::EnvTopology;
use crate::error::{domain, Error, Result};
use crate::processes::SeededRng;

const SUM_TOL: f64 = 1e-12;
const MEMBERSHIP_TOL: f64 = 1e-12;
const HERMITIAN_TOL: f64 = 1e-12;
const TRACE_TOL: f64 = 1e-12;
const PSD_TOL: f64 = 1e-10;

/// Weights of the `Phi+`, `Phi-`, `Psi+`, `Psi-` projectors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BellMixture {
    c: [f64; 4],
}

impl BellMixture {
    pub const PHI_PLUS: Self = Self {
        c: [1.0, 0.0, 0.0, 0.0],
    };
    pub const PHI_MINUS: Self = Self {
        c: [0.0, 1.0, 0.0, 0.0],
    };
    pub const PSI_PLUS: Self = Self {
        c: [0.0, 0.0, 1.0, 0.0],
    };
    pub const PSI_MINUS: Self = Self {
        c: [0.0, 0.0, 0.0, 1.0],
    };
    pub const MAXIMALLY_MIXED: Self = Self { c: [0.25; 4] };

    pub fn new(c: [f64; 4]) -> Result<Self> {
        if c.iter().any(|x| !x.is_finite() || *x < -MEMBERSHIP_TOL) {
            return Err(Error::InvalidMixture(format!("negative weight in {c:?}")));
        }
        let sum: f64 = c.iter().sum();
        if (sum - 1.0).abs() > SUM_TOL {
            return Err(Error::InvalidMixture(format!(
                "weights sum to {sum}, not 1"
            )));
        }
        Ok(Self { c })
    }

    pub fn weights(&self) -> [f64; 4] {
        self.c
    }

    /// Negativity of the undephased state, `max(0, 2 max_i c_i - 1)`.
    pub fn initial_negativity(&self) -> f64 {
        negativity_bell_mixture(self, 1.0, EnvTopology::Independent)
            .expect("x = 1 is in the domain")
    }
}

impl fmt::Display for BellMixture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [c1, c2, c3, c4] = self.c;
        write!(f, "c={c1},{c2},{c3},{c4}")
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid state `{input}`: {reason} (offending token `{token}`)")]
pub struct ParseStateError {
    pub input: String,
    pub token: String,
    pub reason: String,
}

impl FromStr for BellMixture {
    type Err = ParseStateError;

    /// Parses `phi+`, `phi-`, `psi+`, `psi-`, `mixed` or `c=c1,c2,c3,c4`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let fail = |token: &str, reason: String| ParseStateError {
            input: s.to_string(),
            token: token.to_string(),
            reason,
        };
        let trimmed = s.trim();
        match trimmed.to_ascii_lowercase().as_str() {
            "phi+" => return Ok(Self::PHI_PLUS),
            "phi-" => return Ok(Self::PHI_MINUS),
            "psi+" => return Ok(Self::PSI_PLUS),
            "psi-" => return Ok(Self::PSI_MINUS),
            "mixed" => return Ok(Self::MAXIMALLY_MIXED),
            _ => {}
        }
        let list = trimmed.strip_prefix("c=").ok_or_else(|| {
            fail(
                trimmed,
                "expected phi+, phi-, psi+, psi-, mixed or c=c1,c2,c3,c4".into(),
            )
        })?;
        let parts: Vec<&str> = list.split(',').collect();
        if parts.len() != 4 {
            return Err(fail(
                list,
                format!("expected 4 weights, got {}", parts.len()),
            ));
        }
        let mut c = [0.0; 4];
        for (slot, part) in c.iter_mut().zip(&parts) {
            *slot = part
                .trim()
                .parse()
                .map_err(|_| fail(part, "not a number".into()))?;
        }
        Self::new(c).map_err(|e| fail(list, e.to_string()))
    }
}

/// Diagonal Bloch coordinates `(a1, a2, a3)` of a Bell-diagonal state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochDiagonal {
    a: [f64; 3],
}

impl BlochDiagonal {
    /// Accepts only points of the Bell-state tetrahedron.
    pub fn new(a: [f64; 3]) -> Result<Self> {
        if a.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidMixture(format!(
                "non-finite Bloch vector {a:?}"
            )));
        }
        let b = Self { a };
        b.mixture_weights()?;
        Ok(b)
    }

    pub fn components(&self) -> [f64; 3] {
        self.a
    }

    fn mixture_weights(&self) -> Result<[f64; 4]> {
        let [a1, a2, a3] = self.a;
        let c = [
            0.25 * (1.0 + a1 - a2 + a3),
            0.25 * (1.0 - a1 + a2 + a3),
            0.25 * (1.0 + a1 + a2 - a3),
            0.25 * (1.0 - a1 - a2 - a3),
        ];
        if c.iter().any(|&x| x < -MEMBERSHIP_TOL) {
            return Err(Error::InvalidMixture(format!(
                "Bloch vector {:?} lies outside the tetrahedron",
                self.a
            )));
        }
        Ok(c)
    }
}

pub fn c_to_a(m: &BellMixture) -> BlochDiagonal {
    let [c1, c2, c3, c4] = m.c;
    BlochDiagonal {
        a: [c1 - c2 + c3 - c4, -c1 + c2 + c3 - c4, c1 + c2 - c3 - c4],
    }
}

pub fn a_to_c(b: &BlochDiagonal) -> Result<BellMixture> {
    Ok(BellMixture {
        c: b.mixture_weights()?,
    })
}

/// A two-qubit density matrix in the computational basis, row-major.
///
/// Construction checks Hermiticity, unit trace and positivity, and requires
/// the X shape every state in this crate has.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoQubitDensity {
    m: [[Complex64; 4]; 4],
}

/// Both eigenvalues of the Hermitian block `[[p, q], [q*, s]]`, smaller first.
fn block_eigenvalues(p: f64, s: f64, q: Complex64) -> [f64; 2] {
    let mean = 0.5 * (p + s);
    let radius = (0.5 * (p - s)).hypot(q.norm());
    [mean - radius, mean + radius]
}

fn is_anti_or_main_diagonal(i: usize, j: usize) -> bool {
    i == j || i + j == 3
}

impl TwoQubitDensity {
    pub fn new(m: [[Complex64; 4]; 4]) -> Result<Self> {
        for i in 0..4 {
            for j in 0..4 {
                if !m[i][j].is_finite() {
                    return Err(Error::InvalidDensity(format!(
                        "entry ({i},{j}) is not finite"
                    )));
                }
                if (m[i][j] - m[j][i].conj()).norm() > HERMITIAN_TOL {
                    return Err(Error::InvalidDensity(format!("not Hermitian at ({i},{j})")));
                }
                if !is_anti_or_main_diagonal(i, j) && m[i][j] != Complex64::ZERO {
                    return Err(Error::InvalidDensity(format!(
                        "entry ({i},{j}) breaks the X shape"
                    )));
                }
            }
        }
        let trace: f64 = (0..4).map(|i| m[i][i].re).sum();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::InvalidDensity(format!("trace is {trace}")));
        }
        let rho = Self { m };
        let min_eig = rho.eigenvalues()[0];
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_eig}"
            )));
        }
        Ok(rho)
    }

    /// Builds without validation; callers guarantee the invariants.
    pub(crate) fn from_x_entries(m: [[Complex64; 4]; 4]) -> Self {
        Self { m }
    }

    pub fn entries(&self) -> &[[Complex64; 4]; 4] {
        &self.m
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.m[row][col]
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.m[i][i].re).sum()
    }

    /// Spectrum in ascending order.
    pub fn eigenvalues(&self) -> [f64; 4] {
        let m = &self.m;
        let [a, b] = block_eigenvalues(m[0][0].re, m[3][3].re, m[0][3]);
        let [c, d] = block_eigenvalues(m[1][1].re, m[2][2].re, m[1][2]);
        let mut e = [a, b, c, d];
        e.sort_by(f64::total_cmp);
        e
    }

    /// Transpose on the second qubit: `(ij, kl) -> (il, kj)`.
    pub fn partial_transpose(&self) -> [[Complex64; 4]; 4] {
        let mut out = [[Complex64::ZERO; 4]; 4];
        for row in 0..4 {
            for col in 0..4 {
                let (i, j) = (row >> 1, row & 1);
                let (k, l) = (col >> 1, col & 1);
                out[(i << 1) | l][(k << 1) | j] = self.m[row][col];
            }
        }
        out
    }

    /// Spectrum of the partial transpose in ascending order.
    pub fn partial_transpose_eigenvalues(&self) -> [f64; 4] {
        let pt = self.partial_transpose();
        let [a, b] = block_eigenvalues(pt[0][0].re, pt[3][3].re, pt[0][3]);
        let [c, d] = block_eigenvalues(pt[1][1].re, pt[2][2].re, pt[1][2]);
        let mut e = [a, b, c, d];
        e.sort_by(f64::total_cmp);
        e
    }
}

pub fn density_matrix(m: &BellMixture) -> TwoQubitDensity {
    let [c1, c2, c3, c4] = m.c;
    let z = Complex64::ZERO;
    let re = |x: f64| Complex64::new(x, 0.0);
    let outer_pop = re(0.5 * (c1 + c2));
    let inner_pop = re(0.5 * (c3 + c4));
    let outer_coh = re(0.5 * (c1 - c2));
    let inner_coh = re(0.5 * (c3 - c4));
    TwoQubitDensity::from_x_entries([
        [outer_pop, z, z, outer_coh],
        [z, inner_pop, inner_coh, z],
        [z, inner_coh, inner_pop, z],
        [outer_coh, z, z, outer_pop],
    ])
}

/// `N = 2 |sum of negative partial-transpose eigenvalues|`, clamped to `[0, 1]`.
pub fn negativity(rho: &TwoQubitDensity) -> f64 {
    let neg: f64 = rho
        .partial_transpose_eigenvalues()
        .iter()
        .filter(|&&e| e < 0.0)
        .sum();
    (-2.0 * neg).clamp(0.0, 1.0)
}

/// Closed-form negativity of a Bell mixture after dephasing by factor `x`.
///
/// `x = exp(-4 lambda^2 beta)` for independent environments and
/// `exp(-8 lambda^2 beta)` for a common one; `x = 0` is the `t -> inf` limit.
pub fn negativity_bell_mixture(m: &BellMixture, x: f64, env: EnvTopology) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(domain("x", x, "[0, 1]"));
    }
    let [c1, c2, c3, c4] = m.c;
    let n = match env {
        EnvTopology::Independent => {
            0.5 * ((c1 + c2 + x * (c3 - c4)).abs()
                + (c1 + c2 - x * (c3 - c4)).abs()
                + (x * (c1 - c2) + c3 + c4).abs()
                + (-x * (c1 - c2) + c3 + c4).abs())
                - 1.0
        }
        EnvTopology::Common => {
            0.5 * ((x * (c1 - c2) + c3 + c4).abs()
                + (x * (c2 - c1) + c3 + c4).abs()
                + (1.0 - 2.0 * c3).abs()
                + (1.0 - 2.0 * c4).abs()
                - 2.0)
        }
    };
    Ok(n.clamp(0.0, 1.0))
}

/// Entangled-only draws must have initial negativity above this.
pub const ENTANGLED_THRESHOLD: f64 = 1e-6;

/// Uniform draw on the 3-simplex from normalized exponentials.
pub fn sample_random_mixture(rng: &mut SeededRng, entangled_only: bool) -> BellMixture {
    loop {
        let e = [rng.exp1(), rng.exp1(), rng.exp1(), rng.exp1()];
        let total: f64 = e.iter().sum();
        let m = BellMixture {
            c: e.map(|x| x / total),
        };
        if !entangled_only || m.initial_negativity() > ENTANGLED_THRESHOLD {
            return m;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mix(c: [f64; 4]) -> BellMixture {
        BellMixture::new(c).unwrap()
    }

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn c_to_a_examples() {
        assert_eq!(
            c_to_a(&BellMixture::PHI_PLUS).components(),
            [1.0, -1.0, 1.0]
        );
        assert_eq!(c_to_a(&BellMixture::MAXIMALLY_MIXED).components(), [0.0; 3]);
        assert_eq!(
            c_to_a(&BellMixture::PSI_MINUS).components(),
            [-1.0, -1.0, -1.0]
        );
    }

    #[test]
    fn a_to_c_examples() {
        let b = |a| BlochDiagonal::new(a).unwrap();
        assert_eq!(a_to_c(&b([0.0; 3])).unwrap().weights(), [0.25; 4]);
        assert_eq!(
            a_to_c(&b([1.0, -1.0, 1.0])).unwrap().weights(),
            [1.0, 0.0, 0.0, 0.0]
        );
        assert_eq!(
            a_to_c(&b([0.0, 0.0, 1.0])).unwrap().weights(),
            [0.5, 0.5, 0.0, 0.0]
        );
        assert!(BlochDiagonal::new([1.0, 1.0, 1.0]).is_err());
    }

    #[test]
    fn mixture_validation() {
        assert!(BellMixture::new([0.5, 0.5, 0.1, 0.0]).is_err());
        assert!(BellMixture::new([1.1, -0.1, 0.0, 0.0]).is_err());
        assert!(BellMixture::new([f64::NAN, 0.0, 0.0, 1.0]).is_err());
    }

    #[test]
    fn density_matrix_examples() {
        let rho = density_matrix(&BellMixture::PHI_PLUS);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if (i == 0 || i == 3) && (j == 0 || j == 3) {
                    0.5
                } else {
                    0.0
                };
                assert_eq!(rho.get(i, j), Complex64::new(expected, 0.0));
            }
        }
        let rho = density_matrix(&BellMixture::MAXIMALLY_MIXED);
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j { 0.25 } else { 0.0 };
                assert_eq!(rho.get(i, j).re, expected);
            }
        }
        let rho = density_matrix(&mix([0.1, 0.0, 0.9, 0.0]));
        let half = [0.05, 0.45, 0.45, 0.05];
        for i in 0..4 {
            assert!(close(rho.get(i, i).re, half[i], 1e-16));
            assert!(close(rho.get(i, 3 - i).re, half[i], 1e-16));
        }
    }

    #[test]
    fn negativity_examples() {
        assert!(close(
            negativity(&density_matrix(&BellMixture::PHI_PLUS)),
            1.0,
            1e-15
        ));
        assert_eq!(
            negativity(&density_matrix(&BellMixture::MAXIMALLY_MIXED)),
            0.0
        );
        let n = negativity(&density_matrix(&mix([0.85, 0.05, 0.05, 0.05])));
        assert!(close(n, 0.7, 1e-12), "{n}");
    }

    #[test]
    fn partial_transpose_moves_coherences_between_blocks() {
        let rho = density_matrix(&BellMixture::PHI_PLUS);
        let pt = rho.partial_transpose();
        assert_eq!(pt[1][2].re, 0.5);
        assert_eq!(pt[0][3].re, 0.0);
        assert_eq!(rho.partial_transpose_eigenvalues(), [-0.5, 0.5, 0.5, 0.5]);
    }

    #[test]
    fn density_validation() {
        let mut m = *density_matrix(&BellMixture::PHI_PLUS).entries();
        assert!(TwoQubitDensity::new(m).is_ok());
        m[0][1] = Complex64::new(0.1, 0.0);
        m[1][0] = Complex64::new(0.1, 0.0);
        assert!(TwoQubitDensity::new(m).is_err());
        let mut m = *density_matrix(&BellMixture::PHI_PLUS).entries();
        m[0][3] = Complex64::new(0.6, 0.0);
        m[3][0] = Complex64::new(0.6, 0.0);
        assert!(matches!(
            TwoQubitDensity::new(m),
            Err(Error::InvalidDensity(_))
        ));
        let mut m = *density_matrix(&BellMixture::PHI_PLUS).entries();
        m[0][0] = Complex64::new(0.6, 0.0);
        assert!(TwoQubitDensity::new(m).is_err());
    }

    #[test]
    fn closed_form_examples() {
        for env in [EnvTopology::Independent, EnvTopology::Common] {
            assert_eq!(
                negativity_bell_mixture(&BellMixture::PHI_PLUS, 1.0, env).unwrap(),
                1.0
            );
        }
        let m = mix([0.1, 0.0, 0.9, 0.0]);
        let n = negativity_bell_mixture(&m, 1.0 / 9.0, EnvTopology::Independent).unwrap();
        assert!(n.abs() < 1e-15, "{n}");
        let m = mix([0.0, 0.0, 0.6, 0.4]);
        for x in [1.0, 0.5, 0.1, 0.0] {
            let n = negativity_bell_mixture(&m, x, EnvTopology::Common).unwrap();
            assert!(close(n, 0.2, 1e-15));
        }
        assert!(negativity_bell_mixture(&m, 1.5, EnvTopology::Common).is_err());
        assert!(negativity_bell_mixture(&m, -0.1, EnvTopology::Common).is_err());
    }

    #[test]
    fn simplex_sampling() {
        let root = SeededRng::new(1);
        let n = 10_000;
        let mut sums = [0.0; 4];
        for i in 0..n {
            let m = sample_random_mixture(&mut root.fork(i), false);
            let c = m.weights();
            assert!(c.iter().all(|&x| x >= 0.0));
            assert!(close(c.iter().sum(), 1.0, 1e-15));
            for k in 0..4 {
                sums[k] += c[k];
            }
        }
        // Dirichlet(1,1,1,1) marginal variance is 3/80
        let se = (3.0f64 / 80.0 / n as f64).sqrt();
        for s in sums {
            assert!((s / n as f64 - 0.25).abs() < 4.0 * se);
        }
    }

    #[test]
    fn entangled_draws_have_dominant_weight() {
        let mut rng = SeededRng::new(9);
        for _ in 0..2000 {
            let m = sample_random_mixture(&mut rng, true);
            assert!(m.weights().iter().cloned().fold(0.0, f64::max) > 0.5);
            assert!(negativity(&density_matrix(&m)) > 0.0);
        }
    }

    #[test]
    fn parse_states() {
        assert_eq!(
            "phi+".parse::<BellMixture>().unwrap(),
            BellMixture::PHI_PLUS
        );
        assert_eq!(
            "PSI-".parse::<BellMixture>().unwrap(),
            BellMixture::PSI_MINUS
        );
        assert_eq!(
            "mixed".parse::<BellMixture>().unwrap(),
            BellMixture::MAXIMALLY_MIXED
        );
        assert_eq!(
            "c=0.1,0,0.9,0".parse::<BellMixture>().unwrap().weights(),
            [0.1, 0.0, 0.9, 0.0]
        );
        assert_eq!(
            "c=0.1,x,0.9,0".parse::<BellMixture>().unwrap_err().token,
            "x"
        );
        assert!("c=0.5,0.5".parse::<BellMixture>().is_err());
        assert!("c=0.5,0.5,0.5,0".parse::<BellMixture>().is_err());
        assert_eq!("bell".parse::<BellMixture>().unwrap_err().token, "bell");
    }
}
