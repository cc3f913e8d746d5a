//! The Toda group action in closed form, the matching ODE, and partial-trace
//! diagnostics along flows.

use crate::bfr::{bfr, BfrPoint};
use crate::error::{Error, Result};
use crate::linalg::{apply_spectral_function, pi_skew, qr_pos, sym_eig, SpectralPair};
use crate::matrix::DenseMatrix;
use crate::sets::validate_proper_subset;
use crate::tolerance::Tolerances;

/// Which representative of `tau` modulo constants to pick.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Coordinates sum to zero.
    ZeroSum,
    /// Largest coordinate is zero.
    ZeroMax,
}

/// A real `n`-vector selecting a Toda flow, meaningful modulo constants.
#[derive(Debug, Clone, PartialEq)]
pub struct TodaDirection(Vec<f64>);

impl TodaDirection {
    pub fn new(tau: Vec<f64>) -> Result<Self> {
        if tau.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self(tau))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// Indicator vector of `set`: 1 on the set, 0 off it.
    pub fn indicator(n: usize, set: &[usize]) -> Self {
        let mut v = vec![0.0; n];
        for &i in set {
            v[i] = 1.0;
        }
        Self(v)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn scaled(&self, t: f64) -> Self {
        Self(self.0.iter().map(|x| x * t).collect())
    }

    pub fn plus(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len());
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// Largest minus smallest coordinate.
    pub fn spread(&self) -> f64 {
        let hi = self.0.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let lo = self.0.iter().copied().fold(f64::INFINITY, f64::min);
        if self.0.is_empty() {
            0.0
        } else {
            hi - lo
        }
    }

    pub fn normalized(&self, mode: Normalization) -> Self {
        normalize_direction(self, mode)
    }
}

pub fn normalize_direction(tau: &TodaDirection, mode: Normalization) -> TodaDirection {
    if tau.is_empty() {
        return tau.clone();
    }
    let shift = match mode {
        Normalization::ZeroSum => tau.0.iter().sum::<f64>() / tau.len() as f64,
        Normalization::ZeroMax => tau.0.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    };
    TodaDirection(tau.0.iter().map(|x| x - shift).collect())
}

/// Options for evaluating the Toda action.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowOptions {
    /// Largest coordinate spread `max(τ) − min(τ)` applied in one QR step.
    /// Larger directions are split into equal substeps and composed with the
    /// group law.
    pub max_step_spread: f64,
}

impl Default for FlowOptions {
    fn default() -> Self {
        Self {
            max_step_spread: 4.0,
        }
    }
}

/// `Φ(τ, S)`: the pair `(Λ, 𝒬(exp(diag τ)·Q))`.
pub fn toda_action(pair: &SpectralPair, tau: &TodaDirection) -> Result<SpectralPair> {
    toda_action_with(pair, tau, &FlowOptions::default())
}

pub fn toda_action_with(
    pair: &SpectralPair,
    tau: &TodaDirection,
    opts: &FlowOptions,
) -> Result<SpectralPair> {
    let n = pair.n();
    if tau.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: tau.len(),
        });
    }
    let sigma = tau.normalized(Normalization::ZeroMax);
    let spread = sigma.spread();
    if spread == 0.0 {
        return Ok(pair.clone());
    }
    let steps = (spread / opts.max_step_spread).ceil().max(1.0) as usize;
    let d: Vec<f64> = sigma
        .as_slice()
        .iter()
        .map(|s| (s / steps as f64).exp())
        .collect();
    let mut q = pair.q().clone();
    for _ in 0..steps {
        q = qr_pos(&q.scale_rows(&d), 0.0)
            .map_err(|e| Error::NumericalBreakdown(format!("QR step failed: {e}")))?
            .q;
    }
    Ok(SpectralPair::from_parts(pair.lambda().to_vec(), q))
}

/// `[s, Π_A p_v(s)]`, the right-hand side of the Toda ODE for the function
/// taking values `v` on the (descending) spectrum of `s`.
pub fn toda_ode_rhs(s: &DenseMatrix, v: &[f64], tol: &Tolerances) -> Result<DenseMatrix> {
    let pair = sym_eig(s, tol)?;
    let p = apply_spectral_function(&pair, v)?;
    Ok(s.commutator(&pi_skew(&p)))
}

/// Classical fixed-step RK4 integration of the Toda ODE up to time `t`.
pub fn integrate_toda_ode(
    s0: &DenseMatrix,
    v: &[f64],
    t: f64,
    steps: usize,
    tol: &Tolerances,
) -> Result<DenseMatrix> {
    if steps == 0 {
        return Err(Error::InvalidArgument("steps must be at least 1".into()));
    }
    if t == 0.0 {
        return Ok(s0.clone());
    }
    let h = t / steps as f64;
    let mut s = s0.clone();
    for _ in 0..steps {
        let k1 = toda_ode_rhs(&s, v, tol)?;
        let k2 = toda_ode_rhs(&(&s + &k1.scale(h / 2.0)), v, tol)?;
        let k3 = toda_ode_rhs(&(&s + &k2.scale(h / 2.0)), v, tol)?;
        let k4 = toda_ode_rhs(&(&s + &k3.scale(h)), v, tol)?;
        let incr = &(&k1 + &k2.scale(2.0)) + &(&k3.scale(2.0) + &k4);
        s = &s + &incr.scale(h / 6.0);
    }
    Ok(s)
}

/// `D_τΦ_S|₀(ρ) = [S, Π_A p_ρ(S)]`, the ODE right-hand side for `p_ρ`.
pub fn toda_action_derivative_at_zero(
    pair: &SpectralPair,
    rho: &TodaDirection,
) -> Result<DenseMatrix> {
    let p = apply_spectral_function(pair, rho.as_slice())?;
    Ok(pair.reconstruct().commutator(&pi_skew(&p)))
}

/// Sum of the coordinates of `x` indexed by `set`.
pub fn partial_trace(x: &[f64], set: &[usize]) -> Result<f64> {
    validate_proper_subset(x.len(), set)?;
    Ok(set.iter().map(|&i| x[i]).sum())
}

/// Derivative at `t = 0` of `t ↦ tr_I(bfr(Φ(t·e_I, S)))`:
/// `2·Σ_{i<j} (λ_i − λ_j)·P_ij²` with `P = p_{e_I}(S)`.
pub fn partial_trace_rate(pair: &SpectralPair, set: &[usize]) -> Result<f64> {
    validate_proper_subset(pair.n(), set)?;
    let n = pair.n();
    let p = apply_spectral_function(pair, TodaDirection::indicator(n, set).as_slice())?;
    let lambda = pair.lambda();
    let mut rate = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            rate += (lambda[i] - lambda[j]) * p[(i, j)] * p[(i, j)];
        }
    }
    Ok(2.0 * rate)
}

/// One sample of a Toda trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub pair: SpectralPair,
    pub bfr: BfrPoint,
}

/// Samples `t ↦ Φ(t·σ, S)` and its BFR image.
pub fn toda_trajectory(
    pair: &SpectralPair,
    sigma: &TodaDirection,
    t_samples: &[f64],
) -> Result<Vec<TrajectoryPoint>> {
    t_samples
        .iter()
        .map(|&t| {
            if !t.is_finite() {
                return Err(Error::NonFinite);
            }
            let moved = toda_action(pair, &sigma.scaled(t))?;
            let image = bfr(&moved);
            Ok(TrajectoryPoint {
                t,
                pair: moved,
                bfr: image,
            })
        })
        .collect()
}
