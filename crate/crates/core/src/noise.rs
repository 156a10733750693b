//! Laplace noise, its tail bound, and privacy-parameter accounting.
//!
//! Every `log` in the noise formulas is the natural logarithm.

use rand::RngCore;

use crate::error::{Error, Result};

/// `(ε, δ)` privacy parameters plus the utility failure probability `γ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PrivacyBudget {
    epsilon: f64,
    delta: f64,
    gamma: f64,
}

impl PrivacyBudget {
    pub fn new(epsilon: f64, delta: f64, gamma: f64) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(Error::param(format!("epsilon must be > 0, got {epsilon}")));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::param(format!("delta must be in (0,1), got {delta}")));
        }
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::param(format!("gamma must be in (0,1), got {gamma}")));
        }
        Ok(PrivacyBudget {
            epsilon,
            delta,
            gamma,
        })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }
}

/// Locations and scales of the two Laplace families a mechanism draws from,
/// together with the per-part budget `ε′` they were derived from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseParams {
    pub epsilon_prime: f64,
    pub mu0: f64,
    pub sigma0: f64,
    pub mu1: f64,
    pub sigma1: f64,
}

/// Laplace distribution with location `mu` and scale `b > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Laplace {
    mu: f64,
    b: f64,
}

impl Laplace {
    pub fn new(mu: f64, b: f64) -> Result<Self> {
        if !(b > 0.0 && b.is_finite()) || !mu.is_finite() {
            return Err(Error::param(format!("Laplace({mu}, {b}) needs finite mu and b > 0")));
        }
        Ok(Laplace { mu, b })
    }

    pub fn centered(b: f64) -> Result<Self> {
        Laplace::new(0.0, b)
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn scale(&self) -> f64 {
        self.b
    }

    /// Inverse CDF at `u ∈ (0, 1)`.
    pub fn quantile(&self, u: f64) -> f64 {
        let t = u - 0.5;
        if t == 0.0 {
            return self.mu;
        }
        self.mu - self.b * t.signum() * (1.0 - 2.0 * t.abs()).ln()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let z = (x - self.mu) / self.b;
        if z < 0.0 {
            0.5 * z.exp()
        } else {
            1.0 - 0.5 * (-z).exp()
        }
    }

    /// One draw; consumes exactly one `u64` from the stream.
    pub fn sample<R: RngCore + ?Sized>(&self, rng: &mut R) -> f64 {
        self.quantile(uniform_open01(rng))
    }
}

/// Uniform on the open interval (0, 1) from the top 53 bits of one `u64`.
pub fn uniform_open01<R: RngCore + ?Sized>(rng: &mut R) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

pub fn sample_laplace<R: RngCore + ?Sized>(mu: f64, b: f64, rng: &mut R) -> Result<f64> {
    Ok(Laplace::new(mu, b)?.sample(rng))
}

/// With probability at least `1 − γ`, `n_vars` i.i.d. `Lap(0, b)` draws all
/// have magnitude below `b · ln(n_vars / γ)`.
pub fn laplace_max_bound(n_vars: usize, b: f64, gamma: f64) -> f64 {
    debug_assert!(n_vars >= 1 && b > 0.0 && gamma > 0.0 && gamma < 1.0);
    b * (n_vars as f64 / gamma).ln()
}

/// Per-query ε so that `k` ε-DP queries compose to `(epsilon_total,
/// delta_prime)`-DP under advanced composition.
pub fn compose_advanced(epsilon_total: f64, k: usize, delta_prime: f64) -> f64 {
    debug_assert!(k >= 1 && delta_prime > 0.0 && delta_prime < 1.0);
    epsilon_total / (8.0 * k as f64 * (1.0 / delta_prime).ln()).sqrt()
}

/// Noise for the shortcut mechanism on an `n`-vertex graph.
///
/// ε′ = ε/2. Original edges get `Lap(μ₀, σ₀)` with σ₀ = 1/ε′ and
/// μ₀ = σ₀·ln(n²/γ). Shortcut edges get `Lap(μ₁, σ₁)` with
/// σ₁ = 2√2·√n·√ln(1/δ)/ε′ (advanced composition over `n` pairs) and
/// μ₁ = σ₁·ln(n/γ).
pub fn alg1_noise_params(n: usize, budget: &PrivacyBudget) -> NoiseParams {
    let n = n as f64;
    let eps = budget.epsilon / 2.0;
    let sigma0 = 1.0 / eps;
    let mu0 = sigma0 * (n * n / budget.gamma).ln();
    let sigma1 = 2.0 * 2f64.sqrt() * n.sqrt() * (1.0 / budget.delta).ln().sqrt() / eps;
    let mu1 = sigma1 * (n / budget.gamma).ln();
    NoiseParams {
        epsilon_prime: eps,
        mu0,
        sigma0,
        mu1,
        sigma1,
    }
}

/// Noise for the feedback-vertex-set mechanism with `|S| = k`.
///
/// ε′ = ε/3, all noise centred. Cross edges get scale σ₀ = 1/ε′; `S`-pair
/// distances get σ₁ = 2√2·k·√ln(1/δ)/ε′. For `k = 0` no `S`-pair noise is
/// ever drawn and σ₁ is the smallest positive `f64`.
pub fn alg2_noise_params(k: usize, budget: &PrivacyBudget) -> NoiseParams {
    let eps = budget.epsilon / 3.0;
    let sigma1 = if k == 0 {
        f64::MIN_POSITIVE
    } else {
        2.0 * 2f64.sqrt() * k as f64 * (1.0 / budget.delta).ln().sqrt() / eps
    };
    NoiseParams {
        epsilon_prime: eps,
        mu0: 0.0,
        sigma0: 1.0 / eps,
        mu1: 0.0,
        sigma1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed::rng_from_seed;

    fn budget(e: f64, d: f64, g: f64) -> PrivacyBudget {
        PrivacyBudget::new(e, d, g).unwrap()
    }

    #[test]
    fn budget_validation() {
        assert!(PrivacyBudget::new(0.0, 0.1, 0.1).is_err());
        assert!(PrivacyBudget::new(1.0, 1.0, 0.1).is_err());
        assert!(PrivacyBudget::new(1.0, 0.1, 0.0).is_err());
        assert!(PrivacyBudget::new(1.0, 0.1, 0.1).is_ok());
        assert!(Laplace::new(0.0, 0.0).is_err());
        assert!(sample_laplace(0.0, -1.0, &mut rng_from_seed(0)).is_err());
    }

    #[test]
    fn quantile_at_half_is_location() {
        let lap = Laplace::new(5.0, 2.0).unwrap();
        assert_eq!(lap.quantile(0.5), 5.0);
        let u = 0.8;
        assert!((lap.cdf(lap.quantile(u)) - u).abs() < 1e-12);
    }

    #[test]
    fn stream_is_reproducible() {
        let draw = |seed| {
            let mut rng = rng_from_seed(seed);
            (0..16)
                .map(|_| sample_laplace(1.0, 3.0, &mut rng).unwrap())
                .collect::<Vec<_>>()
        };
        assert_eq!(draw(11), draw(11));
        assert_ne!(draw(11), draw(12));
    }

    #[test]
    fn kolmogorov_smirnov_sanity() {
        let lap = Laplace::new(-3.0, 0.7).unwrap();
        let mut rng = rng_from_seed(99);
        let mut xs: Vec<f64> = (0..100_000).map(|_| lap.sample(&mut rng)).collect();
        xs.sort_by(f64::total_cmp);
        let n = xs.len() as f64;
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = lap.cdf(x);
                (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks <= 0.01, "KS statistic {ks}");
    }

    #[test]
    fn max_bound_values() {
        assert!((laplace_max_bound(1, 1.0, (-1.0f64).exp()) - 1.0).abs() < 1e-12);
        assert!((laplace_max_bound(100, 2.0, 0.01) - 18.420680743952367).abs() < 1e-9);
    }

    #[test]
    fn advanced_composition_values() {
        assert!((compose_advanced(0.5, 100, 0.01) - 0.00823762786227826).abs() < 1e-12);
        let x = 0.37;
        assert!((compose_advanced(x, 1, (-1.0f64).exp()) - x / 8f64.sqrt()).abs() < 1e-12);
        let per = compose_advanced(0.9, 37, 1e-5);
        let back = per * (8.0 * 37.0 * (1e5f64).ln()).sqrt();
        assert!((back - 0.9).abs() < 1e-12);
    }

    #[test]
    fn alg1_params_reference_point() {
        let p = alg1_noise_params(100, &budget(1.0, 0.01, 0.01));
        assert_eq!(p.epsilon_prime, 0.5);
        assert!((p.sigma0 - 2.0).abs() < 1e-9);
        assert!((p.mu0 - 27.631021115928547).abs() < 1e-9);
        assert!((p.sigma1 - 121.3941703508117).abs() < 1e-9);
        assert!((p.mu1 - 1118.0816281046352).abs() < 1e-9);
        assert_eq!(p.mu1, p.sigma1 * (100.0f64 / 0.01).ln());
        assert_eq!(p.mu0, p.sigma0 * (100.0f64 * 100.0 / 0.01).ln());
    }

    #[test]
    fn alg1_params_scaling() {
        let b = budget(1.0, 0.01, 0.01);
        let p = alg1_noise_params(100, &b);
        let q = alg1_noise_params(200, &b);
        assert!((q.sigma1 / p.sigma1 - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(q.sigma0, p.sigma0);
        let r = alg1_noise_params(100, &budget(2.0, 0.01, 0.01));
        assert!((r.sigma0 - p.sigma0 / 2.0).abs() < 1e-12);
        assert!((r.sigma1 - p.sigma1 / 2.0).abs() < 1e-12);
    }

    #[test]
    fn alg2_params_reference_point() {
        let p = alg2_noise_params(10, &budget(3.0, 0.01, 0.01));
        assert_eq!(p.epsilon_prime, 1.0);
        assert!((p.sigma0 - 1.0).abs() < 1e-9);
        assert!((p.sigma1 - 60.69708517540585).abs() < 1e-9);
        assert_eq!((p.mu0, p.mu1), (0.0, 0.0));
        let empty = alg2_noise_params(0, &budget(3.0, 0.01, 0.01));
        assert!(empty.sigma1 > 0.0);
    }
}
