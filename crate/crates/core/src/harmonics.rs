//! Hyperspherical-harmonic bookkeeping on S^n and Gegenbauer numerics.
//!
//! The Gegenbauer index tied to S^n is λ = (n−1)/2, so that the reproducing
//! kernel of the degree-l harmonic space is `((λ+l)/λ)·C_l^λ(x·y)`.

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereParams {
    n: u32,
    lambda: f64,
}

impl SphereParams {
    /// Parameters for S^n. `n = 1` is rejected: λ = 0 makes `(λ+l)/λ` singular.
    pub fn new(n: u32) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidDimension(n));
        }
        Ok(Self {
            n,
            lambda: (n as f64 - 1.0) / 2.0,
        })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `(λ+l)/λ`, evaluated as `(n+2l−1)/(n−1)`.
    pub fn reproducing_factor(&self, l: usize) -> f64 {
        (self.n as f64 + 2.0 * l as f64 - 1.0) / (self.n as f64 - 1.0)
    }

    /// Dimension N(n,l) of the space of degree-l harmonics on S^n, exact.
    pub fn dim_harmonics(&self, l: usize) -> Result<u128> {
        let overflow = || Error::Overflow {
            what: "dim_harmonics",
            n: self.n,
            l,
        };
        let binom = self.gegenbauer_at_one(l).map_err(|_| overflow())?;
        // N = binom(n+l-2, l) * (n+2l-1) / (n-1); the division is exact.
        let num = binom
            .checked_mul(self.n as u128 + 2 * l as u128 - 1)
            .ok_or_else(overflow)?;
        let den = self.n as u128 - 1;
        debug_assert_eq!(num % den, 0);
        Ok(num / den)
    }

    /// C_l^λ(1) = (n+l−2)! / ((n−2)! l!), exact.
    pub fn gegenbauer_at_one(&self, l: usize) -> Result<u128> {
        binomial(self.n as u128 + l as u128 - 2, l as u128).ok_or(Error::Overflow {
            what: "gegenbauer_at_one",
            n: self.n,
            l,
        })
    }

    /// C_l^λ(t) by the three-term recurrence.
    pub fn gegenbauer(&self, l: usize, t: f64) -> f64 {
        let lam = self.lambda;
        let mut prev = 1.0;
        if l == 0 {
            return prev;
        }
        let mut cur = 2.0 * lam * t;
        for k in 1..l {
            let kf = k as f64;
            let next = (2.0 * (kf + lam) * t * cur - (kf + 2.0 * lam - 1.0) * prev) / (kf + 1.0);
            prev = cur;
            cur = next;
        }
        cur
    }

    /// All of C_0(t), …, C_lmax(t).
    pub fn gegenbauer_all(&self, lmax: usize, t: f64) -> Vec<f64> {
        let lam = self.lambda;
        let mut out = Vec::with_capacity(lmax + 1);
        out.push(1.0);
        if lmax >= 1 {
            out.push(2.0 * lam * t);
        }
        for k in 1..lmax {
            let kf = k as f64;
            let next = (2.0 * (kf + lam) * t * out[k] - (kf + 2.0 * lam - 1.0) * out[k - 1])
                / (kf + 1.0);
            out.push(next);
        }
        out
    }

    /// Σ_l c_l·((λ+l)/λ)·C_l(t) in one recurrence pass.
    pub fn zonal_sum(&self, coeffs: &[f64], t: f64) -> f64 {
        let lam = self.lambda;
        let mut acc = 0.0;
        let (mut prev, mut cur) = (0.0, 1.0);
        for (l, &c) in coeffs.iter().enumerate() {
            if l == 1 {
                prev = cur;
                cur = 2.0 * lam * t;
            } else if l > 1 {
                let kf = (l - 1) as f64;
                let next =
                    (2.0 * (kf + lam) * t * cur - (kf + 2.0 * lam - 1.0) * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
            }
            if c != 0.0 {
                acc += c * self.reproducing_factor(l) * cur;
            }
        }
        acc
    }

    /// ((λ+l)/λ)·C_l(1)/N(n,l); equals 1 for every l.
    pub fn kernel_bound_identity(&self, l: usize) -> Result<f64> {
        let c1 = self.gegenbauer_at_one(l)? as f64;
        let dim = self.dim_harmonics(l)? as f64;
        Ok(self.reproducing_factor(l) * c1 / dim)
    }

    /// ∫_{−1}^{1} (1−t²)^{λ−1/2} dt = √π·Γ(n/2)/Γ((n+1)/2).
    pub fn weight_integral(&self) -> f64 {
        let (mut k, mut value) = if self.n.is_multiple_of(2) {
            (2, 2.0)
        } else {
            (3, std::f64::consts::FRAC_PI_2)
        };
        while k < self.n {
            value *= k as f64 / (k as f64 + 1.0);
            k += 2;
        }
        value
    }

    /// Squared norm h_l = ∫ C_l² (1−t²)^{λ−1/2} dt, computed with a rule of `m ≥ l+1` nodes.
    pub fn gegenbauer_norm_sq(&self, rule: &QuadratureRule, l: usize) -> f64 {
        rule.integrate(|t| {
            let c = self.gegenbauer(l, t);
            c * c
        })
    }

    /// Coefficient β_k of the monic recurrence p_{k+1} = t·p_k − β_k·p_{k−1}.
    fn recurrence_beta(&self, k: usize) -> f64 {
        let kf = k as f64;
        let lam = self.lambda;
        kf * (kf + 2.0 * lam - 1.0) / (4.0 * (kf + lam) * (kf + lam - 1.0))
    }

    /// m-node Gauss rule for the weight (1−t²)^{λ−1/2}.
    pub fn gauss_gegenbauer(&self, m: usize) -> Result<QuadratureRule> {
        if m == 0 {
            return Err(Error::InvalidArgument("quadrature needs at least one node".into()));
        }
        let beta: Vec<f64> = (0..m).map(|k| if k == 0 { 0.0 } else { self.recurrence_beta(k) }).collect();
        let sqrt_beta: Vec<f64> = beta.iter().map(|b| b.sqrt()).collect();
        let p0 = 1.0 / self.weight_integral().sqrt();

        // Eigenvalues of the Jacobi matrix (zero diagonal) below x.
        let count_below = |x: f64| -> usize {
            let mut count = 0;
            let mut q = -x;
            if q < 0.0 {
                count += 1;
            }
            for &b in &beta[1..] {
                let denom = if q == 0.0 { f64::EPSILON * 1e-3 } else { q };
                q = -x - b / denom;
                if q < 0.0 {
                    count += 1;
                }
            }
            count
        };

        // Orthonormal p_m and its derivative, plus Σ_{k<m} p_k².
        let eval = |x: f64| -> (f64, f64, f64) {
            let (mut p_prev, mut p) = (0.0, p0);
            let (mut d_prev, mut d) = (0.0, 0.0);
            let mut sum_sq = 0.0;
            for k in 0..m {
                sum_sq += p * p;
                let a_next = if k + 1 < m { sqrt_beta[k + 1] } else { self.recurrence_beta(m).sqrt() };
                let a_cur = sqrt_beta[k];
                let p_next = (x * p - a_cur * p_prev) / a_next;
                let d_next = (p + x * d - a_cur * d_prev) / a_next;
                p_prev = p;
                p = p_next;
                d_prev = d;
                d = d_next;
            }
            (p, d, sum_sq)
        };

        let mut nodes = vec![0.0; m];
        let mut weights = vec![0.0; m];
        let half = m / 2;
        for i in 0..half {
            // i-th smallest eigenvalue, bracketed in (−1, 0).
            let (mut lo, mut hi) = (-1.0_f64, 0.0_f64);
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if count_below(mid) > i {
                    hi = mid;
                } else {
                    lo = mid;
                }
                if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(lo.abs()) {
                    break;
                }
            }
            let mut x = 0.5 * (lo + hi);
            let (p, d, _) = eval(x);
            let step = if d != 0.0 { p / d } else { f64::NAN };
            if !step.is_finite() || step.abs() > 1e-8 {
                return Err(Error::NodeConvergence { index: i, count: m });
            }
            x -= step;
            let (_, _, sum_sq) = eval(x);
            nodes[i] = x;
            weights[i] = 1.0 / sum_sq;
            nodes[m - 1 - i] = -x;
            weights[m - 1 - i] = weights[i];
        }
        if m % 2 == 1 {
            let (_, _, sum_sq) = eval(0.0);
            nodes[half] = 0.0;
            weights[half] = 1.0 / sum_sq;
        }
        if nodes.windows(2).any(|w| w[0] >= w[1]) {
            let index = nodes.windows(2).position(|w| w[0] >= w[1]).unwrap_or(0);
            return Err(Error::NodeConvergence { index, count: m });
        }
        Ok(QuadratureRule {
            nodes,
            weights,
            lambda: self.lambda,
        })
    }
}

fn binomial(top: u128, k: u128) -> Option<u128> {
    let k = k.min(top - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc = binom(top-k+i-1, i-1) here; the product divides exactly by i.
        acc = acc.checked_mul(top - k + i)? / i;
    }
    Some(acc)
}

/// Gauss rule on [−1, 1] for the weight (1−t²)^{λ−1/2}.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    lambda: f64,
}

impl QuadratureRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Plain Gauss–Legendre integral of `f` over [a, b]; only valid for λ = 1/2.
    pub(crate) fn integrate_on<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        debug_assert!((self.lambda - 0.5).abs() < 1e-15);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self.integrate(|x| f(mid + half * x))
    }
}
