//! The polynomial zonal wavelet family.
//!
//! At scale ρ the wavelet Ψ_ρ has squared coefficient mass ρ·N(n,l)·γ_l(ρ)
//! in degree l, where
//!
//! ```text
//! γ_0(ρ) = χ_[1,2](ρ)
//! γ_l(ρ) = l(1−ρ)^{l−1}          ρ ∈ (0, 1/(l+1))
//!        = l^{l+1}/(l+1)^{l−1}   ρ ∈ [1/(l+1), 1/l)
//!        = 0                     ρ ≥ 1/l
//! ```
//!
//! Each γ_l integrates to 1 over (0, ∞), and the tail ∫_R^∞ γ_l equals
//! (1−R)^l for R ≤ 1/(l+1), which is what makes the truncated synthesis an
//! Abel–Poisson type summation.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::harmonics::SphereParams;

/// γ_l on the middle band, l^{l+1}/(l+1)^{l−1} = l²·(l/(l+1))^{l−1}.
pub fn plateau_height(l: usize) -> f64 {
    debug_assert!(l > 0);
    let lf = l as f64;
    if l <= 30 {
        lf.powi(l as i32 + 1) / (lf + 1.0).powi(l as i32 - 1)
    } else {
        ((lf + 1.0) * lf.ln() - (lf - 1.0) * (lf + 1.0).ln()).exp()
    }
}

/// Scale profile γ_l(ρ).
pub fn gamma(l: usize, rho: f64) -> f64 {
    if l == 0 {
        return if (1.0..=2.0).contains(&rho) { 1.0 } else { 0.0 };
    }
    let lf = l as f64;
    if rho <= 0.0 || rho >= 1.0 / lf {
        0.0
    } else if rho >= 1.0 / (lf + 1.0) {
        plateau_height(l)
    } else {
        lf * (1.0 - rho).powi(l as i32 - 1)
    }
}

/// Closed-form tail ∫_R^∞ γ_l(ρ) dρ.
pub fn gamma_tail(l: usize, r: f64) -> f64 {
    let r = r.max(0.0);
    if l == 0 {
        return if r <= 1.0 {
            1.0
        } else if r <= 2.0 {
            2.0 - r
        } else {
            0.0
        };
    }
    let lf = l as f64;
    if r >= 1.0 / lf {
        0.0
    } else if r <= 1.0 / (lf + 1.0) {
        (1.0 - r).powf(lf)
    } else {
        plateau_height(l) * (1.0 / lf - r)
    }
}

/// a_l^0(Ψ_ρ) = √(ρ·N(n,l)·γ_l(ρ)); all other coefficients of degree l vanish.
pub fn wavelet_coefficient(p: &SphereParams, l: usize, rho: f64) -> Result<f64> {
    let g = gamma(l, rho);
    if g == 0.0 {
        return Ok(0.0);
    }
    let dim = p.dim_harmonics(l)? as f64;
    Ok((rho * dim * g).sqrt())
}

/// Largest degree carried by Ψ_ρ, or `None` for ρ > 2 where Ψ_ρ vanishes.
pub fn polynomial_degree(rho: f64) -> Option<usize> {
    if !(rho > 0.0) || rho > 2.0 {
        return None;
    }
    if rho >= 1.0 {
        return Some(0);
    }
    // γ_l(ρ) > 0 iff ρ < 1/l; start from the real-arithmetic answer and fix
    // up against the same floating comparison used in `gamma`.
    let mut l = ((1.0 / rho).ceil() as usize).saturating_sub(1).max(1);
    while rho >= 1.0 / l as f64 && l > 1 {
        l -= 1;
    }
    while rho < 1.0 / (l + 1) as f64 {
        l += 1;
    }
    Some(l)
}

/// Per-degree mass σ_l(ρ) = ρ·γ_l(ρ) of Ψ_ρ; only nonzero degrees are stored.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveletSymbol {
    rho: f64,
    entries: BTreeMap<usize, f64>,
}

impl WaveletSymbol {
    pub fn new(rho: f64, lmax: usize) -> Result<Self> {
        if !(rho > 0.0) || !rho.is_finite() {
            return Err(Error::InvalidArgument(format!("scale must be positive, got {rho}")));
        }
        let mut entries = BTreeMap::new();
        if let Some(top) = polynomial_degree(rho) {
            for l in 0..=top.min(lmax) {
                let s = rho * gamma(l, rho);
                if s > 0.0 {
                    entries.insert(l, s);
                }
            }
        }
        Ok(Self { rho, entries })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn entries(&self) -> &BTreeMap<usize, f64> {
        &self.entries
    }

    pub fn get(&self, l: usize) -> f64 {
        self.entries.get(&l).copied().unwrap_or(0.0)
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.entries.keys().next_back().copied()
    }

    fn coefficients(&self, mode: KernelMode) -> Vec<f64> {
        let len = self.max_degree().map_or(0, |d| d + 1);
        let mut out = vec![0.0; len];
        for (&l, &s) in &self.entries {
            out[l] = match mode {
                KernelMode::Reconstruction => s,
                KernelMode::Wavelet => s.sqrt(),
            };
        }
        out
    }
}

/// Shorthand for [`WaveletSymbol::new`].
pub fn symbol(rho: f64, lmax: usize) -> Result<WaveletSymbol> {
    WaveletSymbol::new(rho, lmax)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelMode {
    /// Ψ_ρ itself, coefficients √σ_l.
    Wavelet,
    /// The zonal product Ψ_ρ ∗̂ Ψ̄_ρ, coefficients σ_l.
    Reconstruction,
}

/// Σ_l c_l·((λ+l)/λ)·C_l(t) with c_l taken from the symbol according to `mode`.
pub fn evaluate_kernel(p: &SphereParams, s: &WaveletSymbol, t: f64, mode: KernelMode) -> f64 {
    p.zonal_sum(&s.coefficients(mode), t)
}
