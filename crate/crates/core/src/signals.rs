//! Zonal test signals: construction, spectral ingestion, and sup-norm
//! measurement of window-truncated reconstructions.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::harmonics::SphereParams;
use crate::transform::{partial_weights, ScaleWindow, SpectralSignal};

/// Default relative tolerance on the ingestion re-synthesis residual.
pub const DEFAULT_INGEST_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Ingested,
}

/// Zonal function Z(t) = Σ_l b_l·((λ+l)/λ)·C_l(t).
#[derive(Debug, Clone, PartialEq)]
pub struct ZonalProfile {
    params: SphereParams,
    coeffs: Vec<f64>,
    provenance: Provenance,
}

impl ZonalProfile {
    pub fn new(params: SphereParams, coeffs: Vec<f64>, provenance: Provenance) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::InvalidArgument("profile needs at least one coefficient".into()));
        }
        if let Some(l) = coeffs.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidArgument(format!("coefficient b_{l} is not finite")));
        }
        Ok(Self {
            params,
            coeffs,
            provenance,
        })
    }

    pub fn params(&self) -> &SphereParams {
        &self.params
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn bandlimit(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Σ|b_l|·((λ+l)/λ)·C_l(1), an upper bound for |Z| on [−1, 1].
    pub fn sup_bound(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(l, b)| b.abs() * self.params.reproducing_factor(l) * self.params.gegenbauer(l, 1.0))
            .sum()
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.params.zonal_sum(&self.coeffs, t)
    }

    /// Coefficient-wise sum; the shorter profile is zero-padded.
    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.params != other.params {
            return Err(Error::Mismatch("profiles live on different spheres".into()));
        }
        let len = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..len)
            .map(|l| self.coeffs.get(l).unwrap_or(&0.0) + other.coeffs.get(l).unwrap_or(&0.0))
            .collect();
        Ok(Self {
            params: self.params,
            coeffs,
            provenance: Provenance::Analytic,
        })
    }

    /// The profile with b_l replaced by `weights[l]·b_l`.
    pub fn weighted(&self, weights: &[f64]) -> Self {
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(l, b)| b * weights.get(l).copied().unwrap_or(0.0))
            .collect();
        Self {
            params: self.params,
            coeffs,
            provenance: self.provenance,
        }
    }
}

/// Shorthand for [`ZonalProfile::evaluate`].
pub fn evaluate_profile(z: &ZonalProfile, t: f64) -> f64 {
    z.evaluate(t)
}

#[derive(Debug, Clone)]
pub struct Ingestion {
    pub profile: ZonalProfile,
    /// max |f − Z| at the quadrature nodes, relative to max |f| there.
    pub residual: f64,
    /// Set when `residual` exceeds the requested tolerance.
    pub warning: Option<String>,
}

/// Projects `f` onto degrees 0..=lmax with an m-node Gauss–Gegenbauer rule.
pub fn ingest_profile<F: Fn(f64) -> f64>(
    p: &SphereParams,
    f: F,
    lmax: usize,
    m: usize,
    tolerance: f64,
) -> Result<Ingestion> {
    if m < lmax + 1 {
        return Err(Error::InvalidArgument(format!(
            "ingestion of degree {lmax} needs at least {} nodes, got {m}",
            lmax + 1
        )));
    }
    let rule = p.gauss_gegenbauer(m)?;
    let values: Vec<f64> = rule.nodes().iter().map(|&t| f(t)).collect();
    if let Some(i) = values.iter().position(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "profile is not finite at t = {}",
            rule.nodes()[i]
        )));
    }

    let mut projections = vec![0.0; lmax + 1];
    let mut norms = vec![0.0; lmax + 1];
    for ((&t, &w), &v) in rule.nodes().iter().zip(rule.weights()).zip(&values) {
        for (l, c) in p.gegenbauer_all(lmax, t).into_iter().enumerate() {
            projections[l] += w * v * c;
            norms[l] += w * c * c;
        }
    }
    let coeffs = (0..=lmax)
        .map(|l| projections[l] / (p.reproducing_factor(l) * norms[l]))
        .collect();
    let profile = ZonalProfile::new(*p, coeffs, Provenance::Ingested)?;

    let scale = values.iter().fold(0.0_f64, |a, v| a.max(v.abs())).max(f64::MIN_POSITIVE);
    let residual = rule
        .nodes()
        .iter()
        .zip(&values)
        .map(|(&t, v)| (profile.evaluate(t) - v).abs())
        .fold(0.0, f64::max)
        / scale;
    let warning = (residual > tolerance).then(|| {
        format!("ingestion residual {residual:e} exceeds tolerance {tolerance:e} (lmax = {lmax}, nodes = {m})")
    });
    Ok(Ingestion {
        profile,
        residual,
        warning,
    })
}

pub const BUILTIN_NAMES: [&str; 4] = ["const", "exp", "abs", "cos<k>"];

/// Builtin profile by name: `const`, `exp`, `abs`, or `cos<k>` for cos(kπt).
///
/// `abs` and `cos<k>` are ingested with 2·(lmax+1) nodes at the default tolerance.
pub fn builtin_profile(name: &str, p: &SphereParams, lmax: usize) -> Result<Ingestion> {
    builtin_profile_with_tolerance(name, p, lmax, DEFAULT_INGEST_TOLERANCE)
}

pub fn builtin_profile_with_tolerance(
    name: &str,
    p: &SphereParams,
    lmax: usize,
    tolerance: f64,
) -> Result<Ingestion> {
    let nodes = 2 * (lmax + 1);
    let ingest = |f: &dyn Fn(f64) -> f64| ingest_profile(p, f, lmax, nodes, tolerance);
    match name {
        "const" => {
            let mut coeffs = vec![0.0; lmax + 1];
            coeffs[0] = 1.0;
            Ok(Ingestion {
                profile: ZonalProfile::new(*p, coeffs, Provenance::Analytic)?,
                residual: 0.0,
                warning: None,
            })
        }
        "exp" => Ok(Ingestion {
            profile: ZonalProfile::new(*p, exp_coefficients(p, lmax), Provenance::Analytic)?,
            residual: 0.0,
            warning: None,
        }),
        "abs" => ingest(&f64::abs),
        _ => match name.strip_prefix("cos").and_then(|k| k.parse::<u32>().ok()) {
            Some(k) => {
                let freq = k as f64 * std::f64::consts::PI;
                ingest(&move |t: f64| (freq * t).cos())
            }
            None => Err(Error::UnknownProfile {
                name: name.to_string(),
                available: BUILTIN_NAMES.to_vec(),
            }),
        },
    }
}

/// Coefficients of e^t: b_l = Γ(λ+1)·2^λ·I_{l+λ}(1), summed as the positive series
/// Σ_k 2^{−(2k+l)} / (k!·Π_{j=1}^{k+l}(λ+j)).
///
/// Quadrature cannot resolve these below ~1e−16 relative, and they decay
/// factorially, so the analytic series is used.
pub fn exp_coefficients(p: &SphereParams, lmax: usize) -> Vec<f64> {
    let lam = p.lambda();
    let mut leading = 1.0; // 2^{-l} / Π_{j=1}^{l}(λ+j)
    (0..=lmax)
        .map(|l| {
            if l > 0 {
                leading *= 0.5 / (lam + l as f64);
            }
            let mut term = leading;
            let mut sum = 0.0;
            for k in 1..200 {
                sum += term;
                term *= 0.25 / (k as f64 * (lam + (l + k) as f64));
                if term < sum * 1e-18 {
                    break;
                }
            }
            sum + term
        })
        .collect()
}

/// Profiles available by name, with `cos<k>` instantiated at k = 1..=3.
pub fn builtin_profiles(p: &SphereParams, lmax: usize) -> Result<Vec<(String, ZonalProfile)>> {
    ["const", "exp", "abs", "cos1", "cos2", "cos3"]
        .iter()
        .map(|&name| Ok((name.to_string(), builtin_profile(name, p, lmax)?.profile)))
        .collect()
}

/// Chebyshev–Lobatto points cos(πi/(size−1)), i = 0..size, in increasing order.
pub fn chebyshev_grid(size: usize) -> Vec<f64> {
    if size == 1 {
        return vec![0.0];
    }
    (0..size)
        .rev()
        .map(|i| (std::f64::consts::PI * i as f64 / (size - 1) as f64).cos())
        .collect()
}

/// max over a Chebyshev grid of |Z(t) − Z_R(t)|, where Z_R is Z with the
/// synthesis weights of window `w` applied.
///
/// This is a lower bound on the sup-norm distance.
pub fn sup_error(z: &ZonalProfile, w: ScaleWindow, grid: usize) -> Result<f64> {
    if grid < 256 {
        return Err(Error::InvalidArgument(format!("sup_error needs a grid of at least 256 points, got {grid}")));
    }
    let reconstruction = z.weighted(&partial_weights(w, z.bandlimit()));
    Ok(chebyshev_grid(grid)
        .into_iter()
        .map(|t| (z.evaluate(t) - reconstruction.evaluate(t)).abs())
        .fold(0.0, f64::max))
}

/// ‖Z − Z_R‖ in L²(S^n) with normalized surface measure, where ‖degree-l part‖² = b_l²·N(n,l).
pub fn l2_residual_profile(z: &ZonalProfile, w: ScaleWindow) -> Result<f64> {
    let weights = partial_weights(w, z.bandlimit());
    let mut total = 0.0;
    for (l, (&b, &wl)) in z.coeffs().iter().zip(&weights).enumerate() {
        let d = 1.0 - wl;
        total += d * d * b * b * z.params().dim_harmonics(l)? as f64;
    }
    Ok(total.sqrt())
}

/// The profile as a spectral signal: block l carries b_l·√N(n,l) in its first slot.
pub fn profile_to_signal(z: &ZonalProfile) -> Result<SpectralSignal> {
    let mut s = SpectralSignal::zeros(*z.params(), z.bandlimit())?;
    for (l, &b) in z.coeffs().iter().enumerate() {
        let dim = z.params().dim_harmonics(l)? as f64;
        s.block_mut(l)[0] = Complex64::new(b * dim.sqrt(), 0.0);
    }
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: u32) -> SphereParams {
        SphereParams::new(n).unwrap()
    }

    #[test]
    fn ingest_constant() {
        for n in [2, 3, 5] {
            let ing = ingest_profile(&p(n), |_| 1.0, 10, 11, 1e-9).unwrap();
            assert!((ing.profile.coeffs()[0] - 1.0).abs() < 1e-13);
            assert!(ing.profile.coeffs()[1..].iter().all(|b| b.abs() <= 1e-12));
            assert!(ing.warning.is_none());
        }
    }

    #[test]
    fn ingest_single_gegenbauer() {
        for n in [2, 3, 4, 7] {
            let q = p(n);
            let f = |t: f64| q.gegenbauer(3, t) * q.reproducing_factor(3);
            let ing = ingest_profile(&q, f, 12, 13, 1e-9).unwrap();
            for (l, &b) in ing.profile.coeffs().iter().enumerate() {
                let expected = if l == 3 { 1.0 } else { 0.0 };
                assert!((b - expected).abs() <= 1e-11, "n={n} l={l} b={b}");
            }
        }
    }

    #[test]
    fn ingest_exp() {
        let q = p(2);
        let ing = ingest_profile(&q, f64::exp, 40, 41, 1e-9).unwrap();
        assert!(ing.residual <= 1e-12);
        for i in 0..100 {
            let t = -1.0 + 2.0 * i as f64 / 99.0;
            assert!((ing.profile.evaluate(t) - t.exp()).abs() <= 1e-10);
        }
    }

    #[test]
    fn ingest_errors_and_warnings() {
        let q = p(2);
        assert!(ingest_profile(&q, f64::exp, 10, 10, 1e-9).is_err());
        let ing = ingest_profile(&q, f64::abs, 4, 40, 1e-9).unwrap();
        let warning = ing.warning.expect("degree 4 cannot reproduce |t|");
        assert!(warning.contains("residual"));
        assert!(ing.residual > 1e-3);
        assert!(ingest_profile(&q, |t| 1.0 / t, 4, 5, 1e-9).is_err());
    }

    #[test]
    fn evaluate_basics() {
        let q = p(4);
        let z = ZonalProfile::new(q, vec![1.0], Provenance::Analytic).unwrap();
        assert_eq!(evaluate_profile(&z, 0.3), 1.0);
        let z1 = ZonalProfile::new(q, vec![0.5, -0.2, 0.1], Provenance::Analytic).unwrap();
        let z2 = ZonalProfile::new(q, vec![0.3, 0.7], Provenance::Analytic).unwrap();
        let sum = z1.add(&z2).unwrap();
        for t in [-0.9, -0.1, 0.42, 0.77] {
            assert!((sum.evaluate(t) - z1.evaluate(t) - z2.evaluate(t)).abs() < 1e-13);
            assert!(z1.evaluate(t).abs() <= z1.sup_bound());
        }
        assert!(ZonalProfile::new(q, vec![], Provenance::Analytic).is_err());
        assert!(ZonalProfile::new(q, vec![f64::NAN], Provenance::Analytic).is_err());
    }

    #[test]
    fn builtins() {
        let q = p(2);
        let abs = builtin_profile("abs", &q, 40).unwrap().profile;
        for l in (1..=40).step_by(2) {
            assert!(abs.coeffs()[l].abs() <= 1e-12, "l={l}");
        }
        let c = builtin_profile("const", &q, 5).unwrap().profile;
        assert_eq!(c.coeffs(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(c.provenance(), Provenance::Analytic);
        let e = builtin_profile("exp", &q, 40).unwrap().profile;
        assert!(e.coeffs().iter().all(|&b| b > 0.0));
        // sinh(1) is the mean of e^t over [−1, 1]
        assert!((e.coeffs()[0] - 1f64.sinh()).abs() < 1e-15);
        let cos = builtin_profile("cos2", &q, 40).unwrap().profile;
        assert!((cos.evaluate(0.5) - (std::f64::consts::PI).cos()).abs() < 1e-10);

        match builtin_profile("sinc", &q, 4) {
            Err(Error::UnknownProfile { available, .. }) => assert!(available.contains(&"abs")),
            other => panic!("unexpected {other:?}"),
        }
        assert!(builtin_profile("cosx", &q, 4).is_err());
        assert_eq!(builtin_profiles(&q, 8).unwrap().len(), 6);
    }

    #[test]
    fn profile_residual_matches_signal_residual() {
        for n in [2, 3] {
            let q = p(n);
            let z = builtin_profile("abs", &q, 24).unwrap().profile;
            let s = profile_to_signal(&z).unwrap();
            for r in [0.5, 0.2, 0.01] {
                let w = ScaleWindow::new(r).unwrap();
                let a = l2_residual_profile(&z, w).unwrap();
                let b = crate::transform::l2_residual(&s, w);
                assert!((a - b).abs() <= 1e-13 * b.max(1e-300), "n={n} r={r}");
            }
        }
    }

    #[test]
    fn exp_series_matches_ingestion_and_values() {
        for n in [2, 3, 6] {
            let q = p(n);
            let series = exp_coefficients(&q, 30);
            let ingested = ingest_profile(&q, f64::exp, 30, 40, 1e-9).unwrap().profile;
            for (l, (a, b)) in series.iter().zip(ingested.coeffs()).enumerate() {
                assert!((a - b).abs() <= 1e-14, "n={n} l={l}");
            }
            let z = ZonalProfile::new(q, series, Provenance::Analytic).unwrap();
            for i in 0..100 {
                let t = -1.0 + 2.0 * i as f64 / 99.0;
                assert!((z.evaluate(t) - t.exp()).abs() <= 1e-10);
            }
        }
    }

    #[test]
    fn grid_shape() {
        let g = chebyshev_grid(257);
        assert_eq!(g.len(), 257);
        assert_eq!(g[0], -1.0);
        assert_eq!(*g.last().unwrap(), 1.0);
        assert!(g[128].abs() < 1e-15);
        assert!(g.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn sup_error_examples() {
        let q = p(2);
        let c = builtin_profile("const", &q, 20).unwrap().profile;
        for r in [0.5, 0.1, 1e-4] {
            assert!(sup_error(&c, ScaleWindow::new(r).unwrap(), 256).unwrap() <= 1e-13);
        }
        let e = builtin_profile("exp", &q, 40).unwrap().profile;
        let coarse = sup_error(&e, ScaleWindow::new(1.0 / 8.0).unwrap(), 512).unwrap();
        let fine = sup_error(&e, ScaleWindow::new(1.0 / 64.0).unwrap(), 512).unwrap();
        assert!(fine < coarse);
        assert!(sup_error(&e, ScaleWindow::new(0.5).unwrap(), 100).is_err());
    }

    #[test]
    fn no_overshoot_at_pole_for_nonnegative_coefficients() {
        let q = p(3);
        let e = builtin_profile("exp", &q, 30).unwrap().profile;
        assert!(e.coeffs().iter().all(|&b| b >= 0.0));
        for k in 1..12 {
            let w = ScaleWindow::new(0.5f64.powi(k)).unwrap();
            let rec = e.weighted(&partial_weights(w, 30));
            assert!(rec.evaluate(1.0) <= e.evaluate(1.0));
        }
    }
}
