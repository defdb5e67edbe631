//! Spectral wavelet analysis and synthesis.
//!
//! The family is zonal, so the transform at a fixed scale acts on each
//! degree-l block of a signal as multiplication by √σ_l(ρ), and synthesis
//! over the window [R, 1/R] multiplies block l by ∫_R^{1/R} γ_l(ρ) dρ.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::harmonics::SphereParams;
use crate::wavelet_family::{gamma_tail, WaveletSymbol};

/// Cutoff R of the synthesis window [R, 1/R], with 0 < R ≤ 1/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleWindow(f64);

impl ScaleWindow {
    pub fn new(r: f64) -> Result<Self> {
        if r > 0.0 && r <= 0.5 {
            Ok(Self(r))
        } else {
            Err(Error::InvalidWindow(r))
        }
    }

    pub fn cutoff(&self) -> f64 {
        self.0
    }

    /// The integer L with R ∈ (1/(L+1), 1/L], i.e. floor(1/R), using the same
    /// floating comparisons as the tail integrals.
    pub fn band_degree(&self) -> usize {
        let r = self.0;
        let mut band = (1.0 / r).floor() as usize;
        while band > 1 && r > 1.0 / band as f64 {
            band -= 1;
        }
        while r <= 1.0 / (band + 1) as f64 {
            band += 1;
        }
        band
    }
}

/// Bandlimited signal on S^n held as per-degree coefficient blocks.
///
/// Block l has N(n,l) entries; the harmonic index inside a block is abstract.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSignal {
    params: SphereParams,
    blocks: Vec<Vec<Complex64>>,
}

impl SpectralSignal {
    pub fn zeros(params: SphereParams, bandlimit: usize) -> Result<Self> {
        let blocks = (0..=bandlimit)
            .map(|l| Ok(vec![Complex64::new(0.0, 0.0); block_len(&params, l)?]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { params, blocks })
    }

    pub fn from_blocks(params: SphereParams, blocks: Vec<Vec<Complex64>>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidArgument("signal needs at least the degree-0 block".into()));
        }
        for (l, block) in blocks.iter().enumerate() {
            let expected = block_len(&params, l)?;
            if block.len() != expected {
                return Err(Error::Mismatch(format!(
                    "block {l} has {} entries, expected N({}, {l}) = {expected}",
                    block.len(),
                    params.n()
                )));
            }
            if block.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
                return Err(Error::InvalidArgument(format!("block {l} has a non-finite coefficient")));
            }
        }
        Ok(Self { params, blocks })
    }

    /// Coefficients with real and imaginary parts uniform in [−1, 1].
    pub fn random<R: Rng + ?Sized>(params: SphereParams, bandlimit: usize, rng: &mut R) -> Result<Self> {
        let mut s = Self::zeros(params, bandlimit)?;
        for block in &mut s.blocks {
            for c in block.iter_mut() {
                *c = Complex64::new(rng.gen_range(-1.0..=1.0), rng.gen_range(-1.0..=1.0));
            }
        }
        Ok(s)
    }

    pub fn params(&self) -> &SphereParams {
        &self.params
    }

    pub fn bandlimit(&self) -> usize {
        self.blocks.len() - 1
    }

    pub fn blocks(&self) -> &[Vec<Complex64>] {
        &self.blocks
    }

    pub fn block(&self, l: usize) -> &[Complex64] {
        &self.blocks[l]
    }

    pub fn block_mut(&mut self, l: usize) -> &mut [Complex64] {
        &mut self.blocks[l]
    }

    pub fn block_norm_sq(&self, l: usize) -> f64 {
        self.blocks[l].iter().map(|c| c.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        (0..self.blocks.len()).map(|l| self.block_norm_sq(l)).sum::<f64>().sqrt()
    }

    /// ⟨self, other⟩ = Σ conj(a)·b, conjugate-linear in the first slot.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_compatible(other)?;
        Ok((0..self.blocks.len()).map(|l| block_inner(&self.blocks[l], &other.blocks[l])).sum())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_compatible(other)?;
        let blocks = self
            .blocks
            .iter()
            .zip(&other.blocks)
            .map(|(a, b)| a.iter().zip(b).map(|(x, y)| x - y).collect())
            .collect();
        Ok(Self { params: self.params, blocks })
    }

    /// Multiplies block l by `factors[l]` (zero when `factors` is shorter).
    pub fn scale_blocks(&self, factors: &[f64]) -> Self {
        let blocks = self
            .blocks
            .iter()
            .enumerate()
            .map(|(l, b)| {
                let k = factors.get(l).copied().unwrap_or(0.0);
                b.iter().map(|c| c * k).collect()
            })
            .collect();
        Self { params: self.params, blocks }
    }

    fn check_compatible(&self, other: &Self) -> Result<()> {
        if self.params != other.params {
            return Err(Error::Mismatch(format!(
                "signals live on S^{} and S^{}",
                self.params.n(),
                other.params.n()
            )));
        }
        if self.blocks.len() != other.blocks.len() {
            return Err(Error::Mismatch(format!(
                "bandlimits {} and {} differ",
                self.bandlimit(),
                other.bandlimit()
            )));
        }
        Ok(())
    }
}

fn block_len(params: &SphereParams, l: usize) -> Result<usize> {
    let dim = params.dim_harmonics(l)?;
    usize::try_from(dim).map_err(|_| Error::Overflow {
        what: "block length",
        n: params.n(),
        l,
    })
}

fn block_inner(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// W_Ψ f(ρ, ·): block l multiplied by √(ρ·γ_l(ρ)).
pub fn analyze(f: &SpectralSignal, rho: f64) -> Result<SpectralSignal> {
    let symbol = WaveletSymbol::new(rho, f.bandlimit())?;
    let factors: Vec<f64> = (0..=f.bandlimit()).map(|l| symbol.get(l).sqrt()).collect();
    Ok(f.scale_blocks(&factors))
}

/// I_l(R) = ∫_R^{1/R} γ_l(ρ) dρ, which is the tail from R since 1/R ≥ 2.
pub fn scale_integral(l: usize, w: ScaleWindow) -> f64 {
    gamma_tail(l, w.cutoff())
}

/// Synthesis weights w_l = I_l(R) for l = 0..=lmax.
///
/// With L = floor(1/R): w_l = (1−R)^l below L, w_L ∈ [0, (1−R)^L], and zero above.
pub fn partial_weights(w: ScaleWindow, lmax: usize) -> Vec<f64> {
    let weights: Vec<f64> = (0..=lmax).map(|l| scale_integral(l, w)).collect();
    debug_assert!(matches_weight_structure(w, &weights));
    weights
}

/// Checks the three-regime structure of the synthesis weights.
pub fn matches_weight_structure(w: ScaleWindow, weights: &[f64]) -> bool {
    let r = w.cutoff();
    let band = w.band_degree();
    weights.iter().enumerate().all(|(l, &v)| {
        let full = (1.0 - r).powf(l as f64);
        match l.cmp(&band) {
            std::cmp::Ordering::Less => v == full,
            std::cmp::Ordering::Equal => (0.0..=full).contains(&v),
            std::cmp::Ordering::Greater => v == 0.0,
        }
    })
}

/// ∫_R^{1/R} (adjoint ∘ analysis at scale ρ) dρ/ρ, evaluated with the closed-form scale integral.
pub fn synthesize(f: &SpectralSignal, w: ScaleWindow) -> SpectralSignal {
    f.scale_blocks(&partial_weights(w, f.bandlimit()))
}

/// Plancherel residual L(R) = ‖f − synthesize(f, R)‖.
pub fn l2_residual(f: &SpectralSignal, w: ScaleWindow) -> f64 {
    (0..=f.bandlimit())
        .map(|l| {
            let defect = 1.0 - scale_integral(l, w);
            defect * defect * f.block_norm_sq(l)
        })
        .sum::<f64>()
        .sqrt()
}

/// ⟨f, g⟩ − Σ_l I_l(R)·⟨f_l, g_l⟩: the defect of the window-truncated phase-space inner product.
pub fn isometry_defect(f: &SpectralSignal, g: &SpectralSignal, w: ScaleWindow) -> Result<Complex64> {
    f.check_compatible(g)?;
    Ok((0..=f.bandlimit())
        .map(|l| (1.0 - scale_integral(l, w)) * block_inner(f.block(l), g.block(l)))
        .sum())
}

/// Weighted L¹ norm ∫|K_R(t)|(1−t²)^{λ−1/2} dt of the tail kernel
/// K_R = Σ_l (∫_R^∞ γ_l)·((λ+l)/λ)·C_l.
///
/// `lmax` must cover every degree with a nonzero tail, i.e. R ≥ 1/(lmax+1).
pub fn legacy_admissibility(p: &SphereParams, r: f64, lmax: usize) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return Err(Error::InvalidArgument(format!("cutoff must be positive, got {r}")));
    }
    if gamma_tail(lmax + 1, r) != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "lmax = {lmax} truncates the tail kernel at R = {r}; need lmax ≥ {}",
            (1.0 / r).ceil() as usize - 1
        )));
    }
    let coeffs: Vec<f64> = (0..=lmax).map(|l| gamma_tail(l, r)).collect();
    let Some(degree) = coeffs.iter().rposition(|&c| c != 0.0) else {
        return Ok(0.0);
    };
    let coeffs = &coeffs[..=degree];
    let kernel = |t: f64| p.zonal_sum(coeffs, t);

    let rule = p.gauss_gegenbauer(degree / 2 + 1)?;
    let signed = rule.integrate(kernel);

    // Negative lobes, integrated in θ with t = cos θ so the weight becomes sin^{n−1}θ.
    let in_theta = |theta: f64| kernel(theta.cos());
    let roots = sign_changes(in_theta, std::f64::consts::PI, 8 * (degree + 1) + 16);
    let mut cuts = Vec::with_capacity(roots.len() + 2);
    cuts.push(0.0);
    cuts.extend(roots);
    cuts.push(std::f64::consts::PI);

    let legendre = SphereParams::new(2)?.gauss_gegenbauer(degree + p.n() as usize + 24)?;
    let power = p.n() as i32 - 1;
    let integrand = |theta: f64| kernel(theta.cos()) * theta.sin().powi(power);
    let (mut negative, mut check) = (0.0, 0.0);
    for pair in cuts.windows(2) {
        let part = legendre.integrate_on(pair[0], pair[1], integrand);
        check += part;
        if part < 0.0 {
            negative += part;
        }
    }
    let scale = coeffs
        .iter()
        .enumerate()
        .map(|(l, c)| c.abs() * p.reproducing_factor(l) * p.gegenbauer(l, 1.0))
        .sum::<f64>()
        * p.weight_integral();
    if (check - signed).abs() > 1e-9 * scale.max(1.0) {
        return Err(Error::Quadrature(format!(
            "tail kernel integral mismatch at R = {r}: Gauss–Gegenbauer {signed}, panels {check}"
        )));
    }
    Ok((signed - 2.0 * negative).max(0.0))
}

/// Sign changes of `f` on (0, end), bracketed on a uniform grid and bisected.
fn sign_changes<F: Fn(f64) -> f64>(f: F, end: f64, samples: usize) -> Vec<f64> {
    let mut roots = Vec::new();
    let h = end / samples as f64;
    let mut x0 = 0.0;
    let mut f0 = f(x0);
    for i in 1..=samples {
        let x1 = if i == samples { end } else { i as f64 * h };
        let f1 = f(x1);
        if f0 == 0.0 && i > 1 {
            roots.push(x0);
        } else if f0 * f1 < 0.0 {
            let (mut a, mut b, mut fa) = (x0, x1, f0);
            for _ in 0..200 {
                let m = 0.5 * (a + b);
                if m <= a || m >= b {
                    break;
                }
                let fm = f(m);
                if fm == 0.0 {
                    a = m;
                    b = m;
                    break;
                }
                if fa * fm < 0.0 {
                    b = m;
                } else {
                    a = m;
                    fa = fm;
                }
            }
            roots.push(0.5 * (a + b));
        }
        x0 = x1;
        f0 = f1;
    }
    roots
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p(n: u32) -> SphereParams {
        SphereParams::new(n).unwrap()
    }

    fn single_block(params: SphereParams, bandlimit: usize, l: usize) -> SpectralSignal {
        let mut s = SpectralSignal::zeros(params, bandlimit).unwrap();
        for (k, c) in s.block_mut(l).iter_mut().enumerate() {
            *c = Complex64::new(1.0 + k as f64, -0.5 * k as f64);
        }
        s
    }

    #[test]
    fn window_bounds() {
        assert!(ScaleWindow::new(0.0).is_err());
        assert!(ScaleWindow::new(0.51).is_err());
        assert!(ScaleWindow::new(-0.1).is_err());
        assert!(ScaleWindow::new(f64::NAN).is_err());
        assert_eq!(ScaleWindow::new(0.3).unwrap().band_degree(), 3);
        assert_eq!(ScaleWindow::new(0.5).unwrap().band_degree(), 2);
    }

    #[test]
    fn signal_validation() {
        let q = p(3);
        assert!(SpectralSignal::from_blocks(q, vec![]).is_err());
        let bad = vec![vec![Complex64::new(0.0, 0.0)], vec![Complex64::new(0.0, 0.0); 3]];
        assert!(matches!(SpectralSignal::from_blocks(q, bad), Err(Error::Mismatch(_))));
        let nan = vec![vec![Complex64::new(f64::NAN, 0.0)]];
        assert!(SpectralSignal::from_blocks(q, nan).is_err());
        let ok = vec![vec![Complex64::new(1.0, 0.0)], vec![Complex64::new(0.0, 1.0); 4]];
        assert_eq!(SpectralSignal::from_blocks(q, ok).unwrap().bandlimit(), 1);
    }

    #[test]
    fn analyze_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let f = SpectralSignal::random(p(2), 8, &mut rng).unwrap();
        assert_eq!(analyze(&f, 3.0).unwrap().norm(), 0.0);

        let f = single_block(p(2), 4, 2);
        let out = analyze(&f, 0.4).unwrap();
        let k = (0.4 * 8.0 / 3.0f64).sqrt();
        for (a, b) in out.block(2).iter().zip(f.block(2)) {
            assert!((a - b * k).norm() < 1e-14);
            // phase preserved
            assert!((a.arg() - b.arg()).abs() < 1e-14 || b.norm() == 0.0);
        }
        assert!(analyze(&f, 0.0).is_err());
    }

    #[test]
    fn scale_integral_examples() {
        assert_eq!(scale_integral(0, ScaleWindow::new(0.25).unwrap()), 1.0);
        assert!((scale_integral(3, ScaleWindow::new(0.1).unwrap()) - 0.729).abs() < 1e-15);
        assert_eq!(scale_integral(10, ScaleWindow::new(0.5).unwrap()), 0.0);
    }

    #[test]
    fn partial_weight_examples() {
        let w = partial_weights(ScaleWindow::new(0.3).unwrap(), 6);
        assert_eq!(w[0], 1.0);
        assert!((w[1] - 0.7).abs() < 1e-15);
        assert!((w[2] - 0.49).abs() < 1e-15);
        assert!(w[3] >= 0.0 && w[3] <= 0.343);
        assert!(w[4..].iter().all(|&x| x == 0.0));

        let w = partial_weights(ScaleWindow::new(0.5).unwrap(), 5);
        assert_eq!(w[0], 1.0);
        assert_eq!(w[1], 0.5);
        assert!(w[2] >= 0.0 && w[2] <= 0.25);
        assert!(w[3..].iter().all(|&x| x == 0.0));

        let w = partial_weights(ScaleWindow::new(1e-9).unwrap(), 50);
        assert!(w.iter().all(|&x| (1.0 - x) < 1e-7));
    }

    #[test]
    fn synthesis_examples() {
        let f = single_block(p(3), 5, 0);
        for r in [0.5, 0.3, 0.01] {
            assert_eq!(synthesize(&f, ScaleWindow::new(r).unwrap()), f);
        }

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let f = SpectralSignal::random(p(2), 12, &mut rng).unwrap();
        let out = synthesize(&f, ScaleWindow::new(0.2).unwrap());
        for l in 6..=12 {
            assert_eq!(out.block_norm_sq(l), 0.0);
        }

        let f = SpectralSignal::random(p(2), 32, &mut rng).unwrap();
        let out = synthesize(&f, ScaleWindow::new(1e-6).unwrap());
        for l in 0..=32 {
            let k = (1.0 - 1e-6f64).powi(l as i32);
            for (a, b) in out.block(l).iter().zip(f.block(l)) {
                assert!((a - b * k).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn residual_examples() {
        let f = single_block(p(2), 6, 0);
        for r in [0.5, 0.1, 1e-3] {
            assert_eq!(l2_residual(&f, ScaleWindow::new(r).unwrap()), 0.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = SpectralSignal::random(p(3), 20, &mut rng).unwrap();
        let mut prev = f64::INFINITY;
        for k in 1..=20 {
            let w = ScaleWindow::new(0.5f64.powi(k)).unwrap();
            let res = l2_residual(&f, w);
            let direct = f.sub(&synthesize(&f, w)).unwrap().norm();
            assert!((res - direct).abs() <= 1e-13 * f.norm());
            assert!(res <= prev);
            prev = res;
        }
    }

    #[test]
    fn isometry_examples() {
        let f = single_block(p(2), 3, 0);
        for r in [0.5, 0.1] {
            assert_eq!(isometry_defect(&f, &f, ScaleWindow::new(r).unwrap()).unwrap().norm(), 0.0);
        }
        let a = single_block(p(2), 4, 1);
        let b = single_block(p(2), 4, 3);
        assert_eq!(a.inner(&b).unwrap(), Complex64::new(0.0, 0.0));
        assert_eq!(isometry_defect(&a, &b, ScaleWindow::new(0.5).unwrap()).unwrap(), Complex64::new(0.0, 0.0));

        let c = single_block(p(2), 5, 1);
        assert!(isometry_defect(&a, &c, ScaleWindow::new(0.5).unwrap()).is_err());
        let d = single_block(p(3), 4, 1);
        assert!(isometry_defect(&a, &d, ScaleWindow::new(0.5).unwrap()).is_err());
    }

    #[test]
    fn legacy_examples() {
        for n in [2, 3, 4, 5] {
            let q = p(n);
            assert_eq!(legacy_admissibility(&q, 2.0, 4).unwrap(), 0.0);
            let v = legacy_admissibility(&q, 1.0, 4).unwrap();
            assert!((v - q.weight_integral()).abs() < 1e-12, "n={n}");
        }
        assert!(legacy_admissibility(&p(2), 0.1, 5).is_err());
        assert!(legacy_admissibility(&p(2), 0.0, 5).is_err());
    }

    #[test]
    fn legacy_low_degree_analytic() {
        // R ∈ [1/2, 1): only γ_0 and γ_1 tails survive: K = 1 + w_1·((λ+1)/λ)·2λ t = 1 + (n+1)·w_1·t.
        for n in [2u32, 3, 4] {
            let q = p(n);
            let r = 0.7;
            let w1 = gamma_tail(1, r);
            let slope = w1 * q.reproducing_factor(1) * 2.0 * q.lambda();
            let expected = crate::quad::integrate(
                |t: f64| (1.0 + slope * t).abs() * (1.0 - t * t).powf(q.lambda() - 0.5),
                -1.0,
                1.0,
                1e-13,
            )
            .unwrap();
            let v = legacy_admissibility(&q, r, 3).unwrap();
            assert!((v - expected).abs() < 1e-10, "n={n} v={v} expected={expected}");
        }
        // |K| integrates to at least the signed value ∫K·w = weight mass
        for r in [0.5, 0.25, 0.125, 0.0625] {
            let q = p(3);
            let v = legacy_admissibility(&q, r, 32).unwrap();
            assert!(v >= q.weight_integral() * (1.0 - 1e-12), "r={r}");
        }
    }
}
