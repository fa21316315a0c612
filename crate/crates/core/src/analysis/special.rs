//! The interference integrals V(θ, α) and Z(θ, α).

use std::f64::consts::PI;

use super::AnalysisError;

fn check_domain(theta: f64, alpha: f64) -> Result<(), AnalysisError> {
    if !(alpha > 2.0) || !alpha.is_finite() {
        return Err(AnalysisError::Domain(format!(
            "path-loss exponent must exceed 2 (got {alpha})"
        )));
    }
    if !(theta >= 0.0) || !theta.is_finite() {
        return Err(AnalysisError::Domain(format!(
            "SIR threshold must be non-negative and finite (got {theta})"
        )));
    }
    Ok(())
}

/// `V(θ, α) = 2π θ^{2/α} / (α sin(2π/α))`, the PPP interference factor
/// with no exclusion region, equal to `θ^{2/α} ∫_0^∞ du / (1 + u^{α/2})`.
pub fn v_factor(theta: f64, alpha: f64) -> Result<f64, AnalysisError> {
    check_domain(theta, alpha)?;
    Ok(2.0 * PI * theta.powf(2.0 / alpha) / (alpha * (2.0 * PI / alpha).sin()))
}

/// `Z(θ, α) = θ^{2/α} ∫_{θ^{-2/α}}^∞ du / (1 + u^{α/2})`, the interference
/// factor when interferers lie beyond the serving distance.
///
/// With `u = θ^{-2/α} t^{-k}`, `k = 2/(α-2)`, the integral becomes
/// `∫_0^1 kθ / (1 + θ t^{α/(α-2)}) dt`, bounded and smooth on `[0, 1]`,
/// which is integrated by adaptive Gauss–Kronrod (7/15).
pub fn z_factor(theta: f64, alpha: f64) -> Result<f64, AnalysisError> {
    check_domain(theta, alpha)?;
    if theta == 0.0 {
        return Ok(0.0);
    }
    let k = 2.0 / (alpha - 2.0);
    let power = alpha / (alpha - 2.0);
    let integrand = |t: f64| k * theta / (1.0 + theta * t.powf(power));
    gauss_kronrod(integrand, 0.0, 1.0, Z_TOLERANCE)
}

/// Absolute error target for [`z_factor`]; the integrator aims well below it.
pub const Z_TOLERANCE: f64 = 1e-10;

/// Both interference factors for one (θ, α) pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InterferenceFactors {
    pub v: f64,
    pub z: f64,
}

impl InterferenceFactors {
    pub fn new(theta: f64, alpha: f64) -> Result<Self, AnalysisError> {
        Ok(Self {
            v: v_factor(theta, alpha)?,
            z: z_factor(theta, alpha)?,
        })
    }
}

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// (Kronrod estimate, |Kronrod - Gauss|) on `[a, b]`.
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let s = f(c - h * x) + f(c + h * x);
        kronrod += w * s;
        if j % 2 == 1 {
            gauss += WG[j / 2] * s;
        }
    }
    (kronrod * h, (kronrod - gauss).abs() * h)
}

/// Globally adaptive bisection on the interval with the worst error.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64, AnalysisError> {
    // |K - G| is an estimate, not a bound; aim two orders below `tol`.
    let target = tol * 1e-2;
    let mut panels: Vec<(f64, f64, f64, f64)> = {
        let (v, e) = gk15(&f, a, b);
        vec![(a, b, v, e)]
    };
    for _ in 0..2_000 {
        let err: f64 = panels.iter().map(|p| p.3).sum();
        if err <= target {
            return Ok(panels.iter().map(|p| p.2).sum());
        }
        let (i, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("at least one panel");
        let (lo, hi, _, _) = panels.swap_remove(i);
        let mid = 0.5 * (lo + hi);
        let (v1, e1) = gk15(&f, lo, mid);
        let (v2, e2) = gk15(&f, mid, hi);
        panels.push((lo, mid, v1, e1));
        panels.push((mid, hi, v2, e2));
    }
    Err(AnalysisError::Convergence {
        what: "z_factor quadrature",
        iterations: 2_000,
    })
}
