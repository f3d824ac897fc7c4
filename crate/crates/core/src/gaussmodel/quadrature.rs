//! Conditional moments `E[h(p) | Z0 = z0]` of the equicorrelated model.
//!
//! Gauss–Hermite is the primary rule. Heavy right tails (negative `r`
//! close to the integrability limit) defeat a polynomial rule, so any
//! evaluation where 128 and 256 nodes disagree by more than 1e-8 falls back
//! to adaptive Gauss–Kronrod on a truncated line.

use std::f64::consts::PI;
use std::sync::OnceLock;

use crate::normal;

/// Relative agreement required between the 128- and 256-node rules.
pub const GH_RTOL: f64 = 1e-8;

pub struct HermiteRule {
    /// Nodes for weight `exp(-x^2)`.
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl HermiteRule {
    /// Nodes start from the eigenvalues of the Jacobi matrix and are then
    /// polished by Newton steps on the orthonormal recurrence, which also
    /// yields weights accurate to full relative precision in the tails.
    pub fn new(n: usize) -> Self {
        let jacobi = nalgebra::DMatrix::from_fn(n, n, |i, j| {
            if i.abs_diff(j) == 1 {
                (i.max(j) as f64 / 2.0).sqrt()
            } else {
                0.0
            }
        });
        let mut nodes: Vec<f64> = nalgebra::SymmetricEigen::new(jacobi).eigenvalues.iter().copied().collect();
        nodes.sort_by(f64::total_cmp);
        let mut weights = vec![0.0; n];
        for (x, w) in nodes.iter_mut().zip(weights.iter_mut()) {
            let mut z = *x;
            let mut pp = 0.0;
            for _ in 0..8 {
                let (p1, dp) = orthonormal_hermite(n, z);
                pp = dp;
                let step = p1 / pp;
                z -= step;
                if step.abs() <= 1e-15 * z.abs().max(1.0) {
                    break;
                }
            }
            *x = z;
            *w = 2.0 / (pp * pp);
        }
        Self { nodes, weights }
    }

    /// `E[f(X)]` for `X ~ N(0, 1)`.
    pub fn expect(&self, f: impl Fn(f64) -> f64) -> f64 {
        let scale = std::f64::consts::SQRT_2;
        let s: f64 = self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| if w == 0.0 { 0.0 } else { w * f(scale * x) })
            .sum();
        s / PI.sqrt()
    }
}

/// Orthonormal Hermite polynomial of degree `n` at `z` (weight
/// `exp(-x^2)`, scaled by `pi^(-1/4)`) and its derivative.
fn orthonormal_hermite(n: usize, z: f64) -> (f64, f64) {
    const PIM4: f64 = 0.751_125_544_464_942_5;
    let mut p1 = PIM4;
    let mut p2 = 0.0;
    for j in 0..n {
        let p3 = p2;
        p2 = p1;
        let jf = j as f64;
        p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
    }
    (p1, (2.0 * n as f64).sqrt() * p2)
}

pub fn rule_128() -> &'static HermiteRule {
    static R: OnceLock<HermiteRule> = OnceLock::new();
    R.get_or_init(|| HermiteRule::new(128))
}

pub fn rule_256() -> &'static HermiteRule {
    static R: OnceLock<HermiteRule> = OnceLock::new();
    R.get_or_init(|| HermiteRule::new(256))
}

/// Which function of `p` is averaged.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Moment {
    /// `p^r`
    Power(f64),
    /// `ln p`
    Log,
}

impl Moment {
    #[inline]
    fn eval_log_p(self, log_p: f64) -> f64 {
        match self {
            Moment::Power(r) => (r * log_p).exp(),
            Moment::Log => log_p,
        }
    }
}

/// `E[f(Phi(-a - b X))]` with the fallback described in the module docs.
pub fn conditional_expectation(a: f64, b: f64, moment: Moment) -> f64 {
    let f = |x: f64| moment.eval_log_p(normal::log_cdf(-a - b * x));
    let coarse = rule_128().expect(f);
    let fine = rule_256().expect(f);
    if agree(coarse, fine) {
        return fine;
    }
    adaptive_expectation(a, b, moment)
}

/// Gauss–Hermite with an explicit node count; exposed for the
/// node-doubling checks.
pub fn hermite_expectation(rule: &HermiteRule, a: f64, b: f64, moment: Moment) -> f64 {
    rule.expect(|x| moment.eval_log_p(normal::log_cdf(-a - b * x)))
}

fn agree(x: f64, y: f64) -> bool {
    let scale = x.abs().max(y.abs());
    (x - y).abs() <= GH_RTOL * scale || scale < 1e-300
}

/// Integrates `f(x) phi(x)` over a line wide enough that the tails are
/// negligible for every integrable parameter choice.
fn adaptive_expectation(a: f64, b: f64, moment: Moment) -> f64 {
    let growth = match moment {
        Moment::Power(r) if r < 0.0 => (-r) * b * b,
        _ => 0.0,
    };
    let decay = (1.0 - growth).max(1e-6);
    let width = 14.0 / decay.sqrt() + 4.0 * a.abs();
    let integrand = |x: f64| {
        let log_p = normal::log_cdf(-a - b * x);
        match moment {
            Moment::Power(r) => (r * log_p - 0.5 * x * x).exp(),
            Moment::Log => log_p * (-0.5 * x * x).exp(),
        }
    };
    let total: f64 = [(-width, 0.0), (0.0, width)]
        .iter()
        .map(|&(lo, hi)| adaptive_gk(&integrand, lo, hi, 1e-13, 48))
        .sum();
    total / (2.0 * PI).sqrt()
}

const GK_X: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const GK_WK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const GK_WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, lo: f64, hi: f64) -> (f64, f64) {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    let fc = f(c);
    let mut kron = GK_WK[7] * fc;
    let mut gauss = GK_WG[3] * fc;
    for j in 0..7 {
        let dx = h * GK_X[j];
        let s = f(c - dx) + f(c + dx);
        kron += GK_WK[j] * s;
        if j % 2 == 1 {
            gauss += GK_WG[j / 2] * s;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

fn adaptive_gk(f: &impl Fn(f64) -> f64, lo: f64, hi: f64, rtol: f64, max_depth: u32) -> f64 {
    let (whole, _) = gk15(f, lo, hi);
    let mut stack = vec![(lo, hi, 0u32)];
    let mut total = 0.0;
    let scale = whole.abs().max(1e-300);
    while let Some((a, b, depth)) = stack.pop() {
        let (val, err) = gk15(f, a, b);
        if err <= rtol * scale || depth >= max_depth {
            total += val;
        } else {
            let mid = 0.5 * (a + b);
            stack.push((a, mid, depth + 1));
            stack.push((mid, b, depth + 1));
        }
    }
    total
}
