//! Composite Gauss-Legendre quadrature and the direct-integration oracles for
//! the second-order noise moments.
//!
//! The oracles integrate the defining double (and triple) integrals against
//! the OU kernel `Phi^2 exp(-gamma |t1 - t2|)`. They share nothing with the
//! closed forms in [`crate::perturbation`] beyond the input parameters. The
//! kink of the kernel on the diagonal is removed by integrating over the
//! triangle `t2 < t1` and doubling.

use crate::perturbation::PerturbationInputs;

#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes and weights on `[-1, 1]` by Newton iteration on `P_n`.
    pub fn new(order: usize) -> Self {
        assert!(order >= 1);
        let n = order;
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                // p1 = P_n(x), p0 = P_{n-1}(x)
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let step = p1 / dp;
                x -= step;
                if step.abs() < 1e-16 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Composite rule with `panels` equal panels on `[a, b]`.
    pub fn integrate(&self, a: f64, b: f64, panels: usize, mut f: impl FnMut(f64) -> f64) -> f64 {
        if b == a {
            return 0.0;
        }
        let h = (b - a) / panels as f64;
        let mut total = 0.0;
        for p in 0..panels {
            let mid = a + (p as f64 + 0.5) * h;
            let half = 0.5 * h;
            let mut s = 0.0;
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                s += w * f(mid + half * x);
            }
            total += s * half;
        }
        total
    }
}

/// Value with an error estimate from doubling the panel count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureEstimate {
    pub value: f64,
    pub error: f64,
}

const ORDER: usize = 16;
const PANELS: usize = 6;

fn refine(mut eval: impl FnMut(usize) -> f64) -> QuadratureEstimate {
    let coarse = eval(PANELS);
    let fine = eval(2 * PANELS);
    QuadratureEstimate { value: fine, error: (fine - coarse).abs() }
}

/// `<chi2^2>` by direct quadrature of
/// `int int cos 2W(d - t1) cos 2W(d - t2) Phi^2 e^{-gamma |t1 - t2|} dt1 dt2`.
pub fn chi2sq_mean_oracle(p: &PerturbationInputs) -> QuadratureEstimate {
    let gl = GaussLegendre::new(ORDER);
    let (w, d, g) = (p.rabi, p.delta_tau, p.gamma);
    let kernel = |t1: f64, t2: f64| p.phi_amp * p.phi_amp * (-g * (t1 - t2).abs()).exp();
    refine(|panels| {
        2.0 * gl.integrate(0.0, d, panels, |t1| {
            let f1 = (2.0 * w * (d - t1)).cos();
            gl.integrate(0.0, t1, panels, |t2| f1 * (2.0 * w * (d - t2)).cos() * kernel(t1, t2))
        })
    })
}

/// Mean of the noise-induced part of `chi1`,
/// `int_0^d < phi^2/2 + 2W chi3 phi + 2W^2 chi3^2 - 2W^2 chi2^2 > dt`, with
/// `chi2(t) = int_0^t cos 2W(t - s) phi(s) ds` and
/// `chi3(t) = -int_0^t sin 2W(t - s) phi(s) ds`, every expectation taken
/// against the OU kernel.
pub fn chi1_mean_oracle(p: &PerturbationInputs) -> QuadratureEstimate {
    let gl = GaussLegendre::new(ORDER);
    let (w, d, g) = (p.rabi, p.delta_tau, p.gamma);
    let phi2 = p.phi_amp * p.phi_amp;
    let kernel = |t1: f64, t2: f64| phi2 * (-g * (t1 - t2).abs()).exp();
    refine(|panels| {
        gl.integrate(0.0, d, panels, |t| {
            // <chi3(t) phi(t)>
            let cross = -gl.integrate(0.0, t, panels, |s| (2.0 * w * (t - s)).sin() * kernel(t, s));
            // <chi3(t)^2> - <chi2(t)^2>, each over the triangle s2 < s1, doubled
            let moments = 2.0
                * gl.integrate(0.0, t, panels, |s1| {
                    let (a1, b1) = (2.0 * w * (t - s1)).sin_cos();
                    gl.integrate(0.0, s1, panels, |s2| {
                        let (a2, b2) = (2.0 * w * (t - s2)).sin_cos();
                        (a1 * a2 - b1 * b2) * kernel(s1, s2)
                    })
                });
            0.5 * phi2 + 2.0 * w * cross + 2.0 * w * w * moments
        })
    })
}
