//! Three-variable chaotic flows and a fixed-step RK4 integrator.

pub type Vec3 = [f64; 3];
pub type Mat3 = [[f64; 3]; 3];

/// An autonomous flow `ds/dt = f(s)` with an analytic Jacobian.
pub trait Flow3 {
    fn rhs(&self, s: Vec3) -> Vec3;
    fn jacobian(&self, s: Vec3) -> Mat3;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lorenz {
    pub sigma: f64,
    pub rho: f64,
    pub beta: f64,
}

impl Default for Lorenz {
    fn default() -> Self {
        Self {
            sigma: 10.0,
            rho: 28.0,
            beta: 8.0 / 3.0,
        }
    }
}

impl Lorenz {
    /// Sum of the Lyapunov exponents, `-(σ + 1 + β)`.
    pub fn divergence(&self) -> f64 {
        -(self.sigma + 1.0 + self.beta)
    }

    /// The equilibrium `(√(β(ρ-1)), √(β(ρ-1)), ρ-1)`.
    pub fn equilibrium(&self) -> Vec3 {
        let c = (self.beta * (self.rho - 1.0)).sqrt();
        [c, c, self.rho - 1.0]
    }
}

impl Flow3 for Lorenz {
    fn rhs(&self, [x, y, z]: Vec3) -> Vec3 {
        [
            -self.sigma * (x - y),
            x * (self.rho - z) - y,
            x * y - self.beta * z,
        ]
    }

    fn jacobian(&self, [x, y, z]: Vec3) -> Mat3 {
        [
            [-self.sigma, self.sigma, 0.0],
            [self.rho - z, -1.0, -x],
            [y, x, -self.beta],
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rossler {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Default for Rossler {
    fn default() -> Self {
        Self {
            a: 0.2,
            b: 0.2,
            c: 5.7,
        }
    }
}

impl Flow3 for Rossler {
    fn rhs(&self, [x, y, z]: Vec3) -> Vec3 {
        [-y - z, x + self.a * y, self.b + x * z - self.c * z]
    }

    fn jacobian(&self, [x, _y, z]: Vec3) -> Mat3 {
        [[0.0, -1.0, -1.0], [1.0, self.a, 0.0], [z, 0.0, x - self.c]]
    }
}

fn axpy(s: Vec3, a: f64, k: Vec3) -> Vec3 {
    [s[0] + a * k[0], s[1] + a * k[1], s[2] + a * k[2]]
}

/// Classical fourth-order Runge–Kutta step.
pub fn rk4_step<F: Flow3 + ?Sized>(flow: &F, s: Vec3, h: f64) -> Vec3 {
    let k1 = flow.rhs(s);
    let k2 = flow.rhs(axpy(s, 0.5 * h, k1));
    let k3 = flow.rhs(axpy(s, 0.5 * h, k2));
    let k4 = flow.rhs(axpy(s, h, k3));
    let mut out = s;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates from `s0` with step `h` and returns `count` states spaced
/// `stride` steps apart, the first being `s0` itself.
pub fn integrate_sampled<F: Flow3 + ?Sized>(
    flow: &F,
    s0: Vec3,
    h: f64,
    stride: usize,
    count: usize,
) -> Vec<Vec3> {
    let mut out = Vec::with_capacity(count);
    let mut s = s0;
    for k in 0..count {
        if k > 0 {
            for _ in 0..stride {
                s = rk4_step(flow, s, h);
            }
        }
        out.push(s);
    }
    out
}

/// State after integrating for `steps` steps of size `h`.
pub fn integrate<F: Flow3 + ?Sized>(flow: &F, s0: Vec3, h: f64, steps: usize) -> Vec3 {
    (0..steps).fold(s0, |s, _| rk4_step(flow, s, h))
}
