//! Martingale residual tests for the generator of the limit process.
//!
//! The generator acts as `A f = (1/2) f_yy` on functions satisfying the
//! two boundary constraints
//!
//! ```text
//! f_y(x, h0) = 0                    (reflection at the tooth top)
//! f_xx + alpha f_y = f_yy  at y = 0 (boundary flux balance)
//! ```
//!
//! For f in this domain, `f(Z_t) - f(Z_0) - \int_0^t A f(Z_s) ds` is a
//! mean-zero martingale; the residual statistic estimates its mean over
//! Monte Carlo paths.

use crate::process::simulate_limit_process;
use crate::LimitError;
use comb_core::{derive_stream, CombParams, RngStream, SummaryStat, TimeGrid, ToothHeight};

/// Built-in test functions satisfying the generator's domain
/// conditions. Coefficients are solved from the boundary constraints
/// at construction time.
#[derive(Debug, Clone, Copy)]
pub enum TestFunction {
    /// f ≡ 1, Af = 0.
    Constant,
    /// f = x² + a y² + b y with a, b solved from the two constraints;
    /// Af ≡ a. For finite h0: a = 1/(1 + alpha h0), b = -2 h0 a; for
    /// infinite teeth the limit a = 0, b = -2/alpha.
    Quadratic { a: f64, b: f64 },
    /// f = cos(x) cos(beta (y - h0)) with beta the root of
    /// alpha beta tan(beta h0) = 1 - beta²; Af = -(beta²/2) f.
    TrigProduct { beta: f64, h0: f64 },
}

impl TestFunction {
    /// Look up a catalogue entry by id: `constant`, `quadratic` or
    /// `trig_product`.
    pub fn from_id(id: &str, alpha: f64, h0: ToothHeight) -> Result<Self, LimitError> {
        match id {
            "constant" => Ok(TestFunction::Constant),
            "quadratic" => {
                let (a, b) = match h0.value() {
                    Some(h) => {
                        let a = 1.0 / (1.0 + alpha * h);
                        (a, -2.0 * h * a)
                    }
                    None => (0.0, -2.0 / alpha),
                };
                Ok(TestFunction::Quadratic { a, b })
            }
            "trig_product" => {
                let h = h0
                    .value()
                    .ok_or(LimitError::NeedsFiniteHeight("trig_product"))?;
                let beta = solve_flux_root(alpha, h);
                Ok(TestFunction::TrigProduct { beta, h0: h })
            }
            other => Err(LimitError::UnknownTestFunction(other.to_string())),
        }
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        match *self {
            TestFunction::Constant => 1.0,
            TestFunction::Quadratic { a, b } => x * x + a * y * y + b * y,
            TestFunction::TrigProduct { beta, h0 } => x.cos() * (beta * (y - h0)).cos(),
        }
    }

    /// Generator value at a state. For the catalogue members this is a
    /// single formula valid on the whole state space (the boundary
    /// value agrees by the flux constraint).
    pub fn generator(&self, x: f64, y: f64) -> f64 {
        match *self {
            TestFunction::Constant => 0.0,
            TestFunction::Quadratic { a, .. } => a,
            TestFunction::TrigProduct { beta, .. } => -0.5 * beta * beta * self.eval(x, y),
        }
    }

    /// Residual of the flux constraint `f_xx + alpha f_y - f_yy` at
    /// (x, 0); zero for valid members.
    pub fn flux_residual(&self, alpha: f64) -> f64 {
        match *self {
            TestFunction::Constant => 0.0,
            TestFunction::Quadratic { a, b } => 2.0 + alpha * b - 2.0 * a,
            TestFunction::TrigProduct { beta, h0 } => {
                // At x = 0: -cos(beta h0) + alpha beta sin(beta h0)
                //           + beta² cos(beta h0).
                -(beta * h0).cos() + alpha * beta * (beta * h0).sin()
                    + beta * beta * (beta * h0).cos()
            }
        }
    }
}

/// Root of `alpha beta tan(beta h0) = 1 - beta²` in (0, pi/(2 h0)),
/// found by bisection. The left side grows from 0 to +∞ on that
/// interval while the right side decreases from 1, so the root is
/// unique there.
fn solve_flux_root(alpha: f64, h0: f64) -> f64 {
    let g = |beta: f64| alpha * beta * (beta * h0).tan() - (1.0 - beta * beta);
    let mut lo = 1e-12;
    let mut hi = std::f64::consts::FRAC_PI_2 / h0 * (1.0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Monte Carlo estimate of `E[f(Z_t) - f(Z_0) - \int_0^t Af(Z_s) ds]`
/// over `n_paths` independent paths on `grid`, started at the origin.
///
/// The integral uses left-endpoint sums, matching the path
/// discretization.
pub fn generator_residual(
    f_id: &str,
    params: &CombParams,
    grid: TimeGrid,
    n_paths: usize,
    stream: RngStream,
) -> Result<SummaryStat, LimitError> {
    let f = TestFunction::from_id(f_id, params.alpha(), params.h0())?;
    let residuals: Result<Vec<f64>, LimitError> = (0..n_paths)
        .map(|p| {
            let mut rng =
                derive_stream(stream.master_seed(), stream.stream_id() + p as u64).rng();
            residual_one_path(&f, params, grid, &mut rng)
        })
        .collect();
    SummaryStat::from_samples(&residuals?).map_err(|_| LimitError::InvalidTime(0.0))
}

/// Residual functional along a single fresh path.
pub fn residual_one_path(
    f: &TestFunction,
    params: &CombParams,
    grid: TimeGrid,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<f64, LimitError> {
    let path = simulate_limit_process(params, grid, (0.0, 0.0), rng)?;
    let (x, y) = (path.x(), path.y());
    let dt = grid.dt();
    let n = grid.n_steps();
    let mut integral = 0.0;
    for k in 0..n {
        integral += f.generator(x[k], y[k]) * dt;
    }
    Ok(f.eval(x[n], y[n]) - f.eval(x[0], y[0]) - integral)
}
