//! The boundary memory kernel
//!
//! ```text
//! w(t) = (2/h0) sum_{k >= 0} exp(-(2k+1)^2 pi^2 t / (8 h0^2))
//! ```
//!
//! for a finite tooth, and `w(t) = sqrt(2/(pi t))` for an infinite one.
//! The series converges fast only for `t >= h0^2`; below that the same
//! function is evaluated through its image-charge form (Poisson
//! summation)
//!
//! ```text
//! w(t) = sqrt(2/(pi t)) * (1 + 2 sum_{m >= 1} (-1)^m exp(-2 m^2 h0^2 / t))
//! ```
//!
//! which converges geometrically there. Time stepping never needs w
//! pointwise at 0: the solvers consume exact integrals of w over grid
//! cells, which stay finite through the square-root singularity.

use crate::PdeError;
use comb_core::ToothHeight;
use statrs::function::erf::erfc;
use std::f64::consts::PI;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

/// Partial sum of the kernel series with `k_terms` terms (closed form
/// for an infinite tooth).
pub fn kernel_w(t: f64, h0: ToothHeight, k_terms: usize) -> Result<f64, PdeError> {
    if !t.is_finite() || t < 0.0 {
        return Err(PdeError::NonPositiveTime(t));
    }
    match h0 {
        ToothHeight::Infinite => {
            if t == 0.0 {
                return Err(PdeError::KernelSingularAtZero);
            }
            Ok((2.0 / (PI * t)).sqrt())
        }
        ToothHeight::Finite(h) => {
            if t == 0.0 {
                return Err(PdeError::NonPositiveTime(t));
            }
            if k_terms == 0 {
                return Err(PdeError::EmptyTruncation);
            }
            Ok(series_partial_sum(t, h, k_terms))
        }
    }
}

fn series_partial_sum(t: f64, h: f64, k_terms: usize) -> f64 {
    let lam0 = PI * PI / (8.0 * h * h);
    let mut acc = 0.0;
    for k in 0..k_terms {
        let q = (2 * k + 1) as f64;
        let term = (-q * q * lam0 * t).exp();
        acc += term;
        if term < 1e-20 * (acc + 1e-300) {
            break;
        }
    }
    2.0 * acc / h
}

fn image_sum(t: f64, h: f64) -> f64 {
    let mut acc = 1.0;
    let mut sign = -1.0;
    for m in 1..64 {
        let mm = (m * m) as f64;
        let term = (-2.0 * mm * h * h / t).exp();
        acc += 2.0 * sign * term;
        if term < 1e-20 {
            break;
        }
        sign = -sign;
    }
    (2.0 / (PI * t)).sqrt() * acc
}

/// Kernel value through the branch best suited to `t`; `k_cap` bounds
/// the series depth on the smooth branch `t >= h0^2`, where a handful
/// of terms already reaches machine precision.
pub(crate) fn w_eval(t: f64, h0: Option<f64>, k_cap: usize) -> f64 {
    match h0 {
        None => (2.0 / (PI * t)).sqrt(),
        Some(h) => {
            if t >= h * h {
                series_partial_sum(t, h, k_cap.max(1))
            } else {
                image_sum(t, h)
            }
        }
    }
}

/// Exact integral of the kernel over `[t1, t2]`, organized so the
/// saturation of the antiderivative at large times never cancels.
pub(crate) fn w_cell_integral(t1: f64, t2: f64, h0: Option<f64>) -> f64 {
    debug_assert!(0.0 <= t1 && t1 < t2);
    match h0 {
        // integral of sqrt(2/(pi t)) is sqrt(8 t / pi)
        None => (8.0 / PI).sqrt() * (t2 - t1) / (t2.sqrt() + t1.sqrt()),
        Some(h) => {
            let split = h * h;
            if t1 >= split {
                series_integral(t1, t2, h)
            } else if t2 <= split {
                image_antiderivative(t2, h) - image_antiderivative(t1, h)
            } else {
                (image_antiderivative(split, h) - image_antiderivative(t1, h))
                    + series_integral(split, t2, h)
            }
        }
    }
}

fn series_integral(t1: f64, t2: f64, h: f64) -> f64 {
    let lam0 = PI * PI / (8.0 * h * h);
    let mut acc = 0.0;
    for k in 0..256 {
        let q = (2 * k + 1) as f64;
        let lam = q * q * lam0;
        let term = (-lam * t1).exp() * (1.0 - (-lam * (t2 - t1)).exp()) / lam;
        acc += term;
        if term < 1e-22 * (acc + 1e-300) {
            break;
        }
    }
    2.0 * acc / h
}

fn image_antiderivative(t: f64, h: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let mut acc = (8.0 * t / PI).sqrt();
    let mut sign = -1.0;
    for m in 1..64 {
        let mf = m as f64;
        let gauss = 4.0 * (2.0 * t / PI).sqrt() * (-2.0 * mf * mf * h * h / t).exp();
        let tail = 8.0 * mf * h * erfc(mf * h * (2.0 / t).sqrt());
        let term = gauss - tail;
        acc += sign * term;
        if gauss < 1e-22 && tail < 1e-22 {
            break;
        }
        sign = -sign;
    }
    acc
}

/// The kernel tabulated on a uniform time grid, with the exact cell
/// integrals used as product-integration weights.
#[derive(Debug, Clone)]
pub struct CaputoKernel {
    h0: ToothHeight,
    k_terms: usize,
    dt: f64,
    w: Vec<f64>,
    omega: Vec<f64>,
}

impl CaputoKernel {
    /// Tabulate `w(r dt)` for `r = 1..=n_steps` and the weights
    /// `omega_r = int_{r dt}^{(r+1) dt} w`.
    pub fn tabulate(
        h0: ToothHeight,
        k_terms: usize,
        dt: f64,
        n_steps: usize,
    ) -> Result<Self, PdeError> {
        if !dt.is_finite() || dt <= 0.0 {
            return Err(PdeError::InvalidGrid("dt must be finite and positive"));
        }
        if n_steps == 0 {
            return Err(PdeError::InvalidGrid("need at least one time step"));
        }
        if k_terms == 0 {
            return Err(PdeError::EmptyTruncation);
        }
        let hf = h0.value();
        let mut w = Vec::with_capacity(n_steps);
        let mut omega = Vec::with_capacity(n_steps);
        for r in 0..n_steps {
            w.push(w_eval((r + 1) as f64 * dt, hf, k_terms));
            omega.push(w_cell_integral(r as f64 * dt, (r + 1) as f64 * dt, hf));
        }
        for r in 1..n_steps {
            debug_assert!(w[r] > 0.0 && w[r] < w[r - 1], "kernel must decrease");
            debug_assert!(omega[r] > 0.0 && omega[r] <= omega[r - 1]);
        }
        Ok(Self {
            h0,
            k_terms,
            dt,
            w,
            omega,
        })
    }

    pub fn h0(&self) -> ToothHeight {
        self.h0
    }

    pub fn k_terms(&self) -> usize {
        self.k_terms
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn len(&self) -> usize {
        self.w.len()
    }

    pub fn is_empty(&self) -> bool {
        self.w.is_empty()
    }

    /// `w((r+1) dt)`.
    pub fn w_at_step(&self, r: usize) -> f64 {
        self.w[r]
    }

    pub fn w_values(&self) -> &[f64] {
        &self.w
    }

    /// `int_{r dt}^{(r+1) dt} w(s) ds`.
    pub fn weight(&self, r: usize) -> f64 {
        self.omega[r]
    }
}

#[allow(clippy::excessive_precision)]
const GL16_NODES: [f64; 8] = [
    0.095012509837637440185,
    0.281603550779258913230,
    0.458016777657227386342,
    0.617876244402643748447,
    0.755404408355003033895,
    0.865631202387831743880,
    0.944575023073232576078,
    0.989400934991649932596,
];
#[allow(clippy::excessive_precision)]
const GL16_WEIGHTS: [f64; 8] = [
    0.189450610455068496285,
    0.182603415044923588867,
    0.169156519395002538189,
    0.149595988816576732081,
    0.124628971255533872052,
    0.095158511682492784810,
    0.062253523938647892863,
    0.027152459411754094852,
];

fn gauss_panel(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for (x, wgt) in GL16_NODES.iter().zip(GL16_WEIGHTS.iter()) {
        acc += wgt * (f(mid + half * x) + f(mid - half * x));
    }
    acc * half
}

/// Absolute discrepancy between a numeric Laplace transform of the
/// kernel and the closed form `2 tanh(h0 sqrt(2s)) / sqrt(2s)`
/// (`sqrt(2/s)` for an infinite tooth).
///
/// The head `[0, A]` is integrated after the substitution `t = u^2`,
/// which flattens the square-root singularity at zero; the tail beyond
/// `A = 30/s` is summed in closed form and is below 1e-12.
pub fn kernel_laplace_check(h0: ToothHeight, s: f64) -> Result<f64, PdeError> {
    if !s.is_finite() || s <= 0.0 {
        return Err(PdeError::BadLaplaceVariable(s));
    }
    let hf = h0.value();
    let closed = match h0 {
        ToothHeight::Infinite => (2.0 / s).sqrt(),
        ToothHeight::Finite(h) => 2.0 * (h * (2.0 * s).sqrt()).tanh() / (2.0 * s).sqrt(),
    };

    let a = 30.0 / s;
    let u_max = a.sqrt();
    let integrand = |u: f64| 2.0 * u * (-s * u * u).exp() * w_eval(u * u, hf, 512);
    let panels = 160;
    let mut head = 0.0;
    for p in 0..panels {
        let lo = u_max * p as f64 / panels as f64;
        let hi = u_max * (p + 1) as f64 / panels as f64;
        head += gauss_panel(integrand, lo, hi);
    }

    let tail = match h0 {
        ToothHeight::Infinite => (2.0 / s).sqrt() * erfc((s * a).sqrt()),
        ToothHeight::Finite(h) => {
            let lam0 = PI * PI / (8.0 * h * h);
            let mut acc = 0.0;
            for k in 0..256 {
                let q = (2 * k + 1) as f64;
                let lam = q * q * lam0;
                let term = (-(s + lam) * a).exp() / (s + lam);
                acc += term;
                if term < 1e-24 {
                    break;
                }
            }
            2.0 * acc / h
        }
    };

    Ok((head + tail - closed).abs())
}

/// Write a tabulated kernel as CSV with header `t,w`.
pub fn write_kernel_csv<W: Write>(out: &mut W, kernel: &CaputoKernel) -> io::Result<()> {
    writeln!(out, "t,w")?;
    for r in 0..kernel.len() {
        writeln!(
            out,
            "{:.12e},{:.12e}",
            (r + 1) as f64 * kernel.dt(),
            kernel.w_at_step(r)
        )?;
    }
    Ok(())
}

pub fn write_kernel_csv_file(path: &Path, kernel: &CaputoKernel) -> io::Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_kernel_csv(&mut out, kernel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_tooth_closed_form_and_singularity() {
        let w = kernel_w(2.0 / PI, ToothHeight::Infinite, 1).unwrap();
        assert!((w - 1.0).abs() < 1e-15);
        assert!(matches!(
            kernel_w(0.0, ToothHeight::Infinite, 1),
            Err(PdeError::KernelSingularAtZero)
        ));
        assert!(matches!(
            kernel_w(-1.0, ToothHeight::Infinite, 1),
            Err(PdeError::NonPositiveTime(_))
        ));
    }

    #[test]
    fn partial_sums_decrease_and_saturate_in_depth() {
        let h = ToothHeight::Finite(1.0);
        let w1 = kernel_w(0.1, h, 50).unwrap();
        let w2 = kernel_w(0.2, h, 50).unwrap();
        let w4 = kernel_w(0.4, h, 50).unwrap();
        assert!(w1 > w2 && w2 > w4);

        let shallow = kernel_w(1.0, h, 50).unwrap();
        let deep = kernel_w(1.0, h, 1000).unwrap();
        assert!((shallow - deep).abs() < 1e-12);
        assert!(matches!(
            kernel_w(1.0, h, 0),
            Err(PdeError::EmptyTruncation)
        ));
    }

    #[test]
    fn image_and_series_branches_agree_around_the_switch() {
        for h in [1.0, 2.0] {
            for frac in [0.5, 0.9, 1.0, 1.2, 2.0] {
                let t = frac * h * h;
                let series = series_partial_sum(t, h, 4000);
                let image = image_sum(t, h);
                assert!(
                    ((series - image) / series).abs() < 1e-13,
                    "w branches disagree at t = {t}, h = {h}: {series} vs {image}"
                );
            }
        }
    }

    #[test]
    fn cell_integrals_match_midpoint_refinement() {
        // Compare the closed-form cell integral against fine midpoint
        // quadrature of the kernel on cells straddling both branches.
        for (t1, t2) in [(0.3, 0.45), (0.8, 1.3), (2.0, 2.5)] {
            let exact = w_cell_integral(t1, t2, Some(1.0));
            let n = 40_000;
            let step = (t2 - t1) / n as f64;
            let mut mid = 0.0;
            for i in 0..n {
                let t = t1 + (i as f64 + 0.5) * step;
                mid += w_eval(t, Some(1.0), 512) * step;
            }
            assert!(
                (exact - mid).abs() < 1e-9,
                "cell [{t1}, {t2}]: exact {exact} vs midpoint {mid}"
            );
        }
        // The leading cell holds the t^{-1/2} edge; substituting
        // t = u^2 makes the integrand smooth so midpoint converges.
        let t2 = 0.05f64;
        let exact = w_cell_integral(0.0, t2, Some(1.0));
        let n = 20_000;
        let step = t2.sqrt() / n as f64;
        let mut mid = 0.0;
        for i in 0..n {
            let u = (i as f64 + 0.5) * step;
            mid += 2.0 * u * w_eval(u * u, Some(1.0), 512) * step;
        }
        assert!(
            (exact - mid).abs() < 1e-10,
            "edge cell: exact {exact} vs substituted midpoint {mid}"
        );
        // Infinite tooth: integral over [0, t] is sqrt(8 t / pi).
        let got = w_cell_integral(0.0, 0.7, None);
        assert!((got - (8.0 * 0.7 / PI).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn tabulation_is_positive_decreasing_and_exact_for_infinite_teeth() {
        let k = CaputoKernel::tabulate(ToothHeight::Finite(1.0), 64, 1e-3, 4000).unwrap();
        for r in 1..k.len() {
            assert!(k.w_at_step(r) > 0.0);
            assert!(k.w_at_step(r) < k.w_at_step(r - 1));
            assert!(k.weight(r) > 0.0 && k.weight(r) <= k.weight(r - 1));
        }

        let inf = CaputoKernel::tabulate(ToothHeight::Infinite, 1, 0.25, 8).unwrap();
        for r in 0..inf.len() {
            let t = (r + 1) as f64 * 0.25;
            assert_eq!(inf.w_at_step(r), (2.0 / (PI * t)).sqrt());
        }
    }

    #[test]
    fn laplace_discrepancy_is_small_on_the_reference_grid() {
        for h0 in [
            ToothHeight::Finite(1.0),
            ToothHeight::Finite(2.0),
            ToothHeight::Infinite,
        ] {
            for s in [0.5, 1.0, 2.0] {
                let d = kernel_laplace_check(h0, s).unwrap();
                assert!(d < 1e-6, "discrepancy {d} at h0 = {h0:?}, s = {s}");
            }
        }
        let d = kernel_laplace_check(ToothHeight::Infinite, 2.0).unwrap();
        assert!(d < 1e-8);

        // Frozen closed-form value at unit height and unit variable.
        let closed = 2.0 * (2.0f64.sqrt()).tanh() / 2.0f64.sqrt();
        assert!((closed - 1.256366909811).abs() < 1e-11);
        assert!(matches!(
            kernel_laplace_check(ToothHeight::Finite(1.0), 0.0),
            Err(PdeError::BadLaplaceVariable(_))
        ));
    }

    #[test]
    fn kernel_csv_layout_is_stable() {
        let k = CaputoKernel::tabulate(ToothHeight::Infinite, 1, 0.5, 3).unwrap();
        let mut buf = Vec::new();
        write_kernel_csv(&mut buf, &k).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some("t,w"));
        assert_eq!(lines.count(), 3);
    }
}
