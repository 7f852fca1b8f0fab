//! Tridiagonal systems via Thomas elimination.

pub(crate) struct Tridiag {
    sub: Vec<f64>,
    diag: Vec<f64>,
    sup: Vec<f64>,
    scratch: Vec<f64>,
}

impl Tridiag {
    pub(crate) fn new(sub: Vec<f64>, diag: Vec<f64>, sup: Vec<f64>) -> Self {
        let n = diag.len();
        debug_assert!(sub.len() == n && sup.len() == n && n >= 2);
        Self {
            sub,
            diag,
            sup,
            scratch: vec![0.0; n],
        }
    }

    /// A symmetric Neumann diffusion matrix `I - c * D_xx` on `n`
    /// nodes, with reflecting ends: interior rows
    /// `(-c/2, 1 + c, -c/2)` after scaling by `dx^2`, end rows using
    /// the mirrored ghost node.
    pub(crate) fn neumann_diffusion(n: usize, c: f64) -> Self {
        let mut sub = vec![-c; n];
        let mut sup = vec![-c; n];
        let diag = vec![1.0 + 2.0 * c; n];
        sub[0] = 0.0;
        sup[0] = -2.0 * c;
        sub[n - 1] = -2.0 * c;
        sup[n - 1] = 0.0;
        Self::new(sub, diag, sup)
    }

    /// Thomas elimination; `rhs` is overwritten with the solution.
    pub(crate) fn solve(&mut self, rhs: &mut [f64]) {
        let n = self.diag.len();
        let c = &mut self.scratch;
        c[0] = self.sup[0] / self.diag[0];
        rhs[0] /= self.diag[0];
        for i in 1..n {
            let m = self.diag[i] - self.sub[i] * c[i - 1];
            c[i] = self.sup[i] / m;
            rhs[i] = (rhs[i] - self.sub[i] * rhs[i - 1]) / m;
        }
        for i in (0..n - 1).rev() {
            rhs[i] -= c[i] * rhs[i + 1];
        }
    }
}
