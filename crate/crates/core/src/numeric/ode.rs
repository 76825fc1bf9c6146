//! Adaptive Dormand–Prince 5(4) integrator for small first-order systems.

/// Error-control settings for [`DormandPrince`].
#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance { rel: 1e-10, abs: 1e-14 }
    }
}

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// difference between 5th and embedded 4th order weights
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Stepper for `y' = f(x, y)` with `N` components.
pub struct DormandPrince<F, const N: usize>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    rhs: F,
    pub tol: Tolerance,
    pub max_steps: usize,
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for (c, k) in terms {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

impl<F, const N: usize> DormandPrince<F, N>
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(rhs: F, tol: Tolerance) -> Self {
        DormandPrince { rhs, tol, max_steps: 1_000_000 }
    }

    /// One explicit step of size `h`, returning the 5th-order solution and
    /// the scaled error norm.
    pub fn step(&self, x: f64, y: &[f64; N], h: f64) -> ([f64; N], f64) {
        let f = &self.rhs;
        let k1 = f(x, y);
        let k2 = f(x + C2 * h, &axpy(y, h, &[(A21, &k1)]));
        let k3 = f(x + C3 * h, &axpy(y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = f(x + C4 * h, &axpy(y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = f(
            x + C5 * h,
            &axpy(y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = f(
            x + h,
            &axpy(y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y5 = axpy(y, h, &[(B1, &k1), (B3, &k3), (B4, &k4), (B5, &k5), (B6, &k6)]);
        let k7 = f(x + h, &y5);
        let mut err = 0.0f64;
        for i in 0..N {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.tol.abs + self.tol.rel * y[i].abs().max(y5[i].abs());
            err = err.max((e / scale).abs());
        }
        (y5, err)
    }

    fn next_h(h: f64, err: f64) -> f64 {
        let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h * fac
    }

    /// Integrates from `x0` to `x1`, calling `on_step(x, y)` after every
    /// accepted step. Returning `false` from the callback stops early.
    /// Returns the final `(x, y)` and the last suggested step size.
    pub fn solve_with<G>(
        &self,
        x0: f64,
        y0: [f64; N],
        x1: f64,
        h0: f64,
        mut on_step: G,
    ) -> Result<(f64, [f64; N], f64), String>
    where
        G: FnMut(f64, &[f64; N], f64, &[f64; N]) -> bool,
    {
        let dir = (x1 - x0).signum();
        let mut x = x0;
        let mut y = y0;
        let mut h = h0.abs().min((x1 - x0).abs()) * dir;
        if h == 0.0 {
            return Ok((x, y, h0));
        }
        let mut steps = 0usize;
        while (x1 - x) * dir > 0.0 {
            if steps >= self.max_steps {
                return Err(format!("step limit reached at x = {x}"));
            }
            steps += 1;
            let last = (x + h - x1) * dir >= 0.0;
            let h_try = if last { x1 - x } else { h };
            let (y_new, err) = self.step(x, &y, h_try);
            if !err.is_finite() {
                h *= 0.25;
                if h.abs() < 1e-15 * x.abs().max(1.0) {
                    return Err(format!("non-finite state at x = {x}"));
                }
                continue;
            }
            if err <= 1.0 {
                let x_new = if last { x1 } else { x + h_try };
                let keep_going = on_step(x, &y, x_new, &y_new);
                x = x_new;
                y = y_new;
                h = Self::next_h(h_try, err);
                if !keep_going {
                    return Ok((x, y, h));
                }
            } else {
                h = Self::next_h(h_try, err);
                if h.abs() < 1e-15 * x.abs().max(1.0) {
                    return Err(format!("step size underflow at x = {x}"));
                }
            }
        }
        Ok((x, y, h))
    }

    pub fn solve(&self, x0: f64, y0: [f64; N], x1: f64, h0: f64) -> Result<[f64; N], String> {
        self.solve_with(x0, y0, x1, h0, |_, _, _, _| true).map(|(_, y, _)| y)
    }
}
