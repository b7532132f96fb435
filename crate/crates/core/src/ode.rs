//! Fixed-step classical Runge–Kutta integration.

/// A first-order system `dy/dt = f(t, y)` of fixed dimension.
pub trait OdeSystem {
    fn dim(&self) -> usize;
    fn rates(&self, t: f64, y: &[f64], dydt: &mut [f64]);
}

/// Classical RK4 stepper with preallocated stage buffers.
#[derive(Clone, Debug)]
pub struct Rk4 {
    k1: Vec<f64>,
    k2: Vec<f64>,
    k3: Vec<f64>,
    k4: Vec<f64>,
    scratch: Vec<f64>,
}

impl Rk4 {
    pub fn new(dim: usize) -> Self {
        Self {
            k1: vec![0.0; dim],
            k2: vec![0.0; dim],
            k3: vec![0.0; dim],
            k4: vec![0.0; dim],
            scratch: vec![0.0; dim],
        }
    }

    /// Advances `y` from `t` to `t + dt` in place.
    pub fn step<S: OdeSystem + ?Sized>(&mut self, system: &S, t: f64, y: &mut [f64], dt: f64) {
        let n = y.len();
        debug_assert_eq!(n, self.k1.len());
        let half = 0.5 * dt;

        system.rates(t, y, &mut self.k1);
        for i in 0..n {
            self.scratch[i] = y[i] + half * self.k1[i];
        }
        system.rates(t + half, &self.scratch, &mut self.k2);
        for i in 0..n {
            self.scratch[i] = y[i] + half * self.k2[i];
        }
        system.rates(t + half, &self.scratch, &mut self.k3);
        for i in 0..n {
            self.scratch[i] = y[i] + dt * self.k3[i];
        }
        system.rates(t + dt, &self.scratch, &mut self.k4);
        for i in 0..n {
            y[i] += dt / 6.0 * (self.k1[i] + 2.0 * self.k2[i] + 2.0 * self.k3[i] + self.k4[i]);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Decay(f64);
    impl OdeSystem for Decay {
        fn dim(&self) -> usize {
            1
        }
        fn rates(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
            dydt[0] = -self.0 * y[0];
        }
    }

    struct Oscillator;
    impl OdeSystem for Oscillator {
        fn dim(&self) -> usize {
            2
        }
        fn rates(&self, _t: f64, y: &[f64], dydt: &mut [f64]) {
            dydt[0] = y[1];
            dydt[1] = -y[0];
        }
    }

    #[test]
    fn exponential_decay_fourth_order() {
        let errs: Vec<f64> = [0.1, 0.05]
            .iter()
            .map(|&dt| {
                let sys = Decay(1.0);
                let mut rk = Rk4::new(1);
                let mut y = [1.0];
                let n = (1.0 / dt) as usize;
                for i in 0..n {
                    rk.step(&sys, i as f64 * dt, &mut y, dt);
                }
                (y[0] - (-1.0f64).exp()).abs()
            })
            .collect();
        let order = (errs[0] / errs[1]).log2();
        assert!((order - 4.0).abs() < 0.2, "observed order {order}");
    }

    #[test]
    fn oscillator_returns_after_one_period() {
        let sys = Oscillator;
        let mut rk = Rk4::new(sys.dim());
        let mut y = [1.0, 0.0];
        let n = 2000;
        let dt = 2.0 * std::f64::consts::PI / n as f64;
        for i in 0..n {
            rk.step(&sys, i as f64 * dt, &mut y, dt);
        }
        assert!((y[0] - 1.0).abs() < 1e-10 && y[1].abs() < 1e-10);
    }
}
