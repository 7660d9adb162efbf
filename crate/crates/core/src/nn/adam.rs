use super::real::Real;
use super::tensor::Param;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub lr: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub eps: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            lr: 1e-3,
            beta1: 0.9,
            beta2: 0.999,
            eps: 1e-8,
        }
    }
}

/// Adam with bias correction. Moment buffers line up with the parameter
/// list passed to [`Adam::new`]; later calls must pass the same list.
#[derive(Debug, Clone)]
pub struct Adam<R> {
    pub config: AdamConfig,
    t: u64,
    m: Vec<Vec<R>>,
    v: Vec<Vec<R>>,
}

impl<R: Real> Adam<R> {
    pub fn new(config: AdamConfig, params: &[&Param<R>]) -> Self {
        let zeros = || {
            params
                .iter()
                .map(|p| vec![R::zero(); p.value.len()])
                .collect()
        };
        Self {
            config,
            t: 0,
            m: zeros(),
            v: zeros(),
        }
    }

    pub fn steps(&self) -> u64 {
        self.t
    }

    pub fn step(&mut self, params: &mut [&mut Param<R>]) -> Result<()> {
        if params.len() != self.m.len() {
            return Err(Error::Usage(format!(
                "optimizer tracks {} parameters, got {}",
                self.m.len(),
                params.len()
            )));
        }
        for (p, m) in params.iter().zip(&self.m) {
            if p.value.len() != m.len() {
                return Err(Error::Usage(format!("parameter {} changed size", p.name)));
            }
            if !p.grad.is_finite() {
                return Err(Error::Numeric(format!("non-finite gradient in {}", p.name)));
            }
        }
        self.t += 1;
        let c = self.config;
        let b1 = R::from_f64_lossy(c.beta1);
        let b2 = R::from_f64_lossy(c.beta2);
        let correction1 = R::from_f64_lossy(1.0 - c.beta1.powf(self.t as f64));
        let correction2 = R::from_f64_lossy(1.0 - c.beta2.powf(self.t as f64));
        let lr = R::from_f64_lossy(c.lr);
        let eps = R::from_f64_lossy(c.eps);
        let one = R::one();
        for ((p, m), v) in params.iter_mut().zip(&mut self.m).zip(&mut self.v) {
            let grads = p.grad.data().to_vec();
            for (((w, &g), mi), vi) in p
                .value
                .data_mut()
                .iter_mut()
                .zip(&grads)
                .zip(m.iter_mut())
                .zip(v.iter_mut())
            {
                *mi = b1 * *mi + (one - b1) * g;
                *vi = b2 * *vi + (one - b2) * g * g;
                let m_hat = *mi / correction1;
                let v_hat = *vi / correction2;
                *w -= lr * m_hat / (v_hat.sqrt() + eps);
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::Tensor;

    fn param(v: Vec<f64>) -> Param<f64> {
        Param::new("p", Tensor::from_vec(&[v.len()], v).unwrap())
    }

    #[test]
    fn fresh_state_is_zero() {
        let p = param(vec![1.0, 2.0]);
        let a = Adam::new(AdamConfig::default(), &[&p]);
        assert_eq!(a.steps(), 0);
        assert!(a.m[0].iter().chain(&a.v[0]).all(|&x| x == 0.0));
    }

    #[test]
    fn zero_gradient_leaves_params() {
        let mut p = param(vec![1.0, -2.0]);
        let mut a = Adam::new(AdamConfig::default(), &[&p]);
        a.step(&mut [&mut p]).unwrap();
        assert_eq!(p.value.data(), &[1.0, -2.0]);
    }

    #[test]
    fn first_step_moves_by_lr() {
        let mut p = param(vec![0.0; 4]);
        p.grad.fill(1.0);
        let cfg = AdamConfig::default();
        let mut a = Adam::new(cfg, &[&p]);
        a.step(&mut [&mut p]).unwrap();
        // m_hat = v_hat = 1, so the step is lr / (1 + eps)
        let expect = cfg.lr / (1.0 + cfg.eps);
        for &w in p.value.data() {
            assert!((w + expect).abs() < 1e-15);
        }
    }

    #[test]
    fn deterministic_trajectories() {
        let run = || {
            let mut p = param(vec![3.0]);
            let mut a = Adam::new(
                AdamConfig {
                    lr: 0.1,
                    ..AdamConfig::default()
                },
                &[&p],
            );
            let mut traj = Vec::new();
            for _ in 0..50 {
                let w = p.value.data()[0];
                p.grad.data_mut()[0] = 2.0 * (w - 1.0);
                a.step(&mut [&mut p]).unwrap();
                traj.push(p.value.data()[0].to_bits());
            }
            traj
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn non_finite_gradient_names_param() {
        let mut p = param(vec![0.0]);
        p.name = "conv0.weight".into();
        p.grad.data_mut()[0] = f64::INFINITY;
        let mut a = Adam::new(AdamConfig::default(), &[&p]);
        let err = a.step(&mut [&mut p]).unwrap_err();
        assert!(matches!(err, Error::Numeric(ref m) if m.contains("conv0.weight")));
        assert_eq!(p.value.data(), &[0.0]);
    }
}
