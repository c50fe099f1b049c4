use alloc::vec::Vec;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamParams {
    pub alpha: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamParams {
    fn default() -> Self {
        Self {
            alpha: 0.01,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

/// Bias-corrected ADAM with one moment pair per decision variable.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub params: AdamParams,
    pub t: u64,
    pub m: Vec<f64>,
    pub v: Vec<f64>,
}

impl AdamState {
    pub fn new(params: AdamParams, len: usize) -> Self {
        Self {
            params,
            t: 0,
            m: alloc::vec![0.0; len],
            v: alloc::vec![0.0; len],
        }
    }

    pub fn len(&self) -> usize {
        self.m.len()
    }

    pub fn is_empty(&self) -> bool {
        self.m.is_empty()
    }

    /// One update of `vars` along `-grad`. A non-finite gradient entry
    /// rejects the step and leaves state and variables untouched.
    pub fn step(&mut self, vars: &mut [f64], grad: &[f64]) -> Result<()> {
        if vars.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                expected: self.m.len(),
                got: vars.len(),
            });
        }
        if grad.len() != self.m.len() {
            return Err(Error::DimensionMismatch {
                expected: self.m.len(),
                got: grad.len(),
            });
        }
        if let Some(i) = grad.iter().position(|g| !g.is_finite()) {
            return Err(Error::NonFiniteGradient(i));
        }
        let AdamParams {
            alpha,
            beta1,
            beta2,
            epsilon,
        } = self.params;
        self.t += 1;
        let correction1 = 1.0 - libm::pow(beta1, self.t as f64);
        let correction2 = 1.0 - libm::pow(beta2, self.t as f64);
        for (((x, g), m), v) in vars.iter_mut().zip(grad).zip(&mut self.m).zip(&mut self.v) {
            *m = beta1 * *m + (1.0 - beta1) * g;
            *v = beta2 * *v + (1.0 - beta2) * g * g;
            let m_hat = *m / correction1;
            let v_hat = *v / correction2;
            *x -= alpha * m_hat / (libm::sqrt(v_hat) + epsilon);
        }
        Ok(())
    }

    /// Bias-corrected first moment.
    pub fn m_hat(&self) -> Vec<f64> {
        let correction = 1.0 - libm::pow(self.params.beta1, self.t as f64);
        self.m.iter().map(|m| m / correction).collect()
    }
}
