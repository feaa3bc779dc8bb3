//! Adaptive-moment descent with bias correction.

use super::train::TrainConfig;

#[derive(Clone, Debug)]
pub struct AdamState {
    m: Vec<f64>,
    v: Vec<f64>,
    t: u64,
}

impl AdamState {
    pub fn new(len: usize) -> Self {
        Self {
            m: vec![0.0; len],
            v: vec![0.0; len],
            t: 0,
        }
    }

    pub fn step_count(&self) -> u64 {
        self.t
    }
}

/// One in-place update. Panics if the shapes disagree.
pub fn adam_step(weights: &mut [f64], grads: &[f64], state: &mut AdamState, cfg: &TrainConfig) {
    assert_eq!(weights.len(), grads.len(), "gradient shape mismatch");
    assert_eq!(weights.len(), state.m.len(), "state shape mismatch");
    state.t += 1;
    let bc1 = 1.0 - cfg.beta1.powi(state.t as i32);
    let bc2 = 1.0 - cfg.beta2.powi(state.t as i32);
    for i in 0..weights.len() {
        let g = grads[i];
        state.m[i] = cfg.beta1 * state.m[i] + (1.0 - cfg.beta1) * g;
        state.v[i] = cfg.beta2 * state.v[i] + (1.0 - cfg.beta2) * g * g;
        let mhat = state.m[i] / bc1;
        let vhat = state.v[i] / bc2;
        weights[i] -= cfg.learning_rate * mhat / (vhat.sqrt() + cfg.epsilon);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(lr: f64, eps: f64) -> TrainConfig {
        TrainConfig {
            learning_rate: lr,
            epsilon: eps,
            ..TrainConfig::default()
        }
    }

    #[test]
    fn first_step_approaches_signed_learning_rate() {
        let mut w = vec![1.0, -2.0, 0.5];
        let grads = vec![3.0, -0.2, 1e-4];
        let mut state = AdamState::new(3);
        adam_step(&mut w, &grads, &mut state, &cfg(0.01, 1e-12));
        let expected = [1.0 - 0.01, -2.0 + 0.01, 0.5 - 0.01];
        for (got, want) in w.iter().zip(expected) {
            assert!((got - want).abs() < 1e-8, "{got} vs {want}");
        }
    }

    #[test]
    fn zero_gradient_leaves_weights_unchanged() {
        let mut w = vec![0.25, -1.5, 0.0, 3.0];
        let before = w.clone();
        let mut state = AdamState::new(4);
        adam_step(&mut w, &vec![0.0; 4], &mut state, &cfg(0.1, 1e-8));
        assert_eq!(w, before);
        assert_eq!(state.step_count(), 1);
    }

    #[test]
    fn identical_gradient_sequences_give_identical_trajectories() {
        let grads: Vec<Vec<f64>> = (0..20)
            .map(|t| (0..5).map(|i| ((t * 5 + i) as f64 * 0.37).sin()).collect())
            .collect();
        let run = || {
            let mut w = vec![0.1, 0.2, 0.3, 0.4, 0.5];
            let mut state = AdamState::new(5);
            for g in &grads {
                adam_step(&mut w, g, &mut state, &cfg(0.005, 1e-8));
            }
            w
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn constant_gradient_moves_weights_monotonically() {
        let mut w = vec![0.0];
        let mut state = AdamState::new(1);
        let mut prev = 0.0;
        for _ in 0..50 {
            adam_step(&mut w, &[2.5], &mut state, &cfg(0.01, 1e-8));
            assert!(w[0] < prev);
            prev = w[0];
        }
    }
}
