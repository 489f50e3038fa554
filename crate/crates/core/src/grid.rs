/// Uniform time grid `t_i = i·T/n` on `[0, T]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeGrid {
    horizon: f64,
    steps: usize,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("invalid time grid: horizon {horizon}, steps {steps}")]
pub struct GridError {
    pub horizon: f64,
    pub steps: usize,
}

impl TimeGrid {
    pub fn new(horizon: f64, steps: usize) -> Result<Self, GridError> {
        if !(horizon.is_finite() && horizon > 0.0) || steps == 0 {
            return Err(GridError { horizon, steps });
        }
        Ok(TimeGrid { horizon, steps })
    }

    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn node_count(&self) -> usize {
        self.steps + 1
    }

    pub fn step_size(&self) -> f64 {
        self.horizon / self.steps as f64
    }

    /// `t_i`, computed as `i·T/n` rather than by accumulation.
    pub fn node(&self, i: usize) -> f64 {
        if i == self.steps {
            return self.horizon;
        }
        i as f64 * self.horizon / self.steps as f64
    }

    pub fn nodes(&self) -> impl Iterator<Item = f64> + '_ {
        (0..=self.steps).map(|i| self.node(i))
    }

    /// The same horizon with `factor` times as many steps.
    pub fn refined(&self, factor: usize) -> Self {
        TimeGrid {
            horizon: self.horizon,
            steps: self.steps * factor,
        }
    }
}
