use std::fmt;
use std::str::FromStr;

/// `start:stop:steps`, evenly spaced with both endpoints included.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl Grid {
    pub fn new(start: f64, stop: f64, steps: usize) -> Result<Self, String> {
        if !(start.is_finite() && stop.is_finite()) {
            return Err("bounds must be finite".into());
        }
        if start >= stop {
            return Err(format!("start {start} must be below stop {stop}"));
        }
        if steps < 2 {
            return Err(format!("at least 2 steps are required, got {steps}"));
        }
        Ok(Self { start, stop, steps })
    }

    pub fn points(&self) -> Vec<f64> {
        let last = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|k| {
                if k + 1 == self.steps {
                    self.stop
                } else {
                    self.start + (self.stop - self.start) * k as f64 / last
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, steps] = parts[..] else {
            return Err(format!("expected start:stop:steps, got {s:?}"));
        };
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("{x:?}: {e}"));
        let steps = steps.trim().parse::<usize>().map_err(|e| format!("{steps:?}: {e}"))?;
        Grid::new(num(start)?, num(stop)?, steps)
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.start, self.stop, self.steps)
    }
}
