//! Linear warmup followed by cosine decay.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LrSchedule {
    pub peak_lr: f64,
    pub warmup_fraction: f64,
    pub total_steps: u64,
    pub floor_lr: f64,
}

impl Default for LrSchedule {
    fn default() -> Self {
        Self {
            peak_lr: 1e-4,
            warmup_fraction: 0.10,
            total_steps: 1000,
            floor_lr: 0.0,
        }
    }
}

impl LrSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.warmup_fraction > 0.0 && self.warmup_fraction < 1.0) {
            return Err(Error::Invalid(format!(
                "warmup_fraction must lie in (0, 1), got {}",
                self.warmup_fraction
            )));
        }
        if !(self.floor_lr >= 0.0 && self.peak_lr > self.floor_lr) {
            return Err(Error::Invalid("need peak_lr > floor_lr >= 0".into()));
        }
        if self.total_steps == 0 {
            return Err(Error::Invalid("total_steps must be >= 1".into()));
        }
        Ok(())
    }

    pub fn warmup_steps(&self) -> u64 {
        (self.warmup_fraction * self.total_steps as f64).round() as u64
    }
}

pub fn lr_at(step: u64, sched: &LrSchedule) -> Result<f64> {
    sched.validate()?;
    if step > sched.total_steps {
        return Err(Error::Invalid(format!(
            "step {step} beyond total_steps {}",
            sched.total_steps
        )));
    }
    let warmup = sched.warmup_steps();
    if warmup > 0 && step == warmup {
        return Ok(sched.peak_lr);
    }
    if step < warmup {
        return Ok(sched.peak_lr * step as f64 / warmup as f64);
    }
    let decay = sched.total_steps - warmup;
    let progress = if decay == 0 { 1.0 } else { (step - warmup) as f64 / decay as f64 };
    Ok(sched.floor_lr + (sched.peak_lr - sched.floor_lr) * 0.5 * (1.0 + (PI * progress).cos()))
}
