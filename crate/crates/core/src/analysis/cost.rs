//! Analytical per-GPU model-state memory under ZeRO stage 3 and
//! multi-GPU throughput arithmetic.
//!
//! Model states cost 16 bytes per parameter under mixed precision: bf16
//! parameters (2) and gradients (2), plus an fp32 master copy and two Adam
//! moments (4 + 4 + 4). Stage 3 partitions all three across `W` ranks.
//! Activations and temporary buffers are not part of the estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DtypeBytes {
    pub param: u32,
    pub grad: u32,
    pub optim_master: u32,
    pub optim_m1: u32,
    pub optim_m2: u32,
}

impl Default for DtypeBytes {
    fn default() -> Self {
        Self {
            param: 2,
            grad: 2,
            optim_master: 4,
            optim_m1: 4,
            optim_m2: 4,
        }
    }
}

impl DtypeBytes {
    pub fn optimizer(&self) -> u32 {
        self.optim_master + self.optim_m1 + self.optim_m2
    }

    pub fn total(&self) -> u32 {
        self.param + self.grad + self.optimizer()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainRunSpec {
    pub label: String,
    pub params: u64,
    pub world_size: u32,
    pub dtype_bytes: DtypeBytes,
    pub offload_params: bool,
    pub offload_optimizer: bool,
    pub tokens: u64,
    pub wall_hours: f64,
}

impl Default for TrainRunSpec {
    fn default() -> Self {
        Self {
            label: String::new(),
            params: 125_000_000,
            world_size: 1,
            dtype_bytes: DtypeBytes::default(),
            offload_params: false,
            offload_optimizer: false,
            tokens: 0,
            wall_hours: 0.0,
        }
    }
}

impl TrainRunSpec {
    pub fn validate(&self) -> Result<()> {
        if self.params == 0 {
            return Err(Error::Invalid("params must be >= 1".into()));
        }
        if self.world_size == 0 {
            return Err(Error::Invalid("world_size must be >= 1".into()));
        }
        Ok(())
    }

    /// Tokens processed per GPU-hour.
    pub fn tokens_per_gpu_hour(&self) -> Result<f64> {
        self.validate()?;
        if !(self.wall_hours > 0.0) {
            return Err(Error::Invalid(format!("wall_hours must be > 0 for run {:?}", self.label)));
        }
        Ok(self.tokens as f64 / (self.world_size as f64 * self.wall_hours))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MemoryEstimate {
    pub param_bytes: f64,
    pub grad_bytes: f64,
    pub optimizer_bytes: f64,
    /// Model-state bytes resident on each GPU.
    pub gpu_bytes_per_rank: f64,
    /// Offloaded shares held in host memory for one rank.
    pub host_bytes_per_rank: f64,
    /// Host memory summed over all ranks.
    pub host_bytes_total: f64,
    pub includes_activations: bool,
}

pub fn estimate_memory(spec: &TrainRunSpec) -> Result<MemoryEstimate> {
    spec.validate()?;
    let p = spec.params as f64;
    let w = spec.world_size as f64;
    let d = &spec.dtype_bytes;
    let param = d.param as f64 * p / w;
    let grad = d.grad as f64 * p / w;
    let optimizer = d.optimizer() as f64 * p / w;

    let mut gpu = param + grad + optimizer;
    let mut host = 0.0;
    if spec.offload_params {
        gpu -= param;
        host += param;
    }
    if spec.offload_optimizer {
        gpu -= optimizer;
        host += optimizer;
    }
    Ok(MemoryEstimate {
        param_bytes: param,
        grad_bytes: grad,
        optimizer_bytes: optimizer,
        gpu_bytes_per_rank: gpu,
        host_bytes_per_rank: host,
        host_bytes_total: host * w,
        includes_activations: false,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScalingEfficiency {
    pub base_tokens_per_gpu_hour: f64,
    pub scaled_tokens_per_gpu_hour: f64,
    /// Scaled per-GPU throughput relative to the base run; 1.0 is linear.
    pub efficiency: f64,
}

pub fn scaling_efficiency(base: &TrainRunSpec, scaled: &TrainRunSpec) -> Result<ScalingEfficiency> {
    let b = base.tokens_per_gpu_hour()?;
    let s = scaled.tokens_per_gpu_hour()?;
    if b == 0.0 {
        return Err(Error::Invalid("base run processed no tokens".into()));
    }
    Ok(ScalingEfficiency {
        base_tokens_per_gpu_hour: b,
        scaled_tokens_per_gpu_hour: s,
        efficiency: s / b,
    })
}

pub fn tokens_per_parameter(tokens: u64, params: u64) -> Result<f64> {
    if params == 0 {
        return Err(Error::Invalid("params must be > 0".into()));
    }
    Ok(tokens as f64 / params as f64)
}
