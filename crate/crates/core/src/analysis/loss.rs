use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LossCurve {
    pub label: String,
    pub points: Vec<(u64, f64)>,
}

impl LossCurve {
    pub fn new(label: impl Into<String>, points: Vec<(u64, f64)>) -> Result<Self> {
        let curve = Self {
            label: label.into(),
            points,
        };
        curve.validate()?;
        Ok(curve)
    }

    pub fn validate(&self) -> Result<()> {
        for w in self.points.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(Error::Invalid(format!(
                    "curve {:?}: steps not strictly increasing at {}",
                    self.label, w[1].0
                )));
            }
        }
        if let Some((step, loss)) = self.points.iter().find(|(_, l)| !(*l > 0.0)) {
            return Err(Error::Invalid(format!(
                "curve {:?}: non-positive loss {loss} at step {step}",
                self.label
            )));
        }
        Ok(())
    }

    /// Reads a `step,loss` CSV. A header row is optional.
    pub fn from_csv(label: impl Into<String>, path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .trim(csv::Trim::All)
            .from_path(path)
            .map_err(|e| Error::Invalid(format!("{}: {e}", path.display())))?;
        let mut points = Vec::new();
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec.map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
            if rec.len() != 2 {
                return Err(Error::Parse { line: i + 1, message: "expected step,loss".into() });
            }
            match (rec[0].parse::<u64>(), rec[1].parse::<f64>()) {
                (Ok(step), Ok(loss)) => points.push((step, loss)),
                _ if i == 0 => continue,
                _ => return Err(Error::Parse { line: i + 1, message: format!("bad record {:?}", rec) }),
            }
        }
        Self::new(label, points)
    }

    pub fn final_loss(&self) -> Option<f64> {
        self.points.last().map(|p| p.1)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LossGap {
    pub final_a: f64,
    pub final_b: f64,
    /// Gap relative to the higher of the two final losses, in percent.
    pub relative_gap_percent: f64,
}

pub fn loss_gap(a: &LossCurve, b: &LossCurve) -> Result<LossGap> {
    let fa = a
        .final_loss()
        .ok_or_else(|| Error::Invalid(format!("curve {:?} is empty", a.label)))?;
    let fb = b
        .final_loss()
        .ok_or_else(|| Error::Invalid(format!("curve {:?} is empty", b.label)))?;
    let (hi, lo) = if fa >= fb { (fa, fb) } else { (fb, fa) };
    Ok(LossGap {
        final_a: fa,
        final_b: fb,
        relative_gap_percent: 100.0 * (hi - lo) / hi,
    })
}
