//! Size growth of main over an input schedule.
//!
//! This is evidence, not proof: a fitted log-log slope says nothing about
//! inputs beyond the schedule. A supplied candidate polynomial turns each
//! scale point into an exact check.

use serde::Serialize;

use crate::interp::{encode_u64, execute, ExecConfig, Frame, ObjectValue, RuntimeFault};
use crate::lang::Program;
use crate::maxpoly::{MaxPoly, Point, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct GrowthConfig {
    /// Input values, strictly increasing.
    pub scales: Vec<u64>,
    /// Attributes set to the scale numeral; empty means all of main.
    pub inputs: Vec<String>,
    /// Values for attributes that are not inputs.
    #[serde(skip)]
    pub fixed: Vec<(String, ObjectValue)>,
    pub exec: ExecConfig,
    /// `P` over the main attribute names, evaluated at the initial sizes.
    pub candidate: Option<MaxPoly>,
    /// Pairwise slopes above this are not polynomial of interest.
    pub max_degree: f64,
    /// Ratio between consecutive slopes that counts as acceleration.
    pub acceleration: f64,
    /// Acceleration only matters once slopes reach this.
    pub min_slope: f64,
    /// Largest tolerated least-squares residual, in log₂ units.
    pub max_residual: f64,
}

impl Default for GrowthConfig {
    fn default() -> Self {
        GrowthConfig {
            scales: default_scales(),
            inputs: Vec::new(),
            fixed: Vec::new(),
            exec: ExecConfig::default(),
            candidate: None,
            max_degree: 6.0,
            acceleration: 1.5,
            min_slope: 2.0,
            max_residual: 2.0,
        }
    }
}

/// 2, 4, 8, …, 256.
pub fn default_scales() -> Vec<u64> {
    (1..=8).map(|k| 1u64 << k).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct CandidateCheck {
    #[serde(serialize_with = "crate::maxpoly::expr::serde_rat::rational")]
    pub bound: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScalePoint {
    pub scale: u64,
    pub input_sizes: Vec<u64>,
    pub final_sizes: Vec<u64>,
    /// Largest final attribute size.
    pub max_final: u64,
    /// Largest attribute size at any traced point of the run.
    pub peak: u64,
    pub steps: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate: Option<CandidateCheck>,
}

#[derive(Debug, Clone, Serialize)]
pub struct Truncation {
    pub scale: u64,
    pub fault: RuntimeFault,
}

#[derive(Debug, Clone, Serialize)]
pub struct Fit {
    pub slope: f64,
    pub intercept: f64,
    pub max_residual: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum GrowthVerdict {
    PolyConsistent { degree: u32 },
    SuperPolySuspect { reason: String },
    /// Fewer than four scale points ran.
    Insufficient { points: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct GrowthReport {
    pub attributes: Vec<String>,
    pub inputs: Vec<String>,
    pub points: Vec<ScalePoint>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub truncated: Option<Truncation>,
    /// Slopes of log₂(1 + size) against log₂(scale) between neighbours.
    pub slopes: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit: Option<Fit>,
    pub verdict: GrowthVerdict,
    /// False when the candidate fails at some point.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub candidate_holds: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GrowthError {
    #[error("scales must be positive and strictly increasing")]
    Schedule,
    #[error("`{0}` is not an attribute of main")]
    UnknownAttribute(String),
    #[error("candidate mentions `{0}`, which is not an attribute of main")]
    CandidateVariable(String),
}

fn log2(x: f64) -> f64 {
    x.log2()
}

pub fn least_squares(xs: &[f64], ys: &[f64]) -> Fit {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    let intercept = my - slope * mx;
    let max_residual = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0, f64::max);
    Fit {
        slope,
        intercept,
        max_residual,
    }
}

fn verdict(slopes: &[f64], fit: &Fit, cfg: &GrowthConfig) -> GrowthVerdict {
    if let Some((i, s)) = slopes.iter().enumerate().find(|(_, s)| **s > cfg.max_degree) {
        return GrowthVerdict::SuperPolySuspect {
            reason: format!("slope {s:.2} between scale points {i} and {} exceeds {}", i + 1, cfg.max_degree),
        };
    }
    let n = slopes.len();
    if n >= 3 {
        let (a, b, c) = (slopes[n - 3], slopes[n - 2], slopes[n - 1]);
        if c >= cfg.min_slope && a > 0.0 && b / a >= cfg.acceleration && c / b >= cfg.acceleration {
            return GrowthVerdict::SuperPolySuspect {
                reason: format!("slopes keep accelerating: {a:.2}, {b:.2}, {c:.2}"),
            };
        }
    }
    if fit.max_residual > cfg.max_residual {
        return GrowthVerdict::SuperPolySuspect {
            reason: format!("log-log residual {:.2} exceeds {}", fit.max_residual, cfg.max_residual),
        };
    }
    let last = slopes.last().copied().unwrap_or(0.0);
    GrowthVerdict::PolyConsistent {
        degree: (last - 0.25).ceil().max(0.0) as u32,
    }
}

/// Runs main once per scale with the input attributes set to the scale
/// numeral. A faulting run ends the schedule.
pub fn monitor_growth(p: &Program, cfg: &GrowthConfig) -> Result<GrowthReport, GrowthError> {
    if cfg.scales.is_empty() || cfg.scales[0] == 0 || cfg.scales.windows(2).any(|w| w[0] >= w[1]) {
        return Err(GrowthError::Schedule);
    }
    let attrs = p.main.attributes.clone();
    let inputs = if cfg.inputs.is_empty() {
        attrs.clone()
    } else {
        cfg.inputs.clone()
    };
    for a in inputs.iter().chain(cfg.fixed.iter().map(|f| &f.0)) {
        if !attrs.contains(a) {
            return Err(GrowthError::UnknownAttribute(a.clone()));
        }
    }
    if let Some(c) = &cfg.candidate {
        if let Some(v) = c.variables().into_iter().find(|v| !attrs.contains(v)) {
            return Err(GrowthError::CandidateVariable(v));
        }
    }

    let mut points = Vec::new();
    let mut truncated = None;
    for &n in &cfg.scales {
        let v = encode_u64(n, &p.numerals);
        let mut init = Frame::for_main(p, cfg.fixed.iter().cloned());
        for a in &inputs {
            init.attrs.insert(a.clone(), v.clone());
        }
        let input_sizes = init.sizes();
        let run = execute(p, init, &cfg.exec);
        let fin = match run.outcome {
            Ok(f) => f,
            Err(fault) => {
                truncated = Some(Truncation { scale: n, fault });
                break;
            }
        };
        let final_sizes = fin.sizes();
        let max_final = final_sizes.iter().copied().max().unwrap_or(0);
        let peak = run.trace.peak().max(max_final).max(input_sizes.iter().copied().max().unwrap_or(0));
        let candidate = cfg.candidate.as_ref().map(|c| {
            let at: Point = attrs
                .iter()
                .zip(&input_sizes)
                .map(|(a, s)| (a.clone(), Rational::from_integer((*s).into())))
                .collect();
            let bound = c.eval(&at).expect("candidate variables checked");
            let holds = bound >= Rational::from_integer(max_final.into());
            CandidateCheck { bound, holds }
        });
        points.push(ScalePoint {
            scale: n,
            input_sizes,
            final_sizes,
            max_final,
            peak,
            steps: run.trace.steps,
            candidate,
        });
    }

    let xs: Vec<f64> = points.iter().map(|p| log2(p.scale as f64)).collect();
    let ys: Vec<f64> = points.iter().map(|p| log2(1.0 + p.max_final as f64)).collect();
    let slopes: Vec<f64> = (1..points.len())
        .map(|i| (ys[i] - ys[i - 1]) / (xs[i] - xs[i - 1]))
        .collect();
    let (fit, verdict) = if points.len() < 4 {
        (None, GrowthVerdict::Insufficient { points: points.len() })
    } else {
        let fit = least_squares(&xs, &ys);
        let v = verdict(&slopes, &fit, cfg);
        (Some(fit), v)
    };
    let candidate_holds = cfg
        .candidate
        .as_ref()
        .map(|_| points.iter().all(|p| p.candidate.as_ref().is_some_and(|c| c.holds)));
    Ok(GrowthReport {
        attributes: attrs,
        inputs,
        points,
        truncated,
        slopes,
        fit,
        verdict,
        candidate_holds,
    })
}
