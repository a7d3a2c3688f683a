//! The α-flow: every ensemble sample advances by Heun steps along
//! dF/dα = 𝒟g_α(F), and the pushed ensemble is checked against the target
//! free Gibbs state through Schwinger–Dyson residuals and moments.

use super::gradient::{dg_eval, AlphaCtx, TransportConfig};
use super::TransportError;
use crate::freesde::PotentialFamily;
use crate::matrep::eval::EvalCtx;
use crate::matrep::{
    mean_stderr, sd_residual, Ensemble, EnsembleMeta, HermMatrix, Mat, MatrixTuple, SdEntry,
};
use crate::ncalg::{monomial, NcPoly, Word};
use crate::scalar::Coeff;
use rayon::prelude::*;

#[derive(Clone, Debug, serde::Serialize)]
pub struct AlphaDiag {
    pub alpha: f64,
    /// Ensemble means of τ̂(X₁^m), m = 1..6.
    pub moments: Vec<f64>,
    pub max_op_norm: f64,
    pub sd: Vec<SdEntry>,
    pub mean_dg_stderr: f64,
    pub max_tail_bound: f64,
}

pub struct TransportOutcome {
    pub flowed: Ensemble,
    pub snapshots: Vec<(f64, Ensemble)>,
    pub diags: Vec<AlphaDiag>,
}

/// Monomial battery of all words of degree ≤ 4 (n = 1) or per-letter
/// powers plus degree-2 mixed words (n ≥ 2).
pub fn monomial_battery(n: u8) -> Vec<(String, NcPoly)> {
    let mut out = Vec::new();
    if n == 1 {
        for d in 1..=4usize {
            out.push((format!("x^{d}"), monomial(1, &vec![1u8; d], Coeff::one())));
        }
    } else {
        for i in 1..=n {
            for d in 1..=4usize {
                out.push((format!("x{i}^{d}"), monomial(n, &vec![i; d], Coeff::one())));
            }
        }
        for i in 1..=n {
            for j in (i + 1)..=n {
                out.push((
                    format!("x{i}x{j}"),
                    NcPoly::from_term(n, Word::from_letters(&[i, j]), Coeff::one()),
                ));
            }
        }
    }
    out
}

struct SampleRun {
    states: Vec<(usize, MatrixTuple)>,
    final_state: MatrixTuple,
    stderr_sum: f64,
    tail_max: f64,
    evals: usize,
}

/// Flows every sample of `ens` from α = 0 to `cfg.alpha_max` by Heun
/// predictor–corrector steps with fresh drift noise per evaluation.
pub fn flow_transport(
    ens: &Ensemble,
    fam: &PotentialFamily,
    cfg: &TransportConfig,
) -> Result<TransportOutcome, TransportError> {
    cfg.validate()?;
    let steps = (cfg.alpha_max / cfg.d_alpha).round().max(1.0) as usize;
    let d_alpha = cfg.alpha_max / steps as f64;
    let alphas: Vec<f64> = (0..=steps).map(|k| d_alpha * k as f64).collect();
    let checkpoints: Vec<usize> = cfg
        .checkpoints
        .iter()
        .map(|&a| {
            let k = (a / d_alpha).round() as usize;
            assert!(
                k <= steps && (alphas[k] - a).abs() < 1e-9,
                "checkpoint {a} is not an alpha-grid node"
            );
            k
        })
        .collect();
    let contexts: Vec<AlphaCtx> = alphas.iter().map(|&a| AlphaCtx::new(fam, a)).collect();
    let c_min = fam.c_min();
    if c_min <= 0.0 {
        return Err(TransportError::Config(format!(
            "family convexity constant must be positive for the tail budget (got {c_min})"
        )));
    }

    let runs: Vec<Result<SampleRun, TransportError>> = ens
        .samples
        .par_iter()
        .enumerate()
        .map(|(sample_idx, start)| {
            let mut y: Vec<Mat> = start.mats.iter().map(|m| m.mat().clone()).collect();
            let mut states = Vec::new();
            let mut stderr_sum = 0.0;
            let mut tail_max = 0.0f64;
            let mut evals = 0usize;
            let record =
                |y: &[Mat], k: usize, states: &mut Vec<(usize, MatrixTuple)>| -> Result<(), TransportError> {
                    if checkpoints.contains(&k) {
                        let mats = y.iter().map(|m| HermMatrix::symmetrized(m.clone())).collect();
                        states.push((k, MatrixTuple::new(mats).map_err(TransportError::Mat)?));
                    }
                    Ok(())
                };
            record(&y, 0, &mut states)?;
            for k in 0..steps {
                let g1 = dg_eval(
                    &contexts[k],
                    &y,
                    &cfg.grid,
                    cfg,
                    c_min,
                    &[sample_idx as u64, k as u64, 0],
                )?;
                let mut yp = y.clone();
                for (m, d) in yp.iter_mut().zip(&g1.drift) {
                    m.add_scaled(d, d_alpha);
                    m.hermitize();
                }
                let g2 = dg_eval(
                    &contexts[k + 1],
                    &yp,
                    &cfg.grid,
                    cfg,
                    c_min,
                    &[sample_idx as u64, k as u64, 1],
                )?;
                for ((m, d1), d2) in y.iter_mut().zip(&g1.drift).zip(&g2.drift) {
                    m.add_scaled(d1, d_alpha / 2.0);
                    m.add_scaled(d2, d_alpha / 2.0);
                    m.hermitize();
                }
                stderr_sum += g1.stderr + g2.stderr;
                tail_max = tail_max.max(g1.tail_bound).max(g2.tail_bound);
                evals += 2;
                for m in &y {
                    let t2 = m.herm_inner(m) / m.n as f64;
                    if t2 > cfg.confine_norm * cfg.confine_norm {
                        let norm = m.herm_op_norm();
                        if norm > cfg.confine_norm {
                            return Err(TransportError::Confinement {
                                sample: sample_idx,
                                alpha: alphas[k + 1],
                                norm,
                                bound: cfg.confine_norm,
                            });
                        }
                    }
                }
                record(&y, k + 1, &mut states)?;
            }
            let mats = y.iter().map(|m| HermMatrix::symmetrized(m.clone())).collect();
            Ok(SampleRun {
                states,
                final_state: MatrixTuple::new(mats).map_err(TransportError::Mat)?,
                stderr_sum,
                tail_max,
                evals,
            })
        })
        .collect();

    let mut finals = Vec::with_capacity(ens.len());
    let mut snap_map: Vec<Vec<MatrixTuple>> = checkpoints.iter().map(|_| Vec::new()).collect();
    let mut stderr_sum = 0.0;
    let mut tail_max = 0.0f64;
    let mut evals = 0usize;
    for run in runs {
        let run = run?;
        for (slot, &k) in checkpoints.iter().enumerate() {
            if let Some((_, tuple)) = run.states.iter().find(|(kk, _)| *kk == k) {
                snap_map[slot].push(tuple.clone());
            }
        }
        finals.push(run.final_state);
        stderr_sum += run.stderr_sum;
        tail_max = tail_max.max(run.tail_max);
        evals += run.evals;
    }
    let meta = |alpha: f64| EnsembleMeta {
        seed: cfg.seed,
        potential: None,
        chain: Some(serde_json::json!({"transport_alpha": alpha})),
        acceptance_rate: None,
        autocorr_time: None,
        notes: vec![format!("transport flow at alpha = {alpha}")],
    };
    let flowed = Ensemble::new(finals, meta(cfg.alpha_max)).map_err(TransportError::Mat)?;
    let mut snapshots = Vec::new();
    let mut diags = Vec::new();
    let mean_dg_stderr = stderr_sum / evals.max(1) as f64;
    for (slot, &k) in checkpoints.iter().enumerate() {
        let alpha = alphas[k];
        let snap = Ensemble::new(snap_map[slot].clone(), meta(alpha)).map_err(TransportError::Mat)?;
        diags.push(alpha_diagnostics(&snap, fam, alpha, mean_dg_stderr, tail_max)?);
        snapshots.push((alpha, snap));
    }
    Ok(TransportOutcome { flowed, snapshots, diags })
}

fn alpha_diagnostics(
    ens: &Ensemble,
    fam: &PotentialFamily,
    alpha: f64,
    mean_dg_stderr: f64,
    max_tail_bound: f64,
) -> Result<AlphaDiag, TransportError> {
    let v_alpha = fam.v_alpha(alpha);
    let sd = sd_residual(ens, &v_alpha, &monomial_battery(ens.n_letters()))
        .map_err(TransportError::Mat)?;
    let mut moments = Vec::new();
    for m in 1..=6usize {
        let vals: Vec<f64> = ens
            .samples
            .iter()
            .map(|x| {
                let mut ctx = EvalCtx::new(x);
                ctx.tau_word(&Word::from_letters(&vec![1u8; m])).re
            })
            .collect();
        moments.push(mean_stderr(&vals).0);
    }
    let max_op_norm = ens.samples.iter().map(|x| x.max_op_norm()).fold(0.0, f64::max);
    Ok(AlphaDiag { alpha, moments, max_op_norm, sd, mean_dg_stderr, max_tail_bound })
}

#[derive(Clone, Debug, serde::Serialize)]
pub struct PushforwardReport {
    pub sd: Vec<SdEntry>,
    /// Per battery entry: |flowed mean − reference mean| and the combined
    /// standard error, when a reference ensemble is supplied.
    pub moment_distance: Option<Vec<(String, f64, f64)>>,
}

/// Checks that a flowed ensemble is a free Gibbs sample for `v_alpha`:
/// Schwinger–Dyson residuals over the monomial battery, plus a moment
/// distance to an independently sampled reference when available.
pub fn pushforward_check(
    flowed: &Ensemble,
    v_alpha: &NcPoly,
    reference: Option<&Ensemble>,
) -> Result<PushforwardReport, TransportError> {
    let battery = monomial_battery(flowed.n_letters());
    if battery.is_empty() {
        return Ok(PushforwardReport { sd: Vec::new(), moment_distance: None });
    }
    let sd = sd_residual(flowed, v_alpha, &battery).map_err(TransportError::Mat)?;
    let moment_distance = match reference {
        None => None,
        Some(r) => {
            let mut out = Vec::new();
            for (label, p) in &battery {
                let f = |e: &Ensemble| -> (f64, f64) {
                    let vals: Vec<f64> = e
                        .samples
                        .iter()
                        .map(|x| {
                            let mut ctx = EvalCtx::new(x);
                            crate::matrep::tau_hat(&crate::matrep::eval_poly_ctx(p, &mut ctx)).re
                        })
                        .collect();
                    mean_stderr(&vals)
                };
                let (mf, sf) = f(flowed);
                let (mr, sr) = f(r);
                out.push((label.clone(), (mf - mr).abs(), (sf * sf + sr * sr).sqrt()));
            }
            Some(out)
        }
    };
    Ok(PushforwardReport { sd, moment_distance })
}
