//! The `analyze` report: spectrum, sufficient conditions, asymptotic
//! coefficients and, when the conditions allow it, a control summary.

use std::fmt::Write as _;

use serde::Serialize;

use seqmetro::conditions::{
    check_corollary1_with, check_corollary2_with, check_theorem2_conditions_with, hnks_check_with, HlStatus,
    HlVerdict, HnksStatus,
};
use seqmetro::control_synth::{synthesize_control_transition, synthesize_control_with, verify_control_with};
use seqmetro::numerics::{CMatrix, C64};
use seqmetro::qfi::asymptotic_qfi_with;
use seqmetro::spectral::peripheral_spectrum;
use seqmetro::tolerances::Tolerances;

use crate::channel_file::{to_json, JsonMatrix, LoadedChannel};
use crate::exit::CliError;

pub fn cx(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct PeripheralRow {
    pub lambda: [f64; 2],
    pub modulus: f64,
    pub lambda_dot: Option<[f64; 2]>,
    pub fixed_point: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct WitnessSummary {
    pub index: usize,
    pub lambda: [f64; 2],
    pub lambda_dot: [f64; 2],
    pub input_state: JsonMatrix,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct VerdictSummary {
    pub status: String,
    pub witness: Option<WitnessSummary>,
    pub diagnostics: Vec<String>,
}

impl From<&HlVerdict> for VerdictSummary {
    fn from(v: &HlVerdict) -> Self {
        Self {
            status: status_name(v.status).into(),
            witness: v.witness.as_ref().map(|w| WitnessSummary {
                index: w.index,
                lambda: cx(w.lambda),
                lambda_dot: cx(w.lambda_dot),
                input_state: to_json(w.input_state.matrix()),
            }),
            diagnostics: v.diagnostics.clone(),
        }
    }
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct UnitarySignalSummary {
    pub unital: bool,
    pub signal_nonvanishing: bool,
    pub signal_normal: bool,
    pub candidates: Vec<[f64; 2]>,
    pub status: String,
    pub diagnostics: Vec<String>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct HnksSummary {
    pub status: String,
    pub residual: Option<f64>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct AsymptoticSummary {
    pub input: String,
    pub oscillation_period: Option<usize>,
    pub quasi_periodic: bool,
    pub n2_by_residue: Vec<f64>,
    pub n1_by_residue: Option<Vec<f64>>,
    pub achieves_hl: bool,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct ControlSummary {
    pub succeeded: bool,
    pub sanity_residual: f64,
    pub verified: bool,
    pub u_c: JsonMatrix,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Report {
    pub dim: usize,
    pub theta0: f64,
    pub peripheral: Vec<PeripheralRow>,
    pub warnings: Vec<String>,
    pub first_sufficient: VerdictSummary,
    pub unital_sufficient: VerdictSummary,
    pub unitary_signal: UnitarySignalSummary,
    pub hnks: Option<HnksSummary>,
    pub asymptotic: Option<AsymptoticSummary>,
    pub control: Option<ControlSummary>,
    pub notes: Vec<String>,
}

pub fn status_name(s: HlStatus) -> &'static str {
    match s {
        HlStatus::Achievable => "achievable",
        HlStatus::NotDetected => "not-detected",
        HlStatus::Inconclusive => "inconclusive",
    }
}

/// Runs every check on `ch`. Failures of optional stages are recorded as
/// notes; only an unusable channel is an error.
pub fn analyze(ch: &LoadedChannel, tol: &Tolerances) -> Result<Report, CliError> {
    let pc = &ch.pc;
    let spec = peripheral_spectrum(pc, tol)?;
    let peripheral = spec
        .entries
        .iter()
        .map(|e| PeripheralRow {
            lambda: cx(e.lambda),
            modulus: e.lambda.norm(),
            lambda_dot: e.lambda_dot.map(cx),
            fixed_point: e.is_fixed_point,
        })
        .collect();
    let mut notes = Vec::new();

    let c1 = check_corollary1_with(pc, ch.input_state.as_ref(), tol);
    let c2 = check_corollary2_with(pc, tol);
    let t2 = check_theorem2_conditions_with(pc, tol)?;

    let hnks = match &ch.kraus {
        Some((k, dots)) => match hnks_check_with(k, dots, tol) {
            Ok(h) => Some(HnksSummary {
                status: match h.status {
                    HnksStatus::InSpan => "in-span",
                    HnksStatus::NotInSpan => "not-in-span",
                    HnksStatus::IllDefined => "ill-defined",
                }
                .into(),
                residual: h.residual,
            }),
            Err(e) => {
                notes.push(format!("error-correction check failed: {e}"));
                None
            }
        },
        None => None,
    };

    let input = match (&ch.input_state, &c1.witness, &c2.witness) {
        (Some(rho), _, _) => Some(("file".to_string(), rho.clone())),
        (None, Some(w), _) => Some(("first-sufficient witness".to_string(), w.input_state.clone())),
        (None, None, Some(w)) => Some(("unital-sufficient witness".to_string(), w.input_state.clone())),
        _ => None,
    };
    let asymptotic = match input {
        Some((label, rho)) => match asymptotic_qfi_with(pc, &rho, tol) {
            Ok(r) => Some(AsymptoticSummary {
                input: label,
                oscillation_period: r.oscillation_period,
                quasi_periodic: r.quasi_periodic,
                n2_by_residue: r.n2_by_residue.clone(),
                n1_by_residue: r.n1_by_residue.clone(),
                achieves_hl: r.achieves_hl,
            }),
            Err(e) => {
                notes.push(format!("asymptotic QFI unavailable: {e}"));
                None
            }
        },
        None => {
            notes.push("no input state given and no witness found; asymptotic QFI skipped".into());
            None
        }
    };

    let control = if t2.status == HlStatus::Achievable {
        let r0 = &t2.r0_candidates[0].r0;
        match synthesize(ch, r0, tol) {
            Ok(sol) => Some(ControlSummary {
                succeeded: sol.succeeded,
                sanity_residual: sol.sanity_residual,
                verified: sol.succeeded && verify_control_with(pc, &sol.u_c, r0, tol),
                u_c: to_json(&sol.u_c),
            }),
            Err(e) => {
                notes.push(format!("control search stopped: {e}"));
                None
            }
        }
    } else {
        None
    };

    Ok(Report {
        dim: pc.dim(),
        theta0: pc.theta0(),
        peripheral,
        warnings: spec.warnings.clone(),
        first_sufficient: (&c1).into(),
        unital_sufficient: (&c2).into(),
        unitary_signal: UnitarySignalSummary {
            unital: t2.unital,
            signal_nonvanishing: t2.signal_nonvanishing,
            signal_normal: t2.signal_normal,
            candidates: t2.r0_candidates.iter().map(|c| cx(c.mu)).collect(),
            status: status_name(t2.status).into(),
            diagnostics: t2.diagnostics.clone(),
        },
        hnks,
        asymptotic,
        control,
        notes,
    })
}

/// Control search, using Kraus operators when the channel carries them.
pub fn synthesize(
    ch: &LoadedChannel,
    r0: &CMatrix,
    tol: &Tolerances,
) -> seqmetro::error::Result<seqmetro::control_synth::ControlSolution> {
    match &ch.kraus {
        Some((k, _)) => synthesize_control_with(k, r0, tol),
        None => synthesize_control_transition(&ch.pc.transition()?, r0, tol),
    }
}

fn fmt_c(z: [f64; 2]) -> String {
    format!("{:+.6}{:+.6}i", z[0], z[1])
}

fn verdict_lines(out: &mut String, title: &str, v: &VerdictSummary) {
    let _ = writeln!(out, "{title}: {}", v.status);
    if let Some(w) = &v.witness {
        let _ = writeln!(
            out,
            "  witness index {} lambda {} lambda_dot {}",
            w.index,
            fmt_c(w.lambda),
            fmt_c(w.lambda_dot)
        );
    }
    for d in &v.diagnostics {
        let _ = writeln!(out, "  {d}");
    }
}

impl Report {
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "dimension {}  theta0 {}", self.dim, self.theta0);
        let _ = writeln!(out, "peripheral spectrum ({} eigenvalues):", self.peripheral.len());
        for (i, p) in self.peripheral.iter().enumerate() {
            let dot = p.lambda_dot.map_or("unresolved".to_string(), fmt_c);
            let fixed = if p.fixed_point { "  fixed point" } else { "" };
            let _ = writeln!(out, "  [{i}] lambda {}  |lambda| {:.9}  lambda_dot {dot}{fixed}", fmt_c(p.lambda), p.modulus);
        }
        for w in &self.warnings {
            let _ = writeln!(out, "warning: {w}");
        }
        verdict_lines(&mut out, "moving peripheral eigenvalue", &self.first_sufficient);
        verdict_lines(&mut out, "unital moving eigenvalue", &self.unital_sufficient);
        let u = &self.unitary_signal;
        let _ = writeln!(
            out,
            "signal operator: {} (unital {}, nonvanishing {}, normal {}, {} candidates)",
            u.status,
            u.unital,
            u.signal_nonvanishing,
            u.signal_normal,
            u.candidates.len()
        );
        for d in &u.diagnostics {
            let _ = writeln!(out, "  {d}");
        }
        if let Some(h) = &self.hnks {
            let res = h.residual.map_or(String::new(), |r| format!(" (residual {r:.3e})"));
            let _ = writeln!(out, "error-correction condition: {}{res}", h.status);
        }
        if let Some(a) = &self.asymptotic {
            let _ = writeln!(out, "asymptotic QFI from {} input:", a.input);
            match (a.oscillation_period, a.quasi_periodic) {
                (Some(p), _) => {
                    let _ = writeln!(out, "  period {p}");
                }
                (None, true) => {
                    let _ = writeln!(out, "  quasi-periodic (sampled)");
                }
                _ => {}
            }
            for (r, n2) in a.n2_by_residue.iter().enumerate() {
                let n1 = a
                    .n1_by_residue
                    .as_ref()
                    .map_or("n/a".to_string(), |v| format!("{:.9}", v[r]));
                let _ = writeln!(out, "  residue {r}: N^2 coefficient {n2:.9}  N coefficient {n1}");
            }
            let _ = writeln!(out, "  Heisenberg scaling: {}", if a.achieves_hl { "yes" } else { "no" });
        }
        if let Some(c) = &self.control {
            let _ = writeln!(
                out,
                "control: succeeded {} verified {} sanity residual {:.3e}",
                c.succeeded, c.verified, c.sanity_residual
            );
        }
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}
