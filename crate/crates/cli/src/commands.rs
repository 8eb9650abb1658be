//! The `point`, `fig2`, `fig3` and `resonances` subcommands. Each returns
//! its complete output as a string; writing it out is the caller's job.

use std::fmt::Write as _;

use rayon::prelude::*;
use wirent_core::resonance::DEFAULT_TOL;
use wirent_core::{resonance_table, DeltaChain, EntanglementReport, C64};

use crate::config::{grid_point, Command, RunConfig};
use crate::CliError;

/// 15 significant digits.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.14e}")
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".to_string(), fmt_num)
}

pub fn chain_of(cfg: &RunConfig) -> Result<DeltaChain, CliError> {
    Ok(DeltaChain::new(
        cfg.u11,
        cfg.u22,
        C64::new(cfg.u12_re, cfg.u12_im),
    )?)
}

/// Full analysis at `(k1, k2)` in `2π/d` units.
pub fn analyze(chain: &DeltaChain, k1: f64, k2: f64) -> Result<EntanglementReport, CliError> {
    Ok(EntanglementReport::analyze(&chain.smatrix(k1, k2)?)?)
}

pub struct PointOutput {
    pub text: String,
    pub csv: String,
    pub report: EntanglementReport,
}

pub fn cmd_point(cfg: &RunConfig) -> Result<PointOutput, CliError> {
    cfg.validate(Command::Point)?;
    let chain = chain_of(cfg)?;
    let (k1, k2) = (cfg.k1, cfg.k1 + cfg.dk);
    let s = chain.smatrix(k1, k2)?;
    let rep = EntanglementReport::analyze(&s)?;

    let opt12 = |x: Option<f64>| x.map_or_else(|| "undefined".to_string(), |v| format!("{v:.12}"));
    let mut text = String::new();
    let _ = writeln!(text, "# units: wavenumbers and couplings in 2*pi/d");
    let _ = writeln!(text, "k1={k1}");
    let _ = writeln!(text, "k2={k2}");
    let _ = writeln!(text, "eta={}", opt12(rep.eta()));
    let _ = writeln!(
        text,
        "eta_closed={}",
        match (rep.mixing, rep.eta_closed) {
            (true, _) => "n/a".to_string(),
            (false, v) => opt12(v),
        }
    );
    let _ = writeln!(text, "eta_det={}", opt12(rep.eta_det));
    let _ = writeln!(text, "eta_w={}", opt12(rep.eta_w));
    let _ = writeln!(text, "p_select={}", fmt_num(rep.p_select));
    let _ = writeln!(text, "p_both_reflected={}", fmt_num(rep.p_both_reflected));
    let _ = writeln!(text, "p_both_transmitted={}", fmt_num(rep.p_both_transmitted));
    let _ = writeln!(
        text,
        "t11_sq={}\nt22_sq={}",
        fmt_num(s.t[(0, 0)].norm_sqr()),
        fmt_num(s.t[(1, 1)].norm_sqr())
    );
    match &rep.rho1 {
        Some(rho) => {
            let ev: Vec<String> = rho.eigenvalues.iter().map(|&e| fmt_num(e)).collect();
            let _ = writeln!(text, "rho1_eigenvalues={}", ev.join(","));
            let _ = writeln!(text, "purity={}", fmt_num(rho.purity));
        }
        None => {
            let _ = writeln!(text, "rho1_eigenvalues=undefined");
            let _ = writeln!(text, "purity=undefined");
        }
    }
    let _ = writeln!(text, "full_state_eta={}", fmt_num(rep.full_state_eta));
    let _ = writeln!(text, "unitarity_defect={}", fmt_num(rep.unitarity_defect));
    let _ = writeln!(
        text,
        "mixing={}",
        if rep.mixing {
            "reconstructed-extension"
        } else {
            "none"
        }
    );

    let mut csv = cfg.csv_header(Command::Point);
    csv.push_str("k1,k2,eta,eta_closed,eta_w,p_select,purity,full_state_eta,unitarity_defect\n");
    let _ = writeln!(
        csv,
        "{},{},{},{},{},{},{},{},{}",
        fmt_num(k1),
        fmt_num(k2),
        fmt_opt(rep.eta_det),
        fmt_opt(rep.eta_closed),
        fmt_opt(rep.eta_w),
        fmt_num(rep.p_select),
        fmt_opt(rep.purity),
        fmt_num(rep.full_state_eta),
        fmt_num(rep.unitarity_defect),
    );
    Ok(PointOutput {
        text,
        csv,
        report: rep,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Fig2Row {
    pub dk: f64,
    pub eta: Option<f64>,
    pub t11_sq: f64,
    pub t22_sq: f64,
}

fn sweep_dk(chain: &DeltaChain, k1: f64, cfg: &RunConfig) -> Result<Vec<Fig2Row>, CliError> {
    (0..cfg.dk_steps)
        .map(|j| {
            let dk = grid_point(cfg.dk_min, cfg.dk_max, cfg.dk_steps, j);
            let s = chain.smatrix(k1, k1 + dk)?;
            let rep = EntanglementReport::analyze(&s)?;
            Ok(Fig2Row {
                dk,
                eta: rep.eta(),
                t11_sq: s.t[(0, 0)].norm_sqr(),
                t22_sq: s.t[(1, 1)].norm_sqr(),
            })
        })
        .collect()
}

pub fn fig2_rows(cfg: &RunConfig) -> Result<Vec<Fig2Row>, CliError> {
    cfg.validate(Command::Fig2)?;
    sweep_dk(&chain_of(cfg)?, cfg.k1, cfg)
}

pub fn cmd_fig2(cfg: &RunConfig) -> Result<String, CliError> {
    let rows = fig2_rows(cfg)?;
    let mut out = cfg.csv_header(Command::Fig2);
    out.push_str("dk,eta,t11_sq,t22_sq\n");
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            fmt_num(r.dk),
            fmt_opt(r.eta),
            fmt_num(r.t11_sq),
            fmt_num(r.t22_sq)
        );
    }
    Ok(out)
}

/// `(k1, dk, eta)`, row-major in `k1`. Rows are computed in parallel and
/// reassembled in grid order.
pub fn fig3_rows(cfg: &RunConfig) -> Result<Vec<(f64, f64, Option<f64>)>, CliError> {
    cfg.validate(Command::Fig3)?;
    let chain = chain_of(cfg)?;
    let rows: Vec<Vec<(f64, f64, Option<f64>)>> = (0..cfg.k1_steps)
        .into_par_iter()
        .map(|i| {
            let k1 = grid_point(cfg.k1_min, cfg.k1_max, cfg.k1_steps, i);
            Ok(sweep_dk(&chain, k1, cfg)?
                .into_iter()
                .map(|r| (k1, r.dk, r.eta))
                .collect())
        })
        .collect::<Result<_, CliError>>()?;
    Ok(rows.into_iter().flatten().collect())
}

pub fn cmd_fig3(cfg: &RunConfig) -> Result<String, CliError> {
    let rows = fig3_rows(cfg)?;
    let mut out = cfg.csv_header(Command::Fig3);
    out.push_str("k1,dk,eta\n");
    for (k1, dk, eta) in rows {
        let _ = writeln!(out, "{},{},{}", fmt_num(k1), fmt_num(dk), fmt_opt(eta));
    }
    Ok(out)
}

pub fn cmd_resonances(cfg: &RunConfig) -> Result<String, CliError> {
    cfg.validate(Command::Resonances)?;
    let chain = chain_of(cfg)?;
    let mut out = cfg.csv_header(Command::Resonances);
    out.push_str("channel,k_res,peak,width\n");
    for &ch in cfg.channel.channels() {
        let table = resonance_table(&chain, ch, cfg.k_lo, cfg.k_hi, DEFAULT_TOL)?;
        for e in &table.entries {
            let _ = writeln!(
                out,
                "{ch},{},{},{}",
                fmt_num(e.k_res),
                fmt_num(e.transmission_at_peak),
                fmt_num(e.refinement_width)
            );
        }
    }
    Ok(out)
}

/// Numeric rows of a CSV produced here (header and column-name lines skipped).
pub fn parse_rows(csv: &str) -> Vec<Vec<f64>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|x| x.parse().unwrap_or(f64::NAN)).collect())
        .collect()
}
