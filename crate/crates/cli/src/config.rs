//! Run configuration: defaults per command, `key=value` files, flag overrides.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Point,
    Fig2,
    Fig3,
    Resonances,
    Selfcheck,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Point => "point",
            Command::Fig2 => "fig2",
            Command::Fig3 => "fig3",
            Command::Resonances => "resonances",
            Command::Selfcheck => "selfcheck",
        }
    }
}

/// Which channel(s) `resonances` reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelSel {
    One,
    Two,
    Both,
}

impl FromStr for ChannelSel {
    type Err = CliError;
    fn from_str(s: &str) -> Result<Self, CliError> {
        match s.trim() {
            "1" => Ok(ChannelSel::One),
            "2" => Ok(ChannelSel::Two),
            "both" => Ok(ChannelSel::Both),
            other => Err(CliError::Config(format!(
                "channel must be 1, 2 or both, got {other:?}"
            ))),
        }
    }
}

impl ChannelSel {
    pub fn channels(self) -> &'static [u32] {
        match self {
            ChannelSel::One => &[1],
            ChannelSel::Two => &[2],
            ChannelSel::Both => &[1, 2],
        }
    }

    fn as_str(self) -> &'static str {
        match self {
            ChannelSel::One => "1",
            ChannelSel::Two => "2",
            ChannelSel::Both => "both",
        }
    }
}

/// All wavenumbers and couplings are in units of `2π/d`.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub u11: f64,
    pub u22: f64,
    pub u12_re: f64,
    pub u12_im: f64,
    /// Barrier separation; it is the length unit, so only `1` is accepted.
    pub d: f64,
    pub k1: f64,
    /// Single `Δk` for `point`.
    pub dk: f64,
    pub dk_min: f64,
    pub dk_max: f64,
    pub dk_steps: usize,
    pub k1_min: f64,
    pub k1_max: f64,
    pub k1_steps: usize,
    pub k_lo: f64,
    pub k_hi: f64,
    pub channel: ChannelSel,
    pub output_path: Option<PathBuf>,
}

pub const KEYS: [&str; 17] = [
    "u11", "u22", "u12_re", "u12_im", "d", "k1", "dk", "dk_min", "dk_max", "dk_steps", "k1_min",
    "k1_max", "k1_steps", "k_lo", "k_hi", "channel", "out",
];

impl RunConfig {
    /// Barrier strength `u0 = 0.01`; `fig3` uses a coarser, shorter `Δk` axis.
    pub fn defaults(cmd: Command) -> Self {
        let (dk_max, dk_steps) = match cmd {
            Command::Fig3 => (1.5, 200),
            _ => (2.0, 2000),
        };
        RunConfig {
            u11: 0.01,
            u22: 0.01,
            u12_re: 0.0,
            u12_im: 0.0,
            d: 1.0,
            k1: 1.0,
            dk: 0.0,
            dk_min: 0.0,
            dk_max,
            dk_steps,
            k1_min: 0.6,
            k1_max: 1.4,
            k1_steps: 200,
            k_lo: 0.1,
            k_hi: 3.0,
            channel: ChannelSel::Two,
            output_path: None,
        }
    }

    /// Sets one field from its textual `key=value` form.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let value = value.trim();
        let float = |v: &str| -> Result<f64, CliError> {
            let x: f64 = v
                .parse()
                .map_err(|_| CliError::Config(format!("{key}: not a number: {v:?}")))?;
            if x.is_finite() {
                Ok(x)
            } else {
                Err(CliError::Config(format!("{key}: must be finite")))
            }
        };
        let count = |v: &str| -> Result<usize, CliError> {
            v.parse()
                .map_err(|_| CliError::Config(format!("{key}: not a count: {v:?}")))
        };
        match key.trim() {
            "u11" => self.u11 = float(value)?,
            "u22" => self.u22 = float(value)?,
            "u12_re" => self.u12_re = float(value)?,
            "u12_im" => self.u12_im = float(value)?,
            "d" => self.d = float(value)?,
            "k1" => self.k1 = float(value)?,
            "dk" => self.dk = float(value)?,
            "dk_min" => self.dk_min = float(value)?,
            "dk_max" => self.dk_max = float(value)?,
            "dk_steps" => self.dk_steps = count(value)?,
            "k1_min" => self.k1_min = float(value)?,
            "k1_max" => self.k1_max = float(value)?,
            "k1_steps" => self.k1_steps = count(value)?,
            "k_lo" => self.k_lo = float(value)?,
            "k_hi" => self.k_hi = float(value)?,
            "channel" => self.channel = value.parse()?,
            "out" => self.output_path = Some(PathBuf::from(value)),
            other => return Err(CliError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Applies `key=value` lines. Blank lines and `#` comments are skipped.
    pub fn apply_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Config(format!("line {}: expected key=value, got {line:?}", n + 1))
            })?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Reads the config echoed in a CSV header back.
    pub fn from_csv_header(cmd: Command, csv: &str) -> Result<Self, CliError> {
        let mut cfg = Self::defaults(cmd);
        for line in csv.lines().take_while(|l| l.starts_with('#')) {
            let body = line.trim_start_matches('#').trim();
            if let Some((key, value)) = body.split_once('=') {
                if KEYS.contains(&key.trim()) {
                    cfg.set(key, value)?;
                }
            }
        }
        Ok(cfg)
    }

    /// `key=value` for every field, fixed order, values formatted to reparse
    /// exactly.
    pub fn echo(&self) -> Vec<String> {
        let mut out = vec![
            format!("u11={}", self.u11),
            format!("u22={}", self.u22),
            format!("u12_re={}", self.u12_re),
            format!("u12_im={}", self.u12_im),
            format!("d={}", self.d),
            format!("k1={}", self.k1),
            format!("dk={}", self.dk),
            format!("dk_min={}", self.dk_min),
            format!("dk_max={}", self.dk_max),
            format!("dk_steps={}", self.dk_steps),
            format!("k1_min={}", self.k1_min),
            format!("k1_max={}", self.k1_max),
            format!("k1_steps={}", self.k1_steps),
            format!("k_lo={}", self.k_lo),
            format!("k_hi={}", self.k_hi),
            format!("channel={}", self.channel.as_str()),
        ];
        if let Some(p) = &self.output_path {
            out.push(format!("out={}", p.display()));
        }
        out
    }

    pub fn validate(&self, cmd: Command) -> Result<(), CliError> {
        let fail = |msg: String| Err(CliError::Config(msg));
        if self.d != 1.0 {
            return fail(format!("d is the length unit and must be 1, got {}", self.d));
        }
        match cmd {
            Command::Point => {
                if !(self.k1 > 0.0) || !(self.k1 + self.dk > 0.0) {
                    return fail(format!(
                        "need k1 > 0 and k2 = k1 + dk > 0 (k1={}, dk={})",
                        self.k1, self.dk
                    ));
                }
            }
            Command::Fig2 => {
                if !(self.k1 > 0.0) || !(self.k1 + self.dk_min > 0.0) {
                    return fail(format!(
                        "need k1 > 0 and k1 + dk_min > 0 (k1={}, dk_min={})",
                        self.k1, self.dk_min
                    ));
                }
                check_range("dk", self.dk_min, self.dk_max, self.dk_steps)?;
            }
            Command::Fig3 => {
                if !(self.k1_min > 0.0) || !(self.k1_min + self.dk_min > 0.0) {
                    return fail(format!(
                        "need k1_min > 0 and k1_min + dk_min > 0 (k1_min={}, dk_min={})",
                        self.k1_min, self.dk_min
                    ));
                }
                check_range("k1", self.k1_min, self.k1_max, self.k1_steps)?;
                check_range("dk", self.dk_min, self.dk_max, self.dk_steps)?;
            }
            Command::Resonances => {
                if !(self.k_lo > 0.0 && self.k_hi > self.k_lo) {
                    return fail(format!(
                        "need 0 < k_lo < k_hi (k_lo={}, k_hi={})",
                        self.k_lo, self.k_hi
                    ));
                }
            }
            Command::Selfcheck => {}
        }
        Ok(())
    }

    /// `#`-prefixed CSV header: tool version, command, units and the config.
    pub fn csv_header(&self, cmd: Command) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# wirent {} {}", env!("CARGO_PKG_VERSION"), cmd.name());
        let _ = writeln!(s, "# units: wavenumbers and couplings in 2*pi/d");
        for line in self.echo() {
            let _ = writeln!(s, "# {line}");
        }
        s
    }
}

fn check_range(name: &str, lo: f64, hi: f64, steps: usize) -> Result<(), CliError> {
    if steps < 2 {
        return Err(CliError::Config(format!("{name}_steps must be >= 2, got {steps}")));
    }
    if !(hi > lo) {
        return Err(CliError::Config(format!(
            "{name}_max must exceed {name}_min ({lo} .. {hi})"
        )));
    }
    Ok(())
}

/// `i`-th of `steps` uniformly spaced points on `[lo, hi]`, endpoints exact.
pub fn grid_point(lo: f64, hi: f64, steps: usize, i: usize) -> f64 {
    if i + 1 == steps {
        hi
    } else {
        lo + (hi - lo) * i as f64 / (steps - 1) as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn file_then_override() {
        let mut cfg = RunConfig::defaults(Command::Fig2);
        cfg.apply_text("# archived sweep\nu11 = 0.02\n\nk1=0.8\ndk_steps=50\n")
            .unwrap();
        cfg.set("k1", "0.9").unwrap();
        assert_eq!(cfg.u11, 0.02);
        assert_eq!(cfg.k1, 0.9);
        assert_eq!(cfg.dk_steps, 50);
    }

    #[test]
    fn bad_lines_rejected() {
        let mut cfg = RunConfig::defaults(Command::Point);
        assert!(cfg.apply_text("u11 0.3").is_err());
        assert!(cfg.apply_text("speed=3").is_err());
        assert!(cfg.apply_text("k1=abc").is_err());
        assert!(cfg.apply_text("k1=inf").is_err());
        assert!(cfg.apply_text("channel=3").is_err());
    }

    #[test]
    fn validation() {
        let mut cfg = RunConfig::defaults(Command::Fig2);
        assert!(cfg.validate(Command::Fig2).is_ok());
        cfg.dk_min = -1.5;
        assert!(cfg.validate(Command::Fig2).is_err());
        cfg.dk_min = -0.5;
        assert!(cfg.validate(Command::Fig2).is_ok());
        cfg.dk_steps = 1;
        assert!(cfg.validate(Command::Fig2).is_err());
        let mut cfg = RunConfig::defaults(Command::Point);
        cfg.d = 2.0;
        assert!(cfg.validate(Command::Point).is_err());
    }

    #[test]
    fn header_roundtrip() {
        let mut cfg = RunConfig::defaults(Command::Fig3);
        cfg.u12_re = 0.1 + 0.2;
        cfg.k1_max = 1.0 / 3.0;
        cfg.k1_min = 0.1;
        cfg.channel = ChannelSel::Both;
        cfg.output_path = Some("out dir/grid.csv".into());
        let text = format!("{}k1,dk,eta\n1,2,3\n", cfg.csv_header(Command::Fig3));
        assert_eq!(RunConfig::from_csv_header(Command::Fig3, &text).unwrap(), cfg);
    }

    #[test]
    fn grid_endpoints_exact() {
        assert_eq!(grid_point(0.6, 1.4, 200, 0), 0.6);
        assert_eq!(grid_point(0.6, 1.4, 200, 199), 1.4);
    }
}
