use std::fmt;
use std::str::FromStr;

/// Pinned parameter sets for the standard plots.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Preset {
    /// JD outage vs total SNR: Monte-Carlo, asymptote, lower bound.
    Fig2a,
    /// JD and SCo throughput vs total SNR, refined and approximate inverse.
    Fig2b,
    /// MCo-over-SCo gain vs rate for two outage targets.
    Fig3a,
    /// JD-over-SC and JD-over-MRC gains vs rate.
    Fig3b,
    /// Empirical outage CDFs on the synthetic trace.
    Fig5c,
    /// Empirical throughput CDFs on the synthetic trace.
    Fig5d,
    /// Analytic and asymptote-derived diversity-multiplexing tradeoff.
    Dmt,
}

impl Preset {
    pub const ALL: [Preset; 7] = [
        Preset::Fig2a,
        Preset::Fig2b,
        Preset::Fig3a,
        Preset::Fig3b,
        Preset::Fig5c,
        Preset::Fig5d,
        Preset::Dmt,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Preset::Fig2a => "fig2a",
            Preset::Fig2b => "fig2b",
            Preset::Fig3a => "fig3a",
            Preset::Fig3b => "fig3b",
            Preset::Fig5c => "fig5c",
            Preset::Fig5d => "fig5d",
            Preset::Dmt => "dmt",
        }
    }

    /// The subcommand a preset belongs to.
    pub fn subcommand(self) -> &'static str {
        match self {
            Preset::Fig2a => "outage",
            Preset::Fig2b => "throughput",
            Preset::Fig3a | Preset::Fig3b => "gain",
            Preset::Fig5c | Preset::Fig5d => "cdf",
            Preset::Dmt => "dmt",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Preset {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| {
                let names: Vec<_> = Preset::ALL.iter().map(|p| p.as_str()).collect();
                format!("unknown preset {s:?} (expected one of {})", names.join(", "))
            })
    }
}
