use std::fmt;
use std::str::FromStr;

use crate::error::Error;

/// Receiver-side combining algorithm.
///
/// `Sco` is the single-connectivity baseline and always reads link 1 only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Combiner {
    /// Joint decoding: capacity is the sum of per-link capacities.
    Jd,
    /// Selection combining: the strongest link is kept.
    Sc,
    /// Maximal-ratio combining: per-link SNRs add coherently.
    Mrc,
    /// Single connectivity over link 1.
    Sco,
}

impl Combiner {
    pub const ALL: [Combiner; 4] = [Combiner::Jd, Combiner::Sc, Combiner::Mrc, Combiner::Sco];

    pub fn as_str(self) -> &'static str {
        match self {
            Combiner::Jd => "jd",
            Combiner::Sc => "sc",
            Combiner::Mrc => "mrc",
            Combiner::Sco => "sco",
        }
    }
}

impl fmt::Display for Combiner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Combiner {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "jd" => Ok(Combiner::Jd),
            "sc" => Ok(Combiner::Sc),
            "mrc" => Ok(Combiner::Mrc),
            "sco" => Ok(Combiner::Sco),
            other => Err(Error::domain(format!(
                "unknown combiner {other:?} (expected jd, sc, mrc or sco)"
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        for c in Combiner::ALL {
            assert_eq!(c.as_str().parse::<Combiner>().unwrap(), c);
        }
        assert_eq!("MRC".parse::<Combiner>().unwrap(), Combiner::Mrc);
        assert!("egc".parse::<Combiner>().is_err());
    }
}
