//! State specifications: `vacuum | number:<n> | squeezed:<λ> | mix:<w1>*<spec1>,<w2>*<spec2>`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::fock::{number_state, squeezed_vacuum, FockVector, MixedState};

#[derive(Debug, Clone, PartialEq)]
pub enum StateSpec {
    Vacuum,
    Number(usize),
    Squeezed(f64),
    Mix(Vec<(f64, StateSpec)>),
}

impl StateSpec {
    pub fn pure_state(&self, cutoff: usize) -> Result<FockVector> {
        match self {
            StateSpec::Vacuum => Ok(FockVector::vacuum(cutoff)),
            StateSpec::Number(n) => number_state(*n, cutoff),
            StateSpec::Squeezed(l) => squeezed_vacuum(*l, cutoff),
            StateSpec::Mix(_) => Err(Error::input(format!("`{self}` is not a pure state"))),
        }
    }

    pub fn state(&self, cutoff: usize) -> Result<MixedState> {
        let mut comps = Vec::new();
        self.flatten(1.0, cutoff, &mut comps)?;
        MixedState::new(comps)
    }

    fn flatten(&self, w: f64, cutoff: usize, out: &mut Vec<(f64, FockVector)>) -> Result<()> {
        match self {
            StateSpec::Mix(parts) => {
                for (pw, s) in parts {
                    s.flatten(w * pw, cutoff, out)?;
                }
                Ok(())
            }
            pure => {
                out.push((w, pure.pure_state(cutoff)?));
                Ok(())
            }
        }
    }
}

impl fmt::Display for StateSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StateSpec::Vacuum => write!(f, "vacuum"),
            StateSpec::Number(n) => write!(f, "number:{n}"),
            StateSpec::Squeezed(l) => write!(f, "squeezed:{l}"),
            StateSpec::Mix(parts) => {
                write!(f, "mix:")?;
                for (i, (w, s)) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{w}*{s}")?;
                }
                Ok(())
            }
        }
    }
}

impl FromStr for StateSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::input(format!("invalid state spec `{s}`: {why}"));
        if s == "vacuum" {
            return Ok(StateSpec::Vacuum);
        }
        let (head, rest) = s
            .split_once(':')
            .ok_or_else(|| bad("expected vacuum, number:<n>, squeezed:<l> or mix:..."))?;
        match head {
            "number" => rest
                .parse()
                .map(StateSpec::Number)
                .map_err(|_| bad("photon number must be a non-negative integer")),
            "squeezed" => {
                let l: f64 = rest
                    .parse()
                    .map_err(|_| bad("squeezing must be a number"))?;
                if !(l > 0.0) || !l.is_finite() {
                    return Err(bad("squeezing must be > 0"));
                }
                Ok(StateSpec::Squeezed(l))
            }
            "mix" => {
                let mut parts = Vec::new();
                for item in rest.split(',') {
                    let (w, spec) = item
                        .split_once('*')
                        .ok_or_else(|| bad("mixture items look like <w>*<spec>"))?;
                    let w: f64 = w
                        .trim()
                        .parse()
                        .map_err(|_| bad("weight must be a number"))?;
                    if !(w > 0.0 && w <= 1.0) {
                        return Err(bad("weights must lie in (0, 1]"));
                    }
                    let spec: StateSpec = spec.parse()?;
                    if matches!(spec, StateSpec::Mix(_)) {
                        return Err(bad("mixtures cannot be nested"));
                    }
                    parts.push((w, spec));
                }
                let total: f64 = parts.iter().map(|p| p.0).sum();
                if (total - 1.0).abs() > 1e-12 {
                    return Err(bad("weights must sum to 1"));
                }
                Ok(StateSpec::Mix(parts))
            }
            _ => Err(bad("unknown state kind")),
        }
    }
}

impl Serialize for StateSpec {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for StateSpec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar() {
        assert_eq!("vacuum".parse::<StateSpec>().unwrap(), StateSpec::Vacuum);
        assert_eq!(
            "number:2".parse::<StateSpec>().unwrap(),
            StateSpec::Number(2)
        );
        assert_eq!(
            "squeezed:0.5".parse::<StateSpec>().unwrap(),
            StateSpec::Squeezed(0.5)
        );
        let m: StateSpec = "mix:0.5*vacuum,0.5*number:1".parse().unwrap();
        assert_eq!(
            m,
            StateSpec::Mix(vec![(0.5, StateSpec::Vacuum), (0.5, StateSpec::Number(1))])
        );
        assert_eq!(m.to_string().parse::<StateSpec>().unwrap(), m);
    }

    #[test]
    fn rejects_bad_specs() {
        for s in [
            "",
            "coherent:1",
            "number:-1",
            "number:x",
            "squeezed:0",
            "squeezed:-2",
            "mix:0.5*vacuum",
            "mix:vacuum",
            "mix:1*mix:1*vacuum",
        ] {
            assert!(s.parse::<StateSpec>().is_err(), "{s}");
        }
    }

    #[test]
    fn builds_states() {
        let m: StateSpec = "mix:0.25*vacuum,0.75*squeezed:2".parse().unwrap();
        let st = m.state(40).unwrap();
        assert_eq!(st.components().len(), 2);
        assert!(StateSpec::Number(3).state(40).unwrap().is_pure());
        assert!(m.pure_state(40).is_err());
        assert!(StateSpec::Number(50).state(40).is_err());
    }
}
