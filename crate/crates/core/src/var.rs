use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// Random variables appearing in the relay model.
///
/// `X` is the sender input, `S` the relay input, `Y` the receiver output,
/// `Z` the relay output. `U` and `V` are auxiliary variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Var {
    U,
    V,
    S,
    X,
    Y,
    Z,
}

impl Var {
    pub const ALL: [Var; 6] = [Var::U, Var::V, Var::S, Var::X, Var::Y, Var::Z];

    pub fn symbol(self) -> char {
        match self {
            Var::U => 'U',
            Var::V => 'V',
            Var::S => 'S',
            Var::X => 'X',
            Var::Y => 'Y',
            Var::Z => 'Z',
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.symbol())
    }
}

impl TryFrom<char> for Var {
    type Error = Error;

    fn try_from(c: char) -> Result<Self, Error> {
        match c.to_ascii_uppercase() {
            'U' => Ok(Var::U),
            'V' => Ok(Var::V),
            'S' => Ok(Var::S),
            'X' => Ok(Var::X),
            'Y' => Ok(Var::Y),
            'Z' => Ok(Var::Z),
            other => Err(Error::MissingVariable(other.to_string())),
        }
    }
}

/// Parses a compact variable list such as `"XS"` or `"U,S"`.
pub fn parse_vars(s: &str) -> Result<Vec<Var>, Error> {
    s.chars()
        .filter(|c| !c.is_whitespace() && *c != ',')
        .map(Var::try_from)
        .collect()
}

/// A parsed `A;B|C` information query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MiQuery {
    pub a: Vec<Var>,
    pub b: Vec<Var>,
    pub c: Vec<Var>,
}

impl FromStr for MiQuery {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim().trim_start_matches("I(").trim_end_matches(')');
        let (ab, c) = match s.split_once('|') {
            Some((ab, c)) => (ab, c),
            None => (s, ""),
        };
        let (a, b) = ab
            .split_once(';')
            .ok_or_else(|| Error::InvalidConfig(format!("query '{s}' lacks ';'")))?;
        Ok(MiQuery {
            a: parse_vars(a)?,
            b: parse_vars(b)?,
            c: parse_vars(c)?,
        })
    }
}

pub(crate) fn fmt_vars(vars: &[Var]) -> String {
    vars.iter().map(|v| v.symbol()).collect()
}
