use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

/// A yaw or steering angle variable. Unit and wheel indices are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AngleVar {
    Yaw { unit: usize },
    Steer { unit: usize, wheel: usize },
}

impl AngleVar {
    pub fn yaw(unit: usize) -> Self {
        AngleVar::Yaw { unit }
    }

    pub fn steer(unit: usize, wheel: usize) -> Self {
        AngleVar::Steer { unit, wheel }
    }

    pub fn unit(&self) -> usize {
        match *self {
            AngleVar::Yaw { unit } | AngleVar::Steer { unit, .. } => unit,
        }
    }

    fn sort_key(&self) -> (usize, u8, usize) {
        match *self {
            AngleVar::Yaw { unit } => (unit, 0, 0),
            AngleVar::Steer { unit, wheel } => (unit, 1, wheel),
        }
    }

    /// Identifier used in serialized output: `psi_2`, `theta_1_2`.
    pub fn name(&self) -> String {
        match *self {
            AngleVar::Yaw { unit } => format!("psi_{unit}"),
            AngleVar::Steer { unit, wheel } => format!("theta_{unit}_{wheel}"),
        }
    }

    pub fn latex(&self) -> String {
        match *self {
            AngleVar::Yaw { unit } => format!("\\psi_{{{unit}}}"),
            AngleVar::Steer { unit, wheel } => format!("\\theta_{{{unit},{wheel}}}"),
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        if let Some(rest) = name.strip_prefix("psi_") {
            return rest.parse().ok().filter(|&u| u >= 1).map(AngleVar::yaw);
        }
        let rest = name.strip_prefix("theta_")?;
        let (u, w) = rest.split_once('_')?;
        let (unit, wheel) = (u.parse().ok()?, w.parse().ok()?);
        (unit >= 1 && wheel >= 1).then_some(AngleVar::steer(unit, wheel))
    }
}

impl Ord for AngleVar {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for AngleVar {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for AngleVar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Integer-weighted sum of angle variables plus a multiple of a quarter turn.
///
/// The representation is canonical: zero coefficients are never stored, terms
/// are ordered by (unit, yaw before steer, wheel) and `quarter_turns` is kept
/// modulo 4, so equal sums compare structurally equal.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngleSum {
    terms: BTreeMap<AngleVar, i64>,
    quarter_turns: u8,
}

impl AngleSum {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn var(v: AngleVar) -> Self {
        Self::from_terms([(v, 1)], 0)
    }

    pub fn quarter_turns(q: i64) -> Self {
        Self::from_terms([], q)
    }

    pub fn from_terms(terms: impl IntoIterator<Item = (AngleVar, i64)>, quarter_turns: i64) -> Self {
        let mut map = BTreeMap::new();
        for (v, c) in terms {
            *map.entry(v).or_insert(0) += c;
        }
        map.retain(|_, c| *c != 0);
        AngleSum {
            terms: map,
            quarter_turns: quarter_turns.rem_euclid(4) as u8,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (AngleVar, i64)> + '_ {
        self.terms.iter().map(|(v, c)| (*v, *c))
    }

    pub fn coefficient(&self, v: AngleVar) -> i64 {
        self.terms.get(&v).copied().unwrap_or(0)
    }

    pub fn quarter(&self) -> u8 {
        self.quarter_turns
    }

    pub fn has_variables(&self) -> bool {
        !self.terms.is_empty()
    }

    /// Coefficient of the first variable in canonical order.
    pub fn leading_coefficient(&self) -> Option<i64> {
        self.terms.values().next().copied()
    }

    /// The same variables with the quarter-turn offset dropped.
    pub fn without_offset(&self) -> Self {
        AngleSum {
            terms: self.terms.clone(),
            quarter_turns: 0,
        }
    }

    pub fn with_offset(&self, quarter_turns: i64) -> Self {
        AngleSum {
            terms: self.terms.clone(),
            quarter_turns: (self.quarter_turns as i64 + quarter_turns).rem_euclid(4) as u8,
        }
    }

    pub fn variables(&self) -> impl Iterator<Item = AngleVar> + '_ {
        self.terms.keys().copied()
    }

    pub fn eval(&self, mut lookup: impl FnMut(AngleVar) -> Option<f64>) -> Result<f64, AngleVar> {
        let mut acc = self.quarter_turns as f64 * std::f64::consts::FRAC_PI_2;
        for (v, c) in &self.terms {
            acc += *c as f64 * lookup(*v).ok_or(*v)?;
        }
        Ok(acc)
    }

    pub fn latex(&self) -> String {
        let mut out = String::new();
        for (v, c) in &self.terms {
            let mag = c.unsigned_abs();
            if out.is_empty() {
                if *c < 0 {
                    out.push('-');
                }
            } else {
                out.push_str(if *c < 0 { " - " } else { " + " });
            }
            if mag != 1 {
                out.push_str(&mag.to_string());
            }
            out.push_str(&v.latex());
        }
        if self.quarter_turns != 0 {
            let q = match self.quarter_turns {
                1 => "\\frac{\\pi}{2}",
                2 => "\\pi",
                _ => "\\frac{3\\pi}{2}",
            };
            if !out.is_empty() {
                out.push_str(" + ");
            }
            out.push_str(q);
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

impl Add for &AngleSum {
    type Output = AngleSum;
    fn add(self, rhs: &AngleSum) -> AngleSum {
        AngleSum::from_terms(
            self.terms().chain(rhs.terms()),
            self.quarter_turns as i64 + rhs.quarter_turns as i64,
        )
    }
}

impl Add for AngleSum {
    type Output = AngleSum;
    fn add(self, rhs: AngleSum) -> AngleSum {
        &self + &rhs
    }
}

impl Neg for &AngleSum {
    type Output = AngleSum;
    fn neg(self) -> AngleSum {
        AngleSum::from_terms(self.terms().map(|(v, c)| (v, -c)), -(self.quarter_turns as i64))
    }
}

impl Neg for AngleSum {
    type Output = AngleSum;
    fn neg(self) -> AngleSum {
        -&self
    }
}

impl Sub for &AngleSum {
    type Output = AngleSum;
    fn sub(self, rhs: &AngleSum) -> AngleSum {
        self + &(-rhs)
    }
}

impl Sub for AngleSum {
    type Output = AngleSum;
    fn sub(self, rhs: AngleSum) -> AngleSum {
        &self - &rhs
    }
}

impl From<AngleVar> for AngleSum {
    fn from(v: AngleVar) -> Self {
        AngleSum::var(v)
    }
}

impl fmt::Display for AngleSum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (v, c) in &self.terms {
            let sign = if *c < 0 { "-" } else if first { "" } else { "+" };
            let mag = c.unsigned_abs();
            if mag == 1 {
                write!(f, "{sign}{v}")?;
            } else {
                write!(f, "{sign}{mag}*{v}")?;
            }
            first = false;
        }
        if self.quarter_turns != 0 || first {
            let sign = if first { "" } else { "+" };
            write!(f, "{sign}{}*pi/2", self.quarter_turns)?;
        }
        Ok(())
    }
}
