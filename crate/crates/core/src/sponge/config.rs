use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::schedule::Schedule;
use super::SpongeError;

/// An integer that may exceed 64 bits: plain TOML integers or decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum Num {
    Int(i64),
    Text(String),
}

impl Num {
    fn big(&self) -> Result<BigInt, SpongeError> {
        match self {
            Num::Int(v) => Ok(BigInt::from(*v)),
            Num::Text(s) => s
                .trim()
                .parse()
                .map_err(|_| SpongeError::Parse(format!("not an integer: {s:?}"))),
        }
    }

    fn from_big(v: &BigInt) -> Self {
        match i64::try_from(v) {
            Ok(x) => Num::Int(x),
            Err(_) => Num::Text(v.to_string()),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleFile {
    /// `"a/b"` or an integer.
    p_target: Num,
    p_num: Vec<Num>,
    p_den: Vec<Num>,
    s: Vec<Num>,
}

fn parse_ratio(n: &Num) -> Result<BigRational, SpongeError> {
    match n {
        Num::Text(t) if t.contains('/') => {
            let (a, b) = t.split_once('/').expect("contains /");
            let a: BigInt = a.trim().parse().map_err(|_| SpongeError::Parse(format!("bad ratio {t:?}")))?;
            let b: BigInt = b.trim().parse().map_err(|_| SpongeError::Parse(format!("bad ratio {t:?}")))?;
            if b == BigInt::from(0) {
                return Err(SpongeError::Parse(format!("zero denominator in {t:?}")));
            }
            Ok(BigRational::new(a, b))
        }
        other => Ok(BigRational::from_integer(other.big()?)),
    }
}

impl Schedule {
    /// Reads the `p_target` / `p_num` / `p_den` / `s` configuration format.
    pub fn from_toml(text: &str) -> Result<Self, SpongeError> {
        let f: ScheduleFile = toml::from_str(text).map_err(|e| SpongeError::Parse(e.to_string()))?;
        if f.p_num.len() != f.p_den.len() {
            return Err(SpongeError::Parse("p_num and p_den differ in length".into()));
        }
        let mut p = Vec::with_capacity(f.p_num.len());
        for (a, b) in f.p_num.iter().zip(&f.p_den) {
            let b = b.big()?;
            if b == BigInt::from(0) {
                return Err(SpongeError::Parse("zero denominator".into()));
            }
            p.push(BigRational::new(a.big()?, b));
        }
        let s = f
            .s
            .iter()
            .map(|v| {
                let b = v.big()?;
                BigUint::try_from(b).map_err(|_| SpongeError::Parse("negative s value".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(parse_ratio(&f.p_target)?, p, s)
    }

    /// Canonical configuration text; [`Schedule::from_toml`] inverts it.
    pub fn to_toml(&self) -> String {
        let t = self.p_target();
        let f = ScheduleFile {
            p_target: Num::Text(format!("{}/{}", t.numer(), t.denom())),
            p_num: self.p_values().iter().map(|p| Num::from_big(p.numer())).collect(),
            p_den: self.p_values().iter().map(|p| Num::from_big(p.denom())).collect(),
            s: self.s_values().iter().map(|s| Num::from_big(&BigInt::from(s.clone()))).collect(),
        };
        toml::to_string(&f).expect("serializable")
    }

    /// SHA-256 of the canonical configuration text, in hex.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(self.to_toml().as_bytes()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_round_trips() {
        let text = "p_target = \"1/2\"\np_num = [1, 1]\np_den = [1, 2]\ns = [1, 1]\n";
        let s = Schedule::from_toml(text).unwrap();
        assert_eq!(s, Schedule::toy(&[(1, 1), (1, 2)], &[1, 1]).unwrap());
        assert_eq!(Schedule::from_toml(&s.to_toml()).unwrap(), s);
        let strict = Schedule::strict_example();
        let back = Schedule::from_toml(&strict.to_toml()).unwrap();
        assert_eq!(back, strict);
        assert_eq!(back.digest(), strict.digest());
        assert!(strict.to_toml().contains("\"113336795588871485128704\""));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(Schedule::from_toml("p_target = 1\np_num=[1]\np_den=[0]\ns=[1]").is_err());
        assert!(Schedule::from_toml("p_target = 1\np_num=[1]\np_den=[1]\ns=[-1]").is_err());
        assert!(Schedule::from_toml("p_target = 1\np_num=[1]\np_den=[1]\ns=[1]\nextra=2").is_err());
        assert!(Schedule::from_toml("p_target = 1\np_num=[1,1]\np_den=[1]\ns=[1]").is_err());
    }
}
