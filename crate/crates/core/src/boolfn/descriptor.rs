//! Textual descriptors, e.g. `klinear n=10 I=1,4,7`.
//!
//! | kind        | keys                                   |
//! |-------------|----------------------------------------|
//! | `klinear`   | `n`, `I` (comma list, may be empty)    |
//! | `parity`    | `n`                                    |
//! | `dictator`  | `n`, `i`                               |
//! | `const`     | `n`, `value` (0 or 1)                  |
//! | `majority`  | `n`                                    |
//! | `symmetric` | `n`, `table` (n + 1 bits by weight)    |
//! | `junta`     | `n`, `J`, `table` (2^k bits)           |
//! | `psym`      | `n`, `A`, `table` (2^k (n-k+1) bits)   |
//! | `poly`      | `n`, `M` (e.g. `x0*x1+x2+1`, empty = 0)|
//! | `random`    | `n`, `seed`                            |
//! | `table`     | `n`, `bits` (2^n bits, index order)    |
//!
//! Coordinates are 0-based. `Display` writes the canonical descriptor of any
//! function, which parses back to an equal function.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use super::{BitVector, BooleanFunction, Repr};
use crate::error::{Error, Result};

fn parse_list(s: &str) -> Result<Vec<usize>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad index {t:?}")))
        })
        .collect()
}

fn parse_monomials(s: &str) -> Result<Vec<Vec<usize>>> {
    if s.is_empty() || s == "0" {
        return Ok(Vec::new());
    }
    s.split('+')
        .map(|term| {
            let term = term.trim();
            if term == "1" {
                return Ok(Vec::new());
            }
            term.split('*')
                .map(|v| {
                    v.trim()
                        .strip_prefix('x')
                        .and_then(|i| i.parse::<usize>().ok())
                        .ok_or_else(|| Error::Parse(format!("bad monomial variable {v:?}")))
                })
                .collect()
        })
        .collect()
}

fn join(v: &[usize]) -> String {
    v.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(",")
}

struct Fields<'a> {
    kind: &'a str,
    map: BTreeMap<&'a str, &'a str>,
}

impl<'a> Fields<'a> {
    fn parse(s: &'a str) -> Result<Self> {
        let mut tokens = s.split_whitespace();
        let kind = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty descriptor".into()))?;
        let mut map = BTreeMap::new();
        for tok in tokens {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, found {tok:?}")))?;
            if map.insert(k, v).is_some() {
                return Err(Error::Parse(format!("duplicate key {k:?}")));
            }
        }
        Ok(Self { kind, map })
    }

    fn take(&mut self, key: &str) -> Result<&'a str> {
        self.map
            .remove(key)
            .ok_or_else(|| Error::Parse(format!("{}: missing key {key:?}", self.kind)))
    }

    fn take_usize(&mut self, key: &str) -> Result<usize> {
        let v = self.take(key)?;
        v.parse()
            .map_err(|_| Error::Parse(format!("{key}: expected an integer, found {v:?}")))
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::Parse(format!("{}: unexpected key {k:?}", self.kind))),
            None => Ok(()),
        }
    }
}

impl FromStr for BooleanFunction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut fields = Fields::parse(s)?;
        let n = fields.take_usize("n")?;
        let f = match fields.kind {
            "klinear" | "linear" => BooleanFunction::k_linear(n, &parse_list(fields.take("I")?)?)?,
            "parity" => BooleanFunction::parity(n),
            "dictator" => BooleanFunction::dictator(n, fields.take_usize("i")?)?,
            "const" => match fields.take("value")? {
                "0" => BooleanFunction::constant(n, false),
                "1" => BooleanFunction::constant(n, true),
                v => return Err(Error::Parse(format!("const value must be 0 or 1, found {v:?}"))),
            },
            "majority" => BooleanFunction::majority(n),
            "symmetric" => BooleanFunction::symmetric(n, fields.take("table")?.parse()?)?,
            "junta" => {
                let vars = parse_list(fields.take("J")?)?;
                BooleanFunction::junta(n, &vars, fields.take("table")?.parse()?)?
            }
            "psym" => {
                let asym = parse_list(fields.take("A")?)?;
                BooleanFunction::partially_symmetric(n, &asym, fields.take("table")?.parse()?)?
            }
            "poly" => BooleanFunction::polynomial(n, &parse_monomials(fields.take("M")?)?)?,
            "random" => {
                let seed = fields.take("seed")?;
                let seed = seed
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad seed {seed:?}")))?;
                BooleanFunction::seeded_random(n, seed)
            }
            "table" => {
                let bits: BitVector = fields.take("bits")?.parse()?;
                BooleanFunction::from_truth_table(n, bits)?
            }
            other => return Err(Error::Parse(format!("unknown function kind {other:?}"))),
        };
        fields.finish()?;
        Ok(f)
    }
}

impl fmt::Display for BooleanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n();
        match self.repr() {
            Repr::TruthTable(t) => write!(f, "table n={n} bits={t}"),
            Repr::KLinear { indices, .. } => write!(f, "klinear n={n} I={}", join(indices)),
            Repr::Junta { vars, table } => write!(f, "junta n={n} J={} table={table}", join(vars)),
            Repr::PartiallySymmetric { asym, table, .. } => {
                write!(f, "psym n={n} A={} table={table}", join(asym))
            }
            Repr::Polynomial { monomials } => {
                let terms: Vec<String> = monomials
                    .iter()
                    .map(|m| {
                        if m.is_zero() {
                            "1".to_string()
                        } else {
                            m.ones_iter().map(|i| format!("x{i}")).collect::<Vec<_>>().join("*")
                        }
                    })
                    .collect();
                write!(f, "poly n={n} M={}", terms.join("+"))
            }
            Repr::SeededRandom { seed } => write!(f, "random n={n} seed={seed}"),
        }
    }
}
