//! Strategy grammar for the command line and sweep grids.
//!
//! ```text
//! forecaster := "powerlaw:c=<rat>,p=<int>" | "constant:c=<rat>" | "file:<path>"
//! skeptic    := "zero" | "avoider:eps=<rat>[,decay=const|geo,ratio=<rat>]"
//!             | "momentum:m=<rat>" | "negv:v=<rat>" | "replay:<path>"
//! ```
//!
//! `<rat>` is `p/q` or a decimal (`0.25`, `1e-6`), always read exactly.

use std::fmt;

use num_rational::BigRational;
use thiserror::Error;
use ufp_core::{parse_rational, EpsilonSchedule, ForecasterSpec, SkepticSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub expected: Vec<String>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "parse error at position {}: expected {}", self.position, self.expected.join(" | "))?;
        if self.found.is_empty() {
            f.write_str(", found end of input")
        } else {
            write!(f, ", found {:?}", self.found)
        }
    }
}

fn error(input: &str, position: usize, expected: &[&str]) -> ParseError {
    let found = input.get(position..).unwrap_or("").to_owned();
    ParseError {
        position,
        expected: expected.iter().map(|s| (*s).to_owned()).collect(),
        found,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ParsedSpec {
    Forecaster(ForecasterSpec),
    Skeptic(SkepticSpec),
}

const FORECASTER_KINDS: &[&str] = &["powerlaw:", "constant:", "file:"];
const SKEPTIC_KINDS: &[&str] = &["zero", "avoider:", "momentum:", "negv:", "replay:"];

/// Parses either grammar, deciding by the leading keyword.
pub fn parse_spec(text: &str) -> Result<ParsedSpec, ParseError> {
    let kind = text.split(':').next().unwrap_or("");
    match kind {
        "powerlaw" | "constant" | "file" => parse_forecaster(text).map(ParsedSpec::Forecaster),
        "zero" | "avoider" | "momentum" | "negv" | "replay" => parse_skeptic(text).map(ParsedSpec::Skeptic),
        _ => {
            let mut expected = FORECASTER_KINDS.to_vec();
            expected.extend_from_slice(SKEPTIC_KINDS);
            Err(error(text, 0, &expected))
        }
    }
}

struct Param<'a> {
    key: &'a str,
    value: &'a str,
    value_at: usize,
}

/// Splits `k=v,k=v` starting at byte `start` of `input`, checking keys against `allowed`.
fn params<'a>(input: &'a str, start: usize, allowed: &[&str]) -> Result<Vec<Param<'a>>, ParseError> {
    let body = &input[start..];
    let mut out: Vec<Param<'a>> = Vec::new();
    let mut offset = start;
    for piece in body.split(',') {
        let Some(eq) = piece.find('=') else {
            let expected: Vec<String> = allowed.iter().map(|k| format!("{k}=")).collect();
            let expected: Vec<&str> = expected.iter().map(String::as_str).collect();
            return Err(error(input, offset, &expected));
        };
        let key = &piece[..eq];
        if !allowed.contains(&key) {
            return Err(error(input, offset, allowed));
        }
        if out.iter().any(|p| p.key == key) {
            return Err(ParseError {
                position: offset,
                expected: vec![format!("a key other than duplicate {key:?}")],
                found: input[offset..].to_owned(),
            });
        }
        out.push(Param {
            key,
            value: &piece[eq + 1..],
            value_at: offset + eq + 1,
        });
        offset += piece.len() + 1;
    }
    Ok(out)
}

fn rational(input: &str, p: &Param<'_>) -> Result<BigRational, ParseError> {
    parse_rational(p.value).map_err(|e| error(input, p.value_at + e.offset, &["rational literal (p/q or decimal)"]))
}

fn required<'p, 'a>(input: &str, ps: &'p [Param<'a>], key: &str) -> Result<&'p Param<'a>, ParseError> {
    ps.iter().find(|p| p.key == key).ok_or_else(|| {
        let label = format!("{key}=");
        error(input, input.len(), &[label.as_str()])
    })
}

fn keyword<'a>(text: &'a str, kinds: &[&str]) -> Result<(&'a str, usize), ParseError> {
    match text.find(':') {
        Some(colon) => Ok((&text[..colon], colon + 1)),
        None => Ok((text, text.len())),
    }
    .and_then(|(kind, rest)| {
        let known = kinds.iter().any(|k| k.trim_end_matches(':') == kind);
        if known {
            Ok((kind, rest))
        } else {
            Err(error(text, 0, kinds))
        }
    })
}

pub fn parse_forecaster(text: &str) -> Result<ForecasterSpec, ParseError> {
    let (kind, rest) = keyword(text, FORECASTER_KINDS)?;
    if rest > text.len() || !text[..rest].ends_with(':') {
        return Err(error(text, text.len(), &[":"]));
    }
    match kind {
        "file" => {
            if rest == text.len() {
                return Err(error(text, rest, &["<path>"]));
            }
            Ok(ForecasterSpec::FromFile(text[rest..].into()))
        }
        "constant" => {
            let ps = params(text, rest, &["c"])?;
            let c = required(text, &ps, "c")?;
            let value = rational(text, c)?;
            ForecasterSpec::constant(value).map_err(|_| error(text, c.value_at, &["non-negative rational"]))
        }
        _ => {
            let ps = params(text, rest, &["c", "p"])?;
            let c = required(text, &ps, "c")?;
            let p = required(text, &ps, "p")?;
            let c_value = rational(text, c)?;
            let p_value: i32 = p.value.parse().map_err(|_| error(text, p.value_at, &["integer exponent"]))?;
            ForecasterSpec::power_law(c_value, p_value).map_err(|_| error(text, c.value_at, &["non-negative rational"]))
        }
    }
}

pub fn parse_skeptic(text: &str) -> Result<SkepticSpec, ParseError> {
    let (kind, rest) = keyword(text, SKEPTIC_KINDS)?;
    match kind {
        "zero" => {
            if rest == text.len() && !text.ends_with(':') {
                Ok(SkepticSpec::Zero)
            } else {
                Err(error(text, kind.len(), &["end of input"]))
            }
        }
        _ if rest > text.len() || !text[..rest].ends_with(':') => Err(error(text, text.len(), &[":"])),
        "replay" => {
            if rest == text.len() {
                return Err(error(text, rest, &["<path>"]));
            }
            Ok(SkepticSpec::Replay(text[rest..].into()))
        }
        "momentum" => {
            let ps = params(text, rest, &["m"])?;
            let m = required(text, &ps, "m")?;
            Ok(SkepticSpec::Momentum(rational(text, m)?))
        }
        "negv" => {
            let ps = params(text, rest, &["v"])?;
            let v = required(text, &ps, "v")?;
            let value = rational(text, v)?;
            if value >= BigRational::default() {
                return Err(error(text, v.value_at, &["negative rational"]));
            }
            Ok(SkepticSpec::NegativeV(value))
        }
        _ => {
            let ps = params(text, rest, &["eps", "decay", "ratio"])?;
            let eps = required(text, &ps, "eps")?;
            let eps_value = rational(text, eps)?;
            let decay = ps.iter().find(|p| p.key == "decay");
            let geometric = match decay.map(|d| d.value) {
                None | Some("const") => false,
                Some("geo") => true,
                Some(_) => return Err(error(text, decay.map_or(0, |d| d.value_at), &["const", "geo"])),
            };
            let ratio = ps.iter().find(|p| p.key == "ratio");
            let schedule = if geometric {
                let ratio = required(text, &ps, "ratio")?;
                EpsilonSchedule::geometric(eps_value, rational(text, ratio)?)
                    .map_err(|_| error(text, eps.value_at, &["eps > 0 and ratio in (0, 1)"]))?
            } else {
                if let Some(r) = ratio {
                    return Err(error(text, r.value_at - "ratio=".len(), &["decay=geo before ratio"]));
                }
                EpsilonSchedule::constant(eps_value).map_err(|_| error(text, eps.value_at, &["positive rational"]))?
            };
            Ok(SkepticSpec::Avoider(schedule))
        }
    }
}
