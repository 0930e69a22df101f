//! The family file format: coefficient lists plus optional run options.
//!
//! ```text
//! # the running quadratic example
//! num = [0, 1*t^(-1), 1]
//! den = [1]
//! window = 6          # optional option lines
//! base = 2
//! t = 0.1, 0.01, 0.001
//! ```
//!
//! Statements are separated by newlines or `;`. Coefficients are sums of
//! `(<re>/<den>+<im>/<den>i)*t^(p/q)` terms in the canonical form, or the
//! relaxed forms `3`, `-1/2`, `i`, `t`, `2*t^(1/2)`. The canonical printer
//! round-trips bit-exactly through this parser.

use std::fmt;

use berklim_core::puiseux::PuiseuxElem;
use berklim_core::reduction::RationalMapFamily;
use berklim_core::scalar::{parse_rat, Rat};
use num_complex::Complex64;

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum FamilyError {
    Parse(ParseError),
    DegreeMismatch(String),
}

impl fmt::Display for FamilyError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyError::Parse(p) => write!(f, "{p}"),
            FamilyError::DegreeMismatch(d) => write!(f, "degree mismatch: {d}"),
        }
    }
}

/// Options carried by a family file; command-line flags override them.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FamilyOptions {
    pub window: Option<usize>,
    pub n_max: Option<usize>,
    pub tol: Option<Rat>,
    pub base: Option<PuiseuxElem>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub burn_in: Option<usize>,
    pub t_list: Option<Vec<Complex64>>,
    pub precision: Option<u32>,
}

/// A parsed family specification.
#[derive(Clone, Debug, PartialEq)]
pub struct FamilySpec {
    pub degree: usize,
    pub num: Vec<PuiseuxElem>,
    pub den: Vec<PuiseuxElem>,
    pub options: FamilyOptions,
}

impl FamilySpec {
    pub fn to_family(&self) -> berklim_core::Result<RationalMapFamily> {
        RationalMapFamily::new(self.num.clone(), self.den.clone(), self.degree)
    }

    /// Canonical text: coefficient lists in the canonical series form.
    pub fn canonical_text(&self) -> String {
        let list = |v: &[PuiseuxElem]| -> String {
            let parts: Vec<String> = v.iter().map(|c| c.canonical_string()).collect();
            format!("[{}]", parts.join(", "))
        };
        format!("num = {}; den = {}", list(&self.num), list(&self.den))
    }
}

/// Parse a complex number given as `0.001`, `1e-3`, or `a+bi` with float
/// parts.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let s = s.trim();
    if let Ok(re) = s.parse::<f64>() {
        return Ok(Complex64::new(re, 0.0));
    }
    if let Some(body) = s.strip_suffix('i') {
        // split at the last top-level +/- that is not an exponent sign
        let bytes = body.as_bytes();
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                let re: f64 = body[..k].trim().parse().map_err(|_| format!("bad real part in {s}"))?;
                let im_str = &body[k..];
                let im: f64 = if im_str == "+" {
                    1.0
                } else if im_str == "-" {
                    -1.0
                } else {
                    im_str.parse().map_err(|_| format!("bad imaginary part in {s}"))?
                };
                return Ok(Complex64::new(re, im));
            }
        }
        let im: f64 = body.parse().map_err(|_| format!("bad imaginary part in {s}"))?;
        return Ok(Complex64::new(0.0, im));
    }
    Err(format!("cannot parse complex number {s}"))
}

/// Parse the family grammar. `degree = max(len(num), len(den)) - 1`; an
/// explicit `degree =` line must agree.
pub fn parse_family(text: &str) -> Result<FamilySpec, FamilyError> {
    let mut num: Option<(usize, Vec<PuiseuxElem>)> = None;
    let mut den: Option<(usize, Vec<PuiseuxElem>)> = None;
    let mut explicit_degree: Option<usize> = None;
    let mut options = FamilyOptions::default();

    for (line_no, raw_line) in text.lines().enumerate() {
        let line_no = line_no + 1;
        let line = match raw_line.find('#') {
            Some(k) => &raw_line[..k],
            None => raw_line,
        };
        for stmt in line.split(';') {
            let stmt = stmt.trim();
            if stmt.is_empty() {
                continue;
            }
            let (key, value) = stmt.split_once('=').ok_or_else(|| {
                FamilyError::Parse(ParseError {
                    line: line_no,
                    message: format!("expected `key = value`, got `{stmt}`"),
                })
            })?;
            let key = key.trim();
            let value = value.trim();
            let err = |message: String| FamilyError::Parse(ParseError { line: line_no, message });
            match key {
                "num" => num = Some((line_no, parse_coeff_list(value, line_no)?)),
                "den" => den = Some((line_no, parse_coeff_list(value, line_no)?)),
                "degree" => {
                    explicit_degree =
                        Some(value.parse().map_err(|_| err(format!("bad degree `{value}`")))?)
                }
                "window" => {
                    options.window =
                        Some(value.parse().map_err(|_| err(format!("bad window `{value}`")))?)
                }
                "n_max" => {
                    options.n_max =
                        Some(value.parse().map_err(|_| err(format!("bad n_max `{value}`")))?)
                }
                "tol" => {
                    options.tol =
                        Some(parse_rat(value).map_err(|e| err(format!("bad tol `{value}`: {e}")))?)
                }
                "base" => {
                    options.base = Some(
                        PuiseuxElem::parse(value)
                            .map_err(|e| err(format!("bad base `{value}`: {e}")))?,
                    )
                }
                "seed" => {
                    options.seed =
                        Some(value.parse().map_err(|_| err(format!("bad seed `{value}`")))?)
                }
                "samples" => {
                    options.samples =
                        Some(value.parse().map_err(|_| err(format!("bad samples `{value}`")))?)
                }
                "burn_in" => {
                    options.burn_in =
                        Some(value.parse().map_err(|_| err(format!("bad burn_in `{value}`")))?)
                }
                "t" => {
                    let mut list = Vec::new();
                    for part in value.split(',') {
                        list.push(parse_complex(part).map_err(|e| err(e))?);
                    }
                    options.t_list = Some(list);
                }
                "precision" => {
                    options.precision =
                        Some(value.parse().map_err(|_| err(format!("bad precision `{value}`")))?)
                }
                other => {
                    return Err(err(format!("unknown key `{other}`")));
                }
            }
        }
    }

    let (num_line, num) = num.ok_or_else(|| {
        FamilyError::Parse(ParseError { line: 0, message: "missing `num = [...]`".into() })
    })?;
    let (_, den) = den.ok_or_else(|| {
        FamilyError::Parse(ParseError { line: 0, message: "missing `den = [...]`".into() })
    })?;
    if num.is_empty() || den.is_empty() {
        return Err(FamilyError::Parse(ParseError {
            line: num_line,
            message: "coefficient lists must be nonempty".into(),
        }));
    }
    let degree = num.len().max(den.len()) - 1;
    if let Some(d) = explicit_degree {
        if d != degree {
            return Err(FamilyError::DegreeMismatch(format!(
                "explicit degree {d} but coefficient lists give {degree}"
            )));
        }
    }
    if degree == 0 {
        return Err(FamilyError::DegreeMismatch("constant maps are not families".into()));
    }
    Ok(FamilySpec { degree, num, den, options })
}

fn parse_coeff_list(value: &str, line: usize) -> Result<Vec<PuiseuxElem>, FamilyError> {
    let value = value.trim();
    let inner = value
        .strip_prefix('[')
        .and_then(|v| v.strip_suffix(']'))
        .ok_or_else(|| {
            FamilyError::Parse(ParseError {
                line,
                message: format!("expected `[c0, c1, ...]`, got `{value}`"),
            })
        })?;
    let mut out = Vec::new();
    for part in split_top_level_commas(inner) {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let c = PuiseuxElem::parse(part).map_err(|e| {
            FamilyError::Parse(ParseError { line, message: format!("coefficient `{part}`: {e}") })
        })?;
        out.push(c);
    }
    Ok(out)
}

fn split_top_level_commas(s: &str) -> Vec<&str> {
    let mut parts = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (k, ch) in s.char_indices() {
        match ch {
            '(' | '[' => depth += 1,
            ')' | ']' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                parts.push(&s[start..k]);
                start = k + 1;
            }
            _ => {}
        }
    }
    parts.push(&s[start..]);
    parts
}

#[cfg(test)]
mod tests {
    use super::*;
    use berklim_core::scalar::rat_i;

    #[test]
    fn running_example() {
        let spec = parse_family("num = [0, 1*t^(-1), 1]; den = [1]").unwrap();
        assert_eq!(spec.degree, 2);
        assert_eq!(spec.num[1], PuiseuxElem::t_pow(rat_i(-1)));
        assert!(spec.to_family().is_ok());
    }

    #[test]
    fn pure_square() {
        let spec = parse_family("num = [0,0,1]; den = [1]").unwrap();
        assert_eq!(spec.degree, 2);
        assert!(spec.to_family().is_ok());
    }

    #[test]
    fn degenerate_family_fails_downstream() {
        let spec = parse_family("num = [0,1]; den = [0,1]").unwrap();
        assert_eq!(spec.degree, 1);
        assert!(matches!(
            spec.to_family(),
            Err(berklim_core::CoreError::InvalidFamily(_))
        ));
    }

    #[test]
    fn options_and_comments() {
        let text = "\n# family\nnum = [0, 1*t^(-1), 1]\nden = [1]\nwindow = 6\nt = 0.1, 1e-3\nbase = 2\ntol = 1/1000\n";
        let spec = parse_family(text).unwrap();
        assert_eq!(spec.options.window, Some(6));
        assert_eq!(spec.options.t_list.as_ref().unwrap().len(), 2);
        assert_eq!(spec.options.base, Some(PuiseuxElem::from_i64(2)));
    }

    #[test]
    fn degree_mismatch_detected() {
        let e = parse_family("num = [0,0,1]; den = [1]; degree = 3").unwrap_err();
        assert!(matches!(e, FamilyError::DegreeMismatch(_)));
    }

    #[test]
    fn error_carries_line() {
        let e = parse_family("num = [0,0,1]\nden = [1]\nwat = 3").unwrap_err();
        match e {
            FamilyError::Parse(p) => assert_eq!(p.line, 3),
            other => panic!("{other}"),
        }
    }

    #[test]
    fn canonical_round_trip() {
        let spec = parse_family("num = [0, 1*t^(-1) + (1/2+1/3i), 1]; den = [1, t^(1/2)]")
            .unwrap();
        let text = spec.canonical_text();
        let again = parse_family(&text).unwrap();
        assert_eq!(again.num, spec.num);
        assert_eq!(again.den, spec.den);
    }

    #[test]
    fn complex_parsing() {
        assert_eq!(parse_complex("0.001").unwrap(), Complex64::new(0.001, 0.0));
        assert_eq!(parse_complex("1e-3").unwrap(), Complex64::new(0.001, 0.0));
        assert_eq!(parse_complex("0.5+0.25i").unwrap(), Complex64::new(0.5, 0.25));
        assert_eq!(parse_complex("2i").unwrap(), Complex64::new(0.0, 2.0));
    }
}
