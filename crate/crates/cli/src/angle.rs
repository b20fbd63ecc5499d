use std::f64::consts::PI;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AngleError {
    #[error("empty angle")]
    Empty,
    #[error("malformed angle literal `{0}`")]
    Malformed(String),
    #[error("zero denominator in `{0}`")]
    ZeroDenominator(String),
}

fn plain_number(s: &str) -> Option<f64> {
    let ok = !s.is_empty()
        && s.chars().all(|c| c.is_ascii_digit() || matches!(c, '.' | 'e' | 'E' | '+' | '-'))
        && s.starts_with(|c: char| c.is_ascii_digit() || c == '.');
    ok.then(|| s.parse::<f64>().ok()).flatten().filter(|v| v.is_finite())
}

/// Parses radians, either plain (`0.25`) or as a multiple of π:
/// `pi`, `-pi/2`, `3pi/4`, `-2*pi/3`, `0.5pi`, `π/8`.
pub fn parse_angle(text: &str) -> Result<f64, AngleError> {
    let s = text.trim();
    if s.is_empty() {
        return Err(AngleError::Empty);
    }
    let bad = || AngleError::Malformed(s.to_string());
    let (sign, body) = match s.as_bytes()[0] {
        b'-' => (-1.0, &s[1..]),
        b'+' => (1.0, &s[1..]),
        _ => (1.0, s),
    };
    let body = body.replace('π', "pi");
    let Some(at) = body.find("pi") else {
        return plain_number(&body).map(|v| sign * v).ok_or_else(bad);
    };
    let raw = &body[..at];
    let coef = raw.strip_suffix('*').unwrap_or(raw);
    if coef.is_empty() && !raw.is_empty() {
        return Err(bad());
    }
    let coef = if coef.is_empty() {
        1.0
    } else {
        plain_number(coef).ok_or_else(bad)?
    };
    let rest = &body[at + 2..];
    let den = if rest.is_empty() {
        1.0
    } else {
        let d = rest.strip_prefix('/').ok_or_else(bad)?;
        plain_number(d).ok_or_else(bad)?
    };
    if den == 0.0 {
        return Err(AngleError::ZeroDenominator(s.to_string()));
    }
    let v = sign * (coef * PI) / den;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8};

    #[test]
    fn literals() {
        assert_eq!(parse_angle("pi/2"), Ok(FRAC_PI_2));
        assert_eq!(parse_angle("-pi/4"), Ok(-FRAC_PI_4));
        assert_eq!(parse_angle("π/8"), Ok(FRAC_PI_8));
        assert_eq!(parse_angle("pi"), Ok(PI));
        assert_eq!(parse_angle("-2pi/3"), Ok(-2.0 * PI / 3.0));
        assert_eq!(parse_angle("3*pi/4"), Ok(3.0 * PI / 4.0));
        assert_eq!(parse_angle(" 0 "), Ok(0.0));
        assert_eq!(parse_angle("1.5"), Ok(1.5));
        assert_eq!(parse_angle("-0.5pi"), Ok(-0.5 * PI));
    }

    #[test]
    fn rejects() {
        for s in ["", "pi/0", "pie", "2pi3", "inf", "nan", "pi/", "--pi", "pi/x", "1e999", "*pi", "pipi"] {
            assert!(parse_angle(s).is_err(), "{s}");
        }
    }
}
