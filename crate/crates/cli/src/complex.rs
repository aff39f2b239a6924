//! Complex flag values: `a`, `a+bi`, `a-bi` or `bi`, without whitespace.

use heunc::Complex64;

pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    if s.is_empty() {
        return Err("empty complex value".into());
    }
    if s.chars().any(char::is_whitespace) {
        return Err(format!("whitespace is not allowed in complex value '{s}'"));
    }
    let value = match s.strip_suffix('i') {
        None => Complex64::new(real(s, s)?, 0.0),
        Some(body) => {
            // the imaginary part starts at the last sign that is not an exponent sign
            let split = body
                .char_indices()
                .filter(|&(i, ch)| (ch == '+' || ch == '-') && i > 0 && !matches!(body.as_bytes()[i - 1], b'e' | b'E'))
                .map(|(i, _)| i)
                .next_back();
            match split {
                Some(i) => Complex64::new(real(&body[..i], s)?, imag(&body[i..], s)?),
                None => Complex64::new(0.0, imag(body, s)?),
            }
        }
    };
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(format!("complex value '{s}' is not finite"));
    }
    Ok(value)
}

fn real(part: &str, whole: &str) -> Result<f64, String> {
    if part.starts_with(['+', '-']) && part[1..].starts_with(['+', '-']) {
        return Err(format!("cannot parse '{whole}' as a complex number"));
    }
    part.parse::<f64>()
        .map_err(|_| format!("cannot parse '{whole}' as a complex number (expected a, a+bi or a-bi)"))
}

fn imag(part: &str, whole: &str) -> Result<f64, String> {
    match part {
        "" | "+" => Ok(1.0),
        "-" => Ok(-1.0),
        _ => real(part, whole),
    }
}
