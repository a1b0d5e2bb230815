//! Parsing of complex numbers, step pairs and integer lists from the
//! command line.

use num_complex::Complex64;

/// Parses `a`, `bi`, `a+bi`, `a-bi` (with `i` or `j`) or polar `r@theta`,
/// where `theta` is in radians unless suffixed with `deg`.
pub fn parse_complex(input: &str) -> Result<Complex64, String> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    if s.is_empty() {
        return Err("empty complex number".into());
    }
    if let Some((r, t)) = s.split_once('@') {
        let r: f64 = r
            .parse()
            .map_err(|_| format!("bad modulus '{r}' in '{input}'"))?;
        let (t, scale) = if let Some(t) = t.strip_suffix("deg") {
            (t, std::f64::consts::PI / 180.0)
        } else {
            (t.strip_suffix("rad").unwrap_or(t), 1.0)
        };
        let t: f64 = t
            .parse()
            .map_err(|_| format!("bad angle '{t}' in '{input}'"))?;
        return Ok(Complex64::from_polar(r, t * scale));
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return s
            .parse::<f64>()
            .map(|re| Complex64::new(re, 0.0))
            .map_err(|_| format!("cannot parse '{input}' as a complex number"));
    };
    // split at the last sign that is not a leading sign or an exponent sign
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&i| (bytes[i] == b'+' || bytes[i] == b'-') && !matches!(bytes[i - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(i) => (&body[..i], &body[i..]),
        None => ("", body),
    };
    let im = match im {
        "" | "+" => 1.0,
        "-" => -1.0,
        x => x
            .parse::<f64>()
            .map_err(|_| format!("bad imaginary part '{x}' in '{input}'"))?,
    };
    let re = if re.is_empty() {
        0.0
    } else {
        re.parse::<f64>()
            .map_err(|_| format!("bad real part '{re}' in '{input}'"))?
    };
    Ok(Complex64::new(re, im))
}

/// Parses `MxN` into a pair of step counts, each at least 1.
pub fn parse_steps(input: &str) -> Result<(usize, usize), String> {
    let (a, b) = input
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("steps must look like 20x20, got '{input}'"))?;
    let a: usize = a
        .trim()
        .parse()
        .map_err(|_| format!("bad step count '{a}'"))?;
    let b: usize = b
        .trim()
        .parse()
        .map_err(|_| format!("bad step count '{b}'"))?;
    if a == 0 || b == 0 {
        return Err("step counts must be positive".into());
    }
    Ok((a, b))
}
