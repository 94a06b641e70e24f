use num_complex::Complex64;

/// Parses `a`, `bi`, `a+bi`, `a-bi` (also `i`, `-i`, with `j` accepted for `i`).
pub fn complex(text: &str) -> Result<Complex64, String> {
    let s: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("'{text}' is not a complex number of the form a+bi");
    if s.is_empty() {
        return Err(bad());
    }
    let Some(body) = s.strip_suffix('i').or_else(|| s.strip_suffix('j')) else {
        return match s.parse::<f64>() {
            Ok(re) if re.is_finite() => Ok(Complex64::new(re, 0.0)),
            _ => Err(bad()),
        };
    };
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&k| (bytes[k] == b'+' || bytes[k] == b'-') && !matches!(bytes[k - 1], b'e' | b'E'));
    let (re, im) = match split {
        Some(k) => (&body[..k], &body[k..]),
        None => ("0", body),
    };
    let im = match im {
        "" | "+" => "1",
        "-" => "-1",
        other => other,
    };
    let re: f64 = re.parse().map_err(|_| bad())?;
    let im: f64 = im.parse().map_err(|_| bad())?;
    if !(re.is_finite() && im.is_finite()) {
        return Err(format!("'{text}' must be finite"));
    }
    Ok(Complex64::new(re, im))
}

/// Comma-separated list of reals.
pub fn real_list(text: &str) -> Result<Vec<f64>, String> {
    text.split(',').map(|p| p.trim().parse::<f64>().map_err(|_| format!("'{p}' in '{text}' is not a number"))).collect()
}

/// `start:stop:count` as `count` evenly spaced points, endpoints included.
pub fn linear_range(text: &str) -> Result<Vec<f64>, String> {
    let (a, b, n) = range_parts(text)?;
    Ok(match n {
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    })
}

/// `start:stop:count` as `count` geometrically spaced points, endpoints included.
pub fn log_range(text: &str) -> Result<Vec<f64>, String> {
    let (a, b, n) = range_parts(text)?;
    if !(a > 0.0 && b > 0.0) {
        return Err(format!("geometric range '{text}' needs positive endpoints"));
    }
    let (la, lb) = (a.ln(), b.ln());
    Ok(match n {
        1 => vec![a],
        _ => (0..n)
            .map(|k| match k {
                0 => a,
                k if k == n - 1 => b,
                k => (la + (lb - la) * k as f64 / (n - 1) as f64).exp(),
            })
            .collect(),
    })
}

fn range_parts(text: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || format!("'{text}' is not a range of the form start:stop:count");
    if parts.len() != 3 {
        return Err(bad());
    }
    let a: f64 = parts[0].trim().parse().map_err(|_| bad())?;
    let b: f64 = parts[1].trim().parse().map_err(|_| bad())?;
    let n: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    Ok((a, b, n))
}
