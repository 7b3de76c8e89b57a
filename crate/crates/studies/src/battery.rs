//! The norm battery evaluated on every converged maximizer.

use equil_core::norms::{norm, NormKind, NormSpec};
use equil_core::Field;

use crate::error::{Result, StudiesError};

/// Rounds `s` so that column labels stay short.
fn tidy(s: f64) -> f64 {
    (s * 1e9).round() / 1e9
}

/// Scan grid: `p ∈ {1, 2, 4}` and
/// `s ∈ {0, 0.5, 1, 1+1/p−2q−0.1, 1+1/p−0.05, 1+1/p+0.2}`, plus
/// `C^{0,0.5}`, `C^{0,0.9}` and `C^{1,0.5}`.
pub fn scan_grid(q: f64) -> Vec<NormSpec> {
    let mut out = Vec::new();
    for p in [1.0, 2.0, 4.0] {
        let t = 1.0 + 1.0 / p;
        for s in [0.0, 0.5, 1.0, t - 2.0 * q - 0.1, t - 0.05, t + 0.2] {
            let s = tidy(s);
            out.push(if s == 0.0 { NormSpec::lp(p) } else { NormSpec::wsp(s, p) });
        }
    }
    out.extend([NormSpec::holder(0, 0.5), NormSpec::holder(0, 0.9), NormSpec::holder(1, 0.5)]);
    out
}

/// Scan grid plus `L¹`, `L^∞`, `sup|∇^k ω|` for `k ≤ 2` and `W^{s,2}` for
/// `s ∈ {0.5, 1, 1.4}`, without duplicates.
pub fn battery(q: f64) -> Vec<NormSpec> {
    let mut out = vec![
        NormSpec::lp(1.0),
        NormSpec::lp(f64::INFINITY),
        NormSpec::deriv_sup(1),
        NormSpec::deriv_sup(2),
        NormSpec::wsp(0.5, 2.0),
        NormSpec::wsp(1.0, 2.0),
        NormSpec::wsp(1.4, 2.0),
    ];
    for s in scan_grid(q) {
        if !out.iter().any(|o| o.label() == s.label()) {
            out.push(s);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct NormValue {
    pub spec: NormSpec,
    pub value: f64,
    pub notes: String,
}

pub fn evaluate(f: &Field, specs: &[NormSpec]) -> Result<Vec<NormValue>> {
    specs
        .iter()
        .map(|s| {
            let r = norm(f, s)?;
            Ok(NormValue {
                spec: *s,
                value: r.value,
                notes: r.method_notes,
            })
        })
        .collect()
}

/// Parses one `kind,s,p,k` request; `p` may be `inf`.
pub fn parse_request(line: &str) -> Result<NormSpec> {
    let parts: Vec<&str> = line.split(',').map(str::trim).collect();
    if parts.len() != 4 {
        return Err(StudiesError::NormSpec(format!("expected kind,s,p,k in {line:?}")));
    }
    let num = |t: &str| -> Result<f64> {
        if t.eq_ignore_ascii_case("inf") {
            return Ok(f64::INFINITY);
        }
        t.parse().map_err(|_| StudiesError::NormSpec(format!("{t:?} is not a number in {line:?}")))
    };
    let kind: NormKind = parts[0].parse().map_err(|e| StudiesError::NormSpec(format!("{e}")))?;
    let k = parts[3]
        .parse()
        .map_err(|_| StudiesError::NormSpec(format!("{:?} is not an order in {line:?}", parts[3])))?;
    let spec = NormSpec {
        kind,
        s: num(parts[1])?,
        p: num(parts[2])?,
        k,
    };
    spec.validate()?;
    Ok(spec)
}

/// Parses a request file: one spec per line, `#` comments and an optional
/// `kind,s,p,k` header.
pub fn parse_requests(text: &str) -> Result<Vec<NormSpec>> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#') && !l.starts_with("kind"))
        .map(parse_request)
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scan_grid_has_the_threshold_points() {
        let g = scan_grid(0.05);
        assert_eq!(g.len(), 21);
        assert!(g.iter().any(|s| s.label() == "wsp:1.3:2"));
        assert!(g.iter().any(|s| s.label() == "wsp:1.45:2"));
        assert!(g.iter().any(|s| s.label() == "wsp:1.7:2"));
        assert!(g.iter().any(|s| s.label() == "holder:1:0.5"));
    }

    #[test]
    fn battery_has_unique_labels() {
        let b = battery(0.05);
        for (i, a) in b.iter().enumerate() {
            assert!(b[i + 1..].iter().all(|o| o.label() != a.label()), "{}", a.label());
        }
    }

    #[test]
    fn requests_parse() {
        let v = parse_requests("kind,s,p,k\n# comment\nwsp,0.5,2,0\nholder,0.5,inf,1\nlp,0,1,0\n").unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[1], NormSpec::holder(1, 0.5));
        assert!(parse_request("wsp,0.5").is_err());
        assert!(parse_request("hs,0.5,3,0").is_err());
    }
}
