//! Subset grammar: `full`, a count `k` (the first `k` indices), or an
//! explicit comma list such as `0,2`. A trailing comma (`2,`) marks a
//! one-element list, and a bare `0` means the single index 0.

use qkd_phase_bound::Subset;

use crate::error::{usage, CliResult};

pub fn parse_subset(spec: &str, d: usize) -> CliResult<Subset> {
    let spec = spec.trim();
    let bad = |e: qkd_phase_bound::Error| usage(format!("subset '{spec}': {e}"));
    if spec.eq_ignore_ascii_case("full") {
        return Ok(Subset::full(d));
    }
    if !spec.contains(',') {
        let k: usize = spec
            .parse()
            .map_err(|_| usage(format!("subset '{spec}' is not 'full', a count or an index list")))?;
        if k == 0 {
            return Subset::new([0], d).map_err(bad);
        }
        if k > d {
            return Err(usage(format!("subset count {k} exceeds dimension {d}")));
        }
        return Subset::first(k).map_err(bad);
    }
    let indices = spec
        .split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| usage(format!("bad index '{t}' in subset '{spec}'"))))
        .collect::<CliResult<Vec<_>>>()?;
    Subset::new(indices, d).map_err(bad)
}

/// A list of subset specs: separated by `;` when any entry is an explicit
/// list, otherwise by `,` (`full,3,2,1`).
pub fn split_subset_list(spec: &str) -> Vec<String> {
    let sep = if spec.contains(';') { ';' } else { ',' };
    spec.split(sep).map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

pub fn parse_usize_list(spec: &str, what: &str) -> CliResult<Vec<usize>> {
    spec.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse().map_err(|_| usage(format!("bad {what} '{t}'"))))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grammar() {
        assert_eq!(parse_subset("full", 4).unwrap(), Subset::full(4));
        assert_eq!(parse_subset("2", 4).unwrap(), Subset::new([0, 1], 4).unwrap());
        assert_eq!(parse_subset("0", 4).unwrap(), Subset::new([0], 4).unwrap());
        assert_eq!(parse_subset("0,2", 4).unwrap(), Subset::new([0, 2], 4).unwrap());
        assert_eq!(parse_subset("3,", 4).unwrap(), Subset::new([3], 4).unwrap());
        assert!(parse_subset("5", 4).is_err());
        assert!(parse_subset("0,4", 4).is_err());
        assert!(parse_subset("some", 4).is_err());
    }

    #[test]
    fn lists() {
        assert_eq!(split_subset_list("full,3,2,1"), ["full", "3", "2", "1"]);
        assert_eq!(split_subset_list("full;0,2;1,"), ["full", "0,2", "1,"]);
    }
}
