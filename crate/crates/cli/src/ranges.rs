//! Integer lists on the command line: `4`, `3..6` (inclusive) or `1,2,5`.

use crate::usage;

pub fn parse_list(s: &str) -> anyhow::Result<Vec<u32>> {
    let bad = || usage(format!("expected an integer, 'a..b' or a comma list, got '{s}'"));
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: u32 = a.trim().parse().map_err(|_| bad())?;
            let b: u32 = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
            if a > b {
                return Err(usage(format!("empty range '{part}'")));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}
