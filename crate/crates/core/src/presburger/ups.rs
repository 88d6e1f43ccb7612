//! Ultimately periodic subsets of ℕ in canonical form.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::univariate::minimal_period;

/// `{n < t : low[n]} ∪ {n ≥ t : n mod p ∈ residues}` with `p` the least
/// eventual period and `t` the least threshold for it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct UltimatelyPeriodicSet {
    threshold: usize,
    period: usize,
    low: Vec<bool>,
    residues: BTreeSet<usize>,
}

impl UltimatelyPeriodicSet {
    /// Canonical set agreeing with `member` on `[0, t)` and periodic with period `p` from `t` on.
    pub fn from_fn(threshold: usize, period: usize, member: impl Fn(usize) -> bool) -> Self {
        assert!(period >= 1, "period must be positive");
        let block: Vec<bool> = (0..period).map(|i| member(threshold + i)).collect();
        let q = minimal_period(&block);
        let at = |n: usize| -> bool {
            if n < threshold {
                member(n)
            } else {
                block[(n - threshold) % q]
            }
        };
        let mut t = threshold;
        while t > 0 && at(t - 1) == at(t - 1 + q) {
            t -= 1;
        }
        let low = (0..t).map(at).collect();
        let residues = (t..t + q).filter(|&n| at(n)).map(|n| n % q).collect();
        UltimatelyPeriodicSet {
            threshold: t,
            period: q,
            low,
            residues,
        }
    }

    /// Build from raw parts (any threshold/period), canonicalizing.
    pub fn from_parts(threshold: usize, period: usize, low: Vec<bool>, residues: BTreeSet<usize>) -> Self {
        assert_eq!(low.len(), threshold, "low bits must cover [0, threshold)");
        Self::from_fn(threshold, period, |n| {
            if n < threshold {
                low[n]
            } else {
                residues.contains(&(n % period))
            }
        })
    }

    pub fn empty() -> Self {
        Self::from_fn(0, 1, |_| false)
    }

    pub fn all() -> Self {
        Self::from_fn(0, 1, |_| true)
    }

    pub fn threshold(&self) -> usize {
        self.threshold
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn low(&self) -> &[bool] {
        &self.low
    }

    pub fn residues(&self) -> &BTreeSet<usize> {
        &self.residues
    }

    pub fn contains(&self, n: usize) -> bool {
        if n < self.threshold {
            self.low[n]
        } else {
            self.residues.contains(&(n % self.period))
        }
    }

    /// Same set with membership below `bound` replaced by `member`.
    pub fn with_prefix(&self, bound: usize, member: impl Fn(usize) -> bool) -> Self {
        let t = self.threshold.max(bound);
        Self::from_fn(t, self.period, |n| if n < bound { member(n) } else { self.contains(n) })
    }
}

pub fn ups_member(u: &UltimatelyPeriodicSet, n: usize) -> bool {
    u.contains(n)
}

pub fn ups_equal(a: &UltimatelyPeriodicSet, b: &UltimatelyPeriodicSet) -> bool {
    a == b
}

impl fmt::Display for UltimatelyPeriodicSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let low: String = self.low.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let res: Vec<String> = self.residues.iter().map(|r| r.to_string()).collect();
        write!(
            f,
            "t={} p={} low={} residues={{{}}}",
            self.threshold,
            self.period,
            low,
            res.join(",")
        )
    }
}

impl FromStr for UltimatelyPeriodicSet {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut t = None;
        let mut p = None;
        let mut low = None;
        let mut res = None;
        for field in s.split_whitespace() {
            let (k, v) = field.split_once('=').ok_or_else(|| format!("bad field `{field}`"))?;
            match k {
                "t" => t = Some(v.parse::<usize>().map_err(|e| e.to_string())?),
                "p" => p = Some(v.parse::<usize>().map_err(|e| e.to_string())?),
                "low" => {
                    low = Some(
                        v.chars()
                            .map(|c| match c {
                                '0' => Ok(false),
                                '1' => Ok(true),
                                _ => Err(format!("bad bit `{c}`")),
                            })
                            .collect::<Result<Vec<_>, _>>()?,
                    )
                }
                "residues" => {
                    let inner = v
                        .strip_prefix('{')
                        .and_then(|r| r.strip_suffix('}'))
                        .ok_or("residues must be braced")?;
                    let set = inner
                        .split(',')
                        .filter(|x| !x.is_empty())
                        .map(|x| x.parse::<usize>().map_err(|e| e.to_string()))
                        .collect::<Result<BTreeSet<_>, _>>()?;
                    res = Some(set);
                }
                other => return Err(format!("unknown field `{other}`")),
            }
        }
        let (t, p) = (t.ok_or("missing t")?, p.ok_or("missing p")?);
        let low = low.unwrap_or_default();
        if low.len() != t || p == 0 {
            return Err("inconsistent threshold, period or low bits".into());
        }
        Ok(Self::from_parts(t, p, low, res.ok_or("missing residues")?))
    }
}
