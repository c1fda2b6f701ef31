use serde::Serialize;

/// Index of one summand of a norm.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Key {
    Annulus(u32),
    Block { i: u32, d: u64 },
    Column([i64; 3]),
    Time(usize),
    Part(String),
}

impl std::fmt::Display for Key {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Key::Annulus(i) => write!(f, "i={i}"),
            Key::Block { i, d } => write!(f, "i={i};d={d}"),
            Key::Column(xi) => write!(f, "xi={}:{}:{}", xi[0], xi[1], xi[2]),
            Key::Time(l) => write!(f, "t={l}"),
            Key::Part(p) => write!(f, "{p}"),
        }
    }
}

/// How contributions combine into the total.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Aggregation {
    /// sqrt(Σ c²)
    L2,
    /// Σ c
    Sum,
    /// max c
    Max,
    /// Block keys (i,d): sqrt(Σ_i 2^{2is} (ℓ^p_d c)²); p = ∞ allowed.
    DyadicLp { s: f64, p: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct NormBreakdown {
    pub total: f64,
    pub contributions: Vec<(Key, f64)>,
    pub aggregation: Aggregation,
    /// True when the total is an upper bound for an infimum.
    pub upper_bound: bool,
}

impl NormBreakdown {
    pub fn new(contributions: Vec<(Key, f64)>, aggregation: Aggregation) -> Self {
        let mut b = NormBreakdown { total: 0.0, contributions, aggregation, upper_bound: false };
        b.total = b.reaggregate();
        b
    }

    pub fn zero(aggregation: Aggregation) -> Self {
        NormBreakdown::new(Vec::new(), aggregation)
    }

    pub fn reaggregate(&self) -> f64 {
        match self.aggregation {
            Aggregation::L2 => self.contributions.iter().map(|(_, c)| c * c).sum::<f64>().sqrt(),
            Aggregation::Sum => self.contributions.iter().map(|(_, c)| c).sum(),
            Aggregation::Max => self.contributions.iter().map(|(_, c)| *c).fold(0.0, f64::max),
            Aggregation::DyadicLp { s, p } => {
                let mut per_i: std::collections::BTreeMap<u32, Vec<f64>> = Default::default();
                for (k, c) in &self.contributions {
                    if let Key::Block { i, .. } = k {
                        per_i.entry(*i).or_default().push(*c);
                    }
                }
                per_i
                    .into_iter()
                    .map(|(i, cs)| 2f64.powf(2.0 * i as f64 * s) * lp(&cs, p).powi(2))
                    .sum::<f64>()
                    .sqrt()
            }
        }
    }
}

impl NormBreakdown {
    /// Relative gap between the stored total and a fresh re-aggregation.
    pub fn consistency(&self) -> f64 {
        let r = self.reaggregate();
        let scale = self.total.abs().max(r.abs());
        if scale == 0.0 {
            0.0
        } else {
            (self.total - r).abs() / scale
        }
    }

    /// Tab-separated rows "key<TAB>value", one per contribution, then the total.
    pub fn to_table(&self) -> String {
        let mut out = String::from("key\tvalue\n");
        for (k, c) in &self.contributions {
            out.push_str(&format!("{k}\t{c:e}\n"));
        }
        out.push_str(&format!("total\t{:e}\n", self.total));
        out
    }
}

pub fn lp(values: &[f64], p: f64) -> f64 {
    if p.is_infinite() {
        values.iter().copied().fold(0.0, f64::max)
    } else if p == 1.0 {
        values.iter().sum()
    } else if p == 2.0 {
        values.iter().map(|v| v * v).sum::<f64>().sqrt()
    } else {
        values.iter().map(|v| v.powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dyadic_aggregation() {
        let c = vec![
            (Key::Block { i: 0, d: 1 }, 3.0),
            (Key::Block { i: 0, d: 2 }, 4.0),
            (Key::Block { i: 1, d: 1 }, 1.0),
        ];
        let l1 = NormBreakdown::new(c.clone(), Aggregation::DyadicLp { s: 0.0, p: 1.0 });
        assert!((l1.total - 50f64.sqrt()).abs() < 1e-14);
        let linf = NormBreakdown::new(c.clone(), Aggregation::DyadicLp { s: 1.0, p: f64::INFINITY });
        assert!((linf.total - (16.0f64 + 4.0).sqrt()).abs() < 1e-14);
        let l2 = NormBreakdown::new(c, Aggregation::DyadicLp { s: 0.0, p: 2.0 });
        assert!((l2.total - 26f64.sqrt()).abs() < 1e-14);
        assert_eq!(l2.consistency(), 0.0);
    }

    #[test]
    fn table_rows() {
        let b = NormBreakdown::new(vec![(Key::Part("near".into()), 1.0)], Aggregation::Sum);
        assert_eq!(b.to_table().lines().count(), 3);
    }
}
