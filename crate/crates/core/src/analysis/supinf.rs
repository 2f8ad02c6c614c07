//! `sup_Ω u_i + C₁ inf_K u_i` along a sequence, with its growth rate in
//! `log i`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::scalar::{ls_slope, Real};

use super::{CompactRegion, ScalarField};

const SCHEMA: &str = "supinf/1";

#[derive(Debug, Clone, PartialEq)]
pub struct SupInfReport<T> {
    pub c1: T,
    pub indices: Vec<T>,
    pub sup_omega: Vec<T>,
    pub inf_k: Vec<T>,
    pub statistic: Vec<T>,
    /// Least-squares slope of `s_i` against `log i` over the last half of
    /// the indices; present only with at least four members.
    pub slope: Option<T>,
    /// `max_i (-s_i)`, an empirical stand-in for the lower-bound constant.
    pub c2_empirical: T,
}

/// Builds the report for `seq` (pairs of index and member).
pub fn supinf_statistic<T: Real, U: ScalarField<T>>(seq: &[(T, U)], k: &CompactRegion<T>, c1: T) -> Result<SupInfReport<T>> {
    let mut indices = Vec::with_capacity(seq.len());
    let mut sup_omega = Vec::with_capacity(seq.len());
    let mut inf_k = Vec::with_capacity(seq.len());
    for (i, u) in seq {
        indices.push(*i);
        sup_omega.push(u.global_sup());
        inf_k.push(u.extrema_on(k)?.0);
    }
    SupInfReport::assemble(c1, indices, sup_omega, inf_k)
}

fn fmt_num<T: Real>(x: T) -> String {
    format!("{:.16e}", x.as_f64())
}

fn parse_num<T: Real>(s: &str) -> Result<T> {
    s.trim().parse::<f64>().map(T::lit).map_err(|e| Error::Parse(format!("`{s}`: {e}")))
}

impl<T: Real> SupInfReport<T> {
    fn assemble(c1: T, indices: Vec<T>, sup_omega: Vec<T>, inf_k: Vec<T>) -> Result<Self> {
        if indices.len() != sup_omega.len() || indices.len() != inf_k.len() {
            return Err(Error::Input("column lengths disagree".into()));
        }
        let statistic: Vec<T> = sup_omega.iter().zip(&inf_k).map(|(s, i)| *s + c1 * *i).collect();
        let slope = (indices.len() >= 4).then(|| {
            let half = indices.len() / 2;
            let logs: Vec<T> = indices[half..].iter().map(|i| i.ln()).collect();
            ls_slope(&logs, &statistic[half..])
        });
        let c2_empirical = statistic.iter().fold(T::neg_infinity(), |a, s| a.max(-*s));
        Ok(Self { c1, indices, sup_omega, inf_k, statistic, slope, c2_empirical })
    }

    fn summary(&self) -> String {
        let slope = self.slope.map(fmt_num).unwrap_or_else(|| "none".into());
        format!("c1={} slope={} c2_empirical={}", fmt_num(self.c1), slope, fmt_num(self.c2_empirical))
    }

    /// CSV with columns `i,sup_omega,inf_K,s_i` under a `# schema=` line
    /// that also records `c1`, the slope and the empirical constant.
    pub fn to_csv(&self) -> String {
        let mut s = format!("# schema={SCHEMA} {}\ni,sup_omega,inf_K,s_i\n", self.summary());
        for k in 0..self.indices.len() {
            s.push_str(&format!(
                "{},{},{},{}\n",
                fmt_num(self.indices[k]),
                fmt_num(self.sup_omega[k]),
                fmt_num(self.inf_k[k]),
                fmt_num(self.statistic[k])
            ));
        }
        s
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| Error::Parse("empty report".into()))?;
        let meta = parse_schema_line(header)?;
        let c1 = parse_num(meta.get("c1").ok_or_else(|| Error::Parse("missing c1".into()))?)?;
        if lines.next() != Some("i,sup_omega,inf_K,s_i") {
            return Err(Error::Parse("missing column header".into()));
        }
        let (mut idx, mut sup, mut inf) = (Vec::new(), Vec::new(), Vec::new());
        for line in lines.filter(|l| !l.is_empty()) {
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != 4 {
                return Err(Error::Parse(format!("expected 4 columns in `{line}`")));
            }
            idx.push(parse_num(cols[0])?);
            sup.push(parse_num(cols[1])?);
            inf.push(parse_num(cols[2])?);
        }
        Self::assemble(c1, idx, sup, inf)
    }

    /// Key-value sections: a `[report]` header then one `[i=…]` section per
    /// index.
    pub fn to_text(&self) -> String {
        let mut s = format!("# schema={SCHEMA}\n[report]\n");
        for kv in self.summary().split(' ') {
            s.push_str(kv);
            s.push('\n');
        }
        for k in 0..self.indices.len() {
            s.push_str(&format!(
                "\n[i={}]\nsup_omega={}\ninf_K={}\ns_i={}\n",
                fmt_num(self.indices[k]),
                fmt_num(self.sup_omega[k]),
                fmt_num(self.inf_k[k]),
                fmt_num(self.statistic[k])
            ));
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut c1 = None;
        let (mut idx, mut sup, mut inf) = (Vec::new(), Vec::new(), Vec::new());
        let mut in_report = false;
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            if line == "[report]" {
                in_report = true;
            } else if let Some(i) = line.strip_prefix("[i=").and_then(|l| l.strip_suffix(']')) {
                in_report = false;
                idx.push(parse_num(i)?);
            } else {
                let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse(format!("bad line `{line}`")))?;
                match (in_report, k) {
                    (true, "c1") => c1 = Some(parse_num(v)?),
                    (true, _) => {}
                    (false, "sup_omega") => sup.push(parse_num(v)?),
                    (false, "inf_K") => inf.push(parse_num(v)?),
                    (false, "s_i") => {}
                    _ => return Err(Error::Parse(format!("unknown key `{k}`"))),
                }
            }
        }
        Self::assemble(c1.ok_or_else(|| Error::Parse("missing c1".into()))?, idx, sup, inf)
    }
}

fn parse_schema_line(line: &str) -> Result<BTreeMap<&str, &str>> {
    let rest = line
        .strip_prefix("# schema=")
        .ok_or_else(|| Error::Parse("missing `# schema=` line".into()))?;
    let mut parts = rest.split(' ');
    if parts.next() != Some(SCHEMA) {
        return Err(Error::Parse(format!("unexpected schema in `{line}`")));
    }
    Ok(parts.filter_map(|kv| kv.split_once('=')).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::RadialProfile;
    use crate::scalar::Point;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    type P = RadialProfile<f64>;

    fn indices() -> Vec<f64> {
        (1..=10).map(|k| 2f64.powi(k)).collect()
    }

    #[test]
    fn bubble_statistic_is_bounded() {
        let k = 0.5;
        let seq: Vec<_> = indices().into_iter().map(|i| (i, P::bubble(i).unwrap())).collect();
        let ball = CompactRegion::ball(Point::new(0.0, 0.0), k).unwrap();
        let r = supinf_statistic(&seq, &ball, 1.0).unwrap();
        let limit = (64.0 / k.powi(4)).ln();
        assert!((r.statistic.last().unwrap() - limit).abs() < 1e-5);
        assert!(r.slope.unwrap().abs() < 1e-3);
    }

    #[test]
    fn shafrir_slope() {
        for beta in [1.25, 1.5, 2.0, 3.0] {
            let seq: Vec<_> = indices().into_iter().map(|i| (i, P::shafrir_scaled(i, beta).unwrap())).collect();
            let ball = CompactRegion::ball(Point::new(0.0, 0.0), 0.5).unwrap();
            let r = supinf_statistic(&seq, &ball, 1.0).unwrap();
            let target = 2.0 - 2.0 * beta;
            assert!((r.slope.unwrap() - target).abs() <= 0.05 * target.abs(), "beta={beta}: {:?}", r.slope);
        }
    }

    #[test]
    fn annulus_statistic_diverges() {
        let seq: Vec<_> = indices().into_iter().map(|i| (i, P::annulus(i).unwrap())).collect();
        let circle = CompactRegion::circle(1.5).unwrap();
        for c1 in [0.5, 1.0, 3.0] {
            let r = supinf_statistic(&seq, &circle, c1).unwrap();
            assert!(r.slope.unwrap() < -1.0);
            assert!(r.statistic[3..].windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn short_sequences_have_no_slope() {
        let seq: Vec<_> = [1.0, 2.0, 3.0].into_iter().map(|i| (i, P::bubble(i).unwrap())).collect();
        let ball = CompactRegion::ball(Point::new(0.0, 0.0), 0.5).unwrap();
        assert!(supinf_statistic(&seq, &ball, 1.0).unwrap().slope.is_none());
    }

    #[test]
    fn bad_documents_are_rejected() {
        assert!(SupInfReport::<f64>::from_csv("i,sup_omega,inf_K,s_i\n").is_err());
        assert!(SupInfReport::<f64>::from_text("[report]\nslope=1\n").is_err());
    }

    proptest! {
        #[test]
        fn serialisations_round_trip(
            rows in proptest::collection::vec((-50.0f64..50.0, -50.0f64..50.0), 1..12),
            c1 in 0.1f64..5.0,
        ) {
            let idx: Vec<f64> = (1..=rows.len()).map(|k| k as f64).collect();
            let r = SupInfReport::<f64>::assemble(c1, idx, rows.iter().map(|r| r.0).collect(), rows.iter().map(|r| r.1).collect()).unwrap();
            let a = SupInfReport::<f64>::from_csv(&r.to_csv()).unwrap();
            let b = SupInfReport::<f64>::from_text(&r.to_text()).unwrap();
            prop_assert_eq!(&a.sup_omega, &r.sup_omega);
            prop_assert_eq!(&b.inf_k, &r.inf_k);
            prop_assert_eq!(a.c1, r.c1);
            assert_relative_eq!(b.statistic[0], r.statistic[0], epsilon = 1e-12);
        }
    }
}
